//! Sublinear MEB under the stability assumption: radius-range estimation,
//! the net-sampling solver, the radius-guess oracle, and the binary-search
//! solver built on it.
//!
//! Throughout this module the instance is assumed `(eps^2, beta)`-stable with
//! `beta > beta0`: removing fewer than `beta n` points cannot shrink the
//! optimal radius below `(1 - eps^2) Rad(P)`. The core-set subroutines run
//! with `eps` replaced by `eps^2` accordingly.

use serde::{Deserialize, Serialize};

use crate::dataset::{sample_indices, PointSet, RngStream};
use crate::error::{Error, Result};
use crate::meb::{badoiu_clarkson, ceil_tol, Ball, Center, Kernel, PreparedCenter, SupportSolver};
use crate::report::RunStats;

pub const EXPANSION_COEFF: f64 = 4.560477932315068; // 2 sqrt(2) + sqrt(3)

/// Stability parameters: the radius error `epsilon` (the instance is assumed
/// `(epsilon^2, beta)`-stable), a lower bound `beta0 < beta`, the failure
/// probability `eta`, and the net-size constant `c1` (hidden Theta constant,
/// default 1).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StabilityParams {
    pub epsilon: f64,
    pub beta0: f64,
    pub eta: f64,
    pub c1: f64,
    pub fw_cap: u64,
}

impl StabilityParams {
    pub fn new(epsilon: f64, beta0: f64, eta: f64) -> Self {
        StabilityParams {
            epsilon,
            beta0,
            eta,
            c1: 1.0,
            fw_cap: 2_000_000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("epsilon", self.epsilon),
            ("beta0", self.beta0),
            ("eta", self.eta),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::invalid(format!(
                    "{name} must lie in (0, 1), got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// An interval known to contain `Rad(P)` with the stated probability;
/// degenerate (`[0, 0]`) when the probe pair coincides or `n < 2`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RadiusInterval {
    pub lo: f64,
    pub hi: f64,
    pub degenerate: bool,
}

/// Estimates a radius range from one probe point and a small sample: picks
/// `p1` uniformly, samples `ceil((1/beta0) ln(1/eta))` points, takes the
/// farthest sampled point `p2`, and returns
/// `[|p1-p2| / 2, |p1-p2| / (1 - eps^2)]`. On `(eps^2, beta)`-stable inputs
/// with `beta > beta0` the interval contains `Rad(P)` with probability at
/// least `1 - eta`.
pub fn radius_range(
    points: &PointSet,
    epsilon: f64,
    beta0: f64,
    eta: f64,
    stream: RngStream,
    stats: &mut RunStats,
) -> Result<RadiusInterval> {
    StabilityParams::new(epsilon, beta0, eta).validate()?;
    if points.len() < 2 {
        stats.flag("radius-range-degenerate");
        return Ok(RadiusInterval {
            lo: 0.0,
            hi: 0.0,
            degenerate: true,
        });
    }
    let mut rng = stream.rng();
    let p1 = sample_indices(points.len(), 1, &mut rng, stats)[0];
    let m = ceil_tol((1.0 / beta0) * (1.0 / eta).ln()).max(1);
    let sample = sample_indices(points.len(), m, &mut rng, stats);
    let mut best = (p1, 0.0f64);
    for i in sample {
        let d = points.dist_rows(p1, i);
        if d > best.1 || (d == best.1 && i < best.0) {
            best = (i, d);
        }
    }
    if best.1 == 0.0 {
        stats.flag("radius-range-degenerate");
        return Ok(RadiusInterval {
            lo: 0.0,
            hi: 0.0,
            degenerate: true,
        });
    }
    Ok(RadiusInterval {
        lo: best.1 / 2.0,
        hi: best.1 / (1.0 - epsilon * epsilon),
        degenerate: false,
    })
}

/// Net-sampling MEB: samples
/// `ceil((c1/beta0) max(ln(1/eta), d ln(d/beta0)))` points, computes a
/// `(1 + eps^2)`-radius approximate MEB of the sample, and expands the radius
/// by `(1 + (2 sqrt 2 + sqrt 3) eps) / (1 - eps^2)`. On stable inputs this is
/// a `lambda`-radius approximation with probability at least `1 - eta`, where
/// `lambda = (1 + (2 sqrt 2 + sqrt 3) eps)(1 + eps^2) / (1 - eps^2)`.
pub fn meb_alg1(
    points: &PointSet,
    params: &StabilityParams,
    kernel: Kernel,
    stream: RngStream,
    stats: &mut RunStats,
) -> Result<Ball> {
    params.validate()?;
    kernel.validate()?;
    let (eps, beta0) = (params.epsilon, params.beta0);
    let d = points.dim() as f64;
    let size = (params.c1 / beta0) * (1.0 / params.eta).ln().max(d * (d / beta0).ln());
    let m = ceil_tol(size).max(1);
    let mut rng = stream.rng();
    let sample = sample_indices(points.len(), m, &mut rng, stats);
    let rows: Vec<Vec<f64>> = sample.iter().map(|&i| points.row_dense(i)).collect();
    let sub = PointSet::from_rows(rows)?;
    let eps_inner = eps * eps;
    let (ball, _) = badoiu_clarkson(&sub, eps_inner, 1.0 / 3.0, kernel, stats)?;
    let center = remap_center(ball.center, &sample);
    let radius = ball.radius * (1.0 + EXPANSION_COEFF * eps) / (1.0 - eps * eps);
    Ok(Ball::new(center, radius))
}

fn remap_center(center: Center, sample: &[usize]) -> Center {
    match center {
        Center::Explicit { coords } => Center::Explicit { coords },
        Center::Combination { support } => Center::Combination {
            support: support.into_iter().map(|(i, w)| (sample[i], w)).collect(),
        },
    }
}

/// Radius-guess oracle: grows a core set by sampled farthest points, each
/// round testing whether the sampled farthest point already falls within `h`
/// of the approximate center. Answers yes within `z` rounds whenever
/// `h >= (1 + eps^2) Rad(P)`; answers no with probability at least `1 - eta`
/// whenever `h < (1 - eps^2) Rad(P)` on stable inputs. Returns the verdict
/// and the last center.
#[allow(clippy::too_many_arguments)]
pub fn test_h(
    points: &PointSet,
    h: f64,
    z: usize,
    epsilon: f64,
    beta0: f64,
    eta: f64,
    kernel: Kernel,
    stream: RngStream,
    stats: &mut RunStats,
) -> Result<(bool, Center)> {
    StabilityParams::new(epsilon, beta0, eta).validate()?;
    if !(h > 0.0) {
        // A non-positive guess can never cover a sampled point strictly.
        stats.flag("test-h-nonpositive-guess");
    }
    if z < 1 {
        return Err(Error::invalid("z must be at least 1"));
    }
    let eps2 = epsilon * epsilon;
    let xi = (1.0 / 3.0) * eps2 / (1.0 + eps2);
    let q_size = ceil_tol((1.0 / beta0) * (z as f64 / eta).ln()).max(1);
    let mut rng = stream.rng();
    let first = sample_indices(points.len(), 1, &mut rng, stats)[0];
    let mut solver = SupportSolver::new(points, kernel, first);
    for _round in 1..=z {
        solver.refine(xi, 2_000_000, stats);
        let center = solver.center();
        let prep = PreparedCenter::new(points, &center, kernel)?;
        let sample = sample_indices(points.len(), q_size, &mut rng, stats);
        let mut far = (usize::MAX, f64::MIN);
        for i in sample {
            let d = prep.dist(points, i);
            if d > far.1 || (d == far.1 && i < far.0) {
                far = (i, d);
            }
        }
        solver.push(far.0);
        if far.1 < h {
            // The returned center is the ball center of T as it stands when
            // the loop stops, including the point just added.
            solver.refine(xi, 2_000_000, stats);
            return Ok((true, solver.center()));
        }
    }
    solver.refine(xi, 2_000_000, stats);
    Ok((false, solver.center()))
}

/// Binary-search MEB: brackets `Rad(P)` with [`radius_range`], walks the
/// geometric grid `(1+eps^2)^i (1-eps^2) a` with the radius-guess oracle to
/// find the no/yes boundary `i0`, reruns the oracle at
/// `h = (1+eps^2)^(i0+2) a`, and returns the final center with radius
/// `(1 + (2 sqrt 2 + 2 sqrt 6 / sqrt(1-eps^2)) eps) / (1+eps^2) * h`.
pub fn meb_alg2(
    points: &PointSet,
    epsilon: f64,
    beta0: f64,
    eta0: f64,
    kernel: Kernel,
    stream: RngStream,
    stats: &mut RunStats,
) -> Result<Ball> {
    StabilityParams::new(epsilon, beta0, eta0).validate()?;
    kernel.validate()?;
    let eps2 = epsilon * epsilon;
    let interval = radius_range(points, epsilon, beta0, eta0 / 2.0, stream.child(0), stats)?;
    if interval.degenerate {
        return Ok(Ball::new(Center::point_of(0), 0.0));
    }
    let a = interval.lo;
    let w = ceil_tol((2.0 / ((1.0 - eps2) * (1.0 - eps2))).ln() / (1.0 + eps2).ln()) + 1;
    let z = ceil_tol(3.0 / eps2).max(1);
    let eta_search = eta0 / (2.0 * (w as f64).log2().max(1.0));
    let grid = |i: i64| -> f64 { (1.0 + eps2).powi(i as i32) * (1.0 - eps2) * a };

    // Lowest grid index answering yes over [0, w], assuming a unique no/yes
    // boundary; w+1 encodes "all no".
    let mut lo = 0i64;
    let mut hi = w as i64 + 1;
    let mut probe = 1u64;
    while lo < hi {
        let mid = (lo + hi) / 2;
        let (yes, _) = test_h(
            points,
            grid(mid),
            z,
            epsilon,
            beta0,
            eta_search,
            kernel,
            stream.child(probe),
            stats,
        )?;
        probe += 1;
        if yes {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let first_yes = lo;
    if first_yes == w as i64 + 1 {
        stats.flag("grid-all-no");
    }
    if first_yes == 0 {
        stats.flag("grid-all-yes");
    }
    let i0 = first_yes - 1;

    let h_final = (1.0 + eps2).powi((i0 + 2) as i32) * a;
    let (yes, center) = test_h(
        points,
        h_final,
        z,
        epsilon,
        beta0,
        eta0 / 2.0,
        kernel,
        stream.child(probe),
        stats,
    )?;
    if !yes {
        stats.flag("final-test-no");
    }
    let x2 = (2.0 * std::f64::consts::SQRT_2 + 2.0 * 6.0f64.sqrt() / (1.0 - eps2).sqrt()) * epsilon;
    let radius = (1.0 + x2) / (1.0 + eps2) * h_final;
    Ok(Ball::new(center, radius))
}

/// The radius multiplier of the binary-search solver's guarantee:
/// `lambda = (1 + x1)(1 + x2) / (1 + eps^2)` with `x1 = 8 eps^2 / (1 - eps^2)`
/// and `x2 = (2 sqrt 2 + 2 sqrt 6 / sqrt(1 - eps^2)) eps`.
pub fn alg2_lambda(epsilon: f64) -> f64 {
    let eps2 = epsilon * epsilon;
    let x1 = 8.0 * eps2 / (1.0 - eps2);
    let x2 = (2.0 * std::f64::consts::SQRT_2 + 2.0 * 6.0f64.sqrt() / (1.0 - eps2).sqrt()) * epsilon;
    (1.0 + x1) * (1.0 + x2) / (1.0 + eps2)
}

/// The radius multiplier of the net-sampling solver's guarantee.
pub fn alg1_lambda(epsilon: f64) -> f64 {
    (1.0 + EXPANSION_COEFF * epsilon) * (1.0 + epsilon * epsilon) / (1.0 - epsilon * epsilon)
}
