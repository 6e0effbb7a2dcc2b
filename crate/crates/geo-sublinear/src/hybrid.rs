//! Hybrid radius-or-covering approximation without stability assumptions:
//! run both the outlier-tolerant route and the stability route, score them
//! in a single pass over the data, and label the output by a ratio test.
//! The label also yields a one-sided bound on the instance's stability
//! degree.

use serde::{Deserialize, Serialize};

use crate::dataset::{PointSet, RngStream};
use crate::error::{Error, Result};
use crate::meb::{ceil_tol, Ball, Kernel, PreparedCenter};
use crate::outliers::{bicriteria_sublinear, candidate_centers, BiCriteriaParams, OutlierInstance};
use crate::report::RunStats;
use crate::stable::{meb_alg2, EXPANSION_COEFF};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ApproxLabel {
    RadiusApprox,
    CoveringApprox,
}

impl ApproxLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            ApproxLabel::RadiusApprox => "radius-approx",
            ApproxLabel::CoveringApprox => "covering-approx",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HybridProblem {
    Meb,
    MebOutliers,
}

/// One-sided bound on the stability degree inferred from the label.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum StabilityBound {
    /// `alpha_hat < value` (open upper bound).
    UpperOpen { value: f64 },
    /// `alpha_hat > value` (open lower bound).
    LowerOpen { value: f64 },
}

#[derive(Debug, Clone)]
pub struct HybridResult {
    pub ball: Ball,
    pub label: ApproxLabel,
    /// The tested ratio (radius-route size over covering-route size).
    pub ratio: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub problem: HybridProblem,
    /// Radius achieved by the radius route (full-scan or rank radius).
    pub radius_route: f64,
    /// Radius achieved by the covering route.
    pub covering_route: f64,
    pub stability: StabilityBound,
}

/// Tunables for the hybrid solvers. The internal bi-criteria run inherits the
/// repetition cap and, because the theoretical round count and center
/// precision for the internal radius error are far beyond desk scale, a
/// round cap and a floor on the internal radius error (both flagged when
/// binding).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HybridParams {
    pub epsilon: f64,
    pub delta: f64,
    pub eta0: f64,
    pub eta1: f64,
    pub rep_cap: usize,
    pub round_cap: usize,
    pub candidate_cap: usize,
    pub fw_cap: u64,
    /// Smallest radius error the internal bi-criteria run is asked for.
    pub inner_eps_floor: f64,
}

impl HybridParams {
    pub fn new(epsilon: f64, delta: f64) -> Self {
        HybridParams {
            epsilon,
            delta,
            eta0: 0.1,
            eta1: 0.1,
            rep_cap: 60,
            round_cap: 48,
            candidate_cap: 4096,
            fw_cap: 200_000,
            inner_eps_floor: 0.05,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::invalid("epsilon must lie in (0, 1)"));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::invalid("delta must lie in (0, 1)"));
        }
        Ok(())
    }

    fn inner_bicriteria(&self, epsilon: f64, delta: f64, stats: &mut RunStats) -> BiCriteriaParams {
        let eps_eff = epsilon.max(self.inner_eps_floor).min(0.999);
        if eps_eff > epsilon {
            stats.flag("hybrid-inner-eps-floor");
        }
        let mut p = BiCriteriaParams::new(eps_eff, delta);
        p.eta1 = self.eta1;
        p.rep_cap = self.rep_cap;
        p.fw_cap = self.fw_cap;
        let natural = ceil_tol(2.0 / eps_eff) + 1;
        if natural > self.round_cap {
            p.z = Some(self.round_cap);
            stats.flag("hybrid-round-cap");
        }
        p
    }
}

/// Hybrid MEB: a bi-criteria run on `(P, delta/2)` with radius error
/// `eps^2/2` gives the covering route `B(c, r_c)`; the stability route center
/// comes from the binary-search solver under an assumed `(eps^2, delta/2)`
/// stability; one full pass computes its covering radius. The output is
/// labeled by the ratio test at `(1+eps) / (1-eps^2/2)`.
pub fn hybrid_meb(
    points: &PointSet,
    params: &HybridParams,
    kernel: Kernel,
    stream: RngStream,
    stats: &mut RunStats,
) -> Result<HybridResult> {
    params.validate()?;
    kernel.validate()?;
    let (eps, delta) = (params.epsilon, params.delta);

    // Covering route: bi-criteria (1 + eps^2/2, 1 - delta/2) on (P, delta/2).
    let inst = OutlierInstance::new(points.clone(), delta / 2.0)?;
    let bic = params.inner_bicriteria(eps * eps / 2.0, delta / 2.0, stats);
    let (cover_ball, _) = bicriteria_sublinear(&inst, &bic, kernel, stream.child(1), stats)?;
    let r_c = cover_ball.radius;

    // Stability route, then its true covering radius in one full pass.
    let tilde = meb_alg2(
        points,
        eps,
        delta / 2.0,
        params.eta0,
        kernel,
        stream.child(2),
        stats,
    )?;
    let prep = PreparedCenter::new(points, &tilde.center, kernel)?;
    stats.full_passes += 1;
    let mut r_tilde: f64 = 0.0;
    for i in 0..points.len() {
        r_tilde = r_tilde.max(prep.dist_sq(points, i));
    }
    let r_tilde = r_tilde.sqrt();

    let threshold = (1.0 + eps) / (1.0 - eps * eps / 2.0);
    let (ratio, label) = label_by_ratio(r_tilde, r_c, threshold);
    let (ball, stability) = match label {
        ApproxLabel::RadiusApprox => (
            Ball::new(tilde.center, r_tilde),
            StabilityBound::UpperOpen { value: eps },
        ),
        ApproxLabel::CoveringApprox => (
            cover_ball,
            StabilityBound::LowerOpen {
                value: eps * eps / 2.0,
            },
        ),
    };
    Ok(HybridResult {
        ball,
        label,
        ratio,
        epsilon: eps,
        delta,
        problem: HybridProblem::Meb,
        radius_route: r_tilde,
        covering_route: r_c,
        stability,
    })
}

fn label_by_ratio(radius_route: f64, covering_route: f64, threshold: f64) -> (f64, ApproxLabel) {
    if radius_route == 0.0 && covering_route == 0.0 {
        // Degenerate instance: a zero-radius ball is trivially optimal.
        return (1.0, ApproxLabel::RadiusApprox);
    }
    let ratio = radius_route / covering_route;
    if ratio <= threshold {
        (ratio, ApproxLabel::RadiusApprox)
    } else {
        (ratio, ApproxLabel::CoveringApprox)
    }
}

/// Hybrid MEB with outliers: candidate centers come from the uniform-adaptive
/// greedy machinery at radius error `eps^2 / (2 (2 sqrt 2 + sqrt 3)^2)`; one
/// full pass computes, for every candidate `q`, the rank radii
/// `r_q` (covering `(1-gamma) n` points) and `r'_q` (covering
/// `(1-delta-gamma) n`); the two minimizers are labeled by the ratio test at
/// `(1+eps) / (1 - eps^2 / (2 (2 sqrt 2 + sqrt 3)^2))`.
pub fn hybrid_meb_outliers(
    inst: &OutlierInstance,
    params: &HybridParams,
    kernel: Kernel,
    stream: RngStream,
    stats: &mut RunStats,
) -> Result<HybridResult> {
    params.validate()?;
    kernel.validate()?;
    let points = &inst.points;
    let n = points.len();
    let gamma = inst.gamma;
    let (eps, delta) = (params.epsilon, params.delta);
    let coeff = 2.0 * EXPANSION_COEFF * EXPANSION_COEFF; // 2 (2 sqrt 2 + sqrt 3)^2
    let eps_inner = eps * eps / coeff;

    let mut bic = params.inner_bicriteria(eps_inner, delta, stats);
    // Keep the candidate batch within the configured cap.
    let z = bic.rounds();
    let max_reps = (params.candidate_cap / z).max(1);
    if bic.repetitions_sublinear(gamma) > max_reps {
        bic.repetitions = Some(max_reps);
        stats.flag("hybrid-candidate-cap");
    }
    let centers = candidate_centers(points, gamma, &bic, kernel, stream.child(1), stats)?;
    let prepared: Vec<PreparedCenter> = centers
        .iter()
        .map(|c| PreparedCenter::new(points, c, kernel))
        .collect::<Result<_>>()?;

    // Rank positions: r_q is the k1-th smallest distance (k1 covering points),
    // held as the m-th largest with m = n - k + 1 in a bounded min-heap.
    let k1 = ceil_tol((1.0 - gamma) * n as f64).clamp(1, n);
    let k2 = ceil_tol((1.0 - delta - gamma).max(0.0) * n as f64).clamp(1, n);
    let m1 = n - k1 + 1;
    let m2 = n - k2 + 1;
    let mut heaps1: Vec<BoundedMinHeap> = (0..prepared.len())
        .map(|_| BoundedMinHeap::new(m1))
        .collect();
    let mut heaps2: Vec<BoundedMinHeap> = (0..prepared.len())
        .map(|_| BoundedMinHeap::new(m2))
        .collect();
    stats.full_passes += 1;
    for i in 0..n {
        for (c, prep) in prepared.iter().enumerate() {
            let d = prep.dist(points, i);
            heaps1[c].push(d);
            heaps2[c].push(d);
        }
    }
    let mut s1 = (0usize, f64::INFINITY);
    let mut s2 = (0usize, f64::INFINITY);
    for c in 0..prepared.len() {
        let r_q = heaps1[c].min_kept();
        let r2_q = heaps2[c].min_kept();
        if r_q < s1.1 {
            s1 = (c, r_q);
        }
        if r2_q < s2.1 {
            s2 = (c, r2_q);
        }
    }

    let threshold = (1.0 + eps) / (1.0 - eps * eps / coeff);
    let (ratio, label) = label_by_ratio(s1.1, s2.1, threshold);
    let (ball, stability) = match label {
        ApproxLabel::RadiusApprox => (
            Ball::new(centers[s1.0].clone(), s1.1),
            StabilityBound::UpperOpen { value: eps },
        ),
        ApproxLabel::CoveringApprox => (
            Ball::new(centers[s2.0].clone(), s2.1),
            StabilityBound::LowerOpen {
                value: eps * eps / coeff,
            },
        ),
    };
    Ok(HybridResult {
        ball,
        label,
        ratio,
        epsilon: eps,
        delta,
        problem: HybridProblem::MebOutliers,
        radius_route: s1.1,
        covering_route: s2.1,
        stability,
    })
}

/// One-sided stability bound implied by a hybrid result: a radius label means
/// `alpha_hat < eps`; a covering label means `alpha_hat > eps^2/2` for plain
/// MEB and `alpha_hat > eps^2 / (2 (2 sqrt 2 + sqrt 3)^2)` for the outlier
/// variant. The passed `epsilon` must match the one the result was produced
/// with.
pub fn infer_stability(result: &HybridResult, epsilon: f64) -> Result<StabilityBound> {
    if (epsilon - result.epsilon).abs() > 1e-12 {
        return Err(Error::invalid(format!(
            "epsilon mismatch: result was produced with {}, asked about {epsilon}",
            result.epsilon
        )));
    }
    Ok(result.stability)
}

/// Bounded min-heap keeping the `m` largest values pushed; `min_kept` is then
/// the m-th largest overall. Distances are non-negative, so the IEEE bit
/// pattern preserves their order.
struct BoundedMinHeap {
    cap: usize,
    heap: std::collections::BinaryHeap<std::cmp::Reverse<u64>>,
}

impl BoundedMinHeap {
    fn new(cap: usize) -> Self {
        BoundedMinHeap {
            cap,
            heap: std::collections::BinaryHeap::with_capacity(cap + 1),
        }
    }

    fn push(&mut self, v: f64) {
        debug_assert!(v >= 0.0);
        let bits = v.to_bits();
        if self.heap.len() < self.cap {
            self.heap.push(std::cmp::Reverse(bits));
        } else if let Some(&std::cmp::Reverse(min)) = self.heap.peek() {
            if bits > min {
                self.heap.pop();
                self.heap.push(std::cmp::Reverse(bits));
            }
        }
    }

    fn min_kept(&self) -> f64 {
        self.heap
            .peek()
            .map(|&std::cmp::Reverse(bits)| f64::from_bits(bits))
            .unwrap_or(f64::INFINITY)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{generate, Family};
    use crate::meb::Center;

    #[test]
    fn threshold_is_a_pure_function_of_the_ratio() {
        let threshold: f64 = (1.0 + 0.2) / (1.0 - 0.02);
        assert!((threshold - 1.2244897959183674).abs() < 1e-12);
        let (r, l) = label_by_ratio(1.0, 1.0, threshold);
        assert_eq!(l, ApproxLabel::RadiusApprox);
        assert!((r - 1.0).abs() < 1e-15);
        let (_, l2) = label_by_ratio(1.3, 1.0, threshold);
        assert_eq!(l2, ApproxLabel::CoveringApprox);
        // Degenerate 0/0 resolves to a radius label with ratio 1.
        let (r3, l3) = label_by_ratio(0.0, 0.0, threshold);
        assert_eq!((r3, l3), (1.0, ApproxLabel::RadiusApprox));
    }

    #[test]
    fn bounded_heap_rank_selection() {
        let mut h = BoundedMinHeap::new(3);
        for v in [5.0, 1.0, 9.0, 3.0, 7.0] {
            h.push(v);
        }
        // Third largest of {9, 7, 5, 3, 1} is 5.
        assert_eq!(h.min_kept(), 5.0);
    }

    #[test]
    fn stability_inference_bounds() {
        let ball = Ball::new(Center::explicit(vec![0.0]), 1.0);
        let mk = |label, problem, stability| HybridResult {
            ball: ball.clone(),
            label,
            ratio: 1.0,
            epsilon: 0.3,
            delta: 0.2,
            problem,
            radius_route: 1.0,
            covering_route: 1.0,
            stability,
        };
        let r = mk(
            ApproxLabel::RadiusApprox,
            HybridProblem::Meb,
            StabilityBound::UpperOpen { value: 0.3 },
        );
        assert_eq!(
            infer_stability(&r, 0.3).unwrap(),
            StabilityBound::UpperOpen { value: 0.3 }
        );
        assert!(infer_stability(&r, 0.2).is_err());
        let c = mk(
            ApproxLabel::CoveringApprox,
            HybridProblem::Meb,
            StabilityBound::LowerOpen { value: 0.045 },
        );
        match infer_stability(&c, 0.3).unwrap() {
            StabilityBound::LowerOpen { value } => assert!((value - 0.045).abs() < 1e-12),
            _ => panic!("expected lower bound"),
        }
        // Outlier-variant covering bound: eps^2 / (2 (2 sqrt 2 + sqrt 3)^2).
        let expected = 0.09 / (2.0 * EXPANSION_COEFF * EXPANSION_COEFF);
        assert!((expected - 0.0021636738519611176).abs() < 1e-12);
    }

    #[test]
    fn hybrid_meb_single_point_degenerate() {
        let p = PointSet::from_rows(vec![vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let params = HybridParams::new(0.3, 0.4);
        let mut stats = RunStats::default();
        let res = hybrid_meb(
            &p,
            &params,
            Kernel::Linear,
            RngStream::from_seed(1),
            &mut stats,
        )
        .unwrap();
        assert_eq!(res.label, ApproxLabel::RadiusApprox);
        assert_eq!(res.ball.radius, 0.0);
    }

    #[test]
    fn hybrid_meb_stable_instance_radius_label() {
        let inst = generate(
            &Family::UniformBall {
                n: 3000,
                d: 12,
                radius: 1.0,
            },
            RngStream::from_seed(2),
        )
        .unwrap();
        let params = HybridParams::new(0.35, 0.2);
        let mut stats = RunStats::default();
        let res = hybrid_meb(
            &inst.points,
            &params,
            Kernel::Linear,
            RngStream::from_seed(3),
            &mut stats,
        )
        .unwrap();
        assert_eq!(stats.full_passes, 1, "exactly one full pass");
        assert_eq!(res.label, ApproxLabel::RadiusApprox);
        assert!(res.ball.radius <= (1.0 + params.epsilon) * 1.0 + 1e-9);
    }

    #[test]
    fn hybrid_outliers_single_candidate_rank_ordering() {
        // r'_q (fewer points to cover) is never larger than r_q.
        let gen = generate(
            &Family::PlantedOutliers {
                n: 600,
                d: 6,
                gamma: 0.1,
                radius: 1.0,
                separation: 8.0,
            },
            RngStream::from_seed(4),
        )
        .unwrap();
        let inst = OutlierInstance::new(gen.points, gen.gamma).unwrap();
        let params = HybridParams::new(0.5, 0.1);
        let mut stats = RunStats::default();
        let res = hybrid_meb_outliers(
            &inst,
            &params,
            Kernel::Linear,
            RngStream::from_seed(5),
            &mut stats,
        )
        .unwrap();
        assert_eq!(stats.full_passes, 1);
        assert!(res.covering_route <= res.radius_route + 1e-12);
    }
}
