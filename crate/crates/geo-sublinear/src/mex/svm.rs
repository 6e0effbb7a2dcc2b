//! Polytope-distance and SVM-with-outliers solvers built on the greedy
//! segment-projection iteration, with outlier tolerance supplied by the
//! uniform-adaptive and sandwich primitives on the half-space family.
//!
//! The margin solvers work in plain Euclidean geometry (the margin output
//! carries an explicit unit normal, which rules out RBF feature space; the
//! polytope-distance iteration itself supports kernels through combination
//! centers).

use rand::Rng;

use crate::dataset::{sample_indices, PointSet, Rng64, RngStream};
use crate::error::{Error, Result};
use crate::meb::{ceil_tol, Center, Kernel};
use crate::mex::{
    generalized_rank, generalized_sandwich, generalized_uniform_adaptive, HalfSpaceFamily,
    HalfSpaceMargin, ShapeFamily,
};
use crate::outliers::{BiCriteriaParams, OutlierInstance};
use crate::report::RunStats;

/// Stopping rule for the polytope-distance iteration: a fixed iteration count
/// or a relative error target (which derives its iteration bound
/// `2 ceil(2 E / eps)` from running estimates of `E = D^2 / rho^2`).
#[derive(Debug, Clone, Copy)]
pub enum GilbertTarget {
    Iterations(usize),
    RelativeError(f64),
}

#[derive(Debug, Clone)]
pub struct GilbertOutcome {
    pub center: Center,
    pub distance: f64,
    pub iterations: usize,
    /// The origin appears to lie inside the hull (distance collapsed to 0).
    pub collapsed: bool,
    /// Last `E = D^2 / rho^2` estimate used for the iteration bound.
    pub e_estimate: Option<f64>,
    /// A `(1 - eps)` certificate held at exit (relative-error mode).
    pub certified: bool,
    /// `|v_i|` after every accepted step, starting with the initial vector.
    pub norms: Vec<f64>,
}

/// Current hull vector as a convex combination, with an explicit coordinate
/// cache under the linear kernel.
struct HullVector<'a> {
    points: &'a PointSet,
    kernel: Kernel,
    support: Vec<(usize, f64)>,
    explicit: Option<Vec<f64>>,
    norm_sq: f64,
}

impl<'a> HullVector<'a> {
    fn from_point(points: &'a PointSet, kernel: Kernel, i: usize) -> Self {
        let explicit = match kernel {
            Kernel::Linear => Some(points.row_dense(i)),
            Kernel::Rbf { .. } => None,
        };
        let norm_sq = kernel.eval_self(points, i);
        HullVector {
            points,
            kernel,
            support: vec![(i, 1.0)],
            explicit,
            norm_sq,
        }
    }

    fn dot_point(&self, j: usize) -> f64 {
        if let Some(coords) = &self.explicit {
            self.points.dot(j, coords)
        } else {
            self.support
                .iter()
                .map(|&(i, w)| w * self.kernel.eval(self.points, i, j))
                .sum()
        }
    }

    /// Moves to `(1-t) v + t p_j`, accepting only non-increasing norms.
    /// Returns whether the step was taken.
    fn step_toward(&mut self, j: usize, t: f64) -> bool {
        let dot = self.dot_point(j);
        let kjj = self.kernel.eval_self(self.points, j);
        let new_norm_sq =
            (1.0 - t) * (1.0 - t) * self.norm_sq + 2.0 * t * (1.0 - t) * dot + t * t * kjj;
        if new_norm_sq > self.norm_sq {
            return false;
        }
        for (_, w) in &mut self.support {
            *w *= 1.0 - t;
        }
        if let Some(entry) = self.support.iter_mut().find(|(i, _)| *i == j) {
            entry.1 += t;
        } else {
            self.support.push((j, t));
        }
        if let Some(coords) = &mut self.explicit {
            let row = self.points.row_dense(j);
            for (c, r) in coords.iter_mut().zip(&row) {
                *c = (1.0 - t) * *c + t * r;
            }
        }
        self.norm_sq = new_norm_sq.max(0.0);
        true
    }

    fn center(&self) -> Center {
        let mut support: Vec<(usize, f64)> = self
            .support
            .iter()
            .copied()
            .filter(|&(_, w)| w > 0.0)
            .collect();
        let sum: f64 = support.iter().map(|&(_, w)| w).sum();
        for (_, w) in &mut support {
            *w /= sum;
        }
        Center::Combination { support }
    }
}

/// Sampled estimate of the feature-space diameter (64 points, fixed stream).
fn sampled_diameter(points: &PointSet, kernel: Kernel) -> f64 {
    let mut rng = RngStream::new(0xd1a, 7).rng();
    let m = points.len().min(64);
    let idx = sample_indices(points.len(), m, &mut rng, &mut RunStats::default());
    let mut best: f64 = 0.0;
    for a in 0..m {
        for b in (a + 1)..m {
            let d2 = kernel.eval_self(points, idx[a]) + kernel.eval_self(points, idx[b])
                - 2.0 * kernel.eval(points, idx[a], idx[b]);
            best = best.max(d2.max(0.0));
        }
    }
    best.sqrt()
}

const COLLAPSE_NORM_SQ: f64 = 1e-24;
const GILBERT_HARD_CAP: usize = 1_000_000;

/// Greedy polytope distance from the origin: starting at the closest input
/// point, repeatedly project the origin onto the segment toward the point
/// with the smallest projection onto the current vector. `|v_i|` never
/// increases. In relative-error mode the loop also exits early once the dual
/// bound `min_j <p_j, v>/|v| >= (1 - eps) |v|` certifies the margin.
pub fn gilbert(
    points: &PointSet,
    target: GilbertTarget,
    kernel: Kernel,
    stats: &mut RunStats,
) -> Result<GilbertOutcome> {
    kernel.validate()?;
    let n = points.len();
    let mut start = (0usize, f64::INFINITY);
    for i in 0..n {
        let norm = kernel.eval_self(points, i);
        if norm < start.1 {
            start = (i, norm);
        }
    }
    let mut v = HullVector::from_point(points, kernel, start.0);
    let mut norms = vec![v.norm_sq.sqrt()];
    let mut iterations = 0usize;
    let mut collapsed = false;
    let mut certified = false;
    let mut e_estimate = None;
    let mut bound = match target {
        GilbertTarget::Iterations(n) => n.min(GILBERT_HARD_CAP),
        GilbertTarget::RelativeError(eps) => {
            if !(eps > 0.0 && eps < 1.0) {
                return Err(Error::invalid("relative error must lie in (0, 1)"));
            }
            GILBERT_HARD_CAP
        }
    };
    let diameter = match target {
        GilbertTarget::RelativeError(_) => sampled_diameter(points, kernel),
        _ => 0.0,
    };

    while iterations < bound {
        if v.norm_sq < COLLAPSE_NORM_SQ {
            collapsed = true;
            break;
        }
        if let GilbertTarget::RelativeError(eps) = target {
            if iterations.is_multiple_of(100) {
                let rho = v.norm_sq.sqrt();
                let e = (diameter / rho).powi(2);
                e_estimate = Some(e);
                bound = (2.0 * (2.0 * e / eps).ceil()) as usize;
                bound = bound.clamp(1, GILBERT_HARD_CAP);
            }
        }
        stats.full_passes += 1;
        let mut pick = (0usize, f64::INFINITY);
        for j in 0..n {
            let d = v.dot_point(j);
            if d < pick.1 {
                pick = (j, d);
            }
        }
        if let GilbertTarget::RelativeError(eps) = target {
            let norm = v.norm_sq.sqrt();
            if pick.1 > 0.0 && norm <= pick.1 / norm / (1.0 - eps) {
                certified = true;
                break;
            }
        }
        let denom = v.norm_sq - 2.0 * pick.1 + kernel.eval_self(points, pick.0);
        if denom <= 0.0 {
            break;
        }
        let t = ((v.norm_sq - pick.1) / denom).clamp(0.0, 1.0);
        iterations += 1;
        if t <= 0.0 || !v.step_toward(pick.0, t) {
            break;
        }
        norms.push(v.norm_sq.sqrt());
    }
    if v.norm_sq < COLLAPSE_NORM_SQ {
        collapsed = true;
    }
    if collapsed {
        stats.flag("gilbert-origin-inside-hull");
    }
    Ok(GilbertOutcome {
        center: v.center(),
        distance: if collapsed { 0.0 } else { v.norm_sq.sqrt() },
        iterations,
        collapsed,
        e_estimate,
        certified,
        norms,
    })
}

/// Half-spaces anchored at a shifted origin (used by the two-class solver,
/// where the anchor is a sampled midpoint between the classes so the margin
/// straddles it). The center is the unit normal in the original frame.
pub(crate) struct ShiftedHalfSpaceFamily {
    pub shift: Vec<f64>,
}

impl ShapeFamily for ShiftedHalfSpaceFamily {
    type Center = Vec<f64>;

    fn name(&self) -> &'static str {
        "shifted-half-spaces"
    }

    fn rank_distance(&self, center: &Self::Center, points: &PointSet, idx: usize) -> f64 {
        let shift_dot: f64 = self.shift.iter().zip(center).map(|(a, b)| a * b).sum();
        -(points.dot(idx, center) - shift_dot)
    }

    fn touch_size(&self, center: &Self::Center, points: &PointSet, idx: usize) -> f64 {
        let shift_dot: f64 = self.shift.iter().zip(center).map(|(a, b)| a * b).sum();
        let proj = points.dot(idx, center) - shift_dot;
        if proj > 0.0 {
            1.0 / proj
        } else {
            f64::INFINITY
        }
    }

    fn contains(&self, center: &Self::Center, size: f64, points: &PointSet, idx: usize) -> bool {
        let shift_dot: f64 = self.shift.iter().zip(center).map(|(a, b)| a * b).sum();
        size > 0.0 && points.dot(idx, center) - shift_dot >= 1.0 / size
    }
}

#[derive(Debug, Clone)]
pub struct SvmParams {
    pub bi: BiCriteriaParams,
    pub sublinear: bool,
    /// Cap on greedy iterations per repetition (the dynamic bound
    /// `2 ceil(2 E / eps)` applies underneath it).
    pub iter_cap: usize,
}

impl SvmParams {
    pub fn new(epsilon: f64, delta: f64) -> Self {
        SvmParams {
            bi: BiCriteriaParams::new(epsilon, delta),
            sublinear: false,
            iter_cap: 200,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SvmOutcome {
    pub margin: f64,
    pub size: f64,
    pub normal: Vec<f64>,
    pub repetitions_run: usize,
    pub infeasible_repetitions: usize,
    pub verified_coverage: Option<usize>,
}

fn unit(v: &[f64]) -> Option<Vec<f64>> {
    let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm < 1e-12 {
        return None;
    }
    Some(v.iter().map(|x| x / norm).collect())
}

/// One-class SVM with outliers: maximize the distance from the origin to a
/// hyperplane separating it from all but a `(delta + gamma)` fraction of the
/// points. Greedy vector updates use sampled picks from the smallest
/// projections; candidates are scored by the half-space size (reciprocal
/// margin), sampled in sublinear mode and exact otherwise. A `(1 - eps)`
/// margin approximation equals a `1/(1 - eps)` size approximation.
pub fn svm_one_class_outliers(
    inst: &OutlierInstance,
    params: &SvmParams,
    kernel: Kernel,
    stream: RngStream,
    stats: &mut RunStats,
) -> Result<(HalfSpaceMargin, SvmOutcome)> {
    params.bi.validate()?;
    if kernel != Kernel::Linear {
        return Err(Error::invalid(
            "margin outputs carry an explicit unit normal; only the linear kernel is supported",
        ));
    }
    let points = &inst.points;
    let n = points.len();
    let gamma = inst.gamma;
    let delta_eff = if params.sublinear {
        params.bi.delta / 5.0
    } else {
        params.bi.delta
    };
    let exact_scores = !params.sublinear || gamma == 0.0;
    if params.sublinear && gamma == 0.0 {
        stats.flag("svm-gamma-zero-exact-rank");
    }
    if params.sublinear && gamma > 0.0 && delta_eff >= gamma / 3.0 {
        return Err(Error::invalid("sublinear SVM needs delta/5 < gamma/3"));
    }
    let reps = if params.sublinear {
        params.bi.repetitions_sublinear(gamma)
    } else {
        params.bi.repetitions_linear(gamma)
    };
    let iter_cap = params.bi.z.unwrap_or(params.iter_cap);
    let eta2 = params
        .bi
        .eta2
        .unwrap_or_else(|| (1.0 / (iter_cap as f64 * reps as f64)).min(0.5));
    let t_pick = ceil_tol((delta_eff + gamma) * n as f64).clamp(1, n.saturating_sub(1).max(1));
    // Exclusion budget for exact scoring; floor semantics so gamma = 0 with a
    // vanishing delta covers every point.
    let t_score = (((delta_eff + gamma) * n as f64) + 1e-9).floor() as usize;
    let t_score = t_score.min(n - 1);
    let family = HalfSpaceFamily;
    let diameter = sampled_diameter(points, kernel);

    let mut best: Option<(Vec<f64>, f64)> = None; // (normal, size)
    let mut infeasible_reps = 0usize;
    for rep in 0..reps {
        let mut rng = stream.child(rep as u64).rng();
        let first = sample_indices(n, 1, &mut rng, stats)[0];
        let mut v = HullVector::from_point(points, kernel, first);
        let mut alive = true;
        let mut iter = 0usize;
        while alive && iter < iter_cap {
            iter += 1;
            if v.norm_sq < COLLAPSE_NORM_SQ {
                alive = false;
                break;
            }
            // Dynamic iteration bound from E = D^2 / rho^2.
            if iter % 100 == 1 {
                let e = (diameter * diameter / v.norm_sq).max(1.0);
                let bound = (2.0 * (2.0 * e / params.bi.epsilon).ceil()) as usize;
                if iter > bound {
                    break;
                }
            }
            let Some(u) = unit(v.explicit.as_ref().expect("linear kernel")) else {
                alive = false;
                break;
            };
            let pick = if params.sublinear {
                generalized_uniform_adaptive(
                    &family,
                    &u,
                    points,
                    gamma,
                    delta_eff,
                    params.bi.eta1,
                    params.bi.c2,
                    &mut rng,
                    stats,
                )?
            } else {
                let (q, _) = generalized_rank(&family, &u, points, t_pick, stats)?;
                q[rng.gen_range(0..q.len())]
            };
            let size = score_half_space(
                &family,
                &u,
                points,
                gamma,
                delta_eff,
                eta2,
                t_score,
                exact_scores,
                params.bi.c3,
                &mut rng,
                stats,
            )?;
            if size.is_finite() && size > 0.0 && best.as_ref().is_none_or(|(_, s)| size < *s) {
                best = Some((u.clone(), size));
            }
            let dot = v.dot_point(pick);
            let denom = v.norm_sq - 2.0 * dot + kernel.eval_self(points, pick);
            if denom <= 0.0 {
                break;
            }
            let t = ((v.norm_sq - dot) / denom).clamp(0.0, 1.0);
            if t <= 0.0 || !v.step_toward(pick, t) {
                break;
            }
        }
        if !alive {
            infeasible_reps += 1;
        }
    }
    let Some((normal, size)) = best else {
        return Err(Error::Infeasible(
            "no separating margin found: the vector collapsed in every repetition".into(),
        ));
    };
    let margin = HalfSpaceMargin::new(normal.clone(), size)?;
    let verified_coverage = if params.bi.verify_scan {
        stats.full_passes += 1;
        Some(
            (0..n)
                .filter(|&i| points.dot(i, &normal) >= 1.0 / size - 1e-9)
                .count(),
        )
    } else {
        None
    };
    Ok((
        margin.clone(),
        SvmOutcome {
            margin: margin.margin(),
            size,
            normal,
            repetitions_run: reps,
            infeasible_repetitions: infeasible_reps,
            verified_coverage,
        },
    ))
}

/// Size of the half-space covering all but the exclusion budget, by sandwich
/// estimate or exact rank; `t_score = 0` means cover everything.
#[allow(clippy::too_many_arguments)]
fn score_half_space<F: ShapeFamily<Center = Vec<f64>>>(
    family: &F,
    u: &Vec<f64>,
    points: &PointSet,
    gamma: f64,
    delta: f64,
    eta2: f64,
    t_score: usize,
    exact: bool,
    c3: f64,
    rng: &mut Rng64,
    stats: &mut RunStats,
) -> Result<f64> {
    if exact {
        if t_score == 0 {
            stats.full_passes += 1;
            let mut worst = f64::INFINITY;
            let mut size = 0.0f64;
            for i in 0..points.len() {
                let touch = family.touch_size(u, points, i);
                if touch > size {
                    size = touch;
                }
                worst = worst.min(touch);
            }
            Ok(size)
        } else {
            Ok(generalized_rank(family, u, points, t_score, stats)?.1)
        }
    } else {
        generalized_sandwich(family, u, points, gamma, delta, eta2, c3, rng, stats)
    }
}

/// A two-class margin: unit normal, width, and the two hyperplane offsets
/// (`<x, normal> = offset_hi` bounds the positive class, `= offset_lo` the
/// negative one).
#[derive(Debug, Clone)]
pub struct TwoClassMargin {
    pub normal: Vec<f64>,
    pub width: f64,
    pub offset_hi: f64,
    pub offset_lo: f64,
}

#[derive(Debug, Clone)]
pub struct TwoClassOutcome {
    pub margin: TwoClassMargin,
    pub repetitions_run: usize,
    pub infeasible_repetitions: usize,
    /// Per-class covered counts under the returned margin (verification).
    pub verified_coverage: Option<(usize, usize)>,
}

/// Two-class SVM with outliers: maximize the width of a margin separating
/// all but `(gamma_c + O(delta))` of each class. The greedy vector walks the
/// implicit difference polytope: per round one point is sampled from each
/// class's extreme-projection pool and the difference updates the vector.
/// Candidate widths are the sum of the two per-class sandwich/rank margins,
/// measured from a sampled midpoint anchor (the width itself is
/// translation-invariant). The documented per-class exclusion is
/// `(gamma_c + 5 delta) |P_c|`.
#[allow(clippy::too_many_arguments)]
pub fn svm_two_class_outliers(
    p1: &PointSet,
    p2: &PointSet,
    gamma1: f64,
    gamma2: f64,
    params: &SvmParams,
    kernel: Kernel,
    stream: RngStream,
    stats: &mut RunStats,
) -> Result<(TwoClassMargin, TwoClassOutcome)> {
    params.bi.validate()?;
    if kernel != Kernel::Linear {
        return Err(Error::invalid(
            "margin outputs carry an explicit unit normal; only the linear kernel is supported",
        ));
    }
    if p1.dim() != p2.dim() {
        return Err(Error::invalid("class dimensions differ"));
    }
    for (name, g) in [("gamma1", gamma1), ("gamma2", gamma2)] {
        if !(0.0..1.0).contains(&g) {
            return Err(Error::invalid(format!("{name} must lie in [0, 1)")));
        }
    }
    let d = p1.dim();
    let delta = params.bi.delta;
    let reps = {
        let g = gamma1.max(gamma2);
        if params.sublinear {
            params.bi.repetitions_sublinear(g)
        } else {
            params.bi.repetitions_linear(g)
        }
    };
    let iter_cap = params.bi.z.unwrap_or(params.iter_cap);
    let eta2 = params
        .bi
        .eta2
        .unwrap_or_else(|| (1.0 / (iter_cap as f64 * reps as f64)).min(0.5));

    // Sampled midpoint anchor; widths are translation-invariant but the
    // half-space machinery needs its origin inside the margin.
    let shift = {
        let mut rng = stream.child(u64::MAX).rng();
        let c1 = sampled_centroid(p1, &mut rng, stats);
        let c2 = sampled_centroid(p2, &mut rng, stats);
        c1.iter()
            .zip(&c2)
            .map(|(a, b)| (a + b) / 2.0)
            .collect::<Vec<f64>>()
    };
    let fam = ShiftedHalfSpaceFamily {
        shift: shift.clone(),
    };

    let score_class = |u: &Vec<f64>,
                       points: &PointSet,
                       gamma_c: f64,
                       rng: &mut Rng64,
                       stats: &mut RunStats|
     -> Result<f64> {
        let n_c = points.len();
        let exact = !params.sublinear || gamma_c == 0.0 || n_c < 8;
        let t_score = if gamma_c == 0.0 {
            ((delta * n_c as f64) + 1e-9).floor() as usize
        } else {
            ceil_tol((delta + gamma_c) * n_c as f64)
        }
        .min(n_c - 1);
        let size = score_half_space(
            &fam,
            u,
            points,
            gamma_c,
            delta,
            eta2,
            t_score,
            exact,
            params.bi.c3,
            rng,
            stats,
        )?;
        if size.is_finite() && size > 0.0 {
            Ok(1.0 / size)
        } else {
            Ok(f64::NEG_INFINITY)
        }
    };

    let mut best: Option<(Vec<f64>, f64, f64, f64)> = None; // (u, width, m1, m2)
    let mut infeasible_reps = 0usize;
    for rep in 0..reps {
        let mut rng = stream.child(rep as u64).rng();
        let i1 = sample_indices(p1.len(), 1, &mut rng, stats)[0];
        let i2 = sample_indices(p2.len(), 1, &mut rng, stats)[0];
        let mut v: Vec<f64> = (0..d)
            .map(|j| p1.row_dense(i1)[j] - p2.row_dense(i2)[j])
            .collect();
        let mut norm_sq: f64 = v.iter().map(|x| x * x).sum();
        let mut alive = true;
        for _iter in 0..iter_cap {
            if norm_sq < COLLAPSE_NORM_SQ {
                alive = false;
                break;
            }
            let Some(u) = unit(&v) else {
                alive = false;
                break;
            };
            let neg_u: Vec<f64> = u.iter().map(|x| -x).collect();
            // Candidate width from the two class margins.
            let m1 = score_class(&u, p1, gamma1, &mut rng, stats)?;
            let m2 = score_class(&neg_u, p2, gamma2, &mut rng, stats)?;
            let width = m1 + m2;
            if width.is_finite()
                && width > 0.0
                && best.as_ref().is_none_or(|(_, w, _, _)| width > *w)
            {
                best = Some((u.clone(), width, m1, m2));
            }
            // Extreme-projection picks per class.
            let pick1 = pick_class(&fam, &u, p1, gamma1, delta, params, &mut rng, stats)?;
            let pick2 = pick_class(&fam, &neg_u, p2, gamma2, delta, params, &mut rng, stats)?;
            let diff: Vec<f64> = (0..d)
                .map(|j| p1.row_dense(pick1)[j] - p2.row_dense(pick2)[j])
                .collect();
            // Min-norm point on the segment toward the difference vector.
            let dot: f64 = v.iter().zip(&diff).map(|(a, b)| a * b).sum();
            let diff_sq: f64 = diff.iter().map(|x| x * x).sum();
            let denom = norm_sq - 2.0 * dot + diff_sq;
            if denom <= 0.0 {
                break;
            }
            let t = ((norm_sq - dot) / denom).clamp(0.0, 1.0);
            if t <= 0.0 {
                break;
            }
            let new_v: Vec<f64> = v
                .iter()
                .zip(&diff)
                .map(|(a, b)| (1.0 - t) * a + t * b)
                .collect();
            let new_norm: f64 = new_v.iter().map(|x| x * x).sum();
            if new_norm > norm_sq {
                break;
            }
            v = new_v;
            norm_sq = new_norm;
        }
        if !alive {
            infeasible_reps += 1;
        }
    }
    let Some((u, width, m1, m2)) = best else {
        return Err(Error::Infeasible(
            "classes are inseparable within the outlier removal budget".into(),
        ));
    };
    let shift_dot: f64 = shift.iter().zip(&u).map(|(a, b)| a * b).sum();
    let margin = TwoClassMargin {
        normal: u.clone(),
        width,
        offset_hi: m1 + shift_dot,
        offset_lo: -m2 + shift_dot,
    };
    let verified_coverage = if params.bi.verify_scan {
        stats.full_passes += 1;
        let c1 = (0..p1.len())
            .filter(|&i| p1.dot(i, &u) >= margin.offset_hi - 1e-9)
            .count();
        let c2 = (0..p2.len())
            .filter(|&i| p2.dot(i, &u) <= margin.offset_lo + 1e-9)
            .count();
        Some((c1, c2))
    } else {
        None
    };
    Ok((
        margin.clone(),
        TwoClassOutcome {
            margin,
            repetitions_run: reps,
            infeasible_repetitions: infeasible_reps,
            verified_coverage,
        },
    ))
}

#[allow(clippy::too_many_arguments)]
fn pick_class(
    fam: &ShiftedHalfSpaceFamily,
    u: &Vec<f64>,
    points: &PointSet,
    gamma_c: f64,
    delta: f64,
    params: &SvmParams,
    rng: &mut Rng64,
    stats: &mut RunStats,
) -> Result<usize> {
    let n_c = points.len();
    if n_c == 1 {
        return Ok(0);
    }
    let delta_pick = if params.sublinear { delta / 5.0 } else { delta };
    if params.sublinear && n_c >= 8 {
        generalized_uniform_adaptive(
            fam,
            u,
            points,
            gamma_c,
            delta_pick,
            params.bi.eta1,
            params.bi.c2,
            rng,
            stats,
        )
    } else {
        let t = ceil_tol((delta_pick + gamma_c) * n_c as f64).clamp(1, n_c - 1);
        let (q, _) = generalized_rank(fam, u, points, t, stats)?;
        Ok(q[rng.gen_range(0..q.len())])
    }
}

fn sampled_centroid(points: &PointSet, rng: &mut Rng64, stats: &mut RunStats) -> Vec<f64> {
    let m = points.len().min(256);
    let idx = sample_indices(points.len(), m, rng, stats);
    let mut acc = vec![0.0; points.dim()];
    for i in idx {
        points.axpy(i, 1.0 / m as f64, &mut acc);
    }
    acc
}
