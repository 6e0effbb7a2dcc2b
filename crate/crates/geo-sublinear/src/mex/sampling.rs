//! Generalized rank, uniform-adaptive sampling, and sandwich estimation over
//! any shape family. The ball versions in `crate::outliers` are thin wrappers
//! over these.

use rand::Rng;

use crate::dataset::{sample_indices, PointSet, Rng64};
use crate::error::{Error, Result};
use crate::meb::ceil_tol;
use crate::report::RunStats;

use super::ShapeFamily;

/// Total order used everywhere points are ranked by distance: larger ranking
/// distance first, ties toward the lower index.
#[inline]
fn farther_first(a: &(f64, usize), b: &(f64, usize)) -> std::cmp::Ordering {
    b.0.partial_cmp(&a.0)
        .unwrap_or(std::cmp::Ordering::Equal)
        .then_with(|| a.1.cmp(&b.1))
}

/// The `t` farthest points of `P` from `center` by the family's ranking
/// distance (a full pass with linear-time selection, not a sort), together
/// with the touch size `l` of the (t+1)-th ranked point, so that
/// `P \ x(center, l) = Q`. With `debug_assertions` the set identity is
/// verified on every call.
pub fn generalized_rank<F: ShapeFamily>(
    family: &F,
    center: &F::Center,
    points: &PointSet,
    t: usize,
    stats: &mut RunStats,
) -> Result<(Vec<usize>, f64)> {
    let n = points.len();
    if t < 1 || t >= n {
        return Err(Error::invalid(format!("rank t = {t} must lie in [1, n)")));
    }
    stats.full_passes += 1;
    let mut keyed: Vec<(f64, usize)> = (0..n)
        .map(|i| (family.rank_distance(center, points, i), i))
        .collect();
    let (_, pivot, _) = keyed.select_nth_unstable_by(t, farther_first);
    let boundary_idx = pivot.1;
    let q: Vec<usize> = keyed[..t].iter().map(|&(_, i)| i).collect();
    let l = family.touch_size(center, points, boundary_idx);

    #[cfg(debug_assertions)]
    if l.is_finite() {
        let in_q: std::collections::HashSet<usize> = q.iter().copied().collect();
        let boundary_touch = l;
        for i in 0..n {
            let touch = family.touch_size(center, points, i);
            if !touch.is_finite() {
                continue; // no finite size covers the point; always outside
            }
            if (touch - boundary_touch).abs() <= 1e-9 * boundary_touch.abs().max(1.0) {
                continue; // boundary tie; either side is legal
            }
            let outside = !family.contains(center, l, points, i);
            debug_assert_eq!(
                outside,
                in_q.contains(&i),
                "rank witness violated at point {i}"
            );
        }
    }

    Ok((q, l))
}

/// Two-level sampling: draw `n' = ceil((c/delta) ln(1/eta1))` points uniformly,
/// keep the farthest `ceil(1.5 (delta+gamma) n')` of them, and return one of
/// those uniformly. With probability at least
/// `(1-eta1) * delta / (3(delta+gamma))` the returned point is an optimal-set
/// member among the globally farthest `(delta+gamma) n` points.
pub fn generalized_uniform_adaptive<F: ShapeFamily>(
    family: &F,
    center: &F::Center,
    points: &PointSet,
    gamma: f64,
    delta: f64,
    eta1: f64,
    sample_constant: f64,
    rng: &mut Rng64,
    stats: &mut RunStats,
) -> Result<usize> {
    if !(delta > 0.0 && delta < 1.0) || !(0.0..1.0).contains(&gamma) {
        return Err(Error::invalid(
            "uniform-adaptive needs delta in (0,1), gamma in [0,1)",
        ));
    }
    if !(eta1 > 0.0 && eta1 < 1.0) {
        return Err(Error::invalid("eta1 must lie in (0, 1)"));
    }
    let n_prime = ceil_tol((sample_constant / delta) * (1.0 / eta1).ln()).max(1);
    let t_prime = ceil_tol(1.5 * (delta + gamma) * n_prime as f64);
    if t_prime < 1 {
        return Err(Error::invalid(
            "adaptive pool is empty; increase the sample size constant",
        ));
    }
    let t_prime = t_prime.min(n_prime);
    let sample = sample_indices(points.len(), n_prime, rng, stats);
    let mut keyed: Vec<(f64, usize)> = sample
        .into_iter()
        .map(|i| (family.rank_distance(center, points, i), i))
        .collect();
    if t_prime < keyed.len() {
        keyed.select_nth_unstable_by(t_prime - 1, farther_first);
    }
    let pick = rng.gen_range(0..t_prime);
    Ok(keyed[pick].1)
}

/// Sample-rank size estimate: draw `n'' = ceil((c gamma / delta^2) ln(1/eta2))`
/// points and return the touch size of the
/// `(ceil((1+delta/gamma)^2 gamma n'') + 1)`-th farthest sampled point. With
/// probability `1 - eta2` the estimate is at most the true
/// `((delta+gamma) n + 1)`-th ranked size and leaves at most
/// `(gamma + 5 delta) n` points uncovered. Requires `delta < gamma / 3`.
pub fn generalized_sandwich<F: ShapeFamily>(
    family: &F,
    center: &F::Center,
    points: &PointSet,
    gamma: f64,
    delta: f64,
    eta2: f64,
    sample_constant: f64,
    rng: &mut Rng64,
    stats: &mut RunStats,
) -> Result<f64> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::invalid("sandwich estimation needs gamma in (0, 1)"));
    }
    if !(delta > 0.0 && delta < gamma / 3.0) {
        return Err(Error::invalid(format!(
            "sandwich estimation needs delta < gamma/3 (delta = {delta}, gamma = {gamma})"
        )));
    }
    if !(eta2 > 0.0 && eta2 < 1.0) {
        return Err(Error::invalid("eta2 must lie in (0, 1)"));
    }
    let n2 = ceil_tol((sample_constant * gamma / (delta * delta)) * (1.0 / eta2).ln()).max(2);
    let ratio = 1.0 + delta / gamma;
    let t2 = ceil_tol(ratio * ratio * gamma * n2 as f64).min(n2 - 1);
    let sample = sample_indices(points.len(), n2, rng, stats);
    let mut keyed: Vec<(f64, usize)> = sample
        .into_iter()
        .map(|i| (family.rank_distance(center, points, i), i))
        .collect();
    let (_, pivot, _) = keyed.select_nth_unstable_by(t2, farther_first);
    Ok(family.touch_size(center, points, pivot.1))
}

/// Sample sizes used by the two primitives, exposed for reporting.
pub fn uniform_adaptive_sample_size(delta: f64, eta1: f64, c: f64) -> usize {
    ceil_tol((c / delta) * (1.0 / eta1).ln()).max(1)
}

pub fn sandwich_sample_size(gamma: f64, delta: f64, eta2: f64, c: f64) -> usize {
    ceil_tol((c * gamma / (delta * delta)) * (1.0 / eta2).ln()).max(2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::RngStream;
    use crate::meb::{Center, Kernel, PreparedCenter};
    use crate::mex::{BallFamily, HalfSpaceFamily};

    fn line_points() -> PointSet {
        PointSet::from_rows((0..4).map(|i| vec![i as f64, 0.0]).collect()).unwrap()
    }

    #[test]
    fn rank_matches_hand_enumeration() {
        let p = line_points();
        let family = BallFamily {
            kernel: Kernel::Linear,
        };
        let o = PreparedCenter::new(&p, &Center::explicit(vec![0.0, 0.0]), Kernel::Linear).unwrap();
        let (q, l) = generalized_rank(&family, &o, &p, 2, &mut RunStats::default()).unwrap();
        let mut sorted = q.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, vec![2, 3]);
        assert_eq!(l, 1.0);
        // t = n-1 leaves only the nearest point.
        let (_, l_min) = generalized_rank(&family, &o, &p, 3, &mut RunStats::default()).unwrap();
        assert_eq!(l_min, 0.0);
        assert!(generalized_rank(&family, &o, &p, 4, &mut RunStats::default()).is_err());
        assert!(generalized_rank(&family, &o, &p, 0, &mut RunStats::default()).is_err());
    }

    #[test]
    fn rank_half_space_picks_most_negative_projections() {
        // Points on a line through the origin; Q holds the most negative
        // projections onto u.
        let p = PointSet::from_rows(
            [-3.0f64, -1.0, 0.5, 2.0, 4.0, 5.0]
                .iter()
                .map(|&x| vec![x, 0.0])
                .collect(),
        )
        .unwrap();
        let u = vec![1.0, 0.0];
        let (q, l) =
            generalized_rank(&HalfSpaceFamily, &u, &p, 2, &mut RunStats::default()).unwrap();
        let mut sorted = q.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, vec![0, 1]);
        // Boundary point is x = 0.5; touch size = 1/0.5.
        assert!((l - 2.0).abs() < 1e-12);
    }

    #[test]
    fn uniform_adaptive_coincident_points() {
        let p = PointSet::from_rows(vec![vec![1.0, 1.0]; 8]).unwrap();
        let family = BallFamily {
            kernel: Kernel::Linear,
        };
        let o = PreparedCenter::new(&p, &Center::explicit(vec![0.0, 0.0]), Kernel::Linear).unwrap();
        let mut rng = RngStream::from_seed(1).rng();
        let idx = generalized_uniform_adaptive(
            &family,
            &o,
            &p,
            0.1,
            0.05,
            0.1,
            1.0,
            &mut rng,
            &mut RunStats::default(),
        )
        .unwrap();
        assert!(idx < 8);
    }

    #[test]
    fn sandwich_equidistant_returns_common_distance() {
        let p = PointSet::from_rows(vec![
            vec![1.0, 0.0],
            vec![-1.0, 0.0],
            vec![0.0, 1.0],
            vec![0.0, -1.0],
        ])
        .unwrap();
        let family = BallFamily {
            kernel: Kernel::Linear,
        };
        let o = PreparedCenter::new(&p, &Center::explicit(vec![0.0, 0.0]), Kernel::Linear).unwrap();
        let mut rng = RngStream::from_seed(2).rng();
        let l = generalized_sandwich(
            &family,
            &o,
            &p,
            0.3,
            0.05,
            0.1,
            1.0,
            &mut rng,
            &mut RunStats::default(),
        )
        .unwrap();
        assert!((l - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sandwich_precondition_enforced() {
        let p = line_points();
        let family = BallFamily {
            kernel: Kernel::Linear,
        };
        let o = PreparedCenter::new(&p, &Center::explicit(vec![0.0, 0.0]), Kernel::Linear).unwrap();
        let mut rng = RngStream::from_seed(3).rng();
        assert!(generalized_sandwich(
            &family,
            &o,
            &p,
            0.1,
            0.05,
            0.1,
            1.0,
            &mut rng,
            &mut RunStats::default()
        )
        .is_err());
    }

    #[test]
    fn sample_size_formulas() {
        // n' = ceil((1/delta) ln(1/eta1)); t' pool for gamma=0.1, delta=0.05,
        // n'=200 has ceil(1.5 * 0.15 * 200) = 45 members.
        assert_eq!(uniform_adaptive_sample_size(0.05, 0.1, 1.0), 47);
        let n_prime = 200usize;
        assert_eq!(ceil_tol(1.5 * (0.05 + 0.1) * n_prime as f64), 45);
        // Sandwich rank for gamma=0.1, delta=0.02, n''=1000 is 144.
        let ratio: f64 = 1.0 + 0.02 / 0.1;
        assert_eq!(ceil_tol(ratio * ratio * 0.1 * 1000.0), 144);
    }
}
