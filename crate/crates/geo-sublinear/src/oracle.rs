//! Brute-force and certified reference solvers. Used by tests and the
//! `verify` CLI path only; none of these are performance-sensitive.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;

use crate::dataset::{PointSet, RngStream};
use crate::error::{Error, Result};
use crate::meb::{Center, Kernel, PreparedCenter, SupportSolver};
use crate::report::RunStats;

#[derive(Debug, Clone)]
pub struct OracleResult {
    pub optimum_size: f64,
    pub optimum_center: Center,
    pub method: &'static str,
    pub certified_tolerance: f64,
}

/// Exact (d <= 3) or certified high-precision (d > 3) minimum enclosing ball.
///
/// The low-dimensional path is the randomized incremental solver over support
/// sets of size at most d+1 (tolerance 1e-12). The high-dimensional path runs
/// the dual ascent with an active scan set and certifies
/// `radius / sqrt(dual) - 1 <= 1e-9`: the dual value is a global lower bound
/// on `Rad(P)^2` and the returned radius is a full-scan covering radius.
pub fn exact_meb(points: &PointSet) -> Result<OracleResult> {
    if points.dim() <= 3 {
        welzl_meb(points)
    } else {
        certified_meb(points, 1e-9)
    }
}

fn welzl_meb(points: &PointSet) -> Result<OracleResult> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    let mut rng = RngStream::new(0x5eed, 0xba11).rng();
    order.shuffle(&mut rng);
    let rows: Vec<Vec<f64>> = (0..points.len()).map(|i| points.row_dense(i)).collect();
    let mut ball: Option<(Vec<f64>, f64)> = None;
    for i in 0..order.len() {
        if !contains(&ball, &rows[order[i]]) {
            ball = Some(with_boundary(&rows, &order[..i], vec![order[i]]));
        }
    }
    let (center, radius) = ball.ok_or_else(|| Error::invalid("empty point set"))?;
    Ok(OracleResult {
        optimum_size: radius,
        optimum_center: Center::explicit(center),
        method: "welzl",
        certified_tolerance: 1e-12,
    })
}

fn contains(ball: &Option<(Vec<f64>, f64)>, p: &[f64]) -> bool {
    match ball {
        None => false,
        Some((c, r)) => {
            let d2: f64 = c.iter().zip(p).map(|(a, b)| (a - b) * (a - b)).sum();
            // Relative slack keeps degenerate boundary sets from forming.
            d2.sqrt() <= r * (1.0 + 1e-12) + 1e-14
        }
    }
}

fn with_boundary(rows: &[Vec<f64>], pts: &[usize], boundary: Vec<usize>) -> (Vec<f64>, f64) {
    let d = rows[0].len();
    let mut ball = circumball(rows, &boundary);
    if boundary.len() == d + 1 {
        return ball.expect("full boundary is affinely independent");
    }
    for i in 0..pts.len() {
        if !contains(&ball, &rows[pts[i]]) {
            let mut b2 = boundary.clone();
            b2.push(pts[i]);
            ball = Some(with_boundary(rows, &pts[..i], b2));
        }
    }
    ball.expect("boundary circumball exists")
}

/// Smallest ball through all boundary points: center in their affine hull.
fn circumball(rows: &[Vec<f64>], boundary: &[usize]) -> Option<(Vec<f64>, f64)> {
    let q0 = &rows[boundary[0]];
    let m = boundary.len() - 1;
    if m == 0 {
        return Some((q0.clone(), 0.0));
    }
    let d = q0.len();
    let vs: Vec<Vec<f64>> = boundary[1..]
        .iter()
        .map(|&i| rows[i].iter().zip(q0).map(|(a, b)| a - b).collect())
        .collect();
    let mut a = DMatrix::zeros(m, m);
    let mut b = DVector::zeros(m);
    for k in 0..m {
        for l in 0..m {
            a[(k, l)] = 2.0 * dot(&vs[k], &vs[l]);
        }
        b[k] = dot(&vs[k], &vs[k]);
    }
    let alpha = a.lu().solve(&b)?;
    let mut center = q0.clone();
    for k in 0..m {
        for j in 0..d {
            center[j] += alpha[k] * vs[k][j];
        }
    }
    let radius = dist(&center, q0);
    Some((center, radius))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Equality-constrained KKT solve for the MEB dual restricted to a support
/// set; returns weights if they come out (numerically) non-negative.
fn kkt_weights(gram: &[Vec<f64>], diag: &[f64], support: &[usize]) -> Option<Vec<f64>> {
    let m = support.len();
    let mut a = DMatrix::zeros(m + 1, m + 1);
    let mut b = DVector::zeros(m + 1);
    for (r, &i) in support.iter().enumerate() {
        for (c, &j) in support.iter().enumerate() {
            a[(r, c)] = 2.0 * gram[i][j];
        }
        a[(r, m)] = 1.0;
        a[(m, r)] = 1.0;
        b[r] = diag[i];
    }
    b[m] = 1.0;
    let sol = a.lu().solve(&b)?;
    let mut w = vec![0.0; m];
    let mut sum = 0.0;
    for k in 0..m {
        if sol[k] < -1e-10 {
            return None;
        }
        w[k] = sol[k].max(0.0);
        sum += w[k];
    }
    if sum <= 0.0 {
        return None;
    }
    for x in &mut w {
        *x /= sum;
    }
    Some(w)
}

fn certified_meb(points: &PointSet, tol: f64) -> Result<OracleResult> {
    let n = points.len();
    let mut stats = RunStats::default();
    let mut solver = SupportSolver::new(points, Kernel::Linear, 0);
    let mut added = vec![false; n];
    added[0] = true;
    let mut last: Option<(Center, f64, f64)> = None;
    for _outer in 0..400 {
        solver.refine(1e-5, 200_000, &mut stats);
        // Polish: KKT solve on the active support, kept when the dual improves.
        let (gram, diag, lambda) = solver.internals();
        let support: Vec<usize> = (0..lambda.len()).filter(|&i| lambda[i] > 1e-12).collect();
        if support.len() > 1 {
            if let Some(w) = kkt_weights(gram, diag, &support) {
                solver.try_weights(&support, &w);
            }
        }
        let dual = solver.dual_sq();
        let center = solver.center();
        let prep = PreparedCenter::new(points, &center, Kernel::Linear)?;
        let mut far = (0usize, f64::MIN);
        for i in 0..n {
            let d2 = prep.dist_sq(points, i);
            if d2 > far.1 {
                far = (i, d2);
            }
        }
        let radius = far.1.max(0.0).sqrt();
        let lower = dual.max(0.0).sqrt();
        let achieved = if lower > 0.0 {
            radius / lower - 1.0
        } else if radius == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        last = Some((center, radius, achieved));
        if achieved <= tol {
            break;
        }
        if !added[far.0] {
            solver.push(far.0);
            added[far.0] = true;
        }
    }
    let (center, radius, achieved) = last.expect("at least one outer iteration");
    Ok(OracleResult {
        optimum_size: radius,
        optimum_center: center,
        method: "fw-dual-certified",
        certified_tolerance: achieved,
    })
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
        if acc > 1e15 {
            return acc;
        }
    }
    acc
}

/// Exhaustive MEB with outliers: enumerates all outlier subsets of size
/// `ceil(gamma n)` and solves the remainder exactly. Refuses when the
/// subset count exceeds 1e6.
pub fn exact_meb_outliers_tiny(points: &PointSet, gamma: f64) -> Result<OracleResult> {
    let n = points.len();
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::invalid("gamma must lie in [0, 1)"));
    }
    let m = (gamma * n as f64 - 1e-9).ceil().max(0.0) as usize;
    if m >= n {
        return Err(Error::invalid("no inliers would remain"));
    }
    let combos = binomial(n, m);
    if combos > 1e6 {
        return Err(Error::BudgetExceeded(format!(
            "C({n}, {m}) = {combos:.3e} exceeds the 1e6 enumeration budget"
        )));
    }
    let mut best: Option<OracleResult> = None;
    let mut outliers: Vec<usize> = (0..m).collect();
    loop {
        let keep: Vec<usize> = (0..n).filter(|i| !outliers.contains(i)).collect();
        let rows: Vec<Vec<f64>> = keep.iter().map(|&i| points.row_dense(i)).collect();
        let sub = PointSet::from_rows(rows)?;
        let res = exact_meb(&sub)?;
        if best
            .as_ref()
            .is_none_or(|b| res.optimum_size < b.optimum_size)
        {
            // Map combination support back to original indices.
            let center = match res.optimum_center {
                Center::Explicit { coords } => Center::explicit(coords),
                Center::Combination { support } => {
                    Center::combination(support.into_iter().map(|(i, w)| (keep[i], w)).collect())
                }
            };
            best = Some(OracleResult {
                optimum_size: res.optimum_size,
                optimum_center: center,
                method: "outlier-enumeration",
                certified_tolerance: res.certified_tolerance,
            });
        }
        if m == 0 || !next_combination(&mut outliers, n) {
            break;
        }
    }
    Ok(best.expect("at least one subset"))
}

/// Lexicographic successor of a k-combination of {0..n-1}; false when done.
fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let k = combo.len();
    if k == 0 {
        return false;
    }
    let mut i = k;
    while i > 0 {
        i -= 1;
        if combo[i] < n - k + i {
            combo[i] += 1;
            for j in (i + 1)..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Minimum-norm point of the convex hull by enumeration over support subsets
/// with closed-form least-norm solutions (n <= 6, tolerance 1e-10).
pub fn exact_polytope_distance_tiny(points: &PointSet) -> Result<OracleResult> {
    let n = points.len();
    if n > 6 {
        return Err(Error::BudgetExceeded(format!(
            "polytope-distance enumeration supports n <= 6, got {n}"
        )));
    }
    let gram: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| points.dot_rows(i, j)).collect())
        .collect();
    let mut best: Option<(f64, Vec<(usize, f64)>)> = None;
    for mask in 1u32..(1 << n) {
        let subset: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        let weights = if subset.len() == 1 {
            Some(vec![1.0])
        } else {
            min_norm_weights(&gram, &subset)
        };
        let Some(w) = weights else { continue };
        let mut norm_sq = 0.0;
        for (a, &i) in subset.iter().enumerate() {
            for (b, &j) in subset.iter().enumerate() {
                norm_sq += w[a] * w[b] * gram[i][j];
            }
        }
        let value = norm_sq.max(0.0).sqrt();
        if best.as_ref().is_none_or(|(v, _)| value < *v) {
            best = Some((
                value,
                subset.iter().copied().zip(w.iter().copied()).collect(),
            ));
        }
    }
    let (value, support) = best.expect("nonempty subset exists");
    Ok(OracleResult {
        optimum_size: value,
        optimum_center: Center::combination(support),
        method: "polytope-enumeration",
        certified_tolerance: 1e-10,
    })
}

/// Least-norm affine combination restricted to the simplex: KKT solve of
/// `min |sum w_i p_i|^2` with `sum w_i = 1`; `None` if infeasible or singular.
fn min_norm_weights(gram: &[Vec<f64>], subset: &[usize]) -> Option<Vec<f64>> {
    let m = subset.len();
    let mut a = DMatrix::zeros(m + 1, m + 1);
    let mut b = DVector::zeros(m + 1);
    for (r, &i) in subset.iter().enumerate() {
        for (c, &j) in subset.iter().enumerate() {
            a[(r, c)] = 2.0 * gram[i][j];
        }
        a[(r, m)] = 1.0;
        a[(m, r)] = 1.0;
    }
    b[m] = 1.0;
    let sol = a.lu().solve(&b)?;
    let mut w = vec![0.0; m];
    let mut sum = 0.0;
    for k in 0..m {
        if sol[k] < -1e-12 {
            return None;
        }
        w[k] = sol[k].max(0.0);
        sum += w[k];
    }
    if sum <= 0.0 {
        return None;
    }
    for x in &mut w {
        *x /= sum;
    }
    Some(w)
}
