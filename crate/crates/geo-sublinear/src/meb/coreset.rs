//! Greedy core-set construction for MEB with approximate per-iteration
//! centers, and the Frank-Wolfe refinement it relies on.
//!
//! The refinement maximizes the dual `D(w) = w' diag(G) - w' G w` over the
//! simplex, where `G` is the kernel Gram matrix of the support set. Weak
//! duality gives `D(w) <= Rad(T)^2` for every feasible `w`, and for any point
//! `x` the farthest support point is at distance at least
//! `sqrt(|x - c|^2 + Rad(T)^2)`, so
//! `max_j |t_j - o|^2 <= (1 + xi^2) D(w)` certifies `|o - c| <= xi Rad(T)`.

use crate::dataset::PointSet;
use crate::error::{Error, Result};
use crate::report::RunStats;

use super::{ceil_tol, Ball, Center, CoreSetState, Kernel, PreparedCenter};

/// Frank-Wolfe state over a growing support set. Keeps the Gram matrix,
/// weights, and the running products needed for O(|T|) iterations.
#[derive(Clone)]
pub struct SupportSolver<'a> {
    points: &'a PointSet,
    kernel: Kernel,
    idx: Vec<usize>,
    gram: Vec<Vec<f64>>,
    diag: Vec<f64>,
    lambda: Vec<f64>,
    /// `G * lambda`
    q: Vec<f64>,
    /// `lambda' G lambda`
    s: f64,
    /// `lambda' diag`
    w: f64,
}

impl<'a> SupportSolver<'a> {
    pub fn new(points: &'a PointSet, kernel: Kernel, first: usize) -> Self {
        let mut solver = SupportSolver {
            points,
            kernel,
            idx: Vec::new(),
            gram: Vec::new(),
            diag: Vec::new(),
            lambda: Vec::new(),
            q: Vec::new(),
            s: 0.0,
            w: 0.0,
        };
        solver.push(first);
        solver.lambda[0] = 1.0;
        solver.refresh();
        solver
    }

    pub fn support(&self) -> &[usize] {
        &self.idx
    }

    #[allow(clippy::len_without_is_empty)] // support sets are never empty
    pub fn len(&self) -> usize {
        self.idx.len()
    }

    /// Adds a point to the support set with weight zero.
    pub fn push(&mut self, p: usize) {
        let m = self.idx.len();
        let mut row = Vec::with_capacity(m + 1);
        for j in 0..m {
            let v = self.kernel.eval(self.points, p, self.idx[j]);
            self.gram[j].push(v);
            row.push(v);
        }
        row.push(self.kernel.eval_self(self.points, p));
        self.diag.push(row[m]);
        self.gram.push(row);
        self.idx.push(p);
        self.lambda.push(0.0);
        let qn = (0..=m).map(|j| self.gram[m][j] * self.lambda[j]).sum();
        self.q.push(qn);
    }

    fn refresh(&mut self) {
        let m = self.idx.len();
        for i in 0..m {
            self.q[i] = (0..m).map(|j| self.gram[i][j] * self.lambda[j]).sum();
        }
        self.s = (0..m).map(|i| self.lambda[i] * self.q[i]).sum();
        self.w = (0..m).map(|i| self.lambda[i] * self.diag[i]).sum();
    }

    /// Dual value: a certified lower bound on `Rad(T)^2`.
    pub fn dual_sq(&self) -> f64 {
        (self.w - self.s).max(0.0)
    }

    /// Squared distance from support point `j` to the current center.
    fn dist_sq_j(&self, j: usize) -> f64 {
        (self.diag[j] - 2.0 * self.q[j] + self.s).max(0.0)
    }

    /// Runs Frank-Wolfe (with away steps and exact line search) until the
    /// certificate `max_j |t_j - o|^2 <= (1 + xi^2) D(w)` holds or the
    /// iteration budget runs out. The baseline budget is `ceil(4 / xi^2)`;
    /// up to 8x more iterations are spent if the certificate is still open,
    /// all bounded by `cap`. Returns whether the certificate holds.
    pub fn refine(&mut self, xi: f64, cap: u64, stats: &mut RunStats) -> bool {
        let xi2 = xi * xi;
        let budget = ((4.0 / xi2).ceil() as u64).max(1);
        let hard = budget.saturating_mul(8).min(cap.max(1));
        let m = self.idx.len();
        let mut used = 0u64;
        let mut certified = false;
        loop {
            // Farthest support point (FW vertex) and certificate check.
            let mut best_j = 0;
            let mut max_d2 = f64::MIN;
            for j in 0..m {
                let d2 = self.dist_sq_j(j);
                if d2 > max_d2 {
                    max_d2 = d2;
                    best_j = j;
                }
            }
            let dual = self.dual_sq();
            if max_d2 <= (1.0 + xi2) * dual {
                certified = true;
                break;
            }
            if used >= hard {
                break;
            }
            used += 1;
            if used.is_multiple_of(1024) {
                self.refresh();
            }

            // Toward step: h = e_j - lambda.
            let g_fw = (self.diag[best_j] - 2.0 * self.q[best_j]) - (self.w - 2.0 * self.s);
            let curv_fw = max_d2;
            // Away step: h = lambda - e_a for the nearest in-support point.
            let mut away: Option<(usize, f64, f64, f64)> = None;
            for j in 0..m {
                if self.lambda[j] > 0.0 && self.lambda[j] < 1.0 {
                    let d2 = self.dist_sq_j(j);
                    if away.is_none_or(|(_, _, _, best)| d2 < best) {
                        let g = (self.w - 2.0 * self.s) - (self.diag[j] - 2.0 * self.q[j]);
                        let tmax = self.lambda[j] / (1.0 - self.lambda[j]);
                        away = Some((j, g, tmax, d2));
                    }
                }
            }

            let gain = |g: f64, curv: f64, tmax: f64| -> (f64, f64) {
                if g <= 0.0 || curv <= 0.0 {
                    return (0.0, 0.0);
                }
                let t = (g / (2.0 * curv)).min(tmax);
                (t, t * g - t * t * curv)
            };
            let (t_fw, gain_fw) = gain(g_fw, curv_fw, 1.0);
            let (t_aw, gain_aw) = match away {
                Some((_, g, tmax, d2)) => gain(g, d2, tmax),
                None => (0.0, 0.0),
            };

            if gain_fw <= 0.0 && gain_aw <= 0.0 {
                break; // numerically stuck; certificate state reported below
            }

            if gain_fw >= gain_aw {
                let t = t_fw;
                let j = best_j;
                let qj = self.q[j];
                for l in &mut self.lambda {
                    *l *= 1.0 - t;
                }
                self.lambda[j] += t;
                self.s = (1.0 - t) * (1.0 - t) * self.s
                    + 2.0 * t * (1.0 - t) * qj
                    + t * t * self.diag[j];
                self.w = (1.0 - t) * self.w + t * self.diag[j];
                for l in 0..m {
                    self.q[l] = (1.0 - t) * self.q[l] + t * self.gram[l][j];
                }
            } else {
                let (a, _, tmax, _) = away.unwrap();
                let t = t_aw;
                let qa = self.q[a];
                for l in &mut self.lambda {
                    *l *= 1.0 + t;
                }
                self.lambda[a] -= t * 1.0;
                // Moving fully away drops the vertex from the support.
                self.lambda[a] = if t >= tmax {
                    0.0
                } else {
                    self.lambda[a].max(0.0)
                };
                self.s = (1.0 + t) * (1.0 + t) * self.s - 2.0 * t * (1.0 + t) * qa
                    + t * t * self.diag[a];
                self.w = (1.0 + t) * self.w - t * self.diag[a];
                for l in 0..m {
                    self.q[l] = (1.0 + t) * self.q[l] - t * self.gram[l][a];
                }
            }
        }
        stats.fw_iterations += used;
        if !certified {
            stats.flag("fw-uncertified");
        }
        certified
    }

    /// Current center as a convex combination over the support set.
    pub fn center(&self) -> Center {
        let mut support: Vec<(usize, f64)> = self
            .idx
            .iter()
            .zip(&self.lambda)
            .filter(|(_, &l)| l > 0.0)
            .map(|(&i, &l)| (i, l))
            .collect();
        let sum: f64 = support.iter().map(|&(_, l)| l).sum();
        for (_, l) in &mut support {
            *l /= sum;
        }
        Center::Combination { support }
    }

    /// Gram matrix, diagonal, and weights, for external polish steps.
    pub fn internals(&self) -> (&[Vec<f64>], &[f64], &[f64]) {
        (&self.gram, &self.diag, &self.lambda)
    }

    /// Replaces the weights with `w` on `support` (positions into the support
    /// set) when that improves the dual value; returns whether it was kept.
    pub fn try_weights(&mut self, support: &[usize], w: &[f64]) -> bool {
        let old_lambda = self.lambda.clone();
        let (old_s, old_w, old_q) = (self.s, self.w, self.q.clone());
        let old_dual = self.dual_sq();
        for l in &mut self.lambda {
            *l = 0.0;
        }
        for (&pos, &weight) in support.iter().zip(w) {
            self.lambda[pos] = weight;
        }
        self.refresh();
        if self.dual_sq() > old_dual {
            true
        } else {
            self.lambda = old_lambda;
            self.s = old_s;
            self.w = old_w;
            self.q = old_q;
            false
        }
    }
}

/// Computes a convex-combination center `o` over `T` with
/// `|o - c(MEB(T))| <= xi * Rad(T)`, by Frank-Wolfe refinement over `T`.
pub fn approx_center(
    points: &PointSet,
    t: &[usize],
    xi: f64,
    kernel: Kernel,
    stats: &mut RunStats,
) -> Result<Center> {
    if t.is_empty() {
        return Err(Error::invalid(
            "approx_center requires a non-empty support set",
        ));
    }
    if !(xi > 0.0 && xi < 1.0) {
        return Err(Error::invalid("xi must lie in (0, 1)"));
    }
    for &i in t {
        if i >= points.len() {
            return Err(Error::invalid(format!("support index {i} out of range")));
        }
    }
    let mut solver = SupportSolver::new(points, kernel, t[0]);
    for &i in &t[1..] {
        solver.push(i);
    }
    solver.refine(xi, u64::MAX, stats);
    Ok(solver.center())
}

/// Index and distance of the point farthest from `o`; ties break toward the
/// lowest index.
pub fn farthest_point(points: &PointSet, o: &Center, kernel: Kernel) -> Result<(usize, f64)> {
    let prep = PreparedCenter::new(points, o, kernel)?;
    Ok(farthest_scan(points, &prep, &mut RunStats::default()))
}

pub(crate) fn farthest_scan(
    points: &PointSet,
    prep: &PreparedCenter,
    stats: &mut RunStats,
) -> (usize, f64) {
    stats.full_passes += 1;
    let mut best = (0usize, f64::MIN);
    for i in 0..points.len() {
        let d2 = prep.dist_sq(points, i);
        if d2 > best.1 {
            best = (i, d2);
        }
    }
    (best.0, best.1.max(0.0).sqrt())
}

/// Feature-space distance from `o` to point `p_index`. With the linear kernel
/// this is the Euclidean distance.
pub fn eval_distance(points: &PointSet, o: &Center, p_index: usize, kernel: Kernel) -> Result<f64> {
    if p_index >= points.len() {
        return Err(Error::invalid(format!("index {p_index} out of range")));
    }
    let prep = PreparedCenter::new(points, o, kernel)?;
    Ok(prep.dist(points, p_index))
}

/// Greedy core-set MEB: starting from the lowest-index point, repeatedly
/// refine an approximate center of `T` (to within `xi = s*eps/(1+eps)` of the
/// exact center) and add the farthest point of `P`, for at most
/// `ceil(2/((1-s) eps))` additions. Each round's full scan yields a covering
/// ball `B(o_i, max_p |p - o_i|)`; the best round is returned, so the output
/// covers all of `P` unconditionally and some round is within `(1+eps)` of
/// the optimum. Stops early once the scan distance drops below `(1+eps)`
/// times a certified lower bound on `Rad(P)`.
pub fn badoiu_clarkson(
    points: &PointSet,
    epsilon: f64,
    s: f64,
    kernel: Kernel,
    stats: &mut RunStats,
) -> Result<(Ball, CoreSetState)> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::invalid("epsilon must lie in (0, 1)"));
    }
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::invalid("s must lie in (0, 1)"));
    }
    kernel.validate()?;
    let xi = s * epsilon / (1.0 + epsilon);
    let z = ceil_tol(2.0 / ((1.0 - s) * epsilon));

    let mut solver = SupportSolver::new(points, kernel, 0);
    let mut radius_lb = 0.0f64;
    let mut best: Option<(Center, f64)> = None;
    let mut rounds = 0usize;

    loop {
        rounds += 1;
        solver.refine(xi, u64::MAX, stats);
        radius_lb = radius_lb.max(solver.dual_sq().sqrt());
        let center = solver.center();
        let prep = PreparedCenter::new(points, &center, kernel)?;
        let (far_idx, far_dist) = farthest_scan(points, &prep, stats);
        if best.as_ref().is_none_or(|(_, r)| far_dist < *r) {
            best = Some((center, far_dist));
        }
        if far_dist <= (1.0 + epsilon) * radius_lb {
            break;
        }
        if solver.len() > z {
            break;
        }
        solver.push(far_idx);
    }

    let (center, radius) = best.expect("at least one round ran");
    let state = CoreSetState {
        t: solver.support().to_vec(),
        center: solver.center(),
        iteration: rounds,
        epsilon,
        s,
        xi,
    };
    Ok((Ball::new(center, radius), state))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{generate, Family, RngStream};
    use rand::Rng;

    #[test]
    fn approx_center_single_point() {
        let p = PointSet::from_rows(vec![vec![2.0, 3.0]]).unwrap();
        let c = approx_center(&p, &[0], 0.1, Kernel::Linear, &mut RunStats::default()).unwrap();
        let d = eval_distance(&p, &c, 0, Kernel::Linear).unwrap();
        assert_eq!(d, 0.0);
    }

    #[test]
    fn approx_center_two_points_near_midpoint() {
        // Exact MEB center of two points is the midpoint.
        let p = PointSet::from_rows(vec![vec![0.0, 0.0], vec![2.0, 0.0]]).unwrap();
        let c = approx_center(&p, &[0, 1], 0.1, Kernel::Linear, &mut RunStats::default()).unwrap();
        let prep = PreparedCenter::new(&p, &c, Kernel::Linear).unwrap();
        let coords = prep.coords().unwrap();
        let off = ((coords[0] - 1.0).powi(2) + coords[1].powi(2)).sqrt();
        assert!(off <= 0.1 * 1.0 + 1e-12, "offset {off}");
    }

    #[test]
    fn approx_center_simplex_contract() {
        // Exact center of a regular simplex is its centroid; radius has a
        // closed form, here sqrt(3/8) for d = 3.
        let inst = generate(&Family::Simplex { d: 3 }, RngStream::from_seed(0)).unwrap();
        let p = &inst.points;
        let xi = 0.01;
        let c = approx_center(
            p,
            &[0, 1, 2, 3],
            xi,
            Kernel::Linear,
            &mut RunStats::default(),
        )
        .unwrap();
        let prep = PreparedCenter::new(p, &c, Kernel::Linear).unwrap();
        let coords = prep.coords().unwrap();
        let centroid: Vec<f64> = (0..3)
            .map(|j| (0..4).map(|i| p.row(i)[j]).sum::<f64>() / 4.0)
            .collect();
        let off: f64 = coords
            .iter()
            .zip(&centroid)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        assert!(off <= xi * 0.6123724356957945, "offset {off}");
    }

    #[test]
    fn approx_center_contract_random_supports() {
        // Contract |o - c*| <= xi * Rad(T) against the exact low-d solver.
        let mut rng = RngStream::from_seed(42).rng();
        for trial in 0..20 {
            let n = 3 + (trial % 5);
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..3).map(|_| rng.gen::<f64>() * 4.0 - 2.0).collect())
                .collect();
            let p = PointSet::from_rows(rows).unwrap();
            let t: Vec<usize> = (0..n).collect();
            let xi = 0.05;
            let c = approx_center(&p, &t, xi, Kernel::Linear, &mut RunStats::default()).unwrap();
            let prep = PreparedCenter::new(&p, &c, Kernel::Linear).unwrap();
            let exact = crate::oracle::exact_meb(&p).unwrap();
            let exact_prep =
                PreparedCenter::new(&p, &exact.optimum_center, Kernel::Linear).unwrap();
            let off: f64 = prep
                .coords()
                .unwrap()
                .iter()
                .zip(exact_prep.coords().unwrap())
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            assert!(
                off <= xi * exact.optimum_size + 1e-9,
                "trial {trial}: offset {off} vs bound {}",
                xi * exact.optimum_size
            );
        }
    }

    #[test]
    fn farthest_point_basics() {
        let p = PointSet::from_rows(vec![vec![0.0, 0.0], vec![3.0, 0.0]]).unwrap();
        let o = Center::explicit(vec![0.0, 0.0]);
        let (i, d) = farthest_point(&p, &o, Kernel::Linear).unwrap();
        assert_eq!((i, d), (1, 3.0));

        let q = PointSet::from_rows(vec![vec![1.0, 1.0]; 4]).unwrap();
        let o2 = Center::explicit(vec![1.0, 1.0]);
        let (i2, d2) = farthest_point(&q, &o2, Kernel::Linear).unwrap();
        assert_eq!((i2, d2), (0, 0.0));
    }

    #[test]
    fn farthest_point_matches_naive_scan() {
        let mut rng = RngStream::from_seed(5).rng();
        let rows: Vec<Vec<f64>> = (0..100)
            .map(|_| (0..4).map(|_| rng.gen::<f64>()).collect())
            .collect();
        let p = PointSet::from_rows(rows).unwrap();
        let o = Center::explicit((0..4).map(|_| rng.gen::<f64>()).collect());
        let (i, d) = farthest_point(&p, &o, Kernel::Linear).unwrap();
        let prep = PreparedCenter::new(&p, &o, Kernel::Linear).unwrap();
        let mut naive = (0usize, f64::MIN);
        for j in 0..p.len() {
            let dist = prep.dist(&p, j);
            if dist > naive.1 {
                naive = (j, dist);
            }
        }
        assert_eq!(i, naive.0);
        assert!((d - naive.1).abs() < 1e-12);
    }

    #[test]
    fn eval_distance_cases() {
        let p = PointSet::from_rows(vec![vec![0.0, 0.0], vec![2.0, 0.0], vec![1.0, 0.0]]).unwrap();
        let o = Center::explicit(vec![1.0, 0.0]);
        assert_eq!(eval_distance(&p, &o, 2, Kernel::Linear).unwrap(), 0.0);
        let comb = Center::combination(vec![(0, 0.5), (1, 0.5)]);
        let d = eval_distance(&p, &comb, 2, Kernel::Linear).unwrap();
        assert!(d.abs() < 1e-12);
        let rbf = Kernel::Rbf { bandwidth: 1.0 };
        let single = Center::point_of(1);
        assert!(eval_distance(&p, &single, 1, rbf).unwrap().abs() < 1e-12);
    }

    #[test]
    fn bc_single_point_and_size_bound() {
        let p = PointSet::from_rows(vec![vec![5.0, 5.0]]).unwrap();
        let (ball, state) =
            badoiu_clarkson(&p, 0.1, 1.0 / 3.0, Kernel::Linear, &mut RunStats::default()).unwrap();
        assert_eq!(ball.radius, 0.0);
        assert_eq!(state.t.len(), 1);
        // z bound for s = 1/3: ceil(3/eps) additions + initial point.
        assert_eq!(CoreSetState::size_bound(0.1, 1.0 / 3.0), 31);
    }

    #[test]
    fn bc_covers_and_approximates_unit_ball_sample() {
        let inst = generate(
            &Family::UniformBall {
                n: 500,
                d: 8,
                radius: 1.0,
            },
            RngStream::from_seed(17),
        )
        .unwrap();
        let p = &inst.points;
        let eps = 0.05;
        let mut stats = RunStats::default();
        let (ball, state) = badoiu_clarkson(p, eps, 1.0 / 3.0, Kernel::Linear, &mut stats).unwrap();
        assert!(state.t.len() <= CoreSetState::size_bound(eps, 1.0 / 3.0));
        // Coverage.
        assert_eq!(ball.coverage(p, Kernel::Linear, 1e-9).unwrap(), p.len());
        // Quality against the certified oracle.
        let oracle = crate::oracle::exact_meb(p).unwrap();
        assert!(ball.radius >= oracle.optimum_size * (1.0 - 1e-9));
        assert!(
            ball.radius <= (1.0 + eps) * oracle.optimum_size * (1.0 + 1e-6),
            "radius {} vs oracle {}",
            ball.radius,
            oracle.optimum_size
        );
    }

    #[test]
    fn bc_kernel_linear_agrees_with_combination_path() {
        // With the linear kernel, combination and explicit evaluations agree.
        let inst = generate(
            &Family::UniformBall {
                n: 60,
                d: 4,
                radius: 1.0,
            },
            RngStream::from_seed(23),
        )
        .unwrap();
        let p = &inst.points;
        let (ball, _) =
            badoiu_clarkson(p, 0.1, 1.0 / 3.0, Kernel::Linear, &mut RunStats::default()).unwrap();
        let prep = PreparedCenter::new(p, &ball.center, Kernel::Linear).unwrap();
        let explicit = Center::explicit(prep.coords().unwrap().to_vec());
        for i in 0..p.len() {
            let a = eval_distance(p, &ball.center, i, Kernel::Linear).unwrap();
            let b = eval_distance(p, &explicit, i, Kernel::Linear).unwrap();
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn bc_rbf_runs_and_covers_in_feature_space() {
        let inst = generate(
            &Family::UniformBall {
                n: 80,
                d: 3,
                radius: 1.0,
            },
            RngStream::from_seed(29),
        )
        .unwrap();
        let p = &inst.points;
        let kernel = Kernel::Rbf { bandwidth: 1.0 };
        let (ball, _) =
            badoiu_clarkson(p, 0.1, 1.0 / 3.0, kernel, &mut RunStats::default()).unwrap();
        assert_eq!(ball.coverage(p, kernel, 1e-9).unwrap(), p.len());
        // Feature-space radius is at most 1 for a normalized kernel.
        assert!(ball.radius <= 1.0 + 1e-9);
    }
}
