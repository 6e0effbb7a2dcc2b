//! k-center clustering with outliers: a branching greedy search that
//! maintains one core set per cluster and enumerates the cluster assignment
//! of every sampled point.

use crate::dataset::{sample_indices, PointSet, RngStream};
use crate::error::{Error, Result};
use crate::meb::{ceil_tol, Center, Kernel, PreparedCenter, SupportSolver};
use crate::mex::{
    generalized_rank, generalized_sandwich, generalized_uniform_adaptive, KBallFamily, KBallUnion,
    ShapeFamily,
};
use crate::outliers::{bicriteria_linear, bicriteria_sublinear, BiCriteriaParams, OutlierInstance};
use crate::report::RunStats;

#[derive(Debug, Clone)]
pub struct KCenterParams {
    pub k: usize,
    pub bi: BiCriteriaParams,
    pub sublinear: bool,
    /// Refusal threshold on the assignment-enumeration budget
    /// `k^(k (ceil(2/eps) + 1))`.
    pub branch_budget_cap: f64,
    /// Skip a subtree once every cluster is started and its score already
    /// exceeds the incumbent.
    pub prune: bool,
    /// Hard cap on visited nodes per repetition (flagged when binding).
    pub node_cap: usize,
}

impl KCenterParams {
    pub fn new(k: usize, epsilon: f64, delta: f64) -> Self {
        KCenterParams {
            k,
            bi: BiCriteriaParams::new(epsilon, delta),
            sublinear: false,
            branch_budget_cap: 1e6,
            prune: true,
            node_cap: 20_000,
        }
    }

    /// Per-branch addition bound `k (ceil(2/eps) + 1)`.
    pub fn max_additions(&self) -> usize {
        self.k * (ceil_tol(2.0 / self.bi.epsilon) + 1)
    }

    /// Assignment enumeration budget `k^max_additions`.
    pub fn branch_budget(&self) -> f64 {
        (self.max_additions() as f64 * (self.k as f64).ln()).exp()
    }
}

#[derive(Debug, Clone)]
pub struct KCenterOutcome {
    pub union: KBallUnion,
    pub score: f64,
    pub repetitions_run: usize,
    pub nodes_visited: usize,
    pub verified_coverage: Option<usize>,
}

struct SearchCtx<'a> {
    points: &'a PointSet,
    kernel: Kernel,
    family: KBallFamily,
    k: usize,
    gamma: f64,
    delta_pick: f64,
    eta1: f64,
    eta2: f64,
    c2: f64,
    c3: f64,
    xi: f64,
    fw_cap: u64,
    t_exact: usize,
    max_additions: usize,
    sublinear: bool,
    prune: bool,
    node_cap: usize,
    exact_fallback: bool,
    nodes: usize,
    incumbent: Option<(Vec<Center>, f64)>,
}

impl<'a> SearchCtx<'a> {
    fn centers_of(
        &self,
        solvers: &[SupportSolver<'a>],
    ) -> Result<(Vec<Center>, Vec<PreparedCenter>)> {
        let centers: Vec<Center> = solvers.iter().map(|s| s.center()).collect();
        let prepared = centers
            .iter()
            .map(|c| PreparedCenter::new(self.points, c, self.kernel))
            .collect::<Result<_>>()?;
        Ok((centers, prepared))
    }

    fn visit(
        &mut self,
        solvers: Vec<SupportSolver<'a>>,
        additions: usize,
        stream: RngStream,
        node_serial: &mut u64,
        stats: &mut RunStats,
    ) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.node_cap {
            stats.flag("kcenter-node-cap");
            return Ok(());
        }
        let (centers, prepared) = self.centers_of(&solvers)?;
        let mut rng = stream.rng();

        // Score the current center set and update the incumbent.
        let (score, exact_q) = if self.sublinear && !self.exact_fallback {
            let s = generalized_sandwich(
                &self.family,
                &prepared,
                self.points,
                self.gamma,
                self.delta_pick,
                self.eta2,
                self.c3,
                &mut rng,
                stats,
            )?;
            (s, None)
        } else {
            let (q, l) =
                generalized_rank(&self.family, &prepared, self.points, self.t_exact, stats)?;
            (l, Some(q))
        };
        if self
            .incumbent
            .as_ref()
            .is_none_or(|(_, best)| score < *best)
        {
            self.incumbent = Some((centers, score));
        }

        if additions >= self.max_additions {
            return Ok(());
        }
        if self.prune
            && solvers.len() == self.k
            && self
                .incumbent
                .as_ref()
                .is_some_and(|(_, best)| score > *best)
        {
            return Ok(());
        }

        // Sample the next point to place.
        let pick = if self.sublinear {
            generalized_uniform_adaptive(
                &self.family,
                &prepared,
                self.points,
                self.gamma,
                self.delta_pick,
                self.eta1,
                self.c2,
                &mut rng,
                stats,
            )?
        } else {
            use rand::Rng;
            let q = exact_q.expect("linear mode computed the exact rank");
            q[rng.gen_range(0..q.len())]
        };

        // Children ordered nearest-cluster first; a new cluster (canonical
        // index = current count) is explored last.
        let mut order: Vec<usize> = (0..solvers.len()).collect();
        order.sort_by(|&a, &b| {
            prepared[a]
                .dist(self.points, pick)
                .partial_cmp(&prepared[b].dist(self.points, pick))
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        if solvers.len() < self.k {
            order.push(solvers.len());
        }
        for j in order {
            let mut child = solvers.clone();
            if j == child.len() {
                child.push(SupportSolver::new(self.points, self.kernel, pick));
            } else {
                child[j].push(pick);
            }
            child[j].refine(self.xi, self.fw_cap, stats);
            *node_serial += 1;
            let child_stream = stream.child(*node_serial);
            self.visit(child, additions + 1, child_stream, node_serial, stats)?;
        }
        Ok(())
    }
}

/// Bi-criteria k-center with outliers. With `k = 1` this is exactly the MEB
/// with outliers solver. The assignment enumeration budget
/// `k^(k (ceil(2/eps)+1))` must stay below the configured cap.
pub fn kcenter_outliers(
    inst: &OutlierInstance,
    params: &KCenterParams,
    stream: RngStream,
    stats: &mut RunStats,
) -> Result<(KBallUnion, KCenterOutcome)> {
    params.bi.validate()?;
    if params.k < 1 {
        return Err(Error::invalid("k must be at least 1"));
    }
    let kernel = Kernel::Linear;
    if params.k == 1 {
        let (ball, outcome) = if params.sublinear {
            bicriteria_sublinear(inst, &params.bi, kernel, stream, stats)?
        } else {
            bicriteria_linear(inst, &params.bi, kernel, stream, stats)?
        };
        let union = KBallUnion {
            centers: vec![ball.center],
            radius: ball.radius,
        };
        return Ok((
            union.clone(),
            KCenterOutcome {
                union,
                score: ball.radius,
                repetitions_run: outcome.repetitions_run,
                nodes_visited: 0,
                verified_coverage: outcome.verified_coverage,
            },
        ));
    }

    let budget = params.branch_budget();
    if budget > params.branch_budget_cap {
        return Err(Error::BudgetExceeded(format!(
            "assignment enumeration budget k^(k(ceil(2/eps)+1)) = {budget:.3e} exceeds cap {:.3e}",
            params.branch_budget_cap
        )));
    }

    let points = &inst.points;
    let n = points.len();
    let gamma = inst.gamma;
    let delta = params.bi.delta;
    let t_exact = ceil_tol((delta + gamma) * n as f64).clamp(1, n - 1);
    let exact_fallback = gamma == 0.0;
    let delta_pick = if params.sublinear { delta / 5.0 } else { delta };
    if params.sublinear && !exact_fallback && delta_pick >= gamma / 3.0 {
        return Err(Error::invalid("sublinear k-center needs delta/5 < gamma/3"));
    }
    let reps = {
        // Schedule ((1/(1-eta1)) 3 (gamma+delta)/delta)^(k z) / (1-gamma), capped.
        let base = if params.sublinear {
            3.0 * (gamma + delta_pick) / delta_pick / (1.0 - params.bi.eta1)
        } else {
            (gamma + delta) / delta
        };
        params.bi.repetitions.unwrap_or_else(|| {
            let ln_n = -(1.0 - gamma).ln() + params.max_additions() as f64 * base.ln().max(0.0);
            if ln_n > (params.bi.rep_cap as f64).ln() {
                params.bi.rep_cap
            } else {
                (ln_n.exp().ceil() as usize).clamp(1, params.bi.rep_cap)
            }
        })
    };
    let candidates_per_tree = budget.min(1e9) as usize;
    let eta2 = params
        .bi
        .eta2
        .unwrap_or_else(|| (1.0 / (candidates_per_tree as f64 * reps as f64)).min(0.5));

    let mut ctx = SearchCtx {
        points,
        kernel,
        family: KBallFamily { kernel },
        k: params.k,
        gamma,
        delta_pick,
        eta1: params.bi.eta1,
        eta2,
        c2: params.bi.c2,
        c3: params.bi.c3,
        xi: params.bi.xi(),
        fw_cap: params.bi.fw_cap,
        t_exact,
        max_additions: params.max_additions(),
        sublinear: params.sublinear,
        prune: params.prune,
        node_cap: params.node_cap,
        exact_fallback,
        nodes: 0,
        incumbent: None,
    };

    for rep in 0..reps {
        let rep_stream = stream.child(rep as u64);
        let mut rng = rep_stream.rng();
        let first = sample_indices(n, 1, &mut rng, stats)[0];
        let mut root = SupportSolver::new(points, kernel, first);
        root.refine(ctx.xi, ctx.fw_cap, stats);
        let mut node_serial = 0u64;
        ctx.visit(vec![root], 1, rep_stream.child(1), &mut node_serial, stats)?;
    }

    let (centers, score) = ctx
        .incumbent
        .clone()
        .ok_or_else(|| Error::invalid("no candidate produced"))?;
    let union = KBallUnion {
        centers,
        radius: score,
    };
    let verified_coverage = if params.bi.verify_scan {
        stats.full_passes += 1;
        let prepared: Vec<PreparedCenter> = union
            .centers
            .iter()
            .map(|c| PreparedCenter::new(points, c, kernel))
            .collect::<Result<_>>()?;
        let fam = KBallFamily { kernel };
        Some(
            (0..n)
                .filter(|&i| fam.rank_distance(&prepared, points, i) <= union.radius + 1e-9)
                .count(),
        )
    } else {
        None
    };
    Ok((
        union.clone(),
        KCenterOutcome {
            union,
            score,
            repetitions_run: reps,
            nodes_visited: ctx.nodes,
            verified_coverage,
        },
    ))
}
