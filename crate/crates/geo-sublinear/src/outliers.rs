//! Bi-criteria MEB with outliers: the uniform-adaptive and sandwich sampling
//! primitives specialized to balls, and the linear and sublinear greedy
//! solvers with repetition schedules.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dataset::{sample_indices, PlantedTruth, PointSet, RngStream};
use crate::error::{Error, Result};
use crate::meb::{ceil_tol, Ball, Center, Kernel, PreparedCenter, SupportSolver};
use crate::mex::{
    generalized_rank, generalized_sandwich, generalized_uniform_adaptive, BallFamily,
};
use crate::report::RunStats;

/// An instance of MEB with outliers: a point set plus the outlier fraction,
/// optionally carrying planted ground truth for verification.
#[derive(Debug, Clone)]
pub struct OutlierInstance {
    pub points: PointSet,
    pub gamma: f64,
    pub truth: Option<PlantedTruth>,
}

impl OutlierInstance {
    pub fn new(points: PointSet, gamma: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&gamma) {
            return Err(Error::invalid("gamma must lie in [0, 1)"));
        }
        let keep = ceil_tol((1.0 - gamma) * points.len() as f64);
        if keep < 1 {
            return Err(Error::invalid("no inliers would remain"));
        }
        Ok(OutlierInstance {
            points,
            gamma,
            truth: None,
        })
    }

    pub fn with_truth(mut self, truth: PlantedTruth) -> Self {
        self.truth = Some(truth);
        self
    }
}

/// Parameters of the bi-criteria solvers. `z` defaults to `ceil(2/eps) + 1`
/// (via `s = eps / (2 + eps)`); the repetition count defaults to the
/// schedule formula with all hidden constants 1, capped by `rep_cap`.
/// `delta < gamma / 3` is required wherever the sandwich estimate runs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BiCriteriaParams {
    pub epsilon: f64,
    pub delta: f64,
    pub eta1: f64,
    /// Per-candidate sandwich failure probability; defaults to `1/(zN)`.
    pub eta2: Option<f64>,
    pub z: Option<usize>,
    pub repetitions: Option<usize>,
    pub rep_cap: usize,
    /// Sample-size constants (hidden Theta constants, default 1).
    pub c2: f64,
    pub c3: f64,
    /// Per-call cap on center-refinement iterations.
    pub fw_cap: u64,
    /// Run a full coverage scan over the winner (verification only; outside
    /// the algorithm's complexity accounting).
    pub verify_scan: bool,
}

impl BiCriteriaParams {
    pub fn new(epsilon: f64, delta: f64) -> Self {
        BiCriteriaParams {
            epsilon,
            delta,
            eta1: 0.1,
            eta2: None,
            z: None,
            repetitions: None,
            rep_cap: 200,
            c2: 1.0,
            c3: 1.0,
            fw_cap: 2_000_000,
            verify_scan: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::invalid("epsilon must lie in (0, 1)"));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::invalid("delta must lie in (0, 1)"));
        }
        if !(self.eta1 > 0.0 && self.eta1 < 1.0) {
            return Err(Error::invalid("eta1 must lie in (0, 1)"));
        }
        Ok(())
    }

    /// Rounds per repetition: `z = ceil(2/eps) + 1`, matching
    /// `s = eps / (2 + eps)` in the core-set size bound.
    pub fn rounds(&self) -> usize {
        self.z.unwrap_or_else(|| ceil_tol(2.0 / self.epsilon) + 1)
    }

    /// Center accuracy: `xi = s * eps / (1 + eps)` with `s = eps/(2+eps)`.
    pub fn xi(&self) -> f64 {
        let s = self.epsilon / (2.0 + self.epsilon);
        s * self.epsilon / (1.0 + self.epsilon)
    }

    /// Repetition schedule `(1/(1-gamma)) (1 + gamma/delta)^z`, capped.
    pub fn repetitions_linear(&self, gamma: f64) -> usize {
        self.repetitions.unwrap_or_else(|| {
            schedule(gamma, 1.0 + gamma / self.delta, self.rounds(), self.rep_cap)
        })
    }

    /// Repetition schedule
    /// `(1/(1-gamma)) ((1/(1-eta1)) (3 + 3 gamma/(delta/5)))^z`, capped.
    pub fn repetitions_sublinear(&self, gamma: f64) -> usize {
        let base = (3.0 + 15.0 * gamma / self.delta) / (1.0 - self.eta1);
        self.repetitions
            .unwrap_or_else(|| schedule(gamma, base, self.rounds(), self.rep_cap))
    }

    fn eta2_for(&self, z: usize, reps: usize) -> f64 {
        self.eta2
            .unwrap_or_else(|| (1.0 / (z as f64 * reps as f64)).min(0.5))
    }
}

fn schedule(gamma: f64, base: f64, z: usize, cap: usize) -> usize {
    let ln_n = -(1.0 - gamma).ln() + z as f64 * base.ln();
    if ln_n > (cap as f64).ln() {
        cap
    } else {
        (ln_n.exp().ceil() as usize).clamp(1, cap)
    }
}

/// One candidate produced by a greedy round.
#[derive(Debug, Clone)]
pub struct Candidate {
    pub center: Center,
    pub size_estimate: f64,
    pub round: usize,
    pub repetition: usize,
}

/// Outcome of a bi-criteria run: the chosen ball plus provenance and the
/// sample-size ledger for the report.
#[derive(Debug, Clone)]
pub struct BiCriteriaOutcome {
    pub ball: Ball,
    pub winner: Candidate,
    pub repetitions_run: usize,
    pub sample_sizes: BTreeMap<String, u64>,
    /// Full-scan coverage of the winner, when `verify_scan` was set.
    pub verified_coverage: Option<usize>,
}

/// The `t` farthest points from `o` (ties toward the lower index) and the
/// `(t+1)`-th largest distance, by linear-time selection.
pub fn farthest_t(
    points: &PointSet,
    o: &Center,
    t: usize,
    kernel: Kernel,
) -> Result<(Vec<usize>, f64)> {
    let family = BallFamily { kernel };
    let prep = PreparedCenter::new(points, o, kernel)?;
    generalized_rank(&family, &prep, points, t, &mut RunStats::default())
}

/// Ball-family uniform-adaptive sampling (thin wrapper over the generalized
/// primitive).
pub fn uniform_adaptive(
    points: &PointSet,
    o: &Center,
    gamma: f64,
    delta: f64,
    eta1: f64,
    stream: RngStream,
    kernel: Kernel,
) -> Result<usize> {
    let family = BallFamily { kernel };
    let prep = PreparedCenter::new(points, o, kernel)?;
    let mut rng = stream.rng();
    generalized_uniform_adaptive(
        &family,
        &prep,
        points,
        gamma,
        delta,
        eta1,
        1.0,
        &mut rng,
        &mut RunStats::default(),
    )
}

/// Ball-family sandwich estimate (thin wrapper over the generalized
/// primitive). Requires `delta < gamma / 3`.
pub fn sandwich_estimate(
    points: &PointSet,
    o: &Center,
    gamma: f64,
    delta: f64,
    eta2: f64,
    stream: RngStream,
    kernel: Kernel,
) -> Result<f64> {
    let family = BallFamily { kernel };
    let prep = PreparedCenter::new(points, o, kernel)?;
    let mut rng = stream.rng();
    generalized_sandwich(
        &family,
        &prep,
        points,
        gamma,
        delta,
        eta2,
        1.0,
        &mut rng,
        &mut RunStats::default(),
    )
}

/// Linear-time bi-criteria solver: per repetition, grow a core set by random
/// picks from the exact farthest-`t` set and keep the candidate with the
/// smallest `(t+1)`-th ranked distance. The returned ball covers at least
/// `n - ceil((delta+gamma) n)` points by construction.
pub fn bicriteria_linear(
    inst: &OutlierInstance,
    params: &BiCriteriaParams,
    kernel: Kernel,
    stream: RngStream,
    stats: &mut RunStats,
) -> Result<(Ball, BiCriteriaOutcome)> {
    params.validate()?;
    kernel.validate()?;
    let points = &inst.points;
    let n = points.len();
    let t = ceil_tol((params.delta + inst.gamma) * n as f64).max(1);
    if t >= n {
        return Err(Error::invalid(
            "delta + gamma too large: no points would remain covered",
        ));
    }
    let z = params.rounds();
    let xi = params.xi();
    let reps = params.repetitions_linear(inst.gamma);
    let family = BallFamily { kernel };

    let mut best: Option<Candidate> = None;
    for rep in 0..reps {
        let mut rng = stream.child(rep as u64).rng();
        let first = sample_indices(n, 1, &mut rng, stats)[0];
        let mut solver = SupportSolver::new(points, kernel, first);
        for round in 1..=z {
            solver.refine(xi, params.fw_cap, stats);
            let center = solver.center();
            let prep = PreparedCenter::new(points, &center, kernel)?;
            let (q, l) = generalized_rank(&family, &prep, points, t, stats)?;
            if best.as_ref().is_none_or(|b| l < b.size_estimate) {
                best = Some(Candidate {
                    center,
                    size_estimate: l,
                    round,
                    repetition: rep,
                });
            }
            use rand::Rng;
            let pick = q[rng.gen_range(0..q.len())];
            solver.push(pick);
        }
    }
    let winner = best.expect("at least one candidate");
    let ball = Ball::new(winner.center.clone(), winner.size_estimate);
    let mut sample_sizes = BTreeMap::new();
    sample_sizes.insert("t".into(), t as u64);
    sample_sizes.insert("z".into(), z as u64);
    sample_sizes.insert("repetitions".into(), reps as u64);
    let verified_coverage = if params.verify_scan {
        stats.full_passes += 1;
        Some(coverage_of(points, &ball, kernel)?)
    } else {
        None
    };
    Ok((
        ball.clone(),
        BiCriteriaOutcome {
            ball,
            winner,
            repetitions_run: reps,
            sample_sizes,
            verified_coverage,
        },
    ))
}

/// Sublinear bi-criteria solver: picks come from uniform-adaptive sampling and
/// candidate sizes from sandwich estimates, both with `delta/5` substituted
/// into the sample sizes so the final covering error stays below `delta`.
/// When `gamma = 0` the sandwich precondition is vacuous and candidate sizes
/// fall back to exact rank scans (flagged in the stats).
pub fn bicriteria_sublinear(
    inst: &OutlierInstance,
    params: &BiCriteriaParams,
    kernel: Kernel,
    stream: RngStream,
    stats: &mut RunStats,
) -> Result<(Ball, BiCriteriaOutcome)> {
    params.validate()?;
    kernel.validate()?;
    let points = &inst.points;
    let n = points.len();
    let gamma = inst.gamma;
    let delta_eff = params.delta / 5.0;
    let exact_fallback = gamma == 0.0;
    if !exact_fallback && delta_eff >= gamma / 3.0 {
        return Err(Error::invalid(format!(
            "sublinear path needs delta/5 < gamma/3 (delta = {}, gamma = {gamma})",
            params.delta
        )));
    }
    let z = params.rounds();
    let xi = params.xi();
    let reps = params.repetitions_sublinear(gamma);
    let eta2 = params.eta2_for(z, reps);
    let family = BallFamily { kernel };
    let t_exact = ceil_tol((params.delta + gamma) * n as f64).clamp(1, n - 1);

    let mut best: Option<Candidate> = None;
    for rep in 0..reps {
        let mut rng = stream.child(rep as u64).rng();
        let first = sample_indices(n, 1, &mut rng, stats)[0];
        let mut solver = SupportSolver::new(points, kernel, first);
        for round in 1..=z {
            solver.refine(xi, params.fw_cap, stats);
            let center = solver.center();
            let prep = PreparedCenter::new(points, &center, kernel)?;
            let pick = generalized_uniform_adaptive(
                &family,
                &prep,
                points,
                gamma,
                delta_eff,
                params.eta1,
                params.c2,
                &mut rng,
                stats,
            )?;
            solver.push(pick);
            let size = if exact_fallback {
                stats.flag("sublinear-gamma-zero-exact-rank");
                generalized_rank(&family, &prep, points, t_exact, stats)?.1
            } else {
                generalized_sandwich(
                    &family, &prep, points, gamma, delta_eff, eta2, params.c3, &mut rng, stats,
                )?
            };
            if best.as_ref().is_none_or(|b| size < b.size_estimate) {
                best = Some(Candidate {
                    center,
                    size_estimate: size,
                    round,
                    repetition: rep,
                });
            }
        }
    }
    let winner = best.expect("at least one candidate");
    let ball = Ball::new(winner.center.clone(), winner.size_estimate);
    let mut sample_sizes = BTreeMap::new();
    sample_sizes.insert(
        "n_prime".into(),
        crate::mex::uniform_adaptive_sample_size(delta_eff, params.eta1, params.c2) as u64,
    );
    if !exact_fallback {
        sample_sizes.insert(
            "n_second".into(),
            crate::mex::sandwich_sample_size(gamma, delta_eff, eta2, params.c3) as u64,
        );
        let ratio = 1.0 + delta_eff / gamma;
        let n2 = crate::mex::sandwich_sample_size(gamma, delta_eff, eta2, params.c3);
        sample_sizes.insert(
            "t_second".into(),
            ceil_tol(ratio * ratio * gamma * n2 as f64) as u64,
        );
    }
    let n_prime = crate::mex::uniform_adaptive_sample_size(delta_eff, params.eta1, params.c2);
    sample_sizes.insert(
        "t_prime".into(),
        ceil_tol(1.5 * (delta_eff + gamma) * n_prime as f64) as u64,
    );
    sample_sizes.insert("z".into(), z as u64);
    sample_sizes.insert("repetitions".into(), reps as u64);
    let verified_coverage = if params.verify_scan {
        stats.full_passes += 1;
        Some(coverage_of(points, &ball, kernel)?)
    } else {
        None
    };
    Ok((
        ball.clone(),
        BiCriteriaOutcome {
            ball,
            winner,
            repetitions_run: reps,
            sample_sizes,
            verified_coverage,
        },
    ))
}

/// Candidate ball centers produced by the uniform-adaptive greedy loop alone
/// (no size estimation); the hybrid solver scores them with one full pass.
pub fn candidate_centers(
    points: &PointSet,
    gamma: f64,
    params: &BiCriteriaParams,
    kernel: Kernel,
    stream: RngStream,
    stats: &mut RunStats,
) -> Result<Vec<Center>> {
    params.validate()?;
    let n = points.len();
    let delta_eff = params.delta / 5.0;
    let z = params.rounds();
    let xi = params.xi();
    let reps = params.repetitions_sublinear(gamma);
    let family = BallFamily { kernel };
    let mut centers = Vec::with_capacity(reps * z);
    for rep in 0..reps {
        let mut rng = stream.child(rep as u64).rng();
        let first = sample_indices(n, 1, &mut rng, stats)[0];
        let mut solver = SupportSolver::new(points, kernel, first);
        for _round in 1..=z {
            solver.refine(xi, params.fw_cap, stats);
            let center = solver.center();
            let prep = PreparedCenter::new(points, &center, kernel)?;
            let pick = generalized_uniform_adaptive(
                &family,
                &prep,
                points,
                gamma,
                delta_eff,
                params.eta1,
                params.c2,
                &mut rng,
                stats,
            )?;
            solver.push(pick);
            centers.push(center);
        }
    }
    Ok(centers)
}

pub(crate) fn coverage_of(points: &PointSet, ball: &Ball, kernel: Kernel) -> Result<usize> {
    ball.coverage(points, kernel, 1e-9)
}
