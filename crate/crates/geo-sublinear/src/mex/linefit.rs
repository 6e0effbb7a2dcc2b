//! Line (1-flat) fitting with outliers: randomized initialization from a far
//! pair, then rounds of adaptive far-point sampling and candidate-line search
//! on the 2-flat spanned by the current line and the sampled point.
//!
//! The candidate-line generator on the 2-flat is a scale-free grid of
//! direction perturbations and anchor offsets (the construction is a
//! replaceable extension point; the budget is configurable).

use rand::Rng;

use crate::dataset::{sample_indices, PointSet, RngStream};
use crate::error::{Error, Result};
use crate::meb::{ceil_tol, Center, Kernel, PreparedCenter};
use crate::mex::{generalized_rank, BallFamily, Line, Slab, SlabFamily};
use crate::outliers::{BiCriteriaParams, OutlierInstance};
use crate::report::RunStats;

#[derive(Debug, Clone)]
pub struct LineFitParams {
    pub bi: BiCriteriaParams,
    /// Candidate lines generated per round on the 2-flat.
    pub candidate_budget: usize,
    /// Cap on the round count `ceil(eps^-3 ln(1/eps))`.
    pub round_cap: usize,
    /// Sample size used to preselect among grid candidates before the exact
    /// rank scan of the round winner.
    pub score_sample: usize,
}

impl LineFitParams {
    pub fn new(epsilon: f64, delta: f64) -> Self {
        LineFitParams {
            bi: BiCriteriaParams::new(epsilon, delta),
            candidate_budget: 64,
            round_cap: 50,
            score_sample: 512,
        }
    }

    /// Round count `nu = min(ceil(eps^-3 ln(1/eps)), cap)`.
    pub fn rounds(&self) -> usize {
        let eps = self.bi.epsilon;
        let nu = ceil_tol((1.0 / eps.powi(3)) * (1.0 / eps).ln());
        nu.clamp(1, self.round_cap)
    }
}

#[derive(Debug, Clone)]
pub struct LineFitOutcome {
    pub slab: Slab,
    pub rounds: usize,
    pub delta0: f64,
    pub repetitions_run: usize,
    pub verified_coverage: Option<usize>,
}

/// Exact slab width at the bi-criteria rank: the `(t+1)`-th largest distance
/// to the line with `t = ceil((delta + gamma) n)`.
fn exact_width(points: &PointSet, line: &Line, t: usize, stats: &mut RunStats) -> Result<f64> {
    Ok(generalized_rank(&SlabFamily, line, points, t, stats)?.1)
}

/// Bi-criteria line fitting. Initializes from a random point and an
/// adaptively sampled far point, then improves over `nu` rounds; each round
/// samples a far point `p_i` from the current line, spans the 2-flat through
/// the line and `p_i`, and selects the best candidate line on it. Rounds use
/// the shrunken budget `delta0 = delta / (nu + 1)` for sampling so the final
/// exclusion stays within `(delta + gamma) n`.
pub fn line_fit_outliers(
    inst: &OutlierInstance,
    params: &LineFitParams,
    stream: RngStream,
    stats: &mut RunStats,
) -> Result<(Slab, LineFitOutcome)> {
    params.bi.validate()?;
    let points = &inst.points;
    let d = points.dim();
    if d < 2 {
        return Err(Error::invalid("line fitting needs dimension >= 2"));
    }
    let n = points.len();
    let gamma = inst.gamma;
    let delta = params.bi.delta;
    let nu = params.rounds();
    let delta0 = delta / (nu as f64 + 1.0);
    let t_pick = ceil_tol((delta0 + gamma) * n as f64).clamp(1, n.saturating_sub(1).max(1));
    let t_score = ceil_tol((delta + gamma) * n as f64).clamp(1, n - 1);
    let reps = params.bi.repetitions_linear(gamma).max(1);
    let ball_family = BallFamily {
        kernel: Kernel::Linear,
    };

    let mut best: Option<(Line, f64)> = None;
    for rep in 0..reps {
        let mut rng = stream.child(rep as u64).rng();
        // Initial line through a random point and a sampled far point.
        let p0_idx = sample_indices(n, 1, &mut rng, stats)[0];
        let p0 = points.row_dense(p0_idx);
        let anchor = PreparedCenter::new(points, &Center::explicit(p0.clone()), Kernel::Linear)?;
        let (q_far, _) = generalized_rank(&ball_family, &anchor, points, t_pick, stats)?;
        let q_idx = q_far[rng.gen_range(0..q_far.len())];
        let q0 = points.row_dense(q_idx);
        let Some(mut line) = Line::through(&p0, &q0) else {
            stats.flag("linefit-degenerate-init");
            continue;
        };
        let mut width = exact_width(points, &line, t_score, stats)?;
        if best.as_ref().is_none_or(|(_, w)| width < *w) {
            best = Some((line.clone(), width));
        }

        for _round in 1..=nu {
            let (far_set, _) = generalized_rank(&SlabFamily, &line, points, t_pick, stats)?;
            let pi_idx = far_set[rng.gen_range(0..far_set.len())];
            let pi = points.row_dense(pi_idx);
            // 2-flat basis: the line direction and the orthogonal component
            // of p_i relative to the line's anchor point.
            let e1 = line.direction.clone();
            let rel: Vec<f64> = pi.iter().zip(&line.point).map(|(a, b)| a - b).collect();
            let along: f64 = rel.iter().zip(&e1).map(|(a, b)| a * b).sum();
            let mut e2: Vec<f64> = rel.iter().zip(&e1).map(|(a, b)| a - along * b).collect();
            let e2_norm: f64 = e2.iter().map(|x| x * x).sum::<f64>().sqrt();
            if e2_norm < 1e-12 {
                continue; // p_i lies on the current line
            }
            for x in &mut e2 {
                *x /= e2_norm;
            }

            // Scale-free candidate grid: signed geometric angles times anchor
            // offsets pulled toward p_i.
            let offsets = [0.0, 0.25, 0.5, 1.0];
            let dirs = (params.candidate_budget / offsets.len()).max(2);
            let mut candidates: Vec<Line> = Vec::with_capacity(params.candidate_budget + 1);
            candidates.push(line.clone());
            for j in 0..dirs {
                let mag = std::f64::consts::FRAC_PI_2 / 2f64.powi((j / 2) as i32);
                let theta = if j % 2 == 0 { mag } else { -mag };
                let (c, s) = (theta.cos(), theta.sin());
                let dir: Vec<f64> = e1.iter().zip(&e2).map(|(a, b)| c * a + s * b).collect();
                for &off in &offsets {
                    let point: Vec<f64> = line
                        .point
                        .iter()
                        .zip(&e2)
                        .map(|(a, b)| a + off * e2_norm * b)
                        .collect();
                    if let Ok(cand) = Line::new(point, normalize(dir.clone())) {
                        candidates.push(cand);
                    }
                }
            }

            // Preselect on a shared sample, then exact-score the winner.
            let m = params.score_sample.min(n);
            let sample = sample_indices(n, m, &mut rng, stats);
            let t_s = ceil_tol((delta + gamma) * m as f64).clamp(0, m - 1);
            let mut round_best: Option<(usize, f64)> = None;
            for (ci, cand) in candidates.iter().enumerate() {
                let mut dists: Vec<f64> = sample.iter().map(|&i| cand.dist(points, i)).collect();
                let score = if t_s == 0 {
                    dists.iter().cloned().fold(0.0f64, f64::max)
                } else {
                    dists
                        .select_nth_unstable_by(t_s, |a, b| {
                            b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal)
                        })
                        .1
                        .to_owned()
                };
                if round_best.is_none_or(|(_, s)| score < s) {
                    round_best = Some((ci, score));
                }
            }
            let (winner_idx, _) = round_best.expect("candidate list is non-empty");
            let winner = candidates[winner_idx].clone();
            let winner_width = exact_width(points, &winner, t_score, stats)?;
            if winner_width < width {
                width = winner_width;
                line = winner;
            }
            if best.as_ref().is_none_or(|(_, w)| width < *w) {
                best = Some((line.clone(), width));
            }
        }
    }

    let (line, width) = best
        .ok_or_else(|| Error::Infeasible("all repetitions hit degenerate initial pairs".into()))?;
    let slab = Slab {
        line: line.clone(),
        width,
    };
    let verified_coverage = if params.bi.verify_scan {
        stats.full_passes += 1;
        Some(
            (0..n)
                .filter(|&i| line.dist(points, i) <= width + 1e-9)
                .count(),
        )
    } else {
        None
    };
    Ok((
        slab.clone(),
        LineFitOutcome {
            slab,
            rounds: nu,
            delta0,
            repetitions_run: reps,
            verified_coverage,
        },
    ))
}

fn normalize(mut v: Vec<f64>) -> Vec<f64> {
    let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in &mut v {
            *x /= norm;
        }
    }
    v
}
