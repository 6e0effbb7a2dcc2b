//! `geosub solve`: run one solver on a dataset and emit a JSON report.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::Args;
use geo_sublinear::dataset::{load_dense, load_sparse, PointSet, RngStream};
use geo_sublinear::hybrid::{hybrid_meb, hybrid_meb_outliers, HybridParams};
use geo_sublinear::meb::{badoiu_clarkson, Center, PreparedCenter};
use geo_sublinear::mex::kcenter::{kcenter_outliers, KCenterParams};
use geo_sublinear::mex::linefit::{line_fit_outliers, LineFitParams};
use geo_sublinear::mex::svm::{svm_one_class_outliers, svm_two_class_outliers, SvmParams};
use geo_sublinear::outliers::{
    bicriteria_linear, bicriteria_sublinear, BiCriteriaParams, OutlierInstance,
};
use geo_sublinear::report::{ResultSummary, SolveReport};
use geo_sublinear::stable::{meb_alg1, meb_alg2, StabilityParams};
use geo_sublinear::{Kernel, RunStats};
use sha2::{Digest, Sha256};

#[derive(Args)]
pub struct SolveArgs {
    /// bc-meb | meb-alg1 | meb-alg2 | outliers-linear | outliers-sublinear |
    /// hybrid-meb | hybrid-outliers | kcenter | linefit | svm1 | svm2
    #[arg(long)]
    pub algo: String,
    /// Dataset path (CSV, or LIBSVM when the extension is .libsvm/.svm).
    pub data: PathBuf,
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long, default_value_t = false)]
    pub has_header: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub stream: u64,
    #[arg(long, default_value = "linear")]
    pub kernel: String,
    #[arg(long, default_value_t = 1.0)]
    pub bandwidth: f64,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    /// Outlier fraction of the instance.
    #[arg(long, default_value_t = 0.0)]
    pub gamma: f64,
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long)]
    pub beta0: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub eta0: Option<f64>,
    #[arg(long)]
    pub eta1: Option<f64>,
    #[arg(long)]
    pub eta2: Option<f64>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long)]
    pub rep_cap: Option<usize>,
    #[arg(long)]
    pub z: Option<usize>,
    #[arg(long)]
    pub fw_cap: Option<u64>,
    #[arg(long)]
    pub budget_cap: Option<f64>,
    #[arg(long, default_value_t = false)]
    pub sublinear: bool,
    #[arg(long, default_value_t = false)]
    pub no_prune: bool,
    /// Full coverage scan over the winner (verification; recorded in the
    /// report but outside the algorithm's complexity accounting).
    #[arg(long, default_value_t = false)]
    pub verify_scan: bool,
    #[arg(long)]
    pub candidate_budget: Option<usize>,
    #[arg(long)]
    pub round_cap: Option<usize>,
    #[arg(long)]
    pub iter_cap: Option<usize>,
    #[arg(long, default_value_t = 0.0)]
    pub gamma1: f64,
    #[arg(long, default_value_t = 0.0)]
    pub gamma2: f64,
}

pub struct LoadedData {
    pub points: PointSet,
    pub labels: Option<Vec<i32>>,
    pub digest: String,
}

pub fn load_data(path: &Path, format: Option<&str>, has_header: bool) -> Result<LoadedData> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let digest = hex::encode(&Sha256::digest(&bytes)[..16]);
    let fmt = format.map(str::to_string).unwrap_or_else(|| {
        match path.extension().and_then(|e| e.to_str()) {
            Some("libsvm") | Some("svm") => "libsvm".into(),
            _ => "csv".into(),
        }
    });
    let (points, labels) = match fmt.as_str() {
        "csv" => (load_dense(path, has_header)?, None),
        "libsvm" => {
            let (p, l) = load_sparse(path)?;
            (p, Some(l))
        }
        other => bail!("unknown format {other:?}"),
    };
    Ok(LoadedData {
        points,
        labels,
        digest,
    })
}

impl SolveArgs {
    fn kernel(&self) -> Result<Kernel> {
        Ok(match self.kernel.as_str() {
            "linear" => Kernel::Linear,
            "rbf" => Kernel::Rbf {
                bandwidth: self.bandwidth,
            },
            other => bail!("unknown kernel {other:?}"),
        })
    }

    fn epsilon(&self) -> Result<f64> {
        self.epsilon.context("--epsilon is required")
    }

    fn bi_params(&self) -> Result<BiCriteriaParams> {
        let mut p = BiCriteriaParams::new(self.epsilon()?, self.delta.unwrap_or(0.1));
        if let Some(e) = self.eta1 {
            p.eta1 = e;
        }
        p.eta2 = self.eta2;
        p.z = self.z;
        p.repetitions = self.reps;
        if let Some(c) = self.rep_cap {
            p.rep_cap = c;
        }
        if let Some(c) = self.fw_cap {
            p.fw_cap = c;
        }
        p.verify_scan = self.verify_scan;
        Ok(p)
    }
}

pub fn center_payload(
    points: &PointSet,
    center: &Center,
    kernel: Kernel,
) -> Result<(Vec<Vec<f64>>, &'static str)> {
    match kernel {
        Kernel::Linear => {
            let prep = PreparedCenter::new(points, center, kernel)?;
            Ok((vec![prep.coords().unwrap().to_vec()], "explicit"))
        }
        Kernel::Rbf { .. } => match center {
            Center::Combination { support } => {
                let idx: Vec<f64> = support.iter().map(|&(i, _)| i as f64).collect();
                let w: Vec<f64> = support.iter().map(|&(_, w)| w).collect();
                Ok((vec![idx, w], "combination"))
            }
            Center::Explicit { coords } => Ok((vec![coords.clone()], "explicit")),
        },
    }
}

pub fn run(args: SolveArgs) -> Result<i32> {
    let report = run_report(&args)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(0)
}

pub fn run_report(args: &SolveArgs) -> Result<SolveReport> {
    let data = load_data(&args.data, args.format.as_deref(), args.has_header)?;
    let kernel = args.kernel()?;
    let stream = RngStream::new(args.seed, args.stream);
    let mut stats = RunStats::default();
    let start = Instant::now();
    let points = &data.points;

    let mut report = match args.algo.as_str() {
        "bc-meb" => {
            let eps = args.epsilon()?;
            let s = args.s.unwrap_or(1.0 / 3.0);
            let (ball, state) = badoiu_clarkson(points, eps, s, kernel, &mut stats)?;
            let (center, repr) = center_payload(points, &ball.center, kernel)?;
            let mut r = SolveReport::new(
                "bc-meb",
                args.seed,
                args.stream,
                ResultSummary::new(ball.radius, None, center),
            );
            r.param("epsilon", eps);
            r.param("s", s);
            r.param("center_repr", repr);
            r.sample_sizes
                .insert("core_set".into(), state.t.len() as u64);
            if args.verify_scan {
                stats.full_passes += 1;
                r.coverage = Some(ball.coverage(points, kernel, 1e-9)?);
            }
            r
        }
        "meb-alg1" => {
            let params = StabilityParams::new(
                args.epsilon()?,
                args.beta0.context("--beta0 is required")?,
                args.eta.unwrap_or(0.1),
            );
            let ball = meb_alg1(points, &params, kernel, stream, &mut stats)?;
            let (center, repr) = center_payload(points, &ball.center, kernel)?;
            let mut r = SolveReport::new(
                "meb-alg1",
                args.seed,
                args.stream,
                ResultSummary::new(ball.radius, None, center),
            );
            r.param("epsilon", params.epsilon);
            r.param("beta0", params.beta0);
            r.param("eta", params.eta);
            r.param("center_repr", repr);
            if args.verify_scan {
                stats.full_passes += 1;
                r.coverage = Some(ball.coverage(points, kernel, 1e-9)?);
            }
            r
        }
        "meb-alg2" => {
            let eps = args.epsilon()?;
            let beta0 = args.beta0.context("--beta0 is required")?;
            let eta0 = args.eta0.unwrap_or(0.1);
            let ball = meb_alg2(points, eps, beta0, eta0, kernel, stream, &mut stats)?;
            let (center, repr) = center_payload(points, &ball.center, kernel)?;
            let mut r = SolveReport::new(
                "meb-alg2",
                args.seed,
                args.stream,
                ResultSummary::new(ball.radius, None, center),
            );
            r.param("epsilon", eps);
            r.param("beta0", beta0);
            r.param("eta0", eta0);
            r.param("center_repr", repr);
            if args.verify_scan {
                stats.full_passes += 1;
                r.coverage = Some(ball.coverage(points, kernel, 1e-9)?);
            }
            r
        }
        "outliers-linear" | "outliers-sublinear" => {
            let inst = OutlierInstance::new(points.clone(), args.gamma)?;
            let params = args.bi_params()?;
            let (ball, outcome) = if args.algo == "outliers-linear" {
                bicriteria_linear(&inst, &params, kernel, stream, &mut stats)?
            } else {
                bicriteria_sublinear(&inst, &params, kernel, stream, &mut stats)?
            };
            let (center, repr) = center_payload(points, &ball.center, kernel)?;
            let mut r = SolveReport::new(
                args.algo.clone(),
                args.seed,
                args.stream,
                ResultSummary::new(ball.radius, None, center),
            );
            r.param("epsilon", params.epsilon);
            r.param("delta", params.delta);
            r.param("gamma", args.gamma);
            r.param("eta1", params.eta1);
            r.param("center_repr", repr);
            r.sample_sizes = outcome.sample_sizes;
            r.winning_repetition = Some(outcome.winner.repetition);
            r.coverage = outcome.verified_coverage;
            r
        }
        "hybrid-meb" | "hybrid-outliers" => {
            let mut params = HybridParams::new(args.epsilon()?, args.delta.unwrap_or(0.2));
            if let Some(e) = args.eta0 {
                params.eta0 = e;
            }
            if let Some(e) = args.eta1 {
                params.eta1 = e;
            }
            if let Some(c) = args.rep_cap {
                params.rep_cap = c;
            }
            if let Some(c) = args.round_cap {
                params.round_cap = c;
            }
            if let Some(c) = args.fw_cap {
                params.fw_cap = c;
            }
            let res = if args.algo == "hybrid-meb" {
                hybrid_meb(points, &params, kernel, stream, &mut stats)?
            } else {
                let inst = OutlierInstance::new(points.clone(), args.gamma)?;
                hybrid_meb_outliers(&inst, &params, kernel, stream, &mut stats)?
            };
            let (center, repr) = center_payload(points, &res.ball.center, kernel)?;
            let mut r = SolveReport::new(
                args.algo.clone(),
                args.seed,
                args.stream,
                ResultSummary::new(
                    res.ball.radius,
                    Some(res.label.as_str().to_string()),
                    center,
                ),
            );
            r.param("epsilon", params.epsilon);
            r.param("delta", params.delta);
            r.param("gamma", args.gamma);
            r.param("ratio", res.ratio);
            r.param("radius_route", res.radius_route);
            r.param("covering_route", res.covering_route);
            r.param("center_repr", repr);
            r.param(
                "stability_bound",
                serde_json::to_value(res.stability).unwrap(),
            );
            if args.verify_scan {
                stats.full_passes += 1;
                r.coverage = Some(res.ball.coverage(points, kernel, 1e-9)?);
            }
            r
        }
        "kcenter" => {
            let k = args.k.context("--k is required")?;
            let mut params = KCenterParams::new(k, args.epsilon()?, args.delta.unwrap_or(0.1));
            params.bi = args.bi_params()?;
            params.sublinear = args.sublinear;
            params.prune = !args.no_prune;
            if let Some(c) = args.budget_cap {
                params.branch_budget_cap = c;
            }
            let inst = OutlierInstance::new(points.clone(), args.gamma)?;
            let (union, outcome) = kcenter_outliers(&inst, &params, stream, &mut stats)?;
            let centers: Vec<Vec<f64>> = union
                .centers
                .iter()
                .map(|c| {
                    PreparedCenter::new(points, c, Kernel::Linear)
                        .map(|p| p.coords().unwrap().to_vec())
                })
                .collect::<geo_sublinear::Result<_>>()?;
            let mut r = SolveReport::new(
                "kcenter",
                args.seed,
                args.stream,
                ResultSummary::new(union.radius, None, centers),
            );
            r.param("k", k as u64);
            r.param("epsilon", params.bi.epsilon);
            r.param("delta", params.bi.delta);
            r.param("gamma", args.gamma);
            r.param("sublinear", params.sublinear);
            r.sample_sizes
                .insert("nodes_visited".into(), outcome.nodes_visited as u64);
            r.coverage = outcome.verified_coverage;
            r
        }
        "linefit" => {
            let mut params = LineFitParams::new(args.epsilon()?, args.delta.unwrap_or(0.1));
            params.bi = args.bi_params()?;
            if let Some(b) = args.candidate_budget {
                params.candidate_budget = b;
            }
            if let Some(c) = args.round_cap {
                params.round_cap = c;
            }
            let inst = OutlierInstance::new(points.clone(), args.gamma)?;
            let (slab, outcome) = line_fit_outliers(&inst, &params, stream, &mut stats)?;
            let mut r = SolveReport::new(
                "linefit",
                args.seed,
                args.stream,
                ResultSummary::new(
                    slab.width,
                    None,
                    vec![slab.line.point.clone(), slab.line.direction.clone()],
                ),
            );
            r.param("epsilon", params.bi.epsilon);
            r.param("delta", params.bi.delta);
            r.param("gamma", args.gamma);
            r.param("rounds", outcome.rounds as u64);
            r.param("delta0", outcome.delta0);
            r.coverage = outcome.verified_coverage;
            r
        }
        "svm1" => {
            let mut params = SvmParams::new(args.epsilon()?, args.delta.unwrap_or(0.1));
            params.bi = args.bi_params()?;
            params.sublinear = args.sublinear;
            if let Some(c) = args.iter_cap {
                params.iter_cap = c;
            }
            let inst = OutlierInstance::new(points.clone(), args.gamma)?;
            let (margin, outcome) =
                svm_one_class_outliers(&inst, &params, kernel, stream, &mut stats)?;
            let mut r = SolveReport::new(
                "svm1",
                args.seed,
                args.stream,
                ResultSummary::new(margin.size, None, vec![margin.normal.clone()]),
            );
            r.param("epsilon", params.bi.epsilon);
            r.param("delta", params.bi.delta);
            r.param("gamma", args.gamma);
            r.param("margin", outcome.margin);
            r.param("sublinear", params.sublinear);
            r.coverage = outcome.verified_coverage;
            r
        }
        "svm2" => {
            let labels = data
                .labels
                .as_ref()
                .context("svm2 needs a LIBSVM dataset with labels")?;
            let mut rows1 = Vec::new();
            let mut rows2 = Vec::new();
            for (i, &l) in labels.iter().enumerate() {
                if l > 0 {
                    rows1.push(points.row_dense(i));
                } else {
                    rows2.push(points.row_dense(i));
                }
            }
            if rows1.is_empty() || rows2.is_empty() {
                bail!("svm2 needs both classes non-empty");
            }
            let p1 = PointSet::from_rows(rows1)?;
            let p2 = PointSet::from_rows(rows2)?;
            let mut params = SvmParams::new(args.epsilon()?, args.delta.unwrap_or(0.1));
            params.bi = args.bi_params()?;
            params.sublinear = args.sublinear;
            if let Some(c) = args.iter_cap {
                params.iter_cap = c;
            }
            let (margin, outcome) = svm_two_class_outliers(
                &p1,
                &p2,
                args.gamma1,
                args.gamma2,
                &params,
                kernel,
                stream,
                &mut stats,
            )?;
            let mut r = SolveReport::new(
                "svm2",
                args.seed,
                args.stream,
                ResultSummary::new(margin.width, None, vec![margin.normal.clone()]),
            );
            r.param("epsilon", params.bi.epsilon);
            r.param("delta", params.bi.delta);
            r.param("gamma1", args.gamma1);
            r.param("gamma2", args.gamma2);
            r.param("offset_hi", margin.offset_hi);
            r.param("offset_lo", margin.offset_lo);
            if let Some((c1, c2)) = outcome.verified_coverage {
                r.param("coverage_class1", c1 as u64);
                r.param("coverage_class2", c2 as u64);
            }
            r
        }
        other => bail!("unknown algorithm {other:?}"),
    };

    report.dataset_digest = Some(data.digest);
    report.param("kernel", args.kernel.clone());
    if args.kernel == "rbf" {
        report.param("bandwidth", args.bandwidth);
    }
    report.counters = stats;
    report.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(report)
}
