//! `geosub verify`: re-check a solve report against its dataset and, when
//! available, the planted truth sidecar. Emits one PASS/FAIL line per
//! contract; exits 0 only if everything passes.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use geo_sublinear::dataset::PlantedTruth;
use geo_sublinear::meb::ceil_tol;
use geo_sublinear::mex::Line;
use geo_sublinear::report::SolveReport;

use crate::solve::load_data;

#[derive(Args)]
pub struct VerifyArgs {
    #[arg(long)]
    report: PathBuf,
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    truth: Option<PathBuf>,
    #[arg(long)]
    format: Option<String>,
    #[arg(long, default_value_t = false)]
    has_header: bool,
}

struct Checks {
    failed: usize,
}

impl Checks {
    fn check(&mut self, name: &str, ok: bool, detail: String) {
        if ok {
            println!("PASS {name}: {detail}");
        } else {
            println!("FAIL {name}: {detail}");
            self.failed += 1;
        }
    }
}

fn param_f64(report: &SolveReport, key: &str) -> Option<f64> {
    report.params.get(key).and_then(|v| v.as_f64())
}

pub fn run(args: VerifyArgs) -> Result<i32> {
    let report: SolveReport = serde_json::from_str(&std::fs::read_to_string(&args.report)?)
        .context("parsing report JSON")?;
    let data = load_data(&args.data, args.format.as_deref(), args.has_header)?;
    if let Some(digest) = &report.dataset_digest {
        if digest != &data.digest {
            bail!(
                "dataset digest mismatch: report has {digest}, file has {}",
                data.digest
            );
        }
    }
    if report.params.get("kernel").and_then(|v| v.as_str()) != Some("linear") {
        bail!("verify supports linear-kernel reports only");
    }
    let points = &data.points;
    let n = points.len();
    let truth: Option<PlantedTruth> = match &args.truth {
        Some(path) => {
            let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path)?)?;
            Some(serde_json::from_value(v["truth"].clone())?)
        }
        None => None,
    };

    let mut checks = Checks { failed: 0 };
    let size = report.result.size;
    let epsilon = param_f64(&report, "epsilon").unwrap_or(0.0);
    let delta = param_f64(&report, "delta").unwrap_or(0.0);
    let gamma = param_f64(&report, "gamma").unwrap_or(0.0);

    match report.algorithm.as_str() {
        "bc-meb" | "meb-alg1" | "meb-alg2" | "outliers-linear" | "outliers-sublinear"
        | "hybrid-meb" | "hybrid-outliers" | "kcenter" => {
            // Coverage by minimum distance to the reported center set.
            let centers = &report.result.center;
            let covered = (0..n)
                .filter(|&i| {
                    let d = centers
                        .iter()
                        .map(|c| {
                            let norm_sq: f64 = c.iter().map(|x| x * x).sum();
                            points.dist_sq_to(i, c, norm_sq).sqrt()
                        })
                        .fold(f64::INFINITY, f64::min);
                    d <= size + 1e-9
                })
                .count();
            let required: f64 = match report.algorithm.as_str() {
                "bc-meb" | "meb-alg1" | "meb-alg2" => n as f64,
                "hybrid-meb" => {
                    if report.result.label.as_deref() == Some("radius-approx") {
                        n as f64
                    } else {
                        (1.0 - delta) * n as f64
                    }
                }
                "hybrid-outliers" => {
                    if report.result.label.as_deref() == Some("radius-approx") {
                        (1.0 - gamma) * n as f64
                    } else {
                        (1.0 - delta - gamma) * n as f64
                    }
                }
                _ => (n - ceil_tol((delta + gamma) * n as f64)) as f64,
            };
            checks.check(
                "coverage",
                (covered as f64) >= required - 1e-9,
                format!("{covered} of {n} covered, required {required:.1}"),
            );
            if let Some(reported) = report.coverage {
                checks.check(
                    "coverage-matches-report",
                    reported == covered,
                    format!("report says {reported}, recomputed {covered}"),
                );
            }

            // Size against planted truth or the exact oracle at tiny scale.
            let optimum = match (&truth, n <= 600 && gamma == 0.0) {
                (Some(t), _) => Some(t.optimum_size),
                (None, true) => geo_sublinear::oracle::exact_meb(points)
                    .ok()
                    .map(|o| o.optimum_size),
                _ => None,
            };
            if let Some(opt) = optimum {
                let is_radius_label = report.result.label.as_deref() != Some("covering-approx");
                if report.algorithm.starts_with("hybrid") && !is_radius_label {
                    checks.check(
                        "label-covering-size",
                        size <= opt * (1.0 + 1e-9),
                        format!("covering label: size {size:.6} vs optimum {opt:.6}"),
                    );
                } else if epsilon > 0.0 {
                    checks.check(
                        "size-vs-optimum",
                        size <= (1.0 + epsilon) * opt * (1.0 + 1e-9),
                        format!("size {size:.6} vs (1+eps) * {opt:.6}"),
                    );
                }
                checks.check(
                    "size-not-below-optimum",
                    report.algorithm.starts_with("hybrid")
                        || report.algorithm.starts_with("outliers")
                        || report.algorithm == "kcenter"
                        || size >= opt * (1.0 - 1e-9),
                    format!("size {size:.6} vs optimum {opt:.6}"),
                );
            } else {
                println!(
                    "SKIP size-vs-optimum: no truth sidecar and instance too large for the oracle"
                );
            }
        }
        "linefit" => {
            let line = Line::new(
                report.result.center[0].clone(),
                report.result.center[1].clone(),
            )?;
            let covered = (0..n)
                .filter(|&i| line.dist(points, i) <= size + 1e-9)
                .count();
            let t = ceil_tol((delta + gamma) * n as f64);
            checks.check(
                "coverage",
                covered >= n - t,
                format!("{covered} of {n} covered, required {}", n - t),
            );
            if let Some(t) = &truth {
                checks.check(
                    "width-vs-planted",
                    size <= (1.0 + epsilon) * t.optimum_size + 1e-9,
                    format!("width {size:.6} vs planted {:.6}", t.optimum_size),
                );
            }
        }
        "svm1" => {
            let u = &report.result.center[0];
            let margin = 1.0 / size;
            let covered = (0..n)
                .filter(|&i| points.dot(i, u) >= margin - 1e-9)
                .count();
            let t = ceil_tol((delta + gamma) * n as f64);
            checks.check(
                "coverage",
                covered >= n.saturating_sub(t),
                format!("{covered} of {n} on the margin side, required {}", n - t),
            );
            if let Some(t) = &truth {
                // Planted one-class margin is half the planted width.
                let rho = t.optimum_size / 2.0;
                checks.check(
                    "margin-vs-planted",
                    margin >= (1.0 - epsilon) * rho - 1e-9,
                    format!("margin {margin:.6} vs (1-eps) * {rho:.6}"),
                );
            }
        }
        "svm2" => {
            println!(
                "SKIP svm2: verify works on single-file reports; see coverage fields in the report"
            );
        }
        other => bail!("unknown algorithm in report: {other:?}"),
    }

    if checks.failed == 0 {
        println!("verify: all checks passed");
        Ok(0)
    } else {
        println!("verify: {} check(s) failed", checks.failed);
        Ok(1)
    }
}
