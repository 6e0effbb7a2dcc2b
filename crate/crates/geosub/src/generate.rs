//! `geosub generate`: synthetic instances written as CSV (dense) or LIBSVM
//! (two-class), with a sidecar truth JSON for planted families.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use geo_sublinear::dataset::{self, Family, RngStream};

#[derive(Args)]
pub struct GenerateArgs {
    /// Family: uniform-ball | simplex | planted-outliers | two-class-margin |
    /// line-with-noise | k-clusters
    #[arg(long)]
    family: String,
    #[arg(long)]
    out: PathBuf,
    /// Sidecar truth JSON path (default: <out>.truth.json).
    #[arg(long)]
    truth: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    stream: u64,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    n1: Option<usize>,
    #[arg(long)]
    n2: Option<usize>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    gamma1: Option<f64>,
    #[arg(long)]
    gamma2: Option<f64>,
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long)]
    margin: Option<f64>,
    #[arg(long)]
    width: Option<f64>,
    #[arg(long)]
    length: Option<f64>,
    #[arg(long)]
    spread: Option<f64>,
    #[arg(long)]
    separation: Option<f64>,
}

impl GenerateArgs {
    fn family(&self) -> Result<Family> {
        let need = |v: Option<usize>, name: &str| v.context(format!("--{name} is required"));
        let needf = |v: Option<f64>, name: &str| v.context(format!("--{name} is required"));
        Ok(match self.family.as_str() {
            "uniform-ball" => Family::UniformBall {
                n: need(self.n, "n")?,
                d: need(self.d, "d")?,
                radius: self.radius.unwrap_or(1.0),
            },
            "simplex" => Family::Simplex {
                d: need(self.d, "d")?,
            },
            "planted-outliers" => Family::PlantedOutliers {
                n: need(self.n, "n")?,
                d: need(self.d, "d")?,
                gamma: needf(self.gamma, "gamma")?,
                radius: self.radius.unwrap_or(1.0),
                separation: self.separation.unwrap_or(10.0),
            },
            "two-class-margin" => Family::TwoClassMargin {
                n1: need(self.n1, "n1")?,
                n2: need(self.n2, "n2")?,
                d: need(self.d, "d")?,
                margin: needf(self.margin, "margin")?,
                spread: self.spread.unwrap_or(1.0),
                gamma1: self.gamma1.unwrap_or(0.0),
                gamma2: self.gamma2.unwrap_or(0.0),
                separation: self.separation.unwrap_or(5.0),
            },
            "line-with-noise" => Family::LineWithNoise {
                n: need(self.n, "n")?,
                d: need(self.d, "d")?,
                gamma: self.gamma.unwrap_or(0.0),
                length: self.length.unwrap_or(10.0),
                width: self.width.unwrap_or(0.1),
                separation: self.separation.unwrap_or(10.0),
            },
            "k-clusters" => Family::KClusters {
                k: need(self.k, "k")?,
                n: need(self.n, "n")?,
                d: need(self.d, "d")?,
                gamma: self.gamma.unwrap_or(0.0),
                radius: self.radius.unwrap_or(1.0),
                spread: self.spread.unwrap_or(10.0),
                separation: self.separation.unwrap_or(10.0),
            },
            other => bail!("unknown family {other:?}"),
        })
    }
}

pub fn run(args: GenerateArgs) -> Result<i32> {
    let family = args.family()?;
    let inst = dataset::generate(&family, RngStream::new(args.seed, args.stream))?;
    match &inst.labels {
        Some(labels) => dataset::write_libsvm(&args.out, &inst.points, labels)?,
        None => dataset::write_csv(&args.out, &inst.points)?,
    }
    let truth_path = args.truth.unwrap_or_else(|| {
        let mut p = args.out.clone();
        let name = format!("{}.truth.json", p.file_name().unwrap().to_string_lossy());
        p.set_file_name(name);
        p
    });
    let truth_json = serde_json::json!({
        "family": family,
        "gamma": inst.gamma,
        "n": inst.points.len(),
        "d": inst.points.dim(),
        "truth": inst.truth,
        "seed": args.seed,
        "stream": args.stream,
    });
    std::fs::write(&truth_path, serde_json::to_string_pretty(&truth_json)?)?;
    eprintln!(
        "wrote {} points (d = {}) to {} with truth {}",
        inst.points.len(),
        inst.points.dim(),
        args.out.display(),
        truth_path.display()
    );
    Ok(0)
}
