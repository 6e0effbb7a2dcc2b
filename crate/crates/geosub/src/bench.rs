//! `geosub bench`: parameter sweeps over generated instances; one CSV row per
//! (algorithm, n, seed) with points-touched and pass counters. Trials run in
//! parallel; GEO_SUBLINEAR_THREADS caps the pool.

use std::io::Write;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use geo_sublinear::dataset::{generate, write_csv, Family, RngStream};
use rayon::prelude::*;

use crate::solve::{run_report, SolveArgs};

#[derive(Args)]
pub struct BenchArgs {
    /// Comma-separated algorithm ids (see `solve`), plus `baseline-scan`.
    #[arg(long)]
    algos: String,
    /// Instance sizes to sweep, comma-separated.
    #[arg(long, default_value = "10000")]
    n_list: String,
    #[arg(long, default_value_t = 20)]
    d: usize,
    #[arg(long, default_value_t = 0.1)]
    gamma: f64,
    #[arg(long, default_value_t = 0.3)]
    epsilon: f64,
    #[arg(long, default_value_t = 0.03)]
    delta: f64,
    #[arg(long, default_value_t = 3)]
    seeds: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Working directory for generated datasets.
    #[arg(long, default_value = ".")]
    work_dir: PathBuf,
}

pub fn run(args: BenchArgs) -> Result<i32> {
    if let Ok(threads) = std::env::var("GEO_SUBLINEAR_THREADS") {
        let t: usize = threads.parse().context("GEO_SUBLINEAR_THREADS")?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .ok();
    }
    let algos: Vec<String> = args.algos.split(',').map(str::to_string).collect();
    let ns: Vec<usize> = args
        .n_list
        .split(',')
        .map(|s| s.trim().parse().context("bad n"))
        .collect::<Result<_>>()?;

    // Pre-generate one dataset per (n, seed).
    std::fs::create_dir_all(&args.work_dir)?;
    let mut datasets = Vec::new();
    for &n in &ns {
        for seed in 0..args.seeds {
            let family = Family::PlantedOutliers {
                n,
                d: args.d,
                gamma: args.gamma,
                radius: 1.0,
                separation: 10.0,
            };
            let inst = generate(&family, RngStream::new(seed, 77))?;
            let path = args.work_dir.join(format!("bench-{n}-{seed}.csv"));
            write_csv(&path, &inst.points)?;
            datasets.push((n, seed, path, inst.truth.optimum_size));
        }
    }

    let mut rows: Vec<(String, usize, u64, String)> = Vec::new();
    let trials: Vec<(String, usize, u64, PathBuf, f64)> = algos
        .iter()
        .flat_map(|a| {
            datasets
                .iter()
                .map(move |(n, seed, path, opt)| (a.clone(), *n, *seed, path.clone(), *opt))
        })
        .collect();

    let results: Vec<Result<(String, usize, u64, String)>> = trials
        .par_iter()
        .map(|(algo, n, seed, path, planted)| {
            let solve_args = SolveArgs {
                algo: if algo == "baseline-scan" {
                    "bc-meb".into()
                } else {
                    algo.clone()
                },
                data: path.clone(),
                format: None,
                has_header: false,
                seed: *seed,
                stream: 0,
                kernel: "linear".into(),
                bandwidth: 1.0,
                epsilon: Some(if algo == "baseline-scan" {
                    args.epsilon.min(0.5)
                } else {
                    args.epsilon
                }),
                delta: Some(args.delta),
                gamma: if algo == "baseline-scan" {
                    0.0
                } else {
                    args.gamma
                },
                s: None,
                beta0: Some(0.1),
                eta: None,
                eta0: None,
                eta1: None,
                eta2: None,
                k: Some(1),
                reps: None,
                rep_cap: Some(100),
                z: None,
                fw_cap: None,
                budget_cap: None,
                sublinear: algo.contains("sublinear"),
                no_prune: false,
                verify_scan: false,
                candidate_budget: None,
                round_cap: None,
                iter_cap: None,
                gamma1: 0.0,
                gamma2: 0.0,
            };
            let report = run_report(&solve_args)?;
            let full_scan_points = report.counters.full_passes * (*n as u64);
            let touched = report.counters.points_sampled + full_scan_points;
            let success = if *planted > 0.0 {
                report.result.size <= (1.0 + args.epsilon) * planted + 1e-9
            } else {
                true
            };
            let row = format!(
                "{algo},{n},{d},{seed},{touched},{passes},{sampled},{wall:.3},{size:.6},{success}",
                d = args.d,
                passes = report.counters.full_passes,
                sampled = report.counters.points_sampled,
                wall = report.wall_ms,
                size = report.result.size,
            );
            Ok((algo.clone(), *n, *seed, row))
        })
        .collect();

    for r in results {
        rows.push(r?);
    }
    rows.sort();

    let header =
        "algo,n,d,seed,points_touched,passes_over_data,points_sampled,wall_ms,size,success";
    let mut out: Box<dyn Write> = match &args.out {
        Some(path) => Box::new(std::fs::File::create(path)?),
        None => Box::new(std::io::stdout()),
    };
    writeln!(out, "{header}")?;
    for (_, _, _, row) in &rows {
        writeln!(out, "{row}")?;
    }
    // Clean up generated datasets.
    for (_, _, path, _) in datasets {
        std::fs::remove_file(&path).ok();
        let mut t = path.clone();
        t.set_file_name(format!(
            "{}.truth.json",
            path.file_name().unwrap().to_string_lossy()
        ));
        std::fs::remove_file(t).ok();
    }
    Ok(0)
}
