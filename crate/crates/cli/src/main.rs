//! Command-line driver: builds systems from JSON specs, runs attractor,
//! chaos-game, dimension, growth and rendering jobs, and emits CSV, JSON
//! and PGM artifacts.
//!
//! Exit codes: 0 on success, 2 on invalid input, 3 when an iteration ran
//! out of budget before converging (the output is still written).

mod render;

use clap::{Parser, Subcommand};
use ifskit::{
    box_dimension, chaos_game, compute_attractor, euler_residual, growth_attractor_conjugated,
    similarity_dimension, simulate_growth, solve_growth_numerically, BoxSet, EpsSchedule,
    GrowthParams, IfsSystem, PointCloud,
};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "ifs", version, about = "Fractal attractors, dimensions and growth dynamics")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Iterate the set map on a grid cover until it fixes itself, then
    /// write the cover as CSV.
    Attractor {
        /// System description (JSON).
        spec: PathBuf,
        /// Grid cell width.
        #[arg(long)]
        eps: f64,
        /// Iteration budget.
        #[arg(long, default_value_t = 200)]
        max_iter: u32,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the seeded chaos game and write the visited points as CSV.
    Chaos {
        /// System description (JSON); must carry probabilities.
        spec: PathBuf,
        /// Total states to generate.
        #[arg(long)]
        n: u64,
        /// States to discard from the front.
        #[arg(long, default_value_t = 0)]
        burn: u64,
        /// RNG seed.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Dimension estimators.
    Dim {
        #[command(subcommand)]
        sub: DimCmd,
    },
    /// The stochastic growth economy.
    Growth {
        #[command(subcommand)]
        sub: GrowthCmd,
    },
    /// Rasterize a point-cloud CSV into a binary PGM image.
    Render {
        /// Input point-cloud CSV.
        #[arg(long = "in")]
        input: PathBuf,
        /// Output PGM path.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 512)]
        width: u32,
        #[arg(long, default_value_t = 512)]
        height: u32,
        /// Intensity exponent applied to normalized hit counts.
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
    },
}

#[derive(Subcommand)]
enum DimCmd {
    /// Box-counting slope of a point cloud over a geometric scale schedule.
    Box {
        /// Input point-cloud CSV.
        #[arg(long = "in")]
        input: PathBuf,
        /// Coarsest cell width.
        #[arg(long)]
        eps0: f64,
        /// Scale shrink factor per level.
        #[arg(long)]
        factor: f64,
        /// Number of levels.
        #[arg(long)]
        levels: u32,
        /// Also write the JSON report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Exact similarity dimension: solve sum r_i^d = 1 for d.
    Similarity {
        /// Contraction ratios, comma separated.
        #[arg(long, value_delimiter = ',')]
        ratios: Vec<f64>,
        /// Also write the JSON result here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum GrowthCmd {
    /// Simulate the closed-form economy and write the path as CSV.
    Simulate {
        #[arg(long)]
        rho: f64,
        #[arg(long)]
        la: f64,
        #[arg(long)]
        lb: f64,
        #[arg(long)]
        q: f64,
        /// Initial capital.
        #[arg(long, default_value_t = 1.0)]
        k0: f64,
        /// Number of periods.
        #[arg(long = "T")]
        t: u32,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check the closed-form policy against the Euler equation and a
    /// value-iteration solve.
    VerifyPolicy {
        #[arg(long)]
        rho: f64,
        #[arg(long)]
        la: f64,
        #[arg(long)]
        lb: f64,
        #[arg(long)]
        q: f64,
        /// Oracle grid size.
        #[arg(long, default_value_t = 500)]
        grid: u32,
        /// Oracle sweep budget.
        #[arg(long, default_value_t = 2000)]
        iters: u32,
    },
    /// Compute the log-capital attractor and its conjugated image on the
    /// unit interval.
    Attractor {
        #[arg(long)]
        rho: f64,
        #[arg(long)]
        la: f64,
        #[arg(long)]
        lb: f64,
        #[arg(long)]
        q: f64,
        /// Grid cell width on the conjugated unit interval.
        #[arg(long, default_value_t = 3f64.powi(-5))]
        eps: f64,
        #[arg(long, default_value_t = 200)]
        max_iter: u32,
        /// Output CSV for the log-capital cover.
        #[arg(long)]
        out: PathBuf,
        /// Output CSV for the conjugated unit-interval cover.
        #[arg(long)]
        out_unit: PathBuf,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> ifskit::Result<ExitCode> {
    match cli.cmd {
        Cmd::Attractor {
            spec,
            eps,
            max_iter,
            out,
        } => {
            let sys = IfsSystem::load(&spec)?;
            let res = compute_attractor(&sys, eps, max_iter)?;
            res.boxes.save_csv(&out)?;
            println!("{}", cover_summary(&res.boxes, res.iterations, res.final_dh, res.converged));
            Ok(exit_for(res.converged))
        }
        Cmd::Chaos {
            spec,
            n,
            burn,
            seed,
            out,
        } => {
            let sys = IfsSystem::load(&spec)?;
            let cloud = chaos_game(&sys, &sys.box_center(), n, burn, seed)?;
            cloud.save_csv(&out)?;
            println!(
                "{}",
                serde_json::json!({ "points": cloud.len(), "dim": cloud.dim(), "seed": seed })
            );
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Dim { sub } => run_dim(sub),
        Cmd::Growth { sub } => run_growth(sub),
        Cmd::Render {
            input,
            out,
            width,
            height,
            gamma,
        } => {
            let cloud = PointCloud::load_csv(&input)?;
            let canvas = render::rasterize(&cloud, width, height)?;
            let mut bytes = Vec::new();
            canvas.write_pgm(&mut bytes, gamma)?;
            std::fs::write(&out, bytes)?;
            println!(
                "{}",
                serde_json::json!({ "width": width, "height": height, "points": cloud.len() })
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn run_dim(sub: DimCmd) -> ifskit::Result<ExitCode> {
    match sub {
        DimCmd::Box {
            input,
            eps0,
            factor,
            levels,
            report,
        } => {
            let cloud = PointCloud::load_csv(&input)?;
            let sched = EpsSchedule::new(eps0, factor, levels)?;
            let rep = box_dimension(&cloud, &sched)?;
            let text = rep.to_json();
            write_report(report.as_deref(), &text)?;
            println!("{text}");
            Ok(ExitCode::SUCCESS)
        }
        DimCmd::Similarity { ratios, report } => {
            let d = similarity_dimension(&ratios)?;
            let text = serde_json::json!({ "dimension": d }).to_string();
            write_report(report.as_deref(), &text)?;
            println!("{text}");
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn run_growth(sub: GrowthCmd) -> ifskit::Result<ExitCode> {
    match sub {
        GrowthCmd::Simulate {
            rho,
            la,
            lb,
            q,
            k0,
            t,
            seed,
            out,
        } => {
            let g = GrowthParams::new(rho, la, lb, q)?;
            let path = simulate_growth(&g, k0, t, seed)?;
            path.save_csv(&out)?;
            println!(
                "{}",
                serde_json::json!({ "periods": path.len(), "seed": seed })
            );
            Ok(ExitCode::SUCCESS)
        }
        GrowthCmd::VerifyPolicy {
            rho,
            la,
            lb,
            q,
            grid,
            iters,
        } => {
            let g = GrowthParams::new(rho, la, lb, q)?;
            let sol = solve_growth_numerically(&g, grid, iters)?;
            let mut max_resid = 0.0f64;
            for &y in &sol.ys {
                max_resid = max_resid.max(euler_residual(&g, y)?);
            }
            // Compare policies on the interior 80% of the grid, away from
            // the interpolation edges.
            let n = sol.ys.len();
            let (a, b) = (n / 10, n - n / 10);
            let target = 1.0 - g.rho() / 3.0;
            let mut max_gap = 0.0f64;
            for i in a..b {
                max_gap = max_gap.max((sol.c[i] / sol.ys[i] - target).abs());
            }
            println!(
                "{}",
                serde_json::json!({
                    "max_euler_residual": max_resid,
                    "max_policy_gap_vs_value_iteration": max_gap,
                    "oracle_iterations": sol.iterations,
                    "converged": sol.converged,
                })
            );
            Ok(exit_for(sol.converged))
        }
        GrowthCmd::Attractor {
            rho,
            la,
            lb,
            q,
            eps,
            max_iter,
            out,
            out_unit,
        } => {
            let g = GrowthParams::new(rho, la, lb, q)?;
            let (res, unit) = growth_attractor_conjugated(&g, eps, max_iter)?;
            res.boxes.save_csv(&out)?;
            unit.save_csv(&out_unit)?;
            println!("{}", cover_summary(&unit, res.iterations, res.final_dh, res.converged));
            Ok(exit_for(res.converged))
        }
    }
}

fn cover_summary(b: &BoxSet, iterations: u32, final_dh: f64, converged: bool) -> String {
    serde_json::json!({
        "cells": b.len(),
        "iterations": iterations,
        "final_dH": final_dh,
        "converged": converged,
        "interval_groups": b.interval_groups(),
        "covered_area": b.total_measure(),
    })
    .to_string()
}

fn exit_for(converged: bool) -> ExitCode {
    if converged {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    }
}

fn write_report(path: Option<&Path>, text: &str) -> ifskit::Result<()> {
    if let Some(p) = path {
        std::fs::write(p, format!("{text}\n"))?;
    }
    Ok(())
}
