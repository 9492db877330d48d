//! Command-line front end: `run`, `converge`, `bench` and `conserve`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bgk_lowrank::driver::{
    complexity_bench, conservation_study, convergence_study, format_float, run_simulation,
    write_table, RunConfig,
};
use bgk_lowrank::Result;

#[derive(Parser)]
#[command(name = "bgk", version, about = "Low-rank DG solver for the 1d2v BGK equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand; each overrides the config file.
#[derive(Args)]
struct Common {
    /// `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    problem: Option<String>,
    #[arg(long)]
    nx: Option<String>,
    #[arg(long)]
    nv: Option<String>,
    /// Polynomial degree (NDG order k+1).
    #[arg(short = 'k', long)]
    degree: Option<String>,
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    tol: Option<String>,
    #[arg(long)]
    limiter: Option<String>,
    #[arg(long)]
    t_final: Option<String>,
    #[arg(long)]
    cfl: Option<String>,
    #[arg(long)]
    vmax: Option<String>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    seed: Option<String>,
    /// Evaluate per-node work in parallel.
    #[arg(long)]
    parallel: bool,
}

impl Common {
    fn config(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        let overrides = [
            ("problem", &self.problem),
            ("nx", &self.nx),
            ("nv", &self.nv),
            ("k", &self.degree),
            ("eps", &self.eps),
            ("tol", &self.tol),
            ("limiter", &self.limiter),
            ("t_final", &self.t_final),
            ("cfl", &self.cfl),
            ("vmax", &self.vmax),
            ("seed", &self.seed),
        ];
        for (key, value) in overrides {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        if let Some(dir) = &self.out_dir {
            cfg.out_dir = dir.clone();
        }
        cfg.parallel |= self.parallel;
        for w in cfg.validate()? {
            eprintln!("warning: {w}");
        }
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation and write CSV/JSON output.
    Run(Common),
    /// Self-convergence study over a doubling sequence of meshes.
    Converge {
        #[command(flatten)]
        common: Common,
        /// Element counts, e.g. `16,32,64`.
        #[arg(long, value_delimiter = ',', default_value = "16,32,64,128,256")]
        refinements: Vec<usize>,
    },
    /// Wall-time scaling with the velocity resolution.
    Bench {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "128,256,512,1024")]
        nvs: Vec<usize>,
        #[arg(long, default_value_t = 3)]
        repeats: usize,
    },
    /// Drift of the conserved totals for several Knudsen numbers and tolerances.
    Conserve {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "1,1e-6")]
        eps_values: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "1e-15,1e-6")]
        tols: Vec<f64>,
    },
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(common) => {
            let cfg = common.config()?;
            let s = run_simulation(&cfg)?;
            println!(
                "{} steps to t = {} in {:.3} s; max rank {}, max drift {:e}; output in {}",
                s.steps,
                s.t_final,
                s.wall_seconds,
                s.max_rank,
                s.max_drift,
                cfg.out_dir.display()
            );
        }
        Command::Converge {
            common,
            refinements,
        } => {
            let cfg = common.config()?;
            let rows = convergence_study(&cfg, &refinements)?;
            println!("nx,l1_error,order");
            for r in &rows {
                let order = r.order.map(|o| format!("{o:.3}")).unwrap_or_default();
                println!("{},{:e},{}", r.nx, r.error, order);
            }
            write_table(&cfg.out_dir.join("convergence.csv"), "nx,l1_error,order", &rows, |r| {
                vec![
                    r.nx.to_string(),
                    format_float(r.error),
                    r.order.map(format_float).unwrap_or_default(),
                ]
            })?;
        }
        Command::Bench {
            common,
            nvs,
            repeats,
        } => {
            let cfg = common.config()?;
            let table = complexity_bench(&cfg, &nvs, repeats)?;
            println!("nv,seconds");
            for r in &table.rows {
                println!("{},{:.4}", r.nv, r.seconds);
            }
            println!("slope,{:.3}", table.slope);
            write_table(&cfg.out_dir.join("bench.csv"), "nv,seconds", &table.rows, |r| {
                vec![r.nv.to_string(), format_float(r.seconds)]
            })?;
        }
        Command::Conserve {
            common,
            eps_values,
            tols,
        } => {
            let cfg = common.config()?;
            let rows = conservation_study(&cfg, &eps_values, &tols)?;
            println!("eps,tol,max_drift,max_rank");
            for r in &rows {
                println!("{:e},{:e},{:e},{}", r.eps, r.tol, r.max_drift, r.max_rank);
            }
            write_table(
                &cfg.out_dir.join("conserve.csv"),
                "eps,tol,max_drift,max_rank",
                &rows,
                |r| {
                    vec![
                        format_float(r.eps),
                        format_float(r.tol),
                        format_float(r.max_drift),
                        r.max_rank.to_string(),
                    ]
                },
            )?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = serde_json::json!({ "error": e.to_string() });
            eprintln!("{msg}");
            ExitCode::FAILURE
        }
    }
}
