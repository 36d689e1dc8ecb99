//! `flock` command line: `run`, `compare` and `sweep-seeds`.
//!
//! Exit codes: 0 success, 2 configuration error, 3 I/O error, 4 numerical
//! abort. `FLOCK_THREADS` caps the worker pool; results do not depend on it.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::config::{ModelKind, SimConfig};
use crate::error::{FlockError, Result};
use crate::experiment::{
    parse_seed_list, run_to_dir, summary_line, write_summaries, Aggregate, ExperimentSummary,
    SUMMARY_HEADER,
};
use crate::io::{format_real, load_config, parse_config};

pub const THREADS_ENV: &str = "FLOCK_THREADS";

type SummaryField<'a> = &'a dyn Fn(&ExperimentSummary) -> Option<f64>;

#[derive(Debug, Parser)]
#[command(name = "flock", version, about = "Deterministic flocking simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a single experiment.
    Run(CommonArgs),
    /// Run pos_vel, position and position_no_threshold on the same seed.
    Compare(CommonArgs),
    /// Repeat one configuration over a list of seeds.
    SweepSeeds {
        /// `a..b` (inclusive) or a comma-separated list.
        #[arg(long)]
        seeds: String,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// key=value config file
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    dt: Option<String>,
    #[arg(long)]
    t_end: Option<String>,
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    out_dir: Option<String>,
    #[arg(long)]
    metrics_stride: Option<String>,
    /// Write full trajectories every this many steps.
    #[arg(long)]
    trace_stride: Option<String>,
    /// Comma-separated snapshot times, s.
    #[arg(long)]
    snapshots: Option<String>,
}

impl CommonArgs {
    fn overrides(&self) -> Vec<(String, String)> {
        [
            ("model", &self.model),
            ("seed", &self.seed),
            ("n", &self.n),
            ("dt", &self.dt),
            ("t_end", &self.t_end),
            ("k", &self.k),
            ("out_dir", &self.out_dir),
            ("metrics_stride", &self.metrics_stride),
            ("trace_stride", &self.trace_stride),
            ("snapshot_times", &self.snapshots),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone())))
        .collect()
    }

    fn resolve(&self) -> Result<SimConfig> {
        let overrides = self.overrides();
        match &self.config {
            Some(path) => load_config(path, &overrides),
            None => parse_config("", &overrides),
        }
    }
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(value) = std::env::var(THREADS_ENV) {
        let threads: usize = value
            .trim()
            .parse()
            .ok()
            .filter(|&t| t >= 1)
            .ok_or_else(|| {
                FlockError::config(
                    THREADS_ENV,
                    format!("expected a positive integer, got `{value}`"),
                )
            })?;
        builder = builder.num_threads(threads);
    }
    builder
        .build()
        .map_err(|e| FlockError::config(THREADS_ENV, e.to_string()))
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.4}"))
        .unwrap_or_else(|| "-".to_string())
}

fn cmd_run(common: &CommonArgs) -> Result<()> {
    let config = common.resolve()?;
    let (summary, manifest) = run_to_dir(&config)?;
    println!("model        {}", summary.model);
    println!("seed         {}", summary.seed);
    println!("final gamma  {}", fmt_opt(summary.final_gamma));
    println!("final minsep {} m", fmt_opt(summary.final_min_sep));
    println!("wall time    {:.3} s", summary.wall_time.as_secs_f64());
    println!(
        "wrote {} artifacts + manifest to {}",
        manifest.artifacts.len(),
        config.out_dir.display()
    );
    Ok(())
}

fn cmd_compare(common: &CommonArgs) -> Result<()> {
    let base = common.resolve()?;
    let summaries = ModelKind::ALL
        .iter()
        .map(|&model| {
            let config = SimConfig {
                model,
                out_dir: base.out_dir.join(model.as_str()),
                ..base.clone()
            };
            run_to_dir(&config).map(|(s, _)| s)
        })
        .collect::<Result<Vec<_>>>()?;

    let (t0, t1) = (base.t_end / 2.0, base.t_end);
    println!("seed {}; late window t in [{t0}, {t1}] s", base.seed);
    println!(
        "{:<34}{:>14}{:>14}{:>24}",
        "characteristic", "pos_vel", "position", "position_no_threshold"
    );
    let table_row = |label: &str, f: SummaryField| {
        print!("{label:<34}");
        for (s, w) in summaries.iter().zip([14, 14, 24]) {
            print!("{:>w$}", fmt_opt(f(s)));
        }
        println!();
    };
    table_row("alignment: late mean gamma", &|s| s.late_gamma);
    table_row("alignment: final gamma", &|s| s.final_gamma);
    table_row("formation: late min-sep std (m)", &|s| s.late_min_sep_std);
    table_row("separation: late mean min-sep (m)", &|s| s.late_min_sep);
    table_row("neighborhood: late mean |N_i|", &|s| s.late_mean_nbrs);

    write_summaries(&base.out_dir.join("compare_summary.csv"), &summaries, "")
}

fn cmd_sweep(seeds: &str, common: &CommonArgs) -> Result<()> {
    let seeds = parse_seed_list(seeds)?;
    let base = common.resolve()?;
    let summaries = seeds
        .par_iter()
        .map(|&seed| {
            let config = SimConfig {
                seed,
                out_dir: base.out_dir.join(format!("seed_{seed}")),
                ..base.clone()
            };
            run_to_dir(&config).map(|(s, _)| s)
        })
        .collect::<Result<Vec<_>>>()?;

    println!("{SUMMARY_HEADER}");
    for s in &summaries {
        println!("{}", summary_line(s));
    }

    let mut extra = String::from("# aggregate: statistic,mean,std,min,max,count\n");
    let stats: [(&str, SummaryField); 4] = [
        ("final_gamma", &|s| s.final_gamma),
        ("late_gamma", &|s| s.late_gamma),
        ("late_min_sep", &|s| s.late_min_sep),
        ("late_min_sep_std", &|s| s.late_min_sep_std),
    ];
    for (name, f) in stats {
        if let Some(a) = Aggregate::of(summaries.iter().filter_map(f)) {
            let line = format!(
                "# {name},{},{},{},{},{}\n",
                format_real(a.mean),
                format_real(a.std),
                format_real(a.min),
                format_real(a.max),
                a.count
            );
            print!("{line}");
            extra.push_str(&line);
        }
    }
    write_summaries(&base.out_dir.join("sweep_summary.csv"), &summaries, &extra)
}

fn dispatch(cli: Cli) -> Result<()> {
    let pool = thread_pool()?;
    pool.install(|| match &cli.command {
        Command::Run(common) => cmd_run(common),
        Command::Compare(common) => cmd_compare(common),
        Command::SweepSeeds { seeds, common } => cmd_sweep(seeds, common),
    })
}

/// Parses `argv` (including the program name), runs the command and
/// returns the process exit code.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bad_flag_value_is_a_config_error() {
        assert_eq!(cli_main(["flock", "run", "--dt", "-1"]), 2);
        assert_eq!(cli_main(["flock", "run", "--model", "vicsek"]), 2);
        assert_eq!(cli_main(["flock", "nonsense"]), 2);
    }

    #[test]
    fn overrides_map_to_config_keys() {
        let cli = Cli::try_parse_from([
            "flock",
            "run",
            "--model",
            "pos_vel",
            "--snapshots",
            "0,1",
            "--t-end",
            "2",
        ])
        .unwrap();
        let Command::Run(common) = cli.command else {
            panic!()
        };
        let c = common.resolve().unwrap();
        assert_eq!(c.model, ModelKind::PosVel);
        assert_eq!(c.snapshot_times, vec![0.0, 1.0]);
        assert_eq!(c.t_end, 2.0);
    }
}
