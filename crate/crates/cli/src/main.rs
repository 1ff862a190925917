use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use longtail_core::limit_theory::{LimitInputs, LimitLaw};
use longtail_core::linear_process::{read_column_csv, write_path_csv, PathGenerator};
use longtail_core::mc_harness::{ks_distance, replication_seed, run_experiment_with_workers, ExperimentConfig};
use longtail_core::stable_numerics::{normal_cdf, StableLaw};
use longtail_core::{Error, InnovationSpec, Result, TheoryReport};

#[derive(Parser)]
#[command(name = "longtail", version, about = "Long-memory linear processes and peaks-over-threshold limits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print exponents and limit constants for (alpha, d).
    Theory {
        #[arg(long, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long, allow_negative_numbers = true)]
        d: f64,
        /// Coefficient constant c_a.
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        ca: f64,
        /// Innovation tail constant A (default: SαS with scale 1).
        #[arg(long = "A-const", allow_negative_numbers = true)]
        a_const: Option<f64>,
        /// Innovation variance when alpha = 2.
        #[arg(long, default_value_t = 1.0)]
        variance: f64,
    },
    /// Simulate one path of length max(n_grid) and write it as CSV.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a replication grid and write rows and aggregates into a directory.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// KS distance of a single-column sample against a limit law.
    Kscheck {
        #[arg(long)]
        samples: PathBuf,
        /// `stable:ALPHA:ETA` or `normal:SIGMA2`.
        #[arg(long)]
        limit: String,
    },
}

fn parse_limit(spec: &str) -> Result<LimitLaw> {
    let parts: Vec<&str> = spec.split(':').collect();
    let num = |s: &str| {
        s.parse::<f64>()
            .map_err(|_| Error::Config(format!("bad number {s:?} in --limit")))
    };
    match parts.as_slice() {
        ["stable", a, eta] => Ok(LimitLaw::Stable(StableLaw::new(num(a)?, num(eta)?)?)),
        ["normal", v] => {
            let v = num(v)?;
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("normal variance must be positive, got {v}")));
            }
            Ok(LimitLaw::Normal { variance: v })
        }
        _ => Err(Error::Config(format!(
            "--limit must be stable:ALPHA:ETA or normal:SIGMA2, got {spec:?}"
        ))),
    }
}

fn run(cli: Cli) -> Result<()> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Theory {
            alpha,
            d,
            ca,
            a_const,
            variance,
        } => {
            let tail_constant = match a_const {
                Some(a) => a,
                None if alpha < 2.0 => InnovationSpec::symmetric_stable(alpha, 1.0)
                    .tail_constant()
                    .unwrap_or(f64::NAN),
                None => f64::NAN,
            };
            let inputs = LimitInputs {
                c_a: ca,
                tail_constant,
                variance,
            };
            write!(out, "{}", TheoryReport::new(alpha, d, inputs)?.to_key_values())?;
        }
        Command::Simulate { config, out: path } => {
            let cfg = ExperimentConfig::from_path(&config)?;
            let n = *cfg.n_grid.last().expect("validated grid");
            let generator = PathGenerator::new(&cfg.spec_for(n), n, cfg.method)?;
            let xs = generator.simulate(replication_seed(cfg.base_seed, n, 0))?;
            write_path_csv(BufWriter::new(File::create(&path)?), &xs)?;
            writeln!(out, "wrote {n} values to {}", path.display())?;
        }
        Command::Experiment { config, out: dir, workers } => {
            let cfg = ExperimentConfig::from_path(&config)?;
            let dir = dir
                .or_else(|| cfg.output_path.clone())
                .ok_or_else(|| Error::Config("no output directory: pass --out or set output_path".into()))?;
            let table = run_experiment_with_workers(&cfg, workers)?;
            for path in table.write_dir(&dir)? {
                writeln!(out, "wrote {}", path.display())?;
            }
            writeln!(out, "target,{},lr_order", longtail_core::mc_harness::Aggregate::CSV_HEADER)?;
            for a in &table.aggregates {
                writeln!(out, "{},{},{}", a.target, a.csv_line(), table.lr_order)?;
            }
            for (target, slope) in &table.rate_slopes {
                match slope {
                    Some(s) => writeln!(out, "rate_fit {target} slope = {s:.6}")?,
                    None => writeln!(out, "rate_fit {target} slope = n/a")?,
                }
            }
        }
        Command::Kscheck { samples, limit } => {
            let law = parse_limit(&limit)?;
            let xs = read_column_csv(BufReader::new(File::open(&samples)?))?;
            if xs.is_empty() {
                return Err(Error::Config(format!("{} holds no samples", samples.display())));
            }
            let ks = match law {
                LimitLaw::Stable(l) => ks_distance(&xs, |x| l.cdf(x)),
                LimitLaw::Normal { variance } => ks_distance(&xs, |x| normal_cdf(x / variance.sqrt())),
            };
            if !ks.is_finite() {
                return Err(Error::Numerical(format!("KS distance evaluated to {ks}")));
            }
            writeln!(out, "m = {}\nks = {ks:.6}", xs.len())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Numerical(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}
