use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;

use covercert::approximation::build_outer;
use covercert::geometry::{Body, Plank, Shape};
use covercert::harness::{generate_partition, sweep, sweep_csv, verify_covering, Scenario};
use covercert::inradius::inradius_body;
use covercert::witness::{bang_plank_witness, evaluate, maximize, CoveringInstance, Mode};
use covercert::Error;

#[derive(Parser)]
#[command(name = "covercert", version, about = "Inradius, outer polytopes and covering witnesses")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Largest inscribed ball of a body.
    Inradius { body: PathBuf },
    /// Outer polytope with its direction certificate.
    Approximate {
        body: PathBuf,
        #[arg(long)]
        eps: f64,
    },
    /// Witness point for a covering instance (exit 0 iff valid).
    Witness {
        instance: PathBuf,
        #[arg(long, default_value_t = Mode::Ascent)]
        mode: Mode,
    },
    /// Uncovered point of the unit ball for a JSON array of planks.
    Planks { planks: PathBuf },
    /// Check the inradius inequality on a scenario (exit 0 iff it holds).
    Verify {
        scenario: PathBuf,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Random hyperplane partition of a polytope.
    Generate {
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        cuts: usize,
        #[arg(long)]
        seed: u64,
    },
    /// CSV report over random partitions.
    Sweep {
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 4)]
        cuts: usize,
    },
}

enum Failure {
    Malformed(String),
    Contract(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(_) | Error::DimensionMismatch { .. } | Error::UnsupportedBody(_) => {
                Failure::Malformed(e.to_string())
            }
            _ => Failure::Contract(e.to_string()),
        }
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Malformed(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Malformed(format!("{}: {e}", path.display())))
}

fn print_json<T: Serialize>(value: &T) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("report types serialize")
    );
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Inradius { body } => {
            let body: Body = read_json(&body)?;
            print_json(&inradius_body(&body)?);
        }
        Command::Approximate { body, eps } => {
            let body: Body = read_json(&body)?;
            if !(eps >= 0.0 && eps.is_finite()) {
                return Err(Failure::Malformed("--eps must be a finite nonnegative number".into()));
            }
            print_json(&build_outer(&body, eps)?);
        }
        Command::Witness { instance, mode } => {
            let instance: CoveringInstance = read_json(&instance)?;
            instance.validate()?;
            let assignment = maximize(&instance, mode)?;
            let report = evaluate(&instance, &assignment)?;
            print_json(&report);
            if !report.valid {
                return Err(Failure::Contract(format!(
                    "witness invalid: norm {}, margins {:?}",
                    report.norm_x, report.margins
                )));
            }
        }
        Command::Planks { planks } => {
            let bodies: Vec<Body> = read_json(&planks)?;
            let planks = bodies
                .into_iter()
                .map(|b| match b.shape {
                    Shape::Plank(p) if !b.clip_to_unit_ball => Ok(p),
                    _ => Err(Failure::Malformed("expected unclipped plank bodies".into())),
                })
                .collect::<Result<Vec<Plank>, _>>()?;
            print_json(&bang_plank_witness(&planks, true)?);
        }
        Command::Verify { scenario, samples } => {
            let scenario: Scenario = read_json(&scenario)?;
            let result = verify_covering(&scenario, samples)?;
            print_json(&result);
            if !result.inequality_holds {
                return Err(Failure::Contract(format!(
                    "sum of piece inradii {} is below target inradius {}",
                    result.sum_radii, result.r_target
                )));
            }
        }
        Command::Generate { target, cuts, seed } => {
            let body: Body = read_json(&target)?;
            let polytope = match body.shape {
                Shape::Polytope(p) if !body.clip_to_unit_ball => p,
                _ => return Err(Failure::Malformed("target must be an unclipped polytope".into())),
            };
            print_json(&generate_partition(&polytope, cuts, seed)?);
        }
        Command::Sweep {
            trials,
            seed,
            dim,
            cuts,
        } => {
            let rows = sweep(trials, seed, dim, cuts)?;
            print!("{}", sweep_csv(&rows));
            if let Some(min) = rows.iter().map(|r| r.margin).min_by(f64::total_cmp) {
                eprintln!("minimum margin {min:.6e} over {} trials", rows.len());
            }
            let failed = rows.iter().filter(|r| !r.inequality_holds).count();
            if failed > 0 {
                return Err(Failure::Contract(format!("{failed} trials violate the inequality")));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Contract(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Malformed(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
