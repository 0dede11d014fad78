use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use singlim::harness::{self, output::find_runs, Config};
use singlim::Result;

#[derive(Parser)]
#[command(name = "singlim", version, about = "Rosenau/KdV singular-limit experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one model with the `[model]` parameters.
    Simulate {
        config: PathBuf,
        /// Parent directory for the run (overrides `[output].dir`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the `(eps, beta)` sweep and compare against the entropy solution.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute and write the reference entropy solution(s).
    Oracle {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rebuild tables and plot data from the manifests under DIR.
    Report { dir: PathBuf },
}

fn load(path: &Path) -> Result<(Config, String)> {
    let config = Config::load(path)?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("run");
    let id = config.run_id(stem);
    Ok((config, id))
}

fn out_dir(config: &Config, out: Option<PathBuf>) -> PathBuf {
    out.unwrap_or_else(|| PathBuf::from(&config.output.dir))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate { config, out } => {
            let (config, id) = load(&config)?;
            let rec = harness::simulate(&config)?;
            let dir = harness::write_simulation(&out_dir(&config, out), &id, &config, &rec)?;
            println!(
                "{} eps = {} beta = {}: {} steps, energy drift {:.3e}",
                rec.model.kind.name(),
                rec.model.epsilon,
                rec.model.beta,
                rec.stats.steps,
                rec.energy_drift
            );
            println!("wrote {}", dir.display());
        }
        Command::Sweep { config, out } => {
            let (config, id) = load(&config)?;
            let result = harness::run_sweep(&config.plan()?)?;
            let (dir, table) = harness::write_sweep(&out_dir(&config, out), &id, &config, &result)?;
            print!("{}", table.render());
            if let Some(f) = result.matched_flux() {
                println!("errors converge under the {} limit flux", f.name());
            }
            println!("wrote {}", dir.display());
        }
        Command::Oracle { config, out } => {
            let (config, id) = load(&config)?;
            let refs = harness::oracle(&config)?;
            for r in &refs {
                println!(
                    "{}: {} cells, spacing {:.3e}, t = {}, mass {:.6e}",
                    r.flux_convention.name(),
                    r.cells.len(),
                    r.spacing,
                    r.time,
                    r.mass()
                );
            }
            let dir = harness::write_oracle(&out_dir(&config, out), &id, &config, &refs)?;
            println!("wrote {}", dir.display());
        }
        Command::Report { dir } => {
            for run in find_runs(&dir)? {
                print!("{}", harness::regenerate(&run)?);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
