use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use twistorcheck::catalog::runner::run_scenario;
use twistorcheck::catalog::scenario::{builtin, builtin_scenarios, Scenario};
use twistorcheck::GeomError;

#[derive(Parser)]
#[command(name = "twistorcheck", version, about = "Numerical checks of generalized quaternionic Kähler structures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the builtin scenarios.
    List,
    /// Print a builtin scenario as JSON.
    Describe { name: String },
    /// Run one scenario (builtin name or JSON file).
    Run {
        #[arg(long)]
        scenario: String,
        #[command(flatten)]
        overrides: Overrides,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every builtin scenario and print a summary.
    Suite {
        #[command(flatten)]
        overrides: Overrides,
    },
}

#[derive(Args, Clone)]
struct Overrides {
    /// Sample points on the chart.
    #[arg(long)]
    samples: Option<usize>,
    /// Fibonacci points on the sphere of structures (the six poles are always added).
    #[arg(long)]
    sphere_samples: Option<usize>,
    /// Curvature finite-difference step.
    #[arg(long)]
    step: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

impl Overrides {
    fn apply(&self, s: &mut Scenario) {
        let sm = &mut s.sampling;
        if let Some(v) = self.samples {
            sm.points = v;
        }
        if let Some(v) = self.sphere_samples {
            sm.sphere = v;
        }
        if let Some(v) = self.step {
            sm.h = v;
        }
        if let Some(v) = self.seed {
            sm.seed = v;
        }
    }
}

fn load(spec: &str) -> Result<Scenario, GeomError> {
    if let Some(s) = builtin(spec) {
        return Ok(s);
    }
    let text = std::fs::read_to_string(spec)
        .map_err(|e| GeomError::Config(format!("`{spec}` is neither a builtin scenario nor a readable file: {e}")))?;
    let mut s = Scenario::from_json(&text)?;
    if s.name.is_empty() {
        s.name = spec.into();
    }
    Ok(s)
}

fn config_error(e: GeomError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            for s in builtin_scenarios() {
                let verdict = s.expect.as_ref().map(|e| format!("{:?}", e.verdict)).unwrap_or_default();
                println!("{:<32} {}", s.name, verdict);
            }
            ExitCode::SUCCESS
        }
        Command::Describe { name } => match builtin(&name) {
            Some(s) => {
                println!("{}", serde_json::to_string_pretty(&s).expect("scenarios serialize"));
                ExitCode::SUCCESS
            }
            None => config_error(GeomError::Config(format!("no builtin scenario `{name}`"))),
        },
        Command::Run {
            scenario,
            overrides,
            out,
        } => {
            let mut s = match load(&scenario) {
                Ok(s) => s,
                Err(e) => return config_error(e),
            };
            overrides.apply(&mut s);
            let report = match run_scenario(&s) {
                Ok(r) => r,
                Err(e) => return config_error(e),
            };
            match out {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, report.to_json()) {
                        return config_error(GeomError::Config(format!("writing {}: {e}", path.display())));
                    }
                    print!("{}", report.summary());
                }
                None => println!("{}", report.to_json()),
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Command::Suite { overrides } => {
            let mut worst = 0;
            let mut failed = 0;
            for mut s in builtin_scenarios() {
                overrides.apply(&mut s);
                match run_scenario(&s) {
                    Ok(r) => {
                        print!("{}", r.summary());
                        let code = r.exit_code();
                        if code != 0 {
                            failed += 1;
                        }
                        worst = worst.max(code);
                    }
                    Err(e) => return config_error(e),
                }
            }
            println!("{failed} of {} scenarios failed", builtin_scenarios().len());
            ExitCode::from(worst as u8)
        }
    }
}
