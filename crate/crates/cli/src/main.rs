use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use raywave::io::output::{EXIT_CONFIG, EXIT_OK, EXIT_RUNTIME, EXIT_VERIFY_FAILED, METADATA};
use raywave::io::{
    default_output_dir, emit_config, exit_code_for, parse_config, parse_config_str, preset_config, read_config_text, run_scenario,
    sweep, verify_record, write_outputs, SweepSpec,
};
use raywave::model::ScenarioConfig;
use raywave::Error;

#[derive(Parser)]
#[command(name = "raywave", version, about = "Ray dynamics of diffracting wave beams")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Scenario {
    /// Scenario file (TOML).
    config: Option<PathBuf>,
    /// Start from a named preset: gaussian, single-slit or multi-slit.
    #[arg(long)]
    preset: Option<String>,
    /// Switch the wave potential off (geometrical optics).
    #[arg(long)]
    no_coupling: bool,
    /// Output directory; defaults to $RAYWAVE_OUT/<name>.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one scenario and write its CSV, JSON and SVG files.
    Run(Scenario),
    /// Run a grid of scenarios varying ε and profile parameters.
    Sweep {
        #[command(flatten)]
        scenario: Scenario,
        /// Comma-separated ε values.
        #[arg(long, value_delimiter = ',')]
        epsilon: Vec<f64>,
        /// Profile parameter range, e.g. q=1,1.5,2 (repeatable).
        #[arg(long = "param")]
        params: Vec<String>,
        /// Keep ε·z_end fixed across ε values.
        #[arg(long)]
        scale_z_end: bool,
        /// Run points one after another.
        #[arg(long)]
        sequential: bool,
    },
    /// Run a vacuum scenario against the wave oracle and grade it.
    Verify(Scenario),
    /// Print the full scenario file of a preset or config.
    EmitConfig(Scenario),
}

fn load(s: &Scenario) -> raywave::Result<ScenarioConfig> {
    let mut config = match (&s.config, &s.preset) {
        (Some(path), None) => parse_config(path)?,
        (Some(path), Some(name)) => {
            let text = read_config_text(path)?;
            parse_config_str(&format!("preset = {name:?}\n{text}"))
                .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?
        }
        (None, Some(name)) => preset_config(name)?,
        (None, None) => return Err(Error::Argument("give a scenario file or --preset".into())),
    };
    if s.no_coupling {
        let default_dt = config.dt == config.default_dt();
        config.coupling_enabled = false;
        if default_dt {
            config.dt = config.default_dt();
        }
    }
    Ok(config)
}

fn out_dir(s: &Scenario, config: &ScenarioConfig) -> PathBuf {
    s.out.clone().unwrap_or_else(|| default_output_dir(&config.name))
}

fn fail(err: &Error) -> i32 {
    eprintln!("error: {err}");
    exit_code_for(err)
}

fn parse_param(spec: &str) -> Result<(String, Vec<f64>), Error> {
    let (name, values) = spec
        .split_once('=')
        .ok_or_else(|| Error::Argument(format!("expected NAME=V1,V2,... in {spec:?}")))?;
    let values = values
        .split(',')
        .filter(|v| !v.trim().is_empty())
        .map(|v| v.trim().parse::<f64>().map_err(|e| Error::Argument(format!("{spec:?}: {e}"))))
        .collect::<Result<Vec<f64>, Error>>()?;
    Ok((name.trim().to_string(), values))
}

fn report_run(dir: &Path, code: i32, message: Option<&str>) {
    match code {
        EXIT_OK => println!("wrote {}", dir.display()),
        _ => eprintln!(
            "run stopped early ({}); partial outputs in {}",
            message.unwrap_or("unknown"),
            dir.display()
        ),
    }
}

fn execute(cli: Cli) -> i32 {
    match cli.command {
        Command::Run(s) => {
            let config = match load(&s) {
                Ok(c) => c,
                Err(e) => return fail(&e),
            };
            let dir = out_dir(&s, &config);
            match run_scenario(config, &dir) {
                Ok(o) => {
                    report_run(&dir, o.exit_code, o.record.message.as_deref());
                    o.exit_code
                }
                Err(e) => fail(&e),
            }
        }
        Command::Sweep { scenario, epsilon, params, scale_z_end, sequential } => {
            let base = match load(&scenario) {
                Ok(c) => c,
                Err(e) => return fail(&e),
            };
            let profile = match params.iter().map(|p| parse_param(p)).collect::<Result<Vec<_>, _>>() {
                Ok(p) => p,
                Err(e) => return fail(&e),
            };
            let spec = SweepSpec { epsilon, profile, scale_z_end, parallel: !sequential };
            let dir = out_dir(&scenario, &base);
            match sweep(&base, &spec, &dir) {
                Ok(points) => {
                    for p in &points {
                        println!(
                            "point {:03}  ε = {:e}  {}  width {}  fringes {}  ΔxΔp {}",
                            p.index,
                            p.epsilon,
                            p.status,
                            p.far_field_width.map_or("-".into(), |v| format!("{v:.6}")),
                            p.fringe_count.map_or("-".into(), |v| v.to_string()),
                            p.uncertainty_product.map_or("-".into(), |v| format!("{v:.4}")),
                        );
                    }
                    println!("summary in {}", dir.join("summary.csv").display());
                    if points.iter().all(|p| p.status == "reached-z-end") {
                        EXIT_OK
                    } else {
                        EXIT_RUNTIME
                    }
                }
                Err(e) => fail(&e),
            }
        }
        Command::Verify(s) => {
            let config = match load(&s) {
                Ok(c) => c,
                Err(e) => return fail(&e),
            };
            let dir = out_dir(&s, &config);
            let record = match raywave::dynamics::run(config) {
                Ok(r) => r,
                Err(e) => return fail(&e),
            };
            if let Err(e) = write_outputs(&record, &dir) {
                return fail(&e);
            }
            let report = match verify_record(&record) {
                Ok(r) => r,
                Err(e) => return fail(&e),
            };
            let text = serde_json::to_string_pretty(&report).expect("report serializes");
            if let Err(e) = std::fs::write(dir.join("verify.json"), format!("{text}\n")) {
                return fail(&e.into());
            }
            println!("{text}");
            eprintln!("outputs and verify.json in {} ({METADATA} has the config echo)", dir.display());
            if report.passed {
                EXIT_OK
            } else {
                EXIT_VERIFY_FAILED
            }
        }
        Command::EmitConfig(s) => match load(&s) {
            Ok(c) => {
                print!("{}", emit_config(&c));
                EXIT_OK
            }
            Err(e) => fail(&e),
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    ExitCode::from(execute(cli) as u8)
}
