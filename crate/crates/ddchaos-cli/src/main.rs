//! Command-line front end: runs scenario configs, lists the bundled ones,
//! and exposes the evaluator, density estimator, orbit traces, and identity
//! checks as small subcommands.
//!
//! Exit status: 0 when everything asked for passed, 2 when a scenario ran
//! but some check failed or came back inconclusive, 1 for config or runtime
//! errors (including usage errors).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ddchaos::num_complex::Complex64;

use ddchaos::density::{upper_density_estimate, MembershipTrace};
use ddchaos::detect::orbit_norm_trace;
use ddchaos::element::Element;
use ddchaos::ml::{ml_eval, MlParams};
use ddchaos::scenario::{
    bundled, bundled_scenarios, compile, load_config, run, CompiledScenario, RunOptions,
    ScenarioReport,
};
use ddchaos::textio::{format_complex, parse_complex, parse_trace_csv, rows_to_csv};

#[derive(Parser)]
#[command(
    name = "ddchaos",
    version,
    about = "Orbit experiments for operator families: metrics, densities, identity residuals"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct ConfigSource {
    /// Path to a scenario config JSON file.
    #[arg(long, conflicts_with = "scenario")]
    config: Option<PathBuf>,
    /// Name of a bundled scenario (see `list`).
    #[arg(long)]
    scenario: Option<String>,
}

impl ConfigSource {
    fn text(&self) -> anyhow::Result<String> {
        match (&self.config, &self.scenario) {
            (Some(path), None) => Ok(std::fs::read_to_string(path)
                .map_err(|e| anyhow::anyhow!("cannot read {}: {e}", path.display()))?),
            (None, Some(name)) => Ok(bundled(name)
                .ok_or_else(|| {
                    anyhow::anyhow!(
                        "no bundled scenario named {name:?}; `ddchaos list` shows the names"
                    )
                })?
                .to_string()),
            _ => Err(anyhow::anyhow!("pass exactly one of --config or --scenario")),
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a scenario and write its report, summary, and profile CSVs.
    Run {
        #[command(flatten)]
        source: ConfigSource,
        /// Output directory for report.json and friends.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Cap every sample plan's horizon.
        #[arg(long)]
        horizon: Option<f64>,
        /// Recorded in the report; reserved for randomized sampling.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Worker threads for orbit sampling.
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// List the bundled scenarios.
    List,
    /// Evaluate the one-parameter entire function E_beta at z.
    MlEval {
        #[arg(allow_negative_numbers = true)]
        beta: f64,
        /// Complex literal, e.g. 1.5, -2i, "0.3+0.2i".
        #[arg(allow_hyphen_values = true)]
        z: String,
    },
    /// Upper-density estimate of a membership trace CSV (t,value rows,
    /// value 0 or 1).
    Density {
        /// CSV file with t,value rows.
        #[arg(long)]
        csv: PathBuf,
        /// Fraction of the horizon scanned for the densest window.
        #[arg(long, default_value_t = 0.5)]
        tail_window: f64,
    },
    /// Print the orbit seminorm of a named vector under a named family as
    /// t,value CSV on stdout.
    Orbit {
        #[command(flatten)]
        source: ConfigSource,
        /// Family label from the config.
        #[arg(long)]
        family: String,
        /// Vector name from the config.
        #[arg(long)]
        vector: String,
        /// Comma-separated sample times.
        #[arg(long, value_delimiter = ',', required = true)]
        times: Vec<f64>,
    },
    /// Run only the checks of a scenario and print the residual table.
    VerifyIdentities {
        #[command(flatten)]
        source: ConfigSource,
        /// Output directory for the report files.
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run only the detection part of a scenario and print the verdict.
    Detect {
        #[command(flatten)]
        source: ConfigSource,
        /// Output directory for the report files.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Cap the detection sample plan's horizon.
        #[arg(long)]
        horizon: Option<f64>,
        /// Worker threads for orbit sampling.
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
}

fn compile_text(text: &str) -> anyhow::Result<CompiledScenario> {
    let cfg = load_config(text)?;
    Ok(compile(&cfg)?)
}

/// Prints a complex value, collapsing to the real part when the imaginary
/// part is zero or pure roundoff next to it.
fn print_value(z: Complex64) {
    if z.im == 0.0 || (z.im.abs() <= 1e-12 * z.re.abs()) {
        println!("{}", z.re);
    } else {
        println!("{}", format_complex(z));
    }
}

fn report_lines(report: &ScenarioReport) {
    for c in &report.checks {
        let status = if c.ok { "PASS" } else { "FAIL" };
        println!("check {} [{}] {status}: {}", c.name, c.kind, c.detail);
    }
    for e in &report.expectations {
        let status = if e.ok { "PASS" } else { "FAIL" };
        println!(
            "expectation {} {status}: expected {}, actual {}",
            e.name, e.expected, e.actual
        );
    }
    if let Some(v) = &report.verdict {
        match &v.inconclusive {
            Some(why) => println!("verdict {} INCONCLUSIVE: {why}", v.kind),
            None => {
                let mut parts = Vec::new();
                if let Some(d) = v.near_zero_density {
                    parts.push(format!("near_zero={} ({d})", v.near_zero));
                }
                if !v.unbounded.is_empty() {
                    let levels = v
                        .unbounded
                        .iter()
                        .map(|l| format!("{}:{}", l.level, l.density))
                        .collect::<Vec<_>>()
                        .join(" ");
                    parts.push(format!("m_unbounded={} ({levels})", v.m_unbounded));
                }
                if v.irregular {
                    parts.push("irregular=true".to_string());
                }
                if let (Some(s), Some(p)) = (v.separation_density, v.proximity_density) {
                    parts.push(format!(
                        "scrambled_pair={} (separation {s}, proximity {p})",
                        v.scrambled_pair
                    ));
                }
                println!("verdict {} {}", v.kind, parts.join(" "));
            }
        }
    }
}

fn finish(report: &ScenarioReport) -> ExitCode {
    report_lines(report);
    if report.all_ok {
        println!("status ok");
        ExitCode::SUCCESS
    } else {
        println!("status failed");
        ExitCode::from(2)
    }
}

fn run_cmd(cmd: Cmd) -> anyhow::Result<ExitCode> {
    match cmd {
        Cmd::Run { source, out, horizon, seed, threads } => {
            let compiled = compile_text(&source.text()?)?;
            let opts = RunOptions { out_dir: out, horizon, seed, threads };
            let report = run(&compiled, &opts)?;
            println!("scenario {}", report.scenario);
            Ok(finish(&report))
        }
        Cmd::List => {
            for (name, text) in bundled_scenarios() {
                let description = load_config(text)
                    .map(|c| c.description)
                    .unwrap_or_default();
                println!("{name}: {description}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::MlEval { beta, z } => {
            let z = parse_complex(&z)?;
            let out = ml_eval(&MlParams::new(beta), z)?;
            print_value(out.value);
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Density { csv, tail_window } => {
            let text = std::fs::read_to_string(&csv)
                .map_err(|e| anyhow::anyhow!("cannot read {}: {e}", csv.display()))?;
            let rows = parse_trace_csv(&text)?;
            let samples: Vec<(f64, bool)> =
                rows.into_iter().map(|(t, v)| (t, v != 0.0)).collect();
            let trace = MembershipTrace::new(samples)?;
            let estimate = upper_density_estimate(&trace, tail_window)?;
            println!("{estimate}");
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Orbit { source, family, vector, times } => {
            let compiled = compile_text(&source.text()?)?;
            let spec = compiled
                .families
                .iter()
                .find(|f| f.label == family)
                .ok_or_else(|| anyhow::anyhow!("no family labeled {family:?} in the config"))?;
            let x: &Element = compiled
                .vectors
                .get(&vector)
                .ok_or_else(|| anyhow::anyhow!("no vector named {vector:?} in the config"))?;
            let trace = orbit_norm_trace(spec, &compiled.space, x, 1, &times)?;
            let rows: Vec<(f64, f64)> =
                times.iter().copied().zip(trace.values.iter().copied()).collect();
            print!("{}", rows_to_csv("t", "value", &rows));
            Ok(ExitCode::SUCCESS)
        }
        Cmd::VerifyIdentities { source, out } => {
            let cfg = load_config(&source.text()?)?;
            let stripped = ddchaos::scenario::ScenarioConfig { detection: None, ..cfg };
            let compiled = compile(&stripped)?;
            let report = run(&compiled, &RunOptions::new(out))?;
            Ok(finish(&report))
        }
        Cmd::Detect { source, out, horizon, threads } => {
            let cfg = load_config(&source.text()?)?;
            if cfg.detection.is_none() {
                return Err(anyhow::anyhow!("the config has no detection section"));
            }
            let stripped = ddchaos::scenario::ScenarioConfig { checks: Vec::new(), ..cfg };
            let compiled = compile(&stripped)?;
            let opts = RunOptions { out_dir: out, horizon, seed: 0, threads };
            let report = run(&compiled, &opts)?;
            Ok(finish(&report))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders its own help/version through the error path
            let _ = e.print();
            return if e.use_stderr() { ExitCode::FAILURE } else { ExitCode::SUCCESS };
        }
    };
    match run_cmd(cli.cmd) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
