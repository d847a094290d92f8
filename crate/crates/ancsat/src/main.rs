use std::path::{Path, PathBuf};
use std::process::ExitCode;

use ancsat::experiment::{analyze, run_experiment, sweep, write_sweep, AnalysisReport, Comparison};
use ancsat::persist::{read_json, write_json};
use ancsat::presets::{custom, preset, Experiment, PresetName};
use ancsat::{Error, Result};
use ancsat_core::controllers::Algorithm;
use ancsat_core::harness::{RunStatus, ScenarioConfig};
use clap::{Args, Parser, Subcommand};

/// Simulate and analyze output-constrained active noise control.
#[derive(Parser)]
#[command(name = "ancsat", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a preset with every (or the selected) algorithm and write results.
    Run(Common),
    /// Report step-size bounds, time constants and Wiener solutions.
    Analyze(Common),
    /// Run a preset once per parameter value and write a sweep table.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// One of mu1_initial, kappa, gamma, varsigma, rho_sq.
        #[arg(long)]
        parameter: String,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        values: Vec<f64>,
    },
}

#[derive(Args)]
struct Common {
    /// fig2-saturation, fig3-static, fig5-varying or custom.
    preset: Option<String>,
    /// Scenario JSON for the custom preset.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    output_dir: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated algorithm names (fxlms, rescaling, 2gd, 2gd-momentum-vss).
    #[arg(long, value_delimiter = ',')]
    algorithms: Vec<String>,
    /// Parameter override, repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

impl Common {
    fn experiment(&self) -> Result<Experiment> {
        let name: PresetName = match (&self.preset, &self.config) {
            (Some(p), _) => p.parse()?,
            (None, Some(_)) => PresetName::Custom,
            (None, None) => return Err(Error::Config("a preset name or --config is required".into())),
        };
        let mut e = match (name, &self.config) {
            (PresetName::Custom, Some(path)) => custom(read_json::<ScenarioConfig>(path).map_err(config_file)?)?,
            (PresetName::Custom, None) => preset(name, 0)?,
            (_, Some(_)) => return Err(Error::Config("--config is only valid with the custom preset".into())),
            (_, None) => preset(name, 1)?,
        };
        let mut overrides = Vec::new();
        if let Some(seed) = self.seed {
            overrides.push(format!("seed={seed}"));
        }
        overrides.extend(self.overrides.iter().cloned());
        e.apply_overrides(&overrides)?;
        Ok(e)
    }

    fn algorithms(&self, default: &[Algorithm]) -> Result<Vec<Algorithm>> {
        if self.algorithms.is_empty() {
            return Ok(default.to_vec());
        }
        self.algorithms
            .iter()
            .map(|a| {
                Algorithm::from_name(a.trim())
                    .ok_or_else(|| Error::Config(format!("unknown algorithm `{a}`")))
            })
            .collect()
    }
}

/// A malformed config file is a configuration error, not an I/O failure.
fn config_file(e: Error) -> Error {
    match e {
        Error::Format { path, message, .. } => {
            Error::Config(format!("invalid config {}: {message}", path.display()))
        }
        other => other,
    }
}

fn print_comparison(c: &Comparison, dir: &Path) {
    println!("{} -> {}", c.config.name, dir.display());
    for a in &c.algorithms {
        let status = match a.status {
            RunStatus::Completed => "completed".to_string(),
            RunStatus::Diverged { sample } => format!("DIVERGED at {sample}"),
        };
        let w: Vec<String> = a.final_weights.iter().take(4).map(|v| format!("{v:.4}")).collect();
        print!(
            "  {:<17} {status:<12} e²={:.4e} y²={:.4e} conv={} w=[{}{}]",
            a.algorithm.name(),
            a.steady_state_error_power,
            a.steady_state_output_power,
            a.convergence_sample,
            w.join(", "),
            if a.final_weights.len() > 4 { ", ..." } else { "" }
        );
        if let Some(b) = &a.bands {
            print!(
                " in-band {:+.2} dB, out-of-band {:+.2}/{:+.2} dB",
                b.in_band_change_db, b.low_band_change_db, b.high_band_change_db
            );
        }
        println!();
    }
}

fn print_analysis(r: &AnalysisReport) {
    println!("{} (mu1(0)={:e}, kappa={})", r.config.name, r.mu1_initial, r.kappa);
    for p in &r.phases {
        let s = &p.stability;
        println!("  phase {}: rho²={:.4} sigma_d²={:.4} varsigma={:.4} (derived {:.4})", p.phase, p.rho_sq, p.sigma_d_sq, p.varsigma, p.varsigma_derived);
        println!("    lambda_max={:.6} lambda_min={:.6} lambda_max(R_x)={:.6}", s.lambda_max, s.lambda_min, s.lambda_max_reference);
        println!(
            "    mu1 bound={:.6e} ({}), varsigma*mu1 bound={:.6e} ({})",
            s.mu1_bound,
            if s.mu1_within_bound { "ok" } else { "violated" },
            s.mu2_bound,
            if s.varsigma_mu1_within_bound { "ok" } else { "violated" }
        );
        let tau: Vec<String> = s.time_constants.iter().take(8).map(|t| format!("{t:.1}")).collect();
        println!("    time constants: [{}]", tau.join(", "));
        let fmt = |w: &[f64]| w.iter().take(8).map(|v| format!("{v:.4}")).collect::<Vec<_>>().join(", ");
        println!("    w_o=[{}]", fmt(&p.wiener_optimal));
        println!("    w_o^sub=[{}] (varsigma), [{}] (derived)", fmt(&p.wiener_suboptimal), fmt(&p.wiener_suboptimal_derived));
    }
    if r.unstable_configuration {
        println!("  unstable-configuration: mu1(0) is outside the step-size bounds");
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(common) => {
            let e = common.experiment()?;
            let algorithms = common.algorithms(&Algorithm::ALL)?;
            let c = run_experiment(&e, &algorithms, &common.output_dir)?;
            print_comparison(&c, &common.output_dir);
            if let Some(a) = c.any_diverged() {
                let RunStatus::Diverged { sample } = a.status else { unreachable!() };
                return Err(Error::Diverged {
                    scenario: c.config.name.clone(),
                    algorithm: a.algorithm.name().into(),
                    sample,
                });
            }
        }
        Command::Analyze(common) => {
            let e = common.experiment()?;
            let report = analyze(&e.scenario)?;
            print_analysis(&report);
            write_json(&common.output_dir.join(format!("{}.analysis.json", e.scenario.name)), &report)?;
        }
        Command::Sweep { common, parameter, values } => {
            let e = common.experiment()?;
            let algorithms = common.algorithms(&[Algorithm::TwoGradientMomentum])?;
            let rows = sweep(&e, &parameter, &values, &algorithms)?;
            let path = common.output_dir.join(format!("{}.sweep_{parameter}.csv", e.scenario.name));
            write_sweep(&path, &rows)?;
            println!("{:>12} {:<17} {:<12} {:>12} {:>12} {:>10} {:>10}", parameter, "algorithm", "status", "e²", "y²", "conv", "violations");
            for r in &rows {
                println!(
                    "{:>12} {:<17} {:<12} {:>12.4e} {:>12.4e} {:>10} {:>10}",
                    r.value,
                    r.algorithm.name(),
                    r.status,
                    r.steady_state_error_power,
                    r.steady_state_output_power,
                    r.convergence_samples,
                    r.violation_samples
                );
            }
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
