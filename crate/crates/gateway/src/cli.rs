//! The `robofoil` command line.
//!
//! Exit status: 0 on success, 2 for invalid input (including unknown sessions and closed
//! ones), 3 when the domain has no solution or the foil is infeasible.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use robofoil_core::compare::PercentFormula;
use robofoil_core::explain::{explain_foil, ExplainConfig};
use robofoil_core::foil::build_foil;
use robofoil_core::scenario::{catalog_scenario, generate_scenario, ErrorTuple};
use robofoil_core::fixtures::ModelError;
use robofoil_core::wire::{
    domain_to_json, foil_from_json, load_domain, scenario_from_json, scenario_to_json, solution_from_json, solution_to_json,
    FactorSetWire, FoilOutcomeWire, MetricsWire,
};
use robofoil_core::{fixtures, solve, Scenario};

use crate::error::{GatewayError, Result};
use crate::http::{router, scenario_summaries};
use crate::session::{FinalVerdict, Judgment, Session, Status};
use crate::store::Store;

#[derive(Debug, Parser)]
#[command(name = "robofoil", version, about = "Contrastive explanations for multi-robot task allocation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve a domain file and print the solution.
    Solve { domain: PathBuf },
    /// Schedule a foil against a solution and print the outcome.
    Foil { domain: PathBuf, solution: PathBuf, foil: PathBuf },
    /// Build, compare and explain a foil.
    Explain {
        domain: PathBuf,
        solution: PathBuf,
        foil: PathBuf,
        #[command(flatten)]
        opts: ExplainOpts,
        /// Print outcome, factors and explanation as JSON instead of the plain text.
        #[arg(long)]
        json: bool,
    },
    /// Print a built-in domain file.
    Fixture {
        /// Seed of the emergency-response layout.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// A fixed site with one seeded modelling error.
        #[arg(long, value_enum, conflicts_with = "seed")]
        model_error: Option<ModelErrorArg>,
    },
    #[command(subcommand)]
    Scenario(ScenarioCmd),
    /// Report repair metrics for stored session files.
    Metrics {
        #[arg(required = true)]
        sessions: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Also write repair actions against remaining errors, one row per session, as CSV.
        #[arg(long)]
        efficiency: Option<PathBuf>,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[command(flatten)]
        data: DataDir,
    },
    /// Drive a stored session without the HTTP service.
    Session {
        #[command(flatten)]
        data: DataDir,
        #[command(subcommand)]
        command: SessionCmd,
    },
}

#[derive(Debug, Args)]
pub struct DataDir {
    /// Directory holding session files.
    #[arg(long = "data", env = "ROBOFOIL_DATA", default_value = "robofoil-data")]
    pub path: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExplainOpts {
    /// Critical threshold on |percent difference|.
    #[arg(long, default_value_t = robofoil_core::DEFAULT_Z)]
    pub z: f64,
    /// Use (foil - system) / system instead of the symmetric percent difference.
    #[arg(long)]
    pub relative: bool,
    /// Show every trait in capability lines.
    #[arg(long)]
    pub all_traits: bool,
}

#[derive(Debug, Subcommand)]
pub enum ScenarioCmd {
    /// Inject seeded errors into a ground-truth domain and print the scenario file.
    Gen {
        /// Robot-trait, task-requirement and speed error counts, e.g. 3,1,1.
        #[arg(long, value_parser = parse_tuple)]
        tuple: ErrorTuple,
        #[arg(long)]
        seed: u64,
        /// Ground-truth domain file; defaults to the emergency-response layout for `seed`.
        #[arg(long)]
        truth: Option<PathBuf>,
        #[arg(long)]
        label: Option<String>,
    },
    /// List the shipped scenarios.
    List,
    /// Print a shipped scenario file.
    Show { name: String },
}

#[derive(Debug, Subcommand)]
pub enum SessionCmd {
    /// Start a session from a shipped scenario or a scenario file.
    Create {
        #[arg(long, conflicts_with = "scenario_file", required_unless_present = "scenario_file")]
        scenario: Option<String>,
        #[arg(long)]
        scenario_file: Option<PathBuf>,
        #[arg(long, value_enum)]
        initial_verdict: Option<JudgmentArg>,
    },
    Show { id: String },
    /// Ask about a foil (a JSON list of {robot, task, op}).
    Foil { id: String, foil: PathBuf },
    /// Apply one domain edit ({site, value}) and re-solve.
    Patch { id: String, edit: PathBuf },
    Finalize {
        id: String,
        #[arg(long, value_enum)]
        verdict: VerdictArg,
    },
    Metrics { id: String },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModelErrorArg {
    RobotTraitError,
    RequirementError,
    SpeedError,
    Combined,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum JudgmentArg {
    Correct,
    Incorrect,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum VerdictArg {
    DeclaredCorrect,
    GaveUp,
}

fn parse_tuple(s: &str) -> std::result::Result<ErrorTuple, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [a, b, c] = parts.as_slice() else {
        return Err(format!("expected three comma-separated counts, got {s:?}"));
    };
    let n = |v: &str| v.parse::<usize>().map_err(|e| format!("{v:?}: {e}"));
    Ok(ErrorTuple::new(n(a)?, n(b)?, n(c)?))
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| GatewayError::Invalid(format!("cannot read {}: {e}", path.display())))
}

fn print_json(out: &mut dyn Write, value: &impl Serialize) -> Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(value)?)?;
    Ok(())
}

fn explain_config(opts: &ExplainOpts, d: &robofoil_core::ProblemDomain) -> Result<ExplainConfig> {
    if !opts.z.is_finite() || opts.z < 0.0 {
        return Err(GatewayError::Invalid(format!("threshold must be a non-negative number, got {}", opts.z)));
    }
    let base = ExplainConfig::for_domain(d);
    Ok(ExplainConfig {
        capability_traits: if opts.all_traits { None } else { base.capability_traits },
        z: opts.z,
        formula: if opts.relative { PercentFormula::Relative } else { PercentFormula::Symmetric },
    })
}

fn session_metrics(s: &Session) -> Result<MetricsWire> {
    s.current_metrics()
}

#[derive(Serialize)]
struct ExplainReport {
    outcome: FoilOutcomeWire,
    factors: Option<FactorSetWire>,
    explanation: robofoil_core::Explanation,
}

#[derive(Serialize)]
struct MetricsReport<'a> {
    session: &'a str,
    scenario: &'a str,
    status: Status,
    metrics: MetricsWire,
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<ExitCode> {
    match cli.command {
        Command::Solve { domain } => {
            let d = load_domain(&read(&domain)?)?;
            let s = solve(&d)?;
            writeln!(out, "{}", solution_to_json(&d, &s))?;
        }
        Command::Foil { domain, solution, foil } => {
            let d = load_domain(&read(&domain)?)?;
            let s = solution_from_json(&d, &read(&solution)?)?;
            let q = foil_from_json(&d, &read(&foil)?)?;
            let outcome = build_foil(&d, &s, &q)?;
            print_json(out, &FoilOutcomeWire::from_outcome(&d, &outcome))?;
            if outcome.cause().is_some() {
                return Ok(ExitCode::from(3));
            }
        }
        Command::Explain { domain, solution, foil, opts, json } => {
            let d = load_domain(&read(&domain)?)?;
            let s = solution_from_json(&d, &read(&solution)?)?;
            let q = foil_from_json(&d, &read(&foil)?)?;
            let cfg = explain_config(&opts, &d)?;
            let (outcome, factors, explanation) = explain_foil(&d, &s, &q, &cfg)?;
            if json {
                print_json(
                    out,
                    &ExplainReport {
                        outcome: FoilOutcomeWire::from_outcome(&d, &outcome),
                        factors: factors.as_ref().map(|f| FactorSetWire::from_factors(&d, f)),
                        explanation,
                    },
                )?;
            } else {
                writeln!(out, "{}", explanation.plain_text)?;
            }
        }
        Command::Fixture { seed, model_error } => {
            let d = match model_error {
                None => fixtures::emergency_response(seed),
                Some(row) => fixtures::model_error(match row {
                    ModelErrorArg::RobotTraitError => ModelError::RobotTraitError,
                    ModelErrorArg::RequirementError => ModelError::RequirementError,
                    ModelErrorArg::SpeedError => ModelError::SpeedError,
                    ModelErrorArg::Combined => ModelError::Combined,
                }),
            };
            writeln!(out, "{}", domain_to_json(&d))?;
        }
        Command::Scenario(cmd) => match cmd {
            ScenarioCmd::Gen { tuple, seed, truth, label } => {
                let truth = match truth {
                    Some(p) => load_domain(&read(&p)?)?,
                    None => fixtures::emergency_response(seed),
                };
                let mut sc = generate_scenario(&truth, tuple, seed)?;
                if let Some(l) = label {
                    sc.label = l;
                }
                writeln!(out, "{}", scenario_to_json(&sc))?;
            }
            ScenarioCmd::List => print_json(out, &scenario_summaries())?,
            ScenarioCmd::Show { name } => {
                let sc = catalog_scenario(&name).ok_or_else(|| GatewayError::NotFound(format!("no scenario {name:?}")))?;
                writeln!(out, "{}", scenario_to_json(&sc))?;
            }
        },
        Command::Metrics { sessions, format, efficiency } => {
            let loaded = sessions
                .iter()
                .map(|p| Session::from_json(&read(p)?))
                .collect::<Result<Vec<_>>>()?;
            let metrics = loaded.iter().map(session_metrics).collect::<Result<Vec<_>>>()?;
            match format {
                Format::Json => {
                    let reports: Vec<MetricsReport> = loaded
                        .iter()
                        .zip(&metrics)
                        .map(|(s, m)| MetricsReport {
                            session: &s.id,
                            scenario: &s.scenario.label,
                            status: s.status,
                            metrics: m.clone(),
                        })
                        .collect();
                    print_json(out, &reports)?;
                }
                Format::Csv => {
                    writeln!(out, "session,scenario,{}", MetricsWire::CSV_HEADER)?;
                    for (s, m) in loaded.iter().zip(&metrics) {
                        writeln!(out, "{},{},{}", s.id, s.scenario.label, m.csv_row())?;
                    }
                }
            }
            if let Some(path) = efficiency {
                let mut text = String::from("session,scenario,injected,repair_actions,remaining_errors\n");
                for (s, m) in loaded.iter().zip(&metrics) {
                    text.push_str(&format!(
                        "{},{},{},{},{}\n",
                        s.id,
                        s.scenario.label,
                        s.scenario.injected.len(),
                        m.repair_actions,
                        m.remaining.len()
                    ));
                }
                fs::write(&path, text)?;
            }
        }
        Command::Serve { port, host, data } => {
            let store = Arc::new(Store::open(&data.path)?);
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(async move {
                let listener = tokio::net::TcpListener::bind((host.as_str(), port)).await?;
                eprintln!("listening on http://{}", listener.local_addr()?);
                axum::serve(listener, router(store)).await
            })?;
        }
        Command::Session { data, command } => {
            let store = Store::open(&data.path)?;
            match command {
                SessionCmd::Create { scenario, scenario_file, initial_verdict } => {
                    let sc: Scenario = match (scenario, scenario_file) {
                        (Some(name), _) => catalog_scenario(&name)
                            .ok_or_else(|| GatewayError::NotFound(format!("no scenario {name:?}")))?,
                        (None, Some(path)) => scenario_from_json(&read(&path)?)?,
                        (None, None) => return Err(GatewayError::Invalid("no scenario given".into())),
                    };
                    let initial = initial_verdict.map(|j| match j {
                        JudgmentArg::Correct => Judgment::Correct,
                        JudgmentArg::Incorrect => Judgment::Incorrect,
                    });
                    let s = store.create(&sc, initial)?;
                    writeln!(out, "{}", s.to_json())?;
                }
                SessionCmd::Show { id } => writeln!(out, "{}", store.load(&id)?.to_json())?,
                SessionCmd::Foil { id, foil } => {
                    let changes = serde_json::from_slice(&read(&foil)?)?;
                    let record = store.update(&id, |s| s.post_foil(changes).cloned())?;
                    print_json(out, &record)?;
                }
                SessionCmd::Patch { id, edit } => {
                    let edit = serde_json::from_slice(&read(&edit)?)?;
                    let s = store.update(&id, |s| {
                        s.patch_domain(edit)?;
                        Ok(s.clone())
                    })?;
                    writeln!(out, "{}", s.to_json())?;
                }
                SessionCmd::Finalize { id, verdict } => {
                    let verdict = match verdict {
                        VerdictArg::DeclaredCorrect => FinalVerdict::DeclaredCorrect,
                        VerdictArg::GaveUp => FinalVerdict::GaveUp,
                    };
                    print_json(out, &store.update(&id, |s| s.finalize(verdict))?)?;
                }
                SessionCmd::Metrics { id } => print_json(out, &store.load(&id)?.current_metrics()?)?,
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
