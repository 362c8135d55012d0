use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use robsyn::certificates::{check_clf, check_rank, construct_clf_from_strategy, sigma_bound_from_certificate};
use robsyn::fault::{compute_fault_bound, exhaustive_adversary_search, simulate_run, Adversary, DEFAULT_SEARCH_CAP};
use robsyn::io::document::{parse_document, parse_document_unvalidated, serialize_document};
use robsyn::io::dot::export_dot;
use robsyn::io::formats::{parse_certificate, parse_strategy, serialize_certificate, serialize_strategy};
use robsyn::io::generators::{gray_code, leader_election, running_example, ElectionRule};
use robsyn::io::report::{certificate_json, fault_bound_json, robustness_json, search_json, simulation_json, to_text};
use robsyn::model::{check_coreachability, validate_automaton};
use robsyn::num::parse_rat;
use robsyn::robustness::{synthesize_for, verify_for};
use robsyn::{MetricAutomaton, StateId, Strategy};

#[derive(Parser)]
#[command(name = "robsyn", version, about = "Robust strategy synthesis for metric automata")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check metric axioms, the disturbance bound and coreachability.
    Validate { automaton: PathBuf },
    /// Print the document in canonical form.
    Fmt { automaton: PathBuf },
    /// Compute an optimally robust strategy.
    Synth {
        automaton: PathBuf,
        /// Also write the strategy to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute the robustness of a given strategy.
    Verify {
        automaton: PathBuf,
        #[arg(long)]
        strategy: PathBuf,
    },
    /// Check a rank certificate and report its σ bound. With `--strategy`, a
    /// certificate is constructed from the strategy instead.
    Certify {
        automaton: PathBuf,
        #[arg(long, conflicts_with = "strategy", required_unless_present = "strategy")]
        certificate: Option<PathBuf>,
        #[arg(long)]
        strategy: Option<PathBuf>,
        /// Coefficient of η used when constructing.
        #[arg(long, default_value = "1", requires = "strategy")]
        eta: String,
        /// Write the constructed certificate to this file.
        #[arg(long, requires = "strategy")]
        out: Option<PathBuf>,
    },
    /// Compute the fault-spacing bound N and optionally model check it.
    FaultBound {
        automaton: PathBuf,
        #[arg(long)]
        strategy: PathBuf,
        /// Run the exhaustive adversary search at the computed N.
        #[arg(long)]
        check: bool,
        #[arg(long, default_value_t = DEFAULT_SEARCH_CAP)]
        cap: usize,
    },
    /// Simulate a strategy against a nominal, random or scripted adversary.
    Simulate {
        automaton: PathBuf,
        #[arg(long)]
        strategy: PathBuf,
        /// Random faults at least this many transitions apart.
        #[arg(long, conflicts_with = "script")]
        n_bound: Option<usize>,
        /// Faults as `t:state` pairs separated by commas or whitespace, or a file holding them.
        #[arg(long)]
        script: Option<String>,
        /// Minimum spacing enforced on a script.
        #[arg(long, default_value_t = 0, requires = "script")]
        spacing: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        steps: usize,
    },
    /// Write a Graphviz rendering of the automaton.
    ExportDot {
        automaton: PathBuf,
        #[arg(long)]
        strategy: Option<PathBuf>,
    },
    /// Print one of the bundled example automata.
    Example {
        #[command(subcommand)]
        which: Example,
    },
}

#[derive(Subcommand)]
enum Example {
    /// The seven-state running example.
    Running {
        /// Büchi variant with q6 looping back.
        #[arg(long)]
        buchi: bool,
    },
    GrayCode {
        #[arg(long)]
        bits: usize,
    },
    LeaderElection {
        /// min, max or floor-avg.
        #[arg(long)]
        rule: String,
    },
}

/// Usage and parse failures exit with 2, analysis verdicts with 0 or 1.
enum Failure {
    Usage(String),
}

type Outcome = Result<bool, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<MetricAutomaton, Failure> {
    parse_document(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_strategy(a: &MetricAutomaton, path: &Path) -> Result<Strategy, Failure> {
    parse_strategy(a, &read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn emit(v: &Value) {
    print!("{}", to_text(v));
}

fn analysis_error(a: &MetricAutomaton, e: robsyn::AnalysisError) -> Outcome {
    emit(&json!({ "error": e.describe(a) }));
    Ok(false)
}

fn parse_script(a: &MetricAutomaton, spec: &str) -> Result<Vec<(usize, StateId)>, Failure> {
    let text = if Path::new(spec).is_file() { read(Path::new(spec))? } else { spec.to_string() };
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|item| {
            let (t, q) = item
                .split_once(':')
                .ok_or_else(|| Failure::Usage(format!("script entry `{item}` is not `t:state`")))?;
            let t = t.parse().map_err(|_| Failure::Usage(format!("bad transition number `{t}`")))?;
            let q = a.state_id(q).ok_or_else(|| Failure::Usage(format!("unknown state `{q}`")))?;
            Ok((t, q))
        })
        .collect()
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Validate { automaton } => {
            let text = read(&automaton)?;
            let a = parse_document_unvalidated(&text).map_err(|e| Failure::Usage(format!("{}: {e}", automaton.display())))?;
            let mut report = validate_automaton(&a);
            report.violations.extend(check_coreachability(&a).violations);
            let (warnings, errors): (Vec<_>, Vec<_>) = report.violations.iter().partition(|v| v.is_warning());
            emit(&json!({
                "valid": errors.is_empty(),
                "errors": errors.iter().map(|v| v.describe(&a)).collect::<Vec<_>>(),
                "warnings": warnings.iter().map(|v| v.describe(&a)).collect::<Vec<_>>(),
            }));
            Ok(errors.is_empty())
        }
        Command::Fmt { automaton } => {
            print!("{}", serialize_document(&load(&automaton)?));
            Ok(true)
        }
        Command::Synth { automaton, out } => {
            let a = load(&automaton)?;
            match synthesize_for(&a) {
                Ok(r) => {
                    if let (Some(path), Some(s)) = (out, &r.strategy) {
                        write(&path, &serialize_strategy(&a, s))?;
                    }
                    emit(&robustness_json(&a, &r));
                    Ok(r.strategy.is_some() && r.certified)
                }
                Err(e) => analysis_error(&a, e),
            }
        }
        Command::Verify { automaton, strategy } => {
            let a = load(&automaton)?;
            let s = load_strategy(&a, &strategy)?;
            match verify_for(&a, &s) {
                Ok(r) => {
                    emit(&robustness_json(&a, &r));
                    Ok(r.certified)
                }
                Err(e) => analysis_error(&a, e),
            }
        }
        Command::Certify { automaton, certificate, strategy, eta, out } => {
            let a = load(&automaton)?;
            let cert = match (certificate, strategy) {
                (Some(path), _) => parse_certificate(&a, &read(&path)?)
                    .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?,
                (None, Some(path)) => {
                    let s = load_strategy(&a, &path)?;
                    let eta = parse_rat(&eta).map_err(|e| Failure::Usage(format!("--eta: {e}")))?;
                    match construct_clf_from_strategy(&a, &s, eta) {
                        Ok(c) => c,
                        Err(e) => return analysis_error(&a, e),
                    }
                }
                (None, None) => return Err(Failure::Usage("give --certificate or --strategy".into())),
            };
            if let Some(path) = out {
                write(&path, &serialize_certificate(&a, &cert))?;
            }
            let check = if cert.eta_coeff.is_some() { check_clf(&a, &cert) } else { check_rank(&a, &cert) };
            let check = match check {
                Ok(c) => c,
                Err(e) => return analysis_error(&a, e),
            };
            let bound = if check.is_valid() { sigma_bound_from_certificate(&a, &cert).ok() } else { None };
            emit(&certificate_json(&a, &check, bound.as_ref()));
            Ok(check.is_valid() && bound.is_some_and(|b| b.certified))
        }
        Command::FaultBound { automaton, strategy, check, cap } => {
            let a = load(&automaton)?;
            let s = load_strategy(&a, &strategy)?;
            let b = match compute_fault_bound(&a, &s) {
                Ok(b) => b,
                Err(e) => return analysis_error(&a, e),
            };
            let mut v = fault_bound_json(&a, &b);
            let mut ok = b.certified;
            if check {
                if let Some(n) = b.n {
                    match exhaustive_adversary_search(&a, &s, n, cap) {
                        Ok(out) => {
                            ok &= out.violation.is_none();
                            v["search"] = search_json(&a, &out);
                        }
                        Err(e) => return analysis_error(&a, e),
                    }
                }
            }
            emit(&v);
            Ok(ok)
        }
        Command::Simulate { automaton, strategy, n_bound, script, spacing, seed, steps } => {
            let a = load(&automaton)?;
            let s = load_strategy(&a, &strategy)?;
            let adversary = match (n_bound, script) {
                (Some(n), _) => Adversary::Random { seed, n_bound: n },
                (None, Some(text)) => Adversary::Scripted { faults: parse_script(&a, &text)?, n_bound: spacing },
                (None, None) => Adversary::Nominal,
            };
            match simulate_run(&a, &s, &adversary, steps) {
                Ok(r) => {
                    emit(&simulation_json(&a, &r));
                    Ok(r.accepted)
                }
                Err(e) => analysis_error(&a, e),
            }
        }
        Command::ExportDot { automaton, strategy } => {
            let a = load(&automaton)?;
            let s = strategy.map(|p| load_strategy(&a, &p)).transpose()?;
            print!("{}", export_dot(&a, s.as_ref(), None));
            Ok(true)
        }
        Command::Example { which } => {
            let a = match which {
                Example::Running { buchi } => running_example(buchi),
                Example::GrayCode { bits } => gray_code(bits).map_err(|e| Failure::Usage(e.to_string()))?,
                Example::LeaderElection { rule } => {
                    let rule: ElectionRule = rule.parse().map_err(|e: robsyn::io::generators::GeneratorError| Failure::Usage(e.to_string()))?;
                    leader_election(rule)
                }
            };
            print!("{}", serialize_document(&a));
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
