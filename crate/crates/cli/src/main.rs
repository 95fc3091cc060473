//! `stabbond`: build, evolve, measure, analyze and classify stabilizer
//! states through their entanglement bond structure.
//!
//! Sessions are plain JSON files carrying the initial state, the current
//! state and a replayable operation log. Qubits are 1-based everywhere on
//! this surface. Every error path exits nonzero after printing a single
//! machine-readable `{"error": ...}` line to stderr.

use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use rand::rngs::OsRng;
use rand::{RngCore, SeedableRng, TryRngCore};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use stabbond_core::bond::{
    bell_extraction as _, bonds, compact, core_group, entangled_partition, pauli_persistency,
    BondError,
};
use stabbond_core::catalog::{classify_bond_structures, graph_state, NamedState};
use stabbond_core::dot::{color_multigraph_dot, compact_multigraph_dot};
use stabbond_core::dynamics::{
    apply_cz, apply_local_clifford, measure, DynamicsError, LocalGate, MeasurementRecord,
    OutcomeChoice,
};
use stabbond_core::group::{QubitId, StabilizerState};
use stabbond_core::iso::{compact_isomorphic, multigraph_isomorphic, IsoError, SearchLimits};
use stabbond_core::json::{
    BondsReport, ClassJson, ClassifyReport, CompactReport, CoreReport, GraphJson, IsoReport,
    MeasureStepJson, PartitionReport, PersistencyReport, RecordJson, StateJson,
};
use stabbond_core::pauli::Sign;

const EXIT_NOT_ISOMORPHIC: u8 = 1;
const EXIT_BUDGET: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_DOMAIN: u8 = 65;

#[derive(Parser)]
#[command(name = "stabbond", version, about = "Stabilizer-group engine for entanglement bond structures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Create a session from a named state or a graph file.
    Build {
        /// Named state: bell | ghz SIZE | cluster SIZE | cluster_b5 | pentagon
        #[arg(long, num_args = 1..=2, value_names = ["NAME", "SIZE"])]
        named: Option<Vec<String>>,
        /// Graph JSON file: {"n": ..., "edges": [[a,b], ...]} (1-based)
        #[arg(long, conflicts_with = "named")]
        graph: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Apply a CZ gate between two qubits.
    ApplyCz {
        a: u32,
        b: u32,
        #[arg(long)]
        session: PathBuf,
        /// Defaults to rewriting the session in place.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Apply a single-qubit Clifford gate (H, S, X, Y or Z).
    ApplyLocal {
        qubit: u32,
        gate: String,
        #[arg(long)]
        session: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Measure one qubit in a Pauli basis, or run a measurement script.
    Measure {
        qubit: Option<u32>,
        /// Z, X or Y.
        basis: Option<String>,
        /// Assert the outcome (+1 or -1). Omitting it takes +1 when free.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "sample")]
        outcome: Option<i8>,
        /// Sample free outcomes instead of pinning them.
        #[arg(long)]
        sample: bool,
        /// Seed for --sample; omitted means OS entropy.
        #[arg(long)]
        seed: Option<u64>,
        /// JSON list of {"qubit", "basis", "outcome"} steps.
        #[arg(long, conflicts_with_all = ["qubit", "basis", "outcome", "sample"])]
        script: Option<PathBuf>,
        #[arg(long)]
        session: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report bonds, compact counts, partition, a core space or persistency.
    Analyze {
        /// bonds | compact | partition | core | persistency
        what: String,
        /// Qubits for `core` (repeat or comma-separate).
        #[arg(long, value_delimiter = ',')]
        about: Vec<u32>,
        #[arg(long)]
        session: PathBuf,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Additionally write a Graphviz DOT rendering (bonds, compact, core).
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Compare the bond structures of two sessions.
    Iso {
        a: PathBuf,
        b: PathBuf,
        /// Compare compacted bond counts instead of full multigraphs.
        #[arg(long)]
        compact: bool,
    },
    /// Classify all connected n-qubit graph states by bond structure.
    Classify {
        n: usize,
        /// Output directory for per-class DOT files and the summary.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
}

struct Failure {
    code: String,
    message: String,
    exit: u8,
}

impl Failure {
    fn new(code: &str, message: impl Display, exit: u8) -> Self {
        Failure { code: code.to_string(), message: message.to_string(), exit }
    }

    fn usage(message: impl Display) -> Self {
        Self::new("usage", message, EXIT_USAGE)
    }

    fn parse(message: impl Display) -> Self {
        Self::new("parse", message, EXIT_USAGE)
    }

    fn domain(code: &str, message: impl Display) -> Self {
        Self::new(code, message, EXIT_DOMAIN)
    }

    fn budget(message: impl Display) -> Self {
        Self::new("budget_exceeded", message, EXIT_BUDGET)
    }
}

fn dynamics_failure(err: DynamicsError) -> Failure {
    match &err {
        DynamicsError::UnsupportedBasis(_) | DynamicsError::UnknownGate(_) => {
            Failure::usage(err)
        }
        DynamicsError::ContradictsDeterminedOutcome { .. } => {
            Failure::domain("contradicted_outcome", err)
        }
        _ => Failure::domain("invalid_operation", err),
    }
}

fn bond_failure(err: BondError) -> Failure {
    match &err {
        BondError::BudgetExceeded { .. } => Failure::budget(err),
        BondError::SearchTooLarge { .. } => Failure::usage(err),
        _ => Failure::domain("invalid_operation", err),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = err.print();
                return ExitCode::SUCCESS;
            }
            report_failure(&Failure::usage(err.to_string().lines().next().unwrap_or("bad usage")));
            return ExitCode::from(EXIT_USAGE);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            report_failure(&failure);
            ExitCode::from(failure.exit)
        }
    }
}

fn report_failure(failure: &Failure) {
    let line = serde_json::json!({ "error": failure.code, "message": failure.message });
    eprintln!("{line}");
}

#[derive(Serialize, Deserialize)]
struct Session {
    initial: StateJson,
    state: StateJson,
    log: Vec<LogEntry>,
}

#[derive(Serialize, Deserialize, Clone)]
#[serde(tag = "op", rename_all = "kebab-case")]
enum LogEntry {
    ApplyCz { a: u32, b: u32 },
    ApplyLocal { qubit: u32, gate: String },
    Measure { qubit: u32, basis: String, outcome: i8, determined: bool },
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text)
        .map_err(|e| Failure::new("io", format!("{}: {e}", path.display()), EXIT_DOMAIN))
}

fn load_session(path: &Path) -> Result<(Session, StabilizerState), Failure> {
    let session: Session = read_json(path)?;
    let state = session.state.to_state().map_err(Failure::parse)?;
    Ok((session, state))
}

fn store_session(
    mut session: Session,
    state: &StabilizerState,
    entries: Vec<LogEntry>,
    path: &Path,
) -> Result<(), Failure> {
    session.state = StateJson::from(state);
    session.log.extend(entries);
    let text = format!("{}\n", serde_json::to_string_pretty(&session).expect("serializable"));
    write_text(path, &text)
}

fn search_limits() -> Result<SearchLimits, Failure> {
    let mut limits = SearchLimits::default();
    if let Ok(value) = std::env::var("STABBOND_BUDGET") {
        let nodes: u64 = value
            .parse()
            .map_err(|_| Failure::usage(format!("STABBOND_BUDGET={value:?} is not a number")))?;
        limits = limits.with_backtrack_nodes(nodes);
    }
    Ok(limits)
}

fn emit_report(report: &impl Serialize, out: Option<&Path>) -> Result<(), Failure> {
    let text = format!("{}\n", serde_json::to_string_pretty(report).expect("serializable"));
    match out {
        Some(path) => write_text(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn state_summary(state: &StabilizerState) -> serde_json::Value {
    serde_json::json!({
        "n": state.n(),
        "m": state.m(),
        "elements": 1u64 << state.m(),
    })
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Build { named, graph, out } => cmd_build(named, graph, &out),
        Command::ApplyCz { a, b, session, out } => cmd_apply_cz(a, b, &session, out.as_deref()),
        Command::ApplyLocal { qubit, gate, session, out } => {
            cmd_apply_local(qubit, &gate, &session, out.as_deref())
        }
        Command::Measure { qubit, basis, outcome, sample, seed, script, session, out } => {
            cmd_measure(qubit, basis, outcome, sample, seed, script, &session, out.as_deref())
        }
        Command::Analyze { what, about, session, out, dot } => {
            cmd_analyze(&what, &about, &session, out.as_deref(), dot.as_deref())
        }
        Command::Iso { a, b, compact } => cmd_iso(&a, &b, compact),
        Command::Classify { n, out, workers } => cmd_classify(n, &out, workers),
    }
}

fn cmd_build(
    named: Option<Vec<String>>,
    graph: Option<PathBuf>,
    out: &Path,
) -> Result<u8, Failure> {
    let state = match (named, graph) {
        (Some(parts), None) => {
            let name = parts[0].clone();
            let size = match parts.get(1) {
                Some(text) => Some(
                    text.parse::<usize>()
                        .map_err(|_| Failure::usage(format!("size {text:?} is not a number")))?,
                ),
                None => None,
            };
            let which = NamedState::parse(&name, size).map_err(Failure::usage)?;
            stabbond_core::catalog::named_state(&which).map_err(Failure::usage)?
        }
        (None, Some(path)) => {
            let graph_json: GraphJson = read_json(&path)?;
            let spec = graph_json.to_spec().map_err(Failure::parse)?;
            graph_state(&spec).map_err(|e| Failure::domain("invalid_graph", e))?
        }
        _ => return Err(Failure::usage("exactly one of --named or --graph is required")),
    };
    let json = StateJson::from(&state);
    let session = Session { initial: json.clone(), state: json, log: Vec::new() };
    let text = format!("{}\n", serde_json::to_string_pretty(&session).expect("serializable"));
    write_text(out, &text)?;
    println!("{}", state_summary(&state));
    Ok(0)
}

fn cmd_apply_cz(a: u32, b: u32, session_path: &Path, out: Option<&Path>) -> Result<u8, Failure> {
    let (session, state) = load_session(session_path)?;
    let next = apply_cz(&state, QubitId(a), QubitId(b)).map_err(dynamics_failure)?;
    store_session(
        session,
        &next,
        vec![LogEntry::ApplyCz { a, b }],
        out.unwrap_or(session_path),
    )?;
    println!("{}", state_summary(&next));
    Ok(0)
}

fn cmd_apply_local(
    qubit: u32,
    gate: &str,
    session_path: &Path,
    out: Option<&Path>,
) -> Result<u8, Failure> {
    let (session, state) = load_session(session_path)?;
    let gate: LocalGate = gate.parse().map_err(dynamics_failure)?;
    let next = apply_local_clifford(&state, QubitId(qubit), gate).map_err(dynamics_failure)?;
    store_session(
        session,
        &next,
        vec![LogEntry::ApplyLocal { qubit, gate: gate.to_string() }],
        out.unwrap_or(session_path),
    )?;
    println!("{}", state_summary(&next));
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_measure(
    qubit: Option<u32>,
    basis: Option<String>,
    outcome: Option<i8>,
    sample: bool,
    seed: Option<u64>,
    script: Option<PathBuf>,
    session_path: &Path,
    out: Option<&Path>,
) -> Result<u8, Failure> {
    let (session, state) = load_session(session_path)?;
    let mut rng: Box<dyn RngCore> = match seed {
        Some(seed) => Box::new(ChaCha8Rng::seed_from_u64(seed)),
        None => Box::new(ChaCha8Rng::seed_from_u64(OsRng.try_next_u64().unwrap_or(0))),
    };

    let steps: Vec<stabbond_core::dynamics::MeasurementStep> = if let Some(path) = script {
        let raw: Vec<MeasureStepJson> = read_json(&path)?;
        raw.iter()
            .map(|s| s.to_step().map_err(Failure::parse))
            .collect::<Result<_, _>>()?
    } else {
        let qubit = qubit.ok_or_else(|| Failure::usage("measure needs QUBIT BASIS or --script"))?;
        let basis = basis.ok_or_else(|| Failure::usage("measure needs QUBIT BASIS or --script"))?;
        let basis = basis.parse().map_err(dynamics_failure)?;
        let choice = match (outcome, sample) {
            (Some(v), false) => match Sign::from_i8(v) {
                Some(sign) => OutcomeChoice::Forced(sign),
                None => return Err(Failure::usage(format!("--outcome must be 1 or -1, got {v}"))),
            },
            (None, true) => OutcomeChoice::Sample,
            (None, false) => OutcomeChoice::FreePlus,
            (Some(_), true) => unreachable!("clap conflicts_with"),
        };
        vec![stabbond_core::dynamics::MeasurementStep { qubit: QubitId(qubit), basis, choice }]
    };

    let mut current = state;
    let mut records: Vec<MeasurementRecord> = Vec::new();
    let mut entries: Vec<LogEntry> = Vec::new();
    let pre_elements = 1u64 << current.m();
    for step in &steps {
        let (next, record) = measure(&current, step.qubit, step.basis, step.choice, rng.as_mut())
            .map_err(dynamics_failure)?;
        entries.push(LogEntry::Measure {
            qubit: record.qubit.0,
            basis: record.basis.to_string(),
            outcome: record.outcome.as_i8(),
            determined: record.determined,
        });
        records.push(record);
        current = next;
    }
    let post_elements = 1u64 << current.m();
    let partition = entangled_partition(&current).map_err(bond_failure)?;
    store_session(session, &current, entries, out.unwrap_or(session_path))?;

    let report = serde_json::json!({
        "pre_elements": pre_elements,
        "post_elements": post_elements,
        "discarded": pre_elements - if records.iter().all(|r| r.determined) { pre_elements } else { post_elements },
        "records": records.iter().map(RecordJson::from).collect::<Vec<_>>(),
        "partition": PartitionReport::from(&partition),
    });
    println!("{}", serde_json::to_string(&report).expect("serializable"));
    Ok(0)
}

fn cmd_analyze(
    what: &str,
    about: &[u32],
    session_path: &Path,
    out: Option<&Path>,
    dot: Option<&Path>,
) -> Result<u8, Failure> {
    let (_, state) = load_session(session_path)?;
    let limits = search_limits()?;
    match what {
        "bonds" => {
            let graph = bonds(&state).map_err(bond_failure)?;
            if let Some(path) = dot {
                write_text(path, &color_multigraph_dot(&graph))?;
            }
            emit_report(&BondsReport::from(&graph), out)?;
        }
        "compact" => {
            let graph = bonds(&state).map_err(bond_failure)?;
            let compacted = compact(&graph);
            if let Some(path) = dot {
                write_text(path, &compact_multigraph_dot(&compacted))?;
            }
            emit_report(&CompactReport::from(&compacted), out)?;
        }
        "partition" => {
            if dot.is_some() {
                return Err(Failure::usage("--dot applies to bonds, compact and core only"));
            }
            let partition = entangled_partition(&state).map_err(bond_failure)?;
            emit_report(&PartitionReport::from(&partition), out)?;
        }
        "core" => {
            if about.is_empty() {
                return Err(Failure::usage("analyze core needs --about with at least one qubit"));
            }
            let qubits: Vec<QubitId> = about.iter().map(|&q| QubitId(q)).collect();
            let core = core_group(&state, &qubits).map_err(bond_failure)?;
            if let Some(path) = dot {
                let graph = bonds(&core.group).map_err(bond_failure)?;
                write_text(path, &color_multigraph_dot(&graph))?;
            }
            let report = CoreReport::build(&core)
                .map_err(|e| Failure::domain("invalid_operation", e))?;
            emit_report(&report, out)?;
        }
        "persistency" => {
            if dot.is_some() {
                return Err(Failure::usage("--dot applies to bonds, compact and core only"));
            }
            let measurements = pauli_persistency(&state, &limits).map_err(bond_failure)?;
            emit_report(&PersistencyReport { measurements }, out)?;
        }
        other => {
            return Err(Failure::usage(format!(
                "unknown analysis {other:?} (expected bonds, compact, partition, core or persistency)"
            )))
        }
    }
    Ok(0)
}

fn cmd_iso(a: &Path, b: &Path, use_compact: bool) -> Result<u8, Failure> {
    let (_, state_a) = load_session(a)?;
    let (_, state_b) = load_session(b)?;
    let limits = search_limits()?;
    let graph_a = bonds(&state_a).map_err(bond_failure)?;
    let graph_b = bonds(&state_b).map_err(bond_failure)?;
    let report = if use_compact {
        match compact_isomorphic(&compact(&graph_a), &compact(&graph_b), &limits) {
            Ok(witness) => IsoReport::from_compact(witness.as_ref()),
            Err(IsoError::BudgetExceeded { nodes }) => {
                return Err(Failure::budget(format!("exceeded after {nodes} nodes")))
            }
        }
    } else {
        match multigraph_isomorphic(&graph_a, &graph_b, &limits) {
            Ok(witness) => IsoReport::from_multigraph(witness.as_ref()),
            Err(IsoError::BudgetExceeded { nodes }) => {
                return Err(Failure::budget(format!("exceeded after {nodes} nodes")))
            }
        }
    };
    let isomorphic = report.isomorphic;
    println!("{}", serde_json::to_string(&report).expect("serializable"));
    Ok(if isomorphic { 0 } else { EXIT_NOT_ISOMORPHIC })
}

fn cmd_classify(n: usize, out_dir: &Path, workers: usize) -> Result<u8, Failure> {
    if !(2..=6).contains(&n) {
        return Err(Failure::usage(format!("classify supports 2..=6 qubits, got {n}")));
    }
    let limits = search_limits()?;
    let classification = classify_bond_structures(n, &limits, workers.max(1))
        .map_err(|e| Failure::domain("invalid_operation", e))?;
    std::fs::create_dir_all(out_dir)
        .map_err(|e| Failure::new("io", format!("{}: {e}", out_dir.display()), EXIT_DOMAIN))?;
    for (index, class) in classification.classes.iter().enumerate() {
        let dot_path = out_dir.join(format!("class_{:02}.dot", index + 1));
        write_text(&dot_path, &color_multigraph_dot(&class.multigraph))?;
    }
    let report = ClassifyReport {
        n,
        class_count: classification.classes.len(),
        classes: classification
            .classes
            .iter()
            .map(|c| ClassJson {
                representative: GraphJson::from_spec(&c.representative),
                members: c.members.iter().map(GraphJson::from_spec).collect(),
            })
            .collect(),
        unclassified: classification
            .unclassified
            .iter()
            .map(GraphJson::from_spec)
            .collect(),
    };
    let text = format!("{}\n", serde_json::to_string_pretty(&report).expect("serializable"));
    write_text(&out_dir.join("summary.json"), &text)?;
    print!("{text}");
    if !classification.budget_failures.is_empty() {
        let pairs: Vec<serde_json::Value> = classification
            .budget_failures
            .iter()
            .map(|f| {
                serde_json::json!({
                    "graph": GraphJson::from_spec(&f.graph),
                    "class_representative": GraphJson::from_spec(&f.class_representative),
                    "nodes": f.nodes,
                })
            })
            .collect();
        let line = serde_json::json!({
            "error": "budget_exceeded",
            "message": format!("{} pairwise comparisons ran out of budget", pairs.len()),
            "pairs": pairs,
        });
        eprintln!("{line}");
        return Ok(EXIT_BUDGET);
    }
    Ok(0)
}
