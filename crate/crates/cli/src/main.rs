//! `skelsynth`: synthesize and check skeletons of LTL specifications.
//!
//! Exit codes: 0 success, 1 negative verdict (no skeleton, counterexample),
//! 2 usage or parse error, 3 resource limit, 4 internal failure.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use skelsynth::automata::{AutomatonError, Limits};
use skelsynth::learning::{lstar_synthesize, LearnLimits, NoSkeletonWitness, SynthesisResult};
use skelsynth::ltl::{Partition, SpecFile};
use skelsynth::membership::Membership;
use skelsynth::minlang::SpecAutomata;
use skelsynth::oracle::MinTrace;
use skelsynth::skeleton::{model_check, Skeleton, Verdict};
use skelsynth::threeval::{
    format_input_lasso, format_open_lasso, format_word, parse_input_lasso, parse_raw_word, OpenLetter,
};

#[derive(Parser)]
#[command(name = "skelsynth", version, about = "Skeletons of LTL specifications: which outputs are forced, which are open")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Learn the minimal skeleton of a specification.
    Synth {
        spec: PathBuf,
        #[command(flatten)]
        partition: PartitionArgs,
        #[command(flatten)]
        limits: LimitArgs,
        /// Also write the skeleton JSON to this file.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the skeleton in DOT to this file.
        #[arg(long)]
        dot: Option<PathBuf>,
        /// Seed for the letter enumeration order.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write learner statistics and timing to this file.
        #[arg(long)]
        stats_json: Option<PathBuf>,
    },
    /// Check that a skeleton is the skeleton of a specification.
    Check {
        spec: PathBuf,
        skeleton: PathBuf,
        #[command(flatten)]
        partition: PartitionArgs,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Decide whether a finite open word is a bad prefix.
    Member {
        spec: PathBuf,
        word: String,
        #[command(flatten)]
        partition: PartitionArgs,
    },
    /// Print the minimal trace for an input lasso.
    Mintrace {
        spec: PathBuf,
        #[arg(value_name = "INPUT_LASSO")]
        input_lasso: String,
        #[command(flatten)]
        partition: PartitionArgs,
    },
    /// Render a skeleton file as DOT.
    Export {
        skeleton: PathBuf,
        /// Output file; standard output when absent.
        dot_out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct PartitionArgs {
    /// Comma-separated input propositions, replacing the spec's declaration.
    #[arg(long, value_delimiter = ',')]
    inputs: Option<Vec<String>>,
    /// Comma-separated output propositions, replacing the spec's declaration.
    #[arg(long, value_delimiter = ',')]
    outputs: Option<Vec<String>>,
}

#[derive(Args)]
struct LimitArgs {
    #[arg(long, default_value_t = 1_000_000)]
    max_states: usize,
    #[arg(long, default_value_t = 1_000_000)]
    max_queries: usize,
    #[arg(long)]
    timeout_s: Option<f64>,
}

struct Failure {
    code: u8,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

impl From<AutomatonError> for Failure {
    fn from(e: AutomatonError) -> Self {
        let code = if matches!(e, AutomatonError::ResourceLimit { .. }) { 3 } else { 4 };
        Failure { code, message: e.to_string() }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("skelsynth: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure { code: 4, message: format!("{}: {e}", path.display()) })
}

fn load_spec(path: &Path, p: PartitionArgs) -> Result<SpecFile, Failure> {
    let text = read(path)?;
    SpecFile::parse(&text, (p.inputs, p.outputs)).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_skeleton(path: &Path) -> Result<Skeleton, Failure> {
    Skeleton::from_json(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

impl LimitArgs {
    fn learn(&self) -> LearnLimits {
        LearnLimits {
            max_states: self.max_states,
            max_queries: self.max_queries,
            timeout: self.timeout_s.map(Duration::from_secs_f64),
        }
    }

    fn automata(&self) -> Limits {
        Limits { max_states: self.max_states, deadline: self.timeout_s.map(|s| Instant::now() + Duration::from_secs_f64(s)) }
    }
}

fn run(command: Command) -> Result<u8, Failure> {
    match command {
        Command::Synth { spec, partition, limits, out, dot, seed, stats_json } => {
            let spec = load_spec(&spec, partition)?;
            synth(&spec, &limits, out.as_deref(), dot.as_deref(), seed, stats_json.as_deref())
        }
        Command::Check { spec, skeleton, partition, limits } => {
            let spec = load_spec(&spec, partition)?;
            let s = load_skeleton(&skeleton)?;
            same_partition(s.partition(), &spec.partition)?;
            let automata = SpecAutomata::new(&spec.formula, &spec.partition);
            match model_check(&s, &automata, &limits.automata())? {
                Verdict::Yes => {
                    println!("yes");
                    Ok(0)
                }
                Verdict::No(cex) => {
                    println!("counterexample: {}", format_open_lasso(&cex.word, &spec.partition));
                    let names = |qs: &[u32]| qs.iter().map(|q| s.name(*q).to_string()).collect::<Vec<_>>().join(" ");
                    println!("path: {} ({})^w", names(&cex.stem_states), names(&cex.cycle_states));
                    Ok(1)
                }
            }
        }
        Command::Member { spec, word, partition } => {
            let spec = load_spec(&spec, partition)?;
            let raw = parse_raw_word(&word, &spec.partition).map_err(|e| usage(format!("word: {e}")))?;
            let automata = Arc::new(SpecAutomata::new(&spec.formula, &spec.partition));
            let m = Membership::new(automata, &Limits::default())?;
            let verdict = m.is_bad_raw(&raw);
            println!("{}", if verdict.is_bad { "bad" } else { "not-bad" });
            if let Some(r) = verdict.reason {
                let expected = match r.expected.expected() {
                    Some(v) => format!("must be {}", v.symbol()),
                    None => "admits no model".into(),
                };
                eprintln!("position {}: {} {expected}", r.position, spec.partition.name(r.prop));
            }
            Ok(0)
        }
        Command::Mintrace { spec, input_lasso, partition } => {
            let spec = load_spec(&spec, partition)?;
            let lasso = parse_input_lasso(&input_lasso, &spec.partition).map_err(|e| usage(format!("inputs: {e}")))?;
            let automata = SpecAutomata::new(&spec.formula, &spec.partition);
            match automata.oracle().min_trace(&lasso) {
                MinTrace::Trace(t) => println!("{}", format_open_lasso(&t, &spec.partition)),
                MinTrace::NoModel => println!("no-model"),
            }
            Ok(0)
        }
        Command::Export { skeleton, dot_out } => {
            let dot = load_skeleton(&skeleton)?.to_dot();
            match dot_out {
                Some(path) => write(&path, &dot)?,
                None => print!("{dot}"),
            }
            Ok(0)
        }
    }
}

fn same_partition(a: &Partition, b: &Partition) -> Result<(), Failure> {
    if a.inputs() == b.inputs() && a.outputs() == b.outputs() {
        Ok(())
    } else {
        Err(usage(format!(
            "skeleton propositions {:?}/{:?} differ from the spec's {:?}/{:?}",
            a.inputs(),
            a.outputs(),
            b.inputs(),
            b.outputs()
        )))
    }
}

fn prefix_text(u: &[OpenLetter], p: &Partition) -> String {
    if u.is_empty() {
        "the empty prefix".into()
    } else {
        format_word(u, p)
    }
}

fn letter_text(l: &OpenLetter, p: &Partition) -> String {
    format_word(std::slice::from_ref(l), p)
}

fn synth(
    spec: &SpecFile,
    limits: &LimitArgs,
    out: Option<&Path>,
    dot: Option<&Path>,
    seed: u64,
    stats_path: Option<&Path>,
) -> Result<u8, Failure> {
    let p = &spec.partition;
    let run = lstar_synthesize(&spec.formula, p, seed, &limits.learn())
        .map_err(|e| Failure { code: 4, message: e.to_string() })?;
    let mut stats = serde_json::to_value(&run.stats).expect("stats serialize");
    let wall = stats.as_object_mut().and_then(|m| m.remove("wall_time_ms")).unwrap_or(Value::Null);
    let (code, mut report) = match &run.result {
        SynthesisResult::Skeleton(s) => {
            if let Some(path) = out {
                write(path, &format!("{:#}\n", s.to_json()))?;
            }
            if let Some(path) = dot {
                write(path, &s.to_dot())?;
            }
            (0, json!({ "status": "skeleton", "states": s.num_states(), "skeleton": s.to_json() }))
        }
        SynthesisResult::NoSkeleton(NoSkeletonWitness::OutputConflict { u, a1, a2 }) => {
            eprintln!("no skeleton: outputs after {} depend on inputs", prefix_text(u, p));
            (1, json!({
                "status": "no-skeleton",
                "witness": {
                    "kind": "output-conflict",
                    "prefix": format_word(u, p),
                    "letters": [letter_text(a1, p), letter_text(a2, p)],
                },
            }))
        }
        SynthesisResult::NoSkeleton(NoSkeletonWitness::BlockedInput { u, input }) => {
            eprintln!("no skeleton: after {} some input is blocked", prefix_text(u, p));
            let names: Vec<Value> = p
                .inputs()
                .iter()
                .enumerate()
                .map(|(k, n)| json!({ n.as_str(): input >> k & 1 == 1 }))
                .collect();
            (1, json!({
                "status": "no-skeleton",
                "witness": { "kind": "blocked-input", "prefix": format_word(u, p), "input": names },
            }))
        }
        SynthesisResult::NoSkeletonUnrealizableInput(inputs) => {
            eprintln!("no skeleton: some input sequence has no model");
            (1, json!({
                "status": "no-skeleton",
                "witness": { "kind": "no-model-input", "inputs": format_input_lasso(inputs, p) },
            }))
        }
        SynthesisResult::ResourceLimit(m) => {
            eprintln!("resource limit: {m}");
            (3, json!({ "status": "resource-limit", "detail": m }))
        }
    };
    report["stats"] = stats.clone();
    report["timing"] = json!({ "wall_time_ms": wall });
    let _ = writeln!(std::io::stdout(), "{report:#}");
    if let Some(path) = stats_path {
        stats["wall_time_ms"] = wall;
        write(path, &format!("{stats:#}\n"))?;
    }
    Ok(code)
}
