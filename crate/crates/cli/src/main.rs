//! `actorlab`: command-line front end for parsing, running, exploring and
//! deciding properties of actor programs.
//!
//! Exit codes: 0 success or "yes", 1 "no", 2 inapplicable or invalid input,
//! 3 internal fault or exhausted budget.

use std::io::Read;
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value as Json};

use actorlab::cm::{compile_ba, compile_ro, CounterMachine};
use actorlab::deciders::{
    abstract_initial, decide_cs_reachability_with, decide_process_reachability_with,
    decide_termination_with, AnyConfig, Answer, Limits, ReachReport, TerminationReport, Verdict,
};
use actorlab::explore::{explore_within, Bounds, StateSpace};
use actorlab::fragments::{classify, Decidable, FragmentFlags};
use actorlab::json::{any_config_from_json, any_config_to_json, label_json, trace_event};
use actorlab::order::{config_leq, Mode};
use actorlab::semantics::{
    decorate_initial, initial_configuration, omega, run_from, Config, Outcome, Policy, QueueItem,
    Trace,
};
use actorlab::syntax::{check_well_formed, parse_process, parse_program, Program};

#[derive(Parser)]
#[command(name = "actorlab", version, about = "Analyses for a nominal actor calculus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a program and check that it is well formed.
    Check(InputArgs),
    /// Report the syntactic fragments of a program and the applicable decider.
    Classify(InputArgs),
    /// Execute a program under a scheduling policy.
    Run(RunArgs),
    /// Explore the reachable configurations exhaustively, within a bound.
    Explore(ExploreArgs),
    /// Compile a two-counter machine into an actor program.
    CompileCm(CompileArgs),
    /// Decide termination or reachability.
    Decide {
        #[command(subcommand)]
        question: Question,
    },
    /// Compare two configurations in one of the orderings.
    Order(OrderArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Program file, or `-` for standard input.
    file: String,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PolicyArg {
    DeterministicFirst,
    Random,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SemanticsArg {
    Concrete,
    Decorated,
    Abstract,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Concrete,
    Abstract,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Concrete => Mode::Concrete,
            ModeArg::Abstract => Mode::Abstract,
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// Program file, or `-` for standard input.
    file: String,
    #[arg(long, value_enum, default_value_t = PolicyArg::DeterministicFirst)]
    policy: PolicyArg,
    /// Seed of the random policy.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated successor indices to follow instead of a policy.
    #[arg(long, value_delimiter = ',')]
    guide: Option<Vec<usize>>,
    /// Maximum number of steps.
    #[arg(long, default_value_t = 10_000)]
    budget: usize,
    #[arg(long, value_enum, default_value_t = SemanticsArg::Concrete)]
    mode: SemanticsArg,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Include the full configuration in every trace line.
    #[arg(long)]
    full: bool,
}

#[derive(Args)]
struct ExploreArgs {
    /// Program file, or `-` for standard input.
    file: String,
    /// Maximum number of states.
    #[arg(long, default_value_t = 50_000)]
    budget: usize,
    /// Longest queue of a single actor before a state is cut off.
    #[arg(long, default_value_t = 64)]
    max_queue: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Concrete)]
    mode: ModeArg,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Encoding {
    Ba,
    Ro,
}

#[derive(Args)]
struct CompileArgs {
    /// Machine file, or `-` for standard input.
    file: String,
    #[arg(long, value_enum)]
    target: Encoding,
    /// Read the machine as a faulty-register machine.
    #[arg(long)]
    faulty: bool,
}

#[derive(Args)]
struct DecideArgs {
    /// Program file, or `-` for standard input.
    file: String,
    /// Search budget: tree nodes for termination, basis elements for
    /// reachability.
    #[arg(long)]
    budget: Option<usize>,
    /// Print the domination pair or the backward chain.
    #[arg(long)]
    witness: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Worker threads for independent backward searches.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Subcommand)]
enum Question {
    /// Whether every run is finite.
    Termination(DecideArgs),
    /// Whether a configuration above a target, or an actor running a given
    /// process, is reachable.
    Reach {
        #[command(flatten)]
        common: DecideArgs,
        /// Target configuration in JSON (file, or `-` for standard input).
        #[arg(long, conflicts_with = "process", required_unless_present = "process")]
        target: Option<String>,
        /// Target process in source syntax.
        #[arg(long)]
        process: Option<String>,
    },
}

#[derive(Args)]
struct OrderArgs {
    /// Check whether the first configuration is below the second.
    #[arg(long, num_args = 2, value_names = ["A", "B"], required = true)]
    leq: Vec<String>,
    #[arg(long, value_enum, default_value_t = ModeArg::Concrete)]
    mode: ModeArg,
    /// Program whose main-free variables are kept fixed.
    #[arg(long)]
    program: Option<String>,
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

fn invalid(error: anyhow::Error) -> Failure {
    Failure { code: 2, error }
}

fn read_input(path: &str) -> Result<String> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).context("reading standard input")?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).with_context(|| format!("reading {path}"))
    }
}

fn load_program(path: &str) -> Result<Program, Failure> {
    let src = read_input(path).map_err(invalid)?;
    let p = parse_program(&src).map_err(|e| invalid(anyhow!("{e}")))?;
    let diags = check_well_formed(&p);
    if !diags.is_empty() {
        let text: Vec<String> = diags.iter().map(|d| d.to_string()).collect();
        return Err(invalid(anyhow!("{}", text.join("\n"))));
    }
    Ok(p)
}

fn decider_text(d: Decidable) -> &'static str {
    match d {
        Decidable::RoBa => "concrete ordering (read-only fields, bounded actors)",
        Decidable::Sl => "abstract ordering (stateless actors)",
        Decidable::Undecidable => "undecidable fragment, bounded exploration only",
    }
}

fn decider_tag(d: Decidable) -> &'static str {
    match d {
        Decidable::RoBa => "concrete",
        Decidable::Sl => "abstract",
        Decidable::Undecidable => "none",
    }
}

fn fragment_json(f: &FragmentFlags) -> Json {
    json!({ "ba": f.ba, "ro": f.ro, "sl": f.sl, "decider": decider_tag(f.decidable()) })
}

fn print_json(j: &Json) {
    println!("{}", serde_json::to_string(j).expect("JSON values serialize"));
}

fn print_config_text<M: QueueItem>(c: &Config<M>, indent: &str) {
    for (name, t) in &c.actors {
        let state: Vec<String> = t.state.iter().map(|(f, v)| format!("{f}={v}")).collect();
        let queue: Vec<String> = t
            .queue
            .iter()
            .map(|m| match m.target() {
                Some(tg) if tg != name => format!("{}@{tg}", m.message()),
                _ => m.message().to_string(),
            })
            .collect();
        println!(
            "{indent}{name} |> ({}, {{{}}}, [{}])",
            t.process,
            state.join(", "),
            queue.join(", ")
        );
    }
}

fn print_any_text(c: &AnyConfig, indent: &str) {
    match c {
        AnyConfig::Concrete(c) => print_config_text(c, indent),
        AnyConfig::Abstract(c) => print_config_text(c, indent),
    }
}

fn cmd_check(a: &InputArgs) -> Result<u8, Failure> {
    let src = read_input(&a.file).map_err(invalid)?;
    let (ok, messages): (bool, Vec<String>) = match parse_program(&src) {
        Err(e) => (false, e.diagnostics.iter().map(|d| d.to_string()).collect()),
        Ok(p) => {
            let d = check_well_formed(&p);
            (d.is_empty(), d.iter().map(|d| d.to_string()).collect())
        }
    };
    match a.format {
        Format::Json => print_json(&json!({ "ok": ok, "diagnostics": messages })),
        Format::Text => {
            if ok {
                println!("ok");
            }
            for m in &messages {
                println!("{m}");
            }
        }
    }
    Ok(if ok { 0 } else { 2 })
}

fn cmd_classify(a: &InputArgs) -> Result<u8, Failure> {
    let p = load_program(&a.file)?;
    let f = classify(&p);
    match a.format {
        Format::Json => print_json(&fragment_json(&f)),
        Format::Text => {
            println!("{f}");
            println!("decider: {}", decider_text(f.decidable()));
        }
    }
    Ok(0)
}

fn outcome_json(o: &Outcome) -> Json {
    match o {
        Outcome::Quiescent => json!({ "outcome": "quiescent" }),
        Outcome::BudgetExhausted => json!({ "outcome": "budget-exhausted" }),
        Outcome::ScriptEnded => json!({ "outcome": "script-ended" }),
        Outcome::ScriptInvalid { step, index, available } => json!({
            "outcome": "script-invalid", "step": step, "index": index, "available": available
        }),
        Outcome::Error(errs) => json!({
            "outcome": "error",
            "errors": errs.iter().map(|e| json!({
                "actor": e.actor.to_string(), "kind": e.kind.tag(), "detail": e.detail
            })).collect::<Vec<_>>()
        }),
    }
}

fn outcome_text(o: &Outcome) -> String {
    match o {
        Outcome::Quiescent => "quiescent".into(),
        Outcome::BudgetExhausted => "budget exhausted".into(),
        Outcome::ScriptEnded => "script ended".into(),
        Outcome::ScriptInvalid { step, index, available } => {
            format!("script invalid at step {step}: index {index} of {available} successors")
        }
        Outcome::Error(errs) => {
            let e: Vec<String> = errs.iter().map(|e| e.to_string()).collect();
            format!("error: {}", e.join("; "))
        }
    }
}

fn emit_trace<M: QueueItem>(t: &Trace<M>, a: &RunArgs) -> u8 {
    for e in &t.events {
        match a.format {
            Format::Json => print_json(&trace_event(e.step, &e.label, &e.config, a.full)),
            Format::Text => {
                let mut line = format!("{:>5}  {:<7} {}", e.step, e.label.rule.tag(), e.label.actor);
                if let Some((m, tg)) = &e.label.emitted {
                    line.push_str(&format!("  emits {tg}!{m}"));
                }
                println!("{line}");
                if a.full {
                    print_config_text(&e.config, "       ");
                }
            }
        }
    }
    match a.format {
        Format::Json => print_json(&outcome_json(&t.outcome)),
        Format::Text => println!("{} after {} steps", outcome_text(&t.outcome), t.events.len()),
    }
    match t.outcome {
        Outcome::Error(_) => 1,
        Outcome::ScriptInvalid { .. } => 2,
        _ => 0,
    }
}

fn cmd_run(a: &RunArgs) -> Result<u8, Failure> {
    let p = load_program(&a.file)?;
    let policy = match (&a.guide, a.policy) {
        (Some(g), _) => Policy::Guided(g.clone()),
        (None, PolicyArg::DeterministicFirst) => Policy::DeterministicFirst,
        (None, PolicyArg::Random) => Policy::SeededRandom(a.seed),
    };
    Ok(match a.mode {
        SemanticsArg::Concrete => emit_trace(&run_from(&p, initial_configuration(&p), &policy, a.budget), a),
        SemanticsArg::Decorated => {
            let init = decorate_initial(&p).map_err(|e| invalid(anyhow!("{e}")))?;
            emit_trace(&run_from(&p, init, &policy, a.budget), a)
        }
        SemanticsArg::Abstract => {
            let init = decorate_initial(&p).map_err(|e| invalid(anyhow!("{e}")))?;
            emit_trace(&run_from(&p, omega(&init), &policy, a.budget), a)
        }
    })
}

fn space_report<M: QueueItem>(s: &StateSpace<M>, format: Format) -> u8 {
    let terminates = s.terminates();
    let errors = s.erroneous.iter().filter(|&&e| e).count();
    let edges: usize = s.edges.iter().map(Vec::len).sum();
    match format {
        Format::Json => print_json(&json!({
            "states": s.len(),
            "transitions": edges,
            "complete": s.complete,
            "cycle": s.has_cycle(),
            "terminates": terminates,
            "error-states": errors,
        })),
        Format::Text => {
            println!("states: {}", s.len());
            println!("transitions: {edges}");
            println!("complete: {}", if s.complete { "yes" } else { "no (bound reached)" });
            println!("cycle: {}", if s.has_cycle() { "yes" } else { "no" });
            println!("error states: {errors}");
            let t = match terminates {
                Some(true) => "yes",
                Some(false) => "no",
                None => "unknown",
            };
            println!("terminates: {t}");
        }
    }
    0
}

fn cmd_explore(a: &ExploreArgs) -> Result<u8, Failure> {
    let p = load_program(&a.file)?;
    let bounds = Bounds { states: a.budget, queue: a.max_queue, actors: 64 };
    Ok(match a.mode {
        ModeArg::Concrete => space_report(&explore_within(&p, initial_configuration(&p), bounds), a.format),
        ModeArg::Abstract => {
            let init = abstract_initial(&p)
                .ok_or_else(|| invalid(anyhow!("the abstract semantics is defined for stateless programs only")))?;
            space_report(&explore_within(&p, init, bounds), a.format)
        }
    })
}

fn cmd_compile(a: &CompileArgs) -> Result<u8, Failure> {
    let src = read_input(&a.file).map_err(invalid)?;
    let m = CounterMachine::parse(&src, a.faulty).map_err(|e| invalid(anyhow!("{e}")))?;
    let p = match a.target {
        Encoding::Ba => compile_ba(&m),
        Encoding::Ro => compile_ro(&m),
    };
    print!("{p}");
    Ok(0)
}

fn limits(a: &DecideArgs, reach: bool) -> Limits {
    let mut l = Limits { jobs: a.jobs, ..Limits::default() };
    match (a.budget, reach) {
        (Some(b), false) => l.tree_nodes = b,
        (Some(b), true) => l.basis = b,
        (None, _) => {}
    }
    l
}

fn termination_output(r: &TerminationReport, a: &DecideArgs) {
    match a.format {
        Format::Json => {
            let mut o = json!({
                "verdict": r.verdict.tag(),
                "fragment": fragment_json(&r.fragment),
                "nodes": r.nodes,
                "errors": r.errors.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
            });
            if a.witness {
                if let Some(w) = &r.witness {
                    o["witness"] = json!({
                        "ancestor": any_config_to_json(&w.ancestor),
                        "descendant": any_config_to_json(&w.descendant),
                        "path": w.path.iter().map(label_json).collect::<Vec<_>>(),
                    });
                }
            }
            print_json(&o);
        }
        Format::Text => {
            println!("{}", r.verdict.tag());
            if r.verdict == Verdict::Inapplicable {
                println!("fragment: {} (no decider applies)", r.fragment);
            }
            for e in &r.errors {
                println!("error state: {e}");
            }
            if a.witness {
                if let Some(w) = &r.witness {
                    println!("ancestor:");
                    print_any_text(&w.ancestor, "  ");
                    println!("path:");
                    for l in &w.path {
                        println!("  {} {}", l.rule.tag(), l.actor);
                    }
                    println!("descendant:");
                    print_any_text(&w.descendant, "  ");
                }
            }
        }
    }
}

fn reach_output(r: &ReachReport, a: &DecideArgs) {
    match a.format {
        Format::Json => {
            let mut o = json!({
                "answer": r.answer.tag(),
                "fragment": fragment_json(&r.fragment),
                "basis": r.basis_size,
            });
            if a.witness && !r.chain.is_empty() {
                o["chain"] = Json::Array(r.chain.iter().map(any_config_to_json).collect());
            }
            print_json(&o);
        }
        Format::Text => {
            println!("{}", r.answer.tag());
            if r.answer == Answer::Inapplicable {
                println!("fragment: {} (no decider applies)", r.fragment);
            }
            if a.witness {
                for (i, c) in r.chain.iter().enumerate() {
                    println!("chain[{i}]:");
                    print_any_text(c, "  ");
                }
            }
        }
    }
}

fn cmd_decide(q: &Question) -> Result<u8, Failure> {
    match q {
        Question::Termination(a) => {
            let p = load_program(&a.file)?;
            let r = decide_termination_with(&p, &limits(a, false));
            termination_output(&r, a);
            Ok(match r.verdict {
                Verdict::Terminates => 0,
                Verdict::Diverges | Verdict::ErrorStateReachable => 1,
                Verdict::Inapplicable => 2,
                Verdict::Unknown => 3,
            })
        }
        Question::Reach { common, target, process } => {
            let p = load_program(&common.file)?;
            let l = limits(common, true);
            let r = if let Some(src) = process {
                let q = parse_process(src).map_err(|e| invalid(anyhow!("{e}")))?;
                decide_process_reachability_with(&p, &q, &l)
            } else {
                let path = target.as_deref().expect("clap requires a target");
                let text = read_input(path).map_err(invalid)?;
                let j: Json = serde_json::from_str(&text).map_err(|e| invalid(anyhow!("{path}: {e}")))?;
                let t = any_config_from_json(&j).map_err(|e| invalid(anyhow!("{e}")))?;
                decide_cs_reachability_with(&p, &t, &l).map_err(|e| invalid(anyhow!("{e}")))?
            };
            reach_output(&r, common);
            Ok(match r.answer {
                Answer::Yes => 0,
                Answer::No => 1,
                Answer::Inapplicable => 2,
                Answer::Unknown => 3,
            })
        }
    }
}

fn load_config(path: &str) -> Result<AnyConfig, Failure> {
    let text = read_input(path).map_err(invalid)?;
    let j: Json = serde_json::from_str(&text).map_err(|e| invalid(anyhow!("{path}: {e}")))?;
    any_config_from_json(&j).map_err(|e| invalid(anyhow!("{path}: {e}")))
}

fn cmd_order(a: &OrderArgs) -> Result<u8, Failure> {
    let mf = match &a.program {
        Some(path) => load_program(path)?.main_free(),
        None => Default::default(),
    };
    let mode: Mode = a.mode.into();
    let x = load_config(&a.leq[0])?;
    let y = load_config(&a.leq[1])?;
    let leq = match (x, y) {
        (AnyConfig::Concrete(x), AnyConfig::Concrete(y)) => config_leq(&x, &y, mode, &mf),
        (AnyConfig::Abstract(x), AnyConfig::Abstract(y)) => config_leq(&x, &y, mode, &mf),
        (AnyConfig::Concrete(x), AnyConfig::Abstract(y)) => {
            config_leq(&actorlab::semantics::abstract_of(&x), &y, mode, &mf)
        }
        (AnyConfig::Abstract(x), AnyConfig::Concrete(y)) => {
            config_leq(&x, &actorlab::semantics::abstract_of(&y), mode, &mf)
        }
    };
    println!("{}", if leq { "yes" } else { "no" });
    Ok(if leq { 0 } else { 1 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Check(a) => cmd_check(a),
        Command::Classify(a) => cmd_classify(a),
        Command::Run(a) => cmd_run(a),
        Command::Explore(a) => cmd_explore(a),
        Command::CompileCm(a) => cmd_compile(a),
        Command::Decide { question } => cmd_decide(question),
        Command::Order(a) => cmd_order(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("actorlab: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
