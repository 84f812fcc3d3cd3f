//! Decision procedures for termination, control-state reachability and
//! process reachability on the fragments where they are decidable.

mod backward;
mod frt;

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

pub use backward::{Backward, Saturation, Target};
pub use frt::{finite_reachability_tree, Domination, FrtResult};

use crate::explore::{explore, normalize};
use crate::fragments::{classify, Decidable, FragmentFlags};
use crate::order::{canonical_process, config_leq, CanonicalTerm, Mode};
use crate::semantics::{
    abstract_of, actor_steps, decorate_initial, erase_abstract, initial_configuration, omega,
    AbstractConfig, ActorTerm, ConcreteConfig, Config, ErrorMarker, Label, QueueItem, State,
};
use crate::syntax::{free_names, ActorName, ClassName, Process, Program, Value, VarName};

/// A configuration of either the concrete or the abstract semantics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnyConfig {
    Concrete(ConcreteConfig),
    Abstract(AbstractConfig),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Terminates,
    Diverges,
    /// No infinite run, but some run ends with an actor stuck on an error.
    ErrorStateReachable,
    Inapplicable,
    /// A budget ran out first.
    Unknown,
}

impl Verdict {
    pub fn tag(self) -> &'static str {
        match self {
            Verdict::Terminates => "TERMINATES",
            Verdict::Diverges => "DIVERGES",
            Verdict::ErrorStateReachable => "ERROR-STATE-REACHABLE",
            Verdict::Inapplicable => "INAPPLICABLE",
            Verdict::Unknown => "UNKNOWN",
        }
    }
}

/// A descendant dominating a proper ancestor, certifying an infinite run.
#[derive(Clone, Debug)]
pub struct Witness {
    pub ancestor: AnyConfig,
    pub descendant: AnyConfig,
    pub path: Vec<Label>,
}

#[derive(Clone, Debug)]
pub struct TerminationReport {
    pub verdict: Verdict,
    pub fragment: FragmentFlags,
    pub witness: Option<Witness>,
    pub errors: Vec<ErrorMarker>,
    pub nodes: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Answer {
    Yes,
    No,
    Inapplicable,
    Unknown,
}

impl Answer {
    pub fn tag(self) -> &'static str {
        match self {
            Answer::Yes => "REACHABLE",
            Answer::No => "UNREACHABLE",
            Answer::Inapplicable => "INAPPLICABLE",
            Answer::Unknown => "UNKNOWN",
        }
    }

    fn of(reached: Option<bool>) -> Self {
        match reached {
            Some(true) => Answer::Yes,
            Some(false) => Answer::No,
            None => Answer::Unknown,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ReachReport {
    pub answer: Answer,
    pub fragment: FragmentFlags,
    /// When reachable: the backward chain from a configuration below the
    /// start to the target. Unconstrained actors are shown idle.
    pub chain: Vec<AnyConfig>,
    /// Basis elements generated over all searches.
    pub basis_size: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum DecideError {
    #[error("an abstract target was given for a program decided with the concrete ordering")]
    TargetKind,
}

/// Resource limits. None of them is reached on the decidable fragments for
/// programs of moderate size; hitting one yields an unknown verdict.
#[derive(Clone, Debug)]
pub struct Limits {
    pub tree_nodes: usize,
    pub basis: usize,
    pub completions: usize,
    pub root_configs: usize,
    /// Worker threads for independent backward searches. Answers do not
    /// depend on it.
    pub jobs: usize,
    /// States of the forward search run before the backward search. A hit
    /// answers "reachable" directly; a miss is never used as an answer.
    pub forward_probe: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            tree_nodes: 2_000_000,
            basis: 5_000,
            completions: 50_000,
            root_configs: 4_096,
            jobs: 1,
            forward_probe: 5_000,
        }
    }
}

/// The initial configuration of the label-free abstract semantics.
pub fn abstract_initial(program: &Program) -> Option<AbstractConfig> {
    decorate_initial(program)
        .ok()
        .map(|d| erase_abstract(&omega(&d)))
}

pub fn decide_termination(program: &Program) -> TerminationReport {
    decide_termination_with(program, &Limits::default())
}

pub fn decide_termination_with(program: &Program, limits: &Limits) -> TerminationReport {
    let fragment = classify(program);
    let mf = program.main_free();
    let mut report = TerminationReport {
        verdict: Verdict::Inapplicable,
        fragment,
        witness: None,
        errors: Vec::new(),
        nodes: 0,
    };
    fn fill<M: QueueItem>(
        report: &mut TerminationReport,
        r: FrtResult<M>,
        wrap: impl Fn(crate::semantics::Config<M>) -> AnyConfig,
    ) {
        report.nodes = r.nodes;
        report.errors = r.errors;
        report.verdict = if let Some(w) = r.witness {
            report.witness = Some(Witness {
                ancestor: wrap(w.ancestor),
                descendant: wrap(w.descendant),
                path: w.path,
            });
            Verdict::Diverges
        } else if r.exhausted {
            Verdict::Unknown
        } else if !report.errors.is_empty() {
            Verdict::ErrorStateReachable
        } else {
            Verdict::Terminates
        };
    }
    match fragment.decidable() {
        Decidable::RoBa => {
            let r = finite_reachability_tree(
                program,
                initial_configuration(program),
                Mode::Concrete,
                &mf,
                limits.tree_nodes,
            );
            fill(&mut report, r, AnyConfig::Concrete);
        }
        Decidable::Sl => {
            let init = abstract_initial(program).expect("stateless program");
            let r = finite_reachability_tree(program, init, Mode::Abstract, &mf, limits.tree_nodes);
            fill(&mut report, r, AnyConfig::Abstract);
        }
        Decidable::Undecidable => {}
    }
    report
}

fn backward<'a>(program: &'a Program, mode: Mode, limits: &Limits) -> Backward<'a> {
    let mut b = Backward::new(program, mode);
    b.basis_limit = limits.basis;
    b.completion_limit = limits.completions;
    b
}

fn show_concrete(t: &Target<crate::semantics::Message>) -> AnyConfig {
    let mut c = t.config.clone();
    for w in &t.wild {
        if let Some(term) = c.actors.get_mut(w) {
            term.process = Process::Nil;
            term.queue.clear();
        }
    }
    AnyConfig::Concrete(c)
}

/// Whether some reachable configuration lies above `target`.
pub fn decide_cs_reachability(
    program: &Program,
    target: &AnyConfig,
) -> Result<ReachReport, DecideError> {
    decide_cs_reachability_with(program, target, &Limits::default())
}

pub fn decide_cs_reachability_with(
    program: &Program,
    target: &AnyConfig,
    limits: &Limits,
) -> Result<ReachReport, DecideError> {
    let fragment = classify(program);
    let mut report = ReachReport {
        answer: Answer::Inapplicable,
        fragment,
        chain: Vec::new(),
        basis_size: 0,
    };
    match fragment.decidable() {
        Decidable::RoBa => {
            let AnyConfig::Concrete(t) = target else {
                return Err(DecideError::TargetKind);
            };
            let mf = program.main_free();
            let init = initial_configuration(program);
            if let Some(run) = forward_probe(program, init.clone(), limits.forward_probe, |c| {
                config_leq(t, c, Mode::Concrete, &mf)
            }) {
                report.answer = Answer::Yes;
                report.chain = run.into_iter().map(AnyConfig::Concrete).collect();
                return Ok(report);
            }
            let sat = backward(program, Mode::Concrete, limits).saturate(Target::exact(normalize(t)), &init);
            report.answer = Answer::of(sat.reached);
            report.basis_size = sat.basis.len();
            report.chain = sat.chain().into_iter().map(show_concrete).collect();
        }
        Decidable::Sl => {
            let t = match target {
                AnyConfig::Concrete(c) => abstract_of(c),
                AnyConfig::Abstract(a) => erase_abstract(a),
            };
            let init = abstract_initial(program).expect("stateless program");
            let mf = program.main_free();
            if let Some(run) = forward_probe(program, init.clone(), limits.forward_probe, |c| {
                config_leq(&t, c, Mode::Abstract, &mf)
            }) {
                report.answer = Answer::Yes;
                report.chain = run.into_iter().map(AnyConfig::Abstract).collect();
                return Ok(report);
            }
            let sat = backward(program, Mode::Abstract, limits).saturate(Target::exact(t), &init);
            report.answer = Answer::of(sat.reached);
            report.basis_size = sat.basis.len();
            report.chain = sat
                .chain()
                .into_iter()
                .map(|x| AnyConfig::Abstract(x.config.clone()))
                .collect();
        }
        Decidable::Undecidable => {}
    }
    Ok(report)
}

/// A shortest run from `init` to a configuration satisfying `pred`, among
/// the first `limit` configurations of a breadth-first search.
fn forward_probe<M: QueueItem>(
    program: &Program,
    init: Config<M>,
    limit: usize,
    pred: impl Fn(&Config<M>) -> bool,
) -> Option<Vec<Config<M>>> {
    if limit == 0 {
        return None;
    }
    let space = explore(program, init, limit);
    let j = space.states.iter().position(pred)?;
    Some(space.path_to(j).into_iter().map(|i| space.states[i].clone()).collect())
}

fn process_key_matches<M: QueueItem>(c: &Config<M>, key: &CanonicalTerm, mf: &BTreeSet<VarName>) -> bool {
    c.actors
        .values()
        .any(|t| &canonical_process(&t.process, Mode::Abstract, mf) == key)
}

/// Configurations visited while only the root moves, and those in which the
/// root has finished. Returns `None` if more than `limit` are found.
pub fn root_runs(
    program: &Program,
    limit: usize,
) -> Option<(Vec<ConcreteConfig>, Vec<ConcreteConfig>)> {
    let root = ActorName::root();
    let init = initial_configuration(program);
    let mut seen: HashSet<ConcreteConfig> = HashSet::from([init.clone()]);
    let mut visited = vec![init.clone()];
    let mut done = Vec::new();
    let mut work = VecDeque::from([init]);
    while let Some(c) = work.pop_front() {
        let term = c.get(&root).expect("root exists").clone();
        if term.process.is_nil() {
            done.push(c);
            continue;
        }
        let Ok(steps) = actor_steps(program, &c, &root, &term) else {
            continue;
        };
        for s in steps {
            if seen.insert(s.config.clone()) {
                if seen.len() > limit {
                    return None;
                }
                visited.push(s.config.clone());
                work.push_back(s.config);
            }
        }
    }
    Some((visited, done))
}

/// All injective maps from `names` to actors of `c` of the same class.
fn name_maps(names: &[ActorName], c: &ConcreteConfig) -> Vec<BTreeMap<ActorName, ActorName>> {
    let mut out = vec![BTreeMap::new()];
    for n in names {
        let mut next = Vec::new();
        for m in &out {
            for a in c
                .actors
                .keys()
                .filter(|a| a.class == n.class && !a.is_root())
            {
                if !m.values().any(|b| b == a) {
                    let mut m2 = m.clone();
                    m2.insert(n.clone(), a.clone());
                    next.push(m2);
                }
            }
        }
        out = next;
    }
    out
}

fn rename_actors(q: &Process, map: &BTreeMap<ActorName, ActorName>) -> Process {
    let m: BTreeMap<Value, Value> = map
        .iter()
        .map(|(a, b)| (Value::Actor(a.clone()), Value::Actor(b.clone())))
        .collect();
    crate::order::rename_free(q, &m, &mut Vec::new())
}

/// Run independent backward searches and report the first candidate, in
/// the given order, whose target is reachable from its start.
fn first_hit<M: QueueItem + Send + Sync>(
    program: &Program,
    mode: Mode,
    limits: &Limits,
    cands: Vec<(Target<M>, crate::semantics::Config<M>)>,
) -> (Answer, Vec<Target<M>>, usize) {
    type Found<M> = (usize, Option<bool>, Vec<Target<M>>, usize);
    let search = |i: usize, b: &mut Backward<'_>| -> Found<M> {
        let (t, start) = &cands[i];
        let sat = b.saturate(t.clone(), start);
        let chain = sat.chain().into_iter().cloned().collect();
        (i, sat.reached, chain, sat.basis.len())
    };
    let jobs = limits.jobs.max(1).min(cands.len().max(1));
    let mut results: Vec<Found<M>> = if jobs == 1 {
        let mut b = backward(program, mode, limits);
        let mut out = Vec::new();
        for i in 0..cands.len() {
            let r = search(i, &mut b);
            let stop = r.1 == Some(true);
            out.push(r);
            if stop {
                break;
            }
        }
        out
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..jobs)
                .map(|w| {
                    let search = &search;
                    let n = cands.len();
                    scope.spawn(move || {
                        let mut b = backward(program, mode, limits);
                        (w..n).step_by(jobs).map(|i| search(i, &mut b)).collect::<Vec<_>>()
                    })
                })
                .collect();
            handles.into_iter().flat_map(|h| h.join().expect("worker")).collect()
        })
    };
    results.sort_by_key(|r| r.0);
    let size = results.iter().map(|r| r.3).sum();
    if let Some(r) = results.iter_mut().find(|r| r.1 == Some(true)) {
        return (Answer::Yes, std::mem::take(&mut r.2), size);
    }
    let answer = if results.iter().any(|r| r.1.is_none()) { Answer::Unknown } else { Answer::No };
    (answer, Vec::new(), size)
}

/// Whether some actor can reach a process equal to `q` up to renaming of
/// variables and actor names (variables free in main are fixed).
pub fn decide_process_reachability(program: &Program, q: &Process) -> ReachReport {
    decide_process_reachability_with(program, q, &Limits::default())
}

pub fn decide_process_reachability_with(
    program: &Program,
    q: &Process,
    limits: &Limits,
) -> ReachReport {
    let fragment = classify(program);
    let mut report = ReachReport {
        answer: Answer::Inapplicable,
        fragment,
        chain: Vec::new(),
        basis_size: 0,
    };
    let mf = program.main_free();
    let qkey = canonical_process(q, Mode::Abstract, &mf);
    match fragment.decidable() {
        Decidable::RoBa => {
            let init = initial_configuration(program);
            if let Some(run) = forward_probe(program, init, limits.forward_probe, |c| {
                process_key_matches(c, &qkey, &mf)
            }) {
                report.answer = Answer::Yes;
                report.chain = run.into_iter().map(AnyConfig::Concrete).collect();
                return report;
            }
            let Some((visited, done)) = root_runs(program, limits.root_configs) else {
                report.answer = Answer::Unknown;
                return report;
            };
            if let Some(c) = visited.iter().find(|c| {
                c.actors
                    .values()
                    .any(|t| canonical_process(&t.process, Mode::Abstract, &mf) == qkey)
            }) {
                report.answer = Answer::Yes;
                report.chain = vec![AnyConfig::Concrete(c.clone())];
                return report;
            }
            let names: Vec<ActorName> = free_names(q)
                .into_iter()
                .filter_map(|v| v.as_actor().cloned())
                .collect();
            let mut cands = Vec::new();
            for k in &done {
                for m in name_maps(&names, k) {
                    let q2 = rename_actors(q, &m);
                    for holder in k.actors.keys().filter(|a| !a.is_root()) {
                        let mut t = k.clone();
                        let mut wild = BTreeSet::new();
                        for (a, term) in t.actors.iter_mut() {
                            if a.is_root() {
                                continue;
                            }
                            term.queue.clear();
                            if a == holder {
                                term.process = q2.clone();
                            } else {
                                term.process = Process::Nil;
                                wild.insert(a.clone());
                            }
                        }
                        cands.push((Target { config: t, wild }, k.clone()));
                    }
                }
            }
            let (answer, chain, size) = first_hit(program, Mode::Concrete, limits, cands);
            report.answer = answer;
            report.basis_size = size;
            report.chain = chain.iter().map(show_concrete).collect();
        }
        Decidable::Sl => {
            let init = abstract_initial(program).expect("stateless program");
            if let Some(run) = forward_probe(program, init.clone(), limits.forward_probe, |c| {
                process_key_matches(c, &qkey, &mf)
            }) {
                report.answer = Answer::Yes;
                report.chain = run.into_iter().map(AnyConfig::Abstract).collect();
                return report;
            }
            let mut classes: Vec<ClassName> = program.classes.keys().cloned().collect();
            classes.push(ClassName::root());
            let cands = classes
                .into_iter()
                .map(|c| {
                    let holder = if c.is_root() {
                        ActorName::root()
                    } else {
                        ActorName::new(c.clone(), 0)
                    };
                    let mut term = ActorTerm::idle(State::new());
                    term.process = q.clone();
                    let actors = BTreeMap::from([(holder, term)]);
                    let alloc = crate::semantics::Allocator::covering(&actors);
                    let t = crate::semantics::Config { actors, alloc };
                    (Target::exact(t), init.clone())
                })
                .collect();
            let (answer, chain, size) = first_hit(program, Mode::Abstract, limits, cands);
            report.answer = answer;
            report.basis_size = size;
            report.chain = chain.into_iter().map(|x| AnyConfig::Abstract(x.config)).collect();
        }
        Decidable::Undecidable => {}
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_process, parse_program};

    fn corpus(name: &str) -> Program {
        let src = std::fs::read_to_string(format!("{}/corpus/{name}", env!("CARGO_MANIFEST_DIR")))
            .unwrap();
        parse_program(&src).unwrap()
    }

    #[test]
    fn termination_on_corpus() {
        assert_eq!(
            decide_termination(&corpus("selfping.act")).verdict,
            Verdict::Diverges
        );
        assert_eq!(
            decide_termination(&corpus("taskmanager_roba.act")).verdict,
            Verdict::Terminates
        );
        assert_eq!(
            decide_termination(&corpus("merger.act")).verdict,
            Verdict::Inapplicable
        );
    }

    #[test]
    fn process_reachability_simple() {
        let p = parse_program("class C() { def m(x) = x!n() def n() = 0 def k() = 0 } main { let c = new C() in c!m(c) }").unwrap();
        assert_eq!(
            decide_process_reachability(&p, &parse_process("C#0!n()").unwrap()).answer,
            Answer::Yes
        );
        assert_eq!(
            decide_process_reachability(&p, &parse_process("C#5!n()").unwrap()).answer,
            Answer::Yes
        );
        assert_eq!(
            decide_process_reachability(&p, &parse_process("C#0!k()").unwrap()).answer,
            Answer::No
        );
    }
}
