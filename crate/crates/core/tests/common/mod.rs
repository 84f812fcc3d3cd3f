//! Shared helpers for integration tests: comparison of the deciders with
//! exhaustive forward exploration.

#![allow(dead_code)]

use actorlab::deciders::{
    abstract_initial, decide_cs_reachability, decide_process_reachability, decide_termination,
    Answer, AnyConfig, Verdict,
};
use actorlab::explore::{explore, StateSpace};
use actorlab::fragments::{classify, Decidable};
use actorlab::generate::random_process;
use actorlab::order::{config_leq, Mode};
use actorlab::semantics::{initial_configuration, Config, QueueItem};
use actorlab::syntax::{subst_this, Process, Program, Value};
use rand::seq::SliceRandom;
use rand::Rng;

pub const ORACLE_STATES: usize = 50_000;

pub fn corpus_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

pub fn corpus_program(name: &str) -> Program {
    let src = std::fs::read_to_string(corpus_dir().join(name)).unwrap();
    actorlab::syntax::parse_program(&src).unwrap()
}

/// A disagreement between a decider and the oracle.
#[derive(Debug)]
pub struct Mismatch {
    pub program: String,
    pub query: String,
    pub decided: String,
    pub expected: String,
}

/// Tally of one program's comparisons.
#[derive(Debug, Default)]
pub struct Tally {
    pub termination: usize,
    pub cs: usize,
    pub process: usize,
    pub mismatches: Vec<Mismatch>,
}

fn expected_verdict<M: QueueItem>(space: &StateSpace<M>) -> Verdict {
    if space.has_cycle() {
        Verdict::Diverges
    } else if space.any_error() {
        Verdict::ErrorStateReachable
    } else {
        Verdict::Terminates
    }
}

fn answer(b: bool) -> Answer {
    if b {
        Answer::Yes
    } else {
        Answer::No
    }
}

/// Sub-configuration of `c` keeping a random non-empty set of actors (all
/// of them for the concrete ordering), each with a random subsequence of
/// its queue.
fn weaken<M: QueueItem, R: Rng>(rng: &mut R, c: &Config<M>) -> Config<M> {
    let mut out = c.clone();
    if !M::BY_CLASS {
        // The concrete ordering compares configurations with equal actor sets.
        for t in out.actors.values_mut() {
            t.queue.retain(|_| rng.gen_bool(0.6));
        }
        return out;
    }
    let names: Vec<_> = out.actors.keys().cloned().collect();
    let keep = names.choose(rng).cloned().unwrap();
    for n in names {
        if n != keep && rng.gen_bool(0.5) {
            out.actors.remove(&n);
        }
    }
    for t in out.actors.values_mut() {
        t.queue.retain(|_| rng.gen_bool(0.6));
    }
    out
}

/// Process-reachability queries: processes seen in the space, body
/// suffixes with `this` instantiated, and random processes.
fn process_queries<M: QueueItem, R: Rng>(rng: &mut R, p: &Program, space: &StateSpace<M>) -> Vec<Process> {
    let mut qs = Vec::new();
    for _ in 0..2 {
        let s = space.states.choose(rng).unwrap();
        let t = s.actors.values().collect::<Vec<_>>();
        qs.push(t.choose(rng).unwrap().process.clone());
    }
    let mut suffixes = Vec::new();
    for (c, cd) in &p.classes {
        for m in cd.methods.values() {
            for s in m.body.suffixes() {
                suffixes.push(subst_this(s, &actorlab::syntax::ActorName::new(c.clone(), 0)));
            }
        }
    }
    for _ in 0..2 {
        if let Some(s) = suffixes.choose(rng) {
            qs.push(s.clone());
        }
    }
    let actors: Vec<Value> = space.states[0].actors.keys().filter(|a| !a.is_root()).cloned().map(Value::Actor).collect();
    qs.push(random_process(rng, &actors, 2));
    qs
}

fn compare<M: QueueItem, R: Rng>(
    rng: &mut R,
    p: &Program,
    space: &StateSpace<M>,
    mode: Mode,
    wrap: impl Fn(Config<M>) -> AnyConfig,
    tally: &mut Tally,
) {
    let mf = p.main_free();
    let src = p.to_string();
    let mismatch = |tally: &mut Tally, query: String, decided: String, expected: String| {
        tally.mismatches.push(Mismatch { program: src.clone(), query, decided, expected });
    };
    let verdict = decide_termination(p).verdict;
    let want = expected_verdict(space);
    tally.termination += 1;
    if verdict != want {
        mismatch(tally, "termination".into(), verdict.tag().into(), want.tag().into());
    }
    // Control-state targets: weakened reachable states, and weakened states
    // whose actors received an extra copy of a queued message or a
    // different process, which may or may not be reachable.
    for k in 0..4 {
        let s = space.states.choose(rng).unwrap();
        let mut t = weaken(rng, s);
        if k >= 2 {
            let other = space.states.choose(rng).unwrap();
            for (n, term) in t.actors.iter_mut() {
                if let Some(o) = other.actors.get(n) {
                    if rng.gen_bool(0.5) {
                        term.process = o.process.clone();
                    }
                    if let Some(m) = o.queue.front() {
                        term.queue.push_back(m.clone());
                    }
                }
            }
        }
        let want = answer(space.states.iter().any(|s| config_leq(&t, s, mode, &mf)));
        let t0 = std::time::Instant::now();
        let got = decide_cs_reachability(p, &wrap(t.clone())).map(|r| r.answer);
        if t0.elapsed().as_secs() >= 1 {
            eprintln!("SLOW cs {:?} {t:?}", t0.elapsed());
        }
        tally.cs += 1;
        if got != Ok(want) {
            mismatch(tally, format!("cs {t:?}"), format!("{got:?}"), want.tag().into());
        }
    }
    for q in process_queries(rng, p, space) {
        let want = answer(space.reaches_process(p, &q) == Some(true));
        let t0 = std::time::Instant::now();
        let got = decide_process_reachability(p, &q).answer;
        if t0.elapsed().as_secs() >= 1 {
            eprintln!("SLOW process {:?} {q}", t0.elapsed());
        }
        tally.process += 1;
        if got != want {
            mismatch(tally, format!("process {q}"), got.tag().into(), want.tag().into());
        }
    }
}

/// Compare every decider with the oracle on `p`. Returns `None` when the
/// program is outside the decidable fragments or its state space exceeds
/// the oracle limit.
pub fn check_against_oracle<R: Rng>(rng: &mut R, p: &Program) -> Option<Tally> {
    let mut tally = Tally::default();
    match classify(p).decidable() {
        Decidable::RoBa => {
            let space = explore(p, initial_configuration(p), ORACLE_STATES);
            if !space.complete {
                return None;
            }
            compare(rng, p, &space, Mode::Concrete, AnyConfig::Concrete, &mut tally);
        }
        Decidable::Sl => {
            let space = explore(p, abstract_initial(p)?, ORACLE_STATES);
            if !space.complete {
                return None;
            }
            compare(rng, p, &space, Mode::Abstract, AnyConfig::Abstract, &mut tally);
        }
        Decidable::Undecidable => return None,
    }
    Some(tally)
}
