//! Acceptance suite. Each criterion prints one line:
//! `PASS|FAIL [n] <name>: <detail> (<elapsed> / limit <limit>)`.
//!
//! Time limits are enforced in optimized builds only; debug builds report
//! the elapsed time without failing on it. Setting `ACCEPTANCE_ONLY` to a
//! comma-separated list of criterion numbers runs just those.

mod common;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::time::{Duration, Instant};

use actorlab::cm::{compile_ba, compile_ro, ro_checkpoint, simulate_ba_step, CmState, CounterMachine};
use actorlab::deciders::{abstract_initial, decide_termination, finite_reachability_tree, AnyConfig, Verdict};
use actorlab::explore::{explore, normalize};
use actorlab::fragments::{classify, Decidable};
use actorlab::generate::{random_process, random_program, random_renaming, Shape};
use actorlab::order::{
    config_leq, enumerate_renaming_classes, proc_equiv, proc_equiv_by_search, renaming_bound,
    renamings_related, rename_free, Mode,
};
use actorlab::semantics::{
    abstract_of, actor_steps, decorate_initial, initial_configuration, omega, run, successors,
    Config, Outcome, Policy, QueueItem,
};
use actorlab::syntax::{parse_process, ActorName, Process, Program, Subst, Value, VarName};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criteria that cannot be met as stated. Each must still fail, so that a
/// change in behaviour is noticed.
const KNOWN_FAILING: &[u32] = &[3, 9];

type Check = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Duration,
    run: fn() -> Check,
}

fn p(s: &str) -> Process {
    parse_process(s).unwrap()
}

fn rho(pairs: &[(&str, Value)]) -> Subst {
    pairs.iter().map(|(x, v)| (VarName::named(x), v.clone())).collect()
}

fn actor(c: &str, k: u32) -> Value {
    Value::Actor(ActorName::new(c, k))
}

fn golden_examples() -> Check {
    let none = BTreeSet::new();
    let v = Value::var;
    let renamings = [
        (rho(&[("x", v("y")), ("y", v("z"))]), rho(&[("x", v("x")), ("y", v("z"))]), true),
        (
            rho(&[("x", v("y")), ("y", v("y")), ("z", actor("A", 0))]),
            rho(&[("x", v("x'")), ("y", v("x'")), ("z", actor("A", 0))]),
            true,
        ),
        (rho(&[("x", v("y")), ("y", v("z"))]), rho(&[("x", v("x")), ("y", v("x"))]), false),
        (rho(&[("x", actor("A", 0))]), rho(&[("x", actor("B", 0))]), false),
    ];
    let processes = [
        ("y!m(x, y)", "y'!m(x', y')", true),
        ("if x = A#0 then y!m(x, A#0, y)", "if z = A#0 then y'!m(z, A#0, y')", true),
        ("if x = A#0 then B#0!m(x, A#0, B#0)", "if z = A#0 then y'!m(z, A#0, y')", false),
    ];
    let mut ok = 0;
    let mut bad = Vec::new();
    for (i, (a, b, want)) in renamings.iter().enumerate() {
        if renamings_related(a, b, Mode::Concrete, &none) == *want {
            ok += 1;
        } else {
            bad.push(format!("renaming example {}", i + 1));
        }
    }
    for (a, b, want) in processes {
        if proc_equiv(&p(a), &p(b), Mode::Concrete, &none) == want {
            ok += 1;
        } else {
            bad.push(format!("{a} vs {b}"));
        }
    }
    let total = renamings.len() + processes.len();
    if bad.is_empty() {
        Ok(format!("{ok}/{total} verdicts as stated"))
    } else {
        Err(format!("{ok}/{total}; wrong: {}", bad.join(", ")))
    }
}

fn equivalence_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let none = BTreeSet::new();
    let mut disagreements = Vec::new();
    let mut equivalent = 0;
    for i in 0..1000 {
        let nvars = rng.gen_range(0..=4usize);
        let nactors = rng.gen_range(0..=2usize).min(4 - nvars);
        let mut names: Vec<Value> = (0..nvars).map(|k| Value::var(&format!("x{k}"))).collect();
        let classes = ["A", "B"];
        for k in 0..nactors {
            names.push(actor(classes[rng.gen_range(0..2)], k as u32));
        }
        let a = random_process(&mut rng, &names, 4);
        let b = match i % 3 {
            0 => rename_free(&a, &random_renaming(&mut rng, &names), &mut Vec::new()),
            1 if nvars >= 2 => {
                let map = BTreeMap::from([(names[0].clone(), names[1].clone())]);
                rename_free(&a, &map, &mut Vec::new())
            }
            _ => random_process(&mut rng, &names, 4),
        };
        let mode = if i % 2 == 0 { Mode::Concrete } else { Mode::Abstract };
        let fast = proc_equiv(&a, &b, mode, &none);
        let slow = proc_equiv_by_search(&a, &b, mode, &none);
        equivalent += usize::from(slow);
        if fast != slow {
            disagreements.push(format!("{a} vs {b} ({mode:?}): canonical {fast}, search {slow}"));
        }
    }
    if disagreements.is_empty() {
        Ok(format!("1000/1000 agree ({equivalent} equivalent pairs)"))
    } else {
        Err(format!("{} disagreements, first: {}", disagreements.len(), disagreements[0]))
    }
}

fn bell_bound() -> Check {
    let none = BTreeSet::new();
    let classes = ["A", "B", "C"];
    let mut violations = Vec::new();
    for kappa in 0..=4usize {
        let args: Vec<String> = (0..kappa).map(|k| format!("x{k}")).collect();
        let q = p(&format!("C#0!m({})", args.join(", ")));
        for ell in 0..=3usize {
            let actors: Vec<ActorName> = classes[..ell].iter().map(|c| ActorName::new(*c, 0)).collect();
            let n = enumerate_renaming_classes(&q, &actors, &none) as u128;
            let bound = renaming_bound(kappa, ell);
            if n > bound {
                violations.push(format!("k={kappa} l={ell}: {n} > {bound}"));
            }
        }
    }
    if violations.is_empty() {
        Ok("all 20 (k, l) pairs within the bound".into())
    } else {
        Err(format!("{} of 20 pairs exceed the bound: {}", violations.len(), violations.join("; ")))
    }
}

fn cm_simulation() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut steps = 0;
    for n in 0..50 {
        let len = rng.gen_range(2..=6);
        let m = CounterMachine::random(&mut rng, len, true);
        let prog = compile_ba(&m);
        let mut s = CmState::initial();
        for _ in 0..15 {
            let next: Vec<CmState> = m
                .successors(s)
                .into_iter()
                .filter(|t| t.v1.unwrap_or(0) <= 4 && t.v2.unwrap_or(0) <= 4)
                .collect();
            if next.is_empty() {
                break;
            }
            for &t in &next {
                if t.pc == 0 {
                    continue;
                }
                steps += 1;
                if simulate_ba_step(&prog, &m, s, t, 500).is_none() {
                    return Err(format!("machine {n}:\n{m}step {s:?} -> {t:?} not simulated"));
                }
            }
            let live: Vec<CmState> = next.into_iter().filter(|t| t.pc != 0).collect();
            match live.choose(&mut rng) {
                Some(&t) => s = t,
                None => break,
            }
        }
    }
    Ok(format!("{steps} machine steps simulated on 50 machines"))
}

fn cm_determinism() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut machines = 0;
    let mut tries = 0;
    while machines < 50 {
        tries += 1;
        if tries > 100_000 {
            return Err(format!("only {machines} halting machines generated"));
        }
        let len = rng.gen_range(2..=8);
        let m = CounterMachine::random(&mut rng, len, false);
        let (oracle, halted) = m.run_exact(200);
        if !halted {
            continue;
        }
        machines += 1;
        let prog = compile_ro(&m);
        let t = run(&prog, &Policy::DeterministicFirst, 200_000);
        if t.outcome != Outcome::Quiescent {
            return Err(format!("machine:\n{m}run ended with {:?}", t.outcome));
        }
        let visited: Vec<CmState> = t
            .events
            .iter()
            .filter_map(|e| ro_checkpoint(&m, &e.config).map(|x| x.0))
            .collect();
        if visited != oracle {
            return Err(format!("machine:\n{m}visited {visited:?}, oracle {oracle:?}"));
        }
    }
    Ok("50 halting machines followed exactly and terminated".into())
}

fn decider_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut roba, mut sl) = (0, 0);
    let (mut terminations, mut cs, mut process) = (0, 0, 0);
    let mut mismatches = Vec::new();
    let mut tries = 0;
    while (roba < 30 || sl < 30) && tries < 2000 {
        tries += 1;
        let shape = if roba < 30 && (tries % 2 == 0 || sl >= 30) { Shape::RoBa } else { Shape::Sl };
        let prog = random_program(&mut rng, shape);
        let kind = classify(&prog).decidable();
        if (kind == Decidable::RoBa && roba >= 30) || (kind == Decidable::Sl && sl >= 30) {
            continue;
        }
        let Some(t) = common::check_against_oracle(&mut rng, &prog) else { continue };
        match kind {
            Decidable::RoBa => roba += 1,
            Decidable::Sl => sl += 1,
            Decidable::Undecidable => {}
        }
        terminations += t.termination;
        cs += t.cs;
        process += t.process;
        mismatches.extend(t.mismatches);
    }
    if roba < 30 || sl < 30 {
        return Err(format!("suite too small: {roba} ro_ba, {sl} sl"));
    }
    let total = terminations + cs + process;
    if mismatches.is_empty() {
        Ok(format!(
            "{roba} ro_ba + {sl} sl programs; {terminations} termination, {cs} control-state, {process} process queries agree"
        ))
    } else {
        for m in &mismatches {
            eprintln!("MISMATCH {}\n  {}\n  decided {} expected {}", m.program, m.query, m.decided, m.expected);
        }
        Err(format!("{} of {total} queries disagree", mismatches.len()))
    }
}

/// Replay `path` from `from` and report whether `to` is reached.
fn replays<M: QueueItem>(prog: &Program, from: &Config<M>, path: &[actorlab::semantics::Label], to: &Config<M>) -> bool {
    let mut current = vec![from.clone()];
    for l in path {
        let mut next = Vec::new();
        for c in &current {
            let Some(term) = c.get(&l.actor) else { continue };
            if let Ok(steps) = actor_steps(prog, c, &l.actor, term) {
                next.extend(steps.into_iter().filter(|s| &s.label == l).map(|s| s.config));
            }
        }
        current = next;
    }
    current.iter().any(|c| normalize(c) == normalize(to))
}

fn divergence_witness() -> Check {
    let mut lines = Vec::new();
    for name in ["selfping.act", "prodcons.act"] {
        let prog = common::corpus_program(name);
        if !classify(&prog).sl {
            return Err(format!("{name} is not stateless"));
        }
        let mf = prog.main_free();
        // The stateless decider on the abstract system.
        let init = abstract_initial(&prog).expect("stateless program");
        let r = finite_reachability_tree(&prog, init, Mode::Abstract, &mf, 100_000);
        let Some(w) = r.witness else {
            return Err(format!("{name}: abstract tree found no domination"));
        };
        if w.path.is_empty() || !config_leq(&w.ancestor, &w.descendant, Mode::Abstract, &mf) {
            return Err(format!("{name}: abstract ancestor is not below descendant"));
        }
        if !replays(&prog, &w.ancestor, &w.path, &w.descendant) {
            return Err(format!("{name}: abstract path does not lead from ancestor to descendant"));
        }
        // The decider chosen for the program, whose witness must also be
        // dominated in the abstract ordering.
        let r = decide_termination(&prog);
        if r.verdict != Verdict::Diverges {
            return Err(format!("{name}: {}", r.verdict.tag()));
        }
        let Some(w2) = r.witness else {
            return Err(format!("{name}: no witness"));
        };
        let ok = match (&w2.ancestor, &w2.descendant) {
            (AnyConfig::Concrete(a), AnyConfig::Concrete(d)) => {
                config_leq(a, d, Mode::Concrete, &mf)
                    && config_leq(&abstract_of(a), &abstract_of(d), Mode::Abstract, &mf)
                    && replays(&prog, a, &w2.path, d)
            }
            (AnyConfig::Abstract(a), AnyConfig::Abstract(d)) => {
                config_leq(a, d, Mode::Abstract, &mf) && replays(&prog, a, &w2.path, d)
            }
            _ => false,
        };
        if w2.path.is_empty() || !ok {
            return Err(format!("{name}: decider witness does not verify"));
        }
        lines.push(format!("{name} DIVERGES (abstract witness {} steps)", w.path.len()));
    }
    Ok(lines.join(", "))
}

fn omega_commutation() -> Check {
    let mut checked = 0;
    for name in ["selfping.act", "prodcons.act", "taskmanager_sl.act"] {
        let prog = common::corpus_program(name);
        let init = decorate_initial(&prog).map_err(|e| format!("{name}: {e}"))?;
        let mut frontier = vec![init];
        let mut seen = HashSet::new();
        for _ in 0..6 {
            let mut next = Vec::new();
            for c in &frontier {
                let abstract_steps = successors(&prog, &omega(c)).steps;
                for s in successors(&prog, c).steps {
                    checked += 1;
                    let image = omega(&s.config);
                    let matched = abstract_steps.iter().any(|a| a.label == s.label && a.config == image);
                    if !matched {
                        return Err(format!("{name}: decorated step {:?} has no abstract counterpart", s.label));
                    }
                    if seen.insert(s.config.clone()) {
                        next.push(s.config);
                    }
                }
            }
            frontier = next;
        }
    }
    Ok(format!("{checked} decorated steps, zero violations"))
}

fn diamond() -> Check {
    let root = ActorName::root();
    let mut programs: Vec<(String, Program)> = std::fs::read_dir(common::corpus_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "act"))
        .map(|p| {
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            (name.clone(), common::corpus_program(&name))
        })
        .collect();
    programs.sort_by(|a, b| a.0.cmp(&b.0));
    for cm in ["incdec.cm", "halt.cm"] {
        let src = std::fs::read_to_string(common::corpus_dir().join(cm)).unwrap();
        let m = CounterMachine::parse(&src, false).unwrap();
        programs.push((format!("{cm} (ro encoding)"), compile_ro(&m)));
    }
    programs.truncate(10);
    if programs.len() < 10 {
        return Err(format!("only {} corpus programs", programs.len()));
    }
    let mut checked = 0;
    let mut same_mailbox = BTreeMap::<String, usize>::new();
    let mut other = Vec::new();
    for (name, prog) in &programs {
        let space = explore(prog, initial_configuration(prog), 2_000);
        for s in &space.states {
            let p0 = s.get(&root).unwrap().process.clone();
            for a in successors(prog, s).steps.into_iter().filter(|x| x.label.actor != root) {
                for b in successors(prog, &a.config).steps {
                    let p1 = &b.config.get(&root).unwrap().process;
                    if b.label.actor != root || *p1 == p0 {
                        continue;
                    }
                    checked += 1;
                    let target = normalize(&b.config);
                    let commutes = successors(prog, s).steps.iter().any(|r| {
                        r.label.actor == root
                            && &r.config.get(&root).unwrap().process == p1
                            && successors(prog, &r.config)
                                .steps
                                .iter()
                                .any(|x| x.label.actor != root && normalize(&x.config) == target)
                    });
                    if commutes {
                        continue;
                    }
                    let recipient = |l: &actorlab::semantics::Label| l.emitted.as_ref().map(|e| e.1.clone());
                    if recipient(&a.label).is_some() && recipient(&a.label) == recipient(&b.label) {
                        *same_mailbox.entry(name.clone()).or_default() += 1;
                    } else {
                        other.push(format!("{name}: {:?} then {:?}", a.label, b.label));
                    }
                }
            }
        }
    }
    if !other.is_empty() {
        return Err(format!("{} of {checked} interleavings do not commute, first: {}", other.len(), other[0]));
    }
    if !same_mailbox.is_empty() {
        let list: Vec<String> = same_mailbox.iter().map(|(n, k)| format!("{n} {k}")).collect();
        let in_fragment: Vec<&String> = same_mailbox
            .keys()
            .filter(|n| programs.iter().any(|(m, p)| m == *n && classify(p).ro_ba()))
            .collect();
        return Err(format!(
            "{} of {checked} interleavings do not commute, all of them two sends into one mailbox, whose order then differs ({}); {} of these programs are read-only with bounded creation",
            same_mailbox.values().sum::<usize>(),
            list.join(", "),
            in_fragment.len()
        ));
    }
    Ok(format!("10 programs, {checked} interleavings commute"))
}

fn weaken<M: QueueItem, R: Rng>(rng: &mut R, c: &Config<M>, drop_actors: bool) -> Config<M> {
    let mut out = c.clone();
    if drop_actors {
        let names: Vec<ActorName> = out.actors.keys().cloned().collect();
        for n in names {
            if out.actors.len() > 1 && rng.gen_bool(0.3) {
                out.actors.remove(&n);
            }
        }
    }
    for t in out.actors.values_mut() {
        t.queue.retain(|_| rng.gen_bool(0.7));
    }
    out
}

fn ordering_axioms() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut related = 0;
    let programs: Vec<Program> = ["pingpong.act", "prodcons.act", "taskmanager_roba.act", "register.act", "merger.act"]
        .iter()
        .map(|n| common::corpus_program(n))
        .collect();
    for i in 0..1000 {
        let prog = &programs[i % programs.len()];
        let mf = prog.main_free();
        let space = explore(prog, initial_configuration(prog), 300);
        let c = space.states.choose(&mut rng).unwrap().clone();
        let mode = if i % 2 == 0 { Mode::Concrete } else { Mode::Abstract };
        let ok = match mode {
            Mode::Concrete => {
                let b = if i % 4 == 0 { weaken(&mut rng, &c, false) } else { space.states.choose(&mut rng).unwrap().clone() };
                let a = weaken(&mut rng, &b, false);
                related += usize::from(config_leq(&a, &b, mode, &mf) && config_leq(&b, &c, mode, &mf));
                axioms(&a, &b, &c, mode, &mf)
            }
            Mode::Abstract => {
                let c = abstract_of(&c);
                let b = weaken(&mut rng, &c, true);
                let a = weaken(&mut rng, &b, true);
                related += usize::from(config_leq(&a, &b, mode, &mf) && config_leq(&b, &c, mode, &mf));
                axioms(&a, &b, &c, mode, &mf)
            }
        };
        if !ok {
            return Err(format!("triple {i} violates reflexivity or transitivity"));
        }
    }
    let mut frt = Vec::new();
    let mut dir: Vec<_> = std::fs::read_dir(common::corpus_dir()).unwrap().map(|e| e.unwrap().path()).collect();
    dir.sort();
    for path in dir.iter().filter(|p| p.extension().is_some_and(|x| x == "act")) {
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        let prog = common::corpus_program(&name);
        if classify(&prog).decidable() == Decidable::Undecidable {
            continue;
        }
        let t0 = Instant::now();
        let r = decide_termination(&prog);
        let elapsed = t0.elapsed();
        if r.verdict == Verdict::Unknown || (!cfg!(debug_assertions) && elapsed > Duration::from_secs(60)) {
            return Err(format!("tree construction for {name} did not halt in time ({elapsed:.1?})"));
        }
        frt.push(format!("{name} {}", r.verdict.tag()));
    }
    Ok(format!("1000 triples ({related} related chains); tree halts on {}", frt.join(", ")))
}

fn axioms<M: QueueItem>(a: &Config<M>, b: &Config<M>, c: &Config<M>, mode: Mode, mf: &BTreeSet<VarName>) -> bool {
    let reflexive = [a, b, c].iter().all(|x| config_leq(*x, *x, mode, mf));
    let transitive = !(config_leq(a, b, mode, mf) && config_leq(b, c, mode, mf)) || config_leq(a, c, mode, mf);
    reflexive && transitive
}

fn main() {
    let criteria = [
        Criterion { id: 1, name: "golden equivalence examples", limit: Duration::from_secs(1), run: golden_examples },
        Criterion { id: 2, name: "equivalence oracle", limit: Duration::from_secs(30), run: equivalence_oracle },
        Criterion { id: 3, name: "Bell bound", limit: Duration::from_secs(10), run: bell_bound },
        Criterion { id: 4, name: "counter-machine simulation", limit: Duration::from_secs(120), run: cm_simulation },
        Criterion { id: 5, name: "counter-machine determinism", limit: Duration::from_secs(120), run: cm_determinism },
        Criterion { id: 6, name: "deciders vs exhaustive exploration", limit: Duration::from_secs(300), run: decider_oracle },
        Criterion { id: 7, name: "divergence witness", limit: Duration::from_secs(5), run: divergence_witness },
        Criterion { id: 8, name: "abstraction commutes with steps", limit: Duration::from_secs(60), run: omega_commutation },
        Criterion { id: 9, name: "root diamond", limit: Duration::from_secs(30), run: diamond },
        Criterion { id: 10, name: "ordering axioms and tree halting", limit: Duration::from_secs(600), run: ordering_axioms },
    ];
    let only: Option<Vec<u32>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let selected = |id: u32| only.as_ref().is_none_or(|o| o.contains(&id));
    let enforce_time = !cfg!(debug_assertions);
    let mut failed = Vec::new();
    for c in criteria.iter().filter(|c| selected(c.id)) {
        let t0 = Instant::now();
        let result = (c.run)();
        let elapsed = t0.elapsed();
        let (mut pass, detail) = match result {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        let mut timing = format!("{elapsed:.2?} / limit {:?}", c.limit);
        if elapsed > c.limit {
            if enforce_time {
                pass = false;
                timing.push_str(", over the limit");
            } else {
                timing.push_str(", over the limit in a debug build");
            }
        }
        println!("{} [{}] {}: {detail} ({timing})", if pass { "PASS" } else { "FAIL" }, c.id, c.name);
        if !pass {
            failed.push(c.id);
        }
    }
    let expected: Vec<u32> = KNOWN_FAILING.iter().copied().filter(|&id| selected(id)).collect();
    if failed != expected {
        eprintln!("failing criteria {failed:?} differ from the known failures {expected:?}");
        std::process::exit(1);
    }
    println!("acceptance: failures match the known failures {expected:?}");
}
