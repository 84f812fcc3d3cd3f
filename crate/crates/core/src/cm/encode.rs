//! Compilation of counter machines into actor programs, the reference
//! encodings of machine states as configurations, and the checks used to
//! relate actor runs back to machine runs.

use std::collections::{BTreeMap, HashSet, VecDeque};

use super::{CmState, CounterMachine, Instr};
use crate::semantics::{successors, ActorTerm, Allocator, ConcreteConfig, Config, Message, State};
use crate::syntax::{
    alpha_equal, parse_process, parse_program, subst_this, substitute, ActorName, ClassName,
    FieldName, Process, Program, Subst, Value, VarName,
};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum EncodeMode {
    /// Bounded actors with faulty registers kept in message queues.
    Ba,
    /// Read-only fields with registers kept as stacks of actors.
    Ro,
}

fn stm(i: usize) -> String {
    format!("stm_{i}")
}

fn ba_instr_src(m: &CounterMachine, i: usize) -> String {
    match m.instr(i).expect("instruction exists") {
        Instr::Inc(r) => format!("@r{r}!inc(@{}, tt, ff)", stm(i + 1)),
        Instr::DecJump(r, k) => format!("@r{r}!decjump(@{}, @{}, tt, ff)", stm(i + 1), stm(k)),
        Instr::Halt => "this!halt()".to_string(),
    }
}

fn ro_instr_src(m: &CounterMachine, i: usize) -> String {
    match m.instr(i).expect("instruction exists") {
        Instr::Inc(1) => format!("this!run(new R(r1), r2, @{})", stm(i + 1)),
        Instr::Inc(_) => format!("this!run(r1, new R(r2), @{})", stm(i + 1)),
        Instr::DecJump(1, k) => {
            format!(
                "if r1 = @nil then this!run(r1, r2, @{}) else r1!dec_1(this, r2, @{})",
                stm(k),
                stm(i + 1)
            )
        }
        Instr::DecJump(_, k) => {
            format!(
                "if r2 = @nil then this!run(r1, r2, @{}) else r2!dec_2(this, r1, @{})",
                stm(k),
                stm(i + 1)
            )
        }
        Instr::Halt => "0".to_string(),
    }
}

/// The dispatch chain `if pc = @stm_1 then I_1 else if ... else 0`.
fn dispatch(m: &CounterMachine, instr: impl Fn(usize) -> String) -> String {
    let mut body = "0".to_string();
    for i in (1..=m.len()).rev() {
        body = format!("if pc = @{} then ({}) else ({body})", stm(i), instr(i));
    }
    body
}

fn stm_list(m: &CounterMachine) -> String {
    (1..=m.len()).map(stm).collect::<Vec<_>>().join(", ")
}

fn x_list(m: &CounterMachine) -> String {
    (1..=m.len())
        .map(|i| format!("x{i}"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Encode a faulty machine with registers held as `item` messages in the
/// queues of two bounded register actors.
pub fn compile_ba(m: &CounterMachine) -> Program {
    let src = format!(
        "class R(dec, ctr, loop, stop) {{
  def item(tt, ff) = if @stop = ff then (if @dec = ff then this!item(tt, ff) else @dec <- ff . 0)
  def inc(pc, tt, ff) = if @stop = ff then @loop <- ff . this!item(tt, ff) . @ctr!run(pc, tt, ff)
  def decjump(pc, pc2, tt, ff) = if @stop = ff then @loop <- ff . @dec <- tt . this!checkzero(pc, pc2, tt, ff)
  def checkzero(pc, pc2, tt, ff) = if @stop = ff then @loop <- ff .
    (if @dec = tt then @ctr!run(pc2, tt, ff) . @dec <- ff . 0 else @ctr!run(pc, tt, ff))
  def init(tt, ff, ctrl) = @dec <- ff . @ctr <- ctrl . @loop <- ff . @stop <- ff . this!bottom(tt, ff)
  def bottom(tt, ff) = if @loop = ff then @loop <- tt . this!bottom(tt, ff) else @stop <- tt . 0
}}
class Ctrl({stms}, r1, r2) {{
  def run(pc, tt, ff) = {run}
  def init() = @r1!init(tt, ff, this) . @r2!init(tt, ff, this) . this!run(@stm_1, tt, ff)
  def halt() = 0
}}
main {{ let x = new Ctrl({xs}, new R(z1, z2, z3, z4), new R(z5, z6, z7, z8)) in x!init() }}
",
        stms = stm_list(m),
        run = dispatch(m, |i| ba_instr_src(m, i)),
        xs = x_list(m),
    );
    parse_program(&src).expect("generated program is well formed")
}

/// Encode an exact machine with registers held as stacks of actors linked by
/// a read-only `next` field.
pub fn compile_ro(m: &CounterMachine) -> Program {
    let src = format!(
        "class R(next) {{
  def dec_1(ctrl, r, stm) = ctrl!run(@next, r, stm)
  def dec_2(ctrl, r, stm) = ctrl!run(r, @next, stm)
}}
class Ctrl({stms}, nil) {{
  def run(r1, r2, pc) = {run}
}}
main {{ let x = new Ctrl({xs}, nil) in x!run(nil, nil, x1) }}
",
        stms = stm_list(m),
        run = dispatch(m, |i| ro_instr_src(m, i)),
        xs = x_list(m),
    );
    parse_program(&src).expect("generated program is well formed")
}

fn ctrl() -> ActorName {
    ActorName::new("Ctrl", 0)
}

fn reg(k: u32) -> ActorName {
    ActorName::new("R", k)
}

fn tt() -> Value {
    Value::Var(VarName::Fresh(0))
}

fn ff() -> Value {
    Value::Var(VarName::Fresh(1))
}

fn var(s: &str) -> Value {
    Value::var(s)
}

fn fvar(s: &str) -> FieldName {
    FieldName::new(s)
}

/// The process of the controller right after dispatching instruction `i`.
fn ba_instr_process(m: &CounterMachine, i: usize) -> Process {
    let p = subst_this(
        &parse_process(&ba_instr_src(m, i)).expect("instruction parses"),
        &ctrl(),
    );
    let s: Subst = [(VarName::named("tt"), tt()), (VarName::named("ff"), ff())]
        .into_iter()
        .collect();
    substitute(&p, &s)
}

fn ro_instr_process(m: &CounterMachine, i: usize, r1: &Value, r2: &Value) -> Process {
    let p = subst_this(
        &parse_process(&ro_instr_src(m, i)).expect("instruction parses"),
        &ctrl(),
    );
    let s: Subst = [
        (VarName::named("r1"), r1.clone()),
        (VarName::named("r2"), r2.clone()),
    ]
    .into_iter()
    .collect();
    substitute(&p, &s)
}

fn ctrl_state_ba(m: &CounterMachine) -> State {
    let mut st: State = (1..=m.len())
        .map(|i| (fvar(&stm(i)), var(&format!("x{i}"))))
        .collect();
    st.insert(fvar("r1"), Value::Actor(reg(0)));
    st.insert(fvar("r2"), Value::Actor(reg(1)));
    st
}

fn ctrl_state_ro(m: &CounterMachine) -> State {
    let mut st: State = (1..=m.len())
        .map(|i| (fvar(&stm(i)), var(&format!("x{i}"))))
        .collect();
    st.insert(fvar("nil"), var("nil"));
    st
}

fn reg_state(faulty: bool) -> State {
    let (stop, lp) = if faulty { (tt(), tt()) } else { (ff(), ff()) };
    [
        (fvar("stop"), stop),
        (fvar("loop"), lp),
        (fvar("dec"), ff()),
        (fvar("ctr"), Value::Actor(ctrl())),
    ]
    .into_iter()
    .collect()
}

fn reg_queue(v: u64) -> VecDeque<Message> {
    let mut q = VecDeque::new();
    q.push_back(Message::new("bottom", vec![tt(), ff()]));
    for _ in 0..v {
        q.push_back(Message::new("item", vec![tt(), ff()]));
    }
    q
}

fn reg_term(v: Option<u64>) -> ActorTerm<Message> {
    match v {
        Some(n) => ActorTerm {
            process: Process::Nil,
            sigma: Vec::new(),
            state: reg_state(false),
            queue: reg_queue(n),
        },
        None => ActorTerm::idle(reg_state(true)),
    }
}

/// The reference configuration encoding a machine state.
///
/// In `Ba` mode the controller has just dispatched instruction `pc` (or is
/// idle when `pc = 0`) and each register queue holds `bottom` followed by one
/// `item` per unit. In `Ro` mode the registers are stacks `R#0..` (register 1
/// first, top first), and ⊥ is not representable. Returns `None` for states
/// outside the encodable shape.
pub fn encode_cm_state(m: &CounterMachine, s: CmState, mode: EncodeMode) -> Option<ConcreteConfig> {
    let mut actors = BTreeMap::new();
    actors.insert(ActorName::root(), ActorTerm::idle(State::new()));
    match mode {
        EncodeMode::Ba => {
            let process = if s.pc == 0 {
                Process::Nil
            } else {
                m.instr(s.pc).map(|_| ba_instr_process(m, s.pc))?
            };
            actors.insert(
                ctrl(),
                ActorTerm {
                    process,
                    sigma: Vec::new(),
                    state: ctrl_state_ba(m),
                    queue: VecDeque::new(),
                },
            );
            actors.insert(reg(0), reg_term(s.v1));
            actors.insert(reg(1), reg_term(s.v2));
            let alloc = Allocator {
                next: [(ClassName::new("R"), 2), (ClassName::new("Ctrl"), 1)]
                    .into_iter()
                    .collect(),
                next_fresh: 2,
            };
            Some(Config { actors, alloc })
        }
        EncodeMode::Ro => {
            let (v1, v2) = (s.v1?, s.v2?);
            m.instr(s.pc)?;
            let mut next_index = 0u32;
            let mut push_stack =
                |len: u64, actors: &mut BTreeMap<ActorName, ActorTerm<Message>>| -> Value {
                    let names: Vec<ActorName> = (0..len)
                        .map(|_| {
                            let a = reg(next_index);
                            next_index += 1;
                            a
                        })
                        .collect();
                    for (j, a) in names.iter().enumerate() {
                        let next = names
                            .get(j + 1)
                            .map(|b| Value::Actor(b.clone()))
                            .unwrap_or_else(|| var("nil"));
                        actors.insert(
                            a.clone(),
                            ActorTerm::idle([(fvar("next"), next)].into_iter().collect()),
                        );
                    }
                    names
                        .first()
                        .map(|a| Value::Actor(a.clone()))
                        .unwrap_or_else(|| var("nil"))
                };
            let r1 = push_stack(v1, &mut actors);
            let r2 = push_stack(v2, &mut actors);
            let process = ro_instr_process(m, s.pc, &r1, &r2);
            actors.insert(
                ctrl(),
                ActorTerm {
                    process,
                    sigma: Vec::new(),
                    state: ctrl_state_ro(m),
                    queue: VecDeque::new(),
                },
            );
            let mut next = BTreeMap::new();
            next.insert(ClassName::new("Ctrl"), 1);
            if next_index > 0 {
                next.insert(ClassName::new("R"), next_index);
            }
            Some(Config {
                actors,
                alloc: Allocator {
                    next,
                    next_fresh: 0,
                },
            })
        }
    }
}

/// The machine state whose `Ba` encoding is exactly this configuration
/// (allocator ignored), if any.
pub fn ba_checkpoint(m: &CounterMachine, c: &ConcreteConfig) -> Option<CmState> {
    let ct = c.get(&ctrl())?;
    let pc = if ct.process.is_nil() {
        0
    } else {
        (1..=m.len()).find(|&i| alpha_equal(&ct.process, &ba_instr_process(m, i)))?
    };
    let decode = |a: &ActorName| -> Option<Option<u64>> {
        let t = c.get(a)?;
        if t.state.get(&fvar("stop")) == Some(&tt()) {
            Some(None)
        } else {
            Some(Some(t.queue.len().checked_sub(1)? as u64))
        }
    };
    let s = CmState {
        pc,
        v1: decode(&reg(0))?,
        v2: decode(&reg(1))?,
    };
    let expected = encode_cm_state(m, s, EncodeMode::Ba)?;
    same_actors(&expected, c).then_some(s)
}

fn same_actors(a: &ConcreteConfig, b: &ConcreteConfig) -> bool {
    a.actors.len() == b.actors.len()
        && a.actors.iter().zip(&b.actors).all(|((n1, t1), (n2, t2))| {
            n1 == n2
                && t1.state == t2.state
                && t1.queue == t2.queue
                && alpha_equal(&t1.process, &t2.process)
        })
}

/// Search for a run `⟦s⟧ →⁺ ⟦t⟧` of the `Ba` encoding, breadth first, for
/// at most `max_depth` actor steps. Runs in which the controller dispatches
/// an instruction other than the source or the target, or a register becomes faulty while
/// the target keeps it sound, are cut. Returns the length of a shortest run.
pub fn simulate_ba_step(
    program: &Program,
    m: &CounterMachine,
    s: CmState,
    t: CmState,
    max_depth: usize,
) -> Option<usize> {
    let start = encode_cm_state(m, s, EncodeMode::Ba)?;
    let target = encode_cm_state(m, t, EncodeMode::Ba)?;
    let checkpoints: Vec<Process> = (1..=m.len()).map(|i| ba_instr_process(m, i)).collect();
    let faulted = |c: &ConcreteConfig, r: u32| {
        c.get(&reg(r)).and_then(|x| x.state.get(&fvar("stop"))) == Some(&tt())
    };
    let (start_cp, target_cp) = (
        start.get(&ctrl())?.process.clone(),
        target.get(&ctrl())?.process.clone(),
    );
    let prune = |c: &ConcreteConfig| {
        let cp = &c.get(&ctrl()).expect("controller exists").process;
        let passed = *cp != start_cp && *cp != target_cp && checkpoints.iter().any(|q| q == cp);
        passed || (t.v1.is_some() && faulted(c, 0)) || (t.v2.is_some() && faulted(c, 1))
    };
    let mut seen: HashSet<BTreeMap<ActorName, ActorTerm<Message>>> = HashSet::new();
    seen.insert(start.actors.clone());
    let mut frontier = vec![start];
    for depth in 1..=max_depth {
        let mut next = Vec::new();
        for c in &frontier {
            for step in successors(program, c).steps {
                let d = step.config;
                if same_actors(&d, &target) {
                    return Some(depth);
                }
                if prune(&d) || !seen.insert(d.actors.clone()) {
                    continue;
                }
                next.push(d);
            }
        }
        if next.is_empty() {
            return None;
        }
        frontier = next;
    }
    None
}

/// Decode an `Ro` checkpoint: the controller idle with exactly one pending
/// `run(r1, r2, pc)` and both stacks well formed. Returns the machine state and
/// the two stack tops.
pub fn ro_checkpoint(m: &CounterMachine, c: &ConcreteConfig) -> Option<(CmState, Value, Value)> {
    let ct = c.get(&ctrl())?;
    if !ct.process.is_nil() || ct.queue.len() != 1 {
        return None;
    }
    let msg = &ct.queue[0];
    if msg.method.as_str() != "run" || msg.args.len() != 3 {
        return None;
    }
    let pc = (1..=m.len()).find(|i| msg.args[2] == var(&format!("x{i}")))?;
    let v1 = stack_len(c, &msg.args[0])?;
    let v2 = stack_len(c, &msg.args[1])?;
    Some((
        CmState {
            pc,
            v1: Some(v1),
            v2: Some(v2),
        },
        msg.args[0].clone(),
        msg.args[1].clone(),
    ))
}

fn stack_len(c: &ConcreteConfig, top: &Value) -> Option<u64> {
    let mut cur = top.clone();
    let mut n = 0u64;
    while cur != var("nil") {
        let a = cur.as_actor()?;
        if a.class.as_str() != "R" || n as usize > c.actors.len() {
            return None;
        }
        cur = c.get(a)?.state.get(&fvar("next"))?.clone();
        n += 1;
    }
    Some(n)
}

/// Whether `c` is the `Ro` encoding of `s` with stack tops `r1`, `r2`, up to
/// garbage: every register actor off the two stacks must be idle.
pub fn ro_encoding_holds(
    m: &CounterMachine,
    s: CmState,
    r1: &Value,
    r2: &Value,
    c: &ConcreteConfig,
) -> bool {
    let Some(root) = c.get(&ActorName::root()) else {
        return false;
    };
    let Some(ct) = c.get(&ctrl()) else {
        return false;
    };
    if !root.is_idle() || !ct.queue.is_empty() || ct.state != ctrl_state_ro(m) {
        return false;
    }
    if m.instr(s.pc).is_none() || !alpha_equal(&ct.process, &ro_instr_process(m, s.pc, r1, r2)) {
        return false;
    }
    if stack_len(c, r1) != s.v1 || stack_len(c, r2) != s.v2 {
        return false;
    }
    c.actors.iter().all(|(a, t)| {
        a.is_root()
            || *a == ctrl()
            || (a.class.as_str() == "R" && t.is_idle() && t.state.len() == 1)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fragments::classify;
    use crate::semantics::{run, Outcome, Policy};

    fn machine(src: &str, faulty: bool) -> CounterMachine {
        CounterMachine::parse(src, faulty).unwrap()
    }

    #[test]
    fn fragments_of_encodings() {
        let m = machine("1: INC 1\n2: HALT", true);
        let f = classify(&compile_ba(&m));
        assert!(f.ba && !f.ro && !f.sl);
        let f = classify(&compile_ro(&m));
        assert!(!f.ba && f.ro && !f.sl);
    }

    #[test]
    fn ba_initial_reaches_first_encoding() {
        let m = machine("1: INC 1\n2: HALT", true);
        let p = compile_ba(&m);
        let mut seen = HashSet::new();
        let mut frontier = vec![crate::semantics::initial_configuration(&p)];
        let mut hit = false;
        for _ in 0..40 {
            let mut next = Vec::new();
            for c in &frontier {
                for st in successors(&p, c).steps {
                    hit |= ba_checkpoint(&m, &st.config) == Some(CmState::initial());
                    if seen.insert(st.config.actors.clone()) {
                        next.push(st.config);
                    }
                }
            }
            frontier = next;
        }
        assert!(hit, "the encoding of (1,0,0) is reached");
    }

    #[test]
    fn ba_halting_machine_reaches_quiescence() {
        let m = machine("1: HALT", true);
        let p = compile_ba(&m);
        let t = run(&p, &Policy::DeterministicFirst, 200);
        assert!(t
            .events
            .iter()
            .any(|e| e.label.rule == crate::semantics::Rule::Inst
                && e.config.get(&ctrl()).is_some_and(|c| c.process.is_nil())));
        assert!(matches!(
            t.outcome,
            Outcome::Quiescent | Outcome::BudgetExhausted
        ));
    }

    #[test]
    fn ba_encoding_shapes() {
        let m = machine("1: INC 1\n2: HALT", true);
        let c = encode_cm_state(
            &m,
            CmState {
                pc: 1,
                v1: Some(0),
                v2: Some(0),
            },
            EncodeMode::Ba,
        )
        .unwrap();
        assert_eq!(c.get(&reg(0)).unwrap().queue, reg_queue(0));
        let c = encode_cm_state(
            &m,
            CmState {
                pc: 1,
                v1: None,
                v2: Some(2),
            },
            EncodeMode::Ba,
        )
        .unwrap();
        assert_eq!(c.get(&reg(0)).unwrap().state[&fvar("stop")], tt());
        assert!(c.get(&reg(0)).unwrap().queue.is_empty());
        let c = encode_cm_state(
            &m,
            CmState {
                pc: 0,
                v1: None,
                v2: Some(2),
            },
            EncodeMode::Ba,
        )
        .unwrap();
        assert!(c.get(&ctrl()).unwrap().process.is_nil());
    }

    #[test]
    fn ba_simulates_inc() {
        let m = machine("1: INC 1\n2: HALT", true);
        let p = compile_ba(&m);
        let s = CmState::initial();
        let t = CmState {
            pc: 2,
            v1: Some(1),
            v2: Some(0),
        };
        assert!(simulate_ba_step(&p, &m, s, t, 500).is_some());
        let bot = CmState {
            pc: 1,
            v1: None,
            v2: Some(0),
        };
        assert!(simulate_ba_step(&p, &m, s, bot, 500).is_some());
    }

    #[test]
    fn ro_run_follows_machine() {
        let m = machine(include_str!("../../corpus/incdec.cm"), false);
        let p = compile_ro(&m);
        let t = run(&p, &Policy::DeterministicFirst, 500);
        assert_eq!(t.outcome, Outcome::Quiescent);
        let cps: Vec<CmState> = t
            .events
            .iter()
            .filter_map(|e| ro_checkpoint(&m, &e.config).map(|x| x.0))
            .collect();
        let (oracle, halted) = m.run_exact(100);
        assert!(halted);
        assert_eq!(cps, oracle);
    }

    #[test]
    fn ro_encoding_of_initial_state() {
        let m = machine("1: HALT", false);
        let c = encode_cm_state(&m, CmState::initial(), EncodeMode::Ro).unwrap();
        assert!(ro_encoding_holds(
            &m,
            CmState::initial(),
            &var("nil"),
            &var("nil"),
            &c
        ));
    }
}
