//! Configurations and the one-step transition relation.
//!
//! One engine serves three semantics, selected by the queue item type:
//! plain messages (concrete), messages carrying a decoration (decorated), and
//! messages carrying a decoration plus their intended target (abstract, with
//! inexact delivery to any actor of the target's class).

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::syntax::{
    free_vars_ordered, subst_this, substitute, ActorName, ClassName, Expr, FieldName, MethodName,
    Process, Program, Subst, Value, VarName,
};

/// A decoration: a causal path of step counters. Empty means "not tracked".
pub type Decoration = Vec<u32>;

/// Render a decoration as dotted naturals (`0.3.0.2`).
pub fn render_decoration(sigma: &[u32]) -> String {
    sigma
        .iter()
        .map(|n| n.to_string())
        .collect::<Vec<_>>()
        .join(".")
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Message {
    pub method: MethodName,
    pub args: Vec<Value>,
}

impl Message {
    pub fn new(method: &str, args: Vec<Value>) -> Self {
        Message {
            method: MethodName::new(method),
            args,
        }
    }
}

impl fmt::Display for Message {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.method)?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")
    }
}

impl fmt::Debug for Message {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct DecoratedMessage {
    pub msg: Message,
    pub sigma: Decoration,
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct AbstractMessage {
    pub msg: Message,
    pub sigma: Decoration,
    pub target: ActorName,
}

/// A queue entry of one of the three semantics.
pub trait QueueItem: Clone + Eq + Ord + std::hash::Hash + fmt::Debug {
    /// Delivery is inexact: any actor of the target's class may receive.
    const BY_CLASS: bool;
    /// Entries carry a decoration.
    const DECORATED: bool;
    fn build(msg: Message, sigma: Decoration, target: &ActorName) -> Self;
    fn message(&self) -> &Message;
    fn sigma(&self) -> &[u32];
    /// The intended target, when the entry records one.
    fn target(&self) -> Option<&ActorName>;
}

impl QueueItem for Message {
    const BY_CLASS: bool = false;
    const DECORATED: bool = false;
    fn build(msg: Message, _: Decoration, _: &ActorName) -> Self {
        msg
    }
    fn message(&self) -> &Message {
        self
    }
    fn sigma(&self) -> &[u32] {
        &[]
    }
    fn target(&self) -> Option<&ActorName> {
        None
    }
}

impl QueueItem for DecoratedMessage {
    const BY_CLASS: bool = false;
    const DECORATED: bool = true;
    fn build(msg: Message, sigma: Decoration, _: &ActorName) -> Self {
        DecoratedMessage { msg, sigma }
    }
    fn message(&self) -> &Message {
        &self.msg
    }
    fn sigma(&self) -> &[u32] {
        &self.sigma
    }
    fn target(&self) -> Option<&ActorName> {
        None
    }
}

impl QueueItem for AbstractMessage {
    const BY_CLASS: bool = true;
    const DECORATED: bool = true;
    fn build(msg: Message, sigma: Decoration, target: &ActorName) -> Self {
        AbstractMessage {
            msg,
            sigma,
            target: target.clone(),
        }
    }
    fn message(&self) -> &Message {
        &self.msg
    }
    fn sigma(&self) -> &[u32] {
        &self.sigma
    }
    fn target(&self) -> Option<&ActorName> {
        Some(&self.target)
    }
}

pub type State = BTreeMap<FieldName, Value>;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ActorTerm<M> {
    pub process: Process,
    /// Decoration of the process; empty when decorations are not tracked.
    pub sigma: Decoration,
    pub state: State,
    pub queue: VecDeque<M>,
}

impl<M> ActorTerm<M> {
    pub fn idle(state: State) -> Self {
        ActorTerm {
            process: Process::Nil,
            sigma: Vec::new(),
            state,
            queue: VecDeque::new(),
        }
    }

    pub fn is_idle(&self) -> bool {
        self.process.is_nil() && self.queue.is_empty()
    }
}

/// Fresh-name allocation: the next unused index per class and the next
/// unused fresh variable.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Allocator {
    pub next: BTreeMap<ClassName, u32>,
    pub next_fresh: u32,
}

impl Allocator {
    pub fn fresh_actor(&mut self, class: &ClassName) -> ActorName {
        let k = self.next.entry(class.clone()).or_insert(0);
        let a = ActorName::new(class.clone(), *k);
        *k += 1;
        a
    }

    pub fn fresh_var(&mut self) -> VarName {
        let v = VarName::Fresh(self.next_fresh);
        self.next_fresh += 1;
        v
    }

    /// The least allocator that dominates every name in use.
    pub fn covering<M: QueueItem>(actors: &BTreeMap<ActorName, ActorTerm<M>>) -> Self {
        let mut a = Allocator::default();
        let bump_var = |v: &Value, a: &mut Allocator| match v {
            Value::Var(VarName::Fresh(k)) => a.next_fresh = a.next_fresh.max(k + 1),
            Value::Actor(n) => {
                let e = a.next.entry(n.class.clone()).or_insert(0);
                *e = (*e).max(n.index + 1);
            }
            _ => {}
        };
        for (name, t) in actors {
            bump_var(&Value::Actor(name.clone()), &mut a);
            for v in crate::syntax::free_names(&t.process) {
                bump_var(&v, &mut a);
            }
            for v in t.state.values() {
                bump_var(v, &mut a);
            }
            for m in &t.queue {
                for v in &m.message().args {
                    bump_var(v, &mut a);
                }
                if let Some(tg) = m.target() {
                    bump_var(&Value::Actor(tg.clone()), &mut a);
                }
            }
        }
        a.next.remove(&ClassName::root());
        a
    }
}

/// A configuration: a finite set of actor terms keyed by name.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Config<M> {
    pub actors: BTreeMap<ActorName, ActorTerm<M>>,
    pub alloc: Allocator,
}

pub type ConcreteConfig = Config<Message>;
pub type DecoratedConfig = Config<DecoratedMessage>;
pub type AbstractConfig = Config<AbstractMessage>;

impl<M: QueueItem> Config<M> {
    /// The root alone, running the main process.
    pub fn initial(program: &Program, decorated: bool) -> Self {
        let mut actors = BTreeMap::new();
        let sigma = if decorated { vec![0] } else { Vec::new() };
        actors.insert(
            ActorName::root(),
            ActorTerm {
                process: program.main.clone(),
                sigma,
                state: State::new(),
                queue: VecDeque::new(),
            },
        );
        Config {
            actors,
            alloc: Allocator::default(),
        }
    }

    pub fn get(&self, a: &ActorName) -> Option<&ActorTerm<M>> {
        self.actors.get(a)
    }

    /// Apply `f` to every decoration, on processes and queued entries.
    pub fn map_items<N: QueueItem>(
        &self,
        mut f: impl FnMut(&ActorName, &M) -> N,
        keep_sigma: bool,
    ) -> Config<N> {
        let actors = self
            .actors
            .iter()
            .map(|(a, t)| {
                let term = ActorTerm {
                    process: t.process.clone(),
                    sigma: if keep_sigma {
                        t.sigma.clone()
                    } else {
                        Vec::new()
                    },
                    state: t.state.clone(),
                    queue: t.queue.iter().map(|m| f(a, m)).collect(),
                };
                (a.clone(), term)
            })
            .collect();
        Config {
            actors,
            alloc: self.alloc.clone(),
        }
    }
}

/// The initial configuration of a program under the concrete semantics.
pub fn initial_configuration(program: &Program) -> ConcreteConfig {
    Config::initial(program, false)
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Rule {
    Upd,
    Let,
    InvkS,
    Invk,
    Inst,
    Match,
    MMatch,
    PlusL,
    PlusR,
}

impl Rule {
    pub fn tag(self) -> &'static str {
        match self {
            Rule::Upd => "upd",
            Rule::Let => "let",
            Rule::InvkS => "invk-s",
            Rule::Invk => "invk",
            Rule::Inst => "inst",
            Rule::Match => "match",
            Rule::MMatch => "mmatch",
            Rule::PlusL => "plus-l",
            Rule::PlusR => "plus-r",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// The label of a transition: the acting actor, the fired rule, the new
/// decoration of the acting process, and the emitted message with its
/// intended target, if any.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Label {
    pub rule: Rule,
    pub actor: ActorName,
    pub sigma: Decoration,
    pub emitted: Option<(Message, ActorName)>,
}

#[derive(Clone, Debug)]
pub struct Step<M> {
    pub label: Label,
    pub config: Config<M>,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum ErrorKind {
    NonActorTarget,
    UnknownRecipient,
    UnknownMethod,
    ArityMismatch,
    Internal,
}

impl ErrorKind {
    pub fn tag(self) -> &'static str {
        match self {
            ErrorKind::NonActorTarget => "non-actor-target",
            ErrorKind::UnknownRecipient => "unknown-recipient",
            ErrorKind::UnknownMethod => "unknown-method",
            ErrorKind::ArityMismatch => "arity-mismatch",
            ErrorKind::Internal => "internal",
        }
    }
}

/// An actor that cannot move because its next action is erroneous.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ErrorMarker {
    pub actor: ActorName,
    pub kind: ErrorKind,
    pub detail: String,
}

impl fmt::Display for ErrorMarker {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}: {}", self.kind.tag(), self.actor, self.detail)
    }
}

#[derive(Clone, Debug)]
pub struct Successors<M> {
    pub steps: Vec<Step<M>>,
    pub errors: Vec<ErrorMarker>,
}

impl<M> Successors<M> {
    pub fn is_terminal(&self) -> bool {
        self.steps.is_empty()
    }
}

fn err(actor: &ActorName, kind: ErrorKind, detail: impl Into<String>) -> ErrorMarker {
    ErrorMarker {
        actor: actor.clone(),
        kind,
        detail: detail.into(),
    }
}

/// Evaluate an expression in the state of `actor`, allocating new actors
/// left to right, depth first.
pub fn evaluate<M: QueueItem>(
    program: &Program,
    e: &Expr,
    actor: &ActorName,
    state: &State,
    alloc: &mut Allocator,
    created: &mut Vec<(ActorName, ActorTerm<M>)>,
) -> Result<Value, ErrorMarker> {
    match e {
        Expr::Var(x) => Ok(Value::Var(x.clone())),
        Expr::Actor(a) => Ok(Value::Actor(a.clone())),
        Expr::Field(f) => state.get(f).cloned().ok_or_else(|| {
            err(
                actor,
                ErrorKind::Internal,
                format!("field `@{f}` is not in the state"),
            )
        }),
        Expr::This => Err(err(actor, ErrorKind::Internal, "`this` at run time")),
        Expr::New(c, args) => {
            let cd = program
                .class(c)
                .ok_or_else(|| err(actor, ErrorKind::Internal, format!("unknown class `{c}`")))?;
            if cd.fields.len() != args.len() {
                return Err(err(
                    actor,
                    ErrorKind::Internal,
                    format!("arity mismatch in `new {c}`"),
                ));
            }
            let mut vals = Vec::with_capacity(args.len());
            for a in args {
                vals.push(evaluate(program, a, actor, state, alloc, created)?);
            }
            let name = alloc.fresh_actor(c);
            let st: State = cd.fields.iter().cloned().zip(vals).collect();
            created.push((name.clone(), ActorTerm::idle(st)));
            Ok(Value::Actor(name))
        }
    }
}

fn bump(sigma: &[u32]) -> Decoration {
    let mut s = sigma.to_vec();
    if let Some(last) = s.last_mut() {
        *last += 1;
    }
    s
}

/// Instantiate a method body for an incoming message: `this` becomes the
/// given actor, the remaining free non-parameter variables become fresh
/// variables (in order of first occurrence), and the parameters become the
/// arguments. The three replacements are simultaneous.
pub fn instantiate(
    body: &Process,
    params: &[VarName],
    args: &[Value],
    this: &ActorName,
    alloc: &mut Allocator,
) -> Process {
    let with_this = subst_this(body, this);
    let mut s = Subst::new();
    for y in free_vars_ordered(&with_this) {
        if !params.contains(&y) {
            s.insert(y, Value::Var(alloc.fresh_var()));
        }
    }
    for (x, u) in params.iter().zip(args) {
        s.insert(x.clone(), u.clone());
    }
    substitute(&with_this, &s)
}

/// All one-step successors of a configuration, in a fixed order: actors by
/// name, then the rule alternatives of that actor.
pub fn successors<M: QueueItem>(program: &Program, c: &Config<M>) -> Successors<M> {
    let mut out = Successors {
        steps: Vec::new(),
        errors: Vec::new(),
    };
    for (name, term) in &c.actors {
        match actor_steps(program, c, name, term) {
            Ok(mut steps) => out.steps.append(&mut steps),
            Err(e) => out.errors.push(e),
        }
    }
    out
}

/// The successors contributed by one actor.
pub fn actor_steps<M: QueueItem>(
    program: &Program,
    c: &Config<M>,
    name: &ActorName,
    term: &ActorTerm<M>,
) -> Result<Vec<Step<M>>, ErrorMarker> {
    let mut alloc = c.alloc.clone();
    let mut created: Vec<(ActorName, ActorTerm<M>)> = Vec::new();
    let tracked = !term.sigma.is_empty();
    let next_sigma = if tracked {
        bump(&term.sigma)
    } else {
        Vec::new()
    };
    let finish = |rule: Rule,
                  process: Process,
                  sigma: Decoration,
                  state: State,
                  created: Vec<(ActorName, ActorTerm<M>)>,
                  alloc: Allocator| {
        let mut cfg = Config {
            actors: c.actors.clone(),
            alloc,
        };
        let t = cfg.actors.get_mut(name).expect("acting actor exists");
        t.process = process;
        t.sigma = sigma.clone();
        t.state = state;
        cfg.actors.extend(created);
        Step {
            label: Label {
                rule,
                actor: name.clone(),
                sigma,
                emitted: None,
            },
            config: cfg,
        }
    };
    match &term.process {
        Process::Nil => {
            let Some(item) = term.queue.front() else {
                return Ok(Vec::new());
            };
            let msg = item.message();
            let Some(md) = program.method(&name.class, &msg.method) else {
                return Err(err(
                    name,
                    ErrorKind::UnknownMethod,
                    format!("no method `{}.{}`", name.class, msg.method),
                ));
            };
            if md.params.len() != msg.args.len() {
                return Err(err(
                    name,
                    ErrorKind::ArityMismatch,
                    format!(
                        "`{}.{}` takes {} argument(s), message has {}",
                        name.class,
                        msg.method,
                        md.params.len(),
                        msg.args.len()
                    ),
                ));
            }
            let this = item.target().unwrap_or(name);
            let body = instantiate(&md.body, &md.params, &msg.args, this, &mut alloc);
            let sigma = if M::DECORATED && !item.sigma().is_empty() {
                let mut s = item.sigma().to_vec();
                s.push(0);
                s
            } else {
                Vec::new()
            };
            let mut cfg = Config {
                actors: c.actors.clone(),
                alloc,
            };
            let t = cfg.actors.get_mut(name).expect("acting actor exists");
            t.queue.pop_front();
            t.process = body;
            t.sigma = sigma.clone();
            Ok(vec![Step {
                label: Label {
                    rule: Rule::Inst,
                    actor: name.clone(),
                    sigma,
                    emitted: None,
                },
                config: cfg,
            }])
        }
        Process::Update(f, e, cont) => {
            let u = evaluate(program, e, name, &term.state, &mut alloc, &mut created)?;
            if !term.state.contains_key(f) {
                return Err(err(
                    name,
                    ErrorKind::Internal,
                    format!("field `@{f}` is not in the state"),
                ));
            }
            let mut st = term.state.clone();
            st.insert(f.clone(), u);
            Ok(vec![finish(
                Rule::Upd,
                (**cont).clone(),
                next_sigma,
                st,
                created,
                alloc,
            )])
        }
        Process::Let(x, e, body) => {
            let u = evaluate(program, e, name, &term.state, &mut alloc, &mut created)?;
            let mut s = Subst::new();
            s.insert(x.clone(), u);
            Ok(vec![finish(
                Rule::Let,
                substitute(body, &s),
                next_sigma,
                term.state.clone(),
                created,
                alloc,
            )])
        }
        Process::Match(l, r, p, q) => {
            let u = evaluate(program, l, name, &term.state, &mut alloc, &mut created)?;
            let v = evaluate(program, r, name, &term.state, &mut alloc, &mut created)?;
            let (rule, next) = if u == v {
                (Rule::Match, p)
            } else {
                (Rule::MMatch, q)
            };
            Ok(vec![finish(
                rule,
                (**next).clone(),
                next_sigma,
                term.state.clone(),
                created,
                alloc,
            )])
        }
        Process::Choice(p, q) => Ok(vec![
            finish(
                Rule::PlusL,
                (**p).clone(),
                next_sigma.clone(),
                term.state.clone(),
                Vec::new(),
                alloc.clone(),
            ),
            finish(
                Rule::PlusR,
                (**q).clone(),
                next_sigma,
                term.state.clone(),
                Vec::new(),
                alloc,
            ),
        ]),
        Process::Invoke {
            target,
            method,
            args,
            cont,
        } => {
            let tv = evaluate(program, target, name, &term.state, &mut alloc, &mut created)?;
            let mut vals = Vec::with_capacity(args.len());
            for a in args {
                vals.push(evaluate(
                    program,
                    a,
                    name,
                    &term.state,
                    &mut alloc,
                    &mut created,
                )?);
            }
            let Value::Actor(tgt) = tv else {
                return Err(err(
                    name,
                    ErrorKind::NonActorTarget,
                    format!("invocation target `{tv}` is not an actor"),
                ));
            };
            let msg = Message {
                method: method.clone(),
                args: vals,
            };
            let mut base = Config {
                actors: c.actors.clone(),
                alloc,
            };
            {
                let t = base.actors.get_mut(name).expect("acting actor exists");
                t.process = (**cont).clone();
                t.sigma = next_sigma.clone();
            }
            base.actors.extend(created);
            let recipients: Vec<ActorName> = if M::BY_CLASS {
                base.actors
                    .keys()
                    .filter(|a| a.class == tgt.class)
                    .cloned()
                    .collect()
            } else if base.actors.contains_key(&tgt) {
                vec![tgt.clone()]
            } else {
                Vec::new()
            };
            if recipients.is_empty() {
                return Err(err(
                    name,
                    ErrorKind::UnknownRecipient,
                    format!("no recipient for `{tgt}`"),
                ));
            }
            let item = M::build(msg.clone(), next_sigma.clone(), &tgt);
            let label_base = Label {
                rule: Rule::Invk,
                actor: name.clone(),
                sigma: next_sigma,
                emitted: Some((msg, tgt)),
            };
            Ok(recipients
                .into_iter()
                .map(|r| {
                    let mut cfg = base.clone();
                    cfg.actors
                        .get_mut(&r)
                        .expect("recipient exists")
                        .queue
                        .push_back(item.clone());
                    let rule = if &r == name { Rule::InvkS } else { Rule::Invk };
                    Step {
                        label: Label {
                            rule,
                            ..label_base.clone()
                        },
                        config: cfg,
                    }
                })
                .collect())
        }
    }
}

/// True when no actor can move and no actor is stuck on an error.
pub fn is_quiescent<M: QueueItem>(program: &Program, c: &Config<M>) -> bool {
    let s = successors(program, c);
    s.steps.is_empty() && s.errors.is_empty()
}

// ---------------------------------------------------------------------------
// Decorations and the abstraction map

/// Reasons a configuration cannot be decorated.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum DecorationError {
    #[error("fragment: decorated semantics is defined for stateless programs only")]
    Fragment,
    #[error("no process carries decoration {0}")]
    NoSuchDecoration(String),
}

/// The initial decorated configuration: the root carries decoration `0`.
pub fn decorate_initial(program: &Program) -> Result<DecoratedConfig, DecorationError> {
    if !crate::fragments::classify(program).sl {
        return Err(DecorationError::Fragment);
    }
    Ok(Config::initial(program, true))
}

/// Attach to each queued message the name of the actor holding it.
pub fn omega(c: &DecoratedConfig) -> AbstractConfig {
    c.map_items(
        |holder, m| AbstractMessage {
            msg: m.msg.clone(),
            sigma: m.sigma.clone(),
            target: holder.clone(),
        },
        true,
    )
}

/// Drop decorations.
pub fn erase<M: QueueItem>(c: &Config<M>) -> ConcreteConfig {
    c.map_items(|_, m| m.message().clone(), false)
}

/// Drop decorations from an abstract configuration, keeping targets.
pub fn erase_abstract(c: &AbstractConfig) -> AbstractConfig {
    c.map_items(
        |_, m| AbstractMessage {
            msg: m.msg.clone(),
            sigma: Vec::new(),
            target: m.target.clone(),
        },
        false,
    )
}

/// The abstract image of a concrete configuration with decorations erased.
pub fn abstract_of(c: &ConcreteConfig) -> AbstractConfig {
    c.map_items(
        |holder, m| AbstractMessage {
            msg: m.clone(),
            sigma: Vec::new(),
            target: holder.clone(),
        },
        false,
    )
}

/// The process carrying decoration `sigma`.
pub fn project<M: QueueItem>(c: &Config<M>, sigma: &[u32]) -> Result<Process, DecorationError> {
    c.actors
        .values()
        .find(|t| t.sigma == sigma)
        .map(|t| t.process.clone())
        .ok_or_else(|| DecorationError::NoSuchDecoration(render_decoration(sigma)))
}

// ---------------------------------------------------------------------------
// Runs

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Policy {
    /// Always take the first successor.
    DeterministicFirst,
    /// Pick uniformly with a seeded generator.
    SeededRandom(u64),
    /// Follow the given successor indices, then stop.
    Guided(Vec<usize>),
}

#[derive(Clone, Debug)]
pub struct TraceEvent<M> {
    pub step: usize,
    pub label: Label,
    pub config: Config<M>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Quiescent,
    Error(Vec<ErrorMarker>),
    BudgetExhausted,
    ScriptEnded,
    /// A guided script named a successor that does not exist.
    ScriptInvalid {
        step: usize,
        index: usize,
        available: usize,
    },
}

#[derive(Clone, Debug)]
pub struct Trace<M> {
    pub initial: Config<M>,
    pub events: Vec<TraceEvent<M>>,
    pub outcome: Outcome,
}

impl<M> Trace<M> {
    pub fn last(&self) -> &Config<M> {
        self.events
            .last()
            .map(|e| &e.config)
            .unwrap_or(&self.initial)
    }
}

/// Execute from `init` under a scheduling policy for at most `budget` steps.
/// A configuration in which some actor is stuck on an error ends the run.
pub fn run_from<M: QueueItem>(
    program: &Program,
    init: Config<M>,
    policy: &Policy,
    budget: usize,
) -> Trace<M> {
    let mut rng = match policy {
        Policy::SeededRandom(seed) => Some(ChaCha8Rng::seed_from_u64(*seed)),
        _ => None,
    };
    let mut events = Vec::new();
    let mut cur = init.clone();
    let outcome = loop {
        let succ = successors(program, &cur);
        if !succ.errors.is_empty() {
            break Outcome::Error(succ.errors);
        }
        if succ.steps.is_empty() {
            break Outcome::Quiescent;
        }
        if events.len() >= budget {
            break Outcome::BudgetExhausted;
        }
        let n = succ.steps.len();
        let idx = match policy {
            Policy::DeterministicFirst => 0,
            Policy::SeededRandom(_) => rng.as_mut().expect("seeded").gen_range(0..n),
            Policy::Guided(script) => match script.get(events.len()) {
                None => break Outcome::ScriptEnded,
                Some(&i) if i >= n => {
                    break Outcome::ScriptInvalid {
                        step: events.len(),
                        index: i,
                        available: n,
                    }
                }
                Some(&i) => i,
            },
        };
        let step = succ.steps.into_iter().nth(idx).expect("index in range");
        cur = step.config.clone();
        events.push(TraceEvent {
            step: events.len() + 1,
            label: step.label,
            config: step.config,
        });
    };
    Trace {
        initial: init,
        events,
        outcome,
    }
}

/// Execute a program under the concrete semantics.
pub fn run(program: &Program, policy: &Policy, budget: usize) -> Trace<Message> {
    run_from(program, initial_configuration(program), policy, budget)
}
