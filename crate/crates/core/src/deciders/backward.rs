//! Backward saturation for control-state reachability.
//!
//! Targets are upward-closed sets given by a minimal configuration in which
//! some actors may be unconstrained. In the concrete ordering such an actor
//! keeps its name and state but may run any process with any queue; in the
//! abstract ordering it stands for the existence of some actor of its
//! class. Actors outside a target are always unconstrained in the abstract
//! ordering.
//!
//! Predecessor bases are computed by generate and test: candidate
//! predecessors are built by undoing one step of one actor, with the acting
//! process taken from a suffix of a method body (or of main) whose
//! continuation matches the target, and every candidate is kept only if one
//! of its actual steps lands above the target.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::order::{perfect_matching, ActorKey, Mode};
use crate::semantics::{actor_steps, ActorTerm, Allocator, Config, Message, QueueItem, State};
use crate::syntax::{
    free_vars_ordered, substitute, ActorName, ClassName, Expr, MethodName, Process, Program, Subst,
    Value, VarName,
};

/// Pattern variable standing for `this` in body suffixes.
const THIS: VarName = VarName::Fresh(u32::MAX);
/// First index of the fresh variables introduced when completing patterns.
const POOL_BASE: u32 = 1 << 28;

/// An upward-closed set of configurations.
#[derive(Clone, Debug)]
pub struct Target<M> {
    pub config: Config<M>,
    /// Unconstrained actors. Their entries in `config` carry only the
    /// state.
    pub wild: BTreeSet<ActorName>,
}

impl<M: QueueItem> Target<M> {
    pub fn exact(config: Config<M>) -> Self {
        Target {
            config,
            wild: BTreeSet::new(),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
enum Slot {
    Wild(State),
    Exact(ActorKey),
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
enum TargetKey {
    Named(BTreeMap<ActorName, Slot>),
    /// Sorted constrained actors and the classes of unconstrained ones.
    Anonymous(Vec<ActorKey>, Vec<ClassName>),
}

impl TargetKey {
    fn leq(&self, other: &TargetKey) -> bool {
        match (self, other) {
            (TargetKey::Named(a), TargetKey::Named(b)) => {
                a.len() == b.len()
                    && a.iter().zip(b).all(|((n1, s1), (n2, s2))| {
                        n1 == n2
                            && match (s1, s2) {
                                (Slot::Wild(x), Slot::Wild(y)) => x == y,
                                (Slot::Wild(x), Slot::Exact(k)) => *x == k.state,
                                (Slot::Exact(_), Slot::Wild(_)) => false,
                                (Slot::Exact(k1), Slot::Exact(k2)) => k1.leq(k2),
                            }
                    })
            }
            (TargetKey::Anonymous(a, wa), TargetKey::Anonymous(b, wb)) => {
                // Constrained actors map to constrained actors above them;
                // unconstrained ones to any actor of their class.
                let (n, m) = (a.len() + wa.len(), b.len() + wb.len());
                n <= m
                    && perfect_matching(n, m, |i, j| match (i < a.len(), j < b.len()) {
                        (true, true) => a[i].leq(&b[j]),
                        (true, false) => false,
                        (false, true) => wa[i - a.len()] == b[j].class,
                        (false, false) => wa[i - a.len()] == wb[j - b.len()],
                    })
            }
            _ => false,
        }
    }
}

/// A process suffix usable as a pattern: `this` replaced by a pattern
/// variable, and the variables to instantiate listed.
#[derive(Clone, Debug)]
struct Suffix {
    proc: Process,
    vars: Vec<VarName>,
}

/// The outcome of a backward search.
#[derive(Clone, Debug)]
pub struct Saturation<M> {
    /// `Some(true)` when a basis element lies below the start
    /// configuration, `Some(false)` when the basis stabilized without one,
    /// `None` when a budget ran out.
    pub reached: Option<bool>,
    /// All basis elements generated, in order; the first is the target.
    pub basis: Vec<Target<M>>,
    /// For each basis element, the element it is a predecessor of.
    pub parent: Vec<Option<usize>>,
    /// The basis element found below the start configuration.
    pub hit: Option<usize>,
}

impl<M> Saturation<M> {
    /// The backward chain from the element below the start configuration
    /// to the target.
    pub fn chain(&self) -> Vec<&Target<M>> {
        let mut out = Vec::new();
        let mut cur = self.hit;
        while let Some(i) = cur {
            out.push(&self.basis[i]);
            cur = self.parent[i];
        }
        out
    }
}

pub struct Backward<'a> {
    program: &'a Program,
    mode: Mode,
    main_free: BTreeSet<VarName>,
    suffixes: BTreeMap<ClassName, Vec<Suffix>>,
    bodies: BTreeMap<ClassName, Vec<(MethodName, Vec<VarName>, Suffix)>>,
    /// Method names and arities that some run may invoke.
    live: BTreeSet<(MethodName, usize)>,
    /// Cap on the completions enumerated for one pattern.
    pub completion_limit: usize,
    /// Cap on the basis elements processed.
    pub basis_limit: usize,
    truncated: bool,
}

fn replace_this_expr(e: &Expr) -> Expr {
    match e {
        Expr::This => Expr::Var(THIS),
        Expr::New(c, args) => Expr::New(c.clone(), args.iter().map(replace_this_expr).collect()),
        other => other.clone(),
    }
}

fn replace_this(p: &Process) -> Process {
    let e = replace_this_expr;
    match p {
        Process::Nil => Process::Nil,
        Process::Update(f, x, k) => Process::Update(f.clone(), e(x), Box::new(replace_this(k))),
        Process::Let(y, x, k) => Process::Let(y.clone(), e(x), Box::new(replace_this(k))),
        Process::Invoke {
            target,
            method,
            args,
            cont,
        } => Process::Invoke {
            target: e(target),
            method: method.clone(),
            args: args.iter().map(e).collect(),
            cont: Box::new(replace_this(cont)),
        },
        Process::Match(l, r, a, b) => Process::Match(
            e(l),
            e(r),
            Box::new(replace_this(a)),
            Box::new(replace_this(b)),
        ),
        Process::Choice(a, b) => {
            Process::Choice(Box::new(replace_this(a)), Box::new(replace_this(b)))
        }
    }
}

/// Every suffix of `p` with the variables bound above it.
fn suffixes_with_binders(
    p: &Process,
    above: &mut Vec<VarName>,
    out: &mut Vec<(Process, Vec<VarName>)>,
) {
    out.push((p.clone(), above.clone()));
    match p {
        Process::Nil => {}
        Process::Update(_, _, k) => suffixes_with_binders(k, above, out),
        Process::Invoke { cont, .. } => suffixes_with_binders(cont, above, out),
        Process::Let(x, _, k) => {
            above.push(x.clone());
            suffixes_with_binders(k, above, out);
            above.pop();
        }
        Process::Match(_, _, a, b) | Process::Choice(a, b) => {
            suffixes_with_binders(a, above, out);
            suffixes_with_binders(b, above, out);
        }
    }
}

// ---------------------------------------------------------------------------
// Matching

fn target_value(e: &Expr, env: &[VarName]) -> Option<Result<Value, usize>> {
    match e {
        Expr::Var(y) => Some(match env.iter().rev().position(|z| z == y) {
            Some(i) => Err(i),
            None => Ok(Value::Var(y.clone())),
        }),
        Expr::Actor(a) => Some(Ok(Value::Actor(a.clone()))),
        _ => None,
    }
}

struct Matcher<'a> {
    pv: &'a BTreeSet<VarName>,
    s: Subst,
    ep: Vec<VarName>,
    et: Vec<VarName>,
}

impl Matcher<'_> {
    fn bind(&mut self, x: &VarName, v: Value) -> bool {
        match self.s.get(x) {
            Some(w) => *w == v,
            None => {
                self.s.insert(x.clone(), v);
                true
            }
        }
    }

    fn expr(&mut self, p: &Expr, t: &Expr) -> bool {
        match p {
            Expr::Var(x) => {
                let Some(tv) = target_value(t, &self.et) else {
                    return false;
                };
                match self.ep.iter().rev().position(|z| z == x) {
                    Some(i) => tv == Err(i),
                    None => match tv {
                        Err(_) => false,
                        Ok(v) if self.pv.contains(x) => self.bind(x, v),
                        Ok(v) => v == Value::Var(x.clone()),
                    },
                }
            }
            Expr::Actor(a) => matches!(t, Expr::Actor(b) if a == b),
            Expr::Field(f) => matches!(t, Expr::Field(g) if f == g),
            Expr::This => matches!(t, Expr::This),
            Expr::New(c, args) => match t {
                Expr::New(d, targs) => {
                    c == d
                        && args.len() == targs.len()
                        && args.iter().zip(targs).all(|(a, b)| self.expr(a, b))
                }
                _ => false,
            },
        }
    }

    fn value(&mut self, p: &Expr, v: &Value) -> bool {
        self.expr(p, &Expr::from(v.clone()))
    }

    fn proc(&mut self, p: &Process, t: &Process) -> bool {
        match (p, t) {
            (Process::Nil, Process::Nil) => true,
            (Process::Update(f, e, k), Process::Update(g, e2, k2)) => {
                f == g && self.expr(e, e2) && self.proc(k, k2)
            }
            (Process::Let(x, e, k), Process::Let(y, e2, k2)) => {
                if !self.expr(e, e2) {
                    return false;
                }
                self.ep.push(x.clone());
                self.et.push(y.clone());
                let ok = self.proc(k, k2);
                self.ep.pop();
                self.et.pop();
                ok
            }
            (
                Process::Invoke {
                    target,
                    method,
                    args,
                    cont,
                },
                Process::Invoke {
                    target: t2,
                    method: m2,
                    args: a2,
                    cont: c2,
                },
            ) => {
                method == m2
                    && args.len() == a2.len()
                    && self.expr(target, t2)
                    && args.iter().zip(a2).all(|(a, b)| self.expr(a, b))
                    && self.proc(cont, c2)
            }
            (Process::Match(l, r, a, b), Process::Match(l2, r2, a2, b2)) => {
                self.expr(l, l2) && self.expr(r, r2) && self.proc(a, a2) && self.proc(b, b2)
            }
            (Process::Choice(a, b), Process::Choice(a2, b2)) => {
                self.proc(a, a2) && self.proc(b, b2)
            }
            _ => false,
        }
    }
}

/// Match a pattern against a process; pattern variables in `pv` bind to free
/// values of the target.
fn match_process(
    pattern: &Process,
    pv: &BTreeSet<VarName>,
    target: &Process,
    seed: Subst,
) -> Option<Subst> {
    let mut m = Matcher {
        pv,
        s: seed,
        ep: Vec::new(),
        et: Vec::new(),
    };
    m.proc(pattern, target).then_some(m.s)
}

// ---------------------------------------------------------------------------
// Candidate values

/// Values available when completing a pattern: actor names, main-free
/// variables and fresh variables. In the abstract ordering actor names are
/// only compared within one term, so instead of a fixed list the
/// completion draws names already used by the substitution or a new name
/// of any class.
struct Pool {
    actors: Vec<ActorName>,
    /// Abstract ordering: the classes new names may be drawn from.
    grow: Option<Vec<ClassName>>,
    main_free: Vec<VarName>,
    restrict: BTreeMap<VarName, Vec<Value>>,
    /// Abstract ordering: the class of `this`.
    this_class: Option<ClassName>,
}

struct Completion<'p> {
    pool: &'p Pool,
    todo: &'p [VarName],
    fresh: Vec<Value>,
    next_fresh: u32,
    /// Abstract ordering: actor names used so far.
    used: Vec<ActorName>,
    next_actor: BTreeMap<ClassName, u32>,
    out: Vec<Subst>,
    limit: usize,
    truncated: bool,
}

impl Completion<'_> {
    fn new_actor(&self, c: &ClassName) -> ActorName {
        ActorName::new(c.clone(), self.next_actor.get(c).copied().unwrap_or(0))
    }

    fn go(&mut self, i: usize, s: &mut Subst) {
        if self.out.len() >= self.limit {
            self.truncated = true;
            return;
        }
        if i == self.todo.len() {
            self.out.push(s.clone());
            return;
        }
        let x = &self.todo[i];
        let pool = self.pool;
        // (value, is a new fresh variable, is a new actor name)
        let mut choices: Vec<(Value, bool, bool)> = Vec::new();
        if let Some(c) = pool.this_class.as_ref().filter(|_| x == &THIS) {
            choices.extend(self.used.iter().filter(|a| &a.class == c).map(|a| (Value::Actor(a.clone()), false, false)));
            choices.push((Value::Actor(self.new_actor(c)), false, true));
        } else if let Some(r) = pool.restrict.get(x) {
            choices.extend(r.iter().map(|v| (v.clone(), false, false)));
        } else {
            choices.extend(pool.actors.iter().map(|a| (Value::Actor(a.clone()), false, false)));
            choices.extend(self.used.iter().map(|a| (Value::Actor(a.clone()), false, false)));
            if let Some(classes) = &pool.grow {
                choices.extend(classes.iter().map(|c| (Value::Actor(self.new_actor(c)), false, true)));
            }
            choices.extend(pool.main_free.iter().map(|v| (Value::Var(v.clone()), false, false)));
            choices.extend(self.fresh.iter().map(|v| (v.clone(), false, false)));
            choices.push((Value::Var(VarName::Fresh(POOL_BASE + self.next_fresh)), true, false));
        }
        for (v, new_var, new_actor) in choices {
            if new_var {
                self.next_fresh += 1;
                self.fresh.push(v.clone());
            }
            if new_actor {
                let Value::Actor(a) = &v else { unreachable!() };
                *self.next_actor.entry(a.class.clone()).or_insert(0) += 1;
                self.used.push(a.clone());
            }
            s.insert(x.clone(), v.clone());
            self.go(i + 1, s);
            s.remove(x);
            if new_var {
                self.next_fresh -= 1;
                self.fresh.pop();
            }
            if new_actor {
                let Value::Actor(a) = &v else { unreachable!() };
                *self.next_actor.get_mut(&a.class).expect("counted") -= 1;
                self.used.pop();
            }
        }
    }
}

/// Invocations `(method, arity)` occurring in `p`.
fn invocations(p: &Process) -> impl Iterator<Item = (MethodName, usize)> + '_ {
    p.suffixes().into_iter().filter_map(|s| match s {
        Process::Invoke { method, args, .. } => Some((method.clone(), args.len())),
        _ => None,
    })
}

/// Least set of invocations closed under running the bodies of the methods
/// they name, starting from those of the main process. A message or a body
/// outside it never occurs in a run.
fn live_invocations(program: &Program) -> BTreeSet<(MethodName, usize)> {
    let mut live: BTreeSet<(MethodName, usize)> = invocations(&program.main).collect();
    loop {
        let mut grown = false;
        for cd in program.classes.values() {
            for (m, md) in &cd.methods {
                if live.contains(&(m.clone(), md.params.len())) {
                    for inv in invocations(&md.body) {
                        grown |= live.insert(inv);
                    }
                }
            }
        }
        if !grown {
            return live;
        }
    }
}

impl<'a> Backward<'a> {
    pub fn new(program: &'a Program, mode: Mode) -> Self {
        let main_free = program.main_free();
        let live = live_invocations(program);
        let mut suffixes: BTreeMap<ClassName, Vec<Suffix>> = BTreeMap::new();
        let mut bodies: BTreeMap<ClassName, Vec<(MethodName, Vec<VarName>, Suffix)>> =
            BTreeMap::new();
        for (c, cd) in &program.classes {
            let list = suffixes.entry(c.clone()).or_default();
            for (m, md) in &cd.methods {
                if !live.contains(&(m.clone(), md.params.len())) {
                    continue;
                }
                let body = replace_this(&md.body);
                let mut vars = md.params.clone();
                for x in free_vars_ordered(&body) {
                    if !vars.contains(&x) {
                        vars.push(x);
                    }
                }
                if !vars.contains(&THIS) {
                    vars.push(THIS);
                }
                bodies.entry(c.clone()).or_default().push((
                    m.clone(),
                    md.params.clone(),
                    Suffix {
                        proc: body.clone(),
                        vars,
                    },
                ));
                let mut all = Vec::new();
                suffixes_with_binders(&body, &mut Vec::new(), &mut all);
                for (q, _) in all {
                    let vars = free_vars_ordered(&q);
                    list.push(Suffix { proc: q, vars });
                }
            }
        }
        let mut all = Vec::new();
        suffixes_with_binders(&program.main, &mut Vec::new(), &mut all);
        let root: Vec<Suffix> = all
            .into_iter()
            .map(|(q, above)| {
                let vars = free_vars_ordered(&q)
                    .into_iter()
                    .filter(|x| above.contains(x))
                    .collect();
                Suffix { proc: q, vars }
            })
            .collect();
        suffixes.insert(ClassName::root(), root);
        Backward {
            program,
            mode,
            main_free,
            suffixes,
            bodies,
            live,
            completion_limit: 50_000,
            basis_limit: 5_000,
            truncated: false,
        }
    }

    /// Whether every queued message of a constrained actor may be sent in
    /// some run.
    fn messages_live<M: QueueItem>(&self, t: &Target<M>) -> bool {
        t.config.actors.iter().filter(|(a, _)| !t.wild.contains(*a)).all(|(_, term)| {
            term.queue.iter().all(|m| {
                self.live
                    .contains(&(m.message().method.clone(), m.message().args.len()))
            })
        })
    }

    fn abstract_mode(&self) -> bool {
        self.mode == Mode::Abstract
    }

    fn key_of_target<M: QueueItem>(&self, t: &Target<M>) -> TargetKey {
        match self.mode {
            Mode::Abstract => {
                let mut exact = Vec::new();
                let mut wild = Vec::new();
                for (a, term) in &t.config.actors {
                    if t.wild.contains(a) {
                        wild.push(a.class.clone());
                    } else {
                        exact.push(ActorKey::of(a, term, self.mode, &self.main_free));
                    }
                }
                exact.sort();
                wild.sort();
                TargetKey::Anonymous(exact, wild)
            }
            Mode::Concrete => TargetKey::Named(
                t.config
                    .actors
                    .iter()
                    .map(|(a, term)| {
                        let slot = if t.wild.contains(a) {
                            Slot::Wild(term.state.clone())
                        } else {
                            Slot::Exact(ActorKey::of(a, term, self.mode, &self.main_free))
                        };
                        (a.clone(), slot)
                    })
                    .collect(),
            ),
        }
    }

    fn key_of_config<M: QueueItem>(&self, c: &Config<M>) -> TargetKey {
        self.key_of_target(&Target {
            config: c.clone(),
            wild: BTreeSet::new(),
        })
    }

    /// Enumerate completions of `s` over `vars`: each unassigned variable
    /// takes an actor name, a main-free variable, a fresh variable already
    /// in use, or a new fresh variable.
    fn complete(&mut self, vars: &[VarName], s: Subst, pool: &Pool) -> Vec<Subst> {
        let todo: Vec<VarName> = vars.iter().filter(|x| !s.contains_key(*x)).cloned().collect();
        let fresh: Vec<Value> = s
            .values()
            .filter(|v| matches!(v, Value::Var(x) if !self.main_free.contains(x)))
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let mut st = Completion {
            pool,
            todo: &todo,
            fresh,
            next_fresh: 0,
            used: Vec::new(),
            next_actor: BTreeMap::new(),
            out: Vec::new(),
            limit: self.completion_limit,
            truncated: false,
        };
        if pool.grow.is_some() {
            let mut seen = BTreeSet::new();
            for v in s.values() {
                if let Value::Actor(a) = v {
                    if seen.insert(a.clone()) {
                        st.used.push(a.clone());
                    }
                }
            }
            for a in pool.actors.iter().chain(&st.used) {
                let e = st.next_actor.entry(a.class.clone()).or_insert(0);
                *e = (*e).max(a.index + 1);
            }
        }
        let mut s = s;
        st.go(0, &mut s);
        self.truncated |= st.truncated;
        st.out
    }

    /// The completion pool for a step of `mover` in `c`.
    fn pool_for<M>(&self, c: &Config<M>, mover: &ActorName) -> Pool {
        let mut restrict = BTreeMap::new();
        if self.abstract_mode() {
            Pool {
                actors: Vec::new(),
                grow: Some(self.program.classes.keys().cloned().collect()),
                main_free: self.main_free.iter().cloned().collect(),
                restrict,
                this_class: Some(mover.class.clone()),
            }
        } else {
            restrict.insert(THIS, vec![Value::Actor(mover.clone())]);
            Pool {
                actors: c.actors.keys().filter(|a| !a.is_root()).cloned().collect(),
                grow: None,
                main_free: self.main_free.iter().cloned().collect(),
                restrict,
                this_class: None,
            }
        }
    }

    fn with_alloc<M: QueueItem>(actors: BTreeMap<ActorName, ActorTerm<M>>) -> Config<M> {
        let alloc = Allocator::covering(&actors);
        Config { actors, alloc }
    }

    /// Whether some step of `mover` in `x` lands above the target.
    /// Unconstrained actors of `x` stay unconstrained after the step.
    fn verify<M: QueueItem>(&self, x: &Target<M>, mover: &ActorName, t: &TargetKey) -> bool {
        let Some(term) = x.config.get(mover) else {
            return false;
        };
        match actor_steps(self.program, &x.config, mover, term) {
            Ok(steps) => steps.iter().any(|s| {
                t.leq(&self.key_of_target(&Target {
                    config: s.config.clone(),
                    wild: x.wild.clone(),
                }))
            }),
            Err(_) => false,
        }
    }

    fn new_name<M>(&self, c: &Config<M>, class: &ClassName) -> ActorName {
        if class.is_root() {
            return ActorName::root();
        }
        let k = c
            .actors
            .keys()
            .filter(|a| &a.class == class)
            .map(|a| a.index + 1)
            .max()
            .unwrap_or(0);
        ActorName::new(class.clone(), k)
    }

    /// A finite set of targets whose upward closures cover every
    /// predecessor of the upward closure of `t`.
    pub fn pred_basis<M: QueueItem>(&mut self, t: &Target<M>) -> Vec<Target<M>> {
        let tkey = self.key_of_target(t);
        let mut out: Vec<Target<M>> = Vec::new();
        let mut keys: Vec<TargetKey> = Vec::new();
        let mut push = |x: Target<M>, this: &Self| {
            if !this.messages_live(&x) {
                return;
            }
            let k = this.key_of_target(&x);
            if !keys.contains(&k) {
                keys.push(k);
                out.push(x);
            }
        };
        let constrained: Vec<ActorName> = t
            .config
            .actors
            .keys()
            .filter(|a| !t.wild.contains(a))
            .cloned()
            .collect();

        // The mover is a constrained actor.
        for a in &constrained {
            let term = t.config.get(a).expect("actor exists").clone();
            let sfxs = self.suffixes.get(&a.class).cloned().unwrap_or_default();
            for sfx in &sfxs {
                for (cont, binder) in continuations(&sfx.proc) {
                    let mut pv: BTreeSet<VarName> = sfx.vars.iter().cloned().collect();
                    pv.extend(binder.clone());
                    let mut seed = Subst::new();
                    if !self.abstract_mode() && sfx.vars.contains(&THIS) {
                        seed.insert(THIS, Value::Actor(a.clone()));
                    }
                    let Some(mut s0) = match_process(&cont, &pv, &term.process, seed) else {
                        continue;
                    };
                    if let Some(b) = &binder {
                        s0.remove(b);
                    }
                    if !this_fits(&s0, &a.class) {
                        continue;
                    }
                    let pool = self.pool_for(&t.config, a);
                    for s in self.complete(&sfx.vars, s0, &pool) {
                        let p = substitute(&sfx.proc, &s);
                        for x in self.variants(t, a, p) {
                            if self.verify(&x, a, &tkey) {
                                push(x, self);
                            }
                        }
                    }
                }
            }
            if !a.is_root() {
                self.inst_predecessors(t, a, &term, &tkey, &mut |x, me| push(x, me));
            }
        }

        // The mover is outside the constrained actors and emits into one.
        for b in &constrained {
            let Some(last) = t.config.get(b).and_then(|x| x.queue.back()).cloned() else {
                continue;
            };
            let recipient = last.target().cloned().unwrap_or_else(|| b.clone());
            let mut base = t.clone();
            base.config
                .actors
                .get_mut(b)
                .expect("actor exists")
                .queue
                .pop_back();
            let movers: Vec<(ActorName, bool)> = if self.abstract_mode() {
                let mut classes: Vec<ClassName> = self.program.classes.keys().cloned().collect();
                if t.config.get(&ActorName::root()).is_none() {
                    classes.push(ClassName::root());
                }
                classes
                    .iter()
                    .map(|c| (self.new_name(&t.config, c), true))
                    .collect()
            } else {
                t.wild.iter().map(|w| (w.clone(), false)).collect()
            };
            for (e, is_new) in movers {
                let mut ctx = base.clone();
                if is_new {
                    ctx.config
                        .actors
                        .insert(e.clone(), ActorTerm::idle(State::new()));
                }
                let sfxs = self.suffixes.get(&e.class).cloned().unwrap_or_default();
                for sfx in &sfxs {
                    let Process::Invoke {
                        target,
                        method,
                        args,
                        ..
                    } = &sfx.proc
                    else {
                        continue;
                    };
                    if *method != last.message().method || args.len() != last.message().args.len() {
                        continue;
                    }
                    let pv: BTreeSet<VarName> = sfx.vars.iter().cloned().collect();
                    let mut m = Matcher {
                        pv: &pv,
                        s: Subst::new(),
                        ep: Vec::new(),
                        et: Vec::new(),
                    };
                    if !self.abstract_mode() && sfx.vars.contains(&THIS) {
                        m.s.insert(THIS, Value::Actor(e.clone()));
                    }
                    let ok = m.value(target, &Value::Actor(recipient.clone()))
                        && args
                            .iter()
                            .zip(&last.message().args)
                            .all(|(p, v)| m.value(p, v));
                    if !ok {
                        continue;
                    }
                    let pool = self.pool_for(&ctx.config, &e);
                    for s in self.complete(&sfx.vars, m.s, &pool) {
                        let p = substitute(&sfx.proc, &s);
                        let mut x = ctx.clone();
                        let state = x
                            .config
                            .get(&e)
                            .map(|u| u.state.clone())
                            .unwrap_or_default();
                        x.config.actors.insert(e.clone(), ActorTerm::idle(state));
                        x.config.actors.get_mut(&e).expect("mover").process = p;
                        x.wild.remove(&e);
                        x.config = Self::with_alloc(x.config.actors);
                        if self.verify(&x, &e, &tkey) {
                            push(x, self);
                        }
                    }
                }
            }
        }

        // Abstract ordering: an unmatched actor creates an idle or an
        // unconstrained one.
        if self.abstract_mode() {
            for (n, nt) in &t.config.actors {
                let creatable = t.wild.contains(n) || (nt.process.is_nil() && nt.queue.is_empty());
                if n.is_root() || !creatable {
                    continue;
                }
                let mut base = t.clone();
                base.config.actors.remove(n);
                base.wild.remove(n);
                let mut classes: Vec<ClassName> = self.program.classes.keys().cloned().collect();
                if base.config.get(&ActorName::root()).is_none() {
                    classes.push(ClassName::root());
                }
                for c in classes {
                    let e = self.new_name(&t.config, &c);
                    let mut ctx = base.clone();
                    ctx.config.actors.insert(e.clone(), ActorTerm::idle(State::new()));
                    let sfxs = self.suffixes.get(&c).cloned().unwrap_or_default();
                    for sfx in &sfxs {
                        if !matches!(&sfx.proc, Process::Let(_, Expr::New(k, _), _) if *k == n.class)
                        {
                            continue;
                        }
                        let pool = self.pool_for(&ctx.config, &e);
                        for s in self.complete(&sfx.vars, Subst::new(), &pool) {
                            let mut x = ctx.clone();
                            x.config.actors.get_mut(&e).expect("mover").process =
                                substitute(&sfx.proc, &s);
                            x.config = Self::with_alloc(x.config.actors);
                            if self.verify(&x, &e, &tkey) {
                                push(x, self);
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Predecessors in which `a` was idle with the instantiating message at
    /// the head of its queue.
    fn inst_predecessors<M: QueueItem>(
        &mut self,
        t: &Target<M>,
        a: &ActorName,
        term: &ActorTerm<M>,
        tkey: &TargetKey,
        push: &mut dyn FnMut(Target<M>, &Self),
    ) {
        for (m, params, body) in self.bodies.get(&a.class).cloned().unwrap_or_default() {
            let pv: BTreeSet<VarName> = body.vars.iter().cloned().collect();
            let mut seed = Subst::new();
            if !self.abstract_mode() {
                seed.insert(THIS, Value::Actor(a.clone()));
            }
            let Some(s0) = match_process(&body.proc, &pv, &term.process, seed) else {
                continue;
            };
            if !this_fits(&s0, &a.class) {
                continue;
            }
            let mut needed = params.clone();
            needed.push(THIS);
            let pool = self.pool_for(&t.config, a);
            for s in self.complete(&needed, s0, &pool) {
                let args: Vec<Value> = params.iter().map(|x| s[x].clone()).collect();
                let Value::Actor(tgt) = &s[&THIS] else {
                    continue;
                };
                let item = M::build(
                    Message {
                        method: m.clone(),
                        args,
                    },
                    Vec::new(),
                    tgt,
                );
                let mut x = t.clone();
                let xt = x.config.actors.get_mut(a).expect("actor exists");
                xt.process = Process::Nil;
                xt.queue.push_front(item);
                x.config = Self::with_alloc(x.config.actors);
                if self.verify(&x, a, tkey) {
                    push(x, self);
                }
            }
        }
    }

    /// Candidate predecessors in which constrained actor `a` runs `p`: the
    /// target itself, with one queued message removed, with a created actor
    /// removed, or (abstract ordering) with an unconstrained recipient
    /// added.
    fn variants<M: QueueItem>(
        &mut self,
        t: &Target<M>,
        a: &ActorName,
        p: Process,
    ) -> Vec<Target<M>> {
        let mut x = t.clone();
        x.config.actors.get_mut(a).expect("actor exists").process = p.clone();
        x.config = Self::with_alloc(x.config.actors);
        let mut out = vec![x.clone()];
        match &p {
            Process::Invoke { target, .. } => {
                for (b, bt) in &t.config.actors {
                    if t.wild.contains(b) || bt.queue.is_empty() {
                        continue;
                    }
                    let mut y = x.clone();
                    y.config
                        .actors
                        .get_mut(b)
                        .expect("actor exists")
                        .queue
                        .pop_back();
                    out.push(y);
                }
                if self.abstract_mode() {
                    if let Expr::Actor(n) = target {
                        if !n.is_root() && !x.config.actors.keys().any(|c| c.class == n.class) {
                            let mut y = x.clone();
                            y.config.actors.insert(n.clone(), ActorTerm::idle(State::new()));
                            y.wild.insert(n.clone());
                            y.config = Self::with_alloc(y.config.actors);
                            out.push(y);
                        }
                    }
                }
            }
            Process::Let(_, Expr::New(c, _), _) => {
                for (n, nt) in &t.config.actors {
                    let removable = if t.wild.contains(n) {
                        self.abstract_mode()
                    } else {
                        nt.process.is_nil() && nt.queue.is_empty()
                    };
                    if &n.class != c || n == a || !removable {
                        continue;
                    }
                    let newest = t
                        .config
                        .actors
                        .keys()
                        .filter(|k| &k.class == c)
                        .all(|k| k.index <= n.index);
                    if !self.abstract_mode() && !newest {
                        continue;
                    }
                    let mut y = x.clone();
                    y.config.actors.remove(n);
                    y.wild.remove(n);
                    y.config = Self::with_alloc(y.config.actors);
                    out.push(y);
                }
            }
            _ => {}
        }
        out
    }

    /// Saturate backwards from `target` and report whether some basis
    /// element lies below `start`.
    pub fn saturate<M: QueueItem>(
        &mut self,
        target: Target<M>,
        start: &Config<M>,
    ) -> Saturation<M> {
        self.truncated = false;
        let start_key = self.key_of_config(start);
        let first_key = self.key_of_target(&target);
        let mut sat = Saturation {
            reached: None,
            basis: vec![target],
            parent: vec![None],
            hit: None,
        };
        if first_key.leq(&start_key) {
            sat.reached = Some(true);
            sat.hit = Some(0);
            return sat;
        }
        if !self.messages_live(&sat.basis[0]) {
            sat.reached = Some(false);
            return sat;
        }
        let mut keys = vec![first_key];
        let mut alive = vec![true];
        let mut work = VecDeque::from([0usize]);
        let mut processed = 0;
        while let Some(i) = work.pop_front() {
            if !alive[i] {
                continue;
            }
            processed += 1;
            if processed > self.basis_limit {
                return sat;
            }
            let current = sat.basis[i].clone();
            for x in self.pred_basis(&current) {
                let k = self.key_of_target(&x);
                if (0..keys.len()).any(|j| alive[j] && keys[j].leq(&k)) {
                    continue;
                }
                for j in 0..keys.len() {
                    if alive[j] && k.leq(&keys[j]) {
                        alive[j] = false;
                    }
                }
                let idx = sat.basis.len();
                sat.basis.push(x);
                sat.parent.push(Some(i));
                let below_start = k.leq(&start_key);
                keys.push(k);
                alive.push(true);
                if below_start {
                    sat.reached = Some(true);
                    sat.hit = Some(idx);
                    return sat;
                }
                work.push_back(idx);
            }
        }
        sat.reached = if self.truncated { None } else { Some(false) };
        sat
    }
}

/// Whether the value bound to `this`, if any, is an actor of `class`.
fn this_fits(s: &Subst, class: &ClassName) -> bool {
    match s.get(&THIS) {
        None => true,
        Some(Value::Actor(a)) => &a.class == class,
        Some(_) => false,
    }
}

/// The processes a suffix can continue as after one step of its head, with
/// the variable the step binds, if any.
fn continuations(p: &Process) -> Vec<(Process, Option<VarName>)> {
    match p {
        Process::Nil => Vec::new(),
        Process::Update(_, _, k) => vec![((**k).clone(), None)],
        Process::Invoke { cont, .. } => vec![((**cont).clone(), None)],
        Process::Let(x, _, k) => vec![((**k).clone(), Some(x.clone()))],
        Process::Match(_, _, a, b) | Process::Choice(a, b) => {
            vec![((**a).clone(), None), ((**b).clone(), None)]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::{initial_configuration, ConcreteConfig};
    use crate::syntax::{parse_process, parse_program};

    #[test]
    fn matching_binds_pattern_variables() {
        let pat = parse_process("x!m(y, A#0) . let z = y in z!k()").unwrap();
        let pv: BTreeSet<VarName> = [VarName::named("x"), VarName::named("y")]
            .into_iter()
            .collect();
        let t = parse_process("B#1!m(u, A#0) . let w = u in w!k()").unwrap();
        let s = match_process(&pat, &pv, &t, Subst::new()).unwrap();
        assert_eq!(
            s[&VarName::named("x")],
            Value::Actor(ActorName::new("B", 1))
        );
        assert_eq!(s[&VarName::named("y")], Value::var("u"));
        let bad = parse_process("B#1!m(u, A#0) . let w = v in w!k()").unwrap();
        assert!(match_process(&pat, &pv, &bad, Subst::new()).is_none());
    }

    #[test]
    fn initial_target_is_reached_immediately() {
        let p =
            parse_program("class C() { def m() = 0 } main { let c = new C() in c!m() }").unwrap();
        let init: ConcreteConfig = initial_configuration(&p);
        let mut b = Backward::new(&p, Mode::Concrete);
        let sat = b.saturate(Target::exact(init.clone()), &init);
        assert_eq!(sat.reached, Some(true));
    }

    #[test]
    fn inst_case_queues_the_invocation() {
        let p = parse_program("class C() { def m(x) = x!m(x) } main { let c = new C() in c!m(c) }")
            .unwrap();
        let init: ConcreteConfig = initial_configuration(&p);
        let mut b = Backward::new(&p, Mode::Concrete);
        let c0 = ActorName::new("C", 0);
        let mut t = init.clone();
        t.actors.get_mut(&ActorName::root()).unwrap().process = Process::Nil;
        let mut ct = ActorTerm::idle(State::new());
        ct.process = parse_process("C#0!m(C#0)").unwrap();
        t.actors.insert(c0.clone(), ct);
        let basis = b.pred_basis(&Target::exact(t.clone()));
        assert!(basis.iter().any(|x| x
            .config
            .get(&c0)
            .is_some_and(|u| u.process.is_nil() && u.queue.len() == 1)));
        let sat = b.saturate(Target::exact(t), &init);
        assert_eq!(sat.reached, Some(true));
    }

    #[test]
    fn uninvoked_method_is_unreachable() {
        let p = parse_program(
            "class C() { def m() = 0 def n() = this!m() } main { let c = new C() in c!m() }",
        )
        .unwrap();
        let init: ConcreteConfig = initial_configuration(&p);
        let mut b = Backward::new(&p, Mode::Concrete);
        let mut t = init.clone();
        t.actors.get_mut(&ActorName::root()).unwrap().process = Process::Nil;
        let mut ct = ActorTerm::idle(State::new());
        ct.process = parse_process("C#0!m()").unwrap();
        t.actors.insert(ActorName::new("C", 0), ct);
        assert_eq!(b.saturate(Target::exact(t), &init).reached, Some(false));
    }
}
