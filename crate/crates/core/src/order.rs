//! Renaming equivalences, queue embedding and the configuration orderings,
//! in a concrete flavour (actor names are fixed) and an abstract flavour
//! (actor names may be renamed within their class).

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use crate::semantics::{ActorTerm, Config, QueueItem, State};
use crate::syntax::{
    alpha_equal, free_names, substitute, ActorName, ClassName, Expr, FieldName, MethodName,
    Process, Subst, Value, VarName,
};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Mode {
    /// Variables not free in main may be renamed; actor names are fixed.
    Concrete,
    /// Additionally, actor names may be renamed within their class.
    Abstract,
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
enum Tok {
    Nil,
    Update,
    Let,
    Invoke,
    Match,
    Choice,
    New,
    Close,
    This,
    Field(FieldName),
    Method(MethodName),
    Class(ClassName),
    Lit(Value),
    Bound(usize),
    Ren(usize, Option<ClassName>),
    Sigma(Vec<u32>),
}

/// A term with every renameable name replaced by the index of its first
/// occurrence (tagged with its class for actor names in abstract mode) and
/// every bound variable replaced by its binding depth. Two terms are
/// equivalent exactly when their canonical forms are equal.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct CanonicalTerm(Vec<Tok>);

struct Encoder<'a> {
    mode: Mode,
    main_free: &'a BTreeSet<VarName>,
    names: HashMap<Value, usize>,
    env: Vec<VarName>,
    out: Vec<Tok>,
}

impl<'a> Encoder<'a> {
    fn new(mode: Mode, main_free: &'a BTreeSet<VarName>) -> Self {
        Encoder {
            mode,
            main_free,
            names: HashMap::new(),
            env: Vec::new(),
            out: Vec::new(),
        }
    }

    fn renameable(&mut self, v: &Value, tag: Option<ClassName>) {
        let next = self.names.len();
        let k = *self.names.entry(v.clone()).or_insert(next);
        self.out.push(Tok::Ren(k, tag));
    }

    fn value(&mut self, v: &Value) {
        match v {
            Value::Var(x) => {
                if let Some(i) = self.env.iter().rev().position(|y| y == x) {
                    self.out.push(Tok::Bound(i));
                } else if matches!(x, VarName::Named(_)) && self.main_free.contains(x) {
                    self.out.push(Tok::Lit(v.clone()));
                } else {
                    self.renameable(v, None);
                }
            }
            Value::Actor(a) => match self.mode {
                Mode::Concrete => self.out.push(Tok::Lit(v.clone())),
                Mode::Abstract => self.renameable(v, Some(a.class.clone())),
            },
        }
    }

    fn expr(&mut self, e: &Expr) {
        match e {
            Expr::Field(f) => self.out.push(Tok::Field(f.clone())),
            Expr::This => self.out.push(Tok::This),
            Expr::Var(x) => self.value(&Value::Var(x.clone())),
            Expr::Actor(a) => self.value(&Value::Actor(a.clone())),
            Expr::New(c, args) => {
                self.out.push(Tok::New);
                self.out.push(Tok::Class(c.clone()));
                for a in args {
                    self.expr(a);
                }
                self.out.push(Tok::Close);
            }
        }
    }

    fn process(&mut self, p: &Process) {
        match p {
            Process::Nil => self.out.push(Tok::Nil),
            Process::Update(f, e, k) => {
                self.out.push(Tok::Update);
                self.out.push(Tok::Field(f.clone()));
                self.expr(e);
                self.process(k);
            }
            Process::Let(x, e, k) => {
                self.out.push(Tok::Let);
                self.expr(e);
                self.env.push(x.clone());
                self.process(k);
                self.env.pop();
            }
            Process::Invoke {
                target,
                method,
                args,
                cont,
            } => {
                self.out.push(Tok::Invoke);
                self.expr(target);
                self.out.push(Tok::Method(method.clone()));
                for a in args {
                    self.expr(a);
                }
                self.out.push(Tok::Close);
                self.process(cont);
            }
            Process::Match(l, r, a, b) => {
                self.out.push(Tok::Match);
                self.expr(l);
                self.expr(r);
                self.process(a);
                self.process(b);
            }
            Process::Choice(a, b) => {
                self.out.push(Tok::Choice);
                self.process(a);
                self.process(b);
            }
        }
    }

    fn item<M: QueueItem>(&mut self, item: &M) {
        if let Some(t) = item.target() {
            self.value(&Value::Actor(t.clone()));
        }
        let msg = item.message();
        self.out.push(Tok::Method(msg.method.clone()));
        for a in &msg.args {
            self.value(a);
        }
        if M::DECORATED {
            self.out.push(Tok::Sigma(item.sigma().to_vec()));
        }
    }
}

/// Canonical form of a process.
pub fn canonical_process(p: &Process, mode: Mode, main_free: &BTreeSet<VarName>) -> CanonicalTerm {
    let mut e = Encoder::new(mode, main_free);
    e.process(p);
    CanonicalTerm(e.out)
}

/// Canonical form of a queue entry. An intended target, when recorded, is
/// renamed jointly with the arguments; a decoration is kept literally.
pub fn canonical_message<M: QueueItem>(
    item: &M,
    mode: Mode,
    main_free: &BTreeSet<VarName>,
) -> CanonicalTerm {
    let mut e = Encoder::new(mode, main_free);
    e.item(item);
    CanonicalTerm(e.out)
}

pub fn proc_equiv(p: &Process, q: &Process, mode: Mode, main_free: &BTreeSet<VarName>) -> bool {
    canonical_process(p, mode, main_free) == canonical_process(q, mode, main_free)
}

pub fn msg_equiv<M: QueueItem>(a: &M, b: &M, mode: Mode, main_free: &BTreeSet<VarName>) -> bool {
    canonical_message(a, mode, main_free) == canonical_message(b, mode, main_free)
}

/// Subsequence embedding of queues modulo message equivalence.
pub fn queue_embeds<'q, M: QueueItem + 'q>(
    q: impl IntoIterator<Item = &'q M>,
    q2: impl IntoIterator<Item = &'q M>,
    mode: Mode,
    main_free: &BTreeSet<VarName>,
) -> bool {
    let a: Vec<CanonicalTerm> = q
        .into_iter()
        .map(|m| canonical_message(m, mode, main_free))
        .collect();
    let b: Vec<CanonicalTerm> = q2
        .into_iter()
        .map(|m| canonical_message(m, mode, main_free))
        .collect();
    keys_embed(&a, &b)
}

fn keys_embed<T: PartialEq>(a: &[T], b: &[T]) -> bool {
    let mut it = b.iter();
    a.iter().all(|x| it.any(|y| y == x))
}

/// The data of an actor that the orderings look at, with process and
/// messages in canonical form.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ActorKey {
    pub class: ClassName,
    pub state: State,
    pub process: CanonicalTerm,
    pub queue: Vec<CanonicalTerm>,
}

impl ActorKey {
    pub fn of<M: QueueItem>(
        name: &ActorName,
        t: &ActorTerm<M>,
        mode: Mode,
        main_free: &BTreeSet<VarName>,
    ) -> Self {
        ActorKey {
            class: name.class.clone(),
            state: t.state.clone(),
            process: canonical_process(&t.process, mode, main_free),
            queue: t
                .queue
                .iter()
                .map(|m| canonical_message(m, mode, main_free))
                .collect(),
        }
    }

    /// Same class, equal states, equivalent processes and embedded queues.
    pub fn leq(&self, other: &ActorKey) -> bool {
        self.class == other.class
            && self.state == other.state
            && self.process == other.process
            && keys_embed(&self.queue, &other.queue)
    }
}

/// A configuration in canonical form. Equal keys denote configurations that
/// are below each other.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum ConfigKey {
    /// Actors by name.
    Named(BTreeMap<ActorName, ActorKey>),
    /// The sorted multiset of actors.
    Anonymous(Vec<ActorKey>),
}

impl ConfigKey {
    pub fn of<M: QueueItem>(c: &Config<M>, mode: Mode, main_free: &BTreeSet<VarName>) -> Self {
        match mode {
            Mode::Concrete => ConfigKey::Named(
                c.actors
                    .iter()
                    .map(|(a, t)| (a.clone(), ActorKey::of(a, t, mode, main_free)))
                    .collect(),
            ),
            Mode::Abstract => {
                let mut v: Vec<ActorKey> = c
                    .actors
                    .iter()
                    .map(|(a, t)| ActorKey::of(a, t, mode, main_free))
                    .collect();
                v.sort();
                ConfigKey::Anonymous(v)
            }
        }
    }

    /// The configuration ordering on keys of the same mode.
    pub fn leq(&self, other: &ConfigKey) -> bool {
        match (self, other) {
            (ConfigKey::Named(a), ConfigKey::Named(b)) => {
                a.len() == b.len()
                    && a.iter()
                        .zip(b)
                        .all(|((n1, k1), (n2, k2))| n1 == n2 && k1.leq(k2))
            }
            (ConfigKey::Anonymous(a), ConfigKey::Anonymous(b)) => {
                a.len() <= b.len() && perfect_matching(a.len(), b.len(), |i, j| a[i].leq(&b[j]))
            }
            _ => false,
        }
    }
}

/// Whether every left vertex can be matched to a distinct right vertex.
pub(crate) fn perfect_matching(n: usize, m: usize, edge: impl Fn(usize, usize) -> bool) -> bool {
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..m).filter(|&j| edge(i, j)).collect())
        .collect();
    let mut owner: Vec<Option<usize>> = vec![None; m];
    fn augment(
        i: usize,
        adj: &[Vec<usize>],
        owner: &mut [Option<usize>],
        seen: &mut [bool],
    ) -> bool {
        for &j in &adj[i] {
            if !seen[j] {
                seen[j] = true;
                if owner[j].is_none_or(|k| augment(k, adj, owner, seen)) {
                    owner[j] = Some(i);
                    return true;
                }
            }
        }
        false
    }
    (0..n).all(|i| augment(i, &adj, &mut owner, &mut vec![false; m]))
}

/// The configuration ordering. Concrete: identical actor names, equal
/// states, equivalent processes and embedded queues. Abstract: a class
/// preserving injection of actors with the same per-actor conditions.
pub fn config_leq<M: QueueItem>(
    s: &Config<M>,
    t: &Config<M>,
    mode: Mode,
    main_free: &BTreeSet<VarName>,
) -> bool {
    ConfigKey::of(s, mode, main_free).leq(&ConfigKey::of(t, mode, main_free))
}

/// Whether two renamings identify the same names and agree wherever either
/// yields an actor name or a main-free variable. In abstract mode actor
/// names need only agree on their class. Names outside a renaming's domain
/// are mapped to themselves.
pub fn renamings_related(
    r1: &Subst,
    r2: &Subst,
    mode: Mode,
    main_free: &BTreeSet<VarName>,
) -> bool {
    let dom: BTreeSet<&VarName> = r1.keys().chain(r2.keys()).collect();
    let at = |r: &Subst, x: &VarName| r.get(x).cloned().unwrap_or_else(|| Value::Var(x.clone()));
    let fixed = |v: &Value| match v {
        Value::Actor(_) => true,
        Value::Var(y) => main_free.contains(y),
    };
    for &x in &dom {
        let (a, b) = (at(r1, x), at(r2, x));
        if fixed(&a) || fixed(&b) {
            let ok = match (mode, &a, &b) {
                (Mode::Abstract, Value::Actor(p), Value::Actor(q)) => p.class == q.class,
                _ => a == b,
            };
            if !ok {
                return false;
            }
        }
        for &y in &dom {
            if (a == at(r1, y)) != (b == at(r2, y)) {
                return false;
            }
        }
    }
    true
}

// ---------------------------------------------------------------------------
// Brute-force renaming search

/// Renameable free names of a process, in a fixed order.
fn renameable_names(p: &Process, mode: Mode, main_free: &BTreeSet<VarName>) -> Vec<Value> {
    free_names(p)
        .into_iter()
        .filter(|v| match v {
            Value::Var(x) => !main_free.contains(x),
            Value::Actor(_) => mode == Mode::Abstract,
        })
        .collect()
}

fn rename_expr(e: &Expr, map: &BTreeMap<Value, Value>, bound: &[VarName]) -> Expr {
    let lookup = |v: Value| -> Expr {
        let skip = matches!(&v, Value::Var(x) if bound.contains(x));
        if skip {
            v.into()
        } else {
            map.get(&v).cloned().unwrap_or(v).into()
        }
    };
    match e {
        Expr::Var(x) => lookup(Value::Var(x.clone())),
        Expr::Actor(a) => lookup(Value::Actor(a.clone())),
        Expr::New(c, args) => Expr::New(
            c.clone(),
            args.iter().map(|a| rename_expr(a, map, bound)).collect(),
        ),
        other => other.clone(),
    }
}

/// Apply a name-to-value map to free occurrences. Binders must not clash
/// with the map's range.
pub fn rename_free(
    p: &Process,
    map: &BTreeMap<Value, Value>,
    bound: &mut Vec<VarName>,
) -> Process {
    let e = |x: &Expr, b: &[VarName]| rename_expr(x, map, b);
    match p {
        Process::Nil => Process::Nil,
        Process::Update(f, x, k) => {
            Process::Update(f.clone(), e(x, bound), Box::new(rename_free(k, map, bound)))
        }
        Process::Let(y, x, k) => {
            let x = e(x, bound);
            bound.push(y.clone());
            let k = rename_free(k, map, bound);
            bound.pop();
            Process::Let(y.clone(), x, Box::new(k))
        }
        Process::Invoke {
            target,
            method,
            args,
            cont,
        } => Process::Invoke {
            target: e(target, bound),
            method: method.clone(),
            args: args.iter().map(|a| e(a, bound)).collect(),
            cont: Box::new(rename_free(cont, map, bound)),
        },
        Process::Match(l, r, a, b) => Process::Match(
            e(l, bound),
            e(r, bound),
            Box::new(rename_free(a, map, bound)),
            Box::new(rename_free(b, map, bound)),
        ),
        Process::Choice(a, b) => Process::Choice(
            Box::new(rename_free(a, map, bound)),
            Box::new(rename_free(b, map, bound)),
        ),
    }
}

/// Rename every binder to a fresh `$k` numbered from `base`.
fn freshen_binders(p: &Process, base: &mut u32) -> Process {
    match p {
        Process::Nil => Process::Nil,
        Process::Let(y, x, k) => {
            let z = VarName::Fresh(*base);
            *base += 1;
            let s: Subst = [(y.clone(), Value::Var(z.clone()))].into_iter().collect();
            let k = substitute(k, &s);
            Process::Let(z, x.clone(), Box::new(freshen_binders(&k, base)))
        }
        Process::Update(f, x, k) => {
            Process::Update(f.clone(), x.clone(), Box::new(freshen_binders(k, base)))
        }
        Process::Invoke {
            target,
            method,
            args,
            cont,
        } => Process::Invoke {
            target: target.clone(),
            method: method.clone(),
            args: args.clone(),
            cont: Box::new(freshen_binders(cont, base)),
        },
        Process::Match(l, r, a, b) => Process::Match(
            l.clone(),
            r.clone(),
            Box::new(freshen_binders(a, base)),
            Box::new(freshen_binders(b, base)),
        ),
        Process::Choice(a, b) => Process::Choice(
            Box::new(freshen_binders(a, base)),
            Box::new(freshen_binders(b, base)),
        ),
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Process equivalence decided by searching all bijections between the
/// renameable free names of the two processes: variables go to variables,
/// actor names (abstract mode) to actor names of the same class.
pub fn proc_equiv_by_search(
    p: &Process,
    q: &Process,
    mode: Mode,
    main_free: &BTreeSet<VarName>,
) -> bool {
    let (np, nq) = (
        renameable_names(p, mode, main_free),
        renameable_names(q, mode, main_free),
    );
    if np.len() != nq.len() {
        return false;
    }
    let mut base = 1 << 20;
    let p = freshen_binders(p, &mut base);
    let kind = |v: &Value| match v {
        Value::Var(_) => None,
        Value::Actor(a) => Some(a.class.clone()),
    };
    permutations(np.len()).into_iter().any(|perm| {
        if np.iter().zip(&perm).any(|(a, &j)| kind(a) != kind(&nq[j])) {
            return false;
        }
        let map: BTreeMap<Value, Value> = np
            .iter()
            .zip(&perm)
            .map(|(a, &j)| (a.clone(), nq[j].clone()))
            .collect();
        alpha_equal(&rename_free(&p, &map, &mut Vec::new()), q)
    })
}

// ---------------------------------------------------------------------------
// Counting renaming classes

/// Bell numbers: the number of partitions of an `n`-element set.
pub fn bell(n: usize) -> u128 {
    assert!(n <= 25, "bell({n}) is outside the supported range");
    let mut row = vec![1u128];
    for _ in 0..n {
        let mut next = vec![*row.last().expect("non-empty row")];
        for x in &row {
            let v = next.last().expect("non-empty row") + x;
            next.push(v);
        }
        row = next;
    }
    row[0]
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Upper bound on the renaming classes of a term with `kappa` free
/// variables over `ell` actor names, as stated by the finiteness lemma.
pub fn renaming_bound(kappa: usize, ell: usize) -> u128 {
    assert!(
        kappa <= 12 && ell <= 12,
        "renaming_bound arguments must be at most 12"
    );
    if kappa >= ell {
        (binomial(kappa, ell) * factorial(ell) + 1) * bell(kappa)
    } else {
        (factorial(ell) / factorial(kappa) + 1) * bell(kappa)
    }
}

fn stirling2(n: usize, k: usize) -> u128 {
    let mut t = vec![vec![0u128; k + 1]; n + 1];
    t[0][0] = 1;
    for i in 1..=n {
        for j in 1..=k.min(i) {
            t[i][j] = j as u128 * t[i - 1][j] + t[i - 1][j - 1];
        }
    }
    t[n][k]
}

/// Exact number of renaming classes of a term with `kappa` distinct free
/// variables over `ell` actor names: choose a partition, then send some of
/// its blocks injectively to actor names.
pub fn exact_renaming_classes(kappa: usize, ell: usize) -> u128 {
    (0..=kappa)
        .map(|b| {
            stirling2(kappa, b)
                * (0..=b.min(ell))
                    .map(|j| binomial(b, j) * factorial(ell) / factorial(ell - j))
                    .sum::<u128>()
        })
        .sum()
}

/// Enumerate every renaming of the renameable free variables of `p` into a
/// pool of as many fresh variables plus the given actor names, and count the
/// resulting classes of equivalent processes.
pub fn enumerate_renaming_classes(
    p: &Process,
    actors: &[ActorName],
    main_free: &BTreeSet<VarName>,
) -> usize {
    let vars: Vec<VarName> = renameable_names(p, Mode::Concrete, main_free)
        .into_iter()
        .filter_map(|v| match v {
            Value::Var(x) => Some(x),
            Value::Actor(_) => None,
        })
        .collect();
    let k = vars.len();
    let pool: Vec<Value> = (0..k)
        .map(|i| Value::Var(VarName::Fresh((1 << 21) + i as u32)))
        .chain(actors.iter().cloned().map(Value::Actor))
        .collect();
    let mut classes = HashSet::new();
    let mut idx = vec![0usize; k];
    loop {
        let s: Subst = vars
            .iter()
            .zip(&idx)
            .map(|(x, &i)| (x.clone(), pool[i].clone()))
            .collect();
        classes.insert(canonical_process(
            &substitute(p, &s),
            Mode::Concrete,
            main_free,
        ));
        let mut pos = 0;
        loop {
            if pos == k {
                return classes.len();
            }
            idx[pos] += 1;
            if idx[pos] < pool.len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::{AbstractMessage, Message};
    use crate::syntax::parse_process;

    fn p(s: &str) -> Process {
        parse_process(s).unwrap()
    }

    fn none() -> BTreeSet<VarName> {
        BTreeSet::new()
    }

    fn rho(pairs: &[(&str, Value)]) -> Subst {
        pairs
            .iter()
            .map(|(x, v)| (VarName::named(x), v.clone()))
            .collect()
    }

    fn a(c: &str, k: u32) -> Value {
        Value::Actor(ActorName::new(c, k))
    }

    #[test]
    fn renaming_examples() {
        let v = Value::var;
        let r = |x, y| renamings_related(&x, &y, Mode::Concrete, &none());
        assert!(r(
            rho(&[("x", v("y")), ("y", v("z"))]),
            rho(&[("x", v("x")), ("y", v("z"))])
        ));
        assert!(r(
            rho(&[("x", v("y")), ("y", v("y")), ("z", a("A", 0))]),
            rho(&[("x", v("x'")), ("y", v("x'")), ("z", a("A", 0))])
        ));
        assert!(!r(
            rho(&[("x", v("y")), ("y", v("z"))]),
            rho(&[("x", v("x")), ("y", v("x"))])
        ));
        assert!(!r(rho(&[("x", a("A", 0))]), rho(&[("x", a("B", 0))])));
        assert!(renamings_related(
            &rho(&[("x", a("A", 0))]),
            &rho(&[("x", a("A", 1))]),
            Mode::Abstract,
            &none()
        ));
    }

    #[test]
    fn process_examples() {
        let c = |x: &str, y: &str| proc_equiv(&p(x), &p(y), Mode::Concrete, &none());
        assert!(c("y!m(x, y)", "y'!m(x', y')"));
        assert!(c(
            "if x = A#0 then y!m(x, A#0, y)",
            "if z = A#0 then y'!m(z, A#0, y')"
        ));
        assert!(!c(
            "if x = A#0 then B#0!m(x, A#0, B#0)",
            "if z = A#0 then y'!m(z, A#0, y')"
        ));
        assert!(!c("y!m(x, x)", "y!m(x, z)"));
        assert!(c("let z = x in z!m(w)", "let q = u in q!m(v)"));
    }

    #[test]
    fn main_free_variables_are_fixed() {
        let mf: BTreeSet<VarName> = [VarName::named("k")].into_iter().collect();
        assert!(!proc_equiv(&p("x!m(k)"), &p("x!m(j)"), Mode::Concrete, &mf));
        assert!(proc_equiv(&p("x!m(k)"), &p("y!m(k)"), Mode::Concrete, &mf));
    }

    #[test]
    fn abstract_messages() {
        let mf = none();
        let m = |arg: Value, sigma: Vec<u32>, t: u32| AbstractMessage {
            msg: Message::new("m", vec![arg]),
            sigma,
            target: ActorName::new("A", t),
        };
        assert!(msg_equiv(
            &m(Value::var("x"), vec![1], 0),
            &m(Value::var("x"), vec![1], 1),
            Mode::Abstract,
            &mf
        ));
        assert!(!msg_equiv(
            &m(Value::var("x"), vec![1], 0),
            &m(Value::var("x"), vec![2], 0),
            Mode::Abstract,
            &mf
        ));
        assert!(!msg_equiv(
            &m(Value::var("x"), vec![1], 0),
            &m(Value::var("x"), vec![1], 1),
            Mode::Concrete,
            &mf
        ));
        // The target is renamed jointly with the arguments.
        assert!(!msg_equiv(
            &m(a("A", 0), vec![], 0),
            &m(a("A", 1), vec![], 0),
            Mode::Abstract,
            &mf
        ));
        assert!(msg_equiv(
            &m(a("A", 0), vec![], 0),
            &m(a("A", 1), vec![], 1),
            Mode::Abstract,
            &mf
        ));
    }

    #[test]
    fn embedding() {
        let mf = none();
        let m = |n: &str, x: &str| Message::new(n, vec![Value::var(x)]);
        let e = |a: &[Message], b: &[Message]| queue_embeds(a, b, Mode::Concrete, &mf);
        assert!(e(&[], &[m("m", "x")]));
        assert!(e(
            &[m("m", "x"), m("n", "y")],
            &[m("m", "x'"), m("k", "z"), m("n", "y'")]
        ));
        assert!(!e(&[m("n", "y"), m("m", "x")], &[m("m", "x"), m("n", "y")]));
    }

    #[test]
    fn configuration_orderings() {
        use crate::semantics::Allocator;
        let mf = none();
        let term = |q: Vec<Message>| ActorTerm {
            process: Process::Nil,
            sigma: vec![],
            state: State::new(),
            queue: q.into(),
        };
        let cfg = |actors: Vec<(ActorName, ActorTerm<Message>)>| Config {
            actors: actors.into_iter().collect(),
            alloc: Allocator::default(),
        };
        let an = ActorName::new("A", 0);
        let s = cfg(vec![(
            an.clone(),
            term(vec![Message::new("m", vec![Value::var("x")])]),
        )]);
        let t = cfg(vec![(
            an.clone(),
            term(vec![
                Message::new("k", vec![Value::var("y")]),
                Message::new("m", vec![Value::var("x'")]),
            ]),
        )]);
        assert!(config_leq(&s, &s, Mode::Concrete, &mf));
        assert!(config_leq(&s, &t, Mode::Concrete, &mf));
        assert!(!config_leq(&t, &s, Mode::Concrete, &mf));
        let one = cfg(vec![(an.clone(), term(vec![]))]);
        let two = cfg(vec![
            (an, term(vec![])),
            (ActorName::new("A", 1), term(vec![])),
        ]);
        assert!(config_leq(&one, &two, Mode::Abstract, &mf));
        assert!(!config_leq(&two, &one, Mode::Abstract, &mf));
        assert!(!config_leq(&one, &two, Mode::Concrete, &mf));
    }

    #[test]
    fn bell_numbers_and_bounds() {
        assert_eq!(
            (0..6).map(bell).collect::<Vec<_>>(),
            vec![1, 1, 2, 5, 15, 52]
        );
        assert_eq!(renaming_bound(3, 2), 35);
        assert_eq!(renaming_bound(1, 3), 7);
        assert_eq!(exact_renaming_classes(2, 2), 10);
        assert_eq!(exact_renaming_classes(3, 2), 37);
        assert_eq!(exact_renaming_classes(3, 0), 5);
    }

    #[test]
    fn enumeration_matches_exact_count() {
        let actors = [ActorName::new("A", 0), ActorName::new("B", 0)];
        let q = p("x!m(y, z)");
        assert_eq!(
            enumerate_renaming_classes(&q, &actors, &none()) as u128,
            exact_renaming_classes(3, 2)
        );
        assert_eq!(
            enumerate_renaming_classes(&q, &[], &none()) as u128,
            bell(3)
        );
    }

    #[test]
    fn search_agrees_on_examples() {
        let cases = [
            ("y!m(x, y)", "y'!m(x', y')", Mode::Concrete),
            (
                "if x = A#0 then B#0!m(x, A#0, B#0)",
                "if z = A#0 then y'!m(z, A#0, y')",
                Mode::Concrete,
            ),
            ("A#0!m(x)", "A#1!m(y)", Mode::Abstract),
            ("A#0!m(x)", "A#1!m(y)", Mode::Concrete),
            ("let z = x in z!m(z)", "let x = y in x!m(x)", Mode::Concrete),
        ];
        for (x, y, mode) in cases {
            assert_eq!(
                proc_equiv(&p(x), &p(y), mode, &none()),
                proc_equiv_by_search(&p(x), &p(y), mode, &none()),
                "{x} vs {y}"
            );
        }
    }
}
