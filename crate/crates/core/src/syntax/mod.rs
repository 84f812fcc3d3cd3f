//! Abstract syntax of the actor calculus: names, expressions, processes and
//! programs, together with free names, substitution and alpha-equivalence.

mod parser;
mod wellformed;

pub use parser::{
    parse_process, parse_program, parse_value, Diagnostic, DiagnosticKind, ParseError,
};
pub use wellformed::check_well_formed;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

macro_rules! ident_type {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name(Arc<str>);

        impl $name {
            pub fn new(s: &str) -> Self {
                $name(Arc::from(s))
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                $name::new(s)
            }
        }
    };
}

ident_type!(
    /// Name of an actor class.
    ClassName
);
ident_type!(MethodName);
ident_type!(FieldName);

/// The reserved class of the root actor.
pub const ROOT_CLASS: &str = "Root";

impl ClassName {
    pub fn root() -> Self {
        ClassName::new(ROOT_CLASS)
    }

    pub fn is_root(&self) -> bool {
        self.as_str() == ROOT_CLASS
    }
}

/// A variable. Source variables are named; run-time fresh variables are
/// numbered and print as `$k`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarName {
    Named(Arc<str>),
    Fresh(u32),
}

impl VarName {
    pub fn named(s: &str) -> Self {
        VarName::Named(Arc::from(s))
    }

    /// The same name with one more prime appended.
    fn primed(&self) -> Self {
        match self {
            VarName::Named(s) => VarName::Named(Arc::from(format!("{s}'"))),
            VarName::Fresh(k) => VarName::Named(Arc::from(format!("v{k}'"))),
        }
    }
}

impl fmt::Display for VarName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarName::Named(s) => f.write_str(s),
            VarName::Fresh(k) => write!(f, "${k}"),
        }
    }
}

impl fmt::Debug for VarName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<&str> for VarName {
    fn from(s: &str) -> Self {
        VarName::named(s)
    }
}

/// An actor name `C#k`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActorName {
    pub class: ClassName,
    pub index: u32,
}

impl ActorName {
    pub fn new(class: impl Into<ClassName>, index: u32) -> Self {
        ActorName {
            class: class.into(),
            index,
        }
    }

    pub fn root() -> Self {
        ActorName::new(ClassName::root(), 0)
    }

    pub fn is_root(&self) -> bool {
        self.class.is_root()
    }
}

impl fmt::Display for ActorName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.class, self.index)
    }
}

impl fmt::Debug for ActorName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Values are variables or actor names.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Var(VarName),
    Actor(ActorName),
}

impl Value {
    pub fn var(s: &str) -> Self {
        Value::Var(VarName::named(s))
    }

    pub fn as_actor(&self) -> Option<&ActorName> {
        match self {
            Value::Actor(a) => Some(a),
            Value::Var(_) => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Var(v) => fmt::Display::fmt(v, f),
            Value::Actor(a) => fmt::Display::fmt(a, f),
        }
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<VarName> for Value {
    fn from(v: VarName) -> Self {
        Value::Var(v)
    }
}

impl From<ActorName> for Value {
    fn from(a: ActorName) -> Self {
        Value::Actor(a)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Expr {
    Field(FieldName),
    Var(VarName),
    This,
    New(ClassName, Vec<Expr>),
    /// Run-time only: produced by substitution, never by the parser.
    Actor(ActorName),
}

impl Expr {
    pub fn var(s: &str) -> Self {
        Expr::Var(VarName::named(s))
    }

    pub fn field(s: &str) -> Self {
        Expr::Field(FieldName::new(s))
    }
}

impl From<Value> for Expr {
    fn from(v: Value) -> Self {
        match v {
            Value::Var(x) => Expr::Var(x),
            Value::Actor(a) => Expr::Actor(a),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Process {
    Nil,
    Update(FieldName, Expr, Box<Process>),
    Let(VarName, Expr, Box<Process>),
    Invoke {
        target: Expr,
        method: MethodName,
        args: Vec<Expr>,
        cont: Box<Process>,
    },
    Match(Expr, Expr, Box<Process>, Box<Process>),
    Choice(Box<Process>, Box<Process>),
}

impl Process {
    pub fn update(f: &str, e: Expr, cont: Process) -> Self {
        Process::Update(FieldName::new(f), e, Box::new(cont))
    }

    pub fn let_in(x: &str, e: Expr, body: Process) -> Self {
        Process::Let(VarName::named(x), e, Box::new(body))
    }

    pub fn invoke(target: Expr, method: &str, args: Vec<Expr>, cont: Process) -> Self {
        Process::Invoke {
            target,
            method: MethodName::new(method),
            args,
            cont: Box::new(cont),
        }
    }

    pub fn if_eq(l: Expr, r: Expr, then: Process, other: Process) -> Self {
        Process::Match(l, r, Box::new(then), Box::new(other))
    }

    pub fn choice(p: Process, q: Process) -> Self {
        Process::Choice(Box::new(p), Box::new(q))
    }

    pub fn is_nil(&self) -> bool {
        matches!(self, Process::Nil)
    }

    /// Maximum nesting depth of `+` along any path.
    pub fn choice_depth(&self) -> usize {
        match self {
            Process::Nil => 0,
            Process::Update(_, _, p) | Process::Let(_, _, p) => p.choice_depth(),
            Process::Invoke { cont, .. } => cont.choice_depth(),
            Process::Match(_, _, p, q) => p.choice_depth().max(q.choice_depth()),
            Process::Choice(p, q) => 1 + p.choice_depth().max(q.choice_depth()),
        }
    }

    /// All suffixes: the process itself and, recursively, every continuation,
    /// branch and let body.
    pub fn suffixes(&self) -> Vec<&Process> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(p) = stack.pop() {
            out.push(p);
            match p {
                Process::Nil => {}
                Process::Update(_, _, c) | Process::Let(_, _, c) => stack.push(c),
                Process::Invoke { cont, .. } => stack.push(cont),
                Process::Match(_, _, a, b) | Process::Choice(a, b) => {
                    stack.push(b);
                    stack.push(a);
                }
            }
        }
        out
    }

    /// True if `this` occurs anywhere.
    pub fn mentions_this(&self) -> bool {
        let mut found = false;
        self.for_each_expr(&mut |e| found |= expr_mentions_this(e));
        found
    }

    /// Visit every top-level expression occurring in the process.
    pub fn for_each_expr(&self, f: &mut impl FnMut(&Expr)) {
        match self {
            Process::Nil => {}
            Process::Update(_, e, p) | Process::Let(_, e, p) => {
                f(e);
                p.for_each_expr(f);
            }
            Process::Invoke {
                target, args, cont, ..
            } => {
                f(target);
                args.iter().for_each(&mut *f);
                cont.for_each_expr(f);
            }
            Process::Match(l, r, p, q) => {
                f(l);
                f(r);
                p.for_each_expr(f);
                q.for_each_expr(f);
            }
            Process::Choice(p, q) => {
                p.for_each_expr(f);
                q.for_each_expr(f);
            }
        }
    }
}

fn expr_mentions_this(e: &Expr) -> bool {
    match e {
        Expr::This => true,
        Expr::New(_, args) => args.iter().any(expr_mentions_this),
        _ => false,
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MethodDef {
    pub params: Vec<VarName>,
    pub body: Process,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ClassDef {
    pub fields: Vec<FieldName>,
    pub methods: BTreeMap<MethodName, MethodDef>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Program {
    pub classes: BTreeMap<ClassName, ClassDef>,
    pub main: Process,
}

impl Program {
    pub fn class(&self, c: &ClassName) -> Option<&ClassDef> {
        self.classes.get(c)
    }

    pub fn method(&self, c: &ClassName, m: &MethodName) -> Option<&MethodDef> {
        self.classes.get(c).and_then(|cd| cd.methods.get(m))
    }

    pub fn fields(&self, c: &ClassName) -> &[FieldName] {
        self.classes
            .get(c)
            .map(|cd| cd.fields.as_slice())
            .unwrap_or(&[])
    }

    /// Free variables of the main process. These are never renamed by the
    /// orderings.
    pub fn main_free(&self) -> BTreeSet<VarName> {
        free_vars_ordered(&self.main).into_iter().collect()
    }
}

// ---------------------------------------------------------------------------
// Free names

/// Free names of a process: variables not bound by an enclosing `let`, and
/// actor names.
pub fn free_names(p: &Process) -> BTreeSet<Value> {
    let mut out = BTreeSet::new();
    let mut bound = Vec::new();
    visit_free(p, &mut bound, &mut |v| {
        out.insert(v.clone());
    });
    out
}

/// Free variables in order of first occurrence.
pub fn free_vars_ordered(p: &Process) -> Vec<VarName> {
    let mut out: Vec<VarName> = Vec::new();
    let mut bound = Vec::new();
    visit_free(p, &mut bound, &mut |v| {
        if let Value::Var(x) = v {
            if !out.contains(x) {
                out.push(x.clone());
            }
        }
    });
    out
}

fn visit_free_expr(e: &Expr, bound: &[VarName], f: &mut impl FnMut(&Value)) {
    match e {
        Expr::Var(x) => {
            if !bound.contains(x) {
                f(&Value::Var(x.clone()));
            }
        }
        Expr::Actor(a) => f(&Value::Actor(a.clone())),
        Expr::New(_, args) => args.iter().for_each(|a| visit_free_expr(a, bound, f)),
        Expr::Field(_) | Expr::This => {}
    }
}

fn visit_free(p: &Process, bound: &mut Vec<VarName>, f: &mut impl FnMut(&Value)) {
    match p {
        Process::Nil => {}
        Process::Update(_, e, c) => {
            visit_free_expr(e, bound, f);
            visit_free(c, bound, f);
        }
        Process::Let(x, e, body) => {
            visit_free_expr(e, bound, f);
            bound.push(x.clone());
            visit_free(body, bound, f);
            bound.pop();
        }
        Process::Invoke {
            target, args, cont, ..
        } => {
            visit_free_expr(target, bound, f);
            args.iter().for_each(|a| visit_free_expr(a, bound, f));
            visit_free(cont, bound, f);
        }
        Process::Match(l, r, a, b) => {
            visit_free_expr(l, bound, f);
            visit_free_expr(r, bound, f);
            visit_free(a, bound, f);
            visit_free(b, bound, f);
        }
        Process::Choice(a, b) => {
            visit_free(a, bound, f);
            visit_free(b, bound, f);
        }
    }
}

// ---------------------------------------------------------------------------
// Substitution

pub type Subst = BTreeMap<VarName, Value>;

/// Simultaneous capture-avoiding substitution of values for free variables.
///
/// A `let` binder that coincides with a value in the range of the
/// substitution is renamed to the least primed variant that is free of
/// clashes, so the result is a pure function of the inputs.
pub fn substitute(p: &Process, s: &Subst) -> Process {
    if s.is_empty() {
        return p.clone();
    }
    subst_proc(p, s)
}

fn subst_expr(e: &Expr, s: &Subst) -> Expr {
    match e {
        Expr::Var(x) => match s.get(x) {
            Some(v) => v.clone().into(),
            None => e.clone(),
        },
        Expr::New(c, args) => Expr::New(c.clone(), args.iter().map(|a| subst_expr(a, s)).collect()),
        _ => e.clone(),
    }
}

fn subst_proc(p: &Process, s: &Subst) -> Process {
    match p {
        Process::Nil => Process::Nil,
        Process::Update(f, e, c) => {
            Process::Update(f.clone(), subst_expr(e, s), Box::new(subst_proc(c, s)))
        }
        Process::Let(x, e, body) => {
            let e2 = subst_expr(e, s);
            let fv_body: BTreeSet<Value> = free_names(body);
            let mut inner: Subst = s
                .iter()
                .filter(|(k, _)| *k != x && fv_body.contains(&Value::Var((*k).clone())))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect();
            let captures = s.values().any(|v| *v == Value::Var(x.clone()));
            if !captures {
                return Process::Let(x.clone(), e2, Box::new(subst_proc(body, &inner)));
            }
            let mut fresh = x.primed();
            loop {
                let fv = Value::Var(fresh.clone());
                let clash = fv_body.contains(&fv)
                    || s.values().any(|v| *v == fv)
                    || inner.contains_key(&fresh);
                if !clash {
                    break;
                }
                fresh = fresh.primed();
            }
            inner.insert(x.clone(), Value::Var(fresh.clone()));
            Process::Let(fresh, e2, Box::new(subst_proc(body, &inner)))
        }
        Process::Invoke {
            target,
            method,
            args,
            cont,
        } => Process::Invoke {
            target: subst_expr(target, s),
            method: method.clone(),
            args: args.iter().map(|a| subst_expr(a, s)).collect(),
            cont: Box::new(subst_proc(cont, s)),
        },
        Process::Match(l, r, a, b) => Process::Match(
            subst_expr(l, s),
            subst_expr(r, s),
            Box::new(subst_proc(a, s)),
            Box::new(subst_proc(b, s)),
        ),
        Process::Choice(a, b) => {
            Process::Choice(Box::new(subst_proc(a, s)), Box::new(subst_proc(b, s)))
        }
    }
}

/// Replace every occurrence of `this` by an actor name.
pub fn subst_this(p: &Process, a: &ActorName) -> Process {
    fn ex(e: &Expr, a: &ActorName) -> Expr {
        match e {
            Expr::This => Expr::Actor(a.clone()),
            Expr::New(c, args) => Expr::New(c.clone(), args.iter().map(|x| ex(x, a)).collect()),
            _ => e.clone(),
        }
    }
    match p {
        Process::Nil => Process::Nil,
        Process::Update(f, e, c) => {
            Process::Update(f.clone(), ex(e, a), Box::new(subst_this(c, a)))
        }
        Process::Let(x, e, c) => Process::Let(x.clone(), ex(e, a), Box::new(subst_this(c, a))),
        Process::Invoke {
            target,
            method,
            args,
            cont,
        } => Process::Invoke {
            target: ex(target, a),
            method: method.clone(),
            args: args.iter().map(|x| ex(x, a)).collect(),
            cont: Box::new(subst_this(cont, a)),
        },
        Process::Match(l, r, p1, p2) => Process::Match(
            ex(l, a),
            ex(r, a),
            Box::new(subst_this(p1, a)),
            Box::new(subst_this(p2, a)),
        ),
        Process::Choice(p1, p2) => {
            Process::Choice(Box::new(subst_this(p1, a)), Box::new(subst_this(p2, a)))
        }
    }
}

// ---------------------------------------------------------------------------
// Alpha-equivalence

/// Equality up to renaming of `let`-bound variables.
pub fn alpha_equal(p: &Process, q: &Process) -> bool {
    let mut ep = Vec::new();
    let mut eq = Vec::new();
    alpha_proc(p, q, &mut ep, &mut eq)
}

fn lookup(env: &[VarName], x: &VarName) -> Option<usize> {
    env.iter().rposition(|y| y == x).map(|i| env.len() - 1 - i)
}

fn alpha_expr(a: &Expr, b: &Expr, ea: &[VarName], eb: &[VarName]) -> bool {
    match (a, b) {
        (Expr::Var(x), Expr::Var(y)) => match (lookup(ea, x), lookup(eb, y)) {
            (Some(i), Some(j)) => i == j,
            (None, None) => x == y,
            _ => false,
        },
        (Expr::New(c, xs), Expr::New(d, ys)) => {
            c == d
                && xs.len() == ys.len()
                && xs.iter().zip(ys).all(|(x, y)| alpha_expr(x, y, ea, eb))
        }
        _ => a == b,
    }
}

fn alpha_proc(p: &Process, q: &Process, ep: &mut Vec<VarName>, eq: &mut Vec<VarName>) -> bool {
    match (p, q) {
        (Process::Nil, Process::Nil) => true,
        (Process::Update(f, e, c), Process::Update(g, e2, c2)) => {
            f == g && alpha_expr(e, e2, ep, eq) && alpha_proc(c, c2, ep, eq)
        }
        (Process::Let(x, e, c), Process::Let(y, e2, c2)) => {
            if !alpha_expr(e, e2, ep, eq) {
                return false;
            }
            ep.push(x.clone());
            eq.push(y.clone());
            let r = alpha_proc(c, c2, ep, eq);
            ep.pop();
            eq.pop();
            r
        }
        (
            Process::Invoke {
                target: t1,
                method: m1,
                args: a1,
                cont: c1,
            },
            Process::Invoke {
                target: t2,
                method: m2,
                args: a2,
                cont: c2,
            },
        ) => {
            m1 == m2
                && a1.len() == a2.len()
                && alpha_expr(t1, t2, ep, eq)
                && a1.iter().zip(a2).all(|(x, y)| alpha_expr(x, y, ep, eq))
                && alpha_proc(c1, c2, ep, eq)
        }
        (Process::Match(l1, r1, a1, b1), Process::Match(l2, r2, a2, b2)) => {
            alpha_expr(l1, l2, ep, eq)
                && alpha_expr(r1, r2, ep, eq)
                && alpha_proc(a1, a2, ep, eq)
                && alpha_proc(b1, b2, ep, eq)
        }
        (Process::Choice(a1, b1), Process::Choice(a2, b2)) => {
            alpha_proc(a1, a2, ep, eq) && alpha_proc(b1, b2, ep, eq)
        }
        _ => false,
    }
}

// ---------------------------------------------------------------------------
// Printing

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Field(x) => write!(f, "@{x}"),
            Expr::Var(x) => write!(f, "{x}"),
            Expr::This => f.write_str("this"),
            Expr::Actor(a) => write!(f, "{a}"),
            Expr::New(c, args) => {
                write!(f, "new {c}(")?;
                write_list(f, args)?;
                f.write_str(")")
            }
        }
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn write_list<T: fmt::Display>(f: &mut fmt::Formatter<'_>, xs: &[T]) -> fmt::Result {
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{x}")?;
    }
    Ok(())
}

/// Print a process in prefix position: choices need parentheses.
struct Prefix<'a>(&'a Process);

impl fmt::Display for Prefix<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Process::Choice(..) => write!(f, "({})", self.0),
            p => write!(f, "{p}"),
        }
    }
}

/// True if printing `p` ends in an `if` without `else`, which would capture
/// a following `else`.
fn dangling_else(p: &Process) -> bool {
    match p {
        Process::Nil | Process::Choice(..) => false,
        Process::Update(_, _, c) | Process::Let(_, _, c) => dangling_else(c),
        Process::Invoke { cont, .. } => dangling_else(cont),
        Process::Match(_, _, _, b) => b.is_nil() || dangling_else(b),
    }
}

impl fmt::Display for Process {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Process::Nil => f.write_str("0"),
            Process::Update(x, e, c) => write!(f, "@{x} <- {e} . {}", Prefix(c)),
            Process::Let(x, e, c) => write!(f, "let {x} = {e} in {}", Prefix(c)),
            Process::Invoke {
                target,
                method,
                args,
                cont,
            } => {
                write!(f, "{target}!{method}(")?;
                write_list(f, args)?;
                f.write_str(")")?;
                if !cont.is_nil() {
                    write!(f, " . {}", Prefix(cont))?;
                }
                Ok(())
            }
            Process::Match(l, r, a, b) => {
                if b.is_nil() {
                    write!(f, "if {l} = {r} then {}", Prefix(a))
                } else if dangling_else(a) {
                    write!(f, "if {l} = {r} then ({a}) else {}", Prefix(b))
                } else {
                    write!(f, "if {l} = {r} then {} else {}", Prefix(a), Prefix(b))
                }
            }
            Process::Choice(a, b) => {
                // `+` associates to the right when printed, so a left operand
                // that is itself a choice needs parentheses.
                match **a {
                    Process::Choice(..) => write!(f, "({a}) + {b}"),
                    _ => write!(f, "{a} + {b}"),
                }
            }
        }
    }
}

impl fmt::Debug for Process {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, cd) in &self.classes {
            write!(f, "class {name}(")?;
            write_list(f, &cd.fields)?;
            writeln!(f, ") {{")?;
            for (m, md) in &cd.methods {
                write!(f, "  def {m}(")?;
                write_list(f, &md.params)?;
                writeln!(f, ") = {}", md.body)?;
            }
            writeln!(f, "}}")?;
        }
        writeln!(f, "main {{ {} }}", self.main)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(src: &str) -> Process {
        parse_process(src).unwrap()
    }

    #[test]
    fn free_names_excludes_let_binders() {
        let fnames = free_names(&p("let x = y in x!m(x, z)"));
        assert_eq!(
            fnames,
            [Value::var("y"), Value::var("z")].into_iter().collect()
        );
        assert!(free_names(&Process::Nil).is_empty());
    }

    #[test]
    fn substitution_renames_capturing_binder() {
        // (let z = x in z!m(y, z))[z,u / x,y]
        let mut s = Subst::new();
        s.insert("x".into(), Value::var("z"));
        s.insert("y".into(), Value::var("u"));
        let out = substitute(&p("let z = x in z!m(y, z)"), &s);
        assert_eq!(out.to_string(), "let z' = z in z'!m(u, z')");
    }

    #[test]
    fn substitution_without_binders() {
        let mut s = Subst::new();
        let a = ActorName::new("C", 0);
        s.insert("x".into(), Value::Actor(a));
        let out = substitute(&p("x!m(x)"), &s);
        assert_eq!(out.to_string(), "C#0!m(C#0)");
        assert_eq!(substitute(&p("x!m(x)"), &Subst::new()), p("x!m(x)"));
    }

    #[test]
    fn alpha_equality() {
        assert!(alpha_equal(&p("let x = y in 0"), &p("let z = y in 0")));
        assert!(!alpha_equal(&p("let x = y in 0"), &p("let x = w in 0")));
        assert!(alpha_equal(
            &p("let x = y in x!m(y)"),
            &p("let z = y in z!m(y)")
        ));
        assert!(!alpha_equal(
            &p("let x = y in x!m(y)"),
            &p("let y = y in y!m(y)")
        ));
    }

    #[test]
    fn printing_parenthesizes_choices_in_prefix_position() {
        let q = p("let x = y in (x!m() + 0)");
        assert_eq!(q.to_string(), "let x = y in (x!m() + 0)");
        assert_eq!(p(&q.to_string()), q);
        let r = p("(0 + 0) + 0");
        assert_eq!(p(&r.to_string()), r);
    }
}
