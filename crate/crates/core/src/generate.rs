//! Random generation of small well-scoped programs in the decidable
//! fragments, and of processes, for property and oracle testing.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::syntax::{
    ActorName, ClassDef, ClassName, Expr, FieldName, MethodDef, MethodName, Process, Program,
    Value, VarName,
};

/// Which decidable fragment a generated program belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    /// Read-only fields, no creation inside method bodies.
    RoBa,
    /// No fields; bodies may create actors.
    Sl,
}

/// The type of a value: plain data, or an actor of some class.
type Ty = Option<ClassName>;

struct Sig {
    class: ClassName,
    method: MethodName,
    params: Vec<Ty>,
}

struct Scope {
    vals: Vec<(Expr, Ty)>,
    next_var: usize,
}

impl Scope {
    fn of(&self, ty: &Ty) -> Vec<Expr> {
        self.vals
            .iter()
            .filter(|(_, t)| t == ty)
            .map(|(e, _)| e.clone())
            .collect()
    }

    fn bind(&mut self, ty: Ty) -> VarName {
        let v = VarName::named(&format!("v{}", self.next_var));
        self.next_var += 1;
        self.vals.push((Expr::Var(v.clone()), ty));
        v
    }
}

struct Gen<'a, R> {
    rng: &'a mut R,
    shape: Shape,
    sigs: Vec<Sig>,
    fields: BTreeMap<ClassName, Vec<Ty>>,
    classes: Vec<ClassName>,
}

impl<R: Rng> Gen<'_, R> {
    fn args_for(&mut self, sig_ix: usize, scope: &Scope) -> Option<Vec<Expr>> {
        let params = self.sigs[sig_ix].params.clone();
        params
            .iter()
            .map(|t| scope.of(t).choose(self.rng).cloned())
            .collect()
    }

    fn invoke(&mut self, scope: &Scope, size: usize, in_main: bool) -> Option<Process> {
        let ix = self.rng.gen_range(0..self.sigs.len());
        let target_ty = Some(self.sigs[ix].class.clone());
        let targets: Vec<Expr> = scope
            .of(&target_ty)
            .into_iter()
            .filter(|e| !matches!(e, Expr::Field(_)))
            .collect();
        let target = targets.choose(self.rng).cloned()?;
        let args = self.args_for(ix, scope)?;
        let cont = self.process(scope, size.saturating_sub(1), in_main);
        Some(Process::Invoke {
            target,
            method: self.sigs[ix].method.clone(),
            args,
            cont: Box::new(cont),
        })
    }

    fn process(&mut self, scope: &Scope, size: usize, in_main: bool) -> Process {
        if size == 0 {
            return Process::Nil;
        }
        for _ in 0..8 {
            if let Some(p) = self.attempt(scope, size, in_main) {
                return p;
            }
        }
        Process::Nil
    }

    fn attempt(&mut self, scope: &Scope, size: usize, in_main: bool) -> Option<Process> {
        match self.rng.gen_range(0..10) {
            0..=4 => self.invoke(scope, size, in_main),
            5 => {
                let a = Box::new(self.process(scope, size / 2, in_main));
                let b = Box::new(self.process(scope, size / 2, in_main));
                Some(Process::Choice(a, b))
            }
            6 => {
                let ty = scope.vals.choose(self.rng).map(|(_, t)| t.clone())?;
                let cands = scope.of(&ty);
                let l = cands.choose(self.rng).cloned()?;
                let r = cands.choose(self.rng).cloned()?;
                let a = Box::new(self.process(scope, size / 2, in_main));
                let b = Box::new(self.process(scope, size / 2, in_main));
                Some(Process::Match(l, r, a, b))
            }
            7 if self.shape == Shape::Sl || in_main => {
                let c = self.classes.choose(self.rng).cloned()?;
                let ftys = self.fields.get(&c).cloned().unwrap_or_default();
                let args: Option<Vec<Expr>> = ftys
                    .iter()
                    .map(|t| scope.of(t).choose(self.rng).cloned())
                    .collect();
                let args = args?;
                let mut inner = Scope {
                    vals: scope.vals.clone(),
                    next_var: scope.next_var,
                };
                let v = inner.bind(Some(c.clone()));
                let cont = self.process(&inner, size - 1, in_main);
                Some(Process::Let(v, Expr::New(c, args), Box::new(cont)))
            }
            8 => {
                // Copy a value into a new variable.
                let (e, ty) = scope.vals.choose(self.rng).cloned()?;
                if matches!(e, Expr::Var(_)) && self.rng.gen_bool(0.5) {
                    return Some(self.process(scope, size - 1, in_main));
                }
                let mut inner = Scope {
                    vals: scope.vals.clone(),
                    next_var: scope.next_var,
                };
                let v = inner.bind(ty);
                let cont = self.process(&inner, size - 1, in_main);
                Some(Process::Let(v, e, Box::new(cont)))
            }
            _ => Some(Process::Nil),
        }
    }
}

/// A random program of the given shape with at most two classes. Programs
/// are well scoped and well typed in the sense that invocation targets are
/// actors of a class defining the method, so that errors arise only from
/// actors of the wrong class being compared or passed through data.
pub fn random_program<R: Rng>(rng: &mut R, shape: Shape) -> Program {
    let nclasses = rng.gen_range(1..=2);
    let classes: Vec<ClassName> = ["A", "B"][..nclasses]
        .iter()
        .map(|s| ClassName::new(s))
        .collect();
    let mut fields: BTreeMap<ClassName, Vec<Ty>> = BTreeMap::new();
    let mut sigs = Vec::new();
    for c in &classes {
        if shape == Shape::RoBa {
            let n = rng.gen_range(0..=2);
            let tys = (0..n)
                .map(|_| {
                    if rng.gen_bool(0.5) {
                        None
                    } else {
                        classes.choose(rng).cloned()
                    }
                })
                .collect();
            fields.insert(c.clone(), tys);
        }
        let nm = rng.gen_range(1..=3);
        for m in 0..nm {
            let np = rng.gen_range(0..=2);
            let params = (0..np)
                .map(|_| {
                    if rng.gen_bool(0.4) {
                        None
                    } else {
                        classes.choose(rng).cloned()
                    }
                })
                .collect();
            sigs.push(Sig {
                class: c.clone(),
                method: MethodName::new(&format!("m{m}")),
                params,
            });
        }
    }
    let mut gen = Gen {
        rng,
        shape,
        sigs,
        fields: fields.clone(),
        classes: classes.clone(),
    };
    let mut defs: BTreeMap<ClassName, ClassDef> = BTreeMap::new();
    for i in 0..gen.sigs.len() {
        let class = gen.sigs[i].class.clone();
        let mut scope = Scope {
            vals: vec![(Expr::This, Some(class.clone()))],
            next_var: 0,
        };
        let ftys = fields.get(&class).cloned().unwrap_or_default();
        for (k, t) in ftys.iter().enumerate() {
            scope
                .vals
                .push((Expr::Field(FieldName::new(&format!("f{k}"))), t.clone()));
        }
        let mut params = Vec::new();
        for (k, t) in gen.sigs[i].params.clone().into_iter().enumerate() {
            let v = VarName::named(&format!("p{k}"));
            scope.vals.push((Expr::Var(v.clone()), t));
            params.push(v);
        }
        let size = gen.rng.gen_range(0..=3);
        let body = gen.process(&scope, size, false);
        let def = defs.entry(class.clone()).or_insert_with(|| ClassDef {
            fields: (0..ftys.len())
                .map(|k| FieldName::new(&format!("f{k}")))
                .collect(),
            methods: BTreeMap::new(),
        });
        def.methods
            .insert(gen.sigs[i].method.clone(), MethodDef { params, body });
    }
    // Main: create one actor per class, then a short process.
    let mut scope = Scope {
        vals: vec![(Expr::Var(VarName::named("u")), None)],
        next_var: 0,
    };
    let mut lets = Vec::new();
    for c in &classes {
        let ftys = fields.get(c).cloned().unwrap_or_default();
        let args: Vec<Expr> = ftys
            .iter()
            .map(|t| {
                scope
                    .of(t)
                    .choose(gen.rng)
                    .cloned()
                    .unwrap_or(Expr::Var(VarName::named("u")))
            })
            .collect();
        let v = scope.bind(Some(c.clone()));
        lets.push((v, Expr::New(c.clone(), args)));
    }
    let size = gen.rng.gen_range(1..=3);
    let mut main = gen.process(&scope, size, true);
    for (v, e) in lets.into_iter().rev() {
        main = Process::Let(v, e, Box::new(main));
    }
    Program {
        classes: defs,
        main,
    }
}

/// A random process over the given names, with at most `size` prefixes.
/// Invocation targets and arguments are drawn from `names`, `this`, and
/// variables bound earlier in the process.
pub fn random_process<R: Rng>(rng: &mut R, names: &[Value], size: usize) -> Process {
    fn go<R: Rng>(rng: &mut R, pool: &mut Vec<Expr>, size: usize, next: &mut usize) -> Process {
        if size == 0 {
            return Process::Nil;
        }
        let pick = |rng: &mut R, pool: &[Expr]| pool.choose(rng).cloned().unwrap_or(Expr::This);
        match rng.gen_range(0..6) {
            0 | 1 => {
                let target = pick(rng, pool);
                let n = rng.gen_range(0..=2);
                let args = (0..n).map(|_| pick(rng, pool)).collect();
                let cont = go(rng, pool, size - 1, next);
                Process::Invoke {
                    target,
                    method: MethodName::new(["m", "n"][rng.gen_range(0..2)]),
                    args,
                    cont: Box::new(cont),
                }
            }
            2 => {
                let v = VarName::named(&format!("b{next}"));
                *next += 1;
                let e = pick(rng, pool);
                pool.push(Expr::Var(v.clone()));
                let cont = go(rng, pool, size - 1, next);
                pool.pop();
                Process::Let(v, e, Box::new(cont))
            }
            3 => {
                let l = pick(rng, pool);
                let r = pick(rng, pool);
                let a = go(rng, pool, size / 2, next);
                let b = go(rng, pool, size / 2, next);
                Process::Match(l, r, Box::new(a), Box::new(b))
            }
            4 => {
                let a = go(rng, pool, size / 2, next);
                let b = go(rng, pool, size / 2, next);
                Process::Choice(Box::new(a), Box::new(b))
            }
            _ => Process::Nil,
        }
    }
    let mut pool: Vec<Expr> = names.iter().cloned().map(Expr::from).collect();
    pool.push(Expr::This);
    let mut next = 0;
    go(rng, &mut pool, size, &mut next)
}

/// A random bijective renaming of the given renameable names into fresh
/// names of the same kind (variables to variables, actors to actors of the
/// same class).
pub fn random_renaming<R: Rng>(rng: &mut R, names: &[Value]) -> BTreeMap<Value, Value> {
    let vars: Vec<&Value> = names
        .iter()
        .filter(|v| matches!(v, Value::Var(_)))
        .collect();
    let actors: Vec<&Value> = names
        .iter()
        .filter(|v| matches!(v, Value::Actor(_)))
        .collect();
    let mut out = BTreeMap::new();
    let mut targets: Vec<u32> = (0..vars.len() as u32).collect();
    targets.shuffle(rng);
    for (v, t) in vars.iter().zip(targets) {
        out.insert((*v).clone(), Value::Var(VarName::named(&format!("r{t}"))));
    }
    let mut targets: Vec<u32> = (0..actors.len() as u32).collect();
    targets.shuffle(rng);
    for (a, t) in actors.iter().zip(targets) {
        let Value::Actor(n) = a else { unreachable!() };
        out.insert(
            (*a).clone(),
            Value::Actor(ActorName::new(n.class.clone(), 100 + t)),
        );
    }
    out
}
