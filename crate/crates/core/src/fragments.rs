//! Syntactic classification into the sublanguages with bounded actor
//! creation (`ba`), read-only fields (`ro`) and stateless actors (`sl`).

use std::fmt;

use crate::syntax::{Expr, Process, Program};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct FragmentFlags {
    /// Actors are created only by the main process.
    pub ba: bool,
    /// No field is ever updated.
    pub ro: bool,
    /// No class has fields.
    pub sl: bool,
}

/// Which decision procedure applies to a program.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Decidable {
    /// Bounded actors with read-only fields: the concrete ordering.
    RoBa,
    /// Stateless actors: the abstract ordering.
    Sl,
    Undecidable,
}

impl FragmentFlags {
    pub fn ro_ba(&self) -> bool {
        self.ro && self.ba
    }

    /// The applicable decider. Programs in both fragments use the concrete one.
    pub fn decidable(&self) -> Decidable {
        if self.ro_ba() {
            Decidable::RoBa
        } else if self.sl {
            Decidable::Sl
        } else {
            Decidable::Undecidable
        }
    }
}

impl fmt::Display for FragmentFlags {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let yn = |b: bool| if b { "yes" } else { "no" };
        write!(
            f,
            "ba={} ro={} sl={}",
            yn(self.ba),
            yn(self.ro),
            yn(self.sl)
        )
    }
}

fn creates(p: &Process) -> bool {
    fn expr(e: &Expr) -> bool {
        matches!(e, Expr::New(..))
    }
    let mut found = false;
    p.for_each_expr(&mut |e| found |= expr(e));
    found
}

fn updates(p: &Process) -> bool {
    p.suffixes()
        .iter()
        .any(|s| matches!(s, Process::Update(..)))
}

pub fn classify(program: &Program) -> FragmentFlags {
    let bodies = || {
        program
            .classes
            .values()
            .flat_map(|cd| cd.methods.values().map(|m| &m.body))
    };
    let ba = !bodies().any(creates);
    let ro = !bodies().chain(std::iter::once(&program.main)).any(updates);
    let sl = program.classes.values().all(|cd| cd.fields.is_empty());
    FragmentFlags {
        ba,
        ro: ro || sl,
        sl,
    }
}
