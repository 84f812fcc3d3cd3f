//! Two-counter machines, exact and faulty, and their encodings into actor
//! programs.

mod encode;

pub use encode::{
    ba_checkpoint, compile_ba, compile_ro, encode_cm_state, ro_checkpoint, ro_encoding_holds,
    simulate_ba_step, EncodeMode,
};

use std::fmt;

use rand::Rng;
use thiserror::Error;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Instr {
    /// Increment register 1 or 2 and continue.
    Inc(u8),
    /// Decrement a nonzero register and continue, or jump when it is zero.
    DecJump(u8, usize),
    Halt,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CounterMachine {
    /// Instruction `k` is stored at index `k - 1`.
    pub instrs: Vec<Instr>,
    /// Faulty-register mode: registers may nondeterministically become ⊥.
    pub faulty: bool,
}

/// A machine state; `None` is the faulty register value ⊥.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct CmState {
    pub pc: usize,
    pub v1: Option<u64>,
    pub v2: Option<u64>,
}

impl CmState {
    pub fn initial() -> Self {
        CmState {
            pc: 1,
            v1: Some(0),
            v2: Some(0),
        }
    }

    pub fn reg(&self, r: u8) -> Option<u64> {
        if r == 1 {
            self.v1
        } else {
            self.v2
        }
    }

    fn with_reg(mut self, r: u8, v: Option<u64>) -> Self {
        if r == 1 {
            self.v1 = v;
        } else {
            self.v2 = v;
        }
        self
    }
}

impl fmt::Display for CmState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |v: Option<u64>| v.map(|n| n.to_string()).unwrap_or_else(|| "⊥".into());
        write!(f, "({}, {}, {})", self.pc, show(self.v1), show(self.v2))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CmError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("the machine has no instructions")]
    Empty,
    #[error("instruction {0}: register must be 1 or 2")]
    BadRegister(usize),
    #[error("instruction {0}: jump target out of range")]
    BadTarget(usize),
    #[error("instruction {0}: the last instruction must be HALT")]
    FallsOff(usize),
}

impl CounterMachine {
    pub fn new(instrs: Vec<Instr>, faulty: bool) -> Result<Self, CmError> {
        let m = CounterMachine { instrs, faulty };
        m.validate()?;
        Ok(m)
    }

    pub fn len(&self) -> usize {
        self.instrs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instrs.is_empty()
    }

    pub fn instr(&self, k: usize) -> Option<Instr> {
        if k == 0 {
            return None;
        }
        self.instrs.get(k - 1).copied()
    }

    /// Every `Inc` and `DecJump` has a successor instruction, and jump targets
    /// name existing instructions.
    pub fn validate(&self) -> Result<(), CmError> {
        let n = self.instrs.len();
        if n == 0 {
            return Err(CmError::Empty);
        }
        for (i, ins) in self.instrs.iter().enumerate() {
            let k = i + 1;
            match *ins {
                Instr::Inc(r) | Instr::DecJump(r, _) if r != 1 && r != 2 => {
                    return Err(CmError::BadRegister(k))
                }
                Instr::DecJump(_, l) if l == 0 || l > n => return Err(CmError::BadTarget(k)),
                Instr::Inc(_) | Instr::DecJump(..) if k == n => return Err(CmError::FallsOff(k)),
                _ => {}
            }
        }
        Ok(())
    }

    /// Parse the text format: one `k: INC r`, `k: DECJ r l` or `k: HALT` per
    /// line, numbered consecutively from 1. `//` and `#` start comments.
    pub fn parse(src: &str, faulty: bool) -> Result<Self, CmError> {
        let mut instrs = Vec::new();
        for (ln, raw) in src.lines().enumerate() {
            let line = ln + 1;
            let text = raw
                .split("//")
                .next()
                .unwrap_or("")
                .split('#')
                .next()
                .unwrap_or("")
                .trim();
            if text.is_empty() {
                continue;
            }
            let syntax = |msg: &str| CmError::Syntax {
                line,
                msg: msg.to_string(),
            };
            let (num, rest) = text
                .split_once(':')
                .ok_or_else(|| syntax("expected `k: INSTR`"))?;
            let k: usize = num
                .trim()
                .parse()
                .map_err(|_| syntax("instruction number is not a natural"))?;
            if k != instrs.len() + 1 {
                return Err(syntax(&format!(
                    "expected instruction {}, found {k}",
                    instrs.len() + 1
                )));
            }
            let words: Vec<&str> = rest.split_whitespace().collect();
            let nat = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| syntax(&format!("`{s}` is not a natural")))
            };
            let ins = match words.as_slice() {
                [op] if op.eq_ignore_ascii_case("HALT") => Instr::Halt,
                [op, r] if op.eq_ignore_ascii_case("INC") => Instr::Inc(nat(r)?.min(255) as u8),
                [op, r, l] if op.eq_ignore_ascii_case("DECJ") => {
                    Instr::DecJump(nat(r)?.min(255) as u8, nat(l)?)
                }
                _ => return Err(syntax("expected INC r, DECJ r l or HALT")),
            };
            instrs.push(ins);
        }
        CounterMachine::new(instrs, faulty)
    }

    /// One-step successors, sorted. Faulty mode adds the transitions into ⊥
    /// and sends an instruction touching a ⊥ register to instruction 0.
    pub fn successors(&self, s: CmState) -> Vec<CmState> {
        let mut out = Vec::new();
        let Some(ins) = self.instr(s.pc) else {
            return out;
        };
        match ins {
            Instr::Halt => return out,
            Instr::Inc(r) => match s.reg(r) {
                Some(v) => out.push(CmState {
                    pc: s.pc + 1,
                    ..s.with_reg(r, Some(v + 1))
                }),
                None if self.faulty => out.push(CmState { pc: 0, ..s }),
                None => {}
            },
            Instr::DecJump(r, l) => match s.reg(r) {
                Some(0) => out.push(CmState { pc: l, ..s }),
                Some(v) => out.push(CmState {
                    pc: s.pc + 1,
                    ..s.with_reg(r, Some(v - 1))
                }),
                None if self.faulty => out.push(CmState { pc: 0, ..s }),
                None => {}
            },
        }
        if self.faulty {
            for (f1, f2) in [(true, false), (false, true), (true, true)] {
                let t = CmState {
                    pc: s.pc,
                    v1: if f1 { None } else { s.v1 },
                    v2: if f2 { None } else { s.v2 },
                };
                if t != s {
                    out.push(t);
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }

    /// The exact run from the initial state, for at most `max_steps` steps.
    /// Returns the visited states and whether the run halted.
    pub fn run_exact(&self, max_steps: usize) -> (Vec<CmState>, bool) {
        let exact = CounterMachine {
            instrs: self.instrs.clone(),
            faulty: false,
        };
        let mut s = CmState::initial();
        let mut trace = vec![s];
        for _ in 0..max_steps {
            match exact.successors(s).first() {
                Some(&t) => {
                    s = t;
                    trace.push(s);
                }
                None => return (trace, true),
            }
        }
        let halted = exact.successors(s).is_empty();
        (trace, halted)
    }

    /// A random valid machine with `len` instructions ending in `HALT`.
    pub fn random<R: Rng>(rng: &mut R, len: usize, faulty: bool) -> Self {
        let len = len.max(1);
        let mut instrs = Vec::with_capacity(len);
        for _ in 1..len {
            let r = rng.gen_range(1..=2u8);
            let ins = match rng.gen_range(0..5) {
                0 | 1 => Instr::Inc(r),
                2 | 3 => Instr::DecJump(r, rng.gen_range(1..=len)),
                _ => Instr::Halt,
            };
            instrs.push(ins);
        }
        instrs.push(Instr::Halt);
        CounterMachine { instrs, faulty }
    }
}

impl fmt::Display for CounterMachine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, ins) in self.instrs.iter().enumerate() {
            match ins {
                Instr::Inc(r) => writeln!(f, "{}: INC {r}", i + 1)?,
                Instr::DecJump(r, l) => writeln!(f, "{}: DECJ {r} {l}", i + 1)?,
                Instr::Halt => writeln!(f, "{}: HALT", i + 1)?,
            }
        }
        Ok(())
    }
}
