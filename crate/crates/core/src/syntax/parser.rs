//! Lexer and recursive-descent parser for the surface syntax.
//!
//! ```text
//! program  := classdef* "main" "{" process "}"
//! classdef := "class" IDENT "(" identlist? ")" "{" methoddef* "}"
//! methoddef:= "def" IDENT "(" identlist? ")" "=" process
//! process  := prefix ("+" process)?
//! prefix   := "0" | "@"f "<-" expr "." prefix | "let" x "=" expr "in" prefix
//!           | expr "!" m "(" exprlist? ")" ("." prefix)?
//!           | "if" expr "=" expr "then" prefix ("else" prefix)? | "(" process ")"
//! expr     := IDENT | "@"IDENT | "this" | "new" IDENT "(" exprlist? ")"
//! ```
//!
//! Run-time terms (process queries, serialized configurations) may also
//! contain actor literals `C#k` and fresh variables `$k`.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use super::{
    free_names, ActorName, ClassDef, ClassName, Expr, FieldName, MethodDef, MethodName, Process,
    Program, Value, VarName,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiagnosticKind {
    Lexical,
    Syntax,
    DuplicateClass,
    DuplicateMethod,
    DuplicateField,
    DuplicateParam,
    ReservedClass,
    UnknownClass,
    ArityMismatch,
    FieldNotInClass,
    FieldInMain,
    ThisInMain,
    RunTimeTermInProgram,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    /// 1-based line and column, when the diagnostic comes from source text.
    pub pos: Option<(usize, usize)>,
    pub message: String,
}

impl Diagnostic {
    pub fn new(
        kind: DiagnosticKind,
        pos: Option<(usize, usize)>,
        message: impl Into<String>,
    ) -> Self {
        Diagnostic {
            kind,
            pos,
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.pos {
            Some((l, c)) => write!(f, "{l}:{c}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

#[derive(Clone, Debug, Error)]
#[error("{}", .diagnostics.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n"))]
pub struct ParseError {
    pub diagnostics: Vec<Diagnostic>,
}

impl ParseError {
    fn single(d: Diagnostic) -> Self {
        ParseError {
            diagnostics: vec![d],
        }
    }

    pub fn has(&self, kind: DiagnosticKind) -> bool {
        self.diagnostics.iter().any(|d| d.kind == kind)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Field(String),
    ActorLit(String, u32),
    Fresh(u32),
    Zero,
    Kw(&'static str),
    Sym(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Field(s) => write!(f, "field `@{s}`"),
            Tok::ActorLit(c, k) => write!(f, "actor `{c}#{k}`"),
            Tok::Fresh(k) => write!(f, "variable `${k}`"),
            Tok::Zero => f.write_str("`0`"),
            Tok::Kw(k) | Tok::Sym(k) => write!(f, "`{k}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

const KEYWORDS: [&str; 10] = [
    "class", "def", "main", "let", "in", "if", "then", "else", "new", "this",
];

type Pos = (usize, usize);

fn lex(src: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let is_id_start = |c: char| c.is_ascii_alphabetic() || c == '_';
    let is_id = |c: char| c.is_ascii_alphanumeric() || c == '_' || c == '\'';
    while i < chars.len() {
        let c = chars[i];
        let pos = (line, col);
        let adv = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            adv(1, &mut i, &mut col);
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if is_id_start(c) {
            let start = i;
            while i < chars.len() && is_id(chars[i]) {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            col += i - start;
            if chars.get(i) == Some(&'#') && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()) {
                i += 1;
                let ds = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[ds..i].iter().collect();
                col += i - ds + 1;
                let k = digits
                    .parse()
                    .map_err(|_| lex_err(pos, "actor index out of range"))?;
                out.push((Tok::ActorLit(word, k), pos));
            } else if let Some(kw) = KEYWORDS.iter().find(|k| **k == word) {
                out.push((Tok::Kw(kw), pos));
            } else {
                out.push((Tok::Ident(word), pos));
            }
            continue;
        }
        if c == '@' {
            let start = i + 1;
            let mut j = start;
            if j < chars.len() && is_id_start(chars[j]) {
                while j < chars.len() && is_id(chars[j]) {
                    j += 1;
                }
                out.push((Tok::Field(chars[start..j].iter().collect()), pos));
                col += j - i;
                i = j;
                continue;
            }
            return Err(lex_err(pos, "`@` must be followed by a field name"));
        }
        if c == '$' {
            let start = i + 1;
            let mut j = start;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            if j == start {
                return Err(lex_err(pos, "`$` must be followed by digits"));
            }
            let digits: String = chars[start..j].iter().collect();
            let k = digits
                .parse()
                .map_err(|_| lex_err(pos, "fresh variable index out of range"))?;
            out.push((Tok::Fresh(k), pos));
            col += j - i;
            i = j;
            continue;
        }
        if c == '0' && !chars.get(i + 1).is_some_and(|d| d.is_ascii_alphanumeric()) {
            out.push((Tok::Zero, pos));
            adv(1, &mut i, &mut col);
            continue;
        }
        if c == '<' && chars.get(i + 1) == Some(&'-') {
            out.push((Tok::Sym("<-"), pos));
            adv(2, &mut i, &mut col);
            continue;
        }
        let sym = match c {
            '(' => "(",
            ')' => ")",
            '{' => "{",
            '}' => "}",
            ',' => ",",
            '.' => ".",
            '=' => "=",
            '!' => "!",
            '+' => "+",
            _ => {
                return Err(lex_err(
                    pos,
                    format!("lexical error: unexpected character `{c}`"),
                ))
            }
        };
        out.push((Tok::Sym(sym), pos));
        adv(1, &mut i, &mut col);
    }
    out.push((Tok::Eof, (line, col)));
    Ok(out)
}

fn lex_err(pos: Pos, msg: impl Into<String>) -> ParseError {
    let msg = msg.into();
    let msg = if msg.starts_with("lexical error") {
        msg
    } else {
        format!("lexical error: {msg}")
    };
    ParseError::single(Diagnostic::new(DiagnosticKind::Lexical, Some(pos), msg))
}

/// Where an occurrence sits: inside a method of a class, or in main.
#[derive(Clone)]
enum Ctx {
    Method(ClassName),
    Main,
    Free,
}

struct Occurrences {
    news: Vec<(ClassName, usize, Pos)>,
    fields: Vec<(FieldName, Ctx, Pos)>,
    this_in_main: Vec<Pos>,
    runtime: Vec<Pos>,
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    i: usize,
    ctx: Ctx,
    occ: Occurrences,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn new(toks: Vec<(Tok, Pos)>, ctx: Ctx) -> Self {
        Parser {
            toks,
            i: 0,
            ctx,
            occ: Occurrences {
                news: vec![],
                fields: vec![],
                this_in_main: vec![],
                runtime: vec![],
            },
        }
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.i].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.i + k).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.i].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.i].0.clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn err<T>(&self, expected: &str) -> PResult<T> {
        Err(ParseError::single(Diagnostic::new(
            DiagnosticKind::Syntax,
            Some(self.pos()),
            format!("syntax error: expected {expected}, found {}", self.peek()),
        )))
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if *self.peek() == Tok::Sym(leak_sym(s)) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.err(&format!("`{s}`"))
        }
    }

    fn eat_kw(&mut self, k: &str) -> bool {
        if matches!(self.peek(), Tok::Kw(x) if *x == k) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_kw(&mut self, k: &str) -> PResult<()> {
        if self.eat_kw(k) {
            Ok(())
        } else {
            self.err(&format!("`{k}`"))
        }
    }

    fn ident(&mut self, what: &str) -> PResult<(String, Pos)> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok((s, pos))
            }
            _ => self.err(what),
        }
    }

    fn ident_list(&mut self, what: &str) -> PResult<Vec<(String, Pos)>> {
        let mut out = Vec::new();
        if matches!(self.peek(), Tok::Sym(")")) {
            return Ok(out);
        }
        loop {
            out.push(self.ident(what)?);
            if !self.eat_sym(",") {
                return Ok(out);
            }
        }
    }

    fn program(&mut self) -> PResult<(Program, Vec<Diagnostic>)> {
        let mut diags = Vec::new();
        let mut classes = BTreeMap::new();
        while self.eat_kw("class") {
            let (cname, cpos) = self.ident("class name")?;
            let class = ClassName::new(&cname);
            if class.is_root() {
                diags.push(Diagnostic::new(
                    DiagnosticKind::ReservedClass,
                    Some(cpos),
                    "class name `Root` is reserved",
                ));
            }
            self.expect_sym("(")?;
            let fields_src = self.ident_list("field name")?;
            self.expect_sym(")")?;
            let mut fields: Vec<FieldName> = Vec::new();
            for (f, p) in fields_src {
                let f = FieldName::new(&f);
                if fields.contains(&f) {
                    diags.push(Diagnostic::new(
                        DiagnosticKind::DuplicateField,
                        Some(p),
                        format!("duplicate field `{f}` in class `{class}`"),
                    ));
                } else {
                    fields.push(f);
                }
            }
            self.expect_sym("{")?;
            self.ctx = Ctx::Method(class.clone());
            let mut methods = BTreeMap::new();
            while self.eat_kw("def") {
                let (mname, mpos) = self.ident("method name")?;
                self.expect_sym("(")?;
                let params_src = self.ident_list("parameter name")?;
                self.expect_sym(")")?;
                let mut params: Vec<VarName> = Vec::new();
                for (x, p) in params_src {
                    let x = VarName::named(&x);
                    if params.contains(&x) {
                        diags.push(Diagnostic::new(
                            DiagnosticKind::DuplicateParam,
                            Some(p),
                            format!("duplicate parameter `{x}` in `{class}.{mname}`"),
                        ));
                    }
                    params.push(x);
                }
                self.expect_sym("=")?;
                let body = self.process()?;
                let m = MethodName::new(&mname);
                match methods.entry(m) {
                    Entry::Occupied(e) => diags.push(Diagnostic::new(
                        DiagnosticKind::DuplicateMethod,
                        Some(mpos),
                        format!("duplicate method `{class}.{}`", e.key()),
                    )),
                    Entry::Vacant(e) => {
                        e.insert(MethodDef { params, body });
                    }
                }
            }
            self.expect_sym("}")?;
            match classes.entry(class) {
                Entry::Occupied(e) => diags.push(Diagnostic::new(
                    DiagnosticKind::DuplicateClass,
                    Some(cpos),
                    format!("duplicate class `{}`", e.key()),
                )),
                Entry::Vacant(e) => {
                    e.insert(ClassDef { fields, methods });
                }
            }
        }
        if !matches!(self.peek(), Tok::Kw("main")) {
            return self.err("`class` or `main`");
        }
        self.bump();
        self.ctx = Ctx::Main;
        self.expect_sym("{")?;
        let main = self.process()?;
        self.expect_sym("}")?;
        if *self.peek() != Tok::Eof {
            return self.err("end of input");
        }
        Ok((Program { classes, main }, diags))
    }

    fn process(&mut self) -> PResult<Process> {
        let p = self.prefix()?;
        if self.eat_sym("+") {
            let q = self.process()?;
            return Ok(Process::Choice(Box::new(p), Box::new(q)));
        }
        Ok(p)
    }

    fn prefix(&mut self) -> PResult<Process> {
        match self.peek().clone() {
            Tok::Zero => {
                self.bump();
                Ok(Process::Nil)
            }
            Tok::Sym("(") => {
                self.bump();
                let p = self.process()?;
                self.expect_sym(")")?;
                Ok(p)
            }
            Tok::Kw("let") => {
                self.bump();
                let (x, _) = self.ident("variable name")?;
                self.expect_sym("=")?;
                let e = self.expr()?;
                self.expect_kw("in")?;
                let body = self.prefix()?;
                Ok(Process::Let(VarName::named(&x), e, Box::new(body)))
            }
            Tok::Kw("if") => {
                self.bump();
                let l = self.expr()?;
                self.expect_sym("=")?;
                let r = self.expr()?;
                self.expect_kw("then")?;
                let then = self.prefix()?;
                let other = if self.eat_kw("else") {
                    self.prefix()?
                } else {
                    Process::Nil
                };
                Ok(Process::Match(l, r, Box::new(then), Box::new(other)))
            }
            Tok::Field(f) if matches!(self.peek_at(1), Tok::Sym("<-")) => {
                let pos = self.pos();
                self.bump();
                self.bump();
                self.note_field(&f, pos);
                let e = self.expr()?;
                self.expect_sym(".")?;
                let cont = self.prefix()?;
                Ok(Process::Update(FieldName::new(&f), e, Box::new(cont)))
            }
            _ => self.invocation(),
        }
    }

    fn invocation(&mut self) -> PResult<Process> {
        let start = self.peek().clone();
        if !matches!(
            start,
            Tok::Ident(_)
                | Tok::Field(_)
                | Tok::Kw("this")
                | Tok::Kw("new")
                | Tok::ActorLit(..)
                | Tok::Fresh(_)
        ) {
            return self.err("a process");
        }
        let target = self.expr()?;
        self.expect_sym("!")?;
        let (m, _) = self.ident("method name")?;
        self.expect_sym("(")?;
        let args = self.expr_list()?;
        self.expect_sym(")")?;
        let cont = if self.eat_sym(".") {
            self.prefix()?
        } else {
            Process::Nil
        };
        let method = MethodName::new(&m);
        if let Expr::Field(f) = &target {
            // `@f!m(...)` abbreviates `let x = @f in x!m(...)`.
            let mut avoid: BTreeSet<Value> = free_names(&cont);
            for a in &args {
                let probe = Process::Invoke {
                    target: Expr::This,
                    method: method.clone(),
                    args: vec![a.clone()],
                    cont: Box::new(Process::Nil),
                };
                avoid.extend(free_names(&probe));
            }
            let mut x = VarName::named(&format!("_{f}"));
            while avoid.contains(&Value::Var(x.clone())) {
                x = x.primed();
            }
            let inner = Process::Invoke {
                target: Expr::Var(x.clone()),
                method,
                args,
                cont: Box::new(cont),
            };
            return Ok(Process::Let(x, target, Box::new(inner)));
        }
        Ok(Process::Invoke {
            target,
            method,
            args,
            cont: Box::new(cont),
        })
    }

    fn expr_list(&mut self) -> PResult<Vec<Expr>> {
        let mut out = Vec::new();
        if matches!(self.peek(), Tok::Sym(")")) {
            return Ok(out);
        }
        loop {
            out.push(self.expr()?);
            if !self.eat_sym(",") {
                return Ok(out);
            }
        }
    }

    fn note_field(&mut self, f: &str, pos: Pos) {
        self.occ
            .fields
            .push((FieldName::new(f), self.ctx.clone(), pos));
    }

    fn expr(&mut self) -> PResult<Expr> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Ident(x) => {
                self.bump();
                Ok(Expr::Var(VarName::named(&x)))
            }
            Tok::Field(f) => {
                self.bump();
                self.note_field(&f, pos);
                Ok(Expr::Field(FieldName::new(&f)))
            }
            Tok::Kw("this") => {
                self.bump();
                if matches!(self.ctx, Ctx::Main) {
                    self.occ.this_in_main.push(pos);
                }
                Ok(Expr::This)
            }
            Tok::Kw("new") => {
                self.bump();
                let (c, _) = self.ident("class name")?;
                self.expect_sym("(")?;
                let args = self.expr_list()?;
                self.expect_sym(")")?;
                let class = ClassName::new(&c);
                self.occ.news.push((class.clone(), args.len(), pos));
                Ok(Expr::New(class, args))
            }
            Tok::ActorLit(c, k) => {
                self.bump();
                self.occ.runtime.push(pos);
                Ok(Expr::Actor(ActorName::new(ClassName::new(&c), k)))
            }
            Tok::Fresh(k) => {
                self.bump();
                self.occ.runtime.push(pos);
                Ok(Expr::Var(VarName::Fresh(k)))
            }
            _ => self.err("an expression"),
        }
    }
}

fn leak_sym(s: &str) -> &'static str {
    ["(", ")", "{", "}", ",", ".", "=", "!", "+", "<-"]
        .into_iter()
        .find(|x| *x == s)
        .expect("known symbol")
}

/// Parse a complete program and check that it is well formed.
pub fn parse_program(src: &str) -> Result<Program, ParseError> {
    let toks = lex(src)?;
    let mut parser = Parser::new(toks, Ctx::Main);
    let (program, mut diags) = parser.program()?;
    let occ = parser.occ;
    for pos in occ.runtime {
        diags.push(Diagnostic::new(
            DiagnosticKind::RunTimeTermInProgram,
            Some(pos),
            "actor literals and `$k` variables may not appear in programs",
        ));
    }
    for (class, arity, pos) in occ.news {
        match program.classes.get(&class) {
            None => diags.push(Diagnostic::new(
                DiagnosticKind::UnknownClass,
                Some(pos),
                format!("unknown class `{class}`"),
            )),
            Some(cd) if cd.fields.len() != arity => diags.push(Diagnostic::new(
                DiagnosticKind::ArityMismatch,
                Some(pos),
                format!(
                    "arity mismatch: `new {class}` takes {} argument(s), found {arity}",
                    cd.fields.len()
                ),
            )),
            Some(_) => {}
        }
    }
    for (f, ctx, pos) in occ.fields {
        match ctx {
            Ctx::Method(c) => {
                let known = program
                    .classes
                    .get(&c)
                    .is_some_and(|cd| cd.fields.contains(&f));
                if !known {
                    diags.push(Diagnostic::new(
                        DiagnosticKind::FieldNotInClass,
                        Some(pos),
                        format!("field not in class: `@{f}` is not a field of `{c}`"),
                    ));
                }
            }
            Ctx::Main => diags.push(Diagnostic::new(
                DiagnosticKind::FieldInMain,
                Some(pos),
                format!("field `@{f}` used in main, which has no fields"),
            )),
            Ctx::Free => {}
        }
    }
    for pos in occ.this_in_main {
        diags.push(Diagnostic::new(
            DiagnosticKind::ThisInMain,
            Some(pos),
            "`this` used in main",
        ));
    }
    if diags.is_empty() {
        Ok(program)
    } else {
        diags.sort_by_key(|d| d.pos);
        Err(ParseError { diagnostics: diags })
    }
}

/// Parse a standalone process. Actor literals and `$k` variables are allowed.
pub fn parse_process(src: &str) -> Result<Process, ParseError> {
    let toks = lex(src)?;
    let mut parser = Parser::new(toks, Ctx::Free);
    let p = parser.process()?;
    if *parser.peek() != Tok::Eof {
        return parser.err("end of input");
    }
    Ok(p)
}

/// Parse a single value: a variable, `$k`, or an actor literal `C#k`.
pub fn parse_value(src: &str) -> Result<Value, ParseError> {
    let toks = lex(src)?;
    let v = match toks.first().map(|t| &t.0) {
        Some(Tok::Ident(x)) => Value::Var(VarName::named(x)),
        Some(Tok::Fresh(k)) => Value::Var(VarName::Fresh(*k)),
        Some(Tok::ActorLit(c, k)) => Value::Actor(ActorName::new(ClassName::new(c), *k)),
        _ => {
            return Err(ParseError::single(Diagnostic::new(
                DiagnosticKind::Syntax,
                Some((1, 1)),
                format!("syntax error: `{src}` is not a value"),
            )))
        }
    };
    if toks.len() != 2 {
        return Err(ParseError::single(Diagnostic::new(
            DiagnosticKind::Syntax,
            Some((1, 1)),
            format!("syntax error: `{src}` is not a value"),
        )));
    }
    Ok(v)
}
