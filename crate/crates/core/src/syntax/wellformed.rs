//! Well-formedness of programs built directly as syntax trees.

use super::parser::{Diagnostic, DiagnosticKind};
use super::{ClassName, Expr, Process, Program, VarName};

/// Check the static discipline of a program: declared classes with matching
/// arity, fields used only inside their own class, no `this` in main, and no
/// run-time terms. Returns every violation found (empty when well formed).
pub fn check_well_formed(program: &Program) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for (class, cd) in &program.classes {
        if class.is_root() {
            out.push(Diagnostic::new(
                DiagnosticKind::ReservedClass,
                None,
                "class name `Root` is reserved",
            ));
        }
        for (m, md) in &cd.methods {
            let ctx = format!("in `{class}.{m}`");
            for (i, x) in md.params.iter().enumerate() {
                if md.params[..i].contains(x) {
                    out.push(Diagnostic::new(
                        DiagnosticKind::DuplicateParam,
                        None,
                        format!("duplicate parameter `{x}` {ctx}"),
                    ));
                }
            }
            check_process(program, Some(class), &md.body, &ctx, &mut out);
        }
    }
    check_process(program, None, &program.main, "in main", &mut out);
    out
}

fn check_process(
    program: &Program,
    class: Option<&ClassName>,
    p: &Process,
    ctx: &str,
    out: &mut Vec<Diagnostic>,
) {
    p.for_each_expr(&mut |e| check_expr(program, class, e, ctx, out));
    for s in p.suffixes() {
        if let Process::Update(f, _, _) = s {
            check_field(program, class, f.as_str(), ctx, out);
        }
        if let Process::Let(VarName::Fresh(_), _, _) = s {
            out.push(Diagnostic::new(
                DiagnosticKind::RunTimeTermInProgram,
                None,
                format!("`$k` binder {ctx}"),
            ));
        }
    }
}

fn check_field(
    program: &Program,
    class: Option<&ClassName>,
    f: &str,
    ctx: &str,
    out: &mut Vec<Diagnostic>,
) {
    match class {
        None => out.push(Diagnostic::new(
            DiagnosticKind::FieldInMain,
            None,
            format!("field `@{f}` used {ctx}"),
        )),
        Some(c) => {
            if !program.fields(c).iter().any(|g| g.as_str() == f) {
                out.push(Diagnostic::new(
                    DiagnosticKind::FieldNotInClass,
                    None,
                    format!("field not in class: `@{f}` {ctx}"),
                ));
            }
        }
    }
}

fn check_expr(
    program: &Program,
    class: Option<&ClassName>,
    e: &Expr,
    ctx: &str,
    out: &mut Vec<Diagnostic>,
) {
    match e {
        Expr::Field(f) => check_field(program, class, f.as_str(), ctx, out),
        Expr::This => {
            if class.is_none() {
                out.push(Diagnostic::new(
                    DiagnosticKind::ThisInMain,
                    None,
                    "`this` used in main",
                ));
            }
        }
        Expr::Var(VarName::Fresh(_)) | Expr::Actor(_) => {
            out.push(Diagnostic::new(
                DiagnosticKind::RunTimeTermInProgram,
                None,
                format!("run-time term `{e}` {ctx}"),
            ));
        }
        Expr::Var(_) => {}
        Expr::New(c, args) => {
            match program.class(c) {
                None => out.push(Diagnostic::new(
                    DiagnosticKind::UnknownClass,
                    None,
                    format!("unknown class `{c}` {ctx}"),
                )),
                Some(cd) if cd.fields.len() != args.len() => out.push(Diagnostic::new(
                    DiagnosticKind::ArityMismatch,
                    None,
                    format!(
                        "arity mismatch: `new {c}` takes {} argument(s), found {} {ctx}",
                        cd.fields.len(),
                        args.len()
                    ),
                )),
                Some(_) => {}
            }
            for a in args {
                check_expr(program, class, a, ctx, out);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_program;

    #[test]
    fn parsed_programs_are_well_formed() {
        let p = parse_program(
            "class C(f) { def m(x) = @f <- x . this!m(x) } main { let c = new C(u) in c!m(c) }",
        )
        .unwrap();
        assert!(check_well_formed(&p).is_empty());
    }

    #[test]
    fn detects_violations_in_built_trees() {
        let mut p = parse_program("class C(f) { def m() = 0 } main { 0 }").unwrap();
        p.main = Process::invoke(
            Expr::New("C".into(), vec![]),
            "m",
            vec![Expr::This],
            Process::Nil,
        );
        let kinds: Vec<_> = check_well_formed(&p).into_iter().map(|d| d.kind).collect();
        assert!(kinds.contains(&DiagnosticKind::ArityMismatch));
        assert!(kinds.contains(&DiagnosticKind::ThisInMain));
    }
}
