//! Canonical pretty printer. Output is deterministic, two-space indented,
//! always carries explicit loop labels, and re-parses to a structurally
//! identical program with the same statement ids.

use super::ast::*;
use std::fmt::Write;

pub fn pretty_print(p: &Program) -> String {
    let mut out = String::new();
    write!(out, "proc {}(", p.name).unwrap();
    for (i, param) in p.params.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        match param.ty {
            ParamType::Int => write!(out, "{}: int", param.name).unwrap(),
            ParamType::IntArray => {
                write!(out, "{}: int[{}]", param.name, expr_str(param.len.as_ref().unwrap()))
                    .unwrap()
            }
        }
    }
    write!(out, ") -> {} {{\n", p.outputs.join(", ")).unwrap();
    print_block(&mut out, &p.body, 1);
    out.push_str("}\n");
    out
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("  ");
    }
}

fn print_block(out: &mut String, stmts: &[Stmt], depth: usize) {
    for s in stmts {
        print_stmt(out, s, depth);
    }
}

fn print_stmt(out: &mut String, s: &Stmt, depth: usize) {
    indent(out, depth);
    match &s.kind {
        StmtKind::Assign { target, value } => {
            writeln!(out, "{} := {};", lvalue_str(target), expr_str(value)).unwrap()
        }
        StmtKind::Read { target } => writeln!(out, "{} := input();", lvalue_str(target)).unwrap(),
        StmtKind::If { cond, then_branch, else_branch } => {
            writeln!(out, "if ({}) {{", expr_str(cond)).unwrap();
            print_block(out, then_branch, depth + 1);
            if else_branch.is_empty() {
                indent(out, depth);
                out.push_str("}\n");
            } else {
                indent(out, depth);
                out.push_str("} else {\n");
                print_block(out, else_branch, depth + 1);
                indent(out, depth);
                out.push_str("}\n");
            }
        }
        StmtKind::While { label, cond, body } => {
            writeln!(out, "while {} ({}) {{", label, expr_str(cond)).unwrap();
            print_block(out, body, depth + 1);
            indent(out, depth);
            out.push_str("}\n");
        }
        StmtKind::Break => out.push_str("break;\n"),
        StmtKind::Skip => out.push_str("skip;\n"),
    }
}

fn lvalue_str(lv: &LValue) -> String {
    match lv {
        LValue::Var(n) => n.clone(),
        LValue::Elem(n, idx) => format!("{}[{}]", n, expr_str(idx)),
    }
}

pub fn expr_str(e: &Expr) -> String {
    expr_prec(e, 0)
}

fn prec_of(op: BinOp) -> u8 {
    match op {
        BinOp::Or => 1,
        BinOp::And => 2,
        BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge | BinOp::Eq | BinOp::Ne => 3,
        BinOp::Add | BinOp::Sub => 4,
        BinOp::Mul | BinOp::Div => 5,
    }
}

fn expr_prec(e: &Expr, min: u8) -> String {
    match e {
        Expr::Int(n) => n.to_string(),
        Expr::Var(n) => n.clone(),
        Expr::Index(n, idx) => format!("{}[{}]", n, expr_prec(idx, 0)),
        Expr::Neg(inner) => format!("-{}", expr_prec(inner, 6)),
        Expr::Not(inner) => format!("!{}", expr_prec(inner, 6)),
        Expr::Bin(op, l, r) => {
            let p = prec_of(*op);
            // Left-associative: the right operand needs a strictly higher
            // binding level. Comparisons do not chain, so both sides bind
            // one level tighter.
            let (lp, rp) = if op.is_comparison() { (p + 1, p + 1) } else { (p, p + 1) };
            let s = format!("{} {} {}", expr_prec(l, lp), op.symbol(), expr_prec(r, rp));
            if p < min {
                format!("({s})")
            } else {
                s
            }
        }
    }
}
