//! The deterministic imperative mini-language all other modules operate on:
//! parsing, validation, and canonical printing.

pub mod ast;
pub mod check;
mod lexer;
mod parser;
pub mod pretty;

pub use ast::{
    counter_name, BinOp, Expr, LValue, Label, Param, ParamType, Program, Stmt, StmtId, StmtKind,
    COUNTER_PREFIX,
};
pub use check::{check, check_with, Diagnostic};
pub use lexer::Pos;
pub use pretty::pretty_print;

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum LangError {
    #[error("syntax error at {pos}: {message}")]
    Syntax { pos: Pos, message: String },
}

/// Parses source text into a [`Program`] with dense pre-order statement ids.
pub fn parse(source: &str) -> Result<Program, LangError> {
    parser::parse(source)
}

pub use parser::parse_expr;

/// Evaluates a closed integer expression over the given environment; used
/// for derived parameters in input generation. Fails on unknown variables,
/// arrays, or division by zero.
pub fn eval_const_expr(
    e: &Expr,
    env: &std::collections::BTreeMap<String, i64>,
) -> Result<i64, String> {
    match e {
        Expr::Int(n) => Ok(*n),
        Expr::Var(n) => env.get(n).copied().ok_or_else(|| format!("unknown variable `{n}`")),
        Expr::Index(n, _) => Err(format!("array `{n}` not allowed here")),
        Expr::Neg(x) => eval_const_expr(x, env)?.checked_neg().ok_or_else(|| "overflow".into()),
        Expr::Not(_) => Err("boolean expression not allowed here".into()),
        Expr::Bin(op, l, r) => {
            let a = eval_const_expr(l, env)?;
            let b = eval_const_expr(r, env)?;
            let res = match op {
                BinOp::Add => a.checked_add(b),
                BinOp::Sub => a.checked_sub(b),
                BinOp::Mul => a.checked_mul(b),
                BinOp::Div => a.checked_div(b),
                _ => return Err(format!("operator `{}` not allowed here", op.symbol())),
            };
            res.ok_or_else(|| "overflow or division by zero".into())
        }
    }
}
