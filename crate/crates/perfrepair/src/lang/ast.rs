//! AST for the mini-language: one procedure over 64-bit integers and
//! integer arrays, with `while`/`for`/`if` control flow and a finite
//! `input()` stream as the only side channel.

use std::fmt;

/// Dense statement identifier, assigned in pre-order over the procedure body.
/// Ids are re-derived canonically after every parse and every mutation, so a
/// pretty-print/re-parse round trip preserves them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StmtId(pub u32);

impl fmt::Display for StmtId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Loop label, e.g. `L6`. Explicit in source or derived from the line the
/// loop keyword appears on.
pub type Label = String;

/// Reserved prefix for instrumentation counters. User programs may not
/// declare identifiers with this prefix; the interpreter does not charge
/// steps for assignments to them.
pub const COUNTER_PREFIX: &str = "cnt_";

/// Counter variable name for a loop label: `L6` becomes `cnt_6`, any other
/// label `foo` becomes `cnt_foo`.
pub fn counter_name(label: &str) -> String {
    let digits = label.strip_prefix('L').filter(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()));
    match digits {
        Some(d) => format!("{COUNTER_PREFIX}{d}"),
        None => format!("{COUNTER_PREFIX}{label}"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamType {
    Int,
    /// Array of ints; the length expression is evaluated over the scalar
    /// parameters when a run starts.
    IntArray,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Param {
    pub name: String,
    pub ty: ParamType,
    /// Declared length expression, present iff `ty == IntArray`.
    pub len: Option<Expr>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    pub name: String,
    pub params: Vec<Param>,
    pub outputs: Vec<String>,
    pub body: Vec<Stmt>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LValue {
    Var(String),
    /// `a[idx]`
    Elem(String, Expr),
}

impl LValue {
    pub fn base(&self) -> &str {
        match self {
            LValue::Var(n) | LValue::Elem(n, _) => n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stmt {
    pub id: StmtId,
    pub kind: StmtKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StmtKind {
    /// `lv := e;`
    Assign { target: LValue, value: Expr },
    /// `lv := input();` — reads the next value from the test input stream.
    Read { target: LValue },
    If {
        cond: Expr,
        then_branch: Vec<Stmt>,
        else_branch: Vec<Stmt>,
    },
    While {
        label: Label,
        cond: Expr,
        body: Vec<Stmt>,
    },
    Break,
    Skip,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    And,
    Or,
}

impl BinOp {
    pub fn is_comparison(self) -> bool {
        matches!(self, BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge | BinOp::Eq | BinOp::Ne)
    }
    pub fn is_logical(self) -> bool {
        matches!(self, BinOp::And | BinOp::Or)
    }
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::And => "&&",
            BinOp::Or => "||",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Int(i64),
    Var(String),
    /// `a[idx]`
    Index(String, Box<Expr>),
    Neg(Box<Expr>),
    Not(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
}

impl Program {
    /// Pre-order renumbering of all statement ids, starting at 1.
    pub fn renumber(&mut self) {
        let mut next = 1u32;
        fn walk(stmts: &mut [Stmt], next: &mut u32) {
            for s in stmts {
                s.id = StmtId(*next);
                *next += 1;
                match &mut s.kind {
                    StmtKind::If { then_branch, else_branch, .. } => {
                        walk(then_branch, next);
                        walk(else_branch, next);
                    }
                    StmtKind::While { body, .. } => walk(body, next),
                    _ => {}
                }
            }
        }
        walk(&mut self.body, &mut next);
    }

    /// Visit every statement in pre-order.
    pub fn for_each_stmt<'a>(&'a self, f: &mut impl FnMut(&'a Stmt)) {
        fn walk<'a>(stmts: &'a [Stmt], f: &mut impl FnMut(&'a Stmt)) {
            for s in stmts {
                f(s);
                match &s.kind {
                    StmtKind::If { then_branch, else_branch, .. } => {
                        walk(then_branch, f);
                        walk(else_branch, f);
                    }
                    StmtKind::While { body, .. } => walk(body, f),
                    _ => {}
                }
            }
        }
        walk(&self.body, f);
    }

    pub fn find_stmt(&self, id: StmtId) -> Option<&Stmt> {
        let mut found = None;
        self.for_each_stmt(&mut |s| {
            if s.id == id {
                found = Some(s);
            }
        });
        found
    }

    pub fn stmt_count(&self) -> usize {
        let mut n = 0;
        self.for_each_stmt(&mut |_| n += 1);
        n
    }

    /// Labels of all loops in pre-order.
    pub fn loop_labels(&self) -> Vec<Label> {
        let mut out = Vec::new();
        self.for_each_stmt(&mut |s| {
            if let StmtKind::While { label, .. } = &s.kind {
                out.push(label.clone());
            }
        });
        out
    }

    /// All scalar variable names (int params plus every assigned local), in
    /// first-appearance order. Counter variables are included when present.
    pub fn scalar_vars(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        let push = |n: &str, out: &mut Vec<String>| {
            if !out.iter().any(|v| v == n) {
                out.push(n.to_string());
            }
        };
        for p in &self.params {
            if p.ty == ParamType::Int {
                push(&p.name, &mut out);
            }
        }
        self.for_each_stmt(&mut |s| match &s.kind {
            StmtKind::Assign { target: LValue::Var(n), .. }
            | StmtKind::Read { target: LValue::Var(n) } => push(n, &mut out),
            _ => {}
        });
        out
    }

    /// Structural equality that ignores statement ids.
    pub fn same_shape(&self, other: &Program) -> bool {
        fn stmts_eq(a: &[Stmt], b: &[Stmt]) -> bool {
            a.len() == b.len() && a.iter().zip(b).all(|(x, y)| stmt_eq(x, y))
        }
        fn stmt_eq(a: &Stmt, b: &Stmt) -> bool {
            match (&a.kind, &b.kind) {
                (
                    StmtKind::If { cond: c1, then_branch: t1, else_branch: e1 },
                    StmtKind::If { cond: c2, then_branch: t2, else_branch: e2 },
                ) => c1 == c2 && stmts_eq(t1, t2) && stmts_eq(e1, e2),
                (
                    StmtKind::While { label: l1, cond: c1, body: b1 },
                    StmtKind::While { label: l2, cond: c2, body: b2 },
                ) => l1 == l2 && c1 == c2 && stmts_eq(b1, b2),
                (k1, k2) => k1 == k2,
            }
        }
        self.name == other.name
            && self.params == other.params
            && self.outputs == other.outputs
            && stmts_eq(&self.body, &other.body)
    }
}
