//! Static validation: declaration-before-use, scalar/array and int/bool
//! consistency, unique loop labels, reserved counter prefix. Diagnostics are
//! the return value; an empty list means the program is well-formed.

use super::ast::*;
use std::collections::BTreeSet;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Diagnostic {
    UndeclaredVariable { name: String, stmt: StmtId },
    /// The variable is assigned later in the program but used first.
    UseBeforeDecl { name: String, stmt: StmtId },
    DuplicateDeclaration { name: String },
    DuplicateLabel { label: Label },
    TypeError { message: String, stmt: StmtId },
    ReservedIdentifier { name: String, stmt: StmtId },
    UnknownOutput { name: String },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::UndeclaredVariable { name, stmt } => {
                write!(f, "stmt {stmt}: undeclared variable `{name}`")
            }
            Diagnostic::UseBeforeDecl { name, stmt } => {
                write!(f, "stmt {stmt}: variable `{name}` used before its declaration")
            }
            Diagnostic::DuplicateDeclaration { name } => {
                write!(f, "duplicate declaration of `{name}`")
            }
            Diagnostic::DuplicateLabel { label } => write!(f, "duplicate loop label `{label}`"),
            Diagnostic::TypeError { message, stmt } => write!(f, "stmt {stmt}: {message}"),
            Diagnostic::ReservedIdentifier { name, stmt } => {
                write!(f, "stmt {stmt}: identifier `{name}` uses the reserved counter prefix")
            }
            Diagnostic::UnknownOutput { name } => {
                write!(f, "output `{name}` is never assigned or declared")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VarKind {
    Scalar,
    Array,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Ty {
    Int,
    Bool,
}

struct Checker {
    /// Declared so far, in pre-order.
    declared: Vec<(String, VarKind)>,
    /// Every scalar assigned anywhere in the program (to tell UseBeforeDecl
    /// from UndeclaredVariable).
    assigned_somewhere: BTreeSet<String>,
    allow_counters: bool,
    diags: Vec<Diagnostic>,
}

/// Validates a user-facing program; counter identifiers are rejected.
pub fn check(p: &Program) -> Vec<Diagnostic> {
    check_with(p, false)
}

/// Validation used for instrumented programs, where counter variables are
/// legitimate.
pub fn check_with(p: &Program, allow_counters: bool) -> Vec<Diagnostic> {
    let mut c = Checker {
        declared: Vec::new(),
        assigned_somewhere: BTreeSet::new(),
        allow_counters,
        diags: Vec::new(),
    };
    for param in &p.params {
        if c.lookup(&param.name).is_some() {
            c.diags.push(Diagnostic::DuplicateDeclaration { name: param.name.clone() });
        }
        let kind = match param.ty {
            ParamType::Int => VarKind::Scalar,
            ParamType::IntArray => VarKind::Array,
        };
        c.declared.push((param.name.clone(), kind));
    }
    // Array length expressions may only refer to scalar params.
    for param in &p.params {
        if let Some(len) = &param.len {
            c.expect_ty(len, Ty::Int, StmtId(0));
        }
    }
    p.for_each_stmt(&mut |s| {
        if let StmtKind::Assign { target: LValue::Var(n), .. }
        | StmtKind::Read { target: LValue::Var(n) } = &s.kind
        {
            c.assigned_somewhere.insert(n.clone());
        }
    });

    let mut labels = BTreeSet::new();
    p.for_each_stmt(&mut |s| {
        if let StmtKind::While { label, .. } = &s.kind {
            if !labels.insert(label.clone()) {
                c.diags.push(Diagnostic::DuplicateLabel { label: label.clone() });
            }
        }
    });

    c.check_block(&p.body);

    for out in &p.outputs {
        if c.lookup(out) != Some(VarKind::Scalar) {
            c.diags.push(Diagnostic::UnknownOutput { name: out.clone() });
        }
    }
    c.diags
}

impl Checker {
    fn lookup(&self, name: &str) -> Option<VarKind> {
        self.declared.iter().find(|(n, _)| n == name).map(|(_, k)| *k)
    }

    fn check_block(&mut self, stmts: &[Stmt]) {
        for s in stmts {
            self.check_stmt(s);
        }
    }

    fn declare_target(&mut self, target: &LValue, stmt: StmtId) {
        match target {
            LValue::Var(n) => {
                if !self.allow_counters && n.starts_with(COUNTER_PREFIX) {
                    self.diags.push(Diagnostic::ReservedIdentifier { name: n.clone(), stmt });
                }
                match self.lookup(n) {
                    Some(VarKind::Scalar) => {}
                    Some(VarKind::Array) => self.diags.push(Diagnostic::TypeError {
                        message: format!("cannot assign to array `{n}` without an index"),
                        stmt,
                    }),
                    None => self.declared.push((n.clone(), VarKind::Scalar)),
                }
            }
            LValue::Elem(n, idx) => {
                match self.lookup(n) {
                    Some(VarKind::Array) => {}
                    Some(VarKind::Scalar) => self.diags.push(Diagnostic::TypeError {
                        message: format!("cannot index scalar `{n}`"),
                        stmt,
                    }),
                    None => {
                        // Arrays exist only as parameters, so this is not an
                        // implicit declaration site.
                        self.diags.push(Diagnostic::UndeclaredVariable { name: n.clone(), stmt })
                    }
                }
                self.expect_ty(idx, Ty::Int, stmt);
            }
        }
    }

    fn check_stmt(&mut self, s: &Stmt) {
        match &s.kind {
            StmtKind::Assign { target, value } => {
                self.expect_ty(value, Ty::Int, s.id);
                self.declare_target(target, s.id);
            }
            StmtKind::Read { target } => self.declare_target(target, s.id),
            StmtKind::If { cond, then_branch, else_branch } => {
                self.expect_ty(cond, Ty::Bool, s.id);
                self.check_block(then_branch);
                self.check_block(else_branch);
            }
            StmtKind::While { cond, body, .. } => {
                self.expect_ty(cond, Ty::Bool, s.id);
                self.check_block(body);
            }
            StmtKind::Break | StmtKind::Skip => {}
        }
    }

    fn use_var(&mut self, name: &str, want: VarKind, stmt: StmtId) {
        match self.lookup(name) {
            Some(k) if k == want => {}
            Some(_) => self.diags.push(Diagnostic::TypeError {
                message: match want {
                    VarKind::Scalar => format!("array `{name}` used as a scalar"),
                    VarKind::Array => format!("cannot index scalar `{name}`"),
                },
                stmt,
            }),
            None => {
                if want == VarKind::Scalar && self.assigned_somewhere.contains(name) {
                    self.diags.push(Diagnostic::UseBeforeDecl { name: name.to_string(), stmt });
                } else {
                    self.diags.push(Diagnostic::UndeclaredVariable { name: name.to_string(), stmt });
                }
            }
        }
    }

    fn ty_of(&mut self, e: &Expr, stmt: StmtId) -> Ty {
        match e {
            Expr::Int(_) => Ty::Int,
            Expr::Var(n) => {
                self.use_var(n, VarKind::Scalar, stmt);
                Ty::Int
            }
            Expr::Index(n, idx) => {
                self.use_var(n, VarKind::Array, stmt);
                self.expect_ty(idx, Ty::Int, stmt);
                Ty::Int
            }
            Expr::Neg(inner) => {
                self.expect_ty(inner, Ty::Int, stmt);
                Ty::Int
            }
            Expr::Not(inner) => {
                self.expect_ty(inner, Ty::Bool, stmt);
                Ty::Bool
            }
            Expr::Bin(op, l, r) => {
                if op.is_logical() {
                    self.expect_ty(l, Ty::Bool, stmt);
                    self.expect_ty(r, Ty::Bool, stmt);
                    Ty::Bool
                } else if op.is_comparison() {
                    self.expect_ty(l, Ty::Int, stmt);
                    self.expect_ty(r, Ty::Int, stmt);
                    Ty::Bool
                } else {
                    self.expect_ty(l, Ty::Int, stmt);
                    self.expect_ty(r, Ty::Int, stmt);
                    Ty::Int
                }
            }
        }
    }

    fn expect_ty(&mut self, e: &Expr, want: Ty, stmt: StmtId) {
        let got = self.ty_of(e, stmt);
        if got != want {
            let name = |t| match t {
                Ty::Int => "int",
                Ty::Bool => "bool",
            };
            self.diags.push(Diagnostic::TypeError {
                message: format!(
                    "expected {} expression, found {} (`{}`)",
                    name(want),
                    name(got),
                    super::pretty::expr_str(e)
                ),
                stmt,
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse;

    #[test]
    fn toy_program_is_clean() {
        let p = parse("proc t(n: int) -> x { x := 0; while (x < n) { x := x + 1; } }").unwrap();
        assert!(check(&p).is_empty());
    }

    #[test]
    fn undeclared_array() {
        let p = parse("proc t(n: int) -> x { x := source[0]; }").unwrap();
        let diags = check(&p);
        assert!(diags
            .iter()
            .any(|d| matches!(d, Diagnostic::UndeclaredVariable { name, .. } if name == "source")));
    }

    #[test]
    fn use_before_decl_after_swapping_first_two_statements() {
        // Hand-built equivalent of swapping `x := 0` with the loop.
        let p =
            parse("proc t(n: int) -> x { while (x < n) { x := x + 1; } x := 0; }").unwrap();
        let diags = check(&p);
        assert!(diags
            .iter()
            .any(|d| matches!(d, Diagnostic::UseBeforeDecl { name, .. } if name == "x")));
    }

    #[test]
    fn reserved_counter_prefix_rejected_unless_allowed() {
        let p = parse("proc t(n: int) -> x { cnt_1 := 0; x := 0; }").unwrap();
        assert!(check(&p)
            .iter()
            .any(|d| matches!(d, Diagnostic::ReservedIdentifier { .. })));
        assert!(check_with(&p, true).is_empty());
    }

    #[test]
    fn bool_int_mismatch() {
        let p = parse("proc t(n: int) -> x { x := n < 2; }").unwrap();
        assert!(check(&p).iter().any(|d| matches!(d, Diagnostic::TypeError { .. })));
    }

    #[test]
    fn duplicate_labels() {
        let p = parse(
            "proc t(n: int) -> x { x := 0; while A (x < n) { x := x + 1; } while A (x > 0) { x := x - 1; } }",
        )
        .unwrap();
        assert!(check(&p).iter().any(|d| matches!(d, Diagnostic::DuplicateLabel { .. })));
    }
}
