//! Loop-counter instrumentation: one fresh counter per loop, zeroed at
//! program entry and incremented as the first statement of each iteration.
//! Counters never feed back into program logic and cost no steps, so the
//! functional behavior and the fast/slow class of every run are unchanged.

use crate::lang::{counter_name, BinOp, Expr, LValue, Program, Stmt, StmtId, StmtKind};

pub fn instrument(p: &Program) -> Program {
    let labels = p.loop_labels();
    if labels.is_empty() {
        return p.clone();
    }
    let mut out = p.clone();
    add_increments(&mut out.body);
    let mut inits: Vec<Stmt> = labels
        .iter()
        .map(|l| Stmt {
            id: StmtId(0),
            kind: StmtKind::Assign {
                target: LValue::Var(counter_name(l)),
                value: Expr::Int(0),
            },
        })
        .collect();
    inits.append(&mut out.body);
    out.body = inits;
    out.renumber();
    out
}

fn add_increments(stmts: &mut Vec<Stmt>) {
    for s in stmts {
        match &mut s.kind {
            StmtKind::If { then_branch, else_branch, .. } => {
                add_increments(then_branch);
                add_increments(else_branch);
            }
            StmtKind::While { label, body, .. } => {
                let cnt = counter_name(label);
                add_increments(body);
                body.insert(
                    0,
                    Stmt {
                        id: StmtId(0),
                        kind: StmtKind::Assign {
                            target: LValue::Var(cnt.clone()),
                            value: Expr::Bin(
                                BinOp::Add,
                                Box::new(Expr::Var(cnt)),
                                Box::new(Expr::Int(1)),
                            ),
                        },
                    },
                );
            }
            _ => {}
        }
    }
}
