//! Deterministic tracing interpreter. Names are resolved to dense slots
//! before execution; every executed statement and guard evaluation costs one
//! step, except assignments to instrumentation counters, which are free so
//! instrumenting a program cannot change its fast/slow class.

use super::input::ProgramInput;
use super::trace::{ProgramPoint, RunResult, RunStatus, Trace};
use crate::lang::{BinOp, Expr, LValue, Program, StmtKind, COUNTER_PREFIX};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ExecError {
    #[error("missing value for scalar parameter `{0}`")]
    MissingScalar(String),
    #[error("missing value for array parameter `{0}`")]
    MissingArray(String),
    #[error("budget must be at least 1")]
    ZeroBudget,
}

#[derive(Debug, Clone)]
enum RExpr {
    Int(i64),
    Var(usize),
    Index(usize, Box<RExpr>),
    Neg(Box<RExpr>),
    Not(Box<RExpr>),
    Bin(BinOp, Box<RExpr>, Box<RExpr>),
}

#[derive(Debug, Clone)]
enum RLValue {
    Var { slot: usize, counter: bool },
    Elem(usize, RExpr),
}

#[derive(Debug, Clone)]
enum RStmt {
    Assign(RLValue, RExpr),
    Read(RLValue),
    If(RExpr, Vec<RStmt>, Vec<RStmt>),
    While { label_idx: usize, cond: RExpr, body: Vec<RStmt> },
    Break,
    Skip,
}

/// A program compiled to slot-addressed form, reusable across runs.
pub struct Compiled {
    int_params: Vec<String>,
    scalar_names: Vec<String>,
    array_names: Vec<String>,
    /// Array length expressions, evaluated over the scalar params at start.
    array_lens: Vec<RExpr>,
    labels: Vec<String>,
    outputs: Vec<(String, usize)>,
    body: Vec<RStmt>,
}

/// Resolves a checked program. Panics on unresolved names, so callers must
/// run `check` (or `check_with`) first.
pub fn compile(p: &Program) -> Compiled {
    let scalar_names = p.scalar_vars();
    let array_names: Vec<String> = p
        .params
        .iter()
        .filter(|prm| prm.len.is_some())
        .map(|prm| prm.name.clone())
        .collect();
    let scalar_slot = |n: &str| -> usize {
        scalar_names.iter().position(|v| v == n).unwrap_or_else(|| panic!("unresolved scalar `{n}`"))
    };
    let array_slot = |n: &str| -> usize {
        array_names.iter().position(|v| v == n).unwrap_or_else(|| panic!("unresolved array `{n}`"))
    };

    fn rexpr(e: &Expr, sc: &dyn Fn(&str) -> usize, ar: &dyn Fn(&str) -> usize) -> RExpr {
        match e {
            Expr::Int(n) => RExpr::Int(*n),
            Expr::Var(n) => RExpr::Var(sc(n)),
            Expr::Index(n, idx) => RExpr::Index(ar(n), Box::new(rexpr(idx, sc, ar))),
            Expr::Neg(x) => RExpr::Neg(Box::new(rexpr(x, sc, ar))),
            Expr::Not(x) => RExpr::Not(Box::new(rexpr(x, sc, ar))),
            Expr::Bin(op, l, r) => {
                RExpr::Bin(*op, Box::new(rexpr(l, sc, ar)), Box::new(rexpr(r, sc, ar)))
            }
        }
    }

    let mut labels = Vec::new();
    let rlvalue = |lv: &LValue| -> RLValue {
        match lv {
            LValue::Var(n) => RLValue::Var {
                slot: scalar_slot(n),
                counter: n.starts_with(COUNTER_PREFIX),
            },
            LValue::Elem(n, idx) => RLValue::Elem(array_slot(n), rexpr(idx, &scalar_slot, &array_slot)),
        }
    };

    fn rstmts(
        stmts: &[crate::lang::Stmt],
        labels: &mut Vec<String>,
        rlv: &dyn Fn(&LValue) -> RLValue,
        re: &dyn Fn(&Expr) -> RExpr,
    ) -> Vec<RStmt> {
        stmts
            .iter()
            .map(|s| match &s.kind {
                StmtKind::Assign { target, value } => RStmt::Assign(rlv(target), re(value)),
                StmtKind::Read { target } => RStmt::Read(rlv(target)),
                StmtKind::If { cond, then_branch, else_branch } => RStmt::If(
                    re(cond),
                    rstmts(then_branch, labels, rlv, re),
                    rstmts(else_branch, labels, rlv, re),
                ),
                StmtKind::While { label, cond, body } => {
                    labels.push(label.clone());
                    let label_idx = labels.len() - 1;
                    // Body is compiled after pushing so nested loops get
                    // pre-order label indices.
                    RStmt::While { label_idx, cond: re(cond), body: rstmts(body, labels, rlv, re) }
                }
                StmtKind::Break => RStmt::Break,
                StmtKind::Skip => RStmt::Skip,
            })
            .collect()
    }

    let re = |e: &Expr| rexpr(e, &scalar_slot, &array_slot);
    let body = rstmts(&p.body, &mut labels, &rlvalue, &re);
    let array_lens = p
        .params
        .iter()
        .filter_map(|prm| prm.len.as_ref())
        .map(|e| rexpr(e, &scalar_slot, &array_slot))
        .collect();
    let outputs = p.outputs.iter().map(|o| (o.clone(), scalar_slot(o))).collect();
    let int_params = p
        .params
        .iter()
        .filter(|prm| prm.len.is_none())
        .map(|prm| prm.name.clone())
        .collect();

    Compiled { int_params, scalar_names, array_names, array_lens, labels, outputs, body }
}

struct Machine<'a> {
    scalars: Vec<i64>,
    arrays: Vec<Vec<i64>>,
    stream: &'a [i64],
    stream_at: usize,
    steps: u64,
    budget: u64,
    records: Vec<(ProgramPoint, Vec<i64>)>,
}

enum Flow {
    Normal,
    Break,
    Halt(RunStatus),
}

macro_rules! charge {
    ($m:expr) => {
        if $m.steps == $m.budget {
            return Flow::Halt(RunStatus::BudgetExhausted);
        } else {
            $m.steps += 1;
        }
    };
}

impl Machine<'_> {
    fn record(&mut self, point: ProgramPoint) {
        self.records.push((point, self.scalars.clone()));
    }

    fn eval(&mut self, e: &RExpr) -> Result<i64, ()> {
        match e {
            RExpr::Int(n) => Ok(*n),
            RExpr::Var(s) => Ok(self.scalars[*s]),
            RExpr::Index(a, idx) => {
                let i = self.eval(idx)?;
                let arr = &self.arrays[*a];
                if i < 0 || i as usize >= arr.len() {
                    return Err(());
                }
                Ok(arr[i as usize])
            }
            RExpr::Neg(x) => self.eval(x)?.checked_neg().ok_or(()),
            RExpr::Not(x) => Ok(if self.eval(x)? != 0 { 0 } else { 1 }),
            RExpr::Bin(op, l, r) => {
                // Short-circuit logical operators.
                match op {
                    BinOp::And => {
                        return Ok(if self.eval(l)? != 0 && self.eval(r)? != 0 { 1 } else { 0 })
                    }
                    BinOp::Or => {
                        return Ok(if self.eval(l)? != 0 || self.eval(r)? != 0 { 1 } else { 0 })
                    }
                    _ => {}
                }
                let a = self.eval(l)?;
                let b = self.eval(r)?;
                match op {
                    BinOp::Add => a.checked_add(b).ok_or(()),
                    BinOp::Sub => a.checked_sub(b).ok_or(()),
                    BinOp::Mul => a.checked_mul(b).ok_or(()),
                    BinOp::Div => a.checked_div(b).ok_or(()),
                    BinOp::Lt => Ok((a < b) as i64),
                    BinOp::Le => Ok((a <= b) as i64),
                    BinOp::Gt => Ok((a > b) as i64),
                    BinOp::Ge => Ok((a >= b) as i64),
                    BinOp::Eq => Ok((a == b) as i64),
                    BinOp::Ne => Ok((a != b) as i64),
                    BinOp::And | BinOp::Or => unreachable!(),
                }
            }
        }
    }

    fn store(&mut self, lv: &RLValue, v: i64) -> Result<(), ()> {
        match lv {
            RLValue::Var { slot, .. } => {
                self.scalars[*slot] = v;
                Ok(())
            }
            RLValue::Elem(a, idx) => {
                let i = self.eval(idx)?;
                let arr = &mut self.arrays[*a];
                if i < 0 || i as usize >= arr.len() {
                    return Err(());
                }
                arr[i as usize] = v;
                Ok(())
            }
        }
    }

    fn exec_block(&mut self, stmts: &[RStmt], labels: &[String]) -> Flow {
        for s in stmts {
            match s {
                RStmt::Assign(lv, e) => {
                    let free = matches!(lv, RLValue::Var { counter: true, .. });
                    if !free {
                        charge!(self);
                    }
                    let v = match self.eval(e) {
                        Ok(v) => v,
                        Err(()) => return Flow::Halt(RunStatus::RuntimeError),
                    };
                    if self.store(lv, v).is_err() {
                        return Flow::Halt(RunStatus::RuntimeError);
                    }
                }
                RStmt::Read(lv) => {
                    charge!(self);
                    if self.stream_at >= self.stream.len() {
                        return Flow::Halt(RunStatus::InputExhausted);
                    }
                    let v = self.stream[self.stream_at];
                    self.stream_at += 1;
                    if self.store(lv, v).is_err() {
                        return Flow::Halt(RunStatus::RuntimeError);
                    }
                }
                RStmt::If(cond, then_b, else_b) => {
                    charge!(self);
                    match self.eval(cond) {
                        Ok(c) => {
                            let flow = if c != 0 {
                                self.exec_block(then_b, labels)
                            } else {
                                self.exec_block(else_b, labels)
                            };
                            match flow {
                                Flow::Normal => {}
                                other => return other,
                            }
                        }
                        Err(()) => return Flow::Halt(RunStatus::RuntimeError),
                    }
                }
                RStmt::While { label_idx, cond, body } => {
                    loop {
                        charge!(self);
                        match self.eval(cond) {
                            Ok(0) => break,
                            Ok(_) => match self.exec_block(body, labels) {
                                Flow::Normal => {}
                                Flow::Break => break,
                                halt => return halt,
                            },
                            Err(()) => return Flow::Halt(RunStatus::RuntimeError),
                        }
                    }
                    self.record(ProgramPoint::LoopExit(labels[*label_idx].clone()));
                }
                RStmt::Break => {
                    charge!(self);
                    return Flow::Break;
                }
                RStmt::Skip => {
                    charge!(self);
                }
            }
        }
        Flow::Normal
    }
}

impl Compiled {
    pub fn run(&self, input: &ProgramInput, budget: u64) -> Result<RunResult, ExecError> {
        if budget == 0 {
            return Err(ExecError::ZeroBudget);
        }
        for name in &self.int_params {
            if !input.scalars.contains_key(name) {
                return Err(ExecError::MissingScalar(name.clone()));
            }
        }
        let mut scalars = vec![0i64; self.scalar_names.len()];
        // Scalars listed first in scalar_names are exactly the int params.
        for (name, v) in &input.scalars {
            match self.scalar_names.iter().position(|n| n == name) {
                Some(i) => scalars[i] = *v,
                None => {} // unused input value is not an error
            }
        }
        for (i, name) in self.array_names.iter().enumerate() {
            if !input.arrays.contains_key(name) {
                return Err(ExecError::MissingArray(name.clone()));
            }
            let _ = i;
        }
        let mut m = Machine {
            scalars,
            arrays: Vec::with_capacity(self.array_names.len()),
            stream: &input.stream,
            stream_at: 0,
            steps: 0,
            budget,
            records: Vec::new(),
        };
        // Bind arrays: declared length evaluated over the scalar params,
        // contents from the input padded with zeros or truncated.
        for (i, name) in self.array_names.iter().enumerate() {
            let len = match m.eval(&self.array_lens[i]) {
                Ok(l) if l >= 0 => l as usize,
                _ => {
                    return Ok(self.finish(m, RunStatus::RuntimeError, false));
                }
            };
            let mut data = input.arrays.get(name).cloned().unwrap_or_default();
            data.resize(len, 0);
            m.arrays.push(data);
        }
        m.record(ProgramPoint::Entry);
        let status = match m.exec_block(&self.body, &self.labels) {
            Flow::Normal | Flow::Break => RunStatus::Completed,
            Flow::Halt(s) => s,
        };
        Ok(self.finish(m, status, status.is_terminated()))
    }

    fn finish(&self, mut m: Machine, status: RunStatus, record_exit: bool) -> RunResult {
        if record_exit {
            m.record(ProgramPoint::Exit);
        }
        let outputs: BTreeMap<String, i64> =
            self.outputs.iter().map(|(n, s)| (n.clone(), m.scalars[*s])).collect();
        RunResult {
            status,
            outputs,
            steps: m.steps,
            trace: Trace { vars: self.scalar_names.clone(), records: m.records },
        }
    }
}

/// One-shot convenience wrapper around [`compile`] + [`Compiled::run`].
pub fn run(p: &Program, input: &ProgramInput, budget: u64) -> Result<RunResult, ExecError> {
    compile(p).run(input, budget)
}
