//! Statement-level mutations over the plain (uninstrumented) program. Every
//! mutation renumbers the result and runs the static checker, so ill-formed
//! candidates are rejected before they reach the interpreter. Inserted
//! statements are copies of statements already in the program.

use crate::lang::{check, Program, Stmt, StmtId, StmtKind};
use std::fmt;
use thiserror::Error;

/// Placement relative to an existing statement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Anchor {
    Before(StmtId),
    After(StmtId),
}

impl Anchor {
    pub fn stmt(self) -> StmtId {
        match self {
            Anchor::Before(id) | Anchor::After(id) => id,
        }
    }
}

impl fmt::Display for Anchor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Anchor::Before(id) => write!(f, "before {id}"),
            Anchor::After(id) => write!(f, "after {id}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mutation {
    /// Detach a statement (with its subtree) and reinsert it at the anchor.
    Move { stmt: StmtId, dest: Anchor },
    /// Exchange two statements (with their subtrees) in place.
    Swap { a: StmtId, b: StmtId },
    Delete { stmt: StmtId },
    /// Insert a copy of an existing statement at the anchor.
    Insert { source: StmtId, dest: Anchor },
}

impl fmt::Display for Mutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mutation::Move { stmt, dest } => write!(f, "move {stmt} {dest}"),
            Mutation::Swap { a, b } => write!(f, "swap {a} {b}"),
            Mutation::Delete { stmt } => write!(f, "delete {stmt}"),
            Mutation::Insert { source, dest } => write!(f, "insert {source} {dest}"),
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum MutationError {
    #[error("no statement with id {0}")]
    UnknownStmt(StmtId),
    #[error("destination {anchor} lies inside the subtree of statement {stmt}")]
    AnchorInsideSubtree { stmt: StmtId, anchor: StmtId },
    #[error("mutation would leave the program empty")]
    EmptyProgram,
    #[error("mutated program fails the static checker: {0}")]
    IllFormedResult(String),
}

fn contains_id(s: &Stmt, id: StmtId) -> bool {
    if s.id == id {
        return true;
    }
    match &s.kind {
        StmtKind::If { then_branch, else_branch, .. } => {
            then_branch.iter().chain(else_branch).any(|c| contains_id(c, id))
        }
        StmtKind::While { body, .. } => body.iter().any(|c| contains_id(c, id)),
        _ => false,
    }
}

/// Removes the statement with `id` from the tree, returning it.
fn take_stmt(stmts: &mut Vec<Stmt>, id: StmtId) -> Option<Stmt> {
    if let Some(pos) = stmts.iter().position(|s| s.id == id) {
        return Some(stmts.remove(pos));
    }
    for s in stmts {
        let found = match &mut s.kind {
            StmtKind::If { then_branch, else_branch, .. } => {
                take_stmt(then_branch, id).or_else(|| take_stmt(else_branch, id))
            }
            StmtKind::While { body, .. } => take_stmt(body, id),
            _ => None,
        };
        if found.is_some() {
            return found;
        }
    }
    None
}

/// Inserts at the anchor position; hands the statement back if the anchor is
/// not in this subtree.
fn insert_at(stmts: &mut Vec<Stmt>, anchor: Anchor, new: Stmt) -> Result<(), Stmt> {
    if let Some(pos) = stmts.iter().position(|s| s.id == anchor.stmt()) {
        let at = match anchor {
            Anchor::Before(_) => pos,
            Anchor::After(_) => pos + 1,
        };
        stmts.insert(at, new);
        return Ok(());
    }
    let mut new = new;
    for s in stmts.iter_mut() {
        let blocks: Vec<&mut Vec<Stmt>> = match &mut s.kind {
            StmtKind::If { then_branch, else_branch, .. } => vec![then_branch, else_branch],
            StmtKind::While { body, .. } => vec![body],
            _ => vec![],
        };
        for b in blocks {
            match insert_at(b, anchor, new) {
                Ok(()) => return Ok(()),
                Err(back) => new = back,
            }
        }
    }
    Err(new)
}

/// Replaces the kind of the statement with `id`, returning the old kind, or
/// hands the replacement back if `id` is not in this subtree.
fn replace_kind(stmts: &mut [Stmt], id: StmtId, kind: StmtKind) -> Result<StmtKind, StmtKind> {
    let mut kind = kind;
    for s in stmts.iter_mut() {
        if s.id == id {
            return Ok(std::mem::replace(&mut s.kind, kind));
        }
        let blocks: Vec<&mut Vec<Stmt>> = match &mut s.kind {
            StmtKind::If { then_branch, else_branch, .. } => vec![then_branch, else_branch],
            StmtKind::While { body, .. } => vec![body],
            _ => vec![],
        };
        for b in blocks {
            match replace_kind(b, id, kind) {
                Ok(old) => return Ok(old),
                Err(back) => kind = back,
            }
        }
    }
    Err(kind)
}

/// Fills blocks that a removal left empty so the program stays parseable.
fn fill_empty_blocks(stmts: &mut Vec<Stmt>) {
    for s in stmts {
        match &mut s.kind {
            StmtKind::If { then_branch, else_branch, .. } => {
                if then_branch.is_empty() {
                    then_branch.push(Stmt { id: StmtId(0), kind: StmtKind::Skip });
                }
                fill_empty_blocks(then_branch);
                fill_empty_blocks(else_branch);
            }
            StmtKind::While { body, .. } => {
                if body.is_empty() {
                    body.push(Stmt { id: StmtId(0), kind: StmtKind::Skip });
                }
                fill_empty_blocks(body);
            }
            _ => {}
        }
    }
}

fn finish(mut out: Program) -> Result<Program, MutationError> {
    if out.body.is_empty() {
        return Err(MutationError::EmptyProgram);
    }
    fill_empty_blocks(&mut out.body);
    out.renumber();
    let diags = check(&out);
    if diags.is_empty() {
        Ok(out)
    } else {
        let text: Vec<String> = diags.iter().map(|d| d.to_string()).collect();
        Err(MutationError::IllFormedResult(text.join("; ")))
    }
}

pub fn apply_mutation(p: &Program, m: &Mutation) -> Result<Program, MutationError> {
    let mut out = p.clone();
    let exists = |id: StmtId| p.find_stmt(id).is_some();
    match m {
        Mutation::Move { stmt, dest } => {
            let anchor_id = dest.stmt();
            if !exists(*stmt) {
                return Err(MutationError::UnknownStmt(*stmt));
            }
            if !exists(anchor_id) {
                return Err(MutationError::UnknownStmt(anchor_id));
            }
            let subject = p.find_stmt(*stmt).unwrap();
            if contains_id(subject, anchor_id) {
                return Err(MutationError::AnchorInsideSubtree { stmt: *stmt, anchor: anchor_id });
            }
            let taken = take_stmt(&mut out.body, *stmt).unwrap();
            insert_at(&mut out.body, *dest, taken)
                .map_err(|_| MutationError::UnknownStmt(anchor_id))?;
        }
        Mutation::Swap { a, b } => {
            for id in [*a, *b] {
                if !exists(id) {
                    return Err(MutationError::UnknownStmt(id));
                }
            }
            let sa = p.find_stmt(*a).unwrap();
            let sb = p.find_stmt(*b).unwrap();
            if contains_id(sa, *b) || contains_id(sb, *a) {
                return Err(MutationError::AnchorInsideSubtree { stmt: *a, anchor: *b });
            }
            let ka = sa.kind.clone();
            let kb = sb.kind.clone();
            replace_kind(&mut out.body, *a, kb).unwrap();
            replace_kind(&mut out.body, *b, ka).unwrap();
        }
        Mutation::Delete { stmt } => {
            if !exists(*stmt) {
                return Err(MutationError::UnknownStmt(*stmt));
            }
            take_stmt(&mut out.body, *stmt).unwrap();
        }
        Mutation::Insert { source, dest } => {
            let anchor_id = dest.stmt();
            let src = p.find_stmt(*source).ok_or(MutationError::UnknownStmt(*source))?;
            if !exists(anchor_id) {
                return Err(MutationError::UnknownStmt(anchor_id));
            }
            let copy = src.clone();
            insert_at(&mut out.body, *dest, copy)
                .map_err(|_| MutationError::UnknownStmt(anchor_id))?;
        }
    }
    finish(out)
}

/// Applies a mutation list left to right; statement ids in each mutation
/// refer to the program produced by the previous ones.
pub fn apply_patch(p: &Program, patch: &[Mutation]) -> Result<Program, MutationError> {
    let mut cur = p.clone();
    for m in patch {
        cur = apply_mutation(&cur, m)?;
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{parse, pretty_print};

    const PROG: &str = "proc t(n: int) -> s {\n\
        s := 0;\n\
        while L1 (s < n) {\n\
          x := 0;\n\
          s := s + 1;\n\
        }\n\
      }";

    #[test]
    fn move_out_of_loop() {
        let p = parse(PROG).unwrap();
        // ids: 1 s:=0, 2 while, 3 x:=0, 4 s:=s+1
        let q = apply_mutation(
            &p,
            &Mutation::Move { stmt: StmtId(3), dest: Anchor::After(StmtId(1)) },
        )
        .unwrap();
        let text = pretty_print(&q);
        let x_pos = text.find("x := 0").unwrap();
        let while_pos = text.find("while").unwrap();
        assert!(x_pos < while_pos);
        assert_eq!(q.stmt_count(), 4);
    }

    #[test]
    fn delete_fills_empty_block_with_skip() {
        let p = parse("proc t(n: int) -> s { s := 0; while L1 (s < n) { s := s + 1; } }").unwrap();
        let q = apply_mutation(&p, &Mutation::Delete { stmt: StmtId(3) }).unwrap();
        assert!(pretty_print(&q).contains("skip;"));
    }

    #[test]
    fn swap_statements() {
        let p = parse(PROG).unwrap();
        let q = apply_mutation(&p, &Mutation::Swap { a: StmtId(3), b: StmtId(4) }).unwrap();
        let text = pretty_print(&q);
        assert!(text.find("s := s + 1").unwrap() < text.find("x := 0").unwrap());
    }

    #[test]
    fn insert_copies_an_existing_statement() {
        let p = parse(PROG).unwrap();
        let q = apply_mutation(
            &p,
            &Mutation::Insert { source: StmtId(1), dest: Anchor::After(StmtId(2)) },
        )
        .unwrap();
        assert_eq!(q.stmt_count(), 5);
        assert!(pretty_print(&q).trim_end().ends_with("s := 0;\n}"));
    }

    #[test]
    fn anchor_inside_moved_subtree_is_rejected() {
        let p = parse(PROG).unwrap();
        let err = apply_mutation(
            &p,
            &Mutation::Move { stmt: StmtId(2), dest: Anchor::Before(StmtId(3)) },
        )
        .unwrap_err();
        assert!(matches!(err, MutationError::AnchorInsideSubtree { .. }));
    }

    #[test]
    fn use_before_decl_result_is_rejected() {
        // Moving `s := 0` after the loop leaves the loop reading an
        // undeclared s.
        let p = parse(PROG).unwrap();
        let err = apply_mutation(
            &p,
            &Mutation::Move { stmt: StmtId(1), dest: Anchor::After(StmtId(2)) },
        )
        .unwrap_err();
        assert!(matches!(err, MutationError::IllFormedResult(_)));
    }

    #[test]
    fn deleting_everything_is_an_error() {
        let p = parse("proc t(n: int) -> n { skip; }").unwrap();
        let err = apply_mutation(&p, &Mutation::Delete { stmt: StmtId(1) }).unwrap_err();
        assert_eq!(err, MutationError::EmptyProgram);
    }

    #[test]
    fn patch_ids_track_the_evolving_program() {
        let p = parse(PROG).unwrap();
        // First move x := 0 (id 3) to the top; it becomes id 1, the old
        // s := 0 becomes id 2. Then delete the moved statement by its new id.
        let q = apply_patch(
            &p,
            &[
                Mutation::Move { stmt: StmtId(3), dest: Anchor::Before(StmtId(1)) },
                Mutation::Delete { stmt: StmtId(1) },
            ],
        )
        .unwrap();
        let expected =
            parse("proc t(n: int) -> s { s := 0; while L1 (s < n) { s := s + 1; } }").unwrap();
        assert!(q.same_shape(&expected));
    }
}
