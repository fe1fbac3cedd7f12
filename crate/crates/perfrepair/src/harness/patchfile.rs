//! Line-oriented patch files: one mutation per line, applied in order to the
//! program as it evolves (ids refer to the program after the previous line).
//!
//! ```text
//! # hoist the init out of the loop
//! move 4 before 3
//! swap 2 5
//! delete 7
//! insert 1 after 6
//! ```

use crate::lang::StmtId;
use crate::repair::{Anchor, Mutation};
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("patch line {line}: {message}")]
pub struct PatchParseError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> PatchParseError {
    PatchParseError { line, message: message.into() }
}

fn stmt_id(tok: &str, line: usize) -> Result<StmtId, PatchParseError> {
    tok.parse::<u32>().map(StmtId).map_err(|_| err(line, format!("bad statement id `{tok}`")))
}

fn anchor(place: &str, id: &str, line: usize) -> Result<Anchor, PatchParseError> {
    let id = stmt_id(id, line)?;
    match place {
        "before" => Ok(Anchor::Before(id)),
        "after" => Ok(Anchor::After(id)),
        other => Err(err(line, format!("expected `before` or `after`, got `{other}`"))),
    }
}

pub fn parse_patch(text: &str) -> Result<Vec<Mutation>, PatchParseError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let m = match (toks[0], toks.len()) {
            ("move", 4) => Mutation::Move {
                stmt: stmt_id(toks[1], line_no)?,
                dest: anchor(toks[2], toks[3], line_no)?,
            },
            ("swap", 3) => {
                Mutation::Swap { a: stmt_id(toks[1], line_no)?, b: stmt_id(toks[2], line_no)? }
            }
            ("delete", 2) => Mutation::Delete { stmt: stmt_id(toks[1], line_no)? },
            ("insert", 4) => Mutation::Insert {
                source: stmt_id(toks[1], line_no)?,
                dest: anchor(toks[2], toks[3], line_no)?,
            },
            (op, _) => return Err(err(line_no, format!("unrecognized mutation `{op}`"))),
        };
        out.push(m);
    }
    Ok(out)
}

pub fn format_patch(patch: &[Mutation]) -> String {
    let mut out = String::new();
    for m in patch {
        out.push_str(&m.to_string());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let text = "move 4 before 3\nswap 2 5\ndelete 7\ninsert 1 after 6\n";
        let patch = parse_patch(text).unwrap();
        assert_eq!(patch.len(), 4);
        assert_eq!(format_patch(&patch), text);
    }

    #[test]
    fn comments_and_blanks_are_skipped() {
        let patch = parse_patch("# header\n\nmove 4 before 3  # hoist\n").unwrap();
        assert_eq!(patch, vec![Mutation::Move {
            stmt: StmtId(4),
            dest: Anchor::Before(StmtId(3)),
        }]);
    }

    #[test]
    fn bad_lines_are_reported_with_numbers() {
        let e = parse_patch("move 4 before 3\nshuffle 1 2\n").unwrap_err();
        assert_eq!(e.line, 2);
    }
}
