//! Deterministic plain-text report fragments: a minimal line diff and small
//! key-value formatting helpers shared by the commands.

/// Longest-common-subsequence line diff. Unchanged lines are prefixed with
/// two spaces, removals with `- `, additions with `+ `.
pub fn diff_lines(original: &str, patched: &str) -> String {
    let a: Vec<&str> = original.lines().collect();
    let b: Vec<&str> = patched.lines().collect();
    let (n, m) = (a.len(), b.len());
    let mut lcs = vec![vec![0usize; m + 1]; n + 1];
    for i in (0..n).rev() {
        for j in (0..m).rev() {
            lcs[i][j] = if a[i] == b[j] {
                lcs[i + 1][j + 1] + 1
            } else {
                lcs[i + 1][j].max(lcs[i][j + 1])
            };
        }
    }
    let mut out = String::new();
    let (mut i, mut j) = (0, 0);
    while i < n && j < m {
        if a[i] == b[j] {
            out.push_str("  ");
            out.push_str(a[i]);
            i += 1;
            j += 1;
        } else if lcs[i + 1][j] >= lcs[i][j + 1] {
            out.push_str("- ");
            out.push_str(a[i]);
            i += 1;
        } else {
            out.push_str("+ ");
            out.push_str(b[j]);
            j += 1;
        }
        out.push('\n');
    }
    for line in &a[i..] {
        out.push_str("- ");
        out.push_str(line);
        out.push('\n');
    }
    for line in &b[j..] {
        out.push_str("+ ");
        out.push_str(line);
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_inputs_diff_to_context_only() {
        let d = diff_lines("a\nb\n", "a\nb\n");
        assert_eq!(d, "  a\n  b\n");
    }

    #[test]
    fn moved_line_shows_as_remove_plus_add() {
        let d = diff_lines("x\ny\nz\n", "y\nx\nz\n");
        assert!(d.contains("- x") || d.contains("- y"));
        assert!(d.contains("+ x") || d.contains("+ y"));
        assert!(d.contains("  z"));
    }
}
