use diffy::DiffOptions;

use crate::syntax::{pretty_print, MethodDecl, Stmt};

/// How an amplified test is proposed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Placement {
    /// The original test is edited; it only gains statements.
    InPlace,
    /// The amplified test is added after the original.
    NewMethod,
}

/// A proposed change to a test file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FileDiff {
    pub placement: Placement,
    pub modified: String,
    pub diff: String,
}

/// True when `small` is a subsequence of `large`, comparing statements
/// structurally.
fn is_subsequence(small: &[Stmt], large: &[Stmt]) -> bool {
    let mut it = large.iter();
    small.iter().all(|s| it.any(|l| l == s))
}

/// Splices `amplified` into the pristine text of the file holding
/// `original`, then diffs. `path` is the file's path inside the project.
/// Returns `None` when nothing changes.
pub fn render_diff(path: &str, source: &str, original: &MethodDecl, amplified: &MethodDecl) -> Option<FileDiff> {
    if original.body == amplified.body {
        return None;
    }
    let start = original.meta.pos.byte_offset;
    let end = original.meta.end;
    let (placement, modified) = if is_subsequence(&original.body, &amplified.body) {
        let mut renamed = amplified.clone();
        renamed.name = original.name.clone();
        let text = pretty_print(&renamed);
        (Placement::InPlace, format!("{}{}{}", &source[..start], text.trim_end(), &source[end..]))
    } else {
        let text = pretty_print(amplified);
        (Placement::NewMethod, format!("{}\n\n{}{}", &source[..end], text.trim_end(), &source[end..]))
    };
    let patch = DiffOptions::new()
        .set_context_len(3)
        .set_original_filename(format!("a/{path}"))
        .set_modified_filename(format!("b/{path}"))
        .create_patch(source, &modified);
    Some(FileDiff { placement, diff: patch.to_string(), modified })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_module;

    const FILE: &str = "// header\nfn test_a() {\n  let x = 1;\n  f(x);\n}\n";

    fn original() -> MethodDecl {
        parse_module(FILE, "tests/a.mini").unwrap().functions.remove(0)
    }

    fn amplified(src: &str) -> MethodDecl {
        parse_module(src, "x.mini").unwrap().functions.remove(0)
    }

    #[test]
    fn appended_assertion_is_one_line() {
        let a = amplified("fn test_a_amp1() { let x = 1; f(x); assert_eq(1, x); }");
        let d = render_diff("tests/a.mini", FILE, &original(), &a).unwrap();
        assert_eq!(d.placement, Placement::InPlace);
        let added: Vec<&str> = d.diff.lines().filter(|l| l.starts_with('+') && !l.starts_with("+++")).collect();
        assert_eq!(added, vec!["+  assert_eq(1, x);"]);
        assert!(d.diff.lines().all(|l| !(l.starts_with('-') && !l.starts_with("---"))));
        assert!(d.modified.starts_with("// header\nfn test_a() {"));
    }

    #[test]
    fn removal_becomes_new_method() {
        let a = amplified("fn test_a_amp1() { let x = 1; assert_eq(1, x); }");
        let d = render_diff("tests/a.mini", FILE, &original(), &a).unwrap();
        assert_eq!(d.placement, Placement::NewMethod);
        assert!(d.modified.starts_with(FILE.trim_end()));
        assert!(d.modified.contains("\n\nfn test_a_amp1() {"));
    }

    #[test]
    fn identical_is_suppressed() {
        assert!(render_diff("tests/a.mini", FILE, &original(), &original()).is_none());
    }
}
