//! Text format for check matrices.
//!
//! ```text
//! # comments allowed anywhere
//! QCODE4 <M> <N>
//! K <k>                    (optional)
//! <col>:<P> <col>:<P> ...  (M check rows, P in {X,Y,Z}, 0-based cols)
//! LOGICALS <2K>            (optional section)
//! <col>:<P> ...            (2K rows, ordered X1,Z1,X2,Z2,...)
//! ```

use std::fs;
use std::path::Path;

use super::CodeSpec;
use crate::pauli::{Pauli, PauliVector};
use crate::QbpError;

pub fn save_code(code: &CodeSpec, path: impl AsRef<Path>) -> Result<(), QbpError> {
    let mut out = String::new();
    out.push_str(&format!("# {}\n", code.name()));
    out.push_str(&format!("QCODE4 {} {}\n", code.n_checks(), code.n_qubits()));
    out.push_str(&format!("K {}\n", code.n_logical()));
    for row in code.rows() {
        let line: Vec<String> = row
            .iter()
            .map(|&(c, p)| format!("{c}:{}", p.to_char()))
            .collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    if !code.logicals().is_empty() {
        out.push_str(&format!("LOGICALS {}\n", 2 * code.logicals().len()));
        for (a, b) in code.logicals() {
            for op in [a, b] {
                let line: Vec<String> = op
                    .iter()
                    .enumerate()
                    .filter(|&(_, p)| p != Pauli::I)
                    .map(|(c, p)| format!("{c}:{}", p.to_char()))
                    .collect();
                out.push_str(&line.join(" "));
                out.push('\n');
            }
        }
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn load_code(path: impl AsRef<Path>) -> Result<CodeSpec, QbpError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "loaded".into());
    parse_code(&text, name)
}

pub(crate) fn parse_code(text: &str, name: String) -> Result<CodeSpec, QbpError> {
    let mut lines = text
        .lines()
        .map(strip_comment)
        .filter(|l| !l.is_empty());

    let header = lines
        .next()
        .ok_or_else(|| QbpError::Parse("empty file".into()))?;
    let mut parts = header.split_whitespace();
    if parts.next() != Some("QCODE4") {
        return Err(QbpError::Parse(format!("malformed header: {header:?}")));
    }
    let m: usize = parse_num(parts.next(), "M")?;
    let n: usize = parse_num(parts.next(), "N")?;
    if parts.next().is_some() {
        return Err(QbpError::Parse("trailing tokens after header".into()));
    }

    let mut pending: Option<&str> = None;
    let mut stored_k: Option<usize> = None;
    if let Some(line) = lines.next() {
        if let Some(rest) = line.strip_prefix("K ") {
            stored_k = Some(
                rest.trim()
                    .parse()
                    .map_err(|_| QbpError::Parse(format!("bad K line: {line:?}")))?,
            );
        } else {
            pending = Some(line);
        }
    }

    let mut rows: Vec<Vec<(usize, Pauli)>> = Vec::with_capacity(m);
    for i in 0..m {
        let line = match pending.take() {
            Some(l) => l,
            None => lines
                .next()
                .ok_or_else(|| QbpError::Parse(format!("expected {m} check rows, got {i}")))?,
        };
        rows.push(parse_entries(line, n)?);
    }

    let mut logicals = Vec::new();
    if let Some(line) = lines.next() {
        let rest = line
            .strip_prefix("LOGICALS")
            .ok_or_else(|| QbpError::Parse(format!("unexpected line after checks: {line:?}")))?;
        let count: usize = rest
            .trim()
            .parse()
            .map_err(|_| QbpError::Parse(format!("bad LOGICALS count: {line:?}")))?;
        if count % 2 != 0 {
            return Err(QbpError::Parse(format!(
                "LOGICALS count must be even, got {count}"
            )));
        }
        let mut ops = Vec::with_capacity(count);
        for i in 0..count {
            let line = lines.next().ok_or_else(|| {
                QbpError::Parse(format!("expected {count} logical rows, got {i}"))
            })?;
            let mut op = PauliVector::identity(n);
            for (c, p) in parse_entries(line, n)? {
                op.set(c, p);
            }
            ops.push(op);
        }
        let mut it = ops.into_iter();
        while let (Some(a), Some(b)) = (it.next(), it.next()) {
            logicals.push((a, b));
        }
    }
    if lines.next().is_some() {
        return Err(QbpError::Parse("trailing content after code body".into()));
    }

    let code = CodeSpec::new(name, n, rows, logicals)?;
    if let Some(k) = stored_k {
        if k != code.n_logical() {
            return Err(QbpError::KMismatch {
                stored: k,
                computed: code.n_logical(),
            });
        }
    }
    Ok(code)
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(pos) => line[..pos].trim(),
        None => line.trim(),
    }
}

fn parse_num(tok: Option<&str>, what: &str) -> Result<usize, QbpError> {
    tok.ok_or_else(|| QbpError::Parse(format!("missing {what} in header")))?
        .parse()
        .map_err(|_| QbpError::Parse(format!("bad {what} in header")))
}

fn parse_entries(line: &str, n: usize) -> Result<Vec<(usize, Pauli)>, QbpError> {
    let mut entries: Vec<(usize, Pauli)> = Vec::new();
    for tok in line.split_whitespace() {
        let (col, sym) = tok
            .split_once(':')
            .ok_or_else(|| QbpError::Parse(format!("bad entry {tok:?}")))?;
        let c: usize = col
            .parse()
            .map_err(|_| QbpError::Parse(format!("bad column in {tok:?}")))?;
        if c >= n {
            return Err(QbpError::Parse(format!(
                "column {c} out of range (N = {n})"
            )));
        }
        let mut chars = sym.chars();
        let p = chars
            .next()
            .and_then(Pauli::from_char)
            .filter(|&p| p != Pauli::I)
            .ok_or_else(|| QbpError::Parse(format!("unknown symbol in {tok:?}")))?;
        if chars.next().is_some() {
            return Err(QbpError::Parse(format!("unknown symbol in {tok:?}")));
        }
        if entries.iter().any(|&(c0, _)| c0 == c) {
            return Err(QbpError::Parse(format!("duplicate entry for column {c}")));
        }
        entries.push((c, p));
    }
    Ok(entries)
}

#[cfg(test)]
mod tests {
    use super::super::build_planar;
    use super::*;

    #[test]
    fn round_trip_planar() {
        let code = build_planar(3).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("planar3.q4");
        save_code(&code, &path).unwrap();
        let loaded = load_code(&path).unwrap();
        assert_eq!(loaded.n_qubits(), code.n_qubits());
        assert_eq!(loaded.n_logical(), code.n_logical());
        assert_eq!(loaded.rows(), code.rows());
        assert_eq!(loaded.logicals(), code.logicals());
        loaded.validate().unwrap();
    }

    #[test]
    fn out_of_range_index_rejected() {
        let text = "QCODE4 1 13\n13:X\n";
        let err = parse_code(text, "bad".into()).unwrap_err();
        assert!(err.to_string().contains("out of range"), "{err}");
    }

    #[test]
    fn unknown_symbol_rejected() {
        let text = "QCODE4 1 4\n0:Q\n";
        assert!(parse_code(text, "bad".into()).is_err());
        let text = "QCODE4 1 4\n0:I\n";
        assert!(parse_code(text, "bad".into()).is_err());
    }

    #[test]
    fn duplicate_entry_rejected() {
        let text = "QCODE4 1 4\n0:X 0:Z\n";
        assert!(parse_code(text, "bad".into()).is_err());
    }

    #[test]
    fn malformed_header_rejected() {
        assert!(parse_code("QCODE3 1 4\n0:X\n", "bad".into()).is_err());
        assert!(parse_code("QCODE4 1\n0:X\n", "bad".into()).is_err());
        assert!(parse_code("", "bad".into()).is_err());
    }

    #[test]
    fn hand_written_trapping_set_loads_with_computed_k() {
        let text = "\
# four weight-2 Z checks on a ring
QCODE4 4 4
0:Z 1:Z
1:Z 2:Z
2:Z 3:Z
3:Z 0:Z
";
        let code = parse_code(text, "ts".into()).unwrap();
        assert_eq!(code.n_qubits(), 4);
        assert_eq!(code.n_logical(), 1); // rank 3 ring
        code.validate().unwrap();
    }

    #[test]
    fn comments_and_k_line_accepted() {
        let text = "QCODE4 2 3 # header\nK 1\n0:Z 1:Z\n# middle comment\n1:Z 2:Z\n";
        let code = parse_code(text, "c".into()).unwrap();
        assert_eq!(code.n_logical(), 1);
    }

    #[test]
    fn wrong_k_line_rejected() {
        let text = "QCODE4 2 3\nK 2\n0:Z 1:Z\n1:Z 2:Z\n";
        assert!(matches!(
            parse_code(text, "c".into()),
            Err(QbpError::KMismatch { stored: 2, computed: 1 })
        ));
    }
}
