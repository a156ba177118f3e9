//! Bit-exact file formats: tableau matrices, base64 secrets, sample files.

use crate::f2la::{BitMatrix, BitVector};
use base64::engine::general_purpose::STANDARD as BASE64;
use base64::Engine;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("{0}")]
    Invalid(String),
}

fn malformed(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Malformed {
        line,
        msg: msg.into(),
    }
}

/// Header "m n", then m lines of n characters from {0,1}. Trailing comment
/// lines prefixed '#' are allowed and ignored.
pub fn emit_matrix(h: &BitMatrix) -> String {
    let mut out = String::with_capacity((h.cols() + 1) * (h.rows() + 1) + 16);
    out.push_str(&format!("{} {}\n", h.rows(), h.cols()));
    for i in 0..h.rows() {
        for j in 0..h.cols() {
            out.push(if h.get(i, j) { '1' } else { '0' });
        }
        out.push('\n');
    }
    out
}

pub fn parse_matrix(text: &str) -> Result<BitMatrix, FormatError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| malformed(1, "empty file, expected `m n` header"))?;
    let mut parts = header.split_whitespace();
    let m: usize = parts
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| malformed(1, "header must be `m n`"))?;
    let n: usize = parts
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| malformed(1, "header must be `m n`"))?;
    if parts.next().is_some() {
        return Err(malformed(1, "header must be exactly `m n`"));
    }
    let mut out = BitMatrix::zeros(m, n);
    let mut row = 0;
    for (idx, line) in lines {
        let lineno = idx + 1;
        if row == m {
            if line.starts_with('#') || line.trim().is_empty() {
                continue;
            }
            return Err(malformed(lineno, "unexpected content after data rows"));
        }
        if line.len() != n {
            return Err(malformed(
                lineno,
                format!("expected {} characters, found {}", n, line.len()),
            ));
        }
        for (j, c) in line.chars().enumerate() {
            match c {
                '0' => {}
                '1' => out.set(row, j, true),
                other => {
                    return Err(malformed(lineno, format!("invalid character `{other}`")))
                }
            }
        }
        row += 1;
    }
    if row != m {
        return Err(FormatError::Invalid(format!(
            "expected {m} data rows, found {row}"
        )));
    }
    Ok(out)
}

/// Secret file: one base64 line packing the n bits MSB-first into bytes,
/// left-padded with zero bits to the byte boundary, followed by `n=<int>`.
pub fn emit_secret(s: &BitVector) -> String {
    let n = s.len();
    let total = n.div_ceil(8) * 8;
    let pad = total - n;
    let mut bytes = vec![0u8; total / 8];
    for i in 0..n {
        if s.get(i) {
            let t = pad + i;
            bytes[t / 8] |= 1 << (7 - t % 8);
        }
    }
    format!("{}\nn={}\n", BASE64.encode(&bytes), n)
}

pub fn parse_secret(text: &str) -> Result<BitVector, FormatError> {
    let mut lines = text.lines();
    let b64 = lines
        .next()
        .ok_or_else(|| malformed(1, "empty secret file"))?
        .trim();
    let n_line = lines
        .next()
        .ok_or_else(|| malformed(2, "missing `n=<int>` line"))?
        .trim();
    let n: usize = n_line
        .strip_prefix("n=")
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| malformed(2, "expected `n=<int>`"))?;
    let bytes = BASE64
        .decode(b64)
        .map_err(|e| malformed(1, format!("bad base64: {e}")))?;
    if bytes.len() != n.div_ceil(8) {
        return Err(FormatError::Invalid(format!(
            "{} bytes cannot hold exactly n={} bits",
            bytes.len(),
            n
        )));
    }
    let pad = bytes.len() * 8 - n;
    let mut s = BitVector::zeros(n);
    for t in 0..bytes.len() * 8 {
        if bytes[t / 8] >> (7 - t % 8) & 1 == 1 {
            if t < pad {
                return Err(FormatError::Invalid("padding bits must be zero".into()));
            }
            s.set(t - pad, true);
        }
    }
    Ok(s)
}

/// One line of n characters {0,1} per sample.
pub fn emit_samples(samples: &[BitVector]) -> String {
    let mut out = String::new();
    for s in samples {
        for i in 0..s.len() {
            out.push(if s.get(i) { '1' } else { '0' });
        }
        out.push('\n');
    }
    out
}

pub fn parse_samples(text: &str) -> Result<Vec<BitVector>, FormatError> {
    let mut out = Vec::new();
    let mut width = None;
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let w = *width.get_or_insert(line.len());
        if line.len() != w {
            return Err(malformed(lineno, format!("expected {w} characters")));
        }
        let mut v = BitVector::zeros(w);
        for (j, c) in line.chars().enumerate() {
            match c {
                '0' => {}
                '1' => v.set(j, true),
                other => {
                    return Err(malformed(lineno, format!("invalid character `{other}`")))
                }
            }
        }
        out.push(v);
    }
    if out.is_empty() {
        return Err(FormatError::Invalid("no samples in file".into()));
    }
    Ok(out)
}

/// Best-effort compatibility parser for externally published tableaus (v1):
/// '#'-comment lines skipped; rows may be contiguous 01-strings or
/// whitespace/comma-separated tokens, with integer or float zeros and ones;
/// an optional leading `m n` header is honored when present. Dimensions are
/// otherwise inferred, requiring consistent row widths.
pub fn parse_matrix_compat(text: &str) -> Result<BitMatrix, FormatError> {
    let mut rows: Vec<Vec<bool>> = Vec::new();
    let mut header: Option<(usize, usize)> = None;
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("//") {
            continue;
        }
        let tokens: Vec<&str> = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .collect();
        if rows.is_empty() && header.is_none() && tokens.len() == 2 {
            if let (Ok(m), Ok(n)) = (tokens[0].parse::<usize>(), tokens[1].parse::<usize>()) {
                if m > 1 && n > 1 {
                    header = Some((m, n));
                    continue;
                }
            }
        }
        let bits = if tokens.len() == 1 && tokens[0].chars().all(|c| c == '0' || c == '1') {
            tokens[0].chars().map(|c| c == '1').collect::<Vec<_>>()
        } else {
            let mut bits = Vec::with_capacity(tokens.len());
            for t in tokens {
                let value: f64 = t
                    .parse()
                    .map_err(|_| malformed(lineno, format!("unrecognized token `{t}`")))?;
                if value == 0.0 {
                    bits.push(false);
                } else if value == 1.0 {
                    bits.push(true);
                } else {
                    return Err(malformed(lineno, format!("non-binary value `{t}`")));
                }
            }
            bits
        };
        if let Some(first) = rows.first() {
            if bits.len() != first.len() {
                return Err(malformed(
                    lineno,
                    format!("row width {} != {}", bits.len(), first.len()),
                ));
            }
        }
        rows.push(bits);
    }
    if rows.is_empty() {
        return Err(FormatError::Invalid("no rows found".into()));
    }
    if let Some((m, n)) = header {
        if rows.len() != m || rows[0].len() != n {
            return Err(FormatError::Invalid(format!(
                "header says {}x{}, data is {}x{}",
                m,
                n,
                rows.len(),
                rows[0].len()
            )));
        }
    }
    let vecs: Vec<BitVector> = rows.iter().map(|r| BitVector::from_bools(r)).collect();
    Ok(BitMatrix::from_rows(&vecs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    #[test]
    fn matrix_roundtrip_and_comments() {
        let mut rng = rng_from_seed(10);
        let h = BitMatrix::random(9, 23, &mut rng);
        let text = emit_matrix(&h);
        assert_eq!(parse_matrix(&text).unwrap(), h);
        let with_comment = format!("{text}# generated for tests\n");
        assert_eq!(parse_matrix(&with_comment).unwrap(), h);
    }

    #[test]
    fn matrix_parse_errors_carry_line_numbers() {
        let bad = "2 3\n101\n10\n";
        match parse_matrix(bad) {
            Err(FormatError::Malformed { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected malformed, got {other:?}"),
        }
        let bad_char = "1 3\n1x1\n";
        match parse_matrix(bad_char) {
            Err(FormatError::Malformed { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected malformed, got {other:?}"),
        }
    }

    #[test]
    fn secret_roundtrip_various_lengths() {
        let mut rng = rng_from_seed(4);
        for n in [1usize, 7, 8, 9, 63, 64, 65, 300] {
            let s = BitVector::random(n, &mut rng);
            let text = emit_secret(&s);
            assert_eq!(parse_secret(&text).unwrap(), s, "n = {n}");
        }
    }

    #[test]
    fn secret_packing_is_msb_first_left_padded() {
        // n = 10, bits 1000000001 → stream 000000·1000000001 → bytes
        // 0b00000010, 0b00000001 = [0x02, 0x01].
        let mut s = BitVector::zeros(10);
        s.set(0, true);
        s.set(9, true);
        let text = emit_secret(&s);
        let b64 = text.lines().next().unwrap();
        assert_eq!(BASE64.decode(b64).unwrap(), vec![0x02, 0x01]);
    }

    #[test]
    fn samples_roundtrip() {
        let mut rng = rng_from_seed(5);
        let samples: Vec<BitVector> = (0..20).map(|_| BitVector::random(12, &mut rng)).collect();
        let text = emit_samples(&samples);
        assert_eq!(parse_samples(&text).unwrap(), samples);
        assert!(parse_samples("").is_err());
    }

    #[test]
    fn compat_parser_accepts_spaced_and_float_layouts() {
        let spaced = "0 1 1\n1 0 0\n";
        let h = parse_matrix_compat(spaced).unwrap();
        assert_eq!(h, BitMatrix::from_dense_str(&["011", "100"]));

        let floats = "# comment\n0.0 1.0 1.0\n1.0 0.0 0.0\n";
        assert_eq!(parse_matrix_compat(floats).unwrap(), h);

        let contiguous = "2 3\n011\n100\n";
        assert_eq!(parse_matrix_compat(contiguous).unwrap(), h);
    }
}
