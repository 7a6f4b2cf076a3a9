//! Grammars for the inline `--perm` and `--diag` flags.

use num_complex::Complex64;

/// One-line image list `s1,s2,...` (1-based).
pub fn parse_perm(s: &str) -> Result<Vec<usize>, String> {
    s.split(',').map(|t| t.trim().parse::<usize>().map_err(|_| format!("\"{t}\" is not a positive integer"))).collect()
}

/// Comma list of `re`, `re+imi`, `re-imi` or `imi` literals.
pub fn parse_diag(s: &str) -> Result<Vec<Complex64>, String> {
    s.split(',').map(|t| parse_complex(t.trim())).collect()
}

pub fn parse_complex(t: &str) -> Result<Complex64, String> {
    let bad = || format!("\"{t}\" is not a number of the form re, re+imi or imi");
    let num = |x: &str| x.parse::<f64>().map_err(|_| bad());
    let Some(body) = t.strip_suffix('i') else {
        return Ok(Complex64::new(num(t)?, 0.0));
    };
    // the sign that separates the parts is not the leading one and not an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    match split {
        Some(k) => Ok(Complex64::new(num(&body[..k])?, num(&body[k..])?)),
        None => Ok(Complex64::new(0.0, num(body)?)),
    }
}
