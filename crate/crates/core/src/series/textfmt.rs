//! Debug/JSON text form of a series:
//!
//!     q^(3/2) e=2 O(40) [(-3, 1), (-1, 2*w + 1)]
//!
//! magnitude, ramification index, precision bound, then (exponent,
//! coefficient) pairs ascending with coefficients in the field text format.
//! Zero-to-precision prints magnitude 0 and an empty list. The printer is
//! canonical and round-trips through the parser bit-exactly.

use super::Series;
use crate::algebra::textfmt::{fq2_to_string, parse_fq2};
use crate::algebra::{FieldSpec, Fq2};
use crate::error::{Error, Result};

pub fn series_to_string(spec: &FieldSpec, z: &Series) -> String {
    let mut out = format!("{} e={} O({}) [", z.abs(), z.e, z.prec);
    let mut first = true;
    for (k, &c) in z.c.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        if !first {
            out.push_str(", ");
        }
        first = false;
        out.push_str(&format!("({}, {})", z.i0 + k as i64, fq2_to_string(spec, c)));
    }
    out.push(']');
    out
}

pub fn parse_series(spec: &FieldSpec, s: &str) -> Result<Series> {
    let err = |m: &str| Error::Parse(format!("series: {m}"));
    let s = s.trim();
    // magnitude prefix is redundant; skip to "e="
    let epos = s.find("e=").ok_or_else(|| err("missing e="))?;
    let rest = &s[epos + 2..];
    let (echar, rest) = rest.split_at(1);
    let e: u8 = echar.parse().map_err(|_| err("bad e"))?;
    if e != 1 && e != 2 {
        return Err(err("e must be 1 or 2"));
    }
    let rest = rest.trim_start();
    let rest = rest.strip_prefix("O(").ok_or_else(|| err("missing O("))?;
    let close = rest.find(')').ok_or_else(|| err("missing )"))?;
    let prec: i64 = rest[..close].trim().parse().map_err(|_| err("bad precision"))?;
    let rest = rest[close + 1..].trim_start();
    let rest = rest.strip_prefix('[').ok_or_else(|| err("missing ["))?;
    let rest = rest.strip_suffix(']').ok_or_else(|| err("missing ]"))?;

    let mut terms: Vec<(i64, Fq2)> = vec![];
    let mut depth = 0i32;
    let start = 0usize;
    let bytes = rest.as_bytes();
    for (i, &b) in bytes.iter().enumerate() {
        match b {
            b'(' => depth += 1,
            b')' => depth -= 1,
            b',' if depth == 0 => {
                // separator between terms is ", " at depth 0 — but the pair
                // itself is parenthesized, so depth 0 commas split pairs.
            }
            _ => {}
        }
        let _ = (i, start);
    }
    // Split on top-level "), (" boundaries by scanning pairs directly.
    let mut i = 0usize;
    while i < bytes.len() {
        while i < bytes.len() && (bytes[i] as char).is_whitespace() {
            i += 1;
        }
        if i >= bytes.len() {
            break;
        }
        if bytes[i] != b'(' {
            return Err(err("expected ("));
        }
        let mut d = 1;
        let open = i;
        i += 1;
        while i < bytes.len() && d > 0 {
            match bytes[i] {
                b'(' => d += 1,
                b')' => d -= 1,
                _ => {}
            }
            i += 1;
        }
        if d != 0 {
            return Err(err("unbalanced parens"));
        }
        let inner = &rest[open + 1..i - 1];
        let comma = inner.find(',').ok_or_else(|| err("missing comma in pair"))?;
        let exp: i64 = inner[..comma].trim().parse().map_err(|_| err("bad exponent"))?;
        let coeff = parse_fq2(spec, inner[comma + 1..].trim())?;
        terms.push((exp, coeff));
        while i < bytes.len() && (bytes[i] == b',' || (bytes[i] as char).is_whitespace()) {
            i += 1;
        }
    }
    let _ = (depth, start);

    if terms.is_empty() {
        return Ok(Series::zero_to_prec(e, prec));
    }
    let i0 = terms.iter().map(|&(x, _)| x).min().unwrap();
    if terms.iter().any(|&(x, _)| x >= prec) {
        return Err(err("term at or beyond precision"));
    }
    let mut c = vec![Fq2::ZERO; (prec - i0) as usize];
    for (exp, v) in terms {
        c[(exp - i0) as usize] = v;
    }
    Ok(Series::from_window(e, i0, prec, c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::spec_for_q;
    use crate::series::sqrt_poly;
    use crate::algebra::Poly;
    use crate::algebra::Fq;

    #[test]
    fn roundtrip() {
        let s = spec_for_q(3).unwrap();
        let z = sqrt_poly(&s, &Poly::from_coeffs(vec![Fq(1), Fq(0), Fq(2)]), 10).unwrap();
        let txt = series_to_string(&s, &z);
        let back = parse_series(&s, &txt).unwrap();
        assert_eq!(z, back);
        assert_eq!(series_to_string(&s, &back), txt);
    }

    #[test]
    fn zero_to_precision_roundtrip() {
        let s = spec_for_q(3).unwrap();
        let z = Series::zero_to_prec(2, 17);
        let txt = series_to_string(&s, &z);
        assert_eq!(txt, "0 e=2 O(17) []");
        assert_eq!(parse_series(&s, &txt).unwrap(), z);
    }

    #[test]
    fn q9_coefficients() {
        let s = spec_for_q(9).unwrap();
        let mut c = vec![Fq2::ZERO; 5];
        c[0] = Fq2(10); // some element with an x part
        c[3] = Fq2(80);
        let z = Series::from_window(1, -2, 3, c);
        let txt = series_to_string(&s, &z);
        assert_eq!(parse_series(&s, &txt).unwrap(), z);
    }
}
