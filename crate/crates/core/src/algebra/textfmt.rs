//! Text format for field elements and polynomials.
//!
//! Coefficients of F_q print as F_p-polynomials in the generator `x`
//! (plain integers 0..p-1 when n = 1); elements of F_{q²} extend this with
//! the generator `w`. Polynomials over F_q print in `t`, highest degree
//! first, e.g. `(x+1)*t^2 + 2*t + x`. The printer is canonical and the
//! parser accepts any whitespace, so print ∘ parse is the identity.

use super::field::{FieldSpec, Fq, Fq2};
use super::poly::Poly;
use crate::error::{Error, Result};

fn fmt_tower(spec: &FieldSpec, digits: &[u16], var: char, out: &mut String) {
    // digits are base-p coordinates, constant first
    let mut terms: Vec<String> = vec![];
    for (i, &d) in digits.iter().enumerate().rev() {
        if d == 0 {
            continue;
        }
        let s = match (i, d) {
            (0, d) => format!("{d}"),
            (1, 1) => var.to_string(),
            (1, d) => format!("{d}*{var}"),
            (i, 1) => format!("{var}^{i}"),
            (i, d) => format!("{d}*{var}^{i}"),
        };
        terms.push(s);
    }
    if terms.is_empty() {
        out.push('0');
    } else {
        out.push_str(&terms.join(" + "));
    }
    let _ = spec;
}

/// Render an F_q element (integer when n = 1, x-polynomial otherwise).
pub fn fq_to_string(spec: &FieldSpec, a: Fq) -> String {
    let mut digits = vec![];
    let mut v = a.0;
    for _ in 0..spec.n {
        digits.push(v % spec.p as u16);
        v /= spec.p as u16;
    }
    let mut s = String::new();
    fmt_tower(spec, &digits, 'x', &mut s);
    s
}

/// Render an F_{q²} element; the part outside F_q uses generator `w`.
pub fn fq2_to_string(spec: &FieldSpec, a: Fq2) -> String {
    let (c0, c1) = spec.split2(a);
    if c1.is_zero() {
        return fq_to_string(spec, c0);
    }
    let w_part = if c1 == Fq(1) {
        "w".to_string()
    } else {
        let inner = fq_to_string(spec, c1);
        if inner.contains('+') || inner.contains('*') || inner.contains('^') {
            format!("({inner})*w")
        } else {
            format!("{inner}*w")
        }
    };
    if c0.is_zero() {
        w_part
    } else {
        format!("{w_part} + {}", fq_to_string(spec, c0))
    }
}

/// Render an element of A = F_q[t].
pub fn poly_to_string(spec: &FieldSpec, f: &Poly) -> String {
    if f.is_zero() {
        return "0".to_string();
    }
    let mut terms: Vec<String> = vec![];
    for (k, &c) in f.c.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let cs = fq_to_string(spec, c);
        let coeff_part = if cs == "1" && k > 0 {
            None
        } else if cs.contains('+') || cs.contains('*') || cs.contains('^') {
            Some(format!("({cs})"))
        } else {
            Some(cs)
        };
        let s = match (coeff_part, k) {
            (None, 1) => "t".to_string(),
            (None, k) => format!("t^{k}"),
            (Some(c), 0) => c,
            (Some(c), 1) => format!("{c}*t"),
            (Some(c), k) => format!("{c}*t^{k}"),
        };
        terms.push(s);
    }
    terms.join(" + ")
}

struct Lexer<'a> {
    s: &'a [u8],
    pos: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(u64),
    Var(char),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    End,
}

impl<'a> Lexer<'a> {
    fn new(s: &'a str) -> Self {
        Lexer {
            s: s.as_bytes(),
            pos: 0,
        }
    }

    fn next(&mut self) -> Result<Tok> {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if self.pos >= self.s.len() {
            return Ok(Tok::End);
        }
        let c = self.s[self.pos];
        self.pos += 1;
        Ok(match c {
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b't' | b'x' | b'w' => Tok::Var(c as char),
            b'0'..=b'9' => {
                let mut v = (c - b'0') as u64;
                while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                    v = v * 10 + (self.s[self.pos] - b'0') as u64;
                    self.pos += 1;
                }
                Tok::Int(v)
            }
            _ => return Err(Error::Parse(format!("unexpected character '{}'", c as char))),
        })
    }

    fn peek(&mut self) -> Result<Tok> {
        let save = self.pos;
        let t = self.next()?;
        self.pos = save;
        Ok(t)
    }

    fn pos(&self) -> usize {
        self.pos
    }

    fn set_pos(&mut self, p: usize) {
        self.pos = p;
    }

    /// Consume up to and including the matching ')' (one level already
    /// open); returns the inner text.
    fn take_until_close(&mut self) -> Result<String> {
        let start = self.pos;
        let mut depth = 1i32;
        while self.pos < self.s.len() {
            match self.s[self.pos] {
                b'(' => depth += 1,
                b')' => {
                    depth -= 1;
                    if depth == 0 {
                        let inner =
                            String::from_utf8_lossy(&self.s[start..self.pos]).into_owned();
                        self.pos += 1;
                        return Ok(inner);
                    }
                }
                _ => {}
            }
            self.pos += 1;
        }
        Err(Error::Parse("unbalanced parentheses".into()))
    }
}

/// Parser over the three-variable tower (x ⊂ w ⊂ t). Internally everything
/// is a polynomial in t with Fq2 coefficients; restriction is checked at the
/// end by the typed entry points.
struct Parser<'a> {
    lex: Lexer<'a>,
    spec: &'a FieldSpec,
}

type TPoly = Vec<Fq2>;

impl<'a> Parser<'a> {
    fn trim(mut v: TPoly) -> TPoly {
        while v.last().map(|c| c.is_zero()) == Some(true) {
            v.pop();
        }
        v
    }

    fn add(&self, a: &TPoly, b: &TPoly) -> TPoly {
        let n = a.len().max(b.len());
        let mut out = vec![Fq2::ZERO; n];
        for i in 0..n {
            let x = a.get(i).copied().unwrap_or(Fq2::ZERO);
            let y = b.get(i).copied().unwrap_or(Fq2::ZERO);
            out[i] = self.spec.add2(x, y);
        }
        Self::trim(out)
    }

    fn mul(&self, a: &TPoly, b: &TPoly) -> TPoly {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut out = vec![Fq2::ZERO; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = self.spec.add2(out[i + j], self.spec.mul2(x, y));
            }
        }
        Self::trim(out)
    }

    fn neg(&self, a: &TPoly) -> TPoly {
        a.iter().map(|&x| self.spec.neg2(x)).collect()
    }

    fn pow(&self, a: &TPoly, e: u64) -> TPoly {
        let mut acc = vec![self.spec.one2()];
        for _ in 0..e {
            acc = self.mul(&acc, a);
        }
        acc
    }

    // expr := term (('+'|'-') term)*
    fn expr(&mut self) -> Result<TPoly> {
        let mut acc = match self.lex.peek()? {
            Tok::Minus => {
                self.lex.next()?;
                let t = self.term()?;
                self.neg(&t)
            }
            _ => self.term()?,
        };
        loop {
            match self.lex.peek()? {
                Tok::Plus => {
                    self.lex.next()?;
                    let t = self.term()?;
                    acc = self.add(&acc, &t);
                }
                Tok::Minus => {
                    self.lex.next()?;
                    let t = self.term()?;
                    let nt = self.neg(&t);
                    acc = self.add(&acc, &nt);
                }
                _ => return Ok(acc),
            }
        }
    }

    // term := factor ('*'? factor)*   (juxtaposition like "2t" is accepted)
    fn term(&mut self) -> Result<TPoly> {
        let mut acc = self.factor()?;
        loop {
            match self.lex.peek()? {
                Tok::Star => {
                    self.lex.next()?;
                    let f = self.factor()?;
                    acc = self.mul(&acc, &f);
                }
                Tok::Var(_) | Tok::LParen => {
                    let f = self.factor()?;
                    acc = self.mul(&acc, &f);
                }
                _ => return Ok(acc),
            }
        }
    }

    // factor := atom ('^' int)?
    fn factor(&mut self) -> Result<TPoly> {
        let base = self.atom()?;
        if self.lex.peek()? == Tok::Caret {
            self.lex.next()?;
            match self.lex.next()? {
                Tok::Int(e) => Ok(self.pow(&base, e)),
                _ => Err(Error::Parse("expected integer exponent".into())),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<TPoly> {
        match self.lex.next()? {
            Tok::Int(v) => {
                let r = (v % self.spec.p as u64) as i64;
                Ok(vec![Fq2(self.spec.fq_from_int(r).0)])
            }
            Tok::Var('t') => Ok(vec![Fq2::ZERO, self.spec.one2()]),
            Tok::Var('x') => {
                if self.spec.n < 2 {
                    return Err(Error::Parse("generator x needs n >= 2".into()));
                }
                Ok(vec![Fq2(self.spec.p as u16)])
            }
            Tok::Var('w') => Ok(vec![Fq2(self.spec.q as u16)]),
            Tok::LParen => {
                let inner = self.expr()?;
                if self.lex.next()? != Tok::RParen {
                    return Err(Error::Parse("expected ')'".into()));
                }
                Ok(inner)
            }
            t => Err(Error::Parse(format!("unexpected token {t:?}"))),
        }
    }
}

/// Parse an element of A = F_q[t].
pub fn parse_poly(spec: &FieldSpec, s: &str) -> Result<Poly> {
    let mut p = Parser {
        lex: Lexer::new(s),
        spec,
    };
    let v = p.expr()?;
    if p.lex.next()? != Tok::End {
        return Err(Error::Parse("trailing input".into()));
    }
    let mut out = Vec::with_capacity(v.len());
    for c in v {
        match spec.restrict(c) {
            Some(fq) => out.push(fq),
            None => {
                return Err(Error::Parse(
                    "coefficient lies outside F_q (contains w)".into(),
                ))
            }
        }
    }
    Ok(Poly::from_coeffs(out))
}

/// Parse a constant expression into F_{q²}.
pub fn parse_fq2(spec: &FieldSpec, s: &str) -> Result<Fq2> {
    let mut p = Parser {
        lex: Lexer::new(s),
        spec,
    };
    let v = p.expr()?;
    if p.lex.next()? != Tok::End {
        return Err(Error::Parse("trailing input".into()));
    }
    if v.len() > 1 {
        return Err(Error::Parse("expected a constant, found t".into()));
    }
    Ok(v.first().copied().unwrap_or(Fq2::ZERO))
}

/// Parse a constant expression into F_q.
pub fn parse_fq(spec: &FieldSpec, s: &str) -> Result<Fq> {
    let v = parse_fq2(spec, s)?;
    spec.restrict(v)
        .ok_or_else(|| Error::Parse("element lies outside F_q".into()))
}

/// Parse a modulus polynomial over F_p in the generator `x` before any
/// FieldSpec exists: sums of `c`, `x^k`, `c*x^k` terms (no reduction).
pub fn parse_modulus_q(p: u32, s: &str) -> Result<Vec<u32>> {
    let mut out: Vec<u32> = vec![];
    for (coeff, xpow, wpow) in scan_tower_terms(p, s)? {
        if wpow != 0 {
            return Err(Error::Parse("modulus over F_p cannot mention w".into()));
        }
        if out.len() <= xpow {
            out.resize(xpow + 1, 0);
        }
        out[xpow] = (out[xpow] + coeff) % p;
    }
    while out.last() == Some(&0) {
        out.pop();
    }
    Ok(out)
}

/// Parse a modulus polynomial over F_q in the generator `w` (coefficients
/// are x-polynomials of degree < n, already reduced). Returns packed F_q
/// indices, constant term first.
pub fn parse_modulus_q2(p: u32, n: u32, s: &str) -> Result<Vec<u16>> {
    let mut out: Vec<u32> = vec![];
    for (coeff, xpow, wpow) in scan_tower_terms(p, s)? {
        if xpow >= n as usize {
            return Err(Error::Parse(format!(
                "coefficient power x^{xpow} is not reduced (n = {n})"
            )));
        }
        if out.len() <= wpow {
            out.resize(wpow + 1, 0);
        }
        let digit = coeff % p * p.pow(xpow as u32);
        // digitwise add in base p at position xpow
        let cur = out[wpow] / p.pow(xpow as u32) % p;
        let new = (cur + coeff) % p;
        out[wpow] = out[wpow] + (new + p - cur) % p * p.pow(xpow as u32);
        let _ = digit;
    }
    while out.last() == Some(&0) {
        out.pop();
    }
    Ok(out.into_iter().map(|v| v as u16).collect())
}

/// Flat term scanner for modulus text: yields (coefficient in F_p, x-power,
/// w-power) per term. Accepts `c`, `x^i`, `w^j`, products thereof with `*`,
/// leading `-`, and parenthesized x-expressions as coefficients.
fn scan_tower_terms(p: u32, s: &str) -> Result<Vec<(u32, usize, usize)>> {
    let mut lex = Lexer::new(s);
    let mut terms: Vec<(u32, usize, usize)> = vec![];
    'outer: loop {
        // one term
        let mut coeff = 1u32;
        let mut neg = false;
        let mut xpow = 0usize;
        let mut wpow = 0usize;
        let mut saw = false;
        loop {
            let save = lex.pos();
            match lex.next()? {
                Tok::End => {
                    if saw {
                        let c = if neg { (p - coeff % p) % p } else { coeff % p };
                        terms.push((c, xpow, wpow));
                    }
                    break 'outer;
                }
                Tok::Plus => {
                    if saw {
                        let c = if neg { (p - coeff % p) % p } else { coeff % p };
                        terms.push((c, xpow, wpow));
                        continue 'outer;
                    }
                }
                Tok::Minus => {
                    if saw {
                        let c = if neg { (p - coeff % p) % p } else { coeff % p };
                        terms.push((c, xpow, wpow));
                        lex.set_pos(save);
                        continue 'outer;
                    }
                    neg = !neg;
                }
                Tok::Int(v) => {
                    coeff = coeff * (v % p as u64) as u32 % p;
                    saw = true;
                }
                Tok::Star => {}
                Tok::Var(v @ ('x' | 'w')) => {
                    saw = true;
                    let mut e = 1usize;
                    if lex.peek()? == Tok::Caret {
                        lex.next()?;
                        match lex.next()? {
                            Tok::Int(k) => e = k as usize,
                            _ => return Err(Error::Parse("bad exponent".into())),
                        }
                    }
                    if v == 'x' {
                        xpow += e;
                    } else {
                        wpow += e;
                    }
                }
                Tok::LParen => {
                    // parenthesized x-expression coefficient: find the close
                    let inner = lex.take_until_close()?;
                    let sub = parse_modulus_q(p, &inner)?;
                    // distribute: only single-term inner supported when
                    // multiplied by w; full expressions handled by recursion
                    let mut expanded = vec![];
                    for (k, &c) in sub.iter().enumerate() {
                        if c != 0 {
                            expanded.push((c, k));
                        }
                    }
                    if expanded.len() == 1 {
                        coeff = coeff * expanded[0].0 % p;
                        xpow += expanded[0].1;
                        saw = true;
                    } else {
                        // multi-term coefficient: emit each part now and
                        // continue the term for the trailing *w^k
                        let mut wp = 0usize;
                        // lookahead for * w^k
                        loop {
                            let save2 = lex.pos();
                            match lex.next()? {
                                Tok::Star => {}
                                Tok::Var('w') => {
                                    let mut e = 1usize;
                                    if lex.peek()? == Tok::Caret {
                                        lex.next()?;
                                        match lex.next()? {
                                            Tok::Int(k) => e = k as usize,
                                            _ => return Err(Error::Parse("bad exponent".into())),
                                        }
                                    }
                                    wp += e;
                                }
                                _ => {
                                    lex.set_pos(save2);
                                    break;
                                }
                            }
                        }
                        for (c, k) in expanded {
                            let c = if neg { (p - c) % p } else { c };
                            terms.push((c * coeff % p, k + xpow, wpow + wp));
                        }
                        saw = false;
                        coeff = 1;
                        neg = false;
                        xpow = 0;
                        wpow = 0;
                    }
                }
                t => return Err(Error::Parse(format!("unexpected token {t:?} in modulus"))),
            }
        }
    }
    Ok(terms)
}


#[cfg(test)]
mod modulus_tests {
    use super::*;
    use crate::algebra::FieldSpec;

    #[test]
    fn parse_moduli() {
        assert_eq!(parse_modulus_q(3, "x^2 + 1").unwrap(), vec![1, 0, 1]);
        assert_eq!(parse_modulus_q(7, "x - 3").unwrap(), vec![4, 1]);
        assert_eq!(parse_modulus_q2(3, 1, "w^2 + 1").unwrap(), vec![1, 0, 1]);
        // w^2 - (x+1) over F_9: constant term -(x+1) has digits (2,2) → 8
        assert_eq!(
            parse_modulus_q2(3, 2, "w^2 - (x + 1)").unwrap(),
            vec![8, 0, 1]
        );
        assert_eq!(
            parse_modulus_q2(3, 2, "w^2 + 2*x + 2").unwrap(),
            vec![8, 0, 1]
        );
    }

    #[test]
    fn build_spec_from_text() {
        let mq = parse_modulus_q(3, "x^2 + 1").unwrap();
        let mq2 = parse_modulus_q2(3, 2, "w^2 - (x+1)").unwrap();
        let spec = FieldSpec::new(3, 2, mq, mq2.into_iter().map(Fq).collect()).unwrap();
        assert_eq!(spec.q, 9);
    }
}
