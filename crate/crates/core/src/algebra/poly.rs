//! The polynomial ring A = F_q[t].
//!
//! Coefficients are stored constant term first with a nonzero leading
//! coefficient; the zero polynomial is the empty vector. The ∞-adic absolute
//! value is |f| = q^deg(f), so degrees stand in for logarithms throughout.

use super::field::{FieldSpec, Fq};
use crate::error::{Error, Result};

/// An element of A = F_q[t].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    pub c: Vec<Fq>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { c: vec![] }
    }

    pub fn from_coeffs(mut c: Vec<Fq>) -> Poly {
        while c.last() == Some(&Fq::ZERO) {
            c.pop();
        }
        Poly { c }
    }

    pub fn constant(a: Fq) -> Poly {
        if a.is_zero() {
            Poly::zero()
        } else {
            Poly { c: vec![a] }
        }
    }

    pub fn one() -> Poly {
        Poly { c: vec![Fq(1)] }
    }

    /// The monomial c * t^k.
    pub fn monomial(a: Fq, k: usize) -> Poly {
        if a.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![Fq::ZERO; k + 1];
        c[k] = a;
        Poly { c }
    }

    pub fn t() -> Poly {
        Poly::monomial(Fq(1), 1)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree, or None for the zero polynomial.
    pub fn deg(&self) -> Option<i64> {
        if self.c.is_empty() {
            None
        } else {
            Some(self.c.len() as i64 - 1)
        }
    }

    /// Degree with deg 0 = -∞ replaced by the given sentinel-free i64
    /// convention used in valuation arithmetic: zero maps to i64::MIN / 4.
    pub fn deg_or_neg_inf(&self) -> i64 {
        self.deg().unwrap_or(i64::MIN / 4)
    }

    pub fn lead(&self) -> Fq {
        *self.c.last().unwrap_or(&Fq::ZERO)
    }

    pub fn coeff(&self, k: usize) -> Fq {
        self.c.get(k).copied().unwrap_or(Fq::ZERO)
    }

    pub fn is_one(&self) -> bool {
        self.c.len() == 1 && self.c[0] == Fq(1)
    }

    pub fn is_monic(&self) -> bool {
        self.lead() == Fq(1)
    }

    pub fn is_constant(&self) -> bool {
        self.c.len() <= 1
    }
}

impl FieldSpec {
    pub fn padd(&self, a: &Poly, b: &Poly) -> Poly {
        let n = a.c.len().max(b.c.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.addq(a.coeff(i), b.coeff(i)));
        }
        Poly::from_coeffs(out)
    }

    pub fn pneg(&self, a: &Poly) -> Poly {
        Poly {
            c: a.c.iter().map(|&x| self.negq(x)).collect(),
        }
    }

    pub fn psub(&self, a: &Poly, b: &Poly) -> Poly {
        self.padd(a, &self.pneg(b))
    }

    pub fn pmul(&self, a: &Poly, b: &Poly) -> Poly {
        if a.is_zero() || b.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Fq::ZERO; a.c.len() + b.c.len() - 1];
        for (i, &x) in a.c.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, &y) in b.c.iter().enumerate() {
                out[i + j] = self.addq(out[i + j], self.mulq(x, y));
            }
        }
        Poly::from_coeffs(out)
    }

    pub fn pscale(&self, a: &Poly, s: Fq) -> Poly {
        if s.is_zero() {
            return Poly::zero();
        }
        Poly {
            c: a.c.iter().map(|&x| self.mulq(x, s)).collect(),
        }
    }

    /// Euclidean division: f = q*g + r with deg r < deg g.
    pub fn pdivrem(&self, f: &Poly, g: &Poly) -> Result<(Poly, Poly)> {
        if g.is_zero() {
            return Err(Error::DivisionByZeroPoly);
        }
        let dg = g.c.len() - 1;
        if f.c.len() <= dg && !(f.c.len() == dg + 1) {
            return Ok((Poly::zero(), f.clone()));
        }
        let mut r = f.c.clone();
        let lead_inv = self.invq(g.lead())?;
        let mut quot = vec![Fq::ZERO; f.c.len().saturating_sub(dg)];
        while r.len() > dg || (r.len() == dg + 1 && dg == 0 && !r.is_empty()) {
            if r.len() < dg + 1 {
                break;
            }
            let dr = r.len() - 1;
            let qc = self.mulq(*r.last().unwrap(), lead_inv);
            quot[dr - dg] = qc;
            for i in 0..=dg {
                r[dr - dg + i] = self.subq(r[dr - dg + i], self.mulq(qc, g.c[i]));
            }
            while r.last() == Some(&Fq::ZERO) {
                r.pop();
            }
            if r.len() <= dg {
                break;
            }
        }
        Ok((Poly::from_coeffs(quot), Poly::from_coeffs(r)))
    }

    /// Remainder only.
    pub fn prem(&self, f: &Poly, g: &Poly) -> Result<Poly> {
        Ok(self.pdivrem(f, g)?.1)
    }

    /// True when g divides f exactly.
    pub fn pdivides(&self, g: &Poly, f: &Poly) -> Result<bool> {
        Ok(self.prem(f, g)?.is_zero())
    }

    /// Monic gcd, with gcd(x, 0) = monic(x) and gcd(0, 0) = 0.
    pub fn pgcd(&self, a: &Poly, b: &Poly) -> Poly {
        let mut x = a.clone();
        let mut y = b.clone();
        while !y.is_zero() {
            let r = self.prem(&x, &y).expect("y nonzero");
            x = y;
            y = r;
        }
        self.monic(&x)
    }

    /// Three-way gcd used for the form admissibility condition.
    pub fn pgcd3(&self, a: &Poly, b: &Poly, c: &Poly) -> Poly {
        self.pgcd(&self.pgcd(a, b), c)
    }

    /// Scale to leading coefficient 1 (zero stays zero).
    pub fn monic(&self, a: &Poly) -> Poly {
        if a.is_zero() || a.is_monic() {
            return a.clone();
        }
        let inv = self.invq(a.lead()).expect("nonzero lead");
        self.pscale(a, inv)
    }

    /// Formal derivative d/dt.
    pub fn pderiv(&self, a: &Poly) -> Poly {
        if a.c.len() <= 1 {
            return Poly::zero();
        }
        let mut out = Vec::with_capacity(a.c.len() - 1);
        for (i, &x) in a.c.iter().enumerate().skip(1) {
            let mut s = Fq::ZERO;
            for _ in 0..(i as u32 % self.p) {
                s = self.addq(s, x);
            }
            out.push(s);
        }
        Poly::from_coeffs(out)
    }

    /// Evaluate at an F_q point.
    pub fn peval(&self, a: &Poly, x: Fq) -> Fq {
        let mut acc = Fq::ZERO;
        for &c in a.c.iter().rev() {
            acc = self.addq(self.mulq(acc, x), c);
        }
        acc
    }

    /// f(t)^e by repeated squaring.
    pub fn ppow(&self, a: &Poly, e: u32) -> Poly {
        let mut acc = Poly::one();
        let mut b = a.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.pmul(&acc, &b);
            }
            b = self.pmul(&b, &b);
            e >>= 1;
        }
        acc
    }

    /// The constant 4 = 1+1+1+1 in F_q (nonzero since q is odd).
    pub fn four(&self) -> Fq {
        let two = self.addq(Fq(1), Fq(1));
        self.mulq(two, two)
    }

    /// f^h mod g for large h, by square and multiply.
    pub fn ppowmod(&self, f: &Poly, mut e: u64, g: &Poly) -> Result<Poly> {
        let mut acc = Poly::one();
        let mut b = self.prem(f, g)?;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.prem(&self.pmul(&acc, &b), g)?;
            }
            b = self.prem(&self.pmul(&b, &b), g)?;
            e >>= 1;
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::spec_for_q;

    fn poly(s: &FieldSpec, coeffs: &[i64]) -> Poly {
        Poly::from_coeffs(coeffs.iter().map(|&v| s.fq_from_int(v)).collect())
    }

    #[test]
    fn divrem_t3_plus_1_by_t_minus_1_over_f3() {
        let s = spec_for_q(3).unwrap();
        let f = poly(&s, &[1, 0, 0, 1]); // t^3 + 1
        let g = poly(&s, &[-1, 1]); // t - 1
        let (q, r) = s.pdivrem(&f, &g).unwrap();
        assert_eq!(q, poly(&s, &[1, 1, 1])); // t^2 + t + 1
        assert_eq!(r, poly(&s, &[2]));
        // multiply-back oracle
        assert_eq!(s.padd(&s.pmul(&q, &g), &r), f);
    }

    #[test]
    fn gcd_examples() {
        let s = spec_for_q(3).unwrap();
        let t2 = poly(&s, &[0, 0, 1]);
        let t = poly(&s, &[0, 1]);
        assert_eq!(s.pgcd(&t2, &t), t);
        // gcd(1, 0, -t) = 1 (three-way form condition)
        let one = Poly::one();
        let zero = Poly::zero();
        let neg_t = poly(&s, &[0, -1]);
        assert_eq!(s.pgcd3(&one, &zero, &neg_t), one);
        assert_eq!(s.pgcd(&zero, &zero), zero);
        assert_eq!(s.pgcd(&poly(&s, &[0, 2]), &zero), t, "gcd(x,0) monic");
    }

    #[test]
    fn division_by_zero() {
        let s = spec_for_q(3).unwrap();
        let f = poly(&s, &[1, 1]);
        assert_eq!(
            s.pdivrem(&f, &Poly::zero()).unwrap_err().name(),
            "DivisionByZeroPoly"
        );
    }

    #[test]
    fn absolute_value_is_multiplicative_and_ultrametric() {
        // |fg| = |f||g| and |f+g| <= max(|f|,|g|) with equality when degrees
        // differ, read off exact degree arithmetic.
        let s = spec_for_q(5).unwrap();
        let f = poly(&s, &[2, 1, 3]);
        let g = poly(&s, &[4, 0, 0, 1]);
        assert_eq!(
            s.pmul(&f, &g).deg().unwrap(),
            f.deg().unwrap() + g.deg().unwrap()
        );
        let h = s.padd(&f, &g);
        assert_eq!(h.deg().unwrap(), f.deg().unwrap().max(g.deg().unwrap()));
    }

    #[test]
    fn derivative_char_p() {
        let s = spec_for_q(3).unwrap();
        // d/dt (t^3) = 3 t^2 = 0 in characteristic 3
        let t3 = poly(&s, &[0, 0, 0, 1]);
        assert!(s.pderiv(&t3).is_zero());
        let f = poly(&s, &[1, 2, 1]); // 1 + 2t + t^2 -> 2 + 2t
        assert_eq!(s.pderiv(&f), poly(&s, &[2, 2]));
    }
}
