//! Tail-truncated Laurent series over F_{q²} in the uniformizer s = t^(-1/e).
//!
//! A series holds the exact window of coefficients [i0, prec) in s-exponents;
//! everything from s^prec on is unknown. Exponents are in units of s, so
//! negative exponents are positive powers of t (t = s^-e). Coefficient
//! arithmetic is exact, which makes precision propagation pure bookkeeping:
//! a coefficient inside the window is the true coefficient.
//!
//! The ramification index e is 1 (series in 1/t over F_{q²}) or 2 (series in
//! t^(-1/2)), enough for the imaginary quadratic places at ∞.

mod dist;
mod newton;
mod sqrt;
mod textfmt;

pub use dist::{dist_kinf, nearest_a};
pub use newton::{newton_polygon, NewtonSlope};
pub use sqrt::sqrt_poly;
pub use textfmt::{parse_series, series_to_string};

use crate::algebra::{FieldSpec, Fq2, Poly};
use crate::error::{Error, Result};

/// Exact absolute value |x| = q^(half/2), or the zero-to-precision marker.
///
/// Every absolute value in sight is a rational power of q with denominator
/// dividing 2, so the exponent is stored doubled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum AbsVal {
    /// Zero to the working precision: no nonzero coefficient in the window.
    NegInfinity,
    /// log_q |x| = half / 2.
    Log { half: i64 },
}

impl AbsVal {
    pub fn from_log(half: i64) -> AbsVal {
        AbsVal::Log { half }
    }

    pub fn is_zero_to_prec(self) -> bool {
        self == AbsVal::NegInfinity
    }

    /// Twice the base-q logarithm, if finite.
    pub fn half_log(self) -> Option<i64> {
        match self {
            AbsVal::NegInfinity => None,
            AbsVal::Log { half } => Some(half),
        }
    }

    pub fn one() -> AbsVal {
        AbsVal::Log { half: 0 }
    }
}

impl std::fmt::Display for AbsVal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AbsVal::NegInfinity => write!(f, "0"),
            AbsVal::Log { half } => {
                if half % 2 == 0 {
                    write!(f, "q^{}", half / 2)
                } else {
                    write!(f, "q^({half}/2)")
                }
            }
        }
    }
}

/// A truncated Laurent series: the value is Σ c[k] s^(i0+k) + O(s^prec).
///
/// Invariants: c.len() == (prec - i0) and c[0] != 0, or c is empty and the
/// series is zero to precision (i0 == prec).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Series {
    pub e: u8,
    pub i0: i64,
    pub prec: i64,
    pub c: Vec<Fq2>,
}

fn ck_add(a: i64, b: i64) -> Result<i64> {
    a.checked_add(b).ok_or(Error::PrecisionCapExceeded)
}

fn ck_mul(a: i64, b: i64) -> Result<i64> {
    a.checked_mul(b).ok_or(Error::PrecisionCapExceeded)
}

impl Series {
    /// The zero-to-precision series O(s^prec).
    pub fn zero_to_prec(e: u8, prec: i64) -> Series {
        Series {
            e,
            i0: prec,
            prec,
            c: vec![],
        }
    }

    /// Build from a raw window, normalizing leading zeros.
    pub fn from_window(e: u8, i0: i64, prec: i64, mut c: Vec<Fq2>) -> Series {
        debug_assert_eq!(c.len() as i64, prec - i0);
        let mut i0 = i0;
        while let Some(first) = c.first() {
            if first.is_zero() {
                c.remove(0);
                i0 += 1;
            } else {
                break;
            }
        }
        if c.is_empty() {
            Series::zero_to_prec(e, prec)
        } else {
            Series { e, i0, prec, c }
        }
    }

    /// A single term coeff * s^exp, exact to s^prec.
    pub fn term(e: u8, coeff: Fq2, exp: i64, prec: i64) -> Series {
        if coeff.is_zero() || exp >= prec {
            return Series::zero_to_prec(e, prec);
        }
        let mut c = vec![Fq2::ZERO; (prec - exp) as usize];
        c[0] = coeff;
        Series {
            e,
            i0: exp,
            prec,
            c,
        }
    }

    /// The constant series for an element of F_{q²}.
    pub fn constant(e: u8, v: Fq2, prec: i64) -> Series {
        Series::term(e, v, 0, prec)
    }

    /// Embed f ∈ A: exponents -e*k for each t^k term.
    pub fn from_poly(spec: &FieldSpec, f: &Poly, e: u8, prec: i64) -> Series {
        match f.deg() {
            None => Series::zero_to_prec(e, prec),
            Some(d) => {
                let i0 = -(e as i64) * d;
                if i0 >= prec {
                    return Series::zero_to_prec(e, prec);
                }
                let mut c = vec![Fq2::ZERO; (prec - i0) as usize];
                for (k, &ck) in f.c.iter().enumerate() {
                    let exp = -(e as i64) * k as i64;
                    if exp < prec {
                        c[(exp - i0) as usize] = spec.embed(ck);
                    }
                }
                Series::from_window(e, i0, prec, c)
            }
        }
    }

    pub fn is_zero_to_prec(&self) -> bool {
        self.c.is_empty()
    }

    /// Coefficient of s^exp; exact inside the window, zero below it.
    /// Returns None at or beyond the precision bound.
    pub fn coeff(&self, exp: i64) -> Option<Fq2> {
        if exp >= self.prec {
            None
        } else if exp < self.i0 {
            Some(Fq2::ZERO)
        } else {
            Some(self.c[(exp - self.i0) as usize])
        }
    }

    /// |x| = q^(-i0/e); NegInfinity for zero-to-precision.
    pub fn abs(&self) -> AbsVal {
        if self.is_zero_to_prec() {
            AbsVal::NegInfinity
        } else {
            AbsVal::Log {
                half: -self.i0 * 2 / self.e as i64,
            }
        }
    }

    /// Window length in s-digits.
    pub fn window_len(&self) -> i64 {
        self.prec - self.i0
    }

    /// Drop precision to new_prec (no-op if already coarser).
    pub fn truncate(&self, new_prec: i64) -> Series {
        if new_prec >= self.prec {
            return self.clone();
        }
        if new_prec <= self.i0 {
            return Series::zero_to_prec(self.e, new_prec);
        }
        Series::from_window(
            self.e,
            self.i0,
            new_prec,
            self.c[..(new_prec - self.i0) as usize].to_vec(),
        )
    }

    /// Reinterpret an e = 1 series in e = 2 by doubling exponents; the odd
    /// exponents of the result are exactly zero, so prec doubles too.
    pub fn rescale_to_e2(&self) -> Series {
        assert_eq!(self.e, 1);
        let prec = self.prec * 2;
        if self.is_zero_to_prec() {
            return Series::zero_to_prec(2, prec);
        }
        let i0 = self.i0 * 2;
        let mut c = vec![Fq2::ZERO; (prec - i0) as usize];
        for (k, &v) in self.c.iter().enumerate() {
            c[2 * k] = v;
        }
        Series::from_window(2, i0, prec, c)
    }
}

fn require_same_e(a: &Series, b: &Series) -> Result<()> {
    if a.e != b.e {
        Err(Error::RamificationMismatch)
    } else {
        Ok(())
    }
}

/// Schoolbook product, truncated to out_len coefficients.
fn mul_school(spec: &FieldSpec, a: &[Fq2], b: &[Fq2], out_len: usize) -> Vec<Fq2> {
    let mut out = vec![Fq2::ZERO; out_len];
    for (i, &x) in a.iter().enumerate() {
        if x.is_zero() || i >= out_len {
            continue;
        }
        let jmax = (out_len - i).min(b.len());
        for (j, &y) in b[..jmax].iter().enumerate() {
            out[i + j] = spec.add2(out[i + j], spec.mul2(x, y));
        }
    }
    out
}

const KARATSUBA_CUTOFF: usize = 48;

/// Full product by Karatsuba above the cutoff.
fn mul_full(spec: &FieldSpec, a: &[Fq2], b: &[Fq2]) -> Vec<Fq2> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    if a.len().min(b.len()) <= KARATSUBA_CUTOFF {
        return mul_school(spec, a, b, a.len() + b.len() - 1);
    }
    let m = a.len().max(b.len()) / 2;
    let (a0, a1) = a.split_at(m.min(a.len()));
    let (b0, b1) = b.split_at(m.min(b.len()));
    let z0 = mul_full(spec, a0, b0);
    let z2 = mul_full(spec, a1, b1);
    let asum: Vec<Fq2> = {
        let n = a0.len().max(a1.len());
        (0..n)
            .map(|i| {
                spec.add2(
                    a0.get(i).copied().unwrap_or(Fq2::ZERO),
                    a1.get(i).copied().unwrap_or(Fq2::ZERO),
                )
            })
            .collect()
    };
    let bsum: Vec<Fq2> = {
        let n = b0.len().max(b1.len());
        (0..n)
            .map(|i| {
                spec.add2(
                    b0.get(i).copied().unwrap_or(Fq2::ZERO),
                    b1.get(i).copied().unwrap_or(Fq2::ZERO),
                )
            })
            .collect()
    };
    let mut z1 = mul_full(spec, &asum, &bsum);
    for (i, v) in z0.iter().enumerate() {
        z1[i] = spec.sub2(z1[i], *v);
    }
    for (i, v) in z2.iter().enumerate() {
        z1[i] = spec.sub2(z1[i], *v);
    }
    let mut out = vec![Fq2::ZERO; a.len() + b.len() - 1];
    for (i, v) in z0.into_iter().enumerate() {
        out[i] = spec.add2(out[i], v);
    }
    for (i, v) in z1.into_iter().enumerate() {
        if !v.is_zero() {
            out[i + m] = spec.add2(out[i + m], v);
        }
    }
    for (i, v) in z2.into_iter().enumerate() {
        if !v.is_zero() {
            out[i + 2 * m] = spec.add2(out[i + 2 * m], v);
        }
    }
    out
}

impl FieldSpec {
    pub fn sadd(&self, a: &Series, b: &Series) -> Result<Series> {
        require_same_e(a, b)?;
        let prec = a.prec.min(b.prec);
        if a.is_zero_to_prec() && b.is_zero_to_prec() {
            return Ok(Series::zero_to_prec(a.e, prec));
        }
        let i0 = a.i0.min(b.i0).min(prec);
        let mut c = vec![Fq2::ZERO; (prec - i0) as usize];
        for (k, slot) in c.iter_mut().enumerate() {
            let exp = i0 + k as i64;
            let x = a.coeff(exp).unwrap_or(Fq2::ZERO);
            let y = b.coeff(exp).unwrap_or(Fq2::ZERO);
            *slot = self.add2(x, y);
        }
        Ok(Series::from_window(a.e, i0, prec, c))
    }

    pub fn sneg(&self, a: &Series) -> Series {
        Series {
            e: a.e,
            i0: a.i0,
            prec: a.prec,
            c: a.c.iter().map(|&x| self.neg2(x)).collect(),
        }
    }

    pub fn ssub(&self, a: &Series, b: &Series) -> Result<Series> {
        self.sadd(a, &self.sneg(b))
    }

    /// Product with the precision contract
    /// prec = min(P_a + i0_b, P_b + i0_a).
    pub fn smul(&self, a: &Series, b: &Series) -> Result<Series> {
        require_same_e(a, b)?;
        // Zero-to-precision operands still produce O(s^...) information.
        let ia = if a.is_zero_to_prec() { a.prec } else { a.i0 };
        let ib = if b.is_zero_to_prec() { b.prec } else { b.i0 };
        let prec = ck_add(a.prec, ib)?.min(ck_add(b.prec, ia)?);
        if a.is_zero_to_prec() || b.is_zero_to_prec() {
            return Ok(Series::zero_to_prec(a.e, prec));
        }
        let i0 = ck_add(a.i0, b.i0)?;
        let out_len = (prec - i0) as usize;
        let c = if a.c.len().min(b.c.len()) > KARATSUBA_CUTOFF {
            let alc = &a.c[..a.c.len().min(out_len)];
            let blc = &b.c[..b.c.len().min(out_len)];
            let mut full = mul_full(self, alc, blc);
            full.truncate(out_len);
            full.resize(out_len, Fq2::ZERO);
            full
        } else {
            mul_school(self, &a.c, &b.c, out_len)
        };
        Ok(Series::from_window(a.e, i0, prec, c))
    }

    pub fn sscale(&self, a: &Series, v: Fq2) -> Series {
        if v.is_zero() {
            return Series::zero_to_prec(a.e, a.prec);
        }
        Series {
            e: a.e,
            i0: a.i0,
            prec: a.prec,
            c: a.c.iter().map(|&x| self.mul2(x, v)).collect(),
        }
    }

    /// Multiply by s^k (exponent shift).
    pub fn sshift(&self, a: &Series, k: i64) -> Result<Series> {
        Ok(Series {
            e: a.e,
            i0: ck_add(a.i0, k)?,
            prec: ck_add(a.prec, k)?,
            c: a.c.clone(),
        })
    }

    /// Reciprocal; requires a nonzero-to-precision operand.
    /// prec(1/a) = P_a - 2 i0_a.
    pub fn sinv(&self, a: &Series) -> Result<Series> {
        if a.is_zero_to_prec() {
            return Err(Error::InvertZeroToPrecision);
        }
        let lead_inv = self.inv2(a.c[0])?;
        let n = a.c.len();
        // y = a^{-1} with y * a = 1, solved coefficient by coefficient.
        let mut y = vec![Fq2::ZERO; n];
        y[0] = lead_inv;
        for k in 1..n {
            // conv(y, a)[k] must vanish: y[k]*a[0] = -Σ_{j<k} y[j] a[k-j]
            let mut acc = Fq2::ZERO;
            for j in 0..k {
                if !y[j].is_zero() && !a.c[k - j].is_zero() {
                    acc = self.add2(acc, self.mul2(y[j], a.c[k - j]));
                }
            }
            y[k] = self.mul2(self.neg2(acc), lead_inv);
        }
        let i0 = -a.i0;
        let prec = ck_add(a.prec, ck_mul(-2, a.i0)?)?;
        Ok(Series::from_window(a.e, i0, prec, y))
    }

    /// Integer power by square-and-multiply.
    pub fn spow(&self, a: &Series, mut k: u64) -> Result<Series> {
        if k == 0 {
            return Ok(Series::constant(a.e, self.one2(), a.prec - a.i0.min(0)));
        }
        let mut base = a.clone();
        let mut acc: Option<Series> = None;
        while k > 0 {
            if k & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(v) => self.smul(&v, &base)?,
                });
            }
            k >>= 1;
            if k > 0 {
                base = self.smul(&base, &base)?;
            }
        }
        Ok(acc.unwrap())
    }

    /// The q^k-power Frobenius: coefficientwise q^k-th power with exponents
    /// and precision scaled by q^k. Exact: (x + O(s^P))^(q^k) = x^(q^k) + O(s^(P q^k)).
    pub fn sfrob(&self, a: &Series, k: u32) -> Result<Series> {
        let mut scale = 1i64;
        for _ in 0..k {
            scale = ck_mul(scale, self.q as i64)?;
        }
        let mut c = vec![Fq2::ZERO; ((a.prec - a.i0) as usize).saturating_sub(1) * scale as usize + 1];
        if a.is_zero_to_prec() {
            return Ok(Series::zero_to_prec(a.e, ck_mul(a.prec, scale)?));
        }
        let frob_elem = |mut x: Fq2| {
            for _ in 0..k {
                x = self.frob2(x);
            }
            x
        };
        for (j, &v) in a.c.iter().enumerate() {
            if !v.is_zero() {
                c[j * scale as usize] = frob_elem(v);
            }
        }
        let i0 = ck_mul(a.i0, scale)?;
        let clen = c.len() as i64;
        let natural_prec = i0 + clen;
        let target_prec = ck_mul(a.prec, scale)?;
        let mut c = c;
        c.resize((target_prec - i0).max(clen) as usize, Fq2::ZERO);
        c.truncate((target_prec - i0) as usize);
        let _ = natural_prec;
        Ok(Series::from_window(a.e, i0, target_prec, c))
    }

    /// True when (a - b) is zero to the joint precision.
    pub fn seq_to_prec(&self, a: &Series, b: &Series) -> bool {
        match self.ssub(a, b) {
            Ok(d) => d.is_zero_to_prec(),
            Err(_) => false,
        }
    }

    /// t as a series: s^{-e}.
    pub fn s_t(&self, e: u8, prec: i64) -> Series {
        Series::term(e, self.one2(), -(e as i64), prec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::spec_for_q;
    use crate::algebra::Fq;

    #[test]
    fn precision_contract_mul() {
        let s = spec_for_q(3).unwrap();
        // (s^-2 + O(s^3)) * (s^-2 + O(s^3)) = s^-4 + O(s^1)
        let a = Series::term(1, s.one2(), -2, 3);
        let m = s.smul(&a, &a).unwrap();
        assert_eq!(m.i0, -4);
        assert_eq!(m.prec, 1);
    }

    #[test]
    fn invert_geometric_series() {
        let s = spec_for_q(3).unwrap();
        // 1 - s + O(s^5) -> 1 + s + s^2 + s^3 + s^4 + O(s^5)
        let mut c = vec![Fq2::ZERO; 5];
        c[0] = s.one2();
        c[1] = s.neg2(s.one2());
        let a = Series::from_window(1, 0, 5, c);
        let inv = s.sinv(&a).unwrap();
        assert_eq!(inv.prec, 5);
        for k in 0..5 {
            assert_eq!(inv.coeff(k).unwrap(), s.one2(), "coeff of s^{k}");
        }
        // multiply-back oracle
        let prod = s.smul(&a, &inv).unwrap();
        let one = Series::constant(1, s.one2(), prod.prec);
        assert!(s.seq_to_prec(&prod, &one));
    }

    #[test]
    fn cancellation_is_zero_to_precision() {
        let s = spec_for_q(3).unwrap();
        let a = Series::term(2, Fq2(2), -3, 10);
        let d = s.ssub(&a, &a).unwrap();
        assert!(d.is_zero_to_prec());
        assert_eq!(d.prec, 10);
        assert_eq!(d.abs(), AbsVal::NegInfinity);
    }

    #[test]
    fn abs_values() {
        let s = spec_for_q(3).unwrap();
        // x = t^3 + lower: log_q |x| = 3
        let x = Series::from_poly(&s, &crate::algebra::Poly::monomial(Fq(1), 3), 1, 5);
        assert_eq!(x.abs(), AbsVal::Log { half: 6 });
        // e = 2: sqrt(t)-shaped series has |x| = q^(1/2)
        let y = Series::term(2, s.one2(), -1, 8);
        assert_eq!(y.abs(), AbsVal::Log { half: 1 });
        assert_eq!(format!("{}", y.abs()), "q^(1/2)");
        assert_eq!(format!("{}", x.abs()), "q^3");
    }

    #[test]
    fn frobenius_scales_exponents_and_precision() {
        let s = spec_for_q(3).unwrap();
        let mut c = vec![Fq2::ZERO; 4];
        c[0] = Fq2(2);
        c[1] = s.one2();
        let a = Series::from_window(1, -1, 3, c);
        let f = s.sfrob(&a, 1).unwrap();
        assert_eq!(f.i0, -3);
        assert_eq!(f.prec, 9);
        assert_eq!(f.coeff(-3).unwrap(), Fq2(2)); // 2^3 = 2 in F_3
        assert_eq!(f.coeff(0).unwrap(), s.one2());
        assert_eq!(f.coeff(-2).unwrap(), Fq2::ZERO);
        // Frobenius is a ring map: (a*a)^q == (a^q)*(a^q)
        let lhs = s.sfrob(&s.smul(&a, &a).unwrap(), 1).unwrap();
        let rhs = s.smul(&f, &f).unwrap();
        assert!(s.seq_to_prec(&lhs, &rhs));
    }

    #[test]
    fn ultrametric_inequality() {
        let s = spec_for_q(5).unwrap();
        let a = Series::term(1, Fq2(2), -3, 6);
        let b = Series::term(1, Fq2(3), -1, 6);
        let sum = s.sadd(&a, &b).unwrap();
        // |a| != |b| forces equality with the max
        assert_eq!(sum.abs(), a.abs().max(b.abs()));
        // equal absolute values can only stay or drop
        let c = Series::term(1, Fq2(3), -3, 6);
        let sum2 = s.sadd(&a, &c).unwrap();
        assert!(sum2.abs() <= a.abs());
    }

    #[test]
    fn mixing_ramification_is_rejected() {
        let s = spec_for_q(3).unwrap();
        let a = Series::term(1, s.one2(), 0, 4);
        let b = Series::term(2, s.one2(), 0, 4);
        assert_eq!(
            s.sadd(&a, &b).unwrap_err().name(),
            "RamificationMismatch"
        );
        let b2 = a.rescale_to_e2();
        assert_eq!(b2.e, 2);
        assert_eq!(b2.prec, 8);
    }
}
