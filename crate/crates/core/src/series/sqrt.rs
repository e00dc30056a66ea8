//! Square roots of polynomials as Laurent series at ∞.

use super::Series;
use crate::algebra::{FieldSpec, Fq, Fq2, Poly};
use crate::error::{Error, Result};

/// √δ as a series, to the given window length in s-digits.
///
/// Odd deg δ forces the ramified uniformizer (e = 2, odd s-exponents only);
/// even deg δ stays in e = 1. The leading coefficient is the canonical
/// square root of δ's leading coefficient in F_{q²}, and the remaining
/// coefficients come from the convolution identities of (√δ)² = δ: with
/// y = 1 + Σ y_j t^(-j) and (1 + u) = δ / (lc · t^m),
///     y_j = (u_j - Σ_{0<i<j} y_i y_{j-i}) / 2.
pub fn sqrt_poly(spec: &FieldSpec, delta: &Poly, window: i64) -> Result<Series> {
    let m = match delta.deg() {
        None => return Err(Error::ZeroPolynomial),
        Some(m) => m,
    };
    let e: u8 = if m % 2 == 1 { 2 } else { 1 };
    let lam = spec.sqrt_fq2(delta.lead());

    // u_j = coeff of t^(m-j) in δ / lc, for j >= 1.
    let lc_inv = spec.invq(delta.lead())?;
    let u = |j: i64| -> Fq {
        if j < 0 || j > m {
            Fq::ZERO
        } else {
            spec.mulq(delta.coeff((m - j) as usize), lc_inv)
        }
    };

    let digits = window.max(1) as usize;
    let half = spec.invq(spec.addq(Fq(1), Fq(1)))?; // 1/2, q odd
    let mut y: Vec<Fq> = Vec::with_capacity(digits);
    y.push(Fq(1));
    for j in 1..digits as i64 {
        let mut acc = Fq::ZERO;
        for i in 1..j {
            acc = spec.addq(acc, spec.mulq(y[i as usize], y[(j - i) as usize]));
        }
        let v = spec.mulq(spec.subq(u(j), acc), half);
        y.push(v);
    }

    // √δ = λ * t^(m/2) * y(t^{-1}); in s-units the term y_j sits at
    // exponent e*j - e*m/2 = e*j + i0.
    let i0 = if e == 2 { -m } else { -m / 2 };
    let prec = i0 + (e as i64) * digits as i64;
    let mut c = vec![Fq2::ZERO; (prec - i0) as usize];
    for (j, &yj) in y.iter().enumerate() {
        let off = (e as usize) * j;
        if off < c.len() {
            c[off] = spec.mul2(lam, spec.embed(yj));
        }
    }
    Ok(Series::from_window(e, i0, prec, c).truncate(i0 + window))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::spec_for_q;
    use crate::series::AbsVal;

    fn poly(s: &FieldSpec, coeffs: &[i64]) -> Poly {
        Poly::from_coeffs(coeffs.iter().map(|&v| s.fq_from_int(v)).collect())
    }

    fn square_matches(spec: &FieldSpec, delta: &Poly, window: i64) {
        let r = sqrt_poly(spec, delta, window).unwrap();
        let sq = spec.smul(&r, &r).unwrap();
        let emb = Series::from_poly(spec, delta, r.e, sq.prec);
        assert!(
            spec.seq_to_prec(&sq, &emb),
            "sqrt(δ)² != δ for {:?}",
            delta
        );
    }

    #[test]
    fn sqrt_4t_over_f3() {
        let s = spec_for_q(3).unwrap();
        // 4t = t in F_3; sqrt = t^(1/2) = s^-1 with e = 2.
        let delta = poly(&s, &[0, 1]);
        let r = sqrt_poly(&s, &delta, 12).unwrap();
        assert_eq!(r.e, 2);
        assert_eq!(r.i0, -1);
        assert_eq!(r.abs(), AbsVal::Log { half: 1 });
        square_matches(&s, &delta, 12);
    }

    #[test]
    fn sqrt_t2_plus_1_over_f3() {
        let s = spec_for_q(3).unwrap();
        let delta = poly(&s, &[1, 0, 1]);
        let r = sqrt_poly(&s, &delta, 9).unwrap();
        assert_eq!(r.e, 1);
        // t + 2 t^-1 + t^-3 + O(t^-5): s-exponents -1, 1, 3
        assert_eq!(r.coeff(-1).unwrap(), Fq2(1));
        assert_eq!(r.coeff(0).unwrap(), Fq2(0));
        assert_eq!(r.coeff(1).unwrap(), Fq2(2));
        assert_eq!(r.coeff(3).unwrap(), Fq2(1));
        square_matches(&s, &delta, 9);
    }

    #[test]
    fn sqrt_nonsquare_lead_lands_outside_fq() {
        let s = spec_for_q(3).unwrap();
        let delta = poly(&s, &[1, 0, 2]); // 2t^2 + 1
        let r = sqrt_poly(&s, &delta, 8).unwrap();
        let lam = r.coeff(r.i0).unwrap();
        assert!(!s.in_fq(lam));
        assert_eq!(s.mul2(lam, lam), Fq2(2));
        square_matches(&s, &delta, 8);
    }

    #[test]
    fn random_admissible_deltas_square_back() {
        // 200 seeded random δ of degree <= 8 across q ∈ {3,5,7}.
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for q in [3u32, 5, 7] {
            let s = spec_for_q(q).unwrap();
            for _ in 0..67 {
                let d = (next() % 8 + 1) as usize;
                let mut coeffs: Vec<i64> = (0..d).map(|_| (next() % q as u64) as i64).collect();
                coeffs.push(1 + (next() % (q as u64 - 1)) as i64);
                let delta = Poly::from_coeffs(
                    coeffs
                        .iter()
                        .map(|&v| {
                            // map through F_p only for prime q here
                            Fq((v as u32 % q) as u16)
                        })
                        .collect(),
                );
                if delta.is_zero() {
                    continue;
                }
                square_matches(&s, &delta, 40);
            }
        }
    }

    #[test]
    fn zero_polynomial_rejected() {
        let s = spec_for_q(3).unwrap();
        assert_eq!(
            sqrt_poly(&s, &Poly::zero(), 10).unwrap_err().name(),
            "ZeroPolynomial"
        );
    }
}
