//! Imaginary quadratic orders of k = F_q(t).
//!
//! An order O = A + f0·O_K inside K = k(√δ0) has discriminant δ = 4·f0²·δ0.
//! K is imaginary exactly when the place at infinity does not split:
//! deg δ0 odd (ramified) or deg δ0 even with a non-square leading
//! coefficient (inert). χ is the splitting character of finite primes and
//! e_{f0}(v) the local Euler factor for the conductor; the bound right-hand
//! sides and the Mertens-type sum live here too since they are pure
//! functions of (δ0, f0, q).

use crate::algebra::{count_irreducibles, FieldSpec, Poly};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Zero};

/// Behaviour of the infinite place in k(√δ0).
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum PlaceType {
    Ramified,
    Inert,
    Split,
}

impl std::fmt::Display for PlaceType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PlaceType::Ramified => write!(f, "Ramified"),
            PlaceType::Inert => write!(f, "Inert"),
            PlaceType::Split => write!(f, "Split"),
        }
    }
}

/// Ramified iff deg δ0 odd; inert iff deg even with non-square leading
/// coefficient; split otherwise.
pub fn classify_infinity(spec: &FieldSpec, delta0: &Poly) -> Result<PlaceType> {
    if delta0.is_zero() || !spec.is_squarefree(delta0) {
        return Err(Error::NotSquarefree);
    }
    let m = delta0.deg().unwrap();
    if m % 2 == 1 {
        Ok(PlaceType::Ramified)
    } else if !spec.is_square_fq(delta0.lead())? {
        Ok(PlaceType::Inert)
    } else {
        Ok(PlaceType::Split)
    }
}

/// The discriminant data of an imaginary quadratic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Discriminant {
    /// δ = 4 f0² δ0, exactly.
    pub delta: Poly,
    /// Squarefree fundamental part (carries the unit; f0 is monic).
    pub delta0: Poly,
    /// Conductor, monic.
    pub f0: Poly,
    pub place_type: PlaceType,
}

/// Assemble an order discriminant from conductor and fundamental part.
pub fn make_discriminant(spec: &FieldSpec, f0: &Poly, delta0: &Poly) -> Result<Discriminant> {
    let place_type = classify_infinity(spec, delta0)?;
    if place_type == PlaceType::Split {
        return Err(Error::SplitAtInfinity);
    }
    if f0.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let f0 = spec.monic(f0);
    let four = Poly::constant(spec.four());
    let delta = spec.pmul(&four, &spec.pmul(&spec.pmul(&f0, &f0), delta0));
    if delta.deg() == Some(0) {
        return Err(Error::DegreeZeroDiscriminant);
    }
    Ok(Discriminant {
        delta,
        delta0: delta0.clone(),
        f0,
        place_type,
    })
}

/// Recover the order structure from a raw discriminant δ: f0 is the monic
/// square part of δ and δ0 = δ/(4 f0²).
pub fn discriminant_from_delta(spec: &FieldSpec, delta: &Poly) -> Result<Discriminant> {
    if delta.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let (_, f0) = spec.squarefree_decompose(delta)?;
    let four = Poly::constant(spec.four());
    let denom = spec.pmul(&four, &spec.pmul(&f0, &f0));
    let (delta0, r) = spec.pdivrem(delta, &denom)?;
    debug_assert!(r.is_zero());
    make_discriminant(spec, &f0, &delta0)
}

impl Discriminant {
    pub fn deg_delta(&self) -> i64 {
        self.delta.deg().unwrap()
    }

    /// Ramification index of the series model for CM points of this order:
    /// 2 when ∞ ramifies (odd deg δ), 1 when inert.
    pub fn e(&self) -> u8 {
        if self.deg_delta() % 2 == 1 {
            2
        } else {
            1
        }
    }
}

/// Splitting character of a monic irreducible v in K = k(√δ0):
/// 0 if v | δ0, else +1 when δ0 is a square mod v (Euler criterion), -1
/// otherwise.
pub fn chi(spec: &FieldSpec, v: &Poly, delta0: &Poly) -> Result<i32> {
    if !v.is_monic() || !spec.is_irreducible(v) {
        return Err(Error::NotIrreducible);
    }
    let r = spec.prem(delta0, v)?;
    if r.is_zero() {
        return Ok(0);
    }
    let card = (spec.q as u64).pow(v.deg().unwrap() as u32);
    let euler = spec.ppowmod(&r, (card - 1) / 2, v)?;
    if euler.is_one() {
        Ok(1)
    } else {
        Ok(-1)
    }
}

/// The local Euler factor of the conductor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EulerFactor {
    pub v: Poly,
    /// l = q^deg v.
    pub l: u64,
    pub chi: i32,
    /// e_{f0}(v) = (1-χ)(1-l^{-m}) / ((l-χ)(1-l^{-1})) with m = v(f0).
    pub value: BigRational,
}

pub fn e_factor(spec: &FieldSpec, v: &Poly, f0: &Poly, delta0: &Poly) -> Result<EulerFactor> {
    let m = spec.multiplicity(v, f0)?;
    if m == 0 {
        return Err(Error::NotDividing);
    }
    let chi_v = chi(spec, v, delta0)?;
    let l = (spec.q as u64).pow(v.deg().unwrap() as u32);
    let lb = BigInt::from(l);
    let one = BigRational::one();
    let l_r = BigRational::from(lb.clone());
    let num = BigRational::from(BigInt::from(1 - chi_v as i64))
        * (&one - BigRational::new(BigInt::one(), lb.pow(m)));
    let den = (l_r - BigRational::from(BigInt::from(chi_v as i64)))
        * (&one - BigRational::new(BigInt::one(), lb));
    Ok(EulerFactor {
        v: v.clone(),
        l,
        chi: chi_v,
        value: num / den,
    })
}

/// Genus of K = k(√δ0): (deg δ0 - 1)/2 when odd, (deg δ0 - 2)/2 when even.
pub fn genus(spec: &FieldSpec, delta0: &Poly) -> Result<i64> {
    if delta0.is_zero() || !spec.is_squarefree(delta0) {
        return Err(Error::NotSquarefree);
    }
    let m = delta0.deg().unwrap();
    if m % 2 == 1 {
        Ok((m - 1) / 2)
    } else {
        Ok((m - 2) / 2)
    }
}

/// Σ_{i<=n} i·a_i·q^{-i} with a_i the number of monic irreducibles of
/// degree i: the Mertens-type partial sum over primes of size at most q^n.
pub fn mertens_sum(spec: &FieldSpec, n: u32) -> BigRational {
    let mut acc = BigRational::zero();
    let q = BigInt::from(spec.q);
    for i in 1..=n {
        let a_i = count_irreducibles(spec, i);
        acc += BigRational::new(BigInt::from(a_i) * BigInt::from(i), q.pow(i));
    }
    acc
}

/// Right-hand side of the height lower bound, with caller-supplied C_q:
/// (q²-1)(1/2 - 1/(√q+1))·(deg δ)/2 + (1/2 + 1/(√q+1))·deg f0
///   - (9/4)·log_q(deg f0) - C_q,
/// the log-log term clamped to 0 for deg f0 <= 1.
pub fn lower_bound_rhs(spec: &FieldSpec, disc: &Discriminant, c_q: f64) -> f64 {
    let q = spec.q as f64;
    let sq = q.sqrt();
    let deg_delta = disc.deg_delta() as f64;
    let deg_f0 = disc.f0.deg().unwrap() as f64;
    let loglog = if deg_f0 <= 1.0 {
        0.0
    } else {
        deg_f0.ln() / q.ln()
    };
    (q * q - 1.0) * (0.5 - 1.0 / (sq + 1.0)) * (deg_delta / 2.0)
        + (0.5 + 1.0 / (sq + 1.0)) * deg_f0
        - 2.25 * loglog
        - c_q
}

/// Right-hand side of the conditional height upper bound, with caller
/// supplied O_q: (1 + (q²-q)/d)(q+1)·(deg δ)/2 + O_q.
pub fn upper_bound_rhs(spec: &FieldSpec, disc: &Discriminant, d: u64, o_q: f64) -> f64 {
    let q = spec.q as f64;
    let deg_delta = disc.deg_delta() as f64;
    (1.0 + (q * q - q) / d as f64) * (q + 1.0) * (deg_delta / 2.0) + o_q
}

/// Exact rational rendered as "num/den".
pub fn ratio_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// 9/(4l) as an exact rational, the uniform bound on e_{f0}(v).
pub fn nine_over_4l(l: u64) -> BigRational {
    BigRational::new(BigInt::from(9), BigInt::from(4 * l))
}

/// Exact Ratio<i64> to f64, presentation only.
pub fn ratio_to_f64(r: &Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{spec_for_q, Fq};
    use num_traits::{Signed, ToPrimitive};

    fn poly(s: &FieldSpec, coeffs: &[i64]) -> Poly {
        Poly::from_coeffs(coeffs.iter().map(|&v| s.fq_from_int(v)).collect())
    }

    #[test]
    fn classify_examples_q3() {
        let s = spec_for_q(3).unwrap();
        assert_eq!(
            classify_infinity(&s, &poly(&s, &[0, 1])).unwrap(),
            PlaceType::Ramified
        );
        assert_eq!(
            classify_infinity(&s, &poly(&s, &[1, 0, 2])).unwrap(),
            PlaceType::Inert
        );
        assert_eq!(
            classify_infinity(&s, &poly(&s, &[2, 1, 1])).unwrap(),
            PlaceType::Split
        );
        assert_eq!(
            classify_infinity(&s, &poly(&s, &[0, 0, 1]))
                .unwrap_err()
                .name(),
            "NotSquarefree"
        );
    }

    #[test]
    fn classify_invariant_under_square_scaling() {
        for q in [3u32, 5, 7] {
            let s = spec_for_q(q).unwrap();
            for delta0 in [poly(&s, &[0, 1]), poly(&s, &[1, 1, 0, 1]), poly(&s, &[2, 1])] {
                let base = classify_infinity(&s, &delta0).unwrap();
                for c in 1..q as u16 {
                    let c2 = s.mulq(Fq(c), Fq(c));
                    let scaled = s.pscale(&delta0, c2);
                    assert_eq!(classify_infinity(&s, &scaled).unwrap(), base);
                }
            }
        }
    }

    #[test]
    fn make_discriminant_examples() {
        let s = spec_for_q(3).unwrap();
        // (1, t): δ = 4t = t since 4 = 1 in F_3
        let d = make_discriminant(&s, &Poly::one(), &poly(&s, &[0, 1])).unwrap();
        assert_eq!(d.delta, poly(&s, &[0, 1]));
        assert_eq!(d.place_type, PlaceType::Ramified);
        assert_eq!(d.e(), 2);
        // (t, t): δ = 4 t² t = t³
        let d = make_discriminant(&s, &poly(&s, &[0, 1]), &poly(&s, &[0, 1])).unwrap();
        assert_eq!(d.delta, poly(&s, &[0, 0, 0, 1]));
        // split rejected
        assert_eq!(
            make_discriminant(&s, &Poly::one(), &poly(&s, &[2, 1, 1]))
                .unwrap_err()
                .name(),
            "SplitAtInfinity"
        );
        // constant δ rejected
        assert_eq!(
            make_discriminant(&s, &Poly::one(), &poly(&s, &[2]))
                .unwrap_err()
                .name(),
            "DegreeZeroDiscriminant"
        );
    }

    #[test]
    fn delta_roundtrip() {
        let s = spec_for_q(3).unwrap();
        let d = discriminant_from_delta(&s, &poly(&s, &[0, 1])).unwrap();
        assert_eq!(d.f0, Poly::one());
        assert_eq!(d.delta0, poly(&s, &[0, 1]));
        let d3 = discriminant_from_delta(&s, &poly(&s, &[0, 0, 0, 1])).unwrap();
        assert_eq!(d3.f0, poly(&s, &[0, 1]));
        assert_eq!(d3.delta0, poly(&s, &[0, 1]));
    }

    #[test]
    fn chi_examples() {
        let s = spec_for_q(3).unwrap();
        let t = poly(&s, &[0, 1]);
        assert_eq!(chi(&s, &t, &t).unwrap(), 0);
        // δ0 = t ≡ 1 mod (t-1): square → +1
        assert_eq!(chi(&s, &poly(&s, &[-1, 1]), &t).unwrap(), 1);
        // δ0 = t ≡ 2 mod (t-2): non-square in F_3 → -1
        assert_eq!(chi(&s, &poly(&s, &[-2, 1]), &t).unwrap(), -1);
        assert_eq!(
            chi(&s, &poly(&s, &[0, 0, 1]), &t).unwrap_err().name(),
            "NotIrreducible"
        );
    }

    #[test]
    fn chi_vanishes_exactly_on_ramified_primes() {
        let s = spec_for_q(5).unwrap();
        let delta0 = poly(&s, &[0, 2, 0, 1]); // t³ + 2t = t(t²+2), squarefree
        assert!(s.is_squarefree(&delta0));
        for v in s.monic_irreducibles(3) {
            let c = chi(&s, &v, &delta0).unwrap();
            let divides = s.pdivides(&v, &delta0).unwrap();
            assert_eq!(c == 0, divides, "v = {:?}", v);
            assert!((-1..=1).contains(&c));
        }
    }

    #[test]
    fn e_factor_examples() {
        let s = spec_for_q(3).unwrap();
        let t = poly(&s, &[0, 1]);
        // χ = -1, l = 3, m = 1: (2·(2/3))/((4)·(2/3)) = 1/2
        let v = poly(&s, &[-2, 1]);
        let ef = e_factor(&s, &v, &v, &t).unwrap();
        assert_eq!(ef.chi, -1);
        assert_eq!(ef.value, BigRational::new(1.into(), 2.into()));
        // χ = 0: (1·(2/3))/(3·(2/3)) = 1/3
        let ef = e_factor(&s, &t, &t, &t).unwrap();
        assert_eq!(ef.chi, 0);
        assert_eq!(ef.value, BigRational::new(1.into(), 3.into()));
        // χ = +1 kills the factor
        let v = poly(&s, &[-1, 1]);
        let ef = e_factor(&s, &v, &v, &t).unwrap();
        assert_eq!(ef.chi, 1);
        assert!(ef.value.is_zero());
        assert_eq!(
            e_factor(&s, &poly(&s, &[-1, 1]), &t, &t).unwrap_err().name(),
            "NotDividing"
        );
    }

    #[test]
    fn e_factor_bound_random_grid() {
        // 0 <= e_{f0}(v) <= 9/(4l) on seeded random (v, f0, δ0).
        let mut state = 0xabcdef12345u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for q in [3u32, 5, 7] {
            let s = spec_for_q(q).unwrap();
            let irr = s.monic_irreducibles(3);
            for _ in 0..40 {
                let v = &irr[(next() % irr.len() as u64) as usize];
                let m = 1 + (next() % 3) as u32;
                let mut f0 = s.ppow(v, m);
                if next() % 2 == 0 {
                    let other = &irr[(next() % irr.len() as u64) as usize];
                    if other != v {
                        f0 = s.pmul(&f0, other);
                    }
                }
                let delta0 = loop {
                    let d = (next() % 4 + 1) as usize;
                    let mut c: Vec<Fq> = (0..d).map(|_| Fq((next() % q as u64) as u16)).collect();
                    c.push(Fq(1));
                    let cand = Poly::from_coeffs(c);
                    if s.is_squarefree(&cand) {
                        break cand;
                    }
                };
                let ef = e_factor(&s, v, &f0, &delta0).unwrap();
                assert!(!ef.value.is_negative());
                assert!(ef.value <= nine_over_4l(ef.l));
                if ef.chi == 1 {
                    assert!(ef.value.is_zero());
                }
            }
        }
    }

    #[test]
    fn genus_examples() {
        let s = spec_for_q(3).unwrap();
        assert_eq!(genus(&s, &poly(&s, &[0, 1])).unwrap(), 0);
        assert_eq!(genus(&s, &poly(&s, &[2, 1, 0, 1])).unwrap(), 1);
        assert_eq!(genus(&s, &poly(&s, &[1, 1, 0, 0, 2])).unwrap(), 1);
    }

    #[test]
    fn mertens_examples() {
        let s3 = spec_for_q(3).unwrap();
        assert_eq!(mertens_sum(&s3, 1), BigRational::from(BigInt::from(1)));
        assert_eq!(mertens_sum(&s3, 2), BigRational::new(5.into(), 3.into()));
        for q in [3u32, 5, 7, 9] {
            let s = spec_for_q(q).unwrap();
            for n in 1..=12u32 {
                let v = mertens_sum(&s, n);
                let diff = (v - BigRational::from(BigInt::from(n))).abs();
                assert!(diff <= BigRational::from(BigInt::from(2)), "q={q} n={n}");
            }
        }
    }

    #[test]
    fn bound_rhs_examples_q9() {
        let s = spec_for_q(9).unwrap();
        // δ0 of degree 2 with non-square leading coefficient x+1 (index 4).
        let delta0 = Poly::from_coeffs(vec![Fq(1), Fq(0), Fq(4)]);
        let disc = make_discriminant(&s, &Poly::one(), &delta0).unwrap();
        assert_eq!(disc.place_type, PlaceType::Inert);
        let lo = lower_bound_rhs(&s, &disc, 0.0);
        assert!((lo - 20.0).abs() < 1e-12, "80·(1/2-1/4)·1 = 20, got {lo}");
        let hi = upper_bound_rhs(&s, &disc, 1, 0.0);
        assert!((hi - 730.0).abs() < 1e-12, "(1+72)·10·1 = 730, got {hi}");
    }

    #[test]
    fn mertens_is_close_to_n_numerically() {
        let s = spec_for_q(7).unwrap();
        let v = mertens_sum(&s, 8).to_f64().unwrap();
        assert!((v - 8.0).abs() < 1.0);
    }
}
