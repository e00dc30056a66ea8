//! Distances from a series to A = F_q[t] and to k_∞ = F_q((1/t)).
//!
//! Both infima are attained by greedy term extraction: a term of z can be
//! matched by an element of the target exactly when its exponent and
//! coefficient lie in the target's span, and the remaining terms are
//! ultrametrically orthogonal to the target, so the residual's absolute
//! value is the distance.

use super::{AbsVal, Series};
use crate::algebra::{FieldSpec, Fq, Poly};
use crate::error::{Error, Result};

/// Nearest element of A and the distance |z - a|.
///
/// The minimizer collects, at every exponent that is a nonpositive multiple
/// of e (an honest power of t), the F_q component of the coefficient; the
/// w-components and all other exponents form the orthogonal residual.
/// Needs the window to reach past exponent 0, otherwise the polynomial part
/// is not determined (InsufficientPrecision).
pub fn nearest_a(spec: &FieldSpec, z: &Series) -> Result<(Poly, AbsVal)> {
    if z.prec <= 0 {
        return Err(Error::InsufficientPrecision(
            "window does not cover the polynomial exponents".into(),
        ));
    }
    let e = z.e as i64;
    let mut coeffs: Vec<Fq> = vec![];
    let mut residual_lead: Option<i64> = None;
    let mark = |exp: i64, residual_lead: &mut Option<i64>| {
        if residual_lead.is_none() {
            *residual_lead = Some(exp);
        }
    };
    if !z.is_zero_to_prec() {
        for exp in z.i0..z.prec {
            let c = z.coeff(exp).unwrap();
            if c.is_zero() {
                continue;
            }
            if exp <= 0 && exp % e == 0 {
                let (c0, c1) = spec.split2(c);
                if !c0.is_zero() {
                    let k = (-exp / e) as usize;
                    if coeffs.len() <= k {
                        coeffs.resize(k + 1, Fq::ZERO);
                    }
                    coeffs[k] = c0;
                }
                if !c1.is_zero() {
                    mark(exp, &mut residual_lead);
                }
            } else {
                mark(exp, &mut residual_lead);
            }
        }
    }
    let a = Poly::from_coeffs(coeffs);
    let dist = match residual_lead {
        Some(exp) => AbsVal::Log { half: -exp * 2 / e },
        None => AbsVal::NegInfinity,
    };
    Ok((a, dist))
}

/// Distance from z to k_∞.
///
/// Ramified case (e = 2): the odd-exponent part and the F_{q²}\F_q
/// coefficient part are orthogonal to k_∞. Inert case (e = 1): the
/// w-component series is orthogonal (sup-norm of the unramified quadratic
/// extension). Zero-to-precision marks z ∈ k_∞ to the working precision.
pub fn dist_kinf(spec: &FieldSpec, z: &Series) -> AbsVal {
    if z.is_zero_to_prec() {
        return AbsVal::NegInfinity;
    }
    let e = z.e as i64;
    for exp in z.i0..z.prec {
        let c = z.coeff(exp).unwrap();
        if c.is_zero() {
            continue;
        }
        let orthogonal = if exp % e == 0 {
            !spec.split2(c).1.is_zero()
        } else {
            true
        };
        if orthogonal {
            return AbsVal::Log { half: -exp * 2 / e };
        }
    }
    AbsVal::NegInfinity
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{spec_for_q, Fq2};
    use crate::series::sqrt_poly;

    fn poly(s: &FieldSpec, coeffs: &[i64]) -> Poly {
        Poly::from_coeffs(coeffs.iter().map(|&v| s.fq_from_int(v)).collect())
    }

    #[test]
    fn sqrt_t_distances() {
        let s = spec_for_q(3).unwrap();
        let z = sqrt_poly(&s, &poly(&s, &[0, 1]), 20).unwrap();
        let (a, dist) = nearest_a(&s, &z).unwrap();
        assert!(a.is_zero());
        assert_eq!(dist, AbsVal::Log { half: 1 }); // q^(1/2)
        assert_eq!(dist_kinf(&s, &z), AbsVal::Log { half: 1 });
    }

    #[test]
    fn nearest_a_collects_polynomial_part() {
        let s = spec_for_q(3).unwrap();
        // z = t^2 + t^-1 (e = 1)
        let mut z = Series::from_poly(&s, &poly(&s, &[0, 0, 1]), 1, 10);
        z = s
            .sadd(&z, &Series::term(1, s.one2(), 1, 10))
            .unwrap();
        let (a, dist) = nearest_a(&s, &z).unwrap();
        assert_eq!(a, poly(&s, &[0, 0, 1]));
        assert_eq!(dist, AbsVal::Log { half: -2 }); // q^-1
    }

    #[test]
    fn w_component_is_orthogonal() {
        let s = spec_for_q(3).unwrap();
        // z = t + u t with u = w outside F_3: nearest a = t, dist = q^1
        let u = Fq2(3); // w
        let t_series = Series::from_poly(&s, &poly(&s, &[0, 1]), 1, 8);
        let ut = s.sscale(&t_series, u);
        let one_plus_u = s.sadd(&t_series, &ut).unwrap();
        let (a, dist) = nearest_a(&s, &one_plus_u).unwrap();
        assert_eq!(a, poly(&s, &[0, 1]));
        assert_eq!(dist, AbsVal::Log { half: 2 }); // q^1
        assert_eq!(dist_kinf(&s, &one_plus_u), AbsVal::Log { half: 2 });
    }

    #[test]
    fn element_of_kinf_has_zero_distance() {
        let s = spec_for_q(3).unwrap();
        let mut z = Series::from_poly(&s, &poly(&s, &[2, 0, 1]), 1, 12);
        z = s.sadd(&z, &Series::term(1, Fq2(2), 5, 12)).unwrap();
        assert_eq!(dist_kinf(&s, &z), AbsVal::NegInfinity);
        let (a, d) = nearest_a(&s, &z).unwrap();
        assert_eq!(a, poly(&s, &[2, 0, 1]));
        assert_eq!(d, AbsVal::Log { half: -10 });
    }

    #[test]
    fn brute_force_oracle_on_random_series() {
        // nearest_a agrees with exhaustive minimization over deg a <= deg_t z + 1
        // on 100 seeded random series.
        let mut state = 0x1234_5678_9abc_defu64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        let s = spec_for_q(3).unwrap();
        for _ in 0..100 {
            let e = if next() % 2 == 0 { 1u8 } else { 2u8 };
            let i0 = -((next() % 5) as i64) * e as i64;
            let len = 8 + (next() % 6) as i64;
            let mut c = vec![Fq2::ZERO; len as usize];
            for slot in c.iter_mut() {
                *slot = Fq2((next() % 9) as u16);
            }
            let z = Series::from_window(e, i0, i0 + len, c);
            if z.is_zero_to_prec() {
                continue;
            }
            let (a, dist) = nearest_a(&s, &z).unwrap();
            // brute force over all a' of degree <= deg bound
            let bound = ((-z.i0) / e as i64).max(0) + 1;
            let mut best = AbsVal::Log { half: i64::MAX };
            for cand in crate::algebra::polys_of_degree(
                &s,
                0,
                &[Fq(0), Fq(1), Fq(2)],
            )
            .chain((1..=bound as usize).flat_map(|d| {
                crate::algebra::polys_of_degree(&s, d, &[Fq(1), Fq(2)])
                    .collect::<Vec<_>>()
                    .into_iter()
            })) {
                let cs = Series::from_poly(&s, &cand, e, z.prec);
                let diff = s.ssub(&z, &cs).unwrap();
                let av = diff.abs();
                if av < best {
                    best = av;
                }
            }
            let attained = {
                let cs = Series::from_poly(&s, &a, e, z.prec);
                s.ssub(&z, &cs).unwrap().abs()
            };
            assert_eq!(attained, best, "greedy extraction attains the infimum");
            assert_eq!(dist, best);
        }
    }

    #[test]
    fn insufficient_precision_flagged() {
        let s = spec_for_q(3).unwrap();
        let z = Series::term(1, s.one2(), -5, -1); // window ends before s^0
        assert_eq!(
            nearest_a(&s, &z).unwrap_err().name(),
            "InsufficientPrecision"
        );
    }
}
