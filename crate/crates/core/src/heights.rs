//! Class polynomials, Weil and graded heights, and the unit criterion.
//!
//! H_δ(X) = Π (X - j_i) over the conjugates indexed by T_δ. Every
//! coefficient is integral over A, so rounding the expanded series
//! coefficients to F_q[t] must succeed with nothing left over; any residue
//! inside the certified window aborts the whole polynomial (partial
//! rounding would silently corrupt the unit test downstream).
//!
//! Heights are exact rationals in base-q log units: the conjugate sizes
//! log_q|j_i| are rational with denominator 2, h(J) = (1/d) Σ log⁺|j_i|,
//! and (q²-1)·h_G = h(J). A second, independent route reads the same
//! multiset {log|j_i|} off the Newton polygon of the exact class
//! polynomial.

use crate::algebra::{FieldSpec, Poly};
use crate::analytic::j_invariant_with_branch;
use crate::error::{Error, Result};
use crate::forms::{enumerate_triples, Triple};
use crate::quadorder::Discriminant;
use crate::series::{newton_polygon, AbsVal, Series};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

/// Extra digits kept past s^0 when rounding to A.
const ROUND_MARGIN: i64 = 12;

/// The Galois orbit of the singular modulus, as distinct j-values.
///
/// Reduced triples map ONTO the conjugates but not always bijectively: when
/// ∞ is inert, classes whose CM points satisfy |z| = 1 are represented by
/// several reduced triples with one shared j-value (δ = 2t²+1 over F_3 has
/// five triples but two conjugates). The orbit is recovered by grouping
/// triples with equal j-series; the class-polynomial integrality and
/// stability checks downstream validate the grouping.
#[derive(Debug, Clone)]
pub struct Conjugates {
    pub triples: Vec<Triple>,
    /// Index into `triples` of one representative per distinct j-value.
    pub reps: Vec<usize>,
    /// How many triples share each distinct value.
    pub multiplicities: Vec<usize>,
    /// 2·log_q|j| per distinct value.
    pub halves: Vec<i64>,
    /// Window at which the grouping was established.
    pub window: i64,
}

impl Conjugates {
    /// Degree of the class polynomial: number of distinct conjugates.
    pub fn d(&self) -> usize {
        self.reps.len()
    }
}

/// Compute and group the conjugate j-values at the given window.
pub fn conjugates(
    spec: &FieldSpec,
    disc: &Discriminant,
    branch_swap: bool,
    window: i64,
) -> Result<Conjugates> {
    let triples = enumerate_triples(spec, disc);
    let mut js: Vec<Series> = Vec::with_capacity(triples.len());
    for t in &triples {
        js.push(j_invariant_with_branch(spec, t, disc, window, branch_swap)?);
    }
    let mut reps: Vec<usize> = vec![];
    let mut multiplicities: Vec<usize> = vec![];
    for (i, j) in js.iter().enumerate() {
        let mut found = false;
        for (r, &rep) in reps.iter().enumerate() {
            if spec.seq_to_prec(j, &js[rep]) {
                multiplicities[r] += 1;
                found = true;
                break;
            }
        }
        if !found {
            reps.push(i);
            multiplicities.push(1);
        }
    }
    let mut halves = Vec::with_capacity(reps.len());
    for &r in &reps {
        match js[r].abs() {
            AbsVal::NegInfinity => {
                return Err(Error::InsufficientPrecision(
                    "conjugate j vanished to precision".into(),
                ))
            }
            AbsVal::Log { half } => halves.push(half),
        }
    }
    Ok(Conjugates {
        triples,
        reps,
        multiplicities,
        halves,
        window,
    })
}

/// An exact class polynomial, monic of degree d = |T_δ| over A.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassPoly {
    /// X-coefficients ascending; coeffs[d] = 1.
    pub coeffs: Vec<Poly>,
    /// Relative series window used for the conjugates.
    pub window: i64,
    /// Worst certified truncation valuation across conjugates.
    pub err_exponent: i64,
}

impl ClassPoly {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn constant_term(&self) -> &Poly {
        &self.coeffs[0]
    }
}

/// Round a series to an element of A. The kept part collects F_q
/// components at nonpositive multiples of e; everything else must vanish,
/// otherwise the whole rounding fails.
pub fn round_to_a(spec: &FieldSpec, z: &Series) -> Result<Poly> {
    if z.prec <= 0 {
        return Err(Error::InsufficientPrecision(format!(
            "rounding window ends at s^{}, does not clear s^0",
            z.prec
        )));
    }
    let e = z.e as i64;
    let mut coeffs: Vec<crate::algebra::Fq> = vec![];
    for exp in z.i0..z.prec {
        let c = z.coeff(exp).unwrap();
        if c.is_zero() {
            continue;
        }
        let (c0, c1) = spec.split2(c);
        if exp > 0 || exp % e != 0 || !c1.is_zero() {
            return Err(Error::RoundingFailure(format!(
                "non-integral component at exponent {exp}"
            )));
        }
        let k = (-exp / e) as usize;
        if coeffs.len() <= k {
            coeffs.resize(k + 1, crate::algebra::Fq::ZERO);
        }
        coeffs[k] = c0;
    }
    Ok(Poly::from_coeffs(coeffs))
}

/// Grouping window: enough digits to separate conjugates at desk scale;
/// validated downstream by integrality and stability.
pub fn grouping_window(disc: &Discriminant) -> i64 {
    24 + 2 * disc.e() as i64 * disc.deg_delta()
}

/// Expand Π (X - j_i) over series coefficients.
fn expand_product(spec: &FieldSpec, js: &[Series]) -> Result<Vec<Series>> {
    let e = js[0].e;
    let big = js.iter().map(|j| j.prec).max().unwrap() + 8;
    let one = Series::constant(e, spec.one2(), big);
    let mut acc: Vec<Series> = vec![one];
    for j in js {
        let mut next: Vec<Series> = Vec::with_capacity(acc.len() + 1);
        // X·acc shifts indices up; -j·acc stays
        for k in 0..=acc.len() {
            let from_shift = if k > 0 { Some(&acc[k - 1]) } else { None };
            let from_mul = if k < acc.len() {
                Some(spec.sneg(&spec.smul(j, &acc[k])?))
            } else {
                None
            };
            let v = match (from_shift, from_mul) {
                (Some(a), Some(b)) => spec.sadd(a, &b)?,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b,
                (None, None) => unreachable!(),
            };
            next.push(v);
        }
        acc = next;
    }
    Ok(acc)
}

/// Compute the exact class polynomial over the distinct conjugates.
///
/// Two passes: group the conjugates and measure their sizes at a moderate
/// window, then recompute the representatives at a window wide enough for
/// every symmetric function to clear s^0, and round all-or-nothing. A
/// rounding residue restarts with doubled windows (it indicates either
/// insufficient precision or a wrong grouping, both cured by more digits);
/// a persistent residue is a genuine integrality failure and propagates.
pub fn class_polynomial(
    spec: &FieldSpec,
    disc: &Discriminant,
    branch_swap: bool,
) -> Result<ClassPoly> {
    let mut gw = grouping_window(disc);
    let e = disc.e() as i64;
    let mut attempt = 0;
    loop {
        attempt += 1;
        let conj = conjugates(spec, disc, branch_swap, gw)?;
        let half_pos: i64 = conj.halves.iter().map(|&h| h.max(0)).sum();
        // window >= e·Σ log⁺|j_i| + margin so that H(0) is exact past s^0
        let window = (e * half_pos / 2 + e * ROUND_MARGIN + 16).max(gw);
        let mut js = Vec::with_capacity(conj.d());
        let mut err_exp = i64::MAX;
        for &r in &conj.reps {
            let j = j_invariant_with_branch(spec, &conj.triples[r], disc, window, branch_swap)?;
            err_exp = err_exp.min(j.prec);
            js.push(j);
        }
        // representatives must stay pairwise distinct at full precision
        let mut distinct = true;
        'outer: for i in 0..js.len() {
            for k in (i + 1)..js.len() {
                if spec.seq_to_prec(&js[i], &js[k]) {
                    distinct = false;
                    break 'outer;
                }
            }
        }
        let rounded = if distinct {
            let coeffs_series = expand_product(spec, &js)?;
            let mut coeffs = Vec::with_capacity(coeffs_series.len());
            let mut failure = None;
            for cs in &coeffs_series {
                match round_to_a(spec, cs) {
                    Ok(p) => coeffs.push(p),
                    Err(Error::RoundingFailure(m)) => {
                        failure = Some(m);
                        break;
                    }
                    Err(e) => return Err(e),
                }
            }
            match failure {
                None => Some(coeffs),
                Some(m) => {
                    if attempt >= 3 {
                        return Err(Error::RoundingFailure(m));
                    }
                    None
                }
            }
        } else {
            if attempt >= 3 {
                return Err(Error::RoundingFailure(
                    "conjugate grouping unstable under precision growth".into(),
                ));
            }
            None
        };
        match rounded {
            None => {
                gw *= 2;
                continue;
            }
            Some(coeffs) => {
                if !coeffs.last().map(|c| c.is_one()).unwrap_or(false) {
                    return Err(Error::RoundingFailure("leading coefficient not 1".into()));
                }
                return Ok(ClassPoly {
                    coeffs,
                    window,
                    err_exponent: err_exp,
                });
            }
        }
    }
}

/// h(J) = (1/d)·Σ log⁺|j_i| from the analytic conjugates.
pub fn weil_height_from_halves(halves: &[i64]) -> BigRational {
    let num: i64 = halves.iter().map(|&h| h.max(0)).sum();
    BigRational::new(BigInt::from(num), BigInt::from(2 * halves.len() as i64))
}

/// h(J) read off the Newton polygon of the exact class polynomial.
pub fn weil_height_from_class_poly(spec: &FieldSpec, h: &ClassPoly) -> BigRational {
    let slopes = newton_polygon(spec, &h.coeffs);
    let mut num = BigRational::zero();
    for seg in &slopes {
        let slope = BigRational::new(
            BigInt::from(*seg.slope.numer()),
            BigInt::from(*seg.slope.denom()),
        );
        if slope > BigRational::zero() {
            num += slope * BigRational::from(BigInt::from(seg.multiplicity));
        }
    }
    num / BigRational::from(BigInt::from(h.degree() as i64))
}

/// The polygon slope multiset doubled (comparable with conjugate halves).
pub fn class_poly_half_slopes(spec: &FieldSpec, h: &ClassPoly) -> Vec<i64> {
    let mut out = vec![];
    for seg in newton_polygon(spec, &h.coeffs) {
        let half = 2 * seg.slope.numer() / seg.slope.denom();
        debug_assert_eq!(2 * seg.slope.numer() % seg.slope.denom(), 0);
        for _ in 0..seg.multiplicity {
            out.push(half);
        }
    }
    out
}

/// h_G = h(J)/(q²-1).
pub fn graded_height(spec: &FieldSpec, hj: &BigRational) -> BigRational {
    hj / BigRational::from(BigInt::from(spec.q as i64 * spec.q as i64 - 1))
}

/// J is an algebraic unit iff the constant term of its monic minimal
/// polynomial over A lies in F_q^× (units of A are the constants).
pub fn is_unit(h: &ClassPoly) -> bool {
    let c = h.constant_term();
    !c.is_zero() && c.is_constant()
}

/// Unit criterion via valuations only: Σ log|j_i| = 0 forces the constant
/// term Π(-j_i) into F_q^× (it is a nonzero element of A of degree 0).
pub fn is_unit_from_halves(halves: &[i64]) -> bool {
    halves.iter().sum::<i64>() == 0
}
