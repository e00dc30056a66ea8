//! The reduced-triple set T_δ and the CM points z(a,b,c).
//!
//! A triple (a,b,c) with a monic, b² - 4ac = δ, |b| < |a| <= |c| and
//! gcd(a,b,c) = 1 is one Galois conjugate of the singular modulus of
//! discriminant δ. Enumeration walks monic a of degree at most ⌊deg δ/2⌋
//! and b of degree below deg a, accepting when 4a divides b² - δ; the
//! degree bound makes deg c = deg δ - deg a automatic.

use crate::algebra::{monic_of_degree, polys_of_degree, FieldSpec, Fq, Fq2, Poly};
use crate::error::{Error, Result};
use crate::quadorder::Discriminant;
use crate::series::{dist_kinf, nearest_a, sqrt_poly, AbsVal, Series};
use std::collections::HashMap;

/// One reduced form (a, b, c).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Triple {
    pub a: Poly,
    pub b: Poly,
    pub c: Poly,
}

/// Deterministic ordering key: lexicographic on (deg a, a, b).
pub fn triple_key(t: &Triple) -> (usize, Vec<u16>, usize, Vec<u16>) {
    (
        t.a.c.len(),
        t.a.c.iter().map(|x| x.0).collect(),
        t.b.c.len(),
        t.b.c.iter().map(|x| x.0).collect(),
    )
}

fn accept(
    spec: &FieldSpec,
    delta: &Poly,
    four_a: &Poly,
    a: &Poly,
    b: &Poly,
    out: &mut Vec<Triple>,
) {
    let b2 = spec.pmul(b, b);
    let num = spec.psub(&b2, delta);
    if let Ok((c, r)) = spec.pdivrem(&num, four_a) {
        if !r.is_zero() {
            return;
        }
        if c.deg_or_neg_inf() < a.deg_or_neg_inf() {
            return;
        }
        if !spec.pgcd3(a, b, &c).is_one() {
            return;
        }
        out.push(Triple {
            a: a.clone(),
            b: b.clone(),
            c,
        });
    }
}

/// Complete, duplicate-free, deterministically ordered T_δ.
pub fn enumerate_triples(spec: &FieldSpec, disc: &Discriminant) -> Vec<Triple> {
    enumerate_triples_for_delta(spec, &disc.delta)
}

/// T_δ from the raw discriminant polynomial (no order decomposition).
pub fn enumerate_triples_for_delta(spec: &FieldSpec, delta: &Poly) -> Vec<Triple> {
    let m = delta.deg().expect("nonzero discriminant");
    let four = Poly::constant(spec.four());
    let nonzero_leads: Vec<Fq> = (1..spec.q as u16).map(Fq).collect();
    let mut out = vec![];
    for da in 0..=(m / 2) as usize {
        // |b| < |a| means deg b < deg a, with b = 0 always admitted.
        let mut bs: Vec<Poly> = vec![Poly::zero()];
        for db in 0..da {
            bs.extend(polys_of_degree(spec, db, &nonzero_leads));
        }
        for a in monic_of_degree(spec, da) {
            let four_a = spec.pmul(&four, &a);
            for b in &bs {
                accept(spec, delta, &four_a, &a, b, &mut out);
            }
        }
    }
    out.sort_by_key(triple_key);
    out
}

/// Per-`a` residue table: sorted (code of b² mod 4a, code of b) pairs, so a
/// batch of discriminants of one degree reuses the squarings.
pub struct TripleCache {
    tables: HashMap<u64, Vec<(u64, u64)>>,
}

pub fn encode_poly(spec: &FieldSpec, f: &Poly) -> u64 {
    let q = spec.q as u64;
    let mut code = 0u64;
    for &c in f.c.iter().rev() {
        code = code * q + c.0 as u64 + 1; // +1 keeps leading zeros distinct
    }
    code
}

impl TripleCache {
    pub fn new(_spec: &FieldSpec) -> TripleCache {
        TripleCache {
            tables: HashMap::new(),
        }
    }

    fn table_for(&mut self, spec: &FieldSpec, a: &Poly, four_a: &Poly) -> &Vec<(u64, u64)> {
        let key = encode_poly(spec, a);
        self.tables.entry(key).or_insert_with(|| {
            let da = a.deg().unwrap() as usize;
            let nonzero_leads: Vec<Fq> = (1..spec.q as u16).map(Fq).collect();
            let mut tab = vec![];
            let mut push = |spec: &FieldSpec, b: &Poly| {
                let b2 = spec.pmul(b, b);
                let r = spec.prem(&b2, four_a).unwrap();
                tab.push((encode_poly(spec, &r), encode_poly(spec, b)));
            };
            push(spec, &Poly::zero());
            for db in 0..da {
                for b in polys_of_degree(spec, db, &nonzero_leads) {
                    push(spec, &b);
                }
            }
            tab.sort_unstable();
            tab
        })
    }

    /// Same output as [`enumerate_triples`], amortizing the b-loop across
    /// many δ of a common degree range.
    pub fn enumerate(&mut self, spec: &FieldSpec, disc: &Discriminant) -> Vec<Triple> {
        self.enumerate_for_delta(spec, &disc.delta)
    }

    pub fn enumerate_for_delta(&mut self, spec: &FieldSpec, delta: &Poly) -> Vec<Triple> {
        let m = delta.deg().expect("nonzero discriminant");
        let four = Poly::constant(spec.four());
        let mut out = vec![];
        for da in 0..=(m / 2) as usize {
            for a in monic_of_degree(spec, da) {
                let four_a = spec.pmul(&four, &a);
                let delta_mod = spec.prem(delta, &four_a).unwrap();
                let code = encode_poly(spec, &delta_mod);
                let table = self.table_for(spec, &a, &four_a);
                let start = table.partition_point(|&(k, _)| k < code);
                for &(k, bcode) in &table[start..] {
                    if k != code {
                        break;
                    }
                    let b = decode_poly(spec, bcode);
                    accept(spec, delta, &four_a, &a, &b, &mut out);
                }
            }
        }
        out.sort_by_key(triple_key);
        out
    }
}

pub fn decode_poly(spec: &FieldSpec, code: u64) -> Poly {
    let q = spec.q as u64;
    let mut digits: Vec<Fq> = vec![];
    let mut v = code;
    while v > 0 {
        digits.push(Fq(((v - 1) % q) as u16));
        v = (v - 1) / q;
    }
    Poly::from_coeffs(digits)
}

/// |T_δ|; equals the degree of the class polynomial.
pub fn class_number(spec: &FieldSpec, disc: &Discriminant) -> usize {
    enumerate_triples(spec, disc).len()
}

/// The naive triple-nested oracle: scan every (a, b, c) in the degree box
/// and keep those with b² - 4ac = δ and gcd 1. Test/verification use only.
pub fn naive_triples(spec: &FieldSpec, disc: &Discriminant) -> Vec<Triple> {
    let m = disc.deg_delta();
    let four = Poly::constant(spec.four());
    let nonzero_leads: Vec<Fq> = (1..spec.q as u16).map(Fq).collect();
    let mut out = vec![];
    for da in 0..=(m / 2) as usize {
        let dc = (m as usize) - da;
        for a in monic_of_degree(spec, da) {
            let four_a = spec.pmul(&four, &a);
            let mut bs: Vec<Poly> = vec![Poly::zero()];
            for db in 0..da {
                bs.extend(polys_of_degree(spec, db, &nonzero_leads));
            }
            for b in &bs {
                let b2 = spec.pmul(b, b);
                for c in polys_of_degree(spec, dc, &nonzero_leads) {
                    let cand = spec.psub(&b2, &spec.pmul(&four_a, &c));
                    if cand == disc.delta && spec.pgcd3(&a, b, &c).is_one() {
                        out.push(Triple {
                            a: a.clone(),
                            b: b.clone(),
                            c,
                        });
                    }
                }
            }
        }
    }
    out.sort_by_key(triple_key);
    out
}

/// A CM point z(a,b,c) = (-b + √δ)/(2a) with its series expansion.
#[derive(Debug, Clone)]
pub struct CmPoint {
    pub triple: Triple,
    pub z: Series,
}

/// Exact metrics of a point on the Drinfeld upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Metrics {
    pub abs: AbsVal,
    pub dist_a: AbsVal,
    pub dist_kinf: AbsVal,
    /// |z| = |z|_i >= 1, membership in the fundamental domain.
    pub in_f: bool,
}

/// Build the CM point with at least `window` s-digits of precision.
/// Checks that a·z² + b·z + c vanishes to precision.
pub fn cm_point(
    spec: &FieldSpec,
    triple: &Triple,
    disc: &Discriminant,
    window: i64,
) -> Result<CmPoint> {
    cm_point_with_branch(spec, triple, disc, window, false)
}

/// Same, optionally taking the conjugate square-root branch -√δ (which
/// maps z to z̄).
pub fn cm_point_with_branch(
    spec: &FieldSpec,
    triple: &Triple,
    disc: &Discriminant,
    window: i64,
    branch_swap: bool,
) -> Result<CmPoint> {
    let e = disc.e();
    let mut sq = sqrt_poly(spec, &disc.delta, window + 2 * disc.deg_delta() + 8)?;
    if branch_swap {
        sq = spec.sneg(&sq);
    }
    let prec = sq.prec;
    let two = Poly::constant(spec.addq(Fq(1), Fq(1)));
    let two_a = spec.pmul(&two, &triple.a);
    let minus_b = Series::from_poly(spec, &spec.pneg(&triple.b), e, prec);
    let num = spec.sadd(&sq, &minus_b)?;
    let den = Series::from_poly(spec, &two_a, e, prec);
    let z = spec.smul(&num, &spec.sinv(&den)?)?;
    if z.window_len() < window {
        return Err(Error::InsufficientPrecision(format!(
            "requested {window} digits, produced {}",
            z.window_len()
        )));
    }
    // residual a z² + b z + c must vanish to precision
    let az2 = spec.smul(&Series::from_poly(spec, &triple.a, e, z.prec), &spec.smul(&z, &z)?)?;
    let bz = spec.smul(&Series::from_poly(spec, &triple.b, e, z.prec), &z)?;
    let cc = Series::from_poly(spec, &triple.c, e, az2.prec.min(bz.prec));
    let resid = spec.sadd(&spec.sadd(&az2, &bz)?, &cc)?;
    if !resid.is_zero_to_prec() {
        return Err(Error::ConsistencyFailure(format!(
            "quadratic residual has size {}",
            resid.abs()
        )));
    }
    Ok(CmPoint {
        triple: triple.clone(),
        z,
    })
}

/// |z|, |z|_A, |z|_i and fundamental-domain membership.
pub fn metrics(spec: &FieldSpec, pt: &CmPoint) -> Result<Metrics> {
    let abs = pt.z.abs();
    let (_, dist_a) = nearest_a(spec, &pt.z)?;
    let dki = dist_kinf(spec, &pt.z);
    let in_f = abs == dki && abs >= AbsVal::one();
    Ok(Metrics {
        abs,
        dist_a,
        dist_kinf: dki,
        in_f,
    })
}

/// Number of triples in T_δ whose CM point lies within |δ|^(-1/2) of u.
///
/// Only forms with |z| = 1 (deg a = deg δ/2) can come near a constant, so
/// the scan is cheap: per triple the distance is |√δ - b - 2au| / |2a|.
pub fn near_root_count(spec: &FieldSpec, disc: &Discriminant, u: Fq2) -> Result<usize> {
    if spec.in_fq(u) {
        return Err(Error::PreconditionViolated("u must lie outside F_q".into()));
    }
    let triples = enumerate_triples(spec, disc);
    near_root_count_in(spec, disc, &triples, u)
}

/// Same, with a precomputed triple list.
pub fn near_root_count_in(
    spec: &FieldSpec,
    disc: &Discriminant,
    triples: &[Triple],
    u: Fq2,
) -> Result<usize> {
    near_root_count_for_delta(spec, &disc.delta, triples, u)
}

/// Raw-δ variant; ramification index read from the degree parity.
pub fn near_root_count_for_delta(
    spec: &FieldSpec,
    delta: &Poly,
    triples: &[Triple],
    u: Fq2,
) -> Result<usize> {
    if spec.in_fq(u) {
        return Err(Error::PreconditionViolated("u must lie outside F_q".into()));
    }
    let m = delta.deg().expect("nonzero discriminant");
    let e: i64 = if m % 2 == 1 { 2 } else { 1 };
    let window = e * (m + 6);
    let sq = sqrt_poly(spec, delta, window)?;
    let two = spec.add2(spec.one2(), spec.one2());
    let two_u = spec.mul2(two, u);
    let mut count = 0usize;
    let es = e as u8;
    for t in triples {
        let da = t.a.deg().unwrap();
        // |z - u| = |√δ - b - 2au| · q^{-deg a}; only |z| = 1 can be close.
        if 2 * da < m {
            continue;
        }
        // w = √δ - b - 2 a u as a series
        let mut w = sq.clone();
        let b_s = Series::from_poly(spec, &t.b, es, w.prec);
        w = spec.ssub(&w, &b_s)?;
        let au = {
            let a_s = Series::from_poly(spec, &t.a, es, w.prec);
            spec.sscale(&a_s, two_u)
        };
        w = spec.ssub(&w, &au)?;
        // condition: log|w| - deg a < -m/2, in half-log units:
        // -2 i0w / e - 2 da < -m
        let close = match w.abs() {
            AbsVal::NegInfinity => {
                // |w| <= q^{-prec/e}; window guarantees decidability
                debug_assert!(-2 * w.prec / e - 2 * da < -m);
                true
            }
            AbsVal::Log { half } => half - 2 * da < -m,
        };
        if close {
            count += 1;
        }
    }
    Ok(count)
}
