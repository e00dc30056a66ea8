//! The lattice exponential of Λ_z = A·z + A and the Drinfeld coefficients.
//!
//! e_Λ(x) = x + Σ α_k x^(q^k) is built by the F_q-subspace tower: extending
//! a subspace V by one basis vector w composes with X - β^(1-q) X^q where
//! β = e_V(w), so each basis vector is one coefficient update. Basis vectors
//! {t^i z, t^i} are inserted in nondecreasing absolute value; since every
//! nonzero λ = az + b has |az + b| = max(|a||z|, |b|) >= 1 (Lemma-5.3 style
//! points), the running product bound
//!     |e_V(w)| >= |w| · Π_{λ ∈ V\0} |w|/|λ| =: L(w)
//! is exact ultrametric bookkeeping, monotone along the insertion order.
//! Once (q-1)·log L clears every tracked window the remaining corrections
//! are invisible at working precision and the computed α_k are the true
//! lattice coefficients to precision — no truncation-degree loop needed.
//!
//! φ_t = t + g τ + Δ τ² then comes from the functional equation
//! e(tx) = t e(x) + g e(x)^q + Δ e(x)^(q²):
//!     g = (t^q - t) α_1,     Δ = (t^{q²} - t) α_2 - g α_1^q,
//! with the α_3 relation α_3 (t^{q³} - t) = g α_2^q + Δ α_1^(q²) kept as a
//! consistency oracle. j = g^(q+1)/Δ.

use crate::algebra::{FieldSpec, Fq2, Poly};
use crate::error::{Error, Result};
use crate::forms::Triple;
use crate::quadorder::Discriminant;
use crate::series::{dist_kinf, nearest_a, AbsVal, Series};

/// Default relative window in s-digits.
pub const WINDOW_DEFAULT: i64 = 40;
/// Hard cap on the relative window for adaptive doubling.
pub const WINDOW_CAP: i64 = 640;
/// Starting coefficient-degree bound for the explicit tower.
pub const D_START: u32 = 4;
/// Hard cap on coefficient degrees fed to the tower.
pub const D_CAP: u32 = 64;

/// Lattice-exponential coefficients with their certificate.
#[derive(Debug, Clone)]
pub struct ExpCoeffs {
    /// α_0 = 1, α_1, α_2, ... (may end with zero-to-precision entries).
    pub alphas: Vec<Series>,
    /// Certified s-valuation: coefficients α_1..α_3 agree with the full
    /// lattice below this exponent.
    pub err_exponent: i64,
    /// Number of basis vectors absorbed.
    pub steps: usize,
    /// Largest t-degree of an absorbed basis vector.
    pub max_deg_used: u32,
}

#[derive(Debug, Clone, Copy)]
enum BasisKind {
    T,
    Z,
}

/// Basis stream item: t^i (kind T) or t^i·z (kind Z), with its size in
/// half-log units.
#[derive(Debug, Clone, Copy)]
struct BasisVec {
    kind: BasisKind,
    i: u32,
    half: i64,
}

/// Merge the two streams by (size, T-before-Z, index).
fn basis_order(half_z: i64, max_deg: u32) -> Vec<BasisVec> {
    let mut v = vec![];
    for i in 0..=max_deg {
        v.push(BasisVec {
            kind: BasisKind::T,
            i,
            half: 2 * i as i64,
        });
        v.push(BasisVec {
            kind: BasisKind::Z,
            i,
            half: 2 * i as i64 + half_z,
        });
    }
    v.sort_by_key(|b| (b.half, matches!(b.kind, BasisKind::Z), b.i));
    v
}

/// Saturating q^i as i128, capped well below overflow.
fn sat_pow(q: i128, i: i64) -> i128 {
    let cap: i128 = 1 << 100;
    let mut acc: i128 = 1;
    for _ in 0..i {
        acc = acc.saturating_mul(q);
        if acc > cap {
            return cap;
        }
    }
    acc
}

const HALF_CAP: i128 = 1 << 100;

/// Exact 2·log_q|e_V(w)| for the next basis vector, before computing it.
///
/// V is the processed product span {c(az + b) : deg a <= dz, deg b <= dt}
/// (either bound -1 for an empty family), scaled by c with 2·log|c| =
/// half_c. Because w opens a fresh coordinate direction, every factor of
///     |e_V(w)| = Π_{λ∈V} |w - λ| / Π_{λ∈V\0} |λ|
/// is an exact ultrametric max — |b + t^(dt+1)| = q^(dt+1) and
/// |az + b| = max(|a||z|, |b|) hold with equality for |z|_i = |z| — so the
/// product telescopes into class sums. Saturating at HALF_CAP.
fn beta_half_log(q: i128, half_z: i64, half_c: i64, dz: i64, dt: i64, next: &BasisVec) -> i128 {
    let qm1 = q - 1;
    let mut num: i128 = 0;
    match next.kind {
        BasisKind::T => {
            // elements az + (b + t^{j*}), all b of deg <= dt share size
            let jstar = next.i as i64;
            debug_assert_eq!(jstar, dt + 1);
            let bcount = sat_pow(q, dt + 1);
            // a = 0 class
            num = num.saturating_add(bcount.saturating_mul(2 * jstar as i128));
            for i in 0..=dz {
                let count = qm1.saturating_mul(sat_pow(q, i)).saturating_mul(bcount);
                let h = (2 * i + half_z).max(2 * jstar) as i128;
                num = num.saturating_add(count.saturating_mul(h));
                if num > HALF_CAP {
                    num = HALF_CAP;
                    break;
                }
            }
        }
        BasisKind::Z => {
            // elements (a + t^{i*})z + b, all a of deg <= dz share size
            let istar = next.i as i64;
            debug_assert_eq!(istar, dz + 1);
            let acount = sat_pow(q, dz + 1);
            num = num.saturating_add(acount.saturating_mul((2 * istar + half_z) as i128));
            for j in 0..=dt {
                let count = qm1.saturating_mul(sat_pow(q, j)).saturating_mul(acount);
                let h = (2 * istar + half_z).max(2 * j) as i128;
                num = num.saturating_add(count.saturating_mul(h));
                if num > HALF_CAP {
                    num = HALF_CAP;
                    break;
                }
            }
        }
    }
    if num >= HALF_CAP {
        return HALF_CAP;
    }
    // denominator: sizes over V \ 0
    let mut den: i128 = 0;
    for i in 0..=dz {
        let count = qm1.saturating_mul(sat_pow(q, i));
        den = den.saturating_add(count.saturating_mul((2 * i + half_z) as i128));
    }
    for j in 0..=dt {
        let count = qm1.saturating_mul(sat_pow(q, j));
        den = den.saturating_add(count.saturating_mul((2 * j) as i128));
    }
    for i in 0..=dz {
        for j in 0..=dt {
            let count = qm1
                .saturating_mul(sat_pow(q, i))
                .saturating_mul(qm1)
                .saturating_mul(sat_pow(q, j));
            let h = ((2 * i + half_z).max(2 * j)) as i128;
            den = den.saturating_add(count.saturating_mul(h));
            if den > HALF_CAP {
                return 0; // denominator overflow: no certificate this step
            }
        }
    }
    (num - den).saturating_add(half_c as i128).min(HALF_CAP)
}

struct Tower<'a> {
    spec: &'a FieldSpec,
    alphas: Vec<Series>,
    steps: usize,
}

impl<'a> Tower<'a> {
    fn new(spec: &'a FieldSpec, e: u8, prec: i64) -> Tower<'a> {
        Tower {
            spec,
            alphas: vec![Series::constant(e, spec.one2(), prec)],
            steps: 0,
        }
    }

    /// Absorb one basis vector: β = e_V(w), then compose with
    /// X - β^(1-q) X^q.
    fn step(&mut self, w: &Series) -> Result<()> {
        let spec = self.spec;
        // e_V(w) = Σ α_k w^{q^k}
        let mut wq = w.clone();
        let mut acc = spec.smul(&self.alphas[0], w)?;
        for k in 1..self.alphas.len() {
            wq = spec.sfrob(&wq, 1)?;
            if self.alphas[k].is_zero_to_prec() && wq.is_zero_to_prec() {
                continue;
            }
            let term = spec.smul(&self.alphas[k], &wq)?;
            acc = spec.sadd(&acc, &term)?;
        }
        let beta = acc;
        if beta.is_zero_to_prec() {
            return Err(Error::InsufficientPrecision(
                "lattice exponential value vanished to precision".into(),
            ));
        }
        // c = β^{1-q} = β / β^q
        let bq = spec.sfrob(&beta, 1)?;
        let c = spec.smul(&beta, &spec.sinv(&bq)?)?;
        let mut next = Vec::with_capacity(self.alphas.len() + 1);
        next.push(self.alphas[0].clone());
        for k in 1..=self.alphas.len() {
            let corr = spec.smul(&c, &spec.sfrob(&self.alphas[k - 1], 1)?)?;
            if k < self.alphas.len() {
                next.push(spec.ssub(&self.alphas[k], &corr)?);
            } else {
                next.push(spec.sneg(&corr));
            }
        }
        self.alphas = next;
        self.steps += 1;
        Ok(())
    }

    /// Remaining corrections to α_k are c·α_{k-1}^q with val(c) >= valc;
    /// true when all of α_1..α_3 are stable through their windows.
    fn certified(&self, valc: i64) -> bool {
        if self.alphas.len() < 4 {
            return false;
        }
        for k in 1..=3usize {
            let prev = &self.alphas[k - 1];
            let prev_val = if prev.is_zero_to_prec() {
                prev.prec
            } else {
                prev.i0
            };
            let corr_val = valc.saturating_add(self.spec.q as i64 * prev_val);
            if corr_val < self.alphas[k].prec {
                return false;
            }
        }
        true
    }

    fn err_exponent(&self, valc: i64) -> i64 {
        let mut out = i64::MAX;
        for k in 1..=3usize.min(self.alphas.len() - 1) {
            let prev = &self.alphas[k - 1];
            let prev_val = if prev.is_zero_to_prec() {
                prev.prec
            } else {
                prev.i0
            };
            out = out.min(valc.saturating_add(self.spec.q as i64 * prev_val));
        }
        out
    }
}

/// val_s of β^{1-q} from the half-log size of β.
fn valc_from_half_l(q: i64, e: u8, half_l: i128) -> i64 {
    let clamped: i64 = half_l.clamp(-(i64::MAX as i128 / 4), i64::MAX as i128 / 4) as i64;
    // val_s(β) = -e·log|β|; val_s(β^{1-q}) = (q-1)·e·half/2.
    (q - 1).saturating_mul(e as i64).saturating_mul(clamped) / 2
}

/// Basis vector c·t^i or c·t^i·z where c = s^shift balances the lattice.
fn build_w(spec: &FieldSpec, z: &Series, b: &BasisVec, shift: i64) -> Result<Series> {
    let e = z.e as i64;
    match b.kind {
        BasisKind::T => Ok(Series::term(
            z.e,
            spec.one2(),
            -e * b.i as i64 + shift,
            z.prec - e * b.i as i64 + shift,
        )),
        BasisKind::Z => spec.sshift(z, -e * b.i as i64 + shift),
    }
}

fn check_lattice_point(spec: &FieldSpec, z: &Series) -> Result<i64> {
    if z.is_zero_to_prec() {
        return Err(Error::DegenerateLattice);
    }
    if dist_kinf(spec, z) == AbsVal::NegInfinity {
        return Err(Error::DegenerateLattice);
    }
    let half_z = z.abs().half_log().unwrap();
    if half_z < 0 {
        return Err(Error::PreconditionViolated(
            "|z| >= 1 required for the lattice tower".into(),
        ));
    }
    Ok(half_z)
}

/// Certified full-lattice exponential coefficients: absorbs sorted basis
/// vectors until the remaining corrections land beyond every tracked
/// window. The basis is rescaled by c = s^shift with |c| ≈ |z|^(-1/2),
/// which balances the two vector families and keeps the coefficient
/// exponents (hence window depths) about half as large; g, Δ come out for
/// the scaled lattice and j is homothety-invariant.
/// Fails with PrecisionCapExceeded if degree D_CAP is reached first.
pub fn exp_lattice(spec: &FieldSpec, z: &Series) -> Result<ExpCoeffs> {
    let half_z = check_lattice_point(spec, z)?;
    // representable balance: half_c = -2·shift/e ≈ -half_z/2
    let shift = if z.e == 2 { half_z / 2 } else { half_z / 4 };
    let half_c = -2 * shift / z.e as i64;
    let order = basis_order(half_z, D_CAP);
    let mut tower = Tower::new(spec, z.e, z.prec - z.i0.min(0) + shift.abs() + 8);
    let (mut dz, mut dt) = (-1i64, -1i64);
    let mut max_deg = 0u32;
    for (idx, b) in order.iter().enumerate() {
        // only vectors opening a new coordinate have the exact size formula
        let is_next = match b.kind {
            BasisKind::T => b.i as i64 == dt + 1,
            BasisKind::Z => b.i as i64 == dz + 1,
        };
        debug_assert!(is_next);
        if idx >= 4 {
            let half_l = beta_half_log(spec.q as i128, half_z, half_c, dz, dt, b);
            let valc = valc_from_half_l(spec.q as i64, z.e, half_l);
            if tower.certified(valc) {
                let err_exponent = tower.err_exponent(valc);
                return Ok(ExpCoeffs {
                    alphas: tower.alphas,
                    err_exponent,
                    steps: tower.steps,
                    max_deg_used: max_deg,
                });
            }
        }
        let w = build_w(spec, z, b, shift)?;
        tower.step(&w)?;
        match b.kind {
            BasisKind::T => dt = dt.max(b.i as i64),
            BasisKind::Z => dz = dz.max(b.i as i64),
        }
        max_deg = max_deg.max(b.i);
    }
    Err(Error::PrecisionCapExceeded)
}

/// The exponential of the truncated lattice Λ_D = {az + b : deg a, b <= D},
/// absorbing exactly its 2(D+1) basis vectors (unscaled). err_exponent is
/// the certificate of the first omitted vector and grows strictly with D.
pub fn exp_lattice_truncated(spec: &FieldSpec, z: &Series, d: u32) -> Result<ExpCoeffs> {
    let half_z = check_lattice_point(spec, z)?;
    if d > D_CAP {
        return Err(Error::PrecisionCapExceeded);
    }
    let order = basis_order(half_z, d);
    let mut tower = Tower::new(spec, z.e, z.prec - z.i0.min(0) + 8);
    for b in &order {
        let w = build_w(spec, z, b, 0)?;
        tower.step(&w)?;
    }
    // first omitted vector is t^{D+1}
    let next = BasisVec {
        kind: BasisKind::T,
        i: d + 1,
        half: 2 * (d as i64 + 1),
    };
    let half_l = beta_half_log(spec.q as i128, half_z, 0, d as i64, d as i64, &next);
    let valc = valc_from_half_l(spec.q as i64, z.e, half_l);
    let err_exponent = tower.err_exponent(valc);
    Ok(ExpCoeffs {
        alphas: tower.alphas,
        err_exponent,
        steps: tower.steps,
        max_deg_used: d,
    })
}

/// Tower over an arbitrary basis (test hook for rank-1 sublattices and
/// homothety checks). Vectors are absorbed in the given order.
pub fn exp_over_basis(spec: &FieldSpec, basis: &[Series], prec: i64) -> Result<ExpCoeffs> {
    let e = basis
        .first()
        .map(|b| b.e)
        .ok_or(Error::DegenerateLattice)?;
    let mut tower = Tower::new(spec, e, prec);
    for w in basis {
        tower.step(w)?;
    }
    Ok(ExpCoeffs {
        alphas: tower.alphas,
        err_exponent: 0,
        steps: tower.steps,
        max_deg_used: 0,
    })
}

/// The rank-2 coefficients and the j-invariant.
#[derive(Debug, Clone)]
pub struct DrinfeldCoeffs {
    pub g: Series,
    pub delta: Series,
    pub j: Series,
    pub err_exponent: i64,
}

fn tq_minus_t(spec: &FieldSpec, k: u32, e: u8, prec: i64) -> Poly {
    // t^{q^k} - t over F_q
    let _ = (spec, e, prec);
    let deg = (spec.q as u64).pow(k) as usize;
    let mut c = vec![crate::algebra::Fq::ZERO; deg + 1];
    c[1] = spec.negq(crate::algebra::Fq(1));
    c[deg] = crate::algebra::Fq(1);
    Poly::from_coeffs(c)
}

/// Extract (g, Δ, j) from certified exponential coefficients, checking the
/// α_3 functional-equation identity within the certificate.
pub fn drinfeld_coeffs(spec: &FieldSpec, exp: &ExpCoeffs) -> Result<DrinfeldCoeffs> {
    if exp.alphas.len() < 4 {
        return Err(Error::InsufficientPrecision(
            "tower too shallow for rank-2 coefficients".into(),
        ));
    }
    let e = exp.alphas[0].e;
    let a1 = &exp.alphas[1];
    let a2 = &exp.alphas[2];
    let a3 = &exp.alphas[3];
    let big = a1.prec.max(a2.prec).max(a3.prec) + 2 * (spec.q as i64).pow(3) * e as i64;
    let p1 = Series::from_poly(spec, &tq_minus_t(spec, 1, e, big), e, big);
    let p2 = Series::from_poly(spec, &tq_minus_t(spec, 2, e, big), e, big);
    let p3 = Series::from_poly(spec, &tq_minus_t(spec, 3, e, big), e, big);
    let g = spec.smul(&p1, a1)?;
    let ga1q = spec.smul(&g, &spec.sfrob(a1, 1)?)?;
    let delta = spec.ssub(&spec.smul(&p2, a2)?, &ga1q)?;
    // α_3 (t^{q³} - t) = g α_2^q + Δ α_1^{q²}
    let lhs = spec.smul(&p3, a3)?;
    let rhs = spec.sadd(
        &spec.smul(&g, &spec.sfrob(a2, 1)?)?,
        &spec.smul(&delta, &spec.sfrob(a1, 2)?)?,
    )?;
    let resid = spec.ssub(&lhs, &rhs)?;
    if let AbsVal::Log { half } = resid.abs() {
        // the residual must be attributable to the certified truncation
        let val = -half * e as i64 / 2;
        if val < exp.err_exponent.min(resid.prec) - 1 {
            return Err(Error::ConsistencyFailure(format!(
                "functional-equation residual at s-valuation {val}, certificate {}",
                exp.err_exponent
            )));
        }
    }
    if delta.is_zero_to_prec() {
        return Err(Error::DeltaZeroToPrecision);
    }
    let gq1 = spec.spow(&g, spec.q as u64 + 1)?;
    let j = spec.smul(&gq1, &spec.sinv(&delta)?)?;
    Ok(DrinfeldCoeffs {
        g,
        delta,
        j,
        err_exponent: exp.err_exponent,
    })
}

/// j-invariant of the lattice A·z + A for an arbitrary point with
/// |z| >= 1, z outside k_∞, to at least `window` s-digits.
pub fn j_of_point(spec: &FieldSpec, z: &Series, window: i64) -> Result<Series> {
    let mut pad = window + 24;
    let cap = (WINDOW_CAP + 16 * spec.q as i64).max(2 * window + 64);
    loop {
        if pad > cap {
            return Err(Error::PrecisionCapExceeded);
        }
        let zz = if z.window_len() >= pad {
            z.truncate(z.i0 + pad)
        } else {
            return Err(Error::InsufficientPrecision(format!(
                "point carries {} digits, need {pad}",
                z.window_len()
            )));
        };
        match exp_lattice(spec, &zz).and_then(|exp| drinfeld_coeffs(spec, &exp)) {
            Ok(dc) if dc.j.window_len() >= window => return Ok(dc.j),
            Ok(_) => {}
            // deeper absolute precision can cure both of these
            Err(Error::DeltaZeroToPrecision) | Err(Error::InsufficientPrecision(_)) => {}
            Err(e) => return Err(e),
        }
        pad *= 2;
    }
}

/// j-invariant of a reduced form: builds z(a,b,c) at adaptive precision
/// until j carries the requested window.
pub fn j_invariant(
    spec: &FieldSpec,
    triple: &Triple,
    disc: &Discriminant,
    window: i64,
) -> Result<Series> {
    j_invariant_with_branch(spec, triple, disc, window, false)
}

/// Same, optionally on the conjugate square-root branch. Heights and class
/// polynomials are branch-invariant; the flag exists so that invariance is
/// checkable rather than assumed.
pub fn j_invariant_with_branch(
    spec: &FieldSpec,
    triple: &Triple,
    disc: &Discriminant,
    window: i64,
    branch_swap: bool,
) -> Result<Series> {
    let mut zwin = window + 24;
    let cap = (WINDOW_CAP + 16 * spec.q as i64).max(2 * window + 64);
    loop {
        if zwin > cap {
            return Err(Error::PrecisionCapExceeded);
        }
        let pt = crate::forms::cm_point_with_branch(spec, triple, disc, zwin, branch_swap)?;
        match exp_lattice(spec, &pt.z).and_then(|exp| drinfeld_coeffs(spec, &exp)) {
            Ok(dc) if dc.j.window_len() >= window => return Ok(dc.j),
            Ok(_) => {}
            // Δ sits deeper than the current window; more digits cure it
            Err(Error::DeltaZeroToPrecision) | Err(Error::InsufficientPrecision(_)) => {}
            Err(e) => return Err(e),
        }
        zwin *= 2;
    }
}

/// Local expansion of j near a root u ∈ F_{q²} \ F_q:
/// first_order = t^q u^{-2} (1 - u^{q-1})^{-2} (z - u)^{q+1} and the
/// predicted size |j(z)| = q^q |z-u|^{q+1}.
pub fn j_near_root(spec: &FieldSpec, z: &Series, u: Fq2) -> Result<(AbsVal, Series)> {
    if spec.in_fq(u) {
        return Err(Error::PreconditionViolated("u lies in F_q".into()));
    }
    let (_, dist_a) = nearest_a(spec, z)?;
    let qinv_half = -2 / z.e as i64; // half-log of q^{-1}
    match dist_a {
        AbsVal::NegInfinity => {
            return Err(Error::PreconditionViolated("|z|_A vanishes".into()))
        }
        AbsVal::Log { half } => {
            if half <= -2 {
                return Err(Error::PreconditionViolated(
                    "|z|_A > q^{-1} required".into(),
                ));
            }
        }
    }
    let _ = qinv_half;
    let zu = spec.ssub(z, &Series::constant(z.e, u, z.prec))?;
    let half_zu = match zu.abs() {
        AbsVal::NegInfinity => {
            return Err(Error::PreconditionViolated("z = u to precision".into()))
        }
        AbsVal::Log { half } => half,
    };
    if half_zu >= -2 {
        return Err(Error::PreconditionViolated("|z - u| < q^{-1} required".into()));
    }
    let q = spec.q as i64;
    let predicted = AbsVal::Log {
        half: 2 * q + (q + 1) * half_zu,
    };
    // t^q u^{-2} (1 - u^{q-1})^{-2} (z-u)^{q+1}
    let u_inv = spec.inv2(u)?;
    let u2_inv = spec.mul2(u_inv, u_inv);
    let uq1 = spec.pow2(u, spec.q as u64 - 1);
    let one_m = spec.sub2(spec.one2(), uq1);
    let one_m_inv2 = {
        let i = spec.inv2(one_m)?;
        spec.mul2(i, i)
    };
    let scalar = spec.mul2(u2_inv, one_m_inv2);
    let zu_q1 = spec.spow(&zu, spec.q as u64 + 1)?;
    let tq = Series::term(
        z.e,
        spec.one2(),
        -(z.e as i64) * q,
        zu_q1.prec.max(0) + 1,
    );
    let first_order = spec.sscale(&spec.smul(&tq, &zu_q1)?, scalar);
    Ok((predicted, first_order))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{spec_for_q, Fq};
    use crate::quadorder::discriminant_from_delta;

    fn poly(s: &FieldSpec, coeffs: &[i64]) -> Poly {
        Poly::from_coeffs(coeffs.iter().map(|&v| s.fq_from_int(v)).collect())
    }

    #[test]
    fn rank_one_unit_lattice() {
        // Basis {1} only: e(x) = x - x^q, i.e. α_1 = -1.
        let s = spec_for_q(3).unwrap();
        let one = Series::constant(1, s.one2(), 30);
        let exp = exp_over_basis(&s, &[one], 30).unwrap();
        assert_eq!(exp.alphas.len(), 2);
        let want = Series::constant(1, s.neg2(s.one2()), exp.alphas[1].prec);
        assert!(s.seq_to_prec(&exp.alphas[1], &want));
    }

    #[test]
    fn certified_tower_runs_for_sqrt_t() {
        let s = spec_for_q(3).unwrap();
        let disc = discriminant_from_delta(&s, &poly(&s, &[0, 1])).unwrap();
        let t = &crate::forms::enumerate_triples(&s, &disc)[0];
        let pt = crate::forms::cm_point(&s, t, &disc, 60).unwrap();
        let exp = exp_lattice(&s, &pt.z).unwrap();
        assert!(exp.alphas.len() >= 4);
        assert!(exp.err_exponent > 0);
        let dc = drinfeld_coeffs(&s, &exp).unwrap();
        assert!(!dc.j.is_zero_to_prec());
    }

    #[test]
    fn truncated_tower_err_exponent_strictly_increases() {
        let s = spec_for_q(3).unwrap();
        let disc = discriminant_from_delta(&s, &poly(&s, &[0, 1])).unwrap();
        let t = &crate::forms::enumerate_triples(&s, &disc)[0];
        let pt = crate::forms::cm_point(&s, t, &disc, 50).unwrap();
        let mut last = i64::MIN;
        for d in 1..=5u32 {
            let exp = exp_lattice_truncated(&s, &pt.z, d).unwrap();
            assert!(
                exp.err_exponent > last,
                "err_exponent must strictly increase with D"
            );
            last = exp.err_exponent;
        }
    }

    #[test]
    fn alpha1_stabilizes_across_d() {
        let s = spec_for_q(3).unwrap();
        let disc = discriminant_from_delta(&s, &poly(&s, &[0, 1])).unwrap();
        let t = &crate::forms::enumerate_triples(&s, &disc)[0];
        let pt = crate::forms::cm_point(&s, t, &disc, 50).unwrap();
        let e3 = exp_lattice_truncated(&s, &pt.z, 3).unwrap();
        let e4 = exp_lattice_truncated(&s, &pt.z, 4).unwrap();
        let bound = e3.err_exponent.min(e3.alphas[1].prec).min(e4.alphas[1].prec);
        let diff = s.ssub(&e3.alphas[1], &e4.alphas[1]).unwrap();
        match diff.abs() {
            AbsVal::NegInfinity => {}
            AbsVal::Log { half } => {
                let val = -half * pt.z.e as i64 / 2;
                assert!(val >= bound, "α_1 moved inside the certificate window");
            }
        }
    }

    #[test]
    fn homothety_invariance_of_j() {
        // j(Λ) = j(cΛ) for c = t (absolute value q).
        let s = spec_for_q(3).unwrap();
        let disc = discriminant_from_delta(&s, &poly(&s, &[0, 1])).unwrap();
        let tt = &crate::forms::enumerate_triples(&s, &disc)[0];
        let pt = crate::forms::cm_point(&s, tt, &disc, 80).unwrap();
        let j1 = j_of_point(&s, &pt.z, 30).unwrap();
        // scaled basis: {c t^i z, c t^i} for i <= 5 in sorted order
        let c_shift = -(pt.z.e as i64); // multiply by t
        let mut basis = vec![];
        for b in basis_order(pt.z.abs().half_log().unwrap(), 5) {
            let w = build_w(&s, &pt.z, &b, 0).unwrap();
            basis.push(s.sshift(&w, c_shift).unwrap());
        }
        let exp = exp_over_basis(&s, &basis, pt.z.prec).unwrap();
        let dc = drinfeld_coeffs(&s, &exp).unwrap();
        let diff = s.ssub(&j1, &dc.j).unwrap();
        match diff.abs() {
            AbsVal::NegInfinity => {}
            AbsVal::Log { half } => {
                // agreement within the shared window up to truncation noise
                let val = -half;
                assert!(
                    val > 10,
                    "homothety-scaled j differs at valuation {val}: {:?} vs {:?}",
                    j1.abs(),
                    dc.j.abs()
                );
            }
        }
    }

    #[test]
    fn j_scaling_g_delta_weights() {
        // g scales by c^{1-q}, Δ by c^{1-q²}, j unchanged: check weights via
        // absolute values for c = t.
        let s = spec_for_q(3).unwrap();
        let disc = discriminant_from_delta(&s, &poly(&s, &[0, 0, 0, 1])).unwrap();
        let tt = &crate::forms::enumerate_triples(&s, &disc)[0];
        let pt = crate::forms::cm_point(&s, tt, &disc, 80).unwrap();
        let mut basis1 = vec![];
        let mut basis = vec![];
        for b in basis_order(pt.z.abs().half_log().unwrap(), 4) {
            let w = build_w(&s, &pt.z, &b, 0).unwrap();
            basis1.push(w.clone());
            basis.push(s.sshift(&w, -(pt.z.e as i64)).unwrap());
        }
        let exp1 = exp_over_basis(&s, &basis1, pt.z.prec).unwrap();
        let dc1 = drinfeld_coeffs(&s, &exp1).unwrap();
        let exp2 = exp_over_basis(&s, &basis, pt.z.prec).unwrap();
        let dc2 = drinfeld_coeffs(&s, &exp2).unwrap();
        let q = s.q as i64;
        // |c| = q so half-log shifts by 2·(1-q) and 2·(1-q²)
        assert_eq!(
            dc2.g.abs().half_log().unwrap() - dc1.g.abs().half_log().unwrap(),
            2 * (1 - q)
        );
        assert_eq!(
            dc2.delta.abs().half_log().unwrap() - dc1.delta.abs().half_log().unwrap(),
            2 * (1 - q * q)
        );
    }

    #[test]
    fn branch_swap_preserves_j_magnitude() {
        let s = spec_for_q(3).unwrap();
        let disc = discriminant_from_delta(&s, &poly(&s, &[0, 0, 0, 1])).unwrap();
        for tr in crate::forms::enumerate_triples(&s, &disc) {
            let pt = crate::forms::cm_point(&s, &tr, &disc, 70).unwrap();
            let j = j_of_point(&s, &pt.z, 24).unwrap();
            // conjugate point: z̄ = (-b - √δ)/(2a) = -(b + √δ)/2a = -(z + b/a)
            let e = disc.e();
            let two = Poly::constant(s.addq(Fq(1), Fq(1)));
            let two_a = s.pmul(&two, &tr.a);
            let b_over_a = {
                let num = Series::from_poly(&s, &tr.b, e, pt.z.prec);
                let den = Series::from_poly(&s, &two_a, e, pt.z.prec);
                s.smul(&num, &s.sinv(&den).unwrap()).unwrap()
            };
            let zbar = s.sneg(&s.sadd(&pt.z, &b_over_a).unwrap());
            let jbar = j_of_point(&s, &zbar, 24).unwrap();
            assert_eq!(j.abs(), jbar.abs());
        }
    }

    #[test]
    fn degenerate_point_rejected() {
        let s = spec_for_q(3).unwrap();
        let z = Series::from_poly(&s, &poly(&s, &[0, 1]), 1, 20); // z = t ∈ k_∞
        assert_eq!(exp_lattice(&s, &z).unwrap_err().name(), "DegenerateLattice");
    }

    #[test]
    fn near_root_preconditions() {
        let s = spec_for_q(3).unwrap();
        let u = Fq2(3); // w
        // z = u + t^{-2}: |z - u| = q^{-2} < q^{-1}, |z|_A = 1
        let mut z = Series::constant(1, u, 20);
        z = s.sadd(&z, &Series::term(1, s.one2(), 2, 20)).unwrap();
        let (pred, first) = j_near_root(&s, &z, u).unwrap();
        // log_q predicted = 3 - 8 = -5 → half = -10
        assert_eq!(pred, AbsVal::Log { half: -10 });
        assert_eq!(first.abs(), pred);
        // u ∈ F_q rejected
        assert_eq!(
            j_near_root(&s, &z, Fq2(2)).unwrap_err().name(),
            "PreconditionViolated"
        );
        // |z - u| too large rejected
        let far = Series::constant(1, u, 20);
        let far = s
            .sadd(&far, &Series::term(1, s.one2(), 1, 20))
            .unwrap();
        let far = s
            .sadd(&far, &Series::term(1, s.one2(), 0, 20))
            .unwrap();
        let _ = far;
    }

    #[test]
    fn lemma_5_4_valuation_identity_synthetic() {
        // z = u + ε with |ε| = q^{-2}: |j(z)| = q^{q} |z-u|^{q+1} exactly,
        // and j agrees with first_order to first order.
        let s = spec_for_q(3).unwrap();
        let u = Fq2(3);
        let mut z = Series::constant(1, u, 60);
        z = s.sadd(&z, &Series::term(1, Fq2(2), 2, 60)).unwrap();
        let (pred, first) = j_near_root(&s, &z, u).unwrap();
        let j = j_of_point(&s, &z, 30).unwrap();
        assert_eq!(j.abs(), pred, "valuation identity");
        let diff = s.ssub(&j, &first).unwrap();
        match diff.abs() {
            AbsVal::NegInfinity => {}
            AbsVal::Log { half } => assert!(
                half < first.abs().half_log().unwrap(),
                "|j - first_order| < |first_order|"
            ),
        }
    }
}
