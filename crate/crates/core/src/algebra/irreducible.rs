//! Monic irreducible enumeration, counting, and factorization over F_q[t].
//!
//! Everything here is sized for polynomials of single-digit degree, so
//! factoring is trial division against the enumerated irreducibles.

use super::field::{FieldSpec, Fq};
use super::poly::Poly;
use crate::error::{Error, Result};

/// Iterate all polynomials of exact degree d with the given leading
/// coefficient choices (monic when `leads == [Fq(1)]`).
pub fn polys_of_degree<'a>(
    spec: &'a FieldSpec,
    d: usize,
    leads: &'a [Fq],
) -> impl Iterator<Item = Poly> + 'a {
    let q = spec.q as u64;
    let tails = q.pow(d as u32);
    leads.iter().flat_map(move |&lc| {
        (0..tails).map(move |code| {
            let mut c = Vec::with_capacity(d + 1);
            let mut v = code;
            for _ in 0..d {
                c.push(Fq((v % q) as u16));
                v /= q;
            }
            c.push(lc);
            Poly { c }
        })
    })
}

/// All monic polynomials of degree exactly d.
pub fn monic_of_degree<'a>(spec: &'a FieldSpec, d: usize) -> impl Iterator<Item = Poly> + 'a {
    static ONE: [Fq; 1] = [Fq(1)];
    polys_of_degree(spec, d, &ONE)
}

fn mobius(n: u64) -> i64 {
    let mut n = n;
    let mut count = 0u32;
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            n /= d;
            if n % d == 0 {
                return 0;
            }
            count += 1;
        }
        d += 1;
    }
    if n > 1 {
        count += 1;
    }
    if count % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Number of monic irreducibles of degree i: (1/i) Σ_{d|i} μ(d) q^{i/d}.
pub fn count_irreducibles(spec: &FieldSpec, i: u32) -> u64 {
    assert!(i >= 1);
    let q = spec.q as i128;
    let mut sum: i128 = 0;
    for d in 1..=i {
        if i % d == 0 {
            sum += mobius(d as u64) as i128 * q.pow(i / d);
        }
    }
    (sum / i as i128) as u64
}

impl FieldSpec {
    /// Irreducibility by trial division against monic polynomials of degree
    /// at most deg f / 2.
    pub fn is_irreducible(&self, f: &Poly) -> bool {
        match f.deg() {
            None | Some(0) => false,
            Some(1) => true,
            Some(d) => {
                for dd in 1..=(d / 2) as usize {
                    for g in monic_of_degree(self, dd) {
                        if self.prem(f, &g).unwrap().is_zero() {
                            return false;
                        }
                    }
                }
                true
            }
        }
    }

    /// All monic irreducibles of degree <= max_deg, ordered by (degree, tail
    /// code ascending).
    pub fn monic_irreducibles(&self, max_deg: u32) -> Vec<Poly> {
        let mut out = vec![];
        for d in 1..=max_deg as usize {
            for f in monic_of_degree(self, d) {
                if self.is_irreducible(&f) {
                    out.push(f);
                }
            }
        }
        out
    }

    /// Factor into monic irreducibles with multiplicity, plus the unit:
    /// f = unit * Π v_i^{e_i}.
    pub fn factor(&self, f: &Poly) -> Result<(Fq, Vec<(Poly, u32)>)> {
        if f.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let unit = f.lead();
        let mut rest = self.monic(f);
        let mut out: Vec<(Poly, u32)> = vec![];
        let mut d = 1usize;
        while rest.deg().unwrap() > 0 {
            let rd = rest.deg().unwrap();
            if (d as i64) > rd / 2 {
                // what remains is irreducible
                out.push((rest.clone(), 1));
                break;
            }
            let mut advanced = true;
            while advanced {
                advanced = false;
                for v in monic_of_degree(self, d) {
                    if !self.is_irreducible(&v) {
                        continue;
                    }
                    let mut e = 0u32;
                    loop {
                        let (q, r) = self.pdivrem(&rest, &v)?;
                        if r.is_zero() {
                            rest = q;
                            e += 1;
                        } else {
                            break;
                        }
                    }
                    if e > 0 {
                        out.push((v, e));
                        if rest.deg() == Some(0) {
                            return Ok((unit, out));
                        }
                    }
                }
            }
            d += 1;
        }
        Ok((unit, out))
    }

    /// Squarefree decomposition f = g² · d0 with d0 squarefree; g monic, the
    /// unit carried by d0.
    pub fn squarefree_decompose(&self, f: &Poly) -> Result<(Poly, Poly)> {
        if f.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let (_, factors) = self.factor(f)?;
        let mut g = Poly::one();
        for (v, e) in &factors {
            for _ in 0..(e / 2) {
                g = self.pmul(&g, v);
            }
        }
        let g2 = self.pmul(&g, &g);
        let (d0, r) = self.pdivrem(f, &g2)?;
        debug_assert!(r.is_zero());
        Ok((d0, g))
    }

    /// True when f has no repeated irreducible factor.
    pub fn is_squarefree(&self, f: &Poly) -> bool {
        if f.is_zero() {
            return false;
        }
        if f.deg() == Some(0) {
            return true;
        }
        // gcd(f, f') = 1; in characteristic p a vanishing derivative means a
        // p-th power, which the gcd (= f) also catches for deg > 0.
        self.pgcd(f, &self.pderiv(f)).is_one()
    }

    /// Multiplicity of the irreducible v in f.
    pub fn multiplicity(&self, v: &Poly, f: &Poly) -> Result<u32> {
        if f.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let mut e = 0;
        let mut rest = f.clone();
        loop {
            let (q, r) = self.pdivrem(&rest, v)?;
            if r.is_zero() {
                e += 1;
                rest = q;
            } else {
                return Ok(e);
            }
        }
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
    fn irreducible_counts_q3() {
        let s = spec_for_q(3).unwrap();
        assert_eq!(count_irreducibles(&s, 1), 3);
        assert_eq!(count_irreducibles(&s, 2), 3);
        assert_eq!(count_irreducibles(&s, 3), 8);
    }

    #[test]
    fn enumeration_matches_count_small_grid() {
        for q in [3u32, 5, 7, 9] {
            let s = spec_for_q(q).unwrap();
            let max = if q <= 5 { 6 } else { 4 };
            let list = s.monic_irreducibles(max);
            for i in 1..=max {
                let found = list
                    .iter()
                    .filter(|f| f.deg() == Some(i as i64))
                    .count() as u64;
                assert_eq!(found, count_irreducibles(&s, i), "q={q} deg={i}");
            }
        }
    }

    #[test]
    fn factor_examples() {
        let s3 = spec_for_q(3).unwrap();
        let t = poly(&s3, &[0, 1]);
        let t3 = poly(&s3, &[0, 0, 0, 1]);
        let (u, f) = s3.factor(&t3).unwrap();
        assert_eq!(u, Fq(1));
        assert_eq!(f, vec![(t.clone(), 3)]);
        let (d0, g) = s3.squarefree_decompose(&t3).unwrap();
        assert_eq!(d0, t);
        assert_eq!(g, t);

        // t^2 + 1 irreducible over F_3 (no root, degree 2)
        let f = poly(&s3, &[1, 0, 1]);
        assert!(s3.is_irreducible(&f));
        let (_, fs) = s3.factor(&f).unwrap();
        assert_eq!(fs, vec![(f.clone(), 1)]);

        // t^2 - 1 = (t-1)(t+1) over F_7
        let s7 = spec_for_q(7).unwrap();
        let f = poly(&s7, &[-1, 0, 1]);
        let (_, fs) = s7.factor(&f).unwrap();
        let tm1 = poly(&s7, &[-1, 1]);
        let tp1 = poly(&s7, &[1, 1]);
        assert!(fs.contains(&(tm1, 1)) && fs.contains(&(tp1, 1)));
        assert_eq!(fs.len(), 2);
    }

    #[test]
    fn factor_multiplicative_reexpansion() {
        let s = spec_for_q(5).unwrap();
        let mut rng = 12345u64;
        let mut next = || {
            rng = rng.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (rng >> 33) as i64
        };
        for _ in 0..50 {
            let d = (next().unsigned_abs() % 6 + 1) as usize;
            let mut coeffs: Vec<i64> = (0..d).map(|_| next() % 5).collect();
            coeffs.push(1 + next().rem_euclid(4));
            let f = poly(&s, &coeffs);
            let (u, fs) = s.factor(&f).unwrap();
            let mut prod = Poly::constant(u);
            for (v, e) in fs {
                prod = s.pmul(&prod, &s.ppow(&v, e));
            }
            assert_eq!(prod, f);
        }
    }

    #[test]
    fn zero_rejected() {
        let s = spec_for_q(3).unwrap();
        assert_eq!(s.factor(&Poly::zero()).unwrap_err().name(), "ZeroPolynomial");
    }

    #[test]
    fn squarefree_detection() {
        let s = spec_for_q(3).unwrap();
        assert!(s.is_squarefree(&poly(&s, &[0, 1])));
        assert!(!s.is_squarefree(&poly(&s, &[0, 0, 1])));
        // t^3 = t^3: perfect cube, derivative vanishes
        assert!(!s.is_squarefree(&poly(&s, &[0, 0, 0, 1])));
        assert!(s.is_squarefree(&poly(&s, &[2])));
    }
}
