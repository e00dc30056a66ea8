//! The coefficient field tower F_p ⊂ F_q ⊂ F_{q²}.
//!
//! F_q = F_p[x]/(m_q) and F_{q²} = F_q[w]/(m_q2), both moduli supplied
//! explicitly so results are reproducible for prime powers q. Elements are
//! stored as packed indices; a [`FieldSpec`] owns log/exp and companion
//! tables so all arithmetic is table lookups.

use crate::error::{Error, Result};

/// An element of F_q, stored as the index `sum d_i p^i` of its coordinate
/// vector (d_0, ..., d_{n-1}) over F_p.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Fq(pub u16);

/// An element of F_{q²}, stored as `c0 + c1*q` for coordinates c0 + c1*w
/// over F_q.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Fq2(pub u16);

impl Fq {
    pub const ZERO: Fq = Fq(0);
    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl Fq2 {
    pub const ZERO: Fq2 = Fq2(0);
    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// The validated field tower with all operation tables.
///
/// Immutable after construction; shared by reference everywhere.
pub struct FieldSpec {
    pub p: u32,
    pub n: u32,
    pub q: u32,
    pub q2: u32,
    /// Modulus defining F_q over F_p, constant term first, length n+1.
    pub modulus_q: Vec<u32>,
    /// Modulus defining F_{q²} over F_q, constant term first, length 3.
    pub modulus_q2: Vec<Fq>,
    // F_{q²} tables, indexed by packed element index.
    add: Vec<u16>,  // q2 * q2
    neg: Vec<u16>,  // q2
    log: Vec<u32>,  // q2 (log[0] unused)
    exp: Vec<u16>,  // 2*(q2-1)
    frob: Vec<u16>, // q2: x -> x^q
    sqrt: Vec<u16>, // q2: canonical root index + 1, or 0 if non-square
    lexkey: Vec<u32>,
    is_square_q: Vec<bool>, // q
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Plain F_p[x] helpers used only during construction.
mod fp {
    pub fn trim(v: &mut Vec<u32>) {
        while v.last() == Some(&0) {
            v.pop();
        }
    }

    pub fn mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut out = vec![0u32; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x * y) % p;
            }
        }
        trim(&mut out);
        out
    }

    pub fn rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        let mut r: Vec<u32> = a.to_vec();
        trim(&mut r);
        let dm = m.len() - 1;
        let lead_inv = inv_mod(m[dm], p);
        while r.len() > dm {
            let dr = r.len() - 1;
            let f = r[dr] * lead_inv % p;
            for i in 0..=dm {
                let idx = dr - dm + i;
                r[idx] = (r[idx] + p - f * m[i] % p) % p;
            }
            trim(&mut r);
            if r.is_empty() {
                break;
            }
        }
        r
    }

    pub fn inv_mod(a: u32, p: u32) -> u32 {
        // p is tiny; exhaustive.
        (1..p).find(|&x| a * x % p == 1).expect("unit in F_p")
    }

    /// Trial division against every monic polynomial of degree <= deg/2.
    pub fn is_irreducible(m: &[u32], p: u32) -> bool {
        let d = m.len() - 1;
        if d == 0 {
            return false;
        }
        if d == 1 {
            return true;
        }
        for dd in 1..=(d / 2) {
            // all monic polynomials of degree dd
            let count = p.pow(dd as u32);
            for code in 0..count {
                let mut g = Vec::with_capacity(dd + 1);
                let mut c = code;
                for _ in 0..dd {
                    g.push(c % p);
                    c /= p;
                }
                g.push(1);
                if rem(m, &g, p).is_empty() {
                    return false;
                }
            }
        }
        true
    }
}

impl FieldSpec {
    /// Build and validate the tower. `modulus_q` is over F_p (constant term
    /// first, degree n); `modulus_q2` is over F_q (degree 2). For n = 1 the
    /// conventional modulus is `x`, i.e. F_q = F_p.
    pub fn new(p: u32, n: u32, modulus_q: Vec<u32>, modulus_q2: Vec<Fq>) -> Result<FieldSpec> {
        if !is_prime(p) || p == 2 {
            return Err(Error::CompositeP(p));
        }
        if n == 0 {
            return Err(Error::ReducibleModulus("extension degree must be >= 1".into()));
        }
        if modulus_q.len() != n as usize + 1 || modulus_q[n as usize] == 0 {
            return Err(Error::ReducibleModulus(format!(
                "modulus_q must have degree {n}"
            )));
        }
        if modulus_q.iter().any(|&c| c >= p) {
            return Err(Error::ReducibleModulus("modulus_q coefficient out of range".into()));
        }
        if n > 1 && !fp::is_irreducible(&modulus_q, p) {
            return Err(Error::ReducibleModulus("modulus_q splits over F_p".into()));
        }
        let q = p.pow(n);
        if q < 3 {
            return Err(Error::CompositeP(p));
        }
        let q2 = q * q;
        if q2 > u16::MAX as u32 {
            return Err(Error::ReducibleModulus(format!("q = {q} too large")));
        }

        let mut spec = FieldSpec {
            p,
            n,
            q,
            q2,
            modulus_q,
            modulus_q2: modulus_q2.clone(),
            add: vec![],
            neg: vec![],
            log: vec![],
            exp: vec![],
            frob: vec![],
            sqrt: vec![],
            lexkey: vec![],
            is_square_q: vec![],
        };

        if modulus_q2.len() != 3 || modulus_q2[2].is_zero() {
            return Err(Error::ReducibleModulus("modulus_q2 must have degree 2".into()));
        }
        if modulus_q2.iter().any(|c| c.0 >= q as u16) {
            return Err(Error::ReducibleModulus("modulus_q2 coefficient out of range".into()));
        }

        spec.build_tables()?;
        Ok(spec)
    }

    /// Raw F_q multiplication through the F_p[x] representation (used while
    /// the tables are being built).
    fn mul_q_raw(&self, a: u16, b: u16) -> u16 {
        let to_poly = |mut v: u16| {
            let mut out = vec![];
            while v > 0 {
                out.push((v % self.p as u16) as u32);
                v /= self.p as u16;
            }
            out
        };
        let pa = to_poly(a);
        let pb = to_poly(b);
        let prod = fp::mul(&pa, &pb, self.p);
        let red = fp::rem(&prod, &self.modulus_q, self.p);
        let mut idx = 0u32;
        for (i, &c) in red.iter().enumerate() {
            idx += c * self.p.pow(i as u32);
        }
        idx as u16
    }

    fn add_q_raw(&self, a: u16, b: u16) -> u16 {
        let p = self.p as u16;
        let mut out = 0u16;
        let (mut a, mut b) = (a, b);
        let mut mult = 1u16;
        for _ in 0..self.n {
            out += (a % p + b % p) % p * mult;
            a /= p;
            b /= p;
            mult *= p;
        }
        out
    }

    fn build_tables(&mut self) -> Result<()> {
        let q = self.q as usize;
        let q2 = self.q2 as usize;

        // Check modulus_q2 irreducibility over F_q: no root among q elements.
        let m2 = self.modulus_q2.clone();
        for r in 0..q as u16 {
            let r2 = self.mul_q_raw(r, r);
            let mut val = self.mul_q_raw(m2[2].0, r2);
            val = self.add_q_raw(val, self.mul_q_raw(m2[1].0, r));
            val = self.add_q_raw(val, m2[0].0);
            if val == 0 {
                return Err(Error::ReducibleModulus(format!(
                    "modulus_q2 has a root in F_{q}"
                )));
            }
        }

        // Normalize modulus_q2 to monic: w^2 = -(m1*w + m0)/m2.
        let m2_inv = (1..q as u16)
            .find(|&x| self.mul_q_raw(m2[2].0, x) == 1)
            .expect("leading coefficient invertible");
        let neg_q = |spec: &FieldSpec, a: u16| -> u16 {
            // -a in F_q: digitwise p-complement
            let p = spec.p as u16;
            let mut out = 0u16;
            let mut a = a;
            let mut mult = 1u16;
            for _ in 0..spec.n {
                let d = a % p;
                out += if d == 0 { 0 } else { p - d } * mult;
                a /= p;
                mult *= p;
            }
            out
        };
        let w2_c0 = neg_q(self, self.mul_q_raw(m2[0].0, m2_inv));
        let w2_c1 = neg_q(self, self.mul_q_raw(m2[1].0, m2_inv));

        // F_{q²} multiplication in coordinates, used to seed log/exp.
        let mul2_raw = |spec: &FieldSpec, a: u16, b: u16| -> u16 {
            let (a0, a1) = (a % spec.q as u16, a / spec.q as u16);
            let (b0, b1) = (b % spec.q as u16, b / spec.q as u16);
            let t0 = spec.mul_q_raw(a0, b0);
            let t1 = spec.add_q_raw(spec.mul_q_raw(a0, b1), spec.mul_q_raw(a1, b0));
            let t2 = spec.mul_q_raw(a1, b1);
            // t2 * w^2 = t2*(w2_c1*w + w2_c0)
            let c0 = spec.add_q_raw(t0, spec.mul_q_raw(t2, w2_c0));
            let c1 = spec.add_q_raw(t1, spec.mul_q_raw(t2, w2_c1));
            c0 + c1 * spec.q as u16
        };

        // Find a generator of F_{q²}^× and fill log/exp.
        let order = (q2 - 1) as u64;
        let mut factors = vec![];
        let mut m = order;
        let mut d = 2u64;
        while d * d <= m {
            if m % d == 0 {
                factors.push(d);
                while m % d == 0 {
                    m /= d;
                }
            }
            d += 1;
        }
        if m > 1 {
            factors.push(m);
        }
        let pow2 = |spec: &FieldSpec, base: u16, mut e: u64| -> u16 {
            let mut acc = 1u16;
            let mut b = base;
            while e > 0 {
                if e & 1 == 1 {
                    acc = mul2_raw(spec, acc, b);
                }
                b = mul2_raw(spec, b, b);
                e >>= 1;
            }
            acc
        };
        let mut gen = 0u16;
        for cand in 2..q2 as u16 {
            if factors.iter().all(|&f| pow2(self, cand, order / f) != 1) {
                gen = cand;
                break;
            }
        }
        assert!(gen != 0, "F_q2 multiplicative group has a generator");

        let mut log = vec![0u32; q2];
        let mut exp = vec![0u16; 2 * (q2 - 1)];
        let mut cur = 1u16;
        for i in 0..(q2 - 1) {
            exp[i] = cur;
            exp[i + (q2 - 1)] = cur;
            log[cur as usize] = i as u32;
            cur = mul2_raw(self, cur, gen);
        }
        assert_eq!(cur, 1, "generator order divides q^2 - 1");

        // Addition table.
        let mut add = vec![0u16; q2 * q2];
        for a in 0..q2 as u16 {
            let (a0, a1) = (a % q as u16, a / q as u16);
            for b in 0..q2 as u16 {
                let (b0, b1) = (b % q as u16, b / q as u16);
                add[a as usize * q2 + b as usize] =
                    self.add_q_raw(a0, b0) + self.add_q_raw(a1, b1) * q as u16;
            }
        }
        let mut neg = vec![0u16; q2];
        for a in 0..q2 as u16 {
            let (a0, a1) = (a % q as u16, a / q as u16);
            neg[a as usize] = neg_q(self, a0) + neg_q(self, a1) * q as u16;
        }

        // Frobenius x -> x^q.
        let mut frob = vec![0u16; q2];
        for a in 0..q2 as u16 {
            frob[a as usize] = pow2(self, a, self.q as u64);
        }

        // Lexicographic key on the F_p coordinate vector in tower-basis order
        // (1, x, ..., x^{n-1}, w, xw, ...).
        let mut lexkey = vec![0u32; q2];
        for a in 0..q2 as u16 {
            let (mut a0, mut a1) = (a % q as u16, a / q as u16);
            let mut key = 0u32;
            for _ in 0..self.n {
                key = key * self.p + (a0 % self.p as u16) as u32;
                a0 /= self.p as u16;
            }
            for _ in 0..self.n {
                key = key * self.p + (a1 % self.p as u16) as u32;
                a1 /= self.p as u16;
            }
            lexkey[a as usize] = key;
        }

        // Canonical square roots: for each square s, the root with the
        // lexicographically smaller coordinate key.
        let mut sqrt = vec![0u16; q2];
        for r in 0..q2 as u16 {
            let s = mul2_raw(self, r, r) as usize;
            let prev = sqrt[s];
            if prev == 0 || lexkey[r as usize] < lexkey[(prev - 1) as usize] {
                sqrt[s] = r + 1;
            }
        }

        let mut is_square_q = vec![false; q];
        for r in 0..q as u16 {
            is_square_q[self.mul_q_raw(r, r) as usize] = true;
        }

        self.add = add;
        self.neg = neg;
        self.log = log;
        self.exp = exp;
        self.frob = frob;
        self.sqrt = sqrt;
        self.lexkey = lexkey;
        self.is_square_q = is_square_q;
        Ok(())
    }

    // ---- F_{q²} operations ----

    #[inline]
    pub fn add2(&self, a: Fq2, b: Fq2) -> Fq2 {
        Fq2(self.add[a.0 as usize * self.q2 as usize + b.0 as usize])
    }

    #[inline]
    pub fn neg2(&self, a: Fq2) -> Fq2 {
        Fq2(self.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub2(&self, a: Fq2, b: Fq2) -> Fq2 {
        self.add2(a, self.neg2(b))
    }

    #[inline]
    pub fn mul2(&self, a: Fq2, b: Fq2) -> Fq2 {
        if a.0 == 0 || b.0 == 0 {
            return Fq2::ZERO;
        }
        Fq2(self.exp[(self.log[a.0 as usize] + self.log[b.0 as usize]) as usize])
    }

    #[inline]
    pub fn inv2(&self, a: Fq2) -> Result<Fq2> {
        if a.0 == 0 {
            return Err(Error::ZeroArgument);
        }
        let l = self.log[a.0 as usize];
        Ok(Fq2(self.exp[(self.q2 - 1 - l) as usize % (self.q2 - 1) as usize]))
    }

    /// x^q, the Frobenius over F_q (the nontrivial automorphism of F_{q²}).
    #[inline]
    pub fn frob2(&self, a: Fq2) -> Fq2 {
        Fq2(self.frob[a.0 as usize])
    }

    pub fn pow2(&self, a: Fq2, e: u64) -> Fq2 {
        if a.0 == 0 {
            return if e == 0 { self.one2() } else { Fq2::ZERO };
        }
        let l = self.log[a.0 as usize] as u64;
        let m = (self.q2 - 1) as u64;
        Fq2(self.exp[((l % m) * (e % m) % m) as usize])
    }

    #[inline]
    pub fn one2(&self) -> Fq2 {
        Fq2(1)
    }

    /// Canonical square root in F_{q²}, if one exists.
    #[inline]
    pub fn sqrt2(&self, a: Fq2) -> Option<Fq2> {
        if a.0 == 0 {
            return Some(Fq2::ZERO);
        }
        let r = self.sqrt[a.0 as usize];
        if r == 0 {
            None
        } else {
            Some(Fq2(r - 1))
        }
    }

    #[inline]
    pub fn lexkey2(&self, a: Fq2) -> u32 {
        self.lexkey[a.0 as usize]
    }

    /// Coordinates of a over the basis {1, w} of F_{q²}/F_q.
    #[inline]
    pub fn split2(&self, a: Fq2) -> (Fq, Fq) {
        (Fq(a.0 % self.q as u16), Fq(a.0 / self.q as u16))
    }

    #[inline]
    pub fn join2(&self, c0: Fq, c1: Fq) -> Fq2 {
        Fq2(c0.0 + c1.0 * self.q as u16)
    }

    /// True when a lies in the subfield F_q.
    #[inline]
    pub fn in_fq(&self, a: Fq2) -> bool {
        a.0 < self.q as u16
    }

    // ---- F_q operations (indices < q are closed under these) ----

    #[inline]
    pub fn embed(&self, a: Fq) -> Fq2 {
        Fq2(a.0)
    }

    /// The F_q part of an element known to lie in F_q.
    #[inline]
    pub fn restrict(&self, a: Fq2) -> Option<Fq> {
        if self.in_fq(a) {
            Some(Fq(a.0))
        } else {
            None
        }
    }

    #[inline]
    pub fn addq(&self, a: Fq, b: Fq) -> Fq {
        Fq(self.add2(Fq2(a.0), Fq2(b.0)).0)
    }

    #[inline]
    pub fn negq(&self, a: Fq) -> Fq {
        Fq(self.neg[a.0 as usize])
    }

    #[inline]
    pub fn subq(&self, a: Fq, b: Fq) -> Fq {
        self.addq(a, self.negq(b))
    }

    #[inline]
    pub fn mulq(&self, a: Fq, b: Fq) -> Fq {
        Fq(self.mul2(Fq2(a.0), Fq2(b.0)).0)
    }

    #[inline]
    pub fn invq(&self, a: Fq) -> Result<Fq> {
        Ok(Fq(self.inv2(Fq2(a.0))?.0))
    }

    pub fn powq(&self, a: Fq, e: u64) -> Fq {
        Fq(self.pow2(Fq2(a.0), e).0)
    }

    /// F_q element from an integer (reduces the prime-field part only when
    /// n = 1; general integers map via base-p digits).
    pub fn fq_from_int(&self, v: i64) -> Fq {
        let p = self.p as i64;
        let r = v.rem_euclid(p) as u16;
        Fq(r)
    }

    /// Euler criterion on F_q^×: true iff a = s² for some s in F_q.
    pub fn is_square_fq(&self, a: Fq) -> Result<bool> {
        if a.is_zero() {
            return Err(Error::ZeroArgument);
        }
        Ok(self.is_square_q[a.0 as usize])
    }

    /// Square root of a ∈ F_q inside F_{q²} (always exists), canonical branch.
    pub fn sqrt_fq2(&self, a: Fq) -> Fq2 {
        self.sqrt2(Fq2(a.0))
            .expect("every element of F_q is a square in F_{q^2}")
    }

    /// All elements of F_{q²} \ F_q.
    pub fn units_outside_fq(&self) -> impl Iterator<Item = Fq2> + '_ {
        (self.q as u16..self.q2 as u16).map(Fq2)
    }
}

impl std::fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FieldSpec(p={}, n={}, q={})", self.p, self.n, self.q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::spec_for_q;

    #[test]
    fn f3_tower_via_x2_plus_1() {
        // x^2+1 has no root mod 3.
        let s = spec_for_q(3).unwrap();
        assert_eq!(s.q, 3);
        assert_eq!(s.q2, 9);
    }

    #[test]
    fn f7_tower_via_x2_plus_1() {
        // -1 is a non-square mod 7.
        let s = spec_for_q(7).unwrap();
        assert_eq!(s.q, 7);
    }

    #[test]
    fn reducible_modulus_rejected() {
        // w^2 + w = w(w+1) splits over F_3.
        let err = FieldSpec::new(3, 1, vec![0, 1], vec![Fq(0), Fq(1), Fq(1)]).unwrap_err();
        assert_eq!(err.name(), "ReducibleModulus");
    }

    #[test]
    fn even_or_composite_p_rejected() {
        assert_eq!(
            FieldSpec::new(9, 1, vec![0, 1], vec![Fq(1), Fq(0), Fq(1)])
                .unwrap_err()
                .name(),
            "CompositeP"
        );
        assert_eq!(
            FieldSpec::new(2, 1, vec![0, 1], vec![Fq(1), Fq(1), Fq(1)])
                .unwrap_err()
                .name(),
            "CompositeP"
        );
    }

    #[test]
    fn field_axioms_exhaustive_q3() {
        let s = spec_for_q(3).unwrap();
        for a in 0..9u16 {
            let a = Fq2(a);
            assert_eq!(s.add2(a, s.neg2(a)), Fq2::ZERO);
            if !a.is_zero() {
                assert_eq!(s.mul2(a, s.inv2(a).unwrap()), s.one2());
            }
            for b in 0..9u16 {
                let b = Fq2(b);
                assert_eq!(s.mul2(a, b), s.mul2(b, a));
                for c in 0..9u16 {
                    let c = Fq2(c);
                    assert_eq!(
                        s.mul2(a, s.add2(b, c)),
                        s.add2(s.mul2(a, b), s.mul2(a, c))
                    );
                }
            }
        }
    }

    #[test]
    fn frobenius_fixes_fq() {
        for q in [3u32, 5, 7, 9] {
            let s = spec_for_q(q).unwrap();
            for a in 0..s.q as u16 {
                assert_eq!(s.pow2(Fq2(a), s.q as u64), Fq2(a), "a^q = a on F_q");
            }
            for a in 0..s.q2 as u16 {
                assert_eq!(
                    s.pow2(Fq2(a), (s.q * s.q) as u64),
                    Fq2(a),
                    "a^(q^2) = a on F_q2"
                );
                assert_eq!(s.frob2(Fq2(a)), s.pow2(Fq2(a), s.q as u64));
            }
        }
    }

    #[test]
    fn sqrt_canonical_branch_q3() {
        let s = spec_for_q(3).unwrap();
        // 1 is a square with canonical root 1.
        assert!(s.is_square_fq(Fq(1)).unwrap());
        assert_eq!(s.sqrt_fq2(Fq(1)), Fq2(1));
        // 2 is not a square in F_3; its root lies in F_9 \ F_3.
        assert!(!s.is_square_fq(Fq(2)).unwrap());
        let r = s.sqrt_fq2(Fq(2));
        assert!(!s.in_fq(r));
        assert_eq!(s.mul2(r, r), Fq2(2));
        // Exhaustive oracle: both roots of 2 in F_9, canonical = lex-min.
        let roots: Vec<Fq2> = (0..9u16)
            .map(Fq2)
            .filter(|&x| s.mul2(x, x) == Fq2(2))
            .collect();
        assert_eq!(roots.len(), 2);
        let min = roots
            .iter()
            .copied()
            .min_by_key(|&x| s.lexkey2(x))
            .unwrap();
        assert_eq!(r, min);
        // With w^2 = -1 the roots of 2 are ±w; lex order on (c0, c1) picks w.
        assert_eq!(r, s.join2(Fq(0), Fq(1)));
    }

    #[test]
    fn sqrt_q7() {
        let s = spec_for_q(7).unwrap();
        assert!(s.is_square_fq(Fq(4)).unwrap());
        let r = s.sqrt_fq2(Fq(4));
        assert_eq!(s.mul2(r, r), Fq2(4));
        assert_eq!(r, Fq2(2), "canonical root of 4 is 2 (lex-smaller than 5)");
    }

    #[test]
    fn every_fq_element_is_square_in_fq2() {
        for q in [3u32, 5, 7, 9] {
            let s = spec_for_q(q).unwrap();
            for a in 0..s.q as u16 {
                let r = s.sqrt_fq2(Fq(a));
                assert_eq!(s.mul2(r, r), Fq2(a));
            }
        }
    }

    #[test]
    fn q9_tower() {
        let s = spec_for_q(9).unwrap();
        assert_eq!(s.p, 3);
        assert_eq!(s.n, 2);
        assert_eq!(s.q, 9);
        assert_eq!(s.q2, 81);
        // x (index 3 = 0 + 1*3) squares to -1 = 2.
        let x = Fq(3);
        assert_eq!(s.mulq(x, x), Fq(2));
    }
}
