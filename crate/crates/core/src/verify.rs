//! Named verification suites over exhaustive or seeded grids.
//!
//! Each suite checks one of the structural facts the rest of the library
//! leans on, by direct computation: the fundamental-domain metric
//! equalities, the local expansion of j at its zeros, the near-root count
//! bound, the Mertens-type sum, Newton-polygon root recovery, and the
//! lattice-exponential consistency identities. The CLI exposes them under
//! `verify --suite`; the acceptance tests pin their grids.

use crate::algebra::{polys_of_degree, FieldSpec, Fq, Fq2, Poly};
use crate::analytic::{
    drinfeld_coeffs, exp_lattice_truncated, j_near_root, j_of_point,
};
use crate::error::Result;
use crate::forms::{
    enumerate_triples_for_delta, near_root_count_for_delta, Triple, TripleCache,
};
use crate::quadorder::{make_discriminant, mertens_sum};
use crate::series::{dist_kinf, nearest_a, newton_polygon, sqrt_poly, AbsVal, Series};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;

/// Outcome of one suite run.
#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub name: String,
    pub cases: u64,
    pub failures: u64,
    pub notes: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.cases > 0
    }

    pub fn summary(&self) -> String {
        format!(
            "{}: {} — {} cases, {} failures{}",
            self.name,
            if self.passed() { "PASS" } else { "FAIL" },
            self.cases,
            self.failures,
            if self.notes.is_empty() {
                String::new()
            } else {
                format!(" [{}]", self.notes.join("; "))
            }
        )
    }
}

/// Admissible discriminant polynomials of exact degree m: any leading
/// coefficient for odd m, non-square leading coefficients for even m.
pub fn admissible_leads(spec: &FieldSpec, m: i64) -> Vec<Fq> {
    if m % 2 == 1 {
        (1..spec.q as u16).map(Fq).collect()
    } else {
        (1..spec.q as u16)
            .map(Fq)
            .filter(|&c| !spec.is_square_fq(c).unwrap())
            .collect()
    }
}

/// Fundamental-domain metrics |z| = |z|_A = |z|_i >= 1 for every reduced
/// form of every admissible δ with deg δ <= max_deg.
///
/// The z-series are built once per δ from √δ with per-a inverse caching,
/// so the exhaustive grid stays cheap.
pub fn suite_lemma53(spec: &FieldSpec, max_deg: i64) -> SuiteReport {
    let mut cases = 0u64;
    let mut failures = 0u64;
    let mut notes = vec![];
    let mut cache = TripleCache::new(spec);
    for m in 1..=max_deg {
        let leads = admissible_leads(spec, m);
        let e: u8 = if m % 2 == 1 { 2 } else { 1 };
        let window = (2 * m + 12) * e as i64;
        for delta in polys_of_degree(spec, m as usize, &leads) {
            let triples = cache.enumerate_for_delta(spec, &delta);
            if triples.is_empty() {
                continue;
            }
            let sq = match sqrt_poly(spec, &delta, window) {
                Ok(s) => s,
                Err(_) => {
                    failures += 1;
                    continue;
                }
            };
            let mut inv2a: HashMap<u64, Series> = HashMap::new();
            for t in &triples {
                cases += 1;
                if let Err(msg) = check_metrics(spec, &sq, t, e, &mut inv2a) {
                    failures += 1;
                    if notes.len() < 5 {
                        notes.push(msg);
                    }
                }
            }
        }
    }
    SuiteReport {
        name: "lemma5.3".into(),
        cases,
        failures,
        notes,
    }
}

fn check_metrics(
    spec: &FieldSpec,
    sq: &Series,
    t: &Triple,
    e: u8,
    inv2a: &mut HashMap<u64, Series>,
) -> std::result::Result<(), String> {
    let akey = crate::forms::encode_poly(spec, &t.a);
    if !inv2a.contains_key(&akey) {
        let two = Poly::constant(spec.addq(Fq(1), Fq(1)));
        let den = Series::from_poly(spec, &spec.pmul(&two, &t.a), e, sq.prec);
        inv2a.insert(akey, spec.sinv(&den).map_err(|er| er.to_string())?);
    }
    let inv = &inv2a[&akey];
    let num = spec
        .ssub(sq, &Series::from_poly(spec, &t.b, e, sq.prec))
        .map_err(|er| er.to_string())?;
    let z = spec.smul(&num, inv).map_err(|er| er.to_string())?;
    let abs = z.abs();
    let (_, da) = nearest_a(spec, &z).map_err(|er| er.to_string())?;
    let dk = dist_kinf(spec, &z);
    if abs != da || abs != dk || abs < AbsVal::one() {
        return Err(format!(
            "triple ({:?},{:?},{:?}): |z|={abs} |z|_A={da} |z|_i={dk}",
            t.a, t.b, t.c
        ));
    }
    Ok(())
}

/// Local expansion at the zeros of j: for synthetic z = u + ε with
/// |ε| ∈ {q^-2, q^-3}, the valuation identity |j(z)| = q^q·|z-u|^{q+1}
/// holds exactly and j agrees with the explicit first-order term.
pub fn suite_lemma54(spec: &FieldSpec, count: u64, seed: u64) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5454);
    let mut cases = 0u64;
    let mut failures = 0u64;
    let mut notes = vec![];
    let units: Vec<Fq2> = spec.units_outside_fq().collect();
    while cases < count {
        let u = units[rng.gen_range(0..units.len())];
        let k = if rng.gen_bool(0.5) { 2i64 } else { 3 };
        let lead = Fq2(1 + rng.gen_range(0..spec.q2 as u16 - 1));
        let mut z = Series::constant(1, u, 60);
        z = spec
            .sadd(&z, &Series::term(1, lead, k, 60))
            .unwrap();
        // a couple of deeper random digits
        for extra in 1..=2 {
            let c = Fq2(rng.gen_range(0..spec.q2 as u16));
            z = spec
                .sadd(&z, &Series::term(1, c, k + extra, 60))
                .unwrap();
        }
        cases += 1;
        let ok = (|| -> Result<bool> {
            let (pred, first) = j_near_root(spec, &z, u)?;
            let j = j_of_point(spec, &z, 24)?;
            if j.abs() != pred {
                return Ok(false);
            }
            let diff = spec.ssub(&j, &first)?;
            Ok(match diff.abs() {
                AbsVal::NegInfinity => true,
                AbsVal::Log { half } => half < first.abs().half_log().unwrap(),
            })
        })();
        match ok {
            Ok(true) => {}
            Ok(false) => {
                failures += 1;
                if notes.len() < 5 {
                    notes.push(format!("valuation identity failed for u={:?} k={k}", u));
                }
            }
            Err(e) => {
                failures += 1;
                if notes.len() < 5 {
                    notes.push(format!("error: {e}"));
                }
            }
        }
    }
    SuiteReport {
        name: "lemma5.4".into(),
        cases,
        failures,
        notes,
    }
}

/// Near-root counts over all admissible δ of even degree <= max_deg (full
/// grid) plus an optional seeded sample of the next even degree: counts
/// are always <= 1 and vanish unless the leading coefficient is 4u².
pub fn suite_prop46(
    spec: &FieldSpec,
    max_deg: i64,
    sample_next: u64,
    seed: u64,
) -> SuiteReport {
    let mut cases = 0u64;
    let mut failures = 0u64;
    let mut notes = vec![];
    let mut count_dist: HashMap<usize, u64> = HashMap::new();
    let mut cache = TripleCache::new(spec);
    let units: Vec<Fq2> = spec.units_outside_fq().collect();
    let four = spec.four();
    let run_delta = |spec: &FieldSpec,
                         delta: &Poly,
                         cache: &mut TripleCache,
                         cases: &mut u64,
                         failures: &mut u64,
                         notes: &mut Vec<String>,
                         count_dist: &mut HashMap<usize, u64>| {
        let triples = cache.enumerate_for_delta(spec, delta);
        for &u in &units {
            *cases += 1;
            match near_root_count_for_delta(spec, delta, &triples, u) {
                Ok(n) => {
                    *count_dist.entry(n).or_insert(0) += 1;
                    let u2 = spec.mul2(u, u);
                    let four_u2 = spec.mul2(spec.embed(four), u2);
                    let lc_matches = spec.restrict(four_u2) == Some(delta.lead());
                    let bad = n > 1 || (!lc_matches && n != 0);
                    if bad {
                        *failures += 1;
                        if notes.len() < 5 {
                            notes.push(format!("δ={:?} u={:?} count={n}", delta, u));
                        }
                    }
                }
                Err(e) => {
                    *failures += 1;
                    if notes.len() < 5 {
                        notes.push(format!("error: {e}"));
                    }
                }
            }
        }
    };
    for m in (2..=max_deg).step_by(2) {
        let leads = admissible_leads(spec, m);
        for delta in polys_of_degree(spec, m as usize, &leads) {
            run_delta(
                spec,
                &delta,
                &mut cache,
                &mut cases,
                &mut failures,
                &mut notes,
                &mut count_dist,
            );
        }
    }
    if sample_next > 0 {
        let m = max_deg + if max_deg % 2 == 0 { 2 } else { 1 };
        let leads = admissible_leads(spec, m);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x4646);
        for _ in 0..sample_next {
            let mut c: Vec<Fq> = (0..m).map(|_| Fq(rng.gen_range(0..spec.q as u16))).collect();
            c.push(leads[rng.gen_range(0..leads.len())]);
            let delta = Poly::from_coeffs(c);
            if delta.deg() != Some(m) {
                continue;
            }
            run_delta(
                spec,
                &delta,
                &mut cache,
                &mut cases,
                &mut failures,
                &mut notes,
                &mut count_dist,
            );
        }
    }
    let mut dist: Vec<(usize, u64)> = count_dist.into_iter().collect();
    dist.sort();
    notes.push(format!("count distribution {:?}", dist));
    SuiteReport {
        name: "prop4.6".into(),
        cases,
        failures,
        notes,
    }
}

/// |mertens_sum(i) - i| <= 2 for i <= n.
pub fn suite_mertens(spec: &FieldSpec, n: u32) -> SuiteReport {
    let mut cases = 0;
    let mut failures = 0;
    let mut notes = vec![];
    let mut max_dev = BigRational::from(BigInt::from(0));
    for i in 1..=n {
        cases += 1;
        let v = mertens_sum(spec, i);
        let dev = (v - BigRational::from(BigInt::from(i))).abs();
        if dev > max_dev {
            max_dev = dev.clone();
        }
        if dev > BigRational::from(BigInt::from(2)) {
            failures += 1;
        }
    }
    notes.push(format!(
        "max |sum - n| = {}/{}",
        max_dev.numer(),
        max_dev.denom()
    ));
    SuiteReport {
        name: "mertens".into(),
        cases,
        failures,
        notes,
    }
}

/// Newton polygons of seeded products Π (X - c_i t^{k_i}) recover the
/// exact multiset of root sizes.
pub fn suite_newton(spec: &FieldSpec, samples: u64, seed: u64) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x4e57);
    let mut cases = 0;
    let mut failures = 0;
    let mut notes = vec![];
    for _ in 0..samples {
        cases += 1;
        let nroots = rng.gen_range(2..=7usize);
        let mut ks: Vec<i64> = (0..nroots).map(|_| rng.gen_range(0..=5i64)).collect();
        // expand over A
        let mut h = vec![Poly::one()];
        for &k in &ks {
            let c = Fq(1 + rng.gen_range(0..spec.q as u16 - 1));
            let root = Poly::monomial(c, k as usize);
            let mut next = vec![Poly::zero(); h.len() + 1];
            for (i, cf) in h.iter().enumerate() {
                next[i + 1] = spec.padd(&next[i + 1], cf);
                next[i] = spec.psub(&next[i], &spec.pmul(cf, &root));
            }
            h = next;
        }
        // distinct root sizes survive; equal-size roots may merge by
        // cancellation only in the top coefficient, which stays 1 (monic)
        let slopes = newton_polygon(spec, &h);
        let mut got = vec![];
        for seg in slopes {
            for _ in 0..seg.multiplicity {
                got.push(*seg.slope.numer() / *seg.slope.denom());
            }
        }
        ks.sort();
        // the polygon sees sizes of the actual roots; when same-size roots
        // collide the product still has them as roots, so multisets match
        if got != ks {
            failures += 1;
            if notes.len() < 5 {
                notes.push(format!("expected {:?}, polygon gave {:?}", ks, got));
            }
        }
    }
    SuiteReport {
        name: "newton".into(),
        cases,
        failures,
        notes,
    }
}

/// Tower-vs-recursion consistency of α_3 and strict growth of the
/// truncation certificate with D, over a small discriminant grid.
pub fn suite_exp_consistency(spec: &FieldSpec, max_deg_delta0: i64) -> SuiteReport {
    let mut cases = 0u64;
    let mut failures = 0u64;
    let mut notes = vec![];
    for delta0 in crate::report::delta0_representatives(spec, max_deg_delta0) {
        let disc = match make_discriminant(spec, &Poly::one(), &delta0) {
            Ok(d) => d,
            Err(_) => continue,
        };
        let triples = enumerate_triples_for_delta(spec, &disc.delta);
        for t in triples.iter().take(2) {
            cases += 1;
            let check = (|| -> Result<bool> {
                let window = 40 * disc.e() as i64 + 2 * (spec.q as i64).pow(3);
                let pt = crate::forms::cm_point(spec, t, &disc, window)?;
                let mut last_err = i64::MIN;
                let mut monotone = true;
                for d in 1..=3u32 {
                    let exp = exp_lattice_truncated(spec, &pt.z, d)?;
                    if exp.err_exponent <= last_err {
                        monotone = false;
                    }
                    last_err = exp.err_exponent;
                }
                // α_3 via the functional equation from α_1, α_2 at D = 3
                let exp = exp_lattice_truncated(spec, &pt.z, 3)?;
                let dc = drinfeld_coeffs(spec, &exp)?;
                let e = pt.z.e;
                let q3 = (spec.q as u64).pow(3);
                let mut p3c = vec![Fq::ZERO; q3 as usize + 1];
                p3c[1] = spec.negq(Fq(1));
                p3c[q3 as usize] = Fq(1);
                let p3 = Series::from_poly(
                    spec,
                    &Poly::from_coeffs(p3c),
                    e,
                    exp.alphas[3].prec + 2 * q3 as i64 * e as i64,
                );
                let rhs = spec.sadd(
                    &spec.smul(&dc.g, &spec.sfrob(&exp.alphas[2], 1)?)?,
                    &spec.smul(&dc.delta, &spec.sfrob(&exp.alphas[1], 2)?)?,
                )?;
                let a3_rec = spec.smul(&rhs, &spec.sinv(&p3)?)?;
                let diff = spec.ssub(&exp.alphas[3], &a3_rec)?;
                let within = match diff.abs() {
                    AbsVal::NegInfinity => true,
                    AbsVal::Log { half } => {
                        let val = -half * e as i64 / 2;
                        val >= exp.err_exponent.min(diff.prec) - 1
                    }
                };
                Ok(monotone && within)
            })();
            match check {
                Ok(true) => {}
                Ok(false) => {
                    failures += 1;
                    if notes.len() < 5 {
                        notes.push(format!("δ0={:?} triple a={:?}", delta0, t.a));
                    }
                }
                Err(e) => {
                    failures += 1;
                    if notes.len() < 5 {
                        notes.push(format!("error: {e}"));
                    }
                }
            }
        }
    }
    SuiteReport {
        name: "exp-consistency".into(),
        cases,
        failures,
        notes,
    }
}

/// Run a named suite with default grid bounds for the given field.
pub fn run_suite(
    spec: &FieldSpec,
    name: &str,
    max_deg: Option<i64>,
    n: Option<u32>,
    seed: u64,
) -> Result<Vec<SuiteReport>> {
    let q = spec.q;
    let default_deg = if q <= 3 { 6 } else if q <= 5 { 4 } else { 3 };
    let deg = max_deg.unwrap_or(default_deg);
    let reports = match name {
        "lemma5.3" => vec![suite_lemma53(spec, deg)],
        "lemma5.4" => vec![suite_lemma54(spec, 24, seed)],
        "prop4.6" => vec![suite_prop46(spec, deg.max(2) & !1, 0, seed)],
        "mertens" => vec![suite_mertens(spec, n.unwrap_or(12))],
        "newton" => vec![suite_newton(spec, 200, seed)],
        "exp-consistency" => vec![suite_exp_consistency(spec, deg.min(3))],
        "all" => vec![
            suite_lemma53(spec, deg),
            suite_lemma54(spec, 24, seed),
            suite_prop46(spec, deg.max(2) & !1, 0, seed),
            suite_mertens(spec, n.unwrap_or(12)),
            suite_newton(spec, 200, seed),
            suite_exp_consistency(spec, deg.min(3)),
        ],
        other => {
            return Err(crate::error::Error::Parse(format!(
                "unknown suite '{other}'"
            )))
        }
    };
    Ok(reports)
}
