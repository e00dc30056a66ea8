//! Height reports, the discriminant scan, and their JSON/CSV forms.
//!
//! A scan walks squarefree imaginary-admissible δ0 (up to scaling the
//! leading coefficient by squares) and monic conductors f0, producing one
//! row per order with heights, the unit flag and the bound columns. Rows
//! are independent; they are computed in parallel and assembled in grid
//! order, so output bytes are identical for any thread count.

use crate::algebra::textfmt::poly_to_string;
use crate::algebra::{polys_of_degree, FieldSpec, Fq, Poly};
use crate::error::{Error, Result};
use crate::heights::{
    class_polynomial, conjugates, graded_height, grouping_window, is_unit, is_unit_from_halves,
    weil_height_from_halves, ClassPoly,
};
use crate::quadorder::{
    lower_bound_rhs, make_discriminant, upper_bound_rhs, Discriminant, PlaceType,
};
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

/// Field/tower configuration echoed into reports.
#[derive(Debug, Clone, Serialize)]
pub struct ConfigBlock {
    pub p: u32,
    pub n: u32,
    pub modulus_q: String,
    pub modulus_q2: String,
    pub prec: i64,
    pub d_cap: u32,
}

impl ConfigBlock {
    pub fn from_spec(spec: &FieldSpec) -> ConfigBlock {
        let mq = {
            // modulus over F_p printed in x
            let terms: Vec<String> = spec
                .modulus_q
                .iter()
                .enumerate()
                .rev()
                .filter(|(_, &c)| c != 0)
                .map(|(i, &c)| match (i, c) {
                    (0, c) => format!("{c}"),
                    (1, 1) => "x".into(),
                    (1, c) => format!("{c}*x"),
                    (i, 1) => format!("x^{i}"),
                    (i, c) => format!("{c}*x^{i}"),
                })
                .collect();
            terms.join(" + ")
        };
        let mq2 = {
            let names = ["1", "w", "w^2"];
            let terms: Vec<String> = spec
                .modulus_q2
                .iter()
                .enumerate()
                .rev()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| {
                    let cs = crate::algebra::textfmt::fq_to_string(spec, *c);
                    if i == 0 {
                        cs
                    } else if cs == "1" {
                        names[i].to_string()
                    } else if cs.contains('+') || cs.contains('*') {
                        format!("({cs})*{}", names[i])
                    } else {
                        format!("{cs}*{}", names[i])
                    }
                })
                .collect();
            terms.join(" + ")
        };
        ConfigBlock {
            p: spec.p,
            n: spec.n,
            modulus_q: mq,
            modulus_q2: mq2,
            prec: crate::analytic::WINDOW_DEFAULT,
            d_cap: crate::analytic::D_CAP,
        }
    }
}

/// One scanned order.
#[derive(Debug, Clone, Serialize)]
pub struct HeightRow {
    pub delta: String,
    pub delta0: String,
    pub f0: String,
    pub place_type: PlaceType,
    /// Number of distinct Galois conjugates (degree of the class polynomial).
    pub d: usize,
    /// Number of reduced triples (can exceed d in the inert case).
    pub t_count: usize,
    /// Class polynomial coefficients, constant first, when computed exactly.
    pub class_poly: Option<Vec<String>>,
    pub h_j: Option<String>,
    pub h_g: Option<String>,
    pub is_unit: Option<bool>,
    pub lower_rhs: f64,
    pub upper_rhs: Option<f64>,
    pub slack: Option<f64>,
    pub status: String,
}

/// Full scan output.
#[derive(Debug, Clone, Serialize)]
pub struct ScanReport {
    pub config: ConfigBlock,
    pub q: u32,
    pub max_deg_delta0: i64,
    pub max_deg_f0: i64,
    pub c_q: f64,
    pub o_q: f64,
    pub rows: Vec<HeightRow>,
    pub unit_count: usize,
}

/// Whether a row gets an exact class polynomial or the valuation route.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassPolyPolicy {
    /// Exact class polynomial when f0 = 1 or deg δ <= 4; valuations
    /// otherwise (the heights agree, checked by the acceptance suite).
    Auto,
    Always,
    Never,
}

fn rational_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn rational_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Compute one report row.
pub fn bound_report(
    spec: &FieldSpec,
    disc: &Discriminant,
    c_q: f64,
    o_q: f64,
    policy: ClassPolyPolicy,
) -> HeightRow {
    let mut row = HeightRow {
        delta: poly_to_string(spec, &disc.delta),
        delta0: poly_to_string(spec, &disc.delta0),
        f0: poly_to_string(spec, &disc.f0),
        place_type: disc.place_type,
        d: 0,
        t_count: 0,
        class_poly: None,
        h_j: None,
        h_g: None,
        is_unit: None,
        lower_rhs: lower_bound_rhs(spec, disc, c_q),
        upper_rhs: None,
        slack: None,
        status: "ok".into(),
    };
    let use_exact = match policy {
        ClassPolyPolicy::Always => true,
        ClassPolyPolicy::Never => false,
        ClassPolyPolicy::Auto => disc.f0.is_one() || disc.deg_delta() <= 4,
    };
    let filled = (|| -> Result<()> {
        let conj = conjugates(spec, disc, false, grouping_window(disc))?;
        row.d = conj.d();
        row.t_count = conj.triples.len();
        let hj = weil_height_from_halves(&conj.halves);
        let hg = graded_height(spec, &hj);
        row.h_j = Some(rational_string(&hj));
        row.h_g = Some(rational_string(&hg));
        row.is_unit = Some(is_unit_from_halves(&conj.halves));
        row.upper_rhs = Some(upper_bound_rhs(spec, disc, conj.d() as u64, o_q));
        row.slack = Some(rational_to_f64(&hj) - row.lower_rhs);
        if use_exact {
            let h: ClassPoly = class_polynomial(spec, disc, false)?;
            // cross-checks: degree and unit flag must agree with valuations
            if h.degree() != conj.d() {
                return Err(Error::ConsistencyFailure(format!(
                    "class polynomial degree {} != distinct conjugates {}",
                    h.degree(),
                    conj.d()
                )));
            }
            if is_unit(&h) != row.is_unit.unwrap() {
                return Err(Error::ConsistencyFailure(
                    "unit criteria disagree".into(),
                ));
            }
            row.class_poly = Some(
                h.coeffs
                    .iter()
                    .map(|c| poly_to_string(spec, c))
                    .collect(),
            );
        }
        Ok(())
    })();
    if let Err(e) = filled {
        row.status = e.name().to_string();
    }
    row
}

/// Deterministic δ0 representatives: for each degree 1..=max_deg, leading
/// coefficient 1 and the least non-square (odd degrees) or the least
/// non-square alone (even degrees), all squarefree tails.
pub fn delta0_representatives(spec: &FieldSpec, max_deg: i64) -> Vec<Poly> {
    let mut out = vec![];
    let sigma = (1..spec.q as u16)
        .map(Fq)
        .find(|&c| !spec.is_square_fq(c).unwrap())
        .expect("q odd has a non-square");
    for d in 1..=max_deg {
        let leads: Vec<Fq> = if d % 2 == 1 {
            vec![Fq(1), sigma]
        } else {
            vec![sigma]
        };
        for cand in polys_of_degree(spec, d as usize, &leads) {
            if spec.is_squarefree(&cand) {
                out.push(cand);
            }
        }
    }
    out
}

/// All monic conductors of degree 0..=max_deg.
pub fn conductors(spec: &FieldSpec, max_deg: i64) -> Vec<Poly> {
    let mut out = vec![];
    for d in 0..=max_deg {
        out.extend(crate::algebra::monic_of_degree(spec, d as usize));
    }
    out
}

/// Run the scan over the (δ0, f0) grid.
pub fn scan(
    spec: &FieldSpec,
    max_deg_delta0: i64,
    max_deg_f0: i64,
    c_q: f64,
    o_q: f64,
    policy: ClassPolyPolicy,
) -> ScanReport {
    let mut jobs: Vec<Discriminant> = vec![];
    for delta0 in delta0_representatives(spec, max_deg_delta0) {
        for f0 in conductors(spec, max_deg_f0) {
            match make_discriminant(spec, &f0, &delta0) {
                Ok(disc) => jobs.push(disc),
                Err(_) => {}
            }
        }
    }
    let rows: Vec<HeightRow> = jobs
        .par_iter()
        .map(|disc| bound_report(spec, disc, c_q, o_q, policy))
        .collect();
    let unit_count = rows.iter().filter(|r| r.is_unit == Some(true)).count();
    ScanReport {
        config: ConfigBlock::from_spec(spec),
        q: spec.q,
        max_deg_delta0,
        max_deg_f0,
        c_q,
        o_q,
        rows,
        unit_count,
    }
}

impl ScanReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// CSV mirror with the same columns; class_poly joined with ';'.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "delta,delta0,f0,place_type,d,t_count,class_poly,hJ,hG,is_unit,lower_rhs,upper_rhs,slack,status\n",
        );
        for r in &self.rows {
            let esc = |s: &str| {
                if s.contains(',') || s.contains('"') {
                    format!("\"{}\"", s.replace('"', "\"\""))
                } else {
                    s.to_string()
                }
            };
            let cp = r
                .class_poly
                .as_ref()
                .map(|v| v.join("; "))
                .unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                esc(&r.delta),
                esc(&r.delta0),
                esc(&r.f0),
                r.place_type,
                r.d,
                r.t_count,
                esc(&cp),
                r.h_j.clone().unwrap_or_default(),
                r.h_g.clone().unwrap_or_default(),
                r.is_unit.map(|b| b.to_string()).unwrap_or_default(),
                format_f64(r.lower_rhs),
                r.upper_rhs.map(format_f64).unwrap_or_default(),
                r.slack.map(format_f64).unwrap_or_default(),
                r.status
            ));
        }
        out
    }
}

fn format_f64(v: f64) -> String {
    format!("{v:.6}")
}
