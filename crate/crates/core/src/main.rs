//! Command-line interface: reproducible experiments over a fixed field
//! configuration. Human tables by default, `--json`/`--csv` for machines;
//! identical configuration and command produce identical output bytes for
//! any `--threads` value.

use clap::{Parser, Subcommand};
use drincm::algebra::textfmt::{parse_modulus_q, parse_modulus_q2, parse_poly, poly_to_string};
use drincm::algebra::{spec_for_q, FieldSpec, Fq};
use drincm::analytic::j_invariant;
use drincm::error::Error;
use drincm::forms::{cm_point, enumerate_triples, metrics, Triple};
use drincm::heights::class_polynomial;
use drincm::quadorder::{classify_infinity, discriminant_from_delta};
use drincm::report::{bound_report, scan, ClassPolyPolicy};
use drincm::series::series_to_string;
use drincm::verify::run_suite;
use std::io::Write;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "drincm",
    about = "Complex-multiplication arithmetic of rank-2 Drinfeld F_q[t]-modules: reduced forms, analytic j-invariants, class polynomials, heights and the unit scan",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,

    /// Built-in field configuration (3, 5, 7, 9).
    #[arg(long, global = true)]
    q: Option<u32>,
    /// Characteristic, for explicit tower configurations.
    #[arg(long, global = true)]
    p: Option<u32>,
    /// Extension degree n with q = p^n.
    #[arg(long, global = true)]
    n: Option<u32>,
    /// Degree-n irreducible over F_p in x, e.g. "x^2 + 1".
    #[arg(long, global = true)]
    modulus: Option<String>,
    /// Degree-2 irreducible over F_q in w, e.g. "w^2 - (x+1)".
    #[arg(long, global = true)]
    modulus2: Option<String>,
    /// Series working precision in s-digits.
    #[arg(long, global = true, default_value_t = drincm::analytic::WINDOW_DEFAULT)]
    prec: i64,
    /// Cap on lattice-basis degrees in the exponential tower.
    #[arg(long, global = true, default_value_t = drincm::analytic::D_CAP)]
    d_cap: u32,
    /// JSON output.
    #[arg(long, global = true)]
    json: bool,
    /// CSV output (scan only).
    #[arg(long, global = true)]
    csv: bool,
    /// Write output to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (0 = all cores). Output bytes do not depend on this.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Seed for randomized verification suites.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Cmd {
    /// Classify the infinite place of k(√δ0).
    Classify {
        #[arg(long)]
        delta0: String,
    },
    /// Enumerate the reduced triples T_δ.
    Forms {
        #[arg(long)]
        delta: String,
    },
    /// The analytic j-invariant of one reduced form (or all of them).
    J {
        #[arg(long)]
        delta: String,
        /// Triple as "a,b,c" in the polynomial text format.
        #[arg(long)]
        triple: Option<String>,
        /// Print every conjugate in the deterministic order.
        #[arg(long)]
        all: bool,
    },
    /// The exact class polynomial of a discriminant.
    ClassPoly {
        #[arg(long)]
        delta: String,
    },
    /// Heights, unit flag and bound columns for one discriminant.
    Height {
        #[arg(long)]
        delta: String,
        #[arg(long, default_value_t = 0.0)]
        c_q: f64,
        #[arg(long, default_value_t = 0.0)]
        o_q: f64,
    },
    /// Scan the (δ0, f0) grid and report every order.
    Scan {
        #[arg(long)]
        max_deg_delta0: i64,
        #[arg(long, default_value_t = 0)]
        max_deg_f0: i64,
        #[arg(long, default_value_t = 0.0)]
        c_q: f64,
        #[arg(long, default_value_t = 0.0)]
        o_q: f64,
        /// Class-polynomial policy: auto, always, never.
        #[arg(long, default_value = "auto")]
        class_poly: String,
    },
    /// Run a named verification suite.
    Verify {
        /// lemma5.3, lemma5.4, prop4.6, mertens, newton, exp-consistency, all.
        #[arg(long)]
        suite: String,
        #[arg(long)]
        max_deg: Option<i64>,
        /// Mertens bound n (x = q^n).
        #[arg(long)]
        n: Option<u32>,
    },
    /// List monic irreducible polynomials and their counts.
    Primes {
        #[arg(long, default_value_t = 4)]
        max_deg: u32,
    },
}

fn build_spec(cli: &Cli) -> Result<FieldSpec, Error> {
    match (cli.q, cli.p) {
        (Some(q), None) => spec_for_q(q),
        (None, Some(p)) => {
            let n = cli.n.unwrap_or(1);
            let mq = match &cli.modulus {
                Some(s) => parse_modulus_q(p, s)?,
                None if n == 1 => vec![0, 1],
                None => return Err(Error::Parse("--modulus required for n > 1".into())),
            };
            let m2 = cli
                .modulus2
                .as_ref()
                .ok_or_else(|| Error::Parse("--modulus2 required with --p".into()))?;
            let mq2 = parse_modulus_q2(p, n, m2)?;
            FieldSpec::new(p, n, mq, mq2.into_iter().map(Fq).collect())
        }
        (Some(q), Some(_)) => Err(Error::Parse(format!(
            "give either --q {q} or an explicit --p/--n/--modulus tower, not both"
        ))),
        (None, None) => spec_for_q(3),
    }
}

fn parse_triple(spec: &FieldSpec, s: &str) -> Result<Triple, Error> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(Error::Parse("triple must be \"a,b,c\"".into()));
    }
    Ok(Triple {
        a: parse_poly(spec, parts[0])?,
        b: parse_poly(spec, parts[1])?,
        c: parse_poly(spec, parts[2])?,
    })
}

fn emit(cli: &Cli, text: &str) -> std::io::Result<()> {
    match &cli.out {
        Some(path) => {
            let mut f = std::fs::File::create(path)?;
            f.write_all(text.as_bytes())
        }
        None => {
            print!("{text}");
            std::io::stdout().flush()
        }
    }
}

fn run(cli: &Cli, spec: &FieldSpec) -> Result<String, Error> {
    match &cli.cmd {
        Cmd::Classify { delta0 } => {
            let d0 = parse_poly(spec, delta0)?;
            let c = classify_infinity(spec, &d0)?;
            Ok(format!("{c}\n"))
        }
        Cmd::Forms { delta } => {
            let d = parse_poly(spec, delta)?;
            let disc = discriminant_from_delta(spec, &d)?;
            let ts = enumerate_triples(spec, &disc);
            if cli.json {
                let mut rows = vec![];
                for t in &ts {
                    let pt = cm_point(spec, t, &disc, cli.prec)?;
                    let m = metrics(spec, &pt)?;
                    rows.push(serde_json::json!({
                        "a": poly_to_string(spec, &t.a),
                        "b": poly_to_string(spec, &t.b),
                        "c": poly_to_string(spec, &t.c),
                        "z": series_to_string(spec, &pt.z),
                        "abs": format!("{}", m.abs),
                        "dist_A": format!("{}", m.dist_a),
                        "dist_kinf": format!("{}", m.dist_kinf),
                        "in_F": m.in_f,
                    }));
                }
                Ok(format!(
                    "{}\n",
                    serde_json::to_string_pretty(&rows).expect("json")
                ))
            } else {
                let mut out = String::new();
                for t in &ts {
                    out.push_str(&format!(
                        "{} | {} | {}\n",
                        poly_to_string(spec, &t.a),
                        poly_to_string(spec, &t.b),
                        poly_to_string(spec, &t.c)
                    ));
                }
                Ok(out)
            }
        }
        Cmd::J { delta, triple, all } => {
            let d = parse_poly(spec, delta)?;
            let disc = discriminant_from_delta(spec, &d)?;
            let list: Vec<Triple> = if *all {
                enumerate_triples(spec, &disc)
            } else {
                let t = triple
                    .as_ref()
                    .ok_or_else(|| Error::Parse("--triple a,b,c or --all required".into()))?;
                vec![parse_triple(spec, t)?]
            };
            let mut out = String::new();
            for t in &list {
                let j = j_invariant(spec, t, &disc, cli.prec)?;
                out.push_str(&format!(
                    "({}, {}, {}): {}\n",
                    poly_to_string(spec, &t.a),
                    poly_to_string(spec, &t.b),
                    poly_to_string(spec, &t.c),
                    series_to_string(spec, &j)
                ));
            }
            Ok(out)
        }
        Cmd::ClassPoly { delta } => {
            let d = parse_poly(spec, delta)?;
            let disc = discriminant_from_delta(spec, &d)?;
            let h = class_polynomial(spec, &disc, false)?;
            if cli.json {
                let coeffs: Vec<String> =
                    h.coeffs.iter().map(|c| poly_to_string(spec, c)).collect();
                Ok(format!(
                    "{}\n",
                    serde_json::to_string_pretty(&serde_json::json!({
                        "delta": poly_to_string(spec, &disc.delta),
                        "degree": h.degree(),
                        "coeffs": coeffs,
                    }))
                    .expect("json")
                ))
            } else {
                let mut out = String::new();
                for (k, c) in h.coeffs.iter().enumerate() {
                    out.push_str(&format!("X^{k}: {}\n", poly_to_string(spec, c)));
                }
                Ok(out)
            }
        }
        Cmd::Height { delta, c_q, o_q } => {
            let d = parse_poly(spec, delta)?;
            let disc = discriminant_from_delta(spec, &d)?;
            let row = bound_report(spec, &disc, *c_q, *o_q, ClassPolyPolicy::Auto);
            if row.status != "ok" {
                return Err(Error::ConsistencyFailure(row.status));
            }
            if cli.json {
                Ok(format!(
                    "{}\n",
                    serde_json::to_string_pretty(&row).expect("json")
                ))
            } else {
                Ok(format!(
                    "delta = {}\nplace = {}\nd = {} (triples: {})\nhJ = {}\nhG = {}\nis_unit = {}\nlower_rhs = {:.6}\nupper_rhs = {:.6}\nslack = {:.6}\n",
                    row.delta,
                    row.place_type,
                    row.d,
                    row.t_count,
                    row.h_j.as_deref().unwrap_or("-"),
                    row.h_g.as_deref().unwrap_or("-"),
                    row.is_unit.map(|b| b.to_string()).unwrap_or_default(),
                    row.lower_rhs,
                    row.upper_rhs.unwrap_or(f64::NAN),
                    row.slack.unwrap_or(f64::NAN),
                ))
            }
        }
        Cmd::Scan {
            max_deg_delta0,
            max_deg_f0,
            c_q,
            o_q,
            class_poly,
        } => {
            let policy = match class_poly.as_str() {
                "auto" => ClassPolyPolicy::Auto,
                "always" => ClassPolyPolicy::Always,
                "never" => ClassPolyPolicy::Never,
                other => {
                    return Err(Error::Parse(format!(
                        "--class-poly must be auto|always|never, got {other}"
                    )))
                }
            };
            let report = scan(spec, *max_deg_delta0, *max_deg_f0, *c_q, *o_q, policy);
            if cli.csv {
                Ok(report.to_csv())
            } else if cli.json {
                Ok(format!("{}\n", report.to_json()))
            } else {
                let mut out = String::new();
                out.push_str(&format!(
                    "q = {}  grid: deg d0 <= {}, deg f0 <= {}  rows: {}  units: {}\n",
                    report.q,
                    report.max_deg_delta0,
                    report.max_deg_f0,
                    report.rows.len(),
                    report.unit_count
                ));
                out.push_str("delta | place | d | hJ | is_unit | slack | status\n");
                for r in &report.rows {
                    out.push_str(&format!(
                        "{} | {} | {} | {} | {} | {} | {}\n",
                        r.delta,
                        r.place_type,
                        r.d,
                        r.h_j.as_deref().unwrap_or("-"),
                        r.is_unit.map(|b| b.to_string()).unwrap_or_default(),
                        r.slack.map(|v| format!("{v:.4}")).unwrap_or_default(),
                        r.status
                    ));
                }
                Ok(out)
            }
        }
        Cmd::Verify { suite, max_deg, n } => {
            let reports = run_suite(spec, suite, *max_deg, *n, cli.seed)?;
            let mut out = String::new();
            let mut all_pass = true;
            for r in &reports {
                out.push_str(&format!("{}\n", r.summary()));
                all_pass &= r.passed();
            }
            if !all_pass {
                return Err(Error::ConsistencyFailure(out));
            }
            Ok(out)
        }
        Cmd::Primes { max_deg } => {
            let mut out = String::new();
            for d in 1..=*max_deg {
                let count = drincm::algebra::count_irreducibles(spec, d);
                out.push_str(&format!("degree {d}: {count}\n"));
            }
            for f in spec.monic_irreducibles(*max_deg) {
                out.push_str(&format!("{}\n", poly_to_string(spec, &f)));
            }
            Ok(out)
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            eprintln!("thread pool: {e}");
            std::process::exit(2);
        }
    };
    let spec = match build_spec(&cli) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(if matches!(e, Error::Parse(_)) { 2 } else { 1 });
        }
    };
    match pool.install(|| run(&cli, &spec)) {
        Ok(text) => {
            if let Err(e) = emit(&cli, &text) {
                eprintln!("io: {e}");
                std::process::exit(1);
            }
        }
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(1);
        }
    }
}
