//! Exact arithmetic in F_p, F_q = F_p[x]/(m), F_{q²}, and A = F_q[t].

mod field;
mod irreducible;
mod poly;
pub mod textfmt;

pub use field::{FieldSpec, Fq, Fq2};
pub use irreducible::{count_irreducibles, monic_of_degree, polys_of_degree};
pub use poly::Poly;

use crate::error::{Error, Result};

/// Built-in tower configurations for the documented q values.
///
/// q = 3:  F_9  = F_3[w]/(w² + 1)
/// q = 5:  F_25 = F_5[w]/(w² + 2)
/// q = 7:  F_49 = F_7[w]/(w² + 1)
/// q = 9:  F_9  = F_3[x]/(x² + 1), F_81 = F_9[w]/(w² - (x+1))
pub fn spec_for_q(q: u32) -> Result<FieldSpec> {
    match q {
        3 => FieldSpec::new(3, 1, vec![0, 1], vec![Fq(1), Fq(0), Fq(1)]),
        5 => FieldSpec::new(5, 1, vec![0, 1], vec![Fq(2), Fq(0), Fq(1)]),
        7 => FieldSpec::new(7, 1, vec![0, 1], vec![Fq(1), Fq(0), Fq(1)]),
        9 => {
            // w² = x + 1, a non-square generator of F_9^×; the constant term
            // of the modulus is -(x+1), index 8 = 2 + 2*3.
            FieldSpec::new(3, 2, vec![1, 0, 1], vec![Fq(8), Fq(0), Fq(1)])
        }
        _ => Err(Error::Parse(format!(
            "no built-in modulus for q = {q}; supply --p/--n/--modulus/--modulus2"
        ))),
    }
}
