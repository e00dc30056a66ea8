//! Newton polygons of polynomials over A at the infinite place.
//!
//! For H = Σ c_i X^i the polygon is the lower convex hull of the points
//! (i, -deg_t c_i). A segment of slope σ and horizontal length m certifies
//! exactly m roots of absolute value q^σ in C_∞.

use crate::algebra::{FieldSpec, Poly};
use num_rational::Ratio;

/// One polygon segment: `m` roots with log_q|root| = `slope`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NewtonSlope {
    pub slope: Ratio<i64>,
    pub multiplicity: u32,
}

/// Slopes in ascending order; multiplicities sum to deg_X H.
/// Panics on a zero or constant H (caller contract).
pub fn newton_polygon(_spec: &FieldSpec, coeffs: &[Poly]) -> Vec<NewtonSlope> {
    assert!(coeffs.len() >= 2, "deg_X H >= 1 required");
    assert!(
        !coeffs.last().unwrap().is_zero(),
        "leading X-coefficient must be nonzero"
    );
    // Points (i, -deg c_i); absent for zero coefficients. The hull walks
    // from i = 0 ... missing low coefficients mean roots of value 0; the
    // class polynomials here never have them, but handle X | H by treating
    // the -∞ points as slope -∞ is out of scope: require c_0 != 0 too.
    let pts: Vec<(i64, i64)> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (i as i64, -c.deg().unwrap()))
        .collect();
    // Lower convex hull (monotone chain over increasing x).
    let mut hull: Vec<(i64, i64)> = vec![];
    for &p in &pts {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // keep b only if it is strictly below the segment a-p
            let cross = (b.0 - a.0) * (p.1 - a.1) - (p.0 - a.0) * (b.1 - a.1);
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let mut out = vec![];
    for win in hull.windows(2) {
        let (x0, y0) = win[0];
        let (x1, y1) = win[1];
        out.push(NewtonSlope {
            slope: Ratio::new(y1 - y0, x1 - x0),
            multiplicity: (x1 - x0) as u32,
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::spec_for_q;
    use crate::algebra::Fq;

    fn poly(s: &FieldSpec, coeffs: &[i64]) -> Poly {
        Poly::from_coeffs(coeffs.iter().map(|&v| s.fq_from_int(v)).collect())
    }

    #[test]
    fn monomial_root() {
        let s = spec_for_q(3).unwrap();
        // X - t^3 -> one root of size q^3
        let h = vec![poly(&s, &[0, 0, 0, -1]), Poly::one()];
        let slopes = newton_polygon(&s, &h);
        assert_eq!(
            slopes,
            vec![NewtonSlope {
                slope: Ratio::new(3, 1),
                multiplicity: 1
            }]
        );
    }

    #[test]
    fn middle_point_above_hull_is_dropped() {
        let s = spec_for_q(3).unwrap();
        // X^2 - t X + t^5: points (0,-5), (1,-1), (2,0). The middle point
        // lies above the chord, so both roots have size q^(5/2); direct
        // check: |r1 r2| = q^5 and |r1 + r2| = q <= q^(5/2) is consistent
        // only with equal sizes.
        let h = vec![
            Poly::monomial(Fq(1), 5),
            s.pneg(&poly(&s, &[0, 1])),
            Poly::one(),
        ];
        let slopes = newton_polygon(&s, &h);
        assert_eq!(
            slopes,
            vec![NewtonSlope {
                slope: Ratio::new(5, 2),
                multiplicity: 2
            }]
        );
    }

    #[test]
    fn two_segments() {
        let s = spec_for_q(3).unwrap();
        // X^2 - t^3 X + t^4: hull through (0,-4), (1,-3), (2,0);
        // root sizes q^1 and q^3 (sum has size q^3, product q^4).
        let h = vec![
            Poly::monomial(Fq(1), 4),
            s.pneg(&poly(&s, &[0, 0, 0, 1])),
            Poly::one(),
        ];
        let slopes = newton_polygon(&s, &h);
        assert_eq!(slopes.len(), 2);
        assert_eq!(slopes[0].slope, Ratio::new(1, 1));
        assert_eq!(slopes[0].multiplicity, 1);
        assert_eq!(slopes[1].slope, Ratio::new(3, 1));
        assert_eq!(slopes[1].multiplicity, 1);
    }

    #[test]
    fn flat_polygon() {
        let s = spec_for_q(3).unwrap();
        // X^2 + 1 -> slope 0 with multiplicity 2
        let h = vec![Poly::one(), Poly::zero(), Poly::one()];
        let slopes = newton_polygon(&s, &h);
        assert_eq!(
            slopes,
            vec![NewtonSlope {
                slope: Ratio::new(0, 1),
                multiplicity: 2
            }]
        );
    }

    #[test]
    fn product_of_linear_factors_oracle() {
        // Slopes of Π (X - t^{k_i}) recover the multiset {k_i}.
        let s = spec_for_q(5).unwrap();
        let ks = [0i64, 0, 2, 3, 3, 3, 7];
        // expand Π (X - t^k) over A
        let mut h = vec![Poly::one()];
        for &k in &ks {
            let root = Poly::monomial(Fq(1), k as usize);
            let mut next = vec![Poly::zero(); h.len() + 1];
            for (i, c) in h.iter().enumerate() {
                next[i + 1] = s.padd(&next[i + 1], c);
                next[i] = s.psub(&next[i], &s.pmul(c, &root));
            }
            h = next;
        }
        let slopes = newton_polygon(&s, &h);
        let mut recovered = vec![];
        for seg in slopes {
            for _ in 0..seg.multiplicity {
                recovered.push(seg.slope);
            }
        }
        let expect: Vec<Ratio<i64>> = ks.iter().map(|&k| Ratio::new(k, 1)).collect();
        assert_eq!(recovered, expect);
    }
}
