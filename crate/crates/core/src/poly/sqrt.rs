//! Square roots of polynomials by leading-term descent.
//!
//! If `P = S²` and `Q` holds the first `k` terms of `S`, then
//! `P − Q² = (S − Q)(S + Q)` has leading term `2·lt(S)·t`, where `t` is the
//! next term of `S`. Each step divides the remainder's leading term by
//! `2·lt(Q)`; the quotients must strictly decrease, which bounds the loop
//! because graded-lex order has no infinite descending chains.

use num_integer::Integer as _;
use num_traits::Zero;

use super::{Monomial, Poly};
use crate::arith::{exact_sqrt, Integer};
use crate::error::{Error, Result};

/// `Q` with `Q·Q = p` and positive leading coefficient.
pub fn poly_square_root(p: &Poly) -> Result<Poly> {
    let (lead_mono, lead_coeff) = match p.leading_term() {
        Some(t) => t,
        None => return Err(Error::Domain("square root of the zero polynomial".into())),
    };
    let root_mono = lead_mono.halve().ok_or(Error::NotAPolynomialSquare)?;
    let root_coeff = exact_sqrt(lead_coeff).ok_or(Error::NotAPolynomialSquare)?;
    let two_lead = &root_coeff * 2u32;

    let ring = p.ring().clone();
    let mut root = ring.monomial(root_mono.clone(), root_coeff);
    let mut rem = p - &root.pow(2);
    let mut last: Monomial = root_mono.clone();

    while let Some((m, c)) = rem.leading_term() {
        let next = m.checked_div(&root_mono).ok_or(Error::NotAPolynomialSquare)?;
        if next >= last {
            return Err(Error::NotAPolynomialSquare);
        }
        let (q, r) = c.div_rem(&two_lead);
        if !r.is_zero() {
            return Err(Error::NotAPolynomialSquare);
        }
        // rem ← rem − (2·root + t)·t
        let mut twice_plus = root.scale(&Integer::from(2));
        twice_plus.add_term(next.clone(), q.clone());
        rem = &rem - &twice_plus.mul_term(&next, &q);
        root.add_term(next.clone(), q);
        last = next;
    }

    if root.pow(2) != *p {
        return Err(Error::NotAPolynomialSquare);
    }
    Ok(root)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Ring;
    use proptest::prelude::*;

    #[test]
    fn simple_roots() {
        let r = Ring::new(&["x", "y"]);
        let p = r.parse("x^2 + 2*x*y + y^2").unwrap();
        assert_eq!(poly_square_root(&p).unwrap(), r.parse("x + y").unwrap());
        let q = r.parse("x^2 + 1").unwrap();
        assert!(matches!(poly_square_root(&q), Err(Error::NotAPolynomialSquare)));
        assert!(matches!(poly_square_root(&r.zero()), Err(Error::Domain(_))));
    }

    #[test]
    fn rejects_odd_or_nonsquare_leading_terms() {
        let r = Ring::new(&["x", "y"]);
        for src in ["x^3", "2*x^2", "-x^2", "x*y", "x^2 + x", "4*x^2 + 2*x + 1"] {
            let p = r.parse(src).unwrap();
            assert!(poly_square_root(&p).is_err(), "{src}");
        }
    }

    #[test]
    fn sign_normalized_root() {
        let r = Ring::new(&["x", "y"]);
        let p = r.parse("(y - 3*x)^2").unwrap();
        assert_eq!(poly_square_root(&p).unwrap(), r.parse("3*x - y").unwrap());
        assert_eq!(poly_square_root(&r.constant(49)).unwrap(), r.constant(7));
    }

    #[test]
    fn triple_pair_three_sum() {
        // a3 + b3 of the third triple family.
        let r = Ring::new(&["p", "q", "r", "s"]);
        let sum = r
            .parse("(p^2 - q^2 - r^2 + s^2)^2 + 4*(p^2 - r^2)*(q^2 - s^2)")
            .unwrap();
        let expected = r.parse("p^2 + q^2 - r^2 - s^2").unwrap();
        assert_eq!(sum, expected.pow(2));
        assert_eq!(poly_square_root(&sum).unwrap(), expected);
    }

    fn arb_small_poly() -> impl Strategy<Value = Poly> {
        let ring = Ring::new(&["a", "b", "c", "d"]);
        prop::collection::vec((prop::collection::vec(0u32..=3, 4), -9i64..=9), 1..6).prop_map(
            move |raw| {
                let mut p = ring.zero();
                for (exps, c) in raw {
                    if exps.iter().sum::<u32>() <= 3 {
                        p.add_term(Monomial::from_exponents(exps), Integer::from(c));
                    }
                }
                p
            },
        )
    }

    proptest! {
        #[test]
        fn recovers_random_roots(q in arb_small_poly()) {
            prop_assume!(!q.is_zero());
            let root = poly_square_root(&q.pow(2)).unwrap();
            let positive = if q.leading_term().unwrap().1 > &Integer::zero() { q.clone() } else { -&q };
            prop_assert_eq!(root, positive);
        }
    }
}
