//! Sparse multivariate polynomials with integer coefficients.
//!
//! A [`Poly`] lives over a [`Ring`], an ordered list of indeterminate names.
//! Terms are kept in a `BTreeMap` keyed by exponent vector under graded
//! lexicographic order (total degree first, then exponents compared from the
//! first declared variable), so the leading term is the last entry. Zero
//! coefficients are never stored; the zero polynomial is the empty map.

mod parse;
mod sqrt;

pub use sqrt::poly_square_root;

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::arith::{Integer, Ratio};
use crate::error::{Error, Result};

/// Exponent vector, one entry per ring variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Box<[u32]>);

impl Monomial {
    pub fn one(arity: usize) -> Self {
        Monomial(vec![0; arity].into_boxed_slice())
    }

    pub fn from_exponents(exps: Vec<u32>) -> Self {
        Monomial(exps.into_boxed_slice())
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(other.0.iter()).map(|(a, b)| a + b).collect())
    }

    /// `self / other` when `other` divides `self`.
    fn checked_div(&self, other: &Monomial) -> Option<Monomial> {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Box<[u32]>>>()
            .map(Monomial)
    }

    fn halve(&self) -> Option<Monomial> {
        if self.0.iter().all(|e| e % 2 == 0) {
            Some(Monomial(self.0.iter().map(|e| e / 2).collect()))
        } else {
            None
        }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Ordered list of indeterminate names shared by polynomials.
#[derive(Clone, Debug)]
pub struct Ring {
    names: Arc<[String]>,
}

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.names, &other.names) || self.names == other.names
    }
}

impl Eq for Ring {}

impl Ring {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Self {
        Ring {
            names: names.iter().map(|s| s.as_ref().to_string()).collect(),
        }
    }

    pub fn arity(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn zero(&self) -> Poly {
        Poly { ring: self.clone(), terms: BTreeMap::new() }
    }

    pub fn one(&self) -> Poly {
        self.constant(Integer::one())
    }

    pub fn constant(&self, c: impl Into<Integer>) -> Poly {
        self.monomial(Monomial::one(self.arity()), c.into())
    }

    pub fn monomial(&self, mono: Monomial, c: Integer) -> Poly {
        assert_eq!(mono.0.len(), self.arity(), "monomial arity");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(mono, c);
        }
        Poly { ring: self.clone(), terms }
    }

    /// The `i`-th indeterminate.
    pub fn gen(&self, i: usize) -> Poly {
        let mut e = vec![0; self.arity()];
        e[i] = 1;
        self.monomial(Monomial::from_exponents(e), Integer::one())
    }

    pub fn var(&self, name: &str) -> Result<Poly> {
        self.index_of(name)
            .map(|i| self.gen(i))
            .ok_or_else(|| Error::Parse(format!("unknown indeterminate `{name}`")))
    }

    /// Parse an expression over this ring's indeterminates using `+ - * ^`,
    /// parentheses and decimal integer literals.
    pub fn parse(&self, src: &str) -> Result<Poly> {
        parse::parse(self, src)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithKind {
    Add,
    Sub,
    Mul,
}

#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    ring: Ring,
    terms: BTreeMap<Monomial, Integer>,
}

impl Poly {
    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Terms in descending graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Integer)> {
        self.terms.iter().rev()
    }

    pub fn coeff(&self, mono: &Monomial) -> Integer {
        self.terms.get(mono).cloned().unwrap_or_default()
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &Integer)> {
        self.terms.last_key_value()
    }

    fn check_ring(&self, other: &Poly) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::Arity { expected: self.ring.arity(), got: other.ring.arity() });
        }
        Ok(())
    }

    fn add_term(&mut self, mono: Monomial, c: Integer) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(mono) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Checked ring arithmetic; operands must share a ring.
    pub fn arith(&self, rhs: &Poly, kind: ArithKind) -> Result<Poly> {
        self.check_ring(rhs)?;
        Ok(match kind {
            ArithKind::Add => self.add_unchecked(rhs),
            ArithKind::Sub => self.add_unchecked(&-rhs),
            ArithKind::Mul => self.mul_unchecked(rhs),
        })
    }

    fn add_unchecked(&self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    fn mul_unchecked(&self, rhs: &Poly) -> Poly {
        let mut acc: HashMap<Monomial, Integer> = HashMap::with_capacity(self.terms.len() * rhs.terms.len());
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                *acc.entry(m1.mul(m2)).or_default() += c1 * c2;
            }
        }
        let terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Poly { ring: self.ring.clone(), terms }
    }

    /// `self · c·mono`.
    pub fn mul_term(&self, mono: &Monomial, c: &Integer) -> Poly {
        if c.is_zero() {
            return self.ring.zero();
        }
        let terms = self.terms.iter().map(|(m, k)| (m.mul(mono), k * c)).collect();
        Poly { ring: self.ring.clone(), terms }
    }

    pub fn scale(&self, c: &Integer) -> Poly {
        self.mul_term(&Monomial::one(self.ring.arity()), c)
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = self.ring.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_unchecked(&base);
            }
        }
        acc
    }

    fn check_point_len(&self, len: usize) -> Result<()> {
        if len != self.ring.arity() {
            return Err(Error::Arity { expected: self.ring.arity(), got: len });
        }
        Ok(())
    }

    /// Exact evaluation by term summation.
    pub fn eval(&self, point: &[Ratio]) -> Result<Ratio> {
        self.check_point_len(point.len())?;
        let powers = power_table(point, &self.terms, Ratio::one());
        Ok(self.terms.iter().fold(Ratio::zero(), |acc, (m, c)| {
            let mut t = Ratio::from_integer(c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t *= &powers[i][e as usize];
                }
            }
            acc + t
        }))
    }

    /// Evaluation at an integer point.
    pub fn eval_integer(&self, point: &[Integer]) -> Result<Integer> {
        self.check_point_len(point.len())?;
        let powers = power_table(point, &self.terms, Integer::one());
        Ok(self.terms.iter().fold(Integer::zero(), |acc, (m, c)| {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t *= &powers[i][e as usize];
                }
            }
            acc + t
        }))
    }

    /// Substitute `images[i]` (polynomials over `target`) for the `i`-th
    /// indeterminate.
    pub fn compose(&self, target: &Ring, images: &[Poly]) -> Result<Poly> {
        self.check_point_len(images.len())?;
        if let Some(bad) = images.iter().find(|p| p.ring != *target) {
            return Err(Error::Arity { expected: target.arity(), got: bad.ring.arity() });
        }
        let mut max_exp = vec![0u32; images.len()];
        for m in self.terms.keys() {
            for (i, &e) in m.0.iter().enumerate() {
                max_exp[i] = max_exp[i].max(e);
            }
        }
        let powers: Vec<Vec<Poly>> = images
            .iter()
            .zip(&max_exp)
            .map(|(img, &top)| {
                let mut v = vec![target.one()];
                for k in 1..=top as usize {
                    let next = v[k - 1].mul_unchecked(img);
                    v.push(next);
                }
                v
            })
            .collect();
        let mut out = target.zero();
        for (m, c) in &self.terms {
            let mut t = target.constant(c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = t.mul_unchecked(&powers[i][e as usize]);
                }
            }
            out = out.add_unchecked(&t);
        }
        Ok(out)
    }
}

fn power_table<T>(point: &[T], terms: &BTreeMap<Monomial, Integer>, one: T) -> Vec<Vec<T>>
where
    T: Clone,
    for<'a> &'a T: Mul<&'a T, Output = T>,
{
    let mut max_exp = vec![0u32; point.len()];
    for m in terms.keys() {
        for (i, &e) in m.0.iter().enumerate() {
            max_exp[i] = max_exp[i].max(e);
        }
    }
    point
        .iter()
        .zip(max_exp)
        .map(|(x, top)| {
            let mut v = vec![one.clone()];
            for k in 1..=top as usize {
                let next = &v[k - 1] * x;
                v.push(next);
            }
            v
        })
        .collect()
}

/// `poly_arith` entry point: checked add / sub / mul.
pub fn poly_arith(lhs: &Poly, rhs: &Poly, kind: ArithKind) -> Result<Poly> {
    lhs.arith(rhs, kind)
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        let terms = self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect();
        Poly { ring: self.ring.clone(), terms }
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

// Operator forms panic on mismatched rings; `Poly::arith` is the checked API.
macro_rules! forward_binop {
    ($tr:ident, $method:ident, $kind:expr) => {
        impl $tr<&Poly> for &Poly {
            type Output = Poly;
            fn $method(self, rhs: &Poly) -> Poly {
                self.arith(rhs, $kind).expect("polynomials over different rings")
            }
        }
        impl $tr<Poly> for Poly {
            type Output = Poly;
            fn $method(self, rhs: Poly) -> Poly {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Poly> for Poly {
            type Output = Poly;
            fn $method(self, rhs: &Poly) -> Poly {
                (&self).$method(rhs)
            }
        }
        impl $tr<Poly> for &Poly {
            type Output = Poly;
            fn $method(self, rhs: Poly) -> Poly {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, ArithKind::Add);
forward_binop!(Sub, sub, ArithKind::Sub);
forward_binop!(Mul, mul, ArithKind::Mul);

impl fmt::Display for Poly {
    /// Descending graded-lex order, e.g. `p^2 - 2*p*q + 4`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms().enumerate() {
            let neg = c.is_negative();
            match (k, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let abs = c.abs();
            let factors: Vec<String> = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    let name = &self.ring.names[i];
                    if e == 1 {
                        name.clone()
                    } else {
                        format!("{name}^{e}")
                    }
                })
                .collect();
            if factors.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                f.write_str(&factors.join("*"))?;
            } else {
                write!(f, "{abs}*{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly[{}]({self})", self.ring.names.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn xy() -> Ring {
        Ring::new(&["x", "y"])
    }

    #[test]
    fn arith_examples() {
        let r = xy();
        let x = r.gen(0);
        let y = r.gen(1);
        assert!((&x + &-&x).is_zero());
        assert_eq!(&(&x + &y) * &(&x - &y), &x.pow(2) - &y.pow(2));
    }

    #[test]
    fn arity_mismatch_is_an_error() {
        let a = xy().gen(0);
        let b = Ring::new(&["x", "y", "z"]).gen(0);
        assert!(matches!(poly_arith(&a, &b, ArithKind::Add), Err(Error::Arity { .. })));
        assert!(matches!(a.eval(&[Ratio::one()]), Err(Error::Arity { expected: 2, got: 1 })));
    }

    // Second expansion route: the square of a sum as Σ cᵢ² mᵢ² + Σ_{i<j} 2 cᵢ cⱼ mᵢ mⱼ,
    // built term by term without the general multiplication routine.
    fn square_by_pairs(p: &Poly) -> Poly {
        let terms: Vec<_> = p.terms.iter().collect();
        let mut out = p.ring.zero();
        for (i, (mi, ci)) in terms.iter().enumerate() {
            out.add_term(mi.mul(mi), *ci * *ci);
            for (mj, cj) in &terms[i + 1..] {
                out.add_term(mi.mul(mj), Integer::from(2) * *ci * *cj);
            }
        }
        out
    }

    #[test]
    fn square_of_four_squares_expansion() {
        let r = Ring::new(&["p", "q", "r", "s"]);
        let base = r.parse("p^2 + q^2 - r^2 - s^2").unwrap();
        let sq = base.pow(2);
        assert_eq!(sq, square_by_pairs(&base));
        assert_eq!(sq.num_terms(), 10);
        let mut coeffs: Vec<i64> = sq.terms().map(|(_, c)| i64::try_from(c).unwrap()).collect();
        coeffs.sort();
        assert_eq!(coeffs, vec![-2, -2, -2, -2, 1, 1, 1, 1, 2, 2]);
    }

    #[test]
    fn eval_examples() {
        let r = xy();
        let p = r.parse("x^2 + y^2").unwrap();
        let pt = [Ratio::from_integer(3.into()), Ratio::from_integer(4.into())];
        assert_eq!(p.eval(&pt).unwrap(), Ratio::from_integer(25.into()));
        assert_eq!(r.zero().eval(&pt).unwrap(), Ratio::zero());

        let r4 = Ring::new(&["p", "q", "r", "s"]);
        let a2 = r4.parse("16*p*q*r*s").unwrap();
        let ints: Vec<Integer> = [2, 1, 1, 1].iter().map(|&v| Integer::from(v)).collect();
        assert_eq!(a2.eval_integer(&ints).unwrap(), Integer::from(32));
    }

    #[test]
    fn display_is_descending_grlex() {
        let r = xy();
        let p = r.parse("3 - 2*x*y + y^2 + x^2 - x").unwrap();
        assert_eq!(p.to_string(), "x^2 - 2*x*y + y^2 - x + 3");
        assert_eq!((-r.gen(1)).to_string(), "-y");
        assert_eq!(r.zero().to_string(), "0");
    }

    #[test]
    fn compose_substitutes() {
        let r = xy();
        let t = Ring::new(&["t"]);
        let p = r.parse("x^2 - y").unwrap();
        let images = [t.parse("t + 1").unwrap(), t.parse("2*t").unwrap()];
        assert_eq!(p.compose(&t, &images).unwrap(), t.parse("t^2 + 1").unwrap());
    }

    fn arb_poly(ring: Ring, max_deg: u32, coeff: i64) -> impl Strategy<Value = Poly> {
        let arity = ring.arity();
        prop::collection::vec(
            (prop::collection::vec(0..=max_deg, arity), -coeff..=coeff),
            0..6,
        )
        .prop_map(move |raw| {
            let mut p = ring.zero();
            for (exps, c) in raw {
                if exps.iter().sum::<u32>() <= max_deg {
                    p.add_term(Monomial::from_exponents(exps), Integer::from(c));
                }
            }
            p
        })
    }

    fn ring5() -> Ring {
        Ring::new(&["a", "b", "c", "d", "e"])
    }

    fn arb_point() -> impl Strategy<Value = Vec<Ratio>> {
        prop::collection::vec((-9i64..=9, 1i64..=5), 5).prop_map(|v| {
            v.into_iter().map(|(n, d)| Ratio::new(n.into(), d.into())).collect()
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(p in arb_poly(ring5(), 4, 9), q in arb_poly(ring5(), 4, 9), s in arb_poly(ring5(), 4, 9)) {
            prop_assert_eq!(&(&p + &q) + &s, &p + &(&q + &s));
            prop_assert_eq!(&(&p * &q) * &s, &p * &(&q * &s));
            prop_assert_eq!(&p * &q, &q * &p);
            prop_assert_eq!(&p + &q, &q + &p);
            prop_assert_eq!(&p * &(&q + &s), &(&p * &q) + &(&p * &s));
        }

        #[test]
        fn eval_is_a_homomorphism(p in arb_poly(ring5(), 4, 9), q in arb_poly(ring5(), 4, 9), x in arb_point()) {
            let lhs = (&p * &q).eval(&x).unwrap();
            prop_assert_eq!(lhs, p.eval(&x).unwrap() * q.eval(&x).unwrap());
            let sum = (&p + &q).eval(&x).unwrap();
            prop_assert_eq!(sum, p.eval(&x).unwrap() + q.eval(&x).unwrap());
        }

        #[test]
        fn pairwise_square_matches_multiplication(p in arb_poly(ring5(), 3, 9)) {
            prop_assert_eq!(p.pow(2), square_by_pairs(&p));
        }
    }
}
