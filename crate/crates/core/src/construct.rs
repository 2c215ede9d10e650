//! Moving between solution pairs `(A, B)` and compatible semi-magic
//! matrices of squares, plus the shift/scale normal form.

use std::fmt;

use num_traits::{Signed, Zero};

use crate::arith::{format_ratio, gcd_all, is_rational_square, lcm_denominators, square_part, Integer, Ratio};
use crate::error::{Error, Result};
use crate::matrix::{check_matrix, condition_failures, Condition, SquareMatrix3};

/// Sets `A = {a_1..a_m}` and `B = {b_1..b_n}`; the shape is `(a.len(), b.len())`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SolutionPair {
    pub a: Vec<Ratio>,
    pub b: Vec<Ratio>,
}

impl SolutionPair {
    pub fn new(a: Vec<Ratio>, b: Vec<Ratio>) -> Self {
        SolutionPair { a, b }
    }

    pub fn from_integers(a: &[i64], b: &[i64]) -> Self {
        let conv = |xs: &[i64]| xs.iter().map(|&x| Ratio::from_integer(x.into())).collect();
        SolutionPair { a: conv(a), b: conv(b) }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.a.len(), self.b.len())
    }

    /// Integral, `b` starts at 0, both lists ascending, and the nonzero
    /// entries share no square factor.
    pub fn is_canonical(&self) -> bool {
        let all = || self.a.iter().chain(&self.b);
        if !all().all(Ratio::is_integer) {
            return false;
        }
        if !(self.a.is_sorted() && self.b.is_sorted()) {
            return false;
        }
        if self.b.first().is_some_and(|b| !b.is_zero()) {
            return false;
        }
        let ints: Vec<Integer> = all().filter(|x| !x.is_zero()).map(|x| x.to_integer()).collect();
        let g = gcd_all(&ints);
        g.is_zero() || square_part(&g).is_ok_and(|s| s == Integer::from(1))
    }
}

impl fmt::Display for SolutionPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |xs: &[Ratio]| xs.iter().map(format_ratio).collect::<Vec<_>>().join(", ");
        write!(f, "A = {{{}}}\nB = {{{}}}", join(&self.a), join(&self.b))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    pub ok: bool,
    /// 1-based `(i, j, a_i + b_j)` for each non-square sum.
    pub failures: Vec<(usize, usize, Ratio)>,
    pub duplicate_a: bool,
    pub duplicate_b: bool,
}

fn has_duplicates(xs: &[Ratio]) -> bool {
    let mut v: Vec<&Ratio> = xs.iter().collect();
    v.sort();
    v.windows(2).any(|w| w[0] == w[1])
}

pub fn verify_pair(p: &SolutionPair) -> VerifyReport {
    let mut failures = Vec::new();
    for (i, a) in p.a.iter().enumerate() {
        for (j, b) in p.b.iter().enumerate() {
            let sum = a + b;
            if !is_rational_square(&sum) {
                failures.push((i + 1, j + 1, sum));
            }
        }
    }
    VerifyReport {
        ok: failures.is_empty(),
        failures,
        duplicate_a: has_duplicates(&p.a),
        duplicate_b: has_duplicates(&p.b),
    }
}

/// `a_i ↦ k²a_i − t`, `b_j ↦ k²b_j + t`; every sum is multiplied by `k²`.
pub fn shift_scale(p: &SolutionPair, k: &Ratio, t: &Integer) -> Result<SolutionPair> {
    if k.is_zero() {
        return Err(Error::Domain("scale factor k must be nonzero".into()));
    }
    let k2 = k * k;
    let t = Ratio::from_integer(t.clone());
    Ok(SolutionPair {
        a: p.a.iter().map(|a| &k2 * a - &t).collect(),
        b: p.b.iter().map(|b| &k2 * b + &t).collect(),
    })
}

fn require_valid(name: &str, m: &SquareMatrix3) -> Result<()> {
    let rep = check_matrix(m);
    if !rep.semi_magic {
        return Err(Error::Rejected(format!("{name} is not semi-magic")));
    }
    if !rep.all_entries_square {
        return Err(Error::Rejected(format!("{name} has non-square entries at {:?}", rep.failing_cells)));
    }
    Ok(())
}

fn require_condition(cond: Condition, first: &SquareMatrix3, second: &SquareMatrix3) -> Result<()> {
    let failed = condition_failures(cond, first, second);
    if let Some(((r1, c1), (r2, c2))) = failed.first() {
        return Err(Error::Rejected(format!("{cond} fails: cell ({r1},{c1}) != cell ({r2},{c2})")));
    }
    Ok(())
}

/// `a = (e13², e31², e22²)`, `b = (0, e21² − e13², e11² − e22²)`.
fn base_triples(e: &SquareMatrix3) -> (Vec<Ratio>, Vec<Ratio>) {
    let a = vec![e.at(1, 3).clone(), e.at(3, 1).clone(), e.at(2, 2).clone()];
    let b = vec![Ratio::zero(), e.at(2, 1) - e.at(1, 3), e.at(1, 1) - e.at(2, 2)];
    (a, b)
}

pub fn triples_from_e(e: &SquareMatrix3) -> Result<SolutionPair> {
    require_valid("E", e)?;
    let (a, b) = base_triples(e);
    Ok(SolutionPair { a, b })
}

/// Adds `a4 = f13²`, `a5 = f31²` to the triples of `E`.
pub fn quint_from_ef(e: &SquareMatrix3, f: &SquareMatrix3) -> Result<SolutionPair> {
    require_valid("E", e)?;
    require_valid("F", f)?;
    require_condition(Condition::EF, e, f)?;
    let (mut a, b) = base_triples(e);
    a.push(f.at(1, 3).clone());
    a.push(f.at(3, 1).clone());
    Ok(SolutionPair { a, b })
}

/// Adds `a4 = g22²`, `b4 = g11² − g22²` to the triples of `E`.
pub fn quads_from_egh(e: &SquareMatrix3, g: &SquareMatrix3, h: &SquareMatrix3) -> Result<SolutionPair> {
    require_valid("E", e)?;
    require_valid("G", g)?;
    require_valid("H", h)?;
    require_condition(Condition::EG, e, g)?;
    require_condition(Condition::EH, e, h)?;
    require_condition(Condition::GH, g, h)?;
    let (mut a, mut b) = base_triples(e);
    a.push(g.at(2, 2).clone());
    b.push(g.at(1, 1) - g.at(2, 2));
    Ok(SolutionPair { a, b })
}

/// Matrix whose `(r, c)` entry is `a[ai[r][c]] + b[bi[r][c]]` (1-based indices).
fn sum_matrix(p: &SolutionPair, ai: [[usize; 3]; 3], bi: [[usize; 3]; 3]) -> SquareMatrix3 {
    SquareMatrix3::new(std::array::from_fn(|r| std::array::from_fn(|c| &p.a[ai[r][c] - 1] + &p.b[bi[r][c] - 1])))
}

const E1: ([[usize; 3]; 3], [[usize; 3]; 3]) = ([[3, 2, 1], [1, 3, 2], [2, 1, 3]], [[3, 2, 1], [2, 1, 3], [1, 3, 2]]);
const F1: ([[usize; 3]; 3], [[usize; 3]; 3]) = ([[3, 5, 4], [4, 3, 5], [5, 4, 3]], [[3, 2, 1], [2, 1, 3], [1, 3, 2]]);
const G1: ([[usize; 3]; 3], [[usize; 3]; 3]) = ([[4, 2, 1], [1, 4, 2], [2, 1, 4]], [[4, 2, 1], [2, 1, 4], [1, 4, 2]]);
const H1: ([[usize; 3]; 3], [[usize; 3]; 3]) = ([[3, 4, 1], [1, 3, 4], [4, 1, 3]], [[3, 4, 1], [4, 1, 3], [1, 3, 4]]);

/// `[E1]`, `[E1, F1]` or `[E1, G1, H1]` for shapes (3,3), (5,3), (4,4).
pub fn matrices_from_solution(p: &SolutionPair) -> Result<Vec<SquareMatrix3>> {
    if !verify_pair(p).ok {
        return Err(Error::Rejected("pair does not verify".into()));
    }
    let tables: &[_] = match p.shape() {
        (3, 3) => &[E1],
        (5, 3) => &[E1, F1],
        (4, 4) => &[E1, G1, H1],
        (m, n) => return Err(Error::Rejected(format!("unsupported shape ({m},{n})"))),
    };
    Ok(tables.iter().map(|(ai, bi)| sum_matrix(p, *ai, *bi)).collect())
}

/// Scale to integers, shift so `min b = 0`, strip the common square factor,
/// sort. The all-zero pair is returned unchanged.
pub fn canonicalize(p: &SolutionPair) -> Result<SolutionPair> {
    if !verify_pair(p).ok {
        return Err(Error::Rejected("pair does not verify".into()));
    }
    let k = Ratio::from_integer(lcm_denominators(p.a.iter().chain(&p.b)));
    let t = match p.b.iter().min() {
        Some(min_b) => -(&k * &k * min_b).to_integer(),
        None => Integer::zero(),
    };
    let mut q = shift_scale(p, &k, &t)?;
    let nonzero: Vec<Integer> = q.a.iter().chain(&q.b).filter(|x| !x.is_zero()).map(|x| x.to_integer()).collect();
    let g = gcd_all(&nonzero);
    if !g.is_zero() {
        let s = square_part(&g)?;
        let s2 = Ratio::from_integer(&s * &s);
        for x in q.a.iter_mut().chain(q.b.iter_mut()) {
            *x = &*x / &s2;
        }
    }
    q.a.sort();
    q.b.sort();
    assert!(q.a.iter().all(|a| !a.is_negative()), "canonical a must be nonnegative: {q}");
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{build_quad44_triple, build_thm35_pair, euler_matrix, Quad44Variant};
    use proptest::prelude::*;

    fn i(n: i64) -> Integer {
        Integer::from(n)
    }

    fn pair(a: &[i64], b: &[i64]) -> SolutionPair {
        SolutionPair::from_integers(a, b)
    }

    #[test]
    fn verify_examples() {
        let p = pair(&[324, 54756, 119716, 264196], &[0, 79200, 227205, 1258560]);
        assert!(verify_pair(&p).ok);
        assert!(verify_pair(&pair(&[0], &[0])).ok);
        let rep = verify_pair(&pair(&[1], &[1]));
        assert!(!rep.ok);
        assert_eq!(rep.failures, vec![(1, 1, Ratio::from_integer(i(2)))]);
        let rep = verify_pair(&pair(&[1, 1], &[0, 3]));
        assert!(rep.ok && rep.duplicate_a && !rep.duplicate_b);
    }

    #[test]
    fn shift_scale_examples() {
        let p = pair(&[4, 169, 484], &[0, 192, 672]);
        assert_eq!(shift_scale(&p, &Ratio::from_integer(i(1)), &i(0)).unwrap(), p);
        assert!(shift_scale(&p, &Ratio::zero(), &i(0)).is_err());
        let q = shift_scale(&p, &Ratio::new(i(2), i(3)), &i(-7)).unwrap();
        assert!(verify_pair(&q).ok);
    }

    #[test]
    fn triples_from_euler() {
        let p = triples_from_e(&euler_matrix(&i(5), &i(3), &i(2), &i(1))).unwrap();
        assert_eq!(canonicalize(&p).unwrap(), pair(&[4, 169, 484], &[0, 192, 672]));

        let ones = SquareMatrix3::from_integers([[1; 3]; 3]);
        let p = triples_from_e(&ones).unwrap();
        assert_eq!(p, pair(&[1, 1, 1], &[0, 0, 0]));
        let rep = verify_pair(&p);
        assert!(rep.ok && rep.duplicate_a && rep.duplicate_b);

        assert!(verify_pair(&triples_from_e(&euler_matrix(&i(2), &i(1), &i(1), &i(1))).unwrap()).ok);

        let bad = SquareMatrix3::from_integers([[2, 0, 0], [0, 2, 0], [0, 0, 2]]);
        assert!(matches!(triples_from_e(&bad), Err(Error::Rejected(_))));
    }

    #[test]
    fn quint_from_pair() {
        let (e, f) = build_thm35_pair(&i(4), &i(1), &i(3), &i(2), &i(1), &i(3), &i(1));
        let p = quint_from_ef(&e, &f).unwrap();
        assert!(verify_pair(&p).ok);
        assert_eq!(
            canonicalize(&p).unwrap(),
            pair(&[198916, 532900, 1674436, 13468900, 19404025], &[0, 3588000, 8527200])
        );

        let e = euler_matrix(&i(5), &i(3), &i(2), &i(1));
        let p = quint_from_ef(&e, &e).unwrap();
        assert_eq!((&p.a[3], &p.a[4]), (&p.a[0], &p.a[1]));
        let rep = verify_pair(&p);
        assert!(rep.ok && rep.duplicate_a);

        let other = euler_matrix(&i(2), &i(1), &i(1), &i(1));
        let err = quint_from_ef(&e, &other).unwrap_err().to_string();
        assert!(err.contains("relef") && err.contains("(1,1)"), "{err}");
    }

    #[test]
    fn quads_from_triple() {
        let tr = build_quad44_triple(&i(2), &i(1), &i(3), Quad44Variant::B).unwrap();
        let p = quads_from_egh(&tr.e, &tr.g, &tr.h).unwrap();
        assert_eq!(
            canonicalize(&p).unwrap(),
            pair(&[14400, 266256, 435600, 12110400], &[0, 104625, 223744, 12096000])
        );

        let tr = build_quad44_triple(&i(3), &i(2), &i(1), Quad44Variant::C).unwrap();
        assert!(verify_pair(&quads_from_egh(&tr.e, &tr.g, &tr.h).unwrap()).ok);

        let flat = SquareMatrix3::from_integers([[4; 3]; 3]);
        let p = quads_from_egh(&flat, &flat, &flat).unwrap();
        assert_eq!(p, pair(&[4, 4, 4, 4], &[0, 0, 0, 0]));
        assert!(verify_pair(&p).ok);

        let e = euler_matrix(&i(5), &i(3), &i(2), &i(1));
        let err = quads_from_egh(&e, &flat, &flat).unwrap_err().to_string();
        assert!(err.contains("releg"), "{err}");
    }

    #[test]
    fn matrices_from_triples() {
        let p = pair(&[4, 169, 484], &[0, 192, 672]);
        let ms = matrices_from_solution(&p).unwrap();
        assert_eq!(ms.len(), 1);
        let rep = check_matrix(&ms[0]);
        assert!(rep.is_valid());
        let total: i64 = [4, 169, 484, 0, 192, 672].iter().sum();
        assert_eq!(total, 1521);
        assert_eq!(rep.magic_sum, Some(Ratio::from_integer(i(total))));

        // Round trip through E1 lands on the same canonical pair.
        let back = triples_from_e(&ms[0]).unwrap();
        assert_eq!(canonicalize(&back).unwrap(), p);

        assert!(matrices_from_solution(&pair(&[1], &[1])).is_err());
        assert!(matrices_from_solution(&pair(&[0, 0], &[0, 0])).is_err());
    }

    #[test]
    fn matrices_from_quadruples() {
        let p = pair(&[324, 54756, 119716, 264196], &[0, 79200, 227205, 1258560]);
        let ms = matrices_from_solution(&p).unwrap();
        for m in &ms {
            assert!(check_matrix(m).is_valid());
        }
        assert!(check_conditions(Condition::EG, &ms[0], &ms[1]));
        assert!(check_conditions(Condition::EH, &ms[0], &ms[2]));
        assert!(check_conditions(Condition::GH, &ms[1], &ms[2]));
        let sum = |ai: &[usize], bi: &[usize]| -> Ratio {
            ai.iter().map(|&k| &p.a[k - 1]).sum::<Ratio>() + bi.iter().map(|&k| &p.b[k - 1]).sum::<Ratio>()
        };
        assert_eq!(check_matrix(&ms[0]).magic_sum, Some(sum(&[1, 2, 3], &[1, 2, 3])));
        assert_eq!(check_matrix(&ms[1]).magic_sum, Some(sum(&[1, 2, 4], &[1, 2, 4])));
        assert_eq!(check_matrix(&ms[2]).magic_sum, Some(sum(&[1, 3, 4], &[1, 3, 4])));

        let back = quads_from_egh(&ms[0], &ms[1], &ms[2]).unwrap();
        assert_eq!(canonicalize(&back).unwrap(), canonicalize(&p).unwrap());
    }

    #[test]
    fn matrices_from_quintuple() {
        let p = pair(&[198916, 532900, 1674436, 13468900, 19404025], &[0, 3588000, 8527200]);
        let ms = matrices_from_solution(&p).unwrap();
        assert!(ms.iter().all(|m| check_matrix(m).is_valid()));
        assert!(check_conditions(Condition::EF, &ms[0], &ms[1]));
        let total: Ratio = [&p.a[2], &p.a[3], &p.a[4]].into_iter().chain(&p.b).sum();
        assert_eq!(check_matrix(&ms[1]).magic_sum, Some(total));
        let back = quint_from_ef(&ms[0], &ms[1]).unwrap();
        assert_eq!(canonicalize(&back).unwrap(), p);
    }

    #[test]
    fn canonicalize_examples() {
        let p = pair(&[4, 169, 484], &[0, 192, 672]);
        assert!(p.is_canonical());
        assert_eq!(canonicalize(&p).unwrap(), p);
        let moved = shift_scale(&p, &Ratio::from_integer(i(3)), &i(5)).unwrap();
        assert_eq!(canonicalize(&moved).unwrap(), p);
        let frac = shift_scale(&p, &Ratio::new(i(1), i(6)), &i(-2)).unwrap();
        assert_eq!(canonicalize(&frac).unwrap(), p);
        let zero = pair(&[0, 0], &[0]);
        assert_eq!(canonicalize(&zero).unwrap(), zero);
        assert!(canonicalize(&pair(&[1], &[1])).is_err());
        assert!(!pair(&[16, 4], &[0, 12]).is_canonical());
        assert!(!pair(&[4, 16], &[0, 12]).is_canonical());
    }

    use crate::matrix::check_conditions;

    fn arb_verified() -> impl Strategy<Value = SolutionPair> {
        (1i64..=12, 1i64..=12, 1i64..=12, 1i64..=12).prop_filter_map("degenerate", |(p, q, r, s)| {
            triples_from_e(&euler_matrix(&i(p), &i(q), &i(r), &i(s))).ok()
        })
    }

    proptest! {
        #[test]
        fn shift_scale_preserves_verification(p in arb_verified(), kn in -20i64..=20, kd in 1i64..=20, t in -1000i64..=1000) {
            prop_assume!(kn != 0);
            let q = shift_scale(&p, &Ratio::new(i(kn), i(kd)), &i(t)).unwrap();
            prop_assert!(verify_pair(&q).ok);
        }

        #[test]
        fn canonical_is_idempotent(p in arb_verified(), kn in 1i64..=20, kd in 1i64..=20, t in -1000i64..=1000) {
            let q = shift_scale(&p, &Ratio::new(i(kn), i(kd)), &i(t)).unwrap();
            let c = canonicalize(&q).unwrap();
            prop_assert!(c.is_canonical());
            prop_assert_eq!(canonicalize(&c).unwrap(), c.clone());
            prop_assert_eq!(&c, &canonicalize(&p).unwrap());
            for a in &c.a {
                prop_assert!(crate::arith::is_perfect_square(&a.to_integer()));
            }
        }

        #[test]
        fn euler_round_trip(p in 1i64..=15, q in 1i64..=15, r in 1i64..=15, s in 1i64..=15) {
            let sol = triples_from_e(&euler_matrix(&i(p), &i(q), &i(r), &i(s))).unwrap();
            let ms = matrices_from_solution(&sol).unwrap();
            let rep = check_matrix(&ms[0]);
            prop_assert!(rep.is_valid());
            let total: Ratio = sol.a.iter().chain(&sol.b).sum();
            prop_assert_eq!(rep.magic_sum, Some(total));
        }

        #[test]
        fn thm35_output_verifies(f in -9i64..=9, g in -9i64..=9, m in -9i64..=9, u1 in -9i64..=9, u2 in -9i64..=9, v1 in -9i64..=9, v2 in -9i64..=9) {
            let (e, ff) = build_thm35_pair(&i(f), &i(g), &i(m), &i(u1), &i(u2), &i(v1), &i(v2));
            prop_assert!(verify_pair(&quint_from_ef(&e, &ff).unwrap()).ok);
        }
    }
}
