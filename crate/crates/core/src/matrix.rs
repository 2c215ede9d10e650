//! 3×3 semi-magic matrices of squares: Euler's parametric matrix, the
//! derived `G` and `H` matrices, and the cell-equality conditions that let
//! several such matrices share one solution pair.

use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::{is_rational_square, lcm_denominators, Integer, Ratio};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquareMatrix3 {
    pub entries: [[Ratio; 3]; 3],
}

fn ri(n: &Integer) -> Ratio {
    Ratio::from_integer(n.clone())
}

impl SquareMatrix3 {
    pub fn new(entries: [[Ratio; 3]; 3]) -> Self {
        SquareMatrix3 { entries }
    }

    /// Matrix whose entries are the squares of `roots`.
    pub fn from_roots(roots: &[[Ratio; 3]; 3]) -> Self {
        SquareMatrix3 { entries: roots.clone().map(|row| row.map(|x| &x * &x)) }
    }

    pub fn from_integers(rows: [[i64; 3]; 3]) -> Self {
        SquareMatrix3 { entries: rows.map(|row| row.map(|x| Ratio::from_integer(x.into()))) }
    }

    /// 1-based access, matching the usual `e_ij` naming.
    pub fn at(&self, row: usize, col: usize) -> &Ratio {
        &self.entries[row - 1][col - 1]
    }

    pub fn scale(&self, k: &Ratio) -> Self {
        SquareMatrix3 { entries: self.entries.clone().map(|row| row.map(|x| x * k)) }
    }

    pub fn row_sums(&self) -> [Ratio; 3] {
        std::array::from_fn(|i| self.entries[i].iter().sum())
    }

    pub fn col_sums(&self) -> [Ratio; 3] {
        std::array::from_fn(|j| self.entries.iter().map(|row| &row[j]).sum())
    }
}

impl fmt::Display for SquareMatrix3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.entries {
            let cells: Vec<String> = row.iter().map(crate::arith::format_ratio).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MatrixReport {
    pub semi_magic: bool,
    /// Common row/column sum; `None` when the matrix is not semi-magic.
    #[serde(serialize_with = "crate::io::ser_opt_ratio")]
    pub magic_sum: Option<Ratio>,
    pub all_entries_square: bool,
    /// 1-based `(row, col)` of entries that are not squares of rationals.
    pub failing_cells: Vec<(usize, usize)>,
}

impl MatrixReport {
    pub fn is_valid(&self) -> bool {
        self.semi_magic && self.all_entries_square
    }
}

pub fn check_matrix(m: &SquareMatrix3) -> MatrixReport {
    let rows = m.row_sums();
    let cols = m.col_sums();
    let first = &rows[0];
    let semi_magic = rows.iter().chain(cols.iter()).all(|s| s == first);
    let mut failing_cells = Vec::new();
    for (i, row) in m.entries.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            if !is_rational_square(x) {
                failing_cells.push((i + 1, j + 1));
            }
        }
    }
    MatrixReport {
        semi_magic,
        magic_sum: semi_magic.then(|| first.clone()),
        all_entries_square: failing_cells.is_empty(),
        failing_cells,
    }
}

/// Cell-equality condition sets between two matrices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Condition {
    /// `E`/`F`: diagonals agree.
    EF,
    /// `E`/`G`: cells (1,2), (1,3), (2,1), (3,1) agree.
    EG,
    /// `E`/`H`: cells (1,1), (2,2) agree.
    EH,
    /// `G`/`H`: `G(1,1) = H(1,2)` and `G(2,2) = H(3,1)`.
    GH,
}

type Cell = (usize, usize);

impl Condition {
    pub const ALL: [Condition; 4] = [Condition::EF, Condition::EG, Condition::EH, Condition::GH];

    pub fn name(self) -> &'static str {
        match self {
            Condition::EF => "relef",
            Condition::EG => "releg",
            Condition::EH => "releh",
            Condition::GH => "relgh",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == s)
    }

    /// `(cell in first, cell in second)` pairs that must hold equal entries.
    pub fn cells(self) -> &'static [(Cell, Cell)] {
        match self {
            Condition::EF => &[((1, 1), (1, 1)), ((2, 2), (2, 2)), ((3, 3), (3, 3))],
            Condition::EG => &[((1, 2), (1, 2)), ((1, 3), (1, 3)), ((2, 1), (2, 1)), ((3, 1), (3, 1))],
            Condition::EH => &[((1, 1), (1, 1)), ((2, 2), (2, 2))],
            Condition::GH => &[((1, 1), (1, 2)), ((2, 2), (3, 1))],
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Cell pairs of `cond` that do not hold between `first` and `second`.
pub fn condition_failures(cond: Condition, first: &SquareMatrix3, second: &SquareMatrix3) -> Vec<(Cell, Cell)> {
    cond.cells()
        .iter()
        .filter(|((r1, c1), (r2, c2))| first.at(*r1, *c1) != second.at(*r2, *c2))
        .copied()
        .collect()
}

pub fn check_conditions(cond: Condition, first: &SquareMatrix3, second: &SquareMatrix3) -> bool {
    condition_failures(cond, first, second).is_empty()
}

/// Entry roots of Euler's matrix; the matrix is their elementwise square.
pub fn euler_roots(p: &Integer, q: &Integer, r: &Integer, s: &Integer) -> [[Integer; 3]; 3] {
    let (p2, q2, r2, s2) = (p * p, q * q, r * r, s * s);
    let two = Integer::from(2);
    [
        [&p2 + &q2 - &r2 - &s2, &two * (q * r + p * s), &two * (q * s - p * r)],
        [&two * (q * r - p * s), &p2 - &q2 + &r2 - &s2, &two * (p * q + r * s)],
        [&two * (q * s + p * r), &two * (r * s - p * q), &p2 - &q2 - &r2 + &s2],
    ]
}

/// Euler's semi-magic matrix of squares, magic sum `(p²+q²+r²+s²)²`.
pub fn euler_matrix(p: &Integer, q: &Integer, r: &Integer, s: &Integer) -> SquareMatrix3 {
    SquareMatrix3::from_roots(&euler_roots(p, q, r, s).map(|row| row.map(|x| ri(&x))))
}

/// Roots of `G`: Euler's matrix with `p, q` replaced by `mp, mq`, divided by `m²`.
pub fn g_roots(m: &Ratio, p: &Integer, q: &Integer, r: &Integer, s: &Integer) -> Result<[[Ratio; 3]; 3]> {
    if m.is_zero() {
        return Err(Error::Domain("G needs m != 0".into()));
    }
    let (p, q, r, s) = (ri(p), ri(q), ri(r), ri(s));
    let m2 = m * m;
    let two = Ratio::from_integer(2.into());
    let g11 = (&m2 * &p * &p + &m2 * &q * &q - &r * &r - &s * &s) / m;
    let g22 = (&m2 * &p * &p - &m2 * &q * &q + &r * &r - &s * &s) / m;
    let g33 = (&m2 * &p * &p - &m2 * &q * &q - &r * &r + &s * &s) / m;
    Ok([
        [g11, &two * (&q * &r + &p * &s), &two * (&q * &s - &p * &r)],
        [&two * (&q * &r - &p * &s), g22, &two * (&m2 * &p * &q + &r * &s) / m],
        [&two * (&q * &s + &p * &r), &two * (&m2 * &p * &q - &r * &s) / m, g33],
    ])
}

pub fn build_g(m: &Ratio, p: &Integer, q: &Integer, r: &Integer, s: &Integer) -> Result<SquareMatrix3> {
    Ok(SquareMatrix3::from_roots(&g_roots(m, p, q, r, s)?))
}

/// Roots of `H`: Euler's matrix at
/// `((n+1)p − (n−1)s)/2, ((n+1)q − (n−1)r)/2, ((1−n)q + (n+1)r)/2, ((1−n)p + (n+1)s)/2`,
/// divided by `n²`.
pub fn h_roots(n: &Ratio, p: &Integer, q: &Integer, r: &Integer, s: &Integer) -> Result<[[Ratio; 3]; 3]> {
    if n.is_zero() {
        return Err(Error::Domain("H needs n != 0".into()));
    }
    let (p, q, r, s) = (ri(p), ri(q), ri(r), ri(s));
    let n2 = n * n;
    let two = Ratio::from_integer(2.into());
    let two_n = &two * n;
    let h12 = ((&p * &p - &two * &p * &s + &q * &q - &two * &q * &r + &r * &r + &s * &s) * &n2
        - &p * &p
        - &two * &p * &s
        - &q * &q
        - &two * &q * &r
        - &r * &r
        - &s * &s)
        / &two_n;
    let h21 = ((&p - &q + &r - &s) * (&p + &q - &r - &s) * &n2 - (&p + &q + &r + &s) * (&p - &q - &r + &s)) / &two_n;
    let h23 = ((&q - &r) * (&p - &s) * &n2 + (&q + &r) * (&p + &s)) / n;
    let h31 = ((&q - &r) * (&p - &s) * &n2 - (&q + &r) * (&p + &s)) / n;
    let h33 = ((&p - &q + &r - &s) * (&p + &q - &r - &s) * &n2 + (&p + &q + &r + &s) * (&p - &q - &r + &s)) / &two_n;
    Ok([
        [&p * &p + &q * &q - &r * &r - &s * &s, h12, &two * (&q * &s - &p * &r)],
        [h21, &p * &p - &q * &q + &r * &r - &s * &s, h23],
        [h31, &two * (&r * &s - &p * &q), h33],
    ])
}

pub fn build_h(n: &Ratio, p: &Integer, q: &Integer, r: &Integer, s: &Integer) -> Result<SquareMatrix3> {
    Ok(SquareMatrix3::from_roots(&h_roots(n, p, q, r, s)?))
}

/// Euler parameters `(p₁,q₁,r₁,s₁)` and `(p₂,q₂,r₂,s₂)` of the quintuple
/// construction, with `e = g·m·v₁·v₂` and `h = f·m·u₁·u₂`.
pub fn thm35_euler_params(
    f: &Integer,
    g: &Integer,
    m: &Integer,
    u1: &Integer,
    u2: &Integer,
    v1: &Integer,
    v2: &Integer,
) -> ([Integer; 4], [Integer; 4]) {
    let e = g * m * v1 * v2;
    let h = f * m * u1 * u2;
    let first = [&e * u1 + f * u2, &e * u2 + f * u1, g * v1 + &h * v2, g * v2 + &h * v1];
    let second = [&e * u1 - f * u2, &e * u2 - f * u1, g * v1 - &h * v2, g * v2 - &h * v1];
    (first, second)
}

/// The `E`, `F` pair behind the quintuple family; always satisfies `relef`.
pub fn build_thm35_pair(
    f: &Integer,
    g: &Integer,
    m: &Integer,
    u1: &Integer,
    u2: &Integer,
    v1: &Integer,
    v2: &Integer,
) -> (SquareMatrix3, SquareMatrix3) {
    let ([p1, q1, r1, s1], [p2, q2, r2, s2]) = thm35_euler_params(f, g, m, u1, u2, v1, v2);
    (euler_matrix(&p1, &q1, &r1, &s1), euler_matrix(&p2, &q2, &r2, &s2))
}

/// Which root `(t, n)` of the `n`-quadratic is used for `H`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quad44Variant {
    /// `n = 4m(m²−1)/(m²+1)²`, closed-form `p, s`.
    B,
    /// `n = −(m+1)/(m−1)`, `p, s` from the linear solve.
    C,
}

impl Quad44Variant {
    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "B" | "b" => Some(Quad44Variant::B),
            "C" | "c" => Some(Quad44Variant::C),
            _ => None,
        }
    }
}

/// `t = 2(m+1)/(m²+1)`.
pub fn quad44_t(m: &Ratio) -> Ratio {
    let one = Ratio::one();
    (m + &one) * Ratio::from_integer(2.into()) / (m * m + &one)
}

/// The two rational roots in `n` paired with [`quad44_t`].
pub fn quad44_n(m: &Ratio, variant: Quad44Variant) -> Ratio {
    let one = Ratio::one();
    match variant {
        Quad44Variant::B => Ratio::from_integer(4.into()) * m * (m * m - &one) / ((m * m + &one) * (m * m + &one)),
        Quad44Variant::C => -(m + &one) / (m - &one),
    }
}

/// `p, s` solving `g₁₁ = −h₁₂`, `g₂₂ = −h₃₁` linearly for given `(m, q, r, t, n)`.
pub fn solve_p_s(m: &Ratio, q: &Ratio, r: &Ratio, t: &Ratio, n: &Ratio) -> Result<(Ratio, Ratio)> {
    let one = Ratio::one();
    let two = Ratio::from_integer(2.into());
    let den = &two * m * n * t;
    if den.is_zero() {
        return Err(Error::Domain("2·m·n·t vanishes".into()));
    }
    let mq_r = m * q + r;
    let mq_mr = m * q - r;
    let t2 = t * t;
    let p = -(m * (n - &one) * &mq_r * &t2 - &two * q * m * n * t + n * (n + &one) * &mq_mr) / &den;
    let s = -(m * (n + &one) * &mq_r * &t2 - &two * r * m * n * t + n * (n - &one) * &mq_mr) / &den;
    Ok((p, s))
}

/// Closed-form `p, s` of variant B.
pub fn variant_b_p_s(m: &Ratio, q: &Ratio, r: &Ratio) -> (Ratio, Ratio) {
    let m2 = m * m;
    let m4 = &m2 * &m2;
    let c = |a: i64, b: i64, k: i64| &m4 * Ratio::from_integer(a.into()) + &m2 * Ratio::from_integer(b.into()) + Ratio::from_integer(k.into());
    let den = Ratio::from_integer(2.into()) * (&m4 - Ratio::one());
    let p = -(c(1, -6, 1) * q - c(1, -2, 5) * r) / &den;
    let s = -(c(5, -2, 1) * q - c(1, -6, 1) * r) / &den;
    (p, s)
}

/// Three matrices `E`, `G`, `H` satisfying `releg`, `releh` and `relgh`.
#[derive(Clone, Debug)]
pub struct Quad44Triple {
    pub e: SquareMatrix3,
    pub g: SquareMatrix3,
    pub h: SquareMatrix3,
    pub variant: Quad44Variant,
    pub t: Ratio,
    pub n: Ratio,
    /// Integer Euler parameters after clearing the denominators of `p, s`.
    pub pqrs: [Integer; 4],
    pub g_roots: [[Ratio; 3]; 3],
    pub h_roots: [[Ratio; 3]; 3],
}

impl Quad44Triple {
    pub fn matrices(&self) -> (&SquareMatrix3, &SquareMatrix3, &SquareMatrix3) {
        (&self.e, &self.g, &self.h)
    }

    /// `g₁₁ = −h₁₂` and `g₂₂ = −h₃₁` on the roots.
    pub fn sign_equations_hold(&self) -> bool {
        self.g_roots[0][0] == -&self.h_roots[0][1] && self.g_roots[1][1] == -&self.h_roots[2][0]
    }
}

pub fn build_quad44_triple(m: &Integer, q: &Integer, r: &Integer, variant: Quad44Variant) -> Result<Quad44Triple> {
    if m.is_zero() || m.magnitude().is_one() {
        return Err(Error::Domain(format!("m must avoid 0 and ±1, got {m}")));
    }
    let (mr, qr, rr) = (ri(m), ri(q), ri(r));
    let t = quad44_t(&mr);
    let n = quad44_n(&mr, variant);
    let (p, s) = match variant {
        Quad44Variant::B => variant_b_p_s(&mr, &qr, &rr),
        Quad44Variant::C => solve_p_s(&mr, &qr, &rr, &t, &n)?,
    };
    // Every matrix is homogeneous of degree 4 in (p, q, r, s): scaling the
    // four parameters by the common denominator keeps all conditions.
    let k = Ratio::from_integer(lcm_denominators([&p, &qr, &rr, &s]));
    let pqrs = [&p * &k, &qr * &k, &rr * &k, &s * &k].map(|x| x.to_integer());
    let [pi, qi, rri, si] = &pqrs;
    let g_roots = g_roots(&mr, pi, qi, rri, si)?;
    let h_roots = h_roots(&n, pi, qi, rri, si)?;
    Ok(Quad44Triple {
        e: euler_matrix(pi, qi, rri, si),
        g: SquareMatrix3::from_roots(&g_roots),
        h: SquareMatrix3::from_roots(&h_roots),
        variant,
        t,
        n,
        pqrs,
        g_roots,
        h_roots,
    })
}
