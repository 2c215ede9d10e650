//! Closed-form parametric families of square sumsets.
//!
//! Each family is written down once as a symbolic system over its parameter
//! ring; numeric generation is evaluation of that system, and certification
//! extracts a polynomial square root of every sum.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_traits::{One, Zero};

use crate::arith::{is_rational_square, Integer, Ratio};
use crate::construct::SolutionPair;
use crate::error::{Error, Result};
use crate::poly::{poly_square_root, Poly, Ring};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FamilyId {
    Lagrange44,
    Triple33V1,
    Triple33V2,
    Triple33V3,
    Triple33Shift,
    Quint53,
    Quad44Partial,
    Quad44A,
    Quad44B,
    Quad44C,
}

impl FamilyId {
    pub const ALL: [FamilyId; 10] = [
        FamilyId::Lagrange44,
        FamilyId::Triple33V1,
        FamilyId::Triple33V2,
        FamilyId::Triple33V3,
        FamilyId::Triple33Shift,
        FamilyId::Quint53,
        FamilyId::Quad44Partial,
        FamilyId::Quad44A,
        FamilyId::Quad44B,
        FamilyId::Quad44C,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyId::Lagrange44 => "lagrange44",
            FamilyId::Triple33V1 => "triple33_v1",
            FamilyId::Triple33V2 => "triple33_v2",
            FamilyId::Triple33V3 => "triple33_v3",
            FamilyId::Triple33Shift => "triple33_shift",
            FamilyId::Quint53 => "quint53",
            FamilyId::Quad44Partial => "quad44_partial",
            FamilyId::Quad44A => "quad44_a",
            FamilyId::Quad44B => "quad44_b",
            FamilyId::Quad44C => "quad44_c",
        }
    }

    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            FamilyId::Lagrange44 => &["u", "v"],
            FamilyId::Triple33V1 | FamilyId::Triple33V2 | FamilyId::Triple33V3 => &["p", "q", "r", "s"],
            FamilyId::Triple33Shift => &["p", "q", "r", "s", "t"],
            FamilyId::Quint53 => &["f", "g", "m", "u1", "u2", "v1", "v2"],
            FamilyId::Quad44Partial => &["m", "p", "q", "r", "s"],
            FamilyId::Quad44A => &["u1", "u2", "v1", "v2"],
            FamilyId::Quad44B | FamilyId::Quad44C => &["m", "q", "r"],
        }
    }

    pub fn arity(self) -> usize {
        self.param_names().len()
    }

    pub fn shape(self) -> (usize, usize) {
        match self {
            FamilyId::Triple33V1 | FamilyId::Triple33V2 | FamilyId::Triple33V3 | FamilyId::Triple33Shift => (3, 3),
            FamilyId::Quint53 => (5, 3),
            _ => (4, 4),
        }
    }

    /// Parameter tuples outside the family's domain.
    pub fn is_excluded(self, params: &[Integer]) -> bool {
        match self {
            FamilyId::Quad44Partial => params.first().is_some_and(Zero::is_zero),
            _ => false,
        }
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FamilyId::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::UnknownFamily(s.to_string()))
    }
}

/// Elements `a_i = a[i] / denominator`, `b_j = b[j] / denominator`.
#[derive(Clone, Debug)]
pub struct SymbolicSystem {
    pub ring: Ring,
    pub denominator: Poly,
    pub a: Vec<Poly>,
    pub b: Vec<Poly>,
    /// 1-based `(i, j)` cells whose sum is not claimed to be a square.
    pub exempt: Vec<(usize, usize)>,
}

impl SymbolicSystem {
    pub fn is_exempt(&self, i: usize, j: usize) -> bool {
        self.exempt.contains(&(i, j))
    }

    /// Numerator of `a_i + b_j` (1-based).
    pub fn sum(&self, i: usize, j: usize) -> Poly {
        &self.a[i - 1] + &self.b[j - 1]
    }

    /// Defining polynomials followed by every sum, each with a label.
    pub fn labelled(&self) -> Vec<(String, Poly)> {
        let mut out: Vec<(String, Poly)> = Vec::new();
        out.extend(self.a.iter().enumerate().map(|(i, p)| (format!("a{}", i + 1), p.clone())));
        out.extend(self.b.iter().enumerate().map(|(j, p)| (format!("b{}", j + 1), p.clone())));
        for i in 1..=self.a.len() {
            for j in 1..=self.b.len() {
                let tag = if self.is_exempt(i, j) { " (exempt)" } else { "" };
                out.push((format!("a{i}+b{j}{tag}"), self.sum(i, j)));
            }
        }
        out
    }

    /// Substitute `images` (polynomials over `target`) for the parameters.
    pub fn compose(&self, target: &Ring, images: &[Poly]) -> Result<SymbolicSystem> {
        let sub = |p: &Poly| p.compose(target, images);
        Ok(SymbolicSystem {
            ring: target.clone(),
            denominator: sub(&self.denominator)?,
            a: self.a.iter().map(sub).collect::<Result<_>>()?,
            b: self.b.iter().map(sub).collect::<Result<_>>()?,
            exempt: self.exempt.clone(),
        })
    }

    pub fn evaluate(&self, params: &[Integer]) -> Result<SolutionPair> {
        let den = self.denominator.eval_integer(params)?;
        if den.is_zero() {
            return Err(Error::Domain(format!("denominator {} vanishes", self.denominator)));
        }
        let ev = |p: &Poly| -> Result<Ratio> { Ok(Ratio::new(p.eval_integer(params)?, den.clone())) };
        Ok(SolutionPair {
            a: self.a.iter().map(ev).collect::<Result<_>>()?,
            b: self.b.iter().map(ev).collect::<Result<_>>()?,
        })
    }
}

struct Formulas {
    denominator: &'static str,
    a: &'static [&'static str],
    b: &'static [&'static str],
    exempt: &'static [(usize, usize)],
}

fn formulas(id: FamilyId) -> Formulas {
    let plain = |a, b| Formulas { denominator: "1", a, b, exempt: &[] };
    match id {
        FamilyId::Lagrange44 => plain(
            &[
                "9*(18*u^2 + 50*u*v + 37*v^2)^2",
                "36*(u^2 + 13*u*v + 16*v^2)^2",
                "36*(9*u^2 + 53*u*v + 64*v^2)^2",
                "4*(3*u^2 - 25*u*v - 48*v^2)^2",
            ],
            &[
                "0",
                "20*(u - 4*v)*(11*u + 19*v)*(u + 4*v)*(u + v)",
                "36*(3*u + 11*v)*(7*u + 12*v)*(3*u + 4*v)*(u + v)",
                "756*(u - v)*(3*u + 2*v)*(u + 3*v)*(u + 2*v)",
            ],
        ),
        FamilyId::Triple33V1 => plain(
            &["0", "16*p*q*r*s", "(p + q + r + s)*(p + q - r - s)*(p - q + r - s)*(p - q - r + s)"],
            &["4*(p*r - q*s)^2", "4*(p*s - q*r)^2", "4*(p*q - r*s)^2"],
        ),
        FamilyId::Triple33V2 => plain(
            &[
                "-(p + q + r + s)*(p + q - r - s)*(p - q + r - s)*(p - q - r + s)",
                "-(p - q + r + s)*(p - q - r - s)*(p + q + r - s)*(p + q - r + s)",
                "0",
            ],
            &["(p^2 - q^2 + r^2 - s^2)^2", "(p^2 - q^2 - r^2 + s^2)^2", "(p^2 + q^2 - r^2 - s^2)^2"],
        ),
        FamilyId::Triple33V3 => plain(
            &["4*(p*s - q*r)^2", "4*(p*s + q*r)^2", "(p^2 - q^2 - r^2 + s^2)^2"],
            &["4*(p^2 - q^2)*(r^2 - s^2)", "0", "4*(p^2 - r^2)*(q^2 - s^2)"],
        ),
        FamilyId::Triple33Shift => plain(
            &["4*(p*r - q*s)^2 - t", "4*(p*r + q*s)^2 - t", "(p^2 - q^2 + r^2 - s^2)^2 - t"],
            &["t", "t - 4*(p^2 - q^2)*(r^2 - s^2)", "t + 4*(p^2 - s^2)*(q^2 - r^2)"],
        ),
        FamilyId::Quint53 => plain(
            &[
                "4*(m*u1*u2*(u1*v1 - u2*v2)*f^2 - (u1*v2 - u2*v1)*(m^2*u1*u2*v1*v2 - 1)*f*g - m*v1*v2*(u1*v1 - u2*v2)*g^2)^2",
                "4*(m*u1*u2*(u1*v1 + u2*v2)*f^2 + (u1*v2 + u2*v1)*(m^2*u1*u2*v1*v2 + 1)*f*g + m*v1*v2*(u1*v1 + u2*v2)*g^2)^2",
                "((u1^2*u2^2*(v1^2 - v2^2)*m^2 + u1^2 - u2^2)*f^2 - (v1^2*v2^2*(u1^2 - u2^2)*m^2 + v1^2 - v2^2)*g^2)^2",
                "4*(m*u1*u2*(u1*v1 - u2*v2)*f^2 + (u1*v2 - u2*v1)*(m^2*u1*u2*v1*v2 - 1)*f*g - m*v1*v2*(u1*v1 - u2*v2)*g^2)^2",
                "4*(m*u1*u2*(u1*v1 + u2*v2)*f^2 - (u1*v2 + u2*v1)*(m^2*u1*u2*v1*v2 + 1)*f*g + m*v1*v2*(u1*v1 + u2*v2)*g^2)^2",
            ],
            &[
                "0",
                "-4*(u1^2 - u2^2)*(v1^2 - v2^2)*(m^2*u1^2*u2^2*f^2 - g^2)*(f^2 - m^2*v1^2*v2^2*g^2)",
                "4*(m^2*u1^2*v1^2 - 1)*(m^2*u2^2*v2^2 - 1)*(f^2*u1^2 - g^2*v1^2)*(f^2*u2^2 - g^2*v2^2)",
            ],
        ),
        FamilyId::Quad44Partial => Formulas {
            denominator: "m^2",
            a: &[
                "4*m^2*(p*r - q*s)^2",
                "4*m^2*(p*r + q*s)^2",
                "m^2*(p^2 - q^2 + r^2 - s^2)^2",
                "(m^2*p^2 - m^2*q^2 + r^2 - s^2)^2",
            ],
            b: &[
                "0",
                "-4*m^2*(p^2 - q^2)*(r^2 - s^2)",
                "4*m^2*(p^2 - s^2)*(q^2 - r^2)",
                "4*(m^2*p^2 - s^2)*(m^2*q^2 - r^2)",
            ],
            exempt: &[(3, 4), (4, 3)],
        },
        FamilyId::Quad44A => plain(
            &[
                "W^2*D^2*(u1^2 + u2^2)^2",
                "W^2*S^2*(u1^2 - u2^2)^2",
                "D^2*(S^2*u1^2 - 16*u1*u2*v1^2*v2^2 - S^2*u2^2)^2",
                "D^2*(S^2*u1^2 + 16*u1*u2*v1^2*v2^2 - S^2*u2^2)^2",
            ],
            &[
                "0",
                "W^2*((v2 - v1)*u1 + (v1 + v2)*u2)*((v1 + v2)*u1 + (v1 - v2)*u2)*((v1 - v2)*u1 + (v1 + v2)*u2)*((v1 + v2)*u1 - (v1 - v2)*u2)",
                "-D^2*(S*u1 + 4*u1*v1*v2 - S*u2)*(S*u1 - 4*u1*v1*v2 - S*u2)*(S*u1 + 4*u2*v1*v2 + S*u2)*(S*u1 - 4*u2*v1*v2 + S*u2)",
                "-D^2*(S*u1 + 4*u1*v1*v2 + S*u2)*(S*u1 - 4*u1*v1*v2 + S*u2)*(S*u1 + 4*u2*v1*v2 - S*u2)*(S*u1 - 4*u2*v1*v2 - S*u2)",
            ],
        ),
        FamilyId::Quad44B => plain(
            &[
                "16*m^2*M^2*((5*m^4 - 2*m^2 + 1)*q^2 - 2*(m^4 - 6*m^2 + 1)*q*r + (m^4 - 2*m^2 + 5)*r^2)^2",
                "16*m^2*M^2*((5*m^4 - 2*m^2 + 1)*q^2 - (m^4 - 2*m^2 + 5)*r^2)^2",
                "16*m^2*M^2*((7*m^4 - 2*m^2 - 1)*q^2 - (2*m^4 - 12*m^2 + 2)*q*r - (m^4 + 2*m^2 - 7)*r^2)^2",
                "(m^2 - 1)^2*((3*m^8 + 40*m^6 - 26*m^4 - 1)*q^2 + 2*(m^4 - 6*m^2 + 1)^2*q*r - (m^8 + 26*m^4 - 40*m^2 - 3)*r^2)^2",
            ],
            &[
                "0",
                "-4*m^2*((m^4 + 6*m^2 - 3)*q + (m^4 - 2*m^2 + 5)*r)*((3*m^4 - 6*m^2 - 1)*q - (m^4 - 2*m^2 + 5)*r)*((5*m^4 - 2*m^2 + 1)*q - (3*m^4 - 6*m^2 - 1)*r)*((5*m^4 - 2*m^2 + 1)*q + (m^4 + 6*m^2 - 3)*r)",
                "-128*m^2*M^3*(q^2 - r^2)*(3*m^2*q - m^2*r - q + 3*r)*(m^2*q + r)",
                "16*(m^2 + 1)^2*(m^2 - 1)^3*(m^2*q^2 - r^2)*((m^4 + 6*m^3 - 2*m - 1)*q - (m^4 + 2*m^3 - 6*m - 1)*r)*((m^4 - 6*m^3 + 2*m - 1)*q - (m^4 - 2*m^3 + 6*m - 1)*r)",
            ],
        ),
        FamilyId::Quad44C => plain(
            &[
                "16*m^2*M^2*((m^6 - 2*m^4 + 5*m^2)*q^2 + (2*m^5 - 12*m^3 + 2*m)*q*r + (5*m^4 - 2*m^2 + 1)*r^2)^2",
                "16*m^2*M^2*((m^6 - 2*m^4 + 5*m^2)*q^2 - (5*m^4 - 2*m^2 + 1)*r^2)^2",
                "(m^2 - 1)^2*((m^10 + 26*m^6 - 40*m^4 - 3*m^2)*q^2 + (2*m^9 - 24*m^7 + 76*m^5 - 24*m^3 + 2*m)*q*r - (3*m^8 + 40*m^6 - 26*m^4 - 1)*r^2)^2",
                "16*m^2*M^2*((m^6 + 2*m^4 - 7*m^2)*q^2 - (2*m^5 - 12*m^3 + 2*m)*q*r - (7*m^4 - 2*m^2 - 1)*r^2)^2",
            ],
            &[
                "0",
                "-4*m^2*((m^5 + 6*m^3 - 3*m)*q - (5*m^4 - 2*m^2 + 1)*r)*((3*m^5 - 6*m^3 - m)*q + (5*m^4 - 2*m^2 + 1)*r)*((m^5 - 2*m^3 + 5*m)*q + (3*m^4 - 6*m^2 - 1)*r)*((m^5 - 2*m^3 + 5*m)*q - (m^4 + 6*m^2 - 3)*r)",
                "-16*m^2*(m^2 + 1)^2*(m^2 - 1)^3*(q^2 - r^2)*((m^5 - 2*m^4 + 6*m^2 - m)*q + (m^4 - 6*m^3 + 2*m - 1)*r)*((m^5 + 2*m^4 - 6*m^2 - m)*q + (m^4 + 6*m^3 - 2*m - 1)*r)",
                "128*m^3*M^3*(m*r - q)*(m^2*q^2 - r^2)*((m^3 - 3*m)*q + (3*m^2 - 1)*r)",
            ],
        ),
    }
}

/// Shorthands used inside the quadruple formulas.
fn expand_shorthands(src: &str) -> String {
    let mut out = String::with_capacity(src.len() * 2);
    for c in src.chars() {
        match c {
            'W' => out.push_str("(v1^4 - 6*v1^2*v2^2 + v2^4)"),
            'S' => out.push_str("(v1^2 + v2^2)"),
            'D' => out.push_str("(v1^2 - v2^2)"),
            'M' => out.push_str("(m^4 - 1)"),
            _ => out.push(c),
        }
    }
    out
}

fn build_system(id: FamilyId) -> SymbolicSystem {
    let ring = Ring::new(id.param_names());
    let f = formulas(id);
    let parse = |src: &str| {
        ring.parse(&expand_shorthands(src))
            .unwrap_or_else(|e| panic!("{id}: bad formula `{src}`: {e}"))
    };
    SymbolicSystem {
        denominator: parse(f.denominator),
        a: f.a.iter().map(|s| parse(s)).collect(),
        b: f.b.iter().map(|s| parse(s)).collect(),
        exempt: f.exempt.to_vec(),
        ring: ring.clone(),
    }
}

pub fn symbolic_system(id: FamilyId) -> &'static SymbolicSystem {
    static SYSTEMS: OnceLock<Vec<SymbolicSystem>> = OnceLock::new();
    let all = SYSTEMS.get_or_init(|| FamilyId::ALL.into_iter().map(build_system).collect());
    &all[id as usize]
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyOutput {
    pub family: FamilyId,
    pub params: Vec<Integer>,
    pub pair: SolutionPair,
    /// `A` or `B` has repeated elements.
    pub degenerate: bool,
}

pub fn generate(id: FamilyId, params: &[Integer]) -> Result<FamilyOutput> {
    if params.len() != id.arity() {
        return Err(Error::Arity { expected: id.arity(), got: params.len() });
    }
    if id.is_excluded(params) {
        return Err(Error::Domain(format!("{id} is undefined at m = 0")));
    }
    let pair = symbolic_system(id).evaluate(params)?;
    let report = crate::construct::verify_pair(&pair);
    Ok(FamilyOutput {
        family: id,
        params: params.to_vec(),
        degenerate: report.duplicate_a || report.duplicate_b,
        pair,
    })
}

#[derive(Clone, Debug)]
pub enum SumStatus {
    Square(Poly),
    Exempt,
    NotSquare,
}

#[derive(Clone, Debug)]
pub struct SumProof {
    pub i: usize,
    pub j: usize,
    pub sum: Poly,
    pub status: SumStatus,
}

impl SumProof {
    pub fn label(&self) -> String {
        format!("a{}+b{}", self.i, self.j)
    }
}

/// Polynomial square roots of the denominator and of every sum numerator.
#[derive(Clone, Debug)]
pub struct Certificate {
    pub family: FamilyId,
    pub denominator_root: Option<Poly>,
    pub sums: Vec<SumProof>,
}

impl Certificate {
    pub fn certified_count(&self) -> usize {
        self.sums.iter().filter(|s| matches!(s.status, SumStatus::Square(_))).count()
    }

    pub fn is_complete(&self) -> bool {
        self.denominator_root.is_some() && self.sums.iter().all(|s| !matches!(s.status, SumStatus::NotSquare))
    }
}

fn square_root_or_zero(p: &Poly) -> Option<Poly> {
    if p.is_zero() {
        return Some(p.clone());
    }
    poly_square_root(p).ok()
}

pub fn certify_system(family: FamilyId, sys: &SymbolicSystem) -> Certificate {
    let mut sums = Vec::with_capacity(sys.a.len() * sys.b.len());
    for i in 1..=sys.a.len() {
        for j in 1..=sys.b.len() {
            let sum = sys.sum(i, j);
            let status = if sys.is_exempt(i, j) {
                SumStatus::Exempt
            } else {
                square_root_or_zero(&sum).map_or(SumStatus::NotSquare, SumStatus::Square)
            };
            sums.push(SumProof { i, j, sum, status });
        }
    }
    Certificate { family, denominator_root: square_root_or_zero(&sys.denominator), sums }
}

pub fn certify(id: FamilyId) -> Certificate {
    certify_system(id, symbolic_system(id))
}

fn phi_ring() -> &'static (Ring, Poly) {
    static PHI: OnceLock<(Ring, Poly)> = OnceLock::new();
    PHI.get_or_init(|| {
        let ring = Ring::new(&["t", "u1", "u2", "v1", "v2"]);
        let src = "(t^2 - 1)*((t^2 - 1)*(v1^2 + v2^2)^2*u1^4 - 16*(t^2 + 1)*v1*v2*(v1^2 - v2^2)*u1^3*u2 \
                   + 2*(t^2 - 1)*(v1^2 + v2^2)^2*u1^2*u2^2 + 16*(t^2 + 1)*v1*v2*(v1^2 - v2^2)*u1*u2^3 \
                   + (t^2 - 1)*(v1^2 + v2^2)^2*u2^4)";
        let phi = ring.parse(src).expect("phi formula");
        (ring, phi)
    })
}

/// `φ(t, u1, u2, v1, v2)` as a polynomial in `t, u1, u2, v1, v2`.
pub fn phi_poly() -> &'static Poly {
    &phi_ring().1
}

/// `φ` at a rational `t`; equals `a3 + b4` of the partial quadruple family
/// under `m = t²`, `p = u1v1 + u2v2`, `q = u1v2 − u2v1`, `r = t(u1v1 − u2v2)`,
/// `s = t(u1v2 + u2v1)`. With `−v1` in place of `v1` it gives `a4 + b3`.
pub fn phi(t: &Ratio, u1: &Integer, u2: &Integer, v1: &Integer, v2: &Integer) -> Ratio {
    let point = [t.clone(), Ratio::from(u1.clone()), Ratio::from(u2.clone()), Ratio::from(v1.clone()), Ratio::from(v2.clone())];
    phi_poly().eval(&point).expect("phi arity")
}

/// `t = (v1² + 2v1v2 − v2²)/(v1² − 2v1v2 − v2²)`, which makes both `φ(v1)` and `φ(−v1)` squares.
pub fn t_from_v(v1: &Integer, v2: &Integer) -> Result<Ratio> {
    let num = v1 * v1 + Integer::from(2) * v1 * v2 - v2 * v2;
    let den = v1 * v1 - Integer::from(2) * v1 * v2 - v2 * v2;
    if den.is_zero() {
        return Err(Error::Domain(format!("t is undefined at (v1, v2) = ({v1}, {v2})")));
    }
    Ok(Ratio::new(num, den))
}

/// Discriminant in `n` of `(m−1)n² + (m²t² + mt² − 4mt + m + 1)n − mt²(m−1)`.
pub fn discriminant(m: &Ratio, t: &Ratio) -> Ratio {
    let one = Ratio::one();
    let k = |x: i64| Ratio::from_integer(x.into());
    let m1 = m + &one;
    let t2 = t * t;
    let t3 = &t2 * t;
    let t4 = &t2 * &t2;
    &m1 * &m1 * m * m * &t4 - k(8) * m * m * &m1 * &t3 + k(6) * &m1 * &m1 * m * &t2 - k(8) * m * &m1 * t + &m1 * &m1
}

/// Left side of the `n`-quadratic at `(m, t, n)`.
pub fn n_quadratic(m: &Ratio, t: &Ratio, n: &Ratio) -> Ratio {
    let one = Ratio::one();
    let k = |x: i64| Ratio::from_integer(x.into());
    let t2 = t * t;
    (m - &one) * n * n + (m * m * &t2 + m * &t2 - k(4) * m * t + m + &one) * n - m * &t2 * (m - &one)
}

/// At `t = 2(m+1)/(m²+1)` the discriminant is a rational square and both
/// `n = 4m(m²−1)/(m²+1)²` and `n = −(m+1)/(m−1)` are roots.
pub fn discriminant_check(m: &Integer) -> Result<bool> {
    if m.is_zero() || m.magnitude().is_one() {
        return Err(Error::Domain(format!("m must avoid 0 and ±1, got {m}")));
    }
    use crate::matrix::{quad44_n, quad44_t, Quad44Variant};
    let mr = Ratio::from(m.clone());
    let t = quad44_t(&mr);
    let square = is_rational_square(&discriminant(&mr, &t));
    let roots = [Quad44Variant::B, Quad44Variant::C]
        .into_iter()
        .all(|v| n_quadratic(&mr, &t, &quad44_n(&mr, v)).is_zero());
    Ok(square && roots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{canonicalize, verify_pair};
    use crate::arith::is_perfect_square;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ints(xs: &[i64]) -> Vec<Integer> {
        xs.iter().map(|&x| Integer::from(x)).collect()
    }

    fn canon(id: FamilyId, params: &[i64]) -> SolutionPair {
        canonicalize(&generate(id, &ints(params)).unwrap().pair).unwrap()
    }

    #[test]
    fn names_round_trip() {
        for id in FamilyId::ALL {
            assert_eq!(id.name().parse::<FamilyId>().unwrap(), id);
            let sys = symbolic_system(id);
            assert_eq!((sys.a.len(), sys.b.len()), id.shape());
        }
        assert!(matches!("triple34".parse::<FamilyId>(), Err(Error::UnknownFamily(_))));
    }

    #[test]
    fn witnesses() {
        assert_eq!(canon(FamilyId::Triple33V3, &[5, 3, 2, 1]), SolutionPair::from_integers(&[4, 169, 484], &[0, 192, 672]));
        assert_eq!(
            canon(FamilyId::Quad44A, &[3, 1, 4, 3]),
            SolutionPair::from_integers(
                &[44782864, 340218025, 1738222864, 2777290000],
                &[0, 25777136, 1222007600, 1719217136]
            )
        );
        assert_eq!(
            canon(FamilyId::Quint53, &[4, 1, 3, 2, 1, 3, 1]),
            SolutionPair::from_integers(&[198916, 532900, 1674436, 13468900, 19404025], &[0, 3588000, 8527200])
        );
        assert_eq!(
            canon(FamilyId::Quad44B, &[2, 1, 3]),
            SolutionPair::from_integers(&[14400, 266256, 435600, 12110400], &[0, 104625, 223744, 12096000])
        );
    }

    #[test]
    fn small_examples() {
        let out = generate(FamilyId::Triple33V1, &ints(&[2, 1, 1, 1])).unwrap();
        assert_eq!(out.pair, SolutionPair::from_integers(&[0, 32, 5], &[4, 4, 4]));
        assert!(out.degenerate);
        for a in &out.pair.a {
            for b in &out.pair.b {
                assert!([4, 9, 36].map(|x| Ratio::from_integer(x.into())).contains(&(a + b)));
            }
        }

        let out = generate(FamilyId::Lagrange44, &ints(&[1, 1])).unwrap();
        assert!(verify_pair(&out.pair).ok);
        assert_eq!(&out.pair.a[0] + &out.pair.b[1], Ratio::from_integer(81225.into()));
        assert_eq!(out.pair.a[0], Ratio::from_integer(99225.into()));

        assert!(matches!(generate(FamilyId::Quad44B, &ints(&[1, 2])), Err(Error::Arity { expected: 3, got: 2 })));
        assert!(matches!(generate(FamilyId::Quad44Partial, &ints(&[0, 1, 2, 3, 4])), Err(Error::Domain(_))));
    }

    #[test]
    fn symbolic_examples() {
        let sys = symbolic_system(FamilyId::Triple33V1);
        let ring = &sys.ring;
        let sum = sys.sum(1, 1);
        assert_eq!(sum, ring.parse("4*(p*r - q*s)^2").unwrap());
        assert_eq!(poly_square_root(&sum).unwrap(), ring.parse("2*p*r - 2*q*s").unwrap());

        let sys = symbolic_system(FamilyId::Triple33V2);
        assert_eq!(sys.sum(3, 3), sys.ring.parse("(p^2 + q^2 - r^2 - s^2)^2").unwrap());

        let labels: Vec<String> = symbolic_system(FamilyId::Quad44Partial).labelled().into_iter().map(|(l, _)| l).collect();
        assert_eq!(labels.len(), 8 + 16);
        assert!(labels.contains(&"a3+b4 (exempt)".to_string()));
        assert!(labels.contains(&"a4+b3 (exempt)".to_string()));
    }

    #[test]
    fn certify_small_families() {
        for id in [FamilyId::Triple33V1, FamilyId::Triple33V2, FamilyId::Triple33V3, FamilyId::Triple33Shift, FamilyId::Lagrange44] {
            let cert = certify(id);
            assert!(cert.is_complete(), "{id}");
            assert_eq!(cert.certified_count(), id.shape().0 * id.shape().1);
        }
        let cert = certify(FamilyId::Quad44Partial);
        assert!(cert.is_complete());
        assert_eq!(cert.certified_count(), 14);
        assert_eq!(cert.denominator_root, Some(symbolic_system(FamilyId::Quad44Partial).ring.var("m").unwrap()));
    }

    #[test]
    fn certify_large_families() {
        for id in [FamilyId::Quint53, FamilyId::Quad44A, FamilyId::Quad44B, FamilyId::Quad44C] {
            let cert = certify(id);
            assert!(cert.is_complete(), "{id}");
            assert_eq!(cert.certified_count(), id.shape().0 * id.shape().1);
        }
    }

    #[test]
    fn shift_specializes_to_the_three_triples() {
        let shift = symbolic_system(FamilyId::Triple33Shift);
        let target = &symbolic_system(FamilyId::Triple33V1).ring;
        let g: Vec<Poly> = (0..4).map(|i| target.gen(i)).collect();
        for (t, id) in [
            ("4*(p*r - q*s)^2", FamilyId::Triple33V1),
            ("(p^2 - q^2 + r^2 - s^2)^2", FamilyId::Triple33V2),
            ("4*(p^2 - q^2)*(r^2 - s^2)", FamilyId::Triple33V3),
        ] {
            let mut images = g.clone();
            images.push(target.parse(t).unwrap());
            let specialised = shift.compose(target, &images).unwrap();
            let want = symbolic_system(id);
            assert_eq!(specialised.a, want.a, "{id}");
            assert_eq!(specialised.b, want.b, "{id}");
        }
    }

    /// `a3+b4` and `a4+b3` of the partial family under the substitution for
    /// `m, p, q, r, s`, as numerators over `m² = t⁴`.
    fn partial_under_valmpq() -> SymbolicSystem {
        let (ring, _) = phi_ring();
        let v = |s: &str| ring.parse(s).unwrap();
        let images = [v("t^2"), v("u1*v1 + u2*v2"), v("u1*v2 - u2*v1"), v("t*(u1*v1 - u2*v2)"), v("t*(u1*v2 + u2*v1)")];
        symbolic_system(FamilyId::Quad44Partial).compose(ring, &images).unwrap()
    }

    #[test]
    fn phi_matches_partial_family() {
        let (ring, phi) = phi_ring();
        let sys = partial_under_valmpq();
        assert_eq!(sys.denominator, ring.parse("t^4").unwrap());
        let t4 = ring.parse("t^4").unwrap();
        assert_eq!(sys.sum(3, 4), &t4 * phi);
        let mirrored = phi.compose(ring, &[ring.gen(0), ring.gen(1), ring.gen(2), -ring.gen(3), ring.gen(4)]).unwrap();
        assert_eq!(sys.sum(4, 3), &t4 * &mirrored);
        // The two exempt sums differ in general.
        assert!(!(&sys.sum(3, 4) - &sys.sum(4, 3)).is_zero());
    }

    #[test]
    fn phi_examples() {
        let one = Ratio::one();
        let i = |x: i64| Integer::from(x);
        assert!(phi(&one, &i(3), &i(1), &i(4), &i(3)).is_zero());

        let t = t_from_v(&i(4), &i(3)).unwrap();
        assert_eq!(t, Ratio::new(i(-31), i(17)));
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let (u1, u2) = (i(rng.gen_range(-30..=30)), i(rng.gen_range(-30..=30)));
            for v1 in [i(4), i(-4)] {
                let val = phi(&t, &u1, &u2, &v1, &i(3)) * Ratio::from_integer(i(17).pow(4));
                assert!(val.is_integer());
                assert!(is_perfect_square(&val.to_integer()), "u = ({u1}, {u2})");
            }
            // Cross-check against the partial family evaluated numerically.
            let m = &t * &t;
            let p = &u1 * 4 + &u2 * 3;
            let q = &u1 * 3 - &u2 * 4;
            let r = &t * Ratio::from(&u1 * 4 - &u2 * 3);
            let s = &t * Ratio::from(&u1 * 3 + &u2 * 4);
            let sys = symbolic_system(FamilyId::Quad44Partial);
            let point = [m, Ratio::from(p), Ratio::from(q), r, s];
            let den = sys.denominator.eval(&point).unwrap();
            let a3b4 = sys.sum(3, 4).eval(&point).unwrap() / den;
            assert_eq!(a3b4, phi(&t, &u1, &u2, &i(4), &i(3)));
        }
        assert!(t_from_v(&i(0), &i(0)).is_err());
    }

    #[test]
    fn discriminant_examples() {
        assert!(discriminant_check(&Integer::from(2)).unwrap());
        assert!(discriminant_check(&Integer::from(3)).unwrap());
        for m in [-7i64, -2, 5, 11, 100] {
            assert!(discriminant_check(&Integer::from(m)).unwrap(), "m = {m}");
        }
        let three = Ratio::from_integer(3.into());
        let n = Ratio::new(24.into(), 25.into());
        assert!(n_quadratic(&three, &crate::matrix::quad44_t(&three), &n).is_zero());
        for m in [0i64, 1, -1] {
            assert!(discriminant_check(&Integer::from(m)).is_err());
        }
    }

    #[test]
    fn random_tuples_verify() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for id in FamilyId::ALL {
            for _ in 0..40 {
                let params: Vec<Integer> = (0..id.arity()).map(|_| Integer::from(rng.gen_range(-20..=20))).collect();
                if id.is_excluded(&params) {
                    continue;
                }
                let out = generate(id, &params).unwrap();
                let rep = verify_pair(&out.pair);
                let sys = symbolic_system(id);
                assert!(rep.failures.iter().all(|(i, j, _)| sys.is_exempt(*i, *j)), "{id} {params:?}: {:?}", rep.failures);
            }
        }
    }
}
