//! Exact integer and rational arithmetic plus the square-detection
//! primitives the rest of the crate is built on.
//!
//! `Integer` and `Ratio` are arbitrary precision; nothing in this crate ever
//! rounds. A rational is a square exactly when its numerator and denominator
//! (in lowest terms, denominator positive) are both perfect squares.

use num_bigint::{BigInt, Sign};
use num_integer::Integer as _;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Integer = BigInt;
pub type Ratio = num_rational::BigRational;

/// Trial-division bound used by [`square_part`].
pub const DEFAULT_TRIAL_BOUND: u64 = 1_000_000;

const fn residue_table<const M: usize>() -> [bool; M] {
    let mut t = [false; M];
    let mut x = 0;
    while x < M {
        t[(x * x) % M] = true;
        x += 1;
    }
    t
}

static SQ_MOD64: [bool; 64] = residue_table::<64>();
static SQ_MOD63: [bool; 63] = residue_table::<63>();
static SQ_MOD65: [bool; 65] = residue_table::<65>();
static SQ_MOD11: [bool; 11] = residue_table::<11>();
static SQ_MOD9: [bool; 9] = residue_table::<9>();
static SQ_MOD5: [bool; 5] = residue_table::<5>();

/// `(⌊√n⌋, exact)` by Newton iteration on unbounded integers.
pub fn isqrt(n: &Integer) -> Result<(Integer, bool)> {
    if n.is_negative() {
        return Err(Error::Domain(format!("isqrt of negative number {n}")));
    }
    let root = isqrt_floor(n);
    let exact = &root * &root == *n;
    Ok((root, exact))
}

fn isqrt_floor(n: &Integer) -> Integer {
    if let Some(small) = n.to_u64() {
        return Integer::from(small.isqrt());
    }
    // x0 = 2^ceil(bits/2) >= √n, so the iteration decreases monotonically
    // until it reaches the floor.
    let bits = n.bits();
    let mut x = Integer::one() << bits.div_ceil(2);
    loop {
        let y = (&x + n / &x) >> 1u32;
        if y >= x {
            break;
        }
        x = y;
    }
    while &x * &x > *n {
        x -= 1u32;
    }
    loop {
        let next = &x + 1u32;
        if &next * &next <= *n {
            x = next;
        } else {
            break;
        }
    }
    x
}

/// Necessary condition for squareness: residues mod 64, 63, 65 and 11.
fn passes_residue_filter(n: &Integer) -> bool {
    let low = n.iter_u64_digits().next().unwrap_or(0);
    if !SQ_MOD64[(low & 63) as usize] {
        return false;
    }
    let r = (n % 45045u32).to_u32().unwrap_or(0) as usize;
    SQ_MOD63[r % 63] && SQ_MOD65[r % 65] && SQ_MOD11[r % 11]
}

pub fn is_perfect_square(n: &Integer) -> bool {
    match n.sign() {
        Sign::Minus => false,
        Sign::NoSign => true,
        Sign::Plus => passes_residue_filter(n) && isqrt_floor(n).pow(2) == *n,
    }
}

/// Square root of a perfect square, `None` otherwise.
pub fn exact_sqrt(n: &Integer) -> Option<Integer> {
    if !is_perfect_square(n) {
        return None;
    }
    Some(isqrt_floor(n))
}

/// Square root of a rational square (non-negative root), `None` when `q` is
/// not the square of a rational.
pub fn rational_sqrt(q: &Ratio) -> Option<Ratio> {
    let num = exact_sqrt(q.numer())?;
    let den = exact_sqrt(q.denom())?;
    Some(Ratio::new(num, den))
}

pub fn is_rational_square(q: &Ratio) -> bool {
    !q.is_negative() && is_perfect_square(q.numer()) && is_perfect_square(q.denom())
}

/// Hot-loop variant on machine words, with the mod 64 / 9 / 5 pre-filters.
#[inline]
pub fn is_square_u64(n: u64) -> bool {
    if !SQ_MOD64[(n & 63) as usize] || !SQ_MOD9[(n % 9) as usize] || !SQ_MOD5[(n % 5) as usize] {
        return false;
    }
    let r = n.isqrt();
    r * r == n
}

/// Result of square-factor extraction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SquarePart {
    /// Largest `s` found with `s² | n`.
    pub root: Integer,
    /// `false` when the trial bound was hit before the cofactor could be
    /// classified; `root` may then miss a square of a prime above the bound.
    pub complete: bool,
}

/// Largest `s ≥ 1` with `s² | n`, trial division up to [`DEFAULT_TRIAL_BOUND`].
pub fn square_part(n: &Integer) -> Result<Integer> {
    Ok(square_part_bounded(n, DEFAULT_TRIAL_BOUND)?.root)
}

/// Trial division by every `d ≤ min(bound, ∛cofactor)`, then a square test
/// on the cofactor. Once every prime up to the cube root is removed the
/// cofactor has at most two prime factors, so it contributes a square factor
/// exactly when it is itself a square.
pub fn square_part_bounded(n: &Integer, bound: u64) -> Result<SquarePart> {
    if !n.is_positive() {
        return Err(Error::Domain(format!("square_part needs n >= 1, got {n}")));
    }
    if let Some(small) = n.to_u128() {
        return Ok(square_part_u128(small, bound));
    }
    let mut c = n.clone();
    let mut root = Integer::one();
    let mut d: u64 = 2;
    let mut cube_reached = false;
    while d <= bound {
        if Integer::from(d).pow(3) > c {
            cube_reached = true;
            break;
        }
        if (&c % d).is_zero() {
            let mut e = 0u32;
            while (&c % d).is_zero() {
                c /= d;
                e += 1;
            }
            root *= Integer::from(d).pow(e / 2);
        }
        d += if d == 2 { 1 } else { 2 };
    }
    finish_square_part(c, root, cube_reached)
}

fn square_part_u128(n: u128, bound: u64) -> SquarePart {
    let mut c = n;
    let mut root: u128 = 1;
    let mut d: u128 = 2;
    let mut cube_reached = false;
    while d <= bound as u128 {
        if d.checked_pow(3).is_none_or(|cube| cube > c) {
            cube_reached = true;
            break;
        }
        if c.is_multiple_of(d) {
            let mut e = 0u32;
            while c.is_multiple_of(d) {
                c /= d;
                e += 1;
            }
            root *= d.pow(e / 2);
        }
        d += if d == 2 { 1 } else { 2 };
    }
    let r = c.isqrt();
    if r * r == c {
        return SquarePart { root: Integer::from(root * r), complete: true };
    }
    SquarePart { root: Integer::from(root), complete: cube_reached }
}

fn finish_square_part(c: Integer, mut root: Integer, cube_reached: bool) -> Result<SquarePart> {
    if let Some(r) = exact_sqrt(&c) {
        root *= r;
        return Ok(SquarePart { root, complete: true });
    }
    Ok(SquarePart { root, complete: cube_reached })
}

/// gcd of a sequence; 0 for an empty or all-zero sequence.
pub fn gcd_all<'a>(values: impl IntoIterator<Item = &'a Integer>) -> Integer {
    values.into_iter().fold(Integer::zero(), |g, v| g.gcd(v))
}

/// Least common multiple of the denominators.
pub fn lcm_denominators<'a>(values: impl IntoIterator<Item = &'a Ratio>) -> Integer {
    values.into_iter().fold(Integer::one(), |l, q| l.lcm(q.denom()))
}

pub fn ratio_from_int(n: impl Into<Integer>) -> Ratio {
    Ratio::from_integer(n.into())
}

/// `"n"` for integers, `"n/d"` otherwise; ASCII hyphen for the sign.
pub fn format_ratio(q: &Ratio) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn parse_integer(s: &str) -> Result<Integer> {
    let t = s.trim();
    let t = t.strip_prefix('+').unwrap_or(t);
    t.parse::<Integer>()
        .map_err(|_| Error::Parse(format!("`{s}` is not a decimal integer")))
}

pub fn parse_ratio(s: &str) -> Result<Ratio> {
    match s.split_once('/') {
        None => Ok(Ratio::from_integer(parse_integer(s)?)),
        Some((n, d)) => {
            let den = parse_integer(d)?;
            if den.is_zero() {
                return Err(Error::Parse(format!("`{s}` has a zero denominator")));
            }
            Ok(Ratio::new(parse_integer(n)?, den))
        }
    }
}
