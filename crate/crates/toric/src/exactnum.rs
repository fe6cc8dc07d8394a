//! Exact arithmetic: arbitrary-precision rationals and real quadratic fields.
//!
//! [`Rational`] is an alias for `num_rational::BigRational`; this module adds
//! the textual `p/q` form used across the crate. [`Surd`] represents
//! `a + b*sqrt(sigma)` with `sigma` a positive square-free integer, fixed per
//! value and canonicalized at construction, so equality is structural.
//! Rationals embed as surds with `b = 0` (stored with `sigma = 1`), and mix
//! freely with any other sigma; genuinely mixed radicands are an error.
//!
//! No floating point is used anywhere here; signs of field elements are
//! decided by comparing `a^2` with `b^2 * sigma`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::{Error, Result};

pub type Rational = num_rational::BigRational;

/// Rational from an integer pair.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Rational from an integer.
pub fn rat_int(n: i64) -> Rational {
    Rational::from(BigInt::from(n))
}

/// Parses "p/q" or "p" (optionally signed) into a rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = num
        .parse()
        .map_err(|_| Error::Parse(format!("bad numerator in rational {s:?}")))?;
    let d: BigInt = den
        .parse()
        .map_err(|_| Error::Parse(format!("bad denominator in rational {s:?}")))?;
    if d.is_zero() {
        return Err(Error::Parse(format!("zero denominator in rational {s:?}")));
    }
    Ok(Rational::new(n, d))
}

/// Formats a rational as "p/q", or "p" when the denominator is one.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Lossy conversion for display only; never used in computations.
pub fn rational_to_f64(r: &Rational) -> f64 {
    let scale = 1u64 << 60;
    let scaled = (r * Rational::from(BigInt::from(scale))).to_integer();
    match i128::try_from(scaled.clone()) {
        Ok(v) => v as f64 / scale as f64,
        Err(_) => {
            // Out of i128 range: fall back to decimal string parsing.
            scaled.to_string().parse::<f64>().unwrap_or(f64::NAN) / scale as f64
        }
    }
}

/// Floor of the exact (nonnegative) square root of a big integer.
pub fn isqrt(n: &BigInt) -> BigInt {
    assert!(!n.is_negative(), "isqrt of negative integer");
    n.sqrt()
}

/// Splits `n > 0` as `s^2 * f` with `f` square-free, returning `(s, f)`.
///
/// Square factors are extracted by trial division (complete for `n < 10^12`);
/// a leftover perfect square is also extracted. Prime-square factors beyond
/// the trial bound (only possible for `n >= 10^12`) may remain; all radicands
/// arising from the geometry in this crate are far below that.
pub fn squarefree_decompose(n: &BigInt) -> (BigInt, BigInt) {
    assert!(n.is_positive(), "squarefree_decompose needs n > 0");
    let mut square_root = BigInt::one();
    let mut free = BigInt::one();
    let mut rem = n.clone();
    let mut d = BigInt::from(2u32);
    let bound = BigInt::from(1_000_000u64);
    while &d * &d <= rem && d <= bound {
        if (&rem % &d).is_zero() {
            let mut e = 0u32;
            while (&rem % &d).is_zero() {
                rem /= &d;
                e += 1;
            }
            for _ in 0..(e / 2) {
                square_root *= &d;
            }
            if e % 2 == 1 {
                free *= &d;
            }
        }
        d += 1;
    }
    if rem > BigInt::one() {
        let s = isqrt(&rem);
        if &s * &s == rem {
            square_root *= &s;
        } else {
            free *= &rem;
        }
    }
    (square_root, free)
}

/// Element of the real quadratic field `Q[sqrt(sigma)]`: `a + b*sqrt(sigma)`.
///
/// Invariants: `sigma` is a positive square-free integer; `sigma == 1`
/// exactly when `b == 0` (the rational embedding). Arithmetic between values
/// with different non-trivial sigmas panics, since the result would leave
/// the field.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Surd {
    a: Rational,
    b: Rational,
    sigma: u64,
}

impl Surd {
    /// `a + b*sqrt(sigma)`; factors square parts of `sigma` into `b` and
    /// normalizes `b == 0` to `sigma == 1`.
    pub fn new(a: Rational, b: Rational, sigma: u64) -> Surd {
        assert!(sigma > 0, "sigma must be positive");
        if b.is_zero() || sigma == 1 {
            return Surd {
                a: a + b,
                b: Rational::zero(),
                sigma: 1,
            };
        }
        let (s, f) = squarefree_decompose(&BigInt::from(sigma));
        let f64sigma = u64::try_from(f).expect("square-free part fits u64");
        if f64sigma == 1 {
            Surd {
                a: a + b * Rational::from(s),
                b: Rational::zero(),
                sigma: 1,
            }
        } else {
            Surd {
                a,
                b: b * Rational::from(s),
                sigma: f64sigma,
            }
        }
    }

    pub fn from_rational(a: Rational) -> Surd {
        Surd {
            a,
            b: Rational::zero(),
            sigma: 1,
        }
    }

    pub fn from_int(n: i64) -> Surd {
        Surd::from_rational(rat_int(n))
    }

    pub fn zero() -> Surd {
        Surd::from_int(0)
    }

    pub fn one() -> Surd {
        Surd::from_int(1)
    }

    /// Exact square root of a nonnegative rational, as a surd:
    /// `sqrt(u/v) = sqrt(u*v) / v`.
    pub fn sqrt_rational(r: &Rational) -> Result<Surd> {
        if r.is_negative() {
            return Err(Error::Invalid("square root of negative rational".into()));
        }
        if r.is_zero() {
            return Ok(Surd::zero());
        }
        let radicand = r.numer() * r.denom();
        let (s, f) = squarefree_decompose(&radicand);
        let coeff = Rational::new(s, r.denom().clone());
        let sigma = u64::try_from(f)
            .map_err(|_| Error::Unsupported("radicand too large to canonicalize".into()))?;
        Ok(Surd::new(Rational::zero(), coeff, sigma))
    }

    pub fn rational_part(&self) -> &Rational {
        &self.a
    }

    pub fn surd_coeff(&self) -> &Rational {
        &self.b
    }

    pub fn sigma(&self) -> u64 {
        self.sigma
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        if self.is_rational() {
            Some(&self.a)
        } else {
            None
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Conjugation `a + b*sqrt(sigma) -> a - b*sqrt(sigma)`.
    pub fn conj(&self) -> Surd {
        Surd {
            a: self.a.clone(),
            b: -self.b.clone(),
            sigma: self.sigma,
        }
    }

    /// `x * conj(x) = a^2 - b^2 * sigma`, always rational (the field norm).
    pub fn norm(&self) -> Rational {
        &self.a * &self.a - &self.b * &self.b * Rational::from(BigInt::from(self.sigma))
    }

    fn common_sigma(&self, other: &Surd) -> u64 {
        match (self.b.is_zero(), other.b.is_zero()) {
            (true, true) => 1,
            (true, false) => other.sigma,
            (false, true) => self.sigma,
            (false, false) => {
                assert!(
                    self.sigma == other.sigma,
                    "mixed radicands: sqrt({}) vs sqrt({})",
                    self.sigma,
                    other.sigma
                );
                self.sigma
            }
        }
    }

    /// Exact sign in {-1, 0, 1}, via comparison of `a^2` and `b^2 * sigma`.
    pub fn sign(&self) -> i32 {
        let sa = sign_of(&self.a);
        let sb = sign_of(&self.b);
        if sb == 0 {
            return sa;
        }
        if sa == 0 {
            return sb;
        }
        if sa == sb {
            return sa;
        }
        // Opposite signs: compare |a| and |b|*sqrt(sigma) by squaring.
        let lhs = &self.a * &self.a;
        let rhs = &self.b * &self.b * Rational::from(BigInt::from(self.sigma));
        match lhs.cmp(&rhs) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inverse(&self) -> Surd {
        assert!(!self.is_zero(), "inverse of zero");
        let n = self.norm();
        Surd {
            a: &self.a / &n,
            b: -&self.b / &n,
            sigma: if (&self.b / &n).is_zero() { 1 } else { self.sigma },
        }
    }

    /// Exact floor, with no floating point: brackets `b*sqrt(sigma)` by
    /// integer square roots and fixes up with exact sign checks.
    pub fn floor(&self) -> BigInt {
        if self.b.is_zero() {
            return self.a.floor().to_integer();
        }
        // Write self = (p + q*sqrt(s)) / r with r > 0.
        let r = self.a.denom() * self.b.denom();
        let p = self.a.numer() * self.b.denom();
        let q = self.b.numer() * self.a.denom();
        let s = BigInt::from(self.sigma);
        let q2s = &q * &q * &s;
        let root = isqrt(&q2s);
        let approx_num = if q.is_negative() { &p - &root } else { &p + &root };
        let mut candidate = num_integer::Integer::div_floor(&approx_num, &r);
        // isqrt truncation can put us off by one in either direction.
        loop {
            let c = Surd::from_rational(Rational::from(candidate.clone()));
            if (self.clone() - c.clone()).sign() < 0 {
                candidate -= 1;
                continue;
            }
            let c1 = Surd::from_rational(Rational::from(&candidate + 1));
            if (self.clone() - c1).sign() >= 0 {
                candidate += 1;
                continue;
            }
            return candidate;
        }
    }

    /// Display-only numeric value.
    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.a) + rational_to_f64(&self.b) * (self.sigma as f64).sqrt()
    }
}

impl num_traits::Zero for Surd {
    fn zero() -> Surd {
        Surd::zero()
    }
    fn is_zero(&self) -> bool {
        Surd::is_zero(self)
    }
}

impl num_traits::One for Surd {
    fn one() -> Surd {
        Surd::one()
    }
    fn is_one(&self) -> bool {
        self.b.is_zero() && self.a.is_one()
    }
}

fn sign_of(r: &Rational) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

impl Add for Surd {
    type Output = Surd;
    fn add(self, rhs: Surd) -> Surd {
        let sigma = self.common_sigma(&rhs);
        let b = self.b + rhs.b;
        Surd {
            a: self.a + rhs.a,
            sigma: if b.is_zero() { 1 } else { sigma },
            b,
        }
    }
}

impl Sub for Surd {
    type Output = Surd;
    fn sub(self, rhs: Surd) -> Surd {
        self + (-rhs)
    }
}

impl Neg for Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        Surd {
            a: -self.a,
            b: -self.b,
            sigma: self.sigma,
        }
    }
}

impl Mul for Surd {
    type Output = Surd;
    fn mul(self, rhs: Surd) -> Surd {
        let sigma = self.common_sigma(&rhs);
        let s = Rational::from(BigInt::from(sigma));
        let a = &self.a * &rhs.a + &self.b * &rhs.b * s;
        let b = &self.a * &rhs.b + &self.b * &rhs.a;
        Surd {
            a,
            sigma: if b.is_zero() { 1 } else { sigma },
            b,
        }
    }
}

impl Div for Surd {
    type Output = Surd;
    fn div(self, rhs: Surd) -> Surd {
        self * rhs.inverse()
    }
}

impl PartialOrd for Surd {
    fn partial_cmp(&self, other: &Surd) -> Option<Ordering> {
        if !self.b.is_zero() && !other.b.is_zero() && self.sigma != other.sigma {
            return None;
        }
        Some(match (self.clone() - other.clone()).sign() {
            1 => Ordering::Greater,
            -1 => Ordering::Less,
            _ => Ordering::Equal,
        })
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", format_rational(&self.a));
        }
        if self.b.is_negative() {
            write!(
                f,
                "{} - {}*sqrt({})",
                format_rational(&self.a),
                format_rational(&-self.b.clone()),
                self.sigma
            )
        } else {
            write!(
                f,
                "{} + {}*sqrt({})",
                format_rational(&self.a),
                format_rational(&self.b),
                self.sigma
            )
        }
    }
}

/// Parses "a + b*sqrt(s)", "a - b*sqrt(s)", "b*sqrt(s)", "sqrt(s)" or a bare
/// rational. Rejects non-canonical radicands (square factors).
pub fn parse_surd(input: &str) -> Result<Surd> {
    let s = input.trim();
    if !s.contains("sqrt") {
        return Ok(Surd::from_rational(parse_rational(s)?));
    }
    // Split on the last top-level '+' or '-' before the sqrt term, if any.
    let idx = s.find("sqrt").unwrap();
    let (head, tail) = s.split_at(idx);
    let radicand = tail
        .strip_prefix("sqrt")
        .and_then(|t| t.trim().strip_prefix('('))
        .and_then(|t| t.trim_end().strip_suffix(')'))
        .ok_or_else(|| Error::Parse(format!("malformed sqrt term in {input:?}")))?;
    let sigma: u64 = radicand
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad radicand in {input:?}")))?;
    if sigma == 0 {
        return Err(Error::Parse("radicand must be positive".into()));
    }
    let (sq, _) = squarefree_decompose(&BigInt::from(sigma));
    if sq > BigInt::one() {
        return Err(Error::Parse(format!(
            "non-canonical radicand {sigma} (contains square factor)"
        )));
    }
    let head = head.trim_end();
    let (rat_part, coeff_str) = match head.rfind(|c| c == '+' || c == '-') {
        Some(i) if i > 0 => {
            let (a, op_b) = head.split_at(i);
            (a.trim(), op_b.trim())
        }
        _ => ("0", head),
    };
    let coeff_str = coeff_str.trim_end_matches('*').trim();
    let coeff = match coeff_str {
        "" | "+" => rat_int(1),
        "-" => rat_int(-1),
        other => {
            let (sign, body) = match other.strip_prefix('-') {
                Some(b) => (rat_int(-1), b),
                None => (rat_int(1), other.strip_prefix('+').unwrap_or(other)),
            };
            sign * parse_rational(body.trim())?
        }
    };
    let a = parse_rational(rat_part)?;
    Ok(Surd::new(a, coeff, sigma))
}

/// Compares a rational against `sqrt(r)` (`r >= 0`) exactly.
pub fn cmp_rational_vs_sqrt(x: &Rational, r: &Rational) -> Ordering {
    assert!(!r.is_negative(), "comparing against sqrt of a negative");
    if x.is_negative() {
        return if r.is_zero() && x.is_zero() {
            Ordering::Equal
        } else {
            Ordering::Less
        };
    }
    (x * x).cmp(r)
}

/// Compares `c1 - sqrt(r1)` with `c2 - sqrt(r2)` exactly (all rationals,
/// `r1, r2 >= 0`). Used for subleading terms `e_k = c_k - sqrt(2 k Vol)`.
pub fn cmp_diff_sqrt(c1: &Rational, r1: &Rational, c2: &Rational, r2: &Rational) -> Ordering {
    // c1 - c2  vs  sqrt(r1) - sqrt(r2)
    let d = c1 - c2;
    let rcmp = r1.cmp(r2);
    let dsign = sign_of(&d);
    match (dsign, rcmp) {
        (1, Ordering::Less) | (1, Ordering::Equal) | (0, Ordering::Less) => Ordering::Greater,
        (-1, Ordering::Greater) | (-1, Ordering::Equal) | (0, Ordering::Greater) => Ordering::Less,
        (0, Ordering::Equal) => Ordering::Equal,
        _ => {
            // d and sqrt(r1)-sqrt(r2) share a sign; square once:
            // d^2 vs r1 + r2 - 2 sqrt(r1 r2), oriented by that sign.
            let lhs = &d * &d - r1 - r2;
            let prod = r1 * r2;
            // Compare lhs vs -2 sqrt(prod):
            let inner = if lhs.is_negative() {
                // both negative; square again, reversing.
                let l2 = &lhs * &lhs;
                let p4 = Rational::from(BigInt::from(4)) * &prod;
                p4.cmp(&l2)
            } else {
                if prod.is_zero() && lhs.is_zero() {
                    Ordering::Equal
                } else {
                    Ordering::Greater
                }
            };
            // inner = cmp(d^2, (sqrt r1 - sqrt r2)^2)
            if dsign > 0 {
                inner
            } else {
                inner.reverse()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_round_trip() {
        for s in ["3/4", "-7/5", "12", "0", "-3"] {
            let r = parse_rational(s).unwrap();
            assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
        }
    }

    #[test]
    fn surd_sign_cases() {
        assert_eq!(Surd::new(rat_int(0), rat_int(0), 5).sign(), 0);
        assert_eq!(Surd::new(rat_int(3), rat_int(-1), 5).sign(), 1);
        assert_eq!(Surd::new(rat_int(-7), rat_int(3), 5).sign(), -1);
        assert_eq!(Surd::new(rat_int(-2), rat_int(1), 5).sign(), 1);
    }

    #[test]
    fn norm_is_multiplicative_and_lambda_unit() {
        // lambda = (5 + sqrt(21)) / 2 has norm 1.
        let lam = Surd::new(rat(5, 2), rat(1, 2), 21);
        assert_eq!(lam.norm(), rat_int(1));
        assert_eq!(Surd::new(rat_int(2), rat_int(0), 7).norm(), rat_int(4));
        assert_eq!(Surd::new(rat_int(1), rat_int(1), 2).norm(), rat_int(-1));
    }

    #[test]
    fn sigma_canonicalization() {
        // sqrt(45) = 3 sqrt(5)
        let x = Surd::new(rat_int(0), rat_int(1), 45);
        assert_eq!(x.sigma(), 5);
        assert_eq!(x.surd_coeff(), &rat_int(3));
        // sqrt(49) = 7 is rational
        let y = Surd::new(rat_int(1), rat_int(2), 49);
        assert!(y.is_rational());
        assert_eq!(y.as_rational().unwrap(), &rat_int(15));
    }

    #[test]
    fn sqrt_rational_works() {
        let x = Surd::sqrt_rational(&rat(9, 4)).unwrap();
        assert_eq!(x.as_rational().unwrap(), &rat(3, 2));
        let y = Surd::sqrt_rational(&rat(1, 2)).unwrap();
        // sqrt(1/2) = sqrt(2)/2
        assert_eq!(y.sigma(), 2);
        assert_eq!(y.surd_coeff(), &rat(1, 2));
        assert_eq!((y.clone() * y).as_rational().unwrap(), &rat(1, 2));
    }

    #[test]
    fn floor_of_surds() {
        let phi = Surd::new(rat(1, 2), rat(1, 2), 5);
        assert_eq!(phi.floor(), BigInt::from(1));
        let x = Surd::new(rat_int(1), rat_int(1), 2); // 1 + sqrt 2 = 2.414
        assert_eq!(x.floor(), BigInt::from(2));
        let neg = Surd::new(rat_int(0), rat_int(-1), 2); // -1.414
        assert_eq!(neg.floor(), BigInt::from(-2));
        let exact = Surd::from_rational(rat_int(4));
        assert_eq!(exact.floor(), BigInt::from(4));
    }

    #[test]
    fn surd_parse_and_display() {
        let x = parse_surd("3/2 + 1/2*sqrt(5)").unwrap();
        assert_eq!(x, Surd::new(rat(3, 2), rat(1, 2), 5));
        assert_eq!(parse_surd(&x.to_string()).unwrap(), x);
        let y = parse_surd("2 - sqrt(2)").unwrap();
        assert_eq!(y, Surd::new(rat_int(2), rat_int(-1), 2));
        assert_eq!(parse_surd("7/3").unwrap(), Surd::from_rational(rat(7, 3)));
        assert!(parse_surd("1 + 2*sqrt(12)").is_err()); // non-canonical
    }

    #[test]
    fn cmp_diff_sqrt_agrees_with_structure() {
        // 3 - sqrt(2) > 3 - sqrt(3)
        assert_eq!(
            cmp_diff_sqrt(&rat_int(3), &rat_int(2), &rat_int(3), &rat_int(3)),
            Ordering::Greater
        );
        // 1 - sqrt(4) < 2 - sqrt(4)
        assert_eq!(
            cmp_diff_sqrt(&rat_int(1), &rat_int(4), &rat_int(2), &rat_int(4)),
            Ordering::Less
        );
        // 2 - sqrt(2) vs 3 - sqrt(8): 0.586 vs 0.172
        assert_eq!(
            cmp_diff_sqrt(&rat_int(2), &rat_int(2), &rat_int(3), &rat_int(8)),
            Ordering::Greater
        );
        // equality: 5 - sqrt(9) = 4 - sqrt(4)
        assert_eq!(
            cmp_diff_sqrt(&rat_int(5), &rat_int(9), &rat_int(4), &rat_int(4)),
            Ordering::Equal
        );
    }
}
