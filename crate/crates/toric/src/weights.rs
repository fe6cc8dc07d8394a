//! Continued fractions and weight expansions.
//!
//! For a rational `p/q >= 1` in lowest terms the weight expansion `w(p/q)` is
//! the nonincreasing list of ball sizes obtained from the Euclidean algorithm
//! on `(p, q)`; its integral form is `W(p, q) = q * w(p/q)`. Near a rational
//! center the entries of `w(z)` are affine functions of `z` on a maximal
//! one-sided interval, computed here symbolically ([`local_forms`]).
//!
//! The same Euclidean recursion runs verbatim in a real quadratic field,
//! giving exact weight sequences of quadratic irrationals
//! ([`weight_entries_surd`]), which the staircase and capacity-function
//! modules use at irrational points.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::fmt;

use crate::exactnum::{Rational, Surd};
use crate::{Error, Result};

/// Canonical continued fraction `[a0; a1, ..., an]`: all entries positive and
/// the last entry `>= 2` whenever the length exceeds one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContinuedFraction {
    entries: Vec<BigInt>,
}

impl ContinuedFraction {
    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    /// Convergents `(p_0/q_0, ..., p_n/q_n)`; the last one is the value.
    pub fn convergents(&self) -> Vec<(BigInt, BigInt)> {
        let mut out = Vec::with_capacity(self.entries.len());
        let (mut p_prev, mut q_prev) = (BigInt::one(), BigInt::zero());
        let (mut p, mut q) = (self.entries[0].clone(), BigInt::one());
        out.push((p.clone(), q.clone()));
        for a in &self.entries[1..] {
            let p_next = a * &p + &p_prev;
            let q_next = a * &q + &q_prev;
            p_prev = std::mem::replace(&mut p, p_next);
            q_prev = std::mem::replace(&mut q, q_next);
            out.push((p.clone(), q.clone()));
        }
        out
    }

    pub fn value(&self) -> Rational {
        let (p, q) = self.convergents().pop().unwrap();
        Rational::new(p, q)
    }

    /// Value of this fraction with an extra entry appended (used for
    /// one-sided validity endpoints of local forms).
    fn value_extended_by_one(&self) -> Rational {
        let mut entries = self.entries.clone();
        entries.push(BigInt::one());
        ContinuedFraction { entries }.value()
    }
}

impl fmt::Display for ContinuedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}", self.entries[0])?;
        for (i, a) in self.entries[1..].iter().enumerate() {
            write!(f, "{}{}", if i == 0 { ";" } else { "," }, a)?;
        }
        write!(f, "]")
    }
}

/// Parses "[a0;a1,a2]" (also accepts "[a0]").
pub fn parse_cf(s: &str) -> Result<ContinuedFraction> {
    let body = s
        .trim()
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| Error::Parse(format!("continued fraction must be bracketed: {s:?}")))?;
    let (head, rest) = match body.split_once(';') {
        Some((h, r)) => (h, Some(r)),
        None => (body, None),
    };
    let mut entries: Vec<BigInt> = vec![head
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad CF entry {head:?}")))?];
    if let Some(rest) = rest {
        for part in rest.split(',') {
            entries.push(
                part.trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad CF entry {part:?}")))?,
            );
        }
    }
    if entries.iter().any(|a| !a.is_positive()) {
        return Err(Error::Parse("CF entries must be positive".into()));
    }
    if entries.len() > 1 && entries.last().unwrap() < &BigInt::from(2) {
        return Err(Error::Parse("non-canonical CF (trailing 1)".into()));
    }
    Ok(ContinuedFraction { entries })
}

fn check_center(p: &BigInt, q: &BigInt) -> Result<()> {
    if !p.is_positive() || !q.is_positive() {
        return Err(Error::Invalid("p and q must be positive".into()));
    }
    if p < q {
        return Err(Error::Invalid("need p/q >= 1".into()));
    }
    if num_integer::gcd(p.clone(), q.clone()) != BigInt::one() {
        return Err(Error::Invalid("p and q must be coprime".into()));
    }
    Ok(())
}

/// Canonical continued fraction of `p/q` (coprime, `p >= q >= 1`).
pub fn cf_of(p: &BigInt, q: &BigInt) -> Result<ContinuedFraction> {
    check_center(p, q)?;
    let mut entries = Vec::new();
    let (mut num, mut den) = (p.clone(), q.clone());
    while !den.is_zero() {
        let (quot, rem) = num_integer::div_rem(num.clone(), den.clone());
        entries.push(quot);
        num = den;
        den = rem;
    }
    // Euclid on a canonical pair never emits a trailing 1 except for [1].
    debug_assert!(entries.len() == 1 || entries.last().unwrap() >= &BigInt::from(2));
    Ok(ContinuedFraction { entries })
}

pub fn cf_of_u64(p: u64, q: u64) -> Result<ContinuedFraction> {
    cf_of(&BigInt::from(p), &BigInt::from(q))
}

/// Weight expansion `w(p/q)` in block form: nonincreasing values with
/// multiplicities aligned to the continued-fraction entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightExpansion {
    blocks: Vec<(Rational, BigInt)>,
}

impl WeightExpansion {
    pub fn blocks(&self) -> &[(Rational, BigInt)] {
        &self.blocks
    }

    /// Materializes the entries; errors if a multiplicity exceeds `usize`.
    pub fn entries(&self) -> Vec<Rational> {
        let mut out = Vec::new();
        for (value, mult) in &self.blocks {
            let m = usize::try_from(mult.clone()).expect("weight multiplicity fits usize");
            out.extend(std::iter::repeat(value.clone()).take(m));
        }
        out
    }

    pub fn sum(&self) -> Rational {
        self.blocks
            .iter()
            .map(|(v, m)| v * Rational::from(m.clone()))
            .sum()
    }

    pub fn sum_of_squares(&self) -> Rational {
        self.blocks
            .iter()
            .map(|(v, m)| v * v * Rational::from(m.clone()))
            .sum()
    }
}

/// Integral weights `W(p,q)` in block form `(remainder, multiplicity)`.
fn integral_weight_blocks(p: &BigInt, q: &BigInt) -> Result<Vec<(BigInt, BigInt)>> {
    check_center(p, q)?;
    let cf = cf_of(p, q)?;
    let mut blocks = Vec::new();
    let (mut num, mut den) = (p.clone(), q.clone());
    for a in cf.entries() {
        let rem = &num - a * &den;
        blocks.push((den.clone(), a.clone()));
        num = std::mem::replace(&mut den, rem);
        let _ = &num;
    }
    Ok(blocks)
}

/// `w(p/q)`: nonincreasing, satisfies `sum = p/q + 1 - 1/q` and
/// `sum of squares = p/q`.
pub fn weight_expansion(p: &BigInt, q: &BigInt) -> Result<WeightExpansion> {
    let blocks = integral_weight_blocks(p, q)?
        .into_iter()
        .map(|(v, m)| (Rational::new(v, q.clone()), m))
        .collect();
    Ok(WeightExpansion { blocks })
}

pub fn weight_expansion_u64(p: u64, q: u64) -> Result<WeightExpansion> {
    weight_expansion(&BigInt::from(p), &BigInt::from(q))
}

/// `W(p,q) = q * w(p/q)` as a flat integer vector.
pub fn integral_weights(p: &BigInt, q: &BigInt) -> Result<Vec<BigInt>> {
    let mut out = Vec::new();
    for (value, mult) in integral_weight_blocks(p, q)? {
        let m = usize::try_from(mult).expect("weight multiplicity fits usize");
        out.extend(std::iter::repeat(value).take(m));
    }
    Ok(out)
}

pub fn integral_weights_u64(p: u64, q: u64) -> Result<Vec<BigInt>> {
    integral_weights(&BigInt::from(p), &BigInt::from(q))
}

/// First `count` entries of the weight sequence `w(z)` for exact `z >= 1`
/// in a real quadratic field (or rational, in which case the sequence is
/// finite and may end early). Runs the Euclidean recursion in the field.
pub fn weight_entries_surd(z: &Surd, count: usize) -> Result<Vec<Surd>> {
    if (z.clone() - Surd::one()).sign() < 0 {
        return Err(Error::Invalid("weight sequence needs z >= 1".into()));
    }
    let mut out = Vec::with_capacity(count);
    let mut prev = z.clone();
    let mut cur = Surd::one();
    while out.len() < count && cur.sign() > 0 {
        let ratio = prev.clone() / cur.clone();
        let a = ratio.floor();
        let mut reps = usize::try_from(a.clone()).unwrap_or(usize::MAX);
        let next = prev - Surd::from_rational(Rational::from(a)) * cur.clone();
        if reps == 0 {
            return Err(Error::Invalid("weight recursion stalled".into()));
        }
        while reps > 0 && out.len() < count {
            out.push(cur.clone());
            reps -= 1;
        }
        prev = std::mem::replace(&mut cur, next);
    }
    Ok(out)
}

/// One-sided affine descriptions of `w(z)` near a rational center.
///
/// Each side lists blocks `(alpha + beta * z, multiplicity)`, followed by the
/// single overflow form `+-(p - q z)` whose multiplicity depends on `z`; the
/// blocks alone contain exactly `len(W(p,q))` entries. Valid strictly
/// between the center and `z_end`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SideForms {
    /// (alpha, beta) meaning `alpha + beta * z`, with multiplicity.
    pub blocks: Vec<((Rational, Rational), BigInt)>,
    /// The next entry after the blocks: `alpha + beta * z`.
    pub next_form: (Rational, Rational),
    /// Open validity endpoint on this side of the center.
    pub z_end: Rational,
}

impl SideForms {
    /// Entries of `w(z)` covered by the blocks, evaluated at `z`.
    pub fn evaluate(&self, z: &Rational) -> Vec<Rational> {
        let mut out = Vec::new();
        for ((alpha, beta), mult) in &self.blocks {
            let v = alpha + beta * z;
            let m = usize::try_from(mult.clone()).expect("multiplicity fits usize");
            out.extend(std::iter::repeat(v).take(m));
        }
        out
    }

    /// `W(p,q) . w(z)` as an affine form `(alpha, beta)`; the blocks pair up
    /// with the integral weights entry by entry.
    pub fn dot_integral_weights(&self, weights: &[BigInt]) -> (Rational, Rational) {
        let mut alpha = Rational::zero();
        let mut beta = Rational::zero();
        let mut idx = 0usize;
        for ((a, b), mult) in &self.blocks {
            let m = usize::try_from(mult.clone()).expect("multiplicity fits usize");
            for _ in 0..m {
                let w = Rational::from(weights[idx].clone());
                alpha += a * &w;
                beta += b * &w;
                idx += 1;
            }
        }
        assert_eq!(idx, weights.len(), "weight vector length mismatch");
        (alpha, beta)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalLinearForms {
    pub center: Rational,
    /// Forms valid on `(left.z_end, center)`; absent when the center is 1.
    pub left: Option<SideForms>,
    /// Forms valid on `(center, right.z_end)`.
    pub right: SideForms,
}

/// Symbolic Euclid with a prescribed quotient sequence: starting from the
/// affine pair `(z, 1)`, each step replaces `(f, g)` by `(g, f - a g)`.
fn side_forms_for_representation(entries: &[BigInt], endpoint: Rational) -> SideForms {
    let mut f = (Rational::zero(), Rational::one()); // z
    let mut g = (Rational::one(), Rational::zero()); // 1
    let mut blocks = Vec::new();
    for a in entries {
        let ar = Rational::from(a.clone());
        let next = (&f.0 - &ar * &g.0, &f.1 - &ar * &g.1);
        blocks.push((g.clone(), a.clone()));
        f = std::mem::replace(&mut g, next);
    }
    SideForms {
        blocks,
        next_form: g,
        z_end: endpoint,
    }
}

/// Maximal one-sided affine families for `w(z)` near `p/q`, with explicit
/// validity endpoints. Just below the center `W(p,q) . w(z) = q z`; just
/// above, `W(p,q) . w(z) = p`.
pub fn local_forms(p: &BigInt, q: &BigInt) -> Result<LocalLinearForms> {
    check_center(p, q)?;
    let cf = cf_of(p, q)?;
    let center = Rational::new(p.clone(), q.clone());
    let canonical = cf.entries().to_vec();
    // Extending the canonical form [a0..an] by one entry approaches the
    // center from below iff n is odd; the alternate form [a0..an-1, 1]
    // covers the other side.
    let alternate: Option<Vec<BigInt>> = if canonical.len() == 1 {
        if canonical[0] > BigInt::one() {
            Some(vec![&canonical[0] - 1, BigInt::one()])
        } else {
            None // p/q = 1 has no weights to the left
        }
    } else {
        let mut alt = canonical.clone();
        let last = alt.last_mut().unwrap();
        *last -= 1;
        alt.push(BigInt::one());
        Some(alt)
    };
    let canonical_endpoint = cf.value_extended_by_one();
    let canonical_side_is_left = canonical.len() % 2 == 0; // n = len-1 odd
    let canonical_forms = side_forms_for_representation(&canonical, canonical_endpoint);
    let alternate_forms = alternate.map(|alt| {
        let endpoint = ContinuedFraction {
            entries: alt.clone(),
        }
        .value_extended_by_one();
        side_forms_for_representation(&alt, endpoint)
    });
    let (left, right) = if canonical_side_is_left {
        (Some(canonical_forms), alternate_forms.expect("len > 1"))
    } else {
        (alternate_forms, canonical_forms)
    };
    Ok(LocalLinearForms {
        center,
        left,
        right,
    })
}

pub fn local_forms_u64(p: u64, q: u64) -> Result<LocalLinearForms> {
    local_forms(&BigInt::from(p), &BigInt::from(q))
}
