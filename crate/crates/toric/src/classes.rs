//! Diophantine obstruction classes and their obstruction functions.
//!
//! A class `(d; mtilde; m)` pairs a degree `d` with multiplicities `mtilde`
//! against the cuts of a target domain and multiplicities `m` against the
//! weight expansion of an ellipsoid parameter `z`. Classes satisfying the
//! Diophantine system `3d - sum(mtilde) - sum(m) = 1`,
//! `d^2 - sum(mtilde^2) - sum(m^2) = -1` give lower bounds
//! `mu(z) = (m . w(z)) / (d b - mtilde . cuts)` for the ellipsoid embedding
//! function of the target; the class is obstructive at `z` when `mu(z)`
//! exceeds the volume bound `sqrt(z / Vol)`. All comparisons are exact.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use std::fmt;

use crate::domains::WeightTuple;
use crate::exactnum::{rat, rat_int, Rational, Surd};
use crate::weights;
use crate::{Error, Result};

/// Obstruction class `(d; mtilde; m)` with nonincreasing multiplicity
/// vectors. `i128` is ample: staircase families reach entries near `5e15`,
/// whose squares still fit comfortably.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ObstructionClass {
    pub d: i128,
    pub mtilde: Vec<i128>,
    pub m: Vec<i128>,
}

fn sorted_desc(mut v: Vec<i128>) -> Vec<i128> {
    v.retain(|&x| x != 0);
    v.sort_unstable_by(|a, b| b.cmp(a));
    v
}

impl ObstructionClass {
    /// Normalizes both multiplicity vectors (nonincreasing, zeros dropped).
    pub fn new(d: i128, mtilde: Vec<i128>, m: Vec<i128>) -> Result<ObstructionClass> {
        if d <= 0 {
            return Err(Error::Invalid("class degree must be positive".into()));
        }
        if mtilde.iter().chain(m.iter()).any(|&x| x < 0) {
            return Err(Error::Invalid("class multiplicities must be >= 0".into()));
        }
        Ok(ObstructionClass {
            d,
            mtilde: sorted_desc(mtilde),
            m: sorted_desc(m),
        })
    }

    /// The two Diophantine conditions (degree one and self-intersection -1).
    pub fn satisfies_diophantine(&self) -> bool {
        let s: i128 = self.mtilde.iter().sum::<i128>() + self.m.iter().sum::<i128>();
        let t: i128 = self.mtilde.iter().map(|x| x * x).sum::<i128>()
            + self.m.iter().map(|x| x * x).sum::<i128>();
        3 * self.d - s == 1 && self.d * self.d - t == -1
    }

    /// Denominator `d b - mtilde . cuts` of the obstruction function;
    /// must be positive for the class to obstruct anything.
    pub fn lambda(&self, target: &WeightTuple) -> Result<Rational> {
        if self.mtilde.len() > target.cuts.len() {
            return Err(Error::Invalid(
                "class has more cut multiplicities than the target has cuts".into(),
            ));
        }
        let mut acc = Rational::from(BigInt::from(self.d)) * &target.head;
        for (mt, cut) in self.mtilde.iter().zip(target.cuts.iter()) {
            acc -= Rational::from(BigInt::from(*mt)) * cut;
        }
        if !acc.is_positive() {
            return Err(Error::Invalid(
                "class pairs nonpositively with the target".into(),
            ));
        }
        Ok(acc)
    }

    /// `m . w(z)`, truncating or zero-padding `w(z)` to the length of `m`.
    pub fn weight_pairing(&self, z: &Rational) -> Result<Rational> {
        let w = weights::weight_expansion(z.numer(), z.denom())?;
        let entries = w.entries();
        let mut acc = Rational::zero();
        for (mi, wi) in self.m.iter().zip(entries.iter()) {
            acc += Rational::from(BigInt::from(*mi)) * wi;
        }
        Ok(acc)
    }

    /// Obstruction `mu(z) = (m . w(z)) / (d b - mtilde . cuts)`.
    pub fn mu_at(&self, target: &WeightTuple, z: &Rational) -> Result<Rational> {
        Ok(self.weight_pairing(z)? / self.lambda(target)?)
    }

    /// Exact test of `mu(z) > sqrt(z / Vol)`.
    pub fn is_obstructive_at(&self, target: &WeightTuple, z: &Rational) -> Result<bool> {
        let mu = self.mu_at(target, z)?;
        let vol = target.volume();
        if !vol.is_positive() {
            return Err(Error::Invalid("target must have positive volume".into()));
        }
        Ok(crate::exactnum::cmp_rational_vs_sqrt(&mu, &(z / vol)) == std::cmp::Ordering::Greater)
    }

    /// Upper bound for `mu(z)`:
    /// `sqrt( z / (b^2 d^2/(d^2+1) - sum cuts^2) )`, provided the radicand
    /// denominator is positive.
    pub fn mu_upper_bound(&self, target: &WeightTuple, z: &Rational) -> Result<Surd> {
        let d2 = rat_int(self.d as i64) * rat_int(self.d as i64);
        let denom = &target.head * &target.head * &d2 / (&d2 + rat_int(1))
            - target.cuts.iter().map(|c| c * c).sum::<Rational>();
        if !denom.is_positive() {
            return Err(Error::Invalid(
                "degree too small for the obstruction bound".into(),
            ));
        }
        Surd::sqrt_rational(&(z / denom))
    }

    /// Squared norm of the error vector `m - (d / (lambda b)) w` at the
    /// point `a`, where `w` concatenates `lambda * cuts` with the weight
    /// expansion of `a` and `lambda = sqrt(a / Vol)`. An obstructive class
    /// has squared error norm below one at its break point.
    pub fn error_norm_sq(&self, target: &WeightTuple, a: &Rational) -> Result<Surd> {
        let vol = target.volume();
        if !vol.is_positive() {
            return Err(Error::Invalid("target must have positive volume".into()));
        }
        self.lambda(target)?; // validates pairing positivity and lengths
        let d = rat_int(self.d as i64);
        let sum_sq: Rational = self
            .mtilde
            .iter()
            .chain(self.m.iter())
            .map(|&x| rat_int(x as i64) * rat_int(x as i64))
            .sum();
        let mt_dot_cuts: Rational = self
            .mtilde
            .iter()
            .zip(target.cuts.iter())
            .map(|(mt, c)| rat_int(*mt as i64) * c)
            .sum();
        let rational_part =
            &sum_sq + &d * &d - rat(2, 1) * &d * mt_dot_cuts / &target.head;
        let coeff = -rat_int(2) * &d * self.weight_pairing(a)? / &target.head;
        // The irrational part is coeff * sqrt(Vol / a).
        let root = Surd::sqrt_rational(&(&vol / a))?;
        Ok(Surd::from_rational(rational_part) + Surd::from_rational(coeff) * root)
    }

    /// Break point: the obstructed rational with the shortest continued
    /// fraction. Searches all rationals of weight length up to `len(m)`
    /// (the break point's weight expansion has exactly that length), so the
    /// result is exact; `None` if the class obstructs nowhere in range.
    pub fn break_point(&self, target: &WeightTuple) -> Result<Option<Rational>> {
        let max_weight_len = self.m.len();
        let mut found: Option<(usize, Rational)> = None;
        let mut consider = |this: &ObstructionClass, z: Rational| -> Result<()> {
            if this.is_obstructive_at(target, &z)? {
                let cf_len = weights::cf_of(z.numer(), z.denom())?.entries().len();
                if found.as_ref().map_or(true, |(best, _)| cf_len < *best) {
                    found = Some((cf_len, z));
                }
            }
            Ok(())
        };
        consider(self, rat_int(1))?;
        // Mediant tree on (1, infinity); a node at depth j is a rational of
        // weight length j + 2.
        let mut frontier: Vec<((BigInt, BigInt), (BigInt, BigInt))> =
            vec![((BigInt::from(1), BigInt::from(1)), (BigInt::from(1), BigInt::zero()))];
        let mut depth = 0usize;
        while depth + 2 <= max_weight_len && !frontier.is_empty() {
            let mut next = Vec::with_capacity(frontier.len() * 2);
            for ((p1, q1), (p2, q2)) in frontier {
                let mp = &p1 + &p2;
                let mq = &q1 + &q2;
                consider(self, Rational::new(mp.clone(), mq.clone()))?;
                next.push(((p1, q1), (mp.clone(), mq.clone())));
                next.push(((mp, mq), (p2, q2)));
            }
            frontier = next;
            depth += 1;
        }
        Ok(found.map(|(_, z)| z))
    }
}

impl fmt::Display for ObstructionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[i128]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        };
        write!(f, "({}; {}; {})", self.d, join(&self.mtilde), join(&self.m))
    }
}

/// Parses "(d; a, b; c, d)" (either multiplicity list may be empty).
pub fn parse_class(s: &str) -> Result<ObstructionClass> {
    let body = s
        .trim()
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .unwrap_or_else(|| s.trim());
    let parts: Vec<&str> = body.split(';').collect();
    if parts.len() != 3 {
        return Err(Error::Parse(
            "class must look like (d; mtilde...; m...)".into(),
        ));
    }
    let d: i128 = parts[0]
        .trim()
        .parse()
        .map_err(|_| Error::Parse("bad class degree".into()))?;
    let parse_list = |t: &str| -> Result<Vec<i128>> {
        t.split(',')
            .map(str::trim)
            .filter(|x| !x.is_empty())
            .map(|x| {
                x.parse()
                    .map_err(|_| Error::Parse(format!("bad multiplicity {x:?}")))
            })
            .collect()
    };
    ObstructionClass::new(d, parse_list(parts[1])?, parse_list(parts[2])?)
}

/// Class whose ellipsoid multiplicities are the integral weights of a center
/// `p/q`, stored by center instead of by vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuasiPerfectClass {
    pub d: i128,
    pub mtilde: Vec<i128>,
    pub p: i128,
    pub q: i128,
}

impl QuasiPerfectClass {
    pub fn center(&self) -> Rational {
        rat(self.p as i64, self.q as i64)
    }

    pub fn center_big(&self) -> Rational {
        Rational::new(BigInt::from(self.p), BigInt::from(self.q))
    }

    /// The defining relations `3d - sum(mtilde) = p + q` and
    /// `d^2 - sum(mtilde^2) = p q - 1`.
    pub fn satisfies_relations(&self) -> bool {
        let s: i128 = self.mtilde.iter().sum();
        let t: i128 = self.mtilde.iter().map(|x| x * x).sum();
        3 * self.d - s == self.p + self.q && self.d * self.d - t == self.p * self.q - 1
    }

    /// Expands the center into the explicit class `(d; mtilde; W(p, q))`.
    pub fn to_class(&self) -> Result<ObstructionClass> {
        let w = weights::integral_weights(&BigInt::from(self.p), &BigInt::from(self.q))?;
        let m = w
            .into_iter()
            .map(|x| {
                x.to_i128()
                    .ok_or_else(|| Error::Unsupported("weight exceeds i128".into()))
            })
            .collect::<Result<Vec<i128>>>()?;
        ObstructionClass::new(self.d, self.mtilde.clone(), m)
    }
}

/// All classes satisfying the Diophantine system with degree up to `dmax`
/// and at most as many cut multiplicities as the target has cuts.
pub fn enumerate_classes(target: &WeightTuple, dmax: i128) -> Result<Vec<ObstructionClass>> {
    let ncuts = target.cuts.len();
    let mut out = Vec::new();
    for d in 1..=dmax {
        let s_total = 3 * d - 1;
        let t_total = d * d + 1;
        // Choose the cut-multiplicity vector, then the weight multiplicities
        // must use up the exact remaining sum and sum of squares.
        let mut mtilde: Vec<i128> = Vec::new();
        enumerate_mtilde(
            d,
            ncuts,
            s_total,
            t_total,
            i128::MAX,
            &mut mtilde,
            &mut out,
        );
    }
    Ok(out)
}

fn enumerate_mtilde(
    d: i128,
    slots: usize,
    s_rem: i128,
    t_rem: i128,
    max_entry: i128,
    mtilde: &mut Vec<i128>,
    out: &mut Vec<ObstructionClass>,
) {
    // Close off mtilde here and fill m with the exact remainder.
    let mut m = Vec::new();
    enumerate_exact(s_rem, t_rem, s_rem.min(isqrt_i128(t_rem)), &mut m, &mut |m| {
        out.push(ObstructionClass {
            d,
            mtilde: mtilde.clone(),
            m: m.to_vec(),
        });
    });
    if slots == 0 {
        return;
    }
    let cap = max_entry.min(s_rem).min(isqrt_i128(t_rem));
    for x in (1..=cap).rev() {
        mtilde.push(x);
        enumerate_mtilde(d, slots - 1, s_rem - x, t_rem - x * x, x, mtilde, out);
        mtilde.pop();
    }
}

/// Nonincreasing positive vectors with exact sum `s` and sum of squares `t`.
fn enumerate_exact(
    s: i128,
    t: i128,
    max_entry: i128,
    acc: &mut Vec<i128>,
    emit: &mut impl FnMut(&[i128]),
) {
    if s == 0 {
        if t == 0 {
            emit(acc);
        }
        return;
    }
    // Each further entry is in [1, max_entry]: the sum of squares is at
    // least s and at most s * max_entry.
    if t < s || t > s * max_entry {
        return;
    }
    let cap = max_entry.min(s).min(isqrt_i128(t));
    for x in (1..=cap).rev() {
        acc.push(x);
        enumerate_exact(s - x, t - x * x, x, acc, emit);
        acc.pop();
    }
}

fn isqrt_i128(n: i128) -> i128 {
    if n <= 0 {
        return 0;
    }
    let mut x = (n as f64).sqrt() as i128 + 1;
    while x * x > n {
        x -= 1;
    }
    x
}

/// Degree-`d` obstruction criterion for the absence of an infinite
/// staircase: holds when `d^2 <= Vol` and `Per < d + Vol / d` exactly.
pub fn no_staircase_by_degree(target: &WeightTuple, d: i128) -> Result<bool> {
    if d <= 0 {
        return Err(Error::Invalid("degree must be positive".into()));
    }
    let vol = target.volume();
    if !vol.is_positive() {
        return Err(Error::Invalid("target must have positive volume".into()));
    }
    let per = target.perimeter();
    let dr = rat_int(d as i64);
    Ok(&dr * &dr <= vol && per < &dr + vol / &dr)
}

/// Tuple family `(b + 1; b, (7/32)^x8)`: a polydisc whose unit corner is
/// blunted into eight equal cuts. Its perimeter `2b + 5/4` and volume
/// `2b + 79/128` satisfy the degree-one criterion above for every `b >= 1`.
pub fn blunted_polydisc_tuple(b: &Rational) -> Result<WeightTuple> {
    if b < &rat_int(1) {
        return Err(Error::Invalid("need b >= 1".into()));
    }
    let mut cuts = vec![b.clone()];
    cuts.extend(std::iter::repeat(rat(7, 32)).take(8));
    let tuple = WeightTuple::new(b + rat_int(1), cuts);
    tuple.validate()?;
    Ok(tuple)
}
