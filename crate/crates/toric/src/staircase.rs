//! Recursive families of staircase classes and their limit domains.
//!
//! A family is generated from two adjacent quasi-perfect seed classes by the
//! entrywise recursion `x_{k+1} = t x_k - x_{k-1}`. The concrete family used
//! throughout starts from `E_0 = (2; 1, 1; center 3)` and
//! `E_1(n) = (22+10n; 13+6n, 9+4n, (4+2n)^2, 1^(5+2n); center (22+10n)/(9+4n))`
//! with `t = 5 + 2n`. The steps accumulate on a seven-sided limit domain with
//! cuts in the quadratic field of `sqrt((3+2n)(7+2n))`; this module verifies
//! quasi-perfectness, perfectness (by Cremona reduction), obstructiveness at
//! the centers, the closed forms, and runs the bounded search showing that no
//! class overshadows the staircase. It also builds the "ghost stairs" of an
//! irrational ellipsoid: infinitely many obstructive classes, all flush with
//! the capacity function, coming from continued-fraction convergents.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::classes::{ObstructionClass, QuasiPerfectClass};
use crate::cremona::{self, ClassVector};
use crate::exactnum::{rat, rat_int, Rational, Surd};
use crate::weights;
use crate::{Error, Result};

/// Two adjacent quasi-perfect seeds plus the recursion variable
/// `t = p_0 q_1 - p_1 q_0`.
#[derive(Debug, Clone)]
pub struct StaircaseFamily {
    pub n: u32,
    pub t: i128,
    pub e0: QuasiPerfectClass,
    pub e1: QuasiPerfectClass,
}

/// Adjacency test `d_0 d_1 - mtilde_0 . mtilde_1 = p_1 q_0` for classes with
/// `p_1/q_1 <= p_0/q_0`; the shorter multiplicity vector is zero-padded.
pub fn adjacency_holds(e0: &QuasiPerfectClass, e1: &QuasiPerfectClass) -> bool {
    let dot: i128 = e0
        .mtilde
        .iter()
        .zip(e1.mtilde.iter())
        .map(|(a, b)| a * b)
        .sum();
    e0.d * e1.d - dot == e1.p * e0.q
}

fn check_relations(e: &QuasiPerfectClass) -> Result<()> {
    if !e.satisfies_relations() {
        return Err(Error::Invalid(format!(
            "class (d={}) fails the quasi-perfect relations",
            e.d
        )));
    }
    Ok(())
}

/// Builds the family for a given `n >= 0` and verifies the seed relations
/// and adjacency.
pub fn make_family(n: u32) -> Result<StaircaseFamily> {
    let ni = n as i128;
    let e0 = QuasiPerfectClass {
        d: 2,
        mtilde: vec![1, 1],
        p: 3,
        q: 1,
    };
    let mut mtilde = vec![13 + 6 * ni, 9 + 4 * ni, 4 + 2 * ni, 4 + 2 * ni];
    mtilde.extend(std::iter::repeat(1).take(5 + 2 * n as usize));
    let e1 = QuasiPerfectClass {
        d: 22 + 10 * ni,
        mtilde,
        p: 22 + 10 * ni,
        q: 9 + 4 * ni,
    };
    check_relations(&e0)?;
    check_relations(&e1)?;
    if !adjacency_holds(&e0, &e1) {
        return Err(Error::Invalid("seed classes are not adjacent".into()));
    }
    let t = e0.p * e1.q - e1.p * e0.q;
    debug_assert_eq!(t, 5 + 2 * ni);
    Ok(StaircaseFamily { n, t, e0, e1 })
}

impl StaircaseFamily {
    /// `t^2 - 4`, the (not necessarily square-free) radicand of the family.
    pub fn sigma_raw(&self) -> i128 {
        self.t * self.t - 4
    }

    /// The growth rate `(t + sqrt(t^2 - 4)) / 2`; its conjugate is `1/lambda`.
    pub fn lambda(&self) -> Result<Surd> {
        Ok(Surd::new(
            rat(self.t as i64, 2),
            rat(1, 2),
            u64::try_from(self.sigma_raw())
                .map_err(|_| Error::Invalid("negative radicand".into()))?,
        ))
    }
}

/// Steps `E_0, E_1, ..., E_kmax` by the entrywise recursion; every step is
/// checked quasi-perfect, adjacent to its predecessor, and the centers
/// strictly decrease.
pub fn generate_steps(f: &StaircaseFamily, kmax: usize) -> Result<Vec<QuasiPerfectClass>> {
    let width = f.e1.mtilde.len();
    let pad = |v: &[i128]| {
        let mut out = v.to_vec();
        out.resize(width, 0);
        out
    };
    let mut steps = vec![
        QuasiPerfectClass {
            mtilde: pad(&f.e0.mtilde),
            ..f.e0.clone()
        },
        f.e1.clone(),
    ];
    while steps.len() <= kmax {
        let prev = &steps[steps.len() - 2];
        let last = &steps[steps.len() - 1];
        let next = QuasiPerfectClass {
            d: f.t * last.d - prev.d,
            mtilde: last
                .mtilde
                .iter()
                .zip(prev.mtilde.iter())
                .map(|(a, b)| f.t * a - b)
                .collect(),
            p: f.t * last.p - prev.p,
            q: f.t * last.q - prev.q,
        };
        check_relations(&next)?;
        if !adjacency_holds(last, &next) {
            return Err(Error::Invalid("consecutive steps not adjacent".into()));
        }
        // Strictly decreasing centers: p_{k+1}/q_{k+1} < p_k/q_k.
        if next.p * last.q >= last.p * next.q {
            return Err(Error::Invalid("centers are not strictly decreasing".into()));
        }
        steps.push(next);
    }
    steps.truncate(kmax + 1);
    Ok(steps)
}

/// Solution data for `x_{k+1} = t x_k - x_{k-1}`: the number `X` with
/// `x_k = X lambda^k + conj(X) conj(lambda)^k`.
#[derive(Debug, Clone)]
pub struct ClosedForm {
    pub x: Surd,
    pub lambda: Surd,
}

pub fn closed_form(x0: i128, x1: i128, t: i128) -> Result<ClosedForm> {
    if t < 3 {
        return Err(Error::Invalid("recursion variable must be >= 3".into()));
    }
    let sigma_raw = u64::try_from(t * t - 4).unwrap();
    let lambda = Surd::new(rat(t as i64, 2), rat(1, 2), sigma_raw);
    // X' = x0 / 2, X'' = (2 x1 - t x0) / (2 (t^2 - 4)).
    let x = Surd::new(
        rat(x0 as i64, 2),
        Rational::new(BigInt::from(2 * x1 - t * x0), BigInt::from(2 * (t * t - 4))),
        sigma_raw,
    );
    Ok(ClosedForm { x, lambda })
}

fn surd_pow(base: &Surd, k: u32) -> Surd {
    let mut acc = Surd::one();
    for _ in 0..k {
        acc = acc * base.clone();
    }
    acc
}

impl ClosedForm {
    /// `x_k = X lambda^k + conj(X lambda^k)`, always rational.
    pub fn eval(&self, k: u32) -> Rational {
        let half = self.x.clone() * surd_pow(&self.lambda, k);
        let full = half.clone() + half.conj();
        full.as_rational()
            .expect("conjugate sum must be rational")
            .clone()
    }
}

/// The limit domain of a family: head 1 and cuts in the quadratic field of
/// `sqrt((3+2n)(7+2n))`, together with its exact volume, perimeter,
/// accumulation point and volume bound there.
#[derive(Debug, Clone)]
pub struct LimitDomain {
    pub n: u32,
    pub beta: Surd,
    pub cuts: Vec<Surd>,
    pub vol: Surd,
    pub per: Surd,
    pub z_inf: Surd,
    pub v_inf: Surd,
}

/// Builds the limit domain and verifies its closed-form identities
/// symbolically; errors signal a construction bug.
pub fn limit_domain(f: &StaircaseFamily) -> Result<LimitDomain> {
    let n = f.n as i128;
    let sigma_raw = u64::try_from(f.sigma_raw()).unwrap();
    let root = Surd::new(rat_int(0), rat_int(1), sigma_raw);
    let beta = (Surd::from_int((17 + 8 * n) as i64) + root.clone()).inverse();

    let half = Surd::from_rational(rat(1, 2));
    let b1 = Surd::from_int((2 + n) as i64) * beta.clone() + half.clone();
    let b2 = half.clone() - Surd::from_int((2 + n) as i64) * beta.clone();
    let b3 = Surd::from_int((4 + 2 * n) as i64) * beta.clone();
    let mut cuts = vec![b1.clone(), b2.clone(), b3.clone(), b3];
    cuts.extend(std::iter::repeat(beta.clone()).take((5 + 2 * n) as usize));

    // b1 + b2 = 1.
    if b1 + b2 != Surd::one() {
        return Err(Error::Invalid("first two cuts do not sum to one".into()));
    }

    let sum_sq = cuts
        .iter()
        .fold(Surd::zero(), |acc, c| acc + c.clone() * c.clone());
    let vol = Surd::one() - sum_sq;
    let per = cuts
        .iter()
        .fold(Surd::from_int(3), |acc, c| acc - c.clone());

    // Closed forms: Vol = 1/2 - beta^2 (45 + 42 n + 10 n^2),
    // Per = 2 - beta (13 + 6 n).
    let vol_claim = half.clone()
        - beta.clone() * beta.clone() * Surd::from_int((45 + 42 * n + 10 * n * n) as i64);
    let per_claim = Surd::from_int(2) - beta.clone() * Surd::from_int((13 + 6 * n) as i64);
    if vol != vol_claim || per != per_claim {
        return Err(Error::Invalid("volume/perimeter identities failed".into()));
    }

    let denom = Surd::from_int((13 + 6 * n) as i64) + root.clone();
    let z_inf = (Surd::from_int((29 + 14 * n) as i64) + Surd::from_int(3) * root.clone())
        / denom.clone();
    let v_inf =
        Surd::from_int(2) * (Surd::from_int((17 + 8 * n) as i64) + root) / denom;

    // z_inf solves z^2 - (Per^2/Vol - 2) z + 1 = 0, and v_inf^2 = z_inf/Vol.
    let s = per.clone() * per.clone() / vol.clone() - Surd::from_int(2);
    let quad = z_inf.clone() * z_inf.clone() - s * z_inf.clone() + Surd::one();
    if !quad.is_zero() {
        return Err(Error::Invalid("accumulation point identity failed".into()));
    }
    if v_inf.clone() * v_inf.clone() != z_inf.clone() / vol.clone() {
        return Err(Error::Invalid("volume bound identity failed".into()));
    }

    Ok(LimitDomain {
        n: f.n,
        beta,
        cuts,
        vol,
        per,
        z_inf,
        v_inf,
    })
}

/// Every step up to `kmax` reduces to the trivial exceptional vector, hence
/// is perfect.
pub fn verify_perfect(f: &StaircaseFamily, kmax: usize) -> Result<bool> {
    for step in generate_steps(f, kmax)? {
        let class = step.to_class()?;
        let (ok, _) = cremona::is_exceptional(&ClassVector::from_class(&class))?;
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Checks, for every step up to `kmax`, the multiplicity identity
/// `mtilde = (d-q, q, (d-2q)^2, (5q-d-p)^(2n+5))` and the exact inequality
/// `mu(p/q) > sqrt((p/q)/Vol)` against the limit domain.
pub fn verify_obstructive(f: &StaircaseFamily, kmax: usize) -> Result<bool> {
    let dom = limit_domain(f)?;
    let n = f.n as i128;
    for step in generate_steps(f, kmax)? {
        let (d, p, q) = (step.d, step.p, step.q);
        let mut claim = vec![d - q, q, d - 2 * q, d - 2 * q];
        claim.extend(std::iter::repeat(5 * q - d - p).take((5 + 2 * n) as usize));
        if step.mtilde != claim {
            return Ok(false);
        }
        // Degree identity d(5+2n) + 2(2+n)p - 2(11+5n)q = 0.
        if d * (5 + 2 * n) + 2 * (2 + n) * p - 2 * (11 + 5 * n) * q != 0 {
            return Ok(false);
        }
        if !step_obstructive(&step, &dom)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn mtilde_dot_cuts(mtilde: &[i128], cuts: &[Surd]) -> Result<Surd> {
    if mtilde.len() > cuts.len() {
        return Err(Error::Invalid("more multiplicities than cuts".into()));
    }
    Ok(mtilde
        .iter()
        .zip(cuts.iter())
        .fold(Surd::zero(), |acc, (m, c)| {
            acc + Surd::from_int(*m as i64) * c.clone()
        }))
}

/// Exact test of `p/(d - mtilde.cuts) > sqrt((p/q)/Vol)` in the quadratic
/// field of the limit domain.
pub fn step_obstructive(step: &QuasiPerfectClass, dom: &LimitDomain) -> Result<bool> {
    let lambda = Surd::from_int(step.d as i64) - mtilde_dot_cuts(&step.mtilde, &dom.cuts)?;
    if lambda.sign() <= 0 {
        return Err(Error::Invalid("nonpositive pairing with limit domain".into()));
    }
    let mu = Surd::from_int(step.p as i64) / lambda;
    let bound_sq = Surd::from_rational(rat(step.p as i64, step.q as i64)) / dom.vol.clone();
    Ok(mu.sign() > 0
        && (mu.clone() * mu - bound_sq).sign() > 0)
}

/// One-point-blowup companion family: centers `[2n+6]` and `[2n+7; 2n+4]`
/// under the same recursion, with degrees and single multiplicities defined
/// by `(2n+5) dbar = (2+n) pbar + (3+n) qbar` and
/// `(2n+5) mbar = (1+n) pbar + (4+n) qbar`.
///
/// Verifies for `k <= kmax`: the divisibility making `dbar, mbar` integers,
/// the blowup quasi-perfect relations `3 dbar - mbar = pbar + qbar` and
/// `dbar^2 - mbar^2 = pbar qbar - 1`, and the matrix identity
/// `[[17+10n, 5], [7+4n, 2]] (pbar_k, qbar_k) = (p_{k+2}, q_{k+2})` tying the
/// companion centers to the staircase centers two steps later.
pub fn matrix_relation_check(n: u32, kmax: usize) -> Result<bool> {
    let f = make_family(n)?;
    let steps = generate_steps(&f, kmax + 2)?;
    let ni = n as i128;
    let t = 5 + 2 * ni;
    let (mut p0, mut q0) = (2 * ni + 6, 1i128);
    let (mut p1, mut q1) = ((2 * ni + 7) * (2 * ni + 4) + 1, 2 * ni + 4);
    for k in 0..=kmax {
        let (pb, qb) = if k == 0 { (p0, q0) } else { (p1, q1) };
        let (num_d, num_m) = ((2 + ni) * pb + (3 + ni) * qb, (1 + ni) * pb + (4 + ni) * qb);
        if num_d % t != 0 || num_m % t != 0 {
            return Ok(false);
        }
        let (db, mb) = (num_d / t, num_m / t);
        if 3 * db - mb != pb + qb || db * db - mb * mb != pb * qb - 1 {
            return Ok(false);
        }
        let mapped_p = (17 + 10 * ni) * pb + 5 * qb;
        let mapped_q = (7 + 4 * ni) * pb + 2 * qb;
        if mapped_p != steps[k + 2].p || mapped_q != steps[k + 2].q {
            return Ok(false);
        }
        if k > 0 {
            let (p2, q2) = (t * p1 - p0, t * q1 - q0);
            (p0, q0) = (p1, q1);
            (p1, q1) = (p2, q2);
        }
    }
    Ok(true)
}

/// Continued fraction of the center of step `k`: `[2]`, `[2; 2, 2n+4]`, and
/// for `k >= 2` the periodic pattern
/// `[2; 2, 2n+3, {2n+7, 2n+3}^((k-2)/2), tail]` with tail `2n+6` (even `k`)
/// or `2n+7, 2n+4` (odd `k`).
pub fn expected_center_cf(n: u32, k: usize) -> Vec<BigInt> {
    let ni = n as i64;
    let big = |x: i64| BigInt::from(x);
    match k {
        0 => vec![big(3)],
        1 => vec![big(2), big(2), big(2 * ni + 4)],
        _ => {
            let mut cf = vec![big(2), big(2), big(2 * ni + 3)];
            for _ in 0..(k - 2) / 2 {
                cf.push(big(2 * ni + 7));
                cf.push(big(2 * ni + 3));
            }
            if k % 2 == 0 {
                cf.push(big(2 * ni + 6));
            } else {
                cf.push(big(2 * ni + 7));
                cf.push(big(2 * ni + 4));
            }
            cf
        }
    }
}

/// A candidate overshadowing class that survived every elimination step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OvershadowCandidate {
    pub d: i128,
    pub c: i128,
    pub mtilde1: i128,
    pub mtilde2: i128,
    pub block_l: i128,
    pub block_k: i128,
}

/// Outcome of the bounded overshadowing-class search.
#[derive(Debug, Clone)]
pub struct OvershadowReport {
    pub n: u32,
    pub degree_bound: i128,
    pub candidates_checked: u64,
    pub survivors: Vec<OvershadowCandidate>,
}

/// Searches for a class whose obstruction line `(A + Cz)/lambda` could
/// overshadow the staircase of the `n`th family, `n >= 3`. Any such class
/// must have `A = 0` and degree at most 18, and its leading multiplicities
/// are pinned to `floor/ceil(d b_i)` blockwise; the remaining necessary
/// conditions (two linear identities tying `C` to the multiplicities, the
/// slope bound through the accumulation point, and solvability of the
/// Diophantine system for the ellipsoid part) are checked exactly. An empty
/// survivor list means no overshadowing class exists.
pub fn overshadow_search(n: u32) -> Result<OvershadowReport> {
    if n < 3 {
        return Err(Error::Invalid(
            "the degree bound for the search requires n >= 3".into(),
        ));
    }
    let f = make_family(n)?;
    let dom = limit_domain(&f)?;
    let ni = n as i128;
    let degree_bound = 18i128;
    // Slope of the line from the accumulation point to the first step's
    // peak: (5 + 2n + sqrt(sigma)) / (10 + 4n). The overshadowing line must
    // be at least this steep: C >= s0 * lambda.
    let s0 = (Surd::from_int((5 + 2 * ni) as i64)
        + Surd::new(
            rat_int(0),
            rat_int(1),
            u64::try_from(f.sigma_raw()).unwrap(),
        ))
        / Surd::from_int((10 + 4 * ni) as i64);

    let floor_ceil = |x: &Surd| -> (i128, i128) {
        let fl = x.floor().to_i128().expect("small floor");
        (fl, fl + 1)
    };

    let mut checked = 0u64;
    let mut survivors = Vec::new();
    for d in 1..=degree_bound {
        let ds = Surd::from_int(d as i64);
        let (f1, c1) = floor_ceil(&(ds.clone() * dom.cuts[0].clone()));
        let (f2, c2) = floor_ceil(&(ds.clone() * dom.cuts[1].clone()));
        let (f3, c3) = floor_ceil(&(ds.clone() * dom.cuts[2].clone()));
        let (f4, c4) = floor_ceil(&(ds * dom.beta.clone()));
        let tail = 5 + 2 * ni;
        // The tail block is constant except for at most one entry.
        let k_options = [tail * f4, tail * f4 + (c4 - f4)];
        for m1 in [f1, c1] {
            for m2 in [f2, c2] {
                // L = m3 + m4 with each factor floor or ceil of d b3.
                for l in [2 * f3, f3 + c3, 2 * c3] {
                    for k in k_options {
                        checked += 1;
                        if m1 < m2 || m2 < 0 || l < 0 || k < 0 {
                            continue;
                        }
                        // First identity (with A = 0): 3C = 2d - m1 - m2.
                        let rhs = 2 * d - m1 - m2;
                        if rhs <= 0 || rhs % 3 != 0 {
                            continue;
                        }
                        let c = rhs / 3;
                        if !(d - 2 <= 3 * c && 3 * c <= d + 2) {
                            continue;
                        }
                        // Second identity:
                        // C(11+5n) = (2+n)(m1 - m2) + (4+2n)L + K.
                        if c * (11 + 5 * ni)
                            != (2 + ni) * (m1 - m2) + (4 + 2 * ni) * l + k
                        {
                            continue;
                        }
                        // lambda = d - mtilde . b with the block structure.
                        let lambda = Surd::from_int(d as i64)
                            - Surd::from_rational(rat((m1 + m2) as i64, 2))
                            - dom.beta.clone()
                                * Surd::from_int(
                                    ((2 + ni) * (m1 - m2) + (4 + 2 * ni) * l + k) as i64,
                                );
                        if lambda.sign() <= 0 {
                            continue;
                        }
                        // Slope bound C/lambda >= s0.
                        if (Surd::from_int(c as i64) - s0.clone() * lambda.clone()).sign() < 0 {
                            continue;
                        }
                        // The full class needs an ellipsoid part m with
                        // sum(m) = 3d - 1 - sum(mtilde) and
                        // sum(m^2) = d^2 + 1 - sum(mtilde^2).
                        let sum_mt = m1 + m2 + l + k;
                        let sumsq_mt = m1 * m1
                            + m2 * m2
                            + min_block_sumsq(l, 2)
                            + min_block_sumsq(k, tail);
                        let s_rem = 3 * d - 1 - sum_mt;
                        let t_rem = d * d + 1 - sumsq_mt;
                        if s_rem < 0 || t_rem < s_rem {
                            continue;
                        }
                        // Nontriviality at the break point forces
                        // (d^2 - |mtilde|^2 + 1) Vol > lambda^2; use the
                        // least |mtilde|^2 over block splits so that no
                        // genuine candidate is discarded.
                        let head = Surd::from_int((d * d - sumsq_mt + 1) as i64)
                            * dom.vol.clone();
                        if (head - lambda.clone() * lambda).sign() <= 0 {
                            continue;
                        }
                        survivors.push(OvershadowCandidate {
                            d,
                            c,
                            mtilde1: m1,
                            mtilde2: m2,
                            block_l: l,
                            block_k: k,
                        });
                    }
                }
            }
        }
    }
    Ok(OvershadowReport {
        n,
        degree_bound,
        candidates_checked: checked,
        survivors,
    })
}

/// Least possible sum of squares of `slots` nonnegative integers adding to
/// `total` (spread as evenly as possible).
fn min_block_sumsq(total: i128, slots: i128) -> i128 {
    if slots <= 0 {
        return if total == 0 { 0 } else { i128::MAX / 4 };
    }
    let q = total / slots;
    let r = total % slots;
    r * (q + 1) * (q + 1) + (slots - r) * q * q
}

/// One convergent step of the ghost-stairs construction.
#[derive(Debug, Clone)]
pub struct GhostStep {
    pub index: usize,
    pub p: i128,
    pub q: i128,
    pub descending: bool,
    pub quasi_perfect: bool,
    pub perfect: bool,
    /// `mu` at the center, exactly.
    pub mu: Surd,
    /// `z_n / alpha` for descending steps, `1` for ascending ones; equals
    /// the capacity function there, so the obstruction is invisible.
    pub expected: Surd,
    pub flush_with_capacity: bool,
}

/// Report for the ghost stairs of `E(1, alpha)`.
#[derive(Debug, Clone)]
pub struct GhostReport {
    pub alpha: Surd,
    /// Integer part `k` with `alpha` in `(k, k+1)`.
    pub k: i128,
    /// Whether the class `(k; k-1, 1^(k-1); 1^(k+1))` realizes the line
    /// `z/alpha` on `[alpha, k+1]`, i.e. pairs with the cuts to `alpha(k-1)`.
    pub cover_class_verified: bool,
    pub steps: Vec<GhostStep>,
}

fn cf_of_surd(alpha: &Surd, count: usize) -> Result<Vec<i128>> {
    let mut cur = alpha.clone();
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let fl = cur.floor();
        let a = fl
            .to_i128()
            .ok_or_else(|| Error::Unsupported("continued fraction entry too large".into()))?;
        out.push(a);
        let frac = cur - Surd::from_rational(Rational::from(fl));
        if frac.is_zero() {
            return Err(Error::Invalid(
                "alpha must be irrational (finite continued fraction found)".into(),
            ));
        }
        cur = frac.inverse();
    }
    Ok(out)
}

/// Builds the convergent classes `E(p_n, q_n) = (p; W(p, p-q), 1; W(p, q))`
/// of an irrational `alpha > 1` for `1 <= n <= nmax` and verifies each is
/// quasi-perfect, perfect, and obstructive with `mu` exactly on the capacity
/// function (hence overshadowed): `mu = z_n/alpha` above `alpha`, `mu = 1`
/// below.
pub fn ghost_stairs(alpha: &Surd, nmax: usize) -> Result<GhostReport> {
    if alpha.is_rational() {
        return Err(Error::Invalid("alpha must be irrational".into()));
    }
    if (alpha.clone() - Surd::one()).sign() <= 0 {
        return Err(Error::Invalid("alpha must exceed one".into()));
    }
    let cf = cf_of_surd(alpha, nmax + 1)?;
    let k = cf[0];
    if k < 1 {
        return Err(Error::Invalid("alpha must exceed one".into()));
    }

    // Cuts of E(1, alpha): (alpha - 1, weight sequence of alpha - 1). For
    // alpha < 2 the remainder is below one and its weights come from the
    // scaling identity w(z) = z * w(1/z).
    let z = alpha.clone() - Surd::one();
    let weights_of = |count: usize| -> Result<Vec<Surd>> {
        if (z.clone() - Surd::one()).sign() >= 0 {
            weights::weight_entries_surd(&z, count)
        } else {
            Ok(weights::weight_entries_surd(&z.inverse(), count)?
                .into_iter()
                .map(|w| w * z.clone())
                .collect())
        }
    };
    let need = 64usize;
    let mut cuts = vec![z.clone()];
    cuts.extend(weights_of(need)?);

    // Cover class (k; k-1, 1^(k-1); 1^(k+1)): pairing with the cuts must be
    // alpha (k-1) so that its obstruction line is exactly z/alpha.
    let mut cover_mt = vec![k - 1];
    cover_mt.extend(std::iter::repeat(1).take((k - 1) as usize));
    let cover_dot = mtilde_dot_cuts(&cover_mt, &cuts)?;
    let cover_class_verified =
        cover_dot == alpha.clone() * Surd::from_int((k - 1) as i64);

    let mut steps = Vec::new();
    let (mut pm1, mut qm1) = (BigInt::from(1), BigInt::zero());
    let (mut p0, mut q0) = (BigInt::from(cf[0]), BigInt::from(1));
    for (idx, a) in cf.iter().enumerate().skip(1) {
        let p = BigInt::from(*a) * &p0 + &pm1;
        let q = BigInt::from(*a) * &q0 + &qm1;
        (pm1, qm1) = (p0.clone(), q0.clone());
        (p0, q0) = (p.clone(), q.clone());

        let pi = p
            .to_i128()
            .ok_or_else(|| Error::Unsupported("convergent too large".into()))?;
        let qi = q
            .to_i128()
            .ok_or_else(|| Error::Unsupported("convergent too large".into()))?;
        let mut mtilde: Vec<i128> = weights::integral_weights(&p, &(p.clone() - &q))?
            .into_iter()
            .map(|x| x.to_i128().unwrap())
            .collect();
        mtilde.push(1);
        let m: Vec<i128> = weights::integral_weights(&p, &q)?
            .into_iter()
            .map(|x| x.to_i128().unwrap())
            .collect();
        let class = ObstructionClass::new(pi, mtilde.clone(), m)?;
        let quasi_perfect = class.satisfies_diophantine();
        let perfect = cremona::is_exceptional(&ClassVector::from_class(&class))?.0;

        if mtilde.len() + 1 > cuts.len() {
            let extra = mtilde.len() + 8;
            cuts = vec![z.clone()];
            cuts.extend(weights_of(extra)?);
        }
        let dot = mtilde_dot_cuts(&mtilde, &cuts)?;
        let lambda = alpha.clone() * Surd::from_int(pi as i64) - dot;
        if lambda.sign() <= 0 {
            return Err(Error::Invalid("nonpositive pairing for convergent".into()));
        }
        let mu = Surd::from_int(pi as i64) / lambda;

        let descending = idx % 2 == 1;
        let expected = if descending {
            Surd::from_rational(rat(pi as i64, qi as i64)) / alpha.clone()
        } else {
            Surd::one()
        };
        let flush = mu == expected;
        steps.push(GhostStep {
            index: idx,
            p: pi,
            q: qi,
            descending,
            quasi_perfect,
            perfect,
            mu,
            expected,
            flush_with_capacity: flush,
        });
    }
    Ok(GhostReport {
        alpha: alpha.clone(),
        k,
        cover_class_verified,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::cmp::Ordering;

    #[test]
    fn family_seeds() {
        let f = make_family(0).unwrap();
        assert_eq!(f.t, 5);
        assert_eq!(f.sigma_raw(), 21);
        assert_eq!(f.e1.d, 22);
        assert_eq!(f.e1.mtilde, vec![13, 9, 4, 4, 1, 1, 1, 1, 1]);
        let f3 = make_family(3).unwrap();
        assert_eq!(f3.t, 11);
        assert_eq!(f3.sigma_raw(), 117);
    }

    #[test]
    fn second_step_values() {
        let f = make_family(0).unwrap();
        let steps = generate_steps(&f, 2).unwrap();
        let e2 = &steps[2];
        assert_eq!((e2.d, e2.p, e2.q), (108, 107, 44));
        assert_eq!(e2.mtilde, vec![64, 44, 20, 20, 5, 5, 5, 5, 5]);
        assert!(e2.satisfies_relations());
    }

    #[test]
    fn center_continued_fractions() {
        for n in [0u32, 1, 3] {
            let f = make_family(n).unwrap();
            let steps = generate_steps(&f, 6).unwrap();
            for (k, step) in steps.iter().enumerate() {
                let cf = weights::cf_of(&BigInt::from(step.p), &BigInt::from(step.q))
                    .unwrap()
                    .entries()
                    .to_vec();
                assert_eq!(cf, expected_center_cf(n, k), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn closed_form_reproduces_sequences() {
        // Lucas-type start: x0 = 2, x1 = t gives X = 1.
        let cf = closed_form(2, 5, 5).unwrap();
        assert_eq!(cf.x, Surd::one());
        assert_eq!(cf.eval(2), rat_int(23));
        // lambda * conj(lambda) = 1.
        assert_eq!(cf.lambda.clone() * cf.lambda.conj(), Surd::one());

        // Degree sequence of the n = 0 family.
        let cf = closed_form(2, 22, 5).unwrap();
        assert_eq!(cf.eval(0), rat_int(2));
        assert_eq!(cf.eval(1), rat_int(22));
        assert_eq!(cf.eval(2), rat_int(108));
        let f = make_family(0).unwrap();
        let steps = generate_steps(&f, 12).unwrap();
        for (k, step) in steps.iter().enumerate() {
            assert_eq!(cf.eval(k as u32), rat_int(step.d as i64));
        }
    }

    #[test]
    fn limit_domain_identities() {
        for n in 0..=5 {
            let f = make_family(n).unwrap();
            let dom = limit_domain(&f).unwrap();
            assert_eq!(dom.cuts.len(), 9 + 2 * n as usize);
            // The identities themselves are verified inside limit_domain;
            // spot-check the n = 0 values numerically.
            if n == 0 {
                assert!((dom.beta.to_f64() - 1.0 / (17.0 + 21f64.sqrt())).abs() < 1e-12);
                let z = dom.z_inf.to_f64();
                let expect = (29.0 + 3.0 * 21f64.sqrt()) / (13.0 + 21f64.sqrt());
                assert!((z - expect).abs() < 1e-12);
            }
        }
        // Entries tend to (3/5, 2/5, 1/5, 1/5, 0...).
        let f = make_family(60).unwrap();
        let dom = limit_domain(&f).unwrap();
        let vals: Vec<f64> = dom.cuts.iter().take(5).map(Surd::to_f64).collect();
        for (v, target) in vals.iter().zip([0.6, 0.4, 0.2, 0.2, 0.0]) {
            assert!((v - target).abs() < 0.01);
        }
    }

    #[test]
    fn perfectness_small() {
        let f = make_family(0).unwrap();
        assert!(verify_perfect(&f, 3).unwrap());
    }

    #[test]
    fn obstructiveness_small() {
        for n in [0u32, 1] {
            let f = make_family(n).unwrap();
            assert!(verify_obstructive(&f, 6).unwrap(), "n={n}");
        }
    }

    #[test]
    fn obstruction_gap_shrinks_monotonically() {
        // The squared volume bound at the centers approaches the obstruction
        // from below: Vol - (lambda_k)^2 / (p_k q_k) decreases to zero, i.e.
        // the right-hand side of the obstruction inequality increases in k.
        let f = make_family(0).unwrap();
        let dom = limit_domain(&f).unwrap();
        let steps = generate_steps(&f, 8).unwrap();
        let mut prev: Option<Surd> = None;
        for step in &steps {
            let lambda = Surd::from_int(step.d as i64)
                - mtilde_dot_cuts(&step.mtilde, &dom.cuts).unwrap();
            let rhs = lambda.clone() * lambda
                / Surd::from_int((step.p * step.q) as i64);
            assert!((dom.vol.clone() - rhs.clone()).sign() > 0);
            if let Some(p) = prev {
                assert_eq!(
                    rhs.partial_cmp(&p),
                    Some(Ordering::Greater),
                    "rhs must increase"
                );
            }
            prev = Some(rhs);
        }
    }

    #[test]
    fn matrix_relations_hold() {
        for n in 0..=3 {
            assert!(matrix_relation_check(n, 8).unwrap(), "n={n}");
        }
    }

    #[test]
    fn overshadow_search_is_empty() {
        let report = overshadow_search(3).unwrap();
        assert!(report.candidates_checked > 0);
        assert!(
            report.survivors.is_empty(),
            "unexpected survivors: {:?}",
            report.survivors
        );
    }

    #[test]
    fn ghost_stairs_silver_ratio() {
        // alpha = 1 + sqrt(2), continued fraction [2; 2, 2, ...].
        let alpha = Surd::new(rat_int(1), rat_int(1), 2);
        let report = ghost_stairs(&alpha, 6).unwrap();
        assert_eq!(report.k, 2);
        assert!(report.cover_class_verified);
        assert_eq!(report.steps.len(), 6);
        for step in &report.steps {
            assert!(step.quasi_perfect, "n={}", step.index);
            assert!(step.perfect, "n={}", step.index);
            assert!(step.flush_with_capacity, "n={}", step.index);
        }
        // First descending convergent 5/2: mu = (5/2)/alpha.
        let s1 = &report.steps[0];
        assert_eq!((s1.p, s1.q, s1.descending), (5, 2, true));
        assert_eq!(s1.mu, Surd::from_rational(rat(5, 2)) / alpha.clone());
        // First ascending convergent 12/5: mu = 1.
        let s2 = &report.steps[1];
        assert_eq!((s2.p, s2.q, s2.descending), (12, 5, false));
        assert_eq!(s2.mu, Surd::one());
    }

    #[test]
    fn ghost_stairs_rejects_rationals() {
        assert!(ghost_stairs(&Surd::from_rational(rat(5, 2)), 3).is_err());
        // Golden-ratio-like value below the valid range.
        let small = Surd::new(rat(1, 2), rat(1, 2), 2); // (1+sqrt 2)/2 > 1, fine
        assert!(ghost_stairs(&small, 2).is_ok());
    }
}
