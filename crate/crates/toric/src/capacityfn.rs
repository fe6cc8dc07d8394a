//! Certified lower bounds for ellipsoid embedding functions.
//!
//! For a target domain with weight tuple `(b; b_1, ..., b_n)` the embedding
//! function `c(z)` records the smallest dilate of the target admitting a
//! symplectic embedding of the ellipsoid `E(1, z)`. Three exact lower bounds
//! are computed and combined:
//!
//! * the volume bound `sqrt(z / Vol)`,
//! * ratios `c_k(E(1, z)) / c_k(target)` of ECH capacities,
//! * obstruction functions `mu(z)` of Diophantine classes.
//!
//! Everything is reported as a certified lower bound: exact values of `c(z)`
//! generally need unbounded data, so no claim of sharpness is made. Corner
//! points of the max bound are reconstructed exactly from the class
//! obstructions (each `mu` is piecewise linear with its nonsmooth point at
//! the class center), never by numerical differentiation.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;

use crate::classes::{self, ObstructionClass};
use crate::domains::WeightTuple;
use crate::ech;
use crate::exactnum::{cmp_rational_vs_sqrt, rat_int, Rational, Surd};
use crate::weights;
use crate::{Error, Result};

/// `max over 1 <= k <= kmax of c_k(E(1, z)) / c_k(target)`: a lower bound
/// for the embedding function at `z`, monotone nondecreasing in `kmax`.
pub fn ech_lower(target: &WeightTuple, z: &Rational, kmax: u64) -> Result<Rational> {
    if z < &rat_int(1) {
        return Err(Error::Invalid("ellipsoid parameter must be >= 1".into()));
    }
    if kmax == 0 {
        return Err(Error::Invalid("need at least one capacity".into()));
    }
    let one = rat_int(1);
    let ell = ech::ellipsoid_capacities(&one, z, kmax);
    let tgt = ech::convex_capacities(target, kmax)?;
    let mut best: Option<Rational> = None;
    for k in 1..=kmax as usize {
        if !tgt[k].is_positive() {
            return Err(Error::Invalid("target capacities must be positive".into()));
        }
        let ratio = &ell[k] / &tgt[k];
        if best.as_ref().map_or(true, |b| &ratio > b) {
            best = Some(ratio);
        }
    }
    Ok(best.expect("kmax >= 1"))
}

/// `m . w(z)` against precomputed weight entries of `z` (truncating or
/// zero-padding to the length of `m`).
fn pairing(m: &[i128], entries: &[Rational]) -> Rational {
    m.iter()
        .zip(entries.iter())
        .map(|(mi, wi)| Rational::from(BigInt::from(*mi)) * wi)
        .sum()
}

/// Keeps the classes that actually bound something for this target: the
/// pairing `d b - mtilde . cuts` must be positive and `mtilde` must not be
/// longer than the cut vector.
fn applicable<'a>(
    target: &WeightTuple,
    set: &'a [ObstructionClass],
) -> Vec<(&'a ObstructionClass, Rational)> {
    set.iter()
        .filter_map(|c| c.lambda(target).ok().map(|l| (c, l)))
        .collect()
}

/// Max of the volume bound `sqrt(z / Vol)` and the class obstructions
/// `mu(z)` over the supplied set. Classes pairing nonpositively with the
/// target contribute nothing. Monotone in the class set.
pub fn class_lower(
    target: &WeightTuple,
    z: &Rational,
    set: &[ObstructionClass],
) -> Result<Surd> {
    let target = target.sorted();
    let vol = target.volume();
    if !vol.is_positive() {
        return Err(Error::Invalid("target must have positive volume".into()));
    }
    if z < &rat_int(1) {
        return Err(Error::Invalid("ellipsoid parameter must be >= 1".into()));
    }
    let entries = weights::weight_expansion(z.numer(), z.denom())?.entries();
    let mut best_mu: Option<Rational> = None;
    for (class, lambda) in applicable(&target, set) {
        let mu = pairing(&class.m, &entries) / lambda;
        if best_mu.as_ref().map_or(true, |b| &mu > b) {
            best_mu = Some(mu);
        }
    }
    let radicand = z / vol;
    match best_mu {
        Some(mu) if cmp_rational_vs_sqrt(&mu, &radicand) == Ordering::Greater => {
            Ok(Surd::from_rational(mu))
        }
        _ => Surd::sqrt_rational(&radicand),
    }
}

/// Recovers the center `p/q` of a class whose weight multiplicities are
/// exactly the integral weight expansion `W(p, q)`: the first entry is `q`
/// and the entries sum to `p + q - 1`. At the center the obstruction `mu`
/// has its unique nonsmooth point.
fn class_center(class: &ObstructionClass) -> Option<Rational> {
    let q = *class.m.first()?;
    let sum: i128 = class.m.iter().sum();
    let p = sum - q + 1;
    if q < 1 || p < q {
        return None;
    }
    let (pb, qb) = (BigInt::from(p), BigInt::from(q));
    if pb.gcd(&qb) != BigInt::one() {
        return None;
    }
    let w = weights::integral_weights(&pb, &qb).ok()?;
    let m_big: Vec<BigInt> = class.m.iter().map(|&x| BigInt::from(x)).collect();
    (w == m_big).then(|| Rational::new(pb, qb))
}

/// One grid point of a scan: the three exact lower bounds and their max.
#[derive(Debug, Clone)]
pub struct EmbedFnSample {
    pub z: Rational,
    /// Best ECH capacity ratio with index up to the scan's `kmax`.
    pub ech_lower: Rational,
    /// Best class obstruction `mu(z)`; zero when no class applies.
    pub class_lower: Rational,
    /// Volume bound `sqrt(z / Vol)`.
    pub volume_bound: Surd,
    /// Max of the three bounds.
    pub best: Surd,
    /// Whether `z` is a detected corner of the piecewise-linear class bound.
    pub at_corner: bool,
}

/// Result of scanning a grid: per-point bounds plus the exactly
/// reconstructed corner points inside the grid's range.
#[derive(Debug, Clone)]
pub struct ScanResult {
    pub samples: Vec<EmbedFnSample>,
    /// Centers of classes that are obstructive and attain the max class
    /// bound at their own center, sorted increasing.
    pub corners: Vec<Rational>,
    /// Accumulation point of the target, when `Per^2 >= 4 Vol`.
    pub a0: Option<Surd>,
    /// Whether some degree `d <= dmax` certifies the absence of an infinite
    /// staircase via `d^2 <= Vol` and `Per < d + Vol / d`.
    pub degree_certificate: bool,
}

/// Whether any degree up to `dmax` certifies "no infinite staircase".
pub fn degree_certificate(target: &WeightTuple, dmax: i128) -> Result<bool> {
    for d in 1..=dmax.max(0) {
        if classes::no_staircase_by_degree(target, d)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Scans a finite grid of rational parameters, combining the ECH, class and
/// volume bounds at every point and reconstructing the corners of the class
/// bound exactly. Classes are enumerated up to degree `dmax`.
pub fn scan(
    target: &WeightTuple,
    grid: &[Rational],
    kmax: u64,
    dmax: i128,
) -> Result<ScanResult> {
    let target = target.sorted();
    let vol = target.volume();
    if !vol.is_positive() {
        return Err(Error::Invalid("target must have positive volume".into()));
    }
    if grid.is_empty() {
        return Err(Error::Invalid("grid must be nonempty".into()));
    }
    if grid.iter().any(|z| z < &rat_int(1)) {
        return Err(Error::Invalid("grid points must be >= 1".into()));
    }
    let all = classes::enumerate_classes(&target, dmax)?;
    let kept = applicable(&target, &all);
    let tgt_caps = ech::convex_capacities(&target, kmax)?;
    let one = rat_int(1);

    // Corner candidates: class centers inside the grid's range. A corner is
    // confirmed when the centered class is obstructive there and attains the
    // max class bound among the enumerated set.
    let zmin = grid.iter().min().expect("nonempty");
    let zmax = grid.iter().max().expect("nonempty");
    let mut corners: Vec<Rational> = Vec::new();
    for (class, lambda) in &kept {
        let Some(center) = class_center(class) else {
            continue;
        };
        if &center < zmin || &center > zmax || corners.contains(&center) {
            continue;
        }
        let entries = weights::weight_expansion(center.numer(), center.denom())?.entries();
        let own = pairing(&class.m, &entries) / lambda;
        let is_max = kept
            .iter()
            .all(|(other, l)| pairing(&other.m, &entries) / l <= own);
        if is_max && cmp_rational_vs_sqrt(&own, &(&center / &vol)) == Ordering::Greater {
            corners.push(center);
        }
    }
    corners.sort();

    let mut samples = Vec::with_capacity(grid.len());
    for z in grid {
        let ell = ech::ellipsoid_capacities(&one, z, kmax);
        let mut ech_best = Rational::zero();
        for k in 1..=kmax as usize {
            let ratio = &ell[k] / &tgt_caps[k];
            if ratio > ech_best {
                ech_best = ratio;
            }
        }
        let entries = weights::weight_expansion(z.numer(), z.denom())?.entries();
        let mut class_best = Rational::zero();
        for (class, lambda) in &kept {
            let mu = pairing(&class.m, &entries) / lambda;
            if mu > class_best {
                class_best = mu;
            }
        }
        let radicand = z / &vol;
        let rational_best = ech_best.clone().max(class_best.clone());
        let volume_bound = Surd::sqrt_rational(&radicand)?;
        let best = if cmp_rational_vs_sqrt(&rational_best, &radicand) == Ordering::Greater {
            Surd::from_rational(rational_best)
        } else {
            volume_bound.clone()
        };
        samples.push(EmbedFnSample {
            z: z.clone(),
            ech_lower: ech_best,
            class_lower: class_best,
            volume_bound,
            best,
            at_corner: corners.contains(z),
        });
    }
    Ok(ScanResult {
        samples,
        corners,
        a0: target.accumulation_point(),
        degree_certificate: degree_certificate(&target, dmax)?,
    })
}

/// Exact bounds at the accumulation point `a0` of the embedding function.
///
/// When `a0` exists the volume bound there simplifies to `(1 + a0) / Per`
/// (the defining quadratic of `a0` makes the two expressions agree). If any
/// computed lower bound strictly exceeds it, the target provably has no
/// infinite staircase; if a staircase exists, `a0` must be unobstructed, so
/// every bound stays at or below the volume there. The converse — reading a
/// staircase off an unobstructed `a0` — is not claimed.
#[derive(Debug, Clone)]
pub struct AccumulationReport {
    pub a0: Option<Surd>,
    /// `sqrt(a0 / Vol) = (1 + a0) / Per`.
    pub volume_at_a0: Option<Surd>,
    /// Best class obstruction `mu(a0)` over classes of degree `<= dmax`.
    pub class_bound: Option<Surd>,
    /// Best ECH ratio `c_k(E(1, a0)) / c_k(target)` over `k <= kmax`.
    pub ech_bound: Option<Surd>,
    /// Some bound strictly exceeds the volume bound at `a0`.
    pub bound_exceeds_volume: bool,
    /// The best bound equals the volume bound at `a0` exactly.
    pub bound_equals_volume: bool,
    /// Degree criterion `d^2 <= Vol`, `Per < d + Vol / d` for some `d <= dmax`.
    pub degree_certificate: bool,
    /// Either certificate suffices to rule out an infinite staircase.
    pub no_staircase_certified: bool,
}

fn max_surd(a: Option<Surd>, b: Option<Surd>) -> Option<Surd> {
    match (a, b) {
        (Some(x), Some(y)) => Some(
            if x.partial_cmp(&y).expect("same quadratic field") == Ordering::Less {
                y
            } else {
                x
            },
        ),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Evaluates every available lower bound exactly at the accumulation point.
pub fn accumulation_report(
    target: &WeightTuple,
    kmax: u64,
    dmax: i128,
) -> Result<AccumulationReport> {
    let target = target.sorted();
    let vol = target.volume();
    if !vol.is_positive() {
        return Err(Error::Invalid("target must have positive volume".into()));
    }
    let degree = degree_certificate(&target, dmax)?;
    let Some(a0) = target.accumulation_point() else {
        return Ok(AccumulationReport {
            a0: None,
            volume_at_a0: None,
            class_bound: None,
            ech_bound: None,
            bound_exceeds_volume: false,
            bound_equals_volume: false,
            degree_certificate: degree,
            no_staircase_certified: degree,
        });
    };
    let per = target.perimeter();
    let volume_at_a0 =
        (Surd::one() + a0.clone()) / Surd::from_rational(per);
    // The quadratic for a0 gives (1 + a0)^2 = Per^2 a0 / Vol, so this really
    // is sqrt(a0 / Vol); cheap to confirm.
    let sq = volume_at_a0.clone() * volume_at_a0.clone();
    if sq != a0.clone() / Surd::from_rational(vol.clone()) {
        return Err(Error::Invalid(
            "accumulation point fails its defining quadratic".into(),
        ));
    }

    let all = classes::enumerate_classes(&target, dmax)?;
    let mut class_bound: Option<Surd> = None;
    for (class, lambda) in applicable(&target, &all) {
        let w = weights::weight_entries_surd(&a0, class.m.len())?;
        let mut acc = Surd::zero();
        for (mi, wi) in class.m.iter().zip(w.iter()) {
            acc = acc + Surd::from_rational(Rational::from(BigInt::from(*mi))) * wi.clone();
        }
        let mu = acc / Surd::from_rational(lambda);
        class_bound = max_surd(class_bound, Some(mu));
    }

    let mut ech_bound: Option<Surd> = None;
    if kmax >= 1 {
        let ell = ech::ellipsoid_capacities_surd(&Surd::one(), &a0, kmax);
        let tgt_caps = ech::convex_capacities(&target, kmax)?;
        for k in 1..=kmax as usize {
            let ratio = ell[k].clone() / Surd::from_rational(tgt_caps[k].clone());
            ech_bound = max_surd(ech_bound, Some(ratio));
        }
    }

    let best = max_surd(class_bound.clone(), ech_bound.clone());
    let cmp = best
        .as_ref()
        .map(|b| b.partial_cmp(&volume_at_a0).expect("same quadratic field"));
    let bound_exceeds_volume = cmp == Some(Ordering::Greater);
    let bound_equals_volume = cmp == Some(Ordering::Equal);
    Ok(AccumulationReport {
        a0: Some(a0),
        volume_at_a0: Some(volume_at_a0),
        class_bound,
        ech_bound,
        bound_exceeds_volume,
        bound_equals_volume,
        degree_certificate: degree,
        no_staircase_certified: degree || bound_exceeds_volume,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::parse_tuple;
    use crate::exactnum::rat;

    fn ball() -> WeightTuple {
        WeightTuple::new(rat_int(1), vec![])
    }

    #[test]
    fn ech_lower_identity_ratios() {
        assert_eq!(ech_lower(&ball(), &rat_int(1), 5).unwrap(), rat_int(1));
        let e12 = parse_tuple("2: 1, 1").unwrap();
        assert_eq!(ech_lower(&e12, &rat_int(2), 10).unwrap(), rat_int(1));
    }

    #[test]
    fn ech_lower_ball_at_two_and_monotone() {
        // c_2(E(1,2)) = 2 against c_2(B(1)) = 1 is the extreme ratio among
        // the first ten capacities, matching the known value c(2) = 2.
        assert_eq!(ech_lower(&ball(), &rat_int(2), 10).unwrap(), rat_int(2));
        let mut prev = Rational::zero();
        for k in 1..=10 {
            let v = ech_lower(&ball(), &rat_int(2), k).unwrap();
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn class_lower_defaults_to_volume() {
        let v = class_lower(&ball(), &rat_int(2), &[]).unwrap();
        assert_eq!(v, Surd::sqrt_rational(&rat_int(2)).unwrap());
    }

    #[test]
    fn class_lower_ball_classes() {
        let set = classes::enumerate_classes(&ball(), 8).unwrap();
        // On [1, 2] the first Fibonacci class gives mu(z) = z.
        let v = class_lower(&ball(), &rat(3, 2), &set).unwrap();
        assert_eq!(v, Surd::from_rational(rat(3, 2)));
        // On [4, 5] the degree-two class gives mu(z) = z / 2.
        let v = class_lower(&ball(), &rat(9, 2), &set).unwrap();
        assert_eq!(v, Surd::from_rational(rat(9, 4)));
    }

    #[test]
    fn scan_finds_fibonacci_corners() {
        let grid = vec![rat(3, 2), rat_int(2), rat_int(3), rat_int(5), rat(13, 2), rat(27, 4)];
        let res = scan(&ball(), &grid, 20, 5).unwrap();
        assert_eq!(res.corners, vec![rat_int(2), rat_int(5), rat(13, 2)]);
        let flags: Vec<bool> = res.samples.iter().map(|s| s.at_corner).collect();
        assert_eq!(flags, vec![false, true, false, true, true, false]);
        // All three corners sit below the accumulation point.
        let a0 = res.a0.as_ref().unwrap();
        for c in &res.corners {
            assert!(&Surd::from_rational(c.clone()) < a0);
        }
        // At the first corner the bound is the step value 2.
        assert_eq!(res.samples[1].best, Surd::from_int(2));
        assert!(!res.degree_certificate);
    }

    #[test]
    fn scan_past_staircase_region_is_smooth() {
        let grid = vec![rat_int(8), rat(17, 2), rat_int(9)];
        let res = scan(&ball(), &grid, 20, 5).unwrap();
        assert!(res.corners.is_empty());
        for s in &res.samples {
            assert!(!s.at_corner);
            assert_eq!(s.best, s.volume_bound);
        }
    }

    #[test]
    fn scan_without_accumulation_point() {
        // Per = 1, Vol = 1/2: the accumulation quadratic has no real root.
        let tuple = WeightTuple::new(rat_int(1), vec![rat(1, 4); 8]);
        let res = scan(&tuple, &[rat_int(1)], 5, 3).unwrap();
        assert!(res.a0.is_none());
        assert!(!res.degree_certificate);
    }

    #[test]
    fn accumulation_ball_is_unobstructed() {
        let rep = accumulation_report(&ball(), 30, 5).unwrap();
        assert_eq!(rep.a0, Some(Surd::new(rat(7, 2), rat(3, 2), 5)));
        let v = rep.volume_at_a0.clone().unwrap();
        assert_eq!(v, Surd::new(rat(3, 2), rat(1, 2), 5));
        assert!(!rep.bound_exceeds_volume);
        assert!(!rep.no_staircase_certified);
        // The degree-three class (3;; 2, 1^6) has mu(z) = (1 + z) / 3 near
        // a0, a line through the point (a0, V(a0)): the bound attains the
        // volume exactly but never exceeds it.
        assert_eq!(rep.class_bound.unwrap(), v);
        assert!(rep.bound_equals_volume);
    }

    #[test]
    fn accumulation_ellipsoid_attains_volume() {
        let e12 = parse_tuple("2: 1, 1").unwrap();
        let rep = accumulation_report(&e12, 10, 3).unwrap();
        assert_eq!(rep.a0, Some(Surd::new(rat_int(3), rat_int(2), 2)));
        // c_8(E(1, a0)) = 1 + a0 against c_8(E(1,2)) = 4 lands exactly on
        // the volume bound (1 + a0) / 4.
        assert!(rep.bound_equals_volume);
        assert!(!rep.bound_exceeds_volume);
        assert_eq!(rep.ech_bound, rep.volume_at_a0);
        assert!(!rep.no_staircase_certified);
    }

    #[test]
    fn accumulation_blunted_polydisc_certified() {
        let tuple = classes::blunted_polydisc_tuple(&rat_int(3)).unwrap();
        let rep = accumulation_report(&tuple, 5, 1).unwrap();
        assert!(rep.bound_exceeds_volume);
        assert!(rep.degree_certificate);
        assert!(rep.no_staircase_certified);
        // The degree-one class pairing only the big cut already gives
        // mu(a0) = 1 above the volume bound.
        assert!(rep.class_bound.unwrap() >= Surd::one());
        assert!(rep.volume_at_a0.unwrap() < Surd::one());
    }

    #[test]
    fn class_lower_strictly_beats_volume_on_grid() {
        let set = classes::enumerate_classes(&ball(), 8).unwrap();
        let mut strict = 0;
        for i in 0..10u64 {
            let z = rat_int(1) + Rational::new(BigInt::from(117 * 5 * i), BigInt::from(1000));
            let bound = class_lower(&ball(), &z, &set).unwrap();
            let vol_bound = Surd::sqrt_rational(&z).unwrap();
            if bound > vol_bound {
                strict += 1;
            }
        }
        // Only z = 1 (where mu = volume = 1) fails to be strict.
        assert_eq!(strict, 9);
    }
}
