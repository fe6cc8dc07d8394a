//! ECH capacity sequences and the length pairing.
//!
//! Capacities of balls and ellipsoids come from sorted multisets of lattice
//! values; capacities of a convex domain with weight tuple `(b; b_1, ...)`
//! come from the exact minimax formula
//!
//! ```text
//! c_k = min over d of  d*b - c_l(disjoint union of B(b_j)),   l = d(d+3)/2 - k,
//! ```
//!
//! evaluated with integer-scaled dynamic programming and a certified stopping
//! rule (no heuristics: the reported value is proven minimal). The module
//! also implements the length `l_Omega` of a lattice path with respect to a
//! domain, the corner decomposition identity it satisfies, a brute-force
//! lattice-polygon oracle for small capacities, and the subleading terms
//! `e_k = c_k - sqrt(2 k Vol)` with exact comparisons.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use crate::domains::{cut_decomposition, Pt, RationalPolygon, WeightTuple};
use crate::exactnum::{cmp_diff_sqrt, cmp_rational_vs_sqrt, rat_int, Rational, Surd};
use crate::{Error, Result};

/// Least `n` with `n(n+3)/2 >= k`: the multiplicity index of the `k`-th ball
/// capacity.
pub fn ball_capacity_index(k: u64) -> u64 {
    if k == 0 {
        return 0;
    }
    let disc = 9u128 + 8 * k as u128;
    let mut n = ((integer_sqrt_u128(disc) + 1) / 2).saturating_sub(1) as u64;
    while n * (n + 3) / 2 >= k && n > 0 && (n - 1) * (n + 2) / 2 >= k {
        n -= 1;
    }
    while n * (n + 3) / 2 < k {
        n += 1;
    }
    n
}

fn integer_sqrt_u128(n: u128) -> u128 {
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// `c_k(B(a))`: the `k`-th ECH capacity of a ball (`c_0 = 0`).
pub fn ball_capacity(a: &Rational, k: u64) -> Rational {
    Rational::from(BigInt::from(ball_capacity_index(k))) * a
}

/// First `kmax + 1` ECH capacities of the ellipsoid with parameters `a, b`:
/// the sorted multiset `{ i a + j b : i, j >= 0 }`.
pub fn ellipsoid_capacities(a: &Rational, b: &Rational, kmax: u64) -> Vec<Rational> {
    let mut heap: BinaryHeap<Reverse<(Rational, u64, u64)>> = BinaryHeap::new();
    heap.push(Reverse((Rational::zero(), 0, 0)));
    let mut out = Vec::with_capacity(kmax as usize + 1);
    while out.len() <= kmax as usize {
        let Reverse((v, i, j)) = heap.pop().expect("heap never empties");
        out.push(v);
        heap.push(Reverse((
            Rational::from(BigInt::from(i)) * a + Rational::from(BigInt::from(j + 1)) * b,
            i,
            j + 1,
        )));
        if j == 0 {
            heap.push(Reverse((
                Rational::from(BigInt::from(i + 1)) * a,
                i + 1,
                0,
            )));
        }
    }
    out
}

#[derive(Clone, PartialEq, Eq)]
struct SurdKey(Surd);

impl PartialOrd for SurdKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SurdKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .partial_cmp(&other.0)
            .expect("values lie in one quadratic field")
    }
}

/// Ellipsoid capacities with exact quadratic-irrational parameters (both in
/// the same field).
pub fn ellipsoid_capacities_surd(a: &Surd, b: &Surd, kmax: u64) -> Vec<Surd> {
    let mut heap: BinaryHeap<Reverse<(SurdKey, u64, u64)>> = BinaryHeap::new();
    heap.push(Reverse((SurdKey(Surd::zero()), 0, 0)));
    let mut out = Vec::with_capacity(kmax as usize + 1);
    let scale = |m: u64, x: &Surd| Surd::from_rational(rat_int(m as i64)) * x.clone();
    while out.len() <= kmax as usize {
        let Reverse((SurdKey(v), i, j)) = heap.pop().expect("heap never empties");
        out.push(v);
        heap.push(Reverse((
            SurdKey(scale(i, a) + scale(j + 1, b)),
            i,
            j + 1,
        )));
        if j == 0 {
            heap.push(Reverse((SurdKey(scale(i + 1, a)), i + 1, 0)));
        }
    }
    out
}

/// Capacities of a disjoint union, by exact max-plus convolution of the
/// component capacity sequences: `c_k = max over k_1 + ... + k_m = k` of the
/// sum of component capacities.
pub fn disjoint_union_capacities(seqs: &[Vec<Rational>], kmax: u64) -> Vec<Rational> {
    let n = kmax as usize + 1;
    let mut acc: Vec<Rational> = vec![Rational::zero(); n];
    for seq in seqs {
        let mut next = vec![Rational::zero(); n];
        for (k, slot) in next.iter_mut().enumerate() {
            let mut best: Option<Rational> = None;
            for j in 0..=k.min(seq.len() - 1) {
                let v = &seq[j] + &acc[k - j];
                if best.as_ref().map_or(true, |b| &v > b) {
                    best = Some(v);
                }
            }
            *slot = best.expect("sequence covers index 0");
        }
        acc = next;
    }
    acc
}

/// Index budget needed to realize multiplicity `n` on one ball: the smallest
/// `k` with `ball_capacity_index(k) = n`.
fn ball_index_cost(n: i128) -> i128 {
    if n == 0 {
        0
    } else {
        (n - 1) * (n + 2) / 2 + 1
    }
}

/// Capacities of a disjoint union of balls with integer-scaled sizes, as a
/// dynamic program: `g[l] = max { sum n_j beta_j : sum cost(n_j) <= l }`.
fn ball_union_capacities_scaled(betas: &[i128], lmax: usize) -> Vec<i128> {
    let mut g = vec![0i128; lmax + 1];
    for &beta in betas {
        let mut next = vec![0i128; lmax + 1];
        for l in 0..=lmax {
            let mut best = g[l]; // n = 0
            let mut n: i128 = 1;
            while ball_index_cost(n) <= l as i128 {
                let rest = g[l - ball_index_cost(n) as usize];
                let v = rest + n * beta;
                if v > best {
                    best = v;
                }
                n += 1;
            }
            next[l] = best;
        }
        g = next;
    }
    g
}

/// Capacities of a disjoint union of balls with rational sizes (fast path,
/// equal to [`disjoint_union_capacities`] on ball sequences).
pub fn ball_union_capacities(weights: &[Rational], kmax: u64) -> Result<Vec<Rational>> {
    let (denom, betas) = scale_to_integers(weights)?;
    let g = ball_union_capacities_scaled(&betas, kmax as usize);
    Ok(g.into_iter()
        .map(|v| Rational::new(BigInt::from(v), denom.clone()))
        .collect())
}

fn scale_to_integers(values: &[Rational]) -> Result<(BigInt, Vec<i128>)> {
    let mut denom = BigInt::one();
    for v in values {
        denom = num_integer::lcm(denom, v.denom().clone());
    }
    let scaled = values
        .iter()
        .map(|v| {
            (v * Rational::from(denom.clone()))
                .to_integer()
                .to_i128()
                .ok_or_else(|| Error::Unsupported("scaled weight exceeds i128".into()))
        })
        .collect::<Result<Vec<i128>>>()?;
    Ok((denom, scaled))
}

/// `k`-th ECH capacity of the convex domain with the given weight tuple.
/// Exact: the search over the head multiplicity `d` stops only once the
/// remaining candidates are provably no smaller than the minimum found.
pub fn convex_capacity(tuple: &WeightTuple, k: u64) -> Result<Rational> {
    Ok(convex_capacities(tuple, k)?.pop().expect("k-th entry"))
}

/// Capacities `c_0 ..= c_kmax` of a convex domain.
pub fn convex_capacities(tuple: &WeightTuple, kmax: u64) -> Result<Vec<Rational>> {
    tuple.validate()?;
    if !tuple.volume().is_positive() {
        return Err(Error::Invalid("tuple must have positive volume".into()));
    }
    let mut all = Vec::with_capacity(tuple.cuts.len() + 1);
    all.push(tuple.head.clone());
    all.extend(tuple.cuts.iter().cloned());
    let (denom, scaled) = scale_to_integers(&all)?;
    let b = scaled[0];
    let betas = &scaled[1..];
    let sumsq: i128 = betas.iter().map(|&x| x * x).sum();

    // Shared DP table for the ball-union capacities, grown on demand.
    let mut g: Vec<i128> = ball_union_capacities_scaled(betas, 16);
    let ensure = |g: &mut Vec<i128>, lmax: usize| -> Result<()> {
        if g.len() <= lmax {
            if lmax > 50_000_000 {
                return Err(Error::Unsupported(
                    "capacity search exceeded the table budget".into(),
                ));
            }
            *g = ball_union_capacities_scaled(betas, lmax * 2);
        }
        Ok(())
    };

    let mut out = Vec::with_capacity(kmax as usize + 1);
    for k in 0..=kmax {
        let mut d = ball_capacity_index(k) as i128;
        let mut best: Option<i128> = None;
        loop {
            if let Some(bv) = best {
                // All later candidates are at least d*b - (d + 3/2) * sqrt(sumsq),
                // which is nondecreasing in d; stop once that clears the best.
                let margin = d * b - bv;
                if margin >= 0 && 4 * margin * margin >= sumsq * (2 * d + 3) * (2 * d + 3) {
                    break;
                }
            }
            let l = (d * (d + 3) / 2 - k as i128) as usize;
            ensure(&mut g, l)?;
            let candidate = d * b - g[l];
            if best.map_or(true, |bv| candidate < bv) {
                best = Some(candidate);
            }
            d += 1;
        }
        out.push(Rational::new(
            BigInt::from(best.expect("at least one candidate")),
            denom.clone(),
        ));
    }
    Ok(out)
}

/// Length of one oriented edge with respect to a convex domain: the cross
/// product `p x e` at the boundary point whose (counterclockwise) tangent
/// points along `e`, i.e. the support value `max over p in Omega` of
/// `p_x e_y - p_y e_x`.
fn edge_length_convex(omega_vertices: &[Pt], e: &Pt) -> Rational {
    omega_vertices
        .iter()
        .map(|p| &p.0 * &e.1 - &p.1 * &e.0)
        .max()
        .expect("domain has vertices")
}

/// Length `l_Omega(Lambda)` of a counterclockwise lattice path (given as a
/// polygon) with respect to a convex domain.
pub fn omega_length(omega: &RationalPolygon, path: &RationalPolygon) -> Rational {
    let vs = omega.vertices();
    path.edges()
        .iter()
        .map(|e| edge_length_convex(vs, e))
        .sum()
}

/// Length of a concave path (edge list, oriented from the y-axis down-right
/// to the x-axis) with respect to a concave corner region given by its arc.
/// For each edge the relevant boundary point minimizes `e x p` over the arc.
/// An empty region acts as the corner point, contributing zero.
pub fn concave_length(region_arc: &[Pt], path_edges: &[Pt]) -> Rational {
    let origin = [(Rational::zero(), Rational::zero())];
    let pts: &[Pt] = if region_arc.is_empty() {
        &origin
    } else {
        region_arc
    };
    path_edges
        .iter()
        .map(|e| {
            pts.iter()
                .map(|p| &e.0 * &p.1 - &e.1 * &p.0)
                .min()
                .expect("arc has points")
        })
        .sum()
}

fn arc_edges(arc: &[Pt]) -> Vec<Pt> {
    arc.windows(2)
        .map(|w| (&w[1].0 - &w[0].0, &w[1].1 - &w[0].1))
        .collect()
}

/// Corner decomposition of the path length: writes `l_Omega(boundary of P)`
/// as `b * b' - sum l_{Omega_i'}(Lambda_i')`, where the primed objects are
/// the standardized corner regions of `Omega` and `P` respectively. Equal to
/// [`omega_length`]; exposed separately so the identity can be checked.
pub fn omega_length_by_corners(
    omega: &RationalPolygon,
    path: &RationalPolygon,
) -> Result<Rational> {
    let dom = cut_decomposition(omega)?;
    let pat = cut_decomposition(path)?;
    let mut total = &dom.head * &pat.head;
    for i in 0..3 {
        total -= concave_length(dom.regions[i].arc(), &arc_edges(pat.regions[i].arc()));
    }
    Ok(total)
}

/// Brute-force capacity oracle: minimizes `l_Omega(Lambda)` over all closed
/// convex lattice polygons (including segments) enclosing exactly `k + 1`
/// lattice points. Complete: an inscribed square of radius `r` certifies
/// `l_Omega(Lambda) >= r * |Lambda|_1`, so the search over edge multisets in
/// angular order is provably exhaustive within a finite length budget.
pub fn lattice_capacity_oracle(poly: &RationalPolygon, k: u64) -> Result<Rational> {
    if k == 0 {
        return Ok(Rational::zero());
    }
    let poly = poly.translated_to_axes();
    let tuple = cut_decomposition(&poly)?.tuple();
    let upper = convex_capacity(&tuple, k)?;
    let r = inscribed_square_radius(&poly)?;
    let budget = (&upper / &r)
        .ceil()
        .to_integer()
        .to_i64()
        .ok_or_else(|| Error::Unsupported("oracle budget out of range".into()))?;

    // Primitive directions within the budget, sorted by angle from (1, 0)
    // counterclockwise: a convex polygon traverses its edges in this order,
    // so every polygon is generated exactly once (started at the vertex
    // where the angular sweep begins).
    let mut dirs: Vec<(i64, i64)> = Vec::new();
    for x in -budget..=budget {
        for y in -budget..=budget {
            if (x, y) != (0, 0) && x.abs() + y.abs() <= budget && num_integer::gcd(x, y) == 1 {
                dirs.push((x, y));
            }
        }
    }
    dirs.sort_by(|a, b| {
        angle_half(*a)
            .cmp(&angle_half(*b))
            .then_with(|| (b.0 * a.1 - b.1 * a.0).cmp(&0))
    });

    let vs = poly.vertices();
    let edge_lengths: Vec<Rational> = dirs
        .iter()
        .map(|d| edge_length_convex(vs, &(rat_int(d.0), rat_int(d.1))))
        .collect();

    struct Search<'a> {
        dirs: &'a [(i64, i64)],
        edge_lengths: &'a [Rational],
        r: &'a Rational,
        target_acc: i64, // 2 * area + boundary points = 2k at closure (Pick)
        best: Option<Rational>,
        // Best length seen per (direction index, position, Pick accumulator).
        memo: std::collections::HashMap<(usize, i64, i64, i64), Rational>,
    }
    impl Search<'_> {
        fn walk(&mut self, idx: usize, pos: (i64, i64), acc: i64, length: Rational) {
            if let Some(b) = &self.best {
                // Any continuation must walk |pos|_1 back to the origin.
                let floor =
                    &length + self.r * Rational::from(BigInt::from(pos.0.abs() + pos.1.abs()));
                if &floor >= b {
                    return;
                }
            }
            if pos == (0, 0) && acc == self.target_acc && !length.is_zero() {
                self.best = Some(length.clone());
            }
            if idx == self.dirs.len() || acc >= self.target_acc {
                return;
            }
            if let Some(seen) = self.memo.get(&(idx, pos.0, pos.1, acc)) {
                if seen <= &length {
                    return;
                }
            }
            self.memo
                .insert((idx, pos.0, pos.1, acc), length.clone());
            self.walk(idx + 1, pos, acc, length.clone());
            let d = self.dirs[idx];
            let unit_len = &self.edge_lengths[idx];
            let mut m = 1i64;
            let mut cur = length;
            loop {
                cur = &cur + unit_len;
                let npos = (pos.0 + m * d.0, pos.1 + m * d.1);
                // Pick accumulator: fan area from the origin plus boundary
                // count; nonnegative for convex paths started at a vertex.
                let nacc = acc + m * (pos.0 * d.1 - pos.1 * d.0) + m;
                if nacc > self.target_acc {
                    break;
                }
                if let Some(b) = &self.best {
                    let floor = &cur
                        + self.r * Rational::from(BigInt::from(npos.0.abs() + npos.1.abs()));
                    if &floor >= b {
                        break;
                    }
                }
                self.walk(idx + 1, npos, nacc, cur.clone());
                m += 1;
            }
        }
    }
    let mut search = Search {
        dirs: &dirs,
        edge_lengths: &edge_lengths,
        r: &r,
        target_acc: 2 * k as i64,
        best: None,
        memo: std::collections::HashMap::new(),
    };
    // Seed the pruning bound just above the expected value so an exact
    // minimizer is still found (and the search remains an independent check).
    search.best = Some(&upper + Rational::one());
    search.walk(0, (0, 0), 0, Rational::zero());
    let found = search.best.expect("seeded");
    if found > upper {
        return Err(Error::Invalid(
            "no lattice polygon attains the capacity bound".into(),
        ));
    }
    Ok(found)
}

fn angle_half(e: (i64, i64)) -> i64 {
    // Half-plane split for angular sorting starting at direction (1, 0).
    if e.1 > 0 || (e.1 == 0 && e.0 > 0) {
        0
    } else {
        1
    }
}

/// Radius of the largest axis-aligned square centered at the vertex centroid
/// that fits inside the polygon. Positive for full-dimensional polygons.
fn inscribed_square_radius(poly: &RationalPolygon) -> Result<Rational> {
    let vs = poly.vertices();
    let n = vs.len();
    let cnt = Rational::from(BigInt::from(n as i64));
    let cx = vs.iter().map(|p| p.0.clone()).sum::<Rational>() / &cnt;
    let cy = vs.iter().map(|p| p.1.clone()).sum::<Rational>() / &cnt;
    let mut r: Option<Rational> = None;
    for i in 0..n {
        let a = &vs[i];
        let b = &vs[(i + 1) % n];
        let (ex, ey) = (&b.0 - &a.0, &b.1 - &a.1);
        // Outward normal (ey, -ex) for counterclockwise order.
        let slack = &ey * (&a.0 - &cx) - &ex * (&a.1 - &cy);
        let scale = rational_abs(&ey) + rational_abs(&ex);
        let cand = slack / scale;
        if r.as_ref().map_or(true, |cur| &cand < cur) {
            r = Some(cand);
        }
    }
    let r = r.expect("polygon has edges");
    if !r.is_positive() {
        return Err(Error::Invalid("polygon has no interior".into()));
    }
    Ok(r)
}

fn rational_abs(x: &Rational) -> Rational {
    if x.is_negative() {
        -x.clone()
    } else {
        x.clone()
    }
}

/// One subleading term `e_k = c_k - sqrt(2 k Vol)`, kept exact as the pair
/// `(c_k, 2 k Vol)` so that comparisons never round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubleadingTerm {
    pub k: u64,
    pub capacity: Rational,
    pub radicand: Rational,
}

impl SubleadingTerm {
    pub fn new(k: u64, capacity: Rational, vol: &Rational) -> SubleadingTerm {
        let radicand = Rational::from(BigInt::from(2 * k)) * vol;
        SubleadingTerm {
            k,
            capacity,
            radicand,
        }
    }

    /// Exact comparison of two terms' values.
    pub fn cmp_term(&self, other: &SubleadingTerm) -> Ordering {
        cmp_diff_sqrt(
            &self.capacity,
            &self.radicand,
            &other.capacity,
            &other.radicand,
        )
    }

    /// Exact comparison of this term's value against a rational.
    pub fn cmp_rational(&self, x: &Rational) -> Ordering {
        // c - sqrt(r) vs x  <=>  c - x vs sqrt(r)
        cmp_rational_vs_sqrt(&(&self.capacity - x), &self.radicand)
    }

    /// Display-only numeric value.
    pub fn to_f64(&self) -> f64 {
        crate::exactnum::rational_to_f64(&self.capacity)
            - crate::exactnum::rational_to_f64(&self.radicand).sqrt()
    }
}

/// Exact running minimum and maximum of the subleading terms over
/// `k_lo ..= k_hi`, with capacities supplied by a closure.
pub fn subleading_extremes<F: FnMut(u64) -> Rational>(
    mut capacities: F,
    vol: &Rational,
    k_lo: u64,
    k_hi: u64,
) -> Option<(SubleadingTerm, SubleadingTerm)> {
    if k_lo > k_hi {
        return None;
    }
    let mut min: Option<SubleadingTerm> = None;
    let mut max: Option<SubleadingTerm> = None;
    for k in k_lo..=k_hi {
        let term = SubleadingTerm::new(k, capacities(k), vol);
        if min
            .as_ref()
            .map_or(true, |m| term.cmp_term(m) == Ordering::Less)
        {
            min = Some(term.clone());
        }
        if max
            .as_ref()
            .map_or(true, |m| term.cmp_term(m) == Ordering::Greater)
        {
            max = Some(term);
        }
    }
    Some((min.unwrap(), max.unwrap()))
}
