//! Rational polygons, the cutting algorithm, and weight tuples.
//!
//! A convex rational polygon in the first quadrant (touching both axes after
//! translation) decomposes as a big standard simplex of size `b = max(x+y)`
//! minus three corner regions; each corner region is standardized by an
//! integral affine map and then cut recursively into standard simplices.
//! The resulting sizes form the weight tuple `(b; b_1, ..., b_k)` of the
//! domain, from which the normalized perimeter `3b - sum(b_j)`, the volume
//! `b^2 - sum(b_j^2)` and the accumulation point of the associated ellipsoid
//! embedding function are all rational-exact.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;

use crate::exactnum::{format_rational, parse_rational, Rational, Surd};
use crate::{Error, Result};

pub type Pt = (Rational, Rational);

/// Safety valve for the recursive cutting (rational inputs always terminate,
/// but denominators control how fast).
const MAX_CUT_NODES: usize = 200_000;

fn cross(o: &Pt, a: &Pt, b: &Pt) -> Rational {
    (&a.0 - &o.0) * (&b.1 - &o.1) - (&a.1 - &o.1) * (&b.0 - &o.0)
}

/// Convex polygon with rational vertices, stored counterclockwise with no
/// duplicate or collinear-redundant vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalPolygon {
    vertices: Vec<Pt>,
}

impl RationalPolygon {
    /// Validates convexity and positive area; accepts either orientation and
    /// normalizes to counterclockwise. Collinear interior vertices are
    /// dropped.
    pub fn new(mut vertices: Vec<Pt>) -> Result<RationalPolygon> {
        vertices.dedup();
        if vertices.len() > 1 && vertices.first() == vertices.last() {
            vertices.pop();
        }
        if vertices.len() < 3 {
            return Err(Error::Invalid("polygon needs at least 3 vertices".into()));
        }
        if twice_signed_area(&vertices).is_negative() {
            vertices.reverse();
        }
        // Drop collinear vertices, then re-check strict convexity.
        let n = vertices.len();
        let kept: Vec<Pt> = (0..n)
            .filter(|&i| {
                !cross(
                    &vertices[(i + n - 1) % n],
                    &vertices[i],
                    &vertices[(i + 1) % n],
                )
                .is_zero()
            })
            .map(|i| vertices[i].clone())
            .collect();
        if kept.len() < 3 {
            return Err(Error::Invalid("polygon is degenerate".into()));
        }
        let m = kept.len();
        for i in 0..m {
            if cross(&kept[(i + m - 1) % m], &kept[i], &kept[(i + 1) % m]).is_negative() {
                return Err(Error::Invalid("polygon is not convex".into()));
            }
        }
        Ok(RationalPolygon { vertices: kept })
    }

    pub fn vertices(&self) -> &[Pt] {
        &self.vertices
    }

    /// Edge vectors in counterclockwise order, including the closing edge.
    pub fn edges(&self) -> Vec<Pt> {
        let n = self.vertices.len();
        (0..n)
            .map(|i| {
                let a = &self.vertices[i];
                let b = &self.vertices[(i + 1) % n];
                (&b.0 - &a.0, &b.1 - &a.1)
            })
            .collect()
    }

    pub fn area(&self) -> Rational {
        twice_signed_area(&self.vertices) / crate::exactnum::rat_int(2)
    }

    /// Translates so the minimum x and y coordinates are both zero.
    pub fn translated_to_axes(&self) -> RationalPolygon {
        let min_x = self.vertices.iter().map(|p| p.0.clone()).min().unwrap();
        let min_y = self.vertices.iter().map(|p| p.1.clone()).min().unwrap();
        RationalPolygon {
            vertices: self
                .vertices
                .iter()
                .map(|p| (&p.0 - &min_x, &p.1 - &min_y))
                .collect(),
        }
    }
}

fn twice_signed_area(vertices: &[Pt]) -> Rational {
    let n = vertices.len();
    let mut acc = Rational::zero();
    for i in 0..n {
        let a = &vertices[i];
        let b = &vertices[(i + 1) % n];
        acc += &a.0 * &b.1 - &b.0 * &a.1;
    }
    acc
}

/// Parses a polygon file: one "x y" pair per line, rationals allowed,
/// '#' starts a comment.
pub fn parse_polygon(text: &str) -> Result<RationalPolygon> {
    let mut vertices = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (x, y) = match (parts.next(), parts.next(), parts.next()) {
            (Some(x), Some(y), None) => (x, y),
            _ => {
                return Err(Error::Parse(format!(
                    "line {}: expected 'x y', got {:?}",
                    lineno + 1,
                    line
                )))
            }
        };
        vertices.push((parse_rational(x)?, parse_rational(y)?));
    }
    RationalPolygon::new(vertices)
}

/// Triangle with legs `a` (x-axis) and `b` (y-axis): the moment polygon of
/// the ellipsoid with those parameters.
pub fn ellipsoid_polygon(a: &Rational, b: &Rational) -> Result<RationalPolygon> {
    RationalPolygon::new(vec![
        (Rational::zero(), Rational::zero()),
        (a.clone(), Rational::zero()),
        (Rational::zero(), b.clone()),
    ])
}

pub fn ball_polygon(a: &Rational) -> Result<RationalPolygon> {
    ellipsoid_polygon(a, a)
}

/// Rectangle `[0,a] x [0,b]`: the moment polygon of a polydisc.
pub fn polydisc_polygon(a: &Rational, b: &Rational) -> Result<RationalPolygon> {
    RationalPolygon::new(vec![
        (Rational::zero(), Rational::zero()),
        (a.clone(), Rational::zero()),
        (a.clone(), b.clone()),
        (Rational::zero(), b.clone()),
    ])
}

/// A corner region in standard position: bounded by the axes and a monotone
/// chain from `(0, l1)` down-right to `(l2, 0)` that turns left (bulges
/// toward the origin). An empty region is stored with an empty arc.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConcaveRegion {
    arc: Vec<Pt>,
}

impl ConcaveRegion {
    pub fn empty() -> ConcaveRegion {
        ConcaveRegion { arc: Vec::new() }
    }

    /// Builds a region from its arc; a chain with fewer than two distinct
    /// points, or touching the origin, is the empty region.
    pub fn new(mut arc: Vec<Pt>) -> Result<ConcaveRegion> {
        arc.dedup();
        if arc.len() < 2 {
            return Ok(ConcaveRegion::empty());
        }
        let first = arc.first().unwrap();
        let last = arc.last().unwrap();
        if !first.0.is_zero() || !last.1.is_zero() {
            return Err(Error::Invalid(
                "arc must run from the y-axis to the x-axis".into(),
            ));
        }
        if first.1.is_zero() || last.0.is_zero() {
            return Ok(ConcaveRegion::empty());
        }
        for w in arc.windows(2) {
            if &w[1].0 < &w[0].0 || &w[1].1 > &w[0].1 {
                return Err(Error::Invalid("arc must be monotone down-right".into()));
            }
        }
        for w in arc.windows(3) {
            if cross(&w[0], &w[1], &w[2]).is_negative() {
                return Err(Error::Invalid("arc must turn left".into()));
            }
        }
        Ok(ConcaveRegion { arc })
    }

    pub fn is_empty(&self) -> bool {
        self.arc.is_empty()
    }

    pub fn arc(&self) -> &[Pt] {
        &self.arc
    }

    pub fn area(&self) -> Rational {
        if self.is_empty() {
            return Rational::zero();
        }
        // Close the region through the origin.
        let mut loop_pts = vec![(Rational::zero(), Rational::zero())];
        loop_pts.extend(self.arc.iter().cloned());
        twice_signed_area(&loop_pts) / crate::exactnum::rat_int(-2)
    }

    /// Recursive cutting: removes the largest corner simplex `T(a)` with
    /// `a = min(x+y)` over the arc, shears the two remaining pieces back to
    /// standard position, and recurses. Returns the cut tree.
    pub fn cut_tree(&self) -> Result<Option<CutNode>> {
        if self.is_empty() {
            return Ok(None);
        }
        let mut budget = MAX_CUT_NODES;
        cut_arc(&self.arc, &mut budget).map(Some)
    }
}

/// One cut in the recursive decomposition, with the cuts of the two
/// sub-regions it produced (at most two children).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutNode {
    pub cut: Rational,
    pub children: Vec<CutNode>,
}

impl CutNode {
    pub fn collect_cuts(&self, out: &mut Vec<Rational>) {
        out.push(self.cut.clone());
        for c in &self.children {
            c.collect_cuts(out);
        }
    }

    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(CutNode::node_count).sum::<usize>()
    }

    /// The tree invariant: every node's children cuts sum to at most its own
    /// cut, and cuts are positive.
    pub fn is_well_formed(&self) -> bool {
        if !self.cut.is_positive() {
            return false;
        }
        let child_sum: Rational = self.children.iter().map(|c| c.cut.clone()).sum();
        child_sum <= self.cut && self.children.iter().all(CutNode::is_well_formed)
    }
}

fn cut_arc(arc: &[Pt], budget: &mut usize) -> Result<CutNode> {
    if *budget == 0 {
        return Err(Error::Unsupported(
            "cut decomposition exceeded the node budget".into(),
        ));
    }
    *budget -= 1;
    let levels: Vec<Rational> = arc.iter().map(|p| &p.0 + &p.1).collect();
    let a = levels.iter().min().unwrap().clone();
    debug_assert!(a.is_positive());
    let i_lo = levels.iter().position(|v| v == &a).unwrap();
    let i_hi = levels.iter().rposition(|v| v == &a).unwrap();
    let last = arc.len() - 1;
    let mut children = Vec::new();
    if i_lo > 0 {
        // Shear the upper-left piece down: (x, y) -> (x, x + y - a).
        let child: Vec<Pt> = arc[..=i_lo]
            .iter()
            .map(|p| (p.0.clone(), &p.0 + &p.1 - &a))
            .collect();
        let region = ConcaveRegion::new(child)?;
        if !region.is_empty() {
            children.push(cut_arc(&region.arc, budget)?);
        }
    }
    if i_hi < last {
        // Shear the lower-right piece left: (x, y) -> (x + y - a, y).
        let child: Vec<Pt> = arc[i_hi..]
            .iter()
            .map(|p| (&p.0 + &p.1 - &a, p.1.clone()))
            .collect();
        let region = ConcaveRegion::new(child)?;
        if !region.is_empty() {
            children.push(cut_arc(&region.arc, budget)?);
        }
    }
    Ok(CutNode { cut: a, children })
}

/// Full decomposition of a convex polygon: the head simplex size and the
/// three standardized corner regions with their cut trees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutDecomposition {
    pub head: Rational,
    /// Corner regions in standard position: origin, top corner `(0,b)`,
    /// right corner `(b,0)`.
    pub regions: [ConcaveRegion; 3],
    pub trees: [Option<CutNode>; 3],
}

impl CutDecomposition {
    /// All cuts, sorted nonincreasing.
    pub fn cuts(&self) -> Vec<Rational> {
        let mut out = Vec::new();
        for t in self.trees.iter().flatten() {
            t.collect_cuts(&mut out);
        }
        out.sort_by(|a, b| b.cmp(a));
        out
    }

    pub fn tuple(&self) -> WeightTuple {
        WeightTuple {
            head: self.head.clone(),
            cuts: self.cuts(),
        }
    }
}

/// Walks the vertex list counterclockwise from `start` to `end`, inclusive.
fn boundary_chain(vertices: &[Pt], start: &Pt, end: &Pt) -> Vec<Pt> {
    let n = vertices.len();
    let i0 = vertices
        .iter()
        .position(|v| v == start)
        .expect("chain start is a vertex");
    let mut out = vec![vertices[i0].clone()];
    let mut i = i0;
    while &vertices[i] != end {
        i = (i + 1) % n;
        out.push(vertices[i].clone());
        assert!(out.len() <= n + 1, "chain end is a vertex");
    }
    out
}

/// Decomposes a convex rational polygon into its weight tuple data. The
/// polygon is translated to touch both axes first; the head is
/// `b = max(x + y)`.
pub fn cut_decomposition(poly: &RationalPolygon) -> Result<CutDecomposition> {
    let poly = poly.translated_to_axes();
    let vs = poly.vertices();
    let b = vs.iter().map(|p| &p.0 + &p.1).max().unwrap();

    let on_y: Vec<&Pt> = vs.iter().filter(|p| p.0.is_zero()).collect();
    let on_x: Vec<&Pt> = vs.iter().filter(|p| p.1.is_zero()).collect();
    let on_h: Vec<&Pt> = vs.iter().filter(|p| &p.0 + &p.1 == b).collect();
    let y_lo = on_y.iter().map(|p| p.1.clone()).min().unwrap();
    let y_hi = on_y.iter().map(|p| p.1.clone()).max().unwrap();
    let x_l = on_x.iter().map(|p| p.0.clone()).min().unwrap();
    let x_r = on_x.iter().map(|p| p.0.clone()).max().unwrap();
    let x1 = on_h.iter().map(|p| p.0.clone()).min().unwrap();
    let x2 = on_h.iter().map(|p| p.0.clone()).max().unwrap();

    // Origin corner: the boundary chain from (0, y_lo) to (x_l, 0) is
    // already in standard position.
    let chain0 = boundary_chain(vs, &(Rational::zero(), y_lo.clone()), &(x_l.clone(), Rational::zero()));
    let region0 = ConcaveRegion::new(chain0)?;

    // Top corner (0, b): chain from (x1, b - x1) to (0, y_hi), standardized
    // by p -> M (p - (0, b)) with M = [[-1, -1], [1, 0]] (determinant one).
    let chain1 = boundary_chain(vs, &(x1.clone(), &b - &x1), &(Rational::zero(), y_hi.clone()));
    let region1 = ConcaveRegion::new(
        chain1
            .into_iter()
            .map(|(x, y)| {
                let yb = y - &b;
                (-&x - &yb, x)
            })
            .collect(),
    )?;

    // Right corner (b, 0): chain from (x_r, 0) to (x2, b - x2), standardized
    // by p -> M (p - (b, 0)) with M = [[0, 1], [-1, -1]].
    let chain2 = boundary_chain(vs, &(x_r.clone(), Rational::zero()), &(x2.clone(), &b - &x2));
    let region2 = ConcaveRegion::new(
        chain2
            .into_iter()
            .map(|(x, y)| {
                let xb = x - &b;
                (y.clone(), -&xb - &y)
            })
            .collect(),
    )?;

    let trees = [
        region0.cut_tree()?,
        region1.cut_tree()?,
        region2.cut_tree()?,
    ];
    Ok(CutDecomposition {
        head: b,
        regions: [region0, region1, region2],
        trees,
    })
}

/// Weight tuple `(head; cuts)` of a domain: one big simplex minus a list of
/// cut simplices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightTuple {
    pub head: Rational,
    pub cuts: Vec<Rational>,
}

impl WeightTuple {
    pub fn new(head: Rational, cuts: Vec<Rational>) -> WeightTuple {
        WeightTuple { head, cuts }
    }

    pub fn from_polygon(poly: &RationalPolygon) -> Result<WeightTuple> {
        Ok(cut_decomposition(poly)?.tuple())
    }

    /// Basic sanity: positive head, positive cuts, no cut exceeding the head.
    pub fn validate(&self) -> Result<()> {
        if !self.head.is_positive() {
            return Err(Error::Invalid("tuple head must be positive".into()));
        }
        for c in &self.cuts {
            if !c.is_positive() {
                return Err(Error::Invalid("tuple cuts must be positive".into()));
            }
            if c > &self.head {
                return Err(Error::Invalid("tuple cut exceeds head".into()));
            }
        }
        Ok(())
    }

    pub fn sorted(&self) -> WeightTuple {
        let mut cuts = self.cuts.clone();
        cuts.sort_by(|a, b| b.cmp(a));
        WeightTuple {
            head: self.head.clone(),
            cuts,
        }
    }

    /// Normalized perimeter `3 head - sum(cuts)`: the affine perimeter of the
    /// domain boundary.
    pub fn perimeter(&self) -> Rational {
        crate::exactnum::rat_int(3) * &self.head - self.cuts.iter().sum::<Rational>()
    }

    /// Normalized volume `head^2 - sum(cuts^2)`: twice the Euclidean area.
    pub fn volume(&self) -> Rational {
        &self.head * &self.head - self.cuts.iter().map(|c| c * c).sum::<Rational>()
    }

    /// Accumulation point of the ellipsoid embedding function:
    /// `a0 = (S + sqrt(S^2 - 4)) / 2` with `S = Per^2 / Vol - 2`. Exists only
    /// when `Per^2 >= 4 Vol` (equivalently `S >= 2`).
    pub fn accumulation_point(&self) -> Option<Surd> {
        let per = self.perimeter();
        let vol = self.volume();
        if !vol.is_positive() {
            return None;
        }
        let s = &per * &per / &vol - crate::exactnum::rat_int(2);
        let disc = &s * &s - crate::exactnum::rat_int(4);
        if disc.is_negative() {
            return None;
        }
        let root = Surd::sqrt_rational(&disc).expect("nonnegative discriminant");
        Some(
            (Surd::from_rational(s) + root)
                / Surd::from_int(2),
        )
    }
}

impl fmt::Display for WeightTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", format_rational(&self.head))?;
        for (i, c) in self.cuts.iter().enumerate() {
            write!(f, "{}{}", if i == 0 { " " } else { ", " }, format_rational(c))?;
        }
        Ok(())
    }
}

/// Parses "b: c1, c2, ..." (commas or whitespace between cuts; "b:" alone is
/// a bare simplex).
pub fn parse_tuple(s: &str) -> Result<WeightTuple> {
    let (head_str, rest) = s
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("tuple must look like 'b: c1, c2', got {s:?}")))?;
    let head = parse_rational(head_str)?;
    let mut cuts = Vec::new();
    for part in rest.split(|c: char| c == ',' || c.is_whitespace()) {
        let part = part.trim();
        if !part.is_empty() {
            cuts.push(parse_rational(part)?);
        }
    }
    let tuple = WeightTuple { head, cuts };
    tuple.validate()?;
    Ok(tuple)
}

/// Affine length of a segment: for displacement `(n1/m, n2/m)` in lowest
/// common terms this is `gcd(n1, n2) / m`, the number of lattice steps at
/// the segment's denominator scale.
pub fn affine_length(from: &Pt, to: &Pt) -> Rational {
    let dx = &to.0 - &from.0;
    let dy = &to.1 - &from.1;
    if dx.is_zero() && dy.is_zero() {
        return Rational::zero();
    }
    let m = dx.denom().lcm(dy.denom());
    let n1 = (&dx * Rational::from(m.clone())).to_integer();
    let n2 = (&dy * Rational::from(m.clone())).to_integer();
    Rational::new(n1.gcd(&n2), m)
}

/// Affine perimeter of the polygon boundary (sum of affine edge lengths).
pub fn affine_perimeter(poly: &RationalPolygon) -> Rational {
    let vs = poly.vertices();
    let n = vs.len();
    (0..n)
        .map(|i| affine_length(&vs[i], &vs[(i + 1) % n]))
        .sum()
}

/// Order of the boundary singularity at vertex `i` of a lattice polygon:
/// the absolute determinant of the primitive outward normals of the two
/// adjacent edges (1 means the corner is smooth in the affine sense).
pub fn singularity_order(poly: &RationalPolygon, i: usize) -> Result<BigInt> {
    let vs = poly.vertices();
    let n = vs.len();
    if i >= n {
        return Err(Error::Invalid("vertex index out of range".into()));
    }
    let prev = &vs[(i + n - 1) % n];
    let cur = &vs[i];
    let next = &vs[(i + 1) % n];
    let n1 = primitive_outward_normal(prev, cur)?;
    let n2 = primitive_outward_normal(cur, next)?;
    Ok((&n1.0 * &n2.1 - &n1.1 * &n2.0).abs())
}

fn primitive_outward_normal(from: &Pt, to: &Pt) -> Result<(BigInt, BigInt)> {
    let dx = &to.0 - &from.0;
    let dy = &to.1 - &from.1;
    let m = dx.denom().lcm(dy.denom());
    let ex = (&dx * Rational::from(m.clone())).to_integer();
    let ey = (&dy * Rational::from(m)).to_integer();
    let g = ex.gcd(&ey);
    if g.is_zero() {
        return Err(Error::Invalid("zero-length edge".into()));
    }
    // CCW boundary: outward normal is the edge rotated clockwise.
    Ok((ey / &g, -(ex / &g)))
}

/// Least `k` such that `8 F_k^2 >= order`, where `F` is the Fibonacci
/// sequence with `F_0 = F_1 = 1`: a lower bound for the number of cuts
/// needed to resolve a boundary singularity of the given order.
pub fn cut_length_lower_bound(order: &BigInt) -> u32 {
    let eight = BigInt::from(8);
    let mut fibs: Vec<BigInt> = vec![BigInt::one(), BigInt::one()];
    let mut k = 0usize;
    loop {
        if k >= fibs.len() {
            let next = &fibs[k - 1] + &fibs[k - 2];
            fibs.push(next);
        }
        if &eight * &fibs[k] * &fibs[k] >= *order {
            return k as u32;
        }
        k += 1;
    }
}

/// The volume bound `V(z) = sqrt(z / Vol)` on the ellipsoid embedding
/// function, as an exact surd.
pub fn volume_constraint(z: &Rational, vol: &Rational) -> Result<Surd> {
    if !vol.is_positive() {
        return Err(Error::Invalid("volume must be positive".into()));
    }
    Surd::sqrt_rational(&(z / vol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{rat, rat_int};

    fn pt(x: i64, y: i64) -> Pt {
        (rat_int(x), rat_int(y))
    }

    fn tuple_of(poly: &RationalPolygon) -> WeightTuple {
        WeightTuple::from_polygon(poly).unwrap().sorted()
    }

    #[test]
    fn ball_is_a_bare_simplex() {
        let t = tuple_of(&ball_polygon(&rat_int(1)).unwrap());
        assert_eq!(t.head, rat_int(1));
        assert!(t.cuts.is_empty());
        assert_eq!(t.perimeter(), rat_int(3));
        assert_eq!(t.volume(), rat_int(1));
    }

    #[test]
    fn small_ellipsoid_tuple() {
        let t = tuple_of(&ellipsoid_polygon(&rat_int(2), &rat_int(1)).unwrap());
        assert_eq!(t.head, rat_int(2));
        assert_eq!(t.cuts, vec![rat_int(1), rat_int(1)]);
        assert_eq!(t.perimeter(), rat_int(4));
        assert_eq!(t.volume(), rat_int(2));
    }

    #[test]
    fn ellipsoid_cuts_are_dual_weights() {
        // The cuts of E(a, b) with integer b >= a are W(b, b - a).
        let t = tuple_of(&ellipsoid_polygon(&rat_int(7), &rat_int(3)).unwrap());
        assert_eq!(t.head, rat_int(7));
        let expect: Vec<Rational> = [4i64, 3, 1, 1, 1].iter().map(|&n| rat_int(n)).collect();
        assert_eq!(t.cuts, expect);
        assert_eq!(t.volume(), rat_int(21)); // 2 * area
        assert_eq!(t.perimeter(), rat_int(11));
        assert_eq!(
            t.perimeter(),
            affine_perimeter(&ellipsoid_polygon(&rat_int(7), &rat_int(3)).unwrap())
        );
    }

    #[test]
    fn polydisc_tuple() {
        let t = tuple_of(&polydisc_polygon(&rat_int(2), &rat_int(2)).unwrap());
        assert_eq!(t.head, rat_int(4));
        assert_eq!(t.cuts, vec![rat_int(2), rat_int(2)]);
        let t = tuple_of(&polydisc_polygon(&rat_int(5), &rat_int(1)).unwrap());
        assert_eq!(t.head, rat_int(6));
        assert_eq!(t.cuts, vec![rat_int(5), rat_int(1)]);
    }

    #[test]
    fn quadrilateral_with_origin_corner() {
        let poly =
            RationalPolygon::new(vec![pt(1, 0), pt(3, 0), pt(0, 3), pt(0, 1)]).unwrap();
        let t = tuple_of(&poly);
        assert_eq!(t.head, rat_int(3));
        assert_eq!(t.cuts, vec![rat_int(1)]);
        assert_eq!(t.volume(), rat_int(2) * poly.area());
        assert_eq!(t.perimeter(), affine_perimeter(&poly));
    }

    #[test]
    fn volume_and_perimeter_match_geometry() {
        // An asymmetric hexagon-ish convex polygon.
        let poly = RationalPolygon::new(vec![
            pt(1, 0),
            pt(4, 0),
            pt(5, 1),
            pt(3, 4),
            pt(0, 3),
            pt(0, 1),
        ])
        .unwrap();
        let t = tuple_of(&poly);
        assert_eq!(t.volume(), rat_int(2) * poly.area());
        assert_eq!(t.perimeter(), affine_perimeter(&poly));
        for node in cut_decomposition(&poly).unwrap().trees.iter().flatten() {
            assert!(node.is_well_formed());
        }
    }

    #[test]
    fn rational_vertices_work() {
        let poly = RationalPolygon::new(vec![
            (rat_int(0), rat_int(0)),
            (rat(7, 3), rat_int(0)),
            (rat_int(0), rat(7, 3)),
        ])
        .unwrap();
        let t = tuple_of(&poly);
        assert_eq!(t.head, rat(7, 3));
        assert!(t.cuts.is_empty());
    }

    #[test]
    fn branching_cut_tree() {
        let region = ConcaveRegion::new(vec![pt(0, 3), pt(1, 1), pt(3, 0)]).unwrap();
        let tree = region.cut_tree().unwrap().unwrap();
        assert_eq!(tree.cut, rat_int(2));
        assert_eq!(tree.children.len(), 2);
        assert!(tree.is_well_formed());
        let mut cuts = Vec::new();
        tree.collect_cuts(&mut cuts);
        let sum_sq: Rational = cuts.iter().map(|c| c * c).sum();
        assert_eq!(sum_sq, rat_int(2) * region.area());
    }

    #[test]
    fn chain_cut_tree_runs_the_euclidean_algorithm() {
        // Region under the segment (0,9) -- (22,0): cuts are W(22, 9).
        let region = ConcaveRegion::new(vec![pt(0, 9), pt(22, 0)]).unwrap();
        let mut cuts = Vec::new();
        region.cut_tree().unwrap().unwrap().collect_cuts(&mut cuts);
        cuts.sort_by(|a, b| b.cmp(a));
        let expect: Vec<Rational> = crate::weights::integral_weights_u64(22, 9)
            .unwrap()
            .into_iter()
            .map(Rational::from)
            .collect();
        assert_eq!(cuts, expect);
    }

    #[test]
    fn accumulation_points() {
        let ball = parse_tuple("1:").unwrap();
        let a0 = ball.accumulation_point().unwrap();
        // (7 + 3 sqrt 5) / 2
        assert_eq!(a0, Surd::new(rat(7, 2), rat(3, 2), 5));
        let e12 = parse_tuple("2: 1, 1").unwrap();
        let a0 = e12.accumulation_point().unwrap();
        // 3 + 2 sqrt 2
        assert_eq!(a0, Surd::new(rat_int(3), rat_int(2), 2));
    }

    #[test]
    fn tuple_text_round_trip() {
        for s in ["5: 2, 2, 2, 2, 2", "2: 1, 1", "1:", "22/9: 1/3, 1/4"] {
            let t = parse_tuple(s).unwrap();
            assert_eq!(parse_tuple(&t.to_string()).unwrap(), t);
        }
        assert!(parse_tuple("2: 3").is_err()); // cut exceeds head
        assert!(parse_tuple("0: 1").is_err());
    }

    #[test]
    fn affine_lengths() {
        assert_eq!(affine_length(&pt(0, 0), &pt(4, 6)), rat_int(2));
        assert_eq!(
            affine_length(&(rat_int(0), rat_int(0)), &(rat(1, 2), rat(1, 2))),
            rat(1, 2)
        );
        assert_eq!(affine_length(&pt(2, 1), &pt(2, 1)), rat_int(0));
    }

    #[test]
    fn singularity_orders() {
        let square = polydisc_polygon(&rat_int(1), &rat_int(1)).unwrap();
        for i in 0..4 {
            assert_eq!(singularity_order(&square, i).unwrap(), BigInt::one());
        }
        let tri = ellipsoid_polygon(&rat_int(2), &rat_int(1)).unwrap();
        let vs = tri.vertices();
        let top = vs.iter().position(|p| p.1 == rat_int(1)).unwrap();
        assert_eq!(singularity_order(&tri, top).unwrap(), BigInt::from(2));
    }

    #[test]
    fn fibonacci_cut_bound() {
        assert_eq!(cut_length_lower_bound(&BigInt::from(1)), 0);
        assert_eq!(cut_length_lower_bound(&BigInt::from(8)), 0);
        assert_eq!(cut_length_lower_bound(&BigInt::from(9)), 2);
        assert_eq!(cut_length_lower_bound(&BigInt::from(33)), 3);
        assert_eq!(cut_length_lower_bound(&BigInt::from(1000)), 6);
    }

    #[test]
    fn volume_bound_values() {
        let v = volume_constraint(&rat_int(2), &rat_int(2)).unwrap();
        assert_eq!(v, Surd::one());
        let v = volume_constraint(&rat_int(2), &rat_int(1)).unwrap();
        assert_eq!(v, Surd::new(rat_int(0), rat_int(1), 2));
    }

    #[test]
    fn polygon_file_parsing() {
        let text = "# a triangle\n0 0\n2 0   # leg\n0 1\n";
        let poly = parse_polygon(text).unwrap();
        assert_eq!(poly.vertices().len(), 3);
        assert!(parse_polygon("0 0\n1 1\n").is_err());
        assert!(parse_polygon("0 0 0\n1 0\n0 1\n").is_err());
    }
}
