//! End-to-end acceptance checks, one test per criterion. Each test prints a
//! single `acceptance <name>: pass` line on success (visible with
//! `cargo test --test acceptance -- --nocapture`).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Signed;
use std::time::Instant;

use toric::capacityfn;
use toric::classes;
use toric::domains::{
    affine_perimeter, parse_tuple, RationalPolygon, WeightTuple,
};
use toric::ech;
use toric::exactnum::{rat, rat_int, Rational, Surd};
use toric::staircase;
use toric::weights;

/// Small deterministic generator so the "random" inputs are reproducible.
struct XorShift(u64);

impl XorShift {
    fn new(seed: u64) -> XorShift {
        XorShift(seed.max(1))
    }
    fn next(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }
    fn below(&mut self, n: u64) -> u64 {
        self.next() % n
    }
}

fn pass(name: &str, t: Instant) {
    println!("acceptance {name}: pass ({:.2?})", t.elapsed());
}

#[test]
fn weight_identities() {
    let t = Instant::now();
    let mut rng = XorShift::new(0x5eed_0001);
    let mut seen = 0;
    while seen < 500 {
        let q = 1 + rng.below(30);
        let p = q + rng.below(49 * q + 1);
        let g = p.gcd(&q);
        let (p, q) = (p / g, q / g);
        let w = weights::weight_expansion_u64(p, q).unwrap();
        let z = rat(p as i64, q as i64);
        assert_eq!(w.sum(), &z + rat_int(1) - rat(1, q as i64));
        assert_eq!(w.sum_of_squares(), z);
        seen += 1;
    }
    let w = weights::integral_weights_u64(22, 9).unwrap();
    let expect: Vec<BigInt> = [9, 9, 4, 4, 1, 1, 1, 1]
        .iter()
        .map(|&x| BigInt::from(x))
        .collect();
    assert_eq!(w, expect);
    pass("weight-identities", t);
}

fn cross(o: &(Rational, Rational), a: &(Rational, Rational), b: &(Rational, Rational)) -> Rational {
    (&a.0 - &o.0) * (&b.1 - &o.1) - (&a.1 - &o.1) * (&b.0 - &o.0)
}

/// Andrew's monotone chain over exact rational points.
fn convex_hull(mut pts: Vec<(Rational, Rational)>) -> Vec<(Rational, Rational)> {
    pts.sort();
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<(Rational, Rational)> = Vec::new();
    for p in &pts {
        while lower.len() >= 2
            && !cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p).is_positive()
        {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<(Rational, Rational)> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2
            && !cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p).is_positive()
        {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

#[test]
fn cutting_cross_check() {
    let t = Instant::now();
    let mut rng = XorShift::new(0x5eed_0002);
    let mut done = 0;
    let mut attempts = 0;
    while done < 20 {
        attempts += 1;
        assert!(attempts < 1000, "polygon generation should not stall");
        // Up to 7 rational points with coordinates in [0, 10], denominators
        // 1..3; the hull is convex with at most 7 vertices.
        let denoms = [1i64, 2, 3];
        let pts: Vec<(Rational, Rational)> = (0..7)
            .map(|_| {
                let dx = denoms[rng.below(3) as usize];
                let dy = denoms[rng.below(3) as usize];
                (
                    rat(rng.below(10 * dx as u64 + 1) as i64, dx),
                    rat(rng.below(10 * dy as u64 + 1) as i64, dy),
                )
            })
            .collect();
        let hull = convex_hull(pts);
        if hull.len() < 3 {
            continue;
        }
        let Ok(poly) = RationalPolygon::new(hull) else {
            continue;
        };
        let tuple = WeightTuple::from_polygon(&poly).unwrap();
        assert_eq!(tuple.perimeter(), affine_perimeter(&poly));
        assert_eq!(tuple.volume(), rat_int(2) * poly.area());
        done += 1;
    }
    pass("cutting-cross-check", t);
}

#[test]
fn ball_sequence_and_union() {
    let t = Instant::now();
    // Independent oracle: least d with d(d+3)/2 >= k.
    let oracle = |k: u64| -> u64 {
        let mut d = (2.0 * k as f64).sqrt() as u64;
        while d * (d + 3) / 2 >= k && d > 0 {
            d -= 1;
        }
        while d * (d + 3) / 2 < k {
            d += 1;
        }
        d
    };
    let ball = WeightTuple::new(rat_int(1), vec![]);
    let caps = ech::convex_capacities(&ball, 10_000).unwrap();
    for k in 0..=10_000u64 {
        let expect = rat_int(oracle(k) as i64);
        assert_eq!(caps[k as usize], expect);
        assert_eq!(ech::ball_capacity(&rat_int(1), k), expect);
    }
    // Two unit balls pack like E(1, 2), capacity by capacity.
    let union = ech::ball_union_capacities(&[rat_int(1), rat_int(1)], 1000).unwrap();
    let e12 = ech::ellipsoid_capacities(&rat_int(1), &rat_int(2), 1000);
    assert_eq!(union, e12);
    pass("ball-sequence-and-union", t);
}

#[test]
fn capacities_match_lattice_oracle() {
    let t = Instant::now();
    // Pentagon with weight tuple (3; 1, 1): the simplex of size 3 with two
    // unit corners cut off.
    let poly = RationalPolygon::new(vec![
        (rat_int(0), rat_int(0)),
        (rat_int(2), rat_int(0)),
        (rat_int(2), rat_int(1)),
        (rat_int(1), rat_int(2)),
        (rat_int(0), rat_int(2)),
    ])
    .unwrap();
    let tuple = WeightTuple::from_polygon(&poly).unwrap().sorted();
    assert_eq!(tuple, parse_tuple("3: 1, 1").unwrap());
    for k in 0..=6u64 {
        assert_eq!(
            ech::convex_capacity(&tuple, k).unwrap(),
            ech::lattice_capacity_oracle(&poly, k).unwrap()
        );
    }
    pass("capacities-match-lattice-oracle", t);
}

#[test]
fn subleading_extremes_for_ball_and_ellipsoid() {
    let t = Instant::now();
    let one = rat_int(1);
    let (min, _) =
        ech::subleading_extremes(|k| ech::ball_capacity(&one, k), &one, 1, 20_000).unwrap();
    // The infimum -3/2 is approached but never attained: strictly above it,
    // within 0.01 of it, and at an index of the form n(n+3)/2.
    assert_eq!(
        min.cmp_rational(&rat(-3, 2)),
        std::cmp::Ordering::Greater
    );
    assert!((min.to_f64() + 1.5).abs() < 0.01);
    let disc = 8 * min.k + 9;
    let root = (disc as f64).sqrt() as u64;
    assert!(root * root == disc && (root - 3) % 2 == 0);
    // High-k maximum hugs the limsup -1/2.
    let (_, max) =
        ech::subleading_extremes(|k| ech::ball_capacity(&one, k), &one, 10_000, 20_000).unwrap();
    assert!((max.to_f64() + 0.5).abs() < 0.01);
    // E(1, 2): the infimum is -Per/2 = -2.
    let two = rat_int(2);
    let caps = ech::ellipsoid_capacities(&one, &rat_int(2), 20_000);
    let (min, _) =
        ech::subleading_extremes(|k| caps[k as usize].clone(), &two, 1, 20_000).unwrap();
    assert_eq!(min.cmp_rational(&rat_int(-2)), std::cmp::Ordering::Greater);
    assert!((min.to_f64() + 2.0).abs() < 0.02);
    pass("subleading-extremes", t);
}

#[test]
fn capacity_sequences_agree_across_cremona_moves() {
    let t = Instant::now();
    let a = parse_tuple("5: 2, 2, 2, 2, 2").unwrap();
    let b = parse_tuple("4: 2, 2, 1, 1, 1").unwrap();
    let c = parse_tuple("3: 1, 1, 1, 1").unwrap();
    let ca = ech::convex_capacities(&a, 500).unwrap();
    let cb = ech::convex_capacities(&b, 500).unwrap();
    let cc = ech::convex_capacities(&c, 500).unwrap();
    assert_eq!(ca, cb);
    assert_eq!(cb, cc);
    pass("capacity-sequences-cremona-invariant", t);
}

#[test]
fn accumulation_points_are_exact_surds() {
    let t = Instant::now();
    let ball = WeightTuple::new(rat_int(1), vec![]);
    let a0 = ball.accumulation_point().unwrap();
    assert_eq!(a0, Surd::new(rat(7, 2), rat(3, 2), 5));
    let e12 = parse_tuple("2: 1, 1").unwrap();
    let b0 = e12.accumulation_point().unwrap();
    assert_eq!(b0, Surd::new(rat_int(3), rat_int(2), 2));
    // Defining identity a0 + 1/a0 = Per^2/Vol - 2, symbolically.
    for (tuple, a) in [
        (&ball, &a0),
        (&e12, &b0),
        (
            &classes::blunted_polydisc_tuple(&rat_int(2)).unwrap(),
            &classes::blunted_polydisc_tuple(&rat_int(2))
                .unwrap()
                .accumulation_point()
                .unwrap(),
        ),
    ] {
        let per = tuple.perimeter();
        let vol = tuple.volume();
        let rhs = Surd::from_rational(&per * &per / vol - rat_int(2));
        assert_eq!(a.clone() + a.inverse(), rhs);
    }
    pass("accumulation-points-exact", t);
}

#[test]
fn staircase_families_check_out() {
    let t = Instant::now();
    for n in [3u32, 5] {
        let f = staircase::make_family(n).unwrap();
        let steps = staircase::generate_steps(&f, 12).unwrap();
        // The generator enforces adjacency of consecutive steps and strictly
        // decreasing centers; the relations make each step quasi-perfect.
        assert_eq!(steps.len(), 13);
        assert!(steps.iter().all(|s| s.satisfies_relations()));
        assert!(staircase::verify_perfect(&f, 12).unwrap());
        assert!(staircase::verify_obstructive(&f, 12).unwrap());
        let dom = staircase::limit_domain(&f).unwrap();
        let last = steps.last().unwrap();
        let center = toric::exactnum::rational_to_f64(&last.center_big());
        assert!((center - dom.z_inf.to_f64()).abs() < 1e-6);
    }
    pass("staircase-families", t);
}

#[test]
fn overshadow_search_comes_up_empty() {
    let t = Instant::now();
    let report = staircase::overshadow_search(3).unwrap();
    assert!(report.survivors.is_empty());
    assert!(report.candidates_checked > 0);
    pass("overshadow-search-empty", t);
}

#[test]
fn ghost_stairs_for_the_silver_ratio() {
    let t = Instant::now();
    let alpha = Surd::new(rat_int(1), rat_int(1), 2);
    let report = staircase::ghost_stairs(&alpha, 6).unwrap();
    assert!(report.cover_class_verified);
    assert_eq!(report.steps.len(), 6);
    for step in &report.steps {
        assert!(step.quasi_perfect);
        assert!(step.perfect);
        // mu lands exactly on the capacity function (z_n/alpha above alpha,
        // 1 below), so every obstruction is flush and leaves no trace.
        assert_eq!(step.mu, step.expected);
        assert!(step.flush_with_capacity);
    }
    pass("ghost-stairs-silver-ratio", t);
}

#[test]
fn degree_certificates_match_gromov_picture() {
    let t = Instant::now();
    for b in [rat_int(1), rat_int(2), rat(7, 2), rat_int(10)] {
        let tuple = classes::blunted_polydisc_tuple(&b).unwrap();
        assert!(capacityfn::degree_certificate(&tuple, 1).unwrap());
    }
    let ball = WeightTuple::new(rat_int(1), vec![]);
    assert!(!capacityfn::degree_certificate(&ball, 8).unwrap());
    let e12 = parse_tuple("2: 1, 1").unwrap();
    assert!(!capacityfn::degree_certificate(&e12, 8).unwrap());
    pass("degree-certificates", t);
}

#[test]
fn class_bounds_beat_volume_below_tau4() {
    let t = Instant::now();
    let ball = WeightTuple::new(rat_int(1), vec![]);
    let set = classes::enumerate_classes(&ball, 8).unwrap();
    // 50 grid points 1 + 117 i / 1000 staying below tau^4 = 6.8541...
    let mut strict = 0;
    for i in 0..50u64 {
        let z = rat_int(1) + Rational::new(BigInt::from(117 * i), BigInt::from(1000));
        let bound = capacityfn::class_lower(&ball, &z, &set).unwrap();
        let volume = Surd::sqrt_rational(&z).unwrap();
        assert!(bound >= volume);
        if bound > volume {
            strict += 1;
        }
    }
    assert!(
        strict >= 45,
        "only {strict} of 50 grid points had a strict obstruction"
    );
    pass("class-bounds-beat-volume", t);
}
