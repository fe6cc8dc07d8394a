//! Cremona moves on weight tuples and class vectors.
//!
//! The basic move sends `(b; b_1, b_2, b_3, ...)` to
//! `(b + d; b_1 + d, b_2 + d, b_3 + d, ...)` with defect
//! `d = b - b_1 - b_2 - b_3` computed from the three largest entries; a
//! tuple is reduced when the defect is nonnegative. Repeated moves decide
//! exceptionality of class vectors (terminal state `(0; -1)` up to zeros)
//! and give reduction-path upper bounds for the Cremona length of a domain.

use num_traits::Zero;
use std::cmp::Ordering;
use std::ops::{Add, Sub};

use crate::domains::WeightTuple;
use crate::ech;
use crate::{Error, Result};

/// Entry types usable in a weight tuple: exact rationals and quadratic
/// surds both qualify. Entries must be mutually comparable (for surds this
/// means a common radical).
pub trait TupleEntry:
    Clone + Zero + PartialOrd + Add<Output = Self> + Sub<Output = Self>
{
}
impl<T: Clone + Zero + PartialOrd + Add<Output = T> + Sub<Output = T>> TupleEntry for T {}

fn cmp_desc<T: TupleEntry>(a: &T, b: &T) -> Ordering {
    b.partial_cmp(a).expect("tuple entries must be comparable")
}

fn sort_desc<T: TupleEntry>(cuts: &mut Vec<T>) {
    cuts.retain(|c| !c.is_zero());
    cuts.sort_by(cmp_desc);
}

/// Defect of the move acting on the three largest cuts (missing cuts count
/// as zero).
pub fn defect<T: TupleEntry>(head: &T, cuts: &[T]) -> T {
    let mut sorted: Vec<T> = cuts.to_vec();
    sorted.sort_by(cmp_desc);
    let mut acc = head.clone();
    for c in sorted.iter().take(3) {
        acc = acc - c.clone();
    }
    acc
}

pub fn is_reduced<T: TupleEntry>(head: &T, cuts: &[T]) -> bool {
    defect(head, cuts) >= T::zero()
}

/// One Cremona move: returns the input unchanged when already reduced,
/// otherwise adds the (negative) defect to the head and the three largest
/// cuts, drops zeros and reorders.
pub fn tuple_move<T: TupleEntry>(head: &T, cuts: &[T]) -> (T, Vec<T>) {
    let mut sorted: Vec<T> = cuts.to_vec();
    sort_desc(&mut sorted);
    while sorted.len() < 3 {
        sorted.push(T::zero());
    }
    let d = defect(head, &sorted);
    if d >= T::zero() {
        sorted.retain(|c| !c.is_zero());
        return (head.clone(), sorted);
    }
    let new_head = head.clone() + d.clone();
    for c in sorted.iter_mut().take(3) {
        *c = c.clone() + d.clone();
    }
    sort_desc(&mut sorted);
    (new_head, sorted)
}

/// Repeated moves until reduced; returns the reduced tuple and the list of
/// (negative) defects applied along the way.
pub fn reduce_tuple<T: TupleEntry>(head: &T, cuts: &[T]) -> Result<(T, Vec<T>, Vec<T>)> {
    let mut head = head.clone();
    let mut cuts: Vec<T> = cuts.to_vec();
    sort_desc(&mut cuts);
    let mut trace = Vec::new();
    for _ in 0..10_000 {
        if is_reduced(&head, &cuts) {
            return Ok((head, cuts, trace));
        }
        trace.push(defect(&head, &cuts));
        let (h, c) = tuple_move(&head, &cuts);
        head = h;
        cuts = c;
    }
    Err(Error::Unsupported("reduction did not terminate".into()))
}

/// Cuts remaining after reduction — an upper bound for the Cremona length
/// of the underlying domain along this particular reduction path.
pub fn cremona_length_upper<T: TupleEntry>(head: &T, cuts: &[T]) -> Result<usize> {
    let (_, reduced, _) = reduce_tuple(head, cuts)?;
    Ok(reduced.len())
}

/// Degree plus integer coefficients, signed because reductions pass through
/// negative entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassVector {
    pub d: i128,
    pub coeffs: Vec<i128>,
}

impl ClassVector {
    pub fn new(d: i128, coeffs: Vec<i128>) -> ClassVector {
        ClassVector { d, coeffs }
    }

    /// Flattens an obstruction class into (d; mtilde ++ m).
    pub fn from_class(class: &crate::classes::ObstructionClass) -> ClassVector {
        let mut coeffs = class.mtilde.clone();
        coeffs.extend_from_slice(&class.m);
        ClassVector { d: class.d, coeffs }
    }

    pub fn coeff_sum(&self) -> i128 {
        self.coeffs.iter().sum()
    }

    pub fn coeff_sum_sq(&self) -> i128 {
        self.coeffs.iter().map(|x| x * x).sum()
    }

    /// `3d - sum = 1` and `d^2 - sum_sq = -1`.
    pub fn satisfies_diophantine(&self) -> bool {
        3 * self.d - self.coeff_sum() == 1 && self.d * self.d - self.coeff_sum_sq() == -1
    }
}

/// The move `c_{ijk}`: adds the defect `d - n_i - n_j - n_k` to the degree
/// and to the three chosen coefficients. An involution.
pub fn class_move(v: &ClassVector, i: usize, j: usize, k: usize) -> Result<ClassVector> {
    let n = v.coeffs.len();
    if i >= n || j >= n || k >= n {
        return Err(Error::Invalid("move index out of range".into()));
    }
    if i == j || j == k || i == k {
        return Err(Error::Invalid("move indices must be distinct".into()));
    }
    let delta = v.d - v.coeffs[i] - v.coeffs[j] - v.coeffs[k];
    let mut out = v.clone();
    out.d += delta;
    out.coeffs[i] += delta;
    out.coeffs[j] += delta;
    out.coeffs[k] += delta;
    Ok(out)
}

/// A single reduction step: the three (sorted-order) positions acted on and
/// the defect applied.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionStep {
    pub indices: [usize; 3],
    pub defect: i128,
}

/// Decides exceptionality by reduction: sort descending, act on the three
/// largest entries while the defect is negative, and compare the terminal
/// vector with `(0; -1)` up to zeros. Requires the Diophantine conditions.
pub fn is_exceptional(v: &ClassVector) -> Result<(bool, Vec<ReductionStep>)> {
    if !v.satisfies_diophantine() {
        return Err(Error::Invalid(
            "class vector fails the Diophantine conditions".into(),
        ));
    }
    let mut cur = v.clone();
    cur.coeffs.sort_unstable_by(|a, b| b.cmp(a));
    while cur.coeffs.len() < 3 {
        cur.coeffs.push(0);
    }
    let mut trace = Vec::new();
    for _ in 0..10_000 {
        let delta = cur.d - cur.coeffs[0] - cur.coeffs[1] - cur.coeffs[2];
        if delta >= 0 {
            let nonzero: Vec<i128> = cur.coeffs.iter().copied().filter(|&x| x != 0).collect();
            return Ok((cur.d == 0 && nonzero == [-1], trace));
        }
        trace.push(ReductionStep {
            indices: [0, 1, 2],
            defect: delta,
        });
        cur.d += delta;
        for c in cur.coeffs.iter_mut().take(3) {
            *c += delta;
        }
        cur.coeffs.sort_unstable_by(|a, b| b.cmp(a));
    }
    Err(Error::Unsupported("reduction did not terminate".into()))
}

/// Replays a reduction trace from `v` and returns the terminal vector.
pub fn replay(v: &ClassVector, trace: &[ReductionStep]) -> Result<ClassVector> {
    let mut cur = v.clone();
    cur.coeffs.sort_unstable_by(|a, b| b.cmp(a));
    while cur.coeffs.len() < 3 {
        cur.coeffs.push(0);
    }
    for step in trace {
        let [i, j, k] = step.indices;
        let next = class_move(&cur, i, j, k)?;
        let applied = next.d - cur.d;
        if applied != step.defect {
            return Err(Error::Invalid("trace defect mismatch".into()));
        }
        cur = next;
        cur.coeffs.sort_unstable_by(|a, b| b.cmp(a));
    }
    Ok(cur)
}

/// Checks that two weight tuples have the same volume and identical
/// capacities for all indices up to `kmax`, as Cremona-related tuples must.
pub fn capacity_invariance_check(t1: &WeightTuple, t2: &WeightTuple, kmax: u64) -> Result<bool> {
    t1.validate()?;
    t2.validate()?;
    if t1.volume() != t2.volume() {
        return Ok(false);
    }
    Ok(ech::convex_capacities(t1, kmax)? == ech::convex_capacities(t2, kmax)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::parse_tuple;
    use crate::exactnum::{rat_int, Rational, Surd};

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| rat_int(x)).collect()
    }

    #[test]
    fn example_chain() {
        let (h, c) = tuple_move(&rat_int(5), &ints(&[2, 2, 2, 2, 2]));
        assert_eq!((h.clone(), c.clone()), (rat_int(4), ints(&[2, 2, 1, 1, 1])));
        let (h, c) = tuple_move(&h, &c);
        assert_eq!((h.clone(), c.clone()), (rat_int(3), ints(&[1, 1, 1, 1])));
        assert!(is_reduced(&h, &c));
        let (h2, c2) = tuple_move(&h, &c);
        assert_eq!((h2, c2), (h, c));
    }

    #[test]
    fn reduce_with_trace() {
        let (h, c, trace) = reduce_tuple(&rat_int(5), &ints(&[2, 2, 2, 2, 2])).unwrap();
        assert_eq!((h, c), (rat_int(3), ints(&[1, 1, 1, 1])));
        assert_eq!(trace, ints(&[-1, -1]));
    }

    #[test]
    fn length_upper_bounds() {
        assert_eq!(
            cremona_length_upper(&rat_int(3), &ints(&[1, 1, 1, 1])).unwrap(),
            4
        );
        assert_eq!(
            cremona_length_upper(&rat_int(5), &ints(&[2, 2, 2, 2, 2])).unwrap(),
            4
        );
    }

    #[test]
    fn surd_entries_reduce_like_rationals() {
        let head = Surd::from_int(5);
        let cuts: Vec<Surd> = (0..5).map(|_| Surd::from_int(2)).collect();
        let (h, c, _) = reduce_tuple(&head, &cuts).unwrap();
        assert_eq!(h, Surd::from_int(3));
        assert_eq!(c, vec![Surd::one(); 4]);

        // Genuinely irrational entries: head 1, cuts (1/sqrt(2), 1 - 1/sqrt(2), 1/4).
        let half_root = Surd::new(rat_int(0), crate::exactnum::rat(1, 2), 2);
        let cuts = vec![
            half_root.clone(),
            Surd::one() - half_root.clone(),
            Surd::from_rational(crate::exactnum::rat(1, 4)),
        ];
        let (h, c, trace) = reduce_tuple(&Surd::from_int(1), &cuts).unwrap();
        assert_eq!(trace.len(), 1);
        assert_eq!(h, Surd::from_rational(crate::exactnum::rat(3, 4)));
        assert_eq!(c.len(), 2);
        assert_eq!(
            c[0].clone() + c[1].clone(),
            Surd::from_rational(crate::exactnum::rat(1, 2))
        );
    }

    #[test]
    fn class_move_is_an_involution_and_preserves_invariants() {
        let mut seed: u64 = 0x9e3779b97f4a7c15;
        let mut next = move || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            seed
        };
        for _ in 0..50 {
            let n = 4 + (next() % 5) as usize;
            let coeffs: Vec<i128> = (0..n).map(|_| (next() % 9) as i128 - 4).collect();
            let v = ClassVector::new((next() % 12) as i128 + 1, coeffs);
            let i = (next() as usize) % n;
            let mut j = (next() as usize) % n;
            while j == i {
                j = (j + 1) % n;
            }
            let mut k = (next() as usize) % n;
            while k == i || k == j {
                k = (k + 1) % n;
            }
            let moved = class_move(&v, i, j, k).unwrap();
            assert_eq!(class_move(&moved, i, j, k).unwrap(), v);
            assert_eq!(3 * moved.d - moved.coeff_sum(), 3 * v.d - v.coeff_sum());
            assert_eq!(
                moved.d * moved.d - moved.coeff_sum_sq(),
                v.d * v.d - v.coeff_sum_sq()
            );
        }
    }

    #[test]
    fn endpoint_pattern() {
        let v = ClassVector::new(1, vec![1, 1, 0]);
        let moved = class_move(&v, 0, 1, 2).unwrap();
        assert_eq!(moved, ClassVector::new(0, vec![0, 0, -1]));
    }

    #[test]
    fn exceptionality_decisions() {
        let (ok, trace) = is_exceptional(&ClassVector::new(1, vec![1, 1])).unwrap();
        assert!(ok);
        let terminal = replay(&ClassVector::new(1, vec![1, 1]), &trace).unwrap();
        assert_eq!(terminal.d, 0);

        // The ellipsoid class of E(22, 9): degree 22, head weights of
        // (22, 13) and ellipsoid weights of (22, 9).
        let e229 = ClassVector::new(
            22,
            vec![13, 9, 4, 4, 1, 1, 1, 1, 1, 9, 9, 4, 4, 1, 1, 1, 1],
        );
        assert!(is_exceptional(&e229).unwrap().0);

        // Diophantine but not exceptional.
        let sham = ClassVector::new(5, vec![3, 3, 1, 1, 1, 1, 1, 1, 1, 1]);
        assert!(sham.satisfies_diophantine());
        assert!(!is_exceptional(&sham).unwrap().0);

        assert!(is_exceptional(&ClassVector::new(2, vec![2, 1])).is_err());
    }

    #[test]
    fn replay_rejects_corrupted_traces() {
        let (_, mut trace) = is_exceptional(&ClassVector::new(1, vec![1, 1])).unwrap();
        trace[0].defect += 1;
        assert!(replay(&ClassVector::new(1, vec![1, 1]), &trace).is_err());
    }

    #[test]
    fn capacities_agree_along_the_chain() {
        let a = parse_tuple("5: 2, 2, 2, 2, 2").unwrap();
        let b = parse_tuple("4: 2, 2, 1, 1, 1").unwrap();
        let c = parse_tuple("3: 1, 1, 1, 1").unwrap();
        assert!(capacity_invariance_check(&a, &b, 60).unwrap());
        assert!(capacity_invariance_check(&b, &c, 60).unwrap());
        assert!(capacity_invariance_check(&c, &c, 60).unwrap());
        let other = parse_tuple("3: 1, 1").unwrap();
        assert!(!capacity_invariance_check(&c, &other, 60).unwrap());
    }
}
