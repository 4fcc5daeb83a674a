//! The lattice isomorphism between valid p-local tuples on the `n`-point
//! space and noncrossing partitions of `{1, ..., n+1}`.
//!
//! `psi` relates `a ~ b+1` exactly when the tuple vanishes at `[a,b]`.
//! A bigger support gives fewer relations and therefore a *finer*
//! partition, which is *larger* in the order of [`crate::ncp`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{self, FiniteLattice};
use crate::ncp::{self, NoncrossingPartition};
use crate::space::{Interval, Space, MAX_POINTS};
use crate::supports::{self, Limits, PLocalTuple, PrimeLabel, SupportTuple};

/// A split of the `k`-gon into a linear interval `inner` and its cyclically
/// connected complement `outer`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoBlockDecomposition {
    pub k: usize,
    pub inner: Vec<usize>,
    pub outer: Vec<usize>,
}

impl TwoBlockDecomposition {
    pub fn as_partition(&self) -> NoncrossingPartition {
        NoncrossingPartition::new(self.k, &[self.inner.clone(), self.outer.clone()])
            .expect("two arcs never cross")
    }

    /// The interval `[a,b]` with `inner = [a+1, b+1]`.
    pub fn interval(&self) -> Interval {
        Interval { a: self.inner[0] - 1, b: self.inner[self.inner.len() - 1] - 1 }
    }
}

/// Builds the partition generated by `a ~ b+1 ⟺ bit [a,b] unset`, checking
/// (not repairing) that the relation is already an equivalence relation
/// and that its classes do not cross.
pub(crate) fn relation_partition(space: Space, bits: u64) -> Result<NoncrossingPartition> {
    let n = space.points();
    let k = n + 1;
    let mut rel = vec![vec![false; k + 1]; k + 1];
    for x in 1..=k {
        rel[x][x] = true;
    }
    for (i, y) in space.intervals().into_iter().enumerate() {
        if bits >> i & 1 == 0 {
            rel[y.a][y.b + 1] = true;
            rel[y.b + 1][y.a] = true;
        }
    }
    for x in 1..=k {
        for y in 1..=k {
            if !rel[x][y] {
                continue;
            }
            for z in 1..=k {
                if rel[y][z] && !rel[x][z] {
                    return Err(Error::InvariantViolation(format!(
                        "vanishing relation is not transitive: {x} ~ {y} ~ {z} but {x} ≁ {z}"
                    )));
                }
            }
        }
    }
    let labels: Vec<usize> = (0..=k).map(|x| if x == 0 { 0 } else { (1..=k).find(|&r| rel[x][r]).unwrap() }).collect();
    NoncrossingPartition::from_labels(k, &labels).map_err(|e| match e {
        Error::Crossing { a, b, c, d } => {
            Error::InvariantViolation(format!("vanishing relation crosses: {a} ~ {c}, {b} ~ {d}"))
        }
        other => other,
    })
}

/// The noncrossing partition of `{1..n+1}` attached to a valid tuple.
pub fn psi(t: &PLocalTuple) -> Result<NoncrossingPartition> {
    if !t.is_valid() {
        return Err(Error::InvalidTuple);
    }
    relation_partition(t.space(), t.bits())
}

/// Inverse of [`psi`]: the tuple vanishing at `[a,b]` iff `a ~ b+1`.
pub fn psi_inverse(s: &NoncrossingPartition) -> Result<PLocalTuple> {
    let k = s.k();
    if !(2..=MAX_POINTS + 1).contains(&k) {
        return Err(Error::Precondition(format!("need 2 <= k <= {}, got k = {k}", MAX_POINTS + 1)));
    }
    let space = Space::new(k - 1)?;
    let labels = s.labels();
    let mut bits = 0u64;
    for (i, y) in space.intervals().into_iter().enumerate() {
        if labels[y.a] != labels[y.b + 1] {
            bits |= 1 << i;
        }
    }
    let t = PLocalTuple::from_bits(space, bits)?;
    if !t.is_valid() {
        return Err(Error::InvariantViolation(format!("psi_inverse({s}) fails the closure equation")));
    }
    Ok(t)
}

/// `[a,b] ↦` the split of the `(n+1)`-gon into `[a+1, b+1]` and the rest.
pub fn interval_to_two_block(space: Space, y: Interval) -> Result<TwoBlockDecomposition> {
    space.check(y)?;
    let k = space.points() + 1;
    let inner: Vec<usize> = (y.a + 1..=y.b + 1).collect();
    let outer: Vec<usize> = (1..=k).filter(|x| !inner.contains(x)).collect();
    Ok(TwoBlockDecomposition { k, inner, outer })
}

/// Two-block decomposition coarsening `s` that separates `a` from `b+1`.
///
/// Starting at vertex `a`, absorb neighbours alternately clockwise and
/// counterclockwise; each direction stops at the first vertex of the block
/// of `b+1`. The absorbed arc and its complement form the decomposition,
/// returned as the interval `[c,d]` whose inner arc is `[c+1, d+1]`.
pub fn separating_decomposition(s: &NoncrossingPartition, a: usize, b: usize) -> Result<Interval> {
    let k = s.k();
    if k < 2 || a < 1 || a > b || b + 1 > k {
        return Err(Error::Precondition(format!("[{a},{b}] is not an interval of the {}-point space", k.saturating_sub(1))));
    }
    let labels = s.labels();
    let target = labels[b + 1];
    if labels[a] == target {
        return Err(Error::Precondition(format!("{a} and {} lie in the same block", b + 1)));
    }
    let cw = |x: usize| x % k + 1;
    let ccw = |x: usize| if x == 1 { k } else { x - 1 };
    let mut absorbed = vec![false; k + 1];
    absorbed[a] = true;
    let (mut right, mut left) = (a, a);
    let (mut right_open, mut left_open) = (true, true);
    while right_open || left_open {
        if right_open {
            let next = cw(right);
            if labels[next] == target || absorbed[next] {
                right_open = false;
            } else {
                absorbed[next] = true;
                right = next;
            }
        }
        if left_open {
            let next = ccw(left);
            if labels[next] == target || absorbed[next] {
                left_open = false;
            } else {
                absorbed[next] = true;
                left = next;
            }
        }
    }
    // The inner arc is whichever side avoids vertex 1.
    let inner: Vec<usize> = (2..=k).filter(|&x| absorbed[x] != absorbed[1]).collect();
    debug_assert!(inner.windows(2).all(|w| w[1] == w[0] + 1));
    Ok(Interval { a: inner[0] - 1, b: inner[inner.len() - 1] - 1 })
}

/// All valid p-local tuples ordered by pointwise containment.
pub fn plocal_lattice(space: Space, limits: &Limits) -> Result<FiniteLattice<PLocalTuple>> {
    let elements = supports::enumerate_valid_plocal(space, limits)?;
    FiniteLattice::from_order(elements, |x, y| x.is_subset(y))
}

/// `NC_k` ordered by [`ncp::refinement_leq`].
pub fn ncp_lattice(k: usize, max_k: usize) -> Result<FiniteLattice<NoncrossingPartition>> {
    let elements = ncp::enumerate_ncp(k, max_k)?;
    FiniteLattice::from_order(elements, |x, y| ncp::refinement_leq(x, y).expect("same k"))
}

/// Meet of two valid tuples: the union of every maximal box inside their
/// pointwise intersection.
pub fn box_union_meet(x: &PLocalTuple, y: &PLocalTuple) -> Result<PLocalTuple> {
    if x.space() != y.space() {
        return Err(Error::Mismatch);
    }
    let table = x.space().box_table();
    PLocalTuple::from_bits(x.space(), table.interior(x.bits() & y.bits()))
}

/// Join of two valid tuples: their pointwise union.
pub fn union_join(x: &PLocalTuple, y: &PLocalTuple) -> Result<PLocalTuple> {
    x.union(y)
}

/// All valid support tuples over `universe`, ordered pointwise.
///
/// Elements are listed in mixed-radix order over the per-prime slices, the
/// first universe prime being the most significant digit.
pub fn product_lattice(space: Space, universe: &[PrimeLabel], limits: &Limits) -> Result<FiniteLattice<SupportTuple>> {
    let mut universe = universe.to_vec();
    universe.sort();
    universe.dedup();
    let factor = supports::enumerate_valid_plocal(space, limits)?;
    let size = (factor.len() as u64).checked_pow(universe.len() as u32).unwrap_or(u64::MAX);
    if size > lattice::MAX_ELEMENTS as u64 {
        return Err(Error::LimitExceeded { what: "product lattice size", value: size, limit: lattice::MAX_ELEMENTS as u64 });
    }
    let mut elements = Vec::with_capacity(size as usize);
    let mut digits = vec![0usize; universe.len()];
    for _ in 0..size {
        let slices = digits.iter().map(|&d| factor[d].bits()).collect();
        elements.push(SupportTuple::from_slices(space, universe.clone(), slices)?);
        for d in digits.iter_mut().rev() {
            *d += 1;
            if *d < factor.len() {
                break;
            }
            *d = 0;
        }
    }
    FiniteLattice::from_order(elements, |x, y| x.is_subset(y))
}
