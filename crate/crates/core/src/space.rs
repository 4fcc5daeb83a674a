//! The finite totally ordered space `{1, ..., n}`, its locally closed
//! subsets (the intervals `[a,b]`), and the maximal boxes cut out by the
//! K-theory vanishing pattern of the representing objects.
//!
//! Intervals are ordered lexicographically by `(a, b)`. The position of an
//! interval in that order is its *index*, and every bitset in this crate
//! uses bit `i` for the interval with index `i`.

use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest `n` whose interval count `n(n+1)/2` fits in a 64-bit word.
pub const MAX_POINTS: usize = 10;

/// The `n`-point space with the Alexandrov topology of its total order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Space {
    n: usize,
}

impl Space {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_POINTS {
            return Err(Error::InvalidSpace { n, max: MAX_POINTS });
        }
        Ok(Space { n })
    }

    pub fn points(&self) -> usize {
        self.n
    }

    /// Number of nonempty locally closed subsets, `n(n+1)/2`.
    pub fn interval_count(&self) -> usize {
        self.n * (self.n + 1) / 2
    }

    /// Bitmask with one bit set per interval.
    pub fn full_mask(&self) -> u64 {
        let m = self.interval_count();
        if m == 64 {
            u64::MAX
        } else {
            (1u64 << m) - 1
        }
    }

    /// All intervals in canonical order.
    pub fn intervals(&self) -> Vec<Interval> {
        let mut out = Vec::with_capacity(self.interval_count());
        for a in 1..=self.n {
            for b in a..=self.n {
                out.push(Interval { a, b });
            }
        }
        out
    }

    pub fn interval(&self, a: usize, b: usize) -> Result<Interval> {
        let y = Interval { a, b };
        self.check(y)?;
        Ok(y)
    }

    pub fn contains(&self, y: Interval) -> bool {
        1 <= y.a && y.a <= y.b && y.b <= self.n
    }

    pub fn check(&self, y: Interval) -> Result<()> {
        if self.contains(y) {
            Ok(())
        } else {
            Err(Error::IntervalOutOfRange { a: y.a, b: y.b, n: self.n })
        }
    }

    /// Position of `y` in the canonical order.
    pub fn index_of(&self, y: Interval) -> Result<usize> {
        self.check(y)?;
        let (a, b, n) = (y.a, y.b, self.n);
        Ok((a - 1) * (n + 1) - (a - 1) * a / 2 + (b - a))
    }

    /// Inverse of [`Space::index_of`].
    pub fn interval_at(&self, index: usize) -> Option<Interval> {
        let mut rest = index;
        for a in 1..=self.n {
            let row = self.n - a + 1;
            if rest < row {
                return Some(Interval { a, b: a + rest });
            }
            rest -= row;
        }
        None
    }

    /// Bitmask of a set of intervals.
    pub fn mask_of<'a, I>(&self, intervals: I) -> Result<u64>
    where
        I: IntoIterator<Item = &'a Interval>,
    {
        let mut mask = 0u64;
        for y in intervals {
            mask |= 1u64 << self.index_of(*y)?;
        }
        Ok(mask)
    }

    /// Intervals whose bit is set in `mask`, in canonical order.
    pub fn intervals_in(&self, mask: u64) -> Vec<Interval> {
        self.intervals()
            .into_iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, y)| y)
            .collect()
    }

    /// [`box_parity`] restricted to intervals of this space.
    pub fn box_parity(&self, y: Interval, z: Interval) -> Result<Option<Parity>> {
        self.check(y)?;
        self.check(z)?;
        Ok(box_parity(y, z))
    }

    /// The maximal box `B_y`, members in canonical order.
    pub fn maximal_box(&self, y: Interval) -> Result<MaximalBox> {
        self.check(y)?;
        let members = self
            .intervals()
            .into_iter()
            .filter_map(|z| box_parity(y, z).map(|p| (z, p)))
            .collect();
        Ok(MaximalBox { base: y, members })
    }

    pub fn box_table(&self) -> BoxTable {
        BoxTable::new(*self)
    }
}

/// A nonempty interval `[a,b]` with `1 <= a <= b`. Membership in a
/// particular [`Space`] is checked by the space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interval {
    pub a: usize,
    pub b: usize,
}

impl Interval {
    pub fn new(a: usize, b: usize) -> Option<Self> {
        (1 <= a && a <= b).then_some(Interval { a, b })
    }

    pub fn len(&self) -> usize {
        self.b - self.a + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains_point(&self, x: usize) -> bool {
        self.a <= x && x <= self.b
    }

    pub fn is_subset(&self, other: &Interval) -> bool {
        other.a <= self.a && self.b <= other.b
    }

    pub fn intersection(&self, other: &Interval) -> Option<Interval> {
        Interval::new(self.a.max(other.a), self.b.min(other.b))
    }

    /// The union, if it is again an interval.
    pub fn union(&self, other: &Interval) -> Option<Interval> {
        let (lo, hi) = if self.a <= other.a { (self, other) } else { (other, self) };
        if hi.a <= lo.b + 1 {
            Interval::new(lo.a, lo.b.max(hi.b))
        } else {
            None
        }
    }

    /// `self \ other`, if it is a nonempty interval.
    pub fn difference(&self, other: &Interval) -> Option<Interval> {
        if self.intersection(other).is_none() {
            return Some(*self);
        }
        let left = (self.a < other.a).then(|| Interval { a: self.a, b: other.a - 1 });
        let right = (other.b < self.b).then(|| Interval { a: other.b + 1, b: self.b });
        match (left, right) {
            (Some(l), None) => Some(l),
            (None, Some(r)) => Some(r),
            _ => None,
        }
    }

    /// JSON object key form `"a-b"`.
    pub fn key(&self) -> String {
        format!("{}-{}", self.a, self.b)
    }

    pub fn parse_key(s: &str) -> Option<Interval> {
        let (a, b) = s.split_once('-')?;
        Interval::new(a.trim().parse().ok()?, b.trim().parse().ok()?)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.a, self.b)
    }
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.a, self.b].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [a, b] = <[usize; 2]>::deserialize(d)?;
        Interval::new(a, b).ok_or_else(|| D::Error::custom(format!("[{a},{b}] is not an interval")))
    }
}

/// Degree of the nonzero K-group, `Z[0]` or `Z[1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    Even = 0,
    Odd = 1,
}

impl Parity {
    pub fn value(self) -> u8 {
        self as u8
    }

    pub fn from_value(v: u8) -> Option<Parity> {
        match v {
            0 => Some(Parity::Even),
            1 => Some(Parity::Odd),
            _ => None,
        }
    }
}

impl Serialize for Parity {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.value().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Parity {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = u8::deserialize(d)?;
        Parity::from_value(v).ok_or_else(|| D::Error::custom(format!("parity must be 0 or 1, got {v}")))
    }
}

/// K-theory of the representing object of `y = [a,b]` evaluated at
/// `z = [c,d]`: `Some(Even)` if `c <= a <= d <= b`, `Some(Odd)` if
/// `a < c`, `b < d` and `c - 1 <= b`, `None` when it vanishes.
///
/// The two nonzero cases are exclusive since one needs `c <= a` and the
/// other `a < c`.
pub fn box_parity(y: Interval, z: Interval) -> Option<Parity> {
    let (a, b, c, d) = (y.a, y.b, z.a, z.b);
    if c <= a && a <= d && d <= b {
        Some(Parity::Even)
    } else if a < c && b < d && c <= b + 1 {
        Some(Parity::Odd)
    } else {
        None
    }
}

/// The maximal box `B_y`: every `z` at which the representing object of
/// `y` has nonzero K-theory, tagged with the degree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaximalBox {
    pub base: Interval,
    pub members: Vec<(Interval, Parity)>,
}

impl MaximalBox {
    pub fn contains(&self, z: Interval) -> bool {
        self.members.iter().any(|(m, _)| *m == z)
    }

    pub fn intervals(&self) -> impl Iterator<Item = Interval> + '_ {
        self.members.iter().map(|(z, _)| *z)
    }
}

/// Precomputed box masks for a space, used by every hot loop.
#[derive(Debug, Clone)]
pub struct BoxTable {
    space: Space,
    /// `boxes[j]` = bitmask of `B_{interval j}`.
    boxes: Vec<u64>,
    /// `owners[i]` = bitmask of all `j` with `interval i ∈ B_{interval j}`.
    owners: Vec<u64>,
}

impl BoxTable {
    pub fn new(space: Space) -> Self {
        let intervals = space.intervals();
        let m = intervals.len();
        let mut boxes = vec![0u64; m];
        let mut owners = vec![0u64; m];
        for (j, &y) in intervals.iter().enumerate() {
            for (i, &z) in intervals.iter().enumerate() {
                if box_parity(y, z).is_some() {
                    boxes[j] |= 1 << i;
                    owners[i] |= 1 << j;
                }
            }
        }
        BoxTable { space, boxes, owners }
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn len(&self) -> usize {
        self.boxes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    pub fn box_mask(&self, index: usize) -> u64 {
        self.boxes[index]
    }

    pub fn box_masks(&self) -> &[u64] {
        &self.boxes
    }

    pub fn owner_mask(&self, index: usize) -> u64 {
        self.owners[index]
    }

    /// Union of the boxes whose base index is set in `generators`.
    pub fn union_of_boxes(&self, generators: u64) -> u64 {
        let mut out = 0;
        let mut g = generators;
        while g != 0 {
            let j = g.trailing_zeros() as usize;
            out |= self.boxes[j];
            g &= g - 1;
        }
        out
    }

    /// Bases of all boxes fully contained in `bits`.
    pub fn boxes_inside(&self, bits: u64) -> u64 {
        let mut out = 0;
        for (j, &bx) in self.boxes.iter().enumerate() {
            if bx & !bits == 0 {
                out |= 1 << j;
            }
        }
        out
    }

    /// Largest union of boxes contained in `bits`.
    pub fn interior(&self, bits: u64) -> u64 {
        self.union_of_boxes(self.boxes_inside(bits))
    }
}
