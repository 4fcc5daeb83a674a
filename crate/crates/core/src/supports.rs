//! Support tuples: for every interval `Y`, the set of primes at which the
//! subquotient at `Y` has nonzero K-theory with residue-field
//! coefficients.
//!
//! A tuple is *valid* (is the support of a localizing subcategory) iff
//! every slice at a fixed prime satisfies the closure equation
//!
//! ```text
//! U_Y = ⋃_{Z : Y ∈ B_Z} ⋂_{V ∈ B_Z} U_V
//! ```
//!
//! For a single prime this says a boolean tuple is a union of maximal
//! boxes. [`PLocalTuple`] stores one slice as a bitset over the canonical
//! interval order; [`SupportTuple`] stores one slice per prime of a
//! declared finite universe.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::de::Error as _;
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::space::{BoxTable, Interval, Space};

/// Enumeration budgets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest `n` accepted by the structural enumeration.
    pub max_n: usize,
    /// Largest `m = n(n+1)/2` accepted by the brute-force filter, i.e. it
    /// scans at most `2^max_bruteforce_bits` tuples.
    pub max_bruteforce_bits: u32,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_n: 8, max_bruteforce_bits: 22 }
    }
}

/// A point of `Spec Z`: `0` for the generic point, otherwise a prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimeLabel(u64);

impl PrimeLabel {
    pub const GENERIC: PrimeLabel = PrimeLabel(0);

    pub fn new(value: u64) -> Result<Self> {
        if value == 0 || is_prime(value) {
            Ok(PrimeLabel(value))
        } else {
            Err(Error::NotPrime(value))
        }
    }

    pub fn value(self) -> u64 {
        self.0
    }

    pub fn is_generic(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for PrimeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl Serialize for PrimeLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PrimeLabel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        PrimeLabel::new(u64::deserialize(d)?).map_err(D::Error::custom)
    }
}

pub(crate) fn is_prime(v: u64) -> bool {
    if v < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= v {
        if v.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Parses and normalizes a prime universe: sorted, without duplicates.
pub fn universe_from_values(values: &[u64]) -> Result<Vec<PrimeLabel>> {
    let set: BTreeSet<PrimeLabel> = values.iter().map(|&v| PrimeLabel::new(v)).collect::<Result<_>>()?;
    Ok(set.into_iter().collect())
}

/// A support tuple with every entry `{p}` or `∅` for one fixed prime `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PLocalTuple {
    space: Space,
    bits: u64,
}

impl PLocalTuple {
    pub fn from_bits(space: Space, bits: u64) -> Result<Self> {
        if bits & !space.full_mask() != 0 {
            return Err(Error::TupleLength {
                n: space.points(),
                expected: space.interval_count(),
                got: 64 - bits.leading_zeros() as usize,
            });
        }
        Ok(PLocalTuple { space, bits })
    }

    pub fn from_bools(space: Space, values: &[bool]) -> Result<Self> {
        if values.len() != space.interval_count() {
            return Err(Error::TupleLength {
                n: space.points(),
                expected: space.interval_count(),
                got: values.len(),
            });
        }
        let bits = values.iter().enumerate().filter(|(_, &v)| v).fold(0u64, |m, (i, _)| m | 1 << i);
        Ok(PLocalTuple { space, bits })
    }

    /// Tuple supported exactly on `support`.
    pub fn from_intervals(space: Space, support: &[Interval]) -> Result<Self> {
        Ok(PLocalTuple { space, bits: space.mask_of(support)? })
    }

    pub fn empty(space: Space) -> Self {
        PLocalTuple { space, bits: 0 }
    }

    pub fn full(space: Space) -> Self {
        PLocalTuple { space, bits: space.full_mask() }
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn contains(&self, y: Interval) -> bool {
        self.space.index_of(y).map(|i| self.bits >> i & 1 == 1).unwrap_or(false)
    }

    /// Intervals where the tuple is supported, canonical order.
    pub fn support(&self) -> Vec<Interval> {
        self.space.intervals_in(self.bits)
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.space.interval_count()).map(|i| self.bits >> i & 1 == 1).collect()
    }

    /// Pointwise containment.
    pub fn is_subset(&self, other: &PLocalTuple) -> bool {
        self.space == other.space && self.bits & !other.bits == 0
    }

    pub fn union(&self, other: &PLocalTuple) -> Result<PLocalTuple> {
        if self.space != other.space {
            return Err(Error::Mismatch);
        }
        Ok(PLocalTuple { space: self.space, bits: self.bits | other.bits })
    }

    pub fn is_valid(&self) -> bool {
        is_valid_plocal(self)
    }
}

#[derive(Serialize, Deserialize)]
struct PLocalJson {
    n: usize,
    support: Vec<Interval>,
}

impl Serialize for PLocalTuple {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PLocalJson { n: self.space.points(), support: self.support() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PLocalTuple {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = PLocalJson::deserialize(d)?;
        let space = Space::new(raw.n).map_err(D::Error::custom)?;
        PLocalTuple::from_intervals(space, &raw.support).map_err(D::Error::custom)
    }
}

/// Closure equation on a single slice, in the literal union-of-intersections
/// form: for every `Y`, `t(Y)` equals `OR_{Z : Y ∈ B_Z} AND_{V ∈ B_Z} t(V)`.
pub fn closure_holds(table: &BoxTable, bits: u64) -> bool {
    (0..table.len()).all(|i| {
        let lhs = bits >> i & 1 == 1;
        let mut owners = table.owner_mask(i);
        let mut rhs = false;
        while owners != 0 {
            let j = owners.trailing_zeros() as usize;
            owners &= owners - 1;
            if table.box_mask(j) & !bits == 0 {
                rhs = true;
                break;
            }
        }
        lhs == rhs
    })
}

/// The one-sided form of the closure equation where `Y` itself is dropped
/// from each intersection: `t(Y) ⟹ OR_{Z : Y ∈ B_Z} AND_{V ∈ B_Z, V ≠ Y} t(V)`.
/// Equivalent to [`closure_holds`].
pub fn closure_holds_reduced(table: &BoxTable, bits: u64) -> bool {
    (0..table.len()).all(|i| {
        if bits >> i & 1 == 0 {
            return true;
        }
        let mut owners = table.owner_mask(i);
        while owners != 0 {
            let j = owners.trailing_zeros() as usize;
            owners &= owners - 1;
            let others = table.box_mask(j) & !(1u64 << i);
            if others & !bits == 0 {
                return true;
            }
        }
        false
    })
}

pub fn is_valid_plocal(t: &PLocalTuple) -> bool {
    closure_holds(&t.space.box_table(), t.bits)
}

/// Indicator of the union of the maximal boxes based at `gens`.
pub fn tuple_from_generators(space: Space, gens: &[Interval]) -> Result<PLocalTuple> {
    let g = space.mask_of(gens)?;
    Ok(PLocalTuple { space, bits: space.box_table().union_of_boxes(g) })
}

/// `V_Y = ⋂_{Z ∈ B_Y} U_Z`: the intervals whose whole box lies in the support.
pub fn v_from_u(t: &PLocalTuple) -> Vec<Interval> {
    t.space.intervals_in(t.space.box_table().boxes_inside(t.bits))
}

/// `U_Y` is nonempty iff `Y ∈ B_W` for some `W ∈ v`.
pub fn u_from_v(space: Space, v: &[Interval]) -> Result<PLocalTuple> {
    tuple_from_generators(space, v)
}

/// All valid p-local tuples, as the closure of `{∅}` under union with
/// maximal boxes. Sorted by bitset value.
pub fn enumerate_valid_plocal(space: Space, limits: &Limits) -> Result<Vec<PLocalTuple>> {
    if space.points() > limits.max_n {
        return Err(Error::LimitExceeded {
            what: "n",
            value: space.points() as u64,
            limit: limits.max_n as u64,
        });
    }
    let table = space.box_table();
    let mut seen: HashSet<u64> = HashSet::from([0u64]);
    let mut frontier = vec![0u64];
    while let Some(cur) = frontier.pop() {
        for &bx in table.box_masks() {
            let next = cur | bx;
            if seen.insert(next) {
                frontier.push(next);
            }
        }
    }
    let mut all: Vec<u64> = seen.into_iter().collect();
    all.sort_unstable();
    Ok(all.into_iter().map(|bits| PLocalTuple { space, bits }).collect())
}

/// Every boolean tuple filtered through [`closure_holds`]. Sorted by
/// bitset value, so the result is list-comparable with
/// [`enumerate_valid_plocal`].
pub fn brute_force_valid_plocal(space: Space, limits: &Limits) -> Result<Vec<PLocalTuple>> {
    let m = space.interval_count() as u32;
    if m > limits.max_bruteforce_bits {
        return Err(Error::LimitExceeded {
            what: "brute-force bits",
            value: m as u64,
            limit: limits.max_bruteforce_bits as u64,
        });
    }
    let table = space.box_table();
    Ok((0..1u64 << m)
        .filter(|&bits| closure_holds(&table, bits))
        .map(|bits| PLocalTuple { space, bits })
        .collect())
}

/// Whether `bits` satisfies the three support inclusions coming from the
/// six-term sequence of every triangle `[x1,x2-1] → [x1,x3-1] → [x2,x3-1]`,
/// `1 <= x1 < x2 < x3 <= n+1`: each entry lies in the union of the other
/// two. For one slice this means exactly one of the three cannot be set.
pub fn triangle_inclusions_hold(space: Space, bits: u64) -> bool {
    let n = space.points();
    let bit = |a: usize, b: usize| -> bool {
        let i = space.index_of(Interval { a, b }).expect("interval in range");
        bits >> i & 1 == 1
    };
    for x1 in 1..=n + 1 {
        for x2 in x1 + 1..=n + 1 {
            for x3 in x2 + 1..=n + 1 {
                let set = [bit(x1, x2 - 1), bit(x2, x3 - 1), bit(x1, x3 - 1)];
                if set.iter().filter(|&&v| v).count() == 1 {
                    return false;
                }
            }
        }
    }
    true
}

/// A support tuple over a finite, sorted universe of primes.
///
/// Stored as one slice bitmask per universe prime; `slices[k]` has bit `i`
/// set iff `universe[k]` lies in the set attached to interval `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SupportTuple {
    space: Space,
    universe: Vec<PrimeLabel>,
    slices: Vec<u64>,
}

impl SupportTuple {
    pub fn empty(space: Space, universe: Vec<PrimeLabel>) -> Result<Self> {
        let slices = vec![0; universe.len()];
        Self::from_slices(space, universe, slices)
    }

    /// Builds a tuple from one bitmask per universe prime.
    pub fn from_slices(space: Space, universe: Vec<PrimeLabel>, slices: Vec<u64>) -> Result<Self> {
        if !universe.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Precondition("universe must be strictly increasing".into()));
        }
        if slices.len() != universe.len() {
            return Err(Error::Mismatch);
        }
        for &s in &slices {
            PLocalTuple::from_bits(space, s)?;
        }
        Ok(SupportTuple { space, universe, slices })
    }

    /// Builds a tuple from `(interval, primes)` entries; missing intervals
    /// get the empty set.
    pub fn from_sets<'a, I>(space: Space, universe: Vec<PrimeLabel>, sets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Interval, &'a [PrimeLabel])>,
    {
        let mut t = Self::empty(space, universe)?;
        for (y, primes) in sets {
            let i = space.index_of(y)?;
            for p in primes {
                let k = t.position(*p).ok_or(Error::OutsideUniverse(p.value()))?;
                t.slices[k] |= 1 << i;
            }
        }
        Ok(t)
    }

    /// Tensor of per-prime p-local tuples, one per universe prime.
    pub fn from_plocal(universe: Vec<PrimeLabel>, parts: &[PLocalTuple]) -> Result<Self> {
        let space = parts.first().map(|p| p.space).ok_or(Error::Mismatch)?;
        if parts.iter().any(|p| p.space != space) {
            return Err(Error::Mismatch);
        }
        Self::from_slices(space, universe, parts.iter().map(|p| p.bits).collect())
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn universe(&self) -> &[PrimeLabel] {
        &self.universe
    }

    pub fn slice_bits(&self) -> &[u64] {
        &self.slices
    }

    fn position(&self, p: PrimeLabel) -> Option<usize> {
        self.universe.binary_search(&p).ok()
    }

    /// The set attached to `y`.
    pub fn set_at(&self, y: Interval) -> Result<Vec<PrimeLabel>> {
        let i = self.space.index_of(y)?;
        Ok(self
            .universe
            .iter()
            .zip(&self.slices)
            .filter(|(_, s)| *s >> i & 1 == 1)
            .map(|(p, _)| *p)
            .collect())
    }

    /// The boolean tuple `Y ↦ (p ∈ U_Y)`.
    pub fn slice(&self, p: PrimeLabel) -> Result<PLocalTuple> {
        let k = self.position(p).ok_or(Error::OutsideUniverse(p.value()))?;
        Ok(PLocalTuple { space: self.space, bits: self.slices[k] })
    }

    pub fn slices(&self) -> impl Iterator<Item = (PrimeLabel, PLocalTuple)> + '_ {
        let space = self.space;
        self.universe.iter().zip(&self.slices).map(move |(p, &bits)| (*p, PLocalTuple { space, bits }))
    }

    /// Pointwise inclusion of sets.
    pub fn is_subset(&self, other: &SupportTuple) -> bool {
        self.space == other.space
            && self.universe == other.universe
            && self.slices.iter().zip(&other.slices).all(|(a, b)| a & !b == 0)
    }

    pub fn is_valid(&self) -> bool {
        is_valid(self)
    }
}

impl Serialize for SupportTuple {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        struct Sets<'a>(&'a SupportTuple);
        impl Serialize for Sets<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let t = self.0;
                let ivs = t.space.intervals();
                let mut map = s.serialize_map(Some(ivs.len()))?;
                for y in ivs {
                    map.serialize_entry(&y.key(), &t.set_at(y).expect("own interval"))?;
                }
                map.end()
            }
        }
        let mut map = s.serialize_map(Some(3))?;
        map.serialize_entry("n", &self.space.points())?;
        map.serialize_entry("universe", &self.universe)?;
        map.serialize_entry("sets", &Sets(self))?;
        map.end()
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SupportJson {
    n: usize,
    universe: Vec<PrimeLabel>,
    #[serde(default)]
    sets: BTreeMap<String, Vec<PrimeLabel>>,
}

impl<'de> Deserialize<'de> for SupportTuple {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = SupportJson::deserialize(d)?;
        let space = Space::new(raw.n).map_err(D::Error::custom)?;
        let mut universe = raw.universe;
        universe.sort();
        universe.dedup();
        let mut entries = Vec::with_capacity(raw.sets.len());
        for (key, primes) in &raw.sets {
            let y = Interval::parse_key(key).ok_or_else(|| D::Error::custom(format!("bad interval key {key:?}")))?;
            entries.push((y, primes.as_slice()));
        }
        SupportTuple::from_sets(space, universe, entries).map_err(D::Error::custom)
    }
}

/// A support tuple is valid iff each of its prime slices is.
pub fn is_valid(t: &SupportTuple) -> bool {
    let table = t.space.box_table();
    t.slices.iter().all(|&s| closure_holds(&table, s))
}

/// The two-point (Sierpiński) criterion: with `U_{2}`, `U_{1,2}`, `U_{1}`
/// the three entries, each lies in the union of the other two.
pub fn sierpinski_condition(t: &SupportTuple) -> Result<bool> {
    if t.space.points() != 2 {
        return Err(Error::Precondition("the two-point criterion needs n = 2".into()));
    }
    let s = t.space;
    let idx = [
        s.index_of(Interval { a: 2, b: 2 })?,
        s.index_of(Interval { a: 1, b: 2 })?,
        s.index_of(Interval { a: 1, b: 1 })?,
    ];
    Ok(t.slices.iter().all(|&bits| {
        let on = idx.iter().filter(|&&i| bits >> i & 1 == 1).count();
        on != 1
    }))
}

/// A subset of `Spec Z`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectrumSet {
    All,
    Finite(BTreeSet<PrimeLabel>),
}

impl SpectrumSet {
    pub fn contains(&self, p: PrimeLabel) -> bool {
        match self {
            SpectrumSet::All => true,
            SpectrumSet::Finite(s) => s.contains(&p),
        }
    }

    /// The part of the set visible inside a finite universe.
    pub fn restrict(&self, universe: &[PrimeLabel]) -> Vec<PrimeLabel> {
        universe.iter().copied().filter(|&p| self.contains(p)).collect()
    }
}

/// A countable abelian group of the form `Z^r ⊕ Q^s ⊕ ⨁ Z/p^k`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FgGroup {
    pub free_rank: usize,
    pub torsion: Vec<(u64, u32)>,
    pub rational_rank: usize,
}

impl FgGroup {
    pub fn new(free_rank: usize, torsion: Vec<(u64, u32)>, rational_rank: usize) -> Result<Self> {
        for &(base, exponent) in &torsion {
            if !is_prime(base) || exponent == 0 {
                return Err(Error::NotPrimePower { base, exponent });
            }
        }
        Ok(FgGroup { free_rank, torsion, rational_rank })
    }

    pub fn trivial() -> Self {
        FgGroup::default()
    }

    pub fn integers() -> Self {
        FgGroup { free_rank: 1, ..FgGroup::default() }
    }

    pub fn rationals() -> Self {
        FgGroup { rational_rank: 1, ..FgGroup::default() }
    }

    /// `Z/m` split into its primary parts; `m = 0` gives `Z`.
    pub fn cyclic(m: u64) -> Self {
        if m == 0 {
            return FgGroup::integers();
        }
        let mut torsion = Vec::new();
        let mut rest = m;
        let mut p = 2;
        while rest > 1 {
            if p * p > rest {
                torsion.push((rest, 1));
                break;
            }
            let mut k = 0;
            while rest.is_multiple_of(p) {
                rest /= p;
                k += 1;
            }
            if k > 0 {
                torsion.push((p, k));
            }
            p += 1;
        }
        FgGroup { torsion, ..FgGroup::default() }
    }
}

/// `supp_Z G`: the primes (and the generic point) whose residue field
/// appears in a minimal injective resolution of `G`.
///
/// A free summand resolves as `Z ↪ Q ↠ Q/Z`, and `Q/Z` contains every
/// Prüfer group, so it hits all of `Spec Z`. `Z/p^k` embeds in its Prüfer
/// group and contributes `p`; `Q` is injective and contributes `0`.
pub fn supp_of_group(g: &FgGroup) -> SpectrumSet {
    if g.free_rank > 0 {
        return SpectrumSet::All;
    }
    let mut out: BTreeSet<PrimeLabel> = g.torsion.iter().map(|&(p, _)| PrimeLabel(p)).collect();
    if g.rational_rank > 0 {
        out.insert(PrimeLabel::GENERIC);
    }
    SpectrumSet::Finite(out)
}
