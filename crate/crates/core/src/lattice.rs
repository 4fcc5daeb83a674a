//! Explicit finite lattices.
//!
//! A [`FiniteLattice`] is built from an element list and an order relation.
//! Construction checks the partial-order axioms, derives every meet and
//! join by scanning common bounds, and rejects the input with a witness
//! pair if some bound is missing. Meet/join tables are then kept for O(1)
//! queries.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::hash::Hash;

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest lattice the engine will materialize (meet/join tables are
/// quadratic in the size).
pub const MAX_ELEMENTS: usize = 2048;

/// Step budget for a single isomorphism search.
pub const MAX_ISO_STEPS: u64 = 20_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
struct BitMatrix {
    words: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    fn new(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        BitMatrix { words, data: vec![0; words * n] }
    }

    fn set(&mut self, row: usize, col: usize) {
        self.data[row * self.words + col / 64] |= 1 << (col % 64);
    }

    fn get(&self, row: usize, col: usize) -> bool {
        self.data[row * self.words + col / 64] >> (col % 64) & 1 == 1
    }

    fn row(&self, row: usize) -> &[u64] {
        &self.data[row * self.words..(row + 1) * self.words]
    }

    fn count(&self, row: usize) -> u32 {
        self.row(row).iter().map(|w| w.count_ones()).sum()
    }
}

fn for_each_bit(words: &[u64], mut f: impl FnMut(usize)) {
    for (wi, &w) in words.iter().enumerate() {
        let mut w = w;
        while w != 0 {
            f(wi * 64 + w.trailing_zeros() as usize);
            w &= w - 1;
        }
    }
}

/// Result of a distributivity check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Distributivity {
    Distributive,
    /// Lexicographically first `(x, y, z)` (by element index) with
    /// `x ∧ (y ∨ z) ≠ (x ∧ y) ∨ (x ∧ z)`.
    Witness(usize, usize, usize),
}

impl Distributivity {
    pub fn is_distributive(&self) -> bool {
        matches!(self, Distributivity::Distributive)
    }
}

#[derive(Debug, Clone)]
pub struct FiniteLattice<K> {
    elements: Vec<K>,
    index: HashMap<K, usize>,
    /// `down` row `i` holds `{ j : j ≤ i }`, `up` row `i` holds `{ j : i ≤ j }`.
    down: BitMatrix,
    up: BitMatrix,
    meet: Vec<u32>,
    join: Vec<u32>,
    bottom: usize,
    top: usize,
}

impl<K: Clone + Eq + Hash> FiniteLattice<K> {
    /// Builds a lattice from elements and an order predicate `leq(x, y)`.
    pub fn from_order<F>(elements: Vec<K>, leq: F) -> Result<Self>
    where
        F: Fn(&K, &K) -> bool,
    {
        let n = elements.len();
        check_size(n)?;
        let mut rel = vec![false; n * n];
        for i in 0..n {
            for j in 0..n {
                rel[i * n + j] = leq(&elements[i], &elements[j]);
            }
        }
        Self::from_relation(elements, |i, j| rel[i * n + j])
    }

    /// Builds a lattice from elements and an order on their indices.
    pub fn from_relation<F>(elements: Vec<K>, leq: F) -> Result<Self>
    where
        F: Fn(usize, usize) -> bool,
    {
        let n = elements.len();
        check_size(n)?;
        if n == 0 {
            return Err(Error::NotPartialOrder("empty element list".into()));
        }
        let mut index = HashMap::with_capacity(n);
        for (i, e) in elements.iter().enumerate() {
            if index.insert(e.clone(), i).is_some() {
                return Err(Error::NotPartialOrder(format!("element {i} is a duplicate")));
            }
        }
        let mut down = BitMatrix::new(n);
        let mut up = BitMatrix::new(n);
        for i in 0..n {
            for j in 0..n {
                if leq(i, j) {
                    down.set(j, i);
                    up.set(i, j);
                }
            }
        }
        for i in 0..n {
            if !down.get(i, i) {
                return Err(Error::NotPartialOrder(format!("element {i} is not ≤ itself")));
            }
            for j in i + 1..n {
                if down.get(i, j) && down.get(j, i) {
                    return Err(Error::NotPartialOrder(format!("elements {i} and {j} are ≤ each other")));
                }
            }
        }
        // Transitive iff every element below i has its down-set inside i's.
        for i in 0..n {
            let di = down.row(i).to_vec();
            let mut bad = None;
            for_each_bit(&di, |j| {
                if bad.is_none() && down.row(j).iter().zip(&di).any(|(a, b)| a & !b != 0) {
                    bad = Some(j);
                }
            });
            if let Some(j) = bad {
                return Err(Error::NotPartialOrder(format!("transitivity fails below {j} ≤ {i}")));
            }
        }

        let down_count: Vec<u32> = (0..n).map(|i| down.count(i)).collect();
        let up_count: Vec<u32> = (0..n).map(|i| up.count(i)).collect();
        let mut meet = vec![0u32; n * n];
        let mut join = vec![0u32; n * n];
        let mut common = vec![0u64; down.words];
        for x in 0..n {
            for y in x..n {
                for (c, (a, b)) in common.iter_mut().zip(down.row(x).iter().zip(down.row(y))) {
                    *c = a & b;
                }
                let m = greatest(&common, &down_count).ok_or(Error::NotLattice(x, y, "meet"))?;
                meet[x * n + y] = m as u32;
                meet[y * n + x] = m as u32;

                for (c, (a, b)) in common.iter_mut().zip(up.row(x).iter().zip(up.row(y))) {
                    *c = a & b;
                }
                let j = greatest(&common, &up_count).ok_or(Error::NotLattice(x, y, "join"))?;
                join[x * n + y] = j as u32;
                join[y * n + x] = j as u32;
            }
        }
        let bottom = (0..n).find(|&i| up_count[i] as usize == n).expect("lattice has a bottom");
        let top = (0..n).find(|&i| down_count[i] as usize == n).expect("lattice has a top");
        Ok(FiniteLattice { elements, index, down, up, meet, join, bottom, top })
    }

    pub fn index_of(&self, key: &K) -> Option<usize> {
        self.index.get(key).copied()
    }

    /// The order-dual lattice on the same elements.
    pub fn dual(&self) -> FiniteLattice<K> {
        FiniteLattice {
            elements: self.elements.clone(),
            index: self.index.clone(),
            down: self.up.clone(),
            up: self.down.clone(),
            meet: self.join.clone(),
            join: self.meet.clone(),
            bottom: self.top,
            top: self.bottom,
        }
    }

    /// Direct product with componentwise order, elements in row-major order.
    pub fn product<K2: Clone + Eq + Hash>(&self, other: &FiniteLattice<K2>) -> Result<FiniteLattice<(K, K2)>> {
        let (n1, n2) = (self.len(), other.len());
        check_size(n1 * n2)?;
        let mut elements = Vec::with_capacity(n1 * n2);
        for a in &self.elements {
            for b in &other.elements {
                elements.push((a.clone(), b.clone()));
            }
        }
        FiniteLattice::from_relation(elements, |i, j| {
            self.leq(i / n2, j / n2) && other.leq(i % n2, j % n2)
        })
    }

    /// Relabels every element; `f` must be injective.
    pub fn map_keys<K2: Clone + Eq + Hash, F: Fn(&K) -> K2>(&self, f: F) -> Result<FiniteLattice<K2>> {
        let elements: Vec<K2> = self.elements.iter().map(f).collect();
        let mut index = HashMap::with_capacity(elements.len());
        for (i, e) in elements.iter().enumerate() {
            if index.insert(e.clone(), i).is_some() {
                return Err(Error::Precondition("relabelling is not injective".into()));
            }
        }
        Ok(FiniteLattice {
            elements,
            index,
            down: self.down.clone(),
            up: self.up.clone(),
            meet: self.meet.clone(),
            join: self.join.clone(),
            bottom: self.bottom,
            top: self.top,
        })
    }
}

/// The element of `set` with the largest `weight`, if its weight equals
/// `|set|` (i.e. its bound-set is all of `set`).
fn greatest(set: &[u64], weight: &[u32]) -> Option<usize> {
    let size: u32 = set.iter().map(|w| w.count_ones()).sum();
    let mut best: Option<usize> = None;
    for_each_bit(set, |z| {
        if best.is_none_or(|b| weight[z] > weight[b]) {
            best = Some(z);
        }
    });
    best.filter(|&b| weight[b] == size)
}

fn check_size(n: usize) -> Result<()> {
    if n > MAX_ELEMENTS {
        return Err(Error::LimitExceeded { what: "lattice size", value: n as u64, limit: MAX_ELEMENTS as u64 });
    }
    Ok(())
}

impl<K> FiniteLattice<K> {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[K] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &K {
        &self.elements[i]
    }

    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.down.get(y, x)
    }

    pub fn meet(&self, x: usize, y: usize) -> usize {
        self.meet[x * self.len() + y] as usize
    }

    pub fn join(&self, x: usize, y: usize) -> usize {
        self.join[x * self.len() + y] as usize
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    pub fn top(&self) -> usize {
        self.top
    }

    /// Number of elements `≤ x`.
    pub fn down_size(&self, x: usize) -> usize {
        self.down.count(x) as usize
    }

    pub fn up_size(&self, x: usize) -> usize {
        self.up.count(x) as usize
    }

    /// Elements covered by `y`.
    pub fn lower_covers(&self, y: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for_each_bit(self.down.row(y), |x| {
            if x != y {
                // x ⋖ y iff nothing else lies in [x, y].
                let between: u32 = self
                    .up
                    .row(x)
                    .iter()
                    .zip(self.down.row(y))
                    .map(|(a, b)| (a & b).count_ones())
                    .sum();
                if between == 2 {
                    out.push(x);
                }
            }
        });
        out
    }

    pub fn upper_covers(&self, x: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for_each_bit(self.up.row(x), |y| {
            if x != y {
                let between: u32 = self
                    .up
                    .row(x)
                    .iter()
                    .zip(self.down.row(y))
                    .map(|(a, b)| (a & b).count_ones())
                    .sum();
                if between == 2 {
                    out.push(y);
                }
            }
        });
        out
    }

    /// Elements with exactly one lower cover, in index order.
    pub fn join_irreducibles(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.lower_covers(i).len() == 1).collect()
    }

    /// Covering pairs `(x, y)`, `x ⋖ y`, sorted.
    pub fn hasse_edges(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> =
            (0..self.len()).flat_map(|y| self.lower_covers(y).into_iter().map(move |x| (x, y))).collect();
        out.sort_unstable();
        out
    }

    /// Length of the longest chain from the bottom to each element.
    pub fn ranks(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by_key(|&i| self.down.count(i));
        let mut rank = vec![0usize; self.len()];
        for &y in &order {
            rank[y] = self.lower_covers(y).iter().map(|&x| rank[x] + 1).max().unwrap_or(0);
        }
        rank
    }

    pub fn is_distributive(&self) -> Distributivity {
        let n = self.len();
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let lhs = self.meet(x, self.join(y, z));
                    let rhs = self.join(self.meet(x, y), self.meet(x, z));
                    if lhs != rhs {
                        return Distributivity::Witness(x, y, z);
                    }
                }
            }
        }
        Distributivity::Distributive
    }

    /// Per-element isomorphism invariants.
    fn signatures(&self) -> Vec<[usize; 6]> {
        let ranks = self.ranks();
        let dual_ranks = {
            let mut order: Vec<usize> = (0..self.len()).collect();
            order.sort_by_key(|&i| self.up.count(i));
            let mut r = vec![0usize; self.len()];
            for &x in &order {
                r[x] = self.upper_covers(x).iter().map(|&y| r[y] + 1).max().unwrap_or(0);
            }
            r
        };
        (0..self.len())
            .map(|i| {
                [
                    ranks[i],
                    dual_ranks[i],
                    self.lower_covers(i).len(),
                    self.upper_covers(i).len(),
                    self.down.count(i) as usize,
                    self.up.count(i) as usize,
                ]
            })
            .collect()
    }
}

impl<K: Serialize> FiniteLattice<K> {
    /// `{"elements":[…],"covers":[[i,j],…]}`.
    pub fn to_json_document(&self) -> serde_json::Value {
        serde_json::json!({
            "elements": self.elements,
            "covers": self.hasse_edges(),
        })
    }

    /// Hasse diagram in Graphviz DOT, drawn bottom-up.
    pub fn to_dot(&self) -> String {
        let ranks = self.ranks();
        let mut out = String::from("digraph lattice {\n  rankdir=BT;\n  node [shape=box];\n");
        for (i, e) in self.elements.iter().enumerate() {
            let label = serde_json::to_string(e).expect("keys serialize");
            let _ = writeln!(out, "  n{i} [label=\"{}\"];", label.replace('\\', "\\\\").replace('"', "\\\""));
        }
        let max_rank = ranks.iter().copied().max().unwrap_or(0);
        for r in 0..=max_rank {
            let nodes: Vec<String> = (0..self.len()).filter(|&i| ranks[i] == r).map(|i| format!("n{i};")).collect();
            let _ = writeln!(out, "  {{ rank=same; {} }}", nodes.join(" "));
        }
        for (x, y) in self.hasse_edges() {
            let _ = writeln!(out, "  n{x} -> n{y};");
        }
        out.push_str("}\n");
        out
    }
}

/// An order isomorphism `l1 → l2` as an index map, if one exists.
///
/// Every element of a finite lattice is the join of the join-irreducibles
/// below it, so the search backtracks over join-irreducibles only. A
/// partial assignment must preserve the order among the placed elements
/// and every relation of the form `u ≤ v ∨ w` among them. Complete
/// assignments are extended by joins and checked to be an order
/// isomorphism. Candidates are filtered by rank, corank, cover degrees and
/// up/down-set sizes and tried in ascending index order, which makes the
/// result deterministic.
pub fn are_isomorphic<K1, K2>(l1: &FiniteLattice<K1>, l2: &FiniteLattice<K2>) -> Result<Option<Vec<usize>>> {
    let n = l1.len();
    check_size(n)?;
    check_size(l2.len())?;
    if n != l2.len() {
        return Ok(None);
    }
    let s1 = l1.signatures();
    let s2 = l2.signatures();
    let mut sorted1 = s1.clone();
    let mut sorted2 = s2.clone();
    sorted1.sort_unstable();
    sorted2.sort_unstable();
    if sorted1 != sorted2 {
        return Ok(None);
    }

    let mut j1 = l1.join_irreducibles();
    let j2 = l2.join_irreducibles();
    if j1.len() != j2.len() {
        return Ok(None);
    }
    // Small down-sets first: they sit low in the lattice and pin down the
    // joins that later candidates are checked against.
    j1.sort_by_key(|&x| (l1.down_size(x), x));
    let m = j1.len();

    let mut map = vec![usize::MAX; m];
    let mut used = vec![false; n];
    let mut cursor = vec![0usize; m + 1];
    let mut depth = 0usize;
    let mut steps = 0u64;
    loop {
        if depth == m {
            if let Some(full) = extend_by_joins(l1, l2, &j1, &map) {
                return Ok(Some(full));
            }
            if m == 0 {
                return Ok(None);
            }
            depth -= 1;
            used[map[depth]] = false;
            map[depth] = usize::MAX;
            continue;
        }
        steps += 1;
        if steps > MAX_ISO_STEPS {
            return Err(Error::LimitExceeded { what: "isomorphism search steps", value: steps, limit: MAX_ISO_STEPS });
        }
        let x = j1[depth];
        let mut chosen = None;
        while cursor[depth] < m {
            let y = j2[cursor[depth]];
            cursor[depth] += 1;
            if used[y] || s1[x] != s2[y] {
                continue;
            }
            if consistent(l1, l2, &j1[..depth], &map[..depth], x, y) {
                chosen = Some(y);
                break;
            }
        }
        match chosen {
            Some(y) => {
                map[depth] = y;
                used[y] = true;
                depth += 1;
                cursor[depth] = 0;
            }
            None => {
                if depth == 0 {
                    return Ok(None);
                }
                depth -= 1;
                used[map[depth]] = false;
                map[depth] = usize::MAX;
            }
        }
    }
}

fn consistent<K1, K2>(
    l1: &FiniteLattice<K1>,
    l2: &FiniteLattice<K2>,
    placed: &[usize],
    images: &[usize],
    x: usize,
    y: usize,
) -> bool {
    for (i, (&u, &fu)) in placed.iter().zip(images).enumerate() {
        if l1.leq(u, x) != l2.leq(fu, y) || l1.leq(x, u) != l2.leq(y, fu) {
            return false;
        }
        let (xu, yu) = (l1.join(x, u), l2.join(y, fu));
        for (&w, &fw) in placed[..=i].iter().zip(&images[..=i]) {
            if l1.leq(w, xu) != l2.leq(fw, yu) || l1.leq(x, l1.join(u, w)) != l2.leq(y, l2.join(fu, fw)) {
                return false;
            }
        }
        for (&w, &fw) in placed[i + 1..].iter().zip(&images[i + 1..]) {
            if l1.leq(w, xu) != l2.leq(fw, yu) {
                return false;
            }
        }
    }
    true
}

fn extend_by_joins<K1, K2>(
    l1: &FiniteLattice<K1>,
    l2: &FiniteLattice<K2>,
    irreducibles: &[usize],
    images: &[usize],
) -> Option<Vec<usize>> {
    let n = l1.len();
    let mut full = vec![l2.bottom(); n];
    let mut hit = vec![false; n];
    for (z, slot) in full.iter_mut().enumerate() {
        for (&j, &fj) in irreducibles.iter().zip(images) {
            if l1.leq(j, z) {
                *slot = l2.join(*slot, fj);
            }
        }
        if std::mem::replace(&mut hit[*slot], true) {
            return None;
        }
    }
    let preserved = (0..n).all(|a| (0..n).all(|b| l1.leq(a, b) == l2.leq(full[a], full[b])));
    preserved.then_some(full)
}

/// Whether some order-reversing bijection maps the lattice onto itself.
pub fn is_self_dual<K: Clone + Eq + Hash>(l: &FiniteLattice<K>) -> Result<bool> {
    Ok(are_isomorphic(l, &l.dual())?.is_some())
}

/// A chain `0 < 1 < … < len-1` with integer keys.
pub fn chain(len: usize) -> Result<FiniteLattice<usize>> {
    FiniteLattice::from_relation((0..len).collect(), |i, j| i <= j)
}
