//! Noncrossing partitions of `{1, ..., k}`.
//!
//! Order convention: `τ ≤ σ` when every block of `σ` lies inside a block
//! of `τ`. The one-block partition is the bottom and the all-singletons
//! partition is the top. This is the reverse of the usual refinement order
//! found in much of the literature; always go through [`refinement_leq`].

use std::fmt;

use num_bigint::BigUint;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Default bound on `k` for [`enumerate_ncp`].
pub const DEFAULT_MAX_K: usize = 10;

/// A noncrossing set partition in canonical form: blocks sorted by their
/// minimum, elements ascending.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NoncrossingPartition {
    k: usize,
    blocks: Vec<Vec<usize>>,
}

/// Validates that `blocks` partition `{1..k}` and returns them in canonical
/// form.
pub fn canonical_blocks(k: usize, blocks: &[Vec<usize>]) -> Result<Vec<Vec<usize>>> {
    let bad = |reason: String| Error::NotAPartition { k, reason };
    if k == 0 {
        return Err(bad("ground set must be nonempty".into()));
    }
    let mut seen = vec![false; k + 1];
    let mut out = Vec::with_capacity(blocks.len());
    for block in blocks {
        if block.is_empty() {
            return Err(bad("empty block".into()));
        }
        let mut b = block.clone();
        b.sort_unstable();
        for &x in &b {
            if x == 0 || x > k {
                return Err(bad(format!("element {x} out of range")));
            }
            if seen[x] {
                return Err(bad(format!("element {x} appears twice")));
            }
            seen[x] = true;
        }
        out.push(b);
    }
    if let Some(x) = (1..=k).find(|&x| !seen[x]) {
        return Err(bad(format!("element {x} is not covered")));
    }
    out.sort_unstable_by_key(|b| b[0]);
    Ok(out)
}

/// Block index of every element; slot 0 unused.
fn labels_of(k: usize, blocks: &[Vec<usize>]) -> Vec<usize> {
    let mut labels = vec![usize::MAX; k + 1];
    for (i, b) in blocks.iter().enumerate() {
        for &x in b {
            labels[x] = i;
        }
    }
    labels
}

fn find_crossing(k: usize, labels: &[usize]) -> Option<(usize, usize, usize, usize)> {
    for a in 1..=k {
        for b in a + 1..=k {
            if labels[a] == labels[b] {
                continue;
            }
            for c in b + 1..=k {
                if labels[c] != labels[a] {
                    continue;
                }
                for d in c + 1..=k {
                    if labels[d] == labels[b] {
                        return Some((a, b, c, d));
                    }
                }
            }
        }
    }
    None
}

/// Whether a set partition of `{1..k}` is noncrossing: no `a<b<c<d` with
/// `a ~ c`, `b ~ d` in distinct blocks.
pub fn is_noncrossing(k: usize, blocks: &[Vec<usize>]) -> Result<bool> {
    let blocks = canonical_blocks(k, blocks)?;
    Ok(find_crossing(k, &labels_of(k, &blocks)).is_none())
}

impl NoncrossingPartition {
    pub fn new(k: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        let blocks = canonical_blocks(k, blocks)?;
        if let Some((a, b, c, d)) = find_crossing(k, &labels_of(k, &blocks)) {
            return Err(Error::Crossing { a, b, c, d });
        }
        Ok(NoncrossingPartition { k, blocks })
    }

    /// Partition with one block per class of `labels[1..=k]`.
    pub fn from_labels(k: usize, labels: &[usize]) -> Result<Self> {
        let mut order: Vec<usize> = Vec::new();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for x in 1..=k {
            let l = labels[x];
            match order.iter().position(|&o| o == l) {
                Some(i) => blocks[i].push(x),
                None => {
                    order.push(l);
                    blocks.push(vec![x]);
                }
            }
        }
        Self::new(k, &blocks)
    }

    /// The one-block partition (bottom).
    pub fn single_block(k: usize) -> Result<Self> {
        Self::new(k, &[(1..=k).collect()])
    }

    /// The all-singletons partition (top).
    pub fn singletons(k: usize) -> Result<Self> {
        Self::new(k, &(1..=k).map(|x| vec![x]).collect::<Vec<_>>())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn labels(&self) -> Vec<usize> {
        labels_of(self.k, &self.blocks)
    }

    pub fn block_of(&self, x: usize) -> Option<&[usize]> {
        self.blocks.iter().find(|b| b.contains(&x)).map(Vec::as_slice)
    }

    pub fn same_block(&self, x: usize, y: usize) -> bool {
        self.block_of(x).is_some_and(|b| b.contains(&y))
    }

    /// Relabels `x ↦ x + shift` cyclically on `{1..k}`.
    pub fn rotate(&self, shift: usize) -> Self {
        let k = self.k;
        let blocks: Vec<Vec<usize>> = self
            .blocks
            .iter()
            .map(|b| b.iter().map(|&x| (x - 1 + shift) % k + 1).collect())
            .collect();
        Self::new(k, &blocks).expect("rotation preserves noncrossing partitions")
    }
}

impl fmt::Display for NoncrossingPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .blocks
            .iter()
            .map(|b| format!("{{{}}}", b.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")))
            .collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NcpJson {
    k: usize,
    blocks: Vec<Vec<usize>>,
}

impl Serialize for NoncrossingPartition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        NcpJson { k: self.k, blocks: self.blocks.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for NoncrossingPartition {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = NcpJson::deserialize(d)?;
        NoncrossingPartition::new(raw.k, &raw.blocks).map_err(D::Error::custom)
    }
}

/// `t ≤ s` iff every block of `s` is contained in a block of `t`.
pub fn refinement_leq(t: &NoncrossingPartition, s: &NoncrossingPartition) -> Result<bool> {
    if t.k != s.k {
        return Err(Error::GroundSetMismatch { left: t.k, right: s.k });
    }
    let tl = t.labels();
    Ok(s.blocks.iter().all(|b| b.iter().all(|&x| tl[x] == tl[b[0]])))
}

/// All noncrossing partitions of `{1..k}` in canonical order.
///
/// Walks every restricted growth string and keeps the noncrossing ones.
pub fn enumerate_ncp(k: usize, max_k: usize) -> Result<Vec<NoncrossingPartition>> {
    if k == 0 {
        return Err(Error::NotAPartition { k, reason: "ground set must be nonempty".into() });
    }
    if k > max_k {
        return Err(Error::LimitExceeded { what: "k", value: k as u64, limit: max_k as u64 });
    }
    let mut out = Vec::new();
    // rgs[i] is the block of element i+1; rgs[0] = 0 and rgs[i] <= 1 + max(rgs[..i]).
    let mut rgs = vec![0usize; k];
    let mut maxes = vec![0usize; k];
    loop {
        let mut labels = vec![usize::MAX; k + 1];
        labels[1..].copy_from_slice(&rgs);
        if find_crossing(k, &labels).is_none() {
            let nb = maxes[k - 1] + 1;
            let mut blocks = vec![Vec::new(); nb];
            for (i, &l) in rgs.iter().enumerate() {
                blocks[l].push(i + 1);
            }
            out.push(NoncrossingPartition { k, blocks });
        }
        // Advance to the next restricted growth string.
        let mut i = k - 1;
        loop {
            if i == 0 {
                out.sort_unstable();
                return Ok(out);
            }
            if rgs[i] <= maxes[i - 1] {
                rgs[i] += 1;
                maxes[i] = maxes[i - 1].max(rgs[i]);
                for j in i + 1..k {
                    rgs[j] = 0;
                    maxes[j] = maxes[i];
                }
                break;
            }
            i -= 1;
        }
    }
}

/// `C_k = binom(2k, k) / (k + 1)`.
pub fn catalan(k: usize) -> BigUint {
    let mut c = BigUint::from(1u32);
    // C_{i+1} = C_i * 2(2i+1) / (i+2)
    for i in 0..k {
        c = c * (2 * (2 * i as u64 + 1)) / (i as u64 + 2);
    }
    c
}

/// Kreweras complement: the coarsest partition of the interleaved points
/// `1', ..., k'` (with `i'` between `i` and `i+1`) whose union with `s` is
/// still noncrossing, relabelled `i' ↦ i`.
///
/// Computed as the cycle decomposition of `π⁻¹ ∘ c` where `π` sends each
/// element to the next element of its block (cyclically) and `c` is the
/// long cycle `i ↦ i + 1`. Applying it twice rotates `s` by one step,
/// `x ↦ x - 1`.
pub fn kreweras_complement(s: &NoncrossingPartition) -> NoncrossingPartition {
    let k = s.k;
    let mut prev = vec![0usize; k + 1];
    for b in &s.blocks {
        for (i, &x) in b.iter().enumerate() {
            let next = b[(i + 1) % b.len()];
            prev[next] = x;
        }
    }
    let perm = |x: usize| prev[x % k + 1];
    let mut seen = vec![false; k + 1];
    let mut blocks = Vec::new();
    for start in 1..=k {
        if seen[start] {
            continue;
        }
        let mut block = Vec::new();
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            block.push(x);
            x = perm(x);
        }
        blocks.push(block);
    }
    NoncrossingPartition::new(k, &blocks).expect("Kreweras complement is noncrossing")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ncp(k: usize, blocks: &[&[usize]]) -> NoncrossingPartition {
        NoncrossingPartition::new(k, &blocks.iter().map(|b| b.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn noncrossing_test_examples() {
        assert!(is_noncrossing(6, &[vec![1, 2, 4], vec![3], vec![5, 6]]).unwrap());
        assert!(!is_noncrossing(6, &[vec![1, 2, 4], vec![3, 6], vec![5]]).unwrap());
        for k in 1..=8 {
            assert!(is_noncrossing(k, &(1..=k).map(|x| vec![x]).collect::<Vec<_>>()).unwrap());
        }
        assert!(matches!(
            NoncrossingPartition::new(6, &[vec![1, 2, 4], vec![3, 6], vec![5]]),
            Err(Error::Crossing { .. })
        ));
    }

    #[test]
    fn rejects_non_partitions() {
        assert!(matches!(is_noncrossing(3, &[vec![1, 2], vec![2, 3]]), Err(Error::NotAPartition { .. })));
        assert!(matches!(is_noncrossing(3, &[vec![1, 2]]), Err(Error::NotAPartition { .. })));
        assert!(matches!(is_noncrossing(3, &[vec![1, 4], vec![2, 3]]), Err(Error::NotAPartition { .. })));
        assert!(matches!(is_noncrossing(3, &[vec![1, 2, 3], vec![]]), Err(Error::NotAPartition { .. })));
    }

    #[test]
    fn canonical_form() {
        let p = NoncrossingPartition::new(4, &[vec![4], vec![3, 2], vec![1]]).unwrap();
        assert_eq!(p.blocks(), &[vec![1], vec![2, 3], vec![4]]);
        assert_eq!(p.to_string(), "{{1},{2,3},{4}}");
    }

    #[test]
    fn order_examples() {
        let bottom = NoncrossingPartition::single_block(3).unwrap();
        for p in enumerate_ncp(3, 10).unwrap() {
            assert!(refinement_leq(&bottom, &p).unwrap());
        }
        assert!(refinement_leq(&ncp(3, &[&[1, 3], &[2]]), &ncp(3, &[&[1], &[2], &[3]])).unwrap());
        let a = ncp(3, &[&[1, 2], &[3]]);
        let b = ncp(3, &[&[1], &[2, 3]]);
        assert!(!refinement_leq(&a, &b).unwrap());
        assert!(!refinement_leq(&b, &a).unwrap());
        assert!(refinement_leq(&a, &ncp(4, &[&[1, 2, 3, 4]])).is_err());
    }

    #[test]
    fn counts() {
        assert_eq!(enumerate_ncp(1, 10).unwrap().len(), 1);
        assert_eq!(enumerate_ncp(2, 10).unwrap().len(), 2);
        assert_eq!(enumerate_ncp(3, 10).unwrap().len(), 5);
        assert_eq!(enumerate_ncp(4, 10).unwrap().len(), 14);
        for k in 1..=8 {
            assert_eq!(BigUint::from(enumerate_ncp(k, 10).unwrap().len()), catalan(k), "k={k}");
        }
        assert!(enumerate_ncp(11, 10).unwrap_err().is_budget());
    }

    #[test]
    fn catalan_values() {
        assert_eq!(catalan(1), BigUint::from(1u32));
        assert_eq!(catalan(4), BigUint::from(14u32));
        assert_eq!(catalan(7), BigUint::from(429u32));
        assert_eq!(catalan(0), BigUint::from(1u32));
        assert_eq!(catalan(35).to_string(), "3116285494907301262");
    }

    #[test]
    fn enumeration_is_sorted_and_distinct() {
        let all = enumerate_ncp(6, 10).unwrap();
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn kreweras_examples() {
        assert_eq!(
            kreweras_complement(&NoncrossingPartition::single_block(3).unwrap()),
            NoncrossingPartition::singletons(3).unwrap()
        );
        assert_eq!(
            kreweras_complement(&NoncrossingPartition::singletons(3).unwrap()),
            NoncrossingPartition::single_block(3).unwrap()
        );
        assert_eq!(kreweras_complement(&ncp(3, &[&[1, 2], &[3]])), ncp(3, &[&[1], &[2, 3]]));
    }

    #[test]
    fn json() {
        let p = ncp(6, &[&[1, 2, 4], &[3], &[5, 6]]);
        let j = serde_json::to_string(&p).unwrap();
        assert_eq!(j, r#"{"k":6,"blocks":[[1,2,4],[3],[5,6]]}"#);
        assert_eq!(serde_json::from_str::<NoncrossingPartition>(&j).unwrap(), p);
        assert!(serde_json::from_str::<NoncrossingPartition>(r#"{"k":4,"blocks":[[1,3],[2,4]]}"#).is_err());
    }
}
