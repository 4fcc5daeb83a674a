//! Invariants checked exhaustively on small spaces, each against an
//! independent oracle where one exists.

use std::collections::BTreeSet;

use ncploc::correspondence::{
    box_union_meet, interval_to_two_block, ncp_lattice, plocal_lattice, product_lattice, psi, psi_inverse,
    separating_decomposition, union_join,
};
use ncploc::lattice::{are_isomorphic, chain, FiniteLattice};
use ncploc::ncp::{enumerate_ncp, kreweras_complement, refinement_leq, NoncrossingPartition};
use ncploc::space::{box_parity, Interval, Space};
use ncploc::supports::{
    brute_force_valid_plocal, closure_holds, enumerate_valid_plocal, is_valid, triangle_inclusions_hold,
    tuple_from_generators, u_from_v, universe_from_values, v_from_u, Limits, PLocalTuple, SupportTuple,
};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn sp(n: usize) -> Space {
    Space::new(n).unwrap()
}

/// `binom(2k, k) / (k + 1)` from a product of exact binomials.
fn catalan_oracle(k: u128) -> u128 {
    let mut binom = 1u128;
    for i in 0..k {
        binom = binom * (2 * k - i) / (i + 1);
    }
    binom / (k + 1)
}

#[test]
fn catalan_counts_of_valid_tuples() {
    let lim = Limits::default();
    for n in 1..=6 {
        let got = enumerate_valid_plocal(sp(n), &lim).unwrap().len() as u128;
        assert_eq!(got, catalan_oracle(n as u128 + 1), "n={n}");
    }
}

#[test]
fn structural_enumeration_matches_brute_force() {
    let lim = Limits::default();
    for n in 1..=5 {
        assert_eq!(enumerate_valid_plocal(sp(n), &lim).unwrap(), brute_force_valid_plocal(sp(n), &lim).unwrap());
    }
}

#[test]
fn unions_of_boxes_are_fixpoints() {
    for n in 1..=4 {
        let s = sp(n);
        let ivs = s.intervals();
        let table = s.box_table();
        for g in 0..1u64 << ivs.len() {
            let gens: Vec<Interval> = s.intervals_in(g);
            let t = tuple_from_generators(s, &gens).unwrap();
            assert!(closure_holds(&table, t.bits()), "n={n} gens={gens:?}");
        }
    }
    let mut rng = StdRng::seed_from_u64(0x5eed);
    for n in [5, 6] {
        let s = sp(n);
        let table = s.box_table();
        for _ in 0..2000 {
            let g = rng.gen::<u64>() & s.full_mask();
            assert!(closure_holds(&table, table.union_of_boxes(g)));
        }
    }
}

#[test]
fn duality_round_trips() {
    let lim = Limits::default();
    for n in 1..=4 {
        let s = sp(n);
        for t in enumerate_valid_plocal(s, &lim).unwrap() {
            assert_eq!(u_from_v(s, &v_from_u(&t)).unwrap(), t);
        }
        for g in 0..1u64 << s.interval_count() {
            let gens = s.intervals_in(g);
            let back: BTreeSet<Interval> = v_from_u(&u_from_v(s, &gens).unwrap()).into_iter().collect();
            assert!(gens.iter().all(|y| back.contains(y)), "n={n} gens={gens:?}");
        }
    }
}

#[test]
fn generated_interval_sets_are_closed() {
    let lim = Limits::default();
    for n in 1..=4 {
        let s = sp(n);
        for t in enumerate_valid_plocal(s, &lim).unwrap() {
            let v: BTreeSet<Interval> = v_from_u(&t).into_iter().collect();
            for x in &v {
                for y in &v {
                    let derived = [x.intersection(y), x.union(y), x.difference(y)];
                    for z in derived.into_iter().flatten() {
                        assert!(v.contains(&z), "n={n} t={:?}: {x} , {y} -> {z} missing", t.support());
                    }
                }
            }
        }
    }
}

#[test]
fn triangle_inclusions_on_support_tuples() {
    let lim = Limits::default();
    for n in 1..=4 {
        let s = sp(n);
        let valid = enumerate_valid_plocal(s, &lim).unwrap();
        for t in &valid {
            assert!(triangle_inclusions_hold(s, t.bits()));
        }
        // Multi-prime tuples are valid slice by slice.
        let u = universe_from_values(&[2, 3]).unwrap();
        for (i, a) in valid.iter().enumerate().step_by(3) {
            let b = valid[(i * 7 + 1) % valid.len()];
            let st = SupportTuple::from_plocal(u.clone(), &[*a, b]).unwrap();
            assert!(is_valid(&st));
            assert!(st.slices().all(|(_, sl)| triangle_inclusions_hold(s, sl.bits())));
        }
    }
}

#[test]
fn reduced_form_is_equivalent_everywhere() {
    use ncploc::supports::closure_holds_reduced;
    for n in 1..=5 {
        let table = sp(n).box_table();
        for bits in 0..1u64 << sp(n).interval_count() {
            assert_eq!(closure_holds(&table, bits), closure_holds_reduced(&table, bits));
        }
    }
}

#[test]
fn box_parity_cases_are_exclusive() {
    // Each nonzero case is checked against its literal inequality, the other must fail.
    for n in 1..=8 {
        for y in sp(n).intervals() {
            for z in sp(n).intervals() {
                let even = z.a <= y.a && y.a <= z.b && z.b <= y.b;
                let odd = y.a < z.a && y.b < z.b && z.a - 1 <= y.b;
                assert!(!(even && odd));
                let got = box_parity(y, z).map(|p| p.value());
                assert_eq!(got, if even { Some(0) } else if odd { Some(1) } else { None });
            }
        }
    }
}

#[test]
fn psi_is_a_bijection_onto_nc() {
    let lim = Limits::default();
    for n in 1..=5 {
        let tuples = enumerate_valid_plocal(sp(n), &lim).unwrap();
        let mut images: Vec<NoncrossingPartition> = tuples.iter().map(|t| psi(t).unwrap()).collect();
        for (t, s) in tuples.iter().zip(&images) {
            assert_eq!(psi_inverse(s).unwrap(), *t);
        }
        images.sort();
        images.dedup();
        assert_eq!(images, enumerate_ncp(n + 1, 10).unwrap());
        for s in enumerate_ncp(n + 1, 10).unwrap() {
            assert_eq!(psi(&psi_inverse(&s).unwrap()).unwrap(), s);
        }
    }
}

#[test]
fn psi_preserves_and_reflects_order() {
    let lim = Limits::default();
    for n in 1..=4 {
        let tuples = enumerate_valid_plocal(sp(n), &lim).unwrap();
        let images: Vec<_> = tuples.iter().map(|t| psi(t).unwrap()).collect();
        for i in 0..tuples.len() {
            for j in 0..tuples.len() {
                assert_eq!(tuples[i].is_subset(&tuples[j]), refinement_leq(&images[i], &images[j]).unwrap());
            }
        }
    }
}

#[test]
fn single_generators_give_two_block_decompositions() {
    for n in 1..=6 {
        let s = sp(n);
        for y in s.intervals() {
            let t = tuple_from_generators(s, &[y]).unwrap();
            let d = interval_to_two_block(s, y).unwrap();
            assert_eq!(psi(&t).unwrap(), d.as_partition(), "n={n} y={y}");
            assert_eq!(d.interval(), y);
        }
    }
}

/// Two-block partitions of the `k`-gon with one linear arc avoiding 1.
fn two_block_candidates(n: usize) -> Vec<(Interval, NoncrossingPartition)> {
    sp(n).intervals().into_iter().map(|y| (y, interval_to_two_block(sp(n), y).unwrap().as_partition())).collect()
}

#[test]
fn separating_decompositions_meet_postconditions() {
    for n in 1..=5 {
        let space = sp(n);
        let candidates = two_block_candidates(n);
        for s in enumerate_ncp(n + 1, 10).unwrap() {
            for y in space.intervals() {
                if s.same_block(y.a, y.b + 1) {
                    assert!(separating_decomposition(&s, y.a, y.b).is_err());
                    continue;
                }
                // A separating decomposition exists (exhaustive search).
                assert!(candidates.iter().any(|(cd, d)| box_parity(*cd, y).is_some() && refinement_leq(d, &s).unwrap()));
                let cd = separating_decomposition(&s, y.a, y.b).unwrap();
                assert!(box_parity(cd, y).is_some(), "(i) fails: s={s} y={y} cd={cd}");
                let d = interval_to_two_block(space, cd).unwrap().as_partition();
                assert!(refinement_leq(&d, &s).unwrap(), "(ii) fails: s={s} y={y} cd={cd}");
                for z in space.intervals() {
                    if box_parity(cd, z).is_some() {
                        assert!(!s.same_block(z.a, z.b + 1), "(iii) fails: s={s} y={y} z={z}");
                    }
                }
            }
        }
    }
}

#[test]
fn box_union_meet_is_the_lattice_meet() {
    let lim = Limits::default();
    for n in 1..=4 {
        let l = plocal_lattice(sp(n), &lim).unwrap();
        for i in 0..l.len() {
            for j in 0..l.len() {
                let m = box_union_meet(l.element(i), l.element(j)).unwrap();
                assert_eq!(l.index_of(&m), Some(l.meet(i, j)));
                let jn = union_join(l.element(i), l.element(j)).unwrap();
                assert_eq!(l.index_of(&jn), Some(l.join(i, j)));
            }
        }
    }
}

#[test]
fn product_lattice_is_a_power() {
    let lim = Limits::default();
    for n in 1..=3 {
        let base = plocal_lattice(sp(n), &lim).unwrap();
        let one = universe_from_values(&[2]).unwrap();
        let two = universe_from_values(&[2, 3]).unwrap();
        let p1 = product_lattice(sp(n), &one, &lim).unwrap();
        assert!(are_isomorphic(&p1, &base).unwrap().is_some());
        let p2 = product_lattice(sp(n), &two, &lim).unwrap();
        let sq = base.product(&base).unwrap();
        assert_eq!(p2.len(), base.len() * base.len());
        assert!(are_isomorphic(&p2, &sq).unwrap().is_some(), "n={n}");
        assert!(p2.elements().iter().all(is_valid));
    }
}

#[test]
fn refinement_is_a_partial_order_with_bounds() {
    for k in 1..=6 {
        let all = enumerate_ncp(k, 10).unwrap();
        let bottom = NoncrossingPartition::single_block(k).unwrap();
        let top = NoncrossingPartition::singletons(k).unwrap();
        for x in &all {
            assert!(refinement_leq(x, x).unwrap());
            assert!(refinement_leq(&bottom, x).unwrap());
            assert!(refinement_leq(x, &top).unwrap());
            for y in &all {
                if x != y {
                    assert!(!(refinement_leq(x, y).unwrap() && refinement_leq(y, x).unwrap()));
                }
                if !refinement_leq(x, y).unwrap() {
                    continue;
                }
                for z in &all {
                    if refinement_leq(y, z).unwrap() {
                        assert!(refinement_leq(x, z).unwrap());
                    }
                }
            }
        }
    }
}

#[test]
fn nc3_is_the_diamond() {
    let l = ncp_lattice(3, 10).unwrap();
    assert_eq!(l.len(), 5);
    let middle: Vec<usize> = (0..5).filter(|&i| i != l.bottom() && i != l.top()).collect();
    assert_eq!(middle.len(), 3);
    for &a in &middle {
        for &b in &middle {
            if a != b {
                assert!(!l.leq(a, b));
            }
        }
    }
}

/// Interleaves `s` on `1..k` with `q` on `1'..k'` as positions `1..2k`
/// (`i ↦ 2i-1`, `i' ↦ 2i`).
fn interleaved_noncrossing(s: &NoncrossingPartition, q: &NoncrossingPartition) -> bool {
    let k = s.k();
    let mut blocks: Vec<Vec<usize>> = s.blocks().iter().map(|b| b.iter().map(|&x| 2 * x - 1).collect()).collect();
    blocks.extend(q.blocks().iter().map(|b| b.iter().map(|&x| 2 * x).collect()));
    ncploc::ncp::is_noncrossing(2 * k, &blocks).unwrap()
}

#[test]
fn kreweras_matches_coarsest_interleaving() {
    for k in 1..=6 {
        let all = enumerate_ncp(k, 10).unwrap();
        for s in &all {
            let compatible: Vec<&NoncrossingPartition> = all.iter().filter(|q| interleaved_noncrossing(s, q)).collect();
            // Coarsest = the compatible partition every other compatible one refines.
            let coarsest: Vec<&&NoncrossingPartition> = compatible
                .iter()
                .filter(|c| compatible.iter().all(|q| refinement_leq(c, q).unwrap()))
                .collect();
            assert_eq!(coarsest.len(), 1, "k={k} s={s}");
            assert_eq!(kreweras_complement(s), **coarsest[0], "k={k} s={s}");
        }
    }
}

#[test]
fn kreweras_reverses_order_and_squares_to_rotation() {
    for k in 1..=6 {
        let all = enumerate_ncp(k, 10).unwrap();
        let comp: Vec<_> = all.iter().map(kreweras_complement).collect();
        let distinct: BTreeSet<_> = comp.iter().collect();
        assert_eq!(distinct.len(), all.len());
        for i in 0..all.len() {
            assert_eq!(kreweras_complement(&comp[i]), all[i].rotate(k - 1), "k={k}");
            for j in 0..all.len() {
                assert_eq!(refinement_leq(&all[i], &all[j]).unwrap(), refinement_leq(&comp[j], &comp[i]).unwrap());
            }
        }
    }
}

// ---- lattice engine ----

fn reindex<K>(l: &FiniteLattice<K>) -> FiniteLattice<usize> {
    FiniteLattice::from_relation((0..l.len()).collect(), |i, j| l.leq(i, j)).unwrap()
}

/// Lattices of at most 14 elements used by the generic checks.
fn small_suite() -> Vec<(String, FiniteLattice<usize>)> {
    let lim = Limits::default();
    let mut out = vec![];
    for len in 1..=5 {
        out.push((format!("chain{len}"), chain(len).unwrap()));
    }
    for n in 1..=3 {
        out.push((format!("plocal{n}"), reindex(&plocal_lattice(sp(n), &lim).unwrap())));
    }
    for k in 1..=4 {
        out.push((format!("nc{k}"), reindex(&ncp_lattice(k, 10).unwrap())));
    }
    let u = universe_from_values(&[2, 3]).unwrap();
    out.push(("plocal1^2".into(), reindex(&product_lattice(sp(1), &u, &lim).unwrap())));
    let u3 = universe_from_values(&[0, 2, 3]).unwrap();
    out.push(("plocal1^3".into(), reindex(&product_lattice(sp(1), &u3, &lim).unwrap())));
    out.push(("m3".into(), FiniteLattice::from_relation((0..5).collect(), |i, j| i == j || i == 0 || j == 4).unwrap()));
    out.push((
        "n5".into(),
        FiniteLattice::from_relation((0..5).collect(), |i, j| i == j || i == 0 || j == 4 || (i == 1 && j == 2)).unwrap(),
    ));
    out.push(("chain2xchain3".into(), reindex(&chain(2).unwrap().product(&chain(3).unwrap()).unwrap())));
    out
}

/// Searches five-element subsets closed under meet and join for a copy of
/// M3 or N5.
fn has_m3_or_n5(l: &FiniteLattice<usize>) -> bool {
    let n = l.len();
    if n < 5 {
        return false;
    }
    let mut idx = [0usize, 1, 2, 3, 4];
    loop {
        let set: BTreeSet<usize> = idx.iter().copied().collect();
        let closed = idx.iter().all(|&a| idx.iter().all(|&b| set.contains(&l.meet(a, b)) && set.contains(&l.join(a, b))));
        if closed {
            let lo = *idx.iter().find(|&&a| idx.iter().all(|&b| l.leq(a, b))).unwrap();
            let hi = *idx.iter().find(|&&a| idx.iter().all(|&b| l.leq(b, a))).unwrap();
            let mid: Vec<usize> = idx.iter().copied().filter(|&x| x != lo && x != hi).collect();
            let comparable = |a: usize, b: usize| l.leq(a, b) || l.leq(b, a);
            let incomparable_pairs = (0..3)
                .flat_map(|i| (i + 1..3).map(move |j| (i, j)))
                .filter(|&(i, j)| !comparable(mid[i], mid[j]))
                .count();
            // M3: three pairwise incomparable. N5: one chain of two plus an element
            // incomparable to both.
            if incomparable_pairs == 3 || incomparable_pairs == 2 {
                return true;
            }
        }
        // next combination
        let mut i = 4;
        loop {
            if idx[i] < n - 5 + i {
                idx[i] += 1;
                for j in i + 1..5 {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
            if i == 0 {
                return false;
            }
            i -= 1;
        }
    }
}

#[test]
fn distributivity_matches_forbidden_sublattice_search() {
    for (name, l) in small_suite() {
        assert!(l.len() <= 14);
        assert_eq!(l.is_distributive().is_distributive(), !has_m3_or_n5(&l), "{name}");
    }
}

#[test]
fn hasse_edges_generate_the_order() {
    let mut suite = small_suite();
    let lim = Limits::default();
    let l4 = plocal_lattice(sp(4), &lim).unwrap();
    suite.push(("plocal4".into(), reindex(&l4)));
    for (name, l) in suite {
        let n = l.len();
        let mut reach = vec![vec![false; n]; n];
        for (i, row) in reach.iter_mut().enumerate() {
            row[i] = true;
        }
        for (x, y) in l.hasse_edges() {
            reach[x][y] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if reach[i][k] {
                    for j in 0..n {
                        if reach[k][j] {
                            reach[i][j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                assert_eq!(reach[i][j], l.leq(i, j), "{name}");
            }
        }
    }
}

#[test]
fn isomorphism_is_reflexive_and_symmetric() {
    let suite = small_suite();
    for (na, a) in &suite {
        assert!(are_isomorphic(a, a).unwrap().is_some(), "{na}");
        for (nb, b) in &suite {
            let ab = are_isomorphic(a, b).unwrap().is_some();
            let ba = are_isomorphic(b, a).unwrap().is_some();
            assert_eq!(ab, ba, "{na} vs {nb}");
        }
    }
}

/// Lattice of a closure system on four points: `gens` plus the full set,
/// closed under intersection.
fn closure_system_lattice(gens: &[u8]) -> FiniteLattice<u8> {
    let mut sets: BTreeSet<u8> = gens.iter().copied().collect();
    sets.insert(0b1111);
    loop {
        let more: Vec<u8> = sets.iter().flat_map(|&a| sets.iter().map(move |&b| a & b)).collect();
        let before = sets.len();
        sets.extend(more);
        if sets.len() == before {
            break;
        }
    }
    FiniteLattice::from_order(sets.into_iter().collect(), |a, b| a & b == *a).unwrap()
}

fn isomorphic_by_permutations<K1, K2>(a: &FiniteLattice<K1>, b: &FiniteLattice<K2>) -> bool {
    fn search<K1, K2>(a: &FiniteLattice<K1>, b: &FiniteLattice<K2>, map: &mut Vec<usize>, used: &mut [bool]) -> bool {
        let x = map.len();
        if x == a.len() {
            return true;
        }
        for y in 0..b.len() {
            if used[y] || !(0..x).all(|w| a.leq(w, x) == b.leq(map[w], y) && a.leq(x, w) == b.leq(y, map[w])) {
                continue;
            }
            used[y] = true;
            map.push(y);
            if search(a, b, map, used) {
                return true;
            }
            map.pop();
            used[y] = false;
        }
        false
    }
    a.len() == b.len() && search(a, b, &mut Vec::new(), &mut vec![false; b.len()])
}

#[test]
fn isomorphism_matches_permutation_search() {
    let mut rng = StdRng::seed_from_u64(17);
    let mut lattices: Vec<FiniteLattice<u8>> = (0..80)
        .map(|_| {
            let count = rng.gen_range(0..5);
            let gens: Vec<u8> = (0..count).map(|_| rng.gen_range(0..16)).collect();
            closure_system_lattice(&gens)
        })
        .collect();
    lattices.retain(|l| l.len() <= 9);
    for a in &lattices {
        for b in &lattices {
            let found = are_isomorphic(a, b).unwrap();
            assert_eq!(found.is_some(), isomorphic_by_permutations(a, b));
            if let Some(map) = found {
                for i in 0..a.len() {
                    for j in 0..a.len() {
                        assert_eq!(a.leq(i, j), b.leq(map[i], map[j]));
                    }
                }
            }
        }
    }
}

#[test]
fn lattice_laws_on_random_pairs() {
    let mut rng = StdRng::seed_from_u64(7);
    for (name, l) in small_suite() {
        let n = l.len();
        for _ in 0..1000 {
            let (x, y) = (rng.gen_range(0..n), rng.gen_range(0..n));
            assert_eq!(l.meet(x, y), l.meet(y, x), "{name}");
            assert_eq!(l.join(x, y), l.join(y, x), "{name}");
            assert_eq!(l.meet(x, l.join(x, y)), x, "{name}");
            assert_eq!(l.join(x, l.meet(x, y)), x, "{name}");
            assert!(l.leq(l.meet(x, y), x) && l.leq(x, l.join(x, y)));
        }
    }
}

#[test]
fn plocal3_matches_nc4() {
    let lim = Limits::default();
    let l = plocal_lattice(sp(3), &lim).unwrap();
    let nc = ncp_lattice(4, 10).unwrap();
    let map = are_isomorphic(&l, &nc).unwrap().expect("isomorphic");
    for i in 0..l.len() {
        for j in 0..l.len() {
            assert_eq!(l.leq(i, j), nc.leq(map[i], map[j]));
        }
    }
    // Hasse diagram of NC_4: edges between partitions differing by one merge.
    assert_eq!(l.hasse_edges().len(), nc.hasse_edges().len());
    assert!(ncploc::is_self_dual(&nc).unwrap());
}

proptest! {
    #[test]
    fn valid_tuple_json_roundtrip(n in 1usize..=6, pick in any::<u64>()) {
        let s = sp(n);
        let all = enumerate_valid_plocal(s, &Limits::default()).unwrap();
        let t = all[(pick % all.len() as u64) as usize];
        let j = serde_json::to_string(&t).unwrap();
        prop_assert_eq!(serde_json::from_str::<PLocalTuple>(&j).unwrap(), t);
        let p = psi(&t).unwrap();
        let pj = serde_json::to_string(&p).unwrap();
        prop_assert_eq!(serde_json::from_str::<NoncrossingPartition>(&pj).unwrap(), p);
    }

    #[test]
    fn random_tuples_valid_iff_union_of_inner_boxes(n in 1usize..=7, raw in any::<u64>()) {
        let s = sp(n);
        let table = s.box_table();
        let bits = raw & s.full_mask();
        prop_assert_eq!(closure_holds(&table, bits), table.interior(bits) == bits);
    }

    #[test]
    fn support_tuples_valid_iff_slices_valid(n in 1usize..=4, a in any::<u64>(), b in any::<u64>()) {
        let s = sp(n);
        let u = universe_from_values(&[0, 5]).unwrap();
        let st = SupportTuple::from_slices(s, u, vec![a & s.full_mask(), b & s.full_mask()]).unwrap();
        let table = s.box_table();
        prop_assert_eq!(is_valid(&st), st.slice_bits().iter().all(|&x| closure_holds(&table, x)));
        let back: SupportTuple = serde_json::from_str(&serde_json::to_string(&st).unwrap()).unwrap();
        prop_assert_eq!(back, st);
    }
}
