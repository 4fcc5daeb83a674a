//! The invariant suite behind `ncploc verify`.

use std::collections::BTreeSet;

use serde::Serialize;

use ncploc::correspondence::{
    box_union_meet, interval_to_two_block, ncp_lattice, plocal_lattice, psi, psi_inverse, separating_decomposition,
    union_join,
};
use ncploc::lattice::{are_isomorphic, MAX_ELEMENTS};
use ncploc::ncp::{catalan, enumerate_ncp, kreweras_complement, refinement_leq};
use ncploc::space::{box_parity, Interval, Parity, Space};
use ncploc::supports::{
    brute_force_valid_plocal, closure_holds, closure_holds_reduced, enumerate_valid_plocal, triangle_inclusions_hold,
    u_from_v, v_from_u, Limits, PLocalTuple,
};
use ncploc::Result;

/// Pairwise checks run only below this many valid tuples.
const MAX_PAIRWISE: usize = 1500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub property: &'static str,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

fn report(property: &'static str, outcome: Outcome) -> Report {
    match outcome {
        Outcome::Pass => Report { property, status: Status::Pass, detail: None },
        Outcome::Fail(d) => Report { property, status: Status::Fail, detail: Some(d) },
        Outcome::Skip(d) => Report { property, status: Status::Skipped, detail: Some(d) },
    }
}

enum Outcome {
    Pass,
    Fail(String),
    Skip(String),
}

fn first_failure<I: IntoIterator<Item = Option<String>>>(checks: I) -> Outcome {
    checks.into_iter().flatten().next().map_or(Outcome::Pass, Outcome::Fail)
}

/// Runs every invariant for the given space. Budget errors from the
/// enumerators propagate; individual property failures are reported.
pub fn run_suite(space: Space, limits: &Limits) -> Result<Vec<Report>> {
    let n = space.points();
    let intervals = space.intervals();
    let tuples = enumerate_valid_plocal(space, limits)?;
    let table = space.box_table();
    let mut out = Vec::new();

    out.push(report("interval_indexing", {
        let expected = n * (n + 1) / 2;
        if intervals.len() != expected {
            Outcome::Fail(format!("{} intervals, expected {expected}", intervals.len()))
        } else {
            first_failure(intervals.iter().enumerate().map(|(i, &y)| {
                (space.index_of(y).ok() != Some(i) || space.interval_at(i) != Some(y))
                    .then(|| format!("index mismatch at {y}"))
            }))
        }
    }));

    out.push(report(
        "box_parity_exclusive",
        first_failure(intervals.iter().flat_map(|&y| intervals.iter().map(move |&z| (y, z))).map(|(y, z)| {
            let even = z.a <= y.a && y.a <= z.b && z.b <= y.b;
            let odd = y.a < z.a && y.b < z.b && z.a <= y.b + 1;
            let expected = match (even, odd) {
                (true, true) => return Some(format!("{y},{z} satisfies both parities")),
                (true, false) => Some(Parity::Even),
                (false, true) => Some(Parity::Odd),
                (false, false) => None,
            };
            (box_parity(y, z) != expected).then(|| format!("parity of {z} in B_{y}"))
        })),
    ));

    out.push(report(
        "box_contains_base",
        first_failure(intervals.iter().map(|&y| (box_parity(y, y) != Some(Parity::Even)).then(|| format!("{y}")))),
    ));

    out.push(report("catalan_count", {
        let expected = catalan(n + 1);
        if expected.to_string() == tuples.len().to_string() {
            Outcome::Pass
        } else {
            Outcome::Fail(format!("{} valid tuples, expected {expected}", tuples.len()))
        }
    }));

    out.push(report("oracle_equivalence", {
        if space.interval_count() as u32 > limits.max_bruteforce_bits {
            Outcome::Skip(format!("{} bits exceeds brute-force budget", space.interval_count()))
        } else {
            let brute = brute_force_valid_plocal(space, limits)?;
            if brute == tuples {
                Outcome::Pass
            } else {
                Outcome::Fail(format!("oracle found {} tuples, enumerator {}", brute.len(), tuples.len()))
            }
        }
    }));

    out.push(report(
        "closure_fixpoint",
        first_failure(tuples.iter().map(|t| {
            let bits = t.bits();
            if !closure_holds(&table, bits) || !closure_holds_reduced(&table, bits) {
                return Some(format!("{:?} violates the closure equation", t.support()));
            }
            table
                .box_masks()
                .iter()
                .any(|&b| !closure_holds(&table, bits | b))
                .then(|| format!("{:?} plus a box is not closed", t.support()))
        })),
    ));

    out.push(report(
        "duality_round_trip",
        first_failure(tuples.iter().map(|t| match u_from_v(space, &v_from_u(t)) {
            Ok(back) if back == *t => None,
            _ => Some(format!("{:?}", t.support())),
        })),
    ));

    out.push(report(
        "interval_closure",
        first_failure(tuples.iter().map(|t| {
            let v: BTreeSet<Interval> = v_from_u(t).into_iter().collect();
            v.iter()
                .flat_map(|x| v.iter().map(move |y| (x, y)))
                .flat_map(|(x, y)| [x.intersection(y), x.union(y), x.difference(y)])
                .flatten()
                .find(|z| !v.contains(z))
                .map(|z| format!("{z} missing for {:?}", t.support()))
        })),
    ));

    out.push(report(
        "triangle_inclusions",
        first_failure(
            tuples.iter().map(|t| (!triangle_inclusions_hold(space, t.bits())).then(|| format!("{:?}", t.support()))),
        ),
    ));

    let images: Vec<_> = tuples.iter().map(psi).collect::<Result<_>>()?;
    let nc = enumerate_ncp(n + 1, n + 1)?;

    out.push(report("psi_bijection", {
        let distinct: BTreeSet<_> = images.iter().collect();
        let all: BTreeSet<_> = nc.iter().collect();
        if distinct != all || distinct.len() != tuples.len() {
            Outcome::Fail("image of psi differs from the noncrossing partitions".into())
        } else {
            first_failure(images.iter().zip(&tuples).map(|(s, t)| match psi_inverse(s) {
                Ok(back) if back == *t => None,
                _ => Some(format!("psi_inverse(psi(t)) != t at {s}")),
            }))
        }
    }));

    out.push(report("psi_order_isomorphism", {
        if tuples.len() > MAX_PAIRWISE {
            Outcome::Skip(format!("{} tuples exceeds pairwise limit {MAX_PAIRWISE}", tuples.len()))
        } else {
            let mut bad = None;
            'outer: for i in 0..tuples.len() {
                for j in 0..tuples.len() {
                    if tuples[i].is_subset(&tuples[j]) != refinement_leq(&images[i], &images[j])? {
                        bad = Some(format!("{} vs {}", images[i], images[j]));
                        break 'outer;
                    }
                }
            }
            bad.map_or(Outcome::Pass, Outcome::Fail)
        }
    }));

    out.push(report("two_block_dictionary", {
        let mut bad = None;
        for &y in &intervals {
            let t = PLocalTuple::from_bits(space, table.box_mask(space.index_of(y)?))?;
            let d = interval_to_two_block(space, y)?;
            if psi(&t)? != d.as_partition() || d.interval() != y {
                bad = Some(format!("{y}"));
                break;
            }
        }
        bad.map_or(Outcome::Pass, Outcome::Fail)
    }));

    out.push(report("separating_decomposition", {
        let mut bad = None;
        'outer: for s in &nc {
            for &y in &intervals {
                if s.same_block(y.a, y.b + 1) {
                    continue;
                }
                let cd = match separating_decomposition(s, y.a, y.b) {
                    Ok(cd) => cd,
                    Err(e) => {
                        bad = Some(format!("s={s} y={y}: {e}"));
                        break 'outer;
                    }
                };
                let d = interval_to_two_block(space, cd)?.as_partition();
                let separated = intervals
                    .iter()
                    .filter(|&&z| box_parity(cd, z).is_some())
                    .all(|z| !s.same_block(z.a, z.b + 1));
                if box_parity(cd, y).is_none() || !refinement_leq(&d, s)? || !separated {
                    bad = Some(format!("s={s} y={y} cd={cd}"));
                    break 'outer;
                }
            }
        }
        bad.map_or(Outcome::Pass, Outcome::Fail)
    }));

    out.push(report("kreweras_square", {
        let k = n + 1;
        first_failure(nc.iter().map(|s| {
            (kreweras_complement(&kreweras_complement(s)) != s.rotate(k - 1)).then(|| format!("{s}"))
        }))
    }));

    if tuples.len() > MAX_ELEMENTS {
        let why = format!("{} tuples exceeds lattice limit {MAX_ELEMENTS}", tuples.len());
        out.push(report("lattice_operations", Outcome::Skip(why.clone())));
        out.push(report("lattice_isomorphic_to_nc", Outcome::Skip(why)));
        return Ok(out);
    }
    let lattice = plocal_lattice(space, limits)?;

    out.push(report("lattice_operations", {
        if tuples.len() > MAX_PAIRWISE {
            Outcome::Skip(format!("{} tuples exceeds pairwise limit {MAX_PAIRWISE}", tuples.len()))
        } else {
            let mut bad = None;
            'outer: for i in 0..lattice.len() {
                for j in 0..lattice.len() {
                    let (x, y) = (lattice.element(i), lattice.element(j));
                    if box_union_meet(x, y)? != *lattice.element(lattice.meet(i, j))
                        || union_join(x, y)? != *lattice.element(lattice.join(i, j))
                    {
                        bad = Some(format!("{:?} , {:?}", x.support(), y.support()));
                        break 'outer;
                    }
                }
            }
            bad.map_or(Outcome::Pass, Outcome::Fail)
        }
    }));

    out.push(report("lattice_isomorphic_to_nc", {
        if tuples.len() > MAX_PAIRWISE {
            Outcome::Skip(format!("{} tuples exceeds pairwise limit {MAX_PAIRWISE}", tuples.len()))
        } else {
            match are_isomorphic(&lattice, &ncp_lattice(n + 1, n + 1)?) {
                Ok(Some(_)) => Outcome::Pass,
                Ok(None) => Outcome::Fail("no isomorphism found".into()),
                Err(e) if e.is_budget() => Outcome::Skip(e.to_string()),
                Err(e) => return Err(e),
            }
        }
    }));

    Ok(out)
}
