use std::collections::BTreeSet;

use elf_core::datagen::{gen_relation, ColumnSpec};
use elf_core::elf::{linearize, PrefixTreeElf};
use elf_core::{build_linear, linear_scan, search, LinearElf, RangeQuery, Relation, Tid};
use proptest::prelude::*;

fn relation() -> impl Strategy<Value = Relation> {
    (2usize..7).prop_flat_map(|k| {
        let row = prop::collection::vec(0u64..6, k);
        prop::collection::btree_set(row, 1..120)
            .prop_map(move |rows: BTreeSet<Vec<u64>>| Relation::new(k, &rows.into_iter().collect::<Vec<_>>()).unwrap())
    })
}

fn windows(k: usize) -> impl Strategy<Value = Vec<(u64, u64)>> {
    prop::collection::vec((0u64..8, 0u64..8).prop_map(|(a, b)| (a.min(b), a.max(b))), k)
}

fn case() -> impl Strategy<Value = (Relation, Vec<(u64, u64)>)> {
    relation().prop_flat_map(|r| {
        let k = r.dims();
        (Just(r), windows(k))
    })
}

proptest! {
    #[test]
    fn search_matches_scan((rel, bounds) in case()) {
        let elf = build_linear(&rel).unwrap();
        let q = RangeQuery::from_bounds(&bounds).unwrap();
        let (got, stats) = search(&elf, &q).unwrap();
        prop_assert!(got.windows(2).all(|w| w[0] < w[1]));
        prop_assert_eq!(got, linear_scan(&rel, &q).unwrap());
        prop_assert_eq!(stats.visits[0], 1);
        prop_assert!(stats.mono.iter().zip(&stats.visits).all(|(m, v)| m <= v));
    }

    #[test]
    fn narrowing_a_window_never_adds_visits((rel, bounds) in case(), dim in 0usize..7, cut in 0u64..8) {
        let elf = build_linear(&rel).unwrap();
        let dim = dim % rel.dims();
        let mut narrow = bounds.clone();
        let (lo, hi) = narrow[dim];
        narrow[dim] = (lo, hi.min(lo.max(cut)));
        let wide = search(&elf, &RangeQuery::from_bounds(&bounds).unwrap()).unwrap().1;
        let tight = search(&elf, &RangeQuery::from_bounds(&narrow).unwrap()).unwrap().1;
        prop_assert!(tight.visits.iter().zip(&wide.visits).all(|(t, w)| t <= w));
    }

    #[test]
    fn layout_preserves_every_tuple(rel in relation()) {
        let tree = PrefixTreeElf::build(&rel).unwrap();
        let elf = linearize(&tree).unwrap();
        let mut want: Vec<(Vec<u64>, Tid)> = rel.rows().enumerate().map(|(t, r)| (r.to_vec(), t as Tid)).collect();
        let mut got = elf.enumerate();
        want.sort();
        got.sort();
        prop_assert_eq!(&got, &want);
        let mut paths = tree.paths();
        paths.sort();
        prop_assert_eq!(paths, want);
        let back = LinearElf::read_from(elf.to_bytes().as_slice()).unwrap();
        prop_assert_eq!(back, elf);
    }
}

#[test]
fn builds_are_deterministic() {
    let specs = [ColumnSpec::uniform(50), ColumnSpec::uniform(7), ColumnSpec::UniqueKey];
    let a = build_linear(&gen_relation(&specs, 3000, 9).unwrap()).unwrap();
    let b = build_linear(&gen_relation(&specs, 3000, 9).unwrap()).unwrap();
    let c = build_linear(&gen_relation(&specs, 3000, 10).unwrap()).unwrap();
    assert_eq!(a.to_bytes(), b.to_bytes());
    assert_ne!(a.to_bytes(), c.to_bytes());
}
