//! Thinning against reference skeletons produced by scikit-image's Guo-Hall
//! `thin`. Fixture rows use `.` for background, `#` for foreground removed
//! by thinning and `x` for foreground kept.

use proptest::prelude::*;
use tubetrack_core::extract::{guo_hall, neighbor_count, skeletonize, split_trajectories, BinaryMask};
use tubetrack_core::Pixel;

struct Case {
    name: String,
    input: BinaryMask,
    expected: BinaryMask,
}

fn load() -> Vec<Case> {
    let text = include_str!("fixtures/guo_hall.txt");
    let mut cases = Vec::new();
    let mut lines = text.lines().peekable();
    while let Some(header) = lines.next() {
        let parts: Vec<&str> = header.trim_start_matches("# ").split(' ').collect();
        let (w, h): (usize, usize) = (parts[1].parse().unwrap(), parts[2].parse().unwrap());
        let rows: Vec<&str> = (0..h).map(|_| lines.next().unwrap()).collect();
        let mut input = BinaryMask::new(w, h);
        let mut expected = BinaryMask::new(w, h);
        for (y, row) in rows.iter().enumerate() {
            for (x, c) in row.chars().enumerate() {
                let p = Pixel::new(x as i32, y as i32);
                input.set(p, c != '.');
                expected.set(p, c == 'x');
            }
        }
        cases.push(Case {
            name: parts[0].to_string(),
            input,
            expected,
        });
    }
    cases
}

#[test]
fn guo_hall_matches_reference() {
    let cases = load();
    assert!(cases.len() >= 9);
    for c in &cases {
        let got = guo_hall(&c.input);
        let diff: Vec<Pixel> = c
            .input
            .pixels()
            .filter(|&p| got.get(p) != c.expected.get(p))
            .collect();
        assert!(diff.is_empty(), "{}: {} pixels differ, e.g. {:?}", c.name, diff.len(), &diff[..diff.len().min(5)]);
    }
}

#[test]
fn skeleton_refines_reference_and_keeps_topology() {
    for c in load() {
        let s = skeletonize(&c.input);
        assert!(s.pixels().all(|p| c.expected.get(p)), "{}", c.name);
        assert_eq!(s.component_count(), c.expected.component_count(), "{}", c.name);
    }
}

fn arb_mask() -> impl Strategy<Value = BinaryMask> {
    (8usize..20, 8usize..20).prop_flat_map(|(w, h)| {
        proptest::collection::vec(proptest::bool::weighted(0.55), w * h)
            .prop_map(move |bits| BinaryMask::from_bits(w, h, bits))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn skeleton_is_a_subset_with_same_components(m in arb_mask()) {
        let s = skeletonize(&m);
        prop_assert!(s.pixels().all(|p| m.get(p)));
        prop_assert_eq!(s.component_count(), m.component_count());
        prop_assert_eq!(skeletonize(&s), s.clone());
    }

    #[test]
    fn trajectories_are_disjoint_simple_paths(m in arb_mask(), min_len in 1usize..6) {
        let s = skeletonize(&m);
        let ts = split_trajectories(&s, min_len);
        let mut seen = std::collections::HashSet::new();
        for t in &ts {
            prop_assert!(t.points.len() >= min_len);
            for w in t.points.windows(2) {
                prop_assert!(w[0].is_8_neighbor(w[1]));
            }
            for p in &t.points {
                prop_assert!(s.get(*p));
                prop_assert!(neighbor_count(&s, *p) < 3);
                prop_assert!(seen.insert(*p), "pixel {:?} in two trajectories", p);
            }
        }
    }
}
