use std::collections::{BTreeMap, BTreeSet, HashMap};

use proptest::prelude::*;
use quadmix_core::geodesy::distances;
use quadmix_core::treegen::{
    all_labeled_trees, cvs_forward, enumerate_quadrangulations, sample_labeled_tree,
    sample_pointed_quadrangulation, sample_quadrangulation, trivial_bijection, TreeError,
};
use quadmix_core::PlanarMap;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

// 99th percentiles of the chi-square law, by degrees of freedom
const CHI2_99: [(usize, f64); 5] = [(1, 6.6349), (2, 9.2103), (8, 20.0902), (17, 33.4087), (53, 79.8433)];

fn chi2_stat(counts: &[usize], total: usize) -> f64 {
    let expected = total as f64 / counts.len() as f64;
    counts
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum()
}

fn critical(dof: usize) -> f64 {
    CHI2_99.iter().find(|(d, _)| *d == dof).unwrap().1
}

// n-th quad count from the closed product formula, in plain integers
fn quad_count(n: u64) -> u64 {
    let fact = |k: u64| (1..=k).product::<u64>();
    3u64.pow(n as u32) * 2 * fact(2 * n) / (fact(n) * fact(n + 2))
}

#[test]
fn enumeration_matches_closed_count() {
    for n in 1..=4 {
        let codes = enumerate_quadrangulations(n).unwrap();
        assert_eq!(codes.len() as u64, quad_count(n as u64), "n = {n}");
        for q in codes.values() {
            assert_eq!(q.face_count(), n);
            assert_eq!(q.vertex_count(), n + 2);
        }
    }
    assert!(matches!(
        enumerate_quadrangulations(5),
        Err(TreeError::TooLarge { n: 5, .. })
    ));
}

#[test]
fn cvs_is_bijective_on_small_sizes() {
    for n in 1..=3 {
        let mut pointed = BTreeSet::new();
        let trees = all_labeled_trees(n);
        for t in &trees {
            for theta in [1, -1] {
                let pq = cvs_forward(t, theta);
                let m = pq.quad.map();
                let ranks = m.canonical_ranks();
                let point_rank = (0..m.dart_count())
                    .filter(|&d| m.vertex_of(d) == pq.pointed_vertex)
                    .map(|d| ranks[d])
                    .min()
                    .unwrap();
                pointed.insert((m.canonical_code(), point_rank));
            }
        }
        assert_eq!(pointed.len(), 2 * trees.len());
        assert_eq!(pointed.len() as u64, (n as u64 + 2) * quad_count(n as u64));
    }
}

#[test]
fn rerootings_partition_the_enumeration() {
    let maps = enumerate_quadrangulations(2).unwrap();
    let mut orbits: BTreeSet<BTreeSet<_>> = BTreeSet::new();
    for q in maps.values() {
        let m = q.map();
        let codes: BTreeSet<_> = (0..m.dart_count())
            .map(|r| m.with_root(r).unwrap().canonical_code())
            .collect();
        assert!(codes.iter().all(|c| maps.contains_key(c)));
        orbits.insert(codes);
    }
    assert_eq!(orbits.iter().map(|o| o.len()).sum::<usize>(), maps.len());
    // two rootings of one map that are not isomorphic as rooted maps
    assert!(orbits.iter().any(|o| o.len() >= 2));
}

#[test]
fn single_edge_trees_are_uniform() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut counts = [0usize; 3];
    let total = 30_000;
    for _ in 0..total {
        let t = sample_labeled_tree(1, &mut rng).unwrap();
        counts[(t.increments()[0] + 1) as usize] += 1;
    }
    for c in counts {
        assert!((c as f64 / total as f64 - 1.0 / 3.0).abs() < 0.01);
    }
    assert!(chi2_stat(&counts, total) < critical(2));
}

#[test]
fn two_edge_tree_support() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut seen = BTreeSet::new();
    for _ in 0..5000 {
        seen.insert(sample_labeled_tree(2, &mut rng).unwrap().to_text());
    }
    let all: BTreeSet<_> = all_labeled_trees(2).iter().map(|t| t.to_text()).collect();
    assert_eq!(all.len(), 18);
    assert_eq!(seen, all);
}

#[test]
fn quadrangulation_sampler_is_uniform() {
    for (n, samples, seed) in [(1usize, 20_000usize, 3u64), (2, 10_000, 4), (3, 20_000, 9)] {
        let support = enumerate_quadrangulations(n).unwrap();
        let index: HashMap<_, _> = support.keys().enumerate().map(|(i, c)| (c.clone(), i)).collect();
        let mut counts = vec![0usize; support.len()];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            let q = sample_quadrangulation(n, &mut rng).unwrap();
            counts[index[&q.map().canonical_code()]] += 1;
        }
        assert!(counts.iter().all(|&c| c > 0), "full support at n = {n}");
        if n == 1 {
            for &c in &counts {
                assert!((c as f64 / samples as f64 - 0.5).abs() < 0.02);
            }
        }
        let stat = chi2_stat(&counts, samples);
        assert!(stat < critical(support.len() - 1), "n = {n}: chi2 = {stat}");
    }
}

#[test]
fn sampling_is_deterministic() {
    let a = sample_quadrangulation(40, &mut ChaCha8Rng::seed_from_u64(99)).unwrap();
    let b = sample_quadrangulation(40, &mut ChaCha8Rng::seed_from_u64(99)).unwrap();
    assert_eq!(a.map().to_qmap(), b.map().to_qmap());
}

#[test]
fn labels_are_distances_from_pointed_vertex() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for i in 0..1000 {
        let n = 1 + i % 60;
        let (_, pq) = sample_pointed_quadrangulation(n, &mut rng).unwrap();
        assert_eq!(pq.quad.face_count(), n);
        assert_eq!(pq.quad.vertex_count(), n + 2);
        assert_eq!(distances(&pq.quad, pq.pointed_vertex), pq.label_distances());
    }
}

#[test]
fn labels_give_bipartition() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..200 {
        let (_, pq) = sample_pointed_quadrangulation(30, &mut rng).unwrap();
        let parity: Vec<usize> = pq.label_distances().iter().map(|d| d % 2).collect();
        let m = pq.quad.map();
        for (a, b) in m.edge_endpoints() {
            assert_ne!(parity[a], parity[b]);
        }
    }
}

fn check_trivial_image(q: &quadmix_core::Quadrangulation) {
    let img = trivial_bijection(q);
    let m = q.map();
    let mm: &PlanarMap = &img.map;
    assert_eq!(mm.edge_count(), q.face_count());
    assert_eq!(m.vertex_of(m.root()), m.vertex_of(img.source_dart[mm.root()]));
    // white degrees are preserved
    let qdeg = m.vertex_degrees();
    let mdeg = mm.vertex_degrees();
    for d in 0..mm.dart_count() {
        let v = m.vertex_of(img.source_dart[d]);
        assert!(img.white[v]);
        assert_eq!(mdeg[mm.vertex_of(d)], qdeg[v]);
    }
    // each face of the image contains one black vertex of matching degree
    let fdeg = mm.face_degrees();
    let mut black_of_face: BTreeMap<usize, usize> = BTreeMap::new();
    for d in 0..mm.dart_count() {
        let black = m.head_of(img.source_dart[d]);
        assert!(!img.white[black]);
        let f = mm.face_of(d);
        assert_eq!(*black_of_face.entry(f).or_insert(black), black);
        assert_eq!(fdeg[f], qdeg[black]);
    }
    let blacks = img.white.iter().filter(|w| !**w).count();
    assert_eq!(black_of_face.len(), blacks);
}

#[test]
fn trivial_bijection_degrees() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for i in 0..1000 {
        let q = sample_quadrangulation(1 + i % 50, &mut rng).unwrap();
        check_trivial_image(&q);
    }
}

#[test]
fn trivial_bijection_is_injective() {
    // rooted planar maps with n edges: 2, 9, 54 for n = 1, 2, 3
    for n in 1..=3 {
        let quads = enumerate_quadrangulations(n).unwrap();
        let images: BTreeSet<_> = quads
            .values()
            .map(|q| trivial_bijection(q).map.canonical_code())
            .collect();
        assert_eq!(images.len(), quads.len());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cvs_output_is_valid(n in 1usize..80, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (tree, pq) = sample_pointed_quadrangulation(n, &mut rng).unwrap();
        prop_assert_eq!(tree.vertex_labels()[0], 0);
        prop_assert!(tree.increments().iter().all(|i| (-1..=1).contains(i)));
        prop_assert_eq!(pq.quad.vertex_count(), n + 2);
        prop_assert_eq!(distances(&pq.quad, pq.pointed_vertex), pq.label_distances());
    }

    #[test]
    fn tree_text_round_trips(n in 1usize..40, seed in any::<u64>()) {
        let t = sample_labeled_tree(n, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert_eq!(quadmix_core::LabeledPlaneTree::from_text(&t.to_text()).unwrap(), t);
    }
}
