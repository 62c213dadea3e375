use fixedbitset::FixedBitSet;
use proptest::prelude::*;
use quadmix_core::geodesy::{
    adaptive_contour_cover, ball_faces, boundary_edges, contour_cover, distances, dual_components,
    face_set_from, hull_faces, vertex_cut, FaceSet, GeodesyError,
};
use quadmix_core::treegen::{sample_pointed_quadrangulation, sample_quadrangulation};
use quadmix_core::Quadrangulation;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn samples(count: usize, max_n: usize, seed: u64) -> Vec<Quadrangulation> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| sample_quadrangulation(1 + i % max_n, &mut rng).unwrap())
        .collect()
}

#[test]
fn path_distances_from_an_end() {
    let q = Quadrangulation::path();
    let m = q.map();
    let end = m.vertex_of(0);
    let mut d = distances(&q, end);
    d.sort_unstable();
    assert_eq!(d, vec![0, 1, 2]);
}

#[test]
fn distances_are_symmetric() {
    for q in samples(40, 40, 1) {
        let all: Vec<Vec<usize>> = (0..q.vertex_count()).map(|v| distances(&q, v)).collect();
        for u in 0..q.vertex_count() {
            assert_eq!(all[u][u], 0);
            for v in 0..q.vertex_count() {
                assert_eq!(all[u][v], all[v][u]);
            }
        }
    }
}

#[test]
fn unit_ball_is_incident_faces() {
    for q in samples(50, 30, 2) {
        let m = q.map();
        for v in 0..q.vertex_count() {
            let want = face_set_from(m.face_count(), (0..m.dart_count()).filter(|&d| m.vertex_of(d) == v).map(|d| m.face_of(d)));
            assert_eq!(ball_faces(&q, v, 1).unwrap(), want);
        }
    }
    assert_eq!(ball_faces(&Quadrangulation::path(), 0, 0), Err(GeodesyError::InvalidRadius(0)));
}

#[test]
fn balls_grow_to_everything() {
    for q in samples(50, 40, 3) {
        let v = q.map().root_vertex();
        let ecc = *distances(&q, v).iter().max().unwrap();
        let mut prev = FaceSet::with_capacity(q.face_count());
        for r in 1..=ecc + 2 {
            let b = ball_faces(&q, v, r).unwrap();
            assert!(prev.is_subset(&b));
            prev = b;
        }
        assert_eq!(prev.count_ones(..), q.face_count());
    }
}

#[test]
fn hull_invariants() {
    for q in samples(200, 60, 4) {
        let m = q.map();
        let n = q.face_count();
        for v in [0, q.vertex_count() / 2] {
            let ecc = *distances(&q, v).iter().max().unwrap();
            for r in 1..=ecc + 1 {
                let h = hull_faces(&q, v, r).unwrap();
                assert!(h.ball.is_subset(&h.hull));
                assert!(h.hull.is_disjoint(&h.excluded_component));
                assert_eq!(h.hull.count_ones(..) + h.excluded_component.count_ones(..), n);
                let comps = dual_components(m, &h.excluded_component);
                assert!(comps.len() <= 1);
                // the excluded part is a largest component of the ball complement
                let mut comp = h.ball.clone();
                comp.toggle_range(..);
                let sizes: Vec<usize> = dual_components(m, &comp).iter().map(|c| c.len()).collect();
                assert_eq!(h.excluded_component.count_ones(..), sizes.iter().copied().max().unwrap_or(0));
                // the hull boundary touches only vertices at distance r or r + 1
                let dist = distances(&q, v);
                let ends = m.edge_endpoints();
                for e in boundary_edges(&q, &h.hull) {
                    let (a, b) = ends[e];
                    for x in [a, b] {
                        assert!(dist[x] == r || dist[x] == r + 1, "r = {r}, d = {}", dist[x]);
                    }
                }
            }
        }
    }
}

#[test]
fn single_face_hull() {
    let q = Quadrangulation::path();
    for v in 0..3 {
        let h = hull_faces(&q, v, 1).unwrap();
        assert_eq!(h.hull.count_ones(..), 1);
        assert_eq!(h.excluded_component.count_ones(..), 0);
    }
}

#[test]
fn boundary_edge_examples() {
    let q = Quadrangulation::path();
    let none = FaceSet::with_capacity(1);
    assert!(boundary_edges(&q, &none).is_empty());
    assert!(boundary_edges(&q, &face_set_from(1, [0])).is_empty());
    // a face whose four sides each meet a different face
    let mut found = false;
    for q in samples(200, 12, 5) {
        let n = q.face_count();
        let m = q.map();
        let sides = m.face_darts();
        for f in 0..n {
            let neigh: std::collections::BTreeSet<usize> =
                sides[f].iter().map(|&d| m.face_of(m.alpha(d))).collect();
            if neigh.len() == 4 && !neigh.contains(&f) {
                found = true;
                assert_eq!(boundary_edges(&q, &face_set_from(n, [f])).len(), 4);
            }
        }
    }
    assert!(found);
}

#[test]
fn vertex_cut_examples() {
    let q = Quadrangulation::path();
    let m = q.map();
    assert!(vertex_cut(&q, &FixedBitSet::with_capacity(3)).is_empty());
    let mut a = FixedBitSet::with_capacity(3);
    a.insert(m.vertex_of(1));
    assert_eq!(vertex_cut(&q, &a).len(), 2);
    let mut c = a.clone();
    c.toggle_range(..);
    assert_eq!(vertex_cut(&q, &a), vertex_cut(&q, &c));
}

#[test]
fn contour_covers() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for i in 0..100 {
        let (_, pq) = sample_pointed_quadrangulation(2 + i % 100, &mut rng).unwrap();
        let dense = contour_cover(&pq, 2, 1).unwrap();
        assert!(dense.cover_verified);
        let tree_vertices = pq.quad.vertex_count() - 1;
        assert_eq!(dense.centers.len(), tree_vertices);
        let adaptive = adaptive_contour_cover(&pq, 3);
        assert!(adaptive.cover_verified);
        let diam = (0..pq.quad.vertex_count()).map(|v| *distances(&pq.quad, v).iter().max().unwrap()).max().unwrap();
        let single = contour_cover(&pq, diam + 1, pq.corner_vertex.len()).unwrap();
        assert_eq!(single.centers.len(), 1);
        assert!(single.cover_verified);
    }
    let (_, pq) = sample_pointed_quadrangulation(5, &mut rng).unwrap();
    assert_eq!(contour_cover(&pq, 2, 0), Err(GeodesyError::InvalidSpacing));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn complement_components_partition(n in 1usize..80, seed in any::<u64>(), r in 1usize..6) {
        let q = sample_quadrangulation(n, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let ball = ball_faces(&q, 0, r).unwrap();
        let mut comp = ball.clone();
        comp.toggle_range(..);
        let parts = dual_components(q.map(), &comp);
        let total: usize = parts.iter().map(|p| p.len()).sum();
        prop_assert_eq!(total, comp.count_ones(..));
        let mut seen = FaceSet::with_capacity(n);
        for p in &parts {
            for &f in p {
                prop_assert!(!seen.contains(f));
                seen.insert(f);
            }
        }
        prop_assert_eq!(seen, comp);
    }
}
