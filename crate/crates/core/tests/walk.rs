use nalgebra::DMatrix;
use num_rational::Rational64;
use num_traits::One;
use proptest::prelude::*;
use quadmix_core::cut::{exact_face_bottleneck, Objective};
use quadmix_core::treegen::{enumerate_quadrangulations, sample_quadrangulation};
use quadmix_core::walk::{
    deviation_curve, face_kernel, lazy_walk, mixing_report, relaxation_time, tv_distance,
    tv_mixing_time, uniform_distance, uniform_mixing_time, vertex_kernel, StateSpace, WalkKernel,
};
use quadmix_core::Quadrangulation;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn samples(count: usize, n: usize, seed: u64) -> Vec<Quadrangulation> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| sample_quadrangulation(n, &mut rng).unwrap()).collect()
}

// first power meeting the condition, one multiplication at a time
fn naive_time(k: &WalkKernel, start: usize, done: impl Fn(&DMatrix<f64>) -> bool) -> usize {
    let p = k.to_dense();
    let n = k.state_count();
    let mut m = DMatrix::identity(n, n);
    for _ in 0..start {
        m = &m * &p;
    }
    let mut t = start;
    while !done(&m) {
        m = &m * &p;
        t += 1;
    }
    t
}

#[test]
fn path_chain_by_hand() {
    let q = Quadrangulation::path();
    let k = vertex_kernel(&q);
    let m = q.map();
    let pi = k.stationary();
    assert_eq!(pi[m.vertex_of(0)], Rational64::new(1, 4));
    assert_eq!(pi[m.vertex_of(1)], Rational64::new(1, 2));
    assert_eq!(pi[m.vertex_of(3)], Rational64::new(1, 4));
    assert_eq!(uniform_mixing_time(&k, 0.5), Ok(2));
    assert_eq!(tv_mixing_time(&k, 0.5), Ok(1));
    let (l2, rel) = relaxation_time(&k).unwrap();
    assert!((l2 - 0.5).abs() < 1e-12);
    assert!((rel - 2.0).abs() < 1e-12);
    // P^k = Π + 2^-k A for k ≥ 1, so the sup deviation is 2^(1-k); at k = 0 it is 1/π_min - 1
    for (s, dev, _) in deviation_curve(&k, 6) {
        let want = if s == 0 { 3.0 } else { 0.5f64.powi(s as i32 - 1) };
        assert!((dev - want).abs() < 1e-12, "step {s}");
    }
}

#[test]
fn loops_count_twice() {
    // the dual of the path: one vertex carrying two loops
    let d = Quadrangulation::path().map().dual();
    assert_eq!(d.vertex_degrees(), vec![4]);
    let k = lazy_walk(&d, StateSpace::Face);
    assert_eq!(k.entry(0, 0), Rational64::one());
}

#[test]
fn single_face_chain() {
    let k = face_kernel(&Quadrangulation::path());
    assert_eq!(k.state_count(), 1);
    assert_eq!(k.stationary(), &[Rational64::one()]);
    assert_eq!(uniform_mixing_time(&k, 0.5), Ok(0));
    assert_eq!(tv_mixing_time(&k, 0.5), Ok(1));
    assert_eq!(relaxation_time(&k), Ok((0.0, 1.0)));
}

#[test]
fn two_face_kernels_by_hand() {
    for q in enumerate_quadrangulations(2).unwrap().values() {
        let k = face_kernel(q);
        let m = q.map();
        let shared = (0..m.dart_count())
            .filter(|&d| m.face_of(d) == 0 && m.face_of(m.alpha(d)) == 1)
            .count() as i64;
        assert_eq!(k.entry(0, 1), Rational64::new(shared, 8));
        assert_eq!(k.entry(0, 0), Rational64::one() - Rational64::new(shared, 8));
        assert_eq!(k.stationary(), &[Rational64::new(1, 2), Rational64::new(1, 2)]);
    }
}

#[test]
fn stationary_law_is_invariant_exactly() {
    for n in [10, 50] {
        for q in samples(20, n, n as u64) {
            for k in [vertex_kernel(&q), face_kernel(&q)] {
                assert_eq!(k.stationary_image(), k.stationary());
                for row in k.rows() {
                    assert_eq!(row.iter().map(|&(_, p)| p).sum::<Rational64>(), Rational64::one());
                }
                assert!(k.laziness_violation().is_none());
            }
        }
    }
}

#[test]
fn fast_search_matches_naive_powers() {
    for n in [3, 8, 20] {
        for q in samples(10, n, 100 + n as u64) {
            for k in [vertex_kernel(&q), face_kernel(&q)] {
                let pi = k.stationary_f64();
                for eps in [0.5, 0.1, 0.01] {
                    let u = naive_time(&k, 0, |m| uniform_distance(m, &pi) <= eps);
                    let t = naive_time(&k, 1, |m| tv_distance(m, &pi) < eps);
                    assert_eq!(uniform_mixing_time(&k, eps), Ok(u));
                    assert_eq!(tv_mixing_time(&k, eps), Ok(t));
                }
            }
        }
    }
}

#[test]
fn mixing_bound_through_cheeger_constant() {
    let mut maps: Vec<Quadrangulation> = (2..=4)
        .flat_map(|n| enumerate_quadrangulations(n).unwrap().into_values())
        .collect();
    maps.extend((5..=10).flat_map(|n| samples(20, n, n as u64)));
    for q in maps {
        let h = exact_face_bottleneck(&q, Objective::Cheeger).unwrap().unwrap().value;
        let n = q.face_count() as f64;
        let k = face_kernel(&q);
        for eps in [0.5, 0.25] {
            let tau = uniform_mixing_time(&k, eps).unwrap() as f64;
            let bound = 128.0 / (h * h) * ((8.0 * n).ln() + (1.0 / eps).ln());
            assert!(tau <= bound);
        }
    }
}

#[test]
fn report_fields_are_consistent() {
    for q in samples(30, 25, 7) {
        for chain in [StateSpace::Vertex, StateSpace::Face] {
            let r = mixing_report(&q, chain, 0.5, Some(3)).unwrap();
            assert!(r.tau_uniform >= r.tau_tv);
            assert!((0.0..1.0).contains(&r.lambda2));
            assert!((r.tau_rel - 1.0 / (1.0 - r.lambda2)).abs() < 1e-9 * r.tau_rel);
            assert_eq!(r.map_id, q.map().canonical_code().short_hash());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn mixing_times_monotone_in_epsilon(n in 1usize..30, seed in any::<u64>(), a in 0.01f64..0.9, b in 0.01f64..0.9) {
        let q = sample_quadrangulation(n, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        for k in [vertex_kernel(&q), face_kernel(&q)] {
            prop_assert!(uniform_mixing_time(&k, lo).unwrap() >= uniform_mixing_time(&k, hi).unwrap());
            prop_assert!(tv_mixing_time(&k, lo).unwrap() >= tv_mixing_time(&k, hi).unwrap());
            prop_assert!(tv_mixing_time(&k, lo).unwrap() <= uniform_mixing_time(&k, lo).unwrap().max(1));
            let (l2, _) = relaxation_time(&k).unwrap();
            prop_assert!((0.0..1.0).contains(&l2));
        }
    }
}
