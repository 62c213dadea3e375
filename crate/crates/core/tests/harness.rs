use std::fs;
use std::path::Path;

use quadmix_core::harness::{
    degree_experiment, run_degree_experiment, run_mixing_experiment, sample_map, ExperimentConfig,
    Measure, SizeUnit, HIST_BIN,
};
use quadmix_core::treegen::trivial_bijection;
use tempfile::tempdir;

fn config(text: &str, out: &Path) -> ExperimentConfig {
    let mut c = ExperimentConfig::parse(text).unwrap();
    c.out_dir = out.to_path_buf();
    c
}

fn read_rows(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let mut rows = vec![r.headers().unwrap().iter().map(String::from).collect()];
    rows.extend(r.records().map(|x| x.unwrap().iter().map(String::from).collect()));
    rows
}

#[test]
fn single_face_map_has_one_step_tv_mixing() {
    let dir = tempdir().unwrap();
    let cfg = config("sizes=1\nunit=faces\nsamples=1\nseed=4", dir.path());
    let out = run_mixing_experiment(&cfg).unwrap();
    let rows = read_rows(&dir.path().join("samples.csv"));
    assert_eq!(rows.len(), 2);
    let col = |name: &str| rows[0].iter().position(|h| h == name).unwrap();
    assert_eq!(rows[1][col("tau_face_tv")], "1");
    assert_eq!(rows[1][col("tau_face_uniform")], "0");
    assert_eq!(rows[1][col("faces")], "1");
    assert_eq!(rows[1][col("vertices")], "3");
    assert_eq!(rows[1][col("error")], "");
    assert_eq!(out.files.len(), 4);
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    let text = "sizes=6,12\nunit=vertices\nsamples=40\nseed=77";
    let mut outputs = Vec::new();
    for threads in [1, 4, 1] {
        let dir = tempdir().unwrap();
        let mut cfg = config(text, dir.path());
        cfg.threads = Some(threads);
        run_mixing_experiment(&cfg).unwrap();
        let files: Vec<Vec<u8>> = ["samples.csv", "summary.csv", "hist_6.csv", "hist_12.csv", "trend.csv"]
            .iter()
            .map(|f| fs::read(dir.path().join(f)).unwrap())
            .collect();
        outputs.push(files);
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
}

#[test]
fn records_are_reproducible_from_their_coordinates() {
    let dir = tempdir().unwrap();
    let cfg = config("sizes=9\nunit=vertices\nsamples=15\nseed=3\nmeasures=vertex_uniform", dir.path());
    let out = run_mixing_experiment(&cfg).unwrap();
    for r in &out.records {
        assert_eq!(r.faces, 7);
        assert_eq!(r.vertices, r.faces + 2);
        let q = sample_map(3, 9, SizeUnit::Vertices, r.index).unwrap();
        assert_eq!(q.map().canonical_code().short_hash(), r.hash);
        assert_eq!(q.map().vertex_count(), 9);
        assert_eq!(q.map().vertex_degrees().into_iter().max().unwrap(), r.max_degree);
    }
}

#[test]
fn summary_matches_recomputation_from_samples_csv() {
    let dir = tempdir().unwrap();
    let cfg = config("sizes=10\nunit=faces\nsamples=60\nseed=11", dir.path());
    run_mixing_experiment(&cfg).unwrap();
    let rows = read_rows(&dir.path().join("samples.csv"));
    let summary = read_rows(&dir.path().join("summary.csv"));
    for m in Measure::ALL {
        let j = rows[0].iter().position(|h| *h == m.column()).unwrap();
        let xs: Vec<f64> = rows[1..].iter().map(|r| r[j].parse().unwrap()).collect();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
        let find = |stat: &str| -> f64 {
            summary[1..]
                .iter()
                .find(|r| r[4] == stat && r[5] == m.column())
                .unwrap()[7]
                .parse()
                .unwrap()
        };
        assert!((find("mean") - mean).abs() <= 1e-12 * mean.abs());
        assert!((find("sd") - var.sqrt()).abs() <= 1e-9 * var.sqrt().max(1e-300));
    }
    assert_eq!(summary[1..].iter().filter(|r| r[4] == "corr").count(), 15);
}

#[test]
fn histograms_integrate_to_one() {
    let dir = tempdir().unwrap();
    let cfg = config("sizes=15\nsamples=50\nseed=5", dir.path());
    run_mixing_experiment(&cfg).unwrap();
    let rows = read_rows(&dir.path().join("hist_15.csv"));
    for m in Measure::ALL {
        let mass: f64 = rows[1..]
            .iter()
            .filter(|r| r[0] == m.column())
            .map(|r| r[4].parse::<f64>().unwrap() * HIST_BIN)
            .sum();
        assert!((mass - 1.0).abs() < 1e-12, "{m}: {mass}");
    }
}

#[test]
fn failures_are_recorded_without_aborting() {
    // no floating-point power gets within 1e-300 of the limit
    let dir = tempdir().unwrap();
    let cfg = config("sizes=5\nsamples=3\nseed=1\neps=1e-300\nmeasures=vertex_uniform", dir.path());
    let out = run_mixing_experiment(&cfg).unwrap();
    assert_eq!(out.summaries[0].failures, 3);
    let rows = read_rows(&dir.path().join("samples.csv"));
    assert_eq!(rows.len(), 4);
    for r in &rows[1..] {
        assert_eq!(r[8], "");
        assert!(!r[9].is_empty());
    }
}

#[test]
fn maximum_degree_agrees_with_white_diagonal_map() {
    for i in 0..200 {
        let q = sample_map(8, 1 + i % 40, SizeUnit::Faces, i).unwrap();
        let image = trivial_bijection(&q);
        let deg = q.map().vertex_degrees();
        let mut white: Vec<usize> = (0..deg.len()).filter(|&v| image.white[v]).map(|v| deg[v]).collect();
        let mut mapped = image.map.vertex_degrees();
        white.sort_unstable();
        mapped.sort_unstable();
        assert_eq!(white, mapped);
    }
}

#[test]
fn degree_fractions_are_probabilities_and_do_not_grow() {
    let dir = tempdir().unwrap();
    let cfg = config("sizes=125,2000\nsamples=2000\nseed=21", dir.path());
    let (rows, path) = run_degree_experiment(&cfg).unwrap();
    assert!(path.exists());
    for r in &rows {
        assert!((0.0..=1.0).contains(&r.fraction));
        assert_eq!(r.failures, 0);
    }
    assert!(rows[1].fraction <= rows[0].fraction + 0.05, "{rows:?}");
    assert_eq!(degree_experiment(&cfg).unwrap(), rows);
}

#[test]
fn summed_tv_norm_never_mixes_sooner() {
    let dir = tempdir().unwrap();
    let half = config("sizes=12\nsamples=30\nseed=6\nmeasures=vertex_tv,face_tv", dir.path());
    let sum = ExperimentConfig { tv_norm: quadmix_core::harness::TvNorm::Sum, ..half.clone() };
    assert_eq!(ExperimentConfig::parse("tv_norm=sum").unwrap().tv_norm, sum.tv_norm);
    let a = quadmix_core::harness::run_samples(&half).unwrap();
    let b = quadmix_core::harness::run_samples(&sum).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.hash, y.hash);
        assert!(x.values.iter().zip(&y.values).all(|(h, s)| h <= s));
    }
}
