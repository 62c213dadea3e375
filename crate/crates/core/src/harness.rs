//! Reproducible Monte Carlo experiments over uniform quadrangulations.
//!
//! Every sample draws its own generator from a hash of
//! `(master seed, size, unit, index)`, samples run in parallel and are
//! aggregated in index order, so outputs never depend on the thread count.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::map::Quadrangulation;
use crate::treegen::sample_quadrangulation;
use crate::walk::{
    face_kernel, relaxation_time, tv_mixing_time, uniform_mixing_time, vertex_kernel, StateSpace,
    WalkKernel,
};

/// Caps the worker pool when set to a positive integer.
pub const THREADS_ENV: &str = "QUADMIX_THREADS";

/// Width of histogram bins on the mean-rescaled axis.
pub const HIST_BIN: f64 = 0.05;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("thread pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SizeUnit {
    Faces,
    Vertices,
}

impl SizeUnit {
    /// Face count of a quadrangulation of the given size; `n` faces carry
    /// `n + 2` vertices.
    pub fn faces(self, size: usize) -> Option<usize> {
        match self {
            SizeUnit::Faces => (size >= 1).then_some(size),
            SizeUnit::Vertices => size.checked_sub(2).filter(|&f| f >= 1),
        }
    }

    fn tag(self) -> u64 {
        match self {
            SizeUnit::Faces => 0,
            SizeUnit::Vertices => 1,
        }
    }
}

impl fmt::Display for SizeUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SizeUnit::Faces => "faces",
            SizeUnit::Vertices => "vertices",
        })
    }
}

impl FromStr for SizeUnit {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "faces" => Ok(SizeUnit::Faces),
            "vertices" => Ok(SizeUnit::Vertices),
            _ => Err(format!("unknown unit {s:?}, expected faces or vertices")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeasureKind {
    Uniform,
    Tv,
    Rel,
}

/// Normalisation of the total-variation distance used by `Tv` measures.
/// `Half` is `(1/2) Σ|p - π|`; `Sum` drops the factor, which makes the
/// threshold effectively `ε/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TvNorm {
    Half,
    Sum,
}

impl fmt::Display for TvNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TvNorm::Half => "half",
            TvNorm::Sum => "sum",
        })
    }
}

impl FromStr for TvNorm {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "half" => Ok(TvNorm::Half),
            "sum" => Ok(TvNorm::Sum),
            _ => Err(format!("unknown tv_norm {s:?}, expected half or sum")),
        }
    }
}

/// One mixing quantity: a chain and a notion of mixing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Measure {
    pub chain: StateSpace,
    pub kind: MeasureKind,
}

impl Measure {
    pub const ALL: [Measure; 6] = [
        Measure { chain: StateSpace::Vertex, kind: MeasureKind::Uniform },
        Measure { chain: StateSpace::Vertex, kind: MeasureKind::Tv },
        Measure { chain: StateSpace::Vertex, kind: MeasureKind::Rel },
        Measure { chain: StateSpace::Face, kind: MeasureKind::Uniform },
        Measure { chain: StateSpace::Face, kind: MeasureKind::Tv },
        Measure { chain: StateSpace::Face, kind: MeasureKind::Rel },
    ];

    /// CSV column name, e.g. `tau_vertex_uniform`.
    pub fn column(self) -> String {
        format!("tau_{self}")
    }

    fn integral(self) -> bool {
        self.kind != MeasureKind::Rel
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let chain = match self.chain {
            StateSpace::Vertex => "vertex",
            StateSpace::Face => "face",
        };
        let kind = match self.kind {
            MeasureKind::Uniform => "uniform",
            MeasureKind::Tv => "tv",
            MeasureKind::Rel => "rel",
        };
        write!(f, "{chain}_{kind}")
    }
}

impl FromStr for Measure {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Measure::ALL
            .into_iter()
            .find(|m| m.to_string() == s)
            .ok_or_else(|| format!("unknown measure {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub sizes: Vec<usize>,
    pub unit: SizeUnit,
    pub samples: usize,
    pub seed: u64,
    pub eps: f64,
    /// Requested quantities, kept in `Measure::ALL` order.
    pub measures: Vec<Measure>,
    pub tv_norm: TvNorm,
    pub out_dir: PathBuf,
    /// Overrides the environment cap when set.
    pub threads: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            sizes: vec![10],
            unit: SizeUnit::Faces,
            samples: 1,
            seed: 0,
            eps: 0.5,
            measures: Measure::ALL.to_vec(),
            tv_norm: TvNorm::Half,
            out_dir: PathBuf::from("quadmix-out"),
            threads: None,
        }
    }
}

impl ExperimentConfig {
    /// Parses flat `key = value` text. Blank lines and `#` comments are
    /// skipped; unknown keys are errors.
    ///
    /// Keys: `sizes` (comma list), `unit`, `samples`, `seed`, `eps`,
    /// `measures` (comma list such as `vertex_uniform,face_tv`), `tv_norm`,
    /// `out`, `threads`.
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let mut cfg = ExperimentConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| HarnessError::Config { line: i + 1, msg };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err("expected key = value".into()))?;
            let (key, value) = (key.trim(), value.trim());
            let num = |v: &str| v.parse::<u64>().map_err(|e| err(format!("{key}: {e}")));
            match key {
                "sizes" => {
                    cfg.sizes = value
                        .split(',')
                        .map(|s| num(s.trim()).map(|n| n as usize))
                        .collect::<Result<_, _>>()?
                }
                "unit" => cfg.unit = value.parse().map_err(err)?,
                "samples" => cfg.samples = num(value)? as usize,
                "seed" => cfg.seed = num(value)?,
                "eps" => cfg.eps = value.parse().map_err(|e| err(format!("eps: {e}")))?,
                "measures" => {
                    let mut chosen: Vec<Measure> = value
                        .split(',')
                        .map(|s| s.trim().parse())
                        .collect::<Result<_, _>>()
                        .map_err(err)?;
                    chosen.sort_by_key(|m| Measure::ALL.iter().position(|a| a == m));
                    chosen.dedup();
                    cfg.measures = chosen;
                }
                "tv_norm" => cfg.tv_norm = value.parse().map_err(err)?,
                "out" => cfg.out_dir = PathBuf::from(value),
                "threads" => cfg.threads = Some(num(value)? as usize),
                _ => return Err(err(format!("unknown key {key:?}"))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self, HarnessError> {
        Self::parse(&fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::Invalid(m));
        if self.samples == 0 {
            return bad("samples must be at least 1".into());
        }
        if self.sizes.is_empty() {
            return bad("no sizes given".into());
        }
        if let Some(&s) = self.sizes.iter().find(|&&s| self.unit.faces(s).is_none()) {
            return bad(format!("size {s} {} has no face", self.unit));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return bad(format!("eps = {} outside (0, 1)", self.eps));
        }
        if self.threads == Some(0) {
            return bad("threads must be positive".into());
        }
        Ok(())
    }

    fn pool(&self) -> Result<rayon::ThreadPool, HarnessError> {
        let cap = self.threads.or_else(|| {
            std::env::var(THREADS_ENV)
                .ok()
                .and_then(|v| v.trim().parse().ok())
                .filter(|&n: &usize| n > 0)
        });
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(n) = cap {
            b = b.num_threads(n);
        }
        b.build().map_err(|e| HarnessError::Pool(e.to_string()))
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Stable per-sample seed.
pub fn sample_seed(master: u64, size: usize, unit: SizeUnit, index: usize) -> u64 {
    [size as u64, unit.tag(), index as u64]
        .into_iter()
        .fold(splitmix64(master), |h, w| splitmix64(h ^ w))
}

/// Draws sample `index` at the given size; identical across runs and threads.
pub fn sample_map(master: u64, size: usize, unit: SizeUnit, index: usize) -> Option<Quadrangulation> {
    let faces = unit.faces(size)?;
    let mut rng = ChaCha8Rng::seed_from_u64(sample_seed(master, size, unit, index));
    sample_quadrangulation(faces, &mut rng).ok()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleRecord {
    pub size: usize,
    pub unit: SizeUnit,
    pub faces: usize,
    pub vertices: usize,
    pub index: usize,
    pub seed: u64,
    pub hash: String,
    pub max_degree: usize,
    /// Aligned with the configured measures; empty on failure.
    pub values: Vec<f64>,
    pub error: Option<String>,
}

fn measure_value(k: &WalkKernel, kind: MeasureKind, eps: f64, norm: TvNorm) -> Result<f64, String> {
    let r = match kind {
        MeasureKind::Uniform => uniform_mixing_time(k, eps).map(|t| t as f64),
        MeasureKind::Tv => {
            let e = match norm {
                TvNorm::Half => eps,
                TvNorm::Sum => eps / 2.0,
            };
            tv_mixing_time(k, e).map(|t| t as f64)
        }
        MeasureKind::Rel => relaxation_time(k).map(|(_, t)| t),
    };
    r.map_err(|e| e.to_string())
}

fn run_sample(cfg: &ExperimentConfig, size: usize, index: usize) -> SampleRecord {
    let seed = sample_seed(cfg.seed, size, cfg.unit, index);
    let faces = cfg.unit.faces(size).unwrap_or(0);
    let mut rec = SampleRecord {
        size,
        unit: cfg.unit,
        faces,
        vertices: faces + 2,
        index,
        seed,
        hash: String::new(),
        max_degree: 0,
        values: Vec::new(),
        error: None,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = match sample_quadrangulation(faces, &mut rng) {
        Ok(q) => q,
        Err(e) => {
            rec.error = Some(e.to_string());
            return rec;
        }
    };
    rec.hash = q.map().canonical_code().short_hash();
    rec.max_degree = q.map().vertex_degrees().into_iter().max().unwrap_or(0);
    let mut kernels: [Option<WalkKernel>; 2] = [None, None];
    let mut values = Vec::with_capacity(cfg.measures.len());
    for m in &cfg.measures {
        let slot = match m.chain {
            StateSpace::Vertex => 0,
            StateSpace::Face => 1,
        };
        let k = kernels[slot].get_or_insert_with(|| match m.chain {
            StateSpace::Vertex => vertex_kernel(&q),
            StateSpace::Face => face_kernel(&q),
        });
        match measure_value(k, m.kind, cfg.eps, cfg.tv_norm) {
            Ok(v) => values.push(v),
            Err(e) => {
                rec.error = Some(format!("{m}: {e}"));
                return rec;
            }
        }
    }
    rec.values = values;
    rec
}

/// Runs every sample of every size; records come back ordered by size then
/// index.
pub fn run_samples(cfg: &ExperimentConfig) -> Result<Vec<SampleRecord>, HarnessError> {
    cfg.validate()?;
    let jobs: Vec<(usize, usize)> = cfg
        .sizes
        .iter()
        .flat_map(|&s| (0..cfg.samples).map(move |i| (s, i)))
        .collect();
    let pool = cfg.pool()?;
    Ok(pool.install(|| jobs.par_iter().map(|&(s, i)| run_sample(cfg, s, i)).collect()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub count: usize,
    pub mean: f64,
    /// Unbiased (n − 1) standard deviation; zero below two samples.
    pub sd: f64,
}

fn moments(xs: &[f64]) -> Moments {
    let n = xs.len();
    if n == 0 {
        return Moments { count: 0, mean: f64::NAN, sd: f64::NAN };
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    let ss: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
    let sd = if n > 1 { (ss / (n - 1) as f64).sqrt() } else { 0.0 };
    Moments { count: n, mean, sd }
}

/// Empirical covariance over the product of empirical standard deviations;
/// NaN when either sample is constant.
pub fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let (mx, my) = (moments(xs).mean, moments(ys).mean);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    sxy / (sxx * syy).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SizeSummary {
    pub size: usize,
    pub samples: usize,
    pub failures: usize,
    /// One entry per configured measure.
    pub moments: Vec<(Measure, Moments)>,
    /// Every unordered pair `(a, b)` with `a` before `b` in measure order.
    pub correlations: Vec<(Measure, Measure, f64)>,
}

impl SizeSummary {
    pub fn correlation(&self, a: Measure, b: Measure) -> Option<f64> {
        self.correlations
            .iter()
            .find(|&&(x, y, _)| (x, y) == (a, b) || (x, y) == (b, a))
            .map(|c| c.2)
    }

    pub fn moments_of(&self, m: Measure) -> Option<Moments> {
        self.moments.iter().find(|x| x.0 == m).map(|x| x.1)
    }
}

fn columns(records: &[&SampleRecord], n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|j| records.iter().map(|r| r.values[j]).collect())
        .collect()
}

/// Aggregates successful samples of each size, in record order.
pub fn summarize(cfg: &ExperimentConfig, records: &[SampleRecord]) -> Vec<SizeSummary> {
    cfg.sizes
        .iter()
        .map(|&size| {
            let all: Vec<&SampleRecord> = records.iter().filter(|r| r.size == size).collect();
            let ok: Vec<&SampleRecord> = all.iter().copied().filter(|r| r.error.is_none()).collect();
            let cols = columns(&ok, cfg.measures.len());
            let moments = cfg.measures.iter().zip(&cols).map(|(&m, c)| (m, moments(c))).collect();
            let mut correlations = Vec::new();
            for i in 0..cfg.measures.len() {
                for j in i + 1..cfg.measures.len() {
                    correlations.push((cfg.measures[i], cfg.measures[j], pearson(&cols[i], &cols[j])));
                }
            }
            SizeSummary {
                size,
                samples: all.len(),
                failures: all.len() - ok.len(),
                moments,
                correlations,
            }
        })
        .collect()
}

fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn value_cell(m: Measure, x: f64) -> String {
    if m.integral() {
        format!("{}", x as u64)
    } else {
        float(x)
    }
}

fn writer(path: &Path) -> Result<csv::Writer<fs::File>, HarnessError> {
    Ok(csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(path)?)
}

pub fn write_samples(path: &Path, cfg: &ExperimentConfig, records: &[SampleRecord]) -> Result<(), HarnessError> {
    let mut w = writer(path)?;
    let mut header: Vec<String> =
        ["size", "unit", "faces", "vertices", "index", "seed", "hash", "max_degree"]
            .map(String::from)
            .to_vec();
    header.extend(cfg.measures.iter().map(|m| m.column()));
    header.push("error".into());
    w.write_record(&header)?;
    for r in records {
        let mut row = vec![
            r.size.to_string(),
            r.unit.to_string(),
            r.faces.to_string(),
            r.vertices.to_string(),
            r.index.to_string(),
            r.seed.to_string(),
            r.hash.clone(),
            if r.hash.is_empty() { String::new() } else { r.max_degree.to_string() },
        ];
        for (j, &m) in cfg.measures.iter().enumerate() {
            row.push(r.values.get(j).map_or(String::new(), |&x| value_cell(m, x)));
        }
        row.push(r.error.clone().unwrap_or_default());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary(path: &Path, cfg: &ExperimentConfig, summaries: &[SizeSummary]) -> Result<(), HarnessError> {
    let mut w = writer(path)?;
    w.write_record(["size", "unit", "samples", "failures", "statistic", "a", "b", "value"])?;
    for s in summaries {
        let head = [s.size.to_string(), cfg.unit.to_string(), s.samples.to_string(), s.failures.to_string()];
        let mut row = |stat: &str, a: String, b: String, v: f64| {
            let mut r = head.to_vec();
            r.extend([stat.to_string(), a, b, float(v)]);
            w.write_record(&r)
        };
        for (m, mo) in &s.moments {
            row("mean", m.column(), String::new(), mo.mean)?;
            row("sd", m.column(), String::new(), mo.sd)?;
        }
        for (a, b, c) in &s.correlations {
            row("corr", a.column(), b.column(), *c)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Histogram of each quantity divided by its empirical mean, in bins of
/// width `HIST_BIN` starting at zero; `density` integrates to one.
pub fn write_histogram(
    path: &Path,
    cfg: &ExperimentConfig,
    size: usize,
    records: &[SampleRecord],
) -> Result<(), HarnessError> {
    let ok: Vec<&SampleRecord> = records.iter().filter(|r| r.size == size && r.error.is_none()).collect();
    let cols = columns(&ok, cfg.measures.len());
    let mut w = writer(path)?;
    w.write_record(["quantity", "bin_lo", "bin_hi", "count", "density"])?;
    for (&m, c) in cfg.measures.iter().zip(&cols) {
        let mean = moments(c).mean;
        if c.is_empty() || !(mean > 0.0) {
            continue;
        }
        let bins: Vec<usize> = c.iter().map(|x| (x / mean / HIST_BIN).floor() as usize).collect();
        let mut counts = vec![0usize; bins.iter().max().map_or(0, |b| b + 1)];
        for b in bins {
            counts[b] += 1;
        }
        for (b, &k) in counts.iter().enumerate() {
            let lo = b as f64 * HIST_BIN;
            let density = k as f64 / (c.len() as f64 * HIST_BIN);
            w.write_record([m.column(), float(lo), float(lo + HIST_BIN), k.to_string(), float(density)])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// `τ / size` against `ln size`, with one standard deviation on each side.
pub fn write_trend(path: &Path, cfg: &ExperimentConfig, records: &[SampleRecord]) -> Result<(), HarnessError> {
    let mut w = writer(path)?;
    w.write_record(["size", "unit", "ln_size", "quantity", "mean", "sd", "lower", "upper"])?;
    for &size in &cfg.sizes {
        let ok: Vec<&SampleRecord> = records.iter().filter(|r| r.size == size && r.error.is_none()).collect();
        let cols = columns(&ok, cfg.measures.len());
        for (&m, c) in cfg.measures.iter().zip(&cols) {
            let scaled: Vec<f64> = c.iter().map(|x| x / size as f64).collect();
            let mo = moments(&scaled);
            w.write_record([
                size.to_string(),
                cfg.unit.to_string(),
                float((size as f64).ln()),
                m.column(),
                float(mo.mean),
                float(mo.sd),
                float(mo.mean - mo.sd),
                float(mo.mean + mo.sd),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone)]
pub struct MixingOutput {
    pub records: Vec<SampleRecord>,
    pub summaries: Vec<SizeSummary>,
    pub files: Vec<PathBuf>,
}

/// Samples, measures and writes `samples.csv`, `summary.csv`,
/// `hist_<size>.csv` and `trend.csv` into the output directory.
pub fn run_mixing_experiment(cfg: &ExperimentConfig) -> Result<MixingOutput, HarnessError> {
    let records = run_samples(cfg)?;
    let summaries = summarize(cfg, &records);
    fs::create_dir_all(&cfg.out_dir)?;
    let mut files = Vec::new();
    let path = cfg.out_dir.join("samples.csv");
    write_samples(&path, cfg, &records)?;
    files.push(path);
    let path = cfg.out_dir.join("summary.csv");
    write_summary(&path, cfg, &summaries)?;
    files.push(path);
    for &size in &cfg.sizes {
        let path = cfg.out_dir.join(format!("hist_{size}.csv"));
        write_histogram(&path, cfg, size, &records)?;
        files.push(path);
    }
    let path = cfg.out_dir.join("trend.csv");
    write_trend(&path, cfg, &records)?;
    files.push(path);
    Ok(MixingOutput { records, summaries, files })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegreeRow {
    pub size: usize,
    pub faces: usize,
    pub samples: usize,
    pub failures: usize,
    /// Samples whose maximum degree exceeds `ln(faces)`.
    pub exceeding: usize,
    pub fraction: f64,
}

/// Fraction of samples whose maximum vertex degree exceeds the log of the
/// face count, per size. Mixing measures are ignored.
pub fn degree_experiment(cfg: &ExperimentConfig) -> Result<Vec<DegreeRow>, HarnessError> {
    cfg.validate()?;
    let pool = cfg.pool()?;
    let mut rows = Vec::new();
    for &size in &cfg.sizes {
        let faces = cfg.unit.faces(size).expect("validated");
        let degrees: Vec<Option<usize>> = pool.install(|| {
            (0..cfg.samples)
                .into_par_iter()
                .map(|i| {
                    sample_map(cfg.seed, size, cfg.unit, i)
                        .and_then(|q| q.map().vertex_degrees().into_iter().max())
                })
                .collect()
        });
        let ok = degrees.iter().flatten().count();
        let exceeding = degrees.iter().flatten().filter(|&&d| d as f64 > (faces as f64).ln()).count();
        rows.push(DegreeRow {
            size,
            faces,
            samples: cfg.samples,
            failures: cfg.samples - ok,
            exceeding,
            fraction: if ok == 0 { f64::NAN } else { exceeding as f64 / ok as f64 },
        });
    }
    Ok(rows)
}

/// Runs the degree experiment and writes `degree.csv`.
pub fn run_degree_experiment(cfg: &ExperimentConfig) -> Result<(Vec<DegreeRow>, PathBuf), HarnessError> {
    let rows = degree_experiment(cfg)?;
    fs::create_dir_all(&cfg.out_dir)?;
    let path = cfg.out_dir.join("degree.csv");
    let mut w = writer(&path)?;
    w.write_record(["size", "unit", "faces", "ln_faces", "samples", "failures", "exceeding", "fraction"])?;
    for r in &rows {
        w.write_record([
            r.size.to_string(),
            cfg.unit.to_string(),
            r.faces.to_string(),
            float((r.faces as f64).ln()),
            r.samples.to_string(),
            r.failures.to_string(),
            r.exceeding.to_string(),
            float(r.fraction),
        ])?;
    }
    w.flush()?;
    Ok((rows, path))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trip() {
        let c = ExperimentConfig::parse(
            "# demo\nsizes = 10, 20\nunit=vertices\nsamples=5\nseed=9\nmeasures=face_uniform,vertex_tv\nout=/tmp/x\n",
        )
        .unwrap();
        assert_eq!(c.sizes, vec![10, 20]);
        assert_eq!(c.unit, SizeUnit::Vertices);
        assert_eq!(c.eps, 0.5);
        assert_eq!(c.tv_norm, TvNorm::Half);
        assert_eq!(c.measures.iter().map(|m| m.to_string()).collect::<Vec<_>>(), ["vertex_tv", "face_uniform"]);
    }

    #[test]
    fn config_errors() {
        assert!(matches!(ExperimentConfig::parse("sizes=1\nbogus=2"), Err(HarnessError::Config { line: 2, .. })));
        assert!(matches!(ExperimentConfig::parse("samples=0"), Err(HarnessError::Invalid(_))));
        assert!(matches!(ExperimentConfig::parse("eps=1"), Err(HarnessError::Invalid(_))));
        assert!(matches!(ExperimentConfig::parse("unit=vertices\nsizes=2"), Err(HarnessError::Invalid(_))));
        assert!(ExperimentConfig::parse("measures=vertex_speed").is_err());
        assert!(ExperimentConfig::parse("tv_norm=l2").is_err());
    }

    #[test]
    fn seeds_separate_coordinates() {
        let base = sample_seed(1, 10, SizeUnit::Faces, 0);
        assert_ne!(base, sample_seed(2, 10, SizeUnit::Faces, 0));
        assert_ne!(base, sample_seed(1, 11, SizeUnit::Faces, 0));
        assert_ne!(base, sample_seed(1, 10, SizeUnit::Vertices, 0));
        assert_ne!(base, sample_seed(1, 10, SizeUnit::Faces, 1));
    }

    #[test]
    fn pearson_of_linear_data() {
        let xs = [1.0, 2.0, 4.0, 7.0];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 - 2.0 * x).collect();
        assert!((pearson(&xs, &ys) + 1.0).abs() < 1e-15);
        assert!(pearson(&xs, &[1.0; 4]).is_nan());
    }
}
