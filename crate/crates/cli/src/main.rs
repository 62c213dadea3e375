use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::ToPrimitive;
use quadmix_core::analytic::counting::{count_boundary_quads, count_quads, cp_constant};
use quadmix_core::analytic::hull::{
    kappa_coeff, laplace_hull, laplace_hull_finite_difference, laplace_hull_recurrence,
    expansion_coefficients, expansion_predict, laplace_scaled, mean_hull, phi, phi_iterate,
    tail_constant, IterateMode,
};
use quadmix_core::analytic::exponent::{f_at_boundary, f_decomposed, f_direct};
use quadmix_core::analytic::Real;
use quadmix_core::cut::{bottleneck, CutMode, HeuristicBudget, Objective};
use quadmix_core::harness::{
    run_degree_experiment, run_mixing_experiment, sample_map, ExperimentConfig, SizeUnit,
};
use quadmix_core::treegen::enumerate_quadrangulations;
use quadmix_core::walk::{mixing_report, StateSpace};
use quadmix_core::Quadrangulation;

#[derive(Parser)]
#[command(name = "quadmix", version, about = "Random quadrangulations and random-walk mixing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample uniform quadrangulations into QMAP files.
    Gen(GenArgs),
    /// Mixing times of the lazy walk on a QMAP file.
    Mix(MixArgs),
    /// Count (and optionally write) every rooted quadrangulation with N faces.
    Enumerate {
        #[arg(long)]
        faces: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate closed-form quantities.
    Formulas {
        /// Significant digits for real outputs.
        #[arg(long, default_value_t = 20)]
        digits: usize,
        #[command(subcommand)]
        formula: Formula,
    },
    /// Minimise a cut objective on a QMAP file.
    Bottleneck(BottleneckArgs),
    /// Run a Monte Carlo experiment from a key=value config file.
    Experiment {
        kind: ExperimentKind,
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Args)]
#[command(group(clap::ArgGroup::new("size").required(true).args(["faces", "vertices"])))]
struct GenArgs {
    #[arg(long)]
    faces: Option<usize>,
    #[arg(long)]
    vertices: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Chain {
    Vertex,
    Face,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum MixMeasure {
    Uniform,
    Tv,
    Rel,
}

#[derive(Args)]
struct MixArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    #[arg(long, value_enum, default_value = "vertex")]
    chain: Chain,
    /// Repeatable; all measures when omitted.
    #[arg(long, value_enum)]
    measure: Vec<MixMeasure>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Route {
    Analytic,
    Recurrence,
    Difference,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Closed,
    Numeric,
}

#[derive(Subcommand)]
enum Formula {
    /// Rooted quadrangulations with N faces.
    Count { n: u64 },
    /// Quadrangulations with N inner faces and a simple boundary of length 2P.
    Boundary { n: u64, p: u64 },
    /// Asymptotic constant of the boundary counts.
    Cp { p: u64 },
    /// Coefficient κ_P.
    Kappa { p: usize },
    /// Offspring generating function Φ(U) at parameter P.
    Phi { u: String, p: String },
    /// R-th iterate of Φ.
    Iterate {
        u: String,
        p: String,
        r: u32,
        #[arg(long, value_enum, default_value = "closed")]
        mode: Mode,
    },
    /// Transform of the hull volume at radius R and parameter P.
    Laplace {
        r: u32,
        p: String,
        #[arg(long, value_enum, default_value = "analytic")]
        route: Route,
    },
    /// Exact mean hull volume at radius R.
    Mean { r: u64 },
    /// Tail constant of the hull volume at radius R.
    Tail { r: u64 },
    /// Small-λ expansion coefficients, and the prediction at LAMBDA if given.
    Expansion { r: u32, lambda: Option<String> },
    /// Boundary-count exponent at x, or at x = (P-1)/N with --boundary.
    Exponent {
        n: u64,
        x: Option<String>,
        #[arg(long)]
        boundary: Option<u64>,
    },
}

#[derive(Args)]
struct BottleneckArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value = "isoperimetric")]
    objective: Objective,
    #[arg(long, default_value = "exact")]
    mode: CutMode,
    /// Heuristic centres; all vertices when the map has at most this many.
    #[arg(long, default_value_t = HeuristicBudget::default().centers)]
    centers: usize,
    #[arg(long, default_value_t = HeuristicBudget::default().seed)]
    seed: u64,
    #[arg(long, default_value_t = HeuristicBudget::default().local_passes)]
    passes: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExperimentKind {
    Mixing,
    Degree,
}

fn read_quad(path: &Path) -> Result<Quadrangulation> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Quadrangulation::from_qmap(&text).with_context(|| format!("parsing {}", path.display()))
}

fn real(s: &str) -> Result<Real> {
    if s.trim().parse::<f64>().is_err() {
        bail!("not a number: {s:?}");
    }
    Ok(Real::parse(s.trim()))
}

fn gen(a: GenArgs) -> Result<()> {
    let (size, unit) = match (a.faces, a.vertices) {
        (Some(f), _) => (f, SizeUnit::Faces),
        (_, Some(v)) => (v, SizeUnit::Vertices),
        _ => unreachable!("clap requires one size"),
    };
    if unit.faces(size).is_none() {
        bail!("size {size} {unit} has no face");
    }
    fs::create_dir_all(&a.out)?;
    for i in 0..a.count {
        let q = sample_map(a.seed, size, unit, i).context("sampling failed")?;
        let path = a.out.join(format!("map_{i:05}.qmap"));
        fs::write(&path, q.map().to_qmap())?;
        println!(
            "{}\tfaces={}\tvertices={}\thash={}",
            path.display(),
            q.face_count(),
            q.vertex_count(),
            q.map().canonical_code().short_hash()
        );
    }
    Ok(())
}

fn mix(a: MixArgs) -> Result<()> {
    let q = read_quad(&a.input)?;
    let chain = match a.chain {
        Chain::Vertex => StateSpace::Vertex,
        Chain::Face => StateSpace::Face,
    };
    let r = mixing_report(&q, chain, a.eps, None)?;
    let want = |m| a.measure.is_empty() || a.measure.contains(&m);
    println!("map\t{}", r.map_id);
    if want(MixMeasure::Uniform) {
        println!("tau_uniform\t{}", r.tau_uniform);
    }
    if want(MixMeasure::Tv) {
        println!("tau_tv\t{}", r.tau_tv);
    }
    if want(MixMeasure::Rel) {
        println!("tau_rel\t{:.16e}", r.tau_rel);
        println!("lambda2\t{:.16e}", r.lambda2);
    }
    Ok(())
}

fn enumerate(faces: usize, out: Option<PathBuf>) -> Result<()> {
    let maps = enumerate_quadrangulations(faces)?;
    if let Some(dir) = out {
        fs::create_dir_all(&dir)?;
        for (i, q) in maps.values().enumerate() {
            fs::write(dir.join(format!("map_{i:05}.qmap")), q.map().to_qmap())?;
        }
    }
    println!("{}", maps.len());
    Ok(())
}

fn formulas(f: Formula, digits: usize) -> Result<()> {
    let show = |x: Real| println!("{}", x.to_sci_string(digits));
    match f {
        Formula::Count { n } => println!("{}", count_quads(n)),
        Formula::Boundary { n, p } => {
            if p == 0 {
                bail!("boundary half-length must be positive");
            }
            println!("{}", count_boundary_quads(n, p))
        }
        Formula::Cp { p } => {
            if p == 0 {
                bail!("boundary half-length must be positive");
            }
            show(cp_constant(p))
        }
        Formula::Kappa { p } => {
            if p == 0 {
                bail!("index must be positive");
            }
            show(kappa_coeff(p))
        }
        Formula::Phi { u, p } => show(phi(&real(&u)?, &real(&p)?)?),
        Formula::Iterate { u, p, r, mode } => {
            let mode = match mode {
                Mode::Closed => IterateMode::Closed,
                Mode::Numeric => IterateMode::Numeric,
            };
            show(phi_iterate(&real(&u)?, &real(&p)?, r, mode)?)
        }
        Formula::Laplace { r, p, route } => {
            let p = real(&p)?;
            show(match route {
                Route::Analytic => laplace_hull(r, &p)?,
                Route::Recurrence => laplace_hull_recurrence(r, &p)?,
                Route::Difference => laplace_hull_finite_difference(r, &p, &Real::parse("1e-20"))?,
            })
        }
        Formula::Mean { r } => {
            let m = mean_hull(r);
            println!("{m}\t{:.16e}", m.to_f64().unwrap_or(f64::NAN))
        }
        Formula::Tail { r } => show(tail_constant(r)),
        Formula::Expansion { r, lambda } => {
            if r == 0 {
                bail!("radius must be at least 1");
            }
            let (a1, a32) = expansion_coefficients(u64::from(r));
            println!("a1\t{a1}");
            println!("a32\t{a32}");
            if let Some(l) = lambda {
                let l = real(&l)?;
                let (_, _, pred) = expansion_predict(u64::from(r), &l);
                let exact = laplace_scaled(r, &l)?;
                println!("predicted\t{}", pred.to_sci_string(digits));
                println!("exact\t{}", exact.to_sci_string(digits));
            }
        }
        Formula::Exponent { n, x, boundary } => match (x, boundary) {
            (_, Some(p)) => show(f_at_boundary(n, p)?),
            (Some(x), None) => {
                let x = real(&x)?;
                println!("direct\t{}", f_direct(n, &x)?.to_sci_string(digits));
                println!("decomposed\t{}", f_decomposed(n, &x)?.to_sci_string(digits));
            }
            (None, None) => bail!("give x or --boundary P"),
        },
    }
    Ok(())
}

fn bottleneck_cmd(a: BottleneckArgs) -> Result<()> {
    let q = read_quad(&a.input)?;
    let budget = HeuristicBudget { centers: a.centers, seed: a.seed, local_passes: a.passes };
    match bottleneck(&q, a.objective, a.mode, &budget)? {
        None => println!("no admissible set"),
        Some(r) => {
            let witness: Vec<String> = r.witness.iter().map(|x| x.to_string()).collect();
            println!("objective\t{}", r.objective);
            println!("mode\t{}", r.mode);
            println!("value\t{:.16e}", r.value);
            println!("score\t{}/{}", r.score.num, r.score.den);
            println!("cut_edges\t{}", r.cut_edges);
            println!("size\t{}", r.size);
            println!("witness\t{}", witness.join(" "));
        }
    }
    Ok(())
}

fn experiment(kind: ExperimentKind, config: &Path) -> Result<()> {
    let cfg = ExperimentConfig::from_file(config)?;
    match kind {
        ExperimentKind::Mixing => {
            let out = run_mixing_experiment(&cfg)?;
            let failures: usize = out.summaries.iter().map(|s| s.failures).sum();
            for f in &out.files {
                println!("{}", f.display());
            }
            if failures > 0 {
                eprintln!("{failures} samples failed; see the error column");
            }
        }
        ExperimentKind::Degree => {
            let (_, path) = run_degree_experiment(&cfg)?;
            println!("{}", path.display());
        }
    }
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Gen(a) => gen(a),
        Command::Mix(a) => mix(a),
        Command::Enumerate { faces, out } => enumerate(faces, out),
        Command::Formulas { digits, formula } => formulas(formula, digits),
        Command::Bottleneck(a) => bottleneck_cmd(a),
        Command::Experiment { kind, config } => experiment(kind, &config),
    }
}
