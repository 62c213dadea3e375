//! Bottlenecks of quadrangulations: isoperimetric ratios over face sets and
//! vertex sets, exactly on small maps and by candidate search on large ones.
//!
//! All objectives are compared as exact fractions. The two `4/3`-power
//! objectives are compared through their cubes, `cut⁴ / size³`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use fixedbitset::FixedBitSet;
use num_rational::Rational64;
use num_traits::Zero;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::geodesy::{boundary_edges, distances, face_set_from, hull_faces, vertex_cut};
use crate::map::Quadrangulation;
use crate::walk::{face_kernel, second_eigenpair, vertex_kernel, WalkKernel};

/// Largest face count handled by the exact face search.
pub const MAX_EXACT_FACES: usize = 14;
/// Largest vertex count handled by the exact vertex search.
pub const MAX_EXACT_VERTICES: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CutError {
    #[error("exact search limited to {max} states, map has {states}")]
    TooLarge { states: usize, max: usize },
    #[error("objective {0} is not defined on this state space")]
    WrongObjective(Objective),
    #[error("unknown objective {0:?}")]
    UnknownObjective(String),
    #[error("unknown mode {0:?}")]
    UnknownMode(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Objective {
    /// `|∂S|^{4/3} / |S|` over face sets with `0 < |S| ≤ ⌊n/2⌋`.
    Isoperimetric,
    /// `|∂S| / |S|` over the same face sets.
    Cheeger,
    /// Edge flow of the face walk over stationary mass, mass at most 1/2.
    Conductance,
    /// `|E(A,Aᶜ)|^{4/3} / Σ_{x∈A} deg x` over vertex sets with `Σ deg ≤ 2n`.
    VertexIsoperimetric,
}

impl Objective {
    pub fn on_faces(self) -> bool {
        !matches!(self, Objective::VertexIsoperimetric)
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Objective::Isoperimetric => "isoperimetric",
            Objective::Cheeger => "cheeger",
            Objective::Conductance => "conductance",
            Objective::VertexIsoperimetric => "vertex-isoperimetric",
        })
    }
}

impl FromStr for Objective {
    type Err = CutError;
    fn from_str(s: &str) -> Result<Self, CutError> {
        match s {
            "isoperimetric" => Ok(Objective::Isoperimetric),
            "cheeger" => Ok(Objective::Cheeger),
            "conductance" => Ok(Objective::Conductance),
            "vertex-isoperimetric" => Ok(Objective::VertexIsoperimetric),
            _ => Err(CutError::UnknownObjective(s.into())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CutMode {
    Exact,
    Heuristic,
}

impl fmt::Display for CutMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CutMode::Exact => "exact",
            CutMode::Heuristic => "heuristic",
        })
    }
}

impl FromStr for CutMode {
    type Err = CutError;
    fn from_str(s: &str) -> Result<Self, CutError> {
        match s {
            "exact" => Ok(CutMode::Exact),
            "heuristic" => Ok(CutMode::Heuristic),
            _ => Err(CutError::UnknownMode(s.into())),
        }
    }
}

/// Nonnegative fraction `num/den`; for the `4/3` objectives this is the
/// cube of the objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Score {
    pub num: u128,
    pub den: u128,
}

impl Score {
    fn new(num: u128, den: u128) -> Self {
        debug_assert!(den > 0);
        Score { num, den }
    }
}

impl Ord for Score {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num * other.den).cmp(&(other.num * self.den))
    }
}

impl PartialOrd for Score {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CutReport {
    pub mode: CutMode,
    pub objective: Objective,
    /// Sorted face or vertex indices.
    pub witness: Vec<usize>,
    /// `|∂S|` or `|E(A,Aᶜ)|`.
    pub cut_edges: usize,
    /// `|S|` for face objectives, `Σ deg` for vertex objectives.
    pub size: usize,
    pub score: Score,
    pub value: f64,
}

/// Exact evaluation of a candidate set.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub cut_edges: usize,
    pub size: usize,
    pub score: Score,
    pub value: f64,
    pub admissible: bool,
}

/// Objective value of `score` as a double.
pub fn score_value(objective: Objective, score: Score) -> f64 {
    let v = score.num as f64 / score.den as f64;
    match objective {
        Objective::Isoperimetric | Objective::VertexIsoperimetric => v.cbrt(),
        Objective::Cheeger | Objective::Conductance => v,
    }
}

struct Problem {
    objective: Objective,
    states: usize,
    /// Endpoint pairs of every primal edge (faces or vertices).
    edges: Vec<(usize, usize)>,
    weight: Vec<u64>,
    total: u64,
    kernel: Option<WalkKernel>,
}

impl Problem {
    fn new(q: &Quadrangulation, objective: Objective) -> Self {
        let m = q.map();
        match objective {
            Objective::VertexIsoperimetric => {
                let weight: Vec<u64> = m.vertex_degrees().iter().map(|&d| d as u64).collect();
                Problem {
                    objective,
                    states: m.vertex_count(),
                    edges: m.edge_endpoints(),
                    total: weight.iter().sum(),
                    weight,
                    kernel: None,
                }
            }
            _ => Problem {
                objective,
                states: m.face_count(),
                edges: m.edge_faces(),
                weight: vec![1; m.face_count()],
                total: m.face_count() as u64,
                kernel: (objective == Objective::Conductance).then(|| face_kernel(q)),
            },
        }
    }

    fn cut(&self, inside: impl Fn(usize) -> bool) -> usize {
        self.edges.iter().filter(|&&(a, b)| inside(a) != inside(b)).count()
    }

    /// `None` when the set is not admissible.
    fn score(&self, members: &[usize], inside: impl Fn(usize) -> bool + Copy) -> Option<(usize, usize, Score)> {
        let size: u64 = members.iter().map(|&x| self.weight[x]).sum();
        if size == 0 || 2 * size > self.total {
            return None;
        }
        let cut = self.cut(inside);
        let score = match self.objective {
            Objective::Isoperimetric | Objective::VertexIsoperimetric => {
                Score::new((cut as u128).pow(4), (size as u128).pow(3))
            }
            Objective::Cheeger => Score::new(cut as u128, size as u128),
            Objective::Conductance => {
                let k = self.kernel.as_ref().expect("conductance kernel");
                let pi = k.stationary();
                let mut mass = Rational64::zero();
                let mut flow = Rational64::zero();
                for &x in members {
                    mass += pi[x];
                    for &(y, p) in &k.rows()[x] {
                        if !inside(y) {
                            flow += p * pi[x];
                        }
                    }
                }
                if mass * 2 > Rational64::from_integer(1) {
                    return None;
                }
                let r = flow / mass;
                Score::new(*r.numer() as u128, *r.denom() as u128)
            }
        };
        Some((cut, size as usize, score))
    }

    fn report(&self, mode: CutMode, witness: Vec<usize>, (cut, size, score): (usize, usize, Score)) -> CutReport {
        CutReport {
            mode,
            objective: self.objective,
            witness,
            cut_edges: cut,
            size,
            score,
            value: score_value(self.objective, score),
        }
    }
}

fn members_of_mask(mask: u32, states: usize) -> Vec<usize> {
    (0..states).filter(|&i| mask >> i & 1 == 1).collect()
}

/// Keeps the smallest score; ties go to the lexicographically smallest witness.
fn better(cand: &(Vec<usize>, (usize, usize, Score)), best: &Option<(Vec<usize>, (usize, usize, Score))>) -> bool {
    match best {
        None => true,
        Some((w, (_, _, s))) => match cand.1 .2.cmp(s) {
            Ordering::Less => true,
            Ordering::Equal => cand.0 < *w,
            Ordering::Greater => false,
        },
    }
}

fn check_exact(p: &Problem) -> Result<(), CutError> {
    let max = if p.objective.on_faces() { MAX_EXACT_FACES } else { MAX_EXACT_VERTICES };
    if p.states > max {
        return Err(CutError::TooLarge { states: p.states, max });
    }
    Ok(())
}

fn exhaust(p: &Problem, keep: impl Fn(u32) -> bool) -> Option<CutReport> {
    let mut best = None;
    for mask in 1u32..(1u32 << p.states) {
        if !keep(mask) {
            continue;
        }
        let members = members_of_mask(mask, p.states);
        if let Some(s) = p.score(&members, |i| mask >> i & 1 == 1) {
            let cand = (members, s);
            if better(&cand, &best) {
                best = Some(cand);
            }
        }
    }
    best.map(|(w, s)| p.report(CutMode::Exact, w, s))
}

/// Exact infimum over all admissible face sets; `None` when there is none.
pub fn exact_face_bottleneck(q: &Quadrangulation, objective: Objective) -> Result<Option<CutReport>, CutError> {
    if !objective.on_faces() {
        return Err(CutError::WrongObjective(objective));
    }
    let p = Problem::new(q, objective);
    check_exact(&p)?;
    Ok(exhaust(&p, |_| true))
}

/// Exact infimum over dual-connected admissible face sets. For the face
/// objectives a disconnected set is never better than its best component,
/// so this equals `exact_face_bottleneck`.
pub fn connected_face_bottleneck(q: &Quadrangulation, objective: Objective) -> Result<Option<CutReport>, CutError> {
    if !objective.on_faces() {
        return Err(CutError::WrongObjective(objective));
    }
    let p = Problem::new(q, objective);
    check_exact(&p)?;
    let mut adj = vec![0u32; p.states];
    for &(a, b) in &p.edges {
        adj[a] |= 1 << b;
        adj[b] |= 1 << a;
    }
    let connected = |mask: u32| {
        let mut reach = mask & mask.wrapping_neg();
        loop {
            let grow = (0..p.states)
                .filter(|&i| reach >> i & 1 == 1)
                .fold(reach, |acc, i| acc | (adj[i] & mask));
            if grow == reach {
                return reach == mask;
            }
            reach = grow;
        }
    };
    Ok(exhaust(&p, connected))
}

/// Exact conductance of the face walk.
pub fn dual_conductance(q: &Quadrangulation, mode: CutMode, budget: &HeuristicBudget) -> Result<Option<CutReport>, CutError> {
    bottleneck(q, Objective::Conductance, mode, budget)
}

/// Vertex-set bottleneck `|E(A,Aᶜ)|^{4/3} / Σ deg`.
pub fn vertex_bottleneck(q: &Quadrangulation, mode: CutMode, budget: &HeuristicBudget) -> Result<Option<CutReport>, CutError> {
    bottleneck(q, Objective::VertexIsoperimetric, mode, budget)
}

pub fn bottleneck(
    q: &Quadrangulation,
    objective: Objective,
    mode: CutMode,
    budget: &HeuristicBudget,
) -> Result<Option<CutReport>, CutError> {
    match mode {
        CutMode::Exact => {
            let p = Problem::new(q, objective);
            check_exact(&p)?;
            Ok(exhaust(&p, |_| true))
        }
        CutMode::Heuristic => Ok(heuristic_bottleneck(q, objective, budget)),
    }
}

/// Recomputes the objective of a witness through the geodesy cut functions.
pub fn evaluate(q: &Quadrangulation, objective: Objective, witness: &[usize]) -> Evaluation {
    let p = Problem::new(q, objective);
    let m = q.map();
    let (cut, set) = if objective.on_faces() {
        let s = face_set_from(m.face_count(), witness.iter().copied());
        (boundary_edges(q, &s).len(), s)
    } else {
        let mut a = FixedBitSet::with_capacity(m.vertex_count());
        witness.iter().for_each(|&v| a.insert(v));
        (vertex_cut(q, &a).len(), a)
    };
    match p.score(witness, |i| set.contains(i)) {
        Some((c, size, score)) => {
            debug_assert_eq!(c, cut);
            Evaluation { cut_edges: cut, size, score, value: score_value(objective, score), admissible: true }
        }
        None => {
            let size = witness.iter().map(|&x| p.weight[x] as usize).sum();
            Evaluation { cut_edges: cut, size, score: Score::new(0, 1), value: f64::NAN, admissible: false }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeuristicBudget {
    /// Hull centres tried; all vertices when the map has at most this many.
    pub centers: usize,
    pub seed: u64,
    /// Passes of single-state flips after the candidate search.
    pub local_passes: usize,
}

impl Default for HeuristicBudget {
    fn default() -> Self {
        HeuristicBudget { centers: 64, seed: 0, local_passes: 8 }
    }
}

struct Search<'a> {
    p: &'a Problem,
    best: Option<(Vec<usize>, (usize, usize, Score))>,
}

impl Search<'_> {
    fn offer(&mut self, inside: &[bool]) {
        let members: Vec<usize> = (0..inside.len()).filter(|&i| inside[i]).collect();
        if let Some(s) = self.p.score(&members, |i| inside[i]) {
            let cand = (members, s);
            if better(&cand, &self.best) {
                self.best = Some(cand);
            }
        }
    }

    fn offer_with_complement(&mut self, inside: &[bool]) {
        self.offer(inside);
        let flipped: Vec<bool> = inside.iter().map(|b| !b).collect();
        self.offer(&flipped);
    }
}

/// Best of spectral sweeps, ball and hull cuts, and single states, refined
/// by single-state flips. An upper bound on the exact infimum.
pub fn heuristic_bottleneck(q: &Quadrangulation, objective: Objective, budget: &HeuristicBudget) -> Option<CutReport> {
    let p = Problem::new(q, objective);
    let m = q.map();
    let n = p.states;
    let mut search = Search { p: &p, best: None };

    for i in 0..n {
        let mut inside = vec![false; n];
        inside[i] = true;
        search.offer(&inside);
    }

    let kernel = if objective.on_faces() { face_kernel(q) } else { vertex_kernel(q) };
    if let Ok((_, vec)) = second_eigenpair(&kernel) {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| vec[a].total_cmp(&vec[b]).then(a.cmp(&b)));
        for dir in [false, true] {
            let mut inside = vec![false; n];
            let it: Box<dyn Iterator<Item = &usize>> = if dir { Box::new(order.iter().rev()) } else { Box::new(order.iter()) };
            for &x in it {
                inside[x] = true;
                search.offer(&inside);
            }
        }
    }

    let vcount = m.vertex_count();
    let centers: Vec<usize> = if vcount <= budget.centers {
        (0..vcount).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
        let mut c = sample(&mut rng, vcount, budget.centers).into_vec();
        c.sort_unstable();
        c
    };
    for &v in &centers {
        let dist = distances(q, v);
        let ecc = dist.iter().copied().max().unwrap_or(0);
        for r in 1..=ecc + 1 {
            if objective.on_faces() {
                let hull = hull_faces(q, v, r).expect("radius is positive");
                let ball: Vec<bool> = (0..n).map(|f| hull.ball.contains(f)).collect();
                let h: Vec<bool> = (0..n).map(|f| hull.hull.contains(f)).collect();
                search.offer_with_complement(&ball);
                search.offer_with_complement(&h);
            } else {
                let ball: Vec<bool> = dist.iter().map(|&d| d < r).collect();
                search.offer_with_complement(&ball);
            }
        }
    }

    for _ in 0..budget.local_passes {
        let Some((members, _)) = search.best.clone() else { break };
        let mut inside = vec![false; n];
        members.iter().for_each(|&x| inside[x] = true);
        let before = search.best.clone();
        for i in 0..n {
            inside[i] = !inside[i];
            search.offer(&inside);
            inside[i] = !inside[i];
        }
        if search.best == before {
            break;
        }
    }

    search.best.map(|(w, s)| p.report(CutMode::Heuristic, w, s))
}
