//! Lazy random walks on vertices and faces, and their mixing times.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::{DMatrix, SymmetricEigen};
use num_rational::Rational64;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::map::{PlanarMap, Quadrangulation};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WalkError {
    #[error("kernel is not lazy at state {0}")]
    RequiresLaziness(usize),
    #[error("chain is not irreducible")]
    NotErgodic,
    #[error("{measure} condition fails again at step {step} after first holding at {tau}")]
    NumericInstability {
        measure: &'static str,
        tau: usize,
        step: usize,
    },
    #[error("epsilon must be positive, got {0}")]
    InvalidEpsilon(f64),
    #[error("row {0} does not sum to 1")]
    RowSum(usize),
    #[error("detailed balance fails between states {0} and {1}")]
    DetailedBalance(usize, usize),
    #[error("{0} does not converge within 2^62 steps")]
    NoConvergence(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StateSpace {
    Vertex,
    Face,
}

impl fmt::Display for StateSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StateSpace::Vertex => "vertex",
            StateSpace::Face => "face",
        })
    }
}

/// Finite reversible Markov kernel with exact rational entries.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkKernel {
    space: StateSpace,
    rows: Vec<Vec<(usize, Rational64)>>,
    stationary: Vec<Rational64>,
}

impl WalkKernel {
    /// Checks row sums and detailed balance exactly.
    pub fn new(
        space: StateSpace,
        rows: Vec<Vec<(usize, Rational64)>>,
        stationary: Vec<Rational64>,
    ) -> Result<Self, WalkError> {
        let k = Self {
            space,
            rows,
            stationary,
        };
        for (x, row) in k.rows.iter().enumerate() {
            let s: Rational64 = row.iter().map(|&(_, p)| p).sum();
            if s != Rational64::one() {
                return Err(WalkError::RowSum(x));
            }
        }
        for (x, row) in k.rows.iter().enumerate() {
            for &(y, p) in row {
                if k.stationary[x] * p != k.stationary[y] * k.entry(y, x) {
                    return Err(WalkError::DetailedBalance(x, y));
                }
            }
        }
        Ok(k)
    }

    pub fn space(&self) -> StateSpace {
        self.space
    }

    pub fn state_count(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<(usize, Rational64)>] {
        &self.rows
    }

    pub fn entry(&self, x: usize, y: usize) -> Rational64 {
        self.rows[x]
            .iter()
            .find(|(z, _)| *z == y)
            .map(|&(_, p)| p)
            .unwrap_or_else(Rational64::zero)
    }

    pub fn stationary(&self) -> &[Rational64] {
        &self.stationary
    }

    pub fn stationary_f64(&self) -> Vec<f64> {
        self.stationary
            .iter()
            .map(|p| p.to_f64().expect("finite"))
            .collect()
    }

    /// First state whose holding probability is below 1/2, if any.
    pub fn laziness_violation(&self) -> Option<usize> {
        let half = Rational64::new(1, 2);
        (0..self.state_count()).find(|&x| self.entry(x, x) < half)
    }

    /// `π P`, exactly.
    pub fn stationary_image(&self) -> Vec<Rational64> {
        let mut out = vec![Rational64::zero(); self.state_count()];
        for (x, row) in self.rows.iter().enumerate() {
            for &(y, p) in row {
                out[y] += self.stationary[x] * p;
            }
        }
        out
    }

    pub fn is_irreducible(&self) -> bool {
        let n = self.state_count();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(x) = stack.pop() {
            for &(y, p) in &self.rows[x] {
                if !p.is_zero() && !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        // reversible chains are irreducible once everything is reachable from 0
        seen.into_iter().all(|s| s)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.state_count();
        let mut m = DMatrix::zeros(n, n);
        for (x, row) in self.rows.iter().enumerate() {
            for &(y, p) in row {
                m[(x, y)] = p.to_f64().expect("finite");
            }
        }
        m
    }
}

/// Lazy walk on the vertices of `m`: hold with probability 1/2, otherwise
/// follow a uniform dart. The stationary law is proportional to degree.
pub fn lazy_walk(m: &PlanarMap, space: StateSpace) -> WalkKernel {
    let deg = m.vertex_degrees();
    let mut rows: Vec<BTreeMap<usize, Rational64>> = vec![BTreeMap::new(); m.vertex_count()];
    for (x, row) in rows.iter_mut().enumerate() {
        row.insert(x, Rational64::new(1, 2));
    }
    for d in 0..m.dart_count() {
        let x = m.vertex_of(d);
        *rows[x].entry(m.head_of(d)).or_insert_with(Rational64::zero) +=
            Rational64::new(1, 2 * deg[x] as i64);
    }
    let total = m.dart_count() as i64;
    let stationary = deg.iter().map(|&g| Rational64::new(g as i64, total)).collect();
    let rows = rows.into_iter().map(|r| r.into_iter().collect()).collect();
    WalkKernel::new(space, rows, stationary).expect("lazy walk on a map is reversible")
}

/// Lazy walk on the vertices of a quadrangulation.
pub fn vertex_kernel(q: &Quadrangulation) -> WalkKernel {
    lazy_walk(q.map(), StateSpace::Vertex)
}

/// Lazy walk on the faces: hold with probability 1/2, otherwise cross a
/// uniform side, staying put if the same face lies beyond it. Face indices
/// are those of the host map.
pub fn face_kernel(q: &Quadrangulation) -> WalkKernel {
    lazy_walk(&q.map().dual(), StateSpace::Face)
}

fn renormalize(m: &mut DMatrix<f64>) {
    for mut row in m.row_iter_mut() {
        let s: f64 = row.iter().sum();
        row /= s;
    }
}

fn multiply(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let mut c = a * b;
    renormalize(&mut c);
    c
}

/// `max |p^k(x,y) / π(y) - 1|`.
pub fn uniform_distance(pk: &DMatrix<f64>, pi: &[f64]) -> f64 {
    let mut worst: f64 = 0.0;
    for x in 0..pk.nrows() {
        for (y, &py) in pi.iter().enumerate() {
            worst = worst.max((pk[(x, y)] / py - 1.0).abs());
        }
    }
    worst
}

/// `max_x (1/2) Σ_y |p^k(x,y) - π(y)|`.
pub fn tv_distance(pk: &DMatrix<f64>, pi: &[f64]) -> f64 {
    let mut worst: f64 = 0.0;
    for x in 0..pk.nrows() {
        let s: f64 = pi.iter().enumerate().map(|(y, &py)| (pk[(x, y)] - py).abs()).sum();
        worst = worst.max(0.5 * s);
    }
    worst
}

/// Smallest `k >= min_step` with `done(P^k)`, for a predicate that stays true
/// once it holds. Doubling brackets the crossing, then the binary expansion
/// of `k - 1` is rebuilt from the stored powers.
fn first_crossing(
    p: &DMatrix<f64>,
    min_step: usize,
    measure: &'static str,
    done: impl Fn(&DMatrix<f64>) -> bool,
) -> Result<usize, WalkError> {
    let n = p.nrows();
    if min_step == 0 && done(&DMatrix::identity(n, n)) {
        return Ok(0);
    }
    let mut powers = vec![p.clone()];
    if done(&powers[0]) {
        return Ok(1);
    }
    loop {
        let last = powers.last().expect("nonempty");
        let next = multiply(last, last);
        let hit = done(&next);
        powers.push(next);
        if hit {
            break;
        }
        if powers.len() > 62 {
            return Err(WalkError::NoConvergence(measure));
        }
    }
    // P^(2^(j-1)) fails, P^(2^j) holds
    let j = powers.len() - 1;
    let mut lo = 1usize << (j - 1);
    let mut acc = powers[j - 1].clone();
    for b in (0..j - 1).rev() {
        let cand = multiply(&acc, &powers[b]);
        if !done(&cand) {
            acc = cand;
            lo += 1 << b;
        }
    }
    let tau = lo + 1;
    let mut check = multiply(&acc, p);
    for step in tau..=tau + 5 {
        if !done(&check) {
            return Err(WalkError::NumericInstability {
                measure,
                tau,
                step,
            });
        }
        check = multiply(&check, p);
    }
    Ok(tau)
}

fn check_inputs(k: &WalkKernel, eps: f64) -> Result<(), WalkError> {
    if !(eps > 0.0) {
        return Err(WalkError::InvalidEpsilon(eps));
    }
    if let Some(x) = k.laziness_violation() {
        return Err(WalkError::RequiresLaziness(x));
    }
    Ok(())
}

/// Smallest `k >= 0` whose relative pointwise deviation is at most `eps`.
pub fn uniform_mixing_time(k: &WalkKernel, eps: f64) -> Result<usize, WalkError> {
    check_inputs(k, eps)?;
    let pi = k.stationary_f64();
    first_crossing(&k.to_dense(), 0, "uniform", |m| uniform_distance(m, &pi) <= eps)
}

/// Smallest `n >= 1` whose worst total-variation distance is below `eps`.
pub fn tv_mixing_time(k: &WalkKernel, eps: f64) -> Result<usize, WalkError> {
    check_inputs(k, eps)?;
    let pi = k.stationary_f64();
    first_crossing(&k.to_dense(), 1, "total variation", |m| tv_distance(m, &pi) < eps)
}

fn symmetrized(k: &WalkKernel) -> DMatrix<f64> {
    let pi = k.stationary_f64();
    let sq: Vec<f64> = pi.iter().map(|p| p.sqrt()).collect();
    let n = k.state_count();
    let mut s = DMatrix::zeros(n, n);
    for (x, row) in k.rows().iter().enumerate() {
        for &(y, p) in row {
            s[(x, y)] = sq[x] * p.to_f64().expect("finite") / sq[y];
        }
    }
    (&s + s.transpose()) * 0.5
}

/// Second largest eigenvalue and its eigenvector, the latter rescaled to a
/// right eigenvector of the kernel.
pub fn second_eigenpair(k: &WalkKernel) -> Result<(f64, Vec<f64>), WalkError> {
    if k.state_count() == 1 {
        return Ok((0.0, vec![0.0]));
    }
    if !k.is_irreducible() {
        return Err(WalkError::NotErgodic);
    }
    let eig = SymmetricEigen::new(symmetrized(k));
    let mut order: Vec<usize> = (0..k.state_count()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let i = order[1];
    let pi = k.stationary_f64();
    let v = eig
        .eigenvectors
        .column(i)
        .iter()
        .zip(&pi)
        .map(|(c, p)| c / p.sqrt())
        .collect();
    Ok((eig.eigenvalues[i].max(0.0), v))
}

/// `(λ₂, 1 / (1 - λ₂))`; a single state has `λ₂ = 0`.
pub fn relaxation_time(k: &WalkKernel) -> Result<(f64, f64), WalkError> {
    let (l2, _) = second_eigenpair(k)?;
    Ok((l2, 1.0 / (1.0 - l2)))
}

/// Uniform and total-variation distances of `P^k` for `k = 0..=steps`.
pub fn deviation_curve(k: &WalkKernel, steps: usize) -> Vec<(usize, f64, f64)> {
    let pi = k.stationary_f64();
    let p = k.to_dense();
    let n = k.state_count();
    let mut m = DMatrix::identity(n, n);
    let mut out = Vec::with_capacity(steps + 1);
    for s in 0..=steps {
        out.push((s, uniform_distance(&m, &pi), tv_distance(&m, &pi)));
        m = multiply(&m, &p);
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixingReport {
    pub epsilon: f64,
    pub chain: StateSpace,
    pub tau_uniform: usize,
    pub tau_tv: usize,
    pub tau_rel: f64,
    pub lambda2: f64,
    pub map_id: String,
    pub seed: Option<u64>,
}

pub fn mixing_report(
    q: &Quadrangulation,
    chain: StateSpace,
    eps: f64,
    seed: Option<u64>,
) -> Result<MixingReport, WalkError> {
    let k = match chain {
        StateSpace::Vertex => vertex_kernel(q),
        StateSpace::Face => face_kernel(q),
    };
    let (lambda2, tau_rel) = relaxation_time(&k)?;
    Ok(MixingReport {
        epsilon: eps,
        chain,
        tau_uniform: uniform_mixing_time(&k, eps)?,
        tau_tv: tv_mixing_time(&k, eps)?,
        tau_rel,
        lambda2,
        map_id: q.map().canonical_code().short_hash(),
        seed,
    })
}
