//! wasm-bindgen surface for the static page in `www/`.

use quadmix_core::cut::{
    bottleneck, CutMode, HeuristicBudget, Objective, MAX_EXACT_FACES, MAX_EXACT_VERTICES,
};
use quadmix_core::geodesy::{boundary_edges, face_set_from};
use quadmix_core::harness::{sample_map, SizeUnit};
use quadmix_core::walk::{
    deviation_curve, face_kernel, mixing_report, vertex_kernel, StateSpace,
};
use quadmix_core::Quadrangulation;
use wasm_bindgen::prelude::*;

/// Largest map the page will sample; dense matrix powers dominate beyond it.
pub const MAX_FACES: usize = 400;

fn chain(name: &str) -> Result<StateSpace, String> {
    match name {
        "vertex" => Ok(StateSpace::Vertex),
        "face" => Ok(StateSpace::Face),
        _ => Err(format!("unknown chain {name:?}")),
    }
}

#[wasm_bindgen]
pub struct MapView {
    q: Quadrangulation,
}

#[wasm_bindgen]
impl MapView {
    /// Same map as `quadmix gen --faces FACES --seed SEED`, first sample.
    #[wasm_bindgen(constructor)]
    pub fn sample(faces: usize, seed: u32) -> Result<MapView, String> {
        if !(1..=MAX_FACES).contains(&faces) {
            return Err(format!("faces must lie in 1..={MAX_FACES}"));
        }
        let q = sample_map(u64::from(seed), faces, SizeUnit::Faces, 0).ok_or("sampling failed")?;
        Ok(MapView { q })
    }

    pub fn faces(&self) -> usize {
        self.q.face_count()
    }

    pub fn vertices(&self) -> usize {
        self.q.vertex_count()
    }

    pub fn max_degree(&self) -> usize {
        self.q.map().vertex_degrees().into_iter().max().unwrap_or(0)
    }

    pub fn hash(&self) -> String {
        self.q.map().canonical_code().short_hash()
    }

    pub fn root_vertex(&self) -> usize {
        self.q.map().root_vertex()
    }

    pub fn qmap(&self) -> String {
        self.q.map().to_qmap()
    }

    /// Edge endpoints, flattened as `[u0, v0, u1, v1, ...]`.
    pub fn edges(&self) -> Vec<u32> {
        self.q
            .map()
            .edge_endpoints()
            .into_iter()
            .flat_map(|(a, b)| [a as u32, b as u32])
            .collect()
    }

    /// Corner vertices of each face in boundary order, four per face.
    pub fn face_corners(&self) -> Vec<u32> {
        let m = self.q.map();
        m.face_darts()
            .into_iter()
            .flat_map(|ds| ds.into_iter().map(|d| m.vertex_of(d) as u32).collect::<Vec<_>>())
            .collect()
    }

    /// `[τ_uniform, τ_tv, τ_rel, λ₂]` for the lazy walk on `chain`.
    pub fn mixing(&self, chain_name: &str, eps: f64) -> Result<Vec<f64>, String> {
        let r = mixing_report(&self.q, chain(chain_name)?, eps, None).map_err(|e| e.to_string())?;
        Ok(vec![r.tau_uniform as f64, r.tau_tv as f64, r.tau_rel, r.lambda2])
    }

    /// Worst uniform and total-variation deviations at steps `0..=steps`,
    /// flattened as `[u0, tv0, u1, tv1, ...]`.
    pub fn deviation_curve(&self, chain_name: &str, steps: usize) -> Result<Vec<f64>, String> {
        let k = match chain(chain_name)? {
            StateSpace::Vertex => vertex_kernel(&self.q),
            StateSpace::Face => face_kernel(&self.q),
        };
        Ok(deviation_curve(&k, steps)
            .into_iter()
            .flat_map(|(_, u, tv)| [u, tv])
            .collect())
    }

    /// Exact search when the map is small enough, heuristic otherwise.
    pub fn bottleneck(&self, objective: &str) -> Result<CutView, String> {
        let obj: Objective = objective.parse().map_err(|e: quadmix_core::cut::CutError| e.to_string())?;
        let exact = if obj.on_faces() {
            self.q.face_count() <= MAX_EXACT_FACES
        } else {
            self.q.vertex_count() <= MAX_EXACT_VERTICES
        };
        let mode = if exact { CutMode::Exact } else { CutMode::Heuristic };
        let report = bottleneck(&self.q, obj, mode, &HeuristicBudget::default())
            .map_err(|e| e.to_string())?
            .ok_or("no admissible set")?;
        let cut = if obj.on_faces() {
            boundary_edges(&self.q, &face_set_from(self.q.face_count(), report.witness.iter().copied()))
        } else {
            let ends = self.q.map().edge_endpoints();
            let inside = |v: usize| report.witness.binary_search(&v).is_ok();
            (0..ends.len()).filter(|&e| inside(ends[e].0) != inside(ends[e].1)).collect()
        };
        Ok(CutView {
            on_faces: obj.on_faces(),
            exact,
            value: report.value,
            size: report.size,
            witness: report.witness.iter().map(|&x| x as u32).collect(),
            cut: cut.into_iter().map(|e| e as u32).collect(),
        })
    }
}

#[wasm_bindgen]
pub struct CutView {
    on_faces: bool,
    exact: bool,
    value: f64,
    size: usize,
    witness: Vec<u32>,
    cut: Vec<u32>,
}

#[wasm_bindgen]
impl CutView {
    /// Whether the witness lists faces rather than vertices.
    pub fn on_faces(&self) -> bool {
        self.on_faces
    }

    pub fn exact(&self) -> bool {
        self.exact
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn witness(&self) -> Vec<u32> {
        self.witness.clone()
    }

    /// Indices into `MapView::edges` pairs.
    pub fn cut_edges(&self) -> Vec<u32> {
        self.cut.clone()
    }
}
