//! Graph distances, balls, hulls and cuts on quadrangulations.

use std::collections::VecDeque;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::map::{PlanarMap, Quadrangulation};
use crate::treegen::PointedQuadrangulation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeodesyError {
    #[error("radius must be at least 1, got {0}")]
    InvalidRadius(usize),
    #[error("spacing must be at least 1")]
    InvalidSpacing,
}

/// Set of faces of a host map.
pub type FaceSet = FixedBitSet;

pub const UNREACHABLE: usize = usize::MAX;

fn bfs(m: &PlanarMap, sources: &[usize]) -> Vec<usize> {
    let adj = vertex_adjacency(m);
    let mut dist = vec![UNREACHABLE; m.vertex_count()];
    let mut queue = VecDeque::new();
    for &s in sources {
        if dist[s] != 0 {
            dist[s] = 0;
            queue.push_back(s);
        }
    }
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if dist[w] == UNREACHABLE {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Neighbours of every vertex, one entry per dart.
pub fn vertex_adjacency(m: &PlanarMap) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); m.vertex_count()];
    for d in 0..m.dart_count() {
        adj[m.vertex_of(d)].push(m.head_of(d));
    }
    adj
}

/// Graph distances from `v`.
pub fn distances(q: &Quadrangulation, v: usize) -> Vec<usize> {
    bfs(q.map(), &[v])
}

/// Graph distances from the nearest of `sources`.
pub fn multi_source_distances(q: &Quadrangulation, sources: &[usize]) -> Vec<usize> {
    bfs(q.map(), sources)
}

/// Faces incident to a vertex at distance at most `r - 1` from `v`.
pub fn ball_faces(q: &Quadrangulation, v: usize, r: usize) -> Result<FaceSet, GeodesyError> {
    if r < 1 {
        return Err(GeodesyError::InvalidRadius(r));
    }
    let m = q.map();
    let dist = distances(q, v);
    let mut ball = FaceSet::with_capacity(m.face_count());
    for d in 0..m.dart_count() {
        if dist[m.vertex_of(d)] < r {
            ball.insert(m.face_of(d));
        }
    }
    Ok(ball)
}

/// Components of `faces` under sharing an edge, each as a sorted list.
pub fn dual_components(m: &PlanarMap, faces: &FaceSet) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); m.face_count()];
    for (a, b) in m.edge_faces() {
        if a != b {
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    let mut seen = FixedBitSet::with_capacity(m.face_count());
    let mut out = Vec::new();
    for f in faces.ones() {
        if seen.contains(f) {
            continue;
        }
        seen.insert(f);
        let mut comp = vec![f];
        let mut head = 0;
        while head < comp.len() {
            let g = comp[head];
            head += 1;
            for &h in &adj[g] {
                if faces.contains(h) && !seen.contains(h) {
                    seen.insert(h);
                    comp.push(h);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BallReport {
    pub center: usize,
    pub radius: usize,
    pub ball: FaceSet,
    pub hull: FaceSet,
    pub excluded_component: FaceSet,
}

/// Ball plus every component of its complement except the largest one.
/// Ties go to the component with the smallest face index.
pub fn hull_faces(q: &Quadrangulation, v: usize, r: usize) -> Result<BallReport, GeodesyError> {
    let ball = ball_faces(q, v, r)?;
    let m = q.map();
    let mut complement = ball.clone();
    complement.toggle_range(..);
    let comps = dual_components(m, &complement);
    let mut excluded_component = FaceSet::with_capacity(m.face_count());
    // components come out ordered by smallest face, so the first maximum wins
    if let Some(best) = comps
        .iter()
        .enumerate()
        .max_by(|(i, a), (j, b)| a.len().cmp(&b.len()).then(j.cmp(i)))
        .map(|(_, c)| c)
    {
        for &f in best {
            excluded_component.insert(f);
        }
    }
    let mut hull = excluded_component.clone();
    hull.toggle_range(..);
    Ok(BallReport {
        center: v,
        radius: r,
        ball,
        hull,
        excluded_component,
    })
}

/// Edges with a face of `s` on exactly one side, as sorted edge indices.
pub fn boundary_edges(q: &Quadrangulation, s: &FaceSet) -> Vec<usize> {
    q.map()
        .edge_faces()
        .iter()
        .enumerate()
        .filter(|(_, &(a, b))| s.contains(a) != s.contains(b))
        .map(|(e, _)| e)
        .collect()
}

/// Edges with exactly one endpoint in `a`, counted with multiplicity.
pub fn vertex_cut(q: &Quadrangulation, a: &FixedBitSet) -> Vec<usize> {
    q.map()
        .edge_endpoints()
        .iter()
        .enumerate()
        .filter(|(_, &(x, y))| a.contains(x) != a.contains(y))
        .map(|(e, _)| e)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContourCover {
    pub spacing: usize,
    pub radius: usize,
    pub centers: Vec<usize>,
    pub cover_verified: bool,
}

/// Centres at every `spacing`-th contour corner; verified when every vertex
/// lies within `radius` of some centre.
pub fn contour_cover(
    pq: &PointedQuadrangulation,
    radius: usize,
    spacing: usize,
) -> Result<ContourCover, GeodesyError> {
    if spacing == 0 {
        return Err(GeodesyError::InvalidSpacing);
    }
    let corners = pq.corner_vertex.len();
    let mut centers: Vec<usize> = (0..corners)
        .step_by(spacing)
        .map(|c| pq.corner_vertex[c])
        .collect();
    centers.sort_unstable();
    centers.dedup();
    let dist = multi_source_distances(&pq.quad, &centers);
    let cover_verified = dist.iter().all(|&d| d <= radius);
    Ok(ContourCover {
        spacing,
        radius,
        centers,
        cover_verified,
    })
}

/// Halves the spacing, starting from the contour length, until the cover
/// is verified or the spacing reaches 1.
pub fn adaptive_contour_cover(pq: &PointedQuadrangulation, radius: usize) -> ContourCover {
    let mut k = pq.corner_vertex.len().max(1);
    loop {
        let cover = contour_cover(pq, radius, k).expect("spacing is positive");
        if cover.cover_verified || k == 1 {
            return cover;
        }
        k /= 2;
    }
}

pub fn face_set_from(n_faces: usize, faces: impl IntoIterator<Item = usize>) -> FaceSet {
    let mut s = FaceSet::with_capacity(n_faces);
    for f in faces {
        s.insert(f);
    }
    s
}
