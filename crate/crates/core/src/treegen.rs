//! Labeled plane trees, the Cori–Vauquelin–Schaeffer construction, the
//! white-diagonal bijection to general maps, and exhaustive enumeration.

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::map::{CanonicalCode, MapError, PlanarMap, Quadrangulation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("size must be at least 1, got {0}")]
    InvalidSize(usize),
    #[error("exhaustive enumeration is limited to n <= {max}, got {n}")]
    TooLarge { n: usize, max: usize },
    #[error("invalid tree: {0}")]
    Invalid(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Largest size accepted by [`enumerate_quadrangulations`].
pub const ENUMERATION_LIMIT: usize = 4;

/// A rooted plane tree with integer vertex labels, root label 0.
///
/// The shape is a Dyck word (`true` = step away from the root). Vertices are
/// numbered in preorder, so the `k`-th up step creates vertex `k + 1`, and
/// `increments[k]` is the label change along that step.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LabeledPlaneTree {
    steps: Vec<bool>,
    increments: Vec<i8>,
    labels: Vec<i64>,
    contour: Vec<usize>,
}

impl LabeledPlaneTree {
    pub fn new(steps: Vec<bool>, increments: Vec<i8>) -> Result<Self, TreeError> {
        let n = increments.len();
        if n == 0 {
            return Err(TreeError::InvalidSize(0));
        }
        if steps.len() != 2 * n {
            return Err(TreeError::Invalid(format!(
                "{} steps for {} edges",
                steps.len(),
                n
            )));
        }
        if let Some(&bad) = increments.iter().find(|i| !(-1..=1).contains(*i)) {
            return Err(TreeError::Invalid(format!("label increment {bad}")));
        }
        let mut labels = vec![0i64; n + 1];
        let mut contour = Vec::with_capacity(2 * n + 1);
        let mut stack = vec![0usize];
        let mut next = 1;
        contour.push(0);
        for &up in &steps {
            if up {
                let parent = *stack.last().expect("stack holds the root");
                if next > n {
                    return Err(TreeError::Invalid("too many up steps".into()));
                }
                labels[next] = labels[parent] + increments[next - 1] as i64;
                stack.push(next);
                next += 1;
            } else {
                stack.pop();
                if stack.is_empty() {
                    return Err(TreeError::Invalid("word is not a Dyck path".into()));
                }
            }
            contour.push(*stack.last().unwrap());
        }
        if stack.len() != 1 {
            return Err(TreeError::Invalid("word is not a Dyck path".into()));
        }
        Ok(Self {
            steps,
            increments,
            labels,
            contour,
        })
    }

    pub fn edge_count(&self) -> usize {
        self.increments.len()
    }

    pub fn steps(&self) -> &[bool] {
        &self.steps
    }

    pub fn increments(&self) -> &[i8] {
        &self.increments
    }

    /// Label of each vertex, in preorder.
    pub fn vertex_labels(&self) -> &[i64] {
        &self.labels
    }

    /// Vertex at corner `i` of the contour, for `0 <= i <= 2n` (corner `2n` is corner 0).
    pub fn corner_vertex(&self, i: usize) -> usize {
        self.contour[i]
    }

    pub fn corner_label(&self, i: usize) -> i64 {
        self.labels[self.contour[i % (2 * self.edge_count())]]
    }

    pub fn corner_labels(&self) -> Vec<i64> {
        (0..2 * self.edge_count()).map(|i| self.corner_label(i)).collect()
    }

    pub fn min_label(&self) -> i64 {
        *self.labels.iter().min().expect("nonempty")
    }

    /// Parenthesis word and increments, one line each.
    pub fn to_text(&self) -> String {
        let word: String = self.steps.iter().map(|&u| if u { '(' } else { ')' }).collect();
        let incs: Vec<String> = self.increments.iter().map(|i| i.to_string()).collect();
        format!("{word}\n{}\n", incs.join(" "))
    }

    pub fn from_text(text: &str) -> Result<Self, TreeError> {
        let mut lines = text.lines();
        let word = lines.next().ok_or(TreeError::Parse {
            line: 1,
            message: "missing parenthesis word".into(),
        })?;
        let steps = word
            .chars()
            .map(|c| match c {
                '(' => Ok(true),
                ')' => Ok(false),
                _ => Err(TreeError::Parse {
                    line: 1,
                    message: format!("unexpected character `{c}`"),
                }),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let incs = lines.next().ok_or(TreeError::Parse {
            line: 2,
            message: "missing increments".into(),
        })?;
        let increments = incs
            .split_whitespace()
            .map(|t| {
                t.parse::<i8>().map_err(|_| TreeError::Parse {
                    line: 2,
                    message: format!("invalid increment `{t}`"),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        LabeledPlaneTree::new(steps, increments)
    }
}

impl fmt::Display for LabeledPlaneTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Uniform Dyck word of semilength `n` by the cycle lemma.
pub fn sample_dyck_word<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<bool> {
    let mut seq: Vec<bool> = (0..2 * n + 1).map(|i| i < n).collect();
    seq.shuffle(rng);
    let mut sum = 0i64;
    let mut min = 0i64;
    let mut argmin = 0;
    for (i, &up) in seq.iter().enumerate() {
        sum += if up { 1 } else { -1 };
        if sum < min {
            min = sum;
            argmin = i + 1;
        }
    }
    // rotation starting after the first minimum ends with its only -1 excursion
    let len = seq.len();
    seq.rotate_left(argmin % len);
    seq.pop();
    seq
}

/// Uniform tree over the `3^n · Catalan(n)` labeled plane trees with `n` edges.
pub fn sample_labeled_tree<R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
) -> Result<LabeledPlaneTree, TreeError> {
    if n < 1 {
        return Err(TreeError::InvalidSize(n));
    }
    let steps = sample_dyck_word(n, rng);
    let increments = (0..n).map(|_| rng.gen_range(-1i8..=1)).collect();
    LabeledPlaneTree::new(steps, increments)
}

/// A rooted quadrangulation with a distinguished vertex, built from a tree.
#[derive(Debug, Clone)]
pub struct PointedQuadrangulation {
    pub quad: Quadrangulation,
    /// Map vertex of the extra vertex added to the tree.
    pub pointed_vertex: usize,
    /// Map vertex carrying each contour corner of the tree.
    pub corner_vertex: Vec<usize>,
    /// Label of each contour corner.
    pub corner_labels: Vec<i64>,
    /// Map vertex of each tree vertex (preorder).
    pub tree_vertex: Vec<usize>,
    pub min_label: i64,
}

impl PointedQuadrangulation {
    /// Expected distance from the pointed vertex for each map vertex.
    pub fn label_distances(&self) -> Vec<usize> {
        let mut d = vec![0usize; self.quad.vertex_count()];
        for (c, &v) in self.corner_vertex.iter().enumerate() {
            d[v] = (self.corner_labels[c] - self.min_label + 1) as usize;
        }
        d[self.pointed_vertex] = 0;
        d
    }
}

/// Successor of every corner: the next corner, cyclically, whose label is
/// one less. `None` for corners of minimal label.
pub fn successors(labels: &[i64]) -> Vec<Option<usize>> {
    let len = labels.len();
    let min = *labels.iter().min().expect("nonempty");
    let max = *labels.iter().max().expect("nonempty");
    let mut last_seen = vec![usize::MAX; (max - min + 1) as usize];
    let mut out = vec![None; len];
    for j in (0..2 * len).rev() {
        let i = j % len;
        let l = labels[i];
        if j < len && l > min {
            let s = last_seen[(l - 1 - min) as usize];
            debug_assert!(s != usize::MAX);
            out[i] = Some(s);
        }
        last_seen[(l - min) as usize] = i;
    }
    out
}

/// The CVS construction. Edge `i` (darts `2i`, `2i + 1`) joins corner `i` to
/// its successor, or to the extra vertex. `theta = +1` roots at dart 1
/// (towards the tree root), `theta = -1` at dart 0.
pub fn cvs_forward(tree: &LabeledPlaneTree, theta: i8) -> PointedQuadrangulation {
    assert!(theta == 1 || theta == -1, "theta must be +1 or -1");
    let n = tree.edge_count();
    let len = 2 * n;
    let labels = tree.corner_labels();
    let succ = successors(&labels);
    let min = tree.min_label();
    let k0 = (0..len).find(|&i| labels[i] == min).expect("minimum exists");

    // forward offsets along the boundary of the tree's face, doubled so that
    // the extra vertex sits at an odd position right after corner k0
    let corner_offset = |from: usize, to: usize| 2 * ((to + len - from) % len);
    let point_offset = |from: usize| 2 * ((k0 + len - from) % len) + 1;

    let mut sector: Vec<Vec<(usize, usize)>> = vec![Vec::new(); len];
    let mut at_point: Vec<usize> = Vec::new();
    for i in 0..len {
        match succ[i] {
            Some(s) => {
                sector[i].push((corner_offset(i, s), 2 * i));
                sector[s].push((corner_offset(s, i), 2 * i + 1));
            }
            None => {
                sector[i].push((point_offset(i), 2 * i));
                at_point.push(i);
            }
        }
    }
    for s in &mut sector {
        s.sort_unstable();
    }

    // up step entering each non-root vertex, and the down step leaving it
    let mut enter_up = vec![usize::MAX; n + 1];
    let mut leave_down = vec![usize::MAX; n + 1];
    for (j, &up) in tree.steps().iter().enumerate() {
        if up {
            enter_up[tree.corner_vertex(j + 1)] = j;
        } else {
            leave_down[tree.corner_vertex(j)] = j;
        }
    }
    // after sector j, cross the tree edge it was entered by
    let next_corner = |j: usize| -> usize {
        let arrive = (j + len - 1) % len;
        if tree.steps()[arrive] {
            leave_down[tree.corner_vertex(j)]
        } else {
            enter_up[tree.corner_vertex(arrive)]
        }
    };

    let darts = 2 * len;
    let mut alpha = vec![0; darts];
    for i in 0..len {
        alpha[2 * i] = 2 * i + 1;
        alpha[2 * i + 1] = 2 * i;
    }
    let mut sigma = vec![usize::MAX; darts];
    let mut visited = vec![false; len];
    let mut rotation = Vec::new();
    for start in 0..len {
        if visited[start] {
            continue;
        }
        rotation.clear();
        let mut c = start;
        while !visited[c] {
            visited[c] = true;
            rotation.extend(sector[c].iter().map(|&(_, d)| d));
            c = next_corner(c);
        }
        for w in 0..rotation.len() {
            sigma[rotation[w]] = rotation[(w + 1) % rotation.len()];
        }
    }
    // around the extra vertex the minimal corners appear in contour order
    for w in 0..at_point.len() {
        sigma[2 * at_point[w] + 1] = 2 * at_point[(w + 1) % at_point.len()] + 1;
    }

    let root = if theta == 1 { 1 } else { 0 };
    let map = PlanarMap::new(darts, alpha, sigma, root).expect("CVS output is a planar map");
    let pointed_vertex = map.vertex_of(2 * k0 + 1);
    let corner_vertex: Vec<usize> = (0..len).map(|i| map.vertex_of(2 * i)).collect();
    let mut tree_vertex = vec![0; n + 1];
    for (i, &v) in corner_vertex.iter().enumerate() {
        tree_vertex[tree.corner_vertex(i)] = v;
    }
    let quad = Quadrangulation::new(map).expect("CVS output has square faces");
    PointedQuadrangulation {
        quad,
        pointed_vertex,
        corner_vertex,
        corner_labels: labels,
        tree_vertex,
        min_label: min,
    }
}

/// Uniform pointed quadrangulation with `n` faces.
pub fn sample_pointed_quadrangulation<R: Rng + ?Sized>(
    n_faces: usize,
    rng: &mut R,
) -> Result<(LabeledPlaneTree, PointedQuadrangulation), TreeError> {
    let tree = sample_labeled_tree(n_faces, rng)?;
    let theta = if rng.gen::<bool>() { 1 } else { -1 };
    let pq = cvs_forward(&tree, theta);
    Ok((tree, pq))
}

/// Uniform rooted quadrangulation with `n` faces.
pub fn sample_quadrangulation<R: Rng + ?Sized>(
    n_faces: usize,
    rng: &mut R,
) -> Result<Quadrangulation, TreeError> {
    Ok(sample_pointed_quadrangulation(n_faces, rng)?.1.quad)
}

/// All Dyck words of semilength `n`, in lexicographic order with `(` first.
pub fn dyck_words(n: usize) -> Vec<Vec<bool>> {
    fn rec(open: usize, close: usize, n: usize, cur: &mut Vec<bool>, out: &mut Vec<Vec<bool>>) {
        if cur.len() == 2 * n {
            out.push(cur.clone());
            return;
        }
        if open < n {
            cur.push(true);
            rec(open + 1, close, n, cur, out);
            cur.pop();
        }
        if close < open {
            cur.push(false);
            rec(open, close + 1, n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, 0, n, &mut Vec::new(), &mut out);
    out
}

/// Every labeled plane tree with `n` edges.
pub fn all_labeled_trees(n: usize) -> Vec<LabeledPlaneTree> {
    let mut out = Vec::new();
    for word in dyck_words(n) {
        for code in 0..3usize.pow(n as u32) {
            let mut c = code;
            let incs = (0..n)
                .map(|_| {
                    let d = (c % 3) as i8 - 1;
                    c /= 3;
                    d
                })
                .collect();
            out.push(LabeledPlaneTree::new(word.clone(), incs).expect("valid by construction"));
        }
    }
    out
}

/// Distinct rooted quadrangulations with `n` faces, keyed by canonical code.
pub fn enumerate_quadrangulations(
    n: usize,
) -> Result<BTreeMap<CanonicalCode, Quadrangulation>, TreeError> {
    if n < 1 {
        return Err(TreeError::InvalidSize(n));
    }
    if n > ENUMERATION_LIMIT {
        return Err(TreeError::TooLarge {
            n,
            max: ENUMERATION_LIMIT,
        });
    }
    let mut out = BTreeMap::new();
    for tree in all_labeled_trees(n) {
        for theta in [1, -1] {
            let q = cvs_forward(&tree, theta).quad;
            out.entry(q.map().canonical_code()).or_insert(q);
        }
    }
    Ok(out)
}

/// White-diagonal bijection from quadrangulations with `n` faces to general
/// planar maps with `n` edges.
///
/// Darts of the result are the darts of `q` leaving white vertices (even
/// distance from the root vertex), renumbered increasingly. Dart `d` of the
/// result lies in the corner following `d` counterclockwise.
pub fn trivial_bijection(q: &Quadrangulation) -> TrivialImage {
    let m = q.map();
    let dist = crate::geodesy::distances(q, m.root_vertex());
    let white: Vec<bool> = (0..m.vertex_count()).map(|v| dist[v] % 2 == 0).collect();
    let kept: Vec<usize> = (0..m.dart_count())
        .filter(|&d| white[m.vertex_of(d)])
        .collect();
    let mut index = vec![usize::MAX; m.dart_count()];
    for (i, &d) in kept.iter().enumerate() {
        index[d] = i;
    }
    let sigma_inv = {
        let mut inv = vec![0; m.dart_count()];
        for d in 0..m.dart_count() {
            inv[m.sigma(d)] = d;
        }
        inv
    };
    let mut alpha = vec![0; kept.len()];
    let mut sigma = vec![0; kept.len()];
    for (i, &d) in kept.iter().enumerate() {
        let s = m.sigma(d);
        sigma[i] = index[s];
        alpha[i] = index[sigma_inv[m.phi(m.phi(s))]];
    }
    let root = index[sigma_inv[m.root()]];
    let map = PlanarMap::new(kept.len(), alpha, sigma, root)
        .expect("white diagonals form a planar map");
    TrivialImage {
        map,
        source_dart: kept,
        white,
    }
}

#[derive(Debug, Clone)]
pub struct TrivialImage {
    pub map: PlanarMap,
    /// Quadrangulation dart behind each dart of `map`.
    pub source_dart: Vec<usize>,
    /// Colour of each quadrangulation vertex.
    pub white: Vec<bool>,
}

impl From<MapError> for TreeError {
    fn from(e: MapError) -> Self {
        TreeError::Invalid(e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn dyck_words_are_catalan() {
        let counts: Vec<usize> = (1..=6).map(|n| dyck_words(n).len()).collect();
        assert_eq!(counts, vec![1, 2, 5, 14, 42, 132]);
    }

    #[test]
    fn sampled_words_are_dyck() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..30 {
            let w = sample_dyck_word(n, &mut rng);
            assert_eq!(w.len(), 2 * n);
            let mut h = 0i64;
            for &u in &w {
                h += if u { 1 } else { -1 };
                assert!(h >= 0);
            }
            assert_eq!(h, 0);
        }
    }

    #[test]
    fn successor_scan_matches_naive_search() {
        let labels = [0, 1, 0, -1, 0, 1, 2, 1, 0, -1];
        let s = successors(&labels);
        for i in 0..labels.len() {
            let naive = (1..labels.len())
                .map(|k| (i + k) % labels.len())
                .find(|&j| labels[j] == labels[i] - 1);
            assert_eq!(s[i], naive);
        }
    }

    #[test]
    fn single_edge_tree_gives_path() {
        for inc in -1..=1 {
            let t = LabeledPlaneTree::new(vec![true, false], vec![inc]).unwrap();
            for theta in [1, -1] {
                let pq = cvs_forward(&t, theta);
                let m = pq.quad.map();
                assert_eq!((m.vertex_count(), m.face_count()), (3, 1));
            }
        }
    }

    #[test]
    fn tree_text_round_trip() {
        let t = LabeledPlaneTree::new(vec![true, true, false, true, false, false], vec![1, 0, -1])
            .unwrap();
        assert_eq!(t.to_text(), "(()())\n1 0 -1\n");
        assert_eq!(LabeledPlaneTree::from_text(&t.to_text()).unwrap(), t);
        assert_eq!(t.vertex_labels(), &[0, 1, 1, 0]);
        assert!(LabeledPlaneTree::from_text("())(\n0 0\n").is_err());
        assert!(LabeledPlaneTree::from_text("()\n2\n").is_err());
    }

    #[test]
    fn sampler_rejects_empty_tree() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(
            sample_labeled_tree(0, &mut rng),
            Err(TreeError::InvalidSize(0))
        );
    }
}
