//! Rooted planar maps encoded as dart permutations.
//!
//! A map on `2E` darts is given by an edge involution `alpha` and a vertex
//! rotation `sigma` (counterclockwise). Faces are the cycles of
//! `phi = sigma ∘ alpha`. Vertices, faces and edges are numbered in order of
//! their smallest dart.

use std::fmt;
use std::str::FromStr;

use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MapError {
    #[error("map must have a positive even number of darts, got {0}")]
    BadDartCount(usize),
    #[error("{which} has length {len}, expected {expected}")]
    LengthMismatch {
        which: &'static str,
        len: usize,
        expected: usize,
    },
    #[error("{0} is not a permutation")]
    NotPermutation(&'static str),
    #[error("alpha is not an involution at dart {0}")]
    NotInvolution(usize),
    #[error("alpha has a fixed point at dart {0}")]
    FixedPointInAlpha(usize),
    #[error("root dart {root} out of range for {darts} darts")]
    RootOutOfRange { root: usize, darts: usize },
    #[error("darts do not form a single connected map")]
    Disconnected,
    #[error("map is not planar: V - E + F = {0}")]
    NonPlanar(i64),
    #[error("face {face} has degree {degree}, expected 4")]
    NotQuadrangulation { face: usize, degree: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// A validated rooted planar (genus zero) map.
#[derive(Clone, PartialEq, Eq)]
pub struct PlanarMap {
    alpha: Vec<usize>,
    sigma: Vec<usize>,
    root: usize,
    vertex_of: Vec<usize>,
    face_of: Vec<usize>,
    edge_of: Vec<usize>,
    vertex_count: usize,
    face_count: usize,
}

fn check_permutation(p: &[usize], name: &'static str) -> Result<(), MapError> {
    let mut seen = vec![false; p.len()];
    for &x in p {
        if x >= p.len() || seen[x] {
            return Err(MapError::NotPermutation(name));
        }
        seen[x] = true;
    }
    Ok(())
}

/// Labels the cycles of `next`, numbering them by smallest element.
fn cycle_labels(next: impl Fn(usize) -> usize, n: usize) -> (Vec<usize>, usize) {
    let mut label = vec![usize::MAX; n];
    let mut count = 0;
    for start in 0..n {
        if label[start] != usize::MAX {
            continue;
        }
        let mut d = start;
        loop {
            label[d] = count;
            d = next(d);
            if d == start {
                break;
            }
        }
        count += 1;
    }
    (label, count)
}

impl PlanarMap {
    /// Validates the permutation pair and builds the map.
    pub fn new(
        dart_count: usize,
        alpha: Vec<usize>,
        sigma: Vec<usize>,
        root: usize,
    ) -> Result<Self, MapError> {
        if dart_count == 0 || dart_count % 2 != 0 {
            return Err(MapError::BadDartCount(dart_count));
        }
        for (which, v) in [("alpha", &alpha), ("sigma", &sigma)] {
            if v.len() != dart_count {
                return Err(MapError::LengthMismatch {
                    which,
                    len: v.len(),
                    expected: dart_count,
                });
            }
        }
        check_permutation(&alpha, "alpha")?;
        check_permutation(&sigma, "sigma")?;
        for d in 0..dart_count {
            if alpha[d] == d {
                return Err(MapError::FixedPointInAlpha(d));
            }
            if alpha[alpha[d]] != d {
                return Err(MapError::NotInvolution(d));
            }
        }
        if root >= dart_count {
            return Err(MapError::RootOutOfRange {
                root,
                darts: dart_count,
            });
        }

        // transitivity of <alpha, sigma>
        let mut seen = vec![false; dart_count];
        let mut stack = vec![root];
        seen[root] = true;
        let mut reached = 1;
        while let Some(d) = stack.pop() {
            for e in [alpha[d], sigma[d]] {
                if !seen[e] {
                    seen[e] = true;
                    reached += 1;
                    stack.push(e);
                }
            }
        }
        if reached != dart_count {
            return Err(MapError::Disconnected);
        }

        let (vertex_of, vertex_count) = cycle_labels(|d| sigma[d], dart_count);
        let (face_of, face_count) = cycle_labels(|d| sigma[alpha[d]], dart_count);
        let mut edge_of = vec![0; dart_count];
        let mut edges = 0;
        for d in 0..dart_count {
            if d < alpha[d] {
                edge_of[d] = edges;
                edge_of[alpha[d]] = edges;
                edges += 1;
            }
        }
        let euler = vertex_count as i64 - edges as i64 + face_count as i64;
        if euler != 2 {
            return Err(MapError::NonPlanar(euler));
        }
        Ok(Self {
            alpha,
            sigma,
            root,
            vertex_of,
            face_of,
            edge_of,
            vertex_count,
            face_count,
        })
    }

    pub fn dart_count(&self) -> usize {
        self.alpha.len()
    }

    pub fn edge_count(&self) -> usize {
        self.alpha.len() / 2
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn face_count(&self) -> usize {
        self.face_count
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn alpha(&self, d: usize) -> usize {
        self.alpha[d]
    }

    pub fn sigma(&self, d: usize) -> usize {
        self.sigma[d]
    }

    /// Face permutation `sigma ∘ alpha`.
    pub fn phi(&self, d: usize) -> usize {
        self.sigma[self.alpha[d]]
    }

    pub fn alpha_table(&self) -> &[usize] {
        &self.alpha
    }

    pub fn sigma_table(&self) -> &[usize] {
        &self.sigma
    }

    /// Tail vertex of a dart.
    pub fn vertex_of(&self, d: usize) -> usize {
        self.vertex_of[d]
    }

    /// Head vertex of a dart.
    pub fn head_of(&self, d: usize) -> usize {
        self.vertex_of[self.alpha[d]]
    }

    pub fn face_of(&self, d: usize) -> usize {
        self.face_of[d]
    }

    pub fn edge_of(&self, d: usize) -> usize {
        self.edge_of[d]
    }

    pub fn root_vertex(&self) -> usize {
        self.vertex_of[self.root]
    }

    /// Number of darts leaving each vertex (loops count twice).
    pub fn vertex_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertex_count];
        for &v in &self.vertex_of {
            deg[v] += 1;
        }
        deg
    }

    pub fn face_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.face_count];
        for &f in &self.face_of {
            deg[f] += 1;
        }
        deg
    }

    /// Darts around each vertex in rotation order, starting from the smallest.
    pub fn vertex_darts(&self) -> Vec<Vec<usize>> {
        self.orbits(|d| self.sigma[d], &self.vertex_of, self.vertex_count)
    }

    /// Darts along each face boundary in `phi` order, starting from the smallest.
    pub fn face_darts(&self) -> Vec<Vec<usize>> {
        self.orbits(|d| self.phi(d), &self.face_of, self.face_count)
    }

    fn orbits(&self, next: impl Fn(usize) -> usize, label: &[usize], count: usize) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); count];
        for d in 0..self.dart_count() {
            let c = label[d];
            if out[c].is_empty() {
                let mut e = d;
                loop {
                    out[c].push(e);
                    e = next(e);
                    if e == d {
                        break;
                    }
                }
            }
        }
        out
    }

    /// Endpoints `(tail, head)` of each edge, oriented from its smaller dart.
    pub fn edge_endpoints(&self) -> Vec<(usize, usize)> {
        (0..self.dart_count())
            .filter(|&d| d < self.alpha[d])
            .map(|d| (self.vertex_of[d], self.head_of(d)))
            .collect()
    }

    /// Faces on the two sides of each edge.
    pub fn edge_faces(&self) -> Vec<(usize, usize)> {
        (0..self.dart_count())
            .filter(|&d| d < self.alpha[d])
            .map(|d| (self.face_of[d], self.face_of[self.alpha[d]]))
            .collect()
    }

    /// Dual map on the same darts: rotation `phi`, same involution, same root.
    pub fn dual(&self) -> PlanarMap {
        let sigma: Vec<usize> = (0..self.dart_count()).map(|d| self.phi(d)).collect();
        PlanarMap::new(self.dart_count(), self.alpha.clone(), sigma, self.root)
            .expect("dual of a planar map is planar")
    }

    /// Relabels the darts in breadth-first order from the root.
    pub fn canonical_code(&self) -> CanonicalCode {
        let n = self.dart_count();
        let mut rank = vec![usize::MAX; n];
        let mut order = Vec::with_capacity(n);
        rank[self.root] = 0;
        order.push(self.root);
        let mut head = 0;
        while head < order.len() {
            let d = order[head];
            head += 1;
            for e in [self.alpha[d], self.sigma[d]] {
                if rank[e] == usize::MAX {
                    rank[e] = order.len();
                    order.push(e);
                }
            }
        }
        let mut bytes = Vec::with_capacity(4 * (2 * n + 1));
        bytes.extend_from_slice(&(n as u32).to_le_bytes());
        for table in [&self.alpha, &self.sigma] {
            for &d in &order {
                bytes.extend_from_slice(&(rank[table[d]] as u32).to_le_bytes());
            }
        }
        CanonicalCode(bytes)
    }

    /// Canonical rank of every dart, as used by [`PlanarMap::canonical_code`].
    pub fn canonical_ranks(&self) -> Vec<usize> {
        let n = self.dart_count();
        let mut rank = vec![usize::MAX; n];
        let mut order = vec![self.root];
        rank[self.root] = 0;
        let mut head = 0;
        while head < order.len() {
            let d = order[head];
            head += 1;
            for e in [self.alpha[d], self.sigma[d]] {
                if rank[e] == usize::MAX {
                    rank[e] = order.len();
                    order.push(e);
                }
            }
        }
        rank
    }

    /// Same map with darts renamed by `perm` (dart `d` becomes `perm[d]`).
    pub fn relabel(&self, perm: &[usize]) -> Result<PlanarMap, MapError> {
        let n = self.dart_count();
        check_permutation(perm, "relabelling")?;
        let mut alpha = vec![0; n];
        let mut sigma = vec![0; n];
        for d in 0..n {
            alpha[perm[d]] = perm[self.alpha[d]];
            sigma[perm[d]] = perm[self.sigma[d]];
        }
        PlanarMap::new(n, alpha, sigma, perm[self.root])
    }

    pub fn with_root(&self, root: usize) -> Result<PlanarMap, MapError> {
        PlanarMap::new(self.dart_count(), self.alpha.clone(), self.sigma.clone(), root)
    }

    /// QMAP v1 text.
    pub fn to_qmap(&self) -> String {
        let join = |v: &[usize]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        format!(
            "QMAP 1\ndarts {}\nalpha {}\nsigma {}\nroot {}\n",
            self.dart_count(),
            join(&self.alpha),
            join(&self.sigma),
            self.root
        )
    }

    pub fn from_qmap(text: &str) -> Result<PlanarMap, MapError> {
        let mut lines = text.split('\n').enumerate().map(|(i, l)| (i + 1, l));
        let mut field = |key: &str| -> Result<(usize, Vec<usize>), MapError> {
            let (line, raw) = lines.next().ok_or(MapError::Parse {
                line: 0,
                message: format!("missing `{key}` line"),
            })?;
            let mut parts = raw.split(' ');
            if parts.next() != Some(key) {
                return Err(MapError::Parse {
                    line,
                    message: format!("expected `{key}`"),
                });
            }
            let values = parts
                .map(|t| {
                    t.parse::<usize>().map_err(|_| MapError::Parse {
                        line,
                        message: format!("invalid integer `{t}`"),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok((line, values))
        };
        let (line, version) = field("QMAP")?;
        if version != [1] {
            return Err(MapError::Parse {
                line,
                message: "unsupported QMAP version".into(),
            });
        }
        let single = |(line, v): (usize, Vec<usize>), key: &str| -> Result<usize, MapError> {
            match v.as_slice() {
                [x] => Ok(*x),
                _ => Err(MapError::Parse {
                    line,
                    message: format!("`{key}` takes exactly one value"),
                }),
            }
        };
        let darts = single(field("darts")?, "darts")?;
        let (aline, alpha) = field("alpha")?;
        let (sline, sigma) = field("sigma")?;
        let root = single(field("root")?, "root")?;
        for (line, v, key) in [(aline, &alpha, "alpha"), (sline, &sigma, "sigma")] {
            if v.len() != darts {
                return Err(MapError::Parse {
                    line,
                    message: format!("`{key}` has {} entries, expected {darts}", v.len()),
                });
            }
        }
        PlanarMap::new(darts, alpha, sigma, root)
    }
}

impl fmt::Debug for PlanarMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PlanarMap")
            .field("alpha", &self.alpha)
            .field("sigma", &self.sigma)
            .field("root", &self.root)
            .finish()
    }
}

impl FromStr for PlanarMap {
    type Err = MapError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PlanarMap::from_qmap(s)
    }
}

/// Byte string identifying a rooted map up to root-preserving isomorphism.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalCode(Vec<u8>);

impl CanonicalCode {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    /// First 16 hex digits of the SHA-256 of the code.
    pub fn short_hash(&self) -> String {
        let digest = Sha256::digest(&self.0);
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// A planar map all of whose faces have degree 4.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quadrangulation {
    map: PlanarMap,
}

impl Quadrangulation {
    pub fn new(map: PlanarMap) -> Result<Self, MapError> {
        for (face, degree) in map.face_degrees().into_iter().enumerate() {
            if degree != 4 {
                return Err(MapError::NotQuadrangulation { face, degree });
            }
        }
        Ok(Self { map })
    }

    pub fn map(&self) -> &PlanarMap {
        &self.map
    }

    pub fn into_map(self) -> PlanarMap {
        self.map
    }

    pub fn face_count(&self) -> usize {
        self.map.face_count()
    }

    pub fn vertex_count(&self) -> usize {
        self.map.vertex_count()
    }

    pub fn from_qmap(text: &str) -> Result<Self, MapError> {
        Quadrangulation::new(PlanarMap::from_qmap(text)?)
    }

    /// The quadrangulation with one face: a path on three vertices, rooted
    /// at the dart leaving an end vertex.
    pub fn path() -> Self {
        let map = PlanarMap::new(4, vec![1, 0, 3, 2], vec![0, 2, 1, 3], 0).expect("valid");
        Quadrangulation::new(map).expect("one face of degree 4")
    }
}
