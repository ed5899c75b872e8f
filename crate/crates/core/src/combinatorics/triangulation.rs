use std::collections::{BTreeSet, HashMap, HashSet};

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Unordered vertex pair, always stored with `.0 < .1`.
pub type Edge = (usize, usize);

pub fn edge(a: usize, b: usize) -> Edge {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// A closed, oriented, combinatorial torus triangulation.
///
/// Construction validates every invariant (Euler characteristic zero, each
/// edge in exactly two oppositely oriented faces, every vertex link a single
/// cycle), so holding a `Triangulation` means holding a valid torus.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Triangulation {
    vertex_count: usize,
    faces: Vec<[usize; 3]>,
    edges: Vec<Edge>,
}

impl Triangulation {
    pub fn new(vertex_count: usize, faces: Vec<[usize; 3]>) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidTriangulation(msg));
        if vertex_count == 0 {
            return bad("no vertices".into());
        }
        let mut directed: HashSet<(usize, usize)> = HashSet::new();
        for (fi, f) in faces.iter().enumerate() {
            if f.iter().any(|&v| v >= vertex_count) {
                return bad(format!("face {fi} references a vertex >= {vertex_count}"));
            }
            if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                return bad(format!("face {fi} repeats a vertex"));
            }
            for (a, b) in [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])] {
                if !directed.insert((a, b)) {
                    return bad(format!(
                        "directed edge ({a},{b}) used twice; surface not oriented"
                    ));
                }
            }
        }
        for &(a, b) in &directed {
            if !directed.contains(&(b, a)) {
                return bad(format!("edge ({a},{b}) lies in only one face"));
            }
        }
        let edges: Vec<Edge> = directed
            .iter()
            .filter(|(a, b)| a < b)
            .copied()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();

        let euler = vertex_count as i64 - edges.len() as i64 + faces.len() as i64;
        if euler != 0 {
            return bad(format!("Euler characteristic {euler}, expected 0"));
        }

        let t = Triangulation {
            vertex_count,
            faces,
            edges,
        };
        for v in 0..vertex_count {
            let around = t.faces_at(v).len();
            if around == 0 {
                return bad(format!("vertex {v} is in no face"));
            }
            if t.link(v).len() != around {
                return bad(format!("link of vertex {v} is not a single cycle"));
            }
        }
        Ok(t)
    }

    /// The 7-vertex torus whose 1-skeleton is K7: faces `(i, i+1, i+3)` and
    /// `(i, i+3, i+2)` mod 7.
    pub fn moebius() -> Self {
        let faces = (0..7)
            .flat_map(|i| [[i, (i + 1) % 7, (i + 3) % 7], [i, (i + 3) % 7, (i + 2) % 7]])
            .collect();
        Triangulation::new(7, faces).expect("cyclic Moebius face list is a valid torus")
    }

    /// The vertex-transitive 8-vertex torus with all degrees 6, labelled to
    /// match the pup tent coordinates. Faces are oriented counter-clockwise in
    /// the intrinsic development.
    pub fn best8() -> Self {
        let faces = BEST8_FACES.to_vec();
        Triangulation::new(8, faces).expect("best 8-vertex face list is a valid torus")
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count as i64 - self.edges.len() as i64 + self.faces.len() as i64
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges
            .iter()
            .filter(|(a, b)| *a == v || *b == v)
            .count()
    }

    pub fn faces_at(&self, v: usize) -> Vec<usize> {
        (0..self.faces.len())
            .filter(|&fi| self.faces[fi].contains(&v))
            .collect()
    }

    /// Neighbours of `v` in the cyclic order induced by the face orientation.
    pub fn link(&self, v: usize) -> Vec<usize> {
        let mut next: HashMap<usize, usize> = HashMap::new();
        for f in &self.faces {
            if let Some(i) = f.iter().position(|&x| x == v) {
                next.insert(f[(i + 1) % 3], f[(i + 2) % 3]);
            }
        }
        let Some(&start) = next.keys().min() else {
            return Vec::new();
        };
        let mut cycle = vec![start];
        let mut cur = start;
        while let Some(&n) = next.get(&cur) {
            if n == start || cycle.len() > next.len() {
                break;
            }
            cycle.push(n);
            cur = n;
        }
        cycle
    }

    /// Indices of the two faces containing edge `(a, b)`.
    pub fn faces_on_edge(&self, a: usize, b: usize) -> Vec<usize> {
        (0..self.faces.len())
            .filter(|&fi| self.faces[fi].contains(&a) && self.faces[fi].contains(&b))
            .collect()
    }

    pub fn face_key(&self, fi: usize) -> [usize; 3] {
        sorted3(self.faces[fi])
    }

    pub fn contains_face(&self, tri: [usize; 3]) -> bool {
        let key = sorted3(tri);
        self.faces.iter().any(|f| sorted3(*f) == key)
    }

    /// True iff relabelling by `perm` maps the face set onto itself
    /// (orientation ignored).
    pub fn is_automorphism(&self, perm: &[usize]) -> bool {
        if perm.len() != self.vertex_count {
            return false;
        }
        let keys: HashSet<[usize; 3]> = self.faces.iter().map(|f| sorted3(*f)).collect();
        self.faces
            .iter()
            .all(|f| keys.contains(&sorted3([perm[f[0]], perm[f[1]], perm[f[2]]])))
    }

    /// All vertex relabellings preserving the face set, by brute force over
    /// every permutation. Only sensible for small vertex counts.
    pub fn automorphisms(&self) -> Vec<Vec<usize>> {
        (0..self.vertex_count)
            .permutations(self.vertex_count)
            .filter(|p| self.is_automorphism(p))
            .collect()
    }

    /// Pairs of distinct face indices `(i, j)`, `i < j`, grouped by how many
    /// vertices they share.
    pub fn face_pairs_by_shared(&self) -> [Vec<(usize, usize)>; 3] {
        let mut out: [Vec<(usize, usize)>; 3] = Default::default();
        for i in 0..self.faces.len() {
            for j in (i + 1)..self.faces.len() {
                let shared = shared_vertices(self.faces[i], self.faces[j]).len();
                if shared <= 2 {
                    out[shared].push((i, j));
                }
            }
        }
        out
    }
}

pub fn sorted3(mut f: [usize; 3]) -> [usize; 3] {
    f.sort_unstable();
    f
}

pub fn shared_vertices(a: [usize; 3], b: [usize; 3]) -> Vec<usize> {
    a.iter().copied().filter(|v| b.contains(v)).collect()
}

/// Read off the intrinsic development of the pup tent: an edge joins two
/// lifted vertices exactly when their planar distance equals the spatial one.
const BEST8_FACES: [[usize; 3]; 16] = [
    [0, 1, 2],
    [0, 2, 4],
    [0, 3, 1],
    [0, 4, 6],
    [0, 5, 3],
    [0, 6, 5],
    [1, 3, 4],
    [1, 4, 7],
    [1, 5, 2],
    [1, 7, 5],
    [2, 5, 6],
    [2, 6, 7],
    [2, 7, 4],
    [3, 5, 7],
    [3, 6, 4],
    [3, 7, 6],
];

/// The pup tent's 2-fold rotation acts on vertices as (04)(13)(26)(57).
pub const PUP_TENT_SYMMETRY: [usize; 8] = [4, 3, 6, 1, 0, 7, 2, 5];
