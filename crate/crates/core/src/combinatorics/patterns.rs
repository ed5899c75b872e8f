//! Internal edge patterns on the 7-vertex torus.
//!
//! Assuming all seven vertices lie on the convex hull, exactly 6 of the 21
//! edges of K7 are off the hull boundary ("internal"). A pattern is such a
//! 6-set, normalised by symmetry to contain the edge (0, 1).

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use super::triangulation::{edge, Edge, Triangulation};

pub const K7_VERTICES: usize = 7;
pub const INTERNAL_EDGE_COUNT: usize = 6;
pub const EXTERNAL_EDGE_COUNT: usize = 15;

/// The 21 edges of K7 in lexicographic order.
pub fn k7_edges() -> Vec<Edge> {
    (0..K7_VERTICES).tuple_combinations().collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgePattern {
    internal: [Edge; INTERNAL_EDGE_COUNT],
}

impl EdgePattern {
    /// Validates size, distinctness, range, and the (0,1) normalisation.
    pub fn new(edges: impl IntoIterator<Item = Edge>) -> Option<Self> {
        let mut list: Vec<Edge> = edges.into_iter().map(|(a, b)| edge(a, b)).collect();
        list.sort_unstable();
        list.dedup();
        if list.len() != INTERNAL_EDGE_COUNT
            || list.iter().any(|&(a, b)| a == b || b >= K7_VERTICES)
            || list[0] != (0, 1)
        {
            return None;
        }
        Some(EdgePattern {
            internal: list.try_into().ok()?,
        })
    }

    /// Same as [`EdgePattern::new`] but without the (0,1) normalisation, for
    /// images under automorphisms.
    pub fn unnormalized(edges: impl IntoIterator<Item = Edge>) -> Option<Self> {
        let mut list: Vec<Edge> = edges.into_iter().map(|(a, b)| edge(a, b)).collect();
        list.sort_unstable();
        list.dedup();
        if list.len() != INTERNAL_EDGE_COUNT
            || list.iter().any(|&(a, b)| a == b || b >= K7_VERTICES)
        {
            return None;
        }
        Some(EdgePattern {
            internal: list.try_into().ok()?,
        })
    }

    pub fn internal_edges(&self) -> &[Edge; INTERNAL_EDGE_COUNT] {
        &self.internal
    }

    pub fn external_edges(&self) -> Vec<Edge> {
        k7_edges()
            .into_iter()
            .filter(|e| !self.internal.contains(e))
            .collect()
    }

    pub fn is_internal(&self, a: usize, b: usize) -> bool {
        self.internal.contains(&edge(a, b))
    }

    pub fn is_external(&self, a: usize, b: usize) -> bool {
        a != b && !self.is_internal(a, b)
    }

    pub fn contains_normalizing_edge(&self) -> bool {
        self.internal.contains(&(0, 1))
    }

    pub fn internal_degree(&self, v: usize) -> usize {
        self.internal
            .iter()
            .filter(|(a, b)| *a == v || *b == v)
            .count()
    }

    pub fn relabel(&self, perm: &[usize]) -> EdgePattern {
        EdgePattern::unnormalized(self.internal.iter().map(|&(a, b)| (perm[a], perm[b])))
            .expect("relabelling preserves pattern size")
    }
}

impl std::fmt::Display for EdgePattern {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self
            .internal
            .iter()
            .map(|(a, b)| format!("{a}-{b}"))
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// All C(20,5) = 15504 normalised patterns, lexicographic on sorted edge lists.
pub fn enumerate_patterns() -> Vec<EdgePattern> {
    let rest: Vec<Edge> = k7_edges().into_iter().filter(|&e| e != (0, 1)).collect();
    rest.into_iter()
        .combinations(INTERNAL_EDGE_COUNT - 1)
        .map(|combo| {
            EdgePattern::new(std::iter::once((0, 1)).chain(combo)).expect("valid by construction")
        })
        .collect()
}

/// A hull vertex has degree at least 3 on the hull boundary, hence at most 3
/// internal edges.
pub fn passes_degree_filter(p: &EdgePattern) -> bool {
    (0..K7_VERTICES).all(|v| p.internal_degree(v) <= 3)
}

pub fn filter_internal_degree(patterns: &[EdgePattern]) -> Vec<EdgePattern> {
    patterns
        .iter()
        .filter(|p| passes_degree_filter(p))
        .cloned()
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriangleClassification {
    pub internal_faces: Vec<usize>,
    pub external_faces: Vec<usize>,
}

/// A face with an internal edge is internal; a face bounded by three external
/// edges cannot be internal (it would separate the hull), so it is external.
pub fn classify_triangles(t: &Triangulation, p: &EdgePattern) -> TriangleClassification {
    let (internal_faces, external_faces) = (0..t.faces().len()).partition(|&fi| {
        let [a, b, c] = t.faces()[fi];
        p.is_internal(a, b) || p.is_internal(b, c) || p.is_internal(c, a)
    });
    TriangleClassification {
        internal_faces,
        external_faces,
    }
}

/// True iff `a` is `b` up to rotation and reflection.
pub fn dihedral_equivalent(a: &[usize], b: &[usize]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let n = a.len();
    if n == 0 {
        return true;
    }
    let reversed: Vec<usize> = b.iter().rev().copied().collect();
    (0..n).any(|shift| {
        (0..n).all(|i| a[i] == b[(i + shift) % n])
            || (0..n).all(|i| a[i] == reversed[(i + shift) % n])
    })
}

/// External neighbours of `q` in the cyclic order of its link in `t`.
pub fn external_link(t: &Triangulation, p: &EdgePattern, q: usize) -> Vec<usize> {
    t.link(q)
        .into_iter()
        .filter(|&v| p.is_external(q, v))
        .collect()
}

/// The Cycle Rule at vertex `q`: some cyclic arrangement of the external
/// neighbours must (1) step only along external edges and (2) be a dihedral
/// permutation of the order those neighbours have in the torus link.
///
/// Candidates are enumerated one per dihedral class: first element fixed,
/// reflections skipped, i.e. (K-1)!/2 cycles for K >= 3.
pub fn vertex_cycle_rule(t: &Triangulation, p: &EdgePattern, q: usize) -> bool {
    let reference = external_link(t, p, q);
    let k = reference.len();
    if k < 3 {
        return false;
    }
    let first = reference[0];
    reference[1..]
        .iter()
        .copied()
        .permutations(k - 1)
        .filter(|rest| rest[0] < rest[k - 2])
        .any(|rest| {
            let mut cycle = Vec::with_capacity(k);
            cycle.push(first);
            cycle.extend(rest);
            let steps_external = (0..k).all(|i| p.is_external(cycle[i], cycle[(i + 1) % k]));
            steps_external && dihedral_equivalent(&cycle, &reference)
        })
}

/// Some vertex all of whose incident faces are external, if any.
pub fn conclusion_check(t: &Triangulation, p: &EdgePattern) -> Option<usize> {
    let classes = classify_triangles(t, p);
    (0..t.vertex_count()).find(|&v| {
        t.faces_at(v)
            .iter()
            .all(|fi| classes.external_faces.contains(fi))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pat(edges: &[(usize, usize)]) -> EdgePattern {
        EdgePattern::new(edges.iter().copied()).unwrap()
    }

    #[test]
    fn enumeration_size_and_order() {
        let all = enumerate_patterns();
        assert_eq!(all.len(), 15504);
        assert!(all.iter().all(EdgePattern::contains_normalizing_edge));
        assert_eq!(
            all[0].internal_edges(),
            &[(0, 1), (0, 2), (0, 3), (0, 4), (0, 5), (0, 6)]
        );
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn pattern_validation() {
        assert!(EdgePattern::new([(0, 2), (0, 3), (0, 4), (0, 5), (0, 6), (1, 2)]).is_none());
        assert!(EdgePattern::new([(0, 1), (0, 1), (0, 4), (0, 5), (0, 6), (1, 2)]).is_none());
        assert!(EdgePattern::new([(0, 1), (0, 7), (0, 4), (0, 5), (0, 6), (1, 2)]).is_none());
        assert_eq!(
            pat(&[(0, 1), (2, 3), (4, 5), (1, 2), (3, 4), (5, 6)])
                .external_edges()
                .len(),
            15
        );
    }

    #[test]
    fn degree_filter_cases() {
        // four internal edges at vertex 0
        assert!(!passes_degree_filter(&pat(&[
            (0, 1),
            (0, 2),
            (0, 3),
            (0, 4),
            (1, 5),
            (2, 6)
        ])));
        // perfect matching on 0..5 plus a path 1-2-6: max internal degree 2
        assert!(passes_degree_filter(&pat(&[
            (0, 1),
            (2, 3),
            (4, 5),
            (1, 2),
            (2, 6),
            (3, 6)
        ])));
    }

    #[test]
    fn classification_partitions_faces() {
        let t = Triangulation::moebius();
        for p in enumerate_patterns().iter().step_by(97) {
            let c = classify_triangles(&t, p);
            assert_eq!(c.internal_faces.len() + c.external_faces.len(), 14);
            for &fi in &c.external_faces {
                let [a, b, cc] = t.faces()[fi];
                assert!(p.is_external(a, b) && p.is_external(b, cc) && p.is_external(cc, a));
            }
            for &(a, b) in p.internal_edges() {
                let incident = t.faces_on_edge(a, b);
                assert_eq!(incident.len(), 2);
                assert!(incident.iter().all(|f| c.internal_faces.contains(f)));
            }
        }
    }

    #[test]
    fn six_internal_edges_cover_at_most_twelve_faces() {
        let t = Triangulation::moebius();
        let all = enumerate_patterns();
        let max_internal = all
            .iter()
            .map(|p| classify_triangles(&t, p).internal_faces.len())
            .max()
            .unwrap();
        assert_eq!(max_internal, 12);
        let p = all
            .iter()
            .find(|p| classify_triangles(&t, p).internal_faces.len() == 12)
            .unwrap();
        assert_eq!(classify_triangles(&t, p).external_faces.len(), 2);
    }

    #[test]
    fn no_witness_when_every_star_has_an_internal_face() {
        let t = Triangulation::moebius();
        let p = pat(&[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6)]);
        assert!((0..7).all(|v| p.internal_degree(v) > 0));
        assert_eq!(conclusion_check(&t, &p), None);
    }

    #[test]
    fn dihedral_equivalence_basics() {
        assert!(dihedral_equivalent(&[1, 2, 3, 4], &[3, 4, 1, 2]));
        assert!(dihedral_equivalent(&[1, 2, 3, 4], &[4, 3, 2, 1]));
        assert!(!dihedral_equivalent(&[1, 2, 3, 4], &[1, 3, 2, 4]));
        assert!(dihedral_equivalent(&[5, 6, 2], &[2, 6, 5]));
    }

    #[test]
    fn cycle_rule_identity_link_when_no_internal_edges_at_q() {
        let t = Triangulation::moebius();
        // no internal edge touches vertex 6; the link of 6 restricted to
        // external neighbours is the full link and its steps are the edges
        // opposite 6, none of which may be internal for the rule to hold.
        let p = pat(&[(0, 1), (0, 2), (1, 3), (2, 4), (3, 5), (4, 5)]);
        assert_eq!(p.internal_degree(6), 0);
        let link = t.link(6);
        let steps_ok = (0..6).all(|i| p.is_external(link[i], link[(i + 1) % 6]));
        assert_eq!(vertex_cycle_rule(&t, &p, 6), steps_ok);
    }

    #[test]
    fn cycle_rule_with_three_external_neighbours() {
        let t = Triangulation::moebius();
        let p = pat(&[(0, 1), (0, 2), (0, 3), (1, 4), (2, 5), (3, 6)]);
        let ext = external_link(&t, &p, 0);
        assert_eq!(ext.len(), 3);
        let expected = (0..3).all(|i| p.is_external(ext[i], ext[(i + 1) % 3]));
        assert_eq!(vertex_cycle_rule(&t, &p, 0), expected);
    }
}
