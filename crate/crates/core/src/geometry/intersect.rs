//! Double-precision embeddedness test built on separating-axis checks.
//!
//! Pairs sharing an edge are not tested: if every vertex-disjoint pair is
//! disjoint and every pair sharing one vertex meets only there, the surface
//! is embedded.

use serde::{Deserialize, Serialize};

use super::angles::{cross, dot, sub};
use super::config::Configuration;
use crate::combinatorics::triangulation::shared_vertices;
use crate::combinatorics::Triangulation;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairKind {
    Disjoint,
    OneShared { vertex: usize },
    TwoShared,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairRelation {
    pub kind: PairKind,
    /// `None` for edge-sharing pairs, which are exempt.
    /// For one-shared pairs, `true` means they meet somewhere besides the
    /// shared vertex.
    pub intersects: Option<bool>,
}

pub fn pair_kind(a: [usize; 3], b: [usize; 3]) -> PairKind {
    let shared = shared_vertices(a, b);
    match shared.len() {
        0 => PairKind::Disjoint,
        1 => PairKind::OneShared { vertex: shared[0] },
        _ => PairKind::TwoShared,
    }
}

pub fn tri_pair_relation(c: &Configuration, f1: usize, f2: usize) -> PairRelation {
    relation_f64(c.triangulation(), &c.to_f64(), f1, f2)
}

fn relation_f64(t: &Triangulation, points: &[[f64; 3]], f1: usize, f2: usize) -> PairRelation {
    let a = t.faces()[f1];
    let b = t.faces()[f2];
    let kind = pair_kind(a, b);
    let tri = |f: [usize; 3]| f.map(|v| points[v]);
    let intersects = match kind {
        PairKind::Disjoint => Some(triangles_intersect(&tri(a), &tri(b))),
        PairKind::OneShared { vertex } => {
            let opposite = |f: [usize; 3]| {
                let rest: Vec<usize> = f.iter().copied().filter(|&v| v != vertex).collect();
                [points[rest[0]], points[rest[1]]]
            };
            Some(
                segment_triangle_intersect(&opposite(a), &tri(b))
                    || segment_triangle_intersect(&opposite(b), &tri(a)),
            )
        }
        PairKind::TwoShared => None,
    };
    PairRelation { kind, intersects }
}

pub fn is_embedded_float(c: &Configuration) -> bool {
    is_embedded_points(c.triangulation(), &c.to_f64())
}

pub fn is_embedded_points(t: &Triangulation, points: &[[f64; 3]]) -> bool {
    let n = t.faces().len();
    (0..n).all(|i| ((i + 1)..n).all(|j| relation_f64(t, points, i, j).intersects != Some(true)))
}

/// Closed triangles overlap (touching counts).
pub fn triangles_intersect(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> bool {
    let ea = [sub(a[1], a[0]), sub(a[2], a[1]), sub(a[0], a[2])];
    let eb = [sub(b[1], b[0]), sub(b[2], b[1]), sub(b[0], b[2])];
    let na = cross(ea[0], sub(a[2], a[0]));
    let nb = cross(eb[0], sub(b[2], b[0]));
    let mut axes = vec![na, nb];
    for x in &ea {
        for y in &eb {
            axes.push(cross(*x, *y));
        }
    }
    // in-plane directions; only needed when the triangles are coplanar
    for x in &ea {
        axes.push(cross(na, *x));
    }
    for y in &eb {
        axes.push(cross(nb, *y));
    }
    !separated(a, b, &axes)
}

/// Closed segment and closed triangle overlap.
pub fn segment_triangle_intersect(s: &[[f64; 3]; 2], t: &[[f64; 3]; 3]) -> bool {
    let d = sub(s[1], s[0]);
    let et = [sub(t[1], t[0]), sub(t[2], t[1]), sub(t[0], t[2])];
    let n = cross(et[0], sub(t[2], t[0]));
    let mut axes = vec![n, cross(n, d)];
    for e in &et {
        axes.push(cross(d, *e));
        axes.push(cross(n, *e));
    }
    !separated(s, t, &axes)
}

fn separated(p: &[[f64; 3]], q: &[[f64; 3]], axes: &[[f64; 3]]) -> bool {
    let scale = p
        .iter()
        .chain(q)
        .flat_map(|v| v.iter())
        .fold(1.0f64, |m, x| m.max(x.abs()));
    let tiny = 1e-24 * scale.powi(4);
    axes.iter().filter(|ax| dot(**ax, **ax) > tiny).any(|ax| {
        let (pmin, pmax) = project(p, *ax);
        let (qmin, qmax) = project(q, *ax);
        pmax < qmin || qmax < pmin
    })
}

fn project(points: &[[f64; 3]], axis: [f64; 3]) -> (f64, f64) {
    points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            let d = dot(*v, axis);
            (lo.min(d), hi.max(d))
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::config::{build_pup_tent, PupTentParams};
    use crate::numeric::Precision;

    #[test]
    fn crossing_triangles() {
        let a = [[0.0, 0.0, 0.0], [2.0, 0.0, 0.0], [0.0, 2.0, 0.0]];
        let b = [[0.5, 0.5, -1.0], [0.5, 0.5, 1.0], [3.0, 3.0, 0.5]];
        assert!(triangles_intersect(&a, &b));
        let lifted = a.map(|p| [p[0], p[1], p[2] + 0.1]);
        assert!(!triangles_intersect(
            &b.map(|p| [p[0] + 10.0, p[1], p[2]]),
            &lifted
        ));
    }

    #[test]
    fn coplanar_overlap_and_gap() {
        let a = [[0.0, 0.0, 0.0], [2.0, 0.0, 0.0], [0.0, 2.0, 0.0]];
        let b = [[1.0, 1.0, 0.0], [0.2, 0.2, 0.0], [3.0, 0.2, 0.0]];
        assert!(triangles_intersect(&a, &b));
        let far = [[3.0, 3.0, 0.0], [4.0, 3.0, 0.0], [3.0, 4.0, 0.0]];
        assert!(!triangles_intersect(&a, &far));
    }

    #[test]
    fn segment_through_triangle() {
        let t = [[0.0, 0.0, 0.0], [2.0, 0.0, 0.0], [0.0, 2.0, 0.0]];
        assert!(segment_triangle_intersect(
            &[[0.5, 0.5, -1.0], [0.5, 0.5, 1.0]],
            &t
        ));
        assert!(!segment_triangle_intersect(
            &[[3.0, 3.0, -1.0], [3.0, 3.0, 1.0]],
            &t
        ));
    }

    #[test]
    fn pup_tent_pair_classes() {
        let p = Precision::new(64);
        let c = build_pup_tent(&PupTentParams::published(p), p).unwrap();
        let n = c.triangulation().faces().len();
        let mut counts = [0usize; 3];
        for i in 0..n {
            for j in (i + 1)..n {
                let r = tri_pair_relation(&c, i, j);
                match r.kind {
                    PairKind::Disjoint => counts[0] += 1,
                    PairKind::OneShared { .. } => counts[1] += 1,
                    PairKind::TwoShared => counts[2] += 1,
                }
                assert_ne!(r.intersects, Some(true), "faces {i},{j}");
            }
        }
        assert_eq!(counts, [24, 72, 24]);
        assert!(is_embedded_float(&c));
    }

    #[test]
    fn flattened_pup_tent_is_not_embedded() {
        let p = Precision::new(64);
        let c = build_pup_tent(&PupTentParams::published(p), p).unwrap();
        let flat: Vec<[f64; 3]> = c.to_f64().iter().map(|v| [v[0], v[1], 0.0]).collect();
        assert!(!is_embedded_points(c.triangulation(), &flat));
    }
}
