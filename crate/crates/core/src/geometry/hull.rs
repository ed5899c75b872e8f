//! Convex hull facets and the face number, from exact orientation
//! determinants on integer-scaled coordinates.
//!
//! Point sets here are tiny (the tori have 7 or 8 vertices), so the hull is
//! found by testing every vertex triple against all remaining points.

use std::cmp::Ordering;

use rug::Integer;
use serde::{Deserialize, Serialize};

use super::config::Configuration;
use crate::combinatorics::Triangulation;
use crate::error::{Error, Result};
use crate::numeric::scale_truncate;

/// Decimal exponent of the integer scaling applied before exact predicates.
pub const HULL_SCALE_EXP: u32 = 32;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HullReport {
    /// Hull facets, oriented with outward normals.
    pub facet_list: Vec<[usize; 3]>,
    pub on_hull: Vec<bool>,
    /// Number of torus faces that are also hull facets.
    pub face_number: usize,
    /// Indices of those torus faces.
    pub torus_faces_on_hull: Vec<usize>,
}

impl HullReport {
    pub fn all_on_hull(&self) -> bool {
        self.on_hull.iter().all(|&b| b)
    }
}

pub type IntPoint = [Integer; 3];

/// Sign of `det[b - a, c - a, d - a]`.
pub fn orient3d_exact(a: &IntPoint, b: &IntPoint, c: &IntPoint, d: &IntPoint) -> Ordering {
    let u: [Integer; 3] = std::array::from_fn(|k| Integer::from(&b[k] - &a[k]));
    let v: [Integer; 3] = std::array::from_fn(|k| Integer::from(&c[k] - &a[k]));
    let w: [Integer; 3] = std::array::from_fn(|k| Integer::from(&d[k] - &a[k]));
    let minor = |i: usize, j: usize| Integer::from(&v[i] * &w[j]) - Integer::from(&v[j] * &w[i]);
    let det = Integer::from(&u[0] * &minor(1, 2)) - Integer::from(&u[1] * &minor(0, 2))
        + Integer::from(&u[2] * &minor(0, 1));
    det.cmp0()
}

pub fn convex_hull(c: &Configuration) -> Result<HullReport> {
    let points: Vec<IntPoint> = c
        .coordinates()
        .iter()
        .map(|p| std::array::from_fn(|k| scale_truncate(&p[k], HULL_SCALE_EXP)))
        .collect();
    convex_hull_exact(&points, Some(c.triangulation()))
}

pub fn convex_hull_exact(points: &[IntPoint], t: Option<&Triangulation>) -> Result<HullReport> {
    let n = points.len();
    let mut facets = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                let mut pos = 0usize;
                let mut neg = 0usize;
                for l in (0..n).filter(|&l| l != i && l != j && l != k) {
                    match orient3d_exact(&points[i], &points[j], &points[k], &points[l]) {
                        Ordering::Greater => pos += 1,
                        Ordering::Less => neg += 1,
                        Ordering::Equal => return Err(Error::GeneralPositionFailure([i, j, k, l])),
                    }
                }
                if pos == 0 {
                    facets.push([i, j, k]);
                } else if neg == 0 {
                    facets.push([i, k, j]);
                }
            }
        }
    }
    Ok(summarize(n, facets, t))
}

fn summarize(n: usize, facets: Vec<[usize; 3]>, t: Option<&Triangulation>) -> HullReport {
    let mut on_hull = vec![false; n];
    for f in &facets {
        for &v in f {
            on_hull[v] = true;
        }
    }
    let torus_faces_on_hull: Vec<usize> = match t {
        Some(t) => (0..t.faces().len())
            .filter(|&fi| {
                let key = t.face_key(fi);
                facets
                    .iter()
                    .any(|f| crate::combinatorics::triangulation::sorted3(*f) == key)
            })
            .collect(),
        None => Vec::new(),
    };
    HullReport {
        face_number: torus_faces_on_hull.len(),
        facet_list: facets,
        on_hull,
        torus_faces_on_hull,
    }
}

/// Double-precision orientation with a static error filter. Returns `None`
/// when the sign cannot be trusted.
pub fn orient3d_filtered(a: [f64; 3], b: [f64; 3], c: [f64; 3], d: [f64; 3]) -> Option<Ordering> {
    let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
    let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
    let w = [d[0] - a[0], d[1] - a[1], d[2] - a[2]];
    let t0 = u[0] * (v[1] * w[2] - v[2] * w[1]);
    let t1 = u[1] * (v[0] * w[2] - v[2] * w[0]);
    let t2 = u[2] * (v[0] * w[1] - v[1] * w[0]);
    let det = t0 - t1 + t2;
    let perm = u[0].abs() * (v[1] * w[2]).abs().max((v[2] * w[1]).abs())
        + u[1].abs() * (v[0] * w[2]).abs().max((v[2] * w[0]).abs())
        + u[2].abs() * (v[0] * w[1]).abs().max((v[1] * w[0]).abs());
    // generous multiple of the classical orient3d error bound
    let bound = 1e-12 * perm;
    if det > bound {
        Some(Ordering::Greater)
    } else if det < -bound {
        Some(Ordering::Less)
    } else {
        None
    }
}

/// Hull of double-precision points; `None` if any orientation is too close
/// to zero to decide.
pub fn convex_hull_f64(points: &[[f64; 3]], t: Option<&Triangulation>) -> Option<HullReport> {
    let n = points.len();
    let mut facets = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                let mut pos = 0usize;
                let mut neg = 0usize;
                for l in (0..n).filter(|&l| l != i && l != j && l != k) {
                    match orient3d_filtered(points[i], points[j], points[k], points[l])? {
                        Ordering::Greater => pos += 1,
                        _ => neg += 1,
                    }
                }
                if pos == 0 {
                    facets.push([i, j, k]);
                } else if neg == 0 {
                    facets.push([i, k, j]);
                }
            }
        }
    }
    Some(summarize(n, facets, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::config::{build_pup_tent, PupTentParams};
    use crate::numeric::Precision;

    fn ip(x: i64, y: i64, z: i64) -> IntPoint {
        [Integer::from(x), Integer::from(y), Integer::from(z)]
    }

    #[test]
    fn simplex_has_four_facets() {
        let pts = vec![ip(0, 0, 0), ip(1, 0, 0), ip(0, 1, 0), ip(0, 0, 1)];
        let h = convex_hull_exact(&pts, None).unwrap();
        assert_eq!(h.facet_list.len(), 4);
        assert!(h.all_on_hull());
    }

    #[test]
    fn interior_point_is_off_hull() {
        let pts = vec![
            ip(0, 0, 0),
            ip(4, 0, 0),
            ip(0, 4, 0),
            ip(0, 0, 4),
            ip(1, 1, 1),
        ];
        let h = convex_hull_exact(&pts, None).unwrap();
        assert_eq!(h.facet_list.len(), 4);
        assert!(!h.on_hull[4]);
    }

    #[test]
    fn coplanar_quadruple_is_reported() {
        let pts = vec![
            ip(0, 0, 0),
            ip(1, 0, 0),
            ip(0, 1, 0),
            ip(1, 1, 0),
            ip(0, 0, 1),
        ];
        assert!(matches!(
            convex_hull_exact(&pts, None),
            Err(Error::GeneralPositionFailure(_))
        ));
    }

    #[test]
    fn pup_tent_hull() {
        let p = Precision::new(64);
        let c = build_pup_tent(&PupTentParams::published(p), p).unwrap();
        let h = convex_hull(&c).unwrap();
        assert!(h.all_on_hull());
        assert_eq!(h.facet_list.len(), 12);
        assert_eq!(h.face_number, 6);
        let f = convex_hull_f64(&c.to_f64(), Some(c.triangulation())).unwrap();
        assert_eq!(f.face_number, 6);
        assert_eq!(f.facet_list, h.facet_list);
    }
}
