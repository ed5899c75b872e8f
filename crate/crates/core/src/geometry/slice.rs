//! Planar slices: intersect every face with a plane and chain the segments
//! into closed polygons.

use rug::Float;
use serde::{Deserialize, Serialize};

use super::config::Configuration;
use super::intersect::is_embedded_float;
use crate::error::{Error, Result};
use crate::numeric::vec3::{self, Point3};

/// Plane through `point` with unit `normal`.
#[derive(Clone, Debug, PartialEq)]
pub struct Plane {
    pub point: Point3,
    pub normal: Point3,
}

impl Plane {
    /// Normalizes `normal`; fails on a zero vector.
    pub fn new(point: Point3, normal: Point3) -> Result<Self> {
        let len = vec3::norm_sq(&normal).sqrt();
        if len.is_zero() {
            return Err(Error::InvalidConfiguration("plane normal is zero".into()));
        }
        let normal = vec3::scale(&normal, &(Float::with_val(len.prec(), 1u32) / len));
        Ok(Plane { point, normal })
    }

    pub fn from_f64(point: [f64; 3], normal: [f64; 3], bits: u32) -> Result<Self> {
        Plane::new(
            point.map(|x| Float::with_val(bits, x)),
            normal.map(|x| Float::with_val(bits, x)),
        )
    }

    fn signed_distance(&self, p: &Point3) -> Float {
        vec3::dot(&vec3::sub(p, &self.point), &self.normal)
    }

    /// In-plane orthonormal frame `(e1, e2)`; `e2` is the projected z axis
    /// when the plane is not horizontal.
    pub fn frame(&self) -> (Point3, Point3) {
        let prec = self.normal[0].prec();
        let n = &self.normal;
        let axis = |k: usize| -> Point3 {
            std::array::from_fn(|i| Float::with_val(prec, u32::from(i == k)))
        };
        let project = |a: Point3| {
            let d = vec3::dot(&a, n);
            let p = vec3::sub(&a, &vec3::scale(n, &d));
            let len = vec3::norm_sq(&p).sqrt();
            (vec3::scale(&p, &(Float::with_val(prec, 1u32) / &len)), len)
        };
        let (z, zlen) = project(axis(2));
        if zlen > 0.1 {
            (vec3::cross(n, &z), z)
        } else {
            let (x, _) = project(axis(0));
            let y = vec3::cross(n, &x);
            (x, y)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SliceResult {
    /// Plane actually used, as f64 `(point, normal)` (after any perturbation).
    pub plane: ([f64; 3], [f64; 3]),
    /// Distance the plane was shifted along its normal to avoid vertices.
    pub shift: f64,
    /// Closed polygons in the plane frame; the closing point is not repeated.
    pub loops: Vec<Vec<[f64; 2]>>,
    pub open_chains: Vec<Vec<[f64; 2]>>,
}

/// One face's contribution: the two crossing points, in 3D.
struct Segment {
    ends: [Point3; 2],
}

/// Slice `c` by `plane`. A plane passing within `10^(-digits/2)` of a vertex
/// is shifted along its normal by that amount until no vertex is that close.
pub fn slice_plane(c: &Configuration, plane: &Plane) -> Result<SliceResult> {
    let result = slice_plane_unchecked(c, plane)?;
    if !result.open_chains.is_empty() && is_embedded_float(c) {
        return Err(Error::ChainingFailure {
            open_chains: result.open_chains.len(),
        });
    }
    Ok(result)
}

/// As [`slice_plane`], but open chains are returned rather than reported as
/// an error.
pub fn slice_plane_unchecked(c: &Configuration, plane: &Plane) -> Result<SliceResult> {
    let precision = c.precision();
    let prec = precision.bits();
    let tol = precision.half_tolerance();
    let mut plane = plane.clone();
    let mut shift = Float::new(prec);
    let mut heights: Vec<Float>;
    let mut attempts = 0;
    loop {
        heights = c
            .coordinates()
            .iter()
            .map(|p| plane.signed_distance(p))
            .collect();
        if heights
            .iter()
            .all(|h| Float::with_val(prec, h.abs_ref()) > tol)
        {
            break;
        }
        attempts += 1;
        if attempts > 16 {
            return Err(Error::InvalidConfiguration(
                "could not move the slicing plane off the vertices".into(),
            ));
        }
        let step = Float::with_val(prec, &tol * 2u32);
        plane.point = vec3::sub(&plane.point, &vec3::scale(&plane.normal, &-step.clone()));
        shift += step;
    }

    let mut segments = Vec::new();
    for f in c.triangulation().faces() {
        let mut ends = Vec::with_capacity(2);
        for r in 0..3 {
            let (a, b) = (f[r], f[(r + 1) % 3]);
            if (heights[a] > 0) != (heights[b] > 0) {
                ends.push(crossing(c.point(a), c.point(b), &heights[a], &heights[b]));
            }
        }
        if ends.len() == 2 {
            let [p, q]: [Point3; 2] = ends.try_into().expect("two crossings");
            segments.push(Segment { ends: [p, q] });
        }
    }

    let (closed, open) = chain(&segments, &tol);
    let (e1, e2) = plane.frame();
    let to_plane = |p: &Point3| {
        let d = vec3::sub(p, &plane.point);
        [vec3::dot(&d, &e1).to_f64(), vec3::dot(&d, &e2).to_f64()]
    };
    let project = |chains: Vec<Vec<Point3>>| -> Vec<Vec<[f64; 2]>> {
        chains
            .iter()
            .map(|ch| ch.iter().map(to_plane).collect())
            .collect()
    };
    Ok(SliceResult {
        plane: (vec3::to_f64(&plane.point), vec3::to_f64(&plane.normal)),
        shift: shift.to_f64(),
        loops: project(closed),
        open_chains: project(open),
    })
}

/// Point where the edge `p -> q` meets the plane, computed from the
/// lexicographically smaller endpoint so both faces sharing the edge agree.
fn crossing(p: &Point3, q: &Point3, hp: &Float, hq: &Float) -> Point3 {
    let (p, q, hp, hq) = if vec3::to_f64(p) <= vec3::to_f64(q) {
        (p, q, hp, hq)
    } else {
        (q, p, hq, hp)
    };
    let prec = hp.prec();
    let t = Float::with_val(prec, hp / Float::with_val(prec, hp - hq));
    let d = vec3::sub(q, p);
    std::array::from_fn(|k| Float::with_val(prec, &p[k] + Float::with_val(prec, &d[k] * &t)))
}

fn close(a: &Point3, b: &Point3, tol: &Float) -> bool {
    vec3::norm_sq(&vec3::sub(a, b)).sqrt() <= *tol
}

/// Greedy endpoint matching within `tol`.
fn chain(segments: &[Segment], tol: &Float) -> (Vec<Vec<Point3>>, Vec<Vec<Point3>>) {
    let mut used = vec![false; segments.len()];
    let mut closed = Vec::new();
    let mut open = Vec::new();
    for start in 0..segments.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let mut pts = vec![
            segments[start].ends[0].clone(),
            segments[start].ends[1].clone(),
        ];
        let mut is_closed = false;
        loop {
            let tail = pts.last().expect("nonempty").clone();
            let next = (0..segments.len()).find_map(|i| {
                if used[i] {
                    return None;
                }
                let [a, b] = &segments[i].ends;
                if close(a, &tail, tol) {
                    Some((i, b.clone()))
                } else if close(b, &tail, tol) {
                    Some((i, a.clone()))
                } else {
                    None
                }
            });
            match next {
                Some((i, p)) => {
                    used[i] = true;
                    if close(&p, &pts[0], tol) {
                        is_closed = true;
                        break;
                    }
                    pts.push(p);
                }
                None => break,
            }
        }
        if is_closed {
            closed.push(pts);
        } else {
            open.push(pts);
        }
    }
    (closed, open)
}

/// Whether the closed polygons are simple and pairwise disjoint.
pub fn loops_are_disjoint_simple(loops: &[Vec<[f64; 2]>]) -> bool {
    let edges: Vec<(usize, usize, [f64; 2], [f64; 2])> = loops
        .iter()
        .enumerate()
        .flat_map(|(li, l)| (0..l.len()).map(move |i| (li, i, l[i], l[(i + 1) % l.len()])))
        .collect();
    for (x, e) in edges.iter().enumerate() {
        for f in &edges[x + 1..] {
            let adjacent = e.0 == f.0 && {
                let n = loops[e.0].len();
                (e.1 + 1) % n == f.1 || (f.1 + 1) % n == e.1
            };
            if !adjacent && segments_cross(e.2, e.3, f.2, f.3) {
                return false;
            }
        }
    }
    true
}

fn orient2(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn segments_cross(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> bool {
    let d1 = orient2(c, d, a);
    let d2 = orient2(c, d, b);
    let d3 = orient2(a, b, c);
    let d4 = orient2(a, b, d);
    (d1 > 0.0) != (d2 > 0.0) && (d3 > 0.0) != (d4 > 0.0)
}

/// Crossings of the ray from `origin` in direction `dir` with one loop.
pub fn ray_crossings(l: &[[f64; 2]], origin: [f64; 2], dir: [f64; 2]) -> usize {
    let far = [origin[0] + 1e6 * dir[0], origin[1] + 1e6 * dir[1]];
    (0..l.len())
        .filter(|&i| segments_cross(origin, far, l[i], l[(i + 1) % l.len()]))
        .count()
}
