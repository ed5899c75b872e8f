use rug::Float;

use super::config::Configuration;
use crate::combinatorics::Triangulation;
use crate::error::{Error, Result};
use crate::numeric::vec3::{self, Point3};
use crate::numeric::Precision;

/// Angle at `p0` of the triangle `(p0, p1, p2)`:
/// `arccos(V1.V2 / sqrt((V1.V1)(V2.V2)))` with `Vk = pk - p0`.
pub fn triangle_angle(
    p0: &Point3,
    p1: &Point3,
    p2: &Point3,
    precision: Precision,
) -> Result<Float> {
    let v1 = vec3::sub(p1, p0);
    let v2 = vec3::sub(p2, p0);
    vector_angle(&v1, &v2, precision)
}

/// Unsigned angle between two vectors, in `[0, pi]`.
pub fn vector_angle(v1: &Point3, v2: &Point3, precision: Precision) -> Result<Float> {
    let bits = precision.bits();
    let n1 = vec3::norm_sq(v1);
    let n2 = vec3::norm_sq(v2);
    let tol = precision.half_tolerance();
    let tol_sq = Float::with_val(bits, &tol * &tol);
    if n1 <= tol_sq || n2 <= tol_sq {
        return Err(Error::DegenerateTriangle(
            "edge vector shorter than working tolerance".into(),
        ));
    }
    let denom = Float::with_val(bits, &n1 * &n2).sqrt();
    let mut u = vec3::dot(v1, v2) / denom;
    if u > 1 {
        u = Float::with_val(bits, 1);
    } else if u < -1 {
        u = Float::with_val(bits, -1);
    }
    Ok(u.acos())
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlatnessReport {
    pub cone_angles: Vec<Float>,
    /// `max_k |theta_k - 2 pi|`
    pub max_deviation: Float,
}

impl FlatnessReport {
    pub fn deviations(&self) -> Vec<Float> {
        let two_pi = Float::with_val(self.max_deviation.prec(), rug::float::Constant::Pi) * 2u32;
        self.cone_angles
            .iter()
            .map(|t| Float::with_val(t.prec(), t - &two_pi))
            .collect()
    }

    pub fn angle_sum(&self) -> Float {
        let prec = self.max_deviation.prec();
        self.cone_angles
            .iter()
            .fold(Float::new(prec), |acc, t| acc + t)
    }
}

/// Cone angle at every vertex.
///
/// Each vertex's face angles are summed in ascending order, so the result
/// depends only on the multiset of angles: relabelling by a symmetry gives
/// bit-identical cone angles.
pub fn cone_angles(c: &Configuration) -> Result<FlatnessReport> {
    let precision = c.precision();
    let mut parts: Vec<Vec<Float>> = vec![Vec::new(); c.triangulation().vertex_count()];
    for f in c.triangulation().faces() {
        for r in 0..3 {
            let (a, b, cc) = (f[r], f[(r + 1) % 3], f[(r + 2) % 3]);
            parts[a].push(triangle_angle(
                c.point(a),
                c.point(b),
                c.point(cc),
                precision,
            )?);
        }
    }
    let theta: Vec<Float> = parts
        .into_iter()
        .map(|mut angles| {
            angles.sort_by(|x, y| x.partial_cmp(y).expect("angles are finite"));
            angles.into_iter().fold(precision.zero(), |acc, a| acc + a)
        })
        .collect();
    let two_pi = precision.two_pi();
    let max_deviation = theta
        .iter()
        .map(|t| Float::with_val(precision.bits(), t - &two_pi).abs())
        .fold(precision.zero(), |a, b| if b > a { b } else { a });
    Ok(FlatnessReport {
        cone_angles: theta,
        max_deviation,
    })
}

fn angle_f64(p0: [f64; 3], p1: [f64; 3], p2: [f64; 3]) -> f64 {
    let v1 = sub(p1, p0);
    let v2 = sub(p2, p0);
    let u = dot(v1, v2) / (dot(v1, v1) * dot(v2, v2)).sqrt();
    u.clamp(-1.0, 1.0).acos()
}

/// Double-precision cone angles, used inside the search loop.
pub fn cone_angles_f64(t: &Triangulation, points: &[[f64; 3]]) -> Vec<f64> {
    let mut theta = vec![0.0; t.vertex_count()];
    for f in t.faces() {
        for r in 0..3 {
            let (a, b, c) = (f[r], f[(r + 1) % 3], f[(r + 2) % 3]);
            theta[a] += angle_f64(points[a], points[b], points[c]);
        }
    }
    theta
}

/// Smallest interior angle over all faces (double precision).
pub fn min_face_angle_f64(t: &Triangulation, points: &[[f64; 3]]) -> f64 {
    t.faces()
        .iter()
        .flat_map(|f| (0..3).map(move |r| (f[r], f[(r + 1) % 3], f[(r + 2) % 3])))
        .map(|(a, b, c)| angle_f64(points[a], points[b], points[c]))
        .fold(f64::INFINITY, f64::min)
}

/// Smallest dihedral angle over all edges, measured through the surface so
/// that coplanar neighbours give `pi` and a face folded back onto its
/// neighbour gives 0.
pub fn min_dihedral_f64(t: &Triangulation, points: &[[f64; 3]]) -> f64 {
    let normal = |f: &[usize; 3]| {
        let n = cross(
            sub(points[f[1]], points[f[0]]),
            sub(points[f[2]], points[f[0]]),
        );
        let len = dot(n, n).sqrt();
        [n[0] / len, n[1] / len, n[2] / len]
    };
    t.edges()
        .iter()
        .map(|&(a, b)| {
            let fs = t.faces_on_edge(a, b);
            let n0 = normal(&t.faces()[fs[0]]);
            let n1 = normal(&t.faces()[fs[1]]);
            std::f64::consts::PI - dot(n0, n1).clamp(-1.0, 1.0).acos()
        })
        .fold(f64::INFINITY, f64::min)
}

pub(crate) fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}
