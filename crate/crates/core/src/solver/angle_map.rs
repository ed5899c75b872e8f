//! The map `F(z0, z1, z2) = (theta0, theta1, theta2)` on the symmetric
//! pup-tent family, and its Jacobian.

use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::angles::{cone_angles, triangle_angle};
use crate::geometry::config::{build_pup_tent, PupTentParams, PUP_TENT_HEIGHT_INDEX};
use crate::geometry::Configuration;
use crate::mat3::{self, Mat3};
use crate::numeric::vec3::{self, Point3};
use crate::numeric::{pow10, Precision};

#[derive(Clone, Debug, PartialEq)]
pub struct AngleMapSample {
    pub params: PupTentParams,
    /// Cone angles at vertices 0, 1, 2.
    pub values: [Float; 3],
}

impl AngleMapSample {
    /// `max_i |theta_i - 2 pi|`.
    pub fn deviation(&self) -> Float {
        let prec = self.values[0].prec();
        let two_pi = Float::with_val(prec, rug::float::Constant::Pi) * 2u32;
        self.values
            .iter()
            .map(|t| Float::with_val(prec, t - &two_pi).abs())
            .fold(Float::new(prec), |m, x| if x > m { x } else { m })
    }

    /// `F(p) - (2 pi, 2 pi, 2 pi)`.
    pub fn residual(&self) -> [Float; 3] {
        let prec = self.values[0].prec();
        let two_pi = Float::with_val(prec, rug::float::Constant::Pi) * 2u32;
        self.values.clone().map(|t| t - &two_pi)
    }
}

pub fn angle_map(p: &PupTentParams, precision: Precision) -> Result<AngleMapSample> {
    let c = build_pup_tent(&p.with_precision(precision), precision)?;
    let report = cone_angles(&c)?;
    Ok(AngleMapSample {
        params: p.with_precision(precision),
        values: std::array::from_fn(|i| report.cone_angles[i].clone()),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum JacobianMode {
    Analytic,
    CentralDifference,
}

#[derive(Clone, Debug, PartialEq)]
pub struct JacobianReport {
    /// `matrix[i][j] = d theta_i / d z_j`.
    pub matrix: Mat3,
    pub inverse: Mat3,
    pub determinant: Float,
    /// Largest absolute entry of the inverse.
    pub inf_norm_of_inverse: Float,
    /// `max |J - J^T|` entrywise; recorded, not asserted.
    pub asymmetry: Float,
}

pub fn jacobian(
    p: &PupTentParams,
    precision: Precision,
    mode: JacobianMode,
) -> Result<JacobianReport> {
    let matrix = match mode {
        JacobianMode::Analytic => analytic_jacobian(p, precision)?,
        JacobianMode::CentralDifference => difference_jacobian(p, precision)?,
    };
    report(matrix, precision)
}

fn report(matrix: Mat3, precision: Precision) -> Result<JacobianReport> {
    let (inverse, determinant) =
        mat3::inverse(&matrix, &precision.half_tolerance()).ok_or_else(|| {
            Error::SingularMatrix {
                det: mat3::det(&matrix).to_f64(),
            }
        })?;
    let asymmetry = mat3::max_abs_entry(&mat3::sub(&matrix, &mat3::transpose(&matrix)));
    Ok(JacobianReport {
        inf_norm_of_inverse: mat3::max_abs_entry(&inverse),
        matrix,
        inverse,
        determinant,
        asymmetry,
    })
}

/// Gradient of the angle at `p0` in triangle `(p0, p1, p2)` with respect to
/// the heights of `p0`, `p1`, `p2`, from `d arccos(u) = -du / sqrt(1 - u^2)`.
pub fn angle_height_gradient(p0: &Point3, p1: &Point3, p2: &Point3) -> [Float; 3] {
    let prec = p0[0].prec();
    let v1 = vec3::sub(p1, p0);
    let v2 = vec3::sub(p2, p0);
    let n1 = vec3::norm_sq(&v1);
    let n2 = vec3::norm_sq(&v2);
    let n12 = Float::with_val(prec, &n1 * &n2).sqrt();
    let u = Float::with_val(prec, vec3::dot(&v1, &v2) / &n12);
    let s = (Float::with_val(prec, 1u32) - Float::with_val(prec, u.square_ref())).sqrt();
    let du1 = Float::with_val(prec, &v2[2] / &n12) - Float::with_val(prec, &u * &v1[2]) / &n1;
    let du2 = Float::with_val(prec, &v1[2] / &n12) - Float::with_val(prec, &u * &v2[2]) / &n2;
    let d1 = -(du1 / &s);
    let d2 = -(du2 / &s);
    let d0 = -Float::with_val(prec, &d1 + &d2);
    [d0, d1, d2]
}

/// `d theta_k / d z_v` for every vertex `k` and every vertex height `z_v`,
/// treating the eight heights as independent.
pub fn height_jacobian(c: &Configuration) -> Vec<Vec<Float>> {
    let n = c.triangulation().vertex_count();
    let prec = c.precision().bits();
    let mut out = vec![vec![Float::new(prec); n]; n];
    for f in c.triangulation().faces() {
        for r in 0..3 {
            let tri = [f[r], f[(r + 1) % 3], f[(r + 2) % 3]];
            let g = angle_height_gradient(c.point(tri[0]), c.point(tri[1]), c.point(tri[2]));
            for (v, dg) in tri.iter().zip(g) {
                out[tri[0]][*v] += dg;
            }
        }
    }
    out
}

/// Symmetric chain rule: `d theta_i / d z_j` sums the height derivatives of
/// every vertex whose height is `z_j`.
pub fn analytic_jacobian(p: &PupTentParams, precision: Precision) -> Result<Mat3> {
    let c = build_pup_tent(&p.with_precision(precision), precision)?;
    let h = height_jacobian(&c);
    let mut m = mat3::zeros(precision);
    for (i, row) in m.iter_mut().enumerate() {
        for (v, slot) in PUP_TENT_HEIGHT_INDEX.iter().enumerate() {
            if let Some(j) = slot {
                row[*j] += &h[i][v];
            }
        }
    }
    Ok(m)
}

/// Central differences with step `10^(-digits/2)`.
pub fn difference_jacobian(p: &PupTentParams, precision: Precision) -> Result<Mat3> {
    let h = pow10(-((precision.digits() / 2) as i32), precision);
    let base = p.with_precision(precision);
    let mut m = mat3::zeros(precision);
    for j in 0..3 {
        let mut plus = base.clone();
        let mut minus = base.clone();
        plus.z[j] += &h;
        minus.z[j] -= &h;
        let fp = angle_map(&plus, precision)?;
        let fm = angle_map(&minus, precision)?;
        for i in 0..3 {
            let d = Float::with_val(precision.bits(), &fp.values[i] - &fm.values[i]);
            m[i][j] = d / Float::with_val(precision.bits(), &h * 2u32);
        }
    }
    Ok(m)
}

/// Central-difference check of a single angle's height gradient.
pub fn angle_gradient_by_difference(
    p0: &Point3,
    p1: &Point3,
    p2: &Point3,
    precision: Precision,
) -> Result<[Float; 3]> {
    let h = pow10(-((precision.digits() / 2) as i32), precision);
    let mut out: [Float; 3] = std::array::from_fn(|_| precision.zero());
    for (k, slot) in out.iter_mut().enumerate() {
        let shifted = |sign: i32| {
            let mut pts = [p0.clone(), p1.clone(), p2.clone()];
            pts[k][2] += Float::with_val(precision.bits(), &h * sign);
            triangle_angle(&pts[0], &pts[1], &pts[2], precision)
        };
        let d = shifted(1)? - shifted(-1)?;
        *slot = d / Float::with_val(precision.bits(), &h * 2u32);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn published_point_is_flat() {
        let p = Precision::new(64);
        let s = angle_map(&PupTentParams::published(p), p).unwrap();
        assert!(s.deviation() < 1e-32);
    }

    #[test]
    fn modes_agree() {
        let p = Precision::new(64);
        let params = PupTentParams::published(p);
        let a = jacobian(&params, p, JacobianMode::Analytic).unwrap();
        let d = jacobian(&params, p, JacobianMode::CentralDifference).unwrap();
        assert!(mat3::max_abs_entry(&mat3::sub(&a.matrix, &d.matrix)) < 1e-25);
        let id = mat3::mul(&a.matrix, &a.inverse);
        assert!(mat3::max_abs_entry(&mat3::sub(&id, &mat3::identity(p))) < 1e-60);
    }

    #[test]
    fn single_angle_gradient() {
        let p = Precision::new(50);
        let pt = |x: f64, y: f64, z: f64| [p.float(x), p.float(y), p.float(z)];
        let (a, b, c) = (pt(0.1, 0.2, 0.3), pt(1.0, -0.2, 0.7), pt(0.3, 1.1, -0.4));
        let g = angle_height_gradient(&a, &b, &c);
        let d = angle_gradient_by_difference(&a, &b, &c, p).unwrap();
        for k in 0..3 {
            assert!(Float::with_val(p.bits(), &g[k] - &d[k]).abs() < 1e-20);
        }
    }
}
