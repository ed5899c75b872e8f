use rug::Float;

use crate::combinatorics::{Triangulation, PUP_TENT_SYMMETRY};
use crate::error::{Error, Result};
use crate::numeric::vec3::{self, Point3};
use crate::numeric::{parse_decimal, require_precision, Precision};

/// Vertex coordinates attached to a torus triangulation.
#[derive(Clone, Debug, PartialEq)]
pub struct Configuration {
    triangulation: Triangulation,
    coordinates: Vec<Point3>,
    precision: Precision,
}

impl Configuration {
    pub fn new(
        triangulation: Triangulation,
        coordinates: Vec<Point3>,
        precision: Precision,
    ) -> Result<Self> {
        if coordinates.len() != triangulation.vertex_count() {
            return Err(Error::InvalidConfiguration(format!(
                "{} coordinates for {} vertices",
                coordinates.len(),
                triangulation.vertex_count()
            )));
        }
        let bits = precision.bits();
        let coordinates: Vec<Point3> = coordinates
            .into_iter()
            .map(|p| p.map(|x| Float::with_val(bits, x)))
            .collect();
        let c = Configuration {
            triangulation,
            coordinates,
            precision,
        };
        c.check_nondegenerate()?;
        Ok(c)
    }

    pub fn from_f64(
        triangulation: Triangulation,
        points: &[[f64; 3]],
        precision: Precision,
    ) -> Result<Self> {
        let coords = points
            .iter()
            .map(|p| p.map(|x| precision.float(x)))
            .collect();
        Configuration::new(triangulation, coords, precision)
    }

    pub fn triangulation(&self) -> &Triangulation {
        &self.triangulation
    }

    pub fn coordinates(&self) -> &[Point3] {
        &self.coordinates
    }

    pub fn point(&self, v: usize) -> &Point3 {
        &self.coordinates[v]
    }

    pub fn precision(&self) -> Precision {
        self.precision
    }

    pub fn to_f64(&self) -> Vec<[f64; 3]> {
        self.coordinates.iter().map(vec3::to_f64).collect()
    }

    /// Same points at a different working precision.
    pub fn with_precision(&self, precision: Precision) -> Self {
        let bits = precision.bits();
        Configuration {
            triangulation: self.triangulation.clone(),
            coordinates: self
                .coordinates
                .iter()
                .map(|p| p.clone().map(|x| Float::with_val(bits, x)))
                .collect(),
            precision,
        }
    }

    /// Same triangulation and precision, new coordinates.
    pub fn with_coordinates(&self, coordinates: Vec<Point3>) -> Result<Self> {
        Configuration::new(self.triangulation.clone(), coordinates, self.precision)
    }

    fn check_nondegenerate(&self) -> Result<()> {
        let tol = self.precision.half_tolerance();
        for (fi, f) in self.triangulation.faces().iter().enumerate() {
            let p0 = &self.coordinates[f[0]];
            let n = vec3::cross(
                &vec3::sub(&self.coordinates[f[1]], p0),
                &vec3::sub(&self.coordinates[f[2]], p0),
            );
            if vec3::norm_sq(&n).sqrt() <= tol {
                return Err(Error::DegenerateTriangle(format!(
                    "face {fi} {f:?} has zero area"
                )));
            }
        }
        Ok(())
    }
}

/// Heights `(z0, z1, z2)` of the symmetric pup-tent family.
#[derive(Clone, Debug, PartialEq)]
pub struct PupTentParams {
    pub z: [Float; 3],
}

/// Published heights, 32 digits.
pub const PUP_TENT_Z: [&str; 3] = [
    "0.98050571585977935561653820085693",
    "0.99028162433430542934317615858328",
    "0.97653883470312317624184245672434",
];

/// Fixed planar coordinates of the eight vertices.
pub const PUP_TENT_XY: [[&str; 2]; 8] = [
    ["0.755", "0.65"],
    ["-0.455", "0.345"],
    ["-0.17", "1.14"],
    ["0.455", "-0.345"],
    ["-0.755", "-0.65"],
    ["-0.09", "0.665"],
    ["0.17", "-1.14"],
    ["0.09", "-0.665"],
];

/// Which parameter drives each vertex height; `None` pins the height at 0.
pub const PUP_TENT_HEIGHT_INDEX: [Option<usize>; 8] = [
    Some(0),
    Some(1),
    Some(2),
    Some(1),
    Some(0),
    None,
    Some(2),
    None,
];

impl PupTentParams {
    pub fn new(z: [Float; 3]) -> Self {
        PupTentParams { z }
    }

    pub fn from_strs(z: [&str; 3], precision: Precision) -> Result<Self> {
        let mut out: Vec<Float> = Vec::with_capacity(3);
        for (i, s) in z.iter().enumerate() {
            out.push(parse_decimal(s, precision).ok_or_else(|| {
                Error::InvalidConfiguration(format!("z{i} is not a decimal: {s:?}"))
            })?);
        }
        Ok(PupTentParams {
            z: out.try_into().expect("three heights"),
        })
    }

    /// The published 32-digit heights.
    pub fn published(precision: Precision) -> Self {
        PupTentParams::from_strs(PUP_TENT_Z, precision).expect("constant decimals parse")
    }

    pub fn with_precision(&self, precision: Precision) -> Self {
        let bits = precision.bits();
        PupTentParams {
            z: self.z.clone().map(|x| Float::with_val(bits, x)),
        }
    }

    /// Membership in the search box `(0, 2)^3`.
    pub fn in_domain(&self) -> bool {
        self.z.iter().all(|z| *z > 0 && *z < 2)
    }

    pub fn to_f64(&self) -> [f64; 3] {
        [self.z[0].to_f64(), self.z[1].to_f64(), self.z[2].to_f64()]
    }

    /// Max-norm distance to `other`.
    pub fn distance_inf(&self, other: &PupTentParams) -> Float {
        let prec = self.z[0].prec();
        (0..3)
            .map(|i| Float::with_val(prec, &self.z[i] - &other.z[i]).abs())
            .reduce(|a, b| if b > a { b } else { a })
            .expect("three entries")
    }
}

/// Vertex heights for a parameter triple.
pub fn pup_tent_heights(p: &PupTentParams, precision: Precision) -> [Float; 8] {
    PUP_TENT_HEIGHT_INDEX.map(|slot| match slot {
        Some(i) => Float::with_val(precision.bits(), &p.z[i]),
        None => precision.zero(),
    })
}

pub fn build_pup_tent(p: &PupTentParams, precision: Precision) -> Result<Configuration> {
    require_precision(precision, 32)?;
    let heights = pup_tent_heights(p, precision);
    let coords: Vec<Point3> = PUP_TENT_XY
        .iter()
        .zip(heights)
        .map(|([x, y], z)| {
            [
                parse_decimal(x, precision).expect("constant decimal"),
                parse_decimal(y, precision).expect("constant decimal"),
                z,
            ]
        })
        .collect();
    Configuration::new(Triangulation::best8(), coords, precision)
}

/// The rotation `(x, y, z) -> (-x, -y, z)` applied pointwise.
pub fn rotate_half_turn(p: &Point3) -> Point3 {
    let prec = p[0].prec();
    [
        Float::with_val(prec, -&p[0]),
        Float::with_val(prec, -&p[1]),
        p[2].clone(),
    ]
}

pub fn pup_tent_symmetry() -> [usize; 8] {
    PUP_TENT_SYMMETRY
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn published_rows() {
        let p = Precision::new(64);
        let c = build_pup_tent(&PupTentParams::published(p), p).unwrap();
        let v0 = vec3::to_f64(c.point(0));
        let v4 = vec3::to_f64(c.point(4));
        assert_eq!([v0[0], v0[1]], [0.755, 0.65]);
        assert_eq!([v4[0], v4[1]], [-0.755, -0.65]);
        assert!(c.point(5)[2].is_zero() && c.point(7)[2].is_zero());
        assert_eq!(c.point(0)[2], c.point(4)[2]);
    }

    #[test]
    fn half_turn_permutes_vertices() {
        let p = Precision::new(64);
        let c = build_pup_tent(&PupTentParams::published(p), p).unwrap();
        let sigma = pup_tent_symmetry();
        for v in 0..8 {
            assert_eq!(&rotate_half_turn(c.point(v)), c.point(sigma[v]));
        }
    }

    #[test]
    fn low_precision_rejected() {
        let p = Precision::new(20);
        let params = PupTentParams::published(Precision::new(64));
        assert!(matches!(
            build_pup_tent(&params, p),
            Err(Error::InsufficientPrecision { .. })
        ));
    }

    #[test]
    fn collapsed_face_is_degenerate() {
        let p = Precision::new(64);
        let c = build_pup_tent(&PupTentParams::published(p), p).unwrap();
        let mut coords = c.coordinates().to_vec();
        // put vertex 1 on the segment from 0 to 2: face (0,1,2) collapses
        for k in 0..3 {
            coords[1][k] = Float::with_val(p.bits(), &coords[0][k] + &coords[2][k]) / 2u32;
        }
        assert!(matches!(
            c.with_coordinates(coords),
            Err(Error::DegenerateTriangle(_))
        ));
    }
}
