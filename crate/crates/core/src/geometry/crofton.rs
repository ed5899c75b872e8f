//! Monte Carlo length of spherical polygons by counting crossings with
//! random great circles.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, UnitSphere};

use super::angles::{dot, sub};
use super::config::Configuration;

/// Estimate and its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CroftonEstimate {
    pub length: f64,
    pub standard_error: f64,
    pub samples: usize,
}

/// Length of a closed spherical polygon (consecutive unit vectors joined by
/// minor arcs, last joined to first).
pub fn crofton_estimate(loop_: &[[f64; 3]], samples: usize, seed: u64) -> f64 {
    crofton_with_error(loop_, true, samples, seed).length
}

/// Length of an open spherical path.
pub fn crofton_estimate_path(path: &[[f64; 3]], samples: usize, seed: u64) -> f64 {
    crofton_with_error(path, false, samples, seed).length
}

pub fn crofton_with_error(
    points: &[[f64; 3]],
    closed: bool,
    samples: usize,
    seed: u64,
) -> CroftonEstimate {
    let arcs: Vec<([f64; 3], [f64; 3])> = if closed {
        (0..points.len())
            .map(|i| (points[i], points[(i + 1) % points.len()]))
            .collect()
    } else {
        points.windows(2).map(|w| (w[0], w[1])).collect()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = 0.0f64;
    let mut sum_sq = 0.0f64;
    for _ in 0..samples {
        let n: [f64; 3] = UnitSphere.sample(&mut rng);
        let k = arcs
            .iter()
            .filter(|(a, b)| dot(n, *a) * dot(n, *b) < 0.0)
            .count() as f64;
        sum += k;
        sum_sq += k * k;
    }
    let m = samples.max(1) as f64;
    let mean = sum / m;
    let var = (sum_sq / m - mean * mean).max(0.0);
    CroftonEstimate {
        length: std::f64::consts::PI * mean,
        standard_error: std::f64::consts::PI * (var / m).sqrt(),
        samples,
    }
}

/// Unit directions from vertex `v` to its link neighbours in cyclic order;
/// the spherical polygon's length is the cone angle at `v`.
pub fn vertex_link(c: &Configuration, v: usize) -> Vec<[f64; 3]> {
    let pts = c.to_f64();
    c.triangulation()
        .link(v)
        .into_iter()
        .map(|w| {
            let d = sub(pts[w], pts[v]);
            let len = dot(d, d).sqrt();
            [d[0] / len, d[1] / len, d[2] / len]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn great_circle_has_length_two_pi() {
        let circle: Vec<[f64; 3]> = (0..6)
            .map(|k| {
                let t = k as f64 * PI / 3.0;
                [t.cos(), t.sin(), 0.0]
            })
            .collect();
        let e = crofton_with_error(&circle, true, 100_000, 1);
        assert!((e.length - 2.0 * PI).abs() <= 3.0 * e.standard_error.max(1e-12));
    }

    #[test]
    fn half_circle_has_length_pi() {
        let half = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [-1.0, 0.0, 0.0]];
        let e = crofton_with_error(&half, false, 100_000, 2);
        assert!((e.length - PI).abs() <= 3.0 * e.standard_error.max(1e-12));
    }

    #[test]
    fn seeded() {
        let tri = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        assert_eq!(
            crofton_estimate(&tri, 1000, 9),
            crofton_estimate(&tri, 1000, 9)
        );
    }
}
