//! Oracles shared by the integration targets.
#![allow(dead_code)]

use papertorus::certifier::bounds::relevant_vector_pairs;
use papertorus::certifier::{g_values, SeparationCertificate, SeparationKind};
use papertorus::geometry::Configuration;
use papertorus::numeric::{pow10, Precision};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::{Float, Integer};

pub const FIXTURE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/puptent.pt");

pub fn fixture_text() -> String {
    std::fs::read_to_string(FIXTURE).unwrap()
}

/// Coordinates times 10^32, truncated, straight from the decimal strings.
pub fn oracle_scaled() -> Vec<[Integer; 3]> {
    let scale = |s: &str| -> Integer {
        let (neg, body) = s.strip_prefix('-').map_or((false, s), |b| (true, b));
        let (int, frac) = body.split_once('.').unwrap_or((body, ""));
        let mut frac: String = frac.chars().take(32).collect();
        while frac.len() < 32 {
            frac.push('0');
        }
        let v: Integer = format!("{int}{frac}").parse().unwrap();
        if neg {
            -v
        } else {
            v
        }
    };
    fixture_text()
        .lines()
        .skip(3)
        .take(8)
        .map(|l| {
            let f: Vec<&str> = l.split_whitespace().collect();
            [scale(f[1]), scale(f[2]), scale(f[3])]
        })
        .collect()
}

pub fn proj(p: &[Integer; 3], l: &[i64; 3]) -> Integer {
    Integer::from(&p[0] * l[0]) + Integer::from(&p[1] * l[1]) + Integer::from(&p[2] * l[2])
}

/// The separation inequalities evaluated from scratch.
pub fn oracle_margin(
    pts: &[[Integer; 3]],
    faces: &[[usize; 3]],
    cert: &SeparationCertificate,
) -> Integer {
    let (a, b) = (faces[cert.pair.0], faces[cert.pair.1]);
    let l = &cert.direction;
    let range = |vs: &[usize]| {
        let p: Vec<Integer> = vs.iter().map(|&v| proj(&pts[v], l)).collect();
        (
            p.iter().min().unwrap().clone(),
            p.iter().max().unwrap().clone(),
        )
    };
    match cert.kind {
        SeparationKind::Disjoint => {
            let (m0, big0) = range(&a);
            let (m1, big1) = range(&b);
            if cert.side == 0 {
                m1 - big0
            } else {
                m0 - big1
            }
        }
        SeparationKind::SharedVertex { vertex } => {
            let rest = |f: [usize; 3]| f.into_iter().filter(|&v| v != vertex).collect::<Vec<_>>();
            let (m0, big0) = range(&rest(a));
            let (m1, big1) = range(&rest(b));
            let vl = proj(&pts[vertex], l);
            let (x, y) = if cert.side == 0 {
                (Integer::from(&vl - &big0), m1 - &vl)
            } else {
                (Integer::from(&vl - &big1), m0 - &vl)
            };
            x.min(y)
        }
    }
}

pub fn theta(v1: &[Float; 3], v2: &[Float; 3]) -> Float {
    let prec = v1[0].prec();
    let dot = |a: &[Float; 3], b: &[Float; 3]| {
        Float::with_val(prec, &a[0] * &b[0])
            + Float::with_val(prec, &a[1] * &b[1])
            + Float::with_val(prec, &a[2] * &b[2])
    };
    let n = Float::with_val(prec, dot(v1, v1) * dot(v2, v2)).sqrt();
    (dot(v1, v2) / n).acos()
}

/// Relative gaps between sqrt(g11), sqrt(g12) and second differences of the
/// angle, on `count` sampled vector pairs.
pub fn g_relative_errors(c: &Configuration, count: usize, seed: u64) -> Vec<(f64, f64)> {
    let prec = Precision::DEFAULT;
    let pairs = relevant_vector_pairs(c.triangulation());
    let bits = prec.bits();
    let h = pow10(-12, prec);
    let h2 = Float::with_val(bits, h.square_ref());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let (_, order) = pairs[rng.random_range(0..pairs.len())];
            let p0 = c.point(order[0]);
            let v = |k: usize| -> [Float; 3] {
                std::array::from_fn(|i| Float::with_val(bits, &c.point(order[k])[i] - &p0[i]))
            };
            let (v1, v2) = (v(1), v(2));
            let at = |d1: i32, d2: i32| {
                let mut a = v1.clone();
                let mut b = v2.clone();
                a[2] += Float::with_val(bits, &h * d1);
                b[2] += Float::with_val(bits, &h * d2);
                theta(&a, &b)
            };
            let t0 = at(0, 0);
            let d11 = Float::with_val(
                bits,
                at(1, 0) - Float::with_val(bits, &t0 * 2u32) + at(-1, 0),
            ) / &h2;
            let d12 = Float::with_val(bits, at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1))
                / Float::with_val(bits, &h2 * 4u32);
            let (g11, g12) = g_values(&v1, &v2);
            let rel = |g: Float, d: Float| {
                let s = g.sqrt();
                (Float::with_val(bits, &s - d.abs()) / s).abs().to_f64()
            };
            (rel(g11, d11), rel(g12, d12))
        })
        .collect()
}
