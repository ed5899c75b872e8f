//! The crude bound on second derivatives of the cone angles over a small
//! ball of heights.
//!
//! A relevant pair is `(V1, V2) = (P1 - P0, P2 - P0)` for an ordered face
//! `(P0, P1, P2)`; each face gives six. With `W_k` the horizontal part of
//! `V_k` and `w_k` its height, the squares of the second derivatives of the
//! angle between `V1` and `V2` in `w1, w2` are the rational functions
//! `g11 = N^2 / (|V1|^8 |V1 x V2|^6)` and `g12 = |W1 x W2|^4 / |V1 x V2|^6`.

use rug::ops::Pow;
use rug::{Float, Rational};
use serde::{Deserialize, Serialize};

use crate::combinatorics::Triangulation;
use crate::error::{Error, Result};
use crate::geometry::config::PUP_TENT_HEIGHT_INDEX;
use crate::geometry::Configuration;
use crate::numeric::vec3::{self, Point3};

pub const NORM_WINDOW: (f64, f64) = (0.48, 2.4);
pub const CROSS_WINDOW: (f64, f64) = (0.85, 2.4);
/// Squared norms must stay in this open interval over the ball.
pub const SQUARE_INTERVAL: (f64, f64) = (0.1, 10.0);
pub const MIN_SLACK: f64 = 1e-3;
pub const CRUDE_BALL_RADIUS: f64 = 1e-4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VectorBound {
    pub face: usize,
    /// `(P0, P1, P2)` as vertex indices.
    pub order: [usize; 3],
    pub norm_v1: f64,
    pub norm_v2: f64,
    pub norm_cross: f64,
    /// Largest `|w_k|`.
    pub max_abs_height: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VectorBoundsReport {
    pub entries: Vec<VectorBound>,
    pub ball_radius: f64,
    /// How far any checked quantity can move over the ball; at least
    /// [`MIN_SLACK`].
    pub slack: f64,
    pub norm_range: (f64, f64),
    pub cross_range: (f64, f64),
    pub max_abs_height: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GValue {
    pub face: usize,
    pub order: [usize; 3],
    pub g11: f64,
    pub g12: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GBoundsReport {
    pub values: Vec<GValue>,
    pub g11_max: f64,
    pub g12_max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrudeBoundReport {
    pub vector_bounds: VectorBoundsReport,
    pub g_bounds: GBoundsReport,
    pub g11_max: f64,
    pub g12_max: f64,
    /// Bounds on `|t_1| .. |t_7|` implied by the square interval.
    pub t_bounds: [u64; 7],
    /// Upper bound on `|N|`.
    pub numerator_bound: u64,
    /// Lower bound on the `g11` denominator.
    pub denominator_bound: f64,
    /// Upper bound on every `g` over the ball.
    pub g_bound: f64,
    /// Upper bound on every friendly term.
    pub friendly_term_bound: f64,
    /// Most friendly terms any second partial expands to, counted.
    pub friendly_term_count: usize,
    pub friendly_term_count_bound: usize,
    /// Upper bound on `|d^2 theta_k / dz_i dz_j|` over the ball.
    pub second_derivative_bound: f64,
}

/// The six ordered versions of face `f`, each with its apex first.
pub fn ordered_faces(f: [usize; 3]) -> [[usize; 3]; 6] {
    let [a, b, c] = f;
    [
        [a, b, c],
        [a, c, b],
        [b, a, c],
        [b, c, a],
        [c, a, b],
        [c, b, a],
    ]
}

/// All relevant pairs as `(face index, order)`.
pub fn relevant_vector_pairs(t: &Triangulation) -> Vec<(usize, [usize; 3])> {
    t.faces()
        .iter()
        .enumerate()
        .flat_map(|(i, f)| ordered_faces(*f).into_iter().map(move |o| (i, o)))
        .collect()
}

fn pair_vectors(c: &Configuration, order: [usize; 3]) -> (Point3, Point3) {
    let p0 = c.point(order[0]);
    (
        vec3::sub(c.point(order[1]), p0),
        vec3::sub(c.point(order[2]), p0),
    )
}

/// Check the norm windows at the center and that, after widening by the
/// slack, every squared quantity stays in [`SQUARE_INTERVAL`] and every
/// height difference below 1. Vertex heights are assumed to move by at most
/// `ball_radius`, so each `V_k` moves by at most `2 ball_radius`.
pub fn vector_bounds_check(c: &Configuration, ball_radius: f64) -> Result<VectorBoundsReport> {
    let mut entries = Vec::new();
    let mut slack = MIN_SLACK;
    for (face, order) in relevant_vector_pairs(c.triangulation()) {
        let (v1, v2) = pair_vectors(c, order);
        let norm_v1 = vec3::norm_sq(&v1).sqrt().to_f64();
        let norm_v2 = vec3::norm_sq(&v2).sqrt().to_f64();
        let norm_cross = vec3::norm_sq(&vec3::cross(&v1, &v2)).sqrt().to_f64();
        let dv = 2.0 * ball_radius;
        // |(V1 + a) x (V2 + b) - V1 x V2| <= |a||V2| + |V1||b| + |a||b|
        slack = slack.max(dv * (norm_v1 + norm_v2) + dv * dv);
        entries.push(VectorBound {
            face,
            order,
            norm_v1,
            norm_v2,
            norm_cross,
            max_abs_height: v1[2].to_f64().abs().max(v2[2].to_f64().abs()),
        });
    }
    let range = |xs: &mut dyn Iterator<Item = f64>| {
        xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
            (lo.min(x), hi.max(x))
        })
    };
    let report = VectorBoundsReport {
        norm_range: range(&mut entries.iter().flat_map(|e| [e.norm_v1, e.norm_v2])),
        cross_range: range(&mut entries.iter().map(|e| e.norm_cross)),
        max_abs_height: entries.iter().map(|e| e.max_abs_height).fold(0.0, f64::max),
        entries,
        ball_radius,
        slack,
    };

    for e in &report.entries {
        let bad = |what: &str, x: f64, w: (f64, f64)| {
            Error::BoundViolated(format!(
                "face {} order {:?}: {what} = {x} outside [{}, {}]",
                e.face, e.order, w.0, w.1
            ))
        };
        for x in [e.norm_v1, e.norm_v2] {
            if !(NORM_WINDOW.0..=NORM_WINDOW.1).contains(&x) {
                return Err(bad("|V_k|", x, NORM_WINDOW));
            }
        }
        if !(CROSS_WINDOW.0..=CROSS_WINDOW.1).contains(&e.norm_cross) {
            return Err(bad("|V1 x V2|", e.norm_cross, CROSS_WINDOW));
        }
    }
    let lo = NORM_WINDOW.0.min(CROSS_WINDOW.0) - slack;
    let hi = NORM_WINDOW.1.max(CROSS_WINDOW.1) + slack;
    if !(lo * lo > SQUARE_INTERVAL.0 && hi * hi < SQUARE_INTERVAL.1) {
        return Err(Error::BoundViolated(format!(
            "widened window [{lo}, {hi}] does not square into {SQUARE_INTERVAL:?}"
        )));
    }
    if !(report.max_abs_height + slack < 1.0) {
        return Err(Error::BoundViolated(format!(
            "height difference {} plus slack {slack} reaches 1",
            report.max_abs_height
        )));
    }
    Ok(report)
}

/// `(g11, g12)` for one pair of vectors.
pub fn g_values(v1: &Point3, v2: &Point3) -> (Float, Float) {
    let prec = v1[0].prec();
    let mul = |a: &Float, b: &Float| Float::with_val(prec, a * b);
    let (u1, s1, w1) = (&v1[0], &v1[1], &v1[2]);
    let (u2, s2, w2) = (&v2[0], &v2[1], &v2[2]);
    let wx = Float::with_val(prec, mul(u1, s2) - mul(u2, s1));
    let cr = mul(&wx, &wx);
    let n1 = Float::with_val(prec, mul(u1, u1) + mul(s1, s1));
    let n2 = Float::with_val(prec, mul(u2, u2) + mul(s2, s2));
    let d = Float::with_val(prec, mul(u1, u2) + mul(s1, s2));
    let big_c = vec3::norm_sq(&vec3::cross(v1, v2));
    let c3 = Float::with_val(prec, &big_c * &big_c) * &big_c;

    let t1 = mul(&n1, &cr) * 3u32;
    let t2 = mul(&n1, &n1) * 2u32;
    let t3 = Float::with_val(prec, mul(&d, &d) + mul(&n1, &n2)) * 3u32;
    let t4 = -(mul(&n1, &d) * 6u32);
    let t5 = -(mul(&d, &n2) * 2u32);
    let t6 = -mul(&cr, &d);
    let t7 = mul(&mul(&n1, &cr), &d);
    let pw = |x: &Float, k: u32| x.clone().pow(k);
    let terms = [
        mul(&t1, &mul(w1, w2)),
        mul(&t2, &mul(w1, &pw(w2, 3))),
        mul(&t3, &mul(&pw(w1, 3), w2)),
        mul(&t4, &mul(&pw(w1, 2), &pw(w2, 2))),
        mul(&t5, &pw(w1, 4)),
        mul(&t6, &pw(w1, 2)),
        t7,
    ];
    let n = terms.iter().fold(Float::new(prec), |s, x| s + x);
    let v1sq = vec3::norm_sq(v1);
    let denom = mul(&pw(&v1sq, 4), &c3);
    let g11 = Float::with_val(prec, n.square_ref()) / denom;
    let g12 = Float::with_val(prec, cr.square_ref()) / c3;
    (g11, g12)
}

/// `g11` and `g12` at the center for every relevant pair, checking
/// `g12 < 10` and `g11 < 10^14`.
pub fn eval_g_bounds(c: &Configuration) -> Result<GBoundsReport> {
    let mut values = Vec::new();
    for (face, order) in relevant_vector_pairs(c.triangulation()) {
        let (v1, v2) = pair_vectors(c, order);
        let (g11, g12) = g_values(&v1, &v2);
        values.push(GValue {
            face,
            order,
            g11: g11.to_f64(),
            g12: g12.to_f64(),
        });
    }
    let g11_max = values.iter().map(|v| v.g11).fold(0.0, f64::max);
    let g12_max = values.iter().map(|v| v.g12).fold(0.0, f64::max);
    if !(g12_max < 10.0) {
        return Err(Error::BoundViolated(format!("g12 reaches {g12_max} >= 10")));
    }
    if !(g11_max < 1e14) {
        return Err(Error::BoundViolated(format!(
            "g11 reaches {g11_max:e} >= 1e14"
        )));
    }
    Ok(GBoundsReport {
        values,
        g11_max,
        g12_max,
    })
}

/// Most friendly terms a second partial `d^2 theta_k / dz_i dz_j` of the
/// symmetric family expands to, counting an unfriendly term as two.
///
/// `height_index[v] = Some(i)` when vertex `v` moves with `z_i`.
pub fn friendly_term_count(t: &Triangulation, height_index: &[Option<usize>]) -> usize {
    let movers = |i: usize| -> Vec<usize> {
        (0..height_index.len())
            .filter(|&v| height_index[v] == Some(i))
            .collect()
    };
    let params = height_index.iter().flatten().max().map_or(0, |m| m + 1);
    let mut worst = 0;
    for k in 0..params {
        for i in 0..params {
            for j in 0..params {
                let mut count = 0;
                for f in t.faces().iter().filter(|f| f.contains(&k)) {
                    for a in movers(i) {
                        for b in movers(j) {
                            if f.contains(&a) && f.contains(&b) {
                                count += if a == k || b == k { 2 } else { 1 };
                            }
                        }
                    }
                }
                worst = worst.max(count);
            }
        }
    }
    worst
}

/// Bounds on `|t_1| .. |t_7|` when every squared norm is below `hi` (so
/// `|W1.W2| < hi` as well).
fn t_bounds(hi: u64) -> [u64; 7] {
    [
        3 * hi * hi,
        2 * hi * hi,
        6 * hi * hi,
        6 * hi * hi,
        2 * hi * hi,
        hi * hi,
        hi * hi * hi,
    ]
}

/// Vector bounds, `g` values, and the chain to `|d^2 theta| < 10^9` on the
/// ball of radius `10^-4`: squares in `(1/10, 10)` and `|w| < 1` give
/// `|N| <= sum |t_i| < 10^(7/2)` and `D > 10^-7`, so every `g < 10^14`, every
/// friendly term is below `10^7`, and at most 48 of them make up each second
/// partial.
pub fn crude_bound_certificate(c: &Configuration) -> Result<CrudeBoundReport> {
    let vector_bounds = vector_bounds_check(c, CRUDE_BALL_RADIUS)?;
    let g_bounds = eval_g_bounds(c)?;

    let hi = SQUARE_INTERVAL.1 as u64;
    let t = t_bounds(hi);
    let numerator_bound: u64 = t.iter().sum();
    let lo = Rational::from((1, 10));
    // D = |V1|^8 |V1 x V2|^6 = (|V1|^2)^4 (|V1 x V2|^2)^3
    let denominator = lo.clone().pow(7i32);
    let g_bound = Rational::from(numerator_bound * numerator_bound) / &denominator;
    let g12_bound = Rational::from(1) / &lo;
    let g_limit = Rational::from(10u64.pow(14));
    if !(Rational::from(numerator_bound.pow(2)) < Rational::from(10u64.pow(7))) {
        return Err(Error::BoundViolated(format!(
            "|N| bound {numerator_bound} is not below 10^3.5"
        )));
    }
    if !(g_bound < g_limit && g12_bound < g_limit) {
        return Err(Error::BoundViolated(format!(
            "g bound {} is not below 1e14",
            g_bound.to_f64()
        )));
    }
    let friendly_term_count = friendly_term_count(c.triangulation(), &PUP_TENT_HEIGHT_INDEX);
    let friendly_term_count_bound = 48;
    if friendly_term_count > friendly_term_count_bound {
        return Err(Error::BoundViolated(format!(
            "second partials expand to {friendly_term_count} friendly terms, more than {friendly_term_count_bound}"
        )));
    }
    // friendly^2 < 1e14, so friendly < 1e7
    let friendly = 1e7;
    let second = friendly_term_count_bound as f64 * friendly;
    if !(second < 1e9) {
        return Err(Error::BoundViolated(format!("{second:e} is not below 1e9")));
    }
    Ok(CrudeBoundReport {
        g11_max: g_bounds.g11_max,
        g12_max: g_bounds.g12_max,
        vector_bounds,
        g_bounds,
        t_bounds: t,
        numerator_bound,
        denominator_bound: denominator.to_f64(),
        g_bound: 1e14,
        friendly_term_bound: friendly,
        friendly_term_count,
        friendly_term_count_bound,
        second_derivative_bound: 1e9,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_pup_tent, PupTentParams};
    use crate::numeric::Precision;

    #[test]
    fn t_bounds_sum() {
        assert_eq!(t_bounds(10), [300, 200, 600, 600, 200, 100, 1000]);
    }

    #[test]
    fn pup_tent_passes() {
        let p = Precision::new(64);
        let c = build_pup_tent(&PupTentParams::published(p), p).unwrap();
        let r = crude_bound_certificate(&c).unwrap();
        assert_eq!(r.vector_bounds.entries.len(), 96);
        assert!(r.g12_max < 10.0 && r.g11_max < 1e14);
        assert_eq!(r.numerator_bound, 3000);
        assert!(r.friendly_term_count <= 48);
    }

    #[test]
    fn friendly_count_without_symmetry() {
        let t = Triangulation::best8();
        let idx: Vec<Option<usize>> = (0..8).map(Some).collect();
        let n = friendly_term_count(&t, &idx);
        // d^2 theta_k / dz_k^2: six unfriendly terms
        assert_eq!(n, 12);
    }
}
