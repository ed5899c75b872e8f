//! The inverse-function chain: a flat embedded torus exists within `10^-13`
//! of the pup tent.
//!
//! With `F` the angle map and `M` the fixed matrix below, the chain is
//! expansion (`|M V| >= 3/4`, `dF_q` within `1/90` of `M` on the ball, so
//! `|dF_q V| > 1/2`) plus near-constancy of `dF` on the ball, which make `F`
//! quarter-expansive on `B(p, 10^-13)`; the image then contains the ball of
//! radius `10^-13 / 4` about `F(p)`, and `F(p)` is within `sqrt 3 10^-15` of
//! `(2 pi, 2 pi, 2 pi)`.

use rug::Float;
use serde::{Deserialize, Serialize};

use super::bounds::{crude_bound_certificate, CrudeBoundReport};
use super::scaled::scale_to_integers;
use super::separation::{certify_robust_embedding, relevant_pairs, SeparationParams};
use crate::error::{Error, Result};
use crate::geometry::{build_pup_tent, cone_angles, Configuration, PupTentParams};
use crate::mat3::{self, Mat3};
use crate::numeric::{parse_decimal, pow10, Precision};
use crate::solver::angle_map::analytic_jacobian;

pub const M_ENTRIES: [[&str; 3]; 3] = [
    ["-0.91", "0.74", "0.39"],
    ["0.74", "-1.92", "1.14"],
    ["0.39", "1.14", "-0.06"],
];
pub const REQUIRED_FLATNESS_EXP: i32 = -15;
pub const BALL_RADIUS_EXP: i32 = -13;
pub const EIGENVALUE_FLOOR: &str = "0.76";

pub fn fixed_matrix(precision: Precision) -> Mat3 {
    mat3::from_strs(M_ENTRIES, precision)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainLink {
    pub name: String,
    pub statement: String,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExistenceCertificate {
    pub precision: Precision,
    pub params: PupTentParams,
    /// `max_k |theta_k - 2 pi|` over all vertices.
    pub flatness_at_p: Float,
    pub m: Mat3,
    pub eigenvalues: [Float; 3],
    pub min_abs_eigenvalue: Float,
    pub df_p: Mat3,
    /// Largest absolute entry of `dF_p - M`.
    pub df_minus_m_inf: Float,
    pub expansion_lambda: Float,
    pub ball_radius: Float,
    pub conclusion_radius: Float,
    pub links: Vec<ChainLink>,
    pub crude: CrudeBoundReport,
    pub embedding_certificates: usize,
}

/// The three free heights of a pup-tent configuration, checked against a
/// rebuild from them.
pub fn pup_tent_params_of(c: &Configuration) -> Result<PupTentParams> {
    let precision = c.precision();
    let params = PupTentParams::new(std::array::from_fn(|i| c.point(i)[2].clone()));
    let rebuilt = build_pup_tent(&params, precision)?;
    let tol = pow10(4 - precision.digits() as i32, precision);
    let close = rebuilt.triangulation() == c.triangulation()
        && rebuilt
            .coordinates()
            .iter()
            .zip(c.coordinates())
            .all(|(a, b)| {
                a.iter()
                    .zip(b)
                    .all(|(x, y)| Float::with_val(precision.bits(), x - y).abs() <= tol)
            });
    if !close {
        return Err(Error::InvalidConfiguration(
            "not a member of the symmetric pup-tent family".into(),
        ));
    }
    Ok(params)
}

struct Evaluated {
    flatness: Float,
    df_p: Mat3,
    eigenvalues: [Float; 3],
    min_abs: Float,
    df_minus_m: Float,
    links: Vec<ChainLink>,
}

fn evaluate(
    c: &Configuration,
    params: &PupTentParams,
    precision: Precision,
    crude: &CrudeBoundReport,
    embedded: bool,
) -> Result<Evaluated> {
    let bits = precision.bits();
    let c = c.with_precision(precision);
    let q = |a: u32, b: u32| Float::with_val(bits, a) / b;
    let e = |k: i32| pow10(k, precision);
    let sqrt3 = Float::with_val(bits, 3u32).sqrt();
    let mut links = Vec::new();
    let mut link = |name: &str, statement: String, holds: bool| {
        links.push(ChainLink {
            name: name.into(),
            statement,
            holds,
        })
    };

    let flatness = cone_angles(&c)?.max_deviation;
    link(
        "flatness",
        format!("max |theta - 2 pi| = {:.6e} <= 1e-15", flatness.to_f64()),
        flatness <= e(REQUIRED_FLATNESS_EXP),
    );

    let m = fixed_matrix(precision);
    let eigenvalues = mat3::symmetric_eigenvalues(&m);
    let min_abs = eigenvalues
        .iter()
        .map(|x| Float::with_val(bits, x.abs_ref()))
        .reduce(|a, b| if b < a { b } else { a })
        .expect("three eigenvalues");
    let floor = parse_decimal(EIGENVALUE_FLOOR, precision).expect("constant decimal");
    link(
        "eigenvalues",
        format!("min |eig M| = {:.6} > 0.76 >= 3/4", min_abs.to_f64()),
        min_abs > floor && floor >= q(3, 4),
    );

    let df_p = analytic_jacobian(params, precision)?;
    let df_minus_m = mat3::max_abs_entry(&mat3::sub(&df_p, &m));
    link(
        "nearness at p",
        format!("max |dF_p - M| = {:.6} < 1/100", df_minus_m.to_f64()),
        df_minus_m < q(1, 100),
    );

    link(
        "crude bound",
        format!(
            "|d^2 theta_k / dz_i dz_j| < {:e} <= 1e9 on B(p, {:e})",
            crude.second_derivative_bound, crude.vector_bounds.ball_radius
        ),
        crude.second_derivative_bound <= 1e9 && crude.vector_bounds.ball_radius >= 1e-13,
    );

    let drift = Float::with_val(bits, &sqrt3 * e(BALL_RADIUS_EXP)) * e(9);
    link(
        "integration",
        format!("sqrt3 * 1e-13 * 1e9 = {:.6e} < 1/1000", drift.to_f64()),
        drift < q(1, 1000),
    );

    let near = q(1, 100) + q(1, 1000);
    link(
        "nearness on ball",
        "1/100 + 1/1000 < 1/90".into(),
        near < q(1, 90),
    );

    // |E V| <= 3 max|E_ij| for unit V
    let expansion = q(3, 4) - Float::with_val(bits, q(1, 90) * 3u32);
    link(
        "expansion",
        "3/4 - 3/90 > 1/2 = 2 lambda".into(),
        expansion > q(1, 2),
    );

    let ratio = q(3, 1000) / q(1, 2);
    let sin60 = Float::with_val(bits, &sqrt3 / 2u32);
    link(
        "angle",
        "(3/1000) / (1/2) < sin(pi/3)".into(),
        ratio < sin60,
    );

    let image = Float::with_val(bits, &sqrt3 * e(REQUIRED_FLATNESS_EXP));
    let reach = e(BALL_RADIUS_EXP) / 4u32;
    link(
        "surjectivity",
        "sqrt3 * 1e-15 < 1e-13 / 4".into(),
        image < reach,
    );

    link(
        "robust embedding",
        "every relevant face pair separated; 1e-13 < 1e-4".into(),
        embedded && e(BALL_RADIUS_EXP) < e(-4),
    );

    Ok(Evaluated {
        flatness,
        df_p,
        eigenvalues,
        min_abs,
        df_minus_m,
        links,
    })
}

/// Runs the crude bound and the embedding certification, then checks every
/// link of the chain at `precision` and again at twice the precision.
pub fn ift_certificate(c: &Configuration, precision: Precision) -> Result<ExistenceCertificate> {
    let crude = crude_bound_certificate(c).map_err(|e| Error::ChainBroken {
        link: "crude bound".into(),
        detail: e.to_string(),
    })?;
    let sc = scale_to_integers(c)?;
    let certs = certify_robust_embedding(&sc, &SeparationParams::default()).map_err(|e| {
        Error::ChainBroken {
            link: "robust embedding".into(),
            detail: e.to_string(),
        }
    })?;
    let embedded = certs.len() == relevant_pairs(&sc).len();
    ift_from_parts(c, precision, crude, certs.len(), embedded)
}

/// The chain with the crude bound and embedding already established.
pub fn ift_from_parts(
    c: &Configuration,
    precision: Precision,
    crude: CrudeBoundReport,
    embedding_certificates: usize,
    embedded: bool,
) -> Result<ExistenceCertificate> {
    let params = pup_tent_params_of(c)?;
    let at = evaluate(c, &params, precision, &crude, embedded)?;
    let doubled = evaluate(c, &params, precision.doubled(), &crude, embedded)?;
    for (a, b) in at.links.iter().zip(&doubled.links) {
        if a.holds != b.holds {
            return Err(Error::ChainBroken {
                link: a.name.clone(),
                detail: format!("verdict changes at {} digits", precision.doubled().digits()),
            });
        }
    }
    if let Some(bad) = at.links.iter().find(|l| !l.holds) {
        return Err(Error::ChainBroken {
            link: bad.name.clone(),
            detail: bad.statement.clone(),
        });
    }
    let bits = precision.bits();
    Ok(ExistenceCertificate {
        precision,
        params,
        flatness_at_p: at.flatness,
        m: fixed_matrix(precision),
        eigenvalues: at.eigenvalues,
        min_abs_eigenvalue: at.min_abs,
        df_p: at.df_p,
        df_minus_m_inf: at.df_minus_m,
        expansion_lambda: Float::with_val(bits, 1u32) / 4u32,
        ball_radius: pow10(BALL_RADIUS_EXP, precision),
        conclusion_radius: pow10(BALL_RADIUS_EXP, precision),
        links: at.links,
        crude,
        embedding_certificates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_matrix_spectrum() {
        let p = Precision::new(64);
        let e = mat3::symmetric_eigenvalues(&fixed_matrix(p));
        let expected = [-2.6215, -1.0309, 0.76248];
        for (x, y) in e.iter().zip(expected) {
            assert!((x.to_f64() - y).abs() < 1e-4);
        }
    }

    #[test]
    fn pup_tent_chain_holds() {
        let p = Precision::new(64);
        let c = build_pup_tent(&PupTentParams::published(p), p).unwrap();
        let cert = ift_certificate(&c, p).unwrap();
        assert_eq!(cert.links.len(), 10);
        assert!(cert.links.iter().all(|l| l.holds));
        assert!(cert.df_minus_m_inf < 0.01);
        assert_eq!(cert.conclusion_radius, pow10(-13, p));
        assert_eq!(cert.embedding_certificates, 96);
    }

    #[test]
    fn off_family_configuration_rejected() {
        let p = Precision::new(64);
        let c = build_pup_tent(&PupTentParams::published(p), p).unwrap();
        let mut coords = c.coordinates().to_vec();
        coords[5][2] += Float::with_val(p.bits(), 1e-3);
        let moved = c.with_coordinates(coords).unwrap();
        assert!(matches!(
            pup_tent_params_of(&moved),
            Err(Error::InvalidConfiguration(_))
        ));
    }
}
