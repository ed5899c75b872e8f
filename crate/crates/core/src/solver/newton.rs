//! Newton iteration on `F(p) = (2 pi, 2 pi, 2 pi)` at arbitrary precision.

use rug::Float;

use super::angle_map::{analytic_jacobian, angle_map};
use crate::error::{Error, Result};
use crate::geometry::PupTentParams;
use crate::mat3;
use crate::numeric::Precision;

pub const NEWTON_MAX_ITERATIONS: usize = 200;

#[derive(Clone, Debug, PartialEq)]
pub struct NewtonOutcome {
    pub params: PupTentParams,
    pub iterations: usize,
    /// Deviation before each step, then the final deviation.
    pub deviations: Vec<Float>,
}

pub fn newton_refine(
    p0: &PupTentParams,
    target_flatness: &Float,
    precision: Precision,
) -> Result<PupTentParams> {
    newton_refine_traced(p0, target_flatness, precision).map(|o| o.params)
}

pub fn newton_refine_traced(
    p0: &PupTentParams,
    target_flatness: &Float,
    precision: Precision,
) -> Result<NewtonOutcome> {
    let mut p = p0.with_precision(precision);
    let mut deviations = Vec::new();
    for iteration in 0..=NEWTON_MAX_ITERATIONS {
        let sample = angle_map(&p, precision)?;
        let dev = sample.deviation();
        deviations.push(dev.clone());
        if dev <= *target_flatness {
            return Ok(NewtonOutcome {
                params: p,
                iterations: iteration,
                deviations,
            });
        }
        if iteration == NEWTON_MAX_ITERATIONS {
            return Err(Error::NoConvergence {
                iterations: iteration,
                deviation: dev.to_f64(),
            });
        }
        let j = analytic_jacobian(&p, precision)?;
        let (inv, _) = mat3::inverse(&j, &precision.half_tolerance()).ok_or_else(|| {
            Error::SingularMatrix {
                det: mat3::det(&j).to_f64(),
            }
        })?;
        let step = mat3::mul_vec(&inv, &sample.residual());
        for (z, s) in p.z.iter_mut().zip(step) {
            *z -= s;
        }
    }
    unreachable!("loop returns on its last iteration")
}

/// The first `decimals` digits after the point, truncated (not rounded).
pub fn truncate_decimals(x: &Float, decimals: usize) -> String {
    let scaled = crate::numeric::scale_truncate(x, decimals as u32);
    let negative = scaled < 0;
    let digits = scaled.abs().to_string();
    let digits = format!("{digits:0>width$}", width = decimals + 1);
    let (int, frac) = digits.split_at(digits.len() - decimals);
    format!("{}{}.{}", if negative { "-" } else { "" }, int, frac)
}
