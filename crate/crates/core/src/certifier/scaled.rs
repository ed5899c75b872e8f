//! Integer coordinates: every coordinate times `10^scale_exp`, truncated
//! toward zero.

use crate::combinatorics::Triangulation;
use crate::error::{Error, Result};
use crate::geometry::Configuration;
use crate::numeric::scale_truncate;

pub const DEFAULT_SCALE_EXP: u32 = 32;

pub type IntPoint3 = [i128; 3];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScaledIntegerConfig {
    pub scale_exp: u32,
    pub coordinates: Vec<IntPoint3>,
    pub triangulation: Triangulation,
}

impl ScaledIntegerConfig {
    pub fn max_abs(&self) -> i128 {
        self.coordinates
            .iter()
            .flatten()
            .map(|x| x.abs())
            .max()
            .unwrap_or(0)
    }

    pub fn triangle(&self, face: usize) -> [IntPoint3; 3] {
        self.triangulation.faces()[face].map(|v| self.coordinates[v])
    }
}

pub fn scale_to_integers(c: &Configuration) -> Result<ScaledIntegerConfig> {
    scale_to_integers_with(c, DEFAULT_SCALE_EXP)
}

pub fn scale_to_integers_with(c: &Configuration, scale_exp: u32) -> Result<ScaledIntegerConfig> {
    let have = c.precision().digits();
    if have < scale_exp {
        return Err(Error::InsufficientPrecision {
            have,
            need: scale_exp,
        });
    }
    let mut coordinates = Vec::with_capacity(c.coordinates().len());
    for p in c.coordinates() {
        let mut q = [0i128; 3];
        for (slot, x) in q.iter_mut().zip(p) {
            *slot = scale_truncate(x, scale_exp).to_i128().ok_or_else(|| {
                Error::InvalidConfiguration(format!(
                    "coordinate {} does not fit after scaling",
                    x.to_f64()
                ))
            })?;
        }
        coordinates.push(q);
    }
    Ok(ScaledIntegerConfig {
        scale_exp,
        coordinates,
        triangulation: c.triangulation().clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_pup_tent, PupTentParams};
    use crate::numeric::{pow10, Precision};
    use rug::{Float, Integer};

    fn pup(p: Precision) -> Configuration {
        build_pup_tent(&PupTentParams::published(p), p).unwrap()
    }

    #[test]
    fn exact_decimal_rows() {
        let sc = scale_to_integers(&pup(Precision::new(64))).unwrap();
        assert_eq!(sc.coordinates[0][0], 755 * 10i128.pow(29));
        assert_eq!(sc.coordinates[5][2], 0);
        assert_eq!(sc.coordinates[5][0], -9 * 10i128.pow(30));
        assert!(sc.max_abs() <= 2 * 10i128.pow(32));
    }

    #[test]
    fn truncation_error_below_one_unit() {
        let p = Precision::new(64);
        let c = pup(p);
        let sc = scale_to_integers(&c).unwrap();
        let unit = pow10(-32, p);
        for (q, x) in sc.coordinates.iter().zip(c.coordinates()) {
            for k in 0..3 {
                let back = Float::with_val(p.bits(), Integer::from(q[k])) * &unit;
                assert!(Float::with_val(p.bits(), &back - &x[k]).abs() < unit);
            }
        }
    }

    #[test]
    fn needs_enough_digits() {
        let c = pup(Precision::new(40));
        assert!(matches!(
            scale_to_integers_with(&c, 48),
            Err(Error::InsufficientPrecision { have: 40, need: 48 })
        ));
    }
}
