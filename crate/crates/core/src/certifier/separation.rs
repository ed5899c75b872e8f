//! Separation certificates in exact integer arithmetic.
//!
//! For a direction `L`, write `m_j(L)` and `M_j(L)` for the min and max of
//! `w . L` over the relevant vertices of triangle `j`: all three vertices
//! for a vertex-disjoint pair, the edge opposite the shared vertex `v`
//! otherwise. A disjoint pair is certified on side 0 when
//! `M_0 + lambda < m_1` and on side 1 when `M_1 + lambda < m_0`. A pair
//! sharing `v` needs `M_0 + lambda < v.L < m_1 - lambda` (side 0) or the same
//! with the triangles swapped (side 1). The recorded margin is the smallest
//! gap, so the certificate holds exactly when `margin > lambda`.

use rayon::prelude::*;

use super::scaled::{IntPoint3, ScaledIntegerConfig};
use crate::combinatorics::triangulation::shared_vertices;
use crate::error::{Error, Result};

pub const DEFAULT_GRID: i64 = 300;
/// `2e-4` separation, times the grid and `10^32`.
pub const DEFAULT_LAMBDA: i128 = 6 * 10i128.pow(30);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeparationParams {
    /// Directions are the integer vectors with max-norm `grid`.
    pub grid: i64,
    /// Required margin, strict.
    pub lambda: i128,
}

impl Default for SeparationParams {
    fn default() -> Self {
        SeparationParams {
            grid: DEFAULT_GRID,
            lambda: DEFAULT_LAMBDA,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SeparationKind {
    Disjoint,
    SharedVertex { vertex: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SeparationCertificate {
    /// Face indices, first < second.
    pub pair: (usize, usize),
    pub kind: SeparationKind,
    pub direction: [i64; 3],
    /// 0 if triangle `pair.0` lies on the low side of the direction.
    pub side: u8,
    pub margin: i128,
}

fn dot(w: &IntPoint3, l: &[i64; 3]) -> i128 {
    w[0] * l[0] as i128 + w[1] * l[1] as i128 + w[2] * l[2] as i128
}

fn min_max(points: &[IntPoint3], l: &[i64; 3]) -> (i128, i128) {
    points
        .iter()
        .map(|w| dot(w, l))
        .fold((i128::MAX, i128::MIN), |(lo, hi), d| (lo.min(d), hi.max(d)))
}

/// Margins `(side 0, side 1)` of a vertex-disjoint pair.
pub fn disjoint_margins(a: &[IntPoint3; 3], b: &[IntPoint3; 3], l: &[i64; 3]) -> (i128, i128) {
    let (m0, big0) = min_max(a, l);
    let (m1, big1) = min_max(b, l);
    (m1 - big0, m0 - big1)
}

/// Margins `(side 0, side 1)` of a pair sharing `v`, with `e0`, `e1` the
/// opposite edges.
pub fn shared_margins(
    v: &IntPoint3,
    e0: &[IntPoint3; 2],
    e1: &[IntPoint3; 2],
    l: &[i64; 3],
) -> (i128, i128) {
    let (m0, big0) = min_max(e0, l);
    let (m1, big1) = min_max(e1, l);
    let vl = dot(v, l);
    ((vl - big0).min(m1 - vl), (vl - big1).min(m0 - vl))
}

/// Cube-surface directions `max |component| = grid`, lexicographic in
/// `(x, y, z)` from `-grid` to `grid`.
pub fn grid_directions(grid: i64) -> impl Iterator<Item = [i64; 3]> {
    (-grid..=grid).flat_map(move |x| {
        (-grid..=grid).flat_map(move |y| {
            let face = x.abs() == grid || y.abs() == grid;
            let zs: Box<dyn Iterator<Item = i64>> = if face {
                Box::new(-grid..=grid)
            } else {
                Box::new([-grid, grid].into_iter())
            };
            zs.map(move |z| [x, y, z])
        })
    })
}

enum Geometry {
    Disjoint([IntPoint3; 3], [IntPoint3; 3]),
    Shared(IntPoint3, [IntPoint3; 2], [IntPoint3; 2]),
}

impl Geometry {
    fn of(sc: &ScaledIntegerConfig, pair: (usize, usize)) -> Result<(SeparationKind, Geometry)> {
        let faces = sc.triangulation.faces();
        let (fa, fb) = match (faces.get(pair.0), faces.get(pair.1)) {
            (Some(a), Some(b)) if pair.0 < pair.1 => (*a, *b),
            _ => {
                return Err(Error::InvalidConfiguration(format!(
                    "bad face pair {pair:?}"
                )))
            }
        };
        let pt = |v: usize| sc.coordinates[v];
        let shared = shared_vertices(fa, fb);
        match shared.as_slice() {
            [] => Ok((
                SeparationKind::Disjoint,
                Geometry::Disjoint(fa.map(pt), fb.map(pt)),
            )),
            [v] => {
                let opposite = |f: [usize; 3]| {
                    let rest: Vec<usize> = f.iter().copied().filter(|w| w != v).collect();
                    [pt(rest[0]), pt(rest[1])]
                };
                Ok((
                    SeparationKind::SharedVertex { vertex: *v },
                    Geometry::Shared(pt(*v), opposite(fa), opposite(fb)),
                ))
            }
            _ => Err(Error::InvalidConfiguration(format!(
                "faces {pair:?} share an edge and need no certificate"
            ))),
        }
    }

    fn margins(&self, l: &[i64; 3]) -> (i128, i128) {
        match self {
            Geometry::Disjoint(a, b) => disjoint_margins(a, b, l),
            Geometry::Shared(v, e0, e1) => shared_margins(v, e0, e1, l),
        }
    }
}

fn check_range(sc: &ScaledIntegerConfig, grid: i64) -> Result<()> {
    // a margin is a difference of two dot products of three terms each
    let bound = i128::MAX / 8 / grid.max(1) as i128;
    if grid <= 0 || sc.max_abs() > bound {
        return Err(Error::InvalidConfiguration(format!(
            "grid {grid} or coordinate size {} out of range for 128-bit arithmetic",
            sc.max_abs()
        )));
    }
    Ok(())
}

fn find(
    sc: &ScaledIntegerConfig,
    pair: (usize, usize),
    params: &SeparationParams,
) -> Result<SeparationCertificate> {
    check_range(sc, params.grid)?;
    let (kind, geom) = Geometry::of(sc, pair)?;
    let mut best = i128::MIN;
    for l in grid_directions(params.grid) {
        let (s0, s1) = geom.margins(&l);
        for (side, margin) in [(0u8, s0), (1u8, s1)] {
            if margin > params.lambda {
                return Ok(SeparationCertificate {
                    pair,
                    kind,
                    direction: l,
                    side,
                    margin,
                });
            }
            best = best.max(margin);
        }
    }
    Err(Error::NoCertificateFound {
        pair,
        best_margin: best.to_string(),
    })
}

/// First grid direction separating a vertex-disjoint pair by more than
/// `lambda`.
pub fn find_separation_disjoint(
    sc: &ScaledIntegerConfig,
    pair: (usize, usize),
    params: &SeparationParams,
) -> Result<SeparationCertificate> {
    let n = shared_vertices(
        sc.triangulation.faces()[pair.0],
        sc.triangulation.faces()[pair.1],
    )
    .len();
    if n != 0 {
        return Err(Error::InvalidConfiguration(format!(
            "faces {pair:?} share {n} vertices"
        )));
    }
    find(sc, pair, params)
}

/// First grid direction separating the opposite edges of a pair sharing one
/// vertex, on either side of that vertex, by more than `lambda`.
pub fn find_separation_shared(
    sc: &ScaledIntegerConfig,
    pair: (usize, usize),
    params: &SeparationParams,
) -> Result<SeparationCertificate> {
    let n = shared_vertices(
        sc.triangulation.faces()[pair.0],
        sc.triangulation.faces()[pair.1],
    )
    .len();
    if n != 1 {
        return Err(Error::InvalidConfiguration(format!(
            "faces {pair:?} share {n} vertices, not one"
        )));
    }
    find(sc, pair, params)
}

/// The face pairs needing a certificate: vertex-disjoint pairs, then pairs
/// sharing one vertex, each in lexicographic order. Pairs sharing an edge are
/// exempt: once the other pairs are known to be disjoint (or to meet only at
/// the shared vertex), two faces along an edge cannot overlap.
pub fn relevant_pairs(sc: &ScaledIntegerConfig) -> Vec<(usize, usize)> {
    let [zero, one, _] = sc.triangulation.face_pairs_by_shared();
    zero.into_iter().chain(one).collect()
}

/// Certificates for every relevant pair, in [`relevant_pairs`] order. Fails
/// on the first pair (in that order) with no certificate.
pub fn certify_robust_embedding(
    sc: &ScaledIntegerConfig,
    params: &SeparationParams,
) -> Result<Vec<SeparationCertificate>> {
    check_range(sc, params.grid)?;
    relevant_pairs(sc)
        .par_iter()
        .map(|&pair| find(sc, pair, params))
        .collect()
}

/// Recompute a certificate's margin from the pair and direction alone.
pub fn replay(sc: &ScaledIntegerConfig, cert: &SeparationCertificate) -> Result<i128> {
    let grid = cert.direction.iter().map(|x| x.abs()).max().unwrap_or(0);
    check_range(sc, grid)?;
    let (kind, geom) = Geometry::of(sc, cert.pair)
        .map_err(|e| Error::CertificateMismatch(format!("pair {:?}: {e}", cert.pair)))?;
    if kind != cert.kind {
        return Err(Error::CertificateMismatch(format!(
            "pair {:?} is {kind:?}, certificate says {:?}",
            cert.pair, cert.kind
        )));
    }
    let (s0, s1) = geom.margins(&cert.direction);
    Ok(match cert.side {
        0 => s0,
        1 => s1,
        s => return Err(Error::CertificateMismatch(format!("side {s}"))),
    })
}

/// Replay and check: the margin matches bit-for-bit, the direction has
/// max-norm `params.grid`, and the margin exceeds `params.lambda`.
pub fn verify_certificate(
    sc: &ScaledIntegerConfig,
    cert: &SeparationCertificate,
    params: &SeparationParams,
) -> Result<()> {
    let grid = cert.direction.iter().map(|x| x.abs()).max().unwrap_or(0);
    if grid != params.grid {
        return Err(Error::CertificateMismatch(format!(
            "pair {:?}: direction {:?} is not on the grid cube {}",
            cert.pair, cert.direction, params.grid
        )));
    }
    let margin = replay(sc, cert)?;
    if margin != cert.margin {
        return Err(Error::CertificateMismatch(format!(
            "pair {:?}: replayed margin {margin} differs from recorded {}",
            cert.pair, cert.margin
        )));
    }
    if margin <= params.lambda {
        return Err(Error::CertificateMismatch(format!(
            "pair {:?}: margin {margin} does not exceed {}",
            cert.pair, params.lambda
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_covers_cube_surface_once() {
        let g = 3;
        let dirs: Vec<_> = grid_directions(g).collect();
        assert_eq!(dirs.len() as i64, (2 * g + 1).pow(3) - (2 * g - 1).pow(3));
        assert!(dirs.windows(2).all(|w| w[0] < w[1]));
        assert!(dirs
            .iter()
            .all(|d| d.iter().map(|x| x.abs()).max() == Some(g)));
    }

    #[test]
    fn axis_direction_on_cube_sides() {
        // faces of the unit cube at z = 0 and z = 1, scaled by 10
        let a = [[0, 0, 0], [10, 0, 0], [0, 10, 0]];
        let b = [[0, 0, 10], [10, 0, 10], [0, 10, 10]];
        assert_eq!(disjoint_margins(&a, &b, &[0, 0, 300]), (3000, -3000));
        assert_eq!(disjoint_margins(&a, &b, &[0, 0, -300]), (-3000, 3000));
    }

    #[test]
    fn in_plane_wedge() {
        // two triangles in z = 0 meeting at the origin, on opposite sides of x = 0
        let v = [0, 0, 0];
        let e0 = [[-10, 1, 0], [-10, -1, 0]];
        let e1 = [[10, 1, 0], [10, -1, 0]];
        let (s0, _) = shared_margins(&v, &e0, &e1, &[300, 0, 0]);
        assert_eq!(s0, 3000);
        // a tilted direction still works but with a smaller margin
        let (t0, _) = shared_margins(&v, &e0, &e1, &[300, 300, 0]);
        assert_eq!(t0, 2700);
    }
}
