//! Intrinsic development: unfold the faces into the plane along a spanning
//! tree of the dual graph, then read the deck group off the leftover dual
//! edges.

use std::collections::VecDeque;

use rug::Float;
use serde::{Deserialize, Serialize};

use super::angles::cone_angles;
use super::config::Configuration;
use crate::error::{Error, Result};
use crate::numeric::{parse_decimal, vec3, Precision};

pub type Point2 = [Float; 2];

/// Required flatness before a development is attempted.
pub const DEVELOP_MAX_DEVIATION: f64 = 1e-6;

/// Deck-group generators of the published development.
pub const PUBLISHED_LATTICE: [[&str; 2]; 2] = [
    ["2.82283653673", "1.77383128128"],
    ["-2.48640589069", "2.75537307285"],
];

/// Published planar vertex positions accompanying [`PUBLISHED_LATTICE`].
pub const PUBLISHED_DEVELOPMENT_VERTICES: [[&str; 2]; 8] = [
    ["0.33643064603", "4.52920435414"],
    ["-1.23851945019", "2.75537307285"],
    ["-1.70928291808", "3.45667231110"],
    ["0.87059028328", "3.63769212746"],
    ["-0.70435981294", "1.86386084617"],
    ["-0.64452775047", "3.68459670371"],
    ["1.34135375116", "2.93639288920"],
    ["0.27659858356", "2.70846849659"],
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TreeOrder {
    BreadthFirst,
    DepthFirst,
}

/// Rigid motion `x -> R(rotation) x + translation` obtained by walking
/// across one non-tree dual edge.
#[derive(Clone, Debug, PartialEq)]
pub struct DeckElement {
    /// Faces joined by the dual edge.
    pub faces: (usize, usize),
    pub rotation: Float,
    pub translation: Point2,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Development {
    pub base_face: usize,
    /// Planar position of each face's vertices, in the face's own order.
    pub face_positions: Vec<[Point2; 3]>,
    /// First planar position reached for each vertex.
    pub vertex_lifts: Vec<Point2>,
    /// Reduced lattice basis with positive determinant.
    pub lattice: [Point2; 2],
    /// Rotation angle carried by each lattice generator.
    pub rotational_holonomy: [Float; 2],
    pub deck: Vec<DeckElement>,
    /// Dual spanning tree: parent face of each face (`None` at the base).
    pub tree_parent: Vec<Option<usize>>,
}

impl Development {
    /// `[|l1|^2, |l1.l2|, |l2|^2]`.
    pub fn gram(&self) -> [Float; 3] {
        gram(&self.lattice)
    }

    pub fn covolume(&self) -> Float {
        det2(&self.lattice[0], &self.lattice[1])
    }

    /// Largest rotation over every deck element, not just the generators.
    pub fn max_rotation(&self) -> Float {
        let prec = self.lattice[0][0].prec();
        self.deck
            .iter()
            .map(|d| Float::with_val(prec, d.rotation.abs_ref()))
            .fold(Float::new(prec), |a, b| if b > a { b } else { a })
    }

    /// Largest mismatch between a planar edge length and the 3D length.
    pub fn max_edge_length_error(&self, c: &Configuration) -> Float {
        let prec = c.precision().bits();
        let mut worst = Float::new(prec);
        for (f, pos) in c.triangulation().faces().iter().zip(&self.face_positions) {
            for r in 0..3 {
                let s = (r + 1) % 3;
                let planar = dist2(&pos[r], &pos[s]);
                let spatial = dist3(c, f[r], f[s]);
                let err = Float::with_val(prec, planar - spatial).abs();
                if err > worst {
                    worst = err;
                }
            }
        }
        worst
    }

    pub fn to_f64(&self) -> Vec<[[f64; 2]; 3]> {
        self.face_positions
            .iter()
            .map(|t| t.clone().map(|p| [p[0].to_f64(), p[1].to_f64()]))
            .collect()
    }

    pub fn lattice_f64(&self) -> [[f64; 2]; 2] {
        self.lattice.clone().map(|p| [p[0].to_f64(), p[1].to_f64()])
    }
}

pub fn develop(c: &Configuration, base: usize) -> Result<Development> {
    develop_with(c, base, TreeOrder::BreadthFirst)
}

pub fn develop_with(c: &Configuration, base: usize, order: TreeOrder) -> Result<Development> {
    let t = c.triangulation();
    let nf = t.faces().len();
    if base >= nf {
        return Err(Error::InvalidConfiguration(format!(
            "base face {base} out of range"
        )));
    }
    let flat = cone_angles(c)?;
    if flat.max_deviation > DEVELOP_MAX_DEVIATION {
        return Err(Error::NotFlatEnough {
            max_deviation: flat.max_deviation.to_f64(),
            required: DEVELOP_MAX_DEVIATION,
        });
    }
    let prec = c.precision().bits();
    let zero = || Float::new(prec);

    let f0 = t.faces()[base];
    let d01 = dist3(c, f0[0], f0[1]);
    let p0 = [zero(), zero()];
    let p1 = [d01, zero()];
    let p2 = place_left(c, (f0[0], &p0), (f0[1], &p1), f0[2]);

    let mut placed: Vec<Option<[Point2; 3]>> = vec![None; nf];
    placed[base] = Some([p0, p1, p2]);
    let mut parent = vec![None; nf];
    let mut tree_edge = vec![vec![false; nf]; nf];
    let mut frontier = VecDeque::from([base]);
    while let Some(fi) = match order {
        TreeOrder::BreadthFirst => frontier.pop_front(),
        TreeOrder::DepthFirst => frontier.pop_back(),
    } {
        for (gi, pos) in neighbours(c, fi, placed[fi].as_ref().expect("placed")) {
            if placed[gi].is_none() {
                placed[gi] = Some(pos);
                parent[gi] = Some(fi);
                tree_edge[fi][gi] = true;
                tree_edge[gi][fi] = true;
                frontier.push_back(gi);
            }
        }
    }
    let face_positions: Vec<[Point2; 3]> = placed
        .into_iter()
        .map(|p| p.ok_or_else(|| Error::InvalidTriangulation("dual graph is disconnected".into())))
        .collect::<Result<_>>()?;

    let mut deck = Vec::new();
    for fi in 0..nf {
        for (gi, across) in neighbours(c, fi, &face_positions[fi]) {
            if fi < gi && !tree_edge[fi][gi] {
                deck.push(rigid_motion(&face_positions[gi], &across, (fi, gi)));
            }
        }
    }

    let mut vertex_lifts: Vec<Option<Point2>> = vec![None; t.vertex_count()];
    for fi in bfs_order(&parent, base) {
        for (r, &v) in t.faces()[fi].iter().enumerate() {
            if vertex_lifts[v].is_none() {
                vertex_lifts[v] = Some(face_positions[fi][r].clone());
            }
        }
    }

    let generators: Vec<(Point2, Float)> = deck
        .iter()
        .map(|d| (d.translation.clone(), d.rotation.clone()))
        .collect();
    let (lattice, rotational_holonomy) = lattice_basis(generators, c.precision())?;

    Ok(Development {
        base_face: base,
        face_positions,
        vertex_lifts: vertex_lifts
            .into_iter()
            .map(|p| p.expect("every vertex lies on a face"))
            .collect(),
        lattice,
        rotational_holonomy,
        deck,
        tree_parent: parent,
    })
}

/// Faces adjacent to `fi`, each with the placement obtained by unfolding
/// across the shared edge.
fn neighbours(c: &Configuration, fi: usize, pos: &[Point2; 3]) -> Vec<(usize, [Point2; 3])> {
    let t = c.triangulation();
    let f = t.faces()[fi];
    let mut out = Vec::with_capacity(3);
    for r in 0..3 {
        let (a, b) = (f[r], f[(r + 1) % 3]);
        let gi = *t
            .faces_on_edge(a, b)
            .iter()
            .find(|&&g| g != fi)
            .expect("closed surface");
        let g = t.faces()[gi];
        // g traverses the edge as b -> a
        let s = (0..3)
            .find(|&s| g[s] == b && g[(s + 1) % 3] == a)
            .expect("oriented");
        let w = g[(s + 2) % 3];
        let pa = &pos[r];
        let pb = &pos[(r + 1) % 3];
        let pw = place_left(c, (b, pb), (a, pa), w);
        let mut gp: [Point2; 3] = [pa.clone(), pa.clone(), pa.clone()];
        gp[s] = pb.clone();
        gp[(s + 1) % 3] = pa.clone();
        gp[(s + 2) % 3] = pw;
        out.push((gi, gp));
    }
    out
}

/// Position of `w` to the left of the directed segment `x -> y`, at its 3D
/// distances from `x` and `y`.
fn place_left(c: &Configuration, x: (usize, &Point2), y: (usize, &Point2), w: usize) -> Point2 {
    let prec = c.precision().bits();
    let (xi, px) = x;
    let (yi, py) = y;
    let d = dist3(c, xi, yi);
    let dxw2 = dist3_sq(c, xi, w);
    let dyw2 = dist3_sq(c, yi, w);
    let d2 = Float::with_val(prec, d.square_ref());
    let a = Float::with_val(prec, &dxw2 - &dyw2) + &d2;
    let a = a / Float::with_val(prec, &d * 2u32);
    let mut h2 = dxw2 - Float::with_val(prec, a.square_ref());
    if h2 < 0 {
        h2 = Float::new(prec);
    }
    let h = h2.sqrt();
    let planar = dist2(px, py);
    let e = [
        Float::with_val(prec, &py[0] - &px[0]) / &planar,
        Float::with_val(prec, &py[1] - &px[1]) / &planar,
    ];
    [
        Float::with_val(prec, &px[0] + Float::with_val(prec, &a * &e[0]))
            - Float::with_val(prec, &h * &e[1]),
        Float::with_val(prec, &px[1] + Float::with_val(prec, &a * &e[1]))
            + Float::with_val(prec, &h * &e[0]),
    ]
}

/// Motion taking placement `from` of a face onto placement `to`.
fn rigid_motion(from: &[Point2; 3], to: &[Point2; 3], faces: (usize, usize)) -> DeckElement {
    let prec = from[0][0].prec();
    let a = sub2(&from[1], &from[0]);
    let b = sub2(&to[1], &to[0]);
    let rotation = Float::with_val(prec, det2(&a, &b)).atan2(&dot2(&a, &b));
    let (s, c) = Float::with_val(prec, &rotation).sin_cos(Float::new(prec));
    let rx = Float::with_val(prec, &c * &from[0][0]) - Float::with_val(prec, &s * &from[0][1]);
    let ry = Float::with_val(prec, &s * &from[0][0]) + Float::with_val(prec, &c * &from[0][1]);
    DeckElement {
        faces,
        rotation,
        translation: [
            Float::with_val(prec, &to[0][0] - &rx),
            Float::with_val(prec, &to[0][1] - &ry),
        ],
    }
}

fn bfs_order(parent: &[Option<usize>], base: usize) -> Vec<usize> {
    let mut order = vec![base];
    let mut i = 0;
    while i < order.len() {
        let f = order[i];
        for (g, p) in parent.iter().enumerate() {
            if *p == Some(f) {
                order.push(g);
            }
        }
        i += 1;
    }
    order
}

/// Reduced basis of the lattice generated by the translation parts, with
/// each basis vector's rotation angle carried along through the integer
/// combinations.
pub fn lattice_basis(
    generators: Vec<(Point2, Float)>,
    precision: Precision,
) -> Result<([Point2; 2], [Float; 2])> {
    let prec = precision.bits();
    // contractible loops give translations of size ~ flatness
    let mut gens: Vec<(Point2, Float)> = generators
        .into_iter()
        .filter(|(v, _)| norm2(v) > 1e-3)
        .collect();
    loop {
        let mut best: Option<(usize, usize, Float)> = None;
        for i in 0..gens.len() {
            for j in (i + 1)..gens.len() {
                let d = det2(&gens[i].0, &gens[j].0).abs();
                if d > 1e-6 && best.as_ref().is_none_or(|b| d < b.2) {
                    best = Some((i, j, d));
                }
            }
        }
        let (i, j, _) = best.ok_or_else(|| {
            Error::InternalInconsistency("deck translations do not span the plane".into())
        })?;
        let det = det2(&gens[i].0, &gens[j].0);
        let mut fractional = None;
        for (k, g) in gens.iter().enumerate() {
            if k == i || k == j {
                continue;
            }
            let alpha = Float::with_val(prec, det2(&g.0, &gens[j].0) / &det);
            let beta = Float::with_val(prec, det2(&gens[i].0, &g.0) / &det);
            let ra = Float::with_val(prec, alpha.round_ref());
            let rb = Float::with_val(prec, beta.round_ref());
            let off = Float::with_val(prec, &alpha - &ra).abs() > 1e-6
                || Float::with_val(prec, &beta - &rb).abs() > 1e-6;
            if off {
                let r = combine(g, &[(&gens[i], &ra), (&gens[j], &rb)], prec);
                fractional = Some(r);
                break;
            }
        }
        match fractional {
            Some(r) => gens.push(r),
            None => {
                let (b1, b2) = gauss_reduce(gens[i].clone(), gens[j].clone(), prec);
                return Ok(([b1.0, b2.0], [b1.1, b2.1]));
            }
        }
    }
}

/// `g - sum(m * h)` on translation and rotation parts.
fn combine(
    g: &(Point2, Float),
    terms: &[(&(Point2, Float), &Float)],
    prec: u32,
) -> (Point2, Float) {
    let mut v = g.0.clone();
    let mut a = g.1.clone();
    for (h, m) in terms {
        for k in 0..2 {
            v[k] -= Float::with_val(prec, &h.0[k] * *m);
        }
        a -= Float::with_val(prec, &h.1 * *m);
    }
    (v, a)
}

fn gauss_reduce(
    mut b1: (Point2, Float),
    mut b2: (Point2, Float),
    prec: u32,
) -> ((Point2, Float), (Point2, Float)) {
    loop {
        if norm2_sq(&b2.0) < norm2_sq(&b1.0) {
            std::mem::swap(&mut b1, &mut b2);
        }
        let mu = Float::with_val(prec, dot2(&b1.0, &b2.0) / norm2_sq(&b1.0));
        let m = Float::with_val(prec, mu.round_ref());
        if m.is_zero() {
            break;
        }
        b2 = combine(&b2, &[(&b1, &m)], prec);
    }
    if det2(&b1.0, &b2.0) < 0 {
        b2 = ([-b2.0[0].clone(), -b2.0[1].clone()], -b2.1);
    }
    (b1, b2)
}

/// `[|b1|^2, |b1.b2|, |b2|^2]` of the Gauss-reduced basis.
pub fn reduced_gram(basis: &[Point2; 2]) -> [Float; 3] {
    let prec = basis[0][0].prec();
    let zero = Float::new(prec);
    let (b1, b2) = gauss_reduce(
        (basis[0].clone(), zero.clone()),
        (basis[1].clone(), zero),
        prec,
    );
    gram(&[b1.0, b2.0])
}

fn gram(b: &[Point2; 2]) -> [Float; 3] {
    [norm2_sq(&b[0]), dot2(&b[0], &b[1]).abs(), norm2_sq(&b[1])]
}

pub fn published_lattice(precision: Precision) -> [Point2; 2] {
    PUBLISHED_LATTICE.map(|row| row.map(|s| parse_decimal(s, precision).expect("constant decimal")))
}

pub fn published_development_vertices(precision: Precision) -> Vec<Point2> {
    PUBLISHED_DEVELOPMENT_VERTICES
        .iter()
        .map(|row| row.map(|s| parse_decimal(s, precision).expect("constant decimal")))
        .collect()
}

fn dist3_sq(c: &Configuration, a: usize, b: usize) -> Float {
    vec3::norm_sq(&vec3::sub(c.point(a), c.point(b)))
}

fn dist3(c: &Configuration, a: usize, b: usize) -> Float {
    dist3_sq(c, a, b).sqrt()
}

fn sub2(a: &Point2, b: &Point2) -> Point2 {
    let prec = a[0].prec();
    [
        Float::with_val(prec, &a[0] - &b[0]),
        Float::with_val(prec, &a[1] - &b[1]),
    ]
}

fn dot2(a: &Point2, b: &Point2) -> Float {
    let prec = a[0].prec();
    Float::with_val(prec, &a[0] * &b[0]) + Float::with_val(prec, &a[1] * &b[1])
}

fn det2(a: &Point2, b: &Point2) -> Float {
    let prec = a[0].prec();
    Float::with_val(prec, &a[0] * &b[1]) - Float::with_val(prec, &a[1] * &b[0])
}

fn norm2_sq(a: &Point2) -> Float {
    dot2(a, a)
}

fn norm2(a: &Point2) -> Float {
    norm2_sq(a).sqrt()
}

fn dist2(a: &Point2, b: &Point2) -> Float {
    norm2(&sub2(a, b))
}
