//! 3x3 matrices of arbitrary-precision floats.

use rug::float::Constant;
use rug::Float;

use crate::numeric::{format_decimal, parse_decimal, Precision};

pub type Mat3 = [[Float; 3]; 3];

pub fn zeros(precision: Precision) -> Mat3 {
    std::array::from_fn(|_| std::array::from_fn(|_| precision.zero()))
}

pub fn identity(precision: Precision) -> Mat3 {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| precision.float(if i == j { 1.0 } else { 0.0 }))
    })
}

pub fn from_strs(rows: [[&str; 3]; 3], precision: Precision) -> Mat3 {
    rows.map(|r| r.map(|s| parse_decimal(s, precision).expect("constant decimal")))
}

pub fn to_f64(m: &Mat3) -> [[f64; 3]; 3] {
    std::array::from_fn(|i| std::array::from_fn(|j| m[i][j].to_f64()))
}

pub fn format(m: &Mat3, digits: u32) -> [[String; 3]; 3] {
    std::array::from_fn(|i| std::array::from_fn(|j| format_decimal(&m[i][j], digits)))
}

fn prec(m: &Mat3) -> u32 {
    m[0][0].prec()
}

pub fn mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let p = prec(a);
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            (0..3).fold(Float::new(p), |acc, k| {
                acc + Float::with_val(p, &a[i][k] * &b[k][j])
            })
        })
    })
}

pub fn mul_vec(a: &Mat3, v: &[Float; 3]) -> [Float; 3] {
    let p = prec(a);
    std::array::from_fn(|i| {
        (0..3).fold(Float::new(p), |acc, k| {
            acc + Float::with_val(p, &a[i][k] * &v[k])
        })
    })
}

pub fn sub(a: &Mat3, b: &Mat3) -> Mat3 {
    let p = prec(a);
    std::array::from_fn(|i| std::array::from_fn(|j| Float::with_val(p, &a[i][j] - &b[i][j])))
}

pub fn transpose(a: &Mat3) -> Mat3 {
    std::array::from_fn(|i| std::array::from_fn(|j| a[j][i].clone()))
}

pub fn det(a: &Mat3) -> Float {
    let p = prec(a);
    let minor = |r0: usize, r1: usize, c0: usize, c1: usize| {
        Float::with_val(p, &a[r0][c0] * &a[r1][c1]) - Float::with_val(p, &a[r0][c1] * &a[r1][c0])
    };
    Float::with_val(p, &a[0][0] * minor(1, 2, 1, 2))
        - Float::with_val(p, &a[0][1] * minor(1, 2, 0, 2))
        + Float::with_val(p, &a[0][2] * minor(1, 2, 0, 1))
}

/// Inverse by the adjugate; `None` when `|det| <= tol`.
pub fn inverse(a: &Mat3, tol: &Float) -> Option<(Mat3, Float)> {
    let p = prec(a);
    let d = det(a);
    if Float::with_val(p, d.abs_ref()) <= *tol {
        return None;
    }
    let cof = |i: usize, j: usize| {
        let r: Vec<usize> = (0..3).filter(|&k| k != i).collect();
        let c: Vec<usize> = (0..3).filter(|&k| k != j).collect();
        let m = Float::with_val(p, &a[r[0]][c[0]] * &a[r[1]][c[1]])
            - Float::with_val(p, &a[r[0]][c[1]] * &a[r[1]][c[0]]);
        if (i + j) % 2 == 0 {
            m
        } else {
            -m
        }
    };
    // inverse[i][j] = cofactor[j][i] / det
    let inv = std::array::from_fn(|i| std::array::from_fn(|j| cof(j, i) / &d));
    Some((inv, d))
}

/// Largest absolute entry.
pub fn max_abs_entry(a: &Mat3) -> Float {
    let p = prec(a);
    a.iter()
        .flatten()
        .map(|x| Float::with_val(p, x.abs_ref()))
        .fold(Float::new(p), |m, x| if x > m { x } else { m })
}

/// Maximum absolute row sum (the operator infinity norm).
pub fn row_sum_norm(a: &Mat3) -> Float {
    let p = prec(a);
    a.iter()
        .map(|r| {
            r.iter()
                .fold(Float::new(p), |s, x| s + Float::with_val(p, x.abs_ref()))
        })
        .fold(Float::new(p), |m, x| if x > m { x } else { m })
}

/// Eigenvalues of a symmetric matrix, ascending (trigonometric closed form).
pub fn symmetric_eigenvalues(a: &Mat3) -> [Float; 3] {
    let p = prec(a);
    let sq = |x: &Float| Float::with_val(p, x.square_ref());
    let p1 = sq(&a[0][1]) + sq(&a[0][2]) + sq(&a[1][2]);
    let q = Float::with_val(p, &a[0][0] + &a[1][1]) + &a[2][2];
    let q = q / 3u32;
    if p1.is_zero() {
        let mut d = [a[0][0].clone(), a[1][1].clone(), a[2][2].clone()];
        d.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
        return d;
    }
    let p2 = (0..3).fold(Float::new(p), |s, i| {
        s + sq(&Float::with_val(p, &a[i][i] - &q))
    }) + p1 * 2u32;
    let r6 = Float::with_val(p, &p2 / 6u32).sqrt();
    let b: Mat3 = std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let x = if i == j {
                Float::with_val(p, &a[i][j] - &q)
            } else {
                a[i][j].clone()
            };
            x / &r6
        })
    });
    let mut r = det(&b) / 2u32;
    if r < -1 {
        r = Float::with_val(p, -1);
    } else if r > 1 {
        r = Float::with_val(p, 1);
    }
    let phi = r.acos() / 3u32;
    let third = Float::with_val(p, Constant::Pi) * 2u32 / 3u32;
    let two_r6 = Float::with_val(p, &r6 * 2u32);
    let e_max = Float::with_val(
        p,
        &q + Float::with_val(p, &two_r6 * Float::with_val(p, phi.cos_ref())),
    );
    let e_min = Float::with_val(
        p,
        &q + Float::with_val(p, &two_r6 * Float::with_val(p, &phi + &third).cos()),
    );
    let e_mid = Float::with_val(p, &q * 3u32) - &e_max - &e_min;
    [e_min, e_mid, e_max]
}
