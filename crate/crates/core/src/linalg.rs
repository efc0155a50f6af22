//! Small dense linear algebra helpers around `nalgebra`.

use nalgebra::{DMatrix, DVector};

pub fn solve(j: &DMatrix<f64>, r: &DVector<f64>) -> Option<DVector<f64>> {
    let x = j.clone().lu().solve(r)?;
    x.iter().all(|v| v.is_finite()).then_some(x)
}

pub fn det_sign(j: &DMatrix<f64>) -> i8 {
    if j.nrows() == 0 {
        return 1;
    }
    let d = j.clone().lu().determinant();
    if d > 0.0 {
        1
    } else if d < 0.0 {
        -1
    } else {
        0
    }
}

/// Condition number after row and column equilibration.
///
/// Equilibration removes the harmless part of ill-conditioning that comes from
/// mixing length scales (a tiny bead next to a large knot).
pub fn equilibrated_cond(j: &DMatrix<f64>) -> f64 {
    let (r, c) = j.shape();
    if r == 0 {
        return 1.0;
    }
    let mut m = j.clone();
    for i in 0..r {
        let s = m.row(i).amax();
        if s == 0.0 {
            return f64::INFINITY;
        }
        m.row_mut(i).scale_mut(1.0 / s);
    }
    for k in 0..c {
        let s = m.column(k).amax();
        if s == 0.0 {
            return f64::INFINITY;
        }
        m.column_mut(k).scale_mut(1.0 / s);
    }
    let sv = m.singular_values();
    let max = sv.max();
    let min = sv.min();
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Solve the 2×2 system [a b]·(x, y)ᵀ = r for column vectors a, b.
pub fn solve2(a: [f64; 2], b: [f64; 2], r: [f64; 2]) -> Option<[f64; 2]> {
    let det = a[0] * b[1] - a[1] * b[0];
    if det == 0.0 {
        return None;
    }
    Some([
        (r[0] * b[1] - r[1] * b[0]) / det,
        (a[0] * r[1] - a[1] * r[0]) / det,
    ])
}
