//! Thin helpers over `nalgebra` for rank decisions and least squares.

use nalgebra::{DMatrix, DVector};

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Default relative singular-value threshold for numerical rank.
pub const RANK_RTOL: f64 = 1e-8;

pub fn singular_values(m: &Matrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Number of singular values above `rtol * sigma_max`.
pub fn numerical_rank(m: &Matrix, rtol: f64) -> usize {
    let s = singular_values(m);
    match s.first() {
        Some(&max) if max > 0.0 && max.is_finite() => {
            s.iter().filter(|&&v| v > rtol * max).count()
        }
        _ => 0,
    }
}

/// Orthonormal basis for the column span at relative threshold `rtol`.
pub fn column_space(m: &Matrix, rtol: f64) -> (Matrix, usize) {
    let d = m.nrows();
    if m.ncols() == 0 || m.iter().all(|v| *v == 0.0) {
        return (Matrix::zeros(d, 0), 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let max = svd.singular_values[order[0]];
    let kept: Vec<usize> = order
        .into_iter()
        .filter(|&i| svd.singular_values[i] > rtol * max)
        .collect();
    let rank = kept.len();
    let basis = Matrix::from_fn(d, rank, |r, c| u[(r, kept[c])]);
    // clustered singular values leave U slightly non-orthonormal; QR restores it
    let q = basis.qr().q();
    (q.columns(0, rank).into_owned(), rank)
}

/// Minimum-norm least-squares solution of `a x = b`, singular values below
/// `rtol * sigma_max` are discarded.
///
/// Two steps of iterative refinement follow the SVD solve: with clustered
/// singular values the factors lose orthogonality at the 1e-9 level.
pub fn lstsq(a: &Matrix, b: &Vector, rtol: f64) -> Vector {
    if a.ncols() == 0 {
        return Vector::zeros(0);
    }
    let svd = a.clone().svd(true, true);
    let max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return Vector::zeros(a.ncols());
    }
    let solve = |rhs: &Vector| {
        svd.solve(rhs, rtol * max)
            .expect("both singular vector sets were computed")
    };
    let mut x = solve(b);
    for _ in 0..2 {
        let r = b - a * &x;
        x += solve(&r);
    }
    x
}

/// Ratio of the smallest to the largest singular value (0 for rank deficiency).
pub fn reciprocal_condition(m: &Matrix) -> f64 {
    let s = singular_values(m);
    match (s.first(), s.last()) {
        (Some(&max), Some(&min)) if max > 0.0 => min / max,
        _ => 0.0,
    }
}

pub fn from_columns(cols: &[Vector], dim: usize) -> Matrix {
    Matrix::from_fn(dim, cols.len(), |r, c| cols[c][r])
}

pub fn max_abs(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |acc, v| acc.max(v.abs()))
}
