use crate::error::{Error, Result};
use crate::linalg::Vector;

/// A symmetric tensor `P ∈ S²V* ⊗ V`; `get(i, j, k)` is the `e_k` component
/// of `P(e_i, e_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymTensor {
    dim: usize,
    coeffs: Vec<f64>,
}

impl SymTensor {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            coeffs: vec![0.0; dim * dim * dim],
        }
    }

    /// Symmetrizes `f(i, j, k)` in `(i, j)`.
    pub fn from_fn(dim: usize, f: impl Fn(usize, usize, usize) -> f64) -> Self {
        let mut t = Self::zero(dim);
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    t.coeffs[(i * dim + j) * dim + k] = 0.5 * (f(i, j, k) + f(j, i, k));
                }
            }
        }
        t
    }

    /// Symmetrizes a flat `[i][j][k]` array; also returns the largest
    /// asymmetry `|c[i][j][k] − c[j][i][k]|` seen on ingest.
    pub fn from_raw(dim: usize, coeffs: &[f64]) -> Result<(Self, f64)> {
        if coeffs.len() != dim * dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim * dim,
                got: coeffs.len(),
            });
        }
        let at = |i: usize, j: usize, k: usize| coeffs[(i * dim + j) * dim + k];
        let mut asym: f64 = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    asym = asym.max((at(i, j, k) - at(j, i, k)).abs());
                }
            }
        }
        Ok((Self::from_fn(dim, at), asym))
    }

    pub fn from_nested(nested: &[Vec<Vec<f64>>]) -> Result<(Self, f64)> {
        let dim = nested.len();
        let mut flat = Vec::with_capacity(dim * dim * dim);
        for row in nested {
            if row.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: row.len() });
            }
            for col in row {
                if col.len() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, got: col.len() });
                }
                flat.extend_from_slice(col);
            }
        }
        Self::from_raw(dim, &flat)
    }

    pub fn to_nested(&self) -> Vec<Vec<Vec<f64>>> {
        let d = self.dim;
        (0..d)
            .map(|i| (0..d).map(|j| (0..d).map(|k| self.get(i, j, k)).collect()).collect())
            .collect()
    }

    /// `P[i][i][i] = 1`, all other slots zero.
    pub fn componentwise_cube(dim: usize) -> Self {
        Self::from_fn(dim, |i, j, k| if i == j && j == k { 1.0 } else { 0.0 })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.coeffs[(i * self.dim + j) * self.dim + k]
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `P(X, Y)`.
    pub fn eval(&self, x: &Vector, y: &Vector) -> Vector {
        let d = self.dim;
        let mut out = Vector::zeros(d);
        for i in 0..d {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..d {
                let w = x[i] * y[j];
                if w == 0.0 {
                    continue;
                }
                let base = (i * d + j) * d;
                for k in 0..d {
                    out[k] += w * self.coeffs[base + k];
                }
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .fold(0.0, |acc, (a, b)| acc.max((a - b).abs()))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        Ok(Self {
            dim: self.dim,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn scale(&self, k: f64) -> Self {
        Self {
            dim: self.dim,
            coeffs: self.coeffs.iter().map(|a| a * k).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ingest_symmetrizes_and_reports_asymmetry() {
        let mut raw = vec![0.0; 8];
        raw[2] = 1.0; // P[0][1][0]
        let (t, asym) = SymTensor::from_raw(2, &raw).unwrap();
        assert_eq!(asym, 1.0);
        assert_eq!(t.get(0, 1, 0), 0.5);
        assert_eq!(t.get(1, 0, 0), 0.5);
        assert!(SymTensor::from_raw(2, &raw[..7]).is_err());
    }

    #[test]
    fn nested_roundtrip() {
        let t = SymTensor::from_fn(3, |i, j, k| (i + 2 * j + 3 * k) as f64);
        let (back, asym) = SymTensor::from_nested(&t.to_nested()).unwrap();
        assert_eq!(asym, 0.0);
        assert_eq!(back, t);
    }

    #[test]
    fn eval_is_bilinear_sum() {
        let t = SymTensor::componentwise_cube(3);
        let x = Vector::from_vec(vec![1.0, 2.0, 3.0]);
        assert_eq!(t.eval(&x, &x).as_slice(), &[1.0, 4.0, 9.0]);
    }
}
