use std::ops::{Add, Sub};

use crate::error::{Error, Result};
use crate::linalg::Vector;

use super::Quaternion;

/// An element of `H^n`, equivalently a real vector of length `4n`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuatVector(pub Vec<Quaternion>);

/// A row `Z ∈ (H^n)^*` acting by `Z(X) = Σ_m Z_m X_m`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuatCovector(pub Vec<Quaternion>);

fn slots_from_real(v: &[f64]) -> Result<Vec<Quaternion>> {
    if !v.len().is_multiple_of(4) {
        return Err(Error::InvalidArgument(format!(
            "real length {} is not a multiple of 4",
            v.len()
        )));
    }
    Ok(v
        .chunks_exact(4)
        .map(|c| Quaternion::new(c[0], c[1], c[2], c[3]))
        .collect())
}

fn slots_to_real(slots: &[Quaternion]) -> Vector {
    Vector::from_iterator(slots.len() * 4, slots.iter().flat_map(|q| q.to_array()))
}

impl QuatVector {
    pub fn zeros(n: usize) -> Self {
        Self(vec![Quaternion::ZERO; n])
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn from_real(v: &[f64]) -> Result<Self> {
        slots_from_real(v).map(Self)
    }

    pub fn to_real(&self) -> Vector {
        slots_to_real(&self.0)
    }

    /// Right scalar action `X·q`.
    pub fn mul_right(&self, q: Quaternion) -> Self {
        Self(self.0.iter().map(|&x| x * q).collect())
    }

    pub fn norm_sq(&self) -> f64 {
        self.0.iter().map(|q| q.norm_sq()).sum()
    }

    /// Quaternionic conjugate transpose `X^*`, the covector with
    /// `X^*(X) = |X|^2`.
    pub fn conj_transpose(&self) -> QuatCovector {
        QuatCovector(self.0.iter().map(|q| q.conj()).collect())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .fold(0.0, |acc, (a, b)| acc.max(a.max_abs_diff(*b)))
    }
}

impl Add for &QuatVector {
    type Output = QuatVector;
    fn add(self, rhs: Self) -> QuatVector {
        QuatVector(self.0.iter().zip(&rhs.0).map(|(a, b)| *a + *b).collect())
    }
}

impl Sub for &QuatVector {
    type Output = QuatVector;
    fn sub(self, rhs: Self) -> QuatVector {
        QuatVector(self.0.iter().zip(&rhs.0).map(|(a, b)| *a - *b).collect())
    }
}

impl QuatCovector {
    pub fn zeros(n: usize) -> Self {
        Self(vec![Quaternion::ZERO; n])
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn from_real(v: &[f64]) -> Result<Self> {
        slots_from_real(v).map(Self)
    }

    pub fn to_real(&self) -> Vector {
        slots_to_real(&self.0)
    }

    /// Left scalar action `q·Z`.
    pub fn mul_left(&self, q: Quaternion) -> Self {
        Self(self.0.iter().map(|&z| q * z).collect())
    }

    pub fn scale(&self, k: f64) -> Self {
        Self(self.0.iter().map(|z| z.scale(k)).collect())
    }

    pub fn eval(&self, x: &QuatVector) -> Result<Quaternion> {
        if self.n() != x.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: x.n(),
            });
        }
        Ok(self
            .0
            .iter()
            .zip(&x.0)
            .fold(Quaternion::ZERO, |acc, (&z, &v)| acc + z * v))
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|q| *q == Quaternion::ZERO)
    }
}
