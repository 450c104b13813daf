//! Sparse exterior algebra over `R^d` and the coefficient extraction built
//! on it.
//!
//! A [`Multivector`] of degree `p` stores coefficients keyed by strictly
//! increasing index tuples. The [`Variance`] flag distinguishes the vector
//! basis `e_I` from the dual form basis `e^I`; pairing is only defined between
//! opposite variances.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{from_columns, singular_values, Matrix, Vector};
use crate::planar::SymTensor;

/// Relative threshold on the smallest frame singular value for a vector to
/// count as generic.
pub const GENERIC_RTOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variance {
    Vector,
    Form,
}

impl Variance {
    pub fn dual(self) -> Self {
        match self {
            Variance::Vector => Variance::Form,
            Variance::Form => Variance::Vector,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Multivector {
    dim: usize,
    degree: usize,
    variance: Variance,
    terms: BTreeMap<Vec<usize>, f64>,
}

/// Sorts `indices` in place and returns the permutation sign, or `None` if
/// an index repeats.
fn sort_with_sign(indices: &mut [usize]) -> Option<f64> {
    let mut sign = 1.0;
    // insertion sort; tuples are short
    for i in 1..indices.len() {
        let mut j = i;
        while j > 0 && indices[j - 1] > indices[j] {
            indices.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if indices.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(sign)
    }
}

impl Multivector {
    pub fn zero(dim: usize, degree: usize, variance: Variance) -> Self {
        Self {
            dim,
            degree,
            variance,
            terms: BTreeMap::new(),
        }
    }

    /// Builds a multivector from arbitrary index tuples, reordering with the
    /// alternating sign and dropping tuples with repeated indices.
    pub fn from_terms(
        dim: usize,
        degree: usize,
        variance: Variance,
        terms: impl IntoIterator<Item = (Vec<usize>, f64)>,
    ) -> Result<Self> {
        let mut mv = Self::zero(dim, degree, variance);
        for (mut idx, coeff) in terms {
            if idx.len() != degree {
                return Err(Error::DegreeMismatch {
                    left: degree,
                    right: idx.len(),
                });
            }
            if let Some(&bad) = idx.iter().find(|&&i| i >= dim) {
                return Err(Error::InvalidArgument(format!(
                    "index {bad} out of range for dimension {dim}"
                )));
            }
            if let Some(sign) = sort_with_sign(&mut idx) {
                *mv.terms.entry(idx).or_insert(0.0) += sign * coeff;
            }
        }
        mv.prune();
        Ok(mv)
    }

    /// A single basis element `e_I` / `e^I` (0-based indices, any order).
    pub fn basis(dim: usize, indices: &[usize], variance: Variance) -> Result<Self> {
        Self::from_terms(dim, indices.len(), variance, [(indices.to_vec(), 1.0)])
    }

    pub fn from_vector(v: &Vector, variance: Variance) -> Self {
        let mut mv = Self::zero(v.len(), 1, variance);
        for (i, &c) in v.iter().enumerate() {
            if c != 0.0 {
                mv.terms.insert(vec![i], c);
            }
        }
        mv
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn variance(&self) -> Variance {
        self.variance
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[usize], f64)> {
        self.terms.iter().map(|(k, v)| (k.as_slice(), *v))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, indices: &[usize]) -> f64 {
        self.terms.get(indices).copied().unwrap_or(0.0)
    }

    pub fn norm_sq(&self) -> f64 {
        self.terms.values().map(|a| a * a).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().fold(0.0, |acc, a| acc.max(a.abs()))
    }

    fn prune(&mut self) {
        self.terms.retain(|_, v| *v != 0.0);
    }

    pub fn scale(&self, k: f64) -> Self {
        let mut out = self.clone();
        out.terms.values_mut().for_each(|v| *v *= k);
        out.prune();
        out
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        if self.variance != other.variance {
            return Err(Error::VarianceMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch {
                left: self.degree,
                right: other.degree,
            });
        }
        let mut out = self.clone();
        for (k, v) in &other.terms {
            *out.terms.entry(k.clone()).or_insert(0.0) += v;
        }
        out.prune();
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    /// Exterior product with shuffle signs.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let degree = self.degree + other.degree;
        if degree > self.dim {
            return Err(Error::DegreeOverflow {
                p: self.degree,
                q: other.degree,
                dim: self.dim,
            });
        }
        let mut out = Self::zero(self.dim, degree, self.variance);
        for (left, a) in &self.terms {
            for (right, b) in &other.terms {
                if let Some((merged, sign)) = shuffle(left, right) {
                    *out.terms.entry(merged).or_insert(0.0) += sign * a * b;
                }
            }
        }
        out.prune();
        Ok(out)
    }
}

/// Merges two sorted tuples; the sign counts pairs `(i, j)` with `i > j`.
fn shuffle(left: &[usize], right: &[usize]) -> Option<(Vec<usize>, f64)> {
    let mut merged = Vec::with_capacity(left.len() + right.len());
    let (mut i, mut j) = (0, 0);
    let mut inversions = 0usize;
    while i < left.len() && j < right.len() {
        match left[i].cmp(&right[j]) {
            std::cmp::Ordering::Less => {
                merged.push(left[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                // right[j] jumps over the remaining left entries
                inversions += left.len() - i;
                merged.push(right[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => return None,
        }
    }
    merged.extend_from_slice(&left[i..]);
    merged.extend_from_slice(&right[j..]);
    let sign = if inversions.is_multiple_of(2) { 1.0 } else { -1.0 };
    Some((merged, sign))
}

/// Wedge of 1-vectors `v_0 ∧ v_1 ∧ … ∧ v_{p-1}`.
pub fn wedge_vectors(vectors: &[Vector], dim: usize, variance: Variance) -> Result<Multivector> {
    let mut acc = Multivector::from_terms(dim, 0, variance, [(Vec::new(), 1.0)])?;
    for v in vectors {
        if v.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: v.len(),
            });
        }
        acc = acc.wedge(&Multivector::from_vector(v, variance))?;
    }
    Ok(acc)
}

/// `⟨form, mv⟩ = Σ_I a_I b_I` over matching tuples.
pub fn pair(form: &Multivector, mv: &Multivector) -> Result<f64> {
    if form.variance != Variance::Form || mv.variance != Variance::Vector {
        return Err(Error::VarianceMismatch);
    }
    if form.dim != mv.dim {
        return Err(Error::DimensionMismatch {
            expected: form.dim,
            got: mv.dim,
        });
    }
    if form.degree != mv.degree {
        return Err(Error::DegreeMismatch {
            left: form.degree,
            right: mv.degree,
        });
    }
    let (small, large) = if form.terms.len() <= mv.terms.len() {
        (form, mv)
    } else {
        (mv, form)
    };
    Ok(small
        .terms
        .iter()
        .filter_map(|(k, a)| large.terms.get(k).map(|b| a * b))
        .sum())
}

/// The normalization `Σ a_I e_I ↦ Σ a_I / (Σ_J a_J²) e^I`; the result pairs
/// to 1 against its input. The denominator uses the standard chart basis.
pub fn chi(mv: &Multivector) -> Result<Multivector> {
    if mv.variance != Variance::Vector {
        return Err(Error::VarianceMismatch);
    }
    let norm_sq = mv.norm_sq();
    if norm_sq == 0.0 {
        return Err(Error::Degenerate("chi of the zero multivector".into()));
    }
    let mut out = mv.scale(1.0 / norm_sq);
    out.variance = Variance::Form;
    Ok(out)
}

/// The frame `[F_0(X) … F_{ℓ-1}(X)]` as columns.
pub fn frame(x: &Vector, affinors: &[Matrix]) -> Vec<Vector> {
    affinors.iter().map(|f| f * x).collect()
}

/// Smallest singular value of the frame relative to `‖X‖`; zero when the
/// frame cannot have full column rank.
pub fn frame_sigma_min(x: &Vector, affinors: &[Matrix]) -> f64 {
    let cols = frame(x, affinors);
    if cols.len() > x.len() {
        return 0.0;
    }
    let s = singular_values(&from_columns(&cols, x.len()));
    s.last().copied().unwrap_or(0.0)
}

pub fn is_generic(x: &Vector, affinors: &[Matrix]) -> bool {
    let norm = x.norm();
    norm > 0.0 && frame_sigma_min(x, affinors) > GENERIC_RTOL * norm
}

fn check_generic(x: &Vector, affinors: &[Matrix]) -> Result<Vec<Vector>> {
    if affinors.is_empty() {
        return Err(Error::InvalidArgument("empty affinor list".into()));
    }
    for f in affinors {
        if f.nrows() != x.len() || f.ncols() != x.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                got: f.nrows(),
            });
        }
    }
    let sigma_min = frame_sigma_min(x, affinors);
    if !(x.norm() > 0.0 && sigma_min > GENERIC_RTOL * x.norm()) {
        return Err(Error::NotGeneric { sigma_min });
    }
    Ok(frame(x, affinors))
}

/// `τ(X) = χ(X ∧ F_1(X) ∧ … ∧ F_{ℓ-1}(X))`, assuming `F_0 = E`.
pub fn tau(x: &Vector, affinors: &[Matrix]) -> Result<Multivector> {
    let cols = check_generic(x, affinors)?;
    chi(&wedge_vectors(&cols, x.len(), Variance::Vector)?)
}

/// Pointwise coefficients of `P(X,X) = Σ α_i(X) F_i(X)` from the wedge
/// formulas, together with the relative reconstruction residual
/// `‖P(X,X) − Σ α_i F_i(X)‖ / (1 + ‖P(X,X)‖)`. No acceptance decision is made.
pub fn extract_alphas_with_residual(
    p: &SymTensor,
    affinors: &[Matrix],
    x: &Vector,
) -> Result<(Vec<f64>, f64)> {
    if p.dim() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: x.len(),
        });
    }
    let cols = check_generic(x, affinors)?;
    let d = x.len();
    let t = chi(&wedge_vectors(&cols, d, Variance::Vector)?)?;
    let pxx = p.eval(x, x);
    let mut alphas = Vec::with_capacity(cols.len());
    for slot in 0..cols.len() {
        let mut replaced = cols.clone();
        replaced[slot] = pxx.clone();
        alphas.push(pair(&t, &wedge_vectors(&replaced, d, Variance::Vector)?)?);
    }
    let recon = cols
        .iter()
        .zip(&alphas)
        .fold(Vector::zeros(d), |acc, (c, a)| acc + c * *a);
    let residual = (&pxx - recon).norm() / (1.0 + pxx.norm());
    Ok((alphas, residual))
}

/// Tolerance on the relative reconstruction residual in [`extract_alphas`].
pub const EXTRACTION_TOL: f64 = 1e-9;

/// The unique `α_i(X)` with `P(X,X) = Σ α_i(X) F_i(X)`; fails when the
/// reconstruction residual shows `P(X,X)` is not in the hull of `X`.
pub fn extract_alphas(p: &SymTensor, affinors: &[Matrix], x: &Vector) -> Result<Vec<f64>> {
    let (alphas, residual) = extract_alphas_with_residual(p, affinors, x)?;
    if residual > EXTRACTION_TOL {
        return Err(Error::NotInHull { residual });
    }
    Ok(alphas)
}
