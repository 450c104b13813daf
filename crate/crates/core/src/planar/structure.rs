use crate::error::{Error, Result};
use crate::linalg::{column_space, numerical_rank, Matrix, Vector, RANK_RTOL};
use crate::quaternion::{make_affinor_triple, AffinorTriple};
use crate::rng::{gaussian_vector, seeded};

/// Default bound on the relative projection defect in [`hull_inclusion`].
pub const INCLUSION_TOL: f64 = 1e-9;

/// An `ℓ`-dimensional span of affinors `F_0 = E, F_1, …, F_{ℓ-1}` on `R^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct AStructure {
    dim: usize,
    affinors: Vec<Matrix>,
    /// Relative singular-value threshold used for numerical rank.
    tolerance: f64,
}

impl AStructure {
    /// Validates `F_0 = E`, square shapes and linear independence.
    pub fn new(affinors: Vec<Matrix>) -> Result<Self> {
        let first = affinors
            .first()
            .ok_or_else(|| Error::InvalidArgument("structure needs at least E".into()))?;
        let dim = first.nrows();
        if dim == 0 {
            return Err(Error::InvalidArgument("zero-dimensional structure".into()));
        }
        for f in &affinors {
            if f.nrows() != dim || f.ncols() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: f.nrows() });
            }
        }
        if (first - Matrix::identity(dim, dim)).amax() > 1e-12 {
            return Err(Error::InvalidArgument("first affinor must be the identity E".into()));
        }
        let stacked = Matrix::from_fn(dim * dim, affinors.len(), |r, c| affinors[c].as_slice()[r]);
        if numerical_rank(&stacked, 1e-10) != affinors.len() {
            return Err(Error::InvalidArgument("affinors are linearly dependent".into()));
        }
        Ok(Self {
            dim,
            affinors,
            tolerance: RANK_RTOL,
        })
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    /// `⟨E⟩` on `R^d`.
    pub fn projective(dim: usize) -> Result<Self> {
        Self::new(vec![Matrix::identity(dim, dim)])
    }

    /// `⟨E, I⟩` on `R^{4n}` with the quaternionic `I`.
    pub fn complex(n: usize) -> Result<Self> {
        let t = make_affinor_triple(n)?;
        Self::new(vec![Matrix::identity(4 * n, 4 * n), t.i])
    }

    /// `⟨E, I, J, K⟩` on `R^{4n}`.
    pub fn quaternionic(n: usize) -> Result<Self> {
        Self::from_triple(&make_affinor_triple(n)?)
    }

    pub fn from_triple(t: &AffinorTriple) -> Result<Self> {
        let d = t.dim();
        Self::new(vec![Matrix::identity(d, d), t.i.clone(), t.j.clone(), t.k.clone()])
    }

    /// Same span with `F_1..F_{ℓ-1}` replaced by `Σ_b m[a][b] F_{b+1}`.
    pub fn recombined(&self, m: &Matrix) -> Result<Self> {
        let rest = self.affinors.len() - 1;
        if m.nrows() != rest || m.ncols() != rest {
            return Err(Error::DimensionMismatch { expected: rest, got: m.nrows() });
        }
        let mut affinors = vec![self.affinors[0].clone()];
        for a in 0..rest {
            let mut f = Matrix::zeros(self.dim, self.dim);
            for b in 0..rest {
                f += &self.affinors[b + 1] * m[(a, b)];
            }
            affinors.push(f);
        }
        Ok(Self::new(affinors)?.with_tolerance(self.tolerance))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The rank `ℓ` of the structure.
    pub fn len(&self) -> usize {
        self.affinors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.affinors.is_empty()
    }

    pub fn affinors(&self) -> &[Matrix] {
        &self.affinors
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// `d×ℓ` matrix `[F_0(X) … F_{ℓ-1}(X)]`.
    pub fn frame_matrix(&self, x: &Vector) -> Matrix {
        let mut m = Matrix::zeros(self.dim, self.len());
        for (c, f) in self.affinors.iter().enumerate() {
            m.set_column(c, &(f * x));
        }
        m
    }
}

#[derive(Clone, Debug)]
pub struct Hull {
    /// Orthonormal columns spanning `A(X)`.
    pub basis: Matrix,
    pub rank: usize,
}

impl Hull {
    /// Distance from `v` to the hull.
    pub fn distance(&self, v: &Vector) -> f64 {
        let proj = &self.basis * (self.basis.transpose() * v);
        (v - proj).norm()
    }
}

/// `A(X) = {F(X) : F ∈ A}` with numerical rank at the structure tolerance.
pub fn hull(a: &AStructure, x: &Vector) -> Result<Hull> {
    if x.len() != a.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: x.len() });
    }
    let (basis, rank) = column_space(&a.frame_matrix(x), a.tolerance());
    Ok(Hull { basis, rank })
}

#[derive(Clone, Debug, PartialEq)]
pub struct GenericRankReport {
    pub samples: usize,
    pub achieved: usize,
    pub fraction: f64,
    pub verdict: bool,
    pub reason: Option<String>,
}

/// Samples Gaussian pairs `(X, Y)` and counts how often `A(X) ⊕ A(Y)` has
/// the full dimension `2ℓ`. The verdict requires a fraction of at least 0.99.
pub fn generic_rank_check(a: &AStructure, samples: usize, seed: u64) -> Result<GenericRankReport> {
    if samples == 0 {
        return Err(Error::InvalidArgument("generic rank check needs samples >= 1".into()));
    }
    let ell = a.len();
    if a.dim() < 2 * ell {
        return Ok(GenericRankReport {
            samples,
            achieved: 0,
            fraction: 0.0,
            verdict: false,
            reason: Some(format!("dimension bound: d = {} < 2ℓ = {}", a.dim(), 2 * ell)),
        });
    }
    let mut rng = seeded(seed);
    let mut achieved = 0;
    for _ in 0..samples {
        let x = gaussian_vector(&mut rng, a.dim());
        let y = gaussian_vector(&mut rng, a.dim());
        let mut m = Matrix::zeros(a.dim(), 2 * ell);
        m.columns_mut(0, ell).copy_from(&a.frame_matrix(&x));
        m.columns_mut(ell, ell).copy_from(&a.frame_matrix(&y));
        if numerical_rank(&m, a.tolerance()) == 2 * ell {
            achieved += 1;
        }
    }
    let fraction = achieved as f64 / samples as f64;
    let verdict = fraction >= 0.99;
    Ok(GenericRankReport {
        samples,
        achieved,
        fraction,
        verdict,
        reason: (!verdict).then(|| format!("only {achieved}/{samples} pairs reached rank {}", 2 * ell)),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct InclusionReport {
    pub included: bool,
    /// Largest `‖F(X) − proj_{B(X)} F(X)‖ / ‖F(X)‖` over samples and `F ∈ A`.
    pub max_defect: f64,
}

/// Tests `A(X) ⊆ B(X)` at sampled Gaussian `X`.
pub fn hull_inclusion(
    a: &AStructure,
    b: &AStructure,
    samples: usize,
    seed: u64,
    tolerance: f64,
) -> Result<InclusionReport> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: b.dim() });
    }
    let mut rng = seeded(seed);
    let mut max_defect: f64 = 0.0;
    for _ in 0..samples.max(1) {
        let x = gaussian_vector(&mut rng, a.dim());
        let hb = hull(b, &x)?;
        for f in a.affinors() {
            let v = f * &x;
            let norm = v.norm();
            if norm > 0.0 {
                max_defect = max_defect.max(hb.distance(&v) / norm);
            }
        }
    }
    Ok(InclusionReport {
        included: max_defect <= tolerance,
        max_defect,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis(d: usize, i: usize) -> Vector {
        Vector::from_fn(d, |r, _| if r == i { 1.0 } else { 0.0 })
    }

    #[test]
    fn construction_validates() {
        assert!(AStructure::new(vec![]).is_err());
        assert!(AStructure::new(vec![Matrix::identity(2, 2) * 2.0]).is_err());
        assert!(AStructure::new(vec![Matrix::identity(2, 2), Matrix::identity(2, 2)]).is_err());
        assert!(AStructure::quaternionic(0).is_err());
        assert_eq!(AStructure::quaternionic(2).unwrap().len(), 4);
    }

    #[test]
    fn hull_examples() {
        let q = AStructure::quaternionic(2).unwrap();
        assert_eq!(hull(&q, &basis(8, 0)).unwrap().rank, 4);
        assert_eq!(hull(&q, &Vector::zeros(8)).unwrap().rank, 0);
        let p = AStructure::projective(3).unwrap();
        let x = Vector::from_vec(vec![1.0, -2.0, 0.5]);
        let h = hull(&p, &x).unwrap();
        assert_eq!(h.rank, 1);
        assert!(h.distance(&(&x * 3.0)) < 1e-12);
        assert!(h.distance(&basis(3, 2)) > 0.1);
    }

    #[test]
    fn generic_rank_examples() {
        let q8 = AStructure::quaternionic(2).unwrap();
        assert!(generic_rank_check(&q8, 200, 1).unwrap().verdict);
        let q4 = AStructure::quaternionic(1).unwrap();
        let r = generic_rank_check(&q4, 10, 1).unwrap();
        assert!(!r.verdict);
        assert!(r.reason.unwrap().contains("dimension bound"));
        assert!(generic_rank_check(&AStructure::projective(2).unwrap(), 200, 1).unwrap().verdict);
        assert!(generic_rank_check(&AStructure::complex(1).unwrap(), 200, 1).unwrap().verdict);
        assert!(generic_rank_check(&q8, 0, 1).is_err());
    }

    #[test]
    fn inclusion_examples() {
        let q = AStructure::quaternionic(2).unwrap();
        let c = AStructure::complex(2).unwrap();
        let e = AStructure::projective(8).unwrap();
        assert!(hull_inclusion(&e, &q, 20, 1, INCLUSION_TOL).unwrap().included);
        let same = hull_inclusion(&q, &q, 20, 1, INCLUSION_TOL).unwrap();
        assert!(same.included);
        assert!(same.max_defect < 1e-12);
        assert!(hull_inclusion(&c, &q, 20, 1, INCLUSION_TOL).unwrap().included);
        let not = hull_inclusion(&q, &c, 20, 1, INCLUSION_TOL).unwrap();
        assert!(!not.included);
        // J(X) is orthogonal to span{X, I X}
        assert!((not.max_defect - 1.0).abs() < 1e-12);
    }

    #[test]
    fn recombination_keeps_span() {
        let q = AStructure::quaternionic(1).unwrap();
        let m = Matrix::from_row_slice(3, 3, &[1.0, 2.0, 0.0, 0.0, 1.0, 1.0, 1.0, 0.0, 3.0]);
        let r = q.recombined(&m).unwrap();
        assert!(hull_inclusion(&r, &q, 10, 2, 1e-9).unwrap().included);
        assert!(hull_inclusion(&q, &r, 10, 2, 1e-9).unwrap().included);
    }
}
