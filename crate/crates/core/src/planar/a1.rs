use crate::error::{Error, Result};
use crate::exterior::{extract_alphas_with_residual, is_generic};
use crate::linalg::{lstsq, reciprocal_condition, Matrix, Vector};
use crate::rng::{gaussian_vector, seeded, SeededRng};

use super::structure::{generic_rank_check, AStructure};
use super::tensor::SymTensor;

/// One-forms `α_0, …, α_{ℓ-1}` stored as coefficient vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct OneFormList(pub Vec<Vector>);

impl OneFormList {
    pub fn zeros(count: usize, dim: usize) -> Self {
        Self(vec![Vector::zeros(dim); count])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn eval(&self, x: &Vector) -> Vec<f64> {
        self.0.iter().map(|a| a.dot(x)).collect()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .fold(0.0, |acc, (a, b)| acc.max((a - b).amax()))
    }
}

/// `P(X, Y) = ½ Σ_i (α_i(X) F_i(Y) + α_i(Y) F_i(X))`.
pub fn make_a1(alphas: &OneFormList, a: &AStructure) -> Result<SymTensor> {
    if alphas.len() != a.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), got: alphas.len() });
    }
    let d = a.dim();
    if let Some(bad) = alphas.0.iter().find(|v| v.len() != d) {
        return Err(Error::DimensionMismatch { expected: d, got: bad.len() });
    }
    Ok(SymTensor::from_fn(d, |i, j, k| {
        // the (i, j) symmetrization in from_fn supplies the second half
        alphas
            .0
            .iter()
            .zip(a.affinors())
            .map(|(alpha, f)| alpha[i] * f[(k, j)])
            .sum()
    }))
}

/// Recovers the symmetric tensor whose diagonal is `q`, after checking on
/// random vectors that `q` is a quadratic map.
pub fn polarize(dim: usize, q: impl Fn(&Vector) -> Vector, seed: u64) -> Result<SymTensor> {
    let eval = |x: &Vector| -> Result<Vector> {
        let v = q(x);
        if v.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: v.len() });
        }
        Ok(v)
    };
    let mut rng = seeded(seed);
    let mut defect: f64 = 0.0;
    let mut scale: f64 = 1.0;
    for _ in 0..8 {
        let x = gaussian_vector(&mut rng, dim);
        let y = gaussian_vector(&mut rng, dim);
        let z = gaussian_vector(&mut rng, dim);
        let (qx, qy) = (eval(&x)?, eval(&y)?);
        scale = scale.max(qx.amax()).max(qy.amax());
        defect = defect.max((eval(&(&x * 2.0))? - &qx * 4.0).amax());
        let para = eval(&(&x + &y))? + eval(&(&x - &y))? - &qx * 2.0 - &qy * 2.0;
        defect = defect.max(para.amax());
        let bilinear = |u: &Vector, v: &Vector| -> Result<Vector> {
            Ok((eval(&(u + v))? - eval(u)? - eval(v)?) * 0.5)
        };
        let add = bilinear(&(&x + &y), &z)? - bilinear(&x, &z)? - bilinear(&y, &z)?;
        defect = defect.max(add.amax());
    }
    if defect > 1e-10 * scale {
        return Err(Error::NotQuadratic { defect: defect / scale });
    }

    let basis = |i: usize| Vector::from_fn(dim, |r, _| if r == i { 1.0 } else { 0.0 });
    let diag: Vec<Vector> = (0..dim).map(|i| eval(&basis(i))).collect::<Result<_>>()?;
    let mut slots = vec![Vector::zeros(dim); dim * dim];
    for i in 0..dim {
        slots[i * dim + i] = diag[i].clone();
        for j in (i + 1)..dim {
            let pij = (eval(&(basis(i) + basis(j)))? - &diag[i] - &diag[j]) * 0.5;
            slots[i * dim + j] = pij.clone();
            slots[j * dim + i] = pij;
        }
    }
    let p = SymTensor::from_fn(dim, |i, j, k| slots[i * dim + j][k]);

    for _ in 0..4 {
        let x = gaussian_vector(&mut rng, dim);
        let qx = eval(&x)?;
        let gap = (p.eval(&x, &x) - &qx).amax();
        if gap > 1e-10 * (1.0 + qx.amax()) {
            return Err(Error::NotQuadratic { defect: gap });
        }
    }
    Ok(p)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecomposeOptions {
    /// Acceptance bound on `‖P − Σ α_i ⊙ F_i‖∞ / (1 + ‖P‖∞)`.
    pub tolerance: f64,
    /// Maximum coefficient gap between the two solvers when both accept.
    pub agreement: f64,
    /// Generic vectors sampled by the extraction solver (at least `2d`).
    pub extraction_samples: Option<usize>,
    pub rank_samples: usize,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-9,
            agreement: 1e-7,
            extraction_samples: None,
            rank_samples: 200,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum A1Decomposition {
    Member {
        forms: OneFormList,
        /// Relative slot residual of the least-squares solver.
        residual: f64,
        /// Relative residual of the pointwise-extraction solver.
        extraction_residual: f64,
        /// Largest coefficient gap between the two solvers.
        solver_gap: f64,
        /// Reciprocal condition number of the least-squares system.
        rcond: f64,
    },
    NonMember {
        residual: f64,
        extraction_residual: f64,
        rcond: f64,
    },
}

impl A1Decomposition {
    pub fn is_member(&self) -> bool {
        matches!(self, Self::Member { .. })
    }

    pub fn residual(&self) -> f64 {
        match self {
            Self::Member { residual, .. } | Self::NonMember { residual, .. } => *residual,
        }
    }

    pub fn forms(&self) -> Option<&OneFormList> {
        match self {
            Self::Member { forms, .. } => Some(forms),
            Self::NonMember { .. } => None,
        }
    }
}

fn relative_residual(p: &SymTensor, forms: &OneFormList, a: &AStructure) -> Result<f64> {
    Ok(p.max_abs_diff(&make_a1(forms, a)?) / (1.0 + p.max_abs()))
}

/// Global least squares for the `ℓ·d` covector coefficients against the
/// `d(d+1)/2 · d` independent tensor slots.
fn solve_least_squares(p: &SymTensor, a: &AStructure) -> (OneFormList, f64) {
    let d = a.dim();
    let ell = a.len();
    let rows = d * (d + 1) / 2 * d;
    let mut m = Matrix::zeros(rows, ell * d);
    let mut rhs = Vector::zeros(rows);
    let mut r = 0;
    for i in 0..d {
        for j in i..d {
            for k in 0..d {
                for (idx, f) in a.affinors().iter().enumerate() {
                    m[(r, idx * d + i)] += 0.5 * f[(k, j)];
                    m[(r, idx * d + j)] += 0.5 * f[(k, i)];
                }
                rhs[r] = p.get(i, j, k);
                r += 1;
            }
        }
    }
    let sol = lstsq(&m, &rhs, 1e-12);
    let forms = OneFormList((0..ell).map(|idx| sol.rows(idx * d, d).into_owned()).collect());
    (forms, reciprocal_condition(&m))
}

fn sample_generic(rng: &mut SeededRng, a: &AStructure) -> Result<Vector> {
    for _ in 0..100 {
        let x = gaussian_vector(rng, a.dim());
        if is_generic(&x, a.affinors()) {
            return Ok(x);
        }
    }
    Err(Error::GenericRank("no generic vector after 100 draws".into()))
}

/// Pointwise extraction at generic samples followed by a linear fit of each
/// `α_i`. Returns the fitted forms and the worst relative residual over the
/// pointwise reconstructions, the linear fit and the rebuilt tensor.
fn solve_by_extraction(
    p: &SymTensor,
    a: &AStructure,
    samples: usize,
    rng: &mut SeededRng,
) -> Result<(OneFormList, f64)> {
    let d = a.dim();
    let ell = a.len();
    let mut design = Matrix::zeros(samples, d);
    let mut values = Matrix::zeros(samples, ell);
    let mut worst: f64 = 0.0;
    for s in 0..samples {
        let x = sample_generic(rng, a)?;
        let (alphas, residual) = extract_alphas_with_residual(p, a.affinors(), &x)?;
        worst = worst.max(residual);
        design.set_row(s, &x.transpose());
        for (idx, v) in alphas.into_iter().enumerate() {
            values[(s, idx)] = v;
        }
    }
    let mut forms = Vec::with_capacity(ell);
    for idx in 0..ell {
        let y = values.column(idx).into_owned();
        let coeffs = lstsq(&design, &y, 1e-12);
        let fit = (&design * &coeffs - &y).amax() / (1.0 + y.amax());
        worst = worst.max(fit);
        forms.push(coeffs);
    }
    let forms = OneFormList(forms);
    worst = worst.max(relative_residual(p, &forms, a)?);
    Ok((forms, worst))
}

/// Decides `P ∈ A^(1)` with the default [`DecomposeOptions`].
pub fn decompose_a1(p: &SymTensor, a: &AStructure, seed: u64) -> Result<A1Decomposition> {
    decompose_a1_with(p, a, seed, &DecomposeOptions::default())
}

/// Decides whether `P` lies in `A^(1)` using two independent solvers: the
/// wedge-formula extraction at sampled generic vectors and a global least
/// squares over all slots. Both must agree; a split verdict or a coefficient
/// gap above `options.agreement` is an error.
pub fn decompose_a1_with(
    p: &SymTensor,
    a: &AStructure,
    seed: u64,
    options: &DecomposeOptions,
) -> Result<A1Decomposition> {
    let d = a.dim();
    if p.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: p.dim() });
    }
    let rank = generic_rank_check(a, options.rank_samples, seed)?;
    if !rank.verdict {
        return Err(Error::GenericRank(rank.reason.unwrap_or_default()));
    }

    let (ls_forms, rcond) = solve_least_squares(p, a);
    let residual = relative_residual(p, &ls_forms, a)?;

    let samples = options.extraction_samples.unwrap_or(3 * d).max(2 * d);
    let mut rng = seeded(seed.wrapping_add(0x9e37_79b9_7f4a_7c15));
    let (ex_forms, extraction_residual) = solve_by_extraction(p, a, samples, &mut rng)?;

    let ls_ok = residual <= options.tolerance;
    let ex_ok = extraction_residual <= options.tolerance;
    match (ls_ok, ex_ok) {
        (true, true) => {
            let solver_gap = ls_forms.max_abs_diff(&ex_forms);
            if solver_gap > options.agreement {
                return Err(Error::SolverDisagreement(format!(
                    "fitted one-forms differ by {solver_gap:.3e}"
                )));
            }
            Ok(A1Decomposition::Member {
                forms: ls_forms,
                residual,
                extraction_residual,
                solver_gap,
                rcond,
            })
        }
        (false, false) => Ok(A1Decomposition::NonMember {
            residual,
            extraction_residual,
            rcond,
        }),
        _ => Err(Error::SolverDisagreement(format!(
            "least squares residual {residual:.3e} vs extraction residual {extraction_residual:.3e}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::gaussian_vector;
    use proptest::prelude::*;

    fn random_forms(rng: &mut SeededRng, ell: usize, d: usize) -> OneFormList {
        OneFormList((0..ell).map(|_| gaussian_vector(rng, d)).collect())
    }

    #[test]
    fn make_a1_examples() {
        let q = AStructure::quaternionic(2).unwrap();
        assert_eq!(make_a1(&OneFormList::zeros(4, 8), &q).unwrap(), SymTensor::zero(8));

        // projective: P(X,Y) = ½(α(X)Y + α(Y)X)
        let e = AStructure::projective(2).unwrap();
        let alpha = Vector::from_vec(vec![1.0, 0.0]);
        let p = make_a1(&OneFormList(vec![alpha.clone()]), &e).unwrap();
        let x = Vector::from_vec(vec![0.3, -1.2]);
        let y = Vector::from_vec(vec![2.0, 0.7]);
        let expect = (&y * alpha.dot(&x) + &x * alpha.dot(&y)) * 0.5;
        assert!((p.eval(&x, &y) - expect).amax() < 1e-15);

        let mut rng = seeded(4);
        let forms = random_forms(&mut rng, 4, 8);
        let p = make_a1(&forms, &q).unwrap();
        for _ in 0..100 {
            let x = gaussian_vector(&mut rng, 8);
            let direct = q
                .affinors()
                .iter()
                .zip(&forms.0)
                .fold(Vector::zeros(8), |acc, (f, a)| acc + (f * &x) * a.dot(&x));
            assert!((p.eval(&x, &x) - direct).amax() < 1e-12);
        }
        assert!(make_a1(&OneFormList::zeros(3, 8), &q).is_err());
    }

    #[test]
    fn polarize_examples() {
        assert_eq!(polarize(3, |_| Vector::zeros(3), 1).unwrap(), SymTensor::zero(3));

        let p = polarize(2, |x| Vector::from_vec(vec![x[0] * x[0], 0.0]), 1).unwrap();
        assert_eq!(p.get(0, 0, 0), 1.0);
        assert_eq!(p.get(0, 1, 0), 0.0);
        assert_eq!(p.get(0, 1, 1), 0.0);

        let t = SymTensor::from_fn(3, |i, j, k| (i as f64 - 2.0 * j as f64 + k as f64 * 0.5).sin());
        let back = polarize(3, |x| t.eval(x, x), 7).unwrap();
        assert!(back.max_abs_diff(&t) < 1e-14);

        let cubic = polarize(2, |x| Vector::from_vec(vec![x[0].powi(3), x[1]]), 1);
        assert!(matches!(cubic, Err(Error::NotQuadratic { .. })));
    }

    #[test]
    fn decompose_roundtrip_and_zero() {
        let q = AStructure::quaternionic(2).unwrap();
        let mut rng = seeded(17);
        let forms = random_forms(&mut rng, 4, 8);
        let p = make_a1(&forms, &q).unwrap();
        let dec = decompose_a1(&p, &q, 3).unwrap();
        assert!(dec.forms().unwrap().max_abs_diff(&forms) < 1e-8);

        let zero = decompose_a1(&SymTensor::zero(8), &q, 3).unwrap();
        assert!(zero.is_member());
        assert_eq!(zero.residual(), 0.0);
        assert!(zero.forms().unwrap().max_abs_diff(&OneFormList::zeros(4, 8)) == 0.0);
    }

    #[test]
    fn cube_tensor_is_rejected() {
        let q = AStructure::quaternionic(2).unwrap();
        let dec = decompose_a1(&SymTensor::componentwise_cube(8), &q, 5).unwrap();
        assert!(!dec.is_member());
        // numpy lstsq oracle: max slot residual 0.625, relative to 1 + ‖P‖∞ = 2
        assert!((dec.residual() - 0.3125).abs() < 1e-9);
        assert!(dec.residual() >= 0.1);
    }

    #[test]
    fn decompose_requires_generic_rank() {
        let q4 = AStructure::quaternionic(1).unwrap();
        assert!(matches!(
            decompose_a1(&SymTensor::zero(4), &q4, 1),
            Err(Error::GenericRank(_))
        ));
    }

    #[test]
    fn acceptance_is_basis_free() {
        let q = AStructure::quaternionic(2).unwrap();
        let m = Matrix::from_row_slice(3, 3, &[2.0, 1.0, 0.0, 0.0, 1.0, -1.0, 1.0, 0.0, 1.0]);
        let r = q.recombined(&m).unwrap();
        let mut rng = seeded(33);
        let p = make_a1(&random_forms(&mut rng, 4, 8), &q).unwrap();
        assert!(decompose_a1(&p, &r, 2).unwrap().is_member());
        let cube = SymTensor::componentwise_cube(8);
        assert!(!decompose_a1(&cube, &r, 2).unwrap().is_member());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn round_trip_recovers_forms(seed in any::<u64>(), scale in 0.01..100.0f64) {
            let q = AStructure::quaternionic(2).unwrap();
            let mut rng = seeded(seed);
            let forms = OneFormList(
                (0..4).map(|_| gaussian_vector(&mut rng, 8) * scale).collect(),
            );
            let p = make_a1(&forms, &q).unwrap();
            let got = decompose_a1(&p, &q, seed).unwrap();
            let back = got.forms().expect("member");
            prop_assert!(back.max_abs_diff(&forms) <= 1e-10 * (1.0 + scale));
        }
    }
}
