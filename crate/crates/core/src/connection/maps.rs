use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::planar::AStructure;
use crate::rng::{gaussian_vector, seeded, uniform, unit_vector};

use super::{integrate_planar_curve, planarity_residual, Connection, Curve};

/// Default bound on image residuals.
pub const MAP_TOL: f64 = 1e-4;

const JACOBIAN_TOL: f64 = 1e-5;
const MAX_ATTEMPTS: usize = 6;

/// A smooth map between charts, with its derivative.
pub trait ChartMap {
    fn source_dim(&self) -> usize;
    fn target_dim(&self) -> usize;
    fn apply(&self, x: &Vector) -> Vector;
    fn jacobian(&self, x: &Vector) -> Matrix;
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearMap(pub Matrix);

impl ChartMap for LinearMap {
    fn source_dim(&self) -> usize {
        self.0.ncols()
    }

    fn target_dim(&self) -> usize {
        self.0.nrows()
    }

    fn apply(&self, x: &Vector) -> Vector {
        &self.0 * x
    }

    fn jacobian(&self, _x: &Vector) -> Matrix {
        self.0.clone()
    }
}

/// How the random source curves of a map check are drawn.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurveBatch {
    pub curves: usize,
    pub t_max: f64,
    pub step: f64,
    /// Initial speed `‖ċ(0)‖`.
    pub speed: f64,
    /// Amplitude of the coefficients `q_i(t) = c_i + s_i sin(ω_i t + φ_i)`.
    pub q_amplitude: f64,
}

impl Default for CurveBatch {
    fn default() -> Self {
        Self { curves: 20, t_max: 1.0, step: 1e-3, speed: 1.0, q_amplitude: 0.5 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlanarMapReport {
    pub source_residuals: Vec<f64>,
    pub image_residuals: Vec<f64>,
    pub max_source_residual: f64,
    pub max_image_residual: f64,
    pub jacobian_defect: f64,
    pub pass: bool,
}

fn jacobian_defect(f: &dyn ChartMap, x: &Vector) -> f64 {
    let j = f.jacobian(x);
    let h = 1e-6 * (1.0 + x.amax());
    let mut worst: f64 = 0.0;
    for c in 0..f.source_dim() {
        let mut e = Vector::zeros(x.len());
        e[c] = h;
        let fd = (f.apply(&(x + &e)) - f.apply(&(x - &e))) / (2.0 * h);
        let col = j.column(c);
        worst = worst.max((fd - col).amax() / (1.0 + col.amax()));
    }
    worst
}

/// Draws planar curves of `(conn_a, a)`, pushes them through `f` and
/// measures their planarity with respect to `(conn_b, b)`.
///
/// The check passes when every image residual is at most [`MAP_TOL`].
pub fn check_planar_map(
    f: &dyn ChartMap,
    conn_a: &Connection,
    a: &AStructure,
    conn_b: &Connection,
    b: &AStructure,
    batch: &CurveBatch,
    seed: u64,
) -> Result<PlanarMapReport> {
    let (m, n) = (f.source_dim(), f.target_dim());
    if conn_a.dim() != m || a.dim() != m {
        return Err(Error::DimensionMismatch { expected: m, got: a.dim() });
    }
    if conn_b.dim() != n || b.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: b.dim() });
    }
    if batch.curves == 0 {
        return Err(Error::InvalidArgument("curve batch is empty".into()));
    }
    let mut rng = seeded(seed);
    let mut jac: f64 = 0.0;
    for _ in 0..3 {
        jac = jac.max(jacobian_defect(f, &gaussian_vector(&mut rng, m)));
    }
    if jac > JACOBIAN_TOL {
        return Err(Error::DerivativeMismatch { defect: jac });
    }

    let mut source_residuals = Vec::with_capacity(batch.curves);
    let mut image_residuals = Vec::with_capacity(batch.curves);
    for _ in 0..batch.curves {
        let mut speed = batch.speed;
        let mut attempt = 0;
        let curve = loop {
            let x0 = gaussian_vector(&mut rng, m) * 0.5;
            let v0 = unit_vector(&mut rng, m) * speed;
            let params: Vec<[f64; 4]> = (0..a.len())
                .map(|_| {
                    [
                        uniform(&mut rng, -batch.q_amplitude, batch.q_amplitude),
                        uniform(&mut rng, -batch.q_amplitude, batch.q_amplitude),
                        uniform(&mut rng, 0.5, 3.0),
                        uniform(&mut rng, 0.0, std::f64::consts::TAU),
                    ]
                })
                .collect();
            let q = |t: f64| params.iter().map(|[c, s, w, p]| c + s * (w * t + p).sin()).collect();
            match integrate_planar_curve(conn_a, a, &x0, &v0, q, batch.t_max, batch.step) {
                Ok(c) => break c,
                Err(Error::BlowUp { .. }) if attempt + 1 < MAX_ATTEMPTS => {
                    attempt += 1;
                    speed *= 0.5;
                }
                Err(e) => return Err(e),
            }
        };
        let source = planarity_residual(conn_a, a, &Curve::from(curve.clone()))?;
        let image = curve.map_points(|x| f.apply(x));
        let target = planarity_residual(conn_b, b, &Curve::from(image))?;
        source_residuals.push(source.max_residual);
        image_residuals.push(target.max_residual);
    }
    let max_source_residual = source_residuals.iter().copied().fold(0.0, f64::max);
    let max_image_residual = image_residuals.iter().copied().fold(0.0, f64::max);
    Ok(PlanarMapReport {
        source_residuals,
        image_residuals,
        max_source_residual,
        max_image_residual,
        jacobian_defect: jac,
        pass: max_image_residual <= MAP_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quaternion::{left_matrix_multiplication, right_multiplication_matrix, QuatMatrix, Quaternion};
    use crate::rng::gaussian_matrix;

    struct Cubic;

    impl ChartMap for Cubic {
        fn source_dim(&self) -> usize {
            2
        }
        fn target_dim(&self) -> usize {
            2
        }
        fn apply(&self, x: &Vector) -> Vector {
            Vector::from_vec(vec![x[0] + x[1].powi(3), x[1]])
        }
        fn jacobian(&self, x: &Vector) -> Matrix {
            Matrix::from_row_slice(2, 2, &[1.0, 3.0 * x[1] * x[1], 0.0, 1.0])
        }
    }

    struct WrongJacobian;

    impl ChartMap for WrongJacobian {
        fn source_dim(&self) -> usize {
            2
        }
        fn target_dim(&self) -> usize {
            2
        }
        fn apply(&self, x: &Vector) -> Vector {
            x * 2.0
        }
        fn jacobian(&self, _x: &Vector) -> Matrix {
            Matrix::identity(2, 2)
        }
    }

    fn small_batch() -> CurveBatch {
        CurveBatch { curves: 4, t_max: 0.5, step: 2e-3, ..CurveBatch::default() }
    }

    #[test]
    fn quaternionic_linear_maps_preserve_planarity() {
        let q = AStructure::quaternionic(2).unwrap();
        let flat = Connection::flat(8);
        // left multiplication by a quaternionic matrix commutes with the right action
        let l = QuatMatrix::from_fn(2, |r, c| {
            Quaternion::new(0.3 + (r == c) as u8 as f64, -1.0, 0.5 * r as f64, 2.0 - c as f64)
        });
        let m = left_matrix_multiplication(&l);
        let report =
            check_planar_map(&LinearMap(m), &flat, &q, &flat, &q, &small_batch(), 3).unwrap();
        assert!(report.pass, "{report:?}");
        assert!(report.max_source_residual < 1e-5);
    }

    #[test]
    fn generic_linear_maps_break_planarity() {
        // on R^4 every curve is H-planar, so the check needs two slots
        let q = AStructure::quaternionic(2).unwrap();
        let flat = Connection::flat(8);
        let m = Matrix::identity(8, 8) + gaussian_matrix(&mut seeded(4), 8, 8) * 0.3;
        let report =
            check_planar_map(&LinearMap(m), &flat, &q, &flat, &q, &small_batch(), 3).unwrap();
        assert!(!report.pass);
    }

    #[test]
    fn right_multiplication_preserves_planarity() {
        let q = AStructure::quaternionic(2).unwrap();
        let flat = Connection::flat(8);
        let r = right_multiplication_matrix(Quaternion::new(1.0, 0.4, -0.2, 0.7), 2);
        let report =
            check_planar_map(&LinearMap(r), &flat, &q, &flat, &q, &small_batch(), 3).unwrap();
        assert!(report.pass, "{report:?}");
    }

    #[test]
    fn nonlinear_maps_bend_lines() {
        let e = AStructure::projective(2).unwrap();
        let flat = Connection::flat(2);
        let report = check_planar_map(&Cubic, &flat, &e, &flat, &e, &small_batch(), 9).unwrap();
        assert!(!report.pass);
        assert!(report.jacobian_defect < 1e-6);
    }

    #[test]
    fn jacobian_is_checked() {
        let e = AStructure::projective(2).unwrap();
        let flat = Connection::flat(2);
        assert!(matches!(
            check_planar_map(&WrongJacobian, &flat, &e, &flat, &e, &small_batch(), 1),
            Err(Error::DerivativeMismatch { .. })
        ));
    }

    #[test]
    fn identity_passes_and_stretching_one_axis_fails() {
        let q = AStructure::quaternionic(2).unwrap();
        let flat = Connection::flat(8);
        let batch = small_batch();
        let id = LinearMap(Matrix::identity(8, 8));
        assert!(check_planar_map(&id, &flat, &q, &flat, &q, &batch, 5).unwrap().pass);
        let mut diag = Matrix::identity(8, 8);
        diag[(0, 0)] = 2.0;
        let report = check_planar_map(&LinearMap(diag), &flat, &q, &flat, &q, &batch, 5).unwrap();
        assert!(!report.pass);
        assert!(report.image_residuals.iter().any(|&r| r > 1e-2));
    }
}
