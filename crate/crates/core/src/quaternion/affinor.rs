use nalgebra::Matrix3;

use crate::error::{Error, Result};
use crate::linalg::{reciprocal_condition, Matrix};

use super::graded::QuatMatrix;
use super::Quaternion;

/// Defect threshold below which a map counts as quaternionic-linear.
pub const QUATERNIONIC_LINEAR_TOL: f64 = 1e-9;

/// A hypercomplex triple of affinors on `R^{4n}` with `I² = J² = -E`,
/// `K = I∘J = -J∘I`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffinorTriple {
    pub i: Matrix,
    pub j: Matrix,
    pub k: Matrix,
}

/// Matrix of `X ↦ X·q` on `R^{4n}` in the interleaved layout.
pub fn right_multiplication_matrix(q: Quaternion, n: usize) -> Matrix {
    let d = 4 * n;
    let mut m = Matrix::zeros(d, d);
    for slot in 0..n {
        for c in 0..4 {
            let mut e = [0.0; 4];
            e[c] = 1.0;
            let image = (Quaternion::from_array(e) * q).to_array();
            for r in 0..4 {
                m[(4 * slot + r, 4 * slot + c)] = image[r];
            }
        }
    }
    m
}

/// Real matrix of `X ↦ L X` for a quaternionic `n×n` matrix acting from the
/// left on column vectors; such maps commute with the right action.
pub fn left_matrix_multiplication(l: &QuatMatrix) -> Matrix {
    let n = l.n();
    let d = 4 * n;
    let mut m = Matrix::zeros(d, d);
    for row in 0..n {
        for col in 0..n {
            let entry = l.get(row, col);
            for c in 0..4 {
                let mut e = [0.0; 4];
                e[c] = 1.0;
                let image = (entry * Quaternion::from_array(e)).to_array();
                for r in 0..4 {
                    m[(4 * row + r, 4 * col + c)] = image[r];
                }
            }
        }
    }
    m
}

pub fn make_affinor_triple(n: usize) -> Result<AffinorTriple> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "affinor triple needs n >= 1".into(),
        ));
    }
    let i = right_multiplication_matrix(Quaternion::I, n);
    let j = right_multiplication_matrix(Quaternion::J, n);
    let k = &i * &j;
    Ok(AffinorTriple { i, j, k })
}

fn rotation_defect(r: &Matrix3<f64>) -> f64 {
    let orth = (r.transpose() * r - Matrix3::identity()).norm();
    orth.max((r.determinant() - 1.0).abs())
}

impl AffinorTriple {
    pub fn dim(&self) -> usize {
        self.i.nrows()
    }

    pub fn n(&self) -> usize {
        self.dim() / 4
    }

    pub fn as_array(&self) -> [&Matrix; 3] {
        [&self.i, &self.j, &self.k]
    }

    /// Largest of `‖I²+E‖, ‖J²+E‖, ‖K−I∘J‖, ‖I∘J+J∘I‖` (Frobenius).
    pub fn relation_defect(&self) -> f64 {
        let e = Matrix::identity(self.dim(), self.dim());
        let ij = &self.i * &self.j;
        let ji = &self.j * &self.i;
        [
            (&self.i * &self.i + &e).norm(),
            (&self.j * &self.j + &e).norm(),
            (&self.k - &ij).norm(),
            (&ij + &ji).norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    /// `(Î, Ĵ, K̂)_a = Σ_b R_ab (I, J, K)_b` for `R ∈ SO(3)`.
    pub fn rotate(&self, r: &Matrix3<f64>) -> Result<Self> {
        let defect = rotation_defect(r);
        if defect > 1e-9 {
            return Err(Error::NotRotation { defect });
        }
        let base = self.as_array();
        let combine = |row: usize| -> Matrix {
            base.iter()
                .enumerate()
                .fold(Matrix::zeros(self.dim(), self.dim()), |acc, (b, m)| {
                    acc + *m * r[(row, b)]
                })
        };
        Ok(Self {
            i: combine(0),
            j: combine(1),
            k: combine(2),
        })
    }
}

pub fn rotate_triple(t: &AffinorTriple, r: &Matrix3<f64>) -> Result<AffinorTriple> {
    t.rotate(r)
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuatLinearity {
    pub is_member: bool,
    /// `sqrt(Σ_a ‖f∘F_a − F̂_a∘f‖²) / ‖f‖` for the best rotation.
    pub defect: f64,
    pub rotation: Matrix3<f64>,
}

/// Decides whether `f` lies in the structure group, i.e. conjugates the span
/// `⟨I, J, K⟩` into itself by some rotation of the triple.
///
/// The rotation is fitted by projecting `f F_a f⁻¹` onto the (Frobenius
/// orthogonal) triple and taking the nearest `SO(3)` element.
pub fn is_quaternionic_linear(f: &Matrix, t: &AffinorTriple) -> Result<QuatLinearity> {
    let d = t.dim();
    if f.nrows() != d || f.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: f.nrows(),
        });
    }
    let rcond = reciprocal_condition(f);
    if rcond < 1e-12 {
        return Err(Error::Singular { rcond });
    }
    let f_inv = f
        .clone()
        .try_inverse()
        .ok_or(Error::Singular { rcond })?;
    let base = t.as_array();
    let mut fitted = Matrix3::zeros();
    for (a, fa) in base.iter().enumerate() {
        let conj = f * *fa * &f_inv;
        for (b, fb) in base.iter().enumerate() {
            fitted[(a, b)] = conj.dot(*fb) / fb.norm_squared();
        }
    }
    let rotation = nearest_rotation(&fitted);
    let rotated = t.rotate(&rotation)?;
    let mut sum = 0.0;
    for (fa, ha) in base.iter().zip(rotated.as_array()) {
        sum += (f * *fa - ha * f).norm_squared();
    }
    let defect = sum.sqrt() / f.norm();
    Ok(QuatLinearity {
        is_member: defect <= QUATERNIONIC_LINEAR_TOL,
        defect,
        rotation,
    })
}

fn nearest_rotation(m: &Matrix3<f64>) -> Matrix3<f64> {
    let svd = m.svd(true, true);
    let (u, vt) = (svd.u.unwrap(), svd.v_t.unwrap());
    let mut r = u * vt;
    if r.determinant() < 0.0 {
        let mut flip = Matrix3::identity();
        // flip the direction of the smallest singular value
        let smallest = (0..3)
            .min_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]))
            .unwrap();
        flip[(smallest, smallest)] = -1.0;
        r = u * flip * vt;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{gaussian, seeded};

    #[test]
    fn i_acts_as_right_multiplication_by_i() {
        let t = make_affinor_triple(1).unwrap();
        let x = nalgebra::DVector::from_vec(vec![1.0, 2.0, 3.0, 4.0]);
        // (w,x,y,z) -> (-x, w, z, -y)
        assert_eq!((&t.i * &x).as_slice(), &[-2.0, 1.0, 4.0, -3.0]);
        let one = nalgebra::DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!((&t.i * one).as_slice(), &[0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn k_is_minus_right_multiplication_by_k() {
        let t = make_affinor_triple(2).unwrap();
        let rk = right_multiplication_matrix(Quaternion::K, 2);
        assert!((&t.k + rk).norm() < 1e-15);
    }

    #[test]
    fn triple_relations_hold() {
        for n in 1..=4 {
            let t = make_affinor_triple(n).unwrap();
            assert!(t.relation_defect() <= 1e-12);
            let e = Matrix::identity(4 * n, 4 * n);
            assert!((&t.i * &t.i + &e).norm() <= 1e-12);
            assert!((&t.i * &t.j + &t.j * &t.i).norm() <= 1e-12);
            // norm preserving
            for m in t.as_array() {
                assert!((m.transpose() * m - &e).norm() <= 1e-12);
            }
        }
        assert!(make_affinor_triple(0).is_err());
    }

    #[test]
    fn rotations_preserve_relations() {
        let t = make_affinor_triple(2).unwrap();
        assert_eq!(t.rotate(&Matrix3::identity()).unwrap(), t);

        let cyclic = Matrix3::new(0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0);
        let c = t.rotate(&cyclic).unwrap();
        assert!((&c.i - &t.j).norm() < 1e-15);
        assert!((&c.k - &c.i * &c.j).norm() < 1e-12);
        assert!((&t.j * &t.k - &t.i).norm() < 1e-12);

        let mut rng = seeded(3);
        for _ in 0..100 {
            let u = Quaternion::new(gaussian(&mut rng), gaussian(&mut rng), gaussian(&mut rng), gaussian(&mut rng))
                .normalized()
                .unwrap();
            let r = t.rotate(&u.rotation_matrix()).unwrap();
            assert!(r.relation_defect() <= 1e-12);
        }
    }

    #[test]
    fn rotation_rejects_non_orthogonal() {
        let t = make_affinor_triple(1).unwrap();
        assert!(matches!(
            t.rotate(&(Matrix3::identity() * 2.0)),
            Err(Error::NotRotation { .. })
        ));
        let reflection = Matrix3::from_diagonal(&nalgebra::Vector3::new(1.0, 1.0, -1.0));
        assert!(t.rotate(&reflection).is_err());
    }

    #[test]
    fn membership_examples() {
        let t = make_affinor_triple(2).unwrap();
        let id = is_quaternionic_linear(&Matrix::identity(8, 8), &t).unwrap();
        assert!(id.is_member);
        assert!(id.defect < 1e-15);

        let u = Quaternion::new(0.3, -0.5, 0.8, 0.1).normalized().unwrap();
        let ru = is_quaternionic_linear(&right_multiplication_matrix(u, 2), &t).unwrap();
        assert!(ru.is_member, "defect {}", ru.defect);

        let mut diag = Matrix::identity(8, 8);
        diag[(0, 0)] = 2.0;
        let res = is_quaternionic_linear(&diag, &t).unwrap();
        assert!(!res.is_member);
        // numpy least-squares oracle: 0.73855
        assert!(res.defect > 0.1);
        assert!((res.defect - 0.738_548_945_875_996_3).abs() < 1e-9);

        assert!(matches!(
            is_quaternionic_linear(&Matrix::zeros(8, 8), &t),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn left_quaternionic_matrices_commute_with_triple() {
        let mut rng = seeded(11);
        let l = QuatMatrix::from_fn(2, |_, _| {
            Quaternion::new(gaussian(&mut rng), gaussian(&mut rng), gaussian(&mut rng), gaussian(&mut rng))
        });
        let f = left_matrix_multiplication(&l);
        let t = make_affinor_triple(2).unwrap();
        for m in t.as_array() {
            assert!((&f * m - m * &f).norm() < 1e-12);
        }
    }
}
