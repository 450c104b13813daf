//! The graded algebra `g = g_{-1} ⊕ g_0 ⊕ g_1` of `(1+n)×(1+n)` quaternionic
//! block matrices
//!
//! ```text
//! ( a  Z )      a ∈ H,  Z ∈ (H^n)^*   (grade 1)
//! ( X  A )      X ∈ H^n (grade -1),   A ∈ gl(n, H)
//! ```
//!
//! with the commutator bracket. The diagonal blocks `(a, A)` form `g_0`.

use crate::error::{Error, Result};

use super::{QuatCovector, QuatVector, Quaternion};

/// Square quaternionic matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct QuatMatrix {
    n: usize,
    entries: Vec<Quaternion>,
}

impl QuatMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            entries: vec![Quaternion::ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |r, c| if r == c { Quaternion::ONE } else { Quaternion::ZERO })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Quaternion) -> Self {
        let mut entries = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                entries.push(f(r, c));
            }
        }
        Self { n, entries }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: usize, c: usize) -> Quaternion {
        self.entries[r * self.n + c]
    }

    pub fn set(&mut self, r: usize, c: usize, q: Quaternion) {
        self.entries[r * self.n + c] = q;
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        Self::from_fn(self.n, |r, c| {
            (0..self.n).fold(Quaternion::ZERO, |acc, k| acc + self.get(r, k) * rhs.get(k, c))
        })
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Self::from_fn(self.n, |r, c| self.get(r, c) - rhs.get(r, c))
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self::from_fn(self.n, |r, c| self.get(r, c) + rhs.get(r, c))
    }

    pub fn commutator(&self, rhs: &Self) -> Self {
        self.mul(rhs).sub(&rhs.mul(self))
    }

    pub fn max_abs(&self) -> f64 {
        self.entries
            .iter()
            .fold(0.0, |acc, q| acc.max(q.max_abs_diff(Quaternion::ZERO)))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GradedElement {
    pub a: Quaternion,
    pub z: QuatCovector,
    pub x: QuatVector,
    pub block: QuatMatrix,
}

impl GradedElement {
    pub fn zero(n: usize) -> Self {
        Self {
            a: Quaternion::ZERO,
            z: QuatCovector::zeros(n),
            x: QuatVector::zeros(n),
            block: QuatMatrix::zeros(n),
        }
    }

    pub fn n(&self) -> usize {
        self.x.n()
    }

    /// Pure grade -1 element.
    pub fn from_vector(x: QuatVector) -> Self {
        let n = x.n();
        Self { x, ..Self::zero(n) }
    }

    /// Pure grade 1 element.
    pub fn from_covector(z: QuatCovector) -> Self {
        let n = z.n();
        Self { z, ..Self::zero(n) }
    }

    /// Pure grade 0 element.
    pub fn from_diagonal(a: Quaternion, block: QuatMatrix) -> Self {
        let n = block.n();
        Self {
            a,
            block,
            ..Self::zero(n)
        }
    }

    pub fn to_matrix(&self) -> QuatMatrix {
        let n = self.n();
        QuatMatrix::from_fn(n + 1, |r, c| match (r, c) {
            (0, 0) => self.a,
            (0, c) => self.z.0[c - 1],
            (r, 0) => self.x.0[r - 1],
            (r, c) => self.block.get(r - 1, c - 1),
        })
    }

    pub fn from_matrix(m: &QuatMatrix) -> Result<Self> {
        if m.n() == 0 {
            return Err(Error::InvalidArgument("empty block matrix".into()));
        }
        let n = m.n() - 1;
        Ok(Self {
            a: m.get(0, 0),
            z: QuatCovector((1..=n).map(|c| m.get(0, c)).collect()),
            x: QuatVector((1..=n).map(|r| m.get(r, 0)).collect()),
            block: QuatMatrix::from_fn(n, |r, c| m.get(r + 1, c + 1)),
        })
    }

    /// Component of grade `-1`, `0` or `1`; any other grade is zero.
    pub fn project(&self, grade: i32) -> Self {
        let n = self.n();
        match grade {
            -1 => Self::from_vector(self.x.clone()),
            0 => Self::from_diagonal(self.a, self.block.clone()),
            1 => Self::from_covector(self.z.clone()),
            _ => Self::zero(n),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self::from_matrix(&self.to_matrix().add(&rhs.to_matrix())).expect("n+1 >= 1")
    }

    pub fn scale(&self, k: f64) -> Self {
        let m = self.to_matrix();
        Self::from_matrix(&QuatMatrix::from_fn(m.n(), |r, c| m.get(r, c) * k)).expect("n+1 >= 1")
    }

    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        self.to_matrix().sub(&rhs.to_matrix()).max_abs()
    }

    pub fn max_abs(&self) -> f64 {
        self.to_matrix().max_abs()
    }
}

/// The commutator `uv − vu` of the block matrices.
pub fn grade_bracket(u: &GradedElement, v: &GradedElement) -> Result<GradedElement> {
    if u.n() != v.n() {
        return Err(Error::DimensionMismatch {
            expected: u.n(),
            got: v.n(),
        });
    }
    GradedElement::from_matrix(&u.to_matrix().commutator(&v.to_matrix()))
}

/// `X·Υ(Y) + Y·Υ(X)`, the closed form of `{{X, Υ}, Y}`.
pub fn weyl_term_closed_form(x: &QuatVector, u: &QuatCovector, y: &QuatVector) -> Result<QuatVector> {
    let uy = u.eval(y)?;
    let ux = u.eval(x)?;
    Ok(&x.mul_right(uy) + &y.mul_right(ux))
}

/// The Weyl deformation term `{{X, Υ}, Y}` evaluated through the graded
/// bracket and cross-checked against the closed form
/// `X·Υ(Y) + Y·Υ(X)`; a gap above `1e-12` (relative to the magnitude)
/// is reported as an error.
pub fn weyl_term(x: &QuatVector, u: &QuatCovector, y: &QuatVector) -> Result<QuatVector> {
    let inner = grade_bracket(
        &GradedElement::from_vector(x.clone()),
        &GradedElement::from_covector(u.clone()),
    )?;
    let outer = grade_bracket(&inner, &GradedElement::from_vector(y.clone()))?;
    let stray = outer.project(0).max_abs().max(outer.project(1).max_abs());
    let closed = weyl_term_closed_form(x, u, y)?;
    let scale = 1.0 + closed.max_abs_diff(&QuatVector::zeros(closed.n()));
    let gap = outer.x.max_abs_diff(&closed).max(stray);
    if gap > 1e-12 * scale {
        return Err(Error::SolverDisagreement(format!(
            "bracket and closed-form Weyl terms differ by {gap:.3e}"
        )));
    }
    Ok(outer.x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{gaussian, seeded, SeededRng};

    fn rq(rng: &mut SeededRng) -> Quaternion {
        Quaternion::new(gaussian(rng), gaussian(rng), gaussian(rng), gaussian(rng))
    }

    fn random_element(rng: &mut SeededRng, n: usize) -> GradedElement {
        GradedElement {
            a: rq(rng),
            z: QuatCovector((0..n).map(|_| rq(rng)).collect()),
            x: QuatVector((0..n).map(|_| rq(rng)).collect()),
            block: QuatMatrix::from_fn(n, |_, _| rq(rng)),
        }
    }

    /// Plain 2×2 block multiplication for n = 1, written out by hand.
    fn block_product_n1(u: [Quaternion; 4], v: [Quaternion; 4]) -> [Quaternion; 4] {
        // [a Z; X A]
        let [a, z, x, m] = u;
        let [b, w, y, n] = v;
        [a * b + z * y, a * w + z * n, x * b + m * y, x * w + m * n]
    }

    #[test]
    fn lower_blocks_commute() {
        let mut rng = seeded(1);
        let x = GradedElement::from_vector(QuatVector(vec![rq(&mut rng), rq(&mut rng)]));
        let y = GradedElement::from_vector(QuatVector(vec![rq(&mut rng), rq(&mut rng)]));
        let b = grade_bracket(&x, &y).unwrap();
        assert_eq!(b.max_abs(), 0.0);
    }

    #[test]
    fn vector_covector_bracket_is_grade_zero() {
        let x = GradedElement::from_vector(QuatVector(vec![Quaternion::ONE]));
        let z = GradedElement::from_covector(QuatCovector(vec![Quaternion::ONE]));
        let b = grade_bracket(&x, &z).unwrap();
        assert_eq!(b.a, -Quaternion::ONE);
        assert_eq!(b.block.get(0, 0), Quaternion::ONE);
        assert_eq!(b.x, QuatVector::zeros(1));
        assert_eq!(b.z, QuatCovector::zeros(1));

        // oracle: uv - vu by hand
        let mut rng = seeded(5);
        let (xq, zq) = (rq(&mut rng), rq(&mut rng));
        let u = [Quaternion::ZERO, Quaternion::ZERO, xq, Quaternion::ZERO];
        let v = [Quaternion::ZERO, zq, Quaternion::ZERO, Quaternion::ZERO];
        let uv = block_product_n1(u, v);
        let vu = block_product_n1(v, u);
        let b = grade_bracket(
            &GradedElement::from_vector(QuatVector(vec![xq])),
            &GradedElement::from_covector(QuatCovector(vec![zq])),
        )
        .unwrap();
        assert!(b.a.max_abs_diff(uv[0] - vu[0]) < 1e-14);
        assert!(b.block.get(0, 0).max_abs_diff(uv[3] - vu[3]) < 1e-14);
    }

    #[test]
    fn grade_zero_acts_on_grade_minus_one() {
        let mut rng = seeded(9);
        for n in 1..=3 {
            let g0 = random_element(&mut rng, n).project(0);
            let x = random_element(&mut rng, n).project(-1);
            let b = grade_bracket(&g0, &x).unwrap();
            assert!(b.project(0).max_abs() == 0.0);
            assert!(b.project(1).max_abs() == 0.0);
            // A X - X a
            for r in 0..n {
                let mut expect = Quaternion::ZERO;
                for c in 0..n {
                    expect += g0.block.get(r, c) * x.x.0[c];
                }
                expect = expect - x.x.0[r] * g0.a;
                assert!(b.x.0[r].max_abs_diff(expect) < 1e-12);
            }
        }
    }

    #[test]
    fn grades_add_under_bracket() {
        let mut rng = seeded(2);
        for _ in 0..20 {
            let u = random_element(&mut rng, 2);
            let v = random_element(&mut rng, 2);
            for i in -1..=1 {
                for j in -1..=1 {
                    let b = grade_bracket(&u.project(i), &v.project(j)).unwrap();
                    for g in -1..=1 {
                        if g != i + j {
                            assert!(b.project(g).max_abs() < 1e-12, "grades {i},{j} leaked into {g}");
                        }
                    }
                }
            }
            let sum = u.project(-1).add(&u.project(0)).add(&u.project(1));
            assert_eq!(sum.max_abs_diff(&u), 0.0);
        }
    }

    #[test]
    fn bracket_is_antisymmetric_and_satisfies_jacobi() {
        let mut rng = seeded(4);
        for _ in 0..50 {
            let (a, b, c) = (
                random_element(&mut rng, 2),
                random_element(&mut rng, 2),
                random_element(&mut rng, 2),
            );
            let ab = grade_bracket(&a, &b).unwrap();
            let ba = grade_bracket(&b, &a).unwrap();
            assert!(ab.add(&ba).max_abs() < 1e-10);
            let j1 = grade_bracket(&a, &grade_bracket(&b, &c).unwrap()).unwrap();
            let j2 = grade_bracket(&b, &grade_bracket(&c, &a).unwrap()).unwrap();
            let j3 = grade_bracket(&c, &grade_bracket(&a, &b).unwrap()).unwrap();
            assert!(j1.add(&j2).add(&j3).max_abs() < 1e-10);
        }
    }

    #[test]
    fn weyl_term_examples() {
        let one = QuatVector(vec![Quaternion::ONE]);
        let i = QuatVector(vec![Quaternion::I]);
        let z1 = QuatCovector(vec![Quaternion::ONE]);
        let zj = QuatCovector(vec![Quaternion::J]);
        assert_eq!(weyl_term(&one, &z1, &one).unwrap().0[0], Quaternion::real(2.0));
        assert_eq!(weyl_term(&i, &z1, &i).unwrap().0[0], Quaternion::real(-2.0));
        assert_eq!(weyl_term(&one, &zj, &one).unwrap().0[0], Quaternion::J * 2.0);
    }

    #[test]
    fn weyl_term_diagonal_is_twice_x_upsilon_x() {
        let mut rng = seeded(8);
        for _ in 0..100 {
            let x = QuatVector((0..3).map(|_| rq(&mut rng)).collect());
            let u = QuatCovector((0..3).map(|_| rq(&mut rng)).collect());
            let w = weyl_term(&x, &u, &x).unwrap();
            let expect = x.mul_right(u.eval(&x).unwrap() * 2.0);
            assert!(w.max_abs_diff(&expect) < 1e-12);
        }
    }

    #[test]
    fn mismatched_sizes_rejected() {
        assert!(grade_bracket(&GradedElement::zero(1), &GradedElement::zero(2)).is_err());
        assert!(weyl_term(&QuatVector::zeros(1), &QuatCovector::zeros(2), &QuatVector::zeros(1)).is_err());
    }
}
