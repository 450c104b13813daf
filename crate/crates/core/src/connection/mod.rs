//! Connections on flat charts, curve integration and planarity tests.
//!
//! A connection is stored through its coefficients `Γ[i][j][k]`, the `e_k`
//! component of `∇_{e_i} e_j`; for a curve the covariant acceleration is
//! `c̈ + Γ(c)(ċ, ċ)`.

mod curve;
mod integrate;
mod maps;
mod planarity;

use std::borrow::Cow;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::planar::SymTensor;
use crate::quaternion::{weyl_term, QuatCovector, QuatVector};

pub use curve::{ClosedFormCurve, Curve, CurveFn, Jet, SampledCurve};
pub use integrate::{integrate_geodesic, integrate_planar_curve, rk4_second_order};
pub use maps::{check_planar_map, ChartMap, CurveBatch, LinearMap, PlanarMapReport, MAP_TOL};
pub use planarity::{
    planarity_residual, quaternion_coefficient, solve_upsilon_along, NodeResidual,
    PlanarityReport, UpsilonAlong, PLANARITY_TOL,
};

/// Connection coefficients at one point (not necessarily symmetric).
#[derive(Clone, Debug, PartialEq)]
pub struct Christoffel {
    dim: usize,
    coeffs: Vec<f64>,
}

impl Christoffel {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            coeffs: vec![0.0; dim * dim * dim],
        }
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize, usize) -> f64) -> Self {
        let mut c = Self::zero(dim);
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    c.coeffs[(i * dim + j) * dim + k] = f(i, j, k);
                }
            }
        }
        c
    }

    pub fn from_sym(p: &SymTensor) -> Self {
        Self {
            dim: p.dim(),
            coeffs: p.coeffs().to_vec(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.coeffs[(i * self.dim + j) * self.dim + k]
    }

    /// `Γ(X, Y) = Σ X_i Y_j Γ[i][j][·]`.
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

    pub fn symmetric_part(&self) -> SymTensor {
        SymTensor::from_fn(self.dim, |i, j, k| self.get(i, j, k))
    }

    pub fn max_asymmetry(&self) -> f64 {
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    worst = worst.max((self.get(i, j, k) - self.get(j, i, k)).abs());
                }
            }
        }
        worst
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

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&Self {
            dim: other.dim,
            coeffs: other.coeffs.iter().map(|v| -v).collect(),
        })
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|v| *v == 0.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ConnectionKind {
    Flat,
    Weyl(QuatCovector),
    Explicit,
}

pub type ChristoffelField = Arc<dyn Fn(&Vector) -> Christoffel + Send + Sync>;

#[derive(Clone)]
enum Field {
    Constant(Christoffel),
    Varying(ChristoffelField),
}

#[derive(Clone)]
pub struct Connection {
    dim: usize,
    kind: ConnectionKind,
    field: Field,
    torsion_free: bool,
}

impl fmt::Debug for Connection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Connection")
            .field("dim", &self.dim)
            .field("kind", &self.kind)
            .field("constant", &self.is_constant())
            .field("torsion_free", &self.torsion_free)
            .finish()
    }
}

impl Connection {
    pub fn flat(dim: usize) -> Self {
        Self {
            dim,
            kind: ConnectionKind::Flat,
            field: Field::Constant(Christoffel::zero(dim)),
            torsion_free: true,
        }
    }

    /// Constant coefficients; the torsion-free flag is read off the symmetry.
    pub fn constant(gamma: Christoffel) -> Self {
        let torsion_free = gamma.max_asymmetry() == 0.0;
        Self {
            dim: gamma.dim(),
            kind: ConnectionKind::Explicit,
            field: Field::Constant(gamma),
            torsion_free,
        }
    }

    /// Flat connection deformed by a constant symmetric tensor, `∇ + P`.
    pub fn flat_plus(p: &SymTensor) -> Self {
        Self::constant(Christoffel::from_sym(p))
    }

    /// A point-dependent coefficient field. `torsion_free` is trusted.
    pub fn varying(dim: usize, field: ChristoffelField, torsion_free: bool) -> Self {
        Self {
            dim,
            kind: ConnectionKind::Explicit,
            field: Field::Varying(field),
            torsion_free,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &ConnectionKind {
        &self.kind
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.field, Field::Constant(_))
    }

    pub fn is_torsion_free(&self) -> bool {
        self.torsion_free
    }

    pub fn christoffel_at(&self, x: &Vector) -> Cow<'_, Christoffel> {
        match &self.field {
            Field::Constant(c) => Cow::Borrowed(c),
            Field::Varying(f) => Cow::Owned(f(x)),
        }
    }

    /// `Γ(x)(v, v)`.
    pub fn quadratic_term(&self, x: &Vector, v: &Vector) -> Vector {
        match (&self.kind, &self.field) {
            (ConnectionKind::Flat, _) => Vector::zeros(self.dim),
            (_, Field::Constant(c)) => c.eval(v, v),
            (_, Field::Varying(f)) => f(x).eval(v, v),
        }
    }
}

/// The constant connection on `R^{4n}` with `Γ(X, Y) = {{X, Υ}, Y}`.
pub fn weyl_connection(upsilon: &QuatCovector, n: usize) -> Result<Connection> {
    if upsilon.n() != n {
        return Err(Error::DimensionMismatch { expected: n, got: upsilon.n() });
    }
    let d = 4 * n;
    let basis = |i: usize| {
        QuatVector::from_real(Vector::from_fn(d, |r, _| if r == i { 1.0 } else { 0.0 }).as_slice())
    };
    let mut columns = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            columns.push(weyl_term(&basis(i)?, upsilon, &basis(j)?)?.to_real());
        }
    }
    let gamma = Christoffel::from_fn(d, |i, j, k| columns[i * d + j][k]);
    Ok(Connection {
        dim: d,
        kind: ConnectionKind::Weyl(upsilon.clone()),
        torsion_free: gamma.max_asymmetry() == 0.0,
        field: Field::Constant(gamma),
    })
}

/// `Sym(Γ_1 − Γ_2)` at a point; torsion parts cancel.
pub fn symmetrized_difference(c1: &Connection, c2: &Connection, x: &Vector) -> Result<SymTensor> {
    if c1.dim() != c2.dim() {
        return Err(Error::DimensionMismatch { expected: c1.dim(), got: c2.dim() });
    }
    if x.len() != c1.dim() {
        return Err(Error::DimensionMismatch { expected: c1.dim(), got: x.len() });
    }
    Ok(c1.christoffel_at(x).sub(&c2.christoffel_at(x))?.symmetric_part())
}

/// `c̈(t) + Γ(c(t))(ċ(t), ċ(t))`.
pub fn covariant_acceleration(conn: &Connection, curve: &Curve, t: f64) -> Result<Vector> {
    if curve.dim() != conn.dim() {
        return Err(Error::DimensionMismatch { expected: conn.dim(), got: curve.dim() });
    }
    let jet = curve.jet(t)?;
    Ok(&jet.acceleration + conn.quadratic_term(&jet.position, &jet.velocity))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planar::{make_a1, AStructure, OneFormList};
    use crate::rng::{gaussian_vector, seeded};

    fn random_covector(seed: u64, n: usize) -> QuatCovector {
        let mut rng = seeded(seed);
        QuatCovector::from_real(gaussian_vector(&mut rng, 4 * n).as_slice()).unwrap()
    }

    #[test]
    fn covariant_acceleration_examples() {
        let flat = Connection::flat(4);
        let line = Curve::closed_form(
            4,
            0.0,
            1.0,
            11,
            |t| Vector::from_vec(vec![t, 2.0 * t, 0.0, 1.0]),
            |_| Vector::from_vec(vec![1.0, 2.0, 0.0, 0.0]),
            |_| Vector::zeros(4),
        );
        assert_eq!(covariant_acceleration(&flat, &line, 0.5).unwrap(), Vector::zeros(4));

        let circle = Curve::closed_form(
            4,
            0.0,
            6.0,
            11,
            |t| Vector::from_vec(vec![t.cos(), t.sin(), 0.0, 0.0]),
            |t| Vector::from_vec(vec![-t.sin(), t.cos(), 0.0, 0.0]),
            |t| Vector::from_vec(vec![-t.cos(), -t.sin(), 0.0, 0.0]),
        );
        let t = 0.7;
        let acc = covariant_acceleration(&flat, &circle, t).unwrap();
        assert!((&acc + Vector::from_vec(vec![t.cos(), t.sin(), 0.0, 0.0])).amax() < 1e-15);

        let w0 = weyl_connection(&QuatCovector::zeros(1), 1).unwrap();
        assert_eq!(covariant_acceleration(&w0, &circle, t).unwrap(), acc);
        assert!(covariant_acceleration(&flat, &circle, 7.0).is_err());
    }

    #[test]
    fn weyl_connection_matches_weyl_term() {
        let u = random_covector(3, 2);
        let conn = weyl_connection(&u, 2).unwrap();
        assert!(conn.is_torsion_free());
        let gamma = conn.christoffel_at(&Vector::zeros(8));
        let mut rng = seeded(9);
        for _ in 0..100 {
            let x = gaussian_vector(&mut rng, 8);
            let y = gaussian_vector(&mut rng, 8);
            let direct = weyl_term(
                &QuatVector::from_real(x.as_slice()).unwrap(),
                &u,
                &QuatVector::from_real(y.as_slice()).unwrap(),
            )
            .unwrap()
            .to_real();
            assert!((gamma.eval(&x, &y) - direct).amax() < 1e-12);
        }
        let zero = weyl_connection(&QuatCovector::zeros(2), 2).unwrap();
        assert!(zero.christoffel_at(&Vector::zeros(8)).is_zero());
        assert!(weyl_connection(&u, 3).is_err());
    }

    #[test]
    fn weyl_difference_lies_in_quaternionic_prolongation() {
        let u = random_covector(5, 2);
        let conn = weyl_connection(&u, 2).unwrap();
        let p = symmetrized_difference(&conn, &Connection::flat(8), &Vector::zeros(8)).unwrap();
        let q = AStructure::quaternionic(2).unwrap();
        let dec = crate::planar::decompose_a1(&p, &q, 1).unwrap();
        assert!(dec.is_member());
        // X·Υ(Y) + Y·Υ(X) expands over 1, i, j, k: α_a(X) = 2·(component a of Υ(X)),
        // with the K-form carrying the sign of K = -R_k.
        let forms = dec.forms().unwrap();
        let mut rng = seeded(6);
        for _ in 0..10 {
            let x = gaussian_vector(&mut rng, 8);
            let ux = u.eval(&QuatVector::from_real(x.as_slice()).unwrap()).unwrap();
            let vals = forms.eval(&x);
            let expect = [2.0 * ux.w, 2.0 * ux.x, 2.0 * ux.y, -2.0 * ux.z];
            for (v, e) in vals.iter().zip(expect) {
                assert!((v - e).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn symmetrized_difference_ignores_torsion() {
        let q = AStructure::quaternionic(2).unwrap();
        let mut rng = seeded(2);
        let forms = OneFormList((0..4).map(|_| gaussian_vector(&mut rng, 8)).collect());
        let p = make_a1(&forms, &q).unwrap();
        let hat = Connection::flat_plus(&p);
        let flat = Connection::flat(8);
        let x = Vector::zeros(8);
        assert_eq!(symmetrized_difference(&flat, &flat, &x).unwrap(), SymTensor::zero(8));
        assert!(symmetrized_difference(&hat, &flat, &x).unwrap().max_abs_diff(&p) < 1e-15);

        let torsion = Christoffel::from_fn(8, |i, j, k| {
            let s = ((i * 64 + j * 8 + k) as f64).sin();
            let t = ((j * 64 + i * 8 + k) as f64).sin();
            s - t
        });
        let twisted = Connection::constant(Christoffel::from_sym(&p).add(&torsion).unwrap());
        assert!(!twisted.is_torsion_free());
        let diff = symmetrized_difference(&twisted, &flat, &x).unwrap();
        assert!(diff.max_abs_diff(&p) <= 1e-14);
    }

    #[test]
    fn varying_field_is_evaluated_pointwise() {
        let conn = Connection::varying(
            2,
            Arc::new(|x: &Vector| Christoffel::from_fn(2, |i, j, k| if i == j && j == k { x[0] } else { 0.0 })),
            true,
        );
        let v = Vector::from_vec(vec![1.0, 1.0]);
        assert_eq!(conn.quadratic_term(&Vector::from_vec(vec![3.0, 0.0]), &v).as_slice(), &[3.0, 3.0]);
        assert!(!conn.is_constant());
    }
}
