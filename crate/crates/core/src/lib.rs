//! Numerical laboratory for generalized planar curves on flat quaternionic
//! charts.
//!
//! The crate is organised bottom-up:
//!
//! * [`quaternion`]: Hamilton quaternions, the right-action affinor triple
//!   `(I, J, K)` on `R^{4n}`, `Sp(1)` rotations of triples and the graded
//!   algebra `g_{-1} + g_0 + g_1` with the Weyl deformation term.
//! * [`exterior`]: sparse multivectors, wedge/pairing, the normalization map
//!   `chi`, the frame form `tau` and pointwise coefficient extraction.
//! * [`planar`]: `A`-structures, hulls, generic rank, polarization and the
//!   decision procedure for membership in `A^(1)`.
//! * [`connection`]: constant and varying connections, RK4 integration of
//!   geodesics and planar curves, planarity residuals and map checks.
//! * [`scenario`]: seeded, reproducible experiment scenarios with JSON
//!   reports, used by the `hplanar` binary.

pub mod connection;
pub mod error;
pub mod exterior;
pub mod io;
pub mod linalg;
pub mod planar;
pub mod quaternion;
pub mod rng;
pub mod scenario;

pub use connection::{
    check_planar_map, covariant_acceleration, integrate_geodesic, integrate_planar_curve,
    planarity_residual, solve_upsilon_along, symmetrized_difference, weyl_connection,
    Christoffel, Connection, Curve, PlanarityReport,
};
pub use error::{Error, Result};
pub use exterior::{chi, extract_alphas, pair, tau, Multivector, Variance};
pub use linalg::{Matrix, Vector};
pub use planar::{
    decompose_a1, generic_rank_check, hull, hull_inclusion, make_a1, polarize, A1Decomposition,
    AStructure, OneFormList, SymTensor,
};
pub use quaternion::{
    grade_bracket, is_quaternionic_linear, make_affinor_triple, quat_mul, weyl_term,
    AffinorTriple, GradedElement, QuatCovector, QuatVector, Quaternion,
};
pub use scenario::{Report, ScenarioConfig, ScenarioId};
