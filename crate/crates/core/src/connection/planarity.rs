use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{lstsq, Vector};
use crate::planar::AStructure;
use crate::quaternion::{weyl_term, QuatCovector, QuatVector, Quaternion};

use super::{Connection, Curve};

/// Default bound for ODE-level planarity checks.
pub const PLANARITY_TOL: f64 = 1e-6;

const VANISHING_SPEED: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NodeResidual {
    pub t: f64,
    /// `None` when the velocity vanishes and the hull degenerates.
    pub residual: Option<f64>,
    /// Least-squares coefficients of the covariant acceleration in the frame
    /// `F_0(ċ), …, F_{ℓ-1}(ċ)`.
    pub coefficients: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlanarityReport {
    pub nodes: Vec<NodeResidual>,
    pub max_residual: f64,
    pub degenerate_nodes: usize,
}

impl PlanarityReport {
    pub fn is_planar(&self, tolerance: f64) -> bool {
        self.max_residual <= tolerance
    }

    pub fn min_residual(&self) -> f64 {
        self.nodes
            .iter()
            .filter_map(|n| n.residual)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Per-node distance of `∇_ċ ċ` to the hull `A(ċ)`, normalized by
/// `max(‖∇_ċ ċ‖, ‖ċ‖²)`. Nodes with vanishing velocity are flagged and left
/// out of the aggregate.
pub fn planarity_residual(conn: &Connection, a: &AStructure, curve: &Curve) -> Result<PlanarityReport> {
    if conn.dim() != a.dim() || curve.dim() != a.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: curve.dim() });
    }
    if let Curve::Sampled(s) = curve {
        if s.len() < 5 {
            return Err(Error::InvalidArgument(format!(
                "sampled curve needs at least 5 nodes, got {}",
                s.len()
            )));
        }
    }
    let mut nodes = Vec::new();
    let mut max_residual: f64 = 0.0;
    let mut degenerate_nodes = 0;
    for t in curve.report_times() {
        let jet = curve.jet(t)?;
        let acc = &jet.acceleration + conn.quadratic_term(&jet.position, &jet.velocity);
        let speed = jet.velocity.norm();
        if !(speed > VANISHING_SPEED) {
            degenerate_nodes += 1;
            nodes.push(NodeResidual { t, residual: None, coefficients: vec![0.0; a.len()] });
            continue;
        }
        let frame = a.frame_matrix(&jet.velocity);
        let coeffs = lstsq(&frame, &acc, a.tolerance());
        let scale = acc.norm().max(speed * speed);
        let residual = (&acc - &frame * &coeffs).norm() / scale;
        max_residual = max_residual.max(residual);
        nodes.push(NodeResidual {
            t,
            residual: Some(residual),
            coefficients: coeffs.iter().copied().collect(),
        });
    }
    Ok(PlanarityReport { nodes, max_residual, degenerate_nodes })
}

/// Converts frame coefficients for `⟨E, I, J, K⟩` into the quaternion `q`
/// with `Σ c_a F_a(v) = v·q`. Since `K(v) = −v·k` the last sign flips.
pub fn quaternion_coefficient(coefficients: &[f64]) -> Result<Quaternion> {
    match coefficients {
        [w, x, y, z] => Ok(Quaternion::new(*w, *x, *y, -*z)),
        other => Err(Error::DimensionMismatch { expected: 4, got: other.len() }),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct UpsilonAlong {
    /// `(t, Υ_t)` for every reported node.
    pub nodes: Vec<(f64, QuatCovector)>,
    /// Largest `‖∇̂_ċ ċ‖ / max(‖c̈‖, ‖ċ‖²)` with `∇̂` the Weyl connection of
    /// `Υ_t` frozen at the node.
    pub max_deformed_acceleration: f64,
}

/// Chooses `Υ_t = (−q(t)/2)·ċ*/‖ċ‖²` along an `H`-planar curve so that the
/// Weyl connection of `Υ_t` has vanishing covariant acceleration at `t`.
///
/// `report` must come from [`planarity_residual`] against the flat connection
/// and the standard quaternionic structure `⟨E, I, J, K⟩`.
pub fn solve_upsilon_along(curve: &Curve, report: &PlanarityReport) -> Result<UpsilonAlong> {
    if !curve.dim().is_multiple_of(4) {
        return Err(Error::InvalidArgument("curve dimension is not a multiple of 4".into()));
    }
    if !(report.max_residual <= PLANARITY_TOL) {
        return Err(Error::NotPlanar { residual: report.max_residual });
    }
    let mut nodes = Vec::with_capacity(report.nodes.len());
    let mut worst: f64 = 0.0;
    for node in &report.nodes {
        if node.residual.is_none() {
            return Err(Error::VanishingVelocity { t: node.t });
        }
        let jet = curve.jet(node.t)?;
        let speed_sq = jet.velocity.norm_squared();
        if !(speed_sq.sqrt() > VANISHING_SPEED) {
            return Err(Error::VanishingVelocity { t: node.t });
        }
        let q = quaternion_coefficient(&node.coefficients)?;
        let v = QuatVector::from_real(jet.velocity.as_slice())?;
        let upsilon = v.conj_transpose().mul_left(q * -0.5).scale(1.0 / speed_sq);
        // Γ(v, v) of the constant Weyl connection is the Weyl term at (v, v)
        let deformed: Vector = &jet.acceleration + weyl_term(&v, &upsilon, &v)?.to_real();
        let scale = jet.acceleration.norm().max(speed_sq);
        worst = worst.max(deformed.norm() / scale);
        nodes.push((node.t, upsilon));
    }
    Ok(UpsilonAlong { nodes, max_deformed_acceleration: worst })
}
