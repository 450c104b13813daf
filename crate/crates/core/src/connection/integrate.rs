use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::planar::AStructure;

use super::{Connection, SampledCurve};

fn step_count(t_max: f64, step: f64) -> Result<usize> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {step}")));
    }
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::InvalidArgument(format!("t_max must be positive, got {t_max}")));
    }
    let ratio = t_max / step;
    let nearest = ratio.round();
    let count = if (ratio - nearest).abs() <= 1e-9 * ratio { nearest } else { ratio.ceil() };
    Ok((count as usize).max(1))
}

/// Classical RK4 for `ẍ = accel(t, x, ẋ)` on `[0, t_max]`. The step is
/// shrunk slightly if needed so the grid ends exactly at `t_max`.
pub fn rk4_second_order(
    x0: &Vector,
    v0: &Vector,
    t_max: f64,
    step: f64,
    accel: impl Fn(f64, &Vector, &Vector) -> Vector,
) -> Result<SampledCurve> {
    if x0.len() != v0.len() {
        return Err(Error::DimensionMismatch { expected: x0.len(), got: v0.len() });
    }
    let steps = step_count(t_max, step)?;
    let h = t_max / steps as f64;
    let mut x = x0.clone();
    let mut v = v0.clone();
    let mut points = Vec::with_capacity(steps + 1);
    points.push(x.clone());
    for s in 0..steps {
        let t = s as f64 * h;
        let k1x = v.clone();
        let k1v = accel(t, &x, &v);
        let x2 = &x + &k1x * (0.5 * h);
        let v2 = &v + &k1v * (0.5 * h);
        let k2v = accel(t + 0.5 * h, &x2, &v2);
        let x3 = &x + &v2 * (0.5 * h);
        let v3 = &v + &k2v * (0.5 * h);
        let k3v = accel(t + 0.5 * h, &x3, &v3);
        let x4 = &x + &v3 * h;
        let v4 = &v + &k3v * h;
        let k4v = accel(t + h, &x4, &v4);

        let next_x = &x + (k1x + &v2 * 2.0 + &v3 * 2.0 + &v4) * (h / 6.0);
        let next_v = &v + (k1v + k2v * 2.0 + k3v * 2.0 + k4v) * (h / 6.0);
        if next_x.iter().chain(next_v.iter()).any(|c| !c.is_finite() || c.abs() > 1e150) {
            return Err(Error::BlowUp { t_last: t });
        }
        x = next_x;
        v = next_v;
        points.push(x.clone());
    }
    SampledCurve::new(0.0, h, points)
}

/// Geodesic `ẍ = −Γ(x)(ẋ, ẋ)` from `(x0, v0)`.
pub fn integrate_geodesic(
    conn: &Connection,
    x0: &Vector,
    v0: &Vector,
    t_max: f64,
    step: f64,
) -> Result<SampledCurve> {
    if x0.len() != conn.dim() {
        return Err(Error::DimensionMismatch { expected: conn.dim(), got: x0.len() });
    }
    rk4_second_order(x0, v0, t_max, step, |_, x, v| -conn.quadratic_term(x, v))
}

/// Planar curve `ẍ = −Γ(x)(ẋ, ẋ) + Σ q_i(t) F_i(ẋ)` for a prescribed
/// coefficient curve `q`.
pub fn integrate_planar_curve(
    conn: &Connection,
    a: &AStructure,
    x0: &Vector,
    v0: &Vector,
    q: impl Fn(f64) -> Vec<f64>,
    t_max: f64,
    step: f64,
) -> Result<SampledCurve> {
    if x0.len() != conn.dim() || a.dim() != conn.dim() {
        return Err(Error::DimensionMismatch { expected: conn.dim(), got: x0.len().min(a.dim()) });
    }
    let probe = q(0.0);
    if probe.len() != a.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), got: probe.len() });
    }
    rk4_second_order(x0, v0, t_max, step, |t, x, v| {
        let coeffs = q(t);
        a.affinors()
            .iter()
            .zip(&coeffs)
            .fold(-conn.quadratic_term(x, v), |acc, (f, c)| acc + (f * v) * *c)
    })
}
