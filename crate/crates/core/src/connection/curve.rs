use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::Vector;

pub type CurveFn = Arc<dyn Fn(f64) -> Vector + Send + Sync>;

/// Position, velocity and acceleration of a curve at one parameter value.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    pub t: f64,
    pub position: Vector,
    pub velocity: Vector,
    pub acceleration: Vector,
}

/// A curve given by exact callables, evaluated on `nodes` uniform points of
/// `[t_start, t_end]` when a report is built.
#[derive(Clone)]
pub struct ClosedFormCurve {
    pub dim: usize,
    pub t_start: f64,
    pub t_end: f64,
    pub nodes: usize,
    pub position: CurveFn,
    pub velocity: CurveFn,
    pub acceleration: CurveFn,
}

impl fmt::Debug for ClosedFormCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ClosedFormCurve")
            .field("dim", &self.dim)
            .field("t_start", &self.t_start)
            .field("t_end", &self.t_end)
            .field("nodes", &self.nodes)
            .finish_non_exhaustive()
    }
}

/// A curve sampled on the uniform grid `t_k = t_start + k·step`.
/// Derivatives are second-order central differences on interior nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledCurve {
    pub t_start: f64,
    pub step: f64,
    pub points: Vec<Vector>,
}

impl SampledCurve {
    pub fn new(t_start: f64, step: f64, points: Vec<Vector>) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::InvalidArgument(format!("grid step must be positive, got {step}")));
        }
        if let Some(first) = points.first() {
            if let Some(bad) = points.iter().find(|p| p.len() != first.len()) {
                return Err(Error::DimensionMismatch { expected: first.len(), got: bad.len() });
            }
        }
        Ok(Self { t_start, step, points })
    }

    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, |p| p.len())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t_start + k as f64 * self.step
    }

    pub fn t_end(&self) -> f64 {
        self.time(self.points.len().saturating_sub(1))
    }

    pub fn last(&self) -> Option<&Vector> {
        self.points.last()
    }

    /// Jet at interior node `k` from central differences.
    pub fn jet_at(&self, k: usize) -> Result<Jet> {
        if k == 0 || k + 1 >= self.points.len() {
            return Err(Error::BoundaryNode { t: self.time(k) });
        }
        let h = self.step;
        let (prev, here, next) = (&self.points[k - 1], &self.points[k], &self.points[k + 1]);
        Ok(Jet {
            t: self.time(k),
            position: here.clone(),
            velocity: (next - prev) / (2.0 * h),
            acceleration: (next - here * 2.0 + prev) / (h * h),
        })
    }

    /// Applies `f` to every node, keeping the grid.
    pub fn map_points(&self, f: impl Fn(&Vector) -> Vector) -> Self {
        Self {
            t_start: self.t_start,
            step: self.step,
            points: self.points.iter().map(f).collect(),
        }
    }
}

#[derive(Clone, Debug)]
pub enum Curve {
    ClosedForm(ClosedFormCurve),
    Sampled(SampledCurve),
}

impl From<SampledCurve> for Curve {
    fn from(c: SampledCurve) -> Self {
        Curve::Sampled(c)
    }
}

impl Curve {
    pub fn closed_form(
        dim: usize,
        t_start: f64,
        t_end: f64,
        nodes: usize,
        position: impl Fn(f64) -> Vector + Send + Sync + 'static,
        velocity: impl Fn(f64) -> Vector + Send + Sync + 'static,
        acceleration: impl Fn(f64) -> Vector + Send + Sync + 'static,
    ) -> Self {
        Curve::ClosedForm(ClosedFormCurve {
            dim,
            t_start,
            t_end,
            nodes,
            position: Arc::new(position),
            velocity: Arc::new(velocity),
            acceleration: Arc::new(acceleration),
        })
    }

    pub fn dim(&self) -> usize {
        match self {
            Curve::ClosedForm(c) => c.dim,
            Curve::Sampled(s) => s.dim(),
        }
    }

    /// Parameter values at which reports are evaluated: the uniform grid of a
    /// closed-form curve, or the interior nodes of a sampled one.
    pub fn report_times(&self) -> Vec<f64> {
        match self {
            Curve::ClosedForm(c) => {
                if c.nodes <= 1 {
                    return vec![c.t_start; c.nodes];
                }
                let h = (c.t_end - c.t_start) / (c.nodes - 1) as f64;
                (0..c.nodes).map(|k| c.t_start + k as f64 * h).collect()
            }
            Curve::Sampled(s) => (1..s.len().saturating_sub(1)).map(|k| s.time(k)).collect(),
        }
    }

    pub fn jet(&self, t: f64) -> Result<Jet> {
        match self {
            Curve::ClosedForm(c) => {
                let slack = 1e-12 * (1.0 + c.t_end.abs().max(c.t_start.abs()));
                if !(t >= c.t_start - slack && t <= c.t_end + slack) {
                    return Err(Error::InvalidArgument(format!(
                        "t = {t} outside [{}, {}]",
                        c.t_start, c.t_end
                    )));
                }
                Ok(Jet {
                    t,
                    position: (c.position)(t),
                    velocity: (c.velocity)(t),
                    acceleration: (c.acceleration)(t),
                })
            }
            Curve::Sampled(s) => {
                let pos = (t - s.t_start) / s.step;
                let k = pos.round();
                if !(k.is_finite() && (pos - k).abs() <= 1e-6 && k >= 0.0) {
                    return Err(Error::BoundaryNode { t });
                }
                s.jet_at(k as usize)
            }
        }
    }

    /// Samples a closed-form curve on its grid; sampled curves are cloned.
    pub fn to_sampled(&self) -> Result<SampledCurve> {
        match self {
            Curve::Sampled(s) => Ok(s.clone()),
            Curve::ClosedForm(c) => {
                if c.nodes < 2 {
                    return Err(Error::InvalidArgument("need at least 2 nodes to sample".into()));
                }
                let times = self.report_times();
                let step = times[1] - times[0];
                SampledCurve::new(c.t_start, step, times.iter().map(|&t| (c.position)(t)).collect())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn central_differences_are_exact_on_quadratics() {
        let points = (0..6)
            .map(|k| {
                let t = 0.1 * k as f64;
                Vector::from_vec(vec![t * t, 3.0 * t])
            })
            .collect();
        let c = SampledCurve::new(0.0, 0.1, points).unwrap();
        let j = c.jet_at(2).unwrap();
        assert!((j.velocity[0] - 0.4).abs() < 1e-12);
        assert!((j.acceleration[0] - 2.0).abs() < 1e-10);
        assert!((j.velocity[1] - 3.0).abs() < 1e-12);
        assert!(matches!(c.jet_at(0), Err(Error::BoundaryNode { .. })));
        assert!(matches!(c.jet_at(5), Err(Error::BoundaryNode { .. })));

        let curve = Curve::from(c);
        assert_eq!(curve.report_times().len(), 4);
        assert!(curve.jet(0.2).is_ok());
        assert!(matches!(curve.jet(0.25), Err(Error::BoundaryNode { .. })));
        assert!(matches!(curve.jet(0.5), Err(Error::BoundaryNode { .. })));
    }

    #[test]
    fn closed_form_sampling() {
        let c = Curve::closed_form(
            1,
            0.0,
            1.0,
            5,
            |t| Vector::from_vec(vec![t]),
            |_| Vector::from_vec(vec![1.0]),
            |_| Vector::from_vec(vec![0.0]),
        );
        let s = c.to_sampled().unwrap();
        assert_eq!(s.len(), 5);
        assert!((s.step - 0.25).abs() < 1e-15);
        assert!(SampledCurve::new(0.0, 0.0, vec![]).is_err());
    }
}
