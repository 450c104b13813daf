use std::fs::File;
use std::io::BufReader;
use std::path::Path;
use std::time::Instant;

use serde_json::json;

use crate::connection::{
    covariant_acceleration, integrate_geodesic, integrate_planar_curve, planarity_residual,
    weyl_connection, Connection, Curve, SampledCurve,
};
use crate::error::{Error, Result};
use crate::io::{read_connection, read_curve_csv, read_structure, read_tensor};
use crate::linalg::Vector;
use crate::planar::{decompose_a1_with, make_a1, AStructure, DecomposeOptions, OneFormList};
use crate::quaternion::{QuatCovector, Quaternion};
use crate::rng::{child_seed, gaussian_vector, seeded, unit_vector};

use super::{Check, Report, ScenarioConfig};

/// Real Weyl parameter of the default geodesic run.
const LAMBDA: f64 = 0.3;

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path).map_err(|e| {
        Error::Config(format!("cannot open {}: {e}", path.display()))
    })?))
}

fn structure_for(config: &ScenarioConfig) -> Result<AStructure> {
    match &config.structure_file {
        Some(path) => read_structure(open(path)?),
        None => config.build_structure(config.structure),
    }
}

fn vector_arg(values: &Option<Vec<f64>>, d: usize, name: &str) -> Result<Option<Vector>> {
    match values {
        None => Ok(None),
        Some(v) if v.len() == d => Ok(Some(Vector::from_column_slice(v))),
        Some(v) => Err(Error::Config(format!("{name} has {} entries, expected {d}", v.len()))),
    }
}

/// Decomposes a tensor from `config.tensor`, or a random member of `A⁽¹⁾`
/// whose forms must be recovered.
pub fn run_decompose(config: &ScenarioConfig) -> Result<Report> {
    let started = Instant::now();
    let mut report = Report::new(config);
    let a = structure_for(config)?;
    let mut rng = seeded(config.seed);
    let (p, truth) = match &config.tensor {
        Some(path) => {
            let loaded = read_tensor(open(path)?)?;
            if loaded.was_symmetrized() {
                report.note(format!("input symmetrized, asymmetry {:e}", loaded.asymmetry));
            }
            (loaded.tensor, None)
        }
        None => {
            let forms = OneFormList((0..a.len()).map(|_| gaussian_vector(&mut rng, a.dim())).collect());
            report.note("random round-trip tensor");
            (make_a1(&forms, &a)?, Some(forms))
        }
    };
    if p.dim() != a.dim() {
        return Err(Error::Config(format!("tensor has dim {}, structure has dim {}", p.dim(), a.dim())));
    }
    let opts = DecomposeOptions { tolerance: config.tol_alg, ..DecomposeOptions::default() };
    let result = decompose_a1_with(&p, &a, child_seed(&mut rng), &opts)?;
    report.check(Check::le("residual", result.residual(), config.tol_alg));
    if let (Some(truth), Some(forms)) = (&truth, result.forms()) {
        report.check(Check::le("coefficient_error", forms.max_abs_diff(truth), 1e-8));
    }
    report.data = json!({
        "member": result.is_member(),
        "residual": result.residual(),
        "forms": result.forms().map(|f| f.0.iter().map(|v| v.as_slice().to_vec()).collect::<Vec<_>>()),
    });
    Ok(report.finish(started))
}

fn closed_form_error(step: f64, t_max: f64) -> Result<f64> {
    let conn = weyl_connection(&QuatCovector(vec![Quaternion::real(LAMBDA)]), 1)?;
    let e0 = Vector::from_vec(vec![1.0, 0.0, 0.0, 0.0]);
    let c = integrate_geodesic(&conn, &Vector::zeros(4), &e0, t_max, step)?;
    let exact = (1.0 + 2.0 * LAMBDA * t_max).ln() / (2.0 * LAMBDA);
    let last = c.last().ok_or_else(|| Error::Degenerate("empty geodesic".into()))?;
    Ok((last[0] - exact).abs().max(last.rows(1, 3).amax()))
}

/// Integrates a geodesic and returns it along with its report. Without a
/// connection file this is the real Weyl geodesic `ln(1 + 2λt)/(2λ)`,
/// `λ = 0.3`, checked against the closed form.
pub fn geodesic_with_curve(config: &ScenarioConfig) -> Result<(Report, SampledCurve)> {
    let started = Instant::now();
    let mut report = Report::new(config);
    let default_case = config.connection.is_none();
    let conn = match &config.connection {
        Some(path) => read_connection(open(path)?)?,
        None => {
            let mut u = QuatCovector::zeros(config.n);
            u.0[0] = Quaternion::real(LAMBDA);
            weyl_connection(&u, config.n)?
        }
    };
    let d = conn.dim();
    let mut rng = seeded(config.seed);
    let x0 = vector_arg(&config.x0, d, "x0")?.unwrap_or_else(|| Vector::zeros(d));
    let v0 = match vector_arg(&config.v0, d, "v0")? {
        Some(v) => v,
        None if default_case => Vector::from_fn(d, |r, _| if r == 0 { 1.0 } else { 0.0 }),
        None => unit_vector(&mut rng, d),
    };
    let curve = integrate_geodesic(&conn, &x0, &v0, config.t_max, config.step)?;
    let as_curve = Curve::from(curve.clone());
    let mut worst: f64 = 0.0;
    for t in as_curve.report_times() {
        worst = worst.max(covariant_acceleration(&conn, &as_curve, t)?.norm());
    }
    let bound = config.tol_ode * (1.0 + v0.norm_squared());
    report.check(Check::le("max_covariant_acceleration", worst, bound));
    if default_case && config.x0.is_none() && config.v0.is_none() {
        let exact = (1.0 + 2.0 * LAMBDA * config.t_max).ln() / (2.0 * LAMBDA);
        let last = curve.last().ok_or_else(|| Error::Degenerate("empty geodesic".into()))?;
        report.check(Check::le("closed_form_error", (last[0] - exact).abs(), 1e-8));
        let coarse = closed_form_error(0.02, 1.0)?;
        let fine = closed_form_error(0.01, 1.0)?;
        report.check(Check::ge("convergence_order", (coarse / fine).log2(), 3.8));
    }
    report.data = json!({
        "dim": d,
        "nodes": curve.len(),
        "t_end": curve.t_end(),
        "end_point": curve.last().map(|v| v.as_slice().to_vec()),
    });
    Ok((report.finish(started), curve))
}

pub fn run_geodesic(config: &ScenarioConfig) -> Result<Report> {
    geodesic_with_curve(config).map(|(r, _)| r)
}

/// Planarity of a curve from `config.curve`, or of a freshly integrated
/// planar curve of the chosen structure.
pub fn run_planarity(config: &ScenarioConfig) -> Result<Report> {
    let started = Instant::now();
    let mut report = Report::new(config);
    let a = structure_for(config)?;
    let d = a.dim();
    let conn = match &config.connection {
        Some(path) => read_connection(open(path)?)?,
        None => Connection::flat(d),
    };
    if conn.dim() != d {
        return Err(Error::Config(format!("connection has dim {}, structure has dim {d}", conn.dim())));
    }
    let mut rng = seeded(config.seed);
    let curve = match &config.curve {
        Some(path) => read_curve_csv(open(path)?)?,
        None => {
            let x0 = vector_arg(&config.x0, d, "x0")?.unwrap_or_else(|| gaussian_vector(&mut rng, d));
            let v0 = vector_arg(&config.v0, d, "v0")?.unwrap_or_else(|| unit_vector(&mut rng, d));
            let coeffs: Vec<f64> = (0..a.len()).map(|_| 0.5 * gaussian_vector(&mut rng, 1)[0]).collect();
            report.note("random planar curve with constant coefficients");
            integrate_planar_curve(&conn, &a, &x0, &v0, |_| coeffs.clone(), config.t_max, config.step)?
        }
    };
    if curve.dim() != d {
        return Err(Error::Config(format!("curve has dim {}, structure has dim {d}", curve.dim())));
    }
    let r = planarity_residual(&conn, &a, &Curve::from(curve))?;
    report.check(Check::le("max_residual", r.max_residual, config.tol_ode));
    if r.degenerate_nodes > 0 {
        report.note(format!("{} nodes with vanishing velocity were skipped", r.degenerate_nodes));
    }
    report.data = json!({
        "nodes": r.nodes.len(),
        "degenerate_nodes": r.degenerate_nodes,
        "residuals": r.nodes.iter().map(|n| n.residual).collect::<Vec<_>>(),
    });
    Ok(report.finish(started))
}
