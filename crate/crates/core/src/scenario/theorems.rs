use std::time::Instant;

use serde_json::json;

use crate::connection::{
    check_planar_map, integrate_geodesic, integrate_planar_curve, planarity_residual,
    solve_upsilon_along, symmetrized_difference, weyl_connection, Connection, Curve, CurveBatch,
    LinearMap, SampledCurve,
};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::planar::{
    decompose_a1_with, generic_rank_check, hull_inclusion, make_a1, AStructure, DecomposeOptions,
    OneFormList, SymTensor,
};
use crate::quaternion::{
    is_quaternionic_linear, left_matrix_multiplication, make_affinor_triple,
    right_multiplication_matrix, QuatCovector, QuatMatrix, Quaternion,
};
use crate::rng::{child_seed, gaussian, gaussian_matrix, gaussian_vector, seeded, uniform, unit_vector, SeededRng};

use super::{Check, Report, ScenarioConfig, StructureKind};

/// Residual a non-planar witness must reach.
const WITNESS_MIN: f64 = 0.01;
/// Scale of random Weyl covectors; keeps geodesics on `[0, 1]` away from blow-up.
const WEYL_SCALE: f64 = 0.3;
const MAX_ATTEMPTS: usize = 8;

fn max_of(values: &[f64]) -> f64 {
    values.iter().copied().fold(0.0, f64::max)
}

fn min_of(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::INFINITY, f64::min)
}

fn random_forms(rng: &mut SeededRng, ell: usize, d: usize) -> OneFormList {
    OneFormList((0..ell).map(|_| gaussian_vector(rng, d)).collect())
}

fn random_covector(rng: &mut SeededRng, n: usize, scale: f64) -> Result<QuatCovector> {
    QuatCovector::from_real((gaussian_vector(rng, 4 * n) * scale).as_slice())
}

fn batch(config: &ScenarioConfig, curves: usize) -> CurveBatch {
    CurveBatch { curves, t_max: config.t_max, step: config.step, speed: 1.0, q_amplitude: 0.5 }
}

fn require_generic(report: &mut Report, a: &AStructure, label: &str, seed: u64) -> Result<()> {
    if a.dim() < 2 * a.len() {
        return Err(Error::Config(format!(
            "dimension bound: {label} has d = {} < 2ℓ = {}",
            a.dim(),
            2 * a.len()
        )));
    }
    let rank = generic_rank_check(a, 200, seed)?;
    report.check(Check::ge(format!("{label}/generic_rank_fraction"), rank.fraction, 0.99));
    Ok(())
}

/// Integrates `accel`-driven curves from fresh random data until one stays
/// finite, halving the initial speed after each blow-up.
fn integrate_retrying(
    rng: &mut SeededRng,
    d: usize,
    mut attempt: impl FnMut(&mut SeededRng, &Vector, &Vector) -> Result<SampledCurve>,
) -> Result<SampledCurve> {
    let mut speed = 1.0;
    let mut last = None;
    for _ in 0..MAX_ATTEMPTS {
        let x0 = gaussian_vector(rng, d) * 0.5;
        let v0 = unit_vector(rng, d) * speed;
        match attempt(rng, &x0, &v0) {
            Ok(c) => return Ok(c),
            Err(e @ Error::BlowUp { .. }) => {
                last = Some(e);
                speed *= 0.5;
            }
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap_or(Error::BlowUp { t_last: 0.0 }))
}

/// Coefficients `q_i(t) = c_i + s_i sin(ω_i t + φ_i)`.
fn random_q(rng: &mut SeededRng, ell: usize, amplitude: f64) -> impl Fn(f64) -> Vec<f64> {
    let params: Vec<[f64; 4]> = (0..ell)
        .map(|_| {
            [
                uniform(rng, -amplitude, amplitude),
                uniform(rng, -amplitude, amplitude),
                uniform(rng, 0.5, 3.0),
                uniform(rng, 0.0, std::f64::consts::TAU),
            ]
        })
        .collect();
    move |t| params.iter().map(|[c, s, w, p]| c + s * (w * t + p).sin()).collect()
}

fn random_planar_curve(
    rng: &mut SeededRng,
    conn: &Connection,
    a: &AStructure,
    config: &ScenarioConfig,
) -> Result<SampledCurve> {
    integrate_retrying(rng, a.dim(), |rng, x0, v0| {
        let q = random_q(rng, a.len(), 0.5);
        integrate_planar_curve(conn, a, x0, v0, q, config.t_max, config.step)
    })
}

fn random_weyl_geodesic(rng: &mut SeededRng, n: usize, config: &ScenarioConfig) -> Result<SampledCurve> {
    integrate_retrying(rng, 4 * n, |rng, x0, v0| {
        let conn = weyl_connection(&random_covector(rng, n, WEYL_SCALE)?, n)?;
        integrate_geodesic(&conn, x0, v0, config.t_max, config.step)
    })
}

/// `cos t · e_0 + sin t · e_4`: the unit circle through two quaternionic slots.
fn cross_slot_circle(n: usize) -> Curve {
    let d = 4 * n;
    let embed = move |a: f64, b: f64| {
        let mut v = Vector::zeros(d);
        v[0] = a;
        v[4] = b;
        v
    };
    Curve::closed_form(
        d,
        0.1,
        1.4,
        60,
        move |t| embed(t.cos(), t.sin()),
        move |t| embed(-t.sin(), t.cos()),
        move |t| embed(-t.cos(), -t.sin()),
    )
}

fn structure_group_map(rng: &mut SeededRng, n: usize, left: bool) -> Result<Matrix> {
    let unit = Quaternion::from_array([gaussian(rng), gaussian(rng), gaussian(rng), gaussian(rng)])
        .normalized()
        .ok_or_else(|| Error::Degenerate("zero quaternion drawn".into()))?;
    let right = right_multiplication_matrix(unit, n);
    if !left {
        return Ok(right);
    }
    let l = QuatMatrix::from_fn(n, |r, c| {
        let g = Quaternion::from_array([gaussian(rng), gaussian(rng), gaussian(rng), gaussian(rng)]) * 0.5;
        if r == c { g + Quaternion::ONE } else { g }
    });
    Ok(left_matrix_multiplication(&l) * right)
}

/// Flat geodesics are planar for `∇ + P` when `P` is in `A⁽¹⁾`, and some
/// flat geodesic stops being planar once `P` leaves `A⁽¹⁾`.
pub fn run_thm25(config: &ScenarioConfig) -> Result<Report> {
    let started = Instant::now();
    let mut report = Report::new(config);
    let a = config.build_structure(config.structure)?;
    let (d, ell) = (a.dim(), a.len());
    let mut rng = seeded(config.seed);
    require_generic(&mut report, &a, config.structure.as_str(), child_seed(&mut rng))?;
    report.note(format!("{} structure on R^{d}, rank {ell}", config.structure.as_str()));

    let opts = DecomposeOptions { tolerance: config.tol_alg, ..DecomposeOptions::default() };
    let p = make_a1(&random_forms(&mut rng, ell, d), &a)?;
    let accepted = decompose_a1_with(&p, &a, child_seed(&mut rng), &opts)?;
    report.check(Check::le("forward_decompose_residual", accepted.residual(), config.tol_alg));
    let flat = Connection::flat(d);
    let hat = Connection::flat_plus(&p);
    let sym = symmetrized_difference(&hat, &flat, &Vector::zeros(d))?;
    report.check(Check::le("sym_difference_defect", sym.max_abs_diff(&p), config.tol_alg));

    let mut geodesics = Vec::with_capacity(config.samples);
    for _ in 0..config.samples {
        let x0 = gaussian_vector(&mut rng, d);
        let v0 = unit_vector(&mut rng, d);
        geodesics.push(Curve::from(integrate_geodesic(&flat, &x0, &v0, config.t_max, config.step)?));
    }
    let forward = geodesics
        .iter()
        .map(|g| planarity_residual(&hat, &a, g).map(|r| r.max_residual))
        .collect::<Result<Vec<_>>>()?;
    report.check(Check::le("forward_max_residual", max_of(&forward), config.tol_ode));

    let perturbed = p.add(&SymTensor::componentwise_cube(d))?;
    let rejected = decompose_a1_with(&perturbed, &a, child_seed(&mut rng), &opts)?;
    report.check(Check::flag("converse_rejected", !rejected.is_member()));
    report.check(Check::ge("converse_decompose_residual", rejected.residual(), config.tol_alg));
    let bent = Connection::flat_plus(&perturbed);
    let converse = geodesics
        .iter()
        .map(|g| planarity_residual(&bent, &a, g).map(|r| r.max_residual))
        .collect::<Result<Vec<_>>>()?;
    report.check(Check::ge("converse_witness_residual", max_of(&converse), WITNESS_MIN));
    report.data = json!({
        "dim": d,
        "rank": ell,
        "forward_residuals": forward,
        "converse_residuals": converse,
    });
    Ok(report.finish(started))
}

/// Identity maps between structures: planar when `A ⊆ B` and the deformation
/// is in `B⁽¹⁾`, and witnessed non-planar when `A ⊄ B`.
pub fn run_thm26(config: &ScenarioConfig) -> Result<Report> {
    use StructureKind::{Complex, Quaternionic};
    let started = Instant::now();
    let mut report = Report::new(config);
    let pairs = match config.structure_b {
        Some(b) => vec![(config.structure, b)],
        None => vec![(Complex, Quaternionic), (Quaternionic, Complex), (Quaternionic, Quaternionic)],
    };
    let mut rng = seeded(config.seed);
    let mut data = Vec::new();
    for (ka, kb) in pairs {
        let label = format!("{}->{}", ka.as_str(), kb.as_str());
        let a = config.build_structure(ka)?;
        let b = config.build_structure(kb)?;
        if a.dim() != b.dim() {
            return Err(Error::Config(format!("{label}: structures live on different dimensions")));
        }
        require_generic(&mut report, &a, &format!("{label}/A"), child_seed(&mut rng))?;
        require_generic(&mut report, &b, &format!("{label}/B"), child_seed(&mut rng))?;
        let d = a.dim();
        let inclusion = hull_inclusion(&a, &b, 50, child_seed(&mut rng), config.tol_alg)?;
        let conn_b = Connection::flat_plus(&make_a1(&random_forms(&mut rng, b.len(), d), &b)?);
        let identity = LinearMap(Matrix::identity(d, d));
        let map = check_planar_map(
            &identity,
            &Connection::flat(d),
            &a,
            &conn_b,
            &b,
            &batch(config, config.samples),
            child_seed(&mut rng),
        )?;
        report.check(Check::le(format!("{label}/source_residual"), map.max_source_residual, config.tol_ode));
        if inclusion.included {
            report.note(format!("{label}: A ⊆ B (defect {:e}), inclusion branch", inclusion.max_defect));
            report.check(Check::le(format!("{label}/image_residual"), map.max_image_residual, config.tol_map));
        } else {
            report.note(format!("{label}: A ⊄ B (defect {:e}), witness branch", inclusion.max_defect));
            report.check(Check::ge(format!("{label}/witness_residual"), map.max_image_residual, WITNESS_MIN));
        }
        data.push(json!({
            "pair": label,
            "included": inclusion.included,
            "inclusion_defect": inclusion.max_defect,
            "image_residuals": map.image_residuals,
        }));
    }
    report.data = json!(data);
    Ok(report.finish(started))
}

/// Quaternionic planarity does not see the Weyl deformation.
pub fn run_lem32(config: &ScenarioConfig) -> Result<Report> {
    let started = Instant::now();
    let mut report = Report::new(config);
    let n = config.n;
    if n < 2 {
        return Err(Error::Config("lem32 needs n >= 2".into()));
    }
    let d = 4 * n;
    let q = AStructure::quaternionic(n)?;
    let flat = Connection::flat(d);
    let mut rng = seeded(config.seed);

    let curves = (0..(config.samples / 5).max(2))
        .map(|_| random_planar_curve(&mut rng, &flat, &q, config).map(Curve::from))
        .collect::<Result<Vec<_>>>()?;
    let mut weyls = vec![weyl_connection(&QuatCovector::zeros(n), n)?];
    for _ in 0..config.samples {
        weyls.push(weyl_connection(&random_covector(&mut rng, n, 1.0)?, n)?);
    }

    let flat_residuals = curves
        .iter()
        .map(|c| planarity_residual(&flat, &q, c).map(|r| r.max_residual))
        .collect::<Result<Vec<_>>>()?;
    report.check(Check::le("flat_residual", max_of(&flat_residuals), config.tol_ode));
    let mut weyl_max: f64 = 0.0;
    let mut zero_gap: f64 = 0.0;
    for (c, base) in curves.iter().zip(&flat_residuals) {
        for (k, w) in weyls.iter().enumerate() {
            let r = planarity_residual(w, &q, c)?.max_residual;
            weyl_max = weyl_max.max(r);
            if k == 0 {
                zero_gap = zero_gap.max((r - base).abs());
            }
        }
    }
    // the Weyl term changes the normalization, so allow one decade of slack
    report.check(Check::le("weyl_max_residual", weyl_max, 10.0 * config.tol_ode));
    report.check(Check::le("zero_upsilon_gap", zero_gap, 0.0));

    let circle = cross_slot_circle(n);
    let flat_bad = planarity_residual(&flat, &q, &circle)?.max_residual;
    report.check(Check::ge("negative_flat_residual", flat_bad, 0.1));
    let weyl_bad = weyls
        .iter()
        .map(|w| planarity_residual(w, &q, &circle).map(|r| r.max_residual))
        .collect::<Result<Vec<_>>>()?;
    report.check(Check::ge("negative_min_weyl_residual", min_of(&weyl_bad), WITNESS_MIN));
    report.note(format!("{} curves against {} Weyl connections (first has Υ = 0)", curves.len(), weyls.len()));
    report.data = json!({
        "flat_residuals": flat_residuals,
        "negative_weyl_residuals": weyl_bad,
    });
    Ok(report.finish(started))
}

/// Weyl geodesics are H-planar, and every H-planar curve is a pointwise
/// geodesic of a Weyl connection.
pub fn run_thm34(config: &ScenarioConfig) -> Result<Report> {
    let started = Instant::now();
    let mut report = Report::new(config);
    let n = config.n;
    let d = 4 * n;
    let q = AStructure::quaternionic(n)?;
    let flat = Connection::flat(d);
    let mut rng = seeded(config.seed);

    if n == 1 {
        report.note("degenerate: on R^4 the hull of any nonzero vector is all of R^4, so every curve is H-planar");
        let coeffs = gaussian_matrix(&mut rng, d, 3);
        let (c1, c2) = (coeffs.clone(), coeffs.clone());
        let cubic = Curve::closed_form(
            d,
            0.0,
            1.0,
            50,
            move |t| c1.column(0) * t + c1.column(1) * t * t + c1.column(2) * t * t * t,
            move |t| c2.column(0) + c2.column(1) * (2.0 * t) + c2.column(2) * (3.0 * t * t),
            move |t| coeffs.column(1) * 2.0 + coeffs.column(2) * (6.0 * t),
        );
        let r = planarity_residual(&flat, &q, &cubic)?.max_residual;
        report.check(Check::le("random_cubic_residual", r, config.tol_ode));
        return Ok(report.finish(started));
    }

    let forward = (0..config.samples)
        .map(|_| {
            let g = random_weyl_geodesic(&mut rng, n, config)?;
            planarity_residual(&flat, &q, &Curve::from(g)).map(|r| r.max_residual)
        })
        .collect::<Result<Vec<_>>>()?;
    report.check(Check::le("weyl_geodesic_residual", max_of(&forward), config.tol_ode));

    let mut reverse = Vec::with_capacity(config.samples);
    let mut planar = Vec::with_capacity(config.samples);
    for _ in 0..config.samples {
        let curve = Curve::from(random_planar_curve(&mut rng, &flat, &q, config)?);
        let r = planarity_residual(&flat, &q, &curve)?;
        planar.push(r.max_residual);
        reverse.push(solve_upsilon_along(&curve, &r)?.max_deformed_acceleration);
    }
    report.check(Check::le("planar_curve_residual", max_of(&planar), config.tol_ode));
    report.check(Check::le("deformed_acceleration", max_of(&reverse), config.tol_ode));

    // a Weyl geodesic reparameterized by s ↦ s³ + s solves
    // γ'' = (φ''/φ')γ' − Γ(γ', γ'), a planar curve for ⟨E⟩
    let e = AStructure::projective(d)?;
    let reparam = integrate_retrying(&mut rng, d, |rng, x0, v0| {
        let conn = weyl_connection(&random_covector(rng, n, WEYL_SCALE)?, n)?;
        let q = |s: f64| vec![6.0 * s / (3.0 * s * s + 1.0)];
        integrate_planar_curve(&conn, &e, x0, v0, q, config.t_max, config.step)
    })?;
    let reparam_residual = planarity_residual(&flat, &q, &Curve::from(reparam))?.max_residual;
    report.check(Check::le("reparameterized_geodesic_residual", reparam_residual, config.tol_ode));

    let circle = cross_slot_circle(n);
    let circle_report = planarity_residual(&flat, &q, &circle)?;
    let refused = matches!(solve_upsilon_along(&circle, &circle_report), Err(Error::NotPlanar { .. }));
    report.check(Check::flag("cross_slot_circle_refused", refused));
    report.data = json!({
        "weyl_geodesic_residuals": forward,
        "planar_curve_residuals": planar,
        "deformed_accelerations": reverse,
    });
    Ok(report.finish(started))
}

/// Structure-group maps carry Weyl geodesics to H-planar curves; generic
/// linear maps do not.
pub fn run_thm31(config: &ScenarioConfig) -> Result<Report> {
    let started = Instant::now();
    let mut report = Report::new(config);
    let n = config.n;
    if n < 2 {
        return Err(Error::Config("thm31 needs n >= 2".into()));
    }
    let d = 4 * n;
    let triple = make_affinor_triple(n)?;
    let q = AStructure::from_triple(&triple)?;
    let e = AStructure::projective(d)?;
    let flat = Connection::flat(d);
    let mut rng = seeded(config.seed);
    let curves = (config.samples / 4).max(3);
    const MAPS: usize = 10;

    let run_map = |rng: &mut SeededRng, f: Matrix| -> Result<(f64, f64)> {
        let defect = is_quaternionic_linear(&f, &triple)?.defect;
        let source = weyl_connection(&random_covector(rng, n, WEYL_SCALE)?, n)?;
        let seed = child_seed(rng);
        let r = check_planar_map(&LinearMap(f), &source, &e, &flat, &q, &batch(config, curves), seed)?;
        Ok((defect, r.max_image_residual))
    };

    let mut morphisms = Vec::with_capacity(MAPS);
    for k in 0..MAPS {
        let f = structure_group_map(&mut rng, n, k > 0)?;
        morphisms.push(run_map(&mut rng, f)?);
    }
    let mut others = Vec::with_capacity(MAPS);
    while others.len() < MAPS {
        let f = Matrix::identity(d, d) + gaussian_matrix(&mut rng, d, d) * 0.3;
        if f.determinant().abs() < 1e-3 {
            continue;
        }
        others.push(run_map(&mut rng, f)?);
    }
    let mut diag = Matrix::identity(d, d);
    diag[(0, 0)] = 2.0;
    let (diag_defect, diag_residual) = run_map(&mut rng, diag)?;
    let (_, identity_residual) = run_map(&mut rng, Matrix::identity(d, d))?;

    let defects = |v: &[(f64, f64)]| v.iter().map(|p| p.0).collect::<Vec<_>>();
    let residuals = |v: &[(f64, f64)]| v.iter().map(|p| p.1).collect::<Vec<_>>();
    report.check(Check::le("morphism_max_defect", max_of(&defects(&morphisms)), config.tol_alg));
    report.check(Check::le("morphism_max_image_residual", max_of(&residuals(&morphisms)), config.tol_map));
    report.check(Check::ge("nonmorphism_min_defect", min_of(&defects(&others)), config.tol_alg));
    report.check(Check::ge("nonmorphism_min_image_residual", min_of(&residuals(&others)), config.tol_map));
    report.check(Check::ge("diag_defect", diag_defect, config.tol_alg));
    report.check(Check::ge("diag_image_residual", diag_residual, config.tol_map));
    report.check(Check::le("identity_image_residual", identity_residual, config.tol_map));
    report.note(format!(
        "{MAPS} structure-group maps (the first a pure right multiplication) and {MAPS} perturbed identities, {curves} Weyl geodesics each"
    ));
    report.data = json!({
        "morphism_image_residuals": residuals(&morphisms),
        "nonmorphism_image_residuals": residuals(&others),
        "nonmorphism_defects": defects(&others),
    });
    Ok(report.finish(started))
}
