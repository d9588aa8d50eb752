use std::io::Write;

use nalgebra::{DMatrix, Vector3};
use rayon::prelude::*;

use relepr::correlation::{
    correlation_exact, correlation_high_velocity_for, correlation_small_velocity, perpendicular_correlation,
    singlet_prefactor, EprScenario, PerpendicularGeometry,
};
use relepr::kinematics::{
    boost_transform, four_velocity_from_velocity, metric, relative_four_velocity, velocity_to_einstein,
    wigner_rotation_between, FourVelocity, RelVelocity,
};
use relepr::oracle::{Experiment, LatticeState};

use crate::error::CliError;
use crate::scenario::{frame_b, Resolved, ScanSpec, ScenarioFile};

/// Fixed float format: 17 significant digits, round-trippable, no `-0`.
pub fn num(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

fn join<'a>(values: impl IntoIterator<Item = &'a f64>) -> String {
    values.into_iter().map(|&x| num(x)).collect::<Vec<_>>().join(",")
}

fn row(out: &mut impl Write, label: &str, values: &[f64]) -> std::io::Result<()> {
    writeln!(out, "{label},{}", join(values))
}

fn matrix_rows(out: &mut impl Write, label: &str, m: &DMatrix<f64>) -> std::io::Result<()> {
    for (i, r) in m.row_iter().enumerate() {
        row(out, &format!("{label}[{i}]"), r.iter().copied().collect::<Vec<_>>().as_slice())?;
    }
    Ok(())
}

fn four(u: &FourVelocity) -> [f64; 4] {
    [u.t(), u.space().x, u.space().y, u.space().z]
}

/// Frame data for observers A and B: boost, metrics, relative velocity and
/// Einstein-synchronization equivalents.
pub fn transform(
    out: &mut impl Write,
    sigma_a: Vector3<f64>,
    sigma_b: Option<Vector3<f64>>,
    v: Option<Vector3<f64>>,
) -> Result<(), CliError> {
    let u_a = four_velocity_from_velocity(&RelVelocity(sigma_a));
    let u_b = frame_b(&u_a, sigma_b, v)?;
    let w = relative_four_velocity(&u_a, &u_b)?;
    let d = boost_transform(&w, &u_a)?;
    let velocity = w.velocity();
    let velocity_e = velocity_to_einstein(&velocity, &u_a)?;
    let wigner = wigner_rotation_between(&u_a, &u_b)?;
    let dyn4 = |m: &nalgebra::Matrix4<f64>| DMatrix::from_iterator(4, 4, m.iter().copied());

    row(out, "u_A", &four(&u_a))?;
    row(out, "u_B", &four(&u_b))?;
    row(out, "w", &[w.t, w.space.x, w.space.y, w.space.z])?;
    row(out, "V", velocity.0.as_slice())?;
    matrix_rows(out, "D", &dyn4(d.matrix()))?;
    matrix_rows(out, "g_A", &dyn4(metric(&u_a).matrix()))?;
    matrix_rows(out, "g_B", &dyn4(metric(&u_b).matrix()))?;
    matrix_rows(out, "R", &DMatrix::from_iterator(3, 3, wigner.matrix().iter().copied()))?;
    let e_a = u_a.to_einstein();
    let e_b = u_b.to_einstein();
    row(out, "u_A_einstein", &[e_a.t, e_a.space.x, e_a.space.y, e_a.space.z])?;
    row(out, "u_B_einstein", &[e_b.t, e_b.space.x, e_b.space.y, e_b.space.z])?;
    row(out, "V_einstein", velocity_e.0.as_slice())?;
    Ok(())
}

/// Which correlation `correlate --formula` reports on its own.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Formula {
    Exact,
    Small,
    High,
}

pub const CORRELATE_HEADER: &str = "sigma_a_x,sigma_a_y,sigma_a_z,sigma_b_x,sigma_b_y,sigma_b_z,\
a_x,a_y,a_z,b_x,b_y,b_z,r_11,r_12,r_13,r_21,r_22,r_23,r_31,r_32,r_33,\
exact,small,high,exact_normalized,small_normalized,high_normalized";

struct Values {
    exact: f64,
    exact_normalized: f64,
    wigner: [f64; 9],
    small_normalized: Option<f64>,
    high_normalized: Option<Result<f64, CliError>>,
    prefactor: f64,
}

fn evaluate(r: &Resolved) -> Result<Values, CliError> {
    let scenario = EprScenario::new(r.u_a, r.u_b, r.a, r.b, r.spin_alpha, r.spin_beta, r.amplitude.clone())?;
    let exact = correlation_exact(&scenario)?;
    let m = exact.wigner.matrix();
    let wigner = [m[(0, 0)], m[(0, 1)], m[(0, 2)], m[(1, 0)], m[(1, 1)], m[(1, 2)], m[(2, 0)], m[(2, 1)], m[(2, 2)]];
    let (small_normalized, high_normalized) = if r.is_singlet {
        (
            Some(correlation_small_velocity(&r.a, &r.b, &r.sigma_a, &r.sigma_b)),
            Some(correlation_high_velocity_for(&r.a, &r.b, &r.u_a, &r.u_b).map_err(CliError::from)),
        )
    } else {
        (None, None)
    };
    Ok(Values {
        exact: exact.value,
        exact_normalized: exact.normalized(),
        wigner,
        small_normalized,
        high_normalized,
        prefactor: singlet_prefactor(r.amplitude.weight),
    })
}

/// Header plus one row, or with `formula` a single value (normalized when
/// requested by flag or scenario).
pub fn correlate(
    out: &mut impl Write,
    file: &ScenarioFile,
    formula: Option<Formula>,
    normalized: bool,
) -> Result<(), CliError> {
    let r = file.resolve()?;
    let v = evaluate(&r)?;
    let normalized = normalized || r.normalized;
    let not_singlet = || CliError::FormulaSingular("limit formulas need the spin-1/2 singlet".into());

    if let Some(formula) = formula {
        let value = match formula {
            Formula::Exact => v.exact_normalized,
            Formula::Small => v.small_normalized.ok_or_else(not_singlet)?,
            Formula::High => v.high_normalized.ok_or_else(not_singlet)??,
        };
        let (label, value) = match (formula, normalized) {
            (Formula::Exact, false) => ("exact", v.exact),
            (f, true) => (name(f), value),
            (f, false) => (name(f), v.prefactor * value),
        };
        writeln!(out, "{label}{}", if normalized { "_normalized" } else { "" })?;
        writeln!(out, "{}", num(value))?;
        return Ok(());
    }

    let text = |x: Option<f64>| match x {
        Some(x) => num(x),
        None => "n/a".into(),
    };
    let high = match &v.high_normalized {
        None => "n/a".to_string(),
        Some(Err(_)) => "singular".into(),
        Some(Ok(x)) => num(*x),
    };
    let high_raw = match &v.high_normalized {
        None => "n/a".to_string(),
        Some(Err(_)) => "singular".into(),
        Some(Ok(x)) => num(v.prefactor * x),
    };
    let inputs: Vec<f64> = r
        .sigma_a
        .0
        .iter()
        .chain(r.sigma_b.0.iter())
        .chain(r.a.iter())
        .chain(r.b.iter())
        .copied()
        .collect();
    writeln!(out, "{CORRELATE_HEADER}")?;
    writeln!(
        out,
        "{},{},{},{},{},{},{},{}",
        join(&inputs),
        join(&v.wigner),
        num(v.exact),
        text(v.small_normalized.map(|x| v.prefactor * x)),
        high_raw,
        num(v.exact_normalized),
        text(v.small_normalized),
        high
    )?;
    Ok(())
}

fn name(f: Formula) -> &'static str {
    match f {
        Formula::Exact => "exact",
        Formula::Small => "small",
        Formula::High => "high",
    }
}

pub const SCAN_HEADER: &str = "alpha,beta,c_perp,c_exact_correction";

/// The perpendicular-analyzer surface as CSV, `α`-major. Rows are computed
/// on a pool of `threads` workers (0 = rayon default) and emitted in order.
pub fn scan_perp(spec: &ScanSpec, threads: usize) -> Result<String, CliError> {
    spec.validate()?;
    let points: Vec<(f64, f64)> = spec
        .alpha
        .points()
        .into_iter()
        .flat_map(|alpha| spec.beta.points().into_iter().map(move |beta| (alpha, beta)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Other(e.to_string()))?;
    let rows: Vec<Result<String, CliError>> = pool.install(|| {
        points
            .par_iter()
            .map(|&(alpha, beta)| {
                let perp = perpendicular_correlation(alpha, beta, spec.speed_a, spec.speed_b);
                let exact = PerpendicularGeometry::new(alpha, beta, spec.speed_a, spec.speed_b).exact_correction()?;
                Ok(format!("{},{},{},{}\n", num(alpha), num(beta), num(perp), num(exact)))
            })
            .collect()
    });
    let mut csv = String::with_capacity(rows.len() * 96);
    csv.push_str(SCAN_HEADER);
    csv.push('\n');
    for r in rows {
        csv.push_str(&r?);
    }
    Ok(csv)
}

/// Runs the measurement-sequence oracle on a spin state localized in A's
/// detector and B's pulled-back detector. Fails with
/// [`CliError::Disagreement`] when the three paths differ by more than
/// `tolerance`; the report is written either way.
pub fn oracle(out: &mut impl Write, file: &ScenarioFile, tolerance: f64) -> Result<(), CliError> {
    let r = file.resolve()?;
    let spec = file
        .oracle
        .as_ref()
        .ok_or_else(|| CliError::Parse("scenario has no \"oracle\" section".into()))?;
    let grid = spec.grid()?;
    let (region_a, region_b) = spec.regions()?;
    let experiment = Experiment {
        grid: grid.clone(),
        region_a,
        a: r.a,
        region_b,
        b: r.b,
        u_a: r.u_a,
        u_b: r.u_b,
    };
    let pulled = experiment.pull_back()?;
    if !pulled.mask_a.contains(&true) || !pulled.mask_b_in_a.contains(&true) {
        return Err(CliError::Parse("a detector region contains no grid cell".into()));
    }
    let state = LatticeState::localized(&grid, &pulled.mask_a, &pulled.mask_b_in_a, &r.amplitude)?;
    let report = experiment.compare(&state)?;

    writeln!(out, "mu_a,p_mu_a")?;
    for (mu, p) in report.record.outcomes_a.iter().zip(&report.record.p_a) {
        writeln!(out, "{},{}", num(*mu), num(*p))?;
    }
    writeln!(out, "mu_a,mu_b,p_mu_b_given_mu_a")?;
    for (mu_a, row) in report.record.outcomes_a.iter().zip(&report.record.p_b_given_a) {
        for (mu_b, p) in report.record.outcomes_b.iter().zip(row) {
            writeln!(out, "{},{},{}", num(*mu_a), num(*mu_b), num(*p))?;
        }
    }
    writeln!(out, "quantity,value")?;
    writeln!(out, "sequential,{}", num(report.sequential))?;
    writeln!(out, "joint,{}", num(report.joint))?;
    writeln!(out, "closed_form,{}", num(report.closed_form))?;
    writeln!(out, "max_difference,{}", num(report.max_difference))?;
    if report.max_difference > tolerance {
        return Err(CliError::Disagreement(report.max_difference));
    }
    Ok(())
}
