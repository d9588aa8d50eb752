//! Closed-form EPR correlation functions for two observers with aligned axes
//! moving relative to the preferred frame, for simultaneous measurements in
//! disjoint detector regions.
//!
//! Values are in natural units (spin-½ outcomes are ±½), so the spin-½
//! singlet gives `C = −(weight/4) a⃗·Rᵀb⃗`. The limit formulas are stated in
//! normalized form, i.e. divided by the prefactor `−weight/4`.

use nalgebra::Vector3;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kinematics::{
    check_unit, four_velocity_from_velocity, wigner_rotation_between, wigner_rotation_general,
    AssTransform, FourVelocity, RelVelocity, WignerRotation,
};
use crate::spin::{generators, singlet_amplitude, JointSpinAmplitude, Spin};

/// Antipodal guard on `1 + n⃗_A·n⃗_B` for the high-velocity limit.
pub const ANTIPODAL_TOLERANCE: f64 = 1e-9;

/// Above this PF speed the small-velocity expansion is logged as unreliable.
const SMALL_VELOCITY_WARN: f64 = 0.1;

/// One EPR measurement setup: the PF as seen by each observer, their
/// analyzer directions, and the spin state restricted to the detectors.
#[derive(Debug, Clone, PartialEq)]
pub struct EprScenario {
    pub u_a: FourVelocity,
    pub u_b: FourVelocity,
    pub a: Vector3<f64>,
    pub b: Vector3<f64>,
    pub spin_alpha: Spin,
    pub spin_beta: Spin,
    pub amplitude: JointSpinAmplitude,
}

impl EprScenario {
    pub fn new(
        u_a: FourVelocity,
        u_b: FourVelocity,
        a: Vector3<f64>,
        b: Vector3<f64>,
        spin_alpha: Spin,
        spin_beta: Spin,
        amplitude: JointSpinAmplitude,
    ) -> Result<Self> {
        check_unit(&a)?;
        check_unit(&b)?;
        let expected = (spin_alpha.dim(), spin_beta.dim());
        let actual = amplitude.matrix.shape();
        if expected != actual {
            return Err(Error::DimensionMismatch { expected, actual });
        }
        Ok(Self {
            u_a,
            u_b,
            a,
            b,
            spin_alpha,
            spin_beta,
            amplitude,
        })
    }

    /// Spin-½ singlet with the given weight.
    pub fn singlet(
        u_a: FourVelocity,
        u_b: FourVelocity,
        a: Vector3<f64>,
        b: Vector3<f64>,
        weight: f64,
    ) -> Result<Self> {
        Self::new(
            u_a,
            u_b,
            a,
            b,
            Spin::HALF,
            Spin::HALF,
            singlet_amplitude().with_weight(weight),
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationResult {
    pub value: f64,
    pub wigner: WignerRotation,
    /// `b⃗′ = Rᵀb⃗`, B's analyzer expressed in A's frame.
    pub rotated_b: Vector3<f64>,
    pub weight: f64,
}

impl CorrelationResult {
    /// `value / (−weight/4)`; comparable with the limit formulas.
    pub fn normalized(&self) -> f64 {
        self.value / singlet_prefactor(self.weight)
    }
}

/// `−weight/4`.
pub fn singlet_prefactor(weight: f64) -> f64 {
    -0.25 * weight
}

/// `weight · Tr[ψ† (a⃗·Σ^{s_α}) ψ ((Rᵀb⃗)·Σ^{s_β})ᵀ]` for an arbitrary joint
/// spin amplitude, with `R` the Wigner rotation of the boost from A to B.
pub fn correlation_exact(scenario: &EprScenario) -> Result<CorrelationResult> {
    let wigner = wigner_rotation_between(&scenario.u_a, &scenario.u_b)?;
    Ok(trace_form(scenario, wigner))
}

/// As [`correlation_exact`], for a general transform `d` from A's frame to
/// B's (boost composed with rotations). `scenario.u_b` is ignored in favour
/// of `d`'s target frame.
pub fn correlation_exact_general(scenario: &EprScenario, d: &AssTransform) -> Result<CorrelationResult> {
    let wigner = wigner_rotation_general(d, &scenario.u_a)?;
    Ok(trace_form(scenario, wigner))
}

fn trace_form(scenario: &EprScenario, wigner: WignerRotation) -> CorrelationResult {
    let rotated_b = wigner.transpose().apply(&scenario.b);
    let sa = generators(scenario.spin_alpha).dot(&scenario.a);
    let sb = generators(scenario.spin_beta).dot(&rotated_b);
    let psi = &scenario.amplitude.matrix;
    let product = psi.adjoint() * sa * psi * sb.transpose();
    let trace: Complex64 = product.trace();
    debug_assert!(
        trace.im.abs() <= 1e-12 * (1.0 + trace.re.abs()),
        "imaginary residual {}",
        trace.im
    );
    CorrelationResult {
        value: scenario.amplitude.weight * trace.re,
        wigner,
        rotated_b,
        weight: scenario.amplitude.weight,
    }
}

/// Spin-½ singlet: `−(weight/4) a⃗·B(u_A) Ωᵀ(w⃗, u_A) B⁻¹(u_B) b⃗`.
pub fn correlation_singlet(
    a: &Vector3<f64>,
    b: &Vector3<f64>,
    u_a: &FourVelocity,
    u_b: &FourVelocity,
    weight: f64,
) -> Result<CorrelationResult> {
    check_unit(a)?;
    check_unit(b)?;
    let wigner = wigner_rotation_between(u_a, u_b)?;
    let rotated_b = wigner.transpose().apply(b);
    Ok(CorrelationResult {
        value: singlet_prefactor(weight) * a.dot(&rotated_b),
        wigner,
        rotated_b,
        weight,
    })
}

/// Normalized correlation to second order in the PF velocities:
/// `a⃗·b⃗ + (a⃗×b⃗)·(σ⃗_A×σ⃗_B)/2`.
pub fn correlation_small_velocity(
    a: &Vector3<f64>,
    b: &Vector3<f64>,
    sigma_a: &RelVelocity,
    sigma_b: &RelVelocity,
) -> f64 {
    let fastest = sigma_a.0.norm().max(sigma_b.0.norm());
    if fastest > SMALL_VELOCITY_WARN {
        log::warn!("small-velocity expansion used at PF speed {fastest}");
    }
    a.dot(b) + 0.5 * a.cross(b).dot(&sigma_a.0.cross(&sigma_b.0))
}

/// Normalized correlation in the limit `|u⃗_A|, |u⃗_B| → ∞` along the unit
/// directions `n⃗_A`, `n⃗_B`.
pub fn correlation_high_velocity(
    a: &Vector3<f64>,
    b: &Vector3<f64>,
    n_a: &Vector3<f64>,
    n_b: &Vector3<f64>,
) -> Result<f64> {
    check_unit(n_a)?;
    check_unit(n_b)?;
    let cos = n_a.dot(n_b);
    let denominator = 1.0 + cos;
    if denominator <= ANTIPODAL_TOLERANCE {
        return Err(Error::AntipodalDirections(denominator));
    }
    let (a_na, a_nb) = (a.dot(n_a), a.dot(n_b));
    let (b_na, b_nb) = (b.dot(n_a), b.dot(n_b));
    let bracket = a_na * b_na + a_nb * b_nb + a_nb * b_na - (1.0 + 2.0 * cos) * a_na * b_nb;
    Ok(a.dot(b) - bracket / denominator)
}

/// High-velocity limit for a pair of frames, using the directions of their
/// PF four-velocities.
pub fn correlation_high_velocity_for(
    a: &Vector3<f64>,
    b: &Vector3<f64>,
    u_a: &FourVelocity,
    u_b: &FourVelocity,
) -> Result<f64> {
    let n_a = u_a.direction().ok_or(Error::UndefinedDirection)?;
    let n_b = u_b.direction().ok_or(Error::UndefinedDirection)?;
    correlation_high_velocity(a, b, &n_a, &n_b)
}

/// Second-order correction for perpendicular analyzers,
/// `s_A s_B sin β cos α / 2`, where `α` is the angle between `a⃗×b⃗` and
/// `σ⃗_A×σ⃗_B`, `β` the angle between `σ⃗_A` and `σ⃗_B`, and `s_A`, `s_B` the PF
/// speeds. Angles in radians.
pub fn perpendicular_correlation(alpha: f64, beta: f64, s_a: f64, s_b: f64) -> f64 {
    0.5 * s_a * s_b * beta.sin() * alpha.cos()
}

/// A concrete configuration with perpendicular analyzers realizing the
/// angles `α`, `β` of [`perpendicular_correlation`].
///
/// `σ⃗_A = s_A x̂`, `σ⃗_B = s_B (cos β x̂ + sin β ŷ)`, so `σ⃗_A×σ⃗_B ∥ ẑ`, and
/// `a⃗×b⃗ = (sin α, 0, cos α)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerpendicularGeometry {
    pub a: Vector3<f64>,
    pub b: Vector3<f64>,
    pub sigma_a: RelVelocity,
    pub sigma_b: RelVelocity,
}

impl PerpendicularGeometry {
    pub fn new(alpha: f64, beta: f64, s_a: f64, s_b: f64) -> Self {
        let (sin_a, cos_a) = alpha.sin_cos();
        let (sin_b, cos_b) = beta.sin_cos();
        Self {
            a: Vector3::new(cos_a, 0.0, -sin_a),
            b: Vector3::y(),
            sigma_a: RelVelocity::new(s_a, 0.0, 0.0),
            sigma_b: RelVelocity::new(s_b * cos_b, s_b * sin_b, 0.0),
        }
    }

    /// Exact normalized deviation from the standard result `a⃗·b⃗ = 0`.
    pub fn exact_correction(&self) -> Result<f64> {
        let result = correlation_singlet(
            &self.a,
            &self.b,
            &four_velocity_from_velocity(&self.sigma_a),
            &four_velocity_from_velocity(&self.sigma_b),
            1.0,
        )?;
        Ok(result.normalized() - self.a.dot(&self.b))
    }
}

/// Evaluates many scenarios in parallel; output order matches input order.
pub fn correlate_all(scenarios: &[EprScenario]) -> Vec<Result<CorrelationResult>> {
    scenarios.par_iter().map(correlation_exact).collect()
}
