//! Spin algebra for arbitrary spin `s`.
//!
//! Basis convention: index `k` of a spin-`s` vector carries the `Σ³`
//! eigenvalue `s − k`, so `Σ³ = diag(s, s−1, …, −s)`.

use nalgebra::{DMatrix, Matrix3, SymmetricEigen, Vector3};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kinematics::{check_unit, WignerRotation};

pub type CMatrix = DMatrix<Complex64>;

/// Within this distance of π the rotation axis is taken from the symmetric
/// part of `R`.
const NEAR_PI: f64 = 1e-6;

/// A spin quantum number, stored as `2s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Spin(u32);

impl Spin {
    pub const HALF: Spin = Spin(1);
    pub const ONE: Spin = Spin(2);

    pub fn from_twice(twice: u32) -> Self {
        Self(twice)
    }

    pub fn new(s: f64) -> Result<Self> {
        let twice = 2.0 * s;
        if !twice.is_finite() || twice < 0.0 || (twice - twice.round()).abs() > 1e-12 {
            return Err(Error::InvalidSpin(s));
        }
        Ok(Self(twice.round() as u32))
    }

    pub fn twice(&self) -> u32 {
        self.0
    }

    pub fn value(&self) -> f64 {
        f64::from(self.0) / 2.0
    }

    pub fn dim(&self) -> usize {
        self.0 as usize + 1
    }

    /// `s, s−1, …, −s`, in basis order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        (0..self.dim()).map(|k| self.value() - k as f64).collect()
    }
}

/// The generators `Σ¹, Σ², Σ³` of the spin-`s` representation.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinRep {
    spin: Spin,
    generators: [CMatrix; 3],
}

impl SpinRep {
    pub fn spin(&self) -> Spin {
        self.spin
    }

    pub fn dim(&self) -> usize {
        self.spin.dim()
    }

    pub fn generator(&self, i: usize) -> &CMatrix {
        &self.generators[i]
    }

    pub fn generators(&self) -> &[CMatrix; 3] {
        &self.generators
    }

    /// `n⃗·Σ` without the unit-length check.
    pub fn dot(&self, n: &Vector3<f64>) -> CMatrix {
        &self.generators[0] * Complex64::from(n.x)
            + &self.generators[1] * Complex64::from(n.y)
            + &self.generators[2] * Complex64::from(n.z)
    }

    /// `Σ·Σ`.
    pub fn casimir(&self) -> CMatrix {
        self.generators.iter().map(|g| g * g).fold(
            CMatrix::zeros(self.dim(), self.dim()),
            |acc, sq| acc + sq,
        )
    }
}

/// Standard generators from the ladder construction.
pub fn generators(spin: Spin) -> SpinRep {
    let dim = spin.dim();
    let s = spin.value();
    let mut raise = CMatrix::zeros(dim, dim);
    for k in 1..dim {
        let m = s - k as f64;
        raise[(k - 1, k)] = Complex64::from((s * (s + 1.0) - m * (m + 1.0)).sqrt());
    }
    let lower = raise.adjoint();
    let x = (&raise + &lower) * Complex64::from(0.5);
    let y = (&raise - &lower) * Complex64::new(0.0, -0.5);
    let z = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        dim,
        spin.eigenvalues().into_iter().map(Complex64::from),
    ));
    SpinRep {
        spin,
        generators: [x, y, z],
    }
}

/// `n⃗·Σ` for a unit vector `n⃗`.
pub fn spin_projection(n: &Vector3<f64>, rep: &SpinRep) -> Result<CMatrix> {
    check_unit(n)?;
    Ok(rep.dot(n))
}

/// Projector onto the eigenvalue `μ` of `n⃗·Σ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinProjector {
    pub direction: Vector3<f64>,
    pub eigenvalue: f64,
    pub matrix: CMatrix,
}

/// Eigenprojectors of `n⃗·Σ`, ordered `μ = s, s−1, …, −s`.
///
/// The eigenvectors are `exp(iθ e⃗_n·Σ)` applied to the `Σ³` basis, where `θ`
/// is the polar angle of `n⃗` and `e⃗_n = (sin φ, −cos φ, 0)`. The azimuth is
/// taken as `φ = 0` on the `z` axis.
pub fn eigenbasis(n: &Vector3<f64>, rep: &SpinRep) -> Result<Vec<SpinProjector>> {
    check_unit(n)?;
    let theta = n.z.clamp(-1.0, 1.0).acos();
    let phi = if n.x == 0.0 && n.y == 0.0 {
        0.0
    } else {
        n.y.atan2(n.x)
    };
    let axis = Vector3::new(phi.sin(), -phi.cos(), 0.0);
    let frame = exp_i_hermitian(&rep.dot(&axis), theta);
    Ok(rep
        .spin()
        .eigenvalues()
        .into_iter()
        .enumerate()
        .map(|(k, mu)| {
            let v = frame.column(k);
            SpinProjector {
                direction: *n,
                eigenvalue: mu,
                matrix: v * v.adjoint(),
            }
        })
        .collect())
}

/// `exp(iθH)` for Hermitian `H`.
pub fn exp_i_hermitian(h: &CMatrix, theta: f64) -> CMatrix {
    let eig = SymmetricEigen::new(h.clone());
    let phases = nalgebra::DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues
            .iter()
            .map(|&l| Complex64::from_polar(1.0, theta * l)),
    );
    &eig.eigenvectors * CMatrix::from_diagonal(&phases) * eig.eigenvectors.adjoint()
}

/// Unit axis and angle `θ ∈ [0, π]` of a proper rotation.
pub fn axis_angle(r: &Matrix3<f64>) -> (Vector3<f64>, f64) {
    let skew = Vector3::new(
        r[(2, 1)] - r[(1, 2)],
        r[(0, 2)] - r[(2, 0)],
        r[(1, 0)] - r[(0, 1)],
    );
    let cos = 0.5 * (r.trace() - 1.0);
    let sin = 0.5 * skew.norm();
    let angle = sin.atan2(cos);
    if angle < f64::EPSILON {
        return (Vector3::z(), 0.0);
    }
    if std::f64::consts::PI - angle > NEAR_PI {
        return (skew / skew.norm(), angle);
    }
    // (R + Rᵀ)/2 = cosθ I + (1 − cosθ) k kᵀ has k as its top eigenvector
    let sym = (r + r.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let top = eig.eigenvalues.imax();
    let mut axis: Vector3<f64> = eig.eigenvectors.column(top).into_owned();
    if axis.dot(&skew) < 0.0 {
        axis = -axis;
    }
    (axis.normalize(), angle)
}

/// Unitary `U(R)` acting on spin-`s` indices, fixed by
/// `U (n⃗·Σ) U† = (R n⃗)·Σ`. Defined up to a sign for half-integer spin.
pub fn rep_of_rotation(r: &WignerRotation, rep: &SpinRep) -> CMatrix {
    let (axis, angle) = axis_angle(r.matrix());
    if angle == 0.0 {
        return CMatrix::identity(rep.dim(), rep.dim());
    }
    exp_i_hermitian(&rep.dot(&axis), -angle)
}

/// Spin part `ψ_{λ_α λ_β}` of a two-particle state restricted to the
/// detector regions, with the localization probability of the spatial
/// envelope carried separately as `weight`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointSpinAmplitude {
    pub matrix: CMatrix,
    pub weight: f64,
}

impl JointSpinAmplitude {
    pub fn new(matrix: CMatrix, weight: f64) -> Self {
        Self { matrix, weight }
    }

    /// `Tr[ψ†ψ]`.
    pub fn spin_norm_squared(&self) -> f64 {
        self.matrix.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Rescales `ψ` so that `Tr[ψ†ψ] = 1`, keeping the weight.
    pub fn normalized(&self) -> Result<Self> {
        let norm2 = self.spin_norm_squared();
        if !(norm2 > 0.0) {
            return Err(Error::NotNormalized(norm2));
        }
        Ok(Self::new(
            &self.matrix * Complex64::from(1.0 / norm2.sqrt()),
            self.weight,
        ))
    }

    pub fn with_weight(mut self, weight: f64) -> Self {
        self.weight = weight;
        self
    }
}

/// `ψ = (i/√2) σ²`, weight 1.
pub fn singlet_amplitude() -> JointSpinAmplitude {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let zero = Complex64::from(0.0);
    JointSpinAmplitude::new(
        CMatrix::from_row_slice(2, 2, &[zero, Complex64::from(h), Complex64::from(-h), zero]),
        1.0,
    )
}
