//! Lorentz group in the absolute synchronization scheme.
//!
//! Every inertial frame is labelled by the four-velocity `u` of the preferred
//! frame as seen from it. Boosts are lower block-triangular, so the time
//! coordinate is only rescaled and simultaneity hyperplanes `x⁰ = const` are
//! shared by all frames. All vectors are contravariant columns; matrices act
//! on the left.

use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};

use crate::error::{Error, Result};
use crate::DEFAULT_TOLERANCE;

/// Denominators of the synchronization relations below this magnitude are
/// treated as singular.
pub const SYNC_SINGULARITY_EPS: f64 = 1e-12;

/// Guard for the denominator of the relative four-velocity.
const RELATIVE_DENOMINATOR_EPS: f64 = 1e-300;

/// Four-velocity of the preferred frame seen from an inertial frame.
///
/// Satisfies `u⁰ = 1/√(1+|u⃗|²)`, i.e. `u` has unit length in the metric
/// `g(u)` of its own frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourVelocity {
    t: f64,
    space: Vector3<f64>,
}

impl FourVelocity {
    /// `ũ = (1, 0⃗)`: the preferred frame seen from itself.
    pub fn preferred() -> Self {
        Self {
            t: 1.0,
            space: Vector3::zeros(),
        }
    }

    /// Builds the four-velocity with the given spatial part, fixing `u⁰`.
    pub fn from_spatial(space: Vector3<f64>) -> Self {
        Self {
            t: 1.0 / (1.0 + space.norm_squared()).sqrt(),
            space,
        }
    }

    pub(crate) fn from_raw(t: f64, space: Vector3<f64>) -> Self {
        Self { t, space }
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn space(&self) -> &Vector3<f64> {
        &self.space
    }

    /// Preferred-frame velocity `σ⃗ = u⃗/u⁰`.
    pub fn velocity(&self) -> RelVelocity {
        RelVelocity(self.space / self.t)
    }

    pub fn to_vector4(&self) -> Vector4<f64> {
        Vector4::new(self.t, self.space.x, self.space.y, self.space.z)
    }

    /// `u⁰·√(1+|u⃗|²) − 1`, zero for a valid four-velocity.
    pub fn normalization_defect(&self) -> f64 {
        self.t * (1.0 + self.space.norm_squared()).sqrt() - 1.0
    }

    /// Einstein-synchronization components `(1/u⁰, u⃗)`.
    pub fn to_einstein(&self) -> FourVector {
        FourVector::new(1.0 / self.t, self.space)
    }

    /// Unit direction of `u⃗`, if the frame is moving relative to the PF.
    pub fn direction(&self) -> Option<Vector3<f64>> {
        let n = self.space.norm();
        (n > 0.0).then(|| self.space / n)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        let scale = 1.0 + self.space.norm().max(other.space.norm());
        (self.t - other.t).abs() <= tol * scale && (self.space - other.space).amax() <= tol * scale
    }
}

/// Event coordinates `x = (x⁰, x⃗)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourVector {
    pub t: f64,
    pub space: Vector3<f64>,
}

impl FourVector {
    pub fn new(t: f64, space: Vector3<f64>) -> Self {
        Self { t, space }
    }

    pub fn to_vector4(&self) -> Vector4<f64> {
        Vector4::new(self.t, self.space.x, self.space.y, self.space.z)
    }

    pub fn from_vector4(v: &Vector4<f64>) -> Self {
        Self::new(v[0], Vector3::new(v[1], v[2], v[3]))
    }
}

/// A three-velocity in units of `c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelVelocity(pub Vector3<f64>);

impl RelVelocity {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self(Vector3::new(x, y, z))
    }

    pub fn zero() -> Self {
        Self(Vector3::zeros())
    }
}

/// Four-velocity `w` of one frame as seen from another.
///
/// Constructed from a pair of preferred-frame four-velocities (see
/// [`relative_four_velocity`]) or from a coordinate velocity; in both cases it
/// has unit length in the metric `g(u)` of the observing frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelFourVelocity {
    pub t: f64,
    pub space: Vector3<f64>,
}

impl RelFourVelocity {
    pub fn new(t: f64, space: Vector3<f64>) -> Self {
        Self { t, space }
    }

    /// No relative motion.
    pub fn identity() -> Self {
        Self::new(1.0, Vector3::zeros())
    }

    /// The four-velocity of a frame moving with coordinate velocity `v`
    /// (absolute synchronization) relative to an observer whose
    /// preferred-frame four-velocity is `u`.
    ///
    /// Fails with a synchronization singularity when the motion is not
    /// subluminal in Einstein synchronization.
    pub fn from_velocity(v: &RelVelocity, u: &FourVelocity) -> Result<Self> {
        let k = 1.0 + u.t * v.0.dot(&u.space);
        let radicand = k * k - v.0.norm_squared();
        if k <= SYNC_SINGULARITY_EPS || radicand <= SYNC_SINGULARITY_EPS {
            return Err(Error::SynchronizationSingularity {
                denominator: radicand.min(k),
            });
        }
        let t = 1.0 / radicand.sqrt();
        Ok(Self::new(t, v.0 * t))
    }

    /// Coordinate velocity `V⃗ = w⃗/w⁰`.
    pub fn velocity(&self) -> RelVelocity {
        RelVelocity(self.space / self.t)
    }

    pub fn to_vector4(&self) -> Vector4<f64> {
        Vector4::new(self.t, self.space.x, self.space.y, self.space.z)
    }

    /// Squared length of `w` in the metric `g(u)`.
    pub fn metric_norm_squared(&self, u: &FourVelocity) -> f64 {
        let w = self.to_vector4();
        (w.transpose() * metric(u).0 * w)[0]
    }
}

/// Metric tensor `g_{μν}(u)` of the frame labelled by `u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssMetric(pub Matrix4<f64>);

impl AssMetric {
    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.0
    }
}

/// A 3×3 proper orthogonal matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WignerRotation(Matrix3<f64>);

impl WignerRotation {
    pub fn identity() -> Self {
        Self(Matrix3::identity())
    }

    /// Validates orthogonality and orientation to `tol`.
    pub fn new(m: Matrix3<f64>, tol: f64) -> Result<Self> {
        let orthogonality = orthogonality_defect(&m);
        let det = m.determinant();
        if orthogonality > tol || (det - 1.0).abs() > tol {
            return Err(Error::NotARotation { orthogonality, det });
        }
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn apply(&self, n: &Vector3<f64>) -> Vector3<f64> {
        self.0 * n
    }

    /// `‖RᵀR − I‖∞`.
    pub fn orthogonality_defect(&self) -> f64 {
        orthogonality_defect(&self.0)
    }
}

fn orthogonality_defect(m: &Matrix3<f64>) -> f64 {
    (m.transpose() * m - Matrix3::identity()).amax()
}

/// The matrix `D(Λ, u)` together with the frames it connects.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssTransform {
    matrix: Matrix4<f64>,
    source_u: FourVelocity,
    target_u: FourVelocity,
}

impl AssTransform {
    pub fn identity(u: FourVelocity) -> Self {
        Self {
            matrix: Matrix4::identity(),
            source_u: u,
            target_u: u,
        }
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.matrix
    }

    pub fn source(&self) -> &FourVelocity {
        &self.source_u
    }

    pub fn target(&self) -> &FourVelocity {
        &self.target_u
    }

    pub fn spatial_block(&self) -> Matrix3<f64> {
        self.matrix.fixed_view::<3, 3>(1, 1).into_owned()
    }

    pub fn apply(&self, x: &FourVector) -> FourVector {
        FourVector::from_vector4(&(self.matrix * x.to_vector4()))
    }

    /// The transform back from the target frame to the source frame.
    pub fn inverse(&self) -> Result<Self> {
        let matrix = self.matrix.try_inverse().ok_or(Error::SingularTransform)?;
        Ok(Self {
            matrix,
            source_u: self.target_u,
            target_u: self.source_u,
        })
    }

    /// `next ∘ self`; `next` must start in the frame where `self` ends.
    pub fn then(&self, next: &AssTransform) -> Result<Self> {
        if !next.source_u.approx_eq(&self.target_u, DEFAULT_TOLERANCE) {
            return Err(Error::FrameMismatch);
        }
        Ok(Self {
            matrix: next.matrix * self.matrix,
            source_u: self.source_u,
            target_u: next.target_u,
        })
    }

    /// `‖Dᵀ g(u′) D − g(u)‖∞`.
    pub fn congruence_defect(&self) -> f64 {
        let lhs = self.matrix.transpose() * metric(&self.target_u).0 * self.matrix;
        (lhs - metric(&self.source_u).0).amax()
    }
}

/// Inverts `σ⃗ = u⃗/u⁰` under the four-velocity normalization.
pub fn four_velocity_from_velocity(sigma: &RelVelocity) -> FourVelocity {
    let s2 = sigma.0.norm_squared();
    // |u⃗|² = (√(1+4σ²) − 1)/2, written without cancellation
    let u2 = 2.0 * s2 / (1.0 + (1.0 + 4.0 * s2).sqrt());
    let t = 1.0 / (1.0 + u2).sqrt();
    FourVelocity::from_raw(t, sigma.0 * t)
}

pub fn metric(u: &FourVelocity) -> AssMetric {
    let mut g = Matrix4::zeros();
    g[(0, 0)] = 1.0;
    let cross = u.space * u.t;
    let block = -Matrix3::identity() + u.space * u.space.transpose() * (u.t * u.t);
    for i in 0..3 {
        g[(0, i + 1)] = cross[i];
        g[(i + 1, 0)] = cross[i];
        for j in 0..3 {
            g[(i + 1, j + 1)] = block[(i, j)];
        }
    }
    AssMetric(g)
}

/// `D(R, u) = diag(1, R)`.
pub fn rotation_transform(r: &Matrix3<f64>, u: &FourVelocity) -> Result<AssTransform> {
    let rotation = WignerRotation::new(*r, DEFAULT_TOLERANCE)?;
    let mut matrix = Matrix4::identity();
    matrix.fixed_view_mut::<3, 3>(1, 1).copy_from(rotation.matrix());
    Ok(AssTransform {
        matrix,
        source_u: *u,
        target_u: FourVelocity::from_raw(u.t, r * u.space),
    })
}

/// `Ω(w⃗, u) = I + w⃗w⃗ᵀ/(1+√(1+|w⃗|²)) − u⁰ w⃗u⃗ᵀ`, the spatial block of a boost.
pub fn omega(w: &Vector3<f64>, u: &FourVelocity) -> Matrix3<f64> {
    Matrix3::identity() + w * w.transpose() / (1.0 + (1.0 + w.norm_squared()).sqrt())
        - w * u.space.transpose() * u.t
}

/// `B(u) = I + u⁰/(1+u⁰) u⃗u⃗ᵀ`, the spatial block of the boost from the PF.
pub fn pf_boost_block(u: &FourVelocity) -> Matrix3<f64> {
    Matrix3::identity() + u.space * u.space.transpose() * (u.t / (1.0 + u.t))
}

/// Closed-form `B(u)⁻¹ = I − (u⁰)²/(1+u⁰) u⃗u⃗ᵀ`.
pub fn pf_boost_block_inverse(u: &FourVelocity) -> Matrix3<f64> {
    Matrix3::identity() - u.space * u.space.transpose() * (u.t * u.t / (1.0 + u.t))
}

/// Boost `D(w, u)` to the frame moving with four-velocity `w` relative to
/// the frame labelled by `u`.
///
/// `w` must have unit length in `g(u)`, which is automatic when it comes from
/// [`relative_four_velocity`] or [`RelFourVelocity::from_velocity`].
pub fn boost_transform(w: &RelFourVelocity, u: &FourVelocity) -> Result<AssTransform> {
    if !(w.t > 0.0) {
        return Err(Error::NonPositiveTimeComponent(w.t));
    }
    let mut matrix = Matrix4::zeros();
    matrix[(0, 0)] = 1.0 / w.t;
    for i in 0..3 {
        matrix[(i + 1, 0)] = -w.space[i];
    }
    matrix.fixed_view_mut::<3, 3>(1, 1).copy_from(&omega(&w.space, u));
    // same vector as D·u, with less cancellation for fast frames
    Ok(AssTransform {
        matrix,
        source_u: *u,
        target_u: boosted_pf_four_velocity(w, u),
    })
}

/// Four-velocity of frame `u'` as seen from frame `u`.
pub fn relative_four_velocity(u: &FourVelocity, u_prime: &FourVelocity) -> Result<RelFourVelocity> {
    let denominator = 1.0 + u.t * u_prime.t * (1.0 + u.space.dot(&u_prime.space));
    if denominator.abs() <= RELATIVE_DENOMINATOR_EPS {
        return Err(Error::SynchronizationSingularity { denominator });
    }
    Ok(RelFourVelocity::new(
        u.t / u_prime.t,
        (u.space - u_prime.space) * ((u.t + u_prime.t) / denominator),
    ))
}

/// PF four-velocity `u_B` seen from the frame boosted by `w` out of `u_A`,
/// in the closed form that eliminates `D` entirely.
pub fn boosted_pf_four_velocity(w: &RelFourVelocity, u_a: &FourVelocity) -> FourVelocity {
    let factor = (1.0 + w.t) / (1.0 + (1.0 + w.space.norm_squared()).sqrt());
    FourVelocity::from_raw(u_a.t / w.t, u_a.space - w.space * (factor / u_a.t))
}

/// Absolute → Einstein synchronization coordinates.
pub fn to_einstein(x: &FourVector, u: &FourVelocity) -> FourVector {
    FourVector::new(x.t + u.t * u.space.dot(&x.space), x.space)
}

/// Einstein → absolute synchronization coordinates.
pub fn from_einstein(x_e: &FourVector, u: &FourVelocity) -> FourVector {
    FourVector::new(x_e.t - u.t * u.space.dot(&x_e.space), x_e.space)
}

/// `v⃗_E = v⃗/(1 + u⁰ v⃗·u⃗)`.
pub fn velocity_to_einstein(v: &RelVelocity, u: &FourVelocity) -> Result<RelVelocity> {
    let denominator = 1.0 + u.t * v.0.dot(&u.space);
    if denominator.abs() <= SYNC_SINGULARITY_EPS {
        return Err(Error::SynchronizationSingularity { denominator });
    }
    Ok(RelVelocity(v.0 / denominator))
}

/// `v⃗ = v⃗_E/(1 − v⃗_E·u⃗_E/u⁰_E)` with `u⁰_E = 1/u⁰`, `u⃗_E = u⃗`.
pub fn velocity_from_einstein(v_e: &RelVelocity, u: &FourVelocity) -> Result<RelVelocity> {
    let u_e = u.to_einstein();
    let denominator = 1.0 - v_e.0.dot(&u_e.space) / u_e.t;
    if denominator.abs() <= SYNC_SINGULARITY_EPS {
        return Err(Error::SynchronizationSingularity { denominator });
    }
    Ok(RelVelocity(v_e.0 / denominator))
}

/// Reichenbach coefficient `ε(n⃗, u) = (1 − u⁰ n⃗·u⃗)/2` for light sent along `n⃗`.
pub fn reichenbach_epsilon(n: &Vector3<f64>, u: &FourVelocity) -> Result<f64> {
    check_unit(n)?;
    Ok(0.5 * (1.0 - u.t * n.dot(&u.space)))
}

/// `D(L_u, ũ)`: the boost carrying `ũ = (1, 0⃗)` to `u`.
pub fn boost_from_pf(u: &FourVelocity) -> AssTransform {
    let mut matrix = Matrix4::zeros();
    matrix[(0, 0)] = u.t;
    for i in 0..3 {
        matrix[(i + 1, 0)] = u.space[i];
    }
    matrix.fixed_view_mut::<3, 3>(1, 1).copy_from(&pf_boost_block(u));
    AssTransform {
        matrix,
        source_u: FourVelocity::preferred(),
        target_u: *u,
    }
}

/// Wigner rotation `D⁻¹(L_{u'}, ũ) D(Λ, u) D(L_u, ũ)` of an arbitrary
/// transform leaving the frame `u`.
pub fn wigner_rotation_general(d: &AssTransform, u: &FourVelocity) -> Result<WignerRotation> {
    wigner_rotation_general_with_tolerance(d, u, DEFAULT_TOLERANCE)
}

pub fn wigner_rotation_general_with_tolerance(
    d: &AssTransform,
    u: &FourVelocity,
    tol: f64,
) -> Result<WignerRotation> {
    if !d.source().approx_eq(u, tol) {
        return Err(Error::FrameMismatch);
    }
    let back = boost_from_pf(d.target())
        .matrix
        .try_inverse()
        .ok_or(Error::SingularTransform)?;
    let product = back * d.matrix * boost_from_pf(u).matrix;
    let mut deviation = (product[(0, 0)] - 1.0).abs();
    for i in 1..4 {
        deviation = deviation.max(product[(0, i)].abs()).max(product[(i, 0)].abs());
    }
    if deviation > tol {
        return Err(Error::NotBlockRotation { deviation });
    }
    WignerRotation::new(product.fixed_view::<3, 3>(1, 1).into_owned(), tol)
}

/// Wigner rotation of the pure boost `w` out of the frame `u_A`, in the
/// closed form `B⁻¹(u_B) Ω(w⃗, u_A) B(u_A)`.
pub fn wigner_rotation_boost(w: &RelFourVelocity, u_a: &FourVelocity) -> Result<WignerRotation> {
    let u_b = boosted_pf_four_velocity(w, u_a);
    let r = pf_boost_block_inverse(&u_b) * omega(&w.space, u_a) * pf_boost_block(u_a);
    WignerRotation::new(r, DEFAULT_TOLERANCE)
}

/// Wigner rotation for observers A and B whose axes are aligned, so that B's
/// frame is reached from A's by a pure boost.
pub fn wigner_rotation_between(u_a: &FourVelocity, u_b: &FourVelocity) -> Result<WignerRotation> {
    wigner_rotation_boost(&relative_four_velocity(u_a, u_b)?, u_a)
}

pub(crate) fn check_unit(n: &Vector3<f64>) -> Result<()> {
    let norm = n.norm();
    if (norm - 1.0).abs() > DEFAULT_TOLERANCE || !norm.is_finite() {
        return Err(Error::NonUnitVector { norm });
    }
    Ok(())
}
