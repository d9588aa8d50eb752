//! Lorentz-covariant spin kinematics in the absolute synchronization scheme
//! and Einstein–Podolsky–Rosen correlation functions for observers moving
//! relative to a preferred frame.
//!
//! * [`kinematics`]: frames, boosts, rotations, synchronization conversions
//!   and Wigner rotations.
//! * [`spin`]: finite-dimensional spin algebra and rotation representations.
//! * [`correlation`]: closed-form correlation functions and their limits.
//! * [`oracle`]: a brute-force measurement-sequence simulator on a spatial
//!   lattice that certifies the closed forms.

pub mod correlation;
pub mod error;
pub mod kinematics;
pub mod oracle;
pub mod spin;

pub use error::{Error, Result};

/// Absolute tolerance for matrix identities (orthogonality, block structure,
/// unit vectors).
pub const DEFAULT_TOLERANCE: f64 = 1e-10;
