//! Brute-force measurement-sequence simulator.
//!
//! Works with explicit two-particle states on a spatial lattice. Observer A
//! measures first (selective projective reduction), B's detector is then
//! pulled back into A's frame (region through the inverse spatial block of
//! the boost, analyzer through the Wigner rotation), and B's reduction is
//! applied to the conditioned state. Measurements are simultaneous, so there
//! is no free evolution between the two steps.

mod grid;
mod state;

pub use grid::{Aabb, Grid, Region};
pub use state::{region_projector, LatticeState, LocalProjector, Particle, NORMALIZATION_TOLERANCE};

use nalgebra::Vector3;
use rayon::prelude::*;

use crate::correlation::{correlation_exact, EprScenario};
use crate::error::{Error, Result};
use crate::kinematics::{
    boost_transform, relative_four_velocity, wigner_rotation_general, AssTransform, FourVelocity,
};
use crate::spin::{generators, JointSpinAmplitude};

/// Transports the projector `P_{Ω, n⃗}` through `d`: the region is mapped by
/// the spatial block of `d`, the direction by its Wigner rotation.
pub fn transport_projector(region: &Region, n: &Vector3<f64>, d: &AssTransform) -> Result<(Region, Vector3<f64>)> {
    let wigner = wigner_rotation_general(d, d.source())?;
    Ok((region.mapped(&d.spatial_block())?, wigner.apply(n)))
}

/// Outcome statistics of A-then-B measurements.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementRecord {
    /// A's possible outcomes `μ_a`, in order `s, …, −s`.
    pub outcomes_a: Vec<f64>,
    pub outcomes_b: Vec<f64>,
    /// `p(μ_a)`, indexed like `outcomes_a`.
    pub p_a: Vec<f64>,
    /// `p(μ_b | μ_a)` as `[i_a][i_b]`; zero rows where `p(μ_a) = 0`.
    pub p_b_given_a: Vec<Vec<f64>>,
    /// `Σ μ_a μ_b p(μ_a) p(μ_b|μ_a)`.
    pub correlation: f64,
}

impl MeasurementRecord {
    pub fn p_a_of(&self, mu_a: f64) -> Option<f64> {
        let i = position(&self.outcomes_a, mu_a)?;
        Some(self.p_a[i])
    }

    pub fn p_b_given(&self, mu_b: f64, mu_a: f64) -> Option<f64> {
        let i = position(&self.outcomes_a, mu_a)?;
        let j = position(&self.outcomes_b, mu_b)?;
        Some(self.p_b_given_a[i][j])
    }
}

fn position(values: &[f64], x: f64) -> Option<usize> {
    values.iter().position(|&v| (v - x).abs() < 1e-9)
}

/// Sequential and joint evaluations of the same correlation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SequenceJointReport {
    pub sequential: f64,
    pub joint: f64,
    pub difference: f64,
}

/// Everything the oracle computes for one state.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub record: MeasurementRecord,
    pub sequential: f64,
    pub joint: f64,
    pub closed_form: f64,
    pub max_difference: f64,
}

/// Detector layout and frames for one EPR run.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub grid: Grid,
    pub region_a: Region,
    pub a: Vector3<f64>,
    pub region_b: Region,
    pub b: Vector3<f64>,
    pub u_a: FourVelocity,
    pub u_b: FourVelocity,
}

/// B's detector expressed in A's frame, plus A's detector, as cell masks.
#[derive(Debug, Clone, PartialEq)]
pub struct PulledBack {
    pub mask_a: Vec<bool>,
    pub region_b_in_a: Region,
    pub mask_b_in_a: Vec<bool>,
    pub b_in_a: Vector3<f64>,
}

impl Experiment {
    /// The boost from A's frame to B's.
    pub fn boost(&self) -> Result<AssTransform> {
        boost_transform(&relative_four_velocity(&self.u_a, &self.u_b)?, &self.u_a)
    }

    /// Pulls B's detector back to A's frame and checks the regions are
    /// disjoint on the grid.
    pub fn pull_back(&self) -> Result<PulledBack> {
        let inverse = self.boost()?.inverse()?;
        let (region_b_in_a, b_in_a) = transport_projector(&self.region_b, &self.b, &inverse)?;
        let mask_a = self.grid.mask(&self.region_a);
        let mask_b_in_a = self.grid.mask(&region_b_in_a);
        let shared = mask_a.iter().zip(&mask_b_in_a).filter(|(x, y)| **x && **y).count();
        if shared > 0 {
            return Err(Error::RegionOverlap { cells: shared });
        }
        Ok(PulledBack {
            mask_a,
            region_b_in_a,
            mask_b_in_a,
            b_in_a,
        })
    }

    fn projectors(&self, state: &LatticeState, pulled: &PulledBack) -> Result<(Vec<LocalProjector>, Vec<LocalProjector>)> {
        let rep_a = generators(state.spin_alpha());
        let rep_b = generators(state.spin_beta());
        let on_a = state
            .spin_alpha()
            .eigenvalues()
            .into_iter()
            .map(|mu| region_projector(&self.region_a, &self.a, mu, &self.grid, &rep_a, Particle::Alpha))
            .collect::<Result<Vec<_>>>()?;
        let on_b = state
            .spin_beta()
            .eigenvalues()
            .into_iter()
            .map(|mu| {
                region_projector(&pulled.region_b_in_a, &pulled.b_in_a, mu, &self.grid, &rep_b, Particle::Beta)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((on_a, on_b))
    }

    fn check_state(&self, state: &LatticeState) -> Result<()> {
        if state.cells() != self.grid.len() {
            return Err(Error::DimensionMismatch {
                expected: (self.grid.len(), 1),
                actual: (state.cells(), 1),
            });
        }
        let norm2 = state.norm_squared();
        if (norm2 - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::NotNormalized(norm2));
        }
        Ok(())
    }

    /// A's selective measurement, then B's on each conditioned state.
    pub fn run_sequence(&self, state: &LatticeState) -> Result<MeasurementRecord> {
        self.check_state(state)?;
        let pulled = self.pull_back()?;
        let (on_a, on_b) = self.projectors(state, &pulled)?;
        let branches: Vec<(f64, Vec<f64>)> = on_a
            .par_iter()
            .map(|pa| {
                let reduced = pa.apply(state);
                let p = reduced.norm_squared();
                if p <= 0.0 {
                    return (0.0, vec![0.0; on_b.len()]);
                }
                let conditioned = LatticeState::normalized(
                    reduced.cells(),
                    reduced.spin_alpha(),
                    reduced.spin_beta(),
                    reduced.amplitudes().to_vec(),
                )
                .expect("nonzero branch");
                (p, on_b.iter().map(|pb| pb.apply(&conditioned).norm_squared()).collect())
            })
            .collect();

        let mut correlation = 0.0;
        for (pa, (p, conditional)) in on_a.iter().zip(&branches) {
            for (pb, q) in on_b.iter().zip(conditional) {
                correlation += pa.eigenvalue * pb.eigenvalue * p * q;
            }
        }
        let (p_a, p_b_given_a) = branches.into_iter().unzip();
        Ok(MeasurementRecord {
            outcomes_a: on_a.iter().map(|p| p.eigenvalue).collect(),
            outcomes_b: on_b.iter().map(|p| p.eigenvalue).collect(),
            p_a,
            p_b_given_a,
            correlation,
        })
    }

    /// `Σ μ_a μ_b ⟨Ψ| P^{μ_a}_{A,a⃗} ⊗ P^{μ_b}_{B_A,b⃗′} |Ψ⟩`, without any
    /// state reduction.
    pub fn joint_correlation(&self, state: &LatticeState) -> Result<f64> {
        self.check_state(state)?;
        let pulled = self.pull_back()?;
        let (on_a, on_b) = self.projectors(state, &pulled)?;
        let mut total = 0.0;
        for pb in &on_b {
            let after_b = pb.apply(state);
            for pa in &on_a {
                total += pa.eigenvalue * pb.eigenvalue * state.inner(&pa.apply(&after_b)).re;
            }
        }
        Ok(total)
    }

    pub fn sequence_vs_joint(&self, state: &LatticeState) -> Result<SequenceJointReport> {
        let sequential = self.run_sequence(state)?.correlation;
        let joint = self.joint_correlation(state)?;
        Ok(SequenceJointReport {
            sequential,
            joint,
            difference: (sequential - joint).abs(),
        })
    }

    /// The closed-form trace formula integrated over `A × B_A`, one cell pair
    /// at a time.
    pub fn closed_form(&self, state: &LatticeState) -> Result<f64> {
        self.check_state(state)?;
        let pulled = self.pull_back()?;
        let mut total = 0.0;
        for i in (0..state.cells()).filter(|&i| pulled.mask_a[i]) {
            for j in (0..state.cells()).filter(|&j| pulled.mask_b_in_a[j]) {
                let block = JointSpinAmplitude::new(state.spin_block(i, j), 1.0);
                let weight = block.spin_norm_squared();
                if weight == 0.0 {
                    continue;
                }
                let scenario = EprScenario::new(
                    self.u_a,
                    self.u_b,
                    self.a,
                    self.b,
                    state.spin_alpha(),
                    state.spin_beta(),
                    block.normalized()?.with_weight(weight),
                )?;
                total += correlation_exact(&scenario)?.value;
            }
        }
        Ok(total)
    }

    /// Sequential, joint and closed-form correlations side by side.
    pub fn compare(&self, state: &LatticeState) -> Result<OracleReport> {
        let record = self.run_sequence(state)?;
        let joint = self.joint_correlation(state)?;
        let closed_form = self.closed_form(state)?;
        let sequential = record.correlation;
        let max_difference = (sequential - joint)
            .abs()
            .max((sequential - closed_form).abs())
            .max((joint - closed_form).abs());
        Ok(OracleReport {
            record,
            sequential,
            joint,
            closed_form,
            max_difference,
        })
    }
}
