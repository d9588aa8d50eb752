//! JSON input documents.
//!
//! Velocities are preferred-frame velocities `σ⃗` (units of `c`); angles are
//! in radians.

use std::path::Path;

use nalgebra::Vector3;
use num_complex::Complex64;
use serde::Deserialize;

use relepr::kinematics::{boost_transform, four_velocity_from_velocity, FourVelocity, RelFourVelocity, RelVelocity};
use relepr::oracle::{Aabb, Grid, Region};
use relepr::spin::{singlet_amplitude, CMatrix, JointSpinAmplitude, Spin};

use crate::error::CliError;

/// `"singlet"` or a `dim_α × dim_β` matrix of `[re, im]` pairs.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum StateSpec {
    Named(String),
    Matrix(Vec<Vec<[f64; 2]>>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(rename = "pf_velocity_A")]
    pub pf_velocity_a: [f64; 3],
    #[serde(rename = "pf_velocity_B")]
    pub pf_velocity_b: Option<[f64; 3]>,
    #[serde(rename = "relative_velocity_V")]
    pub relative_velocity_v: Option<[f64; 3]>,
    pub analyzer_a: [f64; 3],
    pub analyzer_b: [f64; 3],
    #[serde(default = "half")]
    pub spin_alpha: f64,
    #[serde(default = "half")]
    pub spin_beta: f64,
    #[serde(default = "singlet")]
    pub state: StateSpec,
    #[serde(default = "one")]
    pub weight: f64,
    #[serde(default)]
    pub normalized: bool,
    pub oracle: Option<OracleSpec>,
}

fn half() -> f64 {
    0.5
}

fn one() -> f64 {
    1.0
}

fn singlet() -> StateSpec {
    StateSpec::Named("singlet".into())
}

/// Lattice and detector boxes for the `oracle` subcommand.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSpec {
    pub grid: GridSpec,
    #[serde(rename = "region_A")]
    pub region_a: Vec<BoxSpec>,
    #[serde(rename = "region_B")]
    pub region_b: Vec<BoxSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub min: [f64; 3],
    pub max: [f64; 3],
    pub cells: [usize; 3],
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxSpec {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

/// A scenario with every derived quantity resolved.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub sigma_a: RelVelocity,
    pub sigma_b: RelVelocity,
    pub u_a: FourVelocity,
    pub u_b: FourVelocity,
    pub a: Vector3<f64>,
    pub b: Vector3<f64>,
    pub spin_alpha: Spin,
    pub spin_beta: Spin,
    pub amplitude: JointSpinAmplitude,
    /// Spin-½ singlet, for which the limit formulas apply.
    pub is_singlet: bool,
    pub normalized: bool,
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

pub(crate) fn vector(v: [f64; 3], what: &str) -> Result<Vector3<f64>, CliError> {
    if v.iter().any(|x| !x.is_finite()) {
        return Err(CliError::Parse(format!("{what} must be finite")));
    }
    Ok(Vector3::from(v))
}

fn direction(v: [f64; 3], what: &str) -> Result<Vector3<f64>, CliError> {
    let v = vector(v, what)?;
    let n = v.norm();
    if n == 0.0 {
        return Err(CliError::Parse(format!("{what} must be nonzero")));
    }
    Ok(v / n)
}

/// Frame of B from A's frame and either B's PF velocity or the coordinate
/// velocity `V⃗` of B seen by A.
pub fn frame_b(u_a: &FourVelocity, sigma_b: Option<Vector3<f64>>, v: Option<Vector3<f64>>) -> Result<FourVelocity, CliError> {
    match (sigma_b, v) {
        (Some(s), None) => Ok(four_velocity_from_velocity(&RelVelocity(s))),
        (None, Some(v)) => {
            let w = RelFourVelocity::from_velocity(&RelVelocity(v), u_a)?;
            Ok(*boost_transform(&w, u_a)?.target())
        }
        _ => Err(CliError::Parse(
            "exactly one of pf_velocity_B and relative_velocity_V is required".into(),
        )),
    }
}

impl ScenarioFile {
    pub fn resolve(&self) -> Result<Resolved, CliError> {
        let sigma_a = vector(self.pf_velocity_a, "pf_velocity_A")?;
        let sigma_b = self.pf_velocity_b.map(|v| vector(v, "pf_velocity_B")).transpose()?;
        let v = self.relative_velocity_v.map(|v| vector(v, "relative_velocity_V")).transpose()?;
        let u_a = four_velocity_from_velocity(&RelVelocity(sigma_a));
        let u_b = frame_b(&u_a, sigma_b, v)?;

        let spin_alpha = Spin::new(self.spin_alpha).map_err(|e| CliError::Parse(e.to_string()))?;
        let spin_beta = Spin::new(self.spin_beta).map_err(|e| CliError::Parse(e.to_string()))?;
        if !(self.weight.is_finite() && self.weight >= 0.0) {
            return Err(CliError::Parse(format!("weight must be non-negative, got {}", self.weight)));
        }
        let (matrix, is_singlet) = match &self.state {
            StateSpec::Named(name) if name == "singlet" => {
                if spin_alpha != Spin::HALF || spin_beta != Spin::HALF {
                    return Err(CliError::Parse("the singlet state needs spin_alpha = spin_beta = 0.5".into()));
                }
                (singlet_amplitude().matrix, true)
            }
            StateSpec::Named(name) => return Err(CliError::Parse(format!("unknown state {name:?}"))),
            StateSpec::Matrix(rows) => (explicit_state(rows, spin_alpha, spin_beta)?, false),
        };
        let amplitude = JointSpinAmplitude::new(matrix, 1.0)
            .normalized()
            .map_err(|e| CliError::Parse(e.to_string()))?
            .with_weight(self.weight);

        Ok(Resolved {
            sigma_a: RelVelocity(sigma_a),
            sigma_b: u_b.velocity(),
            u_a,
            u_b,
            a: direction(self.analyzer_a, "analyzer_a")?,
            b: direction(self.analyzer_b, "analyzer_b")?,
            spin_alpha,
            spin_beta,
            amplitude,
            is_singlet,
            normalized: self.normalized,
        })
    }
}

fn explicit_state(rows: &[Vec<[f64; 2]>], spin_alpha: Spin, spin_beta: Spin) -> Result<CMatrix, CliError> {
    let (da, db) = (spin_alpha.dim(), spin_beta.dim());
    if rows.len() != da || rows.iter().any(|r| r.len() != db) {
        return Err(CliError::Parse(format!("state must be a {da}x{db} matrix of [re, im] pairs")));
    }
    if rows.iter().flatten().flatten().any(|x| !x.is_finite()) {
        return Err(CliError::Parse("state entries must be finite".into()));
    }
    Ok(CMatrix::from_fn(da, db, |i, j| Complex64::new(rows[i][j][0], rows[i][j][1])))
}

impl OracleSpec {
    pub fn grid(&self) -> Result<Grid, CliError> {
        let g = &self.grid;
        Grid::regular(vector(g.min, "grid.min")?, vector(g.max, "grid.max")?, g.cells)
            .map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn regions(&self) -> Result<(Region, Region), CliError> {
        let convert = |boxes: &[BoxSpec], what: &str| -> Result<Region, CliError> {
            if boxes.is_empty() {
                return Err(CliError::Parse(format!("{what} needs at least one box")));
            }
            boxes
                .iter()
                .map(|b| Ok(Aabb::new(vector(b.min, what)?, vector(b.max, what)?)))
                .collect::<Result<Vec<_>, CliError>>()
                .map(Region::Boxes)
        };
        Ok((convert(&self.region_a, "region_A")?, convert(&self.region_b, "region_B")?))
    }
}

/// One inclusive axis of a scan, sampled at `steps` evenly spaced points.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub start: f64,
    pub end: f64,
    pub steps: usize,
}

impl Axis {
    pub fn points(&self) -> Vec<f64> {
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                if i == self.steps - 1 {
                    self.end
                } else {
                    self.start + (self.end - self.start) * i as f64 / last
                }
            })
            .collect()
    }

    fn check(&self, what: &str) -> Result<(), CliError> {
        if self.steps < 2 {
            return Err(CliError::Parse(format!("{what}.steps must be at least 2")));
        }
        if !self.start.is_finite() || !self.end.is_finite() {
            return Err(CliError::Parse(format!("{what} range must be finite")));
        }
        Ok(())
    }
}

/// Perpendicular-analyzer scan over `α` (angle between `a⃗×b⃗` and
/// `σ⃗_A×σ⃗_B`) and `β` (angle between `σ⃗_A` and `σ⃗_B`).
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSpec {
    pub alpha: Axis,
    pub beta: Axis,
    pub speed_a: f64,
    pub speed_b: f64,
}

impl ScanSpec {
    pub fn validate(&self) -> Result<(), CliError> {
        self.alpha.check("alpha")?;
        self.beta.check("beta")?;
        for (s, what) in [(self.speed_a, "speed_a"), (self.speed_b, "speed_b")] {
            if !(s.is_finite() && s >= 0.0) {
                return Err(CliError::Parse(format!("{what} must be finite and non-negative")));
            }
        }
        Ok(())
    }
}
