//! Command-line front end for `relepr`: scenario files in, CSV reports out.

pub mod commands;
pub mod error;
pub mod scenario;

pub use error::CliError;

/// Parses `x,y,z` into a finite 3-vector.
pub fn parse_vector(s: &str) -> Result<nalgebra::Vector3<f64>, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated numbers, got {s:?}"));
    }
    let mut v = nalgebra::Vector3::zeros();
    for (i, p) in parts.iter().enumerate() {
        v[i] = p.parse::<f64>().map_err(|e| format!("{p:?}: {e}"))?;
        if !v[i].is_finite() {
            return Err(format!("{p:?} is not finite"));
        }
    }
    Ok(v)
}
