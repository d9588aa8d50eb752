use nalgebra::Vector3;
use num_complex::Complex64;

use super::grid::{Grid, Region};
use crate::error::{Error, Result};
use crate::spin::{eigenbasis, CMatrix, JointSpinAmplitude, Spin, SpinRep};

/// Tolerance on `Σ|amplitude|² = 1`.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

/// Two-particle state on a spatial lattice, with amplitudes indexed by
/// `(cell_α, cell_β, λ_α, λ_β)`. The cell volume is absorbed into the
/// amplitudes, so the state is a plain normalized vector.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeState {
    cells: usize,
    spin_alpha: Spin,
    spin_beta: Spin,
    amplitudes: Vec<Complex64>,
}

impl LatticeState {
    /// Wraps normalized amplitudes.
    pub fn new(cells: usize, spin_alpha: Spin, spin_beta: Spin, amplitudes: Vec<Complex64>) -> Result<Self> {
        let state = Self::unnormalized(cells, spin_alpha, spin_beta, amplitudes)?;
        let norm2 = state.norm_squared();
        if (norm2 - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::NotNormalized(norm2));
        }
        Ok(state)
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(cells: usize, spin_alpha: Spin, spin_beta: Spin, amplitudes: Vec<Complex64>) -> Result<Self> {
        let mut state = Self::unnormalized(cells, spin_alpha, spin_beta, amplitudes)?;
        let norm2 = state.norm_squared();
        if !(norm2 > 0.0) || !norm2.is_finite() {
            return Err(Error::NotNormalized(norm2));
        }
        let scale = 1.0 / norm2.sqrt();
        state.amplitudes.iter_mut().for_each(|z| *z *= scale);
        Ok(state)
    }

    fn unnormalized(cells: usize, spin_alpha: Spin, spin_beta: Spin, amplitudes: Vec<Complex64>) -> Result<Self> {
        let expected = cells * cells * spin_alpha.dim() * spin_beta.dim();
        if amplitudes.len() != expected {
            return Err(Error::DimensionMismatch {
                expected: (expected, 1),
                actual: (amplitudes.len(), 1),
            });
        }
        Ok(Self {
            cells,
            spin_alpha,
            spin_beta,
            amplitudes,
        })
    }

    /// `χ(x⃗, y⃗) ψ` sampled at the cell centres and normalized over the grid.
    pub fn from_envelope(
        grid: &Grid,
        spin: &JointSpinAmplitude,
        envelope: impl Fn(&Vector3<f64>, &Vector3<f64>) -> Complex64,
    ) -> Result<Self> {
        let (spin_alpha, spin_beta) = spins_of(spin)?;
        let mut amplitudes = Vec::with_capacity(grid.len().pow(2) * spin.matrix.len());
        for x in grid.cells() {
            for y in grid.cells() {
                let chi = envelope(x, y);
                for la in 0..spin_alpha.dim() {
                    for lb in 0..spin_beta.dim() {
                        amplitudes.push(chi * spin.matrix[(la, lb)]);
                    }
                }
            }
        }
        Self::normalized(grid.len(), spin_alpha, spin_beta, amplitudes)
    }

    /// Particle α spread uniformly over `mask_a`, β over `mask_b`, with spin
    /// part `spin`.
    pub fn localized(grid: &Grid, mask_a: &[bool], mask_b: &[bool], spin: &JointSpinAmplitude) -> Result<Self> {
        let index_of = |x: &Vector3<f64>| grid.cells().iter().position(|c| c == x);
        Self::from_envelope(grid, spin, |x, y| {
            match (index_of(x), index_of(y)) {
                (Some(i), Some(j)) if mask_a[i] && mask_b[j] => Complex64::from(1.0),
                _ => Complex64::from(0.0),
            }
        })
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn spin_alpha(&self) -> Spin {
        self.spin_alpha
    }

    pub fn spin_beta(&self) -> Spin {
        self.spin_beta
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    fn index(&self, cell_a: usize, cell_b: usize, la: usize, lb: usize) -> usize {
        ((cell_a * self.cells + cell_b) * self.spin_alpha.dim() + la) * self.spin_beta.dim() + lb
    }

    pub fn amplitude(&self, cell_a: usize, cell_b: usize, la: usize, lb: usize) -> Complex64 {
        self.amplitudes[self.index(cell_a, cell_b, la, lb)]
    }

    pub fn norm_squared(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Spin matrix `ψ(x⃗_i, y⃗_j)` for one pair of cells.
    pub fn spin_block(&self, cell_a: usize, cell_b: usize) -> CMatrix {
        CMatrix::from_fn(self.spin_alpha.dim(), self.spin_beta.dim(), |la, lb| {
            self.amplitude(cell_a, cell_b, la, lb)
        })
    }

    /// Probability that α is found in `mask_a` and β in `mask_b`.
    pub fn localization_probability(&self, mask_a: &[bool], mask_b: &[bool]) -> f64 {
        let mut total = 0.0;
        for i in (0..self.cells).filter(|&i| mask_a[i]) {
            for j in (0..self.cells).filter(|&j| mask_b[j]) {
                total += self.spin_block(i, j).iter().map(|z| z.norm_sqr()).sum::<f64>();
            }
        }
        total
    }
}

fn spins_of(spin: &JointSpinAmplitude) -> Result<(Spin, Spin)> {
    let (rows, cols) = spin.matrix.shape();
    if rows == 0 || cols == 0 {
        return Err(Error::DimensionMismatch {
            expected: (1, 1),
            actual: (rows, cols),
        });
    }
    Ok((Spin::from_twice(rows as u32 - 1), Spin::from_twice(cols as u32 - 1)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Particle {
    Alpha,
    Beta,
}

/// `(indicator of region) ⊗ (spin projector)` on one particle, identity on
/// the other.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalProjector {
    pub particle: Particle,
    pub mask: Vec<bool>,
    pub spin: CMatrix,
    pub eigenvalue: f64,
}

impl LocalProjector {
    pub fn apply(&self, state: &LatticeState) -> LatticeState {
        let (da, db) = (state.spin_alpha.dim(), state.spin_beta.dim());
        let mut out = vec![Complex64::from(0.0); state.amplitudes.len()];
        for i in 0..state.cells {
            for j in 0..state.cells {
                let inside = match self.particle {
                    Particle::Alpha => self.mask[i],
                    Particle::Beta => self.mask[j],
                };
                if !inside {
                    continue;
                }
                for la in 0..da {
                    for lb in 0..db {
                        let value: Complex64 = match self.particle {
                            Particle::Alpha => (0..da)
                                .map(|k| self.spin[(la, k)] * state.amplitude(i, j, k, lb))
                                .sum(),
                            Particle::Beta => (0..db)
                                .map(|k| self.spin[(lb, k)] * state.amplitude(i, j, la, k))
                                .sum(),
                        };
                        out[state.index(i, j, la, lb)] = value;
                    }
                }
            }
        }
        LatticeState {
            amplitudes: out,
            ..state.clone()
        }
    }

    /// `⟨ψ|P|ψ⟩`.
    pub fn expectation(&self, state: &LatticeState) -> f64 {
        state.inner(&self.apply(state)).re
    }
}

/// Projector onto "particle found in `region` with spin component `mu`
/// along `n`".
pub fn region_projector(
    region: &Region,
    n: &Vector3<f64>,
    mu: f64,
    grid: &Grid,
    rep: &SpinRep,
    particle: Particle,
) -> Result<LocalProjector> {
    let projector = eigenbasis(n, rep)?
        .into_iter()
        .find(|p| (p.eigenvalue - mu).abs() < 1e-9)
        .ok_or(Error::InvalidEigenvalue(mu))?;
    Ok(LocalProjector {
        particle,
        mask: grid.mask(region),
        spin: projector.matrix,
        eigenvalue: projector.eigenvalue,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::grid::Aabb;
    use crate::spin::{generators, singlet_amplitude};

    fn small_grid() -> Grid {
        Grid::regular(Vector3::zeros(), Vector3::new(2.0, 2.0, 1.0), [2, 2, 1]).unwrap()
    }

    fn spread_state(grid: &Grid) -> LatticeState {
        let mut amplitudes = Vec::new();
        let n = grid.len() * grid.len() * 2 * 3;
        for k in 0..n {
            let t = k as f64;
            amplitudes.push(Complex64::new((0.7 * t).sin(), (1.3 * t + 0.2).cos()));
        }
        LatticeState::normalized(grid.len(), Spin::HALF, Spin::ONE, amplitudes).unwrap()
    }

    #[test]
    fn rejects_unnormalized_and_misshaped() {
        let amps = vec![Complex64::from(1.0); 4];
        assert!(matches!(
            LatticeState::new(1, Spin::HALF, Spin::HALF, amps.clone()),
            Err(Error::NotNormalized(_))
        ));
        assert!(LatticeState::new(1, Spin::HALF, Spin::ONE, amps).is_err());
    }

    #[test]
    fn completeness_over_all_space() {
        let grid = small_grid();
        let state = spread_state(&grid);
        let rep = generators(Spin::ONE);
        let mut sum = vec![Complex64::from(0.0); state.amplitudes().len()];
        for mu in [1.0, 0.0, -1.0] {
            let p = region_projector(&Region::Everywhere, &Vector3::z(), mu, &grid, &rep, Particle::Beta)
                .unwrap();
            for (acc, z) in sum.iter_mut().zip(p.apply(&state).amplitudes()) {
                *acc += z;
            }
        }
        let diff = sum
            .iter()
            .zip(state.amplitudes())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-12);
    }

    #[test]
    fn idempotent_and_hermitian() {
        let grid = small_grid();
        let state = spread_state(&grid);
        let other = LatticeState::normalized(
            grid.len(),
            Spin::HALF,
            Spin::ONE,
            state.amplitudes().iter().rev().map(|z| z * Complex64::new(0.3, 1.0)).collect(),
        )
        .unwrap();
        let region = Region::boxes([Aabb::new(Vector3::zeros(), Vector3::new(1.0, 2.0, 1.0))]);
        let n = Vector3::new(0.2, 0.4, -0.8).normalize();
        let p = region_projector(&region, &n, 0.5, &grid, &generators(Spin::HALF), Particle::Alpha).unwrap();
        let once = p.apply(&state);
        let twice = p.apply(&once);
        assert!((once.inner(&twice) - once.inner(&once)).norm() < 1e-12);
        assert!((twice.norm_squared() - once.norm_squared()).abs() < 1e-12);
        let lhs = other.inner(&p.apply(&state));
        let rhs = p.apply(&other).inner(&state);
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn expectation_matches_direct_sum() {
        let grid = small_grid();
        let state = spread_state(&grid);
        let rep = generators(Spin::ONE);
        let region = Region::boxes([Aabb::new(Vector3::new(1.0, 0.0, 0.0), Vector3::new(2.0, 2.0, 1.0))]);
        let n = Vector3::new(1.0, -1.0, 1.0).normalize();
        let p = region_projector(&region, &n, 0.0, &grid, &rep, Particle::Beta).unwrap();
        // independent sum: Σ_{y ∈ region} Σ_x |P ψ(x, y)ᵀ|², β index on the columns
        let spin_p = eigenbasis(&n, &rep).unwrap().swap_remove(1).matrix;
        let mut direct = 0.0;
        for (j, y) in grid.cells().iter().enumerate() {
            if !region.contains(y) {
                continue;
            }
            for i in 0..grid.len() {
                let block = state.spin_block(i, j);
                direct += (&spin_p * block.transpose()).iter().map(|z| z.norm_sqr()).sum::<f64>();
            }
        }
        assert!((p.expectation(&state) - direct).abs() < 1e-12);
    }

    #[test]
    fn outside_support_has_zero_expectation() {
        let grid = small_grid();
        let mask_a = vec![true, false, false, false];
        let mask_b = vec![false, false, false, true];
        let state = LatticeState::localized(&grid, &mask_a, &mask_b, &singlet_amplitude()).unwrap();
        let elsewhere = Region::boxes([Aabb::new(Vector3::new(1.0, 0.0, 0.0), Vector3::new(2.0, 2.0, 1.0))]);
        let p = region_projector(&elsewhere, &Vector3::z(), -0.5, &grid, &generators(Spin::HALF), Particle::Alpha)
            .unwrap();
        assert_eq!(p.expectation(&state), 0.0);
        assert!((state.localization_probability(&mask_a, &mask_b) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_foreign_eigenvalue() {
        let grid = small_grid();
        let err = region_projector(&Region::Everywhere, &Vector3::z(), 1.0, &grid, &generators(Spin::HALF), Particle::Alpha);
        assert_eq!(err, Err(Error::InvalidEigenvalue(1.0)));
    }
}
