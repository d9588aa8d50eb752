use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};

/// Cell centres of a spatial discretization shared by both particles.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    cells: Vec<Vector3<f64>>,
    cell_volume: f64,
}

impl Grid {
    pub fn new(cells: Vec<Vector3<f64>>, cell_volume: f64) -> Result<Self> {
        if !(cell_volume > 0.0) || !cell_volume.is_finite() {
            return Err(Error::InvalidGrid(format!("cell volume {cell_volume}")));
        }
        if cells.is_empty() {
            return Err(Error::InvalidGrid("no cells".into()));
        }
        if cells.iter().any(|c| !c.iter().all(|x| x.is_finite())) {
            return Err(Error::InvalidGrid("non-finite cell centre".into()));
        }
        for (i, c) in cells.iter().enumerate() {
            if cells[..i].contains(c) {
                return Err(Error::InvalidGrid(format!("duplicate cell {c:?}")));
            }
        }
        Ok(Self { cells, cell_volume })
    }

    /// Regular lattice of `counts` cells filling the box `[min, max]`,
    /// enumerated x-fastest.
    pub fn regular(min: Vector3<f64>, max: Vector3<f64>, counts: [usize; 3]) -> Result<Self> {
        if counts.contains(&0) || (0..3).any(|i| !(max[i] > min[i])) {
            return Err(Error::InvalidGrid(format!("box {min:?}..{max:?} with {counts:?} cells")));
        }
        let step = Vector3::from_fn(|i, _| (max[i] - min[i]) / counts[i] as f64);
        let mut cells = Vec::with_capacity(counts.iter().product());
        for k in 0..counts[2] {
            for j in 0..counts[1] {
                for i in 0..counts[0] {
                    let index = Vector3::new(i as f64 + 0.5, j as f64 + 0.5, k as f64 + 0.5);
                    cells.push(min + index.component_mul(&step));
                }
            }
        }
        Self::new(cells, step.product())
    }

    pub fn cells(&self) -> &[Vector3<f64>] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cell_volume(&self) -> f64 {
        self.cell_volume
    }

    /// Which cell centres lie in `region`.
    pub fn mask(&self, region: &Region) -> Vec<bool> {
        self.cells.iter().map(|c| region.contains(c)).collect()
    }
}

/// Half-open axis-aligned box `[min, max)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: Vector3<f64>,
    pub max: Vector3<f64>,
}

impl Aabb {
    pub fn new(min: Vector3<f64>, max: Vector3<f64>) -> Self {
        Self { min, max }
    }

    pub fn contains(&self, p: &Vector3<f64>) -> bool {
        (0..3).all(|i| p[i] >= self.min[i] && p[i] < self.max[i])
    }
}

/// A detector region.
#[derive(Debug, Clone, PartialEq)]
pub enum Region {
    Everywhere,
    Boxes(Vec<Aabb>),
    /// Image of `base` under a linear map; stores the inverse map so that
    /// membership is decided by pulling points back.
    Mapped {
        base: Box<Region>,
        inverse: Matrix3<f64>,
    },
}

impl Region {
    pub fn boxes(boxes: impl IntoIterator<Item = Aabb>) -> Self {
        Region::Boxes(boxes.into_iter().collect())
    }

    pub fn contains(&self, p: &Vector3<f64>) -> bool {
        match self {
            Region::Everywhere => true,
            Region::Boxes(boxes) => boxes.iter().any(|b| b.contains(p)),
            Region::Mapped { base, inverse } => base.contains(&(inverse * p)),
        }
    }

    /// `{ m x : x ∈ self }`.
    pub fn mapped(&self, m: &Matrix3<f64>) -> Result<Region> {
        if m.determinant().abs() < 1e-300 {
            return Err(Error::SingularTransform);
        }
        let inverse = m.try_inverse().ok_or(Error::SingularTransform)?;
        Ok(match self {
            Region::Everywhere => Region::Everywhere,
            Region::Mapped {
                base,
                inverse: inner,
            } => Region::Mapped {
                base: base.clone(),
                inverse: inner * inverse,
            },
            other => Region::Mapped {
                base: Box::new(other.clone()),
                inverse,
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regular_grid_centres() {
        let g = Grid::regular(Vector3::zeros(), Vector3::new(2.0, 1.0, 1.0), [2, 1, 1]).unwrap();
        assert_eq!(g.cells(), &[Vector3::new(0.5, 0.5, 0.5), Vector3::new(1.5, 0.5, 0.5)]);
        assert_eq!(g.cell_volume(), 1.0);
    }

    #[test]
    fn invalid_grids() {
        assert!(Grid::new(vec![Vector3::zeros()], 0.0).is_err());
        assert!(Grid::new(vec![Vector3::zeros(), Vector3::zeros()], 1.0).is_err());
        assert!(Grid::regular(Vector3::zeros(), Vector3::zeros(), [1, 1, 1]).is_err());
    }

    #[test]
    fn mapped_region_membership() {
        let unit = Region::boxes([Aabb::new(Vector3::zeros(), Vector3::repeat(1.0))]);
        let stretch = Matrix3::from_diagonal(&Vector3::new(2.0, 1.0, 1.0));
        let big = unit.mapped(&stretch).unwrap();
        assert!(big.contains(&Vector3::new(1.5, 0.5, 0.5)));
        assert!(!unit.contains(&Vector3::new(1.5, 0.5, 0.5)));
        let back = big.mapped(&stretch.try_inverse().unwrap()).unwrap();
        assert!(!back.contains(&Vector3::new(1.5, 0.5, 0.5)));
        assert!(back.contains(&Vector3::new(0.9, 0.5, 0.5)));
        assert_eq!(unit.mapped(&Matrix3::zeros()), Err(Error::SingularTransform));
    }
}
