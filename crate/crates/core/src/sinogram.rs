//! Measured ray sums with their acquisition geometry.

use crate::error::{check_len, Error, Result};
use crate::geometry::{GridSpec, LatticeGeometry, ParallelGeometry};
use crate::operator::SparseOperator;
use crate::projector::{build_lattice_operator, build_parallel_operator};

#[derive(Debug, Clone, PartialEq)]
pub enum GeometryTag {
    Lattice { grid: GridSpec, geometry: LatticeGeometry },
    Parallel { grid: GridSpec, geometry: ParallelGeometry },
    /// Data whose operator is supplied separately.
    External,
}

impl GeometryTag {
    /// Builds the operator described by the tag.
    pub fn operator(&self) -> Result<SparseOperator> {
        match self {
            GeometryTag::Lattice { grid, geometry } => build_lattice_operator(grid, geometry),
            GeometryTag::Parallel { grid, geometry } => build_parallel_operator(grid, geometry),
            GeometryTag::External => Err(Error::InvalidGeometry("sinogram carries no geometry".into())),
        }
    }

    pub fn num_rays(&self) -> Option<usize> {
        match self {
            GeometryTag::Lattice { grid, geometry } => Some(geometry.num_rays(grid.n())),
            GeometryTag::Parallel { geometry, .. } => Some(geometry.num_rays()),
            GeometryTag::External => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sinogram {
    values: Vec<f64>,
    weights: Option<Vec<f64>>,
    geometry: GeometryTag,
}

impl Sinogram {
    pub fn new(values: Vec<f64>, geometry: GeometryTag) -> Result<Self> {
        if let Some(m) = geometry.num_rays() {
            check_len(m, values.len())?;
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("sinogram values must be finite".into()));
        }
        Ok(Self { values, weights: None, geometry })
    }

    pub fn with_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        check_len(self.values.len(), weights.len())?;
        if weights.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
            return Err(Error::InvalidArgument("weights must be positive and finite".into()));
        }
        self.weights = Some(weights);
        Ok(self)
    }

    pub fn without_weights(mut self) -> Self {
        self.weights = None;
        self
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    pub fn geometry(&self) -> &GeometryTag {
        &self.geometry
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Errors unless the sinogram conforms to `a`.
    pub fn check_operator(&self, a: &SparseOperator) -> Result<()> {
        check_len(a.rows(), self.values.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validates_length_and_weights() {
        let grid = GridSpec::new(2).unwrap();
        let tag = GeometryTag::Lattice { grid, geometry: "hv".parse().unwrap() };
        assert!(Sinogram::new(vec![0.0; 3], tag.clone()).is_err());
        let s = Sinogram::new(vec![0.0; 4], tag).unwrap();
        assert!(s.clone().with_weights(vec![1.0, 1.0, 0.0, 1.0]).is_err());
        let w = s.with_weights(vec![1.0; 4]).unwrap();
        assert_eq!(w.weights().unwrap().len(), 4);
        assert_eq!(w.geometry().operator().unwrap().rows(), 4);
    }
}
