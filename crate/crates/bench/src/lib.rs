//! Shared fixtures for the solver benchmarks.

use std::f64::consts::PI;

use bintomo::phantom::{make_phantom, PhantomName};
use bintomo::projector::build_parallel_operator;
use bintomo::{BinaryImage, GreyLevels, GridSpec, Kernel, ParallelGeometry, SparseOperator};

/// A noise-free parallel-beam instance: strip-kernel data, Joseph-kernel model.
pub struct Desk {
    pub truth: BinaryImage,
    pub a: SparseOperator,
    pub y: Vec<f64>,
}

pub fn geometry(angles: usize, theta_max: f64, n: usize, kernel: Kernel) -> ParallelGeometry {
    ParallelGeometry::new(ParallelGeometry::equispaced_angles(angles, theta_max), n, 1.0, kernel).unwrap()
}

pub fn desk(name: PhantomName, n: usize, angles: usize) -> Desk {
    let grid = GridSpec::new(n).unwrap();
    let truth = make_phantom(name, n).unwrap().with_levels(GreyLevels::UNIT);
    let data = build_parallel_operator(&grid, &geometry(angles, PI / 2.0, n, Kernel::Strip)).unwrap();
    let a = build_parallel_operator(&grid, &geometry(angles, PI / 2.0, n, Kernel::Joseph)).unwrap();
    let y = data.apply_forward(&truth.values()).unwrap();
    Desk { truth, a, y }
}
