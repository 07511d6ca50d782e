//! Workloads shared by the benchmarks.

use varifold_core::{discretize, sample_circle, AtomicVarifold, BoxRegion, CartesianGrid, DiscreteVarifold};

/// Circle of radius 1/4 in the unit square.
pub fn circle(count: usize) -> AtomicVarifold {
    sample_circle([0.5, 0.5], 0.25, count)
        .expect("valid circle")
        .with_domain(BoxRegion::unit(2))
        .expect("circle fits the unit square")
}

pub fn discrete_circle(count: usize, h: f64) -> DiscreteVarifold {
    let v = circle(count);
    let grid = CartesianGrid::covering(v.domain(), h).expect("positive h");
    discretize(&v, &grid).expect("grid covers the domain")
}
