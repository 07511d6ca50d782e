//! Quantitative rectifiability diagnostics for varifolds.
//!
//! Every measure is handled as an [`AtomicVarifold`], a finite family of
//! weighted `(point, plane)` pairs. Discrete varifolds on cartesian grids
//! ([`DiscreteVarifold`]) are built from atoms by [`discretize`] and turned
//! back into atoms by quadrature ([`DiscreteVarifold::atomize`]).
//!
//! The main quantities:
//!
//! - [`first_variation`]: `|δV_K|(Ω)` of a discrete varifold, summed face by face.
//! - [`energy_alpha`]: the averaged height excess `E_α(x, P, V)`, exact on atoms.
//! - [`estimate_tangent`]: the minimizer of `P ↦ E_α(x, P, V)`, via an eigenproblem.
//! - [`ahlfors_constants`], [`jones_beta`], [`hypothesis_report`]: density and
//!   flatness checks across a sequence of scales.
//!
//! ```
//! use varifold_core::{sample_circle, estimate_tangent, EnergyParams, Plane};
//!
//! let circle = sample_circle([0.0, 0.0], 1.0, 2000).unwrap();
//! let params = EnergyParams::new(0.1).unwrap();
//! let est = estimate_tangent(&[1.0, 0.0], &circle, &params).unwrap();
//! let vertical = Plane::coordinate(2, &[1]).unwrap();
//! assert!(est.plane.angle(&vertical).unwrap() < 1e-6);
//! ```

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod energy;
pub mod error;
pub mod firstvar;
pub mod grassmann;
pub mod gridding;
pub mod io;
pub mod regularity;
pub mod tangent;
pub mod varifold;

pub use energy::{
    energy_alpha, energy_alpha_oracle, energy_alpha_value, height_excess, integrated_energy,
    weight_kernel, EnergyParams, EnergyReport, Subsample,
};
pub use error::{Error, Result};
pub use firstvar::{explosion_sweep, first_variation, FaceKind, FaceTerm, FirstVariationReport, SweepRow};
pub use grassmann::{
    mean_plane, mean_plane_spectrum, principal_subspace, symmetric_eigen, Plane, PrincipalSubspace,
    SymMatrix,
};
pub use gridding::{discretize, CartesianGrid, Cell, CellIndex, DiscreteVarifold};
pub use regularity::{
    ahlfors_constants, density_ratios, hypothesis_report, jones_beta, jones_floor, jones_integral,
    unit_ball_volume, AhlforsConstants, DensitySample, HypothesisCheck, RegularityReport,
    ReportConfig, ScaleInput, ScaleRow,
};
pub use tangent::{
    estimate_tangent, grid_search_oracle, moment_matrix, sample_planes, tangent_field,
    TangentEstimate,
};
pub use varifold::{
    sample_circle, sample_graph, sample_line, sample_square_cloud, Atom, AtomicVarifold, BoxRegion,
};
