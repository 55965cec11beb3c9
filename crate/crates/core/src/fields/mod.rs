//! Grid samples of `C^N`-valued functions on `[-L, L)^d`, analytic test
//! functions, discrete norms, finite differences and interpolation.

mod csv_io;
mod grid;
mod interp;
mod norms;
mod schwartz;
mod stencil;

pub use csv_io::{read_csv, write_csv};
pub use grid::{GridField, GridSpec, DECAY_TOL};
pub use interp::{interpolate, interpolate_with, Stencil};
pub use norms::{lp_norm, sobolev_norms, sobolev_norms_with, SobolevNorms};
pub use schwartz::SchwartzFunction;
pub use stencil::{
    apply_l_infty_grid, apply_l_infty_grid_with, derivative, drift_term, laplacian, mixed_derivative, second_derivative,
};
