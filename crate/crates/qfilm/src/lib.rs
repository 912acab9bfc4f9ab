//! Thin-film Landau-de Gennes model at desk scale.
//!
//! A library (and CLI) for the variational study of nematic liquid-crystal
//! films via the Q-tensor order parameter:
//!
//! * exact classification of the quadratic surface energy into its five
//!   bounded regimes (with constructed minimizers) or an unbounded verdict
//!   with an explicit witness;
//! * the non-dimensionalized 3D film energy `F_eps` on the unit slab and its
//!   2D thin-film limit `F_0` over constrained tensor fields, both with
//!   analytic gradients and a Barzilai-Borwein descent solver;
//! * the reduced planar Ginzburg-Landau/Allen-Cahn functional in the
//!   `(p1, p2)` variables, with boundary-data constructors, a linear
//!   stability threshold for the trivial branch, and delta-continuation;
//! * diagnostics: vortex detection by plaquette winding, boundary-layer
//!   widths, biaxiality fields, and a thin-film convergence study harness
//!   tying the 3D and 2D solvers together.

pub mod analysis;
pub mod cli;
pub mod config;
pub mod energy2d;
pub mod energy3d;
pub mod error;
pub mod grid;
pub mod io;
pub mod minimizer;
pub mod solver;
pub mod surface;
pub mod tensor;
pub mod vec3;

pub use error::{Error, Result};
