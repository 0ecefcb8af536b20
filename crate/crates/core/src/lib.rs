//! Circulant bipartite densities on finite-geometry lines.
//!
//! A `d² × d²` density whose non-zero entries lie on the pattern `M_p`
//! (cyclic lines in `Z_d × Z_d`, shifted by a permutation `p` with
//! `p(0) = 0`) splits into `d` index classes of `d × d` blocks. Positivity
//! and the PPT test reduce to those blocks, and for prime `d` the
//! off-diagonal part expands over products of rank-one projectors drawn
//! from the eigenbases of the discrete Weyl matrices `S_{a,1}`. That
//! expansion is turned into explicit separability certificates.
//!
//! Modules, bottom-up:
//!
//! - [`algebra`]: `Z_d` arithmetic, GF(q) addition tables, permutations, roots of unity.
//! - [`geometry`]: lines in `Z_d²`, the support pattern `M_p` and its index classes.
//! - [`weyl`]: Weyl matrices, projector families, spin coefficients.
//! - [`density`]: circulant density constructors and the named families.
//! - [`analysis`]: eigen/PSD checks, PPT blocks, structural coefficients, certificates, sweeps.
//! - [`io`]: JSON formats for densities, blocks, patterns and reports.

#![forbid(unsafe_code)]

pub mod algebra;
pub mod analysis;
pub mod density;
mod error;
pub mod geometry;
pub mod io;
pub mod matrix;
pub mod weyl;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Library version, echoed in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
