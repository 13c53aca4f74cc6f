//! critwave-core: a numerical laboratory for the radial energy-critical
//! focusing wave equation in ℝ^{1+4},
//!
//!   u_tt − u_rr − (3/r)u_r − u³ = 0,
//!
//! evolved through its 2d reduction ψ = r·u,
//!
//!   ψ_tt = ψ_rr + (1/r)ψ_r − (ψ − ψ³)/r²,
//!
//! with the energy, light-cone, channel-of-energy, and bubble-decomposition
//! diagnostics built on top of the same grid and quadrature layer.

pub mod bessel;
pub mod channels;
pub mod corpus;
pub mod decomposition;
pub mod error;
pub mod evolution;
pub mod field;
pub mod grid;
pub mod ground_state;
pub mod hardy;
pub mod lightcone;
pub mod snapshot;

pub use error::{Error, Result};
pub use field::{Formulation, RadialField, RadialState};
pub use grid::RadialGrid;
