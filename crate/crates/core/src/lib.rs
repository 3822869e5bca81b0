//! Simulation and estimation toolkit for the hypoelliptic Brownian motion
//! on the Heisenberg group.
//!
//! * [`group`]: group law, homogeneous norm, dilations, translation
//!   differentials and horizontality of polygonal paths.
//! * [`sim`]: seeded simulation of `g_t = (𝐖_t, A_t)` and path statistics.
//! * [`estimate`]: small-ball probabilities, rate fits, exit-time tails and
//!   distributional identity checks.
//! * [`spectra`]: Dirichlet eigenvalues and the resulting bracket for the
//!   small-deviation constant.
//! * [`chung`]: law-of-iterated-logarithm traces and band checks.
//! * [`checks`]: randomized structural property suite.

pub mod checks;
pub mod chung;
pub mod error;
pub mod estimate;
pub mod fmt;
pub mod group;
pub mod parallel;
pub mod process;
pub mod rng;
pub mod sim;
pub mod spectra;
pub mod stats;

pub use error::{HeisError, Result};
pub use group::{GroupElement, PolygonalPath, Side, SymplecticValue, TangentVector};
pub use process::ProcessKind;
pub use sim::{HeisenbergPath, PathStats, SimConfig};
pub use spectra::BoundResult;
