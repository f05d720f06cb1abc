//! Numerical model of the quantum channel between two pointlike two-level
//! (Unruh-DeWitt) detectors coupled through a free scalar field in 3+1
//! dimensional Minkowski spacetime.
//!
//! The crate is organised bottom-up:
//!
//! * [`scenario`] and [`config`]: detector, field and switching configuration.
//! * [`correlators`]: Wightman, commutator, Feynman and positive-frequency
//!   two-point functions.
//! * [`quadrature`]: nested adaptive integration over time-ordered domains,
//!   delta collapse of massless commutators and regulator extrapolation.
//! * [`channel_params`]: the perturbative channel coefficients `P_e, A, B, C, D`,
//!   the Fermi transition probability and the Glauber-detector leakage.
//! * [`channel_algebra`]: the qubit channel itself, its Kraus and Choi forms.
//! * [`capacity`]: product-state classical capacity and coherent information.
//! * [`vacuum`]: dressed ground state, negativity, adiabatic bounds and the
//!   Casimir-Polder energy.
//! * [`scan`]: tabular sweep results with TSV/JSON emission.

pub mod capacity;
pub mod channel_algebra;
pub mod channel_params;
pub mod config;
pub mod correlators;
pub mod error;
pub mod linalg;
pub mod quadrature;
pub mod scan;
pub mod scenario;
pub mod vacuum;

pub use error::{Error, ErrorKind, Result};
pub use num_complex::Complex64;
