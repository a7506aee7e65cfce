//! Entanglement dynamics of a two-particle Gaussian state, each particle
//! coupled to its own Ohmic heat bath.
//!
//! The state stays Gaussian for all times, so the whole evolution lives in
//! its 4×4 covariance matrix. This crate provides:
//!
//! - [`symplectic`]: covariance matrices, symplectic spectra, partial
//!   transposition, physicality checks, and the logarithmic negativity;
//! - [`states`]: the entangled initial state, its characteristic function,
//!   and its covariance;
//! - [`free_dynamics`]: closed-form evolution for free particles;
//! - [`quadratic_dynamics`]: the generic matrix-exponential propagator, in
//!   particular for a harmonic inter-particle potential;
//! - [`oracle`]: an independent verification path (moment-equation RK4
//!   integration and wavefunction quadrature);
//! - [`analysis`]: sudden-death times, revivals, asymptotes, damping regimes;
//! - [`model`] and [`cli`]: trajectory assembly, run configurations, presets,
//!   and deterministic CSV output.
//!
//! # Example
//!
//! Free evolution loses its entanglement at a finite time (sudden death):
//!
//! ```
//! use gaussbath::prelude::*;
//!
//! let state = InitialState::new(1.0, 1.0)?;
//! let params = SystemParams::new(1.0, 1.0, 1.0, 1.0, 1.0, 0.0, PhysicalConstants::natural())?;
//! let model = Model::new(state, params, Mode::Free)?;
//!
//! let trajectory = model.trajectory(10.0, 400)?;
//! let death = esd_time(&trajectory, model.en_evaluator(), 1e-12)?;
//! assert!(death.is_some());
//! # Ok::<(), gaussbath::Error>(())
//! ```

pub mod analysis;
pub mod cli;
pub mod error;
pub mod free_dynamics;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod quadratic_dynamics;
pub mod states;
pub mod symplectic;

pub use error::{Error, Result};

/// The common imports for working with the library.
pub mod prelude {
    pub use crate::analysis::{asymptote, classify_regime, esd_time, revivals, RegimeClass, Trajectory};
    pub use crate::error::{Error, Result};
    pub use crate::free_dynamics::{
        coefficients_at, covariance_at, evolve_kernels, pt_symplectic_eigs_closed_form,
        QuadraticForm, SystemParams,
    };
    pub use crate::model::{Mode, Model};
    pub use crate::states::{
        initial_characteristic_function, initial_covariance, InitialState, PhysicalConstants,
    };
    pub use crate::symplectic::{
        is_physical, log_negativity, partial_transpose, symplectic_eigenvalues, symplectic_form,
        CovarianceMatrix, Particle,
    };
}
