//! Numerical dynamics of a two-level emitter decaying into a discretized
//! photon continuum that is itself monitored by a spatially localized
//! detector continuum.
//!
//! The one-excitation sector is closed, so the state is a complex amplitude
//! vector (emitter, one photon per mode, one detector quantum per label) and
//! the dynamics is a linear Schrödinger equation. The crate provides
//!
//! - model builders: mode grids, emitter-photon couplings with displacement
//!   phases, detector responses, and detection kernels ([`grid`],
//!   [`coupling`], [`kernel`], [`model`]);
//! - a structured fixed-step integrator exploiting the factorized form of
//!   the equations of motion ([`dynamics`]);
//! - observables: populations, normalized decay rate, spatial intensity,
//!   detector occupation ([`observables`]);
//! - a dense eigendecomposition oracle for validating the structured path on
//!   small instances ([`oracle`]);
//! - a grid-refinement convergence harness ([`convergence`]);
//! - named scenario presets and a flat key-value configuration format
//!   ([`scenario`]).

// validations use `!(x > 0.0)` on purpose: it rejects NaN along with the
// out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod convergence;
pub mod coupling;
pub mod dynamics;
pub mod error;
pub mod grid;
pub mod kernel;
pub mod model;
pub mod observables;
pub mod oracle;
pub mod scenario;
pub mod state;

pub use convergence::{recurrence_time, refine, ConvergenceReport};
pub use coupling::{detector_response, photon_coupling, DetectorResponse, PhotonCoupling};
pub use dynamics::{integrate, integrate_with, rhs, Frame, StateDeriv, Trajectory};
pub use error::{Error, Result};
pub use grid::{build_mode_grid, ModeGrid};
pub use kernel::{
    delta_kernel, gaussian_kernel, kernel_from_attenuation, AttenuationProfile, DetectionKernel,
    KernelKind,
};
pub use model::SystemModel;
pub use observables::{
    decay_rate_ratio, detector_occupation, excited_population, free_decay_rate, intensity_map,
    intensity_profile, plateau, IntensityMap, ObservableSeries,
};
pub use oracle::{dense_hamiltonian, propagate_dense, DenseHamiltonian};
pub use scenario::{preset, run_scenario, sweep_parameter, KernelSpec, ScenarioConfig};
pub use state::{init_state, norm, SystemState};
