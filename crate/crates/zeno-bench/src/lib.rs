//! Shared builders for the benchmark targets.

use zeno_core::coupling::{detector_response, photon_coupling};
use zeno_core::grid::build_mode_grid;
use zeno_core::kernel::{delta_kernel, gaussian_kernel};
use zeno_core::model::SystemModel;

/// The reference discretization: 100 photon modes, 100x100 detector labels.
pub fn production_model(gaussian: bool) -> SystemModel {
    let pg = build_mode_grid(0.0, 2.0, 100).unwrap();
    let og = build_mode_grid(0.0, 2.0, 100).unwrap();
    let coupling = photon_coupling(&pg, 0.02, 33.0).unwrap();
    let response = detector_response(&pg, 2.0, 2.0 / std::f64::consts::TAU, 1.0, 6).unwrap();
    let kernel = if gaussian {
        gaussian_kernel(&pg, 0.103, 0.1).unwrap()
    } else {
        delta_kernel(&pg)
    };
    SystemModel::new(pg.clone(), og, coupling, response, kernel, 1.0).unwrap()
}
