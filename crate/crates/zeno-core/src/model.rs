//! Assembly of the discretized model: grids, couplings, response, kernel.

use ndarray::Array2;

use crate::coupling::{DetectorResponse, PhotonCoupling};
use crate::error::{Error, Result};
use crate::grid::ModeGrid;
use crate::kernel::DetectionKernel;

/// The fully assembled model in the one-excitation sector.
///
/// Caches the effective photon-detector coupling matrix
/// `M(k, k') = C(k, k') * sqrt(eta_{k'} * spacing_omega)`: the kernel column
/// weighted by the response at the detector label and by the
/// continuum-to-discrete factor of the detector quanta.
#[derive(Debug, Clone)]
pub struct SystemModel {
    photon_grid: ModeGrid,
    omega_grid: ModeGrid,
    coupling: PhotonCoupling,
    response: DetectorResponse,
    kernel: DetectionKernel,
    atom_frequency: f64,
    m: Array2<f64>,
    m_t: Array2<f64>,
}

impl SystemModel {
    pub fn new(
        photon_grid: ModeGrid,
        omega_grid: ModeGrid,
        coupling: PhotonCoupling,
        response: DetectorResponse,
        kernel: DetectionKernel,
        atom_frequency: f64,
    ) -> Result<Self> {
        let n_k = photon_grid.n_modes();
        if coupling.n_modes() != n_k {
            return Err(Error::invalid(format!(
                "photon coupling has {} modes, grid has {n_k}",
                coupling.n_modes()
            )));
        }
        if response.n_modes() != n_k {
            return Err(Error::invalid(format!(
                "detector response has {} modes, grid has {n_k}",
                response.n_modes()
            )));
        }
        if kernel.n_modes() != n_k {
            return Err(Error::invalid(format!(
                "detection kernel is {}x{}, grid has {n_k} modes",
                kernel.n_modes(),
                kernel.n_modes()
            )));
        }
        if !(atom_frequency > 0.0) {
            return Err(Error::invalid("atom frequency must be positive"));
        }
        let d_omega = omega_grid.spacing();
        let mut m = Array2::zeros((n_k, n_k));
        for i in 0..n_k {
            for j in 0..n_k {
                m[[i, j]] = kernel.matrix()[[i, j]] * (response.eta()[j] * d_omega).sqrt();
            }
        }
        let m_t = m.t().as_standard_layout().to_owned();
        Ok(SystemModel {
            photon_grid,
            omega_grid,
            coupling,
            response,
            kernel,
            atom_frequency,
            m,
            m_t,
        })
    }

    pub fn photon_grid(&self) -> &ModeGrid {
        &self.photon_grid
    }

    pub fn omega_grid(&self) -> &ModeGrid {
        &self.omega_grid
    }

    pub fn coupling(&self) -> &PhotonCoupling {
        &self.coupling
    }

    pub fn response(&self) -> &DetectorResponse {
        &self.response
    }

    pub fn kernel(&self) -> &DetectionKernel {
        &self.kernel
    }

    pub fn atom_frequency(&self) -> f64 {
        self.atom_frequency
    }

    /// Effective coupling matrix `M` entering the photon equations.
    pub fn effective_coupling(&self) -> &Array2<f64> {
        &self.m
    }

    /// Transpose of `M`, entering the detector equations.
    pub fn effective_coupling_t(&self) -> &Array2<f64> {
        &self.m_t
    }

    pub fn n_k(&self) -> usize {
        self.photon_grid.n_modes()
    }

    pub fn n_omega(&self) -> usize {
        self.omega_grid.n_modes()
    }

    /// Dimension of the one-excitation sector, `1 + n_k + n_k * n_omega`.
    pub fn dim(&self) -> usize {
        1 + self.n_k() + self.n_k() * self.n_omega()
    }

    /// Largest bare frequency in the model, which bounds the spectral radius
    /// relevant to the fixed-step stability guard.
    pub fn max_frequency(&self) -> f64 {
        self.atom_frequency
            .max(self.photon_grid.max())
            .max(self.omega_grid.max())
    }

    /// The same model with the detector coupling switched off.
    pub fn with_detector_off(&self) -> SystemModel {
        SystemModel::new(
            self.photon_grid.clone(),
            self.omega_grid.clone(),
            self.coupling.clone(),
            self.response.switched_off(),
            self.kernel.clone(),
            self.atom_frequency,
        )
        .expect("dimensions already validated")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::{detector_response, photon_coupling};
    use crate::grid::build_mode_grid;
    use crate::kernel::{delta_kernel, gaussian_kernel};
    use approx::assert_relative_eq;

    fn small_model() -> SystemModel {
        let pg = build_mode_grid(0.0, 2.0, 4).unwrap();
        let og = build_mode_grid(0.0, 2.0, 3).unwrap();
        let c = photon_coupling(&pg, 0.02, 0.0).unwrap();
        let r = detector_response(&pg, 0.2, 0.3, 1.0, 6).unwrap();
        let k = delta_kernel(&pg);
        SystemModel::new(pg, og, c, r, k, 1.0).unwrap()
    }

    #[test]
    fn effective_coupling_weights_kernel_columns() {
        let m = small_model();
        let d_omega = m.omega_grid().spacing();
        for i in 0..4 {
            for j in 0..4 {
                let expected = if i == j {
                    (m.response().eta()[j] * d_omega).sqrt()
                } else {
                    0.0
                };
                assert_relative_eq!(
                    m.effective_coupling()[[i, j]],
                    expected,
                    max_relative = 1e-14
                );
            }
        }
    }

    #[test]
    fn gaussian_kernel_weighting_uses_the_column_response() {
        let pg = build_mode_grid(0.0, 2.0, 4).unwrap();
        let og = build_mode_grid(0.0, 2.0, 3).unwrap();
        let c = photon_coupling(&pg, 0.02, 0.0).unwrap();
        let r = detector_response(&pg, 0.2, 0.3, 1.0, 6).unwrap();
        let kern = gaussian_kernel(&pg, 0.1, 0.5).unwrap();
        let m = SystemModel::new(pg, og, c, r.clone(), kern.clone(), 1.0).unwrap();
        let d_omega = m.omega_grid().spacing();
        let expected = kern.matrix()[[0, 2]] * (r.eta()[2] * d_omega).sqrt();
        assert_relative_eq!(
            m.effective_coupling()[[0, 2]],
            expected,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            m.effective_coupling_t()[[2, 0]],
            expected,
            max_relative = 1e-14
        );
    }

    #[test]
    fn mismatched_dimensions_are_rejected() {
        let pg = build_mode_grid(0.0, 2.0, 4).unwrap();
        let og = build_mode_grid(0.0, 2.0, 3).unwrap();
        let other = build_mode_grid(0.0, 2.0, 5).unwrap();
        let c = photon_coupling(&other, 0.02, 0.0).unwrap();
        let r = detector_response(&pg, 0.2, 0.3, 1.0, 6).unwrap();
        let k = delta_kernel(&pg);
        assert!(SystemModel::new(pg, og, c, r, k, 1.0).is_err());
    }

    #[test]
    fn dim_counts_the_one_excitation_sector() {
        let m = small_model();
        assert_eq!(m.dim(), 1 + 4 + 12);
        assert_relative_eq!(m.max_frequency(), 2.0);
    }

    #[test]
    fn detector_off_zeroes_the_effective_coupling() {
        let m = small_model().with_detector_off();
        assert!(m.effective_coupling().iter().all(|&v| v == 0.0));
    }
}
