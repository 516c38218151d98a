//! Emitter-field coupling and the detector's frequency response.

use std::f64::consts::TAU;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::grid::ModeGrid;

/// Per-mode coupling between the emitter and the photon continuum.
///
/// The discrete couplings carry a factor `sqrt(spacing)` so that the summed
/// golden-rule rate reproduces the continuum rate: with a flat continuum
/// coupling, `|xi_j|^2 = gamma_free * spacing / 2π` and the emitter decays at
/// `gamma_free`. Displacing the emitter from the detector origin by `x_d`
/// only rotates the phases, `arg(xi_j) = -k_j * x_d`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonCoupling {
    xi: Vec<C64>,
    x_d: f64,
    gamma_free: f64,
}

/// Build the flat-continuum photon coupling targeting a free decay rate
/// `gamma_free`, with the emitter displaced by `x_d`.
pub fn photon_coupling(grid: &ModeGrid, gamma_free: f64, x_d: f64) -> Result<PhotonCoupling> {
    if !(gamma_free > 0.0) {
        return Err(Error::invalid(format!(
            "gamma_free must be positive, got {gamma_free}"
        )));
    }
    let mag = (gamma_free * grid.spacing() / TAU).sqrt();
    let xi = grid
        .values()
        .iter()
        .map(|&k| C64::from_polar(mag, -k * x_d))
        .collect();
    Ok(PhotonCoupling {
        xi,
        x_d,
        gamma_free,
    })
}

impl PhotonCoupling {
    pub fn xi(&self) -> &[C64] {
        &self.xi
    }

    pub fn x_d(&self) -> f64 {
        self.x_d
    }

    pub fn gamma_free(&self) -> f64 {
        self.gamma_free
    }

    pub fn n_modes(&self) -> usize {
        self.xi.len()
    }

    /// True when all coupling magnitudes agree to relative tolerance `tol`.
    pub fn is_flat(&self, tol: f64) -> bool {
        let m0 = self.xi[0].norm();
        self.xi.iter().all(|x| (x.norm() - m0).abs() <= tol * m0)
    }
}

/// Frequency response of the detector: the photon-detector coupling strength
/// per mode,
///
/// ```text
/// eta_k = (eta_peak / 2π) / (1 + [(k - center) / delta_bw]^sharpness)
/// ```
///
/// `sharpness` must be even so the response is positive and symmetric about
/// the center.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorResponse {
    eta: Vec<f64>,
    eta_peak: f64,
    delta_bw: f64,
    center: f64,
    sharpness: u32,
}

/// Evaluate the detector response on a mode grid.
pub fn detector_response(
    grid: &ModeGrid,
    eta_peak: f64,
    delta_bw: f64,
    center: f64,
    sharpness: u32,
) -> Result<DetectorResponse> {
    if !(eta_peak >= 0.0) {
        return Err(Error::invalid(format!(
            "eta_peak must be nonnegative, got {eta_peak}"
        )));
    }
    if !(delta_bw > 0.0) {
        return Err(Error::invalid(format!(
            "delta_bw must be positive, got {delta_bw}"
        )));
    }
    if sharpness < 2 || !sharpness.is_multiple_of(2) {
        return Err(Error::invalid(format!(
            "sharpness must be an even integer >= 2, got {sharpness}"
        )));
    }
    let eta = grid
        .values()
        .iter()
        .map(|&k| eta_peak / TAU / (1.0 + ((k - center) / delta_bw).powi(sharpness as i32)))
        .collect();
    Ok(DetectorResponse {
        eta,
        eta_peak,
        delta_bw,
        center,
        sharpness,
    })
}

impl DetectorResponse {
    pub fn eta(&self) -> &[f64] {
        &self.eta
    }

    pub fn eta_peak(&self) -> f64 {
        self.eta_peak
    }

    pub fn delta_bw(&self) -> f64 {
        self.delta_bw
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn sharpness(&self) -> u32 {
        self.sharpness
    }

    pub fn n_modes(&self) -> usize {
        self.eta.len()
    }

    /// A response with the coupling switched off everywhere.
    pub fn switched_off(&self) -> DetectorResponse {
        DetectorResponse {
            eta: vec![0.0; self.eta.len()],
            eta_peak: 0.0,
            delta_bw: self.delta_bw,
            center: self.center,
            sharpness: self.sharpness,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::build_mode_grid;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn coupling_magnitude_matches_the_golden_rule_conversion() {
        let g = build_mode_grid(0.0, 2.0, 100).unwrap();
        let c = photon_coupling(&g, 0.02, 0.0).unwrap();
        for x in c.xi() {
            assert_relative_eq!(x.norm_sqr(), 0.02 * 0.02 / TAU, max_relative = 1e-12);
            assert_eq!(x.im, 0.0); // x_d = 0 leaves the coupling real
        }
    }

    #[test]
    fn displacement_sets_phases_without_touching_magnitudes() {
        let g = build_mode_grid(0.0, 2.0, 100).unwrap();
        let still = photon_coupling(&g, 0.02, 0.0).unwrap();
        let moved = photon_coupling(&g, 0.02, PI).unwrap();
        for (j, (a, b)) in still.xi().iter().zip(moved.xi()).enumerate() {
            assert_relative_eq!(a.norm(), b.norm(), max_relative = 1e-14);
            let expected = -g.values()[j] * PI;
            let diff = (b.arg() - expected).rem_euclid(TAU);
            assert!(diff < 1e-10 || (TAU - diff) < 1e-10);
        }
    }

    #[test]
    fn phase_at_unit_mode_is_minus_displacement() {
        // one mode exactly at k = 1
        let g = build_mode_grid(0.5, 1.5, 1).unwrap();
        let c = photon_coupling(&g, 0.02, PI).unwrap();
        assert_relative_eq!(c.xi()[0].arg(), -PI, max_relative = 1e-12);
    }

    #[test]
    fn nonpositive_gamma_is_rejected() {
        let g = build_mode_grid(0.0, 2.0, 10).unwrap();
        assert!(photon_coupling(&g, 0.0, 0.0).is_err());
        assert!(photon_coupling(&g, -1.0, 0.0).is_err());
    }

    #[test]
    fn response_has_textbook_values_at_center_and_bandwidth() {
        let g = build_mode_grid(0.0, 2.0, 100).unwrap();
        // center and center + delta_bw both fall on grid midpoints
        let r = detector_response(&g, 0.2, 0.3, 0.99, 6).unwrap();
        let at = |f: f64| r.eta()[g.nearest(f)];
        assert_relative_eq!(at(0.99), 0.2 / TAU, max_relative = 1e-12);
        assert_relative_eq!(at(0.99 + 0.3), 0.2 / (2.0 * TAU), max_relative = 1e-12);
    }

    #[test]
    fn response_is_symmetric_about_center_on_a_symmetric_grid() {
        let g = build_mode_grid(0.0, 2.0, 100).unwrap();
        let r = detector_response(&g, 0.2, 2.0 / std::f64::consts::TAU, 1.0, 6).unwrap();
        let n = g.n_modes();
        for j in 0..n / 2 {
            assert_relative_eq!(r.eta()[j], r.eta()[n - 1 - j], max_relative = 1e-12);
        }
    }

    #[test]
    fn switched_off_response_is_identically_zero() {
        let g = build_mode_grid(0.0, 2.0, 100).unwrap();
        let r = detector_response(&g, 0.0, 0.3, 1.0, 6).unwrap();
        assert!(r.eta().iter().all(|&e| e == 0.0));
        let r2 = detector_response(&g, 0.2, 0.3, 1.0, 6)
            .unwrap()
            .switched_off();
        assert!(r2.eta().iter().all(|&e| e == 0.0));
    }

    #[test]
    fn odd_sharpness_is_rejected() {
        let g = build_mode_grid(0.0, 2.0, 10).unwrap();
        assert!(detector_response(&g, 0.2, 0.3, 1.0, 5).is_err());
        assert!(detector_response(&g, 0.2, 0.3, 1.0, 0).is_err());
        assert!(detector_response(&g, 0.2, 0.3, 1.0, 6).is_ok());
    }
}
