//! Detection kernels: the finite-bandwidth coupling between photon modes and
//! the detector's elementary excitations.
//!
//! A kernel `C(k, k')` couples photon mode `k` to the detector excitations
//! labeled `k'`. Its Fourier transform over `q = k - k'` is the detector's
//! spatial absorption profile, so a delta kernel describes a detector filling
//! all space while a finite-width kernel describes a localized one.

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::grid::ModeGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    Delta,
    Gaussian,
    AttenuationDerived,
}

/// A real symmetric coupling matrix `C(k_i, k_j)` on the photon grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionKernel {
    matrix: Array2<f64>,
    kind: KernelKind,
    amplitude: f64,
    width: f64,
}

impl DetectionKernel {
    pub fn matrix(&self) -> &Array2<f64> {
        &self.matrix
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    /// Peak value of the kernel (the diagonal for delta and Gaussian kinds).
    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    /// e-fold width in `k - k'`; zero for the delta kind.
    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn n_modes(&self) -> usize {
        self.matrix.nrows()
    }

    /// Largest symmetry violation `max |C - C^T|`.
    pub fn asymmetry(&self) -> f64 {
        let n = self.matrix.nrows();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in (i + 1)..n {
                worst = worst.max((self.matrix[[i, j]] - self.matrix[[j, i]]).abs());
            }
        }
        worst
    }

    /// Spatial absorption profile of the kernel, `m(x) = Σ_q C(q) e^{iq(x - x_c)}`,
    /// evaluated on positions `x` with the detector centered at `x_c`. Uses the
    /// matrix row through the grid mode nearest `ref_freq`.
    pub fn spatial_profile(&self, grid: &ModeGrid, ref_freq: f64, x: &[f64], x_c: f64) -> Vec<f64> {
        let i0 = grid.nearest(ref_freq);
        let k = grid.values();
        x.iter()
            .map(|&xm| {
                k.iter()
                    .enumerate()
                    .map(|(j, &kj)| self.matrix[[i0, j]] * ((kj - k[i0]) * (xm - x_c)).cos())
                    .sum()
            })
            .collect()
    }

    /// Amplitude and e-fold width estimated from the second moment of the
    /// central row, assuming a near-Gaussian shape `A exp(-(q/w)^2)`.
    pub fn moment_fit(&self, grid: &ModeGrid) -> (f64, f64) {
        let n = self.n_modes();
        let i0 = n / 2;
        let k = grid.values();
        let mut w0 = 0.0;
        let mut w2 = 0.0;
        let mut peak = 0.0_f64;
        for j in 0..n {
            let v = self.matrix[[i0, j]].max(0.0);
            let q = k[j] - k[i0];
            w0 += v;
            w2 += v * q * q;
            peak = peak.max(v);
        }
        if w0 <= 0.0 {
            return (0.0, 0.0);
        }
        // for A exp(-(q/w)^2): <q^2> = w^2 / 2
        (peak, (2.0 * w2 / w0).sqrt())
    }
}

/// Identity kernel: each photon mode couples only to its own detector label.
/// This is the infinite, space-filling detector limit.
pub fn delta_kernel(grid: &ModeGrid) -> DetectionKernel {
    DetectionKernel {
        matrix: Array2::eye(grid.n_modes()),
        kind: KernelKind::Delta,
        amplitude: 1.0,
        width: 0.0,
    }
}

/// Gaussian kernel `C(k, k') = amplitude * exp(-((k - k') / width)^2)`.
///
/// Its spatial profile is a Gaussian of full width at half maximum
/// `4 sqrt(ln 2) / width` centered on the detector origin.
pub fn gaussian_kernel(grid: &ModeGrid, amplitude: f64, width: f64) -> Result<DetectionKernel> {
    if !(amplitude > 0.0) {
        return Err(Error::invalid(format!(
            "kernel amplitude must be positive, got {amplitude}"
        )));
    }
    if !(width > 0.0) {
        return Err(Error::invalid(format!(
            "kernel width must be positive, got {width}"
        )));
    }
    if width < grid.spacing() / 10.0 {
        log::warn!(
            "gaussian kernel width {width} is below spacing/10 = {}; the kernel is \
             effectively a delta and numerically ill-sampled",
            grid.spacing() / 10.0
        );
    }
    let k = grid.values();
    let n = k.len();
    let mut m = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..=i {
            let v = amplitude * (-((k[i] - k[j]) / width).powi(2)).exp();
            m[[i, j]] = v;
            m[[j, i]] = v;
        }
    }
    Ok(DetectionKernel {
        matrix: m,
        kind: KernelKind::Gaussian,
        amplitude,
        width,
    })
}

/// Spatial density of the detector's elementary excitations, sampled on an
/// ascending grid covering the detector extent `[0, x0]`.
///
/// The local amplitude attenuation rate of a photon mode `k` inside the
/// detector is `sqrt(eta_k * rho(x))`, so the penetration depth at coupling
/// `eta` is `1 / max_x sqrt(eta * rho(x))`.
#[derive(Debug, Clone, PartialEq)]
pub struct AttenuationProfile {
    x: Vec<f64>,
    rho: Vec<f64>,
}

impl AttenuationProfile {
    pub fn from_samples(x: Vec<f64>, rho: Vec<f64>) -> Result<Self> {
        if x.len() != rho.len() || x.len() < 2 {
            return Err(Error::invalid(
                "attenuation profile needs matching x and rho sample arrays of length >= 2",
            ));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("profile x grid must be strictly ascending"));
        }
        if rho.iter().any(|&r| !(r >= 0.0)) {
            return Err(Error::invalid("profile density must be nonnegative"));
        }
        Ok(AttenuationProfile { x, rho })
    }

    /// Gaussian density bump centered in the detector: `rho_peak *
    /// exp(-((x - x0/2) / width)^2)` sampled on `n_points` over `[0, x0]`.
    pub fn gaussian(extent: f64, rho_peak: f64, width: f64, n_points: usize) -> Result<Self> {
        if !(extent > 0.0) || !(width > 0.0) || !(rho_peak >= 0.0) || n_points < 2 {
            return Err(Error::invalid(
                "gaussian profile needs positive extent and width",
            ));
        }
        let dx = extent / (n_points - 1) as f64;
        let x: Vec<f64> = (0..n_points).map(|i| i as f64 * dx).collect();
        let rho = x
            .iter()
            .map(|&xi| rho_peak * (-((xi - extent / 2.0) / width).powi(2)).exp())
            .collect();
        AttenuationProfile::from_samples(x, rho)
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    pub fn extent(&self) -> f64 {
        *self.x.last().unwrap()
    }

    pub fn max_rho(&self) -> f64 {
        self.rho.iter().cloned().fold(0.0, f64::max)
    }

    /// Penetration depth `1 / max sqrt(eta * rho)` at coupling strength `eta`.
    /// Infinite for a vanishing density.
    pub fn penetration_depth(&self, eta: f64) -> f64 {
        let g = (eta * self.max_rho()).sqrt();
        if g > 0.0 {
            1.0 / g
        } else {
            f64::INFINITY
        }
    }

    /// True when the density vanishes smoothly at both faces of the detector.
    /// A density that jumps at a face acts like a mirror, not a detector.
    pub fn vanishes_at_surfaces(&self) -> bool {
        let max = self.max_rho();
        max == 0.0 || (self.rho[0] <= 1e-3 * max && *self.rho.last().unwrap() <= 1e-3 * max)
    }
}

/// Derive a detection kernel from a spatial attenuation profile.
///
/// A mode entering the detector at its outer face `x0` attenuates as
/// `A_k(x) = exp(-∫_x^{x0} sqrt(eta_k rho(s)) ds)`, so the amplitude deficit
/// deposited per unit length at `x` is `sqrt(eta_k rho(x)) A_k(x)`. Scaled by
/// the penetration depth, `w_k(x) = sqrt(eta_k rho(x)) A_k(x) / gamma_pen` is
/// the dimensionless local absorption weight (peaking near 1 once absorption
/// saturates). Projecting it onto the plane-wave basis of the grid, in
/// detector-centered coordinates so the kernel carries no position (position
/// enters through the displacement phase), gives
///
/// ```text
/// C(k_i, k_j) = (1/L) ∫ w_i(x) e^{i (k_j - k_i)(x - x_c)} dx,   L = 2π/spacing,
/// ```
///
/// computed by trapezoidal quadrature on the profile grid and then
/// symmetrized. A detector absorbing fully over an effective width `W` has
/// kernel amplitude of order `W / L`.
pub fn kernel_from_attenuation(
    grid: &ModeGrid,
    profile: &AttenuationProfile,
    response: &crate::coupling::DetectorResponse,
) -> Result<DetectionKernel> {
    if response.n_modes() != grid.n_modes() {
        return Err(Error::invalid(
            "detector response and photon grid sizes disagree",
        ));
    }
    let n = grid.n_modes();
    let eta_max = response.eta().iter().cloned().fold(0.0, f64::max);

    // No coupling or no material: nothing is ever absorbed.
    if eta_max == 0.0 || profile.max_rho() == 0.0 {
        return Ok(DetectionKernel {
            matrix: Array2::zeros((n, n)),
            kind: KernelKind::AttenuationDerived,
            amplitude: 0.0,
            width: 0.0,
        });
    }

    let d_pen = profile.penetration_depth(eta_max);
    let dx_max = profile
        .x()
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(0.0, f64::max);
    if dx_max > d_pen / 8.0 {
        return Err(Error::invalid(format!(
            "profile grid spacing {dx_max:.3e} does not resolve the penetration depth \
             {d_pen:.3e} with >= 8 points"
        )));
    }
    if !profile.vanishes_at_surfaces() {
        log::warn!(
            "attenuation profile does not vanish smoothly at the detector surface; \
             expect mirror-like reflection artifacts in the kernel"
        );
    }

    let xs = profile.x();
    let rho = profile.rho();
    let k = grid.values();
    let period = grid.recurrence_time();
    let n_x = xs.len();

    // Deposited-amplitude weight per mode: local rate times the amplitude
    // surviving the crossing from the outer face, in penetration-depth units.
    let weights: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let g: Vec<f64> = rho
                .iter()
                .map(|&r| (response.eta()[i] * r).sqrt())
                .collect();
            // cumulative attenuation exponent from the outer face inward
            let mut integral = vec![0.0; n_x];
            for t in (0..n_x - 1).rev() {
                integral[t] = integral[t + 1] + 0.5 * (g[t] + g[t + 1]) * (xs[t + 1] - xs[t]);
            }
            (0..n_x)
                .map(|t| g[t] * (-integral[t]).exp() * d_pen)
                .collect()
        })
        .collect();

    // Center the projection on the absorbed-weight centroid at the response
    // peak, so the kernel is position-free.
    let w_ref = &weights[grid.nearest(response.center())];
    let (mut num, mut den) = (0.0, 0.0);
    for t in 0..xs.len() - 1 {
        let h = xs[t + 1] - xs[t];
        num += 0.5 * h * (w_ref[t] * xs[t] + w_ref[t + 1] * xs[t + 1]);
        den += 0.5 * h * (w_ref[t] + w_ref[t + 1]);
    }
    let x_c = if den > 0.0 {
        num / den
    } else {
        profile.extent() / 2.0
    };

    let mut raw = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            let q = k[j] - k[i];
            let mut acc = C64::new(0.0, 0.0);
            for t in 0..xs.len() - 1 {
                let h = xs[t + 1] - xs[t];
                let f0 = weights[i][t] * C64::from_polar(1.0, q * (xs[t] - x_c));
                let f1 = weights[i][t + 1] * C64::from_polar(1.0, q * (xs[t + 1] - x_c));
                acc += 0.5 * h * (f0 + f1);
            }
            raw[[i, j]] = acc.re / period;
        }
    }
    let sym = 0.5 * (&raw + &raw.t());
    let mut kernel = DetectionKernel {
        matrix: sym,
        kind: KernelKind::AttenuationDerived,
        amplitude: 0.0,
        width: 0.0,
    };
    let (amplitude, width) = kernel.moment_fit(grid);
    kernel.amplitude = amplitude;
    kernel.width = width;
    Ok(kernel)
}
