//! Measured quantities derived from trajectories: excited population,
//! normalized decay rate, spatial intensity, detector occupation.

use std::f64::consts::TAU;

use num_complex::Complex64 as C64;

use crate::dynamics::{integrate, Trajectory};
use crate::error::{Error, Result};
use crate::grid::ModeGrid;
use crate::model::SystemModel;
use crate::state::SystemState;

/// Plateau extraction window, as fractions of the recurrence time: late
/// enough to clear the short-time transient, early enough to stay clear of
/// recurrence contamination.
pub const PLATEAU_WINDOW: (f64, f64) = (0.3, 0.6);

/// Boxcar width (in integrator steps) smoothing the decay-rate derivative.
pub const RATE_SMOOTHING_STEPS: usize = 5;

/// Populations below this are too small for a trustworthy log-derivative.
pub const POPULATION_FLOOR: f64 = 1e-12;

/// A labeled real-valued time series.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub label: String,
    pub unit: String,
}

impl ObservableSeries {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Mean of the values with times inside `[lo, hi]`.
    pub fn window_mean(&self, lo: f64, hi: f64) -> f64 {
        let mut sum = 0.0;
        let mut n = 0usize;
        for (t, v) in self.times.iter().zip(&self.values) {
            if *t >= lo && *t <= hi {
                sum += v;
                n += 1;
            }
        }
        if n == 0 {
            f64::NAN
        } else {
            sum / n as f64
        }
    }
}

/// Excited-state population `P_e(t) = |alpha(t)|^2`, recorded every step.
pub fn excited_population(traj: &Trajectory) -> ObservableSeries {
    ObservableSeries {
        times: traj.times(),
        values: traj.population.clone(),
        label: "excited population".into(),
        unit: "1".into(),
    }
}

/// Total detector occupation over time, recorded every step.
pub fn detector_occupation_series(traj: &Trajectory) -> ObservableSeries {
    ObservableSeries {
        times: traj.times(),
        values: traj.detector_population.clone(),
        label: "detector occupation".into(),
        unit: "1".into(),
    }
}

/// Normalized decay rate `r(t) = [-d ln P_e / dt] / gamma_free`.
///
/// The derivative is a central difference smoothed by a
/// [`RATE_SMOOTHING_STEPS`]-step boxcar; `r(0)` is pinned to zero, matching
/// the quadratic short-time behavior of the population. The series is
/// truncated where the population falls below [`POPULATION_FLOOR`].
pub fn decay_rate_ratio(traj: &Trajectory, gamma_free: f64) -> ObservableSeries {
    assert!(gamma_free > 0.0, "gamma_free must be positive");
    let p = &traj.population;
    let dt = traj.dt;
    let cutoff = p
        .iter()
        .position(|&v| v < POPULATION_FLOOR)
        .unwrap_or(p.len());
    let n = cutoff;
    let mut raw = vec![0.0; n];
    if n >= 2 {
        for i in 1..n - 1 {
            raw[i] = -(p[i + 1].ln() - p[i - 1].ln()) / (2.0 * dt) / gamma_free;
        }
        raw[n - 1] = -(p[n - 1].ln() - p[n - 2].ln()) / dt / gamma_free;
        raw[0] = 0.0;
    }
    // boxcar smoothing, window clipped at the ends
    let half = RATE_SMOOTHING_STEPS / 2;
    let mut values = vec![0.0; n];
    for (i, v) in values.iter_mut().enumerate() {
        let lo = i.saturating_sub(half);
        let hi = (i + half).min(n - 1);
        let w = &raw[lo..=hi];
        *v = w.iter().sum::<f64>() / w.len() as f64;
    }
    if !values.is_empty() {
        values[0] = 0.0;
    }
    ObservableSeries {
        times: (0..n).map(|i| i as f64 * dt).collect(),
        values,
        label: "decay rate over free rate".into(),
        unit: "1".into(),
    }
}

/// Average of a series over the plateau window `[0.3, 0.6] * t_rec`.
pub fn plateau(series: &ObservableSeries, t_rec: f64) -> f64 {
    series.window_mean(PLATEAU_WINDOW.0 * t_rec, PLATEAU_WINDOW.1 * t_rec)
}

/// First time the series reaches half of `level`; a measure of the
/// short-time transient width.
pub fn transient_half_time(series: &ObservableSeries, level: f64) -> Option<f64> {
    series
        .times
        .iter()
        .zip(&series.values)
        .find(|(_, &v)| v >= 0.5 * level)
        .map(|(t, _)| *t)
}

/// Analytic and fitted free decay rates of a flat-coupling model.
#[derive(Debug, Clone, Copy)]
pub struct FreeDecayRate {
    /// Golden-rule value `2π |xi_cont|^2` reconstructed from the discrete
    /// couplings.
    pub analytic: f64,
    /// Log-linear least-squares fit of the excited population from a
    /// detector-off companion run.
    pub fitted: f64,
}

/// Measure the free decay rate of `model` by running an `eta = 0` companion
/// and fitting `ln P_e` over the window `[0.5/rate, 0.6 t_rec]`.
///
/// Errors with `ModelInconsistency` when fit and golden rule disagree by more
/// than 5%, which signals a discretization too coarse for the target rate.
pub fn free_decay_rate(model: &SystemModel) -> Result<FreeDecayRate> {
    if !model.coupling().is_flat(1e-9) {
        return Err(Error::invalid(
            "free_decay_rate needs a flat (k-independent) photon coupling",
        ));
    }
    let delta = model.photon_grid().spacing();
    let xi2 = model.coupling().xi()[0].norm_sqr();
    let analytic = TAU * xi2 / delta;

    let free = model.with_detector_off();
    let t_rec = model.photon_grid().recurrence_time();
    let dt = 0.01 / model.atom_frequency();
    let t_end = PLATEAU_WINDOW.1 * t_rec;
    let traj = integrate(&free, t_end, dt, 0)?;
    let fitted = fit_decay_rate(&traj, 0.5 / analytic, t_end)?;

    let rel = (fitted - analytic).abs() / analytic;
    if rel > 0.05 {
        return Err(Error::ModelInconsistency(format!(
            "fitted free decay rate {fitted:.6e} deviates from the golden-rule value \
             {analytic:.6e} by {:.1}%; refine the discretization",
            rel * 100.0
        )));
    }
    Ok(FreeDecayRate { analytic, fitted })
}

/// Least-squares slope of `-ln P_e` over `[t_lo, t_hi]`.
pub fn fit_decay_rate(traj: &Trajectory, t_lo: f64, t_hi: f64) -> Result<f64> {
    let dt = traj.dt;
    let mut n = 0.0;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for (i, &p) in traj.population.iter().enumerate() {
        let t = i as f64 * dt;
        if t < t_lo || t > t_hi || p < POPULATION_FLOOR {
            continue;
        }
        let y = p.ln();
        n += 1.0;
        sx += t;
        sy += y;
        sxx += t * t;
        sxy += t * y;
    }
    if n < 2.0 {
        return Err(Error::invalid("fit window contains fewer than two samples"));
    }
    let denom = n * sxx - sx * sx;
    Ok(-(n * sxy - sx * sy) / denom)
}

/// Spatial intensity of the photon field on the Fourier-conjugate grid,
///
/// `I(x_m) = |Σ_k b_k e^{i k x_m}|^2 * spacing / 2π`,
///
/// which satisfies Parseval exactly: `Σ_m I(x_m) Δx = Σ_k |b_k|^2`.
pub fn intensity_profile(state: &SystemState, grid: &ModeGrid, n_x: usize) -> Result<Vec<f64>> {
    if state.n_k() != grid.n_modes() {
        return Err(Error::invalid("state and grid disagree on the mode count"));
    }
    if n_x != grid.n_modes() {
        return Err(Error::invalid(format!(
            "intensity profile needs n_x = n_k (conjugate grid); got {n_x} vs {}",
            grid.n_modes()
        )));
    }
    let x = grid.conjugate_grid();
    let k = grid.values();
    let scale = grid.spacing() / TAU;
    Ok(x.iter()
        .map(|&xm| {
            let mut acc = C64::new(0.0, 0.0);
            for (bk, &kj) in state.b.iter().zip(k) {
                acc += bk * C64::from_polar(1.0, kj * xm);
            }
            acc.norm_sqr() * scale
        })
        .collect())
}

/// Total detector occupation and its marginal over the detector `k` labels.
pub fn detector_occupation(state: &SystemState) -> (f64, Vec<f64>) {
    let per_k: Vec<f64> = state
        .c
        .rows()
        .into_iter()
        .map(|row| row.iter().map(|v| v.norm_sqr()).sum())
        .collect();
    (per_k.iter().sum(), per_k)
}

/// Space-time map of the emitted intensity, in the emitter's frame (distance
/// measured from the emitter, wavefronts travel at unit speed toward the
/// detector center at `x = x_d`).
#[derive(Debug, Clone)]
pub struct IntensityMap {
    pub x: Vec<f64>,
    pub t: Vec<f64>,
    /// `values[it][ix]`, nonnegative.
    pub values: Vec<Vec<f64>>,
}

/// Build the intensity map from a trajectory's thinned state samples.
pub fn intensity_map(traj: &Trajectory, grid: &ModeGrid, x_d: f64) -> Result<IntensityMap> {
    if traj.samples.is_empty() {
        return Err(Error::invalid(
            "trajectory has no state samples; run with sample_stride > 0",
        ));
    }
    let n = grid.n_modes();
    let mut t = Vec::with_capacity(traj.samples.len());
    let mut values = Vec::with_capacity(traj.samples.len());
    for s in &traj.samples {
        let shifted = s.shifted_to_atom_frame(grid.values(), x_d);
        values.push(intensity_profile(&shifted, grid, n)?);
        t.push(s.t);
    }
    Ok(IntensityMap {
        x: grid.conjugate_grid(),
        t,
        values,
    })
}
