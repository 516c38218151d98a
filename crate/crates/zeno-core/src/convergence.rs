//! Grid-refinement harness: results count as converged only if they are
//! unaltered when both the range and the density of the discretized continua
//! increase.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::ModeGrid;
use crate::observables::{decay_rate_ratio, plateau};
use crate::scenario::{run_scenario, ScenarioConfig};

/// Relative successive-deviation threshold for a passing ladder: tighter than
/// the physics tolerances so discretization error stays subdominant.
pub const PASS_THRESHOLD: f64 = 0.01;

/// Revival time `2π / spacing` of an equidistant grid.
pub fn recurrence_time(grid: &ModeGrid) -> f64 {
    grid.recurrence_time()
}

/// One rung of a refinement ladder.
#[derive(Debug, Clone, Serialize)]
pub struct RungReport {
    pub density_factor: f64,
    pub range_factor: f64,
    pub n_k: usize,
    pub n_omega: usize,
    pub spacing: f64,
    pub recurrence_time: f64,
    pub t_end: f64,
    pub plateau: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub rungs: Vec<RungReport>,
    /// Relative deviation between consecutive rung plateaus.
    pub successive_deviations: Vec<f64>,
    pub max_successive_deviation: f64,
    /// True when every rung ran and the final deviation is below
    /// [`PASS_THRESHOLD`].
    pub passed: bool,
}

/// Scale a configuration to a refinement rung.
///
/// `range_factor` stretches both grids about the emitter frequency (clipped
/// at zero, since only outgoing modes exist); `density_factor` multiplies
/// the number of modes per unit frequency. `t_end` scales with the rung's
/// recurrence time so the plateau window stays at the same fraction of it.
pub fn scale_config(
    base: &ScenarioConfig,
    density_factor: f64,
    range_factor: f64,
) -> Result<ScenarioConfig> {
    if !(density_factor >= 1.0) || !(range_factor >= 1.0) {
        return Err(Error::invalid("refinement factors must be >= 1"));
    }
    let mut cfg = base.clone();
    let center = base.atom_frequency;
    let stretch = |lo: f64, hi: f64, n: usize| -> (f64, f64, usize) {
        let new_lo = (center - range_factor * (center - lo)).max(0.0);
        let new_hi = center + range_factor * (hi - center);
        let width_ratio = (new_hi - new_lo) / (hi - lo);
        let new_n = (n as f64 * density_factor * width_ratio).round() as usize;
        (new_lo, new_hi, new_n)
    };
    let (k_min, k_max, n_k) = stretch(base.k_min, base.k_max, base.n_k);
    let (w_min, w_max, n_w) = stretch(base.omega_min, base.omega_max, base.n_omega);
    cfg.k_min = k_min;
    cfg.k_max = k_max;
    cfg.n_k = n_k;
    cfg.omega_min = w_min;
    cfg.omega_max = w_max;
    cfg.n_omega = n_w;
    cfg.sample_stride = 0; // plateaus only need the per-step population
    let t_rec_base = base.photon_grid()?.recurrence_time();
    let t_rec_new = cfg.photon_grid()?.recurrence_time();
    cfg.t_end = base.t_end * t_rec_new / t_rec_base;
    Ok(cfg)
}

/// Run the scenario along a refinement ladder and report plateau stability.
///
/// The two factor lists are walked in lockstep (rung `i` applies
/// `density_factors[i]` and `range_factors[i]`); they must have equal length
/// of at least two. A rung whose run fails carries the failure in its row
/// and fails the ladder.
pub fn refine(
    base: &ScenarioConfig,
    density_factors: &[f64],
    range_factors: &[f64],
) -> Result<ConvergenceReport> {
    refine_with(base, density_factors, range_factors, |cfg| {
        let traj = run_scenario(cfg)?;
        let ratio = decay_rate_ratio(&traj, cfg.gamma_free);
        Ok(plateau(&ratio, traj.t_rec))
    })
}

/// [`refine`] with a caller-supplied plateau extractor.
pub fn refine_with<F>(
    base: &ScenarioConfig,
    density_factors: &[f64],
    range_factors: &[f64],
    extract: F,
) -> Result<ConvergenceReport>
where
    F: Fn(&ScenarioConfig) -> Result<f64> + Sync,
{
    if density_factors.len() != range_factors.len() {
        return Err(Error::invalid(
            "density and range factor lists must have the same length",
        ));
    }
    if density_factors.len() < 2 {
        return Err(Error::invalid(
            "a refinement ladder needs at least two rungs",
        ));
    }
    let rungs: Vec<RungReport> = density_factors
        .par_iter()
        .zip(range_factors)
        .map(|(&df, &rf)| match scale_config(base, df, rf) {
            Ok(cfg) => {
                let t_rec = cfg
                    .photon_grid()
                    .map(|g| g.recurrence_time())
                    .unwrap_or(f64::NAN);
                let spacing = cfg.photon_grid().map(|g| g.spacing()).unwrap_or(f64::NAN);
                match extract(&cfg) {
                    Ok(p) => RungReport {
                        density_factor: df,
                        range_factor: rf,
                        n_k: cfg.n_k,
                        n_omega: cfg.n_omega,
                        spacing,
                        recurrence_time: t_rec,
                        t_end: cfg.t_end,
                        plateau: Some(p),
                        error: None,
                    },
                    Err(e) => RungReport {
                        density_factor: df,
                        range_factor: rf,
                        n_k: cfg.n_k,
                        n_omega: cfg.n_omega,
                        spacing,
                        recurrence_time: t_rec,
                        t_end: cfg.t_end,
                        plateau: None,
                        error: Some(e.to_string()),
                    },
                }
            }
            Err(e) => RungReport {
                density_factor: df,
                range_factor: rf,
                n_k: 0,
                n_omega: 0,
                spacing: f64::NAN,
                recurrence_time: f64::NAN,
                t_end: f64::NAN,
                plateau: None,
                error: Some(e.to_string()),
            },
        })
        .collect();

    let mut deviations = Vec::new();
    for pair in rungs.windows(2) {
        if let (Some(a), Some(b)) = (pair[0].plateau, pair[1].plateau) {
            deviations.push((b - a).abs() / a.abs().max(f64::MIN_POSITIVE));
        }
    }
    let all_ran = rungs.iter().all(|r| r.error.is_none());
    let max_dev = deviations.iter().cloned().fold(0.0, f64::max);
    let passed = all_ran
        && deviations.len() == rungs.len() - 1
        && deviations
            .last()
            .map(|d| *d < PASS_THRESHOLD)
            .unwrap_or(false);
    Ok(ConvergenceReport {
        rungs,
        successive_deviations: deviations,
        max_successive_deviation: max_dev,
        passed,
    })
}
