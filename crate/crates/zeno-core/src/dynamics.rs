//! Time evolution of the one-excitation amplitudes.
//!
//! The equations of motion couple the emitter amplitude to the photon modes,
//! and the photon modes to the detector plane through the effective matrix
//! `M`. The right-hand side exploits the factorized structure: the detector
//! block only ever enters through its row sums `s_{k'} = Σ_w c_{k'w}` and is
//! only ever driven by the broadcast vector `Mᵀ b`, so one evaluation costs
//! `O(n_k² + n_k n_w)` instead of the naive `O(n_k² n_w)`.

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::SystemModel;
use crate::state::{init_state, SystemState};

/// Element count above which the per-mode loops run on the rayon pool.
/// Work is split by photon row, so results stay bit-identical to serial.
const PAR_THRESHOLD: usize = 1 << 15;

/// Hard failure threshold on norm drift; exceeding it means the step size is
/// misconfigured rather than merely inaccurate.
pub const NORM_DRIFT_LIMIT: f64 = 1e-6;

/// Margin applied to the `dt * max_frequency < 0.5` stability guard when
/// suggesting a usable step.
const SUGGESTED_GUARD: f64 = 0.45;

/// Integration frame.
///
/// `Direct` integrates the amplitudes as they are. `Interaction` rotates out
/// the diagonal frequencies analytically and integrates only the coupling
/// terms, which removes the fastest phases from the stepper; both frames
/// agree to integrator tolerance on any stable step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Frame {
    #[default]
    Direct,
    Interaction,
}

/// Time derivative of a [`SystemState`].
#[derive(Debug, Clone)]
pub struct StateDeriv {
    pub d_alpha: C64,
    pub d_b: Vec<C64>,
    pub d_c: Vec<C64>,
}

/// Evaluate the equations of motion at `state`.
pub fn rhs(state: &SystemState, model: &SystemModel) -> Result<StateDeriv> {
    if !state.matches(model) {
        return Err(Error::invalid(format!(
            "state dimensions ({}, {}) do not match the model ({}, {})",
            state.n_k(),
            state.n_omega(),
            model.n_k(),
            model.n_omega()
        )));
    }
    let y = state.to_flat();
    let mut dy = vec![C64::new(0.0, 0.0); y.len()];
    let mut bufs = RhsBuffers::new(model);
    rhs_direct(model, &y, &mut dy, &mut bufs);
    let n_k = model.n_k();
    Ok(StateDeriv {
        d_alpha: dy[0],
        d_b: dy[1..1 + n_k].to_vec(),
        d_c: dy[1 + n_k..].to_vec(),
    })
}

struct RhsBuffers {
    row_sums: Vec<C64>,
    feedback: Vec<C64>,
    drive: Vec<C64>,
    /// phase-rotated copy of the state (interaction frame only)
    rotated: Vec<C64>,
    phase_k: Vec<C64>,
    phase_w: Vec<C64>,
}

impl RhsBuffers {
    fn new(model: &SystemModel) -> Self {
        let n_k = model.n_k();
        let n_w = model.n_omega();
        RhsBuffers {
            row_sums: vec![C64::new(0.0, 0.0); n_k],
            feedback: vec![C64::new(0.0, 0.0); n_k],
            drive: vec![C64::new(0.0, 0.0); n_k],
            rotated: vec![C64::new(0.0, 0.0); model.dim()],
            phase_k: vec![C64::new(0.0, 0.0); n_k],
            phase_w: vec![C64::new(0.0, 0.0); n_w],
        }
    }
}

/// `out[i] = Σ_j m[i, j] v[j]` for a real matrix and complex vector.
fn matvec_real(m: &ndarray::Array2<f64>, v: &[C64], out: &mut [C64]) {
    let n = out.len();
    let rows = m.as_slice().expect("row-major effective coupling");
    if n * n >= PAR_THRESHOLD {
        out.par_iter_mut().enumerate().for_each(|(i, o)| {
            let row = &rows[i * n..(i + 1) * n];
            let mut acc = C64::new(0.0, 0.0);
            for (w, x) in row.iter().zip(v) {
                acc += *w * *x;
            }
            *o = acc;
        });
    } else {
        for (i, o) in out.iter_mut().enumerate() {
            let row = &rows[i * n..(i + 1) * n];
            let mut acc = C64::new(0.0, 0.0);
            for (w, x) in row.iter().zip(v) {
                acc += *w * *x;
            }
            *o = acc;
        }
    }
}

fn rhs_direct(model: &SystemModel, y: &[C64], dy: &mut [C64], bufs: &mut RhsBuffers) {
    let n_k = model.n_k();
    let n_w = model.n_omega();
    let minus_i = C64::new(0.0, -1.0);
    let (alpha, rest) = (y[0], &y[1..]);
    let (b, c) = rest.split_at(n_k);

    // s_{k'} = Σ_w c_{k'w}
    if n_k * n_w >= PAR_THRESHOLD {
        bufs.row_sums
            .par_iter_mut()
            .enumerate()
            .for_each(|(j, s)| *s = c[j * n_w..(j + 1) * n_w].iter().sum());
    } else {
        for (j, s) in bufs.row_sums.iter_mut().enumerate() {
            *s = c[j * n_w..(j + 1) * n_w].iter().sum();
        }
    }
    matvec_real(
        model.effective_coupling(),
        &bufs.row_sums,
        &mut bufs.feedback,
    );
    matvec_real(model.effective_coupling_t(), b, &mut bufs.drive);

    let xi = model.coupling().xi();
    let k = model.photon_grid().values();
    let w = model.omega_grid().values();

    let mut drive_alpha = C64::new(0.0, 0.0);
    for (x, bk) in xi.iter().zip(b) {
        drive_alpha += x.conj() * bk;
    }
    dy[0] = minus_i * (model.atom_frequency() * alpha + drive_alpha);

    let (db, dc) = dy[1..].split_at_mut(n_k);
    for j in 0..n_k {
        db[j] = minus_i * (k[j] * b[j] + xi[j] * alpha + bufs.feedback[j]);
    }

    let drive = &bufs.drive;
    if n_k * n_w >= PAR_THRESHOLD {
        dc.par_chunks_mut(n_w).enumerate().for_each(|(j, row)| {
            let d = drive[j];
            let crow = &c[j * n_w..(j + 1) * n_w];
            for (m, out) in row.iter_mut().enumerate() {
                *out = minus_i * (w[m] * crow[m] + d);
            }
        });
    } else {
        for j in 0..n_k {
            let d = drive[j];
            let crow = &c[j * n_w..(j + 1) * n_w];
            let row = &mut dc[j * n_w..(j + 1) * n_w];
            for (m, out) in row.iter_mut().enumerate() {
                *out = minus_i * (w[m] * crow[m] + d);
            }
        }
    }
}

/// Interaction-frame right-hand side at stage time `t` (relative to the frame
/// anchor). The stored amplitudes are `ỹ = D†(t) y` with `D` the diagonal
/// free evolution; only the coupling terms remain.
fn rhs_interaction(model: &SystemModel, t: f64, y: &[C64], dy: &mut [C64], bufs: &mut RhsBuffers) {
    let n_k = model.n_k();
    let n_w = model.n_omega();
    let minus_i = C64::new(0.0, -1.0);
    let k = model.photon_grid().values();
    let w = model.omega_grid().values();
    for (p, &kj) in bufs.phase_k.iter_mut().zip(k) {
        *p = C64::from_polar(1.0, -kj * t);
    }
    for (p, &wm) in bufs.phase_w.iter_mut().zip(w) {
        *p = C64::from_polar(1.0, -wm * t);
    }
    let phase_a = C64::from_polar(1.0, -model.atom_frequency() * t);

    // physical amplitudes p = D ỹ
    bufs.rotated[0] = phase_a * y[0];
    for j in 0..n_k {
        bufs.rotated[1 + j] = bufs.phase_k[j] * y[1 + j];
    }
    {
        let (_head, pc) = bufs.rotated.split_at_mut(1 + n_k);
        let cy = &y[1 + n_k..];
        let phase_w = &bufs.phase_w;
        if n_k * n_w >= PAR_THRESHOLD {
            pc.par_chunks_mut(n_w).enumerate().for_each(|(j, row)| {
                let src = &cy[j * n_w..(j + 1) * n_w];
                for m in 0..n_w {
                    row[m] = phase_w[m] * src[m];
                }
            });
        } else {
            for j in 0..n_k {
                let src = &cy[j * n_w..(j + 1) * n_w];
                let row = &mut pc[j * n_w..(j + 1) * n_w];
                for m in 0..n_w {
                    row[m] = phase_w[m] * src[m];
                }
            }
        }
    }

    let (p_alpha, p_rest) = (bufs.rotated[0], &bufs.rotated[1..]);
    let (p_b, p_c) = p_rest.split_at(n_k);

    if n_k * n_w >= PAR_THRESHOLD {
        bufs.row_sums
            .par_iter_mut()
            .enumerate()
            .for_each(|(j, s)| *s = p_c[j * n_w..(j + 1) * n_w].iter().sum());
    } else {
        for (j, s) in bufs.row_sums.iter_mut().enumerate() {
            *s = p_c[j * n_w..(j + 1) * n_w].iter().sum();
        }
    }
    matvec_real(
        model.effective_coupling(),
        &bufs.row_sums,
        &mut bufs.feedback,
    );
    matvec_real(model.effective_coupling_t(), p_b, &mut bufs.drive);

    let xi = model.coupling().xi();
    let mut drive_alpha = C64::new(0.0, 0.0);
    for (x, bk) in xi.iter().zip(p_b) {
        drive_alpha += x.conj() * bk;
    }
    dy[0] = minus_i * phase_a.conj() * drive_alpha;

    let (db, dc) = dy[1..].split_at_mut(n_k);
    for j in 0..n_k {
        db[j] = minus_i * bufs.phase_k[j].conj() * (xi[j] * p_alpha + bufs.feedback[j]);
    }
    let drive = &bufs.drive;
    let phase_w = &bufs.phase_w;
    if n_k * n_w >= PAR_THRESHOLD {
        dc.par_chunks_mut(n_w).enumerate().for_each(|(j, row)| {
            let d = drive[j];
            for (m, out) in row.iter_mut().enumerate() {
                *out = minus_i * phase_w[m].conj() * d;
            }
        });
    } else {
        for j in 0..n_k {
            let d = drive[j];
            let row = &mut dc[j * n_w..(j + 1) * n_w];
            for (m, out) in row.iter_mut().enumerate() {
                *out = minus_i * phase_w[m].conj() * d;
            }
        }
    }
}

/// Undo the interaction-frame rotation at relative time `t`.
fn unrotate(model: &SystemModel, t: f64, y: &mut [C64]) {
    let n_k = model.n_k();
    let n_w = model.n_omega();
    y[0] *= C64::from_polar(1.0, -model.atom_frequency() * t);
    for (j, &kj) in model.photon_grid().values().iter().enumerate() {
        y[1 + j] *= C64::from_polar(1.0, -kj * t);
    }
    let w = model.omega_grid().values();
    let c = &mut y[1 + n_k..];
    for j in 0..n_k {
        let row = &mut c[j * n_w..(j + 1) * n_w];
        for m in 0..n_w {
            row[m] *= C64::from_polar(1.0, -w[m] * t);
        }
    }
}

/// Time-sampled result of an integration.
///
/// Scalar series (`population`, `photon_population`, `detector_population`,
/// `norms`) are recorded at every integrator step; full states are thinned by
/// `sample_stride` (0 disables state samples). The final state is always
/// kept.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub dt: f64,
    pub steps: usize,
    pub population: Vec<f64>,
    pub photon_population: Vec<f64>,
    pub detector_population: Vec<f64>,
    pub norms: Vec<f64>,
    pub samples: Vec<SystemState>,
    pub sample_stride: usize,
    pub final_state: SystemState,
    pub max_norm_drift: f64,
    /// Recurrence time of the photon grid the run was produced on.
    pub t_rec: f64,
}

impl Trajectory {
    /// Times of the per-step scalar series.
    pub fn times(&self) -> Vec<f64> {
        (0..=self.steps).map(|i| i as f64 * self.dt).collect()
    }

    pub fn t_end(&self) -> f64 {
        self.steps as f64 * self.dt
    }
}

/// Integrate from the excited-emitter initial state with classical
/// fixed-step fourth-order Runge-Kutta in the direct frame.
pub fn integrate(
    model: &SystemModel,
    t_end: f64,
    dt: f64,
    sample_stride: usize,
) -> Result<Trajectory> {
    integrate_with(model, t_end, dt, sample_stride, Frame::Direct)
}

/// Integrate from the excited-emitter initial state in the given frame.
pub fn integrate_with(
    model: &SystemModel,
    t_end: f64,
    dt: f64,
    sample_stride: usize,
    frame: Frame,
) -> Result<Trajectory> {
    integrate_from(model, &init_state(model), t_end, dt, sample_stride, frame)
}

/// Integrate an arbitrary start state over a span `t_end`.
pub fn integrate_from(
    model: &SystemModel,
    state0: &SystemState,
    t_end: f64,
    dt: f64,
    sample_stride: usize,
    frame: Frame,
) -> Result<Trajectory> {
    if !state0.matches(model) {
        return Err(Error::invalid(
            "initial state dimensions do not match the model",
        ));
    }
    if !(dt > 0.0) || !(t_end > 0.0) {
        return Err(Error::invalid("t_end and dt must be positive"));
    }
    let f_max = model.max_frequency();
    if dt * f_max >= 0.5 {
        return Err(Error::Stability {
            dt,
            suggested: SUGGESTED_GUARD / f_max,
        });
    }
    let steps = (t_end / dt).round().max(1.0) as usize;
    let t0 = state0.t;
    let n_k = model.n_k();
    let n_w = model.n_omega();

    let mut y = state0.to_flat();
    let dim = y.len();
    let norm0 = flat_norm(&y);

    let mut k1 = vec![C64::new(0.0, 0.0); dim];
    let mut k2 = k1.clone();
    let mut k3 = k1.clone();
    let mut k4 = k1.clone();
    let mut tmp = k1.clone();
    let mut bufs = RhsBuffers::new(model);

    let eval = |t: f64, y: &[C64], dy: &mut [C64], bufs: &mut RhsBuffers| match frame {
        Frame::Direct => rhs_direct(model, y, dy, bufs),
        Frame::Interaction => rhs_interaction(model, t, y, dy, bufs),
    };

    let mut population = Vec::with_capacity(steps + 1);
    let mut photon_population = Vec::with_capacity(steps + 1);
    let mut detector_population = Vec::with_capacity(steps + 1);
    let mut norms = Vec::with_capacity(steps + 1);
    let mut samples = Vec::new();
    let mut max_drift = 0.0_f64;

    let record = |y: &[C64],
                  pop: &mut Vec<f64>,
                  phot: &mut Vec<f64>,
                  det: &mut Vec<f64>,
                  norms: &mut Vec<f64>| {
        let p = y[0].norm_sqr();
        let pb: f64 = y[1..1 + n_k].iter().map(|v| v.norm_sqr()).sum();
        let pc: f64 = y[1 + n_k..].iter().map(|v| v.norm_sqr()).sum();
        pop.push(p);
        phot.push(pb);
        det.push(pc);
        norms.push(p + pb + pc);
    };

    let snapshot = |y: &[C64], rel_t: f64, model: &SystemModel| -> SystemState {
        let mut copy = y.to_vec();
        if frame == Frame::Interaction {
            unrotate(model, rel_t, &mut copy);
        }
        SystemState::from_flat(&copy, n_k, n_w, t0 + rel_t)
    };

    record(
        &y,
        &mut population,
        &mut photon_population,
        &mut detector_population,
        &mut norms,
    );
    if sample_stride > 0 {
        samples.push(snapshot(&y, 0.0, model));
    }

    for step in 0..steps {
        let t = step as f64 * dt;
        eval(t, &y, &mut k1, &mut bufs);
        add_scaled(&mut tmp, &y, &k1, 0.5 * dt);
        eval(t + 0.5 * dt, &tmp, &mut k2, &mut bufs);
        add_scaled(&mut tmp, &y, &k2, 0.5 * dt);
        eval(t + 0.5 * dt, &tmp, &mut k3, &mut bufs);
        add_scaled(&mut tmp, &y, &k3, dt);
        eval(t + dt, &tmp, &mut k4, &mut bufs);
        let w6 = dt / 6.0;
        for i in 0..dim {
            y[i] += w6 * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
        }

        record(
            &y,
            &mut population,
            &mut photon_population,
            &mut detector_population,
            &mut norms,
        );
        let drift = (norms.last().unwrap() - norm0).abs();
        max_drift = max_drift.max(drift);
        if drift > NORM_DRIFT_LIMIT {
            return Err(Error::NormDrift {
                drift,
                t: t0 + (step + 1) as f64 * dt,
            });
        }
        if sample_stride > 0 && (step + 1) % sample_stride == 0 {
            samples.push(snapshot(&y, (step + 1) as f64 * dt, model));
        }
    }

    let final_state = snapshot(&y, steps as f64 * dt, model);
    Ok(Trajectory {
        dt,
        steps,
        population,
        photon_population,
        detector_population,
        norms,
        samples,
        sample_stride,
        final_state,
        max_norm_drift: max_drift,
        t_rec: model.photon_grid().recurrence_time(),
    })
}

fn add_scaled(out: &mut [C64], base: &[C64], k: &[C64], scale: f64) {
    for ((o, b), kk) in out.iter_mut().zip(base).zip(k) {
        *o = *b + scale * *kk;
    }
}

fn flat_norm(y: &[C64]) -> f64 {
    y.iter().map(|v| v.norm_sqr()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::{detector_response, photon_coupling};
    use crate::grid::build_mode_grid;
    use crate::kernel::delta_kernel;
    use crate::model::SystemModel;
    use approx::assert_relative_eq;

    fn model(n_k: usize, n_w: usize, gamma: f64, eta_peak: f64, x_d: f64) -> SystemModel {
        let pg = build_mode_grid(0.0, 2.0, n_k).unwrap();
        let og = build_mode_grid(0.0, 2.0, n_w).unwrap();
        let c = photon_coupling(&pg, gamma, x_d).unwrap();
        let r = detector_response(&pg, eta_peak, 2.0 / std::f64::consts::TAU, 1.0, 6).unwrap();
        SystemModel::new(pg.clone(), og, c, r, delta_kernel(&pg), 1.0).unwrap()
    }

    #[test]
    fn rhs_at_the_initial_state_only_drives_the_photons() {
        let m = model(5, 3, 0.02, 0.2, 0.7);
        let s = init_state(&m);
        let d = rhs(&s, &m).unwrap();
        let minus_i = C64::new(0.0, -1.0);
        assert_relative_eq!(
            (d.d_alpha - minus_i * m.atom_frequency()).norm(),
            0.0,
            epsilon = 1e-15
        );
        for (j, db) in d.d_b.iter().enumerate() {
            let expected = minus_i * m.coupling().xi()[j];
            assert!((db - expected).norm() < 1e-15);
        }
        assert!(d.d_c.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn detector_stays_silent_without_coupling() {
        let m = model(6, 4, 0.02, 0.0, 0.0);
        let traj = integrate(&m, 20.0, 0.01, 0).unwrap();
        assert!(traj.final_state.c.iter().all(|v| *v == C64::new(0.0, 0.0)));
        assert!(traj.detector_population.iter().all(|&p| p == 0.0));
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let m = model(5, 3, 0.02, 0.2, 0.0);
        let other = model(4, 3, 0.02, 0.2, 0.0);
        let s = init_state(&other);
        assert!(rhs(&s, &m).is_err());
        assert!(integrate_from(&m, &s, 1.0, 0.01, 0, Frame::Direct).is_err());
    }

    #[test]
    fn stability_guard_rejects_large_steps_with_a_suggestion() {
        let m = model(5, 3, 0.02, 0.2, 0.0);
        match integrate(&m, 10.0, 0.3, 0) {
            Err(Error::Stability { dt, suggested }) => {
                assert_eq!(dt, 0.3);
                assert!(suggested < 0.25 && suggested > 0.0);
            }
            other => panic!("expected stability error, got {other:?}"),
        }
    }

    #[test]
    fn rhs_is_linear_in_the_state() {
        let m = model(4, 3, 0.02, 0.2, 0.4);
        let mut s1 = init_state(&m);
        let mut s2 = init_state(&m);
        s1.b[1] = C64::new(0.2, -0.3);
        s1.c[[2, 1]] = C64::new(0.1, 0.1);
        s2.alpha = C64::new(0.0, 0.5);
        s2.b[3] = C64::new(-0.4, 0.0);
        s2.c[[0, 2]] = C64::new(0.0, -0.2);
        let (a, b) = (C64::new(0.7, 0.0), C64::new(-0.3, 0.0));

        let combo = SystemState {
            alpha: a * s1.alpha + b * s2.alpha,
            b: &s1.b * a + &s2.b * b,
            c: &s1.c * a + &s2.c * b,
            t: 0.0,
        };
        let d1 = rhs(&s1, &m).unwrap();
        let d2 = rhs(&s2, &m).unwrap();
        let dc = rhs(&combo, &m).unwrap();
        assert!((dc.d_alpha - (a * d1.d_alpha + b * d2.d_alpha)).norm() < 1e-15);
        for j in 0..m.n_k() {
            assert!((dc.d_b[j] - (a * d1.d_b[j] + b * d2.d_b[j])).norm() < 1e-15);
        }
        for i in 0..m.n_k() * m.n_omega() {
            assert!((dc.d_c[i] - (a * d1.d_c[i] + b * d2.d_c[i])).norm() < 1e-15);
        }
    }

    #[test]
    fn free_phase_evolution_preserves_population() {
        // no photon coupling at all: alpha only picks up the free phase
        let pg = build_mode_grid(0.0, 2.0, 4).unwrap();
        let og = build_mode_grid(0.0, 2.0, 3).unwrap();
        // the builder requires gamma > 0, so use a numerically zero coupling
        let c = photon_coupling(&pg, 1e-300, 0.0).unwrap();
        let r = detector_response(&pg, 0.0, 0.3, 1.0, 6).unwrap();
        let m = SystemModel::new(pg.clone(), og, c, r, delta_kernel(&pg), 1.0).unwrap();
        let traj = integrate(&m, 50.0, 0.01, 0).unwrap();
        for p in &traj.population {
            assert_relative_eq!(*p, 1.0, epsilon = 1e-10);
        }
        let t = traj.final_state.t;
        let expected = C64::from_polar(1.0, -m.atom_frequency() * t);
        assert!((traj.final_state.alpha - expected).norm() < 1e-6);
    }

    #[test]
    fn interaction_frame_agrees_with_direct_integration() {
        let m = model(8, 6, 0.02, 0.2, 0.5);
        let a = integrate_with(&m, 15.0, 0.01, 0, Frame::Direct).unwrap();
        let b = integrate_with(&m, 15.0, 0.01, 0, Frame::Interaction).unwrap();
        let fa = a.final_state.to_flat();
        let fb = b.final_state.to_flat();
        let worst = fa
            .iter()
            .zip(&fb)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        assert!(worst < 1e-8, "frames disagree by {worst:.3e}");
    }

    #[test]
    fn displacement_does_not_change_population_without_detection() {
        let m0 = model(20, 3, 0.05, 0.0, 0.0);
        let m1 = model(20, 3, 0.05, 0.0, 13.7);
        let t0 = integrate(&m0, 40.0, 0.01, 0).unwrap();
        let t1 = integrate(&m1, 40.0, 0.01, 0).unwrap();
        for (a, b) in t0.population.iter().zip(&t1.population) {
            assert_relative_eq!(a, b, epsilon = 1e-10);
        }
    }

    #[test]
    fn norm_drift_failure_reports_integration_error() {
        // a step just inside the stability guard is wildly inaccurate
        let m = model(10, 8, 0.02, 0.2, 0.0);
        let r = integrate(&m, 200.0, 0.249, 0);
        match r {
            Err(Error::NormDrift { drift, .. }) => assert!(drift > NORM_DRIFT_LIMIT),
            Ok(t) => panic!(
                "expected norm drift failure, got drift {}",
                t.max_norm_drift
            ),
            Err(e) => panic!("unexpected error {e:?}"),
        }
    }

    #[test]
    fn final_time_lands_within_one_step_of_the_request() {
        let m = model(4, 3, 0.02, 0.2, 0.0);
        let traj = integrate(&m, 1.004, 0.01, 0).unwrap();
        assert!((traj.t_end() - 1.004).abs() <= 0.01);
    }
}
