//! Standalone property suite: structural invariants of the model builders
//! and the dynamics, checked on small instances. Runs in seconds.

use num_complex::Complex64 as C64;
use proptest::prelude::*;

use zeno_core::coupling::{detector_response, photon_coupling};
use zeno_core::dynamics::{integrate, rhs};
use zeno_core::grid::build_mode_grid;
use zeno_core::kernel::{
    delta_kernel, gaussian_kernel, kernel_from_attenuation, AttenuationProfile,
};
use zeno_core::model::SystemModel;
use zeno_core::observables::{decay_rate_ratio, intensity_profile, plateau};
use zeno_core::oracle::dense_hamiltonian;
use zeno_core::scenario::ScenarioConfig;
use zeno_core::state::{init_state, SystemState};

fn model(
    n_k: usize,
    n_w: usize,
    gamma: f64,
    eta_peak: f64,
    x_d: f64,
    kernel_width: Option<f64>,
) -> SystemModel {
    let pg = build_mode_grid(0.0, 2.0, n_k).unwrap();
    let og = build_mode_grid(0.0, 2.0, n_w).unwrap();
    let c = photon_coupling(&pg, gamma, x_d).unwrap();
    let r = detector_response(&pg, eta_peak, 2.0 / std::f64::consts::TAU, 1.0, 6).unwrap();
    let kern = match kernel_width {
        None => delta_kernel(&pg),
        Some(w) => gaussian_kernel(&pg, 0.103, w).unwrap(),
    };
    SystemModel::new(pg.clone(), og, c, r, kern, 1.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    // Every detection kernel is symmetric to machine precision.
    #[test]
    fn kernel_symmetry(
        n in 3usize..40,
        amplitude in 0.01f64..2.0,
        width in 0.005f64..5.0,
    ) {
        let g = build_mode_grid(0.0, 2.0, n).unwrap();
        prop_assert_eq!(delta_kernel(&g).asymmetry(), 0.0);
        let gauss = gaussian_kernel(&g, amplitude, width).unwrap();
        prop_assert!(gauss.asymmetry() <= f64::EPSILON);
    }

    // Photon coupling magnitudes do not depend on the displacement.
    #[test]
    fn displacement_only_rotates_couplings(
        x1 in -100.0f64..100.0,
        x2 in -100.0f64..100.0,
    ) {
        let g = build_mode_grid(0.0, 2.0, 24).unwrap();
        let a = photon_coupling(&g, 0.02, x1).unwrap();
        let b = photon_coupling(&g, 0.02, x2).unwrap();
        for (u, v) in a.xi().iter().zip(b.xi()) {
            prop_assert!((u.norm() - v.norm()).abs() < 1e-15);
        }
    }

    // Parseval: the intensity profile on the conjugate grid resolves exactly
    // the photon population.
    #[test]
    fn parseval_identity(values in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 12)) {
        let m = model(12, 2, 0.02, 0.0, 0.0, None);
        let mut s = init_state(&m);
        for (bk, (re, im)) in s.b.iter_mut().zip(&values) {
            *bk = C64::new(*re, *im);
        }
        let grid = m.photon_grid();
        let profile = intensity_profile(&s, grid, 12).unwrap();
        let dx = grid.recurrence_time() / 12.0;
        let lhs: f64 = profile.iter().map(|v| v * dx).sum();
        let rhs: f64 = s.b.iter().map(|v| v.norm_sqr()).sum();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1.0));
    }
}

#[test]
fn detector_response_is_symmetric_about_center() {
    let g = build_mode_grid(0.0, 2.0, 100).unwrap();
    let r = detector_response(&g, 2.0, 2.0 / std::f64::consts::TAU, 1.0, 6).unwrap();
    let n = g.n_modes();
    for j in 0..n / 2 {
        let lo = r.eta()[j];
        let hi = r.eta()[n - 1 - j];
        assert!((lo - hi).abs() <= 1e-12 * lo.max(hi));
    }
}

#[test]
fn attenuation_kernel_is_symmetric() {
    let g = build_mode_grid(0.0, 2.0, 60).unwrap();
    let r = detector_response(&g, 2.0, 2.0 / std::f64::consts::TAU, 1.0, 6).unwrap();
    let p = AttenuationProfile::gaussian(60.0, 0.05, 10.0, 600).unwrap();
    let kern = kernel_from_attenuation(&g, &p, &r).unwrap();
    assert!(kern.asymmetry() <= f64::EPSILON);
}

// Excitation bookkeeping: P_e + photon + detector = 1 at every step.
#[test]
fn excitation_bookkeeping() {
    let m = model(30, 20, 0.05, 1.0, 0.0, Some(0.1));
    let traj = integrate(&m, 40.0, 0.01, 0).unwrap();
    for i in 0..=traj.steps {
        let total = traj.population[i] + traj.photon_population[i] + traj.detector_population[i];
        assert!(
            (total - 1.0).abs() < 1e-8,
            "bookkeeping broken at step {i}: {total}"
        );
    }
}

// Parseval holds at every sampled time of a live trajectory.
#[test]
fn parseval_along_a_trajectory() {
    let m = model(30, 20, 0.05, 1.0, 7.0, Some(0.1));
    let traj = integrate(&m, 40.0, 0.01, 250).unwrap();
    let grid = m.photon_grid();
    let dx = grid.recurrence_time() / grid.n_modes() as f64;
    assert!(traj.samples.len() > 10);
    for s in &traj.samples {
        let profile = intensity_profile(s, grid, grid.n_modes()).unwrap();
        let lhs: f64 = profile.iter().map(|v| v * dx).sum();
        let rhs: f64 = s.b.iter().map(|v| v.norm_sqr()).sum();
        assert!(
            (lhs - rhs).abs() <= 1e-12 * rhs.max(1e-30),
            "parseval broken at t = {}: {lhs} vs {rhs}",
            s.t
        );
    }
}

// Detector silence: eta = 0 keeps the detector amplitudes exactly zero.
#[test]
fn detector_silence_without_coupling() {
    let m = model(30, 20, 0.05, 0.0, 0.0, None);
    let traj = integrate(&m, 40.0, 0.01, 400).unwrap();
    assert!(traj.detector_population.iter().all(|&p| p == 0.0));
    for s in &traj.samples {
        assert!(s.c.iter().all(|v| *v == C64::new(0.0, 0.0)));
    }
}

// Without detection the displacement phase cannot matter.
#[test]
fn displacement_is_irrelevant_when_unmeasured() {
    let a = integrate(&model(30, 4, 0.05, 0.0, 0.0, None), 40.0, 0.01, 0).unwrap();
    let b = integrate(&model(30, 4, 0.05, 0.0, 21.7, None), 40.0, 0.01, 0).unwrap();
    for (x, y) in a.population.iter().zip(&b.population) {
        assert!((x - y).abs() < 1e-10);
    }
}

// The atom freezes when the photon coupling vanishes.
#[test]
fn atom_freezes_without_photon_coupling() {
    let pg = build_mode_grid(0.0, 2.0, 20).unwrap();
    let og = build_mode_grid(0.0, 2.0, 10).unwrap();
    let c = photon_coupling(&pg, 1e-300, 0.0).unwrap(); // numerically zero coupling
    let r = detector_response(&pg, 1.0, 2.0 / std::f64::consts::TAU, 1.0, 6).unwrap();
    let m = SystemModel::new(pg.clone(), og, c, r, delta_kernel(&pg), 1.0).unwrap();
    let traj = integrate(&m, 60.0, 0.01, 0).unwrap();
    for p in &traj.population {
        assert!((p - 1.0).abs() < 1e-10);
    }
}

// Factorized right-hand side equals the dense matrix-vector product.
#[test]
fn rhs_matches_dense_hamiltonian() {
    let m = model(4, 3, 0.02, 0.2, 0.8, Some(0.3));
    let h = dense_hamiltonian(&m).unwrap();
    let minus_i = C64::new(0.0, -1.0);
    let mut seed = 0x9E3779B97F4A7C15u64;
    let mut rnd = || {
        seed ^= seed << 13;
        seed ^= seed >> 7;
        seed ^= seed << 17;
        (seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    for _ in 0..50 {
        let flat: Vec<C64> = (0..m.dim()).map(|_| C64::new(rnd(), rnd())).collect();
        let state = SystemState::from_flat(&flat, m.n_k(), m.n_omega(), 0.0);
        let d = rhs(&state, &m).unwrap();
        let mut structured = vec![d.d_alpha];
        structured.extend(d.d_b);
        structured.extend(d.d_c);
        let dense: Vec<C64> = h.apply(&flat).iter().map(|v| minus_i * v).collect();
        let scale = flat.iter().map(|v| v.norm()).fold(0.0, f64::max);
        for (a, b) in structured.iter().zip(&dense) {
            assert!((a - b).norm() <= 1e-12 * scale);
        }
    }
}

// RHS linearity to machine precision.
#[test]
fn rhs_linearity() {
    let m = model(5, 4, 0.02, 0.2, 0.4, None);
    let mut s1 = init_state(&m);
    let mut s2 = init_state(&m);
    s1.b[1] = C64::new(0.2, -0.3);
    s1.c[[2, 1]] = C64::new(0.1, 0.1);
    s2.alpha = C64::new(0.0, 0.5);
    s2.b[3] = C64::new(-0.4, 0.0);
    s2.c[[0, 2]] = C64::new(0.0, -0.2);
    let (a, b) = (C64::new(0.6, -0.2), C64::new(-0.3, 0.9));
    let combo = SystemState {
        alpha: a * s1.alpha + b * s2.alpha,
        b: &s1.b * a + &s2.b * b,
        c: &s1.c * a + &s2.c * b,
        t: 0.0,
    };
    let d1 = rhs(&s1, &m).unwrap();
    let d2 = rhs(&s2, &m).unwrap();
    let dc = rhs(&combo, &m).unwrap();
    assert!((dc.d_alpha - (a * d1.d_alpha + b * d2.d_alpha)).norm() < 1e-14);
    for j in 0..m.n_k() {
        assert!((dc.d_b[j] - (a * d1.d_b[j] + b * d2.d_b[j])).norm() < 1e-14);
    }
    for i in 0..m.n_k() * m.n_omega() {
        assert!((dc.d_c[i] - (a * d1.d_c[i] + b * d2.d_c[i])).norm() < 1e-14);
    }
}

// Energy conservation along a trajectory, measured with the dense oracle.
#[test]
fn energy_is_conserved() {
    let m = model(6, 4, 0.05, 0.5, 0.5, Some(0.2));
    let h = dense_hamiltonian(&m).unwrap();
    let traj = integrate(&m, 30.0, 0.01, 300).unwrap();
    let e0 = h.energy(&traj.samples[0].to_flat());
    for s in &traj.samples {
        let e = h.energy(&s.to_flat());
        assert!(
            (e - e0).abs() <= 1e-8 * e0.abs(),
            "energy drifted from {e0} to {e} at t = {}",
            s.t
        );
    }
}

// The short-time transient shrinks with the discretization bandwidth: the
// half-rise time scales like 1/(band width) across a x2 range ladder.
#[test]
fn transient_width_tracks_the_discretization_bandwidth() {
    let base = {
        let mut cfg = zeno_core::scenario::preset("ks-fig2-eta10").unwrap();
        cfg.t_end = 20.0;
        cfg.sample_stride = 0;
        cfg
    };
    let wide = zeno_core::convergence::scale_config(&base, 1.0, 2.0).unwrap();
    let mut scaled = Vec::new();
    for cfg in [&base, &wide] {
        let traj = zeno_core::scenario::run_scenario(cfg).unwrap();
        let ratio = decay_rate_ratio(&traj, cfg.gamma_free);
        let band = cfg.k_max - cfg.k_min;
        let t_half = zeno_core::observables::transient_half_time(&ratio, 0.33)
            .expect("the rate rises through the reference level");
        scaled.push(t_half * band);
    }
    let quotient = scaled[0] / scaled[1];
    assert!(
        (0.5..=2.0).contains(&quotient),
        "transient width fails the 1/bandwidth scaling: {scaled:?}"
    );
}

// The normalized decay rate is invariant under a uniform rescaling of all
// rates and times (a pure change of units).
#[test]
fn decay_ratio_is_scale_invariant() {
    let mut base = ScenarioConfig::default();
    base.n_k = 50;
    base.n_omega = 50;
    base.eta_peak = 2.0 * base.gamma_free * 10.0;
    base.t_end = 95.0;
    base.sample_stride = 0;
    let traj1 = zeno_core::scenario::run_scenario(&base).unwrap();
    let p1 = plateau(&decay_rate_ratio(&traj1, base.gamma_free), traj1.t_rec);

    // double every frequency and rate, halve every time
    let mut scaled = base.clone();
    scaled.atom_frequency *= 2.0;
    scaled.gamma_free *= 2.0;
    scaled.eta_peak *= 2.0;
    scaled.delta_bw *= 2.0;
    scaled.k_max *= 2.0;
    scaled.omega_max *= 2.0;
    scaled.t_end /= 2.0;
    scaled.dt /= 2.0;
    let traj2 = zeno_core::scenario::run_scenario(&scaled).unwrap();
    let p2 = plateau(&decay_rate_ratio(&traj2, scaled.gamma_free), traj2.t_rec);

    assert!(
        (p1 - p2).abs() <= 0.02 * p1.abs(),
        "plateaus {p1} and {p2} fail to overlay"
    );
}
