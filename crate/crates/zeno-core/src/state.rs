//! The one-excitation state vector.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::model::SystemModel;

/// Complex amplitudes of the one-excitation sector at time `t`:
/// `alpha` (emitter excited, fields empty), `b[k]` (one photon in mode `k`),
/// `c[[k, w]]` (one detector quantum at label `(k, w)`).
#[derive(Debug, Clone, PartialEq)]
pub struct SystemState {
    pub alpha: C64,
    pub b: Array1<C64>,
    pub c: Array2<C64>,
    pub t: f64,
}

/// The initial state: emitter excited, all field amplitudes zero.
pub fn init_state(model: &SystemModel) -> SystemState {
    SystemState {
        alpha: C64::new(1.0, 0.0),
        b: Array1::zeros(model.n_k()),
        c: Array2::zeros((model.n_k(), model.n_omega())),
        t: 0.0,
    }
}

/// Total norm `|alpha|^2 + Σ|b|^2 + Σ|c|^2`; conserved by the dynamics.
pub fn norm(state: &SystemState) -> f64 {
    state.norm()
}

impl SystemState {
    pub fn n_k(&self) -> usize {
        self.b.len()
    }

    pub fn n_omega(&self) -> usize {
        self.c.ncols()
    }

    pub fn norm(&self) -> f64 {
        self.alpha.norm_sqr()
            + self.b.iter().map(|v| v.norm_sqr()).sum::<f64>()
            + self.c.iter().map(|v| v.norm_sqr()).sum::<f64>()
    }

    /// Excited-state population `|alpha|^2`.
    pub fn excited_population(&self) -> f64 {
        self.alpha.norm_sqr()
    }

    pub fn photon_population(&self) -> f64 {
        self.b.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn matches(&self, model: &SystemModel) -> bool {
        self.n_k() == model.n_k()
            && self.c.nrows() == model.n_k()
            && self.n_omega() == model.n_omega()
    }

    /// Flatten into the canonical ordering: emitter, then `b` by `k`, then
    /// `c` row-major by `(k, w)`.
    pub fn to_flat(&self) -> Vec<C64> {
        let mut v = Vec::with_capacity(1 + self.b.len() + self.c.len());
        v.push(self.alpha);
        v.extend(self.b.iter().copied());
        v.extend(self.c.iter().copied());
        v
    }

    pub fn from_flat(flat: &[C64], n_k: usize, n_omega: usize, t: f64) -> SystemState {
        assert_eq!(
            flat.len(),
            1 + n_k + n_k * n_omega,
            "flat state length mismatch"
        );
        SystemState {
            alpha: flat[0],
            b: Array1::from_iter(flat[1..1 + n_k].iter().copied()),
            c: Array2::from_shape_vec((n_k, n_omega), flat[1 + n_k..].to_vec())
                .expect("row-major layout"),
            t,
        }
    }

    /// Photon amplitudes re-phased into the emitter's frame,
    /// `b_k -> b_k e^{i k x_d}`, so that spatial observables measure distance
    /// from the emitter. Detector amplitudes are unchanged (only their
    /// magnitudes are observed).
    pub fn shifted_to_atom_frame(&self, k_values: &[f64], x_d: f64) -> SystemState {
        let mut out = self.clone();
        for (bk, &k) in out.b.iter_mut().zip(k_values) {
            *bk *= C64::from_polar(1.0, k * x_d);
        }
        out
    }
}
