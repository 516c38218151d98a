//! Dense-matrix propagator for small instances, independent of the
//! structured right-hand side. Used to validate the factorized dynamics.

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eigh, UPLO};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::model::SystemModel;
use crate::state::SystemState;

/// Largest sector dimension the oracle accepts.
pub const DIM_GUARD: usize = 5000;

/// The one-excitation Hamiltonian materialized as a dense Hermitian matrix.
///
/// Basis ordering: emitter, then photon modes by `k`, then detector labels
/// row-major by `(k, w)`.
#[derive(Debug, Clone)]
pub struct DenseHamiltonian {
    matrix: Array2<C64>,
}

/// Materialize the dense Hamiltonian of a model.
pub fn dense_hamiltonian(model: &SystemModel) -> Result<DenseHamiltonian> {
    let dim = model.dim();
    if dim > DIM_GUARD {
        return Err(Error::DimensionGuard {
            dim,
            max: DIM_GUARD,
        });
    }
    let n_k = model.n_k();
    let n_w = model.n_omega();
    let mut h = Array2::<C64>::zeros((dim, dim));

    h[[0, 0]] = model.atom_frequency().into();
    let xi = model.coupling().xi();
    for (j, &k) in model.photon_grid().values().iter().enumerate() {
        let bj = 1 + j;
        h[[bj, bj]] = k.into();
        // <e,0,0| H |g,1_k,0> couples through the conjugate coupling
        h[[0, bj]] = xi[j].conj();
        h[[bj, 0]] = xi[j];
    }
    let m = model.effective_coupling();
    let w = model.omega_grid().values();
    for j in 0..n_k {
        for jp in 0..n_k {
            let weight: C64 = m[[j, jp]].into();
            if weight.norm_sqr() == 0.0 {
                continue;
            }
            for mw in 0..n_w {
                let ci = 1 + n_k + jp * n_w + mw;
                h[[1 + j, ci]] = weight;
                h[[ci, 1 + j]] = weight;
            }
        }
    }
    for jp in 0..n_k {
        for (mw, &freq) in w.iter().enumerate() {
            let ci = 1 + n_k + jp * n_w + mw;
            h[[ci, ci]] = freq.into();
        }
    }

    // scrub rounding asymmetry so H = H† holds exactly
    let dagger = h.t().mapv(|v| v.conj());
    let herm = (&h + &dagger).mapv(|v| 0.5 * v);
    Ok(DenseHamiltonian { matrix: herm })
}

impl DenseHamiltonian {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    /// Largest Hermiticity violation `max |H - H†|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.matrix[[i, j]] - self.matrix[[j, i]].conj()).norm());
            }
        }
        worst
    }

    /// `H ψ` on a flat state vector.
    pub fn apply(&self, psi: &[C64]) -> Vec<C64> {
        let v = Array1::from_iter(psi.iter().copied());
        self.matrix.dot(&v).to_vec()
    }

    /// Energy expectation `<ψ|H|ψ>` (real for Hermitian `H`).
    pub fn energy(&self, psi: &[C64]) -> f64 {
        let hpsi = self.apply(psi);
        psi.iter().zip(&hpsi).map(|(a, b)| (a.conj() * b).re).sum()
    }
}

/// Propagate `state0` for a span `t` with the dense eigendecomposition
/// propagator `ψ(t) = V e^{-iλt} V† ψ(0)`, exactly unitary up to rounding.
pub fn propagate_dense(model: &SystemModel, t: f64, state0: &SystemState) -> Result<SystemState> {
    if !state0.matches(model) {
        return Err(Error::invalid(
            "initial state dimensions do not match the model",
        ));
    }
    let h = dense_hamiltonian(model)?;
    let (eigvals, raw_vecs) = h
        .matrix
        .eigh(UPLO::Upper)
        .map_err(|e| Error::Oracle(format!("eigendecomposition failed: {e}")))?;
    // For row-major complex input the backend diagonalizes the transpose, so
    // the true eigenvectors are the conjugated columns: H = W Λ W† with
    // W = conj(raw). Verified against H v = λ v in the unit tests.
    let vectors = raw_vecs.mapv(|v| v.conj());

    let psi0 = Array1::from_vec(state0.to_flat());
    let in_eigenbasis = vectors.t().mapv(|v| v.conj()).dot(&psi0);
    let evolved = Array1::from_iter(
        in_eigenbasis
            .iter()
            .zip(eigvals.iter())
            .map(|(a, &lambda)| a * C64::from_polar(1.0, -lambda * t)),
    );
    let psi_t = vectors.dot(&evolved);
    Ok(SystemState::from_flat(
        psi_t.as_slice().expect("contiguous"),
        model.n_k(),
        model.n_omega(),
        state0.t + t,
    ))
}
