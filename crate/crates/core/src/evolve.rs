//! Continuous-time quench evolution: dense spectral propagation and Krylov
//! (Lanczos) stepping, plus the observable-sampling quench driver.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::HilbertSpace;
use crate::model::{
    build_adjusted_from_params, build_faulty_hamiltonian, build_ideal_hamiltonian, ModelParams,
};
use crate::observables::{temporal_average, ObservableEvaluator};
use crate::ops::{OperatorMatrix, StateVector};
use crate::sequences::CoeffSequence;
use crate::timeseries::TimeSeries;

/// Largest dimension the dense engine will diagonalize.
pub const DENSE_CAP: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Dense,
    Krylov,
}

/// Which Hamiltonian the quench runs under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HamiltonianVariant {
    /// `H_0 + λ H_1 + V H_W`
    Faulty,
    /// `H_0 + λ P_0 H_1 P_0`
    Adjusted,
    /// `H_0`
    Ideal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuenchConfig {
    /// Evolution time in units of `1/J`.
    pub t_max: f64,
    pub sample_interval: f64,
    pub engine: Engine,
    pub krylov_dim: usize,
    pub krylov_tol: f64,
}

impl Default for QuenchConfig {
    fn default() -> Self {
        Self {
            t_max: 10.0,
            sample_interval: 0.01,
            engine: Engine::Dense,
            krylov_dim: 30,
            krylov_tol: 1e-12,
        }
    }
}

impl QuenchConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.sample_interval > 0.0 && self.sample_interval <= self.t_max) {
            return Err(Error::InvalidParams(format!(
                "need 0 < sample_interval <= t_max, got {} and {}",
                self.sample_interval, self.t_max
            )));
        }
        if self.krylov_dim < 4 {
            return Err(Error::InvalidParams(format!(
                "krylov_dim must be at least 4, got {}",
                self.krylov_dim
            )));
        }
        Ok(())
    }
}

/// Cached spectral decomposition of a Hermitian operator.
pub struct DensePropagator {
    eigvals: DVector<f64>,
    u: DMatrix<f64>,
}

impl DensePropagator {
    pub fn new(h: &OperatorMatrix) -> Result<Self> {
        Self::with_cap(h, DENSE_CAP)
    }

    pub fn with_cap(h: &OperatorMatrix, cap: usize) -> Result<Self> {
        if h.dim() > cap {
            return Err(Error::Capacity {
                what: "dense propagator dimension",
                got: h.dim(),
                cap,
            });
        }
        h.verify_hermitian()?;
        let eig = h.to_dense().symmetric_eigen();
        Ok(Self {
            eigvals: eig.eigenvalues,
            u: eig.eigenvectors,
        })
    }

    pub fn dim(&self) -> usize {
        self.eigvals.len()
    }

    /// Project a state onto the eigenbasis: `w = U^T psi` (real/imag parts).
    pub fn to_eigenbasis(&self, psi: &StateVector) -> (DVector<f64>, DVector<f64>) {
        let d = self.dim();
        let re = DVector::from_iterator(d, psi.amp.iter().map(|a| a.re));
        let im = DVector::from_iterator(d, psi.amp.iter().map(|a| a.im));
        (self.u.tr_mul(&re), self.u.tr_mul(&im))
    }

    /// `psi(t) = U exp(-i Λ t) w` from eigenbasis coordinates.
    pub fn from_eigenbasis(&self, w: &(DVector<f64>, DVector<f64>), t: f64) -> StateVector {
        let d = self.dim();
        let mut pr = DVector::zeros(d);
        let mut pi = DVector::zeros(d);
        for k in 0..d {
            let (s, c) = (-self.eigvals[k] * t).sin_cos();
            pr[k] = w.0[k] * c - w.1[k] * s;
            pi[k] = w.0[k] * s + w.1[k] * c;
        }
        let out_re = &self.u * pr;
        let out_im = &self.u * pi;
        StateVector {
            amp: (0..d)
                .map(|i| Complex64::new(out_re[i], out_im[i]))
                .collect(),
        }
    }

    pub fn evolve(&self, psi: &StateVector, t: f64) -> StateVector {
        self.from_eigenbasis(&self.to_eigenbasis(psi), t)
    }
}

/// One-shot exact propagation `psi(t) = exp(-i H t) psi0`.
pub fn evolve_dense(h: &OperatorMatrix, psi0: &StateVector, t: f64) -> Result<StateVector> {
    if h.dim() != psi0.dim() {
        return Err(Error::DimensionMismatch {
            left: h.dim(),
            right: psi0.dim(),
        });
    }
    Ok(DensePropagator::new(h)?.evolve(psi0, t))
}

struct LanczosStep {
    state: StateVector,
    residual: f64,
}

fn lanczos_step(h: &OperatorMatrix, psi: &StateVector, dt: f64, m: usize) -> LanczosStep {
    let d = psi.dim();
    let beta0 = psi.norm();
    if beta0 == 0.0 {
        return LanczosStep {
            state: psi.clone(),
            residual: 0.0,
        };
    }
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(m + 1);
    basis.push(psi.amp.iter().map(|a| a / beta0).collect());
    let mut alphas: Vec<f64> = Vec::with_capacity(m);
    let mut betas: Vec<f64> = Vec::with_capacity(m);
    let mut happy = false;
    let mut h_scale = 1.0f64;
    let mut w = vec![Complex64::new(0.0, 0.0); d];
    for j in 0..m {
        h.matvec(&basis[j], &mut w);
        let alpha: f64 = basis[j]
            .iter()
            .zip(&w)
            .map(|(q, x)| (q.conj() * x).re)
            .sum();
        alphas.push(alpha);
        h_scale = h_scale.max(alpha.abs());
        for (x, q) in w.iter_mut().zip(&basis[j]) {
            *x -= q * alpha;
        }
        if j > 0 {
            let b = betas[j - 1];
            for (x, q) in w.iter_mut().zip(&basis[j - 1]) {
                *x -= q * b;
            }
        }
        // full reorthogonalization
        for q in &basis {
            let overlap: Complex64 = q.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
            for (x, a) in w.iter_mut().zip(q) {
                *x -= a * overlap;
            }
        }
        let beta = w.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        betas.push(beta);
        h_scale = h_scale.max(beta);
        if beta < 1e-14 * h_scale {
            happy = true;
            break;
        }
        if j + 1 < m {
            basis.push(w.iter().map(|x| x / beta).collect());
        }
    }
    let k = alphas.len();
    // exponential of the tridiagonal projection
    let mut t_mat = DMatrix::zeros(k, k);
    for i in 0..k {
        t_mat[(i, i)] = alphas[i];
        if i + 1 < k {
            t_mat[(i, i + 1)] = betas[i];
            t_mat[(i + 1, i)] = betas[i];
        }
    }
    let eig = t_mat.symmetric_eigen();
    let mut y = vec![Complex64::new(0.0, 0.0); k];
    for (col, &s) in eig.eigenvalues.iter().enumerate() {
        let phase = Complex64::from_polar(1.0, -s * dt);
        let weight = eig.eigenvectors[(0, col)];
        for (row, yv) in y.iter_mut().enumerate() {
            *yv += eig.eigenvectors[(row, col)] * phase * weight;
        }
    }
    let mut out = vec![Complex64::new(0.0, 0.0); d];
    for (j, q) in basis.iter().enumerate().take(k) {
        let coeff = y[j] * beta0;
        for (o, a) in out.iter_mut().zip(q) {
            *o += a * coeff;
        }
    }
    let residual = if happy {
        0.0
    } else {
        betas[k - 1] * dt.abs() * y[k - 1].norm()
    };
    LanczosStep {
        state: StateVector { amp: out },
        residual,
    }
}

/// One Krylov time step with full reorthogonalization. If the Lanczos
/// residual estimate exceeds `tol` the step is halved recursively, erroring
/// after 10 halvings.
pub fn evolve_krylov(
    h: &OperatorMatrix,
    psi: &StateVector,
    dt: f64,
    krylov_dim: usize,
    tol: f64,
) -> Result<StateVector> {
    if h.dim() != psi.dim() {
        return Err(Error::DimensionMismatch {
            left: h.dim(),
            right: psi.dim(),
        });
    }
    fn step(
        h: &OperatorMatrix,
        psi: &StateVector,
        dt: f64,
        m: usize,
        tol: f64,
        depth: usize,
    ) -> Result<StateVector> {
        let attempt = lanczos_step(h, psi, dt, m);
        if attempt.residual <= tol {
            return Ok(attempt.state);
        }
        if depth >= 10 {
            return Err(Error::KrylovNoConvergence { halvings: depth });
        }
        let half = step(h, psi, dt / 2.0, m, tol, depth + 1)?;
        step(h, &half, dt / 2.0, m, tol, depth + 1)
    }
    step(h, psi, dt, krylov_dim, tol, 0)
}

/// Assemble the requested Hamiltonian variant.
pub fn assemble_hamiltonian(
    space: &HilbertSpace,
    params: &ModelParams,
    seq: &CoeffSequence,
    variant: HamiltonianVariant,
) -> Result<OperatorMatrix> {
    match variant {
        HamiltonianVariant::Faulty => build_faulty_hamiltonian(space, params, seq),
        HamiltonianVariant::Adjusted => build_adjusted_from_params(space, params),
        HamiltonianVariant::Ideal => Ok(build_ideal_hamiltonian(space, params.j, params.h)),
    }
}

/// Quench `psi0` with the selected Hamiltonian and sample all observables on
/// a uniform grid. The averaged violation integrates the instantaneous
/// all-sites violation by the trapezoidal rule with `eps(0) = 0`.
pub fn run_quench(
    space: &HilbertSpace,
    params: &ModelParams,
    seq: &CoeffSequence,
    psi0: &StateVector,
    config: &QuenchConfig,
    variant: HamiltonianVariant,
) -> Result<TimeSeries> {
    config.validate()?;
    params.validate()?;
    let evaluator = ObservableEvaluator::new(space);
    let initial = evaluator.evaluate(psi0);
    if initial.violation_all.abs() > 1e-10 {
        return Err(Error::InvalidParams(format!(
            "initial state is not in the target sector (violation {})",
            initial.violation_all
        )));
    }
    let h = assemble_hamiltonian(space, params, seq, variant)?;
    let n_samples = (config.t_max / config.sample_interval).round() as usize;
    let times: Vec<f64> = (0..=n_samples)
        .map(|k| k as f64 * config.sample_interval)
        .collect();

    let mut inst_all = Vec::with_capacity(times.len());
    let mut series = TimeSeries::default();
    series.times = times.clone();

    let record = |psi: &StateVector, series: &mut TimeSeries, inst_all: &mut Vec<f64>| {
        let obs = evaluator.evaluate(psi);
        inst_all.push(obs.violation_all);
        series.sum_g.push(obs.sum_g);
        series.eps_raw.push(obs.violation_interior);
        series.n_stag.push(obs.n_stag);
        series.e_flux.push(obs.e_flux);
        series.energy.push(h.expectation(psi));
        series.norm.push(obs.norm);
    };

    match config.engine {
        Engine::Dense => {
            let propagator = DensePropagator::new(&h)?;
            let w0 = propagator.to_eigenbasis(psi0);
            for &t in &times {
                let psi = propagator.from_eigenbasis(&w0, t);
                record(&psi, &mut series, &mut inst_all);
            }
        }
        Engine::Krylov => {
            let mut psi = psi0.clone();
            record(&psi, &mut series, &mut inst_all);
            for _ in 1..times.len() {
                psi = evolve_krylov(
                    &h,
                    &psi,
                    config.sample_interval,
                    config.krylov_dim,
                    config.krylov_tol,
                )?;
                record(&psi, &mut series, &mut inst_all);
            }
        }
    }
    series.eps_avg = temporal_average(&inst_all, &times)?;
    series.validate_unitary(1e-10)?;
    series.validate_energy(1e-8)?;
    Ok(series)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{Boundary, LatticeSpec};
    use crate::model::{build_initial_state, InitialPattern};
    use crate::sequences::{make_sequence, SequencePreset};

    fn staggered_setup() -> (HilbertSpace, StateVector) {
        let space =
            HilbertSpace::build(LatticeSpec::new(4, Boundary::Periodic), Some(2)).unwrap();
        let psi = build_initial_state(&space, &InitialPattern::Staggered).unwrap();
        (space, psi)
    }

    #[test]
    fn zero_time_is_identity() {
        let (space, psi) = staggered_setup();
        let params = ModelParams::analog(1.0, 0.3, 1.0, 16.0);
        let seq = make_sequence(SequencePreset::Seventeenths).unwrap();
        let h = assemble_hamiltonian(&space, &params, &seq, HamiltonianVariant::Faulty).unwrap();
        let out = evolve_dense(&h, &psi, 0.0).unwrap();
        assert!(out.max_amp_diff(&psi) < 1e-13);
        let out = evolve_krylov(&h, &psi, 0.0, 30, 1e-12).unwrap();
        assert!(out.max_amp_diff(&psi) < 1e-13);
    }

    #[test]
    fn diagonal_hamiltonian_evolves_by_phase() {
        let diag = OperatorMatrix::from_diagonal(vec![0.5, -1.5, 2.0]);
        let psi = StateVector::basis_state(3, 1);
        let out = evolve_dense(&diag, &psi, 0.7).unwrap();
        let expected = Complex64::from_polar(1.0, 1.5 * 0.7);
        assert!((out.amp[1] - expected).norm() < 1e-12);
        assert!(out.amp[0].norm() < 1e-14 && out.amp[2].norm() < 1e-14);
    }

    #[test]
    fn krylov_matches_dense_on_faulty_theory() {
        let (space, psi) = staggered_setup();
        let params = ModelParams::analog(1.0, 0.3, 1.0, 16.0);
        let seq = make_sequence(SequencePreset::Seventeenths).unwrap();
        let h = assemble_hamiltonian(&space, &params, &seq, HamiltonianVariant::Faulty).unwrap();
        let t = 1.0;
        let dense = evolve_dense(&h, &psi, t).unwrap();
        let mut krylov = psi.clone();
        for _ in 0..20 {
            krylov = evolve_krylov(&h, &krylov, t / 20.0, 30, 1e-13).unwrap();
        }
        assert!(dense.max_amp_diff(&krylov) < 1e-10);
    }

    #[test]
    fn krylov_first_order_in_dt() {
        let (space, psi) = staggered_setup();
        let params = ModelParams::analog(1.0, 0.3, 1.0, 4.0);
        let seq = make_sequence(SequencePreset::Seventeenths).unwrap();
        let h = assemble_hamiltonian(&space, &params, &seq, HamiltonianVariant::Faulty).unwrap();
        let residual = |dt: f64| {
            let out = evolve_krylov(&h, &psi, dt, 30, 1e-12).unwrap();
            let mut lin = psi.clone();
            let mut hpsi = vec![Complex64::new(0.0, 0.0); psi.dim()];
            h.matvec(&psi.amp, &mut hpsi);
            for (a, b) in lin.amp.iter_mut().zip(&hpsi) {
                *a -= Complex64::i() * dt * b;
            }
            out.max_amp_diff(&lin)
        };
        let r1 = residual(1e-3);
        let r2 = residual(5e-4);
        assert!(r1 / r2 > 3.0 && r1 / r2 < 5.0, "ratio {}", r1 / r2);
    }

    #[test]
    fn krylov_norm_stable_over_many_steps() {
        let (space, psi) = staggered_setup();
        let params = ModelParams::analog(1.0, 0.3, 1.0, 1.0);
        let seq = make_sequence(SequencePreset::Seventeenths).unwrap();
        let h = assemble_hamiltonian(&space, &params, &seq, HamiltonianVariant::Faulty).unwrap();
        let mut state = psi;
        for _ in 0..1000 {
            state = evolve_krylov(&h, &state, 0.01, 20, 1e-12).unwrap();
        }
        assert!((state.norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn quench_without_error_stays_in_sector() {
        let (space, psi) = staggered_setup();
        let params = ModelParams::analog(1.0, 0.3, 0.0, 0.0);
        let seq = make_sequence(SequencePreset::Seventeenths).unwrap();
        let config = QuenchConfig {
            t_max: 2.0,
            sample_interval: 0.05,
            ..QuenchConfig::default()
        };
        let series = run_quench(
            &space,
            &params,
            &seq,
            &psi,
            &config,
            HamiltonianVariant::Faulty,
        )
        .unwrap();
        for &eps in &series.eps_avg {
            assert!(eps.abs() < 1e-12);
        }
        for &e in &series.eps_raw {
            assert!(e.abs() < 1e-12);
        }
    }

    #[test]
    fn quench_rejects_out_of_sector_initial_state() {
        let (space, psi) = staggered_setup();
        // flip a link on the staggered state
        let idx = psi.amp.iter().position(|a| a.norm() > 0.5).unwrap();
        let bad_code = space.flip_link(space.code(idx), 0);
        let bad = StateVector::basis_state(space.dim(), space.index_of(bad_code).unwrap());
        let params = ModelParams::analog(1.0, 0.3, 1.0, 16.0);
        let seq = make_sequence(SequencePreset::Seventeenths).unwrap();
        let err = run_quench(
            &space,
            &params,
            &seq,
            &bad,
            &QuenchConfig::default(),
            HamiltonianVariant::Faulty,
        );
        assert!(err.is_err());
    }

    #[test]
    fn dense_cap_is_enforced() {
        let diag = OperatorMatrix::from_diagonal(vec![0.0; 10]);
        assert!(DensePropagator::with_cap(&diag, 5).is_err());
    }

    #[test]
    fn sampling_grid_halving_is_stable() {
        // halving the sampling interval must not change eps_avg appreciably
        let (space, psi) = staggered_setup();
        let params = ModelParams::analog(1.0, 0.3, 1.0, 16.0);
        let seq = make_sequence(SequencePreset::Seventeenths).unwrap();
        let run = |dt: f64| {
            let config = QuenchConfig {
                t_max: 5.0,
                sample_interval: dt,
                ..QuenchConfig::default()
            };
            run_quench(
                &space,
                &params,
                &seq,
                &psi,
                &config,
                HamiltonianVariant::Faulty,
            )
            .unwrap()
        };
        let coarse = run(0.01);
        let fine = run(0.005);
        let eps_coarse = *coarse.eps_avg.last().unwrap();
        let eps_fine = *fine.eps_avg.last().unwrap();
        assert!(
            (eps_coarse - eps_fine).abs() < 1e-4,
            "delta {}",
            (eps_coarse - eps_fine).abs()
        );
    }
}
