//! Trotterized circuit simulation of the faulty theory on a qubit register.
//!
//! The register interleaves matter and gauge qubits: matter site `j` sits on
//! qubit `2j`, gauge link `j` on qubit `2j+1` (open boundaries only). Gauge
//! qubits are stored in the `τ^x` eigenbasis, so the field, protection and
//! violation measurements are diagonal while `τ^z` flips the stored bit.
//!
//! A step applies the layers `exp(-iH_J δt)`, `exp(-iH_h δt)`,
//! `exp(-iλH_1 δt)`, `exp(-iVH_W δt)` in that order. Layers whose gates share
//! qubits are split into even/odd sublayers of exact block exponentials; the
//! protection layer is entirely diagonal and needs no split. Constraint 0 is
//! protected through the frozen fictitious left link, which turns its
//! two-link term into a single `Rx` on gauge qubit 0; additive constants of
//! `W_j - g_j^tar` are dropped as global phases.

use std::io::Write;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{Boundary, HilbertSpace, LatticeSpec};
use crate::model::{build_faulty_hamiltonian, pattern_bits, InitialPattern, ModelParams};
use crate::observables::{temporal_average, InstantObservables};
use crate::ops::StateVector;
use crate::sequences::CoeffSequence;
use crate::timeseries::TimeSeries;

/// Protection strength at which circuit gate angles begin to alias,
/// `π / (2 δt)`.
pub fn ideal_protection_strength(dt: f64) -> f64 {
    assert!(dt > 0.0, "Trotter step must be positive");
    std::f64::consts::PI / (2.0 * dt)
}

/// One circuit gate. Single-qubit rotations follow `R_a(φ) = exp(-i a φ/2)`;
/// the two- and three-qubit blocks store their full exponent angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    /// `exp(-i τ^x φ/2)` on gauge qubit `2*link+1`.
    Rx { link: usize, angle: f64 },
    /// `exp(-i σ^z φ/2)` on matter qubit `2*site`.
    Rz { site: usize, angle: f64 },
    /// `exp(-i θ τ^x τ^x)` on a gauge-qubit pair.
    Xx { links: (usize, usize), angle: f64 },
    /// `exp(+i θ (σ^+ τ^z σ^- + h.c.))` on bond `j`: qubits `2j, 2j+1, 2j+2`.
    HoppingBlock { bond: usize, angle: f64 },
    /// `exp(-i θ (σ^+ σ^- + σ^- σ^+))` on the matter pair of bond `j`.
    TwoQubitMatterHop { bond: usize, angle: f64 },
    /// `exp(-i τ^z φ/2)` on a gauge qubit: the circuit phase-flip error.
    GaugePhaseFlip { link: usize, angle: f64 },
}

impl Gate {
    pub fn name(&self) -> &'static str {
        match self {
            Gate::Rx { .. } => "Rx",
            Gate::Rz { .. } => "Rz",
            Gate::Xx { .. } => "XX",
            Gate::HoppingBlock { .. } => "HoppingBlock",
            Gate::TwoQubitMatterHop { .. } => "TwoQubitMatterHop",
            Gate::GaugePhaseFlip { .. } => "GaugePhaseFlip",
        }
    }

    pub fn angle(&self) -> f64 {
        match *self {
            Gate::Rx { angle, .. }
            | Gate::Rz { angle, .. }
            | Gate::Xx { angle, .. }
            | Gate::HoppingBlock { angle, .. }
            | Gate::TwoQubitMatterHop { angle, .. }
            | Gate::GaugePhaseFlip { angle, .. } => angle,
        }
    }

    /// Target qubit indices in the interleaved layout.
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::Rx { link, .. } | Gate::GaugePhaseFlip { link, .. } => vec![2 * link + 1],
            Gate::Rz { site, .. } => vec![2 * site],
            Gate::Xx { links: (a, b), .. } => vec![2 * a + 1, 2 * b + 1],
            Gate::HoppingBlock { bond, .. } => vec![2 * bond, 2 * bond + 1, 2 * bond + 2],
            Gate::TwoQubitMatterHop { bond, .. } => vec![2 * bond, 2 * bond + 2],
        }
    }

    fn check_targets(&self, l: usize) -> Result<()> {
        let ok = match *self {
            Gate::Rx { link, .. } | Gate::GaugePhaseFlip { link, .. } => link < l,
            Gate::Rz { site, .. } => site < l,
            Gate::Xx { links: (a, b), .. } => a < l && b < l && a != b,
            Gate::HoppingBlock { bond, .. } | Gate::TwoQubitMatterHop { bond, .. } => bond + 1 < l,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: *self.qubits().iter().max().unwrap_or(&0),
                l: 2 * l,
            })
        }
    }
}

/// Apply one gate in place. Unitary by construction; norm is preserved.
pub fn apply_gate(state: &mut StateVector, gate: &Gate, l: usize) -> Result<()> {
    gate.check_targets(l)?;
    let dim = state.amp.len();
    debug_assert_eq!(dim, 1 << (2 * l));
    let amp = &mut state.amp;
    match *gate {
        Gate::Rx { link, angle } => {
            let p = 1usize << (2 * link + 1);
            let plus = Complex64::from_polar(1.0, -angle / 2.0); // tau^x = +1
            let minus = Complex64::from_polar(1.0, angle / 2.0);
            for (i, a) in amp.iter_mut().enumerate() {
                *a *= if i & p == 0 { plus } else { minus };
            }
        }
        Gate::Rz { site, angle } => {
            let p = 1usize << (2 * site);
            let occupied = Complex64::from_polar(1.0, -angle / 2.0); // sigma^z = +1
            let empty = Complex64::from_polar(1.0, angle / 2.0);
            for (i, a) in amp.iter_mut().enumerate() {
                *a *= if i & p == 0 { empty } else { occupied };
            }
        }
        Gate::Xx { links: (la, lb), angle } => {
            let pa = 1usize << (2 * la + 1);
            let pb = 1usize << (2 * lb + 1);
            let aligned = Complex64::from_polar(1.0, -angle); // t_a t_b = +1
            let opposed = Complex64::from_polar(1.0, angle);
            for (i, a) in amp.iter_mut().enumerate() {
                let same = (i & pa == 0) == (i & pb == 0);
                *a *= if same { aligned } else { opposed };
            }
        }
        Gate::GaugePhaseFlip { link, angle } => {
            let p = 1usize << (2 * link + 1);
            let theta = angle / 2.0;
            let (s, c) = theta.sin_cos();
            let mix = Complex64::new(0.0, -s);
            for i in 0..dim {
                if i & p != 0 {
                    continue;
                }
                let j = i | p;
                let (a, b) = (amp[i], amp[j]);
                amp[i] = a * c + b * mix;
                amp[j] = b * c + a * mix;
            }
        }
        Gate::TwoQubitMatterHop { bond, angle } => {
            let pa = 1usize << (2 * bond);
            let pb = 1usize << (2 * bond + 2);
            let (s, c) = angle.sin_cos();
            let mix = Complex64::new(0.0, -s);
            for i in 0..dim {
                // canonical representative: particle on the right, none left
                if i & pa != 0 || i & pb == 0 {
                    continue;
                }
                let j = (i | pa) & !pb;
                let (a, b) = (amp[i], amp[j]);
                amp[i] = a * c + b * mix;
                amp[j] = b * c + a * mix;
            }
        }
        Gate::HoppingBlock { bond, angle } => {
            let pa = 1usize << (2 * bond);
            let pl = 1usize << (2 * bond + 1);
            let pb = 1usize << (2 * bond + 2);
            let (s, c) = angle.sin_cos();
            let mix = Complex64::new(0.0, s);
            for i in 0..dim {
                if i & pa != 0 || i & pb == 0 {
                    continue;
                }
                let j = ((i | pa) & !pb) ^ pl;
                let (a, b) = (amp[i], amp[j]);
                amp[i] = a * c + b * mix;
                amp[j] = b * c + a * mix;
            }
        }
    }
    Ok(())
}

/// Compiled gate sequence of one first-order Trotter step.
#[derive(Debug, Clone)]
pub struct TrotterStep {
    pub gates: Vec<Gate>,
    /// End indices of the four layers: `H_J | H_h | error | protection`.
    pub layer_bounds: [usize; 4],
    l: usize,
}

impl TrotterStep {
    pub fn n_sites(&self) -> usize {
        self.l
    }

    pub fn layer(&self, index: usize) -> &[Gate] {
        let start = if index == 0 {
            0
        } else {
            self.layer_bounds[index - 1]
        };
        &self.gates[start..self.layer_bounds[index]]
    }

    /// Apply the whole step in place.
    pub fn apply(&self, state: &mut StateVector) -> Result<()> {
        for gate in &self.gates {
            apply_gate(state, gate, self.l)?;
        }
        Ok(())
    }

    /// Plain-text netlist: one gate per line as `kind qubits... angle`.
    pub fn write_netlist(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "# one gate per line: kind target-qubits angle")?;
        writeln!(
            w,
            "# qubit layout: matter site j -> qubit 2j, gauge link j -> qubit 2j+1"
        )?;
        writeln!(w, "# gauge qubits are stored in the tau^x eigenbasis")?;
        for gate in &self.gates {
            let targets: Vec<String> = gate.qubits().iter().map(|q| q.to_string()).collect();
            writeln!(w, "{} {} {:.11e}", gate.name(), targets.join(" "), gate.angle())?;
        }
        Ok(())
    }
}

/// Compile the four-layer step. Gates with zero angle are omitted, so e.g.
/// `λ = 0` produces no error layer.
pub fn compile_step(
    spec: &LatticeSpec,
    params: &ModelParams,
    seq: &CoeffSequence,
    dt: f64,
) -> Result<TrotterStep> {
    if spec.boundary != Boundary::Open {
        return Err(Error::PeriodicUnsupported);
    }
    spec.validate()?;
    params.validate()?;
    if !(dt > 0.0) {
        return Err(Error::InvalidParams(format!(
            "Trotter step must be positive, got {dt}"
        )));
    }
    if params.lambda != 0.0 && params.error_model != crate::model::ErrorModel::Circuit {
        return Err(Error::InvalidParams(
            "the compiled error layer implements the circuit error model".into(),
        ));
    }
    let l = spec.n_matter;
    let mut gates = Vec::new();
    let mut bounds = [0usize; 4];

    // H_J: even-bond sublayer, then odd-bond sublayer of exact 3-qubit blocks
    let hop = params.j * dt;
    if hop != 0.0 {
        for parity in [0, 1] {
            for bond in (parity..l - 1).step_by(2) {
                gates.push(Gate::HoppingBlock { bond, angle: hop });
            }
        }
    }
    bounds[0] = gates.len();

    // H_h: single-qubit x-rotations on every gauge qubit
    if params.h * dt != 0.0 {
        for link in 0..l {
            gates.push(Gate::Rx {
                link,
                angle: -2.0 * params.h * dt,
            });
        }
    }
    bounds[1] = gates.len();

    // error layer: phase flips on every link, unassisted hops even/odd
    if params.lambda * dt != 0.0 {
        for link in 0..l {
            gates.push(Gate::GaugePhaseFlip {
                link,
                angle: 2.0 * params.lambda * dt,
            });
        }
        for parity in [0, 1] {
            for bond in (parity..l - 1).step_by(2) {
                gates.push(Gate::TwoQubitMatterHop {
                    bond,
                    angle: params.lambda * dt,
                });
            }
        }
    }
    bounds[2] = gates.len();

    // protection layer (all diagonal): matter Rz per site, the frozen-link
    // boundary term as a single Rx, and link-pair XX gates for sites 1..L-1
    if params.v * dt != 0.0 {
        let coeffs = seq.extended_f64(l);
        for site in 0..l {
            gates.push(Gate::Rz {
                site,
                angle: 2.0 * coeffs[site] * params.v * spec.target_sector[site] as f64 * dt,
            });
        }
        gates.push(Gate::Rx {
            link: 0,
            angle: 2.0 * coeffs[0] * params.v * dt,
        });
        for site in 1..l {
            gates.push(Gate::Xx {
                links: (site - 1, site),
                angle: coeffs[site] * params.v * dt,
            });
        }
    }
    bounds[3] = gates.len();

    Ok(TrotterStep {
        gates,
        layer_bounds: bounds,
        l,
    })
}

#[derive(Debug, Clone)]
pub struct CircuitConfig {
    /// Trotter step in units of `1/J`.
    pub dt: f64,
    pub n_steps: usize,
    pub params: ModelParams,
    pub seq: CoeffSequence,
    /// Observables are sampled every this many steps.
    pub sample_every: usize,
}

impl CircuitConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || self.n_steps == 0 || self.sample_every == 0 {
            return Err(Error::InvalidParams(
                "need dt > 0, n_steps >= 1 and sample_every >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// Diagonal observables over the interleaved qubit register.
pub struct QubitLattice {
    spec: LatticeSpec,
}

impl QubitLattice {
    pub fn new(spec: LatticeSpec) -> Result<Self> {
        if spec.boundary != Boundary::Open {
            return Err(Error::PeriodicUnsupported);
        }
        spec.validate()?;
        Ok(Self { spec })
    }

    pub fn dim(&self) -> usize {
        1 << (2 * self.spec.n_matter)
    }

    fn occupation(&self, idx: usize, site: usize) -> u32 {
        ((idx >> (2 * site)) & 1) as u32
    }

    fn link_value(&self, idx: usize, link: usize) -> i8 {
        1 - 2 * ((idx >> (2 * link + 1)) & 1) as i8
    }

    pub fn gauge_eigenvalue(&self, idx: usize, site: usize) -> i8 {
        let parity = 1 - 2 * self.occupation(idx, site) as i8;
        let left = if site == 0 {
            1
        } else {
            self.link_value(idx, site - 1)
        };
        parity * left * self.link_value(idx, site)
    }

    /// Basis code of the packed Hilbert-space layout (matter bits low,
    /// link bits high) for a qubit-register index.
    pub fn hilbert_code(&self, idx: usize) -> u32 {
        let l = self.spec.n_matter;
        let mut matter = 0u32;
        let mut links = 0u32;
        for j in 0..l {
            matter |= (((idx >> (2 * j)) & 1) as u32) << j;
            links |= (((idx >> (2 * j + 1)) & 1) as u32) << j;
        }
        matter | (links << l)
    }

    pub fn evaluate(&self, state: &StateVector) -> InstantObservables {
        let l = self.spec.n_matter;
        let target = &self.spec.target_sector;
        let mut sum_g = 0.0;
        let mut sum_w = 0.0;
        let mut sum_w_int = 0.0;
        let mut n_stag = 0.0;
        let mut e_flux = 0.0;
        let mut norm_sq = 0.0;
        for (idx, amp) in state.amp.iter().enumerate() {
            let p = amp.norm_sqr();
            if p == 0.0 {
                continue;
            }
            norm_sq += p;
            for site in 0..l {
                let g = self.gauge_eigenvalue(idx, site) as f64;
                let w = g * target[site] as f64;
                sum_g += p * g;
                sum_w += p * w;
                if site > 0 {
                    sum_w_int += p * w;
                }
                let sign = if site % 2 == 0 { -1.0 } else { 1.0 };
                n_stag += p * sign * self.occupation(idx, site) as f64;
                e_flux += p * self.link_value(idx, site) as f64;
            }
        }
        InstantObservables {
            sum_g,
            violation_all: 1.0 - sum_w / l as f64,
            violation_interior: 1.0 - sum_w_int / (l - 1) as f64,
            n_stag: n_stag / l as f64,
            e_flux: e_flux / l as f64,
            norm: norm_sq.sqrt(),
        }
    }
}

/// Gauge-invariant product state in the qubit register layout.
pub fn circuit_initial_state(spec: &LatticeSpec, pattern: &InitialPattern) -> Result<StateVector> {
    if spec.boundary != Boundary::Open {
        return Err(Error::PeriodicUnsupported);
    }
    let (occupations, links) = pattern_bits(spec, pattern)?;
    let mut idx = 0usize;
    for (j, &n) in occupations.iter().enumerate() {
        idx |= (n as usize) << (2 * j);
    }
    for (j, &t) in links.iter().enumerate() {
        if t == -1 {
            idx |= 1 << (2 * j + 1);
        }
    }
    Ok(StateVector::basis_state(1 << (2 * spec.n_matter), idx))
}

/// Run the Trotterized quench, sampling observables every `sample_every`
/// steps at `t = k δt`. The raw violation column sums the interior
/// constraints only; the energy column tracks the faulty Hamiltonian and is
/// conserved only up to Trotter error.
pub fn run_circuit(
    spec: &LatticeSpec,
    config: &CircuitConfig,
    psi0: &StateVector,
) -> Result<TimeSeries> {
    config.validate()?;
    let lattice = QubitLattice::new(spec.clone())?;
    if psi0.dim() != lattice.dim() {
        return Err(Error::DimensionMismatch {
            left: psi0.dim(),
            right: lattice.dim(),
        });
    }
    let initial = lattice.evaluate(psi0);
    if initial.violation_all.abs() > 1e-10 {
        return Err(Error::InvalidParams(format!(
            "initial state is not in the target sector (violation {})",
            initial.violation_all
        )));
    }
    let step = compile_step(spec, &config.params, &config.seq, config.dt)?;

    // faulty Hamiltonian in the packed layout, for the energy column
    let space = HilbertSpace::build(spec.clone(), None)?;
    let h = build_faulty_hamiltonian(&space, &config.params, &config.seq)?;
    let mut permuted = StateVector::zeros(space.dim());
    let code_of: Vec<u32> = (0..lattice.dim())
        .map(|idx| lattice.hilbert_code(idx))
        .collect();
    let energy_of = |state: &StateVector, permuted: &mut StateVector| {
        for (idx, amp) in state.amp.iter().enumerate() {
            permuted.amp[code_of[idx] as usize] = *amp;
        }
        h.expectation(permuted)
    };

    let mut series = TimeSeries::default();
    let mut inst_all = Vec::new();
    let mut state = psi0.clone();
    let record = |k: usize,
                      state: &StateVector,
                      series: &mut TimeSeries,
                      inst_all: &mut Vec<f64>,
                      permuted: &mut StateVector| {
        let obs = lattice.evaluate(state);
        series.times.push(k as f64 * config.dt);
        series.sum_g.push(obs.sum_g);
        series.eps_raw.push(obs.violation_interior);
        series.n_stag.push(obs.n_stag);
        series.e_flux.push(obs.e_flux);
        series.energy.push(energy_of(state, permuted));
        series.norm.push(obs.norm);
        inst_all.push(obs.violation_all);
    };
    record(0, &state, &mut series, &mut inst_all, &mut permuted);
    for k in 1..=config.n_steps {
        step.apply(&mut state)?;
        if k % config.sample_every == 0 {
            record(k, &state, &mut series, &mut inst_all, &mut permuted);
        }
    }
    series.eps_avg = temporal_average(&inst_all, &series.times)?;
    series.validate_unitary(1e-9)?;
    Ok(series)
}

/// Final raw violation against protection strength, sorted by `V`.
pub fn scan_final_violation(
    spec: &LatticeSpec,
    config: &CircuitConfig,
    psi0: &StateVector,
    v_values: &[f64],
) -> Result<Vec<(f64, f64)>> {
    let mut rows = Vec::with_capacity(v_values.len());
    for &v in v_values {
        if !(v > 0.0) {
            return Err(Error::InvalidParams(format!(
                "scanned protection strengths must be positive, got {v}"
            )));
        }
        let mut run = config.clone();
        run.params.v = v;
        let series = run_circuit(spec, &run, psi0)?;
        rows.push((v, *series.eps_raw.last().unwrap()));
    }
    rows.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    Ok(rows)
}
