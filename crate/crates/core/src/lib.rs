//! Simulator and analysis toolkit for the (1+1)-dimensional Z2 lattice gauge
//! theory under local-pseudogenerator (LPG) gauge protection.
//!
//! The crate builds the chain's Hilbert space and Hamiltonian pieces, decides
//! compliance of protection-coefficient sequences exactly, evolves quenches
//! in continuous time (dense spectral or Krylov), simulates the Trotterized
//! circuit realization gate by gate, and measures the gauge violation,
//! staggered occupation and electric flux throughout.

pub mod error;
pub mod evolve;
pub mod hilbert;
pub mod model;
pub mod observables;
pub mod ops;
pub mod sequences;
pub mod timeseries;
pub mod trotter;

pub use error::{Error, Result};
pub use evolve::{
    assemble_hamiltonian, evolve_dense, evolve_krylov, run_quench, DensePropagator, Engine,
    HamiltonianVariant, QuenchConfig, DENSE_CAP,
};
pub use hilbert::{Boundary, HilbertSpace, LatticeSpec, DEFAULT_DIM_CAP};
pub use model::{
    build_adjusted_hamiltonian, build_analog_error, build_circuit_error, build_error_term,
    build_faulty_hamiltonian, build_gauge_generator, build_ideal_hamiltonian, build_initial_state,
    build_lpg, build_protection, build_target_projector, ErrorModel, InitialPattern, ModelParams,
    DEFAULT_ALPHAS,
};
pub use observables::{
    electric_flux, gauge_violation_instant, staggered_occupation, temporal_average,
    InstantObservables, ObservableEvaluator, ViolationMode,
};
pub use ops::{OperatorMatrix, StateVector};
pub use sequences::{
    is_compliant, make_sequence, resonance_fraction, CoeffSequence, ComplianceReport,
    DeviationConfig, Rational, SequencePreset,
};
pub use timeseries::{RunMeta, TimeSeries, CSV_COLUMNS, FORMAT_VERSION};
pub use trotter::{
    apply_gate, circuit_initial_state, compile_step, ideal_protection_strength, run_circuit,
    scan_final_violation, CircuitConfig, Gate, QubitLattice, TrotterStep,
};
