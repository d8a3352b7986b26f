//! Shared oracle utilities for integration tests: independent dense operator
//! construction from explicit 2x2 matrices via Kronecker products, and a
//! Taylor-series matrix exponential. Nothing here goes through the crate's
//! sparse builders or gate application paths.

#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = CMat::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = a[(i, j)] * b[(k, l)];
                }
            }
        }
    }
    out
}

pub fn identity(dim: usize) -> CMat {
    CMat::identity(dim, dim)
}

/// Embed a single-qubit operator at bit position `qubit` of an `n_qubits`
/// register where bit 0 is least significant.
pub fn op_on(n_qubits: usize, qubit: usize, m: &CMat) -> CMat {
    let low = identity(1 << qubit);
    let high = identity(1 << (n_qubits - 1 - qubit));
    kron(&high, &kron(m, &low))
}

/// Product of single-qubit operators at distinct positions.
pub fn ops_on(n_qubits: usize, placements: &[(usize, &CMat)]) -> CMat {
    let mut out = identity(1 << n_qubits);
    for &(qubit, m) in placements {
        out = op_on(n_qubits, qubit, m) * out;
    }
    out
}

// matter-site operators in the occupation basis (bit = n)
pub fn number_op() -> CMat {
    CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)])
}

/// `σ^+` raises the occupation 0 -> 1.
pub fn sigma_plus() -> CMat {
    CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
}

pub fn sigma_minus() -> CMat {
    sigma_plus().transpose()
}

pub fn sigma_z() -> CMat {
    CMat::from_row_slice(2, 2, &[c(-1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)])
}

// link operators in the tau^x eigenbasis (bit 0 <-> tau^x = +1)
pub fn tau_x() -> CMat {
    CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])
}

pub fn tau_z() -> CMat {
    CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
}

pub fn tau_y() -> CMat {
    CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(0.0, 0.0)])
}

/// `τ^± = (τ^x ± i τ^y)/2`, the ladder operators of `τ^z`.
pub fn tau_pm(sign: f64) -> CMat {
    (tau_x() + tau_y() * c(0.0, sign)) * c(0.5, 0.0)
}

/// `exp(-i H t)` by scaled-and-squared Taylor series.
pub fn expm_minus_i_ht(h: &CMat, t: f64) -> CMat {
    let n = h.nrows();
    let a = h.map(|x| x * c(0.0, -t));
    let norm: f64 = a.iter().map(|x| x.norm()).fold(0.0, f64::max) * n as f64;
    let s = if norm > 1.0 {
        norm.log2().ceil() as u32
    } else {
        0
    };
    let scaled = a.map(|x| x / 2f64.powi(s as i32));
    let mut sum = identity(n);
    let mut term = identity(n);
    for k in 1..=30 {
        term = (&term * &scaled).map(|x| x / k as f64);
        sum += &term;
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    (a - b).iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// Dense complex matrix of a sparse crate operator.
pub fn operator_to_cmat(op: &z2lpg::OperatorMatrix) -> CMat {
    let d = op.dim();
    let mut out = CMat::zeros(d, d);
    op.for_each_entry(|r, c_, v| {
        out[(r, c_)] += Complex64::new(v, 0.0);
    });
    out
}

/// Matrix of a gate sequence, built by applying the gates to basis vectors.
pub fn gates_to_matrix(gates: &[z2lpg::Gate], l: usize) -> CMat {
    let dim = 1usize << (2 * l);
    let mut out = CMat::zeros(dim, dim);
    for col in 0..dim {
        let mut state = z2lpg::StateVector::basis_state(dim, col);
        for gate in gates {
            z2lpg::apply_gate(&mut state, gate, l).unwrap();
        }
        for row in 0..dim {
            out[(row, col)] = state.amp[row];
        }
    }
    out
}
