//! Operator matrices and state vectors.
//!
//! Every operator of the model family is real in the chosen product basis
//! (the only off-diagonal pieces are hops and link flips with real weights),
//! so operators are stored as real sparse matrices with a fast diagonal
//! path. States carry complex amplitudes.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance used by [`OperatorMatrix::verify_hermitian`].
pub const HERMITICITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
enum Storage {
    Diagonal(Vec<f64>),
    Csr {
        row_ptr: Vec<usize>,
        cols: Vec<u32>,
        vals: Vec<f64>,
    },
}

/// Real matrix in the Hilbert-space basis, diagonal or general sparse.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    dim: usize,
    hermitian: bool,
    storage: Storage,
}

impl OperatorMatrix {
    pub fn from_diagonal(diag: Vec<f64>) -> Self {
        Self {
            dim: diag.len(),
            hermitian: true,
            storage: Storage::Diagonal(diag),
        }
    }

    /// Build from (row, col, value) triplets; duplicate entries are summed.
    pub fn from_triplets(dim: usize, mut triplets: Vec<(u32, u32, f64)>, hermitian: bool) -> Self {
        triplets.sort_unstable_by_key(|&(r, c, _)| ((r as u64) << 32) | c as u64);
        let mut rows: Vec<u32> = Vec::with_capacity(triplets.len());
        let mut cols: Vec<u32> = Vec::with_capacity(triplets.len());
        let mut vals: Vec<f64> = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            if rows.last() == Some(&r) && cols.last() == Some(&c) {
                *vals.last_mut().unwrap() += v;
            } else {
                rows.push(r);
                cols.push(c);
                vals.push(v);
            }
        }
        let mut row_ptr = vec![0usize; dim + 1];
        let mut out_cols = Vec::with_capacity(cols.len());
        let mut out_vals = Vec::with_capacity(vals.len());
        for i in 0..rows.len() {
            // drop exact zeros produced by cancellation
            if vals[i] != 0.0 {
                out_cols.push(cols[i]);
                out_vals.push(vals[i]);
                row_ptr[rows[i] as usize + 1] += 1;
            }
        }
        for r in 0..dim {
            row_ptr[r + 1] += row_ptr[r];
        }
        Self {
            dim,
            hermitian,
            storage: Storage::Csr {
                row_ptr,
                cols: out_cols,
                vals: out_vals,
            },
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_hermitian_flagged(&self) -> bool {
        self.hermitian
    }

    pub fn nnz(&self) -> usize {
        match &self.storage {
            Storage::Diagonal(d) => d.iter().filter(|v| **v != 0.0).count(),
            Storage::Csr { vals, .. } => vals.len(),
        }
    }

    pub fn diagonal(&self) -> Option<&[f64]> {
        match &self.storage {
            Storage::Diagonal(d) => Some(d),
            Storage::Csr { .. } => None,
        }
    }

    /// `dst = M src` for complex amplitudes.
    pub fn matvec(&self, src: &[Complex64], dst: &mut [Complex64]) {
        assert_eq!(src.len(), self.dim);
        assert_eq!(dst.len(), self.dim);
        match &self.storage {
            Storage::Diagonal(d) => {
                for i in 0..self.dim {
                    dst[i] = src[i] * d[i];
                }
            }
            Storage::Csr { row_ptr, cols, vals } => {
                for r in 0..self.dim {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for k in row_ptr[r]..row_ptr[r + 1] {
                        acc += src[cols[k] as usize] * vals[k];
                    }
                    dst[r] = acc;
                }
            }
        }
    }

    /// Real expectation value `<psi|M|psi>` (M is Hermitian in this crate).
    pub fn expectation(&self, psi: &StateVector) -> f64 {
        match &self.storage {
            Storage::Diagonal(d) => psi
                .amp
                .iter()
                .zip(d)
                .map(|(a, v)| a.norm_sqr() * v)
                .sum(),
            Storage::Csr { .. } => {
                let mut tmp = vec![Complex64::new(0.0, 0.0); self.dim];
                self.matvec(&psi.amp, &mut tmp);
                psi.amp
                    .iter()
                    .zip(&tmp)
                    .map(|(a, b)| (a.conj() * b).re)
                    .sum()
            }
        }
    }

    /// Linear combination `sum_k coeff_k * op_k`.
    pub fn linear_combination(terms: &[(f64, &OperatorMatrix)]) -> Result<Self> {
        let dim = terms
            .first()
            .map(|(_, op)| op.dim)
            .ok_or_else(|| Error::InvalidParams("empty linear combination".into()))?;
        for (_, op) in terms {
            if op.dim != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: op.dim,
                });
            }
        }
        if terms
            .iter()
            .all(|(_, op)| matches!(op.storage, Storage::Diagonal(_)))
        {
            let mut diag = vec![0.0; dim];
            for (c, op) in terms {
                if let Storage::Diagonal(d) = &op.storage {
                    for (out, v) in diag.iter_mut().zip(d) {
                        *out += c * v;
                    }
                }
            }
            return Ok(Self::from_diagonal(diag));
        }
        let mut triplets = Vec::new();
        for (c, op) in terms {
            if *c == 0.0 {
                continue;
            }
            match &op.storage {
                Storage::Diagonal(d) => {
                    for (i, v) in d.iter().enumerate() {
                        if *v != 0.0 {
                            triplets.push((i as u32, i as u32, c * v));
                        }
                    }
                }
                Storage::Csr { row_ptr, cols, vals } => {
                    for r in 0..op.dim {
                        for k in row_ptr[r]..row_ptr[r + 1] {
                            triplets.push((r as u32, cols[k], c * vals[k]));
                        }
                    }
                }
            }
        }
        let hermitian = terms.iter().all(|(_, op)| op.hermitian);
        Ok(Self::from_triplets(dim, triplets, hermitian))
    }

    /// `D M D` with a diagonal 0/1 mask, e.g. a sector projector sandwich.
    pub fn sandwich_mask(&self, mask: &[f64]) -> Result<Self> {
        if mask.len() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: mask.len(),
            });
        }
        match &self.storage {
            Storage::Diagonal(d) => Ok(Self::from_diagonal(
                d.iter()
                    .zip(mask)
                    .map(|(v, m)| v * m * m)
                    .collect(),
            )),
            Storage::Csr { row_ptr, cols, vals } => {
                let mut triplets = Vec::new();
                for r in 0..self.dim {
                    if mask[r] == 0.0 {
                        continue;
                    }
                    for k in row_ptr[r]..row_ptr[r + 1] {
                        let c = cols[k] as usize;
                        let v = vals[k] * mask[r] * mask[c];
                        if v != 0.0 {
                            triplets.push((r as u32, cols[k], v));
                        }
                    }
                }
                Ok(Self::from_triplets(self.dim, triplets, self.hermitian))
            }
        }
    }

    pub fn max_abs(&self) -> f64 {
        match &self.storage {
            Storage::Diagonal(d) => d.iter().fold(0.0f64, |m, v| m.max(v.abs())),
            Storage::Csr { vals, .. } => vals.iter().fold(0.0f64, |m, v| m.max(v.abs())),
        }
    }

    /// `max_{rc} |M_rc - M_cr|`; zero means real-symmetric, i.e. Hermitian.
    pub fn hermiticity_deviation(&self) -> f64 {
        match &self.storage {
            Storage::Diagonal(_) => 0.0,
            Storage::Csr { row_ptr, cols, vals } => {
                let mut entries = std::collections::HashMap::new();
                for r in 0..self.dim {
                    for k in row_ptr[r]..row_ptr[r + 1] {
                        entries.insert((r as u32, cols[k]), vals[k]);
                    }
                }
                let mut dev = 0.0f64;
                for (&(r, c), &v) in &entries {
                    let vt = entries.get(&(c, r)).copied().unwrap_or(0.0);
                    dev = dev.max((v - vt).abs());
                }
                dev
            }
        }
    }

    pub fn verify_hermitian(&self) -> Result<()> {
        let dev = self.hermiticity_deviation();
        if dev >= HERMITICITY_TOL {
            return Err(Error::NotHermitian { deviation: dev });
        }
        Ok(())
    }

    /// `max_{rc} |[M, D]_rc|` for diagonal `D`, computed entrywise as
    /// `|M_rc (d_c - d_r)|` without forming a product.
    pub fn commutator_with_diagonal_max(&self, diag: &[f64]) -> f64 {
        match &self.storage {
            Storage::Diagonal(_) => 0.0,
            Storage::Csr { row_ptr, cols, vals } => {
                let mut m = 0.0f64;
                for r in 0..self.dim {
                    for k in row_ptr[r]..row_ptr[r + 1] {
                        m = m.max((vals[k] * (diag[cols[k] as usize] - diag[r])).abs());
                    }
                }
                m
            }
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        match &self.storage {
            Storage::Diagonal(d) => {
                for (i, v) in d.iter().enumerate() {
                    m[(i, i)] = *v;
                }
            }
            Storage::Csr { row_ptr, cols, vals } => {
                for r in 0..self.dim {
                    for k in row_ptr[r]..row_ptr[r + 1] {
                        m[(r, cols[k] as usize)] += vals[k];
                    }
                }
            }
        }
        m
    }

    /// Visit nonzero entries as `(row, col, value)`.
    pub fn for_each_entry(&self, mut f: impl FnMut(usize, usize, f64)) {
        match &self.storage {
            Storage::Diagonal(d) => {
                for (i, v) in d.iter().enumerate() {
                    if *v != 0.0 {
                        f(i, i, *v);
                    }
                }
            }
            Storage::Csr { row_ptr, cols, vals } => {
                for r in 0..self.dim {
                    for k in row_ptr[r]..row_ptr[r + 1] {
                        f(r, cols[k] as usize, vals[k]);
                    }
                }
            }
        }
    }
}

/// Complex amplitude vector over the Hilbert-space basis.
#[derive(Debug, Clone)]
pub struct StateVector {
    pub amp: Vec<Complex64>,
}

impl StateVector {
    pub fn zeros(dim: usize) -> Self {
        Self {
            amp: vec![Complex64::new(0.0, 0.0); dim],
        }
    }

    /// Unit vector on basis state `index`.
    pub fn basis_state(dim: usize, index: usize) -> Self {
        let mut s = Self::zeros(dim);
        s.amp[index] = Complex64::new(1.0, 0.0);
        s
    }

    pub fn dim(&self) -> usize {
        self.amp.len()
    }

    pub fn norm(&self) -> f64 {
        self.amp.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amp
            .iter()
            .zip(&other.amp)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn max_amp_diff(&self, other: &StateVector) -> f64 {
        self.amp
            .iter()
            .zip(&other.amp)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}
