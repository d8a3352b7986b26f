//! Hamiltonian pieces, gauge generators, pseudogenerators, projectors and
//! gauge-invariant product states for the Z2 chain.
//!
//! Conventions: the gauge connection is `τ^z` (it flips the stored link
//! value), the electric field `τ^x` is diagonal. On a link stored as bit `b`
//! with `t = 1-2b`:
//!
//! * `τ^x |b> = t |b>`
//! * `τ^z |b> = |1-b>`
//! * `τ^± |b> = (t/2) |b> ± (t/2) |1-b>`  (raising/lowering of `τ^z`)
//!
//! With this reading every term of the analog error flips exactly two
//! adjacent gauge constraints, and all operators built here are real
//! symmetric matrices in the product basis.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{Boundary, HilbertSpace};
use crate::ops::{OperatorMatrix, StateVector};
use crate::sequences::CoeffSequence;

/// Floquet-derived error weights used throughout: `(α1, α2, α3, α4)`.
pub const DEFAULT_ALPHAS: [f64; 4] = [0.5110, -0.4953, 0.7696, 0.2147];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorModel {
    /// Gauge-assisted error terms of the driven cold-atom implementation.
    Analog,
    /// Phase flips and unassisted tunneling typical of circuit hardware.
    Circuit,
}

/// Couplings in units of the hopping `J`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub j: f64,
    pub h: f64,
    pub lambda: f64,
    pub v: f64,
    pub alphas: [f64; 4],
    pub error_model: ErrorModel,
}

impl ModelParams {
    pub fn analog(j: f64, h: f64, lambda: f64, v: f64) -> Self {
        Self {
            j,
            h,
            lambda,
            v,
            alphas: DEFAULT_ALPHAS,
            error_model: ErrorModel::Analog,
        }
    }

    pub fn circuit(j: f64, h: f64, lambda: f64, v: f64) -> Self {
        Self {
            j,
            h,
            lambda,
            v,
            alphas: DEFAULT_ALPHAS,
            error_model: ErrorModel::Circuit,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.j > 0.0) {
            return Err(Error::InvalidParams(format!(
                "hopping J must be positive, got {}",
                self.j
            )));
        }
        if self.error_model == ErrorModel::Analog {
            let sum: f64 = self.alphas.iter().sum();
            if (sum - 1.0).abs() > 1e-3 {
                return Err(Error::InvalidParams(format!(
                    "analog error weights must sum to 1 within 1e-3, got {sum}"
                )));
            }
        }
        Ok(())
    }
}

fn check_site(space: &HilbertSpace, site: usize) -> Result<()> {
    if site >= space.n_sites() {
        return Err(Error::IndexOutOfRange {
            index: site,
            l: space.n_sites(),
        });
    }
    Ok(())
}

fn check_sector(space: &HilbertSpace, target_sector: &[i8]) -> Result<()> {
    if target_sector.len() != space.n_sites() {
        return Err(Error::DimensionMismatch {
            left: target_sector.len(),
            right: space.n_sites(),
        });
    }
    if target_sector.iter().any(|&g| g != 1 && g != -1) {
        return Err(Error::InvalidParams(
            "target sector entries must be +1 or -1".into(),
        ));
    }
    Ok(())
}

/// `H_0 = -J sum_bonds (a^dag τ^z a + h.c.) - h sum_links τ^x`.
///
/// The hopping runs over all `L` bonds (wrapping) for periodic boundaries and
/// over `L-1` bonds for open ones; the field acts on all `L` links.
pub fn build_ideal_hamiltonian(space: &HilbertSpace, j: f64, h: f64) -> OperatorMatrix {
    let l = space.n_sites();
    let bonds = space.spec.bonds();
    let mut triplets = Vec::new();
    for (i, &code) in space.codes().iter().enumerate() {
        let mut diag = 0.0;
        for link in 0..l {
            diag -= h * space.link_value(code, link) as f64;
        }
        if diag != 0.0 {
            triplets.push((i as u32, i as u32, diag));
        }
        for &(a, b, link) in &bonds {
            if space.occupation(code, a) == 0 && space.occupation(code, b) == 1 {
                let moved = space.flip_occupation(space.flip_occupation(code, a), b);
                let hopped = space.flip_link(moved, link);
                if let Some(f) = space.index_of(hopped) {
                    triplets.push((f as u32, i as u32, -j));
                    triplets.push((i as u32, f as u32, -j));
                }
            }
        }
    }
    OperatorMatrix::from_triplets(space.dim(), triplets, true)
}

/// Diagonal of the gauge generator `G_j` over the basis.
pub fn build_gauge_generator(space: &HilbertSpace, site: usize) -> Result<OperatorMatrix> {
    check_site(space, site)?;
    Ok(OperatorMatrix::from_diagonal(
        space
            .codes()
            .iter()
            .map(|&c| space.gauge_eigenvalue(c, site) as f64)
            .collect(),
    ))
}

/// Diagonal of the local pseudogenerator `W_j` for target eigenvalue `g_tar`.
pub fn build_lpg(space: &HilbertSpace, site: usize, g_tar: i8) -> Result<OperatorMatrix> {
    check_site(space, site)?;
    if g_tar != 1 && g_tar != -1 {
        return Err(Error::InvalidParams("g_tar must be +1 or -1".into()));
    }
    Ok(OperatorMatrix::from_diagonal(
        space
            .codes()
            .iter()
            .map(|&c| space.lpg_eigenvalue(c, site, g_tar) as f64)
            .collect(),
    ))
}

/// Protection term `V sum_j c_j (W_j - g_j^tar)`, diagonal, zero on the
/// target sector. The returned operator includes the factor `V`.
pub fn build_protection(
    space: &HilbertSpace,
    seq: &CoeffSequence,
    v: f64,
    target_sector: &[i8],
) -> Result<OperatorMatrix> {
    check_sector(space, target_sector)?;
    let l = space.n_sites();
    let coeffs = seq.extended_f64(l);
    Ok(OperatorMatrix::from_diagonal(
        space
            .codes()
            .iter()
            .map(|&code| {
                let mut acc = 0.0;
                for site in 0..l {
                    let g = target_sector[site];
                    let w = space.lpg_eigenvalue(code, site, g);
                    acc += coeffs[site] * (w - g) as f64;
                }
                v * acc
            })
            .collect(),
    ))
}

/// Analog error term (unit strength): gauge-assisted hops through `τ^±` plus
/// an occupation-weighted link flip. The bond range matches the hopping of
/// the ideal Hamiltonian.
pub fn build_analog_error(space: &HilbertSpace, alphas: [f64; 4]) -> OperatorMatrix {
    let [a1, a2, a3, a4] = alphas;
    let bonds = space.spec.bonds();
    let mut triplets = Vec::new();
    for (i, &code) in space.codes().iter().enumerate() {
        for &(a, b, link) in &bonds {
            let na = space.occupation(code, a);
            let nb = space.occupation(code, b);
            // (α3 n_a - α4 n_b) τ^z: flips the link, occupations unchanged
            let w = a3 * na as f64 - a4 * nb as f64;
            if w != 0.0 {
                if let Some(f) = space.index_of(space.flip_link(code, link)) {
                    triplets.push((f as u32, i as u32, w));
                }
            }
            // α1 a^dag τ^+ a + α2 a^dag τ^- a + h.c.
            if na == 0 && nb == 1 {
                let t = space.link_value(code, link) as f64;
                let moved = space.flip_occupation(space.flip_occupation(code, a), b);
                if let Some(f) = space.index_of(moved) {
                    let w = (a1 + a2) * t / 2.0;
                    triplets.push((f as u32, i as u32, w));
                    triplets.push((i as u32, f as u32, w));
                }
                if let Some(f) = space.index_of(space.flip_link(moved, link)) {
                    let w = (a1 - a2) * t / 2.0;
                    triplets.push((f as u32, i as u32, w));
                    triplets.push((i as u32, f as u32, w));
                }
            }
        }
    }
    OperatorMatrix::from_triplets(space.dim(), triplets, true)
}

/// Circuit error term (unit strength): `τ^z` phase flips on every link plus
/// unassisted matter tunneling on every bond. Open boundaries only; every
/// matrix element changes the gauge sector.
pub fn build_circuit_error(space: &HilbertSpace) -> Result<OperatorMatrix> {
    if space.spec.boundary != Boundary::Open {
        return Err(Error::PeriodicUnsupported);
    }
    let l = space.n_sites();
    let mut triplets = Vec::new();
    for (i, &code) in space.codes().iter().enumerate() {
        for link in 0..l {
            if let Some(f) = space.index_of(space.flip_link(code, link)) {
                triplets.push((f as u32, i as u32, 1.0));
            }
        }
        for bond in 0..l - 1 {
            let (a, b) = (bond, bond + 1);
            if space.occupation(code, a) == 0 && space.occupation(code, b) == 1 {
                let moved = space.flip_occupation(space.flip_occupation(code, a), b);
                if let Some(f) = space.index_of(moved) {
                    triplets.push((f as u32, i as u32, 1.0));
                    triplets.push((i as u32, f as u32, 1.0));
                }
            }
        }
    }
    Ok(OperatorMatrix::from_triplets(space.dim(), triplets, true))
}

/// Diagonal 0/1 projector onto the target gauge sector.
pub fn build_target_projector(
    space: &HilbertSpace,
    target_sector: &[i8],
) -> Result<OperatorMatrix> {
    check_sector(space, target_sector)?;
    let l = space.n_sites();
    Ok(OperatorMatrix::from_diagonal(
        space
            .codes()
            .iter()
            .map(|&code| {
                let inside =
                    (0..l).all(|site| space.gauge_eigenvalue(code, site) == target_sector[site]);
                if inside {
                    1.0
                } else {
                    0.0
                }
            })
            .collect(),
    ))
}

/// Adjusted theory `H_adj = H_0 + λ P_0 H_1 P_0`.
pub fn build_adjusted_hamiltonian(
    h0: &OperatorMatrix,
    h1: &OperatorMatrix,
    p0: &OperatorMatrix,
    lambda: f64,
) -> Result<OperatorMatrix> {
    if h0.dim() != h1.dim() || h0.dim() != p0.dim() {
        return Err(Error::DimensionMismatch {
            left: h0.dim(),
            right: h1.dim().max(p0.dim()),
        });
    }
    let mask = p0
        .diagonal()
        .ok_or_else(|| Error::InvalidParams("projector must be diagonal".into()))?;
    let sandwiched = h1.sandwich_mask(mask)?;
    OperatorMatrix::linear_combination(&[(1.0, h0), (lambda, &sandwiched)])
}

/// Error term selected by the model parameters, at unit strength.
pub fn build_error_term(space: &HilbertSpace, params: &ModelParams) -> Result<OperatorMatrix> {
    match params.error_model {
        ErrorModel::Analog => Ok(build_analog_error(space, params.alphas)),
        ErrorModel::Circuit => build_circuit_error(space),
    }
}

/// Faulty theory `H = H_0 + λ H_1 + V H_W`.
pub fn build_faulty_hamiltonian(
    space: &HilbertSpace,
    params: &ModelParams,
    seq: &CoeffSequence,
) -> Result<OperatorMatrix> {
    params.validate()?;
    let h0 = build_ideal_hamiltonian(space, params.j, params.h);
    let h1 = build_error_term(space, params)?;
    let hw = build_protection(space, seq, params.v, &space.spec.target_sector)?;
    OperatorMatrix::linear_combination(&[(1.0, &h0), (params.lambda, &h1), (1.0, &hw)])
}

/// Adjusted theory assembled from the space and parameters.
pub fn build_adjusted_from_params(
    space: &HilbertSpace,
    params: &ModelParams,
) -> Result<OperatorMatrix> {
    params.validate()?;
    let h0 = build_ideal_hamiltonian(space, params.j, params.h);
    let h1 = build_error_term(space, params)?;
    let p0 = build_target_projector(space, &space.spec.target_sector)?;
    build_adjusted_hamiltonian(&h0, &h1, &p0, params.lambda)
}

/// Named gauge-invariant product states.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialPattern {
    /// `1,0,1,0,...` occupations.
    Staggered,
    /// `1,1,0,0,...` occupations (charge density wave).
    Cdw,
    /// Occupied left half, empty right half.
    DomainWall,
    /// Explicit occupations and link values (`±1`), verified against the
    /// target sector.
    Explicit {
        occupations: Vec<u8>,
        links: Vec<i8>,
    },
}

impl InitialPattern {
    fn occupations(&self, l: usize) -> Result<Vec<u8>> {
        match self {
            InitialPattern::Staggered => {
                if l % 2 != 0 {
                    return Err(Error::InvalidParams(
                        "staggered pattern needs an even number of sites".into(),
                    ));
                }
                Ok((0..l).map(|j| (j % 2 == 0) as u8).collect())
            }
            InitialPattern::Cdw => {
                if l % 4 != 0 {
                    return Err(Error::InvalidParams(
                        "cdw pattern needs a multiple of four sites".into(),
                    ));
                }
                Ok((0..l).map(|j| (j % 4 < 2) as u8).collect())
            }
            InitialPattern::DomainWall => {
                if l % 2 != 0 {
                    return Err(Error::InvalidParams(
                        "domain-wall pattern needs an even number of sites".into(),
                    ));
                }
                Ok((0..l).map(|j| (j < l / 2) as u8).collect())
            }
            InitialPattern::Explicit { occupations, .. } => {
                if occupations.len() != l {
                    return Err(Error::InvalidParams(format!(
                        "pattern has {} occupations for {} sites",
                        occupations.len(),
                        l
                    )));
                }
                if occupations.iter().any(|&n| n > 1) {
                    return Err(Error::InvalidParams("occupations must be 0 or 1".into()));
                }
                Ok(occupations.clone())
            }
        }
    }
}

/// Link values forced by the target sector for given occupations. For open
/// boundaries the chain is determined from the frozen left link; for periodic
/// boundaries the first link is seeded to `+1` (a global flip changes
/// nothing: the closure constraint is seed-independent).
fn links_from_sector(occupations: &[u8], target: &[i8], boundary: Boundary) -> Result<Vec<i8>> {
    let l = occupations.len();
    let mut t = vec![0i8; l];
    match boundary {
        Boundary::Open => {
            let mut left = 1i8;
            for j in 0..l {
                let parity = 1 - 2 * occupations[j] as i8;
                t[j] = target[j] * parity * left;
                left = t[j];
            }
        }
        Boundary::Periodic => {
            t[0] = 1;
            for j in 1..l {
                let parity = 1 - 2 * occupations[j] as i8;
                t[j] = target[j] * parity * t[j - 1];
            }
            let parity0 = 1 - 2 * occupations[0] as i8;
            if parity0 * t[l - 1] * t[0] != target[0] {
                return Err(Error::NotInTargetSector { violated: vec![0] });
            }
        }
    }
    Ok(t)
}

/// Occupations and link values of a pattern, verified to lie in the target
/// sector; rejects patterns outside it with the violated constraint sites.
pub fn pattern_bits(
    spec: &crate::hilbert::LatticeSpec,
    pattern: &InitialPattern,
) -> Result<(Vec<u8>, Vec<i8>)> {
    let l = spec.n_matter;
    let occupations = pattern.occupations(l)?;
    let links = match pattern {
        InitialPattern::Explicit { links, .. } => {
            if links.len() != l {
                return Err(Error::InvalidParams(format!(
                    "pattern has {} links for {} links",
                    links.len(),
                    l
                )));
            }
            if links.iter().any(|&t| t != 1 && t != -1) {
                return Err(Error::InvalidParams("link values must be +1 or -1".into()));
            }
            links.clone()
        }
        _ => links_from_sector(&occupations, &spec.target_sector, spec.boundary)?,
    };
    let violated: Vec<usize> = (0..l)
        .filter(|&site| spec.gauge_sign(&occupations, &links, site) != spec.target_sector[site])
        .collect();
    if !violated.is_empty() {
        return Err(Error::NotInTargetSector { violated });
    }
    Ok((occupations, links))
}

/// Gauge-invariant product state; rejects patterns outside the target sector
/// with the list of violated constraints.
pub fn build_initial_state(space: &HilbertSpace, pattern: &InitialPattern) -> Result<StateVector> {
    let l = space.n_sites();
    let (occupations, links) = pattern_bits(&space.spec, pattern)?;
    let mut code = 0u32;
    for (j, &n) in occupations.iter().enumerate() {
        code |= (n as u32) << j;
    }
    for (j, &t) in links.iter().enumerate() {
        if t == -1 {
            code |= 1 << (l + j);
        }
    }
    let index = space.index_of(code).ok_or_else(|| {
        Error::InvalidParams(
            "pattern particle number does not match the space's sector restriction".into(),
        )
    })?;
    Ok(StateVector::basis_state(space.dim(), index))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::LatticeSpec;
    use crate::sequences::{make_sequence, SequencePreset};

    fn space_l4_pbc() -> HilbertSpace {
        HilbertSpace::build(LatticeSpec::new(4, Boundary::Periodic), None).unwrap()
    }

    #[test]
    fn ideal_hamiltonian_commutes_with_generators() {
        for boundary in [Boundary::Periodic, Boundary::Open] {
            for l in [2usize, 4, 6, 8] {
                let space = HilbertSpace::build(LatticeSpec::new(l, boundary), None).unwrap();
                let h0 = build_ideal_hamiltonian(&space, 1.0, 0.3);
                h0.verify_hermitian().unwrap();
                for site in 0..l {
                    let g = build_gauge_generator(&space, site).unwrap();
                    let comm = h0.commutator_with_diagonal_max(g.diagonal().unwrap());
                    assert!(comm < 1e-12, "L={l} {boundary:?} site {site}: {comm}");
                }
            }
        }
    }

    #[test]
    fn ideal_hamiltonian_l2_open_hand_enumeration() {
        // one bond, J=1, h=0: the only nonzero elements are the 8 entries of
        // the 4 hop pairs (1,0,b0,b1) <-> (0,1,1-b0,b1), all equal -1
        let space = HilbertSpace::build(LatticeSpec::new(2, Boundary::Open), None).unwrap();
        let h0 = build_ideal_hamiltonian(&space, 1.0, 0.0);
        assert_eq!(h0.nnz(), 8);
        let mut count = 0;
        h0.for_each_entry(|_, _, v| {
            assert!((v.abs() - 1.0).abs() < 1e-15);
            count += 1;
        });
        assert_eq!(count, 8);
    }

    #[test]
    fn hopping_is_purely_off_diagonal() {
        let space = space_l4_pbc();
        let h0 = build_ideal_hamiltonian(&space, 1.0, 0.0);
        for i in 0..space.dim() {
            let psi = StateVector::basis_state(space.dim(), i);
            assert_eq!(h0.expectation(&psi), 0.0);
        }
    }

    #[test]
    fn gauge_generator_squares_to_identity() {
        let space = space_l4_pbc();
        for site in 0..4 {
            let g = build_gauge_generator(&space, site).unwrap();
            for v in g.diagonal().unwrap() {
                assert_eq!(v * v, 1.0);
            }
        }
        assert!(build_gauge_generator(&space, 4).is_err());
    }

    #[test]
    fn lpg_defining_relation_full_enumeration() {
        for boundary in [Boundary::Periodic, Boundary::Open] {
            let space = HilbertSpace::build(LatticeSpec::new(4, boundary), None).unwrap();
            for g_tar in [1i8, -1] {
                for site in 0..4 {
                    for &code in space.codes() {
                        let w = space.lpg_eigenvalue(code, site, g_tar);
                        let g = space.gauge_eigenvalue(code, site);
                        assert_eq!(w == g_tar, g == g_tar, "code {code} site {site}");
                        let dev = w - g_tar;
                        assert!(dev == -2 || dev == 0 || dev == 2);
                    }
                }
            }
        }
    }

    #[test]
    fn lpg_local_configuration_table() {
        // g_tar=+1: (n=1, pair=-1) -> w = +1 with G = +1; (n=0, pair=-1) -> w = G = -1
        let space = HilbertSpace::build(LatticeSpec::new(2, Boundary::Periodic), None).unwrap();
        // site 0 under PBC sees links 1 (left) and 0 (right)
        let code_pair_minus = space.flip_link(0, 0); // t0=-1, t1=+1: pair product -1
        let with_particle = space.flip_occupation(code_pair_minus, 0);
        assert_eq!(space.lpg_eigenvalue(with_particle, 0, 1), 1);
        assert_eq!(space.gauge_eigenvalue(with_particle, 0), 1);
        assert_eq!(space.lpg_eigenvalue(code_pair_minus, 0, 1), -1);
        assert_eq!(space.gauge_eigenvalue(code_pair_minus, 0), -1);
    }

    #[test]
    fn protection_annihilates_target_sector_and_scores_deviations() {
        let space = space_l4_pbc();
        let seq = make_sequence(SequencePreset::Seventeenths).unwrap();
        let v = 3.0;
        let hw = build_protection(&space, &seq, v, &space.spec.target_sector).unwrap();
        let diag = hw.diagonal().unwrap();
        let staggered = build_initial_state(&space, &InitialPattern::Staggered).unwrap();
        let idx = staggered
            .amp
            .iter()
            .position(|a| a.norm() > 0.5)
            .unwrap();
        assert_eq!(diag[idx], 0.0);
        // flipping the occupation of site k deviates only W_k, by +2
        for k in 0..4 {
            let code = space.flip_occupation(space.code(idx), k);
            let j = space.index_of(code).unwrap();
            let c = seq.extended_f64(4)[k];
            let expected = if space.occupation(space.code(idx), k) == 0 {
                2.0 * c * v
            } else {
                -2.0 * c * v
            };
            assert!((diag[j] - expected).abs() < 1e-12, "site {k}");
        }
    }

    #[test]
    fn analog_error_breaks_gauge_symmetry_but_conserves_particles() {
        let space = space_l4_pbc();
        let h1 = build_analog_error(&space, DEFAULT_ALPHAS);
        h1.verify_hermitian().unwrap();
        let mut max_comm = 0.0f64;
        for site in 0..4 {
            let g = build_gauge_generator(&space, site).unwrap();
            max_comm = max_comm.max(h1.commutator_with_diagonal_max(g.diagonal().unwrap()));
        }
        assert!(max_comm > 0.1);
        // particle number is diagonal: commutator trick again
        let n_total: Vec<f64> = space
            .codes()
            .iter()
            .map(|&c| (0..4).map(|j| space.occupation(c, j) as f64).sum())
            .collect();
        assert!(h1.commutator_with_diagonal_max(&n_total) < 1e-14);
    }

    #[test]
    fn analog_diagonal_term_flips_two_adjacent_constraints() {
        let space = space_l4_pbc();
        let staggered = build_initial_state(&space, &InitialPattern::Staggered).unwrap();
        let idx = staggered.amp.iter().position(|a| a.norm() > 0.5).unwrap();
        let code = space.code(idx);
        for link in 0..4 {
            let flipped = space.flip_link(code, link);
            let before: Vec<i8> = (0..4).map(|s| space.gauge_eigenvalue(code, s)).collect();
            let after: Vec<i8> = (0..4).map(|s| space.gauge_eigenvalue(flipped, s)).collect();
            let changed: Vec<usize> = (0..4).filter(|&s| before[s] != after[s]).collect();
            let mut expected = vec![link, (link + 1) % 4];
            expected.sort_unstable();
            assert_eq!(changed, expected);
        }
    }

    #[test]
    fn circuit_error_has_no_target_sector_matrix_elements() {
        for l in [4usize, 6] {
            let space = HilbertSpace::build(LatticeSpec::new(l, Boundary::Open), None).unwrap();
            let h1 = build_circuit_error(&space).unwrap();
            h1.verify_hermitian().unwrap();
            let p0 = build_target_projector(&space, &space.spec.target_sector).unwrap();
            let sandwiched = h1.sandwich_mask(p0.diagonal().unwrap()).unwrap();
            assert_eq!(sandwiched.max_abs(), 0.0, "L={l}");
        }
        let pbc = space_l4_pbc();
        assert!(build_circuit_error(&pbc).is_err());
    }

    #[test]
    fn projector_traces_match_enumeration() {
        let space = space_l4_pbc();
        let p0 = build_target_projector(&space, &space.spec.target_sector).unwrap();
        let trace: f64 = p0.diagonal().unwrap().iter().sum();
        assert_eq!(trace, 16.0);
        for v in p0.diagonal().unwrap() {
            assert!(*v == 0.0 || *v == 1.0);
            assert_eq!(v * v, *v); // idempotent
        }
        // P0 G_j = P0 for g_j^tar = +1
        for site in 0..4 {
            let g = build_gauge_generator(&space, site).unwrap();
            for (p, gv) in p0
                .diagonal()
                .unwrap()
                .iter()
                .zip(g.diagonal().unwrap())
            {
                assert_eq!(p * gv, *p);
            }
        }
    }

    #[test]
    fn adjusted_theory_reduces_correctly() {
        let space = HilbertSpace::build(LatticeSpec::new(4, Boundary::Open), None).unwrap();
        let h0 = build_ideal_hamiltonian(&space, 1.0, 0.3);
        let p0 = build_target_projector(&space, &space.spec.target_sector).unwrap();

        // circuit error: H_adj = H_0 exactly
        let h1c = build_circuit_error(&space).unwrap();
        let adj = build_adjusted_hamiltonian(&h0, &h1c, &p0, 0.1).unwrap();
        let diff = OperatorMatrix::linear_combination(&[(1.0, &adj), (-1.0, &h0)]).unwrap();
        assert_eq!(diff.max_abs(), 0.0);

        // analog error: H_adj differs from H_0 at lambda > 0
        let h1a = build_analog_error(&space, DEFAULT_ALPHAS);
        let adj = build_adjusted_hamiltonian(&h0, &h1a, &p0, 1.0).unwrap();
        let diff = OperatorMatrix::linear_combination(&[(1.0, &adj), (-1.0, &h0)]).unwrap();
        assert!(diff.max_abs() > 1e-3);
        for site in 0..4 {
            let g = build_gauge_generator(&space, site).unwrap();
            assert!(adj.commutator_with_diagonal_max(g.diagonal().unwrap()) < 1e-12);
        }

        // lambda = 0: H_adj = H_0
        let adj = build_adjusted_hamiltonian(&h0, &h1a, &p0, 0.0).unwrap();
        let diff = OperatorMatrix::linear_combination(&[(1.0, &adj), (-1.0, &h0)]).unwrap();
        assert_eq!(diff.max_abs(), 0.0);
    }

    #[test]
    fn named_initial_states_match_reference_patterns() {
        // staggered, L=4 periodic: (1,0,1,0) with links (+,+,-,-)
        let space = space_l4_pbc();
        let psi = build_initial_state(&space, &InitialPattern::Staggered).unwrap();
        let idx = psi.amp.iter().position(|a| a.norm() > 0.5).unwrap();
        let code = space.code(idx);
        let occ: Vec<u32> = (0..4).map(|j| space.occupation(code, j)).collect();
        let links: Vec<i8> = (0..4).map(|j| space.link_value(code, j)).collect();
        assert_eq!(occ, vec![1, 0, 1, 0]);
        assert_eq!(links, vec![1, 1, -1, -1]);

        // cdw, L=4 periodic: (1,1,0,0) with links (+,-,-,-)
        let psi = build_initial_state(&space, &InitialPattern::Cdw).unwrap();
        let code = space.code(psi.amp.iter().position(|a| a.norm() > 0.5).unwrap());
        let occ: Vec<u32> = (0..4).map(|j| space.occupation(code, j)).collect();
        let links: Vec<i8> = (0..4).map(|j| space.link_value(code, j)).collect();
        assert_eq!(occ, vec![1, 1, 0, 0]);
        assert_eq!(links, vec![1, -1, -1, -1]);

        // domain wall, L=6 open: (1,1,1,0,0,0) with links (-,+,-,-,-,-)
        let space6 = HilbertSpace::build(LatticeSpec::new(6, Boundary::Open), None).unwrap();
        let psi = build_initial_state(&space6, &InitialPattern::DomainWall).unwrap();
        let code = space6.code(psi.amp.iter().position(|a| a.norm() > 0.5).unwrap());
        let occ: Vec<u32> = (0..6).map(|j| space6.occupation(code, j)).collect();
        let links: Vec<i8> = (0..6).map(|j| space6.link_value(code, j)).collect();
        assert_eq!(occ, vec![1, 1, 1, 0, 0, 0]);
        assert_eq!(links, vec![-1, 1, -1, -1, -1, -1]);

        // circuit staggered, L=6 open: links (-,-,+,+,-,-)
        let psi = build_initial_state(&space6, &InitialPattern::Staggered).unwrap();
        let code = space6.code(psi.amp.iter().position(|a| a.norm() > 0.5).unwrap());
        let links: Vec<i8> = (0..6).map(|j| space6.link_value(code, j)).collect();
        assert_eq!(links, vec![-1, -1, 1, 1, -1, -1]);

        // all named states lie in the target sector
        for (space, pattern) in [
            (&space, &InitialPattern::Staggered),
            (&space, &InitialPattern::Cdw),
            (&space6, &InitialPattern::DomainWall),
        ] {
            let psi = build_initial_state(space, pattern).unwrap();
            let code = space.code(psi.amp.iter().position(|a| a.norm() > 0.5).unwrap());
            for site in 0..space.n_sites() {
                assert_eq!(space.gauge_eigenvalue(code, site), 1);
            }
        }
    }

    #[test]
    fn explicit_pattern_outside_sector_reports_violations() {
        let space = space_l4_pbc();
        let err = build_initial_state(
            &space,
            &InitialPattern::Explicit {
                occupations: vec![1, 0, 1, 0],
                links: vec![1, 1, 1, -1], // link 2 flipped from the staggered state
            },
        )
        .unwrap_err();
        match err {
            Error::NotInTargetSector { violated } => assert_eq!(violated, vec![2, 3]),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn staggered_under_pbc_requires_even_particle_number() {
        // L=6 staggered has 3 particles; PBC closure is impossible
        let space = HilbertSpace::build(LatticeSpec::new(6, Boundary::Periodic), None).unwrap();
        let err = build_initial_state(&space, &InitialPattern::Staggered).unwrap_err();
        assert!(matches!(err, Error::NotInTargetSector { .. }));
    }

    #[test]
    fn params_validation() {
        assert!(ModelParams::analog(1.0, 0.3, 1.0, 16.0).validate().is_ok());
        assert!(ModelParams::analog(0.0, 0.3, 1.0, 16.0).validate().is_err());
        let mut p = ModelParams::analog(1.0, 0.3, 1.0, 16.0);
        p.alphas = [0.5, 0.5, 0.5, 0.5];
        assert!(p.validate().is_err());
        p.error_model = ErrorModel::Circuit;
        assert!(p.validate().is_ok());
    }
}
