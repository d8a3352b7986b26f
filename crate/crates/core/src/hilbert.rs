//! Lattice geometry and the product-basis Hilbert space.
//!
//! The chain has `L` matter sites (hard-core boson occupation `n_j ∈ {0,1}`)
//! and `L` gauge links carrying an electric field `τ^x = ±1`. Link `j` is the
//! link to the *right* of matter site `j`: under periodic boundaries it joins
//! sites `j` and `(j+1) mod L`, under open boundaries link `L-1` dangles at
//! the right end and the constraint at site 0 uses a fictitious left link
//! frozen to `+1`.
//!
//! Basis states are encoded as `code = matter_bits | (link_bits << L)`, where
//! matter bit `j` is `n_j` and link bit `j` is `0` for `τ^x = +1`, `1` for
//! `τ^x = -1`. The basis is ordered by ascending code; with a particle-number
//! restriction the same ordering applies to the surviving codes. In this basis
//! the gauge generators, the pseudogenerators, the protection term, the field
//! term, and the target-sector projector are all diagonal.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the Hilbert-space dimension.
pub const DEFAULT_DIM_CAP: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Periodic,
    Open,
}

/// Lattice geometry, boundary condition and target gauge sector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeSpec {
    /// Number of matter sites `L` (the chain also carries `L` links).
    pub n_matter: usize,
    pub boundary: Boundary,
    /// Target eigenvalue `g_j^tar ∈ {-1,+1}` of each gauge generator.
    pub target_sector: Vec<i8>,
}

impl LatticeSpec {
    /// Spec with the uniform `g_j^tar = +1` sector used throughout.
    pub fn new(n_matter: usize, boundary: Boundary) -> Self {
        Self {
            n_matter,
            boundary,
            target_sector: vec![1; n_matter],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_matter < 2 {
            return Err(Error::InvalidParams(format!(
                "need at least 2 matter sites, got {}",
                self.n_matter
            )));
        }
        if self.target_sector.len() != self.n_matter {
            return Err(Error::InvalidParams(format!(
                "target sector has {} entries for {} sites",
                self.target_sector.len(),
                self.n_matter
            )));
        }
        if self.target_sector.iter().any(|&g| g != 1 && g != -1) {
            return Err(Error::InvalidParams(
                "target sector entries must be +1 or -1".into(),
            ));
        }
        Ok(())
    }

    /// Bond list: pairs of matter sites coupled through a link, as
    /// `(site, site+1 mod L, link)`. Periodic chains wrap; open chains have
    /// `L-1` bonds and the last link dangles.
    pub fn bonds(&self) -> Vec<(usize, usize, usize)> {
        let l = self.n_matter;
        match self.boundary {
            Boundary::Periodic => (0..l).map(|j| (j, (j + 1) % l, j)).collect(),
            Boundary::Open => (0..l - 1).map(|j| (j, j + 1, j)).collect(),
        }
    }

    /// Gauge-generator eigenvalue of a product configuration given as
    /// occupation and link-value lists.
    pub fn gauge_sign(&self, occupations: &[u8], links: &[i8], site: usize) -> i8 {
        let l = self.n_matter;
        let parity = 1 - 2 * occupations[site] as i8;
        let left = match self.boundary {
            Boundary::Periodic => links[(site + l - 1) % l],
            Boundary::Open => {
                if site == 0 {
                    1
                } else {
                    links[site - 1]
                }
            }
        };
        parity * left * links[site]
    }
}

/// Enumerated product basis, optionally restricted to a particle-number sector.
#[derive(Debug, Clone)]
pub struct HilbertSpace {
    pub spec: LatticeSpec,
    /// Particle-number restriction, if any.
    pub sector: Option<usize>,
    /// Basis codes in ascending order.
    codes: Vec<u32>,
}

impl HilbertSpace {
    pub fn build(spec: LatticeSpec, sector: Option<usize>) -> Result<Self> {
        Self::build_with_cap(spec, sector, DEFAULT_DIM_CAP)
    }

    pub fn build_with_cap(spec: LatticeSpec, sector: Option<usize>, cap: usize) -> Result<Self> {
        spec.validate()?;
        let l = spec.n_matter;
        if let Some(n) = sector {
            if n > l {
                return Err(Error::InvalidParams(format!(
                    "particle number {n} exceeds {l} sites"
                )));
            }
        }
        let dim = match sector {
            None => (1usize << l) << l,
            Some(n) => binomial(l, n) << l,
        };
        if dim > cap {
            return Err(Error::Capacity {
                what: "hilbert dimension",
                got: dim,
                cap,
            });
        }
        let mut codes = Vec::with_capacity(dim);
        match sector {
            None => {
                for code in 0..(1u64 << (2 * l)) {
                    codes.push(code as u32);
                }
            }
            Some(n) => {
                // Ascending code order = link bits major, matter bits minor.
                for link in 0..(1u32 << l) {
                    for matter in 0..(1u32 << l) {
                        if matter.count_ones() as usize == n {
                            codes.push(matter | (link << l));
                        }
                    }
                }
                codes.sort_unstable();
            }
        }
        Ok(Self { spec, sector, codes })
    }

    pub fn dim(&self) -> usize {
        self.codes.len()
    }

    pub fn n_sites(&self) -> usize {
        self.spec.n_matter
    }

    pub fn code(&self, index: usize) -> u32 {
        self.codes[index]
    }

    pub fn codes(&self) -> &[u32] {
        &self.codes
    }

    /// Basis index of a code, if the code lies in this space.
    pub fn index_of(&self, code: u32) -> Option<usize> {
        if self.sector.is_none() {
            // Unrestricted: codes are 0..4^L in order.
            let c = code as usize;
            return (c < self.codes.len()).then_some(c);
        }
        self.codes.binary_search(&code).ok()
    }

    pub fn occupation(&self, code: u32, site: usize) -> u32 {
        (code >> site) & 1
    }

    pub fn link_bit(&self, code: u32, link: usize) -> u32 {
        (code >> (self.spec.n_matter + link)) & 1
    }

    /// Electric-field eigenvalue `τ^x = ±1` on a link.
    pub fn link_value(&self, code: u32, link: usize) -> i8 {
        1 - 2 * self.link_bit(code, link) as i8
    }

    /// `τ^x` on the link left of `site`; `+1` for the frozen fictitious link
    /// at the open left end.
    pub fn left_link_value(&self, code: u32, site: usize) -> i8 {
        let l = self.spec.n_matter;
        match self.spec.boundary {
            Boundary::Periodic => self.link_value(code, (site + l - 1) % l),
            Boundary::Open => {
                if site == 0 {
                    1
                } else {
                    self.link_value(code, site - 1)
                }
            }
        }
    }

    /// Eigenvalue of the gauge generator `G_j = (-1)^{n_j} τ^x_{j-1,j} τ^x_{j,j+1}`.
    pub fn gauge_eigenvalue(&self, code: u32, site: usize) -> i8 {
        let parity = 1 - 2 * self.occupation(code, site) as i8;
        parity * self.left_link_value(code, site) * self.link_value(code, site)
    }

    /// Eigenvalue of the local pseudogenerator
    /// `W_j = τ^x_{j-1,j} τ^x_{j,j+1} + 2 g_j^tar n_j`.
    pub fn lpg_eigenvalue(&self, code: u32, site: usize, g_tar: i8) -> i8 {
        self.left_link_value(code, site) * self.link_value(code, site)
            + 2 * g_tar * self.occupation(code, site) as i8
    }

    /// Code reached by toggling the occupation of `site`.
    pub fn flip_occupation(&self, code: u32, site: usize) -> u32 {
        code ^ (1 << site)
    }

    /// Code reached by flipping the electric field on `link`.
    pub fn flip_link(&self, code: u32, link: usize) -> u32 {
        code ^ (1 << (self.spec.n_matter + link))
    }
}

pub(crate) fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions_match_counting() {
        let s = HilbertSpace::build(LatticeSpec::new(4, Boundary::Periodic), None).unwrap();
        assert_eq!(s.dim(), 256);

        let s = HilbertSpace::build(LatticeSpec::new(4, Boundary::Periodic), Some(2)).unwrap();
        assert_eq!(s.dim(), 6 * 16);

        let s = HilbertSpace::build(LatticeSpec::new(6, Boundary::Open), None).unwrap();
        assert_eq!(s.dim(), 4096);
    }

    #[test]
    fn capacity_cap_enforced() {
        let err = HilbertSpace::build_with_cap(LatticeSpec::new(6, Boundary::Open), None, 1000)
            .unwrap_err();
        assert!(matches!(err, Error::Capacity { .. }));
        // default cap: L = 11 unrestricted would need 2^22
        let err = HilbertSpace::build(LatticeSpec::new(11, Boundary::Periodic), None).unwrap_err();
        assert!(matches!(err, Error::Capacity { .. }));
    }

    #[test]
    fn basis_order_is_ascending_and_indexable() {
        for sector in [None, Some(2)] {
            let s = HilbertSpace::build(LatticeSpec::new(4, Boundary::Open), sector).unwrap();
            for i in 1..s.dim() {
                assert!(s.code(i - 1) < s.code(i));
            }
            for i in 0..s.dim() {
                assert_eq!(s.index_of(s.code(i)), Some(i));
            }
        }
    }

    #[test]
    fn restricted_space_rejects_foreign_codes() {
        let s = HilbertSpace::build(LatticeSpec::new(4, Boundary::Periodic), Some(2)).unwrap();
        // all-empty matter configuration is not at half filling
        assert_eq!(s.index_of(0), None);
    }

    #[test]
    fn gauge_eigenvalue_flips_with_shared_link() {
        let s = HilbertSpace::build(LatticeSpec::new(4, Boundary::Periodic), None).unwrap();
        let code = 0; // all empty, all links +1: every G_j = +1
        for j in 0..4 {
            assert_eq!(s.gauge_eigenvalue(code, j), 1);
        }
        // flipping link 1 flips exactly G_1 and G_2
        let flipped = s.flip_link(code, 1);
        let gs: Vec<i8> = (0..4).map(|j| s.gauge_eigenvalue(flipped, j)).collect();
        assert_eq!(gs, vec![1, -1, -1, 1]);
    }

    #[test]
    fn open_boundary_uses_frozen_left_link() {
        let s = HilbertSpace::build(LatticeSpec::new(4, Boundary::Open), None).unwrap();
        let code = s.flip_occupation(0, 0); // occupy site 0
        assert_eq!(s.gauge_eigenvalue(code, 0), -1);
        // dangling link enters only G_{L-1}
        let flipped = s.flip_link(0, 3);
        let gs: Vec<i8> = (0..4).map(|j| s.gauge_eigenvalue(flipped, j)).collect();
        assert_eq!(gs, vec![1, 1, 1, -1]);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(LatticeSpec::new(1, Boundary::Open).validate().is_err());
        let mut spec = LatticeSpec::new(4, Boundary::Open);
        spec.target_sector[2] = 0;
        assert!(spec.validate().is_err());
        spec.target_sector = vec![1; 3];
        assert!(spec.validate().is_err());
    }
}
