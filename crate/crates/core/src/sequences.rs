//! Coefficient sequences for the pseudogenerator protection term, the
//! compliance decision, and the resonant-sector fraction.
//!
//! A sequence is compliant at size `L` when the weighted deviation sum
//! `sum_j c_j (w_j - g_j^tar)` vanishes only for the all-target configuration.
//! Deviations per site are `(w_j - g_j^tar)/2 ∈ {-1,0,+1}`, so the decision is
//! an exact subset-sum question over `{-1,0,+1}^L`, settled here in integer
//! arithmetic after clearing denominators. Floating point is never used;
//! resonance is an exact-zero condition.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use serde::Serialize;

use crate::error::{Error, Result};

/// Default cap on the lattice sizes the exhaustive DP will accept.
pub const DEFAULT_ENUM_CAP: usize = 24;

/// Cap on the cleared-integer weight range `sum_j |a_j|` of the DP table.
const MAX_WEIGHT_RANGE: i128 = 1 << 24;

pub type Rational = Ratio<i64>;

/// Periodic sequence of exact rational coefficients `c_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoeffSequence {
    coefficients: Vec<Rational>,
    description: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SequencePreset {
    /// `c_j ∈ {-1, 3, -7, 17}/17`, period 4.
    Seventeenths,
    /// `c_j = [6(-1)^j + 5]/11`, period 2: `(-1/11, 1)`.
    Elevenths,
    /// `c_j = 1`, for baseline comparisons.
    Uniform,
    Custom(Vec<Rational>),
}

/// Build a coefficient sequence from a preset; custom lists must be nonzero.
pub fn make_sequence(preset: SequencePreset) -> Result<CoeffSequence> {
    match preset {
        SequencePreset::Seventeenths => CoeffSequence::new(
            vec![
                Rational::new(-1, 17),
                Rational::new(3, 17),
                Rational::new(-7, 17),
                Rational::new(1, 1),
            ],
            "seventeenths",
        ),
        SequencePreset::Elevenths => CoeffSequence::new(
            vec![Rational::new(-1, 11), Rational::new(1, 1)],
            "elevenths",
        ),
        SequencePreset::Uniform => CoeffSequence::new(vec![Rational::new(1, 1)], "uniform"),
        SequencePreset::Custom(list) => CoeffSequence::new(list, "custom"),
    }
}

impl CoeffSequence {
    pub fn new(coefficients: Vec<Rational>, description: impl Into<String>) -> Result<Self> {
        if coefficients.is_empty() || coefficients.iter().any(|c| *c.numer() == 0) {
            return Err(Error::ZeroCoefficient);
        }
        Ok(Self {
            coefficients,
            description: description.into(),
        })
    }

    pub fn period(&self) -> usize {
        self.coefficients.len()
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    /// Coefficient at site `j` (0-based), extending periodically.
    pub fn coefficient(&self, j: usize) -> Rational {
        self.coefficients[j % self.coefficients.len()]
    }

    /// First `l` coefficients of the periodic extension.
    pub fn extended(&self, l: usize) -> Vec<Rational> {
        (0..l).map(|j| self.coefficient(j)).collect()
    }

    /// Periodic extension as f64 weights, for building Hamiltonians.
    pub fn extended_f64(&self, l: usize) -> Vec<f64> {
        (0..l)
            .map(|j| {
                let c = self.coefficient(j);
                *c.numer() as f64 / *c.denom() as f64
            })
            .collect()
    }

    /// Integer weights over `l` sites with denominators cleared by the lcm
    /// over one period. Scaling does not affect compliance or resonance.
    fn cleared_integers(&self, l: usize) -> Vec<i128> {
        let lcm = self
            .coefficients
            .iter()
            .fold(1i128, |acc, c| acc.lcm(&(*c.denom() as i128)));
        (0..l)
            .map(|j| {
                let c = self.coefficient(j);
                *c.numer() as i128 * (lcm / *c.denom() as i128)
            })
            .collect()
    }
}

/// Deviation pattern `s_j = (w_j - g_j^tar)/2 ∈ {-1,0,+1}` per site.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeviationConfig {
    pub s: Vec<i8>,
}

impl DeviationConfig {
    pub fn is_zero(&self) -> bool {
        self.s.iter().all(|&v| v == 0)
    }

    /// Weighted deviation sum `sum_j c_j s_j`, exact.
    pub fn weighted_sum(&self, seq: &CoeffSequence) -> Rational {
        self.s
            .iter()
            .enumerate()
            .map(|(j, &s)| seq.coefficient(j) * Rational::from_integer(s as i64))
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComplianceReport {
    pub compliant: bool,
    /// A nonzero deviation config with vanishing weighted sum, present iff
    /// the sequence is noncompliant.
    pub witness: Option<DeviationConfig>,
    pub lattice_size: usize,
}

const REACH: u8 = 1;
/// Reachable by a configuration with at least one nonzero deviation.
const REACH_NONZERO: u8 = 2;

struct DpTables {
    weights: Vec<i128>,
    /// Half-width of the sum range; sums are stored at `sum + offset`.
    offset: i128,
    /// `layers[k][x]` = reachability flags for partial sums over the first
    /// `k` weights.
    layers: Vec<Vec<u8>>,
}

fn run_reachability_dp(seq: &CoeffSequence, l: usize, cap: usize) -> Result<DpTables> {
    if l == 0 {
        return Err(Error::InvalidParams("lattice size must be >= 1".into()));
    }
    if l > cap {
        return Err(Error::Capacity {
            what: "enumeration size",
            got: l,
            cap,
        });
    }
    let weights = seq.cleared_integers(l);
    let offset: i128 = weights.iter().map(|a| a.abs()).sum();
    if offset > MAX_WEIGHT_RANGE {
        return Err(Error::Capacity {
            what: "dp weight range",
            got: offset as usize,
            cap: MAX_WEIGHT_RANGE as usize,
        });
    }
    let width = (2 * offset + 1) as usize;
    let mut layers = Vec::with_capacity(l + 1);
    let mut current = vec![0u8; width];
    current[offset as usize] = REACH;
    layers.push(current.clone());
    for &a in &weights {
        let mut next = vec![0u8; width];
        for (x, &flags) in current.iter().enumerate() {
            if flags == 0 {
                continue;
            }
            for s in [-1i128, 0, 1] {
                let y = (x as i128 + a * s) as usize;
                let mut f = flags;
                if s != 0 {
                    // any reachable prefix extended by a nonzero step
                    f |= REACH_NONZERO;
                }
                next[y] |= f;
            }
        }
        layers.push(next.clone());
        current = next;
    }
    Ok(DpTables {
        weights,
        offset,
        layers,
    })
}

impl DpTables {
    fn zero_reachable_nonzero(&self) -> bool {
        self.layers[self.weights.len()][self.offset as usize] & REACH_NONZERO != 0
    }

    /// Walk the layers back from sum 0, producing one nonzero witness.
    fn extract_witness(&self) -> DeviationConfig {
        let l = self.weights.len();
        let mut s = vec![0i8; l];
        let mut sum = 0i128;
        let mut need_nonzero = true;
        for k in (0..l).rev() {
            let a = self.weights[k];
            let mut chosen = None;
            for step in [-1i128, 1, 0] {
                let prev = sum - a * step;
                if prev.abs() > self.offset {
                    continue;
                }
                let flags = self.layers[k][(prev + self.offset) as usize];
                let needed = if need_nonzero && step == 0 {
                    REACH_NONZERO
                } else {
                    REACH
                };
                if flags & needed != 0 {
                    chosen = Some((step, prev));
                    break;
                }
            }
            let (step, prev) = chosen.expect("witness backtrack: layer must be consistent");
            s[k] = step as i8;
            sum = prev;
            if step != 0 {
                need_nonzero = false;
            }
        }
        DeviationConfig { s }
    }
}

/// Decide compliance exactly over `{-1,0,+1}^l` by dynamic programming.
pub fn is_compliant(seq: &CoeffSequence, l: usize) -> Result<ComplianceReport> {
    is_compliant_with_cap(seq, l, DEFAULT_ENUM_CAP)
}

pub fn is_compliant_with_cap(seq: &CoeffSequence, l: usize, cap: usize) -> Result<ComplianceReport> {
    let dp = run_reachability_dp(seq, l, cap)?;
    if dp.zero_reachable_nonzero() {
        let witness = dp.extract_witness();
        debug_assert!(!witness.is_zero());
        debug_assert_eq!(witness.weighted_sum(seq), Rational::new(0, 1));
        Ok(ComplianceReport {
            compliant: false,
            witness: Some(witness),
            lattice_size: l,
        })
    } else {
        Ok(ComplianceReport {
            compliant: true,
            witness: None,
            lattice_size: l,
        })
    }
}

/// Fraction of deviation configurations that are resonant with the target
/// sector: nonzero configs with vanishing weighted sum, out of `3^l`.
pub fn resonance_fraction(seq: &CoeffSequence, l: usize) -> Result<BigRational> {
    resonance_fraction_with_cap(seq, l, DEFAULT_ENUM_CAP)
}

pub fn resonance_fraction_with_cap(seq: &CoeffSequence, l: usize, cap: usize) -> Result<BigRational> {
    if l == 0 {
        return Err(Error::InvalidParams("lattice size must be >= 1".into()));
    }
    if l > cap {
        return Err(Error::Capacity {
            what: "enumeration size",
            got: l,
            cap,
        });
    }
    let weights = seq.cleared_integers(l);
    let offset: i128 = weights.iter().map(|a| a.abs()).sum();
    if offset > MAX_WEIGHT_RANGE {
        return Err(Error::Capacity {
            what: "dp weight range",
            got: offset as usize,
            cap: MAX_WEIGHT_RANGE as usize,
        });
    }
    let width = (2 * offset + 1) as usize;
    let mut counts = vec![0u128; width];
    counts[offset as usize] = 1;
    for &a in &weights {
        let mut next = vec![0u128; width];
        for (x, &n) in counts.iter().enumerate() {
            if n == 0 {
                continue;
            }
            for s in [-1i128, 0, 1] {
                next[(x as i128 + a * s) as usize] += n;
            }
        }
        counts = next;
    }
    let zero_count = counts[offset as usize];
    let resonant = BigInt::from(zero_count - 1); // remove the all-zero config
    let total = BigInt::from(3u8).pow(l as u32);
    Ok(BigRational::new(resonant, total))
}
