//! Diagonal observables: gauge violation, staggered occupation, electric flux.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::HilbertSpace;
use crate::ops::StateVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationMode {
    /// `1 - (1/L) sum_j g_j^tar <G_j>`, all constraints.
    AllSites,
    /// `1 - 1/(L-1) sum_{j>0} g_j^tar <G_j>`, skipping the leftmost
    /// constraint (the raw violation of the open-boundary circuit).
    Interior,
}

/// Instantaneous diagonal observables of one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstantObservables {
    /// `sum_j <G_j>`, unweighted.
    pub sum_g: f64,
    pub violation_all: f64,
    pub violation_interior: f64,
    pub n_stag: f64,
    pub e_flux: f64,
    pub norm: f64,
}

/// One-pass evaluator for the diagonal observables.
pub struct ObservableEvaluator<'a> {
    space: &'a HilbertSpace,
    target: Vec<i8>,
}

impl<'a> ObservableEvaluator<'a> {
    pub fn new(space: &'a HilbertSpace) -> Self {
        Self {
            space,
            target: space.spec.target_sector.clone(),
        }
    }

    pub fn evaluate(&self, state: &StateVector) -> InstantObservables {
        let l = self.space.n_sites();
        let mut sum_g = 0.0;
        let mut sum_g_weighted = 0.0;
        let mut sum_g_weighted_interior = 0.0;
        let mut n_stag = 0.0;
        let mut e_flux = 0.0;
        let mut norm_sq = 0.0;
        for (i, amp) in state.amp.iter().enumerate() {
            let p = amp.norm_sqr();
            if p == 0.0 {
                continue;
            }
            norm_sq += p;
            let code = self.space.code(i);
            for site in 0..l {
                let g = self.space.gauge_eigenvalue(code, site) as f64;
                let weighted = g * self.target[site] as f64;
                sum_g += p * g;
                sum_g_weighted += p * weighted;
                if site > 0 {
                    sum_g_weighted_interior += p * weighted;
                }
                // (-1)^j with the first site counting negative
                let sign = if site % 2 == 0 { -1.0 } else { 1.0 };
                n_stag += p * sign * self.space.occupation(code, site) as f64;
                e_flux += p * self.space.link_value(code, site) as f64;
            }
        }
        InstantObservables {
            sum_g,
            violation_all: 1.0 - sum_g_weighted / l as f64,
            violation_interior: 1.0 - sum_g_weighted_interior / (l - 1) as f64,
            n_stag: n_stag / l as f64,
            e_flux: e_flux / l as f64,
            norm: norm_sq.sqrt(),
        }
    }
}

/// Instantaneous gauge violation of a state against a target sector.
pub fn gauge_violation_instant(
    space: &HilbertSpace,
    state: &StateVector,
    target_sector: &[i8],
    mode: ViolationMode,
) -> f64 {
    let l = space.n_sites();
    let mut acc = 0.0;
    for (i, amp) in state.amp.iter().enumerate() {
        let p = amp.norm_sqr();
        if p == 0.0 {
            continue;
        }
        let code = space.code(i);
        let range = match mode {
            ViolationMode::AllSites => 0..l,
            ViolationMode::Interior => 1..l,
        };
        for site in range {
            acc += p * space.gauge_eigenvalue(code, site) as f64 * target_sector[site] as f64;
        }
    }
    let norm = match mode {
        ViolationMode::AllSites => l as f64,
        ViolationMode::Interior => (l - 1) as f64,
    };
    1.0 - acc / norm
}

/// `(1/L) sum_j (-1)^j <n_j>` with the first site counting negative.
pub fn staggered_occupation(space: &HilbertSpace, state: &StateVector) -> f64 {
    let l = space.n_sites();
    let mut acc = 0.0;
    for (i, amp) in state.amp.iter().enumerate() {
        let p = amp.norm_sqr();
        if p == 0.0 {
            continue;
        }
        let code = space.code(i);
        for site in 0..l {
            let sign = if site % 2 == 0 { -1.0 } else { 1.0 };
            acc += p * sign * space.occupation(code, site) as f64;
        }
    }
    acc / l as f64
}

/// `(1/L) sum_links <τ^x>`.
pub fn electric_flux(space: &HilbertSpace, state: &StateVector) -> f64 {
    let l = space.n_sites();
    let mut acc = 0.0;
    for (i, amp) in state.amp.iter().enumerate() {
        let p = amp.norm_sqr();
        if p == 0.0 {
            continue;
        }
        let code = space.code(i);
        for link in 0..l {
            acc += p * space.link_value(code, link) as f64;
        }
    }
    acc / l as f64
}

/// Cumulative time average of an instantaneous series by the trapezoidal
/// rule, with the `t = 0` value fixed to 0.
pub fn temporal_average(instant: &[f64], times: &[f64]) -> Result<Vec<f64>> {
    if instant.len() != times.len() {
        return Err(Error::DimensionMismatch {
            left: instant.len(),
            right: times.len(),
        });
    }
    if times.is_empty() || times[0] != 0.0 || times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::UnsortedTimes);
    }
    let mut out = Vec::with_capacity(times.len());
    out.push(0.0);
    let mut integral = 0.0;
    for k in 1..times.len() {
        integral += 0.5 * (instant[k] + instant[k - 1]) * (times[k] - times[k - 1]);
        out.push(integral / times[k]);
    }
    Ok(out)
}
