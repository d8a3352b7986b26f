//! Sampled observable series of one evolution run, with CSV and JSON output.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};

/// Version stamp written into every output file.
pub const FORMAT_VERSION: u32 = 1;

pub const CSV_COLUMNS: [&str; 8] = [
    "t", "sumG", "eps_avg", "eps_raw", "n_stag", "E", "energy", "norm",
];

/// Observables sampled over an evolution run.
#[derive(Debug, Clone, Default, Serialize)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    /// `sum_j <G_j>`, unweighted.
    pub sum_g: Vec<f64>,
    /// Temporally averaged gauge violation.
    pub eps_avg: Vec<f64>,
    /// Raw (instantaneous, interior) gauge violation.
    pub eps_raw: Vec<f64>,
    pub n_stag: Vec<f64>,
    pub e_flux: Vec<f64>,
    pub energy: Vec<f64>,
    pub norm: Vec<f64>,
}

impl TimeSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Grid and norm sanity: strictly increasing times from 0, unit norms.
    pub fn validate_unitary(&self, norm_tol: f64) -> Result<()> {
        if self.times.is_empty()
            || self.times[0] != 0.0
            || self.times.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(Error::UnsortedTimes);
        }
        for &n in &self.norm {
            if (n - 1.0).abs() > norm_tol {
                return Err(Error::InvalidParams(format!(
                    "norm drifted to {n}, tolerance {norm_tol}"
                )));
            }
        }
        Ok(())
    }

    /// Energy conservation for continuous-time evolution.
    pub fn validate_energy(&self, rel_tol: f64) -> Result<()> {
        let e0 = self.energy.first().copied().unwrap_or(0.0);
        let scale = e0.abs().max(1.0);
        for &e in &self.energy {
            if (e - e0).abs() / scale > rel_tol {
                return Err(Error::InvalidParams(format!(
                    "energy drifted from {e0} to {e}, relative tolerance {rel_tol}"
                )));
            }
        }
        Ok(())
    }

    fn row(&self, k: usize) -> [f64; 8] {
        [
            self.times[k],
            self.sum_g[k],
            self.eps_avg[k],
            self.eps_raw[k],
            self.n_stag[k],
            self.e_flux[k],
            self.energy[k],
            self.norm[k],
        ]
    }

    /// CSV with the resolved run configuration in `#`-prefixed header lines.
    pub fn write_csv(&self, mut w: impl Write, meta: &RunMeta) -> Result<()> {
        writeln!(w, "# format_version = {}", meta.format_version)?;
        writeln!(w, "# config_hash = {}", meta.config_hash)?;
        writeln!(w, "# config = {}", serde_json::to_string(&meta.config)?)?;
        writeln!(w, "{}", CSV_COLUMNS.join(","))?;
        for k in 0..self.len() {
            let row = self.row(k);
            let line: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    }

    /// JSON document with the same numbers plus full metadata.
    pub fn write_json(&self, mut w: impl Write, meta: &RunMeta) -> Result<()> {
        #[derive(Serialize)]
        struct Doc<'a> {
            format_version: u32,
            config_hash: &'a str,
            config: &'a serde_json::Value,
            columns: [&'static str; 8],
            rows: Vec<[f64; 8]>,
        }
        let doc = Doc {
            format_version: meta.format_version,
            config_hash: &meta.config_hash,
            config: &meta.config,
            columns: CSV_COLUMNS,
            rows: (0..self.len()).map(|k| self.row(k)).collect(),
        };
        serde_json::to_writer_pretty(&mut w, &doc)?;
        writeln!(w)?;
        Ok(())
    }
}

/// Run metadata embedded in every output file.
#[derive(Debug, Clone, Serialize)]
pub struct RunMeta {
    pub format_version: u32,
    pub config_hash: String,
    pub config: serde_json::Value,
}

impl RunMeta {
    pub fn new(config: serde_json::Value, config_hash: String) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            config_hash,
            config,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::InvalidParams(format!("serialization failed: {e}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_series() -> TimeSeries {
        TimeSeries {
            times: vec![0.0, 0.5, 1.0],
            sum_g: vec![4.0, 3.5, 3.0],
            eps_avg: vec![0.0, 0.1, 0.2],
            eps_raw: vec![0.0, 0.15, 0.3],
            n_stag: vec![-0.5, -0.4, -0.3],
            e_flux: vec![0.0, 0.05, 0.1],
            energy: vec![-1.2, -1.2, -1.2],
            norm: vec![1.0, 1.0, 1.0],
        }
    }

    fn meta() -> RunMeta {
        RunMeta::new(serde_json::json!({"l": 4}), "abc123".into())
    }

    #[test]
    fn csv_has_header_and_rows() {
        let mut buf = Vec::new();
        sample_series().write_csv(&mut buf, &meta()).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# format_version = 1"));
        assert!(lines[1].starts_with("# config_hash = abc123"));
        assert!(lines[2].contains("\"l\":4"));
        assert_eq!(lines[3], CSV_COLUMNS.join(","));
        assert_eq!(lines.len(), 4 + 3);
        assert!(lines[4].starts_with("0,4,0,0,-0.5,0,-1.2,1"));
    }

    #[test]
    fn json_carries_identical_numbers() {
        let series = sample_series();
        let mut buf = Vec::new();
        series.write_json(&mut buf, &meta()).unwrap();
        let doc: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(doc["format_version"], 1);
        assert_eq!(doc["rows"][1][0], 0.5);
        assert_eq!(doc["rows"][2][3], 0.3);
        assert_eq!(doc["config"]["l"], 4);
    }

    #[test]
    fn validation_catches_drift() {
        let mut s = sample_series();
        assert!(s.validate_unitary(1e-10).is_ok());
        assert!(s.validate_energy(1e-8).is_ok());
        s.norm[2] = 1.1;
        assert!(s.validate_unitary(1e-10).is_err());
        s.norm[2] = 1.0;
        s.energy[2] = -1.0;
        assert!(s.validate_energy(1e-8).is_err());
        s.times[2] = 0.5;
        assert!(s.validate_unitary(1e-10).is_err());
    }
}
