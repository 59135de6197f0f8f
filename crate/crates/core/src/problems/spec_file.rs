//! Problem spec files: a flat TOML document naming a benchmark instance.
//!
//! ```toml
//! func_id = 6
//! n = 100
//! m = 10
//! seed = 3
//! optimum = [12.5, -3.25, ...]      # optional
//! rotations = [[0.1, ...], ...]     # optional, one row-major payload per rotated block
//! ```
//!
//! Floats are written in shortest round-trip decimal form, so a problem
//! exported with its payloads reloads bit-identically.

use serde::{Deserialize, Serialize};

use super::benchmark::{build_problem, BenchmarkProblem};
use super::rotation::Rotation;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub func_id: u8,
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimum: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotations: Option<Vec<Vec<f64>>>,
}

impl ProblemSpec {
    pub fn new(func_id: u8, n: usize, m: usize, seed: u64) -> Self {
        Self { func_id, n, m, seed, optimum: None, rotations: None }
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }

    /// Materialize the problem, overriding generated payloads with explicit ones.
    pub fn build(&self) -> Result<BenchmarkProblem> {
        let mut p = build_problem(self.func_id, self.n, self.m, self.seed)?;
        if let Some(o) = &self.optimum {
            if o.len() != p.n {
                return Err(Error::Config(format!(
                    "optimum has {} entries, problem has {}",
                    o.len(),
                    p.n
                )));
            }
            for (i, v) in o.iter().enumerate() {
                if !(p.lower[i]..=p.upper[i]).contains(v) {
                    return Err(Error::Config(format!("optimum[{i}] = {v} is out of bounds")));
                }
            }
            p.shift = o.clone();
        }
        if let Some(payloads) = &self.rotations {
            let rotated: Vec<usize> = p
                .components
                .iter()
                .enumerate()
                .filter(|(_, c)| c.rotation.is_some())
                .map(|(i, _)| i)
                .collect();
            if payloads.len() != rotated.len() {
                return Err(Error::Config(format!(
                    "{} rotation payloads given, problem has {} rotated blocks",
                    payloads.len(),
                    rotated.len()
                )));
            }
            for (ci, data) in rotated.into_iter().zip(payloads) {
                let size = p.components[ci].len;
                p.components[ci].rotation = Some(Rotation::from_row_major(size, data.clone())?);
            }
        }
        Ok(p)
    }
}

impl BenchmarkProblem {
    /// Spec describing this problem; with `payloads` the optimum and every
    /// rotation are written out explicitly.
    pub fn to_spec(&self, payloads: bool) -> ProblemSpec {
        let mut spec = ProblemSpec::new(self.func_id, self.n, self.m, self.seed);
        if payloads {
            spec.optimum = Some(self.shift.clone());
            spec.rotations = Some(
                self.components
                    .iter()
                    .filter_map(|c| c.rotation.as_ref().map(|r| r.row_major().to_vec()))
                    .collect(),
            );
        }
        spec
    }
}
