use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A variable judged separable, with its located optimum when the
/// decomposer produces one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeparableVar {
    pub index: usize,
    pub optimum: Option<f64>,
}

/// Partition of the variables into separable singletons and nonseparable
/// groups, plus the context vector and cost of producing it.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub n: usize,
    pub seps: Vec<SeparableVar>,
    pub nonseps: Vec<Vec<usize>>,
    pub cv: Vec<f64>,
    pub fes_used: u64,
    /// The evaluation budget ran out; unresolved variables were pooled.
    pub exhausted: bool,
}

#[derive(Serialize, Deserialize)]
struct DecompositionDoc {
    n: usize,
    seps: Vec<SeparableVar>,
    nonseps: Vec<Vec<usize>>,
    fes_used: u64,
    exhausted: bool,
    cv_digest: String,
    cv: Vec<f64>,
}

/// FNV-1a over the bit patterns of `values`.
pub fn digest(values: &[f64]) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for v in values {
        for b in v.to_bits().to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    format!("{h:016x}")
}

impl Decomposition {
    /// Check the partition invariants.
    pub fn validate(&self) -> Result<()> {
        let mut seen = vec![false; self.n];
        let all = self
            .seps
            .iter()
            .map(|s| s.index)
            .chain(self.nonseps.iter().flatten().copied());
        for v in all {
            if v >= self.n {
                return Err(Error::Domain(format!("variable {v} outside 0..{}", self.n)));
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(Error::Domain(format!("variable {v} assigned twice")));
            }
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            return Err(Error::Domain(format!("variable {v} is unassigned")));
        }
        if self.nonseps.iter().any(|g| g.len() < 2) {
            return Err(Error::Domain("nonseparable groups need at least two variables".into()));
        }
        if self.cv.len() != self.n {
            return Err(Error::Domain("context vector length differs from n".into()));
        }
        for s in &self.seps {
            if let Some(v) = s.optimum {
                if self.cv[s.index] != v {
                    return Err(Error::Domain(format!(
                        "cv[{}] does not hold the located optimum",
                        s.index
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn separable_indices(&self) -> Vec<usize> {
        self.seps.iter().map(|s| s.index).collect()
    }

    /// Groups as a list covering every variable (separables as singletons).
    pub fn as_groups(&self) -> Vec<Vec<usize>> {
        self.seps
            .iter()
            .map(|s| vec![s.index])
            .chain(self.nonseps.iter().cloned())
            .collect()
    }

    pub fn to_json(&self) -> String {
        let doc = DecompositionDoc {
            n: self.n,
            seps: self.seps.clone(),
            nonseps: self.nonseps.clone(),
            fes_used: self.fes_used,
            exhausted: self.exhausted,
            cv_digest: digest(&self.cv),
            cv: self.cv.clone(),
        };
        serde_json::to_string_pretty(&doc).expect("decomposition is always serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: DecompositionDoc =
            serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        if digest(&doc.cv) != doc.cv_digest {
            return Err(Error::Format("context vector digest mismatch".into()));
        }
        let d = Self {
            n: doc.n,
            seps: doc.seps,
            nonseps: doc.nonseps,
            cv: doc.cv,
            fes_used: doc.fes_used,
            exhausted: doc.exhausted,
        };
        d.validate()?;
        Ok(d)
    }
}
