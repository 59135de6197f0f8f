//! Decomposition accuracy scores.

use crate::error::{Error, Result};
use crate::grouping::Decomposition;
use crate::problems::{BenchmarkProblem, GroundTruthDecomposition};

/// Disjoint nonempty groups covering `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    n: usize,
    groups: Vec<Vec<usize>>,
}

impl Partition {
    pub fn new(n: usize, groups: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n];
        for g in &groups {
            if g.is_empty() {
                return Err(Error::Domain("partition contains an empty group".into()));
            }
            for &v in g {
                if v >= n {
                    return Err(Error::Domain(format!("element {v} outside 0..{n}")));
                }
                if std::mem::replace(&mut seen[v], true) {
                    return Err(Error::Domain(format!("element {v} appears twice")));
                }
            }
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            return Err(Error::Domain(format!("element {v} is not covered")));
        }
        Ok(Self { n, groups })
    }

    pub fn singletons(n: usize) -> Self {
        Self { n, groups: (0..n).map(|i| vec![i]).collect() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    /// Group index of every element.
    pub fn labels(&self) -> Vec<usize> {
        let mut labels = vec![0; self.n];
        for (k, g) in self.groups.iter().enumerate() {
            for &v in g {
                labels[v] = k;
            }
        }
        labels
    }

    /// Intersect every group with `subset`, drop the empty ones and
    /// renumber elements by their position in `subset`.
    pub fn restrict(&self, subset: &[usize]) -> Self {
        let labels = self.labels();
        let mut groups: Vec<Vec<usize>> = vec![Vec::new(); self.groups.len()];
        for (pos, &v) in subset.iter().enumerate() {
            groups[labels[v]].push(pos);
        }
        groups.retain(|g| !g.is_empty());
        Self { n: subset.len(), groups }
    }
}

/// Overlap counts between the groups of two partitions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    pub rows: usize,
    pub cols: usize,
    pub counts: Vec<u64>,
}

impl ConfusionMatrix {
    pub fn new(a: &Partition, b: &Partition) -> Result<Self> {
        if a.n != b.n {
            return Err(Error::Domain(format!("partitions cover {} and {} elements", a.n, b.n)));
        }
        let (rows, cols) = (a.groups.len(), b.groups.len());
        let mut counts = vec![0; rows * cols];
        for (i, j) in a.labels().into_iter().zip(b.labels()) {
            counts[i * cols + j] += 1;
        }
        Ok(Self { rows, cols, counts })
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.counts[i * self.cols + j]
    }

    pub fn row_sums(&self) -> Vec<u64> {
        self.counts.chunks(self.cols.max(1)).map(|r| r.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<u64> {
        (0..self.cols).map(|j| (0..self.rows).map(|i| self.get(i, j)).sum()).collect()
    }
}

/// Normalized mutual information of two partitions, in percent.
///
/// Identical partitions score exactly 100, including two single-group
/// partitions where the formula is 0/0.
pub fn nmi(d: &Partition, d_prime: &Partition, n: usize) -> Result<f64> {
    if d.n != n || d_prime.n != n {
        return Err(Error::Domain(format!("partitions do not cover {n} elements")));
    }
    if n == 0 {
        return Ok(100.0);
    }
    let m = ConfusionMatrix::new(d, d_prime)?;
    let nf = n as f64;
    let (rs, cs) = (m.row_sums(), m.col_sums());
    if m.rows == m.cols && m.counts.iter().filter(|&&c| c > 0).count() == m.rows {
        // Every group maps onto exactly one group of the other side.
        return Ok(100.0);
    }
    let mut num = 0.0;
    for i in 0..m.rows {
        for j in 0..m.cols {
            let c = m.get(i, j) as f64;
            if c > 0.0 {
                num += c * (c * nf / (rs[i] as f64 * cs[j] as f64)).log2();
            }
        }
    }
    let entropy = |sums: &[u64]| -> f64 {
        sums.iter().map(|&s| s as f64 * (s as f64 / nf).log2()).sum()
    };
    let den = entropy(&rs) + entropy(&cs);
    if den == 0.0 {
        return Ok(100.0);
    }
    Ok((-2.0 * num / den * 100.0).clamp(0.0, 100.0))
}

/// NMI over the truly separable variables (`rho1`) and the truly
/// nonseparable ones (`rho2`); `None` when that set is empty.
pub fn rho_split(gt: &GroundTruthDecomposition, result: &Decomposition) -> Result<(Option<f64>, Option<f64>)> {
    if gt.n != result.n {
        return Err(Error::Domain(format!("ground truth has n = {}, result n = {}", gt.n, result.n)));
    }
    let produced = Partition::new(result.n, result.as_groups())?;
    let rho1 = if gt.separable.is_empty() {
        None
    } else {
        let k = gt.separable.len();
        Some(nmi(&Partition::singletons(k), &produced.restrict(&gt.separable), k)?)
    };
    let rho2 = if gt.groups.is_empty() {
        None
    } else {
        let members: Vec<usize> = gt.groups.iter().flatten().copied().collect();
        let mut at = 0;
        let ideal = gt
            .groups
            .iter()
            .map(|g| {
                at += g.len();
                (at - g.len()..at).collect()
            })
            .collect();
        let k = members.len();
        Some(nmi(&Partition::new(k, ideal)?, &produced.restrict(&members), k)?)
    };
    Ok((rho1, rho2))
}

/// Distance between the context vector and the true optimum over the
/// variables the decomposer called separable.
pub fn dis(result: &Decomposition, problem: &BenchmarkProblem) -> f64 {
    dis_to(result, problem.optimum())
}

pub fn dis_to(result: &Decomposition, optimum: &[f64]) -> f64 {
    result
        .seps
        .iter()
        .map(|s| (result.cv[s.index] - optimum[s.index]).powi(2))
        .sum::<f64>()
        .sqrt()
}
