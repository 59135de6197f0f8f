//! Reference decomposers built on the additive criterion.
//!
//! Both probe every variable at its lower bound and at the midpoint of its
//! range. Neither locates optima, so their separable variables carry no
//! optimum and the context vector is the all-lower-bound base point.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grouping::{Decomposition, SeparableVar};
use crate::problems::{CountingObjective, Function};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaselineConfig {
    /// Threshold on the difference of the two fitness deltas.
    pub epsilon: f64,
    /// Multiply `epsilon` by `1 + |f(lb)|`.
    pub relative: bool,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        Self { epsilon: 1e-10, relative: true }
    }
}

impl BaselineConfig {
    pub fn absolute(epsilon: f64) -> Self {
        Self { epsilon, relative: false }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.epsilon.is_finite() || self.epsilon < 0.0 {
            return Err(Error::Config(format!("epsilon must be finite and >= 0, got {}", self.epsilon)));
        }
        Ok(())
    }

    fn threshold(&self, f_base: f64) -> f64 {
        if self.relative {
            self.epsilon * (1.0 + f_base.abs())
        } else {
            self.epsilon
        }
    }
}

/// Shared probe geometry: base point `lb` and perturbed point `mid`.
struct Probe<'a, F> {
    obj: &'a CountingObjective<F>,
    base: Vec<f64>,
    mid: Vec<f64>,
    f_base: f64,
    eps: f64,
}

impl<'a, F: Function> Probe<'a, F> {
    fn new(obj: &'a CountingObjective<F>, cfg: &BaselineConfig) -> Result<Self> {
        cfg.validate()?;
        let base = obj.lower().to_vec();
        let mid = obj.lower().iter().zip(obj.upper()).map(|(l, u)| 0.5 * (l + u)).collect();
        let f_base = obj.evaluate(&base)?;
        Ok(Self { obj, base, mid, f_base, eps: cfg.threshold(f_base) })
    }

    fn moved(&self, point: &[f64], vars: &[usize]) -> Vec<f64> {
        let mut p = point.to_vec();
        for &v in vars {
            p[v] = self.mid[v];
        }
        p
    }

    /// Whether moving `b` changes the effect of moving `a`; 3 evaluations.
    fn interacts(&self, a: &[usize], b: &[usize]) -> Result<bool> {
        let pa = self.moved(&self.base, a);
        let delta1 = self.f_base - self.obj.evaluate(&pa)?;
        self.interacts_given(a, b, delta1)
    }

    /// As [`interacts`](Self::interacts) with the first delta supplied; 2 evaluations.
    fn interacts_given(&self, a: &[usize], b: &[usize], delta1: f64) -> Result<bool> {
        let pb = self.moved(&self.base, b);
        let pab = self.moved(&pb, a);
        let delta2 = self.obj.evaluate(&pb)? - self.obj.evaluate(&pab)?;
        Ok((delta1 - delta2).abs() > self.eps)
    }
}

fn finish(
    n: usize,
    base: Vec<f64>,
    groups: Vec<Vec<usize>>,
    unresolved: Vec<usize>,
    fes_used: u64,
    exhausted: bool,
) -> Decomposition {
    let mut seps = Vec::new();
    let mut nonseps = Vec::new();
    for mut g in groups.into_iter().chain((!unresolved.is_empty()).then_some(unresolved)) {
        if g.len() == 1 {
            seps.push(SeparableVar { index: g[0], optimum: None });
        } else {
            g.sort_unstable();
            nonseps.push(g);
        }
    }
    Decomposition { n, seps, nonseps, cv: base, fes_used, exhausted }
}

/// Pairwise grouping: each ungrouped variable is tested against every
/// remaining one and the interacting ones join its group.
///
/// The base point is shared and the target's own delta is measured once per
/// target, so a pass costs `1 + 2·|remaining|` evaluations.
pub fn dg_decompose<F: Function>(obj: &CountingObjective<F>, cfg: &BaselineConfig) -> Result<Decomposition> {
    let n = obj.dim();
    let start = obj.fes_used();
    let probe = Probe::new(obj, cfg)?;
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut groups = Vec::new();
    while !remaining.is_empty() {
        let i = remaining.remove(0);
        let step = (|| -> Result<Vec<usize>> {
            let mut group = vec![i];
            if remaining.is_empty() {
                return Ok(group);
            }
            let pi = probe.moved(&probe.base, &[i]);
            let delta1 = probe.f_base - obj.evaluate(&pi)?;
            for &j in &remaining {
                if probe.interacts_given(&[i], &[j], delta1)? {
                    group.push(j);
                }
            }
            Ok(group)
        })();
        match step {
            Ok(group) => {
                remaining.retain(|v| !group.contains(v));
                groups.push(group);
            }
            Err(e) if e.is_budget() => {
                remaining.insert(0, i);
                return Ok(finish(n, probe.base, groups, remaining, obj.fes_used() - start, true));
            }
            Err(e) => return Err(e),
        }
    }
    Ok(finish(n, probe.base, groups, Vec::new(), obj.fes_used() - start, false))
}

/// Variables of `others` interacting with `group`, found by recursive halving.
fn interact<F: Function>(probe: &Probe<'_, F>, group: &[usize], others: &[usize]) -> Result<Vec<usize>> {
    if !probe.interacts(group, others)? {
        return Ok(Vec::new());
    }
    if others.len() == 1 {
        return Ok(others.to_vec());
    }
    let (a, b) = others.split_at(others.len() / 2);
    let mut found = interact(probe, group, a)?;
    found.extend(interact(probe, group, b)?);
    Ok(found)
}

/// Recursive grouping: a growing group is tested against the whole rest at
/// once, and interacting halves are split until single variables remain.
pub fn rdg_decompose<F: Function>(obj: &CountingObjective<F>, cfg: &BaselineConfig) -> Result<Decomposition> {
    let n = obj.dim();
    let start = obj.fes_used();
    let probe = Probe::new(obj, cfg)?;
    let mut groups = Vec::new();
    if n == 0 {
        return Ok(finish(n, probe.base, groups, Vec::new(), obj.fes_used() - start, false));
    }
    let mut current = vec![0];
    let mut rest: Vec<usize> = (1..n).collect();
    while !rest.is_empty() {
        match interact(&probe, &current, &rest) {
            Ok(found) if found.is_empty() => {
                groups.push(std::mem::replace(&mut current, vec![rest.remove(0)]));
            }
            Ok(found) => {
                rest.retain(|v| !found.contains(v));
                current.extend(found);
            }
            Err(e) if e.is_budget() => {
                current.extend(rest);
                return Ok(finish(n, probe.base, groups, current, obj.fes_used() - start, true));
            }
            Err(e) => return Err(e),
        }
    }
    groups.push(current);
    Ok(finish(n, probe.base, groups, Vec::new(), obj.fes_used() - start, false))
}
