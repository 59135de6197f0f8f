use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::dbtg::dbtg_with;
use super::decomposition::{Decomposition, SeparableVar};
use crate::detection::DetectionConfig;
use crate::error::Result;
use crate::problems::{CountingObjective, Function};
use crate::surrogate::{tlpr_traced, SampleTrace};

/// How the next target is taken from the undetected set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TargetOrder {
    #[default]
    Random,
    Lowest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SvgConfig {
    pub seed: u64,
    pub order: TargetOrder,
    /// Skip the second child's detection when the first child is separable.
    pub deduce: bool,
}

impl Default for SvgConfig {
    fn default() -> Self {
        Self { seed: 0, order: TargetOrder::Random, deduce: true }
    }
}

impl SvgConfig {
    pub fn seeded(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }
}

/// Decompose `obj` by locating each target's optimum and grouping the
/// variables whose perturbation moves it.
pub fn svg_decompose<F: Function>(obj: &CountingObjective<F>, cfg: &SvgConfig) -> Result<Decomposition> {
    svg_decompose_traced(obj, cfg, None)
}

/// [`svg_decompose`] that also records every surrogate sample.
pub fn svg_decompose_traced<F: Function>(
    obj: &CountingObjective<F>,
    cfg: &SvgConfig,
    mut trace: Option<&mut Vec<SampleTrace>>,
) -> Result<Decomposition> {
    let n = obj.dim();
    let start = obj.fes_used();
    let detection = DetectionConfig::midpoint(obj, 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut cv = obj.lower().to_vec();
    let mut undetected: Vec<usize> = (0..n).collect();
    let mut seps = Vec::new();
    let mut nonseps = Vec::new();

    while !undetected.is_empty() {
        let k = match cfg.order {
            TargetOrder::Random => rng.random_range(0..undetected.len()),
            TargetOrder::Lowest => 0,
        };
        let t = undetected.remove(k);
        let located = match tlpr_traced(obj, t, &cv, trace.as_deref_mut()) {
            Ok(r) => r,
            Err(e) if e.is_budget() => {
                undetected.insert(k, t);
                return Ok(pooled(n, seps, nonseps, cv, &undetected, None, obj.fes_used() - start));
            }
            Err(e) => return Err(e),
        };
        cv[t] = located.x_star;
        if undetected.is_empty() {
            seps.push(SeparableVar { index: t, optimum: Some(located.x_star) });
            break;
        }
        let found = dbtg_with(
            obj,
            &cv,
            &detection,
            t,
            &undetected,
            located.x_star,
            located.delta,
            cfg.deduce,
        );
        let found = match found {
            Ok(f) => f,
            Err(e) if e.is_budget() => {
                undetected.insert(k, t);
                let lone = (t, located.x_star);
                return Ok(pooled(n, seps, nonseps, cv, &undetected, Some(lone), obj.fes_used() - start));
            }
            Err(e) => return Err(e),
        };
        if found.interacting.is_empty() {
            seps.push(SeparableVar { index: t, optimum: Some(located.x_star) });
        } else {
            undetected.retain(|v| found.interacting.binary_search(v).is_err());
            let mut group = found.interacting;
            group.push(t);
            group.sort_unstable();
            nonseps.push(group);
        }
    }

    Ok(Decomposition { n, seps, nonseps, cv, fes_used: obj.fes_used() - start, exhausted: false })
}

/// Close out a run whose budget ran out: the unresolved variables form one
/// group, or a separable entry when only one is left.
fn pooled(
    n: usize,
    mut seps: Vec<SeparableVar>,
    mut nonseps: Vec<Vec<usize>>,
    cv: Vec<f64>,
    unresolved: &[usize],
    located: Option<(usize, f64)>,
    fes_used: u64,
) -> Decomposition {
    match unresolved {
        [] => {}
        [v] => {
            let optimum = located.filter(|(t, _)| t == v).map(|(_, x)| x);
            seps.push(SeparableVar { index: *v, optimum });
        }
        _ => {
            let mut group = unresolved.to_vec();
            group.sort_unstable();
            nonseps.push(group);
        }
    }
    Decomposition { n, seps, nonseps, cv, fes_used, exhausted: true }
}
