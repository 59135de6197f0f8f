use std::collections::VecDeque;

use crate::detection::{detect_sep_at, DetectionConfig, Target};
use crate::error::Result;
use crate::problems::{CountingObjective, Function};

/// Variables found to interact with a target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DbtgOutcome {
    pub interacting: Vec<usize>,
    pub detections: usize,
    pub fes: u64,
}

/// Split a node into two halves, the first taking the extra element.
pub fn halve(node: &[usize]) -> (&[usize], &[usize]) {
    node.split_at(node.len().div_ceil(2))
}

/// Binary-tree search for the variables of `subset` that interact with `t`.
///
/// A queue holds nodes known to interact with `t`. Each popped node is
/// halved; when the first half is separable the second half must contain an
/// interacting variable and is enqueued without being tested. `fes` includes
/// the boundary baseline of [`Target::locate`] when one is needed.
pub fn dbtg<F: Function>(
    obj: &CountingObjective<F>,
    cv: &[f64],
    cfg: &DetectionConfig,
    t: usize,
    subset: &[usize],
    x_star: f64,
    delta: f64,
) -> Result<DbtgOutcome> {
    dbtg_with(obj, cv, cfg, t, subset, x_star, delta, true)
}

/// [`dbtg`] with the deduction step optionally disabled, in which case the
/// second half of every split is tested as well.
#[allow(clippy::too_many_arguments)]
pub fn dbtg_with<F: Function>(
    obj: &CountingObjective<F>,
    cv: &[f64],
    cfg: &DetectionConfig,
    t: usize,
    subset: &[usize],
    x_star: f64,
    delta: f64,
    deduce: bool,
) -> Result<DbtgOutcome> {
    let (target, mut fes) = Target::locate(obj, cv, t, x_star, delta)?;
    let mut detections = 0usize;
    let mut detect = |nodes: &[usize]| -> Result<bool> {
        let (sep, used) = detect_sep_at(obj, cv, cfg, &target, nodes)?;
        detections += 1;
        fes += used;
        Ok(sep)
    };

    let mut interacting = Vec::new();
    let mut queue: VecDeque<Vec<usize>> = VecDeque::new();
    if !detect(subset)? {
        queue.push_back(subset.to_vec());
    }
    while let Some(node) = queue.pop_front() {
        if node.len() == 1 {
            interacting.push(node[0]);
            continue;
        }
        let (first, second) = halve(&node);
        let first_sep = detect(first)?;
        if !first_sep {
            queue.push_back(first.to_vec());
        }
        let second_sep = if first_sep && deduce { false } else { detect(second)? };
        if !second_sep {
            queue.push_back(second.to_vec());
        }
    }
    interacting.sort_unstable();
    Ok(DbtgOutcome { interacting, detections, fes })
}
