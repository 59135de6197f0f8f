//! Separability-detection criteria.
//!
//! * [`criterion1_separable`]: additive test, equal fitness differences.
//! * [`criterion2_separable`]: monotonicity test, same-sign fitness differences.
//! * [`detect_sep`]: optimum-persistence test. A target's located optimum
//!   must stay a local minimum at radius `delta` after the variables of a
//!   subset are moved to their perturbed values.

use crate::error::{Error, Result};
use crate::problems::{CountingObjective, Function};

/// Relative slack applied to the strict inequality of the persistence test.
pub const PERSISTENCE_SLACK: f64 = 1e-13;

/// Baseline and perturbed points shared by every detection in a run.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionConfig {
    /// Perturbed value of each variable.
    pub cv_prime: Vec<f64>,
    /// Threshold for the additive criterion.
    pub epsilon: f64,
}

impl DetectionConfig {
    /// `cv' = (lb + ub) / 2`.
    pub fn midpoint<F: Function>(obj: &CountingObjective<F>, epsilon: f64) -> Self {
        let cv_prime = obj
            .lower()
            .iter()
            .zip(obj.upper())
            .map(|(l, u)| 0.5 * (l + u))
            .collect();
        Self { cv_prime, epsilon }
    }
}

fn check_in_bounds<F: Function>(obj: &CountingObjective<F>, i: usize, v: f64) -> Result<()> {
    let (lo, hi) = (obj.lower()[i], obj.upper()[i]);
    if !(lo..=hi).contains(&v) {
        return Err(Error::Domain(format!("value {v} for variable {i} outside [{lo}, {hi}]")));
    }
    Ok(())
}

/// `f(cv ← xi_a, xj) − f(cv ← xi_b, xj)`; two evaluations.
pub fn delta_fitness<F: Function>(
    obj: &CountingObjective<F>,
    cv: &[f64],
    i: usize,
    xi_a: f64,
    xi_b: f64,
    j: usize,
    xj: f64,
) -> Result<f64> {
    if i == j {
        return Err(Error::Domain("delta_fitness needs two distinct variables".into()));
    }
    for (k, v) in [(i, xi_a), (i, xi_b), (j, xj)] {
        check_in_bounds(obj, k, v)?;
    }
    let mut p = cv.to_vec();
    p[j] = xj;
    p[i] = xi_a;
    let fa = obj.evaluate(&p)?;
    p[i] = xi_b;
    let fb = obj.evaluate(&p)?;
    Ok(fa - fb)
}

#[allow(clippy::too_many_arguments)]
fn paired_deltas<F: Function>(
    obj: &CountingObjective<F>,
    cv: &[f64],
    i: usize,
    j: usize,
    xi_a: f64,
    xi_b: f64,
    xj_a: f64,
    xj_b: f64,
) -> Result<(f64, f64)> {
    if xi_a == xi_b || xj_a == xj_b {
        return Err(Error::Domain("probe values must differ".into()));
    }
    let d1 = delta_fitness(obj, cv, i, xi_a, xi_b, j, xj_a)?;
    let d2 = delta_fitness(obj, cv, i, xi_a, xi_b, j, xj_b)?;
    Ok((d1, d2))
}

/// Additive separability: `|Δ(·|xj_a) − Δ(·|xj_b)| < ε`; four evaluations.
#[allow(clippy::too_many_arguments)]
pub fn criterion1_separable<F: Function>(
    obj: &CountingObjective<F>,
    cv: &[f64],
    cfg: &DetectionConfig,
    i: usize,
    j: usize,
    xi_a: f64,
    xi_b: f64,
    xj_a: f64,
    xj_b: f64,
) -> Result<bool> {
    let (d1, d2) = paired_deltas(obj, cv, i, j, xi_a, xi_b, xj_a, xj_b)?;
    Ok((d1 - d2).abs() < cfg.epsilon)
}

/// Monotonicity separability: `Δ(·|xj_a) · Δ(·|xj_b) > 0`; four evaluations.
#[allow(clippy::too_many_arguments)]
pub fn criterion2_separable<F: Function>(
    obj: &CountingObjective<F>,
    cv: &[f64],
    i: usize,
    j: usize,
    xi_a: f64,
    xi_b: f64,
    xj_a: f64,
    xj_b: f64,
) -> Result<bool> {
    let (d1, d2) = paired_deltas(obj, cv, i, j, xi_a, xi_b, xj_a, xj_b)?;
    Ok(d1 * d2 > 0.0)
}

/// The three abscissae probed around `x_star`: left, centre, right.
///
/// `delta` is shrunk to fit inside the bounds (never below `1e-9` of the
/// range). An optimum sitting on a bound is probed one-sidedly at `delta`
/// and `2 delta` into the feasible side.
pub fn probe_points(x_star: f64, delta: f64, lo: f64, hi: f64) -> [f64; 3] {
    let floor = 1e-9 * (hi - lo);
    let (room_lo, room_hi) = (x_star - lo, hi - x_star);
    if room_lo.min(room_hi) >= floor {
        let d = delta.min(room_lo).min(room_hi).max(floor);
        [x_star - d, x_star, x_star + d]
    } else if room_hi >= room_lo {
        let d = delta.min(0.5 * room_hi).max(floor.min(0.5 * room_hi));
        [x_star + 2.0 * d, x_star, x_star + d]
    } else {
        let d = delta.min(0.5 * room_lo).max(floor.min(0.5 * room_lo));
        [x_star - d, x_star, x_star - 2.0 * d]
    }
}

/// Judge the three probe values: separable when the centre is strictly the
/// best beyond roundoff slack, or when all three are equal within it.
pub fn persists(f1: f64, f2: f64, f3: f64) -> bool {
    let slack = PERSISTENCE_SLACK * (1.0 + f2.abs());
    if f2 < f1.min(f3) - slack {
        return true;
    }
    (f1 - f2).abs() <= slack && (f3 - f2).abs() <= slack
}

/// Probe step, as a fraction of the range, for optima on a bound.
pub const BOUNDARY_STEP: f64 = 0.01;

/// A target variable with its located optimum, ready for repeated tests.
///
/// When the optimum lies within `delta` of a bound the persistence test is
/// blind: the bound stays optimal under any perturbation that leaves the
/// slice decreasing toward it. Such targets are probed one-sidedly at
/// [`BOUNDARY_STEP`] and judged by whether the two fitness differences from
/// the bound change, against a baseline measured at `cv`.
#[derive(Debug, Clone, PartialEq)]
pub struct Target {
    pub index: usize,
    pub x_star: f64,
    pub delta: f64,
    probes: [f64; 3],
    /// Differences from the bound and the bound's value, at `cv`.
    baseline: Option<[f64; 3]>,
}

impl Target {
    /// Fix the probes for `t`; costs three evaluations for a boundary optimum.
    pub fn locate<F: Function>(
        obj: &CountingObjective<F>,
        cv: &[f64],
        t: usize,
        x_star: f64,
        delta: f64,
    ) -> Result<(Self, u64)> {
        if t >= obj.dim() || cv.len() != obj.dim() {
            return Err(Error::Domain(format!("target {t} or context vector does not fit n = {}", obj.dim())));
        }
        let (lo, hi) = (obj.lower()[t], obj.upper()[t]);
        check_in_bounds(obj, t, x_star)?;
        if (x_star - lo).min(hi - x_star) >= delta {
            let probes = probe_points(x_star, delta, lo, hi);
            return Ok((Self { index: t, x_star, delta, probes, baseline: None }, 0));
        }
        let inward = if hi - x_star >= x_star - lo { 1.0 } else { -1.0 };
        let room = (hi - x_star).max(x_star - lo);
        let d = (BOUNDARY_STEP * (hi - lo)).min(0.5 * room);
        let probes = [x_star + inward * d, x_star, x_star + 2.0 * inward * d];
        let v = obj.evaluate_all(&with_target(cv, t, &probes))?;
        let baseline = Some([v[0] - v[1], v[2] - v[1], v[1]]);
        Ok((Self { index: t, x_star, delta, probes, baseline }, 3))
    }

    pub fn on_boundary(&self) -> bool {
        self.baseline.is_some()
    }

    pub fn probes(&self) -> [f64; 3] {
        self.probes
    }

    fn judge(&self, v: &[f64]) -> bool {
        match self.baseline {
            None => persists(v[0], v[1], v[2]),
            Some([b1, b3, fb]) => {
                let tol = PERSISTENCE_SLACK * (1.0 + v[1].abs() + fb.abs());
                ((v[0] - v[1]) - b1).abs() <= tol && ((v[2] - v[1]) - b3).abs() <= tol
            }
        }
    }
}

fn with_target(s: &[f64], t: usize, xs: &[f64]) -> Vec<Vec<f64>> {
    xs.iter()
        .map(|&x| {
            let mut p = s.to_vec();
            p[t] = x;
            p
        })
        .collect()
}

/// Optimum-persistence test of target `t` against the subset `subset`.
///
/// Moves every variable of `subset` from `cv` to `cv'`, then checks that
/// `x_star` still beats `x_star ± delta`. Three evaluations, plus three for
/// the baseline when the optimum is on a bound (see [`Target`]).
pub fn detect_sep<F: Function>(
    obj: &CountingObjective<F>,
    cv: &[f64],
    cfg: &DetectionConfig,
    t: usize,
    subset: &[usize],
    x_star: f64,
    delta: f64,
) -> Result<(bool, u64)> {
    validate_subset(t, subset)?;
    let (target, setup) = Target::locate(obj, cv, t, x_star, delta)?;
    let (sep, fes) = detect_sep_at(obj, cv, cfg, &target, subset)?;
    Ok((sep, setup + fes))
}

fn validate_subset(t: usize, subset: &[usize]) -> Result<()> {
    if subset.is_empty() {
        return Err(Error::Domain("detection subset is empty".into()));
    }
    if subset.contains(&t) {
        return Err(Error::Domain(format!("target {t} is inside the detection subset")));
    }
    Ok(())
}

/// [`detect_sep`] for a prepared target; always three evaluations.
pub fn detect_sep_at<F: Function>(
    obj: &CountingObjective<F>,
    cv: &[f64],
    cfg: &DetectionConfig,
    target: &Target,
    subset: &[usize],
) -> Result<(bool, u64)> {
    validate_subset(target.index, subset)?;
    let mut s = cv.to_vec();
    for &u in subset {
        s[u] = cfg.cv_prime[u];
    }
    let v = obj.evaluate_all(&with_target(&s, target.index, &target.probes))?;
    Ok((target.judge(&v), 3))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::FnFunction;

    fn sphere2() -> CountingObjective<FnFunction<impl Fn(&[f64]) -> f64 + Sync>> {
        CountingObjective::new(FnFunction::uniform(2, -2.0, 2.0, |x: &[f64]| x[0] * x[0] + x[1] * x[1]))
    }

    fn ridge2() -> CountingObjective<FnFunction<impl Fn(&[f64]) -> f64 + Sync>> {
        CountingObjective::new(FnFunction::uniform(2, -2.0, 2.0, |x: &[f64]| {
            (x[0] * x[0] + x[1] * x[1]).sqrt()
        }))
    }

    fn cfg(n: usize, eps: f64) -> DetectionConfig {
        DetectionConfig { cv_prime: vec![1.0; n], epsilon: eps }
    }

    #[test]
    fn delta_fitness_examples() {
        let obj = sphere2();
        let cv = [0.0, 0.0];
        assert_eq!(delta_fitness(&obj, &cv, 0, 0.0, 1.0, 1, 0.0).unwrap(), -1.0);
        assert_eq!(delta_fitness(&obj, &cv, 0, 0.0, 1.0, 1, 1.0).unwrap(), -1.0);
        assert_eq!(obj.fes_used(), 4);

        let obj = ridge2();
        assert_eq!(delta_fitness(&obj, &cv, 0, 0.0, 1.0, 1, 0.0).unwrap(), -1.0);
        let d = delta_fitness(&obj, &cv, 0, 0.0, 1.0, 1, 1.0).unwrap();
        assert!((d - (1.0 - 2f64.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn delta_fitness_rejects_out_of_bounds() {
        let obj = sphere2();
        assert!(matches!(
            delta_fitness(&obj, &[0.0, 0.0], 0, 3.0, 1.0, 1, 0.0),
            Err(Error::Domain(_))
        ));
        assert!(delta_fitness(&obj, &[0.0, 0.0], 0, 0.0, 1.0, 0, 0.0).is_err());
        assert_eq!(obj.fes_used(), 0);
    }

    #[test]
    fn criterion1_examples() {
        let cv = [0.0, 0.0];
        let obj = sphere2();
        assert!(criterion1_separable(&obj, &cv, &cfg(2, 1e-10), 0, 1, -0.3, 1.7, 0.2, -1.1).unwrap());
        assert_eq!(obj.fes_used(), 4);
        let obj = ridge2();
        assert!(!criterion1_separable(&obj, &cv, &cfg(2, 1e-10), 0, 1, 0.0, 1.0, 0.0, 1.0).unwrap());
        let schwefel = CountingObjective::new(FnFunction::uniform(2, -2.0, 2.0, |x: &[f64]| {
            x[0] * x[0] + (x[0] + x[1]).powi(2)
        }));
        // Δ(0,1|0) = 0 - 2 = -2, Δ(0,1|1) = 1 - 5 = -4
        assert!(!criterion1_separable(&schwefel, &cv, &cfg(2, 1e-10), 0, 1, 0.0, 1.0, 0.0, 1.0).unwrap());
    }

    #[test]
    fn criterion2_examples() {
        let cv = [0.0, 0.0];
        assert!(criterion2_separable(&ridge2(), &cv, 0, 1, 0.0, 1.0, 0.0, 1.0).unwrap());
        assert!(criterion2_separable(&sphere2(), &cv, 0, 1, 0.0, 1.0, 0.0, 1.0).unwrap());
    }

    #[test]
    fn probe_points_respect_bounds() {
        assert_eq!(probe_points(0.0, 0.1, -1.0, 1.0), [-0.1, 0.0, 0.1]);
        assert_eq!(probe_points(0.95, 0.1, -1.0, 1.0)[2], 1.0);
        let p = probe_points(-1.0, 0.1, -1.0, 1.0);
        assert_eq!(p[1], -1.0);
        assert!(p[0] > -1.0 && p[2] > -1.0);
        let p = probe_points(1.0, 0.1, -1.0, 1.0);
        assert!(p[0] < 1.0 && p[2] < 1.0);
    }

    #[test]
    fn persistence_rule() {
        assert!(persists(2.0, 1.0, 3.0));
        assert!(!persists(0.5, 1.0, 3.0));
        assert!(persists(1.0, 1.0, 1.0));
        assert!(!persists(1.0, 1.0, 3.0));
    }

    #[test]
    fn sphere_persistence_with_exact_optimum() {
        let o = [0.5, -1.0, 0.25, 1.5];
        let obj = CountingObjective::new(FnFunction::uniform(4, -2.0, 2.0, move |x: &[f64]| {
            x.iter().zip(o).map(|(a, b)| (a - b) * (a - b)).sum()
        }));
        let cv = vec![-2.0; 4];
        let cfg = DetectionConfig::midpoint(&obj, 0.0);
        assert_eq!(detect_sep(&obj, &cv, &cfg, 0, &[1, 2, 3], 0.5, 1e-3).unwrap(), (true, 3));
        assert_eq!(obj.fes_used(), 3);
    }

    #[test]
    fn five_variable_function() {
        let f = |x: &[f64]| {
            (x[0] - x[4]).powi(2) + (x[0] - 1.0).powi(2) + x[1] * x[1] + x[2] * x[2] + x[3] * x[3]
        };
        let obj = CountingObjective::new(FnFunction::uniform(5, -4.0, 4.0, f));
        let cv = vec![-4.0; 5];
        let cfg = DetectionConfig::midpoint(&obj, 0.0);
        // x1 optimum given x5 = -4: minimise (x1 + 4)^2 + (x1 - 1)^2 → x1 = -1.5
        let x_star = -1.5;
        assert_eq!(detect_sep(&obj, &cv, &cfg, 0, &[3, 4], x_star, 1e-3).unwrap(), (false, 3));
        assert_eq!(detect_sep(&obj, &cv, &cfg, 0, &[1, 2], x_star, 1e-3).unwrap(), (true, 3));
    }

    #[test]
    fn detect_sep_validates_subset() {
        let obj = sphere2();
        let c = cfg(2, 0.0);
        assert!(detect_sep(&obj, &[0.0, 0.0], &c, 0, &[], 0.0, 0.1).is_err());
        assert!(detect_sep(&obj, &[0.0, 0.0], &c, 0, &[0], 0.0, 0.1).is_err());
    }

    #[test]
    fn ridge_separates_criteria() {
        let cv = [0.0, 0.0];
        let obj = ridge2();
        assert!(!criterion1_separable(&obj, &cv, &cfg(2, 1e-10), 0, 1, 0.0, 1.0, 0.0, 1.0).unwrap());
        let c = DetectionConfig { cv_prime: vec![1.0, 1.0], epsilon: 1e-10 };
        assert!(detect_sep(&obj, &[0.0, 0.0], &c, 0, &[1], 0.0, 1e-3).unwrap().0);
    }
}
