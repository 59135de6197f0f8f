use crate::error::Result;

/// Outcome of a one-dimensional local refinement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefineOutcome {
    pub x: f64,
    /// Slice value at `x` (NaN when the refinement aborted on a non-finite value).
    pub fx: f64,
    /// Length of the last accepted step, floored at `1e-6 * (hi - lo)`.
    pub last_step: f64,
    pub fes: u64,
    pub iterations: usize,
}

/// Tuning knobs for [`local_refine`]; all lengths are fractions of `hi - lo`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefineSettings {
    pub max_iterations: usize,
    pub step_tolerance: f64,
    pub step_floor: f64,
    pub stencil: f64,
    pub max_backtracks: usize,
    pub max_fes: u64,
}

impl Default for RefineSettings {
    fn default() -> Self {
        Self {
            max_iterations: 20,
            step_tolerance: 1e-8,
            step_floor: 1e-6,
            stencil: 2e-3,
            max_backtracks: 6,
            max_fes: 60,
        }
    }
}

/// Relative roundoff assumed in slice values.
const NOISE_REL: f64 = 4.0 * f64::EPSILON;
/// Second differences of the stencil must exceed the roundoff by this factor.
const SIGNAL_RATIO: f64 = 1e6;

fn noise(f: f64) -> f64 {
    NOISE_REL * (1.0 + f.abs())
}

/// Stencil half-width after a step of length `last`: shrinks with the step
/// to keep the difference quotients accurate on rugged slices, but never so
/// far that the curvature signal drops toward the roundoff `eta`.
fn adaptive_stencil(h0: f64, last: f64, curvature: f64, eta: f64, range: f64) -> f64 {
    let h_noise = if curvature > 0.0 { (SIGNAL_RATIO * eta / curvature).sqrt() } else { h0 };
    (4.0 * last).min(h0).max(h_noise).min(0.05 * range)
}

/// Derivative and curvature at `x` of the parabola through three samples.
fn parabola_slope(pts: [(f64, f64); 3], x: f64) -> (f64, f64) {
    let [(a, fa), (b, fb), (c, fc)] = pts;
    let d1 = (fb - fa) / (b - a);
    let d2 = (fc - fb) / (c - b);
    let second = 2.0 * (d2 - d1) / (c - a);
    (d1 + 0.5 * second * (2.0 * x - a - b), second)
}

struct Slice<'a, F> {
    f: &'a mut F,
    fes: u64,
    max_fes: u64,
}

impl<F: FnMut(f64) -> Result<f64>> Slice<'_, F> {
    fn can_spend(&self, k: u64) -> bool {
        self.fes + k <= self.max_fes
    }

    fn eval(&mut self, x: f64) -> Result<f64> {
        self.fes += 1;
        (self.f)(x)
    }

    /// Central-difference slope and curvature at `x`, one-sided at a bound.
    fn slope(&mut self, x: f64, fx: f64, h: f64, lo: f64, hi: f64) -> Result<Option<(f64, f64)>> {
        let left = (x - lo).min(h);
        let right = (hi - x).min(h);
        let pts = if left > 0.0 && right > 0.0 {
            let fl = self.eval(x - left)?;
            let fr = self.eval(x + right)?;
            [(x - left, fl), (x, fx), (x + right, fr)]
        } else if right > 0.0 {
            let step = right.min(0.5 * (hi - x));
            let f1 = self.eval(x + step)?;
            let f2 = self.eval(x + 2.0 * step)?;
            [(x, fx), (x + step, f1), (x + 2.0 * step, f2)]
        } else {
            let step = left.min(0.5 * (x - lo));
            let f1 = self.eval(x - step)?;
            let f2 = self.eval(x - 2.0 * step)?;
            [(x - 2.0 * step, f2), (x - step, f1), (x, fx)]
        };
        if pts.iter().any(|p| !p.1.is_finite()) {
            return Ok(None);
        }
        Ok(Some(parabola_slope(pts, x)))
    }
}

/// One-dimensional quasi-Newton descent on `slice` over `[lo, hi]`.
///
/// Slopes come from a three-point stencil; curvature is the secant of
/// successive slopes (the one-dimensional BFGS update), falling back to the
/// stencil curvature and then to step doubling when the secant is not
/// positive. Steps are accepted under an Armijo condition with halving
/// backtracking. Stops when the proposed step falls below
/// `step_tolerance * (hi - lo)`, after `max_iterations` accepted steps, or
/// when the evaluation allowance is spent.
pub fn local_refine<F>(slice: &mut F, x0: f64, lo: f64, hi: f64) -> Result<RefineOutcome>
where
    F: FnMut(f64) -> Result<f64>,
{
    local_refine_with(slice, x0, lo, hi, RefineSettings::default())
}

pub fn local_refine_with<F>(
    slice: &mut F,
    x0: f64,
    lo: f64,
    hi: f64,
    settings: RefineSettings,
) -> Result<RefineOutcome>
where
    F: FnMut(f64) -> Result<f64>,
{
    let range = hi - lo;
    let tol = settings.step_tolerance * range;
    let floor = (settings.step_floor * range).max(f64::MIN_POSITIVE);
    let h = settings.stencil * range;
    let x0 = x0.clamp(lo, hi);
    let mut s = Slice { f: slice, fes: 0, max_fes: settings.max_fes };

    let abort = |fes| RefineOutcome { x: x0, fx: f64::NAN, last_step: floor, fes, iterations: 0 };

    let mut x = x0;
    let mut fx = s.eval(x)?;
    if !fx.is_finite() {
        return Ok(abort(s.fes));
    }
    if !(range > 0.0) {
        return Ok(RefineOutcome { x, fx, last_step: floor, fes: s.fes, iterations: 0 });
    }
    let Some((mut g, c)) = s.slope(x, fx, h, lo, hi)? else {
        return Ok(abort(s.fes));
    };
    let mut curvature = if c > 0.0 { c } else { g.abs() / (0.05 * range) };
    let mut last_step = 0.0f64;
    let mut iterations = 0;

    while iterations < settings.max_iterations {
        if !(curvature > 0.0) || !curvature.is_finite() {
            break;
        }
        let target = (x - g / curvature).clamp(lo, hi);
        let mut step = target - x;
        if step.abs() < tol {
            // Converged; the last Newton step is still worth one evaluation.
            if step != 0.0 && s.can_spend(1) {
                let fxn = s.eval(target)?;
                if fxn <= fx {
                    (x, fx) = (target, fxn);
                }
            }
            break;
        }
        // Steps whose predicted gain is below roundoff are accepted on a
        // tie; comparing such values carries no information.
        let slack = noise(fx);
        let mut accepted = None;
        for _ in 0..=settings.max_backtracks {
            if step.abs() < tol || !s.can_spend(1) {
                break;
            }
            let xn = x + step;
            let fxn = s.eval(xn)?;
            if !fxn.is_finite() {
                return Ok(abort(s.fes));
            }
            if fxn < fx && fxn <= fx + 1e-4 * g * step || fxn <= fx && -0.5 * g * step <= slack {
                accepted = Some((xn, fxn));
                break;
            }
            step *= 0.5;
        }
        let Some((xn, fxn)) = accepted else { break };
        iterations += 1;
        last_step = step.abs();
        let prev = (x, g);
        x = xn;
        fx = fxn;
        if !s.can_spend(2) {
            break;
        }
        let hk = adaptive_stencil(h, last_step, curvature, noise(fx), range);
        let Some((gn, cn)) = s.slope(x, fx, hk, lo, hi)? else {
            return Ok(abort(s.fes));
        };
        g = gn;
        let secant = (g - prev.1) / (x - prev.0);
        curvature = if cn > 0.0 && hk < h {
            cn
        } else if secant > 0.0 {
            secant
        } else if cn > 0.0 {
            cn
        } else {
            0.5 * curvature
        };
    }

    Ok(RefineOutcome { x, fx, last_step: last_step.max(floor), fes: s.fes, iterations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn run(f: impl Fn(f64) -> f64, x0: f64, lo: f64, hi: f64) -> RefineOutcome {
        let mut calls = 0u64;
        let mut slice = |x: f64| {
            calls += 1;
            Ok(f(x))
        };
        let out = local_refine(&mut slice, x0, lo, hi).unwrap();
        assert_eq!(out.fes, calls);
        out
    }

    #[test]
    fn quadratic_slice_converges() {
        let out = run(|x| (x - 3.0) * (x - 3.0), 2.9, 0.0, 10.0);
        assert!((out.x - 3.0).abs() < 1e-6, "{out:?}");
        assert!(out.last_step >= 1e-5);
        assert!(out.fes <= 60);
    }

    #[test]
    fn stationary_start_accepts_nothing() {
        let out = run(|x| (x - 3.0) * (x - 3.0), 3.0, 0.0, 10.0);
        assert_eq!(out.iterations, 0);
        assert_eq!(out.x, 3.0);
        assert_eq!(out.last_step, 1e-6 * 10.0);
        assert_eq!(out.fes, 3);
    }

    #[test]
    fn monotone_slice_runs_to_bound() {
        let out = run(|x| x, 0.5, 0.0, 1.0);
        assert_eq!(out.x, 0.0);
        assert!(out.last_step > 0.0);
    }

    #[test]
    fn non_finite_aborts_at_start() {
        let out = run(|x| if x > 0.55 { f64::NAN } else { (x - 1.0).powi(2) }, 0.5, 0.0, 1.0);
        assert_eq!(out.x, 0.5);
        assert_eq!(out.last_step, 1e-6);
        let out = run(|_| f64::INFINITY, 0.5, 0.0, 1.0);
        assert_eq!((out.x, out.fes), (0.5, 1));
    }

    #[test]
    fn budget_errors_propagate() {
        let mut n = 0;
        let mut slice = |x: f64| {
            n += 1;
            if n > 4 {
                Err(Error::BudgetExhausted { fes_used: 4 })
            } else {
                Ok(x * x)
            }
        };
        assert!(local_refine(&mut slice, 0.7, -1.0, 1.0).unwrap_err().is_budget());
    }

    #[test]
    fn rastrigin_basin() {
        use std::f64::consts::PI;
        let o = 1.234;
        let f = |x: f64| {
            let z = x - o;
            z * z - 10.0 * (2.0 * PI * z).cos() + 10.0
        };
        let out = run(f, o + 0.05, -5.0, 5.0);
        assert!((out.x - o).abs() < 1e-7, "{out:?}");
    }
}
