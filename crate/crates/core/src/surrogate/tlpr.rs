use serde::Serialize;

use super::poly::{fit_poly, poly_minimum};
use super::refine::local_refine;
use crate::detection::PERSISTENCE_SLACK;
use crate::error::Result;
use crate::problems::{CountingObjective, Function};

/// Samples per regression layer.
pub const LAYER_SAMPLES: usize = 100;
/// Trust-region width as a fraction of the variable's range.
pub const TRUST_FRACTION: f64 = 0.1;
/// Samples per second-layer window (the minimum for a quintic fit).
pub const WINDOW: usize = 6;

/// Located optimum of one variable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TlprResult {
    pub x_star: f64,
    pub delta: f64,
    pub fes_used: u64,
}

/// One evaluated sample, kept for debugging dumps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleTrace {
    pub variable: usize,
    pub x: f64,
    pub y: f64,
    pub layer: u8,
    /// Second-layer window index; `None` for the first layer.
    pub window: Option<usize>,
}

/// `count` evenly spaced points covering `[lo, hi]`, endpoints included.
pub fn grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let step = (hi - lo) / (count - 1) as f64;
    (0..count)
        .map(|i| if i + 1 == count { hi } else { lo + step * i as f64 })
        .collect()
}

/// Start index of each second-layer window: consecutive blocks of six, with
/// the tail handled by one last window over the final six samples.
pub fn window_starts(samples: usize) -> Vec<usize> {
    let mut starts: Vec<usize> = (0..samples / WINDOW).map(|w| w * WINDOW).collect();
    if !samples.is_multiple_of(WINDOW) {
        starts.push(samples - WINDOW);
    }
    starts
}

fn index_of_min(ys: &[f64]) -> usize {
    let mut best = 0;
    for (i, y) in ys.iter().enumerate() {
        if *y < ys[best] {
            best = i;
        }
    }
    best
}

/// Trust region of width `TRUST_FRACTION * range` around `center`, shifted
/// to lie inside `[lo, hi]`.
pub fn trust_region(center: f64, lo: f64, hi: f64) -> (f64, f64) {
    let width = TRUST_FRACTION * (hi - lo);
    let a = (center - 0.5 * width).clamp(lo, hi - width);
    (a, (a + width).min(hi))
}

/// Locate the optimum of variable `t` with every other variable fixed at `cv`.
pub fn tlpr<F: Function>(obj: &CountingObjective<F>, t: usize, cv: &[f64]) -> Result<TlprResult> {
    tlpr_traced(obj, t, cv, None)
}

/// [`tlpr`] that also records every sample it evaluates.
pub fn tlpr_traced<F: Function>(
    obj: &CountingObjective<F>,
    t: usize,
    cv: &[f64],
    mut trace: Option<&mut Vec<SampleTrace>>,
) -> Result<TlprResult> {
    let start = obj.fes_used();
    let (lo, hi) = (obj.lower()[t], obj.upper()[t]);
    let with = |x: f64| {
        let mut p = cv.to_vec();
        p[t] = x;
        p
    };

    // Layer 1: global quadratic over the whole range.
    let xs1 = grid(lo, hi, LAYER_SAMPLES);
    let ys1 = obj.evaluate_all(&xs1.iter().map(|&x| with(x)).collect::<Vec<_>>())?;
    let center = match fit_poly(&xs1, &ys1, 2) {
        Ok(model) if is_convex(model.local_coefficients()) => poly_minimum(&model, lo, hi),
        _ => xs1[index_of_min(&ys1)],
    };
    let (a, b) = trust_region(center, lo, hi);

    // Layer 2: piecewise quintics over the trust region.
    let xs2 = grid(a, b, LAYER_SAMPLES);
    let ys2 = obj.evaluate_all(&xs2.iter().map(|&x| with(x)).collect::<Vec<_>>())?;

    let mut best: Option<(f64, f64)> = None;
    for (w, &s) in window_starts(LAYER_SAMPLES).iter().enumerate() {
        let (wx, wy) = (&xs2[s..s + WINDOW], &ys2[s..s + WINDOW]);
        let Ok(model) = fit_poly(wx, wy, 5) else { continue };
        let cand = poly_minimum(&model, wx[0], wx[WINDOW - 1]);
        // Score against the nearest evaluated sample so windows are compared
        // on true fitness, corrected by the model's local slope.
        let near = (0..WINDOW)
            .min_by(|&i, &j| (wx[i] - cand).abs().total_cmp(&(wx[j] - cand).abs()))
            .unwrap();
        let score = wy[near] + model.eval(cand) - model.eval(wx[near]);
        if best.is_none_or(|(_, s)| score < s) {
            best = Some((cand, score));
        }
        if let Some(tr) = trace.as_deref_mut() {
            tr.extend(wx.iter().zip(wy).map(|(&x, &y)| SampleTrace {
                variable: t,
                x,
                y,
                layer: 2,
                window: Some(w),
            }));
        }
    }
    let candidate = best.map_or_else(|| xs2[index_of_min(&ys2)], |(x, _)| x);
    if let Some(tr) = trace {
        tr.extend(xs1.iter().zip(&ys1).map(|(&x, &y)| SampleTrace {
            variable: t,
            x,
            y,
            layer: 1,
            window: None,
        }));
    }

    let mut slice = |x| obj.evaluate(&with(x));
    let refined = local_refine(&mut slice, candidate, lo, hi)?;
    let delta = refined.last_step.max(DELTA_FLOOR * (hi - lo));
    let (x_star, delta) = if refined.fx.is_finite() {
        polish(&mut slice, refined.x, refined.fx, delta, lo, hi)?
    } else {
        (refined.x, delta)
    };
    Ok(TlprResult { x_star, delta, fes_used: obj.fes_used() - start })
}

/// Smallest persistence radius, as a fraction of the range. A local optimum
/// taken for the global one drifts slightly when other variables move even
/// on a separable slice; the radius must absorb that drift.
pub const DELTA_FLOOR: f64 = 2e-4;
/// Moves and widenings allowed while polishing a refined optimum.
const POLISH_MOVES: usize = 24;
/// Largest radius polishing may widen to, as a fraction of the range.
pub const POLISH_CAP: f64 = 0.01;

/// Make `x` a decisive `delta`-local minimum of the slice, as the
/// persistence test assumes. Steps to a better neighbour; doubles `delta`
/// while the neighbours tie with `x` within roundoff, so the test can see a
/// moved optimum. Optima within `delta` of a bound are left alone; detection
/// probes those one-sidedly.
fn polish<S>(slice: &mut S, mut x: f64, mut fx: f64, mut delta: f64, lo: f64, hi: f64) -> Result<(f64, f64)>
where
    S: FnMut(f64) -> Result<f64>,
{
    let cap = POLISH_CAP * (hi - lo);
    for _ in 0..POLISH_MOVES {
        if (x - lo).min(hi - x) < delta {
            break;
        }
        let (fl, fr) = (slice(x - delta)?, slice(x + delta)?);
        if !(fl.is_finite() && fr.is_finite()) {
            break;
        }
        let slack = PERSISTENCE_SLACK * (1.0 + fx.abs());
        if fx < fl.min(fr) - slack {
            break;
        }
        if fl < fx - slack || fr < fx - slack {
            (x, fx) = if fl < fr { (x - delta, fl) } else { (x + delta, fr) };
        } else if 2.0 * delta <= cap {
            delta *= 2.0;
        } else {
            break;
        }
    }
    Ok((x, delta))
}

/// A quadratic fit usable as a trust-region center: clearly convex in the
/// fitting basis rather than concave or numerically linear.
fn is_convex(ascending: &[f64]) -> bool {
    let size: f64 = ascending.iter().map(|c| c.abs()).sum();
    ascending[2] > 1e-9 * size
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{build_problem, FnFunction};

    #[test]
    fn windows_cover_all_samples() {
        let starts = window_starts(100);
        assert_eq!(starts.len(), 17);
        assert_eq!(starts[15], 90);
        assert_eq!(starts[16], 94);
        let mut covered = vec![false; 100];
        for s in starts {
            covered[s..s + WINDOW].iter_mut().for_each(|c| *c = true);
        }
        assert!(covered.into_iter().all(|c| c));
    }

    #[test]
    fn grid_hits_endpoints() {
        let g = grid(-5.0, 5.0, 100);
        assert_eq!((g[0], g[99], g.len()), (-5.0, 5.0, 100));
    }

    #[test]
    fn trust_region_inside_bounds() {
        assert_eq!(trust_region(0.0, -100.0, 100.0), (-10.0, 10.0));
        assert_eq!(trust_region(99.0, -100.0, 100.0), (80.0, 100.0));
        assert_eq!(trust_region(-100.0, -100.0, 100.0), (-100.0, -80.0));
    }

    #[test]
    fn elliptic_slice_located() {
        let p = build_problem(1, 30, 10, 2).unwrap();
        let obj = CountingObjective::new(&p);
        let cv = p.lower.clone();
        for t in [0, 13, 29] {
            let before = obj.fes_used();
            let r = tlpr(&obj, t, &cv).unwrap();
            assert_eq!(r.fes_used, obj.fes_used() - before);
            assert!((r.x_star - p.optimum()[t]).abs() <= 1e-6 * 200.0, "{r:?}");
            assert!((200..=260).contains(&r.fes_used), "{r:?}");
            assert!(r.delta > 0.0);
        }
    }

    #[test]
    fn rastrigin_slice_in_global_basin() {
        let p = build_problem(2, 30, 10, 4).unwrap();
        let obj = CountingObjective::new(&p);
        let cv = p.lower.clone();
        for t in 0..30 {
            let r = tlpr(&obj, t, &cv).unwrap();
            assert!((r.x_star - p.optimum()[t]).abs() < 0.5, "t={t} {r:?}");
        }
    }

    #[test]
    fn constant_slice_is_harmless() {
        let f = FnFunction::uniform(3, -1.0, 1.0, |x: &[f64]| x[0] * x[0]);
        let obj = CountingObjective::new(f);
        let r = tlpr(&obj, 2, &[0.3, -1.0, -1.0]).unwrap();
        assert!((-1.0..=1.0).contains(&r.x_star));
        // Ties everywhere: the radius widens to the polish cap.
        assert!(r.delta >= DELTA_FLOOR * 2.0 && r.delta <= POLISH_CAP * 2.0, "{r:?}");
    }

    #[test]
    fn budget_exhaustion_propagates() {
        let p = build_problem(1, 10, 5, 2).unwrap();
        let obj = CountingObjective::new(&p).with_budget(150);
        assert!(tlpr(&obj, 0, &p.lower.clone()).unwrap_err().is_budget());
        assert!(obj.fes_used() <= 150);
    }

    #[test]
    fn trace_records_both_layers() {
        let p = build_problem(1, 5, 5, 2).unwrap();
        let obj = CountingObjective::new(&p);
        let mut trace = Vec::new();
        tlpr_traced(&obj, 1, &p.lower.clone(), Some(&mut trace)).unwrap();
        assert_eq!(trace.iter().filter(|s| s.layer == 1).count(), 100);
        assert_eq!(trace.iter().filter(|s| s.layer == 2).count(), 17 * 6);
    }
}
