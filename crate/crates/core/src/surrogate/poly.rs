use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// A least-squares polynomial in one variable.
///
/// Coefficients are held in a centred and scaled basis `u = (x - center) / scale`
/// so that fits over narrow windows far from the origin stay well conditioned;
/// [`coefficients`](Self::coefficients) expands them into the raw power basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyModel {
    center: f64,
    scale: f64,
    /// Ascending powers of `u`.
    local: Vec<f64>,
}

impl PolyModel {
    /// Model from raw power-basis coefficients, highest degree first.
    pub fn from_coefficients(descending: &[f64]) -> Self {
        assert!(!descending.is_empty(), "polynomial needs at least one coefficient");
        Self { center: 0.0, scale: 1.0, local: descending.iter().rev().copied().collect() }
    }

    pub fn degree(&self) -> usize {
        self.local.len() - 1
    }

    /// Raw power-basis coefficients `p_degree, …, p_0`.
    pub fn coefficients(&self) -> Vec<f64> {
        let d = self.degree();
        // Expand sum_k c_k ((x - center)/scale)^k with the binomial theorem.
        let mut raw = vec![0.0; d + 1];
        for (k, &c) in self.local.iter().enumerate() {
            let ck = c / self.scale.powi(k as i32);
            let mut binom = 1.0;
            for j in 0..=k {
                // term: ck * C(k, j) * x^j * (-center)^(k-j)
                raw[j] += ck * binom * (-self.center).powi((k - j) as i32);
                binom = binom * (k - j) as f64 / (j + 1) as f64;
            }
        }
        raw.reverse();
        raw
    }

    /// Leading coefficient in the fitting basis; zero or negative for
    /// degenerate low-degree fits.
    pub fn leading_local(&self) -> f64 {
        *self.local.last().unwrap()
    }

    pub fn local_coefficients(&self) -> &[f64] {
        &self.local
    }

    fn to_local(&self, x: f64) -> f64 {
        (x - self.center) / self.scale
    }

    fn to_global(&self, u: f64) -> f64 {
        self.center + self.scale * u
    }

    pub fn eval(&self, x: f64) -> f64 {
        horner(&self.local, self.to_local(x))
    }

    /// `max |c_k u^k|` over the interval, a yardstick for evaluation roundoff.
    fn magnitude(&self, lo: f64, hi: f64) -> f64 {
        let u = self.to_local(lo).abs().max(self.to_local(hi).abs()).max(1.0);
        self.local
            .iter()
            .enumerate()
            .map(|(k, c)| c.abs() * u.powi(k as i32))
            .sum()
    }
}

fn horner(ascending: &[f64], u: f64) -> f64 {
    ascending.iter().rev().fold(0.0, |acc, c| acc * u + c)
}

fn derivative(ascending: &[f64]) -> Vec<f64> {
    ascending
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| k as f64 * c)
        .collect()
}

/// Least-squares polynomial of the given degree through `(xs, ys)`.
pub fn fit_poly(xs: &[f64], ys: &[f64], degree: usize) -> Result<PolyModel> {
    if xs.len() != ys.len() {
        return Err(Error::Fit(format!("{} abscissae but {} values", xs.len(), ys.len())));
    }
    if degree == 0 || xs.len() < degree + 1 {
        return Err(Error::Fit(format!(
            "degree {degree} needs at least {} samples, got {}",
            degree + 1,
            xs.len()
        )));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::Fit("samples must be finite".into()));
    }
    let (min, max) = xs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let center = 0.5 * (min + max);
    let scale = 0.5 * (max - min);
    if !(scale > 0.0) {
        return Err(Error::Fit("abscissae are all equal".into()));
    }

    let cols = degree + 1;
    let design = DMatrix::from_fn(xs.len(), cols, |i, k| ((xs[i] - center) / scale).powi(k as i32));
    let qr = design.qr();
    let r = qr.r();
    let diag: Vec<f64> = (0..cols).map(|k| r[(k, k)].abs()).collect();
    let largest = diag.iter().cloned().fold(0.0, f64::max);
    if diag.iter().any(|&d| !(d > 1e-12 * largest)) {
        return Err(Error::Fit("design matrix is numerically singular".into()));
    }
    let qty = qr.q().transpose() * DVector::from_column_slice(ys);
    let coef = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| Error::Fit("triangular solve failed".into()))?;
    let local: Vec<f64> = coef.iter().copied().collect();
    if local.iter().any(|c| !c.is_finite()) {
        return Err(Error::Fit("non-finite coefficients".into()));
    }
    Ok(PolyModel { center, scale, local })
}

/// Real roots of an ascending-coefficient polynomial inside `[a, b]`.
///
/// Roots of the derivative split the interval into monotone pieces; each
/// piece holds at most one root, found by bisection.
fn real_roots_in(ascending: &[f64], a: f64, b: f64) -> Vec<f64> {
    let mut q = ascending.to_vec();
    while q.len() > 1 && *q.last().unwrap() == 0.0 {
        q.pop();
    }
    match q.len() {
        0 | 1 => return Vec::new(),
        2 => {
            let r = -q[0] / q[1];
            return if (a..=b).contains(&r) { vec![r] } else { Vec::new() };
        }
        _ => {}
    }
    let mut knots = vec![a];
    knots.extend(real_roots_in(&derivative(&q), a, b));
    knots.push(b);

    let mut roots: Vec<f64> = Vec::new();
    for w in knots.windows(2) {
        let (mut lo, mut hi) = (w[0], w[1]);
        let (mut flo, fhi) = (horner(&q, lo), horner(&q, hi));
        if flo == 0.0 {
            roots.push(lo);
            continue;
        }
        if flo * fhi >= 0.0 {
            continue;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let fm = horner(&q, mid);
            if fm == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if (fm < 0.0) == (flo < 0.0) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        roots.push(0.5 * (lo + hi));
    }
    if horner(&q, b) == 0.0 {
        roots.push(b);
    }
    roots.dedup_by(|x, y| (*x - *y).abs() <= f64::EPSILON * (1.0 + y.abs()));
    roots
}

/// Argmin of the model over `[lo, hi]`.
///
/// Compares the stationary points inside the interval with both endpoints;
/// ties (within evaluation roundoff) go to the smaller argument.
pub fn poly_minimum(model: &PolyModel, lo: f64, hi: f64) -> f64 {
    debug_assert!(lo <= hi);
    let (ulo, uhi) = (model.to_local(lo), model.to_local(hi));
    let mut candidates = vec![lo];
    candidates.extend(
        real_roots_in(&derivative(&model.local), ulo, uhi)
            .into_iter()
            .map(|u| model.to_global(u).clamp(lo, hi)),
    );
    candidates.push(hi);
    candidates.sort_by(f64::total_cmp);

    let tie = 8.0 * f64::EPSILON * model.magnitude(lo, hi);
    let mut best = candidates[0];
    let mut best_val = model.eval(best);
    for &c in &candidates[1..] {
        let v = model.eval(c);
        if v < best_val - tie {
            best = c;
            best_val = v;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn parabola_through_three_points() {
        let m = fit_poly(&[-1.0, 0.0, 1.0], &[1.0, 0.0, 1.0], 2).unwrap();
        let c = m.coefficients();
        assert_abs_diff_eq!(c[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(c[1], 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(c[2], 0.0, epsilon = 1e-14);
    }

    #[test]
    fn quintic_recovered() {
        let truth = [2.0, 0.0, 0.0, 0.0, -1.0, 3.0];
        let p = PolyModel::from_coefficients(&truth);
        let xs = [-1.0, -0.6, -0.2, 0.3, 0.7, 1.0];
        let ys: Vec<f64> = xs.iter().map(|&x| p.eval(x)).collect();
        let fit = fit_poly(&xs, &ys, 5).unwrap();
        for (a, b) in fit.coefficients().iter().zip(truth) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-8);
        }
    }

    #[test]
    fn constant_data() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let fit = fit_poly(&xs, &[4.5; 10], 5).unwrap();
        let c = fit.coefficients();
        assert_abs_diff_eq!(c[5], 4.5, epsilon = 1e-10);
        for v in &c[..5] {
            assert!(v.abs() <= 1e-10);
        }
    }

    #[test]
    fn fit_errors() {
        assert!(matches!(fit_poly(&[0.0, 1.0], &[0.0, 1.0], 2), Err(Error::Fit(_))));
        assert!(matches!(fit_poly(&[1.0, 1.0, 1.0], &[0.0, 1.0, 2.0], 2), Err(Error::Fit(_))));
        assert!(matches!(
            fit_poly(&[0.0, 1.0, 1.0, 2.0], &[0.0, 1.0, 1.0, 0.0], 3),
            Err(Error::Fit(_))
        ));
        assert!(fit_poly(&[0.0, 1.0, 2.0], &[0.0, f64::NAN, 2.0], 2).is_err());
        assert!(fit_poly(&[0.0, 1.0], &[0.0], 1).is_err());
    }

    #[test]
    fn minimum_examples() {
        let up = PolyModel::from_coefficients(&[1.0, 0.0, 0.0]);
        assert_eq!(poly_minimum(&up, -1.0, 1.0), 0.0);
        let down = PolyModel::from_coefficients(&[-1.0, 0.0, 0.0]);
        assert_eq!(poly_minimum(&down, -1.0, 1.0), -1.0);
        let flat = PolyModel::from_coefficients(&[0.0, 0.0, 2.0]);
        assert_eq!(poly_minimum(&flat, 3.0, 7.0), 3.0);
        let line = PolyModel::from_coefficients(&[-1.0, 0.0]);
        assert_eq!(poly_minimum(&line, 3.0, 7.0), 7.0);
    }

    #[test]
    fn shifted_window_minimum() {
        // (x - 250.3)^2 sampled on a narrow window far from the origin.
        let xs: Vec<f64> = (0..6).map(|i| 250.0 + 0.2 * i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| (x - 250.3) * (x - 250.3)).collect();
        let m = fit_poly(&xs, &ys, 5).unwrap();
        assert_abs_diff_eq!(poly_minimum(&m, 250.0, 251.0), 250.3, epsilon = 1e-9);
    }

    #[test]
    fn quartic_derivative_roots() {
        let expect = [0.1, 0.4, 0.7, 0.9];
        let mut asc = vec![1.0];
        for r in expect {
            // multiply by (x - r)
            let mut next = vec![0.0; asc.len() + 1];
            for (k, c) in asc.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= r * c;
            }
            asc = next;
        }
        let roots = real_roots_in(&asc, 0.0, 1.0);
        assert_eq!(roots.len(), 4, "{roots:?}");
        for (r, e) in roots.iter().zip(expect) {
            assert_abs_diff_eq!(*r, e, epsilon = 1e-12);
        }
    }

    proptest! {
        #[test]
        fn fits_interpolate_their_own_degree(
            coefs in prop::collection::vec(-5.0f64..5.0, 3),
            offset in -50.0f64..50.0,
        ) {
            let p = PolyModel::from_coefficients(&coefs);
            let xs: Vec<f64> = (0..20).map(|i| offset + 0.1 * i as f64).collect();
            let ys: Vec<f64> = xs.iter().map(|&x| p.eval(x)).collect();
            let fit = fit_poly(&xs, &ys, 2).unwrap();
            let scale = ys.iter().map(|y| y.abs()).fold(1.0, f64::max);
            for (&x, &y) in xs.iter().zip(&ys) {
                prop_assert!((fit.eval(x) - y).abs() <= 1e-8 * scale);
            }
        }

        #[test]
        fn minimum_beats_coarse_grid(coefs in prop::collection::vec(-1.0f64..1.0, 6)) {
            let p = PolyModel::from_coefficients(&coefs);
            let xm = poly_minimum(&p, 0.0, 1.0);
            prop_assert!((0.0..=1.0).contains(&xm));
            let vm = p.eval(xm);
            for i in 0..=1000 {
                prop_assert!(vm <= p.eval(i as f64 / 1000.0) + 1e-12);
            }
        }
    }
}
