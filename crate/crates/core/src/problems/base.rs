use serde::{Deserialize, Serialize};
use std::f64::consts::{E, PI};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// The six base functions the benchmark suite is composed from.
///
/// Every kind attains its global minimum of 0 at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaseFunction {
    Elliptic,
    Rastrigin,
    Exponential,
    Ackley,
    Ridge,
    Schwefel,
}

impl BaseFunction {
    pub const ALL: [BaseFunction; 6] = [
        BaseFunction::Elliptic,
        BaseFunction::Rastrigin,
        BaseFunction::Exponential,
        BaseFunction::Ackley,
        BaseFunction::Ridge,
        BaseFunction::Schwefel,
    ];

    /// Symmetric box `[-b, b]` each kind is defined on.
    pub fn bound(self) -> f64 {
        match self {
            BaseFunction::Elliptic | BaseFunction::Ridge | BaseFunction::Schwefel => 100.0,
            BaseFunction::Rastrigin => 5.0,
            BaseFunction::Exponential | BaseFunction::Ackley => 32.0,
        }
    }

    /// Checked evaluation.
    pub fn eval(self, x: &[f64]) -> Result<f64> {
        if x.is_empty() {
            return Err(Error::Domain("base function needs a nonempty vector".into()));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("base function input must be finite".into()));
        }
        Ok(self.eval_unchecked(x))
    }

    /// Evaluation without input validation; the vector length is the dimension.
    pub fn eval_unchecked(self, x: &[f64]) -> f64 {
        match self {
            BaseFunction::Elliptic => elliptic(x),
            BaseFunction::Rastrigin => rastrigin(x),
            BaseFunction::Exponential => exponential(x),
            BaseFunction::Ackley => ackley(x),
            BaseFunction::Ridge => ridge(x),
            BaseFunction::Schwefel => schwefel(x),
        }
    }

    /// Whether the function is separable when applied unrotated to a block.
    pub fn separable(self) -> bool {
        !matches!(self, BaseFunction::Schwefel)
    }
}

impl fmt::Display for BaseFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BaseFunction::Elliptic => "elliptic",
            BaseFunction::Rastrigin => "rastrigin",
            BaseFunction::Exponential => "exponential",
            BaseFunction::Ackley => "ackley",
            BaseFunction::Ridge => "ridge",
            BaseFunction::Schwefel => "schwefel",
        };
        f.write_str(s)
    }
}

impl FromStr for BaseFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BaseFunction::ALL
            .into_iter()
            .find(|k| k.to_string() == s)
            .ok_or_else(|| Error::Config(format!("unknown base function `{s}`")))
    }
}

/// Compensated (Neumaier) summation.
///
/// Objective values in this suite can reach 1e11 while the per-variable
/// signal near an optimum is many orders smaller, so plain left-to-right
/// accumulation error is visible to the surrogate and detection steps.
pub(crate) fn compensated_sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for t in terms {
        let s = sum + t;
        if sum.abs() >= t.abs() {
            comp += (sum - s) + t;
        } else {
            comp += (t - s) + sum;
        }
        sum = s;
    }
    sum + comp
}

fn elliptic(x: &[f64]) -> f64 {
    let n = x.len();
    if n == 1 {
        return x[0] * x[0];
    }
    let denom = (n - 1) as f64;
    compensated_sum(
        x.iter()
            .enumerate()
            .map(|(i, v)| 1e6f64.powf(i as f64 / denom) * v * v),
    )
}

fn rastrigin(x: &[f64]) -> f64 {
    compensated_sum(x.iter().map(|v| v * v - 10.0 * (2.0 * PI * v).cos() + 10.0))
}

fn exponential(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let weighted = compensated_sum(
        x.iter()
            .enumerate()
            .map(|(i, v)| (i + 1) as f64 / n * v * v),
    );
    // 200 - 200 exp(-s) written through expm1 so values near the optimum keep
    // their relative precision.
    -200.0 * (-(weighted.sqrt() / n)).exp_m1()
}

fn ackley(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let sq = compensated_sum(x.iter().map(|v| v * v)) / n;
    let cs = compensated_sum(x.iter().map(|v| (2.0 * PI * v).cos())) / n;
    -20.0 * (-0.2 * sq.sqrt()).exp_m1() + (E - cs.exp())
}

fn ridge(x: &[f64]) -> f64 {
    x.len() as f64 * compensated_sum(x.iter().map(|v| v * v)).sqrt()
}

fn schwefel(x: &[f64]) -> f64 {
    let mut prefix = 0.0;
    compensated_sum(x.iter().map(|v| {
        prefix += v;
        prefix * prefix
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_at_origin() {
        for kind in BaseFunction::ALL {
            for n in [1, 2, 7, 50] {
                let v = kind.eval(&vec![0.0; n]).unwrap();
                assert!(v.abs() <= 1e-12, "{kind} n={n}: {v}");
            }
        }
    }

    #[test]
    fn hand_values() {
        assert_eq!(BaseFunction::Schwefel.eval(&[1.0, 1.0]).unwrap(), 5.0);
        // n * sqrt(sum x^2) = 2 * 5
        assert_eq!(BaseFunction::Ridge.eval(&[3.0, 4.0]).unwrap(), 10.0);
        assert_eq!(BaseFunction::Elliptic.eval(&[1.0, 1.0]).unwrap(), 1.0 + 1e6);
        assert_eq!(BaseFunction::Elliptic.eval(&[0.0, 0.0, 0.0]).unwrap(), 0.0);
        let r = BaseFunction::Rastrigin.eval(&[0.5]).unwrap();
        assert!((r - 20.25).abs() < 1e-12);
        let e = BaseFunction::Exponential.eval(&[2.0]).unwrap();
        assert!((e - (200.0 - 200.0 * (-2.0f64).exp())).abs() < 1e-12);
        let a = BaseFunction::Ackley.eval(&[1.0]).unwrap();
        let expected = -20.0 * (-0.2f64).exp() - 1.0f64.exp() + 20.0 + E;
        assert!((a - expected).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(BaseFunction::Elliptic.eval(&[]), Err(Error::Domain(_))));
        assert!(matches!(
            BaseFunction::Ridge.eval(&[1.0, f64::NAN]),
            Err(Error::Domain(_))
        ));
        assert!(BaseFunction::Ackley.eval(&[f64::INFINITY]).is_err());
    }

    #[test]
    fn names_round_trip() {
        for kind in BaseFunction::ALL {
            assert_eq!(kind.to_string().parse::<BaseFunction>().unwrap(), kind);
        }
    }

    proptest! {
        #[test]
        fn nonnegative(kind in 0usize..6, xs in prop::collection::vec(-30.0f64..30.0, 1..20)) {
            let v = BaseFunction::ALL[kind].eval(&xs).unwrap();
            prop_assert!(v >= -1e-12);
        }

        #[test]
        fn compensated_matches_exact_integers(xs in prop::collection::vec(-1000i64..1000, 0..50)) {
            let exact: i64 = xs.iter().sum();
            prop_assert_eq!(compensated_sum(xs.iter().map(|&v| v as f64)), exact as f64);
        }
    }
}
