use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};
use crate::exec::Execution;

/// A box-constrained black-box function.
pub trait Function: Sync {
    fn dim(&self) -> usize;
    fn lower(&self) -> &[f64];
    fn upper(&self) -> &[f64];
    fn value(&self, x: &[f64]) -> f64;
}

impl<F: Function + ?Sized> Function for &F {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn lower(&self) -> &[f64] {
        (**self).lower()
    }
    fn upper(&self) -> &[f64] {
        (**self).upper()
    }
    fn value(&self, x: &[f64]) -> f64 {
        (**self).value(x)
    }
}

/// Adapter turning a closure and a box into a [`Function`].
pub struct FnFunction<F> {
    lower: Vec<f64>,
    upper: Vec<f64>,
    f: F,
}

impl<F: Fn(&[f64]) -> f64 + Sync> FnFunction<F> {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>, f: F) -> Self {
        assert_eq!(lower.len(), upper.len(), "bound vectors differ in length");
        Self { lower, upper, f }
    }

    /// Same bounds on every coordinate.
    pub fn uniform(n: usize, lo: f64, hi: f64, f: F) -> Self {
        Self::new(vec![lo; n], vec![hi; n], f)
    }
}

impl<F: Fn(&[f64]) -> f64 + Sync> Function for FnFunction<F> {
    fn dim(&self) -> usize {
        self.lower.len()
    }
    fn lower(&self) -> &[f64] {
        &self.lower
    }
    fn upper(&self) -> &[f64] {
        &self.upper
    }
    fn value(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
}

/// Evaluation wrapper with exact fitness-evaluation accounting.
///
/// Every successful call to [`evaluate`](Self::evaluate) bumps the counter by
/// one; batches reserve their slots up front so the counter never passes the
/// budget, even when a batch is evaluated on several threads.
pub struct CountingObjective<F> {
    function: F,
    fes: AtomicU64,
    budget: Option<u64>,
    execution: Execution,
}

impl<F: Function> CountingObjective<F> {
    pub fn new(function: F) -> Self {
        Self {
            function,
            fes: AtomicU64::new(0),
            budget: None,
            execution: Execution::default(),
        }
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = Some(budget);
        self
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn function(&self) -> &F {
        &self.function
    }

    pub fn dim(&self) -> usize {
        self.function.dim()
    }

    pub fn lower(&self) -> &[f64] {
        self.function.lower()
    }

    pub fn upper(&self) -> &[f64] {
        self.function.upper()
    }

    pub fn budget(&self) -> Option<u64> {
        self.budget
    }

    pub fn execution(&self) -> Execution {
        self.execution
    }

    pub fn fes_used(&self) -> u64 {
        self.fes.load(Ordering::SeqCst)
    }

    /// Evaluations left before the cap, `u64::MAX` when uncapped.
    pub fn remaining(&self) -> u64 {
        match self.budget {
            Some(b) => b.saturating_sub(self.fes_used()),
            None => u64::MAX,
        }
    }

    /// Reserve up to `want` evaluation slots; returns how many were granted.
    fn reserve(&self, want: u64) -> u64 {
        let mut granted = 0;
        let _ = self.fes.fetch_update(Ordering::SeqCst, Ordering::SeqCst, |used| {
            granted = match self.budget {
                Some(b) => want.min(b.saturating_sub(used)),
                None => want,
            };
            Some(used + granted)
        });
        granted
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::Domain(format!(
                "point has {} coordinates, objective has {}",
                x.len(),
                self.dim()
            )));
        }
        Ok(())
    }

    /// One counted evaluation.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        self.check_point(x)?;
        if self.reserve(1) == 0 {
            return Err(Error::BudgetExhausted { fes_used: self.fes_used() });
        }
        Ok(self.function.value(x))
    }

    /// Evaluate a batch, all or nothing: if the budget cannot cover every
    /// point, nothing is evaluated or counted.
    pub fn evaluate_all(&self, points: &[Vec<f64>]) -> Result<Vec<f64>> {
        for p in points {
            self.check_point(p)?;
        }
        let want = points.len() as u64;
        if self.remaining() < want {
            return Err(Error::BudgetExhausted { fes_used: self.fes_used() });
        }
        let granted = self.reserve(want);
        if granted < want {
            // Lost a race with another user of this counter; give the slots back.
            self.fes.fetch_sub(granted, Ordering::SeqCst);
            return Err(Error::BudgetExhausted { fes_used: self.fes_used() });
        }
        Ok(self.execution.map(points, |p| self.function.value(p)))
    }

    /// Evaluate the longest prefix of `points` the budget allows.
    ///
    /// Returns the values and whether the budget ran out before the end.
    pub fn evaluate_prefix(&self, points: &[Vec<f64>]) -> Result<(Vec<f64>, bool)> {
        for p in points {
            self.check_point(p)?;
        }
        let granted = self.reserve(points.len() as u64) as usize;
        let values = self.execution.map(&points[..granted], |p| self.function.value(p));
        Ok((values, granted < points.len()))
    }

    /// Uncounted evaluation for audits and reporting, outside any budget.
    pub fn audit(&self, x: &[f64]) -> f64 {
        self.function.value(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere(n: usize) -> FnFunction<impl Fn(&[f64]) -> f64 + Sync> {
        FnFunction::uniform(n, -1.0, 1.0, |x: &[f64]| x.iter().map(|v| v * v).sum())
    }

    #[test]
    fn counts_each_call() {
        let obj = CountingObjective::new(sphere(2));
        obj.evaluate(&[0.0, 0.0]).unwrap();
        obj.evaluate(&[1.0, 0.0]).unwrap();
        assert_eq!(obj.fes_used(), 2);
        obj.audit(&[0.5, 0.5]);
        assert_eq!(obj.fes_used(), 2);
    }

    #[test]
    fn budget_is_a_hard_cap() {
        let obj = CountingObjective::new(sphere(1)).with_budget(3);
        for _ in 0..3 {
            obj.evaluate(&[0.0]).unwrap();
        }
        assert_eq!(obj.evaluate(&[0.0]), Err(Error::BudgetExhausted { fes_used: 3 }));
        assert_eq!(obj.fes_used(), 3);
    }

    #[test]
    fn batch_all_or_nothing() {
        let obj = CountingObjective::new(sphere(1)).with_budget(5);
        let pts = vec![vec![0.5]; 4];
        assert_eq!(obj.evaluate_all(&pts).unwrap(), vec![0.25; 4]);
        assert!(obj.evaluate_all(&pts).unwrap_err().is_budget());
        assert_eq!(obj.fes_used(), 4);
        let (vals, exhausted) = obj.evaluate_prefix(&pts).unwrap();
        assert_eq!(vals.len(), 1);
        assert!(exhausted);
        assert_eq!(obj.fes_used(), 5);
    }

    #[test]
    fn wrong_length_is_domain_error_and_not_counted() {
        let obj = CountingObjective::new(sphere(2));
        assert!(matches!(obj.evaluate(&[1.0]), Err(Error::Domain(_))));
        assert_eq!(obj.fes_used(), 0);
    }

    #[test]
    fn concurrent_counting_is_exact() {
        let obj = CountingObjective::new(sphere(3))
            .with_budget(10_000)
            .with_execution(Execution::Parallel);
        let pts = vec![vec![0.1, 0.2, 0.3]; 1000];
        for _ in 0..7 {
            obj.evaluate_all(&pts).unwrap();
        }
        std::thread::scope(|s| {
            for _ in 0..4 {
                s.spawn(|| {
                    for _ in 0..250 {
                        let _ = obj.evaluate(&[0.0, 0.0, 0.0]);
                    }
                });
            }
        });
        assert_eq!(obj.fes_used(), 8000);
    }
}
