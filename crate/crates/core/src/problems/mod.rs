//! Benchmark problems: base functions, composed benchmark instances,
//! ground-truth decompositions and the evaluation counter.

mod base;
mod benchmark;
mod objective;
mod rotation;
mod spec_file;

pub use base::BaseFunction;
pub use benchmark::{build_problem, ground_truth, BenchmarkProblem, Component, GroundTruthDecomposition};
pub use objective::{CountingObjective, FnFunction, Function};
pub use rotation::{make_rotation, Rotation};
pub use spec_file::ProblemSpec;

use crate::error::Result;

/// Checked evaluation of a base function on `x`.
pub fn eval_base(kind: BaseFunction, x: &[f64]) -> Result<f64> {
    kind.eval(x)
}
