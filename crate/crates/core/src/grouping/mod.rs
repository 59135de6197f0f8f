//! Dynamic-binary-tree grouping and the full decomposition driver.

mod dbtg;
mod decomposition;
mod svg;

pub use dbtg::{dbtg, dbtg_with, halve, DbtgOutcome};
pub use decomposition::{digest, Decomposition, SeparableVar};
pub use svg::{svg_decompose, svg_decompose_traced, SvgConfig, TargetOrder};
