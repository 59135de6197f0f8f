//! Surrogate-assisted location of single-variable optima: polynomial
//! regression, analytic model minima, one-dimensional quasi-Newton
//! refinement and the two-layer regression scheme built from them.

mod poly;
mod refine;
mod tlpr;

pub use poly::{fit_poly, poly_minimum, PolyModel};
pub use refine::{local_refine, local_refine_with, RefineOutcome, RefineSettings};
pub use tlpr::{
    grid, tlpr, tlpr_traced, trust_region, window_starts, SampleTrace, TlprResult, LAYER_SAMPLES,
    DELTA_FLOOR, POLISH_CAP,
    TRUST_FRACTION, WINDOW,
};
