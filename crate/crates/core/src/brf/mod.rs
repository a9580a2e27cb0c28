//! Birkhoff sums of periodized hat and dome functions along an irrational
//! rotation, their block decomposition and the bounds that control it.

mod bounds;
mod discrepancy;
mod functions;
mod sums;

pub use bounds::{
    cohomology_residual, dome_decompose, grid_sum_brute, grid_sum_closed_form,
    special_triangle_transfer, special_triangle_transfer_max, truncated_derivative_variation,
    Transfer, VariationBound, DECOMPOSE_GRID,
};
pub use discrepancy::{
    koksma_check, scaled_star_discrepancies, star_discrepancy, DiscrepancyStats, KoksmaCheck,
};
pub use functions::{
    DomeFunction, HatFunction, PeriodizedFunction, Profile, Term, CONCAVITY_SAMPLES, CONCAVITY_TOL,
    GROWTH_SAMPLES,
};
pub use sums::{
    birkhoff_remainder, birkhoff_sum, decompose_sum, decomposition_csv, remainder_trace,
    Decomposition, DecompositionTerm, Orbit, F64_MAX_BLOCK,
};
