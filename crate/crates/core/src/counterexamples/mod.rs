//! Finite simulators for the two counterexamples to the uniform Rödl
//! property, and a search for homogeneous sets among Boolean combinations of
//! fibers.

mod convexity;
mod dyadic;
mod rodl;

pub use convexity::{
    ap_count, convexity_counts, convexity_density, convexity_density_interval,
    reflection_involution_check, ConvexityDensity, InvolutionReport,
};
pub use dyadic::{
    anti_homogeneity_bound_check, ball_parity_report, dyadic_graph, odd_split_density,
    random_ball_union, AntiHomogeneity, DyadicBall, DyadicDensity, LevelCount, Parity,
    ParityRow, MAX_DEPTH,
};
pub use rodl::{
    definable_homogeneous_search, dyadic_ball_search, BallSearch, BallSearchRow,
    HomogeneousSearch, HomogeneousWitness, SearchMode, DEFAULT_SEARCH_BUDGET,
};
