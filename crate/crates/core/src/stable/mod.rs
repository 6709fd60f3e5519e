//! Stable relations: ladder (order-property) detection, ε-goodness, the
//! descent partition into good pieces, and regular partitions with no
//! exceptional boxes.
//!
//! Excellence quantifies over every good set and cannot be certified
//! directly. [`stable_regular_partition`] approximates it by splitting
//! classes against good boxes built from the other parts' classes, then
//! checks the homogeneity conclusion box by box and fails loudly when it does
//! not hold.

mod good;
mod ladder;
mod partition;

pub use good::{
    good_check, good_descent_partition, DescentPartition, DescentStep, Extraction,
    GoodnessReport, ResidueRoute,
};
pub use ladder::{ladder_index, verify_ladder, LadderCertificate, LadderResult};
pub use partition::{
    product_goodness_check, stable_regular_partition, ProductGoodness, StableOptions,
    StableOutcome,
};
