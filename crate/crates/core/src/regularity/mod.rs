//! Δ-approximation, rectangular approximation and regular partitions with
//! 0–1 densities.
//!
//! The pipeline is: [`delta_approx_partition`] groups parameters whose
//! fibers are close in symmetric-difference measure;
//! [`rectangular_approximation`] recurses over the last coordinate to build
//! a union of definable boxes `A` with `μ(R Δ A) < ε`;
//! [`regular_partition`] runs it at `ε²` and cuts every part into the atoms
//! of the box sides, so that `A` is compatible with the partition and the
//! exceptional boxes carry mass at most `ε`.

mod delta;
mod dense_box;
mod partition;
mod rect;

pub use delta::{delta_approx_partition, delta_partition_view, DeltaPartition, DeltaRoute};
pub use dense_box::{find_dense_box, DenseBox};
pub use partition::{
    cell_stats, regular_partition, uniform_regular_partition, verify_regular_partition,
    BoundRow, BoxLabel, CellStat, PartitionOutcome, RegularPartition, VerificationReport,
    Violation,
};
pub(crate) use partition::verify_with_measure;
pub use rect::{rectangular_approximation, LevelRecord, RectApprox};
