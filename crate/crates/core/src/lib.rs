//! Budgeted maximum coverage: choose items within a cost budget so that the
//! total weight of the elements they cover is maximal.
//!
//! * [`instance`] and [`solution`]: the data model, file formats and
//!   incremental evaluation (flip, gain).
//! * [`neighbours`]: items sharing a covered element, and structural stats.
//! * [`greedy`]: density greedy with best-single-item fallback.
//! * [`vdls`]: variable depth local search.
//! * [`instgen`]: uniform and grouped random instance families.
//! * [`oracle`]: exact branch and bound for small instances.
//! * [`harness`]: multi-seed batch runs and CSV tables.

pub mod greedy;
pub mod harness;
pub mod instance;
pub mod instgen;
pub mod neighbours;
pub mod oracle;
pub mod solution;
pub mod vdls;

pub use greedy::greedy_construct;
pub use instance::{evaluate, Instance, InstanceError};
pub use neighbours::{instance_stats, InstanceStats, NeighbourGraph};
pub use oracle::{exact_opt, OracleResult};
pub use solution::Solution;
pub use vdls::{run_vdls, RunReport, SearchConfig};
