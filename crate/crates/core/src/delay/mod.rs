//! Bounded delays: schedules, the augmented zero-delay encoding, the support
//! tracker over augmented products, and the contraction-bound checks.

mod augmented;
mod bounds;
mod schedule;
mod support;

pub use augmented::{build_augmented, head, is_head, slot, AugmentedMatrix};
pub use bounds::{augmented_product, verify_bound, BoundKind, BoundOptions, BoundReport, BoundStatus};
pub use schedule::{validate_delays, DelayRule, DelaySchedule, DelayViolation};
pub use support::{
    first_positive_column, stationarity_checks, ColumnStationarity, ColumnSupport, StationarityReport, SupportState,
    SupportWalk, ThetaReport,
};
