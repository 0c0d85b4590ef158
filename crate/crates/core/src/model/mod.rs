//! Problem and schedule data model plus the placement kernel that every
//! solver builds on.

mod instance;
mod schedule;
mod state;
mod validate;

pub use instance::{AssemblyArc, Instance, Job, ModelError, Operation, SetupTimes, Time, Variant};
pub(crate) use instance::find_cycle;
pub use schedule::{makespan, Placement, Schedule, ScheduleError};
pub use state::{PartialSchedule, PlacementMode};
pub use validate::{validate, validate_placements, Violation, ViolationKind};
