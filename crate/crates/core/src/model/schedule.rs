use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::Time;

/// An operation booked on a machine over `[start, end)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Placement {
    pub global_id: usize,
    pub machine: usize,
    pub start: Time,
    pub end: Time,
    /// Setup paid on the machine directly before `start`.
    pub setup_applied: Time,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScheduleError {
    #[error("empty schedule has no makespan")]
    EmptySchedule,
    #[error("operation {0} is not scheduled")]
    Missing(usize),
    #[error("operation {0} is scheduled more than once")]
    Duplicate(usize),
    #[error("operation id {0} does not exist in the instance")]
    UnknownOperation(usize),
    #[error("machine {machine} is not an alternative of operation {global_id}")]
    MachineIncompatible { global_id: usize, machine: usize },
    #[error("operation {0} cannot be placed before its job predecessor")]
    PrecedenceUnscheduled(usize),
    #[error("operation {global_id} waits for unfinished assembly job {job}")]
    AssemblyUnscheduled { global_id: usize, job: usize },
    #[error("operation {0} is already placed")]
    AlreadyPlaced(usize),
}

/// Complete assignment of every operation, indexed by global id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schedule {
    placements: Vec<Placement>,
    makespan: Time,
}

impl Schedule {
    /// Orders placements by global id. Coverage is checked by [`super::validate`].
    pub fn new(mut placements: Vec<Placement>) -> Self {
        placements.sort_by_key(|p| p.global_id);
        let makespan = placements.iter().map(|p| p.end).max().unwrap_or(0);
        Schedule {
            placements,
            makespan,
        }
    }

    pub fn placements(&self) -> &[Placement] {
        &self.placements
    }

    pub fn placement(&self, global_id: usize) -> Option<&Placement> {
        self.placements
            .binary_search_by_key(&global_id, |p| p.global_id)
            .ok()
            .map(|i| &self.placements[i])
    }

    pub fn makespan(&self) -> Time {
        self.makespan
    }

    pub fn len(&self) -> usize {
        self.placements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.placements.is_empty()
    }

    /// Placements on one machine sorted by start time.
    pub fn machine_sequence(&self, machine: usize) -> Vec<Placement> {
        let mut seq: Vec<_> = self
            .placements
            .iter()
            .filter(|p| p.machine == machine)
            .copied()
            .collect();
        seq.sort_by_key(|p| (p.start, p.end, p.global_id));
        seq
    }
}

/// Maximum completion time over all placements.
pub fn makespan(placements: &[Placement]) -> Result<Time, ScheduleError> {
    placements
        .iter()
        .map(|p| p.end)
        .max()
        .ok_or(ScheduleError::EmptySchedule)
}
