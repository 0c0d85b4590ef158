//! Rule-based schedule construction: dispatching rules that pick the next
//! operation, machine-assignment rules that pick its machine, and the
//! Global/Local Selection load-balancing heuristics.

mod dispatch;
mod load_balance;

use std::fmt;
use std::str::FromStr;

use crate::model::Time;

pub use dispatch::{dispatch, dispatch_with_assignment, priority_key, select_machine, DispatchState};
pub use load_balance::{
    global_selection, global_selection_ordered, global_selection_traced, local_selection,
    machine_loads, random_assignment, MachineAssignment,
};

/// Operation-selection rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OpRule {
    /// Earliest eligibility time first.
    Fifo,
    /// Most operations remaining in the job.
    Mor,
    /// Least operations remaining.
    Lor,
    /// Most work remaining.
    Mwr,
    /// Least work remaining.
    Lwr,
}

/// Machine-assignment rule for flexible operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MachRule {
    /// Shortest processing time.
    Spt,
    /// Earliest end time given the machine's current bookings.
    Eet,
}

impl OpRule {
    pub const ALL: [OpRule; 5] = [OpRule::Fifo, OpRule::Mor, OpRule::Lor, OpRule::Mwr, OpRule::Lwr];

    pub fn name(self) -> &'static str {
        match self {
            OpRule::Fifo => "fifo",
            OpRule::Mor => "mor",
            OpRule::Lor => "lor",
            OpRule::Mwr => "mwr",
            OpRule::Lwr => "lwr",
        }
    }
}

impl MachRule {
    pub const ALL: [MachRule; 2] = [MachRule::Spt, MachRule::Eet];

    pub fn name(self) -> &'static str {
        match self {
            MachRule::Spt => "spt",
            MachRule::Eet => "eet",
        }
    }

    /// Picks among `(machine, start, processing_time)` candidates; ties go to
    /// the lowest machine index.
    pub fn choose(self, candidates: impl IntoIterator<Item = (usize, Time, Time)>) -> Option<usize> {
        candidates
            .into_iter()
            .min_by_key(|&(machine, start, p)| match self {
                MachRule::Spt => (p, machine),
                MachRule::Eet => (start + p, machine),
            })
            .map(|(machine, _, _)| machine)
    }
}

impl fmt::Display for OpRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Display for MachRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OpRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.to_ascii_lowercase();
        OpRule::ALL
            .into_iter()
            .find(|r| r.name() == lower)
            .ok_or_else(|| format!("unknown operation rule {s:?} (expected fifo, mor, lor, mwr or lwr)"))
    }
}

impl FromStr for MachRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.to_ascii_lowercase();
        MachRule::ALL
            .into_iter()
            .find(|r| r.name() == lower)
            .ok_or_else(|| format!("unknown machine rule {s:?} (expected spt or eet)"))
    }
}

/// Sort key for dispatching; the smallest key is dispatched first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PriorityKey {
    primary: i128,
    job: usize,
    op_index: usize,
}

impl PriorityKey {
    /// Builds the key from the job-level quantities each rule looks at.
    /// Ties break on job id, then operation index.
    pub fn new(
        rule: OpRule,
        ready_time: Time,
        remaining_ops: usize,
        remaining_work: Time,
        job: usize,
        op_index: usize,
    ) -> Self {
        let primary = match rule {
            OpRule::Fifo => i128::from(ready_time),
            OpRule::Mor => -(remaining_ops as i128),
            OpRule::Lor => remaining_ops as i128,
            OpRule::Mwr => -i128::from(remaining_work),
            OpRule::Lwr => i128::from(remaining_work),
        };
        PriorityKey {
            primary,
            job,
            op_index,
        }
    }

    pub fn job(&self) -> usize {
        self.job
    }
}
