use super::{MachRule, MachineAssignment, OpRule, PriorityKey};
use crate::model::{
    Instance, PartialSchedule, Placement, PlacementMode, Schedule, ScheduleError, Time,
};

/// Partial schedule plus the per-job bookkeeping the dispatching rules read.
#[derive(Clone, Debug)]
pub struct DispatchState<'a> {
    schedule: PartialSchedule<'a>,
    remaining_ops: Vec<usize>,
    // sum of min-alternative processing times of unplaced ops
    remaining_work: Vec<Time>,
}

impl<'a> DispatchState<'a> {
    pub fn new(instance: &'a Instance) -> Self {
        let remaining_ops = instance.jobs().iter().map(|j| j.operations.len()).collect();
        let remaining_work = instance
            .jobs()
            .iter()
            .map(|j| j.operations.iter().map(|o| o.min_processing_time()).sum())
            .collect();
        DispatchState {
            schedule: PartialSchedule::new(instance),
            remaining_ops,
            remaining_work,
        }
    }

    pub fn instance(&self) -> &'a Instance {
        self.schedule.instance()
    }

    pub fn schedule(&self) -> &PartialSchedule<'a> {
        &self.schedule
    }

    pub fn remaining_ops(&self, job: usize) -> usize {
        self.remaining_ops[job]
    }

    pub fn remaining_work(&self, job: usize) -> Time {
        self.remaining_work[job]
    }

    /// Global ids of operations whose job predecessor is placed and whose
    /// assembly predecessor jobs are complete, in job order.
    pub fn ready_ops(&self) -> Vec<usize> {
        let instance = self.instance();
        instance
            .jobs()
            .iter()
            .filter_map(|job| {
                let next = self.schedule.next_op_index(job.id);
                let op = job.operations.get(next)?;
                let blocked = next == 0
                    && instance
                        .assembly_predecessors(job.id)
                        .iter()
                        .any(|&p| self.schedule.job_completion(p).is_none());
                (!blocked).then_some(op.global_id)
            })
            .collect()
    }

    /// Time at which a ready operation became eligible.
    pub fn ready_time(&self, global_id: usize) -> Result<Time, ScheduleError> {
        self.schedule.release_time(global_id)
    }

    pub fn is_complete(&self) -> bool {
        self.schedule.is_complete()
    }

    /// Appends the operation on `machine` and updates the job counters.
    pub fn place(&mut self, global_id: usize, machine: usize) -> Result<Placement, ScheduleError> {
        let placement = self.schedule.place(global_id, machine, PlacementMode::Append)?;
        let op = self.instance().op(global_id);
        self.remaining_ops[op.job_id] -= 1;
        self.remaining_work[op.job_id] -= op.min_processing_time();
        Ok(placement)
    }

    pub fn into_schedule(self) -> Result<Schedule, ScheduleError> {
        self.schedule.into_schedule()
    }
}

pub fn priority_key(rule: OpRule, global_id: usize, state: &DispatchState) -> Result<PriorityKey, ScheduleError> {
    let op = state.instance().op(global_id);
    Ok(PriorityKey::new(
        rule,
        state.ready_time(global_id)?,
        state.remaining_ops(op.job_id),
        state.remaining_work(op.job_id),
        op.job_id,
        op.op_index,
    ))
}

/// Machine for a ready operation under `rule`, lowest index on ties.
pub fn select_machine(rule: MachRule, global_id: usize, state: &DispatchState) -> Result<usize, ScheduleError> {
    let op = state.instance().op(global_id);
    let mut candidates = Vec::with_capacity(op.alternatives().len());
    for &(machine, p) in op.alternatives() {
        let start = match rule {
            MachRule::Spt => 0,
            MachRule::Eet => state
                .schedule()
                .earliest_start(global_id, machine, PlacementMode::Append)?,
        };
        candidates.push((machine, start, p));
    }
    Ok(rule.choose(candidates).expect("operations have alternatives"))
}

fn next_by_rule(rule: OpRule, state: &DispatchState) -> Result<usize, ScheduleError> {
    let mut best: Option<(PriorityKey, usize)> = None;
    for g in state.ready_ops() {
        let key = priority_key(rule, g, state)?;
        if best.is_none_or(|(b, _)| key < b) {
            best = Some((key, g));
        }
    }
    best.map(|(_, g)| g).ok_or_else(|| {
        // only reachable if assembly arcs deadlock, which Instance rules out
        let missing = (0..state.instance().total_ops())
            .find(|&g| !state.schedule().is_placed(g))
            .unwrap_or(0);
        ScheduleError::Missing(missing)
    })
}

/// List-schedules every operation: repeatedly take the ready operation with
/// the best `op_rule` key, choose its machine with `mach_rule`, and append it.
pub fn dispatch(instance: &Instance, op_rule: OpRule, mach_rule: MachRule) -> Result<Schedule, ScheduleError> {
    let mut state = DispatchState::new(instance);
    while !state.is_complete() {
        let g = next_by_rule(op_rule, &state)?;
        let machine = select_machine(mach_rule, g, &state)?;
        state.place(g, machine)?;
    }
    state.into_schedule()
}

/// Same loop as [`dispatch`] with machines fixed in advance, e.g. by a
/// load-balancing heuristic.
pub fn dispatch_with_assignment(
    instance: &Instance,
    op_rule: OpRule,
    assignment: &MachineAssignment,
) -> Result<Schedule, ScheduleError> {
    let mut state = DispatchState::new(instance);
    while !state.is_complete() {
        let g = next_by_rule(op_rule, &state)?;
        state.place(g, assignment[g])?;
    }
    state.into_schedule()
}
