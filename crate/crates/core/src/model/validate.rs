use std::fmt;

use super::{Instance, Placement, Schedule, ScheduleError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ViolationKind {
    Overlap,
    JobPrecedence,
    AssemblyPrecedence,
    SetupUnderflow,
    IncompatibleMachine,
    /// `end - start` differs from the processing time on the chosen machine.
    DurationMismatch,
    ReadyTime,
}

/// One broken constraint; `ops` lists the global ids involved.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub ops: Vec<usize>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} involving operations {:?}", self.kind, self.ops)
    }
}

/// Checks every constraint of the instance against the schedule.
///
/// Returns an empty list iff the schedule is feasible. Fails with a
/// [`ScheduleError`] when an operation is missing, duplicated or unknown,
/// since nothing else can be checked meaningfully in that case.
pub fn validate(schedule: &Schedule, instance: &Instance) -> Result<Vec<Violation>, ScheduleError> {
    validate_placements(schedule.placements(), instance)
}

pub fn validate_placements(
    placements: &[Placement],
    instance: &Instance,
) -> Result<Vec<Violation>, ScheduleError> {
    let n = instance.total_ops();
    let mut by_op: Vec<Option<&Placement>> = vec![None; n];
    for p in placements {
        let slot = by_op
            .get_mut(p.global_id)
            .ok_or(ScheduleError::UnknownOperation(p.global_id))?;
        if slot.replace(p).is_some() {
            return Err(ScheduleError::Duplicate(p.global_id));
        }
    }
    if let Some(missing) = by_op.iter().position(Option::is_none) {
        return Err(ScheduleError::Missing(missing));
    }
    let by_op: Vec<&Placement> = by_op.into_iter().flatten().collect();

    let mut violations = Vec::new();
    let mut flag = |kind, ops: Vec<usize>| violations.push(Violation { kind, ops });

    let mut per_machine: Vec<Vec<&Placement>> = vec![Vec::new(); instance.machine_count()];
    for (g, p) in by_op.iter().enumerate() {
        let op = instance.op(g);
        match op.processing_time(p.machine) {
            Some(time) if p.machine < instance.machine_count() => {
                if p.end < p.start || p.end - p.start != time {
                    flag(ViolationKind::DurationMismatch, vec![g]);
                }
                per_machine[p.machine].push(p);
            }
            _ => flag(ViolationKind::IncompatibleMachine, vec![g]),
        }
        let job = instance.job(op.job_id);
        if p.start < job.ready_time {
            flag(ViolationKind::ReadyTime, vec![g]);
        }
        if op.op_index > 0 {
            let pred = job.operations[op.op_index - 1].global_id;
            if p.start < by_op[pred].end {
                flag(ViolationKind::JobPrecedence, vec![pred, g]);
            }
        } else {
            for &pred_job in instance.assembly_predecessors(op.job_id) {
                let last = instance.job(pred_job).operations.last().expect("jobs are non-empty");
                if p.start < by_op[last.global_id].end {
                    flag(ViolationKind::AssemblyPrecedence, vec![last.global_id, g]);
                }
            }
        }
    }

    for (machine, seq) in per_machine.iter_mut().enumerate() {
        seq.sort_by_key(|p| (p.start, p.end, p.global_id));
        // Sweep keeping the intervals still open at the current start.
        let mut open: Vec<&Placement> = Vec::new();
        for &p in seq.iter() {
            open.retain(|q| q.end > p.start);
            for q in &open {
                flag(ViolationKind::Overlap, vec![q.global_id, p.global_id]);
            }
            open.push(p);
        }
        for pair in seq.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let setup = instance.setup_time(machine, a.global_id, b.global_id);
            if a.end <= b.start && b.start - a.end < setup {
                flag(ViolationKind::SetupUnderflow, vec![a.global_id, b.global_id]);
            }
        }
    }
    Ok(violations)
}
