use super::{Instance, Placement, Schedule, ScheduleError, Time};

/// Where a new operation may go on its machine.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PlacementMode {
    /// Only after the last booked interval.
    Append,
    /// Any idle gap large enough to hold the operation and the setups around it.
    GapInsert,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Slot {
    start: Time,
    position: usize,
    setup: Time,
}

/// A schedule under construction. Operations of a job are always placed in
/// chain order, so the placed operations of every job form a prefix.
#[derive(Clone, Debug)]
pub struct PartialSchedule<'a> {
    instance: &'a Instance,
    placed: Vec<Option<Placement>>,
    // per machine: global ids sorted by start
    booked: Vec<Vec<usize>>,
    next_op: Vec<usize>,
    placed_count: usize,
}

impl<'a> PartialSchedule<'a> {
    pub fn new(instance: &'a Instance) -> Self {
        PartialSchedule {
            instance,
            placed: vec![None; instance.total_ops()],
            booked: vec![Vec::new(); instance.machine_count()],
            next_op: vec![0; instance.job_count()],
            placed_count: 0,
        }
    }

    pub fn instance(&self) -> &'a Instance {
        self.instance
    }

    pub fn placement(&self, global_id: usize) -> Option<&Placement> {
        self.placed.get(global_id)?.as_ref()
    }

    pub fn is_placed(&self, global_id: usize) -> bool {
        self.placement(global_id).is_some()
    }

    pub fn is_complete(&self) -> bool {
        self.placed_count == self.placed.len()
    }

    pub fn placed_count(&self) -> usize {
        self.placed_count
    }

    /// Index (within its job) of the job's first unplaced operation.
    pub fn next_op_index(&self, job: usize) -> usize {
        self.next_op[job]
    }

    /// Completion time of the job, once all of its operations are placed.
    pub fn job_completion(&self, job: usize) -> Option<Time> {
        let ops = &self.instance.job(job).operations;
        if self.next_op[job] < ops.len() {
            return None;
        }
        self.placement(ops[ops.len() - 1].global_id).map(|p| p.end)
    }

    /// Global ids booked on `machine`, in start order.
    pub fn machine_sequence(&self, machine: usize) -> &[usize] {
        &self.booked[machine]
    }

    /// End of the last interval booked on `machine` (0 when idle).
    pub fn machine_free_at(&self, machine: usize) -> Time {
        self.booked[machine]
            .last()
            .map_or(0, |&g| self.placed[g].expect("booked op is placed").end)
    }

    /// Earliest time the operation's job chain, ready time and assembly
    /// predecessors allow it to start, ignoring machines.
    pub fn release_time(&self, global_id: usize) -> Result<Time, ScheduleError> {
        if global_id >= self.placed.len() {
            return Err(ScheduleError::UnknownOperation(global_id));
        }
        let op = self.instance.op(global_id);
        let job = self.instance.job(op.job_id);
        let next = self.next_op[op.job_id];
        if op.op_index < next {
            return Err(ScheduleError::AlreadyPlaced(global_id));
        }
        if op.op_index > next {
            return Err(ScheduleError::PrecedenceUnscheduled(global_id));
        }
        let mut release = job.ready_time;
        if op.op_index > 0 {
            let pred = job.operations[op.op_index - 1].global_id;
            release = release.max(self.placed[pred].expect("prefix placed").end);
        } else {
            for &pred_job in self.instance.assembly_predecessors(op.job_id) {
                let done = self
                    .job_completion(pred_job)
                    .ok_or(ScheduleError::AssemblyUnscheduled {
                        global_id,
                        job: pred_job,
                    })?;
                release = release.max(done);
            }
        }
        Ok(release)
    }

    fn slot(&self, global_id: usize, machine: usize, mode: PlacementMode) -> Result<Slot, ScheduleError> {
        let release = self.release_time(global_id)?;
        let p = self
            .instance
            .op(global_id)
            .processing_time(machine)
            .ok_or(ScheduleError::MachineIncompatible { global_id, machine })?;
        let booked = &self.booked[machine];
        let at = |g: usize| self.placed[g].expect("booked op is placed");
        let candidate = |position: usize| -> Slot {
            match position.checked_sub(1).map(|i| booked[i]) {
                Some(prev) => {
                    let setup = self.instance.setup_time(machine, prev, global_id);
                    Slot {
                        start: release.max(at(prev).end + setup),
                        position,
                        setup,
                    }
                }
                None => Slot {
                    start: release,
                    position,
                    setup: 0,
                },
            }
        };
        let append = candidate(booked.len());
        if mode == PlacementMode::Append {
            return Ok(append);
        }
        let mut best = append;
        for (position, &next) in booked.iter().enumerate() {
            let slot = candidate(position);
            if slot.start >= best.start {
                continue;
            }
            let follow_setup = self.instance.setup_time(machine, global_id, next);
            if slot.start + p + follow_setup <= at(next).start {
                best = slot;
            }
        }
        Ok(best)
    }

    /// Smallest feasible start for the operation on `machine`.
    pub fn earliest_start(
        &self,
        global_id: usize,
        machine: usize,
        mode: PlacementMode,
    ) -> Result<Time, ScheduleError> {
        self.slot(global_id, machine, mode).map(|s| s.start)
    }

    /// Books the operation at its earliest start and returns the placement.
    pub fn place(
        &mut self,
        global_id: usize,
        machine: usize,
        mode: PlacementMode,
    ) -> Result<Placement, ScheduleError> {
        let slot = self.slot(global_id, machine, mode)?;
        let op = self.instance.op(global_id);
        let p = op.processing_time(machine).expect("checked by slot");
        let placement = Placement {
            global_id,
            machine,
            start: slot.start,
            end: slot.start + p,
            setup_applied: slot.setup,
        };
        if let Some(&next) = self.booked[machine].get(slot.position) {
            let follow = self.instance.setup_time(machine, global_id, next);
            if let Some(next) = self.placed[next].as_mut() {
                next.setup_applied = follow;
            }
        }
        self.booked[machine].insert(slot.position, global_id);
        self.placed[global_id] = Some(placement);
        self.next_op[op.job_id] += 1;
        self.placed_count += 1;
        Ok(placement)
    }

    /// Largest end time among placed operations.
    pub fn current_makespan(&self) -> Time {
        self.placed.iter().flatten().map(|p| p.end).max().unwrap_or(0)
    }

    pub fn into_schedule(self) -> Result<Schedule, ScheduleError> {
        let mut placements = Vec::with_capacity(self.placed.len());
        for (g, p) in self.placed.into_iter().enumerate() {
            placements.push(p.ok_or(ScheduleError::Missing(g))?);
        }
        Ok(Schedule::new(placements))
    }
}
