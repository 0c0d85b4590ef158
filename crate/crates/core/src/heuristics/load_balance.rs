use std::ops::Index;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::model::{Instance, Time};

/// Chosen machine for every operation, in global id order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MachineAssignment(Vec<usize>);

impl MachineAssignment {
    pub fn new(machines: Vec<usize>) -> Self {
        MachineAssignment(machines)
    }

    pub fn machines(&self) -> &[usize] {
        &self.0
    }

    pub fn machines_mut(&mut self) -> &mut [usize] {
        &mut self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// True when the length matches and every entry is an alternative of its operation.
    pub fn is_valid_for(&self, instance: &Instance) -> bool {
        self.0.len() == instance.total_ops()
            && instance
                .ops()
                .zip(&self.0)
                .all(|(op, &machine)| op.is_compatible(machine))
    }
}

impl Index<usize> for MachineAssignment {
    type Output = usize;

    fn index(&self, global_id: usize) -> &usize {
        &self.0[global_id]
    }
}

/// Total processing time booked on each machine by `assignment`.
pub fn machine_loads(instance: &Instance, assignment: &MachineAssignment) -> Vec<Time> {
    let mut loads = vec![0; instance.machine_count()];
    for (op, &machine) in instance.ops().zip(assignment.machines()) {
        loads[machine] += op.processing_time(machine).unwrap_or(0);
    }
    loads
}

fn assign_job(instance: &Instance, job: usize, loads: &mut [Time], out: &mut [usize]) {
    for op in &instance.job(job).operations {
        let mut best = op.alternatives()[0];
        for &(machine, p) in &op.alternatives()[1..] {
            if loads[machine] + p < loads[best.0] + best.1 {
                best = (machine, p);
            }
        }
        loads[best.0] += best.1;
        out[op.global_id] = best.0;
    }
}

/// Global Selection with a caller-chosen job order. One load array is kept
/// across all jobs; each operation goes to the machine minimising
/// `load + processing time`.
pub fn global_selection_ordered(instance: &Instance, job_order: &[usize]) -> MachineAssignment {
    let mut loads = vec![0; instance.machine_count()];
    let mut out = vec![0; instance.total_ops()];
    for &job in job_order {
        assign_job(instance, job, &mut loads, &mut out);
    }
    MachineAssignment(out)
}

/// Global Selection over a fresh random job order; also returns that order.
pub fn global_selection_traced<R: Rng + ?Sized>(instance: &Instance, rng: &mut R) -> (MachineAssignment, Vec<usize>) {
    let mut order: Vec<usize> = (0..instance.job_count()).collect();
    order.shuffle(rng);
    (global_selection_ordered(instance, &order), order)
}

pub fn global_selection<R: Rng + ?Sized>(instance: &Instance, rng: &mut R) -> MachineAssignment {
    global_selection_traced(instance, rng).0
}

/// Local Selection: jobs in id order, with the load array reset per job.
pub fn local_selection(instance: &Instance) -> MachineAssignment {
    let mut out = vec![0; instance.total_ops()];
    for job in 0..instance.job_count() {
        let mut loads = vec![0; instance.machine_count()];
        assign_job(instance, job, &mut loads, &mut out);
    }
    MachineAssignment(out)
}

/// Uniformly random alternative for every operation.
pub fn random_assignment<R: Rng + ?Sized>(instance: &Instance, rng: &mut R) -> MachineAssignment {
    MachineAssignment(
        instance
            .ops()
            .map(|op| op.alternatives()[rng.random_range(0..op.alternatives().len())].0)
            .collect(),
    )
}
