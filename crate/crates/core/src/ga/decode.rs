use super::Chromosome;
use crate::model::{Instance, PartialSchedule, PlacementMode, Schedule, ScheduleError};

/// Decodes a chromosome into an active schedule.
///
/// `os` is scanned left to right; the k-th occurrence of job `i` stands for
/// operation `k` of job `i`, which is placed on `ms[global_id]` at its
/// earliest gap-insert start. Occurrences of a job whose assembly
/// predecessors have not finished yet are held back, in order, and released
/// as soon as those jobs complete.
pub fn decode(instance: &Instance, chromosome: &Chromosome) -> Result<Schedule, ScheduleError> {
    let mut state = PartialSchedule::new(instance);
    let mut held: Vec<usize> = Vec::new();
    for &job in &chromosome.os {
        if job >= instance.job_count() {
            return Err(ScheduleError::UnknownOperation(job));
        }
        if blocked(&state, job) || held.contains(&job) {
            held.push(job);
            continue;
        }
        place_next(&mut state, chromosome, job)?;
        release_held(&mut state, chromosome, &mut held)?;
    }
    if !held.is_empty() {
        release_held(&mut state, chromosome, &mut held)?;
    }
    state.into_schedule()
}

fn blocked(state: &PartialSchedule, job: usize) -> bool {
    state.next_op_index(job) == 0
        && state
            .instance()
            .assembly_predecessors(job)
            .iter()
            .any(|&p| state.job_completion(p).is_none())
}

fn place_next(state: &mut PartialSchedule, chromosome: &Chromosome, job: usize) -> Result<(), ScheduleError> {
    let index = state.next_op_index(job);
    let op = state
        .instance()
        .op_at(job, index)
        .ok_or(ScheduleError::UnknownOperation(job))?;
    let g = op.global_id;
    let machine = *chromosome
        .ms
        .machines()
        .get(g)
        .ok_or(ScheduleError::UnknownOperation(g))?;
    state.place(g, machine, PlacementMode::GapInsert)?;
    Ok(())
}

fn release_held(state: &mut PartialSchedule, chromosome: &Chromosome, held: &mut Vec<usize>) -> Result<(), ScheduleError> {
    loop {
        let Some(pos) = held.iter().position(|&j| !blocked(state, j)) else {
            return Ok(());
        };
        let job = held.remove(pos);
        place_next(state, chromosome, job)?;
    }
}
