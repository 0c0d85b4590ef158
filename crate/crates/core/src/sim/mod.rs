//! Discrete-event simulation of a flexible job shop with online job arrivals.
//!
//! Jobs arrive with exponential interarrival times and are generated at the
//! moment they arrive, so no decision can depend on a job that has not
//! arrived yet. Whenever events fire, the shop is dispatched non-delay: as
//! long as some idle machine can process some ready operation, the operation
//! rule picks among those operations and the machine rule picks among the
//! idle compatible machines.

mod config;

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::io::{self, Write};

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use serde::Serialize;

use crate::heuristics::{MachRule, OpRule, PriorityKey};
use crate::model::{Instance, Job, Operation, Placement, Schedule, Time, Variant};

pub use config::{ArrivalConfig, ConfigError, IntRange};

/// Draws one job. Global ids are assigned later by [`Instance::new`].
pub fn generate_job<R: Rng + ?Sized>(config: &ArrivalConfig, rng: &mut R, id: usize, arrival_time: Time) -> Job {
    let ops = rng.random_range(config.ops_per_job.lo..=config.ops_per_job.hi);
    let operations = (0..ops)
        .map(|_| {
            let k = rng.random_range(config.alternatives_per_op.lo..=config.alternatives_per_op.hi) as usize;
            let mut machines = sample(rng, config.machine_count, k).into_vec();
            machines.sort_unstable();
            Operation::new(
                machines
                    .into_iter()
                    .map(|m| (m, rng.random_range(config.proc_time.lo..=config.proc_time.hi))),
            )
        })
        .collect();
    Job::new(id, operations).with_ready_time(arrival_time)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceKind {
    Arrival,
    Start,
    Complete,
}

/// One line of the event trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TraceEvent {
    pub time: Time,
    pub event: TraceKind,
    pub job: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub op: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub machine: Option<usize>,
}

/// Writes the trace as JSON lines.
pub fn write_trace<W: Write>(trace: &[TraceEvent], mut out: W) -> io::Result<()> {
    for event in trace {
        serde_json::to_writer(&mut out, event)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimStats {
    pub makespan: Time,
    /// Mean over jobs of completion time minus arrival time.
    pub mean_flow_time: f64,
    /// Busy fraction of each machine over `[0, makespan]`.
    pub machine_utilizations: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct SimOutcome {
    pub trace: Vec<TraceEvent>,
    /// The realised jobs, with arrival times as ready times.
    pub instance: Instance,
    pub schedule: Schedule,
    pub stats: SimStats,
}

impl SimOutcome {
    pub fn arrivals(&self) -> impl Iterator<Item = Time> + '_ {
        self.instance.jobs().iter().map(|j| j.ready_time)
    }

    /// Last arrival time divided by the number of jobs (the clock starts at 0).
    pub fn mean_interarrival(&self) -> f64 {
        let last = self.arrivals().max().unwrap_or(0);
        last as f64 / self.instance.job_count() as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum EventKind {
    // arrivals sort before releases at equal times
    Arrival,
    Release,
}

struct Shop {
    jobs: Vec<Job>,
    next_op: Vec<usize>,
    eligible_at: Vec<Time>,
    remaining_work: Vec<Time>,
    ready: Vec<usize>,
    running: Vec<Option<(usize, usize)>>,
    placements: Vec<Placement>,
    completion: Vec<Time>,
    trace: Vec<TraceEvent>,
    next_global: usize,
    // global id of each job's first operation
    first_global: Vec<usize>,
}

impl Shop {
    fn arrive(&mut self, job: Job, now: Time) {
        let id = job.id;
        self.first_global.push(self.next_global);
        self.next_global += job.operations.len();
        self.remaining_work
            .push(job.operations.iter().map(|o| o.min_processing_time()).sum());
        self.next_op.push(0);
        self.eligible_at.push(now);
        self.completion.push(0);
        self.jobs.push(job);
        self.ready.push(id);
        self.trace.push(TraceEvent {
            time: now,
            event: TraceKind::Arrival,
            job: id,
            op: None,
            machine: None,
        });
    }

    fn release(&mut self, machine: usize, now: Time) {
        let (job, index) = self.running[machine].take().expect("release of a busy machine");
        self.trace.push(TraceEvent {
            time: now,
            event: TraceKind::Complete,
            job,
            op: Some(index),
            machine: Some(machine),
        });
        self.next_op[job] += 1;
        if self.next_op[job] < self.jobs[job].operations.len() {
            self.eligible_at[job] = now;
            self.ready.push(job);
        } else {
            self.completion[job] = now;
        }
    }

    /// Starts operations until no idle machine fits any ready operation.
    fn dispatch(&mut self, now: Time, op_rule: OpRule, mach_rule: MachRule, events: &mut BinaryHeap<Reverse<(Time, EventKind, usize)>>) {
        loop {
            let mut best: Option<(PriorityKey, usize)> = None;
            for (slot, &job) in self.ready.iter().enumerate() {
                let index = self.next_op[job];
                let op = &self.jobs[job].operations[index];
                if !op.alternatives().iter().any(|&(m, _)| self.running[m].is_none()) {
                    continue;
                }
                let key = PriorityKey::new(
                    op_rule,
                    self.eligible_at[job],
                    self.jobs[job].operations.len() - index,
                    self.remaining_work[job],
                    job,
                    index,
                );
                if best.is_none_or(|(b, _)| key < b) {
                    best = Some((key, slot));
                }
            }
            let Some((_, slot)) = best else { return };
            let job = self.ready.swap_remove(slot);
            let index = self.next_op[job];
            let op = &self.jobs[job].operations[index];
            let machine = mach_rule
                .choose(
                    op.alternatives()
                        .iter()
                        .filter(|&&(m, _)| self.running[m].is_none())
                        .map(|&(m, p)| (m, now, p)),
                )
                .expect("an idle compatible machine exists");
            let p = op.processing_time(machine).expect("compatible");
            self.remaining_work[job] -= op.min_processing_time();
            self.running[machine] = Some((job, index));
            self.placements.push(Placement {
                global_id: self.first_global[job] + index,
                machine,
                start: now,
                end: now + p,
                setup_applied: 0,
            });
            self.trace.push(TraceEvent {
                time: now,
                event: TraceKind::Start,
                job,
                op: Some(index),
                machine: Some(machine),
            });
            events.push(Reverse((now + p, EventKind::Release, machine)));
        }
    }
}

/// Runs the online simulation until all `config.job_count` jobs are done.
pub fn run_online(config: &ArrivalConfig, op_rule: OpRule, mach_rule: MachRule) -> Result<SimOutcome, ConfigError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let gaps = Exp::new(1.0 / config.interarrival_mean)
        .map_err(|e| ConfigError::Invalid(format!("interarrival distribution: {e}")))?;
    let n = config.job_count;
    let m = config.machine_count;

    let mut shop = Shop {
        jobs: Vec::with_capacity(n),
        next_op: Vec::with_capacity(n),
        eligible_at: Vec::with_capacity(n),
        remaining_work: Vec::with_capacity(n),
        ready: Vec::new(),
        running: vec![None; m],
        placements: Vec::new(),
        completion: Vec::with_capacity(n),
        trace: Vec::new(),
        next_global: 0,
        first_global: Vec::with_capacity(n),
    };
    let mut events = BinaryHeap::new();
    // Arrival times are the rounded cumulative sums of the real-valued gaps,
    // so rounding errors do not accumulate.
    let mut clock = gaps.sample(&mut rng);
    events.push(Reverse((clock.round() as Time, EventKind::Arrival, 0)));

    while let Some(&Reverse((now, _, _))) = events.peek() {
        while let Some(&Reverse((time, kind, id))) = events.peek() {
            if time != now {
                break;
            }
            events.pop();
            match kind {
                EventKind::Arrival => {
                    let job = generate_job(config, &mut rng, id, now);
                    shop.arrive(job, now);
                    if id + 1 < n {
                        clock += gaps.sample(&mut rng);
                        let at = (clock.round() as Time).max(now);
                        events.push(Reverse((at, EventKind::Arrival, id + 1)));
                    }
                }
                EventKind::Release => shop.release(id, now),
            }
        }
        shop.dispatch(now, op_rule, mach_rule, &mut events);
    }

    let makespan = shop.placements.iter().map(|p| p.end).max().unwrap_or(0);
    let mut busy = vec![0; m];
    for p in &shop.placements {
        busy[p.machine] += p.end - p.start;
    }
    let flow: f64 = shop
        .jobs
        .iter()
        .zip(&shop.completion)
        .map(|(j, &c)| (c - j.ready_time) as f64)
        .sum();
    let stats = SimStats {
        makespan,
        mean_flow_time: flow / n as f64,
        machine_utilizations: busy
            .iter()
            .map(|&b| if makespan == 0 { 0.0 } else { b as f64 / makespan as f64 })
            .collect(),
    };
    let instance = Instance::new(Variant::Fjsp, m, shop.jobs, None, None)
        .map_err(|e| ConfigError::Invalid(e.to_string()))?;
    Ok(SimOutcome {
        trace: shop.trace,
        instance,
        schedule: Schedule::new(shop.placements),
        stats,
    })
}
