//! Shared helpers for integration tests: fixtures, random small instances,
//! an independent feasibility checker and brute-force optimum oracles.
#![allow(dead_code)]

use std::path::PathBuf;

use jobshop::model::{AssemblyArc, Job, Operation, SetupTimes};
use jobshop::parsers::{parse, FormatTag};
use jobshop::{Instance, Schedule, Time, Variant};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn fixture(name: &str, format: FormatTag) -> Instance {
    let text = std::fs::read_to_string(fixture_path(name)).unwrap();
    parse(format, &text).unwrap()
}

pub fn toy2x2() -> Instance {
    fixture("toy2x2.fjsp", FormatTag::Fjsp)
}

/// The static fixtures, one per variant: (file, format, variant).
pub const FIXTURES: [(&str, FormatTag, Variant); 5] = [
    ("jsp3x3.jsp", FormatTag::Jsp, Variant::Jsp),
    ("fsp3x3.jsp", FormatTag::Jsp, Variant::Fsp),
    ("fjsp4x3.fjsp", FormatTag::Fjsp, Variant::Fjsp),
    ("sdst3x2.fjsp_sdst", FormatTag::FjspSdst, Variant::FjspSdst),
    ("fajsp4x2.fajsp", FormatTag::Fajsp, Variant::Fajsp),
];

pub fn all_fixtures() -> Vec<Instance> {
    let mut out = vec![toy2x2()];
    for (name, format, _) in FIXTURES {
        out.push(fixture(name, format));
    }
    out
}

// ---------------------------------------------------------------------------
// random instances

/// Shape limits for [`random_instance`].
#[derive(Clone, Copy, Debug)]
pub struct Shape {
    pub machines: (usize, usize),
    pub jobs: (usize, usize),
    pub ops_per_job: (usize, usize),
    pub max_total_ops: usize,
    pub max_alternatives: usize,
    pub proc_time: (Time, Time),
    pub setup_time: (Time, Time),
}

impl Shape {
    pub const SMALL: Shape = Shape {
        machines: (2, 3),
        jobs: (2, 4),
        ops_per_job: (1, 3),
        max_total_ops: 8,
        max_alternatives: 2,
        proc_time: (1, 9),
        setup_time: (0, 3),
    };

    pub const MEDIUM: Shape = Shape {
        machines: (2, 6),
        jobs: (1, 10),
        ops_per_job: (1, 6),
        max_total_ops: 60,
        max_alternatives: 4,
        proc_time: (1, 99),
        setup_time: (0, 20),
    };
}

fn random_route<R: Rng + ?Sized>(rng: &mut R, m: usize, len: usize) -> Vec<usize> {
    let mut machines: Vec<usize> = (0..m).collect();
    machines.shuffle(rng);
    machines.truncate(len);
    machines
}

fn random_alternatives<R: Rng + ?Sized>(rng: &mut R, m: usize, shape: &Shape) -> Operation {
    let k = rng.random_range(1..=shape.max_alternatives.min(m));
    let machines = random_route(rng, m, k);
    Operation::new(
        machines
            .into_iter()
            .map(|mc| (mc, rng.random_range(shape.proc_time.0..=shape.proc_time.1))),
    )
}

/// A random valid instance of `variant` within `shape`.
pub fn random_instance<R: Rng + ?Sized>(rng: &mut R, variant: Variant, shape: &Shape) -> Instance {
    let m = rng.random_range(shape.machines.0..=shape.machines.1);
    let n = rng.random_range(shape.jobs.0..=shape.jobs.1);
    let mut budget = shape.max_total_ops;
    let mut lens = Vec::with_capacity(n);
    for j in 0..n {
        let reserve = n - j - 1;
        let hi = shape.ops_per_job.1.min(budget.saturating_sub(reserve)).max(1);
        let lo = shape.ops_per_job.0.min(hi);
        let len = match variant {
            Variant::Jsp | Variant::Fsp => m.min(budget.saturating_sub(reserve).max(1)),
            _ => rng.random_range(lo..=hi),
        };
        budget = budget.saturating_sub(len);
        lens.push(len);
    }
    if variant == Variant::Fsp {
        let shortest = *lens.iter().min().unwrap();
        lens.iter_mut().for_each(|l| *l = shortest);
    }
    let flow_route = random_route(rng, m, m);
    let jobs: Vec<Job> = lens
        .iter()
        .enumerate()
        .map(|(id, &len)| {
            let ops = match variant {
                Variant::Jsp => random_route(rng, m, len)
                    .into_iter()
                    .map(|mc| Operation::new([(mc, rng.random_range(shape.proc_time.0..=shape.proc_time.1))]))
                    .collect(),
                Variant::Fsp => flow_route[..len]
                    .iter()
                    .map(|&mc| Operation::new([(mc, rng.random_range(shape.proc_time.0..=shape.proc_time.1))]))
                    .collect(),
                _ => (0..len).map(|_| random_alternatives(rng, m, shape)).collect(),
            };
            Job::new(id, ops)
        })
        .collect();
    let total: usize = lens.iter().sum();
    let setup = (variant == Variant::FjspSdst).then(|| {
        let mut s = SetupTimes::zeros(m, total);
        for k in 0..m {
            for a in 0..total {
                for b in 0..total {
                    if a != b {
                        s.set(k, a, b, rng.random_range(shape.setup_time.0..=shape.setup_time.1));
                    }
                }
            }
        }
        s
    });
    let assembly = (variant == Variant::Fajsp).then(|| {
        let mut arcs = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if rng.random_bool(0.35) {
                    arcs.push(AssemblyArc {
                        predecessor_job: a,
                        successor_job: b,
                    });
                }
            }
        }
        arcs
    });
    Instance::new(variant, m, jobs, setup, assembly).unwrap()
}

/// A random instance representable in `format`, sized for round-trip fuzzing.
pub fn random_for_format<R: Rng + ?Sized>(rng: &mut R, format: FormatTag) -> Instance {
    match format {
        FormatTag::Jsp => {
            let m = rng.random_range(1..=6);
            let n = rng.random_range(1..=8);
            let jobs = (0..n)
                .map(|id| {
                    let ops = random_route(rng, m, m)
                        .into_iter()
                        .map(|mc| Operation::new([(mc, rng.random_range(1..=99))]))
                        .collect();
                    Job::new(id, ops)
                })
                .collect();
            Instance::new(Variant::Jsp, m, jobs, None, None).unwrap()
        }
        FormatTag::Fjsp => random_instance(rng, Variant::Fjsp, &Shape::MEDIUM),
        FormatTag::FjspSdst => {
            let shape = Shape {
                max_total_ops: 20,
                ..Shape::MEDIUM
            };
            random_instance(rng, Variant::FjspSdst, &shape)
        }
        FormatTag::Fajsp => random_instance(rng, Variant::Fajsp, &Shape::MEDIUM),
    }
}

/// Re-lays out instance text without changing its meaning: random runs of
/// spaces and tabs between tokens, comment lines, and (outside setup
/// matrices, where blank lines delimit blocks) extra blank lines.
pub fn perturb_layout<R: Rng + ?Sized>(rng: &mut R, text: &str, blank_lines: bool) -> String {
    let mut out = String::new();
    for line in text.lines() {
        if rng.random_bool(0.1) {
            out.push_str("# comment\n");
        }
        if blank_lines && rng.random_bool(0.1) {
            out.push('\n');
        }
        if rng.random_bool(0.2) {
            out.push_str(" \t");
        }
        for (i, token) in line.split_whitespace().enumerate() {
            if i > 0 {
                let run = rng.random_range(1..=3);
                for _ in 0..run {
                    out.push(if rng.random_bool(0.3) { '\t' } else { ' ' });
                }
            }
            out.push_str(token);
        }
        if rng.random_bool(0.2) {
            out.push(' ');
        }
        out.push('\n');
    }
    out
}

/// Number of (machine choice x operation interleaving) leaves the
/// exhaustive oracle visits, ignoring assembly pruning.
pub fn search_space(instance: &Instance) -> f64 {
    let mut leaves = 1.0;
    let mut placed = 0.0;
    for job in instance.jobs() {
        for (i, op) in job.operations.iter().enumerate() {
            leaves *= op.alternatives().len() as f64;
            // multinomial coefficient built incrementally
            placed += 1.0;
            leaves *= placed / (i + 1) as f64;
        }
    }
    leaves
}

// ---------------------------------------------------------------------------
// feasibility

/// Independent feasibility check; returns a description of the first problem.
pub fn check_feasible(instance: &Instance, schedule: &Schedule) -> Result<(), String> {
    let total = instance.total_ops();
    let mut seen = vec![None; total];
    for p in schedule.placements() {
        if p.global_id >= total {
            return Err(format!("unknown op {}", p.global_id));
        }
        if seen[p.global_id].replace(*p).is_some() {
            return Err(format!("op {} placed twice", p.global_id));
        }
    }
    let mut end_of = vec![0; total];
    for (g, p) in seen.iter().enumerate() {
        let p = p.ok_or_else(|| format!("op {g} missing"))?;
        let op = instance.op(g);
        let dur = op
            .alternatives()
            .iter()
            .find(|&&(mc, _)| mc == p.machine)
            .map(|&(_, d)| d)
            .ok_or_else(|| format!("op {g} on incompatible machine {}", p.machine))?;
        if p.end != p.start + dur {
            return Err(format!("op {g} has wrong duration"));
        }
        end_of[g] = p.end;
    }
    for job in instance.jobs() {
        let first = seen[job.operations[0].global_id].unwrap();
        if first.start < job.ready_time {
            return Err(format!("job {} starts before it is ready", job.id));
        }
        for pair in job.operations.windows(2) {
            if seen[pair[1].global_id].unwrap().start < end_of[pair[0].global_id] {
                return Err(format!("job {} precedence broken at op {}", job.id, pair[1].op_index));
            }
        }
        for &pred in instance.assembly_predecessors(job.id) {
            let last = instance.job(pred).operations.last().unwrap().global_id;
            if first.start < end_of[last] {
                return Err(format!("job {} starts before assembly predecessor {pred} ends", job.id));
            }
        }
    }
    for m in 0..instance.machine_count() {
        let mut on: Vec<_> = seen.iter().flatten().filter(|p| p.machine == m).copied().collect();
        on.sort_by_key(|p| (p.start, p.end));
        for w in on.windows(2) {
            let setup = instance.setup_time(m, w[0].global_id, w[1].global_id);
            if w[1].start < w[0].end + setup {
                return Err(format!(
                    "machine {m}: op {} starts at {} but {} ends at {} (setup {setup})",
                    w[1].global_id, w[1].start, w[0].global_id, w[0].end
                ));
            }
        }
    }
    let ms = seen.iter().flatten().map(|p| p.end).max().unwrap_or(0);
    if ms != schedule.makespan() {
        return Err(format!("makespan {} but latest end {ms}", schedule.makespan()));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// oracles

#[derive(Clone, Copy)]
struct Booked {
    gid: usize,
    start: Time,
    end: Time,
}

/// Search state shared by both oracles.
#[derive(Clone)]
struct Partial {
    next: Vec<usize>,
    job_end: Vec<Time>,
    machines: Vec<Vec<Booked>>,
    makespan: Time,
    placed: usize,
}

impl Partial {
    fn new(instance: &Instance) -> Self {
        Partial {
            next: vec![0; instance.job_count()],
            job_end: vec![0; instance.job_count()],
            machines: vec![Vec::new(); instance.machine_count()],
            makespan: 0,
            placed: 0,
        }
    }

    fn done(&self, instance: &Instance, job: usize) -> bool {
        self.next[job] == instance.job(job).operations.len()
    }

    /// Earliest time the next op of `job` may start, if it may be sequenced now.
    fn release(&self, instance: &Instance, job: usize) -> Option<Time> {
        if self.done(instance, job) {
            return None;
        }
        if self.next[job] > 0 {
            return Some(self.job_end[job]);
        }
        let mut t = instance.job(job).ready_time;
        for &pred in instance.assembly_predecessors(job) {
            if !self.done(instance, pred) {
                return None;
            }
            t = t.max(self.job_end[pred]);
        }
        Some(t)
    }

    /// Start time and insertion index for `gid` on `m`. With `gaps`, every
    /// position is tried and the earliest feasible start wins; otherwise the
    /// op goes after the last booked one.
    fn slot(&self, instance: &Instance, gid: usize, m: usize, p: Time, release: Time, gaps: bool) -> (Time, usize) {
        let booked = &self.machines[m];
        let after = |i: usize| -> Time {
            if i == 0 {
                release
            } else {
                let prev = booked[i - 1];
                release.max(prev.end + instance.setup_time(m, prev.gid, gid))
            }
        };
        if gaps {
            for (i, next) in booked.iter().enumerate() {
                let start = after(i);
                if start + p + instance.setup_time(m, gid, next.gid) <= next.start {
                    return (start, i);
                }
            }
        }
        (after(booked.len()), booked.len())
    }

    fn place(&self, instance: &Instance, job: usize, m: usize, p: Time, gaps: bool) -> Option<Self> {
        let release = self.release(instance, job)?;
        let gid = instance.job(job).operations[self.next[job]].global_id;
        let (start, at) = self.slot(instance, gid, m, p, release, gaps);
        let mut child = self.clone();
        child.machines[m].insert(at, Booked { gid, start, end: start + p });
        child.next[job] += 1;
        child.job_end[job] = start + p;
        child.makespan = child.makespan.max(start + p);
        child.placed += 1;
        Some(child)
    }
}

fn enumerate(instance: &Instance, state: &Partial, gaps: bool, prune: bool, best: &mut Time, leaves: &mut u64) {
    if state.placed == instance.total_ops() {
        *leaves += 1;
        *best = (*best).min(state.makespan);
        return;
    }
    for job in 0..instance.job_count() {
        if state.release(instance, job).is_none() {
            continue;
        }
        let op = &instance.job(job).operations[state.next[job]];
        for &(m, p) in op.alternatives() {
            let child = state.place(instance, job, m, p, gaps).unwrap();
            if prune && child.makespan >= *best {
                continue;
            }
            enumerate(instance, &child, gaps, prune, best, leaves);
        }
    }
}

/// Minimum makespan over every machine assignment and every
/// precedence-respecting operation sequence, each decoded by gap insertion.
/// No pruning: every leaf is decoded.
pub fn brute_force_gap(instance: &Instance) -> Time {
    let mut best = Time::MAX;
    let mut leaves = 0;
    enumerate(instance, &Partial::new(instance), true, false, &mut best, &mut leaves);
    assert!(leaves > 0, "oracle found no complete sequence");
    best
}

/// Exact optimum: depth-first search over (job, machine) choices with
/// append placement, pruned by the incumbent. Ordering the operations of an
/// optimal schedule by start time and appending them reproduces start times
/// no later than the optimal ones, so the search is exhaustive in effect.
pub fn optimal_makespan(instance: &Instance) -> Time {
    let mut best = Time::MAX;
    let mut leaves = 0;
    enumerate(instance, &Partial::new(instance), false, true, &mut best, &mut leaves);
    best
}

/// Same search as [`optimal_makespan`] without pruning.
pub fn optimal_makespan_unpruned(instance: &Instance) -> Time {
    let mut best = Time::MAX;
    let mut leaves = 0;
    enumerate(instance, &Partial::new(instance), false, false, &mut best, &mut leaves);
    best
}
