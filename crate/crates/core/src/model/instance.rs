use std::fmt;

use thiserror::Error;

/// Integral time unit used throughout the crate.
pub type Time = u64;

/// Problem variant an [`Instance`] was built for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    Jsp,
    Fsp,
    Fjsp,
    FjspSdst,
    Fajsp,
}

impl Variant {
    pub const ALL: [Variant; 5] = [
        Variant::Jsp,
        Variant::Fsp,
        Variant::Fjsp,
        Variant::FjspSdst,
        Variant::Fajsp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Jsp => "JSP",
            Variant::Fsp => "FSP",
            Variant::Fjsp => "FJSP",
            Variant::FjspSdst => "FJSP_SDST",
            Variant::Fajsp => "FAJSP",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Errors raised when an [`Instance`] would break one of its invariants.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("instance needs at least one job and one machine")]
    Empty,
    #[error("job {job} has no operations")]
    EmptyJob { job: usize },
    #[error("job at position {position} has id {id}")]
    JobId { position: usize, id: usize },
    #[error("operation {job}.{op} has no machine alternatives")]
    NoAlternatives { job: usize, op: usize },
    #[error("operation {job}.{op} references machine {machine} but the shop has {machine_count} machines")]
    MachineIndex {
        job: usize,
        op: usize,
        machine: usize,
        machine_count: usize,
    },
    #[error("operation {job}.{op} lists machine {machine} twice")]
    DuplicateAlternative { job: usize, op: usize, machine: usize },
    #[error("operation {job}.{op} has zero processing time on machine {machine}")]
    ZeroProcessingTime { job: usize, op: usize, machine: usize },
    #[error("{variant} instances need exactly one machine per operation ({job}.{op} has {count})")]
    Inflexible {
        variant: Variant,
        job: usize,
        op: usize,
        count: usize,
    },
    #[error("FSP instances need every job to visit the machines in the same order (job {job} differs)")]
    FlowOrder { job: usize },
    #[error("FJSP_SDST instances need setup times")]
    MissingSetup,
    #[error("setup times: expected {expected} matrices of size {size}x{size}")]
    SetupShape { expected: usize, size: usize },
    #[error("FAJSP instances need an assembly section")]
    MissingAssembly,
    #[error("assembly arc {predecessor}->{successor} references a job outside 0..{job_count}")]
    ArcJob {
        predecessor: usize,
        successor: usize,
        job_count: usize,
    },
    #[error("assembly arcs form a cycle through jobs {0:?}")]
    Cycle(Vec<usize>),
}

/// One operation with its machine alternatives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Operation {
    pub job_id: usize,
    pub op_index: usize,
    pub global_id: usize,
    alternatives: Vec<(usize, Time)>,
}

impl Operation {
    /// Alternatives are kept sorted by machine index.
    pub fn new(alternatives: impl IntoIterator<Item = (usize, Time)>) -> Self {
        let mut alternatives: Vec<_> = alternatives.into_iter().collect();
        alternatives.sort_by_key(|&(machine, _)| machine);
        Operation {
            job_id: 0,
            op_index: 0,
            global_id: 0,
            alternatives,
        }
    }

    /// `(machine, processing_time)` pairs in ascending machine order.
    pub fn alternatives(&self) -> &[(usize, Time)] {
        &self.alternatives
    }

    pub fn processing_time(&self, machine: usize) -> Option<Time> {
        self.alternatives
            .binary_search_by_key(&machine, |&(k, _)| k)
            .ok()
            .map(|i| self.alternatives[i].1)
    }

    pub fn is_compatible(&self, machine: usize) -> bool {
        self.processing_time(machine).is_some()
    }

    /// Shortest processing time over the alternatives.
    pub fn min_processing_time(&self) -> Time {
        self.alternatives.iter().map(|&(_, p)| p).min().unwrap_or(0)
    }

    /// Machine with the shortest processing time, lowest index on ties.
    pub fn fastest_machine(&self) -> usize {
        let mut best = self.alternatives[0];
        for &alt in &self.alternatives[1..] {
            if alt.1 < best.1 {
                best = alt;
            }
        }
        best.0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Job {
    pub id: usize,
    pub operations: Vec<Operation>,
    /// Earliest time any operation of the job may start.
    pub ready_time: Time,
}

impl Job {
    pub fn new(id: usize, operations: Vec<Operation>) -> Self {
        Job {
            id,
            operations,
            ready_time: 0,
        }
    }

    pub fn with_ready_time(mut self, ready_time: Time) -> Self {
        self.ready_time = ready_time;
        self
    }
}

/// Sequence-dependent setup times, one square matrix per machine indexed by
/// operation global id. Entry `[a][b]` is the setup paid on that machine when
/// `b` directly follows `a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetupTimes {
    size: usize,
    // machine-major, then row-major
    entries: Vec<Time>,
}

impl SetupTimes {
    pub fn zeros(machine_count: usize, size: usize) -> Self {
        SetupTimes {
            size,
            entries: vec![0; machine_count * size * size],
        }
    }

    /// Builds from per-machine matrices; every matrix must be `size x size`.
    pub fn from_matrices(matrices: Vec<Vec<Vec<Time>>>, size: usize) -> Result<Self, ModelError> {
        let expected = matrices.len();
        let mut entries = Vec::with_capacity(expected * size * size);
        for matrix in matrices {
            if matrix.len() != size || matrix.iter().any(|row| row.len() != size) {
                return Err(ModelError::SetupShape { expected, size });
            }
            entries.extend(matrix.into_iter().flatten());
        }
        Ok(SetupTimes { size, entries })
    }

    pub fn machine_count(&self) -> usize {
        if self.size == 0 {
            0
        } else {
            self.entries.len() / (self.size * self.size)
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, machine: usize, from: usize, to: usize) -> Time {
        self.entries[(machine * self.size + from) * self.size + to]
    }

    pub fn set(&mut self, machine: usize, from: usize, to: usize, value: Time) {
        self.entries[(machine * self.size + from) * self.size + to] = value;
    }

    pub fn row(&self, machine: usize, from: usize) -> &[Time] {
        let start = (machine * self.size + from) * self.size;
        &self.entries[start..start + self.size]
    }
}

/// Job `successor_job` may not start before `predecessor_job` has finished.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AssemblyArc {
    pub predecessor_job: usize,
    pub successor_job: usize,
}

/// Immutable problem description shared by every solver.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    machine_count: usize,
    jobs: Vec<Job>,
    setup: Option<SetupTimes>,
    assembly: Option<Vec<AssemblyArc>>,
    variant: Variant,
    // derived
    op_index: Vec<(usize, usize)>,
    assembly_preds: Vec<Vec<usize>>,
}

impl Instance {
    /// Validates the invariants and assigns job-major global ids.
    pub fn new(
        variant: Variant,
        machine_count: usize,
        mut jobs: Vec<Job>,
        setup: Option<SetupTimes>,
        assembly: Option<Vec<AssemblyArc>>,
    ) -> Result<Self, ModelError> {
        if jobs.is_empty() || machine_count == 0 {
            return Err(ModelError::Empty);
        }
        let mut op_index = Vec::new();
        for (position, job) in jobs.iter_mut().enumerate() {
            if job.id != position {
                return Err(ModelError::JobId {
                    position,
                    id: job.id,
                });
            }
            if job.operations.is_empty() {
                return Err(ModelError::EmptyJob { job: position });
            }
            for (index, op) in job.operations.iter_mut().enumerate() {
                op.job_id = position;
                op.op_index = index;
                op.global_id = op_index.len();
                op_index.push((position, index));
                check_operation(op, machine_count)?;
                if matches!(variant, Variant::Jsp | Variant::Fsp) && op.alternatives.len() != 1 {
                    return Err(ModelError::Inflexible {
                        variant,
                        job: position,
                        op: index,
                        count: op.alternatives.len(),
                    });
                }
            }
        }
        if variant == Variant::Fsp {
            let route = |job: &Job| -> Vec<usize> {
                job.operations.iter().map(|o| o.alternatives[0].0).collect()
            };
            let first = route(&jobs[0]);
            if let Some(job) = jobs.iter().find(|j| route(j) != first) {
                return Err(ModelError::FlowOrder { job: job.id });
            }
        }
        if let Some(setup) = &setup {
            if setup.machine_count() != machine_count || setup.size() != op_index.len() {
                return Err(ModelError::SetupShape {
                    expected: machine_count,
                    size: op_index.len(),
                });
            }
        } else if variant == Variant::FjspSdst {
            return Err(ModelError::MissingSetup);
        }
        let mut assembly_preds = vec![Vec::new(); jobs.len()];
        match &assembly {
            Some(arcs) => {
                for arc in arcs {
                    if arc.predecessor_job >= jobs.len() || arc.successor_job >= jobs.len() {
                        return Err(ModelError::ArcJob {
                            predecessor: arc.predecessor_job,
                            successor: arc.successor_job,
                            job_count: jobs.len(),
                        });
                    }
                    assembly_preds[arc.successor_job].push(arc.predecessor_job);
                }
                if let Some(cycle) = find_cycle(jobs.len(), arcs) {
                    return Err(ModelError::Cycle(cycle));
                }
                for preds in &mut assembly_preds {
                    preds.sort_unstable();
                    preds.dedup();
                }
            }
            None if variant == Variant::Fajsp => return Err(ModelError::MissingAssembly),
            None => {}
        }
        Ok(Instance {
            machine_count,
            jobs,
            setup,
            assembly,
            variant,
            op_index,
            assembly_preds,
        })
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn machine_count(&self) -> usize {
        self.machine_count
    }

    pub fn job_count(&self) -> usize {
        self.jobs.len()
    }

    pub fn jobs(&self) -> &[Job] {
        &self.jobs
    }

    pub fn job(&self, id: usize) -> &Job {
        &self.jobs[id]
    }

    pub fn total_ops(&self) -> usize {
        self.op_index.len()
    }

    /// Operation by global id.
    pub fn op(&self, global_id: usize) -> &Operation {
        let (job, index) = self.op_index[global_id];
        &self.jobs[job].operations[index]
    }

    /// Operation by `(job, index within job)`, if it exists.
    pub fn op_at(&self, job: usize, index: usize) -> Option<&Operation> {
        self.jobs.get(job)?.operations.get(index)
    }

    /// All operations in global id order.
    pub fn ops(&self) -> impl Iterator<Item = &Operation> + '_ {
        self.jobs.iter().flat_map(|j| j.operations.iter())
    }

    pub fn setup(&self) -> Option<&SetupTimes> {
        self.setup.as_ref()
    }

    /// Setup on `machine` between two operations, 0 when no matrices are configured.
    pub fn setup_time(&self, machine: usize, from: usize, to: usize) -> Time {
        self.setup.as_ref().map_or(0, |s| s.get(machine, from, to))
    }

    pub fn assembly(&self) -> Option<&[AssemblyArc]> {
        self.assembly.as_deref()
    }

    /// Jobs that must finish before `job` may start (sorted, deduplicated).
    pub fn assembly_predecessors(&self, job: usize) -> &[usize] {
        &self.assembly_preds[job]
    }

    /// True when every operation has a single machine and all jobs share a route.
    pub fn is_flow_shop(&self) -> bool {
        if self.ops().any(|op| op.alternatives.len() != 1) {
            return false;
        }
        let route = |job: &Job| -> Vec<usize> {
            job.operations.iter().map(|o| o.alternatives[0].0).collect()
        };
        let first = route(&self.jobs[0]);
        self.jobs.iter().all(|j| route(j) == first)
    }

    /// Re-tags the instance with another variant, re-checking invariants.
    pub fn with_variant(self, variant: Variant) -> Result<Self, ModelError> {
        Instance::new(variant, self.machine_count, self.jobs, self.setup, self.assembly)
    }
}

fn check_operation(op: &Operation, machine_count: usize) -> Result<(), ModelError> {
    let (job, index) = (op.job_id, op.op_index);
    if op.alternatives.is_empty() {
        return Err(ModelError::NoAlternatives { job, op: index });
    }
    for (i, &(machine, p)) in op.alternatives.iter().enumerate() {
        if machine >= machine_count {
            return Err(ModelError::MachineIndex {
                job,
                op: index,
                machine,
                machine_count,
            });
        }
        if i > 0 && op.alternatives[i - 1].0 == machine {
            return Err(ModelError::DuplicateAlternative {
                job,
                op: index,
                machine,
            });
        }
        if p == 0 {
            return Err(ModelError::ZeroProcessingTime {
                job,
                op: index,
                machine,
            });
        }
    }
    Ok(())
}

/// Returns the jobs on some directed cycle, if the arcs contain one.
pub(crate) fn find_cycle(job_count: usize, arcs: &[AssemblyArc]) -> Option<Vec<usize>> {
    let mut succ = vec![Vec::new(); job_count];
    for arc in arcs {
        succ[arc.predecessor_job].push(arc.successor_job);
    }
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut color = vec![0u8; job_count];
    let mut parent = vec![usize::MAX; job_count];
    for root in 0..job_count {
        if color[root] != 0 {
            continue;
        }
        let mut stack = vec![(root, 0usize)];
        color[root] = 1;
        while let Some(&mut (node, ref mut next)) = stack.last_mut() {
            if let Some(&to) = succ[node].get(*next) {
                *next += 1;
                match color[to] {
                    0 => {
                        color[to] = 1;
                        parent[to] = node;
                        stack.push((to, 0));
                    }
                    1 => {
                        let mut cycle = vec![to];
                        let mut at = node;
                        while at != to {
                            cycle.push(at);
                            at = parent[at];
                        }
                        cycle.reverse();
                        cycle.rotate_right(1);
                        return Some(cycle);
                    }
                    _ => {}
                }
            } else {
                color[node] = 2;
                stack.pop();
            }
        }
    }
    None
}
