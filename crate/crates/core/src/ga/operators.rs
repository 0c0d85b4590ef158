use rand::seq::SliceRandom;
use rand::Rng;

use super::{Chromosome, GaParams};
use crate::heuristics::{global_selection, local_selection, random_assignment};
use crate::model::Instance;

/// Uniformly random permutation of the job-id multiset.
pub fn random_sequence<R: Rng + ?Sized>(instance: &Instance, rng: &mut R) -> Vec<usize> {
    let mut os: Vec<usize> = instance
        .jobs()
        .iter()
        .flat_map(|j| std::iter::repeat_n(j.id, j.operations.len()))
        .collect();
    os.shuffle(rng);
    os
}

/// Builds the initial population: Global Selection chromosomes first (each
/// with its own random job order), then Local Selection, then random
/// machine assignments. Every sequence vector is random.
pub fn init_population<R: Rng + ?Sized>(instance: &Instance, params: &GaParams, rng: &mut R) -> Vec<Chromosome> {
    let (global, local, random) = params.init_counts();
    let mut population = Vec::with_capacity(params.population_size);
    for _ in 0..global {
        let ms = global_selection(instance, rng);
        population.push(Chromosome {
            ms,
            os: random_sequence(instance, rng),
        });
    }
    if local > 0 {
        let ms = local_selection(instance);
        for _ in 0..local {
            population.push(Chromosome {
                ms: ms.clone(),
                os: random_sequence(instance, rng),
            });
        }
    }
    for _ in 0..random {
        let ms = random_assignment(instance, rng);
        population.push(Chromosome {
            ms,
            os: random_sequence(instance, rng),
        });
    }
    population
}

/// Two-point crossover on the machine vectors: positions `a..b` are swapped.
pub fn crossover_ms_at(p1: &Chromosome, p2: &Chromosome, a: usize, b: usize) -> (Chromosome, Chromosome) {
    let mut c1 = p1.clone();
    let mut c2 = p2.clone();
    let (a, b) = (a.min(b), a.max(b));
    c1.ms.machines_mut()[a..b].copy_from_slice(&p2.ms.machines()[a..b]);
    c2.ms.machines_mut()[a..b].copy_from_slice(&p1.ms.machines()[a..b]);
    (c1, c2)
}

pub fn crossover_ms<R: Rng + ?Sized>(p1: &Chromosome, p2: &Chromosome, rng: &mut R) -> (Chromosome, Chromosome) {
    let len = p1.ms.len();
    let a = rng.random_range(0..=len);
    let b = rng.random_range(0..=len);
    crossover_ms_at(p1, p2, a, b)
}

/// POX crossover. `keep[j]` marks the jobs whose positions child 1 inherits
/// from parent 1 (child 2 from parent 2); the other positions are filled with
/// the other parent's remaining genes in that parent's order.
pub fn crossover_os_with(p1: &Chromosome, p2: &Chromosome, keep: &[bool]) -> (Chromosome, Chromosome) {
    let pox = |base: &[usize], donor: &[usize]| -> Vec<usize> {
        let mut fill = donor.iter().copied().filter(|&j| !keep[j]);
        base.iter()
            .map(|&j| {
                if keep[j] {
                    j
                } else {
                    fill.next().expect("both parents hold the same multiset")
                }
            })
            .collect()
    };
    let mut c1 = p1.clone();
    let mut c2 = p2.clone();
    c1.os = pox(&p1.os, &p2.os);
    c2.os = pox(&p2.os, &p1.os);
    (c1, c2)
}

/// POX with a random non-empty proper subset of jobs. With a single job
/// no such subset exists and the parents are returned unchanged.
pub fn crossover_os<R: Rng + ?Sized>(p1: &Chromosome, p2: &Chromosome, rng: &mut R) -> (Chromosome, Chromosome) {
    let job_count = p1.os.iter().copied().max().map_or(0, |m| m + 1);
    if job_count < 2 {
        return (p1.clone(), p2.clone());
    }
    let mut jobs: Vec<usize> = (0..job_count).collect();
    jobs.shuffle(rng);
    let size = rng.random_range(1..job_count);
    let mut keep = vec![false; job_count];
    for &j in &jobs[..size] {
        keep[j] = true;
    }
    crossover_os_with(p1, p2, &keep)
}

/// Moves the operation at `position` to its fastest machine.
pub fn mutate_ms_at(mut c: Chromosome, instance: &Instance, position: usize) -> Chromosome {
    c.ms.machines_mut()[position] = instance.op(position).fastest_machine();
    c
}

pub fn mutate_ms<R: Rng + ?Sized>(c: Chromosome, instance: &Instance, rng: &mut R) -> Chromosome {
    let position = rng.random_range(0..c.ms.len());
    mutate_ms_at(c, instance, position)
}

pub fn mutate_os_at(mut c: Chromosome, i: usize, j: usize) -> Chromosome {
    c.os.swap(i, j);
    c
}

/// Swaps two uniformly drawn positions (possibly the same one).
pub fn mutate_os<R: Rng + ?Sized>(c: Chromosome, rng: &mut R) -> Chromosome {
    let i = rng.random_range(0..c.os.len());
    let j = rng.random_range(0..c.os.len());
    mutate_os_at(c, i, j)
}
