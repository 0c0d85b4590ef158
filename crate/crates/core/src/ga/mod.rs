//! Genetic algorithm over a two-vector encoding: a machine-selection vector
//! (one machine per operation) and an operation-sequence vector (job ids,
//! job `i` repeated once per operation).
//!
//! The population is seeded from Global Selection, Local Selection and
//! random assignments; offspring come from two-point crossover on machines,
//! POX crossover on sequences, shortest-time machine mutation and swap
//! sequence mutation. Chromosomes are decoded into active schedules by gap
//! insertion.

mod decode;
mod evolve;
mod operators;

use thiserror::Error;

use crate::heuristics::MachineAssignment;
use crate::model::{Instance, ScheduleError};

pub use decode::decode;
pub use evolve::{evolve, evolve_seeded, evolve_with, GaOutcome};
pub use operators::{
    crossover_ms, crossover_ms_at, crossover_os, crossover_os_with, init_population, mutate_ms,
    mutate_ms_at, mutate_os, mutate_os_at, random_sequence,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GaError {
    #[error("invalid GA parameters: {0}")]
    InvalidParams(String),
    #[error("chromosome does not decode: {0}")]
    Decode(#[from] ScheduleError),
}

/// Machine-selection plus operation-sequence genome.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Chromosome {
    pub ms: MachineAssignment,
    pub os: Vec<usize>,
}

impl Chromosome {
    /// Checks both invariants: every machine is an alternative of its
    /// operation, and job `i` occurs in `os` exactly as often as it has operations.
    pub fn is_valid_for(&self, instance: &Instance) -> bool {
        if !self.ms.is_valid_for(instance) || self.os.len() != instance.total_ops() {
            return false;
        }
        let mut counts = vec![0usize; instance.job_count()];
        for &job in &self.os {
            match counts.get_mut(job) {
                Some(c) => *c += 1,
                None => return false,
            }
        }
        instance
            .jobs()
            .iter()
            .zip(&counts)
            .all(|(job, &c)| job.operations.len() == c)
    }
}

/// Fractions of the initial population built by each initialiser.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InitMix {
    pub global: f64,
    pub local: f64,
    pub random: f64,
}

impl Default for InitMix {
    fn default() -> Self {
        InitMix {
            global: 0.6,
            local: 0.3,
            random: 0.1,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GaParams {
    pub population_size: usize,
    pub generations: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    pub init_mix: InitMix,
    pub tournament_size: usize,
    pub elite_count: usize,
    pub seed: u64,
}

impl Default for GaParams {
    fn default() -> Self {
        GaParams {
            population_size: 100,
            generations: 200,
            crossover_rate: 0.8,
            mutation_rate: 0.1,
            init_mix: InitMix::default(),
            tournament_size: 3,
            elite_count: 2,
            seed: 0,
        }
    }
}

impl GaParams {
    pub fn validate(&self) -> Result<(), GaError> {
        let bad = |msg: &str| Err(GaError::InvalidParams(msg.to_string()));
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        if self.population_size < 2 {
            return bad("population size must be at least 2");
        }
        if self.generations < 1 {
            return bad("at least one generation is required");
        }
        if !unit(self.crossover_rate) || !unit(self.mutation_rate) {
            return bad("crossover and mutation rates must lie in [0, 1]");
        }
        let mix = self.init_mix;
        if ![mix.global, mix.local, mix.random].into_iter().all(unit)
            || (mix.global + mix.local + mix.random - 1.0).abs() > 1e-6
        {
            return bad("init mix fractions must lie in [0, 1] and sum to 1");
        }
        if self.tournament_size < 2 {
            return bad("tournament size must be at least 2");
        }
        if self.elite_count < 1 || self.elite_count >= self.population_size {
            return bad("elite count must be at least 1 and below the population size");
        }
        Ok(())
    }

    /// Numbers of (global, local, random) initial chromosomes.
    pub fn init_counts(&self) -> (usize, usize, usize) {
        let n = self.population_size;
        let count = |f: f64| ((f * n as f64) + 1e-9).floor() as usize;
        let global = count(self.init_mix.global).min(n);
        let local = count(self.init_mix.local).min(n - global);
        (global, local, n - global - local)
    }
}
