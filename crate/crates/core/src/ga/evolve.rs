use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{
    crossover_ms, crossover_os, decode, init_population, mutate_ms, mutate_os, Chromosome, GaError,
    GaParams,
};
use crate::model::{Instance, Schedule, Time};

#[derive(Clone, Debug)]
pub struct GaOutcome {
    pub schedule: Schedule,
    pub chromosome: Chromosome,
    /// Best makespan of the initial population, then of each generation.
    pub history: Vec<Time>,
}

impl GaOutcome {
    pub fn makespan(&self) -> Time {
        self.schedule.makespan()
    }
}

/// Runs the GA with a ChaCha8 generator seeded from `params.seed`.
pub fn evolve_seeded(instance: &Instance, params: &GaParams) -> Result<GaOutcome, GaError> {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    evolve(instance, params, &mut rng)
}

pub fn evolve<R: Rng + ?Sized>(instance: &Instance, params: &GaParams, rng: &mut R) -> Result<GaOutcome, GaError> {
    evolve_with(instance, params, rng, |_| {})
}

fn evaluate(instance: &Instance, population: &[Chromosome]) -> Result<Vec<Time>, GaError> {
    population
        .par_iter()
        .map(|c| decode(instance, c).map(|s| s.makespan()).map_err(GaError::from))
        .collect()
}

fn tournament<R: Rng + ?Sized>(fitness: &[Time], size: usize, rng: &mut R) -> usize {
    let mut best = rng.random_range(0..fitness.len());
    for _ in 1..size {
        let other = rng.random_range(0..fitness.len());
        if (fitness[other], other) < (fitness[best], best) {
            best = other;
        }
    }
    best
}

/// Generational GA with elitism; `observe` sees every chromosome created by
/// initialisation, crossover or mutation.
///
/// Random draws happen in a fixed order per offspring pair: two tournament
/// selections, the crossover decision, the crossover operators' own draws
/// (machine cut points, then the POX job subset), then for each child in
/// turn the machine-mutation decision and draw followed by the
/// sequence-mutation decision and draw. Fitness evaluation runs in parallel
/// afterwards and consumes no randomness, so results depend only on the seed.
pub fn evolve_with<R, F>(instance: &Instance, params: &GaParams, rng: &mut R, mut observe: F) -> Result<GaOutcome, GaError>
where
    R: Rng + ?Sized,
    F: FnMut(&Chromosome),
{
    params.validate()?;
    let size = params.population_size;
    let mut population = init_population(instance, params, rng);
    population.iter().for_each(&mut observe);
    let mut fitness = evaluate(instance, &population)?;

    let best_of = |fitness: &[Time]| -> usize {
        (0..fitness.len())
            .min_by_key(|&i| (fitness[i], i))
            .expect("population is non-empty")
    };
    let mut best_index = best_of(&fitness);
    let mut best = (fitness[best_index], population[best_index].clone());
    let mut history = Vec::with_capacity(params.generations + 1);
    history.push(best.0);

    for _ in 0..params.generations {
        let mut ranked: Vec<usize> = (0..size).collect();
        ranked.sort_by_key(|&i| (fitness[i], i));
        let mut next: Vec<Chromosome> = ranked[..params.elite_count]
            .iter()
            .map(|&i| population[i].clone())
            .collect();

        while next.len() < size {
            let a = tournament(&fitness, params.tournament_size, rng);
            let b = tournament(&fitness, params.tournament_size, rng);
            let (mut c1, mut c2) = (population[a].clone(), population[b].clone());
            if rng.random::<f64>() < params.crossover_rate {
                (c1, c2) = crossover_ms(&c1, &c2, rng);
                observe(&c1);
                observe(&c2);
                (c1, c2) = crossover_os(&c1, &c2, rng);
                observe(&c1);
                observe(&c2);
            }
            for child in [c1, c2] {
                let mut child = child;
                if rng.random::<f64>() < params.mutation_rate {
                    child = mutate_ms(child, instance, rng);
                    observe(&child);
                }
                if rng.random::<f64>() < params.mutation_rate {
                    child = mutate_os(child, rng);
                    observe(&child);
                }
                if next.len() < size {
                    next.push(child);
                }
            }
        }

        population = next;
        fitness = evaluate(instance, &population)?;
        best_index = best_of(&fitness);
        if fitness[best_index] < best.0 {
            best = (fitness[best_index], population[best_index].clone());
        }
        history.push(fitness[best_index]);
    }

    let schedule = decode(instance, &best.1)?;
    Ok(GaOutcome {
        schedule,
        chromosome: best.1,
        history,
    })
}
