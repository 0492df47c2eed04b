//! The main search loop.

use std::collections::HashSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::legs::evaluate_plan;
use crate::problem::Problem;

use super::coding::{decode, sequence_label, SolutionVector};
use super::construct::{generate_sequence, generate_types};
use super::lists::{record_result, Evaluation, FeasibleEntry, FeasibleList, TabooLists};

/// One phase of the weight schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchStep {
    pub iterations: usize,
    /// w̄; the pheromone weights are `weight * f_obj_ref`.
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub ants: usize,
    pub steps: Vec<SearchStep>,
    /// Expected objective value, problem units.
    pub f_obj_ref: f64,
    pub max_evals: usize,
    #[serde(default)]
    pub seed: u64,
}

impl SearchConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.ants == 0 {
            return Err("ants must be at least 1".into());
        }
        if self.steps.iter().any(|s| !(s.weight >= 0.0)) {
            return Err("step weights must be non-negative".into());
        }
        if !(self.f_obj_ref > 0.0) {
            return Err("f_obj_ref must be positive".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    pub n_eval: usize,
    pub n_iter: usize,
    /// Ants that stopped because every type of some leg was taboo.
    pub n_discarded: usize,
    /// Ants that produced an already evaluated vector.
    pub n_duplicates: usize,
    /// Ants dropped because the evaluation budget ran out mid-iteration.
    pub n_truncated: usize,
    pub n_feasible: usize,
    pub taboo_sizes: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    /// Feasible solutions, best first.
    pub feasible: Vec<FeasibleEntry>,
    pub stats: RunStats,
    pub taboo: TabooLists,
}

impl SearchResult {
    pub fn best(&self) -> Option<&FeasibleEntry> {
        self.feasible.first()
    }
}

/// RNG of one ant; depends only on the seed and the ant's coordinates.
pub fn ant_rng(seed: u64, iteration: usize, ant: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((iteration as u64) << 32) | ant as u64);
    rng
}

/// Runs the search with the trajectory model as evaluator.
pub fn search(problem: &Problem, config: &SearchConfig) -> SearchResult {
    search_with(problem, config, &|s: &[u32]| model_evaluation(problem, s))
}

/// Evaluates a canonical vector with the trajectory model.
pub fn model_evaluation(problem: &Problem, s: &[u32]) -> Evaluation {
    match decode(problem, s) {
        Ok(plan) => Evaluation::from(&evaluate_plan(problem, &plan)),
        Err(_) => Evaluation::Infeasible { l_u: 1 },
    }
}

/// Runs the search with an arbitrary evaluator of canonical vectors.
///
/// Ants of one iteration see the lists as they were at the start of the
/// iteration; their results are filed afterwards in ant order, so the run
/// is a function of the seed alone.
pub fn search_with(
    problem: &Problem,
    config: &SearchConfig,
    evaluate: &(dyn Fn(&[u32]) -> Evaluation + Sync),
) -> SearchResult {
    let n_legs = problem.n_legs();
    let mut feasible = FeasibleList::new(n_legs);
    let mut taboo = TabooLists::new(n_legs);
    let mut evaluated: HashSet<SolutionVector> = HashSet::new();
    let mut stats = RunStats::default();

    'steps: for step in &config.steps {
        let w = step.weight * config.f_obj_ref;
        for _ in 0..step.iterations {
            if stats.n_eval >= config.max_evals {
                break 'steps;
            }
            let iteration = stats.n_iter;
            let proposals: Vec<Option<SolutionVector>> = (0..config.ants)
                .into_par_iter()
                .map(|ant| {
                    let mut rng = ant_rng(config.seed, iteration, ant);
                    let odd = generate_sequence(problem, &feasible, w, &mut rng);
                    generate_types(problem, &feasible, &taboo, w, &odd, &mut rng)
                })
                .collect();

            let mut batch: Vec<SolutionVector> = Vec::new();
            for s in proposals {
                let Some(s) = s else {
                    stats.n_discarded += 1;
                    continue;
                };
                if evaluated.contains(&s) {
                    stats.n_duplicates += 1;
                } else if stats.n_eval >= config.max_evals {
                    stats.n_truncated += 1;
                } else {
                    stats.n_eval += 1;
                    evaluated.insert(s.clone());
                    batch.push(s);
                }
            }
            let outcomes: Vec<Evaluation> = batch.par_iter().map(|s| evaluate(s)).collect();
            for (s, outcome) in batch.iter().zip(&outcomes) {
                record_result(s, sequence_label(problem, s), outcome, &mut feasible, &mut taboo);
            }
            stats.n_iter += 1;
        }
    }

    stats.n_feasible = feasible.len();
    stats.taboo_sizes = taboo.sizes();
    SearchResult {
        feasible: feasible.sorted(),
        stats,
        taboo,
    }
}
