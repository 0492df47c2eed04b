//! Probabilistic construction of one ant's solution.

use rand::Rng;

use crate::problem::Problem;

use super::coding::SolutionVector;
use super::lists::{FeasibleList, TabooLists};

/// Draws index `j` with probability `tau[j] / Σ tau`; `None` when Σ tau = 0.
pub fn roulette_select<R: Rng + ?Sized>(tau: &[f64], rng: &mut R) -> Option<usize> {
    let total: f64 = tau.iter().sum();
    if !(total > 0.0) || !total.is_finite() {
        return None;
    }
    let u = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    let mut last = None;
    for (j, &t) in tau.iter().enumerate() {
        if t <= 0.0 {
            continue;
        }
        acc += t;
        last = Some(j);
        if u < acc {
            return Some(j);
        }
    }
    last
}

/// Pheromone over the candidate targets of leg `leg` given earlier choices.
pub fn planet_pheromone(
    problem: &Problem,
    feasible: &FeasibleList,
    w_planet: f64,
    leg: usize,
    chosen: &[u32],
) -> Vec<f64> {
    let n = problem.legs[leg].targets.len();
    let mut key: Vec<u32> = chosen[..leg].to_vec();
    key.push(0);
    (0..n)
        .map(|j| {
            if w_planet == 0.0 {
                return 1.0;
            }
            key[leg] = j as u32 + 1;
            1.0 + w_planet * feasible.planet_weight(leg, &key)
        })
        .collect()
}

/// Picks the target of every leg (the odd entries of `s`).
pub fn generate_sequence<R: Rng + ?Sized>(
    problem: &Problem,
    feasible: &FeasibleList,
    w_planet: f64,
    rng: &mut R,
) -> Vec<u32> {
    let mut odd = Vec::with_capacity(problem.n_legs());
    for leg in 0..problem.n_legs() {
        let tau = planet_pheromone(problem, feasible, w_planet, leg, &odd);
        // all weights are at least 1, so a choice always exists
        let j = roulette_select(&tau, rng).unwrap_or(0);
        odd.push(j as u32 + 1);
    }
    odd
}

/// Pheromone over the type rows of leg `leg`.
///
/// `s` holds the complete pairs for legs before `leg`. Rows whose canonical
/// partial solution is taboo get zero.
pub fn type_pheromone(
    problem: &Problem,
    feasible: &FeasibleList,
    taboo: &TabooLists,
    w_type: f64,
    leg: usize,
    odd: &[u32],
    s: &[u32],
) -> Vec<f64> {
    let types = &problem.legs[leg].types;
    let mut prefix: Vec<u32> = s[..2 * leg].to_vec();
    prefix.push(odd[leg]);
    prefix.push(0);
    let mut key: Vec<u32> = odd.to_vec();
    key.extend(s.iter().skip(1).step_by(2).take(leg));
    key.push(0);
    let last = key.len() - 1;
    (0..types.len())
        .map(|j| {
            let row = types.canonical_of(j) as u32 + 1;
            prefix[2 * leg + 1] = row;
            if taboo.contains(leg, &prefix) {
                return 0.0;
            }
            if w_type == 0.0 {
                return 1.0;
            }
            key[last] = row;
            1.0 + w_type * feasible.type_weight(leg, &key)
        })
        .collect()
}

/// Fills in the type rows; `None` when every row of some leg is taboo.
///
/// Chosen rows are stored in canonical form.
pub fn generate_types<R: Rng + ?Sized>(
    problem: &Problem,
    feasible: &FeasibleList,
    taboo: &TabooLists,
    w_type: f64,
    odd: &[u32],
    rng: &mut R,
) -> Option<SolutionVector> {
    let mut s = Vec::with_capacity(2 * problem.n_legs());
    for leg in 0..problem.n_legs() {
        let tau = type_pheromone(problem, feasible, taboo, w_type, leg, odd, &s);
        let j = roulette_select(&tau, rng)?;
        s.push(odd[leg]);
        s.push(problem.legs[leg].types.canonical_of(j) as u32 + 1);
    }
    Some(s)
}
