//! Chi-square check of ant construction with zero pheromone weight.

use std::collections::{BTreeMap, HashSet};

use mga_core::planner::search::ant_rng;
use mga_core::planner::{generate_sequence, generate_types, FeasibleList, TabooLists};
use mga_core::problem::Problem;

/// Outcome distribution of construction when targets are drawn uniformly
/// and type rows uniformly among raw rows whose canonical partial solution
/// is not taboo. `None` stands for a discarded ant.
pub fn expected_distribution(
    problem: &Problem,
    taboo: &[HashSet<Vec<u32>>],
) -> BTreeMap<Option<Vec<u32>>, f64> {
    let mut out = BTreeMap::new();
    walk(problem, taboo, 0, Vec::new(), 1.0, &mut out);
    out
}

fn walk(
    problem: &Problem,
    taboo: &[HashSet<Vec<u32>>],
    leg: usize,
    prefix: Vec<u32>,
    p: f64,
    out: &mut BTreeMap<Option<Vec<u32>>, f64>,
) {
    if leg == problem.n_legs() {
        *out.entry(Some(prefix)).or_default() += p;
        return;
    }
    let def = &problem.legs[leg];
    let n_targets = def.targets.len() as f64;
    // representative of a raw row: the first row with the same effective parameters
    let rep: Vec<usize> = (0..def.types.params.len())
        .map(|j| {
            let c = def.types.params[j].canonical();
            (0..=j).find(|&k| def.types.params[k].canonical() == c).unwrap()
        })
        .collect();
    for k in 1..=def.targets.len() as u32 {
        let allowed: Vec<u32> = rep
            .iter()
            .map(|&r| r as u32 + 1)
            .filter(|&row| {
                let mut key = prefix.clone();
                key.extend([k, row]);
                !taboo[leg].contains(&key)
            })
            .collect();
        if allowed.is_empty() {
            *out.entry(None).or_default() += p / n_targets;
            continue;
        }
        let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
        for row in &allowed {
            *counts.entry(*row).or_default() += 1;
        }
        for (row, c) in counts {
            let mut next = prefix.clone();
            next.extend([k, row]);
            let q = p / n_targets * c as f64 / allowed.len() as f64;
            walk(problem, taboo, leg + 1, next, q, out);
        }
    }
}

/// Builds `n` solutions with zero weights and returns the chi-square p-value
/// of the observed outcomes against [`expected_distribution`].
pub fn construction_p_value(problem: &Problem, taboo_rows: &[(usize, Vec<u32>)], n: usize, seed: u64) -> f64 {
    let mut lists = TabooLists::new(problem.n_legs());
    let mut sets = vec![HashSet::new(); problem.n_legs()];
    for (l_u, s) in taboo_rows {
        lists.insert(*l_u, s);
        sets[l_u - 1].insert(s[..2 * l_u].to_vec());
    }
    let expected = expected_distribution(problem, &sets);
    let feasible = FeasibleList::new(problem.n_legs());
    let mut counts: BTreeMap<Option<Vec<u32>>, usize> = BTreeMap::new();
    for i in 0..n {
        let mut rng = ant_rng(seed, i, 0);
        let odd = generate_sequence(problem, &feasible, 0.0, &mut rng);
        let s = generate_types(problem, &feasible, &lists, 0.0, &odd, &mut rng);
        assert!(
            expected.contains_key(&s),
            "constructed {s:?}, which has zero probability"
        );
        *counts.entry(s).or_default() += 1;
    }
    let (obs, exp): (Vec<usize>, Vec<f64>) = expected
        .iter()
        .map(|(k, &p)| (counts.get(k).copied().unwrap_or(0), p))
        .unzip();
    super::chi_square_p(&obs, &exp)
}

/// Taboo rows used with the toy problem: Venus on its first row, and every
/// row of Mars, are dead at leg 1; one full vector is dead at leg 2.
pub fn toy_taboo() -> Vec<(usize, Vec<u32>)> {
    vec![
        (1, vec![1, 1]),
        (1, vec![3, 1]),
        (1, vec![3, 2]),
        (2, vec![1, 2, 1, 5]),
    ]
}
