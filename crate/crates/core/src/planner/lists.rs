//! Feasible and taboo lists.
//!
//! Vectors stored here are canonical (see [`super::coding::canonical`]).
//! Alongside the plain entries the feasible list keeps running sums of
//! `1 / f_obj` keyed by the prefixes the pheromone rules match on, so a
//! pheromone value costs one hash lookup instead of a list scan.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::legs::{PlanOutcome, TrajectoryRecord};

use super::coding::SolutionVector;

/// Floor applied to `f_obj` before it is inverted.
const MIN_F_OBJ: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibleEntry {
    pub s: SolutionVector,
    pub sequence: String,
    pub f_obj: f64,
    pub record: TrajectoryRecord,
    /// Number of trajectories in the plan's tree.
    pub n_branches: usize,
}

fn planet_key(s: &[u32], legs: usize) -> Vec<u32> {
    s.iter().step_by(2).take(legs).copied().collect()
}

fn type_key(s: &[u32], legs: usize) -> Vec<u32> {
    let mut k: Vec<u32> = s.iter().step_by(2).copied().collect();
    k.extend(s.iter().skip(1).step_by(2).take(legs));
    k
}

#[derive(Debug, Clone, Default)]
pub struct FeasibleList {
    entries: Vec<FeasibleEntry>,
    seen: HashSet<SolutionVector>,
    /// Per leg i: odd entries of legs 1..=i → Σ 1/f_obj.
    planet_sums: Vec<HashMap<Vec<u32>, f64>>,
    /// Per leg i: all odd entries plus even entries of legs 1..=i → Σ 1/f_obj.
    type_sums: Vec<HashMap<Vec<u32>, f64>>,
}

impl FeasibleList {
    pub fn new(n_legs: usize) -> Self {
        Self {
            entries: Vec::new(),
            seen: HashSet::new(),
            planet_sums: vec![HashMap::new(); n_legs],
            type_sums: vec![HashMap::new(); n_legs],
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[FeasibleEntry] {
        &self.entries
    }

    pub fn contains(&self, s: &[u32]) -> bool {
        self.seen.contains(s)
    }

    /// Adds an entry unless its vector is already present.
    pub fn insert(&mut self, entry: FeasibleEntry) -> bool {
        if !self.seen.insert(entry.s.clone()) {
            return false;
        }
        let inv = 1.0 / entry.f_obj.max(MIN_F_OBJ);
        for leg in 0..self.planet_sums.len() {
            *self.planet_sums[leg].entry(planet_key(&entry.s, leg + 1)).or_default() += inv;
            *self.type_sums[leg].entry(type_key(&entry.s, leg + 1)).or_default() += inv;
        }
        self.entries.push(entry);
        true
    }

    /// Σ 1/f_obj over entries whose targets for legs 1..=leg+1 equal `odd`.
    pub fn planet_weight(&self, leg: usize, odd: &[u32]) -> f64 {
        self.planet_sums[leg].get(odd).copied().unwrap_or(0.0)
    }

    /// Σ 1/f_obj over entries with these targets and these rows for legs 1..=leg+1.
    ///
    /// `key` is all odd entries followed by the even entries up to this leg.
    pub fn type_weight(&self, leg: usize, key: &[u32]) -> f64 {
        self.type_sums[leg].get(key).copied().unwrap_or(0.0)
    }

    /// Entries sorted by f_obj, then total time, then vector.
    pub fn sorted(&self) -> Vec<FeasibleEntry> {
        let mut v = self.entries.clone();
        sort_entries(&mut v);
        v
    }
}

pub fn sort_entries(v: &mut [FeasibleEntry]) {
    v.sort_by(|a, b| {
        a.f_obj
            .total_cmp(&b.f_obj)
            .then(a.record.total_t.total_cmp(&b.record.total_t))
            .then_with(|| a.s.cmp(&b.s))
    });
}

/// Prefixes proven infeasible, one set per leg.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TabooLists {
    lists: Vec<HashSet<Vec<u32>>>,
}

impl TabooLists {
    pub fn new(n_legs: usize) -> Self {
        Self {
            lists: vec![HashSet::new(); n_legs],
        }
    }

    /// Inserts the `2 l_u` prefix of `s` into list `l_u` (1-based).
    pub fn insert(&mut self, l_u: usize, s: &[u32]) -> bool {
        self.lists[l_u - 1].insert(s[..2 * l_u].to_vec())
    }

    /// `prefix` must have length `2 (leg + 1)`.
    pub fn contains(&self, leg: usize, prefix: &[u32]) -> bool {
        self.lists[leg].contains(prefix)
    }

    pub fn len(&self, leg: usize) -> usize {
        self.lists[leg].len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.lists.iter().map(HashSet::len).collect()
    }

    /// Rows of list `leg`, sorted.
    pub fn rows(&self, leg: usize) -> Vec<Vec<u32>> {
        let mut v: Vec<_> = self.lists[leg].iter().cloned().collect();
        v.sort();
        v
    }
}

/// What the planner keeps of a plan evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Evaluation {
    Feasible {
        f_obj: f64,
        record: TrajectoryRecord,
        n_branches: usize,
    },
    Infeasible {
        l_u: usize,
    },
}

impl Evaluation {
    pub fn f_obj(&self) -> Option<f64> {
        match self {
            Evaluation::Feasible { f_obj, .. } => Some(*f_obj),
            Evaluation::Infeasible { .. } => None,
        }
    }
}

impl From<&PlanOutcome> for Evaluation {
    fn from(o: &PlanOutcome) -> Self {
        match (o, o.best()) {
            (PlanOutcome::Feasible { records, f_obj }, Some(best)) => Evaluation::Feasible {
                f_obj: *f_obj,
                record: best.clone(),
                n_branches: records.len(),
            },
            (PlanOutcome::Infeasible { l_u }, _) => Evaluation::Infeasible { l_u: *l_u },
            (PlanOutcome::Feasible { records, .. }, None) => Evaluation::Infeasible {
                l_u: records.first().map_or(1, |r| r.leg_times.len()),
            },
        }
    }
}

/// Files an evaluation outcome under the right list.
pub fn record_result(
    s: &[u32],
    sequence: String,
    outcome: &Evaluation,
    feasible: &mut FeasibleList,
    taboo: &mut TabooLists,
) {
    match outcome {
        Evaluation::Feasible {
            f_obj,
            record,
            n_branches,
        } => {
            feasible.insert(FeasibleEntry {
                s: s.to_vec(),
                sequence,
                f_obj: *f_obj,
                record: record.clone(),
                n_branches: *n_branches,
            });
        }
        Evaluation::Infeasible { l_u } => {
            taboo.insert(*l_u, s);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(total_t: f64) -> TrajectoryRecord {
        TrajectoryRecord {
            path_id: vec![0],
            lambda: vec![3.0],
            leg_times: vec![total_t],
            leg_dv: vec![0.0],
            v0: 3.0,
            v_inf_arrival: 2.0,
            total_t,
            total_dv: 0.0,
            f_obj: 2.0,
        }
    }

    fn feasible(f: f64) -> Evaluation {
        Evaluation::Feasible {
            f_obj: f,
            record: TrajectoryRecord { f_obj: f, ..record(10.0) },
            n_branches: 1,
        }
    }

    #[test]
    fn infeasible_goes_to_taboo_prefix() {
        let mut fl = FeasibleList::new(2);
        let mut tl = TabooLists::new(2);
        record_result(&[1, 2, 1, 1], "X".into(), &Evaluation::Infeasible { l_u: 1 }, &mut fl, &mut tl);
        assert_eq!(tl.rows(0), vec![vec![1, 2]]);
        assert_eq!(tl.len(1), 0);
        record_result(&[1, 2, 2, 1], "X".into(), &Evaluation::Infeasible { l_u: 1 }, &mut fl, &mut tl);
        assert_eq!(tl.len(0), 1);
    }

    #[test]
    fn duplicate_feasible_is_stored_once() {
        let mut fl = FeasibleList::new(2);
        let mut tl = TabooLists::new(2);
        for _ in 0..2 {
            record_result(&[1, 1, 2, 3], "X".into(), &feasible(2.0), &mut fl, &mut tl);
        }
        assert_eq!(fl.len(), 1);
        assert_eq!(fl.planet_weight(0, &[1]), 0.5);
        assert_eq!(fl.planet_weight(1, &[1, 2]), 0.5);
        assert_eq!(fl.type_weight(0, &[1, 2, 1]), 0.5);
        assert_eq!(fl.type_weight(1, &[1, 2, 1, 3]), 0.5);
        assert_eq!(fl.type_weight(1, &[1, 2, 1, 2]), 0.0);
    }

    #[test]
    fn sort_breaks_ties_on_time_then_vector() {
        let mk = |s: Vec<u32>, f: f64, t: f64| FeasibleEntry {
            s,
            sequence: String::new(),
            f_obj: f,
            record: record(t),
            n_branches: 1,
        };
        let mut v = vec![mk(vec![2], 1.0, 5.0), mk(vec![1], 1.0, 5.0), mk(vec![3], 1.0, 4.0), mk(vec![0], 0.5, 9.0)];
        sort_entries(&mut v);
        let order: Vec<u32> = v.iter().map(|e| e.s[0]).collect();
        assert_eq!(order, vec![0, 3, 1, 2]);
    }
}
