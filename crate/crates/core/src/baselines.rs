//! Reference optimisers: exhaustive enumeration of the canonical space and
//! uniform random sampling without replacement.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::legs::{finish, launch_leg, step_leg, ArrivalCondition, PlanOutcome, TrajectoryRecord};
use crate::planner::coding::{sequence_label, SolutionVector};
use crate::planner::{model_evaluation, Evaluation, FeasibleEntry};
use crate::problem::Problem;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BaselineError {
    #[error("canonical space has {size} solutions, above the cap of {cap}")]
    SpaceTooLarge { size: u128, cap: u64 },
}

/// Result of evaluating one canonical solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SolutionOutcome {
    Feasible { f_obj: f64 },
    Infeasible { l_u: usize },
}

/// Best solution of one target sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceBest {
    pub sequence: String,
    pub s: SolutionVector,
    pub f_obj: f64,
    pub v_inf: f64,
    pub total_dv: f64,
    pub total_t: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnumerationReport {
    pub raw_size: u128,
    pub canonical_size: u128,
    pub n_feasible: usize,
    pub best: Option<FeasibleEntry>,
    /// Sorted by f_obj.
    pub per_sequence: Vec<SequenceBest>,
    pub wall_time_s: f64,
    /// One outcome per canonical solution, in [`CanonicalSpace`] order.
    #[serde(skip)]
    pub outcomes: Vec<SolutionOutcome>,
}

/// Mixed-radix indexing of the canonical space, last leg fastest.
#[derive(Debug, Clone)]
pub struct CanonicalSpace {
    /// Per leg: (target index, canonical row), both 0-based.
    choices: Vec<Vec<(usize, usize)>>,
    strides: Vec<usize>,
    size: usize,
}

impl CanonicalSpace {
    pub fn new(problem: &Problem) -> Self {
        let choices: Vec<Vec<(usize, usize)>> = problem
            .legs
            .iter()
            .map(|leg| {
                let rows = leg.types.canonical_rows();
                (0..leg.targets.len())
                    .flat_map(|k| rows.iter().map(move |&j| (k, j)))
                    .collect()
            })
            .collect();
        let mut strides = vec![1usize; choices.len()];
        for i in (0..choices.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * choices[i + 1].len();
        }
        let size = strides.first().copied().unwrap_or(0) * choices.first().map_or(0, Vec::len);
        Self {
            choices,
            strides,
            size,
        }
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn vector(&self, mut index: usize) -> SolutionVector {
        let mut s = Vec::with_capacity(2 * self.choices.len());
        for (leg, stride) in self.strides.iter().enumerate() {
            let (k, j) = self.choices[leg][index / stride];
            index %= stride;
            s.push(k as u32 + 1);
            s.push(j as u32 + 1);
        }
        s
    }
}

struct Walker<'a> {
    problem: &'a Problem,
    space: &'a CanonicalSpace,
}

#[derive(Default)]
struct Partial {
    best: BTreeMap<String, (SolutionVector, TrajectoryRecord)>,
}

impl Partial {
    fn offer(&mut self, label: String, s: SolutionVector, rec: &TrajectoryRecord) {
        let better = self.best.get(&label).is_none_or(|(bs, br)| {
            rec.f_obj < br.f_obj || (rec.f_obj == br.f_obj && s < *bs)
        });
        if better {
            self.best.insert(label, (s, rec.clone()));
        }
    }

    fn merge(mut self, other: Partial) -> Partial {
        for (label, (s, rec)) in other.best {
            self.offer(label, s, &rec);
        }
        self
    }
}

impl Walker<'_> {
    /// Evaluates choice `c` of leg `leg`; `block` covers every solution below
    /// it and `first` is the space index of the first of them.
    fn node(
        &self,
        leg: usize,
        c: usize,
        conds: &[ArrivalCondition],
        first: usize,
        block: &mut [SolutionOutcome],
        acc: &mut Partial,
    ) {
        let (k, j) = self.space.choices[leg][c];
        let target = self.problem.legs[leg].targets[k];
        let params = self.problem.legs[leg].types.params[j];
        let next = if leg == 0 {
            launch_leg(self.problem, target, params)
        } else {
            step_leg(self.problem, conds, leg, target, params)
        };
        if next.is_empty() {
            block.fill(SolutionOutcome::Infeasible { l_u: leg + 1 });
            return;
        }
        if leg + 1 < self.space.choices.len() {
            let stride = self.space.strides[leg + 1];
            for (c, sub) in block.chunks_mut(stride).enumerate() {
                self.node(leg + 1, c, &next, first + c * stride, sub, acc);
            }
            return;
        }
        let outcome = finish(self.problem, &next);
        block[0] = match &outcome {
            PlanOutcome::Feasible { f_obj, .. } => {
                let s = self.space.vector(first);
                if let Some(rec) = outcome.best() {
                    acc.offer(sequence_label(self.problem, &s), s, rec);
                }
                SolutionOutcome::Feasible { f_obj: *f_obj }
            }
            PlanOutcome::Infeasible { l_u } => SolutionOutcome::Infeasible { l_u: *l_u },
        };
    }
}

/// Evaluates every canonical solution once, sharing common prefixes.
pub fn enumerate_all(problem: &Problem, cap: u64) -> Result<EnumerationReport, BaselineError> {
    let canonical_size = problem.canonical_space_size();
    if canonical_size > cap as u128 {
        return Err(BaselineError::SpaceTooLarge {
            size: canonical_size,
            cap,
        });
    }
    let start = Instant::now();
    let space = CanonicalSpace::new(problem);
    let walker = Walker {
        problem,
        space: &space,
    };
    let mut outcomes = vec![SolutionOutcome::Infeasible { l_u: 1 }; space.len()];
    let stride0 = space.strides[0];
    let partial = outcomes
        .par_chunks_mut(stride0)
        .enumerate()
        .map(|(c, block)| {
            let mut acc = Partial::default();
            walker.node(0, c, &[], c * stride0, block, &mut acc);
            acc
        })
        .reduce(Partial::default, Partial::merge);

    let mut per_sequence: Vec<SequenceBest> = partial
        .best
        .iter()
        .map(|(label, (s, rec))| SequenceBest {
            sequence: label.clone(),
            s: s.clone(),
            f_obj: rec.f_obj,
            v_inf: rec.v_inf_arrival,
            total_dv: rec.total_dv,
            total_t: rec.total_t,
        })
        .collect();
    per_sequence.sort_by(|a, b| a.f_obj.total_cmp(&b.f_obj).then_with(|| a.s.cmp(&b.s)));
    let best = per_sequence.first().and_then(|b| {
        partial.best.get(&b.sequence).map(|(s, rec)| FeasibleEntry {
            s: s.clone(),
            sequence: b.sequence.clone(),
            f_obj: rec.f_obj,
            record: rec.clone(),
            n_branches: 0,
        })
    });
    let best = best.map(|mut e| {
        if let Evaluation::Feasible { n_branches, .. } = model_evaluation(problem, &e.s) {
            e.n_branches = n_branches;
        }
        e
    });
    let n_feasible = outcomes
        .iter()
        .filter(|o| matches!(o, SolutionOutcome::Feasible { .. }))
        .count();
    Ok(EnumerationReport {
        raw_size: problem.raw_space_size(),
        canonical_size,
        n_feasible,
        best,
        per_sequence,
        wall_time_s: start.elapsed().as_secs_f64(),
        outcomes,
    })
}

impl EnumerationReport {
    /// CSV with one row per canonical solution.
    pub fn write_outcomes_csv<W: std::io::Write>(
        &self,
        problem: &Problem,
        w: W,
    ) -> Result<(), csv::Error> {
        let space = CanonicalSpace::new(problem);
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["s", "sequence", "status", "f_obj", "l_u"])?;
        for (i, o) in self.outcomes.iter().enumerate() {
            let s = space.vector(i);
            let s_text = crate::planner::coding::format_vector(&s);
            let label = sequence_label(problem, &s);
            match o {
                SolutionOutcome::Feasible { f_obj } => {
                    wr.write_record([s_text, label, "feasible".into(), f_obj.to_string(), String::new()])?
                }
                SolutionOutcome::Infeasible { l_u } => {
                    wr.write_record([s_text, label, "infeasible".into(), String::new(), l_u.to_string()])?
                }
            }
        }
        wr.flush()?;
        Ok(())
    }

    /// CSV of the per-sequence best table.
    pub fn write_sequences_csv<W: std::io::Write>(&self, w: W) -> Result<(), csv::Error> {
        write_sequence_table(&self.per_sequence, w)
    }
}

pub fn write_sequence_table<W: std::io::Write>(
    rows: &[SequenceBest],
    w: W,
) -> Result<(), csv::Error> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["sequence", "f_obj", "v_inf", "total_dv", "total_t_days", "s"])?;
    for r in rows {
        wr.write_record([
            r.sequence.clone(),
            r.f_obj.to_string(),
            r.v_inf.to_string(),
            r.total_dv.to_string(),
            r.total_t.to_string(),
            crate::planner::coding::format_vector(&r.s),
        ])?;
    }
    wr.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomSearchResult {
    pub best: Option<FeasibleEntry>,
    pub n_eval: usize,
    pub n_feasible: usize,
}

/// Samples `budget` distinct canonical solutions uniformly and keeps the best.
pub fn random_search(problem: &Problem, budget: usize, seed: u64) -> RandomSearchResult {
    random_search_with(problem, budget, seed, &|s: &[u32]| model_evaluation(problem, s))
}

pub fn random_search_with(
    problem: &Problem,
    budget: usize,
    seed: u64,
    evaluate: &(dyn Fn(&[u32]) -> Evaluation + Sync),
) -> RandomSearchResult {
    let space = CanonicalSpace::new(problem);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picks = sample(&mut rng, space.len(), budget.min(space.len())).into_vec();
    let results: Vec<(SolutionVector, Evaluation)> = picks
        .par_iter()
        .map(|&i| {
            let s = space.vector(i);
            let e = evaluate(&s);
            (s, e)
        })
        .collect();
    let mut best: Option<FeasibleEntry> = None;
    let mut n_feasible = 0;
    for (s, e) in results {
        if let Evaluation::Feasible {
            f_obj,
            record,
            n_branches,
        } = e
        {
            n_feasible += 1;
            let better = best.as_ref().is_none_or(|b| {
                f_obj < b.f_obj || (f_obj == b.f_obj && s < b.s)
            });
            if better {
                best = Some(FeasibleEntry {
                    sequence: sequence_label(problem, &s),
                    s,
                    f_obj,
                    record,
                    n_branches,
                });
            }
        }
    }
    RandomSearchResult {
        best,
        n_eval: picks.len(),
        n_feasible,
    }
}
