//! Integer coding of plans.
//!
//! A solution vector holds two 1-based entries per leg: the index of the
//! target in the leg's candidate list, then a row of the leg's type table.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::legs::{LegParams, Plan};
use crate::problem::{LegSets, Problem};

pub type SolutionVector = Vec<u32>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodingError {
    #[error("solution vector has {got} entries, expected {expected}")]
    WrongLength { got: usize, expected: usize },
    #[error("entry {pos} = {value} is outside 1..={max}")]
    MalformedSolution { pos: usize, value: u32, max: usize },
    #[error("leg {leg}: target or transfer type not in the problem's sets")]
    NotEncodable { leg: usize },
}

/// All transfer types of one leg.
///
/// Rows enumerate index combinations into the five parameter sets with the
/// last index varying fastest. An empty set contributes a single index that
/// decodes to the neutral value (0 / false).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeTable {
    /// 1-based indices into (m_dsm, n_rev1, n_rev2, f_pa, f_12).
    pub rows: Vec<[u32; 5]>,
    pub params: Vec<LegParams>,
    /// Row index (0-based) of the first row decoding to an equivalent leg.
    canonical: Vec<usize>,
}

impl TypeTable {
    pub fn build(sets: &LegSets) -> Self {
        let sizes = [
            sets.m_dsm.len().max(1),
            sets.n_rev1.len().max(1),
            sets.n_rev2.len().max(1),
            sets.f_pa.len().max(1),
            sets.f_12.len().max(1),
        ];
        let total: usize = sizes.iter().product();
        let mut rows = Vec::with_capacity(total);
        let mut params = Vec::with_capacity(total);
        for j in 0..total {
            let mut idx = [0usize; 5];
            let mut rem = j;
            for l in (0..5).rev() {
                idx[l] = rem % sizes[l];
                rem /= sizes[l];
            }
            rows.push(idx.map(|k| k as u32 + 1));
            params.push(LegParams {
                m_dsm: sets.m_dsm.get(idx[0]).copied().unwrap_or(0.0),
                n_rev1: sets.n_rev1.get(idx[1]).copied().unwrap_or(0),
                n_rev2: sets.n_rev2.get(idx[2]).copied().unwrap_or(0),
                f_pa: sets.f_pa.get(idx[3]).copied().unwrap_or(0) == 1,
                f_12: sets.f_12.get(idx[4]).copied().unwrap_or(0) == 1,
            });
        }
        let canonical = (0..total)
            .map(|j| {
                let c = params[j].canonical();
                (0..=j).find(|&k| params[k].canonical() == c).unwrap_or(j)
            })
            .collect();
        Self {
            rows,
            params,
            canonical,
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// 0-based representative row of the class containing `row`.
    pub fn canonical_of(&self, row: usize) -> usize {
        self.canonical[row]
    }

    /// 0-based rows that represent their equivalence class, ascending.
    pub fn canonical_rows(&self) -> Vec<usize> {
        (0..self.len()).filter(|&j| self.canonical[j] == j).collect()
    }

    /// 0-based row whose parameters equal `p` exactly.
    pub fn find(&self, p: &LegParams) -> Option<usize> {
        self.params.iter().position(|q| q == p)
    }
}

/// Checks lengths and ranges of a solution vector.
pub fn validate(problem: &Problem, s: &[u32]) -> Result<(), CodingError> {
    let expected = 2 * problem.n_legs();
    if s.len() != expected {
        return Err(CodingError::WrongLength {
            got: s.len(),
            expected,
        });
    }
    for (i, leg) in problem.legs.iter().enumerate() {
        for (pos, max) in [(2 * i, leg.targets.len()), (2 * i + 1, leg.types.len())] {
            let value = s[pos];
            if value == 0 || value as usize > max {
                return Err(CodingError::MalformedSolution {
                    pos: pos + 1,
                    value,
                    max,
                });
            }
        }
    }
    Ok(())
}

pub fn decode(problem: &Problem, s: &[u32]) -> Result<Plan, CodingError> {
    validate(problem, s)?;
    let (targets, params) = problem
        .legs
        .iter()
        .enumerate()
        .map(|(i, leg)| {
            (
                leg.targets[s[2 * i] as usize - 1],
                leg.types.params[s[2 * i + 1] as usize - 1],
            )
        })
        .unzip();
    Ok(Plan { targets, params })
}

pub fn encode(problem: &Problem, plan: &Plan) -> Result<SolutionVector, CodingError> {
    if plan.n_legs() != problem.n_legs() {
        return Err(CodingError::WrongLength {
            got: 2 * plan.n_legs(),
            expected: 2 * problem.n_legs(),
        });
    }
    let mut s = Vec::with_capacity(2 * plan.n_legs());
    for (i, leg) in problem.legs.iter().enumerate() {
        let bad = || CodingError::NotEncodable { leg: i + 1 };
        let k = leg.targets.iter().position(|&t| t == plan.targets[i]).ok_or_else(bad)?;
        let j = leg.types.find(&plan.params[i]).ok_or_else(bad)?;
        s.push(k as u32 + 1);
        s.push(j as u32 + 1);
    }
    Ok(s)
}

/// Replaces every type row by its class representative.
///
/// Works on prefixes too: only complete (target, row) pairs are touched.
pub fn canonical(problem: &Problem, s: &[u32]) -> SolutionVector {
    let mut out = s.to_vec();
    for (i, leg) in problem.legs.iter().enumerate() {
        if let Some(row) = out.get_mut(2 * i + 1) {
            *row = leg.types.canonical_of(*row as usize - 1) as u32 + 1;
        }
    }
    out
}

/// Sequence label (e.g. `EVVEJS`) of a valid vector.
pub fn sequence_label(problem: &Problem, s: &[u32]) -> String {
    let targets: Vec<usize> = problem
        .legs
        .iter()
        .enumerate()
        .map(|(i, leg)| leg.targets[s[2 * i] as usize - 1])
        .collect();
    problem.sequence_label(&targets)
}

/// Formats a vector as `1,2,1,...` (the CLI's `--solution` syntax).
pub fn format_vector(s: &[u32]) -> String {
    s.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
}

pub fn parse_vector(text: &str) -> Option<SolutionVector> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().ok())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sets(m: &[f64], n1: &[u32], n2: &[u32], fpa: &[u8], f12: &[u8]) -> LegSets {
        LegSets {
            targets: vec!["X".into()],
            m_dsm: m.to_vec(),
            n_rev1: n1.to_vec(),
            n_rev2: n2.to_vec(),
            f_pa: fpa.to_vec(),
            f_12: f12.to_vec(),
            tof_max: None,
        }
    }

    #[test]
    fn row_order_has_last_index_fastest() {
        let t = TypeTable::build(&sets(&[0.1], &[0], &[0, 1], &[0, 1], &[0, 1]));
        assert_eq!(t.len(), 8);
        assert_eq!(t.rows[0], [1, 1, 1, 1, 1]);
        assert_eq!(t.rows[1], [1, 1, 1, 1, 2]);
        assert_eq!(t.rows[2], [1, 1, 1, 2, 1]);
        assert_eq!(t.rows[3], [1, 1, 1, 2, 2]);
        assert_eq!(t.rows[4], [1, 1, 2, 1, 1]);
        assert_eq!(t.rows[7], [1, 1, 2, 2, 2]);
    }

    #[test]
    fn table_sizes() {
        let small = TypeTable::build(&sets(&[0.0], &[0], &[0], &[0, 1], &[0, 1]));
        assert_eq!(small.len(), 4);
        let laplace = TypeTable::build(&sets(&[-0.01, 0.0, 0.01], &[0], &[0, 1, 2, 3], &[0, 1], &[0, 1]));
        assert_eq!(laplace.len(), 48);
        assert_eq!(laplace.canonical_rows().len(), 40);
        let fixed = TypeTable::build(&sets(&[0.0], &[], &[0], &[], &[1]));
        assert_eq!(fixed.len(), 1);
        assert_eq!(fixed.rows[0], [1, 1, 1, 1, 1]);
        assert!(fixed.params[0].f_12);
    }

    #[test]
    fn canonical_classes_merge_unused_fields() {
        let t = TypeTable::build(&sets(&[0.0, 0.2], &[0, 1], &[0], &[0, 1], &[0]));
        // m_dsm = 0 rows: four raw rows, one class
        let zero_rows: Vec<usize> = (0..t.len()).filter(|&j| t.params[j].m_dsm == 0.0).collect();
        assert_eq!(zero_rows.len(), 4);
        assert!(zero_rows.iter().all(|&j| t.canonical_of(j) == zero_rows[0]));
        assert_eq!(t.canonical_rows().len(), 1 + 4);
    }

    #[test]
    fn vector_text_round_trip() {
        let s = vec![1, 2, 10, 48];
        assert_eq!(parse_vector(&format_vector(&s)).unwrap(), s);
        assert_eq!(parse_vector("1, 2 3").unwrap(), vec![1, 2, 3]);
        assert!(parse_vector("1,x").is_none());
    }
}
