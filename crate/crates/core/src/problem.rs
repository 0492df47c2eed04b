//! Search-space definition: the departure, the per-leg candidate targets and
//! the discrete sets for the five transfer-type parameters.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ephem::{BodyCatalog, EphemError};
use crate::planner::coding::TypeTable;

pub const DEFAULT_FORCED_DELTA_THETA: f64 = 0.3;
pub const DEFAULT_PHASING_GRID: usize = 64;

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error(transparent)]
    Ephem(#[from] EphemError),
    #[error("leg {leg}: {msg}")]
    BadLeg { leg: usize, msg: String },
    #[error("{0}")]
    Invalid(String),
}

/// How a complete trajectory is scored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ObjectiveSpec {
    /// Arrival excess speed, km/s.
    VInf,
    /// `v_inf + sigma * T`, sigma in km/s per day.
    VInfPlusTime { sigma: f64 },
}

/// Candidate targets and parameter sets of one leg, as written in a config.
///
/// `m_dsm` is in km/s. Empty `n_rev1` / `f_pa` sets mark parameters unused by
/// a leg without deep-space manoeuvres.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LegSets {
    pub targets: Vec<String>,
    pub m_dsm: Vec<f64>,
    #[serde(default)]
    pub n_rev1: Vec<u32>,
    pub n_rev2: Vec<u32>,
    #[serde(default)]
    pub f_pa: Vec<u8>,
    pub f_12: Vec<u8>,
    /// Optional cap on this leg's duration, days.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tof_max: Option<f64>,
}

fn default_forced() -> f64 {
    DEFAULT_FORCED_DELTA_THETA
}

fn default_grid() -> usize {
    DEFAULT_PHASING_GRID
}

/// Full problem description as stored in a case-study config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub departure: String,
    /// Departure epoch, days MJD2000.
    pub t0: f64,
    /// Launch direction, rad, counter-clockwise from the planet velocity.
    pub phi0: f64,
    /// Launch excess speed range, km/s.
    pub v0_bounds: [f64; 2],
    pub legs: Vec<LegSets>,
    /// Cap on the total time of flight, days.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tof_total_max: Option<f64>,
    pub objective: ObjectiveSpec,
    #[serde(default = "default_forced")]
    pub forced_delta_theta: f64,
    #[serde(default = "default_grid")]
    pub phasing_grid: usize,
    /// Per-body swing-by pericentre range overrides, multiples of the radius.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub rp_factors: BTreeMap<String, [f64; 2]>,
}

/// One leg after validation: body indices and the transfer-type table.
#[derive(Debug, Clone)]
pub struct LegDef {
    pub targets: Vec<usize>,
    pub types: TypeTable,
    pub tof_max: Option<f64>,
}

/// A validated problem bound to its catalog.
#[derive(Debug, Clone)]
pub struct Problem {
    pub spec: ProblemSpec,
    pub catalog: BodyCatalog,
    pub departure: usize,
    pub legs: Vec<LegDef>,
}

impl Problem {
    pub fn new(spec: ProblemSpec, mut catalog: BodyCatalog) -> Result<Self, ProblemError> {
        for (name, [lo, hi]) in &spec.rp_factors {
            let idx = catalog.index_of(name)?;
            catalog.bodies[idx].rp_min_factor = *lo;
            catalog.bodies[idx].rp_max_factor = *hi;
        }
        catalog.validate()?;

        if spec.legs.is_empty() {
            return Err(ProblemError::Invalid("problem has no legs".into()));
        }
        let [vlo, vhi] = spec.v0_bounds;
        if !(vlo >= 0.0 && vlo < vhi) {
            return Err(ProblemError::Invalid(format!(
                "v0_bounds must satisfy 0 <= min < max, got {:?}",
                spec.v0_bounds
            )));
        }
        if spec.phasing_grid < 2 {
            return Err(ProblemError::Invalid("phasing_grid must be at least 2".into()));
        }
        if !(spec.forced_delta_theta > 0.0 && spec.forced_delta_theta < std::f64::consts::TAU) {
            return Err(ProblemError::Invalid("forced_delta_theta must lie in (0, 2π)".into()));
        }
        if let ObjectiveSpec::VInfPlusTime { sigma } = spec.objective {
            if !(sigma >= 0.0) {
                return Err(ProblemError::Invalid("sigma must be non-negative".into()));
            }
        }
        let departure = catalog.index_of(&spec.departure)?;

        let mut legs = Vec::with_capacity(spec.legs.len());
        for (i, sets) in spec.legs.iter().enumerate() {
            let leg = i + 1;
            let bad = |msg: &str| ProblemError::BadLeg {
                leg,
                msg: msg.to_string(),
            };
            if sets.targets.is_empty() {
                return Err(bad("target list is empty"));
            }
            if sets.m_dsm.is_empty() || sets.n_rev2.is_empty() || sets.f_12.is_empty() {
                return Err(bad("m_dsm, n_rev2 and f_12 sets must be non-empty"));
            }
            let any_dsm = sets.m_dsm.iter().any(|&m| m != 0.0);
            if any_dsm && (sets.n_rev1.is_empty() || sets.f_pa.is_empty()) {
                return Err(bad("n_rev1 and f_pa may only be empty when every m_dsm is 0"));
            }
            if sets.f_pa.iter().chain(&sets.f_12).any(|&f| f > 1) {
                return Err(bad("flags must be 0 or 1"));
            }
            if sets.m_dsm.iter().any(|m| !m.is_finite()) {
                return Err(bad("m_dsm values must be finite"));
            }
            if has_duplicates(&sets.m_dsm)
                || has_duplicates(&sets.n_rev1)
                || has_duplicates(&sets.n_rev2)
                || has_duplicates(&sets.f_pa)
                || has_duplicates(&sets.f_12)
                || has_duplicates(&sets.targets)
            {
                return Err(bad("sets must not contain duplicates"));
            }
            let targets = sets
                .targets
                .iter()
                .map(|n| catalog.index_of(n))
                .collect::<Result<Vec<_>, _>>()?;
            if i + 1 == spec.legs.len() && targets.len() != 1 {
                return Err(bad("the last leg must have a single destination"));
            }
            legs.push(LegDef {
                targets,
                types: TypeTable::build(sets),
                tof_max: sets.tof_max,
            });
        }
        Ok(Self {
            spec,
            catalog,
            departure,
            legs,
        })
    }

    pub fn n_legs(&self) -> usize {
        self.legs.len()
    }

    /// Cardinality of the raw coding space.
    pub fn raw_space_size(&self) -> u128 {
        self.legs
            .iter()
            .map(|l| (l.targets.len() * l.types.len()) as u128)
            .product()
    }

    /// Cardinality after merging type rows that decode to equivalent legs.
    pub fn canonical_space_size(&self) -> u128 {
        self.legs
            .iter()
            .map(|l| (l.targets.len() * l.types.canonical_rows().len()) as u128)
            .product()
    }

    pub fn body_name(&self, idx: usize) -> &str {
        &self.catalog.bodies[idx].name
    }

    /// Single-letter sequence label such as `GGCGC`; `Me` for Mercury.
    pub fn sequence_label(&self, targets: &[usize]) -> String {
        std::iter::once(self.departure)
            .chain(targets.iter().copied())
            .map(|i| body_abbrev(self.body_name(i)))
            .collect()
    }
}

pub fn body_abbrev(name: &str) -> String {
    match name {
        "Mercury" => "Me".to_string(),
        _ => name.chars().next().map(String::from).unwrap_or_default(),
    }
}

fn has_duplicates<T: PartialEq>(v: &[T]) -> bool {
    v.iter().enumerate().any(|(i, x)| v[..i].contains(x))
}
