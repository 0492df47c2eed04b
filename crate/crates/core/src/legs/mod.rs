//! The linked-conic trajectory model.
//!
//! A leg starts with a launch or a swing-by, follows a first conic arc to a
//! point M (an apsis where a tangential DSM is applied, or a fixed angular
//! offset when there is none), then a second arc to an intersection with the
//! target body's orbit. The free launch speed or signed swing-by pericentre is
//! tuned so the body is actually at that intersection ([`phasing`]), and
//! [`plan`] chains legs into the full tree of trajectories of a plan.

pub mod arc;
pub mod events;
pub mod phasing;
pub mod plan;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::conic::ConicError;
use crate::ephem::EphemError;

pub use arc::{first_arc, second_arc, FirstArc, SecondArc};
pub use events::{launch_state, swingby, swingby_deflection};
pub use phasing::{build_leg, delta_theta, solve_phasing, LegSolution, PhasingContext, PhasingMode};
pub use plan::{
    evaluate_plan, finish, launch_leg, objective, step_leg, trace_branch, ArrivalCondition, Plan,
    PlanOutcome, TrajectoryRecord,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LegError {
    #[error("leg infeasible: {0}")]
    LegInfeasible(String),
    #[error("swing-by pericentre {rp} km outside [{min}, {max}] km")]
    PericentreOutOfRange { rp: f64, min: f64, max: f64 },
    #[error("swing-by with zero relative velocity")]
    DegenerateSwingby,
    #[error("spacecraft orbit never meets the target orbit")]
    NoIntersection,
    #[error("spacecraft and target orbits coincide")]
    DegenerateIntersection,
    #[error("ephemeris: {0}")]
    Ephem(String),
}

impl From<ConicError> for LegError {
    fn from(e: ConicError) -> Self {
        match e {
            ConicError::DegenerateIntersection => LegError::DegenerateIntersection,
            other => LegError::LegInfeasible(other.to_string()),
        }
    }
}

impl From<EphemError> for LegError {
    fn from(e: EphemError) -> Self {
        LegError::Ephem(e.to_string())
    }
}

/// The five parameters that fix the shape of one leg.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LegParams {
    /// Signed tangential DSM, km/s; zero means no manoeuvre.
    pub m_dsm: f64,
    /// Full revolutions before the DSM.
    pub n_rev1: u32,
    /// Full revolutions between M and the target-orbit intersection.
    pub n_rev2: u32,
    /// DSM at apocentre rather than pericentre.
    pub f_pa: bool,
    /// Take the second of the two orbit intersections.
    pub f_12: bool,
}

impl LegParams {
    pub fn has_dsm(&self) -> bool {
        self.m_dsm != 0.0
    }

    /// Collapses parameters the model ignores (`n_rev1`, `f_pa` without a DSM).
    pub fn canonical(&self) -> Self {
        if self.has_dsm() {
            *self
        } else {
            Self {
                n_rev1: 0,
                f_pa: false,
                ..*self
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_drops_unused_fields() {
        let p = LegParams {
            m_dsm: 0.0,
            n_rev1: 2,
            n_rev2: 1,
            f_pa: true,
            f_12: true,
        };
        let c = p.canonical();
        assert_eq!((c.n_rev1, c.f_pa, c.n_rev2, c.f_12), (0, false, 1, true));
        let q = LegParams { m_dsm: 0.01, ..p };
        assert_eq!(q.canonical(), q);
    }
}
