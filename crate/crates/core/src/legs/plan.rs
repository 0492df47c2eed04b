//! Plan evaluation: the full tree of trajectories generated by a discrete plan.
//!
//! Every phasing root opens a new branch. Branches that violate a
//! time-of-flight cap are dropped; when none survives a leg the plan is
//! infeasible at that leg.

use serde::{Deserialize, Serialize};

use crate::conic::State2D;
use crate::ephem::body_state_of;
use crate::problem::{ObjectiveSpec, Problem};

use super::phasing::{build_leg, solve_phasing, LegSolution, PhasingContext};
use super::{LegError, LegParams};

/// A decoded plan: the target of every leg and its transfer type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Plan {
    /// Catalog indices of the leg targets.
    pub targets: Vec<usize>,
    pub params: Vec<LegParams>,
}

impl Plan {
    pub fn n_legs(&self) -> usize {
        self.targets.len()
    }
}

/// Spacecraft condition at the end of a partial branch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrivalCondition {
    /// Spacecraft state at the reached body.
    pub state: State2D,
    /// Catalog index of the reached body.
    pub body: usize,
    pub total_dv: f64,
    pub v0_used: f64,
    /// Solved λ per leg: v0 first, then signed pericentres.
    pub lambda_per_leg: Vec<f64>,
    pub leg_times: Vec<f64>,
    pub leg_dv: Vec<f64>,
    /// Days since departure.
    pub elapsed: f64,
    /// Phasing-root index chosen at every leg.
    pub path_id: Vec<usize>,
}

/// One complete trajectory of the tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub path_id: Vec<usize>,
    pub lambda: Vec<f64>,
    /// Leg durations, days.
    pub leg_times: Vec<f64>,
    /// |DSM| per leg, km/s.
    pub leg_dv: Vec<f64>,
    pub v0: f64,
    pub v_inf_arrival: f64,
    pub total_t: f64,
    pub total_dv: f64,
    pub f_obj: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum PlanOutcome {
    Feasible {
        records: Vec<TrajectoryRecord>,
        f_obj: f64,
    },
    /// `l_u` is the 1-based leg at which every branch died.
    Infeasible { l_u: usize },
}

impl PlanOutcome {
    pub fn f_obj(&self) -> Option<f64> {
        match self {
            PlanOutcome::Feasible { f_obj, .. } => Some(*f_obj),
            PlanOutcome::Infeasible { .. } => None,
        }
    }

    /// The record achieving the plan's objective; ties go to the earlier branch.
    pub fn best(&self) -> Option<&TrajectoryRecord> {
        match self {
            PlanOutcome::Feasible { records, .. } => records
                .iter()
                .reduce(|a, b| if b.f_obj < a.f_obj { b } else { a }),
            PlanOutcome::Infeasible { .. } => None,
        }
    }
}

pub fn objective(v_inf: f64, total_t: f64, spec: &ObjectiveSpec) -> f64 {
    match *spec {
        ObjectiveSpec::VInf => v_inf,
        ObjectiveSpec::VInfPlusTime { sigma } => v_inf + sigma * total_t,
    }
}

fn within_caps(problem: &Problem, leg: usize, leg_time: f64, elapsed: f64) -> bool {
    let leg_ok = problem.legs[leg].tof_max.is_none_or(|cap| leg_time <= cap);
    let total_ok = problem.spec.tof_total_max.is_none_or(|cap| elapsed <= cap);
    leg_ok && total_ok
}

fn context_for<'a>(
    problem: &'a Problem,
    from: Option<&ArrivalCondition>,
    target: usize,
    params: LegParams,
) -> Result<PhasingContext<'a>, LegError> {
    let catalog = &problem.catalog;
    let spec = &problem.spec;
    let target = &catalog.bodies[target];
    Ok(match from {
        None => {
            let origin = &catalog.bodies[problem.departure];
            let origin_state = body_state_of(catalog, origin, spec.t0)?;
            PhasingContext::launch(
                catalog,
                origin,
                origin_state,
                spec.phi0,
                (spec.v0_bounds[0], spec.v0_bounds[1]),
                params,
                target,
                spec.forced_delta_theta,
            )
        }
        Some(cond) => {
            let origin = &catalog.bodies[cond.body];
            // depart from where the body really is, with the spacecraft velocity
            let origin_state = body_state_of(catalog, origin, cond.state.t)?;
            PhasingContext::swingby(
                catalog,
                origin,
                origin_state,
                cond.state.v,
                params,
                target,
                spec.forced_delta_theta,
            )
        }
    })
}

fn extend(
    problem: &Problem,
    leg: usize,
    from: Option<&ArrivalCondition>,
    target: usize,
    params: LegParams,
    out: &mut Vec<ArrivalCondition>,
) {
    let Ok(ctx) = context_for(problem, from, target, params) else {
        return;
    };
    let roots = solve_phasing(&ctx, problem.spec.phasing_grid);
    for (k, lambda) in roots.into_iter().enumerate() {
        let Ok(sol) = build_leg(lambda, &ctx) else {
            continue;
        };
        let t_start = from.map_or(problem.spec.t0, |c| c.state.t);
        let leg_time = sol.second.t_int - t_start;
        let elapsed = from.map_or(0.0, |c| c.elapsed) + leg_time;
        if !within_caps(problem, leg, leg_time, elapsed) {
            continue;
        }
        let mut next = match from {
            Some(c) => c.clone(),
            None => ArrivalCondition {
                state: sol.second.state,
                body: target,
                total_dv: 0.0,
                v0_used: lambda,
                lambda_per_leg: Vec::with_capacity(problem.n_legs()),
                leg_times: Vec::with_capacity(problem.n_legs()),
                leg_dv: Vec::with_capacity(problem.n_legs()),
                elapsed: 0.0,
                path_id: Vec::with_capacity(problem.n_legs()),
            },
        };
        next.state = sol.second.state;
        next.body = target;
        next.total_dv += sol.first.dv;
        next.lambda_per_leg.push(lambda);
        next.leg_times.push(leg_time);
        next.leg_dv.push(sol.first.dv);
        next.elapsed = elapsed;
        next.path_id.push(k);
        out.push(next);
    }
}

/// Branches of the first leg (launch from the departure body).
pub fn launch_leg(problem: &Problem, target: usize, params: LegParams) -> Vec<ArrivalCondition> {
    let mut out = Vec::new();
    extend(problem, 0, None, target, params, &mut out);
    out
}

/// Extends every condition by leg `leg` (0-based, at least 1).
pub fn step_leg(
    problem: &Problem,
    conditions: &[ArrivalCondition],
    leg: usize,
    target: usize,
    params: LegParams,
) -> Vec<ArrivalCondition> {
    let mut out = Vec::new();
    for cond in conditions {
        extend(problem, leg, Some(cond), target, params, &mut out);
    }
    out
}

/// Turns the surviving conditions of the last leg into scored records.
pub fn finish(problem: &Problem, conditions: &[ArrivalCondition]) -> PlanOutcome {
    let mut records = Vec::with_capacity(conditions.len());
    for c in conditions {
        let Ok(planet) = body_state_of(&problem.catalog, &problem.catalog.bodies[c.body], c.state.t)
        else {
            continue;
        };
        let v_inf = (c.state.v - planet.v).norm();
        records.push(TrajectoryRecord {
            path_id: c.path_id.clone(),
            lambda: c.lambda_per_leg.clone(),
            leg_times: c.leg_times.clone(),
            leg_dv: c.leg_dv.clone(),
            v0: c.v0_used,
            v_inf_arrival: v_inf,
            total_t: c.elapsed,
            total_dv: c.total_dv,
            f_obj: objective(v_inf, c.elapsed, &problem.spec.objective),
        });
    }
    match records.iter().map(|r| r.f_obj).reduce(f64::min) {
        Some(f_obj) => PlanOutcome::Feasible { records, f_obj },
        None => PlanOutcome::Infeasible {
            l_u: problem.n_legs(),
        },
    }
}

/// Schedules every trajectory of `plan`.
pub fn evaluate_plan(problem: &Problem, plan: &Plan) -> PlanOutcome {
    assert_eq!(plan.n_legs(), problem.n_legs(), "plan and problem disagree on leg count");
    let mut conds = launch_leg(problem, plan.targets[0], plan.params[0]);
    if conds.is_empty() {
        return PlanOutcome::Infeasible { l_u: 1 };
    }
    for leg in 1..plan.n_legs() {
        conds = step_leg(problem, &conds, leg, plan.targets[leg], plan.params[leg]);
        if conds.is_empty() {
            return PlanOutcome::Infeasible { l_u: leg + 1 };
        }
    }
    finish(problem, &conds)
}

/// Rebuilds the legs of one branch, for plotting and inspection.
pub fn trace_branch(
    problem: &Problem,
    plan: &Plan,
    path_id: &[usize],
) -> Result<Vec<LegSolution>, LegError> {
    if path_id.len() != plan.n_legs() {
        return Err(LegError::LegInfeasible(format!(
            "branch id has {} entries, plan has {} legs",
            path_id.len(),
            plan.n_legs()
        )));
    }
    let mut legs = Vec::with_capacity(plan.n_legs());
    let mut cond: Option<ArrivalCondition> = None;
    for (leg, &k) in path_id.iter().enumerate() {
        let ctx = context_for(problem, cond.as_ref(), plan.targets[leg], plan.params[leg])?;
        let roots = solve_phasing(&ctx, problem.spec.phasing_grid);
        let lambda = *roots.get(k).ok_or_else(|| {
            LegError::LegInfeasible(format!("leg {} has no phasing root #{k}", leg + 1))
        })?;
        let sol = build_leg(lambda, &ctx)?;
        let prev_elapsed = cond.as_ref().map_or(0.0, |c| c.elapsed);
        let t_start = cond.as_ref().map_or(problem.spec.t0, |c| c.state.t);
        cond = Some(ArrivalCondition {
            state: sol.second.state,
            body: plan.targets[leg],
            total_dv: 0.0,
            v0_used: 0.0,
            lambda_per_leg: Vec::new(),
            leg_times: Vec::new(),
            leg_dv: Vec::new(),
            elapsed: prev_elapsed + sol.second.t_int - t_start,
            path_id: Vec::new(),
        });
        legs.push(sol);
    }
    Ok(legs)
}
