//! The phasing problem: choose the free parameter λ of a leg (launch speed
//! or signed swing-by pericentre) so that the target body sits at the orbit
//! intersection when the spacecraft gets there.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::conic::{wrap_pi, State2D, Vec2};
use crate::ephem::{body_true_anomaly, Body, BodyCatalog};
use crate::roots::brent;

use super::arc::{first_arc, second_arc, FirstArc, SecondArc};
use super::events::{launch_state, swingby};
use super::{LegError, LegParams};

/// Residual below which Δθ counts as zero, rad.
pub const PHASING_TOL: f64 = 1e-9;
const BRENT_MAX_ITER: usize = 200;
/// Roots closer than this (relative) are merged.
const ROOT_DEDUP_REL: f64 = 1e-6;
/// Feasibility edges are located to this fraction of the band width.
const EDGE_TOL_REL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PhasingMode {
    /// λ is the launch excess speed; `phi0` is fixed.
    Launch { phi0: f64 },
    /// λ is the signed swing-by pericentre; `v_in` is the inbound velocity.
    Swingby { v_in: Vec2 },
}

/// Everything a leg needs besides λ.
#[derive(Debug, Clone)]
pub struct PhasingContext<'a> {
    pub catalog: &'a BodyCatalog,
    pub mode: PhasingMode,
    /// Body the leg starts from.
    pub origin: &'a Body,
    pub origin_state: State2D,
    pub params: LegParams,
    pub target: &'a Body,
    /// Disjoint λ intervals to sample.
    pub bands: Vec<(f64, f64)>,
    pub forced_dtheta: f64,
}

impl<'a> PhasingContext<'a> {
    #[allow(clippy::too_many_arguments)]
    pub fn launch(
        catalog: &'a BodyCatalog,
        origin: &'a Body,
        origin_state: State2D,
        phi0: f64,
        v0_bounds: (f64, f64),
        params: LegParams,
        target: &'a Body,
        forced_dtheta: f64,
    ) -> Self {
        Self {
            catalog,
            mode: PhasingMode::Launch { phi0 },
            origin,
            origin_state,
            params,
            target,
            bands: vec![v0_bounds],
            forced_dtheta,
        }
    }

    /// Swing-by context; λ ranges over `[-rp_max, -rp_min] ∪ [rp_min, rp_max]`.
    pub fn swingby(
        catalog: &'a BodyCatalog,
        origin: &'a Body,
        origin_state: State2D,
        v_in: Vec2,
        params: LegParams,
        target: &'a Body,
        forced_dtheta: f64,
    ) -> Self {
        let (lo, hi) = origin.pericentre_bounds();
        Self {
            catalog,
            mode: PhasingMode::Swingby { v_in },
            origin,
            origin_state,
            params,
            target,
            bands: vec![(-hi, -lo), (lo, hi)],
            forced_dtheta,
        }
    }

    fn contains(&self, lambda: f64) -> bool {
        self.bands.iter().any(|&(lo, hi)| {
            let slack = 1e-12 * lo.abs().max(hi.abs());
            lambda >= lo - slack && lambda <= hi + slack
        })
    }
}

/// A leg built for one value of λ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LegSolution {
    pub lambda: f64,
    /// State just after the launch or swing-by.
    pub departure: State2D,
    pub first: FirstArc,
    pub second: SecondArc,
    /// Target true anomaly at the intersection epoch.
    pub theta_target: f64,
    pub delta_theta: f64,
}

/// Builds the whole leg for a given λ.
pub fn build_leg(lambda: f64, ctx: &PhasingContext) -> Result<LegSolution, LegError> {
    if !ctx.contains(lambda) {
        return Err(LegError::LegInfeasible(format!("λ = {lambda} outside its bounds")));
    }
    let mu = ctx.catalog.central_mu;
    let departure = match ctx.mode {
        PhasingMode::Launch { phi0 } => launch_state(&ctx.origin_state, lambda, phi0, mu)?,
        PhasingMode::Swingby { v_in } => {
            let v = swingby(&ctx.origin_state, &v_in, lambda, ctx.origin)?;
            State2D::new(ctx.origin_state.r, v, ctx.origin_state.t)
        }
    };
    let first = first_arc(&departure, mu, &ctx.params, ctx.forced_dtheta)?;
    let second = second_arc(
        &first.orbit_after,
        first.theta_m,
        first.state_m.t,
        ctx.target,
        ctx.params.f_12,
        ctx.params.n_rev2,
    )?;
    let theta_target = body_true_anomaly(ctx.catalog, ctx.target, second.t_int)?;
    Ok(LegSolution {
        lambda,
        departure,
        first,
        second,
        theta_target,
        delta_theta: wrap_pi(theta_target - second.theta_bar),
    })
}

/// Phase mismatch `θ_target(t_int) - θ̄`, wrapped to `(-π, π]`.
pub fn delta_theta(lambda: f64, ctx: &PhasingContext) -> Result<f64, LegError> {
    build_leg(lambda, ctx).map(|s| s.delta_theta)
}

/// All roots of Δθ over the context's λ bands, ascending.
///
/// Each band is sampled at `n_grid` evenly spaced points. Where a feasible
/// sample neighbours an infeasible one, the feasibility edge is located by
/// bisection and added as a sample, so a root inside such a cell can still be
/// bracketed. Adjacent finite samples that change sign without a wrap-sized
/// jump seed a Brent search; only roots meeting [`PHASING_TOL`] are kept.
pub fn solve_phasing(ctx: &PhasingContext, n_grid: usize) -> Vec<f64> {
    let n_grid = n_grid.max(2);
    let eval = |x: f64| delta_theta(x, ctx).ok();
    let mut roots = Vec::new();
    for &(lo, hi) in &ctx.bands {
        let step = (hi - lo) / (n_grid - 1) as f64;
        let grid: Vec<(f64, Option<f64>)> = (0..n_grid)
            .map(|k| {
                let x = if k + 1 == n_grid { hi } else { lo + step * k as f64 };
                (x, eval(x))
            })
            .collect();
        let edge_tol = EDGE_TOL_REL * (hi - lo);
        let mut samples = Vec::with_capacity(grid.len() + 4);
        for w in grid.windows(2) {
            samples.push(w[0]);
            match (w[0].1, w[1].1) {
                (Some(_), None) => samples.push(feasibility_edge(&eval, w[0], w[1].0, edge_tol)),
                (None, Some(_)) => samples.push(feasibility_edge(&eval, w[1], w[0].0, edge_tol)),
                _ => {}
            }
        }
        samples.extend(grid.last().copied());
        let grid = samples;
        for w in grid.windows(2) {
            let ((xa, fa), (xb, fb)) = (w[0], w[1]);
            let (Some(fa), Some(fb)) = (fa, fb) else {
                continue;
            };
            if fa == 0.0 {
                roots.push(xa);
                continue;
            }
            if fa.signum() == fb.signum() || (fb - fa).abs() >= PI {
                continue;
            }
            if let Some(r) = brent(eval, xa, xb, fa, fb, PHASING_TOL, BRENT_MAX_ITER) {
                roots.push(r);
            }
        }
        if let Some((x, Some(f))) = grid.last() {
            if *f == 0.0 {
                roots.push(*x);
            }
        }
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|b, a| (*b - *a).abs() <= ROOT_DEDUP_REL * a.abs().max(b.abs()));
    roots
}

/// Feasible sample closest to the edge, bisecting from feasible `good`
/// towards infeasible `bad`.
fn feasibility_edge(
    eval: &impl Fn(f64) -> Option<f64>,
    (mut good, mut f_good): (f64, Option<f64>),
    mut bad: f64,
    tol: f64,
) -> (f64, Option<f64>) {
    while (bad - good).abs() > tol {
        let mid = 0.5 * (good + bad);
        match eval(mid) {
            Some(f) => {
                good = mid;
                f_good = Some(f);
            }
            None => bad = mid,
        }
    }
    (good, f_good)
}
