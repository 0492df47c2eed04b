//! The two conic arcs of a deep-space leg.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::conic::{
    intersect_orbits, orbit_from_state, state_at_anomaly, time_of_flight, wrap_two_pi, Orbit2D,
    State2D, SECONDS_PER_DAY,
};
use crate::ephem::Body;

use super::{LegError, LegParams};

/// Result of propagating from the leg start to point M.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FirstArc {
    /// Conic flown from the leg start to M.
    pub orbit: Orbit2D,
    pub theta_start: f64,
    /// Anomaly of M on `orbit`.
    pub theta_end: f64,
    /// State at M after the DSM.
    pub state_m: State2D,
    /// Conic flown after M.
    pub orbit_after: Orbit2D,
    /// Anomaly of M on `orbit_after`.
    pub theta_m: f64,
    /// |DSM|, km/s.
    pub dv: f64,
}

/// Result of propagating from M to the target-orbit intersection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecondArc {
    pub theta_int: f64,
    /// Anomaly of the intersection on the target's orbit.
    pub theta_bar: f64,
    /// Epoch at the intersection, days.
    pub t_int: f64,
    pub state: State2D,
}

fn elliptic_orbit(state: &State2D, mu: f64, what: &str) -> Result<(Orbit2D, f64), LegError> {
    let (orbit, theta) = orbit_from_state(state, mu)?;
    if !orbit.is_elliptic() {
        return Err(LegError::LegInfeasible(format!(
            "{what} orbit not elliptic (e = {:.4})",
            orbit.e
        )));
    }
    Ok((orbit, theta))
}

/// Propagates from the leg start to M and applies the tangential DSM.
///
/// With a DSM, M is the pericentre (`f_pa = false`) or apocentre reached
/// first, followed by `n_rev1` extra revolutions. Without one, M lies
/// `forced_dtheta` ahead of the start and no velocity change is applied.
pub fn first_arc(
    start: &State2D,
    mu: f64,
    params: &LegParams,
    forced_dtheta: f64,
) -> Result<FirstArc, LegError> {
    let (orbit, theta_start) = elliptic_orbit(start, mu, "departure")?;
    let (theta_end, n_rev) = if params.has_dsm() {
        (if params.f_pa { PI } else { 0.0 }, params.n_rev1)
    } else {
        (wrap_two_pi(theta_start + forced_dtheta), 0)
    };
    let mut dt = time_of_flight(&orbit, theta_start, theta_end, n_rev)?;
    if dt <= 0.0 {
        // starting exactly on the selected apsis: wait one revolution
        dt += TAU / orbit.mean_motion();
    }
    let t_m = start.t + dt / SECONDS_PER_DAY;
    let mut state_m = state_at_anomaly(&orbit, theta_end, t_m)?;
    if params.has_dsm() {
        let dir = state_m.v.normalize();
        state_m.v += dir * params.m_dsm;
    }
    let (orbit_after, theta_m) = if params.has_dsm() {
        elliptic_orbit(&state_m, mu, "post-DSM")?
    } else {
        (orbit, theta_end)
    };
    Ok(FirstArc {
        orbit,
        theta_start,
        theta_end,
        state_m,
        orbit_after,
        theta_m,
        dv: params.m_dsm.abs(),
    })
}

/// Propagates from M to the selected intersection with the target's orbit.
///
/// `f_12 = false` takes the intersection reached first moving forward from
/// M; `true` takes the other one. A tangent contact counts as a single
/// intersection, so it cannot be selected with `f_12 = true`.
pub fn second_arc(
    orbit: &Orbit2D,
    theta_m: f64,
    t_m: f64,
    target: &Body,
    f_12: bool,
    n_rev2: u32,
) -> Result<SecondArc, LegError> {
    let pairs = intersect_orbits(orbit, &target.elements)?;
    let mut ranked: Vec<_> = pairs
        .iter()
        .map(|p| (wrap_two_pi(p.theta_sc - theta_m), *p))
        .collect();
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0));
    let pick = usize::from(f_12);
    let (_, pair) = *ranked.get(pick).ok_or(LegError::NoIntersection)?;
    let dt = time_of_flight(orbit, theta_m, pair.theta_sc, n_rev2)?;
    let t_int = t_m + dt / SECONDS_PER_DAY;
    let state = state_at_anomaly(orbit, pair.theta_sc, t_int)?;
    Ok(SecondArc {
        theta_int: pair.theta_sc,
        theta_bar: pair.theta_body,
        t_int,
        state,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conic::Vec2;
    use approx::assert_relative_eq;

    const MU_SUN: f64 = 1.327_124_400_18e11;
    const AU: f64 = 1.495_978_707e8;

    fn params(m_dsm: f64, n_rev1: u32, f_pa: bool) -> LegParams {
        LegParams {
            m_dsm,
            n_rev1,
            n_rev2: 0,
            f_pa,
            f_12: false,
        }
    }

    fn target(a: f64) -> Body {
        Body {
            name: "T".into(),
            mu_body: 1e5,
            radius: 5000.0,
            rp_min_factor: 1.0,
            rp_max_factor: 5.0,
            elements: Orbit2D::new(a, 0.0, 0.0, MU_SUN),
            mean_anomaly_epoch: 0.0,
        }
    }

    #[test]
    fn forced_propagation_without_dsm() {
        let o = Orbit2D::new(1.2 * AU, 0.2, 0.5, MU_SUN);
        let start = state_at_anomaly(&o, 1.0, 100.0).unwrap();
        let arc = first_arc(&start, MU_SUN, &params(0.0, 3, true), 0.3).unwrap();
        assert_relative_eq!(arc.state_m.r.norm(), o.p() / (1.0 + 0.2 * 1.3f64.cos()), max_relative = 1e-12);
        assert!(arc.state_m.t > start.t);
        assert_eq!(arc.dv, 0.0);
        let expected = time_of_flight(&o, 1.0, 1.3, 0).unwrap() / SECONDS_PER_DAY;
        assert_relative_eq!(arc.state_m.t - start.t, expected, max_relative = 1e-12);
    }

    #[test]
    fn prograde_burn_at_pericentre_raises_apocentre() {
        let r = AU;
        let v = (MU_SUN / r).sqrt();
        let start = State2D::new(Vec2::new(r, 0.0), Vec2::new(0.0, v), 0.0);
        let arc = first_arc(&start, MU_SUN, &params(0.5, 0, false), 0.3).unwrap();
        let before = arc.orbit;
        let after = arc.orbit_after;
        assert_relative_eq!(after.pericentre_radius(), arc.state_m.r.norm(), max_relative = 1e-9);
        assert!(after.apocentre_radius().unwrap() > before.apocentre_radius().unwrap() + 1e5);
        assert_relative_eq!(arc.dv, 0.5);
    }

    #[test]
    fn time_to_pericentre_plus_one_revolution() {
        let o = Orbit2D::new(1.3 * AU, 0.4, 0.0, MU_SUN);
        let start = state_at_anomaly(&o, 3.0, 0.0).unwrap();
        let arc = first_arc(&start, MU_SUN, &params(0.1, 1, false), 0.3).unwrap();
        // quadrature of dt/dθ = r²/h from θ = 3 to 2π, plus one period
        let h = o.angular_momentum();
        let n = 40_000;
        let (lo, hi) = (3.0, TAU);
        let step = (hi - lo) / n as f64;
        let f = |th: f64| o.radius_at(th).powi(2) / h;
        let mut acc = f(lo) + f(hi);
        for i in 1..n {
            acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(lo + i as f64 * step);
        }
        let quad = acc * step / 3.0 + o.period().unwrap();
        assert_relative_eq!(arc.state_m.t * SECONDS_PER_DAY, quad, max_relative = 1e-10);
    }

    #[test]
    fn apocentre_dsm_and_retro_burn_checks() {
        let o = Orbit2D::new(1.3 * AU, 0.3, 0.2, MU_SUN);
        let start = state_at_anomaly(&o, 0.5, 0.0).unwrap();
        let arc = first_arc(&start, MU_SUN, &params(-0.2, 0, true), 0.3).unwrap();
        assert_relative_eq!(arc.theta_end, PI);
        assert_relative_eq!(arc.state_m.r.norm(), o.apocentre_radius().unwrap(), max_relative = 1e-12);
        // a burn cancelling the whole velocity cannot yield a prograde orbit
        let speed = state_at_anomaly(&o, PI, 0.0).unwrap().v.norm();
        assert!(matches!(
            first_arc(&start, MU_SUN, &params(-1.5 * speed, 0, true), 0.3),
            Err(LegError::LegInfeasible(_))
        ));
    }

    #[test]
    fn second_arc_selection_and_revolutions() {
        let sc = Orbit2D::new(1.2 * AU, 0.3, 0.0, MU_SUN);
        let body = target(AU);
        let a = second_arc(&sc, 0.2, 0.0, &body, false, 0).unwrap();
        let b = second_arc(&sc, 0.2, 0.0, &body, true, 0).unwrap();
        assert!(a.t_int < b.t_int);
        assert!(a.theta_int != b.theta_int);
        for arc in [&a, &b] {
            let on_body = state_at_anomaly(&body.elements, arc.theta_bar, 0.0).unwrap().r;
            assert!((on_body - arc.state.r).norm() / AU < 1e-9);
        }
        let a2 = second_arc(&sc, 0.2, 0.0, &body, false, 2).unwrap();
        let period = sc.period().unwrap() / SECONDS_PER_DAY;
        assert_relative_eq!(a2.t_int - a.t_int, 2.0 * period, max_relative = 1e-12);
    }

    #[test]
    fn second_arc_failures() {
        let sc = Orbit2D::new(AU, 0.0, 0.0, MU_SUN);
        assert_eq!(
            second_arc(&sc, 0.0, 0.0, &target(AU), false, 0),
            Err(LegError::DegenerateIntersection)
        );
        assert_eq!(
            second_arc(&sc, 0.0, 0.0, &target(3.0 * AU), false, 0),
            Err(LegError::NoIntersection)
        );
    }
}
