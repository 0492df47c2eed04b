//! Instantaneous events: launch and unpowered swing-by.

use std::f64::consts::PI;

use crate::conic::{orbit_from_state, rotate, State2D, Vec2};
use crate::ephem::Body;

use super::LegError;

/// Launch from a planet with excess speed `v0` at angle `phi0`, measured
/// counter-clockwise from the planet's velocity.
///
/// The resulting central-body orbit must be prograde and elliptic.
pub fn launch_state(
    planet_state: &State2D,
    v0: f64,
    phi0: f64,
    mu_central: f64,
) -> Result<State2D, LegError> {
    let dir = planet_state.v.normalize();
    let v = planet_state.v + rotate(&dir, phi0) * v0;
    let out = State2D::new(planet_state.r, v, planet_state.t);
    let (orbit, _) = orbit_from_state(&out, mu_central)?;
    if !orbit.is_elliptic() {
        return Err(LegError::LegInfeasible(format!(
            "launch orbit not elliptic (e = {:.4})",
            orbit.e
        )));
    }
    Ok(out)
}

/// Deflection magnitude `2 θ∞ - π` of a hyperbolic flyby, rad.
pub fn swingby_deflection(v_inf: f64, rp: f64, mu_body: f64) -> f64 {
    let k = mu_body / rp;
    let theta_inf = (-k / (v_inf * v_inf + k)).acos();
    2.0 * theta_inf - PI
}

/// Heliocentric velocity after an unpowered swing-by.
///
/// The relative velocity keeps its magnitude and is rotated by
/// `sgn(rps) (2 θ∞ - π)`.
pub fn swingby(planet_state: &State2D, v_in: &Vec2, rps: f64, body: &Body) -> Result<Vec2, LegError> {
    let rp = rps.abs();
    let (min, max) = body.pericentre_bounds();
    // tolerate rounding at the band edges
    let slack = 1e-9 * max;
    if !(rp >= min - slack && rp <= max + slack) {
        return Err(LegError::PericentreOutOfRange { rp, min, max });
    }
    let rel = v_in - planet_state.v;
    let v_inf = rel.norm();
    if !(v_inf > 0.0) {
        return Err(LegError::DegenerateSwingby);
    }
    let delta = rps.signum() * swingby_deflection(v_inf, rp, body.mu_body);
    Ok(planet_state.v + rotate(&rel, delta))
}
