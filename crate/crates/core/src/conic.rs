//! Planar two-body geometry.
//!
//! Everything here works in a single inertial plane about one central body:
//! conic construction from a state, evaluation at a true anomaly, the Kepler
//! time law between two anomalies and the intersection of two coplanar conics.
//!
//! Units are km, km/s and rad. Epochs carried by [`State2D`] are days; the
//! time law returns seconds.

use std::f64::consts::{PI, TAU};

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Vec2 = Vector2<f64>;

pub const SECONDS_PER_DAY: f64 = 86_400.0;

/// Normalised coefficients below this are treated as zero when testing two
/// conics for coincidence.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Tolerance on `|C/R| - 1` inside which an intersection is a tangency.
pub const TANGENCY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum ConicError {
    #[error("retrograde or rectilinear state (h_z = {0:e})")]
    RetrogradeOrbit(f64),
    #[error("orbit is not elliptic (e = {0})")]
    NonElliptic(f64),
    #[error("conics coincide; infinitely many intersections")]
    DegenerateIntersection,
    #[error("true anomaly {0} rad lies beyond the hyperbolic asymptote")]
    BeyondAsymptote(f64),
    #[error("invalid state: {0}")]
    InvalidState(&'static str),
}

/// Wraps an angle into `[0, 2π)`.
#[inline]
pub fn wrap_two_pi(x: f64) -> f64 {
    let w = x.rem_euclid(TAU);
    // rem_euclid can return TAU itself for tiny negative inputs
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Wraps an angle into `(-π, π]`.
#[inline]
pub fn wrap_pi(x: f64) -> f64 {
    let w = wrap_two_pi(x);
    if w > PI {
        w - TAU
    } else {
        w
    }
}

#[inline]
pub(crate) fn cross(a: &Vec2, b: &Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Rotates `v` counter-clockwise by `angle`.
#[inline]
pub fn rotate(v: &Vec2, angle: f64) -> Vec2 {
    let (s, c) = angle.sin_cos();
    Vec2::new(c * v.x - s * v.y, s * v.x + c * v.y)
}

/// A prograde conic in the reference plane.
///
/// `a` is positive for ellipses and negative for hyperbolas. `lon_peri` is the
/// inertial angle of the pericentre direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Orbit2D {
    pub a: f64,
    pub e: f64,
    pub lon_peri: f64,
    pub mu: f64,
}

impl Orbit2D {
    pub fn new(a: f64, e: f64, lon_peri: f64, mu: f64) -> Self {
        Self {
            a,
            e,
            lon_peri,
            mu,
        }
    }

    pub fn is_elliptic(&self) -> bool {
        self.e < 1.0 && self.a > 0.0
    }

    /// Semi-latus rectum.
    pub fn p(&self) -> f64 {
        self.a * (1.0 - self.e * self.e)
    }

    pub fn radius_at(&self, theta: f64) -> f64 {
        self.p() / (1.0 + self.e * theta.cos())
    }

    /// Mean motion in rad/s; only meaningful for ellipses.
    pub fn mean_motion(&self) -> f64 {
        (self.mu / (self.a * self.a * self.a)).sqrt()
    }

    pub fn period(&self) -> Result<f64, ConicError> {
        self.require_elliptic()?;
        Ok(TAU / self.mean_motion())
    }

    pub fn pericentre_radius(&self) -> f64 {
        self.a * (1.0 - self.e)
    }

    pub fn apocentre_radius(&self) -> Option<f64> {
        self.is_elliptic().then_some(self.a * (1.0 + self.e))
    }

    pub fn specific_energy(&self) -> f64 {
        -self.mu / (2.0 * self.a)
    }

    pub fn angular_momentum(&self) -> f64 {
        (self.mu * self.p()).sqrt()
    }

    pub(crate) fn require_elliptic(&self) -> Result<(), ConicError> {
        if self.is_elliptic() {
            Ok(())
        } else {
            Err(ConicError::NonElliptic(self.e))
        }
    }

    /// Mean anomaly in `[0, 2π)` corresponding to a true anomaly.
    pub fn mean_anomaly_from_true(&self, theta: f64) -> Result<f64, ConicError> {
        self.require_elliptic()?;
        let e = self.e;
        let (s, c) = theta.sin_cos();
        let ecc_anomaly = ((1.0 - e * e).sqrt() * s).atan2(e + c);
        Ok(wrap_two_pi(ecc_anomaly - e * ecc_anomaly.sin()))
    }
}

/// Position, velocity and epoch of a point in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct State2D {
    pub r: Vec2,
    pub v: Vec2,
    /// Epoch, days MJD2000.
    pub t: f64,
}

impl State2D {
    pub fn new(r: Vec2, v: Vec2, t: f64) -> Self {
        Self { r, v, t }
    }

    pub fn is_valid(&self) -> bool {
        self.r.norm() > 0.0 && self.r.iter().chain(self.v.iter()).all(|x| x.is_finite())
    }
}

/// One crossing point of two coplanar conics, as anomalies on each of them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntersectionPair {
    pub theta_sc: f64,
    pub theta_body: f64,
}

/// Converts a state to conic elements plus its true anomaly in `[0, 2π)`.
///
/// Hyperbolic and parabolic states are returned as-is; callers that need an
/// ellipse check [`Orbit2D::is_elliptic`].
pub fn orbit_from_state(state: &State2D, mu: f64) -> Result<(Orbit2D, f64), ConicError> {
    if !state.is_valid() {
        return Err(ConicError::InvalidState("zero radius or non-finite components"));
    }
    let r = state.r.norm();
    let v2 = state.v.norm_squared();
    let h = cross(&state.r, &state.v);
    // relative threshold keeps radial-rectilinear states out
    if h <= 1e-12 * r * v2.sqrt() {
        return Err(ConicError::RetrogradeOrbit(h));
    }
    let rv = state.r.dot(&state.v);
    let e_vec = (state.r * (v2 - mu / r) - state.v * rv) / mu;
    let e = e_vec.norm();
    let energy = 0.5 * v2 - mu / r;
    let a = -mu / (2.0 * energy);
    let lon_peri = if e > 0.0 {
        wrap_two_pi(e_vec.y.atan2(e_vec.x))
    } else {
        0.0
    };
    let theta = wrap_two_pi(state.r.y.atan2(state.r.x) - lon_peri);
    Ok((Orbit2D::new(a, e, lon_peri, mu), theta))
}

/// Evaluates the conic at a true anomaly.
pub fn state_at_anomaly(orbit: &Orbit2D, theta: f64, t: f64) -> Result<State2D, ConicError> {
    let (s, c) = theta.sin_cos();
    let denom = 1.0 + orbit.e * c;
    if denom <= 0.0 {
        return Err(ConicError::BeyondAsymptote(theta));
    }
    let p = orbit.p();
    let radius = p / denom;
    let u = theta + orbit.lon_peri;
    let (su, cu) = u.sin_cos();
    let radial = Vec2::new(cu, su);
    let transverse = Vec2::new(-su, cu);
    let k = (orbit.mu / p).sqrt();
    let v = radial * (k * orbit.e * s) + transverse * (k * denom);
    Ok(State2D::new(radial * radius, v, t))
}

/// Time in seconds to move forward from `theta_from` to `theta_to` plus
/// `n_rev` complete revolutions.
pub fn time_of_flight(
    orbit: &Orbit2D,
    theta_from: f64,
    theta_to: f64,
    n_rev: u32,
) -> Result<f64, ConicError> {
    let m_from = orbit.mean_anomaly_from_true(theta_from)?;
    let m_to = orbit.mean_anomaly_from_true(theta_to)?;
    let dm = wrap_two_pi(m_to - m_from);
    Ok((dm + TAU * f64::from(n_rev)) / orbit.mean_motion())
}

/// Intersections of two coplanar conics sharing a focus.
///
/// Equating radii at a common inertial angle φ gives
/// `A cos φ + B sin φ = C`, solved in closed form. Pairs are returned sorted
/// by `theta_sc`.
pub fn intersect_orbits(
    sc: &Orbit2D,
    body: &Orbit2D,
) -> Result<Vec<IntersectionPair>, ConicError> {
    let (p1, e1, w1) = (sc.p(), sc.e, sc.lon_peri);
    let (p2, e2, w2) = (body.p(), body.e, body.lon_peri);
    let scale = p1.abs().max(p2.abs());
    let a = (p1 * e2 * w2.cos() - p2 * e1 * w1.cos()) / scale;
    let b = (p1 * e2 * w2.sin() - p2 * e1 * w1.sin()) / scale;
    let c = (p2 - p1) / scale;
    if a.abs() < DEGENERACY_TOL && b.abs() < DEGENERACY_TOL && c.abs() < DEGENERACY_TOL {
        return Err(ConicError::DegenerateIntersection);
    }
    let amp = a.hypot(b);
    if amp < DEGENERACY_TOL {
        // concentric circles of different radius
        return Ok(Vec::new());
    }
    let ratio = c / amp;
    let phase = b.atan2(a);
    let mut angles = Vec::with_capacity(2);
    if (ratio.abs() - 1.0).abs() <= TANGENCY_TOL {
        angles.push(if ratio > 0.0 { phase } else { phase + PI });
    } else if ratio.abs() < 1.0 {
        let half = ratio.acos();
        angles.push(phase + half);
        angles.push(phase - half);
    }
    let mut pairs: Vec<IntersectionPair> = angles
        .into_iter()
        .filter_map(|phi| {
            let theta_sc = wrap_two_pi(phi - w1);
            let theta_body = wrap_two_pi(phi - w2);
            let valid = 1.0 + e1 * theta_sc.cos() > 0.0 && 1.0 + e2 * theta_body.cos() > 0.0;
            valid.then_some(IntersectionPair {
                theta_sc,
                theta_body,
            })
        })
        .collect();
    pairs.sort_by(|x, y| x.theta_sc.total_cmp(&y.theta_sc));
    Ok(pairs)
}
