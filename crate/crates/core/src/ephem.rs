//! Body catalogs and a planar Keplerian ephemeris.

use std::f64::consts::{PI, TAU};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::conic::{state_at_anomaly, wrap_two_pi, ConicError, Orbit2D, State2D, SECONDS_PER_DAY};

pub const KEPLER_TOL: f64 = 1e-13;
pub const KEPLER_MAX_ITER: usize = 50;

#[derive(Debug, Error)]
pub enum EphemError {
    #[error("unknown body `{0}`")]
    UnknownBody(String),
    #[error("kepler solver did not converge (M = {mean_anomaly}, e = {e})")]
    KeplerNonConvergence { mean_anomaly: f64, e: f64 },
    #[error("eccentricity {0} outside [0, 1)")]
    BadEccentricity(f64),
    #[error("invalid catalog: {0}")]
    InvalidCatalog(String),
    #[error(transparent)]
    Conic(#[from] ConicError),
    #[error("reading catalog {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("parsing catalog {path}: {source}")]
    Parse {
        path: String,
        source: serde_json::Error,
    },
}

/// A planet or moon: physical constants plus its orbit about the central body.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Body {
    pub name: String,
    /// km³/s²
    pub mu_body: f64,
    /// Mean radius, km.
    pub radius: f64,
    pub rp_min_factor: f64,
    pub rp_max_factor: f64,
    pub elements: Orbit2D,
    /// Mean anomaly at the catalog epoch, rad.
    pub mean_anomaly_epoch: f64,
}

impl Body {
    /// Allowed swing-by pericentre range in km.
    pub fn pericentre_bounds(&self) -> (f64, f64) {
        (
            self.rp_min_factor * self.radius,
            self.rp_max_factor * self.radius,
        )
    }

    pub fn period_days(&self) -> f64 {
        TAU / self.elements.mean_motion() / SECONDS_PER_DAY
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BodyCatalog {
    pub central_mu: f64,
    /// Epoch of all element sets, days MJD2000.
    pub t_ref: f64,
    pub bodies: Vec<Body>,
}

impl BodyCatalog {
    pub fn from_json_str(text: &str) -> Result<Self, EphemError> {
        let catalog: BodyCatalog = serde_json::from_str(text).map_err(|source| EphemError::Parse {
            path: "<string>".into(),
            source,
        })?;
        catalog.validate()?;
        Ok(catalog)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, EphemError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| EphemError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let catalog: BodyCatalog =
            serde_json::from_str(&text).map_err(|source| EphemError::Parse {
                path: path.display().to_string(),
                source,
            })?;
        catalog.validate()?;
        Ok(catalog)
    }

    pub fn validate(&self) -> Result<(), EphemError> {
        let bad = |msg: String| Err(EphemError::InvalidCatalog(msg));
        if !(self.central_mu > 0.0) {
            return bad("central_mu must be positive".into());
        }
        for (i, b) in self.bodies.iter().enumerate() {
            if self.bodies[..i].iter().any(|o| o.name == b.name) {
                return bad(format!("duplicate body `{}`", b.name));
            }
            if !(b.mu_body > 0.0 && b.radius > 0.0) {
                return bad(format!("{}: mu_body and radius must be positive", b.name));
            }
            if !(b.rp_min_factor >= 1.0 && b.rp_min_factor < b.rp_max_factor) {
                return bad(format!("{}: need 1 <= rp_min_factor < rp_max_factor", b.name));
            }
            let el = &b.elements;
            if !(0.0..1.0).contains(&el.e) || !(el.a > 0.0) {
                return bad(format!("{}: elements must describe an ellipse", b.name));
            }
            if (el.mu - self.central_mu).abs() > 1e-9 * self.central_mu {
                return bad(format!("{}: elements.mu differs from central_mu", b.name));
            }
        }
        Ok(())
    }

    pub fn body(&self, name: &str) -> Result<&Body, EphemError> {
        self.bodies
            .iter()
            .find(|b| b.name == name)
            .ok_or_else(|| EphemError::UnknownBody(name.to_string()))
    }

    pub fn index_of(&self, name: &str) -> Result<usize, EphemError> {
        self.bodies
            .iter()
            .position(|b| b.name == name)
            .ok_or_else(|| EphemError::UnknownBody(name.to_string()))
    }
}

/// Solves Kepler's equation `E - e sin E = M` for the eccentric anomaly.
///
/// Newton iteration from `M + e sin M`, falling back to bisection whenever a
/// step leaves the bracket `[M - e, M + e]`.
pub fn solve_kepler(mean_anomaly: f64, e: f64) -> Result<f64, EphemError> {
    if !(0.0..1.0).contains(&e) {
        return Err(EphemError::BadEccentricity(e));
    }
    if !mean_anomaly.is_finite() {
        return Err(EphemError::KeplerNonConvergence { mean_anomaly, e });
    }
    if e == 0.0 {
        return Ok(mean_anomaly);
    }
    let turns = (mean_anomaly / TAU).round();
    let m = mean_anomaly - turns * TAU;
    let f = |x: f64| x - e * x.sin() - m;

    let (mut lo, mut hi) = (m - e, m + e);
    let mut x = (m + e * m.sin()).clamp(lo, hi);
    for _ in 0..KEPLER_MAX_ITER {
        let fx = f(x);
        if fx.abs() <= KEPLER_TOL {
            return Ok(x + turns * TAU);
        }
        if fx > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let step = fx / (1.0 - e * x.cos());
        let next = x - step;
        x = if next > lo && next < hi {
            next
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= f64::EPSILON * m.abs().max(1.0) {
            return Ok(x + turns * TAU);
        }
    }
    if f(x).abs() <= 10.0 * KEPLER_TOL {
        return Ok(x + turns * TAU);
    }
    Err(EphemError::KeplerNonConvergence { mean_anomaly, e })
}

/// True anomaly in `[0, 2π)` from the eccentric anomaly.
pub fn true_from_eccentric(ecc_anomaly: f64, e: f64) -> f64 {
    let (s, c) = ecc_anomaly.sin_cos();
    wrap_two_pi(((1.0 - e * e).sqrt() * s).atan2(c - e))
}

/// True anomaly of a body at epoch `t` (days MJD2000).
pub fn body_true_anomaly(catalog: &BodyCatalog, body: &Body, t: f64) -> Result<f64, EphemError> {
    let el = &body.elements;
    let m = body.mean_anomaly_epoch + el.mean_motion() * (t - catalog.t_ref) * SECONDS_PER_DAY;
    let m = m.rem_euclid(TAU);
    let ecc = solve_kepler(if m > PI { m - TAU } else { m }, el.e)?;
    Ok(true_from_eccentric(ecc, el.e))
}

/// Heliocentric (or planet-centric) state of a body at epoch `t`.
pub fn body_state(catalog: &BodyCatalog, body: &str, t: f64) -> Result<State2D, EphemError> {
    let b = catalog.body(body)?;
    body_state_of(catalog, b, t)
}

pub fn body_state_of(catalog: &BodyCatalog, body: &Body, t: f64) -> Result<State2D, EphemError> {
    let theta = body_true_anomaly(catalog, body, t)?;
    Ok(state_at_anomaly(&body.elements, theta, t)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conic::{cross, orbit_from_state};
    use approx::assert_relative_eq;

    fn catalog() -> BodyCatalog {
        BodyCatalog::load(concat!(env!("CARGO_MANIFEST_DIR"), "/data/planets.json")).unwrap()
    }

    fn bisect_kepler(m: f64, e: f64) -> f64 {
        let (mut lo, mut hi) = (0.0, TAU);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid - e * mid.sin() - m > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn kepler_circular_and_apoapsis() {
        assert_eq!(solve_kepler(0.7, 0.0).unwrap(), 0.7);
        assert!((solve_kepler(PI, 0.5).unwrap() - PI).abs() < 1e-14);
    }

    #[test]
    fn kepler_matches_bisection_oracle() {
        let e = solve_kepler(1.0, 0.3).unwrap();
        let oracle = bisect_kepler(1.0, 0.3);
        assert!((e - oracle).abs() < 1e-12);
        assert!((e - 0.3 * e.sin() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn kepler_high_eccentricity_sweep() {
        for &e in &[0.0, 0.1, 0.5, 0.9, 0.99, 0.999_999] {
            for k in 0..200 {
                let m = -10.0 + 0.1 * k as f64;
                let ecc = solve_kepler(m, e).unwrap();
                assert!((ecc - e * ecc.sin() - m).abs() < 1e-12, "M={m} e={e}");
                assert!((ecc - m).abs() <= e + 1e-12);
            }
        }
    }

    #[test]
    fn kepler_rejects_bad_eccentricity() {
        assert!(matches!(
            solve_kepler(1.0, 1.0),
            Err(EphemError::BadEccentricity(_))
        ));
    }

    #[test]
    fn circular_body_at_epoch() {
        let mut cat = catalog();
        let body = &mut cat.bodies[2];
        body.elements.e = 0.0;
        body.mean_anomaly_epoch = 0.3;
        body.elements.lon_peri = 1.1;
        let a = body.elements.a;
        let s = body_state(&cat, "Earth", cat.t_ref).unwrap();
        assert_relative_eq!(s.r.norm(), a, max_relative = 1e-14);
        assert_relative_eq!(s.r.y.atan2(s.r.x), 1.4, epsilon = 1e-12);
    }

    #[test]
    fn quarter_period_advances_longitude_by_right_angle() {
        let mut cat = catalog();
        let body = &mut cat.bodies[2];
        body.elements.e = 0.0;
        body.elements.a = 1.495_978_707e8;
        let period = body.period_days();
        assert!((period - 365.25).abs() < 0.1);
        let s0 = body_state(&cat, "Earth", 0.0).unwrap();
        let s1 = body_state(&cat, "Earth", 91.31).unwrap();
        let dl = crate::conic::wrap_pi(s1.r.y.atan2(s1.r.x) - s0.r.y.atan2(s0.r.x));
        assert!((dl - PI / 2.0).abs() < 2e-3, "{dl}");
    }

    #[test]
    fn unknown_body_is_an_error() {
        assert!(matches!(
            body_state(&catalog(), "Vulcan", 0.0),
            Err(EphemError::UnknownBody(_))
        ));
    }

    #[test]
    fn states_lie_on_their_orbits_and_are_periodic() {
        let cat = catalog();
        for b in &cat.bodies {
            for k in 0..20 {
                let t = -3000.0 + 431.7 * k as f64;
                let s = body_state_of(&cat, b, t).unwrap();
                let (o, _) = orbit_from_state(&s, cat.central_mu).unwrap();
                assert_relative_eq!(o.specific_energy(), b.elements.specific_energy(), max_relative = 1e-10);
                assert_relative_eq!(cross(&s.r, &s.v), b.elements.angular_momentum(), max_relative = 1e-10);
                assert!(cross(&s.r, &s.v) > 0.0);

                let later = body_state_of(&cat, b, t + b.period_days()).unwrap();
                assert!((later.r - s.r).norm() / s.r.norm() < 1e-9);
            }
        }
    }

    #[test]
    fn catalog_validation_catches_duplicates() {
        let mut cat = catalog();
        cat.bodies.push(cat.bodies[0].clone());
        assert!(cat.validate().is_err());
    }
}
