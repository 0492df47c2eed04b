//! Oracles and fixtures shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;
use std::path::PathBuf;

use mga_core::config::LoadedConfig;
use mga_core::ephem::BodyCatalog;
use mga_core::legs::{delta_theta, PhasingContext};
use mga_core::problem::{Problem, ProblemSpec};
use ode_solvers::{Dopri5, OutputType, System, Vector4};

pub fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn config_path(name: &str) -> PathBuf {
    manifest_dir().join("configs").join(name)
}

pub fn load_config(name: &str) -> LoadedConfig {
    LoadedConfig::load(config_path(name)).expect("shipped config loads")
}

pub fn planets() -> BodyCatalog {
    BodyCatalog::load(manifest_dir().join("data/planets.json")).unwrap()
}

pub fn moons() -> BodyCatalog {
    BodyCatalog::load(manifest_dir().join("data/jovian_moons.json")).unwrap()
}

/// Two-leg Earth departure with 120 canonical solutions, 17 of them feasible.
pub fn toy_spec_json() -> serde_json::Value {
    serde_json::json!({
        "departure": "Earth",
        "t0": 1000.0,
        "phi0": PI,
        "v0_bounds": [1.0, 5.0],
        "legs": [
            { "targets": ["Venus", "Earth", "Mars"], "m_dsm": [0.0], "n_rev1": [], "n_rev2": [0], "f_pa": [], "f_12": [0, 1] },
            { "targets": ["Venus"], "m_dsm": [-0.2, 0.0, 0.2], "n_rev1": [0], "n_rev2": [0, 1], "f_pa": [0, 1], "f_12": [0, 1] }
        ],
        "tof_total_max": 2000.0,
        "objective": { "kind": "v_inf" }
    })
}

pub fn problem_from_json(spec: serde_json::Value, catalog: BodyCatalog) -> Problem {
    let spec: ProblemSpec = serde_json::from_value(spec).unwrap();
    Problem::new(spec, catalog).unwrap()
}

pub fn toy_problem() -> Problem {
    problem_from_json(toy_spec_json(), planets())
}

/// Planar two-body motion in units of the pericentre radius and the circular
/// speed there (μ = 1).
struct Kepler {
    r_stop: f64,
}

impl System<f64, Vector4<f64>> for Kepler {
    fn system(&self, _t: f64, y: &Vector4<f64>, dy: &mut Vector4<f64>) {
        let r3 = (y[0] * y[0] + y[1] * y[1]).powf(1.5);
        dy[0] = y[2];
        dy[1] = y[3];
        dy[2] = -y[0] / r3;
        dy[3] = -y[1] / r3;
    }

    fn solout(&mut self, _t: f64, y: &Vector4<f64>, _dy: &Vector4<f64>) -> bool {
        (y[0] * y[0] + y[1] * y[1]).sqrt() >= self.r_stop
    }
}

/// Integrates from pericentre outward until |r| ≥ `r_stop`; returns the
/// radius reached and the angle the velocity has turned.
fn outbound_turn(w: f64, r_stop: f64) -> (f64, f64) {
    let vp = (w * w + 2.0).sqrt();
    let y0 = Vector4::new(1.0, 0.0, 0.0, vp);
    let t_end = 10.0 * r_stop / w + 100.0;
    let mut solver = Dopri5::new(Kepler { r_stop }, 0.0, t_end, 0.0, y0, 1e-13, 1e-13);
    solver.set_output(OutputType::Sparse);
    solver.integrate().expect("integration succeeds");
    let y = solver.y_out().last().unwrap();
    let r = (y[0] * y[0] + y[1] * y[1]).sqrt();
    // velocity starts along +y and rotates counter-clockwise
    (r, (-y[2]).atan2(y[3]))
}

/// Unsigned deflection of a hyperbolic flyby found by numerical propagation.
///
/// The flyby is symmetric about pericentre, so the total rotation is twice
/// the outbound one. The residual angle at finite radius falls off as 1/r and
/// is removed by extrapolating from two radii.
pub fn propagated_deflection(v_inf: f64, rp: f64, mu: f64) -> f64 {
    let w = v_inf / (mu / rp).sqrt();
    let r1 = 1e5 * (1.0 + 1.0 / (w * w));
    let (ra, pa) = outbound_turn(w, r1);
    let (rb, pb) = outbound_turn(w, 2.0 * r1);
    2.0 * (rb * pb - ra * pa) / (rb - ra)
}

/// Roots of Δθ from a dense scan refined by plain bisection.
pub fn scan_roots(ctx: &PhasingContext, n: usize) -> Vec<f64> {
    let mut out = Vec::new();
    for &(lo, hi) in &ctx.bands {
        let xs: Vec<f64> = (0..n)
            .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
            .collect();
        let fs: Vec<Option<f64>> = xs.iter().map(|&x| delta_theta(x, ctx).ok()).collect();
        for k in 0..n - 1 {
            let (Some(a), Some(b)) = (fs[k], fs[k + 1]) else {
                continue;
            };
            if a == 0.0 {
                out.push(xs[k]);
                continue;
            }
            if a.signum() == b.signum() || (b - a).abs() >= PI {
                continue;
            }
            let (mut l, mut h, mut fl) = (xs[k], xs[k + 1], a);
            for _ in 0..200 {
                let m = 0.5 * (l + h);
                if m <= l || m >= h {
                    break;
                }
                match delta_theta(m, ctx) {
                    Ok(fm) if fm.signum() == fl.signum() => {
                        l = m;
                        fl = fm;
                    }
                    Ok(_) => h = m,
                    Err(_) => break,
                }
            }
            out.push(0.5 * (l + h));
        }
    }
    out
}

/// True when both root lists pair up one-to-one within `rel`.
pub fn roots_match(found: &[f64], oracle: &[f64], rel: f64) -> bool {
    found.len() == oracle.len()
        && found
            .iter()
            .zip(oracle)
            .all(|(a, b)| (a - b).abs() <= rel * b.abs().max(1e-12))
}

/// Upper-tail p-value of Pearson's statistic against `expected` probabilities.
/// Cells with zero expected probability must have zero counts.
pub fn chi_square_p(counts: &[usize], expected: &[f64]) -> f64 {
    use statrs::distribution::{ChiSquared, ContinuousCDF};
    let n: usize = counts.iter().sum();
    let mut stat = 0.0;
    let mut cells = 0;
    for (&c, &p) in counts.iter().zip(expected) {
        if p == 0.0 {
            assert_eq!(c, 0, "observed an outcome with zero probability");
            continue;
        }
        let e = p * n as f64;
        stat += (c as f64 - e).powi(2) / e;
        cells += 1;
    }
    if cells < 2 {
        return 1.0;
    }
    1.0 - ChiSquared::new((cells - 1) as f64).unwrap().cdf(stat)
}

pub mod uniform;
