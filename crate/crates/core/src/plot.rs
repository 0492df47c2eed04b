//! SVG rendering of one trajectory of a plan.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use crate::conic::{state_at_anomaly, Orbit2D, Vec2};
use crate::ephem::body_state_of;
use crate::legs::{trace_branch, LegError, LegSolution, Plan};
use crate::problem::Problem;

/// Largest true-anomaly step between polyline vertices.
pub const MAX_STEP: f64 = TAU / 360.0;
const SIZE: f64 = 800.0;
const MARGIN: f64 = 40.0;

const COLORS: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

/// Points along `orbit` from `from` sweeping `sweep` rad forward.
fn sample_arc(orbit: &Orbit2D, from: f64, sweep: f64) -> Vec<Vec2> {
    let n = ((sweep / MAX_STEP).ceil() as usize).max(1);
    (0..=n)
        .filter_map(|k| {
            let th = from + sweep * k as f64 / n as f64;
            state_at_anomaly(orbit, th, 0.0).ok().map(|s| s.r)
        })
        .collect()
}

/// Forward sweep from `a` to `b` plus whole revolutions.
fn sweep(a: f64, b: f64, n_rev: u32) -> f64 {
    let d = (b - a).rem_euclid(TAU);
    let d = if d == 0.0 && n_rev == 0 { TAU } else { d };
    d + TAU * n_rev as f64
}

struct Canvas {
    scale: f64,
    body: String,
}

impl Canvas {
    fn new(extent: f64) -> Self {
        Self {
            scale: (SIZE / 2.0 - MARGIN) / extent,
            body: String::new(),
        }
    }

    fn xy(&self, p: &Vec2) -> (f64, f64) {
        (SIZE / 2.0 + p.x * self.scale, SIZE / 2.0 - p.y * self.scale)
    }

    fn path(&self, pts: &[Vec2], closed: bool) -> String {
        let mut d = String::new();
        for (i, p) in pts.iter().enumerate() {
            let (x, y) = self.xy(p);
            let _ = write!(d, "{}{:.2},{:.2} ", if i == 0 { "M" } else { "L" }, x, y);
        }
        if closed {
            d.push('Z');
        }
        d.trim_end().to_string()
    }

    fn polyline(&mut self, class: &str, color: &str, pts: &[Vec2], closed: bool) {
        let d = self.path(pts, closed);
        let _ = writeln!(
            self.body,
            r#"  <path class="{class}" d="{d}" fill="none" stroke="{color}" stroke-width="1.2"/>"#
        );
    }

    fn marker(&mut self, kind: &str, p: &Vec2, label: &str) {
        let (x, y) = self.xy(p);
        let (tag, geometry) = match kind {
            "launch" => ("rect", format!(r#"x="{:.2}" y="{:.2}" width="8" height="8""#, x - 4.0, y - 4.0)),
            "dsm" => (
                "polygon",
                format!(
                    r#"points="{:.2},{:.2} {:.2},{:.2} {:.2},{:.2}""#,
                    x,
                    y - 5.0,
                    x - 5.0,
                    y + 4.0,
                    x + 5.0,
                    y + 4.0
                ),
            ),
            "arrival" => (
                "polygon",
                format!(
                    r#"points="{:.2},{:.2} {:.2},{:.2} {:.2},{:.2} {:.2},{:.2}""#,
                    x,
                    y - 6.0,
                    x + 6.0,
                    y,
                    x,
                    y + 6.0,
                    x - 6.0,
                    y
                ),
            ),
            _ => ("circle", format!(r#"cx="{x:.2}" cy="{y:.2}" r="4""#)),
        };
        let _ = writeln!(
            self.body,
            r#"  <{tag} class="event {kind}" {geometry} fill="black"><title>{label}</title></{tag}>"#
        );
    }
}

/// Renders branch `path_id` of `plan` as a standalone SVG document.
pub fn render_svg(problem: &Problem, plan: &Plan, path_id: &[usize]) -> Result<String, LegError> {
    let legs = trace_branch(problem, plan, path_id)?;
    Ok(render_legs(problem, plan, &legs))
}

pub fn render_legs(problem: &Problem, plan: &Plan, legs: &[LegSolution]) -> String {
    let cat = &problem.catalog;
    let mut bodies = vec![problem.departure];
    for &t in &plan.targets {
        if !bodies.contains(&t) {
            bodies.push(t);
        }
    }

    let mut arcs: Vec<Vec<Vec2>> = Vec::new();
    for (leg, params) in legs.iter().zip(&plan.params) {
        let f = &leg.first;
        let n1 = if f.dv > 0.0 { params.n_rev1 } else { 0 };
        arcs.push(sample_arc(&f.orbit, f.theta_start, sweep(f.theta_start, f.theta_end, n1)));
        let n2 = params.n_rev2;
        let s = &leg.second;
        arcs.push(sample_arc(&f.orbit_after, f.theta_m, sweep(f.theta_m, s.theta_int, n2)));
    }

    let orbits: Vec<Vec<Vec2>> = bodies
        .iter()
        .map(|&b| {
            let mut pts = sample_arc(&cat.bodies[b].elements, 0.0, TAU);
            pts.pop();
            pts
        })
        .collect();
    let extent = orbits
        .iter()
        .chain(&arcs)
        .flatten()
        .map(|p| p.norm())
        .fold(1.0, f64::max);

    let mut c = Canvas::new(extent);
    let _ = writeln!(
        c.body,
        r##"  <circle class="central" cx="{0}" cy="{0}" r="5" fill="#f2b01e"/>"##,
        SIZE / 2.0
    );
    for (i, (&b, pts)) in bodies.iter().zip(&orbits).enumerate() {
        c.polyline("orbit", COLORS[i % COLORS.len()], pts, true);
        let _ = writeln!(c.body, "  <!-- orbit of {} -->", cat.bodies[b].name);
    }
    for pts in &arcs {
        c.polyline("trajectory", "black", pts, false);
    }

    if let Some(first) = legs.first() {
        c.marker("launch", &first.departure.r, &format!("launch t = {:.3}", first.departure.t));
    }
    for (i, leg) in legs.iter().enumerate() {
        if leg.first.dv > 0.0 {
            c.marker("dsm", &leg.first.state_m.r, &format!("DSM {:.4} km/s", leg.first.dv));
        }
        let name = &cat.bodies[plan.targets[i]].name;
        let kind = if i + 1 == legs.len() { "arrival" } else { "swingby" };
        let pos = body_state_of(cat, &cat.bodies[plan.targets[i]], leg.second.t_int)
            .map(|s| s.r)
            .unwrap_or(leg.second.state.r);
        c.marker(kind, &pos, &format!("{name} t = {:.3}", leg.second.t_int));
    }

    let title = problem.sequence_label(&plan.targets);
    format!(
        concat!(
            r#"<?xml version="1.0" encoding="UTF-8"?>"#,
            "\n",
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{0}" height="{0}" viewBox="0 0 {0} {0}">"#,
            "\n  <title>{1}</title>\n",
            r#"  <rect width="100%" height="100%" fill="white"/>"#,
            "\n{2}</svg>\n"
        ),
        SIZE, title, c.body
    )
}
