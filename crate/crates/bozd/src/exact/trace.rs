//! Trajectories of the quadratic differential `h′(z)² dz²`.
//!
//! Level curves of `Re(−ih) = Im h` solve `dz/ds = ±conj(h′)/|h′|`, and the
//! orthogonal trajectories (steepest descent/ascent of `Im h`) solve
//! `dz/ds = ∓i·conj(h′)/|h′|`; both are unit-speed, so `s` is arc length.
//! They are integrated with an adaptive Dormand–Prince 5(4) pair; after each
//! accepted step the point is projected back onto the conserved quantity
//! (`Im h` on a level curve, `Re h` on a descent path), with `h` carried by
//! exact continuation along the step.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{LaxOleinikPoint, RationalInitialData, C64};

/// Stopping parameters of a trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceOptions {
    /// Local error tolerance relative to the data scale.
    pub tol: f64,
    /// Arc-length budget as a multiple of the escape radius.
    pub budget_factor: f64,
    /// Distance (relative to the data scale) at which an equilibrium counts
    /// as reached.
    pub equilibrium_radius: f64,
    /// For descent traces: stop once `Im h` has dropped by this much below
    /// the saddle level (`None`: run to a pole or to the escape radius).
    pub level_drop: Option<f64>,
}

impl Default for TraceOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            budget_factor: 50.0,
            equilibrium_radius: 1e-4,
            level_drop: None,
        }
    }
}

/// Why a trace ended.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TraceStop {
    /// Reached the neighbourhood of a pole or critical point.
    Equilibrium(C64),
    /// Left the disc of radius `R_escape`.
    Escape,
    /// The prescribed level drop was reached.
    LevelDrop,
}

/// A traced trajectory with continued values of `h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub nodes: Vec<C64>,
    pub h_values: Vec<C64>,
    pub stop: TraceStop,
}

impl Trace {
    /// Total change of `arg(z − p)` along the trace, in turns.
    pub fn winding_about(&self, p: C64) -> f64 {
        self.nodes
            .windows(2)
            .map(|w| ((w[1] - p) / (w[0] - p)).arg())
            .sum::<f64>()
            / (2.0 * std::f64::consts::PI)
    }
}

/// `R_escape = 10·(1 + max|p_n| + |x| + t·sup|u0|)`.
pub fn escape_radius(data: &RationalInitialData, pt: LaxOleinikPoint) -> f64 {
    let pmax = data.poles().iter().map(|p| p.norm()).fold(0.0, f64::max);
    10.0 * (1.0 + pmax + pt.x.abs() + pt.t * data.sup_abs_u0())
}

#[derive(Clone, Copy)]
enum Conserved {
    Im,
    Re,
}

const A21: f64 = 1.0 / 5.0;
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0];
const A6: [f64; 5] = [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0];
const B5: [f64; 6] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// One Dormand–Prince step; returns the 5th-order point and the error norm.
fn dp_step<F: Fn(C64) -> C64>(f: &F, z: C64, h: f64) -> (C64, f64) {
    let k1 = f(z);
    let k2 = f(z + k1 * (h * A21));
    let k3 = f(z + (k1 * A3[0] + k2 * A3[1]) * h);
    let k4 = f(z + (k1 * A4[0] + k2 * A4[1] + k3 * A4[2]) * h);
    let k5 = f(z + (k1 * A5[0] + k2 * A5[1] + k3 * A5[2] + k4 * A5[3]) * h);
    let k6 = f(z + (k1 * A6[0] + k2 * A6[1] + k3 * A6[2] + k4 * A6[3] + k5 * A6[4]) * h);
    let z5 = z + (k1 * B5[0] + k3 * B5[2] + k4 * B5[3] + k5 * B5[4] + k6 * B5[5]) * h;
    let k7 = f(z5);
    let z4 = z + (k1 * B4[0] + k3 * B4[2] + k4 * B4[3] + k5 * B4[4] + k6 * B4[5] + k7 * B4[6]) * h;
    (z5, (z5 - z4).norm())
}

struct Tracer<'a> {
    data: &'a RationalInitialData,
    pt: LaxOleinikPoint,
    equilibria: Vec<C64>,
    r_escape: f64,
    opts: &'a TraceOptions,
}

impl Tracer<'_> {
    fn nearest_equilibrium(&self, z: C64, skip: Option<C64>) -> (f64, C64) {
        self.equilibria
            .iter()
            .filter(|e| skip.is_none_or(|s| (**e - s).norm() > 1e-12))
            .map(|e| ((z - e).norm(), *e))
            .fold((f64::INFINITY, C64::new(0.0, 0.0)), |a, b| if b.0 < a.0 { b } else { a })
    }

    fn run(
        &self,
        start: C64,
        h_start: C64,
        rot: C64,
        conserved: Conserved,
        skip: Option<C64>,
        level_floor: Option<f64>,
    ) -> Result<Trace> {
        let data = self.data;
        let pt = self.pt;
        let field = |z: C64| {
            let g = data.h_prime_unchecked(pt, z).conj();
            let n = g.norm();
            if n == 0.0 {
                C64::new(0.0, 0.0)
            } else {
                rot * g / n
            }
        };
        let scale = data.scale();
        let target = match conserved {
            Conserved::Im => h_start.im,
            Conserved::Re => h_start.re,
        };
        let tol = self.opts.tol * scale;
        let eq_r = self.opts.equilibrium_radius * scale;
        let budget = self.opts.budget_factor * self.r_escape;
        let mut nodes = vec![start];
        let mut hv = vec![h_start];
        let mut z = start;
        let mut h = h_start;
        let mut step = 1e-3 * scale;
        let mut arc = 0.0;
        loop {
            let (d, e) = self.nearest_equilibrium(z, skip);
            if d < eq_r {
                return Ok(Trace { nodes, h_values: hv, stop: TraceStop::Equilibrium(e) });
            }
            if z.norm() > self.r_escape {
                return Ok(Trace { nodes, h_values: hv, stop: TraceStop::Escape });
            }
            if let Some(floor) = level_floor {
                if h.im < floor {
                    return Ok(Trace { nodes, h_values: hv, stop: TraceStop::LevelDrop });
                }
            }
            if arc > budget {
                return Err(Error::BudgetExceeded(format!(
                    "arc length {arc:.3} from {:.6}{:+.6}i without reaching an equilibrium or the escape radius",
                    start.re, start.im
                )));
            }
            let cap = (0.5 * d).max(0.5 * eq_r).min(0.05 * self.r_escape);
            step = step.min(cap);
            let (znew, err) = dp_step(&field, z, step);
            if err > tol && step > 1e-14 * scale {
                step *= (0.9 * (tol / err).powf(0.2)).max(0.1);
                continue;
            }
            // Project back onto the conserved quantity.
            let mut zn = znew;
            let mut hn = h + data.h_increment(pt, z, zn);
            for _ in 0..3 {
                let hp = data.h_prime_unchecked(pt, zn);
                let n2 = hp.norm_sqr();
                if n2 == 0.0 {
                    break;
                }
                let dz = match conserved {
                    Conserved::Im => C64::new(0.0, target - hn.im) * hp.conj() / n2,
                    Conserved::Re => C64::new(target - hn.re, 0.0) * hp.conj() / n2,
                };
                if dz.norm() < 1e-15 * scale {
                    break;
                }
                let z2 = zn + dz;
                hn += data.h_increment(pt, zn, z2);
                zn = z2;
            }
            arc += (zn - z).norm();
            z = zn;
            h = hn;
            nodes.push(z);
            hv.push(h);
            step *= if err == 0.0 { 5.0 } else { (0.9 * (tol / err).powf(0.2)).clamp(0.2, 5.0) };
        }
    }
}

fn tracer<'a>(data: &'a RationalInitialData, pt: LaxOleinikPoint, opts: &'a TraceOptions) -> Result<Tracer<'a>> {
    let mut equilibria: Vec<C64> = data.all_terms().map(|(p, _)| p).collect();
    equilibria.extend(crate::branches::characteristic_roots(data, pt, None)?);
    Ok(Tracer { data, pt, equilibria, r_escape: escape_radius(data, pt), opts })
}

/// Traces the level curve of `Re(−ih)` through `start` in the direction
/// `direction·conj(h′)` (`direction = ±1`).
pub fn trace_level_curve(
    data: &RationalInitialData,
    pt: LaxOleinikPoint,
    start: C64,
    direction: i8,
    opts: &TraceOptions,
) -> Result<Trace> {
    if direction != 1 && direction != -1 {
        return Err(Error::InvalidConfig(format!("direction must be +1 or -1, got {direction}")));
    }
    let tr = tracer(data, pt, opts)?;
    let (d, _) = tr.nearest_equilibrium(start, None);
    if d < opts.equilibrium_radius * data.scale() {
        return Err(Error::InvalidConfig("trace start is an equilibrium".into()));
    }
    let rot = C64::new(direction as f64, 0.0);
    tr.run(start, data.h_principal(pt, start), rot, Conserved::Im, None, None)
}

/// Traces one of the four steepest-descent/ascent arcs of `Re(−ih)` leaving
/// the simple critical point `saddle`.
///
/// Branches 0 and 1 descend (initial angles `−π/4 − arg(h″)/2` and that
/// plus `π`), branches 2 and 3 ascend (`π/4 − arg(h″)/2`, plus `π`).
pub fn trace_steepest_descent(
    data: &RationalInitialData,
    pt: LaxOleinikPoint,
    saddle: C64,
    branch: u8,
    opts: &TraceOptions,
) -> Result<Trace> {
    if branch > 3 {
        return Err(Error::InvalidConfig(format!("branch must be 0..=3, got {branch}")));
    }
    let h2 = data.h_second(pt, saddle);
    if h2.norm() < 1e-8 * data.scale() {
        return Err(Error::DegenerateSaddle(h2.norm()));
    }
    let tr = tracer(data, pt, opts)?;
    let descend = branch < 2;
    let base = if descend { -std::f64::consts::FRAC_PI_4 } else { std::f64::consts::FRAC_PI_4 } - 0.5 * h2.arg();
    let ang = base + if branch % 2 == 1 { std::f64::consts::PI } else { 0.0 };
    // Leave the saddle along the eigen-direction, far enough that the
    // quadratic model has a well-defined gradient but well inside its range.
    let r0 = (1e-3 * data.scale()).min(0.01 / h2.norm().sqrt());
    let start = saddle + C64::from_polar(r0, ang);
    let h_s = data.h_principal(pt, saddle);
    let h0 = h_s + data.h_increment(pt, saddle, start);
    let rot = C64::new(0.0, if descend { -1.0 } else { 1.0 });
    let floor = if descend { opts.level_drop.map(|d| h_s.im - d) } else { None };
    let mut t = tr.run(start, h0, rot, Conserved::Re, Some(saddle), floor)?;
    t.nodes.insert(0, saddle);
    t.h_values.insert(0, h_s);
    Ok(t)
}
