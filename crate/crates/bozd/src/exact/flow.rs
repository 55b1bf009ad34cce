//! Construction of steepest-descent contours by a discrete descent flow.
//!
//! Every node of a polyline moves along `−conj(F′)` with `F = −ih`, i.e.
//! downhill for `H = Re F = Im h`, with a step limited both by the local
//! quadratic model (`0.5/|h″|`) and by the distance to the nearest pole.
//! A node is frozen when its weighted level is more than `40 ε_ref` below
//! the current contour maximum (its contribution is below `e^{−40}`) or when
//! it sits within `r_min` of a pole.  Before a step is accepted, every
//! segment's swept area is checked to contain no pole, so the deformed
//! contour stays homotopic to the initial one and the integrals are
//! unchanged.  Segments are split when they are long compared with the
//! distance to the poles or when their midpoint lies above both endpoints
//! (a ridge crossing), and runs of negligible nodes are pruned.
//!
//! The flow stops when the contour maximum has stalled and the dominance
//! check passes.  The geometry depends on `ε` only through `ε_ref`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{ManualPath, SolverConfig};
use crate::branches;
use crate::error::{Error, Result};
use crate::rational::{LaxOleinikPoint, RationalInitialData, C64};

/// Which row of the determinant a contour produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ContourRole {
    /// The deformed real line.
    W0,
    /// Loop around the pole `p_n` (`n` is 1-based).
    Wn(usize),
}

impl std::fmt::Display for ContourRole {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ContourRole::W0 => write!(f, "W0"),
            ContourRole::Wn(n) => write!(f, "W{n}"),
        }
    }
}

/// A contour with analytically continued values of `h` at its nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContourPath {
    pub role: ContourRole,
    pub nodes: Vec<C64>,
    /// `h(node_{k+1}) = h(node_k) + ∫ h′` along the segment.
    pub h_values: Vec<C64>,
    /// For a loop: index of the node `q_n` where the leg ends and the closed
    /// loop begins.  The last node coincides with it.
    pub loop_start: Option<usize>,
    /// Increase of `Im h` on the return sheet of the leg
    /// (`max(0, 2π Re c_n)`); zero for `W_0`.
    pub leg_shift: f64,
    /// Critical points near which the contour attains its maximum level.
    pub dominant_saddles: Vec<C64>,
}

impl ContourPath {
    /// Whether segment `k` (from node `k` to `k+1`) belongs to the leg.
    pub fn segment_is_leg(&self, k: usize) -> bool {
        self.loop_start.is_some_and(|ls| k < ls)
    }

    fn node_is_leg(&self, i: usize) -> bool {
        self.loop_start.is_some_and(|ls| i <= ls)
    }

    /// Effective level `Im h` (plus the return-sheet shift on the leg).
    pub fn level(&self, i: usize) -> f64 {
        self.h_values[i].im + if self.node_is_leg(i) { self.leg_shift } else { 0.0 }
    }

    /// `h` at a point `z` of segment `k`, continued from node `k`.
    pub fn h_on_segment(&self, data: &RationalInitialData, pt: LaxOleinikPoint, k: usize, z: C64) -> C64 {
        self.h_values[k] + data.h_increment(pt, self.nodes[k], z)
    }

    /// Rows of `(re, im, Re(−ih), Im(−ih))` for diagnostic dumps.
    pub fn dump(&self) -> Vec<[f64; 4]> {
        self.nodes
            .iter()
            .zip(&self.h_values)
            .map(|(z, h)| [z.re, z.im, h.im, -h.re])
            .collect()
    }
}

/// Outcome of the dominance check of one contour.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub role: ContourRole,
    pub ok: bool,
    /// Maximum level on the contour.
    pub h_max: f64,
    pub dominant_saddles: Vec<C64>,
    pub samples: usize,
    pub message: String,
}

/// The contours `W_0 … W_N` at one point, ready for integration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContourSet {
    pub pt: LaxOleinikPoint,
    pub eps_ref: f64,
    pub paths: Vec<ContourPath>,
    pub critical_points: Vec<C64>,
    pub reports: Vec<ValidationReport>,
    /// Flow iterations spent (summed over contours).
    pub iterations: usize,
    /// Condition number of the row-normalized denominator matrix at
    /// `eps_ref`, when it has been computed.
    pub conditioning: Option<f64>,
}

impl ContourSet {
    /// Whether every contour passed the dominance check.
    pub fn all_valid(&self) -> bool {
        self.reports.iter().all(|r| r.ok)
    }
}

/// The landscape `H = Im h` at a fixed `(t, x)`.
pub(crate) struct Landscape<'a> {
    pub data: &'a RationalInitialData,
    pub pt: LaxOleinikPoint,
    pub poles: Vec<C64>,
    pub crit: Vec<C64>,
    pub crit_h2: Vec<f64>,
}

impl<'a> Landscape<'a> {
    pub fn new(data: &'a RationalInitialData, pt: LaxOleinikPoint) -> Result<Self> {
        let crit = branches::characteristic_roots(data, pt, None)?;
        let crit_h2 = crit.iter().map(|&c| data.h_second(pt, c).norm()).collect();
        Ok(Self {
            data,
            pt,
            poles: data.all_terms().map(|(p, _)| p).collect(),
            crit,
            crit_h2,
        })
    }

    pub fn hp(&self, z: C64) -> C64 {
        self.data.h_prime_unchecked(self.pt, z)
    }

    pub fn pole_dist(&self, z: C64) -> f64 {
        self.data.pole_distance(z)
    }

    /// `ln max(1, |u0(z)|, max_k 1/|z − p_k|)`: the largest integrand factor.
    pub fn weight_ln(&self, z: C64) -> f64 {
        let mut w = 1.0f64.max(self.data.u0_complex(z).norm());
        for p in self.data.poles() {
            w = w.max(1.0 / (z - p).norm());
        }
        w.ln()
    }
}

/// Geometric parameters shared by all contours at one point.
struct Geometry {
    l_split: f64,
    l_step: f64,
    r_min: f64,
}

impl Geometry {
    fn new(land: &Landscape) -> Self {
        let data = land.data;
        let s = data.poles().iter().map(|p| p.im).fold(f64::INFINITY, f64::min).min(1.0);
        let mut pc = f64::INFINITY;
        for p in &land.poles {
            for c in &land.crit {
                pc = pc.min((p - c).norm());
            }
        }
        let l_split = 0.5 * s;
        Self {
            l_split,
            l_step: 0.5 * l_split,
            r_min: (1e-3 * data.scale()).min(0.1 * pc),
        }
    }
}

fn cross(a: C64, b: C64) -> f64 {
    a.re * b.im - a.im * b.re
}

/// Whether `p` lies in the closed triangle `abc`; degenerate triangles
/// contain nothing (the callers test the edges separately).
fn in_triangle(p: C64, a: C64, b: C64, c: C64) -> bool {
    let area = cross(b - a, c - a);
    let size = (b - a).norm_sqr().max((c - a).norm_sqr()).max((c - b).norm_sqr());
    if area.abs() <= 1e-14 * size {
        return false;
    }
    let d1 = cross(b - a, p - a);
    let d2 = cross(c - b, p - b);
    let d3 = cross(a - c, p - c);
    let neg = d1 < 0.0 || d2 < 0.0 || d3 < 0.0;
    let pos = d1 > 0.0 || d2 > 0.0 || d3 > 0.0;
    !(neg && pos)
}

fn seg_dist(p: C64, a: C64, b: C64) -> f64 {
    let d = b - a;
    let l2 = d.norm_sqr();
    if l2 == 0.0 {
        return (p - a).norm();
    }
    let s = (((p - a) * d.conj()).re / l2).clamp(0.0, 1.0);
    (p - (a + d * s)).norm()
}

/// Whether moving the segment `ab` to `a2 b2` can sweep across a pole.
fn sweep_blocked(poles: &[C64], a: C64, b: C64, a2: C64, b2: C64, tiny: f64) -> bool {
    poles.iter().any(|&p| {
        seg_dist(p, a2, b2) < tiny
            || seg_dist(p, a, a2) < tiny
            || seg_dist(p, b, b2) < tiny
            || in_triangle(p, a, b, b2)
            || in_triangle(p, a, b2, a2)
            || in_triangle(p, a, b, a2)
            || in_triangle(p, b, b2, a2)
    })
}

fn continue_h(land: &Landscape, nodes: &[C64]) -> Vec<C64> {
    let mut h = Vec::with_capacity(nodes.len());
    h.push(land.data.h_principal(land.pt, nodes[0]));
    for k in 1..nodes.len() {
        let v = h[k - 1] + land.data.h_increment(land.pt, nodes[k - 1], nodes[k]);
        h.push(v);
    }
    h
}

struct FlowState<'l, 'a> {
    land: &'l Landscape<'a>,
    geo: &'l Geometry,
    cfg: &'l SolverConfig,
    eps_ref: f64,
}

impl FlowState<'_, '_> {
    fn weighted(&self, path: &ContourPath, i: usize) -> f64 {
        path.level(i) + self.eps_ref * self.land.weight_ln(path.nodes[i])
    }

    fn levels(&self, path: &ContourPath) -> (Vec<f64>, f64, f64) {
        let w: Vec<f64> = (0..path.nodes.len()).map(|i| self.weighted(path, i)).collect();
        let hmax_w = w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let hmax = (0..path.nodes.len())
            .map(|i| path.level(i))
            .fold(f64::NEG_INFINITY, f64::max);
        (w, hmax_w, hmax)
    }

    fn negligible_cut(&self, hmax_w: f64) -> f64 {
        hmax_w - 40.0 * self.eps_ref
    }

    fn displacement(&self, z: C64) -> C64 {
        let hp = self.land.hp(z);
        let g = hp.norm();
        if g == 0.0 {
            return C64::new(0.0, 0.0);
        }
        let hpp = self.land.data.h_second(self.land.pt, z).norm();
        let ell = self.geo.l_step.min(0.2 * self.land.pole_dist(z));
        let tau = (0.5 / hpp).min(ell / g);
        -C64::new(0.0, tau) * hp.conj()
    }

    /// One flow step; returns the largest displacement applied.
    fn step(&self, path: &mut ContourPath) -> f64 {
        let n = path.nodes.len();
        let (w, hmax_w, _) = self.levels(path);
        let cut = self.negligible_cut(hmax_w);
        let last = n - 1;
        let mut disp = vec![C64::new(0.0, 0.0); n];
        for i in 1..last {
            let z = path.nodes[i];
            if w[i] < cut || self.land.pole_dist(z) < self.geo.r_min {
                continue;
            }
            disp[i] = self.displacement(z);
        }
        if let Some(ls) = path.loop_start {
            disp[last] = disp[ls];
        }
        let tiny = 1e-12 * self.land.data.scale();
        for _ in 0..16 {
            let mut blocked = vec![false; n];
            let mut any = false;
            for k in 0..last {
                if disp[k] == C64::new(0.0, 0.0) && disp[k + 1] == C64::new(0.0, 0.0) {
                    continue;
                }
                let (a, b) = (path.nodes[k], path.nodes[k + 1]);
                if sweep_blocked(&self.land.poles, a, b, a + disp[k], b + disp[k + 1], tiny) {
                    blocked[k] = true;
                    blocked[k + 1] = true;
                    any = true;
                }
            }
            if !any {
                break;
            }
            if let Some(ls) = path.loop_start {
                let b = blocked[ls] || blocked[last];
                blocked[ls] = b;
                blocked[last] = b;
            }
            for i in 0..n {
                if blocked[i] {
                    disp[i] *= 0.5;
                }
            }
        }
        // Anything still blocked after repeated halving does not move.
        loop {
            let mut changed = false;
            for k in 0..last {
                let (a, b) = (path.nodes[k], path.nodes[k + 1]);
                if (disp[k] != C64::new(0.0, 0.0) || disp[k + 1] != C64::new(0.0, 0.0))
                    && sweep_blocked(&self.land.poles, a, b, a + disp[k], b + disp[k + 1], tiny)
                {
                    disp[k] = C64::new(0.0, 0.0);
                    disp[k + 1] = C64::new(0.0, 0.0);
                    changed = true;
                }
            }
            if let Some(ls) = path.loop_start {
                if disp[ls] != disp[last] {
                    disp[ls] = C64::new(0.0, 0.0);
                    disp[last] = C64::new(0.0, 0.0);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let mut moved = 0.0f64;
        for i in 0..n {
            path.nodes[i] += disp[i];
            moved = moved.max(disp[i].norm());
        }
        if let Some(ls) = path.loop_start {
            path.nodes[last] = path.nodes[ls];
        }
        path.h_values = continue_h(self.land, &path.nodes);
        moved
    }

    fn segment_level(&self, path: &ContourPath, k: usize, z: C64) -> f64 {
        path.h_on_segment(self.land.data, self.land.pt, k, z).im
            + if path.segment_is_leg(k) { path.leg_shift } else { 0.0 }
    }

    /// Splits long or ridge-crossing segments, then prunes negligible runs.
    fn remesh(&self, path: &mut ContourPath) -> Result<()> {
        let (w, hmax_w, _) = self.levels(path);
        let cut = self.negligible_cut(hmax_w);
        let n = path.nodes.len();
        let mut nodes = Vec::with_capacity(n + 16);
        let mut ls_new = None;
        for k in 0..n - 1 {
            if path.loop_start == Some(k) {
                ls_new = Some(nodes.len());
            }
            nodes.push(path.nodes[k]);
            let (a, b) = (path.nodes[k], path.nodes[k + 1]);
            let len = (b - a).norm();
            let near = 0.5 * self.land.pole_dist(a).min(self.land.pole_dist(b));
            let negligible = w[k] < cut && w[k + 1] < cut;
            let lim = if negligible { near } else { near.min(self.geo.l_split) };
            let mut pieces = if len > lim { (len / lim).ceil() as usize } else { 1 };
            if pieces == 1 && !negligible && len > 1e-4 * self.geo.l_split {
                let mid = 0.5 * (a + b);
                let hm = self.segment_level(path, k, mid);
                if hm - path.level(k).max(path.level(k + 1)) > 0.01 * self.cfg.delta {
                    pieces = 2;
                }
            }
            for j in 1..pieces {
                nodes.push(a + (b - a) * (j as f64 / pieces as f64));
            }
        }
        nodes.push(path.nodes[n - 1]);
        if nodes.len() > self.cfg.max_nodes {
            return Err(Error::ContourConstructionFailure(format!(
                "{}: node budget {} exceeded",
                path.role, self.cfg.max_nodes
            )));
        }
        path.nodes = nodes;
        path.loop_start = ls_new;
        path.h_values = continue_h(self.land, &path.nodes);
        self.prune(path, cut);
        Ok(())
    }

    fn prune(&self, path: &mut ContourPath, cut: f64) {
        let n = path.nodes.len();
        if n < 4 {
            return;
        }
        let w: Vec<f64> = (0..n).map(|i| self.weighted(path, i)).collect();
        let last = n - 1;
        let mut keep = vec![true; n];
        let mut prev = 0usize;
        for i in 1..last {
            let protected = path.loop_start == Some(i);
            let next = i + 1;
            if !protected && w[prev] < cut && w[i] < cut && w[next] < cut {
                let (a, b, c) = (path.nodes[prev], path.nodes[i], path.nodes[next]);
                let lim = 0.5 * self.land.pole_dist(a).min(self.land.pole_dist(c));
                let clear = !self.land.poles.iter().any(|&p| in_triangle(p, a, b, c))
                    && (c - a).norm() <= lim;
                if clear {
                    let mid = 0.5 * (a + c);
                    let hm = path.h_values[prev] + self.land.data.h_increment(self.land.pt, a, mid);
                    let shift = if path.segment_is_leg(prev) { path.leg_shift } else { 0.0 };
                    let wm = hm.im + shift + self.eps_ref * self.land.weight_ln(mid);
                    if wm < cut {
                        keep[i] = false;
                        continue;
                    }
                }
            }
            prev = i;
        }
        if keep.iter().all(|&k| k) {
            return;
        }
        let mut nodes = Vec::with_capacity(n);
        let mut ls_new = None;
        for i in 0..n {
            if keep[i] {
                if path.loop_start == Some(i) {
                    ls_new = Some(nodes.len());
                }
                nodes.push(path.nodes[i]);
            }
        }
        path.nodes = nodes;
        path.loop_start = ls_new;
        path.h_values = continue_h(self.land, &path.nodes);
    }

    /// Dominance check: every sample within `δ/2` of the maximum level lies
    /// within `2√(2δ/|h″(s)|)` of a critical point `s`, and the contour ends
    /// are negligible.
    fn validate(&self, path: &ContourPath) -> ValidationReport {
        let delta = self.cfg.delta;
        let mut samples: Vec<(C64, f64)> = Vec::with_capacity(4 * path.nodes.len());
        for k in 0..path.nodes.len() - 1 {
            let (a, b) = (path.nodes[k], path.nodes[k + 1]);
            for s in [0.0, 0.25, 0.5, 0.75] {
                let z = a + (b - a) * s;
                samples.push((z, self.segment_level(path, k, z)));
            }
        }
        let last = path.nodes.len() - 1;
        samples.push((path.nodes[last], path.level(last)));
        let h_max = samples.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
        let mut dominant: Vec<C64> = Vec::new();
        let mut report = ValidationReport {
            role: path.role,
            ok: true,
            h_max,
            dominant_saddles: Vec::new(),
            samples: samples.len(),
            message: String::new(),
        };
        for &(z, h) in &samples {
            if h < h_max - 0.5 * delta {
                continue;
            }
            let hit = self
                .land
                .crit
                .iter()
                .zip(&self.land.crit_h2)
                .filter(|(c, h2)| (z - **c).norm() <= 2.0 * (2.0 * delta / **h2).sqrt())
                .map(|(c, _)| *c)
                .min_by(|a, b| (z - a).norm().total_cmp(&(z - b).norm()));
            match hit {
                Some(c) => {
                    if !dominant.iter().any(|d| (d - c).norm() < 1e-9) {
                        dominant.push(c);
                    }
                }
                None => {
                    report.ok = false;
                    report.message = format!(
                        "{}: level {h:.6} at {:.6}{:+.6}i is within delta/2 of the maximum {h_max:.6} away from every critical point",
                        path.role, z.re, z.im
                    );
                    break;
                }
            }
        }
        if report.ok {
            let (w, hmax_w, _) = self.levels(path);
            let cut = self.negligible_cut(hmax_w);
            let ends: &[usize] = if path.loop_start.is_some() { &[0] } else { &[0, last] };
            for &e in ends {
                if w[e] >= cut {
                    report.ok = false;
                    report.message = format!("{}: contour end {e} is not in a valley", path.role);
                }
            }
        }
        report.dominant_saddles = dominant;
        report
    }

    /// Runs the flow until the maximum stalls and the contour validates.
    fn run(&self, path: &mut ContourPath, warm: bool) -> Result<(ValidationReport, usize)> {
        if warm {
            let rep = self.validate(path);
            if rep.ok {
                return Ok((rep, 0));
            }
        }
        self.remesh(path)?;
        let mut hist: Vec<f64> = Vec::new();
        let mut last_rep = None;
        for iter in 0..self.cfg.max_flow_iterations {
            let (_, _, hmax) = self.levels(path);
            hist.push(hmax);
            let stalled = iter >= 6 && hist[iter - 6] - hmax <= 1e-7 * (1.0 + hmax.abs());
            if stalled && (iter % 3 == 0) {
                let rep = self.validate(path);
                if rep.ok {
                    return Ok((rep, iter));
                }
                last_rep = Some(rep);
            }
            self.step(path);
            self.remesh(path)?;
        }
        let msg = last_rep
            .map(|r| r.message)
            .unwrap_or_else(|| "maximum level did not stall".into());
        Err(Error::ContourConstructionFailure(format!(
            "{} after {} flow iterations: {msg}",
            path.role, self.cfg.max_flow_iterations
        )))
    }
}

fn base_radius(land: &Landscape, eps_ref: f64, factor: f64) -> f64 {
    let data = land.data;
    let x = land.pt.x;
    let dmax = data.poles().iter().map(|p| (p - x).norm()).fold(0.0, f64::max);
    let csum: f64 = data.residues().iter().map(|c| c.norm()).sum();
    let resh: f64 = data.residues().iter().map(|c| 2.0 * PI * c.re.abs()).sum();
    let hcrit = land
        .crit
        .iter()
        .map(|&c| data.h_principal(land.pt, c).im)
        .fold(0.0, f64::max);
    let mut r = 2.0 * (dmax + 1.0);
    for _ in 0..200 {
        let need = 50.0 * eps_ref + resh + hcrit + 5.0 + 2.0 * csum * ((2.0 * r).ln().abs() + PI);
        if r * r / (2.0 * land.pt.t) >= need {
            break;
        }
        r *= 1.1;
    }
    r * factor
}

fn initial_w0(land: &Landscape, r: f64) -> ContourPath {
    let x = land.pt.x;
    let nodes = vec![
        C64::new(x - r, r),
        C64::new(x - r, 0.0),
        C64::new(x + r, 0.0),
        C64::new(x + r, -r),
    ];
    ContourPath {
        role: ContourRole::W0,
        h_values: continue_h(land, &nodes),
        nodes,
        loop_start: None,
        leg_shift: 0.0,
        dominant_saddles: Vec::new(),
    }
}

/// Candidate loops around `p_n` (zero-based `n`), one per choice of the set
/// of other poles that the leg passes underneath.
///
/// Legs in different homotopy classes give different (but equally valid)
/// cycles; they differ in which saddles dominate the row, which decides how
/// well conditioned the determinants are.
fn initial_loops(land: &Landscape, r: f64, n: usize) -> Vec<ContourPath> {
    let data = land.data;
    let x = land.pt.x;
    let zl = C64::new(x - r, r);
    let p = data.poles()[n];
    let c = data.residues()[n];
    let others: Vec<C64> = data
        .poles()
        .iter()
        .enumerate()
        .filter(|(m, _)| *m != n)
        .map(|(_, q)| *q)
        .collect();
    let nearest = land
        .poles
        .iter()
        .filter(|q| (*q - p).norm() > 0.0)
        .map(|q| (q - p).norm())
        .fold(f64::INFINITY, f64::min);
    let rho = 0.3 * nearest.min(2.0 * p.im);
    let beta = (zl - p).arg();
    let q = p + C64::from_polar(rho, beta);
    let subsets = if others.len() <= 3 { 1usize << others.len() } else { 1 + others.len() };
    let mut out = Vec::new();
    for s in 0..subsets {
        let below: Vec<C64> = if others.len() <= 3 {
            (0..others.len()).filter(|k| s & (1 << k) != 0).map(|k| others[k]).collect()
        } else if s == 0 {
            Vec::new()
        } else {
            vec![others[s - 1]]
        };
        let mut nodes = vec![zl];
        let mut way: Vec<C64> = below.iter().map(|o| C64::new(o.re, 0.5 * o.im)).collect();
        way.sort_by(|a, b| a.re.total_cmp(&b.re));
        nodes.extend(way);
        if below.is_empty() {
            // Detour around any other pole lying close to the straight leg.
            for other in &others {
                let d = seg_dist(*other, zl, q);
                if d < 0.25 * other.im {
                    let dir = q - zl;
                    let s = (((other - zl) * dir.conj()).re / dir.norm_sqr()).clamp(0.0, 1.0);
                    let foot = zl + dir * s;
                    let mut off = foot - other;
                    if off.norm() < 1e-12 {
                        off = C64::new(-dir.im, dir.re);
                    }
                    nodes.push(other + off / off.norm() * (0.5 * other.im));
                }
            }
        }
        let last_way = *nodes.last().expect("nodes is non-empty");
        let beta_n = (last_way - p).arg();
        let q = p + C64::from_polar(rho, beta_n);
        nodes.push(q);
        let ls = nodes.len() - 1;
        let m = 16;
        for k in 1..m {
            nodes.push(p + C64::from_polar(rho, beta_n + 2.0 * PI * k as f64 / m as f64));
        }
        nodes.push(q);
        out.push(ContourPath {
            role: ContourRole::Wn(n + 1),
            h_values: continue_h(land, &nodes),
            nodes,
            loop_start: Some(ls),
            leg_shift: (2.0 * PI * c.re).max(0.0),
            dominant_saddles: Vec::new(),
        });
    }
    out
}

/// Validated candidates for every row: `W_0` first, then the candidate
/// loops around each pole.
pub(crate) struct Candidates {
    pub rows: Vec<Vec<(ContourPath, ValidationReport)>>,
    pub critical_points: Vec<C64>,
    pub iterations: usize,
}

fn check_eps(eps_ref: f64) -> Result<()> {
    if !(eps_ref > 0.0) {
        return Err(Error::InvalidConfig(format!("epsilon must be positive, got {eps_ref}")));
    }
    Ok(())
}

/// Flows every candidate contour from scratch.
pub(crate) fn build_candidates(
    data: &RationalInitialData,
    pt: LaxOleinikPoint,
    eps_ref: f64,
    cfg: &SolverConfig,
) -> Result<Candidates> {
    check_eps(eps_ref)?;
    let land = Landscape::new(data, pt)?;
    let geo = Geometry::new(&land);
    let fs = FlowState { land: &land, geo: &geo, cfg, eps_ref };
    let mut last_err = None;
    for factor in [1.0, 1.5, 2.5] {
        let r = base_radius(&land, eps_ref, factor);
        let mut iterations = 0;
        let mut rows = Vec::new();
        let mut w0 = initial_w0(&land, r);
        match fs.run(&mut w0, false) {
            Ok((rep, it)) => {
                iterations += it;
                w0.dominant_saddles = rep.dominant_saddles.clone();
                rows.push(vec![(w0, rep)]);
            }
            Err(e) => {
                last_err = Some(e);
                continue;
            }
        }
        let mut complete = true;
        for n in 0..data.n() {
            let mut ok = Vec::new();
            for mut path in initial_loops(&land, r, n) {
                match fs.run(&mut path, false) {
                    Ok((rep, it)) => {
                        iterations += it;
                        path.dominant_saddles = rep.dominant_saddles.clone();
                        ok.push((path, rep));
                    }
                    Err(e) => last_err = Some(e),
                }
            }
            if ok.is_empty() {
                complete = false;
                break;
            }
            rows.push(ok);
        }
        if complete {
            return Ok(Candidates { rows, critical_points: land.crit.clone(), iterations });
        }
    }
    Err(last_err.unwrap_or_else(|| Error::ContourConstructionFailure("no attempt made".into())))
}

/// Reflows a contour set from a neighbouring point; the result keeps the
/// homotopy classes of `warm`.
pub(crate) fn reflow(
    data: &RationalInitialData,
    pt: LaxOleinikPoint,
    eps_ref: f64,
    cfg: &SolverConfig,
    warm: &ContourSet,
) -> Result<ContourSet> {
    check_eps(eps_ref)?;
    if warm.paths.len() != data.n() + 1 {
        return Err(Error::InvalidConfig("warm start has the wrong number of contours".into()));
    }
    let land = Landscape::new(data, pt)?;
    let geo = Geometry::new(&land);
    let fs = FlowState { land: &land, geo: &geo, cfg, eps_ref };
    let mut paths = Vec::new();
    let mut reports = Vec::new();
    let mut iterations = 0;
    for p in &warm.paths {
        let mut q = p.clone();
        q.h_values = continue_h(&land, &q.nodes);
        let (rep, it) = fs.run(&mut q, true)?;
        q.dominant_saddles = rep.dominant_saddles.clone();
        iterations += it;
        reports.push(rep);
        paths.push(q);
    }
    Ok(ContourSet {
        pt,
        eps_ref,
        paths,
        critical_points: land.crit.clone(),
        reports,
        iterations,
        conditioning: None,
    })
}


/// Contours from user-supplied node lists; validated but never rejected.
pub(crate) fn from_manual(
    data: &RationalInitialData,
    pt: LaxOleinikPoint,
    eps_ref: f64,
    cfg: &SolverConfig,
    manual: &[ManualPath],
) -> Result<ContourSet> {
    let land = Landscape::new(data, pt)?;
    let geo = Geometry::new(&land);
    let fs = FlowState { land: &land, geo: &geo, cfg, eps_ref };
    let mut paths = Vec::new();
    let mut reports = Vec::new();
    for n in 0..=data.n() {
        let name = if n == 0 { "W0".to_string() } else { format!("W{n}") };
        let mp = manual.iter().find(|m| m.role == name).ok_or_else(|| {
            Error::InvalidConfig(format!("manual_paths is missing contour {name}"))
        })?;
        let nodes: Vec<C64> = mp.nodes.iter().map(|a| C64::new(a[0], a[1])).collect();
        if nodes.len() < 2 {
            return Err(Error::InvalidConfig(format!("manual contour {name} needs at least two nodes")));
        }
        if n > 0 {
            let ls = mp.loop_start.ok_or_else(|| {
                Error::InvalidConfig(format!("manual contour {name} needs loop_start"))
            })?;
            if ls >= nodes.len() - 1 || (nodes[ls] - nodes[nodes.len() - 1]).norm() > 1e-12 {
                return Err(Error::InvalidConfig(format!(
                    "manual contour {name}: last node must coincide with node loop_start"
                )));
            }
        }
        let mut path = ContourPath {
            role: if n == 0 { ContourRole::W0 } else { ContourRole::Wn(n) },
            h_values: continue_h(&land, &nodes),
            nodes,
            loop_start: if n == 0 { None } else { mp.loop_start },
            leg_shift: if n == 0 { 0.0 } else { (2.0 * PI * data.residues()[n - 1].re).max(0.0) },
            dominant_saddles: Vec::new(),
        };
        let rep = fs.validate(&path);
        path.dominant_saddles = rep.dominant_saddles.clone();
        reports.push(rep);
        paths.push(path);
    }
    Ok(ContourSet {
        pt,
        eps_ref,
        paths,
        critical_points: land.crit.clone(),
        reports,
        iterations: 0,
        conditioning: None,
    })
}

/// Re-validates a contour set (e.g. after an external modification).
pub fn revalidate(data: &RationalInitialData, set: &ContourSet, cfg: &SolverConfig) -> Result<Vec<ValidationReport>> {
    let land = Landscape::new(data, set.pt)?;
    let geo = Geometry::new(&land);
    let fs = FlowState { land: &land, geo: &geo, cfg, eps_ref: set.eps_ref };
    Ok(set.paths.iter().map(|p| fs.validate(p)).collect())
}

/// Moves every interior node by the given offsets (one per node, per path),
/// re-continuing `h`.  Fails if a segment would sweep across a pole.
pub fn perturb(data: &RationalInitialData, set: &ContourSet, offsets: &[Vec<C64>]) -> Result<ContourSet> {
    let land = Landscape::new(data, set.pt)?;
    let mut out = set.clone();
    for (path, off) in out.paths.iter_mut().zip(offsets) {
        let n = path.nodes.len();
        let mut disp = vec![C64::new(0.0, 0.0); n];
        for i in 1..n - 1 {
            disp[i] = off.get(i).copied().unwrap_or_default();
        }
        if let Some(ls) = path.loop_start {
            disp[n - 1] = disp[ls];
        }
        for k in 0..n - 1 {
            let (a, b) = (path.nodes[k], path.nodes[k + 1]);
            if sweep_blocked(&land.poles, a, b, a + disp[k], b + disp[k + 1], 1e-12) {
                return Err(Error::ContourConstructionFailure(format!(
                    "{}: perturbation would cross a pole",
                    path.role
                )));
            }
        }
        for i in 0..n {
            path.nodes[i] += disp[i];
        }
        path.h_values = continue_h(&land, &path.nodes);
    }
    Ok(out)
}
