//! Grid evaluations behind the command-line outputs: profiles over a
//! `(t, x)` grid, heat maps of `Re(−ih)`, and the Stokes graph.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::branches::{self, solve_branches, weak_limit_ubar};
use crate::error::Result;
use crate::exact::{trace_steepest_descent, ContourSet, ExactSolver, SolverConfig, Trace, TraceOptions};
use crate::rational::{LaxOleinikPoint, RationalInitialData, C64};
use crate::zd::u_zd_from_branches;

/// One `(t, x, ε)` sample of a profile.  Failures are recorded in `status`
/// and leave the affected values as NaN.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub t: f64,
    pub x: f64,
    /// NaN for rows of the weak limit alone.
    pub epsilon: f64,
    /// Number of phases (`usize::MAX` when the branches failed).
    pub j: usize,
    pub ubar: f64,
    pub u_zd: f64,
    pub u_exact: Option<f64>,
    pub status: String,
}

/// What to evaluate at each grid point.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileKind {
    /// Weak limit and phase count only.
    WeakLimit,
    /// `u^ZD` for each `ε`, and `u_exact` as well when a solver
    /// configuration is given.
    Full { epsilons: Vec<f64>, exact: Option<SolverConfig> },
}

/// Evaluates a profile on the grid `ts × xs`.
///
/// Time rows are processed in parallel; within a row the exact solver is
/// warm-started from the previous `x`.  Output is ordered by `t`, then `x`,
/// then `ε`.
pub fn profile_grid(data: &RationalInitialData, ts: &[f64], xs: &[f64], kind: &ProfileKind) -> Result<Vec<ProfileRow>> {
    let solver = match kind {
        ProfileKind::Full { exact: Some(cfg), .. } => Some(ExactSolver::new(data.clone(), cfg.clone())?),
        _ => None,
    };
    let rows: Vec<Vec<ProfileRow>> = ts
        .par_iter()
        .map(|&t| {
            let mut warm: Option<ContourSet> = None;
            let mut out = Vec::new();
            for &x in xs {
                let pt = LaxOleinikPoint::new(t, x);
                let br = pt.clone().and_then(|pt| solve_branches(data, pt));
                let (j, ubar, mut status) = match &br {
                    Ok(b) => (b.j, weak_limit_ubar(b), String::new()),
                    Err(e) => (usize::MAX, f64::NAN, e.to_string()),
                };
                match kind {
                    ProfileKind::WeakLimit => out.push(ProfileRow {
                        t,
                        x,
                        epsilon: f64::NAN,
                        j,
                        ubar,
                        u_zd: f64::NAN,
                        u_exact: None,
                        status,
                    }),
                    ProfileKind::Full { epsilons, .. } => {
                        let exact: Vec<Option<f64>> = match (&solver, &pt) {
                            (Some(s), Ok(pt)) => match s.u_exact_multi(*pt, epsilons, warm.as_ref()) {
                                Ok((u, c)) => {
                                    warm = Some(c);
                                    u.into_iter().map(Some).collect()
                                }
                                Err(e) => {
                                    warm = None;
                                    status = join(&status, &format!("exact: {e}"));
                                    vec![Some(f64::NAN); epsilons.len()]
                                }
                            },
                            _ => vec![None; epsilons.len()],
                        };
                        for (k, &eps) in epsilons.iter().enumerate() {
                            let (u_zd, st) = match (&br, &pt) {
                                (Ok(b), Ok(pt)) => match u_zd_from_branches(data, *pt, b, eps) {
                                    Ok(u) => (u, status.clone()),
                                    Err(e) => (f64::NAN, join(&status, &format!("zd: {e}"))),
                                },
                                _ => (f64::NAN, status.clone()),
                            };
                            out.push(ProfileRow { t, x, epsilon: eps, j, ubar, u_zd, u_exact: exact[k], status: st });
                        }
                    }
                }
            }
            out
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

fn join(a: &str, b: &str) -> String {
    if a.is_empty() {
        b.to_string()
    } else {
        format!("{a}; {b}")
    }
}

/// `Re(−ih(z)) = Im h(z)` on an `n_re × n_im` grid of the box
/// `[re0, re1] × [im0, im1]`, as `(Re z, Im z, value)`.
///
/// `Im h` is single-valued (the logarithms only contribute to `Re h`), so
/// principal branches are used; points on a pole give NaN.
pub fn heatmap(
    data: &RationalInitialData,
    pt: LaxOleinikPoint,
    re: (f64, f64),
    im: (f64, f64),
    n: (usize, usize),
) -> Vec<(f64, f64, f64)> {
    let (nr, ni) = (n.0.max(2), n.1.max(2));
    let mut out = Vec::with_capacity(nr * ni);
    for j in 0..ni {
        let y = im.0 + (im.1 - im.0) * j as f64 / (ni - 1) as f64;
        for i in 0..nr {
            let x = re.0 + (re.1 - re.0) * i as f64 / (nr - 1) as f64;
            let z = C64::new(x, y);
            let v = if data.pole_distance(z) > 0.0 { data.h_principal(pt, z).im } else { f64::NAN };
            out.push((x, y, v));
        }
    }
    out
}

/// One steepest-descent or -ascent arc of the Stokes graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StokesArc {
    /// Index into the list of critical points.
    pub critical: usize,
    pub saddle: C64,
    /// 0 and 1 descend, 2 and 3 ascend.
    pub branch: u8,
    pub trace: Trace,
}

/// Traces the four arcs from every critical point of `h` in the closed
/// upper half-plane.  Arcs that fail are skipped and reported as messages.
pub fn stokes_graph(
    data: &RationalInitialData,
    pt: LaxOleinikPoint,
    opts: &TraceOptions,
) -> Result<(Vec<StokesArc>, Vec<String>)> {
    let crit: Vec<C64> = branches::characteristic_roots(data, pt, None)?
        .into_iter()
        .filter(|z| z.im >= -1e-12)
        .collect();
    let mut arcs = Vec::new();
    let mut messages = Vec::new();
    for (i, s) in crit.iter().enumerate() {
        for branch in 0..4u8 {
            match trace_steepest_descent(data, pt, *s, branch, opts) {
                Ok(trace) => arcs.push(StokesArc { critical: i, saddle: *s, branch, trace }),
                Err(e) => messages.push(format!("critical point {i}, branch {branch}: {e}")),
            }
        }
    }
    Ok((arcs, messages))
}
