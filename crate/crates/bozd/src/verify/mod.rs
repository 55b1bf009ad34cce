//! Verification sweeps: sup-norm errors of `u^ZD` against a reference
//! solution, log-log slope fits, and `L²` checks of the profile.
//!
//! A sweep samples `x_k = a + (k/m)(b − a)`, `k = 0..m`, at fixed `t`, and
//! compares `u^ZD` with either the exact solver (contours built once per
//! point and reused for every `ε`, warm-started from the neighbouring point)
//! or the soliton formula for `u0 = 2/(1+x²)`.  Points are processed in
//! contiguous chunks, one chunk per worker, so that warm starts stay local.

pub mod suites;

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::branches::{self, solve_branches};
use crate::error::{Error, Result};
use crate::exact::{ContourSet, ExactSolver, SolverConfig};
use crate::matsuno::{u_matsuno, MatsunoSpec};
use crate::quad;
use crate::rational::{LaxOleinikPoint, RationalInitialData};
use crate::zd::u_zd_from_branches;

/// Reference solution a sweep compares against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Reference {
    /// The contour-integral solver.
    Exact(SolverConfig),
    /// The soliton formula; requires `u0 = 2/(1+x²)` and `ε = 1/N`.
    Matsuno,
}

/// What to sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub t: f64,
    pub interval: (f64, f64),
    /// Strictly decreasing.
    pub epsilons: Vec<f64>,
    /// Samples per interval for each `ε` (each at least 100).
    pub m: Vec<usize>,
    pub reference: Reference,
    /// Worker threads (`None`: the global rayon pool).
    pub workers: Option<usize>,
}

/// Result of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub interval: (f64, f64),
    pub t: f64,
    pub epsilons: Vec<f64>,
    pub m: Vec<usize>,
    /// `max_k |u_ref − u^ZD|` for each `ε`.
    pub max_errors: Vec<f64>,
    /// Where each maximum is attained.
    pub argmax: Vec<f64>,
    /// Least-squares log-log slope over the three smallest `ε` (`None` with
    /// fewer than three).
    pub fitted_slope: Option<f64>,
    /// Seconds spent evaluating each `ε`; contour construction is shared
    /// and reported separately.
    pub wall_times: Vec<f64>,
    pub setup_time: f64,
}

/// Errors unless `[a, b]` is free of caustics at time `t`.
pub fn check_no_caustics(data: &RationalInitialData, t: f64, a: f64, b: f64, cells: usize) -> Result<()> {
    let zeros = branches::discriminant_zeros_in_x(data, t, a, b, cells.max(1))?;
    let exact = branches::caustic_points(data, t)?;
    if let Some(x) = zeros.iter().chain(exact.iter()).copied().find(|x| *x >= a && *x <= b) {
        return Err(Error::NearCaustic { t, x, separation: 0.0 });
    }
    Ok(())
}

fn validate_spec(data: &RationalInitialData, spec: &SweepSpec) -> Result<()> {
    let (a, b) = spec.interval;
    if !(spec.t > 0.0) {
        return Err(Error::NonPositiveTime(spec.t));
    }
    if !(b > a) {
        return Err(Error::InvalidConfig(format!("interval end {b} must exceed start {a}")));
    }
    if spec.epsilons.is_empty() || spec.epsilons.len() != spec.m.len() {
        return Err(Error::InvalidConfig("need one sample count per epsilon".into()));
    }
    if spec.epsilons.windows(2).any(|w| !(w[1] < w[0])) || spec.epsilons.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::InvalidConfig("epsilons must be positive and strictly decreasing".into()));
    }
    if let Some(m) = spec.m.iter().find(|m| **m < 100) {
        return Err(Error::InvalidConfig(format!("at least 100 samples per interval required, got {m}")));
    }
    if spec.workers == Some(0) {
        return Err(Error::InvalidConfig("workers must be at least 1".into()));
    }
    if spec.reference == Reference::Matsuno {
        if *data != RationalInitialData::lorentzian() {
            return Err(Error::InvalidConfig("the soliton reference needs u0 = 2/(1+x^2)".into()));
        }
        for e in &spec.epsilons {
            let n = (1.0 / e).round();
            if n < 1.0 || ((1.0 / e) - n).abs() > 1e-9 * n {
                return Err(Error::InvalidConfig(format!("the soliton reference needs epsilon = 1/N, got {e}")));
            }
        }
    }
    Ok(())
}

/// Per-point outcome: `|u_ref − u^ZD|` for each `ε` in a group.
struct PointErrors {
    errors: Vec<f64>,
}

/// Evaluates one group of `ε` sharing the sample grid `xs`.
fn sweep_group(
    data: &RationalInitialData,
    t: f64,
    xs: &[f64],
    epsilons: &[f64],
    reference: &Reference,
    workers: usize,
) -> Result<(Vec<PointErrors>, Vec<f64>, f64)> {
    let solver = match reference {
        Reference::Exact(cfg) => Some(ExactSolver::new(data.clone(), cfg.clone())?),
        Reference::Matsuno => None,
    };
    let specs: Vec<MatsunoSpec> = match reference {
        Reference::Matsuno => epsilons
            .iter()
            .map(|e| MatsunoSpec::new((1.0 / e).round() as usize))
            .collect::<Result<_>>()?,
        Reference::Exact(_) => Vec::new(),
    };
    let chunk = xs.len().div_ceil(workers).max(1);
    type ChunkOut = (Vec<PointErrors>, Vec<f64>, f64);
    let chunks: Vec<Result<ChunkOut>> = xs
        .par_chunks(chunk)
        .map(|xc| {
            let mut warm: Option<ContourSet> = None;
            let mut out = Vec::with_capacity(xc.len());
            let mut times = vec![0.0; epsilons.len()];
            let mut setup = 0.0;
            for &x in xc {
                let pt = LaxOleinikPoint::new(t, x)?;
                let b = solve_branches(data, pt)?;
                let reference_values = match &solver {
                    Some(s) => {
                        let eps_ref = epsilons.iter().copied().fold(0.0, f64::max);
                        let t0 = Instant::now();
                        let c = s.build_contours(pt, eps_ref, warm.as_ref())?;
                        setup += t0.elapsed().as_secs_f64();
                        let mut v = Vec::with_capacity(epsilons.len());
                        for (i, &e) in epsilons.iter().enumerate() {
                            let t0 = Instant::now();
                            v.push(s.evaluate(&c, e)?.u);
                            times[i] += t0.elapsed().as_secs_f64();
                        }
                        warm = Some(c);
                        v
                    }
                    None => {
                        let mut v = Vec::with_capacity(epsilons.len());
                        for (i, sp) in specs.iter().enumerate() {
                            let t0 = Instant::now();
                            v.push(u_matsuno(sp, t, x)?);
                            times[i] += t0.elapsed().as_secs_f64();
                        }
                        v
                    }
                };
                let mut errors = Vec::with_capacity(epsilons.len());
                for (i, &e) in epsilons.iter().enumerate() {
                    let t0 = Instant::now();
                    let z = u_zd_from_branches(data, pt, &b, e)?;
                    times[i] += t0.elapsed().as_secs_f64();
                    errors.push((reference_values[i] - z).abs());
                }
                out.push(PointErrors { errors });
            }
            Ok((out, times, setup))
        })
        .collect();
    let mut points = Vec::with_capacity(xs.len());
    let mut times = vec![0.0; epsilons.len()];
    let mut setup = 0.0;
    for c in chunks {
        let (p, tm, s) = c?;
        points.extend(p);
        for (a, b) in times.iter_mut().zip(tm) {
            *a += b;
        }
        setup += s;
    }
    Ok((points, times, setup))
}

fn run_in_pool<T: Send>(workers: Option<usize>, f: impl FnOnce(usize) -> T + Send) -> Result<T> {
    match workers {
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| Error::InvalidConfig(format!("cannot start {w} workers: {e}")))?;
            Ok(pool.install(|| f(w)))
        }
        None => Ok(f(rayon::current_num_threads())),
    }
}

/// Runs a sup-norm error sweep.
///
/// All `ε` whose sample count divides the largest one are evaluated on the
/// finest grid (the coarser grids are subsets of it), so the contours at
/// each point are built once.
pub fn sweep(data: &RationalInitialData, spec: &SweepSpec) -> Result<SweepReport> {
    validate_spec(data, spec)?;
    let (a, b) = spec.interval;
    let m_max = *spec.m.iter().max().expect("non-empty");
    check_no_caustics(data, spec.t, a, b, m_max)?;
    let grid = |m: usize| -> Vec<f64> { (0..=m).map(|k| a + (b - a) * k as f64 / m as f64).collect() };

    let n = spec.epsilons.len();
    let mut max_errors = vec![0.0; n];
    let mut argmax = vec![a; n];
    let mut wall_times = vec![0.0; n];
    let mut setup_time = 0.0;

    let shared: Vec<usize> = (0..n).filter(|&i| m_max.is_multiple_of(spec.m[i])).collect();
    let mut groups: Vec<(usize, Vec<usize>)> = vec![(m_max, shared.clone())];
    for i in (0..n).filter(|i| !shared.contains(i)) {
        groups.push((spec.m[i], vec![i]));
    }
    for (m, members) in groups {
        let xs = grid(m);
        let eps: Vec<f64> = members.iter().map(|&i| spec.epsilons[i]).collect();
        let (points, times, setup) =
            run_in_pool(spec.workers, |w| sweep_group(data, spec.t, &xs, &eps, &spec.reference, w))??;
        setup_time += setup;
        for (g, &i) in members.iter().enumerate() {
            let stride = m / spec.m[i];
            wall_times[i] += times[g];
            for (k, p) in points.iter().enumerate().step_by(stride) {
                // Strict comparison keeps the first maximum, so the result
                // does not depend on evaluation order.
                if p.errors[g] > max_errors[i] {
                    max_errors[i] = p.errors[g];
                    argmax[i] = xs[k];
                }
            }
        }
    }
    let mut report = SweepReport {
        interval: spec.interval,
        t: spec.t,
        epsilons: spec.epsilons.clone(),
        m: spec.m.clone(),
        max_errors,
        argmax,
        fitted_slope: None,
        wall_times,
        setup_time,
    };
    report.fitted_slope = loglog_slope(&report).ok();
    Ok(report)
}

/// `max_k |u_exact − u^ZD|` on `m + 1` equispaced points of `[a, b]`.
pub fn supnorm_error(data: &RationalInitialData, t: f64, a: f64, b: f64, m: usize, epsilon: f64) -> Result<f64> {
    let spec = SweepSpec {
        t,
        interval: (a, b),
        epsilons: vec![epsilon],
        m: vec![m],
        reference: Reference::Exact(SolverConfig::default()),
        workers: None,
    };
    Ok(sweep(data, &spec)?.max_errors[0])
}

/// Least-squares slope of `log(error)` against `log(ε)` over the three
/// smallest `ε`.
pub fn loglog_slope(report: &SweepReport) -> Result<f64> {
    loglog_slope_pairs(&report.epsilons, &report.max_errors)
}

/// [`loglog_slope`] on raw `(ε, error)` pairs.
pub fn loglog_slope_pairs(epsilons: &[f64], errors: &[f64]) -> Result<f64> {
    if epsilons.len() != errors.len() {
        return Err(Error::InsufficientData("epsilon and error lists differ in length".into()));
    }
    let mut pairs: Vec<(f64, f64)> = epsilons
        .iter()
        .zip(errors)
        .filter(|(e, r)| **e > 0.0 && **r > 0.0 && e.is_finite() && r.is_finite())
        .map(|(e, r)| (*e, *r))
        .collect();
    if pairs.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "{} usable (epsilon, error) pairs; at least 3 needed",
            pairs.len()
        )));
    }
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    let pts: Vec<(f64, f64)> = pairs[..3].iter().map(|(e, r)| (e.ln(), r.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::InsufficientData("the three smallest epsilons coincide".into()));
    }
    Ok(sxy / sxx)
}

/// Result of [`l2_profile_check`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct L2Report {
    /// `∫ (u^ZD)² dx`.
    pub norm_uzd_sq: f64,
    /// `∫ u0² dx`.
    pub norm_u0_sq: f64,
    pub rel_gap: f64,
    /// Caustic points inside the window, each excluded with a `δ`-neighbourhood.
    pub caustics: Vec<f64>,
}

/// Options of [`l2_profile_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct L2Options {
    /// Half-width of the neighbourhoods of caustic points left out.
    pub delta: f64,
    /// Number of points of the `J` scan over the window.
    pub scan_points: usize,
    pub max_intervals: usize,
}

impl Default for L2Options {
    fn default() -> Self {
        Self { delta: 1e-3, scan_points: 2000, max_intervals: 200_000 }
    }
}

/// `∫_{-∞}^{y} u0² dy'` (`upper = false`) or `∫_y^{∞}` (`upper = true`),
/// by the substitution `y' = y ± s·tan φ`.
fn u0_sq_half_line(data: &RationalInitialData, y: f64, upper: bool, tol: f64) -> Result<f64> {
    let s = data.scale();
    let sign = if upper { 1.0 } else { -1.0 };
    let f = |phi: f64| {
        let c = phi.cos();
        if c <= 0.0 {
            return 0.0;
        }
        let v = data.eval_u0(y + sign * s * phi.tan());
        v * v * s / (c * c)
    };
    Ok(quad::integrate(f, 0.0, std::f64::consts::FRAC_PI_2, tol, tol, 100_000)?.0)
}

/// Compares `∫ (u^ZD)² dx` with `∫ u0² dx` at time `t`.
///
/// Inside `window` the profile is integrated adaptively, leaving out
/// `δ`-neighbourhoods of the caustic points.  Outside the window `J = 0`,
/// `u^ZD = u0(y)` with `x = y + 2t·u0(y)`, and the tails are integrated
/// exactly in `y`: `∫ u0²(1 + 2t·u0′) dy = ∫ u0² dy + (2t/3)[u0³]`.
pub fn l2_profile_check(
    data: &RationalInitialData,
    t: f64,
    epsilon: f64,
    window: (f64, f64),
    quad_tol: f64,
    opts: &L2Options,
) -> Result<L2Report> {
    let (a, b) = window;
    if !(t > 0.0) {
        return Err(Error::NonPositiveTime(t));
    }
    if !(b > a) || !(epsilon > 0.0) || !(quad_tol > 0.0) || !(opts.delta > 0.0) {
        return Err(Error::InvalidConfig("l2_profile_check needs a < b and positive epsilon, tol, delta".into()));
    }
    let caustics: Vec<f64> = branches::caustic_points(data, t)?;
    for &x in &caustics {
        if x - opts.delta <= a || x + opts.delta >= b {
            return Err(Error::InvalidConfig(format!("caustic at x = {x} is not inside the window")));
        }
    }
    // J scan (the caustic points themselves are skipped).
    let n = opts.scan_points.max(2);
    for k in 0..=n {
        let x = a + (b - a) * k as f64 / n as f64;
        if caustics.iter().any(|c| (x - c).abs() < opts.delta) {
            continue;
        }
        let br = solve_branches(data, LaxOleinikPoint::new(t, x)?)?;
        if br.j >= 2 {
            return Err(Error::JTooLarge { j: br.j, x });
        }
    }

    let f = |x: f64| -> f64 {
        match LaxOleinikPoint::new(t, x).and_then(|pt| {
            let br = solve_branches(data, pt)?;
            u_zd_from_branches(data, pt, &br, epsilon)
        }) {
            Ok(u) => u * u,
            Err(_) => f64::NAN,
        }
    };
    let mut cuts = vec![a];
    for &c in &caustics {
        cuts.push(c - opts.delta);
        cuts.push(c + opts.delta);
    }
    cuts.push(b);
    let mut inside = 0.0;
    for w in cuts.chunks(2) {
        let (v, _) = quad::integrate(f, w[0], w[1], quad_tol, quad_tol, opts.max_intervals)?;
        if !v.is_finite() {
            return Err(Error::QuadratureFailure(format!("profile evaluation failed on [{}, {}]", w[0], w[1])));
        }
        inside += v;
    }

    let root_at = |x: f64| -> Result<f64> {
        let br = solve_branches(data, LaxOleinikPoint::new(t, x)?)?;
        if br.j != 0 {
            return Err(Error::InvalidConfig(format!("window end x = {x} is inside the oscillatory region")));
        }
        Ok(br.real_roots[0])
    };
    let ya = root_at(a)?;
    let yb = root_at(b)?;
    let cube = |y: f64| data.eval_u0(y).powi(3);
    let left = u0_sq_half_line(data, ya, false, quad_tol)? + 2.0 * t / 3.0 * cube(ya);
    let right = u0_sq_half_line(data, yb, true, quad_tol)? - 2.0 * t / 3.0 * cube(yb);
    let norm_uzd_sq = inside + left + right;

    let norm_u0_sq = u0_sq_half_line(data, 0.0, false, quad_tol)? + u0_sq_half_line(data, 0.0, true, quad_tol)?;
    Ok(L2Report {
        norm_uzd_sq,
        norm_u0_sq,
        rel_gap: (norm_uzd_sq - norm_u0_sq).abs() / norm_u0_sq,
        caustics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_laws() {
        let eps = [0.1, 0.05, 0.025, 0.0125];
        let lin: Vec<f64> = eps.iter().map(|e| 3.0 * e).collect();
        let quad: Vec<f64> = eps.iter().map(|e| 0.5 * e * e).collect();
        assert!((loglog_slope_pairs(&eps, &lin).unwrap() - 1.0).abs() < 1e-12);
        assert!((loglog_slope_pairs(&eps, &quad).unwrap() - 2.0).abs() < 1e-12);
        assert!(matches!(loglog_slope_pairs(&eps[..2], &lin[..2]), Err(Error::InsufficientData(_))));
    }
}
