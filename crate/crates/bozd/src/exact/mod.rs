//! Exact solution `u(t, x; ε) = 2 Re(det A / det B)` by contour integrals.
//!
//! The rows of `A` and `B` are integrals of `f(z) e^{−ih(z)/ε}` with
//! `f ∈ {u0, 1, 1/(z − p_k)}` over `N+1` contours: `W_0`, equivalent to the
//! real line with its ends turned into the valleys of `Re(−ih)` at angles
//! `3π/4` and `−π/4`, and `W_n`, a loop based in the `3π/4` valley that
//! encircles `p_n` once counterclockwise.  Any basis of these cycles gives
//! the same ratio, since a change of basis multiplies `A` and `B` on the left
//! by the same invertible matrix.
//!
//! The contours are obtained by deforming simple initial curves along the
//! descent flow of `Re(−ih)` (see [`flow`]), never letting a segment sweep
//! across a pole, and are accepted only after a dominance check: every point
//! of the contour within `δ/2` of the contour maximum must lie near a
//! critical point of `h`.  `h` is carried along each contour by exact
//! continuation along straight segments, so branch cuts never appear.
//!
//! A loop `W_n` is stored as a leg from the base point to a point `q_n` near
//! `p_n`, followed by a closed loop around `p_n`.  Returning along the leg on
//! the next sheet multiplies the integrand by `μ_n = e^{2πc_n/ε}`, so the
//! row is `(1 − μ_n)·∫_leg + ∫_loop`.  Rows are assembled in log-scaled
//! arithmetic ([`ScaledC`]) because `μ_n` and `e^{−ih/ε}` overflow doubles
//! for small `ε`.

mod flow;
mod integrate;
mod nonspecial;
mod trace;

use serde::{Deserialize, Serialize};

pub use flow::{perturb, revalidate, ContourPath, ContourRole, ContourSet, ValidationReport};
pub use integrate::{contour_integral, IntegrandKind};
pub use nonspecial::{nonspecial_check, NonspecialReport, TriState};
pub use trace::{escape_radius, trace_level_curve, trace_steepest_descent, Trace, TraceOptions, TraceStop};

use crate::error::{Error, Result};
use crate::rational::{LaxOleinikPoint, RationalInitialData, C64};

/// A warm-started contour set is kept only while the row-normalized
/// denominator matrix has at most this condition number.
const WARM_CONDITION_LIMIT: f64 = 1e4;

/// Log-scaled complex number `m·e^{s}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledC {
    pub m: C64,
    pub s: f64,
}

impl ScaledC {
    pub const ZERO: ScaledC = ScaledC { m: C64 { re: 0.0, im: 0.0 }, s: 0.0 };

    pub fn new(m: C64, s: f64) -> Self {
        Self { m, s }.normalized()
    }

    /// `e^{a}` for complex `a`, without overflow.
    pub fn exp(a: C64) -> Self {
        Self { m: C64::from_polar(1.0, a.im), s: a.re }
    }

    fn normalized(self) -> Self {
        let n = self.m.norm();
        if n == 0.0 || !n.is_finite() {
            return Self { m: self.m, s: if n == 0.0 { 0.0 } else { self.s } };
        }
        Self { m: self.m / n, s: self.s + n.ln() }
    }

    /// Natural log of the modulus (`−∞` for zero).
    pub fn ln_abs(&self) -> f64 {
        let n = self.m.norm();
        if n == 0.0 {
            f64::NEG_INFINITY
        } else {
            self.s + n.ln()
        }
    }

    pub fn mul(self, o: ScaledC) -> Self {
        Self { m: self.m * o.m, s: self.s + o.s }.normalized()
    }

    pub fn add(self, o: ScaledC) -> Self {
        if self.m.norm() == 0.0 {
            return o;
        }
        if o.m.norm() == 0.0 {
            return self;
        }
        let s = self.s.max(o.s);
        Self {
            m: self.m * (self.s - s).exp() + o.m * (o.s - s).exp(),
            s,
        }
        .normalized()
    }

    /// Value rescaled by `e^{−shift}` as a plain complex number.
    pub fn to_c64_shifted(&self, shift: f64) -> C64 {
        if self.m.norm() == 0.0 {
            return C64::new(0.0, 0.0);
        }
        self.m * (self.s - shift).exp()
    }
}

/// `1 − e^{a}` in log-scaled form.
pub fn one_minus_exp(a: C64) -> ScaledC {
    if a.re > 30.0 {
        // 1 − e^a = −e^a (1 − e^{−a})
        let m = -(C64::new(1.0, 0.0) - (-a).exp());
        ScaledC::exp(a).mul(ScaledC::new(m, 0.0))
    } else {
        ScaledC::new(C64::new(1.0, 0.0) - a.exp(), 0.0)
    }
}

/// User-supplied contour overriding the automatic construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManualPath {
    /// `"W0"` or `"W<n>"` with `n = 1..N`.
    pub role: String,
    /// Nodes `[re, im]` of the polyline.
    pub nodes: Vec<[f64; 2]>,
    /// For a loop `W_n`: index of the node where the leg ends and the closed
    /// loop around `p_n` begins (the last node must coincide with it).
    #[serde(default)]
    pub loop_start: Option<usize>,
}

/// Numerical parameters of the exact solver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    /// Relative quadrature tolerance, in `(0, 1e−6]`.
    pub quad_tol: f64,
    /// Relative integrand floor below which contour pieces are skipped, in
    /// `(0, 1e−8]`.
    pub truncation: f64,
    /// Level offset `δ` (in units of `h`) of the dominance check.
    pub delta: f64,
    /// Contours to use instead of the automatic construction.
    pub manual_paths: Option<Vec<ManualPath>>,
    /// Iteration budget of the descent flow.
    pub max_flow_iterations: usize,
    /// Node budget per contour.
    pub max_nodes: usize,
    /// Subinterval budget per adaptive integral.
    pub max_quad_intervals: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            quad_tol: 1e-10,
            truncation: 1e-16,
            delta: 0.05,
            manual_paths: None,
            max_flow_iterations: 4000,
            max_nodes: 20_000,
            max_quad_intervals: 400_000,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.quad_tol > 0.0 && self.quad_tol <= 1e-6) {
            return Err(Error::InvalidConfig(format!("quad_tol must lie in (0, 1e-6], got {}", self.quad_tol)));
        }
        if !(self.truncation > 0.0 && self.truncation <= 1e-8) {
            return Err(Error::InvalidConfig(format!(
                "truncation must lie in (0, 1e-8], got {}",
                self.truncation
            )));
        }
        if !(self.delta > 0.0) {
            return Err(Error::InvalidConfig(format!("delta must be positive, got {}", self.delta)));
        }
        Ok(())
    }
}

/// Result of one exact evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactEvaluation {
    pub u: f64,
    /// `ε` actually used (differs from the request when it was nudged off an
    /// exceptional value).
    pub epsilon_used: f64,
    /// Condition number of the row-normalized denominator matrix.
    pub conditioning: f64,
    pub warnings: Vec<String>,
}

/// Exact solver bound to one set of initial data.
#[derive(Debug, Clone)]
pub struct ExactSolver {
    data: RationalInitialData,
    config: SolverConfig,
}

impl ExactSolver {
    pub fn new(data: RationalInitialData, config: SolverConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self { data, config })
    }

    pub fn data(&self) -> &RationalInitialData {
        &self.data
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    /// Builds and validates the contours `W_0 … W_N` at `pt`.
    ///
    /// `eps_ref` is the largest `ε` the contours will be used with; it only
    /// sets the level below which contour pieces count as negligible.  A
    /// previous contour set (typically from a neighbouring `x`) may be given
    /// as a warm start; it is reflowed and revalidated, and kept only if the
    /// denominator matrix stays well conditioned.  Otherwise every candidate
    /// homotopy class of the loops is flowed and the best-conditioned
    /// combination is kept.
    pub fn build_contours(
        &self,
        pt: LaxOleinikPoint,
        eps_ref: f64,
        warm: Option<&ContourSet>,
    ) -> Result<ContourSet> {
        if let Some(manual) = &self.config.manual_paths {
            let mut set = flow::from_manual(&self.data, pt, eps_ref, &self.config, manual)?;
            set.conditioning = integrate::u_from_contours(&self.data, &set, eps_ref, &self.config)
                .ok()
                .map(|r| r.1);
            return Ok(set);
        }
        if let Some(w) = warm {
            if let Ok(mut set) = flow::reflow(&self.data, pt, eps_ref, &self.config, w) {
                if let Ok((_, cond)) = integrate::u_from_contours(&self.data, &set, eps_ref, &self.config) {
                    if cond <= WARM_CONDITION_LIMIT {
                        set.conditioning = Some(cond);
                        return Ok(set);
                    }
                }
            }
        }
        self.cold_build(pt, eps_ref)
    }

    fn cold_build(&self, pt: LaxOleinikPoint, eps_ref: f64) -> Result<ContourSet> {
        let cand = flow::build_candidates(&self.data, pt, eps_ref, &self.config)?;
        let rows: Vec<Vec<Option<Vec<C64>>>> = cand
            .rows
            .iter()
            .map(|list| {
                list.iter()
                    .map(|(p, _)| integrate::normalized_row(&self.data, pt, p, eps_ref, &self.config).ok())
                    .collect()
            })
            .collect();
        let radix: Vec<usize> = rows.iter().map(|r| r.len()).collect();
        let mut idx = vec![0usize; radix.len()];
        let mut best: Option<(f64, Vec<usize>)> = None;
        loop {
            let chosen: Option<Vec<&[C64]>> = idx
                .iter()
                .enumerate()
                .map(|(i, &k)| rows[i][k].as_deref())
                .collect();
            if let Some(chosen) = chosen {
                let cond = integrate::conditioning(&chosen);
                if cond.is_finite() && best.as_ref().is_none_or(|b| cond < b.0) {
                    best = Some((cond, idx.clone()));
                }
            }
            // Mixed-radix increment.
            let mut d = 0;
            while d < idx.len() {
                idx[d] += 1;
                if idx[d] < radix[d] {
                    break;
                }
                idx[d] = 0;
                d += 1;
            }
            if d == idx.len() {
                break;
            }
        }
        let (cond, choice) = best.ok_or_else(|| {
            Error::ContourConstructionFailure("no combination of candidate contours gives a nonsingular denominator".into())
        })?;
        let mut paths = Vec::new();
        let mut reports = Vec::new();
        for (i, k) in choice.into_iter().enumerate() {
            let (p, r) = cand.rows[i][k].clone();
            paths.push(p);
            reports.push(r);
        }
        Ok(ContourSet {
            pt,
            eps_ref,
            paths,
            critical_points: cand.critical_points,
            reports,
            iterations: cand.iterations,
            conditioning: Some(cond),
        })
    }

    /// Evaluates `u` from contours built for `ε ≤ eps_ref`.
    pub fn evaluate(&self, contours: &ContourSet, epsilon: f64) -> Result<ExactEvaluation> {
        let mut warnings = Vec::new();
        let eps = self.nudge_epsilon(epsilon, &mut warnings);
        let (u, conditioning) = integrate::u_from_contours(&self.data, contours, eps, &self.config)?;
        Ok(ExactEvaluation { u, epsilon_used: eps, conditioning, warnings })
    }

    /// `u(t, x; ε)` with freshly built contours.
    pub fn u_exact(&self, pt: LaxOleinikPoint, epsilon: f64) -> Result<f64> {
        let c = self.build_contours(pt, epsilon, None)?;
        Ok(self.evaluate(&c, epsilon)?.u)
    }

    /// `u(t, x; ε)` for several `ε` with one contour construction.
    pub fn u_exact_multi(
        &self,
        pt: LaxOleinikPoint,
        epsilons: &[f64],
        warm: Option<&ContourSet>,
    ) -> Result<(Vec<f64>, ContourSet)> {
        let eps_ref = epsilons.iter().copied().fold(0.0, f64::max);
        let c = self.build_contours(pt, eps_ref, warm)?;
        let u = epsilons
            .iter()
            .map(|&e| self.evaluate(&c, e).map(|r| r.u))
            .collect::<Result<Vec<_>>>()?;
        Ok((u, c))
    }

    /// Moves `ε` off the exceptional set `c_n/(iε) ∈ ℕ` (relative `1e−9`).
    fn nudge_epsilon(&self, epsilon: f64, warnings: &mut Vec<String>) -> f64 {
        let mut eps = epsilon;
        for _ in 0..4 {
            let hit = self.data.residues().iter().enumerate().find(|(_, c)| {
                let q = **c / C64::new(0.0, eps);
                let m = q.re.round();
                m >= 1.0 && (q - C64::new(m, 0.0)).norm() <= 1e-9 * q.norm()
            });
            match hit {
                Some((n, _)) => {
                    warnings.push(format!(
                        "c_{} / (i*epsilon) is a positive integer at epsilon = {eps}; epsilon nudged by a relative 1e-9",
                        n + 1
                    ));
                    eps *= 1.0 + 1e-9;
                }
                None => break,
            }
        }
        eps
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_basis_independence() {
        let data = RationalInitialData::two_pole_fixture();
        let cfg = SolverConfig::default();
        let pt = LaxOleinikPoint::new(4.5, 4.0).unwrap();
        let eps = 1.0 / 32.0;
        let cand = flow::build_candidates(&data, pt, eps, &cfg).unwrap();
        let rows: Vec<Vec<Vec<C64>>> = cand
            .rows
            .iter()
            .map(|l| l.iter().map(|(p, _)| integrate::normalized_row(&data, pt, p, eps, &cfg).unwrap()).collect())
            .collect();
        let mut values = Vec::new();
        for a in 0..rows[1].len() {
            for b in 0..rows[2].len() {
                let r: Vec<&[C64]> = vec![&rows[0][0], &rows[1][a], &rows[2][b]];
                let cond = integrate::conditioning(&r);
                if cond < 1e6 {
                    values.push((integrate::ratio(&r).unwrap(), cond));
                }
            }
        }
        assert!(values.len() >= 2);
        for v in &values {
            assert!((v.0 - values[0].0).abs() < 1e-8, "{values:?}");
        }
    }

    #[test]
    fn scaled_arithmetic() {
        let a = ScaledC::exp(C64::new(800.0, 0.3));
        let b = ScaledC::exp(C64::new(799.0, 0.3));
        let s = a.add(b);
        assert!((s.ln_abs() - (800.0 + (1.0 + (-1.0f64).exp()).ln())).abs() < 1e-12);
        let p = a.mul(ScaledC::exp(C64::new(-800.0, -0.3)));
        assert!((p.to_c64_shifted(0.0) - C64::new(1.0, 0.0)).norm() < 1e-12);
        let o = one_minus_exp(C64::new(100.0, 1.0));
        assert!((o.ln_abs() - 100.0).abs() < 1e-12);
    }
}
