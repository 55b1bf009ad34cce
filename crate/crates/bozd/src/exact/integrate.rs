//! Row integrals along the constructed contours and the determinant ratio.

use std::f64::consts::PI;
use std::ops::Range;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::flow::{ContourPath, ContourRole, ContourSet};
use super::{one_minus_exp, ScaledC, SolverConfig};
use crate::error::{Error, Result};
use crate::quad::{integrate_vec, VecIntegrand};
use crate::rational::{LaxOleinikPoint, RationalInitialData, C64};

/// Prefactor `f` of a contour integral `∫ f(z) e^{−ih(z)/ε} dz`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IntegrandKind {
    One,
    U0,
    /// `1/(z − p_k)` with `k` zero-based.
    InvPole(usize),
}

impl IntegrandKind {
    fn column(self) -> usize {
        match self {
            IntegrandKind::One => 0,
            IntegrandKind::U0 => 1,
            IntegrandKind::InvPole(k) => 2 + k,
        }
    }
}

/// All `N + 2` prefactors at once on the segments of one path, scaled by
/// `e^{−H_ref/ε}`.
struct RowIntegrand<'a> {
    data: &'a RationalInitialData,
    pt: LaxOleinikPoint,
    path: &'a ContourPath,
    eps: f64,
    h_ref: f64,
}

impl VecIntegrand for RowIntegrand<'_> {
    fn dim(&self) -> usize {
        self.data.n() + 2
    }

    fn eval(&self, tag: usize, s: f64, out: &mut [C64]) {
        let a = self.path.nodes[tag];
        let d = self.path.nodes[tag + 1] - a;
        let z = a + d * s;
        let h = self.path.h_values[tag] + self.data.h_increment(self.pt, a, z);
        // e^{−ih/ε} = e^{(Im h − i Re h)/ε}
        let e = C64::from_polar(((h.im - self.h_ref) / self.eps).exp(), -h.re / self.eps) * d;
        out[0] = e;
        out[1] = self.data.u0_complex(z) * e;
        for (k, p) in self.data.poles().iter().enumerate() {
            out[2 + k] = e / (z - p);
        }
    }
}

/// Integrates all prefactors over the segments `range` of `path`.
fn integrate_segments(
    data: &RationalInitialData,
    pt: LaxOleinikPoint,
    path: &ContourPath,
    range: Range<usize>,
    eps: f64,
    cfg: &SolverConfig,
) -> Result<Vec<ScaledC>> {
    let dim = data.n() + 2;
    if range.is_empty() {
        return Ok(vec![ScaledC::ZERO; dim]);
    }
    let weight = |z: C64| {
        let mut w = 1.0f64.max(data.u0_complex(z).norm());
        for p in data.poles() {
            w = w.max(1.0 / (z - p).norm());
        }
        w.ln()
    };
    // Per segment: (max level, max weighted level) over five samples.
    let levels: Vec<(f64, f64)> = range
        .clone()
        .map(|k| {
            let a = path.nodes[k];
            let d = path.nodes[k + 1] - a;
            let mut m = f64::NEG_INFINITY;
            let mut mw = f64::NEG_INFINITY;
            for s in [0.0, 0.25, 0.5, 0.75, 1.0] {
                let z = a + d * s;
                let h = (path.h_values[k] + data.h_increment(pt, a, z)).im;
                m = m.max(h);
                mw = mw.max(h + eps * weight(z));
            }
            (m, mw)
        })
        .collect();
    let gmax = levels.iter().map(|l| l.1).fold(f64::NEG_INFINITY, f64::max);
    let cut = gmax + eps * cfg.truncation.ln();
    let mut pieces = Vec::new();
    let mut h_ref = f64::NEG_INFINITY;
    for (k, l) in range.zip(&levels) {
        if l.1 >= cut {
            pieces.push((k, 0.0, 1.0));
            h_ref = h_ref.max(l.0);
        }
    }
    let f = RowIntegrand { data, pt, path, eps, h_ref };
    let (rough, _) = integrate_vec(&f, &pieces, f64::INFINITY, cfg.max_quad_intervals)?;
    let size = rough.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let abs_tol = cfg.quad_tol * size.max(1e-3 * eps.sqrt());
    let (v, _) = integrate_vec(&f, &pieces, abs_tol, cfg.max_quad_intervals).map_err(|e| match e {
        Error::QuadratureFailure(m) => Error::QuadratureFailure(format!("{}: {m}", path.role)),
        other => other,
    })?;
    Ok(v.into_iter().map(|m| ScaledC::new(m, h_ref / eps)).collect())
}

/// The row `(∫ f e^{−ih/ε})_f` of one contour, in log-scaled form.
fn row(
    data: &RationalInitialData,
    pt: LaxOleinikPoint,
    path: &ContourPath,
    eps: f64,
    cfg: &SolverConfig,
) -> Result<Vec<ScaledC>> {
    let nseg = path.nodes.len() - 1;
    match (path.role, path.loop_start) {
        (ContourRole::Wn(n), Some(ls)) => {
            let leg = integrate_segments(data, pt, path, 0..ls, eps, cfg)?;
            let lp = integrate_segments(data, pt, path, ls..nseg, eps, cfg)?;
            let c = data.residues()[n - 1];
            // The leg is traversed outwards on the principal sheet and back
            // on the sheet where e^{−ih/ε} has gained μ_n = e^{2π c_n/ε}.
            let factor = one_minus_exp(c * (2.0 * PI / eps));
            Ok(leg.into_iter().zip(lp).map(|(l, o)| factor.mul(l).add(o)).collect())
        }
        _ => integrate_segments(data, pt, path, 0..nseg, eps, cfg),
    }
}

/// A single contour integral `∫_path f(z) e^{−ih(z)/ε} dz`.
pub fn contour_integral(
    data: &RationalInitialData,
    pt: LaxOleinikPoint,
    path: &ContourPath,
    kind: IntegrandKind,
    eps: f64,
    cfg: &SolverConfig,
) -> Result<ScaledC> {
    if let IntegrandKind::InvPole(k) = kind {
        if k >= data.n() {
            return Err(Error::InvalidConfig(format!("pole index {k} out of range")));
        }
    }
    Ok(row(data, pt, path, eps, cfg)?[kind.column()])
}

/// The row of one contour scaled so that its largest entry has modulus 1.
pub(crate) fn normalized_row(
    data: &RationalInitialData,
    pt: LaxOleinikPoint,
    path: &ContourPath,
    eps: f64,
    cfg: &SolverConfig,
) -> Result<Vec<C64>> {
    let r = row(data, pt, path, eps, cfg)?;
    let smax = r.iter().map(|v| v.ln_abs()).fold(f64::NEG_INFINITY, f64::max);
    if !smax.is_finite() {
        return Err(Error::SingularB);
    }
    let mut vals: Vec<C64> = r.iter().map(|v| v.to_c64_shifted(smax)).collect();
    let m = vals.iter().map(|v| v.norm()).fold(0.0, f64::max);
    for v in vals.iter_mut() {
        *v /= m;
    }
    Ok(vals)
}

fn matrices(rows: &[&[C64]]) -> (DMatrix<C64>, DMatrix<C64>) {
    let n = rows.len() - 1;
    let mut a = DMatrix::<C64>::zeros(n + 1, n + 1);
    let mut b = DMatrix::<C64>::zeros(n + 1, n + 1);
    for (i, vals) in rows.iter().enumerate() {
        a[(i, 0)] = vals[1];
        b[(i, 0)] = vals[0];
        for k in 0..n {
            a[(i, k + 1)] = vals[2 + k];
            b[(i, k + 1)] = vals[2 + k];
        }
    }
    (a, b)
}

/// 2-norm condition number of the denominator matrix built from `rows`.
pub(crate) fn conditioning(rows: &[&[C64]]) -> f64 {
    let (_, b) = matrices(rows);
    let sv = b.singular_values();
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if min > 0.0 {
        max / min
    } else {
        f64::INFINITY
    }
}

/// `u = 2 Re(det A / det B)` from normalized rows.
pub(crate) fn ratio(rows: &[&[C64]]) -> Result<f64> {
    let (a, b) = matrices(rows);
    let hadamard: f64 = b.row_iter().map(|r| r.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()).product();
    let db = b.lu().determinant();
    if !(db.norm() > 1e-14 * hadamard) {
        return Err(Error::SingularB);
    }
    let da = a.lu().determinant();
    let u = 2.0 * (da / db).re;
    if !u.is_finite() {
        return Err(Error::SingularB);
    }
    Ok(u)
}

/// `u` and the conditioning of the denominator from all contours of `set`.
pub(crate) fn u_from_contours(
    data: &RationalInitialData,
    set: &ContourSet,
    eps: f64,
    cfg: &SolverConfig,
) -> Result<(f64, f64)> {
    let rows = set
        .paths
        .iter()
        .map(|p| normalized_row(data, set.pt, p, eps, cfg))
        .collect::<Result<Vec<_>>>()?;
    let refs: Vec<&[C64]> = rows.iter().map(|r| r.as_slice()).collect();
    Ok((ratio(&refs)?, conditioning(&refs)))
}
