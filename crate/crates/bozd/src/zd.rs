//! The zero-dispersion profile `u^ZD(t, x; ε)`.
//!
//! Inside a region with `J` phases the profile is a `J`-phase wave whose
//! parameters are built from the Burgers branches:
//!
//! * nonlinear phases `θ_j = h(y_{2j−1}) − h(y_{2j})`;
//! * phase corrections `φ_j = π/2 + Φ(y_{2j−1}) − Φ(y_{2j})`;
//! * moduli `|γ_j|` from the multi-phase constraint with `R_k = u_k`;
//! * `u^ZD = u_0 + Σ_j (u_{2j−1} − u_{2j}) − 2ε Im ∂x log det M`, with
//!   `M_jk = γ_j e^{iθ_j/ε} δ_jk + 1/(u_{2j−1} − u_{2k})`.
//!
//! For `J = 1` the authoritative output is the closed form
//! `u_0 + (u_2 − u_1) U_r(θ/ε + φ)`, `r = √((u_1 − u_0)/(u_2 − u_0))`.
//!
//! With the branch values ascending, `κ_j = u_{2j−1} − u_{2j}` is negative;
//! the formulas are used literally with that sign.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::branches::{self, BranchData};
use crate::error::{Error, Result};
use crate::quad;
use crate::rational::{LaxOleinikPoint, RationalInitialData, C64};

/// Modulation parameters of the profile at one point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZDProfileParams {
    pub branches: BranchData,
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
    pub gamma_abs: Vec<f64>,
    /// `κ_j = u_{2j−1} − u_{2j}` (negative with ascending branch values).
    pub kappa: Vec<f64>,
    /// `ω_j = u_{2j−1}² − u_{2j}²`.
    pub omega: Vec<f64>,
}

/// The `J×J` matrix `M(t, x; ε)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModulationMatrix {
    pub m: DMatrix<C64>,
    pub epsilon: f64,
}

/// `U_r(θ) = (1 − r²)/(1 + r² − 2r cos θ)` in the cancellation-free form.
pub fn u_r(r: f64, theta: f64) -> f64 {
    let s = (0.5 * theta).sin();
    (1.0 - r * r) / ((1.0 - r) * (1.0 - r) + 4.0 * r * s * s)
}

/// Fourier coefficient of `U_r^p` (`p ∈ {1, 2}`):
/// `r^{|n|}·(|n| + (1+r²)/(1−r²))^{p−1}`.
pub fn fourier_coeff_ur(r: f64, n: i32, p: u32) -> f64 {
    let a = n.unsigned_abs() as f64;
    r.powf(a) * (a + (1.0 + r * r) / (1.0 - r * r)).powi(p as i32 - 1)
}

/// `θ_j = h(y_{2j−1}) − h(y_{2j})`, `j = 1..J`.
pub fn nonlinear_phases(
    data: &RationalInitialData,
    pt: LaxOleinikPoint,
    branches: &BranchData,
) -> Result<Vec<f64>> {
    let y = &branches.real_roots;
    (1..=branches.j)
        .map(|j| Ok(data.eval_h_real(pt, y[2 * j - 1])? - data.eval_h_real(pt, y[2 * j])?))
        .collect()
}

/// `Φ(y) = Σ_n Arg(y − p_n) − Σ_m Arg(y − z_m)`.
pub fn phi_closed_form(data: &RationalInitialData, branches: &BranchData, y: f64) -> f64 {
    let a: f64 = data.poles().iter().map(|p| (y - p).arg()).sum();
    let b: f64 = branches.complex_roots.iter().map(|z| (y - z).arg()).sum();
    a - b
}

/// `ln g(y)` with `g(y) = Π_m |y − z_m|² / Π_n |y − p_n|²`, the ratio of the
/// characteristic factor to its real-root factors.
pub fn ln_g(data: &RationalInitialData, branches: &BranchData, y: f64) -> f64 {
    let a: f64 = branches
        .complex_roots
        .iter()
        .map(|z| (y - z).norm_sqr().ln())
        .sum();
    let b: f64 = data.poles().iter().map(|p| (y - p).norm_sqr().ln()).sum();
    a - b
}

/// `Φ(y) = −Jπ/2 + (1/2π) ∫_0^∞ ln(g(y−s)/g(y+s)) ds/s`, evaluated with
/// `s = u/(1−u)` and adaptive quadrature on `u ∈ (0, 1)`.
pub fn phi_integral_form(data: &RationalInitialData, branches: &BranchData, y: f64) -> Result<f64> {
    let f = |u: f64| {
        let s = u / (1.0 - u);
        let l = ln_g(data, branches, y - s) - ln_g(data, branches, y + s);
        l / (u * (1.0 - u))
    };
    let (v, _) = quad::integrate(f, 0.0, 1.0, 1e-13, 1e-12, 20_000)?;
    Ok(-(branches.j as f64) * FRAC_PI_2 + v / (2.0 * PI))
}

/// `φ_j = π/2 + Φ(y_{2j−1}) − Φ(y_{2j})` with the closed-form `Φ`.
pub fn phase_corrections(data: &RationalInitialData, branches: &BranchData) -> Vec<f64> {
    let y = &branches.real_roots;
    (1..=branches.j)
        .map(|j| FRAC_PI_2 + phi_closed_form(data, branches, y[2 * j - 1]) - phi_closed_form(data, branches, y[2 * j]))
        .collect()
}

/// `|γ_j|²` of the multi-phase constraint for ordered `R_0 < … < R_{2J}`.
pub fn gamma_modulus_sq(r: &[f64]) -> Vec<f64> {
    let jj = (r.len() - 1) / 2;
    (1..=jj)
        .map(|j| {
            let (a, b) = (r[2 * j - 1], r[2 * j]);
            let mut num = -(b - r[0]);
            let mut den = a - r[0];
            for k in 1..=jj {
                if k != j {
                    num *= a - r[2 * k - 1];
                    num *= b - r[2 * k];
                }
                den *= b - r[2 * k - 1];
                den *= a - r[2 * k];
            }
            num / den
        })
        .collect()
}

/// `|γ_j|`, failing when the constraint does not give a positive value.
pub fn gamma_modulus(r: &[f64]) -> Result<Vec<f64>> {
    gamma_modulus_sq(r)
        .into_iter()
        .enumerate()
        .map(|(i, g2)| {
            if g2 > 0.0 && g2.is_finite() {
                Ok(g2.sqrt())
            } else {
                Err(Error::NonPositiveModulus { index: i + 1, value: g2 })
            }
        })
        .collect()
}

/// All modulation parameters at a point with known branches.
pub fn profile_params(
    data: &RationalInitialData,
    pt: LaxOleinikPoint,
    branches: &BranchData,
) -> Result<ZDProfileParams> {
    let u = &branches.branch_values;
    let kappa: Vec<f64> = (1..=branches.j).map(|j| u[2 * j - 1] - u[2 * j]).collect();
    let omega: Vec<f64> = (1..=branches.j)
        .map(|j| u[2 * j - 1] * u[2 * j - 1] - u[2 * j] * u[2 * j])
        .collect();
    Ok(ZDProfileParams {
        theta: nonlinear_phases(data, pt, branches)?,
        phi: phase_corrections(data, branches),
        gamma_abs: gamma_modulus(u)?,
        kappa,
        omega,
        branches: branches.clone(),
    })
}

fn coupling(u: &[f64], j: usize, k: usize) -> f64 {
    1.0 / (u[2 * j + 1] - u[2 * k + 2])
}

/// `M_jk = γ_j e^{iθ_j/ε} δ_jk + 1/(u_{2j−1} − u_{2k})`.
pub fn build_m(params: &ZDProfileParams, epsilon: f64) -> Result<ModulationMatrix> {
    let jj = params.branches.j;
    let u = &params.branches.branch_values;
    let m = DMatrix::from_fn(jj, jj, |j, k| {
        let mut v = C64::new(coupling(u, j, k), 0.0);
        if j == k {
            v += C64::from_polar(params.gamma_abs[j], params.phi[j] + params.theta[j] / epsilon);
        }
        v
    });
    let det = m.clone().lu().determinant().norm();
    let scale: f64 = u.iter().map(|x| x.abs()).fold(1.0, f64::max);
    if !(det > 1e-12 * scale.powi(-(jj as i32))) {
        return Err(Error::SingularM(det));
    }
    Ok(ModulationMatrix { m, epsilon })
}

fn log_det_derivative(m: &DMatrix<C64>, dm: &DMatrix<C64>) -> Result<C64> {
    let lu = m.clone().lu();
    let x = lu.solve(dm).ok_or(Error::SingularM(0.0))?;
    Ok(x.trace())
}

/// Fast part of `∂x M`: `(iκ_j/ε) γ_j e^{iθ_j/ε}` on the diagonal.
fn fast_derivative(params: &ZDProfileParams, epsilon: f64) -> DMatrix<C64> {
    let jj = params.branches.j;
    DMatrix::from_fn(jj, jj, |j, k| {
        if j == k {
            C64::new(0.0, params.kappa[j] / epsilon)
                * C64::from_polar(params.gamma_abs[j], params.phi[j] + params.theta[j] / epsilon)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Evaluates the zero-dispersion profile from known branches.
pub fn u_zd_from_branches(
    data: &RationalInitialData,
    pt: LaxOleinikPoint,
    branches: &BranchData,
    epsilon: f64,
) -> Result<f64> {
    let u = &branches.branch_values;
    match branches.j {
        0 => Ok(u[0]),
        1 => {
            let th = nonlinear_phases(data, pt, branches)?[0];
            let ph = phase_corrections(data, branches)[0];
            let r = ((u[1] - u[0]) / (u[2] - u[0])).sqrt();
            Ok(u[0] + (u[2] - u[1]) * u_r(r, th / epsilon + ph))
        }
        _ => u_zd_determinant(data, pt, branches, epsilon, true),
    }
}

/// The profile with the fast phases `ψ_j = φ_j + θ_j/ε` replaced by
/// arbitrary values: `u_0 + Σ κ_j − 2 Im tr(M⁻¹ K)` with
/// `M_jj = |γ_j| e^{iψ_j} + 1/(u_{2j−1} − u_{2j})`, `K = diag(iκ_j |γ_j| e^{iψ_j})`.
/// Averaging over the torus of phases gives the weak limit.
pub fn u_zd_at_phases(params: &ZDProfileParams, phases: &[f64]) -> Result<f64> {
    let jj = params.branches.j;
    let u = &params.branches.branch_values;
    if phases.len() != jj {
        return Err(Error::InvalidConfig(format!("{} phases given for J = {jj}", phases.len())));
    }
    if jj == 0 {
        return Ok(u[0]);
    }
    let e: Vec<C64> = (0..jj).map(|j| C64::from_polar(params.gamma_abs[j], phases[j])).collect();
    let m = DMatrix::from_fn(jj, jj, |j, k| {
        let v = C64::new(coupling(u, j, k), 0.0);
        if j == k {
            v + e[j]
        } else {
            v
        }
    });
    let k = DMatrix::from_fn(jj, jj, |j, k| if j == k { C64::new(0.0, params.kappa[j]) * e[j] } else { C64::new(0.0, 0.0) });
    let tr = log_det_derivative(&m, &k)?;
    Ok(u[0] + params.kappa.iter().sum::<f64>() - 2.0 * tr.im)
}

/// `u^ZD(t, x; ε)`.
pub fn u_zd(data: &RationalInitialData, pt: LaxOleinikPoint, epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidConfig(format!("epsilon must be positive, got {epsilon}")));
    }
    let b = branches::solve_branches(data, pt)?;
    u_zd_from_branches(data, pt, &b, epsilon)
}

/// Determinant form `u_0 + Σ κ_j − 2ε Im tr(M⁻¹ ∂x M)`.
///
/// The fast phase is differentiated exactly (`∂x θ_j = κ_j`).  When
/// `include_slow` is set, the derivative of the slowly varying parameters is
/// added: the couplings `1/(u_{2j−1} − u_{2k})` are differentiated through
/// the exact branch derivatives, and `γ_j = |γ_j| e^{iφ_j}` by central
/// differences with step `1e−6·(1+|x|)`.  Without it the result is exactly
/// the `J = 1` closed form.
pub fn u_zd_determinant(
    data: &RationalInitialData,
    pt: LaxOleinikPoint,
    branches: &BranchData,
    epsilon: f64,
    include_slow: bool,
) -> Result<f64> {
    let jj = branches.j;
    let u = &branches.branch_values;
    if jj == 0 {
        return Ok(u[0]);
    }
    let params = profile_params(data, pt, branches)?;
    let m = build_m(&params, epsilon)?;
    let mut dm = fast_derivative(&params, epsilon);
    if include_slow {
        let du: Vec<f64> = branches::branch_derivatives(data, pt, branches)?
            .into_iter()
            .map(|(_, d)| d)
            .collect();
        for j in 0..jj {
            for k in 0..jj {
                let diff = u[2 * j + 1] - u[2 * k + 2];
                let ddiff = du[2 * j + 1] - du[2 * k + 2];
                dm[(j, k)] += C64::new(-ddiff / (diff * diff), 0.0);
            }
        }
        let h = 1e-6 * (1.0 + pt.x.abs());
        let gamma_at = |x: f64| -> Result<Vec<C64>> {
            let p = LaxOleinikPoint::new(pt.t, x)?;
            let b = branches::solve_branches(data, p)?;
            if b.j != jj {
                return Err(Error::NearCaustic { t: pt.t, x, separation: b.min_root_separation });
            }
            let g = gamma_modulus(&b.branch_values)?;
            let ph = phase_corrections(data, &b);
            Ok(g.iter().zip(&ph).map(|(a, f)| C64::from_polar(*a, *f)).collect())
        };
        let gp = gamma_at(pt.x + h)?;
        let gm = gamma_at(pt.x - h)?;
        for j in 0..jj {
            let dg = (gp[j] - gm[j]) / (2.0 * h);
            dm[(j, j)] += dg * C64::from_polar(1.0, params.theta[j] / epsilon);
        }
    }
    let tr = log_det_derivative(&m.m, &dm)?;
    let base = u[0] + params.kappa.iter().sum::<f64>();
    Ok(base - 2.0 * epsilon * tr.im)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fourier_coefficients() {
        assert_eq!(fourier_coeff_ur(0.3, 0, 1), 1.0);
        assert!((fourier_coeff_ur(0.5, 2, 1) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn stable_form_matches_definition() {
        for &(r, th) in &[(0.2, 0.3), (0.9, 2.0), (0.5, -1.0)] {
            let direct = (1.0 - r * r) / (1.0 + r * r - 2.0 * r * f64::cos(th));
            assert!((u_r(r, th) - direct).abs() < 1e-13);
        }
    }

    #[test]
    fn modulus_homogeneity() {
        let r = [0.1, 0.5, 1.2, 2.0, 3.1];
        let g = gamma_modulus_sq(&r);
        let scaled: Vec<f64> = r.iter().map(|x| 2.0 * x + 0.7).collect();
        let gs = gamma_modulus_sq(&scaled);
        for (a, b) in g.iter().zip(gs) {
            assert!(*a > 0.0);
            assert!((b - a / 4.0).abs() < 1e-12 * a);
        }
    }

    #[test]
    fn one_phase_modulus_reduction() {
        let r = [0.3f64, 1.1, 2.6];
        let g = gamma_modulus_sq(&r)[0];
        let expect = (r[2] - r[0]) / ((r[1] - r[0]) * (r[2] - r[1]).powi(2));
        assert!((g - expect).abs() < 1e-14 * expect);
    }
}
