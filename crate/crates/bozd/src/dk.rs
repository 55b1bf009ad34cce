//! Exact multi-phase solutions with constant parameters and the periodic
//! travelling wave.
//!
//! A `J`-phase solution is fixed by reals `R_0 < R_1 < … < R_{2J}` and
//! complex `γ_j` whose moduli obey the same constraint used by the
//! zero-dispersion profile ([`crate::zd::gamma_modulus_sq`]):
//!
//! ```text
//! u = R_0 + Σ_j (R_{2j−1} − R_{2j}) − 2ε Im ∂x log det M,
//! M_jk = γ_j e^{iθ_j/ε} δ_jk + 1/(R_{2j−1} − R_{2k}),
//! θ_j = (R_{2j−1} − R_{2j}) x − (R_{2j−1}² − R_{2j}²) t.
//! ```

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::C64;
use crate::zd::{gamma_modulus_sq, u_r};

/// Parameters of a `J`-phase solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JPhaseSpec {
    /// `R_0 < … < R_{2J}`.
    pub r: Vec<f64>,
    /// `γ_1 … γ_J`.
    pub gamma: Vec<C64>,
    pub epsilon: f64,
}

impl JPhaseSpec {
    /// Validates a fully specified parameter set; the moduli must satisfy
    /// the constraint to a relative `1e−8`.
    pub fn new(r: Vec<f64>, gamma: Vec<C64>, epsilon: f64) -> Result<Self> {
        Self::check_r(&r, epsilon)?;
        let jj = (r.len() - 1) / 2;
        if gamma.len() != jj {
            return Err(Error::InvalidConfig(format!(
                "{} R values need {jj} gamma values, got {}",
                r.len(),
                gamma.len()
            )));
        }
        for (j, (g, g2)) in gamma.iter().zip(gamma_modulus_sq(&r)).enumerate() {
            if ((g.norm_sqr() - g2) / g2).abs() > 1e-8 {
                return Err(Error::InvalidConfig(format!(
                    "|gamma_{}|^2 = {} violates the modulus constraint {}",
                    j + 1,
                    g.norm_sqr(),
                    g2
                )));
            }
        }
        Ok(Self { r, gamma, epsilon })
    }

    /// Builds the `γ_j` from the constraint and user-chosen phases.
    pub fn from_phases(r: Vec<f64>, phases: &[f64], epsilon: f64) -> Result<Self> {
        Self::check_r(&r, epsilon)?;
        let g2 = gamma_modulus_sq(&r);
        if phases.len() != g2.len() {
            return Err(Error::InvalidConfig(format!(
                "expected {} phases, got {}",
                g2.len(),
                phases.len()
            )));
        }
        let gamma = g2
            .iter()
            .zip(phases)
            .map(|(m, a)| C64::from_polar(m.sqrt(), *a))
            .collect();
        Ok(Self { r, gamma, epsilon })
    }

    fn check_r(r: &[f64], epsilon: f64) -> Result<()> {
        if r.len() < 3 || r.len() % 2 == 0 {
            return Err(Error::InvalidConfig(format!(
                "need an odd number >= 3 of R values, got {}",
                r.len()
            )));
        }
        if r.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidConfig("R values must be strictly increasing".into()));
        }
        if !(epsilon > 0.0) {
            return Err(Error::InvalidConfig(format!("epsilon must be positive, got {epsilon}")));
        }
        Ok(())
    }

    /// Number of phases.
    pub fn j(&self) -> usize {
        self.gamma.len()
    }

    /// Linear phases `θ_j(t, x)`.
    pub fn linear_phases(&self, t: f64, x: f64) -> Vec<f64> {
        (1..=self.j())
            .map(|j| {
                let (a, b) = (self.r[2 * j - 1], self.r[2 * j]);
                (a - b) * x - (a * a - b * b) * t
            })
            .collect()
    }

    /// The matrix `M(t, x)` and its exact `x`-derivative.
    pub fn matrix(&self, t: f64, x: f64) -> (DMatrix<C64>, DMatrix<C64>) {
        let jj = self.j();
        let th = self.linear_phases(t, x);
        let r = &self.r;
        let e: Vec<C64> = (0..jj)
            .map(|j| self.gamma[j] * C64::from_polar(1.0, th[j] / self.epsilon))
            .collect();
        let m = DMatrix::from_fn(jj, jj, |j, k| {
            let c = C64::new(1.0 / (r[2 * j + 1] - r[2 * k + 2]), 0.0);
            if j == k {
                c + e[j]
            } else {
                c
            }
        });
        let dm = DMatrix::from_fn(jj, jj, |j, k| {
            if j == k {
                C64::new(0.0, (r[2 * j + 1] - r[2 * j + 2]) / self.epsilon) * e[j]
            } else {
                C64::new(0.0, 0.0)
            }
        });
        (m, dm)
    }
}

/// Value of the `J`-phase solution at `(t, x)`.
pub fn jphase_u(spec: &JPhaseSpec, t: f64, x: f64) -> Result<f64> {
    let (m, dm) = spec.matrix(t, x);
    let lu = m.lu();
    let det = lu.determinant();
    if !(det.norm() > 1e-300) {
        return Err(Error::SingularM(det.norm()));
    }
    let tr = lu.solve(&dm).ok_or(Error::SingularM(det.norm()))?.trace();
    let r = &spec.r;
    let base = r[0] + (1..=spec.j()).map(|j| r[2 * j - 1] - r[2 * j]).sum::<f64>();
    Ok(base - 2.0 * spec.epsilon * tr.im)
}

/// Periodic travelling wave `M·U_r(M(x − c_r t)/ε + α) + a` with
/// `c_r = M(1+r²)/(1−r²)`.
///
/// The speed is that of the zero-offset frame: for `a ≠ 0` the solution of
/// the equation is this profile evaluated at `x − 2at`.
pub fn periodic_wave(m: f64, r: f64, a: f64, alpha: f64, epsilon: f64, t: f64, x: f64) -> Result<f64> {
    if !(m > 0.0) || !(r > 0.0 && r < 1.0) || !(epsilon > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "periodic wave needs M > 0, 0 < r < 1, epsilon > 0 (got M={m}, r={r}, epsilon={epsilon})"
        )));
    }
    let c = m * (1.0 + r * r) / (1.0 - r * r);
    Ok(m * u_r(r, m * (x - c * t) / epsilon + alpha) + a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_phase_is_periodic_wave() {
        let r = vec![0.0, 0.8, 2.0];
        let spec = JPhaseSpec::from_phases(r.clone(), &[0.4], 0.1).unwrap();
        let rr = ((r[1] - r[0]) / (r[2] - r[0])).sqrt();
        for k in 0..50 {
            let x = -3.0 + 0.13 * k as f64;
            let u = jphase_u(&spec, 0.7, x).unwrap();
            let w = periodic_wave(r[2] - r[1], rr, r[0], -0.4, 0.1, 0.7, x).unwrap();
            assert!((u - w).abs() < 1e-10, "{u} {w}");
        }
    }

    #[test]
    fn rejects_bad_modulus() {
        assert!(JPhaseSpec::new(vec![0.0, 1.0, 2.0], vec![C64::new(5.0, 0.0)], 0.1).is_err());
    }
}
