//! `N`-soliton determinant for `u0 = 2/(1+x²)` at `ε = 1/N`.
//!
//! ```text
//! u = 2ε ∂x Im log det(I + (i/ε) Ã),
//! Ã_jj = −2λ_j (x + 2λ_j t),   Ã_jk = 2iε √(λ_j λ_k)/(λ_j − λ_k),
//! ```
//!
//! with `λ_j = −(ε/2) ξ_j` and `ξ_j` the zeros of the Laguerre polynomial
//! `L_N`.  Since every `λ_j < 0`, `√(λ_j λ_k)` is the positive square root of
//! a positive number.  The `x`-derivative is taken analytically through the
//! resolvent: `∂x Ã = diag(−2λ_j)`.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::C64;

/// Soliton eigenvalues for a given `N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatsunoSpec {
    pub n: usize,
    pub epsilon: f64,
    /// `λ_1 … λ_N`, all negative and distinct.
    pub lambdas: Vec<f64>,
}

/// `(L_N(x), L_N′(x))` by the three-term recurrence.
pub fn laguerre(n: usize, x: f64) -> (f64, f64) {
    let mut l0 = 1.0;
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut l1 = 1.0 - x;
    for k in 1..n {
        let kf = k as f64;
        let l2 = ((2.0 * kf + 1.0 - x) * l1 - kf * l0) / (kf + 1.0);
        l0 = l1;
        l1 = l2;
    }
    // x L_N′ = N (L_N − L_{N−1})
    let d = n as f64 * (l1 - l0) / x;
    (l1, d)
}

/// Zeros of `L_N` (ascending) by the Golub–Welsch eigenvalue method
/// followed by Newton polishing on the recurrence.
pub fn laguerre_zeros(n: usize) -> Vec<f64> {
    if n == 0 {
        return Vec::new();
    }
    let jac = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            2.0 * i as f64 + 1.0
        } else if i + 1 == j || j + 1 == i {
            i.max(j) as f64
        } else {
            0.0
        }
    });
    let mut z: Vec<f64> = SymmetricEigen::new(jac).eigenvalues.iter().copied().collect();
    for x in z.iter_mut() {
        for _ in 0..5 {
            let (l, d) = laguerre(n, *x);
            if d == 0.0 {
                break;
            }
            let step = l / d;
            *x -= step;
            if step.abs() <= 4.0 * f64::EPSILON * x.abs() {
                break;
            }
        }
    }
    z.sort_by(f64::total_cmp);
    z
}

impl MatsunoSpec {
    /// Eigenvalues for `ε = 1/N`.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidConfig("N must be at least 1".into()));
        }
        let epsilon = 1.0 / n as f64;
        let lambdas = laguerre_zeros(n).iter().map(|xi| -0.5 * epsilon * xi).collect();
        Ok(Self { n, epsilon, lambdas })
    }

    /// The Hermitian matrix `Ã(t, x)`.
    pub fn a_tilde(&self, t: f64, x: f64) -> DMatrix<C64> {
        let l = &self.lambdas;
        let eps = self.epsilon;
        DMatrix::from_fn(self.n, self.n, |j, k| {
            if j == k {
                C64::new(-2.0 * l[j] * (x + 2.0 * l[j] * t), 0.0)
            } else {
                C64::new(0.0, 2.0 * eps * (l[j] * l[k]).sqrt() / (l[j] - l[k]))
            }
        })
    }
}

/// `u(t, x; 1/N)` from the soliton determinant.
pub fn u_matsuno(spec: &MatsunoSpec, t: f64, x: f64) -> Result<f64> {
    let eps = spec.epsilon;
    let i_eps = C64::new(0.0, 1.0 / eps);
    let a = spec.a_tilde(t, x);
    let r = DMatrix::<C64>::identity(spec.n, spec.n) + a * i_eps;
    let d = DMatrix::from_fn(spec.n, spec.n, |j, k| {
        if j == k {
            i_eps * (-2.0 * spec.lambdas[j])
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let x = r.lu().solve(&d).ok_or(Error::SingularResolvent)?;
    let tr = x.trace();
    if !(tr.re.is_finite() && tr.im.is_finite()) {
        return Err(Error::SingularResolvent);
    }
    Ok(2.0 * eps * tr.im)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_zero_sets() {
        assert!((laguerre_zeros(1)[0] - 1.0).abs() < 1e-15);
        let z = laguerre_zeros(2);
        assert!((z[0] - (2.0 - 2f64.sqrt())).abs() < 1e-14);
        assert!((z[1] - (2.0 + 2f64.sqrt())).abs() < 1e-14);
    }

    #[test]
    fn one_soliton() {
        let s = MatsunoSpec::new(1).unwrap();
        for &(t, x) in &[(0.0, 0.0), (0.3, 1.2), (2.0, -1.0)] {
            let u = u_matsuno(&s, t, x).unwrap();
            let e = 2.0 / (1.0 + (x - t) * (x - t));
            assert!((u - e).abs() < 1e-14);
        }
    }

    #[test]
    fn hermitian() {
        let s = MatsunoSpec::new(5).unwrap();
        let a = s.a_tilde(0.4, -0.3);
        assert!((a.clone() - a.adjoint()).iter().all(|v| v.norm() < 1e-13));
    }
}
