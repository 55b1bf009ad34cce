//! Dense polynomial utilities: products, Horner evaluation, Aberth–Ehrlich
//! simultaneous root finding and discriminants via the Sylvester resultant.
//!
//! Coefficients are stored in descending order, `a[0] z^n + … + a[n]`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::rational::C64;

/// Product of two polynomials (descending coefficients).
pub fn mul<T>(a: &[T], b: &[T]) -> Vec<T>
where
    T: Copy + Default + std::ops::Add<Output = T> + std::ops::Mul<Output = T>,
{
    let mut out = vec![T::default(); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = out[i + j] + x * y;
        }
    }
    out
}

/// Sum of two polynomials aligned at the constant term.
pub fn add<T>(a: &[T], b: &[T]) -> Vec<T>
where
    T: Copy + Default + std::ops::Add<Output = T>,
{
    let n = a.len().max(b.len());
    let mut out = vec![T::default(); n];
    for (k, &x) in a.iter().enumerate() {
        out[n - a.len() + k] = out[n - a.len() + k] + x;
    }
    for (k, &y) in b.iter().enumerate() {
        out[n - b.len() + k] = out[n - b.len() + k] + y;
    }
    out
}

/// Value and first derivative at `z` by Horner's scheme.
pub fn horner(a: &[C64], z: C64) -> (C64, C64) {
    let mut p = C64::new(0.0, 0.0);
    let mut dp = C64::new(0.0, 0.0);
    for &c in a {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Value at a real point.
pub fn horner_real(a: &[f64], x: f64) -> f64 {
    a.iter().fold(0.0, |p, &c| p * x + c)
}

/// Derivative coefficients.
pub fn derivative(a: &[f64]) -> Vec<f64> {
    let n = a.len() - 1;
    a.iter()
        .take(n)
        .enumerate()
        .map(|(k, &c)| c * (n - k) as f64)
        .collect()
}

/// Derivative coefficients, with the zero polynomial represented as `[0]`.
pub fn derivative_or_zero(a: &[f64]) -> Vec<f64> {
    let d = derivative(a);
    if d.is_empty() {
        vec![0.0]
    } else {
        d
    }
}

/// All roots of a polynomial with nonzero leading coefficient by the
/// Aberth–Ehrlich iteration.
///
/// `guess`, when given with the right length, replaces the default
/// perturbed-circle initialization (used for warm starts along sweeps).
pub fn aberth(a: &[C64], guess: Option<&[C64]>) -> Result<Vec<C64>> {
    let n = a.len() - 1;
    if n == 0 {
        return Ok(Vec::new());
    }
    let lead = a[0];
    if lead.norm() == 0.0 {
        return Err(Error::RootFindingFailure("zero leading coefficient".into()));
    }
    let monic: Vec<C64> = a.iter().map(|c| c / lead).collect();
    let mut z: Vec<C64> = match guess {
        Some(g) if g.len() == n => g.to_vec(),
        _ => {
            // Cauchy bound on the root moduli, perturbed circle start.
            let radius = 1.0 + monic[1..].iter().map(|c| c.norm()).fold(0.0, f64::max);
            let r0 = radius.min(
                2.0 * monic[1..]
                    .iter()
                    .enumerate()
                    .map(|(k, c)| c.norm().powf(1.0 / (k + 1) as f64))
                    .fold(0.0, f64::max),
            );
            let r0 = if r0 > 0.0 { r0 } else { 1.0 };
            (0..n)
                .map(|k| {
                    let ang = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
                    C64::from_polar(r0 * (1.0 + 0.01 * k as f64 / n as f64), ang)
                })
                .collect()
        }
    };
    let mut converged = vec![false; n];
    for _ in 0..1000 {
        let mut done = true;
        for i in 0..n {
            if converged[i] {
                continue;
            }
            let (p, dp) = horner(&monic, z[i]);
            if p.norm() == 0.0 {
                converged[i] = true;
                continue;
            }
            let ratio = p / dp;
            let mut s = C64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    s += (z[i] - z[j]).inv();
                }
            }
            let w = ratio / (C64::new(1.0, 0.0) - ratio * s);
            if !(w.re.is_finite() && w.im.is_finite()) {
                return Err(Error::RootFindingFailure("non-finite Aberth correction".into()));
            }
            z[i] -= w;
            if w.norm() <= 4.0 * f64::EPSILON * (1.0 + z[i].norm()) {
                converged[i] = true;
            } else {
                done = false;
            }
        }
        if done {
            return Ok(z);
        }
    }
    // Accept slowly converging clusters if the residuals are small.
    let scale = 1.0 + monic.iter().map(|c| c.norm()).fold(0.0, f64::max);
    for &zi in &z {
        let (p, _) = horner(&monic, zi);
        if p.norm() > 1e-8 * scale * (1.0 + zi.norm()).powi(n as i32) {
            return Err(Error::RootFindingFailure(
                "Aberth iteration did not converge".into(),
            ));
        }
    }
    Ok(z)
}

/// Determinant of the Sylvester matrix of `a` and `b` (real coefficients).
pub fn resultant(a: &[f64], b: &[f64]) -> f64 {
    let m = a.len() - 1;
    let n = b.len() - 1;
    let size = m + n;
    if size == 0 {
        return 1.0;
    }
    let mut s = DMatrix::<f64>::zeros(size, size);
    for r in 0..n {
        for (k, &c) in a.iter().enumerate() {
            s[(r, r + k)] = c;
        }
    }
    for r in 0..m {
        for (k, &c) in b.iter().enumerate() {
            s[(n + r, r + k)] = c;
        }
    }
    s.determinant()
}

/// Discriminant `(−1)^{n(n−1)/2} Res(P, P′) / lead`.
pub fn discriminant(a: &[f64]) -> f64 {
    let n = a.len() - 1;
    let sign = if (n * (n.saturating_sub(1)) / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
    sign * resultant(a, &derivative(a)) / a[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_discriminant() {
        // b² − 4ac for x² + 3x + 2
        assert!((discriminant(&[1.0, 3.0, 2.0]) - 1.0).abs() < 1e-12);
        // cubic x³ − x: discriminant = 4
        assert!((discriminant(&[1.0, 0.0, -1.0, 0.0]) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn aberth_finds_known_roots() {
        // (z−1)(z−2)(z+3) = z³ − 7z + 6
        let a: Vec<C64> = [1.0, 0.0, -7.0, 6.0].iter().map(|&c| C64::new(c, 0.0)).collect();
        let mut r: Vec<f64> = aberth(&a, None).unwrap().iter().map(|z| z.re).collect();
        r.sort_by(f64::total_cmp);
        for (x, e) in r.iter().zip([-3.0, 1.0, 2.0]) {
            assert!((x - e).abs() < 1e-13);
        }
    }

    #[test]
    fn product_and_sum() {
        assert_eq!(mul(&[1.0, 1.0], &[1.0, -1.0]), vec![1.0, 0.0, -1.0]);
        assert_eq!(add(&[1.0, 0.0, 0.0], &[2.0]), vec![1.0, 0.0, 2.0]);
    }
}
