//! Rational initial data and the Lax–Oleinik objective.
//!
//! The initial condition is
//!
//! ```text
//! u0(x) = Σ_n [ c_n / (x − p_n) + c_n* / (x − p_n*) ],   Im p_n > 0,
//! ```
//!
//! stored once as the pairs `(p_n, c_n)`; the conjugate half is generated on
//! evaluation so that `u0` is exactly real on the real line.  The objective
//!
//! ```text
//! h(y) = (y − x)² / (4t) + Σ_n [ c_n Log(y − p_n) + c_n* Log(y − p_n*) ]
//! ```
//!
//! uses principal logarithms on the real line.  Off the real line the crate
//! never evaluates `h` through principal logarithms except at a single anchor
//! point: values elsewhere are obtained by continuing `h` along straight
//! segments with [`RationalInitialData::h_increment`].

use std::path::Path;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Complex double used throughout the crate.
pub type C64 = Complex<f64>;

/// Default relative tolerance for "approximately zero" tests.
pub const DEFAULT_TAU: f64 = 1e-12;

/// Rational initial data `u0` given by poles in the upper half-plane and
/// their residues.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalInitialData {
    poles: Vec<C64>,
    residues: Vec<C64>,
}

/// On-disk representation: `poles = [[re, im], ...]`, `residues = [[re, im], ...]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialDataDoc {
    pub poles: Vec<[f64; 2]>,
    pub residues: Vec<[f64; 2]>,
}

/// A point `(t, x)` of the space-time plane with `t > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaxOleinikPoint {
    pub t: f64,
    pub x: f64,
}

impl LaxOleinikPoint {
    /// Builds a point, rejecting `t <= 0` (the objective contains `1/(4t)`).
    pub fn new(t: f64, x: f64) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::NonPositiveTime(t));
        }
        if !x.is_finite() {
            return Err(Error::InvalidConfig(format!("x must be finite, got {x}")));
        }
        Ok(Self { t, x })
    }
}

impl RationalInitialData {
    /// Validates and builds initial data.
    ///
    /// Errors name the offending (zero-based) index: poles must be finite,
    /// lie strictly in the upper half-plane and be pairwise distinct;
    /// residues must be finite; both lists must have the same length `N >= 1`.
    pub fn new(poles: Vec<C64>, residues: Vec<C64>) -> Result<Self> {
        if poles.is_empty() {
            return Err(Error::InvalidData {
                index: 0,
                reason: "at least one pole is required".into(),
            });
        }
        if poles.len() != residues.len() {
            return Err(Error::InvalidData {
                index: poles.len().min(residues.len()),
                reason: format!(
                    "{} poles but {} residues",
                    poles.len(),
                    residues.len()
                ),
            });
        }
        for (i, p) in poles.iter().enumerate() {
            if !(p.re.is_finite() && p.im.is_finite()) {
                return Err(Error::InvalidData {
                    index: i,
                    reason: "pole is not finite".into(),
                });
            }
            if !(p.im > 0.0) {
                return Err(Error::InvalidData {
                    index: i,
                    reason: format!("pole must satisfy Im p > 0, got Im p = {}", p.im),
                });
            }
            for (j, q) in poles.iter().enumerate().take(i) {
                if (p - q).norm() <= 1e-12 * (1.0 + p.norm()) {
                    return Err(Error::InvalidData {
                        index: i,
                        reason: format!("pole coincides with pole {j}"),
                    });
                }
            }
        }
        for (i, c) in residues.iter().enumerate() {
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::InvalidData {
                    index: i,
                    reason: "residue is not finite".into(),
                });
            }
        }
        Ok(Self { poles, residues })
    }

    /// `u0(x) = 2/(1+x²)`, i.e. `p = i`, `c = −i`.
    pub fn lorentzian() -> Self {
        Self::new(vec![C64::new(0.0, 1.0)], vec![C64::new(0.0, -1.0)])
            .expect("fixture is valid")
    }

    /// Two-pole fixture with `c1 = 1 − i`, `c2 = 1 + i/√2`, `p1 = i`, `p2 = 16 + i`.
    pub fn two_pole_fixture() -> Self {
        Self::new(
            vec![C64::new(0.0, 1.0), C64::new(16.0, 1.0)],
            vec![
                C64::new(1.0, -1.0),
                C64::new(1.0, std::f64::consts::FRAC_1_SQRT_2),
            ],
        )
        .expect("fixture is valid")
    }

    /// Builds data from the serializable document form.
    pub fn from_doc(doc: &InitialDataDoc) -> Result<Self> {
        Self::new(
            doc.poles.iter().map(|a| C64::new(a[0], a[1])).collect(),
            doc.residues.iter().map(|a| C64::new(a[0], a[1])).collect(),
        )
    }

    /// Serializable document form.
    pub fn to_doc(&self) -> InitialDataDoc {
        InitialDataDoc {
            poles: self.poles.iter().map(|p| [p.re, p.im]).collect(),
            residues: self.residues.iter().map(|c| [c.re, c.im]).collect(),
        }
    }

    /// Parses a TOML document.
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let doc: InitialDataDoc = toml::from_str(s).map_err(|e| Error::Input(e.to_string()))?;
        Self::from_doc(&doc)
    }

    /// Parses a JSON document.
    pub fn from_json_str(s: &str) -> Result<Self> {
        let doc: InitialDataDoc =
            serde_json::from_str(s).map_err(|e| Error::Input(e.to_string()))?;
        Self::from_doc(&doc)
    }

    /// Reads a `.json` or `.toml` file (decided by extension; TOML otherwise).
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Self::from_json_str(&text),
            _ => Self::from_toml_str(&text),
        }
    }

    /// Poles `p_n` (upper half-plane).
    pub fn poles(&self) -> &[C64] {
        &self.poles
    }

    /// Residues `c_n`.
    pub fn residues(&self) -> &[C64] {
        &self.residues
    }

    /// Number `N` of pole pairs.
    pub fn n(&self) -> usize {
        self.poles.len()
    }

    /// Length scale of the data, used to make tolerances scale-aware.
    pub fn scale(&self) -> f64 {
        1.0 + self.poles.iter().map(|p| p.norm()).fold(0.0, f64::max)
    }

    /// Poles and conjugate poles together with their residues, i.e. the
    /// `2N` terms of the partial-fraction expansion.
    pub fn all_terms(&self) -> impl Iterator<Item = (C64, C64)> + '_ {
        self.poles
            .iter()
            .zip(&self.residues)
            .flat_map(|(p, c)| [(*p, *c), (p.conj(), c.conj())])
    }

    /// Distance from `z` to the nearest of the `2N` poles.
    pub fn pole_distance(&self, z: C64) -> f64 {
        self.poles
            .iter()
            .flat_map(|p| [(z - p).norm(), (z - p.conj()).norm()])
            .fold(f64::INFINITY, f64::min)
    }

    fn check_pole(&self, z: C64) -> Result<()> {
        if self.pole_distance(z) < 1e-13 * self.scale() {
            Err(Error::PoleHit { re: z.re, im: z.im })
        } else {
            Ok(())
        }
    }

    /// `u0(x)` for real `x`; exactly real by construction.
    pub fn eval_u0(&self, x: f64) -> f64 {
        self.poles
            .iter()
            .zip(&self.residues)
            .map(|(p, c)| 2.0 * (c / (x - p)).re)
            .sum()
    }

    /// `u0(z)` continued to complex `z` (no pole check).
    pub fn u0_complex(&self, z: C64) -> C64 {
        self.all_terms().map(|(p, c)| c / (z - p)).sum()
    }

    /// `u0'(z) = −Σ [c_n/(z−p_n)² + c_n*/(z−p_n*)²]`.
    pub fn eval_u0_prime(&self, z: C64) -> Result<C64> {
        self.check_pole(z)?;
        Ok(self.u0_prime_unchecked(z))
    }

    pub(crate) fn u0_prime_unchecked(&self, z: C64) -> C64 {
        self.all_terms()
            .map(|(p, c)| {
                let w = z - p;
                -c / (w * w)
            })
            .sum()
    }

    /// `h(y)` on the real line with principal logarithms.
    pub fn eval_h_real(&self, pt: LaxOleinikPoint, y: f64) -> Result<f64> {
        if !(pt.t > 0.0) {
            return Err(Error::NonPositiveTime(pt.t));
        }
        let quad = (y - pt.x) * (y - pt.x) / (4.0 * pt.t);
        let logs: f64 = self
            .poles
            .iter()
            .zip(&self.residues)
            .map(|(p, c)| 2.0 * (c * (y - p).ln()).re)
            .sum();
        Ok(quad + logs)
    }

    /// `h(z)` evaluated with principal logarithms (used only as an anchor
    /// value; the continued `h` differs from this off the real line).
    pub fn h_principal(&self, pt: LaxOleinikPoint, z: C64) -> C64 {
        let d = z - pt.x;
        d * d / (4.0 * pt.t) + self.all_terms().map(|(p, c)| c * (z - p).ln()).sum::<C64>()
    }

    /// `h'(z) = (z − x)/(2t) + u0(z)`, meromorphic on the whole plane.
    pub fn eval_h_prime(&self, pt: LaxOleinikPoint, z: C64) -> Result<C64> {
        if !(pt.t > 0.0) {
            return Err(Error::NonPositiveTime(pt.t));
        }
        self.check_pole(z)?;
        Ok(self.h_prime_unchecked(pt, z))
    }

    pub(crate) fn h_prime_unchecked(&self, pt: LaxOleinikPoint, z: C64) -> C64 {
        (z - pt.x) / (2.0 * pt.t) + self.u0_complex(z)
    }

    /// `h''(z) = 1/(2t) + u0'(z)`.
    pub fn h_second(&self, pt: LaxOleinikPoint, z: C64) -> C64 {
        C64::new(1.0 / (2.0 * pt.t), 0.0) + self.u0_prime_unchecked(z)
    }

    /// Exact increment `h(b) − h(a)` of the analytic continuation of `h`
    /// along the straight segment from `a` to `b`.
    ///
    /// Along a segment that avoids a pole `q`, the argument of `z − q`
    /// changes by less than `π`, so the continuous change of `log(z − q)` is
    /// the principal logarithm of `(b − q)/(a − q)`.
    pub fn h_increment(&self, pt: LaxOleinikPoint, a: C64, b: C64) -> C64 {
        let quad = (b - a) * (a + b - 2.0 * pt.x) / (4.0 * pt.t);
        quad + self
            .all_terms()
            .map(|(p, c)| c * ((b - p) / (a - p)).ln())
            .sum::<C64>()
    }

    /// `sup_x |u0(x)|` over the real line (dense sampling plus golden-section
    /// refinement around the best samples).
    pub fn sup_abs_u0(&self) -> f64 {
        let lo = self.poles.iter().map(|p| p.re).fold(f64::INFINITY, f64::min);
        let hi = self.poles.iter().map(|p| p.re).fold(f64::NEG_INFINITY, f64::max);
        let w = self.poles.iter().map(|p| p.im).fold(0.0, f64::max);
        let (a, b) = (lo - 60.0 * w - 10.0, hi + 60.0 * w + 10.0);
        let n = 20_000usize;
        let h = (b - a) / n as f64;
        let f = |x: f64| self.eval_u0(x).abs();
        let mut best: Vec<(f64, f64)> = (0..=n).map(|k| (a + h * k as f64, 0.0)).collect();
        for s in best.iter_mut() {
            s.1 = f(s.0);
        }
        let mut peaks: Vec<usize> = (1..n)
            .filter(|&k| best[k].1 >= best[k - 1].1 && best[k].1 >= best[k + 1].1)
            .collect();
        peaks.sort_by(|&i, &j| best[j].1.total_cmp(&best[i].1));
        let mut sup = best.iter().map(|s| s.1).fold(0.0, f64::max);
        for &k in peaks.iter().take(8) {
            let (mut l, mut r) = (best[k].0 - h, best[k].0 + h);
            let g = 0.5 * (5f64.sqrt() - 1.0);
            for _ in 0..80 {
                let m1 = r - g * (r - l);
                let m2 = l + g * (r - l);
                if f(m1) > f(m2) {
                    r = m2;
                } else {
                    l = m1;
                }
            }
            sup = sup.max(f(0.5 * (l + r)));
        }
        sup
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lorentzian_values() {
        let d = RationalInitialData::lorentzian();
        assert!((d.eval_u0(0.0) - 2.0).abs() < 1e-15);
        assert!((d.eval_u0(1.0) - 1.0).abs() < 1e-15);
        assert!(d.eval_u0_prime(C64::new(0.0, 0.0)).unwrap().norm() < 1e-15);
        assert!((d.eval_u0_prime(C64::new(1.0, 0.0)).unwrap() - C64::new(-1.0, 0.0)).norm() < 1e-15);
        let pt = LaxOleinikPoint::new(1.0, 0.0).unwrap();
        assert!((d.eval_h_real(pt, 0.0).unwrap() + std::f64::consts::PI).abs() < 1e-14);
        assert!((d.sup_abs_u0() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn validation_names_index() {
        let err = RationalInitialData::new(
            vec![C64::new(0.0, 1.0), C64::new(1.0, -0.5)],
            vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)],
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidData { index: 1, .. }));
        assert!(LaxOleinikPoint::new(0.0, 1.0).is_err());
    }

    #[test]
    fn pole_hit_is_reported() {
        let d = RationalInitialData::lorentzian();
        assert!(matches!(
            d.eval_u0_prime(C64::new(0.0, 1.0)),
            Err(Error::PoleHit { .. })
        ));
    }

    #[test]
    fn increment_matches_principal_on_short_segments() {
        let d = RationalInitialData::two_pole_fixture();
        let pt = LaxOleinikPoint::new(2.0, 3.0).unwrap();
        let a = C64::new(-3.0, 0.2);
        let b = C64::new(-2.5, 0.4);
        let inc = d.h_increment(pt, a, b);
        let direct = d.h_principal(pt, b) - d.h_principal(pt, a);
        assert!((inc - direct).norm() < 1e-12);
    }
}
