//! Genericity checks on the data and `(t, x)`.
//!
//! The configuration is non-special when every residue has nonzero real and
//! imaginary parts, the critical points of `h` are simple, no nonempty subset
//! of the `Re(c_n)` sums to zero (which rules out closed trajectories), and
//! for each pair of critical points with one in the upper half-plane the
//! increment `Im ∫ h′` along a connecting curve differs from every
//! `2π Σ n_k Re(c_k)` with `n_k ∈ {−1, 0, 1}` (which rules out heteroclinic
//! connections).  The last test depends on the choice of connecting curve,
//! so it is reported as a tri-state.

use serde::{Deserialize, Serialize};

use crate::branches;
use crate::error::{Error, Result};
use crate::rational::{LaxOleinikPoint, RationalInitialData, C64};

const SUM_TOL: f64 = 1e-10;
const MAX_SUBSET_N: usize = 20;
const MAX_HETEROCLINIC_N: usize = 12;

/// Outcome of a check that may not be decidable by the chosen method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TriState {
    Ok,
    Violated,
    NotComputed,
}

/// Result of [`nonspecial_check`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonspecialReport {
    /// `Re(c_n) ≠ 0` and `Im(c_n) ≠ 0` for every `n`.
    pub residues_ok: bool,
    /// All critical points of `h` are simple.
    pub discriminant_ok: bool,
    /// No nonempty subset of the `Re(c_n)` sums to zero.
    pub re_c_sums_ok: bool,
    pub heteroclinic_ok: TriState,
    pub messages: Vec<String>,
}

impl NonspecialReport {
    /// Whether every check passed (a not-computed heteroclinic test counts
    /// as passed).
    pub fn is_nonspecial(&self) -> bool {
        self.residues_ok
            && self.discriminant_ok
            && self.re_c_sums_ok
            && self.heteroclinic_ok != TriState::Violated
    }
}

fn subset_sums_ok(re: &[f64]) -> Option<bool> {
    let n = re.len();
    if n > MAX_SUBSET_N {
        return None;
    }
    Some((1u32..(1u32 << n)).all(|mask| {
        let s: f64 = (0..n).filter(|k| mask & (1 << k) != 0).map(|k| re[k]).sum();
        s.abs() > SUM_TOL
    }))
}

/// All values `2π Σ n_k Re(c_k)` with `n_k ∈ {−1, 0, 1}`.
fn lattice_values(re: &[f64]) -> Vec<f64> {
    let mut vals = vec![0.0];
    for r in re {
        let mut next = Vec::with_capacity(vals.len() * 3);
        for v in &vals {
            next.push(v - 2.0 * std::f64::consts::PI * r);
            next.push(*v);
            next.push(v + 2.0 * std::f64::consts::PI * r);
        }
        vals = next;
    }
    vals
}

/// Evaluates the non-special configuration conditions at `pt`.
pub fn nonspecial_check(data: &RationalInitialData, pt: LaxOleinikPoint) -> Result<NonspecialReport> {
    if !(pt.t > 0.0) {
        return Err(Error::NonPositiveTime(pt.t));
    }
    let mut messages = Vec::new();
    let re: Vec<f64> = data.residues().iter().map(|c| c.re).collect();

    let mut residues_ok = true;
    for (n, c) in data.residues().iter().enumerate() {
        if c.re == 0.0 || c.im == 0.0 {
            residues_ok = false;
            messages.push(format!("residue {n} has a vanishing real or imaginary part"));
        }
    }

    let disc = branches::discriminant_at(data, pt);
    let roots = branches::characteristic_roots(data, pt, None);
    let separation = match &roots {
        Ok(r) => {
            let mut m = f64::INFINITY;
            for i in 0..r.len() {
                for j in i + 1..r.len() {
                    m = m.min((r[i] - r[j]).norm());
                }
            }
            m
        }
        Err(_) => 0.0,
    };
    let discriminant_ok = disc != 0.0 && disc.is_finite() && separation > 1e-6 * data.scale();
    if !discriminant_ok {
        messages.push(format!(
            "critical points are not simple (discriminant {disc:e}, minimum separation {separation:e})"
        ));
    }

    let re_c_sums_ok = match subset_sums_ok(&re) {
        Some(ok) => ok,
        None => {
            messages.push(format!("subset-sum test skipped for N > {MAX_SUBSET_N}"));
            true
        }
    };
    if !re_c_sums_ok {
        messages.push("a nonempty subset of Re(c_n) sums to zero".into());
    }

    let heteroclinic_ok = match roots {
        Ok(r) if discriminant_ok && data.n() <= MAX_HETEROCLINIC_N => {
            let lattice = lattice_values(&re);
            let tol = 1e-8 * (1.0 + re.iter().map(|v| v.abs()).sum::<f64>());
            // Real roots come back with round-off imaginary parts; classify
            // them as the branch solver does.
            let tau = branches::BranchOptions::default().tau_real;
            let is_real = |z: &C64| z.im.abs() < tau * (1.0 + z.norm());
            let upper: Vec<C64> = r.iter().copied().filter(|z| z.im > 0.0 && !is_real(z)).collect();
            let closed: Vec<C64> = r
                .iter()
                .filter(|z| z.im > 0.0 || is_real(z))
                .map(|z| if is_real(z) { C64::new(z.re, 0.0) } else { *z })
                .collect();
            let mut state = TriState::Ok;
            'outer: for a in &upper {
                for b in &closed {
                    if (a - b).norm() == 0.0 || (b.im > 0.0 && b.re < a.re) {
                        continue;
                    }
                    if data.pole_distance(*a) < 1e-8 || data.pole_distance(*b) < 1e-8 {
                        state = TriState::NotComputed;
                        continue;
                    }
                    // Straight segment: stays in the closed upper half-plane.
                    let inc = data.h_increment(pt, *a, *b).im;
                    if lattice.iter().any(|v| (inc - v).abs() <= tol) {
                        messages.push(format!(
                            "possible heteroclinic connection between {:.6}{:+.6}i and {:.6}{:+.6}i",
                            a.re, a.im, b.re, b.im
                        ));
                        state = TriState::Violated;
                        break 'outer;
                    }
                }
            }
            state
        }
        _ => TriState::NotComputed,
    };

    Ok(NonspecialReport {
        residues_ok,
        discriminant_ok,
        re_c_sums_ok,
        heteroclinic_ok,
        messages,
    })
}
