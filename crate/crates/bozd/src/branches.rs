//! Multivalued inviscid-Burgers solution by the method of characteristics.
//!
//! At a point `(t, x)` the characteristic intercepts `y` solve
//! `y + 2t·u0(y) − x = 0`; clearing denominators gives a real polynomial of
//! degree `2N+1`.  Its real roots `y_0 > y_1 > … > y_{2J}` are the Burgers
//! branches, with branch values `u_k = u0(y_k)` ordered ascending; the
//! remaining roots come in conjugate pairs `z_m, z_m*` (`Im z_m > 0`).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly;
use crate::rational::{LaxOleinikPoint, RationalInitialData, C64};

/// Tolerances of the root classification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchOptions {
    /// Roots with `|Im y| < tau_real·(1+|y|)` are snapped to the real line.
    pub tau_real: f64,
    /// Minimum pairwise root distance, relative to the data scale, below
    /// which the point is declared too close to the discriminant locus.
    pub tau_caustic: f64,
}

impl Default for BranchOptions {
    fn default() -> Self {
        Self {
            tau_real: 1e-9,
            tau_caustic: 1e-6,
        }
    }
}

/// The `2N+1` characteristic roots at `(t, x)`, classified.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchData {
    pub t: f64,
    pub x: f64,
    /// Real roots in strictly descending order.
    pub real_roots: Vec<f64>,
    /// Non-real roots with positive imaginary part (conjugates implicit).
    pub complex_roots: Vec<C64>,
    /// Number of phases: `(#real_roots − 1)/2`.
    pub j: usize,
    /// `u_k = u0(y_k)`, strictly ascending.
    pub branch_values: Vec<f64>,
    /// Smallest distance between two of the `2N+1` roots.
    pub min_root_separation: f64,
}

impl BranchData {
    /// All `2N+1` roots (real ones first, then each complex root followed
    /// by its conjugate).
    pub fn all_roots(&self) -> Vec<C64> {
        let mut v: Vec<C64> = self.real_roots.iter().map(|&y| C64::new(y, 0.0)).collect();
        for z in &self.complex_roots {
            v.push(*z);
            v.push(z.conj());
        }
        v
    }

    /// Residual of the global identity
    /// `Σ real roots + Σ 2 Re z_m = x + Σ 2 Re p_n`.
    pub fn global_identity_residual(&self, data: &RationalInitialData) -> f64 {
        let lhs: f64 = self.real_roots.iter().sum::<f64>()
            + self.complex_roots.iter().map(|z| 2.0 * z.re).sum::<f64>();
        let rhs: f64 = self.x + data.poles().iter().map(|p| 2.0 * p.re).sum::<f64>();
        (lhs - rhs).abs()
    }
}

/// `Π_n (y − p_n)(y − p_n*)` as real coefficients.
pub fn pole_polynomial(data: &RationalInitialData) -> Vec<f64> {
    let mut q = vec![1.0];
    for p in data.poles() {
        q = poly::mul(&q, &[1.0, -2.0 * p.re, p.norm_sqr()]);
    }
    q
}

/// Numerator `S` of `u0 = S/Q` (real coefficients, degree ≤ 2N−1).
pub fn residue_polynomial(data: &RationalInitialData) -> Vec<f64> {
    let terms: Vec<(C64, C64)> = data.all_terms().collect();
    let one = C64::new(1.0, 0.0);
    let mut s = vec![C64::new(0.0, 0.0)];
    for (i, (_, c)) in terms.iter().enumerate() {
        let mut prod = vec![*c];
        for (j, (q, _)) in terms.iter().enumerate() {
            if j != i {
                prod = poly::mul(&prod, &[one, -q]);
            }
        }
        s = poly::add(&s, &prod);
    }
    s.iter().map(|c| c.re).collect()
}

/// Real coefficients (descending, monic) of `(y − x)·Q(y) + 2t·S(y)`.
pub fn characteristic_poly(data: &RationalInitialData, pt: LaxOleinikPoint) -> Vec<f64> {
    let q = pole_polynomial(data);
    let s = residue_polynomial(data);
    let lin = poly::mul(&[1.0, -pt.x], &q);
    let s2: Vec<f64> = s.iter().map(|c| 2.0 * pt.t * c).collect();
    poly::add(&lin, &s2)
}

/// Same polynomial computed in complex arithmetic; the imaginary parts of
/// the coefficients measure the conjugate symmetry of the construction.
pub fn characteristic_poly_complex(data: &RationalInitialData, pt: LaxOleinikPoint) -> Vec<C64> {
    let terms: Vec<(C64, C64)> = data.all_terms().collect();
    let one = C64::new(1.0, 0.0);
    let mut q = vec![one];
    for (p, _) in &terms {
        q = poly::mul(&q, &[one, -p]);
    }
    let mut s = vec![C64::new(0.0, 0.0)];
    for (i, (_, c)) in terms.iter().enumerate() {
        let mut prod = vec![*c * 2.0 * pt.t];
        for (j, (p, _)) in terms.iter().enumerate() {
            if j != i {
                prod = poly::mul(&prod, &[one, -p]);
            }
        }
        s = poly::add(&s, &prod);
    }
    poly::add(&poly::mul(&[one, C64::new(-pt.x, 0.0)], &q), &s)
}

fn newton_polish(data: &RationalInitialData, pt: LaxOleinikPoint, y: C64, real: bool) -> C64 {
    let mut y = y;
    for _ in 0..8 {
        let f = y - pt.x + 2.0 * pt.t * data.u0_complex(y);
        let df = C64::new(1.0, 0.0) + 2.0 * pt.t * data.u0_prime_unchecked(y);
        if df.norm() == 0.0 {
            break;
        }
        let mut step = f / df;
        if real {
            step.im = 0.0;
        }
        if !(step.re.is_finite() && step.im.is_finite()) {
            break;
        }
        y -= step;
        if step.norm() <= 2.0 * f64::EPSILON * (1.0 + y.norm()) {
            break;
        }
    }
    y
}

/// All `2N+1` roots of the characteristic polynomial, unclassified.
pub fn characteristic_roots(
    data: &RationalInitialData,
    pt: LaxOleinikPoint,
    guess: Option<&[C64]>,
) -> Result<Vec<C64>> {
    if !(pt.t > 0.0) {
        return Err(Error::NonPositiveTime(pt.t));
    }
    let coeffs: Vec<C64> = characteristic_poly(data, pt)
        .iter()
        .map(|&c| C64::new(c, 0.0))
        .collect();
    let roots = poly::aberth(&coeffs, guess)?;
    Ok(roots
        .into_iter()
        .map(|y| newton_polish(data, pt, y, false))
        .collect())
}

/// Number of real characteristic roots, without the near-caustic refusal.
pub fn count_real_roots(data: &RationalInitialData, pt: LaxOleinikPoint) -> Result<usize> {
    let roots = characteristic_roots(data, pt, None)?;
    Ok(roots
        .iter()
        .filter(|y| y.im.abs() < 1e-7 * (1.0 + y.norm()))
        .count())
}

/// Solves and classifies the characteristic roots with default options.
pub fn solve_branches(data: &RationalInitialData, pt: LaxOleinikPoint) -> Result<BranchData> {
    solve_branches_with(data, pt, &BranchOptions::default(), None)
}

/// Solves and classifies the characteristic roots.
///
/// `guess` (the roots at a nearby point) warm-starts the simultaneous
/// iteration.
pub fn solve_branches_with(
    data: &RationalInitialData,
    pt: LaxOleinikPoint,
    opts: &BranchOptions,
    guess: Option<&[C64]>,
) -> Result<BranchData> {
    let roots = characteristic_roots(data, pt, guess)?;
    classify(data, pt, opts, roots)
}

fn classify(
    data: &RationalInitialData,
    pt: LaxOleinikPoint,
    opts: &BranchOptions,
    roots: Vec<C64>,
) -> Result<BranchData> {
    let scale = data.scale() + pt.x.abs() + pt.t * data.residues().iter().map(|c| c.norm()).sum::<f64>();
    let mut min_sep = f64::INFINITY;
    for i in 0..roots.len() {
        for j in 0..i {
            min_sep = min_sep.min((roots[i] - roots[j]).norm());
        }
    }
    if min_sep < opts.tau_caustic * data.scale() {
        return Err(Error::NearCaustic {
            t: pt.t,
            x: pt.x,
            separation: min_sep,
        });
    }
    let mut real_roots = Vec::new();
    let mut upper = Vec::new();
    let mut lower = 0usize;
    for y in roots {
        if y.im.abs() < opts.tau_real * (1.0 + y.norm()) {
            real_roots.push(newton_polish(data, pt, C64::new(y.re, 0.0), true).re);
        } else if y.im > 0.0 {
            upper.push(y);
        } else {
            lower += 1;
        }
    }
    if upper.len() != lower || real_roots.len() % 2 != 1 {
        return Err(Error::RootFindingFailure(format!(
            "inconsistent root classification: {} real, {} upper, {} lower",
            real_roots.len(),
            upper.len(),
            lower
        )));
    }
    real_roots.sort_by(|a, b| b.total_cmp(a));
    upper.sort_by(|a, b| a.re.total_cmp(&b.re));
    for y in &real_roots {
        let r = (y + 2.0 * pt.t * data.eval_u0(*y) - pt.x).abs();
        if r > 1e-8 * scale {
            return Err(Error::RootFindingFailure(format!(
                "root {y} has residual {r:e}"
            )));
        }
    }
    let branch_values: Vec<f64> = real_roots.iter().map(|&y| data.eval_u0(y)).collect();
    if branch_values.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::NearCaustic {
            t: pt.t,
            x: pt.x,
            separation: min_sep,
        });
    }
    Ok(BranchData {
        t: pt.t,
        x: pt.x,
        j: (real_roots.len() - 1) / 2,
        real_roots,
        complex_roots: upper,
        branch_values,
        min_root_separation: min_sep,
    })
}

/// Warm-started branch solver for sweeps along `x` (per-worker state).
#[derive(Debug, Clone, Default)]
pub struct BranchTracker {
    opts: BranchOptions,
    last: Option<Vec<C64>>,
}

impl BranchTracker {
    pub fn new(opts: BranchOptions) -> Self {
        Self { opts, last: None }
    }

    /// Solves at `pt`, seeding the iteration with the previous roots.
    pub fn solve(&mut self, data: &RationalInitialData, pt: LaxOleinikPoint) -> Result<BranchData> {
        let roots = match characteristic_roots(data, pt, self.last.as_deref()) {
            Ok(r) => r,
            Err(_) => characteristic_roots(data, pt, None)?,
        };
        self.last = Some(roots.clone());
        classify(data, pt, &self.opts, roots)
    }
}

/// Weak limit `ū = Σ_k (−1)^k u_k`.
pub fn weak_limit_ubar(branches: &BranchData) -> f64 {
    branches
        .branch_values
        .iter()
        .enumerate()
        .map(|(k, u)| if k % 2 == 0 { *u } else { -*u })
        .sum()
}

/// Discriminant of the characteristic polynomial at `(t, x)`.
pub fn discriminant_at(data: &RationalInitialData, pt: LaxOleinikPoint) -> f64 {
    poly::discriminant(&characteristic_poly(data, pt))
}

/// `∂x y_k` and `∂x u_k` for each real branch.
pub fn branch_derivatives(
    data: &RationalInitialData,
    pt: LaxOleinikPoint,
    branches: &BranchData,
) -> Result<Vec<(f64, f64)>> {
    branches
        .real_roots
        .iter()
        .map(|&y| {
            let up = data.eval_u0_prime(C64::new(y, 0.0))?.re;
            let d = 1.0 + 2.0 * pt.t * up;
            if d.abs() < 1e-8 {
                return Err(Error::NearCaustic {
                    t: pt.t,
                    x: pt.x,
                    separation: d.abs(),
                });
            }
            Ok((1.0 / d, up / d))
        })
        .collect()
}

/// Residual of the factored form
/// `2t·h′(z) = Π_k (z − y_k) Π_m (z − z_m)(z − z_m*) / Π_n (z − p_n)(z − p_n*)`
/// relative to `|2t·h′(z)|`.
pub fn factored_form_residual(
    data: &RationalInitialData,
    pt: LaxOleinikPoint,
    branches: &BranchData,
    z: C64,
) -> Result<f64> {
    let direct = 2.0 * pt.t * data.eval_h_prime(pt, z)?;
    let num: C64 = branches.all_roots().iter().map(|r| z - r).product();
    let den: C64 = data.all_terms().map(|(p, _)| z - p).product();
    let f = num / den;
    Ok((f - direct).norm() / direct.norm().max(f64::MIN_POSITIVE))
}

/// Polynomial whose real roots `y` satisfy `1 + 2t·u0′(y) = 0`, i.e.
/// `Q² + 2t(S′Q − SQ′)`; its degree is at most `4N`.
pub fn caustic_polynomial(data: &RationalInitialData, t: f64) -> Vec<f64> {
    let q = pole_polynomial(data);
    let s = residue_polynomial(data);
    let q2 = poly::mul(&q, &q);
    let sq = poly::mul(&poly::derivative_or_zero(&s), &q);
    let qs = poly::mul(&s, &poly::derivative_or_zero(&q));
    let w: Vec<f64> = poly::add(&sq, &qs.iter().map(|c| -c).collect::<Vec<_>>())
        .iter()
        .map(|c| 2.0 * t * c)
        .collect();
    poly::add(&q2, &w)
}

/// The caustic positions `x` at time `t`: images `x = y + 2t·u0(y)` of the
/// real roots of [`caustic_polynomial`].  At most `4N` values, ascending.
pub fn caustic_points(data: &RationalInitialData, t: f64) -> Result<Vec<f64>> {
    let c: Vec<C64> = caustic_polynomial(data, t).iter().map(|&a| C64::new(a, 0.0)).collect();
    let roots = poly::aberth(&c, None)?;
    let mut xs: Vec<f64> = roots
        .iter()
        .filter(|y| y.im.abs() < 1e-7 * (1.0 + y.norm()))
        .map(|y| y.re + 2.0 * t * data.eval_u0(y.re))
        .collect();
    xs.sort_by(f64::total_cmp);
    Ok(xs)
}

/// Real zeros of `x ↦ discriminant_at(t, x)` on `[a, b]`, located by sign
/// changes on a uniform grid of `n` cells and refined by bisection.
pub fn discriminant_zeros_in_x(
    data: &RationalInitialData,
    t: f64,
    a: f64,
    b: f64,
    n: usize,
) -> Result<Vec<f64>> {
    let f = |x: f64| -> Result<f64> { Ok(discriminant_at(data, LaxOleinikPoint::new(t, x)?)) };
    let h = (b - a) / n as f64;
    let mut out = Vec::new();
    let mut xl = a;
    let mut fl = f(xl)?;
    for k in 1..=n {
        let xr = a + h * k as f64;
        let fr = f(xr)?;
        if fl == 0.0 {
            out.push(xl);
        } else if fl * fr < 0.0 {
            let (mut lo, mut hi, mut flo) = (xl, xr, fl);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                let fm = f(mid)?;
                if fm * flo <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            out.push(0.5 * (lo + hi));
        }
        xl = xr;
        fl = fr;
    }
    Ok(out)
}

/// One traced caustic curve: polyline of `(t, x)` points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CausticCurve {
    pub points: Vec<(f64, f64)>,
}

/// Extracts the caustic curves in a window by marching squares on the
/// sign of the discriminant, keeping only crossings across which the number
/// of real roots changes.
///
/// `resolution = (nt, nx)` is the number of grid cells in each direction.
/// Times are clamped to `t >= 1e-9` since the objective needs `t > 0`.
pub fn caustic_scan(
    data: &RationalInitialData,
    t_range: (f64, f64),
    x_range: (f64, f64),
    resolution: (usize, usize),
) -> Result<Vec<CausticCurve>> {
    use rayon::prelude::*;
    let (nt, nx) = resolution;
    if nt == 0 || nx == 0 {
        return Err(Error::InvalidConfig("caustic_scan resolution must be positive".into()));
    }
    let t0 = t_range.0.max(1e-9);
    let t1 = t_range.1.max(t0);
    let tv: Vec<f64> = (0..=nt).map(|i| t0 + (t1 - t0) * i as f64 / nt as f64).collect();
    let xv: Vec<f64> = (0..=nx)
        .map(|k| x_range.0 + (x_range.1 - x_range.0) * k as f64 / nx as f64)
        .collect();
    let grid: Vec<Vec<(f64, usize)>> = tv
        .par_iter()
        .map(|&t| {
            xv.iter()
                .map(|&x| {
                    let pt = LaxOleinikPoint { t, x };
                    let d = discriminant_at(data, pt);
                    let j = count_real_roots(data, pt).unwrap_or(usize::MAX);
                    (d, j)
                })
                .collect()
        })
        .collect();

    let disc = |t: f64, x: f64| discriminant_at(data, LaxOleinikPoint { t, x });
    let refine = |(ta, xa): (f64, f64), (tb, xb): (f64, f64), da: f64| -> (f64, f64) {
        let (mut lo, mut hi, mut dlo) = (0.0f64, 1.0f64, da);
        for _ in 0..40 {
            let m = 0.5 * (lo + hi);
            let dm = disc(ta + m * (tb - ta), xa + m * (xb - xa));
            if dm * dlo <= 0.0 {
                hi = m;
            } else {
                lo = m;
                dlo = dm;
            }
        }
        let m = 0.5 * (lo + hi);
        (ta + m * (tb - ta), xa + m * (xb - xa))
    };

    // Edge identifiers: horizontal edge (i, k)→(i, k+1) and vertical edge
    // (i, k)→(i+1, k).
    #[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
    enum Edge {
        H(usize, usize),
        V(usize, usize),
    }
    let ends = |e: Edge| match e {
        Edge::H(i, k) => ((i, k), (i, k + 1)),
        Edge::V(i, k) => ((i, k), (i + 1, k)),
    };
    let crosses = |e: Edge| {
        let ((i0, k0), (i1, k1)) = ends(e);
        let (d0, j0) = grid[i0][k0];
        let (d1, j1) = grid[i1][k1];
        (d0 * d1 < 0.0 || (d0 == 0.0) != (d1 == 0.0)) && j0 != j1
    };
    let mut segments: Vec<(Edge, Edge)> = Vec::new();
    for i in 0..nt {
        for k in 0..nx {
            let edges = [Edge::H(i, k), Edge::V(i, k + 1), Edge::H(i + 1, k), Edge::V(i, k)];
            let active: Vec<Edge> = edges.iter().copied().filter(|&e| crosses(e)).collect();
            match active.len() {
                2 => segments.push((active[0], active[1])),
                4 => {
                    // Saddle cell: pair edges according to the centre sign.
                    let centre = disc(0.5 * (tv[i] + tv[i + 1]), 0.5 * (xv[k] + xv[k + 1]));
                    let corner = grid[i][k].0;
                    if centre * corner > 0.0 {
                        segments.push((edges[0], edges[1]));
                        segments.push((edges[2], edges[3]));
                    } else {
                        segments.push((edges[0], edges[3]));
                        segments.push((edges[1], edges[2]));
                    }
                }
                _ => {}
            }
        }
    }

    let point_of = |e: Edge| {
        let ((i0, k0), (i1, k1)) = ends(e);
        refine((tv[i0], xv[k0]), (tv[i1], xv[k1]), grid[i0][k0].0)
    };
    // Link segments sharing an edge into polylines.
    let mut adjacency: std::collections::HashMap<Edge, Vec<usize>> = Default::default();
    for (s, (a, b)) in segments.iter().enumerate() {
        adjacency.entry(*a).or_default().push(s);
        adjacency.entry(*b).or_default().push(s);
    }
    let mut used = vec![false; segments.len()];
    let mut curves = Vec::new();
    for s0 in 0..segments.len() {
        if used[s0] {
            continue;
        }
        used[s0] = true;
        let mut chain: std::collections::VecDeque<Edge> =
            [segments[s0].0, segments[s0].1].into_iter().collect();
        for forward in [true, false] {
            loop {
                let tip = if forward { *chain.back().unwrap() } else { *chain.front().unwrap() };
                let next = adjacency[&tip].iter().copied().find(|&s| !used[s]);
                let Some(s) = next else { break };
                used[s] = true;
                let (a, b) = segments[s];
                let other = if a == tip { b } else { a };
                if forward {
                    chain.push_back(other);
                } else {
                    chain.push_front(other);
                }
            }
        }
        curves.push(CausticCurve {
            points: chain.into_iter().map(point_of).collect(),
        });
    }
    Ok(curves)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lorentzian_polynomial() {
        let d = RationalInitialData::lorentzian();
        let pt = LaxOleinikPoint::new(0.7, 0.3).unwrap();
        let c = characteristic_poly(&d, pt);
        let e = [1.0, -0.3, 1.0, 4.0 * 0.7 - 0.3];
        for (a, b) in c.iter().zip(e) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn pre_breaking_single_branch() {
        let d = RationalInitialData::lorentzian();
        let b = solve_branches(&d, LaxOleinikPoint::new(0.1, 0.0).unwrap()).unwrap();
        assert_eq!(b.j, 0);
        assert!(b.real_roots[0].abs() < 0.5);
        assert!(b.global_identity_residual(&d) < 1e-12);
        assert!(discriminant_at(&d, LaxOleinikPoint::new(0.1, 0.0).unwrap()) != 0.0);
    }

    #[test]
    fn ubar_alternating_sum() {
        let b = BranchData {
            t: 1.0,
            x: 0.0,
            real_roots: vec![3.0, 2.0, 1.0],
            complex_roots: vec![],
            j: 1,
            branch_values: vec![1.0, 2.0, 4.0],
            min_root_separation: 1.0,
        };
        assert_eq!(weak_limit_ubar(&b), 3.0);
    }
}
