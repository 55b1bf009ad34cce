//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! Two drivers share the rule: a scalar real version used for the phase
//! integrals and `L²` norms, and a vector-valued complex version in which all
//! components share one subdivision (used for rows of contour integrals,
//! whose entries have the same exponential weight).

// The rule's nodes and weights are quoted to more digits than an f64 holds.
#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::rational::C64;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// The 15 abscissae of the rule on `[-1, 1]` (ascending).
pub fn gk15_nodes() -> [f64; 15] {
    let mut n = [0.0; 15];
    for k in 0..7 {
        n[k] = -XGK[k];
        n[14 - k] = XGK[k];
    }
    n[7] = 0.0;
    n
}

fn gk15_scalar<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let d = h * XGK[j];
        let s = f(c - d) + f(c + d);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

struct Piece<T> {
    a: f64,
    b: f64,
    value: T,
    err: f64,
    tag: usize,
}

impl<T> PartialEq for Piece<T> {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl<T> Eq for Piece<T> {}
impl<T> PartialOrd for Piece<T> {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl<T> Ord for Piece<T> {
    fn cmp(&self, o: &Self) -> Ordering {
        self.err.total_cmp(&o.err)
    }
}

/// Adaptive integral of a real function on `[a, b]`.
///
/// Stops when the summed error estimate is below
/// `max(abs_tol, rel_tol·|I|)`; fails after `max_intervals` subdivisions.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> Result<(f64, f64)> {
    let (v, e) = gk15_scalar(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Piece { a, b, value: v, err: e, tag: 0 });
    let mut total = v;
    let mut err = e;
    let mut count = 1;
    while err > abs_tol.max(rel_tol * total.abs()) {
        if count >= max_intervals {
            return Err(Error::QuadratureFailure(format!(
                "{count} subintervals on [{a}, {b}], error estimate {err:e}"
            )));
        }
        let p = heap.pop().expect("heap is non-empty");
        let m = 0.5 * (p.a + p.b);
        let (v1, e1) = gk15_scalar(&f, p.a, m);
        let (v2, e2) = gk15_scalar(&f, m, p.b);
        total += v1 + v2 - p.value;
        err += e1 + e2 - p.err;
        heap.push(Piece { a: p.a, b: m, value: v1, err: e1, tag: 0 });
        heap.push(Piece { a: m, b: p.b, value: v2, err: e2, tag: 0 });
        count += 1;
        if err < 0.0 {
            err = heap.iter().map(|p| p.err).sum();
        }
    }
    // Re-sum to limit accumulated roundoff in the running totals.
    let total: f64 = heap.iter().map(|p| p.value).sum();
    let err: f64 = heap.iter().map(|p| p.err).sum();
    Ok((total, err))
}

/// Integrand evaluation for [`integrate_vec`]: given a piece tag and a
/// parameter value, writes the `dim` components of the integrand.
pub trait VecIntegrand {
    fn dim(&self) -> usize;
    fn eval(&self, tag: usize, s: f64, out: &mut [C64]);
}

fn gk15_vec<F: VecIntegrand>(f: &F, tag: usize, a: f64, b: f64, buf: &mut [C64]) -> (Vec<C64>, f64) {
    let dim = f.dim();
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut k = vec![C64::new(0.0, 0.0); dim];
    let mut g = vec![C64::new(0.0, 0.0); dim];
    f.eval(tag, c, buf);
    for i in 0..dim {
        k[i] += buf[i] * WGK[7];
        g[i] += buf[i] * WG[3];
    }
    let mut tmp = vec![C64::new(0.0, 0.0); dim];
    for j in 0..7 {
        let d = h * XGK[j];
        f.eval(tag, c - d, buf);
        f.eval(tag, c + d, &mut tmp);
        for i in 0..dim {
            let s = buf[i] + tmp[i];
            k[i] += s * WGK[j];
            if j % 2 == 1 {
                g[i] += s * WG[j / 2];
            }
        }
    }
    let mut err = 0.0f64;
    for i in 0..dim {
        err = err.max(((k[i] - g[i]) * h).norm());
        k[i] *= h;
    }
    (k, err)
}

/// Adaptive integral of a vector-valued complex integrand over a union of
/// tagged parameter intervals `(tag, a, b)`.
///
/// Intervals are skipped entirely when `skip(tag)` is true.  The error is
/// measured in the max-norm over components and the driver stops when the
/// summed estimate is below `abs_tol`.
pub fn integrate_vec<F: VecIntegrand>(
    f: &F,
    pieces: &[(usize, f64, f64)],
    abs_tol: f64,
    max_intervals: usize,
) -> Result<(Vec<C64>, f64)> {
    let dim = f.dim();
    let mut buf = vec![C64::new(0.0, 0.0); dim];
    let mut heap = BinaryHeap::new();
    let mut err = 0.0;
    for &(tag, a, b) in pieces {
        let (v, e) = gk15_vec(f, tag, a, b, &mut buf);
        err += e;
        heap.push(Piece { a, b, value: v, err: e, tag });
    }
    let mut count = heap.len();
    while err > abs_tol {
        if count >= max_intervals {
            return Err(Error::QuadratureFailure(format!(
                "{count} subintervals, error estimate {err:e} > {abs_tol:e}"
            )));
        }
        let Some(p) = heap.pop() else { break };
        let m = 0.5 * (p.a + p.b);
        let (v1, e1) = gk15_vec(f, p.tag, p.a, m, &mut buf);
        let (v2, e2) = gk15_vec(f, p.tag, m, p.b, &mut buf);
        err += e1 + e2 - p.err;
        heap.push(Piece { a: p.a, b: m, value: v1, err: e1, tag: p.tag });
        heap.push(Piece { a: m, b: p.b, value: v2, err: e2, tag: p.tag });
        count += 1;
        if count % 64 == 0 {
            err = heap.iter().map(|p| p.err).sum();
        }
    }
    let mut total = vec![C64::new(0.0, 0.0); dim];
    let mut err = 0.0;
    for p in heap.iter() {
        for i in 0..dim {
            total[i] += p.value[i];
        }
        err += p.err;
    }
    Ok((total, err))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let (v, _) = integrate(|x| x.powi(6) - x, 0.0, 2.0, 1e-14, 1e-14, 100).unwrap();
        assert!((v - (128.0 / 7.0 - 2.0)).abs() < 1e-12);
    }

    #[test]
    fn peaked_integrand() {
        let (v, _) = integrate(|x| 1.0 / (1e-4 + x * x), -1.0, 1.0, 1e-12, 1e-12, 10_000).unwrap();
        let exact = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        assert!((v - exact).abs() < 1e-9 * exact);
    }

    struct Osc;
    impl VecIntegrand for Osc {
        fn dim(&self) -> usize {
            2
        }
        fn eval(&self, _tag: usize, s: f64, out: &mut [C64]) {
            out[0] = C64::new(0.0, 5.0 * s).exp();
            out[1] = C64::new(s, 0.0);
        }
    }

    #[test]
    fn vector_driver() {
        let (v, _) = integrate_vec(&Osc, &[(0, 0.0, 1.0), (0, 1.0, 2.0)], 1e-13, 1000).unwrap();
        let exact = (C64::new(0.0, 10.0).exp() - 1.0) / C64::new(0.0, 5.0);
        assert!((v[0] - exact).norm() < 1e-12);
        assert!((v[1].re - 2.0).abs() < 1e-13);
    }
}
