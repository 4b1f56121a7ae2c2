//! Globally adaptive Gauss-Kronrod (7/15) quadrature for vector-valued
//! integrands. Serves as the independent oracle for every integral identity in
//! the crate and as the workhorse of the exact cumulant propagator.

use alloc::collections::BinaryHeap;
use core::cmp::Ordering;

use crate::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-12,
            max_subdivisions: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult<const N: usize> {
    pub value: [f64; N],
    pub error: f64,
    pub subdivisions: usize,
}

struct Segment<const N: usize> {
    a: f64,
    b: f64,
    value: [f64; N],
    error: f64,
}

impl<const N: usize> PartialEq for Segment<N> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<const N: usize> Eq for Segment<N> {}
impl<const N: usize> PartialOrd for Segment<N> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<const N: usize> Ord for Segment<N> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = libm::pow(200.0 * scaled / res_asc, 1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

fn gk15<const N: usize, F>(f: &mut F, a: f64, b: f64) -> Segment<N>
where
    F: FnMut(f64) -> [f64; N],
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut values = [[0.0; N]; 15];
    values[7] = f(center);
    for j in 0..7 {
        let dx = half * XGK[j];
        values[j] = f(center - dx);
        values[14 - j] = f(center + dx);
    }

    let mut value = [0.0; N];
    let mut error: f64 = 0.0;
    for c in 0..N {
        let fc = values[7][c];
        let mut kronrod = WGK[7] * fc;
        let mut gauss = WG[3] * fc;
        let mut res_abs = (WGK[7] * fc).abs();
        for j in 0..7 {
            let pair = values[j][c] + values[14 - j][c];
            kronrod += WGK[j] * pair;
            res_abs += WGK[j] * (values[j][c].abs() + values[14 - j][c].abs());
            if j % 2 == 1 {
                gauss += WG[j / 2] * pair;
            }
        }
        let mean = 0.5 * kronrod;
        let mut res_asc = WGK[7] * (fc - mean).abs();
        for j in 0..7 {
            res_asc += WGK[j] * ((values[j][c] - mean).abs() + (values[14 - j][c] - mean).abs());
        }
        let err = rescale_error(
            (kronrod - gauss) * half,
            res_abs * half.abs(),
            res_asc * half.abs(),
        );
        value[c] = kronrod * half;
        error = error.max(err);
    }
    Segment { a, b, value, error }
}

/// Integrates a vector-valued function over `[a, b]`.
///
/// The error control acts on the largest component error; the relative
/// tolerance is applied to the largest component magnitude.
pub fn integrate_vec<const N: usize, F>(
    mut f: F,
    a: f64,
    b: f64,
    opts: &QuadOptions,
) -> Result<QuadResult<N>>
where
    F: FnMut(f64) -> [f64; N],
{
    if a == b {
        return Ok(QuadResult {
            value: [0.0; N],
            error: 0.0,
            subdivisions: 0,
        });
    }
    let first = gk15(&mut f, a, b);
    let mut total = first.value;
    let mut total_err = first.error;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    let mut subdivisions = 1;

    loop {
        let magnitude = total.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let target = opts.abs_tol.max(opts.rel_tol * magnitude);
        if total_err <= target {
            break;
        }
        if subdivisions >= opts.max_subdivisions {
            return Err(Error::QuadratureFailure {
                estimate: total_err,
            });
        }
        let worst = heap.pop().expect("heap never empties");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval collapsed to adjacent floats; accept what we have.
            heap.push(worst);
            break;
        }
        let left = gk15(&mut f, worst.a, mid);
        let right = gk15(&mut f, mid, worst.b);
        for c in 0..N {
            total[c] += left.value[c] + right.value[c] - worst.value[c];
        }
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        subdivisions += 1;
    }

    // Resum to avoid drift from the incremental updates.
    let mut value = [0.0; N];
    let mut error = 0.0;
    for seg in heap.iter() {
        for c in 0..N {
            value[c] += seg.value[c];
        }
        error += seg.error;
    }
    Ok(QuadResult {
        value,
        error,
        subdivisions,
    })
}

/// Scalar convenience wrapper around [`integrate_vec`].
pub fn integrate<F>(mut f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    integrate_vec(|t| [f(t)], a, b, opts).map(|r| r.value[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn polynomial_is_exact() {
        let v = integrate(|x| x * x * x - 2.0 * x, 0.0, 2.0, &QuadOptions::default()).unwrap();
        assert!((v - 0.0).abs() < 1e-14);
    }

    #[test]
    fn oscillatory_integrand() {
        let v = integrate(|x| libm::sin(50.0 * x), 0.0, PI, &QuadOptions::default()).unwrap();
        assert!(v.abs() < 1e-10);
        let w = integrate(|x| libm::exp(-x) * libm::cos(x), 0.0, 40.0, &QuadOptions::default())
            .unwrap();
        assert!((w - 0.5).abs() < 1e-10);
    }

    #[test]
    fn reversed_bounds_flip_sign() {
        let opts = QuadOptions::default();
        let fwd = integrate(libm::exp, 0.0, 1.0, &opts).unwrap();
        let rev = integrate(libm::exp, 1.0, 0.0, &opts).unwrap();
        assert!((fwd + rev).abs() < 1e-14);
        assert!((fwd - (core::f64::consts::E - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn vector_components_are_independent() {
        let r = integrate_vec(
            |x| [1.0, x, libm::sin(x)],
            0.0,
            PI,
            &QuadOptions::default(),
        )
        .unwrap();
        assert!((r.value[0] - PI).abs() < 1e-13);
        assert!((r.value[1] - PI * PI / 2.0).abs() < 1e-12);
        assert!((r.value[2] - 2.0).abs() < 1e-13);
    }

    #[test]
    fn subdivision_budget_is_enforced() {
        let opts = QuadOptions {
            abs_tol: 1e-30,
            rel_tol: 0.0,
            max_subdivisions: 3,
        };
        let r = integrate(libm::sqrt, 0.0, 1.0, &opts);
        assert!(matches!(r, Err(Error::QuadratureFailure { .. })));
    }
}
