//! Truncated cardinal series `F(t) = Σₙ F(n/2W) sinc(2Wt − n)`.

use core::f64::consts::PI;

use super::SampledFunction;
use crate::{Error, Result};

/// `sin(πx)/(πx)` with `x` reduced to `[−½, ½]` before the sine, so the
/// zeros at nonzero integers are exact.
pub fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    let n = libm::round(x);
    let r = x - n;
    if r == 0.0 {
        return 0.0;
    }
    let s = libm::sin(PI * r);
    let signed = if (n as i64) % 2 == 0 { s } else { -s };
    signed / (PI * x)
}

/// Evaluates the cardinal series built from the stored samples. Samples are
/// taken to sit at `n/(2W)`; the function is zero outside its support.
pub fn shannon_reconstruct(f: &SampledFunction, t: f64) -> Result<f64> {
    let w = f.bandwidth_w.ok_or(Error::NoBandwidth)?;
    if t < f.support.0 || t > f.support.1 {
        return Ok(0.0);
    }
    let u = 2.0 * w * t;
    let nearest = libm::round(u);
    if (u - nearest).abs() <= 4.0 * f64::EPSILON * nearest.abs().max(1.0) {
        if let Some(i) = f.times.iter().position(|&ti| libm::round(2.0 * w * ti) == nearest) {
            return Ok(f.values[i]);
        }
    }
    let mut acc = 0.0;
    for (&ti, &vi) in f.times.iter().zip(&f.values) {
        let n = libm::round(2.0 * w * ti);
        acc += vi * sinc(u - n);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    #[test]
    fn sinc_values() {
        assert_eq!(sinc(0.0), 1.0);
        for k in 1..50 {
            assert_eq!(sinc(k as f64), 0.0);
            assert_eq!(sinc(-(k as f64)), 0.0);
        }
        assert!((sinc(0.5) - 2.0 / PI).abs() < 1e-16);
        assert!((sinc(-1.5) - (-2.0 / (3.0 * PI))).abs() < 1e-16);
    }

    #[test]
    fn interpolates_samples_exactly() {
        let w = 19.4 / (2.0 * PI);
        let h = 1.0 / (2.0 * w);
        let times: Vec<f64> = (0..8).map(|n| n as f64 * h).collect();
        let values: Vec<f64> = times.iter().map(|t| libm::exp(-t) + 0.1).collect();
        let f = SampledFunction::new(times.clone(), values.clone(), 1.2, 0.2, Some(w)).unwrap();
        for (t, v) in times.iter().zip(&values) {
            assert_eq!(shannon_reconstruct(&f, *t).unwrap(), *v);
        }
    }

    #[test]
    fn band_limited_sine() {
        let w = 0.5;
        let times: Vec<f64> = (0..=40).map(|n| n as f64).collect();
        let values: Vec<f64> = times.iter().map(|t| libm::sin(2.0 * PI * 0.3 * t)).collect();
        let f = SampledFunction::new(times, values, 40.0, 1.0, Some(w)).unwrap();
        for k in 0..=40 {
            let t = 19.0 + 0.05 * k as f64;
            let err = (shannon_reconstruct(&f, t).unwrap() - libm::sin(2.0 * PI * 0.3 * t)).abs();
            // A 41-term unwindowed series leaves about 2.2e-2 between samples.
            assert!(err < 2.5e-2, "t={t}, err={err}");
        }
    }

    #[test]
    fn zero_outside_support_and_requires_bandwidth() {
        let f = SampledFunction::new(alloc::vec![0.0, 0.5], alloc::vec![1.0, 1.0], 1.0, 0.2, Some(1.0)).unwrap();
        assert_eq!(shannon_reconstruct(&f, 1.5).unwrap(), 0.0);
        assert_eq!(shannon_reconstruct(&f, -0.1).unwrap(), 0.0);
        let g = SampledFunction::new(alloc::vec![0.0, 0.3], alloc::vec![1.0, 1.0], 1.0, 0.2, None).unwrap();
        assert_eq!(shannon_reconstruct(&g, 0.5), Err(Error::NoBandwidth));
    }
}
