use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use super::fft::fft_in_place;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumSource {
    Analytic,
    DiscreteTransform,
}

/// `|F(s)|` on a grid symmetric about `s = 0`, ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumEstimate {
    pub frequencies: Vec<f64>,
    pub magnitudes: Vec<f64>,
    pub source: SpectrumSource,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BandwidthCriterion {
    /// Largest `|s|` where `|F| ≥ ratio·max|F|`.
    #[default]
    Peak,
    /// Smallest `s_c` with `∫_{−s_c}^{s_c} |F|² ≥ (1 − ratio)∫|F|²`.
    Integral,
}

/// Peak-relative effective bandwidth `W = s_max/(2π)`.
pub fn effective_bandwidth(spec: &SpectrumEstimate, ratio: f64) -> Result<f64> {
    effective_bandwidth_with(spec, ratio, BandwidthCriterion::Peak)
}

pub fn effective_bandwidth_with(
    spec: &SpectrumEstimate,
    ratio: f64,
    criterion: BandwidthCriterion,
) -> Result<f64> {
    Ok(cutoff_index(spec, ratio, criterion)?.1 / (2.0 * PI))
}

/// Returns the grid index and `|s|` of the cut-off.
fn cutoff_index(spec: &SpectrumEstimate, ratio: f64, criterion: BandwidthCriterion) -> Result<(usize, f64)> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::InvalidParameter {
            name: "threshold",
            reason: "must lie in (0, 1)",
        });
    }
    if spec.frequencies.len() != spec.magnitudes.len() {
        return Err(Error::LengthMismatch {
            left: spec.frequencies.len(),
            right: spec.magnitudes.len(),
        });
    }
    let peak = spec.magnitudes.iter().copied().fold(0.0, f64::max);
    if spec.magnitudes.is_empty() || !(peak > 0.0) {
        return Err(Error::EmptySpectrum);
    }
    let edge = spec.frequencies.iter().fold(0.0f64, |m, s| m.max(s.abs()));
    let found = match criterion {
        BandwidthCriterion::Peak => {
            let thr = ratio * peak;
            spec.frequencies
                .iter()
                .zip(&spec.magnitudes)
                .enumerate()
                .filter(|(_, (_, &m))| m >= thr)
                .map(|(i, (s, _))| (i, s.abs()))
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .expect("peak itself passes the threshold")
        }
        BandwidthCriterion::Integral => {
            // Energy accumulated outward from s = 0, pairing ±s.
            let mut order: Vec<usize> = (0..spec.frequencies.len()).collect();
            order.sort_by(|&a, &b| spec.frequencies[a].abs().total_cmp(&spec.frequencies[b].abs()));
            let total: f64 = spec.magnitudes.iter().map(|m| m * m).sum();
            let target = (1.0 - ratio) * total;
            let mut acc = 0.0;
            let mut hit = order[order.len() - 1];
            for &i in &order {
                acc += spec.magnitudes[i] * spec.magnitudes[i];
                if acc >= target {
                    hit = i;
                    break;
                }
            }
            (hit, spec.frequencies[hit].abs())
        }
    };
    if found.1 >= edge {
        return Err(Error::SpectrumTooNarrow { s_max: edge });
    }
    Ok(found)
}

/// Samples `mag` on `[−s_max, s_max]` with `points_per_side` steps per half.
pub fn analytic_spectrum(mag: impl Fn(f64) -> f64, s_max: f64, points_per_side: usize) -> SpectrumEstimate {
    let p = points_per_side as i64;
    let frequencies: Vec<f64> = (-p..=p).map(|k| s_max * k as f64 / p as f64).collect();
    let magnitudes = frequencies.iter().map(|&s| mag(s)).collect();
    SpectrumEstimate {
        frequencies,
        magnitudes,
        source: SpectrumSource::Analytic,
    }
}

const ANALYTIC_POINTS: usize = 20_000;

/// Effective bandwidth of an analytically known magnitude `|F(s)|`.
///
/// The scan range starts at `s_start` and doubles until the cut-off sits in the
/// inner three quarters of the grid. For the peak criterion the crossing is then
/// refined by bisection on `mag` itself.
pub fn analytic_bandwidth(
    mag: impl Fn(f64) -> f64,
    ratio: f64,
    criterion: BandwidthCriterion,
    s_start: f64,
) -> Result<f64> {
    if !(s_start > 0.0 && s_start.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "s_start",
            reason: "must be positive and finite",
        });
    }
    let mut s_max = s_start;
    for _ in 0..48 {
        let spec = analytic_spectrum(&mag, s_max, ANALYTIC_POINTS);
        match cutoff_index(&spec, ratio, criterion) {
            Ok((i, s)) if s <= 0.75 * s_max => {
                if criterion == BandwidthCriterion::Integral {
                    return Ok(s / (2.0 * PI));
                }
                let peak = spec.magnitudes.iter().copied().fold(0.0, f64::max);
                let thr = ratio * peak;
                // Walk outward on the side where the index was found.
                let sign = if spec.frequencies[i] < 0.0 { -1.0 } else { 1.0 };
                let step = s_max / ANALYTIC_POINTS as f64;
                let (mut lo, mut hi) = (s, s + step);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if mag(sign * mid) >= thr {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                return Ok(lo / (2.0 * PI));
            }
            Ok(_) | Err(Error::SpectrumTooNarrow { .. }) => s_max *= 2.0,
            Err(e) => return Err(e),
        }
    }
    Err(Error::SpectrumTooNarrow { s_max })
}

/// Minimum number of samples accepted by [`discrete_spectrum`].
pub const MIN_DISCRETE_POINTS: usize = 4096;
const PAD_FACTOR: usize = 64;
const MAX_FFT_LEN: usize = 1 << 22;

/// `|Σⱼ wⱼ g(tⱼ) e^{istⱼ}|` with trapezoid weights on a uniform grid, evaluated
/// by a zero-padded FFT on `s ∈ (−π/h, π/h)`.
pub fn discrete_spectrum(times: &[f64], values: &[f64]) -> Result<SpectrumEstimate> {
    if times.len() != values.len() {
        return Err(Error::LengthMismatch {
            left: times.len(),
            right: values.len(),
        });
    }
    let n = times.len();
    if n < MIN_DISCRETE_POINTS {
        return Err(Error::GridTooCoarse {
            points: n,
            required: MIN_DISCRETE_POINTS,
        });
    }
    let h = (times[n - 1] - times[0]) / (n - 1) as f64;
    let uniform = times
        .windows(2)
        .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h);
    if !(h > 0.0) || !uniform {
        return Err(Error::InvalidParameter {
            name: "times",
            reason: "discrete spectrum needs a uniform ascending grid",
        });
    }
    let len = (n.next_power_of_two() * PAD_FACTOR).min(MAX_FFT_LEN);
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    for (j, &v) in values.iter().enumerate() {
        let w = if j == 0 || j == n - 1 { 0.5 * h } else { h };
        buf[j] = Complex64::new(w * v, 0.0);
    }
    fft_in_place(&mut buf, 1.0);
    let half = (len / 2) as i64;
    let ds = 2.0 * PI / (len as f64 * h);
    let mut frequencies = Vec::with_capacity(len - 1);
    let mut magnitudes = Vec::with_capacity(len - 1);
    for k in -(half - 1)..half {
        let idx = if k < 0 { (len as i64 + k) as usize } else { k as usize };
        frequencies.push(k as f64 * ds);
        magnitudes.push(buf[idx].norm());
    }
    Ok(SpectrumEstimate {
        frequencies,
        magnitudes,
        source: SpectrumSource::DiscreteTransform,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qbm::{Coefficient, OhmicModel, Preset};

    #[test]
    fn boxcar_spectrum() {
        let s0 = 3.0;
        let spec = analytic_spectrum(|s| if s.abs() <= s0 { 1.0 } else { 0.0 }, 10.0, 1000);
        for ratio in [1e-4, 0.5, 0.999] {
            let w = effective_bandwidth(&spec, ratio).unwrap();
            assert!((w - s0 / (2.0 * PI)).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_spectra() {
        let zero = analytic_spectrum(|_| 0.0, 1.0, 10);
        assert_eq!(effective_bandwidth(&zero, 0.1), Err(Error::EmptySpectrum));
        let flat = analytic_spectrum(|_| 1.0, 1.0, 10);
        assert!(matches!(effective_bandwidth(&flat, 0.1), Err(Error::SpectrumTooNarrow { .. })));
        assert!(effective_bandwidth(&flat, 1.5).is_err());
    }

    #[test]
    fn markovian_capital_lambda_bandwidths() {
        let m = OhmicModel::preset(Preset::Markovian);
        let tbar = Preset::Markovian.tbar();
        let mag = |s: f64| m.fourier(Coefficient::CapitalLambda, tbar, s).norm();
        let w1 = analytic_bandwidth(mag, 0.1, BandwidthCriterion::Peak, 10.0).unwrap();
        let w2 = analytic_bandwidth(mag, 0.01, BandwidthCriterion::Peak, 10.0).unwrap();
        assert!((w1 * 2.0 * PI / 19.4 - 1.0).abs() < 0.02, "{}", w1 * 2.0 * PI);
        assert!((w2 * 2.0 * PI / 196.0 - 1.0).abs() < 0.02, "{}", w2 * 2.0 * PI);
    }

    #[test]
    fn integral_criterion_is_monotone_in_ratio() {
        let m = OhmicModel::preset(Preset::Markovian);
        let tbar = Preset::Markovian.tbar();
        let mag = |s: f64| m.fourier(Coefficient::Lambda, tbar, s).norm();
        let a = analytic_bandwidth(mag, 1e-2, BandwidthCriterion::Integral, 10.0).unwrap();
        let b = analytic_bandwidth(mag, 1e-3, BandwidthCriterion::Integral, 10.0).unwrap();
        assert!(b > a && a > 0.0);
    }

    #[test]
    fn discrete_matches_analytic_for_small_lambda() {
        let m = OhmicModel::preset(Preset::Markovian);
        let tbar = Preset::Markovian.tbar();
        let n = 4096;
        let times: Vec<f64> = (0..n).map(|i| tbar * i as f64 / (n - 1) as f64).collect();
        let values: Vec<f64> = times.iter().map(|&t| m.lambda_theor(t)).collect();
        let disc = discrete_spectrum(&times, &values).unwrap();
        for ratio in [0.1, 0.01] {
            let wd = effective_bandwidth(&disc, ratio).unwrap();
            let wa = analytic_bandwidth(
                |s| m.fourier(Coefficient::Lambda, tbar, s).norm(),
                ratio,
                BandwidthCriterion::Peak,
                10.0,
            )
            .unwrap();
            assert!((wd / wa - 1.0).abs() < 0.02, "ratio {ratio}: {wd} vs {wa}");
        }
    }

    #[test]
    fn gaussian_pulse_width() {
        let tau = 0.7;
        let n = 8192;
        let times: Vec<f64> = (0..n).map(|i| -8.0 * tau + 16.0 * tau * i as f64 / (n - 1) as f64).collect();
        let values: Vec<f64> = times.iter().map(|t| libm::exp(-t * t / (2.0 * tau * tau))).collect();
        let spec = discrete_spectrum(&times, &values).unwrap();
        let w = effective_bandwidth(&spec, libm::exp(-0.5)).unwrap();
        assert!((w * 2.0 * PI * tau - 1.0).abs() < 0.02);
    }

    #[test]
    fn discrete_needs_dense_uniform_grid() {
        let t: Vec<f64> = (0..100).map(|i| i as f64).collect();
        assert!(matches!(
            discrete_spectrum(&t, &t),
            Err(Error::GridTooCoarse { points: 100, required: 4096 })
        ));
    }
}
