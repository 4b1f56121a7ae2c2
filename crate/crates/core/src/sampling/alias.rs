//! Numerical injectivity test for a characteristic function on a finite
//! frequency window.
//!
//! The curve `ω ↦ φ(ω)` is traced as a polyline and any crossing between
//! non-adjacent segments is refined with a damped Newton iteration on
//! `φ(a) = φ(b)`. A confirmed solution with `a ≠ b` is a collision.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::random::SpacingDistribution;
use crate::Result;

/// Frequency window half-width in units of `1/h`.
pub const OMEGA_MAX_FACTOR: f64 = 100.0;
const TRACE_POINTS: usize = 200_000;
const POLYLINE_SEGMENTS: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Collision {
    pub omega_a: f64,
    pub omega_b: f64,
    pub value: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AliasVerdict {
    pub alias_free: bool,
    pub omega_max: f64,
    pub segments: usize,
    pub collision: Option<Collision>,
}

struct Vertex {
    omega: f64,
    phi: Complex64,
}

fn trace(dist: &SpacingDistribution, omega_max: f64) -> Result<Vec<Vertex>> {
    let step = 2.0 * omega_max / TRACE_POINTS as f64;
    let mut fine = Vec::with_capacity(TRACE_POINTS + 1);
    for i in 0..=TRACE_POINTS {
        let omega = -omega_max + i as f64 * step;
        fine.push(Vertex {
            omega,
            phi: dist.characteristic(omega)?,
        });
    }
    let arc: f64 = fine.windows(2).map(|w| (w[1].phi - w[0].phi).norm()).sum();
    // Resample so that segments have roughly equal length in the φ-plane.
    let target = arc / POLYLINE_SEGMENTS as f64;
    let mut out = Vec::with_capacity(POLYLINE_SEGMENTS + 2);
    let mut acc = 0.0;
    let last = fine.len() - 1;
    let mut prev = fine[0].phi;
    for (i, v) in fine.into_iter().enumerate() {
        acc += (v.phi - prev).norm();
        prev = v.phi;
        if i == 0 || i == last || acc >= target {
            out.push(v);
            acc = 0.0;
        }
    }
    Ok(out)
}

fn cross(a: Complex64, b: Complex64) -> f64 {
    a.re * b.im - a.im * b.re
}

/// Intersection parameters `(u, v)` in `[0, 1]²` of segments `p0p1` and `q0q1`.
fn segment_intersection(p0: Complex64, p1: Complex64, q0: Complex64, q1: Complex64) -> Option<(f64, f64)> {
    let r = p1 - p0;
    let s = q1 - q0;
    let denom = cross(r, s);
    if denom.abs() <= 1e-300 {
        return None;
    }
    let d = q0 - p0;
    let u = cross(d, s) / denom;
    let v = cross(d, r) / denom;
    ((0.0..=1.0).contains(&u) && (0.0..=1.0).contains(&v)).then_some((u, v))
}

fn refine(dist: &SpacingDistribution, mut a: f64, mut b: f64, omega_max: f64, h: f64) -> Option<Collision> {
    let eps = 1e-6 / h;
    let deriv = |w: f64| -> Option<Complex64> {
        Some((dist.characteristic(w + eps).ok()? - dist.characteristic(w - eps).ok()?) / (2.0 * eps))
    };
    for _ in 0..60 {
        let f = dist.characteristic(a).ok()? - dist.characteristic(b).ok()?;
        if f.norm() <= 1e-13 {
            break;
        }
        let da = deriv(a)?;
        let db = -deriv(b)?;
        // Levenberg-Marquardt step on the 2×2 real system; the damping keeps
        // it defined when the curve retraces itself and J is rank one.
        let j = [[da.re, db.re], [da.im, db.im]];
        let jtj = [
            [j[0][0] * j[0][0] + j[1][0] * j[1][0], j[0][0] * j[0][1] + j[1][0] * j[1][1]],
            [j[0][1] * j[0][0] + j[1][1] * j[1][0], j[0][1] * j[0][1] + j[1][1] * j[1][1]],
        ];
        let mu = 1e-12 * (jtj[0][0] + jtj[1][1]);
        let g = [j[0][0] * f.re + j[1][0] * f.im, j[0][1] * f.re + j[1][1] * f.im];
        let (m00, m01, m10, m11) = (jtj[0][0] + mu, jtj[0][1], jtj[1][0], jtj[1][1] + mu);
        let det = m00 * m11 - m01 * m10;
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        a -= (m11 * g[0] - m01 * g[1]) / det;
        b -= (m00 * g[1] - m10 * g[0]) / det;
        if !(a.is_finite() && b.is_finite()) {
            return None;
        }
    }
    let fa = dist.characteristic(a).ok()?;
    let fb = dist.characteristic(b).ok()?;
    let limit = omega_max * (1.0 + 1e-9);
    let distinct = (a - b).abs() > 1e-6 * a.abs().max(b.abs()).max(1.0 / h);
    let converged = (fa - fb).norm() <= 1e-10 * fa.norm().max(1e-3);
    (distinct && converged && a.abs() <= limit && b.abs() <= limit).then_some(Collision {
        omega_a: a.min(b),
        omega_b: a.max(b),
        value: fa,
    })
}

/// Checks that `φ` takes no value twice on `|ω| ≤ 100/h`, `h` the mean spacing.
pub fn alias_free_check(dist: &SpacingDistribution) -> Result<AliasVerdict> {
    let h = dist.mean();
    let omega_max = OMEGA_MAX_FACTOR / h;
    let poly = trace(dist, omega_max)?;
    let nseg = poly.len() - 1;
    let cell = (1..poly.len())
        .map(|i| (poly[i].phi - poly[i - 1].phi).norm())
        .fold(0.0, f64::max)
        .max(1e-12);
    let key = |z: Complex64| (libm::floor(z.re / cell) as i64, libm::floor(z.im / cell) as i64);

    let mut grid: BTreeMap<(i64, i64), Vec<usize>> = BTreeMap::new();
    for i in 0..nseg {
        let (p0, p1) = (poly[i].phi, poly[i + 1].phi);
        let (k0, k1) = (key(p0), key(p1));
        let mut candidates: Vec<usize> = Vec::new();
        for x in k0.0.min(k1.0) - 1..=k0.0.max(k1.0) + 1 {
            for y in k0.1.min(k1.1) - 1..=k0.1.max(k1.1) + 1 {
                if let Some(list) = grid.get(&(x, y)) {
                    candidates.extend(list.iter().copied().filter(|&j| j + 1 < i));
                }
            }
        }
        candidates.sort_unstable();
        candidates.dedup();
        for j in candidates {
            let (q0, q1) = (poly[j].phi, poly[j + 1].phi);
            if let Some((u, v)) = segment_intersection(p0, p1, q0, q1) {
                let a = poly[i].omega + u * (poly[i + 1].omega - poly[i].omega);
                let b = poly[j].omega + v * (poly[j + 1].omega - poly[j].omega);
                if let Some(c) = refine(dist, a, b, omega_max, h) {
                    return Ok(AliasVerdict {
                        alias_free: false,
                        omega_max,
                        segments: nseg,
                        collision: Some(c),
                    });
                }
            }
        }
        for x in k0.0.min(k1.0)..=k0.0.max(k1.0) {
            for y in k0.1.min(k1.1)..=k0.1.max(k1.1) {
                grid.entry((x, y)).or_default().push(i);
            }
        }
    }
    Ok(AliasVerdict {
        alias_free: true,
        omega_max,
        segments: nseg,
        collision: None,
    })
}
