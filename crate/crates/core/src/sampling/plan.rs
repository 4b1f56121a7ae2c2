use alloc::vec::Vec;

/// Number of grid points `n/(2W)` with `1 ≤ n` that fit in `(0, L]`,
/// i.e. `floor(2WL)`. The origin sample is not counted.
pub fn uniform_plan_count(w: f64, support_len: f64) -> usize {
    if !(w > 0.0 && support_len > 0.0) {
        return 0;
    }
    let x = 2.0 * w * support_len;
    // An endpoint that lands on the grid up to rounding counts as on-grid.
    let n = libm::floor(x * (1.0 + 4.0 * f64::EPSILON));
    n as usize
}

/// Sample times `n/(2W)`, `n = 1..=floor(2WL)`.
pub fn uniform_plan(w: f64, support_len: f64) -> Vec<f64> {
    let h = 1.0 / (2.0 * w);
    (1..=uniform_plan_count(w, support_len))
        .map(|n| n as f64 * h)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn caption_counts() {
        assert_eq!(uniform_plan_count(19.4 / (2.0 * PI), 1.2), 7);
        assert_eq!(uniform_plan_count(196.0 / (2.0 * PI), 1.2), 74);
        assert_eq!(uniform_plan_count(0.16 / (2.0 * PI), 120.0), 6);
    }

    #[test]
    fn on_grid_endpoint_is_included() {
        let p = uniform_plan(2.5, 1.0);
        assert_eq!(p.len(), 5);
        assert_eq!(*p.last().unwrap(), 1.0);
        assert!(uniform_plan(0.0, 1.0).is_empty());
    }
}
