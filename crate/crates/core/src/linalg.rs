//! Fixed-size 2×2 and 3×3 helpers. Row-major `[[f64; N]; N]` arrays.

pub type Vec2 = [f64; 2];
pub type Vec3 = [f64; 3];
pub type Mat2 = [[f64; 2]; 2];
pub type Mat3 = [[f64; 3]; 3];

pub const IDENTITY2: Mat2 = [[1.0, 0.0], [0.0, 1.0]];
pub const IDENTITY3: Mat3 = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

pub fn mat_vec<const N: usize>(a: &[[f64; N]; N], v: &[f64; N]) -> [f64; N] {
    let mut out = [0.0; N];
    for (o, row) in out.iter_mut().zip(a) {
        *o = row.iter().zip(v).map(|(x, y)| x * y).sum();
    }
    out
}

pub fn mat_mul<const N: usize>(a: &[[f64; N]; N], b: &[[f64; N]; N]) -> [[f64; N]; N] {
    let mut out = [[0.0; N]; N];
    for i in 0..N {
        for j in 0..N {
            out[i][j] = (0..N).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub fn mat_add_scaled<const N: usize>(
    a: &[[f64; N]; N],
    b: &[[f64; N]; N],
    scale: f64,
) -> [[f64; N]; N] {
    let mut out = *a;
    for (orow, brow) in out.iter_mut().zip(b) {
        for (o, x) in orow.iter_mut().zip(brow) {
            *o += scale * x;
        }
    }
    out
}

pub fn trace<const N: usize>(a: &[[f64; N]; N]) -> f64 {
    (0..N).map(|i| a[i][i]).sum()
}

/// Largest absolute entry of `a - b`.
pub fn max_abs_diff<const N: usize>(a: &[[f64; N]; N], b: &[[f64; N]; N]) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn max_abs<const N: usize>(a: &[[f64; N]; N]) -> f64 {
    a.iter().flatten().map(|x| x.abs()).fold(0.0, f64::max)
}
