//! Cubic (four-point Lagrange) interpolation on uniform grids.

/// Interpolate uniformly sampled `values` (first sample at `x0`, spacing `h`)
/// at position `x` with the cubic through the four surrounding samples.
///
/// Near the slice ends the stencil is clamped inside the available data.
/// Returns `None` if `x` lies outside `[x0, x0 + (n-1) h]` or fewer than four
/// samples exist.
pub fn cubic_interpolate(values: &[f64], x0: f64, h: f64, x: f64) -> Option<f64> {
    let n = values.len();
    if n < 4 {
        return None;
    }
    let s = (x - x0) / h;
    if s < -1e-12 || s > (n - 1) as f64 + 1e-12 {
        return None;
    }
    let cell = (s.max(0.0) as usize).min(n - 2);
    // stencil [i0, i0+3] with the query inside the middle interval if possible
    let i0 = cell.saturating_sub(1).min(n - 4);
    let t = s - i0 as f64;
    let f = &values[i0..i0 + 4];
    // Lagrange basis on nodes 0,1,2,3
    let l0 = -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0;
    let l1 = t * (t - 2.0) * (t - 3.0) / 2.0;
    let l2 = -t * (t - 1.0) * (t - 3.0) / 2.0;
    let l3 = t * (t - 1.0) * (t - 2.0) / 6.0;
    Some(f[0] * l0 + f[1] * l1 + f[2] * l2 + f[3] * l3)
}
