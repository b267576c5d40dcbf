//! Fourth-order central finite differences on uniform grids.
//!
//! The hydrodynamics module needs local derivatives that respect node masks,
//! so these are stencil-based rather than spectral. Boundary handling is the
//! caller's concern: the periodic variants wrap indices, the plain variants
//! return `None` where the five-point stencil would leave the slice.

/// 4th-order first derivative at interior index `i`:
/// (-f[i+2] + 8 f[i+1] - 8 f[i-1] + f[i-2]) / (12 h).
pub fn first_derivative_4th(values: &[f64], i: usize, h: f64) -> Option<f64> {
    if i < 2 || i + 2 >= values.len() {
        return None;
    }
    Some((-values[i + 2] + 8.0 * values[i + 1] - 8.0 * values[i - 1] + values[i - 2]) / (12.0 * h))
}

/// 4th-order second derivative at interior index `i`:
/// (-f[i+2] + 16 f[i+1] - 30 f[i] + 16 f[i-1] - f[i-2]) / (12 h²).
pub fn second_derivative_4th(values: &[f64], i: usize, h: f64) -> Option<f64> {
    if i < 2 || i + 2 >= values.len() {
        return None;
    }
    Some(
        (-values[i + 2] + 16.0 * values[i + 1] - 30.0 * values[i] + 16.0 * values[i - 1]
            - values[i - 2])
            / (12.0 * h * h),
    )
}

/// Periodic 4th-order first derivative; `winding` is added per full wrap so
/// that quantities with a net increment across the domain (an unwrapped phase
/// of a plane wave) stay consistent at the seam.
pub fn first_derivative_4th_periodic(values: &[f64], i: usize, h: f64, winding: f64) -> f64 {
    let n = values.len();
    let at = |off: isize| -> f64 {
        let idx = i as isize + off;
        if idx < 0 {
            values[(idx + n as isize) as usize] - winding
        } else if idx >= n as isize {
            values[(idx - n as isize) as usize] + winding
        } else {
            values[idx as usize]
        }
    };
    (-at(2) + 8.0 * at(1) - 8.0 * at(-1) + at(-2)) / (12.0 * h)
}

/// Periodic 4th-order second derivative (no winding: second differences of a
/// linear ramp vanish, so plain wrapping suffices for amplitudes).
pub fn second_derivative_4th_periodic(values: &[f64], i: usize, h: f64) -> f64 {
    let n = values.len();
    let at = |off: isize| -> f64 {
        let idx = (i as isize + off).rem_euclid(n as isize) as usize;
        values[idx]
    };
    (-at(2) + 16.0 * at(1) - 30.0 * at(0) + 16.0 * at(-1) - at(-2)) / (12.0 * h * h)
}
