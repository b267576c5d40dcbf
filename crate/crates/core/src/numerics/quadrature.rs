//! Composite Simpson quadrature on uniform grids.
//!
//! Simpson is the module-wide quadrature: its O(h⁴) local accuracy matches
//! the classic RK4 stepper used for time integration, so quadrature error
//! never dominates a convergence measurement.

use alloc::vec::Vec;

/// Integrate `f` over `[a, b]` with `n` uniform subintervals (rounded up to
/// even) using composite Simpson.
pub fn simpson_fn<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    if a == b {
        return 0.0;
    }
    let n = n.max(2).next_multiple_of(2);
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

/// Integrate uniformly sampled values with spacing `h` over the whole span.
///
/// Even interval counts use classic composite Simpson; an odd trailing
/// interval is closed with the three-point (quadratic) end rule so the
/// result stays O(h⁴).
pub fn simpson_uniform(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    if n == 2 {
        return 0.5 * h * (values[0] + values[1]);
    }
    let intervals = n - 1;
    let even_intervals = if intervals % 2 == 0 { intervals } else { intervals - 1 };
    let mut acc = values[0] + values[even_intervals];
    for i in 1..even_intervals {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * values[i];
    }
    let mut total = acc * h / 3.0;
    if intervals % 2 == 1 {
        // last interval via the quadratic through the final three samples
        let f0 = values[n - 3];
        let f1 = values[n - 2];
        let f2 = values[n - 1];
        total += h * (-f0 + 8.0 * f1 + 5.0 * f2) / 12.0;
    }
    total
}

/// Running integral of uniformly sampled values with spacing `h`.
///
/// Entry `i` approximates the integral from the first sample to sample `i`
/// (entry 0 is zero). Each subinterval is integrated under the local cubic
/// through the four nearest samples, so increments are exact on cubics and
/// the running integral is globally O(h⁴) — the same order as the RK4
/// stepper whose grids it shares.
pub fn cumulative_simpson(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    let mut out = Vec::with_capacity(n);
    out.push(0.0);
    if n < 2 {
        return out;
    }
    if n == 2 {
        out.push(0.5 * h * (values[0] + values[1]));
        return out;
    }
    if n == 3 {
        // parabola through the three samples
        let inc1 = h * (5.0 * values[0] + 8.0 * values[1] - values[2]) / 12.0;
        let inc2 = h * (-values[0] + 8.0 * values[1] + 5.0 * values[2]) / 12.0;
        out.push(inc1);
        out.push(inc1 + inc2);
        return out;
    }
    let mut acc = 0.0;
    for i in 1..n {
        let inc = if i == 1 {
            // leading interval under the cubic through the first four samples
            h * (9.0 * values[0] + 19.0 * values[1] - 5.0 * values[2] + values[3]) / 24.0
        } else if i == n - 1 {
            // trailing interval under the cubic through the last four samples
            h * (values[n - 4] - 5.0 * values[n - 3] + 19.0 * values[n - 2]
                + 9.0 * values[n - 1])
                / 24.0
        } else {
            // interior interval [i-1, i] under the cubic through i-2..=i+1
            h * (-values[i - 2] + 13.0 * values[i - 1] + 13.0 * values[i] - values[i + 1])
                / 24.0
        };
        acc += inc;
        out.push(acc);
    }
    out
}
