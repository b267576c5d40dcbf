//! Shared numerical kernels: radix-2 FFT, Simpson quadrature, high-order
//! finite differences, cubic interpolation, and phase unwrapping.

pub mod diff;
pub mod fft;
pub mod interp;
pub mod quadrature;
pub mod unwrap;

pub use diff::{first_derivative_4th, second_derivative_4th};
pub use fft::Fft;
pub use interp::cubic_interpolate;
pub use quadrature::{cumulative_simpson, simpson_fn, simpson_uniform};
pub use unwrap::{principal_angle, unwrap_series};
