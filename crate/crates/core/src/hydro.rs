//! 1D gridded wavefunction propagation and its hydrodynamic decomposition.
//!
//! A state lives on a periodic power-of-two grid and is advanced by Strang
//! splitting: spectral kinetic half-steps around a full potential step. The
//! polar split `ψ = R e^{iS/ħ}` (ħ = 1) yields the amplitude `R`, the action
//! `S` unwrapped along the grid, the velocity field `v = ∇S/m`, and the
//! amplitude-curvature term `U = −(ħ²/2m)(ΔR/R)` that extends the classical
//! Hamilton-Jacobi equation — determined solely by the amplitude, it encodes
//! the statistics of the state rather than a force, and is treated here as a
//! diagnostic statistical term. Residuals of the coupled Hamilton-Jacobi and
//! continuity equations quantify how tightly amplitude and action
//! codetermine each other on a propagated state; trajectory ensembles seeded
//! from `|ψ|²` follow the velocity field as a particle-picture diagnostic.
//!
//! Nodes (samples with `R < 1e-6 · max R`) are masked: `S`, `U`, `v` are
//! reported as NaN there rather than regularized, and phase unwrapping
//! restarts on each contiguous off-mask segment.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
use rand_core::{RngCore, SeedableRng};
use thiserror::Error;

// f64 math resolves through this trait in pure no_std builds; feature
// unification in test builds links std and shadows it with inherent methods.
#[allow(unused_imports)]
use num_traits::Float;

use crate::numerics::fft::{wavenumber, Fft};
use crate::numerics::unwrap::principal_angle;

/// Node threshold as a fraction of the peak amplitude.
pub const NODE_FRACTION: f64 = 1e-6;

/// Spectral power fraction in the top third of the spectrum that counts as
/// aliasing.
const ALIASING_POWER_FRACTION: f64 = 1e-8;

/// Spectral power fraction defining the occupied bandwidth for the time-step
/// precondition.
const BANDWIDTH_POWER_FRACTION: f64 = 1e-10;

#[derive(Debug, Error, PartialEq)]
pub enum HydroError {
    #[error("grid size must be a power of two for spectral propagation, got {0}")]
    GridNotPowerOfTwo(usize),
    #[error("grid needs at least 8 samples, got {0}")]
    GridTooSmall(usize),
    #[error("grid spacing and mass must be positive")]
    NonPositiveScale,
    #[error("state is empty: amplitude vanishes on the whole grid")]
    EmptyState,
    #[error("aliasing: spectral power fraction {fraction} in the top third of the spectrum — grid under-resolves the state")]
    Aliasing { fraction: f64 },
    #[error("time step too large: dt*E_max = {product} exceeds 0.1 (E_max = {e_max})")]
    TimeStepTooLarge { product: f64, e_max: f64 },
    #[error("states live on different grids")]
    GridMismatch,
    #[error("velocity undefined at x = {x}: node mask or segment edge")]
    UndefinedVelocity { x: f64 },
    #[error("position x = {x} outside the grid")]
    PositionOutsideGrid { x: f64 },
    #[error("tabulated potential has {got} samples, grid has {expected}")]
    CustomPotentialLength { expected: usize, got: usize },
    #[error("potential must be finite on the grid (sample {index})")]
    NonFinitePotential { index: usize },
    #[error("eigenstate n = {n} is not supported by the grid (limit {limit})")]
    UnsupportedEigenstate { n: usize, limit: usize },
    #[error("trajectory integration needs at least two frames")]
    TooFewFrames,
    #[error("superposition needs at least one term")]
    EmptySuperposition,
}

/// Uniform periodic spatial grid: samples `x0 + i·dx` for `i < n`, domain
/// length `L = n·dx`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    x0: f64,
    dx: f64,
    n: usize,
}

impl Grid1D {
    pub fn new(x0: f64, length: f64, n: usize) -> Result<Self, HydroError> {
        if !n.is_power_of_two() {
            return Err(HydroError::GridNotPowerOfTwo(n));
        }
        if n < 8 {
            return Err(HydroError::GridTooSmall(n));
        }
        if !(length > 0.0) {
            return Err(HydroError::NonPositiveScale);
        }
        Ok(Self { x0, dx: length / n as f64, n })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.dx
    }

    pub fn origin(&self) -> f64 {
        self.x0
    }

    pub fn domain_length(&self) -> f64 {
        self.dx * self.n as f64
    }

    pub fn position(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.dx
    }

    pub fn center(&self) -> f64 {
        self.x0 + 0.5 * self.domain_length()
    }

    /// Wrap a position into the periodic domain `[x0, x0 + L)`.
    pub fn wrap(&self, x: f64) -> f64 {
        let l = self.domain_length();
        let mut u = (x - self.x0) % l;
        if u < 0.0 {
            u += l;
        }
        self.x0 + u
    }
}

/// Interaction potential on the grid.
#[derive(Debug, Clone, PartialEq)]
pub enum PotentialSpec {
    Free,
    /// `½ m ω₀² (x − center)²`.
    Harmonic { omega0: f64, center: f64 },
    /// Hard mask: `height` everywhere except inside two slit windows of width
    /// `slit_width` centered at `center ± separation/2`.
    DoubleSlitMask { separation: f64, slit_width: f64, height: f64, center: f64 },
    /// Tabulated values, one per grid sample.
    Custom(Vec<f64>),
}

impl PotentialSpec {
    /// Evaluate on the grid; validates finiteness and tabulated length.
    pub fn evaluate(&self, grid: &Grid1D, mass: f64) -> Result<Vec<f64>, HydroError> {
        let values: Vec<f64> = match self {
            Self::Free => vec![0.0; grid.len()],
            Self::Harmonic { omega0, center } => (0..grid.len())
                .map(|i| {
                    let d = grid.position(i) - center;
                    0.5 * mass * omega0 * omega0 * d * d
                })
                .collect(),
            Self::DoubleSlitMask { separation, slit_width, height, center } => (0..grid.len())
                .map(|i| {
                    let x = grid.position(i);
                    let in_left = (x - (center - separation / 2.0)).abs() <= slit_width / 2.0;
                    let in_right = (x - (center + separation / 2.0)).abs() <= slit_width / 2.0;
                    if in_left || in_right {
                        0.0
                    } else {
                        *height
                    }
                })
                .collect(),
            Self::Custom(v) => {
                if v.len() != grid.len() {
                    return Err(HydroError::CustomPotentialLength {
                        expected: grid.len(),
                        got: v.len(),
                    });
                }
                v.clone()
            }
        };
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(HydroError::NonFinitePotential { index });
        }
        Ok(values)
    }
}

/// Complex state on a [`Grid1D`] with particle mass and current time.
#[derive(Debug, Clone, PartialEq)]
pub struct Wavefunction1D {
    grid: Grid1D,
    values: Vec<Complex64>,
    mass: f64,
    time: f64,
}

impl Wavefunction1D {
    pub fn from_fn(
        grid: Grid1D,
        mass: f64,
        f: impl Fn(f64) -> Complex64,
    ) -> Result<Self, HydroError> {
        if !(mass > 0.0) {
            return Err(HydroError::NonPositiveScale);
        }
        let values = (0..grid.len()).map(|i| f(grid.position(i))).collect();
        Ok(Self { grid, values, mass, time: 0.0 })
    }

    /// Normalized Gaussian packet `exp(−(x−center)²/4σ² + i p (x−center))`.
    pub fn gaussian_packet(
        grid: Grid1D,
        mass: f64,
        center: f64,
        sigma: f64,
        momentum: f64,
    ) -> Result<Self, HydroError> {
        if !(sigma > 0.0) {
            return Err(HydroError::NonPositiveScale);
        }
        let mut psi = Self::from_fn(grid, mass, |x| {
            let d = x - center;
            Complex64::new(-d * d / (4.0 * sigma * sigma), momentum * d).exp()
        })?;
        psi.normalize()?;
        Ok(psi)
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn set_time(&mut self, t: f64) {
        self.time = t;
    }

    /// Total norm `Σ |ψ|² dx`.
    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.dx
    }

    /// Scale to unit norm; returns the norm before scaling.
    pub fn normalize(&mut self) -> Result<f64, HydroError> {
        let n = self.norm();
        if n <= 0.0 || !n.is_finite() {
            return Err(HydroError::EmptyState);
        }
        let s = 1.0 / n.sqrt();
        for v in &mut self.values {
            *v *= s;
        }
        Ok(n)
    }

    /// Probability density `|ψ|²` on the grid.
    pub fn density(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    /// Second moment of the density about its mean: ⟨(x−⟨x⟩)²⟩.
    pub fn position_variance(&self) -> f64 {
        let dx = self.grid.dx;
        let mut w = 0.0;
        let mut mean = 0.0;
        for (i, v) in self.values.iter().enumerate() {
            let p = v.norm_sqr() * dx;
            w += p;
            mean += p * self.grid.position(i);
        }
        mean /= w;
        let mut var = 0.0;
        for (i, v) in self.values.iter().enumerate() {
            let d = self.grid.position(i) - mean;
            var += v.norm_sqr() * dx * d * d;
        }
        var / w
    }
}

/// Planned Strang-splitting propagator for a fixed potential and step size.
///
/// One step applies `exp(−iT dt/2) exp(−iV dt) exp(−iT dt/2)`; the step is
/// unitary, so the norm is preserved to roundoff. Each kinetic pass monitors
/// the top third of the spectrum and reports aliasing instead of silently
/// wrapping momenta.
#[derive(Debug, Clone)]
pub struct Propagator1D {
    fft: Fft,
    kinetic_half: Vec<Complex64>,
    potential_full: Vec<Complex64>,
    grid: Grid1D,
    mass: f64,
    dt: f64,
}

impl Propagator1D {
    pub fn new(
        grid: Grid1D,
        mass: f64,
        potential: &PotentialSpec,
        dt: f64,
    ) -> Result<Self, HydroError> {
        if !(mass > 0.0) || !(dt > 0.0) {
            return Err(HydroError::NonPositiveScale);
        }
        let v = potential.evaluate(&grid, mass)?;
        let n = grid.len();
        let l = grid.domain_length();
        let kinetic_half = (0..n)
            .map(|j| {
                let k = wavenumber(j, n, l);
                Complex64::cis(-k * k / (2.0 * mass) * dt / 2.0)
            })
            .collect();
        let potential_full = v.iter().map(|&vi| Complex64::cis(-vi * dt)).collect();
        Ok(Self { fft: Fft::new(n), kinetic_half, potential_full, grid, mass, dt })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Advance `psi` by one step in place.
    pub fn step(&self, psi: &mut Wavefunction1D) -> Result<(), HydroError> {
        if psi.grid != self.grid {
            return Err(HydroError::GridMismatch);
        }
        self.half_kinetic(&mut psi.values)?;
        for (v, phase) in psi.values.iter_mut().zip(&self.potential_full) {
            *v *= phase;
        }
        self.half_kinetic(&mut psi.values)?;
        psi.time += self.dt;
        Ok(())
    }

    /// Advance by `steps` steps, checking the time-step precondition against
    /// the occupied bandwidth of the incoming state.
    pub fn propagate(&self, psi: &mut Wavefunction1D, steps: usize) -> Result<(), HydroError> {
        let e_max = self.energy_scale(psi);
        let product = self.dt * e_max;
        if product > 0.1 + 1e-12 {
            return Err(HydroError::TimeStepTooLarge { product, e_max });
        }
        for _ in 0..steps {
            self.step(psi)?;
        }
        Ok(())
    }

    /// Characteristic energy of the state on this grid: max |V| plus the
    /// kinetic energy at the occupied spectral bandwidth.
    pub fn energy_scale(&self, psi: &Wavefunction1D) -> f64 {
        let n = self.grid.len();
        let mut spectrum = psi.values.clone();
        self.fft.forward(&mut spectrum);
        let total: f64 = spectrum.iter().map(|v| v.norm_sqr()).sum();
        let mut k_occ = 0.0f64;
        for (j, v) in spectrum.iter().enumerate() {
            if v.norm_sqr() > BANDWIDTH_POWER_FRACTION * total {
                k_occ = k_occ.max(wavenumber(j, n, self.grid.domain_length()).abs());
            }
        }
        let v_max = self
            .potential_full
            .iter()
            .map(|p| p.arg().abs() / self.dt)
            .fold(0.0, f64::max);
        v_max + k_occ * k_occ / (2.0 * self.mass)
    }

    fn half_kinetic(&self, values: &mut Vec<Complex64>) -> Result<(), HydroError> {
        self.fft.forward(values);
        let n = values.len();
        let mut total = 0.0;
        let mut top = 0.0;
        for (j, v) in values.iter_mut().enumerate() {
            let power = v.norm_sqr();
            total += power;
            let signed = if j < n / 2 { j as isize } else { j as isize - n as isize };
            if signed.unsigned_abs() >= n / 3 {
                top += power;
            }
            *v *= self.kinetic_half[j];
        }
        if total > 0.0 && top / total > ALIASING_POWER_FRACTION {
            return Err(HydroError::Aliasing { fraction: top / total });
        }
        self.fft.inverse(values);
        Ok(())
    }
}

/// Single Strang step as a pure function (plans and applies one step).
pub fn split_operator_step(
    psi: &Wavefunction1D,
    potential: &PotentialSpec,
    dt: f64,
) -> Result<Wavefunction1D, HydroError> {
    let prop = Propagator1D::new(psi.grid, psi.mass, potential, dt)?;
    let mut out = psi.clone();
    prop.step(&mut out)?;
    Ok(out)
}

/// Polar decomposition of a state: amplitude, unwrapped action, statistical
/// term, velocity field, node mask.
#[derive(Debug, Clone)]
pub struct MadelungFields {
    grid: Grid1D,
    mass: f64,
    time: f64,
    r: Vec<f64>,
    s: Vec<f64>,
    u: Vec<f64>,
    v: Vec<f64>,
    node_mask: Vec<bool>,
}

impl MadelungFields {
    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// Amplitude R ≥ 0.
    pub fn amplitude(&self) -> &[f64] {
        &self.r
    }

    /// Action S (ħ = 1), unwrapped per off-mask segment, NaN on the mask.
    pub fn action(&self) -> &[f64] {
        &self.s
    }

    /// Display-convention phase Φ = −S/ħ.
    pub fn phase(&self, i: usize) -> f64 {
        -self.s[i]
    }

    /// Statistical term U = −(1/2m)(R''/R), NaN on the mask.
    pub fn statistical_term(&self) -> &[f64] {
        &self.u
    }

    /// Velocity v = S'/m, NaN on the mask and at segment edges.
    pub fn velocity(&self) -> &[f64] {
        &self.v
    }

    pub fn node_mask(&self) -> &[bool] {
        &self.node_mask
    }

    /// Density ρ = R².
    pub fn density(&self, i: usize) -> f64 {
        self.r[i] * self.r[i]
    }

    /// Rebuild `R e^{iS}` off-mask; masked samples keep the original value of
    /// `fallback` if given, else 0.
    pub fn reconstruct(&self) -> Vec<Complex64> {
        (0..self.r.len())
            .map(|i| {
                if self.node_mask[i] {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::from_polar(self.r[i], self.s[i])
                }
            })
            .collect()
    }
}

/// Split `ψ = R e^{iS}` into Madelung fields.
///
/// `S` is unwrapped left-to-right within each contiguous off-mask segment
/// (each segment starts from its own principal value; offsets across node
/// gaps are not inferred). Derivatives are 4th-order central differences,
/// periodic (with action winding) only when the whole grid is unmasked.
pub fn polar_decompose(psi: &Wavefunction1D) -> Result<MadelungFields, HydroError> {
    let n = psi.grid.len();
    let r: Vec<f64> = psi.values.iter().map(|v| v.norm()).collect();
    let r_max = r.iter().cloned().fold(0.0, f64::max);
    if r_max <= 0.0 {
        return Err(HydroError::EmptyState);
    }
    let threshold = NODE_FRACTION * r_max;
    let node_mask: Vec<bool> = r.iter().map(|&ri| ri < threshold).collect();
    let fully_unmasked = node_mask.iter().all(|&m| !m);

    // unwrap the action per off-mask segment
    let mut s = vec![f64::NAN; n];
    let mut i = 0;
    while i < n {
        if node_mask[i] {
            i += 1;
            continue;
        }
        let start = i;
        let mut prev = principal_angle(psi.values[i].arg());
        s[i] = prev;
        i += 1;
        while i < n && !node_mask[i] {
            let raw = psi.values[i].arg();
            let step = principal_angle(raw - prev);
            s[i] = s[i - 1] + step;
            prev = s[i];
            i += 1;
        }
        let _ = start;
    }

    // winding across the periodic seam, defined only for a fully clean grid
    let winding = if fully_unmasked {
        let step = principal_angle(psi.values[0].arg() - psi.values[n - 1].arg());
        (s[n - 1] + step) - s[0]
    } else {
        0.0
    };

    let dx = psi.grid.dx;
    let inv_2m = 1.0 / (2.0 * psi.mass);

    let mut u = vec![f64::NAN; n];
    let mut v = vec![f64::NAN; n];
    for idx in 0..n {
        if node_mask[idx] {
            continue;
        }
        // statistical term from the (periodic, always defined) amplitude
        let rpp = crate::numerics::diff::second_derivative_4th_periodic(&r, idx, dx);
        u[idx] = -inv_2m * rpp / r[idx];

        // velocity needs an action stencil inside one segment (or winding)
        if fully_unmasked {
            let sp =
                crate::numerics::diff::first_derivative_4th_periodic(&s, idx, dx, winding);
            v[idx] = sp / psi.mass;
        } else {
            let in_segment = idx >= 2
                && idx + 2 < n
                && !node_mask[idx - 2]
                && !node_mask[idx - 1]
                && !node_mask[idx + 1]
                && !node_mask[idx + 2];
            if in_segment {
                if let Some(sp) = crate::numerics::diff::first_derivative_4th(&s, idx, dx) {
                    v[idx] = sp / psi.mass;
                }
            }
        }
    }

    Ok(MadelungFields {
        grid: psi.grid,
        mass: psi.mass,
        time: psi.time,
        r,
        s,
        u,
        v,
        node_mask,
    })
}

/// Pointwise residual field plus its off-mask max-norm summary.
#[derive(Debug, Clone)]
pub struct ResidualField {
    pub values: Vec<f64>,
}

impl ResidualField {
    /// Largest finite |residual|; NaN entries (mask, segment edges) are
    /// excluded, never hidden — they stay visible in `values`.
    pub fn max_norm(&self) -> f64 {
        self.values.iter().filter(|v| v.is_finite()).fold(0.0, |a, &b| a.max(b.abs()))
    }
}

/// Time derivative of the action from two frames straddling the frame of
/// interest: `(S_next − S_prev)/(t_next − t_prev)`, pointwise, with each
/// difference reduced to its principal branch so per-frame 2π anchor offsets
/// cancel. Assumes `|∂S/∂t|·Δt < π`.
pub fn ds_dt_central(prev: &MadelungFields, next: &MadelungFields) -> Result<Vec<f64>, HydroError> {
    if prev.grid != next.grid {
        return Err(HydroError::GridMismatch);
    }
    let dt = next.time - prev.time;
    if !(dt > 0.0) {
        return Err(HydroError::NonPositiveScale);
    }
    Ok(prev
        .s
        .iter()
        .zip(&next.s)
        .map(|(&a, &b)| {
            if a.is_finite() && b.is_finite() {
                principal_angle(b - a) / dt
            } else {
                f64::NAN
            }
        })
        .collect())
}

/// Residual of the quantum Hamilton-Jacobi equation,
/// `∂S/∂t + (∇S)²/2m + V + U`, pointwise off the node mask.
pub fn hj_residual(
    fields: &MadelungFields,
    potential: &PotentialSpec,
    ds_dt: &[f64],
) -> Result<ResidualField, HydroError> {
    if ds_dt.len() != fields.grid.len() {
        return Err(HydroError::GridMismatch);
    }
    let v_grid = potential.evaluate(&fields.grid, fields.mass)?;
    let m = fields.mass;
    let values = (0..fields.grid.len())
        .map(|i| {
            let vel = fields.v[i];
            let u = fields.u[i];
            let st = ds_dt[i];
            if fields.node_mask[i] || !vel.is_finite() || !u.is_finite() || !st.is_finite() {
                f64::NAN
            } else {
                // (∇S)²/2m = m v²/2
                st + 0.5 * m * vel * vel + v_grid[i] + u
            }
        })
        .collect();
    Ok(ResidualField { values })
}

/// Residual of the continuity equation `∂ρ/∂t + ∂(ρv)/∂x` from two frames
/// `dt` apart, centered midway: forward time difference of ρ against the
/// frame-averaged flux divergence.
pub fn continuity_residual(
    a: &MadelungFields,
    b: &MadelungFields,
) -> Result<ResidualField, HydroError> {
    if a.grid != b.grid {
        return Err(HydroError::GridMismatch);
    }
    let dt = b.time - a.time;
    if !(dt > 0.0) {
        return Err(HydroError::NonPositiveScale);
    }
    let n = a.grid.len();
    let dx = a.grid.dx;
    let flux: Vec<f64> = (0..n)
        .map(|i| {
            let fa = a.density(i) * a.v[i];
            let fb = b.density(i) * b.v[i];
            0.5 * (fa + fb)
        })
        .collect();
    let clean = flux.iter().all(|f| f.is_finite());
    let values = (0..n)
        .map(|i| {
            let drho = (b.density(i) - a.density(i)) / dt;
            let dflux = if clean {
                crate::numerics::diff::first_derivative_4th_periodic(&flux, i, dx, 0.0)
            } else {
                let ok = i >= 2
                    && i + 2 < n
                    && flux[i - 2].is_finite()
                    && flux[i - 1].is_finite()
                    && flux[i].is_finite()
                    && flux[i + 1].is_finite()
                    && flux[i + 2].is_finite();
                if ok {
                    crate::numerics::diff::first_derivative_4th(&flux, i, dx).unwrap()
                } else {
                    f64::NAN
                }
            };
            drho + dflux
        })
        .collect();
    Ok(ResidualField { values })
}

/// Velocity at an arbitrary position by cubic interpolation of the grid
/// velocity field (periodic when the grid is fully unmasked).
pub fn bohmian_velocity(fields: &MadelungFields, x: f64) -> Result<f64, HydroError> {
    let grid = &fields.grid;
    let n = grid.len();
    let xw = grid.wrap(x);
    if !xw.is_finite() {
        return Err(HydroError::PositionOutsideGrid { x });
    }
    let s = (xw - grid.x0) / grid.dx;
    let cell = (s.floor() as isize).clamp(0, n as isize - 1);
    let t = s - cell as f64;
    let fully_unmasked = fields.node_mask.iter().all(|&m| !m);
    // stencil on nodes cell-1 .. cell+2
    let mut w = [0.0f64; 4];
    w[0] = -t * (t - 1.0) * (t - 2.0) / 6.0;
    w[1] = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
    w[2] = -(t + 1.0) * t * (t - 2.0) / 2.0;
    w[3] = (t + 1.0) * t * (t - 1.0) / 6.0;
    let mut acc = 0.0;
    for (k, &wk) in w.iter().enumerate() {
        let off = cell - 1 + k as isize;
        let idx = if fully_unmasked {
            off.rem_euclid(n as isize) as usize
        } else {
            if off < 0 || off >= n as isize {
                return Err(HydroError::UndefinedVelocity { x: xw });
            }
            off as usize
        };
        let vi = fields.v[idx];
        if !vi.is_finite() {
            return Err(HydroError::UndefinedVelocity { x: xw });
        }
        acc += wk * vi;
    }
    Ok(acc)
}

/// Trajectory ensemble seeded from `|ψ(·, t0)|²`, advanced frame-to-frame by
/// RK4 over the interpolated velocity fields. Deterministic for a fixed seed;
/// initial positions are sorted ascending, and the 1D flow keeps them sorted.
#[derive(Debug, Clone)]
pub struct TrajectoryEnsemble {
    seed: u64,
    times: Vec<f64>,
    /// `positions[frame][trajectory]`.
    positions: Vec<Vec<f64>>,
    wrapped: bool,
}

impl TrajectoryEnsemble {
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn positions(&self) -> &[Vec<f64>] {
        &self.positions
    }

    pub fn n_trajectories(&self) -> usize {
        self.positions.first().map_or(0, Vec::len)
    }

    /// True if any trajectory left the domain and was wrapped periodically.
    pub fn wrapped(&self) -> bool {
        self.wrapped
    }
}

/// Draw `n` positions distributed as the density of `fields` by inverse-CDF
/// sampling on the grid, sorted ascending.
pub fn sample_initial_positions(fields: &MadelungFields, n: usize, seed: u64) -> Vec<f64> {
    let grid = &fields.grid;
    let m = grid.len();
    // cumulative cell masses
    let mut cdf = Vec::with_capacity(m + 1);
    cdf.push(0.0);
    let mut acc = 0.0;
    for i in 0..m {
        acc += fields.density(i) * grid.dx;
        cdf.push(acc);
    }
    let total = acc;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<f64> = (0..n)
        .map(|_| {
            let u = ((rng.next_u64() >> 11) as f64) * (1.0 / (1u64 << 53) as f64) * total;
            // first cell whose cumulative mass exceeds u
            let cell = cdf.partition_point(|&c| c <= u).saturating_sub(1).min(m - 1);
            let mass = cdf[cell + 1] - cdf[cell];
            let frac = if mass > 0.0 { (u - cdf[cell]) / mass } else { 0.5 };
            grid.position(cell) + frac * grid.dx
        })
        .collect();
    out.sort_unstable_by(f64::total_cmp);
    out
}

/// Advance an ensemble through a sequence of Madelung frames.
///
/// Velocities between frames are taken as the average of the bracketing
/// frames in the RK4 midpoint stages. Trajectories leaving the domain are
/// wrapped periodically and the ensemble is flagged.
pub fn integrate_trajectories(
    frames: &[MadelungFields],
    n_traj: usize,
    seed: u64,
) -> Result<TrajectoryEnsemble, HydroError> {
    if frames.len() < 2 {
        return Err(HydroError::TooFewFrames);
    }
    let grid = frames[0].grid;
    for f in frames {
        if f.grid != grid {
            return Err(HydroError::GridMismatch);
        }
    }
    let mut positions = Vec::with_capacity(frames.len());
    let mut current = sample_initial_positions(&frames[0], n_traj, seed);
    positions.push(current.clone());
    let mut wrapped = false;

    let l = grid.domain_length();
    for w in frames.windows(2) {
        let (fa, fb) = (&w[0], &w[1]);
        let h = fb.time() - fa.time();
        if !(h > 0.0) {
            return Err(HydroError::NonPositiveScale);
        }
        let vel_mid = |x: f64| -> Result<f64, HydroError> {
            Ok(0.5 * (bohmian_velocity(fa, x)? + bohmian_velocity(fb, x)?))
        };
        for x in current.iter_mut() {
            let k1 = bohmian_velocity(fa, *x)?;
            let k2 = vel_mid(*x + 0.5 * h * k1)?;
            let k3 = vel_mid(*x + 0.5 * h * k2)?;
            let k4 = bohmian_velocity(fb, *x + h * k3)?;
            let next = *x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            let inside = next >= grid.x0 && next < grid.x0 + l;
            if !inside {
                wrapped = true;
            }
            *x = grid.wrap(next);
        }
        positions.push(current.clone());
    }
    Ok(TrajectoryEnsemble {
        seed,
        times: frames.iter().map(MadelungFields::time).collect(),
        positions,
        wrapped,
    })
}

/// Coherent superposition `Σ cᵢ ψᵢ`, renormalized.
#[derive(Debug, Clone)]
pub struct Superposition {
    pub state: Wavefunction1D,
    /// Norm of the raw sum before renormalization — the interference budget.
    pub pre_normalization_norm: f64,
}

/// Superpose states on a shared grid (the superposition principle made
/// executable); rejects grid mismatches, renormalizes, and reports the
/// pre-normalization norm.
pub fn superpose(terms: &[(Complex64, &Wavefunction1D)]) -> Result<Superposition, HydroError> {
    let (_, first) = terms.first().ok_or(HydroError::EmptySuperposition)?;
    let grid = first.grid;
    let mass = first.mass;
    let time = first.time;
    let mut values = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (coeff, psi) in terms {
        if psi.grid != grid || psi.mass != mass {
            return Err(HydroError::GridMismatch);
        }
        for (acc, v) in values.iter_mut().zip(&psi.values) {
            *acc += coeff * v;
        }
    }
    let mut state = Wavefunction1D { grid, values, mass, time };
    let pre = state.normalize()?;
    Ok(Superposition { state, pre_normalization_norm: pre })
}

/// Normalized harmonic-oscillator eigenstate `n` for `½mω₀²(x−center)²`,
/// built by the stable Hermite-function recurrence. Rejects `n` whose
/// classical turning point or momentum spread the grid cannot hold.
pub fn harmonic_eigenstate(
    grid: Grid1D,
    mass: f64,
    omega0: f64,
    center: f64,
    n: usize,
) -> Result<Wavefunction1D, HydroError> {
    if !(mass > 0.0) || !(omega0 > 0.0) {
        return Err(HydroError::NonPositiveScale);
    }
    let alpha = (mass * omega0).sqrt(); // 1/length scale
    let turning_point = ((2 * n + 1) as f64).sqrt() / alpha;
    let k_needed = ((2 * n + 1) as f64).sqrt() * alpha;
    let half_domain = 0.5 * grid.domain_length();
    let k_max = core::f64::consts::PI / grid.dx;
    // demand comfortable margins in both position and momentum
    let supported = turning_point * 1.5 < half_domain && k_needed * 1.5 < 2.0 / 3.0 * k_max;
    if !supported {
        let mut limit = 0usize;
        while limit < 100_000 {
            let tp = ((2 * (limit + 1) + 1) as f64).sqrt() / alpha;
            let kp = ((2 * (limit + 1) + 1) as f64).sqrt() * alpha;
            if !(tp * 1.5 < half_domain && kp * 1.5 < 2.0 / 3.0 * k_max) {
                break;
            }
            limit += 1;
        }
        return Err(HydroError::UnsupportedEigenstate { n, limit });
    }

    let mut psi = Wavefunction1D::from_fn(grid, mass, |x| {
        let xi = alpha * (x - center);
        let h0 = (-xi * xi / 2.0).exp() / core::f64::consts::PI.powf(0.25);
        if n == 0 {
            return Complex64::new(h0, 0.0);
        }
        let mut prev = h0;
        let mut curr = 2.0f64.sqrt() * xi * h0;
        for k in 2..=n {
            let next =
                (2.0 / k as f64).sqrt() * xi * curr - (((k - 1) as f64) / k as f64).sqrt() * prev;
            prev = curr;
            curr = next;
        }
        Complex64::new(curr, 0.0)
    })?;
    // α^{1/2} prefactor folded into the numerical normalization
    psi.normalize()?;
    Ok(psi)
}

/// Harmonic eigenenergy `ω₀ (n + ½)`.
pub fn harmonic_energy(omega0: f64, n: usize) -> f64 {
    omega0 * (n as f64 + 0.5)
}

/// Histogram of positions over `bins` uniform cells spanning `[lo, hi)`,
/// normalized to unit mass.
pub fn density_histogram(positions: &[f64], lo: f64, hi: f64, bins: usize) -> Vec<f64> {
    let mut h = vec![0.0; bins];
    let w = (hi - lo) / bins as f64;
    let mut count = 0usize;
    for &x in positions {
        if x >= lo && x < hi {
            let b = ((x - lo) / w) as usize;
            h[b.min(bins - 1)] += 1.0;
            count += 1;
        }
    }
    if count > 0 {
        for v in &mut h {
            *v /= count as f64;
        }
    }
    h
}

/// Total-variation distance between two unit-mass histograms.
pub fn total_variation_distance(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Analytic width of a freely spreading Gaussian: `σ(t)² = σ₀²(1 + (t/2mσ₀²)²)`.
pub fn free_gaussian_sigma(sigma0: f64, mass: f64, t: f64) -> f64 {
    let tau = t / (2.0 * mass * sigma0 * sigma0);
    sigma0 * (1.0 + tau * tau).sqrt()
}
