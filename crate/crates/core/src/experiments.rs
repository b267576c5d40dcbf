//! Scripted virtual experiments: each one reduces a phase-control knob to a
//! fringe dataset plus a fitted fringe phase, so a change applied to the
//! matter phase is read back as an observable shift of an interference
//! pattern.
//!
//! * Ramsey scans — excited population after two π/2 pulses, either from the
//!   ideal instantaneous-pulse formula or from the full two-lobe integration.
//! * Harmonic wave-packet interferograms — two phase-locked packet creations
//!   in a harmonic well, probed by overlap; recurrences at 2π/ω₀.
//! * Free double slit — two displaced Gaussians superposed with a relative
//!   constant phase and optional momentum kick, spread into a far-field
//!   fringe pattern.

use alloc::vec::Vec;
use num_complex::Complex64;
use thiserror::Error;

// f64 math resolves through this trait in pure no_std builds; feature
// unification in test builds links std and shadows it with inherent methods.
#[allow(unused_imports)]
use num_traits::Float;

use crate::field::{Envelope, FieldError, PulseTrain, PulsedField};
use crate::hydro::{
    harmonic_eigenstate, harmonic_energy, integrate_trajectories, polar_decompose, superpose,
    Grid1D, HydroError, PotentialSpec, Propagator1D, TrajectoryEnsemble, Wavefunction1D,
};
use crate::numerics::unwrap::principal_angle;
use crate::twolevel::{
    analytic_ramsey_population, integrate_tdse, HamiltonianMode, Level, TwoLevelError,
    TwoLevelSystem,
};

#[derive(Debug, Error, PartialEq)]
pub enum ExperimentError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    TwoLevel(#[from] TwoLevelError),
    #[error(transparent)]
    Hydro(#[from] HydroError),
    #[error("no fringes: visibility {visibility} below 0.05")]
    NoFringes { visibility: f64 },
    #[error("only {cycles} fringe periods in the window, need at least 3")]
    TooFewPeriods { cycles: f64 },
    #[error("fringe fit did not converge within {0} iterations")]
    FitDiverged(usize),
    #[error("normal equations are singular")]
    FitSingular,
    #[error("signal axis must be uniform and hold at least 8 samples")]
    BadAxis,
    #[error("slits unresolved: separation {separation} must exceed 4 sigma = {}", 4.0 * *sigma)]
    SlitsUnresolved { separation: f64, sigma: f64 },
    #[error("grid spacing {dx} does not resolve the fringe spacing {spacing} by 8 samples")]
    FringeUnderResolved { spacing: f64, dx: f64 },
    #[error("interferogram needs at least one populated level")]
    EmptyPacket,
}

/* Fringe fitting ***********************************************************/

/// Least-squares fit of `A + B cos(kx + θ)` to a sampled signal.
#[derive(Debug, Clone, PartialEq)]
pub struct FringeFit {
    /// Fringe period 2π/k along the scan axis.
    pub period: f64,
    /// Fitted fringe phase θ, reduced to (-π, π].
    pub phase: f64,
    /// (max − min)/(max + min) of the raw signal.
    pub visibility: f64,
    /// RMS of the fit residual — reported, never hidden.
    pub residual_rms: f64,
}

const FIT_MAX_ITERATIONS: usize = 50;
const FIT_STEP_TOLERANCE: f64 = 1e-10;

/// Fit fringes on a uniform axis: spectral-peak initialization, then
/// Gauss-Newton refinement of (A, B, k, θ).
pub fn fringe_analysis(axis: &[f64], signal: &[f64]) -> Result<FringeFit, ExperimentError> {
    let n = axis.len();
    if n < 8 || signal.len() != n {
        return Err(ExperimentError::BadAxis);
    }
    let h = axis[1] - axis[0];
    if !(h > 0.0) {
        return Err(ExperimentError::BadAxis);
    }
    for i in 2..n {
        if ((axis[i] - axis[i - 1]) - h).abs() > 1e-6 * h {
            return Err(ExperimentError::BadAxis);
        }
    }

    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &s in signal {
        lo = lo.min(s);
        hi = hi.max(s);
    }
    let visibility = if hi + lo != 0.0 { (hi - lo) / (hi + lo) } else { 0.0 };
    if visibility < 0.05 {
        return Err(ExperimentError::NoFringes { visibility });
    }

    // centre the axis for conditioning; fold the offset back at the end
    let x_mid = 0.5 * (axis[0] + axis[n - 1]);
    let u: Vec<f64> = axis.iter().map(|&x| x - x_mid).collect();
    let mean = signal.iter().sum::<f64>() / n as f64;

    // dominant spectral peak over whole cycles of the window
    let mut best = (0usize, 0.0f64, Complex64::new(0.0, 0.0));
    for j in 1..=n / 2 {
        let k = 2.0 * core::f64::consts::PI * j as f64 / (n as f64 * h);
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, &s) in signal.iter().enumerate() {
            acc += (s - mean) * Complex64::cis(-k * u[i]);
        }
        if acc.norm() > best.1 {
            best = (j, acc.norm(), acc);
        }
    }
    let cycles = best.0 as f64;
    if cycles < 3.0 {
        return Err(ExperimentError::TooFewPeriods { cycles });
    }

    let mut a = mean;
    let mut b = (hi - lo) / 2.0;
    let mut k = 2.0 * core::f64::consts::PI * cycles / (n as f64 * h);
    let mut theta = best.2.arg();

    // Gauss-Newton on (A, B, k, θ)
    let mut converged = false;
    for _ in 0..FIT_MAX_ITERATIONS {
        let mut jtj = [[0.0f64; 4]; 4];
        let mut jtr = [0.0f64; 4];
        for (i, &s) in signal.iter().enumerate() {
            let arg = k * u[i] + theta;
            let (sin, cos) = arg.sin_cos();
            let r = a + b * cos - s;
            let row = [1.0, cos, -b * u[i] * sin, -b * sin];
            for p in 0..4 {
                jtr[p] += row[p] * r;
                for q in 0..4 {
                    jtj[p][q] += row[p] * row[q];
                }
            }
        }
        let delta = solve4(jtj, [-jtr[0], -jtr[1], -jtr[2], -jtr[3]])
            .ok_or(ExperimentError::FitSingular)?;
        a += delta[0];
        b += delta[1];
        k += delta[2];
        theta += delta[3];
        let step = delta.iter().map(|d| d * d).sum::<f64>().sqrt();
        if step < FIT_STEP_TOLERANCE {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(ExperimentError::FitDiverged(FIT_MAX_ITERATIONS));
    }

    // canonical form: positive amplitude and wavenumber
    if b < 0.0 {
        b = -b;
        theta += core::f64::consts::PI;
    }
    if k < 0.0 {
        k = -k;
        theta = -theta;
    }
    let mut rss = 0.0;
    for (i, &s) in signal.iter().enumerate() {
        let r = a + b * (k * u[i] + theta).cos() - s;
        rss += r * r;
    }
    Ok(FringeFit {
        period: 2.0 * core::f64::consts::PI / k,
        phase: principal_angle(theta - k * x_mid),
        visibility,
        residual_rms: (rss / n as f64).sqrt(),
    })
}

fn solve4(mut a: [[f64; 4]; 4], mut b: [f64; 4]) -> Option<[f64; 4]> {
    for col in 0..4 {
        let mut pivot = col;
        for row in col + 1..4 {
            if a[row][col].abs() > a[pivot][col].abs() {
                pivot = row;
            }
        }
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..4 {
            let f = a[row][col] / a[col][col];
            for c in col..4 {
                a[row][c] -= f * a[col][c];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0f64; 4];
    for row in (0..4).rev() {
        let mut acc = b[row];
        for c in row + 1..4 {
            acc -= a[row][c] * x[c];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

/* Ramsey *******************************************************************/

/// How Ramsey populations are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RamseyMode {
    /// Ideal instantaneous π/2 pulses (closed form).
    AnalyticOracle,
    /// Full integration of a two-lobe drive.
    FullTdse,
}

/// Gaussian π/2 pulse pair: each lobe has width τ and pulse area π/2; the
/// second lobe carries the scanned extra constant phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RamseyPulseSpec {
    pub carrier_frequency: f64,
    pub pulse_tau: f64,
    pub cep: f64,
}

impl RamseyPulseSpec {
    /// Peak Rabi frequency giving a π/2 area: `Ω̂ τ √π = π/2`.
    pub fn peak_rabi(&self) -> f64 {
        core::f64::consts::PI.sqrt() / (2.0 * self.pulse_tau)
    }

    /// Effective support half-width of one lobe.
    pub fn lobe_half_support(&self) -> f64 {
        5.0 * self.pulse_tau
    }
}

/// Excited-state populations over a (delay × relative phase) scan.
#[derive(Debug, Clone)]
pub struct RamseyScan {
    delays: Vec<f64>,
    relative_phases: Vec<f64>,
    /// `populations[delay_index][phase_index]`.
    populations: Vec<Vec<f64>>,
    mode: RamseyMode,
}

impl RamseyScan {
    pub fn delays(&self) -> &[f64] {
        &self.delays
    }

    pub fn relative_phases(&self) -> &[f64] {
        &self.relative_phases
    }

    pub fn populations(&self) -> &[Vec<f64>] {
        &self.populations
    }

    pub fn mode(&self) -> RamseyMode {
        self.mode
    }

    /// Population column at one relative phase, as a function of delay.
    pub fn fringe_in_delay(&self, phase_index: usize) -> Vec<f64> {
        self.populations.iter().map(|row| row[phase_index]).collect()
    }
}

/// Scan the Ramsey fringe over pulse delays and second-pulse phases.
///
/// Delays are centre-to-centre; in full-TDSE mode each scan point integrates
/// the two-lobe drive (the second lobe's CEP shifted by the relative phase)
/// with the full Hamiltonian from the ground state, and reads the excited
/// population after the second pulse.
pub fn run_ramsey_scan(
    system: &TwoLevelSystem,
    pulses: &RamseyPulseSpec,
    delays: &[f64],
    relative_phases: &[f64],
    mode: RamseyMode,
    dt: f64,
) -> Result<RamseyScan, ExperimentError> {
    let detuning = system.detuning(pulses.carrier_frequency);
    let mut populations = Vec::with_capacity(delays.len());
    for &delay in delays {
        let mut row = Vec::with_capacity(relative_phases.len());
        for &dphi in relative_phases {
            let p = match mode {
                RamseyMode::AnalyticOracle => analytic_ramsey_population(detuning, delay, dphi),
                RamseyMode::FullTdse => {
                    ramsey_population_tdse(system, pulses, delay, dphi, dt)?
                }
            };
            row.push(p);
        }
        populations.push(row);
    }
    Ok(RamseyScan {
        delays: delays.to_vec(),
        relative_phases: relative_phases.to_vec(),
        populations,
        mode,
    })
}

fn ramsey_population_tdse(
    system: &TwoLevelSystem,
    pulses: &RamseyPulseSpec,
    delay: f64,
    relative_phase: f64,
    dt: f64,
) -> Result<f64, ExperimentError> {
    let half = pulses.lobe_half_support();
    let amplitude = pulses.peak_rabi() / system.dipole;
    let center1 = half;
    let center2 = center1 + delay;
    let lobe1 = PulsedField::new(
        Envelope::gaussian(amplitude, pulses.pulse_tau, center1)?,
        pulses.carrier_frequency,
        pulses.cep,
    );
    let lobe2 = PulsedField::new(
        Envelope::gaussian(amplitude, pulses.pulse_tau, center2)?,
        pulses.carrier_frequency,
        pulses.cep + relative_phase,
    );
    // rejects overlapping lobes: the delay must exceed the pulse support
    let train = PulseTrain::new(alloc::vec![lobe1, lobe2])?;
    let traj = integrate_tdse(
        system,
        &train,
        (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)),
        (0.0, center2 + half),
        dt,
        HamiltonianMode::Full,
    )?;
    Ok(traj.population(Level::Excited, traj.len() - 1))
}

/* Harmonic-well interferogram **********************************************/

/// Two phase-locked packet creations in a harmonic well, probed by overlap.
#[derive(Debug, Clone, PartialEq)]
pub struct InterferogramConfig {
    pub omega0: f64,
    pub mass: f64,
    /// Number of populated eigenstates (lowest `n_states`).
    pub n_states: usize,
    /// Coherent-state-like weight parameter: `c_n ∝ coherence^n/√(n!)`.
    pub coherence: f64,
    /// Constant phase of the second packet creation.
    pub relative_phase: f64,
}

/// Overlap signal vs pump-pump delay.
#[derive(Debug, Clone)]
pub struct Interferogram {
    pub delays: Vec<f64>,
    pub signal: Vec<f64>,
}

/// Interferogram of two packet creations separated by a scanned delay.
///
/// The packet is `Σ c_n |n⟩` over the lowest eigenstates of the well; the
/// delayed branch evolves by the eigenphases relative to the lowest populated
/// level (the pump pair is phase-locked to the packet carrier, so only level
/// spacings — exactly periodic with 2π/ω₀ — enter the signal):
/// `signal(τ) = |⟨χ| χ(τ)⟩ + e^{iδ} ⟨χ|χ⟩|²`.
pub fn run_wavepacket_interferogram(
    grid: Grid1D,
    config: &InterferogramConfig,
    delays: &[f64],
) -> Result<Interferogram, ExperimentError> {
    if config.n_states == 0 {
        return Err(ExperimentError::EmptyPacket);
    }
    // rejects n_states beyond what the grid supports
    let states: Vec<Wavefunction1D> = (0..config.n_states)
        .map(|n| harmonic_eigenstate(grid, config.mass, config.omega0, grid.center(), n))
        .collect::<Result<_, _>>()?;

    // coherent-state-like weights, normalized
    let mut weights = Vec::with_capacity(config.n_states);
    let mut w = 1.0f64;
    for n in 0..config.n_states {
        if n > 0 {
            w *= config.coherence / (n as f64).sqrt();
        }
        weights.push(w);
    }
    let norm = weights.iter().map(|w| w * w).sum::<f64>().sqrt();
    let weights: Vec<f64> = weights.iter().map(|w| w / norm).collect();

    let reference: Vec<(Complex64, &Wavefunction1D)> = weights
        .iter()
        .zip(&states)
        .map(|(&w, s)| (Complex64::new(w, 0.0), s))
        .collect();
    let chi = superpose(&reference)?.state;

    let dx = grid.spacing();
    let inner = |a: &Wavefunction1D, b: &Wavefunction1D| -> Complex64 {
        a.values()
            .iter()
            .zip(b.values())
            .map(|(x, y)| x.conj() * y)
            .sum::<Complex64>()
            * dx
    };
    let self_overlap = inner(&chi, &chi);

    let e0 = harmonic_energy(config.omega0, 0);
    let mut signal = Vec::with_capacity(delays.len());
    for &tau in delays {
        let evolved_terms: Vec<(Complex64, &Wavefunction1D)> = weights
            .iter()
            .enumerate()
            .zip(&states)
            .map(|((n, &w), s)| {
                let phase = -(harmonic_energy(config.omega0, n) - e0) * tau;
                (Complex64::from_polar(w, phase), s)
            })
            .collect();
        // pure phase evolution: the pre-normalization norm is already 1
        let evolved = superpose(&evolved_terms)?.state;
        let amp = inner(&chi, &evolved) + Complex64::cis(config.relative_phase) * self_overlap;
        signal.push(amp.norm_sqr());
    }
    Ok(Interferogram { delays: delays.to_vec(), signal })
}

/* Double slit **************************************************************/

/// Two displaced Gaussian branches released into free flight.
///
/// The right branch (at `+separation/2`) carries the constant relative phase
/// and the momentum kick.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleSlitConfig {
    pub separation: f64,
    pub packet_sigma: f64,
    pub relative_phase: f64,
    pub momentum_kick: f64,
    pub propagation_time: f64,
    pub mass: f64,
}

/// Grid and stepping choices for the double-slit propagation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleSlitNumerics {
    pub grid_n: usize,
    pub domain_length: f64,
    pub dt: f64,
}

/// Far-field fringe dataset, with the blocked-slit reference pattern.
#[derive(Debug, Clone)]
pub struct FringeDataset {
    pub positions: Vec<f64>,
    /// Density of the superposed (renormalized) state.
    pub density: Vec<f64>,
    /// Sum of the separately propagated branch densities (one slit blocked
    /// at a time) — the fringe-free envelope.
    pub incoherent: Vec<f64>,
    /// Norm of the raw two-branch sum before renormalization.
    pub pre_normalization_norm: f64,
    pub state: Wavefunction1D,
}

impl FringeDataset {
    /// Envelope-normalized interferogram `1 + V(x)cos(kx + θ)` restricted to
    /// the window where the incoherent envelope is at least `1e-4` of its
    /// peak. This is the standard blocked-slit normalization: dividing out
    /// the envelope leaves an unbiased cosine for fringe fitting.
    pub fn contrast_signal(&self) -> (Vec<f64>, Vec<f64>) {
        let peak = self.incoherent.iter().cloned().fold(0.0, f64::max);
        let ok: Vec<bool> =
            self.incoherent.iter().map(|&e| e >= 1e-4 * peak).collect();
        // largest contiguous admissible run
        let (mut best_lo, mut best_hi) = (0usize, 0usize);
        let mut i = 0;
        while i < ok.len() {
            if ok[i] {
                let start = i;
                while i < ok.len() && ok[i] {
                    i += 1;
                }
                if i - start > best_hi - best_lo {
                    best_lo = start;
                    best_hi = i;
                }
            } else {
                i += 1;
            }
        }
        let xs = self.positions[best_lo..best_hi].to_vec();
        let values = (best_lo..best_hi)
            .map(|i| self.pre_normalization_norm * self.density[i] / self.incoherent[i])
            .collect();
        (xs, values)
    }
}

/// Expected far-field fringe spacing `2πħt/(md)` (ħ = 1).
pub fn double_slit_fringe_spacing(config: &DoubleSlitConfig) -> f64 {
    2.0 * core::f64::consts::PI * config.propagation_time
        / (config.mass * config.separation)
}

/// Superpose the two branches, fly them freely, return the fringe pattern.
pub fn run_double_slit(
    config: &DoubleSlitConfig,
    numerics: &DoubleSlitNumerics,
) -> Result<FringeDataset, ExperimentError> {
    let (dataset, _) = double_slit_run(config, numerics, None)?;
    Ok(dataset)
}

/// Same run, also carrying a Bohmian ensemble through the evolution.
/// Frames for the ensemble are recorded every `frame_stride` steps.
pub fn run_double_slit_with_trajectories(
    config: &DoubleSlitConfig,
    numerics: &DoubleSlitNumerics,
    n_traj: usize,
    seed: u64,
    frame_stride: usize,
) -> Result<(FringeDataset, TrajectoryEnsemble), ExperimentError> {
    let (dataset, ensemble) =
        double_slit_run(config, numerics, Some((n_traj, seed, frame_stride.max(1))))?;
    Ok((dataset, ensemble.expect("ensemble requested")))
}

fn double_slit_run(
    config: &DoubleSlitConfig,
    numerics: &DoubleSlitNumerics,
    trajectories: Option<(usize, u64, usize)>,
) -> Result<(FringeDataset, Option<TrajectoryEnsemble>), ExperimentError> {
    if config.separation <= 4.0 * config.packet_sigma {
        return Err(ExperimentError::SlitsUnresolved {
            separation: config.separation,
            sigma: config.packet_sigma,
        });
    }
    let grid = Grid1D::new(
        -numerics.domain_length / 2.0,
        numerics.domain_length,
        numerics.grid_n,
    )?;
    let spacing = double_slit_fringe_spacing(config);
    if grid.spacing() * 8.0 > spacing {
        return Err(ExperimentError::FringeUnderResolved { spacing, dx: grid.spacing() });
    }

    let a = config.separation / 2.0;
    let mut left =
        Wavefunction1D::gaussian_packet(grid, config.mass, -a, config.packet_sigma, 0.0)?;
    let mut right = Wavefunction1D::gaussian_packet(
        grid,
        config.mass,
        a,
        config.packet_sigma,
        config.momentum_kick,
    )?;
    let one = Complex64::new(1.0, 0.0);
    let branch_phase = Complex64::cis(config.relative_phase);
    let superposed = superpose(&[(one, &left), (branch_phase, &right)])?;
    let pre_normalization_norm = superposed.pre_normalization_norm;
    let mut psi = superposed.state;

    let steps = ((config.propagation_time / numerics.dt).ceil() as usize).max(1);
    let dt = config.propagation_time / steps as f64;
    let prop = Propagator1D::new(grid, config.mass, &PotentialSpec::Free, dt)?;

    // blocked-slit reference: each branch flies alone
    prop.propagate(&mut left, steps)?;
    prop.propagate(&mut right, steps)?;
    let incoherent: Vec<f64> = left
        .density()
        .iter()
        .zip(right.density())
        .map(|(l, r)| l + r)
        .collect();

    let ensemble = match trajectories {
        None => {
            prop.propagate(&mut psi, steps)?;
            None
        }
        Some((n_traj, seed, stride)) => {
            let mut frames = alloc::vec![polar_decompose(&psi)?];
            let mut done = 0usize;
            prop.propagate(&mut psi, 0)?; // precondition check
            while done < steps {
                let chunk = stride.min(steps - done);
                for _ in 0..chunk {
                    prop.step(&mut psi)?;
                }
                done += chunk;
                frames.push(polar_decompose(&psi)?);
            }
            Some(integrate_trajectories(&frames, n_traj, seed)?)
        }
    };

    let positions = (0..grid.len()).map(|i| grid.position(i)).collect();
    let density = psi.density();
    Ok((
        FringeDataset {
            positions,
            density,
            incoherent,
            pre_normalization_norm,
            state: psi,
        },
        ensemble,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn fringe_fit_exact_cosine() {
        // synthetic 1 + cos(2x): period π, θ = 0, visibility 1
        // (step π/64 puts samples exactly on the extrema)
        let axis: Vec<f64> = (0..256).map(|i| i as f64 * PI / 64.0).collect();
        let signal: Vec<f64> = axis.iter().map(|&x| 1.0 + (2.0 * x).cos()).collect();
        let fit = fringe_analysis(&axis, &signal).unwrap();
        assert!((fit.period - PI).abs() < 1e-9);
        assert!(fit.phase.abs() < 1e-9);
        assert!((fit.visibility - 1.0).abs() < 1e-12);
        assert!(fit.residual_rms < 1e-10);
    }

    #[test]
    fn fringe_fit_recovers_phase() {
        // synthetic 1 + 0.5 cos(2x + 0.7): θ = 0.7 within 1e-6
        let axis: Vec<f64> = (0..256).map(|i| -3.0 + i as f64 * 0.05).collect();
        let signal: Vec<f64> =
            axis.iter().map(|&x| 1.0 + 0.5 * (2.0 * x + 0.7).cos()).collect();
        let fit = fringe_analysis(&axis, &signal).unwrap();
        assert!((fit.phase - 0.7).abs() < 1e-6, "phase {}", fit.phase);
        assert!((fit.period - PI).abs() < 1e-8);
        // sampled extrema limit the raw visibility estimate
        assert!((fit.visibility - 0.5).abs() < 1e-3);
    }

    #[test]
    fn fringe_fit_rejects_flat_and_slow_signals() {
        let axis: Vec<f64> = (0..64).map(|i| i as f64).collect();
        let flat: Vec<f64> = axis.iter().map(|_| 1.0).collect();
        assert!(matches!(
            fringe_analysis(&axis, &flat),
            Err(ExperimentError::NoFringes { .. })
        ));
        // one cycle across the window: under the 3-period precondition
        let slow: Vec<f64> =
            axis.iter().map(|&x| 1.0 + (2.0 * PI * x / 64.0).cos()).collect();
        assert!(matches!(
            fringe_analysis(&axis, &slow),
            Err(ExperimentError::TooFewPeriods { .. })
        ));
    }

    fn ramsey_system() -> TwoLevelSystem {
        TwoLevelSystem::new(0.0, 2.0, 1.0).unwrap()
    }

    #[test]
    fn ramsey_oracle_scan_matches_formula() {
        let system = ramsey_system();
        let spec = RamseyPulseSpec { carrier_frequency: 2.0, pulse_tau: 1.0, cep: 0.0 };
        let delays = [15.0, 20.0, 25.0];
        let phases = [0.0, PI];
        let scan = run_ramsey_scan(
            &system,
            &spec,
            &delays,
            &phases,
            RamseyMode::AnalyticOracle,
            0.05,
        )
        .unwrap();
        // on resonance: P(T, 0) = 1, P(T, π) = 0 for all T
        for row in scan.populations() {
            assert!((row[0] - 1.0).abs() < 1e-14);
            assert!(row[1].abs() < 1e-14);
        }
    }

    #[test]
    fn ramsey_oracle_fringe_period_in_delay() {
        // Δ = 1: the delay fringe has period 2π
        let system = ramsey_system();
        let spec = RamseyPulseSpec { carrier_frequency: 1.0, pulse_tau: 1.0, cep: 0.0 };
        let delays: Vec<f64> = (0..200).map(|i| 12.0 + i as f64 * 0.1).collect();
        let scan =
            run_ramsey_scan(&system, &spec, &delays, &[0.0], RamseyMode::AnalyticOracle, 0.05)
                .unwrap();
        let fit = fringe_analysis(&delays, &scan.fringe_in_delay(0)).unwrap();
        assert!((fit.period - 2.0 * PI).abs() < 1e-6, "period {}", fit.period);
    }

    #[test]
    fn ramsey_rejects_overlapping_lobes() {
        let system = ramsey_system();
        let spec = RamseyPulseSpec { carrier_frequency: 2.0, pulse_tau: 1.0, cep: 0.0 };
        let err = run_ramsey_scan(
            &system,
            &spec,
            &[5.0], // lobes span ±5τ: centre distance 5 < 10 overlaps
            &[0.0],
            RamseyMode::FullTdse,
            0.04,
        )
        .unwrap_err();
        assert!(matches!(err, ExperimentError::Field(FieldError::OverlappingPulses(..))));
    }

    #[test]
    fn interferogram_basics() {
        let grid = Grid1D::new(-12.0, 24.0, 256).unwrap();
        let config = InterferogramConfig {
            omega0: 1.0,
            mass: 1.0,
            n_states: 5,
            coherence: 1.2,
            relative_phase: 0.0,
        };
        let delays: Vec<f64> = (0..64).map(|i| i as f64 * 0.2).collect();
        let gram = run_wavepacket_interferogram(grid, &config, &delays).unwrap();
        // δ = 0, τ = 0: perfect overlap maximum
        let s0 = gram.signal[0];
        for &s in &gram.signal {
            assert!(s <= s0 + 1e-9);
        }
        assert!((s0 - 4.0).abs() < 1e-9, "s(0) = {s0}");
    }

    #[test]
    fn interferogram_recurrence_is_exact() {
        let grid = Grid1D::new(-12.0, 24.0, 256).unwrap();
        let config = InterferogramConfig {
            omega0: 1.0,
            mass: 1.0,
            n_states: 6,
            coherence: 1.0,
            relative_phase: 0.4,
        };
        let period = 2.0 * PI / config.omega0;
        let probe: Vec<f64> = (0..40).map(|i| i as f64 * 0.157).collect();
        let shifted: Vec<f64> = probe.iter().map(|&t| t + period).collect();
        let a = run_wavepacket_interferogram(grid, &config, &probe).unwrap();
        let b = run_wavepacket_interferogram(grid, &config, &shifted).unwrap();
        for (x, y) in a.signal.iter().zip(&b.signal) {
            assert!((x - y).abs() < 1e-6, "{x} vs {y}");
        }
    }

    #[test]
    fn interferogram_phase_flip_swaps_extrema() {
        let grid = Grid1D::new(-12.0, 24.0, 256).unwrap();
        let base = InterferogramConfig {
            omega0: 1.0,
            mass: 1.0,
            n_states: 5,
            coherence: 1.0,
            relative_phase: 0.0,
        };
        let flipped = InterferogramConfig { relative_phase: PI, ..base };
        let delays: Vec<f64> = (0..80).map(|i| i as f64 * 0.1).collect();
        let a = run_wavepacket_interferogram(grid, &base, &delays).unwrap();
        let b = run_wavepacket_interferogram(grid, &flipped, &delays).unwrap();
        // the interference term flips sign: a + b is delay-independent where
        // the packet autocorrelation is, and max(a) pairs with min(b)
        let (amax, _) = a.signal.iter().enumerate().fold(
            (0usize, 0.0f64),
            |acc, (i, &s)| if s > acc.1 { (i, s) } else { acc },
        );
        let bmin = b.signal.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!((b.signal[amax] - bmin).abs() < 1e-9);
    }

    #[test]
    fn interferogram_rejects_unsupported_packets() {
        let grid = Grid1D::new(-6.0, 12.0, 64).unwrap();
        let config = InterferogramConfig {
            omega0: 1.0,
            mass: 1.0,
            n_states: 50,
            coherence: 1.0,
            relative_phase: 0.0,
        };
        let err = run_wavepacket_interferogram(grid, &config, &[0.0]).unwrap_err();
        assert!(matches!(
            err,
            ExperimentError::Hydro(HydroError::UnsupportedEigenstate { .. })
        ));
    }

    fn slit_config() -> DoubleSlitConfig {
        DoubleSlitConfig {
            separation: 4.0,
            packet_sigma: 0.25,
            relative_phase: 0.0,
            momentum_kick: 0.0,
            propagation_time: 2.0,
            mass: 1.0,
        }
    }

    fn slit_numerics() -> DoubleSlitNumerics {
        DoubleSlitNumerics { grid_n: 2048, domain_length: 60.0, dt: 5e-4 }
    }

    #[test]
    fn double_slit_fringe_spacing_matches_far_field() {
        let config = slit_config();
        let out = run_double_slit(&config, &slit_numerics()).unwrap();
        let (xs, contrast) = out.contrast_signal();
        let fit = fringe_analysis(&xs, &contrast).unwrap();
        let expect = double_slit_fringe_spacing(&config);
        assert!(
            ((fit.period - expect) / expect).abs() < 0.01,
            "period {} vs {expect}",
            fit.period
        );
    }

    #[test]
    fn double_slit_pi_phase_turns_center_dark() {
        let bright = run_double_slit(&slit_config(), &slit_numerics()).unwrap();
        let dark_config = DoubleSlitConfig { relative_phase: PI, ..slit_config() };
        let dark = run_double_slit(&dark_config, &slit_numerics()).unwrap();
        let mid = bright.positions.len() / 2;
        assert!(dark.density[mid] < 1e-6 * bright.density[mid]);
    }

    #[test]
    fn double_slit_preconditions() {
        let bad = DoubleSlitConfig { separation: 0.9, ..slit_config() };
        assert!(matches!(
            run_double_slit(&bad, &slit_numerics()),
            Err(ExperimentError::SlitsUnresolved { .. })
        ));
        let coarse = DoubleSlitNumerics { grid_n: 64, domain_length: 60.0, dt: 5e-4 };
        assert!(matches!(
            run_double_slit(&slit_config(), &coarse),
            Err(ExperimentError::FringeUnderResolved { .. })
        ));
    }
}
