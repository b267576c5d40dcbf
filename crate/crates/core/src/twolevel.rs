//! Lab-frame dynamics of a damped, driven two-level system.
//!
//! The Schrödinger equation `i ∂ₜ c = H(t) c` is integrated with classic RK4
//! on a uniform grid for the non-Hermitian Hamiltonian (bare basis, ħ = 1)
//!
//! ```text
//! H(t) = [ ω_g − iγ_g/2      −μ E(t)       ]
//!        [ −μ E(t)           ω_e − iγ_e/2  ]
//! ```
//!
//! No rotating-wave approximation is applied unless [`HamiltonianMode::RotatingWave`]
//! is selected, in which case the coupling keeps only its co-rotating half
//! `−(μE₀(t)/2) e^{∓iΦ_F(t)}` so the RWA error of the full solution stays
//! measurable. States carry `e^{−iΦ}` with Φ increasing for positive energy,
//! so the unwrapped amplitude phase is `Φ(t) = −arg c(t)`.

use alloc::vec::Vec;
use num_complex::Complex64;
use thiserror::Error;

use crate::field::Drive;
use crate::numerics::unwrap::{PhaseUnwrapper, UnwrapStep};
// f64 math resolves through this trait in pure no_std builds; feature
// unification in test builds links std and shadows it with inherent methods.
#[allow(unused_imports)]
use num_traits::Float;

/// Amplitude modulus below which a phase is numerically meaningless.
pub const EPS_NODE: f64 = 1e-8;

/// Fraction of π above which a step-to-step phase jump counts as unresolved.
const JUMP_GUARD: f64 = 0.999;

#[derive(Debug, Error, PartialEq)]
pub enum TwoLevelError {
    #[error("damping rates must be non-negative: gamma_g={0}, gamma_e={1}")]
    NegativeDamping(f64, f64),
    #[error("level ordering requires omega_e > omega_g ({0} <= {1})")]
    LevelOrdering(f64, f64),
    #[error("time grid too coarse: dt*max(omega_e, Omega_R, |Delta|) <= 0.1 violated (dt={dt}, scale={scale})")]
    GridTooCoarse { dt: f64, scale: f64 },
    #[error("initial state norm {0} exceeds 1")]
    InitialNormTooLarge(f64),
    #[error("integration span is empty or reversed")]
    EmptySpan,
    #[error("non-finite amplitude at step {step}: integration unstable")]
    NonFiniteAmplitude { step: usize },
    #[error("phase unwrap failure at sample {index} (principal step {step} rad): grid does not resolve the fastest phase")]
    PhaseUnwrapFailure { index: usize, step: f64 },
    #[error("amplitude modulus {modulus} below the node threshold at sample {index}: phase undefined")]
    NodeAmplitude { index: usize, modulus: f64 },
    #[error("trajectory grids do not match")]
    GridMismatch,
}

/// Static data of the two-level system: bare eigenfrequencies, dipole
/// coupling (so the Rabi frequency is `Ω_R(t) = μ E₀(t)`), damping rates,
/// and the initial bare phases carried by the bare states `e^{−iΦ_x(t)}`
/// with `Φ_x(t) = φ_x + ω_x t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelSystem {
    pub omega_g: f64,
    pub omega_e: f64,
    pub dipole: f64,
    pub gamma_g: f64,
    pub gamma_e: f64,
    pub phi_g: f64,
    pub phi_e: f64,
}

impl TwoLevelSystem {
    pub fn new(omega_g: f64, omega_e: f64, dipole: f64) -> Result<Self, TwoLevelError> {
        Self {
            omega_g,
            omega_e,
            dipole,
            gamma_g: 0.0,
            gamma_e: 0.0,
            phi_g: 0.0,
            phi_e: 0.0,
        }
        .validated()
    }

    pub fn with_damping(mut self, gamma_g: f64, gamma_e: f64) -> Result<Self, TwoLevelError> {
        self.gamma_g = gamma_g;
        self.gamma_e = gamma_e;
        self.validated()
    }

    pub fn with_initial_phases(mut self, phi_g: f64, phi_e: f64) -> Self {
        self.phi_g = phi_g;
        self.phi_e = phi_e;
        self
    }

    fn validated(self) -> Result<Self, TwoLevelError> {
        if self.gamma_g < 0.0 || self.gamma_e < 0.0 {
            return Err(TwoLevelError::NegativeDamping(self.gamma_g, self.gamma_e));
        }
        if self.omega_e <= self.omega_g {
            return Err(TwoLevelError::LevelOrdering(self.omega_e, self.omega_g));
        }
        Ok(self)
    }

    /// Bare transition frequency ω_e − ω_g.
    pub fn transition_frequency(&self) -> f64 {
        self.omega_e - self.omega_g
    }

    /// Detuning Δ = ω_e − ω_g − ω of the transition from a carrier.
    pub fn detuning(&self, carrier: f64) -> f64 {
        self.transition_frequency() - carrier
    }

    /// Peak Rabi frequency for a drive, `Ω̂_R = μ · max E₀`.
    pub fn peak_rabi_frequency(&self, drive: &impl Drive) -> f64 {
        self.dipole.abs() * drive.peak_envelope()
    }
}

/// Which coupling enters the integrated Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HamiltonianMode {
    /// Full oscillating field −μE(t) (default; no approximation).
    Full,
    /// Co-rotating half of the coupling only.
    RotatingWave,
}

/// Bare level selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Ground,
    Excited,
}

/// Sampled solution of the two-level Schrödinger equation in the bare basis
/// (lab frame). Immutable once produced.
#[derive(Debug, Clone)]
pub struct AmplitudeTrajectory {
    times: Vec<f64>,
    c_g: Vec<Complex64>,
    c_e: Vec<Complex64>,
    phase_g: Vec<f64>,
    phase_e: Vec<f64>,
}

impl AmplitudeTrajectory {
    /// Build a trajectory from raw samples, unwrapping the amplitude phases.
    ///
    /// Samples with modulus below [`EPS_NODE`] get `NaN` phases and restart
    /// the unwrap continuity on the next resolved sample.
    pub fn from_samples(
        times: Vec<f64>,
        c_g: Vec<Complex64>,
        c_e: Vec<Complex64>,
    ) -> Result<Self, TwoLevelError> {
        if times.len() != c_g.len() || times.len() != c_e.len() {
            return Err(TwoLevelError::GridMismatch);
        }
        let phase_g = unwrap_masked(&c_g)?;
        let phase_e = unwrap_masked(&c_e)?;
        Ok(Self { times, c_g, c_e, phase_g, phase_e })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn amplitudes(&self, level: Level) -> &[Complex64] {
        match level {
            Level::Ground => &self.c_g,
            Level::Excited => &self.c_e,
        }
    }

    /// Unwrapped phase series (NaN where the modulus is below [`EPS_NODE`]).
    pub fn phases(&self, level: Level) -> &[f64] {
        match level {
            Level::Ground => &self.phase_g,
            Level::Excited => &self.phase_e,
        }
    }

    pub fn population(&self, level: Level, index: usize) -> f64 {
        self.amplitudes(level)[index].norm_sqr()
    }

    pub fn populations(&self, level: Level) -> Vec<f64> {
        self.amplitudes(level).iter().map(|c| c.norm_sqr()).collect()
    }

    /// Total norm |c_g|² + |c_e|² at a sample.
    pub fn norm(&self, index: usize) -> f64 {
        self.c_g[index].norm_sqr() + self.c_e[index].norm_sqr()
    }
}

fn unwrap_masked(amplitudes: &[Complex64]) -> Result<Vec<f64>, TwoLevelError> {
    let mut unwrapper = PhaseUnwrapper::new(JUMP_GUARD);
    let mut out = Vec::with_capacity(amplitudes.len());
    for (index, c) in amplitudes.iter().enumerate() {
        if c.norm() < EPS_NODE {
            out.push(f64::NAN);
            unwrapper.reset();
            continue;
        }
        // states are e^{−iΦ}: the phase is the negated argument
        match unwrapper.push(-c.arg()) {
            UnwrapStep::Value(v) => out.push(v),
            UnwrapStep::AmbiguousJump { step } => {
                return Err(TwoLevelError::PhaseUnwrapFailure { index, step })
            }
        }
    }
    Ok(out)
}

fn hamiltonian_apply(
    system: &TwoLevelSystem,
    drive: &impl Drive,
    mode: HamiltonianMode,
    t: f64,
    c: (Complex64, Complex64),
) -> (Complex64, Complex64) {
    let diag_g = Complex64::new(system.omega_g, -system.gamma_g / 2.0);
    let diag_e = Complex64::new(system.omega_e, -system.gamma_e / 2.0);
    let (h_ge, h_eg) = match mode {
        HamiltonianMode::Full => {
            let coupling = Complex64::new(-system.dipole * drive.field_value(t), 0.0);
            (coupling, coupling)
        }
        HamiltonianMode::RotatingWave => {
            let half = -0.5 * system.dipole * drive.envelope_value(t);
            let phase = drive.total_phase(t);
            let rot = Complex64::new(phase.cos(), phase.sin());
            // ⟨g|H|e⟩ carries e^{+iΦ_F}, ⟨e|H|g⟩ its conjugate
            (half * rot, half * rot.conj())
        }
    };
    (diag_g * c.0 + h_ge * c.1, h_eg * c.0 + diag_e * c.1)
}

fn schroedinger_rhs(
    system: &TwoLevelSystem,
    drive: &impl Drive,
    mode: HamiltonianMode,
    t: f64,
    c: (Complex64, Complex64),
) -> (Complex64, Complex64) {
    let hc = hamiltonian_apply(system, drive, mode, t, c);
    (-Complex64::i() * hc.0, -Complex64::i() * hc.1)
}

/// Integrate the two-level Schrödinger equation from bare-basis coefficients.
///
/// `initial` holds the coefficients relative to the bare states at the span
/// start, so the seeded amplitudes are `(initial.0 e^{−iφ_g}, initial.1 e^{−iφ_e})`
/// and a freely evolving ground state reports the unwrapped phase
/// `φ_g + ω_g (t − t0)`. Use [`integrate_tdse_from`] to continue from raw
/// amplitudes of an earlier segment.
pub fn integrate_tdse(
    system: &TwoLevelSystem,
    drive: &impl Drive,
    initial: (Complex64, Complex64),
    t_span: (f64, f64),
    dt: f64,
    mode: HamiltonianMode,
) -> Result<AmplitudeTrajectory, TwoLevelError> {
    let seeded = (
        initial.0 * Complex64::cis(-system.phi_g),
        initial.1 * Complex64::cis(-system.phi_e),
    );
    integrate_tdse_from(system, drive, seeded, t_span, dt, mode)
}

/// Integrate from raw lab-frame amplitudes (no initial-phase seeding).
pub fn integrate_tdse_from(
    system: &TwoLevelSystem,
    drive: &impl Drive,
    initial: (Complex64, Complex64),
    t_span: (f64, f64),
    dt: f64,
    mode: HamiltonianMode,
) -> Result<AmplitudeTrajectory, TwoLevelError> {
    let (t0, t1) = t_span;
    if !(t1 > t0) || !dt.is_finite() || dt <= 0.0 {
        return Err(TwoLevelError::EmptySpan);
    }
    let scale = grid_scale(system, drive);
    if dt * scale > 0.1 + 1e-12 {
        return Err(TwoLevelError::GridTooCoarse { dt, scale });
    }
    let norm0 = initial.0.norm_sqr() + initial.1.norm_sqr();
    if norm0 > 1.0 + 1e-9 {
        return Err(TwoLevelError::InitialNormTooLarge(norm0));
    }

    let steps = (((t1 - t0) / dt).round() as usize).max(1);
    let h = (t1 - t0) / steps as f64;

    let mut times = Vec::with_capacity(steps + 1);
    let mut c_g = Vec::with_capacity(steps + 1);
    let mut c_e = Vec::with_capacity(steps + 1);
    let mut c = initial;
    times.push(t0);
    c_g.push(c.0);
    c_e.push(c.1);

    for step in 0..steps {
        let t = t0 + step as f64 * h;
        let k1 = schroedinger_rhs(system, drive, mode, t, c);
        let k2 = schroedinger_rhs(
            system,
            drive,
            mode,
            t + h / 2.0,
            (c.0 + k1.0 * (h / 2.0), c.1 + k1.1 * (h / 2.0)),
        );
        let k3 = schroedinger_rhs(
            system,
            drive,
            mode,
            t + h / 2.0,
            (c.0 + k2.0 * (h / 2.0), c.1 + k2.1 * (h / 2.0)),
        );
        let k4 =
            schroedinger_rhs(system, drive, mode, t + h, (c.0 + k3.0 * h, c.1 + k3.1 * h));
        c = (
            c.0 + (k1.0 + (k2.0 + k3.0) * 2.0 + k4.0) * (h / 6.0),
            c.1 + (k1.1 + (k2.1 + k3.1) * 2.0 + k4.1) * (h / 6.0),
        );
        if !c.0.is_finite() || !c.1.is_finite() {
            return Err(TwoLevelError::NonFiniteAmplitude { step });
        }
        times.push(t0 + (step + 1) as f64 * h);
        c_g.push(c.0);
        c_e.push(c.1);
    }

    AmplitudeTrajectory::from_samples(times, c_g, c_e)
}

fn grid_scale(system: &TwoLevelSystem, drive: &impl Drive) -> f64 {
    let delta = system.detuning(drive.carrier_frequency()).abs();
    system
        .omega_e
        .abs()
        .max(system.peak_rabi_frequency(drive))
        .max(delta)
}

/// Map a lab-frame trajectory into the rotating frame of `drive`: the excited
/// amplitude is multiplied by `e^{+iΦ_F(t)}`, the ground amplitude is kept,
/// phases are re-unwrapped.
pub fn to_rotating_frame(
    traj: &AmplitudeTrajectory,
    drive: &impl Drive,
) -> Result<AmplitudeTrajectory, TwoLevelError> {
    frame_transform(traj, drive, 1.0)
}

/// Inverse of [`to_rotating_frame`].
pub fn from_rotating_frame(
    traj: &AmplitudeTrajectory,
    drive: &impl Drive,
) -> Result<AmplitudeTrajectory, TwoLevelError> {
    frame_transform(traj, drive, -1.0)
}

fn frame_transform(
    traj: &AmplitudeTrajectory,
    drive: &impl Drive,
    sign: f64,
) -> Result<AmplitudeTrajectory, TwoLevelError> {
    let c_e = traj
        .times
        .iter()
        .zip(&traj.c_e)
        .map(|(&t, &c)| c * Complex64::cis(sign * drive.total_phase(t)))
        .collect();
    AmplitudeTrajectory::from_samples(traj.times.clone(), traj.c_g.clone(), c_e)
}

/// Strict unwrapped-phase extraction for one level.
///
/// Unlike the phases stored on the trajectory (which mask nodes with NaN),
/// this fails if any sample falls below the node threshold.
pub fn extract_amplitude_phase(
    traj: &AmplitudeTrajectory,
    level: Level,
) -> Result<Vec<f64>, TwoLevelError> {
    let amps = traj.amplitudes(level);
    if let Some(index) = amps.iter().position(|c| c.norm() < EPS_NODE) {
        return Err(TwoLevelError::NodeAmplitude { index, modulus: amps[index].norm() });
    }
    Ok(traj.phases(level).to_vec())
}

/// RWA Rabi populations for a constant drive without damping:
/// `P_e(t) = (Ω_R²/Ω²) sin²(Ωt/2)` with `Ω = √(Ω_R² + Δ²)`.
pub fn analytic_rabi_population(omega_rabi: f64, detuning: f64, t: f64) -> f64 {
    if omega_rabi == 0.0 {
        return 0.0;
    }
    let omega = (omega_rabi * omega_rabi + detuning * detuning).sqrt();
    let s = (omega * t / 2.0).sin();
    (omega_rabi * omega_rabi) / (omega * omega) * s * s
}

/// Ideal Ramsey fringe for two instantaneous π/2 pulses separated by `delay`,
/// the second pulse coupling carrying `e^{−iΔφ}`:
/// `P_e = cos²((Δ·T − Δφ)/2)` with Δ = ω_e − ω_g − ω.
pub fn analytic_ramsey_population(detuning: f64, delay: f64, relative_phase: f64) -> f64 {
    let c = ((detuning * delay - relative_phase) / 2.0).cos();
    c * c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Envelope, PulsedField};
    use core::f64::consts::PI;

    fn zero_field() -> PulsedField {
        PulsedField::new(Envelope::constant(0.0).unwrap(), 1.0, 0.0)
    }

    #[test]
    fn free_ground_evolution_phase() {
        let system = TwoLevelSystem::new(0.4, 1.0, 1.0)
            .unwrap()
            .with_initial_phases(0.3, 0.0);
        let traj = integrate_tdse(
            &system,
            &zero_field(),
            (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)),
            (0.0, 10.0),
            0.01,
            HamiltonianMode::Full,
        )
        .unwrap();
        for (i, &t) in traj.times().iter().enumerate() {
            assert!((traj.population(Level::Ground, i) - 1.0).abs() < 1e-12);
            let expected = 0.3 + 0.4 * t;
            assert!(
                (traj.phases(Level::Ground)[i] - expected).abs() < 1e-9,
                "t={t}: {} vs {expected}",
                traj.phases(Level::Ground)[i]
            );
            // excited amplitude stays at the node: phase masked
            assert!(traj.phases(Level::Excited)[i].is_nan());
        }
    }

    #[test]
    fn excited_decay_is_exponential() {
        let system = TwoLevelSystem::new(0.0, 1.0, 1.0)
            .unwrap()
            .with_damping(0.0, 0.5)
            .unwrap();
        let traj = integrate_tdse(
            &system,
            &zero_field(),
            (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)),
            (0.0, 10.0),
            0.002,
            HamiltonianMode::Full,
        )
        .unwrap();
        for (i, &t) in traj.times().iter().enumerate() {
            let expected = (-0.5 * t).exp();
            assert!(
                (traj.population(Level::Excited, i) - expected).abs() < 1e-10,
                "t={t}"
            );
        }
    }

    #[test]
    fn damping_makes_norm_non_increasing() {
        let system = TwoLevelSystem::new(0.0, 1.0, 0.3)
            .unwrap()
            .with_damping(0.05, 0.4)
            .unwrap();
        let drive = PulsedField::new(Envelope::constant(0.2).unwrap(), 1.0, 0.0);
        let traj = integrate_tdse(
            &system,
            &drive,
            (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)),
            (0.0, 20.0),
            0.01,
            HamiltonianMode::Full,
        )
        .unwrap();
        for i in 1..traj.len() {
            assert!(traj.norm(i) <= traj.norm(i - 1) + 1e-12);
        }
    }

    #[test]
    fn resonant_pi_pulse_full_hamiltonian() {
        // Ω_R = 0.01 ω_e; at t = π/Ω_R the counter-rotating ripple vanishes
        // and the excited population reaches 1 within 1e-3.
        let system = TwoLevelSystem::new(0.0, 1.0, 1.0).unwrap();
        let drive = PulsedField::new(Envelope::constant(0.01).unwrap(), 1.0, 0.0);
        let t_pi = PI / 0.01;
        let traj = integrate_tdse(
            &system,
            &drive,
            (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)),
            (0.0, t_pi),
            0.05,
            HamiltonianMode::Full,
        )
        .unwrap();
        let p_final = traj.population(Level::Excited, traj.len() - 1);
        assert!((p_final - 1.0).abs() < 1e-3, "P_e(t_pi) = {p_final}");
    }

    #[test]
    fn rwa_mode_matches_rabi_oracle_pointwise() {
        let system = TwoLevelSystem::new(0.0, 1.0, 1.0).unwrap();
        let drive = PulsedField::new(Envelope::constant(0.01).unwrap(), 1.0, 0.0);
        let period = 2.0 * PI / 0.01;
        let traj = integrate_tdse(
            &system,
            &drive,
            (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)),
            (0.0, period),
            0.05,
            HamiltonianMode::RotatingWave,
        )
        .unwrap();
        let mut worst = 0.0f64;
        for (i, &t) in traj.times().iter().enumerate() {
            let oracle = analytic_rabi_population(0.01, 0.0, t);
            worst = worst.max((traj.population(Level::Excited, i) - oracle).abs());
        }
        assert!(worst < 1e-6, "max |P - oracle| = {worst}");
    }

    #[test]
    fn rk4_fourth_order_against_rabi_oracle() {
        let system = TwoLevelSystem::new(0.0, 1.0, 1.0).unwrap();
        let drive = PulsedField::new(Envelope::constant(0.05).unwrap(), 1.0, 0.0);
        let t_end = 40.0;
        let mut errs = [0.0f64; 2];
        for (pass, &dt) in [0.08, 0.04].iter().enumerate() {
            let traj = integrate_tdse(
                &system,
                &drive,
                (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)),
                (0.0, t_end),
                dt,
                HamiltonianMode::RotatingWave,
            )
            .unwrap();
            let i = traj.len() - 1;
            errs[pass] =
                (traj.population(Level::Excited, i) - analytic_rabi_population(0.05, 0.0, t_end)).abs();
        }
        let ratio = errs[0] / errs[1];
        assert!(ratio > 8.0 && ratio < 40.0, "expected ~16x error drop, got {ratio} ({errs:?})");
    }

    #[test]
    fn norm_conservation_scales_as_dt4() {
        let system = TwoLevelSystem::new(0.0, 1.0, 0.8).unwrap();
        let drive = PulsedField::new(Envelope::constant(0.1).unwrap(), 0.9, 0.0);
        let mut devs = [0.0f64; 2];
        for (pass, &dt) in [0.05, 0.025].iter().enumerate() {
            let traj = integrate_tdse(
                &system,
                &drive,
                (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)),
                (0.0, 30.0),
                dt,
                HamiltonianMode::Full,
            )
            .unwrap();
            devs[pass] = (0..traj.len())
                .map(|i| (traj.norm(i) - 1.0).abs())
                .fold(0.0, f64::max);
        }
        let ratio = devs[0] / devs[1];
        assert!(ratio > 8.0, "norm deviation ratio {ratio} ({devs:?})");
    }

    #[test]
    fn linearity_of_the_propagator() {
        let system = TwoLevelSystem::new(0.0, 1.3, 0.7)
            .unwrap()
            .with_initial_phases(0.2, -0.4);
        let drive = PulsedField::new(Envelope::gaussian(0.2, 5.0, 10.0).unwrap(), 1.3, 0.3);
        let span = (0.0, 20.0);
        let dt = 0.02;
        let u = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        let v = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
        let alpha = Complex64::new(0.6, 0.1);
        let beta = Complex64::new(0.3, -0.55);
        let mixed = (u.0 * alpha + v.0 * beta, u.1 * alpha + v.1 * beta);

        let t_u = integrate_tdse(&system, &drive, u, span, dt, HamiltonianMode::Full).unwrap();
        let t_v = integrate_tdse(&system, &drive, v, span, dt, HamiltonianMode::Full).unwrap();
        let t_m = integrate_tdse(&system, &drive, mixed, span, dt, HamiltonianMode::Full).unwrap();

        for i in 0..t_m.len() {
            let combo_g = t_u.amplitudes(Level::Ground)[i] * alpha
                + t_v.amplitudes(Level::Ground)[i] * beta;
            let combo_e = t_u.amplitudes(Level::Excited)[i] * alpha
                + t_v.amplitudes(Level::Excited)[i] * beta;
            assert!((t_m.amplitudes(Level::Ground)[i] - combo_g).norm() < 1e-10);
            assert!((t_m.amplitudes(Level::Excited)[i] - combo_e).norm() < 1e-10);
        }
    }

    #[test]
    fn global_phase_covariance() {
        let system = TwoLevelSystem::new(0.0, 1.0, 0.5).unwrap();
        let drive = PulsedField::new(Envelope::constant(0.1).unwrap(), 1.0, 0.0);
        let alpha = 0.7;
        let base = (
            Complex64::new(0.8, 0.0),
            Complex64::new(0.6, 0.0),
        );
        let shifted = (base.0 * Complex64::cis(-alpha), base.1 * Complex64::cis(-alpha));
        let t0 = integrate_tdse(&system, &drive, base, (0.0, 15.0), 0.01, HamiltonianMode::Full)
            .unwrap();
        let t1 = integrate_tdse(&system, &drive, shifted, (0.0, 15.0), 0.01, HamiltonianMode::Full)
            .unwrap();
        for i in 0..t0.len() {
            let expect = t0.amplitudes(Level::Ground)[i] * Complex64::cis(-alpha);
            assert!((t1.amplitudes(Level::Ground)[i] - expect).norm() < 1e-12);
            let dphi = t1.phases(Level::Ground)[i] - t0.phases(Level::Ground)[i];
            assert!((dphi - alpha).abs() < 1e-10, "i={i}: {dphi}");
        }
    }

    #[test]
    fn rotating_frame_round_trip_and_identity() {
        let system = TwoLevelSystem::new(0.0, 1.0, 0.4).unwrap();
        let drive = PulsedField::new(Envelope::constant(0.05).unwrap(), 1.0, 0.2);
        let traj = integrate_tdse(
            &system,
            &drive,
            (Complex64::new(0.6, 0.0), Complex64::new(0.8, 0.0)),
            (0.0, 12.0),
            0.01,
            HamiltonianMode::Full,
        )
        .unwrap();
        // zero-phase drive: transform is the identity
        let null_drive = PulsedField::new(Envelope::constant(0.0).unwrap(), 0.0, 0.0);
        let same = to_rotating_frame(&traj, &null_drive).unwrap();
        for i in 0..traj.len() {
            assert_eq!(traj.amplitudes(Level::Excited)[i], same.amplitudes(Level::Excited)[i]);
        }
        // round trip
        let rot = to_rotating_frame(&traj, &drive).unwrap();
        let back = from_rotating_frame(&rot, &drive).unwrap();
        for i in 0..traj.len() {
            assert!(
                (traj.amplitudes(Level::Excited)[i] - back.amplitudes(Level::Excited)[i]).norm()
                    < 1e-12
            );
        }
    }

    #[test]
    fn rotating_frame_phase_grows_linearly_for_constant_amplitude() {
        // constant c_e = 1 with ω = 1, φ ≡ 0: rotating-frame phase −Φ_F = −t,
        // i.e. the stored phase (−arg) grows as −(−t)... the transform adds
        // +Φ_F to arg, so the unwrapped phase Φ = −arg drops as −t.
        let times: Vec<f64> = (0..200).map(|i| i as f64 * 0.05).collect();
        let ones: Vec<Complex64> = times.iter().map(|_| Complex64::new(1.0, 0.0)).collect();
        let traj =
            AmplitudeTrajectory::from_samples(times.clone(), ones.clone(), ones).unwrap();
        let drive = PulsedField::new(Envelope::constant(0.0).unwrap(), 1.0, 0.0);
        let rot = to_rotating_frame(&traj, &drive).unwrap();
        for (i, &t) in times.iter().enumerate() {
            assert!((rot.phases(Level::Excited)[i] - (-t)).abs() < 1e-10);
        }
    }

    #[test]
    fn extract_phase_free_evolution_slope() {
        let system = TwoLevelSystem::new(0.7, 1.5, 1.0)
            .unwrap()
            .with_initial_phases(0.1, 0.0);
        let traj = integrate_tdse(
            &system,
            &zero_field(),
            (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)),
            (0.0, 5.0),
            0.01,
            HamiltonianMode::Full,
        )
        .unwrap();
        let phases = extract_amplitude_phase(&traj, Level::Ground).unwrap();
        let dt = traj.times()[1] - traj.times()[0];
        for i in 1..phases.len() {
            let slope = (phases[i] - phases[i - 1]) / dt;
            assert!((slope - 0.7).abs() < 1e-7, "i={i}: slope {slope}");
        }
        // excited level sits at the node the whole time
        let err = extract_amplitude_phase(&traj, Level::Excited).unwrap_err();
        assert!(matches!(err, TwoLevelError::NodeAmplitude { .. }));
    }

    #[test]
    fn extract_phase_constant_and_pure_rotation() {
        let times: Vec<f64> = (0..100).map(|i| i as f64 * 0.05).collect();
        let c_g: Vec<Complex64> =
            times.iter().map(|&t| Complex64::cis(-2.0 * t)).collect();
        let c_e: Vec<Complex64> = times.iter().map(|_| Complex64::new(0.5, 0.0)).collect();
        let traj = AmplitudeTrajectory::from_samples(times.clone(), c_g, c_e).unwrap();
        let pg = extract_amplitude_phase(&traj, Level::Ground).unwrap();
        let pe = extract_amplitude_phase(&traj, Level::Excited).unwrap();
        for (i, &t) in times.iter().enumerate() {
            assert!((pg[i] - 2.0 * t).abs() < 1e-12);
            assert!(pe[i].abs() < 1e-15);
        }
    }

    #[test]
    fn analytic_oracles() {
        // π pulse
        assert!((analytic_rabi_population(0.2, 0.0, PI / 0.2) - 1.0).abs() < 1e-14);
        // no drive
        assert_eq!(analytic_rabi_population(0.0, 0.5, 3.0), 0.0);
        // Ω_R = 1, Δ = 1, t = π → (1/2) sin²(π/√2)
        let want = 0.5 * (PI / 2.0f64.sqrt()).sin().powi(2);
        assert!((analytic_rabi_population(1.0, 1.0, PI) - want).abs() < 1e-14);

        assert!((analytic_ramsey_population(0.0, 3.0, 0.0) - 1.0).abs() < 1e-14);
        assert!(analytic_ramsey_population(0.0, 3.0, PI).abs() < 1e-14);
        assert!((analytic_ramsey_population(1.0, PI / 2.0, 0.0) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn ramsey_matches_rotation_matrix_product() {
        // independent 2x2 oracle: U2 · F(T) · U1 acting on (1,0)
        let pi_half = |dphi: f64| {
            let inv = 1.0 / 2.0f64.sqrt();
            [
                [Complex64::new(inv, 0.0), Complex64::i() * inv * Complex64::cis(dphi)],
                [Complex64::i() * inv * Complex64::cis(-dphi), Complex64::new(inv, 0.0)],
            ]
        };
        for &(delta, delay, dphi) in
            &[(1.0, PI / 2.0, 0.0), (0.7, 2.0, 0.9), (0.0, 5.0, PI), (-0.4, 3.3, -1.2)]
        {
            let u1 = pi_half(0.0);
            let u2 = pi_half(dphi);
            let after1 = (u1[0][0], u1[1][0]);
            let free = (after1.0, after1.1 * Complex64::cis(-delta * delay));
            let c_e = u2[1][0] * free.0 + u2[1][1] * free.1;
            let oracle = c_e.norm_sqr();
            let formula = analytic_ramsey_population(delta, delay, dphi);
            assert!((oracle - formula).abs() < 1e-12, "delta={delta} T={delay} dphi={dphi}");
        }
    }

    #[test]
    fn precondition_violations_are_rejected() {
        let system = TwoLevelSystem::new(0.0, 5.0, 1.0).unwrap();
        let drive = PulsedField::new(Envelope::constant(0.1).unwrap(), 5.0, 0.0);
        let err = integrate_tdse(
            &system,
            &drive,
            (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)),
            (0.0, 1.0),
            0.1,
            HamiltonianMode::Full,
        )
        .unwrap_err();
        assert!(matches!(err, TwoLevelError::GridTooCoarse { .. }));

        let err = integrate_tdse(
            &system,
            &drive,
            (Complex64::new(1.0, 0.0), Complex64::new(0.5, 0.0)),
            (0.0, 1.0),
            0.01,
            HamiltonianMode::Full,
        )
        .unwrap_err();
        assert!(matches!(err, TwoLevelError::InitialNormTooLarge(_)));

        let err = TwoLevelSystem::new(1.0, 0.5, 1.0).unwrap_err();
        assert!(matches!(err, TwoLevelError::LevelOrdering(..)));
        let err = TwoLevelSystem::new(0.0, 1.0, 1.0).unwrap().with_damping(-0.1, 0.0).unwrap_err();
        assert!(matches!(err, TwoLevelError::NegativeDamping(..)));
    }
}
