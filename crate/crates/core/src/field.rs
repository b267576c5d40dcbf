//! Pulsed driving fields and additive phase bookkeeping.
//!
//! A field is an envelope times a carrier, `E(t) = E₀(t) cos(ωt + φ(t))`,
//! with the envelope-carrier phase expanded as a polynomial around t = 0:
//! `φ(t) = φ₀ + Σ_{k≥1} φ_k tᵏ/k!`. The total field phase `Φ_F(t) = ωt + φ(t)`
//! is kept unwrapped. Everything here is in natural units (ħ = 1).

use alloc::boxed::Box;
use alloc::vec::Vec;
use thiserror::Error;

use crate::numerics::simpson_fn;
// f64 math resolves through this trait in pure no_std builds; feature
// unification in test builds links std and shadows it with inherent methods.
#[allow(unused_imports)]
use num_traits::Float;

/// Number of Simpson subintervals used by the integral phase accumulators.
const QUADRATURE_STEPS: usize = 512;

#[derive(Debug, Error, PartialEq)]
pub enum FieldError {
    #[error("envelope amplitude must be non-negative, got {0}")]
    NegativeAmplitude(f64),
    #[error("envelope width must be positive, got {0}")]
    NonPositiveWidth(f64),
    #[error("evolution phase must vanish at the time origin t0={t0}, got {value}")]
    MisalignedTimeOrigin { t0: f64, value: f64 },
    #[error("pulse train requires bounded envelopes (pulse {0} is unbounded)")]
    UnboundedPulseInTrain(usize),
    #[error("pulses {0} and {1} overlap: delay must exceed the pulse support")]
    OverlappingPulses(usize, usize),
    #[error("pulse train carriers differ: {0} vs {1}")]
    MismatchedCarriers(f64, f64),
    #[error("pulse train must contain at least one pulse")]
    EmptyTrain,
}

/// Built-in envelope shapes. All are non-negative on their support.
#[derive(Debug, Clone, PartialEq)]
pub enum Envelope {
    /// Constant amplitude (unbounded support).
    Constant { amplitude: f64 },
    /// `amplitude · exp(-(t-center)²/tau²)`.
    Gaussian { amplitude: f64, tau: f64, center: f64 },
    /// `amplitude · cos²(π (t-center)/duration)` inside `|t-center| ≤ duration/2`, zero outside.
    CosSquared { amplitude: f64, duration: f64, center: f64 },
}

impl Envelope {
    pub fn constant(amplitude: f64) -> Result<Self, FieldError> {
        validate_amplitude(amplitude)?;
        Ok(Self::Constant { amplitude })
    }

    pub fn gaussian(amplitude: f64, tau: f64, center: f64) -> Result<Self, FieldError> {
        validate_amplitude(amplitude)?;
        if tau <= 0.0 {
            return Err(FieldError::NonPositiveWidth(tau));
        }
        Ok(Self::Gaussian { amplitude, tau, center })
    }

    pub fn cos_squared(amplitude: f64, duration: f64, center: f64) -> Result<Self, FieldError> {
        validate_amplitude(amplitude)?;
        if duration <= 0.0 {
            return Err(FieldError::NonPositiveWidth(duration));
        }
        Ok(Self::CosSquared { amplitude, duration, center })
    }

    /// Envelope value E₀(t).
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            Self::Constant { amplitude } => amplitude,
            Self::Gaussian { amplitude, tau, center } => {
                let u = (t - center) / tau;
                amplitude * (-u * u).exp()
            }
            Self::CosSquared { amplitude, duration, center } => {
                let u = t - center;
                if u.abs() <= duration / 2.0 {
                    let c = (core::f64::consts::PI * u / duration).cos();
                    amplitude * c * c
                } else {
                    0.0
                }
            }
        }
    }

    /// Peak amplitude.
    pub fn peak(&self) -> f64 {
        match *self {
            Self::Constant { amplitude }
            | Self::Gaussian { amplitude, .. }
            | Self::CosSquared { amplitude, .. } => amplitude,
        }
    }

    /// Effective support window, `None` for unbounded envelopes. Gaussian
    /// support is truncated at ±5τ where the envelope is below 2e-11 of peak.
    pub fn support(&self) -> Option<(f64, f64)> {
        match *self {
            Self::Constant { .. } => None,
            Self::Gaussian { tau, center, .. } => Some((center - 5.0 * tau, center + 5.0 * tau)),
            Self::CosSquared { duration, center, .. } => {
                Some((center - duration / 2.0, center + duration / 2.0))
            }
        }
    }

    /// Characteristic e-folding time of the envelope (grid-resolution checks).
    pub fn efolding_time(&self) -> Option<f64> {
        match *self {
            Self::Constant { .. } => None,
            Self::Gaussian { tau, .. } => Some(tau),
            Self::CosSquared { duration, .. } => Some(duration / core::f64::consts::PI),
        }
    }
}

fn validate_amplitude(amplitude: f64) -> Result<(), FieldError> {
    if amplitude < 0.0 {
        Err(FieldError::NegativeAmplitude(amplitude))
    } else {
        Ok(())
    }
}

/// Classical pulsed field `E(t) = E₀(t) cos(ωt + φ(t))`.
///
/// `phase_coefficients[k]` holds φ_{k+1} = ∂ₜ^{k+1} φ(0) so that
/// `φ(t) = cep + Σ φ_k tᵏ/k!`; an empty list is a constant envelope-carrier
/// phase equal to `cep`.
#[derive(Debug, Clone, PartialEq)]
pub struct PulsedField {
    pub envelope: Envelope,
    /// Carrier angular frequency ω.
    pub carrier_frequency: f64,
    /// Carrier-envelope phase φ₀.
    pub cep: f64,
    /// Taylor coefficients φ_k for k ≥ 1 (rad / timeᵏ).
    pub phase_coefficients: Vec<f64>,
}

impl PulsedField {
    pub fn new(envelope: Envelope, carrier_frequency: f64, cep: f64) -> Self {
        Self { envelope, carrier_frequency, cep, phase_coefficients: Vec::new() }
    }

    pub fn with_phase_coefficients(mut self, coefficients: Vec<f64>) -> Self {
        self.phase_coefficients = coefficients;
        self
    }

    /// Envelope-carrier phase `φ(t) = φ₀ + Σ_{k≥1} φ_k tᵏ/k!`.
    pub fn envelope_carrier_phase(&self, t: f64) -> f64 {
        let mut acc = self.cep;
        let mut term = 1.0; // tᵏ/k!
        for (k, &coeff) in self.phase_coefficients.iter().enumerate() {
            term *= t / (k as f64 + 1.0);
            acc += coeff * term;
        }
        acc
    }

    /// `φ'(t) = Σ_{k≥1} φ_k t^{k-1}/(k-1)!`.
    pub fn phase_derivative(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        let mut term = 1.0; // t^{k-1}/(k-1)!
        for (k, &coeff) in self.phase_coefficients.iter().enumerate() {
            if k > 0 {
                term *= t / k as f64;
            }
            acc += coeff * term;
        }
        acc
    }

    /// Total unwrapped field phase `Φ_F(t) = ωt + φ(t)`.
    pub fn total_phase(&self, t: f64) -> f64 {
        self.carrier_frequency * t + self.envelope_carrier_phase(t)
    }

    /// Instantaneous field value `E₀(t) cos(Φ_F(t))` — exact trigonometric
    /// evaluation, no sampling.
    pub fn evaluate(&self, t: f64) -> f64 {
        self.envelope.value(t) * self.total_phase(t).cos()
    }
}

/// A classical drive seen by a quantum system: instantaneous field value plus
/// the envelope/phase split that the rotating-wave and dressed-state pictures
/// need.
pub trait Drive {
    /// Carrier angular frequency ω.
    fn carrier_frequency(&self) -> f64;
    /// Instantaneous field `E(t)`.
    fn field_value(&self, t: f64) -> f64;
    /// Envelope `E₀(t)`.
    fn envelope_value(&self, t: f64) -> f64;
    /// Unwrapped total field phase `Φ_F(t)`.
    fn total_phase(&self, t: f64) -> f64;
    /// Largest envelope value over the drive (precondition checks).
    fn peak_envelope(&self) -> f64;
}

impl Drive for PulsedField {
    fn carrier_frequency(&self) -> f64 {
        self.carrier_frequency
    }

    fn field_value(&self, t: f64) -> f64 {
        self.evaluate(t)
    }

    fn envelope_value(&self, t: f64) -> f64 {
        self.envelope.value(t)
    }

    fn total_phase(&self, t: f64) -> f64 {
        self.total_phase(t)
    }

    fn peak_envelope(&self) -> f64 {
        self.envelope.peak()
    }
}

/// A sequence of non-overlapping pulses sharing one carrier, e.g. the two
/// lobes of a Ramsey drive where the second lobe carries an extra constant
/// phase.
///
/// Between supports the envelope vanishes, so the (then physically inert)
/// total phase is taken from the nearest pulse in time.
#[derive(Debug, Clone)]
pub struct PulseTrain {
    pulses: Vec<PulsedField>,
    supports: Vec<(f64, f64)>,
}

impl PulseTrain {
    pub fn new(pulses: Vec<PulsedField>) -> Result<Self, FieldError> {
        if pulses.is_empty() {
            return Err(FieldError::EmptyTrain);
        }
        let carrier = pulses[0].carrier_frequency;
        for p in &pulses {
            if p.carrier_frequency != carrier {
                return Err(FieldError::MismatchedCarriers(carrier, p.carrier_frequency));
            }
        }
        let mut tagged: Vec<(PulsedField, (f64, f64))> = Vec::with_capacity(pulses.len());
        for (i, p) in pulses.into_iter().enumerate() {
            match p.envelope.support() {
                Some(s) => tagged.push((p, s)),
                None => return Err(FieldError::UnboundedPulseInTrain(i)),
            }
        }
        tagged.sort_by(|a, b| a.1 .0.total_cmp(&b.1 .0));
        for i in 1..tagged.len() {
            if tagged[i].1 .0 < tagged[i - 1].1 .1 {
                return Err(FieldError::OverlappingPulses(i - 1, i));
            }
        }
        let (pulses, supports) = tagged.into_iter().unzip();
        Ok(Self { pulses, supports })
    }

    pub fn pulses(&self) -> &[PulsedField] {
        &self.pulses
    }

    /// Index of the pulse governing time `t`: the one whose support contains
    /// `t`, otherwise the one with the closest support edge.
    fn governing_pulse(&self, t: f64) -> usize {
        let mut best = 0;
        let mut best_dist = f64::INFINITY;
        for (i, &(lo, hi)) in self.supports.iter().enumerate() {
            if t >= lo && t <= hi {
                return i;
            }
            let dist = if t < lo { lo - t } else { t - hi };
            if dist < best_dist {
                best_dist = dist;
                best = i;
            }
        }
        best
    }
}

impl Drive for PulseTrain {
    fn carrier_frequency(&self) -> f64 {
        self.pulses[0].carrier_frequency
    }

    fn field_value(&self, t: f64) -> f64 {
        self.pulses.iter().map(|p| p.evaluate(t)).sum()
    }

    fn envelope_value(&self, t: f64) -> f64 {
        self.pulses.iter().map(|p| p.envelope.value(t)).sum()
    }

    fn total_phase(&self, t: f64) -> f64 {
        self.pulses[self.governing_pulse(t)].total_phase(t)
    }

    fn peak_envelope(&self) -> f64 {
        self.pulses.iter().map(|p| p.envelope.peak()).fold(0.0, f64::max)
    }
}

/// Additive ledger for the dynamical phase of a single quantum state.
///
/// `initial_phase` is the constant part (phase at creation plus everything
/// acquired before the time origin); `evolution` is the explicitly tracked
/// part, anchored so that it vanishes at the origin. The associated action is
/// `S = -ħ · total_phase` (ħ = 1 here).
pub struct PhaseLedger {
    phase_of_creation: f64,
    initial_phase: f64,
    time_origin: f64,
    evolution: Box<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl PhaseLedger {
    /// Tolerance on `evolution(t0)` before the origin counts as misaligned.
    const ORIGIN_TOLERANCE: f64 = 1e-12;

    pub fn new(
        phase_of_creation: f64,
        preceding_history_phase: f64,
        time_origin: f64,
        evolution: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self, FieldError> {
        let at_origin = evolution(time_origin);
        if at_origin.abs() > Self::ORIGIN_TOLERANCE {
            return Err(FieldError::MisalignedTimeOrigin { t0: time_origin, value: at_origin });
        }
        Ok(Self {
            phase_of_creation,
            initial_phase: phase_of_creation + preceding_history_phase,
            time_origin,
            evolution: Box::new(evolution),
        })
    }

    pub fn phase_of_creation(&self) -> f64 {
        self.phase_of_creation
    }

    /// Constant initial phase (creation + preceding history).
    pub fn initial_phase(&self) -> f64 {
        self.initial_phase
    }

    pub fn time_origin(&self) -> f64 {
        self.time_origin
    }

    pub fn evolution_phase(&self, t: f64) -> f64 {
        (self.evolution)(t)
    }

    /// Total (absolute) dynamical phase at `t`.
    pub fn total_phase(&self, t: f64) -> f64 {
        self.initial_phase + self.evolution_phase(t)
    }

    /// Physical action `S(t) = -ħ · total_phase(t)` with ħ = 1.
    pub fn action(&self, t: f64) -> f64 {
        -self.total_phase(t)
    }

    /// Continue the ledger from `t1`: the returned ledger treats the total
    /// phase accumulated so far as its constant history, so chaining two
    /// ledgers over [t0,t1] and [t1,t2] reproduces the single-interval ledger.
    pub fn continue_from(
        &self,
        t1: f64,
        evolution: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self, FieldError> {
        PhaseLedger::new(
            self.phase_of_creation,
            self.total_phase(t1) - self.phase_of_creation,
            t1,
            evolution,
        )
    }
}

impl core::fmt::Debug for PhaseLedger {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("PhaseLedger")
            .field("phase_of_creation", &self.phase_of_creation)
            .field("initial_phase", &self.initial_phase)
            .field("time_origin", &self.time_origin)
            .finish()
    }
}

/// Idle phase of an isolated system with constant energy: `Φ₀(t) = H₀ t / ħ`.
pub fn idle_phase_const(h0: f64, t: f64) -> f64 {
    h0 * t
}

/// Idle phase for a time-dependent energy, `Φ₀(t) = ∫₀ᵗ H₀(t') dt'`, via the
/// module-wide Simpson quadrature.
pub fn idle_phase(h0: impl Fn(f64) -> f64, t: f64) -> f64 {
    simpson_fn(h0, 0.0, t, QUADRATURE_STEPS)
}

/// Semiclassical phase along a path: `Φ = ħ⁻¹ (∫ E dt − ∫ p dx)`.
///
/// `energy` is sampled over `t_span`, `momentum` over the spatial interval
/// `path`; both integrals use the module-wide quadrature.
pub fn semiclassical_phase(
    energy: impl Fn(f64) -> f64,
    t_span: (f64, f64),
    momentum: impl Fn(f64) -> f64,
    path: (f64, f64),
) -> f64 {
    let energy_part = simpson_fn(energy, t_span.0, t_span.1, QUADRATURE_STEPS);
    let momentum_part = simpson_fn(momentum, path.0, path.1, QUADRATURE_STEPS);
    energy_part - momentum_part
}
