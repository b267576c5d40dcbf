//! Phase unwrapping for sampled phase series.
//!
//! Unwrapped phases live on the real line; every consumer in this crate
//! compares phases additively, and reduction mod 2π would destroy that.


const TAU: f64 = 2.0 * core::f64::consts::PI;

/// Map an angle into (-π, π].
pub fn principal_angle(angle: f64) -> f64 {
    let mut a = angle % TAU;
    if a > core::f64::consts::PI {
        a -= TAU;
    } else if a <= -core::f64::consts::PI {
        a += TAU;
    }
    a
}

/// Outcome of unwrapping one sample relative to its predecessor.
pub enum UnwrapStep {
    /// Continuation: the unwrapped value.
    Value(f64),
    /// The principal step landed within `tolerance` of ±π, so the branch is
    /// ambiguous — the sampling does not resolve the phase motion.
    AmbiguousJump { step: f64 },
}

/// Running phase unwrapper.
///
/// Feed principal-value samples in order; the unwrapper accumulates 2π
/// corrections so the output is continuous. `reset` starts a new independent
/// segment (used across node-masked gaps where continuity is meaningless).
#[derive(Debug, Clone)]
pub struct PhaseUnwrapper {
    prev_raw: Option<f64>,
    offset: f64,
    jump_guard: f64,
}

impl PhaseUnwrapper {
    /// `jump_guard` is the fraction of π above which a principal step is
    /// reported as ambiguous (use 1.0 to disable the guard).
    pub fn new(jump_guard: f64) -> Self {
        Self { prev_raw: None, offset: 0.0, jump_guard }
    }

    pub fn reset(&mut self) {
        self.prev_raw = None;
        self.offset = 0.0;
    }

    /// Unwrap the next raw (principal-value) sample.
    pub fn push(&mut self, raw: f64) -> UnwrapStep {
        match self.prev_raw {
            None => {
                self.prev_raw = Some(raw);
                self.offset = 0.0;
                UnwrapStep::Value(raw)
            }
            Some(prev) => {
                let step = principal_angle(raw - prev);
                if step.abs() >= self.jump_guard * core::f64::consts::PI {
                    return UnwrapStep::AmbiguousJump { step };
                }
                // accumulate the correction that maps raw onto prev + step
                self.offset += (prev + step) - raw;
                self.prev_raw = Some(raw);
                UnwrapStep::Value(raw + self.offset)
            }
        }
    }
}

/// Unwrap a whole series of principal-value samples, assuming every step is
/// resolved (guard disabled).
pub fn unwrap_series(raw: impl IntoIterator<Item = f64>) -> alloc::vec::Vec<f64> {
    let mut u = PhaseUnwrapper::new(1.0);
    raw.into_iter()
        .map(|r| match u.push(r) {
            UnwrapStep::Value(v) => v,
            UnwrapStep::AmbiguousJump { .. } => unreachable!("guard disabled"),
        })
        .collect()
}
