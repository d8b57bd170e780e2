//! Annealing schedules `A(s)`, `B(s)` and the map from physical time to the
//! schedule parameter.
//!
//! The schedule parameter advances as `s = s_min + t / T`, so an anneal with
//! time scale `T` lasts `T * (s_max - s_min)`: `T` for the linear family on
//! `[0, 1]`, `30 T` for the tanh family on `[-15, 15]`.

use crate::error::{Error, Result};

pub const TANH_S_RANGE: (f64, f64) = (-15.0, 15.0);
pub const LINEAR_S_RANGE: (f64, f64) = (0.0, 1.0);
pub const MIN_STEPS: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ScheduleKind {
    Linear,
    Tanh,
}

impl ScheduleKind {
    pub fn name(self) -> &'static str {
        match self {
            ScheduleKind::Linear => "linear",
            ScheduleKind::Tanh => "tanh",
        }
    }
}

impl std::str::FromStr for ScheduleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "linear" => Ok(ScheduleKind::Linear),
            "tanh" => Ok(ScheduleKind::Tanh),
            other => Err(Error::InvalidSpec(format!("unknown schedule '{other}'"))),
        }
    }
}

impl std::fmt::Display for ScheduleKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnnealSpec {
    pub kind: ScheduleKind,
    /// Time scale `T` (inverse energy units).
    pub total_time: f64,
    /// Number of piecewise-constant steps `M`.
    pub steps: usize,
    pub s_range: (f64, f64),
}

impl AnnealSpec {
    pub fn new(kind: ScheduleKind, total_time: f64, steps: usize) -> Result<Self> {
        let s_range = match kind {
            ScheduleKind::Linear => LINEAR_S_RANGE,
            ScheduleKind::Tanh => TANH_S_RANGE,
        };
        Self { kind, total_time, steps, s_range }.validated()
    }

    pub fn tanh(total_time: f64, steps: usize) -> Result<Self> {
        Self::new(ScheduleKind::Tanh, total_time, steps)
    }

    pub fn linear(total_time: f64, steps: usize) -> Result<Self> {
        Self::new(ScheduleKind::Linear, total_time, steps)
    }

    /// Step count from [`default_steps`] for a generator of norm `h_norm`.
    pub fn with_default_steps(kind: ScheduleKind, total_time: f64, h_norm: f64) -> Result<Self> {
        let mut spec = Self::new(kind, total_time, MIN_STEPS)?;
        spec.steps = default_steps(spec.duration(), h_norm);
        Ok(spec)
    }

    /// Custom s-range; only the tanh family accepts one.
    pub fn with_s_range(mut self, s_range: (f64, f64)) -> Result<Self> {
        self.s_range = s_range;
        self.validated()
    }

    pub fn with_steps(mut self, steps: usize) -> Result<Self> {
        self.steps = steps;
        self.validated()
    }

    fn validated(self) -> Result<Self> {
        if !(self.total_time.is_finite() && self.total_time > 0.0) {
            return Err(Error::InvalidSpec(format!("total_time must be positive, got {}", self.total_time)));
        }
        if self.steps < MIN_STEPS {
            return Err(Error::InvalidSpec(format!("steps must be at least {MIN_STEPS}, got {}", self.steps)));
        }
        let (lo, hi) = self.s_range;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidSpec(format!("invalid s_range ({lo}, {hi})")));
        }
        if self.kind == ScheduleKind::Linear && self.s_range != LINEAR_S_RANGE {
            return Err(Error::InvalidSpec("linear schedule runs over s in [0, 1]".into()));
        }
        Ok(self)
    }

    /// Physical length of the anneal, `T * (s_max - s_min)`.
    pub fn duration(&self) -> f64 {
        self.total_time * (self.s_range.1 - self.s_range.0)
    }

    pub fn dt(&self) -> f64 {
        self.duration() / self.steps as f64
    }

    fn s_at(&self, t: f64) -> f64 {
        self.s_range.0 + t / self.total_time
    }

    fn ab_at_s(&self, s: f64) -> (f64, f64) {
        match self.kind {
            ScheduleKind::Linear => (s, 1.0 - s),
            // (1 +- tanh s)/2 written as logistic functions; accurate in both tails
            ScheduleKind::Tanh => (logistic(2.0 * s), logistic(-2.0 * s)),
        }
    }

    /// `(A(t), B(t))` for `t` in `[0, duration]`.
    pub fn eval(&self, t: f64) -> Result<(f64, f64)> {
        let duration = self.duration();
        if !(0.0..=duration).contains(&t) {
            return Err(Error::TimeOutOfRange { t, duration });
        }
        Ok(self.ab_at_s(self.s_at(t)))
    }

    /// `dA/dt` at time `t`.
    pub fn da_dt(&self, t: f64) -> Result<f64> {
        let (a, b) = self.eval(t)?;
        let da_ds = match self.kind {
            ScheduleKind::Linear => 1.0,
            ScheduleKind::Tanh => 2.0 * a * b,
        };
        Ok(da_ds / self.total_time)
    }

    /// `(dA/dt at t = 0, dA/dt at t = duration)`.
    pub fn boundary_derivatives(&self) -> (f64, f64) {
        let end = self.duration();
        // both endpoints are in range by construction
        (self.da_dt(0.0).unwrap_or(f64::NAN), self.da_dt(end).unwrap_or(f64::NAN))
    }

    /// Interval midpoints `(t_k, A, B)` used by the piecewise-constant stepper.
    pub fn midpoints(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let dt = self.dt();
        (0..self.steps).map(move |k| {
            let t = (k as f64 + 0.5) * dt;
            let (a, b) = self.ab_at_s(self.s_at(t));
            (t, a, b)
        })
    }
}

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// `max(1000, ceil(40 * duration * h_norm))`.
pub fn default_steps(duration: f64, h_norm: f64) -> usize {
    let m = (40.0 * duration * h_norm).ceil();
    if m.is_finite() {
        (m as usize).max(1000)
    } else {
        1000
    }
}
