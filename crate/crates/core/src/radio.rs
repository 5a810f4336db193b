//! Transmission power model and the discovery-power growth schedule.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute distance tolerance when deciding whether a broadcast reaches a node.
pub const REACH_TOLERANCE: f64 = 1e-9;

/// Power law `p(d) = P · (d / R)^n`, so `p(R) = P` exactly, together with the
/// `Increase(p) = min(g · p, P)` schedule used by the discovery loop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadioModel {
    pub path_loss_exponent: f64,
    pub max_range: f64,
    pub max_power: f64,
    pub initial_power: f64,
    pub growth_factor: f64,
}

impl Default for RadioModel {
    /// Quadratic path loss, `R = 500`, `P = 1`, doubling from `p0 = P · 2^-60`.
    ///
    /// `p0` sits below the power needed for the generator's minimum node
    /// separation, so every discovered neighbor needs more than `p0`.
    fn default() -> Self {
        Self {
            path_loss_exponent: 2.0,
            max_range: 500.0,
            max_power: 1.0,
            initial_power: (-60.0f64).exp2(),
            growth_factor: 2.0,
        }
    }
}

impl RadioModel {
    pub fn new(
        path_loss_exponent: f64,
        max_range: f64,
        max_power: f64,
        initial_power: f64,
        growth_factor: f64,
    ) -> Result<Self> {
        let model = Self {
            path_loss_exponent,
            max_range,
            max_power,
            initial_power,
            growth_factor,
        };
        model.validate()?;
        Ok(model)
    }

    /// Default model rescaled to another maximum range.
    pub fn with_range(max_range: f64) -> Result<Self> {
        Self::new(2.0, max_range, 1.0, (-60.0f64).exp2(), 2.0)
    }

    /// A near-continuous schedule: growth factor `growth` starting from
    /// `P · min_fraction`. Used where exact radii matter more than step count.
    /// Default model with growth 1.2. Ends discovery within 20% of the power
    /// needed for the deciding neighbor, close to continuous power control.
    pub fn experiment() -> Self {
        Self {
            growth_factor: 1.2,
            ..Self::default()
        }
    }

    pub fn fine(max_range: f64, growth: f64, min_fraction: f64) -> Result<Self> {
        Self::new(2.0, max_range, 1.0, min_fraction, growth)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |c: bool, msg: &str| {
            if c {
                Ok(())
            } else {
                Err(Error::Domain(msg.into()))
            }
        };
        ok(
            self.path_loss_exponent >= 2.0,
            "path loss exponent must be >= 2",
        )?;
        ok(
            self.max_range > 0.0 && self.max_range.is_finite(),
            "max range must be positive",
        )?;
        ok(
            self.max_power > 0.0 && self.max_power.is_finite(),
            "max power must be positive",
        )?;
        ok(
            self.initial_power > 0.0 && self.initial_power < self.max_power,
            "initial power must lie in (0, P)",
        )?;
        ok(
            self.growth_factor > 1.0 && self.growth_factor.is_finite(),
            "growth factor must exceed 1",
        )?;
        Ok(())
    }

    pub fn power_for_distance(&self, d: f64) -> Result<f64> {
        if d < 0.0 || d.is_nan() {
            return Err(Error::Domain(format!("negative distance {d}")));
        }
        Ok(self.power_at(d))
    }

    /// Unchecked `p(d)` for distances already known to be non-negative.
    pub(crate) fn power_at(&self, d: f64) -> f64 {
        if d == self.max_range {
            return self.max_power;
        }
        self.max_power * (d / self.max_range).powf(self.path_loss_exponent)
    }

    pub fn distance_for_power(&self, p: f64) -> Result<f64> {
        if p.is_nan() || p < 0.0 {
            return Err(Error::Domain(format!("negative power {p}")));
        }
        if p > self.max_power * (1.0 + 1e-12) {
            return Err(Error::OutOfRange(format!(
                "power {p} exceeds maximum {}",
                self.max_power
            )));
        }
        Ok(self.range_at(p.min(self.max_power)))
    }

    pub(crate) fn range_at(&self, p: f64) -> f64 {
        if p >= self.max_power {
            return self.max_range;
        }
        self.max_range * (p / self.max_power).powf(1.0 / self.path_loss_exponent)
    }

    /// `Increase(p)`, clamped at `P`.
    pub fn next_power(&self, p: f64) -> f64 {
        (self.growth_factor * p).min(self.max_power)
    }

    /// Whether a broadcast at power `p` reaches a node at distance `d`.
    pub fn reaches(&self, p: f64, d: f64) -> bool {
        d <= (self.range_at(p) + REACH_TOLERANCE).min(self.max_range)
    }

    /// Broadcast powers of a full discovery run: `Increase(p0)`, `Increase²(p0)`, ... `P`.
    pub fn schedule(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let mut p = self.initial_power;
        while p < self.max_power {
            p = self.next_power(p);
            out.push(p);
        }
        out
    }

    /// Number of loop iterations needed to climb from `p0` to `P`.
    pub fn max_iterations(&self) -> usize {
        (self.max_power / self.initial_power)
            .log(self.growth_factor)
            .ceil() as usize
            + 1
    }

    /// First schedule value that reaches distance `d` (the power tag a discovery
    /// run assigns to a node at that distance). `None` beyond the maximum range.
    pub fn first_reaching_power(&self, d: f64) -> Option<f64> {
        let mut p = self.initial_power;
        while p < self.max_power {
            p = self.next_power(p);
            if self.reaches(p, d) {
                return Some(p);
            }
        }
        None
    }
}
