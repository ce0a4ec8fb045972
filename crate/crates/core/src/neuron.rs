//! Integer LIF neurons with long-reset windows.
//!
//! A population integrates input current `u` into voltage `v` and fires when
//! `v` reaches the threshold. On top of the plain LIF dynamics, every
//! `reset_interval` active steps the population enters a reset window of
//! `reset_length` steps during which all currents, voltages and refractory
//! counters are held at zero and nothing fires. Time is split into cycles of
//! `reset_interval + reset_length` steps.
//!
//! Update order within one active step, per neuron:
//!
//! ```text
//! u <- decay(u, du) + input
//! if refractory: count down, no spike, v held at 0
//! else:          v <- decay(v, dv) + u + bias
//!                spike iff v >= vth, then v <- 0 and start refractory
//! ```

use crate::error::{Error, Result};
use crate::fxp::{decay_mul_checked, saturate, Q12Decay, STATE_MAX};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LifLongResetConfig {
    /// Current decay.
    pub du: Q12Decay,
    /// Voltage decay.
    pub dv: Q12Decay,
    /// Firing threshold, at least 1.
    pub vth: i32,
    /// Timesteps a neuron stays silent after a spike; 0 disables refractoriness.
    pub refractory: u32,
    /// Active steps per cycle.
    pub reset_interval: u32,
    /// Reset steps per cycle; 0 disables the long reset.
    pub reset_length: u32,
    pub bias: i32,
}

impl LifLongResetConfig {
    /// Leak-off, threshold-1 neuron with the given reset schedule.
    pub fn leak_off(reset_interval: u32, reset_length: u32) -> Self {
        LifLongResetConfig {
            du: Q12Decay::OFF,
            dv: Q12Decay::OFF,
            vth: 1,
            refractory: 0,
            reset_interval,
            reset_length,
            bias: 0,
        }
    }

    pub fn with_refractory(mut self, refractory: u32) -> Self {
        self.refractory = refractory;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=STATE_MAX).contains(&self.vth) {
            return Err(Error::param("vth", format!("{} outside 1..={STATE_MAX}", self.vth)));
        }
        if self.bias.unsigned_abs() > STATE_MAX as u32 {
            return Err(Error::param("bias", "outside the 24-bit range"));
        }
        if self.reset_interval == 0 {
            return Err(Error::param("reset_interval", "must be positive"));
        }
        if self.reset_length >= self.reset_interval {
            return Err(Error::param(
                "reset_length",
                format!(
                    "{} must be shorter than the reset interval {}",
                    self.reset_length, self.reset_interval
                ),
            ));
        }
        Ok(())
    }

    /// Steps in one active + reset cycle.
    pub fn cycle_len(&self) -> u64 {
        u64::from(self.reset_interval) + u64::from(self.reset_length)
    }

    pub fn in_reset_window(&self, t: u64) -> bool {
        in_reset_window(t, self)
    }
}

/// True iff `t` falls inside a reset window: `t mod (interval + length) >= interval`.
pub fn in_reset_window(t: u64, config: &LifLongResetConfig) -> bool {
    config.reset_length > 0 && t % config.cycle_len() >= u64::from(config.reset_interval)
}

/// Per-neuron state of one population.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterState {
    pub u: Vec<i32>,
    pub v: Vec<i32>,
    pub refrac_remaining: Vec<u32>,
    /// Global timestep of the next update.
    pub t: u64,
    /// Number of values clamped to the 24-bit range so far.
    pub saturation_events: u64,
}

impl ClusterState {
    pub fn new(size: usize, config: &LifLongResetConfig) -> Result<Self> {
        if size == 0 {
            return Err(Error::param("size", "a cluster needs at least one neuron"));
        }
        config.validate()?;
        Ok(ClusterState {
            u: vec![0; size],
            v: vec![0; size],
            refrac_remaining: vec![0; size],
            t: 0,
            saturation_events: 0,
        })
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    /// All currents, voltages and refractory counters are zero.
    pub fn is_quiescent(&self) -> bool {
        self.u.iter().all(|&x| x == 0)
            && self.v.iter().all(|&x| x == 0)
            && self.refrac_remaining.iter().all(|&x| x == 0)
    }

    /// Advances one timestep and returns the spike vector.
    pub fn step(&mut self, input: &[i32], config: &LifLongResetConfig) -> Result<Vec<bool>> {
        let mut spikes = vec![false; self.len()];
        self.step_into(input, config, &mut spikes)?;
        Ok(spikes)
    }

    /// [`step`](Self::step) writing into a caller-owned spike buffer.
    pub fn step_into(&mut self, input: &[i32], config: &LifLongResetConfig, spikes: &mut [bool]) -> Result<()> {
        let n = self.len();
        if input.len() != n {
            return Err(Error::LengthMismatch {
                what: "cluster input current",
                expected: n,
                got: input.len(),
            });
        }
        if spikes.len() != n {
            return Err(Error::LengthMismatch {
                what: "cluster spike buffer",
                expected: n,
                got: spikes.len(),
            });
        }

        if config.in_reset_window(self.t) {
            self.clear();
            spikes.fill(false);
            self.t += 1;
            return Ok(());
        }

        let mut saturated = 0u64;
        for i in 0..n {
            let (decayed_u, s0) = decay_mul_checked(self.u[i], config.du);
            let (u, s1) = saturate(i64::from(decayed_u) + i64::from(input[i]));
            self.u[i] = u;
            saturated += u64::from(s0) + u64::from(s1);

            if self.refrac_remaining[i] > 0 {
                self.refrac_remaining[i] -= 1;
                spikes[i] = false;
                continue;
            }

            let (decayed_v, s2) = decay_mul_checked(self.v[i], config.dv);
            let (v, s3) = saturate(i64::from(decayed_v) + i64::from(u) + i64::from(config.bias));
            saturated += u64::from(s2) + u64::from(s3);
            if v >= config.vth {
                spikes[i] = true;
                self.v[i] = 0;
                self.refrac_remaining[i] = config.refractory;
            } else {
                spikes[i] = false;
                self.v[i] = v;
            }
        }
        self.saturation_events += saturated;
        self.t += 1;
        Ok(())
    }

    /// Zeroes currents, voltages and refractory counters; keeps `t`.
    pub fn apply_reset(&mut self) {
        self.clear();
    }

    fn clear(&mut self) {
        self.u.fill(0);
        self.v.fill(0);
        self.refrac_remaining.fill(0);
    }
}

/// Creates a zeroed population; equivalent to [`ClusterState::new`].
pub fn new_cluster(size: usize, config: &LifLongResetConfig) -> Result<ClusterState> {
    ClusterState::new(size, config)
}
