//! Fixed-point kernels shared by neurons, traces and synapses.
//!
//! Every state variable in the network is an integer. Per-step decay is a
//! Q12 fraction `d / 4096` applied in sign-magnitude form, so negative values
//! shrink toward zero exactly like positive ones. State magnitudes live in a
//! 24-bit range; anything larger is clamped and reported as a saturation
//! event instead of wrapping.

use crate::error::{Error, Result};

/// Number of fractional bits in a decay constant.
pub const DECAY_BITS: u32 = 12;
/// `1.0` in Q12.
pub const DECAY_ONE: u16 = 1 << DECAY_BITS;
/// Largest magnitude a state variable may hold (24-bit signed range).
pub const STATE_MAX: i32 = (1 << 23) - 1;
/// Smallest value a state variable may hold.
pub const STATE_MIN: i32 = -STATE_MAX;

/// Per-timestep decay fraction `raw / 4096`.
///
/// `raw = 0` leaves the state untouched (leak off); `raw = 4096` zeroes it
/// every step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Q12Decay(u16);

impl Q12Decay {
    /// No leak.
    pub const OFF: Q12Decay = Q12Decay(0);
    /// State is cleared every step.
    pub const FULL: Q12Decay = Q12Decay(DECAY_ONE);
    /// Halving per step.
    pub const HALF: Q12Decay = Q12Decay(DECAY_ONE / 2);

    pub fn new(raw: u16) -> Result<Self> {
        if raw > DECAY_ONE {
            return Err(Error::param("decay", format!("{raw} exceeds {DECAY_ONE}")));
        }
        Ok(Q12Decay(raw))
    }

    #[inline]
    pub const fn raw(self) -> u16 {
        self.0
    }

    /// Multiplier applied to the magnitude, `4096 - raw`.
    #[inline]
    pub const fn retain(self) -> u16 {
        DECAY_ONE - self.0
    }

    pub fn is_off(self) -> bool {
        self.0 == 0
    }
}

/// Maps an exponential time constant (in timesteps) onto a Q12 decay:
/// `round(4096 * (1 - exp(-1/tau)))`.
///
/// `tau = 0` is rejected; "no leak" is [`Q12Decay::OFF`].
pub fn tau_to_decay(tau: u32) -> Result<Q12Decay> {
    if tau == 0 {
        return Err(Error::param("tau", "must be at least 1 timestep"));
    }
    let frac = -(-1.0 / f64::from(tau)).exp_m1();
    let raw = (f64::from(DECAY_ONE) * frac).round() as u16;
    Q12Decay::new(raw)
}

/// Clamps a wide intermediate into the 24-bit state range. The flag is set
/// when clamping changed the value.
#[inline]
pub fn saturate(x: i64) -> (i32, bool) {
    if x > i64::from(STATE_MAX) {
        (STATE_MAX, true)
    } else if x < i64::from(STATE_MIN) {
        (STATE_MIN, true)
    } else {
        (x as i32, false)
    }
}

/// `sign(state) * ((|state| * (4096 - d)) >> 12)`, with the input magnitude
/// clamped to the 24-bit range first. The flag reports that clamp.
#[inline]
pub fn decay_mul_checked(state: i32, d: Q12Decay) -> (i32, bool) {
    let (state, saturated) = saturate(i64::from(state));
    let mag = i64::from(state.unsigned_abs());
    let decayed = ((mag * i64::from(d.retain())) >> DECAY_BITS) as i32;
    (if state < 0 { -decayed } else { decayed }, saturated)
}

/// Saturating Q12 decay; see [`decay_mul_checked`].
#[inline]
pub fn decay_mul(state: i32, d: Q12Decay) -> i32 {
    decay_mul_checked(state, d).0
}
