use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spikegnn::fxp::{decay_mul, decay_mul_checked, tau_to_decay, Q12Decay, STATE_MAX};

/// `sign(s) * floor(|s| * (4096 - d) / 4096)` in arbitrary precision.
fn big_decay(s: i32, d: u16) -> BigInt {
    let mag = BigInt::from(s).magnitude().clone();
    let scaled = BigInt::from(mag * (4096u32 - u32::from(d))) / BigInt::from(4096);
    if s < 0 {
        -scaled
    } else {
        scaled
    }
}

#[test]
fn decay_matches_big_integer_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xdeca7);
    for _ in 0..100_000 {
        let s = rng.random_range(-STATE_MAX..=STATE_MAX);
        let d = rng.random_range(0..=4096u16);
        let got = decay_mul(s, Q12Decay::new(d).unwrap());
        assert_eq!(BigInt::from(got), big_decay(s, d), "s={s} d={d}");
    }
}

#[test]
fn decay_grid_matches_reference() {
    for d in [0u16, 134, 2048, 4096] {
        for s in -10_000..=10_000 {
            assert_eq!(BigInt::from(decay_mul(s, Q12Decay::new(d).unwrap())), big_decay(s, d));
        }
    }
}

#[test]
fn out_of_range_input_is_clamped_and_flagged() {
    let (v, saturated) = decay_mul_checked(i32::MAX, Q12Decay::OFF);
    assert_eq!(v, STATE_MAX);
    assert!(saturated);
    let (v, saturated) = decay_mul_checked(i32::MIN, Q12Decay::OFF);
    assert_eq!(v, -STATE_MAX);
    assert!(saturated);
    assert_eq!(decay_mul_checked(STATE_MAX, Q12Decay::OFF), (STATE_MAX, false));
}

const DIGITS: u32 = 60;

/// `round(4096 * (1 - e^(-1/tau)))` from an exact rational Taylor sum scaled
/// by `10^DIGITS`.
fn big_tau_decay(tau: u32) -> u16 {
    let scale = BigInt::from(10).pow(DIGITS);
    let tau = BigInt::from(tau);
    // e^(-1/tau) = sum_k (-1)^k / (tau^k k!)
    let mut term = scale.clone();
    let mut sum = scale.clone();
    let mut k = 1u32;
    loop {
        term /= &tau * BigInt::from(k);
        if term == BigInt::from(0) {
            break;
        }
        if k % 2 == 1 {
            sum -= &term;
        } else {
            sum += &term;
        }
        k += 1;
    }
    let frac = (&scale - sum) * BigInt::from(4096);
    // Round half up; the truncation error of the series is far below 0.5.
    let rounded: BigInt = (frac * 2 + &scale) / (&scale * 2);
    u16::try_from(rounded).unwrap()
}

#[test]
fn tau_mapping_matches_arbitrary_precision() {
    assert_eq!(big_tau_decay(30), 134);
    assert_eq!(big_tau_decay(1), 2589);
    for tau in 1..=1000 {
        assert_eq!(tau_to_decay(tau).unwrap().raw(), big_tau_decay(tau), "tau={tau}");
    }
}

#[test]
fn tau_zero_rejected() {
    assert!(tau_to_decay(0).is_err());
}
