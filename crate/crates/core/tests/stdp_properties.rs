use proptest::prelude::*;
use spikegnn::synapse::{PlasticSynapse, StdpConfig, WEIGHT_LIMIT};

const TAU: u32 = 30;

fn config(impulse: i32) -> StdpConfig {
    StdpConfig {
        tau_plus: TAU,
        tau_minus: TAU,
        trace_impulse: impulse,
        ..StdpConfig::default()
    }
}

/// Weight change of a 1x1 synapse after one pre spike at `pre_t` and one
/// post spike at `post_t`.
fn pair_dw(cfg: StdpConfig, pre_t: u32, post_t: u32) -> i32 {
    let mut syn = PlasticSynapse::new(1, 1, 0, 0, cfg).unwrap();
    let mut out = [0];
    for t in 0..=pre_t.max(post_t) + 1 {
        syn.step_into(&[t == pre_t], &[t == post_t], true, &mut out).unwrap();
    }
    syn.dense().weight(0, 0)
}

/// Largest gap whose trace survives decay from `impulse`.
fn trace_reach(cfg: StdpConfig) -> u32 {
    let (dx, _) = cfg.trace_decays().unwrap();
    let mut x = cfg.trace_impulse;
    let mut gap = 0;
    while spikegnn::fxp::decay_mul(x, dx) > 0 {
        x = spikegnn::fxp::decay_mul(x, dx);
        gap += 1;
    }
    gap
}

#[test]
fn worked_pairs() {
    let cfg = StdpConfig::default();
    assert_eq!(pair_dw(cfg, 2, 5), 26);
    assert_eq!(pair_dw(cfg, 5, 2), -26);
    assert_eq!(pair_dw(cfg, 4, 4), 0);
}

#[test]
fn default_impulse_reaches_fifteen_steps() {
    let cfg = StdpConfig::default();
    assert_eq!(cfg.trace_impulse, 16);
    assert_eq!(trace_reach(cfg), 15);
    for gap in 1..=15 {
        assert!(pair_dw(cfg, 3, 3 + gap) > 0, "gap {gap}");
        assert!(pair_dw(cfg, 3 + gap, 3) < 0, "gap {gap}");
    }
    for gap in 16..=29 {
        assert_eq!(pair_dw(cfg, 3, 3 + gap), 0, "gap {gap}");
        assert_eq!(pair_dw(cfg, 3 + gap, 3), 0, "gap {gap}");
    }
}

#[test]
fn impulse_thirty_covers_gaps_to_twenty_nine() {
    assert_eq!(trace_reach(config(29)), 28);
    assert!(trace_reach(config(30)) >= 29);
    let cfg = config(30);
    for gap in 1..=29 {
        assert!(pair_dw(cfg, 1, 1 + gap) > 0, "gap {gap}");
        assert!(pair_dw(cfg, 1 + gap, 1) < 0, "gap {gap}");
    }
}

#[test]
fn magnitude_never_grows_with_gap() {
    for impulse in [1, 16, 30, 64, 127] {
        let cfg = config(impulse);
        let ltp: Vec<i32> = (1..=40).map(|g| pair_dw(cfg, 0, g)).collect();
        let ltd: Vec<i32> = (1..=40).map(|g| -pair_dw(cfg, g, 0)).collect();
        assert!(ltp.windows(2).all(|w| w[1] <= w[0]), "impulse {impulse}: {ltp:?}");
        assert!(ltd.windows(2).all(|w| w[1] <= w[0]), "impulse {impulse}: {ltd:?}");
        assert_eq!(ltp, ltd);
    }
}

#[test]
fn simultaneous_pair_is_neutral_for_any_impulse() {
    for impulse in [1, 16, 127] {
        for t in 0..5 {
            assert_eq!(pair_dw(config(impulse), t, t), 0);
        }
    }
}

fn arb_config() -> impl Strategy<Value = StdpConfig> {
    (
        1i32..=4,
        0i32..=3,
        -3i32..=0,
        1u32..=60,
        1u32..=60,
        1i32..=127,
        -WEIGHT_LIMIT..=0,
        0..=WEIGHT_LIMIT,
    )
        .prop_map(
            |(lr, a_plus, a_minus, tau_plus, tau_minus, trace_impulse, w_min, w_max)| StdpConfig {
                lr,
                a_plus,
                a_minus,
                tau_plus,
                tau_minus,
                trace_impulse,
                w_min,
                w_max,
            },
        )
}

proptest! {
    #[test]
    fn weights_stay_within_bounds(
        cfg in arb_config(),
        delay in 0u32..=3,
        init_frac in 0.0f64..=1.0,
        train in prop::collection::vec((prop::collection::vec(any::<bool>(), 4), prop::collection::vec(any::<bool>(), 3)), 1..120),
    ) {
        let init = cfg.w_min + ((cfg.w_max - cfg.w_min) as f64 * init_frac) as i32;
        let mut syn = PlasticSynapse::new(4, 3, init, delay, cfg).unwrap();
        let mut out = [0; 3];
        for (pre, post) in &train {
            syn.step_into(pre, post, true, &mut out).unwrap();
            for i in 0..4 {
                for j in 0..3 {
                    let w = syn.dense().weight(i, j);
                    prop_assert!((cfg.w_min..=cfg.w_max).contains(&w));
                }
            }
            prop_assert!(syn.traces().x.iter().chain(&syn.traces().y).all(|&v| (0..=127).contains(&v)));
        }
    }

    #[test]
    fn causal_order_sets_the_sign(gap in 1u32..=15, start in 0u32..10) {
        let cfg = StdpConfig::default();
        prop_assert!(pair_dw(cfg, start, start + gap) > 0);
        prop_assert!(pair_dw(cfg, start + gap, start) < 0);
    }
}
