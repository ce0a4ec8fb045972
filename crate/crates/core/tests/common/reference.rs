#![allow(clippy::needless_range_loop)]

//! Deliberately plain reference simulator for bit-exact comparison. It
//! works in `i128`, decays with division instead of shifts and keeps its
//! delay queue as a `VecDeque`.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spikegnn::fxp::Q12Decay;
use spikegnn::neuron::{ClusterState, LifLongResetConfig};
use spikegnn::synapse::{update_traces, PlasticSynapse, StdpConfig, TraceState};

macro_rules! ensure_eq {
    ($got:expr, $want:expr) => {
        ensure_eq!($got, $want, "mismatch")
    };
    ($got:expr, $want:expr, $($ctx:tt)+) => {{
        let (got, want) = (&$got, &$want);
        if got != want {
            return Err(format!("{}: {:?} != {:?}", format!($($ctx)+), got, want));
        }
    }};
}

pub const CASES: u64 = 1000;
const STEPS: u64 = 100;
const LIMIT: i128 = (1 << 23) - 1;
const CAP: i128 = 127;

fn ref_decay(s: i128, d: u16) -> i128 {
    let keep = 4096 - i128::from(d);
    let mag = s.abs() * keep / 4096;
    if s < 0 {
        -mag
    } else {
        mag
    }
}

fn ref_tau(tau: u32) -> u16 {
    (4096.0 * (1.0 - (-1.0 / tau as f64).exp())).round() as u16
}

fn clamp_count(x: i128, count: &mut u64) -> i128 {
    if x > LIMIT {
        *count += 1;
        LIMIT
    } else if x < -LIMIT {
        *count += 1;
        -LIMIT
    } else {
        x
    }
}

struct RefNeuron {
    u: i128,
    v: i128,
    refrac: u32,
}

fn random_neuron_config(rng: &mut ChaCha8Rng) -> LifLongResetConfig {
    let interval = rng.random_range(2..30u32);
    LifLongResetConfig {
        du: Q12Decay::new(rng.random_range(0..=4096)).unwrap(),
        dv: Q12Decay::new(rng.random_range(0..=4096)).unwrap(),
        vth: rng.random_range(1..5000),
        refractory: rng.random_range(0..6),
        reset_interval: interval,
        reset_length: rng.random_range(0..interval),
        bias: rng.random_range(-50..50),
    }
}

fn random_current(rng: &mut ChaCha8Rng) -> i32 {
    match rng.random_range(0..20) {
        0 => rng.random_range(-(1 << 24)..(1 << 24)),
        1..=8 => 0,
        _ => rng.random_range(-3000..3000),
    }
}

/// Neuron dynamics of fuzz case `case` against the reference.
pub fn neuron_case(case: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(case);
    let n = rng.random_range(1..=8usize);
    let cfg = random_neuron_config(&mut rng);
    let mut state = ClusterState::new(n, &cfg).unwrap();
    let mut reference: Vec<RefNeuron> = (0..n).map(|_| RefNeuron { u: 0, v: 0, refrac: 0 }).collect();
    let mut ref_sat = 0u64;
    for t in 0..STEPS {
        let input: Vec<i32> = (0..n).map(|_| random_current(&mut rng)).collect();
        let spikes = state
            .step(&input, &cfg)
            .map_err(|e| format!("case {case} t {t}: {e}"))?;
        let cycle = u64::from(cfg.reset_interval + cfg.reset_length);
        let resetting = cfg.reset_length > 0 && t % cycle >= u64::from(cfg.reset_interval);
        for (i, r) in reference.iter_mut().enumerate() {
            let mut fired = false;
            if resetting {
                *r = RefNeuron { u: 0, v: 0, refrac: 0 };
            } else {
                r.u = clamp_count(ref_decay(r.u, cfg.du.raw()) + i128::from(input[i]), &mut ref_sat);
                if r.refrac > 0 {
                    r.refrac -= 1;
                } else {
                    r.v = clamp_count(ref_decay(r.v, cfg.dv.raw()) + r.u + i128::from(cfg.bias), &mut ref_sat);
                    if r.v >= i128::from(cfg.vth) {
                        fired = true;
                        r.v = 0;
                        r.refrac = cfg.refractory;
                    }
                }
            }
            ensure_eq!(spikes[i], fired, "case {case} t {t} neuron {i}");
            ensure_eq!(i128::from(state.u[i]), r.u, "case {case} t {t} u[{i}]");
            ensure_eq!(i128::from(state.v[i]), r.v, "case {case} t {t} v[{i}]");
            ensure_eq!(state.refrac_remaining[i], r.refrac, "case {case} t {t} refrac[{i}]");
        }
    }
    ensure_eq!(state.saturation_events, ref_sat, "case {case}");
    Ok(())
}

fn random_stdp(rng: &mut ChaCha8Rng) -> StdpConfig {
    StdpConfig {
        lr: rng.random_range(1..=4),
        a_plus: rng.random_range(0..=3),
        a_minus: rng.random_range(-3..=0),
        tau_plus: rng.random_range(1..=60),
        tau_minus: rng.random_range(1..=60),
        trace_impulse: rng.random_range(1..=127),
        w_min: rng.random_range(-255..=0),
        w_max: rng.random_range(0..=255),
    }
}

fn spike_vec(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Vec<bool> {
    (0..n).map(|_| rng.random_bool(p)).collect()
}

/// Trace updates of fuzz case `case` against the reference.
pub fn trace_case(case: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(10_000 + case);
    let (pre, post) = (rng.random_range(1..=8usize), rng.random_range(1..=8usize));
    let cfg = random_stdp(&mut rng);
    let (dx, dy) = (ref_tau(cfg.tau_plus), ref_tau(cfg.tau_minus));
    let mut traces = TraceState::new(pre, post);
    let mut x = vec![0i128; pre];
    let mut y = vec![0i128; post];
    let p = rng.random_range(0.05..0.6);
    for t in 0..STEPS {
        let sp = spike_vec(&mut rng, pre, p);
        let so = spike_vec(&mut rng, post, p);
        update_traces(&mut traces, &sp, &so, &cfg).map_err(|e| format!("case {case} t {t}: {e}"))?;
        for i in 0..pre {
            x[i] = ref_decay(x[i], dx);
            if sp[i] {
                x[i] = (x[i] + i128::from(cfg.trace_impulse)).min(CAP);
            }
            ensure_eq!(i128::from(traces.x[i]), x[i], "case {case} t {t} x[{i}]");
        }
        for j in 0..post {
            y[j] = ref_decay(y[j], dy);
            if so[j] {
                y[j] = (y[j] + i128::from(cfg.trace_impulse)).min(CAP);
            }
            ensure_eq!(i128::from(traces.y[j]), y[j], "case {case} t {t} y[{j}]");
        }
    }
    Ok(())
}

/// One learning synapse: delayed transmission, then per-pair STDP against the
/// decayed traces, then impulses.
struct RefPlastic {
    pre: usize,
    post: usize,
    w: Vec<Vec<i128>>,
    x: Vec<i128>,
    y: Vec<i128>,
    queue: VecDeque<Vec<bool>>,
}

impl RefPlastic {
    fn step(&mut self, sp: &[bool], so: &[bool], learn: bool, cfg: &StdpConfig) -> Vec<i128> {
        self.queue.push_back(sp.to_vec());
        let arriving = self.queue.pop_front().unwrap();
        let mut current = vec![0i128; self.post];
        for i in 0..self.pre {
            if arriving[i] {
                for j in 0..self.post {
                    current[j] += self.w[i][j];
                }
            }
        }
        if !learn {
            self.x.iter_mut().for_each(|v| *v = 0);
            self.y.iter_mut().for_each(|v| *v = 0);
            return current;
        }
        let (dx, dy) = (ref_tau(cfg.tau_plus), ref_tau(cfg.tau_minus));
        for v in &mut self.x {
            *v = ref_decay(*v, dx);
        }
        for v in &mut self.y {
            *v = ref_decay(*v, dy);
        }
        let lr = i128::from(cfg.lr);
        for i in 0..self.pre {
            for j in 0..self.post {
                let mut dw = 0;
                if so[j] {
                    dw += lr * i128::from(cfg.a_plus) * self.x[i];
                }
                if arriving[i] {
                    dw += lr * i128::from(cfg.a_minus) * self.y[j];
                }
                if dw != 0 {
                    self.w[i][j] = (self.w[i][j] + dw).clamp(i128::from(cfg.w_min), i128::from(cfg.w_max));
                }
            }
        }
        for i in 0..self.pre {
            if arriving[i] {
                self.x[i] = (self.x[i] + i128::from(cfg.trace_impulse)).min(CAP);
            }
        }
        for j in 0..self.post {
            if so[j] {
                self.y[j] = (self.y[j] + i128::from(cfg.trace_impulse)).min(CAP);
            }
        }
        current
    }
}

/// Plastic synapse of fuzz case `case` against the reference.
pub fn plastic_case(case: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(20_000 + case);
    let (pre, post) = (rng.random_range(1..=8usize), rng.random_range(1..=8usize));
    let cfg = random_stdp(&mut rng);
    let delay = rng.random_range(0..=3u32);
    let init = rng.random_range(cfg.w_min..=cfg.w_max);
    let mut syn = PlasticSynapse::new(pre, post, init, delay, cfg).unwrap();
    let mut reference = RefPlastic {
        pre,
        post,
        w: vec![vec![i128::from(init); post]; pre],
        x: vec![0; pre],
        y: vec![0; post],
        queue: (0..delay).map(|_| vec![false; pre]).collect(),
    };
    let p = rng.random_range(0.05..0.6);
    let mut out = vec![0i32; post];
    for t in 0..STEPS {
        let sp = spike_vec(&mut rng, pre, p);
        let so = spike_vec(&mut rng, post, p);
        let learn = rng.random_range(0..10) != 0;
        syn.step_into(&sp, &so, learn, &mut out)
            .map_err(|e| format!("case {case} t {t}: {e}"))?;
        let expected = reference.step(&sp, &so, learn, &cfg);
        for j in 0..post {
            ensure_eq!(i128::from(out[j]), expected[j], "case {case} t {t} current[{j}]");
        }
        for i in 0..pre {
            for j in 0..post {
                ensure_eq!(
                    i128::from(syn.dense().weight(i, j)),
                    reference.w[i][j],
                    "case {case} t {t} w[{i}][{j}]"
                );
            }
        }
        ensure_eq!(
            syn.traces().x.iter().map(|&v| i128::from(v)).collect::<Vec<_>>(),
            reference.x
        );
        ensure_eq!(
            syn.traces().y.iter().map(|&v| i128::from(v)).collect::<Vec<_>>(),
            reference.y
        );
    }
    Ok(())
}
