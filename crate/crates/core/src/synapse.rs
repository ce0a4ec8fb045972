//! Synapse blocks: static sparse connections, dense weight matrices with
//! transmission delay, and trace-based STDP.
//!
//! A block maps pre-synaptic spikes to post-synaptic currents. Spikes pass
//! through a delay line of `delay + 1` slots, so a spike pushed now leaves
//! the line `delay` pushes later. In the runtime a block consumes the spikes
//! its source emitted on the previous step, which puts a spike emitted at
//! step `t` into the target's update at step `t + 1 + delay`.
//!
//! Plastic blocks keep one exponentially decaying trace per pre neuron (`x`)
//! and per post neuron (`y`). Within one learning step the order is: decay
//! both traces, apply the weight update against the decayed traces, then add
//! impulses for the current spikes. A pre and post spike in the same step
//! therefore leave the weight unchanged.

use crate::error::{Error, Result};
use crate::fxp::{decay_mul, saturate, tau_to_decay, Q12Decay, STATE_MAX};

/// Largest plastic or dense weight magnitude.
pub const WEIGHT_LIMIT: i32 = 255;
/// Eligibility traces saturate here (7-bit).
pub const TRACE_CAP: i32 = 127;

/// Ring of pending spike vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DelayLine {
    slots: Vec<Vec<bool>>,
    head: usize,
}

impl DelayLine {
    pub fn new(width: usize, delay: u32) -> Self {
        DelayLine {
            slots: vec![vec![false; width]; delay as usize + 1],
            head: 0,
        }
    }

    pub fn delay(&self) -> u32 {
        (self.slots.len() - 1) as u32
    }

    /// Enqueues `spikes` and returns the vector pushed `delay` calls ago.
    pub fn push(&mut self, spikes: &[bool]) -> &[bool] {
        let n = self.slots.len();
        self.slots[self.head].copy_from_slice(spikes);
        let oldest = (self.head + 1) % n;
        self.head = oldest;
        &self.slots[oldest]
    }

    pub fn clear(&mut self) {
        for slot in &mut self.slots {
            slot.fill(false);
        }
        self.head = 0;
    }

    pub fn is_clear(&self) -> bool {
        self.slots.iter().all(|s| s.iter().all(|&b| !b))
    }
}

fn check_len(what: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::LengthMismatch { what, expected, got });
    }
    Ok(())
}

/// Accumulates `i64` partial sums into saturated 24-bit currents.
fn write_currents(acc: &[i64], out: &mut [i32]) -> u64 {
    let mut saturated = 0;
    for (o, &a) in out.iter_mut().zip(acc) {
        let (v, s) = saturate(a);
        *o = v;
        saturated += u64::from(s);
    }
    saturated
}

/// Dense `pre x post` weight matrix with a transmission delay.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseSynapse {
    pre: usize,
    post: usize,
    /// Row-major, `weights[i * post + j]` connects pre `i` to post `j`.
    weights: Vec<i32>,
    delay: DelayLine,
    acc: Vec<i64>,
    pub saturation_events: u64,
}

impl DenseSynapse {
    pub fn new(pre: usize, post: usize, weights: Vec<i32>, delay: u32) -> Result<Self> {
        check_len("dense weight matrix", pre * post, weights.len())?;
        if let Some(w) = weights.iter().find(|w| w.unsigned_abs() > WEIGHT_LIMIT as u32) {
            return Err(Error::param(
                "weight",
                format!("{w} exceeds the dense weight limit {WEIGHT_LIMIT}"),
            ));
        }
        Ok(DenseSynapse {
            pre,
            post,
            weights,
            delay: DelayLine::new(pre, delay),
            acc: vec![0; post],
            saturation_events: 0,
        })
    }

    pub fn filled(pre: usize, post: usize, weight: i32, delay: u32) -> Result<Self> {
        Self::new(pre, post, vec![weight; pre * post], delay)
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.pre, self.post)
    }

    pub fn delay(&self) -> u32 {
        self.delay.delay()
    }

    pub fn weights(&self) -> &[i32] {
        &self.weights
    }

    pub fn weight(&self, i: usize, j: usize) -> i32 {
        self.weights[i * self.post + j]
    }

    /// The `post` column: weights from every pre neuron onto post `j`.
    pub fn column(&self, j: usize) -> Vec<i32> {
        (0..self.pre).map(|i| self.weight(i, j)).collect()
    }

    /// Enqueues `pre_spikes` and returns the currents caused by the spikes
    /// leaving the delay line.
    pub fn forward(&mut self, pre_spikes: &[bool]) -> Result<Vec<i32>> {
        let mut out = vec![0; self.post];
        self.forward_into(pre_spikes, &mut out)?;
        Ok(out)
    }

    pub fn forward_into(&mut self, pre_spikes: &[bool], out: &mut [i32]) -> Result<()> {
        check_len("dense pre spikes", self.pre, pre_spikes.len())?;
        check_len("dense output", self.post, out.len())?;
        let arriving = self.delay.push(pre_spikes);
        self.acc.fill(0);
        for (i, _) in arriving.iter().enumerate().filter(|(_, &s)| s) {
            let row = &self.weights[i * self.post..(i + 1) * self.post];
            for (a, &w) in self.acc.iter_mut().zip(row) {
                *a += i64::from(w);
            }
        }
        self.saturation_events += write_currents(&self.acc, out);
        Ok(())
    }

    /// Sets every weight to `weight` and clears the delay line.
    pub fn reset_weights(&mut self, weight: i32) {
        self.weights.fill(weight);
        self.delay.clear();
    }
}

/// Static connections stored per pre neuron; duplicate entries add up.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseSynapse {
    pre: usize,
    post: usize,
    /// CSR row offsets into `targets`/`weights`, length `pre + 1`.
    offsets: Vec<usize>,
    targets: Vec<u32>,
    weights: Vec<i32>,
    delay: DelayLine,
    acc: Vec<i64>,
    pub saturation_events: u64,
}

impl SparseSynapse {
    /// Builds a block from `(pre, post, weight)` triples.
    pub fn new(pre: usize, post: usize, entries: &[(u32, u32, i32)], delay: u32) -> Result<Self> {
        let mut counts = vec![0usize; pre + 1];
        for &(i, j, w) in entries {
            if i as usize >= pre || j as usize >= post {
                return Err(Error::param(
                    "synapse",
                    format!("entry ({i}, {j}) outside a {pre}x{post} block"),
                ));
            }
            if w.unsigned_abs() > STATE_MAX as u32 {
                return Err(Error::param("weight", format!("{w} outside the 24-bit range")));
            }
            counts[i as usize + 1] += 1;
        }
        for k in 1..=pre {
            counts[k] += counts[k - 1];
        }
        let offsets = counts.clone();
        let mut fill = counts;
        let mut targets = vec![0u32; entries.len()];
        let mut weights = vec![0i32; entries.len()];
        for &(i, j, w) in entries {
            let slot = &mut fill[i as usize];
            targets[*slot] = j;
            weights[*slot] = w;
            *slot += 1;
        }
        Ok(SparseSynapse {
            pre,
            post,
            offsets,
            targets,
            weights,
            delay: DelayLine::new(pre, delay),
            acc: vec![0; post],
            saturation_events: 0,
        })
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.pre, self.post)
    }

    /// Number of stored synapses (duplicates counted separately).
    pub fn synapse_count(&self) -> usize {
        self.targets.len()
    }

    pub fn delay(&self) -> u32 {
        self.delay.delay()
    }

    /// `(pre, post, weight)` for every stored synapse, grouped by pre.
    pub fn entries(&self) -> impl Iterator<Item = (u32, u32, i32)> + '_ {
        (0..self.pre).flat_map(move |i| {
            (self.offsets[i]..self.offsets[i + 1]).map(move |k| (i as u32, self.targets[k], self.weights[k]))
        })
    }

    pub fn forward_into(&mut self, pre_spikes: &[bool], out: &mut [i32]) -> Result<()> {
        check_len("sparse pre spikes", self.pre, pre_spikes.len())?;
        check_len("sparse output", self.post, out.len())?;
        let arriving = self.delay.push(pre_spikes);
        self.acc.fill(0);
        for (i, _) in arriving.iter().enumerate().filter(|(_, &s)| s) {
            for k in self.offsets[i]..self.offsets[i + 1] {
                self.acc[self.targets[k] as usize] += i64::from(self.weights[k]);
            }
        }
        self.saturation_events += write_currents(&self.acc, out);
        Ok(())
    }

    pub fn forward(&mut self, pre_spikes: &[bool]) -> Result<Vec<i32>> {
        let mut out = vec![0; self.post];
        self.forward_into(pre_spikes, &mut out)?;
        Ok(out)
    }

    pub fn clear_delay(&mut self) {
        self.delay.clear();
    }

    pub fn is_delay_clear(&self) -> bool {
        self.delay.is_clear()
    }
}

/// Pairwise STDP parameters for a plastic block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StdpConfig {
    pub lr: i32,
    pub a_plus: i32,
    pub a_minus: i32,
    pub tau_plus: u32,
    pub tau_minus: u32,
    /// Amount added to a trace when its neuron spikes.
    pub trace_impulse: i32,
    pub w_min: i32,
    pub w_max: i32,
}

impl Default for StdpConfig {
    fn default() -> Self {
        StdpConfig {
            lr: 2,
            a_plus: 1,
            a_minus: -1,
            tau_plus: 30,
            tau_minus: 30,
            trace_impulse: 16,
            w_min: -WEIGHT_LIMIT,
            w_max: WEIGHT_LIMIT,
        }
    }
}

impl StdpConfig {
    pub fn validate(&self) -> Result<()> {
        if self.lr < 1 {
            return Err(Error::param("lr", "must be a positive integer"));
        }
        if self.tau_plus == 0 || self.tau_minus == 0 {
            return Err(Error::param("tau", "must be at least 1 timestep"));
        }
        if !(1..=TRACE_CAP).contains(&self.trace_impulse) {
            return Err(Error::param(
                "trace_impulse",
                format!("{} outside 1..={TRACE_CAP}", self.trace_impulse),
            ));
        }
        if !(-WEIGHT_LIMIT <= self.w_min && self.w_min <= 0 && 0 <= self.w_max && self.w_max <= WEIGHT_LIMIT) {
            return Err(Error::param(
                "weight bounds",
                format!(
                    "need -{WEIGHT_LIMIT} <= w_min <= 0 <= w_max <= {WEIGHT_LIMIT}, got [{}, {}]",
                    self.w_min, self.w_max
                ),
            ));
        }
        if self.a_plus.abs() > 64 || self.a_minus.abs() > 64 || self.lr > 64 {
            return Err(Error::param("stdp", "lr and amplitudes must stay within 64"));
        }
        Ok(())
    }

    /// Q12 decays for the pre (`tau_plus`) and post (`tau_minus`) traces.
    pub fn trace_decays(&self) -> Result<(Q12Decay, Q12Decay)> {
        Ok((tau_to_decay(self.tau_plus)?, tau_to_decay(self.tau_minus)?))
    }
}

/// Pre (`x`) and post (`y`) eligibility traces of one plastic block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceState {
    pub x: Vec<i32>,
    pub y: Vec<i32>,
}

impl TraceState {
    pub fn new(pre: usize, post: usize) -> Self {
        TraceState {
            x: vec![0; pre],
            y: vec![0; post],
        }
    }

    pub fn decay(&mut self, x_decay: Q12Decay, y_decay: Q12Decay) {
        for x in &mut self.x {
            *x = decay_mul(*x, x_decay);
        }
        for y in &mut self.y {
            *y = decay_mul(*y, y_decay);
        }
    }

    pub fn add_impulses(&mut self, pre_spikes: &[bool], post_spikes: &[bool], impulse: i32) {
        for (x, _) in self.x.iter_mut().zip(pre_spikes).filter(|(_, &s)| s) {
            *x = (*x + impulse).min(TRACE_CAP);
        }
        for (y, _) in self.y.iter_mut().zip(post_spikes).filter(|(_, &s)| s) {
            *y = (*y + impulse).min(TRACE_CAP);
        }
    }

    pub fn clear(&mut self) {
        self.x.fill(0);
        self.y.fill(0);
    }

    pub fn is_clear(&self) -> bool {
        self.x.iter().chain(&self.y).all(|&v| v == 0)
    }
}

/// Decays both traces, then adds impulses where neurons spiked.
pub fn update_traces(
    traces: &mut TraceState,
    pre_spikes: &[bool],
    post_spikes: &[bool],
    cfg: &StdpConfig,
) -> Result<()> {
    check_len("pre trace", traces.x.len(), pre_spikes.len())?;
    check_len("post trace", traces.y.len(), post_spikes.len())?;
    let (dx, dy) = cfg.trace_decays()?;
    traces.decay(dx, dy);
    traces.add_impulses(pre_spikes, post_spikes, cfg.trace_impulse);
    Ok(())
}

/// Applies one STDP step to a row-major `pre x post` weight matrix against
/// the given traces: `+lr*a_plus*x[i]` where post `j` spiked,
/// `+lr*a_minus*y[j]` where pre `i` spiked, summed and clamped once.
pub fn stdp_update(
    weights: &mut [i32],
    traces: &TraceState,
    pre_spikes: &[bool],
    post_spikes: &[bool],
    cfg: &StdpConfig,
) -> Result<()> {
    let (pre, post) = (traces.x.len(), traces.y.len());
    check_len("stdp weights", pre * post, weights.len())?;
    check_len("stdp pre spikes", pre, pre_spikes.len())?;
    check_len("stdp post spikes", post, post_spikes.len())?;

    let post_fired: Vec<usize> = (0..post).filter(|&j| post_spikes[j]).collect();
    let any_pre = pre_spikes.iter().any(|&s| s);
    if post_fired.is_empty() && !any_pre {
        return Ok(());
    }
    let ltp = i64::from(cfg.lr) * i64::from(cfg.a_plus);
    let ltd = i64::from(cfg.lr) * i64::from(cfg.a_minus);
    let clamp = |w: i64| w.clamp(i64::from(cfg.w_min), i64::from(cfg.w_max)) as i32;

    for i in 0..pre {
        let row = &mut weights[i * post..(i + 1) * post];
        if pre_spikes[i] {
            for j in 0..post {
                let mut dw = ltd * i64::from(traces.y[j]);
                if post_spikes[j] {
                    dw += ltp * i64::from(traces.x[i]);
                }
                if dw != 0 {
                    row[j] = clamp(i64::from(row[j]) + dw);
                }
            }
        } else if traces.x[i] != 0 {
            let dw = ltp * i64::from(traces.x[i]);
            for &j in &post_fired {
                row[j] = clamp(i64::from(row[j]) + dw);
            }
        }
    }
    Ok(())
}

/// Dense block whose weights learn by STDP.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlasticSynapse {
    dense: DenseSynapse,
    traces: TraceState,
    cfg: StdpConfig,
    x_decay: Q12Decay,
    y_decay: Q12Decay,
    initial_weight: i32,
}

impl PlasticSynapse {
    pub fn new(pre: usize, post: usize, initial_weight: i32, delay: u32, cfg: StdpConfig) -> Result<Self> {
        cfg.validate()?;
        if !(cfg.w_min..=cfg.w_max).contains(&initial_weight) {
            return Err(Error::param(
                "initial_weight",
                format!("{initial_weight} outside [{}, {}]", cfg.w_min, cfg.w_max),
            ));
        }
        let (x_decay, y_decay) = cfg.trace_decays()?;
        Ok(PlasticSynapse {
            dense: DenseSynapse::filled(pre, post, initial_weight, delay)?,
            traces: TraceState::new(pre, post),
            cfg,
            x_decay,
            y_decay,
            initial_weight,
        })
    }

    pub fn shape(&self) -> (usize, usize) {
        self.dense.shape()
    }

    pub fn config(&self) -> &StdpConfig {
        &self.cfg
    }

    pub fn dense(&self) -> &DenseSynapse {
        &self.dense
    }

    pub fn traces(&self) -> &TraceState {
        &self.traces
    }

    pub fn initial_weight(&self) -> i32 {
        self.initial_weight
    }

    pub fn saturation_events(&self) -> u64 {
        self.dense.saturation_events
    }

    /// Transmits `pre_spikes` through the delay line and, when `learn` is
    /// set, runs one STDP step pairing the arriving spikes with
    /// `post_spikes`. With `learn` unset the traces are cleared instead.
    pub fn step_into(&mut self, pre_spikes: &[bool], post_spikes: &[bool], learn: bool, out: &mut [i32]) -> Result<()> {
        let (pre, post) = self.dense.shape();
        check_len("plastic pre spikes", pre, pre_spikes.len())?;
        check_len("plastic post spikes", post, post_spikes.len())?;
        check_len("plastic output", post, out.len())?;

        let d = &mut self.dense;
        let arriving = d.delay.push(pre_spikes);
        d.acc.fill(0);
        for (i, _) in arriving.iter().enumerate().filter(|(_, &s)| s) {
            for (a, &w) in d.acc.iter_mut().zip(&d.weights[i * post..(i + 1) * post]) {
                *a += i64::from(w);
            }
        }
        d.saturation_events += write_currents(&d.acc, out);

        if learn {
            self.traces.decay(self.x_decay, self.y_decay);
            let arriving = &self.dense.delay.slots[self.dense.delay.head];
            stdp_update(&mut self.dense.weights, &self.traces, arriving, post_spikes, &self.cfg)?;
            self.traces.add_impulses(arriving, post_spikes, self.cfg.trace_impulse);
        } else {
            self.traces.clear();
        }
        Ok(())
    }

    /// Restores every weight to `initial_weight` and clears traces and delay
    /// line.
    pub fn reset_plastic(&mut self, initial_weight: i32) {
        self.initial_weight = initial_weight;
        self.dense.reset_weights(initial_weight);
        self.traces.clear();
    }

    /// Weights at initial value, traces and delay line empty.
    pub fn is_pristine(&self) -> bool {
        self.dense.weights.iter().all(|&w| w == self.initial_weight)
            && self.traces.is_clear()
            && self.dense.delay.is_clear()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn delay_line_zero_is_passthrough() {
        let mut d = DelayLine::new(2, 0);
        assert_eq!(d.push(&[true, false]), &[true, false]);
        assert_eq!(d.push(&[false, true]), &[false, true]);
    }

    #[test]
    fn delay_line_holds_for_delay_pushes() {
        let mut d = DelayLine::new(1, 2);
        assert_eq!(d.delay(), 2);
        assert_eq!(d.push(&[true]), &[false]);
        assert_eq!(d.push(&[false]), &[false]);
        assert_eq!(d.push(&[false]), &[true]);
        assert_eq!(d.push(&[false]), &[false]);
    }

    #[test]
    fn dense_forward_single_spike() {
        let mut s = DenseSynapse::filled(1, 1, 100, 0).unwrap();
        assert_eq!(s.forward(&[true]).unwrap(), vec![100]);
        assert_eq!(s.forward(&[false]).unwrap(), vec![0]);
    }

    #[test]
    fn dense_forward_silence_is_zero() {
        let mut s = DenseSynapse::new(2, 3, vec![1, 2, 3, -4, -5, -6], 0).unwrap();
        assert_eq!(s.forward(&[false, false]).unwrap(), vec![0, 0, 0]);
        assert_eq!(s.forward(&[true, true]).unwrap(), vec![-3, -3, -3]);
    }

    #[test]
    fn dense_delay_one_arrives_one_call_later() {
        let mut s = DenseSynapse::filled(1, 1, 100, 1).unwrap();
        assert_eq!(s.forward(&[true]).unwrap(), vec![0]);
        assert_eq!(s.forward(&[false]).unwrap(), vec![100]);
        assert_eq!(s.forward(&[false]).unwrap(), vec![0]);
    }

    #[test]
    fn dense_rejects_bad_shapes_and_weights() {
        assert!(DenseSynapse::new(2, 2, vec![0; 3], 0).is_err());
        assert!(DenseSynapse::new(1, 1, vec![256], 0).is_err());
        let mut s = DenseSynapse::filled(2, 1, 1, 0).unwrap();
        assert!(matches!(s.forward(&[true]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn sparse_duplicates_add() {
        let mut s = SparseSynapse::new(2, 2, &[(0, 1, 100), (0, 1, 100), (1, 0, 7)], 0).unwrap();
        assert_eq!(s.synapse_count(), 3);
        assert_eq!(s.forward(&[true, false]).unwrap(), vec![0, 200]);
        assert_eq!(s.forward(&[true, true]).unwrap(), vec![7, 200]);
        assert!(SparseSynapse::new(1, 1, &[(0, 1, 1)], 0).is_err());
    }

    #[test]
    fn trace_decay_sequence() {
        let cfg = StdpConfig::default();
        let mut tr = TraceState::new(1, 1);
        update_traces(&mut tr, &[true], &[false], &cfg).unwrap();
        assert_eq!(tr.x, vec![16]);
        let mut seen = vec![];
        for _ in 0..3 {
            update_traces(&mut tr, &[false], &[false], &cfg).unwrap();
            seen.push(tr.x[0]);
        }
        assert_eq!(seen, vec![15, 14, 13]);
    }

    #[test]
    fn silent_traces_stay_zero() {
        let cfg = StdpConfig::default();
        let mut tr = TraceState::new(3, 2);
        for _ in 0..50 {
            update_traces(&mut tr, &[false; 3], &[false; 2], &cfg).unwrap();
        }
        assert!(tr.is_clear());
    }

    #[test]
    fn trace_saturates_at_cap() {
        let cfg = StdpConfig {
            trace_impulse: 120,
            ..StdpConfig::default()
        };
        let mut tr = TraceState::new(1, 1);
        update_traces(&mut tr, &[true], &[false], &cfg).unwrap();
        update_traces(&mut tr, &[true], &[false], &cfg).unwrap();
        assert_eq!(tr.x[0], TRACE_CAP);
    }

    /// Runs a single pre/post pair through a 1x1 plastic block and returns
    /// the final weight. Spike times are learning-step indices.
    fn pair_dw(pre_at: usize, post_at: usize, cfg: StdpConfig) -> i32 {
        let mut syn = PlasticSynapse::new(1, 1, 0, 0, cfg).unwrap();
        let mut out = [0];
        for t in 0..pre_at.max(post_at) + 2 {
            syn.step_into(&[t == pre_at], &[t == post_at], true, &mut out).unwrap();
        }
        syn.dense().weight(0, 0)
    }

    #[test]
    fn causal_pair_potentiates() {
        assert_eq!(pair_dw(2, 5, StdpConfig::default()), 26);
    }

    #[test]
    fn acausal_pair_depresses() {
        assert_eq!(pair_dw(5, 2, StdpConfig::default()), -26);
    }

    #[test]
    fn simultaneous_pair_is_neutral() {
        assert_eq!(pair_dw(3, 3, StdpConfig::default()), 0);
    }

    #[test]
    fn no_spikes_no_change() {
        let mut w = vec![5; 4];
        let tr = TraceState {
            x: vec![10, 3],
            y: vec![7, 1],
        };
        stdp_update(&mut w, &tr, &[false; 2], &[false; 2], &StdpConfig::default()).unwrap();
        assert_eq!(w, vec![5; 4]);
    }

    #[test]
    fn reset_plastic_restores_initial_state() {
        let mut syn = PlasticSynapse::new(3, 2, 0, 1, StdpConfig::default()).unwrap();
        let mut out = [0; 2];
        for t in 0..10 {
            syn.step_into(&[t % 2 == 0, true, false], &[t % 3 == 0, true], true, &mut out)
                .unwrap();
        }
        assert!(!syn.is_pristine());
        syn.reset_plastic(0);
        assert!(syn.is_pristine());
        let snapshot = syn.clone();
        syn.reset_plastic(0);
        assert_eq!(syn, snapshot);
        syn.step_into(&[true; 3], &[false; 2], false, &mut out).unwrap();
        assert_eq!(out, [0, 0]);
    }

    #[test]
    fn frozen_step_clears_traces() {
        let mut syn = PlasticSynapse::new(1, 1, 0, 0, StdpConfig::default()).unwrap();
        let mut out = [0];
        syn.step_into(&[true], &[false], true, &mut out).unwrap();
        assert_eq!(syn.traces().x[0], 16);
        syn.step_into(&[false], &[true], false, &mut out).unwrap();
        assert!(syn.traces().is_clear());
        assert_eq!(syn.dense().weight(0, 0), 0);
    }

    #[test]
    fn invalid_stdp_configs() {
        let base = StdpConfig::default();
        assert!(StdpConfig { lr: 0, ..base }.validate().is_err());
        assert!(StdpConfig { tau_plus: 0, ..base }.validate().is_err());
        assert!(StdpConfig {
            trace_impulse: 128,
            ..base
        }
        .validate()
        .is_err());
        assert!(StdpConfig { w_min: 1, ..base }.validate().is_err());
        assert!(StdpConfig { w_max: 300, ..base }.validate().is_err());
        assert!(PlasticSynapse::new(1, 1, 300, 0, base).is_err());
    }

    proptest! {
        #[test]
        fn weights_stay_clamped(
            pre in 1usize..5, post in 1usize..5,
            w_min in -255i32..=0, w_max in 0i32..=255,
            impulse in 1i32..=127, lr in 1i32..8,
            trains in prop::collection::vec((any::<u8>(), any::<u8>()), 1..80),
        ) {
            let cfg = StdpConfig { lr, trace_impulse: impulse, w_min, w_max, ..StdpConfig::default() };
            let mut syn = PlasticSynapse::new(pre, post, 0, 0, cfg).unwrap();
            let mut out = vec![0; post];
            for (a, b) in trains {
                let ps: Vec<bool> = (0..pre).map(|i| a >> i & 1 == 1).collect();
                let qs: Vec<bool> = (0..post).map(|j| b >> j & 1 == 1).collect();
                syn.step_into(&ps, &qs, true, &mut out).unwrap();
                prop_assert!(syn.dense().weights().iter().all(|w| (w_min..=w_max).contains(w)));
                prop_assert!(syn.traces().x.iter().chain(&syn.traces().y).all(|t| (0..=TRACE_CAP).contains(t)));
            }
        }
    }
}
