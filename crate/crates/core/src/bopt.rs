//! Gaussian-process Bayesian optimization over a discrete grid.
//!
//! The surrogate is a zero-mean GP on standardized objectives with an
//! isotropic Matérn-5/2 kernel over rank-normalized coordinates. Each grid
//! dimension maps its sorted values onto `0, 1/(n-1), ..., 1`, so uneven value
//! spacings like `1, 50, ..., 1000` do not stretch the length scale.
//!
//! The loop evaluates `n_init` distinct random points, then repeats
//! fit → acquire → evaluate `n_iter` times. Acquisition scans every
//! unobserved point for the highest expected improvement.

use std::collections::HashSet;
use std::fmt::Display;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::graphnet::NetworkParams;

pub const PAPER_TO_PAPER_W: &str = "paper_to_paper_w";
pub const TRAIN_TO_TOPIC_W: &str = "train_to_topic_w";
pub const TAU: &str = "tau";
pub const SIM_STEPS: &str = "sim_steps";

/// Dimension names a grid may use.
pub const KNOWN_DIMENSIONS: [&str; 4] = [PAPER_TO_PAPER_W, TRAIN_TO_TOPIC_W, TAU, SIM_STEPS];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dimension {
    pub name: String,
    /// Strictly increasing.
    pub values: Vec<i64>,
}

/// Cartesian product of discrete dimensions. Point indices enumerate it in
/// row-major order, the last dimension varying fastest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchSpace {
    dims: Vec<Dimension>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GridPoint {
    pub index: usize,
    pub values: Vec<i64>,
}

impl SearchSpace {
    /// Values are sorted; duplicates and empty dimensions are rejected.
    pub fn new(dims: Vec<(String, Vec<i64>)>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::param("search_space", "no dimensions"));
        }
        let mut out = Vec::with_capacity(dims.len());
        let mut seen = HashSet::new();
        for (name, mut values) in dims {
            if !seen.insert(name.clone()) {
                return Err(Error::param("search_space", format!("dimension `{name}` repeated")));
            }
            if values.is_empty() {
                return Err(Error::param(
                    "search_space",
                    format!("dimension `{name}` has no values"),
                ));
            }
            values.sort_unstable();
            if values.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::param(
                    "search_space",
                    format!("dimension `{name}` repeats a value"),
                ));
            }
            out.push(Dimension { name, values });
        }
        let space = SearchSpace { dims: out };
        space
            .dims
            .iter()
            .try_fold(1usize, |acc, d| acc.checked_mul(d.values.len()))
            .ok_or_else(|| Error::param("search_space", "grid too large"))?;
        Ok(space)
    }

    /// Two weights, tau and window length: 7 · 7 · 5 · 10 = 2450 points.
    pub fn default_grid() -> Self {
        let weights = vec![1, 50, 100, 300, 500, 700, 1000];
        SearchSpace::new(vec![
            (PAPER_TO_PAPER_W.into(), weights.clone()),
            (TRAIN_TO_TOPIC_W.into(), weights),
            (TAU.into(), vec![20, 25, 30, 35, 40]),
            (SIM_STEPS.into(), (11..=20).collect()),
        ])
        .expect("static grid is valid")
    }

    pub fn dims(&self) -> &[Dimension] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.iter().map(|d| d.values.len()).product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Per-dimension value ranks of point `index`.
    pub fn ranks(&self, mut index: usize) -> Vec<usize> {
        let mut ranks = vec![0; self.dims.len()];
        for (r, d) in ranks.iter_mut().zip(&self.dims).rev() {
            *r = index % d.values.len();
            index /= d.values.len();
        }
        ranks
    }

    pub fn point(&self, index: usize) -> GridPoint {
        let values = self
            .ranks(index)
            .iter()
            .zip(&self.dims)
            .map(|(&r, d)| d.values[r])
            .collect();
        GridPoint { index, values }
    }

    /// Index of the point with these values, if it is on the grid.
    pub fn index_of(&self, values: &[i64]) -> Option<usize> {
        if values.len() != self.dims.len() {
            return None;
        }
        let mut index = 0;
        for (v, d) in values.iter().zip(&self.dims) {
            index = index * d.values.len() + d.values.binary_search(v).ok()?;
        }
        Some(index)
    }

    /// Rank-normalized coordinates in `[0, 1]`.
    pub fn unit(&self, index: usize) -> Vec<f64> {
        self.ranks(index)
            .iter()
            .zip(&self.dims)
            .map(|(&r, d)| match d.values.len() {
                1 => 0.0,
                n => r as f64 / (n - 1) as f64,
            })
            .collect()
    }

    /// Overrides the fields of `base` named by the grid dimensions.
    pub fn apply(&self, point: &GridPoint, base: NetworkParams) -> Result<NetworkParams> {
        let mut p = base;
        for (d, &v) in self.dims.iter().zip(&point.values) {
            match d.name.as_str() {
                PAPER_TO_PAPER_W => p.paper_to_paper_w = to_param(PAPER_TO_PAPER_W, v)?,
                TRAIN_TO_TOPIC_W => p.train_to_topic_w = to_param(TRAIN_TO_TOPIC_W, v)?,
                TAU => p.tau = to_param(TAU, v)?,
                SIM_STEPS => p.sim_steps = to_param(SIM_STEPS, v)?,
                other => {
                    return Err(Error::param(
                        "search_space",
                        format!("unknown dimension `{other}`, expected one of {KNOWN_DIMENSIONS:?}"),
                    ))
                }
            }
        }
        p.validate()?;
        Ok(p)
    }
}

fn to_param<T: TryFrom<i64>>(name: &'static str, v: i64) -> Result<T> {
    T::try_from(v).map_err(|_| Error::param(name, format!("{v} out of range")))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub point: GridPoint,
    /// Fraction in `[0, 1]`; 0 for a failed evaluation.
    pub objective: f64,
    /// Seed the objective evaluated under.
    pub seed: u64,
    /// Why the objective failed, if it did.
    pub failure: Option<String>,
}

impl Observation {
    pub fn failed(&self) -> bool {
        self.failure.is_some()
    }
}

/// Matérn-5/2 correlation at distance `r` with length scale `ell`.
pub fn matern52(r: f64, ell: f64) -> f64 {
    let s = 5f64.sqrt() * r / ell;
    (1.0 + s + s * s / 3.0) * (-s).exp()
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Relative noise added to the kernel diagonal.
pub const NOISE_FLOOR: f64 = 1e-8;
const MAX_JITTER: f64 = 1e-2;
const LENGTH_BOUNDS: (f64, f64) = (0.02, 20.0);

/// Fitted GP posterior.
#[derive(Debug, Clone)]
pub struct GpSurrogate {
    x: Vec<Vec<f64>>,
    y_mean: f64,
    y_scale: f64,
    length_scale: f64,
    /// Signal variance of the standardized objective.
    signal_variance: f64,
    /// Relative diagonal noise actually used.
    noise: f64,
    chol: Cholesky<f64, Dyn>,
    /// `(R + noise·I)⁻¹ y`, standardized.
    alpha: DVector<f64>,
}

struct Fit {
    chol: Cholesky<f64, Dyn>,
    alpha: DVector<f64>,
    signal_variance: f64,
    log_likelihood: f64,
    noise: f64,
}

/// Correlation matrix factorization at `ell`, escalating the diagonal noise
/// until it is positive definite. The signal variance is profiled out.
fn fit_at(x: &[Vec<f64>], y: &DVector<f64>, ell: f64) -> Option<Fit> {
    let n = x.len();
    let mut noise = NOISE_FLOOR;
    while noise <= MAX_JITTER {
        let r = DMatrix::from_fn(n, n, |i, j| {
            matern52(distance(&x[i], &x[j]), ell) + if i == j { noise } else { 0.0 }
        });
        if let Some(chol) = Cholesky::new(r) {
            let alpha = chol.solve(y);
            let quad = y.dot(&alpha).max(0.0);
            let log_det: f64 = 2.0 * chol.l().diagonal().iter().map(|d| d.ln()).sum::<f64>();
            let signal_variance = quad / n as f64;
            let log_likelihood = if signal_variance > 0.0 {
                -0.5 * n as f64 * (signal_variance.ln() + 1.0) - 0.5 * log_det
            } else {
                -0.5 * log_det
            };
            return Some(Fit {
                chol,
                alpha,
                signal_variance,
                log_likelihood,
                noise,
            });
        }
        noise *= 10.0;
    }
    None
}

impl GpSurrogate {
    /// Fits the surrogate to `(unit coordinates, objective)` pairs. The length
    /// scale maximizes the profiled likelihood from several starting
    /// brackets; a constant objective keeps the prior signal variance.
    pub fn fit(x: &[Vec<f64>], y: &[f64]) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::LengthMismatch {
                what: "observations",
                expected: x.len(),
                got: y.len(),
            });
        }
        if x.len() < 2 {
            return Err(Error::TooFewObservations {
                required: 2,
                got: x.len(),
            });
        }
        let n = y.len() as f64;
        let y_mean = y.iter().sum::<f64>() / n;
        let sd = (y.iter().map(|v| (v - y_mean).powi(2)).sum::<f64>() / n).sqrt();
        let y_scale = if sd > 0.0 { sd } else { 1.0 };
        let ys = DVector::from_iterator(y.len(), y.iter().map(|v| (v - y_mean) / y_scale));

        let (lo, hi) = (LENGTH_BOUNDS.0.ln(), LENGTH_BOUNDS.1.ln());
        let score = |log_ell: f64| fit_at(x, &ys, log_ell.exp()).map_or(f64::NEG_INFINITY, |f| f.log_likelihood);
        let starts = 8;
        let width = (hi - lo) / starts as f64;
        let mut best = (f64::NEG_INFINITY, 0.0);
        for s in 0..starts {
            let a = lo + s as f64 * width;
            let log_ell = golden_max(&score, a, a + width, 30);
            let ll = score(log_ell);
            if ll > best.0 {
                best = (ll, log_ell);
            }
        }
        let length_scale = best.1.exp();
        let fit = fit_at(x, &ys, length_scale).ok_or_else(|| {
            Error::param(
                "observations",
                "kernel matrix is not positive definite even with jitter",
            )
        })?;
        let signal_variance = if fit.signal_variance > 0.0 {
            fit.signal_variance
        } else {
            1.0
        };
        Ok(GpSurrogate {
            x: x.to_vec(),
            y_mean,
            y_scale,
            length_scale,
            signal_variance,
            noise: fit.noise,
            chol: fit.chol,
            alpha: fit.alpha,
        })
    }

    pub fn length_scale(&self) -> f64 {
        self.length_scale
    }

    pub fn signal_variance(&self) -> f64 {
        self.signal_variance * self.y_scale * self.y_scale
    }

    pub fn noise(&self) -> f64 {
        self.noise
    }

    /// Posterior mean and variance in objective units. Variance is never
    /// negative.
    pub fn predict(&self, at: &[f64]) -> (f64, f64) {
        let k = DVector::from_iterator(
            self.x.len(),
            self.x.iter().map(|xi| matern52(distance(xi, at), self.length_scale)),
        );
        let mean = self.y_mean + self.y_scale * k.dot(&self.alpha);
        let v = self.chol.solve(&k);
        let var = self.signal_variance * (1.0 + self.noise - k.dot(&v)).max(0.0);
        (mean, var * self.y_scale * self.y_scale)
    }
}

/// Golden-section search for a maximum of a unimodal `f` on `[a, b]`.
fn golden_max(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        c
    } else {
        d
    }
}

/// Expected improvement of a `N(mean, var)` prediction over `best`.
pub fn expected_improvement(mean: f64, var: f64, best: f64) -> f64 {
    let sd = var.sqrt();
    if sd <= 0.0 {
        return (mean - best).max(0.0);
    }
    let z = (mean - best) / sd;
    let n = Normal::standard();
    ((mean - best) * n.cdf(z) + sd * n.pdf(z)).max(0.0)
}

/// Unobserved point with the highest expected improvement over `best`.
/// Exact ties are broken uniformly by `rng`; a single remaining point is
/// returned without scoring.
pub fn acquire(
    model: &GpSurrogate,
    space: &SearchSpace,
    observed: &HashSet<usize>,
    best: f64,
    rng: &mut impl Rng,
) -> Result<GridPoint> {
    let size = space.len();
    let open: Vec<usize> = (0..size).filter(|i| !observed.contains(i)).collect();
    match open.len() {
        0 => return Err(Error::SpaceExhausted(size)),
        1 => return Ok(space.point(open[0])),
        _ => {}
    }
    let mut top = f64::NEG_INFINITY;
    let mut ties = Vec::new();
    for &i in &open {
        let (m, v) = model.predict(&space.unit(i));
        let ei = expected_improvement(m, v, best);
        if ei > top {
            top = ei;
            ties.clear();
            ties.push(i);
        } else if ei == top {
            ties.push(i);
        }
    }
    let pick = ties[rng.random_range(0..ties.len())];
    Ok(space.point(pick))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoSettings {
    pub n_init: usize,
    pub n_iter: usize,
    /// Seeds point sampling and tie-breaking.
    pub seed: u64,
    /// Recorded in each observation.
    pub eval_seed: u64,
}

impl Default for BoSettings {
    fn default() -> Self {
        BoSettings {
            n_init: 5,
            n_iter: 10,
            seed: 0,
            eval_seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoResult {
    pub history: Vec<Observation>,
    /// Best objective seen up to and including each row; failed rows do not
    /// count.
    pub incumbent_trace: Vec<Option<f64>>,
    /// History index of the incumbent; the earliest among equals.
    pub best: Option<usize>,
    /// The grid ran out before the budget did.
    pub exhausted: bool,
}

impl BoResult {
    pub fn best_observation(&self) -> Option<&Observation> {
        self.best.map(|i| &self.history[i])
    }
}

/// Runs the optimization loop. Objective errors and values outside `[0, 1]`
/// become failed observations scored 0.
pub fn optimize<E, F>(mut objective: F, space: &SearchSpace, settings: BoSettings) -> Result<BoResult>
where
    E: Display,
    F: FnMut(&GridPoint) -> std::result::Result<f64, E>,
{
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let size = space.len();
    let mut history: Vec<Observation> = Vec::new();
    let mut observed = HashSet::new();
    let mut evaluate = |point: GridPoint, history: &mut Vec<Observation>| {
        let (objective, failure) = match objective(&point) {
            Ok(v) if (0.0..=1.0).contains(&v) => (v, None),
            Ok(v) => (0.0, Some(format!("objective {v} outside [0, 1]"))),
            Err(e) => (0.0, Some(e.to_string())),
        };
        if let Some(f) = &failure {
            log::warn!("evaluation of {:?} failed: {f}", point.values);
        }
        history.push(Observation {
            point,
            objective,
            seed: settings.eval_seed,
            failure,
        });
    };

    let n_init = settings.n_init.min(size);
    for i in sample(&mut rng, size, n_init).into_iter() {
        observed.insert(i);
        evaluate(space.point(i), &mut history);
    }
    for _ in 0..settings.n_iter {
        if observed.len() == size {
            break;
        }
        let point = if history.len() < 2 {
            let open: Vec<usize> = (0..size).filter(|i| !observed.contains(i)).collect();
            space.point(open[rng.random_range(0..open.len())])
        } else {
            let x: Vec<Vec<f64>> = history.iter().map(|o| space.unit(o.point.index)).collect();
            let y: Vec<f64> = history.iter().map(|o| o.objective).collect();
            let model = GpSurrogate::fit(&x, &y)?;
            let best = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            acquire(&model, space, &observed, best, &mut rng)?
        };
        observed.insert(point.index);
        evaluate(point, &mut history);
    }
    let exhausted = settings.n_init.saturating_add(settings.n_iter) > size;

    let mut incumbent_trace = Vec::with_capacity(history.len());
    let mut best: Option<usize> = None;
    for (i, o) in history.iter().enumerate() {
        if !o.failed() && best.is_none_or(|b| o.objective > history[b].objective) {
            best = Some(i);
        }
        incumbent_trace.push(best.map(|b| history[b].objective));
    }
    Ok(BoResult {
        history,
        incumbent_trace,
        best,
        exhausted,
    })
}
