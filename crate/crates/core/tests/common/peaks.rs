//! Synthetic objectives over a search grid for checking the optimizer.

use std::convert::Infallible;

use spikegnn::bopt::{optimize, BoSettings, SearchSpace};

/// Separable objective on rank coordinates with its unique maximum at the
/// rank vector `peak`, falling off as `exp(-sharpness · d²)`.
pub fn peaked<'a>(space: &'a SearchSpace, peak: &[usize], sharpness: f64) -> impl Fn(usize) -> f64 + 'a {
    let peak = peak.to_vec();
    move |index| {
        let u = space.unit(index);
        let c: Vec<f64> = space
            .dims()
            .iter()
            .zip(&peak)
            .map(|(d, &r)| {
                if d.values.len() == 1 {
                    0.0
                } else {
                    r as f64 / (d.values.len() - 1) as f64
                }
            })
            .collect();
        let d2: f64 = u.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum();
        0.9 * (-sharpness * d2).exp()
    }
}

/// Rank of `index` among all grid points by objective, 0 being the best.
pub fn grid_rank(space: &SearchSpace, f: &dyn Fn(usize) -> f64, index: usize) -> usize {
    let v = f(index);
    (0..space.len()).filter(|&i| f(i) > v).count()
}

/// Number of optimizer seeds in `0..seeds` whose best point ranks in the
/// top 2% of the grid under `f`.
pub fn top_two_percent_hits(space: &SearchSpace, f: &dyn Fn(usize) -> f64, seeds: u64) -> usize {
    let cutoff = space.len() * 2 / 100;
    (0..seeds)
        .filter(|&seed| {
            let r = optimize(
                |p| Ok::<_, Infallible>(f(p.index)),
                space,
                BoSettings {
                    seed,
                    ..BoSettings::default()
                },
            )
            .unwrap();
            grid_rank(space, f, r.best_observation().unwrap().point.index) < cutoff
        })
        .count()
}
