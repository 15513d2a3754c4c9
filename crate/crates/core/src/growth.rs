//! Heralded chain growth: a successful fusion adds one qubit, a failure costs two.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthParams {
    pub p: f64,
    pub steps: usize,
    pub trials: usize,
    pub seed: u64,
    pub initial_length: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthStats {
    pub p: f64,
    pub mean_drift: f64,
    pub std_error: f64,
    /// 95% normal-approximation half-width.
    pub half_width: f64,
    /// Fraction of trials whose chain, started at `initial_length`, hit length 0.
    pub extinction_fraction: f64,
    pub trials: usize,
    pub steps: usize,
}

pub fn step(length: usize, success: bool) -> usize {
    if success {
        length + 1
    } else {
        length.saturating_sub(2)
    }
}

pub fn random_step<R: Rng + ?Sized>(length: usize, p: f64, rng: &mut R) -> usize {
    step(length, rng.random::<f64>() < p)
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

/// Drift per step measured on a chain long enough never to clamp, plus whether
/// a chain started at `initial_length` dies. Both see the same uniforms, and
/// success is `u < p`, so results for different p are coupled trial by trial.
fn run_trial(params: &GrowthParams, trial: usize) -> (f64, bool) {
    let mut rng = trial_rng(params.seed, trial);
    let start = params.initial_length.max(2 * params.steps + 2);
    let (mut long, mut short) = (start, params.initial_length);
    let mut extinct = short == 0;
    for _ in 0..params.steps {
        let success = rng.random::<f64>() < params.p;
        long = step(long, success);
        if !extinct {
            short = step(short, success);
            extinct = short == 0;
        }
    }
    ((long as f64 - start as f64) / params.steps as f64, extinct)
}

pub fn simulate(params: &GrowthParams) -> Result<GrowthStats> {
    if !(0.0..=1.0).contains(&params.p) {
        return Err(Error::Invalid(format!("success probability {} outside [0, 1]", params.p)));
    }
    if params.trials == 0 || params.steps == 0 {
        return Err(Error::Invalid("trials and steps must be positive".into()));
    }
    let results: Vec<(f64, bool)> = (0..params.trials).into_par_iter().map(|t| run_trial(params, t)).collect();
    let n = params.trials as f64;
    let mean = results.iter().map(|r| r.0).sum::<f64>() / n;
    let var = if params.trials > 1 {
        results.iter().map(|r| (r.0 - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    let std_error = (var / n).sqrt();
    Ok(GrowthStats {
        p: params.p,
        mean_drift: mean,
        std_error,
        half_width: 1.96 * std_error,
        extinction_fraction: results.iter().filter(|r| r.1).count() as f64 / n,
        trials: params.trials,
        steps: params.steps,
    })
}

/// Runs `simulate` at every p in `grid`, sharing the seed.
pub fn threshold_scan(grid: &[f64], params: &GrowthParams) -> Result<Vec<GrowthStats>> {
    if grid.is_empty() {
        return Err(Error::Invalid("empty probability grid".into()));
    }
    grid.iter().map(|&p| simulate(&GrowthParams { p, ..*params })).collect()
}

/// `points` evenly spaced values from `min` to `max` inclusive.
pub fn linspace(min: f64, max: f64, points: usize) -> Vec<f64> {
    match points {
        0 => vec![],
        1 => vec![min],
        _ => (0..points).map(|i| min + (max - min) * i as f64 / (points - 1) as f64).collect(),
    }
}

/// Linear interpolation of the first sign change of the drift.
pub fn zero_crossing(rows: &[GrowthStats]) -> Option<f64> {
    rows.windows(2).find_map(|w| {
        let (a, b) = (&w[0], &w[1]);
        if a.mean_drift <= 0.0 && b.mean_drift > 0.0 {
            let t = -a.mean_drift / (b.mean_drift - a.mean_drift);
            Some(a.p + t * (b.p - a.p))
        } else {
            None
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(p: f64) -> GrowthParams {
        GrowthParams { p, steps: 20, trials: 2000, seed: 7, initial_length: 4 }
    }

    #[test]
    fn step_rules() {
        assert_eq!(step(5, true), 6);
        assert_eq!(step(5, false), 3);
        assert_eq!(step(1, false), 0);
    }

    #[test]
    fn extremes_are_exact() {
        let up = simulate(&params(1.0)).unwrap();
        assert_eq!(up.mean_drift, 1.0);
        assert_eq!(up.half_width, 0.0);
        assert_eq!(up.extinction_fraction, 0.0);
        let down = simulate(&params(0.0)).unwrap();
        assert_eq!(down.mean_drift, -2.0);
        assert_eq!(down.extinction_fraction, 1.0);
    }

    #[test]
    fn reproducible() {
        assert_eq!(simulate(&params(0.7)).unwrap(), simulate(&params(0.7)).unwrap());
        assert_ne!(
            simulate(&params(0.7)).unwrap(),
            simulate(&GrowthParams { seed: 8, ..params(0.7) }).unwrap()
        );
    }

    #[test]
    fn rejects_bad_probability() {
        assert!(simulate(&params(1.5)).is_err());
        assert!(threshold_scan(&[], &params(0.5)).is_err());
    }

    #[test]
    fn crossing_interpolates() {
        let mk = |p, d| GrowthStats { p, mean_drift: d, std_error: 0.0, half_width: 0.0, extinction_fraction: 0.0, trials: 1, steps: 1 };
        let rows = [mk(0.6, -0.2), mk(0.7, 0.1), mk(0.8, 0.4)];
        assert!((zero_crossing(&rows).unwrap() - (0.6 + 0.2 / 0.3 * 0.1)).abs() < 1e-12);
    }
}
