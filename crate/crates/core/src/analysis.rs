//! Drift-velocity fits and parameter sweeps.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::ensemble::{derive_seed, run_ensemble_with, EnsembleResult, RunOptions};
use crate::error::{Error, Result};
use crate::units::{SimParams, RECOIL_VELOCITY};

/// Minimum number of samples inside a fit window.
pub const MIN_FIT_SAMPLES: usize = 10;

/// Fraction of `t_total` discarded as transient when no window is given.
pub const DEFAULT_TRANSIENT_FRACTION: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityFit {
    /// Drift velocity in units of the recoil velocity.
    pub v: f64,
    /// One-sigma uncertainty of `v`.
    pub v_err: f64,
    /// Fitted slope dz/dt in units of ω_r/k.
    pub slope: f64,
    pub slope_err: f64,
    pub intercept: f64,
    pub window: (f64, f64),
    /// Root-mean-square residual of the CM series about the fitted line.
    pub residual_rms: f64,
}

impl VelocityFit {
    /// |v| within three standard errors of zero.
    pub fn consistent_with_zero(&self) -> bool {
        self.v.abs() < 3.0 * self.v_err
    }
}

struct Line {
    slope: f64,
    intercept: f64,
    sxx: f64,
    rss: f64,
}

fn ols(t: &[f64], z: &[f64]) -> Line {
    let n = t.len() as f64;
    let t_mean = t.iter().sum::<f64>() / n;
    let z_mean = z.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (ti, zi) in t.iter().zip(z) {
        sxx += (ti - t_mean) * (ti - t_mean);
        sxy += (ti - t_mean) * (zi - z_mean);
    }
    let slope = sxy / sxx;
    let intercept = z_mean - slope * t_mean;
    let rss = t
        .iter()
        .zip(z)
        .map(|(ti, zi)| {
            let r = zi - intercept - slope * ti;
            r * r
        })
        .sum();
    Line {
        slope,
        intercept,
        sxx,
        rss,
    }
}

fn window_range(times: &[f64], window: (f64, f64)) -> Result<std::ops::Range<usize>> {
    let (start, end) = window;
    // sample times are multiples of dt; allow for rounding at the edges
    let tol = 1e-9 * start.abs().max(end.abs()).max(1.0);
    let lo = times.partition_point(|&t| t < start - tol);
    let hi = times.partition_point(|&t| t <= end + tol);
    let found = hi.saturating_sub(lo);
    if found < MIN_FIT_SAMPLES {
        return Err(Error::WindowTooShort {
            start,
            end,
            found,
            needed: MIN_FIT_SAMPLES,
        });
    }
    Ok(lo..hi)
}

/// Least-squares slope of the CM series over `window`.
///
/// With two or more stored trajectories the uncertainty is the standard
/// error of the per-trajectory slopes, whose mean equals the CM slope.
/// Otherwise it comes from the residual variance of the CM fit.
pub fn fit_velocity(res: &EnsembleResult, window: (f64, f64)) -> Result<VelocityFit> {
    let range = window_range(&res.cm_times, window)?;
    let t = &res.cm_times[range.clone()];
    let line = ols(t, &res.cm_positions[range.clone()]);
    let n = t.len();

    let slope_err = if res.trajectories.len() >= 2 {
        let slopes: Vec<f64> = res
            .trajectories
            .iter()
            .map(|z| ols(t, &z[range.clone()]).slope)
            .collect();
        standard_error(&slopes)
    } else {
        (line.rss / (n - 2) as f64 / line.sxx).sqrt()
    };

    Ok(VelocityFit {
        v: line.slope / RECOIL_VELOCITY,
        v_err: slope_err / RECOIL_VELOCITY,
        slope: line.slope,
        slope_err,
        intercept: line.intercept,
        window: (t[0], t[n - 1]),
        residual_rms: (line.rss / n as f64).sqrt(),
    })
}

/// Fit over `[t_transient, t_total]` of the generating parameters.
pub fn fit_after_transient(res: &EnsembleResult, params: &SimParams) -> Result<VelocityFit> {
    fit_velocity(res, (params.t_transient, params.t_total))
}

fn standard_error(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (var / n).sqrt()
}

/// Bootstrap over trajectories of the CM drift velocity (units v_r).
pub fn bootstrap_velocity_error(
    res: &EnsembleResult,
    window: (f64, f64),
    resamples: usize,
    seed: u64,
) -> Result<f64> {
    let range = window_range(&res.cm_times, window)?;
    let t = &res.cm_times[range.clone()];
    let n = res.trajectories.len();
    if n < 2 {
        return Err(Error::invalid("bootstrap needs at least two trajectories"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cm = vec![0.0; t.len()];
    let mut slopes = Vec::with_capacity(resamples);
    for _ in 0..resamples {
        cm.iter_mut().for_each(|c| *c = 0.0);
        for _ in 0..n {
            let z = &res.trajectories[rng.random_range(0..n)][range.clone()];
            for (c, zi) in cm.iter_mut().zip(z) {
                *c += zi;
            }
        }
        cm.iter_mut().for_each(|c| *c /= n as f64);
        slopes.push(ols(t, &cm).slope / RECOIL_VELOCITY);
    }
    let m = slopes.iter().sum::<f64>() / resamples as f64;
    let var = slopes.iter().map(|s| (s - m) * (s - m)).sum::<f64>() / (resamples - 1) as f64;
    Ok(var.sqrt())
}

/// RMS deviation of a velocity curve from its mean,
/// sqrt(Σ (v_i − ⟨v⟩)² / N).
pub fn sigma_v(vs: &[f64]) -> Result<f64> {
    if vs.len() < 2 {
        return Err(Error::invalid(format!(
            "sigma_v needs at least two velocities, got {}",
            vs.len()
        )));
    }
    let n = vs.len() as f64;
    let mean = vs.iter().sum::<f64>() / n;
    Ok((vs.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Phi,
    B,
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepParam::Phi => "phi",
            SweepParam::B => "b",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub param: SweepParam,
    pub values: Vec<f64>,
    pub fits: Vec<VelocityFit>,
    /// Present when the sweep has at least two points.
    pub sigma_v: Option<f64>,
}

impl SweepResult {
    pub fn velocities(&self) -> Vec<f64> {
        self.fits.iter().map(|f| f.v).collect()
    }
}

fn run_point(params: &SimParams, opts: &RunOptions) -> Result<VelocityFit> {
    let params = params.clone().validate()?;
    let res = run_ensemble_with(&params, opts)?;
    fit_after_transient(&res, &params)
}

fn finish(param: SweepParam, values: Vec<f64>, fits: Vec<VelocityFit>) -> SweepResult {
    let vs: Vec<f64> = fits.iter().map(|f| f.v).collect();
    SweepResult {
        param,
        values,
        sigma_v: sigma_v(&vs).ok(),
        fits,
    }
}

/// Parameters of point `index` of a φ-sweep.
pub fn phase_point(base: &SimParams, phi: f64, index: usize) -> SimParams {
    let mut p = base.clone();
    p.drive.phi = phi;
    p.seed = derive_seed(base.seed, index as u64);
    p
}

/// Parameters of point `index` of a B-sweep (A = 1 − B).
pub fn amplitude_point(base: &SimParams, b: f64, index: usize) -> SimParams {
    let mut p = base.clone();
    p.drive.b_amp = b;
    p.drive.a_amp = 1.0 - b;
    p.seed = derive_seed(base.seed, index as u64);
    p
}

pub fn phase_sweep(base: &SimParams, phis: &[f64]) -> Result<SweepResult> {
    phase_sweep_with(base, phis, &RunOptions::default())
}

/// One ensemble per φ, seeded from the master seed and the point index.
pub fn phase_sweep_with(base: &SimParams, phis: &[f64], opts: &RunOptions) -> Result<SweepResult> {
    if phis.is_empty() {
        return Err(Error::invalid("phase sweep needs at least one phase"));
    }
    let fits = phis
        .iter()
        .enumerate()
        .map(|(i, &phi)| run_point(&phase_point(base, phi, i), opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(finish(SweepParam::Phi, phis.to_vec(), fits))
}

pub fn b_sweep(base: &SimParams, bs: &[f64]) -> Result<SweepResult> {
    b_sweep_with(base, bs, &RunOptions::default())
}

/// One ensemble per B with A = 1 − B and φ taken from `base`.
pub fn b_sweep_with(base: &SimParams, bs: &[f64], opts: &RunOptions) -> Result<SweepResult> {
    if bs.is_empty() {
        return Err(Error::invalid("B sweep needs at least one amplitude"));
    }
    if let Some(b) = bs.iter().find(|b| !(0.0..=1.0).contains(*b)) {
        return Err(Error::invalid(format!("B must lie in [0, 1], got {b}")));
    }
    let fits = bs
        .iter()
        .enumerate()
        .map(|(i, &b)| run_point(&amplitude_point(base, b, i), opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(finish(SweepParam::B, bs.to_vec(), fits))
}

/// For each B (A = 1 − B), the σ_v amplitude of the velocity-vs-φ curve.
pub fn sigma_v_vs_b(
    base: &SimParams,
    bs: &[f64],
    phis: &[f64],
    opts: &RunOptions,
) -> Result<Vec<(f64, SweepResult)>> {
    if phis.len() < 2 {
        return Err(Error::invalid("sigma_v needs at least two phases"));
    }
    if let Some(b) = bs.iter().find(|b| !(0.0..=1.0).contains(*b)) {
        return Err(Error::invalid(format!("B must lie in [0, 1], got {b}")));
    }
    bs.iter()
        .enumerate()
        .map(|(i, &b)| {
            let point = amplitude_point(base, b, i);
            phase_sweep_with(&point, phis, opts).map(|s| (b, s))
        })
        .collect()
}

/// The Fig.-3 style default phase of a B-sweep.
pub const B_SWEEP_PHI: f64 = FRAC_PI_2;
