//! Reference computations shared by the integration and acceptance tests.
#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_2, TAU};

use optical_ratchet::dynamics::{step, AtomState};
use optical_ratchet::lattice::{pumping_rate, well_bottom, InternalState};
use optical_ratchet::oracle::gillespie_jumps;
use optical_ratchet::units::{DriveParams, SimParams, MASS};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rustfft::{num_complex::Complex, FftPlanner};

/// Operating-point lattice and dt with pumping and drive switched off.
pub fn noise_free(u0: f64) -> SimParams {
    let mut p = SimParams::operating_point();
    p.lattice.u0 = u0;
    p.lattice.gamma0 = 0.0;
    p.lattice.recoil_kick = false;
    p.drive = DriveParams::off(p.drive.omega);
    p
}

/// Plus-well start displaced by `dz` from the bottom, at rest.
pub fn displaced(dz: f64) -> AtomState {
    AtomState::new(
        well_bottom(InternalState::Plus) + dz,
        0.0,
        InternalState::Plus,
    )
}

/// Largest relative energy excursion over `periods` vibrational periods.
pub fn energy_drift(params: &SimParams, init: AtomState, periods: f64) -> f64 {
    let omega_v = params.lattice.vibrational_frequency();
    let n = (periods * TAU / omega_v / params.dt).ceil() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let e0 = init.energy(params);
    let mut s = init;
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        s = step(s, params, &mut rng);
        worst = worst.max((s.energy(params) - e0).abs() / e0.abs());
    }
    worst
}

/// Dominant angular frequency of z(t), from a Hann-windowed FFT with
/// parabolic peak interpolation on the log magnitude.
pub fn measured_frequency(params: &SimParams, init: AtomState, periods: f64) -> f64 {
    let omega_v = params.lattice.vibrational_frequency();
    let n = (periods * TAU / omega_v / params.dt).ceil() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut s = init;
    let mut zs = Vec::with_capacity(n);
    for _ in 0..n {
        zs.push(s.z);
        s = step(s, params, &mut rng);
    }
    let mean = zs.iter().sum::<f64>() / n as f64;
    let mut buf: Vec<Complex<f64>> = zs
        .iter()
        .enumerate()
        .map(|(i, z)| {
            let w = 0.5 - 0.5 * (TAU * i as f64 / n as f64).cos();
            Complex::new((z - mean) * w, 0.0)
        })
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let mags: Vec<f64> = buf[..n / 2]
        .iter()
        .map(|c| c.norm().max(1e-300).ln())
        .collect();
    let k = (1..mags.len() - 1)
        .max_by(|&a, &b| mags[a].total_cmp(&mags[b]))
        .unwrap();
    let (l, c, r) = (mags[k - 1], mags[k], mags[k + 1]);
    let shift = 0.5 * (l - r) / (l - 2.0 * c + r);
    TAU * (k as f64 + shift) / (n as f64 * params.dt)
}

/// One-sample Kolmogorov–Smirnov statistic.
pub fn ks_one_sample(sample: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n)
                .abs()
                .max((((i + 1) as f64) / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Two-sample Kolmogorov–Smirnov statistic.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Asymptotic 1% critical value of the KS statistic.
pub fn ks_critical_1pct(n: usize, m: Option<usize>) -> f64 {
    let c = 1.628;
    match m {
        None => c / (n as f64).sqrt(),
        Some(m) => c * ((n + m) as f64 / (n * m) as f64).sqrt(),
    }
}

/// Free atom (no lattice force, no drive, no recoil) at constant momentum.
pub fn free_atom(gamma0: f64, dt: f64) -> SimParams {
    let mut p = SimParams::operating_point();
    p.lattice.u0 = 0.0;
    p.lattice.gamma0 = gamma0;
    p.lattice.recoil_kick = false;
    p.drive = DriveParams::off(p.drive.omega);
    p.dt = dt;
    p
}

/// Waiting times between the first `count + 1` pumping events of the
/// step integrator.
pub fn thinned_intervals(params: &SimParams, init: AtomState, count: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = init;
    let mut last = None;
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let next = step(s, params, &mut rng);
        if next.s != s.s {
            if let Some(t0) = last {
                out.push(next.t - t0);
            }
            last = Some(next.t);
        }
        s = next;
    }
    out
}

/// Exact waiting times for the same free atom, from the Gillespie oracle.
pub fn gillespie_intervals(
    params: &SimParams,
    init: AtomState,
    count: usize,
    seed: u64,
) -> Vec<f64> {
    let lattice = params.lattice;
    let rate = move |t: f64, n: usize| {
        let xi = 2.0 * (init.z + init.p / MASS * t);
        let s = if n.is_multiple_of(2) { init.s } else { init.s.toggle() };
        pumping_rate(&lattice, xi, s)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut horizon = 4.0 * count as f64 / lattice.gamma0;
    loop {
        let times = gillespie_jumps(rate, lattice.gamma0, horizon, &mut rng).unwrap();
        if times.len() > count {
            return times.windows(2).take(count).map(|w| w[1] - w[0]).collect();
        }
        horizon *= 2.0;
    }
}

/// Start on the node of the pumping shape, where both sublevels pump at γ0/2.
pub fn node_start() -> AtomState {
    AtomState::new(FRAC_PI_2 / 2.0, 0.0, InternalState::Plus)
}
