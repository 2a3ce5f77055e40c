//! Brute-force reference computations that the stochastic integrator and the
//! analytic predicates are checked against.
//!
//! * [`mixing_displacement`]: the rectified shift of the oscillation centre
//!   of a damped, deterministically driven atom in one fixed well.
//! * [`gillespie_jumps`]: exact sampling of an inhomogeneous Poisson process
//!   by thinning a homogeneous one.
//! * [`sample_symmetry`]: grid evaluation of the two temporal symmetries.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Exp};

use crate::drive::inertial_force;
use crate::error::{Error, Result};
use crate::lattice::{lattice_force, InternalState};
use crate::units::{DriveParams, LatticeParams, K, MASS};

/// RK4 steps per drive period.
const STEPS_PER_PERIOD: usize = 2048;
/// Periods integrated before the attractor test starts.
const SETTLE_PERIODS: usize = 200;
/// Give up when no attractor is found within this many periods.
const MAX_PERIODS: usize = 20_000;
/// Stroboscopic distance below which the orbit counts as periodic.
const ATTRACTOR_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixingResult {
    pub a_amp: f64,
    pub b_amp: f64,
    pub phi: f64,
    /// Period-averaged ⟨z⟩ minus the bottom of the well it oscillates in.
    pub delta_z: f64,
    /// Periods integrated before the orbit closed on itself.
    pub periods: usize,
}

struct Damped<'a> {
    lattice: LatticeParams,
    drive: &'a DriveParams,
    gamma_damp: f64,
}

impl Damped<'_> {
    fn rhs(&self, t: f64, z: f64, p: f64) -> (f64, f64) {
        let f = lattice_force(&self.lattice, 2.0 * K * z, InternalState::Minus)
            + inertial_force(t, self.drive, MASS)
            - self.gamma_damp * p;
        (p / MASS, f)
    }

    fn rk4(&self, t: f64, z: f64, p: f64, h: f64) -> (f64, f64) {
        let (k1z, k1p) = self.rhs(t, z, p);
        let (k2z, k2p) = self.rhs(t + 0.5 * h, z + 0.5 * h * k1z, p + 0.5 * h * k1p);
        let (k3z, k3p) = self.rhs(t + 0.5 * h, z + 0.5 * h * k2z, p + 0.5 * h * k2p);
        let (k4z, k4p) = self.rhs(t + h, z + h * k3z, p + h * k3p);
        (
            z + h / 6.0 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z),
            p + h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p),
        )
    }

    /// Integrates one drive period starting at `period_index * T`, returning
    /// the final state and the rectangle-rule mean of z over the period.
    fn period(&self, period_index: usize, z: f64, p: f64) -> (f64, f64, f64) {
        let period = self.drive.period();
        let h = period / STEPS_PER_PERIOD as f64;
        let t0 = period_index as f64 * period;
        let (mut z, mut p) = (z, p);
        let mut sum = 0.0;
        for k in 0..STEPS_PER_PERIOD {
            sum += z;
            (z, p) = self.rk4(t0 + k as f64 * h, z, p, h);
        }
        (z, p, sum / STEPS_PER_PERIOD as f64)
    }
}

/// Rectified displacement of an atom held in a single U− well under viscous
/// damping `gamma_damp` and the biharmonic inertial force, starting at the
/// well bottom at rest.
pub fn mixing_displacement(u0: f64, gamma_damp: f64, d: &DriveParams) -> Result<MixingResult> {
    mixing_displacement_from(u0, gamma_damp, d, 0.0, 0.0)
}

/// As [`mixing_displacement`], from the initial condition (z0, p0).
pub fn mixing_displacement_from(
    u0: f64,
    gamma_damp: f64,
    d: &DriveParams,
    z0: f64,
    p0: f64,
) -> Result<MixingResult> {
    if !(gamma_damp > 0.0 && gamma_damp.is_finite()) {
        return Err(Error::invalid(format!(
            "gamma_damp must be positive, got {gamma_damp}"
        )));
    }
    if !(u0 > 0.0 && u0.is_finite()) {
        return Err(Error::invalid(format!("u0 must be positive, got {u0}")));
    }
    if !(d.omega > 0.0 && d.omega.is_finite()) {
        return Err(Error::invalid(format!(
            "omega must be positive, got {}",
            d.omega
        )));
    }
    let system = Damped {
        lattice: LatticeParams {
            u0,
            gamma0: 0.0,
            recoil_kick: false,
        },
        drive: d,
        gamma_damp,
    };

    let (mut z, mut p) = (z0, p0);
    for k in 0..SETTLE_PERIODS {
        (z, p, _) = system.period(k, z, p);
    }
    let mut periods = SETTLE_PERIODS;
    let mut distance = f64::INFINITY;
    while periods < MAX_PERIODS {
        let (z1, p1, mean) = system.period(periods, z, p);
        periods += 1;
        distance = ((z1 - z).powi(2) + (p1 - p).powi(2)).sqrt();
        if distance < ATTRACTOR_TOL {
            // wells of U− sit at z = nπ/k
            let well = (mean * K / PI).round() * PI / K;
            return Ok(MixingResult {
                a_amp: d.a_amp,
                b_amp: d.b_amp,
                phi: d.phi,
                delta_z: mean - well,
                periods,
            });
        }
        (z, p) = (z1, p1);
    }
    Err(Error::NoAttractor { periods, distance })
}

/// Least-squares slope of ln|y| against ln x.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.abs().ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Which amplitude a mixing scan varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Amplitude {
    A,
    B,
}

/// Mixing displacement for each amplitude in `amps`, the other drive
/// parameters taken from `base`.
pub fn mixing_scan(
    u0: f64,
    gamma_damp: f64,
    base: &DriveParams,
    vary: Amplitude,
    amps: &[f64],
) -> Result<Vec<MixingResult>> {
    amps.iter()
        .map(|&x| {
            let mut d = *base;
            match vary {
                Amplitude::A => d.a_amp = x,
                Amplitude::B => d.b_amp = x,
            }
            mixing_displacement(u0, gamma_damp, &d)
        })
        .collect()
}

/// Event times in [0, t_total] of a Poisson process with intensity
/// `rate_fn(t, n)`, where `n` counts the events accepted so far (so the
/// rate may depend on a state that changes at each event).
///
/// Candidates come from a homogeneous process of rate `rate_max`; each is
/// kept with probability `rate_fn / rate_max`.
pub fn gillespie_jumps<F, R>(
    mut rate_fn: F,
    rate_max: f64,
    t_total: f64,
    rng: &mut R,
) -> Result<Vec<f64>>
where
    F: FnMut(f64, usize) -> f64,
    R: Rng + ?Sized,
{
    if !(rate_max.is_finite() && rate_max >= 0.0) {
        return Err(Error::invalid(format!(
            "rate bound must be finite and non-negative, got {rate_max}"
        )));
    }
    let mut events = Vec::new();
    if rate_max == 0.0 {
        return Ok(events);
    }
    let waiting = Exp::new(rate_max).map_err(|e| Error::invalid(e.to_string()))?;
    let mut t = 0.0;
    loop {
        t += waiting.sample(rng);
        if t > t_total {
            return Ok(events);
        }
        let rate = rate_fn(t, events.len());
        if !(rate.is_finite() && rate <= rate_max * (1.0 + 1e-12)) {
            return Err(Error::invalid(format!(
                "rate {rate} at t={t} exceeds the bound {rate_max}"
            )));
        }
        if rng.random::<f64>() * rate_max < rate {
            events.push(t);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    /// F(t + T/2) = −F(t)
    Shift,
    /// F(−t) = F(t)
    Reversal,
}

/// Largest violation of `kind` over `n` equally spaced times in one period.
pub fn sample_symmetry<F: Fn(f64) -> f64>(f: F, period: f64, kind: Symmetry, n: usize) -> f64 {
    assert!(n >= 2, "symmetry grid needs at least two points");
    (0..n)
        .map(|i| {
            let t = period * i as f64 / n as f64;
            match kind {
                Symmetry::Shift => (f(t + 0.5 * period) + f(t)).abs(),
                Symmetry::Reversal => (f(t) - f(-t)).abs(),
            }
        })
        .fold(0.0, f64::max)
}
