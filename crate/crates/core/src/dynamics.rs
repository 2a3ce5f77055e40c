//! Single-trajectory jump-diffusion integrator.
//!
//! Each step applies a half-kick / drift / half-kick update with the lattice
//! force of the current sublevel plus the inertial force, then thins a
//! pumping event with probability `rate * dt` evaluated at the new position.
//! A pumping event flips the sublevel and, when enabled, adds two independent
//! recoil kicks uniform on [−ħk, ħk].

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::drive::inertial_force;
use crate::lattice::{lattice_force, potential, pumping_rate, InternalState};
use crate::units::{SimParams, HBAR, K, MASS};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomState {
    /// Position in the accelerated frame (units 1/k).
    pub z: f64,
    /// Momentum (units ħk).
    pub p: f64,
    pub s: InternalState,
    pub t: f64,
}

impl AtomState {
    pub fn new(z: f64, p: f64, s: InternalState) -> Self {
        AtomState { z, p, s, t: 0.0 }
    }

    pub fn xi(&self) -> f64 {
        2.0 * K * self.z
    }

    /// Kinetic energy p²/2M (units E_r).
    pub fn kinetic_energy(&self) -> f64 {
        self.p * self.p / (2.0 * MASS)
    }

    /// Kinetic plus lattice potential energy, ignoring the drive.
    pub fn energy(&self, params: &SimParams) -> f64 {
        self.kinetic_energy() + potential(&params.lattice, self.xi(), self.s)
    }

    /// Mirror image z → −z, p → −p.
    pub fn mirrored(self) -> Self {
        AtomState {
            z: -self.z,
            p: -self.p,
            ..self
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub z: Vec<f64>,
    pub p: Vec<f64>,
    pub jumps: usize,
    pub final_state: AtomState,
}

/// Draws an initial condition: z uniform on the configured width, p Gaussian,
/// sublevel equiprobable.
pub fn initial_state<R: Rng + ?Sized>(params: &SimParams, rng: &mut R) -> AtomState {
    let spread = &params.initial_spread;
    let z = spread.z_width * rng.random::<f64>();
    let normal: f64 = StandardNormal.sample(rng);
    let p = spread.p_width * normal;
    let s = if rng.random::<bool>() {
        InternalState::Plus
    } else {
        InternalState::Minus
    };
    AtomState::new(z, p, s)
}

fn total_force(params: &SimParams, z: f64, s: InternalState, t: f64) -> f64 {
    lattice_force(&params.lattice, 2.0 * K * z, s) + inertial_force(t, &params.drive, MASS)
}

/// Deterministic part of one step, returning the new (z, p).
fn kick_drift_kick(params: &SimParams, state: &AtomState, force_start: f64) -> (f64, f64) {
    let dt = params.dt;
    let p_half = state.p + 0.5 * dt * force_start;
    let z = state.z + dt * p_half / MASS;
    let force_end = total_force(params, z, state.s, state.t + dt);
    (z, p_half + 0.5 * dt * force_end)
}

/// Stochastic part of one step. Returns whether a pumping event happened.
fn thin_jump<R: Rng + ?Sized>(params: &SimParams, state: &mut AtomState, rng: &mut R) -> bool {
    let rate = pumping_rate(&params.lattice, state.xi(), state.s);
    if rng.random::<f64>() >= rate * params.dt {
        return false;
    }
    state.s = state.s.toggle();
    if params.lattice.recoil_kick {
        let q1 = rng.random_range(-1.0..=1.0);
        let q2 = rng.random_range(-1.0..=1.0);
        state.p += HBAR * K * (q1 + q2);
    }
    true
}

/// Advances the atom by one `dt`.
pub fn step<R: Rng + ?Sized>(state: AtomState, params: &SimParams, rng: &mut R) -> AtomState {
    let force = total_force(params, state.z, state.s, state.t);
    let (z, p) = kick_drift_kick(params, &state, force);
    let mut next = AtomState {
        z,
        p,
        s: state.s,
        t: state.t + params.dt,
    };
    thin_jump(params, &mut next, rng);
    next
}

/// Integrates from `init` to `t_total`, recording a sample every
/// `params.sample_stride()` steps.
pub fn run_trajectory<R: Rng + ?Sized>(
    init: AtomState,
    params: &SimParams,
    rng: &mut R,
) -> TrajectoryRecord {
    run_trajectory_signed(init, params, 1.0, rng)
}

/// Inertial force tabulated over one drive period when `dt` divides it.
struct DriveTable {
    values: Vec<f64>,
}

impl DriveTable {
    fn new(params: &SimParams) -> Option<Self> {
        let per_period = params.drive.period() / params.dt;
        let n = per_period.round();
        if params.drive.alpha0 == 0.0 || n < 1.0 || (per_period - n).abs() > 1e-9 * n {
            return None;
        }
        let n = n as usize;
        let values = (0..n)
            .map(|k| inertial_force(k as f64 * params.dt, &params.drive, MASS))
            .collect();
        Some(DriveTable { values })
    }
}

/// As [`run_trajectory`], with every recoil kick multiplied by `kick_sign`.
/// A sign of −1 together with a mirrored initial state gives the
/// parity-mapped partner of a trajectory drawn from the same stream.
pub fn run_trajectory_signed<R: Rng + ?Sized>(
    init: AtomState,
    params: &SimParams,
    kick_sign: f64,
    rng: &mut R,
) -> TrajectoryRecord {
    let n_steps = params.n_steps();
    let stride = params.sample_stride();
    let n_samples = n_steps / stride + 1;
    let mut times = Vec::with_capacity(n_samples);
    let mut zs = Vec::with_capacity(n_samples);
    let mut ps = Vec::with_capacity(n_samples);
    let t0 = init.t;
    let dt = params.dt;
    let lattice_params = &params.lattice;
    let force_amp = 2.0 * K * lattice_params.u0;
    let half_rate_dt = 0.5 * lattice_params.gamma0 * dt;

    // a tabulated drive is only valid when the trajectory starts at a
    // multiple of the step
    let table = if t0 == 0.0 {
        DriveTable::new(params)
    } else {
        None
    };
    let drive_at = |n: usize, t: f64| match &table {
        Some(tab) => tab.values[n % tab.values.len()],
        None => inertial_force(t, &params.drive, MASS),
    };

    let mut state = init;
    let mut jumps = 0;
    times.push(state.t);
    zs.push(state.z);
    ps.push(state.p);

    let mut force = total_force(params, state.z, state.s, state.t);
    for n in 1..=n_steps {
        let p_half = state.p + 0.5 * dt * force;
        let z = state.z + dt * p_half / MASS;
        let t = t0 + n as f64 * dt;
        let (sin_xi, cos_xi) = (2.0 * K * z).sin_cos();
        let sign = state.s.sign();
        let lattice = force_amp * sign * sin_xi;
        let inertial = drive_at(n, t);
        state = AtomState {
            z,
            p: p_half + 0.5 * dt * (lattice + inertial),
            s: state.s,
            t,
        };
        // pumping_rate(ξ, s) * dt, sharing the trig evaluation above
        let jump_probability = half_rate_dt * (1.0 + sign * cos_xi);
        // the lattice force is odd in the sublevel sign, so a flip negates it
        force = if rng.random::<f64>() < jump_probability {
            state.s = state.s.toggle();
            if lattice_params.recoil_kick {
                let q1 = rng.random_range(-1.0..=1.0);
                let q2 = rng.random_range(-1.0..=1.0);
                state.p += kick_sign * HBAR * K * (q1 + q2);
            }
            jumps += 1;
            inertial - lattice
        } else {
            inertial + lattice
        };
        if n % stride == 0 {
            times.push(t);
            zs.push(state.z);
            ps.push(state.p);
        }
    }

    TrajectoryRecord {
        times,
        z: zs,
        p: ps,
        jumps,
        final_state: state,
    }
}
