//! Recoil units and the parameter types shared by every other module.
//!
//! Lengths are measured in 1/k, momenta in ħk, energies in the recoil energy
//! E_r = ħ²k²/2M and times in 1/ω_r with ω_r = E_r/ħ. With ħ = k = 1 this
//! fixes M = 1/2, so dz/dt = 2p, the kinetic energy is p² and the recoil
//! velocity ħk/M equals 2.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};

/// Wavenumber of the lattice beams.
pub const K: f64 = 1.0;
/// Reduced Planck constant.
pub const HBAR: f64 = 1.0;
/// Atomic mass in recoil units.
pub const MASS: f64 = 0.5;
/// Recoil velocity ħk/M.
pub const RECOIL_VELOCITY: f64 = HBAR * K / MASS;

/// Upper bound on `dt` times the fastest deterministic frequency.
pub const MAX_PHASE_PER_STEP: f64 = 0.1;
/// Upper bound on `dt * gamma0` for first-order jump thinning.
pub const MAX_JUMP_PROBABILITY: f64 = 0.1;

/// Number of canonical phase values per full turn.
const PHASE_STEPS: u64 = 1 << 28;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeParams {
    /// Well-depth scale U0 in units of E_r.
    pub u0: f64,
    /// Optical-pumping rate scale in units of ω_r.
    pub gamma0: f64,
    /// Whether pumping events add photon-recoil momentum kicks.
    pub recoil_kick: bool,
}

impl LatticeParams {
    /// Well depth for the Jg=1/2 → Je=3/2 lin⊥lin lattice, U0 = (2/3)|Δ0'|,
    /// with the light shift per beam given in units of ω_r.
    pub fn depth_from_light_shift(light_shift: f64) -> f64 {
        2.0 / 3.0 * light_shift.abs()
    }

    /// Pumping-rate scale for the same transition, γ0 = (2/9)Γ0' with the
    /// per-beam scattering rate Γ0' = |Δ0'| Γ/|Δ|.
    pub fn pumping_from_light_shift(light_shift: f64, detuning_over_linewidth: f64) -> f64 {
        2.0 / 9.0 * light_shift.abs() / detuning_over_linewidth.abs()
    }

    pub fn vibrational_frequency(&self) -> f64 {
        vibrational_frequency(self)
    }
}

/// Small-oscillation frequency at the bottom of a well, Ω_v = 2k√(U0/M).
pub fn vibrational_frequency(lattice: &LatticeParams) -> f64 {
    2.0 * K * (lattice.u0 / MASS).sqrt()
}

/// Phase modulation α(t) = α0 [A cos ωt + (B/4) cos(2ωt − φ)].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveParams {
    pub alpha0: f64,
    pub a_amp: f64,
    pub b_amp: f64,
    pub omega: f64,
    pub phi: f64,
}

impl DriveParams {
    pub fn off(omega: f64) -> Self {
        DriveParams {
            alpha0: 0.0,
            a_amp: 0.0,
            b_amp: 0.0,
            omega,
            phi: 0.0,
        }
    }

    pub fn period(&self) -> f64 {
        TAU / self.omega
    }

    /// φ reduced to [0, 2π) and snapped to a grid of 2^28 steps per turn,
    /// so that φ and φ + 2πn produce identical drive values. Multiples of
    /// π/2 are represented exactly.
    pub fn canonical_phi(&self) -> f64 {
        let turns = self.phi.rem_euclid(TAU) / TAU;
        let m = (turns * PHASE_STEPS as f64).round() as u64 % PHASE_STEPS;
        m as f64 * (TAU / PHASE_STEPS as f64)
    }
}

/// Widths of the initial phase-space distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialSpread {
    /// Positions are uniform on [0, z_width).
    pub z_width: f64,
    /// Momenta are Gaussian with this standard deviation (units ħk).
    pub p_width: f64,
}

impl Default for InitialSpread {
    fn default() -> Self {
        // one spatial period of the bipotential
        InitialSpread {
            z_width: PI / K,
            p_width: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimParams {
    pub lattice: LatticeParams,
    pub drive: DriveParams,
    pub dt: f64,
    pub t_total: f64,
    pub t_transient: f64,
    pub n_traj: usize,
    pub seed: u64,
    pub initial_spread: InitialSpread,
    /// Time between recorded samples; one drive period when `None`.
    pub sample_interval: Option<f64>,
}

impl SimParams {
    /// Operating point of the phase sweep: U0 from Δ0' = −150 ω_r,
    /// γ0 = ω_r / 2, ω = 0.87 Ω_v, α0 = 8, A = B = 1/2, φ = π/2.
    /// The integrator resolves each drive period with 128 steps and the
    /// trajectory lasts 1000 drive periods, the first 20% being transient.
    pub fn operating_point() -> Self {
        let lattice = LatticeParams {
            u0: LatticeParams::depth_from_light_shift(-150.0),
            gamma0: 0.5,
            recoil_kick: true,
        };
        let omega = 0.87 * lattice.vibrational_frequency();
        let drive = DriveParams {
            alpha0: 8.0,
            a_amp: 0.5,
            b_amp: 0.5,
            omega,
            phi: PI / 2.0,
        };
        let period = drive.period();
        let t_total = 1000.0 * period;
        SimParams {
            lattice,
            drive,
            dt: period / 128.0,
            t_total,
            t_transient: 0.2 * t_total,
            n_traj: 1000,
            seed: 1,
            initial_spread: InitialSpread::default(),
            sample_interval: None,
        }
    }

    pub fn sample_interval(&self) -> f64 {
        self.sample_interval.unwrap_or_else(|| self.drive.period())
    }

    /// Number of integrator steps between recorded samples (at least one).
    pub fn sample_stride(&self) -> usize {
        ((self.sample_interval() / self.dt).round() as usize).max(1)
    }

    /// Number of integrator steps covering `t_total`.
    pub fn n_steps(&self) -> usize {
        (self.t_total / self.dt).round() as usize
    }

    pub fn validate(self) -> Result<Self> {
        validate(self)
    }
}

fn check_finite(name: &str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "{name} must be finite, got {value}"
        )))
    }
}

/// Checks every parameter constraint and hands the parameters back unchanged.
pub fn validate(params: SimParams) -> Result<SimParams> {
    let SimParams {
        lattice, drive, dt, ..
    } = &params;
    for (name, v) in [
        ("u0", lattice.u0),
        ("gamma0", lattice.gamma0),
        ("alpha0", drive.alpha0),
        ("a_amp", drive.a_amp),
        ("b_amp", drive.b_amp),
        ("omega", drive.omega),
        ("phi", drive.phi),
        ("dt", *dt),
        ("t_total", params.t_total),
        ("t_transient", params.t_transient),
        ("initial_spread.z", params.initial_spread.z_width),
        ("initial_spread.p", params.initial_spread.p_width),
    ] {
        check_finite(name, v)?;
    }
    if lattice.u0 <= 0.0 {
        return Err(Error::invalid(format!(
            "u0 must be positive, got {}",
            lattice.u0
        )));
    }
    if lattice.gamma0 <= 0.0 {
        return Err(Error::invalid(format!(
            "gamma0 must be positive, got {}",
            lattice.gamma0
        )));
    }
    if drive.omega <= 0.0 {
        return Err(Error::invalid(format!(
            "omega must be positive, got {}",
            drive.omega
        )));
    }
    if drive.alpha0 < 0.0 {
        return Err(Error::invalid(format!(
            "alpha0 must be non-negative, got {}",
            drive.alpha0
        )));
    }
    if *dt <= 0.0 {
        return Err(Error::invalid(format!("dt must be positive, got {dt}")));
    }
    let fastest = vibrational_frequency(lattice).max(drive.omega);
    if dt * fastest > MAX_PHASE_PER_STEP {
        return Err(Error::invalid(format!(
            "dt too coarse: dt*max(Omega_v, omega) = {} exceeds {MAX_PHASE_PER_STEP}",
            dt * fastest
        )));
    }
    if dt * lattice.gamma0 > MAX_JUMP_PROBABILITY {
        return Err(Error::invalid(format!(
            "jump thinning invalid: gamma0*dt = {} exceeds {MAX_JUMP_PROBABILITY}",
            dt * lattice.gamma0
        )));
    }
    if params.t_transient < 0.0 || params.t_transient >= params.t_total {
        return Err(Error::invalid(format!(
            "need 0 <= t_transient < t_total, got t_transient={} t_total={}",
            params.t_transient, params.t_total
        )));
    }
    if params.n_traj == 0 {
        return Err(Error::invalid("n_traj must be at least 1"));
    }
    if params.initial_spread.z_width < 0.0 || params.initial_spread.p_width < 0.0 {
        return Err(Error::invalid("initial_spread widths must be non-negative"));
    }
    if let Some(interval) = params.sample_interval {
        if !(interval.is_finite() && interval >= *dt) {
            return Err(Error::invalid(format!(
                "sample_interval must be at least dt, got {interval}"
            )));
        }
    }
    Ok(params)
}
