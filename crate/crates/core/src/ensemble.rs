//! Parallel ensembles of independent trajectories.
//!
//! Trajectory `i` draws from ChaCha8 stream `i` of a generator keyed by the
//! ensemble seed, so results do not depend on the number of workers or on
//! scheduling, and growing the ensemble leaves existing trajectories intact.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dynamics::{initial_state, run_trajectory_signed, AtomState, TrajectoryRecord};
use crate::error::{Error, Result};
use crate::units::SimParams;

/// Refuse ensembles whose stored samples would exceed this many bytes.
const MAX_SAMPLE_BYTES: usize = 8 << 30;

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Worker threads; `None` uses the global rayon pool.
    pub workers: Option<usize>,
    /// Run the parity-mapped ensemble: mirrored initial states and kicks.
    pub mirror: bool,
}

impl RunOptions {
    pub fn with_workers(workers: usize) -> Self {
        RunOptions {
            workers: Some(workers),
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleResult {
    pub cm_times: Vec<f64>,
    pub cm_positions: Vec<f64>,
    pub cm_stderr: Vec<f64>,
    pub n_traj: usize,
    /// Per-trajectory z samples, indexed `[trajectory][sample]`.
    pub trajectories: Vec<Vec<f64>>,
    pub final_states: Vec<AtomState>,
    pub total_jumps: usize,
}

/// RNG for trajectory `index` of an ensemble keyed by `seed`.
pub fn trajectory_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// SplitMix64 finaliser, used to derive per-point seeds from a master seed.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut x = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Runs trajectory `index` of the ensemble described by `params`.
pub fn run_member(params: &SimParams, index: usize, mirror: bool) -> TrajectoryRecord {
    let mut rng = trajectory_rng(params.seed, index as u64);
    let init = initial_state(params, &mut rng);
    if mirror {
        run_trajectory_signed(init.mirrored(), params, -1.0, &mut rng)
    } else {
        run_trajectory_signed(init, params, 1.0, &mut rng)
    }
}

pub fn run_ensemble(params: &SimParams) -> Result<EnsembleResult> {
    run_ensemble_with(params, &RunOptions::default())
}

pub fn run_ensemble_with(params: &SimParams, opts: &RunOptions) -> Result<EnsembleResult> {
    if params.n_traj == 0 {
        return Err(Error::invalid("n_traj must be at least 1"));
    }
    let resources = |msg: String| Error::Resources {
        n_traj: params.n_traj,
        t_total: params.t_total,
        msg,
    };
    let n_samples = params.n_steps() / params.sample_stride() + 1;
    let bytes = n_samples
        .checked_mul(params.n_traj)
        .and_then(|n| n.checked_mul(std::mem::size_of::<f64>() * 2))
        .ok_or_else(|| resources("sample storage size overflows".into()))?;
    if bytes > MAX_SAMPLE_BYTES {
        return Err(resources(format!(
            "sample storage of {bytes} bytes exceeds the {MAX_SAMPLE_BYTES} byte limit"
        )));
    }

    let run = || -> Vec<TrajectoryRecord> {
        (0..params.n_traj)
            .into_par_iter()
            .map(|i| run_member(params, i, opts.mirror))
            .collect()
    };
    let records = match opts.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| resources(format!("cannot start worker pool: {e}")))?
            .install(run),
        None => run(),
    };
    Ok(aggregate(records))
}

/// Reduces trajectory records, in index order, into centre-of-mass statistics.
pub fn aggregate(records: Vec<TrajectoryRecord>) -> EnsembleResult {
    let n = records.len();
    let cm_times = records[0].times.clone();
    let n_samples = cm_times.len();
    let mut cm_positions = vec![0.0; n_samples];
    let mut cm_stderr = vec![0.0; n_samples];
    for rec in &records {
        for (acc, z) in cm_positions.iter_mut().zip(&rec.z) {
            *acc += z;
        }
    }
    for m in &mut cm_positions {
        *m /= n as f64;
    }
    if n > 1 {
        for rec in &records {
            for ((acc, z), m) in cm_stderr.iter_mut().zip(&rec.z).zip(&cm_positions) {
                *acc += (z - m) * (z - m);
            }
        }
        for e in &mut cm_stderr {
            *e = (*e / ((n - 1) * n) as f64).sqrt();
        }
    }
    let total_jumps = records.iter().map(|r| r.jumps).sum();
    let final_states = records.iter().map(|r| r.final_state).collect();
    let trajectories = records.into_iter().map(|r| r.z).collect();
    EnsembleResult {
        cm_times,
        cm_positions,
        cm_stderr,
        n_traj: n,
        trajectories,
        final_states,
        total_jumps,
    }
}
