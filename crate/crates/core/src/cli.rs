//! Command-line front end.
//!
//! Exit status is 0 on success, 2 for usage or validation errors and 3 for
//! failures during a run. Errors are reported as a single stderr line of the
//! form `error[validation]: ...` or `error[runtime]: ...`.

use std::f64::consts::TAU;
use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::{
    b_sweep_with, fit_after_transient, phase_sweep_with, sigma_v_vs_b, SweepResult,
};
use crate::config::{ConfigMap, KEYS};
use crate::drive::{
    force_scale, fundamental_period, inertial_force, shift_symmetry_holds,
    time_reversal_symmetry_holds,
};
use crate::ensemble::{run_ensemble_with, RunOptions};
use crate::error::{Error, Result};
use crate::oracle::{loglog_slope, mixing_scan, sample_symmetry, Amplitude, Symmetry};
use crate::output::{cm_table, fmt_num, sweep_table, two_column, OutputSet, RunManifest};
use crate::units::{DriveParams, SimParams, MASS};

#[derive(Debug, Parser)]
#[command(
    name = "optical-ratchet",
    version,
    about = "Directed diffusion of cold atoms in a biharmonically driven optical lattice"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Parameter file of `key = value` lines.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Master seed (overrides the config).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Cap on worker threads; results do not depend on it.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Parameter override `key=value`; repeatable. `--key=value` also works.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// One ensemble; writes the centre-of-mass series.
    Run,
    /// Drift velocity against the phase φ.
    SweepPhi {
        /// `start:stop:count`, endpoints included.
        #[arg(long)]
        grid: String,
    },
    /// Drift velocity against B with A = 1 − B at fixed φ.
    SweepB {
        /// `start:stop:count`, endpoints included.
        #[arg(long)]
        grid: String,
        /// Also run a φ-sweep at every B and tabulate σ_v(B).
        #[arg(long)]
        phi_grid: Option<String>,
    },
    /// Rectified displacement of the damped driven atom against A and B.
    OracleMixing {
        /// Viscous damping rate.
        #[arg(long, default_value_t = 5.0)]
        gamma_damp: f64,
        /// Modulation depth used for the oracle (small-drive regime).
        #[arg(long, default_value_t = 0.5)]
        alpha0: f64,
        /// Amplitude grid `start:stop:count`, log-spaced.
        #[arg(long, default_value = "0.01:0.1:6")]
        amps: String,
        /// Value of the amplitude held fixed.
        #[arg(long, default_value_t = 0.1)]
        fixed: f64,
    },
    /// Analytic symmetry predicates against grid sampling of the force.
    CheckSymmetry {
        /// Additional randomly drawn drive parameter sets.
        #[arg(long, default_value_t = 0)]
        random: usize,
        /// Sampling grid size.
        #[arg(long, default_value_t = 1000)]
        n: usize,
    },
}

/// Inclusive linear grid from `start:stop:count`.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || {
        Error::invalid(format!(
            "grid `{text}` must be start:stop:count with count >= 2"
        ))
    };
    let [start, stop, count] = parts.as_slice() else {
        return Err(bad());
    };
    let start: f64 = start.trim().parse().map_err(|_| bad())?;
    let stop: f64 = stop.trim().parse().map_err(|_| bad())?;
    let count: usize = count.trim().parse().map_err(|_| bad())?;
    if count < 2 || !start.is_finite() || !stop.is_finite() {
        return Err(bad());
    }
    Ok((0..count)
        .map(|i| start + (stop - start) * i as f64 / (count - 1) as f64)
        .collect())
}

fn log_grid(text: &str) -> Result<Vec<f64>> {
    let lin = parse_grid(text)?;
    let (a, b) = (lin[0], lin[lin.len() - 1]);
    if a <= 0.0 || b <= 0.0 {
        return Err(Error::invalid(format!(
            "log grid `{text}` needs positive endpoints"
        )));
    }
    let n = lin.len();
    Ok((0..n)
        .map(|i| a * (b / a).powf(i as f64 / (n - 1) as f64))
        .collect())
}

/// Rewrites `--key=value` for parameter keys into `--set key=value`.
pub fn normalize_args<I: IntoIterator<Item = OsString>>(args: I) -> Vec<OsString> {
    args.into_iter()
        .flat_map(|arg| {
            let s = arg.to_string_lossy();
            if let Some((key, value)) = s.strip_prefix("--").and_then(|r| r.split_once('=')) {
                if key != "seed" && KEYS.contains(&key) {
                    return vec![
                        OsString::from("--set"),
                        OsString::from(format!("{key}={value}")),
                    ];
                }
            }
            vec![arg]
        })
        .collect()
}

fn load_params(global: &GlobalArgs) -> Result<SimParams> {
    let mut map = match &global.config {
        Some(path) => ConfigMap::load(path)?,
        None => ConfigMap::default(),
    };
    for o in &global.overrides {
        map.set(o)?;
    }
    let mut params = map.to_params()?;
    if let Some(seed) = global.seed {
        params.seed = seed;
    }
    params.validate()
}

fn run_options(global: &GlobalArgs) -> RunOptions {
    RunOptions {
        workers: global.workers,
        ..Default::default()
    }
}

struct Context<'a> {
    global: &'a GlobalArgs,
    params: SimParams,
    started: Instant,
    command: &'static str,
}

impl Context<'_> {
    fn finish(
        &self,
        mut outputs: OutputSet,
        name: &str,
        extra: Vec<(String, String)>,
    ) -> Result<Vec<PathBuf>> {
        let manifest_path = self.global.out.join(name);
        let mut listed = outputs.paths().to_vec();
        listed.push(manifest_path);
        let manifest = RunManifest {
            params: self.params.clone(),
            command: self.command.to_string(),
            wall_clock: self.started.elapsed(),
            outputs: listed,
            extra,
        };
        outputs.write(name, &manifest.render())?;
        Ok(outputs.commit())
    }
}

fn cmd_run(ctx: &Context) -> Result<Vec<PathBuf>> {
    let params = &ctx.params;
    let res = run_ensemble_with(params, &run_options(ctx.global))?;
    let fit = fit_after_transient(&res, params)?;
    let mut out = OutputSet::new(&ctx.global.out)?;
    out.write("cm_series.csv", &cm_table(params, &res))?;
    out.write(
        "cm_series.dat",
        &two_column("t", "cm", &res.cm_times, &res.cm_positions),
    )?;
    println!(
        "v = {} +- {} (units of v_r)",
        fmt_num(fit.v),
        fmt_num(fit.v_err)
    );
    ctx.finish(
        out,
        "run_manifest.txt",
        vec![
            ("v".into(), fmt_num(fit.v)),
            ("v_err".into(), fmt_num(fit.v_err)),
        ],
    )
}

fn write_sweep(ctx: &Context, out: &mut OutputSet, sweep: &SweepResult) -> Result<String> {
    let stem = format!("sweep_{}", sweep.param);
    out.write(&format!("{stem}.csv"), &sweep_table(&ctx.params, sweep))?;
    out.write(
        &format!("{stem}.dat"),
        &two_column(
            &sweep.param.to_string(),
            "v",
            &sweep.values,
            &sweep.velocities(),
        ),
    )?;
    let sigma = sweep.sigma_v.map(fmt_num).unwrap_or_else(|| "nan".into());
    out.write(
        &format!("{stem}_sigma_v.txt"),
        &format!("sigma_v = {sigma}\n"),
    )?;
    println!("sigma_v = {sigma}");
    Ok(sigma)
}

fn cmd_sweep_phi(ctx: &Context, grid: &[f64]) -> Result<Vec<PathBuf>> {
    let sweep = phase_sweep_with(&ctx.params, grid, &run_options(ctx.global))?;
    let mut out = OutputSet::new(&ctx.global.out)?;
    let sigma = write_sweep(ctx, &mut out, &sweep)?;
    ctx.finish(
        out,
        "sweep_phi_manifest.txt",
        vec![("sigma_v".into(), sigma)],
    )
}

fn cmd_sweep_b(ctx: &Context, grid: &[f64], phi_grid: Option<&[f64]>) -> Result<Vec<PathBuf>> {
    let opts = run_options(ctx.global);
    let sweep = b_sweep_with(&ctx.params, grid, &opts)?;
    let mut out = OutputSet::new(&ctx.global.out)?;
    let sigma = write_sweep(ctx, &mut out, &sweep)?;
    if let Some(phis) = phi_grid {
        let curves = sigma_v_vs_b(&ctx.params, grid, phis, &opts)?;
        let mut table = crate::output::header_block(&ctx.params);
        table.push_str("b,sigma_v\n");
        let mut ys = Vec::new();
        for (b, s) in &curves {
            let sv = s.sigma_v.unwrap_or(f64::NAN);
            ys.push(sv);
            table.push_str(&format!("{},{}\n", fmt_num(*b), fmt_num(sv)));
        }
        out.write("sigma_v_vs_b.csv", &table)?;
        out.write("sigma_v_vs_b.dat", &two_column("b", "sigma_v", grid, &ys))?;
    }
    ctx.finish(out, "sweep_b_manifest.txt", vec![("sigma_v".into(), sigma)])
}

fn cmd_oracle_mixing(
    ctx: &Context,
    gamma_damp: f64,
    alpha0: f64,
    amps: &[f64],
    fixed: f64,
) -> Result<Vec<PathBuf>> {
    let base = DriveParams {
        alpha0,
        a_amp: fixed,
        b_amp: fixed,
        ..ctx.params.drive
    };
    let u0 = ctx.params.lattice.u0;
    let mut out = OutputSet::new(&ctx.global.out)?;
    let mut extra = Vec::new();
    for (vary, name) in [(Amplitude::A, "a"), (Amplitude::B, "b")] {
        let scan = mixing_scan(u0, gamma_damp, &base, vary, amps)?;
        let dz: Vec<f64> = scan.iter().map(|r| r.delta_z).collect();
        let slope = loglog_slope(amps, &dz);
        let mut table = format!(
            "# {}\n# u0 = {u0}\n# omega = {}\n# phi = {}\n# alpha0 = {alpha0}\n# gamma_damp = {gamma_damp}\n# fixed_amplitude = {fixed}\n# loglog_slope = {}\n{name},delta_z\n",
            crate::output::VERSION,
            base.omega,
            base.phi,
            fmt_num(slope)
        );
        for (x, y) in amps.iter().zip(&dz) {
            table.push_str(&format!("{},{}\n", fmt_num(*x), fmt_num(*y)));
        }
        out.write(&format!("mixing_{name}.csv"), &table)?;
        println!("slope in {} = {}", name.to_uppercase(), fmt_num(slope));
        extra.push((format!("slope_{name}"), fmt_num(slope)));
    }
    ctx.finish(out, "oracle_mixing_manifest.txt", extra)
}

/// Grid-sampled violations of both symmetries for one drive.
pub fn symmetry_row(d: &DriveParams, n: usize) -> (bool, f64, bool, f64) {
    let f = |t| inertial_force(t, d, MASS);
    let shift = sample_symmetry(f, fundamental_period(d), Symmetry::Shift, n);
    let reversal = sample_symmetry(f, d.period(), Symmetry::Reversal, n);
    (
        shift_symmetry_holds(d),
        shift,
        time_reversal_symmetry_holds(d),
        reversal,
    )
}

/// Whether a sampled violation counts as "zero" for a drive of this scale.
pub fn negligible(violation: f64, d: &DriveParams) -> bool {
    violation <= 1e-9 * force_scale(d, MASS).max(f64::MIN_POSITIVE)
}

/// Random drive parameters that hit the symmetric special cases often.
pub fn random_drive<R: Rng + ?Sized>(rng: &mut R) -> DriveParams {
    let pick = |rng: &mut R, special: f64, lo: f64, hi: f64| {
        if rng.random::<f64>() < 0.25 {
            special
        } else {
            rng.random_range(lo..hi)
        }
    };
    let phi = if rng.random::<f64>() < 0.3 {
        rng.random_range(-3i32..=3) as f64 * std::f64::consts::PI
    } else {
        rng.random_range(-TAU..TAU)
    };
    DriveParams {
        alpha0: pick(rng, 0.0, 0.1, 12.0),
        a_amp: pick(rng, 0.0, 0.05, 1.5),
        b_amp: pick(rng, 0.0, 0.05, 1.5),
        omega: rng.random_range(1.0..40.0),
        phi,
    }
}

fn cmd_check_symmetry(ctx: &Context, random: usize, n: usize) -> Result<Vec<PathBuf>> {
    if n < 2 {
        return Err(Error::invalid("symmetry grid needs n >= 2"));
    }
    let mut drives = vec![ctx.params.drive];
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.params.seed);
    drives.extend((0..random).map(|_| random_drive(&mut rng)));

    let mut table = format!(
        "# {}\n# grid = {n}\nalpha0,a_amp,b_amp,omega,phi,shift_predicate,shift_violation,reversal_predicate,reversal_violation,agree\n",
        crate::output::VERSION
    );
    let mut mismatches = 0;
    for d in &drives {
        let (sp, sv, rp, rv) = symmetry_row(d, n);
        let agree = sp == negligible(sv, d) && rp == negligible(rv, d);
        if !agree {
            mismatches += 1;
        }
        table.push_str(&format!(
            "{},{},{},{},{},{sp},{},{rp},{},{agree}\n",
            fmt_num(d.alpha0),
            fmt_num(d.a_amp),
            fmt_num(d.b_amp),
            fmt_num(d.omega),
            fmt_num(d.phi),
            fmt_num(sv),
            fmt_num(rv)
        ));
    }
    let mut out = OutputSet::new(&ctx.global.out)?;
    out.write("symmetry.csv", &table)?;
    println!("{} drives checked, {mismatches} mismatches", drives.len());
    if mismatches > 0 {
        return Err(Error::Check(format!(
            "{mismatches} symmetry predicate mismatches"
        )));
    }
    ctx.finish(
        out,
        "check_symmetry_manifest.txt",
        vec![("mismatches".into(), mismatches.to_string())],
    )
}

fn execute(cli: &Cli) -> Result<Vec<PathBuf>> {
    // grids are checked before any parameter loading or computation
    let grids = match &cli.command {
        Command::SweepPhi { grid } => Some((parse_grid(grid)?, None)),
        Command::SweepB { grid, phi_grid } => Some((
            parse_grid(grid)?,
            phi_grid.as_deref().map(parse_grid).transpose()?,
        )),
        _ => None,
    };
    let params = load_params(&cli.global)?;
    let command = match &cli.command {
        Command::Run => "run",
        Command::SweepPhi { .. } => "sweep-phi",
        Command::SweepB { .. } => "sweep-b",
        Command::OracleMixing { .. } => "oracle-mixing",
        Command::CheckSymmetry { .. } => "check-symmetry",
    };
    let ctx = Context {
        global: &cli.global,
        params,
        started: Instant::now(),
        command,
    };
    match (&cli.command, grids) {
        (Command::Run, _) => cmd_run(&ctx),
        (Command::SweepPhi { .. }, Some((grid, _))) => cmd_sweep_phi(&ctx, &grid),
        (Command::SweepB { .. }, Some((grid, phis))) => cmd_sweep_b(&ctx, &grid, phis.as_deref()),
        (
            Command::OracleMixing {
                gamma_damp,
                alpha0,
                amps,
                fixed,
            },
            _,
        ) => cmd_oracle_mixing(&ctx, *gamma_damp, *alpha0, &log_grid(amps)?, *fixed),
        (Command::CheckSymmetry { random, n }, _) => cmd_check_symmetry(&ctx, *random, *n),
        _ => unreachable!("grids are parsed for every sweep command"),
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// status.
pub fn run<I: IntoIterator<Item = OsString>>(args: I) -> i32 {
    let cli = match Cli::try_parse_from(normalize_args(args)) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("usage error");
            eprintln!("error[usage]: {}", first.trim_start_matches("error: "));
            return 2;
        }
    };
    match execute(&cli) {
        Ok(paths) => {
            for p in paths {
                println!("wrote {}", p.display());
            }
            0
        }
        Err(e) => {
            let (kind, code) = if e.is_validation() {
                ("validation", 2)
            } else {
                ("runtime", 3)
            };
            eprintln!("error[{kind}]: {}", e.to_string().replace('\n', " "));
            code
        }
    }
}
