//! Flat `key = value` parameter files.
//!
//! Blank lines and lines starting with `#` are ignored; a later assignment
//! of a key overrides an earlier one. Keys not given fall back to
//! [`SimParams::operating_point`], with `omega`, `dt`, `t_total` and
//! `t_transient` recomputed from whatever depth and frequency were set.
//!
//! | key | meaning |
//! |---|---|
//! | `u0` | well depth (E_r) |
//! | `light_shift` | light shift per beam Δ0' (ω_r); sets `u0 = 2/3 |Δ0'|` |
//! | `gamma0` | pumping-rate scale (ω_r) |
//! | `recoil_kick` | `true` / `false` |
//! | `alpha0`, `a_amp`, `b_amp` | modulation depth and harmonic amplitudes |
//! | `omega` | drive frequency (ω_r) |
//! | `omega_rel` | drive frequency in units of Ω_v |
//! | `phi` | relative phase (rad) |
//! | `dt`, `t_total`, `t_transient`, `sample_interval` | times (1/ω_r) |
//! | `n_traj`, `seed` | ensemble size and master seed |
//! | `initial_spread` | `z_width,p_width` |
//!
//! Time values also accept `<x>T` (x drive periods) and `T/<n>`. Phases
//! accept `<x>pi` and `pi/<n>`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::units::{InitialSpread, LatticeParams, SimParams};

pub const KEYS: &[&str] = &[
    "u0",
    "light_shift",
    "gamma0",
    "recoil_kick",
    "alpha0",
    "a_amp",
    "b_amp",
    "omega",
    "omega_rel",
    "phi",
    "dt",
    "t_total",
    "t_transient",
    "sample_interval",
    "n_traj",
    "seed",
    "initial_spread",
];

/// Ordered key/value assignments, each remembering where it came from.
#[derive(Debug, Clone, Default)]
pub struct ConfigMap {
    entries: BTreeMap<String, (String, Origin)>,
}

#[derive(Debug, Clone)]
struct Origin {
    path: PathBuf,
    line: usize,
}

impl ConfigMap {
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut map = ConfigMap::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Config {
                path: path.to_path_buf(),
                line: i + 1,
                msg: format!("expected `key = value`, got `{line}`"),
            })?;
            map.insert_at(key.trim(), value.trim(), path, i + 1)?;
        }
        Ok(map)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config {
            path: path.to_path_buf(),
            line: 0,
            msg: format!("cannot read config: {e}"),
        })?;
        Self::parse(&text, path)
    }

    fn insert_at(&mut self, key: &str, value: &str, path: &Path, line: usize) -> Result<()> {
        if !KEYS.contains(&key) {
            return Err(Error::Config {
                path: path.to_path_buf(),
                line,
                msg: format!("unknown key `{key}`"),
            });
        }
        self.entries.insert(
            key.to_string(),
            (
                value.to_string(),
                Origin {
                    path: path.to_path_buf(),
                    line,
                },
            ),
        );
        Ok(())
    }

    /// Applies a `key=value` override from the command line.
    pub fn set(&mut self, assignment: &str) -> Result<()> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| Error::invalid(format!("override `{assignment}` is not key=value")))?;
        self.insert_at(key.trim(), value.trim(), Path::new("<command line>"), 0)
    }

    fn get(&self, key: &str) -> Option<(&str, &Origin)> {
        self.entries.get(key).map(|(v, o)| (v.as_str(), o))
    }

    fn error(origin: &Origin, msg: String) -> Error {
        Error::Config {
            path: origin.path.clone(),
            line: origin.line,
            msg,
        }
    }

    fn number(&self, key: &str) -> Result<Option<f64>> {
        self.get(key)
            .map(|(v, o)| {
                v.parse::<f64>()
                    .map_err(|_| Self::error(o, format!("{key}: `{v}` is not a number")))
            })
            .transpose()
    }

    fn phase(&self, key: &str) -> Result<Option<f64>> {
        self.get(key)
            .map(|(v, o)| {
                parse_phase(v).ok_or_else(|| Self::error(o, format!("{key}: `{v}` is not a phase")))
            })
            .transpose()
    }

    fn time(&self, key: &str, period: f64) -> Result<Option<f64>> {
        self.get(key)
            .map(|(v, o)| {
                parse_time(v, period)
                    .ok_or_else(|| Self::error(o, format!("{key}: `{v}` is not a time")))
            })
            .transpose()
    }

    fn integer(&self, key: &str) -> Result<Option<u64>> {
        self.get(key)
            .map(|(v, o)| {
                v.parse::<u64>()
                    .map_err(|_| Self::error(o, format!("{key}: `{v}` is not an integer")))
            })
            .transpose()
    }

    /// Resolves the assignments into parameters (not yet validated).
    pub fn to_params(&self) -> Result<SimParams> {
        let mut p = SimParams::operating_point();

        if let Some(shift) = self.number("light_shift")? {
            p.lattice.u0 = LatticeParams::depth_from_light_shift(shift);
        }
        if let Some(u0) = self.number("u0")? {
            p.lattice.u0 = u0;
        }
        if let Some(g) = self.number("gamma0")? {
            p.lattice.gamma0 = g;
        }
        if let Some((v, o)) = self.get("recoil_kick") {
            p.lattice.recoil_kick = match v {
                "true" | "1" | "yes" => true,
                "false" | "0" | "no" => false,
                _ => {
                    return Err(Self::error(
                        o,
                        format!("recoil_kick: `{v}` is not a boolean"),
                    ))
                }
            };
        }

        let omega_v = p.lattice.vibrational_frequency();
        p.drive.omega = 0.87 * omega_v;
        if let Some(rel) = self.number("omega_rel")? {
            p.drive.omega = rel * omega_v;
        }
        if let Some(w) = self.number("omega")? {
            p.drive.omega = w;
        }
        for (key, slot) in [
            ("alpha0", &mut p.drive.alpha0),
            ("a_amp", &mut p.drive.a_amp),
            ("b_amp", &mut p.drive.b_amp),
        ] {
            if let Some(x) = self.number(key)? {
                *slot = x;
            }
        }
        if let Some(phi) = self.phase("phi")? {
            p.drive.phi = phi;
        }

        let period = p.drive.period();
        p.dt = self.time("dt", period)?.unwrap_or(period / 128.0);
        p.t_total = self.time("t_total", period)?.unwrap_or(1000.0 * period);
        p.t_transient = self.time("t_transient", period)?.unwrap_or(0.2 * p.t_total);
        p.sample_interval = self.time("sample_interval", period)?;

        if let Some(n) = self.integer("n_traj")? {
            p.n_traj = n as usize;
        }
        if let Some(seed) = self.integer("seed")? {
            p.seed = seed;
        }
        if let Some((v, o)) = self.get("initial_spread") {
            let parts: Vec<&str> = v.split(',').map(str::trim).collect();
            let parsed: Option<Vec<f64>> = parts.iter().map(|s| s.parse().ok()).collect();
            match parsed.as_deref() {
                Some(&[z_width, p_width]) => p.initial_spread = InitialSpread { z_width, p_width },
                _ => {
                    return Err(Self::error(
                        o,
                        format!("initial_spread: expected `z_width,p_width`, got `{v}`"),
                    ))
                }
            }
        }
        Ok(p)
    }
}

fn parse_time(value: &str, period: f64) -> Option<f64> {
    if let Some(n) = value.strip_prefix("T/") {
        return n.trim().parse::<f64>().ok().map(|n| period / n);
    }
    if let Some(x) = value.strip_suffix('T') {
        let x = x.trim();
        return if x.is_empty() {
            Some(period)
        } else {
            x.parse::<f64>().ok().map(|x| x * period)
        };
    }
    value.parse().ok()
}

fn parse_phase(value: &str) -> Option<f64> {
    use std::f64::consts::PI;
    if let Some(n) = value.strip_prefix("pi/") {
        return n.trim().parse::<f64>().ok().map(|n| PI / n);
    }
    if let Some(x) = value.strip_suffix("pi") {
        let x = x.trim().trim_end_matches('*');
        return if x.is_empty() {
            Some(PI)
        } else {
            x.parse::<f64>().ok().map(|x| x * PI)
        };
    }
    value.parse().ok()
}

/// Serialises parameters as a config that reproduces them exactly.
pub fn to_config_text(p: &SimParams) -> String {
    let mut out = String::new();
    let mut line = |k: &str, v: String| {
        let _ = writeln!(out, "{k} = {v}");
    };
    line("u0", format!("{}", p.lattice.u0));
    line("gamma0", format!("{}", p.lattice.gamma0));
    line("recoil_kick", format!("{}", p.lattice.recoil_kick));
    line("alpha0", format!("{}", p.drive.alpha0));
    line("a_amp", format!("{}", p.drive.a_amp));
    line("b_amp", format!("{}", p.drive.b_amp));
    line("omega", format!("{}", p.drive.omega));
    line("phi", format!("{}", p.drive.phi));
    line("dt", format!("{}", p.dt));
    line("t_total", format!("{}", p.t_total));
    line("t_transient", format!("{}", p.t_transient));
    if let Some(s) = p.sample_interval {
        line("sample_interval", format!("{s}"));
    }
    line("n_traj", format!("{}", p.n_traj));
    line("seed", format!("{}", p.seed));
    line(
        "initial_spread",
        format!("{},{}", p.initial_spread.z_width, p.initial_spread.p_width),
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn parse(text: &str) -> Result<SimParams> {
        ConfigMap::parse(text, Path::new("test.cfg"))?.to_params()
    }

    #[test]
    fn empty_config_is_operating_point() {
        assert_eq!(parse("").unwrap(), SimParams::operating_point());
    }

    #[test]
    fn period_units_and_phase_forms() {
        let p =
            parse("u0 = 75\nomega_rel = 0.87\nt_total = 500T\ndt = T/200\nphi = pi/2\n").unwrap();
        let period = p.drive.period();
        assert!((p.drive.omega - 0.87 * 2.0 * 150f64.sqrt()).abs() < 1e-12);
        assert!((p.t_total - 500.0 * period).abs() < 1e-12);
        assert!((p.dt - period / 200.0).abs() < 1e-15);
        assert!((p.t_transient - 100.0 * period).abs() < 1e-12);
        assert_eq!(p.drive.phi, PI / 2.0);
        assert_eq!(parse("phi = 1.5pi").unwrap().drive.phi, 1.5 * PI);
    }

    #[test]
    fn light_shift_sets_depth() {
        let p = parse("light_shift = -150").unwrap();
        assert!((p.lattice.u0 - 100.0).abs() < 1e-12);
    }

    #[test]
    fn errors_name_location() {
        let err = parse("# c\nu0 = abc\n").unwrap_err().to_string();
        assert!(err.contains("test.cfg") && err.contains("line 2"), "{err}");
        let err = parse("bogus = 1").unwrap_err().to_string();
        assert!(err.contains("unknown key"), "{err}");
        let err = parse("no equals sign").unwrap_err().to_string();
        assert!(err.contains("key = value"), "{err}");
    }

    #[test]
    fn override_wins() {
        let mut map = ConfigMap::parse("seed = 3\nn_traj = 10", Path::new("x")).unwrap();
        map.set("seed=7").unwrap();
        let p = map.to_params().unwrap();
        assert_eq!(p.seed, 7);
        assert_eq!(p.n_traj, 10);
        assert!(map.set("nonsense").is_err());
    }

    #[test]
    fn serialised_config_round_trips() {
        let mut p = SimParams::operating_point();
        p.drive.phi = 0.1 + 2.0 / 3.0;
        p.sample_interval = Some(0.37);
        p.initial_spread.p_width = 1.25;
        let text = to_config_text(&p);
        assert_eq!(parse(&text).unwrap(), p);
    }

    #[test]
    fn missing_file_names_path() {
        let err = ConfigMap::load(Path::new("/nonexistent/run.cfg")).unwrap_err();
        assert!(err.is_validation());
        assert!(err.to_string().contains("/nonexistent/run.cfg"));
    }
}
