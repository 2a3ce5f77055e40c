//! Delimited-text result files and run manifests.
//!
//! Every table starts with a `#` comment block echoing the parameters and
//! seed, then a header row, then rows of numbers printed with nine
//! significant digits. Nothing in a table depends on wall-clock time or on
//! the number of workers, so reruns can be compared byte for byte.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use crate::analysis::SweepResult;
use crate::config::to_config_text;
use crate::ensemble::EnsembleResult;
use crate::error::{Error, Result};
use crate::units::SimParams;

pub const VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

/// Nine significant digits, locale independent.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.8e}")
}

/// Comment block identifying the code version and every parameter.
pub fn header_block(params: &SimParams) -> String {
    let mut out = format!("# {VERSION}\n");
    for line in to_config_text(params).lines() {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    out
}

/// Files written so far by one command. Unless [`OutputSet::commit`] is
/// called, dropping the set deletes them.
#[derive(Debug)]
pub struct OutputSet {
    dir: PathBuf,
    written: Vec<PathBuf>,
    committed: bool,
}

impl OutputSet {
    pub fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        Ok(OutputSet {
            dir: dir.to_path_buf(),
            written: Vec::new(),
            committed: false,
        })
    }

    pub fn paths(&self) -> &[PathBuf] {
        &self.written
    }

    /// Writes `contents` to `name` inside the output directory, going through
    /// a temporary file so a failed write never leaves a partial file.
    pub fn write(&mut self, name: &str, contents: &str) -> Result<PathBuf> {
        let path = self.dir.join(name);
        let tmp = self.dir.join(format!(".{name}.partial"));
        let result = fs::File::create(&tmp)
            .and_then(|mut f| f.write_all(contents.as_bytes()).and_then(|_| f.sync_all()))
            .and_then(|_| fs::rename(&tmp, &path));
        if let Err(e) = result {
            let _ = fs::remove_file(&tmp);
            return Err(Error::io(&path, e));
        }
        if !self.written.contains(&path) {
            self.written.push(path.clone());
        }
        Ok(path)
    }

    pub fn commit(mut self) -> Vec<PathBuf> {
        self.committed = true;
        std::mem::take(&mut self.written)
    }
}

impl Drop for OutputSet {
    fn drop(&mut self) {
        if !self.committed {
            for p in &self.written {
                let _ = fs::remove_file(p);
            }
        }
    }
}

/// `t,cm,stderr` table of an ensemble run.
pub fn cm_table(params: &SimParams, res: &EnsembleResult) -> String {
    let mut out = header_block(params);
    out.push_str("t,cm,stderr\n");
    for ((t, cm), se) in res
        .cm_times
        .iter()
        .zip(&res.cm_positions)
        .zip(&res.cm_stderr)
    {
        out.push_str(&format!(
            "{},{},{}\n",
            fmt_num(*t),
            fmt_num(*cm),
            fmt_num(*se)
        ));
    }
    out
}

/// `<param>,v,v_err,status` table; status is `symmetric` when |v| < 3 v_err.
pub fn sweep_table(base: &SimParams, sweep: &SweepResult) -> String {
    let mut out = header_block(base);
    out.push_str(&format!("# swept = {}\n", sweep.param));
    out.push_str(&format!("{},v,v_err,status\n", sweep.param));
    for (x, fit) in sweep.values.iter().zip(&sweep.fits) {
        let status = if fit.consistent_with_zero() {
            "symmetric"
        } else {
            "directed"
        };
        out.push_str(&format!(
            "{},{},{},{status}\n",
            fmt_num(*x),
            fmt_num(fit.v),
            fmt_num(fit.v_err)
        ));
    }
    out
}

/// Whitespace-separated two-column curve.
pub fn two_column(label_x: &str, label_y: &str, xs: &[f64], ys: &[f64]) -> String {
    let mut out = format!("# {label_x} {label_y}\n");
    for (x, y) in xs.iter().zip(ys) {
        out.push_str(&format!("{} {}\n", fmt_num(*x), fmt_num(*y)));
    }
    out
}

/// Record of one command invocation. The body is a valid config file that
/// reproduces the run; provenance goes in comments.
#[derive(Debug, Clone)]
pub struct RunManifest {
    pub params: SimParams,
    pub command: String,
    pub wall_clock: Duration,
    pub outputs: Vec<PathBuf>,
    pub extra: Vec<(String, String)>,
}

impl RunManifest {
    pub fn render(&self) -> String {
        let mut out = format!("# {VERSION}\n# command = {}\n", self.command);
        out.push_str(&format!(
            "# wall_clock_seconds = {:.3}\n",
            self.wall_clock.as_secs_f64()
        ));
        out.push_str(&format!("# master_seed = {}\n", self.params.seed));
        for (k, v) in &self.extra {
            out.push_str(&format!("# {k} = {v}\n"));
        }
        for p in &self.outputs {
            out.push_str(&format!("# output = {}\n", p.display()));
        }
        out.push_str(&to_config_text(&self.params));
        out
    }
}
