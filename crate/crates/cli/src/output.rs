//! Plain-ASCII CSV with a version and config-hash header.
//!
//! Every file starts with `# rmem <version>` and `# config_sha256 <hash>`
//! comment lines, then a column header. Floats carry 17 significant digits.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use raman_memory::dynamics::Trajectory;
use raman_memory::ensemble::ModelComparison;

use crate::config::Normalization;
use crate::error::CliResult;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const OUTPUT_DIR_ENV: &str = "RMEM_OUTPUT_DIR";

pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn header(hash: &str, columns: &[&str]) -> String {
    format!("# rmem {VERSION}\n# config_sha256 {hash}\n{}\n", columns.join(","))
}

pub const TRAJECTORY_COLUMNS: [&str; 8] = [
    "t", "e_in_re", "e_in_im", "e_re", "e_im", "e_out_re", "e_out_im", "spin_norm",
];

/// Trajectory in SI units: time in s, fields in s^-1/2.
pub fn trajectory_csv(traj: &Trajectory, norm: &Normalization, hash: &str) -> String {
    let mut out = header(hash, &TRAJECTORY_COLUMNS);
    let f = 1.0 / norm.field_scale;
    for i in 0..traj.len() {
        let (a, e, b) = (traj.input[i] * f, traj.cavity[i] * f, traj.output[i] * f);
        let row = [
            traj.times[i] * norm.time_unit_s,
            a.re,
            a.im,
            e.re,
            e.im,
            b.re,
            b.im,
            traj.spin_norm[i],
        ];
        push_row(&mut out, &row);
    }
    out
}

pub fn residual_csv(report: &ModelComparison, mode_times: &[f64], norm: &Normalization, hash: &str) -> String {
    let mut out = header(hash, &["t_q", "residual"]);
    for (t, r) in mode_times.iter().zip(&report.mode_residuals) {
        push_row(&mut out, &[t * norm.time_unit_s, *r]);
    }
    out
}

pub fn push_row(out: &mut String, row: &[f64]) {
    let cells: Vec<String> = row.iter().map(|&x| float(x)).collect();
    let _ = writeln!(out, "{}", cells.join(","));
}

/// `--out`, then the config's `output.dir`, then `$RMEM_OUTPUT_DIR`, then `.`.
pub fn resolve_dir(cli: Option<&Path>, config: Option<&Path>) -> PathBuf {
    cli.or(config)
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

pub fn write(dir: &Path, name: &str, contents: &str) -> CliResult<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, contents)?;
    Ok(path)
}
