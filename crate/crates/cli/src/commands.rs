//! The `run` and `optimize` subcommands, independent of argument parsing.

use std::fs;
use std::path::{Path, PathBuf};

use micromaser_core::{convergence_audit, optimize_interaction_time, run_sequence, Error};
use thiserror::Error;

use crate::config::{ConfigError, ConfigFile};
use crate::output;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("simulation failed: {0}")]
    Simulation(#[from] Error),
    #[error("cannot write {path}: {source}")]
    Output {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    /// 2 when the cutoff cannot hold the state, 1 for everything the user
    /// has to fix in the inputs.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Simulation(Error::CutoffTooSmall { .. } | Error::LeakageExceeded { .. }) => 2,
            _ => 1,
        }
    }
}

/// Exit status of a `run` whose outputs were all written.
pub const EXIT_AUDIT_FAILED: i32 = 3;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Output {
        path: path.to_path_buf(),
        source,
    }
}

fn prepare(out_dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub files: Vec<PathBuf>,
    pub audit_pass: bool,
}

impl RunSummary {
    pub fn exit_code(&self) -> i32 {
        if self.audit_pass {
            0
        } else {
            EXIT_AUDIT_FAILED
        }
    }
}

pub fn cmd_run(config: &ConfigFile, out_dir: &Path) -> Result<RunSummary, CliError> {
    let run = config.run_config()?;
    let series = run_sequence(&run)?;
    let audit = convergence_audit(&run);
    prepare(out_dir)?;

    let mut files = Vec::new();
    let mut emit = |name: String, write: &dyn Fn(&Path) -> std::io::Result<()>| {
        let path = out_dir.join(name);
        write(&path).map_err(io_err(&path))?;
        files.push(path);
        Ok::<_, CliError>(())
    };
    emit("series.csv".into(), &|p| output::write_series(p, &series))?;
    for snap in &series.snapshots {
        emit(format!("pn_{}.csv", snap.index), &|p| {
            output::write_distribution(p, &snap.distribution)
        })?;
        if let Some(q) = &snap.q {
            emit(format!("qgrid_{}.csv", snap.index), &|p| {
                output::write_qgrid(p, q)
            })?;
        }
    }
    emit("audit.txt".into(), &|p| output::write_audit(p, &audit))?;
    Ok(RunSummary {
        files,
        audit_pass: audit.pass,
    })
}

pub fn cmd_optimize(config: &ConfigFile, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let run = config.run_config()?;
    let scan = config.tau_scan()?;
    let opt = optimize_interaction_time(&run, &scan)?;
    prepare(out_dir)?;
    let scan_path = out_dir.join("tau_scan.csv");
    output::write_tau_scan(&scan_path, &opt.coarse).map_err(io_err(&scan_path))?;
    let best_path = out_dir.join("best.txt");
    output::write_best(&best_path, &opt).map_err(io_err(&best_path))?;
    Ok(vec![scan_path, best_path])
}
