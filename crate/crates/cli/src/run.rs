//! `run <file>`: integrate a scenario and export its monitors.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use bsd_kuramoto_core::dynamics::integrate_ensemble;

use crate::export::{gnuplot_stub, write_csv, write_snapshots};
use crate::scenario::Scenario;
use crate::CliError;

#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    pub force: bool,
    pub gnuplot_stub: bool,
}

fn claim(path: &Path, field: &str, force: bool) -> Result<(), CliError> {
    if path.exists() && !force {
        return Err(CliError::Config {
            field: field.into(),
            message: format!("{} already exists; pass --force to overwrite", path.display()),
        });
    }
    Ok(())
}

/// Runs the scenario at `path`. Without an `outputs.csv` entry the series is written to `stdout`.
pub fn run(path: &Path, opts: RunOptions, stdout: &mut dyn Write) -> Result<(), CliError> {
    let p = Scenario::load(path)?;
    let csv_path = p.scenario.outputs.csv.as_deref().map(|s| p.resolve(s));
    let snap_path = p.scenario.outputs.snapshots.as_deref().map(|s| p.resolve(s));
    let gp_path: Option<PathBuf> = if opts.gnuplot_stub {
        let csv = csv_path.as_ref().ok_or_else(|| CliError::Config {
            field: "outputs.csv".into(),
            message: "--gnuplot-stub needs the series written to a file".into(),
        })?;
        Some(csv.with_extension("gp"))
    } else {
        None
    };
    for (path, field) in [(&csv_path, "outputs.csv"), (&snap_path, "outputs.snapshots"), (&gp_path, "--gnuplot-stub")] {
        if let Some(path) = path {
            claim(path, field, opts.force)?;
        }
    }

    let traj = integrate_ensemble(&p.model, &p.init, &p.config)?;

    match &csv_path {
        Some(path) => write_csv(&traj, BufWriter::new(File::create(path)?))?,
        None => write_csv(&traj, &mut *stdout)?,
    }
    if let Some(path) = &snap_path {
        write_snapshots(&traj, BufWriter::new(File::create(path)?))?;
    }
    if let (Some(gp), Some(csv)) = (&gp_path, &csv_path) {
        let name = csv.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        std::fs::write(gp, gnuplot_stub(&name))?;
    }
    if let Some(path) = &csv_path {
        writeln!(stdout, "wrote {} rows to {}", traj.times.len(), path.display())?;
    }
    Ok(())
}
