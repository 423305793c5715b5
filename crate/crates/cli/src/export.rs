//! CSV series, JSONL snapshots and the gnuplot companion script.

use std::io::Write;

use bsd_kuramoto_core::dynamics::Trajectory;
use serde::Serialize;

use crate::scenario::{cmat_to_matrix, Matrix};
use crate::CliError;

pub const CSV_HEADER: [&str; 5] = ["time", "r", "spread", "mean_field_norm", "max_tangency_drift"];

/// 17 significant digits, '.' decimal point, independent of locale.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<W: Write>(traj: &Trajectory, out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for (t, m) in traj.times.iter().zip(&traj.monitors) {
        let o = &m.observables;
        w.write_record([
            fmt_num(*t),
            fmt_num(o.r),
            fmt_num(o.spread),
            fmt_num(o.mean_field_norm),
            fmt_num(m.max_tangency_drift),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct SnapshotLine {
    time: f64,
    oscillators: Vec<Matrix>,
}

/// One ensemble per line: `{"time": t, "oscillators": [[[[re, im], ...], ...], ...]}`.
pub fn write_snapshots<W: Write>(traj: &Trajectory, mut out: W) -> Result<(), CliError> {
    for s in &traj.snapshots {
        let line = SnapshotLine {
            time: s.time,
            oscillators: s.oscillators.iter().map(cmat_to_matrix).collect(),
        };
        serde_json::to_writer(&mut out, &line)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn gnuplot_stub(csv_name: &str) -> String {
    format!(
        "# Companion plot script for {csv_name}.\n\
         # r = |mean of oscillators|_F / sqrt(rank), rank = number of unit singular values on the\n\
         # BS boundary; r = 1 at consensus. mean_field_norm includes the coupling.\n\
         set datafile separator ','\n\
         set key autotitle columnhead\n\
         set xlabel 'time'\n\
         set multiplot layout 2,1\n\
         plot '{csv_name}' using 1:2 with lines, '' using 1:4 with lines\n\
         set logscale y\n\
         plot '{csv_name}' using 1:3 with lines, '' using 1:5 with lines\n\
         unset multiplot\n"
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(fmt_num(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_num(0.0), "0.0000000000000000e0");
        assert_eq!(fmt_num(f64::NAN), "NaN");
        // 17 significant digits round-trip
        let x = 0.123_456_789_012_345_68_f64;
        assert_eq!(fmt_num(x).parse::<f64>().unwrap(), x);
    }
}
