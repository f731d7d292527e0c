//! CSV and JSON emitters.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use super::CliError;
use crate::canon::Flow;
use crate::curvegeo::{curve_samples, Curve};
use crate::odeint::Trajectory;

pub const CSV_HEADER: &str = "t,q,p,re_z,im_z,qdot,pdot,kappa,arclen,energy";

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes one row per trajectory sample. `kappa` is empty where the curve
/// is stationary; `energy` is `Re ℋ`.
pub fn write_csv<W: Write>(
    out: &mut W,
    flow: &Flow,
    traj: &Trajectory,
    curve: Curve,
) -> Result<(), CliError> {
    let geo = curve_samples(flow, traj, curve)?;
    let io = |e: io::Error| CliError::Io {
        path: "<csv>".into(),
        source: e,
    };
    writeln!(out, "{CSV_HEADER}").map_err(io)?;
    for (s, g) in traj.samples().iter().zip(&geo) {
        let energy = flow.value(&s.state)?.re;
        let kappa = g.kappa.map(num).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            num(s.state.t),
            num(s.state.q),
            num(s.state.p),
            num(g.z.re),
            num(g.z.im),
            num(s.rates.qdot),
            num(s.rates.pdot),
            kappa,
            num(g.s),
            num(energy)
        )
        .map_err(io)?;
    }
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Io {
            path: path.display().to_string(),
            source: e,
        })
}

pub fn write_csv_file(
    path: &Path,
    flow: &Flow,
    traj: &Trajectory,
    curve: Curve,
) -> Result<(), CliError> {
    let mut w = create(path)?;
    write_csv(&mut w, flow, traj, curve)?;
    w.flush().map_err(|e| CliError::Io {
        path: path.display().to_string(),
        source: e,
    })
}

/// Pretty JSON to `path`, or to `fallback` when no path is given.
pub fn write_json<T: Serialize, W: Write>(
    value: &T,
    path: Option<&Path>,
    fallback: &mut W,
) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("report types serialize");
    match path {
        Some(p) => {
            let mut w = create(p)?;
            writeln!(w, "{text}")
                .and_then(|_| w.flush())
                .map_err(|e| CliError::Io {
                    path: p.display().to_string(),
                    source: e,
                })
        }
        None => writeln!(fallback, "{text}").map_err(|e| CliError::Io {
            path: "<stdout>".into(),
            source: e,
        }),
    }
}
