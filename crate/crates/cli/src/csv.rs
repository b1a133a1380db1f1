//! CSV emission. Every file starts with a `#` comment recording the resolved
//! configuration, then a header row. Floats are printed with 17 significant
//! digits so identical configurations produce bit-identical files.

use epqn_core::diagnostics::ApMetrics;
use epqn_core::error::{Error, Result};
use epqn_core::physics::{velocity, PlasmaState};
use std::fmt::Write as _;
use std::path::Path;

pub fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)
            .map_err(|e| Error::config(format!("cannot create '{}': {e}", parent.display())))?;
    }
    std::fs::write(path, contents)
        .map_err(|e| Error::config(format!("cannot write '{}': {e}", path.display())))
}

/// Metrics time series: one row per recorded step.
pub fn metrics_csv(config_line: &str, metrics: &[ApMetrics<f64>]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# config: {config_line}");
    let _ = writeln!(
        out,
        "t,dev_rho_l2,dev_rho_linf,div_u_l2,div_u_linf,phi_l2,phi_linf,mass,dt"
    );
    for m in metrics {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            fmt(m.t),
            fmt(m.dev_rho_l2),
            fmt(m.dev_rho_linf),
            fmt(m.div_u_l2),
            fmt(m.div_u_linf),
            fmt(m.phi_l2),
            fmt(m.phi_linf),
            fmt(m.mass),
            fmt(m.dt)
        );
    }
    out
}

/// Field snapshot: coordinates, density, momentum, velocity, potential per
/// cell.
pub fn fields_csv(config_line: &str, state: &PlasmaState<f64>) -> Result<String> {
    let mesh = state.mesh().clone();
    let d = mesh.dim();
    let u = velocity(state).ok();
    let mut out = String::new();
    let _ = writeln!(out, "# config: {config_line}");
    let coords: Vec<&str> = ["x1", "x2"][..d].to_vec();
    let qs: Vec<&str> = ["q1", "q2"][..d].to_vec();
    let us: Vec<&str> = ["u1", "u2"][..d].to_vec();
    let _ = writeln!(
        out,
        "{},rho,{},{},phi",
        coords.join(","),
        qs.join(","),
        us.join(",")
    );
    for k in 0..mesh.cells() {
        let x = mesh.coords(k);
        for xm in &x {
            let _ = write!(out, "{},", fmt(*xm));
        }
        let _ = write!(out, "{}", fmt(state.rho[k]));
        for m in 0..d {
            let _ = write!(out, ",{}", fmt(state.q.comp(m)[k]));
        }
        for m in 0..d {
            let v = u.as_ref().map(|u| u.comp(m)[k]).unwrap_or(f64::NAN);
            let _ = write!(out, ",{}", fmt(v));
        }
        let _ = writeln!(out, ",{}", fmt(state.phi[k]));
    }
    Ok(out)
}
