//! Plain-text output files. Numbers are written with 17 significant digits so
//! files round-trip bit-exactly.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use nlheat::compare::ComparisonReport;
use nlheat::convergence::ConvergenceStudy;
use nlheat::{Coupling, Grid1D, RunReport, Snapshot, StepStats};

pub const PROFILE_HEADER: &str = "x,temperature,diffusivity";

pub fn profile_file_name(scheme: Coupling, dt: f64, time: f64) -> String {
    format!("{}_dt{}_t{}.csv", scheme.slug(), dt, time)
}

pub fn format_profile(grid: &Grid1D, snapshot: &Snapshot) -> String {
    let mut out = String::with_capacity(64 * grid.nodes());
    out.push_str(PROFILE_HEADER);
    out.push('\n');
    for (k, x) in grid.positions().into_iter().enumerate() {
        writeln!(
            out,
            "{:.16e},{:.16e},{:.16e}",
            x, snapshot.temperatures[k], snapshot.diffusivities[k]
        )
        .unwrap();
    }
    out
}

/// Write one profile file per snapshot; returns the paths in snapshot order.
pub fn write_profiles(dir: &Path, report: &RunReport) -> io::Result<Vec<PathBuf>> {
    let grid = Grid1D::new(report.config.nodes).expect("validated run");
    report
        .snapshots
        .iter()
        .map(|s| {
            let path = dir.join(profile_file_name(
                report.config.scheme,
                report.config.dt,
                s.time,
            ));
            fs::write(&path, format_profile(&grid, s))?;
            Ok(path)
        })
        .collect()
}

fn stats_lines(out: &mut String, stats: &StepStats) {
    writeln!(out, "steps = {}", stats.steps).unwrap();
    writeln!(out, "newton_iterations = {}", stats.newton_iterations).unwrap();
    writeln!(
        out,
        "max_newton_iterations_per_step = {}",
        stats.max_newton_iterations
    )
    .unwrap();
    writeln!(
        out,
        "fixed_point_iterations = {}",
        stats.fixed_point_iterations
    )
    .unwrap();
    writeln!(
        out,
        "max_fixed_point_iterations_per_step = {}",
        stats.max_fixed_point_iterations
    )
    .unwrap();
    writeln!(out, "linear_iterations = {}", stats.linear_iterations).unwrap();
}

/// Run summary: configuration echo and iteration totals. Wall time is left
/// out so the file is reproducible.
pub fn format_run_summary(report: &RunReport) -> String {
    let c = &report.config;
    let mut out = String::new();
    writeln!(out, "scheme = {}", c.scheme).unwrap();
    writeln!(out, "nodes = {}", c.nodes).unwrap();
    writeln!(out, "t_left = {}", c.t_left).unwrap();
    writeln!(out, "t_right = {}", c.t_right).unwrap();
    writeln!(out, "gamma = {}", c.gamma).unwrap();
    writeln!(out, "a = {}", c.exponent_a).unwrap();
    writeln!(out, "dt = {}", c.dt).unwrap();
    writeln!(out, "t_end = {}", c.t_end).unwrap();
    writeln!(out, "linear_solver = {}", c.linear_solver.name()).unwrap();
    writeln!(out, "bicgstab_tol = {:e}", c.bicgstab_tol).unwrap();
    writeln!(out, "newton_tol = {:e}", c.newton_tol).unwrap();
    writeln!(out, "newton_max_iters = {}", c.newton_max_iters).unwrap();
    writeln!(out, "fixed_point_tol = {:e}", c.fixed_point_tol).unwrap();
    writeln!(out, "fixed_point_max_iters = {}", c.fixed_point_max_iters).unwrap();
    let times: Vec<String> = report
        .snapshots
        .iter()
        .map(|s| s.time.to_string())
        .collect();
    writeln!(out, "snapshots = {}", times.join(",")).unwrap();
    stats_lines(&mut out, &report.totals);
    out
}

pub fn format_comparison_table(report: &ComparisonReport) -> String {
    let mut out = String::from("scheme,dt,l1,l2,linf\n");
    for r in &report.rows {
        writeln!(
            out,
            "{},{},{:.16e},{:.16e},{:.16e}",
            r.scheme.slug(),
            r.dt,
            r.discrepancy.one,
            r.discrepancy.two,
            r.discrepancy.inf
        )
        .unwrap();
    }
    out
}

pub fn format_comparison_summary(report: &ComparisonReport) -> String {
    let mut out = String::new();
    writeln!(out, "reference = full, dt {}", report.reference_dt).unwrap();
    writeln!(out, "[cross-dt spread, linf]").unwrap();
    for s in &report.spreads {
        writeln!(out, "{} = {:.16e}", s.scheme.slug(), s.linf).unwrap();
    }
    writeln!(out, "[ordering checks]").unwrap();
    for c in &report.checks {
        writeln!(out, "{} {}: {}", c.status, c.name, c.detail).unwrap();
    }
    writeln!(out, "[solver totals]").unwrap();
    stats_lines(&mut out, &report.totals);
    out
}

pub fn format_convergence(study: &ConvergenceStudy) -> String {
    let mut out = String::from("dt_fine,coarse_gap,fine_gap,order\n");
    for e in &study.estimates {
        writeln!(
            out,
            "{},{:.16e},{:.16e},{:.16e}",
            e.dt_fine, e.coarse_gap, e.fine_gap, e.order
        )
        .unwrap();
    }
    out
}
