//! Subcommand implementations. Each produces a [`ScanTable`] whose row order
//! follows the input grid no matter how many workers evaluate it.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use qfl_core::dynamics::{population_decay, InitialStateSpec, Propagator};
use qfl_core::metrology::{
    maximize_qfi_over_time, qfi, qfi_matrix_steady, sld_residual, steady_qfi, DEFAULT_GRID_POINTS,
};
use qfl_core::model::{
    qubit_liouvillian, qubit_liouvillian_gamma_derivative, CavityQubitParams, FeedbackParams,
};
use qfl_core::oracles::{
    audit, qfi_dephasing_case, qfi_longtime_feedback, qfi_mixed_as_printed, qfi_mixed_limits, qfi_no_feedback,
    rho_with_feedback, AuditReport, Expectation, MixedLimit, Observation,
};
use rayon::prelude::*;

use crate::config::ScenarioConfig;
use crate::error::CliError;
use crate::table::{Cell, Kind, ScanTable};

/// Grid options shared by the scan subcommands.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanOptions {
    pub a_min: f64,
    pub a_max: f64,
    pub a_steps: usize,
    pub omega_min: f64,
    pub omega_max: f64,
    pub omega_steps: usize,
    pub g: Vec<f64>,
    pub kappa: Vec<f64>,
    pub n_max: Vec<usize>,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            a_min: 0.0,
            a_max: PI,
            a_steps: 37,
            omega_min: 0.0,
            omega_max: 1.0,
            omega_steps: 101,
            g: vec![1.0],
            kappa: vec![50.0],
            n_max: vec![2],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcommand {
    Evolve,
    Qfi,
    FmScan,
    SteadyScan,
    Qfim,
    Adiabatic,
    Verify,
    Oracle,
}

/// Table plus whether the run met its own success criterion (only `verify`
/// can come back unsuccessful with a table).
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub table: ScanTable,
    pub success: bool,
}

pub fn run_scenario(
    cmd: Subcommand,
    cfg: &ScenarioConfig,
    scan: &ScanOptions,
    jobs: usize,
) -> Result<Outcome, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::config("--jobs", e.to_string()))?;
    let plain = |table: Result<ScanTable, CliError>| table.map(|table| Outcome { table, success: true });
    pool.install(|| match cmd {
        Subcommand::Evolve => plain(evolve(cfg)),
        Subcommand::Qfi => plain(qfi_series(cfg)),
        Subcommand::FmScan => plain(fm_scan(cfg, scan)),
        Subcommand::SteadyScan => plain(steady_scan(cfg, scan)),
        Subcommand::Qfim => plain(qfim(cfg, scan)),
        Subcommand::Adiabatic => plain(adiabatic(cfg, scan)),
        Subcommand::Oracle => plain(oracle(cfg)),
        Subcommand::Verify => verify(),
    })
}

/// `n` evenly spaced points from `lo` to `hi` inclusive; a single point is `lo`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect(),
    }
}

fn check_range(flag: &str, lo: f64, hi: f64, steps: usize) -> Result<(), CliError> {
    if steps == 0 {
        return Err(CliError::config(format!("--{flag}-steps"), "must be >= 1"));
    }
    if hi < lo {
        return Err(CliError::config(format!("--{flag}-max"), format!("{hi} is below --{flag}-min {lo}")));
    }
    Ok(())
}

/// Evaluates `f` over `items` on the current pool, keeping input order.
fn par_rows<T: Sync, F>(items: &[T], f: F) -> Result<Vec<Vec<Cell>>, CliError>
where
    F: Fn(&T) -> Result<Vec<Cell>, CliError> + Sync + Send,
{
    items.par_iter().map(f).collect()
}

fn evolve(cfg: &ScenarioConfig) -> Result<ScanTable, CliError> {
    let l = qubit_liouvillian(&cfg.model, &cfg.feedback);
    let prop = Propagator::new(&l, cfg.run.step());
    let mut state = prop.initial(&cfg.initial.to_density()?)?;
    let mut table = ScanTable::new(&[
        ("t", Kind::Real),
        ("rho_ee", Kind::Real),
        ("rho_eg", Kind::Complex),
        ("eig_min", Kind::Real),
        ("eig_max", Kind::Real),
        ("purity", Kind::Real),
    ]);
    for t in cfg.run.output_times() {
        prop.advance_to(&mut state, t);
        let rho = prop.density(&state)?;
        let eig = rho.eigenvalues()?;
        table.push(vec![
            Cell::Real(t),
            Cell::Real(rho.get(0, 0).re),
            Cell::Complex(rho.get(0, 1)),
            Cell::Real(eig[0]),
            Cell::Real(eig[eig.len() - 1]),
            Cell::Real(rho.purity()),
        ]);
    }
    Ok(table)
}

fn same_angle(x: f64, y: f64) -> bool {
    (x - y).abs() < 1e-12
}

/// The closed form that applies to this scenario at time `t`, if any.
fn qfi_oracle(cfg: &ScenarioConfig, t: f64) -> Option<f64> {
    if cfg.model.omega != 0.0 || cfg.feedback.beta != 0.0 || cfg.model.gamma <= 0.0 {
        return None;
    }
    // The generator has period π in A.
    let a = cfg.feedback.a.rem_euclid(PI);
    let off = same_angle(a, 0.0) || same_angle(a, PI);
    let gamma = cfg.model.gamma;
    match cfg.initial {
        InitialStateSpec::Pure { theta } if same_angle(theta, FRAC_PI_4) => {
            if off {
                qfi_no_feedback(t, gamma).ok()
            } else if same_angle(a, FRAC_PI_2) {
                qfi_dephasing_case(t, gamma).ok()
            } else {
                None
            }
        }
        InitialStateSpec::Mixed { epsilon } if off => {
            qfi_mixed_limits(t, gamma, epsilon, MixedLimit::NoFeedback).ok()
        }
        _ => None,
    }
}

fn qfi_series(cfg: &ScenarioConfig) -> Result<ScanTable, CliError> {
    let prop = Propagator::with_sensitivity(
        &qubit_liouvillian(&cfg.model, &cfg.feedback),
        &qubit_liouvillian_gamma_derivative(&cfg.feedback),
        cfg.run.step(),
    )?;
    let mut state = prop.initial(&cfg.initial.to_density()?)?;
    let mut table = ScanTable::new(&[
        ("t", Kind::Real),
        ("qfi_numeric", Kind::Real),
        ("qfi_oracle", Kind::Real),
        ("sld_residual", Kind::Real),
    ]);
    for t in cfg.run.output_times() {
        prop.advance_to(&mut state, t);
        let pair = prop.pair(&state)?;
        let q = qfi(&pair)?;
        table.push(vec![
            Cell::Real(t),
            Cell::Real(q.value),
            qfi_oracle(cfg, t).map_or(Cell::Empty, Cell::Real),
            Cell::Real(sld_residual(&pair, &q.sld)),
        ]);
    }
    Ok(table)
}

fn fm_scan(cfg: &ScenarioConfig, scan: &ScanOptions) -> Result<ScanTable, CliError> {
    check_range("a", scan.a_min, scan.a_max, scan.a_steps)?;
    let grid = linspace(scan.a_min, scan.a_max, scan.a_steps);
    let rows = par_rows(&grid, |&a| {
        let fb = FeedbackParams::new(a, cfg.feedback.beta)?;
        let r = maximize_qfi_over_time(&cfg.model, &fb, &cfg.initial, None, DEFAULT_GRID_POINTS)?;
        Ok(vec![Cell::Real(a), Cell::Real(r.f_max), Cell::Real(r.t_star)])
    })?;
    let mut table = ScanTable::new(&[("A", Kind::Real), ("f_max", Kind::Real), ("t_star", Kind::Real)]);
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

fn steady_scan(cfg: &ScenarioConfig, scan: &ScanOptions) -> Result<ScanTable, CliError> {
    check_range("omega", scan.omega_min, scan.omega_max, scan.omega_steps)?;
    if scan.omega_min < 0.0 {
        return Err(CliError::config("--omega-min", "must be >= 0"));
    }
    let grid = linspace(scan.omega_min, scan.omega_max, scan.omega_steps);
    let rows = par_rows(&grid, |&omega| {
        let (pair, q) = steady_qfi(cfg.model.gamma, omega, &cfg.feedback)?;
        Ok(vec![
            Cell::Real(omega),
            Cell::Real(q.value),
            Cell::Real(pair.rho.get(0, 0).re),
            Cell::Complex(pair.rho.get(0, 1)),
        ])
    })?;
    let mut table = ScanTable::new(&[
        ("omega", Kind::Real),
        ("qfi_steady", Kind::Real),
        ("rho_ee", Kind::Real),
        ("rho_eg", Kind::Complex),
    ]);
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

fn product<A: Copy, B: Copy>(xs: &[A], ys: &[B]) -> Vec<(A, B)> {
    xs.iter().flat_map(|&x| ys.iter().map(move |&y| (x, y))).collect()
}

fn qfim(cfg: &ScenarioConfig, scan: &ScanOptions) -> Result<ScanTable, CliError> {
    let grid = product(&scan.g, &scan.kappa);
    let rows = par_rows(&grid, |&(g, kappa)| {
        let m = qfi_matrix_steady(g, kappa, cfg.model.omega, &cfg.feedback)?;
        Ok(vec![
            Cell::Real(g),
            Cell::Real(kappa),
            Cell::Real(m.entries[0][0]),
            Cell::Real(m.entries[0][1]),
            Cell::Real(m.entries[1][1]),
            Cell::Real(m.det),
        ])
    })?;
    let mut table = ScanTable::new(&[
        ("g", Kind::Real),
        ("kappa", Kind::Real),
        ("f_gg", Kind::Real),
        ("f_gk", Kind::Real),
        ("f_kk", Kind::Real),
        ("det", Kind::Real),
    ]);
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

fn adiabatic(cfg: &ScenarioConfig, scan: &ScanOptions) -> Result<ScanTable, CliError> {
    let mut grid = Vec::new();
    for (g, kappa) in product(&scan.g, &scan.kappa) {
        for &n in &scan.n_max {
            grid.push((g, kappa, n));
        }
    }
    let rows = par_rows(&grid, |&(g, kappa, n_max)| {
        let p = CavityQubitParams::new(g, kappa, cfg.model.omega, n_max)?;
        let d = population_decay(&p, None, 200)?;
        let eff = p.effective_rate();
        Ok(vec![
            Cell::Real(g),
            Cell::Real(kappa),
            Cell::Real(n_max as f64),
            Cell::Real(d.fit.rate),
            Cell::Real(eff),
            Cell::Real(d.fit.rate / eff),
            Cell::Real(d.fit.max_residual),
        ])
    })?;
    let mut table = ScanTable::new(&[
        ("g", Kind::Real),
        ("kappa", Kind::Real),
        ("n_max", Kind::Real),
        ("fitted_rate", Kind::Real),
        ("g2_over_kappa", Kind::Real),
        ("rate_ratio", Kind::Real),
        ("fit_residual", Kind::Real),
    ]);
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

fn oracle(cfg: &ScenarioConfig) -> Result<ScanTable, CliError> {
    let gamma = cfg.model.gamma;
    let a = cfg.feedback.a;
    let epsilon = match cfg.initial {
        InitialStateSpec::Mixed { epsilon } => Some(epsilon),
        InitialStateSpec::Pure { .. } => None,
    };
    let mut table = ScanTable::new(&[
        ("t", Kind::Real),
        ("rho_ee", Kind::Real),
        ("rho_eg", Kind::Real),
        ("qfi_no_feedback", Kind::Real),
        ("qfi_dephasing", Kind::Real),
        ("qfi_longtime_feedback", Kind::Real),
        ("qfi_mixed_as_printed", Kind::Real),
        ("qfi_mixed_small_t", Kind::Real),
        ("qfi_mixed_long_t", Kind::Real),
        ("qfi_mixed_no_feedback", Kind::Real),
    ]);
    let mixed = |t: f64, which: MixedLimit| -> Result<Cell, CliError> {
        Ok(match epsilon {
            Some(e) => Cell::Real(qfi_mixed_limits(t, gamma, e, which)?),
            None => Cell::Empty,
        })
    };
    for t in cfg.run.output_times() {
        let s = rho_with_feedback(t, gamma, a)?;
        table.push(vec![
            Cell::Real(t),
            Cell::Real(s.rho11),
            Cell::Real(s.rho12),
            Cell::Real(qfi_no_feedback(t, gamma)?),
            Cell::Real(qfi_dephasing_case(t, gamma)?),
            Cell::Real(qfi_longtime_feedback(t, gamma)?),
            match epsilon {
                Some(e) => Cell::Real(qfi_mixed_as_printed(t, gamma, e)?.value),
                None => Cell::Empty,
            },
            mixed(t, MixedLimit::SmallT)?,
            mixed(t, MixedLimit::LongT)?,
            mixed(t, MixedLimit::NoFeedback)?,
        ]);
    }
    Ok(table)
}

fn label_expected(e: Expectation) -> &'static str {
    match e {
        Expectation::Verified => "verified",
        Expectation::Erratum => "erratum",
        Expectation::Note => "note",
    }
}

fn label_observed(o: Observation) -> &'static str {
    match o {
        Observation::Agrees => "agrees",
        Observation::Disagrees => "disagrees",
    }
}

pub fn audit_table(report: &AuditReport) -> ScanTable {
    let mut table = ScanTable::new(&[
        ("id", Kind::Text),
        ("formula", Kind::Text),
        ("expected", Kind::Text),
        ("observed", Kind::Text),
        ("oracle", Kind::Real),
        ("pipeline", Kind::Real),
        ("rel_err", Kind::Real),
        ("tol", Kind::Real),
        ("status", Kind::Text),
    ]);
    for e in &report.entries {
        table.push(vec![
            Cell::Text(e.id.into()),
            Cell::Text(e.formula.into()),
            Cell::Text(label_expected(e.expected).into()),
            Cell::Text(label_observed(e.observed).into()),
            Cell::Real(e.oracle),
            Cell::Real(e.pipeline),
            Cell::Real(e.rel_err),
            Cell::Real(e.tol),
            Cell::Text(if e.as_expected() { "ok" } else { "unexpected" }.into()),
        ]);
    }
    table
}

fn verify() -> Result<Outcome, CliError> {
    let report = audit()?;
    Ok(Outcome { table: audit_table(&report), success: report.all_as_expected() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_3;

    #[test]
    fn linspace_endpoints() {
        assert_eq!(linspace(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
        assert_eq!(linspace(2.0, 5.0, 1), vec![2.0]);
    }

    #[test]
    fn oracle_column_applies_only_to_known_cases() {
        let mut cfg = ScenarioConfig::default();
        assert!(qfi_oracle(&cfg, 10.0).is_some());
        cfg.feedback.a = 0.0;
        assert!(qfi_oracle(&cfg, 10.0).is_some());
        cfg.feedback.a = FRAC_PI_2;
        assert!((qfi_oracle(&cfg, 10.0).unwrap() - 14.549_417_671_733_16).abs() < 1e-9);
        cfg.feedback.a = FRAC_PI_3;
        assert!(qfi_oracle(&cfg, 10.0).is_none());
        cfg.feedback.a = PI;
        cfg.model.omega = 0.1;
        assert!(qfi_oracle(&cfg, 10.0).is_none());
    }

    #[test]
    fn scan_ranges_are_validated() {
        let cfg = ScenarioConfig::default();
        let bad = ScanOptions { a_min: 2.0, a_max: 1.0, ..ScanOptions::default() };
        assert!(matches!(run_scenario(Subcommand::FmScan, &cfg, &bad, 1), Err(CliError::Config { .. })));
        let bad = ScanOptions { omega_steps: 0, ..ScanOptions::default() };
        assert!(matches!(run_scenario(Subcommand::SteadyScan, &cfg, &bad, 1), Err(CliError::Config { .. })));
    }
}
