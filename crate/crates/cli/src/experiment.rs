//! The five experiment kinds.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::{Duration, Instant};

use gyrolim_core::density::{Density, GridDensity, RadialDensity};
use gyrolim_core::energy::{
    classical_modulated_energy_with, coercivity_sweep, derive_seed, CoulombFunctional, TestFunction,
};
use gyrolim_core::euler::{fields_with, init_blobs_from_vorticity, EulerFields, EulerParams, EulerTrajectory};
use gyrolim_core::kernels::{FreeSpaceConvolver, GridSpec, ScalarGrid, Vec2, VectorGrid};
use gyrolim_core::nbody::{
    hamiltonian, run_simulation, sample_monokinetic_with, IntegratorConfig, MagneticParams, ParticleEnsemble,
    Termination,
};
use gyrolim_core::quantize::{
    kinetic_trace_identity, quadratic_symbol_identities, section5_initial_energy, Atom, GyroSymbol,
    HermiteTruncation, KineticTrace, PhasePoint, QuadraticIdentityReport, Section5Report,
};
use gyrolim_core::Error as CoreError;
use rayon::prelude::*;

use crate::config::{DensityKind, RunConfig, SweepMode, ThetaKind};
use crate::output::{
    write_csv, Cell, Failure, COERCIVITY_HEADER, ENERGY_HEADER, EULER_HEADER, QUANTIZE_HEADER, SWEEP_HEADER,
};
use crate::RunError;

/// Hard-assertion failures and informational notes of one run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub failures: Vec<Failure>,
    pub notes: Vec<String>,
}

impl Report {
    fn fail(&mut self, id: impl Into<String>, detail: impl Into<String>) {
        self.failures.push(Failure { id: id.into(), detail: detail.into() });
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }
}

pub fn initial_density(cfg: &RunConfig) -> Result<RadialDensity, CoreError> {
    match cfg.density {
        DensityKind::Bump => RadialDensity::bump(cfg.radius),
        DensityKind::Gaussian => RadialDensity::truncated_gaussian(cfg.variance, cfg.radius),
        DensityKind::Disk => RadialDensity::uniform_disk(cfg.radius),
    }
}

pub fn grid(cfg: &RunConfig) -> Result<GridSpec, CoreError> {
    GridSpec::new(cfg.half_width, cfg.cells)
}

fn euler_params(cfg: &RunConfig) -> Result<EulerParams, CoreError> {
    Ok(EulerParams { dt: cfg.euler_dt, t_final: cfg.t_final, grid: grid(cfg)?, blob_count: cfg.blobs, remesh_every: None })
}

/// Blob trajectory of the configured initial vorticity up to `T`.
pub fn euler_trajectory(cfg: &RunConfig) -> Result<EulerTrajectory, CoreError> {
    let params = euler_params(cfg)?;
    let blobs = init_blobs_from_vorticity(&initial_density(cfg)?, params.blob_count, params.grid)?;
    EulerTrajectory::compute(blobs, &params)
}

pub fn run_euler(cfg: &RunConfig, dir: &Path) -> Result<Report, RunError> {
    let params = euler_params(cfg)?;
    let traj = euler_trajectory(cfg)?;
    let w0 = traj.snapshots()[0].deposit(params.grid)?;
    let mut rows = Vec::new();
    let mut report = Report::default();
    let mut worst_circ: f64 = 0.0;
    let mut last_change = 0.0;
    for (k, blobs) in traj.snapshots().iter().enumerate() {
        let w = blobs.deposit(params.grid)?;
        let change = w.l1_distance(&w0)? / w0.l1_norm();
        worst_circ = worst_circ.max((blobs.total_circulation() - 1.0).abs());
        last_change = change;
        rows.push(vec![
            Cell::from(k as f64 * params.dt),
            Cell::from(blobs.total_circulation()),
            Cell::from(change),
            Cell::from(w.max()),
        ]);
    }
    write_csv(&dir.join("euler.csv"), EULER_HEADER, &rows)?;
    report.note(format!("relative L1 change of the vorticity at t = {}: {last_change:.3e}", traj.t_final()));
    if worst_circ > 1e-12 {
        report.fail("circulation", format!("total circulation drifted by {worst_circ:e}"));
    }
    // Every built-in profile is radially symmetric, hence steady.
    if last_change > 1e-2 {
        report.fail("steady_state", format!("radial vorticity changed by {last_change:.3e} in L1 (limit 1e-2)"));
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyRow {
    pub t: f64,
    pub e: f64,
    pub e1: f64,
    pub e2: f64,
    pub f_n: f64,
    pub slack: f64,
    pub h: f64,
    pub min_sep: f64,
}

impl EnergyRow {
    fn cells(&self) -> Vec<Cell> {
        [self.t, self.e, self.e1, self.e2, self.f_n, self.slack, self.h, self.min_sep]
            .into_iter()
            .map(Cell::from)
            .collect()
    }
}

/// One `(N, eps)` cell, averaged over replicates.
#[derive(Debug, Clone, PartialEq)]
pub struct CellOutcome {
    pub n: usize,
    pub eps: f64,
    /// Replicate means per observation time; `min_sep` is the minimum.
    pub rows: Vec<EnergyRow>,
    pub e_t0: f64,
    pub e_tfinal: f64,
    pub slack_tfinal: f64,
    /// RMS over replicates of `int phi d(mu_N - omega_blob)` at `T`.
    pub weak_err: [f64; 2],
    /// Largest `|h(t) - h(0)| / (|h(0)| + 1)` over replicates.
    pub h_drift: f64,
    /// `ok`, `collision`, `aborted: ...` or `error: ...`.
    pub status: String,
}

impl CellOutcome {
    fn failed(n: usize, eps: f64, status: String) -> Self {
        CellOutcome {
            n,
            eps,
            rows: vec![],
            e_t0: f64::NAN,
            e_tfinal: f64::NAN,
            slack_tfinal: f64::NAN,
            weak_err: [f64::NAN; 2],
            h_drift: f64::NAN,
            status,
        }
    }
}

struct Replicate {
    rows: Vec<EnergyRow>,
    final_state: Option<ParticleEnsemble>,
    status: String,
}

const WEAK_TESTS: [TestFunction; 2] = [TestFunction::Phi1, TestFunction::Phi2];

/// Euler fields at every observation step of a cell.
struct CellFields {
    conv: FreeSpaceConvolver,
    by_step: BTreeMap<usize, EulerFields>,
    steps: usize,
}

impl CellFields {
    fn new(cfg: &RunConfig, traj: &EulerTrajectory, eps: f64) -> Result<Self, CoreError> {
        let spec = grid(cfg)?;
        let conv = FreeSpaceConvolver::new(spec);
        let steps = (cfg.t_final / cfg.dt).round() as usize;
        let mut wanted: Vec<usize> = (0..=steps).step_by(cfg.stride).collect();
        if wanted.last() != Some(&steps) {
            wanted.push(steps);
        }
        let mut by_step = BTreeMap::new();
        for k in wanted {
            let t = (k as f64 * cfg.dt).min(traj.t_final());
            let omega = traj.blobs_at(t)?.deposit(spec)?;
            by_step.insert(k, fields_with(&conv, omega, eps)?);
        }
        Ok(CellFields { conv, by_step, steps })
    }

    fn at(&self, t: f64, dt: f64) -> Result<&EulerFields, CoreError> {
        let k = (t / dt).round() as usize;
        self.by_step.get(&k).ok_or_else(|| CoreError::InvalidParameter {
            name: "stride",
            reason: format!("no Euler fields prepared for step {k}"),
        })
    }

    fn last(&self) -> &EulerFields {
        &self.by_step[&self.steps]
    }
}

fn magnetic_params(cfg: &RunConfig, eps: f64) -> MagneticParams {
    MagneticParams { eps, magnetic: cfg.magnetic, orientation: cfg.orientation_or_default() }
}

fn integrator(cfg: &RunConfig) -> IntegratorConfig {
    IntegratorConfig { dt: cfg.dt, t_final: cfg.t_final, guard: cfg.guard, scheme: cfg.scheme, ..Default::default() }
}

fn run_replicate(
    cfg: &RunConfig,
    fields: &CellFields,
    n: usize,
    eps: f64,
    seed: u64,
    deadline: Instant,
) -> Result<Replicate, CoreError> {
    let f0 = fields.at(0.0, cfg.dt)?;
    let omega0 = GridDensity::new(f0.omega.clone())?;
    let u0 = &f0.u;
    let ensemble = sample_monokinetic_with(&omega0, &|p| u0.interpolate(p).unwrap_or(Vec2::ZERO), n, seed, cfg.sampling)?;
    let params = magnetic_params(cfg, eps);
    let icfg = integrator(cfg);
    let energy_row = |t: f64, ens: &ParticleEnsemble, m: f64| -> Result<EnergyRow, CoreError> {
        let b = classical_modulated_energy_with(&fields.conv, ens, fields.at(t, cfg.dt)?, cfg.confinement)?;
        Ok(EnergyRow { t, e: b.e, e1: b.e1, e2: b.e2, f_n: b.f_n, slack: b.slack, h: hamiltonian(ens, &params)?, min_sep: m })
    };
    let mut rows = Vec::new();
    let mut observe = |t: f64, ens: &ParticleEnsemble, m: f64| -> Result<(), CoreError> {
        if Instant::now() > deadline {
            return Err(CoreError::InvalidParameter {
                name: "cell_budget",
                reason: format!("wall-clock budget of {} s exceeded at t = {t}", cfg.cell_budget),
            });
        }
        rows.push(energy_row(t, ens, m)?);
        Ok(())
    };
    let result = run_simulation(ensemble, &params, &icfg, cfg.stride, &mut [&mut observe]);
    let (final_state, status) = match result {
        Ok(out) => match out.termination {
            Termination::Completed => {
                if rows.last().map_or(true, |r| r.t < out.t - 1e-9) {
                    rows.push(energy_row(out.t, &out.ensemble, out.min_separation)?);
                }
                (Some(out.ensemble), "ok".to_string())
            }
            Termination::Aborted(CoreError::Collision { .. }) => (None, "collision".to_string()),
            Termination::Aborted(e) => (None, format!("aborted: {e}")),
        },
        Err(e) => (None, format!("aborted: {e}")),
    };
    Ok(Replicate { rows, final_state, status })
}

/// Runs all replicates of one cell; errors are folded into the status.
pub fn run_cell(cfg: &RunConfig, traj: &EulerTrajectory, n: usize, eps: f64, cell_seed: u64) -> CellOutcome {
    match run_cell_inner(cfg, traj, n, eps, cell_seed) {
        Ok(c) => c,
        Err(e) => CellOutcome::failed(n, eps, format!("error: {e}")),
    }
}

fn run_cell_inner(
    cfg: &RunConfig,
    traj: &EulerTrajectory,
    n: usize,
    eps: f64,
    cell_seed: u64,
) -> Result<CellOutcome, CoreError> {
    let deadline = Instant::now() + Duration::from_secs_f64(cfg.cell_budget);
    let fields = CellFields::new(cfg, traj, eps)?;
    let mut reps = Vec::with_capacity(cfg.replicates);
    for r in 0..cfg.replicates {
        reps.push(run_replicate(cfg, &fields, n, eps, derive_seed(cell_seed, r as u64), deadline)?);
    }
    let len = reps.iter().map(|r| r.rows.len()).max().unwrap_or(0);
    let mut rows = Vec::with_capacity(len);
    for k in 0..len {
        let present: Vec<&EnergyRow> = reps.iter().filter_map(|r| r.rows.get(k)).collect();
        let m = present.len() as f64;
        let mean = |f: fn(&EnergyRow) -> f64| present.iter().map(|r| f(r)).sum::<f64>() / m;
        rows.push(EnergyRow {
            t: present[0].t,
            e: mean(|r| r.e),
            e1: mean(|r| r.e1),
            e2: mean(|r| r.e2),
            f_n: mean(|r| r.f_n),
            slack: mean(|r| r.slack),
            h: mean(|r| r.h),
            min_sep: present.iter().map(|r| r.min_sep).fold(f64::INFINITY, f64::min),
        });
    }
    let h_drift = reps
        .iter()
        .filter_map(|r| {
            let h0 = r.rows.first()?.h;
            Some(r.rows.iter().map(|x| (x.h - h0).abs()).fold(0.0, f64::max) / (h0.abs() + 1.0))
        })
        .fold(0.0, f64::max);
    let target = fields.last();
    let mut weak_err = [0.0; 2];
    for (k, phi) in WEAK_TESTS.iter().enumerate() {
        let exact = target.omega.integrate_against(|x| phi.value(x));
        let mut acc = 0.0;
        for r in &reps {
            match &r.final_state {
                Some(ens) => acc += (ens.empirical_mean(|x| phi.value(x)) - exact).powi(2),
                None => acc = f64::NAN,
            }
        }
        weak_err[k] = (acc / reps.len() as f64).sqrt();
    }
    let status = reps.iter().map(|r| r.status.clone()).find(|s| s != "ok").unwrap_or_else(|| "ok".into());
    Ok(CellOutcome {
        n,
        eps,
        e_t0: rows.first().map_or(f64::NAN, |r| r.e),
        e_tfinal: rows.last().map_or(f64::NAN, |r| r.e),
        slack_tfinal: rows.last().map_or(f64::NAN, |r| r.slack),
        rows,
        weak_err,
        h_drift,
        status,
    })
}

fn list(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.4e}")).collect::<Vec<_>>().join(", ")
}

fn energy_rows(cell: &CellOutcome) -> Vec<Vec<Cell>> {
    cell.rows.iter().map(EnergyRow::cells).collect()
}

pub fn run_nbody(cfg: &RunConfig, dir: &Path) -> Result<Report, RunError> {
    let traj = euler_trajectory(cfg)?;
    let master = cfg.seed.expect("seed checked by resolve");
    let cell = run_cell(cfg, &traj, cfg.n, cfg.eps, derive_seed(master, 0));
    write_csv(&dir.join("energy.csv"), ENERGY_HEADER, &energy_rows(&cell))?;
    let mut report = Report::default();
    report.note(format!(
        "N = {}, eps = {}: E(0) = {:.6e}, E(T) = {:.6e}, relative drift of h = {:.3e}",
        cell.n, cell.eps, cell.e_t0, cell.e_tfinal, cell.h_drift
    ));
    if cell.status != "ok" {
        report.fail("run", cell.status.clone());
    }
    Ok(report)
}

/// `(N, eps)` pairs of the sweep in output order.
pub fn sweep_cells(cfg: &RunConfig) -> Vec<(usize, f64)> {
    match cfg.sweep_mode {
        SweepMode::Diagonal => cfg.sweep_n.iter().copied().zip(cfg.sweep_eps.iter().copied()).collect(),
        SweepMode::Grid => cfg.sweep_n.iter().flat_map(|&n| cfg.sweep_eps.iter().map(move |&e| (n, e))).collect(),
    }
}

pub fn cell_dir_name(n: usize, eps: f64) -> String {
    format!("N{n}_eps{eps}")
}

pub fn run_sweep(cfg: &RunConfig, dir: &Path) -> Result<(Report, Vec<CellOutcome>), RunError> {
    let traj = euler_trajectory(cfg)?;
    let master = cfg.seed.expect("seed checked by resolve");
    let cells = sweep_cells(cfg);
    let outcomes: Vec<CellOutcome> = cells
        .par_iter()
        .enumerate()
        .map(|(c, &(n, eps))| run_cell(cfg, &traj, n, eps, derive_seed(master, c as u64)))
        .collect();
    let mut summary = Vec::new();
    let mut report = Report::default();
    for cell in &outcomes {
        let cdir = dir.join("cells").join(cell_dir_name(cell.n, cell.eps));
        write_csv(&cdir.join("energy.csv"), ENERGY_HEADER, &energy_rows(cell))?;
        summary.push(vec![
            Cell::from(cell.n),
            Cell::from(cell.eps),
            // classical dynamics: no semiclassical parameter
            Cell::from(0.0),
            Cell::from(cell.e_t0),
            Cell::from(cell.e_tfinal),
            Cell::from(cell.slack_tfinal),
            Cell::from(cell.weak_err[0]),
            Cell::from(cell.weak_err[1]),
            Cell::from(cell.status.clone()),
        ]);
        if cell.status != "ok" {
            report.fail(format!("cell:N={}:eps={}", cell.n, cell.eps), cell.status.clone());
        }
    }
    write_csv(&dir.join("sweep.csv"), SWEEP_HEADER, &summary)?;
    if cfg.sweep_mode == SweepMode::Diagonal && outcomes.len() > 1 {
        let strictly_down = |v: Vec<f64>| v.windows(2).all(|w| w[1] < w[0]);
        let e: Vec<f64> = outcomes.iter().map(|c| c.e_tfinal).collect();
        let w: Vec<f64> = outcomes.iter().map(|c| c.weak_err[0]).collect();
        if !strictly_down(e.clone()) {
            report.fail("trend:E_tfinal", format!("not strictly decreasing along the diagonal: {}", list(&e)));
        }
        if !strictly_down(w.clone()) {
            report.fail("trend:weak_err_phi1", format!("not decreasing along the diagonal: {}", list(&w)));
        }
    }
    Ok((report, outcomes))
}

/// Two atoms whose coherent amplitudes stay resolved at degree `max_degree`.
pub fn trace_test_atoms(hbar: f64, max_degree: usize) -> Vec<Atom> {
    let m = max_degree as f64;
    let r = ((-3.0 + (1.0 + 4.0 * m).sqrt()) / 2.0).min(1.5) * 0.99;
    let s = (2.0 * hbar).sqrt() * r;
    let atom = |q: (f64, f64), p: (f64, f64), w: f64| {
        let z = PhasePoint { q: Vec2::new(s * q.0, s * q.1), p: Vec2::new(s * p.0, s * p.1) };
        Atom::new(z, w)
    };
    vec![atom((0.6, -0.4), (0.5, 0.7), 0.6), atom((-0.5, 0.2), (0.3, -0.6), 0.4)]
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantizeRow {
    pub energy: Section5Report,
    pub trace: Result<KineticTrace, CoreError>,
    pub quadratic: QuadraticIdentityReport,
}

pub fn symbol(cfg: &RunConfig, eps: f64, hbar: f64, conv: &FreeSpaceConvolver) -> Result<GyroSymbol, CoreError> {
    let spec = *conv.spec();
    let raw = RadialDensity::cutoff_gaussian().to_grid(spec);
    let omega: ScalarGrid = raw.scaled(1.0 / raw.integral());
    let theta = match cfg.theta {
        ThetaKind::Zero => VectorGrid::zeros(spec),
        ThetaKind::Velocity => conv.biot_savart(&omega)?,
    };
    GyroSymbol::new(omega, theta, eps, hbar)
}

pub fn quantize_rows(cfg: &RunConfig) -> Result<Vec<QuantizeRow>, CoreError> {
    let spec = GridSpec::new(cfg.symbol_half_width, cfg.symbol_cells)?;
    let conv = FreeSpaceConvolver::new(spec);
    let mut rows = Vec::new();
    for &eps in &cfg.quantize_eps {
        let hbar = cfg.hbar_for(eps);
        let n = cfg.quantize_n.unwrap_or_else(|| eps.powi(-3).ceil() as usize);
        let energy = section5_initial_energy(&symbol(cfg, eps, hbar, &conv)?, n, &conv)?;
        let trunc = HermiteTruncation::new(hbar, cfg.max_degree)?;
        let trace = kinetic_trace_identity(&trace_test_atoms(hbar, cfg.max_degree), eps, &trunc);
        let quadratic = quadratic_symbol_identities(&trunc)?;
        rows.push(QuantizeRow { energy, trace, quadratic });
    }
    Ok(rows)
}

pub const TRACE_TOL: f64 = 1e-4;
pub const QUADRATIC_TOL: f64 = 1e-8;
pub const CORRECTION_TOL: f64 = 1e-12;

/// Pass/fail evaluation of the quantization rows.
pub fn assess_quantize(rows: &[QuantizeRow], max_degree: usize) -> Report {
    let mut report = Report::default();
    for row in rows {
        let e = &row.energy;
        let tag = format!("eps={}", e.eps);
        match &row.trace {
            Ok(t) if t.relative_error <= TRACE_TOL => {}
            Ok(t) => report.fail(
                format!("kinetic_trace_identity:{tag}"),
                format!("relative error {:.3e} above {TRACE_TOL:e} at M = {max_degree}", t.relative_error),
            ),
            Err(err) => report.fail(format!("kinetic_trace_identity:{tag}"), err.to_string()),
        }
        let q = &row.quadratic;
        let worst = q.position_residual.max(q.momentum_residual);
        if !(worst <= QUADRATIC_TOL) {
            report.fail(
                format!("quadratic_identity:{tag}"),
                format!("interior residual {worst:.3e} above {QUADRATIC_TOL:e} at M = {max_degree}"),
            );
        }
        let gap = (e.kinetic_correction - e.correction_closed_form).abs();
        if !(gap <= CORRECTION_TOL) {
            report.fail(format!("kinetic_correction:{tag}"), format!("differs from hbar/4eps + eps hbar by {gap:.3e}"));
        }
    }
    if max_degree < 16 {
        report.note(format!("truncation M = {max_degree} is small; identity residuals above are the degraded values"));
    }
    let outside: Vec<&QuantizeRow> = rows.iter().filter(|r| !r.energy.in_regime).collect();
    if !outside.is_empty() {
        for r in &outside {
            report.note(format!(
                "expected regime violation at eps = {}: hbar/eps = {:.3} is not small, the kinetic correction {:.4e} does not vanish",
                r.energy.eps, r.energy.hbar_over_eps, r.energy.kinetic_correction
            ));
        }
        report.note("limit trends are not assessed outside the regime hbar/eps -> 0");
        return report;
    }
    let mut sorted: Vec<&Section5Report> = rows.iter().map(|r| &r.energy).collect();
    sorted.sort_by(|a, b| b.eps.total_cmp(&a.eps));
    let terms: [(&str, fn(&Section5Report) -> f64); 4] = [
        ("kinetic", |r| r.kinetic_correction),
        ("confinement", |r| r.confinement),
        ("I", |r| r.i.abs()),
        ("J", |r| r.j.abs()),
    ];
    if sorted.len() > 1 {
        for (name, f) in terms {
            let v: Vec<f64> = sorted.iter().map(|r| f(r)).collect();
            if !v.windows(2).all(|w| w[1] < w[0]) {
                report.fail(format!("trend:{name}"), format!("not decreasing as eps decreases: {}", list(&v)));
            }
        }
    }
    report
}

pub fn run_quantize(cfg: &RunConfig, dir: &Path) -> Result<Report, RunError> {
    let rows = quantize_rows(cfg)?;
    let csv: Vec<Vec<Cell>> = rows
        .iter()
        .map(|r| {
            let e = &r.energy;
            let rel = r.trace.as_ref().map_or(f64::NAN, |t| t.relative_error);
            [e.eps, e.hbar, e.kinetic_correction, e.confinement, e.i, e.j, rel].into_iter().map(Cell::from).collect()
        })
        .collect();
    write_csv(&dir.join("quantize.csv"), QUANTIZE_HEADER, &csv)?;
    let report = assess_quantize(&rows, cfg.max_degree);
    let mut summary = String::new();
    for r in &rows {
        let e = &r.energy;
        summary.push_str(&format!(
            "eps {:<6} hbar {:.3e}  kinetic correction {:.6e} (closed form {:.6e})  confinement {:.6e}  I {:+.6e}  J {:+.6e}  trace rel. err {}  quadratic residual {:.3e}\n",
            e.eps,
            e.hbar,
            e.kinetic_correction,
            e.correction_closed_form,
            e.confinement,
            e.i,
            e.j,
            r.trace.as_ref().map_or_else(|err| format!("refused ({err})"), |t| format!("{:.3e}", t.relative_error)),
            r.quadratic.position_residual.max(r.quadratic.momentum_residual),
        ));
    }
    for n in &report.notes {
        summary.push_str(&format!("note: {n}\n"));
    }
    for f in &report.failures {
        summary.push_str(&format!("FAIL {}: {}\n", f.id, f.detail));
    }
    if report.failures.is_empty() {
        summary.push_str("all checks passed\n");
    }
    crate::output::write_atomic(&dir.join("summary.txt"), summary.as_bytes())?;
    Ok(report)
}

pub fn run_coercivity(cfg: &RunConfig, dir: &Path) -> Result<Report, RunError> {
    let density = initial_density(cfg)?;
    let mu = GridDensity::new(density.to_grid(grid(cfg)?))?.grid().clone();
    let functional = CoulombFunctional::new(&mu)?;
    let master = cfg.seed.expect("seed checked by resolve");
    let sweep = coercivity_sweep(&density, &functional, &WEAK_TESTS, &cfg.coercivity_n, cfg.coercivity_seeds, master)?;
    let rows: Vec<Vec<Cell>> = sweep
        .rows
        .iter()
        .map(|r| vec![Cell::from(r.n), Cell::from(r.test_function.clone()), Cell::from(r.median_lhs), Cell::from(r.median_slack)])
        .collect();
    write_csv(&dir.join("coercivity.csv"), COERCIVITY_HEADER, &rows)?;
    let mut report = Report::default();
    for phi in WEAK_TESTS {
        let medians: Vec<f64> =
            sweep.rows.iter().filter(|r| r.test_function == phi.name()).map(|r| r.median_lhs).collect();
        if !medians.windows(2).all(|w| w[1] < w[0]) {
            report.fail(format!("trend:{}", phi.name()), format!("median LHS not decreasing in N: {}", list(&medians)));
        }
    }
    for (name, lambda) in &sweep.fitted_lambda {
        report.note(format!("{name}: fitted rate lambda = {lambda:.3}"));
    }
    Ok(report)
}
