use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::experiment::config::{ExperimentConfig, Scenario};
use crate::experiment::csv::{opt_count, opt_real, real, text, CsvTable};
use crate::experiment::plots;
use crate::frequency::{rho, DiffusionPair, FrequencyBand, TransmissionParams, Version};
use crate::heat::{solve_monolithic, DiffusionField, Mesh1D, ProblemSpec, SpaceTimeField};
use crate::optimizer::{
    brute_force_minmax, optimize, optimize_v3, v1_minimizers, v3_residual_parts, v3_search_interval, Interval,
    OptimizedResult, OptimizerDetails, OracleResult,
};
use crate::schwarz::{decompose, interface_params_for, oswr_iterate, Decomposition, OswrOptions};

#[derive(Debug, Clone, PartialEq)]
pub struct OutputFile {
    pub name: String,
    pub contents: String,
}

/// Files and a short text summary of one scenario run.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioReport {
    pub scenario: Scenario,
    pub files: Vec<OutputFile>,
    pub summary: String,
    /// Rows that recorded an error.
    pub failures: usize,
}

impl ScenarioReport {
    pub fn file(&self, name: &str) -> Option<&str> {
        self.files.iter().find(|f| f.name == name).map(|f| f.contents.as_str())
    }
}

pub fn write_report(report: &ScenarioReport, dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    report
        .files
        .iter()
        .map(|f| {
            let path = dir.join(&f.name);
            std::fs::write(&path, &f.contents)?;
            Ok(path)
        })
        .collect()
}

pub fn run_scenario(cfg: &ExperimentConfig) -> Result<ScenarioReport> {
    match cfg.scenario {
        Scenario::RatioSweep => {
            let rows = run_ratio_sweep(cfg)?;
            Ok(sweep_report(Scenario::RatioSweep, &rows))
        }
        Scenario::DtSweep => {
            let rows = run_dt_sweep(cfg)?;
            Ok(sweep_report(Scenario::DtSweep, &rows))
        }
        Scenario::DxSweep => {
            let rows = run_dx_sweep(cfg)?;
            Ok(sweep_report(Scenario::DxSweep, &rows))
        }
        Scenario::RhoCurves => Ok(rho_curves_report(&run_rho_curves(cfg)?)),
        Scenario::V3RootScan => Ok(root_scan_report(&run_v3_root_scan(cfg)?)),
        Scenario::TpsThreeLayer | Scenario::Custom => Ok(layered_report(cfg.scenario, &run_layered(cfg)?)),
        Scenario::Oracle => Ok(oracle_report(&run_oracle(cfg)?)),
    }
}

fn two_layer_problem(cfg: &ExperimentConfig, ratio: f64, dt: f64) -> Result<ProblemSpec> {
    let nu = DiffusionField::layered(vec![1.0, 1.0 / ratio], vec![0.5])?;
    Ok(ProblemSpec::new(nu, cfg.final_time, dt)?
        .with_constant_initial(cfg.u0)
        .with_constant_boundary(cfg.g_left, cfg.g_right)
        .with_mass(cfg.mass))
}

fn oswr_options(cfg: &ExperimentConfig) -> OswrOptions {
    OswrOptions {
        tolerance: cfg.tolerance,
        max_iter: cfg.max_iter,
        init: cfg.init,
        sweep: cfg.sweep,
        ..OswrOptions::default()
    }
}

/// Outcome of one iteration run, with failures captured.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub iterations: Option<usize>,
    pub final_error: f64,
    pub history: Vec<f64>,
    pub combined: Option<SpaceTimeField>,
    pub error: Option<String>,
}

fn iterate(
    problem: &ProblemSpec,
    decomposition: &Decomposition,
    params: &[TransmissionParams],
    monolithic: &SpaceTimeField,
    options: &OswrOptions,
    keep_field: bool,
) -> RunOutcome {
    match oswr_iterate(problem, decomposition, params, monolithic, options) {
        Ok(out) => RunOutcome {
            iterations: out.history.iterations_to_tolerance(),
            final_error: out.history.last_error().unwrap_or(f64::NAN),
            combined: keep_field.then(|| out.combined(decomposition)),
            history: out.history.errors,
            error: None,
        },
        Err(e) => {
            let history = match &e {
                Error::Diverged { history } | Error::NotConverged { history } => history.errors.clone(),
                _ => Vec::new(),
            };
            RunOutcome {
                iterations: None,
                final_error: history.last().copied().unwrap_or(f64::NAN),
                history,
                combined: None,
                error: Some(e.to_string()),
            }
        }
    }
}

/// One `(ratio, dx, dt, version)` two-subdomain run.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub ratio: f64,
    pub dx: f64,
    pub dt: f64,
    pub version: Version,
    pub params: Option<TransmissionParams>,
    pub rho_star: f64,
    pub outcome: RunOutcome,
}

struct Setup {
    ratio: f64,
    dx: f64,
    dt: f64,
    problem: ProblemSpec,
    decomposition: Decomposition,
    monolithic: SpaceTimeField,
}

/// Runs every `(ratio, dx, dt)` case with every configured version; rows
/// run in parallel and come back in input order.
pub fn run_two_layer_cases(cfg: &ExperimentConfig, cases: &[(f64, f64, f64)]) -> Result<Vec<SweepRow>> {
    let setups = cases
        .par_iter()
        .map(|&(ratio, dx, dt)| {
            let problem = two_layer_problem(cfg, ratio, dt)?;
            let mesh = Mesh1D::with_spacing(0.0, 1.0, dx)?;
            let decomposition = decompose(&mesh, &[0.5])?;
            let monolithic = solve_monolithic(&problem, &mesh)?;
            Ok(Setup {
                ratio,
                dx,
                dt,
                problem,
                decomposition,
                monolithic,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(&Setup, Version)> = setups
        .iter()
        .flat_map(|s| cfg.versions.iter().map(move |&v| (s, v)))
        .collect();
    let options = oswr_options(cfg);
    Ok(jobs
        .par_iter()
        .map(|&(s, version)| {
            let pair = DiffusionPair::new(1.0, 1.0 / s.ratio).expect("positive ratio");
            let optimized = FrequencyBand::from_grid(s.problem.final_time(), s.dt)
                .and_then(|band| optimize(version, &band, &pair));
            match optimized {
                Ok(opt) => SweepRow {
                    ratio: s.ratio,
                    dx: s.dx,
                    dt: s.dt,
                    version,
                    params: Some(opt.params),
                    rho_star: opt.rho_star,
                    outcome: iterate(&s.problem, &s.decomposition, &[opt.params], &s.monolithic, &options, false),
                },
                Err(e) => SweepRow {
                    ratio: s.ratio,
                    dx: s.dx,
                    dt: s.dt,
                    version,
                    params: None,
                    rho_star: f64::NAN,
                    outcome: RunOutcome {
                        iterations: None,
                        final_error: f64::NAN,
                        history: Vec::new(),
                        combined: None,
                        error: Some(e.to_string()),
                    },
                },
            }
        })
        .collect())
}

pub fn run_ratio_sweep(cfg: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    let cases: Vec<_> = cfg.ratios.iter().map(|&r| (r, cfg.dx, cfg.dt)).collect();
    run_two_layer_cases(cfg, &cases)
}

pub fn run_dt_sweep(cfg: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    let cases: Vec<_> = cfg
        .ratios
        .iter()
        .flat_map(|&r| cfg.dts.iter().map(move |&dt| (r, cfg.dx, dt)))
        .collect();
    run_two_layer_cases(cfg, &cases)
}

pub fn run_dx_sweep(cfg: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    let cases: Vec<_> = cfg
        .ratios
        .iter()
        .flat_map(|&r| cfg.dxs.iter().map(move |&dx| (r, dx, cfg.dt)))
        .collect();
    run_two_layer_cases(cfg, &cases)
}

fn history_table(history: &[f64]) -> String {
    let mut t = CsvTable::new(&["iteration", "error"]);
    for (i, e) in history.iter().enumerate() {
        t.push(vec![(i + 1).to_string(), real(*e)]);
    }
    t.render()
}

fn sweep_report(scenario: Scenario, rows: &[SweepRow]) -> ScenarioReport {
    let mut files = Vec::new();
    let table = match scenario {
        Scenario::RatioSweep => {
            let mut t = CsvTable::new(&[
                "ratio",
                "version",
                "p",
                "q",
                "sigma1",
                "sigma2",
                "rho_star_analytic",
                "iterations",
                "final_error",
                "error",
            ]);
            for r in rows {
                t.push(vec![
                    real(r.ratio),
                    r.version.to_string(),
                    opt_real(r.params.map(|p| p.p())),
                    opt_real(r.params.map(|p| p.q())),
                    opt_real(r.params.map(|p| p.sigma1())),
                    opt_real(r.params.map(|p| p.sigma2())),
                    real(r.rho_star),
                    opt_count(r.outcome.iterations),
                    real(r.outcome.final_error),
                    text(r.outcome.error.as_deref().unwrap_or("")),
                ]);
            }
            t
        }
        _ => {
            let step = if scenario == Scenario::DtSweep { "dt" } else { "dx" };
            let mut t = CsvTable::new(&["ratio", "version", step, "iterations", "rho_star", "error"]);
            for (k, r) in rows.iter().enumerate() {
                let value = if scenario == Scenario::DtSweep { r.dt } else { r.dx };
                t.push(vec![
                    real(r.ratio),
                    r.version.to_string(),
                    real(value),
                    opt_count(r.outcome.iterations),
                    real(r.rho_star),
                    text(r.outcome.error.as_deref().unwrap_or("")),
                ]);
                files.push(OutputFile {
                    name: history_file_name(scenario, k, r),
                    contents: history_table(&r.outcome.history),
                });
            }
            t
        }
    };
    let main = format!("{}.csv", scenario.name());
    if scenario != Scenario::RatioSweep {
        let histories: Vec<(String, String)> = rows
            .iter()
            .enumerate()
            .map(|(k, r)| {
                let value = if scenario == Scenario::DtSweep { r.dt } else { r.dx };
                (history_file_name(scenario, k, r), format!("ratio {} {} {}={}", r.ratio, r.version, step_key(scenario), value))
            })
            .collect();
        files.push(OutputFile {
            name: format!("plot_{}.py", scenario.name()),
            contents: plots::history_plot(&histories),
        });
    }
    files.insert(
        0,
        OutputFile {
            name: main,
            contents: table.render(),
        },
    );
    let mut summary = String::new();
    for r in rows {
        let value = match scenario {
            Scenario::DtSweep => format!(" dt={}", r.dt),
            Scenario::DxSweep => format!(" dx={}", r.dx),
            _ => String::new(),
        };
        let its = r
            .outcome
            .iterations
            .map(|n| n.to_string())
            .unwrap_or_else(|| format!("failed ({})", r.outcome.error.as_deref().unwrap_or("")));
        summary.push_str(&format!("ratio={}{} version={} iterations={}\n", r.ratio, value, r.version, its));
    }
    ScenarioReport {
        scenario,
        files,
        summary,
        failures: rows.iter().filter(|r| r.outcome.error.is_some()).count(),
    }
}

fn step_key(scenario: Scenario) -> &'static str {
    if scenario == Scenario::DtSweep {
        "dt"
    } else {
        "dx"
    }
}

fn history_file_name(scenario: Scenario, index: usize, row: &SweepRow) -> String {
    format!("{}_history_{:02}_ratio{}_{}.csv", scenario.name(), index, row.ratio, row.version)
}

/// Convergence factor of one optimized version over the band.
#[derive(Debug, Clone, PartialEq)]
pub struct RhoCurve {
    pub ratio: f64,
    pub version: Version,
    pub params: TransmissionParams,
    pub wt: Vec<f64>,
    pub rho: Vec<f64>,
}

pub fn run_rho_curves(cfg: &ExperimentConfig) -> Result<Vec<RhoCurve>> {
    let band = FrequencyBand::from_grid(cfg.final_time, cfg.dt)?;
    let wt = band.geometric_grid(cfg.rho_points);
    let mut curves = Vec::new();
    for &ratio in &cfg.ratios {
        let pair = DiffusionPair::new(1.0, 1.0 / ratio)?;
        for &version in &cfg.versions {
            let params = optimize(version, &band, &pair)?.params;
            let values = wt.iter().map(|&w| rho(w, &params, &pair)).collect();
            curves.push(RhoCurve {
                ratio,
                version,
                params,
                wt: wt.clone(),
                rho: values,
            });
        }
    }
    Ok(curves)
}

fn rho_curves_report(curves: &[RhoCurve]) -> ScenarioReport {
    let mut t = CsvTable::new(&["ratio", "version", "wt", "rho"]);
    let mut summary = String::new();
    for c in curves {
        for (w, r) in c.wt.iter().zip(&c.rho) {
            t.push(vec![real(c.ratio), c.version.to_string(), real(*w), real(*r)]);
        }
        let max = c.rho.iter().fold(0.0f64, |m, v| m.max(*v));
        summary.push_str(&format!("ratio={} version={} max_rho={max:.6}\n", c.ratio, c.version));
    }
    ScenarioReport {
        scenario: Scenario::RhoCurves,
        files: vec![
            OutputFile {
                name: "rho_curves.csv".into(),
                contents: t.render(),
            },
            OutputFile {
                name: "plot_rho_curves.py".into(),
                contents: plots::rho_curves_plot("rho_curves.csv"),
            },
        ],
        summary,
        failures: 0,
    }
}

/// Scan of the reduced Version III equation over `I_p`.
#[derive(Debug, Clone, PartialEq)]
pub struct RootScan {
    pub mu: f64,
    pub band: FrequencyBand,
    pub interval: Interval,
    pub p: Vec<f64>,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    pub residual: Vec<f64>,
    /// Indices `i` with a sign change between points `i` and `i + 1`.
    pub sign_changes: Vec<usize>,
    /// Linear interpolation of the first sign change.
    pub scan_root: Option<f64>,
    pub bisection_root: Option<f64>,
}

impl RootScan {
    pub fn grid_step(&self) -> f64 {
        self.interval.width() / (self.p.len() - 1) as f64
    }

    pub fn status(&self) -> &'static str {
        match self.sign_changes.len() {
            0 => "no sign change",
            1 => "ok",
            _ => "multiple sign changes",
        }
    }
}

pub fn scan_v3_residual(band: &FrequencyBand, mu: f64, points: usize) -> RootScan {
    let interval = v3_search_interval(band, mu);
    let step = interval.width() / (points - 1) as f64;
    let p: Vec<f64> = (0..points)
        .map(|i| if i + 1 == points { interval.hi } else { interval.lo + i as f64 * step })
        .collect();
    let (lhs, rhs): (Vec<f64>, Vec<f64>) = p.iter().map(|&x| v3_residual_parts(x, band, mu)).unzip();
    let residual: Vec<f64> = lhs.iter().zip(&rhs).map(|(l, r)| l - r).collect();
    let sign_changes: Vec<usize> = residual
        .windows(2)
        .enumerate()
        .filter(|(_, w)| (w[0] < 0.0 && w[1] >= 0.0) || (w[0] > 0.0 && w[1] <= 0.0))
        .map(|(i, _)| i)
        .collect();
    let scan_root = sign_changes.first().map(|&i| {
        let (r0, r1) = (residual[i], residual[i + 1]);
        p[i] + (p[i + 1] - p[i]) * r0 / (r0 - r1)
    });
    let diff = DiffusionPair::new(mu * mu, 1.0).expect("positive mu");
    let bisection_root = optimize_v3(band, &diff)
        .ok()
        .filter(|r| matches!(r.details, OptimizerDetails::VersionIII(Some(_))))
        .map(|r| r.params.p());
    RootScan {
        mu,
        band: *band,
        interval,
        p,
        lhs,
        rhs,
        residual,
        sign_changes,
        scan_root,
        bisection_root,
    }
}

pub fn run_v3_root_scan(cfg: &ExperimentConfig) -> Result<RootScan> {
    let band = FrequencyBand::from_grid(cfg.final_time, cfg.dt)?;
    let mu = cfg.ratios[0].sqrt();
    Ok(scan_v3_residual(&band, mu, cfg.scan_points))
}

fn root_scan_report(scan: &RootScan) -> ScenarioReport {
    let mut t = CsvTable::new(&["p", "lhs", "rhs", "residual"]);
    for i in 0..scan.p.len() {
        t.push(vec![real(scan.p[i]), real(scan.lhs[i]), real(scan.rhs[i]), real(scan.residual[i])]);
    }
    let mut s = CsvTable::new(&[
        "mu",
        "T",
        "dt",
        "points",
        "interval_lo",
        "interval_hi",
        "sign_changes",
        "scan_root",
        "bisection_root",
        "status",
    ]);
    s.push(vec![
        real(scan.mu),
        real(scan.band.final_time()),
        real(scan.band.time_step()),
        scan.p.len().to_string(),
        real(scan.interval.lo),
        real(scan.interval.hi),
        scan.sign_changes.len().to_string(),
        opt_real(scan.scan_root),
        opt_real(scan.bisection_root),
        scan.status().to_string(),
    ]);
    let summary = format!(
        "mu={} sign_changes={} scan_root={} bisection_root={} status={}\n",
        scan.mu,
        scan.sign_changes.len(),
        scan.scan_root.map(|r| format!("{r:.10}")).unwrap_or_default(),
        scan.bisection_root.map(|r| format!("{r:.10}")).unwrap_or_default(),
        scan.status()
    );
    ScenarioReport {
        scenario: Scenario::V3RootScan,
        files: vec![
            OutputFile {
                name: "v3_root_scan.csv".into(),
                contents: t.render(),
            },
            OutputFile {
                name: "v3_root_scan_summary.csv".into(),
                contents: s.render(),
            },
            OutputFile {
                name: "plot_v3_root_scan.py".into(),
                contents: plots::root_scan_plot("v3_root_scan.csv"),
            },
        ],
        summary,
        failures: usize::from(scan.sign_changes.len() != 1),
    }
}

/// One version of a layered multi-subdomain run.
#[derive(Debug, Clone, PartialEq)]
pub struct LayeredVersion {
    pub version: Version,
    pub params: Vec<TransmissionParams>,
    pub outcome: RunOutcome,
    /// `L^inf` distance of the converged combined field to the monolithic one.
    pub match_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayeredRun {
    pub decomposition: Decomposition,
    pub monolithic: SpaceTimeField,
    pub versions: Vec<LayeredVersion>,
}

pub fn run_layered(cfg: &ExperimentConfig) -> Result<LayeredRun> {
    let nu = DiffusionField::layered(cfg.nu.clone(), cfg.breakpoints.clone())?;
    let problem = ProblemSpec::new(nu, cfg.final_time, cfg.dt)?
        .with_constant_initial(cfg.u0)
        .with_constant_boundary(cfg.g_left, cfg.g_right)
        .with_mass(cfg.mass);
    let mesh = Mesh1D::with_spacing(0.0, 1.0, cfg.dx)?;
    let decomposition = decompose(&mesh, &cfg.interfaces)?;
    let monolithic = solve_monolithic(&problem, &mesh)?;
    let band = FrequencyBand::from_grid(cfg.final_time, cfg.dt)?;
    let pairs = decomposition.interface_pairs(&problem)?;
    let options = oswr_options(cfg);
    let versions = cfg
        .versions
        .par_iter()
        .map(|&version| {
            let params = pairs
                .iter()
                .map(|pair| interface_params_for(version, &band, pair))
                .collect::<Result<Vec<_>>>()?;
            let outcome = iterate(&problem, &decomposition, &params, &monolithic, &options, true);
            let match_error = outcome.combined.as_ref().map(|c| c.max_abs_diff_from(&monolithic, 0));
            Ok(LayeredVersion {
                version,
                params,
                outcome,
                match_error,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LayeredRun {
        decomposition,
        monolithic,
        versions,
    })
}

fn field_table(field: &SpaceTimeField) -> String {
    let mut t = CsvTable::new(&["x", "t", "u"]);
    let dt = field.time_step();
    for n in 0..=field.n_steps() {
        for (x, u) in field.mesh().nodes().iter().zip(field.level(n)) {
            t.push(vec![real(*x), real(n as f64 * dt), real(*u)]);
        }
    }
    t.render()
}

fn layered_report(scenario: Scenario, run: &LayeredRun) -> ScenarioReport {
    let prefix = if scenario == Scenario::Custom { "custom" } else { "tps" };
    let mut hist = CsvTable::new(&["version", "iteration", "error"]);
    let mut params = CsvTable::new(&[
        "version",
        "interface",
        "x",
        "sigma1",
        "sigma2",
        "iterations",
        "final_error",
        "match_error",
        "error",
    ]);
    let mut files = Vec::new();
    let mut summary = String::new();
    for v in &run.versions {
        for (i, e) in v.outcome.history.iter().enumerate() {
            hist.push(vec![v.version.to_string(), (i + 1).to_string(), real(*e)]);
        }
        for (i, p) in v.params.iter().enumerate() {
            params.push(vec![
                v.version.to_string(),
                i.to_string(),
                real(run.decomposition.interfaces()[i]),
                real(p.sigma1()),
                real(p.sigma2()),
                opt_count(v.outcome.iterations),
                real(v.outcome.final_error),
                opt_real(v.match_error),
                text(v.outcome.error.as_deref().unwrap_or("")),
            ]);
        }
        if let Some(field) = &v.outcome.combined {
            files.push(OutputFile {
                name: format!("{prefix}_field_{}.csv", v.version),
                contents: field_table(field),
            });
        }
        summary.push_str(&format!(
            "version={} iterations={} match_error={}\n",
            v.version,
            v.outcome.iterations.map(|n| n.to_string()).unwrap_or_else(|| "failed".into()),
            v.match_error.map(|e| format!("{e:.3e}")).unwrap_or_default()
        ));
    }
    files.insert(
        0,
        OutputFile {
            name: format!("{prefix}_histories.csv"),
            contents: hist.render(),
        },
    );
    files.insert(
        1,
        OutputFile {
            name: format!("{prefix}_summary.csv"),
            contents: params.render(),
        },
    );
    files.push(OutputFile {
        name: format!("plot_{prefix}.py"),
        contents: plots::layered_plot(&format!("{prefix}_histories.csv")),
    });
    ScenarioReport {
        scenario,
        files,
        summary,
        failures: run.versions.iter().filter(|v| v.outcome.error.is_some()).count(),
    }
}

/// Analytic optimum against the brute-force grid min-max.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleRow {
    pub ratio: f64,
    pub version: Version,
    pub analytic: OptimizedResult,
    pub oracle: OracleResult,
    /// Distance of the oracle argmin to the analytic minimizer set, in grid
    /// cells (log spacing).
    pub p_cells: f64,
    pub q_cells: Option<f64>,
}

impl OracleRow {
    pub fn value_ok(&self) -> bool {
        self.analytic.rho_star <= self.oracle.rho_star + 1e-3
    }

    pub fn argmin_ok(&self) -> bool {
        self.p_cells <= 1.0 && self.q_cells.is_none_or(|c| c <= 1.0)
    }
}

fn cells_to_set(x: f64, set: &[Interval], step: f64) -> f64 {
    set.iter()
        .map(|i| {
            if x < i.lo {
                (i.lo / x).ln()
            } else if x > i.hi {
                (x / i.hi).ln()
            } else {
                0.0
            }
        })
        .fold(f64::INFINITY, f64::min)
        / step
}

pub fn oracle_row(
    band: &FrequencyBand,
    ratio: f64,
    version: Version,
    param_points: usize,
    freq_points: usize,
) -> Result<OracleRow> {
    let pair = DiffusionPair::new(1.0, 1.0 / ratio)?;
    let analytic = optimize(version, band, &pair)?;
    let oracle = brute_force_minmax(band, &pair, version, param_points, freq_points)?;
    let p_step = OracleResult::log_step(&oracle.p_grid);
    let p_set = match version {
        Version::I => v1_minimizers(band, &pair)?,
        Version::II => vec![Interval::new(analytic.params.q(), analytic.params.q())],
        _ => vec![Interval::new(analytic.params.p(), analytic.params.p())],
    };
    let oracle_first = if version == Version::II { oracle.params.q() } else { oracle.params.p() };
    let p_cells = cells_to_set(oracle_first, &p_set, p_step);
    let q_cells = oracle.q_grid.as_ref().map(|g| {
        let q = analytic.params.q();
        cells_to_set(oracle.params.q(), &[Interval::new(q, q)], OracleResult::log_step(g))
    });
    Ok(OracleRow {
        ratio,
        version,
        analytic,
        oracle,
        p_cells,
        q_cells,
    })
}

pub fn run_oracle(cfg: &ExperimentConfig) -> Result<Vec<OracleRow>> {
    let band = FrequencyBand::from_grid(cfg.final_time, cfg.dt)?;
    let jobs: Vec<(f64, Version)> = cfg
        .ratios
        .iter()
        .flat_map(|&r| cfg.versions.iter().map(move |&v| (r, v)))
        .collect();
    jobs.iter()
        .map(|&(r, v)| oracle_row(&band, r, v, cfg.oracle_param_points, cfg.oracle_freq_points))
        .collect()
}

fn oracle_report(rows: &[OracleRow]) -> ScenarioReport {
    let mut t = CsvTable::new(&[
        "ratio",
        "version",
        "analytic_p",
        "analytic_q",
        "analytic_rho",
        "oracle_p",
        "oracle_q",
        "oracle_rho",
        "p_cells",
        "q_cells",
        "value_ok",
        "argmin_ok",
    ]);
    let mut summary = String::new();
    for r in rows {
        t.push(vec![
            real(r.ratio),
            r.version.to_string(),
            real(r.analytic.params.p()),
            real(r.analytic.params.q()),
            real(r.analytic.rho_star),
            real(r.oracle.params.p()),
            real(r.oracle.params.q()),
            real(r.oracle.rho_star),
            real(r.p_cells),
            opt_real(r.q_cells),
            r.value_ok().to_string(),
            r.argmin_ok().to_string(),
        ]);
        summary.push_str(&format!(
            "ratio={} version={} analytic_rho={:.6} oracle_rho={:.6} certified={}\n",
            r.ratio,
            r.version,
            r.analytic.rho_star,
            r.oracle.rho_star,
            r.value_ok() && r.argmin_ok()
        ));
    }
    ScenarioReport {
        scenario: Scenario::Oracle,
        files: vec![OutputFile {
            name: "oracle.csv".into(),
            contents: t.render(),
        }],
        summary,
        failures: rows.iter().filter(|r| !(r.value_ok() && r.argmin_ok())).count(),
    }
}

