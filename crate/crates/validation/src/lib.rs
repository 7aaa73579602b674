//! Helpers for the acceptance suite: a PASS/FAIL reporter and the
//! manufactured-solution convergence study.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use oswr_core::heat::{solve_monolithic, DiffusionField, Mesh1D, ProblemSpec};
use oswr_core::Result;

/// Result of one criterion.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub passed: bool,
    pub detail: String,
}

impl Verdict {
    pub fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self {
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Default)]
pub struct Report {
    results: Vec<(usize, String, bool)>,
}

impl Report {
    /// Runs `check`, printing one PASS/FAIL line. Panics count as failures.
    pub fn criterion(&mut self, id: usize, name: &str, check: impl FnOnce() -> Verdict) {
        let start = Instant::now();
        let verdict = catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|e| {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_else(|| "panic".into());
                Verdict::new(false, format!("panicked: {msg}"))
            });
        let status = if verdict.passed { "PASS" } else { "FAIL" };
        println!(
            "{status} [{id:>2}] {name}: {} ({:.2} s)",
            verdict.detail,
            start.elapsed().as_secs_f64()
        );
        self.results.push((id, name.to_string(), verdict.passed));
    }

    pub fn failed(&self) -> Vec<usize> {
        self.results.iter().filter(|r| !r.2).map(|r| r.0).collect()
    }

    pub fn total(&self) -> usize {
        self.results.len()
    }
}

/// `sin(pi x) e^{-t}` on `(0, 1)` with `nu = 1`.
pub fn manufactured_problem(final_time: f64, dt: f64) -> Result<ProblemSpec> {
    use std::f64::consts::PI;
    Ok(ProblemSpec::new(DiffusionField::constant(1.0)?, final_time, dt)?
        .with_initial(|x| (PI * x).sin())
        .with_source(|x, t| (PI * PI - 1.0) * (PI * x).sin() * (-t).exp()))
}

/// Max-norm nodal error at the final time.
pub fn manufactured_error(final_time: f64, dt: f64, n_elements: usize) -> Result<f64> {
    use std::f64::consts::PI;
    let problem = manufactured_problem(final_time, dt)?;
    let mesh = Mesh1D::uniform(0.0, 1.0, n_elements)?;
    let u = solve_monolithic(&problem, &mesh)?;
    let decay = (-final_time).exp();
    Ok(mesh
        .nodes()
        .iter()
        .zip(u.final_level())
        .map(|(x, v)| (v - (PI * x).sin() * decay).abs())
        .fold(0.0, f64::max))
}

/// `log2(e_k / e_{k+1})` for a sequence of halved step sizes.
pub fn observed_orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

/// Temporal study: `dt = 1/10 .. 1/80` on 2000 elements, `T = 1`.
pub fn temporal_study() -> Result<Vec<f64>> {
    [10.0, 20.0, 40.0, 80.0]
        .iter()
        .map(|n| manufactured_error(1.0, 1.0 / n, 2000))
        .collect()
}

/// Spatial study: 8 .. 64 elements with `dt = 1e-5`, `T = 0.1`.
pub fn spatial_study() -> Result<Vec<f64>> {
    [8, 16, 32, 64]
        .iter()
        .map(|&n| manufactured_error(0.1, 1e-5, n))
        .collect()
}
