use std::fmt;
use std::sync::Arc;

use crate::error::{ensure_positive, Error, Result};
use crate::heat::Mesh1D;

pub type SpaceTimeFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
pub type SpaceFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type TimeFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Piecewise-constant diffusion coefficient.
///
/// Layer `k` covers `(breakpoints[k-1], breakpoints[k])`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionField {
    values: Vec<f64>,
    breakpoints: Vec<f64>,
}

impl DiffusionField {
    pub fn constant(nu: f64) -> Result<Self> {
        Self::layered(vec![nu], Vec::new())
    }

    pub fn layered(values: Vec<f64>, breakpoints: Vec<f64>) -> Result<Self> {
        if values.len() != breakpoints.len() + 1 {
            return Err(Error::invalid(
                "nu",
                format!("{} layers need {} breakpoints, got {}", values.len(), values.len() - 1, breakpoints.len()),
            ));
        }
        for &v in &values {
            ensure_positive("nu", v)?;
        }
        if breakpoints.windows(2).any(|w| w[1] <= w[0]) || breakpoints.iter().any(|b| !b.is_finite()) {
            return Err(Error::invalid("breakpoints", "must be finite and strictly increasing"));
        }
        Ok(Self { values, breakpoints })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn value_at(&self, x: f64) -> f64 {
        let k = self.breakpoints.partition_point(|b| *b <= x);
        self.values[k]
    }

    /// Per-element coefficients; every breakpoint inside the mesh must be a
    /// node.
    pub fn element_values(&self, mesh: &Mesh1D) -> Result<Vec<f64>> {
        for &b in &self.breakpoints {
            if b > mesh.a() && b < mesh.b() {
                mesh.node_index(b, "diffusion breakpoint")?;
            }
        }
        Ok((0..mesh.n_elements())
            .map(|e| self.value_at(mesh.element_midpoint(e)))
            .collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MassKind {
    #[default]
    Consistent,
    Lumped,
}

/// Heat problem `u_t = (nu u_x)_x + f` with Dirichlet data at both ends.
#[derive(Clone)]
pub struct ProblemSpec {
    pub diffusion: DiffusionField,
    pub source: Option<SpaceTimeFn>,
    pub initial: SpaceFn,
    pub g_left: TimeFn,
    pub g_right: TimeFn,
    pub mass: MassKind,
    final_time: f64,
    time_step: f64,
    n_steps: usize,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("diffusion", &self.diffusion)
            .field("has_source", &self.source.is_some())
            .field("mass", &self.mass)
            .field("final_time", &self.final_time)
            .field("time_step", &self.time_step)
            .finish()
    }
}

impl ProblemSpec {
    /// Homogeneous problem: zero source, zero initial and boundary data.
    pub fn new(diffusion: DiffusionField, final_time: f64, time_step: f64) -> Result<Self> {
        ensure_positive("T", final_time)?;
        ensure_positive("dt", time_step)?;
        let count = final_time / time_step;
        let n = count.round();
        if n < 1.0 || (count - n).abs() > 1e-9 * n {
            return Err(Error::invalid("dt", format!("{time_step} does not divide T = {final_time}")));
        }
        Ok(Self {
            diffusion,
            source: None,
            initial: Arc::new(|_| 0.0),
            g_left: Arc::new(|_| 0.0),
            g_right: Arc::new(|_| 0.0),
            mass: MassKind::Consistent,
            final_time,
            time_step,
            n_steps: n as usize,
        })
    }

    pub fn with_source(mut self, f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        self.source = Some(Arc::new(f));
        self
    }

    pub fn with_initial(mut self, u0: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.initial = Arc::new(u0);
        self
    }

    pub fn with_constant_initial(self, value: f64) -> Self {
        self.with_initial(move |_| value)
    }

    pub fn with_boundary(
        mut self,
        left: impl Fn(f64) -> f64 + Send + Sync + 'static,
        right: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.g_left = Arc::new(left);
        self.g_right = Arc::new(right);
        self
    }

    pub fn with_constant_boundary(self, left: f64, right: f64) -> Self {
        self.with_boundary(move |_| left, move |_| right)
    }

    pub fn with_mass(mut self, mass: MassKind) -> Self {
        self.mass = mass;
        self
    }

    pub fn final_time(&self) -> f64 {
        self.final_time
    }

    pub fn time_step(&self) -> f64 {
        self.time_step
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn time(&self, level: usize) -> f64 {
        level as f64 * self.time_step
    }
}
