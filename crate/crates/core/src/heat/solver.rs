use crate::error::{ensure_positive, Error, Result};
use crate::heat::assembly::{assemble_with_elements, load_vector, Operators};
use crate::heat::{Mesh1D, ProblemSpec, SpaceTimeField};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Robin data `nu d_n u + sigma u = g` at one end; `values[n - 1] = g(t_n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RobinBoundaryData {
    pub side: Side,
    pub sigma: f64,
    pub values: Vec<f64>,
}

impl RobinBoundaryData {
    pub fn new(side: Side, sigma: f64, values: Vec<f64>) -> Result<Self> {
        ensure_positive("sigma", sigma)?;
        Ok(Self { side, sigma, values })
    }
}

/// Condition at one end of a local problem. Series hold levels `1..=N`.
#[derive(Debug, Clone, PartialEq)]
pub enum EndCondition {
    Dirichlet(Vec<f64>),
    Robin(RobinBoundaryData),
}

/// Solution of a local solve with the outward variational flux at every
/// Robin end, levels `1..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalSolution {
    pub field: SpaceTimeField,
    pub left_flux: Option<Vec<f64>>,
    pub right_flux: Option<Vec<f64>>,
}

/// Backward-Euler P1 problem on a (sub)mesh with precomputed operators
/// and loads.
#[derive(Debug, Clone)]
pub struct LocalProblem {
    mesh: Mesh1D,
    ops: Operators,
    /// `loads[n - 1]` is the load at `t_n`; `None` for a zero source.
    loads: Option<Vec<Vec<f64>>>,
    initial: Vec<f64>,
    time_step: f64,
    n_steps: usize,
}

impl LocalProblem {
    pub fn new(problem: &ProblemSpec, mesh: &Mesh1D) -> Result<Self> {
        let nu = problem.diffusion.element_values(mesh)?;
        let ops = assemble_with_elements(mesh, &nu, problem.mass);
        let loads = problem.source.as_ref().map(|f| {
            (1..=problem.n_steps())
                .map(|n| load_vector(mesh, f.as_ref(), problem.time(n)))
                .collect()
        });
        let initial = mesh.nodes().iter().map(|&x| (problem.initial)(x)).collect();
        Ok(Self {
            mesh: mesh.clone(),
            ops,
            loads,
            initial,
            time_step: problem.time_step(),
            n_steps: problem.n_steps(),
        })
    }

    pub fn mesh(&self) -> &Mesh1D {
        &self.mesh
    }

    pub fn operators(&self) -> &Operators {
        &self.ops
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn initial(&self) -> &[f64] {
        &self.initial
    }

    fn check_end(&self, end: &EndCondition, side: Side) -> Result<()> {
        let len = match end {
            EndCondition::Dirichlet(v) => v.len(),
            EndCondition::Robin(r) => {
                if r.side != side {
                    return Err(Error::invalid("robin", "boundary data attached to the wrong side"));
                }
                ensure_positive("sigma", r.sigma)?;
                r.values.len()
            }
        };
        if len != self.n_steps {
            return Err(Error::invalid(
                "boundary",
                format!("series has {len} values, expected {}", self.n_steps),
            ));
        }
        Ok(())
    }

    pub fn solve(&self, left: &EndCondition, right: &EndCondition) -> Result<LocalSolution> {
        self.check_end(left, Side::Left)?;
        self.check_end(right, Side::Right)?;
        let dt = self.time_step;
        let last = self.mesh.n_nodes() - 1;
        let mut system = self.ops.mass.add_scaled(dt, &self.ops.stiffness);
        match left {
            EndCondition::Dirichlet(_) => {
                system.diag[0] = 1.0;
                system.upper[0] = 0.0;
            }
            EndCondition::Robin(r) => system.diag[0] += dt * r.sigma,
        }
        match right {
            EndCondition::Dirichlet(_) => {
                system.diag[last] = 1.0;
                system.lower[last - 1] = 0.0;
            }
            EndCondition::Robin(r) => system.diag[last] += dt * r.sigma,
        }
        let factor = system.factor()?;

        let mut field = SpaceTimeField::new(self.mesh.clone(), dt, self.n_steps, &self.initial);
        for n in 1..=self.n_steps {
            let (prev, next) = field.step_pair(n);
            self.ops.mass.matvec_into(prev, next);
            if let Some(loads) = &self.loads {
                for (r, l) in next.iter_mut().zip(&loads[n - 1]) {
                    *r += dt * l;
                }
            }
            match left {
                EndCondition::Dirichlet(v) => next[0] = v[n - 1],
                EndCondition::Robin(r) => next[0] += dt * r.values[n - 1],
            }
            match right {
                EndCondition::Dirichlet(v) => next[last] = v[n - 1],
                EndCondition::Robin(r) => next[last] += dt * r.values[n - 1],
            }
            factor.solve_in_place(next);
        }
        if !field.all_finite() {
            return Err(Error::SingularSystem { row: 0 });
        }
        let left_flux = matches!(left, EndCondition::Robin(_)).then(|| self.variational_flux(&field, Side::Left));
        let right_flux = matches!(right, EndCondition::Robin(_)).then(|| self.variational_flux(&field, Side::Right));
        Ok(LocalSolution {
            field,
            left_flux,
            right_flux,
        })
    }

    /// Outward flux `nu d_n u` at `side` for levels `1..=N`, from the
    /// residual of the boundary row:
    /// `[M (u^n - u^(n-1)) / dt + K u^n - F^n]_row`.
    pub fn variational_flux(&self, field: &SpaceTimeField, side: Side) -> Vec<f64> {
        assert_eq!(field.n_nodes(), self.mesh.n_nodes());
        assert_eq!(field.n_steps(), self.n_steps);
        let row = match side {
            Side::Left => 0,
            Side::Right => self.mesh.n_nodes() - 1,
        };
        let dt = self.time_step;
        (1..=self.n_steps)
            .map(|n| {
                let (prev, cur) = (field.level(n - 1), field.level(n));
                let mut r = (self.ops.mass.row_dot(row, cur) - self.ops.mass.row_dot(row, prev)) / dt
                    + self.ops.stiffness.row_dot(row, cur);
                if let Some(loads) = &self.loads {
                    r -= loads[n - 1][row];
                }
                r
            })
            .collect()
    }
}

/// Reference solve on the full mesh with Dirichlet data at both ends.
pub fn solve_monolithic(problem: &ProblemSpec, mesh: &Mesh1D) -> Result<SpaceTimeField> {
    let local = LocalProblem::new(problem, mesh)?;
    let series = |g: &crate::heat::problem::TimeFn| (1..=problem.n_steps()).map(|n| g(problem.time(n))).collect();
    let left = EndCondition::Dirichlet(series(&problem.g_left));
    let right = EndCondition::Dirichlet(series(&problem.g_right));
    Ok(local.solve(&left, &right)?.field)
}
