//! Optimized Schwarz waveform relaxation on a nonoverlapping decomposition.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::frequency::{DiffusionPair, FrequencyBand, TransmissionParams, Version};
use crate::heat::{
    solve_monolithic, EndCondition, LocalProblem, LocalSolution, Mesh1D, ProblemSpec, RobinBoundaryData, Side,
    SpaceTimeField,
};
use crate::optimizer::optimize;

/// Subdomains cut from a global mesh at interior nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    global: Mesh1D,
    interfaces: Vec<f64>,
    /// Global node range `(first, last)` of each subdomain.
    ranges: Vec<(usize, usize)>,
    meshes: Vec<Mesh1D>,
}

pub fn decompose(mesh: &Mesh1D, interfaces: &[f64]) -> Result<Decomposition> {
    let mut cuts = vec![0];
    for &x in interfaces {
        let i = mesh.node_index(x, "interface")?;
        if i <= *cuts.last().unwrap() || i >= mesh.n_elements() {
            return Err(Error::invalid(
                "interfaces",
                format!("{x} must be an interior node strictly right of the previous interface"),
            ));
        }
        cuts.push(i);
    }
    cuts.push(mesh.n_elements());
    let ranges: Vec<(usize, usize)> = cuts.windows(2).map(|w| (w[0], w[1])).collect();
    let mut meshes = Vec::with_capacity(ranges.len());
    for &(first, last) in &ranges {
        if last - first < 2 {
            return Err(Error::invalid("interfaces", "every subdomain needs at least 2 elements"));
        }
        meshes.push(mesh.sub_mesh(first, last)?);
    }
    Ok(Decomposition {
        global: mesh.clone(),
        interfaces: interfaces.to_vec(),
        ranges,
        meshes,
    })
}

impl Decomposition {
    pub fn global(&self) -> &Mesh1D {
        &self.global
    }

    pub fn interfaces(&self) -> &[f64] {
        &self.interfaces
    }

    pub fn n_subdomains(&self) -> usize {
        self.meshes.len()
    }

    pub fn meshes(&self) -> &[Mesh1D] {
        &self.meshes
    }

    pub fn ranges(&self) -> &[(usize, usize)] {
        &self.ranges
    }

    /// Global node index of interface `i`.
    pub fn interface_node(&self, i: usize) -> usize {
        self.ranges[i].1
    }

    /// Diffusion coefficients on the elements left and right of each interface.
    pub fn interface_pairs(&self, problem: &ProblemSpec) -> Result<Vec<DiffusionPair>> {
        let nu = problem.diffusion.element_values(&self.global)?;
        (0..self.interfaces.len())
            .map(|i| {
                let node = self.interface_node(i);
                DiffusionPair::new(nu[node - 1], nu[node])
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitMode {
    /// Zero traces and fluxes.
    #[default]
    Zero,
    /// Traces equal to the initial condition at the interface, zero fluxes.
    Initial,
    /// Traces and fluxes of the monolithic solution.
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SweepMode {
    /// Left-to-right, each subdomain uses its left neighbor's fresh data.
    #[default]
    GaussSeidel,
    /// All subdomains use data from the previous iteration.
    Jacobi,
}

macro_rules! keyword_enum {
    ($ty:ty, $name:literal, $($text:literal => $variant:expr),+) => {
        impl FromStr for $ty {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s.trim().to_ascii_lowercase().as_str() {
                    $($text => Ok($variant),)+
                    other => Err(Error::invalid($name, format!("unknown value `{other}`"))),
                }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                let text = [$(($variant, $text)),+]
                    .into_iter()
                    .find(|(v, _)| v == self)
                    .map(|(_, t)| t)
                    .unwrap();
                f.write_str(text)
            }
        }
    };
}

keyword_enum!(InitMode, "init", "zero" => InitMode::Zero, "initial" => InitMode::Initial, "exact" => InitMode::Exact);
keyword_enum!(SweepMode, "sweep", "gauss_seidel" => SweepMode::GaussSeidel, "jacobi" => SweepMode::Jacobi);

#[derive(Debug, Clone, PartialEq)]
pub struct OswrOptions {
    pub tolerance: f64,
    pub max_iter: usize,
    pub init: InitMode,
    pub sweep: SweepMode,
    /// Divergence is reported once `e^n > divergence_factor * e^1`.
    pub divergence_factor: f64,
}

impl Default for OswrOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-8,
            max_iter: 1000,
            init: InitMode::Zero,
            sweep: SweepMode::GaussSeidel,
            divergence_factor: 1e6,
        }
    }
}

/// Error `e^n` after every iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceHistory {
    pub errors: Vec<f64>,
    pub tolerance: f64,
    pub converged: bool,
}

impl ConvergenceHistory {
    pub fn iterations(&self) -> usize {
        self.errors.len()
    }

    /// First iteration with `e^n <= tolerance`.
    pub fn iterations_to_tolerance(&self) -> Option<usize> {
        self.errors.iter().position(|e| *e <= self.tolerance).map(|i| i + 1)
    }

    pub fn last_error(&self) -> Option<f64> {
        self.errors.last().copied()
    }
}

/// Waveform data on both sides of every interface, levels `1..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct InterfaceState {
    /// Trace of the left subdomain at the interface.
    pub left_trace: Vec<f64>,
    /// Outward flux of the left subdomain (pointing right).
    pub left_flux: Vec<f64>,
    pub right_trace: Vec<f64>,
    /// Outward flux of the right subdomain (pointing left).
    pub right_flux: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OswrOutcome {
    pub history: ConvergenceHistory,
    pub fields: Vec<SpaceTimeField>,
}

impl OswrOutcome {
    /// Global field assembled from the subdomain fields; interface nodes are
    /// taken from the left subdomain.
    pub fn combined(&self, decomposition: &Decomposition) -> SpaceTimeField {
        let first = &self.fields[0];
        let n_steps = first.n_steps();
        let mut global = SpaceTimeField::new(
            decomposition.global.clone(),
            first.time_step(),
            n_steps,
            &vec![0.0; decomposition.global.n_nodes()],
        );
        for n in 0..=n_steps {
            let level = global.level_mut(n);
            for (field, &(a, b)) in self.fields.iter().zip(&decomposition.ranges).rev() {
                level[a..=b].copy_from_slice(field.level(n));
            }
        }
        global
    }
}

/// `L^inf` distance between the subdomain fields and the monolithic field
/// over all nodes and levels `1..=N`. NaN propagates.
pub fn combined_error(monolithic: &SpaceTimeField, decomposition: &Decomposition, fields: &[SpaceTimeField]) -> f64 {
    let mut e = 0.0f64;
    for (field, &(a, _)) in fields.iter().zip(&decomposition.ranges) {
        let d = field.max_abs_diff_from(monolithic, a);
        if d.is_nan() {
            return f64::NAN;
        }
        e = e.max(d);
    }
    e
}

/// Optimized parameters for one interface with local pair `(nu_left, nu_right)`.
pub fn interface_params_for(version: Version, band: &FrequencyBand, pair: &DiffusionPair) -> Result<TransmissionParams> {
    Ok(optimize(version, band, pair)?.params)
}

/// Optimized parameters for every interface of `decomposition`.
pub fn interface_params(version: Version, problem: &ProblemSpec, decomposition: &Decomposition) -> Result<Vec<TransmissionParams>> {
    let band = FrequencyBand::from_grid(problem.final_time(), problem.time_step())?;
    decomposition
        .interface_pairs(problem)?
        .iter()
        .map(|pair| interface_params_for(version, &band, pair))
        .collect()
}

struct Subdomains {
    locals: Vec<LocalProblem>,
    left_bc: EndCondition,
    right_bc: EndCondition,
}

impl Subdomains {
    fn new(problem: &ProblemSpec, decomposition: &Decomposition) -> Result<Self> {
        let locals = decomposition
            .meshes
            .iter()
            .map(|m| LocalProblem::new(problem, m))
            .collect::<Result<Vec<_>>>()?;
        let series = |g: &crate::heat::problem::TimeFn| (1..=problem.n_steps()).map(|n| g(problem.time(n))).collect();
        Ok(Self {
            locals,
            left_bc: EndCondition::Dirichlet(series(&problem.g_left)),
            right_bc: EndCondition::Dirichlet(series(&problem.g_right)),
        })
    }

    fn solve(&self, s: usize, state: &[InterfaceState], params: &[TransmissionParams]) -> Result<LocalSolution> {
        let last = self.locals.len() - 1;
        let left = if s == 0 {
            self.left_bc.clone()
        } else {
            let (i, sigma) = (s - 1, params[s - 1].sigma2());
            let g = robin_values(sigma, &state[i].left_trace, &state[i].left_flux);
            EndCondition::Robin(RobinBoundaryData::new(Side::Left, sigma, g)?)
        };
        let right = if s == last {
            self.right_bc.clone()
        } else {
            let sigma = params[s].sigma1();
            let g = robin_values(sigma, &state[s].right_trace, &state[s].right_flux);
            EndCondition::Robin(RobinBoundaryData::new(Side::Right, sigma, g)?)
        };
        self.locals[s].solve(&left, &right)
    }
}

/// `g = -(neighbor outward flux) + sigma * (neighbor trace)`.
fn robin_values(sigma: f64, trace: &[f64], flux: &[f64]) -> Vec<f64> {
    trace.iter().zip(flux).map(|(u, f)| sigma * u - f).collect()
}

fn record(state: &mut [InterfaceState], s: usize, solution: &LocalSolution) {
    let field = &solution.field;
    if s > 0 {
        state[s - 1].right_trace = field.node_series(0);
        state[s - 1].right_flux = solution.left_flux.clone().expect("Robin end has a flux");
    }
    if s < state.len() {
        state[s].left_trace = field.node_series(field.n_nodes() - 1);
        state[s].left_flux = solution.right_flux.clone().expect("Robin end has a flux");
    }
}

fn initial_state(
    problem: &ProblemSpec,
    decomposition: &Decomposition,
    subdomains: &Subdomains,
    monolithic: &SpaceTimeField,
    init: InitMode,
) -> Vec<InterfaceState> {
    let n = problem.n_steps();
    (0..decomposition.interfaces.len())
        .map(|i| {
            let node = decomposition.interface_node(i);
            match init {
                InitMode::Zero => InterfaceState {
                    left_trace: vec![0.0; n],
                    left_flux: vec![0.0; n],
                    right_trace: vec![0.0; n],
                    right_flux: vec![0.0; n],
                },
                InitMode::Initial => {
                    let u0 = (problem.initial)(decomposition.global.nodes()[node]);
                    InterfaceState {
                        left_trace: vec![u0; n],
                        left_flux: vec![0.0; n],
                        right_trace: vec![u0; n],
                        right_flux: vec![0.0; n],
                    }
                }
                InitMode::Exact => {
                    let (la, lb) = decomposition.ranges[i];
                    let (ra, rb) = decomposition.ranges[i + 1];
                    let trace = monolithic.node_series(node);
                    InterfaceState {
                        left_trace: trace.clone(),
                        left_flux: subdomains.locals[i].variational_flux(&monolithic.restrict(la, lb), Side::Right),
                        right_trace: trace,
                        right_flux: subdomains.locals[i + 1].variational_flux(&monolithic.restrict(ra, rb), Side::Left),
                    }
                }
            }
        })
        .collect()
}

/// Runs the iteration until `e^n <= tolerance`, divergence, or `max_iter`.
///
/// `params[i]` acts at interface `i`: `sigma1` on the left subdomain's
/// right end, `sigma2` on the right subdomain's left end.
pub fn oswr_iterate(
    problem: &ProblemSpec,
    decomposition: &Decomposition,
    params: &[TransmissionParams],
    monolithic: &SpaceTimeField,
    options: &OswrOptions,
) -> Result<OswrOutcome> {
    if params.len() != decomposition.interfaces.len() {
        return Err(Error::invalid(
            "params",
            format!("{} parameter sets for {} interfaces", params.len(), decomposition.interfaces.len()),
        ));
    }
    if monolithic.n_nodes() != decomposition.global.n_nodes() || monolithic.n_steps() != problem.n_steps() {
        return Err(Error::invalid("monolithic", "reference field does not match the problem grid"));
    }
    if options.max_iter == 0 {
        return Err(Error::invalid("max_iter", "must be at least 1"));
    }
    let subdomains = Subdomains::new(problem, decomposition)?;
    let mut state = initial_state(problem, decomposition, &subdomains, monolithic, options.init);
    let mut history = ConvergenceHistory {
        errors: Vec::new(),
        tolerance: options.tolerance,
        converged: false,
    };
    let n_sub = decomposition.n_subdomains();
    for _ in 0..options.max_iter {
        let solutions: Vec<LocalSolution> = match options.sweep {
            SweepMode::GaussSeidel => {
                let mut out = Vec::with_capacity(n_sub);
                for s in 0..n_sub {
                    let sol = subdomains.solve(s, &state, params)?;
                    record(&mut state, s, &sol);
                    out.push(sol);
                }
                out
            }
            SweepMode::Jacobi => {
                let out = (0..n_sub)
                    .into_par_iter()
                    .map(|s| subdomains.solve(s, &state, params))
                    .collect::<Result<Vec<_>>>()?;
                for (s, sol) in out.iter().enumerate() {
                    record(&mut state, s, sol);
                }
                out
            }
        };
        let fields: Vec<SpaceTimeField> = solutions.into_iter().map(|s| s.field).collect();
        let e = combined_error(monolithic, decomposition, &fields);
        history.errors.push(e);
        let first = history.errors[0];
        if e.is_nan() || e > options.divergence_factor * first {
            return Err(Error::Diverged {
                history: Box::new(history),
            });
        }
        if e <= options.tolerance {
            history.converged = true;
            return Ok(OswrOutcome { history, fields });
        }
    }
    Err(Error::NotConverged {
        history: Box::new(history),
    })
}

/// Monolithic reference plus the iteration, for convenience.
pub fn run_oswr(
    problem: &ProblemSpec,
    decomposition: &Decomposition,
    params: &[TransmissionParams],
    options: &OswrOptions,
) -> Result<(SpaceTimeField, OswrOutcome)> {
    let monolithic = solve_monolithic(problem, decomposition.global())?;
    let outcome = oswr_iterate(problem, decomposition, params, &monolithic, options)?;
    Ok((monolithic, outcome))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heat::DiffusionField;

    #[test]
    fn decompose_examples() {
        let mesh = Mesh1D::uniform(0.0, 1.0, 4).unwrap();
        let d = decompose(&mesh, &[0.5]).unwrap();
        assert_eq!(d.ranges(), &[(0, 2), (2, 4)]);
        assert!(matches!(decompose(&mesh, &[0.3]), Err(Error::NotAMeshNode { .. })));
        assert!(decompose(&mesh, &[0.0]).is_err());
        assert!(decompose(&mesh, &[0.5, 0.5]).is_err());

        let fine = Mesh1D::with_spacing(0.0, 1.0, 0.01).unwrap();
        let d = decompose(&fine, &[0.2, 0.4]).unwrap();
        let counts: Vec<usize> = d.meshes().iter().map(Mesh1D::n_elements).collect();
        assert_eq!(counts, vec![20, 20, 60]);
        assert_eq!(counts.iter().sum::<usize>(), fine.n_elements());
        assert_eq!(d.meshes()[0].b(), d.meshes()[1].a());
    }

    #[test]
    fn combined_error_examples() {
        let mesh = Mesh1D::uniform(0.0, 1.0, 4).unwrap();
        let d = decompose(&mesh, &[0.5]).unwrap();
        let mut global = SpaceTimeField::new(mesh.clone(), 0.5, 2, &[1.0; 5]);
        global.level_mut(1).copy_from_slice(&[0.0, 1.0, 2.0, 3.0, 4.0]);
        let mut fields = vec![global.restrict(0, 2), global.restrict(2, 4)];
        assert_eq!(combined_error(&global, &d, &fields), 0.0);
        fields[1].level_mut(2)[0] += 0.75;
        assert_eq!(combined_error(&global, &d, &fields), 0.75);
        // level 0 is excluded
        fields[0].level_mut(0)[1] += 100.0;
        assert_eq!(combined_error(&global, &d, &fields), 0.75);
    }

    #[test]
    fn keyword_round_trip() {
        for m in [InitMode::Zero, InitMode::Initial, InitMode::Exact] {
            assert_eq!(m.to_string().parse::<InitMode>().unwrap(), m);
        }
        for m in [SweepMode::GaussSeidel, SweepMode::Jacobi] {
            assert_eq!(m.to_string().parse::<SweepMode>().unwrap(), m);
        }
        assert!("bogus".parse::<InitMode>().is_err());
    }

    #[test]
    fn two_subdomain_params_match_optimizer() {
        let nu = DiffusionField::layered(vec![1.0, 0.1], vec![0.5]).unwrap();
        let problem = ProblemSpec::new(nu, 5.0, 1.0 / 40.0).unwrap();
        let mesh = Mesh1D::with_spacing(0.0, 1.0, 1.0 / 40.0).unwrap();
        let d = decompose(&mesh, &[0.5]).unwrap();
        let band = FrequencyBand::from_grid(5.0, 1.0 / 40.0).unwrap();
        let pair = DiffusionPair::new(1.0, 0.1).unwrap();
        for v in Version::OPTIMIZED {
            let direct = optimize(v, &band, &pair).unwrap().params;
            assert_eq!(interface_params(v, &problem, &d).unwrap(), vec![direct]);
        }
    }
}
