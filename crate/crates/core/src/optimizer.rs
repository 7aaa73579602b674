//! Optimized Robin parameters for the three local transmission families and
//! a brute-force min-max oracle that certifies them.
//!
//! All analysis happens in the normalized orientation `mu >= 1`; results
//! are converted back to the caller's orientation through
//! [`TransmissionParams`].

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::frequency::{
    geometric_grid, max_rho_over_band, scaled_rho, scaled_rho_squared, DiffusionPair, FrequencyBand,
    TransmissionParams, Version, SMALL_MU_LIMIT,
};

/// Closed real interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

fn as_normalized(mu: f64) -> f64 {
    if mu < 1.0 {
        1.0 / mu
    } else {
        mu
    }
}

/// `delta = sqrt((mu^2 - 4 mu + 1)(mu^2 + 1))`, real only above `2 + sqrt(3)`.
pub fn delta(mu: f64) -> Option<f64> {
    let arg = (mu * mu - 4.0 * mu + 1.0) * (mu * mu + 1.0);
    (arg >= 0.0 && mu >= SMALL_MU_LIMIT).then(|| arg.sqrt())
}

pub fn h1(mu: f64) -> Option<f64> {
    let arg = (mu * mu - 4.0 * mu + 1.0) * (mu * mu + 4.0 * mu + 1.0);
    (arg >= 0.0 && mu >= SMALL_MU_LIMIT).then(|| (mu * mu + 1.0 + arg.sqrt()) / (4.0 * mu))
}

pub fn h2(mu: f64) -> Option<f64> {
    delta(mu).map(|d| ((mu - 1.0).powi(2) + d) / (2.0 * mu))
}

/// Height of the interior hump of the Version I factor, independent of `p`.
pub fn r_c(mu: f64) -> f64 {
    scaled_rho(1.0, (2.0 * mu).sqrt(), (2.0 * mu).sqrt() / mu, mu)
}

/// Endpoint value `rho(wt1, sqrt(2 mu) wt2)` for Version I.
pub fn r_ext(mu: f64, k_r: f64) -> f64 {
    let p = (2.0 * mu).sqrt() * k_r;
    scaled_rho(1.0, p, p / mu, mu)
}

/// Restricted search interval for the Version I parameter `p`.
pub fn restriction_interval_v1(band: &FrequencyBand, mu: f64) -> Interval {
    let mu = as_normalized(mu);
    match delta(mu) {
        Some(d) if mu > SMALL_MU_LIMIT => {
            let s = (mu - 1.0).powi(2);
            Interval::new(band.wt1() * (s - d).sqrt(), band.wt2() * (s + d).sqrt())
        }
        _ => {
            let r = (2.0 * mu).sqrt();
            Interval::new(r * band.wt1(), r * band.wt2())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VersionIBranch {
    /// `mu <= 2 + sqrt(3)`: endpoint equioscillation, unique.
    SmallMu,
    /// `k_r > h2`.
    CaseI,
    /// `h1 < k_r <= h2`.
    CaseII,
    /// `k_r <= h1`.
    CaseIII,
}

/// Case diagnostics for the Version I min-max problem.
#[derive(Debug, Clone, PartialEq)]
pub struct VersionICaseData {
    pub mu: f64,
    pub delta: Option<f64>,
    pub h1: Option<f64>,
    pub h2: Option<f64>,
    pub k_r: f64,
    pub left: Option<Interval>,
    pub center: Interval,
    pub right: Option<Interval>,
    pub r_c: f64,
    pub r_ext: f64,
    pub branch: VersionIBranch,
}

impl VersionICaseData {
    pub fn classify(band: &FrequencyBand, mu: f64) -> Self {
        let mu = as_normalized(mu);
        let k_r = band.k_r();
        let root = (2.0 * mu).sqrt();
        let center = Interval::new(root * band.wt1(), root * band.wt2());
        let r_c = r_c(mu);
        let r_ext = r_ext(mu, k_r);
        if mu <= SMALL_MU_LIMIT {
            return Self {
                mu,
                delta: None,
                h1: None,
                h2: None,
                k_r,
                left: None,
                center,
                right: None,
                r_c,
                r_ext,
                branch: VersionIBranch::SmallMu,
            };
        }
        let d = delta(mu).expect("delta is real above 2 + sqrt(3)");
        let (h1, h2) = (h1(mu).unwrap(), h2(mu).unwrap());
        assert!(h2 >= h1 * (1.0 - 1e-12), "h2 < h1 for mu = {mu}");
        let s = (mu - 1.0).powi(2);
        let left = Interval::new(band.wt1() * (s - d).sqrt(), center.lo);
        let right = Interval::new(center.hi, band.wt2() * (s + d).sqrt());
        let branch = if k_r > h2 {
            VersionIBranch::CaseI
        } else if k_r > h1 {
            VersionIBranch::CaseII
        } else {
            VersionIBranch::CaseIII
        };
        Self {
            mu,
            delta: Some(d),
            h1: Some(h1),
            h2: Some(h2),
            k_r,
            left: Some(left),
            center,
            right: Some(right),
            r_c,
            r_ext,
            branch,
        }
    }
}

/// Discriminant of `P^2 + 2 b P + 4 mu^2 wt1^2 wt2^2 = 0` in `P = p^2`,
/// the quartic `p^4/2 + (mu wt2 - wt1)(wt2 - mu wt1) p^2 + 2 mu^2 wt1^2 wt2^2`.
pub fn quartic_discriminant(band: &FrequencyBand, mu: f64) -> f64 {
    let (b, c) = quartic_coefficients(band, as_normalized(mu));
    b * b - c
}

fn quartic_coefficients(band: &FrequencyBand, mu: f64) -> (f64, f64) {
    let (w1, w2) = (band.wt1(), band.wt2());
    let b = (mu * w2 - w1) * (w2 - mu * w1);
    let c = 4.0 * mu * mu * w1 * w1 * w2 * w2;
    (b, c)
}

/// Positive real roots of the Version I quartic, ascending. A double root
/// (discriminant zero up to rounding) yields a single value.
pub fn quartic_positive_roots(band: &FrequencyBand, mu: f64) -> Vec<f64> {
    let (b, c) = quartic_coefficients(band, as_normalized(mu));
    let disc = b * b - c;
    if disc < -1e-12 * b * b {
        return Vec::new();
    }
    let sq = disc.max(0.0).sqrt();
    let mut roots: Vec<f64> = if sq == 0.0 {
        vec![-b]
    } else {
        // Stable pair: the larger-magnitude root directly, the other via
        // the product c.
        let big = -b - b.signum() * sq;
        vec![big, c / big]
    };
    roots.retain(|r| *r > 0.0);
    let mut roots: Vec<f64> = roots.into_iter().map(f64::sqrt).collect();
    roots.sort_by(f64::total_cmp);
    roots
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Uniqueness {
    Unique,
    IntervalOfMinimizers,
    TwoMinimizers,
}

/// Bisection record for Version III.
#[derive(Debug, Clone, PartialEq)]
pub struct VersionIIISolve {
    /// Search interval `I_p` for `p`.
    pub bracket: Interval,
    /// Asymptotic estimate `2 mu wt1 / (mu - 1)` for small time steps.
    pub estimate: f64,
    pub iterations: usize,
    pub residual: f64,
    pub residual_history: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum OptimizerDetails {
    VersionI {
        case: VersionICaseData,
        quartic_roots: Vec<f64>,
    },
    VersionII,
    VersionIII(Option<VersionIIISolve>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizedResult {
    pub params: TransmissionParams,
    /// Analytic min-max value of the convergence factor.
    pub rho_star: f64,
    pub uniqueness: Uniqueness,
    pub details: OptimizerDetails,
}

/// Optimized Version I parameter `sigma1 = sigma2 = sqrt(nu_small) p`.
///
/// In the two-minimizer branch the left root `p_l` is returned as the
/// parameter; both roots are listed in the details.
pub fn optimize_v1(band: &FrequencyBand, diff: &DiffusionPair) -> Result<OptimizedResult> {
    let mu = diff.normalized_mu();
    let case = VersionICaseData::classify(band, mu);
    let (w1, w2) = (band.wt1(), band.wt2());
    let centered = (2.0 * mu * w1 * w2).sqrt();
    let endpoint = |p: f64| scaled_rho(w1, p, p / mu, mu);
    let mut quartic_roots = Vec::new();
    let (p, rho_star, uniqueness) = match case.branch {
        VersionIBranch::SmallMu => (centered, endpoint(centered), Uniqueness::Unique),
        VersionIBranch::CaseI => {
            let e = endpoint(centered);
            if e >= case.r_c {
                (centered, e, Uniqueness::Unique)
            } else {
                (centered, case.r_c, Uniqueness::IntervalOfMinimizers)
            }
        }
        VersionIBranch::CaseII => (centered, case.r_c, Uniqueness::IntervalOfMinimizers),
        VersionIBranch::CaseIII => {
            quartic_roots = quartic_positive_roots(band, mu);
            let p_l = *quartic_roots.first().ok_or_else(|| {
                Error::invalid("band", "no positive quartic root in the two-minimizer branch")
            })?;
            (p_l, endpoint(p_l), Uniqueness::TwoMinimizers)
        }
    };
    Ok(OptimizedResult {
        params: TransmissionParams::version_one(p, diff)?,
        rho_star,
        uniqueness,
        details: OptimizerDetails::VersionI {
            case,
            quartic_roots,
        },
    })
}

/// Set of Version I minimizers in `p`: a single point, the two quartic
/// roots, or the interval on which both endpoint values stay below the
/// hump level `R_c`.
pub fn v1_minimizers(band: &FrequencyBand, diff: &DiffusionPair) -> Result<Vec<Interval>> {
    let res = optimize_v1(band, diff)?;
    let OptimizerDetails::VersionI { case, quartic_roots } = &res.details else {
        unreachable!("Version I details");
    };
    Ok(match res.uniqueness {
        Uniqueness::Unique => vec![Interval::new(res.params.p(), res.params.p())],
        Uniqueness::TwoMinimizers => quartic_roots.iter().map(|&p| Interval::new(p, p)).collect(),
        Uniqueness::IntervalOfMinimizers => {
            let mu = case.mu;
            let center = case.center;
            let p_c = res.params.p();
            let level = case.r_c;
            let at = |w: f64| move |p: f64| scaled_rho(w, p, p / mu, mu) - level;
            let lo = bisect(at(band.wt2()), center.lo, p_c).unwrap_or(center.lo);
            let hi = bisect(at(band.wt1()), p_c, center.hi).unwrap_or(center.hi);
            vec![Interval::new(lo, hi)]
        }
    })
}

/// Plain bisection; `None` without a sign change.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> Option<f64> {
    let (mut f_lo, f_hi) = (f(lo), f(hi));
    if f_lo == 0.0 {
        return Some(lo);
    }
    if f_hi == 0.0 {
        return Some(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid == 0.0 || hi - lo <= 4.0 * f64::EPSILON * mid {
            return Some(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Optimized Version II parameter `q* = sqrt(2 wt1 wt2)`.
pub fn optimize_v2(band: &FrequencyBand, diff: &DiffusionPair) -> Result<OptimizedResult> {
    let mu = diff.normalized_mu();
    let q = (2.0 * band.wt1() * band.wt2()).sqrt();
    Ok(OptimizedResult {
        params: TransmissionParams::version_two(q, diff)?,
        rho_star: scaled_rho(band.wt1(), q, q, mu),
        uniqueness: Uniqueness::Unique,
        details: OptimizerDetails::VersionII,
    })
}

/// Search intervals for `(p, q)` of Version III.
pub fn restriction_intervals_v3(band: &FrequencyBand, mu: f64) -> (Interval, Interval) {
    let mu = as_normalized(mu);
    let s = (mu * mu + 1.0).sqrt();
    let (w1, w2) = (band.wt1(), band.wt2());
    let pf = s - (mu - 1.0);
    let qf = (s + (mu - 1.0)) / mu;
    (Interval::new(w1 * pf, w2 * pf), Interval::new(w1 * qf, w2 * qf))
}

/// Left and right sides of the reduced Version III equation at `p`.
pub fn v3_residual_parts(p: f64, band: &FrequencyBand, mu: f64) -> (f64, f64) {
    let mu = as_normalized(mu);
    let factor = |w: f64| ((p - w).powi(2) + w * w) / ((p + mu * w).powi(2) + mu * mu * w * w);
    let lhs = factor(band.wt1()) * factor(band.wt2());
    let rhs = factor(band.geometric_center()).powi(2);
    (lhs, rhs)
}

/// Residual `lhs - rhs` of the reduced Version III equation.
pub fn v3_residual(p: f64, band: &FrequencyBand, mu: f64) -> f64 {
    let (lhs, rhs) = v3_residual_parts(p, band, mu);
    lhs - rhs
}

/// `I_p = [wt1 (sqrt(mu^2+1) - (mu-1)), sqrt(2 wt1 wt2)]`.
pub fn v3_search_interval(band: &FrequencyBand, mu: f64) -> Interval {
    let (p_box, _) = restriction_intervals_v3(band, mu);
    Interval::new(p_box.lo, (2.0 * band.wt1() * band.wt2()).sqrt())
}

const V3_RESIDUAL_TOL: f64 = 1e-14;
const V3_MAX_BISECTIONS: usize = 200;

/// Optimized Version III pair with `p* q* = 2 wt1 wt2`, found by bisection of
/// the reduced equation on `I_p`. When the reduced equation has no sign
/// change on `I_p` (narrow bands) the three-point maximum is minimized along
/// the same curve instead.
pub fn optimize_v3(band: &FrequencyBand, diff: &DiffusionPair) -> Result<OptimizedResult> {
    let mu = diff.normalized_mu();
    let (w1, w2) = (band.wt1(), band.wt2());
    let product = 2.0 * w1 * w2;

    if mu - 1.0 <= 1e-12 {
        // gamma = 1: coincides with Version II.
        let q = product.sqrt();
        return Ok(OptimizedResult {
            params: TransmissionParams::version_three(q, q, diff)?,
            rho_star: scaled_rho(w1, q, q, mu),
            uniqueness: Uniqueness::Unique,
            details: OptimizerDetails::VersionIII(None),
        });
    }
    if band.is_degenerate() {
        // Single frequency: each factor is minimized separately.
        let (p_box, q_box) = restriction_intervals_v3(band, mu);
        let (p, q) = (p_box.lo, q_box.lo);
        return Ok(OptimizedResult {
            params: TransmissionParams::version_three(p, q, diff)?,
            rho_star: scaled_rho(w1, p, q, mu),
            uniqueness: Uniqueness::Unique,
            details: OptimizerDetails::VersionIII(None),
        });
    }

    let interval = v3_search_interval(band, mu);
    let f = |p: f64| v3_residual(p, band, mu);
    let mut lo = interval.lo * (1.0 + 1e-9);
    let mut hi = interval.hi;
    let (mut f_lo, f_hi) = (f(lo), f(hi));
    if f_lo.signum() == f_hi.signum() && f_lo != 0.0 && f_hi != 0.0 {
        // Narrow band: the center never catches up with the endpoints.
        let p = v3_endpoint_minimum(band, mu, lo, hi);
        let q = product / p;
        return Ok(OptimizedResult {
            params: TransmissionParams::version_three(p, q, diff)?,
            rho_star: v3_three_point_max(p, band, mu),
            uniqueness: Uniqueness::Unique,
            details: OptimizerDetails::VersionIII(None),
        });
    }
    let mut history = Vec::new();
    let mut root = None;
    for iteration in 1..=V3_MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        history.push(f_mid);
        if f_mid.abs() <= V3_RESIDUAL_TOL || (hi - lo) <= 4.0 * f64::EPSILON * mid {
            root = Some((mid, iteration, f_mid));
            break;
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    let (p, iterations, residual) = root.ok_or(Error::BisectionNotConverged {
        iterations: V3_MAX_BISECTIONS,
        residual: history.last().copied().unwrap_or(f64::NAN),
    })?;
    let q = product / p;
    Ok(OptimizedResult {
        params: TransmissionParams::version_three(p, q, diff)?,
        rho_star: scaled_rho(w1, p, q, mu),
        uniqueness: Uniqueness::Unique,
        details: OptimizerDetails::VersionIII(Some(VersionIIISolve {
            bracket: interval,
            estimate: 2.0 * mu / (mu - 1.0) * w1,
            iterations,
            residual,
            residual_history: history,
        })),
    })
}

/// Largest of `rho` at `wt1`, the geometric center and `wt2` on the curve
/// `p q = 2 wt1 wt2`.
fn v3_three_point_max(p: f64, band: &FrequencyBand, mu: f64) -> f64 {
    let q = 2.0 * band.wt1() * band.wt2() / p;
    [band.wt1(), band.geometric_center(), band.wt2()]
        .iter()
        .map(|&w| scaled_rho(w, p, q, mu))
        .fold(0.0, f64::max)
}

/// Golden-section minimum of the three-point maximum over `[lo, hi]`.
fn v3_endpoint_minimum(band: &FrequencyBand, mu: f64, mut lo: f64, mut hi: f64) -> f64 {
    let g = |p: f64| v3_three_point_max(p, band, mu);
    let r = 0.5 * (5.0f64.sqrt() - 1.0);
    let (mut a, mut b) = (hi - r * (hi - lo), lo + r * (hi - lo));
    let (mut ga, mut gb) = (g(a), g(b));
    while hi - lo > 1e-13 * hi {
        if ga <= gb {
            hi = b;
            b = a;
            gb = ga;
            a = hi - r * (hi - lo);
            ga = g(a);
        } else {
            lo = a;
            a = b;
            ga = gb;
            b = lo + r * (hi - lo);
            gb = g(b);
        }
    }
    0.5 * (lo + hi)
}

/// Dispatches to the optimizer of `version`.
pub fn optimize(version: Version, band: &FrequencyBand, diff: &DiffusionPair) -> Result<OptimizedResult> {
    match version {
        Version::I => optimize_v1(band, diff),
        Version::II => optimize_v2(band, diff),
        Version::III => optimize_v3(band, diff),
        Version::Custom => Err(Error::invalid("version", "custom parameters are not optimized")),
    }
}

/// Grid minimizer of the band maximum of `rho`.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub params: TransmissionParams,
    pub rho_star: f64,
    /// Geometric grid used for `p` (or `q` for Version II).
    pub p_grid: Vec<f64>,
    /// Grid for `q` (Version III only).
    pub q_grid: Option<Vec<f64>>,
    pub p_index: usize,
    pub q_index: Option<usize>,
}

impl OracleResult {
    /// Log-spacing of a geometric grid, i.e. the size of one grid cell in
    /// `ln` units.
    pub fn log_step(grid: &[f64]) -> f64 {
        if grid.len() < 2 {
            0.0
        } else {
            (grid[1] / grid[0]).ln()
        }
    }
}

/// Brute-force min-max over the restricted parameter interval(s), using
/// [`max_rho_over_band`] with `freq_grid_size` samples for the inner max.
pub fn brute_force_minmax(
    band: &FrequencyBand,
    diff: &DiffusionPair,
    version: Version,
    param_grid_size: usize,
    freq_grid_size: usize,
) -> Result<OracleResult> {
    assert!(param_grid_size >= 16 && freq_grid_size >= 16, "oracle grids need at least 16 points");
    let mu = diff.normalized_mu();
    let worst = |params: &TransmissionParams| max_rho_over_band(params, diff, band, freq_grid_size).1;
    match version {
        Version::I | Version::II => {
            let interval = if version == Version::I {
                restriction_interval_v1(band, mu)
            } else {
                let r = 2f64.sqrt();
                Interval::new(r * band.wt1(), r * band.wt2())
            };
            let grid = geometric_grid(interval.lo, interval.hi, param_grid_size);
            let values: Vec<f64> = grid
                .par_iter()
                .map(|&x| {
                    let params = if version == Version::I {
                        TransmissionParams::version_one(x, diff)
                    } else {
                        TransmissionParams::version_two(x, diff)
                    };
                    params.map(|p| worst(&p)).unwrap_or(f64::INFINITY)
                })
                .collect();
            let index = argmin(&values);
            let params = if version == Version::I {
                TransmissionParams::version_one(grid[index], diff)?
            } else {
                TransmissionParams::version_two(grid[index], diff)?
            };
            Ok(OracleResult {
                params,
                rho_star: values[index],
                p_grid: grid,
                q_grid: None,
                p_index: index,
                q_index: None,
            })
        }
        Version::III => {
            let (p_box, q_box) = restriction_intervals_v3(band, mu);
            let p_grid = geometric_grid(p_box.lo, p_box.hi, param_grid_size);
            let q_grid = geometric_grid(q_box.lo, q_box.hi, param_grid_size);
            let freqs = band.geometric_grid(freq_grid_size);
            let n = param_grid_size;
            // Inlined inner max on the squared factor; identical candidate
            // set to `max_rho_over_band`.
            let values: Vec<f64> = (0..n * n)
                .into_par_iter()
                .map(|k| {
                    let (p, q) = (p_grid[k / n], q_grid[k % n]);
                    let mut m = freqs
                        .iter()
                        .map(|&w| scaled_rho_squared(w, p, q, mu))
                        .fold(f64::NEG_INFINITY, f64::max);
                    let wc = (p * q / 2.0).sqrt();
                    if band.contains(wc) {
                        m = m.max(scaled_rho_squared(wc, p, q, mu));
                    }
                    m.sqrt()
                })
                .collect();
            let k = argmin(&values);
            let (i, j) = (k / n, k % n);
            Ok(OracleResult {
                params: TransmissionParams::version_three(p_grid[i], q_grid[j], diff)?,
                rho_star: values[k],
                p_grid,
                q_grid: Some(q_grid),
                p_index: i,
                q_index: Some(j),
            })
        }
        Version::Custom => Err(Error::invalid("version", "the oracle needs a parameter family")),
    }
}

fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = i;
        }
    }
    best
}
