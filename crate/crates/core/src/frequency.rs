//! Continuous convergence-factor model of the Robin transmission iteration.
//!
//! After a Laplace transform in time with vanishing real part, the error
//! contraction between two Schwarz iterates depends on the transformed
//! frequency `wt = sqrt(omega / 2)` only. Everything here is a pure function
//! of its inputs.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{ensure_positive, Error, Result};

/// Threshold on `mu` above which the Version I convergence factor develops
/// an interior hump (`mu^2 - 4 mu + 1 > 0`).
pub const SMALL_MU_LIMIT: f64 = 3.732_050_807_568_877; // 2 + sqrt(3)

/// Frequency window `[wt1, wt2]` resolved by a time grid with final time `T`
/// and step `dt`: `omega_min = pi / (2T)`, `omega_max = pi / dt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyBand {
    final_time: f64,
    time_step: f64,
    wt1: f64,
    wt2: f64,
}

impl FrequencyBand {
    pub fn from_grid(final_time: f64, time_step: f64) -> Result<Self> {
        ensure_positive("final_time", final_time)?;
        ensure_positive("time_step", time_step)?;
        if time_step >= 2.0 * final_time {
            return Err(Error::BandCollapsed {
                final_time,
                time_step,
            });
        }
        Ok(Self {
            final_time,
            time_step,
            wt1: (PI / (4.0 * final_time)).sqrt(),
            wt2: (PI / (2.0 * time_step)).sqrt(),
        })
    }

    /// Builds a band directly from its transformed endpoints. A degenerate
    /// band `wt1 == wt2` is accepted here.
    pub fn from_endpoints(wt1: f64, wt2: f64) -> Result<Self> {
        ensure_positive("wt1", wt1)?;
        ensure_positive("wt2", wt2)?;
        if wt2 < wt1 {
            return Err(Error::invalid("wt2", format!("must be >= wt1 = {wt1}, got {wt2}")));
        }
        Ok(Self {
            final_time: PI / (4.0 * wt1 * wt1),
            time_step: PI / (2.0 * wt2 * wt2),
            wt1,
            wt2,
        })
    }

    pub fn final_time(&self) -> f64 {
        self.final_time
    }

    pub fn time_step(&self) -> f64 {
        self.time_step
    }

    pub fn omega_min(&self) -> f64 {
        2.0 * self.wt1 * self.wt1
    }

    pub fn omega_max(&self) -> f64 {
        2.0 * self.wt2 * self.wt2
    }

    pub fn wt1(&self) -> f64 {
        self.wt1
    }

    pub fn wt2(&self) -> f64 {
        self.wt2
    }

    /// Band ratio `k_r = wt2 / wt1`.
    pub fn k_r(&self) -> f64 {
        self.wt2 / self.wt1
    }

    /// `sqrt(wt1 * wt2)`, the geometric centre of the band.
    pub fn geometric_center(&self) -> f64 {
        (self.wt1 * self.wt2).sqrt()
    }

    pub fn is_degenerate(&self) -> bool {
        self.wt1 == self.wt2
    }

    pub fn contains(&self, wt: f64) -> bool {
        wt >= self.wt1 && wt <= self.wt2
    }

    /// Log-uniform grid of `n` frequencies with both endpoints included.
    pub fn geometric_grid(&self, n: usize) -> Vec<f64> {
        geometric_grid(self.wt1, self.wt2, n)
    }
}

/// `n` log-uniformly spaced points on `[lo, hi]`, endpoints exact.
pub fn geometric_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let ratio = (hi / lo).ln();
            let last = (n - 1) as f64;
            (0..n)
                .map(|i| match i {
                    0 => lo,
                    i if i == n - 1 => hi,
                    i => lo * (ratio * i as f64 / last).exp(),
                })
                .collect()
        }
    }
}

/// Pair of diffusion coefficients on either side of an interface. `nu1`
/// belongs to the left (first) subdomain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusionPair {
    nu1: f64,
    nu2: f64,
}

impl DiffusionPair {
    pub fn new(nu1: f64, nu2: f64) -> Result<Self> {
        ensure_positive("nu1", nu1)?;
        ensure_positive("nu2", nu2)?;
        Ok(Self { nu1, nu2 })
    }

    /// Pair with the given ratio `nu1 / nu2` and `nu1 = 1`.
    pub fn from_ratio(ratio: f64) -> Result<Self> {
        ensure_positive("ratio", ratio)?;
        Self::new(1.0, 1.0 / ratio)
    }

    pub fn nu1(&self) -> f64 {
        self.nu1
    }

    pub fn nu2(&self) -> f64 {
        self.nu2
    }

    /// `mu = sqrt(nu1 / nu2)`.
    pub fn mu(&self) -> f64 {
        (self.nu1 / self.nu2).sqrt()
    }

    pub fn swapped(&self) -> Self {
        Self {
            nu1: self.nu2,
            nu2: self.nu1,
        }
    }

    /// Orientation with `mu >= 1`, and whether the sides had to be swapped.
    pub fn normalized(&self) -> (Self, bool) {
        if self.nu1 >= self.nu2 {
            (*self, false)
        } else {
            (self.swapped(), true)
        }
    }

    /// `mu` of the normalized orientation, always `>= 1`.
    pub fn normalized_mu(&self) -> f64 {
        self.normalized().0.mu()
    }
}

/// Family of local transmission conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Version {
    /// `sigma1 = sigma2 = sqrt(nu2) p`.
    I,
    /// `sigma1 = sqrt(nu2) q`, `sigma2 = sqrt(nu1) q`.
    II,
    /// `sigma1 = sqrt(nu2) p`, `sigma2 = sqrt(nu1) q`.
    III,
    /// Arbitrary positive Robin coefficients.
    Custom,
}

impl Version {
    pub const OPTIMIZED: [Version; 3] = [Version::I, Version::II, Version::III];
}

impl fmt::Display for Version {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Version::I => "I",
            Version::II => "II",
            Version::III => "III",
            Version::Custom => "custom",
        };
        f.write_str(s)
    }
}

impl FromStr for Version {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "I" | "i" | "1" => Ok(Version::I),
            "II" | "ii" | "2" => Ok(Version::II),
            "III" | "iii" | "3" => Ok(Version::III),
            "custom" => Ok(Version::Custom),
            other => Err(Error::invalid("version", format!("unknown version `{other}`"))),
        }
    }
}

/// Physical Robin coefficients together with the dimensionless parameters
/// that generated them.
///
/// `p` and `q` always refer to the normalized orientation (`mu >= 1`): the
/// side with the larger diffusion gets `sqrt(nu_small) p`, the other side
/// `sqrt(nu_large) q`. `sigma1`/`sigma2` are in the caller's orientation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmissionParams {
    sigma1: f64,
    sigma2: f64,
    p: f64,
    q: f64,
    version: Version,
}

impl TransmissionParams {
    pub fn version_one(p: f64, diff: &DiffusionPair) -> Result<Self> {
        ensure_positive("p", p)?;
        let (norm, _) = diff.normalized();
        let sigma = norm.nu2.sqrt() * p;
        Ok(Self {
            sigma1: sigma,
            sigma2: sigma,
            p,
            q: p,
            version: Version::I,
        })
    }

    pub fn version_two(q: f64, diff: &DiffusionPair) -> Result<Self> {
        ensure_positive("q", q)?;
        Ok(Self {
            version: Version::II,
            ..Self::two_sided(q, q, diff)
        })
    }

    pub fn version_three(p: f64, q: f64, diff: &DiffusionPair) -> Result<Self> {
        ensure_positive("p", p)?;
        ensure_positive("q", q)?;
        Ok(Self {
            version: Version::III,
            ..Self::two_sided(p, q, diff)
        })
    }

    /// Raw Robin coefficients. `p` and `q` are recovered as the scaled
    /// coefficients of the normalized orientation.
    pub fn custom(sigma1: f64, sigma2: f64, diff: &DiffusionPair) -> Result<Self> {
        ensure_positive("sigma1", sigma1)?;
        ensure_positive("sigma2", sigma2)?;
        let (norm, swapped) = diff.normalized();
        let (s_large, s_small) = if swapped {
            (sigma2, sigma1)
        } else {
            (sigma1, sigma2)
        };
        Ok(Self {
            sigma1,
            sigma2,
            p: s_large / norm.nu2.sqrt(),
            q: s_small / norm.nu1.sqrt(),
            version: Version::Custom,
        })
    }

    fn two_sided(p: f64, q: f64, diff: &DiffusionPair) -> Self {
        let (norm, swapped) = diff.normalized();
        let s_large = norm.nu2.sqrt() * p;
        let s_small = norm.nu1.sqrt() * q;
        let (sigma1, sigma2) = if swapped {
            (s_small, s_large)
        } else {
            (s_large, s_small)
        };
        Self {
            sigma1,
            sigma2,
            p,
            q,
            version: Version::Custom,
        }
    }

    pub fn sigma1(&self) -> f64 {
        self.sigma1
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn version(&self) -> Version {
        self.version
    }

    /// `gamma = q / p`.
    pub fn gamma(&self) -> f64 {
        self.q / self.p
    }

    /// Effective scaled coefficients `(a, b)` in the normalized orientation,
    /// `a = sigma_large / sqrt(nu_small)`, `b = sigma_small / sqrt(nu_large)`.
    /// For Version I this gives `(p, p / mu)`.
    pub fn effective_scaled(&self, diff: &DiffusionPair) -> (f64, f64) {
        let (norm, swapped) = diff.normalized();
        let (s_large, s_small) = if swapped {
            (self.sigma2, self.sigma1)
        } else {
            (self.sigma1, self.sigma2)
        };
        (s_large / norm.nu2.sqrt(), s_small / norm.nu1.sqrt())
    }
}

/// Convergence factor for raw Robin coefficients.
pub fn rho_sigma(wt: f64, sigma1: f64, sigma2: f64, diff: &DiffusionPair) -> f64 {
    let (nu1, nu2) = (diff.nu1, diff.nu2);
    let (r1, r2) = (nu1.sqrt(), nu2.sqrt());
    let w2 = wt * wt;
    let first = ((sigma1 - r2 * wt).powi(2) + nu2 * w2) / ((sigma1 + r1 * wt).powi(2) + nu1 * w2);
    let second = ((sigma2 - r1 * wt).powi(2) + nu1 * w2) / ((sigma2 + r2 * wt).powi(2) + nu2 * w2);
    (first * second).sqrt()
}

/// Convergence factor `rho(wt, sigma1, sigma2)` of the transmission pair.
pub fn rho(wt: f64, params: &TransmissionParams, diff: &DiffusionPair) -> f64 {
    rho_sigma(wt, params.sigma1, params.sigma2, diff)
}

/// Dimensionless convergence factor in the normalized orientation,
/// `sigma1 = sqrt(nu2) a`, `sigma2 = sqrt(nu1) b`, `mu = sqrt(nu1 / nu2)`.
pub fn scaled_rho(wt: f64, a: f64, b: f64, mu: f64) -> f64 {
    scaled_rho_squared(wt, a, b, mu).sqrt()
}

pub(crate) fn scaled_rho_squared(wt: f64, a: f64, b: f64, mu: f64) -> f64 {
    let w2 = wt * wt;
    let m2 = mu * mu;
    let first = ((a - wt).powi(2) + w2) / ((a + mu * wt).powi(2) + m2 * w2);
    let second = m2 * ((b - wt).powi(2) + w2) / ((mu * b + wt).powi(2) + w2);
    first * second
}

/// Interior stationary points of `rho(., params)` that can be local maxima.
///
/// Version I: `p / sqrt(2 mu)`, plus the two roots of
/// `wt^2 = (wt_c^2 / 2 mu)((mu - 1)^2 -/+ delta)` when `mu > 2 + sqrt(3)`.
/// Version II: `q / sqrt(2)`. Version III: `sqrt(p q / 2)`. Custom: every
/// positive stationary point of the general derivative.
pub fn interior_critical_frequencies(params: &TransmissionParams, diff: &DiffusionPair) -> Vec<f64> {
    let mu = diff.normalized_mu();
    match params.version {
        Version::I => {
            let p = params.p;
            let wc = p / (2.0 * mu).sqrt();
            let mut points = vec![wc];
            if mu > SMALL_MU_LIMIT {
                let delta = ((mu * mu - 4.0 * mu + 1.0) * (mu * mu + 1.0)).sqrt();
                let scale = wc * wc / (2.0 * mu);
                let s = (mu - 1.0).powi(2);
                points.push((scale * (s - delta)).sqrt());
                points.push((scale * (s + delta)).sqrt());
            }
            points
        }
        Version::II => vec![params.q / 2f64.sqrt()],
        Version::III => vec![(params.p * params.q / 2.0).sqrt()],
        Version::Custom => {
            let (a, b) = params.effective_scaled(diff);
            general_stationary_points(a, b, mu)
        }
    }
}

/// Stationary points of `scaled_rho(., a, b, mu)`: `sqrt(a b / 2)` and the
/// positive roots of `wt^2 + c a wt + gamma a^2 / 2` with `gamma = b / a`,
/// `c = ((mu-1)(gamma mu - 1) - sqrt((mu^2+1)(gamma^2 mu^2+1))) / (2 mu)`.
pub fn general_stationary_points(a: f64, b: f64, mu: f64) -> Vec<f64> {
    let gamma = b / a;
    let c = ((mu - 1.0) * (gamma * mu - 1.0) - ((mu * mu + 1.0) * (gamma * gamma * mu * mu + 1.0)).sqrt())
        / (2.0 * mu);
    let mut points = vec![(a * b / 2.0).sqrt()];
    let lin = c * a;
    let con = gamma * a * a / 2.0;
    let disc = lin * lin - 4.0 * con;
    if disc >= 0.0 {
        let sq = disc.sqrt();
        for root in [(-lin - sq) / 2.0, (-lin + sq) / 2.0] {
            if root > 0.0 {
                points.push(root);
            }
        }
    }
    points
}

/// Maximum of `rho` over the band, scanning a geometric grid of `n_samples`
/// frequencies plus the analytic interior critical points inside the band.
/// Returns `(argmax, max)`; ties keep the smallest frequency.
pub fn max_rho_over_band(
    params: &TransmissionParams,
    diff: &DiffusionPair,
    band: &FrequencyBand,
    n_samples: usize,
) -> (f64, f64) {
    assert!(n_samples >= 3, "max_rho_over_band needs at least 3 samples");
    if band.is_degenerate() {
        return (band.wt1, rho(band.wt1, params, diff));
    }
    let mut candidates = band.geometric_grid(n_samples);
    candidates.extend(
        interior_critical_frequencies(params, diff)
            .into_iter()
            .filter(|w| band.contains(*w)),
    );
    candidates.sort_by(f64::total_cmp);
    let mut best = (candidates[0], f64::NEG_INFINITY);
    for wt in candidates {
        let value = rho(wt, params, diff);
        if value > best.1 {
            best = (wt, value);
        }
    }
    best
}

/// Sufficient condition for `rho < 1` at every frequency:
/// `(sqrt(nu1) - sqrt(nu2)) (sigma1 - sigma2) <= 0`.
pub fn sufficient_condition_holds(sigma1: f64, sigma2: f64, diff: &DiffusionPair) -> Result<bool> {
    ensure_positive("sigma1", sigma1)?;
    ensure_positive("sigma2", sigma2)?;
    let holds = match diff.nu1.partial_cmp(&diff.nu2) {
        Some(std::cmp::Ordering::Less) => sigma2 <= sigma1,
        Some(std::cmp::Ordering::Greater) => sigma1 <= sigma2,
        _ => true,
    };
    Ok(holds)
}
