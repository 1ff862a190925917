//! Peaks-over-Threshold statistics, their centering terms and the
//! normalized statistics whose limits the corollaries describe.
//!
//! Hill-type statistics are normalized as `prefactor · (H / (n E[G_n(X₀)]) - 1)`
//! with `G_n(x) = log(x/u_n)_+`, i.e. the centered ratio of the log-excess sum
//! to its mean. With this normalization the limits are `ν Z`, `ν²/(ν+1) Z`
//! and `ν/(ν+1) Z` in the heavy-tailed case.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::limit_theory::{ThresholdSchedule, TheoryReport};
use crate::linear_process::MarginalLaw;
use crate::quadrature::{integrate_panels, QuadOptions};

/// `#{t : x_t > u}`.
pub fn exceedance_count(xs: &[f64], u: f64) -> usize {
    xs.iter().filter(|&&x| x > u).count()
}

/// `Σ_t log(x_t / u) 1{x_t > u}`.
pub fn hill_sum(xs: &[f64], u: f64) -> Result<f64> {
    if !(u > 0.0) {
        return Err(Error::invalid(format!("Hill threshold must be positive, got {u}")));
    }
    Ok(xs.iter().filter(|&&x| x > u).map(|&x| (x / u).ln()).sum())
}

/// `m`-th smallest value (`1 <= m <= n`), by selection in expected `O(n)`.
pub fn order_statistic(xs: &[f64], m: usize) -> Result<f64> {
    if m == 0 || m > xs.len() {
        return Err(Error::invalid(format!("order index {m} outside [1, {}]", xs.len())));
    }
    let mut buf = xs.to_vec();
    let (_, v, _) = buf.select_nth_unstable_by(m - 1, f64::total_cmp);
    Ok(*v)
}

/// `Σ_{i=1}^k log(X_{n-i+1:n} / X_{n-k:n})`.
pub fn hill_random(xs: &[f64], k: usize) -> Result<f64> {
    let n = xs.len();
    if k == 0 || k >= n {
        return Err(Error::invalid(format!("k = {k} outside [1, n-1] for n = {n}")));
    }
    let mut buf = xs.to_vec();
    let (_, thr, top) = buf.select_nth_unstable_by(n - k - 1, f64::total_cmp);
    let thr = *thr;
    if !(thr > 0.0) {
        return Err(Error::invalid(format!(
            "threshold order statistic X_(n-k:n) = {thr} is not positive"
        )));
    }
    Ok(top.iter().map(|&x| (x / thr).ln()).sum())
}

/// Means and slopes of the count and log-excess functionals at `u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CenteringTerms {
    pub u: f64,
    /// `P[X₀ > u]`, mean of the count functional.
    pub tail_prob: f64,
    /// `f_{X₀}(u)`, slope of the count functional.
    pub density: f64,
    /// `E[log(X₀/u)_+] = ∫_u^∞ P[X₀ > x]/x dx`.
    pub mean_g: f64,
    /// `∫_u^∞ f_{X₀}(x)/x dx`.
    pub slope_g: f64,
    /// `E[log(X₀/u) | X₀ > u]`.
    pub conditional_log_mean: f64,
    /// `ξ(u) = u f(u) / P[X₀ > u]`.
    pub xi_at_u: f64,
}

/// Regularly varying surrogates `P/ν` and `f/(ν+1)` for the mean and slope.
pub fn asymptotic_centering(tail_prob: f64, density: f64, nu: f64) -> (f64, f64) {
    (tail_prob / nu, density / (nu + 1.0))
}

// Integrands decay below this fraction of their value at u before the
// truncated range ends.
const CENTERING_DECAY: f64 = 1e-17;

/// Centering terms from the marginal law. Exact marginals use quadrature in
/// `x = u e^s`; the Monte Carlo marginal uses sample averages.
pub fn centering_terms(marginal: &MarginalLaw, u: f64, nu: f64) -> Result<CenteringTerms> {
    if !(u > 0.0 && u.is_finite()) {
        return Err(Error::invalid(format!("threshold must be positive, got {u}")));
    }
    let tail_prob = marginal.sf(u);
    let density = marginal.pdf(u);
    let (mean_g, slope_g) = match marginal {
        MarginalLaw::MonteCarloEmpirical { sample, .. } => {
            let m = sample.len() as f64;
            let start = sample.partition_point(|v| *v <= u);
            let above = &sample[start..];
            (
                above.iter().map(|x| (x / u).ln()).sum::<f64>() / m,
                above.iter().map(|x| 1.0 / x).sum::<f64>() / m,
            )
        }
        _ => {
            if tail_prob == 0.0 {
                return Err(Error::numerical(format!("P[X0 > {u}] underflows")));
            }
            let mut s_max = 1.0;
            while marginal.sf(u * f64::exp(s_max)) > CENTERING_DECAY * tail_prob && s_max < 200.0 {
                s_max *= 2.0;
            }
            let mut edges = vec![0.0];
            let mut e = 1.0 / 64.0;
            while e < s_max {
                edges.push(e);
                e *= 2.0;
            }
            edges.push(s_max);
            let opts = QuadOptions::new(1e-13 * tail_prob, 1e-11).with_max_intervals(400);
            let mean = integrate_panels(|s| marginal.sf(u * s.exp()), &edges, opts);
            let slope_opts = QuadOptions::new(1e-13 * density.max(f64::MIN_POSITIVE), 1e-11).with_max_intervals(400);
            let slope = integrate_panels(|s| marginal.pdf(u * s.exp()), &edges, slope_opts);
            if !(mean.converged && slope.converged) {
                return Err(Error::numerical(format!("centering quadrature did not converge at u = {u}")));
            }
            // Power-law remainder beyond the truncation point.
            let x_end = u * s_max.exp();
            let rem = if nu.is_finite() {
                (marginal.sf(x_end) / nu, marginal.pdf(x_end) / (nu + 1.0))
            } else {
                (0.0, 0.0)
            };
            (mean.value + rem.0, slope.value + rem.1)
        }
    };
    let conditional_log_mean = if tail_prob > 0.0 { mean_g / tail_prob } else { f64::NAN };
    let xi_at_u = if tail_prob > 0.0 { u * density / tail_prob } else { f64::NAN };
    Ok(CenteringTerms {
        u,
        tail_prob,
        density,
        mean_g,
        slope_g,
        conditional_log_mean,
        xi_at_u,
    })
}

/// Functional subject to the reduction principle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ResidualKind {
    Count,
    Hill,
}

/// `Σ_t (G(X_t) - E[G(X₀)]) - G'(0) Σ_t X_t` for the count or log-excess
/// functional at the threshold of `terms`.
pub fn reduction_residual(path: &[f64], terms: &CenteringTerms, kind: ResidualKind) -> f64 {
    let n = path.len() as f64;
    let sum_x: f64 = path.iter().sum();
    let u = terms.u;
    match kind {
        ResidualKind::Count => exceedance_count(path, u) as f64 - n * terms.tail_prob - terms.density * sum_x,
        ResidualKind::Hill => {
            let h: f64 = path.iter().filter(|&&x| x > u).map(|&x| (x / u).ln()).sum();
            h - n * terms.mean_g - terms.slope_g * sum_x
        }
    }
}

/// The six normalized statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CorollaryId {
    HeavyDetCount,
    HeavyDetHill,
    HeavyRandHill,
    LightDetCount,
    LightDetHill,
    LightRandHill,
}

impl CorollaryId {
    pub const ALL: [CorollaryId; 6] = [
        CorollaryId::HeavyDetCount,
        CorollaryId::HeavyDetHill,
        CorollaryId::HeavyRandHill,
        CorollaryId::LightDetCount,
        CorollaryId::LightDetHill,
        CorollaryId::LightRandHill,
    ];

    pub fn is_heavy(self) -> bool {
        matches!(self, Self::HeavyDetCount | Self::HeavyDetHill | Self::HeavyRandHill)
    }

    pub fn is_random(self) -> bool {
        matches!(self, Self::HeavyRandHill | Self::LightRandHill)
    }

    pub fn is_count(self) -> bool {
        matches!(self, Self::HeavyDetCount | Self::LightDetCount)
    }

    /// Scale of the limit relative to `Z`: `ν, ν²/(ν+1), ν/(ν+1), 1, 1, 0`.
    pub fn predicted_limit_scale(self, nu: f64) -> f64 {
        match self {
            Self::HeavyDetCount => nu,
            Self::HeavyDetHill => nu * nu / (nu + 1.0),
            Self::HeavyRandHill => nu / (nu + 1.0),
            Self::LightDetCount | Self::LightDetHill => 1.0,
            Self::LightRandHill => 0.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::HeavyDetCount => "heavy_det_count",
            Self::HeavyDetHill => "heavy_det_hill",
            Self::HeavyRandHill => "heavy_rand_hill",
            Self::LightDetCount => "light_det_count",
            Self::LightDetHill => "light_det_hill",
            Self::LightRandHill => "light_rand_hill",
        }
    }
}

impl fmt::Display for CorollaryId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CorollaryId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s.chars().filter(|c| *c != '_' && *c != '-').collect::<String>().to_ascii_lowercase();
        Self::ALL
            .into_iter()
            .find(|c| c.as_str().replace('_', "") == key)
            .ok_or_else(|| Error::Config(format!("unknown corollary id {s:?}")))
    }
}

/// Outcome flag of one statistic evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StatStatus {
    Ok,
    /// No observation exceeded the threshold; Hill sums are 0.
    NoExceedance,
}

impl fmt::Display for StatStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StatStatus::Ok => "ok",
            StatStatus::NoExceedance => "no_exceedance",
        })
    }
}

/// One evaluated statistic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotStatistic {
    pub corollary_id: CorollaryId,
    pub n: usize,
    /// Threshold `u_n` (deterministic kinds) or `k` (random kinds).
    pub u_or_k: f64,
    pub raw_value: f64,
    pub centered_scaled_value: f64,
    pub predicted_limit_scale: f64,
    pub admissible: bool,
    pub status: StatStatus,
}

impl PotStatistic {
    pub const CSV_HEADER: &'static str = "corollary_id,n,u_or_k,raw,centered_scaled,predicted_scale,admissible";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{:e},{:e},{},{}",
            self.corollary_id,
            self.n,
            self.u_or_k,
            self.raw_value,
            self.centered_scaled_value,
            self.predicted_limit_scale,
            self.admissible
        )
    }
}

/// Everything a statistic needs at fixed `n`, computed once and applied to
/// many paths.
#[derive(Debug, Clone)]
pub struct StatisticPlan {
    pub corollary_id: CorollaryId,
    pub n: usize,
    /// Deterministic threshold `u_n`.
    pub u: f64,
    /// `⌊n P[X₀ > u_n]⌋` for random kinds.
    pub k: Option<usize>,
    pub terms: CenteringTerms,
    pub prefactor: f64,
    pub predicted_limit_scale: f64,
    pub admissible: bool,
}

impl StatisticPlan {
    /// Heavy prefactors are `n^{1-(d+1/α)} u` with `u = u_n` or
    /// `q_{X₀}(1-k/n)`. Light prefactors are `n^{1/2-d} (u/s)^{1-β} s` with
    /// `s` the marginal standard deviation, which is `n^{1/2-d} u^{1-β}` for
    /// a unit-variance marginal.
    pub fn new(
        corollary_id: CorollaryId,
        n: usize,
        theory: &TheoryReport,
        schedule: &ThresholdSchedule,
        marginal: &MarginalLaw,
        nu: f64,
    ) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid("statistics need n >= 2"));
        }
        if corollary_id.is_random() != schedule.is_random() {
            return Err(Error::invalid(format!(
                "{corollary_id} needs a {} schedule",
                if corollary_id.is_random() { "random" } else { "deterministic" }
            )));
        }
        if corollary_id.is_heavy() != (theory.alpha < 2.0) {
            return Err(Error::invalid(format!(
                "{corollary_id} does not apply with alpha = {}",
                theory.alpha
            )));
        }
        let u = schedule.threshold(n);
        let terms = centering_terms(marginal, u, nu)?;
        let nf = n as f64;
        let k = if corollary_id.is_random() {
            let k = crate::limit_theory::random_k(n, terms.tail_prob);
            if k == 0 || k >= n {
                return Err(Error::invalid(format!("k = {k} from P[X0 > u_n] is outside [1, n-1] at n = {n}")));
            }
            Some(k)
        } else {
            None
        };
        let u_scale = match k {
            Some(k) => marginal.quantile(1.0 - k as f64 / nf)?,
            None => u,
        };
        let prefactor = if corollary_id.is_heavy() {
            nf.powf(theory.rate_exponent) * u_scale
        } else {
            let beta = match schedule.rule {
                crate::limit_theory::ThresholdRule::LightLog { beta, .. } => beta,
                _ => 2.0,
            };
            let s = marginal.spread();
            nf.powf(0.5 - theory.d) * (u_scale / s).powf(1.0 - beta) * s
        };
        Ok(Self {
            corollary_id,
            n,
            u,
            k,
            terms,
            prefactor,
            predicted_limit_scale: corollary_id.predicted_limit_scale(nu),
            admissible: schedule.admissible,
        })
    }

    /// Evaluates the statistic on one path of length `n`.
    pub fn evaluate(&self, path: &[f64]) -> Result<PotStatistic> {
        if path.len() != self.n {
            return Err(Error::invalid(format!("path length {} differs from n = {}", path.len(), self.n)));
        }
        let nf = self.n as f64;
        let (raw, centered, status) = if self.corollary_id.is_count() {
            let c = exceedance_count(path, self.u) as f64;
            let status = if c > 0.0 { StatStatus::Ok } else { StatStatus::NoExceedance };
            (c, self.prefactor * (c / (nf * self.terms.tail_prob) - 1.0), status)
        } else {
            let h = match self.k {
                Some(k) => hill_random(path, k)?,
                None => hill_sum(path, self.u)?,
            };
            let status = if self.k.is_none() && exceedance_count(path, self.u) == 0 {
                StatStatus::NoExceedance
            } else {
                StatStatus::Ok
            };
            (h, self.prefactor * (h / (nf * self.terms.mean_g) - 1.0), status)
        };
        Ok(PotStatistic {
            corollary_id: self.corollary_id,
            n: self.n,
            u_or_k: self.k.map_or(self.u, |k| k as f64),
            raw_value: raw,
            centered_scaled_value: centered,
            predicted_limit_scale: self.predicted_limit_scale,
            admissible: self.admissible,
            status,
        })
    }
}

/// One-shot evaluation of a normalized statistic.
pub fn normalized_statistic(
    corollary_id: CorollaryId,
    path: &[f64],
    theory: &TheoryReport,
    schedule: &ThresholdSchedule,
    marginal: &MarginalLaw,
    nu: f64,
) -> Result<PotStatistic> {
    StatisticPlan::new(corollary_id, path.len(), theory, schedule, marginal, nu)?.evaluate(path)
}
