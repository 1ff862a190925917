//! Exponents, limit constants and threshold schedules of the reduction
//! principle and the partial-sum central limit theorem.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};
use crate::innovations::{Family, InnovationSpec};
use crate::linear_process::validate_memory;
use crate::quadrature::{integrate_panels, QuadOptions};
use crate::stable_numerics::{beta_function, gamma, StableLaw};

/// `κ(γ, r) = 1 + 1/r - (1-d)(1+γ)`.
pub fn kappa(gamma: f64, r: f64, d: f64) -> f64 {
    1.0 + 1.0 / r - (1.0 - d) * (1.0 + gamma)
}

/// Which branch of the minimizer applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `1/((1-d)(1-2d)) < α`: the memory constraint on `γ` binds.
    A,
    /// Otherwise: the moment constraints bind at the midpoint `r`.
    B,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::A => "A",
            Regime::B => "B",
        })
    }
}

/// Minimizer `(γ₀, r₀)` of `κ` and the minimum `κ₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalExponents {
    pub gamma0: f64,
    pub r0: f64,
    pub kappa0: f64,
    pub regime: Regime,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 1.0 && alpha <= 2.0) {
        return Err(Error::invalid(format!("alpha must lie in (1, 2], got {alpha}")));
    }
    Ok(())
}

/// Regime A holds when `α(1-d)(1-2d) > 1`.
pub fn regime(alpha: f64, d: f64) -> Regime {
    if 1.0 / ((1.0 - d) * (1.0 - 2.0 * d)) < alpha {
        Regime::A
    } else {
        Regime::B
    }
}

/// Regime-B value `(2(1-d) + 1 - α(1-d)(1-2d)) / (α(1-d)+1)`.
pub fn kappa0_regime_b_ratio(alpha: f64, d: f64) -> f64 {
    let s = alpha * (1.0 - d);
    (2.0 * (1.0 - d) + (1.0 - s * (1.0 - 2.0 * d))) / (s + 1.0)
}

/// Regime-B value `d + (1-d)(3 - α(1-d)) / (α(1-d)+1)`.
pub fn kappa0_regime_b_split(alpha: f64, d: f64) -> f64 {
    let s = alpha * (1.0 - d);
    d + (1.0 - d) * (3.0 - s) / (s + 1.0)
}

/// Closed-form minimizers of `κ` over the admissible `(γ, r)` set.
pub fn optimal_exponents(alpha: f64, d: f64) -> Result<OptimalExponents> {
    check_alpha(alpha)?;
    validate_memory(d, 1.0, alpha)?;
    let s = alpha * (1.0 - d);
    Ok(match regime(alpha, d) {
        Regime::A => OptimalExponents {
            gamma0: d / (1.0 - d),
            r0: s,
            kappa0: 1.0 / s,
            regime: Regime::A,
        },
        Regime::B => OptimalExponents {
            gamma0: (s - 1.0) / (s + 1.0),
            r0: 0.5 * (1.0 / (1.0 - d) + alpha),
            kappa0: kappa0_regime_b_split(alpha, d),
            regime: Regime::B,
        },
    })
}

/// Upper bound on `γ` at a given `r`: `min{d/(1-d), 1 - 1/(r(1-d)), α/r - 1}`.
pub fn gamma_upper(alpha: f64, d: f64, r: f64) -> f64 {
    (d / (1.0 - d)).min(1.0 - 1.0 / (r * (1.0 - d))).min(alpha / r - 1.0)
}

/// Largest attainable `γ` over all admissible `d`, and the maximizing `d`.
pub fn gamma_hard_bound(alpha: f64) -> Result<(f64, f64)> {
    check_alpha(alpha)?;
    let b = 1.0 - 1.0 / alpha;
    let root = (9.0 - 8.0 * b).sqrt();
    let gamma_max = 8.0 * b / ((1.0 + root) * (3.0 + root));
    let d_star = (3.0 - root) / 4.0;
    Ok((gamma_max, d_star))
}

/// Exponent `1 - (d + 1/α)` of the partial-sum normalization.
pub fn clt_rate(alpha: f64, d: f64) -> f64 {
    1.0 - (d + 1.0 / alpha)
}

/// `σ² = c_a² var B(1-2d, d) / (d(2d+1))` of the Gaussian partial-sum limit.
pub fn limit_variance(c_a: f64, var_eps: f64, d: f64) -> Result<f64> {
    if !(d > 0.0 && d < 0.5) {
        return Err(Error::invalid(format!("limit variance needs 0 < d < 1/2, got {d}")));
    }
    if !(var_eps > 0.0 && var_eps.is_finite()) {
        return Err(Error::invalid(format!("innovation variance must be positive and finite, got {var_eps}")));
    }
    Ok(c_a * c_a * var_eps * beta_function(1.0 - 2.0 * d, d)? / (d * (2.0 * d + 1.0)))
}

// Start of the analytic tail of the memory integral.
const MEMORY_TAIL_START: f64 = 1e4;

/// `I = ∫_{-∞}^{1} ((1-v)_+^d - (-v)_+^d)^α dv`, split as
/// `1/(dα+1) + ∫_0^∞ ((1+w)^d - w^d)^α dw`.
pub fn memory_integral(d: f64, alpha: f64, rel_tol: f64) -> Result<f64> {
    let q = (1.0 - d) * alpha;
    if !(d > 0.0 && d < 1.0 && q > 1.0) {
        return Err(Error::Assumption(format!(
            "memory integral diverges unless 0 < d and (1-d)·alpha > 1 (d = {d}, alpha = {alpha})"
        )));
    }
    let head = 1.0 / (d * alpha + 1.0);
    let integrand = |w: f64| {
        let diff = if w == 0.0 {
            1.0
        } else {
            w.powf(d) * (d * (1.0 / w).ln_1p()).exp_m1()
        };
        diff.powf(alpha)
    };
    let mut edges = vec![0.0, 1.0];
    while *edges.last().unwrap() < MEMORY_TAIL_START {
        let e = edges.last().unwrap() * 4.0;
        edges.push(e.min(MEMORY_TAIL_START));
    }
    let body = integrate_panels(integrand, &edges, QuadOptions::new(rel_tol * 1e-2, rel_tol));
    if !body.converged {
        return Err(Error::numerical("memory integral quadrature did not converge"));
    }
    let w = MEMORY_TAIL_START;
    let c1 = (d - 1.0) / 2.0;
    let c2 = (d - 1.0) * (d - 2.0) / 6.0;
    let tail = d.powf(alpha)
        * (w.powf(1.0 - q) / (q - 1.0)
            + alpha * c1 * w.powf(-q) / q
            + (alpha * c2 + alpha * (alpha - 1.0) / 2.0 * c1 * c1) * w.powf(-q - 1.0) / (q + 1.0));
    Ok(head + body.value + tail)
}

/// `Γ(2-α) cos(πα/2) / (1-α)`, positive on `(1, 2)`.
pub fn stable_norming_factor(alpha: f64) -> f64 {
    gamma(2.0 - alpha) * (PI * alpha / 2.0).cos() / (1.0 - alpha)
}

/// Scale `η` of the stable partial-sum limit.
pub fn limit_scale(c_a: f64, a_const: f64, alpha: f64, d: f64, quad_tol: f64) -> Result<f64> {
    if !(alpha > 1.0 && alpha < 2.0) {
        return Err(Error::invalid(format!(
            "stable limit scale needs 1 < alpha < 2 (alpha = 2 is the Gaussian case), got {alpha}"
        )));
    }
    validate_memory(d, c_a, alpha)?;
    if !(a_const > 0.0 && a_const.is_finite()) {
        return Err(Error::invalid(format!("tail constant A must be positive, got {a_const}")));
    }
    let i = memory_integral(d, alpha, quad_tol)?;
    let eta = c_a.abs() / d * (a_const * stable_norming_factor(alpha) * i).powf(1.0 / alpha);
    if eta.is_finite() && eta > 0.0 {
        Ok(eta)
    } else {
        Err(Error::numerical(format!("limit scale evaluated to {eta}")))
    }
}

/// Limit law `Z_α` of `n^{-(d+1/α)} Σ X_t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LimitLaw {
    Stable(StableLaw),
    Normal { variance: f64 },
}

impl LimitLaw {
    /// `η` for stable limits, `σ²` for Gaussian ones.
    pub fn parameter(&self) -> f64 {
        match self {
            LimitLaw::Stable(l) => l.scale(),
            LimitLaw::Normal { variance } => *variance,
        }
    }

    /// Same family with the scale multiplied by `factor`.
    pub fn rescaled(&self, factor: f64) -> Result<LimitLaw> {
        Ok(match self {
            LimitLaw::Stable(l) => LimitLaw::Stable(StableLaw::new(l.alpha(), l.scale() * factor)?),
            LimitLaw::Normal { variance } => LimitLaw::Normal {
                variance: variance * factor * factor,
            },
        })
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            LimitLaw::Stable(l) => l.cdf(x),
            LimitLaw::Normal { variance } => crate::stable_numerics::normal_cdf(x / variance.sqrt()),
        }
    }
}

/// Inputs determining the limit law besides `(α, d)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitInputs {
    pub c_a: f64,
    /// Tail constant `A`, used when `α < 2`.
    pub tail_constant: f64,
    /// Innovation variance, used when `α = 2`.
    pub variance: f64,
}

impl LimitInputs {
    pub fn from_innovation(c_a: f64, innovation: &InnovationSpec) -> Result<Self> {
        let alpha = innovation.alpha();
        let (tail_constant, variance) = if alpha < 2.0 {
            (innovation.tail_constant().unwrap_or(f64::NAN), f64::NAN)
        } else {
            (f64::NAN, innovation.variance())
        };
        if alpha == 2.0 && !variance.is_finite() {
            return Err(Error::invalid(
                "Student-t with nu = 2 has infinite variance and no normalized Gaussian limit",
            ));
        }
        if innovation.family == Family::Gaussian && alpha != 2.0 {
            return Err(Error::invalid("Gaussian innovations must have alpha = 2"));
        }
        Ok(Self {
            c_a,
            tail_constant,
            variance,
        })
    }
}

/// Relative tolerance of the memory integral inside reports.
pub const REPORT_QUAD_TOL: f64 = 1e-10;

/// Closed-form constants for given `(α, d)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoryReport {
    pub alpha: f64,
    pub d: f64,
    pub regime: Regime,
    pub gamma0: f64,
    pub r0: f64,
    pub kappa0: f64,
    pub rate_exponent: f64,
    pub gamma_max: f64,
    pub d_star: f64,
    pub limit: LimitLaw,
}

impl TheoryReport {
    pub fn new(alpha: f64, d: f64, inputs: LimitInputs) -> Result<Self> {
        let opt = optimal_exponents(alpha, d)?;
        let (gamma_max, d_star) = gamma_hard_bound(alpha)?;
        let limit = if alpha < 2.0 {
            let eta = limit_scale(inputs.c_a, inputs.tail_constant, alpha, d, REPORT_QUAD_TOL)?;
            LimitLaw::Stable(StableLaw::new(alpha, eta)?)
        } else {
            LimitLaw::Normal {
                variance: limit_variance(inputs.c_a, inputs.variance, d)?,
            }
        };
        Ok(Self {
            alpha,
            d,
            regime: opt.regime,
            gamma0: opt.gamma0,
            r0: opt.r0,
            kappa0: opt.kappa0,
            rate_exponent: clt_rate(alpha, d),
            gamma_max,
            d_star,
            limit,
        })
    }

    /// Report for a process specification.
    pub fn for_process(spec: &crate::linear_process::ProcessSpec) -> Result<Self> {
        spec.validate()?;
        Self::new(spec.alpha(), spec.d, LimitInputs::from_innovation(spec.c_a, &spec.innovation)?)
    }

    /// Flat `key = value` block.
    pub fn to_key_values(&self) -> String {
        let (kind, param) = match self.limit {
            LimitLaw::Stable(l) => ("stable", l.scale()),
            LimitLaw::Normal { variance } => ("normal", variance),
        };
        let rows: [(&str, String); 11] = [
            ("alpha", fmt_num(self.alpha)),
            ("d", fmt_num(self.d)),
            ("regime", self.regime.to_string()),
            ("gamma0", fmt_num(self.gamma0)),
            ("r0", fmt_num(self.r0)),
            ("kappa0", fmt_num(self.kappa0)),
            ("rate_exponent", fmt_num(self.rate_exponent)),
            ("eta_or_sigma2", fmt_num(param)),
            ("limit_kind", kind.to_string()),
            ("gamma_max", fmt_num(self.gamma_max)),
            ("d_star", fmt_num(self.d_star)),
        ];
        rows.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}

fn fmt_num(x: f64) -> String {
    format!("{x:.12}")
}

/// Threshold rule families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleKind {
    HeavyPower,
    LightLog,
    RandomK,
}

/// Deterministic threshold sequence `u_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdRule {
    /// `u_n = c n^θ`; `bound` is the supremum of admissible `θ`.
    HeavyPower { prefactor: f64, exponent: f64, bound: f64 },
    /// `u_n = c (β log(n) · factor)^{1/β}` with `factor = 1/2 + d - κ₀ - δ`.
    LightLog { prefactor: f64, beta: f64, factor: f64 },
}

impl ThresholdRule {
    pub fn threshold(&self, n: usize) -> f64 {
        let nf = n as f64;
        match *self {
            ThresholdRule::HeavyPower { prefactor, exponent, .. } => prefactor * nf.powf(exponent),
            ThresholdRule::LightLog { prefactor, beta, factor } => prefactor * (beta * nf.ln() * factor).powf(1.0 / beta),
        }
    }
}

/// Threshold schedule with its admissibility flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdSchedule {
    pub kind: ScheduleKind,
    /// The deterministic rule; for `RandomK` it drives `k(n)`.
    pub rule: ThresholdRule,
    pub delta: f64,
    pub admissible: bool,
}

impl ThresholdSchedule {
    pub fn threshold(&self, n: usize) -> f64 {
        self.rule.threshold(n)
    }

    /// `k(n) = ⌊n P[X₀ > u_n]⌋` from the marginal tail.
    pub fn random_k(&self, n: usize, tail_prob: impl Fn(f64) -> f64) -> usize {
        random_k(n, tail_prob(self.threshold(n)))
    }

    pub fn is_random(&self) -> bool {
        self.kind == ScheduleKind::RandomK
    }
}

/// `⌊n p⌋`.
pub fn random_k(n: usize, tail_prob: f64) -> usize {
    (n as f64 * tail_prob).floor() as usize
}

/// Optional overrides for [`make_schedule`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ScheduleOptions {
    pub delta: Option<f64>,
    pub prefactor: Option<f64>,
    /// Explicit `θ` for the heavy rule.
    pub exponent: Option<f64>,
    /// `β` of the light rule (default 2).
    pub beta: Option<f64>,
    /// Deterministic rule driving `RandomK`; defaults to heavy for `α < 2`.
    pub random_base: Option<ScheduleKind>,
}

/// Builds an admissible-by-default schedule for tail index `nu`.
///
/// Heavy rule: `θ = (d + 1/(ν∧2) - κ₀ - 2δ)/(ν+1)` with default
/// `δ = 0.1 (d + 1/α - κ₀)`. Light rule: default `δ = 0.1 (1/2 + d - κ₀)`.
pub fn make_schedule(kind: ScheduleKind, theory: &TheoryReport, nu: f64, opts: ScheduleOptions) -> Result<ThresholdSchedule> {
    let base_kind = match kind {
        ScheduleKind::RandomK => opts.random_base.unwrap_or(if theory.alpha < 2.0 {
            ScheduleKind::HeavyPower
        } else {
            ScheduleKind::LightLog
        }),
        k => k,
    };
    let prefactor = opts.prefactor.unwrap_or(1.0);
    if !(prefactor > 0.0 && prefactor.is_finite()) {
        return Err(Error::invalid(format!("threshold prefactor must be positive, got {prefactor}")));
    }
    let (rule, delta, admissible) = match base_kind {
        ScheduleKind::HeavyPower => {
            let gap = theory.d + 1.0 / theory.alpha - theory.kappa0;
            if !(gap > 0.0) {
                return Err(Error::numerical(format!(
                    "d + 1/alpha - kappa0 = {gap} is not positive; exponent bookkeeping is inconsistent"
                )));
            }
            if !(nu > 1.0) {
                return Err(Error::invalid(format!("heavy schedules need nu > 1, got {nu}")));
            }
            let delta = opts.delta.unwrap_or(0.1 * gap);
            if !(delta > 0.0) {
                return Err(Error::invalid(format!("delta must be positive, got {delta}")));
            }
            let bound = gap / (nu + 1.0);
            let exponent = opts.exponent.unwrap_or((gap - 2.0 * delta) / (nu + 1.0));
            let rule = ThresholdRule::HeavyPower {
                prefactor,
                exponent,
                bound,
            };
            (rule, delta, exponent < bound && exponent > 0.0)
        }
        ScheduleKind::LightLog => {
            let room = 0.5 + theory.d - theory.kappa0;
            let delta = opts.delta.unwrap_or(0.1 * room);
            if !(delta > 0.0) {
                return Err(Error::invalid(format!("delta must be positive, got {delta}")));
            }
            let factor = room - delta;
            if !(factor > 0.0) {
                return Err(Error::invalid(format!(
                    "1/2 + d - kappa0 - delta = {factor} must be positive for the logarithmic rule"
                )));
            }
            let beta = opts.beta.unwrap_or(2.0);
            if !(beta > 0.0) {
                return Err(Error::invalid(format!("beta must be positive, got {beta}")));
            }
            let rule = ThresholdRule::LightLog { prefactor, beta, factor };
            (rule, delta, theory.alpha == 2.0)
        }
        ScheduleKind::RandomK => return Err(Error::invalid("RandomK needs a deterministic base rule")),
    };
    Ok(ThresholdSchedule {
        kind,
        rule,
        delta,
        admissible,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid_min(alpha: f64, d: f64, cells: usize) -> (f64, f64, f64) {
        // Brute force over (γ, r) in the admissible set.
        let r_lo = 1.0 / (1.0 - d);
        let g_hi = d / (1.0 - d);
        let mut best = (f64::INFINITY, 0.0, 0.0);
        for i in 0..=cells {
            let r = r_lo + (alpha - r_lo) * i as f64 / cells as f64;
            let cap = gamma_upper(alpha, d, r);
            for k in 0..=cells {
                let g = g_hi * k as f64 / cells as f64;
                if g <= cap + 1e-15 {
                    let v = kappa(g, r, d);
                    if v < best.0 {
                        best = (v, g, r);
                    }
                }
            }
        }
        best
    }

    #[test]
    fn kappa_examples() {
        assert_eq!(kappa(0.0, 1.0, 0.0), 1.0);
        assert!((kappa(0.25, 1.8, 0.25) - 0.618_055_555_6).abs() < 1e-9);
        for i in 1..20 {
            let x = i as f64 * 0.05;
            assert!(kappa(x + 0.01, 1.5, 0.2) < kappa(x, 1.5, 0.2));
            assert!(kappa(0.1, 1.0 + x + 0.01, 0.2) < kappa(0.1, 1.0 + x, 0.2));
        }
    }

    #[test]
    fn optimal_exponent_examples() {
        let o = optimal_exponents(2.0, 0.1).unwrap();
        assert_eq!(o.regime, Regime::A);
        assert!((o.gamma0 - 1.0 / 9.0).abs() < 1e-12);
        assert!((o.r0 - 1.8).abs() < 1e-12);
        assert!((o.kappa0 - 1.0 / 1.8).abs() < 1e-12);
        let o = optimal_exponents(1.5, 0.3).unwrap();
        assert_eq!(o.regime, Regime::B);
        assert!((o.gamma0 - 0.024_390).abs() < 1e-6);
        assert!((o.r0 - 1.464_286).abs() < 1e-6);
        assert!((o.kappa0 - 0.965_854).abs() < 1e-6);
        assert!((kappa0_regime_b_ratio(1.5, 0.3) - kappa0_regime_b_split(1.5, 0.3)).abs() < 1e-12);
        for (a, d) in [(2.0, 0.1), (1.5, 0.3)] {
            let (k, _, _) = grid_min(a, d, 400);
            assert!((k - optimal_exponents(a, d).unwrap().kappa0).abs() < 5e-3);
        }
        assert!(optimal_exponents(1.5, 0.34).is_err());
        assert!(optimal_exponents(2.5, 0.1).is_err());
    }

    #[test]
    fn kappa_at_minimizer_matches_closed_form() {
        for &(a, d) in &[(2.0, 0.1), (1.5, 0.3), (1.9, 0.4), (1.2, 0.1)] {
            let o = optimal_exponents(a, d).unwrap();
            assert!((kappa(o.gamma0, o.r0, d) - o.kappa0).abs() < 1e-12);
            assert!((gamma_upper(a, d, o.r0) - o.gamma0).abs() < 1e-12);
        }
    }

    #[test]
    fn regime_boundary_is_continuous() {
        for &d in &[0.05, 0.1, 0.15, 0.2] {
            let alpha: f64 = 1.0 / ((1.0 - d) * (1.0 - 2.0 * d));
            if alpha > 2.0 || d >= 1.0 - 1.0 / alpha {
                continue;
            }
            let ka = 1.0 / (alpha * (1.0 - d));
            assert!((ka - kappa0_regime_b_split(alpha, d)).abs() < 1e-9);
            assert!((ka - kappa0_regime_b_ratio(alpha, d)).abs() < 1e-9);
        }
    }

    #[test]
    fn hard_bound_examples() {
        let (g, d) = gamma_hard_bound(2.0).unwrap();
        assert!((d - (3.0 - 5f64.sqrt()) / 4.0).abs() < 1e-15);
        assert!((d - 0.191).abs() < 1e-3);
        assert!((g - (5f64.sqrt() - 2.0)).abs() < 1e-12);
        let (g, d) = gamma_hard_bound(1.0 + 1e-9).unwrap();
        assert!(g < 1e-8 && d < 1e-8);
        assert!(gamma_hard_bound(1.0).is_err());
    }

    #[test]
    fn clt_rate_examples() {
        assert!((clt_rate(2.0, 0.25) - 0.25).abs() < 1e-15);
        assert!((clt_rate(1.5, 0.2) - 0.133_333_333_333).abs() < 1e-9);
    }

    #[test]
    fn limit_variance_examples() {
        let s = limit_variance(1.0, 1.0, 0.25).unwrap();
        assert!((s - 13.984_306_956_224_639).abs() < 1e-9);
        assert!((limit_variance(2.0, 1.0, 0.25).unwrap() - 4.0 * s).abs() < 1e-9);
        assert!(limit_variance(1.0, 1.0, 0.5).is_err());
        let mut prev = 0.0;
        for &d in &[0.1, 0.05, 0.02, 0.01, 0.005] {
            let v = limit_variance(1.0, 1.0, d).unwrap();
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn memory_integral_reference() {
        // Independent high-precision value (30-digit quadrature in w = W e^s plus the asymptotic tail).
        let i = memory_integral(0.2, 1.5, 1e-12).unwrap();
        assert!((i - 1.313_669_917_842_495_1).abs() < 1e-9, "{i}");
    }

    #[test]
    fn memory_integral_gaussian_identity() {
        // At α = 2 the integral reproduces the beta-function variance.
        for &d in &[0.1, 0.25, 0.4] {
            let i = memory_integral(d, 2.0, 1e-12).unwrap();
            let b = beta_function(1.0 - 2.0 * d, d).unwrap() / (d * (2.0 * d + 1.0));
            assert!((i / (d * d) / b - 1.0).abs() < 1e-8, "d={d}");
        }
    }

    #[test]
    fn limit_scale_values() {
        let inn = InnovationSpec::symmetric_stable(1.5, 1.0);
        let eta = limit_scale(1.0, inn.tail_constant().unwrap(), 1.5, 0.2, 1e-12).unwrap();
        assert!((eta - 5.997_369_973_537_28).abs() < 1e-8, "{eta}");
        assert!(stable_norming_factor(1.5) > 0.0);
        assert!(limit_scale(1.0, 1.0, 2.0, 0.2, 1e-10).is_err());
        // A·Γ(2-α)cos(πα/2)/(1-α) recovers σ^α for SαS(σ) innovations.
        for &a in &[1.2, 1.5, 1.8] {
            let s = InnovationSpec::symmetric_stable(a, 1.7);
            let v = s.tail_constant().unwrap() * stable_norming_factor(a);
            assert!((v / 1.7f64.powf(a) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn report_key_values() {
        let r = TheoryReport::new(
            1.5,
            0.2,
            LimitInputs {
                c_a: 1.0,
                tail_constant: InnovationSpec::symmetric_stable(1.5, 1.0).tail_constant().unwrap(),
                variance: f64::NAN,
            },
        )
        .unwrap();
        let text = r.to_key_values();
        for key in ["alpha", "d", "regime", "gamma0", "r0", "kappa0", "rate_exponent", "eta_or_sigma2"] {
            assert!(text.lines().any(|l| l.starts_with(&format!("{key} = "))), "{key}");
        }
        assert!(r.kappa0 < r.d + 1.0 / r.alpha);
        let g = TheoryReport::for_process(
            &crate::linear_process::ProcessSpec::new(0.25, 1.0, InnovationSpec::gaussian(1.0), 8).unwrap(),
        )
        .unwrap();
        assert!((g.limit.parameter() - 13.984_306_956_224_639).abs() < 1e-9);
    }

    fn report(alpha: f64, d: f64) -> TheoryReport {
        let inputs = LimitInputs {
            c_a: 1.0,
            tail_constant: 1.0,
            variance: 1.0,
        };
        TheoryReport::new(alpha, d, inputs).unwrap()
    }

    #[test]
    fn schedule_examples() {
        assert_eq!(random_k(1000, 0.05), 50);
        let t = report(1.5, 0.1);
        assert!((t.kappa0 - 1.0 / 1.35).abs() < 1e-12);
        let s = make_schedule(ScheduleKind::HeavyPower, &t, 1.5, ScheduleOptions::default()).unwrap();
        match s.rule {
            ThresholdRule::HeavyPower { bound, exponent, .. } => {
                assert!((bound - 0.010_370).abs() < 1e-6);
                assert!(exponent < bound);
            }
            _ => unreachable!(),
        }
        assert!(s.admissible);
        let over = make_schedule(
            ScheduleKind::HeavyPower,
            &t,
            1.5,
            ScheduleOptions {
                exponent: Some(0.02),
                ..Default::default()
            },
        )
        .unwrap();
        assert!(!over.admissible);

        let g = report(2.0, 0.1);
        let s = make_schedule(
            ScheduleKind::LightLog,
            &g,
            f64::INFINITY,
            ScheduleOptions {
                delta: Some(0.004),
                ..Default::default()
            },
        )
        .unwrap();
        let n = 5000usize;
        let expect = (2.0 * (n as f64).ln() * (0.6 - 1.0 / 1.8 - 0.004)).sqrt();
        assert!((s.threshold(n) - expect).abs() < 1e-12);
        assert!(((0.6f64 - 1.0 / 1.8 - 0.004) - 0.0404).abs() < 1e-4);

        let r = make_schedule(ScheduleKind::RandomK, &t, 1.5, ScheduleOptions::default()).unwrap();
        assert!(r.is_random());
        assert_eq!(r.random_k(1000, |_| 0.05), 50);
    }

    proptest! {
        #[test]
        fn kappa0_below_rate(alpha in 1.01f64..=2.0, frac in 0.001f64..0.999) {
            let d = frac * (1.0 - 1.0 / alpha);
            let o = optimal_exponents(alpha, d).unwrap();
            prop_assert!(o.kappa0 < d + 1.0 / alpha);
            prop_assert!(o.r0 >= 1.0 / (1.0 - d) - 1e-12 && o.r0 <= alpha + 1e-12);
            prop_assert!(clt_rate(alpha, d) > 0.0 && clt_rate(alpha, d) < 0.5);
        }
    }
}
