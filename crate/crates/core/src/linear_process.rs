//! Causal long-memory linear processes `X_t = Σ_j a_j ε_{t-j}` with
//! `a_j = c_a (j+1)^{-(1-d)}`.
//!
//! Two treatments of the infinite past are available:
//!
//! * [`TailTreatment::Truncate`] keeps lags `0..=J` and draws `n + J`
//!   innovations.
//! * [`TailTreatment::Aggregate`] keeps every lag. Innovations with index in
//!   `[1-J, n]` are drawn explicitly and convolved with the full kernel. The
//!   remote past `k <= -J` enters through geometric blocks of lags: the block
//!   sum `Σ_{L∈B} L^{-(1-d)} ε` is itself a scaled copy of the innovation law
//!   (stable and Gaussian laws are closed under such sums), and its weight at
//!   time `t` follows from a Taylor expansion of `(1 + t/L)^{-(1-d)}` about the
//!   block midpoint. The marginal and partial-sum laws then match the
//!   untruncated process up to the midpoint approximation, which is below
//!   `1e-3` relative on the remote contribution.
//!
//! The long-memory tail of the coefficients decays too slowly for truncation
//! to reach a small relative error at practical `J` when `α(1-d)` is close
//! to one, which is what the aggregated mode is for.

use std::io::{BufRead, Write};
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use realfft::num_complex::Complex;
use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};

use crate::error::{Error, Result};
use crate::innovations::{Family, InnovationSpec};
use crate::quadrature::{integrate_estimate, QuadOptions};
use crate::series::{power_sum, zeta};
use crate::stable_numerics::{normal_pdf, normal_quantile, normal_sf, sas_quantile, StableLaw};

/// Handling of lags beyond the horizon `J`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TailTreatment {
    #[default]
    Truncate,
    Aggregate,
}

/// Convolution kernel used by [`simulate_path`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    Direct,
    #[default]
    Fft,
}

/// Parameters of the linear process.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProcessSpec {
    pub d: f64,
    pub c_a: f64,
    pub innovation: InnovationSpec,
    pub horizon: usize,
    pub tail: TailTreatment,
}

impl ProcessSpec {
    /// Truncated process with horizon `J`, validated.
    pub fn new(d: f64, c_a: f64, innovation: InnovationSpec, horizon: usize) -> Result<Self> {
        let spec = Self {
            d,
            c_a,
            innovation,
            horizon,
            tail: TailTreatment::Truncate,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_tail(mut self, tail: TailTreatment) -> Result<Self> {
        self.tail = tail;
        self.validate()?;
        Ok(self)
    }

    /// Checks `c_a != 0`, `0 < d < 1 - 1/α` and the innovation law.
    pub fn validate(&self) -> Result<()> {
        self.innovation.validate()?;
        validate_memory(self.d, self.c_a, self.alpha())?;
        if self.tail == TailTreatment::Aggregate {
            if self.innovation.family == Family::StudentT {
                return Err(Error::invalid(
                    "remote-past aggregation needs a sum-stable innovation law; use truncation for Student-t",
                ));
            }
            if self.horizon == 0 {
                return Err(Error::invalid("aggregation needs a positive horizon"));
            }
        }
        Ok(())
    }

    pub fn alpha(&self) -> f64 {
        self.innovation.alpha()
    }

    /// Exponent `p = 1 - d` of the coefficient decay.
    pub fn decay(&self) -> f64 {
        1.0 - self.d
    }
}

pub(crate) fn validate_memory(d: f64, c_a: f64, alpha: f64) -> Result<()> {
    if !(c_a != 0.0 && c_a.is_finite()) {
        return Err(Error::Assumption(format!("c_a must be finite and nonzero, got {c_a}")));
    }
    let upper = 1.0 - 1.0 / alpha;
    if !(d > 0.0 && d < upper) {
        return Err(Error::Assumption(format!(
            "memory parameter d = {d} must lie in (0, {upper}) for alpha = {alpha}"
        )));
    }
    Ok(())
}

/// `a_0, ..., a_J`.
pub fn coefficients(spec: &ProcessSpec) -> Vec<f64> {
    kernel(spec.c_a, spec.decay(), spec.horizon + 1)
}

fn kernel(c_a: f64, p: f64, len: usize) -> Vec<f64> {
    (0..len).map(|j| c_a * ((j + 1) as f64).powf(-p)).collect()
}

/// Smallest power-of-two `J` with `Σ_{j>J} |a_j|^α <= rel_tol Σ_{j<=J} |a_j|^α`.
pub fn truncation_horizon(d: f64, alpha: f64, rel_tol: f64) -> Result<usize> {
    if !(rel_tol > 0.0 && rel_tol < 1.0) {
        return Err(Error::invalid(format!("rel_tol must lie in (0, 1), got {rel_tol}")));
    }
    let q = (1.0 - d) * alpha;
    if !(q > 1.0) || !(d > 0.0) {
        return Err(Error::Assumption(format!(
            "(1-d)·alpha = {q} <= 1: the coefficient tail series diverges"
        )));
    }
    for e in 0..=62u32 {
        let j = 1u64 << e;
        let head = power_sum(q, 1, Some(j + 1));
        let tail = power_sum(q, j + 2, None);
        if tail <= rel_tol * head {
            return usize::try_from(j).map_err(|_| Error::numerical("horizon exceeds address space"));
        }
    }
    Err(Error::numerical(format!(
        "no horizon below 2^62 meets rel_tol = {rel_tol} for d = {d}, alpha = {alpha}"
    )))
}

// Remote-past blocks grow geometrically by this ratio.
const BLOCK_RATIO: f64 = 1.0 + 1.0 / 256.0;
// Lags beyond (J+1)·2^32 share one block; t/L < 2^-32 there.
const BLOCK_CAP_SHIFT: u32 = 32;
const TAYLOR_TOL: f64 = 1e-15;

#[derive(Debug, Clone)]
struct RemotePast {
    // (Σ_{L∈B} L^{-pα})^{1/α} per block.
    block_scale: Vec<f64>,
    // J / midpoint(B).
    inv_mid: Vec<f64>,
    // Binomial coefficients C(-p, r).
    taylor: Vec<f64>,
}

impl RemotePast {
    fn new(p: f64, alpha: f64, n: usize, horizon: usize) -> Self {
        let j = horizon as f64;
        let first = horizon as u64 + 1;
        let cap = first.saturating_mul(1u64 << BLOCK_CAP_SHIFT).min(1u64 << 62);
        let pa = p * alpha;
        let mut block_scale = Vec::new();
        let mut inv_mid = Vec::new();
        let mut lo = first;
        while lo <= cap {
            let hi = ((lo as f64 * BLOCK_RATIO).floor() as u64).max(lo).min(cap);
            block_scale.push(power_sum(pa, lo, Some(hi)).powf(1.0 / alpha));
            inv_mid.push(j / ((lo as f64) * (hi as f64)).sqrt());
            lo = hi + 1;
        }
        block_scale.push(power_sum(pa, cap + 1, None).powf(1.0 / alpha));
        inv_mid.push(0.0);

        let x = n as f64 / j;
        let mut taylor = vec![1.0];
        let mut c = 1.0f64;
        let mut r = 0.0;
        while (c * x.powf(r)).abs() > TAYLOR_TOL && taylor.len() < 400 {
            c *= (-p - r) / (r + 1.0);
            r += 1.0;
            taylor.push(c);
        }
        Self {
            block_scale,
            inv_mid,
            taylor,
        }
    }

    fn blocks(&self) -> usize {
        self.block_scale.len()
    }

    // Adds c_a Σ_B E_B (1 + t/L̄_B)^{-p} to x[t-1], given E_B / block_scale.
    fn add(&self, c_a: f64, horizon: usize, draws: &[f64], x: &mut [f64]) {
        let terms = self.taylor.len();
        let mut moments = vec![0.0; terms];
        for ((&s, &w), &v) in draws.iter().zip(&self.block_scale).zip(&self.inv_mid) {
            let e = s * w;
            let mut pw = 1.0;
            for m in moments.iter_mut() {
                *m += e * pw;
                pw *= v;
                if pw == 0.0 {
                    break;
                }
            }
        }
        let coef: Vec<f64> = self.taylor.iter().zip(&moments).map(|(c, m)| c_a * c * m).collect();
        let j = horizon as f64;
        for (i, xt) in x.iter_mut().enumerate() {
            let u = (i + 1) as f64 / j;
            let mut acc = 0.0;
            for c in coef.iter().rev() {
                acc = acc * u + c;
            }
            *xt += acc;
        }
    }
}

struct FftPlan {
    size: usize,
    forward: Arc<dyn RealToComplex<f64>>,
    inverse: Arc<dyn ComplexToReal<f64>>,
    kernel_spectrum: Vec<Complex<f64>>,
}

/// Precomputed kernel, FFT plan and remote-past blocks for repeated path
/// generation at fixed `(spec, n, method)`. Shareable across threads.
pub struct PathGenerator {
    spec: ProcessSpec,
    n: usize,
    method: Method,
    kernel: Vec<f64>,
    fft: Option<FftPlan>,
    remote: Option<RemotePast>,
}

impl PathGenerator {
    pub fn new(spec: &ProcessSpec, n: usize, method: Method) -> Result<Self> {
        spec.validate()?;
        if n == 0 {
            return Err(Error::invalid("path length n must be at least 1"));
        }
        let horizon = spec.horizon;
        let p = spec.decay();
        let (kernel, remote) = match spec.tail {
            TailTreatment::Truncate => (kernel(spec.c_a, p, horizon + 1), None),
            TailTreatment::Aggregate => {
                if horizon < 2 * n {
                    return Err(Error::invalid(format!(
                        "aggregation needs horizon >= 2n (got J = {horizon}, n = {n})"
                    )));
                }
                (
                    kernel(spec.c_a, p, n + horizon),
                    Some(RemotePast::new(p, spec.alpha(), n, horizon)),
                )
            }
        };
        let fft = match method {
            Method::Direct => None,
            Method::Fft => {
                // Circular convolution is exact on the needed outputs once the
                // wrapped indices stay below J.
                let explicit = n + horizon;
                let min_size = match spec.tail {
                    TailTreatment::Truncate => explicit,
                    TailTreatment::Aggregate => explicit + kernel.len() - horizon,
                };
                let size = min_size.next_power_of_two();
                let mut planner = RealFftPlanner::<f64>::new();
                let forward = planner.plan_fft_forward(size);
                let inverse = planner.plan_fft_inverse(size);
                let mut buf = vec![0.0; size];
                buf[..kernel.len()].copy_from_slice(&kernel);
                let mut kernel_spectrum = forward.make_output_vec();
                forward
                    .process(&mut buf, &mut kernel_spectrum)
                    .map_err(|e| Error::numerical(format!("fft: {e}")))?;
                Some(FftPlan {
                    size,
                    forward,
                    inverse,
                    kernel_spectrum,
                })
            }
        };
        Ok(Self {
            spec: *spec,
            n,
            method,
            kernel,
            fft,
            remote,
        })
    }

    pub fn spec(&self) -> &ProcessSpec {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn method(&self) -> Method {
        self.method
    }

    /// Number of random draws consumed per path.
    pub fn draws_per_path(&self) -> usize {
        self.n + self.spec.horizon + self.remote.as_ref().map_or(0, RemotePast::blocks)
    }

    /// Explicit innovations `ε_{1-J}, ..., ε_n` followed by the remote-past
    /// block draws, all from one stream seeded by `seed`.
    pub fn draw_innovations(&self, seed: u64) -> (Vec<f64>, Vec<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut eps = vec![0.0; self.n + self.spec.horizon];
        self.spec.innovation.fill(&mut rng, &mut eps);
        let mut blocks = vec![0.0; self.remote.as_ref().map_or(0, RemotePast::blocks)];
        self.spec.innovation.fill(&mut rng, &mut blocks);
        (eps, blocks)
    }

    /// `X_1, ..., X_n`.
    pub fn simulate(&self, seed: u64) -> Result<Vec<f64>> {
        let (eps, blocks) = self.draw_innovations(seed);
        self.assemble(&eps, &blocks)
    }

    /// Path from given innovations (length `n + J`) and block draws.
    pub fn assemble(&self, eps: &[f64], blocks: &[f64]) -> Result<Vec<f64>> {
        let horizon = self.spec.horizon;
        if eps.len() != self.n + horizon {
            return Err(Error::invalid(format!(
                "expected {} innovations, got {}",
                self.n + horizon,
                eps.len()
            )));
        }
        let mut x = match &self.fft {
            None => self.convolve_direct(eps),
            Some(plan) => self.convolve_fft(plan, eps)?,
        };
        if let Some(remote) = &self.remote {
            remote.add(self.spec.c_a, horizon, blocks, &mut x);
        }
        Ok(x)
    }

    fn convolve_direct(&self, eps: &[f64]) -> Vec<f64> {
        let horizon = self.spec.horizon;
        let k = &self.kernel;
        (0..self.n)
            .map(|t| {
                let m = t + horizon;
                let lo = m.saturating_sub(k.len() - 1);
                let mut acc = 0.0;
                for i in lo..=m {
                    acc += k[m - i] * eps[i];
                }
                acc
            })
            .collect()
    }

    fn convolve_fft(&self, plan: &FftPlan, eps: &[f64]) -> Result<Vec<f64>> {
        let mut buf = vec![0.0; plan.size];
        buf[..eps.len()].copy_from_slice(eps);
        let mut spec = plan.forward.make_output_vec();
        plan.forward
            .process(&mut buf, &mut spec)
            .map_err(|e| Error::numerical(format!("fft: {e}")))?;
        for (s, k) in spec.iter_mut().zip(&plan.kernel_spectrum) {
            *s *= k;
        }
        plan.inverse
            .process(&mut spec, &mut buf)
            .map_err(|e| Error::numerical(format!("fft: {e}")))?;
        let norm = 1.0 / plan.size as f64;
        let h = self.spec.horizon;
        Ok(buf[h..h + self.n].iter().map(|v| v * norm).collect())
    }
}

/// One path `X_1..X_n` from `seed`.
pub fn simulate_path(spec: &ProcessSpec, n: usize, seed: u64, method: Method) -> Result<Vec<f64>> {
    PathGenerator::new(spec, n, method)?.simulate(seed)
}

/// Weights `b_{n,k}` of `Σ_{t=1}^n X_t = Σ_k b_{n,k} ε_k` over the truncated
/// kernel, for `k = first_index, ..., n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialSumWeights {
    pub first_index: i64,
    pub weights: Vec<f64>,
}

/// Exact partial-sum weights on the explicit kernel (lags `0..=J`).
pub fn partial_sum_weights(spec: &ProcessSpec, n: usize) -> Result<PartialSumWeights> {
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    let a = coefficients(spec);
    let horizon = spec.horizon as i64;
    let n_i = n as i64;
    // prefix[m] = a_0 + ... + a_{m-1}
    let mut prefix = Vec::with_capacity(a.len() + 1);
    prefix.push(0.0);
    let mut acc = 0.0;
    for v in &a {
        acc += v;
        prefix.push(acc);
    }
    let weights = (1 - horizon..=n_i)
        .map(|k| {
            let lo = (1 - k).max(0);
            let hi = (n_i - k).min(horizon);
            prefix[(hi + 1) as usize] - prefix[lo as usize]
        })
        .collect();
    Ok(PartialSumWeights {
        first_index: 1 - horizon,
        weights,
    })
}

/// `Σ_k |b_{n,k}|^q`. Truncated specs sum the explicit weights; aggregated
/// specs return the value for the untruncated kernel.
pub fn weight_power_sum(spec: &ProcessSpec, n: usize, q: f64) -> Result<f64> {
    match spec.tail {
        TailTreatment::Truncate => {
            let w = partial_sum_weights(spec, n)?;
            Ok(w.weights.iter().map(|b| b.abs().powf(q)).sum())
        }
        TailTreatment::Aggregate => untruncated_weight_power_sum(spec.d, spec.c_a, n, q),
    }
}

// Beyond this multiple of n the far-past sum switches to quadrature.
const FAR_DIRECT_FACTOR: usize = 8;
// Exact recomputation interval for the running window sum.
const RESYNC: usize = 4096;

/// `Σ_{k<=n} |b_{n,k}|^q` for the full kernel `a_j = c_a (j+1)^{-p}`,
/// `p = 1 - d`, requiring `(1-d) q > 1`.
pub fn untruncated_weight_power_sum(d: f64, c_a: f64, n: usize, q: f64) -> Result<f64> {
    let p = 1.0 - d;
    if !(p * q > 1.0) {
        return Err(Error::Assumption(format!("(1-d)·q = {} <= 1: weight sum diverges", p * q)));
    }
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    // k = 1..n: b = c_a H(m), m = n-k+1.
    let mut h = 0.0;
    let mut recent = 0.0;
    for m in 1..=n {
        h += (m as f64).powf(-p);
        recent += h.powf(q);
    }
    // k <= 0, m = 1-k: b = c_a D(m), D(m) = Σ_{L=m+1}^{m+n} L^{-p}.
    let window = |m: u64| power_sum(p, m + 1, Some(m + n as u64));
    let m_direct = FAR_DIRECT_FACTOR * n.max(64);
    let mut past = 0.0;
    let mut dm = window(1);
    for m in 1..=m_direct {
        if m % RESYNC == 0 {
            dm = window(m as u64);
        }
        past += dm.powf(q);
        let mf = m as f64;
        dm += (mf + 1.0 + n as f64).powf(-p) - (mf + 1.0).powf(-p);
    }
    // Smooth remainder m > m_direct by Euler–Maclaurin on g(m) = D(m)^q.
    let g = |m: f64| {
        let lo = m.floor() as u64;
        let frac = m - lo as f64;
        if frac == 0.0 {
            window(lo).powf(q)
        } else {
            continuous_window(p, n as f64, m).powf(q)
        }
    };
    let m0 = (m_direct + 1) as f64;
    let nf = n as f64;
    let m_far = nf * 1e9;
    let opts = QuadOptions::new(0.0, 1e-13).with_max_intervals(4000);
    let body = integrate_estimate(|s: f64| {
        let m = m0 * s.exp();
        g(m) * m
    }, 0.0, (m_far / m0).ln(), opts);
    if !body.converged {
        return Err(Error::numerical("far-past weight quadrature did not converge"));
    }
    // D(m) ≈ n m^{-p} for m >> n; the relative correction is O(n/m).
    let pq = p * q;
    let tail = nf.powf(q) * m_far.powf(1.0 - pq) / (pq - 1.0);
    let g0 = g(m0);
    let dg = (g(m0 + 1.0) - g(m0 - 1.0)) / 2.0;
    let far = body.value + tail + 0.5 * g0 - dg / 12.0;
    Ok(c_a.abs().powf(q) * (recent + past + far))
}

// Smooth interpolant of D(m) for non-integer m: Euler–Maclaurin on
// [m+1, m+n] with the same corrections as the integer version.
fn continuous_window(p: f64, n: f64, m: f64) -> f64 {
    let a = m + 1.0;
    let b = m + n;
    let e = 1.0 - p;
    let l = ((b - a) / a).ln_1p();
    let integral = a.powf(e) * (e * l).exp_m1() / e;
    let fa = a.powf(-p);
    let fb = b.powf(-p);
    integral + 0.5 * (fa + fb) + (-p * fb / b + p * fa / a) / 12.0
}

/// Law of the partial sum `Σ_{t=1}^n X_t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PartialSumLaw {
    Normal { variance: f64 },
    Stable(StableLaw),
}

/// Exact law of `Σ_{t=1}^n X_t` for Gaussian and stable innovations.
pub fn partial_sum_law(spec: &ProcessSpec, n: usize) -> Result<PartialSumLaw> {
    let inn = spec.innovation;
    match inn.family {
        Family::Gaussian => Ok(PartialSumLaw::Normal {
            variance: inn.scale * inn.scale * weight_power_sum(spec, n, 2.0)?,
        }),
        Family::SymmetricStable => {
            let alpha = inn.tail_index;
            let s = weight_power_sum(spec, n, alpha)?;
            Ok(PartialSumLaw::Stable(StableLaw::new(alpha, inn.scale * s.powf(1.0 / alpha))?))
        }
        Family::StudentT => Err(Error::invalid("Student-t partial sums have no closed-form law")),
    }
}

/// Stationary law of `X_0`.
#[derive(Debug, Clone, PartialEq)]
pub enum MarginalLaw {
    GaussianExact { variance: f64 },
    StableExact(StableLaw),
    /// Sorted simulated sample with the innovation tail index attached.
    MonteCarloEmpirical { nu: f64, sample: Arc<Vec<f64>> },
}

impl MarginalLaw {
    /// `P[X₀ > x]`.
    pub fn sf(&self, x: f64) -> f64 {
        match self {
            MarginalLaw::GaussianExact { variance } => normal_sf(x / variance.sqrt()),
            MarginalLaw::StableExact(l) => l.sf(x),
            MarginalLaw::MonteCarloEmpirical { sample, .. } => {
                let above = sample.len() - sample.partition_point(|v| *v <= x);
                above as f64 / sample.len() as f64
            }
        }
    }

    /// Density of `X₀`; a symmetric difference quotient of the empirical
    /// distribution function for the Monte Carlo marginal.
    pub fn pdf(&self, x: f64) -> f64 {
        match self {
            MarginalLaw::GaussianExact { variance } => {
                let s = variance.sqrt();
                normal_pdf(x / s) / s
            }
            MarginalLaw::StableExact(l) => l.pdf(x),
            MarginalLaw::MonteCarloEmpirical { .. } => {
                let h = EMPIRICAL_BANDWIDTH * x.abs().max(self.spread());
                (self.sf(x - h) - self.sf(x + h)) / (2.0 * h)
            }
        }
    }

    /// Quantile `q(p)`, `0 < p < 1`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::invalid(format!("quantile level must lie in (0, 1), got {p}")));
        }
        match self {
            MarginalLaw::GaussianExact { variance } => Ok(variance.sqrt() * normal_quantile(p)?),
            MarginalLaw::StableExact(l) => sas_quantile(l, p),
            MarginalLaw::MonteCarloEmpirical { sample, .. } => {
                let idx = ((p * sample.len() as f64).ceil() as usize).clamp(1, sample.len());
                Ok(sample[idx - 1])
            }
        }
    }

    /// Standard deviation for the Gaussian marginal, otherwise the scale
    /// (stable) or interquartile half-width (sample).
    pub fn spread(&self) -> f64 {
        match self {
            MarginalLaw::GaussianExact { variance } => variance.sqrt(),
            MarginalLaw::StableExact(l) => l.scale(),
            MarginalLaw::MonteCarloEmpirical { sample, .. } => {
                let m = sample.len();
                0.5 * (sample[(3 * m) / 4] - sample[m / 4])
            }
        }
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, MarginalLaw::MonteCarloEmpirical { .. })
    }
}

// Relative half-width of the empirical density window.
const EMPIRICAL_BANDWIDTH: f64 = 0.05;

/// Default sample size of the Monte Carlo marginal.
pub const EMPIRICAL_MARGINAL_SIZE: usize = 1 << 16;

/// `Σ_j |a_j|^q` over the kernel the spec simulates.
pub fn coefficient_power_sum(spec: &ProcessSpec, q: f64) -> f64 {
    let pq = spec.decay() * q;
    let s = match spec.tail {
        TailTreatment::Truncate => power_sum(pq, 1, Some(spec.horizon as u64 + 1)),
        TailTreatment::Aggregate => zeta(pq),
    };
    spec.c_a.abs().powf(q) * s
}

/// Closed-form marginal for Gaussian and stable innovations; a simulated
/// sample of [`EMPIRICAL_MARGINAL_SIZE`] values for Student-t.
pub fn marginal_law(spec: &ProcessSpec) -> Result<MarginalLaw> {
    marginal_law_with_sample(spec, EMPIRICAL_MARGINAL_SIZE, 0)
}

pub fn marginal_law_with_sample(spec: &ProcessSpec, sample_size: usize, seed: u64) -> Result<MarginalLaw> {
    spec.validate()?;
    let inn = spec.innovation;
    match inn.family {
        Family::Gaussian => Ok(MarginalLaw::GaussianExact {
            variance: inn.scale * inn.scale * coefficient_power_sum(spec, 2.0),
        }),
        Family::SymmetricStable => {
            let alpha = inn.tail_index;
            let scale = inn.scale * coefficient_power_sum(spec, alpha).powf(1.0 / alpha);
            Ok(MarginalLaw::StableExact(StableLaw::new(alpha, scale)?))
        }
        Family::StudentT => {
            let mut sample = simulate_path(spec, sample_size, seed, Method::Fft)?;
            sample.sort_by(f64::total_cmp);
            Ok(MarginalLaw::MonteCarloEmpirical {
                nu: inn.tail_index,
                sample: Arc::new(sample),
            })
        }
    }
}

/// Writes a single-column CSV with header `x`.
pub fn write_path_csv<W: Write>(mut out: W, xs: &[f64]) -> Result<()> {
    writeln!(out, "x")?;
    for x in xs {
        writeln!(out, "{x:e}")?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a single-column CSV with an optional non-numeric header line.
pub fn read_column_csv<R: BufRead>(input: R) -> Result<Vec<f64>> {
    let mut xs = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let field = line.split(',').next().unwrap_or("").trim();
        if field.is_empty() {
            continue;
        }
        match field.parse::<f64>() {
            Ok(v) => xs.push(v),
            Err(_) if i == 0 => {}
            Err(_) => return Err(Error::Config(format!("line {}: not a number: {field:?}", i + 1))),
        }
    }
    Ok(xs)
}
