//! Replication grids over `(n, rep)`, deterministic seeding, and the
//! KS / scale / `L^r` summaries written next to the per-replication rows.
//!
//! Replication `(n, i)` simulates one path from [`replication_seed`] and
//! evaluates every configured target on it, so targets in one experiment are
//! computed on shared paths.

use std::fmt;
use std::fs;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::innovations::{Family, InnovationSpec};
use crate::limit_theory::{make_schedule, LimitLaw, ScheduleKind, ScheduleOptions, TheoryReport};
use crate::linear_process::{marginal_law, MarginalLaw, Method, PathGenerator, ProcessSpec, TailTreatment};
use crate::pot_estimators::{
    centering_terms, reduction_residual, CenteringTerms, CorollaryId, ResidualKind, StatStatus, StatisticPlan,
};
use crate::stable_numerics::{normal_quantile, sas_quantile};

/// Environment variable overriding `base_seed`.
pub const SEED_ENV: &str = "LONGTAIL_SEED";

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// `mix64(mix64(mix64(base + γ) + n + γ) + rep + γ)` with `γ` the SplitMix64
/// increment.
pub fn replication_seed(base_seed: u64, n: usize, rep: usize) -> u64 {
    let s = mix64(base_seed.wrapping_add(GOLDEN_GAMMA));
    let s = mix64(s.wrapping_add(n as u64).wrapping_add(GOLDEN_GAMMA));
    mix64(s.wrapping_add(rep as u64).wrapping_add(GOLDEN_GAMMA))
}

/// Quantity evaluated on each simulated path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Target {
    Corollary(CorollaryId),
    /// Reduction residual divided by `n^{d+1/α} G'(0)`.
    Residual(ResidualKind),
    /// `n^{-(d+1/α)} Σ X_t`.
    PartialSum,
}

impl Target {
    pub fn as_str(&self) -> &'static str {
        match self {
            Target::Corollary(c) => c.as_str(),
            Target::Residual(ResidualKind::Count) => "residual_count",
            Target::Residual(ResidualKind::Hill) => "residual_hill",
            Target::PartialSum => "partial_sum",
        }
    }

    /// Limit scale relative to `Z`; `None` when no limit law is attached.
    pub fn predicted_scale(&self, nu: f64) -> Option<f64> {
        match self {
            Target::Corollary(c) => Some(c.predicted_limit_scale(nu)),
            Target::Residual(_) => None,
            Target::PartialSum => Some(1.0),
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "residual_count" => Ok(Target::Residual(ResidualKind::Count)),
            "residual_hill" => Ok(Target::Residual(ResidualKind::Hill)),
            "partial_sum" => Ok(Target::PartialSum),
            other => other.parse().map(Target::Corollary),
        }
    }
}

/// Horizon `J` used at sample size `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Horizon {
    Fixed(usize),
    /// `J = factor · n`.
    PerN(usize),
}

/// Validated experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Process with the horizon left to [`Horizon`].
    pub process: ProcessSpec,
    pub horizon: Horizon,
    pub method: Method,
    pub targets: Vec<Target>,
    pub schedule: ScheduleOptions,
    pub n_grid: Vec<usize>,
    pub replications: usize,
    pub base_seed: u64,
    pub output_path: Option<PathBuf>,
    /// Order `r` of the reported `L^r` norms; defaults to `r₀`.
    pub lr_order: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    corollary_id: Option<String>,
    targets: Option<Vec<String>>,
    n_grid: Vec<usize>,
    replications: usize,
    base_seed: u64,
    output_path: Option<PathBuf>,
    lr_order: Option<f64>,
    process: ProcessSection,
    #[serde(default)]
    schedule: ScheduleSection,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProcessSection {
    d: f64,
    c_a: Option<f64>,
    family: String,
    tail_index: Option<f64>,
    scale: Option<f64>,
    tail: Option<String>,
    horizon: Option<usize>,
    horizon_factor: Option<usize>,
    method: Option<String>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScheduleSection {
    prefactor: Option<f64>,
    delta: Option<f64>,
    exponent: Option<f64>,
    beta: Option<f64>,
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl ExperimentConfig {
    /// Parses `key = value` text with `[process]` and `[schedule]` sections.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: ConfigFile = toml::from_str(text).map_err(|e| config_err(e.to_string()))?;
        Self::from_raw(raw)
    }

    /// Parses JSON with the same keys, sections as nested objects.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: ConfigFile = serde_json::from_str(text).map_err(|e| config_err(e.to_string()))?;
        Self::from_raw(raw)
    }

    /// Reads a `.json` file as JSON and anything else as key-value text, then
    /// applies `LONGTAIL_SEED` if set.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let cfg = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
            Self::from_json_str(&text)?
        } else {
            Self::from_toml_str(&text)?
        };
        cfg.with_seed_override(std::env::var(SEED_ENV).ok().as_deref())
    }

    /// Replaces `base_seed` by a decimal or `0x` hex override.
    pub fn with_seed_override(mut self, value: Option<&str>) -> Result<Self> {
        if let Some(v) = value {
            let v = v.trim();
            let parsed = match v.strip_prefix("0x") {
                Some(hex) => u64::from_str_radix(hex, 16),
                None => v.parse(),
            };
            self.base_seed = parsed.map_err(|_| config_err(format!("{SEED_ENV} = {v:?} is not a 64-bit integer")))?;
        }
        Ok(self)
    }

    fn from_raw(raw: ConfigFile) -> Result<Self> {
        let targets: Vec<Target> = match (&raw.corollary_id, &raw.targets) {
            (Some(c), None) => vec![c.parse()?],
            (None, Some(ts)) => ts.iter().map(|t| t.parse()).collect::<Result<_>>()?,
            _ => return Err(config_err("give exactly one of corollary_id or targets")),
        };
        let p = &raw.process;
        let scale = p.scale.unwrap_or(1.0);
        let innovation = match p.family.as_str() {
            "gaussian" => InnovationSpec::gaussian(scale),
            "stable" => InnovationSpec::symmetric_stable(
                p.tail_index.ok_or_else(|| config_err("stable family needs process.tail_index"))?,
                scale,
            ),
            "student_t" => InnovationSpec::student_t(
                p.tail_index.ok_or_else(|| config_err("student_t family needs process.tail_index"))?,
                scale,
            ),
            other => return Err(config_err(format!("unknown innovation family {other:?}"))),
        };
        let tail = match p.tail.as_deref() {
            None if innovation.family == Family::StudentT => TailTreatment::Truncate,
            None | Some("aggregate") => TailTreatment::Aggregate,
            Some("truncate") => TailTreatment::Truncate,
            Some(other) => return Err(config_err(format!("unknown tail treatment {other:?}"))),
        };
        let method = match p.method.as_deref() {
            None | Some("fft") => Method::Fft,
            Some("direct") => Method::Direct,
            Some(other) => return Err(config_err(format!("unknown method {other:?}"))),
        };
        let n_max = raw.n_grid.last().copied().unwrap_or(0);
        let horizon = match (p.horizon, p.horizon_factor) {
            (Some(_), Some(_)) => return Err(config_err("give at most one of horizon and horizon_factor")),
            (Some(j), None) => Horizon::Fixed(j),
            (None, Some(f)) => Horizon::PerN(f),
            (None, None) => match tail {
                TailTreatment::Aggregate => Horizon::PerN(4),
                TailTreatment::Truncate => Horizon::Fixed(4 * n_max),
            },
        };
        let process = ProcessSpec {
            d: p.d,
            c_a: p.c_a.unwrap_or(1.0),
            innovation,
            horizon: 0,
            tail,
        };
        let s = &raw.schedule;
        let cfg = Self {
            process,
            horizon,
            method,
            targets,
            schedule: ScheduleOptions {
                delta: s.delta,
                prefactor: s.prefactor,
                exponent: s.exponent,
                beta: s.beta,
                random_base: None,
            },
            n_grid: raw.n_grid,
            replications: raw.replications,
            base_seed: raw.base_seed,
            output_path: raw.output_path,
            lr_order: raw.lr_order,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks the grid, the replication count and the process at every `n`.
    pub fn validate(&self) -> Result<()> {
        if self.n_grid.is_empty() || self.n_grid[0] < 2 {
            return Err(config_err("n_grid must be nonempty with n >= 2"));
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(config_err("n_grid must be strictly ascending"));
        }
        if self.replications < 2 {
            return Err(config_err("replications must be at least 2"));
        }
        if self.targets.is_empty() {
            return Err(config_err("no targets"));
        }
        if let Some(r) = self.lr_order {
            if !(r >= 1.0) {
                return Err(config_err(format!("lr_order must be >= 1, got {r}")));
            }
        }
        for &n in &self.n_grid {
            self.spec_for(n).validate()?;
        }
        Ok(())
    }

    /// Process at sample size `n`.
    pub fn spec_for(&self, n: usize) -> ProcessSpec {
        let mut spec = self.process;
        spec.horizon = match self.horizon {
            Horizon::Fixed(j) => j,
            Horizon::PerN(f) => f * n,
        };
        spec
    }

    pub fn theory(&self) -> Result<TheoryReport> {
        TheoryReport::for_process(&self.spec_for(self.n_grid[0]))
    }

    /// Order of the reported `L^r` norms.
    pub fn lr_order(&self) -> Result<f64> {
        Ok(match self.lr_order {
            Some(r) => r,
            None => self.theory()?.r0,
        })
    }
}

/// Schedule for a target at given marginal. Heavy rules default to
/// `c = q_{X₀}(0.95)`; light rules to `c` = marginal standard deviation.
pub fn schedule_for(
    target: Target,
    theory: &TheoryReport,
    marginal: &MarginalLaw,
    nu: f64,
    opts: ScheduleOptions,
) -> Result<Option<crate::limit_theory::ThresholdSchedule>> {
    let heavy = theory.alpha < 2.0;
    let kind = match target {
        Target::PartialSum => return Ok(None),
        Target::Corollary(c) if c.is_random() => ScheduleKind::RandomK,
        _ if heavy => ScheduleKind::HeavyPower,
        _ => ScheduleKind::LightLog,
    };
    let mut opts = opts;
    if opts.prefactor.is_none() {
        opts.prefactor = Some(if heavy { marginal.quantile(0.95)? } else { marginal.spread() });
    }
    make_schedule(kind, theory, nu, opts).map(Some)
}

enum Evaluator {
    Statistic(StatisticPlan),
    Residual {
        terms: CenteringTerms,
        kind: ResidualKind,
        norm: f64,
        u: f64,
    },
    PartialSum {
        norm: f64,
    },
}

/// Outcome of one target on one replication.
#[derive(Debug, Clone, PartialEq)]
pub enum RowStatus {
    Ok,
    NoExceedance,
    Failed(String),
}

impl fmt::Display for RowStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowStatus::Ok => f.write_str("ok"),
            RowStatus::NoExceedance => f.write_str("no_exceedance"),
            RowStatus::Failed(reason) => write!(f, "failed: {}", reason.replace([',', '\n'], ";")),
        }
    }
}

/// One `(target, n, rep)` result.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub target: Target,
    pub n: usize,
    pub rep: usize,
    pub raw: f64,
    pub centered_scaled: f64,
    pub u_or_k: f64,
    pub status: RowStatus,
}

impl Row {
    pub const CSV_HEADER: &'static str = "corollary_id,n,rep,raw,centered_scaled,u_or_k,status";

    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{:e},{:e},{},{}",
            self.target, self.n, self.rep, self.raw, self.centered_scaled, self.u_or_k, self.status
        )
    }

    pub fn parse_csv_line(line: &str) -> Result<Self> {
        let f: Vec<&str> = line.splitn(7, ',').collect();
        if f.len() != 7 {
            return Err(config_err(format!("malformed row {line:?}")));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| config_err(format!("bad number {s:?}")));
        let int = |s: &str| s.parse::<usize>().map_err(|_| config_err(format!("bad integer {s:?}")));
        let status = match f[6] {
            "ok" => RowStatus::Ok,
            "no_exceedance" => RowStatus::NoExceedance,
            s => RowStatus::Failed(s.strip_prefix("failed: ").unwrap_or(s).to_string()),
        };
        Ok(Self {
            target: f[0].parse()?,
            n: int(f[1])?,
            rep: int(f[2])?,
            raw: num(f[3])?,
            centered_scaled: num(f[4])?,
            u_or_k: num(f[5])?,
            status,
        })
    }
}

/// Law a target's statistic is compared with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reference {
    /// Unscaled limit `Z`.
    pub limit: LimitLaw,
    /// Predicted multiple of `Z`; 0 means a point mass at 0.
    pub scale: f64,
}

impl Reference {
    /// KS distance of `samples` to this law, exact for the point mass.
    pub fn ks(&self, samples: &[f64]) -> f64 {
        if self.scale != 0.0 {
            return ks_distance(samples, |x| self.cdf(x));
        }
        if samples.is_empty() {
            return f64::NAN;
        }
        let m = samples.len() as f64;
        let below = samples.iter().filter(|&&x| x < 0.0).count() as f64;
        let above = samples.iter().filter(|&&x| x > 0.0).count() as f64;
        (below / m).max(above / m)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if self.scale == 0.0 {
            if x >= 0.0 {
                1.0
            } else {
                0.0
            }
        } else {
            match self.limit.rescaled(self.scale) {
                Ok(l) => l.cdf(x),
                Err(_) => f64::NAN,
            }
        }
    }
}

/// Per-`(target, n)` summary over rows with status `ok`.
#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub target: Target,
    pub n: usize,
    pub ks: f64,
    pub empirical_scale: f64,
    pub lr_norm: f64,
    pub count_ok: usize,
}

impl Aggregate {
    pub const CSV_HEADER: &'static str = "n,ks,empirical_scale,lr_norm,count_ok";

    pub fn csv_line(&self) -> String {
        format!("{},{:e},{:e},{:e},{}", self.n, self.ks, self.empirical_scale, self.lr_norm, self.count_ok)
    }
}

/// Summary statistics of `values` (order irrelevant).
pub fn summarize(target: Target, n: usize, values: &[f64], reference: Option<&Reference>, r: f64) -> Result<Aggregate> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let (ks, scale) = match (reference, sorted.is_empty()) {
        (Some(reference), false) => (
            reference.ks(&sorted),
            empirical_scale(&sorted, &reference.limit)?,
        ),
        _ => (f64::NAN, f64::NAN),
    };
    let lr = if sorted.is_empty() { f64::NAN } else { lr_norm_estimate(&sorted, r)? };
    Ok(Aggregate {
        target,
        n,
        ks,
        empirical_scale: scale,
        lr_norm: lr,
        count_ok: values.len(),
    })
}

/// Rows and summaries of one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationTable {
    pub rows: Vec<Row>,
    pub aggregates: Vec<Aggregate>,
    /// Log-log slope of `lr_norm` over `n` per target, when defined.
    pub rate_slopes: Vec<(Target, Option<f64>)>,
    pub lr_order: f64,
}

impl ReplicationTable {
    pub fn rows_for(&self, target: Target, n: usize) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(move |r| r.target == target && r.n == n)
    }

    /// `centered_scaled` of `ok` rows.
    pub fn values(&self, target: Target, n: usize) -> Vec<f64> {
        self.rows_for(target, n)
            .filter(|r| r.status == RowStatus::Ok)
            .map(|r| r.centered_scaled)
            .collect()
    }

    pub fn aggregate(&self, target: Target, n: usize) -> Option<&Aggregate> {
        self.aggregates.iter().find(|a| a.target == target && a.n == n)
    }

    pub fn write_rows_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{}", Row::CSV_HEADER)?;
        for r in &self.rows {
            writeln!(out, "{}", r.csv_line())?;
        }
        Ok(())
    }

    pub fn write_aggregate_csv<W: Write>(&self, target: Target, mut out: W) -> Result<()> {
        writeln!(out, "{}", Aggregate::CSV_HEADER)?;
        for a in self.aggregates.iter().filter(|a| a.target == target) {
            writeln!(out, "{}", a.csv_line())?;
        }
        Ok(())
    }

    /// Writes `rows.csv` and `aggregate_<target>.csv` into `dir`.
    pub fn write_dir(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        let rows = dir.join("rows.csv");
        self.write_rows_csv(std::io::BufWriter::new(fs::File::create(&rows)?))?;
        written.push(rows);
        for (target, _) in &self.rate_slopes {
            let path = dir.join(format!("aggregate_{target}.csv"));
            self.write_aggregate_csv(*target, std::io::BufWriter::new(fs::File::create(&path)?))?;
            written.push(path);
        }
        Ok(written)
    }
}

/// Reads rows written by [`ReplicationTable::write_rows_csv`].
pub fn read_rows_csv<R: BufRead>(input: R) -> Result<Vec<Row>> {
    let mut lines = input.lines();
    let header = lines.next().transpose()?;
    if header.as_deref().map(str::trim) != Some(Row::CSV_HEADER) {
        return Err(config_err("missing replication CSV header"));
    }
    lines
        .filter_map(|l| match l {
            Ok(l) if l.trim().is_empty() => None,
            Ok(l) => Some(Row::parse_csv_line(l.trim_end())),
            Err(e) => Some(Err(e.into())),
        })
        .collect()
}

/// Comparison law of a target, if any.
pub fn reference_for(target: Target, theory: &TheoryReport, nu: f64) -> Option<Reference> {
    target.predicted_scale(nu).map(|scale| Reference {
        limit: theory.limit,
        scale,
    })
}

struct Stage {
    n: usize,
    generator: PathGenerator,
    evaluators: Vec<(Target, Result<Evaluator>)>,
}

fn build_stage(config: &ExperimentConfig, theory: &TheoryReport, n: usize) -> Result<Stage> {
    let spec = config.spec_for(n);
    let nu = spec.innovation.tail_index;
    let generator = PathGenerator::new(&spec, n, config.method)?;
    let marginal = marginal_law(&spec)?;
    let scale_exp = theory.d + 1.0 / theory.alpha;
    let nf = n as f64;
    let evaluators = config
        .targets
        .iter()
        .map(|&target| {
            let ev = (|| -> Result<Evaluator> {
                let schedule = schedule_for(target, theory, &marginal, nu, config.schedule)?;
                Ok(match (target, schedule) {
                    (Target::Corollary(c), Some(s)) => {
                        Evaluator::Statistic(StatisticPlan::new(c, n, theory, &s, &marginal, nu)?)
                    }
                    (Target::Residual(kind), Some(s)) => {
                        let u = s.threshold(n);
                        let terms = centering_terms(&marginal, u, nu)?;
                        let slope = match kind {
                            ResidualKind::Count => terms.density,
                            ResidualKind::Hill => terms.slope_g,
                        };
                        Evaluator::Residual {
                            terms,
                            kind,
                            norm: nf.powf(scale_exp) * slope,
                            u,
                        }
                    }
                    _ => Evaluator::PartialSum {
                        norm: nf.powf(scale_exp),
                    },
                })
            })();
            (target, ev)
        })
        .collect();
    Ok(Stage { n, generator, evaluators })
}

fn evaluate(target: Target, ev: &Result<Evaluator>, path: &Result<Vec<f64>>, n: usize, rep: usize) -> Row {
    let failed = |reason: String| Row {
        target,
        n,
        rep,
        raw: f64::NAN,
        centered_scaled: f64::NAN,
        u_or_k: f64::NAN,
        status: RowStatus::Failed(reason),
    };
    let (ev, path) = match (ev, path) {
        (Err(e), _) => return failed(e.to_string()),
        (_, Err(e)) => return failed(e.to_string()),
        (Ok(ev), Ok(p)) => (ev, p),
    };
    match ev {
        Evaluator::Statistic(plan) => match plan.evaluate(path) {
            Ok(s) => Row {
                target,
                n,
                rep,
                raw: s.raw_value,
                centered_scaled: s.centered_scaled_value,
                u_or_k: s.u_or_k,
                status: match s.status {
                    StatStatus::Ok => RowStatus::Ok,
                    StatStatus::NoExceedance => RowStatus::NoExceedance,
                },
            },
            Err(e) => failed(e.to_string()),
        },
        Evaluator::Residual { terms, kind, norm, u } => {
            let raw = reduction_residual(path, terms, *kind);
            Row {
                target,
                n,
                rep,
                raw,
                centered_scaled: raw / norm,
                u_or_k: *u,
                status: RowStatus::Ok,
            }
        }
        Evaluator::PartialSum { norm } => {
            let raw: f64 = path.iter().sum();
            Row {
                target,
                n,
                rep,
                raw,
                centered_scaled: raw / norm,
                u_or_k: f64::NAN,
                status: RowStatus::Ok,
            }
        }
    }
}

/// Runs the grid on the current rayon pool.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ReplicationTable> {
    config.validate()?;
    let theory = config.theory()?;
    let nu = config.process.innovation.tail_index;
    let r = config.lr_order()?;
    let mut rows = Vec::with_capacity(config.n_grid.len() * config.replications * config.targets.len());
    for &n in &config.n_grid {
        let stage = build_stage(config, &theory, n)?;
        let per_rep: Vec<Vec<Row>> = (0..config.replications)
            .into_par_iter()
            .map(|rep| {
                let path = stage.generator.simulate(replication_seed(config.base_seed, stage.n, rep));
                stage
                    .evaluators
                    .iter()
                    .map(|(t, ev)| evaluate(*t, ev, &path, stage.n, rep))
                    .collect()
            })
            .collect();
        // Target-major order within each n.
        for (ti, _) in config.targets.iter().enumerate() {
            rows.extend(per_rep.iter().map(|v| v[ti].clone()));
        }
    }
    let mut aggregates = Vec::new();
    let mut rate_slopes = Vec::new();
    for &target in &config.targets {
        let reference = reference_for(target, &theory, nu);
        let mut norms = Vec::new();
        for &n in &config.n_grid {
            let values: Vec<f64> = rows
                .iter()
                .filter(|row| row.target == target && row.n == n && row.status == RowStatus::Ok)
                .map(|row| row.centered_scaled)
                .collect();
            let agg = summarize(target, n, &values, reference.as_ref(), r)?;
            norms.push(agg.lr_norm);
            aggregates.push(agg);
        }
        let ns: Vec<f64> = config.n_grid.iter().map(|&n| n as f64).collect();
        rate_slopes.push((target, rate_fit(&ns, &norms).ok().map(|f| f.slope)));
    }
    Ok(ReplicationTable {
        rows,
        aggregates,
        rate_slopes,
        lr_order: r,
    })
}

/// Runs the grid on a dedicated pool of `workers` threads.
pub fn run_experiment_with_workers(config: &ExperimentConfig, workers: usize) -> Result<ReplicationTable> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::numerical(format!("thread pool: {e}")))?;
    pool.install(|| run_experiment(config))
}

/// Kolmogorov-Smirnov distance `sup |F_m - F|` for continuous `F`; tied
/// sample values are treated as one jump of the empirical distribution.
/// NaN for an empty sample.
pub fn ks_distance(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    if samples.is_empty() {
        return f64::NAN;
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let m = xs.len() as f64;
    let mut d: f64 = 0.0;
    let mut lo = 0;
    while lo < xs.len() {
        let mut hi = lo + 1;
        while hi < xs.len() && xs[hi] == xs[lo] {
            hi += 1;
        }
        let f = cdf(xs[lo]);
        d = d.max((hi as f64 / m - f).abs()).max((f - lo as f64 / m).abs());
        lo = hi;
    }
    d
}

/// `(mean |x|^r)^{1/r}`, summed in sorted order.
pub fn lr_norm_estimate(samples: &[f64], r: f64) -> Result<f64> {
    if !(r >= 1.0) {
        return Err(Error::invalid(format!("L^r norm needs r >= 1, got {r}")));
    }
    if samples.is_empty() {
        return Err(Error::invalid("L^r norm of an empty sample"));
    }
    let mut xs: Vec<f64> = samples.iter().map(|x| x.abs()).collect();
    xs.sort_by(f64::total_cmp);
    let mean = xs.iter().map(|x| x.powf(r)).sum::<f64>() / xs.len() as f64;
    Ok(mean.powf(1.0 / r))
}

/// `median |x|` divided by the upper quartile of the symmetric law `limit`,
/// an estimate of `c` when the sample follows `c Z`.
pub fn empirical_scale(samples: &[f64], limit: &LimitLaw) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::invalid("scale of an empty sample"));
    }
    let mut abs: Vec<f64> = samples.iter().map(|x| x.abs()).collect();
    abs.sort_by(f64::total_cmp);
    let m = abs.len();
    let median = if m % 2 == 1 {
        abs[m / 2]
    } else {
        0.5 * (abs[m / 2 - 1] + abs[m / 2])
    };
    let q = match limit {
        LimitLaw::Stable(l) => sas_quantile(l, 0.75)?,
        LimitLaw::Normal { variance } => variance.sqrt() * normal_quantile(0.75)?,
    };
    Ok(median / q)
}

/// Least-squares line through `(log n, log value)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
}

pub fn rate_fit(ns: &[f64], values: &[f64]) -> Result<RateFit> {
    if ns.len() != values.len() || ns.len() < 3 {
        return Err(Error::invalid("rate fit needs at least 3 points of equal-length arrays"));
    }
    if ns.iter().chain(values).any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::invalid("rate fit needs positive finite values"));
    }
    let xs: Vec<f64> = ns.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("rate fit needs distinct n"));
    }
    let slope = sxy / sxx;
    Ok(RateFit {
        slope,
        intercept: my - slope * mx,
    })
}
