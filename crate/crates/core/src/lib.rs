//! Long-memory linear processes with heavy- or light-tailed innovations,
//! their partial-sum limits, and peaks-over-threshold statistics.

#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![cfg_attr(test, allow(clippy::excessive_precision))]

pub mod error;
pub mod innovations;
pub mod limit_theory;
pub mod linear_process;
pub mod mc_harness;
pub mod pot_estimators;
pub mod quadrature;
pub mod series;
pub mod stable_numerics;

pub use error::{Error, Result};
pub use innovations::{Family, InnovationSpec};
pub use limit_theory::{
    LimitLaw, OptimalExponents, Regime, ScheduleKind, ScheduleOptions, TheoryReport, ThresholdRule,
    ThresholdSchedule,
};
pub use linear_process::{MarginalLaw, Method, PartialSumLaw, PathGenerator, ProcessSpec, TailTreatment};
pub use mc_harness::{ExperimentConfig, ReplicationTable, Target};
pub use pot_estimators::{CenteringTerms, CorollaryId, PotStatistic, ResidualKind, StatisticPlan};
pub use stable_numerics::StableLaw;
