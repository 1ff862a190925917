//! Symmetric innovation laws and reproducible i.i.d. sampling.

use std::f64::consts::PI;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, StudentT};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::stable_numerics::{draw_sas, gamma, ln_gamma, normal_sf, stable_cdf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Gaussian,
    SymmetricStable,
    StudentT,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Gaussian => "gaussian",
            Family::SymmetricStable => "stable",
            Family::StudentT => "student_t",
        })
    }
}

/// Law of the innovations `ε`. For the Gaussian family `scale` is the
/// standard deviation and `tail_index` is `+∞`; for the stable family it is
/// the `SαS` scale; for Student-t it multiplies a standard `t_ν` variate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnovationSpec {
    pub family: Family,
    pub tail_index: f64,
    pub scale: f64,
}

impl InnovationSpec {
    pub fn gaussian(sd: f64) -> Self {
        Self {
            family: Family::Gaussian,
            tail_index: f64::INFINITY,
            scale: sd,
        }
    }

    pub fn symmetric_stable(nu: f64, scale: f64) -> Self {
        Self {
            family: Family::SymmetricStable,
            tail_index: nu,
            scale,
        }
    }

    pub fn student_t(nu: f64, scale: f64) -> Self {
        Self {
            family: Family::StudentT,
            tail_index: nu,
            scale,
        }
    }

    /// Checks the moment and scale requirements of the model.
    pub fn validate(&self) -> Result<()> {
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::invalid(format!("innovation scale must be positive, got {}", self.scale)));
        }
        match self.family {
            Family::Gaussian => Ok(()),
            Family::SymmetricStable if !(self.tail_index > 1.0 && self.tail_index < 2.0) => Err(Error::Assumption(
                format!("stable innovations need 1 < nu < 2, got {}", self.tail_index),
            )),
            Family::StudentT if !(self.tail_index > 1.0 && self.tail_index.is_finite()) => Err(Error::Assumption(
                format!("Student-t innovations need finite nu > 1, got {}", self.tail_index),
            )),
            _ => Ok(()),
        }
    }

    /// `α = min(ν, 2)`.
    pub fn alpha(&self) -> f64 {
        self.tail_index.min(2.0)
    }

    /// Tail constant `A` with `x^ν P[ε > x] -> A/2`; `None` for Gaussian.
    pub fn tail_constant(&self) -> Option<f64> {
        let nu = self.tail_index;
        match self.family {
            Family::Gaussian => None,
            Family::SymmetricStable => Some(2.0 * self.scale.powf(nu) * (PI * nu / 2.0).sin() * gamma(nu) / PI),
            Family::StudentT => {
                let ln_k = ln_gamma((nu + 1.0) / 2.0) - ln_gamma(nu / 2.0) - 0.5 * (nu * PI).ln();
                Some(2.0 * (ln_k + 0.5 * (nu - 1.0) * nu.ln()).exp() * self.scale.powf(nu))
            }
        }
    }

    /// Variance of `ε`; infinite for stable laws and Student-t with `ν <= 2`.
    pub fn variance(&self) -> f64 {
        let nu = self.tail_index;
        match self.family {
            Family::Gaussian => self.scale * self.scale,
            Family::SymmetricStable => f64::INFINITY,
            Family::StudentT if nu > 2.0 => self.scale * self.scale * nu / (nu - 2.0),
            Family::StudentT => f64::INFINITY,
        }
    }

    /// One draw using the caller's generator.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.family {
            Family::Gaussian => {
                let z: f64 = rng.sample(StandardNormal);
                self.scale * z
            }
            Family::SymmetricStable => draw_sas(rng, self.tail_index, self.scale),
            Family::StudentT => {
                let t = StudentT::new(self.tail_index).expect("validated degrees of freedom");
                self.scale * t.sample(rng)
            }
        }
    }

    /// Fills `out` with i.i.d. draws.
    pub fn fill<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        match self.family {
            Family::StudentT => {
                let t = StudentT::new(self.tail_index).expect("validated degrees of freedom");
                for v in out.iter_mut() {
                    *v = self.scale * t.sample(rng);
                }
            }
            _ => {
                for v in out.iter_mut() {
                    *v = self.draw(rng);
                }
            }
        }
    }
}

/// Draws `count` i.i.d. innovations; identical arguments give identical
/// output.
pub fn sample_innovations(spec: &InnovationSpec, count: usize, seed: u64) -> Result<Vec<f64>> {
    spec.validate()?;
    if count == 0 {
        return Err(Error::invalid("innovation count must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![0.0; count];
    spec.fill(&mut rng, &mut out);
    Ok(out)
}

/// `P[ε > x]`.
pub fn innovation_tail(spec: &InnovationSpec, x: f64) -> f64 {
    if x < 0.0 {
        return 1.0 - innovation_tail(spec, -x);
    }
    if x == 0.0 {
        return 0.5;
    }
    match spec.family {
        Family::Gaussian => normal_sf(x / spec.scale),
        Family::SymmetricStable => stable_cdf(spec.tail_index, spec.scale, -x),
        Family::StudentT => StudentsT::new(0.0, 1.0, spec.tail_index)
            .map(|t| t.sf(x / spec.scale))
            .unwrap_or(f64::NAN),
    }
}

/// Algebraic moment index `ν` (`+∞` for Gaussian).
pub fn moment_index(spec: &InnovationSpec) -> f64 {
    spec.tail_index
}
