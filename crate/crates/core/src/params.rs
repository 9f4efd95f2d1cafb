//! Model parameters: species count, per-species interpolation weights, and
//! the rightward drift.

use num_traits::{One, Zero};
use thiserror::Error;

use crate::algebra::{Rational, Scalar, to_f64};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParamsError {
    #[error("at least one species is required")]
    NoSpecies,
    #[error("at most {max} species are supported, got {got}")]
    TooManySpecies { max: usize, got: usize },
    #[error("mu[{index}] = {value} is outside [0, 1]")]
    MuOutOfRange { index: usize, value: String },
    #[error("p = {value} is outside [0, 1]")]
    DriftOutOfRange { value: String },
}

/// Species labels are single digits in reports, which caps the count.
pub const MAX_SPECIES: usize = 8;

/// Per-species interpolation weights `mu[i]` and the rightward rate `p`.
/// `lambda[i] = 1 - mu[i]` and `q = 1 - p` are derived, never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams<S> {
    mu: Vec<S>,
    p: S,
}

impl<S: Scalar> ModelParams<S> {
    pub fn new(mu: Vec<S>, p: S) -> Result<Self, ParamsError> {
        if mu.is_empty() {
            return Err(ParamsError::NoSpecies);
        }
        if mu.len() > MAX_SPECIES {
            return Err(ParamsError::TooManySpecies {
                max: MAX_SPECIES,
                got: mu.len(),
            });
        }
        for (index, value) in mu.iter().enumerate() {
            if *value < S::zero() || *value > S::one() {
                return Err(ParamsError::MuOutOfRange {
                    index,
                    value: value.to_string(),
                });
            }
        }
        if p < S::zero() || p > S::one() {
            return Err(ParamsError::DriftOutOfRange {
                value: p.to_string(),
            });
        }
        Ok(Self { mu, p })
    }

    /// Totally asymmetric variant (`p = 1`).
    pub fn totally_asymmetric(mu: Vec<S>) -> Result<Self, ParamsError> {
        Self::new(mu, S::one())
    }

    pub fn n_species(&self) -> u8 {
        self.mu.len() as u8
    }

    /// Jump-over weight for a same-species encounter, by 1-based label.
    pub fn mu(&self, species: u8) -> &S {
        &self.mu[(species - 1) as usize]
    }

    /// Swap weight `1 - mu` for a same-species encounter.
    pub fn lambda(&self, species: u8) -> S {
        S::one() - self.mu(species).clone()
    }

    pub fn mu_values(&self) -> &[S] {
        &self.mu
    }

    pub fn p(&self) -> &S {
        &self.p
    }

    pub fn q(&self) -> S {
        S::one() - self.p.clone()
    }
}

impl ModelParams<Rational> {
    pub fn to_float(&self) -> ModelParams<f64> {
        ModelParams {
            mu: self.mu.iter().map(to_f64).collect(),
            p: to_f64(&self.p),
        }
    }

    /// True when every `mu` is 0 or 1, the regime where all same-species
    /// resolutions are deterministic.
    pub fn is_binary(&self) -> bool {
        self.mu.iter().all(|m| m.is_zero() || m.is_one())
    }
}
