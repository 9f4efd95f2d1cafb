//! Word-indexed operators on full tensor-product spaces.

use thiserror::Error;

use super::matrix::Matrix;
use super::scalar::Scalar;
use super::word::{Word, WordError, word_index};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OperatorError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("operator dimension {dim} does not equal {n_species}^{sites}")]
    DimensionMismatch { dim: usize, n_species: u8, sites: usize },
    #[error("embed site {site} out of range 1..={max}")]
    EmbedSiteOutOfRange { site: usize, max: usize },
    #[error("operators live on different spaces")]
    SpaceMismatch,
}

/// A square matrix acting on the `N^n`-dimensional word space, with rows and
/// columns ordered lexicographically by word.
#[derive(Clone, PartialEq)]
pub struct SpeciesOperator<S> {
    n_species: u8,
    sites: usize,
    mat: Matrix<S>,
}

impl<S: std::fmt::Display> std::fmt::Debug for SpeciesOperator<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "SpeciesOperator(N={}, sites={}) {:?}",
            self.n_species, self.sites, self.mat
        )
    }
}

impl<S: Scalar> SpeciesOperator<S> {
    pub fn from_matrix(n_species: u8, sites: usize, mat: Matrix<S>) -> Result<Self, OperatorError> {
        let dim = (n_species as usize).pow(sites as u32);
        if !mat.is_square() || mat.rows() != dim {
            return Err(OperatorError::DimensionMismatch {
                dim: mat.rows(),
                n_species,
                sites,
            });
        }
        Ok(Self { n_species, sites, mat })
    }

    pub fn identity(n_species: u8, sites: usize) -> Self {
        let dim = (n_species as usize).pow(sites as u32);
        Self {
            n_species,
            sites,
            mat: Matrix::identity(dim),
        }
    }

    pub fn zero(n_species: u8, sites: usize) -> Self {
        let dim = (n_species as usize).pow(sites as u32);
        Self {
            n_species,
            sites,
            mat: Matrix::zeros(dim, dim),
        }
    }

    pub fn n_species(&self) -> u8 {
        self.n_species
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn matrix(&self) -> &Matrix<S> {
        &self.mat
    }

    pub fn into_matrix(self) -> Matrix<S> {
        self.mat
    }

    /// Entry addressed by `(row word, column word)`; agrees with flat
    /// indexing through [`word_index`].
    pub fn entry(&self, row: &Word, col: &Word) -> Result<&S, OperatorError> {
        let r = word_index(row, self.n_species)?;
        let c = word_index(col, self.n_species)?;
        Ok(&self.mat[(r, c)])
    }

    pub fn set_entry(&mut self, row: &Word, col: &Word, value: S) -> Result<(), OperatorError> {
        let r = word_index(row, self.n_species)?;
        let c = word_index(col, self.n_species)?;
        self.mat[(r, c)] = value;
        Ok(())
    }

    /// Column of the operator applied to a basis word, as `(word, coeff)`
    /// pairs for the nonzero rows.
    pub fn apply_basis(&self, col: &Word) -> Result<Vec<(Word, S)>, OperatorError> {
        use super::word::index_word;
        let c = word_index(col, self.n_species)?;
        let mut out = Vec::new();
        for r in 0..self.dim() {
            let v = &self.mat[(r, c)];
            if !v.is_zero() {
                let word = index_word(r, self.sites, self.n_species).expect("row in range");
                out.push((word, v.clone()));
            }
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Self) -> Result<Self, OperatorError> {
        if self.n_species != other.n_species || self.sites != other.sites {
            return Err(OperatorError::SpaceMismatch);
        }
        Ok(Self {
            n_species: self.n_species,
            sites: self.sites,
            mat: self.mat.mul(&other.mat),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self, OperatorError> {
        if self.n_species != other.n_species || self.sites != other.sites {
            return Err(OperatorError::SpaceMismatch);
        }
        Ok(Self {
            n_species: self.n_species,
            sites: self.sites,
            mat: self.mat.add(&other.mat),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, OperatorError> {
        if self.n_species != other.n_species || self.sites != other.sites {
            return Err(OperatorError::SpaceMismatch);
        }
        Ok(Self {
            n_species: self.n_species,
            sites: self.sites,
            mat: self.mat.sub(&other.mat),
        })
    }

    /// Tensor product; row and column indices concatenate the factor words.
    pub fn kron(&self, other: &Self) -> Result<Self, OperatorError> {
        if self.n_species != other.n_species {
            return Err(OperatorError::SpaceMismatch);
        }
        Ok(Self {
            n_species: self.n_species,
            sites: self.sites + other.sites,
            mat: self.mat.kron(&other.mat),
        })
    }
}

/// `I^{⊗(site-1)} ⊗ op ⊗ I^{⊗(sites-site-1)}`: the two-site operator acting
/// on tensor slots `(site, site+1)`, 1-based, and as the identity elsewhere.
pub fn embed<S: Scalar>(
    op: &SpeciesOperator<S>,
    site: usize,
    sites: usize,
) -> Result<SpeciesOperator<S>, OperatorError> {
    if op.sites() != 2 {
        return Err(OperatorError::DimensionMismatch {
            dim: op.dim(),
            n_species: op.n_species(),
            sites: 2,
        });
    }
    if site == 0 || site + 1 > sites {
        return Err(OperatorError::EmbedSiteOutOfRange {
            site,
            max: sites.saturating_sub(1),
        });
    }
    let left = SpeciesOperator::identity(op.n_species(), site - 1);
    let right = SpeciesOperator::identity(op.n_species(), sites - site - 1);
    left.kron(op)?.kron(&right)
}
