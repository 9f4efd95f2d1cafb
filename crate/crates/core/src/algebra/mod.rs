//! Word-indexed tensor-product linear algebra over exact rationals and
//! floats, plus the sector decomposition by species multiset.

pub mod matrix;
pub mod operator;
pub mod scalar;
pub mod word;

pub use matrix::{Matrix, MatrixInverse, SingularMatrix, SpectralFailure};
pub use operator::{OperatorError, SpeciesOperator, embed};
pub use scalar::{ParseRationalError, Rational, Scalar, parse_rational, rat, to_f64};
pub use word::{
    SectorBlock, SectorDecomposition, Word, WordBasis, WordError, case_b_word, index_word,
    sector_blocks, word_index,
};
