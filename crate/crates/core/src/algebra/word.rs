//! Species words and the tensor-product bases they index.
//!
//! A word is the left-to-right sequence of species labels of the ordered
//! particles. Bases are ordered lexicographically with species 1 smallest,
//! so for two sites and two species the order is 11, 12, 21, 22.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("species label {letter} out of range 1..={n_species}")]
    LetterOutOfRange { letter: u8, n_species: u8 },
    #[error("basis index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
}

/// Sequence of species labels, each in `1..=N`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn new(letters: impl Into<Vec<u8>>) -> Self {
        Word(letters.into())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn letter(&self, site: usize) -> u8 {
        self.0[site]
    }

    pub fn set_letter(&mut self, site: usize, letter: u8) {
        self.0[site] = letter;
    }

    /// Letters sorted ascending; two words lie in the same sector exactly
    /// when their multisets agree.
    pub fn multiset(&self) -> Word {
        let mut sorted = self.0.clone();
        sorted.sort_unstable();
        Word(sorted)
    }

    pub fn validate(&self, n_species: u8) -> Result<(), WordError> {
        for &letter in &self.0 {
            if letter == 0 || letter > n_species {
                return Err(WordError::LetterOutOfRange { letter, n_species });
            }
        }
        Ok(())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &letter in &self.0 {
            write!(f, "{letter}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{self}⟩")
    }
}

/// Lexicographic rank of `word` among all words of its length, 0-based.
pub fn word_index(word: &Word, n_species: u8) -> Result<usize, WordError> {
    word.validate(n_species)?;
    let base = n_species as usize;
    let mut rank = 0usize;
    for &letter in word.letters() {
        rank = rank * base + (letter as usize - 1);
    }
    Ok(rank)
}

/// Inverse of [`word_index`].
pub fn index_word(index: usize, len: usize, n_species: u8) -> Result<Word, WordError> {
    let base = n_species as usize;
    let dim = base.pow(len as u32);
    if index >= dim {
        return Err(WordError::IndexOutOfRange { index, dim });
    }
    let mut letters = vec![0u8; len];
    let mut rest = index;
    for slot in letters.iter_mut().rev() {
        *slot = (rest % base) as u8 + 1;
        rest /= base;
    }
    Ok(Word(letters))
}

/// An explicit ordered word basis: either the full `N^n`-dimensional space or
/// one sector (all permutations of a fixed multiset). Operators that preserve
/// species multisets can be represented on either kind.
#[derive(Clone, Debug)]
pub struct WordBasis {
    n_species: u8,
    word_len: usize,
    words: Vec<Word>,
    positions: HashMap<Word, usize>,
}

impl WordBasis {
    pub fn full(n_species: u8, word_len: usize) -> Self {
        let dim = (n_species as usize).pow(word_len as u32);
        let words: Vec<Word> = (0..dim)
            .map(|i| index_word(i, word_len, n_species).expect("index in range"))
            .collect();
        Self::from_words(n_species, word_len, words)
    }

    /// All permutations of the given multiset, in lexicographic order.
    pub fn sector(n_species: u8, multiset: &Word) -> Self {
        let mut words = permutations_of(multiset.letters());
        words.sort();
        Self::from_words(n_species, multiset.len(), words)
    }

    fn from_words(n_species: u8, word_len: usize, words: Vec<Word>) -> Self {
        let positions = words
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i))
            .collect();
        Self {
            n_species,
            word_len,
            words,
            positions,
        }
    }

    pub fn n_species(&self) -> u8 {
        self.n_species
    }

    pub fn word_len(&self) -> usize {
        self.word_len
    }

    pub fn dim(&self) -> usize {
        self.words.len()
    }

    pub fn word(&self, index: usize) -> &Word {
        &self.words[index]
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn position(&self, word: &Word) -> Option<usize> {
        self.positions.get(word).copied()
    }
}

fn permutations_of(letters: &[u8]) -> Vec<Word> {
    let mut sorted = letters.to_vec();
    sorted.sort_unstable();
    let mut out = vec![Word(sorted.clone())];
    // next_permutation loop over the sorted start
    loop {
        let n = sorted.len();
        if n < 2 {
            break;
        }
        let Some(i) = (0..n - 1).rev().find(|&i| sorted[i] < sorted[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| sorted[j] > sorted[i]).unwrap();
        sorted.swap(i, j);
        sorted[i + 1..].reverse();
        out.push(Word(sorted.clone()));
    }
    out
}

/// Partition of the full basis of `(n_species, word_len)` into sectors keyed
/// by species multiset, each holding the ascending basis indices of its
/// member words.
#[derive(Clone, Debug)]
pub struct SectorDecomposition {
    n_species: u8,
    word_len: usize,
    blocks: Vec<SectorBlock>,
}

#[derive(Clone, Debug)]
pub struct SectorBlock {
    pub multiset: Word,
    pub indices: Vec<usize>,
}

pub fn sector_blocks(word_len: usize, n_species: u8) -> SectorDecomposition {
    let full = WordBasis::full(n_species, word_len);
    let mut by_multiset: HashMap<Word, Vec<usize>> = HashMap::new();
    for (i, word) in full.words().iter().enumerate() {
        by_multiset.entry(word.multiset()).or_default().push(i);
    }
    let mut blocks: Vec<SectorBlock> = by_multiset
        .into_iter()
        .map(|(multiset, indices)| SectorBlock { multiset, indices })
        .collect();
    blocks.sort_by(|a, b| a.multiset.cmp(&b.multiset));
    SectorDecomposition {
        n_species,
        word_len,
        blocks,
    }
}

impl SectorDecomposition {
    pub fn blocks(&self) -> &[SectorBlock] {
        &self.blocks
    }

    pub fn block_for(&self, word: &Word) -> Option<&SectorBlock> {
        let key = word.multiset();
        self.blocks.iter().find(|b| b.multiset == key)
    }

    pub fn full_dim(&self) -> usize {
        (self.n_species as usize).pow(self.word_len as u32)
    }

    /// True when the blocks are pairwise disjoint and cover every index.
    pub fn is_partition(&self) -> bool {
        let mut seen = vec![false; self.full_dim()];
        for block in &self.blocks {
            for &i in &block.indices {
                if i >= seen.len() || seen[i] {
                    return false;
                }
                seen[i] = true;
            }
        }
        seen.iter().all(|&s| s)
    }
}

/// Distinguished basis of the one-off sector: `case_b_word(r, n)` places the
/// single species-2 particle at site `r` among species-1 particles.
pub fn case_b_word(r: usize, word_len: usize) -> Word {
    let mut letters = vec![1u8; word_len];
    letters[r] = 2;
    Word(letters)
}
