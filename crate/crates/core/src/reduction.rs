//! Boundary elimination for blocked configurations.
//!
//! When several particles sit on consecutive sites, shift operators in the
//! free evolution produce configurations with a doubled site. Those are
//! eliminated through a chain of operators built alternately from the two
//! local channels: each chain step is `X_k = B_{k+1} · A_{k-1}^{-1} · B'_k`
//! with pivot `A_k = I - X_k`, and invertibility of every pivot is exactly
//! what makes the elimination well defined. Singular pivots are reported as
//! data, not errors: general invertibility is only conjectured, so a scan
//! must be able to record a failure.
//!
//! All operators here preserve species multisets, so everything can run
//! either on a full word basis or restricted to a single sector.

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{
    Matrix, MatrixInverse, Rational, Scalar, SingularMatrix, SpectralFailure, Word, WordBasis,
    case_b_word, rat, to_f64,
};
use crate::local_ops::{LocalOp, embedded_local};
use crate::params::ModelParams;
use crate::report::CheckReport;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReductionError {
    #[error("chain depth {depth} exceeds the maximum {max} for {sites} sites at offset {offset}")]
    DepthTooLarge {
        depth: usize,
        max: usize,
        sites: usize,
        offset: usize,
    },
    #[error("block of length {block_len} at position {position} does not fit in {sites} sites")]
    BlockOutOfRange {
        block_len: usize,
        position: usize,
        sites: usize,
    },
    #[error("elimination undefined: pivot {k} is singular ({source})")]
    SingularPivot { k: usize, source: SingularMatrix },
    #[error("scalar sector recursion violated its invariants: {0}")]
    ScalarSectorInconsistent(String),
    #[error("words must share one length and species multiset")]
    IncompatibleWords,
    #[error(transparent)]
    Spectral(#[from] SpectralFailure),
}

/// One step of the elimination chain.
#[derive(Clone)]
pub struct ChainStep<S> {
    pub k: usize,
    /// `X_k = B_{k+1} · A_{k-1}^{-1} · B'_k`
    pub transfer: Matrix<S>,
    /// `A_k = I - X_k`
    pub pivot: Matrix<S>,
    /// `A_k^{-1}`, absent when the pivot is singular.
    pub pivot_inverse: Option<Matrix<S>>,
}

#[derive(Clone)]
pub struct ReductionChain<S> {
    offset: usize,
    steps: Vec<ChainStep<S>>,
    /// First `k` whose pivot was singular; steps beyond it are undefined.
    failure: Option<(usize, SingularMatrix)>,
}

impl<S: Scalar> ReductionChain<S> {
    pub fn steps(&self) -> &[ChainStep<S>] {
        &self.steps
    }

    pub fn step(&self, k: usize) -> &ChainStep<S> {
        &self.steps[k - 1]
    }

    pub fn failure(&self) -> Option<usize> {
        self.failure.as_ref().map(|(k, _)| *k)
    }

    pub fn fully_invertible(&self) -> bool {
        self.failure.is_none()
    }

    pub fn offset(&self) -> usize {
        self.offset
    }

    fn singular_error(&self, k: usize) -> ReductionError {
        let source = match &self.failure {
            Some((fk, source)) if *fk == k => source.clone(),
            _ => SingularMatrix { pivot_row: 0 },
        };
        ReductionError::SingularPivot { k, source }
    }

    fn pivot_inverse(&self, k: usize) -> Result<&Matrix<S>, ReductionError> {
        self.steps[k - 1]
            .pivot_inverse
            .as_ref()
            .ok_or_else(|| self.singular_error(k))
    }
}

impl ReductionChain<f64> {
    /// Spectral radius of each transfer operator, in step order.
    pub fn transfer_radii(&self) -> Result<Vec<f64>, SpectralFailure> {
        self.steps
            .iter()
            .map(|s| s.transfer.spectral_radius())
            .collect()
    }
}

/// Largest admissible chain depth: step `k` embeds a factor at site
/// `offset + k`, which must stay within the `sites - 1` adjacent pairs.
pub fn max_chain_depth(sites: usize, offset: usize) -> usize {
    (sites - 1).saturating_sub(offset)
}

/// Builds the elimination chain to the requested depth on the given basis.
/// Block-local factor `B_i` acts on tensor slots `(offset+i-1, offset+i)`.
pub fn chain<S: MatrixInverse>(
    basis: &WordBasis,
    depth: usize,
    params: &ModelParams<S>,
) -> Result<ReductionChain<S>, ReductionError> {
    chain_at(basis, depth, 1, params)
}

pub fn chain_at<S: MatrixInverse>(
    basis: &WordBasis,
    depth: usize,
    offset: usize,
    params: &ModelParams<S>,
) -> Result<ReductionChain<S>, ReductionError> {
    let sites = basis.word_len();
    let max = max_chain_depth(sites, offset);
    if depth > max {
        return Err(ReductionError::DepthTooLarge {
            depth,
            max,
            sites,
            offset,
        });
    }
    let dim = basis.dim();
    let identity = Matrix::<S>::identity(dim);
    let mut steps = Vec::with_capacity(depth);
    let mut failure = None;
    let mut prev_inverse = identity.clone();
    for k in 1..=depth {
        let jump_next = embedded_local(basis, LocalOp::JumpOver, offset + k, params).unwrap();
        let swap_here = embedded_local(basis, LocalOp::Swap, offset + k - 1, params).unwrap();
        let transfer = jump_next.mul(&prev_inverse).mul(&swap_here);
        let pivot = identity.sub(&transfer);
        let pivot_inverse = S::inverse(&pivot);
        steps.push(ChainStep {
            k,
            transfer,
            pivot,
            pivot_inverse: pivot_inverse.as_ref().ok().cloned(),
        });
        match pivot_inverse {
            Ok(inv) => prev_inverse = inv,
            Err(source) => {
                failure = Some((k, source));
                break;
            }
        }
    }
    Ok(ReductionChain {
        offset,
        steps,
        failure,
    })
}

/// Checks the closed inverse of the chain in the deterministic regime where
/// every `mu` is 0 or 1: each transfer squares to zero, so `A_k^{-1} = I + X_k`.
/// Cross-checks against the elimination inverse.
pub fn binary_chain_report(basis: &WordBasis, params: &ModelParams<Rational>) -> CheckReport {
    let mut report = CheckReport::new();
    if !params.is_binary() {
        report.fail("binary_regime", "parameters are not all in {0, 1}");
        return report;
    }
    let depth = max_chain_depth(basis.word_len(), 1);
    let chain = match chain::<Rational>(basis, depth, params) {
        Ok(c) => c,
        Err(e) => {
            report.fail("binary_chain", e.to_string());
            return report;
        }
    };
    let identity = Matrix::<Rational>::identity(basis.dim());
    for step in chain.steps() {
        let name_sq = format!("transfer_{}_squares_to_zero", step.k);
        if step.transfer.mul(&step.transfer).is_zero() {
            report.pass(name_sq);
        } else {
            report.fail(name_sq, "transfer squared is nonzero");
        }
        let name_inv = format!("pivot_{}_inverse_is_identity_plus_transfer", step.k);
        let closed = identity.add(&step.transfer);
        match step.pivot_inverse.as_ref() {
            Some(inv) if *inv == closed && step.pivot.mul(&closed).is_identity() => {
                report.pass(name_inv)
            }
            Some(_) => report.fail(name_inv, "closed form disagrees with elimination inverse"),
            None => report.fail(name_inv, format!("pivot {} singular", step.k)),
        }
    }
    report
}

/// Scalar data of the single-species sector: the chain acts on `|i···i⟩` by
/// the scalars `a_k`, which satisfy `a_0 = 1`, `a_k = 1 - alpha/a_{k-1}` with
/// `alpha = mu·lambda`, and equal ratios of the weight sums
/// `S_k = sum_r mu^{k-r}·lambda^r`.
#[derive(Clone, Debug)]
pub struct ScalarSector {
    pub species: u8,
    pub alpha: Rational,
    /// `a[k]` for `k = 0..=depth`.
    pub ratios: Vec<Rational>,
    /// `S[k]` for `k = 0..=depth+1`, always the summation form (the closed
    /// ratio form degenerates at `mu = lambda`).
    pub weight_sums: Vec<Rational>,
    /// `c[k-1] = alpha / a_{k-1}` for `k = 1..=depth`; the scalar by which
    /// the k-th transfer acts on the single-species word.
    pub contractions: Vec<Rational>,
    /// Larger root of `r = 1 - alpha/r`; every `a_k` stays at or above it.
    pub fixed_point: f64,
}

/// Weight sum `S_k` for one species.
pub fn weight_sum(k: usize, species: u8, params: &ModelParams<Rational>) -> Rational {
    let mu = params.mu(species).clone();
    let lambda = params.lambda(species);
    let mut total = Rational::zero();
    for r in 0..=k {
        let mut term = Rational::one();
        for _ in 0..(k - r) {
            term *= mu.clone();
        }
        for _ in 0..r {
            term *= lambda.clone();
        }
        total += term;
    }
    total
}

pub fn scalar_sector(
    species: u8,
    depth: usize,
    params: &ModelParams<Rational>,
) -> Result<ScalarSector, ReductionError> {
    let alpha = params.mu(species).clone() * params.lambda(species);
    let alpha_f = to_f64(&alpha);
    let fixed_point = (1.0 + (1.0 - 4.0 * alpha_f).sqrt()) / 2.0;

    let mut ratios = vec![Rational::one()];
    let mut contractions = Vec::with_capacity(depth);
    for k in 1..=depth {
        let prev = ratios[k - 1].clone();
        if prev.is_zero() {
            return Err(ReductionError::ScalarSectorInconsistent(format!(
                "a_{} vanished",
                k - 1
            )));
        }
        let c = alpha.clone() / prev;
        ratios.push(Rational::one() - c.clone());
        contractions.push(c);
    }

    let weight_sums: Vec<Rational> = (0..=depth + 1)
        .map(|k| weight_sum(k, species, params))
        .collect();

    // The recursion must reproduce the weight-sum ratios exactly, and every
    // a_k must clear the fixed point (checked via the quadratic
    // a² - a + alpha >= 0 on the upper branch, which avoids the square root).
    for k in 0..=depth {
        let ratio_form = weight_sums[k + 1].clone() / weight_sums[k].clone();
        if ratios[k] != ratio_form {
            return Err(ReductionError::ScalarSectorInconsistent(format!(
                "a_{k} = {} but S_{}/S_{} = {}",
                ratios[k],
                k + 1,
                k,
                ratio_form
            )));
        }
        let a = &ratios[k];
        let above_half = *a >= rat(1, 2);
        let quadratic = a.clone() * a.clone() - a.clone() + alpha.clone();
        if !above_half || quadratic < Rational::zero() {
            return Err(ReductionError::ScalarSectorInconsistent(format!(
                "a_{k} = {} fell below the fixed point",
                a
            )));
        }
    }

    Ok(ScalarSector {
        species,
        alpha,
        ratios,
        weight_sums,
        contractions,
        fixed_point,
    })
}

/// Result of eliminating a doubled block: coefficients expressing each
/// doubled configuration `W_{m,i}` in terms of the two admissible anchors,
/// `W_{m,i} = left_coeff[i-1]·W_{m,0} + right_coeff[i-1]·W_{m,m+1}`.
///
/// `W_{m,0}` is the configuration with the extra particle one site to the
/// left of the block, `W_{m,m+1}` the fully spread block.
#[derive(Clone)]
pub struct BlockElimination<S> {
    pub block_len: usize,
    pub position: usize,
    pub left_coeff: Vec<Matrix<S>>,
    pub right_coeff: Vec<Matrix<S>>,
}

impl<S: Scalar> BlockElimination<S> {
    /// Operator identities equivalent to substituting the solution back into
    /// the block recurrence, with the conventions `L_0 = I`, `L_{m+1} = 0`,
    /// `L'_0 = 0`, `L'_{m+1} = I`.
    pub fn residual_holds(&self, basis: &WordBasis, params: &ModelParams<S>) -> bool {
        let m = self.block_len;
        let dim = basis.dim();
        let identity = Matrix::<S>::identity(dim);
        let zero = Matrix::<S>::zeros(dim, dim);
        let left_at = |i: usize| -> &Matrix<S> {
            if i == 0 {
                &identity
            } else if i == m + 1 {
                &zero
            } else {
                &self.left_coeff[i - 1]
            }
        };
        let right_at = |i: usize| -> &Matrix<S> {
            if i == 0 {
                &zero
            } else if i == m + 1 {
                &identity
            } else {
                &self.right_coeff[i - 1]
            }
        };
        for i in 1..=m {
            let jump = embedded_local(basis, LocalOp::JumpOver, self.position + i - 1, params)
                .unwrap();
            let swap = embedded_local(basis, LocalOp::Swap, self.position + i - 1, params)
                .unwrap();
            let lhs_left = jump.mul(left_at(i - 1)).add(&swap.mul(left_at(i + 1)));
            let lhs_right = jump.mul(right_at(i - 1)).add(&swap.mul(right_at(i + 1)));
            if lhs_left != self.left_coeff[i - 1] || lhs_right != self.right_coeff[i - 1] {
                return false;
            }
        }
        true
    }
}

/// Forward elimination: solves the block recurrence from the left end,
/// producing `L_m = A_{m-1}^{-1} B_m · A_{m-2}^{-1} B_{m-1} ··· A_1^{-1} B_2 · B_1`.
pub fn eliminate_block<S: MatrixInverse>(
    basis: &WordBasis,
    block_len: usize,
    position: usize,
    params: &ModelParams<S>,
) -> Result<BlockElimination<S>, ReductionError> {
    check_block_range(basis, block_len, position)?;
    let m = block_len;
    let chain = chain_at(basis, m.saturating_sub(1), position, params)?;
    if let Some(k) = chain.failure() {
        return Err(chain.singular_error(k));
    }
    let factor = |op, i: usize| embedded_local(basis, op, position + i - 1, params).unwrap();

    // W_i = G_i·W_0 + H_i·W_{i+1}
    let mut forward_left = Vec::with_capacity(m);
    let mut forward_step = Vec::with_capacity(m);
    forward_left.push(factor(LocalOp::JumpOver, 1));
    forward_step.push(factor(LocalOp::Swap, 1));
    for i in 2..=m {
        let pivot_inv = chain.pivot_inverse(i - 1)?;
        forward_left.push(pivot_inv.mul(&factor(LocalOp::JumpOver, i)).mul(&forward_left[i - 2]));
        forward_step.push(pivot_inv.mul(&factor(LocalOp::Swap, i)));
    }

    // Unroll from the far end: W_m closes on the anchors, then substitute
    // backwards.
    let mut left_coeff = vec![Matrix::<S>::zeros(0, 0); m];
    let mut right_coeff = vec![Matrix::<S>::zeros(0, 0); m];
    left_coeff[m - 1] = forward_left[m - 1].clone();
    right_coeff[m - 1] = forward_step[m - 1].clone();
    for i in (1..m).rev() {
        left_coeff[i - 1] = forward_left[i - 1].add(&forward_step[i - 1].mul(&left_coeff[i]));
        right_coeff[i - 1] = forward_step[i - 1].mul(&right_coeff[i]);
    }
    Ok(BlockElimination {
        block_len: m,
        position,
        left_coeff,
        right_coeff,
    })
}

/// Mirror elimination: solves the same recurrence from the right end, using
/// the chain with the two channels exchanged. Where both are defined the two
/// eliminations must produce identical coefficients.
pub fn eliminate_block_backward<S: MatrixInverse>(
    basis: &WordBasis,
    block_len: usize,
    position: usize,
    params: &ModelParams<S>,
) -> Result<BlockElimination<S>, ReductionError> {
    check_block_range(basis, block_len, position)?;
    let m = block_len;
    let factor = |op, i: usize| embedded_local(basis, op, position + i - 1, params).unwrap();
    let dim = basis.dim();
    let identity = Matrix::<S>::identity(dim);

    // W_i = P_i·W_{i-1} + Q_i·W_{m+1}, built descending; the pivot at step i
    // is I - B'_i·P_{i+1}, the mirror-chain operator.
    let mut descending: Vec<(Matrix<S>, Matrix<S>)> = vec![(Matrix::zeros(0, 0), Matrix::zeros(0, 0)); m];
    descending[m - 1] = (factor(LocalOp::JumpOver, m), factor(LocalOp::Swap, m));
    for i in (1..m).rev() {
        let next_p = &descending[i].0;
        let pivot = identity.sub(&factor(LocalOp::Swap, i).mul(next_p));
        let pivot_inv = S::inverse(&pivot).map_err(|source| ReductionError::SingularPivot {
            k: i,
            source,
        })?;
        let p = pivot_inv.mul(&factor(LocalOp::JumpOver, i));
        let q = pivot_inv
            .mul(&factor(LocalOp::Swap, i))
            .mul(&descending[i].1);
        descending[i - 1] = (p, q);
    }

    let mut left_coeff = vec![Matrix::<S>::zeros(0, 0); m];
    let mut right_coeff = vec![Matrix::<S>::zeros(0, 0); m];
    left_coeff[0] = descending[0].0.clone();
    right_coeff[0] = descending[0].1.clone();
    for i in 2..=m {
        left_coeff[i - 1] = descending[i - 1].0.mul(&left_coeff[i - 2]);
        right_coeff[i - 1] = descending[i - 1]
            .0
            .mul(&right_coeff[i - 2])
            .add(&descending[i - 1].1);
    }
    Ok(BlockElimination {
        block_len: m,
        position,
        left_coeff,
        right_coeff,
    })
}

fn check_block_range(
    basis: &WordBasis,
    block_len: usize,
    position: usize,
) -> Result<(), ReductionError> {
    let sites = basis.word_len();
    if block_len == 0 || position == 0 || position + block_len > sites {
        return Err(ReductionError::BlockOutOfRange {
            block_len,
            position,
            sites,
        });
    }
    Ok(())
}

/// Rate of the full-block-advance transition from word `source` to word
/// `target`: `p` times the `(target, source)` entry of the top elimination
/// coefficient, computed on the sector of the shared multiset.
pub fn transition_coefficient(
    target: &Word,
    source: &Word,
    params: &ModelParams<Rational>,
) -> Result<Rational, ReductionError> {
    let n = source.len();
    if target.len() != n || n < 2 {
        return Err(ReductionError::IncompatibleWords);
    }
    if target.multiset() != source.multiset() {
        // distinct multisets can never be connected
        return Ok(Rational::zero());
    }
    let basis = WordBasis::sector(params.n_species(), &source.multiset());
    let elimination = eliminate_block::<Rational>(&basis, n - 1, 1, params)?;
    let row = basis.position(target).unwrap();
    let col = basis.position(source).unwrap();
    Ok(params.p().clone() * elimination.left_coeff[n - 2][(row, col)].clone())
}

/// Closed form for the full-block-advance rate of `n` same-species particles:
/// `p · mu^{n-1} / S_{n-1}`.
pub fn effective_shift_rate(n: usize, species: u8, params: &ModelParams<Rational>) -> Rational {
    assert!(n >= 2, "a block needs at least two particles");
    let mut numerator = params.p().clone();
    for _ in 0..n - 1 {
        numerator *= params.mu(species).clone();
    }
    numerator / weight_sum(n - 1, species, params)
}

/// Shape classes of a species multiset, matching the regimes with proven
/// sector invertibility.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SectorCase {
    /// All labels equal.
    SingleSpecies,
    /// One label differs from the remaining identical ones.
    OneOff,
    /// All labels distinct.
    AllDistinct,
    /// Anything else: invertibility unproven, probed numerically only.
    General,
}

pub fn classify_multiset(multiset: &Word) -> SectorCase {
    let letters = multiset.letters();
    let mut counts = std::collections::BTreeMap::new();
    for &l in letters {
        *counts.entry(l).or_insert(0usize) += 1;
    }
    if counts.len() == 1 {
        SectorCase::SingleSpecies
    } else if counts.len() == letters.len() {
        SectorCase::AllDistinct
    } else if counts.len() == 2 && counts.values().any(|&c| c == 1) {
        SectorCase::OneOff
    } else {
        SectorCase::General
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SectorScanStep {
    pub k: usize,
    pub invertible: bool,
    pub spectral_radius: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SectorScan {
    pub multiset: String,
    pub case: SectorCase,
    pub dim: usize,
    pub steps: Vec<SectorScanStep>,
}

impl SectorScan {
    pub fn all_invertible(&self) -> bool {
        self.steps.iter().all(|s| s.invertible)
    }

    pub fn max_radius(&self) -> f64 {
        self.steps
            .iter()
            .map(|s| s.spectral_radius)
            .fold(0.0, f64::max)
    }
}

/// Restricts the chain to the sector of `multiset` and reports, per step,
/// exact invertibility of the pivot together with the float spectral radius
/// of the transfer.
pub fn sector_invertibility_scan(
    multiset: &Word,
    params: &ModelParams<Rational>,
) -> Result<SectorScan, ReductionError> {
    let basis = WordBasis::sector(params.n_species(), &multiset.multiset());
    let depth = max_chain_depth(multiset.len(), 1);
    let exact = chain::<Rational>(&basis, depth, params)?;
    let float = chain::<f64>(&basis, depth, &params.to_float())?;
    let mut steps = Vec::new();
    for step in exact.steps() {
        let radius = float
            .steps()
            .get(step.k - 1)
            .map(|s| s.transfer.spectral_radius())
            .transpose()?
            .unwrap_or(f64::NAN);
        steps.push(SectorScanStep {
            k: step.k,
            invertible: step.pivot_inverse.is_some(),
            spectral_radius: radius,
        });
    }
    Ok(SectorScan {
        multiset: multiset.multiset().to_string(),
        case: classify_multiset(multiset),
        dim: basis.dim(),
        steps,
    })
}

/// Structure checks for the one-off sector `[2,1,…,1]` in the distinguished
/// basis `e_r = |1^r 2 1^{n-r-1}⟩`:
///
/// - the k-th transfer is block diagonal as (diagonal | nilpotent 2x2 |
///   diagonal) around rows `k, k+1`;
/// - its left block is the scalar `c_{k-1} = alpha/a_{k-2}`;
/// - its right-block diagonal entries all have the form `alpha/a_m`;
/// - the (k+1)-th transfer acts on `span{e_0..e_k}` as `c_k = alpha/a_{k-1}`.
///
/// The starred middle entry is recorded but only its position is asserted.
pub fn check_block_form(
    k: usize,
    n: usize,
    params: &ModelParams<Rational>,
) -> Result<CheckReport, ReductionError> {
    assert!(params.n_species() >= 2, "the one-off sector needs two species");
    let mut report = CheckReport::new();
    let multiset = case_b_word(0, n).multiset();
    let basis = WordBasis::sector(params.n_species(), &multiset);
    let depth = max_chain_depth(n, 1);
    assert!(k >= 1 && k <= depth, "step {k} outside chain of depth {depth}");

    let chain = chain::<Rational>(&basis, depth.min(k + 1), params)?;
    if let Some(fail) = chain.failure() {
        report.fail("one_off_chain", format!("pivot {fail} singular"));
        return Ok(report);
    }
    // reindex into the e_r basis
    let e_index: Vec<usize> = (0..n)
        .map(|r| basis.position(&case_b_word(r, n)).unwrap())
        .collect();
    let in_e_basis = |mat: &Matrix<Rational>| {
        Matrix::from_fn(n, n, |r, s| mat[(e_index[r], e_index[s])].clone())
    };

    let transfer = in_e_basis(&chain.step(k).transfer);
    let scalars = scalar_sector(1, depth + 1, params)?;
    let alpha = scalars.alpha.clone();

    // zero pattern: diagonal everywhere except the starred (k, k+1) slot
    let mut pattern_ok = true;
    let mut pattern_detail = String::new();
    for r in 0..n {
        for s in 0..n {
            let allowed = r == s && !(r == k || r == k + 1) || (r == k && s == k + 1);
            if !allowed && !transfer[(r, s)].is_zero() {
                pattern_ok = false;
                pattern_detail = format!("unexpected entry at (e_{r}, e_{s}) = {}", transfer[(r, s)]);
                break;
            }
        }
        if !pattern_ok {
            break;
        }
    }
    if pattern_ok {
        report.pass(format!("transfer_{k}_block_diagonal_with_nilpotent_middle"));
    } else {
        report.fail(
            format!("transfer_{k}_block_diagonal_with_nilpotent_middle"),
            pattern_detail,
        );
    }
    // record the starred entry without asserting its value
    report.pass_with_detail(
        format!("transfer_{k}_starred_entry_recorded"),
        format!("(e_{k}, e_{}) = {}", k + 1, transfer[(k, k + 1)]),
    );

    // left block: scalar c_{k-1} (empty for k = 1)
    if k >= 2 {
        let expected = scalars.contractions[k - 2].clone();
        let ok = (0..k - 1).all(|r| transfer[(r, r)] == expected);
        report.record(
            format!("transfer_{k}_left_block_scalar"),
            if ok {
                Ok(())
            } else {
                Err(format!("left diagonal differs from c_{} = {}", k - 1, expected))
            },
        );
    }

    // right block: diagonal entries of the form alpha/a_m
    let admissible: Vec<Rational> = scalars
        .ratios
        .iter()
        .map(|a| alpha.clone() / a.clone())
        .collect();
    let ok = (k + 2..n).all(|r| admissible.contains(&transfer[(r, r)]));
    report.record(
        format!("transfer_{k}_right_block_entries"),
        if ok {
            Ok(())
        } else {
            Err("right-block diagonal entry outside {alpha/a_m}".to_string())
        },
    );

    // scalar action of the next transfer on span{e_0..e_k}
    if k < depth {
        let next = in_e_basis(&chain.step(k + 1).transfer);
        let c_k = scalars.contractions[k - 1].clone();
        let mut ok = true;
        for s in 0..=k {
            for r in 0..n {
                let expected = if r == s { c_k.clone() } else { Rational::zero() };
                if next[(r, s)] != expected {
                    ok = false;
                }
            }
        }
        report.record(
            format!("transfer_{}_scalar_on_left_span", k + 1),
            if ok {
                Ok(())
            } else {
                Err(format!("action on span(e_0..e_{k}) is not c_{k} = {c_k}"))
            },
        );
    }

    Ok(report)
}
