//! Two-site interaction operators and the three-site compositions built from
//! them, with exhaustive structure checks over exact rationals.
//!
//! The jump-over operator `B` and the swap operator `B'` encode how an
//! incoming particle resolves against a resident: distinct species resolve
//! deterministically by label order, same species resolve with weights
//! `mu`/`lambda`. Everything downstream (boundary elimination, effective
//! rates, the scattering matrix) is assembled from these two matrices.

use num_traits::{One, Zero};

use crate::algebra::{
    Matrix, OperatorError, Rational, Scalar, SpeciesOperator, Word, WordBasis, rat,
};
use crate::params::ModelParams;
use crate::report::CheckReport;

/// The two local resolution channels.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LocalOp {
    /// `B`: the incoming particle passes over the resident.
    JumpOver,
    /// `B'`: the incoming particle trades places with the resident.
    Swap,
}

/// Column action of a local operator on a letter pair `(left, right)`.
///
/// Returns the image letters and coefficient; columns have at most one
/// nonzero entry. Same-species pairs pick up the interpolation weight, a
/// strictly ordered pair maps to its reversal with weight 1 on exactly one
/// of the two channels, and the remaining order is annihilated.
pub fn local_action<S: Scalar>(
    op: LocalOp,
    left: u8,
    right: u8,
    params: &ModelParams<S>,
) -> Option<(u8, u8, S)> {
    match op {
        LocalOp::JumpOver => {
            if left == right {
                Some((left, right, params.mu(left).clone()))
            } else if left < right {
                Some((right, left, S::one()))
            } else {
                None
            }
        }
        LocalOp::Swap => {
            if left == right {
                Some((left, right, params.lambda(left)))
            } else if left > right {
                Some((right, left, S::one()))
            } else {
                None
            }
        }
    }
}

/// The `N² x N²` pair of local operators.
#[derive(Clone, PartialEq)]
pub struct LocalPair<S> {
    pub jump: SpeciesOperator<S>,
    pub swap: SpeciesOperator<S>,
}

pub fn build_local_pair<S: Scalar>(params: &ModelParams<S>) -> LocalPair<S> {
    LocalPair {
        jump: build_local(LocalOp::JumpOver, params),
        swap: build_local(LocalOp::Swap, params),
    }
}

fn build_local<S: Scalar>(op: LocalOp, params: &ModelParams<S>) -> SpeciesOperator<S> {
    let n = params.n_species();
    let basis = WordBasis::full(n, 2);
    let mut mat = Matrix::zeros(basis.dim(), basis.dim());
    for (col, word) in basis.words().iter().enumerate() {
        if let Some((a, b, coeff)) = local_action(op, word.letter(0), word.letter(1), params) {
            let image = Word::new([a, b]);
            let row = basis.position(&image).expect("image letters in range");
            mat[(row, col)] = coeff;
        }
    }
    SpeciesOperator::from_matrix(n, 2, mat).expect("dimension by construction")
}

/// Matrix of the local operator acting on tensor slots `(site, site+1)`
/// (1-based) of the given basis, identity elsewhere. Works on sector bases
/// because both channels preserve the species multiset.
pub fn embedded_local<S: Scalar>(
    basis: &WordBasis,
    op: LocalOp,
    site: usize,
    params: &ModelParams<S>,
) -> Result<Matrix<S>, OperatorError> {
    if site == 0 || site + 1 > basis.word_len() {
        return Err(OperatorError::EmbedSiteOutOfRange {
            site,
            max: basis.word_len().saturating_sub(1),
        });
    }
    let mut mat = Matrix::zeros(basis.dim(), basis.dim());
    for (col, word) in basis.words().iter().enumerate() {
        let (a, b) = (word.letter(site - 1), word.letter(site));
        if let Some((a2, b2, coeff)) = local_action(op, a, b, params) {
            let mut image = word.clone();
            image.set_letter(site - 1, a2);
            image.set_letter(site, b2);
            let row = basis
                .position(&image)
                .expect("local channels preserve the multiset");
            mat[(row, col)] = coeff;
        }
    }
    Ok(mat)
}

/// Three-site compositions, named by application order (rightmost factor
/// acts first):
/// - `swap_jump`: swap on slots (1,2), then jump on (2,3);
/// - `jump_swap`: jump on (2,3), then swap on (1,2);
/// - `double_jump`: jump on (1,2), then jump on (2,3).
#[derive(Clone)]
pub struct ThreeSiteOps<S> {
    pub swap_jump: SpeciesOperator<S>,
    pub jump_swap: SpeciesOperator<S>,
    pub double_jump: SpeciesOperator<S>,
}

pub fn build_three_site<S: Scalar>(params: &ModelParams<S>) -> ThreeSiteOps<S> {
    let n = params.n_species();
    let basis = WordBasis::full(n, 3);
    let jump_12 = embedded_local(&basis, LocalOp::JumpOver, 1, params).unwrap();
    let jump_23 = embedded_local(&basis, LocalOp::JumpOver, 2, params).unwrap();
    let swap_12 = embedded_local(&basis, LocalOp::Swap, 1, params).unwrap();
    let wrap = |mat: Matrix<S>| SpeciesOperator::from_matrix(n, 3, mat).unwrap();
    ThreeSiteOps {
        swap_jump: wrap(jump_23.mul(&swap_12)),
        jump_swap: wrap(swap_12.mul(&jump_23)),
        double_jump: wrap(jump_23.mul(&jump_12)),
    }
}

/// Closed form for `(I - swap_jump)^{-1}`: identity plus the operator plus a
/// rank-one correction `(mu·lambda)² / (1 - mu·lambda)` on each single-species
/// word `|iii⟩`. Valid because `mu·lambda <= 1/4`, so no denominator vanishes.
pub fn closed_inverse_i_minus_swap_jump(
    params: &ModelParams<Rational>,
) -> SpeciesOperator<Rational> {
    let n = params.n_species();
    let basis = WordBasis::full(n, 3);
    let ops = build_three_site(params);
    let mut mat = Matrix::identity(basis.dim()).add(ops.swap_jump.matrix());
    for species in 1..=n {
        let alpha = params.mu(species).clone() * params.lambda(species);
        let correction = alpha.clone() * alpha.clone() / (rat(1, 1) - alpha);
        let idx = basis
            .position(&Word::new(vec![species; 3]))
            .expect("single-species word in basis");
        let cur = mat[(idx, idx)].clone();
        mat[(idx, idx)] = cur + correction;
    }
    SpeciesOperator::from_matrix(n, 3, mat).unwrap()
}

/// Independent prediction of the swap-then-jump column for one basis word.
///
/// Case split on the source word `(a, b, c)`:
/// same triple scales by `mu·lambda`; `a = b < c` sends to `|a c a⟩` with
/// `lambda_a`; `a > b, a = c` sends to `|b a a⟩` with `mu_a`; `c > a > b`
/// permutes to `|b c a⟩`; anything else dies.
pub fn predicted_swap_jump_column(
    word: &Word,
    params: &ModelParams<Rational>,
) -> Option<(Word, Rational)> {
    let (a, b, c) = (word.letter(0), word.letter(1), word.letter(2));
    if a == b && b == c {
        Some((
            word.clone(),
            params.lambda(a) * params.mu(a).clone(),
        ))
    } else if a == b && b < c {
        Some((Word::new([a, c, a]), params.lambda(a)))
    } else if a > b && a == c {
        Some((Word::new([b, a, a]), params.mu(a).clone()))
    } else if c > a && a > b {
        Some((Word::new([b, c, a]), rat(1, 1)))
    } else {
        None
    }
}

/// Mirror prediction for the jump-then-swap composition.
pub fn predicted_jump_swap_column(
    word: &Word,
    params: &ModelParams<Rational>,
) -> Option<(Word, Rational)> {
    let (a, b, c) = (word.letter(0), word.letter(1), word.letter(2));
    if a == b && b == c {
        Some((
            word.clone(),
            params.lambda(a) * params.mu(a).clone(),
        ))
    } else if a > b && b == c {
        Some((Word::new([b, a, b]), params.mu(b).clone()))
    } else if a == c && a > b {
        Some((Word::new([a, a, b]), params.lambda(a)))
    } else if a > c && c > b {
        Some((Word::new([c, a, b]), rat(1, 1)))
    } else {
        None
    }
}

fn format_column(entries: &[(Word, Rational)]) -> String {
    if entries.is_empty() {
        return "0".to_string();
    }
    entries
        .iter()
        .map(|(w, c)| format!("{c}·|{w}⟩"))
        .collect::<Vec<_>>()
        .join(" + ")
}

fn check_action_table(
    name: &str,
    op: &SpeciesOperator<Rational>,
    predict: impl Fn(&Word) -> Option<(Word, Rational)>,
    basis: &WordBasis,
    report: &mut CheckReport,
) {
    for word in basis.words() {
        let got = op.apply_basis(word).unwrap();
        let expected: Vec<(Word, Rational)> = predict(word)
            .into_iter()
            .filter(|(_, coeff)| !coeff.is_zero())
            .collect();
        if got != expected {
            report.fail(
                name,
                format!(
                    "column {word}: expected {}, got {}",
                    format_column(&expected),
                    format_column(&got)
                ),
            );
            return;
        }
    }
    report.pass(name);
}

/// `sum_i factor(i) |iii⟩⟨iii|` on the three-site space.
fn rank_one_sum(
    params: &ModelParams<Rational>,
    basis: &WordBasis,
    factor: impl Fn(u8) -> Rational,
) -> Matrix<Rational> {
    let mut mat = Matrix::zeros(basis.dim(), basis.dim());
    for species in 1..=params.n_species() {
        let idx = basis.position(&Word::new(vec![species; 3])).unwrap();
        mat[(idx, idx)] = factor(species);
    }
    mat
}

fn check_equal(
    name: &str,
    got: &Matrix<Rational>,
    expected: &Matrix<Rational>,
    basis: &WordBasis,
    report: &mut CheckReport,
) {
    for i in 0..basis.dim() {
        for j in 0..basis.dim() {
            if got[(i, j)] != expected[(i, j)] {
                report.fail(
                    name,
                    format!(
                        "entry ({}, {}): expected {}, got {}",
                        basis.word(i),
                        basis.word(j),
                        expected[(i, j)],
                        got[(i, j)]
                    ),
                );
                return;
            }
        }
    }
    report.pass(name);
}

/// Runs the full structure-check battery on operators built from `params`.
pub fn verify_structure_lemmas(params: &ModelParams<Rational>) -> CheckReport {
    verify_structure_lemmas_on(&build_local_pair(params), params)
}

/// Same battery, but on a caller-supplied local pair. Used as a negative
/// control: perturbing one entry of `B` must make the suite fail.
pub fn verify_structure_lemmas_on(
    pair: &LocalPair<Rational>,
    params: &ModelParams<Rational>,
) -> CheckReport {
    let n = params.n_species();
    let basis3 = WordBasis::full(n, 3);
    let mut report = CheckReport::new();

    check_column_resolution(pair, params, &mut report);

    // Rebuild the three-site compositions from the supplied pair so tampering
    // propagates.
    let id1 = SpeciesOperator::<Rational>::identity(n, 1);
    let jump_12 = pair.jump.kron(&id1).unwrap();
    let jump_23 = id1.kron(&pair.jump).unwrap();
    let swap_12 = pair.swap.kron(&id1).unwrap();
    let swap_jump = jump_23.mul(&swap_12).unwrap();
    let jump_swap = swap_12.mul(&jump_23).unwrap();
    let double_jump = jump_23.mul(&jump_12).unwrap();

    check_action_table(
        "swap_jump_action_table",
        &swap_jump,
        |w| predicted_swap_jump_column(w, params),
        &basis3,
        &mut report,
    );
    check_action_table(
        "jump_swap_action_table",
        &jump_swap,
        |w| predicted_jump_swap_column(w, params),
        &basis3,
        &mut report,
    );

    // Powers collapse to the single-species rank-one projectors.
    let alpha = |i: u8| params.mu(i).clone() * params.lambda(i);
    for (name, op) in [("swap_jump", &swap_jump), ("jump_swap", &jump_swap)] {
        let square = op.matrix().mul(op.matrix());
        let cube = square.mul(op.matrix());
        check_equal(
            &format!("{name}_square_is_rank_one"),
            &square,
            &rank_one_sum(params, &basis3, |i| alpha(i).clone() * alpha(i)),
            &basis3,
            &mut report,
        );
        check_equal(
            &format!("{name}_cube_is_rank_one"),
            &cube,
            &rank_one_sum(params, &basis3, |i| {
                alpha(i).clone() * alpha(i).clone() * alpha(i)
            }),
            &basis3,
            &mut report,
        );
    }

    // swap_jump · double_jump = sum_i mu_i^3 lambda_i |iii⟩⟨iii|
    check_equal(
        "swap_jump_times_double_jump",
        &swap_jump.matrix().mul(double_jump.matrix()),
        &rank_one_sum(params, &basis3, |i| {
            let mu = params.mu(i).clone();
            mu.clone() * mu.clone() * mu * params.lambda(i)
        }),
        &basis3,
        &mut report,
    );

    // Closed inverse of (I - swap_jump) against the elimination oracle.
    let identity = Matrix::<Rational>::identity(basis3.dim());
    let resolvent_arg = identity.sub(swap_jump.matrix());
    let closed = {
        let mut mat = identity.add(swap_jump.matrix());
        for species in 1..=n {
            let a = alpha(species);
            let correction = a.clone() * a.clone() / (rat(1, 1) - a);
            let idx = basis3.position(&Word::new(vec![species; 3])).unwrap();
            let cur = mat[(idx, idx)].clone();
            mat[(idx, idx)] = cur + correction;
        }
        mat
    };
    match resolvent_arg.exact_inverse() {
        Ok(inverse) => {
            check_equal(
                "closed_inverse_matches_elimination",
                &closed,
                &inverse,
                &basis3,
                &mut report,
            );
            check_equal(
                "closed_inverse_roundtrip",
                &closed.mul(&resolvent_arg),
                &identity,
                &basis3,
                &mut report,
            );
        }
        Err(e) => report.fail("closed_inverse_matches_elimination", e.to_string()),
    }

    report
}

/// Column-resolution completeness of `(B, B')`: same-species columns split
/// unit weight across the two channels, ordered columns carry exactly one
/// unit entry between them.
fn check_column_resolution(
    pair: &LocalPair<Rational>,
    params: &ModelParams<Rational>,
    report: &mut CheckReport,
) {
    let basis = WordBasis::full(params.n_species(), 2);
    for (col, word) in basis.words().iter().enumerate() {
        let mut sum = Rational::zero();
        let mut nonzeros = 0usize;
        for row in 0..basis.dim() {
            for mat in [pair.jump.matrix(), pair.swap.matrix()] {
                let v = &mat[(row, col)];
                if !v.is_zero() {
                    sum += v.clone();
                    nonzeros += 1;
                }
            }
        }
        let same = word.letter(0) == word.letter(1);
        let zero_weight =
            same && (params.mu(word.letter(0)).is_zero() || params.mu(word.letter(0)).is_one());
        let ok = if same {
            sum.is_one() && (nonzeros == 2 || (zero_weight && nonzeros == 1))
        } else {
            sum.is_one() && nonzeros == 1
        };
        if !ok {
            report.fail(
                "column_resolution_completeness",
                format!("column {word}: weight {sum} over {nonzeros} entries"),
            );
            return;
        }
    }
    report.pass("column_resolution_completeness");
}
