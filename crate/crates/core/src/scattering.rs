//! The two-particle scattering matrix and its Yang-Baxter consistency check.
//!
//! The matrix depends on two nonzero spectral parameters. Its only nonzero
//! entries are species-diagonal terms on the doubled words `|ii⟩` and a
//! single off-diagonal pair per unordered species pair: `(ij, ji) = xi_b`
//! for `i < j` and `(ji, ij) = 1/xi_a`. The consistency check multiplies the
//! three pairwise matrices on the three-site space both ways and demands the
//! difference vanish identically in exact arithmetic. Identity at enough
//! sampled rational points certifies the identity for the given parameters,
//! since both sides are rational functions of bounded degree.

use num_traits::Zero;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use thiserror::Error;

use crate::algebra::{Matrix, Rational, SpeciesOperator, Word, WordBasis, rat, sector_blocks};
use crate::params::ModelParams;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScatteringError {
    #[error("spectral parameter must be nonzero")]
    ZeroParameter,
    #[error("spectral parameters must be pairwise distinct")]
    RepeatedParameter,
    #[error(
        "pole guard violated for species {species}: mu + lambda·xi_a·xi_b - xi_b = 0 \
         at xi_a = {xi_a}, xi_b = {xi_b}"
    )]
    PoleGuard {
        species: u8,
        xi_a: String,
        xi_b: String,
    },
}

/// Three admissible spectral parameters. Construction enforces the pole
/// guard for the three ordered pairs the consistency equation uses, so every
/// matrix the check needs can be built.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralPoint {
    xi: [Rational; 3],
}

impl SpectralPoint {
    pub fn new(
        xi_alpha: Rational,
        xi_beta: Rational,
        xi_gamma: Rational,
        params: &ModelParams<Rational>,
    ) -> Result<Self, ScatteringError> {
        let xi = [xi_alpha, xi_beta, xi_gamma];
        for value in &xi {
            if value.is_zero() {
                return Err(ScatteringError::ZeroParameter);
            }
        }
        if xi[0] == xi[1] || xi[0] == xi[2] || xi[1] == xi[2] {
            return Err(ScatteringError::RepeatedParameter);
        }
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            pole_guard(params, &xi[a], &xi[b])?;
        }
        Ok(Self { xi })
    }

    pub fn xi_alpha(&self) -> &Rational {
        &self.xi[0]
    }

    pub fn xi_beta(&self) -> &Rational {
        &self.xi[1]
    }

    pub fn xi_gamma(&self) -> &Rational {
        &self.xi[2]
    }
}

/// Denominator check: `mu_i + lambda_i·xi_a·xi_b - xi_b != 0` for every
/// species `i`.
pub fn pole_guard(
    params: &ModelParams<Rational>,
    xi_a: &Rational,
    xi_b: &Rational,
) -> Result<(), ScatteringError> {
    for species in 1..=params.n_species() {
        let denom = params.mu(species).clone() + params.lambda(species) * xi_a.clone() * xi_b.clone()
            - xi_b.clone();
        if denom.is_zero() {
            return Err(ScatteringError::PoleGuard {
                species,
                xi_a: xi_a.to_string(),
                xi_b: xi_b.to_string(),
            });
        }
    }
    Ok(())
}

/// Builds the `N² x N²` scattering matrix at the ordered parameter pair
/// `(xi_a, xi_b)`.
pub fn build_r(
    params: &ModelParams<Rational>,
    xi_a: &Rational,
    xi_b: &Rational,
) -> Result<SpeciesOperator<Rational>, ScatteringError> {
    if xi_a.is_zero() || xi_b.is_zero() {
        return Err(ScatteringError::ZeroParameter);
    }
    pole_guard(params, xi_a, xi_b)?;
    let n = params.n_species();
    let basis = WordBasis::full(n, 2);
    let mut mat = Matrix::<Rational>::zeros(basis.dim(), basis.dim());
    for i in 1..=n {
        let mu = params.mu(i).clone();
        let lambda = params.lambda(i);
        let numerator = (mu.clone() + lambda.clone() * xi_a.clone() * xi_b.clone()
            - xi_a.clone())
            * xi_b.clone();
        let denominator =
            (mu + lambda * xi_a.clone() * xi_b.clone() - xi_b.clone()) * xi_a.clone();
        let idx = basis.position(&Word::new([i, i])).unwrap();
        mat[(idx, idx)] = -numerator / denominator;
        for j in i + 1..=n {
            let row_ij = basis.position(&Word::new([i, j])).unwrap();
            let row_ji = basis.position(&Word::new([j, i])).unwrap();
            mat[(row_ij, row_ji)] = xi_b.clone();
            mat[(row_ji, row_ij)] = rat(1, 1) / xi_a.clone();
        }
    }
    Ok(SpeciesOperator::from_matrix(n, 2, mat).unwrap())
}

/// Outcome of one Yang-Baxter evaluation.
#[derive(Clone, Debug)]
pub struct YbeCheck {
    /// Maximum absolute entry difference between the two sides; must be
    /// exactly zero.
    pub max_deviation: Rational,
    /// The same comparison done block-by-block over the three-site sectors.
    pub blockwise_zero: bool,
}

impl YbeCheck {
    pub fn holds(&self) -> bool {
        self.max_deviation.is_zero() && self.blockwise_zero
    }
}

/// Evaluates both sides of the consistency equation
/// `(R_cb ⊗ I)(I ⊗ R_ca)(R_ba ⊗ I) = (I ⊗ R_ba)(R_ca ⊗ I)(I ⊗ R_cb)`
/// on the `N³`-dimensional space over exact rationals.
pub fn verify_ybe(
    params: &ModelParams<Rational>,
    point: &SpectralPoint,
) -> Result<YbeCheck, ScatteringError> {
    let n = params.n_species();
    let id = SpeciesOperator::<Rational>::identity(n, 1);
    let r_ba = build_r(params, point.xi_alpha(), point.xi_beta())?;
    let r_ca = build_r(params, point.xi_alpha(), point.xi_gamma())?;
    let r_cb = build_r(params, point.xi_beta(), point.xi_gamma())?;

    let lhs = r_cb
        .kron(&id)
        .unwrap()
        .mul(&id.kron(&r_ca).unwrap())
        .unwrap()
        .mul(&r_ba.kron(&id).unwrap())
        .unwrap();
    let rhs = id
        .kron(&r_ba)
        .unwrap()
        .mul(&r_ca.kron(&id).unwrap())
        .unwrap()
        .mul(&id.kron(&r_cb).unwrap())
        .unwrap();

    let diff = lhs.matrix().sub(rhs.matrix());
    let mut max_deviation = Rational::zero();
    for i in 0..diff.rows() {
        for j in 0..diff.cols() {
            let mut abs = diff[(i, j)].clone();
            if abs < Rational::zero() {
                abs = -abs;
            }
            if abs > max_deviation {
                max_deviation = abs;
            }
        }
    }

    // Sector-restricted comparison; both sides preserve species multisets.
    let mut blockwise_zero = true;
    for block in sector_blocks(3, n).blocks() {
        let lhs_block = lhs.matrix().restrict(&block.indices);
        let rhs_block = rhs.matrix().restrict(&block.indices);
        if lhs_block != rhs_block {
            blockwise_zero = false;
        }
    }

    Ok(YbeCheck {
        max_deviation,
        blockwise_zero,
    })
}

/// Draws spectral points from small-integer rationals, rejecting draws that
/// violate the admissibility constraints. Returns the points plus the number
/// of rejected candidates.
pub fn sample_spectral_points(
    params: &ModelParams<Rational>,
    count: usize,
    seed: u64,
) -> (Vec<SpectralPoint>, usize) {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(count);
    let mut rejected = 0usize;
    let draw = |rng: &mut ChaCha12Rng| {
        let numer = loop {
            let v = rng.random_range(-6i64..=6);
            if v != 0 {
                break v;
            }
        };
        rat(numer, rng.random_range(1i64..=4))
    };
    while points.len() < count {
        let candidate = SpectralPoint::new(
            draw(&mut rng),
            draw(&mut rng),
            draw(&mut rng),
            params,
        );
        match candidate {
            Ok(point) => points.push(point),
            Err(_) => rejected += 1,
        }
    }
    (points, rejected)
}
