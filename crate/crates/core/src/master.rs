//! Exact generators for small systems, built two independent ways, plus
//! forward integration of the master equation.
//!
//! The rule-based builder derives every rate from the microscopic event
//! resolution oracle. The elimination-based builder assembles the free
//! evolution (independent walks) and replaces each doubled configuration
//! through the boundary relations, exactly as the reduction machinery
//! prescribes. The two must agree entry for entry over exact rationals; that
//! agreement is the executable statement that the many-body dynamics reduce
//! to two-body interactions.
//!
//! Generators live on a finite site window. Transitions leaving the window
//! feed a tracked leak rate, so probability is conserved up to explicitly
//! accounted mass.

use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;
use thiserror::Error;

use crate::algebra::{Matrix, Rational, Scalar, Word, WordBasis, to_f64};
use crate::params::ModelParams;
use crate::process::{
    Configuration, Direction, OutcomeDistribution, ProcessError, exact_resolution_distribution,
};
use crate::reduction::{ReductionError, eliminate_block, eliminate_block_backward};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MasterError {
    #[error("elimination-based generator supports at most three particles, got {n}")]
    UnsupportedParticleCount { n: usize },
    #[error("state {state} is not in the generator's state list")]
    StateNotFound { state: String },
    #[error("step {dt} exceeds the stability bound {max}")]
    StepTooLarge { dt: f64, max: f64 },
    #[error("probability conservation broke during integration: |1 - total| = {deficit}")]
    ConservationBreach { deficit: f64 },
    #[error(transparent)]
    Oracle(#[from] ProcessError),
    #[error(transparent)]
    Reduction(#[from] ReductionError),
}

pub type Window = (i64, i64);

fn within(window: Window, config: &Configuration) -> bool {
    config
        .positions()
        .iter()
        .all(|&x| window.0 <= x && x <= window.1)
}

/// All admissible configurations of `n` particles inside the window, crossed
/// with every word over the species alphabet, in deterministic order.
pub fn state_space(n_species: u8, n: usize, window: Window) -> Vec<Configuration> {
    let words = WordBasis::full(n_species, n);
    product_states(words.words(), n, window)
}

/// Same, restricted to words that are permutations of the given multiset.
pub fn sector_state_space(n_species: u8, multiset: &Word, window: Window) -> Vec<Configuration> {
    let words = WordBasis::sector(n_species, &multiset.multiset());
    product_states(words.words(), multiset.len(), window)
}

fn product_states(words: &[Word], n: usize, window: Window) -> Vec<Configuration> {
    let mut positions = Vec::new();
    let mut current = Vec::with_capacity(n);
    enumerate_positions(window.0, window.1, n, &mut current, &mut positions);
    let mut states = Vec::with_capacity(positions.len() * words.len());
    for pos in &positions {
        for word in words {
            states.push(Configuration::new(pos.clone(), word.clone()).expect("increasing"));
        }
    }
    states.sort();
    states
}

fn enumerate_positions(
    lo: i64,
    hi: i64,
    remaining: usize,
    current: &mut Vec<i64>,
    out: &mut Vec<Vec<i64>>,
) {
    if remaining == 0 {
        out.push(current.clone());
        return;
    }
    let start = current.last().map_or(lo, |&x| x + 1);
    // leave room for the particles still to be placed
    for x in start..=hi - (remaining as i64 - 1) {
        current.push(x);
        enumerate_positions(lo, hi, remaining - 1, current, out);
        current.pop();
    }
}

/// Finite-window Markov generator in the `Q[from][to]` convention:
/// off-diagonal entries are transition rates, each diagonal entry is minus
/// the total outflow (self-loop resolutions cancel), and rates leaving the
/// window accumulate in `leak`, so every row sums to `-leak[row]`.
#[derive(Clone)]
pub struct GeneratorSystem<S> {
    window: Window,
    states: Vec<Configuration>,
    index: HashMap<Configuration, usize>,
    transitions: Vec<BTreeMap<usize, S>>,
    diagonal: Vec<S>,
    leak: Vec<S>,
}

impl<S: Scalar> GeneratorSystem<S> {
    fn new(states: Vec<Configuration>, window: Window) -> Self {
        let index = states
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, s)| (s, i))
            .collect();
        let count = states.len();
        Self {
            window,
            states,
            index,
            transitions: vec![BTreeMap::new(); count],
            diagonal: vec![S::zero(); count],
            leak: vec![S::zero(); count],
        }
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn states(&self) -> &[Configuration] {
        &self.states
    }

    pub fn state_index(&self, config: &Configuration) -> Option<usize> {
        self.index.get(config).copied()
    }

    pub fn rate(&self, from: usize, to: usize) -> S {
        if from == to {
            self.diagonal[from].clone()
        } else {
            self.transitions[from]
                .get(&to)
                .cloned()
                .unwrap_or_else(S::zero)
        }
    }

    pub fn transitions_from(&self, from: usize) -> &BTreeMap<usize, S> {
        &self.transitions[from]
    }

    pub fn diagonal(&self, from: usize) -> &S {
        &self.diagonal[from]
    }

    pub fn leak_rate(&self, from: usize) -> &S {
        &self.leak[from]
    }

    pub fn entry_count(&self) -> usize {
        self.transitions.iter().map(BTreeMap::len).sum::<usize>() + self.states.len()
    }

    fn add_rate(&mut self, from: usize, to: usize, rate: S) {
        if rate.is_zero() {
            return;
        }
        if from == to {
            let cur = self.diagonal[from].clone();
            self.diagonal[from] = cur + rate;
        } else {
            let entry = self.transitions[from].entry(to).or_insert_with(S::zero);
            let cur = entry.clone();
            *entry = cur + rate;
        }
    }

    fn add_leak(&mut self, from: usize, rate: S) {
        if rate.is_zero() {
            return;
        }
        let cur = self.leak[from].clone();
        self.leak[from] = cur + rate;
    }

    /// Sets each leak rate to the row-sum deficit. Builders that only see
    /// in-window sources use this: mass flowing to dropped targets is
    /// exactly what the assembled row fails to balance.
    fn derive_leak_from_rows(&mut self) {
        for from in 0..self.states.len() {
            let mut sum = self.diagonal[from].clone();
            for rate in self.transitions[from].values() {
                sum = sum + rate.clone();
            }
            self.leak[from] = -sum;
        }
    }
}

impl GeneratorSystem<Rational> {
    pub fn to_float(&self) -> GeneratorSystem<f64> {
        GeneratorSystem {
            window: self.window,
            states: self.states.clone(),
            index: self.index.clone(),
            transitions: self
                .transitions
                .iter()
                .map(|row| row.iter().map(|(&to, rate)| (to, to_f64(rate))).collect())
                .collect(),
            diagonal: self.diagonal.iter().map(to_f64).collect(),
            leak: self.leak.iter().map(to_f64).collect(),
        }
    }

    /// First difference between two generators, if any.
    pub fn difference(&self, other: &Self) -> Option<String> {
        if self.states != other.states {
            return Some("state lists differ".to_string());
        }
        for from in 0..self.states.len() {
            if self.diagonal[from] != other.diagonal[from] {
                return Some(format!(
                    "diagonal at {}: {} vs {}",
                    self.states[from], self.diagonal[from], other.diagonal[from]
                ));
            }
            if self.leak[from] != other.leak[from] {
                return Some(format!(
                    "leak at {}: {} vs {}",
                    self.states[from], self.leak[from], other.leak[from]
                ));
            }
            if self.transitions[from] != other.transitions[from] {
                let keys: std::collections::BTreeSet<usize> = self.transitions[from]
                    .keys()
                    .chain(other.transitions[from].keys())
                    .copied()
                    .collect();
                for to in keys {
                    let a = self.rate(from, to);
                    let b = other.rate(from, to);
                    if a != b {
                        return Some(format!(
                            "rate {} -> {}: {} vs {}",
                            self.states[from], self.states[to], a, b
                        ));
                    }
                }
            }
        }
        None
    }
}

/// Memoizing wrapper around the exact resolution oracle; outcomes are
/// translation invariant, so configurations are cached anchored at zero.
pub struct ResolutionOracle {
    params: ModelParams<Rational>,
    state_cap: usize,
    cache: HashMap<(Configuration, usize, Direction), OutcomeDistribution>,
}

impl ResolutionOracle {
    pub fn new(params: ModelParams<Rational>, state_cap: usize) -> Self {
        Self {
            params,
            state_cap,
            cache: HashMap::new(),
        }
    }

    pub fn distribution(
        &mut self,
        config: &Configuration,
        index: usize,
        dir: Direction,
    ) -> Result<OutcomeDistribution, ProcessError> {
        let (normalized, shift) = config.normalized();
        let key = (normalized, index, dir);
        if !self.cache.contains_key(&key) {
            let dist =
                exact_resolution_distribution(&key.0, index, dir, &self.params, self.state_cap)?;
            self.cache.insert(key.clone(), dist);
        }
        let dist = &self.cache[&key];
        Ok(OutcomeDistribution {
            outcomes: dist
                .outcomes
                .iter()
                .map(|(c, p)| (c.translated(shift), p.clone()))
                .collect(),
        })
    }
}

/// Generator assembled from the microscopic rules: every state, particle,
/// and direction feeds its clock rate through the exact resolution oracle.
pub fn build_generator_from_rules(
    states: Vec<Configuration>,
    window: Window,
    params: &ModelParams<Rational>,
    oracle: &mut ResolutionOracle,
) -> Result<GeneratorSystem<Rational>, MasterError> {
    let mut generator = GeneratorSystem::new(states, window);
    let q = params.q();
    for from in 0..generator.states.len() {
        let state = generator.states[from].clone();
        let n = state.len();
        // total outflow before self-loop cancellation
        let total = Rational::from_integer(n.into());
        generator.diagonal[from] = -total;
        for k in 0..n {
            for (dir, clock) in [(Direction::Right, params.p().clone()), (Direction::Left, q.clone())] {
                if clock.is_zero() {
                    continue;
                }
                let dist = oracle.distribution(&state, k, dir)?;
                for (outcome, probability) in &dist.outcomes {
                    let rate = clock.clone() * probability.clone();
                    if outcome == &state {
                        generator.add_rate(from, from, rate);
                    } else if within(window, outcome) {
                        let to = generator
                            .state_index(outcome)
                            .ok_or_else(|| MasterError::StateNotFound {
                                state: outcome.to_string(),
                            })?;
                        generator.add_rate(from, to, rate);
                    } else {
                        generator.add_leak(from, rate);
                    }
                }
            }
        }
    }
    Ok(generator)
}

/// Which doubled configuration the three-particle elimination solves first.
/// Both orders must yield the same generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EliminationOrder {
    /// Solve the trailing doubled pair first (resolvent of the
    /// swap-then-jump composition).
    Forward,
    /// Solve the leading doubled pair first (resolvent of the mirror
    /// composition).
    Backward,
}

/// Generator assembled from the free evolution plus boundary replacements of
/// every non-admissible term. Supports one to three particles; the
/// three-particle overlap uses the block elimination in the chosen order.
pub fn build_generator_bethe(
    states: Vec<Configuration>,
    window: Window,
    params: &ModelParams<Rational>,
    order: EliminationOrder,
) -> Result<GeneratorSystem<Rational>, MasterError> {
    let n = states.first().map_or(1, Configuration::len);
    if n > 3 {
        return Err(MasterError::UnsupportedParticleCount { n });
    }
    let n_species = params.n_species();
    let word_basis = WordBasis::full(n_species, n);
    let identity = Matrix::<Rational>::identity(word_basis.dim());

    // Pair-boundary coefficients on the n-site word space, one per adjacent
    // slot, plus the three-particle overlap coefficients.
    let mut pair_jump = Vec::new();
    let mut pair_swap = Vec::new();
    for site in 1..n {
        pair_jump.push(
            crate::local_ops::embedded_local(
                &word_basis,
                crate::local_ops::LocalOp::JumpOver,
                site,
                params,
            )
            .unwrap(),
        );
        pair_swap.push(
            crate::local_ops::embedded_local(
                &word_basis,
                crate::local_ops::LocalOp::Swap,
                site,
                params,
            )
            .unwrap(),
        );
    }
    let overlap = if n == 3 {
        let elim = match order {
            EliminationOrder::Forward => eliminate_block::<Rational>(&word_basis, 2, 1, params)?,
            EliminationOrder::Backward => {
                eliminate_block_backward::<Rational>(&word_basis, 2, 1, params)?
            }
        };
        Some(elim)
    } else {
        None
    };

    let mut generator = GeneratorSystem::new(states, window);
    let q = params.q();
    for eq_state in 0..generator.states.len() {
        let state = generator.states[eq_state].clone();
        // the -n·U(X) term
        generator.add_rate(
            eq_state,
            eq_state,
            -Rational::from_integer(state.len().into()),
        );
        for i in 0..n {
            for (dir, clock) in [(Direction::Right, params.p().clone()), (Direction::Left, q.clone())] {
                if clock.is_zero() {
                    continue;
                }
                // the equation's T_i^- term references the configuration with
                // x_i lowered (for the rightward clock), and conversely
                let mut shifted: Vec<i64> = state.positions().to_vec();
                shifted[i] += match dir {
                    Direction::Right => -1,
                    Direction::Left => 1,
                };
                for (source_positions, coeff) in replace_non_admissible(
                    &shifted,
                    &identity,
                    &pair_jump,
                    &pair_swap,
                    overlap.as_ref(),
                ) {
                    add_operator_contribution(
                        &mut generator,
                        eq_state,
                        &state,
                        &source_positions,
                        coeff,
                        &clock,
                        &word_basis,
                    );
                }
            }
        }
    }
    generator.derive_leak_from_rows();
    Ok(generator)
}

/// Expresses `U(positions)` in terms of admissible configurations. Admissible
/// input passes through with the identity coefficient; a doubled pair is
/// rewritten through the boundary relation; the fully adjacent three-particle
/// overlaps use the block-elimination coefficients.
fn replace_non_admissible<'a>(
    positions: &[i64],
    identity: &'a Matrix<Rational>,
    pair_jump: &'a [Matrix<Rational>],
    pair_swap: &'a [Matrix<Rational>],
    overlap: Option<&'a crate::reduction::BlockElimination<Rational>>,
) -> Vec<(Vec<i64>, &'a Matrix<Rational>)> {
    let n = positions.len();
    let doubled = (0..n - 1).find(|&j| positions[j] == positions[j + 1]);
    let Some(j) = doubled else {
        return vec![(positions.to_vec(), identity)];
    };
    let y = positions[j];
    let mut lowered = positions.to_vec();
    lowered[j] -= 1;
    let mut raised = positions.to_vec();
    raised[j + 1] += 1;
    if n == 3 {
        let elim = overlap.expect("three-particle overlap coefficients");
        if j == 0 && positions[2] == y + 1 {
            // doubled pair then an adjacent third: first unknown of the block
            return vec![
                (vec![y - 1, y, y + 1], &elim.left_coeff[0]),
                (vec![y, y + 1, y + 2], &elim.right_coeff[0]),
            ];
        }
        if j == 1 && positions[0] == y - 1 {
            // adjacent first particle then the doubled pair: second unknown
            return vec![
                (vec![y - 2, y - 1, y], &elim.left_coeff[1]),
                (vec![y - 1, y, y + 1], &elim.right_coeff[1]),
            ];
        }
    }
    // isolated doubled pair: one boundary relation suffices
    vec![(lowered, &pair_jump[j]), (raised, &pair_swap[j])]
}

fn add_operator_contribution(
    generator: &mut GeneratorSystem<Rational>,
    eq_state: usize,
    eq_config: &Configuration,
    source_positions: &[i64],
    coeff: &Matrix<Rational>,
    clock: &Rational,
    word_basis: &WordBasis,
) {
    if source_positions.windows(2).any(|w| w[0] >= w[1]) {
        // replacements of replacements never occur for n <= 3
        unreachable!("replacement produced a non-admissible configuration");
    }
    let eq_word_idx = word_basis
        .position(eq_config.word())
        .expect("state word in basis");
    for col in 0..word_basis.dim() {
        let rate = &coeff[(eq_word_idx, col)];
        if rate.is_zero() {
            continue;
        }
        let source = Configuration::new(source_positions.to_vec(), word_basis.word(col).clone())
            .expect("admissible by construction");
        let rate = clock.clone() * rate.clone();
        if let Some(from) = generator.state_index(&source) {
            generator.add_rate(from, eq_state, rate);
        }
        // sources outside the window are unmodelled; the matching outflow
        // shows up as the source row's leak in the rule-based generator
    }
}

/// Reference assembly of the two-particle generator straight from the
/// adjacent-pair master equation (gap states follow the free walk, adjacent
/// states use the four displayed interaction terms). Exists to pin, as an
/// executable identity, that the single boundary relation applied at both
/// ends reproduces the displayed equation.
pub fn build_generator_pair_direct(
    states: Vec<Configuration>,
    window: Window,
    params: &ModelParams<Rational>,
) -> Result<GeneratorSystem<Rational>, MasterError> {
    let n_species = params.n_species();
    let word_basis = WordBasis::full(n_species, 2);
    let jump = crate::local_ops::embedded_local(
        &word_basis,
        crate::local_ops::LocalOp::JumpOver,
        1,
        params,
    )
    .unwrap();
    let swap = crate::local_ops::embedded_local(
        &word_basis,
        crate::local_ops::LocalOp::Swap,
        1,
        params,
    )
    .unwrap();
    let identity = Matrix::<Rational>::identity(word_basis.dim());

    let mut generator = GeneratorSystem::new(states, window);
    let q = params.q();
    for eq_state in 0..generator.states.len() {
        let state = generator.states[eq_state].clone();
        let (x1, x2) = (state.positions()[0], state.positions()[1]);
        generator.add_rate(eq_state, eq_state, -Rational::from_integer(2.into()));
        let adjacent = x2 == x1 + 1;
        let mut contributions: Vec<(Vec<i64>, &Matrix<Rational>)> = Vec::new();
        // rightward clocks
        contributions.push((vec![x1 - 1, x2], &identity));
        if adjacent {
            contributions.push((vec![x1 - 1, x1], &jump));
            contributions.push((vec![x1, x1 + 1], &swap));
        } else {
            contributions.push((vec![x1, x2 - 1], &identity));
        }
        for (positions, coeff) in contributions.drain(..) {
            add_operator_contribution(
                &mut generator,
                eq_state,
                &state,
                &positions,
                coeff,
                params.p(),
                &word_basis,
            );
        }
        // leftward clocks
        contributions.push((vec![x1, x2 + 1], &identity));
        if adjacent {
            contributions.push((vec![x1 + 1, x1 + 2], &swap));
            contributions.push((vec![x1, x1 + 1], &jump));
        } else {
            contributions.push((vec![x1 + 1, x2], &identity));
        }
        for (positions, coeff) in contributions {
            add_operator_contribution(
                &mut generator,
                eq_state,
                &state,
                &positions,
                coeff,
                &q,
                &word_basis,
            );
        }
    }
    generator.derive_leak_from_rows();
    Ok(generator)
}

/// Probability mass per state plus the mass that has left the window.
#[derive(Clone, Debug)]
pub struct DistributionGrid {
    pub time: f64,
    pub masses: Vec<f64>,
    pub leaked: f64,
}

impl DistributionGrid {
    pub fn point_mass(
        generator: &GeneratorSystem<f64>,
        config: &Configuration,
    ) -> Result<Self, MasterError> {
        let index = generator
            .state_index(config)
            .ok_or_else(|| MasterError::StateNotFound {
                state: config.to_string(),
            })?;
        let mut masses = vec![0.0; generator.states().len()];
        masses[index] = 1.0;
        Ok(Self {
            time: 0.0,
            masses,
            leaked: 0.0,
        })
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum::<f64>() + self.leaked
    }
}

impl GeneratorSystem<f64> {
    /// Max row magnitude of the generator, diagonal and leak included.
    pub fn norm_inf(&self) -> f64 {
        (0..self.states.len())
            .map(|from| {
                self.diagonal[from].abs()
                    + self.leak[from]
                    + self.transitions[from].values().sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    /// Largest step the integrator accepts.
    pub fn stable_step(&self) -> f64 {
        0.01 / self.norm_inf().max(f64::MIN_POSITIVE)
    }

    fn derivative(&self, masses: &[f64]) -> (Vec<f64>, f64) {
        let mut d = vec![0.0; masses.len()];
        let mut leak = 0.0;
        for from in 0..masses.len() {
            let m = masses[from];
            if m == 0.0 {
                continue;
            }
            d[from] += self.diagonal[from] * m;
            leak += self.leak[from] * m;
            for (&to, &rate) in &self.transitions[from] {
                d[to] += rate * m;
            }
        }
        (d, leak)
    }
}

/// Classical fourth-order Runge-Kutta integration of `dP/dt = Q^T P` with
/// the leak tracked as an absorbing component. Enforces the step-size
/// contract and probability conservation to 1e-9.
pub fn integrate(
    generator: &GeneratorSystem<f64>,
    initial: &DistributionGrid,
    t: f64,
    dt: f64,
) -> Result<DistributionGrid, MasterError> {
    let max_dt = generator.stable_step();
    if dt > max_dt * (1.0 + 1e-12) {
        return Err(MasterError::StepTooLarge { dt, max: max_dt });
    }
    if t == 0.0 {
        return Ok(initial.clone());
    }
    let steps = (t / dt).ceil() as usize;
    let h = t / steps as f64;
    let mut masses = initial.masses.clone();
    let mut leaked = initial.leaked;
    let dim = masses.len();
    for _ in 0..steps {
        let (k1, l1) = generator.derivative(&masses);
        let s2: Vec<f64> = (0..dim).map(|i| masses[i] + 0.5 * h * k1[i]).collect();
        let (k2, l2) = generator.derivative(&s2);
        let s3: Vec<f64> = (0..dim).map(|i| masses[i] + 0.5 * h * k2[i]).collect();
        let (k3, l3) = generator.derivative(&s3);
        let s4: Vec<f64> = (0..dim).map(|i| masses[i] + h * k3[i]).collect();
        let (k4, l4) = generator.derivative(&s4);
        for i in 0..dim {
            masses[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        leaked += h / 6.0 * (l1 + 2.0 * l2 + 2.0 * l3 + l4);
    }
    let result = DistributionGrid {
        time: initial.time + t,
        masses,
        leaked,
    };
    let deficit = (result.total_mass() - 1.0).abs();
    if deficit > 1e-9 {
        return Err(MasterError::ConservationBreach { deficit });
    }
    Ok(result)
}

/// Half the L1 distance between two distributions on the same state list,
/// with the out-of-window mass compared as one extra bucket.
pub fn total_variation(a: &DistributionGrid, b: &DistributionGrid) -> f64 {
    assert_eq!(a.masses.len(), b.masses.len());
    let sum: f64 = a
        .masses
        .iter()
        .zip(&b.masses)
        .map(|(x, y)| (x - y).abs())
        .sum();
    0.5 * (sum + (a.leaked - b.leaked).abs())
}

/// Empirical distribution of the simulator's state at time `t` over the
/// generator's state list; trajectories ending outside the window count as
/// leaked mass.
pub fn monte_carlo_distribution(
    generator: &GeneratorSystem<f64>,
    initial: &Configuration,
    t: f64,
    params: &ModelParams<f64>,
    trials: usize,
    seed: u64,
) -> Result<DistributionGrid, MasterError> {
    use rayon::prelude::*;
    let counts: Result<Vec<(usize, usize)>, ProcessError> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = <rand_chacha::ChaCha12Rng as rand::SeedableRng>::seed_from_u64(seed);
            rng.set_stream(trial as u64);
            let mut time = 0.0f64;
            let mut current = initial.clone();
            let n = current.len() as f64;
            loop {
                let u: f64 = rand::Rng::random(&mut rng);
                time += -(1.0 - u).ln() / n;
                if time > t {
                    break;
                }
                let k = rand::Rng::random_range(&mut rng, 0..current.len());
                let dir = if rand::Rng::random::<f64>(&mut rng) < *params.p() {
                    Direction::Right
                } else {
                    Direction::Left
                };
                current = crate::process::resolve_collision(&current, k, dir, params, &mut rng)?;
            }
            Ok(match generator.state_index(&current) {
                Some(idx) => (idx, 0),
                None => (0, 1),
            })
        })
        .collect();
    let counts = counts?;
    let mut masses = vec![0.0; generator.states().len()];
    let mut leaked = 0usize;
    for (idx, leak) in counts {
        if leak == 1 {
            leaked += 1;
        } else {
            masses[idx] += 1.0;
        }
    }
    let scale = 1.0 / trials as f64;
    for m in &mut masses {
        *m *= scale;
    }
    Ok(DistributionGrid {
        time: t,
        masses,
        leaked: leaked as f64 * scale,
    })
}

/// Distribution snapshot as CSV with columns `state,positions,word,mass`.
pub fn distribution_csv(generator: &GeneratorSystem<f64>, dist: &DistributionGrid) -> String {
    use std::fmt::Write as _;
    let mut out = String::from("state,positions,word,mass\n");
    for (idx, state) in generator.states().iter().enumerate() {
        let positions: Vec<String> = state.positions().iter().map(i64::to_string).collect();
        writeln!(
            out,
            "{},{},{},{}",
            idx,
            positions.join(" "),
            state.word(),
            dist.masses[idx]
        )
        .expect("string write");
    }
    out
}
