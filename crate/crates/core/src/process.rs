//! Continuous-time simulation of the particle system, plus an exact oracle
//! for single-event resolution.
//!
//! A clock ring activates one particle in one direction. The activated
//! particle becomes a moving token: arriving at an occupied site it either
//! passes over the resident (stronger token, or a same-species draw with the
//! jump weight) or settles there and ejects the resident as a new token
//! moving the opposite way, into the just-vacated side. Same-species draws
//! use the jump weight `mu` when the token moves right and `lambda` when it
//! moves left. The loop ends when a token lands on an empty site.
//!
//! [`resolve_collision`] samples that loop; [`exact_resolution_distribution`]
//! enumerates its finite hidden-state graph and solves the absorbing-chain
//! system over exact rationals, giving the full outcome distribution.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::Write as _;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::algebra::{Matrix, Rational, Word};
use crate::params::ModelParams;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProcessError {
    #[error("positions must be strictly increasing and match the word length")]
    BadConfiguration,
    #[error("particle index {index} out of range for {count} particles")]
    ParticleOutOfRange { index: usize, count: usize },
    #[error("resolution exceeded the {cap}-step safety cap")]
    StepCapExceeded { cap: usize },
    #[error("hidden-state graph exceeded the {cap}-state oracle capacity")]
    OracleCapacity { cap: usize },
    #[error("hidden-state graph contains a probability-one cycle")]
    NonAbsorbing,
}

/// Safety cap on a single sampled resolution; unreachable in practice since
/// every revisit of a same-species ping-pong carries probability at most 1/4.
pub const RESOLUTION_STEP_CAP: usize = 1_000_000;

/// Default cap on the hidden-state graph size of the exact oracle.
pub const DEFAULT_ORACLE_CAP: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Right,
    Left,
}

impl Direction {
    pub fn step(self) -> i64 {
        match self {
            Direction::Right => 1,
            Direction::Left => -1,
        }
    }

    pub fn reverse(self) -> Self {
        match self {
            Direction::Right => Direction::Left,
            Direction::Left => Direction::Right,
        }
    }
}

/// Particle positions paired with their species word, positions strictly
/// increasing.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Configuration {
    positions: Vec<i64>,
    word: Word,
}

impl Configuration {
    pub fn new(positions: Vec<i64>, word: Word) -> Result<Self, ProcessError> {
        if positions.len() != word.len() || positions.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ProcessError::BadConfiguration);
        }
        Ok(Self { positions, word })
    }

    /// Adjacent block starting at `start`.
    pub fn adjacent_block(start: i64, word: Word) -> Self {
        let positions = (0..word.len() as i64).map(|k| start + k).collect();
        Self { positions, word }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[i64] {
        &self.positions
    }

    pub fn word(&self) -> &Word {
        &self.word
    }

    pub fn species_multiset(&self) -> Word {
        self.word.multiset()
    }

    fn occupancy(&self) -> BTreeMap<i64, u8> {
        self.positions
            .iter()
            .zip(self.word.letters())
            .map(|(&x, &s)| (x, s))
            .collect()
    }

    fn from_occupancy(occ: &BTreeMap<i64, u8>) -> Self {
        let positions: Vec<i64> = occ.keys().copied().collect();
        let letters: Vec<u8> = occ.values().copied().collect();
        Self {
            positions,
            word: Word::new(letters),
        }
    }

    /// Same relative configuration anchored at zero; used to cache
    /// translation-invariant resolution outcomes.
    pub fn normalized(&self) -> (Self, i64) {
        let shift = self.positions.first().copied().unwrap_or(0);
        let positions = self.positions.iter().map(|x| x - shift).collect();
        (
            Self {
                positions,
                word: self.word.clone(),
            },
            shift,
        )
    }

    pub fn translated(&self, shift: i64) -> Self {
        Self {
            positions: self.positions.iter().map(|x| x + shift).collect(),
            word: self.word.clone(),
        }
    }
}

impl std::fmt::Display for Configuration {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let positions: Vec<String> = self.positions.iter().map(i64::to_string).collect();
        write!(f, "({}; {})", positions.join(" "), self.word)
    }
}

/// Chooses the resolution channel for a token of species `active` meeting a
/// resident of species `resident`; `None` means the channel is random with
/// the returned jump weight.
fn deterministic_channel(active: u8, resident: u8) -> Option<bool> {
    if active < resident {
        Some(true) // stronger token passes over
    } else if active > resident {
        Some(false) // weaker token settles, resident is ejected
    } else {
        None
    }
}

/// Samples one event resolution: particle `index` activated in `dir`.
pub fn resolve_collision(
    config: &Configuration,
    index: usize,
    dir: Direction,
    params: &ModelParams<f64>,
    rng: &mut impl Rng,
) -> Result<Configuration, ProcessError> {
    if index >= config.len() {
        return Err(ProcessError::ParticleOutOfRange {
            index,
            count: config.len(),
        });
    }
    let mut occ = config.occupancy();
    let start = config.positions[index];
    let mut active = occ.remove(&start).expect("occupied by construction");
    let mut dir = dir;
    let mut site = start + dir.step();
    for _ in 0..RESOLUTION_STEP_CAP {
        match occ.get(&site) {
            None => {
                occ.insert(site, active);
                return Ok(Configuration::from_occupancy(&occ));
            }
            Some(&resident) => {
                let jump = match deterministic_channel(active, resident) {
                    Some(jump) => jump,
                    None => {
                        let jump_weight = match dir {
                            Direction::Right => *params.mu(active),
                            Direction::Left => params.lambda(active),
                        };
                        // avoid consuming entropy on deterministic weights so
                        // the binary regime is seed-independent
                        if jump_weight >= 1.0 {
                            true
                        } else if jump_weight <= 0.0 {
                            false
                        } else {
                            rng.random::<f64>() < jump_weight
                        }
                    }
                };
                if jump {
                    site += dir.step();
                } else {
                    occ.remove(&site);
                    occ.insert(site, active);
                    active = resident;
                    dir = dir.reverse();
                    site += dir.step();
                }
            }
        }
    }
    Err(ProcessError::StepCapExceeded {
        cap: RESOLUTION_STEP_CAP,
    })
}

/// Exact probability distribution over the terminal configurations of one
/// event resolution.
#[derive(Clone, Debug, PartialEq)]
pub struct OutcomeDistribution {
    /// Terminal configurations with their exact probabilities, sorted by
    /// configuration; probabilities sum to exactly one.
    pub outcomes: Vec<(Configuration, Rational)>,
}

impl OutcomeDistribution {
    pub fn probability_of(&self, config: &Configuration) -> Rational {
        self.outcomes
            .iter()
            .find(|(c, _)| c == config)
            .map(|(_, p)| p.clone())
            .unwrap_or_else(Rational::zero)
    }

    pub fn total(&self) -> Rational {
        self.outcomes
            .iter()
            .fold(Rational::zero(), |acc, (_, p)| acc + p.clone())
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct TokenState {
    occupancy: Vec<(i64, u8)>,
    active: u8,
    dir: Direction,
    site: i64,
}

/// Enumerates the hidden-state graph of one event resolution and solves the
/// absorbing-chain linear system over exact rationals.
pub fn exact_resolution_distribution(
    config: &Configuration,
    index: usize,
    dir: Direction,
    params: &ModelParams<Rational>,
    state_cap: usize,
) -> Result<OutcomeDistribution, ProcessError> {
    if index >= config.len() {
        return Err(ProcessError::ParticleOutOfRange {
            index,
            count: config.len(),
        });
    }
    let mut occ = config.occupancy();
    let start = config.positions()[index];
    let active = occ.remove(&start).expect("occupied by construction");
    let initial = TokenState {
        occupancy: occ.into_iter().collect(),
        active,
        dir,
        site: start + dir.step(),
    };

    // Breadth-first enumeration of transient token states and absorbing
    // configurations.
    type WeightedEdges = Vec<(usize, Rational)>;
    let mut transient_ids: HashMap<TokenState, usize> = HashMap::new();
    let mut transients: Vec<TokenState> = Vec::new();
    let mut absorbing_ids: BTreeMap<Configuration, usize> = BTreeMap::new();
    // per transient state: (transient successors, absorbing successors)
    let mut edges: Vec<(WeightedEdges, WeightedEdges)> = Vec::new();

    transient_ids.insert(initial.clone(), 0);
    transients.push(initial);
    let mut queue = VecDeque::from([0usize]);
    while let Some(id) = queue.pop_front() {
        let state = transients[id].clone();
        let mut branches: Vec<(bool, Rational)> = Vec::new();
        let occ: BTreeMap<i64, u8> = state.occupancy.iter().copied().collect();
        match occ.get(&state.site) {
            None => {
                // settle: absorbing configuration
                let mut terminal = occ.clone();
                terminal.insert(state.site, state.active);
                let config = Configuration::from_occupancy(&terminal);
                let next = absorbing_ids.len();
                let aid = *absorbing_ids.entry(config).or_insert(next);
                edges.push((Vec::new(), vec![(aid, Rational::one())]));
                continue;
            }
            Some(&resident) => match deterministic_channel(state.active, resident) {
                Some(jump) => branches.push((jump, Rational::one())),
                None => {
                    let jump_weight = match state.dir {
                        Direction::Right => params.mu(state.active).clone(),
                        Direction::Left => params.lambda(state.active),
                    };
                    if !jump_weight.is_zero() {
                        branches.push((true, jump_weight.clone()));
                    }
                    let swap_weight = Rational::one() - jump_weight;
                    if !swap_weight.is_zero() {
                        branches.push((false, swap_weight));
                    }
                }
            },
        }
        let mut transient_edges = Vec::new();
        for (jump, probability) in branches {
            let next = if jump {
                TokenState {
                    site: state.site + state.dir.step(),
                    ..state.clone()
                }
            } else {
                let mut occ_next: BTreeMap<i64, u8> = occ.clone();
                let resident = occ_next.remove(&state.site).unwrap();
                occ_next.insert(state.site, state.active);
                let dir_next = state.dir.reverse();
                TokenState {
                    occupancy: occ_next.into_iter().collect(),
                    active: resident,
                    dir: dir_next,
                    site: state.site + dir_next.step(),
                }
            };
            let next_id = match transient_ids.get(&next) {
                Some(&id) => id,
                None => {
                    let id = transients.len();
                    if id >= state_cap {
                        return Err(ProcessError::OracleCapacity { cap: state_cap });
                    }
                    transient_ids.insert(next.clone(), id);
                    transients.push(next);
                    queue.push_back(id);
                    id
                }
            };
            transient_edges.push((next_id, probability));
        }
        edges.push((transient_edges, Vec::new()));
    }

    // Absorption probabilities: solve (I - Q)·F = R and read the row of the
    // initial state.
    let t = transients.len();
    let a = absorbing_ids.len();
    let mut i_minus_q = Matrix::<Rational>::identity(t);
    let mut hit = Matrix::<Rational>::zeros(t, a);
    for (from, (transitions, absorptions)) in edges.iter().enumerate() {
        for (to, probability) in transitions {
            let cur = i_minus_q[(from, *to)].clone();
            i_minus_q[(from, *to)] = cur - probability.clone();
        }
        for (to, probability) in absorptions {
            let cur = hit[(from, *to)].clone();
            hit[(from, *to)] = cur + probability.clone();
        }
    }
    let fundamental = i_minus_q
        .exact_inverse()
        .map_err(|_| ProcessError::NonAbsorbing)?;
    let absorbed = fundamental.mul(&hit);

    let configs: Vec<Configuration> = {
        let mut by_id = vec![None; a];
        for (config, id) in absorbing_ids {
            by_id[id] = Some(config);
        }
        by_id.into_iter().map(Option::unwrap).collect()
    };
    let mut outcomes: Vec<(Configuration, Rational)> = configs
        .into_iter()
        .enumerate()
        .filter_map(|(id, config)| {
            let p = absorbed[(0, id)].clone();
            (!p.is_zero()).then_some((config, p))
        })
        .collect();
    outcomes.sort_by(|a, b| a.0.cmp(&b.0));

    let distribution = OutcomeDistribution { outcomes };
    debug_assert!(distribution.total().is_one());
    Ok(distribution)
}

/// One resolved clock ring.
#[derive(Clone, Debug)]
pub struct TrajectoryEvent {
    pub time: f64,
    /// Index of the acting particle in the pre-event ordering, 0-based.
    pub particle: usize,
    pub direction: Direction,
    pub pre: Configuration,
    pub post: Configuration,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub seed: u64,
    pub t_max: f64,
    pub events: Vec<TrajectoryEvent>,
    pub final_config: Configuration,
}

/// Continuous-time simulation: every particle carries independent rightward
/// (rate `p`) and leftward (rate `q`) clocks, so the total event rate is the
/// particle count. Identical seed and inputs give an identical trajectory.
pub fn simulate(
    initial: &Configuration,
    t_max: f64,
    params: &ModelParams<f64>,
    seed: u64,
) -> Result<Trajectory, ProcessError> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    simulate_with(initial, t_max, params, &mut rng, seed)
}

fn simulate_with(
    initial: &Configuration,
    t_max: f64,
    params: &ModelParams<f64>,
    rng: &mut ChaCha12Rng,
    seed: u64,
) -> Result<Trajectory, ProcessError> {
    let n = initial.len();
    let total_rate = n as f64;
    let mut time = 0.0f64;
    let mut current = initial.clone();
    let mut events = Vec::new();
    loop {
        let u: f64 = rng.random();
        time += -(1.0 - u).ln() / total_rate;
        if time > t_max {
            break;
        }
        let particle = rng.random_range(0..n);
        let direction = if rng.random::<f64>() < *params.p() {
            Direction::Right
        } else {
            Direction::Left
        };
        let post = resolve_collision(&current, particle, direction, params, rng)?;
        events.push(TrajectoryEvent {
            time,
            particle,
            direction,
            pre: current.clone(),
            post: post.clone(),
        });
        current = post;
    }
    Ok(Trajectory {
        seed,
        t_max,
        events,
        final_config: current,
    })
}

/// Renders the event log as CSV with columns
/// `time,particle,direction,positions,word`.
pub fn trajectory_csv(trajectory: &Trajectory) -> String {
    let mut out = String::from("time,particle,direction,positions,word\n");
    for event in &trajectory.events {
        let positions: Vec<String> = event.post.positions().iter().map(i64::to_string).collect();
        writeln!(
            out,
            "{},{},{},{},{}",
            event.time,
            event.particle,
            event.direction.step(),
            positions.join(" "),
            event.post.word()
        )
        .expect("string write");
    }
    out
}

/// Monte Carlo estimate of the full-block-advance rate with a Wald
/// three-sigma interval.
#[derive(Clone, Debug)]
pub struct RateEstimate {
    pub trials: usize,
    pub successes: usize,
    /// `p · successes / trials`
    pub rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl RateEstimate {
    pub fn brackets(&self, target: f64) -> bool {
        self.ci_low <= target && target <= self.ci_high
    }
}

/// Repeatedly prepares an adjacent same-species block, activates its leftmost
/// particle rightward, and counts full-shift outcomes. Trials run in
/// parallel on independent seeded streams, so the aggregate is identical to
/// the sequential run.
pub fn estimate_shift_rate(
    n: usize,
    species: u8,
    params: &ModelParams<f64>,
    trials: usize,
    seed: u64,
) -> RateEstimate {
    let initial = Configuration::adjacent_block(0, Word::new(vec![species; n]));
    let shifted = initial.translated(1);
    let successes = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            rng.set_stream(trial as u64);
            let out = resolve_collision(&initial, 0, Direction::Right, params, &mut rng)
                .expect("resolution terminates");
            usize::from(out == shifted)
        })
        .sum::<usize>();
    let p_hat = successes as f64 / trials as f64;
    let sigma = (p_hat * (1.0 - p_hat) / trials as f64).sqrt();
    let drift = *params.p();
    RateEstimate {
        trials,
        successes,
        rate: drift * p_hat,
        ci_low: drift * (p_hat - 3.0 * sigma),
        ci_high: drift * (p_hat + 3.0 * sigma),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    fn fparams(mu: Vec<f64>, p: f64) -> ModelParams<f64> {
        ModelParams::new(mu, p).unwrap()
    }

    fn rparams(mu: Vec<Rational>) -> ModelParams<Rational> {
        ModelParams::new(mu, rat(1, 1)).unwrap()
    }

    fn config(positions: Vec<i64>, letters: Vec<u8>) -> Configuration {
        Configuration::new(positions, Word::new(letters)).unwrap()
    }

    #[test]
    fn configuration_validation() {
        assert!(Configuration::new(vec![0, 0], Word::new([1, 1])).is_err());
        assert!(Configuration::new(vec![1, 0], Word::new([1, 1])).is_err());
        assert!(Configuration::new(vec![0], Word::new([1, 2])).is_err());
    }

    #[test]
    fn stronger_token_passes_over() {
        let params = fparams(vec![0.5, 0.5], 1.0);
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let out =
            resolve_collision(&config(vec![0, 1], vec![1, 2]), 0, Direction::Right, &params, &mut rng)
                .unwrap();
        assert_eq!(out, config(vec![1, 2], vec![2, 1]));
    }

    #[test]
    fn weaker_token_swaps() {
        let params = fparams(vec![0.5, 0.5], 1.0);
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let out =
            resolve_collision(&config(vec![0, 1], vec![2, 1]), 0, Direction::Right, &params, &mut rng)
                .unwrap();
        assert_eq!(out, config(vec![0, 1], vec![1, 2]));
    }

    #[test]
    fn leftward_distinct_species_keeps_label_order_rule() {
        // order comparison does not mirror for leftward motion: the weaker
        // (larger-label) token still settles and ejects the resident
        let params = fparams(vec![0.5, 0.5], 0.5);
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let out =
            resolve_collision(&config(vec![0, 1], vec![1, 2]), 1, Direction::Left, &params, &mut rng)
                .unwrap();
        assert_eq!(out, config(vec![0, 1], vec![2, 1]));
        // and the stronger token passes over leftward
        let out =
            resolve_collision(&config(vec![0, 1], vec![2, 1]), 1, Direction::Left, &params, &mut rng)
                .unwrap();
        assert_eq!(out, config(vec![-1, 0], vec![1, 2]));
    }

    #[test]
    fn oracle_capacity_cap_is_enforced() {
        let params = rparams(vec![rat(1, 2)]);
        let start = config(vec![0, 1, 2, 3], vec![1, 1, 1, 1]);
        let err = exact_resolution_distribution(&start, 0, Direction::Right, &params, 3)
            .unwrap_err();
        assert!(matches!(err, ProcessError::OracleCapacity { cap: 3 }));
    }

    #[test]
    fn oracle_rate_depends_only_on_same_species_encounters() {
        // three same-species encounters in three different contexts: a pure
        // block, a block padded by stronger bystanders, and a block closed
        // off by a weaker particle; the distinguished outcome probability is
        // mu³/S₃ in each case
        let params = ModelParams::new(
            vec![rat(1, 2), rat(3, 7), rat(2, 5), rat(1, 5)],
            rat(1, 1),
        )
        .unwrap();
        let mu = params.mu(2).clone();
        let expected = mu.clone() * mu.clone() * mu
            / crate::reduction::weight_sum(3, 2, &params);

        let pure = config(vec![0, 1, 2, 3], vec![2, 2, 2, 2]);
        let shifted = pure.translated(1);
        let dist =
            exact_resolution_distribution(&pure, 0, Direction::Right, &params, DEFAULT_ORACLE_CAP)
                .unwrap();
        assert_eq!(dist.probability_of(&shifted), expected);

        let padded = config(vec![0, 1, 2, 3, 4, 5], vec![2, 2, 4, 3, 2, 2]);
        let target = config(vec![1, 2, 3, 4, 5, 6], vec![2, 4, 3, 2, 2, 2]);
        let dist = exact_resolution_distribution(
            &padded,
            0,
            Direction::Right,
            &params,
            DEFAULT_ORACLE_CAP,
        )
        .unwrap();
        assert_eq!(dist.probability_of(&target), expected);

        let closed_off = config(vec![0, 1, 2, 3, 4, 5, 6], vec![2, 2, 4, 3, 2, 2, 1]);
        let target = config(vec![0, 1, 2, 3, 4, 5, 6], vec![1, 2, 4, 3, 2, 2, 2]);
        let dist = exact_resolution_distribution(
            &closed_off,
            0,
            Direction::Right,
            &params,
            DEFAULT_ORACLE_CAP,
        )
        .unwrap();
        assert_eq!(dist.probability_of(&target), expected);
    }

    #[test]
    fn parallel_estimate_matches_sequential_replay() {
        let params = fparams(vec![0.5], 1.0);
        let (n, trials, seed) = (3usize, 5_000usize, 21u64);
        let estimate = estimate_shift_rate(n, 1, &params, trials, seed);
        let initial = Configuration::adjacent_block(0, Word::new(vec![1u8; n]));
        let shifted = initial.translated(1);
        let mut successes = 0usize;
        for trial in 0..trials {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            rng.set_stream(trial as u64);
            let out =
                resolve_collision(&initial, 0, Direction::Right, &params, &mut rng).unwrap();
            successes += usize::from(out == shifted);
        }
        assert_eq!(estimate.successes, successes);
    }

    #[test]
    fn drop_push_triple_shifts_deterministically() {
        let params = fparams(vec![1.0], 1.0);
        for seed in 0..16 {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let out = resolve_collision(
                &config(vec![0, 1, 2], vec![1, 1, 1]),
                0,
                Direction::Right,
                &params,
                &mut rng,
            )
            .unwrap();
            assert_eq!(out, config(vec![1, 2, 3], vec![1, 1, 1]));
        }
    }

    #[test]
    fn binary_regime_is_seed_independent() {
        let params = fparams(vec![0.0, 1.0], 0.5);
        let start = config(vec![0, 1, 2, 4], vec![2, 1, 2, 2]);
        for index in 0..4 {
            for dir in [Direction::Right, Direction::Left] {
                let mut reference = None;
                for seed in 0..8 {
                    let mut rng = ChaCha12Rng::seed_from_u64(seed);
                    let out = resolve_collision(&start, index, dir, &params, &mut rng).unwrap();
                    match &reference {
                        None => reference = Some(out),
                        Some(r) => assert_eq!(&out, r),
                    }
                }
            }
        }
    }

    #[test]
    fn oracle_matches_closed_form_triple() {
        let params = rparams(vec![rat(1, 2)]);
        let start = config(vec![0, 1, 2], vec![1, 1, 1]);
        let dist =
            exact_resolution_distribution(&start, 0, Direction::Right, &params, DEFAULT_ORACLE_CAP)
                .unwrap();
        assert_eq!(dist.outcomes.len(), 2);
        assert_eq!(
            dist.probability_of(&config(vec![1, 2, 3], vec![1, 1, 1])),
            rat(1, 3)
        );
        assert_eq!(dist.probability_of(&start), rat(2, 3));
    }

    #[test]
    fn oracle_mixed_pair_rates() {
        // word (i, i, j) with i < j: the block shifts with probability mu_i
        let params = rparams(vec![rat(2, 7), rat(1, 3)]);
        let start = config(vec![0, 1, 2], vec![1, 1, 2]);
        let dist =
            exact_resolution_distribution(&start, 0, Direction::Right, &params, DEFAULT_ORACLE_CAP)
                .unwrap();
        assert_eq!(
            dist.probability_of(&config(vec![1, 2, 3], vec![1, 2, 1])),
            rat(2, 7)
        );
        assert_eq!(dist.probability_of(&start), rat(5, 7));
    }

    #[test]
    fn oracle_free_move_is_point_mass() {
        let params = rparams(vec![rat(1, 2)]);
        let start = config(vec![5], vec![1]);
        for (dir, target) in [(Direction::Right, 6), (Direction::Left, 4)] {
            let dist =
                exact_resolution_distribution(&start, 0, dir, &params, DEFAULT_ORACLE_CAP).unwrap();
            assert_eq!(
                dist.outcomes,
                vec![(config(vec![target], vec![1]), rat(1, 1))]
            );
        }
    }

    #[test]
    fn oracle_sums_to_one_battery() {
        let battery = [
            (vec![0, 1, 2, 3], vec![1u8, 1, 1, 1]),
            (vec![0, 1, 2, 3], vec![2, 1, 1, 3]),
            (vec![0, 1, 3, 4], vec![1, 2, 2, 1]),
            (vec![0, 2, 3], vec![3, 2, 1]),
        ];
        let params = rparams(vec![rat(1, 3), rat(2, 5), rat(1, 2)]);
        for (positions, letters) in battery {
            let start = config(positions, letters);
            for index in 0..start.len() {
                for dir in [Direction::Right, Direction::Left] {
                    let dist = exact_resolution_distribution(
                        &start,
                        index,
                        dir,
                        &params,
                        DEFAULT_ORACLE_CAP,
                    )
                    .unwrap();
                    assert!(dist.total().is_one());
                    for (outcome, _) in &dist.outcomes {
                        assert_eq!(outcome.species_multiset(), start.species_multiset());
                    }
                }
            }
        }
    }

    #[test]
    fn sampled_resolutions_stay_admissible() {
        let params = fparams(vec![0.3, 0.7, 0.5], 1.0);
        let start = config(vec![0, 1, 2, 4], vec![2, 3, 1, 2]);
        let mut rng = ChaCha12Rng::seed_from_u64(99);
        for _ in 0..2000 {
            let index = rng.random_range(0..start.len());
            let dir = if rng.random::<bool>() {
                Direction::Right
            } else {
                Direction::Left
            };
            let out = resolve_collision(&start, index, dir, &params, &mut rng).unwrap();
            assert!(out.positions().windows(2).all(|w| w[0] < w[1]));
            assert_eq!(out.species_multiset(), start.species_multiset());
        }
    }

    #[test]
    fn totally_asymmetric_never_moves_left() {
        let params = fparams(vec![0.5], 1.0);
        let start = config(vec![0], vec![1]);
        let trajectory = simulate(&start, 50.0, &params, 4).unwrap();
        assert!(!trajectory.events.is_empty());
        assert!(
            trajectory
                .events
                .iter()
                .all(|e| e.direction == Direction::Right)
        );
    }

    #[test]
    fn trajectories_are_reproducible() {
        let params = fparams(vec![0.4, 0.8], 0.6);
        let start = config(vec![0, 1, 3], vec![2, 1, 2]);
        let a = simulate(&start, 5.0, &params, 12345).unwrap();
        let b = simulate(&start, 5.0, &params, 12345).unwrap();
        assert_eq!(a.final_config, b.final_config);
        assert_eq!(a.events.len(), b.events.len());
        assert_eq!(trajectory_csv(&a), trajectory_csv(&b));
        assert!(a.events.windows(2).all(|w| w[0].time < w[1].time));
    }

    #[test]
    fn single_particle_mean_displacement_is_poissonian() {
        // at p = 1 the position increments form a rate-1 Poisson process
        let params = fparams(vec![0.5], 1.0);
        let start = config(vec![0], vec![1]);
        let t = 4.0;
        let runs = 100_000usize;
        let total: i64 = (0..runs)
            .into_par_iter()
            .map(|seed| {
                simulate(&start, t, &params, seed as u64)
                    .unwrap()
                    .final_config
                    .positions()[0]
            })
            .sum();
        let mean = total as f64 / runs as f64;
        let sigma_mean = (t / runs as f64).sqrt();
        assert!(
            (mean - t).abs() < 3.0 * sigma_mean,
            "mean {mean} vs expected {t} (3σ = {})",
            3.0 * sigma_mean
        );
    }

    #[test]
    fn estimate_brackets_closed_form() {
        let params = fparams(vec![0.3], 1.0);
        let estimate = estimate_shift_rate(2, 1, &params, 200_000, 11);
        assert!(estimate.brackets(0.3), "{estimate:?}");
    }

    #[test]
    fn estimate_deterministic_at_mu_one() {
        let params = fparams(vec![1.0], 1.0);
        let estimate = estimate_shift_rate(4, 1, &params, 10_000, 3);
        assert_eq!(estimate.successes, estimate.trials);
        assert_eq!(estimate.rate, 1.0);
        assert_eq!(estimate.ci_low, estimate.ci_high);
    }

    #[test]
    fn empirical_frequencies_match_oracle() {
        // fixed battery, 10^6 draws per start, four-sigma agreement per outcome
        let rational = rparams(vec![rat(1, 2), rat(1, 4), rat(2, 3)]);
        let float = rational.to_float();
        let battery = [
            (vec![0, 1, 2], vec![1u8, 1, 1], 0usize, Direction::Right),
            (vec![0, 1, 2], vec![2, 1, 1], 1, Direction::Left),
            (vec![0, 1, 2, 3], vec![1, 2, 1, 1], 0, Direction::Right),
            (vec![0, 1, 2, 3], vec![2, 3, 1, 3], 3, Direction::Left),
        ];
        let draws = 1_000_000usize;
        for (battery_index, (positions, letters, index, dir)) in battery.into_iter().enumerate() {
            let start = config(positions, letters);
            let dist = exact_resolution_distribution(
                &start,
                index,
                dir,
                &rational,
                DEFAULT_ORACLE_CAP,
            )
            .unwrap();
            let counts: HashMap<Configuration, usize> = (0..draws)
                .into_par_iter()
                .map(|trial| {
                    let mut rng = ChaCha12Rng::seed_from_u64(500 + battery_index as u64);
                    rng.set_stream(trial as u64);
                    resolve_collision(&start, index, dir, &float, &mut rng).unwrap()
                })
                .fold(HashMap::new, |mut acc, out| {
                    *acc.entry(out).or_insert(0) += 1;
                    acc
                })
                .reduce(HashMap::new, |mut a, b| {
                    for (k, v) in b {
                        *a.entry(k).or_insert(0) += v;
                    }
                    a
                });
            for (outcome, probability) in &dist.outcomes {
                let p = crate::algebra::to_f64(probability);
                let observed = *counts.get(outcome).unwrap_or(&0) as f64 / draws as f64;
                let sigma = (p * (1.0 - p) / draws as f64).sqrt();
                assert!(
                    (observed - p).abs() <= 4.0 * sigma.max(1e-9),
                    "outcome {outcome}: observed {observed}, expected {p}"
                );
            }
        }
    }
}
