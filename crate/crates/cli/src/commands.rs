//! Subcommand implementations. Every command resolves its configuration,
//! runs, writes one report (JSON or CSV) to the configured output, and maps
//! the outcome to the exit-code contract: 0 pass, 1 verification failure,
//! 2 usage or configuration error.

use std::fmt::Write as _;

use longswap::Word;
use longswap::algebra::{Rational, rat, to_f64};
use longswap::local_ops::{self, LocalPair};
use longswap::master::{self, DistributionGrid, EliminationOrder, ResolutionOracle};
use longswap::params::ModelParams;
use longswap::process::{self, DEFAULT_ORACLE_CAP};
use longswap::reduction::{self, SectorCase};
use longswap::report::CheckReport;
use longswap::scattering;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::Serialize;

use crate::config::{Mode, RunConfig};

pub enum Outcome {
    Pass,
    Fail,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::Fail => 1,
        }
    }
}

fn write_output(config: &RunConfig, content: &str) -> Result<(), String> {
    match &config.out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(report: &T) -> String {
    let mut text = serde_json::to_string_pretty(report).expect("report serializes");
    text.push('\n');
    text
}

// ---------------------------------------------------------------------------
// verify-operators

#[derive(Serialize)]
struct OperatorReport<'a> {
    command: &'static str,
    config: &'a RunConfig,
    tampered: bool,
    pass: bool,
    checks: CheckReport,
}

pub fn verify_operators(config: &RunConfig, tamper: bool) -> Result<Outcome, String> {
    let mut pair: LocalPair<Rational> = local_ops::build_local_pair(&config.params);
    if tamper {
        let w = Word::new([1, 1]);
        let bumped = pair.jump.entry(&w, &w).map_err(|e| e.to_string())?.clone() + rat(1, 7);
        pair.jump.set_entry(&w, &w, bumped).map_err(|e| e.to_string())?;
    }
    let checks = local_ops::verify_structure_lemmas_on(&pair, &config.params);
    let pass = checks.all_pass();
    let report = OperatorReport {
        command: "verify-operators",
        config,
        tampered: tamper,
        pass,
        checks,
    };
    write_output(config, &to_json(&report))?;
    Ok(if pass { Outcome::Pass } else { Outcome::Fail })
}

// ---------------------------------------------------------------------------
// verify-ybe

#[derive(Serialize)]
struct YbePointReport {
    xi_alpha: String,
    xi_beta: String,
    xi_gamma: String,
    deviation: String,
    blockwise_zero: bool,
    pass: bool,
}

#[derive(Serialize)]
struct YbeReport<'a> {
    command: &'static str,
    config: &'a RunConfig,
    requested_points: usize,
    rejected_candidates: usize,
    pass: bool,
    points: Vec<YbePointReport>,
}

pub fn verify_ybe(config: &RunConfig, points: usize) -> Result<Outcome, String> {
    let (sampled, rejected) =
        scattering::sample_spectral_points(&config.params, points, config.seed);
    let mut rows = Vec::with_capacity(sampled.len());
    let mut pass = true;
    for point in &sampled {
        let check = scattering::verify_ybe(&config.params, point).map_err(|e| e.to_string())?;
        let ok = check.holds();
        pass &= ok;
        rows.push(YbePointReport {
            xi_alpha: point.xi_alpha().to_string(),
            xi_beta: point.xi_beta().to_string(),
            xi_gamma: point.xi_gamma().to_string(),
            deviation: check.max_deviation.to_string(),
            blockwise_zero: check.blockwise_zero,
            pass: ok,
        });
    }
    let report = YbeReport {
        command: "verify-ybe",
        config,
        requested_points: points,
        rejected_candidates: rejected,
        pass,
        points: rows,
    };
    write_output(config, &to_json(&report))?;
    Ok(if pass { Outcome::Pass } else { Outcome::Fail })
}

// ---------------------------------------------------------------------------
// scan-invertibility

fn case_label(case: SectorCase) -> &'static str {
    match case {
        SectorCase::SingleSpecies => "single_species",
        SectorCase::OneOff => "one_off",
        SectorCase::AllDistinct => "all_distinct",
        SectorCase::General => "general",
    }
}

pub fn scan_invertibility(config: &RunConfig, draws: usize) -> Result<Outcome, String> {
    let mut csv = String::from("draw,multiset,case,k,invertible,spectral_radius\n");
    let multisets = distinct_multisets(config.species, config.n);
    match config.mode {
        Mode::Exact => {
            for (draw, params) in exact_draws(config, draws).into_iter().enumerate() {
                for multiset in &multisets {
                    let scan = reduction::sector_invertibility_scan(multiset, &params)
                        .map_err(|e| e.to_string())?;
                    for step in &scan.steps {
                        writeln!(
                            csv,
                            "{draw},{},{},{},{},{}",
                            scan.multiset,
                            case_label(scan.case),
                            step.k,
                            step.invertible,
                            step.spectral_radius
                        )
                        .expect("string write");
                    }
                }
            }
        }
        Mode::Float => {
            let mut rng = ChaCha12Rng::seed_from_u64(config.seed);
            for draw in 0..draws {
                let mu: Vec<f64> = (0..config.species)
                    .map(|_| {
                        // open interval: stay away from the deterministic endpoints
                        let u: f64 = rng.random();
                        u.clamp(1e-6, 1.0 - 1e-6)
                    })
                    .collect();
                let params = ModelParams::new(mu, config.p_f64()).map_err(|e| e.to_string())?;
                for multiset in &multisets {
                    let basis =
                        longswap::WordBasis::sector(config.species, &multiset.multiset());
                    let depth = reduction::max_chain_depth(multiset.len(), 1);
                    let chain =
                        reduction::chain::<f64>(&basis, depth, &params).map_err(|e| e.to_string())?;
                    for step in chain.steps() {
                        let radius =
                            step.transfer.spectral_radius().map_err(|e| e.to_string())?;
                        writeln!(
                            csv,
                            "{draw},{},{},{},{},{}",
                            multiset,
                            case_label(reduction::classify_multiset(multiset)),
                            step.k,
                            step.pivot_inverse.is_some(),
                            radius
                        )
                        .expect("string write");
                    }
                }
            }
        }
    }
    write_output(config, &csv)?;
    Ok(Outcome::Pass)
}

fn exact_draws(config: &RunConfig, draws: usize) -> Vec<ModelParams<Rational>> {
    if draws <= 1 {
        return vec![config.params.clone()];
    }
    let mut rng = ChaCha12Rng::seed_from_u64(config.seed);
    (0..draws)
        .map(|_| {
            let mu = (0..config.species)
                .map(|_| {
                    let d = rng.random_range(1..=12i64);
                    rat(rng.random_range(0..=d), d)
                })
                .collect();
            ModelParams::new(mu, config.params.p().clone()).expect("draw in range")
        })
        .collect()
}

/// All multisets of `n` labels over `1..=species`, ascending.
fn distinct_multisets(species: u8, n: usize) -> Vec<Word> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(n);
    fn recurse(species: u8, n: usize, start: u8, current: &mut Vec<u8>, out: &mut Vec<Word>) {
        if current.len() == n {
            out.push(Word::new(current.clone()));
            return;
        }
        for label in start..=species {
            current.push(label);
            recurse(species, n, label, current, out);
            current.pop();
        }
    }
    recurse(species, n, 1, &mut current, &mut out);
    out
}

// ---------------------------------------------------------------------------
// rates

pub fn rates(config: &RunConfig) -> Result<Outcome, String> {
    if config.trials < 10_000 {
        return Err(format!(
            "rates needs at least 10000 trials, got {}",
            config.trials
        ));
    }
    let mut csv = String::from("n,species,formula_rate,oracle_rate,mc_estimate,ci_low,ci_high\n");
    let float_params = config.float_params();
    let mut pass = true;
    for n in 2..=config.n.max(2) {
        for species in 1..=config.species {
            let formula = reduction::effective_shift_rate(n, species, &config.params);
            let word = Word::new(vec![species; n]);
            let oracle = reduction::transition_coefficient(&word, &word, &config.params)
                .map_err(|e| e.to_string())?;
            if formula != oracle {
                pass = false;
            }
            let estimate = process::estimate_shift_rate(
                n,
                species,
                &float_params,
                config.trials,
                config.seed ^ (n as u64) << 8 ^ species as u64,
            );
            if !estimate.brackets(to_f64(&formula)) {
                pass = false;
            }
            let (formula_text, oracle_text) = match config.mode {
                Mode::Exact => (formula.to_string(), oracle.to_string()),
                Mode::Float => (to_f64(&formula).to_string(), to_f64(&oracle).to_string()),
            };
            writeln!(
                csv,
                "{n},{species},{formula_text},{oracle_text},{},{},{}",
                estimate.rate, estimate.ci_low, estimate.ci_high
            )
            .expect("string write");
        }
    }
    write_output(config, &csv)?;
    Ok(if pass { Outcome::Pass } else { Outcome::Fail })
}

// ---------------------------------------------------------------------------
// simulate

#[derive(Serialize)]
struct SimulationSummary<'a> {
    command: &'static str,
    config: &'a RunConfig,
    events: usize,
    final_positions: Vec<i64>,
    final_word: String,
}

pub fn simulate(config: &RunConfig) -> Result<Outcome, String> {
    let initial = config.initial_configuration()?;
    let trajectory = process::simulate(&initial, config.t_max, &config.float_params(), config.seed)
        .map_err(|e| e.to_string())?;
    let csv = process::trajectory_csv(&trajectory);
    let summary = SimulationSummary {
        command: "simulate",
        config,
        events: trajectory.events.len(),
        final_positions: trajectory.final_config.positions().to_vec(),
        final_word: trajectory.final_config.word().to_string(),
    };
    match &config.out {
        Some(path) => {
            std::fs::write(path, &csv)
                .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            print!("{}", to_json(&summary));
        }
        None => print!("{csv}"),
    }
    Ok(Outcome::Pass)
}

// ---------------------------------------------------------------------------
// master-compare

#[derive(Serialize)]
struct MasterReport<'a> {
    command: &'static str,
    config: &'a RunConfig,
    states: usize,
    generator_entries: usize,
    generators_equal: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    first_difference: Option<String>,
    elimination_orders_equal: bool,
    tv_distance: f64,
    tv_tolerance: f64,
    ode_leaked_mass: f64,
    mc_leaked_mass: f64,
    pass: bool,
}

pub fn master_compare(
    config: &RunConfig,
    dist_out: Option<&std::path::Path>,
) -> Result<Outcome, String> {
    if config.n > 3 {
        return Err(format!(
            "master-compare supports up to three particles, got n = {}",
            config.n
        ));
    }
    let window = config.window;
    let states = master::state_space(config.species, config.n, window);

    let mut oracle = ResolutionOracle::new(config.params.clone(), DEFAULT_ORACLE_CAP);
    let rules = master::build_generator_from_rules(states.clone(), window, &config.params, &mut oracle)
        .map_err(|e| e.to_string())?;
    let forward = master::build_generator_bethe(
        states.clone(),
        window,
        &config.params,
        EliminationOrder::Forward,
    )
    .map_err(|e| e.to_string())?;
    let backward = master::build_generator_bethe(
        states,
        window,
        &config.params,
        EliminationOrder::Backward,
    )
    .map_err(|e| e.to_string())?;

    let first_difference = rules.difference(&forward);
    let generators_equal = first_difference.is_none();
    let elimination_orders_equal = forward.difference(&backward).is_none();

    // forward-integrate the initial sector and compare with sampling
    let initial = config.initial_configuration()?;
    let sector_states = master::sector_state_space(config.species, initial.word(), window);
    let mut sector_oracle = ResolutionOracle::new(config.params.clone(), DEFAULT_ORACLE_CAP);
    let sector_gen = master::build_generator_from_rules(
        sector_states,
        window,
        &config.params,
        &mut sector_oracle,
    )
    .map_err(|e| e.to_string())?
    .to_float();
    let start = DistributionGrid::point_mass(&sector_gen, &initial).map_err(|e| e.to_string())?;
    let ode = master::integrate(&sector_gen, &start, config.t_max, sector_gen.stable_step())
        .map_err(|e| e.to_string())?;
    let mc = master::monte_carlo_distribution(
        &sector_gen,
        &initial,
        config.t_max,
        &config.float_params(),
        config.trials,
        config.seed,
    )
    .map_err(|e| e.to_string())?;
    let tv = master::total_variation(&ode, &mc);

    if let Some(path) = dist_out {
        std::fs::write(path, master::distribution_csv(&sector_gen, &ode))
            .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }

    let pass = generators_equal && elimination_orders_equal && tv < config.tolerance;
    let report = MasterReport {
        command: "master-compare",
        config,
        states: rules.states().len(),
        generator_entries: rules.entry_count(),
        generators_equal,
        first_difference,
        elimination_orders_equal,
        tv_distance: tv,
        tv_tolerance: config.tolerance,
        ode_leaked_mass: ode.leaked,
        mc_leaked_mass: mc.leaked,
        pass,
    };
    write_output(config, &to_json(&report))?;
    Ok(if pass { Outcome::Pass } else { Outcome::Fail })
}
