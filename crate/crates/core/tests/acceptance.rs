//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line with its measured quantity. Run with
//! `cargo test --test acceptance -- --nocapture` to see the lines.

use std::time::Instant;

use longswap::algebra::{Rational, Word, WordBasis, rat, to_f64};
use longswap::local_ops::verify_structure_lemmas;
use longswap::master::{
    DistributionGrid, EliminationOrder, ResolutionOracle, build_generator_bethe,
    build_generator_from_rules, integrate, monte_carlo_distribution, sector_state_space,
    state_space, total_variation,
};
use longswap::params::ModelParams;
use longswap::process::estimate_shift_rate;
use longswap::reduction::{
    binary_chain_report, chain, check_block_form, effective_shift_rate, eliminate_block,
    max_chain_depth, scalar_sector, sector_invertibility_scan, transition_coefficient,
    weight_sum,
};
use longswap::scattering::{SpectralPoint, sample_spectral_points, verify_ybe};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

fn random_mu(rng: &mut ChaCha12Rng, count: usize) -> Vec<Rational> {
    (0..count)
        .map(|_| {
            let d = rng.random_range(1..=12i64);
            rat(rng.random_range(0..=d), d)
        })
        .collect()
}

fn report(criterion: usize, label: &str, pass: bool, detail: &str, started: Instant) {
    let status = if pass { "PASS" } else { "FAIL" };
    println!(
        "criterion {criterion} [{label}] {status}: {detail} ({:.2}s)",
        started.elapsed().as_secs_f64()
    );
    assert!(pass, "criterion {criterion} failed: {detail}");
}

#[test]
fn criterion_1_operator_lemma_suite() {
    let started = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(101);
    let mut draws = 0usize;
    let mut all_pass = true;
    for n_species in 1..=3usize {
        for _ in 0..7 {
            let params =
                ModelParams::new(random_mu(&mut rng, n_species), Rational::one()).unwrap();
            let suite = verify_structure_lemmas(&params);
            if !suite.all_pass() {
                all_pass = false;
                for failure in suite.failures() {
                    eprintln!("  {}: {:?}", failure.name, failure.detail);
                }
            }
            draws += 1;
        }
    }
    report(
        1,
        "operator-lemmas",
        all_pass && draws >= 20,
        &format!("action tables, powers, product identity, closed inverse over {draws} draws"),
        started,
    );
}

#[test]
fn criterion_2_binary_regime() {
    let started = Instant::now();
    let mut checked = 0usize;
    let mut all_pass = true;
    for n_species in 1..=3u8 {
        for assignment in 0..(1u32 << n_species) {
            let mu: Vec<Rational> = (0..n_species)
                .map(|i| {
                    if assignment >> i & 1 == 1 {
                        Rational::one()
                    } else {
                        Rational::zero()
                    }
                })
                .collect();
            let params = ModelParams::new(mu, Rational::one()).unwrap();
            for n in 2..=4usize {
                let basis = WordBasis::full(n_species, n);
                let suite = binary_chain_report(&basis, &params);
                all_pass &= suite.all_pass();
                // every sector chain stays invertible
                for multiset in all_multisets(n_species, n) {
                    let scan = sector_invertibility_scan(&multiset, &params).unwrap();
                    all_pass &= scan.all_invertible();
                }
                checked += 1;
            }
        }
    }
    report(
        2,
        "binary-regime",
        all_pass,
        &format!("transfers square to zero, closed inverses hold, {checked} (weights, n) combinations"),
        started,
    );
}

fn all_multisets(species: u8, n: usize) -> Vec<Word> {
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
    let mut out = Vec::new();
    recurse(species, n, 1, &mut Vec::new(), &mut out);
    out
}

#[test]
fn criterion_3_sector_invertibility() {
    let started = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(303);
    let mut all_pass = true;

    // single-species sectors: scalar chain stays above its fixed point
    for n in 2..=5usize {
        for _ in 0..4 {
            let params = ModelParams::new(random_mu(&mut rng, 1), Rational::one()).unwrap();
            let scan = sector_invertibility_scan(&Word::new(vec![1u8; n]), &params).unwrap();
            all_pass &= scan.all_invertible();
            let scalars = scalar_sector(1, max_chain_depth(n, 1), &params).unwrap();
            all_pass &= scalars
                .ratios
                .iter()
                .all(|a| to_f64(a) >= scalars.fixed_point - 1e-12);
        }
    }

    // one-off sectors plus the block-form and scalar-action structure
    for n in 3..=5usize {
        for _ in 0..4 {
            let params = ModelParams::new(random_mu(&mut rng, 2), Rational::one()).unwrap();
            let mut word = vec![1u8; n];
            word[0] = 2;
            let scan = sector_invertibility_scan(&Word::new(word), &params).unwrap();
            all_pass &= scan.all_invertible();
            for k in 1..=max_chain_depth(n, 1) {
                let form = check_block_form(k, n, &params).unwrap();
                if !form.all_pass() {
                    all_pass = false;
                    for failure in form.failures() {
                        eprintln!("  block form n={n} k={k}: {}", failure.name);
                    }
                }
            }
        }
    }

    // all-distinct sectors up to five species
    for n in 2..=5usize {
        let params = ModelParams::new(random_mu(&mut rng, n), Rational::one()).unwrap();
        let multiset = Word::new((1..=n as u8).collect::<Vec<_>>());
        let scan = sector_invertibility_scan(&multiset, &params).unwrap();
        all_pass &= scan.all_invertible();
    }

    report(
        3,
        "sector-invertibility",
        all_pass,
        "uniform, one-off (with block structure), and all-distinct sectors up to five particles",
        started,
    );
}

#[test]
fn criterion_4_spectral_radius_bound() {
    let started = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(404);
    let basis = WordBasis::full(4, 4);
    let mut max_radius = 0.0f64;
    let mut all_pass = true;
    for _ in 0..100 {
        let mu: Vec<f64> = (0..4).map(|_| rng.random_range(1e-6..1.0 - 1e-6)).collect();
        let params = ModelParams::new(mu, 1.0).unwrap();
        let chain = chain::<f64>(&basis, max_chain_depth(4, 1), &params).unwrap();
        all_pass &= chain.fully_invertible();
        for radius in chain.transfer_radii().unwrap() {
            max_radius = max_radius.max(radius);
            all_pass &= radius < 1.0 - 1e-6;
        }
    }
    report(
        4,
        "spectral-radius",
        all_pass,
        &format!("100 draws at four species on four sites, max transfer radius {max_radius:.6}"),
        started,
    );
}

#[test]
fn criterion_5_yang_baxter() {
    let started = Instant::now();
    let configs: Vec<Vec<Rational>> = vec![
        vec![rat(1, 3), rat(1, 2), rat(4, 5)],
        vec![rat(0, 1), rat(1, 1), rat(1, 2)],
        vec![rat(1, 1), rat(1, 1), rat(1, 1)],
        vec![rat(0, 1), rat(0, 1), rat(0, 1)],
        vec![rat(1, 2), rat(1, 2), rat(1, 2)],
        vec![rat(1, 7), rat(2, 7), rat(5, 7)],
        vec![rat(0, 1), rat(1, 2), rat(1, 1)],
        vec![rat(1, 1), rat(0, 1), rat(1, 1)],
        vec![rat(2, 3), rat(1, 5), rat(1, 1)],
        vec![rat(1, 9), rat(8, 9), rat(3, 7)],
    ];
    let mut all_pass = true;
    let mut verified_points = 0usize;
    for (index, mu) in configs.iter().enumerate() {
        let params = ModelParams::new(mu.clone(), Rational::one()).unwrap();
        let (points, _rejected) = sample_spectral_points(&params, 50, 500 + index as u64);
        for point in &points {
            let check = verify_ybe(&params, point).unwrap();
            if !check.holds() {
                all_pass = false;
                eprintln!("  deviation {} at {point:?}", check.max_deviation);
            }
            verified_points += 1;
        }
    }
    // the spotlighted point from the worked example
    let params = ModelParams::new(configs[0].clone(), Rational::one()).unwrap();
    let point = SpectralPoint::new(rat(2, 1), rat(3, 1), rat(5, 1), &params).unwrap();
    all_pass &= verify_ybe(&params, &point).unwrap().holds();
    report(
        5,
        "yang-baxter",
        all_pass && verified_points >= 500,
        &format!("deviation exactly zero at {verified_points} sampled points over 10 weight vectors"),
        started,
    );
}

#[test]
fn criterion_6_rate_formulas() {
    let started = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(606);
    let mut all_pass = true;

    // displayed three-particle rates, exact
    for _ in 0..6 {
        let params = ModelParams::new(random_mu(&mut rng, 2), rat(4, 5)).unwrap();
        for species in 1..=2u8 {
            let mu = params.mu(species).clone();
            let alpha = mu.clone() * params.lambda(species);
            let word = Word::new(vec![species; 3]);
            let rate = transition_coefficient(&word, &word, &params).unwrap();
            all_pass &=
                rate == params.p().clone() * mu.clone() * mu / (Rational::one() - alpha);
        }
        let mixed = transition_coefficient(&Word::new([1, 2, 1]), &Word::new([1, 1, 2]), &params)
            .unwrap();
        all_pass &= mixed == params.p().clone() * params.mu(1).clone();
    }

    // closed form equals the elimination matrix element up to five particles,
    // both on the sector and on the full two-species space
    for _ in 0..4 {
        let params = ModelParams::new(random_mu(&mut rng, 2), Rational::one()).unwrap();
        for n in 2..=5usize {
            let word = Word::new(vec![1u8; n]);
            let closed = effective_shift_rate(n, 1, &params);
            all_pass &= transition_coefficient(&word, &word, &params).unwrap() == closed;
            let basis = WordBasis::full(2, n);
            let elimination = eliminate_block::<Rational>(&basis, n - 1, 1, &params).unwrap();
            let idx = basis.position(&word).unwrap();
            let entry = elimination.left_coeff[n - 2][(idx, idx)].clone();
            all_pass &= params.p().clone() * entry == closed;
        }
    }

    // context independence: the same three same-species encounters give the
    // same rate whether the block is pure, padded with stronger/weaker
    // bystanders, or closed off by a swap with a weaker particle
    let params = ModelParams::new(
        vec![rat(1, 2), rat(3, 7), rat(2, 5), rat(1, 5)],
        rat(9, 10),
    )
    .unwrap();
    let reference = params.p().clone()
        * params.mu(2).clone()
        * params.mu(2).clone()
        * params.mu(2).clone()
        / weight_sum(3, 2, &params);

    let pure = transition_coefficient(
        &Word::new([2, 2, 2, 2]),
        &Word::new([2, 2, 2, 2]),
        &params,
    )
    .unwrap();
    let padded = transition_coefficient(
        &Word::new([2, 4, 3, 2, 2, 2]),
        &Word::new([2, 2, 4, 3, 2, 2]),
        &params,
    )
    .unwrap();
    // swap-terminated variant: the mover settles on the weaker particle's
    // site and ejects it; positions are unchanged, the word rotates, and the
    // coefficient is the top right-hand elimination operator
    let source = Word::new([2, 2, 4, 3, 2, 2, 1]);
    let target = Word::new([1, 2, 4, 3, 2, 2, 2]);
    let sector = WordBasis::sector(4, &source.multiset());
    let elimination = eliminate_block::<Rational>(&sector, 6, 1, &params).unwrap();
    let closed_off = params.p().clone()
        * elimination.right_coeff[5][(
            sector.position(&target).unwrap(),
            sector.position(&source).unwrap(),
        )]
            .clone();

    all_pass &= pure == reference && padded == reference && closed_off == reference;
    report(
        6,
        "rate-formulas",
        all_pass,
        "displayed rates, closed form vs elimination through n=5, context independence",
        started,
    );
}

#[test]
fn criterion_7_simulator_vs_closed_form() {
    let started = Instant::now();
    let cases = [(2usize, 0.3f64, 0.3f64), (3, 0.5, 1.0 / 3.0), (4, 0.5, 0.25)];
    let mut all_pass = true;
    let mut details = Vec::new();
    for (index, (n, mu, target)) in cases.into_iter().enumerate() {
        let params = ModelParams::new(vec![mu], 1.0).unwrap();
        let estimate = estimate_shift_rate(n, 1, &params, 1_000_000, 700 + index as u64);
        let ok = estimate.brackets(target);
        all_pass &= ok;
        details.push(format!(
            "n={n}: {:.5} in [{:.5}, {:.5}] for {target:.5}",
            estimate.rate, estimate.ci_low, estimate.ci_high
        ));
    }
    report(
        7,
        "simulator-vs-closed-form",
        all_pass,
        &details.join("; "),
        started,
    );
}

#[test]
fn criterion_8_two_particle_reducibility() {
    let started = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(808);
    let mut all_pass = true;
    let mut compared = 0usize;

    for draw in 0..20 {
        let n_species = 1 + (draw % 3) as usize;
        let mu = random_mu(&mut rng, n_species);
        let p = {
            let d = rng.random_range(1..=10i64);
            rat(rng.random_range(0..=d), d)
        };
        let params = ModelParams::new(mu, p).unwrap();
        for n in 2..=3usize {
            let window = (0i64, (n + 3) as i64);
            let states = state_space(n_species as u8, n, window);
            let mut oracle = ResolutionOracle::new(params.clone(), 10_000);
            let rules =
                build_generator_from_rules(states.clone(), window, &params, &mut oracle).unwrap();
            let forward =
                build_generator_bethe(states.clone(), window, &params, EliminationOrder::Forward)
                    .unwrap();
            let backward =
                build_generator_bethe(states, window, &params, EliminationOrder::Backward)
                    .unwrap();
            if let Some(diff) = rules.difference(&forward) {
                all_pass = false;
                eprintln!("  rules vs elimination ({n_species} species, n={n}): {diff}");
            }
            if let Some(diff) = forward.difference(&backward) {
                all_pass = false;
                eprintln!("  elimination orders ({n_species} species, n={n}): {diff}");
            }
            compared += 1;
        }
    }

    // forward integration against one million sampled trajectories
    let params = ModelParams::new(vec![rat(3, 10), rat(7, 10)], rat(7, 10)).unwrap();
    let fparams = params.to_float();
    let window = (-9i64, 10i64);
    let initial = longswap::Configuration::new(vec![0, 1], Word::new([1, 2])).unwrap();
    let states = sector_state_space(2, initial.word(), window);
    let mut oracle = ResolutionOracle::new(params.clone(), 10_000);
    let generator = build_generator_from_rules(states, window, &params, &mut oracle)
        .unwrap()
        .to_float();
    let start = DistributionGrid::point_mass(&generator, &initial).unwrap();
    let ode = integrate(&generator, &start, 1.0, generator.stable_step()).unwrap();
    let mc = monte_carlo_distribution(&generator, &initial, 1.0, &fparams, 1_000_000, 881).unwrap();
    let tv = total_variation(&ode, &mc);
    all_pass &= tv < 0.01;
    all_pass &= ode.leaked < 1e-8;

    report(
        8,
        "two-particle-reducibility",
        all_pass,
        &format!(
            "{compared} generator pairs equal in both orders; total variation {tv:.5} < 0.01"
        ),
        started,
    );
}
