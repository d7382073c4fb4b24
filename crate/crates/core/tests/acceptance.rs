//! Acceptance gate: one test per release criterion. Each test states its
//! claim, pins its tolerance, and fails with the measured deviation.

use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wconc::elements::{
    charge_detect, hadamard, parity_gate, pbs, phase_correct, ChargeOutcome, ParityOutcome,
    ParityPorts, PbsPorts,
};
use wconc::oracle::{
    conservation_imbalance, enumerate_tree, sample_coefficients, success_state_check, OutcomeNode,
    PathStep, StepEvent,
};
use wconc::protocols::{
    ecp1_run, ecp1_step1_prob, ecp1_step2_prob, ecp1_total_prob, ecp2_run, p_step1_round,
    p_step2_round, recoeff_step1_failure, IterationSchedule, Protocol,
};
use wconc::state::{
    make_single_electron, make_w_state, mode, tensor, Configuration, QuantumState, Spin,
    WCoefficients,
};

fn assert_within(actual: f64, expected: f64, tol: f64, what: &str) {
    let delta = (actual - expected).abs();
    assert!(
        delta <= tol,
        "{what}: expected {expected}, got {actual} (|delta| = {delta:.3e} > {tol:.1e})"
    );
}

/// Criterion 1: the elements-level single-pass simulation reproduces the
/// closed-form step and total probabilities on 50 seeded triples within
/// 1e-10, in under a second.
#[test]
fn criterion_01_single_pass_simulation_matches_closed_forms() {
    let started = Instant::now();
    for c in sample_coefficients(101, 50) {
        let report = ecp1_run(&c).unwrap();
        assert_within(
            report.sum_step1,
            ecp1_step1_prob(&c).unwrap(),
            1e-10,
            "step-1 probability",
        );
        assert_within(
            report.sum_step2,
            ecp1_step2_prob(&c).unwrap(),
            1e-10,
            "step-2 probability",
        );
        assert_within(
            report.p_total,
            ecp1_total_prob(&c).unwrap(),
            1e-10,
            "total probability",
        );
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 1.0,
        "50 simulated runs took {elapsed:?}, budget is 1 s"
    );
}

/// Criterion 2: at the symmetric point the single pass yields exactly
/// half/half/quarter probabilities and the balanced final state.
#[test]
fn criterion_02_symmetric_point_is_exact() {
    let report = ecp1_run(&WCoefficients::symmetric()).unwrap();
    assert_within(report.sum_step1, 0.5, 1e-12, "step-1 probability");
    assert_within(report.sum_step2, 0.5, 1e-12, "step-2 probability");
    assert_within(report.p_total, 0.25, 1e-12, "total probability");
    let target = make_w_state(
        &WCoefficients::symmetric(),
        [mode("d1"), mode("b1"), mode("e1")],
    )
    .unwrap();
    let final_state = report.final_state.expect("a successful run keeps a state");
    assert!(
        final_state.equiv_up_to_phase(&target, 1e-12),
        "final state is not the balanced three-party state:\n{}",
        final_state.render()
    );
}

/// Criterion 3: the 200-point sweep at fixed beta-squared 1/3 has the
/// iterated protocol dominating everywhere, both curves peaking at the
/// grid points nearest alpha-squared 1/3, and the iterated total equal to
/// 49/64 at the symmetric point.
#[test]
fn criterion_03_sweep_reproduces_the_total_probability_curves() {
    let beta_sq = 1.0 / 3.0;
    let upper = 1.0 - beta_sq;
    let points = 200usize;
    let sched = IterationSchedule::new(3, 3, 1e-12).unwrap();

    let mut grid = Vec::with_capacity(points);
    for i in 0..points {
        let alpha_sq = upper * (i as f64 + 0.5) / points as f64;
        let c = WCoefficients::from_squares(alpha_sq, beta_sq).unwrap();
        let p1 = ecp1_run(&c).unwrap().p_total;
        let p2 = ecp2_run(&c, &sched).unwrap().p_total;
        grid.push((alpha_sq, p1, p2));
    }

    for &(alpha_sq, p1, p2) in &grid {
        assert!(
            p2 >= p1 - 1e-12,
            "iterated protocol loses at alpha_sq = {alpha_sq}: {p2} < {p1}"
        );
    }

    // the midpoint grid straddles 1/3 symmetrically, so "nearest" may be a
    // two-way tie; the maximum must land on one of the tied points
    let best_distance = grid
        .iter()
        .map(|(a, _, _)| (a - 1.0 / 3.0).abs())
        .fold(f64::INFINITY, f64::min);
    let nearest: Vec<usize> = (0..points)
        .filter(|&i| (grid[i].0 - 1.0 / 3.0).abs() <= best_distance + 1e-15)
        .collect();
    let argmax_by = |pick: fn(&(f64, f64, f64)) -> f64| {
        (0..points)
            .max_by(|&i, &j| pick(&grid[i]).total_cmp(&pick(&grid[j])))
            .unwrap()
    };
    let best1 = argmax_by(|row| row.1);
    let best2 = argmax_by(|row| row.2);
    assert!(
        nearest.contains(&best1),
        "single-pass curve peaks at index {best1} (alpha_sq = {}), not at the grid points nearest 1/3 {nearest:?}",
        grid[best1].0
    );
    assert!(
        nearest.contains(&best2),
        "iterated curve peaks at index {best2} (alpha_sq = {}), not at the grid points nearest 1/3 {nearest:?}",
        grid[best2].0
    );

    let symmetric = ecp2_run(&WCoefficients::symmetric(), &sched).unwrap();
    assert_within(
        symmetric.p_total,
        49.0 / 64.0,
        1e-12,
        "iterated total at the symmetric point",
    );
}

const TREE_SEED: u64 = 2024;
const TREE_TRIPLES: usize = 20;

fn criterion_tree_schedule() -> IterationSchedule {
    IterationSchedule::new(6, 6, 1e-12).unwrap()
}

/// Criterion 4: the failure-recursion reading reproduces the printed
/// round-two and round-three closed forms, and the enumerated trees match
/// the round series for all rounds up to six on 20 random triples.
#[test]
fn criterion_04_round_series_match_the_enumerated_trees() {
    let sched = criterion_tree_schedule();
    for c in sample_coefficients(TREE_SEED, TREE_TRIPLES) {
        let (a, b, g) = (c.alpha(), c.beta(), c.gamma());

        // reference forms for rounds two and three, written out in full
        let printed_round2 = a.powi(4) * (b.powi(2) * g.powi(2) + 2.0 * b.powi(4))
            / ((a.powi(4) + b.powi(4)) * (a.powi(2) + b.powi(2)));
        let printed_round3 = a.powi(8) * (b.powi(6) * g.powi(2) + 2.0 * b.powi(8))
            / ((a.powi(8) + b.powi(8)) * (a.powi(4) + b.powi(4)) * (a.powi(2) + b.powi(2)));
        assert_within(
            p_step1_round(&c, 2).unwrap(),
            printed_round2,
            1e-12,
            "second-round closed form",
        );
        assert_within(
            p_step1_round(&c, 3).unwrap(),
            printed_round3,
            1e-12,
            "third-round closed form",
        );
        // the same numbers reached by explicitly composing one failure
        // recursion with the single-round forms
        let once_failed = recoeff_step1_failure(&c).unwrap();
        let composed =
            (1.0 - ecp1_step1_prob(&c).unwrap()) * ecp1_step1_prob(&once_failed).unwrap();
        assert_within(
            composed,
            printed_round2,
            1e-12,
            "recursion composed with the single-round form",
        );

        let root = enumerate_tree(&c, Protocol::Ecp2, &sched).unwrap();
        let mut sum1 = 0.0;
        for n in 1..=6 {
            let mass = root.round_mass(1, n);
            sum1 += mass;
            assert_within(
                mass,
                p_step1_round(&c, n).unwrap(),
                1e-10,
                &format!("step-1 round {n} mass"),
            );
        }
        for m in 1..=6 {
            assert_within(
                root.round_mass(2, m) / sum1,
                p_step2_round(&c, m).unwrap(),
                1e-10,
                &format!("step-2 round {m} mass"),
            );
        }
        assert!(
            success_state_check(&root),
            "a success leaf deviates from the balanced state"
        );
    }
}

/// Criterion 5: probability is conserved at every node of the criterion-4
/// trees within 1e-12.
#[test]
fn criterion_05_probability_is_conserved_at_every_tree_node() {
    let sched = criterion_tree_schedule();
    for c in sample_coefficients(TREE_SEED, TREE_TRIPLES) {
        for protocol in [Protocol::Ecp1, Protocol::Ecp2] {
            let root = enumerate_tree(&c, protocol, &sched).unwrap();
            let worst = conservation_imbalance(&root);
            assert!(
                worst <= 1e-12,
                "{protocol} tree leaks probability: worst node imbalance {worst:.3e}"
            );
        }
    }
}

/// Criterion 6: after n = 1..5 failed step-1 rounds the kept state's
/// second and third coefficients still stand in the input ratio
/// beta/gamma, which is what licenses summing the two round series
/// independently.
#[test]
fn criterion_06_failure_rounds_preserve_the_coefficient_ratio() {
    let sched = IterationSchedule::new(6, 1, 1e-12).unwrap();
    for c in near_symmetric_coefficients(606, 10) {
        let expected_ratio = c.beta() / c.gamma();
        let root = enumerate_tree(&c, Protocol::Ecp2, &sched).unwrap();
        for n in 1..=5usize {
            let kept = PathStep {
                step: 1,
                round: n + 1,
                event: StepEvent::Parity(ParityOutcome::Even),
            };
            let mut seen = 0usize;
            root.walk(&mut |node: &OutcomeNode| {
                if node.path.last() != Some(&kept) {
                    return;
                }
                seen += 1;
                let beta_like = down_amplitude(&node.state, "d1").norm();
                let gamma_like = down_amplitude(&node.state, "c1").norm();
                assert!(
                    gamma_like > 0.0,
                    "kept state lost its third-coefficient term"
                );
                let ratio = beta_like / gamma_like;
                assert_within(
                    ratio,
                    expected_ratio,
                    1e-12,
                    &format!("coefficient ratio after {n} failed rounds"),
                );
            });
            assert_eq!(
                seen,
                1 << n,
                "expected one kept node per spin history after {n} failures"
            );
        }
    }
}

/// Seeded triples close to the symmetric point. Five failure rounds square
/// the coefficient skew each time, so far-from-symmetric inputs drive the
/// smaller components of the kept state beneath the amplitude floor where
/// their ratio can no longer be read off; near-symmetric inputs keep every
/// component representable for all checked rounds.
fn near_symmetric_coefficients(seed: u64, count: usize) -> Vec<WCoefficients> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let squares: Vec<f64> = (0..3)
                .map(|_| 1.0 / 3.0 + rng.gen_range(-0.12..0.12))
                .collect();
            let total: f64 = squares.iter().sum();
            WCoefficients::from_squares(squares[0] / total, squares[1] / total).unwrap()
        })
        .collect()
}

fn down_amplitude(state: &QuantumState, rail: &str) -> Complex64 {
    let m = mode(rail);
    for (cfg, amp) in state.terms() {
        if cfg.spin_in(&m) == Some(Spin::Down) {
            return amp;
        }
    }
    Complex64::new(0.0, 0.0)
}

/// Criterion 7: twenty rounds per step at the symmetric point push the
/// total success probability within 1e-5 of one.
#[test]
fn criterion_07_deep_iteration_recovers_near_unit_probability() {
    let sched = IterationSchedule::new(20, 20, 0.0).unwrap();
    let report = ecp2_run(&WCoefficients::symmetric(), &sched).unwrap();
    assert!(
        report.p_total >= 1.0 - 1e-5,
        "total probability {} falls short of 1 - 1e-5",
        report.p_total
    );
}

/// Criterion 8: the element identities -- rotations and phase flips square
/// to the identity, the down-branch phase corrections map the flipped
/// states onto the kept ones, and the parity gate's even probability
/// agrees with the interferometer-plus-detector reading on random product
/// states.
#[test]
fn criterion_08_element_identities_hold() {
    let mut rng = ChaCha8Rng::seed_from_u64(808);

    // identities on random product states
    for _ in 0..20 {
        let state = random_product_state(&mut rng);
        let twice_h = hadamard(&hadamard(&state, &mode("p")).unwrap(), &mode("p")).unwrap();
        assert!(
            twice_h.approx_eq(&state, 1e-15),
            "rotation does not square to identity"
        );
        let twice_z =
            phase_correct(&phase_correct(&state, &mode("q")).unwrap(), &mode("q")).unwrap();
        assert!(
            twice_z.approx_eq(&state, 0.0),
            "phase flip does not square to identity"
        );
    }

    // the step-1 down-branch state maps onto the kept state under a phase
    // flip of the first output rail
    let c = WCoefficients::from_squares(0.5, 1.0 / 3.0).unwrap();
    let norm = (c.gamma_sq() + 2.0 * c.beta_sq()).sqrt();
    let kept_step1 = three_party_state(
        ("d1", "b1", "c1"),
        [c.beta() / norm, c.beta() / norm, c.gamma() / norm],
    );
    let flipped_step1 = three_party_state(
        ("d1", "b1", "c1"),
        [-c.beta() / norm, c.beta() / norm, c.gamma() / norm],
    );
    let corrected = phase_correct(&flipped_step1, &mode("d1")).unwrap();
    assert!(
        corrected.equiv_up_to_phase(&kept_step1, 1e-12),
        "step-1 phase correction misses the kept state"
    );

    // the step-2 down-branch state maps onto the balanced state under a
    // phase flip of the last output rail
    let third = 3f64.sqrt().recip();
    let balanced = three_party_state(("d1", "b1", "e1"), [third, third, third]);
    let flipped_step2 = three_party_state(("d1", "b1", "e1"), [third, third, -third]);
    let corrected = phase_correct(&flipped_step2, &mode("e1")).unwrap();
    assert!(
        corrected.equiv_up_to_phase(&balanced, 1e-12),
        "step-2 phase correction misses the balanced state"
    );

    // parity-even probability equals the interferometer's kept-branch
    // probability on random product states
    for _ in 0..20 {
        let state = random_product_state(&mut rng);
        let parity = parity_gate(
            &state,
            &ParityPorts::new(mode("p"), mode("q"), mode("o1"), mode("o2")).unwrap(),
        )
        .unwrap();
        let even = parity
            .iter()
            .find(|b| b.label == ParityOutcome::Even)
            .map_or(0.0, |b| b.probability);
        let mixed = pbs(
            &state,
            &PbsPorts::new(mode("p"), mode("q"), mode("o1"), mode("o2")).unwrap(),
        );
        let one = charge_detect(&mixed, &[mode("o1")])
            .iter()
            .find(|b| b.label == ChargeOutcome::ExactlyOne)
            .map_or(0.0, |b| b.probability);
        assert_within(even, one, 1e-12, "kept-branch probability");
    }
}

/// A random two-electron product state on rails p and q with real
/// amplitudes bounded away from the poles.
fn random_product_state(rng: &mut ChaCha8Rng) -> QuantumState {
    let angle = |r: &mut ChaCha8Rng| r.gen_range(0.1..std::f64::consts::FRAC_PI_2 - 0.1);
    let (t, s) = (angle(rng), angle(rng));
    let re = |x: f64| Complex64::new(x, 0.0);
    let a = make_single_electron(re(t.cos()), re(t.sin()), mode("p")).unwrap();
    let b = make_single_electron(re(s.cos()), re(s.sin()), mode("q")).unwrap();
    tensor(&a, &b).unwrap()
}

/// A three-party single-excitation state with the given real amplitudes on
/// the down-at-first, down-at-second, down-at-third terms.
fn three_party_state(rails: (&str, &str, &str), amps: [f64; 3]) -> QuantumState {
    let (r0, r1, r2) = rails;
    let term = |spins: [Spin; 3]| {
        Configuration::new(vec![
            (mode(r0), spins[0]),
            (mode(r1), spins[1]),
            (mode(r2), spins[2]),
        ])
        .unwrap()
    };
    let re = |x: f64| Complex64::new(x, 0.0);
    QuantumState::from_terms(vec![
        (term([Spin::Down, Spin::Up, Spin::Up]), re(amps[0])),
        (term([Spin::Up, Spin::Down, Spin::Up]), re(amps[1])),
        (term([Spin::Up, Spin::Up, Spin::Down]), re(amps[2])),
    ])
    .unwrap()
}
