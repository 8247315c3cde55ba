//! Acceptance suite: one test per criterion, each printing a pass line with
//! the measured numbers (visible with `--nocapture`).

use std::time::Instant;

use rand::rngs::SmallRng;
use rand::{Rng, SeedableRng};

use qrepsim_cli::options::Metric;
use qrepsim_cli::svg::svg_string;
use qrepsim_core::bell::{
    apply_error_channel, purify_states, purify_success_probability_paper, swap_states,
    BellDiagonalState, BellLabel, ErrorProbability,
};
use qrepsim_core::engine::{
    noisy_purify, run_connection, NetworkConfig, NodeProfile, PairRecord, PolicyConfig,
};
use qrepsim_core::experiment::{csv_string, run_sweep, Preset, ResultRow, SettingGrid};
use qrepsim_core::ledger::ResourceLedger;

fn random_state(rng: &mut SmallRng) -> BellDiagonalState {
    let raw: [f64; 4] = [
        rng.gen_range(1e-6..1.0),
        rng.gen_range(1e-6..1.0),
        rng.gen_range(1e-6..1.0),
        rng.gen_range(1e-6..1.0),
    ];
    let sum: f64 = raw.iter().sum();
    BellDiagonalState::new([raw[0] / sum, raw[1] / sum, raw[2] / sum, raw[3] / sum]).unwrap()
}

/// Criterion 1: starting from the pure target, the memory channel at
/// p = 1e-4 first pushes fidelity below 0.5 at step 8240 ± 1, in under a
/// second.
#[test]
fn criterion_1_channel_half_life() {
    let started = Instant::now();
    let p = ErrorProbability::new(1e-4).unwrap();
    let mut state = BellDiagonalState::pure_target();
    let mut step = 0u32;
    while state.fidelity() >= 0.5 {
        state = apply_error_channel(state, p);
        step += 1;
        assert!(step < 20_000, "decay must cross 0.5");
    }
    let elapsed = started.elapsed();
    assert!(
        (8239..=8241).contains(&step),
        "fidelity first fell below 0.5 at step {step}, expected 8240 ± 1"
    );
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    println!("criterion 1 (channel half-life): PASS — step {step}, {elapsed:?}");
}

/// Criterion 2: swap and purify compositions match independent 16-term
/// brute-force enumerations on 10⁴ random state pairs to 1e-12, in under
/// five seconds.
#[test]
fn criterion_2_table_oracle_equivalence() {
    // Independent oracles over explicit (input1, input2, output) rows.
    const SWAP_ROWS: [(usize, usize, usize); 16] = [
        (0, 0, 0),
        (0, 1, 1),
        (0, 3, 3),
        (0, 2, 2),
        (1, 0, 1),
        (1, 1, 0),
        (1, 3, 2),
        (1, 2, 3),
        (3, 0, 3),
        (3, 1, 2),
        (3, 3, 0),
        (3, 2, 1),
        (2, 0, 2),
        (2, 1, 3),
        (2, 3, 1),
        (2, 2, 0),
    ];
    const PURIFY_SURVIVORS: [(usize, usize, usize); 8] = [
        (0, 0, 0),
        (0, 2, 2),
        (1, 1, 1),
        (1, 3, 3),
        (3, 1, 3),
        (3, 3, 1),
        (2, 0, 2),
        (2, 2, 0),
    ];

    let started = Instant::now();
    let mut rng = SmallRng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let s1 = random_state(&mut rng);
        let s2 = random_state(&mut rng);
        let a = s1.components();
        let b = s2.components();

        let mut swap_expected = [0.0; 4];
        for (i, j, k) in SWAP_ROWS {
            swap_expected[k] += a[i] * b[j];
        }
        let swapped = swap_states(s1, s2).components();
        for i in 0..4 {
            worst = worst.max((swapped[i] - swap_expected[i]).abs());
        }

        let mut purify_expected = [0.0; 4];
        let mut mass = 0.0;
        for (i, j, k) in PURIFY_SURVIVORS {
            let w = a[i] * b[j];
            purify_expected[k] += w;
            mass += w;
        }
        for c in &mut purify_expected {
            *c /= mass;
        }
        let (purified, got_mass) = purify_states(s1, s2).unwrap();
        worst = worst.max((got_mass - mass).abs());
        let purified = purified.components();
        for i in 0..4 {
            worst = worst.max((purified[i] - purify_expected[i]).abs());
        }
    }
    let elapsed = started.elapsed();
    assert!(worst <= 1e-12, "max abs error {worst:e}");
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
    println!(
        "criterion 2 (table-oracle equivalence): PASS — max abs error {worst:.2e} over 10^4 pairs, {elapsed:?}"
    );
}

/// Criterion 3: the two success rules agree on 100 Werner ⊗ Werner inputs
/// to 1e-12 and split exactly as documented on the asymmetric witness.
#[test]
fn criterion_3_werner_agreement() {
    let mut rng = SmallRng::seed_from_u64(3);
    for _ in 0..100 {
        let w1 = BellDiagonalState::werner(rng.gen_range(0.26..1.0)).unwrap();
        let w2 = BellDiagonalState::werner(rng.gen_range(0.26..1.0)).unwrap();
        let (_, table_mass) = purify_states(w1, w2).unwrap();
        let formula = purify_success_probability_paper(w1, w2);
        assert!(
            (table_mass - formula).abs() <= 1e-12,
            "rules disagree on Werner inputs: {table_mass} vs {formula}"
        );
    }

    let witness = BellDiagonalState::new([0.8, 0.0, 0.0, 0.2]).unwrap();
    let formula = purify_success_probability_paper(witness, witness);
    let (_, table_mass) = purify_states(witness, witness).unwrap();
    assert!((formula - 1.0).abs() <= 1e-12, "formula rule gave {formula}");
    assert!((table_mass - 0.68).abs() <= 1e-12, "table rule gave {table_mass}");
    println!(
        "criterion 3 (Werner agreement): PASS — rules agree on Werner inputs; witness splits 1.00 vs 0.68"
    );
}

/// Criterion 4: noiseless symmetric pumping of Werner(F) for
/// F in {0.55, …, 0.95} strictly increases fidelity every round until the
/// fixed point.
#[test]
fn criterion_4_purification_gain() {
    let config = NetworkConfig::new(2, NodeProfile::PERFECT, NodeProfile::PERFECT);
    let policy = PolicyConfig::new(0.9, None);
    for step in 0..=8 {
        let f = 0.55 + 0.05 * f64::from(step);
        let mut pair = PairRecord {
            state: BellDiagonalState::werner(f).unwrap(),
            left: 0,
            right: 1,
            ledger: ResourceLedger::ZERO,
        };
        let mut rounds = 0;
        loop {
            let next = noisy_purify(pair.clone(), pair.clone(), &config, &policy).unwrap();
            let gain = next.fidelity() - pair.fidelity();
            if gain <= 1e-12 {
                // Numerical fixed point; it must be the good one.
                assert!(
                    next.fidelity() > 0.999_999,
                    "pump from F = {f} stalled at {}",
                    next.fidelity()
                );
                break;
            }
            assert!(
                gain > 0.0,
                "fidelity fell at round {rounds} from F = {f}: {} -> {}",
                pair.fidelity(),
                next.fidelity()
            );
            pair = next;
            rounds += 1;
            assert!(rounds < 200, "pump from F = {f} did not converge");
        }
    }
    println!(
        "criterion 4 (purification gain): PASS — strict gain to the fixed point for F = 0.55..0.95"
    );
}

fn field_identical_except_l3(a: &ResultRow, b: &ResultRow) -> bool {
    a.preset == b.preset
        && a.l2 == b.l2
        && a.l4 == b.l4
        && a.n_nodes == b.n_nodes
        && a.end_time == b.end_time
        && a.intermediate_time == b.intermediate_time
        && a.total_time == b.total_time
        && a.delivered_fidelity == b.delivered_fidelity
        && a.broken == b.broken
        && a.l2_purifications == b.l2_purifications
        && a.l3_purifications == b.l3_purifications
        && a.l4_purifications == b.l4_purifications
}

/// Criterion 5: wherever an l3 = 0.900 sweep reports zero internetworking
/// purifications its rows equal the l3 = None rows; with well-purified
/// links (l2 = 0.999) under preset b, the trigger count is zero for every
/// n ≤ 100.
#[test]
fn criterion_5_policy_equivalence() {
    let mut zero_trigger_rows = 0usize;
    for &l2 in &[0.90, 0.99, 0.999] {
        let low = run_sweep(Preset::B, &SettingGrid::single(l2, Some(0.9), 0.99, 3, 100));
        let none = run_sweep(Preset::B, &SettingGrid::single(l2, None, 0.99, 3, 100));
        assert_eq!(low.len(), none.len());
        for (low_row, none_row) in low.iter().zip(&none) {
            if l2 == 0.999 {
                assert_eq!(
                    low_row.l3_purifications, 0,
                    "l3 purification triggered at n = {} under preset b, l2 = 0.999",
                    low_row.n_nodes
                );
            }
            if low_row.l3_purifications == 0 {
                assert!(
                    field_identical_except_l3(low_row, none_row),
                    "zero-trigger row diverges from l3 = None at n = {} under l2 = {l2}",
                    low_row.n_nodes
                );
                zero_trigger_rows += 1;
            }
        }
    }
    assert!(zero_trigger_rows >= 98, "the equivalence must actually bite");
    println!(
        "criterion 5 (policy equivalence): PASS — {zero_trigger_rows} zero-trigger rows field-identical; \
no triggers at l2 = 0.999 for n ≤ 100"
    );
}

/// Criterion 6: with (l2 0.999, l3 0.990, l4 0.990), preset a first breaks
/// in [20, 45] and preset b in [45, 90], with preset b lasting longer, all
/// inside ten seconds.
#[test]
fn criterion_6_break_distance() {
    let started = Instant::now();
    let grid_a = SettingGrid::single(0.999, Some(0.99), 0.99, 3, 50);
    let first_break_a = run_sweep(Preset::A, &grid_a)
        .iter()
        .find(|r| r.broken)
        .map(|r| r.n_nodes)
        .expect("preset a must break by n = 50");
    let grid_b = SettingGrid::single(0.999, Some(0.99), 0.99, 3, 95);
    let first_break_b = run_sweep(Preset::B, &grid_b)
        .iter()
        .find(|r| r.broken)
        .map(|r| r.n_nodes)
        .expect("preset b must break by n = 95");
    let elapsed = started.elapsed();

    assert!(
        (20..=45).contains(&first_break_a),
        "preset a first break at {first_break_a}, expected within [20, 45]"
    );
    assert!(
        (45..=90).contains(&first_break_b),
        "preset b first break at {first_break_b}, expected within [45, 90]"
    );
    assert!(first_break_b > first_break_a);
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
    println!(
        "criterion 6 (break distance): PASS — preset a breaks at {first_break_a}, preset b at {first_break_b}, {elapsed:?}"
    );
}

/// Criterion 7: under preset b at n = 64, the end-to-end policy loads the
/// intermediate nodes no more than the l3 = 0.999 policy when the latter
/// is unbroken.
#[test]
fn criterion_7_end_to_end_efficiency_ordering() {
    let none = &run_sweep(Preset::B, &SettingGrid::single(0.999, None, 0.99, 64, 64))[0];
    let with_l3 = &run_sweep(
        Preset::B,
        &SettingGrid::single(0.999, Some(0.999), 0.99, 64, 64),
    )[0];
    assert!(!none.broken, "the end-to-end policy must survive n = 64");
    if with_l3.broken {
        println!(
            "criterion 7 (efficiency ordering): PASS — (l2 0.999, l3 0.999) is broken at n = 64 \
(stalled at fidelity {:.6}), ordering holds vacuously",
            with_l3.delivered_fidelity
        );
        return;
    }
    assert!(
        none.intermediate_time <= with_l3.intermediate_time,
        "end-to-end policy must not load intermediate nodes more: {} vs {}",
        none.intermediate_time,
        with_l3.intermediate_time
    );
    println!(
        "criterion 7 (efficiency ordering): PASS — intermediate occupancy {:.4e} ≤ {:.4e}",
        none.intermediate_time, with_l3.intermediate_time
    );
}

/// Criterion 8: normalization drifts at most 1e-9 across a full 256-node
/// run, and CSV/SVG outputs are byte-deterministic.
#[test]
fn criterion_8_normalization_and_byte_determinism() {
    // Preset d sustains the end-to-end policy through 256 nodes.
    let config = NetworkConfig::new(
        256,
        Preset::D.end_profile(),
        Preset::D.intermediate_profile(),
    );
    let policy = PolicyConfig::new(0.999, None);
    let result = run_connection(&config, &policy).unwrap();
    assert!(!result.broken, "preset d end-to-end run must survive n = 256");
    let drift = result.final_state.normalization_error();
    assert!(drift <= 1e-9, "normalization drift {drift:e}");
    // The state is an honest probability vector throughout.
    for label in BellLabel::ALL {
        assert!(result.final_state.component(label) >= 0.0);
    }

    let grid = SettingGrid {
        l2_values: vec![0.999],
        l3_values: vec![None, Some(0.99)],
        min_nodes: 3,
        max_nodes: 40,
        ..SettingGrid::default()
    };
    let rows_first = run_sweep(Preset::B, &grid);
    let rows_second = run_sweep(Preset::B, &grid);
    let csv_first = csv_string(&rows_first).unwrap();
    let csv_second = csv_string(&rows_second).unwrap();
    assert_eq!(csv_first.as_bytes(), csv_second.as_bytes(), "CSV bytes differ");

    let svg_first = svg_string(&rows_first, Metric::Intermediate).unwrap();
    let svg_second = svg_string(&rows_second, Metric::Intermediate).unwrap();
    assert_eq!(svg_first.as_bytes(), svg_second.as_bytes(), "SVG bytes differ");

    println!(
        "criterion 8 (normalization and determinism): PASS — drift {drift:.2e} at n = 256; CSV and SVG byte-identical"
    );
}
