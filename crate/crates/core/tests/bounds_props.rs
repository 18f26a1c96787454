mod common;

use common::{random_grid, random_truth, stats_from_truth};
use decoy_akg::bounds::{
    aggregate, b_j_max, lp_oracle_b1_max, lp_oracle_by_vertices, lp_oracle_q1_min, ma_b12_upper,
};
use decoy_akg::channel::{alpha_of_distance, model_stats, ChannelParams};
use decoy_akg::expansion::{ExpansionTable, IntensityGrid};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn closed_forms_equal_linear_programs() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for k in 1..=4 {
        for _ in 0..40 {
            let grid = random_grid(&mut rng, k, 0.05);
            let table = ExpansionTable::new(&grid).unwrap();
            let stats = stats_from_truth(&grid, &random_truth(&mut rng, k));
            let agg = aggregate(&stats, &grid, &table).unwrap();
            let q = lp_oracle_q1_min(&stats, &grid, &table).unwrap();
            let b = lp_oracle_b1_max(&stats, &grid, &table).unwrap();
            assert!((agg.q1_min - q).abs() < 1e-8, "k={k}: {} vs {q}", agg.q1_min);
            assert!((agg.b1_max - b).abs() < 1e-8, "k={k}: {} vs {b}", agg.b1_max);
            if k <= 2 {
                let (qv, bv) = lp_oracle_by_vertices(&stats, &grid, &table).unwrap();
                assert!((qv - q).abs() < 1e-8 && (bv - b).abs() < 1e-8);
            }
        }
    }
}

#[test]
fn bounds_are_sound_on_synthetic_truth() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for k in 1..=5 {
        for _ in 0..50 {
            let grid = random_grid(&mut rng, k, 0.05);
            let table = ExpansionTable::new(&grid).unwrap();
            let truth = random_truth(&mut rng, k);
            let stats = stats_from_truth(&grid, &truth);
            let agg = aggregate(&stats, &grid, &table).unwrap();
            assert!(agg.q1_min <= truth.q[1] + 1e-10);
            assert!(agg.b1_max >= truth.b[0] - 1e-10);
        }
    }
}

#[test]
fn more_intensities_never_loosen_the_bounds() {
    let params = ChannelParams::paper();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..50 {
        let full = random_grid(&mut rng, 5, 0.05);
        let alpha = alpha_of_distance(rand::Rng::random_range(&mut rng, 0.0..250.0), &params).unwrap();
        let mut prev: Option<(f64, f64)> = None;
        for k in 1..=5 {
            let grid = IntensityGrid::new(full.mus()[..k].to_vec()).unwrap();
            let table = ExpansionTable::new(&grid).unwrap();
            let stats = model_stats(&grid, alpha, &params).unwrap();
            let agg = aggregate(&stats, &grid, &table).unwrap();
            if let Some((q, b)) = prev {
                assert!(agg.q1_min_raw >= q);
                assert!(agg.b1_max_raw <= b);
            }
            prev = Some((agg.q1_min_raw, agg.b1_max_raw));
        }
    }
}

#[test]
fn two_order_error_bound_beats_two_intensity_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let grid = random_grid(&mut rng, 2, 0.05);
        let table = ExpansionTable::new(&grid).unwrap();
        let mut truth = random_truth(&mut rng, 2);
        truth.p_dark = 0.0;
        let stats = stats_from_truth(&grid, &truth);
        let b12 = b_j_max(1, &stats, &grid, &table)
            .unwrap()
            .min(b_j_max(2, &stats, &grid, &table).unwrap());
        let ma = ma_b12_upper(&stats, &grid).unwrap();
        assert!(b12 <= ma + 1e-12, "{b12} vs {ma}");
    }
}
