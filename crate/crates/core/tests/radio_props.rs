mod common;

use std::f64::consts::PI;

use cbtc_sim::cbtc::{run_cbtc, run_cbtc_with};
use cbtc_sim::exec::Execution;
use cbtc_sim::radio::RadioModel;
use common::*;
use proptest::prelude::*;

proptest! {
    #[test]
    fn power_and_distance_are_inverse(d in 0.0..500.0f64, n in 2.0..4.0f64) {
        let m = RadioModel { path_loss_exponent: n, ..RadioModel::default() };
        let p = m.power_for_distance(d).unwrap();
        prop_assert!((m.distance_for_power(p).unwrap() - d).abs() < 1e-9 * d.max(1.0));
        prop_assert!(m.reaches(p, d));
    }

    #[test]
    fn power_is_monotone_in_distance(a in 0.0..500.0f64, b in 0.0..500.0f64) {
        let m = RadioModel::default();
        let (pa, pb) = (m.power_for_distance(a).unwrap(), m.power_for_distance(b).unwrap());
        prop_assert_eq!(a <= b, pa <= pb);
    }

    #[test]
    fn first_reaching_power_is_within_one_step(d in 1e-3..500.0f64, g in 1.05..3.0f64) {
        let m = RadioModel { growth_factor: g, ..RadioModel::default() };
        let p = m.first_reaching_power(d).unwrap();
        let need = m.power_for_distance(d).unwrap();
        prop_assert!(m.reaches(p, d));
        prop_assert!(p / need < g + 1e-9);
    }
}

#[test]
fn full_range_needs_full_power() {
    let m = RadioModel::default();
    assert_eq!(m.power_for_distance(500.0).unwrap(), 1.0);
    assert_eq!(m.distance_for_power(1.0).unwrap(), 500.0);
    assert!(m.power_for_distance(-1.0).is_err());
    assert_eq!(m.first_reaching_power(500.000001), None);
}

#[test]
fn schedule_is_increasing_and_ends_at_max_power() {
    for m in [RadioModel::default(), RadioModel::experiment()] {
        let s = m.schedule();
        assert!(s.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(*s.last().unwrap(), m.max_power);
        assert!(s.len() <= m.max_iterations() + 1);
    }
}

/// With doubling, every neighbor is tagged with less than twice the power it needs.
#[test]
fn doubling_tags_are_two_approximations() {
    for i in 0..100 {
        let t = instance(i).with_model(RadioModel::default()).unwrap();
        let r = run_cbtc(&t, 5.0 * PI / 6.0).unwrap();
        for s in r.states.values() {
            for rec in &s.neighbors {
                assert!(
                    rec.power_tag / rec.required_power < 2.0 + 1e-9,
                    "instance {i}"
                );
                assert!(rec.power_tag >= rec.required_power * (1.0 - 1e-12));
            }
        }
    }
}

/// A smaller cone needs at least as much power and finds a superset of neighbors.
#[test]
fn power_is_monotone_in_alpha() {
    for i in 0..100 {
        let t = instance(i);
        let alphas = [PI / 3.0, PI / 2.0, 2.0 * PI / 3.0, 5.0 * PI / 6.0, PI];
        let runs: Vec<_> = alphas.iter().map(|&a| run_cbtc(&t, a).unwrap()).collect();
        for w in runs.windows(2) {
            let (small, large) = (&w[0], &w[1]);
            for u in t.ids() {
                assert!(
                    small.states[&u].power >= large.states[&u].power,
                    "instance {i} node {u}"
                );
            }
            assert!(large.n_alpha.is_subset_of(&small.n_alpha));
        }
    }
}

#[test]
fn parallel_and_sequential_discovery_agree() {
    for i in 0..20 {
        let t = instance(i);
        assert_eq!(
            run_cbtc_with(&t, 2.0 * PI / 3.0, Execution::Sequential).unwrap(),
            run_cbtc_with(&t, 2.0 * PI / 3.0, Execution::Parallel).unwrap()
        );
    }
}
