mod common;

use std::collections::BTreeSet;
use std::f64::consts::PI;

use cbtc_sim::cbtc::run_cbtc;
use cbtc_sim::network::{connected_components, max_power_graph, NodeId};
use cbtc_sim::optimizations::{optimize, OptStack, RemovalThreshold};
use common::*;

const ALPHAS: [f64; 3] = [PI / 2.0, 2.0 * PI / 3.0, 5.0 * PI / 6.0];
const INSTANCES: u64 = 500;

#[test]
fn max_power_graph_matches_enumeration() {
    for i in 0..50 {
        let t = instance(i);
        assert_eq!(
            undirected(&max_power_graph(&t)),
            brute_max_power(&t),
            "instance {i}"
        );
    }
}

#[test]
fn union_find_matches_bfs() {
    for i in 0..100 {
        let t = instance(i);
        let e = run_cbtc(&t, 5.0 * PI / 6.0).unwrap().e_alpha;
        assert_eq!(
            connected_components(&e).unwrap(),
            components_of(&t, &e),
            "instance {i}"
        );
    }
}

/// Every stage of every stack keeps the components of `G_R`.
#[test]
fn all_stages_preserve_components() {
    let mut checked = 0;
    for i in 0..INSTANCES {
        let t = instance(i);
        let want = gr_components(&t);
        for alpha in ALPHAS {
            let base = run_cbtc(&t, alpha).unwrap();
            assert_eq!(
                components_of(&t, &base.e_alpha),
                want,
                "E_alpha, instance {i}, alpha {alpha}"
            );
            let r = optimize(
                &t,
                base,
                OptStack::all_applicable(alpha),
                RemovalThreshold::PerNode,
            )
            .unwrap();
            let es = r.e_alpha_s.as_ref().unwrap();
            assert_eq!(
                components_of(&t, es),
                want,
                "E_alpha_s, instance {i}, alpha {alpha}"
            );
            if let Some(em) = &r.e_alpha_minus {
                assert_eq!(
                    components_of(&t, em),
                    want,
                    "E_alpha_minus, instance {i}, alpha {alpha}"
                );
            }
            let nr = r.e_alpha_nr.as_ref().unwrap();
            assert_eq!(
                components_of(&t, nr),
                want,
                "E_alpha_nr, instance {i}, alpha {alpha}"
            );
            checked += 1;
        }
    }
    assert_eq!(checked, 3 * INSTANCES);
}

#[test]
fn global_threshold_preserves_components() {
    for i in 0..100 {
        let t = instance(i);
        let want = gr_components(&t);
        for alpha in ALPHAS {
            let base = run_cbtc(&t, alpha).unwrap();
            let r = optimize(
                &t,
                base,
                OptStack::all_applicable(alpha),
                RemovalThreshold::Global,
            )
            .unwrap();
            assert_eq!(
                components_of(&t, r.final_edges()),
                want,
                "instance {i}, alpha {alpha}"
            );
        }
    }
}

/// A dropped max-power edge is bridged by strictly shorter kept edges.
#[test]
fn dropped_edges_have_shorter_detours() {
    for i in 0..100 {
        let t = instance(i);
        let e = run_cbtc(&t, 5.0 * PI / 6.0).unwrap().e_alpha;
        for (u, v) in brute_max_power(&t) {
            if !e.contains(u, v) {
                let d = t.distance(u, v).unwrap();
                assert!(
                    reachable_below(&t, &e, u, v, d, false),
                    "instance {i}: ({u},{v})"
                );
            }
        }
    }
}

/// After pairwise removal every max-power edge is still bridged by edges no
/// longer than itself.
#[test]
fn pairwise_keeps_short_detours() {
    for i in 0..100 {
        let t = instance(i);
        for alpha in ALPHAS {
            let base = run_cbtc(&t, alpha).unwrap();
            let r = optimize(
                &t,
                base,
                OptStack::all_applicable(alpha),
                RemovalThreshold::PerNode,
            )
            .unwrap();
            let nr = r.final_edges();
            for (u, v) in brute_max_power(&t) {
                let d = t.distance(u, v).unwrap();
                assert!(
                    reachable_below(&t, nr, u, v, d, true),
                    "instance {i}, alpha {alpha}: ({u},{v})"
                );
            }
        }
    }
}

/// The asymmetric core is exactly the mutually discovered pairs.
#[test]
fn asymmetric_core_is_mutual_pairs() {
    for i in 0..100 {
        let t = instance(i);
        for stack in [OptStack::ASYMMETRIC, OptStack::SHRINK_ASYMMETRIC] {
            let base = run_cbtc(&t, 2.0 * PI / 3.0).unwrap();
            let r = optimize(&t, base, stack, RemovalThreshold::PerNode).unwrap();
            let directed = r.n_alpha_s.as_ref().unwrap_or(&r.base.n_alpha);
            let mut want = BTreeSet::new();
            for u in t.ids() {
                for v in t.ids() {
                    if u < v && directed.contains(u, v) && directed.contains(v, u) {
                        want.insert((u, v));
                    }
                }
            }
            assert_eq!(
                undirected(r.e_alpha_minus.as_ref().unwrap()),
                want,
                "instance {i}"
            );
        }
    }
}

/// Each stage only removes edges, and the closure of discovery is symmetric.
#[test]
fn stages_form_a_subset_chain() {
    for i in 0..100 {
        let t = instance(i);
        for alpha in ALPHAS {
            let base = run_cbtc(&t, alpha).unwrap();
            let gr = max_power_graph(&t);
            assert!(base.e_alpha.is_symmetric() && base.e_alpha.is_subset_of(&gr));
            let r = optimize(
                &t,
                base.clone(),
                OptStack::all_applicable(alpha),
                RemovalThreshold::PerNode,
            )
            .unwrap();
            let es = r.e_alpha_s.as_ref().unwrap();
            assert!(es.is_subset_of(&base.e_alpha));
            let before_nr = r.e_alpha_minus.as_ref().unwrap_or(es);
            assert!(before_nr.is_subset_of(es));
            assert!(r.final_edges().is_subset_of(before_nr));
            let degree =
                |e: &cbtc_sim::network::EdgeSet| t.ids().map(|u| e.degree(u)).sum::<usize>();
            assert!(degree(r.final_edges()) <= degree(es) && degree(es) <= degree(&base.e_alpha));
        }
    }
}

#[test]
fn no_pair_is_lost_by_symmetric_closure() {
    for i in 0..50 {
        let t = instance(i);
        let r = run_cbtc(&t, 5.0 * PI / 6.0).unwrap();
        for (u, v) in r.n_alpha.pairs() {
            assert!(r.e_alpha.contains(u, v) && r.e_alpha.contains(v, u));
        }
        let extra: Vec<(NodeId, NodeId)> = r
            .e_alpha
            .pairs()
            .filter(|&(u, v)| !r.n_alpha.contains(u, v) && !r.n_alpha.contains(v, u))
            .collect();
        assert!(extra.is_empty());
    }
}
