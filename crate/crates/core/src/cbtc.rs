//! The per-node CBTC(α) growing loop under the synchronous reliable model.
//!
//! A Hello broadcast at power `p` reaches exactly the nodes `v` with
//! `p(d(u,v)) <= p`, so each round of the loop is a set computation over the
//! topology. Every node runs independently; the per-node loops are mapped over
//! [`Execution`] and collected in id order.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::exec::Execution;
use crate::geometry::{angle_between, has_alpha_gap, validate_alpha, Angle, DirectionSet, Point};
use crate::network::{EdgeLabel, EdgeSet, NodeId, Topology};
use crate::radio::RadioModel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeighborRecord {
    pub peer: NodeId,
    pub direction: Angle,
    pub distance: f64,
    /// Broadcast power of the round that first discovered `peer`.
    pub power_tag: f64,
    /// True `p(d(u, peer))`.
    pub required_power: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscoveryState {
    pub node: NodeId,
    /// Final discovery power `p_{u,α}`.
    pub power: f64,
    /// `N_α(u)` in discovery order.
    pub neighbors: Vec<NeighborRecord>,
    pub directions: DirectionSet,
    /// Ended at maximum power with an α-gap remaining.
    pub boundary: bool,
    /// Number of Hello rounds broadcast.
    pub rounds: usize,
}

impl DiscoveryState {
    pub fn has_neighbor(&self, peer: NodeId) -> bool {
        self.neighbors.iter().any(|r| r.peer == peer)
    }

    /// `rad⁻`: distance to the farthest discovered neighbor (0 if none).
    pub fn farthest(&self) -> f64 {
        self.neighbors
            .iter()
            .map(|r| r.distance)
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Radii {
    /// Farthest neighbor in `N_α(u)`.
    pub rad_minus: f64,
    /// Farthest neighbor in `E_α`.
    pub rad: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CbtcResult {
    pub alpha: f64,
    pub model: RadioModel,
    pub states: BTreeMap<NodeId, DiscoveryState>,
    pub n_alpha: EdgeSet,
    pub e_alpha: EdgeSet,
    /// Nodes that discovered `u` without `u` discovering them.
    pub reverse_contacts: BTreeMap<NodeId, BTreeSet<NodeId>>,
    pub radii: BTreeMap<NodeId, Radii>,
    /// Edge lengths of every pair in `e_alpha`, keyed by `(min, max)` id.
    pub lengths: BTreeMap<(NodeId, NodeId), f64>,
}

impl CbtcResult {
    pub fn state(&self, u: NodeId) -> Option<&DiscoveryState> {
        self.states.get(&u)
    }

    pub fn length(&self, u: NodeId, v: NodeId) -> Option<f64> {
        self.lengths.get(&(u.min(v), u.max(v))).copied()
    }

    /// Assembles a result from per-node discovery states (`N_α` and everything
    /// derived from it).
    pub fn from_states(
        alpha: f64,
        model: RadioModel,
        states: BTreeMap<NodeId, DiscoveryState>,
    ) -> Self {
        let nodes: Vec<NodeId> = states.keys().copied().collect();
        let mut lengths = BTreeMap::new();
        let mut pairs = Vec::new();
        for s in states.values() {
            for r in &s.neighbors {
                pairs.push((s.node, r.peer));
                lengths.insert((s.node.min(r.peer), s.node.max(r.peer)), r.distance);
            }
        }
        let n_alpha = EdgeSet::directed(EdgeLabel::NAlpha, nodes.iter().copied(), pairs);
        let e_alpha = n_alpha.symmetric_closure(EdgeLabel::EAlpha);

        let mut reverse_contacts: BTreeMap<NodeId, BTreeSet<NodeId>> =
            nodes.iter().map(|&n| (n, BTreeSet::new())).collect();
        for (u, v) in n_alpha.pairs() {
            if !n_alpha.contains(v, u) {
                reverse_contacts.entry(v).or_default().insert(u);
            }
        }
        let radii = nodes
            .iter()
            .map(|&u| {
                let rad_minus = states[&u].farthest();
                let rad = e_alpha
                    .neighbors(u)
                    .map(|v| lengths[&(u.min(v), u.max(v))])
                    .fold(0.0, f64::max);
                (u, Radii { rad_minus, rad })
            })
            .collect();
        Self {
            alpha,
            model,
            states,
            n_alpha,
            e_alpha,
            reverse_contacts,
            radii,
            lengths,
        }
    }
}

/// A node a Hello may reach: id, direction and distance from the broadcaster.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Candidate {
    pub id: NodeId,
    pub direction: Angle,
    pub distance: f64,
}

pub(crate) fn candidates_from(
    origin: Point,
    others: impl Iterator<Item = (NodeId, Point)>,
    range: f64,
) -> Vec<Candidate> {
    let mut out: Vec<Candidate> = others
        .filter_map(|(id, p)| {
            let distance = origin.distance(&p);
            (distance <= range).then(|| Candidate {
                id,
                direction: angle_between(origin, p).expect("distinct node positions"),
                distance,
            })
        })
        .collect();
    out.sort_by(|a, b| a.distance.total_cmp(&b.distance).then(a.id.cmp(&b.id)));
    out
}

/// Runs the growing loop from `start_power`.
///
/// When `broadcast_at_start` is false the first Hello goes out at
/// `Increase(start_power)`, exactly as a fresh run from `p0`. Records already in
/// `state` are kept and never re-tagged. `candidates` must be sorted by distance.
pub(crate) fn grow(
    model: &RadioModel,
    alpha: f64,
    candidates: &[Candidate],
    start_power: f64,
    broadcast_at_start: bool,
    state: &mut DiscoveryState,
) {
    let known: BTreeSet<NodeId> = state.neighbors.iter().map(|r| r.peer).collect();
    let mut next = 0;
    let mut hello = |p: f64, state: &mut DiscoveryState| {
        state.rounds += 1;
        while next < candidates.len() && model.reaches(p, candidates[next].distance) {
            let c = candidates[next];
            next += 1;
            if known.contains(&c.id) {
                continue;
            }
            state.neighbors.push(NeighborRecord {
                peer: c.id,
                direction: c.direction,
                distance: c.distance,
                power_tag: p,
                required_power: model.power_at(c.distance),
            });
            state.directions.insert(c.direction);
        }
    };
    let mut p = start_power.min(model.max_power);
    if broadcast_at_start {
        hello(p, state);
    }
    while p < model.max_power && has_alpha_gap(&state.directions, alpha) {
        p = model.next_power(p);
        hello(p, state);
    }
    state.power = p;
    state.boundary = p >= model.max_power && has_alpha_gap(&state.directions, alpha);
}

fn discover(t: &Topology, idx: usize, alpha: f64) -> DiscoveryState {
    let model = t.model();
    let origin = t.pos_at(idx);
    let others = (0..t.len())
        .filter(|&j| j != idx)
        .map(|j| (t.id_at(j), t.pos_at(j)));
    let candidates = candidates_from(origin, others, model.max_range + 1.0);
    let mut state = DiscoveryState {
        node: t.id_at(idx),
        power: model.initial_power,
        neighbors: Vec::new(),
        directions: DirectionSet::new(),
        boundary: false,
        rounds: 0,
    };
    grow(
        model,
        alpha,
        &candidates,
        model.initial_power,
        false,
        &mut state,
    );
    state
}

/// CBTC(α) on every node of `t`.
pub fn run_cbtc(t: &Topology, alpha: f64) -> Result<CbtcResult> {
    run_cbtc_with(t, alpha, Execution::default())
}

pub fn run_cbtc_with(t: &Topology, alpha: f64, exec: Execution) -> Result<CbtcResult> {
    let alpha = validate_alpha(alpha)?;
    let states = exec.map(t.len(), |i| discover(t, i, alpha));
    let states = states.into_iter().map(|s| (s.node, s)).collect();
    Ok(CbtcResult::from_states(alpha, *t.model(), states))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use crate::network::{generate_random, Bounds};
    use std::f64::consts::PI;

    #[test]
    fn isolated_node_becomes_boundary_at_max_power() {
        let t = generate_random(1, 1, Bounds::new(10.0, 10.0), RadioModel::default()).unwrap();
        let r = run_cbtc(&t, 5.0 * PI / 6.0).unwrap();
        let s = &r.states[&NodeId(0)];
        assert!(s.boundary);
        assert_eq!(s.power, r.model.max_power);
        assert!(s.neighbors.is_empty());
        assert_eq!(r.n_alpha.pair_count(), 0);
    }

    #[test]
    fn pair_within_range_discovers_each_other() {
        let pts = [Point::new(0.0, 0.0), Point::new(300.0, 0.0)];
        let t = Topology::from_points(&pts, RadioModel::default(), 1.0).unwrap();
        let r = run_cbtc(&t, 5.0 * PI / 6.0).unwrap();
        assert!(r.n_alpha.contains(NodeId(0), NodeId(1)));
        assert!(r.n_alpha.contains(NodeId(1), NodeId(0)));
        // A single neighbor leaves a gap, so both climb to P.
        assert!(r.states.values().all(|s| s.boundary));
        assert_eq!(r.radii[&NodeId(0)].rad, 300.0);
    }

    #[test]
    fn surrounded_node_stops_early() {
        let mut pts = vec![Point::new(0.0, 0.0)];
        for k in 0..6 {
            pts.push(Point::new(0.0, 0.0).offset_polar(100.0, k as f64 * PI / 3.0));
        }
        let t = Topology::from_points(&pts, RadioModel::default(), 1.0).unwrap();
        let r = run_cbtc(&t, 2.0 * PI / 3.0).unwrap();
        let center = &r.states[&NodeId(0)];
        assert!(!center.boundary);
        assert_eq!(center.neighbors.len(), 6);
        assert!(center.power < 0.1);
        assert!(!has_alpha_gap(&center.directions, 2.0 * PI / 3.0));
    }

    #[test]
    fn rejects_invalid_alpha() {
        let t = generate_random(1, 3, Bounds::new(10.0, 10.0), RadioModel::default()).unwrap();
        assert!(run_cbtc(&t, 0.0).is_err());
        assert!(run_cbtc(&t, 10.0).is_err());
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let t =
            generate_random(11, 80, Bounds::new(1500.0, 1500.0), RadioModel::default()).unwrap();
        let a = run_cbtc_with(&t, 5.0 * PI / 6.0, Execution::Sequential).unwrap();
        let b = run_cbtc_with(&t, 5.0 * PI / 6.0, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }
}
