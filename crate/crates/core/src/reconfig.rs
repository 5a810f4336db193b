//! Discrete-event simulation of neighbor discovery beacons and the
//! reconfiguration rules (join / leave / aChange) under crashes, mobility,
//! message loss and duplication.
//!
//! Beacons are the only lossy traffic. A CBTC rerun triggered inside the
//! simulator is a synchronous Hello/Ack exchange evaluated on the current
//! geometry, with the same schedule and tolerances as [`crate::cbtc`].

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cbtc::{candidates_from, grow, DiscoveryState};
use crate::error::{Error, Result};
use crate::geometry::{
    angle_between, coverage_equal, coverage_set, has_alpha_gap, validate_alpha, Angle,
    DirectionSet, Point,
};
use crate::network::{Bounds, EdgeLabel, EdgeSet, Node, NodeId, Topology, MIN_SEPARATION};
use crate::optimizations::{
    optimize, pairwise_removal, OptStack, OptimizedResult, RemovalThreshold, ASYMMETRIC_LIMIT,
};
use crate::radio::RadioModel;

/// Which power boundary nodes beacon with once shrink-back has lowered their
/// discovery power.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BeaconPolicy {
    /// Boundary nodes beacon at `P`.
    #[default]
    Correct,
    /// Boundary nodes beacon at their shrunk power. Breaks reconnection.
    ShrunkPower,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ReconfigConfig {
    pub beacon_period: f64,
    /// Beacons missed before a leave is declared.
    pub miss_threshold: u32,
    pub achange_threshold_deg: f64,
    /// Loss probability outside loss windows.
    pub base_loss: f64,
    pub duplicate_probability: f64,
    /// Fairness bound: a link never drops more than this many beacons in a row.
    pub max_consecutive_drops: u32,
    pub seed: u64,
    pub policy: BeaconPolicy,
    pub threshold: RemovalThreshold,
}

impl Default for ReconfigConfig {
    fn default() -> Self {
        Self {
            beacon_period: 1.0,
            miss_threshold: 3,
            achange_threshold_deg: 0.5,
            base_loss: 0.0,
            duplicate_probability: 0.0,
            max_consecutive_drops: 2,
            seed: 0,
            policy: BeaconPolicy::Correct,
            threshold: RemovalThreshold::PerNode,
        }
    }
}

impl ReconfigConfig {
    /// `τ`: silence after which a neighbor is considered gone.
    pub fn tau(&self) -> f64 {
        self.miss_threshold as f64 * self.beacon_period
    }
}

/// An injected change. Timeline files are JSON arrays of these.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TimelineEvent {
    Fail {
        time: f64,
        node: NodeId,
    },
    Move {
        time: f64,
        node: NodeId,
        x: f64,
        y: f64,
    },
    Add {
        time: f64,
        node: NodeId,
        x: f64,
        y: f64,
    },
    /// Every beacon sent in `[time, until)` is dropped with `probability`.
    Loss {
        time: f64,
        until: f64,
        probability: f64,
    },
}

impl TimelineEvent {
    pub fn time(&self) -> f64 {
        match *self {
            TimelineEvent::Fail { time, .. }
            | TimelineEvent::Move { time, .. }
            | TimelineEvent::Add { time, .. }
            | TimelineEvent::Loss { time, .. } => time,
        }
    }

    fn subject(&self) -> NodeId {
        match *self {
            TimelineEvent::Fail { node, .. }
            | TimelineEvent::Move { node, .. }
            | TimelineEvent::Add { node, .. } => node,
            TimelineEvent::Loss { .. } => NodeId(u32::MAX),
        }
    }

    fn rank(&self) -> u8 {
        match self {
            TimelineEvent::Fail { .. } => 0,
            TimelineEvent::Move { .. } => 1,
            TimelineEvent::Add { .. } => 2,
            TimelineEvent::Loss { .. } => 3,
        }
    }
}

const BEACON_RANK: u8 = 4;

#[derive(Debug, Clone)]
enum Kind {
    Injected(TimelineEvent),
    BeaconDue,
}

#[derive(Debug, Clone)]
struct Queued {
    time: f64,
    subject: NodeId,
    rank: u8,
    order: u64,
    kind: Kind,
}

impl PartialEq for Queued {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Queued {}

impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Queued {
    fn cmp(&self, other: &Self) -> Ordering {
        self.time
            .total_cmp(&other.time)
            .then(self.subject.cmp(&other.subject))
            .then(self.rank.cmp(&other.rank))
            .then(self.order.cmp(&other.order))
    }
}

/// One line of the JSON-lines trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub time: f64,
    pub event: String,
    pub node: NodeId,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub peer: Option<NodeId>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub power: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    direction: Angle,
    distance: f64,
    tag: f64,
    last_heard: f64,
}

#[derive(Debug, Clone, PartialEq)]
struct NodeSim {
    alive: bool,
    pos: Point,
    table: BTreeMap<NodeId, Entry>,
    /// Current discovery power (after any pruning).
    power: f64,
    /// Ended its last growth at `P` with an α-gap.
    boundary: bool,
    seq: u64,
}

impl NodeSim {
    fn directions(&self) -> DirectionSet {
        self.table.values().map(|e| e.direction).collect()
    }

    fn rad_minus(&self) -> f64 {
        self.table.values().map(|e| e.distance).fold(0.0, f64::max)
    }
}

/// What a handler did to the node's state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Action {
    None,
    Added,
    Pruned { power: f64 },
    Rerun { start_power: f64, final_power: f64 },
}

pub struct Simulator {
    model: RadioModel,
    alpha: f64,
    stack: OptStack,
    cfg: ReconfigConfig,
    bounds: Bounds,
    nodes: BTreeMap<NodeId, NodeSim>,
    queue: BinaryHeap<Reverse<Queued>>,
    order: u64,
    rng: ChaCha8Rng,
    now: f64,
    loss_windows: Vec<(f64, f64, f64)>,
    consecutive_drops: BTreeMap<(NodeId, NodeId), u32>,
    last_seq: BTreeMap<(NodeId, NodeId), u64>,
    trace: Vec<TraceRecord>,
}

#[derive(Debug, Clone)]
pub struct ReconfigOutcome {
    pub trace: Vec<TraceRecord>,
    /// Live nodes at the horizon.
    pub final_topology: Topology,
    /// The regime's output edge set over the live nodes.
    pub final_edges: EdgeSet,
    /// Per-node discovery power at the horizon.
    pub power: BTreeMap<NodeId, f64>,
}

impl Simulator {
    /// Starts from the static pipeline's output on `initial`.
    pub fn new(
        initial: &Topology,
        alpha: f64,
        stack: OptStack,
        cfg: ReconfigConfig,
    ) -> Result<Self> {
        let alpha = validate_alpha(alpha)?;
        if stack.asymmetric && alpha > ASYMMETRIC_LIMIT + 1e-9 {
            return Err(Error::GuaranteeViolation {
                alpha,
                limit: ASYMMETRIC_LIMIT,
                what: "asymmetric edge removal",
            });
        }
        let r = crate::optimizations::run_pipeline(initial, alpha, stack, cfg.threshold)?;
        let directed = r.n_alpha_s.as_ref().unwrap_or(&r.base.n_alpha);
        let mut nodes = BTreeMap::new();
        for node in initial.nodes() {
            let s = &r.base.states[&node.id];
            let table = s
                .neighbors
                .iter()
                .filter(|rec| directed.contains(node.id, rec.peer))
                .map(|rec| {
                    (
                        rec.peer,
                        Entry {
                            direction: rec.direction,
                            distance: rec.distance,
                            tag: rec.power_tag,
                            last_heard: 0.0,
                        },
                    )
                })
                .collect();
            nodes.insert(
                node.id,
                NodeSim {
                    alive: true,
                    pos: node.pos,
                    table,
                    power: r.shrink_power[&node.id],
                    boundary: s.boundary,
                    seq: 0,
                },
            );
        }
        let mut sim = Self {
            model: *initial.model(),
            alpha,
            stack,
            cfg,
            bounds: initial.bounds(),
            nodes,
            queue: BinaryHeap::new(),
            order: 0,
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            now: 0.0,
            loss_windows: Vec::new(),
            consecutive_drops: BTreeMap::new(),
            last_seq: BTreeMap::new(),
            trace: Vec::new(),
        };
        let ids: Vec<NodeId> = sim.nodes.keys().copied().collect();
        for id in ids {
            sim.schedule_first_beacon(id);
        }
        Ok(sim)
    }

    fn push(&mut self, time: f64, subject: NodeId, rank: u8, kind: Kind) {
        self.order += 1;
        self.queue.push(Reverse(Queued {
            time,
            subject,
            rank,
            order: self.order,
            kind,
        }));
    }

    fn schedule_first_beacon(&mut self, id: NodeId) {
        let phase = self.rng.random_range(0.0..self.cfg.beacon_period);
        self.push(self.now + phase, id, BEACON_RANK, Kind::BeaconDue);
    }

    fn log(
        &mut self,
        event: &str,
        node: NodeId,
        peer: Option<NodeId>,
        power: Option<f64>,
        detail: Option<String>,
    ) {
        self.trace.push(TraceRecord {
            time: self.now,
            event: event.to_string(),
            node,
            peer,
            power,
            detail,
        });
    }

    fn alive(&self, id: NodeId) -> bool {
        self.nodes.get(&id).is_some_and(|n| n.alive)
    }

    fn true_distance(&self, a: NodeId, b: NodeId) -> f64 {
        self.nodes[&a].pos.distance(&self.nodes[&b].pos)
    }

    /// Entries of `u` that the protocol can monitor through beacons. Under
    /// asymmetric removal a peer that never discovered `u` beacons too weakly
    /// to reach it, so such entries are not timed out.
    fn monitored(&self, u: NodeId, peer: NodeId) -> bool {
        if !self.stack.asymmetric {
            return true;
        }
        self.nodes
            .get(&peer)
            .is_some_and(|p| p.alive && p.table.contains_key(&u))
    }

    /// `rad` of `u`: farthest node that `u` discovered or that discovered `u`.
    fn rad(&self, u: NodeId) -> f64 {
        let own = self.nodes[&u].rad_minus();
        self.nodes
            .iter()
            .filter(|(&w, n)| w != u && n.alive)
            .filter_map(|(_, n)| n.table.get(&u).map(|e| e.distance))
            .fold(own, f64::max)
    }

    /// Beacon power of `u` under the regime and policy.
    pub fn beacon_power(&self, u: NodeId) -> f64 {
        let n = &self.nodes[&u];
        let m = &self.model;
        if n.boundary {
            return match self.cfg.policy {
                BeaconPolicy::Correct => m.max_power,
                BeaconPolicy::ShrunkPower => n.power,
            };
        }
        let r = if self.stack.asymmetric {
            n.rad_minus()
        } else {
            self.rad(u)
        };
        m.power_at(r.min(m.max_range))
    }

    fn may_prune(&self, u: NodeId) -> bool {
        !self.nodes[&u].boundary || self.stack.shrink_back
    }

    /// Drops the highest-tagged entries of `u` while the α-coverage is unchanged.
    fn prune(&mut self, u: NodeId) -> Action {
        if !self.may_prune(u) {
            return Action::None;
        }
        let alpha = self.alpha;
        let n = self.nodes.get_mut(&u).unwrap();
        if n.table.is_empty() {
            return Action::None;
        }
        let full = coverage_set(&n.directions(), alpha);
        let mut levels: Vec<f64> = n.table.values().map(|e| e.tag).collect();
        levels.sort_by(f64::total_cmp);
        levels.dedup();
        let level = levels
            .iter()
            .copied()
            .find(|&l| {
                let dirs: DirectionSet = n
                    .table
                    .values()
                    .filter(|e| e.tag <= l)
                    .map(|e| e.direction)
                    .collect();
                coverage_equal(&coverage_set(&dirs, alpha), &full)
            })
            .expect("the top level reproduces the full coverage");
        let before = n.table.len();
        n.table.retain(|_, e| e.tag <= level);
        let changed = n.table.len() != before || n.power != level;
        n.power = level;
        if changed {
            self.log("prune", u, None, Some(level), None);
            Action::Pruned { power: level }
        } else {
            Action::None
        }
    }

    /// Reruns the growing loop for `u` from `max(p(rad⁻), p0)` on the current
    /// geometry. Entries whose peers no longer answer are dropped.
    fn rerun(&mut self, u: NodeId, from_scratch: bool) -> Action {
        let m = self.model;
        let start = if from_scratch {
            m.initial_power
        } else {
            m.power_at(self.nodes[&u].rad_minus().min(m.max_range))
                .max(m.initial_power)
        };
        let origin = self.nodes[&u].pos;
        let others: Vec<(NodeId, Point)> = self
            .nodes
            .iter()
            .filter(|(&w, n)| w != u && n.alive)
            .map(|(&w, n)| (w, n.pos))
            .collect();
        let candidates = candidates_from(origin, others.into_iter(), m.max_range);
        let mut state = DiscoveryState {
            node: u,
            power: start,
            neighbors: Vec::new(),
            directions: DirectionSet::new(),
            boundary: false,
            rounds: 0,
        };
        grow(
            &m,
            self.alpha,
            &candidates,
            start,
            start >= m.max_power,
            &mut state,
        );
        let now = self.now;
        let n = self.nodes.get_mut(&u).unwrap();
        let old = std::mem::take(&mut n.table);
        for rec in state.neighbors {
            let tag = match old.get(&rec.peer) {
                Some(e) if m.reaches(e.tag, rec.distance) => e.tag.min(rec.power_tag),
                _ => rec.power_tag,
            };
            n.table.insert(
                rec.peer,
                Entry {
                    direction: rec.direction,
                    distance: rec.distance,
                    tag,
                    last_heard: now,
                },
            );
        }
        n.power = state.power;
        n.boundary = state.boundary;
        let detail = format!("neighbors={} boundary={}", n.table.len(), n.boundary);
        self.log("rerun", u, None, Some(state.power), Some(detail));
        if !state.boundary || self.stack.shrink_back {
            self.prune(u);
        }
        Action::Rerun {
            start_power: start,
            final_power: self.nodes[&u].power,
        }
    }

    /// After the table of `u` gained or changed entries: rerun on a gap,
    /// otherwise try to lower the power.
    fn settle(&mut self, u: NodeId) -> Action {
        let n = &self.nodes[&u];
        let gap = has_alpha_gap(&n.directions(), self.alpha);
        if gap && !n.boundary {
            return self.rerun(u, false);
        }
        if !gap {
            self.nodes.get_mut(&u).unwrap().boundary = false;
        }
        self.prune(u)
    }

    /// `leave_u(v)`: drop `v`; rerun from `p(rad⁻)` if that opens an α-gap.
    pub fn handle_leave(&mut self, u: NodeId, v: NodeId) -> Action {
        self.handle_leaves(u, &[v])
    }

    fn handle_leaves(&mut self, u: NodeId, gone: &[NodeId]) -> Action {
        let n = self.nodes.get_mut(&u).unwrap();
        let mut removed = Vec::new();
        for v in gone {
            if n.table.remove(v).is_some() {
                removed.push(*v);
            }
        }
        if removed.is_empty() {
            return Action::None;
        }
        for v in removed {
            self.log("leave", u, Some(v), None, None);
        }
        if has_alpha_gap(&self.nodes[&u].directions(), self.alpha) {
            self.rerun(u, false)
        } else {
            Action::None
        }
    }

    /// `join_u(v)`: record `v` at its current direction and distance, then prune.
    pub fn handle_join(&mut self, u: NodeId, v: NodeId) -> Action {
        if self.nodes[&u].table.contains_key(&v) || !self.alive(v) || u == v {
            return Action::None;
        }
        let d = self.true_distance(u, v);
        let Some(tag) = self.model.first_reaching_power(d) else {
            return Action::None;
        };
        let direction = angle_between(self.nodes[&u].pos, self.nodes[&v].pos)
            .expect("live nodes never coincide");
        let now = self.now;
        self.nodes.get_mut(&u).unwrap().table.insert(
            v,
            Entry {
                direction,
                distance: d,
                tag,
                last_heard: now,
            },
        );
        self.log("join", u, Some(v), Some(tag), None);
        match self.settle(u) {
            Action::None => Action::Added,
            a => a,
        }
    }

    /// `aChange_u(v)`: update the direction of `v`; rerun on a gap, else prune.
    pub fn handle_achange(&mut self, u: NodeId, v: NodeId, new_dir: Angle) -> Action {
        if !self.nodes[&u].table.contains_key(&v) {
            return self.handle_join(u, v);
        }
        let d = self.true_distance(u, v);
        let e = self.nodes.get_mut(&u).unwrap().table.get_mut(&v).unwrap();
        e.direction = new_dir;
        e.distance = d;
        self.log(
            "achange",
            u,
            Some(v),
            None,
            Some(format!("{:.4}", new_dir.radians())),
        );
        self.settle(u)
    }

    fn loss_probability(&self) -> f64 {
        self.loss_windows
            .iter()
            .filter(|&&(from, until, _)| from <= self.now && self.now < until)
            .map(|&(_, _, p)| p)
            .fold(self.cfg.base_loss, f64::max)
    }

    fn beacon(&mut self, u: NodeId) {
        if !self.alive(u) {
            return;
        }
        let tau = self.cfg.tau();
        let now = self.now;
        let expired: Vec<NodeId> = self.nodes[&u]
            .table
            .iter()
            .filter(|(&v, e)| now - e.last_heard > tau && self.monitored(u, v))
            .map(|(&v, _)| v)
            .collect();
        if !expired.is_empty() {
            self.handle_leaves(u, &expired);
        }

        let power = self.beacon_power(u);
        let seq = {
            let n = self.nodes.get_mut(&u).unwrap();
            n.seq += 1;
            n.seq
        };
        let loss = self.loss_probability();
        let receivers: Vec<NodeId> = self
            .nodes
            .iter()
            .filter(|(&v, n)| v != u && n.alive)
            .map(|(&v, _)| v)
            .filter(|&v| self.model.reaches(power, self.true_distance(u, v)))
            .collect();
        let (mut delivered, mut dropped) = (0, 0);
        for v in receivers {
            let streak = self.consecutive_drops.entry((u, v)).or_insert(0);
            if *streak < self.cfg.max_consecutive_drops && loss > 0.0 && self.rng.random_bool(loss)
            {
                *streak += 1;
                dropped += 1;
                continue;
            }
            *streak = 0;
            delivered += 1;
            self.deliver(v, u, seq);
            if self.cfg.duplicate_probability > 0.0
                && self.rng.random_bool(self.cfg.duplicate_probability)
            {
                self.deliver(v, u, seq);
            }
        }
        self.log(
            "beacon",
            u,
            None,
            Some(power),
            Some(format!("delivered={delivered} dropped={dropped}")),
        );
        self.push(
            now + self.cfg.beacon_period,
            u,
            BEACON_RANK,
            Kind::BeaconDue,
        );
    }

    /// Beacon `seq` from `u` arrives at `v`.
    fn deliver(&mut self, v: NodeId, u: NodeId, seq: u64) {
        let last = self.last_seq.entry((v, u)).or_insert(0);
        if seq <= *last {
            self.log("duplicate", v, Some(u), None, Some(format!("seq={seq}")));
            return;
        }
        *last = seq;
        if !self.nodes[&v].table.contains_key(&u) {
            self.handle_join(v, u);
            return;
        }
        let now = self.now;
        let dir = angle_between(self.nodes[&v].pos, self.nodes[&u].pos)
            .expect("live nodes never coincide");
        let d = self.true_distance(v, u);
        let threshold = self.cfg.achange_threshold_deg.to_radians();
        let e = self.nodes.get_mut(&v).unwrap().table.get_mut(&u).unwrap();
        e.last_heard = now;
        if e.direction.distance(dir) > threshold {
            self.handle_achange(v, u, dir);
        } else {
            e.distance = d;
        }
    }

    fn check_position(&self, node: NodeId, p: Point) -> Result<()> {
        if !self.bounds.contains(p) {
            return Err(Error::Domain(format!(
                "node {node} placed outside the bounds"
            )));
        }
        for (&w, n) in &self.nodes {
            if w != node && n.alive && n.pos.distance(&p) < MIN_SEPARATION {
                return Err(Error::DegenerateGeometry(format!(
                    "node {node} would coincide with {w}"
                )));
            }
        }
        Ok(())
    }

    fn apply(&mut self, e: TimelineEvent) -> Result<()> {
        match e {
            TimelineEvent::Fail { node, .. } => {
                let n = self
                    .nodes
                    .get_mut(&node)
                    .filter(|n| n.alive)
                    .ok_or_else(|| Error::Domain(format!("fail of unknown or dead node {node}")))?;
                n.alive = false;
                n.table.clear();
                self.log("fail", node, None, None, None);
            }
            TimelineEvent::Move { node, x, y, .. } => {
                if !self.alive(node) {
                    return Err(Error::Domain(format!(
                        "move of unknown or dead node {node}"
                    )));
                }
                let p = Point::new(x, y);
                self.check_position(node, p)?;
                self.nodes.get_mut(&node).unwrap().pos = p;
                self.log("move", node, None, None, Some(format!("{x:.3},{y:.3}")));
            }
            TimelineEvent::Add { node, x, y, .. } => {
                if self.nodes.contains_key(&node) {
                    return Err(Error::Domain(format!("node {node} already exists")));
                }
                let p = Point::new(x, y);
                self.check_position(node, p)?;
                self.nodes.insert(
                    node,
                    NodeSim {
                        alive: true,
                        pos: p,
                        table: BTreeMap::new(),
                        power: self.model.initial_power,
                        boundary: false,
                        seq: 0,
                    },
                );
                self.log("add", node, None, None, Some(format!("{x:.3},{y:.3}")));
                self.rerun(node, true);
                self.schedule_first_beacon(node);
            }
            TimelineEvent::Loss {
                until, probability, ..
            } => {
                if !(0.0..=1.0).contains(&probability) {
                    return Err(Error::Domain(format!("loss probability {probability}")));
                }
                self.loss_windows.push((self.now, until, probability));
            }
        }
        Ok(())
    }

    /// Processes every event up to and including `horizon`.
    pub fn run_until(&mut self, horizon: f64) -> Result<()> {
        while let Some(Reverse(q)) = self.queue.peek() {
            if q.time > horizon {
                break;
            }
            let Reverse(q) = self.queue.pop().unwrap();
            self.now = q.time;
            match q.kind {
                Kind::Injected(e) => self.apply(e)?,
                Kind::BeaconDue => self.beacon(q.subject),
            }
        }
        self.now = horizon;
        Ok(())
    }

    pub fn inject(&mut self, events: &[TimelineEvent]) {
        for e in events {
            self.push(e.time(), e.subject(), e.rank(), Kind::Injected(e.clone()));
        }
    }

    pub fn trace(&self) -> &[TraceRecord] {
        &self.trace
    }

    pub fn power(&self, u: NodeId) -> Option<f64> {
        self.nodes.get(&u).filter(|n| n.alive).map(|n| n.power)
    }

    pub fn is_boundary(&self, u: NodeId) -> Option<bool> {
        self.nodes.get(&u).filter(|n| n.alive).map(|n| n.boundary)
    }

    pub fn neighbors(&self, u: NodeId) -> Vec<NodeId> {
        self.nodes
            .get(&u)
            .map(|n| n.table.keys().copied().collect())
            .unwrap_or_default()
    }

    pub fn now(&self) -> f64 {
        self.now
    }

    /// Live nodes at their current positions.
    pub fn topology(&self) -> Result<Topology> {
        let nodes = self
            .nodes
            .iter()
            .filter(|(_, n)| n.alive)
            .map(|(&id, n)| Node { id, pos: n.pos })
            .collect();
        Topology::new(self.bounds, self.model, nodes)
    }

    /// The regime's edge set over the current tables.
    pub fn edge_set(&self) -> Result<EdgeSet> {
        let t = self.topology()?;
        let live: BTreeSet<NodeId> = t.ids().collect();
        let pairs = self
            .nodes
            .iter()
            .filter(|(u, _)| live.contains(u))
            .flat_map(|(&u, n)| n.table.keys().map(move |&v| (u, v)))
            .filter(|(_, v)| live.contains(v));
        let directed = EdgeSet::directed(EdgeLabel::NAlpha, live.iter().copied(), pairs);
        let sym = if self.stack.asymmetric {
            directed.symmetric_core(EdgeLabel::EAlphaMinus)
        } else if self.stack.shrink_back {
            directed.symmetric_closure(EdgeLabel::EAlphaShrunk)
        } else {
            directed.symmetric_closure(EdgeLabel::EAlpha)
        };
        if self.stack.pairwise {
            Ok(pairwise_removal(&t, &sym, self.cfg.threshold)?.e_alpha_nr)
        } else {
            Ok(sym)
        }
    }
}

/// Static beacon power of `u` for a pipeline result: `P` for boundary nodes,
/// `p(rad⁻)` under asymmetric removal, otherwise the power reaching every
/// neighbor of the pre-pairwise symmetric set.
pub fn beacon_power_for(u: NodeId, stack: OptStack, r: &OptimizedResult) -> Result<f64> {
    if stack != r.stack {
        return Err(Error::ContractViolation(format!(
            "regime {stack} does not match result computed with {}",
            r.stack
        )));
    }
    let s = r
        .base
        .states
        .get(&u)
        .ok_or_else(|| Error::Domain(format!("unknown node {u}")))?;
    let m = &r.base.model;
    if s.boundary {
        return Ok(m.max_power);
    }
    let length = |v: NodeId| r.base.length(u, v).unwrap_or(0.0);
    let radius = if stack.asymmetric {
        let directed = r.n_alpha_s.as_ref().unwrap_or(&r.base.n_alpha);
        directed.neighbors(u).map(length).fold(0.0, f64::max)
    } else {
        let sym = r.e_alpha_s.as_ref().unwrap_or(&r.base.e_alpha);
        sym.neighbors(u).map(length).fold(0.0, f64::max)
    };
    Ok(m.power_at(radius))
}

/// Runs `timeline` on `initial` and reports the state at `horizon`.
pub fn run_reconfig_sim(
    initial: &Topology,
    alpha: f64,
    stack: OptStack,
    timeline: &[TimelineEvent],
    horizon: f64,
    cfg: ReconfigConfig,
) -> Result<ReconfigOutcome> {
    let last = timeline
        .iter()
        .map(|e| match *e {
            TimelineEvent::Loss { until, .. } => until,
            _ => e.time(),
        })
        .fold(0.0, f64::max);
    if horizon < last + cfg.tau() {
        return Err(Error::InconclusiveStabilization(format!(
            "horizon {horizon} leaves less than {} after the last change at {last}",
            cfg.tau()
        )));
    }
    let mut sim = Simulator::new(initial, alpha, stack, cfg)?;
    sim.inject(timeline);
    sim.run_until(horizon)?;
    let final_topology = sim.topology()?;
    let final_edges = sim.edge_set()?;
    let power = final_topology
        .ids()
        .map(|u| (u, sim.nodes[&u].power))
        .collect();
    Ok(ReconfigOutcome {
        trace: sim.trace,
        final_topology,
        final_edges,
        power,
    })
}

pub fn write_trace_jsonl<W: Write>(trace: &[TraceRecord], mut out: W) -> Result<()> {
    for r in trace {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_timeline(json: &str) -> Result<Vec<TimelineEvent>> {
    Ok(serde_json::from_str(json)?)
}

/// Output edge set of the static pipeline, for comparison with a quiescent run.
pub fn static_edges(
    t: &Topology,
    alpha: f64,
    stack: OptStack,
    threshold: RemovalThreshold,
) -> Result<EdgeSet> {
    let base = crate::cbtc::run_cbtc(t, alpha)?;
    Ok(optimize(t, base, stack, threshold)?.final_edges().clone())
}

/// A seeded mix of `changes` crashes, moves and additions spaced `spacing`
/// apart from `start`, plus one loss window. At least half the nodes survive.
pub fn random_timeline(
    seed: u64,
    t: &Topology,
    changes: usize,
    start: f64,
    spacing: f64,
) -> Vec<TimelineEvent> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7469_6d65_6c69_6e65);
    let b = t.bounds();
    let mut alive: Vec<NodeId> = t.ids().collect();
    let floor = alive.len().div_ceil(2);
    let mut next_id = alive.iter().map(|n| n.0).max().map_or(0, |m| m + 1);
    let mut out = Vec::new();
    let loss_at = start + rng.random_range(0.0..(changes as f64 * spacing).max(spacing));
    out.push(TimelineEvent::Loss {
        time: loss_at,
        until: loss_at + 4.0 * spacing,
        probability: 0.3,
    });
    for k in 0..changes {
        let time = start + k as f64 * spacing + rng.random_range(0.0..spacing / 2.0);
        let point = |rng: &mut ChaCha8Rng| {
            (
                rng.random_range(0.0..b.width),
                rng.random_range(0.0..b.height),
            )
        };
        match rng.random_range(0..3) {
            0 if alive.len() > floor => {
                let i = rng.random_range(0..alive.len());
                out.push(TimelineEvent::Fail {
                    time,
                    node: alive.remove(i),
                });
            }
            1 if !alive.is_empty() => {
                let node = alive[rng.random_range(0..alive.len())];
                let (x, y) = point(&mut rng);
                out.push(TimelineEvent::Move { time, node, x, y });
            }
            _ => {
                let node = NodeId(next_id);
                next_id += 1;
                let (x, y) = point(&mut rng);
                alive.push(node);
                out.push(TimelineEvent::Add { time, node, x, y });
            }
        }
    }
    out.sort_by(|a, b| a.time().total_cmp(&b.time()));
    out
}

/// Two three-node clusters 1200 apart that later drift to 300 apart. Every
/// node is a boundary node whose shrunk power reaches only its own cluster.
pub fn partition_scenario(move_at: f64) -> Result<(Topology, Vec<TimelineEvent>)> {
    let model = RadioModel::default();
    let cluster = |x0: f64| {
        [
            Point::new(x0, 200.0),
            Point::new(x0 + 40.0, 200.0),
            Point::new(x0 + 20.0, 235.0),
        ]
    };
    let mut pts = cluster(50.0).to_vec();
    pts.extend(cluster(1290.0));
    let nodes = pts
        .iter()
        .enumerate()
        .map(|(i, &pos)| Node {
            id: NodeId(i as u32),
            pos,
        })
        .collect();
    let t = Topology::new(Bounds::new(1400.0, 400.0), model, nodes)?;
    let shift = 1290.0 - 390.0;
    let timeline = (3..6)
        .map(|i| {
            let p = pts[i];
            TimelineEvent::Move {
                time: move_at,
                node: NodeId(i as u32),
                x: p.x - shift,
                y: p.y,
            }
        })
        .collect();
    Ok((t, timeline))
}
