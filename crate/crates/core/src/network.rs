//! Node placement, the max-power graph `G_R`, labeled edge sets, edge IDs and
//! connected components.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::radio::RadioModel;

/// Generated nodes are never closer than this.
pub const MIN_SEPARATION: f64 = 1e-6;

const MAX_PLACEMENT_ATTEMPTS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub width: f64,
    pub height: f64,
}

impl Bounds {
    pub fn new(width: f64, height: f64) -> Self {
        Self { width, height }
    }

    pub fn contains(&self, p: Point) -> bool {
        (0.0..=self.width).contains(&p.x) && (0.0..=self.height).contains(&p.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    pub pos: Point,
}

/// Immutable placement of nodes in a rectangle, with the radio model that
/// induces `G_R`. Nodes are kept sorted by id; algorithms address them by that
/// position ("index").
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    bounds: Bounds,
    model: RadioModel,
    nodes: Vec<Node>,
}

impl Topology {
    /// Builds a topology from explicit nodes. Points must lie within `bounds`,
    /// ids must be unique and no two nodes may coincide.
    pub fn new(bounds: Bounds, model: RadioModel, mut nodes: Vec<Node>) -> Result<Self> {
        model.validate()?;
        nodes.sort_by_key(|n| n.id);
        for w in nodes.windows(2) {
            if w[0].id == w[1].id {
                return Err(Error::Domain(format!("duplicate node id {}", w[0].id)));
            }
        }
        for n in &nodes {
            if !n.pos.x.is_finite() || !n.pos.y.is_finite() || !bounds.contains(n.pos) {
                return Err(Error::Domain(format!(
                    "node {} at ({}, {}) lies outside the {}x{} bounds",
                    n.id, n.pos.x, n.pos.y, bounds.width, bounds.height
                )));
            }
        }
        for (i, a) in nodes.iter().enumerate() {
            for b in &nodes[i + 1..] {
                if a.pos.distance(&b.pos) == 0.0 {
                    return Err(Error::DegenerateGeometry(format!(
                        "nodes {} and {} coincide",
                        a.id, b.id
                    )));
                }
            }
        }
        Ok(Self {
            bounds,
            model,
            nodes,
        })
    }

    /// Builds a topology from points, assigning ids `0..n` and translating the
    /// points so they sit inside a bounding box with at least `margin` on each side.
    pub fn from_points(points: &[Point], model: RadioModel, margin: f64) -> Result<Self> {
        let min_x = points.iter().map(|p| p.x).fold(f64::INFINITY, f64::min);
        let min_y = points.iter().map(|p| p.y).fold(f64::INFINITY, f64::min);
        let max_x = points.iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max);
        let max_y = points.iter().map(|p| p.y).fold(f64::NEG_INFINITY, f64::max);
        // Integral shifts keep exactly representable coordinates (and so exact
        // distances such as d = R) exact after translation.
        let shift_x = (margin - min_x).ceil();
        let shift_y = (margin - min_y).ceil();
        let nodes = points
            .iter()
            .enumerate()
            .map(|(i, p)| Node {
                id: NodeId(i as u32),
                pos: Point::new(p.x + shift_x, p.y + shift_y),
            })
            .collect();
        let bounds = Bounds::new(
            (max_x + shift_x + margin).ceil(),
            (max_y + shift_y + margin).ceil(),
        );
        Self::new(bounds, model, nodes)
    }

    pub fn bounds(&self) -> Bounds {
        self.bounds
    }

    pub fn model(&self) -> &RadioModel {
        &self.model
    }

    pub fn with_model(&self, model: RadioModel) -> Result<Self> {
        Self::new(self.bounds, model, self.nodes.clone())
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.iter().map(|n| n.id)
    }

    pub fn index_of(&self, id: NodeId) -> Option<usize> {
        self.nodes.binary_search_by_key(&id, |n| n.id).ok()
    }

    pub fn position(&self, id: NodeId) -> Option<Point> {
        self.index_of(id).map(|i| self.nodes[i].pos)
    }

    pub(crate) fn pos_at(&self, idx: usize) -> Point {
        self.nodes[idx].pos
    }

    pub(crate) fn id_at(&self, idx: usize) -> NodeId {
        self.nodes[idx].id
    }

    /// Distance between two nodes, or an error if either id is unknown.
    pub fn distance(&self, u: NodeId, v: NodeId) -> Result<f64> {
        let pu = self.position(u).ok_or_else(|| unknown(u))?;
        let pv = self.position(v).ok_or_else(|| unknown(v))?;
        Ok(pu.distance(&pv))
    }

    pub(crate) fn dist_idx(&self, a: usize, b: usize) -> f64 {
        self.nodes[a].pos.distance(&self.nodes[b].pos)
    }

    pub fn to_json(&self) -> TopologyJson {
        TopologyJson {
            bounds: [self.bounds.width, self.bounds.height],
            max_range: self.model.max_range,
            nodes: self
                .nodes
                .iter()
                .map(|n| NodeJson {
                    id: n.id.0,
                    x: n.pos.x,
                    y: n.pos.y,
                })
                .collect(),
        }
    }

    /// Rebuilds a topology from its interchange form. Every radio parameter
    /// other than the range comes from `base`.
    pub fn from_json(json: &TopologyJson, base: RadioModel) -> Result<Self> {
        let model = RadioModel {
            max_range: json.max_range,
            ..base
        };
        let nodes = json
            .nodes
            .iter()
            .map(|n| Node {
                id: NodeId(n.id),
                pos: Point::new(n.x, n.y),
            })
            .collect();
        Self::new(Bounds::new(json.bounds[0], json.bounds[1]), model, nodes)
    }
}

fn unknown(id: NodeId) -> Error {
    Error::Domain(format!("unknown node {id}"))
}

/// Canonical topology interchange format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopologyJson {
    pub bounds: [f64; 2],
    pub max_range: f64,
    pub nodes: Vec<NodeJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeJson {
    pub id: u32,
    pub x: f64,
    pub y: f64,
}

/// Uniform i.i.d. placement of `node_count` nodes with ids `0..node_count`,
/// driven by a ChaCha8 stream seeded from `seed`. Points closer than
/// [`MIN_SEPARATION`] to an earlier point are resampled.
pub fn generate_random(
    seed: u64,
    node_count: usize,
    bounds: Bounds,
    model: RadioModel,
) -> Result<Topology> {
    if node_count == 0 {
        return Err(Error::Generation("node_count must be at least 1".into()));
    }
    if !(bounds.width > 0.0 && bounds.height > 0.0) {
        return Err(Error::Generation("bounds must have positive area".into()));
    }
    // Disks of radius MIN_SEPARATION / 2 around each node must fit the area.
    let disk = std::f64::consts::PI * (MIN_SEPARATION / 2.0).powi(2);
    if disk * node_count as f64 > bounds.width * bounds.height {
        return Err(Error::Generation(format!(
            "{node_count} nodes cannot fit in {}x{} at separation {MIN_SEPARATION}",
            bounds.width, bounds.height
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<Point> = Vec::with_capacity(node_count);
    for i in 0..node_count {
        let mut attempts = 0;
        let p = loop {
            let p = Point::new(
                rng.random_range(0.0..bounds.width),
                rng.random_range(0.0..bounds.height),
            );
            if points.iter().all(|q| q.distance(&p) >= MIN_SEPARATION) {
                break p;
            }
            attempts += 1;
            if attempts >= MAX_PLACEMENT_ATTEMPTS {
                return Err(Error::Generation(format!(
                    "could not place node {i} after {attempts} attempts"
                )));
            }
        };
        points.push(p);
    }
    let nodes = points
        .into_iter()
        .enumerate()
        .map(|(i, pos)| Node {
            id: NodeId(i as u32),
            pos,
        })
        .collect();
    Topology::new(bounds, model, nodes)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EdgeLabel {
    #[serde(rename = "G_R")]
    MaxPower,
    #[serde(rename = "N_alpha")]
    NAlpha,
    #[serde(rename = "E_alpha")]
    EAlpha,
    #[serde(rename = "N_alpha_s")]
    NAlphaShrunk,
    #[serde(rename = "E_alpha_s")]
    EAlphaShrunk,
    #[serde(rename = "E_alpha_minus")]
    EAlphaMinus,
    #[serde(rename = "E_alpha_nr")]
    EAlphaNonRedundant,
}

impl EdgeLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgeLabel::MaxPower => "G_R",
            EdgeLabel::NAlpha => "N_alpha",
            EdgeLabel::EAlpha => "E_alpha",
            EdgeLabel::NAlphaShrunk => "N_alpha_s",
            EdgeLabel::EAlphaShrunk => "E_alpha_s",
            EdgeLabel::EAlphaMinus => "E_alpha_minus",
            EdgeLabel::EAlphaNonRedundant => "E_alpha_nr",
        }
    }
}

impl fmt::Display for EdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A labeled set of ordered node pairs over a fixed node universe. Symmetric
/// sets store both orientations of every edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeSet {
    label: EdgeLabel,
    symmetric: bool,
    nodes: Vec<NodeId>,
    edges: BTreeSet<(NodeId, NodeId)>,
}

impl EdgeSet {
    /// A directed edge set. `symmetric` is left false even if the pairs happen
    /// to be symmetric.
    pub fn directed(
        label: EdgeLabel,
        nodes: impl IntoIterator<Item = NodeId>,
        edges: impl IntoIterator<Item = (NodeId, NodeId)>,
    ) -> Self {
        let mut nodes: Vec<NodeId> = nodes.into_iter().collect();
        nodes.sort();
        nodes.dedup();
        Self {
            label,
            symmetric: false,
            nodes,
            edges: edges.into_iter().filter(|(u, v)| u != v).collect(),
        }
    }

    /// The symmetric set containing each given pair in both orientations.
    pub fn undirected(
        label: EdgeLabel,
        nodes: impl IntoIterator<Item = NodeId>,
        edges: impl IntoIterator<Item = (NodeId, NodeId)>,
    ) -> Self {
        let mut set = Self::directed(label, nodes, edges);
        set.close_symmetric();
        set
    }

    fn close_symmetric(&mut self) {
        let reversed: Vec<_> = self.edges.iter().map(|&(u, v)| (v, u)).collect();
        self.edges.extend(reversed);
        self.symmetric = true;
    }

    /// `(u,v)` is in the result iff `(u,v)` or `(v,u)` is in `self`.
    pub fn symmetric_closure(&self, label: EdgeLabel) -> Self {
        let mut out = self.clone();
        out.label = label;
        out.close_symmetric();
        out
    }

    /// Largest symmetric subset: pairs present in both orientations.
    pub fn symmetric_core(&self, label: EdgeLabel) -> Self {
        let edges = self
            .edges
            .iter()
            .copied()
            .filter(|&(u, v)| self.edges.contains(&(v, u)));
        let mut out = Self::directed(label, self.nodes.iter().copied(), edges);
        out.symmetric = true;
        out
    }

    pub fn label(&self) -> EdgeLabel {
        self.label
    }

    pub fn relabeled(mut self, label: EdgeLabel) -> Self {
        self.label = label;
        self
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// Checks the stored pairs, independent of the `symmetric` flag.
    pub fn pairs_are_symmetric(&self) -> bool {
        self.edges
            .iter()
            .all(|&(u, v)| self.edges.contains(&(v, u)))
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn contains(&self, u: NodeId, v: NodeId) -> bool {
        self.edges.contains(&(u, v))
    }

    /// All stored ordered pairs.
    pub fn pairs(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.edges.iter().copied()
    }

    /// Number of stored ordered pairs.
    pub fn pair_count(&self) -> usize {
        self.edges.len()
    }

    /// Undirected edges `(u, v)` with `u < v` (symmetric sets) or every pair (directed sets).
    pub fn edges(&self) -> Vec<(NodeId, NodeId)> {
        if self.symmetric {
            self.edges.iter().copied().filter(|(u, v)| u < v).collect()
        } else {
            self.edges.iter().copied().collect()
        }
    }

    pub fn edge_count(&self) -> usize {
        if self.symmetric {
            self.edges.len() / 2
        } else {
            self.edges.len()
        }
    }

    /// Out-neighbors of `u`, ascending.
    pub fn neighbors(&self, u: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.edges
            .range((u, NodeId(0))..=(u, NodeId(u32::MAX)))
            .map(|&(_, v)| v)
    }

    pub fn degree(&self, u: NodeId) -> usize {
        self.neighbors(u).count()
    }

    pub fn is_subset_of(&self, other: &EdgeSet) -> bool {
        self.edges.is_subset(&other.edges)
    }

    pub fn without(&self, removed: &BTreeSet<(NodeId, NodeId)>, label: EdgeLabel) -> Self {
        Self {
            label,
            symmetric: self.symmetric,
            nodes: self.nodes.clone(),
            edges: self.edges.difference(removed).copied().collect(),
        }
    }

    /// Adjacency map including isolated nodes.
    pub fn adjacency(&self) -> BTreeMap<NodeId, Vec<NodeId>> {
        let mut adj: BTreeMap<NodeId, Vec<NodeId>> =
            self.nodes.iter().map(|&n| (n, Vec::new())).collect();
        for &(u, v) in &self.edges {
            adj.entry(u).or_default().push(v);
        }
        adj
    }
}

/// `G_R`: all pairs at distance at most `R`.
pub fn max_power_graph(t: &Topology) -> EdgeSet {
    let r = t.model().max_range;
    let mut edges = Vec::new();
    for i in 0..t.len() {
        for j in i + 1..t.len() {
            if t.dist_idx(i, j) <= r {
                edges.push((t.id_at(i), t.id_at(j)));
            }
        }
    }
    EdgeSet::undirected(EdgeLabel::MaxPower, t.ids(), edges)
}

/// Connected components, each sorted ascending, ordered by smallest member.
pub type Partition = Vec<Vec<NodeId>>;

struct DisjointSet {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            Ordering::Less => self.parent[ra] = rb,
            Ordering::Greater => self.parent[rb] = ra,
            Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
    }
}

/// Maximal connected components of a symmetric edge set (union-find).
pub fn connected_components(e: &EdgeSet) -> Result<Partition> {
    if !e.pairs_are_symmetric() {
        return Err(Error::ContractViolation(format!(
            "connected_components needs a symmetric edge set, {} is not",
            e.label()
        )));
    }
    let nodes = e.nodes();
    let index = |id: NodeId| nodes.binary_search(&id);
    let mut dsu = DisjointSet::new(nodes.len());
    for (u, v) in e.pairs() {
        let (Ok(a), Ok(b)) = (index(u), index(v)) else {
            return Err(Error::ContractViolation(format!(
                "edge ({u},{v}) references a node outside the set"
            )));
        };
        dsu.union(a, b);
    }
    let mut groups: BTreeMap<usize, Vec<NodeId>> = BTreeMap::new();
    for (i, &id) in nodes.iter().enumerate() {
        let root = dsu.find(i);
        groups.entry(root).or_default().push(id);
    }
    let mut parts: Partition = groups.into_values().collect();
    parts.sort_by_key(|c| c[0]);
    Ok(parts)
}

/// Whether `a` and `b` are connected using only edges strictly shorter than `limit`.
pub fn connected_below(t: &Topology, e: &EdgeSet, a: NodeId, b: NodeId, limit: f64) -> bool {
    let mut seen = BTreeSet::from([a]);
    let mut queue = VecDeque::from([a]);
    while let Some(x) = queue.pop_front() {
        if x == b {
            return true;
        }
        for y in e.neighbors(x) {
            let short = t.distance(x, y).map(|d| d < limit).unwrap_or(false);
            if short && seen.insert(y) {
                queue.push_back(y);
            }
        }
    }
    false
}

/// Edge identifier `(d(u,v), max id, min id)`, compared lexicographically.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EdgeId {
    pub length: f64,
    pub hi: NodeId,
    pub lo: NodeId,
}

impl PartialEq for EdgeId {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for EdgeId {}

impl PartialOrd for EdgeId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for EdgeId {
    fn cmp(&self, other: &Self) -> Ordering {
        self.length
            .total_cmp(&other.length)
            .then(self.hi.cmp(&other.hi))
            .then(self.lo.cmp(&other.lo))
    }
}

impl EdgeId {
    pub fn from_parts(length: f64, a: NodeId, b: NodeId) -> Self {
        Self {
            length,
            hi: a.max(b),
            lo: a.min(b),
        }
    }
}

pub fn edge_id(t: &Topology, u: NodeId, v: NodeId) -> Result<EdgeId> {
    if u == v {
        return Err(Error::Domain(format!("edge id of a self-loop at {u}")));
    }
    Ok(EdgeId::from_parts(t.distance(u, v)?, u, v))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(v: &[u32]) -> Vec<NodeId> {
        v.iter().map(|&i| NodeId(i)).collect()
    }

    fn line(points: &[(f64, f64)], range: f64) -> Topology {
        let pts: Vec<Point> = points.iter().map(|&(x, y)| Point::new(x, y)).collect();
        Topology::from_points(&pts, RadioModel::with_range(range).unwrap(), 1.0).unwrap()
    }

    #[test]
    fn generation_is_deterministic() {
        let b = Bounds::new(1500.0, 1500.0);
        let a = generate_random(7, 50, b, RadioModel::default()).unwrap();
        let c = generate_random(7, 50, b, RadioModel::default()).unwrap();
        assert_eq!(a, c);
        for (x, y) in a.nodes().iter().zip(c.nodes()) {
            assert_eq!(x.pos.x.to_bits(), y.pos.x.to_bits());
            assert_eq!(x.pos.y.to_bits(), y.pos.y.to_bits());
        }
        let d = generate_random(8, 50, b, RadioModel::default()).unwrap();
        assert_ne!(a, d);
    }

    #[test]
    fn generation_rejects_bad_requests() {
        let m = RadioModel::default();
        assert!(generate_random(1, 0, Bounds::new(10.0, 10.0), m).is_err());
        assert!(matches!(
            generate_random(1, 1000, Bounds::new(1e-6, 1e-6), m),
            Err(Error::Generation(_))
        ));
    }

    #[test]
    fn single_node_has_empty_max_power_graph() {
        let t = generate_random(3, 1, Bounds::new(100.0, 100.0), RadioModel::default()).unwrap();
        assert_eq!(max_power_graph(&t).edge_count(), 0);
    }

    #[test]
    fn range_boundary_is_inclusive() {
        let t = line(&[(0.0, 0.0), (500.0, 0.0)], 500.0);
        assert_eq!(max_power_graph(&t).edge_count(), 1);
        let t = line(&[(0.0, 0.0), (500.0 + 1e-9, 0.0)], 500.0);
        assert_eq!(max_power_graph(&t).edge_count(), 0);
    }

    #[test]
    fn components_examples() {
        let empty = EdgeSet::undirected(EdgeLabel::MaxPower, ids(&[0, 1, 2]), []);
        assert_eq!(
            connected_components(&empty).unwrap(),
            vec![ids(&[0]), ids(&[1]), ids(&[2])]
        );
        let path = EdgeSet::undirected(
            EdgeLabel::MaxPower,
            ids(&[0, 1, 2]),
            [(NodeId(0), NodeId(1)), (NodeId(1), NodeId(2))],
        );
        assert_eq!(connected_components(&path).unwrap(), vec![ids(&[0, 1, 2])]);
    }

    #[test]
    fn components_reject_directed_input() {
        let d = EdgeSet::directed(EdgeLabel::NAlpha, ids(&[0, 1]), [(NodeId(0), NodeId(1))]);
        assert!(matches!(
            connected_components(&d),
            Err(Error::ContractViolation(_))
        ));
    }

    #[test]
    fn edge_id_ordering_examples() {
        let a = EdgeId::from_parts(3.0, NodeId(7), NodeId(2));
        let b = EdgeId::from_parts(3.0, NodeId(9), NodeId(1));
        assert!(a < b);
        let short = EdgeId::from_parts(2.9, NodeId(100), NodeId(99));
        assert!(short < a);
        let t = line(&[(0.0, 0.0), (3.0, 4.0)], 10.0);
        assert_eq!(
            edge_id(&t, NodeId(0), NodeId(1)).unwrap(),
            edge_id(&t, NodeId(1), NodeId(0)).unwrap()
        );
        assert!(edge_id(&t, NodeId(0), NodeId(0)).is_err());
    }

    #[test]
    fn topology_validation() {
        let m = RadioModel::default();
        let b = Bounds::new(10.0, 10.0);
        let n = |id, x, y| Node {
            id: NodeId(id),
            pos: Point::new(x, y),
        };
        assert!(Topology::new(b, m, vec![n(0, 1.0, 1.0), n(0, 2.0, 2.0)]).is_err());
        assert!(Topology::new(b, m, vec![n(0, 11.0, 1.0)]).is_err());
        assert!(Topology::new(b, m, vec![n(0, 1.0, 1.0), n(1, 1.0, 1.0)]).is_err());
        assert!(Topology::new(b, m, vec![n(5, 1.0, 1.0), n(2, 2.0, 1.0)]).is_ok());
    }

    #[test]
    fn json_round_trip_keeps_key_order() {
        let t = line(&[(0.0, 0.0), (3.0, 4.0)], 10.0);
        let s = serde_json::to_string(&t.to_json()).unwrap();
        assert!(s.starts_with(r#"{"bounds":["#));
        assert!(s.contains(r#""max_range":10.0,"nodes":[{"id":0,"x":"#));
        let back = Topology::from_json(&serde_json::from_str(&s).unwrap(), *t.model()).unwrap();
        assert_eq!(back, t);
    }
}
