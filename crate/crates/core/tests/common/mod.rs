#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use cbtc_sim::network::{generate_random, Bounds, EdgeSet, NodeId, Topology};
use cbtc_sim::radio::RadioModel;

/// Instance `i` of the property suites: 20..=100 nodes in a square whose side
/// varies so densities range from sparse to crowded. Alternates the doubling
/// schedule and the finer experiment schedule.
pub fn instance(i: u64) -> Topology {
    let n = 20 + (i * 37 % 81) as usize;
    let side = 700.0 + (i * 53 % 14) as f64 * 100.0;
    let model = if i.is_multiple_of(2) {
        RadioModel::default()
    } else {
        RadioModel::experiment()
    };
    generate_random(1000 + i, n, Bounds::new(side, side), model).unwrap()
}

/// All pairs within `R`, by direct enumeration.
pub fn brute_max_power(t: &Topology) -> BTreeSet<(NodeId, NodeId)> {
    let r = t.model().max_range;
    let nodes = t.nodes();
    let mut out = BTreeSet::new();
    for (i, a) in nodes.iter().enumerate() {
        for b in &nodes[i + 1..] {
            if a.pos.distance(&b.pos) <= r {
                out.insert((a.id.min(b.id), a.id.max(b.id)));
            }
        }
    }
    out
}

/// Components by breadth-first search, each sorted, ordered by smallest id.
pub fn bfs_components<I>(nodes: I, edges: &BTreeSet<(NodeId, NodeId)>) -> Vec<Vec<NodeId>>
where
    I: IntoIterator<Item = NodeId>,
{
    let mut adj: BTreeMap<NodeId, Vec<NodeId>> =
        nodes.into_iter().map(|n| (n, Vec::new())).collect();
    for &(u, v) in edges {
        adj.get_mut(&u).unwrap().push(v);
        adj.get_mut(&v).unwrap().push(u);
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for &start in adj.keys() {
        if !seen.insert(start) {
            continue;
        }
        let mut comp = vec![start];
        let mut q = VecDeque::from([start]);
        while let Some(x) = q.pop_front() {
            for &y in &adj[&x] {
                if seen.insert(y) {
                    comp.push(y);
                    q.push_back(y);
                }
            }
        }
        comp.sort();
        out.push(comp);
    }
    out
}

pub fn undirected(e: &EdgeSet) -> BTreeSet<(NodeId, NodeId)> {
    e.pairs().map(|(u, v)| (u.min(v), u.max(v))).collect()
}

pub fn components_of(t: &Topology, e: &EdgeSet) -> Vec<Vec<NodeId>> {
    bfs_components(t.ids(), &undirected(e))
}

pub fn gr_components(t: &Topology) -> Vec<Vec<NodeId>> {
    bfs_components(t.ids(), &brute_max_power(t))
}

/// Whether `a` reaches `b` using only edges of `e` strictly shorter than
/// `limit` (or no longer, with `inclusive`).
pub fn reachable_below(
    t: &Topology,
    e: &EdgeSet,
    a: NodeId,
    b: NodeId,
    limit: f64,
    inclusive: bool,
) -> bool {
    let ok = |d: f64| if inclusive { d <= limit } else { d < limit };
    let mut seen = BTreeSet::from([a]);
    let mut q = VecDeque::from([a]);
    while let Some(x) = q.pop_front() {
        if x == b {
            return true;
        }
        for y in e.neighbors(x) {
            let d = t.position(x).unwrap().distance(&t.position(y).unwrap());
            if ok(d) && seen.insert(y) {
                q.push_back(y);
            }
        }
    }
    false
}
