//! Edge-reduction passes applied after discovery: shrink-back, asymmetric edge
//! removal and pairwise (redundant) edge removal, plus the fixed stacking order.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cbtc::{run_cbtc_with, CbtcResult};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geometry::{coverage_equal, coverage_set, vertex_angle, DirectionSet, ANGLE_TOLERANCE};
use crate::network::{edge_id, EdgeLabel, EdgeSet, NodeId, Topology};

/// Largest cone angle for which asymmetric edge removal keeps connectivity.
pub const ASYMMETRIC_LIMIT: f64 = 2.0 * PI / 3.0;

/// Witness angle below which a longer edge is dominated by a shorter one.
pub const REDUNDANCY_ANGLE: f64 = PI / 3.0;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    ShrinkBack,
    Asymmetric,
    Pairwise,
}

impl Stage {
    pub fn as_str(&self) -> &'static str {
        match self {
            Stage::ShrinkBack => "shrink-back",
            Stage::Asymmetric => "asymmetric",
            Stage::Pairwise => "pairwise",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemovalRecord {
    pub u: NodeId,
    pub v: NodeId,
    pub reason: String,
    pub stage: Stage,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShrinkBack {
    pub n_alpha_s: EdgeSet,
    pub e_alpha_s: EdgeSet,
    pub power: BTreeMap<NodeId, f64>,
    pub log: Vec<RemovalRecord>,
}

/// Boundary nodes drop the neighbors tagged with the highest powers as long as
/// the remaining directions give the same α-coverage.
pub fn shrink_back(r: &CbtcResult) -> ShrinkBack {
    let alpha = r.alpha;
    let mut pairs = Vec::new();
    let mut power = BTreeMap::new();
    let mut log = Vec::new();
    for (&u, s) in &r.states {
        if !s.boundary {
            pairs.extend(s.neighbors.iter().map(|rec| (u, rec.peer)));
            power.insert(u, s.power);
            continue;
        }
        let full = coverage_set(&s.directions, alpha);
        let mut levels: Vec<f64> = s.neighbors.iter().map(|rec| rec.power_tag).collect();
        levels.sort_by(f64::total_cmp);
        levels.dedup();
        let first_level = r.model.next_power(r.model.initial_power);
        let keep_level = if levels.is_empty() {
            first_level
        } else {
            levels
                .iter()
                .copied()
                .find(|&level| {
                    let dirs: DirectionSet = s
                        .neighbors
                        .iter()
                        .filter(|rec| rec.power_tag <= level)
                        .map(|rec| rec.direction)
                        .collect();
                    coverage_equal(&coverage_set(&dirs, alpha), &full)
                })
                .expect("the highest level reproduces the full coverage")
        };
        for rec in &s.neighbors {
            if rec.power_tag <= keep_level {
                pairs.push((u, rec.peer));
            } else {
                log.push(RemovalRecord {
                    u,
                    v: rec.peer,
                    reason: format!(
                        "tag {:.6e} above shrink power {:.6e}",
                        rec.power_tag, keep_level
                    ),
                    stage: Stage::ShrinkBack,
                });
            }
        }
        power.insert(u, keep_level);
    }
    let n_alpha_s = EdgeSet::directed(EdgeLabel::NAlphaShrunk, r.states.keys().copied(), pairs);
    let e_alpha_s = n_alpha_s.symmetric_closure(EdgeLabel::EAlphaShrunk);
    ShrinkBack {
        n_alpha_s,
        e_alpha_s,
        power,
        log,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymmetricRemoval {
    pub e_alpha_minus: EdgeSet,
    /// For each node `u`, the nodes that must be told to drop `u`.
    pub notifications: BTreeMap<NodeId, BTreeSet<NodeId>>,
    pub log: Vec<RemovalRecord>,
}

/// Keeps only mutually discovered pairs of a directed neighbor relation.
/// Refused above `2π/3`, where the result can disconnect the network.
pub fn asymmetric_removal(directed: &EdgeSet, alpha: f64) -> Result<AsymmetricRemoval> {
    if alpha > ASYMMETRIC_LIMIT + ANGLE_TOLERANCE {
        return Err(Error::GuaranteeViolation {
            alpha,
            limit: ASYMMETRIC_LIMIT,
            what: "asymmetric edge removal",
        });
    }
    let e_alpha_minus = directed.symmetric_core(EdgeLabel::EAlphaMinus);
    let mut notifications: BTreeMap<NodeId, BTreeSet<NodeId>> = BTreeMap::new();
    let mut log = Vec::new();
    for (v, u) in directed.pairs() {
        if !directed.contains(u, v) {
            notifications.entry(u).or_default().insert(v);
            log.push(RemovalRecord {
                u: v,
                v: u,
                reason: format!("{u} did not discover {v}"),
                stage: Stage::Asymmetric,
            });
        }
    }
    Ok(AsymmetricRemoval {
        e_alpha_minus,
        notifications,
        log,
    })
}

/// A witness `w` that makes `(u, v)` redundant at `u`, if one exists.
pub fn redundancy_witness(
    t: &Topology,
    working: &EdgeSet,
    u: NodeId,
    v: NodeId,
) -> Result<Option<NodeId>> {
    if !working.contains(u, v) {
        return Err(Error::ContractViolation(format!(
            "({u},{v}) is not in {}",
            working.label()
        )));
    }
    let pu = t
        .position(u)
        .ok_or_else(|| Error::Domain(format!("unknown node {u}")))?;
    let pv = t
        .position(v)
        .ok_or_else(|| Error::Domain(format!("unknown node {v}")))?;
    let uv = edge_id(t, u, v)?;
    for w in working.neighbors(u).filter(|&w| w != v) {
        let pw = t
            .position(w)
            .ok_or_else(|| Error::Domain(format!("unknown node {w}")))?;
        if vertex_angle(pu, pv, pw)? < REDUNDANCY_ANGLE && uv > edge_id(t, u, w)? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// `(u,v)` is redundant iff some other neighbor `w` of `u` has `∠vuw < π/3`
/// and `eid(u,v) > eid(u,w)`.
pub fn is_redundant(t: &Topology, working: &EdgeSet, u: NodeId, v: NodeId) -> Result<bool> {
    Ok(redundancy_witness(t, working, u, v)?.is_some())
}

/// How the "longest non-redundant edge" cutoff of pairwise removal is scoped.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RemovalThreshold {
    /// Each node compares against its own longest non-redundant incident edge.
    #[default]
    PerNode,
    /// All nodes compare against the longest non-redundant edge in the set.
    Global,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairwiseRemoval {
    pub e_alpha_nr: EdgeSet,
    /// Ordered pairs `(u, v)` where `(u, v)` is redundant at `u`, with the witness.
    pub redundant_at: BTreeMap<(NodeId, NodeId), NodeId>,
    /// Per-node cutoff: longest incident edge that is not redundant at that node.
    pub cutoff: BTreeMap<NodeId, f64>,
    pub log: Vec<RemovalRecord>,
}

/// Each node `u` classifies its incident edges against `working` (once, no
/// fixed point) and drops those redundant at `u` that are longer than the
/// cutoff. An edge dropped by either endpoint is dropped by both.
pub fn pairwise_removal(
    t: &Topology,
    working: &EdgeSet,
    threshold: RemovalThreshold,
) -> Result<PairwiseRemoval> {
    if !working.pairs_are_symmetric() {
        return Err(Error::ContractViolation(format!(
            "pairwise removal needs a symmetric edge set, {} is not",
            working.label()
        )));
    }
    let mut redundant_at: BTreeMap<(NodeId, NodeId), NodeId> = BTreeMap::new();
    for (u, v) in working.pairs() {
        if let Some(w) = redundancy_witness(t, working, u, v)? {
            redundant_at.insert((u, v), w);
        }
    }

    let mut cutoff: BTreeMap<NodeId, f64> = BTreeMap::new();
    for &u in working.nodes() {
        let mut longest = f64::NEG_INFINITY;
        for v in working.neighbors(u) {
            if !redundant_at.contains_key(&(u, v)) {
                longest = longest.max(t.distance(u, v)?);
            }
        }
        cutoff.insert(u, longest);
    }
    if threshold == RemovalThreshold::Global {
        let global = cutoff.values().copied().fold(f64::NEG_INFINITY, f64::max);
        for c in cutoff.values_mut() {
            *c = global;
        }
    }

    let mut removed = BTreeSet::new();
    let mut log = Vec::new();
    for (&(u, v), &w) in &redundant_at {
        let d = t.distance(u, v)?;
        // A node without non-redundant edges has cutoff -inf and removes nothing.
        let c = cutoff[&u];
        if !(c.is_finite() && d > c) || removed.contains(&(u, v)) {
            continue;
        }
        removed.insert((u, v));
        removed.insert((v, u));
        log.push(RemovalRecord {
            u,
            v,
            reason: format!("redundant at {u} via {w}; length {d:.3} exceeds cutoff {c:.3}"),
            stage: Stage::Pairwise,
        });
    }
    Ok(PairwiseRemoval {
        e_alpha_nr: working.without(&removed, EdgeLabel::EAlphaNonRedundant),
        redundant_at,
        cutoff,
        log,
    })
}

/// Which optimizations run on top of the basic algorithm. They always apply in
/// the order shrink-back, asymmetric removal, pairwise removal.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OptStack {
    pub shrink_back: bool,
    pub asymmetric: bool,
    pub pairwise: bool,
}

impl OptStack {
    pub const BASIC: OptStack = OptStack {
        shrink_back: false,
        asymmetric: false,
        pairwise: false,
    };
    pub const SHRINK_BACK: OptStack = OptStack {
        shrink_back: true,
        asymmetric: false,
        pairwise: false,
    };
    pub const ASYMMETRIC: OptStack = OptStack {
        shrink_back: false,
        asymmetric: true,
        pairwise: false,
    };
    pub const SHRINK_ASYMMETRIC: OptStack = OptStack {
        shrink_back: true,
        asymmetric: true,
        pairwise: false,
    };

    /// Every optimization that is safe at `alpha`.
    pub fn all_applicable(alpha: f64) -> OptStack {
        OptStack {
            shrink_back: true,
            asymmetric: alpha <= ASYMMETRIC_LIMIT + ANGLE_TOLERANCE,
            pairwise: true,
        }
    }

    pub fn label(&self) -> String {
        let mut parts = Vec::new();
        if self.shrink_back {
            parts.push("shrink-back");
        }
        if self.asymmetric {
            parts.push("asym");
        }
        if self.pairwise {
            parts.push("pairwise");
        }
        if parts.is_empty() {
            "basic".into()
        } else {
            parts.join("+")
        }
    }
}

impl fmt::Display for OptStack {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl std::str::FromStr for OptStack {
    type Err = Error;

    /// Parses `basic` or a `+`/`,`-separated list of `shrink-back`, `asym`, `pairwise`.
    fn from_str(s: &str) -> Result<Self> {
        let mut stack = OptStack::BASIC;
        for part in s.split(['+', ',']).map(str::trim).filter(|p| !p.is_empty()) {
            match part {
                "basic" => {}
                "shrink-back" | "shrink" | "sb" => stack.shrink_back = true,
                "asym" | "asymmetric" => stack.asymmetric = true,
                "pairwise" | "pw" => stack.pairwise = true,
                other => return Err(Error::Usage(format!("unknown optimization '{other}'"))),
            }
        }
        Ok(stack)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizedResult {
    pub base: CbtcResult,
    pub stack: OptStack,
    pub n_alpha_s: Option<EdgeSet>,
    pub e_alpha_s: Option<EdgeSet>,
    pub e_alpha_minus: Option<EdgeSet>,
    pub e_alpha_nr: Option<EdgeSet>,
    /// Discovery power after shrink-back (the basic power when shrink-back is off).
    pub shrink_power: BTreeMap<NodeId, f64>,
    pub removal_log: Vec<RemovalRecord>,
}

impl OptimizedResult {
    /// The symmetric edge set produced by the last stage of the stack.
    pub fn final_edges(&self) -> &EdgeSet {
        self.e_alpha_nr
            .as_ref()
            .or(self.e_alpha_minus.as_ref())
            .or(self.e_alpha_s.as_ref())
            .unwrap_or(&self.base.e_alpha)
    }

    pub fn edge_set(&self, label: EdgeLabel) -> Option<&EdgeSet> {
        match label {
            EdgeLabel::NAlpha => Some(&self.base.n_alpha),
            EdgeLabel::EAlpha => Some(&self.base.e_alpha),
            EdgeLabel::NAlphaShrunk => self.n_alpha_s.as_ref(),
            EdgeLabel::EAlphaShrunk => self.e_alpha_s.as_ref(),
            EdgeLabel::EAlphaMinus => self.e_alpha_minus.as_ref(),
            EdgeLabel::EAlphaNonRedundant => self.e_alpha_nr.as_ref(),
            EdgeLabel::MaxPower => None,
        }
    }
}

/// Applies `stack` to an existing discovery result.
pub fn optimize(
    t: &Topology,
    base: CbtcResult,
    stack: OptStack,
    threshold: RemovalThreshold,
) -> Result<OptimizedResult> {
    let mut log = Vec::new();
    let (n_alpha_s, e_alpha_s, shrink_power) = if stack.shrink_back {
        let sb = shrink_back(&base);
        log.extend(sb.log);
        (Some(sb.n_alpha_s), Some(sb.e_alpha_s), sb.power)
    } else {
        let power = base.states.iter().map(|(&u, s)| (u, s.power)).collect();
        (None, None, power)
    };
    let directed = n_alpha_s.as_ref().unwrap_or(&base.n_alpha);
    let e_alpha_minus = if stack.asymmetric {
        let asym = asymmetric_removal(directed, base.alpha)?;
        log.extend(asym.log);
        Some(asym.e_alpha_minus)
    } else {
        None
    };
    let e_alpha_nr = if stack.pairwise {
        let working = e_alpha_minus
            .as_ref()
            .or(e_alpha_s.as_ref())
            .unwrap_or(&base.e_alpha);
        let pw = pairwise_removal(t, working, threshold)?;
        log.extend(pw.log);
        Some(pw.e_alpha_nr)
    } else {
        None
    };
    Ok(OptimizedResult {
        base,
        stack,
        n_alpha_s,
        e_alpha_s,
        e_alpha_minus,
        e_alpha_nr,
        shrink_power,
        removal_log: log,
    })
}

/// Discovery followed by `stack`.
pub fn run_pipeline(
    t: &Topology,
    alpha: f64,
    stack: OptStack,
    threshold: RemovalThreshold,
) -> Result<OptimizedResult> {
    run_pipeline_with(t, alpha, stack, threshold, Execution::default())
}

pub fn run_pipeline_with(
    t: &Topology,
    alpha: f64,
    stack: OptStack,
    threshold: RemovalThreshold,
    exec: Execution,
) -> Result<OptimizedResult> {
    let base = run_cbtc_with(t, alpha, exec)?;
    optimize(t, base, stack, threshold)
}
