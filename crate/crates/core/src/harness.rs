//! The degree/radius experiment and the counterexample drivers.

use std::f64::consts::PI;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cbtc::run_cbtc_with;
use crate::constructions::{build_counter_5pi6, build_example1};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::network::{
    connected_components, generate_random, max_power_graph, Bounds, EdgeSet, NodeId, Topology,
};
use crate::optimizations::{optimize, OptStack, RemovalThreshold, ASYMMETRIC_LIMIT};
use crate::radio::RadioModel;

/// One column of the degree/radius table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// No topology control: every node at `P`, edge set `G_R`.
    MaxPower,
    Stack(OptStack),
    /// Every optimization that is safe at the cell's α.
    All,
}

impl Regime {
    pub fn label(&self) -> String {
        match self {
            Regime::MaxPower => "max-power".into(),
            Regime::Stack(s) => s.label(),
            Regime::All => "all".into(),
        }
    }

    /// The stack applied at `alpha`, or `None` when the cell does not exist
    /// (asymmetric removal above `2π/3`) or needs no discovery.
    pub fn stack_at(&self, alpha: f64) -> Option<OptStack> {
        match self {
            Regime::MaxPower => None,
            Regime::Stack(s) if s.asymmetric && alpha > ASYMMETRIC_LIMIT + 1e-9 => None,
            Regime::Stack(s) => Some(*s),
            Regime::All => Some(OptStack::all_applicable(alpha)),
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "max-power" | "baseline" => Ok(Regime::MaxPower),
            "all" => Ok(Regime::All),
            other => other.parse().map(Regime::Stack),
        }
    }
}

impl Serialize for Regime {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.label())
    }
}

impl<'de> Deserialize<'de> for Regime {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub network_count: usize,
    pub node_count: usize,
    pub bounds: [f64; 2],
    pub model: RadioModel,
    pub alphas: Vec<f64>,
    pub regimes: Vec<Regime>,
    pub base_seed: u64,
    pub threshold: RemovalThreshold,
}

impl Default for ExperimentConfig {
    /// 100 networks of 100 nodes in 1500×1500 with `R = 500`.
    fn default() -> Self {
        Self {
            network_count: 100,
            node_count: 100,
            bounds: [1500.0, 1500.0],
            model: RadioModel::experiment(),
            alphas: vec![5.0 * PI / 6.0, 2.0 * PI / 3.0],
            regimes: vec![
                Regime::MaxPower,
                Regime::Stack(OptStack::BASIC),
                Regime::Stack(OptStack::SHRINK_BACK),
                Regime::Stack(OptStack::SHRINK_ASYMMETRIC),
                Regime::All,
            ],
            base_seed: 1,
            threshold: RemovalThreshold::PerNode,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.network_count == 0 || self.node_count == 0 {
            return Err(Error::Usage(
                "network_count and node_count must be >= 1".into(),
            ));
        }
        self.model.validate()?;
        for &a in &self.alphas {
            crate::geometry::validate_alpha(a)?;
        }
        Ok(())
    }

    pub fn seed(&self, index: usize) -> u64 {
        self.base_seed.wrapping_add(index as u64)
    }

    pub fn bounds(&self) -> Bounds {
        Bounds::new(self.bounds[0], self.bounds[1])
    }
}

/// Mean degree and radius of one network under one regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkMetrics {
    pub seed: u64,
    pub mean_degree: f64,
    pub mean_radius: f64,
    pub nodes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub regime: Regime,
    /// `None` for the max-power baseline.
    pub alpha: Option<f64>,
    /// Average over networks of each network's per-node mean.
    pub mean_degree: f64,
    pub mean_radius: f64,
    /// Same quantities averaged over all nodes of all networks at once.
    pub node_weighted_degree: f64,
    pub node_weighted_radius: f64,
    pub networks: usize,
    pub base_seed: u64,
    pub per_network: Vec<NetworkMetrics>,
}

/// Per-node degree and operating radius (longest incident edge) in `e`.
pub fn degree_and_radius(t: &Topology, e: &EdgeSet) -> Result<Vec<(usize, f64)>> {
    t.ids()
        .map(|u| {
            let mut radius: f64 = 0.0;
            for v in e.neighbors(u) {
                radius = radius.max(t.distance(u, v)?);
            }
            Ok((e.degree(u), radius))
        })
        .collect()
}

fn summarize(seed: u64, per_node: &[(usize, f64)]) -> NetworkMetrics {
    let n = per_node.len() as f64;
    NetworkMetrics {
        seed,
        mean_degree: per_node.iter().map(|&(d, _)| d as f64).sum::<f64>() / n,
        mean_radius: per_node.iter().map(|&(_, r)| r).sum::<f64>() / n,
        nodes: per_node.len(),
    }
}

/// Every table cell for one network, in the fixed `(alpha, regime)` order.
fn network_cells(cfg: &ExperimentConfig, index: usize) -> Result<Vec<NetworkMetrics>> {
    let seed = cfg.seed(index);
    let t = generate_random(seed, cfg.node_count, cfg.bounds(), cfg.model)?;
    let mut out = Vec::new();
    for cell in cells(cfg) {
        let m = match cell {
            (Regime::MaxPower, _) => {
                let g = max_power_graph(&t);
                let per_node: Vec<(usize, f64)> = t
                    .ids()
                    .map(|u| (g.degree(u), cfg.model.max_range))
                    .collect();
                summarize(seed, &per_node)
            }
            (regime, Some(alpha)) => {
                let stack = regime
                    .stack_at(alpha)
                    .expect("cells() only yields valid stacks");
                let base = run_cbtc_with(&t, alpha, Execution::Sequential)?;
                let r = optimize(&t, base, stack, cfg.threshold)?;
                summarize(seed, &degree_and_radius(&t, r.final_edges())?)
            }
            (_, None) => unreachable!(),
        };
        out.push(m);
    }
    Ok(out)
}

/// The baseline first, then every valid `(alpha, regime)` pair.
fn cells(cfg: &ExperimentConfig) -> Vec<(Regime, Option<f64>)> {
    let mut out = Vec::new();
    if cfg.regimes.contains(&Regime::MaxPower) {
        out.push((Regime::MaxPower, None));
    }
    for &alpha in &cfg.alphas {
        for &regime in &cfg.regimes {
            if regime.stack_at(alpha).is_some() {
                out.push((regime, Some(alpha)));
            }
        }
    }
    out
}

pub fn run_table1(cfg: &ExperimentConfig) -> Result<Vec<MetricsRow>> {
    run_table1_with(cfg, Execution::default())
}

/// Runs every network (in parallel under [`Execution::Parallel`]) and
/// aggregates each cell. Output order depends only on the config.
pub fn run_table1_with(cfg: &ExperimentConfig, exec: Execution) -> Result<Vec<MetricsRow>> {
    cfg.validate()?;
    let per_network = exec.try_map(cfg.network_count, |i| {
        network_cells(cfg, i).map_err(|e| Error::Pipeline {
            seed: cfg.seed(i),
            source: Box::new(e),
        })
    })?;
    let rows = cells(cfg)
        .into_iter()
        .enumerate()
        .map(|(c, (regime, alpha))| {
            let nets: Vec<NetworkMetrics> = per_network.iter().map(|cells| cells[c]).collect();
            let k = nets.len() as f64;
            let total_nodes: f64 = nets.iter().map(|m| m.nodes as f64).sum();
            MetricsRow {
                regime,
                alpha,
                mean_degree: nets.iter().map(|m| m.mean_degree).sum::<f64>() / k,
                mean_radius: nets.iter().map(|m| m.mean_radius).sum::<f64>() / k,
                node_weighted_degree: nets
                    .iter()
                    .map(|m| m.mean_degree * m.nodes as f64)
                    .sum::<f64>()
                    / total_nodes,
                node_weighted_radius: nets
                    .iter()
                    .map(|m| m.mean_radius * m.nodes as f64)
                    .sum::<f64>()
                    / total_nodes,
                networks: nets.len(),
                base_seed: cfg.base_seed,
                per_network: nets,
            }
        })
        .collect();
    Ok(rows)
}

/// Writes `regime,alpha,mean_degree,mean_radius,networks,seed`.
pub fn write_table1_csv<W: Write>(rows: &[MetricsRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "regime",
        "alpha",
        "mean_degree",
        "mean_radius",
        "networks",
        "seed",
    ])?;
    for r in rows {
        w.write_record([
            r.regime.label(),
            r.alpha.map(|a| format!("{a:.6}")).unwrap_or_default(),
            format!("{:.4}", r.mean_degree),
            format!("{:.4}", r.mean_radius),
            r.networks.to_string(),
            r.base_seed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Per-network raw values, one line per `(cell, network)`.
pub fn write_raw_csv<W: Write>(rows: &[MetricsRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "regime",
        "alpha",
        "seed",
        "nodes",
        "mean_degree",
        "mean_radius",
    ])?;
    for r in rows {
        for m in &r.per_network {
            w.write_record([
                r.regime.label(),
                r.alpha.map(|a| format!("{a:.6}")).unwrap_or_default(),
                m.seed.to_string(),
                m.nodes.to_string(),
                format!("{:.6}", m.mean_degree),
                format!("{:.6}", m.mean_radius),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// One checked claim of the counterexample report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub construction: &'static str,
    pub epsilon: f64,
    pub alpha: f64,
    pub claim: String,
    pub passed: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CounterexampleReport {
    pub checks: Vec<Check>,
    /// Annotated DOT renderings keyed by a file stem.
    #[serde(skip)]
    pub renderings: Vec<(String, String)>,
}

impl CounterexampleReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

pub const EXAMPLE1_EPSILONS: [f64; 3] = [PI / 96.0, PI / 24.0, 11.0 * PI / 96.0];
pub const DISCONNECT_EPSILONS: [f64; 3] = [PI / 72.0, PI / 36.0, PI / 18.0];

fn components(e: &EdgeSet) -> Result<usize> {
    Ok(connected_components(e)?.len())
}

pub fn example1_checks(report: &mut CounterexampleReport, r_max: f64) -> Result<()> {
    for eps in EXAMPLE1_EPSILONS {
        let ex = match build_example1(eps, r_max) {
            Ok(ex) => ex,
            Err(e) => {
                report.checks.push(Check {
                    construction: "example1",
                    epsilon: eps,
                    alpha: 5.0 * PI / 6.0,
                    claim: format!("construction exists: {e}"),
                    passed: false,
                });
                continue;
            }
        };
        let lo = ex.min_alpha();
        let hi = 5.0 * PI / 6.0;
        for alpha in [hi, (lo + hi) / 2.0, lo] {
            let r = run_cbtc_with(&ex.topology, alpha, Execution::Sequential)?;
            let asym = r.n_alpha.contains(ex.v, ex.u0) && !r.n_alpha.contains(ex.u0, ex.v);
            report.checks.push(Check {
                construction: "example1",
                epsilon: eps,
                alpha,
                claim: "(v,u0) in N_alpha and (u0,v) not in N_alpha".into(),
                passed: asym,
            });
            report.checks.push(Check {
                construction: "example1",
                epsilon: eps,
                alpha,
                claim: "E_alpha connected".into(),
                passed: components(&r.e_alpha)? == 1,
            });
            if alpha == hi {
                report.renderings.push((
                    format!("example1_eps{eps:.4}"),
                    crate::export::edge_set_dot(&ex.topology, &r.n_alpha, &ex.names())?,
                ));
            }
        }
        let r = run_cbtc_with(&ex.topology, 2.0 * PI / 3.0, Execution::Sequential)?;
        report.checks.push(Check {
            construction: "example1",
            epsilon: eps,
            alpha: 2.0 * PI / 3.0,
            claim: "N_alpha symmetric at alpha=2pi/3".into(),
            passed: r.n_alpha.pairs_are_symmetric(),
        });
    }
    Ok(())
}

pub fn disconnect_checks(report: &mut CounterexampleReport, r_max: f64) -> Result<()> {
    for eps in DISCONNECT_EPSILONS {
        let c = build_counter_5pi6(eps, r_max)?;
        let g = max_power_graph(&c.topology);
        report.checks.push(Check {
            construction: "disconnect",
            epsilon: eps,
            alpha: c.alpha,
            claim: "G_R connected".into(),
            passed: components(&g)? == 1,
        });
        let cross: Vec<(NodeId, NodeId)> = g
            .edges()
            .into_iter()
            .filter(|&(a, b)| c.u_cluster().contains(&a) != c.u_cluster().contains(&b))
            .collect();
        report.checks.push(Check {
            construction: "disconnect",
            epsilon: eps,
            alpha: c.alpha,
            claim: "(u0,v0) is the only cross-cluster G_R edge".into(),
            passed: cross == vec![(c.u[0].min(c.v[0]), c.u[0].max(c.v[0]))],
        });
        let above = run_cbtc_with(&c.topology, c.alpha, Execution::Sequential)?;
        report.checks.push(Check {
            construction: "disconnect",
            epsilon: eps,
            alpha: c.alpha,
            claim: "E_alpha has 2 components at alpha=5pi/6+eps".into(),
            passed: components(&above.e_alpha)? == 2,
        });
        let at = run_cbtc_with(&c.topology, 5.0 * PI / 6.0, Execution::Sequential)?;
        report.checks.push(Check {
            construction: "disconnect",
            epsilon: eps,
            alpha: 5.0 * PI / 6.0,
            claim: "E_alpha has 1 component at alpha=5pi/6".into(),
            passed: components(&at.e_alpha)? == 1,
        });
        report.renderings.push((
            format!("disconnect_eps{eps:.4}"),
            crate::export::edge_set_dot(&c.topology, &above.e_alpha, &c.names())?,
        ));
    }
    Ok(())
}

/// Both constructions across their ε sweeps.
pub fn run_counterexamples() -> Result<CounterexampleReport> {
    let mut report = CounterexampleReport::default();
    example1_checks(&mut report, 500.0)?;
    disconnect_checks(&mut report, 500.0)?;
    Ok(report)
}
