//! Deterministic renderings of topologies, edge sets and removal logs.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::network::{EdgeSet, NodeId, Topology};
use crate::optimizations::RemovalRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Dot,
    Csv,
    Svg,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "dot" => Ok(Format::Dot),
            "csv" => Ok(Format::Csv),
            "svg" => Ok(Format::Svg),
            other => Err(Error::Usage(format!("unknown format '{other}'"))),
        }
    }
}

/// Topology JSON with keys in the fixed order `bounds, max_range, nodes`.
pub fn topology_json(t: &Topology) -> Result<String> {
    Ok(serde_json::to_string_pretty(&t.to_json())? + "\n")
}

/// `graph` for symmetric sets (each edge once), `digraph` otherwise. Nodes are
/// pinned at their coordinates for `neato -n`.
pub fn edge_set_dot(t: &Topology, e: &EdgeSet, names: &BTreeMap<NodeId, String>) -> Result<String> {
    let (kind, arrow) = if e.is_symmetric() {
        ("graph", "--")
    } else {
        ("digraph", "->")
    };
    let mut s = String::new();
    writeln!(s, "{kind} \"{}\" {{", e.label()).unwrap();
    writeln!(s, "  node [shape=circle, fontsize=10];").unwrap();
    for node in t.nodes() {
        let label = names
            .get(&node.id)
            .cloned()
            .unwrap_or_else(|| node.id.to_string());
        writeln!(
            s,
            "  {} [label=\"{}\", pos=\"{:.3},{:.3}!\"];",
            node.id, label, node.pos.x, node.pos.y
        )
        .unwrap();
    }
    let edges = if e.is_symmetric() {
        e.edges()
    } else {
        e.pairs().collect()
    };
    for (u, v) in edges {
        writeln!(s, "  {u} {arrow} {v} [label=\"{:.1}\"];", t.distance(u, v)?).unwrap();
    }
    s.push_str("}\n");
    Ok(s)
}

/// Edge list `u,v,distance`: undirected edges once with `u < v`, directed pairs as stored.
pub fn edge_set_csv<W: Write>(t: &Topology, e: &EdgeSet, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["u", "v", "distance"])?;
    let edges = if e.is_symmetric() {
        e.edges()
    } else {
        e.pairs().collect()
    };
    for (u, v) in edges {
        w.write_record([
            u.to_string(),
            v.to_string(),
            format!("{:.6}", t.distance(u, v)?),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn removal_log_csv<W: Write>(log: &[RemovalRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["u", "v", "reason", "stage"])?;
    for r in log {
        w.write_record([
            r.u.to_string(),
            r.v.to_string(),
            r.reason.clone(),
            r.stage.as_str().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

const SVG_SIZE: f64 = 600.0;
const SVG_PAD: f64 = 10.0;

/// Nodes and edges drawn to scale inside the topology bounds; `y` grows upward.
pub fn edge_set_svg(t: &Topology, e: &EdgeSet) -> Result<String> {
    let b = t.bounds();
    let scale = (SVG_SIZE - 2.0 * SVG_PAD) / b.width.max(b.height);
    let w = b.width * scale + 2.0 * SVG_PAD;
    let h = b.height * scale + 2.0 * SVG_PAD;
    let xy = |id: NodeId| -> Result<(f64, f64)> {
        let p = t
            .position(id)
            .ok_or_else(|| Error::Domain(format!("unknown node {id}")))?;
        Ok((SVG_PAD + p.x * scale, h - SVG_PAD - p.y * scale))
    };
    let mut s = String::new();
    writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {w:.2} {h:.2}\">"
    )
    .unwrap();
    writeln!(s, "<title>{}</title>", e.label()).unwrap();
    writeln!(
        s,
        "<rect x=\"{SVG_PAD}\" y=\"{SVG_PAD}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"none\" stroke=\"#ccc\"/>",
        b.width * scale,
        b.height * scale
    )
    .unwrap();
    writeln!(s, "<g stroke=\"#333\" stroke-width=\"1\">").unwrap();
    for (u, v) in e.edges() {
        let (x1, y1) = xy(u)?;
        let (x2, y2) = xy(v)?;
        writeln!(
            s,
            "<line x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\"/>"
        )
        .unwrap();
    }
    writeln!(s, "</g>").unwrap();
    writeln!(s, "<g fill=\"#c00\">").unwrap();
    for id in t.ids() {
        let (x, y) = xy(id)?;
        writeln!(
            s,
            "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"2.5\"><title>{id}</title></circle>"
        )
        .unwrap();
    }
    s.push_str("</g>\n</svg>\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use crate::network::{max_power_graph, EdgeLabel};
    use crate::optimizations::Stage;
    use crate::radio::RadioModel;

    fn t3() -> Topology {
        let pts = [
            Point::new(0.0, 0.0),
            Point::new(300.0, 0.0),
            Point::new(0.0, 400.0),
        ];
        Topology::from_points(&pts, RadioModel::default(), 1.0).unwrap()
    }

    #[test]
    fn exports_are_deterministic() {
        let t = t3();
        let g = max_power_graph(&t);
        assert_eq!(
            edge_set_dot(&t, &g, &BTreeMap::new()).unwrap(),
            edge_set_dot(&t, &g, &BTreeMap::new()).unwrap()
        );
        assert_eq!(edge_set_svg(&t, &g).unwrap(), edge_set_svg(&t, &g).unwrap());
        assert_eq!(topology_json(&t).unwrap(), topology_json(&t).unwrap());
    }

    #[test]
    fn empty_edge_set_is_a_valid_document() {
        let t = t3();
        let e = EdgeSet::undirected(EdgeLabel::EAlpha, t.ids(), []);
        let dot = edge_set_dot(&t, &e, &BTreeMap::new()).unwrap();
        assert!(dot.starts_with("graph \"E_alpha\" {") && dot.ends_with("}\n"));
        assert!(!dot.contains("--"));
        let mut csv = Vec::new();
        edge_set_csv(&t, &e, &mut csv).unwrap();
        assert_eq!(String::from_utf8(csv).unwrap(), "u,v,distance\n");
        assert!(edge_set_svg(&t, &e).unwrap().ends_with("</svg>\n"));
    }

    #[test]
    fn csv_lists_each_undirected_edge_once() {
        let t = t3();
        let mut out = Vec::new();
        edge_set_csv(&t, &max_power_graph(&t), &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(
            text,
            "u,v,distance\n0,1,300.000000\n0,2,400.000000\n1,2,500.000000\n"
        );
    }

    #[test]
    fn directed_dot_uses_arrows() {
        let t = t3();
        let e = EdgeSet::directed(EdgeLabel::NAlpha, t.ids(), [(NodeId(2), NodeId(0))]);
        let dot = edge_set_dot(&t, &e, &BTreeMap::new()).unwrap();
        assert!(dot.starts_with("digraph") && dot.contains("2 -> 0"));
    }

    #[test]
    fn removal_log_schema() {
        let log = [RemovalRecord {
            u: NodeId(1),
            v: NodeId(4),
            reason: "redundant, via 2".into(),
            stage: Stage::Pairwise,
        }];
        let mut out = Vec::new();
        removal_log_csv(&log, &mut out).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "u,v,reason,stage\n1,4,\"redundant, via 2\",pairwise\n"
        );
    }
}
