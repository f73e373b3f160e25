//! Functional networks from distance matrices: minimum spanning trees and
//! top-percent edge selections, with GraphML and JSON export.

use std::cmp::Ordering;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{to_canonical_distance, DistanceMatrix, MetricSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NetworkKind {
    Mst,
    TopPercent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: String,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    /// Original metric value.
    pub weight: f64,
    /// Canonical distance used for selection.
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalNetwork {
    pub kind: NetworkKind,
    pub percent: Option<f64>,
    pub metric: MetricSpec,
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    GraphMl,
    Json,
}

/// Disjoint-set forest with path halving and union by size.
struct DisjointSet {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        DisjointSet {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }
}

/// All `i < j` edges sorted by `(distance, i, j)`.
fn sorted_edges(original: &DistanceMatrix, canonical: &DistanceMatrix) -> Result<Vec<Edge>> {
    let n = canonical.size;
    let mut edges = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let d = canonical.values[i][j];
            if !d.is_finite() {
                return Err(Error::NonFiniteEntry(i, j));
            }
            edges.push(Edge {
                source: i,
                target: j,
                weight: original.values[i][j],
                distance: d,
            });
        }
    }
    edges.sort_by(|a, b| {
        a.distance
            .total_cmp(&b.distance)
            .then(a.source.cmp(&b.source))
            .then(a.target.cmp(&b.target))
    });
    Ok(edges)
}

fn default_nodes(m: &DistanceMatrix, positions: Option<&[[f64; 3]]>) -> Vec<Node> {
    m.neuron_ids
        .iter()
        .enumerate()
        .map(|(i, id)| {
            let p = positions
                .and_then(|p| p.get(i))
                .copied()
                .unwrap_or([0.0; 3]);
            Node {
                id: id.clone(),
                x: p[0],
                y: p[1],
                z: p[2],
            }
        })
        .collect()
}

fn sort_by_endpoints(edges: &mut [Edge]) {
    edges.sort_by(|a, b| match a.source.cmp(&b.source) {
        Ordering::Equal => a.target.cmp(&b.target),
        o => o,
    });
}

/// Kruskal minimum spanning tree over canonical distances. Similarity
/// matrices are converted with `1 − s` first.
pub fn mst(m: &DistanceMatrix, positions: Option<&[[f64; 3]]>) -> Result<FunctionalNetwork> {
    if m.size < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            got: m.size,
        });
    }
    let canonical = to_canonical_distance(m);
    let mut dsu = DisjointSet::new(m.size);
    let mut tree = Vec::with_capacity(m.size - 1);
    for e in sorted_edges(m, &canonical)? {
        if dsu.union(e.source, e.target) {
            tree.push(e);
            if tree.len() == m.size - 1 {
                break;
            }
        }
    }
    sort_by_endpoints(&mut tree);
    Ok(FunctionalNetwork {
        kind: NetworkKind::Mst,
        percent: None,
        metric: m.metric.clone(),
        nodes: default_nodes(m, positions),
        edges: tree,
    })
}

/// `round(percent / 100 * pairs)` with halves rounded up.
pub fn top_percent_edge_count(percent: f64, pairs: usize) -> usize {
    // Multiply before dividing and snap to 1e-6 so that half-way products
    // such as 5% of 2850 land on exactly 142.5.
    let scaled = ((percent * pairs as f64) * 1e6).round() / 1e6;
    (scaled / 100.0 + 0.5).floor() as usize
}

/// The strongest `percent`% of edges (smallest canonical distance).
pub fn top_percent_network(
    m: &DistanceMatrix,
    percent: f64,
    positions: Option<&[[f64; 3]]>,
) -> Result<FunctionalNetwork> {
    if !(percent > 0.0 && percent <= 100.0) {
        return Err(Error::PercentOutOfRange(percent));
    }
    let canonical = to_canonical_distance(m);
    let pairs = m.size * m.size.saturating_sub(1) / 2;
    let count = top_percent_edge_count(percent, pairs).min(pairs);
    let mut edges = sorted_edges(m, &canonical)?;
    edges.truncate(count);
    sort_by_endpoints(&mut edges);
    Ok(FunctionalNetwork {
        kind: NetworkKind::TopPercent,
        percent: Some(percent),
        metric: m.metric.clone(),
        nodes: default_nodes(m, positions),
        edges,
    })
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

impl FunctionalNetwork {
    /// Label such as `mst` or `top10` used in file names.
    pub fn label(&self) -> String {
        match (self.kind, self.percent) {
            (NetworkKind::TopPercent, Some(p)) => format!("top{p}"),
            _ => "mst".to_string(),
        }
    }

    pub fn to_graphml(&self) -> String {
        let mut s = String::new();
        s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        s.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
        for (id, owner, name) in [
            ("x", "node", "x"),
            ("y", "node", "y"),
            ("z", "node", "z"),
            ("weight", "edge", "weight"),
            ("distance", "edge", "distance"),
        ] {
            writeln!(
                s,
                "  <key id=\"{id}\" for=\"{owner}\" attr.name=\"{name}\" attr.type=\"double\"/>"
            )
            .unwrap();
        }
        writeln!(
            s,
            "  <graph id=\"{}-{}\" edgedefault=\"undirected\">",
            self.metric.name,
            self.label()
        )
        .unwrap();
        for n in &self.nodes {
            writeln!(s, "    <node id=\"{}\">", xml_escape(&n.id)).unwrap();
            writeln!(s, "      <data key=\"x\">{:?}</data>", n.x).unwrap();
            writeln!(s, "      <data key=\"y\">{:?}</data>", n.y).unwrap();
            writeln!(s, "      <data key=\"z\">{:?}</data>", n.z).unwrap();
            s.push_str("    </node>\n");
        }
        for e in &self.edges {
            writeln!(
                s,
                "    <edge source=\"{}\" target=\"{}\">",
                xml_escape(&self.nodes[e.source].id),
                xml_escape(&self.nodes[e.target].id)
            )
            .unwrap();
            writeln!(s, "      <data key=\"weight\">{:?}</data>", e.weight).unwrap();
            writeln!(s, "      <data key=\"distance\">{:?}</data>", e.distance).unwrap();
            s.push_str("    </edge>\n");
        }
        s.push_str("  </graph>\n</graphml>\n");
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("network serializes")
    }

    pub fn from_json(text: &str) -> Result<FunctionalNetwork> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            msg: e.to_string(),
        })
    }

    pub fn export(&self, format: ExportFormat) -> Vec<u8> {
        match format {
            ExportFormat::GraphMl => self.to_graphml().into_bytes(),
            ExportFormat::Json => self.to_json().into_bytes(),
        }
    }

    pub fn export_to(&self, format: ExportFormat, out: &mut impl std::io::Write) -> Result<()> {
        out.write_all(&self.export(format))?;
        Ok(())
    }
}
