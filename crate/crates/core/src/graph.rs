//! Metric graph data model.
//!
//! A [`MetricGraph`] is a simple undirected graph whose edges carry positive
//! lengths, together with a list of semi-infinite leads (scattering channels)
//! attached to vertices. Leads are kept apart from edges: they contribute to
//! vertex degrees but never appear in neighbour lists.

use std::collections::{HashSet, VecDeque};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("edge {edge} is a self-loop at vertex {vertex}")]
    SelfLoop { edge: usize, vertex: usize },

    #[error("edge {edge} duplicates edge {first} between vertices {u} and {v}")]
    DuplicateEdge { edge: usize, first: usize, u: usize, v: usize },

    #[error("{what} index {index} out of range (limit {limit})")]
    IndexOutOfRange { what: &'static str, index: usize, limit: usize },

    #[error("edge {edge} has non-positive or non-finite length {length}")]
    InvalidLength { edge: usize, length: f64 },

    #[error("vertex {vertex} has degree {degree}; Dirichlet is only allowed on dead ends")]
    DirichletOnInteriorVertex { vertex: usize, degree: usize },

    #[error("vertex {vertex} is not reachable from channel 0")]
    DisconnectedChannel { vertex: usize },

    #[error("vertex {vertex} is isolated")]
    IsolatedVertex { vertex: usize },

    #[error("graph has no leads")]
    NoLeads,

    #[error("boundary table has {got} entries for {expected} vertices")]
    BoundaryLength { expected: usize, got: usize },

    #[error("lead channels must be dense 0..{count}; channel {channel} is invalid")]
    BadChannel { channel: usize, count: usize },

    #[error("subdivision fraction {0} is outside (0, 1)")]
    FractionOutOfRange(f64),

    #[error("scale factor {0} is not positive")]
    NonPositiveFactor(f64),

    #[error("graph file: {0}")]
    File(String),
}

/// Vertex boundary condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum BoundaryKind {
    #[default]
    Neumann,
    Dirichlet,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub length: f64,
}

impl Edge {
    pub fn new(u: usize, v: usize, length: f64) -> Self {
        Self { u, v, length }
    }

    /// Unit-length edge.
    pub fn unit(u: usize, v: usize) -> Self {
        Self::new(u, v, 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lead {
    pub vertex: usize,
    pub channel: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Forward,
    Backward,
}

/// An oriented copy of an edge. Bond `2s` is edge `s` traversed `u -> v`,
/// bond `2s + 1` is the same edge traversed `v -> u`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DirectedBond {
    pub edge: usize,
    pub orientation: Orientation,
    pub index: usize,
    pub from: usize,
    pub to: usize,
}

impl DirectedBond {
    pub fn reversed_index(&self) -> usize {
        self.index ^ 1
    }
}

/// Validated, immutable open metric graph.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricGraph {
    num_vertices: usize,
    edges: Vec<Edge>,
    leads: Vec<Lead>,
    boundary: Vec<BoundaryKind>,
    // (neighbour, edge index) per vertex, in edge declaration order
    adjacency: Vec<Vec<(usize, usize)>>,
    degrees: Vec<usize>,
}

impl MetricGraph {
    /// Validates the inputs and precomputes neighbour lists and degrees.
    ///
    /// `leads` may be given in any order but their channels must be exactly
    /// `0..leads.len()`; they are stored sorted by channel.
    pub fn build(
        num_vertices: usize,
        edges: Vec<Edge>,
        mut leads: Vec<Lead>,
        boundary: Vec<BoundaryKind>,
    ) -> Result<Self, GraphError> {
        if boundary.len() != num_vertices {
            return Err(GraphError::BoundaryLength { expected: num_vertices, got: boundary.len() });
        }
        if leads.is_empty() {
            return Err(GraphError::NoLeads);
        }

        let mut seen = std::collections::HashMap::new();
        for (s, e) in edges.iter().enumerate() {
            for x in [e.u, e.v] {
                if x >= num_vertices {
                    return Err(GraphError::IndexOutOfRange { what: "vertex", index: x, limit: num_vertices });
                }
            }
            if e.u == e.v {
                return Err(GraphError::SelfLoop { edge: s, vertex: e.u });
            }
            if !(e.length.is_finite() && e.length > 0.0) {
                return Err(GraphError::InvalidLength { edge: s, length: e.length });
            }
            let key = (e.u.min(e.v), e.u.max(e.v));
            if let Some(&first) = seen.get(&key) {
                return Err(GraphError::DuplicateEdge { edge: s, first, u: key.0, v: key.1 });
            }
            seen.insert(key, s);
        }

        let count = leads.len();
        let mut channels = HashSet::new();
        for lead in &leads {
            if lead.vertex >= num_vertices {
                return Err(GraphError::IndexOutOfRange { what: "vertex", index: lead.vertex, limit: num_vertices });
            }
            if lead.channel >= count || !channels.insert(lead.channel) {
                return Err(GraphError::BadChannel { channel: lead.channel, count });
            }
        }
        leads.sort_by_key(|l| l.channel);

        let mut adjacency = vec![Vec::new(); num_vertices];
        let mut degrees = vec![0usize; num_vertices];
        for (s, e) in edges.iter().enumerate() {
            adjacency[e.u].push((e.v, s));
            adjacency[e.v].push((e.u, s));
            degrees[e.u] += 1;
            degrees[e.v] += 1;
        }
        for lead in &leads {
            degrees[lead.vertex] += 1;
        }

        for (vertex, &degree) in degrees.iter().enumerate() {
            if degree == 0 {
                return Err(GraphError::IsolatedVertex { vertex });
            }
            if boundary[vertex] == BoundaryKind::Dirichlet && degree != 1 {
                return Err(GraphError::DirichletOnInteriorVertex { vertex, degree });
            }
        }

        // every vertex must be reachable from the vertex carrying channel 0
        let mut reached = vec![false; num_vertices];
        let mut queue = VecDeque::from([leads[0].vertex]);
        reached[leads[0].vertex] = true;
        while let Some(x) = queue.pop_front() {
            for &(y, _) in &adjacency[x] {
                if !reached[y] {
                    reached[y] = true;
                    queue.push_back(y);
                }
            }
        }
        if let Some(vertex) = reached.iter().position(|r| !r) {
            return Err(GraphError::DisconnectedChannel { vertex });
        }

        Ok(Self { num_vertices, edges, leads, boundary, adjacency, degrees })
    }

    /// Builds a graph with all vertices Neumann and leads on `lead_vertices`
    /// in channel order.
    pub fn neumann(num_vertices: usize, edges: Vec<Edge>, lead_vertices: &[usize]) -> Result<Self, GraphError> {
        let leads = lead_vertices
            .iter()
            .enumerate()
            .map(|(channel, &vertex)| Lead { vertex, channel })
            .collect();
        Self::build(num_vertices, edges, leads, vec![BoundaryKind::Neumann; num_vertices])
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_leads(&self) -> usize {
        self.leads.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Leads sorted by channel.
    pub fn leads(&self) -> &[Lead] {
        &self.leads
    }

    pub fn boundary(&self) -> &[BoundaryKind] {
        &self.boundary
    }

    pub fn boundary_at(&self, v: usize) -> BoundaryKind {
        self.boundary[v]
    }

    /// Edge neighbours of `v` with the connecting edge index.
    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adjacency[v]
    }

    /// Number of incident edges plus incident leads.
    pub fn degree(&self, v: usize) -> Result<usize, GraphError> {
        self.degrees
            .get(v)
            .copied()
            .ok_or(GraphError::IndexOutOfRange { what: "vertex", index: v, limit: self.num_vertices })
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    /// Channels attached at vertex `v`, ascending.
    pub fn channels_at(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.leads.iter().filter(move |l| l.vertex == v).map(|l| l.channel)
    }

    pub fn lead_vertex(&self, channel: usize) -> Option<usize> {
        self.leads.get(channel).map(|l| l.vertex)
    }

    pub fn directed_bonds(&self) -> Vec<DirectedBond> {
        self.edges
            .iter()
            .enumerate()
            .flat_map(|(s, e)| {
                [
                    DirectedBond { edge: s, orientation: Orientation::Forward, index: 2 * s, from: e.u, to: e.v },
                    DirectedBond { edge: s, orientation: Orientation::Backward, index: 2 * s + 1, from: e.v, to: e.u },
                ]
            })
            .collect()
    }

    /// Index of the directed bond leaving `from` along edge `edge`.
    pub fn bond_index(&self, edge: usize, from: usize) -> usize {
        if self.edges[edge].u == from {
            2 * edge
        } else {
            2 * edge + 1
        }
    }

    /// Common edge length, if every edge has the same length.
    pub fn common_length(&self) -> Option<f64> {
        let first = self.edges.first()?.length;
        self.edges.iter().all(|e| e.length == first).then_some(first)
    }

    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).sum()
    }

    /// Splits `edge` with a new degree-2 Neumann vertex placed at
    /// `fraction` of its length from `u`. The new vertex gets index
    /// `num_vertices`; the original edge keeps its index and ends at it.
    pub fn subdivide_edge(&self, edge: usize, fraction: f64) -> Result<Self, GraphError> {
        let Some(&old) = self.edges.get(edge) else {
            return Err(GraphError::IndexOutOfRange { what: "edge", index: edge, limit: self.edges.len() });
        };
        if !(fraction > 0.0 && fraction < 1.0) {
            return Err(GraphError::FractionOutOfRange(fraction));
        }
        let mid = self.num_vertices;
        let mut edges = self.edges.clone();
        edges[edge] = Edge::new(old.u, mid, fraction * old.length);
        edges.push(Edge::new(mid, old.v, (1.0 - fraction) * old.length));
        let mut boundary = self.boundary.clone();
        boundary.push(BoundaryKind::Neumann);
        Self::build(self.num_vertices + 1, edges, self.leads.clone(), boundary)
    }

    pub fn scale_lengths(&self, factor: f64) -> Result<Self, GraphError> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(GraphError::NonPositiveFactor(factor));
        }
        let mut scaled = self.clone();
        for e in &mut scaled.edges {
            e.length *= factor;
        }
        Ok(scaled)
    }

    /// Same topology with every dead end switched to `kind`.
    pub fn with_dead_ends(&self, kind: BoundaryKind) -> Self {
        let mut g = self.clone();
        for (v, b) in g.boundary.iter_mut().enumerate() {
            if g.degrees[v] == 1 {
                *b = kind;
            }
        }
        g
    }

    pub fn to_file(&self) -> GraphFile {
        GraphFile {
            num_vertices: self.num_vertices,
            edges: self.edges.iter().map(|e| (e.u, e.v, e.length)).collect(),
            leads: self.leads.iter().map(|l| l.vertex).collect(),
            dirichlet_vertices: {
                let d: Vec<usize> = (0..self.num_vertices)
                    .filter(|&v| self.boundary[v] == BoundaryKind::Dirichlet)
                    .collect();
                (!d.is_empty()).then_some(d)
            },
        }
    }
}

/// On-disk JSON form of a graph. Lead array order is channel order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub num_vertices: usize,
    pub edges: Vec<(usize, usize, f64)>,
    pub leads: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dirichlet_vertices: Option<Vec<usize>>,
}

impl GraphFile {
    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        serde_json::from_str(text).map_err(|e| GraphError::File(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self, GraphError> {
        let text = std::fs::read_to_string(path).map_err(|e| GraphError::File(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn into_graph(self) -> Result<MetricGraph, GraphError> {
        let mut boundary = vec![BoundaryKind::Neumann; self.num_vertices];
        for v in self.dirichlet_vertices.unwrap_or_default() {
            if v >= self.num_vertices {
                return Err(GraphError::IndexOutOfRange { what: "vertex", index: v, limit: self.num_vertices });
            }
            boundary[v] = BoundaryKind::Dirichlet;
        }
        let edges = self.edges.into_iter().map(|(u, v, l)| Edge::new(u, v, l)).collect();
        let leads = self
            .leads
            .into_iter()
            .enumerate()
            .map(|(channel, vertex)| Lead { vertex, channel })
            .collect();
        MetricGraph::build(self.num_vertices, edges, leads, boundary)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alpha() -> MetricGraph {
        MetricGraph::neumann(2, vec![Edge::unit(0, 1)], &[0, 0]).unwrap()
    }

    #[test]
    fn smallest_open_graph() {
        let g = MetricGraph::neumann(2, vec![Edge::unit(0, 1)], &[0, 1]).unwrap();
        assert_eq!(g.degrees(), &[2, 2]);
    }

    #[test]
    fn alpha_degrees() {
        let g = alpha();
        assert_eq!(g.degree(0).unwrap(), 3);
        assert_eq!(g.degree(1).unwrap(), 1);
        assert!(matches!(g.degree(2), Err(GraphError::IndexOutOfRange { index: 2, .. })));
    }

    #[test]
    fn beta_center_degree() {
        let g = MetricGraph::neumann(3, vec![Edge::unit(0, 1), Edge::unit(0, 2)], &[0, 0]).unwrap();
        assert_eq!(g.degree(0).unwrap(), 4);
        assert_eq!(g.degree(2).unwrap(), 1);
    }

    #[test]
    fn mid_chain_degree() {
        let g = MetricGraph::neumann(3, vec![Edge::unit(0, 1), Edge::unit(1, 2)], &[0, 2]).unwrap();
        assert_eq!(g.degree(1).unwrap(), 2);
    }

    #[test]
    fn rejects_bad_input() {
        let n = vec![BoundaryKind::Neumann; 2];
        let lead0 = vec![Lead { vertex: 0, channel: 0 }];
        assert_eq!(
            MetricGraph::build(2, vec![Edge::unit(0, 0)], lead0.clone(), n.clone()),
            Err(GraphError::SelfLoop { edge: 0, vertex: 0 })
        );
        assert!(matches!(
            MetricGraph::build(2, vec![Edge::unit(0, 1), Edge::unit(1, 0)], lead0.clone(), n.clone()),
            Err(GraphError::DuplicateEdge { edge: 1, first: 0, .. })
        ));
        assert!(matches!(
            MetricGraph::build(2, vec![Edge::unit(0, 2)], lead0.clone(), n.clone()),
            Err(GraphError::IndexOutOfRange { index: 2, .. })
        ));
        assert!(matches!(
            MetricGraph::build(2, vec![Edge::new(0, 1, 0.0)], lead0.clone(), n.clone()),
            Err(GraphError::InvalidLength { .. })
        ));
        assert!(matches!(
            MetricGraph::build(2, vec![Edge::unit(0, 1)], lead0.clone(), vec![BoundaryKind::Dirichlet, BoundaryKind::Neumann]),
            Err(GraphError::DirichletOnInteriorVertex { vertex: 0, degree: 2 })
        ));
        assert!(matches!(
            MetricGraph::build(4, vec![Edge::unit(0, 1), Edge::unit(2, 3)], lead0.clone(), vec![BoundaryKind::Neumann; 4]),
            Err(GraphError::DisconnectedChannel { vertex: 2 })
        ));
        assert!(matches!(
            MetricGraph::build(3, vec![Edge::unit(0, 1)], lead0.clone(), vec![BoundaryKind::Neumann; 3]),
            Err(GraphError::IsolatedVertex { vertex: 2 })
        ));
        assert!(matches!(
            MetricGraph::build(2, vec![Edge::unit(0, 1)], vec![Lead { vertex: 0, channel: 1 }], n.clone()),
            Err(GraphError::BadChannel { .. })
        ));
        assert_eq!(MetricGraph::build(2, vec![Edge::unit(0, 1)], vec![], n), Err(GraphError::NoLeads));
    }

    #[test]
    fn degree_sum_rule() {
        let g = MetricGraph::neumann(
            4,
            vec![Edge::unit(0, 1), Edge::unit(1, 2), Edge::unit(2, 0), Edge::unit(2, 3)],
            &[0, 3, 1],
        )
        .unwrap();
        let sum: usize = g.degrees().iter().sum();
        assert_eq!(sum, 2 * g.num_edges() + g.num_leads());
    }

    #[test]
    fn bond_ordering() {
        let g = alpha();
        let bonds = g.directed_bonds();
        assert_eq!(bonds.len(), 2);
        assert_eq!((bonds[0].from, bonds[0].to, bonds[0].orientation), (0, 1, Orientation::Forward));
        assert_eq!((bonds[1].from, bonds[1].to, bonds[1].orientation), (1, 0, Orientation::Backward));
        for b in &bonds {
            assert_eq!(bonds[b.reversed_index()].reversed_index(), b.index);
        }
        let lone = MetricGraph::neumann(1, vec![], &[0]).unwrap();
        assert!(lone.directed_bonds().is_empty());
    }

    #[test]
    fn subdivide() {
        let g = alpha().subdivide_edge(0, 0.5).unwrap();
        assert_eq!(g.num_vertices(), 3);
        assert_eq!(g.num_edges(), 2);
        assert!(g.edges().iter().all(|e| e.length == 0.5));
        assert_eq!(g.degree(2).unwrap(), 2);
        assert_eq!(alpha().subdivide_edge(0, 0.0), Err(GraphError::FractionOutOfRange(0.0)));
        assert!(matches!(alpha().subdivide_edge(3, 0.5), Err(GraphError::IndexOutOfRange { .. })));
        let odd = alpha().scale_lengths(1.7).unwrap().subdivide_edge(0, 0.3).unwrap();
        assert!((odd.total_length() - 1.7).abs() < 1e-15);
    }

    #[test]
    fn scaling() {
        assert_eq!(alpha().scale_lengths(1.0).unwrap(), alpha());
        assert_eq!(alpha().scale_lengths(2.0).unwrap().common_length(), Some(2.0));
        assert_eq!(alpha().scale_lengths(-1.0), Err(GraphError::NonPositiveFactor(-1.0)));
    }

    #[test]
    fn graph_file_round_trip() {
        let g = alpha().with_dead_ends(BoundaryKind::Dirichlet);
        let text = serde_json::to_string(&g.to_file()).unwrap();
        assert_eq!(GraphFile::from_json(&text).unwrap().into_graph().unwrap(), g);
    }

    #[test]
    fn graph_file_rejects_unknown_fields() {
        let text = r#"{"num_vertices": 2, "edges": [[0, 1, 1.0]], "leads": [0, 0], "extra": 1}"#;
        assert!(matches!(GraphFile::from_json(text), Err(GraphError::File(_))));
        let ok = r#"{"num_vertices": 2, "edges": [[0, 1, 1.0]], "leads": [0, 0], "dirichlet_vertices": [1]}"#;
        let g = GraphFile::from_json(ok).unwrap().into_graph().unwrap();
        assert_eq!(g.boundary_at(1), BoundaryKind::Dirichlet);
    }
}
