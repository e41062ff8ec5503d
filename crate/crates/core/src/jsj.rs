//! Symbolic JSJ graphs of groups: vertex types and adjacency rules,
//! twist-group models at cyclic vertices, and registering subgroups wired
//! to the numeric certifier.

use serde::{Deserialize, Serialize};

use crate::cert::{certify_projective_anosov, AnosovVerdict};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::matrix::UnimodularMatrix;
use crate::symmetric::SymmetricSet;
use crate::words::FreeAutomorphism;

/// Vertex types of a JSJ splitting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexKind {
    Cyclic,
    Fuchsian,
    Rigid,
}

impl std::fmt::Display for VertexKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            VertexKind::Cyclic => "cyclic",
            VertexKind::Fuchsian => "fuchsian",
            VertexKind::Rigid => "rigid",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Vertex {
    pub id: String,
    pub kind: VertexKind,
    #[serde(default)]
    pub label: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Edge {
    pub from: String,
    pub to: String,
    #[serde(default)]
    pub label: String,
}

/// An undirected graph of groups with infinite cyclic edge groups.
/// Vertex groups are opaque labels: only the shape and the chosen
/// element matrices matter to the certifier.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphOfGroups {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
}

impl GraphOfGroups {
    pub fn vertex_index(&self, id: &str) -> Result<usize> {
        self.vertices
            .iter()
            .position(|v| v.id == id)
            .ok_or_else(|| Error::UnknownVertex { id: id.to_string() })
    }

    pub fn vertex(&self, id: &str) -> Result<&Vertex> {
        Ok(&self.vertices[self.vertex_index(id)?])
    }

    /// Indices of edges incident to the vertex, in declaration order.
    pub fn incident_edges(&self, id: &str) -> Vec<usize> {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, e)| e.from == id || e.to == id)
            .map(|(i, _)| i)
            .collect()
    }

    /// Neighbor vertex ids in incident-edge order.
    pub fn neighbors(&self, id: &str) -> Vec<String> {
        self.incident_edges(id)
            .into_iter()
            .map(|i| {
                let e = &self.edges[i];
                if e.from == id { e.to.clone() } else { e.from.clone() }
            })
            .collect()
    }

    pub fn degree(&self, id: &str) -> usize {
        self.edges
            .iter()
            .map(|e| (e.from == id) as usize + (e.to == id) as usize)
            .sum()
    }
}

/// Rules a JSJ splitting must satisfy.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "rule")]
pub enum JsjViolation {
    /// No two vertices of the same type are adjacent.
    SameTypeAdjacent { edge: String, kind: VertexKind },
    /// No Fuchsian vertex is adjacent to a rigid vertex.
    FuchsianRigidAdjacent { edge: String },
    Disconnected,
    UnknownEndpoint { edge: String, vertex: String },
}

impl std::fmt::Display for JsjViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            JsjViolation::SameTypeAdjacent { edge, kind } => {
                write!(f, "edge {edge} joins two {kind} vertices")
            }
            JsjViolation::FuchsianRigidAdjacent { edge } => {
                write!(f, "edge {edge} joins a fuchsian vertex to a rigid vertex")
            }
            JsjViolation::Disconnected => write!(f, "graph is not connected"),
            JsjViolation::UnknownEndpoint { edge, vertex } => {
                write!(f, "edge {edge} references unknown vertex {vertex}")
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JsjVerdict {
    pub valid: bool,
    pub violations: Vec<JsjViolation>,
}

/// Checks the adjacency rules of a JSJ splitting and connectivity.
pub fn validate_jsj(graph: &GraphOfGroups) -> JsjVerdict {
    let mut violations = Vec::new();
    let edge_name = |e: &Edge, i: usize| {
        if e.label.is_empty() {
            format!("#{i} ({}-{})", e.from, e.to)
        } else {
            e.label.clone()
        }
    };
    for (i, e) in graph.edges.iter().enumerate() {
        let from = graph.vertex(&e.from);
        let to = graph.vertex(&e.to);
        let (from, to) = match (from, to) {
            (Ok(a), Ok(b)) => (a, b),
            _ => {
                let missing = if graph.vertex(&e.from).is_err() {
                    e.from.clone()
                } else {
                    e.to.clone()
                };
                violations.push(JsjViolation::UnknownEndpoint {
                    edge: edge_name(e, i),
                    vertex: missing,
                });
                continue;
            }
        };
        if from.kind == to.kind {
            violations.push(JsjViolation::SameTypeAdjacent {
                edge: edge_name(e, i),
                kind: from.kind,
            });
        } else if matches!(
            (from.kind, to.kind),
            (VertexKind::Fuchsian, VertexKind::Rigid) | (VertexKind::Rigid, VertexKind::Fuchsian)
        ) {
            violations.push(JsjViolation::FuchsianRigidAdjacent {
                edge: edge_name(e, i),
            });
        }
    }
    if !graph.vertices.is_empty() {
        let mut seen = vec![false; graph.vertices.len()];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for e in &graph.edges {
                for (a, b) in [(&e.from, &e.to), (&e.to, &e.from)] {
                    if *a == graph.vertices[v].id {
                        if let Ok(j) = graph.vertex_index(b) {
                            if !seen[j] {
                                seen[j] = true;
                                stack.push(j);
                            }
                        }
                    }
                }
            }
        }
        if seen.iter().any(|s| !s) {
            violations.push(JsjViolation::Disconnected);
        }
    }
    JsjVerdict {
        valid: violations.is_empty(),
        violations,
    }
}

/// The twist group at a cyclic vertex: free abelian of rank one less
/// than the number of incident edges.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TwistGroupModel {
    pub cyclic_vertex: String,
    pub degree: usize,
    pub rank: usize,
    /// Names of the generating twists about the first `rank` edges.
    pub generators: Vec<String>,
}

/// Builds the twist-group model at a cyclic vertex.
pub fn twist_group(graph: &GraphOfGroups, vertex: &str) -> Result<TwistGroupModel> {
    let v = graph.vertex(vertex)?;
    if v.kind != VertexKind::Cyclic {
        return Err(Error::NotCyclicVertex {
            id: vertex.to_string(),
        });
    }
    let degree = graph.degree(vertex);
    let rank = degree.saturating_sub(1);
    let incident = graph.incident_edges(vertex);
    let generators = incident
        .iter()
        .take(rank)
        .map(|&i| {
            let e = &graph.edges[i];
            let label = if e.label.is_empty() {
                format!("e{}", i + 1)
            } else {
                e.label.clone()
            };
            format!("D_{{a0,{label}}}")
        })
        .collect();
    Ok(TwistGroupModel {
        cyclic_vertex: vertex.to_string(),
        degree,
        rank,
        generators,
    })
}

/// A named matrix assigned to a group element.
#[derive(Debug, Clone)]
pub struct ElementAssignment {
    pub name: String,
    pub matrix: UnimodularMatrix,
}

/// The data of a registering subgroup: a generator of the cyclic vertex
/// group and one element from each adjacent vertex group, with optional
/// matrix realizations.
#[derive(Debug, Clone)]
pub struct RegisteringSpec {
    pub graph: GraphOfGroups,
    pub cyclic_vertex: String,
    /// The element `a_0` of the cyclic vertex group.
    pub a0: Option<ElementAssignment>,
    /// One element per adjacent vertex, in incident-edge order.
    pub neighbors: Vec<(String, Option<ElementAssignment>)>,
}

impl RegisteringSpec {
    /// Validates the shape: the vertex is cyclic and there is exactly one
    /// element per adjacent vertex.
    pub fn validate_shape(&self) -> Result<()> {
        let v = self.graph.vertex(&self.cyclic_vertex)?;
        if v.kind != VertexKind::Cyclic {
            return Err(Error::NotCyclicVertex {
                id: self.cyclic_vertex.clone(),
            });
        }
        let expected = self.graph.neighbors(&self.cyclic_vertex);
        if expected.len() != self.neighbors.len() {
            return Err(Error::InvalidConfig(format!(
                "registering spec lists {} neighbor elements, vertex {} has {} adjacent vertices",
                self.neighbors.len(),
                self.cyclic_vertex,
                expected.len()
            )));
        }
        for (given, expected) in self.neighbors.iter().zip(&expected) {
            if &given.0 != expected {
                return Err(Error::InvalidConfig(format!(
                    "neighbor element for vertex {} listed out of order (expected {})",
                    given.0, expected
                )));
            }
        }
        Ok(())
    }

    /// Number of adjacent vertices `n_v`; the free model has rank
    /// `n_v + 1`.
    pub fn neighbor_count(&self) -> usize {
        self.neighbors.len()
    }

    /// The symmetric set `{a_0^+-1, g_1^+-1, ...}` from the assigned
    /// matrices.
    pub fn symmetric_set(&self) -> Result<SymmetricSet> {
        let a0 = self
            .a0
            .as_ref()
            .ok_or_else(|| Error::MissingMatrix { which: "a0".into() })?;
        let mut generators = vec![(a0.name.clone(), a0.matrix.clone())];
        for (vertex, assignment) in &self.neighbors {
            let a = assignment.as_ref().ok_or_else(|| Error::MissingMatrix {
                which: format!("neighbor {vertex}"),
            })?;
            generators.push((a.name.clone(), a.matrix.clone()));
        }
        SymmetricSet::from_generators(generators)
    }
}

/// The twist about the i-th incident edge, realized as the free-group
/// automorphism `a_i -> a_0^k a_i a_0^-k` on the registering model.
pub fn realize_twist(spec: &RegisteringSpec, edge_index: usize, power: i64) -> Result<FreeAutomorphism> {
    spec.validate_shape()?;
    let n = spec.neighbor_count();
    if edge_index == 0 || edge_index > n {
        return Err(Error::BadEdgeIndex {
            index: edge_index,
            degree: n,
        });
    }
    FreeAutomorphism::twist(n + 1, edge_index, power)
}

/// Summary of a successful registering certification.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegisteringReport {
    pub cyclic_vertex: String,
    pub power: u32,
    /// Generators of the certified free subgroup, e.g. `["a0^3", "g1^3"]`.
    pub subgroup_generators: Vec<String>,
}

/// Runs the full certification on the symmetric set built from the
/// registering data. On success the subgroup generated by the n-th
/// powers of the chosen elements is reported as the witness.
pub fn certify_registering(
    spec: &RegisteringSpec,
    config: &RunConfig,
) -> Result<(AnosovVerdict, RegisteringReport)> {
    spec.validate_shape()?;
    let set = spec.symmetric_set()?;
    let verdict = certify_projective_anosov(&set, config)?;
    let n = verdict.power;
    let mut subgroup_generators = Vec::with_capacity(set.rank());
    for k in 0..set.rank() {
        let name = set.name(2 * k);
        subgroup_generators.push(if n == 1 {
            name.to_string()
        } else {
            format!("{name}^{n}")
        });
    }
    let report = RegisteringReport {
        cyclic_vertex: spec.cyclic_vertex.clone(),
        power: n,
        subgroup_generators,
    };
    Ok((verdict, report))
}

/// The 3-vertex doubling shape: rigid - cyclic - rigid.
pub fn double_graph() -> GraphOfGroups {
    GraphOfGroups {
        vertices: vec![
            Vertex {
                id: "r1".into(),
                kind: VertexKind::Rigid,
                label: "Lambda1".into(),
            },
            Vertex {
                id: "c".into(),
                kind: VertexKind::Cyclic,
                label: "Z".into(),
            },
            Vertex {
                id: "r2".into(),
                kind: VertexKind::Rigid,
                label: "Lambda2".into(),
            },
        ],
        edges: vec![
            Edge {
                from: "r1".into(),
                to: "c".into(),
                label: "e1".into(),
            },
            Edge {
                from: "c".into(),
                to: "r2".into(),
                label: "e2".into(),
            },
        ],
    }
}

/// The 5-vertex chain: rigid - cyclic - fuchsian - cyclic - rigid.
pub fn five_chain_graph() -> GraphOfGroups {
    GraphOfGroups {
        vertices: vec![
            Vertex {
                id: "r1".into(),
                kind: VertexKind::Rigid,
                label: "M1".into(),
            },
            Vertex {
                id: "c1".into(),
                kind: VertexKind::Cyclic,
                label: "Z".into(),
            },
            Vertex {
                id: "f".into(),
                kind: VertexKind::Fuchsian,
                label: "S".into(),
            },
            Vertex {
                id: "c2".into(),
                kind: VertexKind::Cyclic,
                label: "Z".into(),
            },
            Vertex {
                id: "r2".into(),
                kind: VertexKind::Rigid,
                label: "M2".into(),
            },
        ],
        edges: vec![
            Edge {
                from: "r1".into(),
                to: "c1".into(),
                label: "e1".into(),
            },
            Edge {
                from: "c1".into(),
                to: "f".into(),
                label: "e2".into(),
            },
            Edge {
                from: "f".into(),
                to: "c2".into(),
                label: "e3".into(),
            },
            Edge {
                from: "c2".into(),
                to: "r2".into(),
                label: "e4".into(),
            },
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_graphs_validate() {
        assert!(validate_jsj(&double_graph()).valid);
        assert!(validate_jsj(&five_chain_graph()).valid);
    }

    #[test]
    fn adjacent_cyclic_pair_rejected() {
        let mut g = double_graph();
        g.vertices[0].kind = VertexKind::Cyclic;
        let verdict = validate_jsj(&g);
        assert!(!verdict.valid);
        assert!(matches!(
            verdict.violations[0],
            JsjViolation::SameTypeAdjacent {
                kind: VertexKind::Cyclic,
                ..
            }
        ));
    }

    #[test]
    fn fuchsian_rigid_edge_rejected() {
        let mut g = double_graph();
        g.vertices[1].kind = VertexKind::Fuchsian;
        let verdict = validate_jsj(&g);
        assert!(!verdict.valid);
        assert!(verdict
            .violations
            .iter()
            .any(|v| matches!(v, JsjViolation::FuchsianRigidAdjacent { .. })));
    }

    #[test]
    fn disconnected_graph_flagged() {
        let mut g = double_graph();
        g.edges.pop();
        let verdict = validate_jsj(&g);
        assert!(verdict
            .violations
            .iter()
            .any(|v| matches!(v, JsjViolation::Disconnected)));
    }

    #[test]
    fn twist_rank_is_degree_minus_one() {
        let model = twist_group(&double_graph(), "c").unwrap();
        assert_eq!(model.degree, 2);
        assert_eq!(model.rank, 1);
        assert_eq!(model.generators.len(), 1);
        assert_eq!(model.generators[0], "D_{a0,e1}");

        let model = twist_group(&five_chain_graph(), "c1").unwrap();
        assert_eq!(model.rank, 1);
    }

    #[test]
    fn twist_group_needs_cyclic_vertex() {
        assert!(matches!(
            twist_group(&five_chain_graph(), "f"),
            Err(Error::NotCyclicVertex { .. })
        ));
    }

    #[test]
    fn validsize_is_isomorphism_invariant() {
        // relabel vertices and edges of the five-chain
        let mut g = five_chain_graph();
        for (i, v) in g.vertices.iter_mut().enumerate() {
            v.id = format!("w{i}");
        }
        g.edges = vec![
            Edge { from: "w0".into(), to: "w1".into(), label: "x1".into() },
            Edge { from: "w2".into(), to: "w1".into(), label: "x2".into() },
            Edge { from: "w3".into(), to: "w2".into(), label: "x3".into() },
            Edge { from: "w3".into(), to: "w4".into(), label: "x4".into() },
        ];
        assert!(validate_jsj(&g).valid);
    }

    fn degree_three_cyclic_graph() -> GraphOfGroups {
        GraphOfGroups {
            vertices: vec![
                Vertex { id: "c".into(), kind: VertexKind::Cyclic, label: "Z".into() },
                Vertex { id: "r1".into(), kind: VertexKind::Rigid, label: String::new() },
                Vertex { id: "r2".into(), kind: VertexKind::Rigid, label: String::new() },
                Vertex { id: "r3".into(), kind: VertexKind::Rigid, label: String::new() },
            ],
            edges: vec![
                Edge { from: "c".into(), to: "r1".into(), label: "e1".into() },
                Edge { from: "c".into(), to: "r2".into(), label: "e2".into() },
                Edge { from: "c".into(), to: "r3".into(), label: "e3".into() },
            ],
        }
    }

    #[test]
    fn degree_three_twist_rank_two() {
        let model = twist_group(&degree_three_cyclic_graph(), "c").unwrap();
        assert_eq!(model.rank, 2);
    }

    fn spec_without_matrices() -> RegisteringSpec {
        RegisteringSpec {
            graph: double_graph(),
            cyclic_vertex: "c".into(),
            a0: None,
            neighbors: vec![("r1".into(), None), ("r2".into(), None)],
        }
    }

    #[test]
    fn realize_twist_on_double() {
        let spec = spec_without_matrices();
        let phi = realize_twist(&spec, 1, 1).unwrap();
        assert_eq!(phi.rank(), 3);
        // a1 -> a0 a1 a0^-1
        let img = phi.image(1);
        assert_eq!(img.len(), 3);
        // zero power is the identity
        let id = realize_twist(&spec, 2, 0).unwrap();
        assert_eq!(id, FreeAutomorphism::identity(3));
        // out-of-range edge
        assert!(matches!(
            realize_twist(&spec, 3, 1),
            Err(Error::BadEdgeIndex { .. })
        ));
    }

    #[test]
    fn registering_without_matrices_errors() {
        let spec = spec_without_matrices();
        assert!(matches!(
            spec.symmetric_set(),
            Err(Error::MissingMatrix { .. })
        ));
    }
}
