//! JSON graph description with string ids.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{Dir, Edge, EdgeEnd, End, Face, FaceStep, GraphError, RibbonGraph, Vertex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EndTag {
    #[serde(rename = "s")]
    S,
    #[serde(rename = "t")]
    T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DirTag {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexDesc {
    pub id: String,
    pub ends: Vec<(String, EndTag)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDesc {
    pub id: String,
    pub source: String,
    pub target: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FaceDesc {
    pub id: String,
    pub path: Vec<(String, DirTag)>,
}

/// `{"vertices": [...], "edges": [...], "faces": [...]}`, everything in cilium order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDesc {
    pub vertices: Vec<VertexDesc>,
    pub edges: Vec<EdgeDesc>,
    pub faces: Vec<FaceDesc>,
}

impl GraphDesc {
    pub(super) fn from_graph(g: &RibbonGraph) -> Self {
        let eid = |e: usize| g.edges[e].id.clone();
        GraphDesc {
            vertices: g
                .vertices
                .iter()
                .map(|v| VertexDesc {
                    id: v.id.clone(),
                    ends: v
                        .ends
                        .iter()
                        .map(|x| (eid(x.edge), if x.end == End::Source { EndTag::S } else { EndTag::T }))
                        .collect(),
                })
                .collect(),
            edges: g
                .edges
                .iter()
                .map(|e| EdgeDesc {
                    id: e.id.clone(),
                    source: g.vertices[e.source].id.clone(),
                    target: g.vertices[e.target].id.clone(),
                })
                .collect(),
            faces: g
                .faces
                .iter()
                .map(|f| FaceDesc {
                    id: f.id.clone(),
                    path: f
                        .steps
                        .iter()
                        .map(|s| (eid(s.edge), if s.dir == Dir::Plus { DirTag::Plus } else { DirTag::Minus }))
                        .collect(),
                })
                .collect(),
        }
    }

    /// Resolves ids to indices without checking the ribbon structure.
    pub(super) fn resolve(&self) -> Result<RibbonGraph, GraphError> {
        let mut vix = HashMap::new();
        for (i, v) in self.vertices.iter().enumerate() {
            if vix.insert(v.id.as_str(), i).is_some() {
                return Err(GraphError::DuplicateId(v.id.clone()));
            }
        }
        let mut eix = HashMap::new();
        for (i, e) in self.edges.iter().enumerate() {
            if eix.insert(e.id.as_str(), i).is_some() {
                return Err(GraphError::DuplicateId(e.id.clone()));
            }
        }
        let vert = |id: &str| vix.get(id).copied().ok_or_else(|| GraphError::UnknownReference(format!("vertex {id}")));
        let edge = |id: &str| eix.get(id).copied().ok_or_else(|| GraphError::UnknownReference(format!("edge {id}")));
        let edges = self
            .edges
            .iter()
            .map(|e| Ok(Edge { id: e.id.clone(), source: vert(&e.source)?, target: vert(&e.target)? }))
            .collect::<Result<Vec<_>, GraphError>>()?;
        let vertices = self
            .vertices
            .iter()
            .map(|v| {
                let ends = v
                    .ends
                    .iter()
                    .map(|(e, t)| Ok(EdgeEnd { edge: edge(e)?, end: if *t == EndTag::S { End::Source } else { End::Target } }))
                    .collect::<Result<Vec<_>, GraphError>>()?;
                Ok(Vertex { id: v.id.clone(), ends })
            })
            .collect::<Result<Vec<_>, GraphError>>()?;
        let faces = self
            .faces
            .iter()
            .map(|f| {
                let steps = f
                    .path
                    .iter()
                    .map(|(e, d)| Ok(FaceStep { edge: edge(e)?, dir: if *d == DirTag::Plus { Dir::Plus } else { Dir::Minus } }))
                    .collect::<Result<Vec<_>, GraphError>>()?;
                Ok(Face { id: f.id.clone(), steps })
            })
            .collect::<Result<Vec<_>, GraphError>>()?;
        Ok(RibbonGraph { vertices, edges, faces })
    }
}
