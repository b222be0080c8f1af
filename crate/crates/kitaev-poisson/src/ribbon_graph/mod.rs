//! Doubly ciliated ribbon graphs as combinatorial maps.
//!
//! Conventions: the edge ends at a vertex are listed counterclockwise starting
//! after the cilium, faces are traversed clockwise starting after their cilium.
//! A face step `(e, +)` runs along the right side `r(e)` from `s(e)` to `t(e)`;
//! `(e, −)` runs along the left side backwards, i.e. it is `l(e)^{-1}`.
//!
//! Paths live in the thickened graph, whose vertices are the corners between
//! consecutive edge ends. `corner(v, j)` sits just before the end at position
//! `j`, so `corner(v, 0)` carries the cilium of `v`.

mod desc;
pub mod moves;
pub mod reference;

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

pub use desc::{DirTag, EdgeDesc, EndTag, FaceDesc, GraphDesc, VertexDesc};
pub use moves::{pair_graph, CiliumTarget, MoveRecord};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("unknown reference: {0}")]
    UnknownReference(String),
    #[error("face {0} is not a face path")]
    NotAFacePath(String),
    #[error("edge side {0} is not covered by any face")]
    UncoveredEdgeSide(String),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("invalid vertex ordering: {0}")]
    InvalidOrdering(String),
    #[error("duplicate id {0}")]
    DuplicateId(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("Euler characteristic gives a non-integer genus")]
    NonIntegerGenus,
    #[error("invalid site: {0}")]
    InvalidSite(String),
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("malformed graph description: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum End {
    /// `b(e)`
    Source,
    /// `f(e)`
    Target,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EdgeEnd {
    pub edge: usize,
    pub end: End,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Dir {
    /// along `r(e)`
    Plus,
    /// along `l(e)^{-1}`
    Minus,
}

impl Dir {
    pub fn flip(self) -> Dir {
        match self {
            Dir::Plus => Dir::Minus,
            Dir::Minus => Dir::Plus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FaceStep {
    pub edge: usize,
    pub dir: Dir,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub id: String,
    pub source: usize,
    pub target: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vertex {
    pub id: String,
    pub ends: Vec<EdgeEnd>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Face {
    pub id: String,
    pub steps: Vec<FaceStep>,
}

/// Generators of the thickened graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gen {
    R,
    L,
    F,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Letter {
    pub gen: Gen,
    pub edge: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn new(gen: Gen, edge: usize) -> Self {
        Letter { gen, edge, inverse: false }
    }
    pub fn inv(self) -> Self {
        Letter { inverse: !self.inverse, ..self }
    }
}

/// A word `a_1 ∘ a_2 ∘ … ∘ a_n` stored in written order, so `a_n` is traversed first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Path {
    pub word: Vec<Letter>,
}

impl Path {
    pub fn empty() -> Self {
        Path { word: Vec::new() }
    }
    pub fn letter(l: Letter) -> Self {
        Path { word: vec![l] }
    }
    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }
    /// `self ∘ other`
    pub fn compose(&self, other: &Path) -> Path {
        let mut word = self.word.clone();
        word.extend_from_slice(&other.word);
        Path { word }
    }
    pub fn inverse(&self) -> Path {
        Path { word: self.word.iter().rev().map(|l| l.inv()).collect() }
    }
    /// Free reduction.
    pub fn reduced(&self) -> Path {
        let mut out: Vec<Letter> = Vec::with_capacity(self.word.len());
        for &l in &self.word {
            if out.last() == Some(&l.inv()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Path { word: out }
    }
}

/// A corner of the thickened graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Corner {
    pub vertex: usize,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RibbonGraph {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    faces: Vec<Face>,
}

impl fmt::Display for RibbonGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ribbon graph: {} vertices, {} edges, {} faces", self.vertices.len(), self.edges.len(), self.faces.len())
    }
}

impl RibbonGraph {
    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }
    pub fn faces(&self) -> &[Face] {
        &self.faces
    }
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_index(&self, id: &str) -> Result<usize, GraphError> {
        self.vertices.iter().position(|v| v.id == id).ok_or_else(|| GraphError::UnknownReference(format!("vertex {id}")))
    }
    pub fn edge_index(&self, id: &str) -> Result<usize, GraphError> {
        self.edges.iter().position(|e| e.id == id).ok_or_else(|| GraphError::UnknownReference(format!("edge {id}")))
    }
    pub fn face_index(&self, id: &str) -> Result<usize, GraphError> {
        self.faces.iter().position(|f| f.id == id).ok_or_else(|| GraphError::UnknownReference(format!("face {id}")))
    }

    /// Builds a graph from vertex orderings alone; faces are traced and each
    /// face's cilium is put before the first traced step.
    pub fn with_traced_faces(vertices: Vec<Vertex>, edges: Vec<Edge>) -> Result<Self, GraphError> {
        check_vertices(&vertices, &edges)?;
        let cycles = trace_faces(&vertices, &edges);
        let faces = cycles.into_iter().enumerate().map(|(i, steps)| Face { id: format!("f{}", i + 1), steps }).collect();
        let g = RibbonGraph { vertices, edges, faces };
        g.check_connected()?;
        Ok(g)
    }

    /// Builds a graph from a description and checks every structural invariant.
    pub fn validate(desc: &GraphDesc) -> Result<Self, GraphError> {
        let g = desc.resolve()?;
        g.check()?;
        Ok(g)
    }

    /// Re-checks all invariants; used after moves and on loaded graphs.
    pub fn check(&self) -> Result<(), GraphError> {
        check_vertices(&self.vertices, &self.edges)?;
        let mut seen_ids = HashSet::new();
        for f in &self.faces {
            if !seen_ids.insert(&f.id) {
                return Err(GraphError::DuplicateId(f.id.clone()));
            }
        }
        let cycles = trace_faces(&self.vertices, &self.edges);
        let mut cycle_of: HashMap<FaceStep, usize> = HashMap::new();
        for (c, cyc) in cycles.iter().enumerate() {
            for s in cyc {
                cycle_of.insert(*s, c);
            }
        }
        let mut covered = vec![false; cycles.len()];
        for f in &self.faces {
            let first = f.steps.first().ok_or_else(|| GraphError::NotAFacePath(f.id.clone()))?;
            let c = cycle_of[first];
            if !is_rotation_of(&f.steps, &cycles[c]) || covered[c] {
                return Err(GraphError::NotAFacePath(f.id.clone()));
            }
            covered[c] = true;
        }
        if let Some(c) = covered.iter().position(|x| !x) {
            let s = cycles[c][0];
            let sign = if s.dir == Dir::Plus { "+" } else { "-" };
            return Err(GraphError::UncoveredEdgeSide(format!("({}, {sign})", self.edges[s.edge].id)));
        }
        self.check_connected()
    }

    fn check_connected(&self) -> Result<(), GraphError> {
        if self.vertices.is_empty() {
            return Err(GraphError::Disconnected);
        }
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for e in &self.edges {
            adj[e.source].push(e.target);
            adj[e.target].push(e.source);
        }
        let mut seen = vec![false; self.vertices.len()];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        if seen.iter().all(|&x| x) {
            Ok(())
        } else {
            Err(GraphError::Disconnected)
        }
    }

    pub fn to_desc(&self) -> GraphDesc {
        GraphDesc::from_graph(self)
    }

    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        let desc: GraphDesc = serde_json::from_str(text).map_err(|e| GraphError::Parse(e.to_string()))?;
        Self::validate(&desc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_desc()).expect("graph description serializes")
    }

    pub fn valence(&self, v: usize) -> usize {
        self.vertices[v].ends.len()
    }

    pub fn is_loop(&self, e: usize) -> bool {
        self.edges[e].source == self.edges[e].target
    }

    /// Vertex and position of an edge end.
    pub fn end_position(&self, edge: usize, end: End) -> (usize, usize) {
        let v = match end {
            End::Source => self.edges[edge].source,
            End::Target => self.edges[edge].target,
        };
        let j = self.vertices[v].ends.iter().position(|x| *x == EdgeEnd { edge, end }).expect("edge end listed at its vertex");
        (v, j)
    }

    /// Face and position of an edge side.
    pub fn side_position(&self, edge: usize, dir: Dir) -> (usize, usize) {
        for (fi, f) in self.faces.iter().enumerate() {
            if let Some(k) = f.steps.iter().position(|s| *s == FaceStep { edge, dir }) {
                return (fi, k);
            }
        }
        panic!("edge side not covered by a face")
    }

    /// Face on the right side `r(e)`.
    pub fn right_face(&self, e: usize) -> usize {
        self.side_position(e, Dir::Plus).0
    }
    /// Face on the left side `l(e)`.
    pub fn left_face(&self, e: usize) -> usize {
        self.side_position(e, Dir::Minus).0
    }

    /// `p_k(v) = i_1^{ε_1} ∘ … ∘ i_k^{ε_k}`, with `ε = +1` for `f(e)` and `−1` for `b(e)`.
    pub fn vertex_path(&self, v: usize, k: Option<usize>) -> Path {
        let ends = &self.vertices[v].ends;
        let k = k.unwrap_or(ends.len()).min(ends.len());
        Path {
            word: ends[..k]
                .iter()
                .map(|x| match x.end {
                    End::Target => Letter::new(Gen::F, x.edge),
                    End::Source => Letter::new(Gen::B, x.edge).inv(),
                })
                .collect(),
        }
    }

    /// `p_k(f) = i_k^{ε_k} ∘ … ∘ i_1^{ε_1}`, with `ε = +1` for `r(e)` and `−1` for `l(e)`.
    pub fn face_path(&self, f: usize, k: Option<usize>) -> Path {
        let steps = &self.faces[f].steps;
        let k = k.unwrap_or(steps.len()).min(steps.len());
        Path {
            word: steps[..k]
                .iter()
                .rev()
                .map(|s| match s.dir {
                    Dir::Plus => Letter::new(Gen::R, s.edge),
                    Dir::Minus => Letter::new(Gen::L, s.edge).inv(),
                })
                .collect(),
        }
    }

    /// `f(v)`: the face through the corner at the cilium of `v`.
    pub fn associated_face(&self, v: usize) -> usize {
        let first = self.vertices[v].ends[0];
        match first.end {
            End::Source => self.right_face(first.edge),
            End::Target => self.left_face(first.edge),
        }
    }

    /// `v(f)`: the vertex where the first step of `f` starts.
    pub fn associated_vertex(&self, f: usize) -> usize {
        let s = self.faces[f].steps[0];
        match s.dir {
            Dir::Plus => self.edges[s.edge].source,
            Dir::Minus => self.edges[s.edge].target,
        }
    }

    /// The first end of `v` and the first side of `f` are `b(e), r(e)` or `f(e), l(e)`.
    pub fn is_site(&self, v: usize, f: usize) -> bool {
        let end = self.vertices[v].ends[0];
        let step = self.faces[f].steps[0];
        end.edge == step.edge
            && matches!((end.end, step.dir), (End::Source, Dir::Plus) | (End::Target, Dir::Minus))
            && self.associated_vertex(f) == v
            && self.associated_face(v) == f
    }

    pub fn is_paired(&self) -> bool {
        let sites_ok = (0..self.vertices.len()).all(|v| self.is_site(v, self.associated_face(v)))
            && (0..self.faces.len()).all(|f| self.is_site(self.associated_vertex(f), f));
        let no_loops = (0..self.edges.len()).all(|e| !self.is_loop(e));
        let sides_differ = (0..self.edges.len()).all(|e| self.left_face(e) != self.right_face(e));
        sites_ok && no_loops && sides_differ
    }

    /// All sites `(v, f(v))`.
    pub fn sites(&self) -> Vec<(usize, usize)> {
        (0..self.vertices.len()).map(|v| (v, self.associated_face(v))).filter(|&(v, f)| self.is_site(v, f)).collect()
    }

    /// `(genus, boundary_count)` of the surface with annuli glued to the marked
    /// faces and disks to the others.
    pub fn surface_signature(&self, annulus_faces: &[usize]) -> Result<(i64, usize), GraphError> {
        let marked: HashSet<usize> = annulus_faces.iter().copied().collect();
        if marked.is_empty() {
            return Err(GraphError::PreconditionViolated("at least one annulus face".into()));
        }
        if let Some(f) = marked.iter().find(|&&f| f >= self.faces.len()) {
            return Err(GraphError::UnknownReference(format!("face index {f}")));
        }
        let b = marked.len() as i64;
        let chi = self.vertices.len() as i64 - self.edges.len() as i64 + self.faces.len() as i64 - b;
        let twice_g = 2 - b - chi;
        if twice_g < 0 || twice_g % 2 != 0 {
            return Err(GraphError::NonIntegerGenus);
        }
        Ok((twice_g / 2, marked.len()))
    }

    /// Source and target corner of a path.
    pub fn path_endpoints(&self, p: &Path) -> Result<Option<(Corner, Corner)>, GraphError> {
        let mut ends: Option<(Corner, Corner)> = None;
        for l in p.word.iter().rev() {
            if l.edge >= self.edges.len() {
                return Err(GraphError::InvalidPath(format!("edge index {}", l.edge)));
            }
            let (a, b) = self.letter_endpoints(*l);
            ends = match ends {
                None => Some((a, b)),
                Some((s, t)) if t == a => Some((s, b)),
                Some(_) => return Err(GraphError::InvalidPath("consecutive letters do not compose".into())),
            };
        }
        Ok(ends)
    }

    fn letter_endpoints(&self, l: Letter) -> (Corner, Corner) {
        let e = l.edge;
        let (s, j) = self.end_position(e, End::Source);
        let (t, k) = self.end_position(e, End::Target);
        let c = |v: usize, i: usize| Corner { vertex: v, index: i % self.valence(v) };
        let (a, b) = match l.gen {
            Gen::B => (c(s, j), c(s, j + 1)),
            Gen::F => (c(t, k + 1), c(t, k)),
            Gen::R => (c(s, j), c(t, k + 1)),
            Gen::L => (c(s, j + 1), c(t, k)),
        };
        if l.inverse {
            (b, a)
        } else {
            (a, b)
        }
    }

    // --- index maintenance for moves ---

    fn remove_edge_slot(&mut self, idx: usize) {
        self.edges.remove(idx);
        let fix = |e: &mut usize| {
            if *e > idx {
                *e -= 1
            }
        };
        for v in &mut self.vertices {
            v.ends.iter_mut().for_each(|x| fix(&mut x.edge));
        }
        for f in &mut self.faces {
            f.steps.iter_mut().for_each(|s| fix(&mut s.edge));
        }
    }

    fn remove_vertex_slot(&mut self, idx: usize) {
        self.vertices.remove(idx);
        for e in &mut self.edges {
            if e.source > idx {
                e.source -= 1;
            }
            if e.target > idx {
                e.target -= 1;
            }
        }
    }

    fn fresh_id(&self, base: &str) -> String {
        let taken = |s: &str| {
            self.vertices.iter().any(|v| v.id == s) || self.edges.iter().any(|e| e.id == s) || self.faces.iter().any(|f| f.id == s)
        };
        let mut id = base.to_string();
        while taken(&id) {
            id.push('\'');
        }
        id
    }
}

fn is_rotation_of(a: &[FaceStep], b: &[FaceStep]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let Some(start) = b.iter().position(|s| *s == a[0]) else { return false };
    (0..a.len()).all(|i| a[i] == b[(start + i) % b.len()])
}

fn check_vertices(vertices: &[Vertex], edges: &[Edge]) -> Result<(), GraphError> {
    let mut ids = HashSet::new();
    for v in vertices {
        if !ids.insert(v.id.as_str()) {
            return Err(GraphError::DuplicateId(v.id.clone()));
        }
    }
    for e in edges {
        if !ids.insert(e.id.as_str()) {
            return Err(GraphError::DuplicateId(e.id.clone()));
        }
        if e.source >= vertices.len() || e.target >= vertices.len() {
            return Err(GraphError::UnknownReference(format!("endpoint of edge {}", e.id)));
        }
    }
    let mut seen = HashSet::new();
    for (vi, v) in vertices.iter().enumerate() {
        if v.ends.is_empty() {
            return Err(GraphError::InvalidOrdering(format!("vertex {} has no edge ends", v.id)));
        }
        for x in &v.ends {
            let e = edges.get(x.edge).ok_or_else(|| GraphError::UnknownReference(format!("edge index {}", x.edge)))?;
            let at = if x.end == End::Source { e.source } else { e.target };
            if at != vi {
                return Err(GraphError::InvalidOrdering(format!("end of edge {} listed at vertex {}", e.id, v.id)));
            }
            if !seen.insert(*x) {
                return Err(GraphError::InvalidOrdering(format!("end of edge {} listed twice", e.id)));
            }
        }
    }
    if seen.len() != 2 * edges.len() {
        return Err(GraphError::InvalidOrdering("some edge end is missing from the vertex orderings".into()));
    }
    Ok(())
}

/// Maximal-right-turn face cycles, each starting at its lowest unvisited side.
pub fn trace_faces(vertices: &[Vertex], edges: &[Edge]) -> Vec<Vec<FaceStep>> {
    let mut pos: HashMap<EdgeEnd, (usize, usize)> = HashMap::new();
    for (vi, v) in vertices.iter().enumerate() {
        for (j, x) in v.ends.iter().enumerate() {
            pos.insert(*x, (vi, j));
        }
    }
    let next = |s: FaceStep| -> FaceStep {
        let arrive = match s.dir {
            Dir::Plus => EdgeEnd { edge: s.edge, end: End::Target },
            Dir::Minus => EdgeEnd { edge: s.edge, end: End::Source },
        };
        let (v, j) = pos[&arrive];
        let ends = &vertices[v].ends;
        let out = ends[(j + 1) % ends.len()];
        match out.end {
            End::Source => FaceStep { edge: out.edge, dir: Dir::Plus },
            End::Target => FaceStep { edge: out.edge, dir: Dir::Minus },
        }
    };
    let mut visited = HashSet::new();
    let mut cycles = Vec::new();
    for e in 0..edges.len() {
        for dir in [Dir::Plus, Dir::Minus] {
            let start = FaceStep { edge: e, dir };
            if visited.contains(&start) {
                continue;
            }
            let mut cyc = vec![start];
            visited.insert(start);
            let mut s = next(start);
            while s != start {
                visited.insert(s);
                cyc.push(s);
                s = next(s);
            }
            cycles.push(cyc);
        }
    }
    cycles
}
