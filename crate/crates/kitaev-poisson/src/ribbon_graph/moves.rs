//! Combinatorial graph moves and the pairing procedure.
//!
//! Every move returns the new graph together with a [`MoveRecord`] naming all
//! ids it touched or created, so the matching phase-space map can be replayed.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{Dir, Edge, EdgeEnd, End, Face, FaceStep, GraphError, RibbonGraph, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CiliumTarget {
    Vertex(String),
    Face(String),
}

/// One replayable move. Optional fields name created or consumed objects; they
/// may be left out of hand-written scripts and are always filled in on output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MoveRecord {
    Reverse {
        edge: String,
    },
    SplitEdge {
        edge: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        first: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        second: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        vertex: Option<String>,
    },
    GlueBivalent {
        vertex: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        first: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        second: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        edge: Option<String>,
    },
    DoubleEdge {
        edge: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        first: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        second: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        face: Option<String>,
    },
    GlueFace {
        face: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        first: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        second: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        edge: Option<String>,
    },
    Erase {
        edge: String,
        /// Face merged into its neighbour; defaults to the face left of the edge.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        absorbed: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        survivor: Option<String>,
    },
    ShiftCilium {
        target: CiliumTarget,
        steps: usize,
    },
    Pair {
        sites: Vec<(String, String)>,
    },
}

fn violated(msg: impl Into<String>) -> GraphError {
    GraphError::PreconditionViolated(msg.into())
}

fn name_or_fresh(g: &RibbonGraph, wanted: &Option<String>, base: &str) -> Result<String, GraphError> {
    match wanted {
        Some(id) if g.fresh_id(id) != *id => Err(GraphError::DuplicateId(id.clone())),
        Some(id) => Ok(id.clone()),
        None => Ok(g.fresh_id(base)),
    }
}

impl RibbonGraph {
    fn insert_edge_slot(&mut self, idx: usize, edge: Edge) {
        for v in &mut self.vertices {
            v.ends.iter_mut().filter(|x| x.edge >= idx).for_each(|x| x.edge += 1);
        }
        for f in &mut self.faces {
            f.steps.iter_mut().filter(|s| s.edge >= idx).for_each(|s| s.edge += 1);
        }
        self.edges.insert(idx, edge);
    }

    fn replace_end(&mut self, v: usize, old: EdgeEnd, new: &[EdgeEnd]) {
        let ends = &mut self.vertices[v].ends;
        let j = ends.iter().position(|x| *x == old).expect("end present");
        ends.splice(j..=j, new.iter().copied());
    }

    fn replace_step(&mut self, old: FaceStep, new: &[FaceStep]) {
        let (f, k) = self.side_position(old.edge, old.dir);
        self.faces[f].steps.splice(k..=k, new.iter().copied());
    }
}

/// Swaps source and target of `e`; the edge keeps its id.
pub fn reverse_edge(g: &RibbonGraph, e: usize) -> Result<(RibbonGraph, MoveRecord), GraphError> {
    check_edge(g, e)?;
    let mut h = g.clone();
    let ed = &mut h.edges[e];
    std::mem::swap(&mut ed.source, &mut ed.target);
    for v in &mut h.vertices {
        for x in v.ends.iter_mut().filter(|x| x.edge == e) {
            x.end = if x.end == End::Source { End::Target } else { End::Source };
        }
    }
    for f in &mut h.faces {
        for s in f.steps.iter_mut().filter(|s| s.edge == e) {
            s.dir = s.dir.flip();
        }
    }
    Ok((h, MoveRecord::Reverse { edge: g.edges[e].id.clone() }))
}

fn check_edge(g: &RibbonGraph, e: usize) -> Result<(), GraphError> {
    if e < g.edges.len() {
        Ok(())
    } else {
        Err(GraphError::UnknownReference(format!("edge index {e}")))
    }
}

/// Inserts a bivalent vertex `v_m` with ordering `f(e_1) < b(e_2)`.
pub fn split_edge(g: &RibbonGraph, e: usize) -> Result<(RibbonGraph, MoveRecord), GraphError> {
    split_edge_named(g, e, &None, &None, &None)
}

fn split_edge_named(
    g: &RibbonGraph,
    e: usize,
    first: &Option<String>,
    second: &Option<String>,
    vertex: &Option<String>,
) -> Result<(RibbonGraph, MoveRecord), GraphError> {
    check_edge(g, e)?;
    let base = g.edges[e].id.clone();
    let id1 = name_or_fresh(g, first, &format!("{base}.a"))?;
    let id2 = name_or_fresh(g, second, &format!("{base}.b"))?;
    let vid = name_or_fresh(g, vertex, &format!("{base}.v"))?;
    if id1 == id2 || id1 == vid || id2 == vid {
        return Err(GraphError::DuplicateId(id1));
    }
    let (s, t) = (g.edges[e].source, g.edges[e].target);
    let mut h = g.clone();
    let vm = h.vertices.len();
    let (e1, e2) = (e, e + 1);
    h.insert_edge_slot(e2, Edge { id: id2.clone(), source: vm, target: t });
    h.edges[e1] = Edge { id: id1.clone(), source: s, target: vm };
    h.replace_end(t, EdgeEnd { edge: e1, end: End::Target }, &[EdgeEnd { edge: e2, end: End::Target }]);
    h.vertices.push(Vertex {
        id: vid.clone(),
        ends: vec![EdgeEnd { edge: e1, end: End::Target }, EdgeEnd { edge: e2, end: End::Source }],
    });
    h.replace_step(
        FaceStep { edge: e1, dir: Dir::Plus },
        &[FaceStep { edge: e1, dir: Dir::Plus }, FaceStep { edge: e2, dir: Dir::Plus }],
    );
    h.replace_step(
        FaceStep { edge: e1, dir: Dir::Minus },
        &[FaceStep { edge: e2, dir: Dir::Minus }, FaceStep { edge: e1, dir: Dir::Minus }],
    );
    Ok((h, MoveRecord::SplitEdge { edge: base, first: Some(id1), second: Some(id2), vertex: Some(vid) }))
}

/// The two edges at a bivalent vertex `v_m` with ends `[f(e_1), b(e_2)]`.
pub fn bivalent_edges(g: &RibbonGraph, vm: usize) -> Result<(usize, usize), GraphError> {
    let vid = &g.vertices[vm].id;
    let ends = &g.vertices[vm].ends;
    if ends.len() != 2 {
        return Err(violated(format!("vertex {vid} is not bivalent")));
    }
    if ends[0].end != End::Target || ends[1].end != End::Source {
        return Err(violated(format!("vertex {vid} is not ordered f(e1) < b(e2)")));
    }
    let (e1, e2) = (ends[0].edge, ends[1].edge);
    if e1 == e2 {
        return Err(violated(format!("vertex {vid} carries a loop")));
    }
    if (0..g.faces.len()).any(|f| g.associated_vertex(f) == vm) {
        return Err(violated(format!("a face cilium sits at vertex {vid}")));
    }
    Ok((e1, e2))
}

fn merged_id(a: &str, b: &str) -> String {
    match (a.strip_suffix(".a"), b.strip_suffix(".b")) {
        (Some(x), Some(y)) if x == y => x.to_string(),
        _ => format!("{a}~{b}"),
    }
}

/// Removes the bivalent vertex `v_m`, merging `e_1` and `e_2` into one edge.
pub fn glue_bivalent(g: &RibbonGraph, vm: usize, new_id: Option<String>) -> Result<(RibbonGraph, MoveRecord), GraphError> {
    if vm >= g.vertices.len() {
        return Err(GraphError::UnknownReference(format!("vertex index {vm}")));
    }
    let (e1, e2) = bivalent_edges(g, vm)?;
    let (id1, id2) = (g.edges[e1].id.clone(), g.edges[e2].id.clone());
    let (s, t) = (g.edges[e1].source, g.edges[e2].target);
    let mut h = g.clone();
    h.replace_end(t, EdgeEnd { edge: e2, end: End::Target }, &[EdgeEnd { edge: e1, end: End::Target }]);
    h.vertices[vm].ends.clear();
    h.replace_step(FaceStep { edge: e2, dir: Dir::Plus }, &[]);
    h.replace_step(FaceStep { edge: e2, dir: Dir::Minus }, &[]);
    h.edges[e1].target = t;
    h.edges[e1].id = String::new();
    h.edges[e2].id = String::new();
    let id = match new_id {
        Some(id) => name_or_fresh(&h, &Some(id), "")?,
        None => h.fresh_id(&merged_id(&id1, &id2)),
    };
    h.edges[e1].id = id.clone();
    h.remove_edge_slot(e2);
    let vid = h.vertices[vm].id.clone();
    h.remove_vertex_slot(vm);
    debug_assert!(s != vm);
    Ok((h, MoveRecord::GlueBivalent { vertex: vid, first: Some(id1), second: Some(id2), edge: Some(id) }))
}

/// Replaces `e` by two parallel edges bounding a new two-edge face `f_m = [(e_1,+), (e_2,−)]`.
pub fn double_edge(g: &RibbonGraph, e: usize) -> Result<(RibbonGraph, MoveRecord), GraphError> {
    double_edge_named(g, e, &None, &None, &None)
}

fn double_edge_named(
    g: &RibbonGraph,
    e: usize,
    first: &Option<String>,
    second: &Option<String>,
    face: &Option<String>,
) -> Result<(RibbonGraph, MoveRecord), GraphError> {
    check_edge(g, e)?;
    let base = g.edges[e].id.clone();
    let id1 = name_or_fresh(g, first, &format!("{base}.a"))?;
    let id2 = name_or_fresh(g, second, &format!("{base}.b"))?;
    let fid = name_or_fresh(g, face, &format!("{base}.f"))?;
    if id1 == id2 || id1 == fid || id2 == fid {
        return Err(GraphError::DuplicateId(id1));
    }
    let (s, t) = (g.edges[e].source, g.edges[e].target);
    let mut h = g.clone();
    let (e1, e2) = (e, e + 1);
    h.insert_edge_slot(e2, Edge { id: id2.clone(), source: s, target: t });
    h.edges[e1].id = id1.clone();
    let b = |edge| EdgeEnd { edge, end: End::Source };
    let f = |edge| EdgeEnd { edge, end: End::Target };
    h.replace_end(s, b(e1), &[b(e2), b(e1)]);
    h.replace_end(t, f(e1), &[f(e1), f(e2)]);
    h.replace_step(FaceStep { edge: e1, dir: Dir::Plus }, &[FaceStep { edge: e2, dir: Dir::Plus }]);
    h.faces.push(Face {
        id: fid.clone(),
        steps: vec![FaceStep { edge: e1, dir: Dir::Plus }, FaceStep { edge: e2, dir: Dir::Minus }],
    });
    Ok((h, MoveRecord::DoubleEdge { edge: base, first: Some(id1), second: Some(id2), face: Some(fid) }))
}

/// The two edges of a face `[(e_1,+), (e_2,−)]` that may be glued.
pub fn two_edge_face_edges(g: &RibbonGraph, fm: usize) -> Result<(usize, usize), GraphError> {
    let fid = &g.faces[fm].id;
    let steps = &g.faces[fm].steps;
    if steps.len() != 2 || steps[0].dir != Dir::Plus || steps[1].dir != Dir::Minus {
        return Err(violated(format!("face {fid} is not of the form [(e1,+), (e2,-)]")));
    }
    let (e1, e2) = (steps[0].edge, steps[1].edge);
    let (a, b) = (&g.edges[e1], &g.edges[e2]);
    if e1 == e2 || a.source != b.source || a.target != b.target {
        return Err(violated(format!("edges of face {fid} are not parallel")));
    }
    if (0..g.vertices.len()).any(|v| g.associated_face(v) == fm) {
        return Err(violated(format!("a vertex cilium points into face {fid}")));
    }
    Ok((e1, e2))
}

/// Removes the two-edge face `f_m`, merging its edges.
pub fn glue_two_edge_face(g: &RibbonGraph, fm: usize, new_id: Option<String>) -> Result<(RibbonGraph, MoveRecord), GraphError> {
    if fm >= g.faces.len() {
        return Err(GraphError::UnknownReference(format!("face index {fm}")));
    }
    let (e1, e2) = two_edge_face_edges(g, fm)?;
    let (id1, id2) = (g.edges[e1].id.clone(), g.edges[e2].id.clone());
    let (s, t) = (g.edges[e1].source, g.edges[e1].target);
    let mut h = g.clone();
    let b = |edge| EdgeEnd { edge, end: End::Source };
    let f = |edge| EdgeEnd { edge, end: End::Target };
    h.replace_end(s, b(e2), &[]);
    h.replace_end(t, f(e2), &[]);
    let fid = h.faces.remove(fm).id;
    h.replace_step(FaceStep { edge: e2, dir: Dir::Plus }, &[FaceStep { edge: e1, dir: Dir::Plus }]);
    h.edges[e1].id = String::new();
    h.edges[e2].id = String::new();
    let id = match new_id {
        Some(id) => name_or_fresh(&h, &Some(id), "")?,
        None => h.fresh_id(&merged_id(&id1, &id2)),
    };
    h.edges[e1].id = id.clone();
    h.remove_edge_slot(e2);
    Ok((h, MoveRecord::GlueFace { face: fid, first: Some(id1), second: Some(id2), edge: Some(id) }))
}

/// Deletes `e` and merges the face `absorbed` into the face on the other side of `e`.
pub fn erase_edge(g: &RibbonGraph, e: usize, absorbed: Option<usize>) -> Result<(RibbonGraph, MoveRecord), GraphError> {
    check_edge(g, e)?;
    let eid = g.edges[e].id.clone();
    let (left, right) = (g.left_face(e), g.right_face(e));
    if left == right {
        return Err(violated(format!("faces left and right of edge {eid} coincide")));
    }
    let absorbed = absorbed.unwrap_or(left);
    let (survivor, a_dir) = if absorbed == left {
        (right, Dir::Minus)
    } else if absorbed == right {
        (left, Dir::Plus)
    } else {
        return Err(violated(format!("face index {absorbed} is not adjacent to edge {eid}")));
    };
    let (s, t) = (g.edges[e].source, g.edges[e].target);
    let lost = |v: usize| g.vertices[v].ends.iter().filter(|x| x.edge == e).count();
    if g.valence(s) == lost(s) || g.valence(t) == lost(t) {
        return Err(violated(format!("erasing edge {eid} would isolate a vertex")));
    }
    let a_steps = &g.faces[absorbed].steps;
    let ka = a_steps.iter().position(|x| *x == FaceStep { edge: e, dir: a_dir }).expect("side present");
    let insert: Vec<FaceStep> = (1..a_steps.len()).map(|i| a_steps[(ka + i) % a_steps.len()]).collect();
    let mut h = g.clone();
    h.replace_step(FaceStep { edge: e, dir: a_dir.flip() }, &insert);
    for v in [s, t] {
        h.vertices[v].ends.retain(|x| x.edge != e);
    }
    let aid = h.faces.remove(absorbed).id;
    let sid = h.faces[if survivor > absorbed { survivor - 1 } else { survivor }].id.clone();
    h.remove_edge_slot(e);
    Ok((h, MoveRecord::Erase { edge: eid, absorbed: Some(aid), survivor: Some(sid) }))
}

/// Moves the cilium forward by `steps` positions: the entry at index `steps` becomes first.
pub fn shift_cilium(g: &RibbonGraph, target: &CiliumTarget, steps: usize) -> Result<(RibbonGraph, MoveRecord), GraphError> {
    let mut h = g.clone();
    match target {
        CiliumTarget::Vertex(id) => {
            let v = g.vertex_index(id)?;
            let n = h.vertices[v].ends.len();
            h.vertices[v].ends.rotate_left(steps % n);
        }
        CiliumTarget::Face(id) => {
            let f = g.face_index(id)?;
            let n = h.faces[f].steps.len();
            h.faces[f].steps.rotate_left(steps % n);
        }
    }
    Ok((h, MoveRecord::ShiftCilium { target: target.clone(), steps }))
}

/// Applies one recorded move. `Pair` expands into its constituent moves.
pub fn apply_move(g: &RibbonGraph, m: &MoveRecord) -> Result<(RibbonGraph, Vec<MoveRecord>), GraphError> {
    let one = |r: Result<(RibbonGraph, MoveRecord), GraphError>| r.map(|(h, rec)| (h, vec![rec]));
    match m {
        MoveRecord::Reverse { edge } => one(reverse_edge(g, g.edge_index(edge)?)),
        MoveRecord::SplitEdge { edge, first, second, vertex } => {
            one(split_edge_named(g, g.edge_index(edge)?, first, second, vertex))
        }
        MoveRecord::GlueBivalent { vertex, first, second, edge } => {
            let vm = g.vertex_index(vertex)?;
            let (e1, e2) = bivalent_edges(g, vm)?;
            check_expected(g, first, e1)?;
            check_expected(g, second, e2)?;
            one(glue_bivalent(g, vm, edge.clone()))
        }
        MoveRecord::DoubleEdge { edge, first, second, face } => {
            one(double_edge_named(g, g.edge_index(edge)?, first, second, face))
        }
        MoveRecord::GlueFace { face, first, second, edge } => {
            let fm = g.face_index(face)?;
            let (e1, e2) = two_edge_face_edges(g, fm)?;
            check_expected(g, first, e1)?;
            check_expected(g, second, e2)?;
            one(glue_two_edge_face(g, fm, edge.clone()))
        }
        MoveRecord::Erase { edge, absorbed, survivor } => {
            let e = g.edge_index(edge)?;
            let a = absorbed.as_deref().map(|f| g.face_index(f)).transpose()?;
            let (h, rec) = erase_edge(g, e, a)?;
            if let (Some(want), MoveRecord::Erase { survivor: Some(got), .. }) = (survivor, &rec) {
                if want != got {
                    return Err(violated(format!("edge {edge} does not separate face {want}")));
                }
            }
            Ok((h, vec![rec]))
        }
        MoveRecord::ShiftCilium { target, steps } => one(shift_cilium(g, target, *steps)),
        MoveRecord::Pair { sites } => {
            let idx = sites
                .iter()
                .map(|(v, f)| Ok((g.vertex_index(v)?, g.face_index(f)?)))
                .collect::<Result<Vec<_>, GraphError>>()?;
            pair_graph(g, &idx)
        }
    }
}

fn check_expected(g: &RibbonGraph, want: &Option<String>, got: usize) -> Result<(), GraphError> {
    match want {
        Some(id) if *id != g.edges[got].id => Err(violated(format!("expected edge {id}, found {}", g.edges[got].id))),
        _ => Ok(()),
    }
}

/// Applies a script of moves in order, returning the final graph and the expanded records.
pub fn apply_script(g: &RibbonGraph, script: &[MoveRecord]) -> Result<(RibbonGraph, Vec<MoveRecord>), (usize, GraphError)> {
    let mut cur = g.clone();
    let mut done = Vec::new();
    for (i, m) in script.iter().enumerate() {
        let (h, recs) = apply_move(&cur, m).map_err(|e| (i, e))?;
        cur = h;
        done.extend(recs);
    }
    Ok((cur, done))
}

/// Transforms `g` into a paired graph in which the given disjoint sites survive.
///
/// Step 1 splits loops, step 2 doubles edges with one face on both sides,
/// step 3 gives every unselected vertex a new two-edge face as its partner and
/// step 4 gives every remaining face a new bivalent vertex.
pub fn pair_graph(g: &RibbonGraph, sites: &[(usize, usize)]) -> Result<(RibbonGraph, Vec<MoveRecord>), GraphError> {
    if sites.is_empty() {
        return Err(GraphError::InvalidSite("at least one site is required".into()));
    }
    let mut vs = HashSet::new();
    let mut fs = HashSet::new();
    for &(v, f) in sites {
        if v >= g.vertices.len() || f >= g.faces.len() {
            return Err(GraphError::InvalidSite(format!("indices ({v}, {f}) out of range")));
        }
        let name = format!("({}, {})", g.vertices[v].id, g.faces[f].id);
        if !g.is_site(v, f) {
            return Err(GraphError::InvalidSite(format!("{name} is not a site")));
        }
        if !vs.insert(g.vertices[v].id.clone()) || !fs.insert(g.faces[f].id.clone()) {
            return Err(GraphError::InvalidSite(format!("{name} overlaps another site")));
        }
    }
    let mut cur = g.clone();
    let mut log = Vec::new();
    let mut step = |cur: &mut RibbonGraph, r: (RibbonGraph, MoveRecord)| {
        *cur = r.0;
        log.push(r.1.clone());
        r.1
    };

    let edge_ids: Vec<String> = cur.edges.iter().map(|e| e.id.clone()).collect();
    for id in &edge_ids {
        let e = cur.edge_index(id)?;
        if cur.is_loop(e) {
            let r = split_edge(&cur, e)?;
            step(&mut cur, r);
        }
    }

    let edge_ids: Vec<String> = cur.edges.iter().map(|e| e.id.clone()).collect();
    for id in &edge_ids {
        let e = cur.edge_index(id)?;
        if cur.left_face(e) == cur.right_face(e) {
            let r = double_edge(&cur, e)?;
            step(&mut cur, r);
        }
    }

    let mut created = HashSet::new();
    let vertex_ids: Vec<String> = cur.vertices.iter().map(|v| v.id.clone()).collect();
    for id in vertex_ids.iter().filter(|id| !vs.contains(*id)) {
        let v = cur.vertex_index(id)?;
        let first = cur.vertices[v].ends[0];
        let r = double_edge(&cur, first.edge)?;
        let MoveRecord::DoubleEdge { face: Some(fm), .. } = step(&mut cur, r) else { unreachable!() };
        let r = shift_cilium(&cur, &CiliumTarget::Vertex(id.clone()), 1)?;
        step(&mut cur, r);
        if first.end == End::Target {
            let r = shift_cilium(&cur, &CiliumTarget::Face(fm.clone()), 1)?;
            step(&mut cur, r);
        }
        created.insert(fm);
    }

    let face_ids: Vec<String> = cur.faces.iter().map(|f| f.id.clone()).collect();
    for id in face_ids.iter().filter(|id| !fs.contains(*id) && !created.contains(*id)) {
        let f = cur.face_index(id)?;
        let first = cur.faces[f].steps[0];
        let r = split_edge(&cur, first.edge)?;
        let MoveRecord::SplitEdge { vertex: Some(vm), .. } = step(&mut cur, r) else { unreachable!() };
        let r = shift_cilium(&cur, &CiliumTarget::Face(id.clone()), 1)?;
        step(&mut cur, r);
        if first.dir == Dir::Plus {
            let r = shift_cilium(&cur, &CiliumTarget::Vertex(vm), 1)?;
            step(&mut cur, r);
        }
    }

    debug_assert!(cur.is_paired());
    Ok((cur, log))
}
