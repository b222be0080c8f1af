//! Maps between Kitaev phase spaces that accompany the combinatorial moves.
//!
//! Gluing maps `ψ` go from the finer to the coarser graph; splitting maps `φ`
//! are their right inverses and create a flat bivalent vertex or a flat two-edge
//! face.

use crate::double_group::DoubleGroup;
use crate::kitaev_space::{reverse_edge_point_map, FlatnessSpec, KPoint, Kitaev, KitaevError};
use crate::ribbon_graph::moves::{
    apply_move, bivalent_edges, double_edge, glue_bivalent, glue_two_edge_face, pair_graph, reverse_edge,
    shift_cilium, split_edge, two_edge_face_edges, CiliumTarget,
};
use crate::ribbon_graph::{Dir, End, GraphError, RibbonGraph};

pub use crate::ribbon_graph::moves::MoveRecord;

/// Flatness tolerance for the hypotheses of the cilium-shift relations.
pub const FLAT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MoveError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Kitaev(#[from] KitaevError),
    #[error("point is not flat at vertex {0}")]
    NotFlatAtVertex(String),
    #[error("point is not flat at face {0}")]
    NotFlatAtFace(String),
    #[error("move {0} has no phase-space map in this direction")]
    NoPointMap(String),
    #[error("replay failed at step {step}: {source}")]
    Replay { step: usize, source: Box<MoveError> },
}

type Moved<E> = (RibbonGraph, KPoint<E>, Vec<MoveRecord>);

/// `ψ_{v_m}`: glues the edges at a bivalent vertex. Edges are reversed first
/// where needed so that `t(e_1) = v_m = s(e_2)`; the reversals are recorded.
pub fn glue_vertex_map<G: DoubleGroup>(
    group: &G,
    graph: &RibbonGraph,
    vm: usize,
    point: &[G::Elem],
) -> Result<Moved<G::Elem>, MoveError> {
    let (mut g, mut p, mut log) = (graph.clone(), point.to_vec(), Vec::new());
    let ends = graph.vertices()[vm].ends.clone();
    if ends.len() == 2 {
        for (i, want) in [(0, End::Target), (1, End::Source)] {
            if ends[i].end != want && ends[i].edge != ends[1 - i].edge {
                let (h, rec) = reverse_edge(&g, ends[i].edge)?;
                p = reverse_edge_point_map(group, ends[i].edge, &p);
                g = h;
                log.push(rec);
            }
        }
    }
    let (e1, e2) = bivalent_edges(&g, vm)?;
    let (h, rec) = glue_bivalent(&g, vm, None)?;
    log.push(rec);
    Ok((h, glue_vertex_point(group, e1, e2, &p), log))
}

fn glue_vertex_point<G: DoubleGroup>(group: &G, e1: usize, e2: usize, point: &[G::Elem]) -> KPoint<G::Elem> {
    let mut out = point.to_vec();
    out[e1] = group.mul(&point[e2], &group.pi_plus(&point[e1]));
    out.remove(e2);
    out
}

/// `ψ_{f_m}`: glues the two edges of a two-edge face, reversing edges first where needed.
pub fn glue_face_map<G: DoubleGroup>(
    group: &G,
    graph: &RibbonGraph,
    fm: usize,
    point: &[G::Elem],
) -> Result<Moved<G::Elem>, MoveError> {
    let (mut g, mut p, mut log) = (graph.clone(), point.to_vec(), Vec::new());
    let steps = graph.faces()[fm].steps.clone();
    if steps.len() == 2 && steps[0].edge != steps[1].edge {
        for (i, want) in [(0, Dir::Plus), (1, Dir::Minus)] {
            if steps[i].dir != want {
                let (h, rec) = reverse_edge(&g, steps[i].edge)?;
                p = reverse_edge_point_map(group, steps[i].edge, &p);
                g = h;
                log.push(rec);
            }
        }
    }
    let (e1, e2) = two_edge_face_edges(&g, fm)?;
    let (h, rec) = glue_two_edge_face(&g, fm, None)?;
    log.push(rec);
    Ok((h, glue_face_point(group, e1, e2, &p), log))
}

fn glue_face_point<G: DoubleGroup>(group: &G, e1: usize, e2: usize, point: &[G::Elem]) -> KPoint<G::Elem> {
    let mut out = point.to_vec();
    out[e1] = group.mul(&group.pi_minus(&point[e1]), &point[e2]);
    out.remove(e2);
    out
}

/// `φ_{v_m}`: splits `e` by a flat bivalent vertex, `e_1 ↦ γ_e`, `e_2 ↦ π_-(γ_e)`.
pub fn split_vertex_map<G: DoubleGroup>(
    group: &G,
    graph: &RibbonGraph,
    e: usize,
    point: &[G::Elem],
) -> Result<Moved<G::Elem>, MoveError> {
    let (h, rec) = split_edge(graph, e)?;
    let mut out = point.to_vec();
    out.insert(e + 1, group.pi_minus(&point[e]));
    Ok((h, out, vec![rec]))
}

/// `φ_{f_m}`: doubles `e` with a flat two-edge face, `e_1 ↦ γ_e`, `e_2 ↦ π_+(γ_e)`.
pub fn split_face_map<G: DoubleGroup>(
    group: &G,
    graph: &RibbonGraph,
    e: usize,
    point: &[G::Elem],
) -> Result<Moved<G::Elem>, MoveError> {
    let (h, rec) = double_edge(graph, e)?;
    let mut out = point.to_vec();
    out.insert(e + 1, group.pi_plus(&point[e]));
    Ok((h, out, vec![rec]))
}

/// Forward map of one recorded move, taking a point on `before` to a point on the result.
pub fn point_map<G: DoubleGroup>(
    group: &G,
    before: &RibbonGraph,
    rec: &MoveRecord,
    point: &[G::Elem],
) -> Result<KPoint<G::Elem>, MoveError> {
    let mut out = point.to_vec();
    match rec {
        MoveRecord::Reverse { edge } => out = reverse_edge_point_map(group, before.edge_index(edge)?, point),
        MoveRecord::SplitEdge { edge, .. } => {
            let e = before.edge_index(edge)?;
            out.insert(e + 1, group.pi_minus(&point[e]));
        }
        MoveRecord::DoubleEdge { edge, .. } => {
            let e = before.edge_index(edge)?;
            out.insert(e + 1, group.pi_plus(&point[e]));
        }
        MoveRecord::GlueBivalent { vertex, .. } => {
            let (e1, e2) = bivalent_edges(before, before.vertex_index(vertex)?)?;
            out = glue_vertex_point(group, e1, e2, point);
        }
        MoveRecord::GlueFace { face, .. } => {
            let (e1, e2) = two_edge_face_edges(before, before.face_index(face)?)?;
            out = glue_face_point(group, e1, e2, point);
        }
        MoveRecord::ShiftCilium { .. } => {}
        MoveRecord::Erase { .. } | MoveRecord::Pair { .. } => {
            return Err(MoveError::NoPointMap(format!("{rec:?}")));
        }
    }
    Ok(out)
}

/// Inverse direction for splitting moves: the gluing map that undoes `rec`,
/// taking a point on the graph after the move back to `before`.
pub fn undo_point_map<G: DoubleGroup>(
    group: &G,
    after: &RibbonGraph,
    rec: &MoveRecord,
    point: &[G::Elem],
) -> Result<KPoint<G::Elem>, MoveError> {
    let named = |id: &Option<String>| -> Result<usize, MoveError> {
        let id = id.as_deref().ok_or_else(|| MoveError::NoPointMap("unnamed move".into()))?;
        Ok(after.edge_index(id)?)
    };
    match rec {
        MoveRecord::Reverse { edge } => Ok(reverse_edge_point_map(group, after.edge_index(edge)?, point)),
        MoveRecord::SplitEdge { first, second, .. } => Ok(glue_vertex_point(group, named(first)?, named(second)?, point)),
        MoveRecord::DoubleEdge { first, second, .. } => Ok(glue_face_point(group, named(first)?, named(second)?, point)),
        MoveRecord::ShiftCilium { .. } => Ok(point.to_vec()),
        _ => Err(MoveError::NoPointMap(format!("{rec:?}"))),
    }
}

/// Replays a script on a graph and a point. `Pair` entries expand in place.
pub fn apply_script_with_point<G: DoubleGroup>(
    group: &G,
    graph: &RibbonGraph,
    script: &[MoveRecord],
    point: &[G::Elem],
) -> Result<Moved<G::Elem>, MoveError> {
    let (mut g, mut p, mut log) = (graph.clone(), point.to_vec(), Vec::new());
    for (step, m) in script.iter().enumerate() {
        let wrap = |e: MoveError| MoveError::Replay { step, source: Box::new(e) };
        let (_, recs) = apply_move(&g, m).map_err(|e| wrap(e.into()))?;
        for rec in recs {
            let (h, _) = apply_move(&g, &rec).map_err(|e| wrap(e.into()))?;
            p = point_map(group, &g, &rec, &p).map_err(wrap)?;
            g = h;
            log.push(rec);
        }
    }
    Ok((g, p, log))
}

/// The chain of graphs visited by a move list, starting with `graph`.
pub fn graph_chain(graph: &RibbonGraph, moves: &[MoveRecord]) -> Result<Vec<RibbonGraph>, MoveError> {
    let mut chain = vec![graph.clone()];
    for (step, m) in moves.iter().enumerate() {
        let (h, _) = apply_move(chain.last().expect("nonempty"), m)
            .map_err(|e| MoveError::Replay { step, source: Box::new(e.into()) })?;
        chain.push(h);
    }
    Ok(chain)
}

/// `ψ: K' → K` from the paired graph back to `graph`.
pub fn pair_graph_map<G: DoubleGroup>(
    group: &G,
    graph: &RibbonGraph,
    sites: &[(usize, usize)],
    paired_point: &[G::Elem],
) -> Result<KPoint<G::Elem>, MoveError> {
    let (_, moves) = pair_graph(graph, sites)?;
    let chain = graph_chain(graph, &moves)?;
    Kitaev::new(group, chain.last().expect("nonempty")).check_point(paired_point)?;
    let mut p = paired_point.to_vec();
    for (i, m) in moves.iter().enumerate().rev() {
        p = undo_point_map(group, &chain[i + 1], m, &p).map_err(|e| MoveError::Replay { step: i, source: Box::new(e) })?;
    }
    Ok(p)
}

/// Composite of the splitting maps, a right inverse of [`pair_graph_map`].
pub fn pair_graph_lift<G: DoubleGroup>(
    group: &G,
    graph: &RibbonGraph,
    sites: &[(usize, usize)],
    point: &[G::Elem],
) -> Result<Moved<G::Elem>, MoveError> {
    let (_, moves) = pair_graph(graph, sites)?;
    apply_script_with_point(group, graph, &moves, point)
}

/// `‖α ⊳'_v γ − π_+(α Hol(p_1(v))(γ)^{-1}) ⊳_v γ‖` where `⊳'` uses the cilium shifted by one.
pub fn cilium_shift_residual<G: DoubleGroup>(
    group: &G,
    graph: &RibbonGraph,
    v: usize,
    alpha: &G::Elem,
    point: &[G::Elem],
) -> Result<f64, MoveError> {
    let k = Kitaev::new(group, graph);
    let vid = graph.vertices()[v].id.clone();
    if !k.is_flat(point, &FlatnessSpec::vertex(v), FLAT_TOL) {
        return Err(MoveError::NotFlatAtVertex(vid));
    }
    let (shifted, _) = shift_cilium(graph, &CiliumTarget::Vertex(vid), 1)?;
    let lhs = Kitaev::new(group, &shifted).vertex_action(v, alpha, point)?;
    let c = k.hol_word(&graph.vertex_path(v, Some(1)), point);
    let beta = group.pi_plus(&group.mul(alpha, &group.inv(&c)));
    let rhs = k.vertex_action_unchecked(v, &beta, point);
    Ok(point_distance(group, &lhs, &rhs))
}

/// `‖x ⊳'_f γ − π_-((x Hol(p_1(f))(γ))^{-1})^{-1} ⊳_f γ‖`.
pub fn cilium_shift_residual_face<G: DoubleGroup>(
    group: &G,
    graph: &RibbonGraph,
    f: usize,
    x: &G::Elem,
    point: &[G::Elem],
) -> Result<f64, MoveError> {
    let k = Kitaev::new(group, graph);
    let fid = graph.faces()[f].id.clone();
    if !k.is_flat(point, &FlatnessSpec::face(f), FLAT_TOL) {
        return Err(MoveError::NotFlatAtFace(fid));
    }
    let (shifted, _) = shift_cilium(graph, &CiliumTarget::Face(fid), 1)?;
    let lhs = Kitaev::new(group, &shifted).face_action(f, x, point)?;
    let d = k.hol_word(&graph.face_path(f, Some(1)), point);
    let y = group.inv(&group.pi_minus(&group.inv(&group.mul(x, &d))));
    let rhs = k.face_action_unchecked(f, &y, point);
    Ok(point_distance(group, &lhs, &rhs))
}

/// Largest elementwise distance between two points.
pub fn point_distance<G: DoubleGroup>(group: &G, a: &[G::Elem], b: &[G::Elem]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(x, y)| group.dist(x, y)).fold(0.0, f64::max)
}
