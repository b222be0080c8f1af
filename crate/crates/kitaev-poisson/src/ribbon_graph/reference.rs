//! Small reference graphs used by tests, the acceptance run and the CLI.

use super::{moves::pair_graph, Edge, EdgeEnd, End, RibbonGraph, Vertex};

fn b(edge: usize) -> EdgeEnd {
    EdgeEnd { edge, end: End::Source }
}
fn f(edge: usize) -> EdgeEnd {
    EdgeEnd { edge, end: End::Target }
}
fn vertex(id: &str, ends: Vec<EdgeEnd>) -> Vertex {
    Vertex { id: id.into(), ends }
}
fn edge(id: &str, source: usize, target: usize) -> Edge {
    Edge { id: id.into(), source, target }
}

/// `e: v1 → v2`, one face.
pub fn single_edge() -> RibbonGraph {
    RibbonGraph::with_traced_faces(vec![vertex("v1", vec![b(0)]), vertex("v2", vec![f(0)])], vec![edge("e", 0, 1)])
        .expect("valid")
}

/// The oriented 4-cycle `v1 → v2 → v3 → v4 → v1`; face `f1` runs along the right sides.
pub fn square() -> RibbonGraph {
    RibbonGraph::with_traced_faces(
        vec![
            vertex("v1", vec![b(0), f(3)]),
            vertex("v2", vec![b(1), f(0)]),
            vertex("v3", vec![b(2), f(1)]),
            vertex("v4", vec![b(3), f(2)]),
        ],
        vec![edge("e1", 0, 1), edge("e2", 1, 2), edge("e3", 2, 3), edge("e4", 3, 0)],
    )
    .expect("valid")
}

/// Three parallel edges `a, b, c: v1 → v2`, planar embedding with three faces.
pub fn theta() -> RibbonGraph {
    RibbonGraph::with_traced_faces(
        vec![vertex("v1", vec![b(0), b(1), b(2)]), vertex("v2", vec![f(0), f(2), f(1)])],
        vec![edge("a", 0, 1), edge("b", 0, 1), edge("c", 0, 1)],
    )
    .expect("valid")
}

/// A single loop `e` at `v`, with the faces inside and outside the loop.
pub fn one_loop() -> RibbonGraph {
    RibbonGraph::with_traced_faces(vec![vertex("v", vec![b(0), f(0)])], vec![edge("e", 0, 0)]).expect("valid")
}

/// Pairing of [`square`] keeping the site at `v1`.
pub fn paired_square() -> RibbonGraph {
    let g = square();
    let v = 0;
    pair_graph(&g, &[(v, g.associated_face(v))]).expect("site at v1").0
}

/// Pairing of [`one_loop`] keeping the site at `v`.
pub fn paired_loop() -> RibbonGraph {
    let g = one_loop();
    pair_graph(&g, &[(0, g.associated_face(0))]).expect("site at v").0
}

/// Two loops `a, b` at one vertex with interleaved ends, one face (a torus).
pub fn torus() -> RibbonGraph {
    RibbonGraph::with_traced_faces(vec![vertex("v", vec![b(0), b(1), f(0), f(1)])], vec![edge("a", 0, 0), edge("b", 0, 0)])
        .expect("valid")
}

/// Pairing of [`torus`] keeping the site at `v`; a one-holed torus.
pub fn paired_torus() -> RibbonGraph {
    let g = torus();
    pair_graph(&g, &[(0, g.associated_face(0))]).expect("site at v").0
}

/// Looks up a reference graph by name.
pub fn by_name(name: &str) -> Option<RibbonGraph> {
    Some(match name {
        "single_edge" => single_edge(),
        "square" => square(),
        "theta" => theta(),
        "loop" => one_loop(),
        "paired_square" => paired_square(),
        "paired_loop" => paired_loop(),
        "torus" => torus(),
        "paired_torus" => paired_torus(),
        _ => return None,
    })
}

pub const NAMES: [&str; 8] =
    ["single_edge", "square", "theta", "loop", "paired_square", "paired_loop", "torus", "paired_torus"];
