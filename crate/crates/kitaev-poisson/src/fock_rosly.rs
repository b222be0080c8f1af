//! Fock-Rosly spaces `FR = G^{×E}` with the fixed r-matrix at every vertex.
//!
//! Points use the same edge-indexed layout as Kitaev points.

use nalgebra::DMatrix;

use crate::double_group::{DoubleGroup, PoissonDouble};
use crate::kitaev_space::KPoint;
use crate::ribbon_graph::moves::{bivalent_edges, erase_edge, glue_bivalent, reverse_edge, MoveRecord};
use crate::ribbon_graph::{End, Gen, GraphError, Path, RibbonGraph};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FrError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("point has {got} edges, graph has {expected}")]
    WrongEdgeCount { expected: usize, got: usize },
    #[error("face {face} visits edge {edge} {count} times")]
    NoUniqueSolution { face: String, edge: String, count: usize },
}

fn check_len<E>(graph: &RibbonGraph, point: &[E]) -> Result<(), FrError> {
    if point.len() != graph.num_edges() {
        return Err(FrError::WrongEdgeCount { expected: graph.num_edges(), got: point.len() });
    }
    Ok(())
}

/// `w_FR = Σ_v w_v` as a `dE × dE` matrix of `d × d` edge blocks in the right frame.
///
/// An end `i` at `v` acts through `M_i = −1` if incoming and `M_i = Ad_{γ_e}` if
/// outgoing, and contributes `−M_i (r_a + s^{ij} r_s) M_jᵀ` to block `(e_i, e_j)`.
pub fn fr_bivector<G: DoubleGroup>(pd: &PoissonDouble<G>, graph: &RibbonGraph, point: &[G::Elem]) -> DMatrix<f64> {
    let d = pd.dim();
    let mut w = DMatrix::zeros(d * graph.num_edges(), d * graph.num_edges());
    let ads: Vec<DMatrix<f64>> = point.iter().map(|g| pd.adjoint(g)).collect();
    let minus = -DMatrix::<f64>::identity(d, d);
    for v in graph.vertices() {
        let ms: Vec<&DMatrix<f64>> = v
            .ends
            .iter()
            .map(|x| match x.end {
                End::Target => &minus,
                End::Source => &ads[x.edge],
            })
            .collect();
        for (i, xi) in v.ends.iter().enumerate() {
            for (j, xj) in v.ends.iter().enumerate() {
                let core = match i.cmp(&j) {
                    std::cmp::Ordering::Greater => &pd.r_a + &pd.r_s,
                    std::cmp::Ordering::Equal => pd.r_a.clone(),
                    std::cmp::Ordering::Less => &pd.r_a - &pd.r_s,
                };
                let block = -(ms[i] * core * ms[j].transpose());
                let mut target = w.view_mut((d * xi.edge, d * xj.edge), (d, d));
                target += block;
            }
        }
    }
    w
}

/// `h ⊳_v γ`: `hγh⁻¹` on loops, `hγ` on incoming and `γh⁻¹` on outgoing edges.
pub fn fr_vertex_action<G: DoubleGroup>(
    group: &G,
    graph: &RibbonGraph,
    v: usize,
    h: &G::Elem,
    point: &[G::Elem],
) -> KPoint<G::Elem> {
    let hi = group.inv(h);
    let mut out = point.to_vec();
    for (e, edge) in graph.edges().iter().enumerate() {
        let (s, t) = (edge.source == v, edge.target == v);
        out[e] = match (s, t) {
            (true, true) => group.mul3(h, &point[e], &hi),
            (false, true) => group.mul(h, &point[e]),
            (true, false) => group.mul(&point[e], &hi),
            (false, false) => continue,
        };
    }
    out
}

/// Holonomy with `r(e), l(e) ↦ γ_e` and trivial edge ends, without composability checks.
pub fn hol_fr_word<G: DoubleGroup>(group: &G, path: &Path, point: &[G::Elem]) -> G::Elem {
    let mut acc = group.identity();
    for (i, l) in path.word.iter().enumerate() {
        if matches!(l.gen, Gen::R | Gen::L) {
            let g = &point[l.edge];
            acc = if l.inverse { group.mul(&acc, &group.inv(g)) } else { group.mul(&acc, g) };
        }
        if i % 32 == 31 {
            acc = group.renormalize(&acc);
        }
    }
    acc
}

pub fn hol_fr<G: DoubleGroup>(group: &G, graph: &RibbonGraph, path: &Path, point: &[G::Elem]) -> Result<G::Elem, FrError> {
    check_len(graph, point)?;
    graph.path_endpoints(path)?;
    Ok(hol_fr_word(group, path, point))
}

pub fn fr_face_holonomy<G: DoubleGroup>(group: &G, graph: &RibbonGraph, f: usize, point: &[G::Elem]) -> G::Elem {
    hol_fr_word(group, &graph.face_path(f, None), point)
}

pub fn fr_reverse_edge<G: DoubleGroup>(group: &G, e: usize, point: &[G::Elem]) -> KPoint<G::Elem> {
    let mut out = point.to_vec();
    out[e] = group.inv(&point[e]);
    out
}

/// Glues the two edges at a bivalent vertex into `γ_{h_2} γ_{h_1}`, reversing
/// edges first where needed so that `t(h_1) = v_m = s(h_2)`.
pub fn fr_glue_edges<G: DoubleGroup>(
    group: &G,
    graph: &RibbonGraph,
    vm: usize,
    point: &[G::Elem],
) -> Result<(RibbonGraph, KPoint<G::Elem>, Vec<MoveRecord>), FrError> {
    check_len(graph, point)?;
    let (mut g, mut p, mut log) = (graph.clone(), point.to_vec(), Vec::new());
    let ends = graph.vertices()[vm].ends.clone();
    if ends.len() == 2 {
        for (i, want) in [(0, End::Target), (1, End::Source)] {
            if ends[i].end != want && ends[i].edge != ends[1 - i].edge {
                let (h, rec) = reverse_edge(&g, ends[i].edge)?;
                p = fr_reverse_edge(group, ends[i].edge, &p);
                g = h;
                log.push(rec);
            }
        }
    }
    let (h1, h2) = bivalent_edges(&g, vm)?;
    let (h, rec) = glue_bivalent(&g, vm, None)?;
    log.push(rec);
    p[h1] = group.mul(&p[h2], &p[h1]);
    p.remove(h2);
    Ok((h, p, log))
}

/// Drops edge `e`; the face `absorbed` (default: left of `e`) merges into its neighbour.
pub fn fr_erase_edge<E: Clone>(
    graph: &RibbonGraph,
    e: usize,
    absorbed: Option<usize>,
    point: &[E],
) -> Result<(RibbonGraph, Vec<E>, MoveRecord), FrError> {
    check_len(graph, point)?;
    let (h, rec) = erase_edge(graph, e, absorbed)?;
    let mut p = point.to_vec();
    p.remove(e);
    Ok((h, p, rec))
}

/// Right inverse of erasing `e`: reinserts `e` into a point of the reduced graph
/// with the unique value that makes `f_flat` flat.
pub fn fr_flat_section<G: DoubleGroup>(
    group: &G,
    graph: &RibbonGraph,
    e: usize,
    f_flat: usize,
    reduced: &[G::Elem],
) -> Result<KPoint<G::Elem>, FrError> {
    if reduced.len() + 1 != graph.num_edges() {
        return Err(FrError::WrongEdgeCount { expected: graph.num_edges() - 1, got: reduced.len() });
    }
    let word = graph.face_path(f_flat, None).word;
    let hits: Vec<usize> = word.iter().enumerate().filter(|(_, l)| l.edge == e).map(|(i, _)| i).collect();
    if hits.len() != 1 {
        return Err(FrError::NoUniqueSolution {
            face: graph.faces()[f_flat].id.clone(),
            edge: graph.edges()[e].id.clone(),
            count: hits.len(),
        });
    }
    let mut p = reduced.to_vec();
    p.insert(e, group.identity());
    let k = hits[0];
    let a = hol_fr_word(group, &Path { word: word[..k].to_vec() }, &p);
    let b = hol_fr_word(group, &Path { word: word[k + 1..].to_vec() }, &p);
    let x = group.inv(&group.mul(&b, &a));
    p[e] = if word[k].inverse { group.inv(&x) } else { x };
    Ok(p)
}
