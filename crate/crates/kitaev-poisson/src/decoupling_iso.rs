//! The decoupling map `Φ: K → FR` on a paired graph and its inverse `Ψ`.

use crate::double_group::DoubleGroup;
use crate::fock_rosly::hol_fr_word;
use crate::kitaev_space::{KPoint, Kitaev};
use crate::ribbon_graph::{Dir, End, Gen, Letter, Path, RibbonGraph};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IsoError {
    #[error("graph is not paired; run the pair move first")]
    NotPaired,
    #[error("point has {got} edges, graph has {expected}")]
    WrongEdgeCount { expected: usize, got: usize },
}

/// Paths of a paired graph, compiled once.
#[derive(Debug, Clone)]
pub struct Decoupling<'a> {
    pub graph: &'a RibbonGraph,
    /// `p(e) = p_f(e) ∘ f(e) ∘ r(e) ∘ p_b(e)`
    pub edge_paths: Vec<Path>,
    /// `(p_l(e), p_r(e))`
    pub face_prefixes: Vec<(Path, Path)>,
}

impl<'a> Decoupling<'a> {
    pub fn new(graph: &'a RibbonGraph) -> Result<Self, IsoError> {
        if !graph.is_paired() {
            return Err(IsoError::NotPaired);
        }
        let mut edge_paths = Vec::new();
        let mut face_prefixes = Vec::new();
        for e in 0..graph.num_edges() {
            let (vs, js) = graph.end_position(e, End::Source);
            let (vt, jt) = graph.end_position(e, End::Target);
            let p = graph
                .vertex_path(vt, Some(jt))
                .compose(&Path { word: vec![Letter::new(Gen::F, e), Letter::new(Gen::R, e)] })
                .compose(&graph.vertex_path(vs, Some(js)).inverse());
            edge_paths.push(p);
            let (fl, kl) = graph.side_position(e, Dir::Minus);
            let (fr, kr) = graph.side_position(e, Dir::Plus);
            face_prefixes.push((graph.face_path(fl, Some(kl)), graph.face_path(fr, Some(kr))));
        }
        Ok(Decoupling { graph, edge_paths, face_prefixes })
    }

    /// Replaces every `r(e)` or `l(e)` by `p(e)` (inverted along with the letter)
    /// and drops edge ends, so that `Hol_FR(p) ∘ Φ = Hol(lift(p))`.
    pub fn lift(&self, path: &Path) -> Path {
        let mut word = Vec::new();
        for l in &path.word {
            if matches!(l.gen, Gen::R | Gen::L) {
                let p = &self.edge_paths[l.edge];
                if l.inverse {
                    word.extend(p.inverse().word);
                } else {
                    word.extend_from_slice(&p.word);
                }
            }
        }
        Path { word }
    }

    fn check<E>(&self, point: &[E]) -> Result<(), IsoError> {
        if point.len() != self.graph.num_edges() {
            return Err(IsoError::WrongEdgeCount { expected: self.graph.num_edges(), got: point.len() });
        }
        Ok(())
    }

    pub fn phi<G: DoubleGroup>(&self, group: &G, point: &[G::Elem]) -> Result<KPoint<G::Elem>, IsoError> {
        self.check(point)?;
        let k = Kitaev::new(group, self.graph);
        Ok(self.edge_paths.iter().map(|p| k.hol_word(p, point)).collect())
    }

    pub fn psi<G: DoubleGroup>(&self, group: &G, point: &[G::Elem]) -> Result<KPoint<G::Elem>, IsoError> {
        self.check(point)?;
        Ok(self
            .face_prefixes
            .iter()
            .zip(point)
            .map(|((pl, pr), g)| {
                let l = group.pi_minus(&hol_fr_word(group, pl, point));
                let r = group.pi_minus(&hol_fr_word(group, pr, point));
                group.mul3(&group.inv(&l), g, &r)
            })
            .collect())
    }
}

pub fn phi<G: DoubleGroup>(group: &G, graph: &RibbonGraph, point: &[G::Elem]) -> Result<KPoint<G::Elem>, IsoError> {
    Decoupling::new(graph)?.phi(group, point)
}

pub fn psi<G: DoubleGroup>(group: &G, graph: &RibbonGraph, point: &[G::Elem]) -> Result<KPoint<G::Elem>, IsoError> {
    Decoupling::new(graph)?.psi(group, point)
}
