//! The phase space `K = G^{×E}` with its holonomy functor, vertex, face and
//! site actions, flatness and flat sampling.
//!
//! Points are edge-indexed vectors of group elements, in the edge order of the
//! owning graph.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::double_group::{DoubleGroup, GroupError};
use crate::ribbon_graph::{Dir, End, Gen, GraphError, Letter, Path, RibbonGraph};

/// Membership tolerance for `G_±` arguments.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

pub type KPoint<E> = Vec<E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum KitaevError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("({0}, {1}) is not a site")]
    NotASite(String, String),
    #[error("argument is not in G_+ (defect {0:.2e})")]
    NotInPlusSubgroup(f64),
    #[error("argument is not in G_- (defect {0:.2e})")]
    NotInMinusSubgroup(f64),
    #[error("no vertex with an adjacent face is left unconstrained")]
    NoFreeSite,
    #[error("point has {got} edges, graph has {expected}")]
    WrongEdgeCount { expected: usize, got: usize },
    #[error("flat projection did not converge (residual {0:.2e})")]
    NotConverged(f64),
    #[error("malformed point file: {0}")]
    Parse(String),
}

/// `L ⊆ V ⊔ F`, by index.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FlatnessSpec {
    pub vertices: Vec<usize>,
    pub faces: Vec<usize>,
}

impl FlatnessSpec {
    pub fn none() -> Self {
        Self::default()
    }
    pub fn vertex(v: usize) -> Self {
        FlatnessSpec { vertices: vec![v], faces: vec![] }
    }
    pub fn face(f: usize) -> Self {
        FlatnessSpec { vertices: vec![], faces: vec![f] }
    }
    /// Everything except the given sites.
    pub fn all_but_sites(graph: &RibbonGraph, sites: &[(usize, usize)]) -> Self {
        FlatnessSpec {
            vertices: (0..graph.vertices().len()).filter(|v| !sites.iter().any(|s| s.0 == *v)).collect(),
            faces: (0..graph.faces().len()).filter(|f| !sites.iter().any(|s| s.1 == *f)).collect(),
        }
    }
}

/// A backend bound to a graph.
#[derive(Debug, Clone, Copy)]
pub struct Kitaev<'a, G: DoubleGroup> {
    pub group: &'a G,
    pub graph: &'a RibbonGraph,
}

impl<'a, G: DoubleGroup> Kitaev<'a, G> {
    pub fn new(group: &'a G, graph: &'a RibbonGraph) -> Self {
        Kitaev { group, graph }
    }

    pub fn check_point(&self, point: &[G::Elem]) -> Result<(), KitaevError> {
        let expected = self.graph.num_edges();
        if point.len() != expected {
            return Err(KitaevError::WrongEdgeCount { expected, got: point.len() });
        }
        Ok(())
    }

    pub fn identity_point(&self) -> KPoint<G::Elem> {
        vec![self.group.identity(); self.graph.num_edges()]
    }

    pub fn random_point<R: Rng>(&self, rng: &mut R, radius: f64) -> KPoint<G::Elem>
    where
        G: Sized,
    {
        (0..self.graph.num_edges()).map(|_| self.group.random(rng, radius)).collect()
    }

    fn letter(&self, l: Letter, point: &[G::Elem]) -> G::Elem {
        let gr = self.group;
        let g = &point[l.edge];
        let h = match l.gen {
            Gen::R => gr.pi_plus(g),
            Gen::L => gr.inv(&gr.pi_plus(&gr.inv(g))),
            Gen::F => gr.pi_minus(g),
            Gen::B => gr.inv(&gr.pi_minus(&gr.inv(g))),
        };
        if l.inverse {
            gr.inv(&h)
        } else {
            h
        }
    }

    /// Holonomy of a word without checking composability.
    pub fn hol_word(&self, path: &Path, point: &[G::Elem]) -> G::Elem {
        let gr = self.group;
        let mut acc = gr.identity();
        for (i, l) in path.word.iter().enumerate() {
            acc = gr.mul(&acc, &self.letter(*l, point));
            if i % 32 == 31 {
                acc = gr.renormalize(&acc);
            }
        }
        acc
    }

    pub fn hol(&self, path: &Path, point: &[G::Elem]) -> Result<G::Elem, KitaevError> {
        self.check_point(point)?;
        self.graph.path_endpoints(path)?;
        Ok(self.hol_word(path, point))
    }

    pub fn vertex_holonomy(&self, v: usize, point: &[G::Elem]) -> G::Elem {
        self.hol_word(&self.graph.vertex_path(v, None), point)
    }

    pub fn face_holonomy(&self, f: usize, point: &[G::Elem]) -> G::Elem {
        self.hol_word(&self.graph.face_path(f, None), point)
    }

    fn check_site(&self, v: usize, f: usize) -> Result<(), KitaevError> {
        if self.graph.is_site(v, f) {
            Ok(())
        } else {
            let g = self.graph;
            Err(KitaevError::NotASite(g.vertices()[v].id.clone(), g.faces()[f].id.clone()))
        }
    }

    pub fn site_holonomy(&self, v: usize, f: usize, point: &[G::Elem]) -> Result<G::Elem, KitaevError> {
        self.check_site(v, f)?;
        Ok(self.group.mul(&self.vertex_holonomy(v, point), &self.face_holonomy(f, point)))
    }

    /// Largest distance from `1` among the holonomies in `spec`.
    pub fn flatness_defect(&self, point: &[G::Elem], spec: &FlatnessSpec) -> f64 {
        let one = self.group.identity();
        let dv = spec.vertices.iter().map(|&v| self.group.dist(&self.vertex_holonomy(v, point), &one));
        let df = spec.faces.iter().map(|&f| self.group.dist(&self.face_holonomy(f, point), &one));
        dv.chain(df).fold(0.0, f64::max)
    }

    pub fn is_flat(&self, point: &[G::Elem], spec: &FlatnessSpec, tol: f64) -> bool {
        self.flatness_defect(point, spec) < tol
    }

    /// `α ⊳_v γ` for `α ∈ G_+`.
    pub fn vertex_action(&self, v: usize, alpha: &G::Elem, point: &[G::Elem]) -> Result<KPoint<G::Elem>, KitaevError> {
        let defect = self.group.plus_defect(alpha);
        if defect > MEMBERSHIP_TOL {
            return Err(KitaevError::NotInPlusSubgroup(defect));
        }
        self.check_point(point)?;
        Ok(self.vertex_action_unchecked(v, alpha, point))
    }

    pub fn vertex_action_unchecked(&self, v: usize, alpha: &G::Elem, point: &[G::Elem]) -> KPoint<G::Elem> {
        let gr = self.group;
        let mut out = point.to_vec();
        let ends = &self.graph.vertices()[v].ends;
        for k in (0..ends.len()).rev() {
            let c = self.hol_word(&self.graph.vertex_path(v, Some(k)), &out);
            let p = gr.pi_plus(&gr.mul(alpha, &c));
            let e = ends[k].edge;
            out[e] = match ends[k].end {
                End::Target => gr.mul(&p, &out[e]),
                End::Source => gr.mul(&out[e], &gr.inv(&p)),
            };
        }
        out
    }

    /// `x ⊳_f γ` for `x ∈ G_-`.
    pub fn face_action(&self, f: usize, x: &G::Elem, point: &[G::Elem]) -> Result<KPoint<G::Elem>, KitaevError> {
        let defect = self.group.minus_defect(x);
        if defect > MEMBERSHIP_TOL {
            return Err(KitaevError::NotInMinusSubgroup(defect));
        }
        self.check_point(point)?;
        Ok(self.face_action_unchecked(f, x, point))
    }

    pub fn face_action_unchecked(&self, f: usize, x: &G::Elem, point: &[G::Elem]) -> KPoint<G::Elem> {
        let gr = self.group;
        let xinv = gr.inv(x);
        let mut out = point.to_vec();
        let steps = &self.graph.faces()[f].steps;
        for k in (0..steps.len()).rev() {
            let d = self.hol_word(&self.graph.face_path(f, Some(k)), &out);
            let m = gr.pi_minus(&gr.mul(&d, &xinv));
            let e = steps[k].edge;
            out[e] = match steps[k].dir {
                Dir::Plus => gr.mul(&out[e], &m),
                Dir::Minus => gr.mul(&gr.inv(&m), &out[e]),
            };
        }
        out
    }

    /// `g ⊳ γ = π_-(g) ⊳_f (π_+(g) ⊳_v γ)`.
    pub fn site_action(&self, v: usize, f: usize, g: &G::Elem, point: &[G::Elem]) -> Result<KPoint<G::Elem>, KitaevError> {
        self.check_site(v, f)?;
        self.check_point(point)?;
        let (x, alpha) = self.group.factorize(g);
        let p = self.vertex_action_unchecked(v, &alpha, point);
        Ok(self.face_action_unchecked(f, &x, &p))
    }

    /// Draws a point flat at `spec`: a random start, projected onto the
    /// constraint set by minimum-norm Gauss-Newton steps.
    pub fn sample_flat<R: Rng>(&self, spec: &FlatnessSpec, rng: &mut R, radius: f64) -> Result<KPoint<G::Elem>, KitaevError>
    where
        G: Sized,
    {
        self.check_free_site(spec)?;
        let mut last = f64::INFINITY;
        for _ in 0..8 {
            let start = self.random_point(rng, radius);
            match self.project_flat(start, spec) {
                Ok(p) => return Ok(p),
                Err(KitaevError::NotConverged(r)) => last = r,
                Err(e) => return Err(e),
            }
        }
        Err(KitaevError::NotConverged(last))
    }

    fn check_free_site(&self, spec: &FlatnessSpec) -> Result<(), KitaevError> {
        let g = self.graph;
        let free = (0..g.vertices().len()).filter(|v| !spec.vertices.contains(v)).any(|v| {
            (0..g.faces().len()).filter(|f| !spec.faces.contains(f)).any(|f| {
                g.faces()[f].steps.iter().any(|s| {
                    let e = &g.edges()[s.edge];
                    e.source == v || e.target == v
                })
            })
        });
        if free {
            Ok(())
        } else {
            Err(KitaevError::NoFreeSite)
        }
    }

    fn constraint_residual(&self, point: &[G::Elem], spec: &FlatnessSpec) -> Vec<f64> {
        let gr = self.group;
        let one = gr.to_floats(&gr.identity());
        let mut r = Vec::new();
        let hols = spec
            .vertices
            .iter()
            .map(|&v| self.vertex_holonomy(v, point))
            .chain(spec.faces.iter().map(|&f| self.face_holonomy(f, point)));
        for h in hols {
            r.extend(gr.to_floats(&h).iter().zip(&one).map(|(a, b)| a - b));
        }
        r
    }

    /// Newton projection of `start` onto `K_L`.
    pub fn project_flat(&self, start: KPoint<G::Elem>, spec: &FlatnessSpec) -> Result<KPoint<G::Elem>, KitaevError> {
        let gr = self.group;
        let d = gr.dim();
        let n = self.graph.num_edges();
        let mut point = start;
        let nudge = |p: &[G::Elem], delta: &[f64]| -> KPoint<G::Elem> {
            p.iter().enumerate().map(|(e, g)| gr.renormalize(&gr.mul(&gr.exp(&delta[e * d..(e + 1) * d]), g))).collect()
        };
        let h = 1e-6;
        for _ in 0..60 {
            let r = self.constraint_residual(&point, spec);
            let norm = r.iter().fold(0.0, |m: f64, x| m.max(x.abs()));
            if norm < 1e-12 {
                return Ok(point);
            }
            let mut jac = DMatrix::zeros(r.len(), n * d);
            let mut delta = vec![0.0; n * d];
            for j in 0..n * d {
                delta[j] = h;
                let rp = self.constraint_residual(&nudge(&point, &delta), spec);
                delta[j] = -h;
                let rm = self.constraint_residual(&nudge(&point, &delta), spec);
                delta[j] = 0.0;
                for i in 0..r.len() {
                    jac[(i, j)] = (rp[i] - rm[i]) / (2.0 * h);
                }
            }
            let svd = jac.svd(true, true);
            let step = svd.solve(&DVector::from_vec(r), 1e-9).map_err(|_| KitaevError::NotConverged(norm))?;
            let step: Vec<f64> = step.iter().map(|x| -x).collect();
            if step.iter().any(|x| !x.is_finite()) || step.iter().fold(0.0, |m: f64, x| m.max(x.abs())) > 2.0 {
                return Err(KitaevError::NotConverged(norm));
            }
            point = nudge(&point, &step);
        }
        let norm = self.constraint_residual(&point, spec).iter().fold(0.0, |m: f64, x| m.max(x.abs()));
        Err(KitaevError::NotConverged(norm))
    }
}

/// `η_e`: inverts the element on `e`, matching [`crate::ribbon_graph::moves::reverse_edge`].
pub fn reverse_edge_point_map<G: DoubleGroup>(group: &G, e: usize, point: &[G::Elem]) -> KPoint<G::Elem> {
    let mut out = point.to_vec();
    out[e] = group.inv(&out[e]);
    out
}

/// `{"backend": ..., "edges": {edge-id: [floats]}}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointFile {
    pub backend: String,
    pub edges: BTreeMap<String, Vec<f64>>,
}

impl PointFile {
    pub fn from_point<G: DoubleGroup>(group: &G, graph: &RibbonGraph, point: &[G::Elem]) -> Self {
        PointFile {
            backend: group.name(),
            edges: graph.edges().iter().zip(point).map(|(e, g)| (e.id.clone(), group.to_floats(g))).collect(),
        }
    }

    pub fn to_point<G: DoubleGroup>(&self, group: &G, graph: &RibbonGraph) -> Result<KPoint<G::Elem>, KitaevError> {
        if self.backend != group.name() {
            return Err(KitaevError::Parse(format!("point is for backend {}, not {}", self.backend, group.name())));
        }
        if self.edges.len() != graph.num_edges() {
            return Err(KitaevError::WrongEdgeCount { expected: graph.num_edges(), got: self.edges.len() });
        }
        graph
            .edges()
            .iter()
            .map(|e| {
                let c = self.edges.get(&e.id).ok_or_else(|| KitaevError::Parse(format!("missing edge {}", e.id)))?;
                Ok(group.from_floats(c)?)
            })
            .collect()
    }
}
