//! Finite-difference Poisson geometry: right-trivialized gradients, brackets
//! from bivector fields, pushforward Jacobians, Jacobi residuals, and the
//! named property catalog in [`catalog`].
//!
//! A point of an engine is a list of group elements ("factors"). Coordinates
//! on the tangent space at a point are the backend basis coordinates of each
//! factor, factor-major, in the right trivialization `x ↦ exp(t ξ) x`.

pub mod catalog;
pub mod iso;

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::decoupling_iso::IsoError;
use crate::double_group::{DoubleGroup, GroupError, PoissonDouble};
use crate::fock_rosly::{fr_bivector, hol_fr_word, FrError};
use crate::graph_moves::MoveError;
use crate::kitaev_space::{Kitaev, KitaevError};
use crate::ribbon_graph::{Corner, Gen, GraphError, Letter, Path, RibbonGraph};

pub use catalog::{run_property, CATALOG};
pub use iso::iso_report;

pub const DEFAULT_FD_STEP: f64 = 1e-5;
/// Radius of the ball in the Lie algebra that random elements are drawn from.
pub const SAMPLE_RADIUS: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LabError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Kitaev(#[from] KitaevError),
    #[error(transparent)]
    Fr(#[from] FrError),
    #[error(transparent)]
    Iso(#[from] IsoError),
    #[error(transparent)]
    Move(#[from] MoveError),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("unknown property {0}")]
    UnknownProperty(String),
    #[error("path is not closed at the cilium of vertex {0}")]
    NotClosed(String),
    #[error("hypothesis unmet: {0}")]
    HypothesisUnmet(String),
}

/// `exp(t x_dir) · x[factor]`, other factors untouched.
pub fn perturbed<G: DoubleGroup>(group: &G, x: &[G::Elem], factor: usize, dir: usize, t: f64) -> Vec<G::Elem> {
    let mut v = vec![0.0; group.dim()];
    v[dir] = t;
    let mut out = x.to_vec();
    out[factor] = group.mul(&group.exp(&v), &x[factor]);
    out
}

/// Central-difference gradients of several scalar functions at once, one column per function.
pub fn gradient_matrix<G: DoubleGroup>(
    group: &G,
    f: &dyn Fn(&[G::Elem]) -> Vec<f64>,
    x: &[G::Elem],
    h: f64,
) -> DMatrix<f64> {
    let d = group.dim();
    let mut cols: Option<DMatrix<f64>> = None;
    for a in 0..x.len() {
        for i in 0..d {
            let fp = f(&perturbed(group, x, a, i, h));
            let fm = f(&perturbed(group, x, a, i, -h));
            let m = cols.get_or_insert_with(|| DMatrix::zeros(d * x.len(), fp.len()));
            for (k, (p, q)) in fp.iter().zip(&fm).enumerate() {
                m[(a * d + i, k)] = (p - q) / (2.0 * h);
            }
        }
    }
    cols.unwrap_or_else(|| DMatrix::zeros(0, f(x).len()))
}

/// Jacobian of `map` in right-trivialized charts on both sides: column `(a, i)`
/// holds the log-coordinates of `map(x')_b map(x)_b^{-1}` over `2h`.
pub fn pushforward_jacobian<G: DoubleGroup>(
    group: &G,
    map: &dyn Fn(&[G::Elem]) -> Vec<G::Elem>,
    x: &[G::Elem],
    h: f64,
) -> Result<DMatrix<f64>, LabError> {
    let d = group.dim();
    let y0 = map(x);
    let y0inv: Vec<G::Elem> = y0.iter().map(|g| group.inv(g)).collect();
    let mut jac = DMatrix::zeros(d * y0.len(), d * x.len());
    for a in 0..x.len() {
        for i in 0..d {
            let yp = map(&perturbed(group, x, a, i, h));
            let ym = map(&perturbed(group, x, a, i, -h));
            if yp.len() != y0.len() || ym.len() != y0.len() {
                return Err(LabError::DimensionMismatch("map changes its output length".into()));
            }
            for b in 0..y0.len() {
                let lp = group.log(&group.mul(&yp[b], &y0inv[b]))?;
                let lm = group.log(&group.mul(&ym[b], &y0inv[b]))?;
                for k in 0..d {
                    jac[(b * d + k, a * d + i)] = (lp[k] - lm[k]) / (2.0 * h);
                }
            }
        }
    }
    Ok(jac)
}

pub fn block_diag(blocks: &[DMatrix<f64>]) -> DMatrix<f64> {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut m = DMatrix::zeros(n, n);
    let mut o = 0;
    for b in blocks {
        m.view_mut((o, o), (b.nrows(), b.ncols())).copy_from(b);
        o += b.nrows();
    }
    m
}

pub fn max_entry(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |a, x| a.max(x.abs()))
}

/// Where scalar fields are evaluated.
#[derive(Debug, Clone, Copy)]
pub enum Space<'a> {
    /// Plain factors; only edge coordinates make sense.
    Factors,
    Kitaev(&'a RibbonGraph),
    FockRosly(&'a RibbonGraph),
}

type Field<'a, E> = Box<dyn Fn(&[E]) -> DMatrix<f64> + Send + Sync + 'a>;

/// A bivector field on a product of copies of `G`, in right-trivialized coordinates.
pub struct Engine<'a, G: DoubleGroup> {
    pub pd: &'a PoissonDouble<G>,
    pub factors: usize,
    pub space: Space<'a>,
    pub h: f64,
    field: Field<'a, G::Elem>,
}

impl<'a, G: DoubleGroup> Engine<'a, G> {
    pub fn custom(pd: &'a PoissonDouble<G>, factors: usize, space: Space<'a>, h: f64, field: Field<'a, G::Elem>) -> Self {
        Engine { pd, factors, space, h, field }
    }

    /// Product of Heisenberg doubles, one per edge.
    pub fn kitaev(pd: &'a PoissonDouble<G>, graph: &'a RibbonGraph, h: f64) -> Self {
        let field = Box::new(move |x: &[G::Elem]| block_diag(&x.iter().map(|g| pd.w_heisenberg(g)).collect::<Vec<_>>()));
        Engine { pd, factors: graph.num_edges(), space: Space::Kitaev(graph), h, field }
    }

    pub fn fock_rosly(pd: &'a PoissonDouble<G>, graph: &'a RibbonGraph, h: f64) -> Self {
        let field = Box::new(move |x: &[G::Elem]| fr_bivector(pd, graph, x));
        Engine { pd, factors: graph.num_edges(), space: Space::FockRosly(graph), h, field }
    }

    /// `(G, w)` with the Sklyanin bivector; its restriction serves `G_±`.
    pub fn sklyanin(pd: &'a PoissonDouble<G>, h: f64) -> Self {
        Engine { pd, factors: 1, space: Space::Factors, h, field: Box::new(move |x: &[G::Elem]| pd.w(&x[0])) }
    }

    pub fn heisenberg(pd: &'a PoissonDouble<G>, h: f64) -> Self {
        Engine { pd, factors: 1, space: Space::Factors, h, field: Box::new(move |x: &[G::Elem]| pd.w_heisenberg(&x[0])) }
    }

    /// `(G, w_{G*})`.
    pub fn dual(pd: &'a PoissonDouble<G>, h: f64) -> Self {
        Engine { pd, factors: 1, space: Space::Factors, h, field: Box::new(move |x: &[G::Elem]| pd.w_gstar(&x[0])) }
    }

    /// Product Poisson structure; factors are concatenated in order.
    pub fn product(parts: Vec<Engine<'a, G>>) -> Self {
        let pd = parts[0].pd;
        let h = parts[0].h;
        let factors = parts.iter().map(|p| p.factors).sum();
        let field = Box::new(move |x: &[G::Elem]| {
            let mut o = 0;
            let blocks: Vec<DMatrix<f64>> = parts
                .iter()
                .map(|p| {
                    let b = (p.field)(&x[o..o + p.factors]);
                    o += p.factors;
                    b
                })
                .collect();
            block_diag(&blocks)
        });
        Engine { pd, factors, space: Space::Factors, h, field }
    }

    pub fn dim(&self) -> usize {
        self.factors * self.pd.dim()
    }

    fn check(&self, x: &[G::Elem]) -> Result<(), LabError> {
        if x.len() != self.factors {
            return Err(LabError::DimensionMismatch(format!("engine has {} factors, point has {}", self.factors, x.len())));
        }
        Ok(())
    }

    pub fn bivector(&self, x: &[G::Elem]) -> Result<DMatrix<f64>, LabError> {
        self.check(x)?;
        Ok((self.field)(x))
    }

    pub fn gradients(&self, f: &dyn Fn(&[G::Elem]) -> Vec<f64>, x: &[G::Elem]) -> Result<DMatrix<f64>, LabError> {
        self.check(x)?;
        Ok(gradient_matrix(&self.pd.group, f, x, self.h))
    }

    /// Matrix of brackets `{f_a, f_b}` for the outputs of `f`.
    pub fn bracket_matrix(&self, f: &dyn Fn(&[G::Elem]) -> Vec<f64>, x: &[G::Elem]) -> Result<DMatrix<f64>, LabError> {
        let g = self.gradients(f, x)?;
        Ok(g.transpose() * self.bivector(x)? * g)
    }

    /// `Σ W^{ij} (D_i f_1)(D_j f_2)`.
    pub fn bracket(&self, f1: &ScalarField, f2: &ScalarField, x: &[G::Elem]) -> Result<f64, LabError> {
        f1.validate(&self.space, self.factors)?;
        f2.validate(&self.space, self.factors)?;
        let gr = &self.pd.group;
        let space = self.space;
        let f = |y: &[G::Elem]| vec![f1.eval_unchecked(gr, &space, y), f2.eval_unchecked(gr, &space, y)];
        Ok(self.bracket_matrix(&f, x)?[(0, 1)])
    }
}

/// `max |J W_src Jᵀ − W_dst(map(x))|`.
pub fn map_residual<G: DoubleGroup>(
    src: &Engine<'_, G>,
    dst: &Engine<'_, G>,
    map: &dyn Fn(&[G::Elem]) -> Vec<G::Elem>,
    x: &[G::Elem],
) -> Result<f64, LabError> {
    let j = pushforward_jacobian(&src.pd.group, map, x, src.h)?;
    let y = map(x);
    let pushed = &j * src.bivector(x)? * j.transpose();
    let target = dst.bivector(&y)?;
    if pushed.shape() != target.shape() {
        return Err(LabError::DimensionMismatch(format!("{:?} vs {:?}", pushed.shape(), target.shape())));
    }
    Ok(max_entry(&(pushed - target)))
}

/// Largest entry of the Jacobiator `{f_a, {f_b, f_c}} + cyclic` over the
/// coordinate functions of every factor, with nested central differences.
pub fn jacobi_residual<G: DoubleGroup>(engine: &Engine<'_, G>, x: &[G::Elem]) -> Result<f64, LabError> {
    engine.check(x)?;
    let gr = &engine.pd.group;
    let coords = |y: &[G::Elem]| y.iter().flat_map(|g| gr.to_floats(g)).collect::<Vec<f64>>();
    let grad = engine.gradients(&coords, x)?;
    let w = engine.bivector(x)?;
    let brackets = |y: &[G::Elem]| {
        let b = engine.bracket_matrix(&coords, y).expect("factor count checked");
        b.iter().copied().collect::<Vec<f64>>()
    };
    let db = engine.gradients(&brackets, x)?;
    // {f_a, B_bc} for every a and (b, c)
    let outer = (grad.transpose() * w) * db;
    let n = grad.ncols();
    let at = |a: usize, b: usize, c: usize| outer[(a, c * n + b)];
    let mut worst: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                worst = worst.max((at(a, b, c) + at(b, c, a) + at(c, a, b)).abs());
            }
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Invariant {
    ReTrace,
    AbsTraceSq,
}

impl Invariant {
    pub fn apply(self, tr: num_complex::Complex64) -> f64 {
        match self {
            Invariant::ReTrace => tr.re,
            Invariant::AbsTraceSq => tr.norm_sqr(),
        }
    }
}

/// A real function on the points of an engine.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScalarField {
    /// Serialized coordinate `entry` of factor `edge`.
    EdgeCoordinate { edge: usize, entry: usize },
    HolonomyCoordinate { path: Path, entry: usize },
    ClassFunction { path: Path, invariant: Invariant },
}

impl ScalarField {
    fn validate(&self, space: &Space<'_>, factors: usize) -> Result<(), LabError> {
        let path = match self {
            ScalarField::EdgeCoordinate { edge, .. } => {
                return if *edge < factors {
                    Ok(())
                } else {
                    Err(LabError::DimensionMismatch(format!("edge {edge} of {factors}")))
                };
            }
            ScalarField::HolonomyCoordinate { path, .. } | ScalarField::ClassFunction { path, .. } => path,
        };
        if matches!(space, Space::Factors) {
            return Err(LabError::DimensionMismatch("holonomies need a graph".into()));
        }
        if let Some(l) = path.word.iter().find(|l| l.edge >= factors) {
            return Err(LabError::DimensionMismatch(format!("path uses edge {} of {factors}", l.edge)));
        }
        Ok(())
    }

    pub fn eval<G: DoubleGroup>(&self, group: &G, space: &Space<'_>, x: &[G::Elem]) -> Result<f64, LabError> {
        self.validate(space, x.len())?;
        Ok(self.eval_unchecked(group, space, x))
    }

    fn eval_unchecked<G: DoubleGroup>(&self, group: &G, space: &Space<'_>, x: &[G::Elem]) -> f64 {
        let hol = |p: &Path| match space {
            Space::Kitaev(g) => Kitaev::new(group, g).hol_word(p, x),
            _ => hol_fr_word(group, p, x),
        };
        match self {
            ScalarField::EdgeCoordinate { edge, entry } => group.to_floats(&x[*edge])[*entry],
            ScalarField::HolonomyCoordinate { path, entry } => group.to_floats(&hol(path))[*entry],
            ScalarField::ClassFunction { path, invariant } => invariant.apply(group.trace(&hol(path))),
        }
    }
}

/// Class functions `γ ↦ I(tr Hol(p)(γ))` for paths closed at the cilium of `base`.
pub fn class_function_factory(
    graph: &RibbonGraph,
    base: usize,
    loops: &[Path],
    invariant: Invariant,
) -> Result<Vec<ScalarField>, LabError> {
    let corner = Corner { vertex: base, index: 0 };
    loops
        .iter()
        .map(|p| match graph.path_endpoints(p)? {
            None => Ok(ScalarField::ClassFunction { path: p.clone(), invariant }),
            Some((s, t)) if s == corner && t == corner => Ok(ScalarField::ClassFunction { path: p.clone(), invariant }),
            Some(_) => Err(LabError::NotClosed(graph.vertices()[base].id.clone())),
        })
        .collect()
}

/// Written form of an edge walk: `r(e)` forward, `r(e)^{-1}` backward, first step last.
pub fn walk_path(steps: &[(usize, bool)]) -> Path {
    Path {
        word: steps
            .iter()
            .rev()
            .map(|&(e, fwd)| if fwd { Letter::new(Gen::R, e) } else { Letter::new(Gen::R, e).inv() })
            .collect(),
    }
}

/// One closed walk at `base` per edge outside a breadth-first spanning tree.
pub fn fundamental_cycles(graph: &RibbonGraph, base: usize) -> Vec<Vec<(usize, bool)>> {
    let n = graph.vertices().len();
    let mut to: Vec<Option<Vec<(usize, bool)>>> = vec![None; n];
    let mut tree = vec![false; graph.num_edges()];
    to[base] = Some(Vec::new());
    let mut queue = std::collections::VecDeque::from([base]);
    while let Some(v) = queue.pop_front() {
        for x in &graph.vertices()[v].ends {
            let edge = &graph.edges()[x.edge];
            let (w, fwd) = if edge.source == v { (edge.target, true) } else { (edge.source, false) };
            if to[w].is_none() {
                let mut walk = to[v].clone().expect("visited");
                walk.push((x.edge, fwd));
                to[w] = Some(walk);
                tree[x.edge] = true;
                queue.push_back(w);
            }
        }
    }
    let back = |walk: &[(usize, bool)]| walk.iter().rev().map(|&(e, f)| (e, !f)).collect::<Vec<_>>();
    (0..graph.num_edges())
        .filter(|&e| !tree[e])
        .filter_map(|e| {
            let edge = &graph.edges()[e];
            let mut walk = to[edge.source].clone()?;
            walk.push((e, true));
            walk.extend(back(to[edge.target].as_ref()?));
            Some(walk)
        })
        .collect()
}

/// Random products of one to `max_factors` fundamental cycles (each possibly
/// inverted) with a random invariant.
pub fn random_class_words<R: Rng>(
    cycles: &[Vec<(usize, bool)>],
    count: usize,
    max_factors: usize,
    rng: &mut R,
) -> Vec<(Vec<(usize, bool)>, Invariant)> {
    if cycles.is_empty() {
        return Vec::new();
    }
    (0..count)
        .map(|_| {
            let mut walk = Vec::new();
            for _ in 0..rng.random_range(1..=max_factors.max(1)) {
                let c = &cycles[rng.random_range(0..cycles.len())];
                if rng.random_bool(0.5) {
                    walk.extend(c.iter().rev().map(|&(e, f)| (e, !f)));
                } else {
                    walk.extend_from_slice(c);
                }
            }
            let inv = if rng.random_bool(0.5) { Invariant::ReTrace } else { Invariant::AbsTraceSq };
            (walk, inv)
        })
        .collect()
}

/// Per-sample generator: ChaCha8 seeded with `seed`, stream `k`.
pub fn sample_rng(seed: u64, k: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(k);
    r
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub samples: usize,
    pub seed: u64,
    pub h: f64,
    /// Overrides the per-check tolerance.
    pub tol: Option<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { samples: 20, seed: 1, h: DEFAULT_FD_STEP, tol: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub statement: String,
    pub graph: String,
    pub backend: String,
    pub samples: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub skipped: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub runtime_ms: u64,
}

/// True iff no check that ran failed.
pub fn all_pass(records: &[CheckRecord]) -> bool {
    records.iter().all(|r| r.skipped || r.pass)
}

pub fn report_json(records: &[CheckRecord]) -> String {
    serde_json::to_string_pretty(records).expect("records serialize")
}
