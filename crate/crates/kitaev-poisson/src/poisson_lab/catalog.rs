//! Named numerical checks. Every check draws `samples` points from
//! per-sample generators and reports the largest residual it saw.

use std::time::Instant;

use nalgebra::DMatrix;
use rand_chacha::ChaCha8Rng;

use super::{
    fundamental_cycles, jacobi_residual, map_residual, max_entry, pushforward_jacobian, random_class_words, sample_rng,
    walk_path, CheckRecord, Engine, Invariant, LabError, RunConfig, SAMPLE_RADIUS,
};
use crate::decoupling_iso::Decoupling;
use crate::double_group::{DoubleGroup, PoissonDouble};
use crate::fock_rosly::{fr_erase_edge, fr_flat_section, fr_reverse_edge, fr_vertex_action, hol_fr_word};
use crate::graph_moves::{glue_face_map, glue_vertex_map, point_distance, MoveRecord};
use crate::kitaev_space::{FlatnessSpec, KPoint, Kitaev};
use crate::ribbon_graph::moves::{double_edge, erase_edge, pair_graph, reverse_edge, split_edge};
use crate::ribbon_graph::{End, Gen, Letter, Path, RibbonGraph};

/// `(name, statement, finite-difference layers)`.
pub const CATALOG: &[(&str, &str, usize)] = &[
    ("action_poisson_v", "the vertex action G_+ x K -> K is a Poisson map", 1),
    ("action_poisson_f", "the face action G_- x K -> K is a Poisson map", 1),
    ("vertex_ops_commute", "functions of the holonomies around distinct vertices Poisson-commute", 1),
    ("face_ops_commute", "functions of the holonomies around distinct faces Poisson-commute", 1),
    ("mixed_ops_commute", "vertex and face operators commute when neither is attached to the other", 1),
    ("site_operator_poisson", "the site holonomy K -> (G, w_G*) is a Poisson map", 1),
    ("reidemeister_segments", "a face segment and a vertex segment meeting at a vertex Poisson-commute", 1),
    ("opposite_sides_commute", "holonomies of opposite ends and of opposite sides of an edge Poisson-commute", 1),
    ("hamiltonian_field_vertex", "the Hamiltonian field of a vertex operator is the r-contracted vertex action field", 2),
    ("hamiltonian_field_face", "the Hamiltonian field of a face operator is the r-contracted face action field", 2),
    ("invariant_commutes_with_ops", "invariant functions Poisson-commute with all vertex and face operators", 1),
    ("bracket_well_defined_on_flat", "brackets of invariant functions only depend on their values on flat points", 1),
    ("invariant_subalgebra_closed", "brackets of invariant functions are invariant on flat points", 1),
    ("moduli_reduction_brackets", "brackets of class functions on flat points survive edge erasure", 1),
    ("glue_vertex_poisson", "gluing two edges at a bivalent vertex is a Poisson map", 1),
    ("glue_face_poisson", "gluing the two edges of a two-edge face is a Poisson map", 1),
    ("fr_action_poisson", "Fock-Rosly vertex actions are Poisson maps", 1),
    ("fr_moves_poisson", "Fock-Rosly edge reversal and erasure are Poisson maps", 1),
    ("phi_poisson", "the decoupling map K -> FR is a Poisson map", 1),
    ("jacobi_heisenberg", "the Heisenberg double bivector satisfies the Jacobi identity", 2),
    ("jacobi_fock_rosly", "the Fock-Rosly bivector satisfies the Jacobi identity", 2),
];

/// Checks that run on the output of `pair_graph` when the input is not paired.
const NEEDS_PAIRING: &[&str] = &[
    "invariant_commutes_with_ops",
    "bracket_well_defined_on_flat",
    "invariant_subalgebra_closed",
    "moduli_reduction_brackets",
    "phi_poisson",
];

/// Number of random class functions in the test pool.
pub const CLASS_POOL: usize = 8;

pub fn default_tolerance(exact: bool, layers: usize) -> f64 {
    let base = if exact { 1e-9 } else { 1e-5 };
    base * 10f64.powi(layers as i32 - 1)
}

pub fn run_property<G: DoubleGroup>(
    pd: &PoissonDouble<G>,
    name: &str,
    graph: &RibbonGraph,
    graph_name: &str,
    cfg: &RunConfig,
) -> Result<CheckRecord, LabError>
where
    G: Sized,
{
    let &(_, statement, layers) =
        CATALOG.iter().find(|c| c.0 == name).ok_or_else(|| LabError::UnknownProperty(name.to_string()))?;
    let tolerance = cfg.tol.unwrap_or_else(|| default_tolerance(pd.exact_oracle(), layers));
    let start = Instant::now();
    let ctx = Ctx { pd, graph, cfg };
    let outcome = match name {
        "action_poisson_v" => action_poisson(&ctx, true),
        "action_poisson_f" => action_poisson(&ctx, false),
        "vertex_ops_commute" => ops_commute(&ctx, Ops::Vertices),
        "face_ops_commute" => ops_commute(&ctx, Ops::Faces),
        "mixed_ops_commute" => ops_commute(&ctx, Ops::Mixed),
        "site_operator_poisson" => site_operator_poisson(&ctx),
        "reidemeister_segments" => reidemeister_segments(&ctx),
        "opposite_sides_commute" => opposite_sides_commute(&ctx),
        "hamiltonian_field_vertex" => hamiltonian_field(&ctx, true),
        "hamiltonian_field_face" => hamiltonian_field(&ctx, false),
        "invariant_commutes_with_ops" => invariant_commutes_with_ops(&ctx),
        "bracket_well_defined_on_flat" => bracket_well_defined_on_flat(&ctx),
        "invariant_subalgebra_closed" => invariant_subalgebra_closed(&ctx),
        "moduli_reduction_brackets" => moduli_reduction_brackets(&ctx),
        "glue_vertex_poisson" => glue_poisson(&ctx, true),
        "glue_face_poisson" => glue_poisson(&ctx, false),
        "fr_action_poisson" => fr_action_poisson(&ctx),
        "fr_moves_poisson" => fr_moves_poisson(&ctx),
        "phi_poisson" => phi_poisson(&ctx),
        "jacobi_heisenberg" => jacobi_heisenberg(&ctx),
        "jacobi_fock_rosly" => jacobi_fock_rosly(&ctx),
        _ => unreachable!("catalog and dispatch agree"),
    };
    let (max_residual, skipped, note) = match outcome {
        Ok(r) => {
            let note = (NEEDS_PAIRING.contains(&name) && !graph.is_paired()).then(|| "evaluated on the paired graph".to_string());
            (r, false, note)
        }
        Err(LabError::HypothesisUnmet(m)) => (0.0, true, Some(m)),
        Err(e) => (f64::MAX, false, Some(e.to_string())),
    };
    Ok(CheckRecord {
        name: name.to_string(),
        statement: statement.to_string(),
        graph: graph_name.to_string(),
        backend: pd.name(),
        samples: cfg.samples,
        max_residual,
        tolerance,
        pass: !skipped && max_residual < tolerance,
        skipped,
        note,
        runtime_ms: start.elapsed().as_millis() as u64,
    })
}

/// Residuals of one check at steps `h` and `h/2`, and their ratio.
pub fn convergence<G: DoubleGroup>(
    pd: &PoissonDouble<G>,
    name: &str,
    graph: &RibbonGraph,
    cfg: &RunConfig,
) -> Result<(f64, f64, f64), LabError> {
    let coarse = run_property(pd, name, graph, "", cfg)?;
    let fine = run_property(pd, name, graph, "", &RunConfig { h: cfg.h / 2.0, ..*cfg })?;
    if coarse.skipped {
        return Err(LabError::HypothesisUnmet(coarse.note.unwrap_or_default()));
    }
    Ok((coarse.max_residual, fine.max_residual, fine.max_residual / coarse.max_residual))
}

struct Ctx<'a, G: DoubleGroup> {
    pd: &'a PoissonDouble<G>,
    graph: &'a RibbonGraph,
    cfg: &'a RunConfig,
}

impl<G: DoubleGroup> Ctx<'_, G> {
    fn over_samples(&self, mut f: impl FnMut(usize, &mut ChaCha8Rng) -> Result<f64, LabError>) -> Result<f64, LabError> {
        let mut worst: f64 = 0.0;
        for s in 0..self.cfg.samples {
            let r = f(s, &mut sample_rng(self.cfg.seed, s as u64))?;
            worst = if r.is_nan() { f64::INFINITY } else { worst.max(r) };
        }
        Ok(worst)
    }

    /// Longer words push the characters of the exact backends past their
    /// finite-difference floor.
    fn max_factors(&self) -> usize {
        if self.pd.group.exact_oracle() { 1 } else { 3 }
    }
}

fn floats<G: DoubleGroup>(group: &G, gs: impl IntoIterator<Item = G::Elem>) -> Vec<f64> {
    gs.into_iter().flat_map(|g| group.to_floats(&g)).collect()
}

/// Largest entry of the block `rows × cols` of `m`.
fn block_max(m: &DMatrix<f64>, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> f64 {
    let mut w: f64 = 0.0;
    for i in rows {
        for j in cols.clone() {
            w = w.max(m[(i, j)].abs());
        }
    }
    w
}

fn action_poisson<G: DoubleGroup>(ctx: &Ctx<'_, G>, vertex: bool) -> Result<f64, LabError> {
    let (pd, graph, h) = (ctx.pd, ctx.graph, ctx.cfg.h);
    let gr = &pd.group;
    let k = Kitaev::new(gr, graph);
    let src = Engine::product(vec![Engine::sklyanin(pd, h), Engine::kitaev(pd, graph, h)]);
    let dst = Engine::kitaev(pd, graph, h);
    let n = if vertex { graph.vertices().len() } else { graph.faces().len() };
    ctx.over_samples(|s, r| {
        let t = s % n;
        let a = if vertex { gr.random_plus(r, SAMPLE_RADIUS) } else { gr.random_minus(r, SAMPLE_RADIUS) };
        let mut x = vec![a];
        x.extend(k.random_point(r, SAMPLE_RADIUS));
        let map = |y: &[G::Elem]| {
            if vertex {
                k.vertex_action_unchecked(t, &y[0], &y[1..])
            } else {
                k.face_action_unchecked(t, &y[0], &y[1..])
            }
        };
        map_residual(&src, &dst, &map, &x)
    })
}

#[derive(Clone, Copy, PartialEq)]
enum Ops {
    Vertices,
    Faces,
    Mixed,
}

fn ops_commute<G: DoubleGroup>(ctx: &Ctx<'_, G>, which: Ops) -> Result<f64, LabError> {
    let (pd, graph) = (ctx.pd, ctx.graph);
    let gr = &pd.group;
    let k = Kitaev::new(gr, graph);
    let (nv, nf) = (graph.vertices().len(), graph.faces().len());
    // operator blocks: vertices first, then faces
    let mut pairs = Vec::new();
    match which {
        Ops::Vertices => (0..nv).for_each(|a| (a + 1..nv).for_each(|b| pairs.push((a, b)))),
        Ops::Faces => (0..nf).for_each(|a| (a + 1..nf).for_each(|b| pairs.push((nv + a, nv + b)))),
        Ops::Mixed => {
            for v in 0..nv {
                for f in 0..nf {
                    if graph.associated_vertex(f) != v && graph.associated_face(v) != f {
                        pairs.push((v, nv + f));
                    }
                }
            }
        }
    }
    if pairs.is_empty() {
        return Err(LabError::HypothesisUnmet("no admissible pair of operators".into()));
    }
    let m = gr.to_floats(&gr.identity()).len();
    let eng = Engine::kitaev(pd, graph, ctx.cfg.h);
    let ops = |y: &[G::Elem]| {
        let vs = (0..nv).map(|v| k.vertex_holonomy(v, y));
        let fs = (0..nf).map(|f| k.face_holonomy(f, y));
        floats(gr, vs.chain(fs))
    };
    ctx.over_samples(|_, r| {
        let x = k.random_point(r, SAMPLE_RADIUS);
        let b = eng.bracket_matrix(&ops, &x)?;
        Ok(pairs.iter().map(|&(a, c)| block_max(&b, a * m..(a + 1) * m, c * m..(c + 1) * m)).fold(0.0, f64::max))
    })
}

fn site_operator_poisson<G: DoubleGroup>(ctx: &Ctx<'_, G>) -> Result<f64, LabError> {
    let (pd, graph, h) = (ctx.pd, ctx.graph, ctx.cfg.h);
    let gr = &pd.group;
    let k = Kitaev::new(gr, graph);
    let sites = graph.sites();
    if sites.is_empty() {
        return Err(LabError::HypothesisUnmet("graph has no site".into()));
    }
    let (src, dst) = (Engine::kitaev(pd, graph, h), Engine::dual(pd, h));
    ctx.over_samples(|s, r| {
        let (v, f) = sites[s % sites.len()];
        let x = k.random_point(r, SAMPLE_RADIUS);
        let map = |y: &[G::Elem]| vec![gr.mul(&k.vertex_holonomy(v, y), &k.face_holonomy(f, y))];
        map_residual(&src, &dst, &map, &x)
    })
}

fn reidemeister_segments<G: DoubleGroup>(ctx: &Ctx<'_, G>) -> Result<f64, LabError> {
    let (pd, graph) = (ctx.pd, ctx.graph);
    let gr = &pd.group;
    // orient every consecutive pair of distinct edges as t(e1) = v = s(e2)
    let mut cases = Vec::new();
    for (v, vert) in graph.vertices().iter().enumerate() {
        for i in 0..vert.ends.len().saturating_sub(1) {
            let (e1, e2) = (vert.ends[i].edge, vert.ends[i + 1].edge);
            if e1 == e2 {
                continue;
            }
            let mut g = graph.clone();
            if g.vertices()[v].ends[i].end == End::Source {
                g = reverse_edge(&g, e1)?.0;
            }
            if g.vertices()[v].ends[i + 1].end == End::Target {
                g = reverse_edge(&g, e2)?.0;
            }
            let ends = &g.vertices()[v].ends;
            if ends[i].end == End::Target && ends[i + 1].end == End::Source {
                cases.push((g, e1, e2));
            }
        }
    }
    if cases.is_empty() {
        return Err(LabError::HypothesisUnmet("no vertex with two consecutive distinct edges".into()));
    }
    let engines: Vec<Engine<'_, G>> = cases.iter().map(|c| Engine::kitaev(pd, &c.0, ctx.cfg.h)).collect();
    let m = gr.to_floats(&gr.identity()).len();
    ctx.over_samples(|s, r| {
        let c = s % cases.len();
        let (g, e1, e2) = (&cases[c].0, cases[c].1, cases[c].2);
        let k = Kitaev::new(gr, g);
        let p1 = Path { word: vec![Letter::new(Gen::R, e2), Letter::new(Gen::R, e1)] };
        let p2 = Path { word: vec![Letter::new(Gen::F, e1), Letter::new(Gen::B, e2).inv()] };
        let f = |y: &[G::Elem]| floats(gr, [k.hol_word(&p1, y), k.hol_word(&p2, y)]);
        let b = engines[c].bracket_matrix(&f, &k.random_point(r, SAMPLE_RADIUS))?;
        Ok(block_max(&b, 0..m, m..2 * m))
    })
}

fn opposite_sides_commute<G: DoubleGroup>(ctx: &Ctx<'_, G>) -> Result<f64, LabError> {
    let (pd, graph) = (ctx.pd, ctx.graph);
    let gr = &pd.group;
    let k = Kitaev::new(gr, graph);
    let eng = Engine::kitaev(pd, graph, ctx.cfg.h);
    let m = gr.to_floats(&gr.identity()).len();
    let ne = graph.num_edges();
    let f = |y: &[G::Elem]| {
        let hols = (0..ne).flat_map(|e| {
            [Gen::F, Gen::B, Gen::R, Gen::L].map(|g| k.hol_word(&Path::letter(Letter::new(g, e)), y))
        });
        floats(gr, hols)
    };
    ctx.over_samples(|_, r| {
        let b = eng.bracket_matrix(&f, &k.random_point(r, SAMPLE_RADIUS))?;
        let mut w: f64 = 0.0;
        for e in 0..ne {
            let o = 4 * e * m;
            w = w.max(block_max(&b, o..o + m, o + m..o + 2 * m));
            w = w.max(block_max(&b, o + 2 * m..o + 3 * m, o + 3 * m..o + 4 * m));
        }
        Ok(w)
    })
}

fn hamiltonian_field<G: DoubleGroup>(ctx: &Ctx<'_, G>, vertex: bool) -> Result<f64, LabError> {
    let (pd, graph, h) = (ctx.pd, ctx.graph, ctx.cfg.h);
    let gr = &pd.group;
    let k = Kitaev::new(gr, graph);
    let eng = Engine::kitaev(pd, graph, h);
    let n = if vertex { graph.vertices().len() } else { graph.faces().len() };
    // test functions on G: every coordinate and the real trace
    let gfun = |g: &G::Elem| {
        let mut v = gr.to_floats(g);
        v.push(gr.trace(g).re);
        v
    };
    ctx.over_samples(|s, r| {
        let t = s % n;
        let hol = |y: &[G::Elem]| if vertex { k.vertex_holonomy(t, y) } else { k.face_holonomy(t, y) };
        let x = k.random_point(r, SAMPLE_RADIUS);
        let lhs = eng.bivector(&x)?.transpose() * eng.gradients(&|y| gfun(&hol(y)), &x)?;
        let hv = hol(&x);
        let dg = super::gradient_matrix(gr, &|y: &[G::Elem]| gfun(&y[0]), std::slice::from_ref(&hv), h);
        let act = |y: &[G::Elem]| {
            if vertex {
                k.vertex_action_unchecked(t, &y[0], &x)
            } else {
                k.face_action_unchecked(t, &y[0], &x)
            }
        };
        let jac = pushforward_jacobian(gr, &act, &[gr.identity()], h)?;
        let rhs = if vertex {
            -(jac * pd.r.transpose() * dg)
        } else {
            // opposite overall sign to the vertex case
            -(jac * &pd.r * pd.adjoint(&hv).transpose() * dg)
        };
        Ok(max_entry(&(lhs - rhs)))
    })
}

/// A paired graph with a base vertex, and a pool of class functions built
/// from closed edge walks at the base.
struct Pool {
    graph: RibbonGraph,
    base: usize,
    /// Walks, read with the Fock-Rosly holonomy.
    fr: Vec<Path>,
    /// Their lifts, read with the Kitaev holonomy.
    k: Vec<Path>,
    inv: Vec<Invariant>,
}

impl Pool {
    fn new(graph: &RibbonGraph, seed: u64, max_factors: usize) -> Result<Pool, LabError> {
        let (graph, base) = if graph.is_paired() {
            (graph.clone(), 0)
        } else {
            let Some(&(v, f)) = graph.sites().first() else {
                return Err(LabError::HypothesisUnmet("graph has no site to pair around".into()));
            };
            let (g, _) = pair_graph(graph, &[(v, f)])?;
            let base = g.vertex_index(&graph.vertices()[v].id)?;
            (g, base)
        };
        let cycles = fundamental_cycles(&graph, base);
        if cycles.is_empty() {
            return Err(LabError::HypothesisUnmet("graph has no cycles".into()));
        }
        let words = random_class_words(&cycles, CLASS_POOL, max_factors, &mut sample_rng(seed, u64::MAX));
        let dec = Decoupling::new(&graph)?;
        let fr: Vec<Path> = words.iter().map(|(w, _)| walk_path(w)).collect();
        let k = fr.iter().map(|p| dec.lift(p)).collect();
        let inv = words.iter().map(|w| w.1).collect();
        Ok(Pool { graph, base, fr, k, inv })
    }

    fn base_site(&self) -> (usize, usize) {
        (self.base, self.graph.associated_face(self.base))
    }

    fn flat_spec(&self) -> FlatnessSpec {
        FlatnessSpec::all_but_sites(&self.graph, &[self.base_site()])
    }

    fn k_values<G: DoubleGroup>(&self, gr: &G, x: &[G::Elem]) -> Vec<f64> {
        let k = Kitaev::new(gr, &self.graph);
        self.k.iter().zip(&self.inv).map(|(p, i)| i.apply(gr.trace(&k.hol_word(p, x)))).collect()
    }

    fn fr_values<G: DoubleGroup>(&self, gr: &G, x: &[G::Elem]) -> Vec<f64> {
        self.fr.iter().zip(&self.inv).map(|(p, i)| i.apply(gr.trace(&hol_fr_word(gr, p, x)))).collect()
    }
}

fn invariant_commutes_with_ops<G: DoubleGroup>(ctx: &Ctx<'_, G>) -> Result<f64, LabError> {
    let gr = &ctx.pd.group;
    let pool = Pool::new(ctx.graph, ctx.cfg.seed, ctx.max_factors())?;
    let g = &pool.graph;
    let k = Kitaev::new(gr, g);
    let eng = Engine::kitaev(ctx.pd, g, ctx.cfg.h);
    let f = |y: &[G::Elem]| {
        let mut out = pool.k_values(gr, y);
        let vs = (0..g.vertices().len()).map(|v| k.vertex_holonomy(v, y));
        let fs = (0..g.faces().len()).map(|f| k.face_holonomy(f, y));
        out.extend(floats(gr, vs.chain(fs)));
        out
    };
    ctx.over_samples(|_, r| {
        let b = eng.bracket_matrix(&f, &k.random_point(r, SAMPLE_RADIUS))?;
        Ok(block_max(&b, 0..CLASS_POOL, CLASS_POOL..b.ncols()))
    })
}

fn bracket_well_defined_on_flat<G: DoubleGroup>(ctx: &Ctx<'_, G>) -> Result<f64, LabError> {
    let gr = &ctx.pd.group;
    let pool = Pool::new(ctx.graph, ctx.cfg.seed, ctx.max_factors())?;
    let g = &pool.graph;
    let k = Kitaev::new(gr, g);
    let spec = pool.flat_spec();
    let eng = Engine::kitaev(ctx.pd, g, ctx.cfg.h);
    // coordinates of the constrained holonomies vanish on the flat subspace up to constants
    let f = |y: &[G::Elem]| {
        let mut out = pool.k_values(gr, y);
        let vs = spec.vertices.iter().map(|&v| k.vertex_holonomy(v, y));
        let fs = spec.faces.iter().map(|&f| k.face_holonomy(f, y));
        out.extend(floats(gr, vs.chain(fs)));
        out
    };
    ctx.over_samples(|_, r| {
        let x = k.sample_flat(&spec, r, SAMPLE_RADIUS)?;
        let b = eng.bracket_matrix(&f, &x)?;
        Ok(block_max(&b, 0..CLASS_POOL, CLASS_POOL..b.ncols()))
    })
}

fn invariant_subalgebra_closed<G: DoubleGroup>(ctx: &Ctx<'_, G>) -> Result<f64, LabError> {
    let gr = &ctx.pd.group;
    let pool = Pool::new(ctx.graph, ctx.cfg.seed, ctx.max_factors())?;
    let g = &pool.graph;
    let k = Kitaev::new(gr, g);
    let spec = pool.flat_spec();
    let eng = Engine::kitaev(ctx.pd, g, ctx.cfg.h);
    let f = |y: &[G::Elem]| pool.k_values(gr, y);
    let sites = g.sites();
    ctx.over_samples(|s, r| {
        let x = k.sample_flat(&spec, r, SAMPLE_RADIUS)?;
        let (v, fc) = sites[s % sites.len()];
        let moved = k.site_action(v, fc, &gr.random(r, SAMPLE_RADIUS), &x)?;
        let before = eng.bracket_matrix(&f, &x)?;
        let after = eng.bracket_matrix(&f, &moved)?;
        Ok(max_entry(&(after - before)))
    })
}

fn moduli_reduction_brackets<G: DoubleGroup>(ctx: &Ctx<'_, G>) -> Result<f64, LabError> {
    let (pd, h) = (ctx.pd, ctx.cfg.h);
    let gr = &pd.group;
    let pool = Pool::new(ctx.graph, ctx.cfg.seed, ctx.max_factors())?;
    let g = &pool.graph;
    let k = Kitaev::new(gr, g);
    let spec = pool.flat_spec();
    let dec = Decoupling::new(g)?;
    let base_face = g.faces()[pool.base_site().1].id.clone();
    // erase one edge per flat face until only the base face is left
    let mut chain: Vec<(RibbonGraph, usize, usize)> = Vec::new();
    let mut cur = g.clone();
    'outer: loop {
        for (f, face) in cur.faces().iter().enumerate() {
            if face.id == base_face {
                continue;
            }
            for step in &face.steps {
                let e = step.edge;
                if cur.left_face(e) == cur.right_face(e) {
                    continue;
                }
                if let Ok((next, _)) = erase_edge(&cur, e, Some(f)) {
                    chain.push((cur.clone(), e, f));
                    cur = next;
                    continue 'outer;
                }
            }
        }
        break;
    }
    if chain.is_empty() {
        return Err(LabError::HypothesisUnmet("no erasable edge next to a flat face".into()));
    }
    let full = Engine::fock_rosly(pd, g, h);
    let reduced = Engine::fock_rosly(pd, &cur, h);
    let section = |y: &[G::Elem]| -> KPoint<G::Elem> {
        chain.iter().rev().fold(y.to_vec(), |p, (before, e, f)| {
            fr_flat_section(gr, before, *e, *f, &p).expect("absorbed face crosses the erased edge once")
        })
    };
    ctx.over_samples(|_, r| {
        let eta = dec.phi(gr, &k.sample_flat(&spec, r, SAMPLE_RADIUS)?)?;
        let mut rho = eta.clone();
        for (before, e, f) in &chain {
            rho = fr_erase_edge(before, *e, Some(*f), &rho)?.1;
        }
        let b1 = full.bracket_matrix(&|y| pool.fr_values(gr, y), &eta)?;
        let b2 = reduced.bracket_matrix(&|y| pool.fr_values(gr, &section(y)), &rho)?;
        Ok(max_entry(&(b1 - b2)).max(point_distance(gr, &section(&rho), &eta)))
    })
}

fn glue_poisson<G: DoubleGroup>(ctx: &Ctx<'_, G>, vertex: bool) -> Result<f64, LabError> {
    let (pd, graph, h) = (ctx.pd, ctx.graph, ctx.cfg.h);
    let gr = &pd.group;
    let mut cases = Vec::new();
    for e in 0..graph.num_edges() {
        let (fine, at) = if vertex {
            let (fine, rec) = split_edge(graph, e)?;
            let MoveRecord::SplitEdge { vertex: Some(id), .. } = rec else { unreachable!("split names its vertex") };
            let at = fine.vertex_index(&id)?;
            (fine, at)
        } else {
            let (fine, rec) = double_edge(graph, e)?;
            let MoveRecord::DoubleEdge { face: Some(id), .. } = rec else { unreachable!("double names its face") };
            let at = fine.face_index(&id)?;
            (fine, at)
        };
        let id = Kitaev::new(gr, &fine).identity_point();
        let coarse = if vertex { glue_vertex_map(gr, &fine, at, &id)?.0 } else { glue_face_map(gr, &fine, at, &id)?.0 };
        cases.push((fine, at, coarse));
    }
    let engines: Vec<(Engine<'_, G>, Engine<'_, G>)> =
        cases.iter().map(|c| (Engine::kitaev(pd, &c.0, h), Engine::kitaev(pd, &c.2, h))).collect();
    ctx.over_samples(|s, r| {
        let c = s % cases.len();
        let (fine, at) = (&cases[c].0, cases[c].1);
        let x = Kitaev::new(gr, fine).random_point(r, SAMPLE_RADIUS);
        let map = |y: &[G::Elem]| {
            let moved = if vertex { glue_vertex_map(gr, fine, at, y) } else { glue_face_map(gr, fine, at, y) };
            moved.expect("glue applies to its own graph").1
        };
        map_residual(&engines[c].0, &engines[c].1, &map, &x)
    })
}

fn fr_action_poisson<G: DoubleGroup>(ctx: &Ctx<'_, G>) -> Result<f64, LabError> {
    let (pd, graph, h) = (ctx.pd, ctx.graph, ctx.cfg.h);
    let gr = &pd.group;
    let k = Kitaev::new(gr, graph);
    let src = Engine::product(vec![Engine::sklyanin(pd, h), Engine::fock_rosly(pd, graph, h)]);
    let dst = Engine::fock_rosly(pd, graph, h);
    ctx.over_samples(|s, r| {
        let v = s % graph.vertices().len();
        let mut x = vec![gr.random(r, SAMPLE_RADIUS)];
        x.extend(k.random_point(r, SAMPLE_RADIUS));
        let map = |y: &[G::Elem]| fr_vertex_action(gr, graph, v, &y[0], &y[1..]);
        map_residual(&src, &dst, &map, &x)
    })
}

fn fr_moves_poisson<G: DoubleGroup>(ctx: &Ctx<'_, G>) -> Result<f64, LabError> {
    let (pd, graph, h) = (ctx.pd, ctx.graph, ctx.cfg.h);
    let gr = &pd.group;
    let k = Kitaev::new(gr, graph);
    // (target graph, edge, erase?)
    let mut cases = Vec::new();
    for e in 0..graph.num_edges() {
        cases.push((reverse_edge(graph, e)?.0, e, false));
        if graph.left_face(e) != graph.right_face(e) {
            if let Ok((g, _)) = erase_edge(graph, e, None) {
                cases.push((g, e, true));
            }
        }
    }
    let src = Engine::fock_rosly(pd, graph, h);
    let dst: Vec<Engine<'_, G>> = cases.iter().map(|c| Engine::fock_rosly(pd, &c.0, h)).collect();
    ctx.over_samples(|s, r| {
        let c = s % cases.len();
        let (e, erase) = (cases[c].1, cases[c].2);
        let x = k.random_point(r, SAMPLE_RADIUS);
        let map = |y: &[G::Elem]| {
            if erase {
                let mut p = y.to_vec();
                p.remove(e);
                p
            } else {
                fr_reverse_edge(gr, e, y)
            }
        };
        map_residual(&src, &dst[c], &map, &x)
    })
}

fn phi_poisson<G: DoubleGroup>(ctx: &Ctx<'_, G>) -> Result<f64, LabError> {
    let gr = &ctx.pd.group;
    let pool = Pool::new(ctx.graph, ctx.cfg.seed, ctx.max_factors())?;
    let g = &pool.graph;
    let dec = Decoupling::new(g)?;
    let k = Kitaev::new(gr, g);
    let (src, dst) = (Engine::kitaev(ctx.pd, g, ctx.cfg.h), Engine::fock_rosly(ctx.pd, g, ctx.cfg.h));
    ctx.over_samples(|_, r| {
        let map = |y: &[G::Elem]| dec.phi(gr, y).expect("edge count matches");
        map_residual(&src, &dst, &map, &k.random_point(r, SAMPLE_RADIUS))
    })
}

fn jacobi_heisenberg<G: DoubleGroup>(ctx: &Ctx<'_, G>) -> Result<f64, LabError> {
    let gr = &ctx.pd.group;
    let eng = Engine::heisenberg(ctx.pd, ctx.cfg.h);
    ctx.over_samples(|_, r| jacobi_residual(&eng, &[gr.random(r, SAMPLE_RADIUS)]))
}

fn jacobi_fock_rosly<G: DoubleGroup>(ctx: &Ctx<'_, G>) -> Result<f64, LabError> {
    let gr = &ctx.pd.group;
    let eng = Engine::fock_rosly(ctx.pd, ctx.graph, ctx.cfg.h);
    let k = Kitaev::new(gr, ctx.graph);
    ctx.over_samples(|_, r| jacobi_residual(&eng, &k.random_point(r, SAMPLE_RADIUS)))
}
