//! Residual report for the decoupling map at a given point.

use std::time::Instant;

use super::catalog::default_tolerance;
use super::{map_residual, sample_rng, CheckRecord, Engine, LabError, RunConfig, SAMPLE_RADIUS};
use crate::decoupling_iso::Decoupling;
use crate::double_group::{DoubleGroup, PoissonDouble};
use crate::fock_rosly::{fr_vertex_action, hol_fr};
use crate::graph_moves::point_distance;
use crate::kitaev_space::Kitaev;
use crate::ribbon_graph::RibbonGraph;

/// Roundtrips of `Φ` and `Ψ` at `point`, site equivariance and holonomy
/// intertwining over `cfg.samples` random group elements, and the Poisson
/// residual of `Φ` at `point`.
pub fn iso_report<G: DoubleGroup>(
    pd: &PoissonDouble<G>,
    graph: &RibbonGraph,
    graph_name: &str,
    point: &[G::Elem],
    cfg: &RunConfig,
) -> Result<Vec<CheckRecord>, LabError> {
    let gr = &pd.group;
    let dec = Decoupling::new(graph)?;
    let k = Kitaev::new(gr, graph);
    k.check_point(point)?;
    let image = dec.phi(gr, point)?;
    let exact = default_tolerance(pd.exact_oracle(), 1);
    let mut out = Vec::new();
    let mut record = |name: &str, statement: &str, samples: usize, tol: f64, run: &mut dyn FnMut() -> Result<f64, LabError>| {
        let start = Instant::now();
        let tolerance = cfg.tol.unwrap_or(tol);
        let (max_residual, note) = match run() {
            Ok(r) if r.is_nan() => (f64::INFINITY, None),
            Ok(r) => (r, None),
            Err(e) => (f64::MAX, Some(e.to_string())),
        };
        out.push(CheckRecord {
            name: name.into(),
            statement: statement.into(),
            graph: graph_name.into(),
            backend: pd.name(),
            samples,
            max_residual,
            tolerance,
            pass: max_residual < tolerance,
            skipped: false,
            note,
            runtime_ms: start.elapsed().as_millis() as u64,
        });
    };

    record("psi_after_phi", "Ψ(Φ(γ)) = γ", 1, 1e-10, &mut || {
        Ok(point_distance(gr, &dec.psi(gr, &image)?, point))
    });
    record("phi_after_psi", "Φ(Ψ(γ)) = γ", 1, 1e-10, &mut || {
        Ok(point_distance(gr, &dec.phi(gr, &dec.psi(gr, point)?)?, point))
    });
    let sites = graph.sites();
    record("phi_equivariance", "Φ(g ⊳_(v,f) γ) = g ⊳_v Φ(γ) at every site", cfg.samples, 1e-10, &mut || {
        let mut worst: f64 = 0.0;
        for s in 0..cfg.samples {
            let g = gr.random(&mut sample_rng(cfg.seed, s as u64), SAMPLE_RADIUS);
            for &(v, f) in &sites {
                let lhs = dec.phi(gr, &k.site_action(v, f, &g, point)?)?;
                worst = worst.max(point_distance(gr, &lhs, &fr_vertex_action(gr, graph, v, &g, &image)));
            }
        }
        Ok(worst)
    });
    record("phi_holonomy", "Hol^(v,f) = Hol_FR^(v,f) ∘ Φ at every site", 1, 1e-10, &mut || {
        let mut worst: f64 = 0.0;
        for &(v, f) in &sites {
            let p = graph.vertex_path(v, None).compose(&graph.face_path(f, None));
            worst = worst.max(gr.dist(&k.hol(&p, point)?, &hol_fr(gr, graph, &p, &image)?));
        }
        Ok(worst)
    });
    record("phi_poisson_at_point", "Φ is Poisson", 1, exact, &mut || {
        let (src, dst) = (Engine::kitaev(pd, graph, cfg.h), Engine::fock_rosly(pd, graph, cfg.h));
        map_residual(&src, &dst, &|y: &[G::Elem]| dec.phi(gr, y).expect("edge count checked"), point)
    });
    Ok(out)
}
