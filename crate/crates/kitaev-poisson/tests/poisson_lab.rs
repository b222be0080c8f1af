mod common;

use common::*;
use kitaev_poisson::decoupling_iso::Decoupling;
use kitaev_poisson::double_group::{max_abs, DoubleGroup, Sl2c};
use kitaev_poisson::fock_rosly::hol_fr_word;
use kitaev_poisson::kitaev_space::{FlatnessSpec, Kitaev};
use kitaev_poisson::poisson_lab::catalog::convergence;
use kitaev_poisson::poisson_lab::*;
use kitaev_poisson::ribbon_graph::reference::*;
use kitaev_poisson::ribbon_graph::{Corner, Gen, Letter, Path};
use nalgebra::DMatrix;

type E = <Sl2c as DoubleGroup>::Elem;

fn coord(edge: usize, entry: usize) -> ScalarField {
    ScalarField::EdgeCoordinate { edge, entry }
}

#[test]
fn brackets_are_antisymmetric() {
    let pd = sl2c();
    let g = square();
    let eng = Engine::kitaev(&pd, &g, DEFAULT_FD_STEP);
    let x = Kitaev::new(&pd.group, &g).random_point(&mut rng(1), 0.5);
    let hol = ScalarField::HolonomyCoordinate { path: g.face_path(0, None), entry: 1 };
    let tr = ScalarField::ClassFunction { path: g.vertex_path(1, None), invariant: Invariant::AbsTraceSq };
    let fields = [coord(0, 0), coord(1, 3), coord(3, 7), hol, tr];
    for a in &fields {
        assert!(eng.bracket(a, a, &x).unwrap().abs() < 1e-14);
        for b in &fields {
            let s = eng.bracket(a, b, &x).unwrap() + eng.bracket(b, a, &x).unwrap();
            assert!(s.abs() < 1e-12);
        }
    }
}

#[test]
fn abelian_edge_brackets_are_constant() {
    let pd = abelian(2);
    let g = single_edge();
    let eng = Engine::kitaev(&pd, &g, DEFAULT_FD_STEP);
    let mut r = rng(2);
    for _ in 0..5 {
        let x = Kitaev::new(&pd.group, &g).random_point(&mut r, 0.5);
        for i in 0..4 {
            for j in 0..4 {
                let b = eng.bracket(&coord(0, i), &coord(0, j), &x).unwrap();
                assert!((b + 2.0 * pd.r_a[(i, j)]).abs() < 1e-9, "({i}, {j})");
            }
        }
    }
}

#[test]
fn fields_must_match_the_space() {
    let pd = sl2c();
    let g = square();
    let x = Kitaev::new(&pd.group, &g).identity_point();
    let eng = Engine::kitaev(&pd, &g, DEFAULT_FD_STEP);
    assert!(matches!(eng.bracket(&coord(4, 0), &coord(0, 0), &x), Err(LabError::DimensionMismatch(_))));
    let plain = Engine::heisenberg(&pd, DEFAULT_FD_STEP);
    let hol = ScalarField::HolonomyCoordinate { path: g.face_path(0, None), entry: 0 };
    assert!(matches!(plain.bracket(&hol, &hol, &x[..1]), Err(LabError::DimensionMismatch(_))));
    assert!(matches!(eng.bivector(&x[..2]), Err(LabError::DimensionMismatch(_))));
}

#[test]
fn jacobians_of_simple_maps() {
    let pd = sl2c();
    let gr = &pd.group;
    let id = DMatrix::<f64>::identity(6, 6);
    let x = vec![gr.random(&mut rng(3), 0.5)];
    let j = pushforward_jacobian(gr, &|y: &[_]| y.to_vec(), &x, DEFAULT_FD_STEP).unwrap();
    assert!(max_abs(&(j - &id)) < 1e-8);
    let inv = |y: &[E]| vec![gr.inv(&y[0])];
    let j = pushforward_jacobian(gr, &inv, &[gr.identity()], DEFAULT_FD_STEP).unwrap();
    assert!(max_abs(&(j + &id)) < 1e-8);

    let a = gr.random(&mut rng(4), 0.5);
    let psi = |y: &[E]| vec![gr.mul3(&a, &y[0], &a)];
    let phi = |y: &[E]| vec![gr.inv(&y[0]), gr.mul(&y[0], &y[0])];
    let both = |y: &[E]| phi(&psi(y));
    let jc = pushforward_jacobian(gr, &both, &x, DEFAULT_FD_STEP).unwrap();
    let jp = pushforward_jacobian(gr, &phi, &psi(&x), DEFAULT_FD_STEP).unwrap();
    let js = pushforward_jacobian(gr, &psi, &x, DEFAULT_FD_STEP).unwrap();
    assert_eq!(jc.shape(), (12, 6));
    assert!(max_abs(&(jc - jp * js)) < 1e-6);
}

#[test]
fn map_residuals() {
    let pd = sl2c();
    let g = paired_square();
    let k = Kitaev::new(&pd.group, &g);
    let eng = Engine::kitaev(&pd, &g, DEFAULT_FD_STEP);
    let mut r = rng(5);
    let x = k.random_point(&mut r, 0.5);
    assert!(map_residual(&eng, &eng, &|y: &[_]| y.to_vec(), &x).unwrap() < 1e-10);

    let dec = Decoupling::new(&g).unwrap();
    let fr = Engine::fock_rosly(&pd, &g, DEFAULT_FD_STEP);
    let phi = |y: &[_]| dec.phi(&pd.group, y).unwrap();
    assert!(map_residual(&eng, &fr, &phi, &x).unwrap() < 1e-5);

    let pa = abelian(2);
    let ka = Kitaev::new(&pa.group, &g);
    let (ea, fa) = (Engine::kitaev(&pa, &g, DEFAULT_FD_STEP), Engine::fock_rosly(&pa, &g, DEFAULT_FD_STEP));
    let xa = ka.random_point(&mut r, 0.5);
    let phi = |y: &[_]| dec.phi(&pa.group, y).unwrap();
    assert!(map_residual(&ea, &fa, &phi, &xa).unwrap() < 1e-9);
}

#[test]
fn jacobi_residuals() {
    let pd = sl2c();
    let x = vec![pd.group.random(&mut rng(7), 0.5)];
    assert!(jacobi_residual(&Engine::heisenberg(&pd, DEFAULT_FD_STEP), &x).unwrap() < 1e-4);

    // on the torus the frame is the coordinate frame, so any constant bivector works
    let pa = abelian(2);
    let m = DMatrix::from_fn(4, 4, |i, j| (i as f64 + 1.0) * (j as f64 - 0.5));
    let w0 = &m - m.transpose();
    let constant = Engine::custom(&pa, 1, Space::Factors, DEFAULT_FD_STEP, Box::new(move |_| w0.clone()));
    let xa = vec![pa.group.random(&mut rng(8), 0.5)];
    assert!(jacobi_residual(&constant, &xa).unwrap() < 1e-12);
    assert!(jacobi_residual(&Engine::heisenberg(&pa, DEFAULT_FD_STEP), &xa).unwrap() < 1e-12);
}

#[test]
fn catalog_examples() {
    let cfg = RunConfig { samples: 50, ..Default::default() };
    let rec = run_property(&sl2c(), "vertex_ops_commute", &square(), "square", &cfg).unwrap();
    assert!(rec.pass && rec.max_residual < 1e-5, "{rec:?}");

    let cfg = RunConfig { samples: 5, ..Default::default() };
    let rec = run_property(&abelian(2), "opposite_sides_commute", &single_edge(), "single_edge", &cfg).unwrap();
    assert!(rec.pass && rec.max_residual < 1e-12, "{rec:?}");
    assert_eq!(rec.backend, "abelian:2");

    let rec = run_property(&sl2c(), "reidemeister_segments", &one_loop(), "loop", &cfg).unwrap();
    assert!(rec.skipped && !rec.pass && rec.note.is_some());
    assert!(all_pass(&[rec]));

    let err = run_property(&sl2c(), "no_such_check", &square(), "square", &cfg).unwrap_err();
    assert!(matches!(err, LabError::UnknownProperty(_)));
}

#[test]
fn every_entry_passes_on_the_square() {
    let cfg = RunConfig { samples: 3, ..Default::default() };
    let g = paired_square();
    let (ps, pa) = (sl2c(), abelian(2));
    for &(name, ..) in CATALOG {
        for rec in [run_property(&ps, name, &g, "paired_square", &cfg), run_property(&pa, name, &g, "paired_square", &cfg)] {
            let rec = rec.unwrap();
            assert!(rec.pass, "{rec:?}");
        }
    }
}

#[test]
fn vertex_field_vanishes_at_the_identity() {
    let pd = sl2c();
    let g = theta();
    let k = Kitaev::new(&pd.group, &g);
    let eng = Engine::kitaev(&pd, &g, DEFAULT_FD_STEP);
    let id = k.identity_point();
    for v in 0..g.vertices().len() {
        let f = |y: &[_]| vec![pd.group.trace(&k.vertex_holonomy(v, y)).re];
        let lhs = eng.bivector(&id).unwrap().transpose() * eng.gradients(&f, &id).unwrap();
        assert!(max_entry(&lhs) < 1e-9);
    }
}

#[test]
fn class_functions() {
    let pd = sl2c();
    let gr = &pd.group;
    let g = paired_square();
    let base = 0;
    let x = Kitaev::new(gr, &g).random_point(&mut rng(9), 0.5);
    let f = class_function_factory(&g, base, &[Path::empty()], Invariant::ReTrace).unwrap();
    assert!((f[0].eval(gr, &Space::Kitaev(&g), &x).unwrap() - 2.0).abs() < 1e-15);

    let open = Path::letter(Letter::new(Gen::R, 0));
    assert!(matches!(class_function_factory(&g, base, &[open], Invariant::ReTrace), Err(LabError::NotClosed(_))));

    // the site holonomy trace is invariant under the site action on flat samples
    let k = Kitaev::new(gr, &g);
    let mut r = rng(10);
    let fc = g.associated_face(base);
    let site = g.vertex_path(base, None).compose(&g.face_path(fc, None));
    let spec = FlatnessSpec::all_but_sites(&g, &[(base, fc)]);
    for inv in [Invariant::ReTrace, Invariant::AbsTraceSq] {
        let f = class_function_factory(&g, base, std::slice::from_ref(&site), inv).unwrap().remove(0);
        for _ in 0..10 {
            let x = k.sample_flat(&spec, &mut r, 0.5).unwrap();
            let moved = k.site_action(base, fc, &gr.random(&mut r, 0.5), &x).unwrap();
            let before = f.eval(gr, &Space::Kitaev(&g), &x).unwrap();
            assert!((f.eval(gr, &Space::Kitaev(&g), &moved).unwrap() - before).abs() < 1e-9);
        }
    }
}

#[test]
fn lifted_walks_are_closed_and_intertwined() {
    let pd = sl2c();
    let gr = &pd.group;
    let mut r = rng(11);
    for g in [paired_square(), paired_loop(), paired_torus()] {
        let base = 0;
        let dec = Decoupling::new(&g).unwrap();
        let cycles = fundamental_cycles(&g, base);
        assert!(!cycles.is_empty());
        let corner = Corner { vertex: base, index: 0 };
        let words = random_class_words(&cycles, 6, 3, &mut r);
        let x = Kitaev::new(gr, &g).random_point(&mut r, 0.5);
        let image = dec.phi(gr, &x).unwrap();
        for (w, _) in words {
            let fr = walk_path(&w);
            let lifted = dec.lift(&fr);
            assert_eq!(g.path_endpoints(&lifted).unwrap(), Some((corner, corner)));
            let lhs = Kitaev::new(gr, &g).hol(&lifted, &x).unwrap();
            assert!(gr.dist(&lhs, &hol_fr_word(gr, &fr, &image)) < 1e-10);
        }
    }
}

#[test]
fn reports_are_deterministic() {
    let pd = sl2c();
    let g = theta();
    let cfg = RunConfig { samples: 4, seed: 7, ..Default::default() };
    let run = || {
        let mut recs: Vec<CheckRecord> = ["face_ops_commute", "invariant_subalgebra_closed", "glue_vertex_poisson"]
            .iter()
            .map(|n| run_property(&pd, n, &g, "theta", &cfg).unwrap())
            .collect();
        recs.iter_mut().for_each(|r| r.runtime_ms = 0);
        report_json(&recs)
    };
    let first = run();
    assert_eq!(first, run());
    let parsed: Vec<CheckRecord> = serde_json::from_str(&first).unwrap();
    assert_eq!(parsed.len(), 3);
    let other = run_property(&pd, "face_ops_commute", &g, "theta", &RunConfig { seed: 8, ..cfg }).unwrap();
    assert_ne!(other.max_residual, parsed[0].max_residual);
}

#[test]
fn residuals_shrink_quadratically() {
    let cfg = RunConfig { samples: 3, h: 1e-2, ..Default::default() };
    let (coarse, fine, ratio) = convergence(&sl2c(), "phi_poisson", &paired_square(), &cfg).unwrap();
    assert!(coarse > fine && ratio <= 0.3, "{coarse} {fine} {ratio}");
}
