mod common;

use common::*;
use kitaev_poisson::double_group::{max_abs, DoubleGroup};
use kitaev_poisson::fock_rosly::*;
use kitaev_poisson::kitaev_space::Kitaev;
use kitaev_poisson::ribbon_graph::moves::split_edge;
use kitaev_poisson::ribbon_graph::reference::*;
use kitaev_poisson::ribbon_graph::{Edge, EdgeEnd, End, Path, RibbonGraph, Vertex};
use nalgebra::DMatrix;

fn cherry() -> RibbonGraph {
    let b = |edge| EdgeEnd { edge, end: End::Source };
    let f = |edge| EdgeEnd { edge, end: End::Target };
    RibbonGraph::with_traced_faces(
        vec![
            Vertex { id: "v".into(), ends: vec![b(0), b(1)] },
            Vertex { id: "x".into(), ends: vec![f(0)] },
            Vertex { id: "y".into(), ends: vec![f(1)] },
        ],
        vec![Edge { id: "a".into(), source: 0, target: 1 }, Edge { id: "b".into(), source: 0, target: 2 }],
    )
    .unwrap()
}

fn block(w: &DMatrix<f64>, d: usize, i: usize, j: usize) -> DMatrix<f64> {
    w.view((d * i, d * j), (d, d)).into_owned()
}

#[test]
fn diagonal_block_of_a_plain_edge_is_heisenberg() {
    let pd = sl2c();
    let mut r = rng(1);
    let g = square();
    for _ in 0..10 {
        let pt = Kitaev::new(&pd.group, &g).random_point(&mut r, 0.5);
        let w = fr_bivector(&pd, &g, &pt);
        for e in 0..4 {
            assert!(max_abs(&(block(&w, 6, e, e) - pd.w_heisenberg(&pt[e]))) < 1e-12);
        }
        assert!(max_abs(&(&w + w.transpose())) < 1e-12);
        assert!(max_abs(&block(&w, 6, 0, 2)) == 0.0);
        assert!(max_abs(&block(&w, 6, 1, 3)) == 0.0);
    }
}

#[test]
fn two_outgoing_edges_couple_through_r21() {
    let pd = sl2c();
    let mut r = rng(2);
    let g = cherry();
    let pt = Kitaev::new(&pd.group, &g).random_point(&mut r, 0.5);
    let w = fr_bivector(&pd, &g, &pt);
    let expect = pd.adjoint(&pt[0]) * pd.r21() * pd.adjoint(&pt[1]).transpose();
    assert!(max_abs(&(block(&w, 6, 0, 1) - expect)) < 1e-12);
}

#[test]
fn abelian_blocks_are_constant() {
    let pd = abelian(2);
    let mut r = rng(3);
    let g = cherry();
    let pt = Kitaev::new(&pd.group, &g).random_point(&mut r, 0.5);
    let w = fr_bivector(&pd, &g, &pt);
    assert!(max_abs(&(block(&w, 4, 0, 0) + &pd.r_a * 2.0)) < 1e-15);
    assert!(max_abs(&(block(&w, 4, 0, 1) - pd.r21())) < 1e-15);
    let sq = square();
    let pt = Kitaev::new(&pd.group, &sq).random_point(&mut r, 0.5);
    let w = fr_bivector(&pd, &sq, &pt);
    // at v2 the end b(e2) precedes f(e1)
    assert!(max_abs(&(block(&w, 4, 1, 0) - (&pd.r_a - &pd.r_s))) < 1e-15);
}

#[test]
fn vertex_action_laws() {
    let pd = sl2c();
    let gr = &pd.group;
    let mut r = rng(4);
    for g in [square(), theta(), one_loop(), paired_square()] {
        let pt = Kitaev::new(gr, &g).random_point(&mut r, 0.5);
        for v in 0..g.vertices().len() {
            assert_eq!(fr_vertex_action(gr, &g, v, &gr.identity(), &pt), pt);
            let (a, b) = (gr.random(&mut r, 0.5), gr.random(&mut r, 0.5));
            let lhs = fr_vertex_action(gr, &g, v, &a, &fr_vertex_action(gr, &g, v, &b, &pt));
            let rhs = fr_vertex_action(gr, &g, v, &gr.mul(&a, &b), &pt);
            assert!(point_dist(gr, &lhs, &rhs) < 1e-12);
        }
    }
    let g = square();
    let pt = Kitaev::new(gr, &g).random_point(&mut r, 0.5);
    let (a, b) = (gr.random(&mut r, 0.5), gr.random(&mut r, 0.5));
    let x = fr_vertex_action(gr, &g, 0, &a, &fr_vertex_action(gr, &g, 2, &b, &pt));
    let y = fr_vertex_action(gr, &g, 2, &b, &fr_vertex_action(gr, &g, 0, &a, &pt));
    assert!(point_dist(gr, &x, &y) < 1e-15);
}

#[test]
fn holonomy_sees_only_sides() {
    let pd = sl2c();
    let gr = &pd.group;
    let mut r = rng(5);
    for g in [square(), theta(), paired_square(), paired_loop()] {
        let pt = Kitaev::new(gr, &g).random_point(&mut r, 0.5);
        assert_eq!(hol_fr(gr, &g, &Path::empty(), &pt).unwrap(), gr.identity());
        let id = Kitaev::new(gr, &g).identity_point();
        for f in 0..g.faces().len() {
            assert_eq!(fr_face_holonomy(gr, &g, f, &id), gr.identity());
        }
        for (v, f) in g.sites() {
            let p = g.vertex_path(v, None).compose(&g.face_path(f, None));
            let lhs = hol_fr(gr, &g, &p, &pt).unwrap();
            assert!(gr.dist(&lhs, &fr_face_holonomy(gr, &g, f, &pt)) < 1e-15);
        }
    }
}

#[test]
fn glue_edges_and_equivariance() {
    let pd = sl2c();
    let gr = &pd.group;
    let mut r = rng(6);
    let g = square();
    let (h, _) = split_edge(&g, 1).unwrap();
    let vm = h.vertex_index("e2.v").unwrap();
    let mut pt = Kitaev::new(gr, &h).random_point(&mut r, 0.5);
    pt[2] = gr.identity();
    let (g2, q, _) = fr_glue_edges(gr, &h, vm, &pt).unwrap();
    assert_eq!(g2.to_json(), g.to_json());
    assert!(point_dist(gr, &q, &[pt[0].clone(), pt[1].clone(), pt[3].clone(), pt[4].clone()]) < 1e-15);
    for v in 0..h.vertices().len() {
        if v == vm {
            continue;
        }
        let a = gr.random(&mut r, 0.5);
        let vid = &h.vertices()[v].id;
        let lhs = fr_glue_edges(gr, &h, vm, &fr_vertex_action(gr, &h, v, &a, &pt)).unwrap().1;
        let rhs = fr_vertex_action(gr, &g2, g2.vertex_index(vid).unwrap(), &a, &q);
        assert!(point_dist(gr, &lhs, &rhs) < 1e-12);
    }
    // erasing also commutes with every vertex action
    let pt = Kitaev::new(gr, &g).random_point(&mut r, 0.5);
    let a = gr.random(&mut r, 0.5);
    let (g3, q, _) = fr_erase_edge(&g, 2, None, &pt).unwrap();
    let lhs = fr_erase_edge(&g, 2, None, &fr_vertex_action(gr, &g, 1, &a, &pt)).unwrap().1;
    assert!(point_dist(gr, &lhs, &fr_vertex_action(gr, &g3, 1, &a, &q)) < 1e-15);
    let rev = fr_reverse_edge(gr, 0, &fr_reverse_edge(gr, 0, &pt));
    assert!(point_dist(gr, &rev, &pt) < 1e-15);
}

#[test]
fn flat_section_inverts_erasure() {
    let pd = sl2c();
    let gr = &pd.group;
    let mut r = rng(7);
    for g in [square(), theta(), paired_square()] {
        for e in 0..g.num_edges() {
            let (lf, rf) = (g.left_face(e), g.right_face(e));
            if lf == rf {
                continue;
            }
            for f_flat in [lf, rf] {
                let (h, id, _) = fr_erase_edge(&g, e, Some(f_flat), &Kitaev::new(gr, &g).identity_point()).unwrap();
                let s = fr_flat_section(gr, &g, e, f_flat, &id).unwrap();
                assert!(point_dist(gr, &s, &Kitaev::new(gr, &g).identity_point()) < 1e-15);

                let red = Kitaev::new(gr, &h).random_point(&mut r, 0.5);
                let s = fr_flat_section(gr, &g, e, f_flat, &red).unwrap();
                assert!(gr.dist(&fr_face_holonomy(gr, &g, f_flat, &s), &gr.identity()) < 1e-10);
                let back = fr_erase_edge(&g, e, Some(f_flat), &s).unwrap().1;
                assert!(point_dist(gr, &back, &red) < 1e-15);
                let again = fr_flat_section(gr, &g, e, f_flat, &back).unwrap();
                assert!(point_dist(gr, &again, &s) < 1e-12);

                for v in 0..g.vertices().len() {
                    let a = gr.random(&mut r, 0.5);
                    let lhs = fr_flat_section(gr, &g, e, f_flat, &fr_vertex_action(gr, &h, v, &a, &red)).unwrap();
                    let rhs = fr_vertex_action(gr, &g, v, &a, &s);
                    assert!(point_dist(gr, &lhs, &rhs) < 1e-10);
                }
                let other = if f_flat == lf { rf } else { lf };
                let oid = &g.faces()[other].id;
                // the survivor keeps its id; its holonomy agrees up to the cyclic start
                let fo = h.face_index(oid).unwrap();
                let before = fr_face_holonomy(gr, &h, fo, &red);
                let after = fr_face_holonomy(gr, &g, other, &s);
                assert!((gr.trace(&before) - gr.trace(&after)).norm() < 1e-10);
                for f in 0..g.faces().len() {
                    if f == lf || f == rf {
                        continue;
                    }
                    let fh = h.face_index(&g.faces()[f].id).unwrap();
                    let x = fr_face_holonomy(gr, &h, fh, &red);
                    assert!(gr.dist(&x, &fr_face_holonomy(gr, &g, f, &s)) < 1e-10);
                }
            }
        }
    }
}

#[test]
fn section_rejects_double_visits() {
    let pd = sl2c();
    let g = single_edge();
    let err = fr_flat_section(&pd.group, &g, 0, 0, &[]).unwrap_err();
    assert!(matches!(err, FrError::NoUniqueSolution { count: 2, .. }));
}
