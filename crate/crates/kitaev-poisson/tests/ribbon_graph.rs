use kitaev_poisson::ribbon_graph::moves::*;
use kitaev_poisson::ribbon_graph::reference::*;
use kitaev_poisson::ribbon_graph::*;

fn json_single_edge(face_path: &str) -> String {
    format!(
        r#"{{"vertices": [{{"id": "v1", "ends": [["e", "s"]]}}, {{"id": "v2", "ends": [["e", "t"]]}}],
            "edges": [{{"id": "e", "source": "v1", "target": "v2"}}],
            "faces": [{{"id": "f", "path": {face_path}}}]}}"#
    )
}

fn all_graphs() -> Vec<RibbonGraph> {
    NAMES.iter().map(|n| by_name(n).unwrap()).collect()
}

fn counts_ok(g: &RibbonGraph) -> bool {
    let ends: usize = g.vertices().iter().map(|v| v.ends.len()).sum();
    let sides: usize = g.faces().iter().map(|f| f.steps.len()).sum();
    ends == 2 * g.num_edges() && sides == 2 * g.num_edges()
}

#[test]
fn validate_single_edge() {
    let g = RibbonGraph::from_json(&json_single_edge(r#"[["e", "+"], ["e", "-"]]"#)).unwrap();
    assert_eq!(g.faces().len(), 1);
    let rotated = RibbonGraph::from_json(&json_single_edge(r#"[["e", "-"], ["e", "+"]]"#));
    assert!(rotated.is_ok());
}

#[test]
fn validate_rejects_half_face() {
    let err = RibbonGraph::from_json(&json_single_edge(r#"[["e", "+"]]"#)).unwrap_err();
    assert_eq!(err, GraphError::NotAFacePath("f".into()));
}

#[test]
fn validate_reports_errors() {
    let unknown = r#"{"vertices": [{"id": "v1", "ends": [["x", "s"]]}], "edges": [], "faces": []}"#;
    assert!(matches!(RibbonGraph::from_json(unknown), Err(GraphError::UnknownReference(_))));
    let uncovered = r#"{"vertices": [{"id": "v", "ends": [["e", "s"], ["e", "t"]]}],
        "edges": [{"id": "e", "source": "v", "target": "v"}], "faces": [{"id": "f", "path": [["e", "+"]]}]}"#;
    assert!(matches!(RibbonGraph::from_json(uncovered), Err(GraphError::UncoveredEdgeSide(_))));
    let disconnected = r#"{"vertices": [{"id": "v1", "ends": [["e", "s"]]}, {"id": "v2", "ends": [["e", "t"]]},
        {"id": "w1", "ends": [["d", "s"]]}, {"id": "w2", "ends": [["d", "t"]]}],
        "edges": [{"id": "e", "source": "v1", "target": "v2"}, {"id": "d", "source": "w1", "target": "w2"}],
        "faces": [{"id": "f", "path": [["e", "+"], ["e", "-"]]}, {"id": "g", "path": [["d", "+"], ["d", "-"]]}]}"#;
    assert_eq!(RibbonGraph::from_json(disconnected), Err(GraphError::Disconnected));
    assert!(matches!(RibbonGraph::from_json("{"), Err(GraphError::Parse(_))));
}

#[test]
fn square_roundtrips_through_json() {
    let g = square();
    assert_eq!(g.faces().len(), 2);
    let h = RibbonGraph::from_json(&g.to_json()).unwrap();
    assert_eq!(g, h);
}

#[test]
fn traced_face_counts() {
    assert_eq!(single_edge().faces().len(), 1);
    assert_eq!(theta().faces().len(), 3);
    assert_eq!(square().faces().len(), 2);
    assert_eq!(one_loop().faces().len(), 2);
    for g in all_graphs() {
        assert!(counts_ok(&g));
        g.check().unwrap();
    }
}

#[test]
fn vertex_paths() {
    let g = square();
    assert!(g.vertex_path(0, Some(0)).is_empty());
    // v2 has ends [b(e2), f(e1)]
    let p = g.vertex_path(1, None);
    assert_eq!(p.word, vec![Letter::new(Gen::B, 1).inv(), Letter::new(Gen::F, 0)]);
    let desc = r#"{"vertices": [{"id": "v", "ends": [["e1", "t"], ["e2", "t"], ["e3", "s"]]},
        {"id": "a", "ends": [["e1", "s"]]}, {"id": "b", "ends": [["e2", "s"]]}, {"id": "c", "ends": [["e3", "t"]]}],
        "edges": [{"id": "e1", "source": "a", "target": "v"}, {"id": "e2", "source": "b", "target": "v"},
                  {"id": "e3", "source": "v", "target": "c"}],
        "faces": [{"id": "f", "path": [["e1", "+"], ["e2", "-"], ["e2", "+"], ["e3", "+"], ["e3", "-"], ["e1", "-"]]}]}"#;
    let g = RibbonGraph::from_json(desc).unwrap();
    let p = g.vertex_path(0, None);
    assert_eq!(p.word, vec![Letter::new(Gen::F, 0), Letter::new(Gen::F, 1), Letter::new(Gen::B, 2).inv()]);
    let (s, t) = g.path_endpoints(&p).unwrap().unwrap();
    assert_eq!(s, t);
}

#[test]
fn face_paths() {
    let (g, rec) = double_edge(&single_edge(), 0).unwrap();
    let MoveRecord::DoubleEdge { face: Some(fm), .. } = rec else { panic!() };
    let fm = g.face_index(&fm).unwrap();
    assert!(g.face_path(fm, Some(0)).is_empty());
    let (e1, e2) = (g.edge_index("e.a").unwrap(), g.edge_index("e.b").unwrap());
    assert_eq!(g.face_path(fm, None).word, vec![Letter::new(Gen::L, e2).inv(), Letter::new(Gen::R, e1)]);
    for g in all_graphs() {
        for f in 0..g.faces().len() {
            let (s, t) = g.path_endpoints(&g.face_path(f, None)).unwrap().unwrap();
            assert_eq!(s, t);
        }
        for v in 0..g.vertices().len() {
            let (s, t) = g.path_endpoints(&g.vertex_path(v, None)).unwrap().unwrap();
            assert_eq!((s, t.index), (t, 0));
        }
    }
}

#[test]
fn paths_reduce() {
    let g = theta();
    let p = g.face_path(0, None).compose(&g.vertex_path(0, None));
    assert!(p.compose(&p.inverse()).reduced().is_empty());
    let q = g.vertex_path(1, None);
    assert_eq!(p.compose(&q).compose(&p), p.compose(&q.compose(&p)));
}

#[test]
fn sites_in_single_edge_graph() {
    let g = single_edge();
    assert_eq!(g.associated_face(0), 0);
    assert!(g.is_site(0, 0));
    let (h, _) = shift_cilium(&g, &CiliumTarget::Face("f1".into()), 1).unwrap();
    assert!(!h.is_site(0, 0));
    for g in all_graphs() {
        for (v, f) in g.sites() {
            assert_eq!(g.associated_vertex(f), v);
        }
    }
}

#[test]
fn pairedness() {
    assert!(!one_loop().is_paired());
    assert!(!single_edge().is_paired());
    assert!(!square().is_paired());
    assert!(paired_square().is_paired());
    assert!(paired_loop().is_paired());
}

#[test]
fn surface_signatures() {
    assert_eq!(single_edge().surface_signature(&[0]).unwrap(), (0, 1));
    assert_eq!(square().surface_signature(&[0]).unwrap(), (0, 1));
    assert_eq!(square().surface_signature(&[0, 1]).unwrap(), (0, 2));
    assert_eq!(theta().surface_signature(&[0]).unwrap(), (0, 1));
    assert!(square().surface_signature(&[]).is_err());
    // one vertex, two loops, a single face: a torus
    let torus = RibbonGraph::with_traced_faces(
        vec![Vertex {
            id: "v".into(),
            ends: vec![
                EdgeEnd { edge: 0, end: End::Source },
                EdgeEnd { edge: 1, end: End::Source },
                EdgeEnd { edge: 0, end: End::Target },
                EdgeEnd { edge: 1, end: End::Target },
            ],
        }],
        vec![Edge { id: "a".into(), source: 0, target: 0 }, Edge { id: "b".into(), source: 0, target: 0 }],
    )
    .unwrap();
    assert_eq!(torus.faces().len(), 1);
    assert_eq!(torus.surface_signature(&[0]).unwrap(), (1, 1));
}

#[test]
fn split_then_glue_is_identity() {
    for g in all_graphs() {
        for e in 0..g.num_edges() {
            let (h, rec) = split_edge(&g, e).unwrap();
            h.check().unwrap();
            let MoveRecord::SplitEdge { vertex: Some(vm), .. } = rec else { panic!() };
            let (k, _) = glue_bivalent(&h, h.vertex_index(&vm).unwrap(), None).unwrap();
            assert_eq!(k, g);
        }
    }
}

#[test]
fn double_then_glue_is_identity() {
    for g in all_graphs() {
        for e in 0..g.num_edges() {
            let (h, rec) = double_edge(&g, e).unwrap();
            h.check().unwrap();
            let MoveRecord::DoubleEdge { face: Some(fm), .. } = rec else { panic!() };
            let (k, _) = glue_two_edge_face(&h, h.face_index(&fm).unwrap(), None).unwrap();
            assert_eq!(k, g);
        }
    }
}

#[test]
fn reverse_is_an_involution() {
    for g in all_graphs() {
        for e in 0..g.num_edges() {
            let (h, _) = reverse_edge(&g, e).unwrap();
            h.check().unwrap();
            assert_eq!(reverse_edge(&h, e).unwrap().0, g);
        }
    }
}

#[test]
fn glue_preconditions() {
    let g = square();
    assert!(matches!(glue_bivalent(&g, 0, None), Err(GraphError::PreconditionViolated(_))));
    assert!(matches!(glue_two_edge_face(&g, 0, None), Err(GraphError::PreconditionViolated(_))));
    // a face cilium at the new vertex blocks the glue
    let (h, _) = split_edge(&single_edge(), 0).unwrap();
    let (h, _) = shift_cilium(&h, &CiliumTarget::Face("f1".into()), 1).unwrap();
    assert!(matches!(glue_bivalent(&h, 2, None), Err(GraphError::PreconditionViolated(_))));
}

#[test]
fn erase_requires_distinct_faces() {
    assert!(matches!(erase_edge(&single_edge(), 0, None), Err(GraphError::PreconditionViolated(_))));
    let g = theta();
    for e in 0..3 {
        for a in [g.left_face(e), g.right_face(e)] {
            let (h, _) = erase_edge(&g, e, Some(a)).unwrap();
            h.check().unwrap();
            assert_eq!(h.faces().len(), 2);
        }
    }
    let g = square();
    let (h, _) = erase_edge(&g, 0, None).unwrap();
    h.check().unwrap();
    assert_eq!(h.faces().len(), 1);
}

#[test]
fn signature_is_invariant_under_moves() {
    for g in all_graphs() {
        let sig = g.surface_signature(&[0]).unwrap();
        let marked = g.faces()[0].id.clone();
        let sig_of = |h: &RibbonGraph| h.surface_signature(&[h.face_index(&marked).unwrap()]).unwrap();
        for e in 0..g.num_edges() {
            assert_eq!(sig_of(&split_edge(&g, e).unwrap().0), sig);
            assert_eq!(sig_of(&double_edge(&g, e).unwrap().0), sig);
            assert_eq!(sig_of(&reverse_edge(&g, e).unwrap().0), sig);
        }
        let v = g.vertices()[0].id.clone();
        assert_eq!(sig_of(&shift_cilium(&g, &CiliumTarget::Vertex(v), 1).unwrap().0), sig);
    }
}

#[test]
fn pair_graph_pairs_every_reference_graph() {
    for g in all_graphs() {
        for (v, f) in g.sites() {
            let (h, moves) = pair_graph(&g, &[(v, f)]).unwrap();
            h.check().unwrap();
            assert!(h.is_paired());
            let (vid, fid) = (&g.vertices()[v].id, &g.faces()[f].id);
            assert!(h.is_site(h.vertex_index(vid).unwrap(), h.face_index(fid).unwrap()));
            let sig = g.surface_signature(&[f]).unwrap();
            assert_eq!(h.surface_signature(&[h.face_index(fid).unwrap()]).unwrap(), sig);
            let (k, _) = apply_script(&g, &moves).unwrap();
            assert_eq!(k, h);
        }
    }
}

#[test]
fn pair_graph_on_paired_graph_with_all_sites_is_trivial() {
    let g = paired_square();
    let (h, moves) = pair_graph(&g, &g.sites()).unwrap();
    assert!(moves.is_empty());
    assert_eq!(h, g);
}

#[test]
fn pair_graph_splits_loops() {
    let g = one_loop();
    let (h, moves) = pair_graph(&g, &[(0, 0)]).unwrap();
    assert!(matches!(moves[0], MoveRecord::SplitEdge { .. }));
    assert!((0..h.num_edges()).all(|e| !h.is_loop(e)));
}

#[test]
fn pair_graph_rejects_bad_sites() {
    let g = square();
    assert!(matches!(pair_graph(&g, &[]), Err(GraphError::InvalidSite(_))));
    assert!(matches!(pair_graph(&g, &[(0, 1)]), Err(GraphError::InvalidSite(_))));
    assert!(matches!(pair_graph(&g, &[(0, 0), (0, 0)]), Err(GraphError::InvalidSite(_))));
}

#[test]
fn move_records_roundtrip_json() {
    let (_, moves) = pair_graph(&square(), &[(0, 0)]).unwrap();
    let text = serde_json::to_string(&moves).unwrap();
    let back: Vec<MoveRecord> = serde_json::from_str(&text).unwrap();
    assert_eq!(back, moves);
    let script: Vec<MoveRecord> = serde_json::from_str(
        r#"[{"kind": "split_edge", "edge": "e1"}, {"kind": "glue_bivalent", "vertex": "e1.v"},
            {"kind": "shift_cilium", "target": {"vertex": "v2"}, "steps": 1}]"#,
    )
    .unwrap();
    let (h, done) = apply_script(&square(), &script).unwrap();
    assert_eq!(done.len(), 3);
    assert_eq!(h.vertices()[1].ends.len(), 2);
    let bad: Vec<MoveRecord> = serde_json::from_str(r#"[{"kind": "reverse", "edge": "nope"}]"#).unwrap();
    assert_eq!(apply_script(&square(), &bad).unwrap_err().0, 0);
}
