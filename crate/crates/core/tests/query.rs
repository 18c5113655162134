mod common;

use std::collections::BTreeSet;

use common::*;
use tracer_core::kb::{links, types, KnowledgeBase};
use tracer_core::query::*;

const NS: &str = "GeomKernel.CmdsCleanup";
const CLASS: &str = "GeomKernel.CmdsCleanup.CleanupControl";
const ZOOM_INT: &str = "GeomKernel.CmdsCleanup.CleanupControl.ZoomOut(int,bool)";
const ZOOM_OBJ: &str = "GeomKernel.CmdsCleanup.CleanupControl.ZoomOut(object,EventArgs)";
const RENDER: &str = "extern:Renderer.Render/1";

fn cleanup() -> KnowledgeBase {
    kb_of_file(&corpus_dir().join("cleanup.cs"))
}

fn field(name: &str) -> String {
    format!("{CLASS}.{name}")
}

fn all_ids(v: &VisibleSet) -> BTreeSet<String> {
    v.values().flatten().cloned().collect()
}

fn path(ids: &[&str]) -> Vec<String> {
    ids.iter().map(|s| s.to_string()).collect()
}

#[test]
fn unbounded_selection_reaches_whole_corpus() {
    let kb = cleanup();
    let v = visible_set(&kb, &Selection::checking([ZOOM_INT])).unwrap();
    assert_eq!(all_ids(&v).len(), kb.object_count());
}

#[test]
fn depth_one_neighbours() {
    let kb = cleanup();
    let mut sel = Selection::checking([ZOOM_INT]);
    sel.max_depth = Some(1);
    let got = all_ids(&visible_set(&kb, &sel).unwrap());
    let expected: BTreeSet<String> = [
        ZOOM_INT.to_string(),
        CLASS.to_string(),
        format!("{ZOOM_INT}#factor"),
        format!("{ZOOM_INT}#redraw"),
        field("m_drag_curve"),
        field("rd"),
        field("glControl"),
        RENDER.to_string(),
        ZOOM_OBJ.to_string(),
    ]
    .into();
    assert_eq!(got, expected);
}

#[test]
fn expand_first_overload() {
    let kb = cleanup();
    let nodes = expand(&kb, &path(&[ZOOM_OBJ])).unwrap();
    let summary: Vec<_> = nodes.iter().map(|n| (n.node_kind, n.label.as_str(), n.expandable)).collect();
    assert_eq!(
        summary,
        [
            (NodeKind::ParamEntry, "sender", false),
            (NodeKind::ParamEntry, "e", true),
            (NodeKind::CallEntry, "Calls::ZoomOut", true),
        ]
    );
    assert!(nodes[2].same_class_call);
    assert_eq!(nodes[2].object_id.as_deref(), Some(ZOOM_INT));
}

#[test]
fn same_class_call_subtree_equals_direct_expansion() {
    let kb = cleanup();
    let via_call = expand(&kb, &path(&[ZOOM_OBJ, ZOOM_INT])).unwrap();
    let direct = expand(&kb, &path(&[CLASS, ZOOM_INT])).unwrap();
    assert_eq!(via_call, direct);
    assert_eq!(direct, expand(&kb, &path(&[ZOOM_INT])).unwrap());
    let labels: Vec<_> = direct.iter().map(|n| n.label.as_str()).collect();
    assert_eq!(
        labels,
        ["factor", "redraw", "m_drag_curve (write)", "rd (read)", "glControl (read)", "Renderer.Render"]
    );
    let render = direct.last().unwrap();
    assert!(!render.expandable && !render.same_class_call);
}

#[test]
fn external_targets_do_not_expand() {
    let kb = cleanup();
    assert!(matches!(
        expand(&kb, &path(&[ZOOM_INT, RENDER])),
        Err(QueryError::NotExpandable(_))
    ));
    assert!(matches!(expand(&kb, &path(&[RENDER])), Err(QueryError::NotExpandable(_))));
}

#[test]
fn namespace_then_class_ordering() {
    let kb = cleanup();
    let top = expand(&kb, &path(&[NS])).unwrap();
    assert_eq!(top.len(), 1);
    assert_eq!(top[0].label, "CleanupControl");
    let members: Vec<_> = expand(&kb, &path(&[NS, CLASS])).unwrap().into_iter().map(|n| n.label).collect();
    assert_eq!(members, ["rd", "m_drag_curve", "glControl", "ZoomOut", "ZoomOut"]);
}

#[test]
fn recursion_is_flagged_at_first_repeat() {
    let kb = kb_of_source("class R { void M(int n) { M(n); } }");
    let nodes = expand(&kb, &path(&["R.M(int)"])).unwrap();
    let call = nodes.iter().find(|n| n.node_kind == NodeKind::CallEntry).unwrap();
    assert!(call.cyclic);
    assert!(!call.expandable);
}

#[test]
fn mutual_recursion_flags_the_second_visit() {
    let kb = kb_of_file(&corpus_dir().join("recursion.cs"));
    let even = "Algo.Recursion.IsEven(int)";
    let odd = "Algo.Recursion.IsOdd(int)";
    let first = expand(&kb, &path(&[even])).unwrap();
    let to_odd = first.iter().find(|n| n.object_id.as_deref() == Some(odd)).unwrap();
    assert!(to_odd.expandable && !to_odd.cyclic);
    let second = expand(&kb, &path(&[even, odd])).unwrap();
    let back = second.iter().find(|n| n.object_id.as_deref() == Some(even)).unwrap();
    assert!(back.cyclic && !back.expandable);
}

#[test]
fn attributes_of_second_overload() {
    let kb = cleanup();
    let a = object_attributes(&kb, ZOOM_INT).unwrap();
    assert!(a.creates.is_empty());
    assert_eq!(a.calls, [RENDER]);
    assert_eq!(a.called_by, [ZOOM_OBJ]);
    assert_eq!(a.reads, [field("glControl"), field("rd")]);
    assert_eq!(a.writes, [field("m_drag_curve")]);
    assert_eq!(object_attributes(&kb, &field("rd")).unwrap(), ObjectAttributes::default());
    assert_eq!(object_attributes(&kb, "missing"), Err(QueryError::UnknownObject("missing".into())));
}

#[test]
fn reverse_traceability() {
    let kb = cleanup();
    let t = |ids: &[&str]| ids.iter().map(|s| s.to_string()).collect::<BTreeSet<_>>();
    assert_eq!(
        reverse_related(&kb, &t(&[&field("m_drag_curve")]), types::METHOD, None).unwrap(),
        t(&[ZOOM_INT])
    );
    assert_eq!(reverse_related(&kb, &t(&[ZOOM_INT]), types::METHOD, None).unwrap(), t(&[ZOOM_OBJ]));
    assert!(reverse_related(&kb, &t(&[NS]), types::VARIABLE, None).unwrap().is_empty());
    let only_reads: BTreeSet<String> = [links::READS.to_string()].into();
    assert!(reverse_related(&kb, &t(&[&field("m_drag_curve")]), types::METHOD, Some(&only_reads))
        .unwrap()
        .is_empty());
    assert_eq!(
        reverse_related(&kb, &t(&["nope"]), types::METHOD, None),
        Err(QueryError::UnknownObject("nope".into()))
    );
}

#[test]
fn nodes_serialize_in_camel_case() {
    let kb = cleanup();
    let nodes = expand(&kb, &path(&[ZOOM_OBJ])).unwrap();
    let json = serde_json::to_value(&nodes[2]).unwrap();
    assert_eq!(json["nodeKind"], "CallEntry");
    assert_eq!(json["sameClassCall"], true);
    assert_eq!(json["objectId"], ZOOM_INT);
    assert_eq!(json["access"], "public");
    assert_eq!(json["typeId"], "Method");
    assert_eq!(json["seq"], 1);
}
