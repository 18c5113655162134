use std::io::{Read, Write};
use std::path::PathBuf;
use std::sync::Arc;

use serde_json::{json, Value};
use tracer_cli::service::Service;
use tracer_core::extract::extract;
use tracer_core::kb::KnowledgeBase;
use tracer_core::pipeline::source_to_ir;

const CLASS: &str = "GeomKernel.CmdsCleanup.CleanupControl";
const ZOOM_INT: &str = "GeomKernel.CmdsCleanup.CleanupControl.ZoomOut(int,bool)";
const ZOOM_OBJ: &str = "GeomKernel.CmdsCleanup.CleanupControl.ZoomOut(object,EventArgs)";

fn cleanup_kb() -> KnowledgeBase {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus/cleanup.cs");
    let src = std::fs::read_to_string(path).unwrap();
    extract(&[source_to_ir("cleanup.cs", &src).unwrap()])
}

fn setup() -> (tempfile::TempDir, PathBuf, Service) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("kb.xml");
    std::fs::write(&path, cleanup_kb().to_xml()).unwrap();
    let svc = Service::open(&path).unwrap();
    (dir, path, svc)
}

fn enc(id: &str) -> String {
    percent_encoding::utf8_percent_encode(id, percent_encoding::NON_ALPHANUMERIC).to_string()
}

fn get(svc: &Service, target: &str) -> (u16, Value) {
    let r = svc.handle_request("GET", target, b"");
    (r.status, r.body)
}

fn post(svc: &Service, target: &str, body: Value) -> (u16, Value) {
    let r = svc.handle_request("POST", target, body.to_string().as_bytes());
    (r.status, r.body)
}

#[test]
fn listing_routes() {
    let (_d, _p, svc) = setup();
    let (s, types) = get(&svc, "/api/types");
    assert_eq!(s, 200);
    assert_eq!(types[0], json!({ "id": "Namespace", "displayOrder": 0 }));
    let (s, lt) = get(&svc, "/api/linktypes");
    assert_eq!(s, 200);
    assert!(lt.as_array().unwrap().contains(&json!({ "id": "Calls" })));
    let (s, methods) = get(&svc, "/api/objects?type=Method");
    assert_eq!(s, 200);
    assert_eq!(methods.as_array().unwrap().len(), 3);
    assert!(methods.as_array().unwrap().contains(&json!({ "id": ZOOM_INT, "name": "ZoomOut", "access": "public", "external": false })));
    assert_eq!(get(&svc, "/api/objects?type=Bogus").0, 404);
    assert_eq!(get(&svc, "/api/objects").1.as_array().unwrap().len(), 16);
}

#[test]
fn selection_route() {
    let (_d, _p, svc) = setup();
    let (s, all) = post(&svc, "/api/selection", json!({ "checked": [], "linkTypes": null, "maxDepth": null }));
    assert_eq!(s, 200);
    let count: usize = all["visible"].as_object().unwrap().values().map(|v| v.as_array().unwrap().len()).sum();
    assert_eq!(count, 16);
    let (s, one) = post(&svc, "/api/selection", json!({ "checked": [ZOOM_INT], "linkTypes": null, "maxDepth": 1 }));
    assert_eq!(s, 200);
    assert_eq!(one["visible"]["Method"].as_array().unwrap().len(), 3);
    assert_eq!(one["visible"]["Class"], json!([CLASS]));
    assert_eq!(post(&svc, "/api/selection", json!({ "checked": ["Nope"] })).0, 404);
    assert_eq!(post(&svc, "/api/selection", json!({ "checked": "x" })).0, 400);
    assert_eq!(post(&svc, "/api/selection", json!({ "maxDepth": -1 })).0, 400);
    assert_eq!(svc.handle_request("POST", "/api/selection", b"{not json").status, 400);
}

#[test]
fn tree_route() {
    let (_d, _p, svc) = setup();
    let (s, nodes) = get(&svc, &format!("/api/tree?path={}", enc(ZOOM_OBJ)));
    assert_eq!(s, 200);
    let labels: Vec<&str> = nodes.as_array().unwrap().iter().map(|n| n["label"].as_str().unwrap()).collect();
    assert_eq!(labels, ["sender", "e", "Calls::ZoomOut"]);
    let (s, sub) = get(&svc, &format!("/api/tree?path={}/{}", enc(ZOOM_OBJ), enc(ZOOM_INT)));
    assert_eq!(s, 200);
    assert_eq!(sub, get(&svc, &format!("/api/tree?path={}", enc(ZOOM_INT))).1);
    let render = enc("extern:Renderer.Render/1");
    assert_eq!(get(&svc, &format!("/api/tree?path={}/{render}", enc(ZOOM_INT))).0, 400);
    assert_eq!(get(&svc, "/api/tree?path=Nope").0, 404);
    assert_eq!(get(&svc, "/api/tree").0, 400);
}

#[test]
fn object_detail_and_annotations() {
    let (_d, path, svc) = setup();
    let (s, d) = get(&svc, &format!("/api/object/{}", enc(ZOOM_INT)));
    assert_eq!(s, 200);
    assert_eq!(d["attributes"]["calledBy"], json!([ZOOM_OBJ]));
    assert_eq!(d["container"], CLASS);
    let render = get(&svc, &format!("/api/object/{}", enc("extern:Renderer.Render/1")));
    assert_eq!(render.0, 200);
    assert_eq!(render.1["external"], true);
    assert_eq!(get(&svc, "/api/object/unknown").0, 404);

    let base = format!("/api/object/{}", enc(ZOOM_INT));
    let (s, d) = post(&svc, &format!("{base}/description"), json!({ "text": "Zooms out." }));
    assert_eq!(s, 200);
    assert_eq!(d["description"], "Zooms out.");
    assert_eq!(post(&svc, &format!("{base}/version"), json!({ "version": "2.1" })).1["version"], "2.1");
    let (s, d) = post(&svc, &format!("{base}/notes"), json!({ "level": "open", "text": "check factor" }));
    assert_eq!(s, 200);
    assert_eq!(d["notes"], json!([{ "level": "open", "text": "check factor" }]));
    let (s, d) = post(&svc, &format!("{base}/docs"), json!({ "href": "design.html", "anchor": "zoom" }));
    assert_eq!(s, 200);
    assert_eq!(d["docLinks"], json!([{ "href": "design.html", "anchor": "zoom" }]));

    assert_eq!(post(&svc, &format!("{base}/notes"), json!({ "level": "loud", "text": "x" })).0, 400);
    assert_eq!(post(&svc, &format!("{base}/notes"), json!({ "level": "info", "text": " " })).0, 400);
    assert_eq!(post(&svc, &format!("{base}/description"), json!({})).0, 400);
    assert_eq!(post(&svc, &format!("{base}/colour"), json!({ "text": "x" })).0, 404);
    assert_eq!(post(&svc, "/api/object/Nope/description", json!({ "text": "x" })).0, 404);

    let on_disk = KnowledgeBase::from_xml(&std::fs::read_to_string(&path).unwrap()).unwrap();
    svc.with_kb(|kb| assert_eq!(&on_disk, kb));
}

#[test]
fn links_and_events() {
    let (_d, path, svc) = setup();
    let (_, before) = get(&svc, "/api/events?since=0");
    assert!(before.as_array().unwrap().is_empty());
    let body = json!({ "parent": ZOOM_INT, "child": format!("{CLASS}.rd"), "linkType": "Related" });
    assert_eq!(post(&svc, "/api/links", body.clone()).0, 200);
    assert_eq!(post(&svc, "/api/links", body).0, 409);
    let (s, events) = get(&svc, "/api/events?since=0");
    assert_eq!(s, 200);
    assert_eq!(events, json!([{ "seqNo": 1, "kind": "LinkAdded", "subjectId": format!("Related:{ZOOM_INT}->{CLASS}.rd") }]));
    assert!(get(&svc, "/api/events?since=1").1.as_array().unwrap().is_empty());
    assert_eq!(get(&svc, "/api/events?since=x").0, 400);

    assert_eq!(post(&svc, "/api/links", json!({ "parent": "Nope", "child": CLASS, "linkType": "Related" })).0, 404);
    assert_eq!(post(&svc, "/api/links", json!({ "parent": ZOOM_INT, "child": CLASS, "linkType": "Bogus" })).0, 404);
    assert_eq!(post(&svc, "/api/links", json!({ "parent": ZOOM_INT })).0, 400);

    let on_disk = KnowledgeBase::from_xml(&std::fs::read_to_string(&path).unwrap()).unwrap();
    svc.with_kb(|kb| assert_eq!(&on_disk, kb));
    let (_, nodes) = get(&svc, &format!("/api/tree?path={}", enc(ZOOM_INT)));
    assert!(nodes.as_array().unwrap().iter().any(|n| n["label"] == "Related::rd"));
}

#[test]
fn reverse_route() {
    let (_d, _p, svc) = setup();
    let (s, ids) = get(&svc, &format!("/api/reverse?type=Method&targets={}", enc(&format!("{CLASS}.m_drag_curve"))));
    assert_eq!(s, 200);
    assert_eq!(ids, json!([ZOOM_INT]));
    let (s, ids) = get(&svc, &format!("/api/reverse?type=Method&targets={},{}", enc(ZOOM_INT), enc(&format!("{CLASS}.rd"))));
    assert_eq!(s, 200);
    assert_eq!(ids, json!([ZOOM_INT, ZOOM_OBJ]));
    assert_eq!(get(&svc, "/api/reverse?type=Bogus&targets=x").0, 404);
    assert_eq!(get(&svc, "/api/reverse?type=Method&targets=Nope").0, 404);
    assert_eq!(get(&svc, "/api/reverse?type=Method").0, 400);
}

#[test]
fn unknown_routes_and_methods() {
    let (_d, _p, svc) = setup();
    assert_eq!(get(&svc, "/api/nothing").0, 404);
    assert_eq!(get(&svc, "/elsewhere").0, 404);
    assert_eq!(svc.handle_request("DELETE", "/api/types", b"").status, 405);
    assert_eq!(svc.handle_request("GET", "/api/links", b"").status, 405);
}

fn http(addr: std::net::SocketAddr, request: &str) -> String {
    let mut s = std::net::TcpStream::connect(addr).unwrap();
    s.write_all(request.as_bytes()).unwrap();
    let mut out = String::new();
    s.read_to_string(&mut out).unwrap();
    out
}

#[test]
fn http_transport_and_static_files() {
    let (dir, _p, svc) = setup();
    let static_dir = dir.path().join("www");
    std::fs::create_dir(&static_dir).unwrap();
    std::fs::write(static_dir.join("index.html"), "<h1>trace</h1>").unwrap();

    let rt = tokio::runtime::Runtime::new().unwrap();
    let listener = rt.block_on(tokio::net::TcpListener::bind("127.0.0.1:0")).unwrap();
    let addr = listener.local_addr().unwrap();
    let app = tracer_cli::server::router(Arc::new(svc), Some(static_dir));
    rt.spawn(tracer_cli::server::serve(listener, app));

    let r = http(addr, "GET /api/types HTTP/1.1\r\nHost: x\r\nConnection: close\r\n\r\n");
    assert!(r.starts_with("HTTP/1.1 200"), "{r}");
    assert!(r.contains("application/json"));
    assert!(r.contains("\"displayOrder\""));
    let body = json!({ "checked": [ZOOM_INT], "maxDepth": 1 }).to_string();
    let r = http(
        addr,
        &format!("POST /api/selection HTTP/1.1\r\nHost: x\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}", body.len()),
    );
    assert!(r.starts_with("HTTP/1.1 200"), "{r}");
    let r = http(addr, &format!("GET /api/object/{} HTTP/1.1\r\nHost: x\r\nConnection: close\r\n\r\n", enc("extern:Renderer.Render/1")));
    assert!(r.starts_with("HTTP/1.1 200"), "{r}");
    let r = http(addr, "GET /api/object/nope HTTP/1.1\r\nHost: x\r\nConnection: close\r\n\r\n");
    assert!(r.starts_with("HTTP/1.1 404"), "{r}");
    let r = http(addr, "GET /index.html HTTP/1.1\r\nHost: x\r\nConnection: close\r\n\r\n");
    assert!(r.starts_with("HTTP/1.1 200") && r.contains("<h1>trace</h1>"), "{r}");
}
