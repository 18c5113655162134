//! JSON request handling over a shared knowledge base.
//!
//! [`Service::handle_request`] is transport independent: the HTTP server and
//! the tests both call it with a method, a path with optional query string,
//! and a body. Mutations are applied one at a time under a write lock and
//! written through to the KB file before the response is returned.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::sync::RwLock;

use percent_encoding::percent_decode_str;
use serde_json::{json, Map, Value};
use tracer_core::kb::{Annotation, KbError, KnowledgeBase, KnowledgeObject, NoteLevel};
use tracer_core::query::{self, QueryError, Selection};

#[derive(Debug, Clone, PartialEq)]
pub struct Response {
    pub status: u16,
    pub body: Value,
}

impl Response {
    fn ok(body: Value) -> Self {
        Response { status: 200, body }
    }

    fn error(status: u16, message: impl Into<String>) -> Self {
        Response {
            status,
            body: json!({ "error": message.into() }),
        }
    }
}

fn kb_status(e: &KbError) -> u16 {
    match e {
        KbError::DuplicateId(_) | KbError::DuplicateType(_) | KbError::DuplicateLink(_) | KbError::Containment(_) => 409,
        KbError::UnknownType(_)
        | KbError::UnknownLinkType(_)
        | KbError::UnknownEndpoint(_)
        | KbError::UnknownObject(_)
        | KbError::UnknownLink(_) => 404,
        KbError::EmptyText => 400,
    }
}

fn query_status(e: &QueryError) -> u16 {
    match e {
        QueryError::UnknownObject(_) | QueryError::UnknownType(_) | QueryError::UnknownLinkType(_) => 404,
        QueryError::NotExpandable(_) => 400,
    }
}

/// Split a comma separated id list. Commas inside parentheses belong to
/// method signatures and do not split.
pub fn split_id_list(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for c in s.chars() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth <= 0 => {
                out.push(std::mem::take(&mut cur));
                continue;
            }
            _ => {}
        }
        cur.push(c);
    }
    out.push(cur);
    out.into_iter().map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
}

fn decode(s: &str) -> String {
    percent_decode_str(s).decode_utf8_lossy().into_owned()
}

/// Raw (still encoded) query parameters.
fn query_params(query: &str) -> Vec<(String, &str)> {
    query
        .split('&')
        .filter(|p| !p.is_empty())
        .map(|p| match p.split_once('=') {
            Some((k, v)) => (decode(k), v),
            None => (decode(p), ""),
        })
        .collect()
}

fn param<'q>(params: &[(String, &'q str)], key: &str) -> Option<&'q str> {
    params.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
}

pub struct ServiceState {
    pub kb: KnowledgeBase,
    pub kb_path: Option<PathBuf>,
}

pub struct Service {
    state: RwLock<ServiceState>,
}

impl Service {
    pub fn new(kb: KnowledgeBase, kb_path: Option<PathBuf>) -> Self {
        Service {
            state: RwLock::new(ServiceState { kb, kb_path }),
        }
    }

    /// Load the KB at `path`; later mutations are written back to it.
    pub fn open(path: &Path) -> Result<Self, String> {
        let xml = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let kb = KnowledgeBase::from_xml(&xml).map_err(|e| format!("{}: {e}", path.display()))?;
        Ok(Service::new(kb, Some(path.to_path_buf())))
    }

    /// Run `f` against the current KB.
    pub fn with_kb<T>(&self, f: impl FnOnce(&KnowledgeBase) -> T) -> T {
        f(&self.state.read().expect("service lock").kb)
    }

    pub fn handle_request(&self, method: &str, target: &str, body: &[u8]) -> Response {
        let (path, query) = target.split_once('?').unwrap_or((target, ""));
        let Some(route) = path.strip_prefix("/api") else {
            return Response::error(404, format!("no route {path}"));
        };
        let params = query_params(query);
        match (method, route) {
            ("GET", "/types") => self.read(|kb| Response::ok(types_json(kb))),
            ("GET", "/linktypes") => self.read(|kb| {
                Response::ok(kb.link_types().iter().map(|t| json!({ "id": t.id })).collect())
            }),
            ("GET", "/objects") => self.read(|kb| objects(kb, param(&params, "type").map(decode))),
            ("POST", "/selection") => match parse_body(body) {
                Ok(v) => self.read(|kb| selection(kb, &v)),
                Err(r) => r,
            },
            ("GET", "/tree") => self.read(|kb| tree(kb, param(&params, "path"))),
            ("GET", "/reverse") => self.read(|kb| reverse(kb, &params)),
            ("GET", "/events") => {
                let since = match param(&params, "since").map(decode) {
                    None => 0,
                    Some(s) => match s.parse::<u64>() {
                        Ok(n) => n,
                        Err(_) => return Response::error(400, format!("bad since value {s:?}")),
                    },
                };
                self.read(|kb| {
                    Response::ok(
                        kb.events_since(since)
                            .iter()
                            .map(|e| json!({ "seqNo": e.seq_no, "kind": format!("{:?}", e.kind), "subjectId": e.subject_id }))
                            .collect(),
                    )
                })
            }
            ("POST", "/links") => match parse_body(body) {
                Ok(v) => self.mutate(|kb| add_link(kb, &v)),
                Err(r) => r,
            },
            (_, r) if r.starts_with("/object/") => self.object_route(method, &r["/object/".len()..], body),
            (_, "/types" | "/linktypes" | "/objects" | "/selection" | "/tree" | "/reverse" | "/events" | "/links") => {
                Response::error(405, format!("{method} not allowed on {path}"))
            }
            _ => Response::error(404, format!("no route {path}")),
        }
    }

    fn object_route(&self, method: &str, rest: &str, body: &[u8]) -> Response {
        if method == "GET" {
            let id = decode(rest);
            return self.read(|kb| match detail(kb, &id) {
                Some(d) => Response::ok(d),
                None => Response::error(404, format!("unknown object {id:?}")),
            });
        }
        if method != "POST" {
            return Response::error(405, format!("{method} not allowed"));
        }
        let Some((raw_id, action)) = rest.rsplit_once('/') else {
            return Response::error(404, "missing annotation kind");
        };
        let id = decode(raw_id);
        let v = match parse_body(body) {
            Ok(v) => v,
            Err(r) => return r,
        };
        let change = match action {
            "description" => str_field(&v, "text").map(Annotation::SetDescription),
            "version" => str_field(&v, "version").map(Annotation::SetVersion),
            "notes" => {
                let level = str_field(&v, "level").and_then(|l| l.parse::<NoteLevel>().map_err(|_| bad(format!("bad note level {l:?}"))));
                level.and_then(|level| str_field(&v, "text").map(|text| Annotation::AddNote { level, text }))
            }
            "docs" => str_field(&v, "href").and_then(|href| match v.get("anchor") {
                None | Some(Value::Null) => Ok(Annotation::AddDocLink { href, anchor: None }),
                Some(Value::String(a)) => Ok(Annotation::AddDocLink { href, anchor: Some(a.clone()) }),
                Some(_) => Err(bad("anchor must be a string")),
            }),
            other => return Response::error(404, format!("no annotation kind {other:?}")),
        };
        let change = match change {
            Ok(c) => c,
            Err(r) => return r,
        };
        self.mutate(|kb| match kb.annotate(&id, change) {
            Ok(_) => Ok(detail(kb, &id).expect("annotated object exists")),
            Err(e) => Err(Response::error(kb_status(&e), e.to_string())),
        })
    }

    fn read(&self, f: impl FnOnce(&KnowledgeBase) -> Response) -> Response {
        f(&self.state.read().expect("service lock").kb)
    }

    /// Apply a mutation and persist. A failed mutation leaves the KB as it
    /// was; a failed write reports 500 but keeps the in-memory change.
    fn mutate(&self, f: impl FnOnce(&mut KnowledgeBase) -> Result<Value, Response>) -> Response {
        let mut state = self.state.write().expect("service lock");
        let body = match f(&mut state.kb) {
            Ok(b) => b,
            Err(r) => return r,
        };
        if let Some(path) = &state.kb_path {
            if let Err(e) = write_atomically(path, &state.kb.to_xml()) {
                return Response::error(500, format!("could not save {}: {e}", path.display()));
            }
        }
        Response::ok(body)
    }
}

fn write_atomically(path: &Path, text: &str) -> std::io::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, text)?;
    std::fs::rename(&tmp, path)
}

fn bad(msg: impl Into<String>) -> Response {
    Response::error(400, msg)
}

fn parse_body(body: &[u8]) -> Result<Value, Response> {
    match serde_json::from_slice::<Value>(body) {
        Ok(v @ Value::Object(_)) => Ok(v),
        Ok(_) => Err(bad("body must be a JSON object")),
        Err(e) => Err(bad(format!("malformed JSON: {e}"))),
    }
}

fn str_field(v: &Value, key: &str) -> Result<String, Response> {
    match v.get(key) {
        Some(Value::String(s)) => Ok(s.clone()),
        _ => Err(bad(format!("missing string field {key:?}"))),
    }
}

fn string_list(v: &Value, key: &str) -> Result<Option<BTreeSet<String>>, Response> {
    match v.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(Value::Array(items)) => items
            .iter()
            .map(|i| i.as_str().map(str::to_string).ok_or_else(|| bad(format!("{key} must hold strings"))))
            .collect::<Result<_, _>>()
            .map(Some),
        Some(_) => Err(bad(format!("{key} must be an array"))),
    }
}

pub fn types_json(kb: &KnowledgeBase) -> Value {
    kb.types()
        .iter()
        .map(|t| json!({ "id": t.id, "displayOrder": t.display_order }))
        .collect()
}

fn summary(o: &KnowledgeObject) -> Value {
    json!({ "id": o.id, "name": o.name, "access": o.access.as_str(), "external": o.external })
}

fn objects(kb: &KnowledgeBase, type_id: Option<String>) -> Response {
    match type_id {
        None => Response::ok(kb.objects().map(summary).collect()),
        Some(t) if !kb.has_type(&t) => Response::error(404, format!("unknown knowledge type {t:?}")),
        Some(t) => Response::ok(kb.objects_of_type(&t).map(summary).collect()),
    }
}

pub fn visible_json(v: &query::VisibleSet) -> Value {
    let map: Map<String, Value> = v
        .iter()
        .map(|(t, ids)| (t.clone(), ids.iter().cloned().map(Value::String).collect()))
        .collect();
    Value::Object(map)
}

fn selection(kb: &KnowledgeBase, v: &Value) -> Response {
    let checked = match string_list(v, "checked") {
        Ok(c) => c.unwrap_or_default(),
        Err(r) => return r,
    };
    let link_types = match string_list(v, "linkTypes") {
        Ok(l) => l,
        Err(r) => return r,
    };
    let max_depth = match v.get("maxDepth") {
        None | Some(Value::Null) => None,
        Some(d) => match d.as_u64().and_then(|d| u32::try_from(d).ok()) {
            Some(d) => Some(d),
            None => return bad("maxDepth must be a non-negative integer"),
        },
    };
    let sel = Selection {
        checked_ids: checked,
        enabled_link_types: link_types,
        max_depth,
    };
    match query::visible_set(kb, &sel) {
        Ok(vis) => Response::ok(json!({ "visible": visible_json(&vis) })),
        Err(e) => Response::error(query_status(&e), e.to_string()),
    }
}

/// Path segments are separated by raw `/`; a `/` inside an id must be sent
/// as `%2F`.
fn tree(kb: &KnowledgeBase, raw_path: Option<&str>) -> Response {
    let Some(raw) = raw_path.filter(|p| !p.is_empty()) else {
        return bad("missing path");
    };
    let path: Vec<String> = raw.split('/').map(decode).collect();
    match query::expand(kb, &path) {
        Ok(nodes) => Response::ok(serde_json::to_value(nodes).expect("nodes serialize")),
        Err(e) => Response::error(query_status(&e), e.to_string()),
    }
}

fn reverse(kb: &KnowledgeBase, params: &[(String, &str)]) -> Response {
    let Some(t) = param(params, "type").map(decode) else {
        return bad("missing type");
    };
    let Some(targets) = param(params, "targets").map(decode) else {
        return bad("missing targets");
    };
    let targets: BTreeSet<String> = split_id_list(&targets).into_iter().collect();
    let link_types = param(params, "linkTypes").map(|l| split_id_list(&decode(l)).into_iter().collect::<BTreeSet<_>>());
    match query::reverse_related(kb, &targets, &t, link_types.as_ref()) {
        Ok(ids) => Response::ok(ids.into_iter().map(Value::String).collect()),
        Err(e) => Response::error(query_status(&e), e.to_string()),
    }
}

pub fn detail(kb: &KnowledgeBase, id: &str) -> Option<Value> {
    let o = kb.object(id)?;
    let attrs = query::object_attributes(kb, id).expect("object exists");
    Some(json!({
        "id": o.id,
        "typeId": o.type_id,
        "name": o.name,
        "access": o.access.as_str(),
        "external": o.external,
        "container": kb.container_of(id),
        "description": o.description,
        "version": o.version,
        "notes": o.notes.iter().map(|n| json!({ "level": n.level.as_str(), "text": n.text })).collect::<Vec<_>>(),
        "docLinks": o.doc_links.iter().map(|d| json!({ "href": d.href, "anchor": d.anchor })).collect::<Vec<_>>(),
        "attributes": serde_json::to_value(attrs).expect("attributes serialize"),
    }))
}

fn add_link(kb: &mut KnowledgeBase, v: &Value) -> Result<Value, Response> {
    let parent = str_field(v, "parent")?;
    let child = str_field(v, "child")?;
    let link_type = str_field(v, "linkType")?;
    let seq = match v.get("seq") {
        None | Some(Value::Null) => None,
        Some(s) => Some(
            s.as_u64()
                .and_then(|s| u32::try_from(s).ok())
                .ok_or_else(|| bad("seq must be a non-negative integer"))?,
        ),
    };
    match kb.add_link(&link_type, &parent, &child, seq) {
        Ok(l) => Ok(json!({ "linkType": l.link_type, "parent": l.parent, "child": l.child, "seq": l.seq })),
        Err(e) => Err(Response::error(kb_status(&e), e.to_string())),
    }
}
