//! XML intermediate representation of a parsed source file.
//!
//! The IR is lossy: it keeps declarations, doc comments and ordered body
//! events, and drops source positions. Output is canonical (two-space indent,
//! attributes in schema order, LF line endings, no trailing newline), so
//! `emit_ir(load_ir(x))` reproduces `x` byte for byte.
//!
//! | element       | attributes                                   |
//! |---------------|----------------------------------------------|
//! | `Project`     |                                              |
//! | `File`        | `path`                                       |
//! | `Using`       | `name`                                       |
//! | `Namespace`   | `name`                                       |
//! | `Class`       | `name`, `access`, optional `bases` (comma list) |
//! | `Field`       | `name`, `type`, `access`                     |
//! | `Method`      | `name`, `returns`, `access`                  |
//! | `Constructor` | `access`                                     |
//! | `Property`    | `name`, `type`, `access`                     |
//! | `Event`       | `name`, `type`, `access`                     |
//! | `Delegate`    | `name`, `returns`, `access`                  |
//! | `Param`       | `name`, `type`                               |
//! | `Doc`         | text content                                 |
//! | `Body`        | optional `role` (`get`/`set`, properties only) |
//! | `Call`        | `name`, `argc`, `seq`, optional `qualifier`  |
//! | `Use`         | `name`, `kind` (`read`/`write`), `seq`       |
//! | `New`         | `type`, `argc`, `seq`                        |
//! | `Local`       | `name`, `type`, `seq`                        |

use std::collections::HashMap;

use thiserror::Error;

use crate::syntax::*;
use crate::xml::{element_children, element_text, XmlWriter};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IrDocument {
    pub file_path: String,
    pub tree: SyntaxTree,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{path}: {message}")]
pub struct IrSchemaError {
    pub path: String,
    pub message: String,
}

pub fn emit_ir(tree: &SyntaxTree, file_path: &str) -> String {
    let mut w = XmlWriter::new();
    w.open("Project", &[]);
    if tree.usings.is_empty() && tree.members.is_empty() {
        w.empty("File", &[("path", file_path)]);
    } else {
        w.open("File", &[("path", file_path)]);
        for u in &tree.usings {
            w.empty("Using", &[("name", u)]);
        }
        for m in &tree.members {
            emit_ns_member(&mut w, m);
        }
        w.close("File");
    }
    w.close("Project");
    w.finish()
}

impl IrDocument {
    pub fn to_xml(&self) -> String {
        emit_ir(&self.tree, &self.file_path)
    }
}

fn emit_ns_member(w: &mut XmlWriter, m: &NamespaceMember) {
    match m {
        NamespaceMember::Namespace(ns) => {
            if ns.members.is_empty() {
                w.empty("Namespace", &[("name", &ns.name)]);
            } else {
                w.open("Namespace", &[("name", &ns.name)]);
                for inner in &ns.members {
                    emit_ns_member(w, inner);
                }
                w.close("Namespace");
            }
        }
        NamespaceMember::Type(TypeDecl::Class(c)) => emit_class(w, c),
        NamespaceMember::Type(TypeDecl::Delegate(d)) => emit_delegate(w, d),
    }
}

/// Emits `<name attrs>` with its children, or a self-closing tag when there
/// are none.
fn element(w: &mut XmlWriter, name: &str, attrs: &[(&str, &str)], has_children: bool, children: impl FnOnce(&mut XmlWriter)) {
    if has_children {
        w.open(name, attrs);
        children(w);
        w.close(name);
    } else {
        w.empty(name, attrs);
    }
}

fn emit_doc(w: &mut XmlWriter, doc: &Option<String>) {
    if let Some(d) = doc {
        w.text_element("Doc", &[], d);
    }
}

fn emit_class(w: &mut XmlWriter, c: &ClassDecl) {
    let bases = c.bases.join(",");
    let mut attrs = vec![("name", c.name.as_str()), ("access", c.access.as_str())];
    if !c.bases.is_empty() {
        attrs.push(("bases", &bases));
    }
    let has_children = c.doc.is_some() || !c.members.is_empty();
    element(w, "Class", &attrs, has_children, |w| {
        emit_doc(w, &c.doc);
        for m in &c.members {
            emit_member(w, m);
        }
    });
}

fn emit_member(w: &mut XmlWriter, m: &Member) {
    match m {
        Member::Field(f) => {
            let attrs = [("name", f.name.as_str()), ("type", &f.type_name), ("access", f.access.as_str())];
            element(w, "Field", &attrs, f.doc.is_some(), |w| emit_doc(w, &f.doc));
        }
        Member::Method(m) => {
            let attrs = [("name", m.name.as_str()), ("returns", &m.returns), ("access", m.access.as_str())];
            let has = m.doc.is_some() || !m.params.is_empty() || m.body.is_some();
            element(w, "Method", &attrs, has, |w| {
                emit_doc(w, &m.doc);
                emit_params(w, &m.params);
                if let Some(b) = &m.body {
                    emit_body(w, b, None);
                }
            });
        }
        Member::Constructor(k) => {
            let attrs = [("access", k.access.as_str())];
            let has = k.doc.is_some() || !k.params.is_empty() || k.body.is_some();
            element(w, "Constructor", &attrs, has, |w| {
                emit_doc(w, &k.doc);
                emit_params(w, &k.params);
                if let Some(b) = &k.body {
                    emit_body(w, b, None);
                }
            });
        }
        Member::Property(p) => {
            let attrs = [("name", p.name.as_str()), ("type", &p.type_name), ("access", p.access.as_str())];
            let has = p.doc.is_some() || p.getter.is_some() || p.setter.is_some();
            element(w, "Property", &attrs, has, |w| {
                emit_doc(w, &p.doc);
                if let Some(b) = &p.getter {
                    emit_body(w, b, Some("get"));
                }
                if let Some(b) = &p.setter {
                    emit_body(w, b, Some("set"));
                }
            });
        }
        Member::Event(e) => {
            let attrs = [("name", e.name.as_str()), ("type", &e.type_name), ("access", e.access.as_str())];
            element(w, "Event", &attrs, e.doc.is_some(), |w| emit_doc(w, &e.doc));
        }
        Member::Delegate(d) => emit_delegate(w, d),
        Member::Class(c) => emit_class(w, c),
    }
}

fn emit_delegate(w: &mut XmlWriter, d: &DelegateDecl) {
    let attrs = [("name", d.name.as_str()), ("returns", &d.returns), ("access", d.access.as_str())];
    let has = d.doc.is_some() || !d.params.is_empty();
    element(w, "Delegate", &attrs, has, |w| {
        emit_doc(w, &d.doc);
        emit_params(w, &d.params);
    });
}

fn emit_params(w: &mut XmlWriter, params: &[Param]) {
    for p in params {
        w.empty("Param", &[("name", &p.name), ("type", &p.type_name)]);
    }
}

fn emit_body(w: &mut XmlWriter, body: &Body, role: Option<&str>) {
    let attrs: Vec<(&str, &str)> = role.map(|r| ("role", r)).into_iter().collect();
    element(w, "Body", &attrs, !body.events.is_empty(), |w| {
        for ev in &body.events {
            let seq = ev.seq.to_string();
            match &ev.kind {
                EventKind::Call { qualifier, name, argc } => {
                    let argc = argc.to_string();
                    let mut attrs = vec![("name", name.as_str()), ("argc", &argc), ("seq", &seq)];
                    if let Some(q) = qualifier {
                        attrs.push(("qualifier", q));
                    }
                    w.empty("Call", &attrs);
                }
                EventKind::Use { name, kind } => {
                    w.empty("Use", &[("name", name), ("kind", kind.as_str()), ("seq", &seq)]);
                }
                EventKind::New { type_name, argc } => {
                    w.empty("New", &[("type", type_name), ("argc", &argc.to_string()), ("seq", &seq)]);
                }
                EventKind::Local { name, type_name } => {
                    w.empty("Local", &[("name", name), ("type", type_name), ("seq", &seq)]);
                }
            }
        }
    });
}

// ---------------------------------------------------------------------------
// Loading
// ---------------------------------------------------------------------------

type Node<'a, 'i> = roxmltree::Node<'a, 'i>;

struct Loader {
    path: Vec<String>,
}

impl Loader {
    fn err(&self, message: impl Into<String>) -> IrSchemaError {
        IrSchemaError {
            path: format!("/{}", self.path.join("/")),
            message: message.into(),
        }
    }

    fn enter(&mut self, node: Node<'_, '_>) {
        let tag = node.tag_name().name();
        let seg = match node.attribute("name").or_else(|| node.attribute("path")) {
            Some(n) => format!("{tag}[{n}]"),
            None => match node.attribute("seq") {
                Some(s) => format!("{tag}[seq={s}]"),
                None => tag.to_string(),
            },
        };
        self.path.push(seg);
    }

    fn leave(&mut self) {
        self.path.pop();
    }

    /// Validate the attribute set and return a lookup.
    fn attrs<'a>(&self, node: Node<'a, '_>, required: &[&str], optional: &[&str]) -> Result<HashMap<&'a str, &'a str>, IrSchemaError> {
        let mut map = HashMap::new();
        for a in node.attributes() {
            if a.namespace().is_some() || !(required.contains(&a.name()) || optional.contains(&a.name())) {
                return Err(self.err(format!("unknown attribute `{}`", a.name())));
            }
            map.insert(a.name(), a.value());
        }
        for r in required {
            if !map.contains_key(r) {
                return Err(self.err(format!("missing required attribute `{r}`")));
            }
        }
        Ok(map)
    }

    fn children<'a, 'i>(&self, node: Node<'a, 'i>) -> Result<Vec<Node<'a, 'i>>, IrSchemaError> {
        element_children(node).map_err(|m| self.err(m))
    }

    fn access(&self, value: &str) -> Result<Accessibility, IrSchemaError> {
        match value.parse() {
            Ok(Accessibility::Unknown) | Err(_) => Err(self.err(format!("invalid access `{value}`"))),
            Ok(a) => Ok(a),
        }
    }

    fn number(&self, attr: &str, value: &str) -> Result<u32, IrSchemaError> {
        value
            .parse()
            .map_err(|_| self.err(format!("attribute `{attr}` is not a non-negative integer: `{value}`")))
    }

    fn no_children(&self, node: Node<'_, '_>) -> Result<(), IrSchemaError> {
        if self.children(node)?.is_empty() && element_text(node).trim().is_empty() {
            Ok(())
        } else {
            Err(self.err("element must be empty"))
        }
    }

    fn project(&mut self, root: Node<'_, '_>) -> Result<IrDocument, IrSchemaError> {
        if root.tag_name().name() != "Project" || root.tag_name().namespace().is_some() {
            return Err(IrSchemaError {
                path: "/".into(),
                message: format!("root element must be `Project`, found `{}`", root.tag_name().name()),
            });
        }
        self.enter(root);
        self.attrs(root, &[], &[])?;
        let kids = self.children(root)?;
        let [file] = kids.as_slice() else {
            return Err(self.err(format!("expected exactly one `File`, found {} elements", kids.len())));
        };
        if file.tag_name().name() != "File" {
            return Err(self.err(format!("unknown element `{}`", file.tag_name().name())));
        }
        self.enter(*file);
        let a = self.attrs(*file, &["path"], &[])?;
        let mut tree = SyntaxTree::default();
        let mut seen_member = false;
        for child in self.children(*file)? {
            self.enter(child);
            match child.tag_name().name() {
                "Using" => {
                    if seen_member {
                        return Err(self.err("`Using` must precede declarations"));
                    }
                    let u = self.attrs(child, &["name"], &[])?;
                    self.no_children(child)?;
                    tree.usings.push(u["name"].to_string());
                }
                _ => {
                    seen_member = true;
                    tree.members.push(self.ns_member(child)?);
                }
            }
            self.leave();
        }
        Ok(IrDocument {
            file_path: a["path"].to_string(),
            tree,
        })
    }

    fn ns_member(&mut self, node: Node<'_, '_>) -> Result<NamespaceMember, IrSchemaError> {
        match node.tag_name().name() {
            "Namespace" => {
                let a = self.attrs(node, &["name"], &[])?;
                let mut members = Vec::new();
                for child in self.children(node)? {
                    self.enter(child);
                    members.push(self.ns_member(child)?);
                    self.leave();
                }
                Ok(NamespaceMember::Namespace(NamespaceDecl {
                    name: a["name"].to_string(),
                    members,
                }))
            }
            "Class" => Ok(NamespaceMember::Type(TypeDecl::Class(self.class(node)?))),
            "Delegate" => Ok(NamespaceMember::Type(TypeDecl::Delegate(self.delegate(node)?))),
            other => Err(self.err(format!("unknown element `{other}`"))),
        }
    }

    /// Splits off a leading `Doc` child.
    fn doc_and_rest<'a, 'i>(&mut self, node: Node<'a, 'i>) -> Result<(Option<String>, Vec<Node<'a, 'i>>), IrSchemaError> {
        let kids = self.children(node)?;
        let mut doc = None;
        let mut rest = Vec::new();
        for (i, k) in kids.into_iter().enumerate() {
            if k.tag_name().name() == "Doc" {
                self.enter(k);
                if i != 0 {
                    return Err(self.err("`Doc` must be the first child"));
                }
                self.attrs(k, &[], &[])?;
                if k.children().any(|c| c.is_element()) {
                    return Err(self.err("`Doc` holds text only"));
                }
                doc = Some(element_text(k));
                self.leave();
            } else {
                rest.push(k);
            }
        }
        Ok((doc, rest))
    }

    fn class(&mut self, node: Node<'_, '_>) -> Result<ClassDecl, IrSchemaError> {
        let a = self.attrs(node, &["name", "access"], &["bases"])?;
        let access = self.access(a["access"])?;
        let bases = match a.get("bases") {
            Some(b) if !b.is_empty() => b.split(',').map(str::to_string).collect(),
            Some(_) => return Err(self.err("`bases` must not be empty")),
            None => Vec::new(),
        };
        let (doc, rest) = self.doc_and_rest(node)?;
        let mut members = Vec::new();
        for child in rest {
            self.enter(child);
            members.push(self.member(child)?);
            self.leave();
        }
        Ok(ClassDecl {
            name: a["name"].to_string(),
            access,
            doc,
            bases,
            members,
        })
    }

    fn member(&mut self, node: Node<'_, '_>) -> Result<Member, IrSchemaError> {
        let tag = node.tag_name().name();
        match tag {
            "Field" | "Event" => {
                let a = self.attrs(node, &["name", "type", "access"], &[])?;
                let access = self.access(a["access"])?;
                let (doc, rest) = self.doc_and_rest(node)?;
                if let Some(extra) = rest.first() {
                    return Err(self.err(format!("unknown element `{}`", extra.tag_name().name())));
                }
                let (name, type_name) = (a["name"].to_string(), a["type"].to_string());
                Ok(if tag == "Field" {
                    Member::Field(FieldDecl { name, type_name, access, doc })
                } else {
                    Member::Event(EventDecl { name, type_name, access, doc })
                })
            }
            "Method" => {
                let a = self.attrs(node, &["name", "returns", "access"], &[])?;
                let access = self.access(a["access"])?;
                let (doc, rest) = self.doc_and_rest(node)?;
                let (params, body) = self.params_and_body(rest, true)?;
                Ok(Member::Method(MethodDecl {
                    name: a["name"].to_string(),
                    returns: a["returns"].to_string(),
                    access,
                    doc,
                    params,
                    body,
                }))
            }
            "Constructor" => {
                let a = self.attrs(node, &["access"], &[])?;
                let access = self.access(a["access"])?;
                let (doc, rest) = self.doc_and_rest(node)?;
                let (params, body) = self.params_and_body(rest, true)?;
                Ok(Member::Constructor(ConstructorDecl { access, doc, params, body }))
            }
            "Property" => {
                let a = self.attrs(node, &["name", "type", "access"], &[])?;
                let access = self.access(a["access"])?;
                let (doc, rest) = self.doc_and_rest(node)?;
                let mut getter = None;
                let mut setter = None;
                for child in rest {
                    self.enter(child);
                    if child.tag_name().name() != "Body" {
                        return Err(self.err(format!("unknown element `{}`", child.tag_name().name())));
                    }
                    let role = self.attrs(child, &["role"], &[])?["role"];
                    let slot = match role {
                        "get" if setter.is_none() => &mut getter,
                        "set" => &mut setter,
                        "get" => return Err(self.err("`get` body must precede `set` body")),
                        other => return Err(self.err(format!("invalid body role `{other}`"))),
                    };
                    if slot.is_some() {
                        return Err(self.err(format!("duplicate `{role}` body")));
                    }
                    *slot = Some(self.body(child)?);
                    self.leave();
                }
                Ok(Member::Property(PropertyDecl {
                    name: a["name"].to_string(),
                    type_name: a["type"].to_string(),
                    access,
                    doc,
                    getter,
                    setter,
                }))
            }
            "Delegate" => Ok(Member::Delegate(self.delegate(node)?)),
            "Class" => Ok(Member::Class(self.class(node)?)),
            other => Err(self.err(format!("unknown element `{other}`"))),
        }
    }

    fn delegate(&mut self, node: Node<'_, '_>) -> Result<DelegateDecl, IrSchemaError> {
        let a = self.attrs(node, &["name", "returns", "access"], &[])?;
        let access = self.access(a["access"])?;
        let (doc, rest) = self.doc_and_rest(node)?;
        let (params, _) = self.params_and_body(rest, false)?;
        Ok(DelegateDecl {
            name: a["name"].to_string(),
            returns: a["returns"].to_string(),
            access,
            doc,
            params,
        })
    }

    fn params_and_body(&mut self, nodes: Vec<Node<'_, '_>>, allow_body: bool) -> Result<(Vec<Param>, Option<Body>), IrSchemaError> {
        let mut params = Vec::new();
        let mut body = None;
        for child in nodes {
            self.enter(child);
            match child.tag_name().name() {
                "Param" if body.is_none() => {
                    let a = self.attrs(child, &["name", "type"], &[])?;
                    self.no_children(child)?;
                    params.push(Param {
                        name: a["name"].to_string(),
                        type_name: a["type"].to_string(),
                    });
                }
                "Param" => return Err(self.err("`Param` must precede `Body`")),
                "Body" if allow_body && body.is_none() => {
                    self.attrs(child, &[], &[])?;
                    body = Some(self.body(child)?);
                }
                "Body" if allow_body => return Err(self.err("duplicate `Body`")),
                other => return Err(self.err(format!("unknown element `{other}`"))),
            }
            self.leave();
        }
        Ok((params, body))
    }

    fn body(&mut self, node: Node<'_, '_>) -> Result<Body, IrSchemaError> {
        let mut events = Vec::new();
        for (i, child) in self.children(node)?.into_iter().enumerate() {
            self.enter(child);
            let (kind, seq) = match child.tag_name().name() {
                "Call" => {
                    let a = self.attrs(child, &["name", "argc", "seq"], &["qualifier"])?;
                    let kind = EventKind::Call {
                        qualifier: a.get("qualifier").map(|q| q.to_string()),
                        name: a["name"].to_string(),
                        argc: self.number("argc", a["argc"])?,
                    };
                    (kind, a["seq"])
                }
                "Use" => {
                    let a = self.attrs(child, &["name", "kind", "seq"], &[])?;
                    let kind = match a["kind"] {
                        "read" => UseKind::Read,
                        "write" => UseKind::Write,
                        other => return Err(self.err(format!("invalid use kind `{other}`"))),
                    };
                    if a["name"].is_empty() {
                        return Err(self.err("`Use` name must not be empty"));
                    }
                    (EventKind::Use { name: a["name"].to_string(), kind }, a["seq"])
                }
                "New" => {
                    let a = self.attrs(child, &["type", "argc", "seq"], &[])?;
                    let kind = EventKind::New {
                        type_name: a["type"].to_string(),
                        argc: self.number("argc", a["argc"])?,
                    };
                    (kind, a["seq"])
                }
                "Local" => {
                    let a = self.attrs(child, &["name", "type", "seq"], &[])?;
                    (EventKind::local(a["name"], a["type"]), a["seq"])
                }
                other => return Err(self.err(format!("unknown element `{other}`"))),
            };
            self.no_children(child)?;
            let seq = self.number("seq", seq)?;
            if seq != i as u32 + 1 {
                return Err(self.err(format!("non-monotonic seq: expected {}, found {seq}", i + 1)));
            }
            events.push(BodyEvent { seq, kind });
            self.leave();
        }
        Ok(Body { events })
    }
}

/// Parse IR XML into a document.
pub fn load_ir(xml: &str) -> Result<IrDocument, IrSchemaError> {
    let doc = roxmltree::Document::parse(xml).map_err(|e| IrSchemaError {
        path: "/".into(),
        message: format!("malformed XML: {e}"),
    })?;
    Loader { path: Vec::new() }.project(doc.root_element())
}
