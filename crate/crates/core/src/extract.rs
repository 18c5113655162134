//! Populate a [`KnowledgeBase`] from IR documents.
//!
//! Object ids follow the declaration hierarchy: dot-joined namespace, class
//! and member names; methods, constructors and delegates append their
//! parameter types in parentheses; parameters and locals append `#name` to
//! their method's id. Code that is referenced but not loaded becomes an
//! external stub:
//!
//! | referenced thing            | stub id                          |
//! |-----------------------------|----------------------------------|
//! | unknown variable `x`        | `extern:?.x`                     |
//! | method on unloaded type `T` | `extern:T.name/argc`             |
//! | method on unknown receiver  | `extern:?.name/argc`             |
//! | unloaded class `T`          | `extern:T`                       |
//!
//! Files are processed in path order. All declarations are registered before
//! any body is resolved, so calls across files resolve regardless of order.

use std::collections::{BTreeMap, HashMap};

use crate::ir::IrDocument;
use crate::kb::{links, types, Accessibility, Annotation, KnowledgeBase};
use crate::syntax::*;

const EXTERN: &str = "extern:";

/// Names visible inside one body.
#[derive(Debug, Clone, Default)]
pub struct ResolutionContext {
    pub current_method_id: String,
    pub current_class_id: Option<String>,
    pub locals: BTreeMap<String, String>,
    pub params: BTreeMap<String, String>,
    /// Fields, properties and events of the enclosing class.
    pub fields: BTreeMap<String, String>,
    /// `(name, argc)` → method ids within the enclosing class, in
    /// declaration order.
    pub class_methods: BTreeMap<(String, u32), Vec<String>>,
    /// Simple class name → class id, over every loaded class.
    pub loaded_classes: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableRef {
    pub id: String,
    /// True when the name did not resolve and `id` is a stub.
    pub external: bool,
}

/// Resolve a variable name: locals, then parameters, then fields. A
/// `this.` prefix looks at fields only. Unknown names map to the stub
/// `extern:?.<name>`.
pub fn resolve_use(ctx: &ResolutionContext, name: &str) -> VariableRef {
    let (name, found) = match name.strip_prefix("this.") {
        Some(member) => (member, ctx.fields.get(member)),
        None => (
            name,
            ctx.locals
                .get(name)
                .or_else(|| ctx.params.get(name))
                .or_else(|| ctx.fields.get(name)),
        ),
    };
    match found {
        Some(id) => VariableRef {
            id: id.clone(),
            external: false,
        },
        None => VariableRef {
            id: stub_variable_id(name),
            external: true,
        },
    }
}

pub fn stub_variable_id(name: &str) -> String {
    format!("{EXTERN}?.{name}")
}

pub fn stub_method_id(owner: &str, name: &str, argc: u32) -> String {
    format!("{EXTERN}{owner}.{name}/{argc}")
}

pub fn stub_class_id(type_name: &str) -> String {
    format!("{EXTERN}{type_name}")
}

fn signature(params: &[Param]) -> String {
    params.iter().map(|p| p.type_name.as_str()).collect::<Vec<_>>().join(",")
}

fn join(prefix: &str, name: &str) -> String {
    if prefix.is_empty() {
        name.to_string()
    } else {
        format!("{prefix}.{name}")
    }
}

/// Arguments carry no types, so overloads with equal arity are ambiguous.
/// Prefer one that is not the caller (a method calling its own name with the
/// same arity is taken as delegating to a sibling overload), then the first
/// declared.
fn pick_overload(candidates: Option<&Vec<String>>, caller: &str) -> Option<String> {
    let c = candidates?;
    c.iter().find(|id| *id != caller).or_else(|| c.first()).cloned()
}

#[derive(Debug, Default)]
struct ClassInfo {
    namespace: String,
    members: BTreeMap<String, String>,
    methods: BTreeMap<(String, u32), Vec<String>>,
    constructors: BTreeMap<u32, Vec<String>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TypeKind {
    Class,
    Delegate,
}

struct PendingBody<'a> {
    owner: String,
    class_id: String,
    params: Vec<(String, String)>,
    body: &'a Body,
    seq_offset: u32,
    /// Property type when this is a setter (enables the implicit `value`).
    setter_of: Option<String>,
}

#[derive(Default)]
struct Extractor<'a> {
    kb: KnowledgeBase,
    classes: BTreeMap<String, ClassInfo>,
    /// Simple type name → (namespace, id, kind), in registration order.
    type_index: BTreeMap<String, Vec<(String, String, TypeKind)>>,
    var_types: HashMap<String, String>,
    next_child: HashMap<String, u32>,
    bodies: Vec<PendingBody<'a>>,
    /// (variable or event id, declared type, namespace of declaration)
    typed: Vec<(String, String, String)>,
}

/// Build a knowledge base from IR documents. Never fails: unresolved names
/// become external stubs.
pub fn extract(irs: &[IrDocument]) -> KnowledgeBase {
    let mut ordered: Vec<&IrDocument> = irs.iter().collect();
    ordered.sort_by(|a, b| a.file_path.cmp(&b.file_path));

    let mut ex = Extractor {
        kb: KnowledgeBase::new(),
        ..Default::default()
    };
    for doc in &ordered {
        for m in &doc.tree.members {
            ex.namespace_member(m, "");
        }
    }
    let typed = std::mem::take(&mut ex.typed);
    for (var, type_name, ns) in &typed {
        ex.link_type_of(var, type_name, ns);
    }
    let bodies = std::mem::take(&mut ex.bodies);
    for b in &bodies {
        ex.resolve_body(b);
    }
    ex.kb
}

impl<'a> Extractor<'a> {
    fn child_seq(&mut self, parent: &str) -> u32 {
        let n = self.next_child.entry(parent.to_string()).or_insert(0);
        *n += 1;
        *n
    }

    fn contain(&mut self, parent: &str, child: &str) {
        let seq = self.child_seq(parent);
        self.kb
            .add_link(links::CONTAINS, parent, child, Some(seq))
            .expect("containment of a fresh object");
    }

    /// Adds the object unless the id is taken. Returns false on a clash.
    fn add(&mut self, type_id: &str, id: &str, name: &str, access: Accessibility, doc: &Option<String>) -> bool {
        if self.kb.add_object(type_id, id, name, access, false).is_err() {
            return false;
        }
        if let Some(d) = doc.as_ref().filter(|d| !d.trim().is_empty()) {
            self.kb
                .annotate(id, Annotation::SetDescription(d.clone()))
                .expect("object exists");
        }
        true
    }

    fn namespace_member(&mut self, m: &'a NamespaceMember, ns: &str) {
        match m {
            NamespaceMember::Namespace(decl) => {
                let id = join(ns, &decl.name);
                let exists = self.kb.object(&id).is_some_and(|o| o.type_id == types::NAMESPACE);
                if !exists && self.add(types::NAMESPACE, &id, &decl.name, Accessibility::None, &None) && !ns.is_empty() {
                    self.contain(ns, &id);
                }
                for inner in &decl.members {
                    self.namespace_member(inner, &id);
                }
            }
            NamespaceMember::Type(TypeDecl::Class(c)) => self.class(c, ns, ns),
            NamespaceMember::Type(TypeDecl::Delegate(d)) => self.delegate(d, ns, ns),
        }
    }

    fn index_type(&mut self, name: &str, ns: &str, id: &str, kind: TypeKind) {
        self.type_index
            .entry(name.to_string())
            .or_default()
            .push((ns.to_string(), id.to_string(), kind));
    }

    fn class(&mut self, c: &'a ClassDecl, parent: &str, ns: &str) {
        let id = join(parent, &c.name);
        let merged = self.kb.object(&id).is_some_and(|o| o.type_id == types::CLASS && !o.external)
            && self.classes.contains_key(&id);
        if !merged {
            if !self.add(types::CLASS, &id, &c.name, c.access, &c.doc) {
                return;
            }
            if !parent.is_empty() {
                self.contain(parent, &id);
            }
            self.classes.insert(
                id.clone(),
                ClassInfo {
                    namespace: ns.to_string(),
                    ..Default::default()
                },
            );
            self.index_type(&c.name, ns, &id, TypeKind::Class);
        }

        for member in &c.members {
            match member {
                Member::Field(f) => {
                    let fid = join(&id, &f.name);
                    if self.add(types::VARIABLE, &fid, &f.name, f.access, &f.doc) {
                        self.contain(&id, &fid);
                        self.register_member(&id, &f.name, &fid, &f.type_name, ns);
                    }
                }
                Member::Event(e) => {
                    let eid = join(&id, &e.name);
                    if self.add(types::EVENT, &eid, &e.name, e.access, &e.doc) {
                        self.contain(&id, &eid);
                        self.register_member(&id, &e.name, &eid, &e.type_name, ns);
                    }
                }
                Member::Property(p) => {
                    let pid = join(&id, &p.name);
                    if !self.add(types::PROPERTY, &pid, &p.name, p.access, &p.doc) {
                        continue;
                    }
                    self.contain(&id, &pid);
                    self.var_types.insert(pid.clone(), p.type_name.clone());
                    self.classes.get_mut(&id).expect("class info").members.insert(p.name.clone(), pid.clone());
                    let get_len = p.getter.as_ref().map_or(0, |b| b.events.len() as u32);
                    if let Some(b) = &p.getter {
                        self.bodies.push(PendingBody {
                            owner: pid.clone(),
                            class_id: id.clone(),
                            params: Vec::new(),
                            body: b,
                            seq_offset: 0,
                            setter_of: None,
                        });
                    }
                    if let Some(b) = &p.setter {
                        self.bodies.push(PendingBody {
                            owner: pid.clone(),
                            class_id: id.clone(),
                            params: Vec::new(),
                            body: b,
                            seq_offset: get_len,
                            setter_of: Some(p.type_name.clone()),
                        });
                    }
                }
                Member::Method(m) => {
                    let mid = format!("{}.{}({})", id, m.name, signature(&m.params));
                    if !self.add(types::METHOD, &mid, &m.name, m.access, &m.doc) {
                        continue;
                    }
                    self.contain(&id, &mid);
                    let params = self.params(&mid, &m.params, ns);
                    self.classes
                        .get_mut(&id)
                        .expect("class info")
                        .methods
                        .entry((m.name.clone(), m.params.len() as u32))
                        .or_default()
                        .push(mid.clone());
                    if let Some(b) = &m.body {
                        self.bodies.push(PendingBody {
                            owner: mid,
                            class_id: id.clone(),
                            params,
                            body: b,
                            seq_offset: 0,
                            setter_of: None,
                        });
                    }
                }
                Member::Constructor(k) => {
                    let kid = format!("{}.{}({})", id, c.name, signature(&k.params));
                    if !self.add(types::CONSTRUCTOR, &kid, &c.name, k.access, &k.doc) {
                        continue;
                    }
                    self.contain(&id, &kid);
                    let params = self.params(&kid, &k.params, ns);
                    self.classes
                        .get_mut(&id)
                        .expect("class info")
                        .constructors
                        .entry(k.params.len() as u32)
                        .or_default()
                        .push(kid.clone());
                    if let Some(b) = &k.body {
                        self.bodies.push(PendingBody {
                            owner: kid,
                            class_id: id.clone(),
                            params,
                            body: b,
                            seq_offset: 0,
                            setter_of: None,
                        });
                    }
                }
                Member::Delegate(d) => self.delegate(d, &id, ns),
                Member::Class(inner) => self.class(inner, &id, ns),
            }
        }
    }

    fn register_member(&mut self, class_id: &str, name: &str, id: &str, type_name: &str, ns: &str) {
        self.classes
            .get_mut(class_id)
            .expect("class info")
            .members
            .insert(name.to_string(), id.to_string());
        self.var_types.insert(id.to_string(), type_name.to_string());
        self.typed.push((id.to_string(), type_name.to_string(), ns.to_string()));
    }

    fn delegate(&mut self, d: &DelegateDecl, parent: &str, ns: &str) {
        let id = format!("{}({})", join(parent, &d.name), signature(&d.params));
        if !self.add(types::DELEGATE, &id, &d.name, d.access, &d.doc) {
            return;
        }
        if !parent.is_empty() {
            self.contain(parent, &id);
        }
        self.index_type(&d.name, ns, &id, TypeKind::Delegate);
        self.params(&id, &d.params, ns);
    }

    /// Parameter variables with `HasParameter` links in declaration order.
    fn params(&mut self, owner: &str, params: &[Param], ns: &str) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for (i, p) in params.iter().enumerate() {
            let pid = format!("{owner}#{}", p.name);
            if !self.add(types::VARIABLE, &pid, &p.name, Accessibility::None, &None) {
                continue;
            }
            self.kb
                .add_link(links::HAS_PARAMETER, owner, &pid, Some(i as u32 + 1))
                .expect("fresh parameter");
            self.var_types.insert(pid.clone(), p.type_name.clone());
            self.typed.push((pid.clone(), p.type_name.clone(), ns.to_string()));
            out.push((p.name.clone(), pid));
        }
        out
    }

    // -- type resolution ----------------------------------------------------

    /// A loaded class or delegate named `type_name`, preferring the given
    /// namespace, then the lowest id.
    fn lookup_type(&self, type_name: &str, ns: &str, want: Option<TypeKind>) -> Option<String> {
        let name = element_type(type_name);
        let accept = |k: TypeKind| want.is_none_or(|w| w == k);
        if name.contains('.') {
            if self.classes.contains_key(name) && accept(TypeKind::Class) {
                return Some(name.to_string());
            }
            let simple = name.rsplit('.').next().unwrap_or(name);
            return self.type_index.get(simple).and_then(|cands| {
                cands
                    .iter()
                    .filter(|(_, id, k)| accept(*k) && (id == name || id.starts_with(&format!("{name}("))))
                    .map(|(_, id, _)| id.clone())
                    .next()
            });
        }
        let cands = self.type_index.get(name)?;
        let mut matching: Vec<&(String, String, TypeKind)> = cands.iter().filter(|(_, _, k)| accept(*k)).collect();
        matching.sort_by(|a, b| (a.0 != ns).cmp(&(b.0 != ns)).then_with(|| a.1.cmp(&b.1)));
        matching.first().map(|(_, id, _)| id.clone())
    }

    fn ensure_stub(&mut self, type_id: &str, id: &str, name: &str) {
        if self.kb.object(id).is_none() {
            self.kb
                .add_object(type_id, id, name, Accessibility::Unknown, true)
                .expect("fresh stub");
        }
    }

    fn ensure_stub_class(&mut self, type_name: &str) -> String {
        let id = stub_class_id(type_name);
        self.ensure_stub(types::CLASS, &id, type_name);
        id
    }

    fn link_type_of(&mut self, var: &str, type_name: &str, ns: &str) {
        if is_builtin_type(type_name) {
            return;
        }
        let target = match self.lookup_type(type_name, ns, None) {
            Some(id) => id,
            None => self.ensure_stub_class(element_type(type_name)),
        };
        let _ = self.kb.add_link(links::TYPE_OF, var, &target, None);
    }

    // -- bodies -------------------------------------------------------------

    fn resolve_body(&mut self, pending: &PendingBody<'_>) {
        let info = &self.classes[&pending.class_id];
        let ns = info.namespace.clone();
        let mut ctx = ResolutionContext {
            current_method_id: pending.owner.clone(),
            current_class_id: Some(pending.class_id.clone()),
            locals: BTreeMap::new(),
            params: pending.params.iter().cloned().collect(),
            fields: info.members.clone(),
            class_methods: info.methods.clone(),
            loaded_classes: BTreeMap::new(),
        };
        let constructors = info.constructors.clone();
        for ev in &pending.body.events {
            let seq = Some(ev.seq + pending.seq_offset);
            match &ev.kind {
                EventKind::Local { name, type_name } => {
                    let id = format!("{}#{name}", pending.owner);
                    if self.kb.object(&id).is_none() {
                        self.kb
                            .add_object(types::VARIABLE, &id, name, Accessibility::None, false)
                            .expect("fresh local");
                        self.contain(&pending.owner, &id);
                        self.var_types.insert(id.clone(), type_name.clone());
                        self.link_type_of(&id, type_name, &ns);
                    }
                    ctx.locals.insert(name.clone(), id);
                }
                EventKind::Use { name, kind } => {
                    if name == "value" && !ctx.locals.contains_key(name) && !ctx.params.contains_key(name) {
                        if let Some(prop_type) = &pending.setter_of {
                            let id = self.implicit_value(&pending.owner, prop_type, &ns);
                            ctx.params.insert(name.clone(), id);
                        }
                    }
                    let var = resolve_use(&ctx, name);
                    if var.external {
                        let bare = name.strip_prefix("this.").unwrap_or(name);
                        self.ensure_stub(types::VARIABLE, &var.id, bare);
                    }
                    let link = match kind {
                        UseKind::Read => links::READS,
                        UseKind::Write => links::WRITES,
                    };
                    self.kb.add_link(link, &pending.owner, &var.id, seq).expect("unique seq");
                }
                EventKind::Call { qualifier, name, argc } => {
                    let target = self.resolve_call(&ctx, &constructors, qualifier.as_deref(), name, *argc, &ns);
                    self.kb.add_link(links::CALLS, &pending.owner, &target, seq).expect("unique seq");
                }
                EventKind::New { type_name, .. } => {
                    let target = match self.lookup_type(type_name, &ns, Some(TypeKind::Class)) {
                        Some(id) => id,
                        None => self.ensure_stub_class(element_type(type_name)),
                    };
                    self.kb
                        .add_link(links::INSTANTIATES, &pending.owner, &target, seq)
                        .expect("unique seq");
                }
            }
        }
    }

    fn implicit_value(&mut self, property: &str, prop_type: &str, ns: &str) -> String {
        let id = format!("{property}#value");
        if self.kb.object(&id).is_none() {
            self.kb
                .add_object(types::VARIABLE, &id, "value", Accessibility::None, false)
                .expect("fresh value parameter");
            self.kb
                .add_link(links::HAS_PARAMETER, property, &id, Some(1))
                .expect("fresh value parameter");
            self.var_types.insert(id.clone(), prop_type.to_string());
            self.link_type_of(&id, prop_type, ns);
        }
        id
    }

    fn resolve_call(
        &mut self,
        ctx: &ResolutionContext,
        constructors: &BTreeMap<u32, Vec<String>>,
        qualifier: Option<&str>,
        name: &str,
        argc: u32,
        ns: &str,
    ) -> String {
        let unknown = |ex: &mut Self| {
            let id = stub_method_id("?", name, argc);
            ex.ensure_stub(types::METHOD, &id, name);
            id
        };
        let Some(q) = qualifier else {
            if name == "this" {
                return pick_overload(constructors.get(&argc), &ctx.current_method_id).unwrap_or_else(|| unknown(self));
            }
            if name == "base" {
                return unknown(self);
            }
            return pick_overload(ctx.class_methods.get(&(name.to_string(), argc)), &ctx.current_method_id)
                .unwrap_or_else(|| unknown(self));
        };
        if q == "?" || q == "base" {
            return unknown(self);
        }

        // Receiver type: a variable's declared type, else the qualifier read
        // as a type name (static call).
        let var = resolve_use(ctx, q);
        let type_name = if crate::parser::path_root(q) == q && !var.external {
            self.var_types.get(&var.id).cloned().unwrap_or_else(|| "?".to_string())
        } else if self.lookup_type(q, ns, Some(TypeKind::Class)).is_some() || !q.contains('.') {
            q.to_string()
        } else {
            "?".to_string()
        };
        if type_name == "?" {
            return unknown(self);
        }

        if let Some(class_id) = self.lookup_type(&type_name, ns, Some(TypeKind::Class)) {
            if !type_name.ends_with("[]") {
                let candidates = self.classes.get(&class_id).and_then(|c| c.methods.get(&(name.to_string(), argc)));
                if let Some(m) = pick_overload(candidates, &ctx.current_method_id) {
                    return m;
                }
            }
            let id = stub_method_id(&type_name, name, argc);
            self.ensure_stub(types::METHOD, &id, name);
            return id;
        }

        let id = stub_method_id(&type_name, name, argc);
        if self.kb.object(&id).is_none() {
            self.ensure_stub(types::METHOD, &id, name);
            if !is_builtin_type(&type_name) && !type_name.ends_with("[]") {
                let class = self.ensure_stub_class(&type_name);
                self.contain(&class, &id);
            }
        }
        id
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexer::tokenize;
    use crate::parser::parse;

    fn ir(path: &str, src: &str) -> IrDocument {
        IrDocument {
            file_path: path.to_string(),
            tree: parse(&tokenize(src).unwrap()).unwrap(),
        }
    }

    fn ids_of_type(kb: &KnowledgeBase, t: &str) -> Vec<String> {
        kb.objects_of_type(t).map(|o| o.id.clone()).collect()
    }

    #[test]
    fn empty_input() {
        let kb = extract(&[]);
        assert_eq!(kb.object_count(), 0);
        assert_eq!(kb, KnowledgeBase::new());
    }

    #[test]
    fn resolve_use_precedence() {
        let mut ctx = ResolutionContext::default();
        ctx.fields.insert("x".into(), "C.x".into());
        assert_eq!(resolve_use(&ctx, "x").id, "C.x");
        ctx.params.insert("x".into(), "C.M(int)#x".into());
        assert_eq!(resolve_use(&ctx, "x").id, "C.M(int)#x");
        ctx.locals.insert("x".into(), "C.M(int)#x2".into());
        assert_eq!(resolve_use(&ctx, "x").id, "C.M(int)#x2");
        assert_eq!(resolve_use(&ctx, "this.x").id, "C.x");
        assert_eq!(resolve_use(&ctx, "this.y").id, "extern:?.y");
        let foo = resolve_use(&ctx, "foo");
        assert_eq!(foo, VariableRef { id: "extern:?.foo".into(), external: true });
    }

    #[test]
    fn local_shadows_field() {
        let kb = extract(&[ir(
            "a.cs",
            "namespace N { class C { int count; void M() { int count = 0; count++; } } }",
        )]);
        let reads: Vec<_> = kb.outgoing("N.C.M()").filter(|l| l.link_type == links::READS).collect();
        assert_eq!(reads.len(), 1);
        assert_eq!(reads[0].child, "N.C.M()#count");
        assert_eq!(kb.container_of("N.C.M()#count"), Some("N.C.M()"));
    }

    #[test]
    fn this_prefix_skips_parameters() {
        let kb = extract(&[ir(
            "a.cs",
            "class C { Renderer rd; C(Renderer rd) { this.rd = rd; this.rd.Render(); } }",
        )]);
        let out: Vec<_> = kb.outgoing("C.C(Renderer)").filter(|l| l.seq.is_some() && l.link_type != links::HAS_PARAMETER).map(|l| l.to_string()).collect();
        let mut out = out;
        out.sort_by_key(|l| l.rsplit('#').next().unwrap().parse::<u32>().unwrap());
        assert_eq!(
            out,
            [
                "Reads:C.C(Renderer)->C.C(Renderer)#rd#1",
                "Writes:C.C(Renderer)->C.rd#2",
                "Reads:C.C(Renderer)->C.rd#3",
                "Calls:C.C(Renderer)->extern:Renderer.Render/0#4",
            ]
        );
    }

    #[test]
    fn unknown_names_share_one_stub() {
        let kb = extract(&[ir("a.cs", "class C { void M() { foo = foo + 1; Bar(); Bar(); q.Baz(); } }")]);
        let foo_links = kb.incoming("extern:?.foo").count();
        assert_eq!(foo_links, 2);
        assert_eq!(kb.incoming("extern:?.Bar/0").count(), 2);
        assert!(kb.object("extern:?.foo").unwrap().external);
        // `q` is unknown, so it is read as a type name.
        assert!(kb.object("extern:q.Baz/0").is_some());
        assert_eq!(kb.container_of("extern:q.Baz/0"), Some("extern:q"));
    }

    #[test]
    fn cross_file_resolution_removes_stubs() {
        let a = ir(
            "a.cs",
            "namespace N { class C { private Renderer rd; void M() { rd.Render(rd); Renderer r = new Renderer(); } } }",
        );
        let b = ir("b.cs", "namespace G { public class Renderer { public void Render(object o) { } } }");
        let alone = extract(std::slice::from_ref(&a));
        assert!(alone.object("extern:Renderer.Render/1").is_some());
        let kb = extract(&[b, a]);
        assert!(kb.objects().all(|o| !o.id.starts_with("extern:Renderer")), "{:?}", ids_of_type(&kb, types::CLASS));
        let calls: Vec<_> = kb.outgoing("N.C.M()").filter(|l| l.link_type == links::CALLS).collect();
        assert_eq!(calls[0].child, "G.Renderer.Render(object)");
        assert!(kb.outgoing("N.C.M()").any(|l| l.link_type == links::INSTANTIATES && l.child == "G.Renderer"));
        assert!(kb.outgoing("N.C.rd").any(|l| l.link_type == links::TYPE_OF && l.child == "G.Renderer"));
    }

    #[test]
    fn namespaces_merge_across_files() {
        let kb = extract(&[
            ir("b.cs", "namespace N { class B { } }"),
            ir("a.cs", "namespace N { class A { } }"),
        ]);
        assert_eq!(ids_of_type(&kb, types::NAMESPACE), ["N"]);
        let kids: Vec<_> = kb.outgoing("N").map(|l| (l.child.clone(), l.seq)).collect();
        assert_eq!(kids, [("N.A".to_string(), Some(1)), ("N.B".to_string(), Some(2))]);
    }

    #[test]
    fn nested_namespaces_and_classes() {
        let kb = extract(&[ir("a.cs", "namespace A { namespace B { class C { class D { } } } }")]);
        assert_eq!(kb.container_of("A.B"), Some("A"));
        assert_eq!(kb.container_of("A.B.C.D"), Some("A.B.C"));
    }

    #[test]
    fn overloads_resolve_by_arity_in_same_class() {
        let kb = extract(&[ir(
            "a.cs",
            "class C { void F(int a) { F(a, a); } void F(int a, int b) { G(); } } class D { void G() { } }",
        )]);
        let call = kb.outgoing("C.F(int)").find(|l| l.link_type == links::CALLS).unwrap();
        assert_eq!(call.child, "C.F(int,int)");
        // No cross-class lookup for unqualified calls.
        let g = kb.outgoing("C.F(int,int)").find(|l| l.link_type == links::CALLS).unwrap();
        assert_eq!(g.child, "extern:?.G/0");
    }

    #[test]
    fn constructor_initializer_and_static_calls() {
        let kb = extract(&[ir(
            "a.cs",
            "class C { C() : this(1) { } C(int x) : base(x) { s = string.Format(x); Util.Go(); } string s; } class Util { public static void Go() { } }",
        )]);
        let first: Vec<_> = kb.outgoing("C.C()").filter(|l| l.link_type == links::CALLS).map(|l| l.child.clone()).collect();
        assert_eq!(first, ["C.C(int)"]);
        let second: Vec<_> = kb.outgoing("C.C(int)").filter(|l| l.link_type == links::CALLS).map(|l| l.child.clone()).collect();
        assert_eq!(second, ["Util.Go()", "extern:?.base/1", "extern:string.Format/1"]);
        assert!(kb.object("extern:string").is_none());
    }

    #[test]
    fn property_accessors_link_from_property() {
        let kb = extract(&[ir(
            "a.cs",
            "class C { int w; public int Width { get { return w; } set { w = value; } } void M() { Width = 3; } }",
        )]);
        let mut links_out: Vec<_> = kb
            .outgoing("C.Width")
            .filter(|l| l.link_type != links::HAS_PARAMETER)
            .map(|l| (l.link_type.clone(), l.child.clone(), l.seq))
            .collect();
        links_out.sort_by_key(|l| l.2);
        assert_eq!(
            links_out,
            [
                ("Reads".to_string(), "C.w".to_string(), Some(1)),
                ("Reads".to_string(), "C.Width#value".to_string(), Some(2)),
                ("Writes".to_string(), "C.w".to_string(), Some(3)),
            ]
        );
        assert!(kb.outgoing("C.M()").any(|l| l.link_type == links::WRITES && l.child == "C.Width"));
    }

    #[test]
    fn descriptions_and_delegates_and_events() {
        let kb = extract(&[ir(
            "a.cs",
            "namespace N {
               /// Handles redraws.
               public delegate void Redraw(int n);
               class C { public event Redraw OnRedraw; public event EventHandler Closed; }
             }",
        )]);
        let d = kb.object("N.Redraw(int)").unwrap();
        assert_eq!(d.type_id, types::DELEGATE);
        assert_eq!(d.description, "Handles redraws.");
        assert!(kb.outgoing("N.Redraw(int)").any(|l| l.link_type == links::HAS_PARAMETER && l.child == "N.Redraw(int)#n"));
        assert!(kb.outgoing("N.C.OnRedraw").any(|l| l.link_type == links::TYPE_OF && l.child == "N.Redraw(int)"));
        assert!(kb.outgoing("N.C.Closed").any(|l| l.link_type == links::TYPE_OF && l.child == "extern:EventHandler"));
    }

    #[test]
    fn deterministic_across_input_order() {
        let a = ir("a.cs", "namespace N { class A { B b; void M() { b.Go(); } } }");
        let b = ir("b.cs", "namespace N { class B { public void Go() { } } }");
        let x = extract(&[a.clone(), b.clone()]).to_xml();
        let y = extract(&[b, a]).to_xml();
        assert_eq!(x, y);
    }
}
