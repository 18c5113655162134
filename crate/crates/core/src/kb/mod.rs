//! Traceability knowledge base: typed objects, typed directed links between
//! them, user annotations, and an append-only change log that listeners poll.
//!
//! Mutation goes through `&mut self`, so the single-writer contract is the
//! borrow checker's job. Every successful mutation appends exactly one
//! [`ChangeEvent`].

mod persist;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use crate::syntax::Accessibility;
pub use persist::KbSchemaError;

/// Built-in knowledge type ids.
pub mod types {
    pub const NAMESPACE: &str = "Namespace";
    pub const CLASS: &str = "Class";
    pub const CONSTRUCTOR: &str = "Constructor";
    pub const METHOD: &str = "Method";
    pub const PROPERTY: &str = "Property";
    pub const VARIABLE: &str = "Variable";
    pub const DELEGATE: &str = "Delegate";
    pub const EVENT: &str = "Event";

    pub const BUILTIN: [&str; 8] = [NAMESPACE, CLASS, CONSTRUCTOR, METHOD, PROPERTY, VARIABLE, DELEGATE, EVENT];
}

/// Built-in link type ids.
pub mod links {
    /// Structural nesting (namespace → class → member, method → local).
    pub const CONTAINS: &str = "Contains";
    /// Caller → callee.
    pub const CALLS: &str = "Calls";
    pub const READS: &str = "Reads";
    pub const WRITES: &str = "Writes";
    /// Method → class it creates.
    pub const INSTANTIATES: &str = "Instantiates";
    pub const HAS_PARAMETER: &str = "HasParameter";
    /// Variable or event → its declared class or delegate.
    pub const TYPE_OF: &str = "TypeOf";
    /// Default for links created by hand.
    pub const RELATED: &str = "Related";

    pub const BUILTIN: [&str; 8] = [CONTAINS, CALLS, READS, WRITES, INSTANTIATES, HAS_PARAMETER, TYPE_OF, RELATED];
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KnowledgeType {
    pub id: String,
    pub display_order: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinkType {
    pub id: String,
    /// Always true for the built-in vocabulary.
    pub directed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoteLevel {
    /// Important information to consider before changing the object.
    Info,
    /// A problem with an identified solution.
    Solved,
    /// A problem with no solution yet.
    Open,
}

impl NoteLevel {
    pub fn as_str(self) -> &'static str {
        match self {
            NoteLevel::Info => "info",
            NoteLevel::Solved => "solved",
            NoteLevel::Open => "open",
        }
    }
}

impl FromStr for NoteLevel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "info" => Ok(NoteLevel::Info),
            "solved" => Ok(NoteLevel::Solved),
            "open" => Ok(NoteLevel::Open),
            other => Err(format!("unknown note level `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Note {
    pub level: NoteLevel,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DocLink {
    pub href: String,
    pub anchor: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KnowledgeObject {
    pub id: String,
    pub type_id: String,
    pub name: String,
    pub access: Accessibility,
    /// Placeholder for code that was referenced but not loaded.
    pub external: bool,
    pub description: String,
    pub version: String,
    pub notes: Vec<Note>,
    pub doc_links: Vec<DocLink>,
}

/// A directed, typed edge. Ordering is the canonical `(type, parent, child,
/// seq)` order, with seq-less links first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LinkObject {
    pub link_type: String,
    pub parent: String,
    pub child: String,
    /// Execution order for body-event links, declaration order for
    /// `Contains` and `HasParameter`.
    pub seq: Option<u32>,
}

impl LinkObject {
    pub fn new(link_type: &str, parent: &str, child: &str, seq: Option<u32>) -> Self {
        Self {
            link_type: link_type.to_string(),
            parent: parent.to_string(),
            child: child.to_string(),
            seq,
        }
    }
}

impl fmt::Display for LinkObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}->{}", self.link_type, self.parent, self.child)?;
        if let Some(s) = self.seq {
            write!(f, "#{s}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ChangeKind {
    ObjectAdded,
    ObjectUpdated,
    LinkAdded,
    LinkRemoved,
    TypeAdded,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChangeEvent {
    pub seq_no: u64,
    pub kind: ChangeKind,
    pub subject_id: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Annotation {
    SetDescription(String),
    SetVersion(String),
    AddNote { level: NoteLevel, text: String },
    AddDocLink { href: String, anchor: Option<String> },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KbError {
    #[error("duplicate object id `{0}`")]
    DuplicateId(String),
    #[error("duplicate type id `{0}`")]
    DuplicateType(String),
    #[error("unknown knowledge type `{0}`")]
    UnknownType(String),
    #[error("unknown link type `{0}`")]
    UnknownLinkType(String),
    #[error("unknown link endpoint `{0}`")]
    UnknownEndpoint(String),
    #[error("duplicate link {0}")]
    DuplicateLink(String),
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("unknown link {0}")]
    UnknownLink(String),
    #[error("text must not be empty")]
    EmptyText,
    #[error("containment violation: {0}")]
    Containment(String),
}

#[derive(Debug, Clone, Default)]
pub struct KnowledgeBase {
    types: Vec<KnowledgeType>,
    link_types: Vec<LinkType>,
    objects: BTreeMap<String, KnowledgeObject>,
    links: BTreeSet<LinkObject>,
    outgoing: BTreeMap<String, BTreeSet<LinkObject>>,
    incoming: BTreeMap<String, BTreeSet<LinkObject>>,
    log: Vec<ChangeEvent>,
}

/// Equality over content; the change log is not compared.
impl PartialEq for KnowledgeBase {
    fn eq(&self, other: &Self) -> bool {
        self.types == other.types
            && self.link_types == other.link_types
            && self.objects == other.objects
            && self.links == other.links
    }
}

impl Eq for KnowledgeBase {}

impl KnowledgeBase {
    /// A knowledge base with the built-in types and link types registered.
    pub fn new() -> Self {
        let mut kb = Self::empty();
        for (i, t) in types::BUILTIN.iter().enumerate() {
            kb.types.push(KnowledgeType {
                id: t.to_string(),
                display_order: i as i64,
            });
        }
        for l in links::BUILTIN {
            kb.link_types.push(LinkType {
                id: l.to_string(),
                directed: true,
            });
        }
        kb
    }

    /// A knowledge base with nothing registered.
    pub fn empty() -> Self {
        Self::default()
    }

    fn record(&mut self, kind: ChangeKind, subject_id: String) {
        let seq_no = self.log.len() as u64 + 1;
        self.log.push(ChangeEvent {
            seq_no,
            kind,
            subject_id,
        });
    }

    // -- registry ----------------------------------------------------------

    /// Register a new object category. `display_order` defaults to one past
    /// the current maximum.
    pub fn register_type(&mut self, id: &str, display_order: Option<i64>) -> Result<&KnowledgeType, KbError> {
        if id.trim().is_empty() {
            return Err(KbError::EmptyText);
        }
        if self.has_type(id) {
            return Err(KbError::DuplicateType(id.to_string()));
        }
        let order = display_order.unwrap_or_else(|| self.types.iter().map(|t| t.display_order + 1).max().unwrap_or(0));
        self.types.push(KnowledgeType {
            id: id.to_string(),
            display_order: order,
        });
        self.types.sort_by(|a, b| a.display_order.cmp(&b.display_order).then_with(|| a.id.cmp(&b.id)));
        self.record(ChangeKind::TypeAdded, id.to_string());
        Ok(self.types.iter().find(|t| t.id == id).expect("just inserted"))
    }

    pub fn register_link_type(&mut self, id: &str) -> Result<&LinkType, KbError> {
        if id.trim().is_empty() {
            return Err(KbError::EmptyText);
        }
        if self.has_link_type(id) {
            return Err(KbError::DuplicateType(id.to_string()));
        }
        self.link_types.push(LinkType {
            id: id.to_string(),
            directed: true,
        });
        self.record(ChangeKind::TypeAdded, id.to_string());
        Ok(self.link_types.last().expect("just inserted"))
    }

    /// Types sorted by display order.
    pub fn types(&self) -> &[KnowledgeType] {
        &self.types
    }

    pub fn link_types(&self) -> &[LinkType] {
        &self.link_types
    }

    pub fn has_type(&self, id: &str) -> bool {
        self.types.iter().any(|t| t.id == id)
    }

    pub fn has_link_type(&self, id: &str) -> bool {
        self.link_types.iter().any(|t| t.id == id)
    }

    // -- objects -----------------------------------------------------------

    /// Add an object. External objects always get [`Accessibility::Unknown`].
    pub fn add_object(
        &mut self,
        type_id: &str,
        id: &str,
        name: &str,
        access: Accessibility,
        external: bool,
    ) -> Result<&KnowledgeObject, KbError> {
        if !self.has_type(type_id) {
            return Err(KbError::UnknownType(type_id.to_string()));
        }
        if id.is_empty() {
            return Err(KbError::EmptyText);
        }
        if self.objects.contains_key(id) {
            return Err(KbError::DuplicateId(id.to_string()));
        }
        let obj = KnowledgeObject {
            id: id.to_string(),
            type_id: type_id.to_string(),
            name: name.to_string(),
            access: if external { Accessibility::Unknown } else { access },
            external,
            description: String::new(),
            version: String::new(),
            notes: Vec::new(),
            doc_links: Vec::new(),
        };
        self.objects.insert(id.to_string(), obj);
        self.record(ChangeKind::ObjectAdded, id.to_string());
        Ok(&self.objects[id])
    }

    pub fn object(&self, id: &str) -> Option<&KnowledgeObject> {
        self.objects.get(id)
    }

    pub fn contains_object(&self, id: &str) -> bool {
        self.objects.contains_key(id)
    }

    /// All objects in id order.
    pub fn objects(&self) -> impl Iterator<Item = &KnowledgeObject> {
        self.objects.values()
    }

    pub fn objects_of_type<'a>(&'a self, type_id: &'a str) -> impl Iterator<Item = &'a KnowledgeObject> + 'a {
        self.objects.values().filter(move |o| o.type_id == type_id)
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn annotate(&mut self, object_id: &str, change: Annotation) -> Result<&KnowledgeObject, KbError> {
        let obj = self
            .objects
            .get_mut(object_id)
            .ok_or_else(|| KbError::UnknownObject(object_id.to_string()))?;
        let nonempty = |s: &str| if s.trim().is_empty() { Err(KbError::EmptyText) } else { Ok(()) };
        match change {
            Annotation::SetDescription(text) => {
                nonempty(&text)?;
                obj.description = text;
            }
            Annotation::SetVersion(text) => {
                nonempty(&text)?;
                obj.version = text;
            }
            Annotation::AddNote { level, text } => {
                nonempty(&text)?;
                obj.notes.push(Note { level, text });
            }
            Annotation::AddDocLink { href, anchor } => {
                nonempty(&href)?;
                if let Some(a) = &anchor {
                    nonempty(a)?;
                }
                obj.doc_links.push(DocLink { href, anchor });
            }
        }
        self.record(ChangeKind::ObjectUpdated, object_id.to_string());
        Ok(&self.objects[object_id])
    }

    // -- links -------------------------------------------------------------

    pub fn add_link(&mut self, link_type: &str, parent: &str, child: &str, seq: Option<u32>) -> Result<&LinkObject, KbError> {
        if !self.has_link_type(link_type) {
            return Err(KbError::UnknownLinkType(link_type.to_string()));
        }
        for end in [parent, child] {
            if !self.objects.contains_key(end) {
                return Err(KbError::UnknownEndpoint(end.to_string()));
            }
        }
        let link = LinkObject::new(link_type, parent, child, seq);
        if self.links.contains(&link) {
            return Err(KbError::DuplicateLink(link.to_string()));
        }
        if link_type == links::CONTAINS {
            self.check_containment(parent, child)?;
        }
        self.outgoing.entry(parent.to_string()).or_default().insert(link.clone());
        self.incoming.entry(child.to_string()).or_default().insert(link.clone());
        self.links.insert(link.clone());
        self.record(ChangeKind::LinkAdded, link.to_string());
        Ok(self.links.get(&link).expect("just inserted"))
    }

    fn check_containment(&self, parent: &str, child: &str) -> Result<(), KbError> {
        if parent == child {
            return Err(KbError::Containment(format!("`{child}` cannot contain itself")));
        }
        if let Some(existing) = self.container_of(child) {
            return Err(KbError::Containment(format!("`{child}` is already contained by `{existing}`")));
        }
        let mut cur = parent;
        while let Some(up) = self.container_of(cur) {
            if up == child {
                return Err(KbError::Containment(format!("`{child}` contains `{parent}`")));
            }
            cur = up;
        }
        Ok(())
    }

    pub fn remove_link(&mut self, link: &LinkObject) -> Result<(), KbError> {
        if !self.links.remove(link) {
            return Err(KbError::UnknownLink(link.to_string()));
        }
        if let Some(set) = self.outgoing.get_mut(&link.parent) {
            set.remove(link);
        }
        if let Some(set) = self.incoming.get_mut(&link.child) {
            set.remove(link);
        }
        self.record(ChangeKind::LinkRemoved, link.to_string());
        Ok(())
    }

    /// All links in canonical order.
    pub fn links(&self) -> impl Iterator<Item = &LinkObject> {
        self.links.iter()
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    /// Links whose parent is `id`, in canonical order.
    pub fn outgoing(&self, id: &str) -> impl Iterator<Item = &LinkObject> {
        self.outgoing.get(id).into_iter().flatten()
    }

    /// Links whose child is `id`, in canonical order.
    pub fn incoming(&self, id: &str) -> impl Iterator<Item = &LinkObject> {
        self.incoming.get(id).into_iter().flatten()
    }

    /// The `Contains` parent of `id`, if any.
    pub fn container_of(&self, id: &str) -> Option<&str> {
        self.incoming(id)
            .find(|l| l.link_type == links::CONTAINS)
            .map(|l| l.parent.as_str())
    }

    // -- change log --------------------------------------------------------

    /// Events with `seq_no` greater than `since`, oldest first.
    pub fn events_since(&self, since: u64) -> &[ChangeEvent] {
        let start = (since as usize).min(self.log.len());
        &self.log[start..]
    }

    /// Sequence number of the latest event (0 when none).
    pub fn last_event_seq(&self) -> u64 {
        self.log.len() as u64
    }

    pub(crate) fn clear_log(&mut self) {
        self.log.clear();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ZOOM: &str = "GeomKernel.CmdsCleanup.CleanupControl.ZoomOut(int,bool)";
    const ZOOM_EV: &str = "GeomKernel.CmdsCleanup.CleanupControl.ZoomOut(object,EventArgs)";

    fn two_methods() -> KnowledgeBase {
        let mut kb = KnowledgeBase::new();
        kb.add_object(types::METHOD, ZOOM, "ZoomOut", Accessibility::Public, false).unwrap();
        kb.add_object(types::METHOD, ZOOM_EV, "ZoomOut", Accessibility::Private, false).unwrap();
        kb
    }

    #[test]
    fn builtins_are_exact() {
        let kb = KnowledgeBase::new();
        let t: Vec<&str> = kb.types().iter().map(|t| t.id.as_str()).collect();
        assert_eq!(t, ["Namespace", "Class", "Constructor", "Method", "Property", "Variable", "Delegate", "Event"]);
        let l: Vec<&str> = kb.link_types().iter().map(|t| t.id.as_str()).collect();
        assert_eq!(l, ["Contains", "Calls", "Reads", "Writes", "Instantiates", "HasParameter", "TypeOf", "Related"]);
        assert!(kb.link_types().iter().all(|l| l.directed));
    }

    #[test]
    fn add_object_logs_one_event() {
        let mut kb = KnowledgeBase::new();
        let before = kb.events_since(0).len();
        let obj = kb.add_object(types::METHOD, ZOOM, "ZoomOut", Accessibility::Public, false).unwrap();
        assert_eq!(obj.type_id, "Method");
        assert_eq!(kb.events_since(0).len(), before + 1);
        assert_eq!(kb.object(ZOOM).unwrap().access, Accessibility::Public);
    }

    #[test]
    fn unknown_type_then_registered() {
        let mut kb = KnowledgeBase::new();
        assert_eq!(
            kb.add_object("Requirement", "REQ-1", "Zoom", Accessibility::None, false),
            Err(KbError::UnknownType("Requirement".into()))
        );
        kb.register_type("Requirement", None).unwrap();
        assert_eq!(kb.types().last().unwrap().display_order, 8);
        kb.add_object("Requirement", "REQ-1", "Zoom", Accessibility::None, false).unwrap();
        assert_eq!(kb.register_type("Requirement", None).unwrap_err(), KbError::DuplicateType("Requirement".into()));
    }

    #[test]
    fn duplicate_id() {
        let mut kb = two_methods();
        assert_eq!(
            kb.add_object(types::METHOD, ZOOM, "ZoomOut", Accessibility::Public, false).unwrap_err(),
            KbError::DuplicateId(ZOOM.into())
        );
    }

    #[test]
    fn external_objects_have_unknown_access() {
        let mut kb = KnowledgeBase::new();
        let o = kb.add_object(types::METHOD, "extern:Renderer.Render/1", "Render", Accessibility::Public, true).unwrap();
        assert_eq!(o.access, Accessibility::Unknown);
    }

    #[test]
    fn links_duplicate_only_by_seq() {
        let mut kb = two_methods();
        kb.add_link(links::CALLS, ZOOM_EV, ZOOM, Some(1)).unwrap();
        kb.add_object(types::VARIABLE, "v", "v", Accessibility::Private, false).unwrap();
        kb.add_link(links::READS, ZOOM, "v", Some(2)).unwrap();
        kb.add_link(links::READS, ZOOM, "v", Some(7)).unwrap();
        assert!(matches!(kb.add_link(links::READS, ZOOM, "v", Some(7)), Err(KbError::DuplicateLink(_))));
        kb.add_link(links::RELATED, ZOOM, "v", None).unwrap();
        assert!(matches!(kb.add_link(links::RELATED, ZOOM, "v", None), Err(KbError::DuplicateLink(_))));
        assert_eq!(kb.outgoing(ZOOM).count(), 3);
        assert_eq!(kb.incoming("v").count(), 3);
    }

    #[test]
    fn link_errors() {
        let mut kb = two_methods();
        assert_eq!(kb.add_link(links::CALLS, ZOOM, "nope", None).unwrap_err(), KbError::UnknownEndpoint("nope".into()));
        assert_eq!(kb.add_link("Implements", ZOOM, ZOOM_EV, None).unwrap_err(), KbError::UnknownLinkType("Implements".into()));
    }

    #[test]
    fn containment_is_a_forest() {
        let mut kb = KnowledgeBase::new();
        for id in ["a", "b", "c"] {
            kb.add_object(types::CLASS, id, id, Accessibility::Public, false).unwrap();
        }
        kb.add_link(links::CONTAINS, "a", "b", Some(1)).unwrap();
        kb.add_link(links::CONTAINS, "b", "c", Some(1)).unwrap();
        assert!(matches!(kb.add_link(links::CONTAINS, "a", "c", Some(2)), Err(KbError::Containment(_))));
        assert!(matches!(kb.add_link(links::CONTAINS, "c", "a", Some(1)), Err(KbError::Containment(_))));
        assert!(matches!(kb.add_link(links::CONTAINS, "a", "a", None), Err(KbError::Containment(_))));
        assert_eq!(kb.container_of("c"), Some("b"));
    }

    #[test]
    fn annotations() {
        let mut kb = two_methods();
        let o = kb
            .annotate(ZOOM, Annotation::AddNote { level: NoteLevel::Open, text: "null deref when curve empty".into() })
            .unwrap();
        assert_eq!(o.notes.len(), 1);
        let o = kb
            .annotate(ZOOM, Annotation::AddDocLink { href: "design.docx".into(), anchor: Some("zoom-spec".into()) })
            .unwrap();
        assert_eq!(o.doc_links.len(), 1);
        kb.annotate(ZOOM, Annotation::SetVersion("build 112".into())).unwrap();
        assert_eq!(
            kb.annotate("missing", Annotation::SetDescription("x".into())).unwrap_err(),
            KbError::UnknownObject("missing".into())
        );
        assert_eq!(kb.annotate(ZOOM, Annotation::SetDescription("  ".into())).unwrap_err(), KbError::EmptyText);
    }

    #[test]
    fn change_log() {
        let mut kb = KnowledgeBase::new();
        assert!(kb.events_since(0).is_empty());
        kb.add_object(types::METHOD, "m", "m", Accessibility::Public, false).unwrap();
        kb.add_object(types::VARIABLE, "v", "v", Accessibility::Public, false).unwrap();
        kb.add_link(links::READS, "m", "v", Some(1)).unwrap();
        let all = kb.events_since(0);
        assert_eq!(all.iter().map(|e| e.seq_no).collect::<Vec<_>>(), [1, 2, 3]);
        assert_eq!(all[2].kind, ChangeKind::LinkAdded);
        assert_eq!(kb.events_since(2).len(), 1);
        assert!(kb.events_since(10).is_empty());
        // Failed mutations do not log.
        let _ = kb.add_link(links::READS, "m", "v", Some(1));
        assert_eq!(kb.last_event_seq(), 3);
        let link = LinkObject::new(links::READS, "m", "v", Some(1));
        kb.remove_link(&link).unwrap();
        assert_eq!(kb.events_since(3)[0].kind, ChangeKind::LinkRemoved);
        assert_eq!(kb.outgoing("m").count(), 0);
        assert!(matches!(kb.remove_link(&link), Err(KbError::UnknownLink(_))));
    }
}
