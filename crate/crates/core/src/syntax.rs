//! Syntax tree for the supported C# subset.
//!
//! The tree keeps declaration structure and flattens executable code into
//! ordered [`BodyEvent`]s. Source positions are not retained.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Accessibility {
    Public,
    Private,
    Protected,
    Internal,
    None,
    Unknown,
}

impl Accessibility {
    pub fn as_str(self) -> &'static str {
        match self {
            Accessibility::Public => "public",
            Accessibility::Private => "private",
            Accessibility::Protected => "protected",
            Accessibility::Internal => "internal",
            Accessibility::None => "none",
            Accessibility::Unknown => "unknown",
        }
    }
}

impl fmt::Display for Accessibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Accessibility {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "public" => Accessibility::Public,
            "private" => Accessibility::Private,
            "protected" => Accessibility::Protected,
            "internal" => Accessibility::Internal,
            "none" => Accessibility::None,
            "unknown" => Accessibility::Unknown,
            other => return Err(format!("unknown accessibility `{other}`")),
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SyntaxTree {
    pub usings: Vec<String>,
    /// Top-level namespaces and any types declared outside a namespace, in
    /// declaration order.
    pub members: Vec<NamespaceMember>,
}

impl SyntaxTree {
    pub fn namespaces(&self) -> impl Iterator<Item = &NamespaceDecl> {
        self.members.iter().filter_map(|m| match m {
            NamespaceMember::Namespace(ns) => Some(ns),
            NamespaceMember::Type(_) => None,
        })
    }

    /// Every body in the tree, with a label naming its owner. Used by tests and
    /// diagnostics.
    pub fn bodies(&self) -> Vec<(String, &Body)> {
        let mut out = Vec::new();
        for m in &self.members {
            collect_bodies_ns(m, "", &mut out);
        }
        out
    }
}

fn collect_bodies_ns<'a>(m: &'a NamespaceMember, prefix: &str, out: &mut Vec<(String, &'a Body)>) {
    match m {
        NamespaceMember::Namespace(ns) => {
            let p = join(prefix, &ns.name);
            for inner in &ns.members {
                collect_bodies_ns(inner, &p, out);
            }
        }
        NamespaceMember::Type(TypeDecl::Class(c)) => collect_bodies_class(c, prefix, out),
        NamespaceMember::Type(TypeDecl::Delegate(_)) => {}
    }
}

fn collect_bodies_class<'a>(c: &'a ClassDecl, prefix: &str, out: &mut Vec<(String, &'a Body)>) {
    let p = join(prefix, &c.name);
    for member in &c.members {
        match member {
            Member::Method(m) => {
                if let Some(b) = &m.body {
                    out.push((format!("{p}.{}", m.name), b));
                }
            }
            Member::Constructor(k) => {
                if let Some(b) = &k.body {
                    out.push((format!("{p}.{}", c.name), b));
                }
            }
            Member::Property(prop) => {
                if let Some(b) = &prop.getter {
                    out.push((format!("{p}.{}.get", prop.name), b));
                }
                if let Some(b) = &prop.setter {
                    out.push((format!("{p}.{}.set", prop.name), b));
                }
            }
            Member::Class(inner) => collect_bodies_class(inner, &p, out),
            _ => {}
        }
    }
}

fn join(prefix: &str, name: &str) -> String {
    if prefix.is_empty() {
        name.to_string()
    } else {
        format!("{prefix}.{name}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NamespaceMember {
    Namespace(NamespaceDecl),
    Type(TypeDecl),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamespaceDecl {
    /// Name as written, possibly dotted (`GeomKernel.CmdsCleanup`).
    pub name: String,
    pub members: Vec<NamespaceMember>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypeDecl {
    Class(ClassDecl),
    Delegate(DelegateDecl),
}

impl TypeDecl {
    pub fn name(&self) -> &str {
        match self {
            TypeDecl::Class(c) => &c.name,
            TypeDecl::Delegate(d) => &d.name,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassDecl {
    pub name: String,
    pub access: Accessibility,
    pub doc: Option<String>,
    /// Base list as written; never resolved.
    pub bases: Vec<String>,
    pub members: Vec<Member>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Member {
    Field(FieldDecl),
    Method(MethodDecl),
    Constructor(ConstructorDecl),
    Property(PropertyDecl),
    Event(EventDecl),
    Delegate(DelegateDecl),
    Class(ClassDecl),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldDecl {
    pub name: String,
    pub type_name: String,
    pub access: Accessibility,
    pub doc: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Param {
    pub name: String,
    pub type_name: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MethodDecl {
    pub name: String,
    pub returns: String,
    pub access: Accessibility,
    pub doc: Option<String>,
    pub params: Vec<Param>,
    /// `None` for bodiless (abstract or extern) methods.
    pub body: Option<Body>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructorDecl {
    pub access: Accessibility,
    pub doc: Option<String>,
    pub params: Vec<Param>,
    /// A `: this(..)` or `: base(..)` initializer appears as a leading `Call`
    /// event named `this` or `base`.
    pub body: Option<Body>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyDecl {
    pub name: String,
    pub type_name: String,
    pub access: Accessibility,
    pub doc: Option<String>,
    pub getter: Option<Body>,
    pub setter: Option<Body>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventDecl {
    pub name: String,
    pub type_name: String,
    pub access: Accessibility,
    pub doc: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DelegateDecl {
    pub name: String,
    pub returns: String,
    pub access: Accessibility,
    pub doc: Option<String>,
    pub params: Vec<Param>,
}

/// Ordered body events; `seq` runs 1..=n.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Body {
    pub events: Vec<BodyEvent>,
}

impl Body {
    pub fn variants(&self) -> impl Iterator<Item = &EventKind> {
        self.events.iter().map(|e| &e.kind)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BodyEvent {
    pub seq: u32,
    pub kind: EventKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UseKind {
    Read,
    Write,
}

impl UseKind {
    pub fn as_str(self) -> &'static str {
        match self {
            UseKind::Read => "read",
            UseKind::Write => "write",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EventKind {
    Call {
        qualifier: Option<String>,
        name: String,
        argc: u32,
    },
    Use {
        name: String,
        kind: UseKind,
    },
    New {
        type_name: String,
        argc: u32,
    },
    Local {
        name: String,
        type_name: String,
    },
}

impl EventKind {
    pub fn call(qualifier: Option<&str>, name: &str, argc: u32) -> Self {
        EventKind::Call {
            qualifier: qualifier.map(str::to_string),
            name: name.to_string(),
            argc,
        }
    }

    pub fn read(name: &str) -> Self {
        EventKind::Use {
            name: name.to_string(),
            kind: UseKind::Read,
        }
    }

    pub fn write(name: &str) -> Self {
        EventKind::Use {
            name: name.to_string(),
            kind: UseKind::Write,
        }
    }

    pub fn new_object(type_name: &str, argc: u32) -> Self {
        EventKind::New {
            type_name: type_name.to_string(),
            argc,
        }
    }

    pub fn local(name: &str, type_name: &str) -> Self {
        EventKind::Local {
            name: name.to_string(),
            type_name: type_name.to_string(),
        }
    }
}

/// Type names that are built into the language and never resolve to a class.
pub const BUILTIN_TYPES: &[&str] = &[
    "int", "long", "float", "double", "bool", "string", "char", "object", "void", "var", "byte",
    "short", "uint", "ulong", "decimal",
];

pub fn is_builtin_type(name: &str) -> bool {
    BUILTIN_TYPES.contains(&element_type(name))
}

/// Strip array rank specifiers: `Curve[][]` → `Curve`.
pub fn element_type(name: &str) -> &str {
    let mut n = name;
    while let Some(stripped) = n.strip_suffix("[]") {
        n = stripped;
    }
    n
}
