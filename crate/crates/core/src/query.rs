//! Read-only queries over a knowledge base: checkbox visibility, trace-tree
//! expansion, attribute summaries and column-level reverse traceability.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::kb::{links, types, Accessibility, KnowledgeBase, LinkObject};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QueryError {
    #[error("unknown object {0:?}")]
    UnknownObject(String),
    #[error("unknown knowledge type {0:?}")]
    UnknownType(String),
    #[error("unknown link type {0:?}")]
    UnknownLinkType(String),
    #[error("not expandable: {0}")]
    NotExpandable(String),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Selection {
    pub checked_ids: BTreeSet<String>,
    /// `None` enables every link type.
    pub enabled_link_types: Option<BTreeSet<String>>,
    pub max_depth: Option<u32>,
}

impl Selection {
    pub fn checking<I, S>(ids: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Selection {
            checked_ids: ids.into_iter().map(Into::into).collect(),
            ..Default::default()
        }
    }

    fn enables(&self, link_type: &str) -> bool {
        self.enabled_link_types.as_ref().is_none_or(|s| s.contains(link_type))
    }
}

pub type VisibleSet = BTreeMap<String, BTreeSet<String>>;

fn check_link_types(kb: &KnowledgeBase, enabled: Option<&BTreeSet<String>>) -> Result<(), QueryError> {
    for t in enabled.into_iter().flatten() {
        if !kb.has_link_type(t) {
            return Err(QueryError::UnknownLinkType(t.clone()));
        }
    }
    Ok(())
}

/// Objects related to any checked object through enabled links, followed in
/// either direction, within `max_depth` hops. An empty selection shows
/// everything. Every knowledge type appears as a key.
pub fn visible_set(kb: &KnowledgeBase, selection: &Selection) -> Result<VisibleSet, QueryError> {
    check_link_types(kb, selection.enabled_link_types.as_ref())?;
    for id in &selection.checked_ids {
        if !kb.contains_object(id) {
            return Err(QueryError::UnknownObject(id.clone()));
        }
    }

    let mut out: VisibleSet = kb.types().iter().map(|t| (t.id.clone(), BTreeSet::new())).collect();
    let mut add = |id: &str| {
        let o = kb.object(id).expect("reachable objects exist");
        out.entry(o.type_id.clone()).or_default().insert(o.id.clone());
    };

    if selection.checked_ids.is_empty() {
        kb.objects().for_each(|o| add(&o.id));
        return Ok(out);
    }

    let mut seen: BTreeSet<&str> = BTreeSet::new();
    let mut queue: VecDeque<(&str, u32)> = VecDeque::new();
    for id in &selection.checked_ids {
        seen.insert(id);
        queue.push_back((id, 0));
    }
    while let Some((id, depth)) = queue.pop_front() {
        if selection.max_depth.is_some_and(|d| depth >= d) {
            continue;
        }
        let next = kb
            .outgoing(id)
            .filter(|l| selection.enables(&l.link_type))
            .map(|l| l.child.as_str())
            .chain(kb.incoming(id).filter(|l| selection.enables(&l.link_type)).map(|l| l.parent.as_str()));
        for n in next {
            if seen.insert(n) {
                queue.push_back((n, depth + 1));
            }
        }
    }
    seen.into_iter().for_each(add);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NodeKind {
    Declaration,
    CallEntry,
    UseEntry,
    NewEntry,
    ParamEntry,
}

impl NodeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NodeKind::Declaration => "Declaration",
            NodeKind::CallEntry => "CallEntry",
            NodeKind::UseEntry => "UseEntry",
            NodeKind::NewEntry => "NewEntry",
            NodeKind::ParamEntry => "ParamEntry",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TraceTreeNode {
    pub label: String,
    pub object_id: Option<String>,
    pub node_kind: NodeKind,
    pub same_class_call: bool,
    pub expandable: bool,
    pub cyclic: bool,
    pub seq: Option<u32>,
    pub access: Accessibility,
    pub type_id: String,
}

const BODY_LINKS: [&str; 4] = [links::CALLS, links::READS, links::WRITES, links::INSTANTIATES];

fn has_body(type_id: &str) -> bool {
    matches!(type_id, types::METHOD | types::CONSTRUCTOR | types::PROPERTY)
}

fn class_of<'a>(kb: &'a KnowledgeBase, id: &str) -> Option<&'a str> {
    kb.container_of(id)
        .filter(|c| kb.object(c).is_some_and(|o| o.type_id == types::CLASS))
}

/// Outgoing links of `id` in the order they are shown when it is expanded.
fn ordered_links<'a>(kb: &'a KnowledgeBase, id: &str) -> Vec<&'a LinkObject> {
    let o = kb.object(id).expect("caller checks existence");
    let by_seq = |t: &str| {
        let mut v: Vec<&LinkObject> = kb.outgoing(id).filter(|l| l.link_type == t).collect();
        v.sort_by(|a, b| a.seq.cmp(&b.seq).then_with(|| a.child.cmp(&b.child)));
        v
    };
    let mut out: Vec<&LinkObject>;
    let shown: &[&str] = if has_body(&o.type_id) {
        out = by_seq(links::HAS_PARAMETER);
        let mut body: Vec<&LinkObject> = kb
            .outgoing(id)
            .filter(|l| BODY_LINKS.contains(&l.link_type.as_str()) && l.seq.is_some())
            .collect();
        body.sort_by_key(|l| l.seq);
        out.extend(body);
        &[links::HAS_PARAMETER, links::CONTAINS]
    } else {
        out = by_seq(links::CONTAINS);
        &[links::CONTAINS]
    };
    out.extend(kb.outgoing(id).filter(|l| {
        !shown.contains(&l.link_type.as_str()) && !(has_body(&o.type_id) && BODY_LINKS.contains(&l.link_type.as_str()) && l.seq.is_some())
    }));
    out
}

fn node_for(kb: &KnowledgeBase, owner: &str, owner_type: &str, link: &LinkObject, ancestors: &[&str]) -> TraceTreeNode {
    let target = kb.object(&link.child).expect("links reference existing objects");
    let body = has_body(owner_type);
    let kind = match link.link_type.as_str() {
        links::HAS_PARAMETER if body => NodeKind::ParamEntry,
        links::CALLS if body && link.seq.is_some() => NodeKind::CallEntry,
        links::READS | links::WRITES if body && link.seq.is_some() => NodeKind::UseEntry,
        links::INSTANTIATES if body && link.seq.is_some() => NodeKind::NewEntry,
        _ => NodeKind::Declaration,
    };
    let same_class_call = kind == NodeKind::CallEntry
        && class_of(kb, owner).is_some_and(|c| class_of(kb, &target.id) == Some(c));
    let label = match kind {
        NodeKind::ParamEntry => target.name.clone(),
        NodeKind::CallEntry if same_class_call => format!("Calls::{}", target.name),
        NodeKind::CallEntry => match kb.container_of(&target.id).and_then(|c| kb.object(c)) {
            Some(c) if c.type_id == types::CLASS => format!("{}.{}", c.name, target.name),
            _ => target.name.clone(),
        },
        NodeKind::UseEntry if link.link_type == links::READS => format!("{} (read)", target.name),
        NodeKind::UseEntry => format!("{} (write)", target.name),
        NodeKind::NewEntry => format!("new {}", target.name),
        NodeKind::Declaration if link.link_type == links::CONTAINS => target.name.clone(),
        NodeKind::Declaration => format!("{}::{}", link.link_type, target.name),
    };
    let cyclic = ancestors.contains(&target.id.as_str());
    let expandable = !cyclic && !target.external && !ordered_links(kb, &target.id).is_empty();
    TraceTreeNode {
        label,
        object_id: Some(target.id.clone()),
        node_kind: kind,
        same_class_call,
        expandable,
        cyclic,
        seq: link.seq,
        access: target.access,
        type_id: target.type_id.clone(),
    }
}

fn children(kb: &KnowledgeBase, id: &str, ancestors: &[&str]) -> Vec<TraceTreeNode> {
    let owner_type = &kb.object(id).expect("caller checks existence").type_id;
    ordered_links(kb, id)
        .into_iter()
        .map(|l| node_for(kb, id, owner_type, l, ancestors))
        .collect()
}

/// Children of the node reached by following `path` from its root object.
/// Each step must name an expandable child of the previous expansion.
pub fn expand(kb: &KnowledgeBase, path: &[String]) -> Result<Vec<TraceTreeNode>, QueryError> {
    let Some(root) = path.first() else {
        return Err(QueryError::NotExpandable("empty path".to_string()));
    };
    let root_obj = kb.object(root).ok_or_else(|| QueryError::UnknownObject(root.clone()))?;
    if root_obj.external {
        return Err(QueryError::NotExpandable(format!("{root} was not loaded")));
    }
    let mut ancestors: Vec<&str> = vec![root];
    let mut nodes = children(kb, root, &ancestors);
    for step in &path[1..] {
        let Some(node) = nodes.iter().find(|n| n.object_id.as_deref() == Some(step.as_str())) else {
            if !kb.contains_object(step) {
                return Err(QueryError::UnknownObject(step.clone()));
            }
            return Err(QueryError::NotExpandable(format!("{step} is not a child of {}", ancestors.last().unwrap())));
        };
        if !node.expandable {
            let why = if node.cyclic {
                "repeats an ancestor"
            } else if kb.object(step).is_some_and(|o| o.external) {
                "was not loaded"
            } else {
                "has no children"
            };
            return Err(QueryError::NotExpandable(format!("{step} {why}")));
        }
        ancestors.push(step);
        nodes = children(kb, step, &ancestors);
    }
    Ok(nodes)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ObjectAttributes {
    pub creates: Vec<String>,
    pub calls: Vec<String>,
    pub called_by: Vec<String>,
    pub reads: Vec<String>,
    pub writes: Vec<String>,
}

pub fn object_attributes(kb: &KnowledgeBase, id: &str) -> Result<ObjectAttributes, QueryError> {
    if !kb.contains_object(id) {
        return Err(QueryError::UnknownObject(id.to_string()));
    }
    let out = |t: &str| -> Vec<String> {
        let s: BTreeSet<&String> = kb.outgoing(id).filter(|l| l.link_type == t).map(|l| &l.child).collect();
        s.into_iter().cloned().collect()
    };
    let callers: BTreeSet<&String> = kb
        .incoming(id)
        .filter(|l| l.link_type == links::CALLS)
        .map(|l| &l.parent)
        .collect();
    Ok(ObjectAttributes {
        creates: out(links::INSTANTIATES),
        calls: out(links::CALLS),
        called_by: callers.into_iter().cloned().collect(),
        reads: out(links::READS),
        writes: out(links::WRITES),
    })
}

/// Objects of `from_type` with an enabled link into any of `targets`.
pub fn reverse_related(
    kb: &KnowledgeBase,
    targets: &BTreeSet<String>,
    from_type: &str,
    enabled_link_types: Option<&BTreeSet<String>>,
) -> Result<BTreeSet<String>, QueryError> {
    if !kb.has_type(from_type) {
        return Err(QueryError::UnknownType(from_type.to_string()));
    }
    check_link_types(kb, enabled_link_types)?;
    let mut out = BTreeSet::new();
    for t in targets {
        if !kb.contains_object(t) {
            return Err(QueryError::UnknownObject(t.clone()));
        }
        for l in kb.incoming(t) {
            if enabled_link_types.is_some_and(|e| !e.contains(&l.link_type)) {
                continue;
            }
            if kb.object(&l.parent).is_some_and(|p| p.type_id == from_type) {
                out.insert(l.parent.clone());
            }
        }
    }
    Ok(out)
}
