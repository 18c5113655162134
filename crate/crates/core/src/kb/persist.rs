//! Canonical XML form of a knowledge base.
//!
//! ```text
//! <KnowledgeBase version="1">
//!   <KnowledgeTypes><KnowledgeType id order/>...</KnowledgeTypes>
//!   <LinkTypes><LinkType id/>...</LinkTypes>
//!   <Objects><Object id type name access external version>
//!     <Description/> <Note level/>* <Doc href anchor?/>*
//!   </Object>...</Objects>
//!   <Links><Link type parent child seq?/>...</Links>
//! </KnowledgeBase>
//! ```
//!
//! Objects are sorted by id and links by `(type, parent, child, seq)`;
//! empty `Objects`/`Links` sections are omitted. The change log is not stored.

use thiserror::Error;

use super::{Accessibility, KbError, KnowledgeBase, NoteLevel};
use crate::xml::{element_children, element_text, XmlWriter};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid knowledge base XML: {0}")]
pub struct KbSchemaError(pub String);

const FORMAT_VERSION: &str = "1";

impl KnowledgeBase {
    pub fn to_xml(&self) -> String {
        let mut w = XmlWriter::new();
        w.open("KnowledgeBase", &[("version", FORMAT_VERSION)]);

        w.open("KnowledgeTypes", &[]);
        for t in &self.types {
            w.empty("KnowledgeType", &[("id", &t.id), ("order", &t.display_order.to_string())]);
        }
        w.close("KnowledgeTypes");

        w.open("LinkTypes", &[]);
        for t in &self.link_types {
            w.empty("LinkType", &[("id", &t.id)]);
        }
        w.close("LinkTypes");

        if !self.objects.is_empty() {
            w.open("Objects", &[]);
            for o in self.objects.values() {
                let attrs = [
                    ("id", o.id.as_str()),
                    ("type", &o.type_id),
                    ("name", &o.name),
                    ("access", o.access.as_str()),
                    ("external", if o.external { "true" } else { "false" }),
                    ("version", &o.version),
                ];
                if o.description.is_empty() && o.notes.is_empty() && o.doc_links.is_empty() {
                    w.empty("Object", &attrs);
                    continue;
                }
                w.open("Object", &attrs);
                if !o.description.is_empty() {
                    w.text_element("Description", &[], &o.description);
                }
                for n in &o.notes {
                    w.text_element("Note", &[("level", n.level.as_str())], &n.text);
                }
                for d in &o.doc_links {
                    let mut attrs = vec![("href", d.href.as_str())];
                    if let Some(a) = &d.anchor {
                        attrs.push(("anchor", a));
                    }
                    w.empty("Doc", &attrs);
                }
                w.close("Object");
            }
            w.close("Objects");
        }

        if !self.links.is_empty() {
            w.open("Links", &[]);
            for l in &self.links {
                let seq = l.seq.map(|s| s.to_string());
                let mut attrs = vec![("type", l.link_type.as_str()), ("parent", &l.parent), ("child", &l.child)];
                if let Some(s) = &seq {
                    attrs.push(("seq", s));
                }
                w.empty("Link", &attrs);
            }
            w.close("Links");
        }

        w.close("KnowledgeBase");
        w.finish()
    }

    /// Rebuild a knowledge base from [`KnowledgeBase::to_xml`] output. The
    /// change log starts empty.
    pub fn from_xml(xml: &str) -> Result<Self, KbSchemaError> {
        let doc = roxmltree::Document::parse(xml).map_err(|e| KbSchemaError(format!("malformed XML: {e}")))?;
        let root = doc.root_element();
        if root.tag_name().name() != "KnowledgeBase" {
            return Err(KbSchemaError(format!("root element must be `KnowledgeBase`, found `{}`", root.tag_name().name())));
        }
        check_attrs(root, &["version"], &[])?;
        if root.attribute("version") != Some(FORMAT_VERSION) {
            return Err(KbSchemaError(format!("unsupported version `{}`", root.attribute("version").unwrap_or(""))));
        }

        let mut kb = KnowledgeBase::empty();
        let sections = children(root)?;
        let expected = ["KnowledgeTypes", "LinkTypes", "Objects", "Links"];
        let mut next = 0;
        for section in sections {
            let name = section.tag_name().name();
            let Some(pos) = expected.iter().position(|e| *e == name) else {
                return Err(KbSchemaError(format!("unknown element `{name}`")));
            };
            if pos < next {
                return Err(KbSchemaError(format!("section `{name}` out of order or repeated")));
            }
            next = pos + 1;
            check_attrs(section, &[], &[])?;
            match name {
                "KnowledgeTypes" => {
                    for t in children_named(section, "KnowledgeType")? {
                        check_attrs(t, &["id", "order"], &[])?;
                        let order = t.attribute("order").unwrap_or_default();
                        let order: i64 = order.parse().map_err(|_| KbSchemaError(format!("invalid order `{order}`")))?;
                        kb.register_type(t.attribute("id").unwrap_or_default(), Some(order)).map_err(wrap)?;
                    }
                }
                "LinkTypes" => {
                    for t in children_named(section, "LinkType")? {
                        check_attrs(t, &["id"], &[])?;
                        kb.register_link_type(t.attribute("id").unwrap_or_default()).map_err(wrap)?;
                    }
                }
                "Objects" => {
                    for o in children_named(section, "Object")? {
                        load_object(&mut kb, o)?;
                    }
                }
                "Links" => {
                    for l in children_named(section, "Link")? {
                        check_attrs(l, &["type", "parent", "child"], &["seq"])?;
                        let seq = match l.attribute("seq") {
                            Some(s) => Some(s.parse::<u32>().map_err(|_| KbSchemaError(format!("invalid seq `{s}`")))?),
                            None => None,
                        };
                        kb.add_link(
                            l.attribute("type").unwrap_or_default(),
                            l.attribute("parent").unwrap_or_default(),
                            l.attribute("child").unwrap_or_default(),
                            seq,
                        )
                        .map_err(wrap)?;
                    }
                }
                _ => unreachable!(),
            }
        }
        kb.clear_log();
        Ok(kb)
    }
}

fn load_object(kb: &mut KnowledgeBase, o: roxmltree::Node<'_, '_>) -> Result<(), KbSchemaError> {
    check_attrs(o, &["id", "type", "name", "access", "external", "version"], &[])?;
    let attr = |n: &str| o.attribute(n).unwrap_or_default();
    let access: Accessibility = attr("access").parse().map_err(KbSchemaError)?;
    let external = match attr("external") {
        "true" => true,
        "false" => false,
        other => return Err(KbSchemaError(format!("invalid external flag `{other}`"))),
    };
    if external && access != Accessibility::Unknown {
        return Err(KbSchemaError(format!("external object `{}` must have access `unknown`", attr("id"))));
    }
    let id = attr("id");
    kb.add_object(attr("type"), id, attr("name"), access, external).map_err(wrap)?;

    let obj = kb.objects.get_mut(id).expect("just added");
    obj.version = attr("version").to_string();
    let mut seen_desc = false;
    for (i, c) in children(o)?.into_iter().enumerate() {
        match c.tag_name().name() {
            "Description" if i == 0 && !seen_desc => {
                check_attrs(c, &[], &[])?;
                seen_desc = true;
                obj.description = element_text(c);
            }
            "Note" => {
                check_attrs(c, &["level"], &[])?;
                let level: NoteLevel = c.attribute("level").unwrap_or_default().parse().map_err(KbSchemaError)?;
                obj.notes.push(super::Note { level, text: element_text(c) });
            }
            "Doc" => {
                check_attrs(c, &["href"], &["anchor"])?;
                obj.doc_links.push(super::DocLink {
                    href: c.attribute("href").unwrap_or_default().to_string(),
                    anchor: c.attribute("anchor").map(str::to_string),
                });
            }
            other => return Err(KbSchemaError(format!("unexpected element `{other}` in object `{id}`"))),
        }
    }
    // Validate the way the mutation API would.
    let o = &kb.objects[id];
    if o.notes.iter().any(|n| n.text.trim().is_empty()) || o.doc_links.iter().any(|d| d.href.trim().is_empty()) {
        return Err(KbSchemaError(format!("object `{id}` has an empty note or doc link")));
    }
    Ok(())
}

fn wrap(e: KbError) -> KbSchemaError {
    KbSchemaError(e.to_string())
}

fn check_attrs(node: roxmltree::Node<'_, '_>, required: &[&str], optional: &[&str]) -> Result<(), KbSchemaError> {
    let tag = node.tag_name().name();
    for a in node.attributes() {
        if !(required.contains(&a.name()) || optional.contains(&a.name())) {
            return Err(KbSchemaError(format!("unknown attribute `{}` on `{tag}`", a.name())));
        }
    }
    for r in required {
        if node.attribute(*r).is_none() {
            return Err(KbSchemaError(format!("`{tag}` is missing attribute `{r}`")));
        }
    }
    Ok(())
}

fn children<'a, 'i>(node: roxmltree::Node<'a, 'i>) -> Result<Vec<roxmltree::Node<'a, 'i>>, KbSchemaError> {
    element_children(node).map_err(KbSchemaError)
}

fn children_named<'a, 'i>(node: roxmltree::Node<'a, 'i>, name: &str) -> Result<Vec<roxmltree::Node<'a, 'i>>, KbSchemaError> {
    let kids = children(node)?;
    if let Some(bad) = kids.iter().find(|k| k.tag_name().name() != name) {
        return Err(KbSchemaError(format!("unexpected element `{}` in `{}`", bad.tag_name().name(), node.tag_name().name())));
    }
    Ok(kids)
}

#[cfg(test)]
mod tests {
    use super::super::{links, types, Annotation};
    use super::*;

    #[test]
    fn empty_kb_has_only_type_sections() {
        let xml = KnowledgeBase::new().to_xml();
        assert!(xml.starts_with("<KnowledgeBase version=\"1\">\n  <KnowledgeTypes>\n    <KnowledgeType id=\"Namespace\" order=\"0\"/>"));
        assert!(xml.contains("<LinkTypes>"));
        assert!(!xml.contains("<Objects"));
        assert!(!xml.contains("<Links>"));
        assert!(xml.ends_with("</KnowledgeBase>"));
        assert_eq!(KnowledgeBase::from_xml(&xml).unwrap(), KnowledgeBase::new());
    }

    fn sample() -> KnowledgeBase {
        let mut kb = KnowledgeBase::new();
        kb.register_type("Requirement", None).unwrap();
        kb.add_object(types::CLASS, "N.C", "C", Accessibility::Public, false).unwrap();
        kb.add_object(types::METHOD, "N.C.M(int)", "M", Accessibility::Private, false).unwrap();
        kb.add_object(types::METHOD, "extern:?.F/0", "F", Accessibility::Unknown, true).unwrap();
        kb.add_object("Requirement", "REQ-1", "Zoom <fast> & \"smooth\"", Accessibility::None, false).unwrap();
        kb.add_link(links::CONTAINS, "N.C", "N.C.M(int)", Some(1)).unwrap();
        kb.add_link(links::CALLS, "N.C.M(int)", "extern:?.F/0", Some(2)).unwrap();
        kb.add_link(links::CALLS, "N.C.M(int)", "extern:?.F/0", Some(1)).unwrap();
        kb.add_link(links::RELATED, "REQ-1", "N.C.M(int)", None).unwrap();
        kb.annotate("N.C.M(int)", Annotation::SetDescription("Zooms.\nTwice.".into())).unwrap();
        kb.annotate("N.C.M(int)", Annotation::SetVersion("1.2".into())).unwrap();
        kb.annotate("N.C.M(int)", Annotation::AddNote { level: NoteLevel::Solved, text: "fixed in 1.2".into() }).unwrap();
        kb.annotate("N.C.M(int)", Annotation::AddDocLink { href: "design.docx".into(), anchor: Some("zoom".into()) }).unwrap();
        kb.annotate("N.C.M(int)", Annotation::AddDocLink { href: "http://x/y?a=1&b=2".into(), anchor: None }).unwrap();
        kb
    }

    #[test]
    fn round_trip_and_byte_stability() {
        let kb = sample();
        let xml = kb.to_xml();
        let restored = KnowledgeBase::from_xml(&xml).unwrap();
        assert_eq!(restored, kb);
        assert!(restored.events_since(0).is_empty());
        assert_eq!(restored.to_xml(), xml);
        // Links sorted, seq-less before seq'd within a triple.
        let calls: Vec<&str> = xml.lines().filter(|l| l.contains("<Link type=\"Calls\"")).collect();
        assert!(calls[0].contains("seq=\"1\"") && calls[1].contains("seq=\"2\""));
    }

    #[test]
    fn dangling_link_is_rejected() {
        let xml = KnowledgeBase::new().to_xml().replace(
            "</KnowledgeBase>",
            "  <Links>\n    <Link type=\"Calls\" parent=\"ghost\" child=\"ghost2\"/>\n  </Links>\n</KnowledgeBase>",
        );
        let err = KnowledgeBase::from_xml(&xml).unwrap_err();
        assert!(err.0.contains("ghost"), "{err}");
    }

    #[test]
    fn unknown_type_is_rejected() {
        let xml = KnowledgeBase::new().to_xml().replace(
            "</KnowledgeBase>",
            "  <Objects>\n    <Object id=\"r\" type=\"Requirement\" name=\"r\" access=\"none\" external=\"false\" version=\"\"/>\n  </Objects>\n</KnowledgeBase>",
        );
        assert!(KnowledgeBase::from_xml(&xml).unwrap_err().0.contains("Requirement"));
    }

    #[test]
    fn malformed_inputs() {
        for xml in [
            "<KnowledgeBase>",
            "<Other/>",
            "<KnowledgeBase version=\"2\"/>",
            "<KnowledgeBase version=\"1\"><Links/><Objects/></KnowledgeBase>",
            "<KnowledgeBase version=\"1\"><Stuff/></KnowledgeBase>",
            "<KnowledgeBase version=\"1\"><KnowledgeTypes><KnowledgeType id=\"A\" order=\"x\"/></KnowledgeTypes></KnowledgeBase>",
            "<KnowledgeBase version=\"1\"><KnowledgeTypes><KnowledgeType id=\"A\" order=\"1\"/></KnowledgeTypes><Objects><Object id=\"o\" type=\"A\" name=\"o\" access=\"public\" external=\"true\" version=\"\"/></Objects></KnowledgeBase>",
        ] {
            assert!(KnowledgeBase::from_xml(xml).is_err(), "{xml}");
        }
    }
}
