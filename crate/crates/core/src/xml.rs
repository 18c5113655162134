//! Minimal canonical XML writer shared by the IR and knowledge-base formats:
//! two-space indentation, LF line endings, attributes in the order given.

use std::fmt::Write;

pub(crate) fn escape_attr(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\n' => out.push_str("&#10;"),
            '\r' => out.push_str("&#13;"),
            '\t' => out.push_str("&#9;"),
            c => out.push(c),
        }
    }
    out
}

pub(crate) fn escape_text(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '\r' => out.push_str("&#13;"),
            c => out.push(c),
        }
    }
    out
}

#[derive(Default)]
pub(crate) struct XmlWriter {
    out: String,
    depth: usize,
}

impl XmlWriter {
    pub fn new() -> Self {
        Self::default()
    }

    fn start_line(&mut self) {
        if !self.out.is_empty() {
            self.out.push('\n');
        }
        for _ in 0..self.depth {
            self.out.push_str("  ");
        }
    }

    fn tag(&mut self, name: &str, attrs: &[(&str, &str)]) {
        self.start_line();
        self.out.push('<');
        self.out.push_str(name);
        for (k, v) in attrs {
            let _ = write!(self.out, " {k}=\"{}\"", escape_attr(v));
        }
    }

    pub fn open(&mut self, name: &str, attrs: &[(&str, &str)]) {
        self.tag(name, attrs);
        self.out.push('>');
        self.depth += 1;
    }

    pub fn close(&mut self, name: &str) {
        self.depth -= 1;
        self.start_line();
        let _ = write!(self.out, "</{name}>");
    }

    pub fn empty(&mut self, name: &str, attrs: &[(&str, &str)]) {
        self.tag(name, attrs);
        self.out.push_str("/>");
    }

    pub fn text_element(&mut self, name: &str, attrs: &[(&str, &str)], text: &str) {
        self.tag(name, attrs);
        let _ = write!(self.out, ">{}</{name}>", escape_text(text));
    }

    pub fn finish(self) -> String {
        self.out
    }
}

/// Text content of an element, concatenating text and CDATA children.
pub(crate) fn element_text(node: roxmltree::Node<'_, '_>) -> String {
    node.children()
        .filter(|c| c.is_text())
        .filter_map(|c| c.text())
        .collect()
}

/// Element children, rejecting stray non-whitespace text.
pub(crate) fn element_children<'a, 'i>(
    node: roxmltree::Node<'a, 'i>,
) -> Result<Vec<roxmltree::Node<'a, 'i>>, String> {
    let mut out = Vec::new();
    for c in node.children() {
        if c.is_element() {
            out.push(c);
        } else if c.is_text() && !c.text().unwrap_or("").trim().is_empty() {
            return Err(format!("unexpected text {:?}", c.text().unwrap_or("").trim()));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn writer_layout() {
        let mut w = XmlWriter::new();
        w.open("A", &[("x", "1"), ("y", "a\"b")]);
        w.empty("B", &[]);
        w.text_element("C", &[], "1 < 2 & 3");
        w.close("A");
        assert_eq!(
            w.finish(),
            "<A x=\"1\" y=\"a&quot;b\">\n  <B/>\n  <C>1 &lt; 2 &amp; 3</C>\n</A>"
        );
    }

    #[test]
    fn escaped_values_survive_a_parser() {
        let raw = "tab\there\nnew \"q\" <&> 'a'\r";
        let mut w = XmlWriter::new();
        w.open("R", &[("v", raw)]);
        w.text_element("T", &[], raw);
        w.close("R");
        let xml = w.finish();
        let doc = roxmltree::Document::parse(&xml).unwrap();
        let root = doc.root_element();
        assert_eq!(root.attribute("v"), Some(raw));
        let t = root.children().find(|c| c.is_element()).unwrap();
        assert_eq!(element_text(t), raw);
    }
}
