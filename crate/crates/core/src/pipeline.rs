//! Source text to IR in one step, with file-qualified diagnostics.

use std::fmt;

use crate::ir::{emit_ir, load_ir, IrDocument};
use crate::lexer::{tokenize, LexError};
use crate::parser::{parse, ParseError};

/// A lex or parse failure for one file. Each diagnostic renders as
/// `file:line:col: message`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FrontendError {
    Lex { file: String, error: LexError },
    Parse { file: String, errors: Vec<ParseError> },
}

impl FrontendError {
    /// `(line, col, message)` for every diagnostic.
    pub fn diagnostics(&self) -> Vec<(u32, u32, String)> {
        match self {
            FrontendError::Lex { error, .. } => vec![(error.line, error.col, error.message.clone())],
            FrontendError::Parse { errors, .. } => errors
                .iter()
                .map(|e| (e.line, e.col, format!("expected {}, found {}", e.expected, e.found)))
                .collect(),
        }
    }

    pub fn file(&self) -> &str {
        match self {
            FrontendError::Lex { file, .. } | FrontendError::Parse { file, .. } => file,
        }
    }
}

impl fmt::Display for FrontendError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (line, col, msg)) in self.diagnostics().into_iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{}:{line}:{col}: {msg}", self.file())?;
        }
        Ok(())
    }
}

impl std::error::Error for FrontendError {}

/// Lex and parse `source`, recording `file_path` in the document.
pub fn source_to_ir(file_path: &str, source: &str) -> Result<IrDocument, FrontendError> {
    let tokens = tokenize(source).map_err(|error| FrontendError::Lex {
        file: file_path.to_string(),
        error,
    })?;
    let tree = parse(&tokens).map_err(|e| FrontendError::Parse {
        file: file_path.to_string(),
        errors: e.0,
    })?;
    Ok(IrDocument {
        file_path: file_path.to_string(),
        tree,
    })
}

/// Canonical IR XML for `source`.
pub fn source_to_ir_xml(file_path: &str, source: &str) -> Result<String, FrontendError> {
    let doc = source_to_ir(file_path, source)?;
    Ok(emit_ir(&doc.tree, &doc.file_path))
}

/// Reload IR XML produced by [`source_to_ir_xml`].
pub fn reload(xml: &str) -> Result<IrDocument, crate::ir::IrSchemaError> {
    load_ir(xml)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagnostics_carry_file_line_col() {
        let err = source_to_ir("a.cs", "class C {\n  void M() { x = ; }\n}").unwrap_err();
        let text = err.to_string();
        assert!(text.starts_with("a.cs:2:"), "{text}");
        let err = source_to_ir("b.cs", "class C { string s = \"open").unwrap_err();
        assert!(matches!(err, FrontendError::Lex { .. }));
        assert!(err.to_string().starts_with("b.cs:1:"));
    }

    #[test]
    fn xml_round_trip() {
        let xml = source_to_ir_xml("a.cs", "namespace N { class C { void M() { M(); } } }").unwrap();
        let doc = reload(&xml).unwrap();
        assert_eq!(doc.to_xml(), xml);
    }
}
