//! Recursive-descent parser for the supported C# subset.
//!
//! Declarations are kept as structure. Statement bodies are flattened: control
//! flow contributes nothing, but every variable read, assignment target write,
//! call, object creation and local declaration inside it becomes a
//! [`BodyEvent`] in evaluation order.
//!
//! Errors are collected with panic-mode recovery: after a failure the parser
//! skips to the next `;` (or a balanced `{ .. }` block, or an enclosing `}`)
//! and continues.

use std::fmt;

use thiserror::Error;

use crate::lexer::{Token, TokenKind};
use crate::syntax::*;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: expected {expected}, found {found}")]
pub struct ParseError {
    pub line: u32,
    pub col: u32,
    pub expected: String,
    pub found: String,
}

/// All errors collected from one parse.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseErrors(pub Vec<ParseError>);

impl fmt::Display for ParseErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

/// Parse a token stream produced by [`crate::lexer::tokenize`].
pub fn parse(tokens: &[Token]) -> Result<SyntaxTree, ParseErrors> {
    let (tree, errors) = parse_recovering(tokens);
    if errors.is_empty() {
        Ok(tree)
    } else {
        Err(ParseErrors(errors))
    }
}

/// Parse, returning whatever could be recovered alongside every error.
pub fn parse_recovering(tokens: &[Token]) -> (SyntaxTree, Vec<ParseError>) {
    let mut p = Parser::new(tokens);
    let tree = p.compilation_unit();
    (tree, p.errors)
}

type PResult<T> = Result<T, ParseError>;

const ACCESS_WORDS: &[&str] = &["public", "private", "protected", "internal"];
const CONTEXTUAL_MODIFIERS: &[&str] = &[
    "const", "override", "virtual", "abstract", "sealed", "extern", "partial", "volatile",
];
const KEYWORD_TYPES: &[&str] = &[
    "int", "long", "float", "double", "bool", "string", "char", "object",
];
const ASSIGN_OPS: &[&str] = &["=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>="];
const UNSUPPORTED_TYPE_WORDS: &[&str] = &["struct", "enum", "interface", "record"];

struct CommentInfo {
    /// Index of the first code token after the comment.
    before_token: usize,
    line: u32,
    end_line: u32,
    /// A code token precedes the comment on its first line.
    trailing: bool,
    text: String,
}

#[derive(Default)]
struct Modifiers {
    access: Option<Accessibility>,
}

struct Parser<'t> {
    toks: Vec<&'t Token>,
    comments: Vec<CommentInfo>,
    pos: usize,
    errors: Vec<ParseError>,
    eof: (u32, u32),
}

// ---------------------------------------------------------------------------
// Expressions
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
enum Expr {
    Name(String),
    /// A built-in type used as an expression head, e.g. `string.Format`.
    TypeName(String),
    This,
    Base,
    Literal,
    Member(Box<Expr>, String),
    Call(Box<Expr>, Vec<Arg>),
    Index(Box<Expr>, Vec<Expr>),
    New { type_name: String, args: Vec<Arg> },
    NewArray { type_name: String, dims: Vec<Expr>, init: Vec<Expr> },
    Assign { compound: bool, target: Box<Expr>, value: Box<Expr> },
    IncDec(Box<Expr>),
    Unary(Box<Expr>),
    Binary(Box<Expr>, Box<Expr>),
    Ternary(Box<Expr>, Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ArgMode {
    Value,
    Ref,
    Out,
}

#[derive(Debug, Clone)]
struct Arg {
    mode: ArgMode,
    expr: Expr,
}

/// Collects events for one body in evaluation order.
#[derive(Default)]
struct Emitter {
    events: Vec<EventKind>,
}

impl Emitter {
    fn finish(self) -> Body {
        Body {
            events: self
                .events
                .into_iter()
                .enumerate()
                .map(|(i, kind)| BodyEvent {
                    seq: i as u32 + 1,
                    kind,
                })
                .collect(),
        }
    }

    fn read(&mut self, e: &Expr) {
        match e {
            Expr::Name(n) => self.events.push(EventKind::read(n)),
            Expr::TypeName(_) | Expr::This | Expr::Base | Expr::Literal => {}
            Expr::Member(obj, name) => match obj.as_ref() {
                Expr::This | Expr::Base => self.events.push(EventKind::read(&format!("this.{name}"))),
                _ => self.read(obj),
            },
            Expr::Call(callee, args) => self.call(callee, args),
            Expr::Index(obj, idx) => {
                self.read(obj);
                idx.iter().for_each(|i| self.read(i));
            }
            Expr::New { type_name, args } => {
                self.args(args);
                self.events.push(EventKind::new_object(type_name, args.len() as u32));
            }
            Expr::NewArray { type_name, dims, init } => {
                dims.iter().for_each(|d| self.read(d));
                init.iter().for_each(|d| self.read(d));
                self.events
                    .push(EventKind::new_object(&format!("{type_name}[]"), dims.len() as u32));
            }
            Expr::Assign {
                compound,
                target,
                value,
            } => {
                self.target_prefix(target);
                if *compound {
                    self.target_use(target, UseKind::Read);
                }
                self.read(value);
                self.target_use(target, UseKind::Write);
            }
            Expr::IncDec(target) => {
                self.target_prefix(target);
                self.target_use(target, UseKind::Read);
                self.target_use(target, UseKind::Write);
            }
            Expr::Unary(e) => self.read(e),
            Expr::Binary(l, r) => {
                self.read(l);
                self.read(r);
            }
            Expr::Ternary(c, a, b) => {
                self.read(c);
                self.read(a);
                self.read(b);
            }
        }
    }

    fn args(&mut self, args: &[Arg]) {
        for a in args {
            match a.mode {
                ArgMode::Value => self.read(&a.expr),
                ArgMode::Ref => {
                    self.target_prefix(&a.expr);
                    self.target_use(&a.expr, UseKind::Read);
                    self.target_use(&a.expr, UseKind::Write);
                }
                ArgMode::Out => {
                    self.target_prefix(&a.expr);
                    self.target_use(&a.expr, UseKind::Write);
                }
            }
        }
    }

    fn call(&mut self, callee: &Expr, args: &[Arg]) {
        let argc = args.len() as u32;
        match callee {
            Expr::Name(n) => {
                self.args(args);
                self.events.push(EventKind::call(None, n, argc));
            }
            Expr::Member(obj, name) => match obj.as_ref() {
                Expr::This => {
                    self.args(args);
                    self.events.push(EventKind::call(None, name, argc));
                }
                Expr::Base => {
                    self.args(args);
                    self.events.push(EventKind::call(Some("base"), name, argc));
                }
                Expr::TypeName(t) => {
                    self.args(args);
                    self.events.push(EventKind::call(Some(t), name, argc));
                }
                other => match simple_path(other) {
                    Some(path) => {
                        let root = path_root(&path).to_string();
                        self.events.push(EventKind::read(&root));
                        self.args(args);
                        self.events.push(EventKind::call(Some(&path), name, argc));
                    }
                    None => {
                        self.read(other);
                        self.args(args);
                        self.events.push(EventKind::call(Some("?"), name, argc));
                    }
                },
            },
            other => {
                self.read(other);
                self.args(args);
            }
        }
    }

    /// Reads that happen inside an assignment target before the store.
    fn target_prefix(&mut self, target: &Expr) {
        match target {
            Expr::Name(_) => {}
            Expr::Member(obj, _) => match obj.as_ref() {
                Expr::This | Expr::Base | Expr::TypeName(_) => {}
                inner => self.target_prefix(inner),
            },
            Expr::Index(obj, idx) => {
                self.target_prefix(obj);
                idx.iter().for_each(|i| self.read(i));
            }
            other => self.read(other),
        }
    }

    fn target_use(&mut self, target: &Expr, kind: UseKind) {
        if let Some(root) = target_root(target) {
            self.events.push(EventKind::Use { name: root, kind });
        }
    }
}

/// `a`, `a.b`, `this.a.b` → dotted path. Member access through `this` or
/// `base` keeps a `this.` prefix so it resolves against fields only.
fn simple_path(e: &Expr) -> Option<String> {
    match e {
        Expr::Name(n) => Some(n.clone()),
        Expr::Member(obj, name) => match obj.as_ref() {
            Expr::This | Expr::Base => Some(format!("this.{name}")),
            inner => simple_path(inner).map(|p| format!("{p}.{name}")),
        },
        _ => None,
    }
}

/// The variable a dotted path starts from: `a` for `a.b.c`, `this.a` for
/// `this.a.b`.
pub fn path_root(path: &str) -> &str {
    let skip = if path.starts_with("this.") { 5 } else { 0 };
    match path[skip..].find('.') {
        Some(i) => &path[..skip + i],
        None => path,
    }
}

/// The variable an assignment to `e` updates.
fn target_root(e: &Expr) -> Option<String> {
    match e {
        Expr::Name(n) => Some(n.clone()),
        Expr::Member(obj, name) => match obj.as_ref() {
            Expr::This | Expr::Base => Some(format!("this.{name}")),
            inner => target_root(inner),
        },
        Expr::Index(obj, _) => target_root(obj),
        _ => None,
    }
}

fn is_lvalue(e: &Expr) -> bool {
    matches!(e, Expr::Name(_) | Expr::Member(..) | Expr::Index(..))
}

// ---------------------------------------------------------------------------
// Parser plumbing
// ---------------------------------------------------------------------------

impl<'t> Parser<'t> {
    fn new(tokens: &'t [Token]) -> Self {
        let mut toks: Vec<&Token> = Vec::new();
        let mut comments = Vec::new();
        let mut last_code_line = 0;
        for t in tokens {
            if t.kind == TokenKind::Comment {
                comments.push(CommentInfo {
                    before_token: toks.len(),
                    line: t.line,
                    end_line: t.end_line(),
                    trailing: !toks.is_empty() && last_code_line == t.line,
                    text: comment_text(&t.lexeme),
                });
            } else {
                last_code_line = t.end_line();
                toks.push(t);
            }
        }
        let eof = tokens
            .last()
            .map(|t| {
                let lines: Vec<&str> = t.lexeme.split('\n').collect();
                let last = lines.last().map(|l| l.chars().count() as u32).unwrap_or(0);
                if lines.len() > 1 {
                    (t.end_line(), last + 1)
                } else {
                    (t.line, t.col + last)
                }
            })
            .unwrap_or((1, 1));
        Self {
            toks,
            comments,
            pos: 0,
            errors: Vec::new(),
            eof,
        }
    }

    fn peek(&self) -> Option<&'t Token> {
        self.toks.get(self.pos).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<&'t Token> {
        self.toks.get(self.pos + offset).copied()
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn advance(&mut self) -> Option<&'t Token> {
        let t = self.peek();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn check_punct(&self, p: &str) -> bool {
        self.peek().is_some_and(|t| t.is_punct(p))
    }

    fn check_op(&self, op: &str) -> bool {
        self.peek().is_some_and(|t| t.is_op(op))
    }

    fn check_kw(&self, kw: &str) -> bool {
        self.peek().is_some_and(|t| t.is_keyword(kw))
    }

    fn check_ident(&self, word: &str) -> bool {
        self.peek().is_some_and(|t| t.is(TokenKind::Identifier, word))
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.check_punct(p) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_op(&mut self, op: &str) -> bool {
        if self.check_op(op) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.check_kw(kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn error_here(&self, expected: impl Into<String>) -> ParseError {
        let (line, col, found) = match self.peek() {
            Some(t) => (t.line, t.col, format!("`{}`", t.lexeme)),
            None => (self.eof.0, self.eof.1, "end of input".to_string()),
        };
        ParseError {
            line,
            col,
            expected: expected.into(),
            found,
        }
    }

    fn unsupported(&self, what: &str) -> ParseError {
        self.error_here(format!("supported syntax ({what} are not supported)"))
    }

    fn expect_punct(&mut self, p: &str) -> PResult<()> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            Err(self.error_here(format!("`{p}`")))
        }
    }

    fn expect_ident(&mut self) -> PResult<String> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Identifier => {
                self.pos += 1;
                Ok(t.lexeme.clone())
            }
            _ => Err(self.error_here("identifier")),
        }
    }

    /// Skip past the construct that failed. Stops after a `;`, after a balanced
    /// `{ .. }` block, or before an unmatched `}`. Guarantees progress past
    /// `start`.
    fn synchronize(&mut self, start: usize) {
        if self.check_punct("#") {
            self.skip_directive();
            return;
        }
        while let Some(t) = self.peek() {
            if t.is_punct(";") {
                self.pos += 1;
                return;
            }
            if t.is_punct("}") {
                break;
            }
            if t.is_punct("{") {
                self.skip_balanced();
                return;
            }
            self.pos += 1;
        }
        if self.pos == start && !self.at_end() {
            self.pos += 1;
        }
    }

    fn skip_balanced(&mut self) {
        let mut depth = 0usize;
        while let Some(t) = self.advance() {
            if t.is_punct("{") {
                depth += 1;
            } else if t.is_punct("}") {
                depth -= 1;
                if depth == 0 {
                    return;
                }
            }
        }
    }

    /// Preprocessor lines are rejected; skip the rest of the line.
    fn skip_directive(&mut self) {
        let line = self.peek().map(|t| t.line).unwrap_or(0);
        while self.peek().is_some_and(|t| t.line == line) {
            self.pos += 1;
        }
    }

    fn reject_directive(&mut self) -> bool {
        if self.check_punct("#") {
            let err = self.unsupported("preprocessor directives");
            self.errors.push(err);
            self.skip_directive();
            true
        } else {
            false
        }
    }

    /// Doc comment for a declaration starting at the current token.
    fn doc_comment(&self) -> Option<String> {
        let first = self.peek()?;
        let attached: Vec<&CommentInfo> = self
            .comments
            .iter()
            .filter(|c| c.before_token == self.pos)
            .collect();
        let mut block: Vec<&CommentInfo> = Vec::new();
        let mut next_line = first.line;
        for c in attached.iter().rev() {
            if c.trailing || !(c.end_line + 1 == next_line || c.end_line == next_line) {
                break;
            }
            if block.is_empty() && c.end_line == next_line {
                // Comment sharing the declaration's line is not a header.
                break;
            }
            block.push(c);
            next_line = c.line;
        }
        if block.is_empty() {
            return None;
        }
        block.reverse();
        let text = block
            .iter()
            .map(|c| c.text.as_str())
            .collect::<Vec<_>>()
            .join("\n");
        let text = text.trim_matches('\n').to_string();
        (!text.trim().is_empty()).then_some(text)
    }
}

fn comment_text(lexeme: &str) -> String {
    if let Some(rest) = lexeme.strip_prefix("//") {
        let rest = rest.trim_start_matches('/');
        return rest.strip_prefix(' ').unwrap_or(rest).trim_end().to_string();
    }
    let inner = lexeme
        .strip_prefix("/*")
        .and_then(|s| s.strip_suffix("*/"))
        .unwrap_or(lexeme);
    let inner = inner.trim_start_matches('*');
    let lines: Vec<String> = inner
        .lines()
        .map(|l| {
            let l = l.trim();
            let l = l.strip_prefix('*').unwrap_or(l);
            l.strip_prefix(' ').unwrap_or(l).trim_end().to_string()
        })
        .collect();
    lines.join("\n").trim_matches('\n').to_string()
}

// ---------------------------------------------------------------------------
// Declarations
// ---------------------------------------------------------------------------

impl<'t> Parser<'t> {
    fn compilation_unit(&mut self) -> SyntaxTree {
        let mut tree = SyntaxTree::default();
        while !self.at_end() {
            let start = self.pos;
            if self.reject_directive() {
                continue;
            }
            let res = if self.check_kw("using") {
                self.using_directive().map(|u| tree.usings.push(u))
            } else {
                self.namespace_member(&mut tree.usings)
                    .map(|m| tree.members.extend(m))
            };
            if let Err(e) = res {
                self.errors.push(e);
                self.synchronize(start);
            }
        }
        tree
    }

    fn using_directive(&mut self) -> PResult<String> {
        self.eat_kw("using");
        if self.check_kw("static") {
            return Err(self.unsupported("`using static` directives"));
        }
        let name = self.qualified_name()?;
        if self.check_op("=") {
            return Err(self.unsupported("using aliases"));
        }
        self.expect_punct(";")?;
        Ok(name)
    }

    fn qualified_name(&mut self) -> PResult<String> {
        let mut name = self.expect_ident()?;
        while self.check_punct(".") && self.peek_at(1).is_some_and(|t| t.kind == TokenKind::Identifier) {
            self.pos += 1;
            name.push('.');
            name.push_str(&self.expect_ident()?);
        }
        Ok(name)
    }

    fn namespace_member(&mut self, usings: &mut Vec<String>) -> PResult<Vec<NamespaceMember>> {
        if self.eat_kw("namespace") {
            let name = self.qualified_name()?;
            self.expect_punct("{")?;
            let mut ns = NamespaceDecl {
                name,
                members: Vec::new(),
            };
            loop {
                if self.eat_punct("}") {
                    break;
                }
                if self.at_end() {
                    return Err(self.error_here("`}`"));
                }
                let start = self.pos;
                if self.reject_directive() {
                    continue;
                }
                let res = if self.check_kw("using") {
                    self.using_directive().map(|u| usings.push(u))
                } else {
                    self.namespace_member(usings).map(|m| ns.members.extend(m))
                };
                if let Err(e) = res {
                    self.errors.push(e);
                    self.synchronize(start);
                }
            }
            return Ok(vec![NamespaceMember::Namespace(ns)]);
        }
        let doc = self.doc_comment();
        let mods = self.modifiers()?;
        let access = mods.access.unwrap_or(Accessibility::None);
        if self.eat_kw("class") {
            let class = self.class_rest(access, doc)?;
            Ok(vec![NamespaceMember::Type(TypeDecl::Class(class))])
        } else if self.eat_kw("delegate") {
            let d = self.delegate_rest(access, doc)?;
            Ok(vec![NamespaceMember::Type(TypeDecl::Delegate(d))])
        } else {
            Err(self.type_start_error())
        }
    }

    fn type_start_error(&self) -> ParseError {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Identifier && UNSUPPORTED_TYPE_WORDS.contains(&t.lexeme.as_str()) => {
                self.unsupported(&format!("`{}` declarations", t.lexeme))
            }
            Some(t) if t.is_punct("[") => self.unsupported("attributes"),
            _ => self.error_here("`class`, `delegate` or `namespace`"),
        }
    }

    fn modifiers(&mut self) -> PResult<Modifiers> {
        let mut mods = Modifiers::default();
        while let Some(t) = self.peek() {
            if t.kind == TokenKind::Keyword && ACCESS_WORDS.contains(&t.lexeme.as_str()) {
                let a: Accessibility = t.lexeme.parse().expect("access keyword");
                mods.access.get_or_insert(a);
                self.pos += 1;
            } else if t.is_keyword("static") || t.is_keyword("readonly") {
                self.pos += 1;
            } else if t.is_keyword("new")
                && self
                    .peek_at(1)
                    .is_some_and(|n| n.kind == TokenKind::Identifier || n.kind == TokenKind::Keyword)
            {
                // member hiding modifier
                self.pos += 1;
            } else if t.kind == TokenKind::Identifier
                && CONTEXTUAL_MODIFIERS.contains(&t.lexeme.as_str())
                && self
                    .peek_at(1)
                    .is_some_and(|n| matches!(n.kind, TokenKind::Identifier | TokenKind::Keyword))
            {
                self.pos += 1;
            } else if t.is(TokenKind::Identifier, "unsafe") {
                return Err(self.unsupported("`unsafe` members"));
            } else if t.is_punct("[") {
                return Err(self.unsupported("attributes"));
            } else {
                break;
            }
        }
        Ok(mods)
    }

    fn class_rest(&mut self, access: Accessibility, doc: Option<String>) -> PResult<ClassDecl> {
        let name = self.expect_ident()?;
        if self.check_op("<") {
            return Err(self.unsupported("generic classes"));
        }
        let mut bases = Vec::new();
        if self.eat_punct(":") {
            loop {
                bases.push(self.type_name()?);
                if !self.eat_punct(",") {
                    break;
                }
            }
        }
        self.expect_punct("{")?;
        let mut class = ClassDecl {
            name,
            access,
            doc,
            bases,
            members: Vec::new(),
        };
        loop {
            if self.eat_punct("}") {
                break;
            }
            if self.at_end() {
                return Err(self.error_here("`}`"));
            }
            let start = self.pos;
            if self.reject_directive() {
                continue;
            }
            match self.class_member(&class.name) {
                Ok(members) => class.members.extend(members),
                Err(e) => {
                    self.errors.push(e);
                    self.synchronize(start);
                }
            }
        }
        self.eat_punct(";");
        Ok(class)
    }

    fn class_member(&mut self, class_name: &str) -> PResult<Vec<Member>> {
        let doc = self.doc_comment();
        let mods = self.modifiers()?;
        let access = mods.access.unwrap_or(Accessibility::None);

        if self.eat_kw("class") {
            return Ok(vec![Member::Class(self.class_rest(access, doc)?)]);
        }
        if self.eat_kw("delegate") {
            return Ok(vec![Member::Delegate(self.delegate_rest(access, doc)?)]);
        }
        if self.eat_kw("event") {
            return self.event_rest(access, doc);
        }
        if self.check_op("~") {
            return Err(self.unsupported("destructors"));
        }
        if let Some(t) = self.peek() {
            if t.kind == TokenKind::Identifier && UNSUPPORTED_TYPE_WORDS.contains(&t.lexeme.as_str()) {
                return Err(self.unsupported(&format!("`{}` declarations", t.lexeme)));
            }
            if t.is(TokenKind::Identifier, class_name) && self.peek_at(1).is_some_and(|n| n.is_punct("(")) {
                self.pos += 1;
                return Ok(vec![Member::Constructor(self.constructor_rest(access, doc)?)]);
            }
        }

        let type_name = self.type_name()?;
        if self.check_ident("operator") {
            return Err(self.unsupported("operator overloads"));
        }
        if self.check_kw("this") {
            return Err(self.unsupported("indexers"));
        }
        let name = self.expect_ident()?;
        if self.check_op("<") {
            return Err(self.unsupported("generic methods"));
        }
        if self.check_punct("(") {
            let params = self.param_list()?;
            let body = self.method_body()?;
            return Ok(vec![Member::Method(MethodDecl {
                name,
                returns: type_name,
                access,
                doc,
                params,
                body,
            })]);
        }
        if self.check_punct("{") {
            return Ok(vec![Member::Property(self.property_rest(name, type_name, access, doc)?)]);
        }
        if self.check_op("=>") {
            return Err(self.unsupported("expression-bodied members"));
        }

        // Field declarators: `T a = x, b;`. Initializers are parsed and dropped.
        let mut fields = vec![];
        let mut current = name;
        loop {
            if self.eat_op("=") {
                self.variable_initializer()?;
            }
            fields.push(Member::Field(FieldDecl {
                name: current,
                type_name: type_name.clone(),
                access,
                doc: doc.clone(),
            }));
            if self.eat_punct(",") {
                current = self.expect_ident()?;
            } else {
                break;
            }
        }
        self.expect_punct(";")?;
        Ok(fields)
    }

    fn variable_initializer(&mut self) -> PResult<Expr> {
        if self.check_punct("{") {
            let init = self.array_initializer()?;
            return Ok(Expr::NewArray {
                type_name: String::new(),
                dims: Vec::new(),
                init,
            });
        }
        self.expression()
    }

    fn event_rest(&mut self, access: Accessibility, doc: Option<String>) -> PResult<Vec<Member>> {
        let type_name = self.type_name()?;
        let mut out = Vec::new();
        loop {
            let name = self.expect_ident()?;
            if self.check_punct("{") {
                return Err(self.unsupported("event accessors"));
            }
            out.push(Member::Event(EventDecl {
                name,
                type_name: type_name.clone(),
                access,
                doc: doc.clone(),
            }));
            if !self.eat_punct(",") {
                break;
            }
        }
        self.expect_punct(";")?;
        Ok(out)
    }

    fn delegate_rest(&mut self, access: Accessibility, doc: Option<String>) -> PResult<DelegateDecl> {
        let returns = self.type_name()?;
        let name = self.expect_ident()?;
        if self.check_op("<") {
            return Err(self.unsupported("generic delegates"));
        }
        let params = self.param_list()?;
        self.expect_punct(";")?;
        Ok(DelegateDecl {
            name,
            returns,
            access,
            doc,
            params,
        })
    }

    fn constructor_rest(&mut self, access: Accessibility, doc: Option<String>) -> PResult<ConstructorDecl> {
        let params = self.param_list()?;
        let mut em = Emitter::default();
        let mut has_init = false;
        if self.eat_punct(":") {
            let which = if self.eat_kw("this") {
                "this"
            } else if self.eat_kw("base") {
                "base"
            } else {
                return Err(self.error_here("`this` or `base`"));
            };
            let args = self.arguments()?;
            em.args(&args);
            em.events.push(EventKind::call(None, which, args.len() as u32));
            has_init = true;
        }
        let body = if self.eat_punct(";") {
            has_init.then_some(())
        } else {
            self.block(&mut em)?;
            Some(())
        };
        Ok(ConstructorDecl {
            access,
            doc,
            params,
            body: body.map(|_| em.finish()),
        })
    }

    fn method_body(&mut self) -> PResult<Option<Body>> {
        if self.eat_punct(";") {
            return Ok(None);
        }
        if self.check_op("=>") {
            return Err(self.unsupported("expression-bodied members"));
        }
        let mut em = Emitter::default();
        self.block(&mut em)?;
        Ok(Some(em.finish()))
    }

    fn property_rest(
        &mut self,
        name: String,
        type_name: String,
        access: Accessibility,
        doc: Option<String>,
    ) -> PResult<PropertyDecl> {
        self.expect_punct("{")?;
        let mut prop = PropertyDecl {
            name,
            type_name,
            access,
            doc,
            getter: None,
            setter: None,
        };
        while !self.eat_punct("}") {
            // Accessor-level access modifiers are accepted and ignored.
            while self
                .peek()
                .is_some_and(|t| t.kind == TokenKind::Keyword && ACCESS_WORDS.contains(&t.lexeme.as_str()))
            {
                self.pos += 1;
            }
            let is_get = if self.eat_kw("get") {
                true
            } else if self.eat_kw("set") {
                false
            } else {
                return Err(self.error_here("`get` or `set`"));
            };
            let body = if self.eat_punct(";") {
                Body::default()
            } else if self.check_op("=>") {
                return Err(self.unsupported("expression-bodied accessors"));
            } else {
                let mut em = Emitter::default();
                self.block(&mut em)?;
                em.finish()
            };
            let slot = if is_get { &mut prop.getter } else { &mut prop.setter };
            if slot.is_some() {
                return Err(self.error_here("at most one accessor of each kind"));
            }
            *slot = Some(body);
        }
        if self.check_op("=") {
            return Err(self.unsupported("property initializers"));
        }
        Ok(prop)
    }

    fn param_list(&mut self) -> PResult<Vec<Param>> {
        self.expect_punct("(")?;
        let mut params = Vec::new();
        if self.eat_punct(")") {
            return Ok(params);
        }
        loop {
            if self.check_punct("[") {
                return Err(self.unsupported("attributes"));
            }
            // ref / out / params / this (extension receiver) are dropped.
            while self.peek().is_some_and(|t| {
                (t.kind == TokenKind::Identifier && matches!(t.lexeme.as_str(), "ref" | "out" | "params"))
                    || t.is_keyword("this")
            }) && self
                .peek_at(1)
                .is_some_and(|n| matches!(n.kind, TokenKind::Identifier | TokenKind::Keyword))
            {
                self.pos += 1;
            }
            let type_name = self.type_name()?;
            let name = self.expect_ident()?;
            if self.eat_op("=") {
                self.expression()?;
            }
            params.push(Param { name, type_name });
            if self.eat_punct(")") {
                break;
            }
            self.expect_punct(",")?;
        }
        Ok(params)
    }

    /// A declared type: built-in keyword type, `void`, or a dotted name, with
    /// optional `[]` rank specifiers.
    fn type_name(&mut self) -> PResult<String> {
        let mut name = match self.peek() {
            Some(t) if t.kind == TokenKind::Keyword && (KEYWORD_TYPES.contains(&t.lexeme.as_str()) || t.lexeme == "void") => {
                self.pos += 1;
                t.lexeme.clone()
            }
            Some(t) if t.kind == TokenKind::Identifier => self.qualified_name()?,
            _ => return Err(self.error_here("type name")),
        };
        if self.check_op("<") {
            return Err(self.unsupported("generic types"));
        }
        if self.check_op("?") {
            return Err(self.unsupported("nullable types"));
        }
        if self.check_op("*") && self.peek_at(1).is_some_and(|t| t.kind == TokenKind::Identifier) {
            return Err(self.unsupported("pointer types"));
        }
        while self.check_punct("[") {
            if self.peek_at(1).is_some_and(|t| t.is_punct("]")) {
                self.pos += 2;
                name.push_str("[]");
            } else if self.peek_at(1).is_some_and(|t| t.is_punct(",")) {
                return Err(self.unsupported("multi-dimensional arrays"));
            } else {
                break;
            }
        }
        Ok(name)
    }
}

// ---------------------------------------------------------------------------
// Statements
// ---------------------------------------------------------------------------

impl<'t> Parser<'t> {
    /// `{ statements }` with statement-level recovery.
    fn block(&mut self, em: &mut Emitter) -> PResult<()> {
        self.expect_punct("{")?;
        loop {
            if self.eat_punct("}") {
                return Ok(());
            }
            if self.at_end() {
                return Err(self.error_here("`}`"));
            }
            let start = self.pos;
            if self.reject_directive() {
                continue;
            }
            if let Err(e) = self.statement(em) {
                self.errors.push(e);
                self.synchronize(start);
            }
        }
    }

    fn embedded(&mut self, em: &mut Emitter) -> PResult<()> {
        if self.check_punct("{") {
            self.block(em)
        } else {
            self.statement(em)
        }
    }

    fn paren_condition(&mut self, em: &mut Emitter) -> PResult<()> {
        self.expect_punct("(")?;
        let cond = self.expression()?;
        self.expect_punct(")")?;
        em.read(&cond);
        Ok(())
    }

    fn statement(&mut self, em: &mut Emitter) -> PResult<()> {
        let Some(t) = self.peek() else {
            return Err(self.error_here("statement"));
        };
        if t.is_punct("{") {
            return self.block(em);
        }
        if t.is_punct(";") {
            self.pos += 1;
            return Ok(());
        }
        if t.kind == TokenKind::Keyword {
            match t.lexeme.as_str() {
                "if" => {
                    self.pos += 1;
                    self.paren_condition(em)?;
                    self.embedded(em)?;
                    if self.eat_kw("else") {
                        self.embedded(em)?;
                    }
                    return Ok(());
                }
                "while" => {
                    self.pos += 1;
                    self.paren_condition(em)?;
                    return self.embedded(em);
                }
                "do" => {
                    self.pos += 1;
                    self.embedded(em)?;
                    if !self.eat_kw("while") {
                        return Err(self.error_here("`while`"));
                    }
                    self.paren_condition(em)?;
                    return self.expect_punct(";");
                }
                "for" => {
                    self.pos += 1;
                    return self.for_statement(em);
                }
                "foreach" => {
                    self.pos += 1;
                    return self.foreach_statement(em);
                }
                "switch" => {
                    self.pos += 1;
                    return self.switch_statement(em);
                }
                "break" | "continue" => {
                    self.pos += 1;
                    return self.expect_punct(";");
                }
                "return" => {
                    self.pos += 1;
                    if !self.check_punct(";") {
                        let e = self.expression()?;
                        em.read(&e);
                    }
                    return self.expect_punct(";");
                }
                "using" => {
                    self.pos += 1;
                    self.expect_punct("(")?;
                    if self.looks_like_local_decl() {
                        self.local_declaration(em)?;
                    } else {
                        let e = self.expression()?;
                        em.read(&e);
                    }
                    self.expect_punct(")")?;
                    return self.embedded(em);
                }
                "case" | "default" | "else" | "get" | "set" => {
                    return Err(self.error_here("statement"));
                }
                _ => {}
            }
        }
        if t.kind == TokenKind::Identifier {
            let next = self.peek_at(1);
            match t.lexeme.as_str() {
                "throw" if next.is_some_and(|n| !n.is_punct("(") && !n.is_punct(".") && !n.is_op("=")) => {
                    self.pos += 1;
                    if !self.check_punct(";") {
                        let e = self.expression()?;
                        em.read(&e);
                    }
                    return self.expect_punct(";");
                }
                "try" if next.is_some_and(|n| n.is_punct("{")) => {
                    self.pos += 1;
                    return self.try_statement(em);
                }
                "lock" if next.is_some_and(|n| n.is_punct("(")) => {
                    self.pos += 1;
                    self.paren_condition(em)?;
                    return self.embedded(em);
                }
                "goto" | "yield" | "checked" | "unchecked" | "fixed" | "unsafe"
                    if next.is_some_and(|n| !n.is_punct("(") && !n.is_punct(".") && !n.is_op("=")) =>
                {
                    return Err(self.unsupported(&format!("`{}` statements", t.lexeme)));
                }
                _ => {}
            }
        }
        if self.looks_like_local_decl() {
            self.local_declaration(em)?;
            return self.expect_punct(";");
        }
        let e = self.expression()?;
        em.read(&e);
        self.expect_punct(";")
    }

    fn looks_like_local_decl(&self) -> bool {
        let Some(t) = self.peek() else { return false };
        let mut i = self.pos;
        if t.kind == TokenKind::Keyword && KEYWORD_TYPES.contains(&t.lexeme.as_str()) {
            i += 1;
        } else if t.kind == TokenKind::Identifier {
            i += 1;
            while self.toks.get(i).is_some_and(|t| t.is_punct("."))
                && self.toks.get(i + 1).is_some_and(|t| t.kind == TokenKind::Identifier)
            {
                i += 2;
            }
        } else {
            return false;
        }
        while self.toks.get(i).is_some_and(|t| t.is_punct("["))
            && self.toks.get(i + 1).is_some_and(|t| t.is_punct("]"))
        {
            i += 2;
        }
        // `List<int> x` is a declaration we reject; let type_name report it.
        if self.toks.get(i).is_some_and(|t| t.is_op("<")) {
            let mut j = i + 1;
            while let Some(t) = self.toks.get(j) {
                if t.is_op(">") || t.is_op(">>") {
                    return self.toks.get(j + 1).is_some_and(|n| n.kind == TokenKind::Identifier);
                }
                if !(t.kind == TokenKind::Identifier || t.kind == TokenKind::Keyword || t.is_punct(",") || t.is_punct(".") || t.is_op("<")) {
                    return false;
                }
                j += 1;
            }
            return false;
        }
        self.toks
            .get(i)
            .is_some_and(|t| t.kind == TokenKind::Identifier && !matches!(t.lexeme.as_str(), "is" | "as"))
    }

    /// `T a = x, b` (no trailing `;`).
    fn local_declaration(&mut self, em: &mut Emitter) -> PResult<()> {
        let type_name = self.type_name()?;
        loop {
            let name = self.expect_ident()?;
            em.events.push(EventKind::local(&name, &type_name));
            if self.eat_op("=") {
                let init = self.variable_initializer()?;
                em.read(&init);
                em.events.push(EventKind::write(&name));
            }
            if !self.eat_punct(",") {
                return Ok(());
            }
        }
    }

    fn for_statement(&mut self, em: &mut Emitter) -> PResult<()> {
        self.expect_punct("(")?;
        if !self.check_punct(";") {
            if self.looks_like_local_decl() {
                self.local_declaration(em)?;
            } else {
                self.expression_list(em)?;
            }
        }
        self.expect_punct(";")?;
        if !self.check_punct(";") {
            let cond = self.expression()?;
            em.read(&cond);
        }
        self.expect_punct(";")?;
        if !self.check_punct(")") {
            self.expression_list(em)?;
        }
        self.expect_punct(")")?;
        self.embedded(em)
    }

    fn expression_list(&mut self, em: &mut Emitter) -> PResult<()> {
        loop {
            let e = self.expression()?;
            em.read(&e);
            if !self.eat_punct(",") {
                return Ok(());
            }
        }
    }

    fn foreach_statement(&mut self, em: &mut Emitter) -> PResult<()> {
        self.expect_punct("(")?;
        let type_name = self.type_name()?;
        let name = self.expect_ident()?;
        if !self.check_ident("in") {
            return Err(self.error_here("`in`"));
        }
        self.pos += 1;
        let coll = self.expression()?;
        self.expect_punct(")")?;
        em.events.push(EventKind::local(&name, &type_name));
        em.read(&coll);
        em.events.push(EventKind::write(&name));
        self.embedded(em)
    }

    fn switch_statement(&mut self, em: &mut Emitter) -> PResult<()> {
        self.paren_condition(em)?;
        self.expect_punct("{")?;
        loop {
            if self.eat_punct("}") {
                return Ok(());
            }
            if self.at_end() {
                return Err(self.error_here("`}`"));
            }
            let start = self.pos;
            let res = if self.eat_kw("case") {
                self.expression().and_then(|label| {
                    em.read(&label);
                    self.expect_punct(":")
                })
            } else if self.check_kw("default") && self.peek_at(1).is_some_and(|t| t.is_punct(":")) {
                self.pos += 2;
                Ok(())
            } else {
                self.statement(em)
            };
            if let Err(e) = res {
                self.errors.push(e);
                self.synchronize(start);
            }
        }
    }

    fn try_statement(&mut self, em: &mut Emitter) -> PResult<()> {
        self.block(em)?;
        let mut handled = false;
        while self.check_ident("catch") {
            self.pos += 1;
            handled = true;
            if self.eat_punct("(") {
                let type_name = self.type_name()?;
                if self.peek().is_some_and(|t| t.kind == TokenKind::Identifier) {
                    let name = self.expect_ident()?;
                    em.events.push(EventKind::local(&name, &type_name));
                }
                self.expect_punct(")")?;
            }
            self.block(em)?;
        }
        if self.check_ident("finally") {
            self.pos += 1;
            handled = true;
            self.block(em)?;
        }
        if !handled {
            return Err(self.error_here("`catch` or `finally`"));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Expressions
// ---------------------------------------------------------------------------

fn binary_precedence(t: &Token) -> Option<u8> {
    if t.kind == TokenKind::Identifier && matches!(t.lexeme.as_str(), "is" | "as") {
        return Some(7);
    }
    if t.kind != TokenKind::Operator {
        return None;
    }
    Some(match t.lexeme.as_str() {
        "??" => 1,
        "||" => 2,
        "&&" => 3,
        "|" => 4,
        "^" => 5,
        "&" => 6,
        "==" | "!=" => 7,
        "<" | ">" | "<=" | ">=" => 8,
        "<<" | ">>" => 9,
        "+" | "-" => 10,
        "*" | "/" | "%" => 11,
        _ => return None,
    })
}

impl<'t> Parser<'t> {
    fn expression(&mut self) -> PResult<Expr> {
        let lhs = self.conditional()?;
        if let Some(t) = self.peek() {
            if t.kind == TokenKind::Operator && ASSIGN_OPS.contains(&t.lexeme.as_str()) {
                if !is_lvalue(&lhs) {
                    return Err(self.error_here("assignable expression before assignment operator"));
                }
                self.pos += 1;
                let value = self.expression()?;
                return Ok(Expr::Assign {
                    compound: t.lexeme != "=",
                    target: Box::new(lhs),
                    value: Box::new(value),
                });
            }
            if t.is_op("=>") {
                return Err(self.unsupported("lambdas"));
            }
        }
        Ok(lhs)
    }

    fn conditional(&mut self) -> PResult<Expr> {
        let cond = self.binary(1)?;
        if self.eat_op("?") {
            let a = self.expression()?;
            self.expect_punct(":")?;
            let b = self.expression()?;
            return Ok(Expr::Ternary(Box::new(cond), Box::new(a), Box::new(b)));
        }
        Ok(cond)
    }

    fn binary(&mut self, min_prec: u8) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        while let Some(t) = self.peek() {
            let Some(prec) = binary_precedence(t) else { break };
            if prec < min_prec {
                break;
            }
            self.pos += 1;
            if t.kind == TokenKind::Identifier {
                // `x is T` / `x as T`
                self.type_name()?;
                lhs = Expr::Unary(Box::new(lhs));
                continue;
            }
            // `??` is right-associative; everything else left.
            let next_min = if t.lexeme == "??" { prec } else { prec + 1 };
            let rhs = self.binary(next_min)?;
            lhs = Expr::Binary(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        let Some(t) = self.peek() else {
            return Err(self.error_here("expression"));
        };
        if t.kind == TokenKind::Operator {
            match t.lexeme.as_str() {
                "++" | "--" => {
                    self.pos += 1;
                    let target = self.unary()?;
                    if !is_lvalue(&target) {
                        return Err(self.error_here("assignable operand"));
                    }
                    return Ok(Expr::IncDec(Box::new(target)));
                }
                "+" | "-" | "!" | "~" => {
                    self.pos += 1;
                    return Ok(Expr::Unary(Box::new(self.unary()?)));
                }
                "&" | "*" => return Err(self.unsupported("pointer operations")),
                _ => {}
            }
        }
        if t.is_punct("(") && self.is_cast() {
            self.pos += 1;
            self.type_name()?;
            self.expect_punct(")")?;
            return Ok(Expr::Unary(Box::new(self.unary()?)));
        }
        self.postfix()
    }

    /// Decide whether `(` starts a cast.
    fn is_cast(&self) -> bool {
        let mut i = self.pos + 1;
        let Some(first) = self.toks.get(i) else { return false };
        let keyword_type = first.kind == TokenKind::Keyword && KEYWORD_TYPES.contains(&first.lexeme.as_str());
        if keyword_type {
            i += 1;
        } else if first.kind == TokenKind::Identifier {
            i += 1;
            while self.toks.get(i).is_some_and(|t| t.is_punct("."))
                && self.toks.get(i + 1).is_some_and(|t| t.kind == TokenKind::Identifier)
            {
                i += 2;
            }
        } else {
            return false;
        }
        while self.toks.get(i).is_some_and(|t| t.is_punct("["))
            && self.toks.get(i + 1).is_some_and(|t| t.is_punct("]"))
        {
            i += 2;
        }
        if !self.toks.get(i).is_some_and(|t| t.is_punct(")")) {
            return false;
        }
        if keyword_type {
            return true;
        }
        let Some(after) = self.toks.get(i + 1) else { return false };
        match after.kind {
            TokenKind::Identifier
            | TokenKind::IntLiteral
            | TokenKind::RealLiteral
            | TokenKind::StringLiteral
            | TokenKind::CharLiteral
            | TokenKind::BoolLiteral => true,
            TokenKind::Keyword => matches!(after.lexeme.as_str(), "this" | "base" | "new" | "null")
                || KEYWORD_TYPES.contains(&after.lexeme.as_str()),
            TokenKind::Punct => after.lexeme == "(",
            TokenKind::Operator => matches!(after.lexeme.as_str(), "!" | "~"),
            TokenKind::Comment => false,
        }
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let mut e = self.primary()?;
        loop {
            if self.eat_punct(".") {
                let name = self.expect_ident()?;
                if self.check_op("<") && self.generic_call_ahead() {
                    return Err(self.unsupported("generic method calls"));
                }
                e = Expr::Member(Box::new(e), name);
            } else if self.check_punct("(") {
                let args = self.arguments()?;
                e = Expr::Call(Box::new(e), args);
            } else if self.eat_punct("[") {
                let mut idx = vec![self.expression()?];
                while self.eat_punct(",") {
                    idx.push(self.expression()?);
                }
                self.expect_punct("]")?;
                e = Expr::Index(Box::new(e), idx);
            } else if self.check_op("++") || self.check_op("--") {
                if !is_lvalue(&e) {
                    return Err(self.error_here("assignable operand"));
                }
                self.pos += 1;
                e = Expr::IncDec(Box::new(e));
            } else {
                return Ok(e);
            }
        }
    }

    /// `Name<T>(` shape after a member name.
    fn generic_call_ahead(&self) -> bool {
        let mut i = self.pos + 1;
        while let Some(t) = self.toks.get(i) {
            if t.is_op(">") {
                return self.toks.get(i + 1).is_some_and(|n| n.is_punct("("));
            }
            if !(t.kind == TokenKind::Identifier || t.kind == TokenKind::Keyword || t.is_punct(",") || t.is_punct(".")) {
                return false;
            }
            i += 1;
        }
        false
    }

    fn primary(&mut self) -> PResult<Expr> {
        let Some(t) = self.peek() else {
            return Err(self.error_here("expression"));
        };
        match t.kind {
            TokenKind::IntLiteral
            | TokenKind::RealLiteral
            | TokenKind::StringLiteral
            | TokenKind::CharLiteral
            | TokenKind::BoolLiteral => {
                self.pos += 1;
                Ok(Expr::Literal)
            }
            TokenKind::Identifier => {
                let next = self.peek_at(1);
                if next.is_some_and(|n| n.is_op("=>")) {
                    return Err(self.unsupported("lambdas"));
                }
                if matches!(t.lexeme.as_str(), "typeof" | "sizeof" | "nameof") && next.is_some_and(|n| n.is_punct("(")) {
                    self.pos += 2;
                    if t.lexeme == "nameof" {
                        self.expression()?;
                    } else {
                        self.type_name()?;
                    }
                    self.expect_punct(")")?;
                    return Ok(Expr::Literal);
                }
                if matches!(t.lexeme.as_str(), "from") && next.is_some_and(|n| n.kind == TokenKind::Identifier)
                    && self.peek_at(2).is_some_and(|n| n.is(TokenKind::Identifier, "in"))
                {
                    return Err(self.unsupported("query expressions"));
                }
                if next.is_some_and(|n| n.is_op("<")) && self.generic_name_ahead() {
                    return Err(self.unsupported("generic types"));
                }
                self.pos += 1;
                Ok(Expr::Name(t.lexeme.clone()))
            }
            TokenKind::Keyword => match t.lexeme.as_str() {
                "this" => {
                    self.pos += 1;
                    Ok(Expr::This)
                }
                "base" => {
                    self.pos += 1;
                    Ok(Expr::Base)
                }
                "null" => {
                    self.pos += 1;
                    Ok(Expr::Literal)
                }
                "new" => {
                    self.pos += 1;
                    self.creation()
                }
                "default" if self.peek_at(1).is_some_and(|n| n.is_punct("(")) => {
                    self.pos += 2;
                    self.type_name()?;
                    self.expect_punct(")")?;
                    Ok(Expr::Literal)
                }
                "delegate" => Err(self.unsupported("anonymous methods")),
                kw if KEYWORD_TYPES.contains(&kw) => {
                    self.pos += 1;
                    if !self.check_punct(".") {
                        return Err(self.error_here("`.` after built-in type name"));
                    }
                    Ok(Expr::TypeName(kw.to_string()))
                }
                _ => Err(self.error_here("expression")),
            },
            TokenKind::Punct if t.lexeme == "(" => {
                self.pos += 1;
                let e = self.expression()?;
                self.expect_punct(")")?;
                Ok(e)
            }
            _ => Err(self.error_here("expression")),
        }
    }

    /// `Name<A, B>` followed by `(`, `.`, or an identifier.
    fn generic_name_ahead(&self) -> bool {
        let mut i = self.pos + 2;
        while let Some(t) = self.toks.get(i) {
            if t.is_op(">") {
                return self.toks.get(i + 1).is_some_and(|n| {
                    n.is_punct("(") || n.is_punct(".") || n.kind == TokenKind::Identifier
                });
            }
            let type_like = t.kind == TokenKind::Identifier
                || (t.kind == TokenKind::Keyword && KEYWORD_TYPES.contains(&t.lexeme.as_str()))
                || t.is_punct(",")
                || t.is_punct(".");
            if !type_like {
                return false;
            }
            i += 1;
        }
        false
    }

    fn creation(&mut self) -> PResult<Expr> {
        let base = match self.peek() {
            Some(t) if t.kind == TokenKind::Keyword && KEYWORD_TYPES.contains(&t.lexeme.as_str()) => {
                self.pos += 1;
                t.lexeme.clone()
            }
            Some(t) if t.kind == TokenKind::Identifier => self.qualified_name()?,
            Some(t) if t.is_punct("{") => return Err(self.unsupported("anonymous types")),
            _ => return Err(self.error_here("type name after `new`")),
        };
        if self.check_op("<") {
            return Err(self.unsupported("generic types"));
        }
        if self.check_punct("(") {
            let args = self.arguments()?;
            if self.check_punct("{") {
                return Err(self.unsupported("object initializers"));
            }
            return Ok(Expr::New {
                type_name: base,
                args,
            });
        }
        if self.eat_punct("[") {
            let mut dims = Vec::new();
            if !self.check_punct("]") {
                dims.push(self.expression()?);
                if self.check_punct(",") {
                    return Err(self.unsupported("multi-dimensional arrays"));
                }
            }
            self.expect_punct("]")?;
            let mut type_name = base;
            while self.check_punct("[") && self.peek_at(1).is_some_and(|t| t.is_punct("]")) {
                self.pos += 2;
                type_name.push_str("[]");
            }
            let init = if self.check_punct("{") {
                self.array_initializer()?
            } else {
                Vec::new()
            };
            return Ok(Expr::NewArray {
                type_name,
                dims,
                init,
            });
        }
        if self.check_punct("{") {
            return Err(self.unsupported("object initializers"));
        }
        Err(self.error_here("`(` or `[` after type in `new` expression"))
    }

    fn array_initializer(&mut self) -> PResult<Vec<Expr>> {
        self.expect_punct("{")?;
        let mut items = Vec::new();
        while !self.eat_punct("}") {
            items.push(self.variable_initializer()?);
            if !self.eat_punct(",") {
                self.expect_punct("}")?;
                break;
            }
        }
        Ok(items)
    }

    fn arguments(&mut self) -> PResult<Vec<Arg>> {
        self.expect_punct("(")?;
        let mut args = Vec::new();
        if self.eat_punct(")") {
            return Ok(args);
        }
        loop {
            let mode = match self.peek() {
                Some(t)
                    if t.kind == TokenKind::Identifier
                        && matches!(t.lexeme.as_str(), "ref" | "out")
                        && self.peek_at(1).is_some_and(|n| {
                            n.kind == TokenKind::Identifier || n.is_keyword("this")
                        }) =>
                {
                    self.pos += 1;
                    if t.lexeme == "ref" {
                        ArgMode::Ref
                    } else {
                        ArgMode::Out
                    }
                }
                _ => ArgMode::Value,
            };
            if self.peek().is_some_and(|t| t.kind == TokenKind::Identifier)
                && self.peek_at(1).is_some_and(|n| n.is_punct(":"))
            {
                return Err(self.unsupported("named arguments"));
            }
            let expr = self.expression()?;
            if mode != ArgMode::Value && !is_lvalue(&expr) {
                return Err(self.error_here("variable after `ref`/`out`"));
            }
            args.push(Arg { mode, expr });
            if self.eat_punct(")") {
                return Ok(args);
            }
            self.expect_punct(",")?;
        }
    }
}
