//! Tokenizer for the supported C# subset.
//!
//! Whitespace is dropped, comments are kept as [`TokenKind::Comment`] tokens so
//! the parser can attach them to declarations. Positions are 1-based and
//! counted in characters.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// Words that always lex as [`TokenKind::Keyword`].
///
/// `true` and `false` are reserved too but lex as [`TokenKind::BoolLiteral`].
pub const RESERVED_WORDS: &[&str] = &[
    "namespace", "using", "class", "public", "private", "protected", "internal", "static",
    "readonly", "void", "new", "delegate", "event", "get", "set", "return", "if", "else", "for",
    "foreach", "while", "do", "switch", "case", "default", "break", "continue", "this", "base",
    "null", "true", "false", "int", "long", "float", "double", "bool", "string", "char", "object",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum TokenKind {
    Identifier,
    Keyword,
    IntLiteral,
    RealLiteral,
    StringLiteral,
    CharLiteral,
    BoolLiteral,
    Punct,
    Operator,
    Comment,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Token {
    pub kind: TokenKind,
    pub lexeme: String,
    pub line: u32,
    pub col: u32,
}

impl Token {
    pub fn is(&self, kind: TokenKind, lexeme: &str) -> bool {
        self.kind == kind && self.lexeme == lexeme
    }

    pub fn is_punct(&self, p: &str) -> bool {
        self.is(TokenKind::Punct, p)
    }

    pub fn is_op(&self, op: &str) -> bool {
        self.is(TokenKind::Operator, op)
    }

    pub fn is_keyword(&self, kw: &str) -> bool {
        self.is(TokenKind::Keyword, kw)
    }

    /// Line on which the token ends (differs from `line` only for block comments
    /// and verbatim strings).
    pub fn end_line(&self) -> u32 {
        self.line + self.lexeme.matches('\n').count() as u32
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} `{}`", self.kind, self.lexeme)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {message}")]
pub struct LexError {
    pub line: u32,
    pub col: u32,
    pub message: String,
}

pub fn is_reserved(word: &str) -> bool {
    RESERVED_WORDS.contains(&word)
}

// Longest match first.
const OPERATORS: &[&str] = &[
    "<<=", ">>=", "++", "--", "&&", "||", "==", "!=", "<=", ">=", "+=", "-=", "*=", "/=", "%=",
    "&=", "|=", "^=", "<<", ">>", "=>", "??", "=", "+", "-", "*", "/", "%", "<", ">", "!", "~",
    "&", "|", "^", "?",
];

const PUNCTUATION: &[char] = &['{', '}', '(', ')', '[', ']', ';', ',', '.', ':', '#'];

struct Cursor {
    chars: Vec<char>,
    pos: usize,
    line: u32,
    col: u32,
}

impl Cursor {
    fn new(source: &str) -> Self {
        Self {
            chars: source.chars().collect(),
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn starts_with(&self, s: &str) -> bool {
        s.chars().enumerate().all(|(i, c)| self.peek_at(i) == Some(c))
    }

    fn slice(&self, start: usize) -> String {
        self.chars[start..self.pos].iter().collect()
    }

    fn error(&self, line: u32, col: u32, message: impl Into<String>) -> LexError {
        LexError {
            line,
            col,
            message: message.into(),
        }
    }
}

fn is_ident_start(c: char) -> bool {
    c == '_' || c.is_alphabetic()
}

fn is_ident_continue(c: char) -> bool {
    c == '_' || c.is_alphanumeric()
}

/// Split `source` into tokens.
pub fn tokenize(source: &str) -> Result<Vec<Token>, LexError> {
    let mut cur = Cursor::new(source);
    let mut tokens = Vec::new();

    while let Some(c) = cur.peek() {
        if c.is_whitespace() || c == '\u{feff}' {
            cur.bump();
            continue;
        }
        let (start, line, col) = (cur.pos, cur.line, cur.col);
        let kind = if cur.starts_with("//") {
            while cur.peek().is_some_and(|c| c != '\n' && c != '\r') {
                cur.bump();
            }
            TokenKind::Comment
        } else if cur.starts_with("/*") {
            cur.bump();
            cur.bump();
            loop {
                if cur.starts_with("*/") {
                    cur.bump();
                    cur.bump();
                    break;
                }
                if cur.bump().is_none() {
                    return Err(cur.error(line, col, "unterminated block comment"));
                }
            }
            TokenKind::Comment
        } else if c == '@' && cur.peek_at(1) == Some('"') {
            cur.bump();
            cur.bump();
            loop {
                match cur.bump() {
                    None => return Err(cur.error(line, col, "unterminated verbatim string")),
                    Some('"') if cur.peek() == Some('"') => {
                        cur.bump();
                    }
                    Some('"') => break,
                    Some(_) => {}
                }
            }
            TokenKind::StringLiteral
        } else if c == '"' {
            cur.bump();
            lex_quoted(&mut cur, '"', line, col, "string")?;
            TokenKind::StringLiteral
        } else if c == '\'' {
            cur.bump();
            lex_quoted(&mut cur, '\'', line, col, "character literal")?;
            TokenKind::CharLiteral
        } else if c.is_ascii_digit() || (c == '.' && cur.peek_at(1).is_some_and(|d| d.is_ascii_digit())) {
            lex_number(&mut cur)
        } else if is_ident_start(c) || (c == '@' && cur.peek_at(1).is_some_and(is_ident_start)) {
            cur.bump();
            while cur.peek().is_some_and(is_ident_continue) {
                cur.bump();
            }
            let word = cur.slice(start);
            if word == "true" || word == "false" {
                TokenKind::BoolLiteral
            } else if is_reserved(&word) {
                TokenKind::Keyword
            } else {
                TokenKind::Identifier
            }
        } else if PUNCTUATION.contains(&c) {
            cur.bump();
            TokenKind::Punct
        } else if let Some(op) = OPERATORS.iter().find(|op| cur.starts_with(op)) {
            for _ in 0..op.chars().count() {
                cur.bump();
            }
            TokenKind::Operator
        } else {
            return Err(cur.error(line, col, format!("illegal character {c:?}")));
        };
        tokens.push(Token {
            kind,
            lexeme: cur.slice(start),
            line,
            col,
        });
    }
    Ok(tokens)
}

fn lex_quoted(cur: &mut Cursor, quote: char, line: u32, col: u32, what: &str) -> Result<(), LexError> {
    loop {
        match cur.peek() {
            None | Some('\n') | Some('\r') => {
                return Err(cur.error(line, col, format!("unterminated {what}")));
            }
            Some('\\') => {
                cur.bump();
                if cur.peek().is_none_or(|c| c == '\n') {
                    return Err(cur.error(line, col, format!("unterminated {what}")));
                }
                cur.bump();
            }
            Some(c) if c == quote => {
                cur.bump();
                return Ok(());
            }
            Some(_) => {
                cur.bump();
            }
        }
    }
}

fn lex_number(cur: &mut Cursor) -> TokenKind {
    if cur.starts_with("0x") || cur.starts_with("0X") {
        cur.bump();
        cur.bump();
        while cur.peek().is_some_and(|c| c.is_ascii_hexdigit() || c == '_') {
            cur.bump();
        }
        eat_suffix(cur, &['u', 'U', 'l', 'L']);
        return TokenKind::IntLiteral;
    }
    let mut real = false;
    let digits = |cur: &mut Cursor| {
        while cur.peek().is_some_and(|c| c.is_ascii_digit() || c == '_') {
            cur.bump();
        }
    };
    digits(cur);
    if cur.peek() == Some('.') && cur.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
        real = true;
        cur.bump();
        digits(cur);
    }
    if matches!(cur.peek(), Some('e' | 'E')) {
        let sign = matches!(cur.peek_at(1), Some('+' | '-'));
        let digit_at = if sign { 2 } else { 1 };
        if cur.peek_at(digit_at).is_some_and(|c| c.is_ascii_digit()) {
            real = true;
            for _ in 0..digit_at {
                cur.bump();
            }
            digits(cur);
        }
    }
    if matches!(cur.peek(), Some('f' | 'F' | 'd' | 'D' | 'm' | 'M')) {
        cur.bump();
        return TokenKind::RealLiteral;
    }
    if real {
        return TokenKind::RealLiteral;
    }
    eat_suffix(cur, &['u', 'U', 'l', 'L']);
    TokenKind::IntLiteral
}

fn eat_suffix(cur: &mut Cursor, allowed: &[char]) {
    while cur.peek().is_some_and(|c| allowed.contains(&c)) {
        cur.bump();
    }
}
