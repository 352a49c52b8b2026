use std::fmt;

use super::ast::Position;
use super::Diagnostic;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    Str(String),
    // keywords
    Procedure,
    Var,
    Rule,
    Else,
    Foreach,
    In,
    Do,
    While,
    Call,
    Element,
    Link,
    Not,
    Create,
    Delete,
    Where,
    Set,
    True,
    False,
    And,
    Or,
    // punctuation
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Semi,
    Colon,
    ColonEq,
    Dot,
    At,
    /// `-[`
    LinkOpen,
    /// `]->`
    LinkClose,
    Plus,
    Minus,
    Star,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Eof,
}

pub const KEYWORDS: &[(&str, Tok)] = &[
    ("procedure", Tok::Procedure),
    ("var", Tok::Var),
    ("rule", Tok::Rule),
    ("else", Tok::Else),
    ("foreach", Tok::Foreach),
    ("in", Tok::In),
    ("do", Tok::Do),
    ("while", Tok::While),
    ("call", Tok::Call),
    ("element", Tok::Element),
    ("link", Tok::Link),
    ("not", Tok::Not),
    ("create", Tok::Create),
    ("delete", Tok::Delete),
    ("where", Tok::Where),
    ("set", Tok::Set),
    ("true", Tok::True),
    ("false", Tok::False),
    ("and", Tok::And),
    ("or", Tok::Or),
];

pub fn is_keyword(word: &str) -> bool {
    KEYWORDS.iter().any(|(k, _)| *k == word)
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some((kw, _)) = KEYWORDS.iter().find(|(_, t)| t == self) {
            return write!(f, "`{kw}`");
        }
        let s = match self {
            Tok::Ident(name) => return write!(f, "identifier `{name}`"),
            Tok::Int(i) => return write!(f, "integer `{i}`"),
            Tok::Str(_) => "string literal",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::LBrace => "`{`",
            Tok::RBrace => "`}`",
            Tok::Comma => "`,`",
            Tok::Semi => "`;`",
            Tok::Colon => "`:`",
            Tok::ColonEq => "`:=`",
            Tok::Dot => "`.`",
            Tok::At => "`@`",
            Tok::LinkOpen => "`-[`",
            Tok::LinkClose => "`]->`",
            Tok::Plus => "`+`",
            Tok::Minus => "`-`",
            Tok::Star => "`*`",
            Tok::Eq => "`=`",
            Tok::Ne => "`<>`",
            Tok::Lt => "`<`",
            Tok::Le => "`<=`",
            Tok::Gt => "`>`",
            Tok::Ge => "`>=`",
            Tok::Eof => "end of file",
            _ => unreachable!("keywords handled above"),
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub pos: Position,
}

/// Splits `text` into tokens. Lexical errors are reported and the offending
/// characters skipped. The result always ends with [`Tok::Eof`].
pub fn lex(text: &str, diags: &mut Vec<Diagnostic>) -> Vec<Token> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line = 1u32;
    let mut col = 1u32;
    macro_rules! bump {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }
    while i < chars.len() {
        let c = chars[i];
        let pos = Position { line, col };
        let peek = chars.get(i + 1).copied();
        if c.is_whitespace() {
            bump!();
            continue;
        }
        if c == '/' && peek == Some('/') {
            while i < chars.len() && chars[i] != '\n' {
                bump!();
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                bump!();
            }
            let word: String = chars[start..i].iter().collect();
            let tok = KEYWORDS
                .iter()
                .find(|(k, _)| *k == word)
                .map(|(_, t)| t.clone())
                .unwrap_or(Tok::Ident(word));
            out.push(Token { tok, pos });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                bump!();
            }
            let digits: String = chars[start..i].iter().collect();
            match digits.parse::<i64>() {
                Ok(v) => out.push(Token {
                    tok: Tok::Int(v),
                    pos,
                }),
                Err(_) => {
                    diags.push(Diagnostic::new(
                        pos,
                        format!("integer literal `{digits}` is out of range"),
                    ));
                    out.push(Token {
                        tok: Tok::Int(0),
                        pos,
                    });
                }
            }
            continue;
        }
        if c == '"' {
            bump!();
            let mut s = String::new();
            let mut closed = false;
            while i < chars.len() {
                match chars[i] {
                    '"' => {
                        bump!();
                        closed = true;
                        break;
                    }
                    '\n' => break,
                    '\\' => {
                        let esc_pos = Position { line, col };
                        bump!();
                        match chars.get(i) {
                            Some('n') => s.push('\n'),
                            Some('t') => s.push('\t'),
                            Some('"') => s.push('"'),
                            Some('\\') => s.push('\\'),
                            Some(other) => {
                                diags.push(Diagnostic::new(
                                    esc_pos,
                                    format!("unknown escape `\\{other}`"),
                                ));
                            }
                            None => break,
                        }
                        bump!();
                    }
                    other => {
                        s.push(other);
                        bump!();
                    }
                }
            }
            if !closed {
                diags.push(Diagnostic::new(pos, "unterminated string literal"));
            }
            out.push(Token {
                tok: Tok::Str(s),
                pos,
            });
            continue;
        }
        let (tok, width) = match (c, peek) {
            (':', Some('=')) => (Tok::ColonEq, 2),
            ('<', Some('>')) => (Tok::Ne, 2),
            ('<', Some('=')) => (Tok::Le, 2),
            ('>', Some('=')) => (Tok::Ge, 2),
            ('-', Some('[')) => (Tok::LinkOpen, 2),
            (']', Some('-')) if chars.get(i + 2) == Some(&'>') => (Tok::LinkClose, 3),
            ('(', _) => (Tok::LParen, 1),
            (')', _) => (Tok::RParen, 1),
            ('{', _) => (Tok::LBrace, 1),
            ('}', _) => (Tok::RBrace, 1),
            (',', _) => (Tok::Comma, 1),
            (';', _) => (Tok::Semi, 1),
            (':', _) => (Tok::Colon, 1),
            ('.', _) => (Tok::Dot, 1),
            ('@', _) => (Tok::At, 1),
            ('+', _) => (Tok::Plus, 1),
            ('-', _) => (Tok::Minus, 1),
            ('*', _) => (Tok::Star, 1),
            ('=', _) => (Tok::Eq, 1),
            ('<', _) => (Tok::Lt, 1),
            ('>', _) => (Tok::Gt, 1),
            _ => {
                diags.push(Diagnostic::new(pos, format!("unexpected character `{c}`")));
                bump!();
                continue;
            }
        };
        for _ in 0..width {
            bump!();
        }
        out.push(Token { tok, pos });
    }
    out.push(Token {
        tok: Tok::Eof,
        pos: Position { line, col },
    });
    out
}
