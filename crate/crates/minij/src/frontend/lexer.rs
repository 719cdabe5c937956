//! Tokenizer for Mini-J. Never fails: unknown characters become `Unknown`
//! tokens and unterminated literals are reported and closed at end of line.

use super::diag::{DiagCode, Diagnostic};
use super::source::SourceUnit;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kw {
    Class,
    Public,
    Private,
    Protected,
    Static,
    Final,
    Abstract,
    Void,
    Int,
    Long,
    Double,
    Float,
    Boolean,
    Char,
    If,
    Else,
    While,
    Do,
    For,
    Return,
    Break,
    Continue,
    New,
    True,
    False,
    Null,
    Import,
    Package,
    Extends,
    Implements,
    Throws,
    // Lexed so that they can be reported precisely; Mini-J does not support them.
    Try,
    Catch,
    Finally,
    Throw,
    This,
    Super,
    Interface,
    Enum,
    Switch,
    Case,
    Default,
    Synchronized,
    Instanceof,
}

impl Kw {
    fn from_ident(s: &str) -> Option<Kw> {
        Some(match s {
            "class" => Kw::Class,
            "public" => Kw::Public,
            "private" => Kw::Private,
            "protected" => Kw::Protected,
            "static" => Kw::Static,
            "final" => Kw::Final,
            "abstract" => Kw::Abstract,
            "void" => Kw::Void,
            "int" => Kw::Int,
            "long" => Kw::Long,
            "double" => Kw::Double,
            "float" => Kw::Float,
            "boolean" => Kw::Boolean,
            "char" => Kw::Char,
            "if" => Kw::If,
            "else" => Kw::Else,
            "while" => Kw::While,
            "do" => Kw::Do,
            "for" => Kw::For,
            "return" => Kw::Return,
            "break" => Kw::Break,
            "continue" => Kw::Continue,
            "new" => Kw::New,
            "true" => Kw::True,
            "false" => Kw::False,
            "null" => Kw::Null,
            "import" => Kw::Import,
            "package" => Kw::Package,
            "extends" => Kw::Extends,
            "implements" => Kw::Implements,
            "throws" => Kw::Throws,
            "try" => Kw::Try,
            "catch" => Kw::Catch,
            "finally" => Kw::Finally,
            "throw" => Kw::Throw,
            "this" => Kw::This,
            "super" => Kw::Super,
            "interface" => Kw::Interface,
            "enum" => Kw::Enum,
            "switch" => Kw::Switch,
            "case" => Kw::Case,
            "default" => Kw::Default,
            "synchronized" => Kw::Synchronized,
            "instanceof" => Kw::Instanceof,
            _ => return None,
        })
    }

    pub fn is_modifier(self) -> bool {
        matches!(
            self,
            Kw::Public | Kw::Private | Kw::Protected | Kw::Static | Kw::Final | Kw::Abstract | Kw::Synchronized
        )
    }

    pub fn is_primitive(self) -> bool {
        matches!(
            self,
            Kw::Int | Kw::Long | Kw::Double | Kw::Float | Kw::Boolean | Kw::Char
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum P {
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Semi,
    Comma,
    Dot,
    Ellipsis,
    Eq,
    EqEq,
    Bang,
    BangEq,
    Lt,
    Le,
    Gt,
    Ge,
    Plus,
    Minus,
    Star,
    Slash,
    Percent,
    PlusEq,
    MinusEq,
    StarEq,
    SlashEq,
    PercentEq,
    PlusPlus,
    MinusMinus,
    AndAnd,
    OrOr,
    Amp,
    Pipe,
    Caret,
    Tilde,
    Question,
    Colon,
    ColonColon,
    Arrow,
    At,
}

impl P {
    pub fn as_str(self) -> &'static str {
        match self {
            P::LParen => "(",
            P::RParen => ")",
            P::LBrace => "{",
            P::RBrace => "}",
            P::LBracket => "[",
            P::RBracket => "]",
            P::Semi => ";",
            P::Comma => ",",
            P::Dot => ".",
            P::Ellipsis => "...",
            P::Eq => "=",
            P::EqEq => "==",
            P::Bang => "!",
            P::BangEq => "!=",
            P::Lt => "<",
            P::Le => "<=",
            P::Gt => ">",
            P::Ge => ">=",
            P::Plus => "+",
            P::Minus => "-",
            P::Star => "*",
            P::Slash => "/",
            P::Percent => "%",
            P::PlusEq => "+=",
            P::MinusEq => "-=",
            P::StarEq => "*=",
            P::SlashEq => "/=",
            P::PercentEq => "%=",
            P::PlusPlus => "++",
            P::MinusMinus => "--",
            P::AndAnd => "&&",
            P::OrOr => "||",
            P::Amp => "&",
            P::Pipe => "|",
            P::Caret => "^",
            P::Tilde => "~",
            P::Question => "?",
            P::Colon => ":",
            P::ColonColon => "::",
            P::Arrow => "->",
            P::At => "@",
        }
    }
}

// Longest match first.
const PUNCTS: &[(&str, P)] = &[
    ("...", P::Ellipsis),
    ("==", P::EqEq),
    ("!=", P::BangEq),
    ("<=", P::Le),
    (">=", P::Ge),
    ("+=", P::PlusEq),
    ("-=", P::MinusEq),
    ("*=", P::StarEq),
    ("/=", P::SlashEq),
    ("%=", P::PercentEq),
    ("++", P::PlusPlus),
    ("--", P::MinusMinus),
    ("&&", P::AndAnd),
    ("||", P::OrOr),
    ("::", P::ColonColon),
    ("->", P::Arrow),
    ("(", P::LParen),
    (")", P::RParen),
    ("{", P::LBrace),
    ("}", P::RBrace),
    ("[", P::LBracket),
    ("]", P::RBracket),
    (";", P::Semi),
    (",", P::Comma),
    (".", P::Dot),
    ("=", P::Eq),
    ("!", P::Bang),
    ("<", P::Lt),
    (">", P::Gt),
    ("+", P::Plus),
    ("-", P::Minus),
    ("*", P::Star),
    ("/", P::Slash),
    ("%", P::Percent),
    ("&", P::Amp),
    ("|", P::Pipe),
    ("^", P::Caret),
    ("~", P::Tilde),
    ("?", P::Question),
    (":", P::Colon),
    ("@", P::At),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tk {
    Ident,
    Kw(Kw),
    Int,
    Long,
    Float,
    Double,
    Char,
    Str,
    P(P),
    Unknown,
    Eof,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Token {
    pub kind: Tk,
    pub start: usize,
    pub end: usize,
    /// First token on its physical line.
    pub line_start: bool,
}

impl Token {
    pub fn text<'a>(&self, src: &'a str) -> &'a str {
        &src[self.start..self.end]
    }

    pub fn is_p(&self, p: P) -> bool {
        self.kind == Tk::P(p)
    }

    pub fn is_kw(&self, kw: Kw) -> bool {
        self.kind == Tk::Kw(kw)
    }
}

pub fn lex(unit: &SourceUnit) -> (Vec<Token>, Vec<Diagnostic>) {
    let src = unit.text();
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut diags = Vec::new();
    let mut i = 0;
    let mut at_line_start = true;

    while i < bytes.len() {
        let c = bytes[i];
        if c == b'\n' {
            at_line_start = true;
            i += 1;
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if src[i..].starts_with("//") {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        if src[i..].starts_with("/*") {
            let close = src[i + 2..].find("*/").map(|j| i + 2 + j + 2);
            match close {
                Some(end) => {
                    if src[i..end].contains('\n') {
                        at_line_start = true;
                    }
                    i = end;
                }
                None => {
                    diags.push(Diagnostic::new(unit, DiagCode::Parse, i..i + 2, "unterminated comment"));
                    i = bytes.len();
                }
            }
            continue;
        }

        let start = i;
        let kind = if c.is_ascii_alphabetic() || c == b'_' || c == b'$' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'$') {
                i += 1;
            }
            match Kw::from_ident(&src[start..i]) {
                Some(kw) => Tk::Kw(kw),
                None => Tk::Ident,
            }
        } else if c.is_ascii_digit() || (c == b'.' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            let (kind, end) = lex_number(bytes, i);
            i = end;
            kind
        } else if c == b'"' || c == b'\'' {
            let (end, closed) = lex_quoted(bytes, i, c);
            i = end;
            if !closed {
                let what = if c == b'"' { "string" } else { "character" };
                diags.push(Diagnostic::new(unit, DiagCode::Parse, start..i, format!("unterminated {what} literal")));
            } else if c == b'\'' && decode_char_literal(&src[start..i]).is_none() {
                diags.push(Diagnostic::new(unit, DiagCode::Parse, start..i, "invalid character literal"));
            }
            if c == b'"' {
                Tk::Str
            } else {
                Tk::Char
            }
        } else if let Some((text, p)) = PUNCTS.iter().find(|(text, _)| src[i..].starts_with(text)) {
            i += text.len();
            Tk::P(*p)
        } else {
            let ch = src[i..].chars().next().expect("in bounds");
            i += ch.len_utf8();
            Tk::Unknown
        };
        toks.push(Token {
            kind,
            start,
            end: i,
            line_start: at_line_start,
        });
        at_line_start = false;
    }
    toks.push(Token {
        kind: Tk::Eof,
        start: bytes.len(),
        end: bytes.len(),
        line_start: true,
    });
    (toks, diags)
}

fn lex_number(bytes: &[u8], mut i: usize) -> (Tk, usize) {
    let digit = |b: u8| b.is_ascii_digit() || b == b'_';
    if bytes[i] == b'0' && matches!(bytes.get(i + 1), Some(b'x' | b'X')) {
        i += 2;
        while i < bytes.len() && (bytes[i].is_ascii_hexdigit() || bytes[i] == b'_') {
            i += 1;
        }
        if matches!(bytes.get(i), Some(b'l' | b'L')) {
            return (Tk::Long, i + 1);
        }
        return (Tk::Int, i);
    }
    let mut floating = false;
    while i < bytes.len() && digit(bytes[i]) {
        i += 1;
    }
    if bytes.get(i) == Some(&b'.') && bytes.get(i + 1).is_none_or(|b| b.is_ascii_digit() || !b.is_ascii_alphabetic() && *b != b'.') {
        floating = true;
        i += 1;
        while i < bytes.len() && digit(bytes[i]) {
            i += 1;
        }
    }
    if matches!(bytes.get(i), Some(b'e' | b'E')) {
        let mut j = i + 1;
        if matches!(bytes.get(j), Some(b'+' | b'-')) {
            j += 1;
        }
        if bytes.get(j).is_some_and(u8::is_ascii_digit) {
            floating = true;
            i = j;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
        }
    }
    match bytes.get(i) {
        Some(b'l' | b'L') if !floating => (Tk::Long, i + 1),
        Some(b'f' | b'F') => (Tk::Float, i + 1),
        Some(b'd' | b'D') => (Tk::Double, i + 1),
        _ if floating => (Tk::Double, i),
        _ => (Tk::Int, i),
    }
}

/// Returns the end offset and whether the literal was closed on the same line.
fn lex_quoted(bytes: &[u8], start: usize, quote: u8) -> (usize, bool) {
    let mut i = start + 1;
    while i < bytes.len() {
        match bytes[i] {
            b'\\' => {
                if bytes.get(i + 1).is_some_and(|b| *b != b'\n') {
                    i += 2;
                } else {
                    i += 1;
                }
            }
            b'\n' => return (i, false),
            b if b == quote => return (i + 1, true),
            _ => i += 1,
        }
    }
    (i.min(bytes.len()), false)
}

/// Decodes the contents of a quoted literal, including the quotes.
pub fn unescape(lit: &str) -> String {
    let inner = lit.get(1..lit.len().saturating_sub(1)).unwrap_or("");
    let mut out = String::with_capacity(inner.len());
    let mut chars = inner.chars().peekable();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('n') => out.push('\n'),
            Some('t') => out.push('\t'),
            Some('r') => out.push('\r'),
            Some('b') => out.push('\u{8}'),
            Some('f') => out.push('\u{c}'),
            Some('0') => out.push('\0'),
            Some('u') => {
                while chars.peek() == Some(&'u') {
                    chars.next();
                }
                let hex: String = chars.by_ref().take(4).collect();
                match u32::from_str_radix(&hex, 16).ok().and_then(char::from_u32) {
                    Some(ch) => out.push(ch),
                    None => out.push('\u{FFFD}'),
                }
            }
            Some(other) => out.push(other),
            None => out.push('\\'),
        }
    }
    out
}

pub fn decode_char_literal(lit: &str) -> Option<char> {
    if lit.len() < 3 || !lit.ends_with('\'') {
        return None;
    }
    let s = unescape(lit);
    let mut it = s.chars();
    let c = it.next()?;
    it.next().is_none().then_some(c)
}
