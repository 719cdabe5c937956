//! Error-recovering recursive-descent parser.
//!
//! The parser always produces a tree. A missing token is reported and treated
//! as if it had been present; an unexpected token is reported and skipped;
//! anything else becomes an `Error` node followed by statement-level
//! resynchronisation (`;`, `}`, or the next line that starts a statement).

use super::ast::*;
use super::diag::{DiagCode, Diagnostic, Hint};
use super::lexer::{decode_char_literal, lex, unescape, Kw, Tk, Token, P};
use super::source::SourceUnit;

const MAX_DEPTH: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// A full compilation unit: imports and classes only at top level.
    Unit,
    /// A loose snippet: methods and statements are accepted at top level.
    Snippet,
}

/// Parses a compilation unit.
pub fn parse(unit: &SourceUnit) -> (CompilationUnit, Vec<Diagnostic>) {
    parse_with(unit, Mode::Unit)
}

/// Parses loose snippet text (statements, methods, classes in any mix).
pub fn parse_snippet(unit: &SourceUnit) -> (CompilationUnit, Vec<Diagnostic>) {
    parse_with(unit, Mode::Snippet)
}

pub fn parse_with(unit: &SourceUnit, mode: Mode) -> (CompilationUnit, Vec<Diagnostic>) {
    let (toks, lex_diags) = lex(unit);
    let mut p = Parser {
        unit,
        src: unit.text(),
        toks,
        pos: 0,
        diags: lex_diags,
        depth: 0,
        last_err: None,
        mode,
    };
    let cu = p.compilation_unit();
    let mut diags = p.diags;
    diags.sort_by_key(|d| (d.range.start, d.range.end));
    (cu, diags)
}

struct Parser<'a> {
    unit: &'a SourceUnit,
    src: &'a str,
    toks: Vec<Token>,
    pos: usize,
    diags: Vec<Diagnostic>,
    depth: usize,
    /// Token index of the last reported error; a second error there is suppressed.
    last_err: Option<usize>,
    mode: Mode,
}

fn assign_op(tok: &Token) -> Option<Option<BinOp>> {
    Some(match tok.kind {
        Tk::P(P::Eq) => None,
        Tk::P(P::PlusEq) => Some(BinOp::Add),
        Tk::P(P::MinusEq) => Some(BinOp::Sub),
        Tk::P(P::StarEq) => Some(BinOp::Mul),
        Tk::P(P::SlashEq) => Some(BinOp::Div),
        Tk::P(P::PercentEq) => Some(BinOp::Rem),
        _ => return None,
    })
}

fn binop(tok: &Token) -> Option<(BinOp, u8)> {
    Some(match tok.kind {
        Tk::P(P::OrOr) => (BinOp::Or, 1),
        Tk::P(P::AndAnd) => (BinOp::And, 2),
        Tk::P(P::Pipe) => (BinOp::BitOr, 3),
        Tk::P(P::Caret) => (BinOp::BitXor, 4),
        Tk::P(P::Amp) => (BinOp::BitAnd, 5),
        Tk::P(P::EqEq) => (BinOp::Eq, 6),
        Tk::P(P::BangEq) => (BinOp::Ne, 6),
        Tk::P(P::Lt) => (BinOp::Lt, 7),
        Tk::P(P::Le) => (BinOp::Le, 7),
        Tk::P(P::Gt) => (BinOp::Gt, 7),
        Tk::P(P::Ge) => (BinOp::Ge, 7),
        Tk::P(P::Plus) => (BinOp::Add, 8),
        Tk::P(P::Minus) => (BinOp::Sub, 8),
        Tk::P(P::Star) => (BinOp::Mul, 9),
        Tk::P(P::Slash) => (BinOp::Div, 9),
        Tk::P(P::Percent) => (BinOp::Rem, 9),
        _ => return None,
    })
}

fn prim_type(kw: Kw) -> Option<TypeName> {
    Some(match kw {
        Kw::Int => TypeName::Int,
        Kw::Long => TypeName::Long,
        Kw::Double => TypeName::Double,
        Kw::Float => TypeName::Float,
        Kw::Boolean => TypeName::Boolean,
        Kw::Char => TypeName::Char,
        _ => return None,
    })
}

/// Tokens that may begin a statement when found at the start of a line.
fn starts_stmt(t: &Token) -> bool {
    match t.kind {
        Tk::Ident => true,
        Tk::Kw(kw) => !matches!(
            kw,
            Kw::Else | Kw::Catch | Kw::Finally | Kw::Instanceof | Kw::Extends | Kw::Implements | Kw::Throws
        ),
        _ => false,
    }
}

impl<'a> Parser<'a> {
    // ----- token helpers -------------------------------------------------

    fn peek(&self) -> Token {
        self.toks[self.pos]
    }

    fn peek_at(&self, n: usize) -> Token {
        self.toks[(self.pos + n).min(self.toks.len() - 1)]
    }

    fn tok(&self, idx: usize) -> Token {
        self.toks[idx.min(self.toks.len() - 1)]
    }

    fn bump(&mut self) -> Token {
        let t = self.peek();
        if t.kind != Tk::Eof {
            self.pos += 1;
        }
        t
    }

    fn at_p(&self, p: P) -> bool {
        self.peek().is_p(p)
    }

    fn at_kw(&self, kw: Kw) -> bool {
        self.peek().is_kw(kw)
    }

    fn eat_p(&mut self, p: P) -> bool {
        if self.at_p(p) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn prev_end(&self) -> usize {
        if self.pos == 0 {
            0
        } else {
            self.toks[self.pos - 1].end
        }
    }

    fn text(&self, t: Token) -> &'a str {
        t.text(self.src)
    }

    // ----- diagnostics ---------------------------------------------------

    fn report(&mut self, diag: Diagnostic) {
        if self.last_err == Some(self.pos) {
            return;
        }
        self.last_err = Some(self.pos);
        self.diags.push(diag);
    }

    fn error_at(&mut self, code: DiagCode, t: Token, msg: impl Into<String>) {
        let d = Diagnostic::new(self.unit, code, t.start..t.end, msg).with_token(self.text(t));
        self.report(d);
    }

    /// Reports a missing token right after the previous token; nothing is consumed.
    fn missing(&mut self, what: &str) {
        let at = self.prev_end();
        let d = Diagnostic::new(self.unit, DiagCode::MissingToken, at..at, format!("missing `{what}`"))
            .with_hint(Hint::ExpectedToken { token: what.to_string() });
        self.report(d);
    }

    fn expect_p(&mut self, p: P) -> bool {
        if self.eat_p(p) {
            true
        } else {
            self.missing(p.as_str());
            false
        }
    }

    fn unexpected(&mut self) -> Token {
        let t = self.peek();
        if t.kind == Tk::Eof {
            self.missing("}");
            return t;
        }
        let msg = format!("unexpected token `{}`", self.text(t));
        self.error_at(DiagCode::UnexpectedToken, t, msg);
        self.bump()
    }

    fn expect_semi(&mut self) {
        if self.eat_p(P::Semi) {
            return;
        }
        let t = self.peek();
        if t.kind == Tk::Eof || t.is_p(P::RBrace) || t.line_start {
            self.missing(";");
        } else {
            let msg = format!("unexpected token `{}`", self.text(t));
            self.error_at(DiagCode::UnexpectedToken, t, msg);
            self.sync_stmt();
        }
    }

    /// Skips to a plausible statement boundary.
    fn sync_stmt(&mut self) {
        let start = self.pos;
        loop {
            let t = self.peek();
            match t.kind {
                Tk::Eof | Tk::P(P::RBrace) => return,
                Tk::P(P::Semi) => {
                    self.bump();
                    return;
                }
                Tk::P(P::LBrace) if self.pos > start => return,
                _ if self.pos > start && t.line_start && starts_stmt(&t) => return,
                _ => {
                    self.bump();
                }
            }
        }
    }

    /// Skips a balanced `open ... close` group starting at the current token.
    fn skip_balanced(&mut self, open: P, close: P) {
        if !self.at_p(open) {
            return;
        }
        let mut depth = 0usize;
        loop {
            let t = self.bump();
            match t.kind {
                Tk::Eof => {
                    self.missing(close.as_str());
                    return;
                }
                Tk::P(p) if p == open => depth += 1,
                Tk::P(p) if p == close => {
                    depth -= 1;
                    if depth == 0 {
                        return;
                    }
                }
                _ => {}
            }
        }
    }

    // ----- lookahead -----------------------------------------------------

    /// If a type starts at token `k`, returns the index just past it.
    fn scan_type(&self, mut k: usize) -> Option<usize> {
        let t = self.tok(k);
        match t.kind {
            Tk::Kw(kw) if kw.is_primitive() => k += 1,
            Tk::Ident => {
                k += 1;
                while self.tok(k).is_p(P::Dot) && self.tok(k + 1).kind == Tk::Ident {
                    k += 2;
                }
                if self.tok(k).is_p(P::Lt) {
                    k = self.scan_type_args(k)?;
                }
            }
            _ => return None,
        }
        while self.tok(k).is_p(P::LBracket) && self.tok(k + 1).is_p(P::RBracket) {
            k += 2;
        }
        Some(k)
    }

    /// Scans `<...>` generic arguments on one line.
    fn scan_type_args(&self, mut k: usize) -> Option<usize> {
        let mut depth = 0i32;
        loop {
            let t = self.tok(k);
            match t.kind {
                Tk::P(P::Lt) => depth += 1,
                Tk::P(P::Gt) => {
                    depth -= 1;
                    if depth == 0 {
                        return Some(k + 1);
                    }
                }
                Tk::Ident | Tk::P(P::Comma | P::Dot | P::Question | P::LBracket | P::RBracket) => {}
                Tk::Kw(kw) if kw.is_primitive() || kw == Kw::Extends || kw == Kw::Super => {}
                _ => return None,
            }
            k += 1;
        }
    }

    /// Kind of declaration starting at the current token (after modifiers).
    fn decl_kind(&self) -> DeclKind {
        if self.at_kw(Kw::Void) {
            return DeclKind::Method;
        }
        let Some(after) = self.scan_type(self.pos) else {
            return DeclKind::None;
        };
        if self.tok(after).kind != Tk::Ident {
            return DeclKind::None;
        }
        if self.tok(after + 1).is_p(P::LParen) {
            DeclKind::Method
        } else {
            DeclKind::Variable
        }
    }

    fn skip_modifiers_at(&self, mut k: usize) -> usize {
        loop {
            let t = self.tok(k);
            match t.kind {
                Tk::Kw(kw) if kw.is_modifier() => k += 1,
                Tk::P(P::At) if self.tok(k + 1).kind == Tk::Ident => {
                    k += 2;
                    if self.tok(k).is_p(P::LParen) {
                        let mut depth = 0;
                        loop {
                            let t = self.tok(k);
                            if t.kind == Tk::Eof {
                                return k;
                            }
                            k += 1;
                            if t.is_p(P::LParen) {
                                depth += 1;
                            } else if t.is_p(P::RParen) {
                                depth -= 1;
                                if depth == 0 {
                                    break;
                                }
                            }
                        }
                    }
                }
                _ => return k,
            }
        }
    }

    // ----- top level -----------------------------------------------------

    fn compilation_unit(&mut self) -> CompilationUnit {
        let mut items = Vec::new();
        let mut seen_decl = false;
        while self.peek().kind != Tk::Eof {
            let before = self.pos;
            let t = self.peek();
            let item = match t.kind {
                Tk::Kw(Kw::Package) => {
                    let start = t.start;
                    if seen_decl && self.mode == Mode::Unit {
                        self.error_at(DiagCode::Parse, t, "package declaration must come first");
                    }
                    self.bump();
                    self.qualified_name();
                    self.expect_semi();
                    Item::Package(start..self.prev_end())
                }
                Tk::Kw(Kw::Import) => {
                    let imp = self.import_decl();
                    if seen_decl && self.mode == Mode::Unit {
                        let d = Diagnostic::new(
                            self.unit,
                            DiagCode::MisplacedImport,
                            imp.span.clone(),
                            "import declarations must precede type declarations",
                        );
                        self.diags.push(d);
                    }
                    Item::Import(imp)
                }
                Tk::P(P::RBrace) => {
                    self.unexpected();
                    Item::Error(t.start..t.end)
                }
                _ => {
                    let k = self.skip_modifiers_at(self.pos);
                    if self.tok(k).is_kw(Kw::Class) {
                        seen_decl = true;
                        let modifiers = self.modifiers();
                        Item::Class(self.class_decl(modifiers))
                    } else if self.mode == Mode::Snippet {
                        self.loose_item()
                    } else {
                        self.error_at(DiagCode::Parse, t, "class declaration expected");
                        seen_decl = true;
                        self.loose_item()
                    }
                }
            };
            items.push(item);
            if self.pos == before {
                self.unexpected();
            }
        }
        CompilationUnit { items }
    }

    /// A method or statement outside a class.
    fn loose_item(&mut self) -> Item {
        let k = self.skip_modifiers_at(self.pos);
        let save = self.pos;
        self.pos = k;
        let kind = self.decl_kind();
        self.pos = save;
        if kind == DeclKind::Method {
            let modifiers = self.modifiers();
            Item::Method(self.method_decl(modifiers))
        } else {
            Item::Stmt(self.statement())
        }
    }

    fn qualified_name(&mut self) -> Vec<String> {
        let mut path = Vec::new();
        if self.peek().kind == Tk::Ident {
            let t = self.bump();
            path.push(self.text(t).to_string());
            while self.at_p(P::Dot) && self.peek_at(1).kind == Tk::Ident {
                self.bump();
                let t = self.bump();
                path.push(self.text(t).to_string());
            }
        } else {
            let t = self.peek();
            self.error_at(DiagCode::Parse, t, "name expected");
        }
        path
    }

    fn import_decl(&mut self) -> ImportDecl {
        let start = self.bump().start;
        if self.at_kw(Kw::Static) {
            let t = self.bump();
            self.error_at(DiagCode::Parse, t, "static imports are not supported");
        }
        let path = self.qualified_name();
        let mut wildcard = false;
        if self.at_p(P::Dot) && self.peek_at(1).is_p(P::Star) {
            self.bump();
            self.bump();
            wildcard = true;
        }
        self.expect_semi();
        ImportDecl {
            path,
            wildcard,
            span: start..self.prev_end(),
        }
    }

    fn modifiers(&mut self) -> Modifiers {
        let mut m = Modifiers::default();
        loop {
            let t = self.peek();
            match t.kind {
                Tk::Kw(Kw::Static) => m.is_static = true,
                Tk::Kw(Kw::Final) => m.is_final = true,
                Tk::Kw(kw) if kw.is_modifier() => m.others.push(self.text(t).to_string()),
                Tk::P(P::At) if self.peek_at(1).kind == Tk::Ident => {
                    self.bump();
                    let name = self.bump();
                    m.annotations.push(self.text(name).to_string());
                    self.skip_balanced(P::LParen, P::RParen);
                    continue;
                }
                _ => return m,
            }
            self.bump();
        }
    }

    fn ident(&mut self) -> Ident {
        let t = self.peek();
        if t.kind == Tk::Ident {
            self.bump();
            Ident {
                name: self.text(t).to_string(),
                span: t.start..t.end,
            }
        } else {
            self.error_at(DiagCode::Parse, t, "identifier expected");
            let at = self.prev_end();
            Ident {
                name: String::new(),
                span: at..at,
            }
        }
    }

    fn type_ref(&mut self) -> TypeRef {
        let t = self.peek();
        let start = t.start;
        let name = match t.kind {
            Tk::Kw(kw) if prim_type(kw).is_some() => {
                self.bump();
                prim_type(kw).expect("checked")
            }
            Tk::Ident => {
                let path = self.qualified_name();
                if self.at_p(P::Lt) {
                    let lt = self.peek();
                    self.error_at(DiagCode::Parse, lt, "generic type arguments are not supported");
                    if let Some(end) = self.scan_type_args(self.pos) {
                        self.pos = end;
                    }
                }
                TypeName::Named(path.join("."))
            }
            _ => {
                self.error_at(DiagCode::Parse, t, "type expected");
                TypeName::Named(String::new())
            }
        };
        let mut dims = 0;
        while self.at_p(P::LBracket) && self.peek_at(1).is_p(P::RBracket) {
            self.bump();
            self.bump();
            dims += 1;
        }
        TypeRef {
            name,
            dims,
            span: start..self.prev_end(),
        }
    }

    // ----- classes and methods -------------------------------------------

    fn class_decl(&mut self, modifiers: Modifiers) -> ClassDecl {
        let start = self.peek().start;
        let header_start = self.header_start(start);
        self.bump(); // class
        let name = self.ident();
        if self.at_kw(Kw::Extends) || self.at_kw(Kw::Implements) {
            let t = self.peek();
            self.error_at(DiagCode::Parse, t, "inheritance is not supported");
            while !matches!(self.peek().kind, Tk::P(P::LBrace) | Tk::Eof | Tk::P(P::Semi) | Tk::P(P::RBrace)) {
                self.bump();
            }
        }
        let mut members = Vec::new();
        let mut close = None;
        if !self.at_p(P::LBrace) {
            self.missing("{");
            return ClassDecl {
                modifiers,
                name,
                members,
                span: header_start..self.prev_end(),
                header: header_start..self.prev_end(),
                close,
            };
        }
        let header_end = self.bump().end;
        loop {
            let t = self.peek();
            match t.kind {
                Tk::P(P::RBrace) => {
                    self.bump();
                    close = Some(t.start..t.end);
                    break;
                }
                Tk::Eof => {
                    self.missing("}");
                    break;
                }
                Tk::P(P::Semi) => {
                    self.bump();
                }
                _ => {
                    let before = self.pos;
                    let m = self.member(&name.name);
                    members.push(m);
                    if self.pos == before {
                        let t = self.unexpected();
                        members.push(Member::Error(t.start..t.end));
                    }
                }
            }
        }
        ClassDecl {
            modifiers,
            name,
            members,
            span: header_start..self.prev_end(),
            header: header_start..header_end,
            close,
        }
    }

    /// Start of the modifier run that precedes the token at `kw_start`.
    fn header_start(&self, kw_start: usize) -> usize {
        let mut k = self.pos;
        let mut start = kw_start;
        while k > 0 {
            let t = self.toks[k - 1];
            let is_mod = matches!(t.kind, Tk::Kw(kw) if kw.is_modifier());
            let is_ann = t.kind == Tk::Ident && k >= 2 && self.toks[k - 2].is_p(P::At);
            if is_mod {
                start = t.start;
                k -= 1;
            } else if is_ann {
                start = self.toks[k - 2].start;
                k -= 2;
            } else if t.is_p(P::At) {
                k -= 1;
            } else {
                break;
            }
        }
        start
    }

    fn member(&mut self, class_name: &str) -> Member {
        let start = self.peek().start;
        let modifiers = self.modifiers();
        let t = self.peek();
        match t.kind {
            Tk::Kw(Kw::Class) => Member::Class(self.class_decl(modifiers)),
            Tk::Kw(Kw::Interface | Kw::Enum) => {
                self.error_at(DiagCode::Parse, t, format!("`{}` declarations are not supported", self.text(t)));
                while !matches!(self.peek().kind, Tk::P(P::LBrace) | Tk::Eof | Tk::P(P::RBrace)) {
                    self.bump();
                }
                self.skip_balanced(P::LBrace, P::RBrace);
                Member::Error(start..self.prev_end())
            }
            Tk::P(P::LBrace) => {
                self.error_at(DiagCode::Parse, t, "initializer blocks are not supported");
                self.skip_balanced(P::LBrace, P::RBrace);
                Member::Error(start..self.prev_end())
            }
            Tk::Ident if self.text(t) == class_name && self.peek_at(1).is_p(P::LParen) => {
                self.error_at(DiagCode::Parse, t, "constructors are not supported");
                let m = self.method_body_after_name(modifiers, None, start);
                Member::Error(m.span)
            }
            _ => match self.decl_kind() {
                DeclKind::Method => Member::Method(self.method_decl(modifiers)),
                DeclKind::Variable => {
                    let ty = self.type_ref();
                    let declarators = self.declarators();
                    self.expect_semi();
                    Member::Field(FieldDecl {
                        modifiers,
                        ty,
                        declarators,
                        span: start..self.prev_end(),
                    })
                }
                DeclKind::None => {
                    self.error_at(DiagCode::Parse, t, "member declaration expected");
                    self.sync_stmt();
                    if self.at_p(P::LBrace) {
                        self.skip_balanced(P::LBrace, P::RBrace);
                    }
                    Member::Error(start..self.prev_end())
                }
            },
        }
    }

    /// Parses a method declaration; modifiers were already consumed.
    fn method_decl(&mut self, modifiers: Modifiers) -> MethodDecl {
        let start = self.header_start(self.peek().start);
        let ret = if self.at_kw(Kw::Void) {
            self.bump();
            None
        } else {
            Some(self.type_ref())
        };
        self.method_body_after_name(modifiers, ret, start)
    }

    fn method_body_after_name(&mut self, modifiers: Modifiers, ret: Option<TypeRef>, start: usize) -> MethodDecl {
        let name = self.ident();
        let mut params = Vec::new();
        if self.expect_p(P::LParen) {
            if !self.at_p(P::RParen) {
                loop {
                    if self.at_kw(Kw::Final) {
                        self.bump();
                    }
                    let ty = self.type_ref();
                    if self.at_p(P::Ellipsis) {
                        let t = self.peek();
                        self.error_at(DiagCode::Parse, t, "variable arity parameters are not supported");
                        self.bump();
                    }
                    let name = self.ident();
                    let mut ty = ty;
                    while self.at_p(P::LBracket) && self.peek_at(1).is_p(P::RBracket) {
                        self.bump();
                        self.bump();
                        ty.dims += 1;
                    }
                    params.push(Param { ty, name });
                    if !self.eat_p(P::Comma) {
                        break;
                    }
                }
            }
            if !self.eat_p(P::RParen) {
                self.missing(")");
                while !matches!(
                    self.peek().kind,
                    Tk::P(P::RParen | P::LBrace | P::RBrace | P::Semi) | Tk::Eof
                ) {
                    self.bump();
                }
                self.eat_p(P::RParen);
            }
        }
        if self.at_kw(Kw::Throws) {
            let t = self.peek();
            self.error_at(DiagCode::Parse, t, "`throws` clauses are not supported");
            self.bump();
            while matches!(self.peek().kind, Tk::Ident | Tk::P(P::Comma | P::Dot)) {
                self.bump();
            }
        }
        let (body, header_end) = if self.at_p(P::LBrace) {
            let end = self.peek().end;
            (Some(self.block()), end)
        } else {
            if !self.eat_p(P::Semi) {
                self.missing("{");
            }
            (None, self.prev_end())
        };
        MethodDecl {
            modifiers,
            ret,
            name,
            params,
            body,
            span: start..self.prev_end(),
            header: start..header_end,
        }
    }

    fn declarators(&mut self) -> Vec<Declarator> {
        let mut out = Vec::new();
        loop {
            let name = self.ident();
            let start = name.span.start;
            let mut dims = 0;
            while self.at_p(P::LBracket) && self.peek_at(1).is_p(P::RBracket) {
                self.bump();
                self.bump();
                dims += 1;
            }
            let init = if self.eat_p(P::Eq) {
                Some(self.var_init())
            } else {
                None
            };
            out.push(Declarator {
                name,
                dims,
                init,
                span: start..self.prev_end(),
            });
            if !self.eat_p(P::Comma) {
                return out;
            }
        }
    }

    fn var_init(&mut self) -> Expr {
        if self.at_p(P::LBrace) {
            let start = self.bump().start;
            let mut items = Vec::new();
            while !self.at_p(P::RBrace) && self.peek().kind != Tk::Eof {
                let before = self.pos;
                items.push(self.var_init());
                if !self.eat_p(P::Comma) || self.pos == before {
                    break;
                }
            }
            self.expect_p(P::RBrace);
            Expr {
                kind: ExprKind::ArrayInit(items),
                span: start..self.prev_end(),
            }
        } else {
            self.expr()
        }
    }

    // ----- statements ----------------------------------------------------

    fn block(&mut self) -> Block {
        let open = self.bump();
        let mut stmts = Vec::new();
        let mut close = None;
        self.depth += 1;
        loop {
            let t = self.peek();
            match t.kind {
                Tk::P(P::RBrace) => {
                    self.bump();
                    close = Some(t.start..t.end);
                    break;
                }
                Tk::Eof => {
                    self.missing("}");
                    break;
                }
                _ => {
                    let before = self.pos;
                    stmts.push(self.statement());
                    if self.pos == before {
                        let t = self.unexpected();
                        stmts.push(Stmt {
                            kind: StmtKind::Error,
                            span: t.start..t.end,
                        });
                    }
                }
            }
        }
        self.depth -= 1;
        Block {
            stmts,
            span: open.start..self.prev_end(),
            close,
        }
    }

    fn statement(&mut self) -> Stmt {
        let t = self.peek();
        if self.depth > MAX_DEPTH {
            self.error_at(DiagCode::Parse, t, "nesting too deep");
            self.bump();
            self.sync_stmt();
            return self.stmt_from(t.start, StmtKind::Error);
        }
        self.depth += 1;
        let s = self.statement_inner();
        self.depth -= 1;
        s
    }

    fn stmt_from(&self, start: usize, kind: StmtKind) -> Stmt {
        Stmt {
            kind,
            span: start..self.prev_end().max(start),
        }
    }

    fn paren_cond(&mut self) -> Expr {
        if self.expect_p(P::LParen) {
            let e = self.expr();
            self.expect_p(P::RParen);
            e
        } else {
            self.expr()
        }
    }

    fn statement_inner(&mut self) -> Stmt {
        let t = self.peek();
        let start = t.start;
        match t.kind {
            Tk::P(P::LBrace) => {
                let b = self.block();
                self.stmt_from(start, StmtKind::Block(b))
            }
            Tk::P(P::Semi) => {
                self.bump();
                self.stmt_from(start, StmtKind::Empty)
            }
            Tk::Kw(Kw::If) => {
                self.bump();
                let cond = self.paren_cond();
                let then = Box::new(self.statement());
                let els = if self.at_kw(Kw::Else) {
                    self.bump();
                    Some(Box::new(self.statement()))
                } else {
                    None
                };
                self.stmt_from(start, StmtKind::If { cond, then, els })
            }
            Tk::Kw(Kw::While) => {
                self.bump();
                let cond = self.paren_cond();
                let body = Box::new(self.statement());
                self.stmt_from(start, StmtKind::While { cond, body })
            }
            Tk::Kw(Kw::Do) => {
                self.bump();
                let body = Box::new(self.statement());
                if self.at_kw(Kw::While) {
                    self.bump();
                } else {
                    self.missing("while");
                }
                let cond = self.paren_cond();
                self.expect_semi();
                self.stmt_from(start, StmtKind::DoWhile { body, cond })
            }
            Tk::Kw(Kw::For) => self.for_stmt(),
            Tk::Kw(Kw::Return) => {
                self.bump();
                let value = if self.at_p(P::Semi) || self.at_p(P::RBrace) || self.peek().line_start {
                    None
                } else {
                    Some(self.expr())
                };
                self.expect_semi();
                self.stmt_from(start, StmtKind::Return(value))
            }
            Tk::Kw(Kw::Break) | Tk::Kw(Kw::Continue) => {
                self.bump();
                if self.peek().kind == Tk::Ident && !self.peek().line_start {
                    let l = self.peek();
                    self.error_at(DiagCode::Parse, l, "labels are not supported");
                    self.bump();
                }
                self.expect_semi();
                let kind = if t.is_kw(Kw::Break) { StmtKind::Break } else { StmtKind::Continue };
                self.stmt_from(start, kind)
            }
            Tk::Kw(Kw::Import) => {
                let imp = self.import_decl();
                let d = Diagnostic::new(
                    self.unit,
                    DiagCode::MisplacedImport,
                    imp.span.clone(),
                    format!("import `{}` is not allowed inside a method body", imp.qualified()),
                );
                self.diags.push(d);
                self.stmt_from(start, StmtKind::Import(imp))
            }
            Tk::Kw(Kw::Package) => {
                self.error_at(DiagCode::Parse, t, "package declaration is not allowed here");
                self.bump();
                self.qualified_name();
                self.expect_semi();
                self.stmt_from(start, StmtKind::Error)
            }
            Tk::Kw(Kw::Try) | Tk::Kw(Kw::Finally) => {
                self.error_at(DiagCode::Parse, t, format!("`{}` blocks are not supported", self.text(t)));
                self.bump();
                if self.at_p(P::LBrace) {
                    let b = self.block();
                    return self.stmt_from(start, StmtKind::Block(b));
                }
                self.stmt_from(start, StmtKind::Error)
            }
            Tk::Kw(Kw::Catch) => {
                self.error_at(DiagCode::Parse, t, "`catch` blocks are not supported");
                self.bump();
                self.skip_balanced(P::LParen, P::RParen);
                if self.at_p(P::LBrace) {
                    let b = self.block();
                    return self.stmt_from(start, StmtKind::Block(b));
                }
                self.stmt_from(start, StmtKind::Error)
            }
            Tk::Kw(Kw::Switch) | Tk::Kw(Kw::Synchronized) if !self.peek_at(1).is_kw(Kw::Static) => {
                self.error_at(DiagCode::Parse, t, format!("`{}` statements are not supported", self.text(t)));
                self.bump();
                self.skip_balanced(P::LParen, P::RParen);
                self.skip_balanced(P::LBrace, P::RBrace);
                self.stmt_from(start, StmtKind::Error)
            }
            Tk::Kw(Kw::Throw) | Tk::Kw(Kw::Case) | Tk::Kw(Kw::Default) | Tk::Kw(Kw::Interface) | Tk::Kw(Kw::Enum) => {
                self.error_at(DiagCode::Parse, t, format!("`{}` is not supported", self.text(t)));
                self.bump();
                self.sync_stmt();
                self.stmt_from(start, StmtKind::Error)
            }
            Tk::Kw(Kw::Else) => {
                self.error_at(DiagCode::Parse, t, "`else` without `if`");
                self.bump();
                self.statement()
            }
            _ => self.decl_or_expr_stmt(),
        }
    }

    fn decl_or_expr_stmt(&mut self) -> Stmt {
        let start = self.peek().start;
        let after_mods = self.skip_modifiers_at(self.pos);
        let has_mods = after_mods > self.pos;
        if self.tok(after_mods).is_kw(Kw::Class) {
            let modifiers = self.modifiers();
            let t = self.peek();
            self.error_at(DiagCode::Parse, t, "class declarations are not allowed inside a method body");
            let c = self.class_decl(modifiers);
            return self.stmt_from(start, StmtKind::Class(c));
        }
        let save = self.pos;
        self.pos = after_mods;
        let kind = self.decl_kind();
        self.pos = save;
        match kind {
            DeclKind::Method => {
                let modifiers = self.modifiers();
                let m = self.method_decl(modifiers);
                self.stmt_from(start, StmtKind::Method(m))
            }
            DeclKind::Variable => {
                let first = self.peek();
                let modifiers = self.modifiers();
                if !modifiers.others.is_empty() || modifiers.is_static {
                    self.error_at(DiagCode::Parse, first, "illegal modifier for a local variable");
                }
                let s = self.local_decl(start, modifiers);
                self.expect_semi();
                Stmt {
                    span: start..self.prev_end(),
                    ..s
                }
            }
            DeclKind::None if has_mods => {
                let t = self.peek();
                self.modifiers();
                self.error_at(DiagCode::Parse, t, "declaration expected after modifiers");
                self.sync_stmt();
                self.stmt_from(start, StmtKind::Error)
            }
            DeclKind::None => self.expr_stmt(),
        }
    }

    fn local_decl(&mut self, start: usize, modifiers: Modifiers) -> Stmt {
        let ty = self.type_ref();
        let declarators = self.declarators();
        self.stmt_from(
            start,
            StmtKind::Local {
                modifiers,
                ty,
                declarators,
            },
        )
    }

    fn expr_stmt(&mut self) -> Stmt {
        let t = self.peek();
        let start = t.start;
        let can_start = matches!(
            t.kind,
            Tk::Ident
                | Tk::Int
                | Tk::Long
                | Tk::Float
                | Tk::Double
                | Tk::Char
                | Tk::Str
                | Tk::Kw(Kw::New | Kw::This | Kw::Super | Kw::True | Kw::False | Kw::Null)
                | Tk::P(P::LParen | P::PlusPlus | P::MinusMinus | P::Minus | P::Plus | P::Bang)
        );
        if !can_start {
            self.unexpected();
            return self.stmt_from(start, StmtKind::Error);
        }
        let e = self.expr();
        if !e.is_error() && !is_statement_expr(&e) {
            let d = Diagnostic::new(self.unit, DiagCode::Parse, e.span.clone(), "not a statement");
            self.report(d);
        }
        self.expect_semi();
        self.stmt_from(start, StmtKind::Expr(e))
    }

    fn for_stmt(&mut self) -> Stmt {
        let start = self.bump().start;
        if !self.expect_p(P::LParen) {
            self.sync_stmt();
            return self.stmt_from(start, StmtKind::Error);
        }
        let mut init = Vec::new();
        if !self.at_p(P::Semi) {
            let save = self.pos;
            let k = self.skip_modifiers_at(self.pos);
            self.pos = k;
            let kind = self.decl_kind();
            self.pos = save;
            if kind == DeclKind::Variable {
                let decl_start = self.peek().start;
                let modifiers = self.modifiers();
                // for-each: `for (T x : expr)`
                let after = self.scan_type(self.pos).unwrap_or(self.pos);
                if self.tok(after + 1).is_p(P::Colon) {
                    let ty = self.type_ref();
                    let name = self.ident();
                    self.bump(); // :
                    let iter = self.expr();
                    self.expect_p(P::RParen);
                    let body = Box::new(self.statement());
                    return self.stmt_from(start, StmtKind::ForEach { ty, name, iter, body });
                }
                init.push(self.local_decl(decl_start, modifiers));
            } else {
                loop {
                    let e = self.expr();
                    let span = e.span.clone();
                    init.push(Stmt {
                        kind: StmtKind::Expr(e),
                        span,
                    });
                    if !self.eat_p(P::Comma) {
                        break;
                    }
                }
            }
        }
        self.expect_p(P::Semi);
        let cond = if self.at_p(P::Semi) { None } else { Some(self.expr()) };
        self.expect_p(P::Semi);
        let mut update = Vec::new();
        if !self.at_p(P::RParen) {
            loop {
                update.push(self.expr());
                if !self.eat_p(P::Comma) {
                    break;
                }
            }
        }
        self.expect_p(P::RParen);
        let body = Box::new(self.statement());
        self.stmt_from(
            start,
            StmtKind::For {
                init,
                cond,
                update,
                body,
            },
        )
    }

    // ----- expressions ---------------------------------------------------

    fn expr(&mut self) -> Expr {
        if self.depth > MAX_DEPTH {
            let t = self.peek();
            self.error_at(DiagCode::Parse, t, "nesting too deep");
            self.bump();
            return self.error_expr(t.start);
        }
        self.depth += 1;
        let e = self.assignment();
        self.depth -= 1;
        e
    }

    fn error_expr(&self, start: usize) -> Expr {
        Expr {
            kind: ExprKind::Error,
            span: start..self.prev_end().max(start),
        }
    }

    fn assignment(&mut self) -> Expr {
        let lhs = self.ternary();
        if let Some(op) = assign_op(&self.peek()) {
            self.bump();
            let value = self.expr();
            let span = lhs.span.start..value.span.end.max(self.prev_end());
            return Expr {
                kind: ExprKind::Assign {
                    op,
                    target: Box::new(lhs),
                    value: Box::new(value),
                },
                span,
            };
        }
        lhs
    }

    fn ternary(&mut self) -> Expr {
        let cond = self.binary(1);
        if !self.eat_p(P::Question) {
            return cond;
        }
        let then = self.expr();
        self.expect_p(P::Colon);
        let els = self.ternary();
        let span = cond.span.start..self.prev_end();
        Expr {
            kind: ExprKind::Cond {
                cond: Box::new(cond),
                then: Box::new(then),
                els: Box::new(els),
            },
            span,
        }
    }

    fn binary(&mut self, min_prec: u8) -> Expr {
        let mut lhs = self.unary();
        loop {
            if self.at_kw(Kw::Instanceof) && min_prec <= 7 {
                let t = self.bump();
                self.error_at(DiagCode::Parse, t, "`instanceof` is not supported");
                self.type_ref();
                lhs = self.error_expr(lhs.span.start);
                continue;
            }
            let Some((op, prec)) = binop(&self.peek()) else {
                return lhs;
            };
            if prec < min_prec {
                return lhs;
            }
            self.bump();
            let rhs = self.binary(prec + 1);
            let span = lhs.span.start..self.prev_end();
            lhs = Expr {
                kind: ExprKind::Binary {
                    op,
                    lhs: Box::new(lhs),
                    rhs: Box::new(rhs),
                },
                span,
            };
        }
    }

    fn unary(&mut self) -> Expr {
        if self.depth > MAX_DEPTH {
            let t = self.peek();
            self.error_at(DiagCode::Parse, t, "nesting too deep");
            self.bump();
            return self.error_expr(t.start);
        }
        self.depth += 1;
        let e = self.unary_inner();
        self.depth -= 1;
        e
    }

    fn unary_inner(&mut self) -> Expr {
        let t = self.peek();
        let start = t.start;
        let op = match t.kind {
            Tk::P(P::Bang) => Some(UnOp::Not),
            Tk::P(P::Minus) => Some(UnOp::Neg),
            Tk::P(P::Plus) => Some(UnOp::Plus),
            Tk::P(P::Tilde) => Some(UnOp::BitNot),
            _ => None,
        };
        if let Some(op) = op {
            self.bump();
            let e = self.unary();
            return Expr {
                kind: ExprKind::Unary { op, expr: Box::new(e) },
                span: start..self.prev_end(),
            };
        }
        if t.is_p(P::PlusPlus) || t.is_p(P::MinusMinus) {
            self.bump();
            let e = self.unary();
            return Expr {
                kind: ExprKind::IncDec {
                    prefix: true,
                    increment: t.is_p(P::PlusPlus),
                    target: Box::new(e),
                },
                span: start..self.prev_end(),
            };
        }
        if t.is_p(P::LParen) {
            if let Some(cast) = self.try_cast() {
                return cast;
            }
        }
        let e = self.primary();
        self.postfix(e)
    }

    fn try_cast(&mut self) -> Option<Expr> {
        let start = self.peek().start;
        let after = self.scan_type(self.pos + 1)?;
        if !self.tok(after).is_p(P::RParen) {
            return None;
        }
        let first = self.tok(self.pos + 1);
        let next = self.tok(after + 1);
        let primitive = matches!(first.kind, Tk::Kw(kw) if kw.is_primitive());
        let operand_follows = matches!(
            next.kind,
            Tk::Ident | Tk::Int | Tk::Long | Tk::Float | Tk::Double | Tk::Char | Tk::Str | Tk::Kw(Kw::New | Kw::True | Kw::False | Kw::Null | Kw::This) | Tk::P(P::LParen | P::Bang | P::Tilde)
        ) || (primitive && matches!(next.kind, Tk::P(P::Minus | P::Plus | P::PlusPlus | P::MinusMinus)));
        if !operand_follows {
            return None;
        }
        self.bump();
        let ty = self.type_ref();
        self.expect_p(P::RParen);
        let e = self.unary();
        Some(Expr {
            kind: ExprKind::Cast { ty, expr: Box::new(e) },
            span: start..self.prev_end(),
        })
    }

    fn args(&mut self) -> Vec<Expr> {
        self.bump(); // (
        let mut args = Vec::new();
        if self.eat_p(P::RParen) {
            return args;
        }
        loop {
            let before = self.pos;
            args.push(self.expr());
            if self.eat_p(P::Comma) && self.pos > before {
                continue;
            }
            break;
        }
        if !self.eat_p(P::RParen) {
            self.missing(")");
        }
        args
    }

    /// Skips a lambda body after `->`.
    fn skip_lambda_body(&mut self) {
        if self.at_p(P::LBrace) {
            self.skip_balanced(P::LBrace, P::RBrace);
        } else {
            let last = self.last_err;
            self.expr();
            self.last_err = last;
        }
    }

    fn primary(&mut self) -> Expr {
        let t = self.peek();
        let start = t.start;
        let lit = |kind| Expr {
            kind: ExprKind::Lit(kind),
            span: t.start..t.end,
        };
        match t.kind {
            Tk::Int | Tk::Long => {
                self.bump();
                let raw = self.text(t).trim_end_matches(['l', 'L']).replace('_', "");
                let parsed = if let Some(hex) = raw.strip_prefix("0x").or_else(|| raw.strip_prefix("0X")) {
                    i64::from_str_radix(hex, 16).ok()
                } else {
                    raw.parse::<i64>().ok()
                };
                let value = match parsed {
                    Some(v) if t.kind == Tk::Long || v <= i32::MAX as i64 + 1 => v,
                    _ => {
                        self.error_at(DiagCode::Parse, t, "integer literal out of range");
                        0
                    }
                };
                lit(if t.kind == Tk::Long { Literal::Long(value) } else { Literal::Int(value) })
            }
            Tk::Float | Tk::Double => {
                self.bump();
                let raw = self.text(t).trim_end_matches(['f', 'F', 'd', 'D']).replace('_', "");
                let v = raw.parse::<f64>().unwrap_or(0.0);
                lit(if t.kind == Tk::Float { Literal::Float(v) } else { Literal::Double(v) })
            }
            Tk::Char => {
                self.bump();
                lit(Literal::Char(decode_char_literal(self.text(t)).unwrap_or('\u{FFFD}')))
            }
            Tk::Str => {
                self.bump();
                lit(Literal::Str(unescape(self.text(t))))
            }
            Tk::Kw(Kw::True) => {
                self.bump();
                lit(Literal::Bool(true))
            }
            Tk::Kw(Kw::False) => {
                self.bump();
                lit(Literal::Bool(false))
            }
            Tk::Kw(Kw::Null) => {
                self.bump();
                lit(Literal::Null)
            }
            Tk::Ident => {
                self.bump();
                let name = self.text(t).to_string();
                if self.at_p(P::LParen) {
                    let args = self.args();
                    return Expr {
                        kind: ExprKind::Call {
                            target: None,
                            name: Ident {
                                name,
                                span: t.start..t.end,
                            },
                            args,
                        },
                        span: start..self.prev_end(),
                    };
                }
                Expr {
                    kind: ExprKind::Name(name),
                    span: t.start..t.end,
                }
            }
            Tk::P(P::LParen) => {
                if let Some(close) = self.matching_paren(self.pos) {
                    if self.tok(close + 1).is_p(P::Arrow) {
                        self.error_at(DiagCode::Parse, t, "lambda expressions are not supported");
                        self.pos = close + 2;
                        self.skip_lambda_body();
                        return self.error_expr(start);
                    }
                }
                self.bump();
                let inner = self.expr();
                self.expect_p(P::RParen);
                Expr {
                    span: start..self.prev_end(),
                    ..inner
                }
            }
            Tk::Kw(Kw::New) => self.creator(),
            Tk::Kw(Kw::This) | Tk::Kw(Kw::Super) => {
                self.error_at(DiagCode::Parse, t, format!("`{}` is not supported", self.text(t)));
                self.bump();
                self.error_expr(start)
            }
            Tk::P(P::Semi | P::RParen | P::RBracket | P::RBrace | P::Comma | P::Colon) | Tk::Eof => {
                let prev = if self.pos > 0 { self.toks[self.pos - 1] } else { t };
                let d = Diagnostic::new(self.unit, DiagCode::Parse, prev.start..prev.end, "expression expected")
                    .with_token(self.text(prev));
                self.report(d);
                self.error_expr(start)
            }
            _ => {
                self.unexpected();
                self.error_expr(start)
            }
        }
    }

    fn matching_paren(&self, open: usize) -> Option<usize> {
        let mut depth = 0usize;
        let mut k = open;
        loop {
            let t = self.tok(k);
            match t.kind {
                Tk::Eof => return None,
                Tk::P(P::LParen) => depth += 1,
                Tk::P(P::RParen) => {
                    depth -= 1;
                    if depth == 0 {
                        return Some(k);
                    }
                }
                Tk::P(P::Semi | P::LBrace | P::RBrace) => return None,
                _ => {}
            }
            k += 1;
        }
    }

    fn creator(&mut self) -> Expr {
        let start = self.bump().start;
        let t = self.peek();
        let is_type = matches!(t.kind, Tk::Ident) || matches!(t.kind, Tk::Kw(kw) if kw.is_primitive());
        if !is_type {
            self.error_at(DiagCode::Parse, t, "type expected after `new`");
            return self.error_expr(start);
        }
        // element type without dims
        let tstart = t.start;
        let name = match t.kind {
            Tk::Kw(kw) => {
                self.bump();
                prim_type(kw).expect("primitive")
            }
            _ => {
                let path = self.qualified_name();
                if self.at_p(P::Lt) {
                    let lt = self.peek();
                    self.error_at(DiagCode::Parse, lt, "generic type arguments are not supported");
                    match self.scan_type_args(self.pos) {
                        Some(end) => self.pos = end,
                        None => {
                            // diamond `<>`
                            if self.peek_at(1).is_p(P::Gt) {
                                self.pos += 2;
                            }
                        }
                    }
                }
                TypeName::Named(path.join("."))
            }
        };
        let mut elem = TypeRef {
            name,
            dims: 0,
            span: tstart..self.prev_end(),
        };
        if self.at_p(P::LParen) {
            let args = self.args();
            return Expr {
                kind: ExprKind::NewObject { ty: elem, args },
                span: start..self.prev_end(),
            };
        }
        if !self.at_p(P::LBracket) {
            self.missing("(");
            return self.error_expr(start);
        }
        let mut lens = Vec::new();
        let mut extra_dims = 0;
        while self.at_p(P::LBracket) {
            self.bump();
            if self.eat_p(P::RBracket) {
                extra_dims += 1;
                continue;
            }
            if extra_dims > 0 {
                let t = self.peek();
                self.error_at(DiagCode::Parse, t, "array dimension after empty dimension");
            }
            lens.push(self.expr());
            self.expect_p(P::RBracket);
        }
        let init = if self.at_p(P::LBrace) {
            if !lens.is_empty() {
                let t = self.peek();
                self.error_at(DiagCode::Parse, t, "array initializer with explicit dimension");
            }
            match self.var_init().kind {
                ExprKind::ArrayInit(items) => Some(items),
                _ => None,
            }
        } else {
            if lens.is_empty() {
                self.missing("{");
            }
            None
        };
        // `elem` describes the element type: total dims minus one.
        let total = lens.len() + extra_dims;
        elem.dims = total.saturating_sub(1);
        Expr {
            kind: ExprKind::NewArray { elem, lens, init },
            span: start..self.prev_end(),
        }
    }

    fn postfix(&mut self, mut e: Expr) -> Expr {
        loop {
            let t = self.peek();
            match t.kind {
                Tk::P(P::Dot) => {
                    self.bump();
                    let n = self.peek();
                    if n.kind != Tk::Ident {
                        if matches!(n.kind, Tk::Kw(Kw::Class | Kw::New | Kw::This)) {
                            self.error_at(DiagCode::Parse, n, format!("`.{}` is not supported", self.text(n)));
                            self.bump();
                        } else {
                            self.error_at(DiagCode::Parse, n, "identifier expected after `.`");
                        }
                        e = self.error_expr(e.span.start);
                        continue;
                    }
                    self.bump();
                    let name = Ident {
                        name: self.text(n).to_string(),
                        span: n.start..n.end,
                    };
                    let start = e.span.start;
                    if self.at_p(P::LParen) {
                        let args = self.args();
                        e = Expr {
                            kind: ExprKind::Call {
                                target: Some(Box::new(e)),
                                name,
                                args,
                            },
                            span: start..self.prev_end(),
                        };
                    } else {
                        e = Expr {
                            kind: ExprKind::Field {
                                target: Box::new(e),
                                name,
                            },
                            span: start..self.prev_end(),
                        };
                    }
                }
                Tk::P(P::LBracket) => {
                    self.bump();
                    let index = self.expr();
                    self.expect_p(P::RBracket);
                    let start = e.span.start;
                    e = Expr {
                        kind: ExprKind::Index {
                            array: Box::new(e),
                            index: Box::new(index),
                        },
                        span: start..self.prev_end(),
                    };
                }
                Tk::P(P::PlusPlus) | Tk::P(P::MinusMinus) if !t.line_start => {
                    self.bump();
                    let start = e.span.start;
                    e = Expr {
                        kind: ExprKind::IncDec {
                            prefix: false,
                            increment: t.is_p(P::PlusPlus),
                            target: Box::new(e),
                        },
                        span: start..self.prev_end(),
                    };
                }
                Tk::P(P::ColonColon) => {
                    self.error_at(DiagCode::Parse, t, "method references are not supported");
                    self.bump();
                    if matches!(self.peek().kind, Tk::Ident | Tk::Kw(Kw::New)) {
                        self.bump();
                    }
                    e = self.error_expr(e.span.start);
                }
                Tk::P(P::Arrow) => {
                    self.error_at(DiagCode::Parse, t, "lambda expressions are not supported");
                    self.bump();
                    self.skip_lambda_body();
                    e = self.error_expr(e.span.start);
                }
                _ => return e,
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum DeclKind {
    None,
    Variable,
    Method,
}

fn is_statement_expr(e: &Expr) -> bool {
    matches!(
        e.kind,
        ExprKind::Assign { .. } | ExprKind::Call { .. } | ExprKind::IncDec { .. } | ExprKind::NewObject { .. }
    )
}
