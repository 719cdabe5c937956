//! Syntax tree. Every node carries its byte span; unparseable regions are
//! represented by explicit `Error` variants so that the tree is always complete.

use std::ops::Range;

pub type Span = Range<usize>;

#[derive(Debug, Clone, PartialEq)]
pub struct Ident {
    pub name: String,
    pub span: Span,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Modifiers {
    pub is_static: bool,
    pub is_final: bool,
    /// Access and other modifiers, kept only for reporting.
    pub others: Vec<String>,
    pub annotations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TypeName {
    Int,
    Long,
    Double,
    Float,
    Boolean,
    Char,
    /// Possibly qualified class name, e.g. `String` or `java.util.List`.
    Named(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TypeRef {
    pub name: TypeName,
    pub dims: usize,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompilationUnit {
    pub items: Vec<Item>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Item {
    Package(Span),
    Import(ImportDecl),
    Class(ClassDecl),
    /// Method outside any class (snippets only).
    Method(MethodDecl),
    /// Statement outside any class (snippets only).
    Stmt(Stmt),
    Error(Span),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImportDecl {
    pub path: Vec<String>,
    pub wildcard: bool,
    pub span: Span,
}

impl ImportDecl {
    pub fn qualified(&self) -> String {
        self.path.join(".")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassDecl {
    pub modifiers: Modifiers,
    pub name: Ident,
    pub members: Vec<Member>,
    pub span: Span,
    /// From the first modifier up to and including `{`.
    pub header: Span,
    /// The closing `}`, when present.
    pub close: Option<Span>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Member {
    Field(FieldDecl),
    Method(MethodDecl),
    Class(ClassDecl),
    Error(Span),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldDecl {
    pub modifiers: Modifiers,
    pub ty: TypeRef,
    pub declarators: Vec<Declarator>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub ty: TypeRef,
    pub name: Ident,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodDecl {
    pub modifiers: Modifiers,
    /// `None` for `void`.
    pub ret: Option<TypeRef>,
    pub name: Ident,
    pub params: Vec<Param>,
    pub body: Option<Block>,
    pub span: Span,
    /// From the first modifier up to and including the body's `{`.
    pub header: Span,
}

impl MethodDecl {
    pub fn is_test(&self) -> bool {
        self.modifiers.annotations.iter().any(|a| a == "Test")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub stmts: Vec<Stmt>,
    pub span: Span,
    /// The closing `}`, when present.
    pub close: Option<Span>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Declarator {
    pub name: Ident,
    /// Extra `[]` after the name (`int a[]`).
    pub dims: usize,
    pub init: Option<Expr>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StmtKind {
    Local {
        modifiers: Modifiers,
        ty: TypeRef,
        declarators: Vec<Declarator>,
    },
    Expr(Expr),
    If {
        cond: Expr,
        then: Box<Stmt>,
        els: Option<Box<Stmt>>,
    },
    While {
        cond: Expr,
        body: Box<Stmt>,
    },
    DoWhile {
        body: Box<Stmt>,
        cond: Expr,
    },
    For {
        init: Vec<Stmt>,
        cond: Option<Expr>,
        update: Vec<Expr>,
        body: Box<Stmt>,
    },
    ForEach {
        ty: TypeRef,
        name: Ident,
        iter: Expr,
        body: Box<Stmt>,
    },
    Return(Option<Expr>),
    Break,
    Continue,
    Block(Block),
    Empty,
    /// `import` inside a method body.
    Import(ImportDecl),
    /// Method declared inside a method body.
    Method(MethodDecl),
    /// Class declared inside a method body.
    Class(ClassDecl),
    Error,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
    BitAnd,
    BitOr,
    BitXor,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Rem => "%",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::And => "&&",
            BinOp::Or => "||",
            BinOp::BitAnd => "&",
            BinOp::BitOr => "|",
            BinOp::BitXor => "^",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnOp {
    Neg,
    Plus,
    Not,
    BitNot,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Literal {
    Int(i64),
    Long(i64),
    Float(f64),
    Double(f64),
    Bool(bool),
    Char(char),
    Str(String),
    Null,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Lit(Literal),
    Name(String),
    Field {
        target: Box<Expr>,
        name: Ident,
    },
    Call {
        target: Option<Box<Expr>>,
        name: Ident,
        args: Vec<Expr>,
    },
    Index {
        array: Box<Expr>,
        index: Box<Expr>,
    },
    Unary {
        op: UnOp,
        expr: Box<Expr>,
    },
    Binary {
        op: BinOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    /// `op` is `None` for plain `=`.
    Assign {
        op: Option<BinOp>,
        target: Box<Expr>,
        value: Box<Expr>,
    },
    IncDec {
        prefix: bool,
        increment: bool,
        target: Box<Expr>,
    },
    Cond {
        cond: Box<Expr>,
        then: Box<Expr>,
        els: Box<Expr>,
    },
    Cast {
        ty: TypeRef,
        expr: Box<Expr>,
    },
    NewArray {
        elem: TypeRef,
        lens: Vec<Expr>,
        init: Option<Vec<Expr>>,
    },
    NewObject {
        ty: TypeRef,
        args: Vec<Expr>,
    },
    /// `{a, b}` in an array declaration initializer.
    ArrayInit(Vec<Expr>),
    Error,
}

impl Expr {
    pub fn is_error(&self) -> bool {
        matches!(self.kind, ExprKind::Error)
    }
}

/// Visits every statement in a block tree in source order.
pub fn walk_stmts<'a>(stmts: &'a [Stmt], f: &mut impl FnMut(&'a Stmt)) {
    for stmt in stmts {
        f(stmt);
        match &stmt.kind {
            StmtKind::If { then, els, .. } => {
                walk_stmts(std::slice::from_ref(then), f);
                if let Some(e) = els {
                    walk_stmts(std::slice::from_ref(e), f);
                }
            }
            StmtKind::While { body, .. } | StmtKind::DoWhile { body, .. } | StmtKind::ForEach { body, .. } => {
                walk_stmts(std::slice::from_ref(body), f)
            }
            StmtKind::For { init, body, .. } => {
                walk_stmts(init, f);
                walk_stmts(std::slice::from_ref(body), f);
            }
            StmtKind::Block(b) => walk_stmts(&b.stmts, f),
            _ => {}
        }
    }
}

impl CompilationUnit {
    /// True if any node in the tree is an explicit error node.
    pub fn has_error_nodes(&self) -> bool {
        fn expr(e: &Expr) -> bool {
            match &e.kind {
                ExprKind::Error => true,
                ExprKind::Lit(_) | ExprKind::Name(_) => false,
                ExprKind::Field { target, .. } => expr(target),
                ExprKind::Call { target, args, .. } => target.as_deref().is_some_and(expr) || args.iter().any(expr),
                ExprKind::Index { array, index } => expr(array) || expr(index),
                ExprKind::Unary { expr: e, .. } => expr(e),
                ExprKind::Binary { lhs, rhs, .. } => expr(lhs) || expr(rhs),
                ExprKind::Assign { target, value, .. } => expr(target) || expr(value),
                ExprKind::IncDec { target, .. } => expr(target),
                ExprKind::Cond { cond, then, els } => expr(cond) || expr(then) || expr(els),
                ExprKind::Cast { expr: e, .. } => expr(e),
                ExprKind::NewArray { lens, init, .. } => {
                    lens.iter().any(expr) || init.as_ref().is_some_and(|i| i.iter().any(expr))
                }
                ExprKind::NewObject { args, .. } => args.iter().any(expr),
                ExprKind::ArrayInit(items) => items.iter().any(expr),
            }
        }
        fn stmt(s: &Stmt) -> bool {
            match &s.kind {
                StmtKind::Error => true,
                StmtKind::Local { declarators, .. } => declarators.iter().any(|d| d.init.as_ref().is_some_and(expr)),
                StmtKind::Expr(e) => expr(e),
                StmtKind::If { cond, then, els } => expr(cond) || stmt(then) || els.as_deref().is_some_and(stmt),
                StmtKind::While { cond, body } | StmtKind::DoWhile { body, cond } => expr(cond) || stmt(body),
                StmtKind::For { init, cond, update, body } => {
                    init.iter().any(stmt) || cond.as_ref().is_some_and(expr) || update.iter().any(expr) || stmt(body)
                }
                StmtKind::ForEach { iter, body, .. } => expr(iter) || stmt(body),
                StmtKind::Return(e) => e.as_ref().is_some_and(expr),
                StmtKind::Block(b) => b.stmts.iter().any(stmt),
                StmtKind::Method(m) => method(m),
                StmtKind::Class(c) => class(c),
                StmtKind::Break | StmtKind::Continue | StmtKind::Empty | StmtKind::Import(_) => false,
            }
        }
        fn method(m: &MethodDecl) -> bool {
            m.body.as_ref().is_some_and(|b| b.stmts.iter().any(stmt))
        }
        fn class(c: &ClassDecl) -> bool {
            c.members.iter().any(|m| match m {
                Member::Error(_) => true,
                Member::Field(f) => f.declarators.iter().any(|d| d.init.as_ref().is_some_and(expr)),
                Member::Method(m) => method(m),
                Member::Class(c) => class(c),
            })
        }
        self.items.iter().any(|item| match item {
            Item::Error(_) => true,
            Item::Class(c) => class(c),
            Item::Method(m) => method(m),
            Item::Stmt(s) => stmt(s),
            Item::Package(_) | Item::Import(_) => false,
        })
    }
}
