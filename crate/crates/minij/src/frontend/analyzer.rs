//! Name resolution and type checking over a (possibly error-recovered) tree.
//!
//! Expressions whose type cannot be determined evaluate to `Type::Unknown`,
//! which is accepted everywhere so that one root cause yields one diagnostic.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::ast::*;
use super::diag::{DiagCode, Diagnostic, Hint};
use super::library::{self, Resolution};
use super::registry::TypeRegistry;
use super::source::SourceUnit;
use super::types::Type;

/// Name of the pseudo-class holding methods declared outside any class.
const LOOSE: &str = "";

#[derive(Debug, Clone)]
struct MethodSig {
    name: String,
    params: Vec<Type>,
    ret: Type,
}

#[derive(Debug, Clone, Default)]
struct ClassInfo {
    fields: Vec<(String, Type)>,
    methods: Vec<MethodSig>,
}

pub fn analyze(cu: &CompilationUnit, unit: &SourceUnit, registry: &TypeRegistry) -> Vec<Diagnostic> {
    let mut a = Analyzer {
        unit,
        registry,
        diags: Vec::new(),
        visible: BTreeSet::new(),
        classes: BTreeMap::new(),
        undeclared: HashMap::new(),
        scopes: Vec::new(),
        class_chain: Vec::new(),
        ret: None,
        loop_depth: 0,
    };
    a.run(cu);
    a.finish()
}

struct Analyzer<'a> {
    unit: &'a SourceUnit,
    registry: &'a TypeRegistry,
    diags: Vec<Diagnostic>,
    /// Library types usable by simple name.
    visible: BTreeSet<String>,
    classes: BTreeMap<String, ClassInfo>,
    /// Undeclared name -> (diagnostic indices, first assigned type).
    undeclared: HashMap<String, (Vec<usize>, Option<Type>)>,
    scopes: Vec<Vec<(String, Type)>>,
    class_chain: Vec<String>,
    /// Return type of the enclosing method; `None` outside methods.
    ret: Option<Type>,
    loop_depth: usize,
}

fn boxed(simple: &str) -> Option<Type> {
    Some(match simple {
        "String" => Type::String,
        "Integer" => Type::Int,
        "Long" => Type::Long,
        "Double" => Type::Double,
        "Float" => Type::Float,
        "Boolean" => Type::Boolean,
        "Character" => Type::Char,
        _ => return None,
    })
}

impl<'a> Analyzer<'a> {
    fn error(&mut self, code: DiagCode, span: Span, msg: impl Into<String>) -> usize {
        self.diags.push(Diagnostic::new(self.unit, code, span, msg));
        self.diags.len() - 1
    }

    fn error_name(&mut self, code: DiagCode, span: Span, name: &str, msg: impl Into<String>) -> usize {
        let d = Diagnostic::new(self.unit, code, span, msg)
            .with_token(name)
            .with_hint(Hint::Name {
                name: name.to_string(),
                assigned_type: None,
            });
        self.diags.push(d);
        self.diags.len() - 1
    }

    fn finish(mut self) -> Vec<Diagnostic> {
        for (idxs, ty) in self.undeclared.values() {
            if let Some(ty) = ty {
                for &i in idxs {
                    if let Some(Hint::Name { assigned_type, .. }) = &mut self.diags[i].hint {
                        *assigned_type = Some(ty.clone());
                    }
                }
            }
        }
        self.diags
    }

    // ----- declarations --------------------------------------------------

    fn run(&mut self, cu: &CompilationUnit) {
        for name in self.registry.iter().map(|(k, _)| k.to_string()).collect::<Vec<_>>() {
            if self.registry.is_implicit(&name) {
                self.visible.insert(name);
            }
        }
        for item in &cu.items {
            if let Item::Import(imp) = item {
                self.import(imp);
            }
        }
        // Class names first so that member types can refer to any class.
        let mut seen = BTreeSet::new();
        for item in &cu.items {
            if let Item::Class(c) = item {
                self.collect_class_names(c, &mut seen);
            }
        }
        for item in &cu.items {
            if let Item::Class(c) = item {
                self.collect_members(c);
            }
        }
        let loose: Vec<&MethodDecl> = cu
            .items
            .iter()
            .filter_map(|i| match i {
                Item::Method(m) => Some(m),
                _ => None,
            })
            .collect();
        if !loose.is_empty() {
            self.collect_methods(LOOSE, loose.into_iter());
        }

        for item in &cu.items {
            match item {
                Item::Class(c) => self.class_bodies(c),
                Item::Method(m) => {
                    self.class_chain.push(LOOSE.to_string());
                    self.method(m);
                    self.class_chain.pop();
                }
                _ => {}
            }
        }
        // Loose statements share one scope, in source order.
        self.class_chain.push(LOOSE.to_string());
        self.scopes.push(Vec::new());
        self.ret = Some(Type::Void);
        for item in &cu.items {
            if let Item::Stmt(s) = item {
                self.stmt(s);
            }
        }
        self.ret = None;
        self.scopes.pop();
        self.class_chain.pop();
    }

    fn import(&mut self, imp: &ImportDecl) {
        let q = imp.qualified();
        if imp.path.is_empty() {
            return;
        }
        if imp.wildcard {
            let members: Vec<String> = self.registry.package_members(&q).into_iter().map(String::from).collect();
            if members.is_empty() {
                self.error_name(DiagCode::Unresolved, imp.span.clone(), &q, format!("the import {q} cannot be resolved"));
            }
            self.visible.extend(members);
            return;
        }
        match self.registry.resolve_qualified(&q) {
            Some((simple, _)) => {
                let simple = simple.to_string();
                self.visible.insert(simple);
            }
            None => {
                self.error_name(DiagCode::Unresolved, imp.span.clone(), &q, format!("the import {q} cannot be resolved"));
            }
        }
    }

    fn collect_class_names(&mut self, c: &ClassDecl, seen: &mut BTreeSet<String>) {
        if c.name.name.is_empty() {
            return;
        }
        if !seen.insert(c.name.name.clone()) {
            let name = c.name.name.clone();
            self.error(DiagCode::DuplicateMember, c.name.span.clone(), format!("duplicate class {name}"));
            return;
        }
        self.classes.insert(c.name.name.clone(), ClassInfo::default());
        for m in &c.members {
            if let Member::Class(inner) = m {
                self.collect_class_names(inner, seen);
            }
        }
    }

    fn collect_members(&mut self, c: &ClassDecl) {
        let name = c.name.name.clone();
        let mut fields: Vec<(String, Type)> = Vec::new();
        for m in &c.members {
            match m {
                Member::Field(f) => {
                    let base = self.resolve_type(&f.ty);
                    for d in &f.declarators {
                        if fields.iter().any(|(n, _)| *n == d.name.name) {
                            self.error(
                                DiagCode::DuplicateMember,
                                d.name.span.clone(),
                                format!("duplicate field {}", d.name.name),
                            );
                            continue;
                        }
                        fields.push((d.name.name.clone(), wrap(base.clone(), d.dims)));
                    }
                }
                Member::Class(inner) => self.collect_members(inner),
                _ => {}
            }
        }
        if let Some(info) = self.classes.get_mut(&name) {
            if info.fields.is_empty() {
                info.fields = fields;
            }
        }
        let methods = c.members.iter().filter_map(|m| match m {
            Member::Method(m) => Some(m),
            _ => None,
        });
        self.collect_methods(&name, methods);
    }

    fn collect_methods<'m>(&mut self, class: &str, methods: impl Iterator<Item = &'m MethodDecl>) {
        let mut sigs: Vec<MethodSig> = Vec::new();
        for m in methods {
            let params: Vec<Type> = m.params.iter().map(|p| self.resolve_type(&p.ty)).collect();
            let ret = match &m.ret {
                Some(t) => self.resolve_type(t),
                None => Type::Void,
            };
            if m.name.name.is_empty() {
                continue;
            }
            if sigs.iter().any(|s| s.name == m.name.name && s.params.len() == params.len()) {
                self.error(
                    DiagCode::DuplicateMember,
                    m.name.span.clone(),
                    format!("duplicate method {}", m.name.name),
                );
                continue;
            }
            sigs.push(MethodSig {
                name: m.name.name.clone(),
                params,
                ret,
            });
        }
        let info = self.classes.entry(class.to_string()).or_default();
        if info.methods.is_empty() {
            info.methods = sigs;
        }
    }

    fn class_bodies(&mut self, c: &ClassDecl) {
        self.class_chain.push(c.name.name.clone());
        for m in &c.members {
            match m {
                Member::Field(f) => {
                    let base = self.resolve_type_quiet(&f.ty);
                    self.scopes.push(Vec::new());
                    for d in &f.declarators {
                        if let Some(init) = &d.init {
                            self.check_init(&wrap(base.clone(), d.dims), init);
                        }
                    }
                    self.scopes.pop();
                }
                Member::Method(m) => self.method(m),
                Member::Class(inner) => self.class_bodies(inner),
                Member::Error(_) => {}
            }
        }
        self.class_chain.pop();
    }

    fn method(&mut self, m: &MethodDecl) {
        let saved_scopes = std::mem::take(&mut self.scopes);
        let saved_ret = self.ret.take();
        let saved_loop = std::mem::replace(&mut self.loop_depth, 0);

        let ret = match &m.ret {
            Some(t) => self.resolve_type_quiet(t),
            None => Type::Void,
        };
        self.ret = Some(ret.clone());
        let mut params = Vec::new();
        for p in &m.params {
            let t = self.resolve_type_quiet(&p.ty);
            if params.iter().any(|(n, _): &(String, Type)| *n == p.name.name) {
                self.error(
                    DiagCode::DuplicateMember,
                    p.name.span.clone(),
                    format!("duplicate parameter {}", p.name.name),
                );
                continue;
            }
            params.push((p.name.name.clone(), t));
        }
        self.scopes.push(params);
        if let Some(body) = &m.body {
            self.block(body);
            if ret != Type::Void && can_complete(&body.stmts) {
                self.error(
                    DiagCode::MissingReturn,
                    m.name.span.clone(),
                    format!("method {} must return a value of type {ret}", m.name.name),
                );
            }
        }
        self.scopes = saved_scopes;
        self.ret = saved_ret;
        self.loop_depth = saved_loop;
    }

    // ----- types ---------------------------------------------------------

    fn resolve_type(&mut self, t: &TypeRef) -> Type {
        let base = match &t.name {
            TypeName::Int => Type::Int,
            TypeName::Long => Type::Long,
            TypeName::Double => Type::Double,
            TypeName::Float => Type::Float,
            TypeName::Boolean => Type::Boolean,
            TypeName::Char => Type::Char,
            TypeName::Named(n) if n.is_empty() => Type::Unknown,
            TypeName::Named(n) => match self.lookup_type(n) {
                Some(t) => t,
                None => {
                    let simple = n.rsplit('.').next().unwrap_or(n).to_string();
                    self.error_name(
                        DiagCode::UnresolvedType,
                        t.span.clone(),
                        &simple,
                        format!("{n} cannot be resolved to a type"),
                    );
                    Type::Unknown
                }
            },
        };
        wrap(base, t.dims)
    }

    /// Resolves a type already reported during member collection.
    fn resolve_type_quiet(&mut self, t: &TypeRef) -> Type {
        let n = self.diags.len();
        let ty = self.resolve_type(t);
        self.diags.truncate(n);
        ty
    }

    fn lookup_type(&self, name: &str) -> Option<Type> {
        if name.contains('.') {
            let (simple, _) = self.registry.resolve_qualified(name)?;
            return Some(boxed(simple).unwrap_or_else(|| Type::Class(simple.to_string())));
        }
        if self.classes.contains_key(name) && name != LOOSE {
            return Some(Type::Class(name.to_string()));
        }
        if self.visible.contains(name) {
            return Some(boxed(name).unwrap_or_else(|| Type::Class(name.to_string())));
        }
        None
    }

    fn is_type_name(&self, name: &str) -> bool {
        self.classes.contains_key(name) || self.visible.contains(name)
    }

    // ----- scopes --------------------------------------------------------

    fn lookup_var(&self, name: &str) -> Option<Type> {
        for scope in self.scopes.iter().rev() {
            if let Some((_, t)) = scope.iter().rev().find(|(n, _)| n == name) {
                return Some(t.clone());
            }
        }
        for class in self.class_chain.iter().rev() {
            if let Some(info) = self.classes.get(class) {
                if let Some((_, t)) = info.fields.iter().find(|(n, _)| n == name) {
                    return Some(t.clone());
                }
            }
        }
        None
    }

    fn declare(&mut self, name: &Ident, ty: Type) {
        if name.name.is_empty() {
            return;
        }
        let dup = self.scopes.iter().any(|s| s.iter().any(|(n, _)| *n == name.name));
        if dup {
            self.error(
                DiagCode::DuplicateMember,
                name.span.clone(),
                format!("duplicate local variable {}", name.name),
            );
            return;
        }
        if let Some(scope) = self.scopes.last_mut() {
            scope.push((name.name.clone(), ty));
        }
    }

    fn find_method(&self, class: &str, name: &str) -> Vec<&MethodSig> {
        self.classes
            .get(class)
            .map(|c| c.methods.iter().filter(|m| m.name == name).collect())
            .unwrap_or_default()
    }

    // ----- statements ----------------------------------------------------

    fn block(&mut self, b: &Block) {
        self.scopes.push(Vec::new());
        for s in &b.stmts {
            self.stmt(s);
        }
        self.scopes.pop();
    }

    fn scoped_stmt(&mut self, s: &Stmt) {
        self.scopes.push(Vec::new());
        self.stmt(s);
        self.scopes.pop();
    }

    fn expect_bool(&mut self, e: &Expr) {
        let t = self.expr(e);
        if !Type::Boolean.accepts(&t) {
            self.error(
                DiagCode::TypeMismatch,
                e.span.clone(),
                format!("type mismatch: cannot convert from {t} to boolean"),
            );
        }
    }

    fn check_init(&mut self, target: &Type, init: &Expr) {
        if let ExprKind::ArrayInit(items) = &init.kind {
            match target {
                Type::Array(elem) => {
                    for item in items {
                        self.check_init(elem, item);
                    }
                }
                Type::Unknown => {
                    for item in items {
                        self.check_init(&Type::Unknown, item);
                    }
                }
                _ => {
                    self.error(
                        DiagCode::TypeMismatch,
                        init.span.clone(),
                        format!("type mismatch: cannot initialize {target} with an array initializer"),
                    );
                }
            }
            return;
        }
        let t = self.expr(init);
        if !target.accepts(&t) {
            self.error(
                DiagCode::TypeMismatch,
                init.span.clone(),
                format!("type mismatch: cannot convert from {t} to {target}"),
            );
        }
    }

    fn stmt(&mut self, s: &Stmt) {
        match &s.kind {
            StmtKind::Local { ty, declarators, .. } => {
                let base = self.resolve_type(ty);
                for d in declarators {
                    let t = wrap(base.clone(), d.dims);
                    if let Some(init) = &d.init {
                        self.check_init(&t, init);
                    }
                    self.declare(&d.name, t);
                }
            }
            StmtKind::Expr(e) => {
                self.expr(e);
            }
            StmtKind::If { cond, then, els } => {
                self.expect_bool(cond);
                self.scoped_stmt(then);
                if let Some(e) = els {
                    self.scoped_stmt(e);
                }
            }
            StmtKind::While { cond, body } => {
                self.expect_bool(cond);
                self.loop_depth += 1;
                self.scoped_stmt(body);
                self.loop_depth -= 1;
            }
            StmtKind::DoWhile { body, cond } => {
                self.loop_depth += 1;
                self.scoped_stmt(body);
                self.loop_depth -= 1;
                self.expect_bool(cond);
            }
            StmtKind::For { init, cond, update, body } => {
                self.scopes.push(Vec::new());
                for s in init {
                    self.stmt(s);
                }
                if let Some(c) = cond {
                    self.expect_bool(c);
                }
                for u in update {
                    self.expr(u);
                }
                self.loop_depth += 1;
                self.scoped_stmt(body);
                self.loop_depth -= 1;
                self.scopes.pop();
            }
            StmtKind::ForEach { ty, name, iter, body } => {
                let var_t = self.resolve_type(ty);
                let it = self.expr(iter);
                match &it {
                    Type::Array(elem) => {
                        if !var_t.accepts(elem) {
                            self.error(
                                DiagCode::TypeMismatch,
                                iter.span.clone(),
                                format!("type mismatch: cannot convert from {elem} to {var_t}"),
                            );
                        }
                    }
                    Type::Unknown => {}
                    other => {
                        self.error(
                            DiagCode::TypeMismatch,
                            iter.span.clone(),
                            format!("can only iterate over an array, not {other}"),
                        );
                    }
                }
                self.scopes.push(Vec::new());
                self.declare(name, var_t);
                self.loop_depth += 1;
                self.scoped_stmt(body);
                self.loop_depth -= 1;
                self.scopes.pop();
            }
            StmtKind::Return(value) => {
                let ret = self.ret.clone().unwrap_or(Type::Void);
                match value {
                    None if ret != Type::Void && !ret.is_unknown() => {
                        self.error(DiagCode::TypeMismatch, s.span.clone(), format!("this method must return a value of type {ret}"));
                    }
                    None => {}
                    Some(v) => {
                        let t = self.expr(v);
                        if ret == Type::Void {
                            self.error(DiagCode::TypeMismatch, v.span.clone(), "void methods cannot return a value");
                        } else if !ret.accepts(&t) {
                            self.error(
                                DiagCode::TypeMismatch,
                                v.span.clone(),
                                format!("type mismatch: cannot convert from {t} to {ret}"),
                            );
                        }
                    }
                }
            }
            StmtKind::Break | StmtKind::Continue => {
                if self.loop_depth == 0 {
                    let what = if matches!(s.kind, StmtKind::Break) { "break" } else { "continue" };
                    self.error(DiagCode::Parse, s.span.clone(), format!("{what} cannot be used outside of a loop"));
                }
            }
            StmtKind::Block(b) => self.block(b),
            StmtKind::Method(m) => {
                self.error(
                    DiagCode::NestedMethod,
                    m.header.clone(),
                    format!("method {} cannot be declared inside another method", m.name.name),
                );
                self.method(m);
            }
            StmtKind::Empty | StmtKind::Import(_) | StmtKind::Class(_) | StmtKind::Error => {}
        }
    }

    // ----- expressions ---------------------------------------------------

    fn mismatch(&mut self, span: &Span, msg: String) -> Type {
        self.error(DiagCode::TypeMismatch, span.clone(), msg);
        Type::Unknown
    }

    fn undeclared(&mut self, name: &str, span: &Span) {
        let idx = self.error_name(
            DiagCode::UndeclaredVar,
            span.clone(),
            name,
            format!("{name} cannot be resolved to a variable"),
        );
        self.undeclared.entry(name.to_string()).or_default().0.push(idx);
    }

    fn expr(&mut self, e: &Expr) -> Type {
        match &e.kind {
            ExprKind::Lit(l) => match l {
                Literal::Int(_) => Type::Int,
                Literal::Long(_) => Type::Long,
                Literal::Float(_) => Type::Float,
                Literal::Double(_) => Type::Double,
                Literal::Bool(_) => Type::Boolean,
                Literal::Char(_) => Type::Char,
                Literal::Str(_) => Type::String,
                Literal::Null => Type::Null,
            },
            ExprKind::Name(n) => match self.lookup_var(n) {
                Some(t) => t,
                None if self.is_type_name(n) => {
                    self.error_name(DiagCode::Unresolved, e.span.clone(), n, format!("{n} cannot be resolved to a variable"));
                    Type::Unknown
                }
                None => {
                    self.undeclared(n, &e.span);
                    Type::Unknown
                }
            },
            ExprKind::Field { target, name } => self.field(target, name),
            ExprKind::Call { target, name, args } => self.call(e, target.as_deref(), name, args),
            ExprKind::Index { array, index } => {
                let at = self.expr(array);
                let it = self.expr(index);
                if !Type::Int.accepts(&it) {
                    self.mismatch(&index.span, format!("type mismatch: cannot convert from {it} to int"));
                }
                match at {
                    Type::Array(elem) => *elem,
                    Type::Unknown => Type::Unknown,
                    other => self.mismatch(&array.span, format!("the type of the expression must be an array type but it resolved to {other}")),
                }
            }
            ExprKind::Unary { op, expr } => {
                let t = self.expr(expr);
                if t.is_unknown() {
                    return Type::Unknown;
                }
                match op {
                    UnOp::Not if t == Type::Boolean => Type::Boolean,
                    UnOp::Neg | UnOp::Plus if t.is_numeric() => Type::promote(&t, &Type::Int).unwrap_or(Type::Unknown),
                    UnOp::BitNot if matches!(t, Type::Int | Type::Long | Type::Char) => Type::promote(&t, &Type::Int).unwrap_or(Type::Unknown),
                    _ => self.mismatch(&e.span, format!("the operator is undefined for the argument type {t}")),
                }
            }
            ExprKind::Binary { op, lhs, rhs } => {
                let l = self.expr(lhs);
                let r = self.expr(rhs);
                self.binary(e, *op, &l, &r)
            }
            ExprKind::Assign { op, target, value } => self.assign(e, *op, target, value),
            ExprKind::IncDec { target, .. } => {
                let t = self.expr(target);
                if !is_lvalue(target) {
                    self.error(DiagCode::Parse, target.span.clone(), "invalid argument to increment or decrement");
                    return Type::Unknown;
                }
                if t.is_numeric() || t.is_unknown() {
                    t
                } else {
                    self.mismatch(&e.span, format!("the operator is undefined for the argument type {t}"))
                }
            }
            ExprKind::Cond { cond, then, els } => {
                self.expect_bool(cond);
                let a = self.expr(then);
                let b = self.expr(els);
                if a.is_unknown() || b.is_unknown() {
                    Type::Unknown
                } else if a == b {
                    a
                } else if let Some(t) = Type::promote(&a, &b) {
                    t
                } else if a == Type::Null && b.is_reference() {
                    b
                } else if b == Type::Null && a.is_reference() {
                    a
                } else {
                    self.mismatch(&e.span, format!("incompatible conditional operand types {a} and {b}"))
                }
            }
            ExprKind::Cast { ty, expr } => {
                let to = self.resolve_type(ty);
                let from = self.expr(expr);
                if to.castable(&from) {
                    to
                } else {
                    self.mismatch(&e.span, format!("cannot cast from {from} to {to}"))
                }
            }
            ExprKind::NewArray { elem, lens, init } => {
                let et = self.resolve_type(elem);
                for l in lens {
                    let t = self.expr(l);
                    if !Type::Int.accepts(&t) {
                        self.mismatch(&l.span, format!("type mismatch: cannot convert from {t} to int"));
                    }
                }
                if let Some(items) = init {
                    for item in items {
                        self.check_init(&et, item);
                    }
                }
                Type::array_of(et)
            }
            ExprKind::NewObject { ty, args } => self.new_object(e, ty, args),
            ExprKind::ArrayInit(items) => {
                for item in items {
                    self.expr(item);
                }
                self.error(DiagCode::Parse, e.span.clone(), "array initializer is only allowed in a declaration");
                Type::Unknown
            }
            ExprKind::Error => Type::Unknown,
        }
    }

    fn binary(&mut self, e: &Expr, op: BinOp, l: &Type, r: &Type) -> Type {
        if l.is_unknown() || r.is_unknown() {
            return match op {
                BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge | BinOp::And | BinOp::Or => {
                    Type::Boolean
                }
                BinOp::Add if *l == Type::String || *r == Type::String => Type::String,
                _ => Type::Unknown,
            };
        }
        let undefined = |a: &mut Self| {
            a.mismatch(
                &e.span,
                format!("the operator {} is undefined for the argument types {l}, {r}", op.symbol()),
            )
        };
        match op {
            BinOp::Add if *l == Type::String || *r == Type::String => {
                if *l == Type::Void || *r == Type::Void {
                    undefined(self)
                } else {
                    Type::String
                }
            }
            BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div | BinOp::Rem => {
                Type::promote(l, r).unwrap_or_else(|| undefined(self))
            }
            BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => {
                if Type::promote(l, r).is_some() {
                    Type::Boolean
                } else {
                    undefined(self)
                }
            }
            BinOp::Eq | BinOp::Ne => {
                let ok = Type::promote(l, r).is_some()
                    || (l == r && *l != Type::Void)
                    || (l.is_reference() && r.is_reference() && (l.accepts(r) || r.accepts(l)));
                if ok {
                    Type::Boolean
                } else {
                    self.mismatch(&e.span, format!("incompatible operand types {l} and {r}"))
                }
            }
            BinOp::And | BinOp::Or => {
                if *l == Type::Boolean && *r == Type::Boolean {
                    Type::Boolean
                } else {
                    undefined(self)
                }
            }
            BinOp::BitAnd | BinOp::BitOr | BinOp::BitXor => {
                if *l == Type::Boolean && *r == Type::Boolean {
                    Type::Boolean
                } else if matches!(l, Type::Int | Type::Long | Type::Char) && matches!(r, Type::Int | Type::Long | Type::Char) {
                    Type::promote(l, r).unwrap_or(Type::Int)
                } else {
                    undefined(self)
                }
            }
        }
    }

    fn assign(&mut self, e: &Expr, op: Option<BinOp>, target: &Expr, value: &Expr) -> Type {
        let undeclared_target = match &target.kind {
            ExprKind::Name(n) if self.lookup_var(n).is_none() && !self.is_type_name(n) => Some(n.clone()),
            _ => None,
        };
        let tt = self.expr(target);
        let vt = self.expr(value);
        if let (Some(name), None) = (&undeclared_target, op) {
            let known = !matches!(vt, Type::Unknown | Type::Null | Type::Void);
            let entry = self.undeclared.entry(name.clone()).or_default();
            if entry.1.is_none() && known {
                entry.1 = Some(vt.clone());
            }
        }
        if !is_lvalue(target) {
            self.error(DiagCode::Parse, target.span.clone(), "the left-hand side of an assignment must be a variable");
            return Type::Unknown;
        }
        match op {
            None => {
                if !tt.accepts(&vt) {
                    self.mismatch(&value.span, format!("type mismatch: cannot convert from {vt} to {tt}"));
                }
            }
            Some(BinOp::Add) if tt == Type::String => {}
            Some(op) => {
                if !(tt.is_unknown() || vt.is_unknown() || (tt.is_numeric() && vt.is_numeric())) {
                    self.mismatch(
                        &e.span,
                        format!("the operator {}= is undefined for the argument types {tt}, {vt}", op.symbol()),
                    );
                }
            }
        }
        tt
    }

    /// A bare name used as a qualifier: a variable, a class, or unresolved.
    fn qualifier(&mut self, target: &Expr) -> Qualifier {
        if let ExprKind::Name(n) = &target.kind {
            if self.lookup_var(n).is_none() {
                if self.classes.contains_key(n) && n != LOOSE {
                    return Qualifier::UserClass(n.clone());
                }
                if self.visible.contains(n) {
                    return Qualifier::Library(n.clone());
                }
                self.error_name(DiagCode::Unresolved, target.span.clone(), n, format!("{n} cannot be resolved"));
                return Qualifier::Unresolved;
            }
        }
        Qualifier::Value(self.expr(target))
    }

    fn field(&mut self, target: &Expr, name: &Ident) -> Type {
        match self.qualifier(target) {
            Qualifier::Unresolved => Type::Unknown,
            Qualifier::UserClass(c) => {
                let found = self.classes.get(&c).and_then(|i| i.fields.iter().find(|(n, _)| *n == name.name)).map(|(_, t)| t.clone());
                found.unwrap_or_else(|| {
                    self.error(DiagCode::Unresolved, name.span.clone(), format!("{} cannot be resolved or is not a field", name.name));
                    Type::Unknown
                })
            }
            Qualifier::Library(c) => library::static_field(&c, &name.name).unwrap_or_else(|| {
                self.error(DiagCode::Unresolved, name.span.clone(), format!("{} cannot be resolved or is not a field", name.name));
                Type::Unknown
            }),
            Qualifier::Value(t) => match (&t, name.name.as_str()) {
                (Type::Unknown, _) => Type::Unknown,
                (Type::Array(_), "length") => Type::Int,
                (Type::Class(c), f) if self.classes.contains_key(c) => {
                    let found = self.classes[c].fields.iter().find(|(n, _)| n == f).map(|(_, t)| t.clone());
                    found.unwrap_or_else(|| {
                        self.error(DiagCode::Unresolved, name.span.clone(), format!("{f} cannot be resolved or is not a field"));
                        Type::Unknown
                    })
                }
                _ => {
                    self.error(DiagCode::Unresolved, name.span.clone(), format!("{} cannot be resolved or is not a field", name.name));
                    Type::Unknown
                }
            },
        }
    }

    fn args(&mut self, args: &[Expr]) -> Vec<Type> {
        args.iter().map(|a| self.expr(a)).collect()
    }

    fn call(&mut self, e: &Expr, target: Option<&Expr>, name: &Ident, args: &[Expr]) -> Type {
        match target {
            None => {
                let arg_types = self.args(args);
                let chain: Vec<String> = self.class_chain.iter().rev().cloned().chain([LOOSE.to_string()]).collect();
                for class in chain {
                    let cands = self.find_method(&class, &name.name);
                    if !cands.is_empty() {
                        let cands: Vec<MethodSig> = cands.into_iter().cloned().collect();
                        return self.user_call(e, name, &cands, args, &arg_types);
                    }
                }
                let globals = library::global_functions(&name.name);
                if !globals.is_empty() {
                    return self.builtin_call(e, name, globals, args, &arg_types);
                }
                self.error(
                    DiagCode::Unresolved,
                    name.span.clone(),
                    format!("the method {}({}) is undefined", name.name, join_types(&arg_types)),
                );
                Type::Unknown
            }
            Some(t) => {
                let q = self.qualifier(t);
                let arg_types = self.args(args);
                match q {
                    Qualifier::Unresolved => Type::Unknown,
                    Qualifier::UserClass(c) => {
                        let cands: Vec<MethodSig> = self.find_method(&c, &name.name).into_iter().cloned().collect();
                        if cands.is_empty() {
                            self.undefined_method(name, &c, &arg_types)
                        } else {
                            self.user_call(e, name, &cands, args, &arg_types)
                        }
                    }
                    Qualifier::Library(c) => {
                        let overloads = library::static_methods(&c, &name.name);
                        if overloads.is_empty() {
                            self.undefined_method(name, &c, &arg_types)
                        } else {
                            self.builtin_call(e, name, overloads, args, &arg_types)
                        }
                    }
                    Qualifier::Value(Type::Unknown) => Type::Unknown,
                    Qualifier::Value(Type::Class(c)) if self.classes.contains_key(&c) => {
                        let cands: Vec<MethodSig> = self.find_method(&c, &name.name).into_iter().cloned().collect();
                        if cands.is_empty() {
                            self.undefined_method(name, &c, &arg_types)
                        } else {
                            self.user_call(e, name, &cands, args, &arg_types)
                        }
                    }
                    Qualifier::Value(recv) => {
                        let overloads = library::instance_methods(&recv, &name.name);
                        if overloads.is_empty() {
                            self.undefined_method(name, &recv.to_string(), &arg_types)
                        } else {
                            self.builtin_call(e, name, overloads, args, &arg_types)
                        }
                    }
                }
            }
        }
    }

    fn undefined_method(&mut self, name: &Ident, owner: &str, args: &[Type]) -> Type {
        self.error(
            DiagCode::Unresolved,
            name.span.clone(),
            format!("the method {}({}) is undefined for the type {owner}", name.name, join_types(args)),
        );
        Type::Unknown
    }

    fn user_call(&mut self, e: &Expr, name: &Ident, cands: &[MethodSig], args: &[Expr], arg_types: &[Type]) -> Type {
        let Some(sig) = cands.iter().find(|s| s.params.len() == args.len()) else {
            self.error(
                DiagCode::Arity,
                e.span.clone(),
                format!("the method {} is not applicable for {} argument(s)", name.name, args.len()),
            );
            return cands[0].ret.clone();
        };
        for ((p, a), expr) in sig.params.iter().zip(arg_types).zip(args) {
            if !p.accepts(a) {
                self.mismatch(&expr.span, format!("type mismatch: cannot convert from {a} to {p}"));
            }
        }
        sig.ret.clone()
    }

    fn builtin_call(
        &mut self,
        e: &Expr,
        name: &Ident,
        overloads: &[library::Overload],
        args: &[Expr],
        arg_types: &[Type],
    ) -> Type {
        match library::resolve(overloads, arg_types) {
            Resolution::Ok { ret, .. } => ret,
            Resolution::Arity { .. } => {
                self.error(
                    DiagCode::Arity,
                    e.span.clone(),
                    format!("the method {} is not applicable for {} argument(s)", name.name, args.len()),
                );
                Type::Unknown
            }
            Resolution::Mismatch { ret } => {
                let span = args.first().map_or(e.span.clone(), |a| a.span.start..args.last().expect("non-empty").span.end);
                self.error(
                    DiagCode::TypeMismatch,
                    span,
                    format!("the method {} is not applicable for the arguments ({})", name.name, join_types(arg_types)),
                );
                ret
            }
        }
    }

    fn new_object(&mut self, e: &Expr, ty: &TypeRef, args: &[Expr]) -> Type {
        let t = self.resolve_type(ty);
        let arg_types = self.args(args);
        match &t {
            Type::Unknown => Type::Unknown,
            Type::Class(c) if self.classes.contains_key(c) => {
                if !args.is_empty() {
                    self.error(DiagCode::Arity, e.span.clone(), format!("the constructor {c}() takes no arguments"));
                }
                t
            }
            _ => {
                let simple = match &ty.name {
                    TypeName::Named(n) => n.rsplit('.').next().unwrap_or(n).to_string(),
                    _ => String::new(),
                };
                let ctors = library::constructors(&simple);
                if ctors.is_empty() {
                    self.error(DiagCode::Unresolved, ty.span.clone(), format!("cannot instantiate the type {t}"));
                    return Type::Unknown;
                }
                match library::resolve(ctors, &arg_types) {
                    Resolution::Ok { ret, .. } => ret,
                    Resolution::Arity { .. } => {
                        self.error(DiagCode::Arity, e.span.clone(), format!("the constructor {simple} is not applicable for {} argument(s)", args.len()));
                        t
                    }
                    Resolution::Mismatch { ret } => {
                        self.error(
                            DiagCode::TypeMismatch,
                            e.span.clone(),
                            format!("the constructor {simple}({}) is undefined", join_types(&arg_types)),
                        );
                        ret
                    }
                }
            }
        }
    }
}

enum Qualifier {
    Value(Type),
    UserClass(String),
    Library(String),
    Unresolved,
}

fn wrap(mut t: Type, dims: usize) -> Type {
    if t.is_unknown() {
        return t;
    }
    for _ in 0..dims {
        t = Type::array_of(t);
    }
    t
}

fn join_types(ts: &[Type]) -> String {
    ts.iter().map(Type::to_string).collect::<Vec<_>>().join(", ")
}

fn is_lvalue(e: &Expr) -> bool {
    matches!(e.kind, ExprKind::Name(_) | ExprKind::Field { .. } | ExprKind::Index { .. } | ExprKind::Error)
}

fn is_true_literal(e: &Expr) -> bool {
    matches!(e.kind, ExprKind::Lit(Literal::Bool(true)))
}

fn contains_break(s: &Stmt) -> bool {
    match &s.kind {
        StmtKind::Break => true,
        StmtKind::If { then, els, .. } => contains_break(then) || els.as_deref().is_some_and(contains_break),
        StmtKind::Block(b) => b.stmts.iter().any(contains_break),
        // A break inside a nested loop targets that loop.
        _ => false,
    }
}

/// Whether execution can fall off the end of the statement list.
pub(crate) fn can_complete(stmts: &[Stmt]) -> bool {
    stmts.iter().all(stmt_can_complete)
}

fn stmt_can_complete(s: &Stmt) -> bool {
    match &s.kind {
        StmtKind::Return(_) => false,
        StmtKind::Block(b) => can_complete(&b.stmts),
        StmtKind::If { then, els: Some(els), .. } => stmt_can_complete(then) || stmt_can_complete(els),
        StmtKind::While { cond, body } => !is_true_literal(cond) || contains_break(body),
        StmtKind::DoWhile { body, cond } => {
            (stmt_can_complete(body) && !is_true_literal(cond)) || contains_break(body)
        }
        StmtKind::For { cond, body, .. } => cond.as_ref().is_some_and(|c| !is_true_literal(c)) || contains_break(body),
        _ => true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{check, parse};

    fn in_main(body: &str) -> String {
        format!("public class Main {{\n    public static void main(String[] args) {{\n{body}\n    }}\n}}\n")
    }

    fn codes(src: &str) -> Vec<DiagCode> {
        check(&SourceUnit::snippet(src), &TypeRegistry::builtin()).diagnostics.iter().map(|d| d.code).collect()
    }

    #[test]
    fn empty_main_is_clean() {
        assert!(codes(&in_main("")).is_empty());
    }

    #[test]
    fn string_from_int_is_mismatch() {
        assert_eq!(codes(&in_main("String s = 5;")), vec![DiagCode::TypeMismatch]);
    }

    #[test]
    fn undeclared_variable_hint_carries_assigned_type() {
        let r = check(&SourceUnit::snippet(in_main("var = \"some text\";")), &TypeRegistry::builtin());
        assert_eq!(r.error_count, 1);
        match &r.diagnostics[0].hint {
            Some(Hint::Name { name, assigned_type }) => {
                assert_eq!(name, "var");
                assert_eq!(assigned_type.as_ref(), Some(&Type::String));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unimported_library_type_is_unresolved() {
        assert_eq!(codes(&in_main("List xs = null;")), vec![DiagCode::UnresolvedType]);
        let src = format!("import java.util.List;\n{}", in_main("List xs = null;"));
        assert!(codes(&src).is_empty());
        assert_eq!(codes(&in_main("int n = Ints.tryParse(\"1\").orElse(0);")), vec![DiagCode::Unresolved]);
    }

    #[test]
    fn nested_main_is_reported_once() {
        let body = "public static void main(String[] args) {\n    int result = Integer.parseInt(args[0]);\n}";
        assert_eq!(codes(&in_main(body)), vec![DiagCode::NestedMethod]);
    }

    #[test]
    fn redeclaring_context_variable_is_duplicate() {
        assert_eq!(codes(&in_main("int x = 1;\nint x = 2;")), vec![DiagCode::DuplicateMember]);
        assert_eq!(codes(&in_main("String args = \"\";")), vec![DiagCode::DuplicateMember]);
    }

    #[test]
    fn missing_return_and_arity() {
        let src = "class A {\n  static int f(int a) { if (a > 0) { return 1; } }\n  static void g() { int y = f(); }\n}";
        assert_eq!(codes(src), vec![DiagCode::MissingReturn, DiagCode::Arity]);
        assert!(codes("class A { static int f() { while (true) { } } }").is_empty());
    }

    #[test]
    fn library_calls_typecheck() {
        let body = "String s = \"a b\";\nString[] parts = s.split(\" \");\nint n = parts.length;\nchar c = Character.toLowerCase(s.charAt(0));\nSystem.out.println(n + c);";
        assert!(codes(&in_main(body)).is_empty());
    }

    #[test]
    fn every_occurrence_of_an_undeclared_name_is_reported() {
        assert_eq!(codes(&in_main("x = 5;\nint y = x + 1;")), vec![DiagCode::UndeclaredVar, DiagCode::UndeclaredVar]);
    }

    #[test]
    fn unknown_import_is_unresolved() {
        let src = format!("import java.util.function.Function;\n{}", in_main(""));
        assert_eq!(codes(&src), vec![DiagCode::Unresolved]);
    }

    #[test]
    fn tree_without_errors_has_no_error_nodes() {
        let (cu, d) = parse(&SourceUnit::snippet(in_main("int x = 5;")));
        assert!(d.is_empty());
        assert!(!cu.has_error_nodes());
    }
}
