//! Tree-walking interpreter over a checked compilation unit.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use std::time::Instant;

use regex::{Regex, RegexBuilder};

use super::value::{lock, structural_eq, ArrayRef, Value};
use super::{Budget, Fault};
use crate::frontend::ast::*;
use crate::frontend::library::{self, Builtin, Overload, Pt};
use crate::frontend::Type;

const MAX_CALL_DEPTH: usize = 1024;
const MAX_STRING_LEN: usize = 10_000_000;
const MAX_ALLOC_ELEMENTS: u64 = 4_000_000;
const MAX_OUTPUT: usize = 64 * 1024;
const CLOCK_INTERVAL: u64 = 1024;

type R<T> = Result<T, Fault>;

enum Flow {
    Normal,
    Break,
    Continue,
    Return(Value),
}

struct ClassRt<'a> {
    /// The class itself followed by its enclosing classes.
    chain: Vec<&'a str>,
    fields: Vec<&'a FieldDecl>,
    methods: Vec<&'a MethodDecl>,
}

struct Slot<'a> {
    name: &'a str,
    ty: Type,
    val: Value,
}

struct Frame<'a> {
    class: &'a str,
    slots: Vec<Slot<'a>>,
}

enum Place<'a> {
    Local(usize),
    Static(&'a str, &'a str),
    Elem(ArrayRef, usize),
}

enum Qual<'a> {
    Value(Value),
    UserClass(&'a str),
    Library(&'a str),
}

pub(crate) struct Interp<'a> {
    classes: HashMap<&'a str, ClassRt<'a>>,
    order: Vec<&'a str>,
    statics: HashMap<(&'a str, &'a str), (Type, Value)>,
    frames: Vec<Frame<'a>>,
    budget: Budget,
    start: Instant,
    next_clock: u64,
    pub steps: u64,
    allocated: u64,
    pub output: String,
    regexes: HashMap<String, Regex>,
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

fn wrap(mut t: Type, dims: usize) -> Type {
    for _ in 0..dims {
        t = Type::array_of(t);
    }
    t
}

fn npe(what: &str) -> Fault {
    Fault::NullPointer(format!("cannot invoke {what} on null"))
}

impl<'a> Interp<'a> {
    pub fn new(cu: &'a CompilationUnit, budget: Budget) -> Self {
        let mut me = Self {
            classes: HashMap::new(),
            order: Vec::new(),
            statics: HashMap::new(),
            frames: Vec::new(),
            budget,
            start: Instant::now(),
            next_clock: CLOCK_INTERVAL,
            steps: 0,
            allocated: 0,
            output: String::new(),
            regexes: HashMap::new(),
        };
        for item in &cu.items {
            if let Item::Class(c) = item {
                me.collect(c, &[]);
            }
        }
        me
    }

    fn collect(&mut self, c: &'a ClassDecl, outer: &[&'a str]) {
        let name = c.name.name.as_str();
        let mut chain = vec![name];
        chain.extend(outer.iter().rev());
        let mut rt = ClassRt {
            chain,
            fields: Vec::new(),
            methods: Vec::new(),
        };
        let mut path = outer.to_vec();
        path.push(name);
        for m in &c.members {
            match m {
                Member::Field(f) => rt.fields.push(f),
                Member::Method(m) => rt.methods.push(m),
                Member::Class(inner) => self.collect(inner, &path),
                Member::Error(_) => {}
            }
        }
        if !self.classes.contains_key(name) {
            self.order.push(name);
            self.classes.insert(name, rt);
        }
    }

    /// Resets the clock; the budget covers everything run afterwards.
    pub fn start_clock(&mut self) {
        self.start = Instant::now();
        self.next_clock = self.steps + CLOCK_INTERVAL;
    }

    /// Assigns defaults to every static field, then runs initializers in
    /// source order.
    pub fn init_statics(&mut self) -> R<()> {
        let order = self.order.clone();
        for &class in &order {
            let fields = self.classes[class].fields.clone();
            for f in &fields {
                let base = self.resolve(&f.ty);
                for d in &f.declarators {
                    let ty = wrap(base.clone(), d.dims);
                    let v = Value::default_for(&ty);
                    self.statics.insert((class, d.name.name.as_str()), (ty, v));
                }
            }
        }
        for &class in &order {
            let fields = self.classes[class].fields.clone();
            self.frames.push(Frame {
                class,
                slots: Vec::new(),
            });
            for f in &fields {
                for d in &f.declarators {
                    if let Some(init) = &d.init {
                        let key = (class, d.name.name.as_str());
                        let ty = self.statics[&key].0.clone();
                        let v = self.initializer(&ty, init)?;
                        self.statics.insert(key, (ty, v));
                    }
                }
            }
            self.frames.pop();
        }
        Ok(())
    }

    /// Finds `name` with the given arity, in `class` or else in the first
    /// class (source order) that declares it.
    pub fn find_entry(&self, class: Option<&str>, name: &str, arity: usize) -> Option<(&'a str, &'a MethodDecl)> {
        let candidates: Vec<&'a str> = match class {
            Some(c) => self.classes.get_key_value(c).map(|(k, _)| *k).into_iter().collect(),
            None => self.order.clone(),
        };
        candidates
            .into_iter()
            .find_map(|c| self.find_method(c, name, arity).map(|m| (c, m)))
    }

    fn find_method(&self, class: &str, name: &str, arity: usize) -> Option<&'a MethodDecl> {
        self.classes
            .get(class)?
            .methods
            .iter()
            .copied()
            .find(|m| m.name.name == name && m.params.len() == arity)
    }

    pub fn method_type(&self, m: &MethodDecl) -> (Vec<Type>, Type) {
        let params = m.params.iter().map(|p| self.resolve(&p.ty)).collect();
        let ret = m.ret.as_ref().map_or(Type::Void, |t| self.resolve(t));
        (params, ret)
    }

    fn resolve(&self, t: &TypeRef) -> Type {
        let base = match &t.name {
            TypeName::Int => Type::Int,
            TypeName::Long => Type::Long,
            TypeName::Double => Type::Double,
            TypeName::Float => Type::Float,
            TypeName::Boolean => Type::Boolean,
            TypeName::Char => Type::Char,
            TypeName::Named(n) => {
                let simple = n.rsplit('.').next().unwrap_or(n);
                if self.classes.contains_key(simple) {
                    Type::Class(simple.to_string())
                } else {
                    boxed(simple).unwrap_or_else(|| Type::Class(simple.to_string()))
                }
            }
        };
        wrap(base, t.dims)
    }

    // ----- budget --------------------------------------------------------

    fn tick(&mut self) -> R<()> {
        self.steps += 1;
        self.check_budget()
    }

    /// Charges work proportional to `units` elements or characters.
    fn charge(&mut self, units: usize) -> R<()> {
        self.steps += units as u64 / 4;
        self.check_budget()
    }

    fn check_budget(&mut self) -> R<()> {
        if self.steps > self.budget.max_steps {
            return Err(Fault::Timeout { steps: self.steps });
        }
        if self.steps >= self.next_clock {
            self.next_clock = self.steps + CLOCK_INTERVAL;
            if self.start.elapsed() >= self.budget.wall {
                return Err(Fault::Timeout { steps: self.steps });
            }
        }
        Ok(())
    }

    fn alloc(&mut self, n: usize) -> R<()> {
        self.allocated += n as u64;
        if n > MAX_STRING_LEN || self.allocated > MAX_ALLOC_ELEMENTS {
            return Err(Fault::OutOfMemory("Java heap space".into()));
        }
        self.charge(n)
    }

    fn new_string(&mut self, s: String) -> R<Value> {
        if s.len() > MAX_STRING_LEN {
            return Err(Fault::OutOfMemory("string too long".into()));
        }
        self.charge(s.len())?;
        Ok(Value::str(s))
    }

    // ----- calls ---------------------------------------------------------

    pub fn invoke(&mut self, class: &'a str, m: &'a MethodDecl, args: Vec<Value>) -> R<Value> {
        if self.frames.len() >= MAX_CALL_DEPTH {
            return Err(Fault::StackOverflow);
        }
        self.tick()?;
        let (params, ret) = self.method_type(m);
        let mut slots = Vec::with_capacity(args.len());
        for ((p, ty), v) in m.params.iter().zip(params).zip(args) {
            let val = v.coerce(&ty);
            slots.push(Slot {
                name: p.name.name.as_str(),
                ty,
                val,
            });
        }
        self.frames.push(Frame { class, slots });
        let flow = match &m.body {
            Some(b) => self.block(&b.stmts),
            None => Ok(Flow::Normal),
        };
        self.frames.pop();
        match flow? {
            Flow::Return(v) => Ok(v.coerce(&ret)),
            _ => Ok(Value::Void),
        }
    }

    fn chain(&self) -> Vec<&'a str> {
        let class = self.frames.last().map_or("", |f| f.class);
        self.classes.get(class).map(|c| c.chain.clone()).unwrap_or_default()
    }

    fn find_local(&self, name: &str) -> Option<usize> {
        self.frames.last()?.slots.iter().rposition(|s| s.name == name)
    }

    fn find_static(&self, name: &'a str) -> Option<(&'a str, &'a str)> {
        for c in self.chain() {
            if let Some(((k, f), _)) = self.statics.get_key_value(&(c, name)) {
                return Some((k, f));
            }
        }
        None
    }

    fn class_key(&self, name: &str) -> Option<&'a str> {
        self.classes.get_key_value(name).map(|(k, _)| *k)
    }

    // ----- statements ----------------------------------------------------

    fn block(&mut self, stmts: &'a [Stmt]) -> R<Flow> {
        let mark = self.frames.last().map_or(0, |f| f.slots.len());
        let mut flow = Flow::Normal;
        for s in stmts {
            flow = self.stmt(s)?;
            if !matches!(flow, Flow::Normal) {
                break;
            }
        }
        if let Some(f) = self.frames.last_mut() {
            f.slots.truncate(mark);
        }
        Ok(flow)
    }

    fn scoped(&mut self, s: &'a Stmt) -> R<Flow> {
        let mark = self.frames.last().map_or(0, |f| f.slots.len());
        let flow = self.stmt(s);
        if let Some(f) = self.frames.last_mut() {
            f.slots.truncate(mark);
        }
        flow
    }

    fn declare(&mut self, name: &'a str, ty: Type, val: Value) {
        if let Some(f) = self.frames.last_mut() {
            f.slots.push(Slot { name, ty, val });
        }
    }

    fn cond(&mut self, e: &'a Expr) -> R<bool> {
        match self.eval(e)? {
            Value::Bool(b) => Ok(b),
            other => Err(Fault::ClassCast(format!("{} cannot be used as a condition", other.type_of()))),
        }
    }

    fn stmt(&mut self, s: &'a Stmt) -> R<Flow> {
        self.tick()?;
        match &s.kind {
            StmtKind::Local { ty, declarators, .. } => {
                let base = self.resolve(ty);
                for d in declarators {
                    let t = wrap(base.clone(), d.dims);
                    let v = match &d.init {
                        Some(init) => self.initializer(&t, init)?,
                        None => Value::default_for(&t),
                    };
                    self.declare(&d.name.name, t, v);
                }
                Ok(Flow::Normal)
            }
            StmtKind::Expr(e) => {
                self.eval(e)?;
                Ok(Flow::Normal)
            }
            StmtKind::If { cond, then, els } => {
                if self.cond(cond)? {
                    self.scoped(then)
                } else if let Some(e) = els {
                    self.scoped(e)
                } else {
                    Ok(Flow::Normal)
                }
            }
            StmtKind::While { cond, body } => {
                while self.cond(cond)? {
                    match self.scoped(body)? {
                        Flow::Break => break,
                        r @ Flow::Return(_) => return Ok(r),
                        _ => {}
                    }
                }
                Ok(Flow::Normal)
            }
            StmtKind::DoWhile { body, cond } => {
                loop {
                    match self.scoped(body)? {
                        Flow::Break => break,
                        r @ Flow::Return(_) => return Ok(r),
                        _ => {}
                    }
                    if !self.cond(cond)? {
                        break;
                    }
                }
                Ok(Flow::Normal)
            }
            StmtKind::For { init, cond, update, body } => {
                let mark = self.frames.last().map_or(0, |f| f.slots.len());
                let result = self.for_loop(init, cond.as_ref(), update, body);
                if let Some(f) = self.frames.last_mut() {
                    f.slots.truncate(mark);
                }
                result
            }
            StmtKind::ForEach { ty, name, iter, body } => {
                let t = self.resolve(ty);
                let arr = match self.eval(iter)? {
                    Value::Array(a) => a,
                    Value::Null => return Err(npe("iterator()")),
                    other => return Err(Fault::ClassCast(format!("{} is not iterable", other.type_of()))),
                };
                let mut i = 0;
                loop {
                    let item = {
                        let data = lock(&arr);
                        match data.items.get(i) {
                            Some(v) => v.clone(),
                            None => break,
                        }
                    };
                    i += 1;
                    let mark = self.frames.last().map_or(0, |f| f.slots.len());
                    self.declare(&name.name, t.clone(), item.coerce(&t));
                    let flow = self.scoped(body);
                    if let Some(f) = self.frames.last_mut() {
                        f.slots.truncate(mark);
                    }
                    match flow? {
                        Flow::Break => break,
                        r @ Flow::Return(_) => return Ok(r),
                        _ => {}
                    }
                }
                Ok(Flow::Normal)
            }
            StmtKind::Return(e) => {
                let v = match e {
                    Some(e) => self.eval(e)?,
                    None => Value::Void,
                };
                Ok(Flow::Return(v))
            }
            StmtKind::Break => Ok(Flow::Break),
            StmtKind::Continue => Ok(Flow::Continue),
            StmtKind::Block(b) => self.block(&b.stmts),
            StmtKind::Empty => Ok(Flow::Normal),
            StmtKind::Import(_) | StmtKind::Method(_) | StmtKind::Class(_) | StmtKind::Error => {
                Err(Fault::Unsupported("statement is not executable".into()))
            }
        }
    }

    fn for_loop(&mut self, init: &'a [Stmt], cond: Option<&'a Expr>, update: &'a [Expr], body: &'a Stmt) -> R<Flow> {
        for s in init {
            self.stmt(s)?;
        }
        loop {
            if let Some(c) = cond {
                if !self.cond(c)? {
                    break;
                }
            }
            match self.scoped(body)? {
                Flow::Break => break,
                r @ Flow::Return(_) => return Ok(r),
                _ => {}
            }
            for u in update {
                self.eval(u)?;
            }
            self.tick()?;
        }
        Ok(Flow::Normal)
    }

    fn initializer(&mut self, ty: &Type, init: &'a Expr) -> R<Value> {
        match &init.kind {
            ExprKind::ArrayInit(items) => self.array_init(ty, items),
            _ => Ok(self.eval(init)?.coerce(ty)),
        }
    }

    fn array_init(&mut self, ty: &Type, items: &'a [Expr]) -> R<Value> {
        let elem = match ty {
            Type::Array(e) => (**e).clone(),
            other => return Err(Fault::ClassCast(format!("array initializer for {other}"))),
        };
        self.alloc(items.len())?;
        let mut out = Vec::with_capacity(items.len());
        for item in items {
            out.push(self.initializer(&elem, item)?);
        }
        Ok(Value::array(elem, out))
    }

    fn new_array(&mut self, ty: &Type, lens: &[i64]) -> R<Value> {
        let elem = match ty {
            Type::Array(e) => (**e).clone(),
            other => return Err(Fault::ClassCast(format!("cannot allocate {other}"))),
        };
        let n = lens[0];
        if n < 0 {
            return Err(Fault::NegativeArraySize(n));
        }
        let n = usize::try_from(n).map_err(|_| Fault::OutOfMemory("Java heap space".into()))?;
        self.alloc(n)?;
        let mut items = Vec::with_capacity(n);
        for _ in 0..n {
            items.push(if lens.len() > 1 {
                self.new_array(&elem, &lens[1..])?
            } else {
                Value::default_for(&elem)
            });
        }
        Ok(Value::array(elem, items))
    }

    // ----- expressions ---------------------------------------------------

    pub fn eval(&mut self, e: &'a Expr) -> R<Value> {
        self.tick()?;
        match &e.kind {
            ExprKind::Lit(l) => Ok(match l {
                Literal::Int(v) => Value::Int(*v as i32),
                Literal::Long(v) => Value::Long(*v),
                Literal::Float(v) => Value::Float(*v as f32),
                Literal::Double(v) => Value::Double(*v),
                Literal::Bool(b) => Value::Bool(*b),
                Literal::Char(c) => Value::Char(*c),
                Literal::Str(s) => Value::str(s.as_str()),
                Literal::Null => Value::Null,
            }),
            ExprKind::Name(_) | ExprKind::Index { .. } => {
                let p = self.place(e)?;
                Ok(self.read(&p))
            }
            ExprKind::Field { target, name } => self.field(target, name),
            ExprKind::Call { target, name, args } => self.call(target.as_deref(), name, args),
            ExprKind::Unary { op, expr } => {
                let v = self.eval(expr)?;
                unary(*op, v)
            }
            ExprKind::Binary { op: BinOp::And, lhs, rhs } => {
                Ok(Value::Bool(self.cond(lhs)? && self.cond(rhs)?))
            }
            ExprKind::Binary { op: BinOp::Or, lhs, rhs } => {
                Ok(Value::Bool(self.cond(lhs)? || self.cond(rhs)?))
            }
            ExprKind::Binary { op, lhs, rhs } => {
                let l = self.eval(lhs)?;
                let r = self.eval(rhs)?;
                self.binary(*op, l, r)
            }
            ExprKind::Assign { op, target, value } => {
                let p = self.place(target)?;
                let ty = self.slot_type(&p);
                let v = match op {
                    None => self.eval(value)?.coerce(&ty),
                    Some(op) => {
                        let old = self.read(&p);
                        let rhs = self.eval(value)?;
                        let r = self.binary(*op, old, rhs)?;
                        if ty == Type::String {
                            r
                        } else {
                            r.cast(&ty)
                        }
                    }
                };
                self.write(&p, v.clone());
                Ok(v)
            }
            ExprKind::IncDec { prefix, increment, target } => {
                let p = self.place(target)?;
                let ty = self.slot_type(&p);
                let old = self.read(&p);
                let delta = if *increment { BinOp::Add } else { BinOp::Sub };
                let new = self.binary(delta, old.clone(), Value::Int(1))?.cast(&ty);
                self.write(&p, new.clone());
                Ok(if *prefix { new } else { old })
            }
            ExprKind::Cond { cond, then, els } => {
                if self.cond(cond)? {
                    self.eval(then)
                } else {
                    self.eval(els)
                }
            }
            ExprKind::Cast { ty, expr } => {
                let t = self.resolve(ty);
                Ok(self.eval(expr)?.cast(&t))
            }
            ExprKind::NewArray { elem, lens, init } => {
                let ty = Type::array_of(self.resolve(elem));
                if let Some(items) = init {
                    return self.array_init(&ty, items);
                }
                let mut ns = Vec::with_capacity(lens.len());
                for l in lens {
                    ns.push(self.int_of(l)? as i64);
                }
                self.new_array(&ty, &ns)
            }
            ExprKind::NewObject { ty, args } => {
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    vals.push(self.eval(a)?);
                }
                match self.resolve(ty) {
                    Type::Class(c) if self.classes.contains_key(c.as_str()) => Ok(Value::Object(Arc::from(c.as_str()))),
                    t => {
                        let simple = match &t {
                            Type::String => "String".to_string(),
                            other => other.to_string(),
                        };
                        self.builtin(library::constructors(&simple), None, vals)
                    }
                }
            }
            ExprKind::ArrayInit(_) | ExprKind::Error => Err(Fault::Unsupported("expression is not executable".into())),
        }
    }

    fn int_of(&mut self, e: &'a Expr) -> R<i32> {
        match self.eval(e)? {
            Value::Int(v) => Ok(v),
            Value::Char(c) => Ok(c as i32),
            other => Err(Fault::ClassCast(format!("{} is not an int", other.type_of()))),
        }
    }

    fn place(&mut self, e: &'a Expr) -> R<Place<'a>> {
        match &e.kind {
            ExprKind::Name(n) => {
                if let Some(i) = self.find_local(n) {
                    return Ok(Place::Local(i));
                }
                if let Some((c, f)) = self.find_static(n) {
                    return Ok(Place::Static(c, f));
                }
                Err(Fault::Unsupported(format!("unbound name {n}")))
            }
            ExprKind::Field { target, name } => {
                let class = match self.qualifier(target)? {
                    Qual::UserClass(c) => c,
                    Qual::Value(Value::Object(c)) => self
                        .class_key(&c)
                        .ok_or_else(|| Fault::Unsupported(format!("unknown class {c}")))?,
                    Qual::Value(Value::Null) => return Err(npe(&name.name)),
                    _ => return Err(Fault::Unsupported(format!("{} is not assignable", name.name))),
                };
                if self.statics.contains_key(&(class, name.name.as_str())) {
                    Ok(Place::Static(class, &name.name))
                } else {
                    Err(Fault::Unsupported(format!("unknown field {}", name.name)))
                }
            }
            ExprKind::Index { array, index } => {
                let arr = self.eval(array)?;
                let i = self.int_of(index)?;
                let a = match arr {
                    Value::Array(a) => a,
                    Value::Null => return Err(Fault::NullPointer("cannot load from null array".into())),
                    other => return Err(Fault::ClassCast(format!("{} is not an array", other.type_of()))),
                };
                let len = lock(&a).items.len();
                if i < 0 || i as usize >= len {
                    return Err(Fault::IndexOutOfBounds { index: i as i64, len });
                }
                Ok(Place::Elem(a, i as usize))
            }
            _ => Err(Fault::Unsupported("not an assignable location".into())),
        }
    }

    fn read(&self, p: &Place<'a>) -> Value {
        match p {
            Place::Local(i) => self.frames.last().expect("frame").slots[*i].val.clone(),
            Place::Static(c, f) => self.statics[&(*c, *f)].1.clone(),
            Place::Elem(a, i) => lock(a).items[*i].clone(),
        }
    }

    fn slot_type(&self, p: &Place<'a>) -> Type {
        match p {
            Place::Local(i) => self.frames.last().expect("frame").slots[*i].ty.clone(),
            Place::Static(c, f) => self.statics[&(*c, *f)].0.clone(),
            Place::Elem(a, _) => lock(a).elem.clone(),
        }
    }

    fn write(&mut self, p: &Place<'a>, v: Value) {
        match p {
            Place::Local(i) => self.frames.last_mut().expect("frame").slots[*i].val = v,
            Place::Static(c, f) => {
                if let Some(slot) = self.statics.get_mut(&(*c, *f)) {
                    slot.1 = v;
                }
            }
            Place::Elem(a, i) => lock(a).items[*i] = v,
        }
    }

    fn qualifier(&mut self, t: &'a Expr) -> R<Qual<'a>> {
        if let ExprKind::Name(n) = &t.kind {
            if self.find_local(n).is_none() && self.find_static(n).is_none() {
                if let Some(c) = self.class_key(n) {
                    return Ok(Qual::UserClass(c));
                }
                return Ok(Qual::Library(n));
            }
        }
        Ok(Qual::Value(self.eval(t)?))
    }

    fn field(&mut self, target: &'a Expr, name: &'a Ident) -> R<Value> {
        let f = name.name.as_str();
        match self.qualifier(target)? {
            Qual::Library(c) => library_field(c, f).ok_or_else(|| Fault::Unsupported(format!("unknown field {c}.{f}"))),
            Qual::UserClass(c) => self
                .statics
                .get(&(c, f))
                .map(|s| s.1.clone())
                .ok_or_else(|| Fault::Unsupported(format!("unknown field {c}.{f}"))),
            Qual::Value(Value::Array(a)) if f == "length" => Ok(Value::Int(lock(&a).items.len() as i32)),
            Qual::Value(Value::Object(c)) => self
                .statics
                .iter()
                .find(|((k, n), _)| **k == *c && *n == f)
                .map(|(_, s)| s.1.clone())
                .ok_or_else(|| Fault::Unsupported(format!("unknown field {c}.{f}"))),
            Qual::Value(Value::Null) => Err(Fault::NullPointer(format!("cannot read field \"{f}\" because value is null"))),
            Qual::Value(v) => Err(Fault::Unsupported(format!("{} has no field {f}", v.type_of()))),
        }
    }

    fn call(&mut self, target: Option<&'a Expr>, name: &'a Ident, args: &'a [Expr]) -> R<Value> {
        let n = name.name.as_str();
        let qual = match target {
            Some(t) => Some(self.qualifier(t)?),
            None => None,
        };
        let mut vals = Vec::with_capacity(args.len());
        for a in args {
            vals.push(self.eval(a)?);
        }
        match qual {
            None => {
                let mut chain = self.chain();
                chain.push("");
                for c in chain {
                    if let Some(m) = self.find_method(c, n, vals.len()) {
                        let c = self.class_key(c).unwrap_or("");
                        return self.invoke(c, m, vals);
                    }
                }
                self.builtin(library::global_functions(n), None, vals)
            }
            Some(Qual::UserClass(c)) => self.user_call(c, n, vals),
            Some(Qual::Library(c)) => self.builtin(library::static_methods(c, n), None, vals),
            Some(Qual::Value(Value::Object(c))) => {
                let c = self.class_key(&c).ok_or_else(|| Fault::Unsupported(format!("unknown class {c}")))?;
                self.user_call(c, n, vals)
            }
            Some(Qual::Value(Value::Null)) => Err(npe(&format!("\"{n}()\""))),
            Some(Qual::Value(recv)) => {
                let overloads = library::instance_methods(&recv.type_of(), n);
                self.builtin(overloads, Some(recv), vals)
            }
        }
    }

    fn user_call(&mut self, class: &'a str, name: &str, args: Vec<Value>) -> R<Value> {
        match self.find_method(class, name, args.len()) {
            Some(m) => self.invoke(class, m, args),
            None => Err(Fault::Unsupported(format!("unknown method {class}.{name}"))),
        }
    }

    fn binary(&mut self, op: BinOp, l: Value, r: Value) -> R<Value> {
        if op == BinOp::Add && (matches!(l, Value::Str(_)) || matches!(r, Value::Str(_))) {
            let s = format!("{l}{r}");
            return self.new_string(s);
        }
        binary(op, l, r)
    }

    // ----- builtins ------------------------------------------------------

    fn builtin(&mut self, overloads: &[Overload], recv: Option<Value>, mut args: Vec<Value>) -> R<Value> {
        let types: Vec<Type> = args.iter().map(Value::type_of).collect();
        let Some(ov) = overloads
            .iter()
            .find(|o| o.params.len() == args.len() && o.params.iter().zip(&types).all(|(p, t)| p.accepts(t)))
        else {
            return Err(Fault::Unsupported("no applicable library method".into()));
        };
        for (a, p) in args.iter_mut().zip(ov.params) {
            if matches!(p, Pt::Int | Pt::Long | Pt::Double | Pt::Float) {
                *a = std::mem::replace(a, Value::Void).coerce(&p.as_type());
            }
        }
        if ov.params == [Pt::Numeric, Pt::Numeric] {
            let t = Type::promote(&types[0], &types[1]).unwrap_or(Type::Double);
            for a in args.iter_mut() {
                *a = std::mem::replace(a, Value::Void).coerce(&t);
            }
        }
        self.apply(ov.builtin, recv, args)
    }

    fn regex(&mut self, pattern: &str) -> R<Regex> {
        if let Some(r) = self.regexes.get(pattern) {
            return Ok(r.clone());
        }
        self.charge(pattern.len() * 4)?;
        let re = RegexBuilder::new(pattern)
            .size_limit(1 << 20)
            .build()
            .map_err(|e| Fault::PatternSyntax(format!("{pattern}: {}", first_line(&e.to_string()))))?;
        self.regexes.insert(pattern.to_string(), re.clone());
        Ok(re)
    }

    fn print(&mut self, s: &str) {
        let room = MAX_OUTPUT.saturating_sub(self.output.len());
        let mut end = s.len().min(room);
        while !s.is_char_boundary(end) {
            end -= 1;
        }
        self.output.push_str(&s[..end]);
    }

    fn apply(&mut self, b: Builtin, recv: Option<Value>, args: Vec<Value>) -> R<Value> {
        use Builtin as B;
        let a0 = args.first().cloned().unwrap_or(Value::Void);
        let a1 = args.get(1).cloned().unwrap_or(Value::Void);
        let recv_str = || match &recv {
            Some(Value::Str(s)) => Ok(s.clone()),
            _ => Err(npe("String method")),
        };
        Ok(match b {
            B::IntegerParseInt | B::IntegerValueOfStr => {
                let s = str_arg(&a0, true)?;
                Value::Int(parse_int(&s, 10)?)
            }
            B::IntegerParseIntRadix => {
                let s = str_arg(&a0, true)?;
                Value::Int(parse_int(&s, int(&a1))?)
            }
            B::IntegerValueOfInt => Value::Int(int(&a0)),
            B::IntegerToString | B::StringValueOf | B::CharToString => {
                let s = match (&recv, &a0) {
                    (Some(r), _) => r.to_string(),
                    (None, Value::Array(a)) if lock(a).elem == Type::Char => chars_of(a).into_iter().collect(),
                    (None, v) => v.to_string(),
                };
                self.new_string(s)?
            }
            B::LongParseLong => {
                let s = str_arg(&a0, true)?;
                Value::Long(s.parse::<i64>().map_err(|_| number_format(&s))?)
            }
            B::DoubleParseDouble => Value::Double(parse_double(&str_arg(&a0, false)?)?),
            B::FloatParseFloat => Value::Float(parse_double(&str_arg(&a0, false)?)? as f32),
            B::BooleanParseBoolean => Value::Bool(matches!(&a0, Value::Str(s) if s.eq_ignore_ascii_case("true"))),
            B::CharToLowerCase => Value::Char(single_case(ch(&a0), true)),
            B::CharToUpperCase => Value::Char(single_case(ch(&a0), false)),
            B::CharIsDigit => Value::Bool(is_digit(ch(&a0))),
            B::CharIsLetter => Value::Bool(ch(&a0).is_alphabetic()),
            B::CharIsLetterOrDigit => Value::Bool(ch(&a0).is_alphabetic() || is_digit(ch(&a0))),
            B::CharIsWhitespace => Value::Bool(is_java_whitespace(ch(&a0))),
            B::CharIsUpperCase => Value::Bool(ch(&a0).is_uppercase()),
            B::CharIsLowerCase => Value::Bool(ch(&a0).is_lowercase()),
            B::CharGetNumericValue => Value::Int(ch(&a0).to_digit(36).map_or(-1, |d| d as i32)),
            B::MathAbs => match a0 {
                Value::Int(v) => Value::Int(v.wrapping_abs()),
                Value::Long(v) => Value::Long(v.wrapping_abs()),
                Value::Float(v) => Value::Float(v.abs()),
                Value::Double(v) => Value::Double(v.abs()),
                other => other,
            },
            B::MathMax | B::MathMin => {
                let max = b == B::MathMax;
                match (a0, a1) {
                    (Value::Int(x), Value::Int(y)) => Value::Int(if max { x.max(y) } else { x.min(y) }),
                    (Value::Long(x), Value::Long(y)) => Value::Long(if max { x.max(y) } else { x.min(y) }),
                    (Value::Float(x), Value::Float(y)) => Value::Float(fminmax(x as f64, y as f64, max) as f32),
                    (x, y) => Value::Double(fminmax(dbl(&x), dbl(&y), max)),
                }
            }
            B::MathPow => Value::Double(dbl(&a0).powf(dbl(&a1))),
            B::MathSqrt => Value::Double(dbl(&a0).sqrt()),
            B::MathFloor => Value::Double(dbl(&a0).floor()),
            B::MathCeil => Value::Double(dbl(&a0).ceil()),
            B::MathRound => Value::Long((dbl(&a0) + 0.5).floor() as i64),
            B::IntsTryParse => {
                let s = str_arg(&a0, false)?;
                Value::Optional(parse_int(&s, 10).ok().map(|v| Box::new(Value::Int(v))))
            }
            B::OptionalOfNullable => Value::Optional((!a0.is_null()).then(|| Box::new(a0))),
            B::OptionalOf => {
                if a0.is_null() {
                    return Err(Fault::NullPointer("Optional.of(null)".into()));
                }
                Value::Optional(Some(Box::new(a0)))
            }
            B::OptionalEmpty => Value::Optional(None),
            B::OptionalOrElse | B::OptionalIsPresent | B::OptionalIsEmpty | B::OptionalGet => {
                let inner = match recv {
                    Some(Value::Optional(o)) => o,
                    _ => return Err(npe("Optional method")),
                };
                match b {
                    B::OptionalOrElse => inner.map_or(a0, |v| *v),
                    B::OptionalIsPresent => Value::Bool(inner.is_some()),
                    B::OptionalIsEmpty => Value::Bool(inner.is_none()),
                    _ => *inner.ok_or_else(|| Fault::NoSuchElement("No value present".into()))?,
                }
            }
            B::StringUtilsIsNumeric => Value::Bool(match &a0 {
                Value::Str(s) => !s.is_empty() && s.chars().all(is_digit),
                _ => false,
            }),
            B::StringUtilsReverse => match &a0 {
                Value::Str(s) => self.new_string(s.chars().rev().collect())?,
                _ => Value::Null,
            },
            B::ArraysToString => match &a0 {
                Value::Array(a) => {
                    self.charge(lock(a).items.len())?;
                    let s = a0.to_string();
                    self.new_string(s)?
                }
                _ => Value::str("null"),
            },
            B::ArraysSort => {
                let a = match &a0 {
                    Value::Array(a) => a.clone(),
                    _ => return Err(Fault::NullPointer("Arrays.sort(null)".into())),
                };
                let n = lock(&a).items.len();
                self.charge(n * (usize::BITS - n.leading_zeros()) as usize * 4)?;
                sort_values(&mut lock(&a).items)?;
                Value::Void
            }
            B::StrLength => Value::Int(recv_str()?.chars().count() as i32),
            B::StrCharAt => {
                let s = recv_str()?;
                let i = int(&a0);
                let c = usize::try_from(i).ok().and_then(|i| s.chars().nth(i));
                Value::Char(c.ok_or_else(|| {
                    Fault::StringIndex(format!("index {i}, length {}", s.chars().count()))
                })?)
            }
            B::StrSubstring | B::StrSubstringRange => {
                let s = recv_str()?;
                let cs: Vec<char> = s.chars().collect();
                let begin = int(&a0);
                let end = if b == B::StrSubstring { cs.len() as i32 } else { int(&a1) };
                if begin < 0 || end > cs.len() as i32 || begin > end {
                    return Err(Fault::StringIndex(format!(
                        "begin {begin}, end {end}, length {}",
                        cs.len()
                    )));
                }
                self.new_string(cs[begin as usize..end as usize].iter().collect())?
            }
            B::StrIndexOf | B::StrLastIndexOf => {
                let s = recv_str()?;
                let needle: Vec<char> = match &a0 {
                    Value::Char(c) => vec![*c],
                    Value::Str(n) => n.chars().collect(),
                    _ => return Err(npe("indexOf")),
                };
                let hay: Vec<char> = s.chars().collect();
                self.charge(hay.len())?;
                let found = if needle.len() > hay.len() {
                    None
                } else if b == B::StrIndexOf {
                    (0..=hay.len() - needle.len()).find(|&i| hay[i..i + needle.len()] == needle[..])
                } else {
                    (0..=hay.len() - needle.len()).rev().find(|&i| hay[i..i + needle.len()] == needle[..])
                };
                Value::Int(found.map_or(-1, |i| i as i32))
            }
            B::StrContains => Value::Bool(recv_str()?.contains(&*str_arg(&a0, false)?)),
            B::StrEquals => Value::Bool(matches!(&a0, Value::Str(o) if *o == recv_str()?)),
            B::StrEqualsIgnoreCase => Value::Bool(match &a0 {
                Value::Str(o) => {
                    let s = recv_str()?;
                    s.chars().count() == o.chars().count()
                        && s.chars().zip(o.chars()).all(|(x, y)| {
                            x == y || single_case(x, false) == single_case(y, false) || single_case(x, true) == single_case(y, true)
                        })
                }
                _ => false,
            }),
            B::StrIsEmpty => Value::Bool(recv_str()?.is_empty()),
            B::StrTrim => {
                let s = recv_str()?;
                self.new_string(s.trim_matches(|c: char| c <= ' ').to_string())?
            }
            B::StrToLowerCase => {
                let s = recv_str()?.to_lowercase();
                self.new_string(s)?
            }
            B::StrToUpperCase => {
                let s = recv_str()?.to_uppercase();
                self.new_string(s)?
            }
            B::StrSplit => {
                let s = recv_str()?;
                let re = self.regex(&str_arg(&a0, false)?)?;
                self.charge(s.len())?;
                let parts = java_split(&re, &s);
                self.alloc(parts.len())?;
                Value::array(Type::String, parts.into_iter().map(Value::str).collect())
            }
            B::StrToCharArray => {
                let s = recv_str()?;
                let cs: Vec<Value> = s.chars().map(Value::Char).collect();
                self.alloc(cs.len())?;
                Value::array(Type::Char, cs)
            }
            B::StrReplace => {
                let s = recv_str()?;
                let out = match (&a0, &a1) {
                    (Value::Char(x), Value::Char(y)) => s.chars().map(|c| if c == *x { *y } else { c }).collect(),
                    (Value::Str(x), Value::Str(y)) => s.replace(&**x, y),
                    _ => return Err(npe("replace")),
                };
                self.new_string(out)?
            }
            B::StrReplaceAll => {
                let s = recv_str()?;
                let re = self.regex(&str_arg(&a0, false)?)?;
                let rep = java_replacement(&str_arg(&a1, false)?);
                self.charge(s.len())?;
                let out = re.replace_all(&s, rep.as_str()).into_owned();
                self.new_string(out)?
            }
            B::StrStartsWith => Value::Bool(recv_str()?.starts_with(&*str_arg(&a0, false)?)),
            B::StrEndsWith => Value::Bool(recv_str()?.ends_with(&*str_arg(&a0, false)?)),
            B::StrConcat => {
                let s = format!("{}{}", recv_str()?, str_arg(&a0, false)?);
                self.new_string(s)?
            }
            B::StrCompareTo => {
                let s = recv_str()?;
                let o = str_arg(&a0, false)?;
                let diff = s.chars().zip(o.chars()).find(|(x, y)| x != y);
                Value::Int(match diff {
                    Some((x, y)) => x as i32 - y as i32,
                    None => s.chars().count() as i32 - o.chars().count() as i32,
                })
            }
            B::StrMatches => {
                let s = recv_str()?;
                let re = self.regex(&format!("^(?:{})$", str_arg(&a0, false)?))?;
                self.charge(s.len())?;
                Value::Bool(re.is_match(&s))
            }
            B::SbAppend | B::SbReverse | B::SbToString | B::SbLength | B::SbInsert | B::SbCharAt => {
                let sb = match &recv {
                    Some(Value::Builder(sb)) => sb.clone(),
                    _ => return Err(npe("StringBuilder method")),
                };
                let mut buf = sb.lock().unwrap_or_else(|e| e.into_inner());
                match b {
                    B::SbAppend => {
                        let add = a0.to_string();
                        if buf.len() + add.len() > MAX_STRING_LEN {
                            return Err(Fault::OutOfMemory("string too long".into()));
                        }
                        self.charge(add.len())?;
                        buf.push_str(&add);
                        drop(buf);
                        Value::Builder(sb)
                    }
                    B::SbReverse => {
                        self.charge(buf.len())?;
                        *buf = buf.chars().rev().collect();
                        drop(buf);
                        Value::Builder(sb)
                    }
                    B::SbToString => {
                        let s = buf.clone();
                        drop(buf);
                        self.new_string(s)?
                    }
                    B::SbLength => Value::Int(buf.chars().count() as i32),
                    B::SbCharAt => {
                        let i = int(&a0);
                        let c = usize::try_from(i).ok().and_then(|i| buf.chars().nth(i));
                        Value::Char(c.ok_or_else(|| Fault::StringIndex(format!("index {i}")))?)
                    }
                    _ => {
                        let at = int(&a0);
                        let add = a1.to_string();
                        let len = buf.chars().count();
                        if at < 0 || at as usize > len {
                            return Err(Fault::StringIndex(format!("offset {at}, length {len}")));
                        }
                        if buf.len() + add.len() > MAX_STRING_LEN {
                            return Err(Fault::OutOfMemory("string too long".into()));
                        }
                        self.charge(buf.len() + add.len())?;
                        let byte = buf.char_indices().nth(at as usize).map_or(buf.len(), |(i, _)| i);
                        buf.insert_str(byte, &add);
                        drop(buf);
                        Value::Builder(sb)
                    }
                }
            }
            B::Println => {
                let line = args.first().map(Value::to_string).unwrap_or_default();
                self.print(&line);
                self.print("\n");
                Value::Void
            }
            B::Print => {
                self.print(&a0.to_string());
                Value::Void
            }
            B::AssertEquals => {
                if !structural_eq(&a0, &a1) {
                    return Err(Fault::AssertionFailed(format!("expected:<{a0}> but was:<{a1}>")));
                }
                Value::Void
            }
            B::AssertEqualsDelta => {
                let (x, y, d) = (dbl(&a0), dbl(&a1), dbl(&args[2]));
                if !((x - y).abs() <= d || x == y) {
                    return Err(Fault::AssertionFailed(format!("expected:<{a0}> but was:<{a1}>")));
                }
                Value::Void
            }
            B::AssertTrue | B::AssertFalse => {
                let want = b == B::AssertTrue;
                if !matches!(a0, Value::Bool(v) if v == want) {
                    return Err(Fault::AssertionFailed(format!("expected {want}")));
                }
                Value::Void
            }
            B::NewStringBuilder => Value::Builder(Arc::new(Mutex::new(String::new()))),
            B::NewStringBuilderFrom => {
                let s = str_arg(&a0, false)?;
                self.charge(s.len())?;
                Value::Builder(Arc::new(Mutex::new(s.to_string())))
            }
            B::NewStringFromChars => match &a0 {
                Value::Array(a) => {
                    let s: String = chars_of(a).into_iter().collect();
                    self.new_string(s)?
                }
                _ => return Err(Fault::NullPointer("new String(null)".into())),
            },
        })
    }
}

fn first_line(s: &str) -> &str {
    s.lines().find(|l| !l.trim().is_empty()).unwrap_or(s).trim()
}

fn library_field(class: &str, name: &str) -> Option<Value> {
    Some(match (class, name) {
        ("Integer", "MAX_VALUE") => Value::Int(i32::MAX),
        ("Integer", "MIN_VALUE") => Value::Int(i32::MIN),
        ("Long", "MAX_VALUE") => Value::Long(i64::MAX),
        ("Long", "MIN_VALUE") => Value::Long(i64::MIN),
        ("Double", "MAX_VALUE") => Value::Double(f64::MAX),
        ("Double", "MIN_VALUE") => Value::Double(f64::from_bits(1)),
        ("Math", "PI") => Value::Double(std::f64::consts::PI),
        ("Math", "E") => Value::Double(std::f64::consts::E),
        ("System", "out" | "err") => Value::PrintStream,
        _ => return None,
    })
}

fn str_arg(v: &Value, number: bool) -> R<Arc<str>> {
    match v {
        Value::Str(s) => Ok(s.clone()),
        Value::Null if number => Err(Fault::NumberFormat("Cannot parse null string: null".into())),
        Value::Null => Err(Fault::NullPointer("argument is null".into())),
        other => Ok(Arc::from(other.to_string())),
    }
}

fn int(v: &Value) -> i32 {
    match v {
        Value::Int(x) => *x,
        Value::Char(c) => *c as i32,
        Value::Long(x) => *x as i32,
        _ => 0,
    }
}

fn ch(v: &Value) -> char {
    match v {
        Value::Char(c) => *c,
        _ => '\0',
    }
}

fn dbl(v: &Value) -> f64 {
    match v {
        Value::Int(x) => *x as f64,
        Value::Long(x) => *x as f64,
        Value::Float(x) => *x as f64,
        Value::Double(x) => *x,
        Value::Char(c) => *c as u32 as f64,
        _ => f64::NAN,
    }
}

fn chars_of(a: &ArrayRef) -> Vec<char> {
    lock(a)
        .items
        .iter()
        .map(|v| match v {
            Value::Char(c) => *c,
            _ => '\0',
        })
        .collect()
}

fn fminmax(x: f64, y: f64, max: bool) -> f64 {
    if x.is_nan() || y.is_nan() {
        f64::NAN
    } else if max {
        x.max(y)
    } else {
        x.min(y)
    }
}

fn number_format(s: &str) -> Fault {
    Fault::NumberFormat(format!("For input string: \"{s}\""))
}

fn parse_int(s: &str, radix: i32) -> R<i32> {
    if !(2..=36).contains(&radix) {
        return Err(Fault::NumberFormat(format!("radix {radix} out of range")));
    }
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    if digits.is_empty() || !digits.chars().all(|c| c.is_digit(radix as u32)) {
        return Err(number_format(s));
    }
    i32::from_str_radix(s, radix as u32).map_err(|_| number_format(s))
}

fn parse_double(s: &str) -> R<f64> {
    let t = s.trim_matches(|c: char| c <= ' ');
    let unsigned = t.strip_prefix(['+', '-']).unwrap_or(t);
    match unsigned {
        "NaN" => return Ok(f64::NAN),
        "Infinity" => return Ok(if t.starts_with('-') { f64::NEG_INFINITY } else { f64::INFINITY }),
        _ => {}
    }
    let body = t.strip_suffix(['d', 'D', 'f', 'F']).unwrap_or(t);
    let ok = !body.is_empty()
        && body
            .chars()
            .all(|c| c.is_ascii_digit() || matches!(c, '.' | 'e' | 'E' | '+' | '-'))
        && body.chars().any(|c| c.is_ascii_digit());
    if !ok {
        return Err(number_format(s));
    }
    body.parse::<f64>().map_err(|_| number_format(s))
}

fn single_case(c: char, lower: bool) -> char {
    let mut it: Box<dyn Iterator<Item = char>> = if lower {
        Box::new(c.to_lowercase())
    } else {
        Box::new(c.to_uppercase())
    };
    match (it.next(), it.next()) {
        (Some(x), None) => x,
        _ => c,
    }
}

fn is_digit(c: char) -> bool {
    c.is_ascii_digit()
}

fn is_java_whitespace(c: char) -> bool {
    ('\u{1C}'..='\u{1F}').contains(&c) || (c.is_whitespace() && !matches!(c, '\u{A0}' | '\u{2007}' | '\u{202F}' | '\u{85}'))
}

/// `String.split(regex)` with limit zero.
pub(crate) fn java_split(re: &Regex, s: &str) -> Vec<String> {
    if s.is_empty() {
        return vec![String::new()];
    }
    let mut parts = Vec::new();
    let mut last = 0;
    for m in re.find_iter(s) {
        if m.end() == 0 {
            continue;
        }
        if m.start() == m.end() && m.start() >= s.len() {
            continue;
        }
        parts.push(s[last..m.start()].to_string());
        last = m.end();
    }
    if parts.is_empty() && last == 0 {
        return vec![s.to_string()];
    }
    parts.push(s[last..].to_string());
    while parts.last().is_some_and(|p| p.is_empty()) {
        parts.pop();
    }
    parts
}

/// Converts a Java replacement string (`$1`, `\$`) to regex crate syntax.
fn java_replacement(rep: &str) -> String {
    let mut out = String::with_capacity(rep.len());
    let mut chars = rep.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '\\' => match chars.next() {
                Some('$') => out.push_str("$$"),
                Some(x) => out.push(x),
                None => {}
            },
            '$' => {
                let mut n = String::new();
                while let Some(d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                    n.push(*d);
                    chars.next();
                }
                if n.is_empty() {
                    out.push_str("$$");
                } else {
                    out.push_str(&format!("${{{n}}}"));
                }
            }
            c => out.push(c),
        }
    }
    out
}

fn sort_values(items: &mut [Value]) -> R<()> {
    let mut err = None;
    items.sort_by(|a, b| match (a, b) {
        (Value::Str(x), Value::Str(y)) => x.cmp(y),
        (Value::Int(x), Value::Int(y)) => x.cmp(y),
        (Value::Long(x), Value::Long(y)) => x.cmp(y),
        (Value::Char(x), Value::Char(y)) => x.cmp(y),
        (Value::Double(x), Value::Double(y)) => x.total_cmp(y),
        (Value::Float(x), Value::Float(y)) => x.total_cmp(y),
        (Value::Bool(_), _) | (_, Value::Bool(_)) => {
            err = Some(Fault::ClassCast("boolean is not comparable".into()));
            std::cmp::Ordering::Equal
        }
        _ => {
            err = Some(Fault::NullPointer("cannot compare null elements".into()));
            std::cmp::Ordering::Equal
        }
    });
    err.map_or(Ok(()), Err)
}

#[derive(Clone, Copy)]
enum Kind {
    I,
    L,
    F,
    D,
}

fn kind(v: &Value) -> Option<Kind> {
    Some(match v {
        Value::Int(_) | Value::Char(_) => Kind::I,
        Value::Long(_) => Kind::L,
        Value::Float(_) => Kind::F,
        Value::Double(_) => Kind::D,
        _ => return None,
    })
}

fn as_i64(v: &Value) -> i64 {
    match v {
        Value::Int(x) => *x as i64,
        Value::Long(x) => *x,
        Value::Char(c) => *c as i64,
        _ => 0,
    }
}

fn unary(op: UnOp, v: Value) -> R<Value> {
    Ok(match (op, v) {
        (UnOp::Not, Value::Bool(b)) => Value::Bool(!b),
        (UnOp::Neg, Value::Int(x)) => Value::Int(x.wrapping_neg()),
        (UnOp::Neg, Value::Char(c)) => Value::Int(-(c as i32)),
        (UnOp::Neg, Value::Long(x)) => Value::Long(x.wrapping_neg()),
        (UnOp::Neg, Value::Float(x)) => Value::Float(-x),
        (UnOp::Neg, Value::Double(x)) => Value::Double(-x),
        (UnOp::Plus, Value::Char(c)) => Value::Int(c as i32),
        (UnOp::Plus, v) => v,
        (UnOp::BitNot, Value::Int(x)) => Value::Int(!x),
        (UnOp::BitNot, Value::Char(c)) => Value::Int(!(c as i32)),
        (UnOp::BitNot, Value::Long(x)) => Value::Long(!x),
        (op, v) => return Err(Fault::Unsupported(format!("operator {op:?} on {}", v.type_of()))),
    })
}

fn ref_eq(l: &Value, r: &Value) -> bool {
    match (l, r) {
        (Value::Array(x), Value::Array(y)) => Arc::ptr_eq(x, y),
        (Value::Builder(x), Value::Builder(y)) => Arc::ptr_eq(x, y),
        (Value::Object(x), Value::Object(y)) => Arc::ptr_eq(x, y),
        (Value::Optional(x), Value::Optional(y)) => x.is_none() && y.is_none(),
        (Value::Str(x), Value::Str(y)) => x == y,
        (Value::Bool(x), Value::Bool(y)) => x == y,
        (Value::Null, Value::Null) | (Value::PrintStream, Value::PrintStream) => true,
        _ => false,
    }
}

fn binary(op: BinOp, l: Value, r: Value) -> R<Value> {
    use BinOp::*;
    let (kl, kr) = match (kind(&l), kind(&r)) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Ok(match (op, &l, &r) {
                (Eq, _, _) => Value::Bool(ref_eq(&l, &r)),
                (Ne, _, _) => Value::Bool(!ref_eq(&l, &r)),
                (BitAnd | And, Value::Bool(x), Value::Bool(y)) => Value::Bool(*x & *y),
                (BitOr | Or, Value::Bool(x), Value::Bool(y)) => Value::Bool(*x | *y),
                (BitXor, Value::Bool(x), Value::Bool(y)) => Value::Bool(*x ^ *y),
                _ => {
                    return Err(Fault::Unsupported(format!(
                        "operator {} on {} and {}",
                        op.symbol(),
                        l.type_of(),
                        r.type_of()
                    )))
                }
            })
        }
    };
    let k = match (kl, kr) {
        (Kind::D, _) | (_, Kind::D) => Kind::D,
        (Kind::F, _) | (_, Kind::F) => Kind::F,
        (Kind::L, _) | (_, Kind::L) => Kind::L,
        _ => Kind::I,
    };
    let cmp = |o: std::cmp::Ordering| -> Option<bool> {
        use std::cmp::Ordering::*;
        Some(match op {
            Eq => o == Equal,
            Ne => o != Equal,
            Lt => o == Less,
            Le => o != Greater,
            Gt => o == Greater,
            Ge => o != Less,
            _ => return None,
        })
    };
    match k {
        Kind::I | Kind::L => {
            let (x, y) = (as_i64(&l), as_i64(&r));
            if let Some(b) = cmp(x.cmp(&y)) {
                return Ok(Value::Bool(b));
            }
            if matches!(op, Div | Rem) && y == 0 {
                return Err(Fault::Arithmetic("/ by zero".into()));
            }
            if let Kind::I = k {
                let (x, y) = (x as i32, y as i32);
                Ok(Value::Int(match op {
                    Add => x.wrapping_add(y),
                    Sub => x.wrapping_sub(y),
                    Mul => x.wrapping_mul(y),
                    Div => x.wrapping_div(y),
                    Rem => x.wrapping_rem(y),
                    BitAnd => x & y,
                    BitOr => x | y,
                    BitXor => x ^ y,
                    _ => return Err(Fault::Unsupported(format!("operator {} on int", op.symbol()))),
                }))
            } else {
                Ok(Value::Long(match op {
                    Add => x.wrapping_add(y),
                    Sub => x.wrapping_sub(y),
                    Mul => x.wrapping_mul(y),
                    Div => x.wrapping_div(y),
                    Rem => x.wrapping_rem(y),
                    BitAnd => x & y,
                    BitOr => x | y,
                    BitXor => x ^ y,
                    _ => return Err(Fault::Unsupported(format!("operator {} on long", op.symbol()))),
                }))
            }
        }
        Kind::F | Kind::D => {
            let (x, y) = (dbl(&l), dbl(&r));
            if matches!(op, Eq | Ne | Lt | Le | Gt | Ge) {
                let b = match op {
                    Eq => x == y,
                    Ne => x != y,
                    Lt => x < y,
                    Le => x <= y,
                    Gt => x > y,
                    _ => x >= y,
                };
                return Ok(Value::Bool(b));
            }
            let v = match op {
                Add => x + y,
                Sub => x - y,
                Mul => x * y,
                Div => x / y,
                Rem => x % y,
                _ => return Err(Fault::Unsupported(format!("operator {} on floating point", op.symbol()))),
            };
            Ok(if let Kind::F = k {
                let (x, y) = (x as f32, y as f32);
                Value::Float(match op {
                    Add => x + y,
                    Sub => x - y,
                    Mul => x * y,
                    Div => x / y,
                    _ => x % y,
                })
            } else {
                Value::Double(v)
            })
        }
    }
}
