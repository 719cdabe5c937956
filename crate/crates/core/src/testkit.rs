//! Type suggestion, testable-function synthesis and default test skeletons.

use std::ops::Range;

use serde::{Deserialize, Serialize};
use snipfit_minij::frontend::ast::{walk_stmts, ExprKind, Item, Stmt, StmtKind, TypeName, TypeRef};
use snipfit_minij::frontend::{check, parse_snippet, types::UnknownType};
use snipfit_minij::runtime::run_test;
use snipfit_minij::{Budget, RunOutcome, SourceUnit, Type, TypeRegistry};

pub const ENTRY: &str = "snippet";
pub const TEST_NAME: &str = "JUnitTest";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignatureSource {
    Suggested,
    User,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TypeSignature {
    pub arg_types: Vec<Type>,
    pub ret_type: Type,
    pub source: SignatureSource,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SignatureError {
    #[error(transparent)]
    UnknownType(#[from] UnknownType),
    #[error("a signature needs at least one argument")]
    NoArguments,
    #[error("type `{0}` has no default value")]
    NoDefault(Type),
}

impl TypeSignature {
    /// Parses user-entered type names.
    pub fn parse<S: AsRef<str>>(args: &[S], ret: &str) -> Result<Self, SignatureError> {
        if args.is_empty() {
            return Err(SignatureError::NoArguments);
        }
        Ok(Self {
            arg_types: args.iter().map(|a| a.as_ref().parse()).collect::<Result<_, _>>()?,
            ret_type: ret.parse()?,
            source: SignatureSource::User,
        })
    }

    /// `(String)->int`
    pub fn display(&self) -> String {
        let args: Vec<String> = self.arg_types.iter().map(Type::to_string).collect();
        format!("({})->{}", args.join(", "), self.ret_type)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TestableFunction {
    pub source: String,
    pub signature: TypeSignature,
    pub arg_names: Vec<String>,
    pub return_name: String,
}

impl TestableFunction {
    pub fn unit(&self) -> SourceUnit {
        SourceUnit::new(self.source.clone(), snipfit_minij::frontend::Origin::Spliced)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestCase {
    pub source: String,
    pub editable: bool,
}

impl TestCase {
    pub fn unit(&self) -> SourceUnit {
        SourceUnit::snippet(self.source.clone())
    }
}

fn declared_type(t: &TypeRef, extra_dims: usize) -> Type {
    let mut ty = match &t.name {
        TypeName::Int => Type::Int,
        TypeName::Long => Type::Long,
        TypeName::Double => Type::Double,
        TypeName::Float => Type::Float,
        TypeName::Boolean => Type::Boolean,
        TypeName::Char => Type::Char,
        TypeName::Named(n) => match n.rsplit('.').next().unwrap_or(n) {
            "String" => Type::String,
            "Integer" => Type::Int,
            "Long" => Type::Long,
            "Double" => Type::Double,
            "Float" => Type::Float,
            "Boolean" => Type::Boolean,
            "Character" => Type::Char,
            other => Type::Class(other.to_string()),
        },
    };
    for _ in 0..t.dims + extra_dims {
        ty = Type::array_of(ty);
    }
    ty
}

#[derive(Debug, Clone)]
struct Decl {
    name: String,
    ty: Type,
    /// Statement range when it declares nothing else.
    sole: Option<Range<usize>>,
}

struct Scan {
    decls: Vec<Decl>,
    last_assigned: Option<String>,
}

fn scan(body: &str) -> Scan {
    let (cu, _) = parse_snippet(&SourceUnit::snippet(body));
    let stmts: Vec<Stmt> = cu
        .items
        .into_iter()
        .filter_map(|i| match i {
            Item::Stmt(s) => Some(s),
            _ => None,
        })
        .collect();
    let mut decls = Vec::new();
    let mut last_assigned = None;
    walk_stmts(&stmts, &mut |s: &Stmt| match &s.kind {
        StmtKind::Local { ty, declarators, .. } => {
            let sole = (declarators.len() == 1).then(|| s.span.clone());
            for d in declarators {
                decls.push(Decl {
                    name: d.name.name.clone(),
                    ty: declared_type(ty, d.dims),
                    sole: sole.clone(),
                });
                if d.init.is_some() {
                    last_assigned = Some(d.name.name.clone());
                }
            }
        }
        StmtKind::Expr(e) => {
            if let ExprKind::Assign { target, .. } = &e.kind {
                if let ExprKind::Name(n) = &target.kind {
                    last_assigned = Some(n.clone());
                }
            }
        }
        _ => {}
    });
    Scan { decls, last_assigned }
}

/// Return type from the variable assigned last; argument types from every
/// other declared variable, in declaration order.
pub fn suggest_types(body: &str) -> Option<TypeSignature> {
    let Scan { decls, last_assigned } = scan(body);
    let ret_name = last_assigned?;
    let ret = decls.iter().rev().find(|d| d.name == ret_name)?;
    let arg_types: Vec<Type> = decls.iter().filter(|d| d.name != ret_name).map(|d| d.ty.clone()).collect();
    if arg_types.is_empty() {
        return None;
    }
    Some(TypeSignature {
        arg_types,
        ret_type: ret.ty.clone(),
        source: SignatureSource::Suggested,
    })
}

fn indent(text: &str, by: &str) -> String {
    text.lines()
        .map(|l| if l.trim().is_empty() { String::new() } else { format!("{by}{l}") })
        .collect::<Vec<_>>()
        .join("\n")
}

/// Turns a compilable body into `static <ret> snippet(<args>)`. The return
/// is the last declared variable of the return type; each argument binds the
/// first unused variable of its type, and its declaration is removed.
pub fn synthesize_function(
    imports: &[String],
    body: &str,
    sig: &TypeSignature,
    registry: &TypeRegistry,
) -> Option<TestableFunction> {
    let Scan { decls, .. } = scan(body);
    let ret = decls.iter().rposition(|d| d.ty == sig.ret_type)?;
    let mut bound: Vec<usize> = Vec::new();
    for ty in &sig.arg_types {
        let i = (0..decls.len()).find(|&i| i != ret && !bound.contains(&i) && decls[i].ty == *ty && decls[i].sole.is_some())?;
        bound.push(i);
    }
    let mut cuts: Vec<Range<usize>> = bound.iter().filter_map(|&i| decls[i].sole.clone()).collect();
    cuts.sort_by_key(|r| std::cmp::Reverse(r.start));
    let mut text = body.to_string();
    for r in cuts {
        text.replace_range(r, "");
    }
    let text: String = text.lines().filter(|l| !l.trim().is_empty()).collect::<Vec<_>>().join("\n");
    let params: Vec<String> = bound.iter().map(|&i| format!("{} {}", decls[i].ty, decls[i].name)).collect();
    let mut source = String::new();
    for i in imports {
        source.push_str(i);
        source.push('\n');
    }
    source.push_str(&format!(
        "public class Snippet {{\n    public static {} {ENTRY}({}) {{\n{}\n        return {};\n    }}\n}}\n",
        sig.ret_type,
        params.join(", "),
        indent(&text, "        "),
        decls[ret].name
    ));
    let f = TestableFunction {
        source,
        signature: sig.clone(),
        arg_names: bound.iter().map(|&i| decls[i].name.clone()).collect(),
        return_name: decls[ret].name.clone(),
    };
    (check(&f.unit(), registry).error_count == 0).then_some(f)
}

fn default_literal(t: &Type) -> Result<String, SignatureError> {
    match t {
        Type::Class(_) | Type::Null | Type::Void | Type::Unknown => Err(SignatureError::NoDefault(t.clone())),
        _ => t.default_literal().ok_or_else(|| SignatureError::NoDefault(t.clone())),
    }
}

/// One assertion comparing `snippet(defaults...)` with the default of the
/// return type.
pub fn generate_test_skeleton(sig: &TypeSignature) -> Result<TestCase, SignatureError> {
    if sig.arg_types.is_empty() {
        return Err(SignatureError::NoArguments);
    }
    let args: Vec<String> = sig.arg_types.iter().map(default_literal).collect::<Result<_, _>>()?;
    let expected = default_literal(&sig.ret_type)?;
    Ok(test_from_statements(&format!("assertEquals({ENTRY}({}), {expected});", args.join(", "))))
}

/// A full test class is kept as written; anything else is taken as the
/// statements of the test method.
pub fn test_from_source(source: &str) -> TestCase {
    let (cu, _) = parse_snippet(&SourceUnit::snippet(source));
    if cu.items.iter().any(|i| matches!(i, Item::Class(_))) {
        TestCase {
            source: source.to_string(),
            editable: true,
        }
    } else {
        test_from_statements(source)
    }
}

/// Wraps assertion statements in the single test method.
pub fn test_from_statements(stmts: &str) -> TestCase {
    TestCase {
        source: format!(
            "public class SnippetTest {{\n    @Test\n    public void {TEST_NAME}() {{\n{}\n    }}\n}}\n",
            indent(stmts.trim(), "        ")
        ),
        editable: true,
    }
}

/// A function of the given signature that returns the default value.
pub fn stub_function(sig: &TypeSignature) -> Result<SourceUnit, SignatureError> {
    let params: Vec<String> = sig.arg_types.iter().enumerate().map(|(i, t)| format!("{t} a{i}")).collect();
    let ret = default_literal(&sig.ret_type)?;
    Ok(SourceUnit::snippet(format!(
        "public class Snippet {{\n    public static {} {ENTRY}({}) {{\n        return {ret};\n    }}\n}}\n",
        sig.ret_type,
        params.join(", ")
    )))
}

/// Test against the stub: zero errors means the test only relies on the entry point.
pub fn check_test(test: &TestCase, sig: &TypeSignature, registry: &TypeRegistry) -> Result<usize, SignatureError> {
    let stub = stub_function(sig)?;
    let combined = snipfit_minij::runtime::combine_test(&stub, &test.unit());
    Ok(check(&combined, registry).error_count)
}

pub fn run_candidate_test(f: &TestableFunction, test: &TestCase, registry: &TypeRegistry, budget: &Budget) -> RunOutcome {
    run_test(&f.unit(), &test.unit(), registry, budget)
}
