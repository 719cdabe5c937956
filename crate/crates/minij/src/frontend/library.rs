//! Builtin library surface. The analyzer uses the signatures, the interpreter
//! dispatches on [`Builtin`].

use super::types::Type;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Builtin {
    IntegerParseInt,
    IntegerParseIntRadix,
    IntegerValueOfStr,
    IntegerValueOfInt,
    IntegerToString,
    LongParseLong,
    DoubleParseDouble,
    FloatParseFloat,
    BooleanParseBoolean,
    StringValueOf,
    CharToLowerCase,
    CharToUpperCase,
    CharIsDigit,
    CharIsLetter,
    CharIsLetterOrDigit,
    CharIsWhitespace,
    CharIsUpperCase,
    CharIsLowerCase,
    CharGetNumericValue,
    CharToString,
    MathAbs,
    MathMax,
    MathMin,
    MathPow,
    MathSqrt,
    MathFloor,
    MathCeil,
    MathRound,
    IntsTryParse,
    OptionalOfNullable,
    OptionalOf,
    OptionalEmpty,
    OptionalOrElse,
    OptionalIsPresent,
    OptionalIsEmpty,
    OptionalGet,
    StringUtilsIsNumeric,
    StringUtilsReverse,
    ArraysToString,
    ArraysSort,
    StrLength,
    StrCharAt,
    StrSubstring,
    StrSubstringRange,
    StrIndexOf,
    StrLastIndexOf,
    StrContains,
    StrEquals,
    StrEqualsIgnoreCase,
    StrIsEmpty,
    StrTrim,
    StrToLowerCase,
    StrToUpperCase,
    StrSplit,
    StrToCharArray,
    StrReplace,
    StrReplaceAll,
    StrStartsWith,
    StrEndsWith,
    StrConcat,
    StrCompareTo,
    StrMatches,
    SbAppend,
    SbReverse,
    SbToString,
    SbLength,
    SbInsert,
    SbCharAt,
    Println,
    Print,
    AssertEquals,
    AssertEqualsDelta,
    AssertTrue,
    AssertFalse,
    NewStringBuilder,
    NewStringBuilderFrom,
    NewStringFromChars,
}

/// Parameter kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pt {
    Int,
    Long,
    Double,
    Float,
    Bool,
    Char,
    Str,
    CharArr,
    /// Any non-void value.
    Any,
    /// Any primitive numeric value.
    Numeric,
    /// Any array.
    Array,
}

impl Pt {
    pub fn accepts(self, t: &Type) -> bool {
        match self {
            Pt::Any => !matches!(t, Type::Void),
            Pt::Numeric => t.is_numeric() || t.is_unknown(),
            Pt::Array => matches!(t, Type::Array(_) | Type::Unknown | Type::Null),
            other => other.as_type().accepts(t),
        }
    }

    pub fn as_type(self) -> Type {
        match self {
            Pt::Int => Type::Int,
            Pt::Long => Type::Long,
            Pt::Double => Type::Double,
            Pt::Float => Type::Float,
            Pt::Bool => Type::Boolean,
            Pt::Char => Type::Char,
            Pt::Str => Type::String,
            Pt::CharArr => Type::array_of(Type::Char),
            Pt::Any | Pt::Numeric | Pt::Array => Type::Unknown,
        }
    }
}

/// Return type rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rt {
    T(Pt),
    StrArr,
    Void,
    Class(&'static str),
    /// Same as the type of argument `n`.
    Arg(usize),
    /// Binary numeric promotion of all arguments.
    Promote,
    Unknown,
}

#[derive(Debug, Clone, Copy)]
pub struct Overload {
    pub builtin: Builtin,
    pub params: &'static [Pt],
    pub ret: Rt,
}

macro_rules! o {
    ($b:expr, $p:expr, $r:expr) => {
        Overload { builtin: $b, params: $p, ret: $r }
    };
}

use Builtin as B;

/// Static methods of library classes, by simple class name.
pub fn static_methods(class: &str, name: &str) -> &'static [Overload] {
    match (class, name) {
        ("Integer", "parseInt") => &[
            o!(B::IntegerParseInt, &[Pt::Str], Rt::T(Pt::Int)),
            o!(B::IntegerParseIntRadix, &[Pt::Str, Pt::Int], Rt::T(Pt::Int)),
        ],
        ("Integer", "valueOf") => &[
            o!(B::IntegerValueOfStr, &[Pt::Str], Rt::T(Pt::Int)),
            o!(B::IntegerValueOfInt, &[Pt::Int], Rt::T(Pt::Int)),
        ],
        ("Integer", "toString") => &[o!(B::IntegerToString, &[Pt::Int], Rt::T(Pt::Str))],
        ("Long", "parseLong") => &[o!(B::LongParseLong, &[Pt::Str], Rt::T(Pt::Long))],
        ("Double", "parseDouble") | ("Double", "valueOf") => {
            &[o!(B::DoubleParseDouble, &[Pt::Str], Rt::T(Pt::Double))]
        }
        ("Float", "parseFloat") => &[o!(B::FloatParseFloat, &[Pt::Str], Rt::T(Pt::Float))],
        ("Boolean", "parseBoolean") => &[o!(B::BooleanParseBoolean, &[Pt::Str], Rt::T(Pt::Bool))],
        ("String", "valueOf") => &[o!(B::StringValueOf, &[Pt::Any], Rt::T(Pt::Str))],
        ("Character", "toLowerCase") => &[o!(B::CharToLowerCase, &[Pt::Char], Rt::T(Pt::Char))],
        ("Character", "toUpperCase") => &[o!(B::CharToUpperCase, &[Pt::Char], Rt::T(Pt::Char))],
        ("Character", "isDigit") => &[o!(B::CharIsDigit, &[Pt::Char], Rt::T(Pt::Bool))],
        ("Character", "isLetter") => &[o!(B::CharIsLetter, &[Pt::Char], Rt::T(Pt::Bool))],
        ("Character", "isLetterOrDigit") => &[o!(B::CharIsLetterOrDigit, &[Pt::Char], Rt::T(Pt::Bool))],
        ("Character", "isWhitespace") => &[o!(B::CharIsWhitespace, &[Pt::Char], Rt::T(Pt::Bool))],
        ("Character", "isUpperCase") => &[o!(B::CharIsUpperCase, &[Pt::Char], Rt::T(Pt::Bool))],
        ("Character", "isLowerCase") => &[o!(B::CharIsLowerCase, &[Pt::Char], Rt::T(Pt::Bool))],
        ("Character", "getNumericValue") => &[o!(B::CharGetNumericValue, &[Pt::Char], Rt::T(Pt::Int))],
        ("Character", "toString") => &[o!(B::CharToString, &[Pt::Char], Rt::T(Pt::Str))],
        ("Math", "abs") => &[
            o!(B::MathAbs, &[Pt::Int], Rt::T(Pt::Int)),
            o!(B::MathAbs, &[Pt::Long], Rt::T(Pt::Long)),
            o!(B::MathAbs, &[Pt::Float], Rt::T(Pt::Float)),
            o!(B::MathAbs, &[Pt::Double], Rt::T(Pt::Double)),
        ],
        ("Math", "max") => &[o!(B::MathMax, &[Pt::Numeric, Pt::Numeric], Rt::Promote)],
        ("Math", "min") => &[o!(B::MathMin, &[Pt::Numeric, Pt::Numeric], Rt::Promote)],
        ("Math", "pow") => &[o!(B::MathPow, &[Pt::Double, Pt::Double], Rt::T(Pt::Double))],
        ("Math", "sqrt") => &[o!(B::MathSqrt, &[Pt::Double], Rt::T(Pt::Double))],
        ("Math", "floor") => &[o!(B::MathFloor, &[Pt::Double], Rt::T(Pt::Double))],
        ("Math", "ceil") => &[o!(B::MathCeil, &[Pt::Double], Rt::T(Pt::Double))],
        ("Math", "round") => &[o!(B::MathRound, &[Pt::Double], Rt::T(Pt::Long))],
        ("Ints", "tryParse") => &[o!(B::IntsTryParse, &[Pt::Str], Rt::Class("Optional"))],
        ("Optional", "ofNullable") => &[o!(B::OptionalOfNullable, &[Pt::Any], Rt::Class("Optional"))],
        ("Optional", "of") => &[o!(B::OptionalOf, &[Pt::Any], Rt::Class("Optional"))],
        ("Optional", "empty") => &[o!(B::OptionalEmpty, &[], Rt::Class("Optional"))],
        ("StringUtils", "isNumeric") => &[o!(B::StringUtilsIsNumeric, &[Pt::Str], Rt::T(Pt::Bool))],
        ("StringUtils", "reverse") => &[o!(B::StringUtilsReverse, &[Pt::Str], Rt::T(Pt::Str))],
        ("Arrays", "toString") => &[o!(B::ArraysToString, &[Pt::Array], Rt::T(Pt::Str))],
        ("Arrays", "sort") => &[o!(B::ArraysSort, &[Pt::Array], Rt::Void)],
        _ => &[],
    }
}

/// Static fields of library classes.
pub fn static_field(class: &str, name: &str) -> Option<Type> {
    Some(match (class, name) {
        ("Integer", "MAX_VALUE" | "MIN_VALUE") => Type::Int,
        ("Long", "MAX_VALUE" | "MIN_VALUE") => Type::Long,
        ("Double", "MAX_VALUE" | "MIN_VALUE") => Type::Double,
        ("Math", "PI" | "E") => Type::Double,
        ("System", "out" | "err") => Type::Class("PrintStream".into()),
        _ => return None,
    })
}

/// Instance methods by receiver type.
pub fn instance_methods(recv: &Type, name: &str) -> &'static [Overload] {
    match recv {
        Type::String => match name {
            "length" => &[o!(B::StrLength, &[], Rt::T(Pt::Int))],
            "charAt" => &[o!(B::StrCharAt, &[Pt::Int], Rt::T(Pt::Char))],
            "substring" => &[
                o!(B::StrSubstring, &[Pt::Int], Rt::T(Pt::Str)),
                o!(B::StrSubstringRange, &[Pt::Int, Pt::Int], Rt::T(Pt::Str)),
            ],
            "indexOf" => &[
                o!(B::StrIndexOf, &[Pt::Str], Rt::T(Pt::Int)),
                o!(B::StrIndexOf, &[Pt::Char], Rt::T(Pt::Int)),
            ],
            "lastIndexOf" => &[
                o!(B::StrLastIndexOf, &[Pt::Str], Rt::T(Pt::Int)),
                o!(B::StrLastIndexOf, &[Pt::Char], Rt::T(Pt::Int)),
            ],
            "contains" => &[o!(B::StrContains, &[Pt::Str], Rt::T(Pt::Bool))],
            "equals" => &[o!(B::StrEquals, &[Pt::Any], Rt::T(Pt::Bool))],
            "equalsIgnoreCase" => &[o!(B::StrEqualsIgnoreCase, &[Pt::Str], Rt::T(Pt::Bool))],
            "isEmpty" => &[o!(B::StrIsEmpty, &[], Rt::T(Pt::Bool))],
            "trim" => &[o!(B::StrTrim, &[], Rt::T(Pt::Str))],
            "toLowerCase" => &[o!(B::StrToLowerCase, &[], Rt::T(Pt::Str))],
            "toUpperCase" => &[o!(B::StrToUpperCase, &[], Rt::T(Pt::Str))],
            "split" => &[o!(B::StrSplit, &[Pt::Str], Rt::StrArr)],
            "toCharArray" => &[o!(B::StrToCharArray, &[], Rt::T(Pt::CharArr))],
            "replace" => &[
                o!(B::StrReplace, &[Pt::Char, Pt::Char], Rt::T(Pt::Str)),
                o!(B::StrReplace, &[Pt::Str, Pt::Str], Rt::T(Pt::Str)),
            ],
            "replaceAll" => &[o!(B::StrReplaceAll, &[Pt::Str, Pt::Str], Rt::T(Pt::Str))],
            "startsWith" => &[o!(B::StrStartsWith, &[Pt::Str], Rt::T(Pt::Bool))],
            "endsWith" => &[o!(B::StrEndsWith, &[Pt::Str], Rt::T(Pt::Bool))],
            "concat" => &[o!(B::StrConcat, &[Pt::Str], Rt::T(Pt::Str))],
            "compareTo" => &[o!(B::StrCompareTo, &[Pt::Str], Rt::T(Pt::Int))],
            "matches" => &[o!(B::StrMatches, &[Pt::Str], Rt::T(Pt::Bool))],
            "toString" => &[o!(B::StringValueOf, &[], Rt::T(Pt::Str))],
            _ => &[],
        },
        Type::Class(c) if c == "StringBuilder" => match name {
            "append" => &[o!(B::SbAppend, &[Pt::Any], Rt::Class("StringBuilder"))],
            "reverse" => &[o!(B::SbReverse, &[], Rt::Class("StringBuilder"))],
            "toString" => &[o!(B::SbToString, &[], Rt::T(Pt::Str))],
            "length" => &[o!(B::SbLength, &[], Rt::T(Pt::Int))],
            "insert" => &[o!(B::SbInsert, &[Pt::Int, Pt::Any], Rt::Class("StringBuilder"))],
            "charAt" => &[o!(B::SbCharAt, &[Pt::Int], Rt::T(Pt::Char))],
            _ => &[],
        },
        Type::Class(c) if c == "Optional" => match name {
            "orElse" => &[o!(B::OptionalOrElse, &[Pt::Any], Rt::Arg(0))],
            "isPresent" => &[o!(B::OptionalIsPresent, &[], Rt::T(Pt::Bool))],
            "isEmpty" => &[o!(B::OptionalIsEmpty, &[], Rt::T(Pt::Bool))],
            "get" => &[o!(B::OptionalGet, &[], Rt::Unknown)],
            _ => &[],
        },
        Type::Class(c) if c == "PrintStream" => match name {
            "println" => &[
                o!(B::Println, &[], Rt::Void),
                o!(B::Println, &[Pt::Any], Rt::Void),
            ],
            "print" => &[o!(B::Print, &[Pt::Any], Rt::Void)],
            _ => &[],
        },
        _ => &[],
    }
}

/// Functions callable without a qualifier in every class.
pub fn global_functions(name: &str) -> &'static [Overload] {
    match name {
        "assertEquals" => &[
            o!(B::AssertEquals, &[Pt::Any, Pt::Any], Rt::Void),
            o!(B::AssertEqualsDelta, &[Pt::Numeric, Pt::Numeric, Pt::Numeric], Rt::Void),
        ],
        "assertTrue" => &[o!(B::AssertTrue, &[Pt::Bool], Rt::Void)],
        "assertFalse" => &[o!(B::AssertFalse, &[Pt::Bool], Rt::Void)],
        _ => &[],
    }
}

/// Constructors of library classes.
pub fn constructors(class: &str) -> &'static [Overload] {
    match class {
        "StringBuilder" => &[
            o!(B::NewStringBuilder, &[], Rt::Class("StringBuilder")),
            o!(B::NewStringBuilderFrom, &[Pt::Str], Rt::Class("StringBuilder")),
        ],
        "String" => &[o!(B::NewStringFromChars, &[Pt::CharArr], Rt::T(Pt::Str))],
        _ => &[],
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Resolution {
    Ok { builtin: Builtin, ret: Type },
    /// No overload takes this many arguments.
    Arity { expected: Vec<usize> },
    /// Arity matched but argument types did not.
    Mismatch { ret: Type },
}

/// Chooses the first overload whose arity and parameter types fit.
pub fn resolve(overloads: &[Overload], args: &[Type]) -> Resolution {
    let same_arity: Vec<&Overload> = overloads.iter().filter(|o| o.params.len() == args.len()).collect();
    if same_arity.is_empty() {
        return Resolution::Arity {
            expected: overloads.iter().map(|o| o.params.len()).collect(),
        };
    }
    for ov in &same_arity {
        if ov.params.iter().zip(args).all(|(p, a)| p.accepts(a)) {
            return Resolution::Ok {
                builtin: ov.builtin,
                ret: return_type(ov.ret, args),
            };
        }
    }
    Resolution::Mismatch {
        ret: return_type(same_arity[0].ret, args),
    }
}

pub fn return_type(rt: Rt, args: &[Type]) -> Type {
    match rt {
        Rt::T(p) => p.as_type(),
        Rt::StrArr => Type::array_of(Type::String),
        Rt::Void => Type::Void,
        Rt::Class(c) => Type::Class(c.to_string()),
        Rt::Arg(n) => args.get(n).cloned().unwrap_or(Type::Unknown),
        Rt::Promote => args
            .iter()
            .try_fold(Type::Char, |acc, t| Type::promote(&acc, t))
            .unwrap_or(Type::Unknown),
        Rt::Unknown => Type::Unknown,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overloads_resolve_by_arity_then_type() {
        let r = resolve(static_methods("Math", "abs"), &[Type::Long]);
        assert_eq!(r, Resolution::Ok { builtin: B::MathAbs, ret: Type::Long });
        let r = resolve(instance_methods(&Type::String, "substring"), &[Type::Int, Type::Int]);
        assert_eq!(r, Resolution::Ok { builtin: B::StrSubstringRange, ret: Type::String });
        assert!(matches!(resolve(static_methods("Integer", "parseInt"), &[]), Resolution::Arity { .. }));
        assert!(matches!(
            resolve(static_methods("Integer", "parseInt"), &[Type::Int]),
            Resolution::Mismatch { ret: Type::Int }
        ));
    }

    #[test]
    fn or_else_takes_argument_type() {
        let r = resolve(instance_methods(&Type::Class("Optional".into()), "orElse"), &[Type::Int]);
        assert_eq!(r, Resolution::Ok { builtin: B::OptionalOrElse, ret: Type::Int });
    }
}
