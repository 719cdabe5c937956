use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Static types of Mini-J.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Type {
    Int,
    Long,
    Float,
    Double,
    Boolean,
    Char,
    String,
    Array(Box<Type>),
    /// Opaque library reference type (`Optional`, `StringBuilder`, `List`, ...).
    Class(String),
    Null,
    Void,
    /// Result of an expression that already produced a diagnostic.
    Unknown,
}

impl Type {
    pub fn array_of(elem: Type) -> Type {
        Type::Array(Box::new(elem))
    }

    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Type::Int | Type::Long | Type::Float | Type::Double | Type::Char
        )
    }

    pub fn is_reference(&self) -> bool {
        matches!(
            self,
            Type::String | Type::Array(_) | Type::Class(_) | Type::Null
        )
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, Type::Unknown)
    }

    fn numeric_rank(&self) -> Option<u8> {
        match self {
            Type::Char => Some(0),
            Type::Int => Some(1),
            Type::Long => Some(2),
            Type::Float => Some(3),
            Type::Double => Some(4),
            _ => None,
        }
    }

    /// Binary numeric promotion.
    pub fn promote(a: &Type, b: &Type) -> Option<Type> {
        let ra = a.numeric_rank()?;
        let rb = b.numeric_rank()?;
        Some(match ra.max(rb).max(1) {
            1 => Type::Int,
            2 => Type::Long,
            3 => Type::Float,
            _ => Type::Double,
        })
    }

    /// Whether a value of type `from` may be stored in a slot of type `self`.
    pub fn accepts(&self, from: &Type) -> bool {
        if self == from || self.is_unknown() || from.is_unknown() {
            return true;
        }
        match (self, from) {
            (to, Type::Null) => to.is_reference(),
            (Type::Array(a), Type::Array(b)) => a.accepts(b) && a.is_reference() == b.is_reference(),
            (Type::Char, _) => false,
            (to, fr) => match (to.numeric_rank(), fr.numeric_rank()) {
                (Some(t), Some(f)) => t >= f,
                _ => false,
            },
        }
    }

    /// Explicit casts allowed between primitives and identity casts.
    pub fn castable(&self, from: &Type) -> bool {
        self.accepts(from)
            || (self.numeric_rank().is_some() && from.numeric_rank().is_some())
            || (self.is_reference() && from.is_reference())
    }

    /// Default initializer literal used when declaring a variable of this type.
    pub fn default_literal(&self) -> Option<String> {
        Some(match self {
            Type::Int => "0".into(),
            Type::Long => "0L".into(),
            Type::Float => "0.0f".into(),
            Type::Double => "0.0".into(),
            Type::Boolean => "false".into(),
            Type::Char => "'a'".into(),
            Type::String => "\"empty\"".into(),
            Type::Array(elem) => format!("new {}[0]", elem),
            Type::Class(_) => "null".into(),
            Type::Null | Type::Void | Type::Unknown => return None,
        })
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Int => f.write_str("int"),
            Type::Long => f.write_str("long"),
            Type::Float => f.write_str("float"),
            Type::Double => f.write_str("double"),
            Type::Boolean => f.write_str("boolean"),
            Type::Char => f.write_str("char"),
            Type::String => f.write_str("String"),
            Type::Array(elem) => write!(f, "{elem}[]"),
            Type::Class(name) => f.write_str(name),
            Type::Null => f.write_str("null"),
            Type::Void => f.write_str("void"),
            Type::Unknown => f.write_str("?"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown type name `{0}`")]
pub struct UnknownType(pub String);

impl FromStr for Type {
    type Err = UnknownType;

    /// Parses Mini-J spellings of value types (`int`, `String`, `char[]`, ...).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some(inner) = s.strip_suffix("[]") {
            return inner.parse().map(Type::array_of);
        }
        Ok(match s {
            "int" => Type::Int,
            "long" => Type::Long,
            "float" => Type::Float,
            "double" => Type::Double,
            "boolean" => Type::Boolean,
            "char" => Type::Char,
            "String" => Type::String,
            _ => return Err(UnknownType(s.to_string())),
        })
    }
}

impl Serialize for Type {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Type {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        match s.parse() {
            Ok(t) => Ok(t),
            Err(_) if s == "void" => Ok(Type::Void),
            Err(_) if s == "?" => Ok(Type::Unknown),
            Err(_) if s == "null" => Ok(Type::Null),
            Err(_) if s.chars().all(|c| c.is_alphanumeric() || c == '_') && !s.is_empty() => {
                Ok(Type::Class(s))
            }
            Err(e) => Err(serde::de::Error::custom(e)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn widening_rules() {
        assert!(Type::Long.accepts(&Type::Int));
        assert!(Type::Double.accepts(&Type::Int));
        assert!(Type::Int.accepts(&Type::Char));
        assert!(!Type::Int.accepts(&Type::Long));
        assert!(!Type::Char.accepts(&Type::Int));
        assert!(!Type::String.accepts(&Type::Int));
        assert!(Type::String.accepts(&Type::Null));
        assert!(!Type::Int.accepts(&Type::Null));
    }

    #[test]
    fn parses_spellings() {
        assert_eq!("String[]".parse::<Type>().unwrap(), Type::array_of(Type::String));
        assert_eq!("char".parse::<Type>().unwrap(), Type::Char);
        assert!("Foo".parse::<Type>().is_err());
    }
}
