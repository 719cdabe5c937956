use std::fmt;
use std::sync::{Arc, Mutex};

use crate::frontend::Type;

/// Absolute tolerance for floating-point equality in assertions.
pub const FLOAT_TOLERANCE: f64 = 1e-9;

#[derive(Debug)]
pub struct ArrayData {
    pub elem: Type,
    pub items: Vec<Value>,
}

pub type ArrayRef = Arc<Mutex<ArrayData>>;

#[derive(Debug, Clone)]
pub enum Value {
    Int(i32),
    Long(i64),
    Float(f32),
    Double(f64),
    Bool(bool),
    Char(char),
    Str(Arc<str>),
    Array(ArrayRef),
    Optional(Option<Box<Value>>),
    Builder(Arc<Mutex<String>>),
    PrintStream,
    /// Instance of a user class; all user fields are per class.
    Object(Arc<str>),
    Null,
    Void,
}

impl Value {
    pub fn str(s: impl Into<Arc<str>>) -> Value {
        Value::Str(s.into())
    }

    pub fn array(elem: Type, items: Vec<Value>) -> Value {
        Value::Array(Arc::new(Mutex::new(ArrayData { elem, items })))
    }

    /// Static type of this value, as seen by overload resolution.
    pub fn type_of(&self) -> Type {
        match self {
            Value::Int(_) => Type::Int,
            Value::Long(_) => Type::Long,
            Value::Float(_) => Type::Float,
            Value::Double(_) => Type::Double,
            Value::Bool(_) => Type::Boolean,
            Value::Char(_) => Type::Char,
            Value::Str(_) => Type::String,
            Value::Array(a) => Type::array_of(lock(a).elem.clone()),
            Value::Optional(_) => Type::Class("Optional".into()),
            Value::Builder(_) => Type::Class("StringBuilder".into()),
            Value::PrintStream => Type::Class("PrintStream".into()),
            Value::Object(c) => Type::Class(c.to_string()),
            Value::Null => Type::Null,
            Value::Void => Type::Void,
        }
    }

    /// Zero value of a type.
    pub fn default_for(t: &Type) -> Value {
        match t {
            Type::Int => Value::Int(0),
            Type::Long => Value::Long(0),
            Type::Float => Value::Float(0.0),
            Type::Double => Value::Double(0.0),
            Type::Boolean => Value::Bool(false),
            Type::Char => Value::Char('\0'),
            _ => Value::Null,
        }
    }

    /// Widening conversion into a slot of type `t`.
    pub fn coerce(self, t: &Type) -> Value {
        match (t, &self) {
            (Type::Long, Value::Int(v)) => Value::Long(*v as i64),
            (Type::Long, Value::Char(c)) => Value::Long(*c as i64),
            (Type::Int, Value::Char(c)) => Value::Int(*c as i32),
            (Type::Float, Value::Int(v)) => Value::Float(*v as f32),
            (Type::Float, Value::Long(v)) => Value::Float(*v as f32),
            (Type::Float, Value::Char(c)) => Value::Float(*c as u32 as f32),
            (Type::Double, Value::Int(v)) => Value::Double(*v as f64),
            (Type::Double, Value::Long(v)) => Value::Double(*v as f64),
            (Type::Double, Value::Float(v)) => Value::Double(*v as f64),
            (Type::Double, Value::Char(c)) => Value::Double(*c as u32 as f64),
            _ => self,
        }
    }

    /// Explicit cast conversion.
    pub fn cast(self, t: &Type) -> Value {
        let as_f64 = |v: &Value| match v {
            Value::Int(x) => Some(*x as f64),
            Value::Long(x) => Some(*x as f64),
            Value::Float(x) => Some(*x as f64),
            Value::Double(x) => Some(*x),
            Value::Char(c) => Some(*c as u32 as f64),
            _ => None,
        };
        let as_i64 = |v: &Value| match v {
            Value::Int(x) => Some(*x as i64),
            Value::Long(x) => Some(*x),
            Value::Char(c) => Some(*c as i64),
            // Rust float-to-int casts saturate and map NaN to zero, as Java does.
            Value::Float(x) => Some(*x as i64),
            Value::Double(x) => Some(*x as i64),
            _ => None,
        };
        match t {
            Type::Int => match &self {
                Value::Float(x) => Value::Int(*x as i32),
                Value::Double(x) => Value::Int(*x as i32),
                v => as_i64(v).map_or(self.clone(), |x| Value::Int(x as i32)),
            },
            Type::Long => as_i64(&self).map_or(self.clone(), Value::Long),
            Type::Float => as_f64(&self).map_or(self.clone(), |x| Value::Float(x as f32)),
            Type::Double => as_f64(&self).map_or(self.clone(), Value::Double),
            Type::Char => match &self {
                Value::Float(x) => char_from_u16(*x as i32 as u16),
                Value::Double(x) => char_from_u16(*x as i32 as u16),
                v => as_i64(v).map_or(self.clone(), |x| char_from_u16(x as u16)),
            },
            _ => self,
        }
    }

    pub fn is_null(&self) -> bool {
        matches!(self, Value::Null)
    }

    /// Java-style `toString` rendering.
    pub fn render(&self) -> String {
        self.to_string()
    }
}

pub(crate) fn lock(a: &ArrayRef) -> std::sync::MutexGuard<'_, ArrayData> {
    a.lock().unwrap_or_else(|e| e.into_inner())
}

fn char_from_u16(u: u16) -> Value {
    Value::Char(char::from_u32(u as u32).unwrap_or('\u{FFFD}'))
}

/// Formats a double the way `Double.toString` does for common magnitudes.
pub fn java_double(v: f64) -> String {
    if v.is_nan() {
        return "NaN".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "Infinity".into() } else { "-Infinity".into() };
    }
    let a = v.abs();
    if a == 0.0 || (1e-3..1e7).contains(&a) {
        let s = format!("{v}");
        if s.contains('.') {
            s
        } else {
            format!("{s}.0")
        }
    } else {
        let s = format!("{v:e}");
        let (mant, exp) = s.split_once('e').expect("exponent form");
        let mant = if mant.contains('.') { mant.to_string() } else { format!("{mant}.0") };
        format!("{mant}E{exp}")
    }
}

fn java_float(v: f32) -> String {
    if v.is_finite() && v.abs() >= 1e-3 && v.abs() < 1e7 || v == 0.0 {
        let s = format!("{v}");
        if s.contains('.') {
            s
        } else {
            format!("{s}.0")
        }
    } else {
        java_double(v as f64)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Long(v) => write!(f, "{v}"),
            Value::Float(v) => f.write_str(&java_float(*v)),
            Value::Double(v) => f.write_str(&java_double(*v)),
            Value::Bool(v) => write!(f, "{v}"),
            Value::Char(c) => write!(f, "{c}"),
            Value::Str(s) => f.write_str(s),
            Value::Array(a) => {
                let data = lock(a);
                f.write_str("[")?;
                for (i, item) in data.items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{item}")?;
                }
                f.write_str("]")
            }
            Value::Optional(None) => f.write_str("Optional.empty"),
            Value::Optional(Some(v)) => write!(f, "Optional[{v}]"),
            Value::Builder(b) => f.write_str(&b.lock().unwrap_or_else(|e| e.into_inner())),
            Value::PrintStream => f.write_str("PrintStream"),
            Value::Object(c) => write!(f, "{c}@object"),
            Value::Null => f.write_str("null"),
            Value::Void => f.write_str("void"),
        }
    }
}

enum Num {
    I(i64),
    F(f64),
}

fn num(v: &Value) -> Option<Num> {
    Some(match v {
        Value::Int(x) => Num::I(*x as i64),
        Value::Long(x) => Num::I(*x),
        Value::Char(c) => Num::I(*c as i64),
        Value::Float(x) => Num::F(*x as f64),
        Value::Double(x) => Num::F(*x),
        _ => return None,
    })
}

/// Structural equality used by assertions. Numbers compare by value across
/// widths; floating-point values within [`FLOAT_TOLERANCE`].
pub fn structural_eq(a: &Value, b: &Value) -> bool {
    if let (Some(x), Some(y)) = (num(a), num(b)) {
        return match (x, y) {
            (Num::I(x), Num::I(y)) => x == y,
            (Num::I(x), Num::F(y)) | (Num::F(y), Num::I(x)) => ((x as f64) - y).abs() <= FLOAT_TOLERANCE,
            (Num::F(x), Num::F(y)) => x == y || (x - y).abs() <= FLOAT_TOLERANCE || (x.is_nan() && y.is_nan()),
        };
    }
    match (a, b) {
        (Value::Bool(x), Value::Bool(y)) => x == y,
        (Value::Str(x), Value::Str(y)) => x == y,
        (Value::Null, Value::Null) | (Value::Void, Value::Void) | (Value::PrintStream, Value::PrintStream) => true,
        (Value::Array(x), Value::Array(y)) => {
            if Arc::ptr_eq(x, y) {
                return true;
            }
            let (x, y) = (lock(x), lock(y));
            x.items.len() == y.items.len() && x.items.iter().zip(&y.items).all(|(p, q)| structural_eq(p, q))
        }
        (Value::Optional(x), Value::Optional(y)) => match (x, y) {
            (None, None) => true,
            (Some(p), Some(q)) => structural_eq(p, q),
            _ => false,
        },
        (Value::Builder(x), Value::Builder(y)) => Arc::ptr_eq(x, y),
        (Value::Object(x), Value::Object(y)) => x == y,
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_rendering_matches_java() {
        assert_eq!(java_double(1.0), "1.0");
        assert_eq!(java_double(0.5), "0.5");
        assert_eq!(java_double(1e10), "1.0E10");
        assert_eq!(java_double(-0.0), "-0.0");
    }

    #[test]
    fn equality_is_structural_with_tolerance() {
        assert!(structural_eq(&Value::Int(3), &Value::Long(3)));
        assert!(structural_eq(&Value::Double(0.1 + 0.2), &Value::Double(0.3)));
        assert!(!structural_eq(&Value::Double(0.3), &Value::Double(0.3001)));
        let a = Value::array(Type::String, vec![Value::str("a"), Value::str("b")]);
        let b = Value::array(Type::String, vec![Value::str("a"), Value::str("b")]);
        assert!(structural_eq(&a, &b));
        assert!(!structural_eq(&Value::str("0"), &Value::Int(0)));
    }

    #[test]
    fn casts_follow_java_narrowing() {
        assert!(matches!(Value::Double(3.9).cast(&Type::Int), Value::Int(3)));
        assert!(matches!(Value::Double(f64::NAN).cast(&Type::Int), Value::Int(0)));
        assert!(matches!(Value::Int(98).cast(&Type::Char), Value::Char('b')));
        assert!(matches!(Value::Int(5).coerce(&Type::Double), Value::Double(x) if x == 5.0));
    }
}
