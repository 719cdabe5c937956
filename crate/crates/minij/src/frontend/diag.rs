use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::source::{LineSpan, SourceUnit};
use super::types::Type;

/// Diagnostic categories. The integer ids are stable and used for histograms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DiagCode {
    #[serde(rename = "E_PARSE")]
    Parse = 1,
    /// Carries an `ExpectedToken` hint.
    #[serde(rename = "E_MISSING_TOKEN")]
    MissingToken = 2,
    /// Carries the offending lexeme in `token`.
    #[serde(rename = "E_UNEXPECTED_TOKEN")]
    UnexpectedToken = 3,
    /// A bare name that is neither a variable nor a visible type. Carries a `Name` hint.
    #[serde(rename = "E_UNRESOLVED")]
    Unresolved = 4,
    /// Carries a `Name` hint with the first assigned type when known.
    #[serde(rename = "E_UNDECLARED_VAR")]
    UndeclaredVar = 5,
    /// Carries a `Name` hint.
    #[serde(rename = "E_UNRESOLVED_TYPE")]
    UnresolvedType = 6,
    #[serde(rename = "E_MISPLACED_IMPORT")]
    MisplacedImport = 7,
    #[serde(rename = "E_DUPLICATE_MEMBER")]
    DuplicateMember = 8,
    #[serde(rename = "E_NESTED_METHOD")]
    NestedMethod = 9,
    #[serde(rename = "E_TYPE_MISMATCH")]
    TypeMismatch = 10,
    #[serde(rename = "E_MISSING_RETURN")]
    MissingReturn = 11,
    #[serde(rename = "E_ARITY")]
    Arity = 12,
}

impl DiagCode {
    pub const ALL: [DiagCode; 12] = [
        DiagCode::Parse,
        DiagCode::MissingToken,
        DiagCode::UnexpectedToken,
        DiagCode::Unresolved,
        DiagCode::UndeclaredVar,
        DiagCode::UnresolvedType,
        DiagCode::MisplacedImport,
        DiagCode::DuplicateMember,
        DiagCode::NestedMethod,
        DiagCode::TypeMismatch,
        DiagCode::MissingReturn,
        DiagCode::Arity,
    ];

    pub fn id(self) -> u16 {
        self as u16
    }

    pub fn from_id(id: u16) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.id() == id)
    }

    pub fn name(self) -> &'static str {
        match self {
            DiagCode::Parse => "E_PARSE",
            DiagCode::MissingToken => "E_MISSING_TOKEN",
            DiagCode::UnexpectedToken => "E_UNEXPECTED_TOKEN",
            DiagCode::Unresolved => "E_UNRESOLVED",
            DiagCode::UndeclaredVar => "E_UNDECLARED_VAR",
            DiagCode::UnresolvedType => "E_UNRESOLVED_TYPE",
            DiagCode::MisplacedImport => "E_MISPLACED_IMPORT",
            DiagCode::DuplicateMember => "E_DUPLICATE_MEMBER",
            DiagCode::NestedMethod => "E_NESTED_METHOD",
            DiagCode::TypeMismatch => "E_TYPE_MISMATCH",
            DiagCode::MissingReturn => "E_MISSING_RETURN",
            DiagCode::Arity => "E_ARITY",
        }
    }
}

impl fmt::Display for DiagCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Structured repair payload attached to some diagnostics.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Hint {
    /// The token the parser expected at this position.
    ExpectedToken { token: String },
    /// An unresolved name. `assigned_type` is the type of the right-hand side of
    /// the first plain assignment to the name, when one exists and typechecks.
    Name {
        name: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        assigned_type: Option<Type>,
    },
}

/// One compiler finding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub code: DiagCode,
    pub code_id: u16,
    pub span: LineSpan,
    /// Byte range into the unit text.
    pub range: Range<usize>,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub token: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hint: Option<Hint>,
}

impl Diagnostic {
    pub fn new(unit: &SourceUnit, code: DiagCode, range: Range<usize>, message: impl Into<String>) -> Self {
        Self {
            code,
            code_id: code.id(),
            span: unit.span(range.start, range.end),
            range,
            message: message.into(),
            token: None,
            hint: None,
        }
    }

    pub fn with_token(mut self, token: impl Into<String>) -> Self {
        self.token = Some(token.into());
        self
    }

    pub fn with_hint(mut self, hint: Hint) -> Self {
        self.hint = Some(hint);
        self
    }

    /// Name carried by a `Name` hint.
    pub fn name(&self) -> Option<&str> {
        match &self.hint {
            Some(Hint::Name { name, .. }) => Some(name),
            _ => None,
        }
    }

    pub fn expected_token(&self) -> Option<&str> {
        match &self.hint {
            Some(Hint::ExpectedToken { token }) => Some(token),
            _ => None,
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}: {}: {}",
            self.span.start_line, self.span.start_col, self.code, self.message
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_are_stable_and_unique() {
        for (i, code) in DiagCode::ALL.iter().enumerate() {
            assert_eq!(code.id() as usize, i + 1);
            assert_eq!(DiagCode::from_id(code.id()), Some(*code));
        }
    }

    #[test]
    fn serializes_code_names() {
        let unit = SourceUnit::snippet("int foo = 0");
        let d = Diagnostic::new(&unit, DiagCode::MissingToken, 10..11, "missing `;`")
            .with_hint(Hint::ExpectedToken { token: ";".into() });
        let json = serde_json::to_value(&d).unwrap();
        assert_eq!(json["code"], "E_MISSING_TOKEN");
        assert_eq!(json["code_id"], 2);
        assert_eq!(json["hint"]["token"], ";");
        let back: Diagnostic = serde_json::from_value(json).unwrap();
        assert_eq!(back, d);
    }
}
