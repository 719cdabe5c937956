//! Request and response bodies of the HTTP service.

use serde::{Deserialize, Serialize};

use crate::bench::SignatureSpec;
use crate::corpus::{IndexConfig, IndexStats};
use crate::pipeline::{CandidateView, Direction, SessionView, TestOutcome};
use crate::splice::Cursor;
use crate::testkit::{TestCase, TypeSignature};

pub type SessionId = String;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateSession {
    pub task: String,
    /// The user's file. Omitted: an empty class with a `main` method.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cursor: Option<Cursor>,
    /// Reply only once every candidate is processed.
    #[serde(default)]
    pub wait: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionResponse {
    pub id: SessionId,
    pub session: SessionView,
    /// Candidates that arrived so far; pass as `since` on the next poll.
    pub arrivals: usize,
    /// Candidates with arrival index >= `since`, in arrival order.
    pub new_candidates: Vec<CandidateView>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CycleRequest {
    #[serde(default = "next")]
    pub direction: Direction,
    #[serde(default = "one")]
    pub steps: usize,
}

fn next() -> Direction {
    Direction::Next
}

fn one() -> usize {
    1
}

impl Default for CycleRequest {
    fn default() -> Self {
        Self {
            direction: Direction::Next,
            steps: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Suggestion {
    pub signature: TypeSignature,
    pub display: String,
    /// Candidate ids whose body suggests this signature.
    pub candidates: Vec<usize>,
    /// Default test for the signature, absent when a type has no default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skeleton: Option<TestCase>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuggestTypesResponse {
    pub suggestions: Vec<Suggestion>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestRequest {
    pub signature: SignatureSpec,
    /// A test class, or bare assertion statements. Omitted: the default skeleton.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub test_source: Option<String>,
    /// Test only the first `limit` compiling candidates in rank order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestResponse {
    pub test: TestCase,
    pub outcomes: Vec<TestOutcome>,
    pub session: SessionView,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskSuggestions {
    pub suggestions: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Health {
    pub status: String,
    pub index: IndexConfig,
    pub stats: IndexStats,
    pub sessions: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fields: Vec<FieldError>,
}
