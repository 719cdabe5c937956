//! Typed async client for the snipfit service.

use reqwest::{Method, RequestBuilder, StatusCode};
use serde::de::DeserializeOwned;
use snipfit_core::api::{
    CreateSession, CycleRequest, ErrorBody, Health, SessionResponse, SuggestTypesResponse, TaskSuggestions,
    TestRequest, TestResponse,
};

#[derive(Debug, thiserror::Error)]
pub enum ClientError {
    #[error("request failed: {0}")]
    Transport(#[from] reqwest::Error),
    #[error("{status}: {}", .body.error)]
    Api { status: StatusCode, body: ErrorBody },
}

impl ClientError {
    pub fn status(&self) -> Option<StatusCode> {
        match self {
            ClientError::Api { status, .. } => Some(*status),
            ClientError::Transport(e) => e.status(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Client {
    base: String,
    http: reqwest::Client,
}

impl Client {
    pub fn new(base: impl Into<String>) -> Self {
        Self {
            base: base.into().trim_end_matches('/').to_string(),
            http: reqwest::Client::new(),
        }
    }

    pub fn base(&self) -> &str {
        &self.base
    }

    fn req(&self, method: Method, path: &str) -> RequestBuilder {
        self.http.request(method, format!("{}{}", self.base, path))
    }

    async fn send<T: DeserializeOwned>(rb: RequestBuilder) -> Result<T, ClientError> {
        let resp = rb.send().await?;
        let status = resp.status();
        if status.is_success() {
            return Ok(resp.json().await?);
        }
        let text = resp.text().await?;
        let body = serde_json::from_str(&text).unwrap_or(ErrorBody {
            error: text,
            fields: Vec::new(),
        });
        Err(ClientError::Api { status, body })
    }

    pub async fn health(&self) -> Result<Health, ClientError> {
        Self::send(self.req(Method::GET, "/health")).await
    }

    pub async fn suggest_tasks(&self, prefix: &str, limit: Option<usize>) -> Result<TaskSuggestions, ClientError> {
        let mut rb = self.req(Method::GET, "/tasks/suggest").query(&[("prefix", prefix)]);
        if let Some(l) = limit {
            rb = rb.query(&[("limit", l)]);
        }
        Self::send(rb).await
    }

    pub async fn create_session(&self, req: &CreateSession) -> Result<SessionResponse, ClientError> {
        Self::send(self.req(Method::POST, "/sessions").json(req)).await
    }

    /// Candidates that arrived at or after `since`; `wait` blocks until
    /// processing ends.
    pub async fn session(&self, id: &str, since: usize, wait: bool) -> Result<SessionResponse, ClientError> {
        let rb = self
            .req(Method::GET, &format!("/sessions/{id}"))
            .query(&[("since", since.to_string()), ("wait", wait.to_string())]);
        Self::send(rb).await
    }

    pub async fn cycle(&self, id: &str, req: &CycleRequest) -> Result<SessionResponse, ClientError> {
        Self::send(self.req(Method::POST, &format!("/sessions/{id}/cycle")).json(req)).await
    }

    pub async fn suggest_types(&self, id: &str) -> Result<SuggestTypesResponse, ClientError> {
        Self::send(self.req(Method::GET, &format!("/sessions/{id}/suggest-types"))).await
    }

    pub async fn run_tests(&self, id: &str, req: &TestRequest) -> Result<TestResponse, ClientError> {
        Self::send(self.req(Method::POST, &format!("/sessions/{id}/tests")).json(req)).await
    }
}
