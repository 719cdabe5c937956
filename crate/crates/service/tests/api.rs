use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use snipfit_core::corpus::{build_index, read_corpus, IndexConfig};
use snipfit_core::pipeline::{Context, Engine, PipelineConfig};
use snipfit_minij::Budget;
use snipfit_service::{router, AppState, Settings};
use tower::ServiceExt;

fn engine(wall_ms: u64) -> Engine {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/corpus.jsonl");
    let docs = read_corpus(BufReader::new(File::open(path).unwrap())).unwrap();
    let cfg = PipelineConfig {
        budget: Budget::with_wall_ms(wall_ms),
        ..PipelineConfig::default()
    };
    Engine::new(build_index(docs, IndexConfig::default()).unwrap(), cfg)
}

fn app_with(settings: Settings, wall_ms: u64) -> (Arc<AppState>, Router) {
    let state = AppState::new(engine(wall_ms), settings);
    (state.clone(), router(state))
}

fn app() -> Router {
    app_with(Settings::default(), 2000).1
}

async fn call(app: &Router, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder().method(method).uri(uri);
    let req = match body {
        Some(b) => req.header("content-type", "application/json").body(Body::from(b.to_string())),
        None => req.body(Body::empty()),
    }
    .unwrap();
    raw(app, req).await
}

async fn raw(app: &Router, req: Request<Body>) -> (StatusCode, Value) {
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
}

async fn create(app: &Router, task: &str) -> Value {
    let (st, v) = call(app, Method::POST, "/sessions", Some(json!({"task": task, "wait": true}))).await;
    assert_eq!(st, StatusCode::CREATED, "{v}");
    v
}

#[tokio::test]
async fn string_to_int_session_has_candidates() {
    let app = app();
    let v = create(&app, "convert string to int").await;
    let cands = v["session"]["candidates"].as_array().unwrap();
    assert!(!cands.is_empty());
    assert_eq!(v["session"]["status"], "complete");
    assert_eq!(cands[0]["error_count"], 0);
    assert_eq!(v["arrivals"].as_u64().unwrap() as usize, cands.len());
    assert_eq!(v["new_candidates"].as_array().unwrap().len(), cands.len());
}

#[tokio::test]
async fn session_json_matches_the_engine() {
    let app = app();
    let v = create(&app, "convert string to integer").await;
    let direct = engine(2000).process_task("convert string to integer", Context::harness()).unwrap().view();
    assert_eq!(v["session"], serde_json::to_value(direct).unwrap());
}

#[tokio::test]
async fn restart_reproduces_new_sessions() {
    let a = create(&app(), "split string by whitespaces").await;
    let b = create(&app(), "split string by whitespaces").await;
    assert_eq!(a, b);
}

#[tokio::test]
async fn polling_since_returns_only_new_arrivals() {
    let app = app();
    let v = create(&app, "convert int to string").await;
    let id = v["id"].as_str().unwrap();
    let n = v["arrivals"].as_u64().unwrap();
    let (st, p) = call(&app, Method::GET, &format!("/sessions/{id}?since=2"), None).await;
    assert_eq!(st, StatusCode::OK);
    assert_eq!(p["new_candidates"].as_array().unwrap().len() as u64, n - 2);
    let (_, p) = call(&app, Method::GET, &format!("/sessions/{id}?since={n}"), None).await;
    assert!(p["new_candidates"].as_array().unwrap().is_empty());
}

#[tokio::test]
async fn unwaited_session_completes_by_polling() {
    let app = app();
    let (st, v) = call(&app, Method::POST, "/sessions", Some(json!({"task": "convert string to integer"}))).await;
    assert_eq!(st, StatusCode::CREATED);
    let id = v["id"].as_str().unwrap().to_string();
    let mut seen = Vec::new();
    let deadline = Instant::now() + Duration::from_secs(30);
    loop {
        let (_, p) = call(&app, Method::GET, &format!("/sessions/{id}?since={}", seen.len()), None).await;
        for c in p["new_candidates"].as_array().unwrap() {
            seen.push(c["id"].as_u64().unwrap());
        }
        if p["session"]["status"] == "complete" {
            assert_eq!(seen.len() as u64, p["session"]["expected"].as_u64().unwrap());
            break;
        }
        assert!(Instant::now() < deadline);
        tokio::time::sleep(Duration::from_millis(5)).await;
    }
    seen.sort();
    seen.dedup();
    assert_eq!(seen.len() as u64, v["session"]["expected"].as_u64().unwrap());
}

#[tokio::test]
async fn cycle_wraps_to_first() {
    let app = app();
    let v = create(&app, "convert string to integer").await;
    let id = v["id"].as_str().unwrap();
    let n = v["session"]["candidates"].as_array().unwrap().len();
    let uri = format!("/sessions/{id}/cycle");
    let (st, p) = call(&app, Method::POST, &uri, Some(json!({"steps": n - 1}))).await;
    assert_eq!(st, StatusCode::OK);
    assert_eq!(p["session"]["cursor_index"].as_u64().unwrap() as usize, n - 1);
    let req = Request::builder().method(Method::POST).uri(&uri).body(Body::empty()).unwrap();
    let (st, p) = raw(&app, req).await;
    assert_eq!(st, StatusCode::OK);
    assert_eq!(p["session"]["cursor_index"], 0);
    let (_, p) = call(&app, Method::POST, &uri, Some(json!({"direction": "prev"}))).await;
    assert_eq!(p["session"]["cursor_index"].as_u64().unwrap() as usize, n - 1);
}

#[tokio::test]
async fn cycling_an_empty_session_conflicts() {
    let app = app();
    let v = create(&app, "frobnicate the quux").await;
    assert_eq!(v["session"]["status"], "no_results");
    let id = v["id"].as_str().unwrap();
    let (st, e) = call(&app, Method::POST, &format!("/sessions/{id}/cycle"), Some(json!({}))).await;
    assert_eq!(st, StatusCode::CONFLICT);
    assert!(e["error"].is_string());
}

#[tokio::test]
async fn unknown_sessions_are_404() {
    let app = app();
    for (m, uri) in [
        (Method::GET, "/sessions/s999"),
        (Method::POST, "/sessions/s999/cycle"),
        (Method::GET, "/sessions/s999/suggest-types"),
    ] {
        let (st, e) = call(&app, m, uri, None).await;
        assert_eq!(st, StatusCode::NOT_FOUND, "{uri}");
        assert!(e["error"].as_str().unwrap().contains("s999"));
    }
    let (st, _) = call(&app, Method::POST, "/sessions/s999/tests", Some(json!({"signature": {"args": ["int"], "ret": "int"}}))).await;
    assert_eq!(st, StatusCode::NOT_FOUND);
    let (st, _) = call(&app, Method::GET, "/nowhere", None).await;
    assert_eq!(st, StatusCode::NOT_FOUND);
}

async fn field_of(app: &Router, uri: &str, body: &str) -> String {
    let req = Request::builder()
        .method(Method::POST)
        .uri(uri)
        .header("content-type", "application/json")
        .body(Body::from(body.to_string()))
        .unwrap();
    let (st, e) = raw(app, req).await;
    assert_eq!(st, StatusCode::BAD_REQUEST, "{body}: {e}");
    e["fields"][0]["field"].as_str().unwrap().to_string()
}

#[tokio::test]
async fn malformed_bodies_name_the_field() {
    let app = app();
    assert_eq!(field_of(&app, "/sessions", "{}").await, "task");
    assert_eq!(field_of(&app, "/sessions", r#"{"task": 3}"#).await, "task");
    assert_eq!(field_of(&app, "/sessions", r#"{"task": "x", "colour": 1}"#).await, "colour");
    assert_eq!(field_of(&app, "/sessions", r#"{"task": "x", "cursor": {"line": "a", "col": 1}}"#).await, "cursor.line");
    assert_eq!(field_of(&app, "/sessions", r#"{"task": "x", "file": "class A {}"}"#).await, "cursor");
    assert_eq!(field_of(&app, "/sessions", r#"{"task": "   "}"#).await, "task");
    assert_eq!(field_of(&app, "/sessions", r#"{"task": "how to do it"}"#).await, "task");
    assert_eq!(field_of(&app, "/sessions", "not json").await, "body");
    let v = create(&app, "convert string to integer").await;
    let id = v["id"].as_str().unwrap();
    let tests = format!("/sessions/{id}/tests");
    assert_eq!(field_of(&app, &tests, r#"{"signature": {"args": ["Foo"], "ret": "int"}}"#).await, "signature");
    assert_eq!(field_of(&app, &tests, r#"{"signature": {"args": ["String"]}}"#).await, "signature.ret");
    let bad = json!({"signature": {"args": ["String"], "ret": "int"}, "test_source": "assertEquals(snippet(1, 2), 0);"});
    assert_eq!(field_of(&app, &tests, &bad.to_string()).await, "test_source");
    assert_eq!(field_of(&app, &format!("/sessions/{id}/cycle"), r#"{"direction": "up"}"#).await, "direction");
}

#[tokio::test]
async fn suggest_types_gives_skeletons() {
    let app = app();
    let v = create(&app, "split string by whitespaces").await;
    let id = v["id"].as_str().unwrap();
    let (st, s) = call(&app, Method::GET, &format!("/sessions/{id}/suggest-types"), None).await;
    assert_eq!(st, StatusCode::OK);
    let top = &s["suggestions"][0];
    assert_eq!(top["display"], "(String)->String[]");
    assert!(top["skeleton"]["source"].as_str().unwrap().contains("snippet(\"empty\")"));
}

#[tokio::test]
async fn tests_rerank_the_session() {
    let app = app();
    let v = create(&app, "convert int to string").await;
    let id = v["id"].as_str().unwrap();
    let body = json!({"signature": {"args": ["int"], "ret": "String"}, "test_source": "assertEquals(snippet(7), \"7\");"});
    let (st, r) = call(&app, Method::POST, &format!("/sessions/{id}/tests"), Some(body)).await;
    assert_eq!(st, StatusCode::OK, "{r}");
    let cands = r["session"]["candidates"].as_array().unwrap();
    let passed: Vec<bool> = cands.iter().map(|c| c["passed_tests"].as_u64().unwrap() > 0).collect();
    assert!(passed[0]);
    let first_fail = passed.iter().position(|p| !p).unwrap();
    assert!(passed[first_fail..].iter().all(|p| !p));
    let (_, g) = call(&app, Method::GET, &format!("/sessions/{id}"), None).await;
    assert_eq!(g["session"], r["session"]);
    assert_eq!(g["session"]["tested"], true);
}

#[tokio::test]
async fn skeleton_is_used_without_a_test_source() {
    let app = app();
    let v = create(&app, "convert string to integer").await;
    let id = v["id"].as_str().unwrap();
    let body = json!({"signature": {"args": ["String"], "ret": "int"}, "limit": 2});
    let (st, r) = call(&app, Method::POST, &format!("/sessions/{id}/tests"), Some(body)).await;
    assert_eq!(st, StatusCode::OK, "{r}");
    assert!(r["test"]["source"].as_str().unwrap().contains("assertEquals(snippet(\"empty\"), 0)"));
    assert_eq!(r["outcomes"].as_array().unwrap().len(), 2);
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn infinite_loop_times_out_and_service_stays_up() {
    let wall = 300;
    let (_, app) = app_with(Settings::default(), wall);
    let v = create(&app, "find maximum of two numbers").await;
    let id = v["id"].as_str().unwrap().to_string();
    for _ in 0..3 {
        let body = json!({"signature": {"args": ["int", "int"], "ret": "int"}, "test_source": "assertEquals(snippet(3, 9), 9);"});
        let a = app.clone();
        let uri = format!("/sessions/{id}/tests");
        let run = tokio::spawn(async move { call(&a, Method::POST, &uri, Some(body)).await });
        tokio::time::sleep(Duration::from_millis(50)).await;
        let t = Instant::now();
        let (st, h) = call(&app, Method::GET, "/health", None).await;
        assert_eq!(st, StatusCode::OK);
        assert_eq!(h["status"], "ok");
        assert!(t.elapsed() < Duration::from_millis(200), "{:?}", t.elapsed());
        let (st, r) = run.await.unwrap();
        assert_eq!(st, StatusCode::OK);
        let timeouts: Vec<&Value> = r["outcomes"].as_array().unwrap().iter().filter(|o| o["status"] == "timeout").collect();
        assert_eq!(timeouts.len(), 1);
        assert!(timeouts[0]["elapsed_ms"].as_u64().unwrap() <= wall + 100);
        let last = r["session"]["candidates"].as_array().unwrap().last().unwrap();
        assert_eq!(last["id"], timeouts[0]["candidate"]);
    }
}

#[tokio::test]
async fn task_suggestions_and_health() {
    let app = app();
    let (st, s) = call(&app, Method::GET, "/tasks/suggest?prefix=convert%20string&limit=3", None).await;
    assert_eq!(st, StatusCode::OK);
    let list = s["suggestions"].as_array().unwrap();
    assert!(!list.is_empty() && list.len() <= 3);
    assert!(list.iter().all(|t| t.as_str().unwrap().to_lowercase().contains("convert")));
    let (_, s) = call(&app, Method::GET, "/tasks/suggest?prefix=the%20a%20of", None).await;
    assert!(s["suggestions"].as_array().unwrap().is_empty());
    let (st, _) = call(&app, Method::GET, "/tasks/suggest?limit=x", None).await;
    assert_eq!(st, StatusCode::BAD_REQUEST);
    let (_, h) = call(&app, Method::GET, "/health", None).await;
    assert_eq!(h["index"]["mode"], "lemma");
    assert_eq!(h["stats"]["docs"], 49);
}

#[tokio::test]
async fn idle_sessions_expire() {
    let settings = Settings {
        ttl: Duration::from_millis(50),
        ..Settings::default()
    };
    let (state, app) = app_with(settings, 2000);
    let v = create(&app, "convert string to integer").await;
    let id = v["id"].as_str().unwrap();
    assert_eq!(state.evict_idle(Instant::now()), 0);
    assert_eq!(state.evict_idle(Instant::now() + Duration::from_millis(100)), 1);
    let (st, _) = call(&app, Method::GET, &format!("/sessions/{id}"), None).await;
    assert_eq!(st, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn bound_server_is_loopback_and_sweeps() {
    let settings = Settings {
        ttl: Duration::from_millis(200),
        ..Settings::default()
    };
    let state = AppState::new(engine(2000), settings);
    let (addr, server) = snipfit_service::bind(state.clone(), snipfit_service::loopback(0)).await.unwrap();
    assert!(addr.ip().is_loopback());
    let h = tokio::spawn(server);
    create(&router(state.clone()), "convert string to integer").await;
    assert_eq!(state.session_count(), 1);
    tokio::time::sleep(Duration::from_millis(600)).await;
    assert_eq!(state.session_count(), 0);
    h.abort();
}
