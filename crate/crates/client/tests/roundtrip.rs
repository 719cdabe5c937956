use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use snipfit_client::{Client, ClientError};
use snipfit_core::api::{CreateSession, CycleRequest, TestRequest};
use snipfit_core::bench::SignatureSpec;
use snipfit_core::corpus::{build_index, read_corpus, IndexConfig};
use snipfit_core::pipeline::{Cursor, Direction, Engine, PipelineConfig, SessionStatus, TestStatus};
use snipfit_service::{bind, loopback, AppState, Settings};

async fn serve() -> Client {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/corpus.jsonl");
    let docs = read_corpus(BufReader::new(File::open(path).unwrap())).unwrap();
    let engine = Engine::new(build_index(docs, IndexConfig::default()).unwrap(), PipelineConfig::default());
    let (addr, server) = bind(AppState::new(engine, Settings::default()), loopback(0)).await.unwrap();
    tokio::spawn(server);
    Client::new(format!("http://{addr}/"))
}

fn task(t: &str) -> CreateSession {
    CreateSession {
        task: t.into(),
        file: None,
        cursor: None,
        wait: true,
    }
}

#[tokio::test]
async fn full_loop() {
    let c = serve().await;
    assert_eq!(c.health().await.unwrap().status, "ok");
    let s = c.create_session(&task("convert int to string?")).await.unwrap();
    assert_eq!(s.session.status, SessionStatus::Complete);
    assert_eq!(s.session.task, "convert int to string");
    let n = s.session.candidates.len();
    let polled = c.session(&s.id, n, false).await.unwrap();
    assert!(polled.new_candidates.is_empty());
    let back = c
        .cycle(
            &s.id,
            &CycleRequest {
                direction: Direction::Prev,
                steps: 1,
            },
        )
        .await
        .unwrap();
    assert_eq!(back.session.cursor_index, n - 1);
    let types = c.suggest_types(&s.id).await.unwrap();
    assert!(types.suggestions.iter().any(|t| t.display == "(int)->String"));
    let req = TestRequest {
        signature: SignatureSpec {
            args: vec!["int".into()],
            ret: "String".into(),
        },
        test_source: Some("assertEquals(snippet(7), \"7\");".into()),
        limit: None,
    };
    let r = c.run_tests(&s.id, &req).await.unwrap();
    assert!(r.outcomes.iter().any(|o| o.status == TestStatus::Passed));
    assert!(r.session.candidates[r.session.cursor_index].passed_tests > 0);
    let sugg = c.suggest_tasks("int string", Some(5)).await.unwrap();
    assert!(sugg.suggestions.iter().any(|t| t == "Convert int to String"));
}

#[tokio::test]
async fn errors_carry_status_and_fields() {
    let c = serve().await;
    let e = c.session("s404", 0, false).await.unwrap_err();
    assert_eq!(e.status().map(|s| s.as_u16()), Some(404));
    let bad = CreateSession {
        cursor: Some(Cursor { line: 99, col: 1 }),
        ..task("convert string to integer")
    };
    match c.create_session(&bad).await.unwrap_err() {
        ClientError::Api { status, body } => {
            assert_eq!(status.as_u16(), 400);
            assert_eq!(body.fields[0].field, "cursor");
        }
        other => panic!("{other:?}"),
    }
}

#[tokio::test]
async fn unreachable_server_is_a_transport_error() {
    let c = Client::new("http://127.0.0.1:1");
    assert!(matches!(c.health().await, Err(ClientError::Transport(_))));
}
