//! Alone in its binary so no other test writes while the counter is read.

use std::fs::{self, File};
use std::io::BufReader;
use std::path::PathBuf;

use snipfit_core::corpus::{build_index, read_corpus, IndexConfig};
use snipfit_core::pipeline::{Context, Engine, PipelineConfig};
use snipfit_core::testkit::{test_from_statements, TypeSignature};
use snipfit_minij::Budget;

fn write_syscalls() -> u64 {
    let io = fs::read_to_string("/proc/self/io").unwrap();
    io.lines()
        .find_map(|l| l.strip_prefix("syscw:"))
        .map(|v| v.trim().parse().unwrap())
        .unwrap()
}

#[test]
fn processing_and_testing_do_not_write() {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/corpus.jsonl");
    let docs = read_corpus(BufReader::new(File::open(path).unwrap())).unwrap();
    let engine = Engine::new(build_index(docs, IndexConfig::default()).unwrap(), PipelineConfig::default());
    let sig = TypeSignature::parse(&["int", "int"], "int").unwrap();
    let test = test_from_statements("assertEquals(snippet(3, 9), 9);");
    let before = write_syscalls();
    let mut s = engine.process_task("find maximum of two numbers", Context::harness()).unwrap();
    s.test_candidates(&test, &sig, None, &engine.registry, &Budget::with_wall_ms(200)).unwrap();
    let after = write_syscalls();
    assert_eq!(after - before, 0);
}
