use std::time::Duration;

use snipfit_core::testkit::{
    check_test, generate_test_skeleton, run_candidate_test, suggest_types, synthesize_function, test_from_statements,
    SignatureError, SignatureSource, TypeSignature,
};
use snipfit_minij::{Budget, RunStatus, Type, TypeRegistry};

fn sig(args: &[&str], ret: &str) -> TypeSignature {
    TypeSignature::parse(args, ret).unwrap()
}

fn squash(s: &str) -> String {
    s.chars().filter(|c| !c.is_whitespace()).collect()
}

#[test]
fn suggestions_for_the_three_signature_fixtures() {
    let cases = [
        ("String str = \"a b\";\nString[] parts = str.split(\"\\\\s+\");", "(String)->String[]"),
        ("String myString = \"1234\";\nint foo = Integer.parseInt(myString);", "(String)->int"),
        ("char c = 'A';\nchar lower = Character.toLowerCase(c);", "(char)->char"),
    ];
    for (body, want) in cases {
        let s = suggest_types(body).unwrap();
        assert_eq!(s.display(), want);
        assert_eq!(s.source, SignatureSource::Suggested);
    }
}

#[test]
fn last_assignment_picks_the_return() {
    let body = "String myString = \"empty\";\nint foo = 0;\nfoo = Integer.parseInt(myString);";
    assert_eq!(suggest_types(body).unwrap().display(), "(String)->int");
    let body = "int a = 1;\nint b = 2;\nint max = Math.max(a, b);";
    assert_eq!(suggest_types(body).unwrap().display(), "(int, int)->int");
}

#[test]
fn no_arguments_means_no_suggestion() {
    assert_eq!(suggest_types("int x = 5;"), None);
    assert_eq!(suggest_types("System.out.println(1);"), None);
}

#[test]
fn boxed_declarations_suggest_primitives() {
    let s = suggest_types("String s = \"1\";\nInteger n = Integer.valueOf(s);").unwrap();
    assert_eq!(s.display(), "(String)->int");
}

#[test]
fn skeleton_for_string_to_int() {
    let t = generate_test_skeleton(&sig(&["String"], "int")).unwrap();
    assert!(squash(&t.source).contains(&squash("@Test public void JUnitTest() { assertEquals(snippet(\"empty\"), 0); }")));
    assert!(t.editable);
    assert_eq!(check_test(&t, &sig(&["String"], "int"), &TypeRegistry::builtin()).unwrap(), 0);
}

#[test]
fn skeleton_defaults_per_type() {
    let t = generate_test_skeleton(&sig(&["char", "long", "float", "boolean"], "double")).unwrap();
    assert!(squash(&t.source).contains("assertEquals(snippet('a',0L,0.0f,false),0.0);"));
    let t = generate_test_skeleton(&sig(&["int[]"], "String[]")).unwrap();
    assert!(squash(&t.source).contains("assertEquals(snippet(newint[0]),newString[0]);"));
    let reg = TypeRegistry::builtin();
    assert_eq!(check_test(&t, &sig(&["int[]"], "String[]"), &reg).unwrap(), 0);
}

#[test]
fn bad_signatures() {
    assert!(matches!(TypeSignature::parse(&["Foo"], "int"), Err(SignatureError::UnknownType(_))));
    assert_eq!(TypeSignature::parse::<&str>(&[], "int"), Err(SignatureError::NoArguments));
    let class_ret = TypeSignature {
        arg_types: vec![Type::String],
        ret_type: Type::Class("Scanner".into()),
        source: SignatureSource::User,
    };
    assert!(matches!(generate_test_skeleton(&class_ret), Err(SignatureError::NoDefault(_))));
}

#[test]
fn test_that_calls_other_things_fails_the_stub_check() {
    let t = test_from_statements("assertEquals(helper(\"x\"), 0);");
    assert!(check_test(&t, &sig(&["String"], "int"), &TypeRegistry::builtin()).unwrap() > 0);
}

#[test]
fn function_binds_first_argument_and_last_return() {
    let reg = TypeRegistry::builtin();
    let body = "String myString = \"empty\";\nint foo = 0;\nfoo = Integer.parseInt(myString);";
    let f = synthesize_function(&[], body, &sig(&["String"], "int"), &reg).unwrap();
    assert_eq!(f.arg_names, ["myString"]);
    assert_eq!(f.return_name, "foo");
    assert!(f.source.contains("public static int snippet(String myString)"));
    assert!(f.source.contains("int foo = 0;"));
    assert!(!f.source.contains("String myString ="));
    assert!(f.source.contains("return foo;"));
}

#[test]
fn function_needs_enough_variables() {
    let reg = TypeRegistry::builtin();
    let body = "String s = \"1\";\nint n = Integer.parseInt(s);";
    assert!(synthesize_function(&[], body, &sig(&["String", "String"], "int"), &reg).is_none());
    assert!(synthesize_function(&[], body, &sig(&["char"], "int"), &reg).is_none());
}

#[test]
fn imports_travel_with_the_function() {
    let reg = TypeRegistry::builtin();
    let imports = vec!["import com.google.common.primitives.Ints;".to_string()];
    let body = "String s = \"1\";\nint n = Ints.tryParse(s).orElse(0);";
    let f = synthesize_function(&imports, body, &sig(&["String"], "int"), &reg).unwrap();
    assert!(f.source.starts_with("import com.google.common.primitives.Ints;\n"));
    let t = test_from_statements("assertEquals(snippet(\"42\"), 42);");
    let out = run_candidate_test(&f, &t, &reg, &Budget::default());
    assert_eq!(out.status, RunStatus::Passed, "{}", out.detail);
}

#[test]
fn pass_fail_and_runtime_error() {
    let reg = TypeRegistry::builtin();
    let s = sig(&["String"], "int");
    let right = synthesize_function(&[], "String s = \"1\";\nint n = Integer.parseInt(s);", &s, &reg).unwrap();
    let wrong = synthesize_function(&[], "String s = \"1\";\nint n = 7;", &s, &reg).unwrap();
    let t = test_from_statements("assertEquals(snippet(\"42\"), 42);");
    let b = Budget::default();
    assert_eq!(run_candidate_test(&right, &t, &reg, &b).status, RunStatus::Passed);
    let failed = run_candidate_test(&wrong, &t, &reg, &b);
    assert_eq!(failed.status, RunStatus::Failed);
    assert!(failed.detail.contains("expected:<7> but was:<42>"), "{}", failed.detail);
    let t = test_from_statements("assertEquals(snippet(\"x\"), 0);");
    assert_eq!(run_candidate_test(&right, &t, &reg, &b).status, RunStatus::RuntimeError);
}

#[test]
fn infinite_loop_times_out_within_grace() {
    let reg = TypeRegistry::builtin();
    let s = sig(&["int"], "int");
    let looping = synthesize_function(&[], "int y = 1;\nint x = 1;\nwhile (y >= 0) {\n    x = 0;\n}", &s, &reg).unwrap();
    let ok = synthesize_function(&[], "int a = 1;\nint b = a + 1;", &s, &reg).unwrap();
    let t = test_from_statements("assertEquals(snippet(1), 2);");
    let budget = Budget::with_wall_ms(300);
    for _ in 0..10 {
        let out = run_candidate_test(&looping, &t, &reg, &budget);
        assert_eq!(out.status, RunStatus::Timeout);
        assert!(Duration::from_millis(out.elapsed_ms) <= budget.wall + Duration::from_millis(100));
        assert_eq!(run_candidate_test(&ok, &t, &reg, &budget).status, RunStatus::Passed);
    }
}
