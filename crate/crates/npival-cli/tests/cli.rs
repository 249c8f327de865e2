//! End-to-end checks of the binary: exact machine output, exit codes,
//! determinism, and token round-trips.

use std::process::{Command, Output};

fn npival(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_npival"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn classify_machine_output_is_exact() {
    let out = npival(&[
        "classify",
        "--class",
        "2; 5/2, 7/5, 1",
        "--surface",
        "p2",
        "--output",
        "machine",
    ]);
    assert!(out.status.success());
    let expected = "\
class=2; 5/2, 7/5, 1
context=p2
member=true
strict=true
lhs=15/4
rhs=1/10
margin=73/20
";
    assert_eq!(stdout(&out), expected);
}

#[test]
fn classify_irrational_witness() {
    let out = npival(&[
        "classify",
        "--class",
        "2; 5/2, 57/5, phi",
        "--surface",
        "nonspecial:1",
        "--output",
        "machine",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("member=false"));
    assert!(text.contains("lhs=3/2"));
    assert!(text.contains("rhs=259/100+1/100*phi"));
}

#[test]
fn invalid_class_exits_2() {
    let out = npival(&["classify", "--class", "1; 3, 1", "--surface", "p2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("non-integer"));
}

#[test]
fn undecidable_threshold_exits_3() {
    // the rhs enclosure straddles an integer and the user interval cannot be
    // refined, so the non-special floor is undecidable
    let out = npival(&["thresholds", "--class", "1; 3/2, interval:13/5:17/5"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn rejected_choice_exits_4() {
    let out = npival(&[
        "generate",
        "--class",
        "2; 5/2, 7/5, 1",
        "--surface",
        "p2",
        "--mode",
        "output1",
        "--strategy",
        "single:735/2",
    ]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn inextensible_chain_exits_4() {
    let out = npival(&[
        "generate",
        "--class",
        "2; 4/3, 17/3, 1",
        "--surface",
        "p2",
        "--mode",
        "chain",
        "--strategy",
        "single:3/2",
        "--output",
        "machine",
    ]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stdout(&out).contains("stopped=not extensible"));
}

#[test]
fn generate_example1_machine() {
    let out = npival(&[
        "generate",
        "--class",
        "2; 5/2, 7/5, 1",
        "--surface",
        "p2",
        "--mode",
        "output1",
        "--strategy",
        "single:8/3",
        "--output",
        "machine",
    ]);
    assert!(out.status.success());
    let expected = "\
class=2; 5/2, 7/5, 1
context=p2
B=366
result=3; 5/2, 7/5, 8/3, 1
";
    assert_eq!(stdout(&out), expected);
}

#[test]
fn generate_tail_pipeline() {
    let out = npival(&[
        "generate",
        "--class",
        "3; 5/2, 7/5, 8/3, 1",
        "--surface",
        "p2",
        "--mode",
        "output2-integer",
        "--tail",
        "3200",
        "--output",
        "machine",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("C=3270"));
    assert!(text.contains("max_tail=3271"));
    assert!(text.contains("result=3; 5/2, 7/5, 8/3, 3200"));
}

#[test]
fn machine_output_is_deterministic_and_lossless() {
    let args = [
        "generate",
        "--class",
        "2; 5/2, 7/5, 1",
        "--surface",
        "p2",
        "--mode",
        "output1",
        "--strategy",
        "denom:3",
        "--limit",
        "5",
        "--output",
        "machine",
    ];
    let a = npival(&args);
    let b = npival(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout, "same argv must give byte-identical output");

    // every result token parses back into a valid class
    let text = stdout(&a);
    let mut results = 0;
    for line in text.lines() {
        if let Some(tok) = line.strip_prefix("result=") {
            npival::DiscreteClass::parse(tok).expect("result token round-trips");
            results += 1;
        }
    }
    assert_eq!(results, 5);
}

#[test]
fn graph_formats() {
    let dot = npival(&["graph", "--class", "0; 2", "--format", "dot"]);
    assert!(dot.status.success());
    let text = stdout(&dot);
    assert_eq!(text.matches(" -- ").count(), 1);

    let structured = npival(&["graph", "--class", "2; 5/2, 7/5, 1", "--format", "text"]);
    assert!(structured.status.success());
    let g = npival::DualGraph::parse_structured(&stdout(&structured)).unwrap();
    assert_eq!(g.vertex_count(), 8);

    let ascii = npival(&["graph", "--class", "1; 5/2, 1", "--format", "ascii"]);
    assert_eq!(stdout(&ascii), "1 - 2 - 4\n        |\n        3\n");
}

#[test]
fn class_file_input() {
    let dir = std::env::temp_dir().join("npival-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("classes.txt");
    std::fs::write(&path, "# corpus\n2; 5/2, 7/5, 1\n0; 7\n").unwrap();
    let out = npival(&[
        "classify",
        "--class",
        path.to_str().unwrap(),
        "--surface",
        "p2",
        "--output",
        "machine",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.matches("member=true").count(), 2);
}

#[test]
fn scan_small_grid() {
    let out = npival(&[
        "scan",
        "--max-g",
        "1",
        "--max-numerator",
        "8",
        "--max-denominator",
        "3",
        "--delta-min",
        "0",
        "--delta-max",
        "2",
        "--output",
        "machine",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("violations=0"));
    assert!(text.contains("undecided=0"));
}

#[test]
fn thresholds_examples() {
    let out = npival(&["thresholds", "--class", "0; 7", "--output", "machine"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("special_min_delta=0"));
    assert!(text.contains("nonspecial_max_delta=7"));
}
