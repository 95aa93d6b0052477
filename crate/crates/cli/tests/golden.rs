//! Golden tests: replay CLI invocations and compare output byte-exactly.

use std::path::PathBuf;
use std::process::{Command, Output};

fn specs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../specs")
}

fn run(args: &[&str]) -> Output {
    let spec = specs().join(args[1]);
    let mut full: Vec<String> = vec![args[0].into(), spec.to_str().unwrap().into()];
    full.extend(args[2..].iter().map(|s| s.to_string()));
    Command::new(env!("CARGO_BIN_EXE_rss-kit"))
        .args(&full)
        .output()
        .expect("binary runs")
}

fn golden(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name);
    std::fs::read_to_string(path).expect("golden file exists")
}

fn check(args: &[&str], file: &str, code: i32) {
    let out = run(args);
    assert_eq!(
        String::from_utf8_lossy(&out.stdout),
        golden(file),
        "stdout mismatch for {args:?}"
    );
    assert_eq!(out.status.code(), Some(code), "exit code for {args:?}");
}

#[test]
fn props_table() {
    check(&["props", "period-doubling.sub"], "props-period-doubling.txt", 0);
    check(&["props", "random-fibonacci.sub"], "props-random-fibonacci.txt", 0);
    check(&["props", "square-fibonacci.sub"], "props-square-fibonacci.txt", 0);
    check(&["props", "abb-bab.sub"], "props-abb-bab.txt", 0);
    check(&["props", "example5.sub"], "props-example5.txt", 0);
    check(&["props", "abaa-aaba.sub"], "props-abaa-aaba.txt", 0);
}

#[test]
fn decompositions_and_induced() {
    check(&["decompose", "period-doubling.sub", "aab"], "decompose-aab.txt", 0);
    check(&["decompose", "period-doubling.sub", "aa"], "decompose-aa.txt", 0);
    check(
        &["induced", "period-doubling.sub", "ababa", "2", "4", "--one-based"],
        "induced-ababa.txt",
        0,
    );
    check(
        &["induced", "period-doubling.sub", "bbaba", "2", "4", "--one-based"],
        "induced-bbaba.txt",
        0,
    );
}

#[test]
fn recognisability_verdicts() {
    check(
        &["recognise", "period-doubling.sub", "bb", "--max-radius", "4"],
        "recognise-bb.txt",
        0,
    );
    check(
        &["recognise", "period-doubling.sub", "aa", "--max-radius", "3"],
        "recognise-aa.txt",
        1,
    );
    check(
        &["recognisable", "square-fibonacci.sub", "--max-radius", "8"],
        "recognisable-square-fibonacci.txt",
        0,
    );
}

#[test]
fn language_legality_gaps_periodic() {
    check(
        &["language", "period-doubling.sub", "--length", "4"],
        "language-pd-4.txt",
        0,
    );
    check(&["legal", "period-doubling.sub", "aaaaaaaaa"], "legal-a9.txt", 1);
    check(&["gaps", "abb-bab.sub", "aa"], "gaps-abb-aa.txt", 0);
    check(
        &["periodic", "period-doubling.sub", "--max-period", "3"],
        "periodic-pd-3.txt",
        0,
    );
}

#[test]
fn markers_and_conveyor() {
    check(
        &["marker", "period-doubling.sub", "bb", "--length", "4"],
        "marker-bb-4.txt",
        0,
    );
    check(
        &["marker", "period-doubling.sub", "bb", "--length", "8"],
        "marker-bb-8.txt",
        0,
    );
    check(
        &["conveyor", "period-doubling.sub", "bb", "--length", "8", "--perm", "1,0"],
        "conveyor-bb-8.txt",
        0,
    );
}

#[test]
fn group_orders() {
    check(&["orders", "example5.sub", "--level", "1"], "orders-example5-1.txt", 0);
    check(
        &["orders", "random-fibonacci.sub", "--level", "3"],
        "orders-random-fibonacci-3.txt",
        0,
    );
}

#[test]
fn verify_marker_swap() {
    check(
        &[
            "verify",
            "period-doubling.sub",
            "marker",
            "bb",
            "--length",
            "4",
            "--perm",
            "1,0",
            "--max-radius",
            "0",
            "--reps",
            "3",
        ],
        "verify-marker-swap.txt",
        0,
    );
}

// the printed shuffle table re-imports to an extensionally identical code
#[test]
fn shuffle_table_round_trips() {
    let out = run(&["shuffle", "square-fibonacci.sub", "--letter", "b", "--perm", "1,0"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 1848);

    let sub = rss_core::bundled::square_fibonacci();
    let lang = rss_core::Language::new(sub.clone()).unwrap();
    let imported =
        rss_core::SlidingBlockCode::import(sub.alphabet(), &text, "round trip").unwrap();
    let b = sub.word("b").unwrap().0[0];
    let compiled = rss_core::compile_shuffle(
        &lang,
        &rss_core::ShuffleSpec { level: 1, letter: b, perm: vec![1, 0] },
        6,
    )
    .unwrap();
    assert_eq!(
        rss_core::extensional_difference(&imported, &compiled, &lang).unwrap(),
        None
    );
    assert_eq!(imported.export(&lang).unwrap(), text);
}

#[test]
fn usage_errors_exit_two() {
    let out = run(&["props", "no-such-file.sub"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());

    let out = run(&["legal", "period-doubling.sub", "xyz"]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["decompose", "period-doubling.sub", "bbb"]);
    assert_eq!(out.status.code(), Some(2));

    // clap usage error for an unknown subcommand
    let out = Command::new(env!("CARGO_BIN_EXE_rss-kit"))
        .arg("frobnicate")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
