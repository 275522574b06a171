use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn run(args: &[&str], stdin: &[u8]) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_palstream"))
        .args(args)
        .env_remove("PALSTREAM_SEED")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn palstream");
    child.stdin.take().unwrap().write_all(stdin).unwrap();
    child.wait_with_output().unwrap()
}

fn json_lines(out: &Output) -> Vec<Value> {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).expect("valid JSON line"))
        .collect()
}

#[test]
fn scan_finds_the_planted_midpoint() {
    let lines = json_lines(&run(&["scan", "--eps", "0.32"], b"xyzabbaqrs"));
    assert_eq!(lines.len(), 9);
    let best = lines.iter().max_by_key(|l| l["arm_estimate"].as_u64()).unwrap();
    assert_eq!(best["midpoint"], 5);
    assert_eq!(best["arm_estimate"], 2);
    assert_eq!(best["full_length"], 4);
    for l in &lines {
        for key in ["algo", "midpoint", "arm_estimate", "arm_lower", "arm_upper_exclusive", "full_length", "parity"] {
            assert!(l.get(key).is_some(), "missing {key} in {l}");
        }
    }
}

#[test]
fn scan_verify_passes_on_both_parities() {
    let input = b"abacabadabacabaxxyzzyx";
    for mode in ["compressed", "simple"] {
        let out = run(&["scan", "--parity", "both", "--mode", mode, "--verify"], input);
        let lines = json_lines(&out);
        let n = input.len();
        assert_eq!(lines.len(), 2 * n - 1);
    }
}

#[test]
fn scan_threshold_keeps_only_possible_long_arms() {
    let input = [b"qwerty".as_slice(), &[b'a'; 40], b"zxcvbn"].concat();
    let lines = json_lines(&run(&["scan", "--threshold", "10"], &input));
    assert!(!lines.is_empty());
    assert!(lines.iter().all(|l| l["arm_upper_exclusive"].as_u64().unwrap() > 10));
}

#[test]
fn approx_longest_on_unary_is_within_factor() {
    let lines = json_lines(&run(&["approx-longest", "--eps", "1"], &[b'a'; 1024]));
    assert_eq!(lines.len(), 1);
    let est = lines[0]["arm_estimate"].as_u64().unwrap();
    assert!((256..=512).contains(&est), "est {est}");
}

#[test]
fn longest_reads_stdin_and_reports_all_midpoints() {
    let lines = json_lines(&run(&["longest"], b"abbaxcddc"));
    assert_eq!(lines[0]["arm"], 2);
    assert_eq!(lines[0]["midpoints"], serde_json::json!([2, 7]));
    let both = json_lines(&run(&["longest", "--parity", "both", "--verify"], b"abcbaxabba"));
    assert_eq!(both[0]["full_length"], 5);
    assert_eq!(both[0]["odd_centers"], serde_json::json!([3, 6]));
}

#[test]
fn oracle_agrees_with_scan_at_finest_resolution() {
    let input = b"mississippi";
    let oracle = json_lines(&run(&["oracle"], input));
    let scan = json_lines(&run(&["scan", "--eps", "0.31"], input));
    let arms = |v: &[Value]| v.iter().map(|l| l["arm_estimate"].as_u64().unwrap()).collect::<Vec<_>>();
    assert_eq!(arms(&oracle), arms(&scan));
}

#[test]
fn output_is_deterministic() {
    let input = run(&["gen", "--n", "3000", "--sigma", "2", "--seed", "9"], b"").stdout;
    let a = run(&["scan", "--seed", "5"], &input);
    let b = run(&["scan", "--seed", "5"], &input);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn tsv_has_a_header_and_meter_comment() {
    let out = run(&["scan", "--format", "tsv", "--meter"], b"abccba");
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("algo\tmidpoint\t"));
    assert!(text.lines().last().unwrap().starts_with("# meter {"));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["scan", "--no-such-flag"], b"").status.code(), Some(2));
    assert_eq!(run(&["scan", "--eps", "7"], b"abcabc").status.code(), Some(2));
    assert_eq!(run(&["longest", "--parity", "odd"], b"abc").status.code(), Some(2));
    assert_eq!(run(&["scan", "/definitely/not/here"], b"").status.code(), Some(3));
    assert_eq!(run(&["scan", "--complement", "dna"], b"ACGU").status.code(), Some(3));
}

#[test]
fn bench_on_empty_corpus_prints_only_the_header() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["bench", "--corpus", dir.path().to_str().unwrap()], b"");
    assert!(out.status.success());
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "algo,source,n,eps,seed,peak_registers,wall_time_ms,max_error_observed,within_bound\n"
    );
}

#[test]
fn bench_rows_are_within_bounds() {
    let out = run(&["bench", "--sizes", "300,700", "--sigma", "2"], b"");
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 2 * 5);
    assert!(rows.iter().all(|r| r.ends_with(",true")), "{text}");
}

#[test]
fn gen_lower_bound_round_trips_through_longest() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("lb.txt");
    let p = path.to_str().unwrap();
    assert!(run(&["gen", "--kind", "lower-bound", "--m", "3", "--e-r", "2", "-o", p], b"").status.success());
    let lines = json_lines(&run(&["longest", p, "--verify"], b""));
    // A mirrored instance is one whole-stream palindrome.
    let len = std::fs::metadata(&path).unwrap().len();
    assert_eq!(lines[0]["full_length"].as_u64().unwrap(), len);
}
