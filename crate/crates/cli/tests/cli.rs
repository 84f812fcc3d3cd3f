use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn corpus(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/corpus")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn actorlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_actorlab")).args(args).output().unwrap()
}

fn with_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_actorlab"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn temp_file(name: &str, contents: &str) -> String {
    let dir = std::env::temp_dir().join(format!("actorlab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn check_accepts_corpus_and_rejects_garbage() {
    let o = actorlab(&["check", &corpus("pingpong.act")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "ok");
    let o = with_stdin(&["check", "-", "--format", "json"], "class { main");
    assert_eq!(o.status.code(), Some(2));
    let j: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(j["ok"], false);
}

#[test]
fn classify_reports_fragments() {
    let o = actorlab(&["classify", &corpus("taskmanager_sl.act"), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let j: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(j["sl"], true);
    let o = actorlab(&["classify", &corpus("merger.act")]);
    assert!(stdout(&o).contains("decider: undecidable"));
}

#[test]
fn run_prints_one_line_per_step_and_an_outcome() {
    let o = actorlab(&["run", &corpus("pingpong.act"), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let lines: Vec<serde_json::Value> =
        stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let last = lines.last().unwrap();
    assert_eq!(last["outcome"], "quiescent");
    for (i, l) in lines[..lines.len() - 1].iter().enumerate() {
        assert_eq!(l["step"], i + 1);
        assert_eq!(l["config-digest"].as_str().unwrap().len(), 16);
    }
    let o = actorlab(&["run", &corpus("selfping.act"), "--budget", "5"]);
    assert!(stdout(&o).contains("budget exhausted after 5 steps"));
    let o = actorlab(&["run", &corpus("pingpong.act"), "--guide", "7"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn run_is_reproducible_under_a_seed() {
    let args = ["run", &corpus("prodcons.act"), "--policy", "random", "--seed", "9", "--budget", "40"];
    assert_eq!(stdout(&actorlab(&args)), stdout(&actorlab(&args)));
}

#[test]
fn explore_counts_states() {
    let o = actorlab(&["explore", &corpus("pingpong.act"), "--format", "json"]);
    let j: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(j["complete"], true);
    assert_eq!(j["terminates"], true);
}

#[test]
fn compile_cm_emits_a_parsable_program() {
    let o = actorlab(&["compile-cm", &corpus("incdec.cm"), "--target", "ro"]);
    assert_eq!(o.status.code(), Some(0));
    let prog = temp_file("incdec.act", &stdout(&o));
    let o = actorlab(&["check", &prog]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn decide_termination_exit_codes() {
    let o = actorlab(&["decide", "termination", &corpus("selfping.act"), "--witness"]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.starts_with("DIVERGES"));
    assert!(out.contains("ancestor:") && out.contains("descendant:"));
    let o = actorlab(&["decide", "termination", &corpus("taskmanager_roba.act")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "TERMINATES");
    let o = actorlab(&["decide", "termination", &corpus("merger.act")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).starts_with("INAPPLICABLE"));
}

#[test]
fn decide_reach_on_targets_and_processes() {
    let target = r#"{"actors":[{"name":"B#0","process":"0","state":{},"queue":[{"method":"pong","args":["A#0"]}]},{"name":"A#0","process":"0","state":{},"queue":[]},{"name":"Root#0","process":"0","state":{},"queue":[]}]}"#;
    let path = temp_file("target.json", target);
    let o = actorlab(&["decide", "reach", &corpus("pingpong.act"), "--target", &path]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o).trim(), "REACHABLE");
    let o = actorlab(&["decide", "reach", &corpus("pingpong.act"), "--process", "A#0!ping(A#0)"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o).trim(), "UNREACHABLE");
    let o = actorlab(&["decide", "reach", &corpus("pingpong.act"), "--process", "x!"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn order_compares_configurations() {
    let small = temp_file("small.json", r#"{"actors":[{"name":"A#0","process":"0","queue":[{"method":"m","args":["x"]}]}]}"#);
    let big = temp_file(
        "big.json",
        r#"{"actors":[{"name":"A#0","process":"0","queue":[{"method":"n","args":[]},{"method":"m","args":["y"]}]}]}"#,
    );
    let o = actorlab(&["order", "--leq", &small, &big]);
    assert_eq!((o.status.code(), stdout(&o).trim().to_string()), (Some(0), "yes".into()));
    let o = actorlab(&["order", "--leq", &big, &small]);
    assert_eq!((o.status.code(), stdout(&o).trim().to_string()), (Some(1), "no".into()));
}
