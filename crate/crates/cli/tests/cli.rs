use std::io::{BufRead, BufReader, Write};
use std::net::TcpStream;
use std::process::{Command, Stdio};
use std::sync::Arc;

use flexunit::dataset::colleges;
use flexunit::session::replay::{replay, Script};

const BIN: &str = env!("CARGO_BIN_EXE_flexunit");
const FIXTURE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/tests/fixtures/scenario.jsonl");

fn run(args: &[&str]) -> std::process::Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

#[test]
fn replay_prints_the_library_snapshot() {
    let out = run(&["replay", "--script", FIXTURE]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let script = Script::parse(&std::fs::read_to_string(FIXTURE).unwrap()).unwrap();
    let want = replay(Arc::new(colleges()), &script, None).unwrap().snapshot.to_json();
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim_end(), want);
    let log = String::from_utf8(out.stderr).unwrap();
    assert!(log.contains("[Success] Colored points by Region"), "{log}");
}

#[test]
fn replay_writes_out_file_and_honours_seed() {
    let dir = std::env::temp_dir().join(format!("flexunit-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let a = dir.join("a.json");
    let b = dir.join("b.json");
    for p in [&a, &b] {
        let out = run(&[
            "replay",
            "--script",
            FIXTURE,
            "--seed",
            "3",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        assert!(out.stdout.is_empty());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let snap: serde_json::Value = serde_json::from_slice(&std::fs::read(&a).unwrap()).unwrap();
    assert_eq!(snap["version"], 1);
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn malformed_script_reports_line() {
    let path = std::env::temp_dir().join(format!("flexunit-bad-{}.jsonl", std::process::id()));
    std::fs::write(&path, "{\"version\":1}\n{\"seq\":1,\"t_ms\":0,\"kind\":\"wave\"}\n").unwrap();
    let out = run(&["replay", "--script", path.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
    std::fs::remove_file(path).ok();
}

#[test]
fn parse_prints_outcome_json() {
    let out = run(&["parse", "Color by region"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["outcome"], "complete");
    assert_eq!(v["interpretation"]["operation"], "color_by");

    let out = run(&["parse", "Apply a legion shelter"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["outcome"], "unintelligible");
}

#[test]
fn parse_uses_given_table() {
    let path = std::env::temp_dir().join(format!("flexunit-pets-{}.csv", std::process::id()));
    std::fs::write(&path, "Name,Species,Weight\nRex,Dog,30\nTom,Cat,4\nKit,Cat,3\n").unwrap();
    let out = run(&["parse", "Order by weight", "--data", path.to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["interpretation"]["params"]["attribute"], "Weight");
    let out = run(&["schema", "--data", path.to_str().unwrap()]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("Species"));
    std::fs::remove_file(path).ok();
}

#[test]
fn serve_answers_events() {
    let mut child = Command::new(BIN)
        .args(["serve", "--port", "0", "--seed", "7"])
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let mut first = String::new();
    BufReader::new(child.stdout.take().unwrap())
        .read_line(&mut first)
        .unwrap();
    let addr = first
        .trim()
        .strip_prefix("listening on ")
        .expect("address line")
        .to_string();

    let mut stream = TcpStream::connect(addr).unwrap();
    let mut reader = BufReader::new(stream.try_clone().unwrap());
    let mut line = String::new();
    reader.read_line(&mut line).unwrap();
    assert!(line.contains("\"type\":\"schema\""));
    writeln!(
        stream,
        r#"{{"type":"event","event":{{"seq":1,"t_ms":0,"kind":"utterance","payload":{{"text":"Color by region","entry_mode":"typed"}}}}}}"#
    )
    .unwrap();
    line.clear();
    reader.read_line(&mut line).unwrap();
    let diff: serde_json::Value = serde_json::from_str(&line).unwrap();
    assert_eq!(diff["type"], "diff");
    assert_eq!(diff["seq"], 1);
    line.clear();
    reader.read_line(&mut line).unwrap();
    let fb: serde_json::Value = serde_json::from_str(&line).unwrap();
    assert_eq!(fb["feedback"]["kind"], "success");
    child.kill().ok();
    child.wait().ok();
}
