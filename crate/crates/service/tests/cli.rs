use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures")
}

fn hyval(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyval")).args(args).current_dir(dir).output().unwrap()
}

fn build(dir: &Path, out: &str) -> Output {
    let f = fixtures();
    hyval(
        &[
            "build-prototypes",
            "--emotions",
            f.join("emotions.tsv").to_str().unwrap(),
            "--values",
            f.join("values.csv").to_str().unwrap(),
            "--oppositions",
            f.join("oppositions.tsv").to_str().unwrap(),
            "--out",
            out,
        ],
        dir,
    )
}

fn classify(dir: &Path, bundle: &str, out: &str) -> Output {
    let catalog = fixtures().join("hecht_catalog.json");
    hyval(&["classify", "--catalog", catalog.to_str().unwrap(), "--bundle", bundle, "--out", out], dir)
}

#[test]
fn build_classify_recommend() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(build(d, "bundle.json").status.success());
    let out = classify(d, "bundle.json", "report.json");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("classified 5 of 12"));

    let out = hyval(&["recommend", "--report", "report.json", "--item", "hecht-01", "--mode", "opposite"], d);
    assert!(out.status.success());
    let rec: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rec["ranked"][0]["item_id"], "hecht-03");

    let catalog = fixtures().join("hecht_catalog.json");
    let out = hyval(
        &["recommend", "--catalog", catalog.to_str().unwrap(), "--bundle", "bundle.json", "--item", "hecht-01", "--mode", "similar", "--limit", "1"],
        d,
    );
    assert!(out.status.success());
    let rec: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rec["ranked"].as_array().unwrap().len(), 1);
    assert_eq!(rec["ranked"][0]["item_id"], "hecht-04");
}

#[test]
fn runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for run in ["a", "b"] {
        assert!(build(d, &format!("bundle-{run}.json")).status.success());
        assert!(classify(d, &format!("bundle-{run}.json"), &format!("report-{run}.json")).status.success());
    }
    let read = |name: &str| std::fs::read(d.join(name)).unwrap();
    assert_eq!(read("bundle-a.json"), read("bundle-b.json"));
    assert_eq!(read("report-a.json"), read("report-b.json"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(hyval(&[], d).status.code(), Some(1));
    assert_eq!(hyval(&["classify", "--catalog", "x.json"], d).status.code(), Some(1));
    assert_eq!(hyval(&["recommend", "--item", "a", "--mode", "sideways", "--report", "r.json"], d).status.code(), Some(1));
    assert_eq!(hyval(&["--help"], d).status.code(), Some(0));

    let out = classify(d, "missing.json", "report.json");
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.json"));

    std::fs::write(d.join("empty.tsv"), "term\temotion\tscore\n").unwrap();
    let values = fixtures().join("values.csv");
    let out = hyval(&["build-prototypes", "--emotions", "empty.tsv", "--values", values.to_str().unwrap(), "--out", "b.json"], d);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("empty prototype"));

    std::fs::write(d.join("bad.csv"), "term,foundation,polarity,probability\nbrave,courage,virtue,0.8\n").unwrap();
    let emotions = fixtures().join("emotions.tsv");
    let out = hyval(&["build-prototypes", "--emotions", emotions.to_str().unwrap(), "--values", "bad.csv", "--out", "b.json"], d);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.csv") && err.contains("line 2"), "{err}");

    assert!(build(d, "bundle.json").status.success());
    assert!(classify(d, "bundle.json", "report.json").status.success());
    let out = hyval(&["recommend", "--report", "report.json", "--item", "hecht-05", "--mode", "similar"], d);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unclassifiable seed"));
    let out = hyval(&["recommend", "--report", "report.json", "--item", "nope", "--mode", "similar"], d);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn export_mapping_has_seventeen_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = hyval(&["export-mapping"], dir.path());
    assert!(out.status.success());
    let rows: Vec<serde_json::Value> = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rows.len(), 17);
    assert_eq!(rows[7]["moral_emotion"], "Fear");
}

#[test]
fn serve_fails_cleanly_on_a_taken_port() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(build(d, "bundle.json").status.success());
    let taken = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = taken.local_addr().unwrap().to_string();
    let out = hyval(&["serve", "--bind", &addr, "--bundle", "bundle.json"], d);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot bind"));
}

#[test]
fn serve_answers_over_a_socket() {
    use std::io::{BufRead, BufReader, Read, Write};
    use std::net::TcpStream;
    use std::process::Stdio;

    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(build(d, "bundle.json").status.success());
    let catalog = fixtures().join("hecht_catalog.json");
    let mut child = Command::new(env!("CARGO_BIN_EXE_hyval"))
        .args(["serve", "--bind", "127.0.0.1:0", "--bundle", "bundle.json", "--catalog"])
        .arg(&catalog)
        .args(["--store", "store"])
        .current_dir(d)
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut stderr = BufReader::new(child.stderr.take().unwrap());
    let addr = loop {
        let mut line = String::new();
        assert!(stderr.read_line(&mut line).unwrap() > 0, "server exited before listening");
        if let Some(addr) = line.trim().strip_prefix("listening on ") {
            break addr.to_string();
        }
    };

    let mut stream = TcpStream::connect(&addr).unwrap();
    write!(stream, "GET /v1/items/hecht-01/opposite HTTP/1.1\r\nHost: {addr}\r\nConnection: close\r\n\r\n").unwrap();
    let mut response = String::new();
    stream.read_to_string(&mut response).unwrap();
    child.kill().unwrap();
    child.wait().unwrap();

    assert!(response.starts_with("HTTP/1.1 200"), "{response}");
    let body = response.split("\r\n\r\n").nth(1).unwrap();
    let rec: serde_json::Value = serde_json::from_str(body).unwrap();
    assert_eq!(rec["ranked"][0]["item_id"], "hecht-03");
    assert!(d.join("store/items.jsonl").exists());
}
