use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn walkbench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_walkbench"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn ring_with_chords(dir: &Path) -> String {
    let mut text = String::new();
    for i in 0..30 {
        text.push_str(&format!("{} {}\n", i, (i + 1) % 30));
        text.push_str(&format!("{} {}\n", i, (i + 7) % 30));
    }
    let path = dir.join("ring.edges");
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn write_config(dir: &Path, graph: &str, out: &Path) -> String {
    let path = dir.join("bench.conf");
    fs::write(
        &path,
        format!(
            "graphs = {graph}\nwalks = RW, DG, TSAW, N2V(1.5, 0.5)\nwalks_per_node = 3\nwalk_length = 15\n\
             dim = 8\nwindow = 3\nepochs = 1\nmaster_seed = 5\noutput_dir = {}\n",
            out.display()
        ),
    )
    .unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn run_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let graph = ring_with_chords(dir.path());
    let out = dir.path().join("out");
    let conf = write_config(dir.path(), &graph, &out);
    let o = walkbench(&["run", "--config", &conf]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("N2V(1.5, 0.5)"));
    assert!(out.join("report.json").is_file());
    assert!(out.join("corr_ring.csv").is_file());
}

#[test]
fn stages_compose_to_the_same_report() {
    let dir = tempfile::tempdir().unwrap();
    let graph = ring_with_chords(dir.path());
    let whole = dir.path().join("whole");
    let staged = dir.path().join("staged");
    let conf = write_config(dir.path(), &graph, &whole);
    assert!(walkbench(&["run", "-c", &conf]).status.success());
    let staged_s = staged.to_string_lossy().into_owned();
    for stage in ["prepare", "walk", "embed", "score", "report"] {
        let o = walkbench(&[stage, "-c", &conf, "-o", &staged_s]);
        assert!(o.status.success(), "{stage}: {}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(
        fs::read(whole.join("report.json")).unwrap(),
        fs::read(staged.join("report.json")).unwrap()
    );
}

#[test]
fn configuration_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let graph = ring_with_chords(dir.path());
    let out = dir.path().join("out").to_string_lossy().into_owned();
    let o = walkbench(&["run", "-g", &graph, "-o", &out, "--walks", "RW, spiral"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!Path::new(&out).exists());
    assert_eq!(walkbench(&["run", "-g", &graph, "--dim", "0"]).status.code(), Some(2));
    assert_eq!(walkbench(&["run", "--config", "/nonexistent/x.conf"]).status.code(), Some(2));
}

#[test]
fn report_without_scores_fails() {
    let dir = tempfile::tempdir().unwrap();
    let graph = ring_with_chords(dir.path());
    let out = dir.path().join("out");
    let conf = write_config(dir.path(), &graph, &out);
    assert!(walkbench(&["prepare", "-c", &conf]).status.success());
    let o = walkbench(&["report", "-c", &conf]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!out.join("report.json").exists());
}

#[test]
fn partial_failure_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let graph = ring_with_chords(dir.path());
    let tiny = dir.path().join("tiny.edges");
    fs::write(&tiny, "a b\n").unwrap();
    let out = dir.path().join("out");
    let conf = write_config(dir.path(), &graph, &out);
    let o = walkbench(&["run", "-c", &conf, "-g", &graph, "-g", tiny.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("tiny"));
    assert!(out.join("report.json").is_file());
}
