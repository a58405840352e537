use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use roelcke::cli;

struct Dir(PathBuf);

impl Dir {
    fn new(tag: &str) -> Self {
        let dir = std::env::temp_dir().join(format!("roelcke-cli-{tag}-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        Dir(dir)
    }

    fn file(&self, name: &str, body: &str) -> String {
        let path = self.0.join(name);
        std::fs::write(&path, body).unwrap();
        path.to_string_lossy().into_owned()
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.join(name)
    }
}

impl Drop for Dir {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.0);
    }
}

fn roelcke(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_roelcke"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = roelcke(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    roelcke(args).status.code().unwrap()
}

#[test]
fn documented_examples() {
    let d = Dir::new("examples");
    let r = d.file("r.rel", "rel 2\n0 1\n1 0\n");
    let s = d.file("s.rel", "rel 2\n0 0\n0 1\n1 0\n");
    assert_eq!(
        stdout(&["rel", "compose", &r, &s]),
        "rel 2\n0 0\n0 1\n1 1\n"
    );
    assert_eq!(
        stdout(&["rel", "enum", "--size", "2", "--count-only"]),
        "7\n"
    );
    assert_eq!(
        stdout(&["rel", "enum", "--size", "3", "--count-only"]),
        "265\n"
    );

    let swap = d.file("swap.pm", "pm\n0 -> 1\n1 -> 0\n");
    let id = d.file("id.pm", "pm\ne -> e\n");
    assert_eq!(code(&["coset-witness", &swap, &id, "--level", "1"]), 2);
    assert_eq!(stdout(&["homeo", "compose", &swap, &swap]), "pm\ne -> e\n");
    assert_eq!(stdout(&["homeo", "supdist", &swap, &id]), "1\n");
    assert_eq!(
        stdout(&["homeo", "trace", &swap, "--level", "1"]),
        "rel 2\n0 1\n1 0\n"
    );
    assert_eq!(stdout(&["net", "--level", "1", "--count-only"]), "7\n");
}

#[test]
fn outputs_parse_back() {
    let d = Dir::new("parse");
    let r = d.file("r.tower", "tower clopen 1\n0 0\n0 1\n1 0\n");
    let g = d.file("g.tower", "tower graph\n0 -> 1\n1 -> 0\n");
    let swap = d.file("swap.pm", "pm\n0 -> 1\n1 -> 0\n");
    for args in [
        vec!["tower", "compose", &r, &g],
        vec!["tower", "compose", &g, &r],
        vec!["tower", "involute", &r],
        vec!["tower", "translate", &swap, &r, "--side", "left"],
    ] {
        let out = stdout(&args);
        let t = cli::format::parse_tower(&out).unwrap();
        assert_eq!(cli::format::format_tower(&t).unwrap(), out);
    }
    let composite = cli::format::parse_tower(&stdout(&["tower", "compose", &r, &g])).unwrap();
    assert_eq!(
        composite.trace(1).unwrap(),
        roelcke::IndexRelation::from_pairs(2, [(0, 0), (1, 0), (1, 1)]).unwrap()
    );

    let pair = stdout(&[
        "realize-pair",
        &d.file("a.rel", "rel 2\n0 0\n0 1\n1 0\n"),
        &d.file("b.rel", "rel 2\n0 1\n1 0\n1 1\n"),
        "--level",
        "1",
    ]);
    let maps: Vec<_> = pair
        .split("\n\n")
        .map(|doc| cli::format::parse_prefix_map(doc).unwrap())
        .collect();
    let fg = maps[0].compose(&maps[1]).unwrap();
    assert_eq!(
        fg.level_trace(1).unwrap(),
        roelcke::IndexRelation::from_pairs(2, [(0, 0), (1, 0), (1, 1)]).unwrap()
    );
}

#[test]
fn error_classes_map_to_exit_codes() {
    let d = Dir::new("codes");
    let bad = d.file("bad.rel", "rel 2\n0 0\n1\n");
    let out = roelcke(&["rel", "transpose", &bad]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    let small = d.file("small.rel", "rel 2\n0 0\n1 1\n");
    let big = d.file("big.rel", "rel 3\n0 0\n1 1\n2 2\n");
    assert_eq!(code(&["rel", "compose", &small, &big]), 1);
    assert_eq!(code(&["rel", "enum", "--size", "6"]), 3);
    assert_eq!(
        code(&["rel", "transpose", &d.path("missing.rel").to_string_lossy()]),
        1
    );

    let u = d.file("u.clopen", "clopen\n0\n");
    let v = d.file("v.clopen", "clopen\n1\n");
    assert_eq!(code(&["witness", "dense-orbit", &u, &u, &v, &v]), 2);

    let out = roelcke(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    assert_eq!(code(&[]), 1);
    assert_eq!(code(&["--help"]), 0);
}

#[test]
fn out_flag_writes_the_document() {
    let d = Dir::new("out");
    let target = d.path("net.txt");
    let out = roelcke(&["net", "--level", "1", "--out", &target.to_string_lossy()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let written = std::fs::read_to_string(&target).unwrap();
    assert_eq!(written.split("\n\n").count(), 7);
    assert_eq!(written, stdout(&["net", "--level", "1"]));
}

#[test]
fn reruns_are_byte_identical() {
    let d = Dir::new("determinism");
    let r = d.file("r.tower", "tower clopen 1\n0 0\n0 1\n1 0\n");
    let s = d.file("s.tower", "tower clopen 1\n0 1\n1 0\n1 1\n");
    let part = d.file("p.part", "part\nblock: 0\nblock: 10\nblock: 11\n");
    let rel = d.file("r.rel", "rel 3\n0 0\n0 1\n1 2\n2 0\n2 2\n");
    for args in [
        vec!["cluster", r.as_str(), s.as_str(), "--level", "2"],
        vec!["realize", rel.as_str(), "--partition", part.as_str()],
        vec!["net", "--level", "1"],
        vec!["rel", "enum", "--size", "3"],
    ] {
        let first = roelcke(&args);
        assert_eq!(first.status.code(), Some(0));
        assert_eq!(first.stdout, roelcke(&args).stdout);
        assert_eq!(
            first.stdout,
            cli::run(std::iter::once("roelcke").chain(args.iter().copied()))
                .stdout
                .into_bytes()
        );
    }
}

#[test]
fn library_entry_point_reports_codes() {
    let outcome = cli::run(["roelcke", "rel", "enum", "--size", "1"]);
    assert_eq!(
        outcome,
        cli::Outcome {
            code: 0,
            stdout: "rel 1\n0 0\n".into(),
            stderr: String::new()
        }
    );
    assert_eq!(
        cli::run(["roelcke", "tower", "trace", "/nonexistent", "--level", "1"]).code,
        1
    );
    assert!(Path::new(env!("CARGO_BIN_EXE_roelcke")).exists());
}
