use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use meshmark::read_mesh;
use tempfile::TempDir;

fn meshmark(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_meshmark")).args(args).env_remove("MESHMARK_OUTPUT_DIR").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn correlation_of(o: &Output) -> f64 {
    assert!(o.status.success(), "{}", stderr(o));
    let text = stdout(o);
    let line = text.lines().find(|l| l.starts_with("correlation:")).expect("correlation line");
    line["correlation:".len()..].split_whitespace().next().unwrap().parse().unwrap()
}

/// A temp dir holding the bundled wavy torus as `torus.off`.
fn torus_dir() -> (TempDir, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("torus.off");
    let out = meshmark(&["gen", "wavy_torus", s(&path)]);
    assert!(out.status.success(), "{}", stderr(&out));
    (dir, path)
}

#[test]
fn embed_then_extract() {
    let (dir, input) = torus_dir();
    let marked = dir.path().join("marked.obj");
    let out = meshmark(&["embed", s(&input), s(&marked)]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("carriers per bit"));
    assert_eq!(read_mesh(&marked).unwrap().vertex_count(), read_mesh(&input).unwrap().vertex_count());
    assert_eq!(correlation_of(&meshmark(&["extract", s(&marked)])), 1.0);
}

#[test]
fn key_file_and_flags() {
    let (dir, input) = torus_dir();
    let key = dir.path().join("secret.key");
    std::fs::write(&key, "key1 = 31337\ndelta = 0.05\npayload_bits = 5\n").unwrap();
    let marked = dir.path().join("marked.off");
    assert!(meshmark(&["embed", s(&input), s(&marked), "--key-file", s(&key)]).status.success());
    assert_eq!(correlation_of(&meshmark(&["extract", s(&marked), "--key-file", s(&key)])), 1.0);
    // A flag overrides the file; key1 = 1 carries a different payload.
    let wrong = correlation_of(&meshmark(&["extract", s(&marked), "--key-file", s(&key), "--key1", "1"]));
    assert!(wrong < 1.0);
}

#[test]
fn unmarked_mesh_and_wrong_key_decorrelate() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("sphere.off");
    assert!(meshmark(&["gen", "bumpy_sphere", s(&input)]).status.success());
    let key = ["--delta", "0.004", "--bits", "64"];
    let extract_args = |path: &Path, key1: &str| {
        let mut a = vec!["extract", s(path), "--key1", key1];
        a.extend(key);
        meshmark(&a)
    };
    assert!(correlation_of(&extract_args(&input, "2024")).abs() < 0.5);
    let marked = dir.path().join("marked.off");
    let mut embed_args = vec!["embed", s(&input), s(&marked)];
    embed_args.extend(key);
    assert!(meshmark(&embed_args).status.success());
    assert_eq!(correlation_of(&extract_args(&marked, "2024")), 1.0);
    assert!(correlation_of(&extract_args(&marked, "99")).abs() < 0.5);
}

#[test]
fn exit_codes() {
    let (dir, input) = torus_dir();
    let out_path = dir.path().join("out.off");

    let missing = dir.path().join("nope.off");
    let o = meshmark(&["embed", s(&missing), s(&out_path)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("nope.off"));

    let garbage = dir.path().join("garbage.off");
    std::fs::write(&garbage, "OFF\n3 1 0\n0 0 0\n1 0 zero\n").unwrap();
    assert_eq!(meshmark(&["extract", s(&garbage)]).status.code(), Some(2));

    let o = meshmark(&["embed", s(&input), s(&out_path), "--bits", "500"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert_eq!(meshmark(&["embed", s(&input), s(&out_path), "--delta=-1"]).status.code(), Some(3));

    let o = meshmark(&["attack", s(&input), "blur:3", s(&out_path)]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("attack specs:"));
    assert_eq!(meshmark(&["attack", s(&input), "quant:99", s(&out_path)]).status.code(), Some(4));

    assert_eq!(meshmark(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn attacks() {
    let (dir, input) = torus_dir();
    let marked = dir.path().join("marked.off");
    assert!(meshmark(&["embed", s(&input), s(&marked)]).status.success());

    let shuffled = dir.path().join("shuffled.off");
    assert!(meshmark(&["attack", s(&marked), "reorder:2", s(&shuffled)]).status.success());
    assert_eq!(correlation_of(&meshmark(&["extract", s(&shuffled)])), 1.0);

    let same = dir.path().join("same.off");
    assert!(meshmark(&["attack", s(&marked), "noise:0", s(&same)]).status.success());
    assert_eq!(std::fs::read(&same).unwrap(), std::fs::read(&marked).unwrap());

    let finer = dir.path().join("finer.off");
    let o = meshmark(&["attack", s(&input), "subdiv:loop,1", s(&finer)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(read_mesh(&finer).unwrap().face_count(), 4 * read_mesh(&input).unwrap().face_count());

    let seeded_a = dir.path().join("a.off");
    let seeded_b = dir.path().join("b.off");
    assert!(meshmark(&["attack", s(&input), "noise:0.3", s(&seeded_a), "--seed", "5"]).status.success());
    assert!(meshmark(&["attack", s(&input), "noise:0.3@5", s(&seeded_b)]).status.success());
    assert_eq!(std::fs::read(&seeded_a).unwrap(), std::fs::read(&seeded_b).unwrap());
}

#[test]
fn metric_of_a_mesh_with_itself_is_zero() {
    let (_dir, input) = torus_dir();
    let o = meshmark(&["metric", s(&input), s(&input), "--samples", "2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    // Zero up to the rounding of the closest-point computation.
    for label in ["mrms:", "hausdorff:"] {
        let line = text.lines().find(|l| l.starts_with(label)).unwrap();
        let value: f64 = line[label.len()..].split_whitespace().next().unwrap().parse().unwrap();
        assert!(value < 1e-12, "{text}");
    }
}

#[test]
fn saliency_csv() {
    let dir = tempfile::tempdir().unwrap();
    for (name, bound) in [("icosphere", 1e-2), ("bumpy_grid", f64::INFINITY)] {
        let mesh = dir.path().join(format!("{name}.off"));
        assert!(meshmark(&["gen", name, s(&mesh)]).status.success());
        let csv = dir.path().join(format!("{name}.csv"));
        let colored = dir.path().join(format!("{name}_colored.off"));
        let o = meshmark(&["saliency", s(&mesh), s(&csv), "--colored", s(&colored)]);
        assert!(o.status.success(), "{}", stderr(&o));
        let text = std::fs::read_to_string(&csv).unwrap();
        let rows: Vec<&str> = text.lines().skip(1).collect();
        assert_eq!(rows.len(), read_mesh(&mesh).unwrap().vertex_count());
        let max = rows.iter().map(|r| r.split(',').nth(1).unwrap().parse::<f64>().unwrap()).fold(0.0, f64::max);
        assert!(max < bound, "{name}: {max}");
        assert!(std::fs::read_to_string(&colored).unwrap().starts_with("COFF\n"));
    }
}

#[test]
fn saliency_of_a_plane_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let plane = dir.path().join("plane.off");
    let mut text = String::from("OFF\n");
    let n = 30;
    text.push_str(&format!("{} {} 0\n", n * n, 2 * (n - 1) * (n - 1)));
    for j in 0..n {
        for i in 0..n {
            text.push_str(&format!("{} {} 0\n", i as f64 / 10.0, j as f64 / 10.0));
        }
    }
    for j in 0..n - 1 {
        for i in 0..n - 1 {
            let v = j * n + i;
            text.push_str(&format!("3 {} {} {}\n3 {} {} {}\n", v, v + 1, v + n + 1, v, v + n + 1, v + n));
        }
    }
    std::fs::write(&plane, text).unwrap();
    let csv = dir.path().join("plane.csv");
    assert!(meshmark(&["saliency", s(&plane), s(&csv)]).status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.lines().skip(1).all(|r| r.split(',').nth(1).unwrap().parse::<f64>().unwrap() < 1e-6));
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("bench.cfg");
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn bench_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "meshes = corpus:wavy_torus\nattacks = noise:0.05, quant:9, reorder:1\nseed = 3\noutput = out\nsamples_per_triangle = 2\n",
    );
    let o = meshmark(&["bench", s(&cfg)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("out/bench.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "mesh,stage,attack,param,corr,mrms,hd,millis,status");
    assert_eq!(lines.len(), 1 + 1 + 3);
    assert!(lines[1].starts_with("wavy_torus,embed,none,,1.000000,"));
    assert!(lines[4].starts_with("wavy_torus,attack,reorder,1,1.000000,"));
    let md = std::fs::read_to_string(dir.path().join("out/bench.md")).unwrap();
    assert!(md.contains("## Imperceptibility") && md.contains("## Robustness"));
    assert!(md.contains("config hash"));

    // Ablation run writes a separate report next to the first.
    assert!(meshmark(&["bench", s(&cfg), "--no-saliency"]).status.success());
    let ablation = std::fs::read_to_string(dir.path().join("out/bench_no_saliency.csv")).unwrap();
    assert_eq!(ablation.lines().count(), 5);
    assert_eq!(std::fs::read_to_string(dir.path().join("out/bench.csv")).unwrap(), csv);
}

#[test]
fn bench_output_directory_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "meshes = corpus:wavy_torus\nattacks = reorder:3\nsamples_per_triangle = 1\n");
    let env_dir = dir.path().join("from_env");
    let o = Command::new(env!("CARGO_BIN_EXE_meshmark"))
        .args(["bench", s(&cfg)])
        .env("MESHMARK_OUTPUT_DIR", &env_dir)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(env_dir.join("bench.csv").exists());

    let flag_dir = dir.path().join("from_flag");
    assert!(meshmark(&["bench", s(&cfg), "--out-dir", s(&flag_dir)]).status.success());
    assert!(flag_dir.join("bench.md").exists());
}

#[test]
fn bench_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let empty = write_config(dir.path(), "meshes = corpus\n");
    assert_eq!(meshmark(&["bench", s(&empty)]).status.code(), Some(2));
    let grammar = write_config(dir.path(), "attacks = noise\n");
    assert_eq!(meshmark(&["bench", s(&grammar)]).status.code(), Some(4));
}

#[test]
fn bench_records_failures_and_continues() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "meshes = corpus:wavy_torus, missing.off\nattacks = reorder:1\nsamples_per_triangle = 1\noutput = out\n",
    );
    let o = meshmark(&["bench", s(&cfg)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("(2 failed)"));
    let csv = std::fs::read_to_string(dir.path().join("out/bench.csv")).unwrap();
    assert!(csv.contains("load failed"));
}
