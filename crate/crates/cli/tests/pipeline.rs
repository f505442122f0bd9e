use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cityforge"))
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn assert_ok(o: &Output) {
    assert!(
        o.status.success(),
        "exit {:?}\n{}",
        o.status.code(),
        String::from_utf8_lossy(&o.stderr)
    );
}

fn sample_run(out: &Path, extra: &[&str]) -> Output {
    let config = data("sample.toml");
    let mut args = vec!["run", "--config", s(&config), "--out", s(out)];
    args.extend_from_slice(extra);
    run(&args)
}

#[test]
fn golden_run_matches_committed_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = sample_run(&out, &[]);
    assert_ok(&o);
    let got = std::fs::read_to_string(out.join("manifest.json")).unwrap();
    let want = std::fs::read_to_string(data("golden_manifest.json")).unwrap();
    assert_eq!(got, want);
}

#[test]
fn rerun_is_a_no_op_with_identical_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    assert_ok(&sample_run(&out, &[]));
    let first = std::fs::read(out.join("manifest.json")).unwrap();
    let o = sample_run(&out, &[]);
    assert_ok(&o);
    let log = String::from_utf8_lossy(&o.stderr);
    for stage in ["ingest", "hdmap", "simulate", "render", "compose", "orbit"] {
        assert!(log.contains(&format!("{stage}: up to date")), "{log}");
    }
    assert_eq!(std::fs::read(out.join("manifest.json")).unwrap(), first);

    // A damaged output makes its stage run again and restores the bytes.
    std::fs::write(out.join("composed.png"), b"junk").unwrap();
    let o = sample_run(&out, &[]);
    assert_ok(&o);
    assert!(!String::from_utf8_lossy(&o.stderr).contains("compose: up to date"));
    assert_eq!(std::fs::read(out.join("manifest.json")).unwrap(), first);

    let o = sample_run(&out, &["--force", "--threads", "1"]);
    assert_ok(&o);
    assert!(!String::from_utf8_lossy(&o.stderr).contains("up to date"));
    assert_eq!(std::fs::read(out.join("manifest.json")).unwrap(), first);
}

#[test]
fn render_frame_without_scenario_is_a_dependency_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    assert_ok(&sample_run(&out, &["--stages", "ingest"]));
    let o = sample_run(&out, &["--stages", "render"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cityforge simulate"));

    let layout = out.join("layout");
    let o = run(&["render", "--layout", s(&layout), "--frame", "3", "--out", s(&dir.path().join("r"))]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn missing_upstream_artifact_names_the_stage() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["hdmap", "--layout", s(&dir.path().join("nope")), "--out", s(&dir.path().join("m.json"))]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cityforge ingest"));
    let o = run(&["compose", "--in", s(dir.path()), "--out", s(&dir.path().join("c.png"))]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cityforge render"));
}

#[test]
fn config_and_data_errors_have_their_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[render]\nwidht = 3\n").unwrap();
    assert_eq!(run(&["run", "--config", s(&bad)]).status.code(), Some(2));
    assert_eq!(run(&["encode", "--probe", "1,2"]).status.code(), Some(2));
    assert_eq!(run(&["encode", "--probe", "0,0,0", "--threads", "0"]).status.code(), Some(2));

    let map = dir.path().join("map.json");
    std::fs::write(&map, "{ not json").unwrap();
    let o = run(&["simulate", "--map", s(&map), "--vehicles", "1", "--frames", "1", "--out", s(&dir.path().join("s.json"))]);
    assert_eq!(o.status.code(), Some(4));

    let out = dir.path().join("run");
    assert_ok(&sample_run(&out, &["--stages", "ingest,hdmap"]));
    let o = run(&[
        "simulate",
        "--map",
        s(&out.join("map.json")),
        "--vehicles",
        "100000",
        "--frames",
        "2",
        "--out",
        s(&dir.path().join("s.json")),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn encode_prints_stable_json() {
    let a = run(&["encode", "--probe", "0.25,-0.5,0.75", "--seed", "9", "--feature", "0.1,0.2"]);
    assert_ok(&a);
    let b = run(&["encode", "--probe", "0.25,-0.5,0.75", "--seed", "9", "--feature", "0.1,0.2"]);
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["hash_feature"].as_array().unwrap().len(), 16 * 8);
    assert_eq!(v["sincos"].as_array().unwrap().len(), 3 * 2 * 10);
    assert_eq!(v["hash_grid"]["entries"], 1 << 19);
    assert_eq!(v["hash_grid"]["primes"][1], 2654435761u64);
    // sin(π·0.25) leads the sequence.
    let first = v["sincos"][0].as_f64().unwrap();
    assert!((first - (std::f64::consts::PI * 0.25).sin()).abs() < 1e-15);
}

fn read_png(p: &Path) -> Vec<u8> {
    let decoder = png::Decoder::new(std::io::BufReader::new(std::fs::File::open(p).unwrap()));
    let mut reader = decoder.read_info().unwrap();
    let mut buf = vec![0; reader.output_buffer_size().unwrap()];
    let info = reader.next_frame(&mut buf).unwrap();
    buf.truncate(info.buffer_size());
    buf
}

#[test]
fn edits_rerender_only_the_edited_instance() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    assert_ok(&sample_run(&out, &["--stages", "ingest,hdmap,simulate"]));
    let layout = out.join("layout");
    let scenario = out.join("scenario.json");
    let render = |extra: &[&str], to: &Path| {
        let mut args = vec![
            "render",
            "--layout",
            s(&layout),
            "--width",
            "160",
            "--image-height",
            "90",
            "--out",
            s(to),
        ];
        args.extend_from_slice(extra);
        assert_ok(&run(&args));
    };
    let base = dir.path().join("base");
    render(&[], &base);

    let styles = dir.path().join("styles.json");
    assert_ok(&run(&["edit", "set-style", "--styles", s(&styles), "--building", "8", "--seed", "77"]));
    let styled = dir.path().join("styled");
    render(&["--styles", s(&styles)], &styled);
    let inst = read_png(&base.join("instance.png"));
    assert_eq!(inst, read_png(&styled.join("instance.png")));
    assert_eq!(read_png(&base.join("depth.png")), read_png(&styled.join("depth.png")));
    let (c0, c1) = (read_png(&base.join("color.png")), read_png(&styled.join("color.png")));
    let mut changed = 0;
    for i in 0..inst.len() / 2 {
        let id = u16::from_be_bytes([inst[2 * i], inst[2 * i + 1]]);
        let differs = c0[3 * i..3 * i + 3] != c1[3 * i..3 * i + 3];
        if id != 8 {
            assert!(!differs, "pixel {i} of instance {id} changed");
        }
        changed += usize::from(differs);
    }
    assert!(changed > 0);

    let tall = dir.path().join("tall");
    assert_ok(&run(&[
        "edit",
        "set-height",
        "--layout",
        s(&layout),
        "--building",
        "1",
        "--height-m",
        "30",
        "--out",
        s(&tall),
    ]));
    assert_eq!(
        std::fs::read(out.join("layout.sem.png")).unwrap(),
        std::fs::read(dir.path().join("tall.sem.png")).unwrap()
    );
    assert_ne!(
        std::fs::read(out.join("layout.htd.png")).unwrap(),
        std::fs::read(dir.path().join("tall.htd.png")).unwrap()
    );

    let moved = dir.path().join("moved.json");
    assert_ok(&run(&[
        "edit",
        "move-vehicle",
        "--scenario",
        s(&scenario),
        "--vehicle",
        "2",
        "--dx",
        "-3",
        "--frame",
        "1",
        "--out",
        s(&moved),
    ]));
    let a: serde_json::Value = serde_json::from_slice(&std::fs::read(&scenario).unwrap()).unwrap();
    let b: serde_json::Value = serde_json::from_slice(&std::fs::read(&moved).unwrap()).unwrap();
    let x = |v: &serde_json::Value, t: usize| {
        v["frames"][t].as_array().unwrap().iter().find(|s| s["id"] == 2).unwrap()["center"][0].as_f64().unwrap()
    };
    assert!((x(&b, 1) - (x(&a, 1) - 3.0)).abs() < 1e-9);
    assert_eq!(x(&b, 0), x(&a, 0));
}

#[test]
fn compose_rebuilds_the_frame_from_layers() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    assert_ok(&sample_run(&out, &["--stages", "ingest,hdmap,simulate,render"]));
    let composed = dir.path().join("c.png");
    assert_ok(&run(&["compose", "--in", s(&out.join("render")), "--out", s(&composed)]));
    assert_eq!(read_png(&composed).len(), 320 * 180 * 3);
    let manifest = dir.path().join("m.json");
    assert_ok(&run(&["compose", "--in", s(&out.join("render")), "--out", s(&composed), "--manifest", s(&manifest)]));
    let m: serde_json::Value = serde_json::from_slice(&std::fs::read(&manifest).unwrap()).unwrap();
    assert!(m["stages"]["compose"]["outputs"]["c.png"].is_string());
}
