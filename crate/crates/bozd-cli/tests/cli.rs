use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use bozd::config::RunConfig;

fn bozd(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bozd"))
        .current_dir(dir)
        .env_remove("BO_WORKERS")
        .args(args)
        .output()
        .expect("failed to run bozd")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Splits a CSV written by the tool into its configuration header (with
/// the `# ` prefixes and the first `# bozd <sub>` line removed) and the
/// CSV proper.
fn split_csv(text: &str) -> (String, String) {
    let mut header = String::new();
    let mut body = String::new();
    for (i, line) in text.lines().enumerate() {
        if let Some(rest) = line.strip_prefix('#') {
            if i > 0 {
                header.push_str(rest.strip_prefix(' ').unwrap_or(rest));
                header.push('\n');
            }
        } else {
            body.push_str(line);
            body.push('\n');
        }
    }
    (header, body)
}

fn read_rows(body: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut rdr = csv::Reader::from_reader(body.as_bytes());
    let head = rdr.headers().unwrap().iter().map(String::from).collect();
    let rows = rdr.records().map(|r| r.unwrap().iter().map(String::from).collect()).collect();
    (head, rows)
}

#[test]
fn malformed_pole_exits_with_code_two_and_names_the_index() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.toml"), "poles = [[0.0, 1.0], [3.0, -0.5]]\nresidues = [[1.0, 1.0], [1.0, 1.0]]\n").unwrap();
    let o = bozd(dir.path(), &["zd", "--data", "bad.toml", "--t", "1", "--x", "0", "--eps", "0.1"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("index 1"), "{}", stderr(&o));
}

#[test]
fn invalid_arguments_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["zd", "--t", "-1", "--x", "0", "--eps", "0.1"][..],
        &["profile", "--x", "0:1", "--only-ubar"],
        &["profile", "--eps", "0.1,-0.1"],
        &["verify", "--suite", "nonsense"],
        &["matsuno", "--n", "0", "--t", "1", "--x", "0"],
    ] {
        let o = bozd(dir.path(), args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn only_ubar_profile_has_header_and_weak_limit() {
    let dir = tempfile::tempdir().unwrap();
    let o = bozd(
        dir.path(),
        &["profile", "--builtin", "lorentzian", "--t", "0.3:2:3", "--x", "-2:6:17", "--only-ubar", "-o", "out"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("out/profile.csv")).unwrap();
    assert!(text.starts_with("# bozd profile\n"));
    let (header, body) = split_csv(&text);
    let cfg = RunConfig::from_toml_str(&header).unwrap();
    assert_eq!(cfg.subcommand, "profile");
    assert_eq!(cfg.builtin.as_deref(), Some("lorentzian"));
    assert_eq!((cfg.t.n, cfg.x.n), (3, 17));
    let (head, rows) = read_rows(&body);
    assert_eq!(head, ["t", "x", "J", "ubar", "status"]);
    assert_eq!(rows.len(), 3 * 17);
    for r in &rows {
        let ubar: f64 = r[3].parse().unwrap();
        assert!(ubar > 0.0 && ubar <= 2.0, "{r:?}");
    }
    // Before breaking there is a single branch everywhere.
    assert!(rows[..17].iter().all(|r| r[2] == "0"));
}

#[test]
fn csv_numbers_round_trip_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let o = bozd(dir.path(), &["profile", "--t", "4.5", "--x", "4:5:7", "--eps", "0.03125", "-o", "."]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (_, body) = split_csv(&fs::read_to_string(dir.path().join("profile.csv")).unwrap());
    let (_, rows) = read_rows(&body);
    for (k, r) in rows.iter().enumerate() {
        let x: f64 = r[1].parse().unwrap();
        assert_eq!(x, 4.0 + k as f64 / 6.0);
        assert_eq!(format!("{x:.16e}"), r[1]);
    }
}

#[test]
fn config_file_reproduces_a_run() {
    let dir = tempfile::tempdir().unwrap();
    let o = bozd(dir.path(), &["profile", "--t", "4.5", "--x", "4:5:5", "--eps", "0.0625", "-o", "a"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let first = fs::read_to_string(dir.path().join("a/profile.csv")).unwrap();
    let (header, _) = split_csv(&first);
    let cfg = header.replace("output_dir = \"a\"", "output_dir = \"b\"");
    fs::write(dir.path().join("run.toml"), &cfg).unwrap();
    let o = bozd(dir.path(), &["--config", "run.toml", "profile"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let second = fs::read_to_string(dir.path().join("b/profile.csv")).unwrap();
    assert_eq!(first.replace("\"a\"", "\"b\""), second);
    // A configuration for another subcommand is refused.
    let o = bozd(dir.path(), &["--config", "run.toml", "caustics"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn workers_come_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let run = |w: &str| {
        Command::new(env!("CARGO_BIN_EXE_bozd"))
            .current_dir(dir.path())
            .env("BO_WORKERS", w)
            .args(["caustics", "--t", "1:3:3", "-o", "."])
            .output()
            .unwrap()
    };
    let o = run("3");
    assert!(o.status.success(), "{}", stderr(&o));
    let (header, body) = split_csv(&fs::read_to_string(dir.path().join("caustics.csv")).unwrap());
    assert_eq!(RunConfig::from_toml_str(&header).unwrap().workers, Some(3));
    assert!(read_rows(&body).1.len() <= 3 * 4 * 2);
    assert_eq!(run("0").status.code(), Some(2));
}

#[test]
fn point_commands_print_json() {
    let dir = tempfile::tempdir().unwrap();
    let o = bozd(dir.path(), &["zd", "--t", "4.5", "--x", "4.2", "--eps", "0.03125,0.015625"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["j"], 1);

    let o = bozd(dir.path(), &["exact", "--builtin", "lorentzian", "--t", "1", "--x", "-0.5", "--eps", "0.25", "--dump-contours"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let u = v["evaluations"][0]["u"].as_f64().unwrap();
    assert!(dir.path().join("contours.csv").exists());

    let o = bozd(dir.path(), &["matsuno", "--n", "4", "--t", "1", "--x", "-0.5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["u"].as_f64().unwrap() - u).abs() < 1e-6);
}

#[test]
fn stokes_trace_writes_arcs() {
    let dir = tempfile::tempdir().unwrap();
    let o = bozd(dir.path(), &["stokes-trace", "--t", "4.5", "--x", "4.2", "--level-drop", "5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (_, body) = split_csv(&fs::read_to_string(dir.path().join("stokes.csv")).unwrap());
    assert!(!read_rows(&body).1.is_empty());
}

#[test]
fn selftest_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = bozd(dir.path(), &["selftest"]);
    assert!(o.status.success(), "{}\n{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("[PASS]"));
    assert!(!stdout(&o).contains("[FAIL]"));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert!(v["config"].is_string());
}

#[test]
fn pair_options_and_svg_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = bozd(
        dir.path(),
        &["profile", "--t", "4.5", "--x", "4:5:11", "--eps", "0.03125", "--heatmap", "--heatmap-re", "-5,20", "--heatmap-n", "21,11"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let (_, body) = split_csv(&fs::read_to_string(dir.path().join("heatmap.csv")).unwrap());
    let (_, rows) = read_rows(&body);
    assert_eq!(rows.len(), 21 * 11);
    assert_eq!(rows[0][0].parse::<f64>().unwrap(), -5.0);
    for name in ["profile.svg", "heatmap.svg"] {
        let svg = fs::read_to_string(dir.path().join(name)).unwrap();
        assert!(svg.contains("<!-- bozd profile") && svg.contains("subcommand = \"profile\""), "{name}");
        assert!(svg.trim_end().ends_with("</svg>"));
    }
    let o = bozd(dir.path(), &["caustics", "--x-range", "1,2,3"]);
    assert_eq!(o.status.code(), Some(2));
    let o = bozd(dir.path(), &["caustics", "--scan", "--t", "0.1:6:30", "--x-range", "-5,25", "--resolution", "30,90"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(dir.path().join("caustic_curves.svg").exists());
}
