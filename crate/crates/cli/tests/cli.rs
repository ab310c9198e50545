use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use formpipe_core::analysis::{analyze, AnalysisOptions};
use formpipe_core::casegen::{gen_cantilever, gen_sphere_lattice, CantileverSpec, LatticeSpec};
use formpipe_core::exchange::{parse_model, write_model};
use formpipe_core::model::{Cell, Point};
use formpipe_core::repair::{repair_pipeline, RepairConfig};

const EXAMPLE: &str = include_str!("../../core/tests/fixtures/cantilever_example.vtp");

fn formpipe(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_formpipe"))
        .args(args)
        .current_dir(dir)
        .env_remove("FORMPIPE_THREADS")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

/// Runs with `--format structured` and parses the `key=value` report.
fn structured(args: &[&str], dir: &Path) -> (i32, BTreeMap<String, String>) {
    let mut full = vec!["--format", "structured"];
    full.extend_from_slice(args);
    let out = formpipe(&full, dir);
    let stdout = String::from_utf8(out.stdout.clone()).unwrap();
    let records = stdout
        .lines()
        .map(|l| {
            let (k, v) = l.split_once('=').unwrap_or_else(|| panic!("not a record: {l}"));
            (k.to_string(), v.to_string())
        })
        .collect();
    (code(&out), records)
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn check_example_file() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "example.vtp", EXAMPLE);
    let (c, r) = structured(&["check", "example.vtp"], dir.path());
    assert!(c == 0 || c == 1, "exit {c}");
    assert_eq!(r["formpipe_report_version"], "1");
    assert_eq!(r["blocking"], "0");
}

#[test]
fn check_truncated_file_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "cut.vtp", &EXAMPLE[..EXAMPLE.len() / 2]);
    let out = formpipe(&["check", "cut.vtp"], dir.path());
    assert_eq!(code(&out), 3);
    assert!(out.stdout.is_empty());
    assert!(!out.stderr.is_empty());
}

#[test]
fn check_floating_component_is_blocking() {
    let dir = tempfile::tempdir().unwrap();
    let mut m = parse_model(EXAMPLE).unwrap();
    let (cs, mat) = (m.cells[0].cs_id, m.cells[0].mat_id);
    m.points.push(Point::new(2, [0.0, 500.0, 0.0]));
    m.points.push(Point::new(3, [100.0, 500.0, 0.0]));
    m.cells.push(Cell::beam(1, 2, 3, cs, mat));
    write(dir.path(), "float.vtp", &write_model(&m));
    let (c, r) = structured(&["check", "float.vtp"], dir.path());
    assert_eq!(c, 2);
    assert_eq!(r["status"], "blocking");
    assert!(r.contains_key("unsupported.0"));
}

#[test]
fn missing_input_is_an_io_error_and_bad_flags_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&formpipe(&["check", "nope.vtp"], dir.path())), 4);
    assert_eq!(code(&formpipe(&["solve", "--no-such-flag"], dir.path())), 64);
    assert_eq!(code(&formpipe(&["--help"], dir.path())), 0);
}

#[test]
fn clean_merges_a_duplicate_pair() {
    let dir = tempfile::tempdir().unwrap();
    let mut m = gen_cantilever(&CantileverSpec {
        n_elements: 2,
        ..Default::default()
    })
    .unwrap();
    // A twin of the free end, 1e-7 mm away, carrying a second cell.
    let tip = m.points[2].coords;
    m.points.push(Point::new(3, [tip[0] + 1e-7, tip[1], tip[2]]));
    let (cs, mat) = (m.cells[0].cs_id, m.cells[0].mat_id);
    m.cells.push(Cell::beam(2, 1, 3, cs, mat));
    write(dir.path(), "dup.vtp", &write_model(&m));

    let (c, r) = structured(&["clean", "dup.vtp", "-o", "out.vtp"], dir.path());
    assert_eq!(c, 0);
    assert_eq!(r["merged_point_pairs"].split(' ').count(), 1);
    assert_eq!(r["removed_duplicate_cells"].split(' ').count(), 1);
    let cleaned = parse_model(&read(dir.path(), "out.vtp")).unwrap();
    assert_eq!(cleaned.points.len(), 3);
    assert_eq!(cleaned.cells.len(), 2);
}

#[test]
fn clean_leaves_a_clean_model_untouched() {
    let dir = tempfile::tempdir().unwrap();
    let text = write_model(&gen_cantilever(&CantileverSpec::default()).unwrap());
    write(dir.path(), "c.vtp", &text);
    let (c, r) = structured(&["clean", "c.vtp", "-o", "out.vtp"], dir.path());
    assert_eq!(c, 0);
    assert_eq!(read(dir.path(), "out.vtp"), text);
    for key in [
        "merged_point_pairs",
        "removed_degenerate_cells",
        "removed_duplicate_cells",
        "removed_components",
        "pruned_arm_points",
    ] {
        assert_eq!(r[key], "", "{key}");
    }
    assert_eq!(r["element_removal_fraction"], "0.0");
}

#[test]
fn clean_recovers_the_injected_lattice_fraction() {
    let dir = tempfile::tempdir().unwrap();
    let (c, g) = structured(&["gen", "lattice", "-o", "l.vtp"], dir.path());
    assert_eq!(c, 0);
    let (c, r) = structured(&["clean", "l.vtp", "-o", "lc.vtp"], dir.path());
    assert_eq!(c, 0);
    let injected: f64 = g["injected_fraction"].parse().unwrap();
    let removed: f64 = r["element_removal_fraction"].parse().unwrap();
    assert!((removed - injected).abs() <= 0.002, "{removed} vs {injected}");
}

#[test]
fn solve_cantilever_both_solvers() {
    let dir = tempfile::tempdir().unwrap();
    structured(&["gen", "cantilever", "-o", "c.vtp"], dir.path());
    let (c, direct) = structured(&["solve", "c.vtp", "-o", "d.vtk"], dir.path());
    assert_eq!(c, 0);
    let u: f64 = direct["max_u_el"].parse().unwrap();
    assert!((u - 1.175).abs() <= 0.005, "u_el {u}");
    assert_eq!(direct["exceeded_count"], "1");
    assert!(read(dir.path(), "d.vtk").starts_with("# vtk DataFile Version 3.0"));

    let (c, pcg) = structured(&["solve", "c.vtp", "-o", "p.vtk", "--solver", "pcg"], dir.path());
    assert_eq!(c, 0);
    assert_eq!(pcg["method"], "pcg-ichol");
    for key in ["max_u_el", "max_total_displacement"] {
        let a: f64 = direct[key].parse().unwrap();
        let b: f64 = pcg[key].parse().unwrap();
        assert!((a - b).abs() <= 1e-6 * a.abs(), "{key}: {a} vs {b}");
    }
}

#[test]
fn self_weight_can_be_switched_off() {
    let dir = tempfile::tempdir().unwrap();
    structured(&["gen", "cantilever", "-o", "c.vtp"], dir.path());
    let (_, on) = structured(&["solve", "c.vtp", "-o", "a.vtk"], dir.path());
    let (_, off) = structured(&["solve", "c.vtp", "-o", "b.vtk", "--self-weight", "off"], dir.path());
    let on: f64 = on["max_total_displacement"].parse().unwrap();
    let off: f64 = off["max_total_displacement"].parse().unwrap();
    assert!((on - off - 1.83).abs() < 0.01, "{on} vs {off}");
}

#[test]
fn mechanism_fails_without_output() {
    let dir = tempfile::tempdir().unwrap();
    // Pinned at both ends: supported, but free to spin about its own axis.
    let mut m = gen_cantilever(&CantileverSpec {
        n_elements: 2,
        ..Default::default()
    })
    .unwrap();
    m.points[0].fixed = [true, true, true, false, false, false];
    m.points[2].fixed = [true, true, true, false, false, false];
    write(dir.path(), "mech.vtp", &write_model(&m));
    let out = formpipe(&["solve", "mech.vtp", "-o", "never.vtk"], dir.path());
    assert_eq!(code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("rx of point"), "{err}");
    assert!(!dir.path().join("never.vtk").exists());
    assert!(out.stdout.is_empty());
}

#[test]
fn failed_write_leaves_nothing_behind() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "example.vtp", EXAMPLE);
    let out = formpipe(&["clean", "example.vtp", "-o", "missing/sub/out.vtp"], dir.path());
    assert_eq!(code(&out), 4);
    let names: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    assert_eq!(names, ["example.vtp"]);
}

#[test]
fn generated_cases() {
    let dir = tempfile::tempdir().unwrap();
    let (c, r) = structured(
        &["gen", "lattice", "--nx", "5", "--ny", "5", "--nz", "5", "-o", "b.vtp"],
        dir.path(),
    );
    assert_eq!(c, 0);
    assert_eq!(r["points"], "125");
    assert_eq!(r["cells"], "300");

    let mut disp = BTreeMap::new();
    for variant in ["open", "closed"] {
        let file = format!("{variant}.vtp");
        let (c, _) = structured(&["gen", "leonardo", "--variant", variant, "-o", &file], dir.path());
        assert_eq!(c, 0);
        let (c, r) = structured(&["solve", &file, "-o", "x.vtk"], dir.path());
        assert_eq!(c, 0);
        disp.insert(variant, r["max_total_displacement"].parse::<f64>().unwrap());
    }
    assert!(disp["open"] > disp["closed"], "{disp:?}");

    let (c, _) = structured(&["gen", "random", "--seed", "3", "--messy", "-o", "r.vtp"], dir.path());
    assert_eq!(c, 0);
    let (c, _) = structured(&["gen", "leonardo", "--variant", "ajar", "-o", "z.vtp"], dir.path());
    assert_eq!(c, 64);
}

#[test]
fn file_pipeline_matches_the_library() {
    let dir = tempfile::tempdir().unwrap();
    structured(&["gen", "lattice", "-o", "g.vtp"], dir.path());
    structured(&["clean", "g.vtp", "-o", "c.vtp"], dir.path());
    let (c, r) = structured(&["solve", "c.vtp", "-o", "s.vtk"], dir.path());
    assert_eq!(c, 0);

    let mut m = gen_sphere_lattice(&LatticeSpec::default()).unwrap().model;
    assert_eq!(read(dir.path(), "g.vtp"), write_model(&m));
    repair_pipeline(&mut m, &RepairConfig::default()).unwrap();
    assert_eq!(read(dir.path(), "c.vtp"), write_model(&m));
    let a = analyze(&m, &AnalysisOptions::default()).unwrap();
    assert_eq!(r["max_u_el"], format!("{:?}", a.summary.max_u_el));
    assert_eq!(
        r["max_total_displacement"],
        format!("{:?}", a.summary.max_total_displacement)
    );
    assert_eq!(r["exceeded_count"], a.summary.exceeded_count.to_string());
}

#[test]
fn thread_count_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    structured(
        &["gen", "random", "--seed", "11", "--points", "400", "-o", "r.vtp"],
        dir.path(),
    );
    let run = |threads: &str, out: &str| {
        let o = Command::new(env!("CARGO_BIN_EXE_formpipe"))
            .args(["--format", "structured", "solve", "r.vtp", "-o", out])
            .env("FORMPIPE_THREADS", threads)
            .current_dir(dir.path())
            .output()
            .unwrap();
        (code(&o), String::from_utf8(o.stdout).unwrap())
    };
    let (c1, one) = run("1", "a.vtk");
    let (c4, four) = run("4", "b.vtk");
    assert_eq!(c1, c4);
    let strip = |s: &str| -> Vec<String> {
        s.lines()
            .filter(|l| !l.starts_with("wall_time=") && !l.starts_with("output="))
            .map(String::from)
            .collect()
    };
    assert_eq!(strip(&one), strip(&four));
    if c1 == 0 {
        assert_eq!(read(dir.path(), "a.vtk"), read(dir.path(), "b.vtk"));
    }
    assert_eq!(run("zero", "c.vtk").0, 64);
}
