//! End-to-end runs of the `spl` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use spectral_partitions::io::read_csv;

const SQUARE_CROSS: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/configs/square_cross.toml");

fn spl(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spl")).arg("--out-dir").arg(out).args(args).output().expect("spawn spl")
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("run.toml");
    std::fs::write(&path, text).unwrap();
    path
}

/// Every output file except the manifest, plus the manifest without its
/// wall-clock entry.
fn snapshot(dir: &Path) -> Vec<(String, String)> {
    let mut files: Vec<_> = std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    files
        .into_iter()
        .map(|p| {
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            let mut text = std::fs::read_to_string(&p).unwrap();
            if name == "manifest.json" {
                let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
                v.as_object_mut().unwrap().remove("wall_time_s");
                text = v.to_string();
            }
            (name, text)
        })
        .collect()
}

#[test]
fn reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let runs: [&[&str]; 3] = [
        &["rect-gamma", "--alpha", "3/2"],
        &["disk-radial", "--k", "5"],
        &["plap-eig", "--config", SQUARE_CROSS, "--n", "10"],
    ];
    for (i, args) in runs.iter().enumerate() {
        let (a, b) = (tmp.path().join(format!("{i}a")), tmp.path().join(format!("{i}b")));
        assert!(spl(&a, args).status.success());
        assert!(spl(&b, args).status.success());
        assert_eq!(snapshot(&a), snapshot(&b), "{args:?}");
    }
}

#[test]
fn manifest_lists_every_output() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(spl(tmp.path(), &["rect-spec", "--alpha", "1.5"]).status.success());
    let m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(tmp.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["command"], "rect-spec");
    let mut listed: Vec<String> = m["outputs"].as_array().unwrap().iter().map(|v| v.as_str().unwrap().to_string()).collect();
    let mut present: Vec<String> = std::fs::read_dir(tmp.path()).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect();
    listed.sort();
    present.sort();
    assert_eq!(listed, present);
}

#[test]
fn plap_eig_reports_the_square_cross_level() {
    let tmp = tempfile::tempdir().unwrap();
    let out = spl(tmp.path(), &["plap-eig", "--config", SQUARE_CROSS]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.lines().any(|l| l.starts_with("4, 8.0000000") && l.ends_with("position 4")), "{stdout}");
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    assert_eq!(spl(dir, &["--help"]).status.code(), Some(0));
    assert_eq!(spl(dir, &["no-such-command"]).status.code(), Some(2));
    assert_eq!(spl(dir, &["rect-gamma", "--alpha", "-1"]).status.code(), Some(2));
    assert_eq!(spl(dir, &["rect-gamma", "--alpha", "three"]).status.code(), Some(2));
    assert_eq!(spl(dir, &["plap-eig", "--config", "/nonexistent.toml"]).status.code(), Some(2));

    let unknown = write_config(dir, &std::fs::read_to_string(SQUARE_CROSS).unwrap().replace("[grid]", "[grid]\nsmoothing = 2"));
    let out = spl(dir, &["plap-eig", "--config", unknown.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));

    // An off-centre cut has unequal subdomain levels, so it is not critical.
    let lopsided = write_config(
        dir,
        "schema_version = 1\n[domain]\nkind = \"rect\"\nalpha = 1.0\n[[cuts]]\nkind = \"segment\"\nstart = [1.0, 0.0]\nend = [1.0, 3.141592653589793]\n[grid]\nn = 10\n",
    );
    let out = spl(dir, &["hessian-index", "--config", lopsided.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

/// Points of every `<polyline>` drawn in `color`.
fn svg_points(svg: &str, color: &str) -> Vec<[f64; 2]> {
    svg.lines()
        .filter(|l| l.starts_with("<polyline") && l.contains(&format!("stroke=\"{color}\"")))
        .flat_map(|l| {
            let rest = &l[l.find("points=\"").unwrap() + 8..];
            rest[..rest.find('"').unwrap()]
                .split(' ')
                .map(|pair| {
                    let (x, y) = pair.split_once(',').unwrap();
                    [x.parse().unwrap(), y.parse().unwrap()]
                })
                .collect::<Vec<[f64; 2]>>()
        })
        .collect()
}

fn csv_points(path: &Path) -> Vec<[f64; 2]> {
    let (header, rows) = read_csv(&std::fs::read_to_string(path).unwrap()).unwrap();
    let (ix, iy) = (header.iter().position(|h| h == "x").unwrap(), header.iter().position(|h| h == "y").unwrap());
    rows.iter().map(|r| [r[ix].parse().unwrap(), r[iy].parse().unwrap()]).collect()
}

#[test]
fn svg_lines_come_from_the_csv() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(spl(tmp.path(), &["plap-eig", "--config", SQUARE_CROSS, "--n", "10"]).status.success());
    // Nodal lines are blue; the red dashed cuts come from the configuration.
    let drawn = svg_points(&std::fs::read_to_string(tmp.path().join("nodal.svg")).unwrap(), "blue");
    let table = csv_points(&tmp.path().join("nodal_lines.csv"));
    assert!(!drawn.is_empty());
    for p in drawn {
        // SVG coordinates carry six decimals.
        assert!(table.iter().any(|q| (p[0] - q[0]).abs() < 1e-6 && (p[1] - q[1]).abs() < 1e-6), "{p:?} missing from nodal_lines.csv");
    }
}
