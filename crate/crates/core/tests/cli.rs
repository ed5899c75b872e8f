use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;

use papertorus::cli::run;
use serde_json::Value;

fn fixture() -> String {
    concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/puptent.pt").to_string()
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_papertorus"))
}

fn go(args: &[&str], out: &Path) -> i32 {
    let mut all = vec!["papertorus"];
    all.extend_from_slice(args);
    all.push("--out");
    all.push(out.to_str().unwrap());
    run(all)
}

fn files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect()
}

fn json(path: PathBuf) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn prove7_reports_counts() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(go(&["prove7"], dir.path()), 0);
    let log = std::fs::read_to_string(dir.path().join("prove7_log.txt")).unwrap();
    assert!(log.contains("total_patterns 15504\n"));
    assert!(log.contains("survivors 6\n"));
    let m = json(dir.path().join("manifest.json"));
    assert_eq!(m["subcommand"], "prove7");
    assert_eq!(m["precision"], 64);
}

#[test]
fn flatness_below_ten_to_minus_32() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        go(&["flatness", &fixture(), "--precision", "64"], dir.path()),
        0
    );
    let r = json(dir.path().join("flatness.json"));
    let dev: f64 = r["max_deviation"].as_str().unwrap().parse().unwrap();
    assert!(dev < 1e-32);
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        bin().arg("no-such-command").status().unwrap().code(),
        Some(2)
    );
    assert_eq!(bin().args(["flatness"]).status().unwrap().code(), Some(2));
    assert_eq!(go(&["flatness", "/nonexistent/torus.pt"], dir.path()), 2);
    assert_eq!(go(&["slice", &fixture(), "--plane", "1,2"], dir.path()), 2);
    assert_eq!(go(&["newton", "--target", "tiny"], dir.path()), 2);
    assert_eq!(bin().arg("--help").status().unwrap().code(), Some(0));
}

#[test]
fn certify_then_verify_and_tamper() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cert");
    assert_eq!(go(&["certify-embedding", &fixture()], &out), 0);
    let bundle = out.join("certificates.txt");
    let status = bin()
        .args(["verify", bundle.to_str().unwrap(), &fixture(), "--out"])
        .arg(dir.path().join("v"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));

    let text = std::fs::read_to_string(&bundle).unwrap();
    let line_start = text.find("\n0-").unwrap() + 1;
    for offset in [0, 3, 12, 25, 40] {
        let mut bytes = text.clone().into_bytes();
        bytes[line_start + offset] = if bytes[line_start + offset] == b'1' {
            b'2'
        } else {
            b'1'
        };
        let bad = dir.path().join(format!("bad{offset}.txt"));
        std::fs::write(&bad, bytes).unwrap();
        let status = bin()
            .args(["verify", bad.to_str().unwrap(), &fixture(), "--out"])
            .arg(dir.path().join("vb"))
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(1), "offset {offset}");
    }
    // a stricter lambda than the bundle was built with is a failed replay
    assert_eq!(
        go(
            &[
                "verify",
                bundle.to_str().unwrap(),
                &fixture(),
                "--lambda",
                "7e30"
            ],
            &dir.path().join("vs")
        ),
        1
    );
}

#[test]
fn certify_ift_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(go(&["certify-ift", &fixture()], &dir.path().join("ok")), 0);
    let r = json(dir.path().join("ok/certify-ift.json"));
    assert_eq!(r["holds"], true);
    assert_eq!(r["conclusion_radius"], "0.0000000000001");

    // in the family but not flat enough: the chain breaks at flatness
    let text = std::fs::read_to_string(fixture()).unwrap();
    let warped = text.replace("0.98050571585977935561653820085693", "0.981");
    let path = dir.path().join("warped.pt");
    std::fs::write(&path, warped).unwrap();
    assert_eq!(
        go(
            &["certify-ift", path.to_str().unwrap()],
            &dir.path().join("warped")
        ),
        1
    );

    // not in the family at all: the input is unusable for this command
    let lifted = text.replace("5 -0.09 0.665 0\n", "5 -0.09 0.665 0.01\n");
    assert_ne!(lifted, text);
    let path = dir.path().join("lifted.pt");
    std::fs::write(&path, lifted).unwrap();
    assert_eq!(
        go(
            &["certify-ift", path.to_str().unwrap()],
            &dir.path().join("lifted")
        ),
        2
    );
}

#[test]
fn outputs_independent_of_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    for cmd in [
        vec!["develop", fixture().as_str()],
        vec!["hull", fixture().as_str()],
        vec!["prove7"],
    ] {
        let mut a_args = cmd.clone();
        a_args.extend(["--threads", "1"]);
        let mut b_args = cmd.clone();
        b_args.extend(["--threads", "3"]);
        let (a, b) = (
            dir.path().join(format!("{}-1", cmd[0])),
            dir.path().join(format!("{}-3", cmd[0])),
        );
        assert_eq!(go(&a_args, &a), 0);
        assert_eq!(go(&b_args, &b), 0);
        let (mut fa, mut fb) = (files(&a), files(&b));
        fa.remove("manifest.json");
        fb.remove("manifest.json");
        assert_eq!(fa, fb);
    }
}

#[test]
fn rerun_reproduces_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.txt");
    std::fs::write(&spec, "chains = 2\nmax_iterations = 800\n").unwrap();
    let out = dir.path().join("run");
    assert_eq!(
        go(&["search", spec.to_str().unwrap(), "--seed", "5"], &out),
        0
    );
    let first = files(&out);
    assert!(first.contains_key("search_trace.csv"));
    assert!(first.contains_key("search_best.pt"));
    let manifest = out.join("manifest.json");
    let m = json(manifest.clone());
    assert_eq!(m["seed"], 5);
    assert_eq!(m["inputs"][0], spec.to_str().unwrap());

    std::fs::remove_dir_all(&out).unwrap();
    std::fs::create_dir(&out).unwrap();
    std::fs::write(dir.path().join("manifest.json"), &first["manifest.json"]).unwrap();
    assert_eq!(
        run([
            "papertorus",
            "rerun",
            dir.path().join("manifest.json").to_str().unwrap()
        ]),
        0
    );
    assert_eq!(files(&out), first);
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args(["hull", &fixture()])
        .env("PAPERTORUS_OUT", dir.path().join("env"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let h = json(dir.path().join("env/hull.json"));
    assert_eq!(h["face_number"], 6);
    assert_eq!(h["facet_list"].as_array().unwrap().len(), 12);
}

#[test]
fn newton_and_slice_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("n");
    assert_eq!(
        go(&["newton", "--target", "1e-60", "--precision", "128"], &out),
        0
    );
    let r = json(out.join("newton.json"));
    assert!(r["iterations"].as_u64().unwrap() <= 20);
    assert_eq!(r["z_truncated"][0], "0.98050571585977935561653820085693");
    let refined = papertorus::torus_file::read_torus(out.join("newton.pt")).unwrap();
    assert_eq!(refined.precision().digits(), 128);

    let out = dir.path().join("s");
    assert_eq!(
        go(&["slice", &fixture(), "--plane", "0,0,0.4,0.1,0.2,1"], &out),
        0
    );
    let svg = std::fs::read_to_string(out.join("slice.svg")).unwrap();
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
    assert!(out.join("slice.csv").exists());
}
