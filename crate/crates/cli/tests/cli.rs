//! Command-line behavior: exit codes, determinism, file round trips.

use std::path::PathBuf;
use std::process::Command;

fn bin() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_starsep"))
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("starsep-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn separate_and_validate_roundtrip() {
    let input = tmp("cross2.json");
    std::fs::write(
        &input,
        r#"{"version":1,"segments":[
            {"id":0,"p":[0,0],"q":[4,0]},
            {"id":1,"p":[2,-1],"q":[2,1]}
        ]}"#,
    )
    .unwrap();
    let sep = tmp("cross2.sep.json");
    let status = Command::new(bin())
        .args(["separate"])
        .arg(&input)
        .arg("-o")
        .arg(&sep)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));

    let status = Command::new(bin())
        .arg("validate")
        .arg(&input)
        .arg(&sep)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
}

#[test]
fn bad_separator_exits_one() {
    let input = tmp("pair.json");
    std::fs::write(
        &input,
        r#"{"version":1,"segments":[
            {"id":0,"p":[0,0],"q":[4,0]},
            {"id":1,"p":[2,-1],"q":[2,1]}
        ]}"#,
    )
    .unwrap();
    // The two segments intersect, so splitting them across parts is invalid.
    let sep = tmp("bad.sep.json");
    std::fs::write(
        &sep,
        r#"{"version":1,"stars":[],"A":[0],"B":[1],"stats":{"n":2,"size":0,"ratio":0.0}}"#,
    )
    .unwrap();
    let status = Command::new(bin())
        .arg("validate")
        .arg(&input)
        .arg(&sep)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
}

#[test]
fn malformed_input_exits_two() {
    let input = tmp("zero.json");
    std::fs::write(
        &input,
        r#"{"version":1,"segments":[{"id":0,"p":[1,1],"q":[1,1]}]}"#,
    )
    .unwrap();
    let out = Command::new(bin())
        .arg("separate")
        .arg(&input)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("zero-length"));
}

#[test]
fn generator_deterministic_bytes() {
    let a = Command::new(bin())
        .args(["generate", "--kind", "random-cdir", "--n", "80", "--c", "3", "--seed", "7"])
        .output()
        .unwrap();
    let b = Command::new(bin())
        .args(["generate", "--kind", "random-cdir", "--n", "80", "--c", "3", "--seed", "7"])
        .output()
        .unwrap();
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());
}

#[test]
fn seed_env_override() {
    let flag = Command::new(bin())
        .args(["generate", "--kind", "random-cdir", "--n", "40", "--seed", "1"])
        .env("STARSEP_SEED", "99")
        .output()
        .unwrap();
    let direct = Command::new(bin())
        .args(["generate", "--kind", "random-cdir", "--n", "40", "--seed", "99"])
        .output()
        .unwrap();
    assert_eq!(flag.stdout, direct.stdout);
}

#[test]
fn perturb_path_on_overlaps() {
    let input = tmp("overlap.json");
    std::fs::write(
        &input,
        r#"{"version":1,"segments":[
            {"id":0,"p":[0,0],"q":[10,0]},
            {"id":1,"p":[5,0],"q":[15,0]},
            {"id":2,"p":[7,-3],"q":[7,3]}
        ]}"#,
    )
    .unwrap();
    // Without --perturb the overlap is a constraint error.
    let out = Command::new(bin()).arg("separate").arg(&input).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    let sep = tmp("overlap.sep.json");
    let status = Command::new(bin())
        .arg("separate")
        .arg(&input)
        .arg("--perturb")
        .arg("-o")
        .arg(&sep)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let status = Command::new(bin()).arg("validate").arg(&input).arg(&sep).status().unwrap();
    assert_eq!(status.code(), Some(0));
}

#[test]
fn oracle_build_query_verify() {
    let input = tmp("chain.json");
    let status = Command::new(bin())
        .args(["generate", "--kind", "chain", "--n", "12", "-o"])
        .arg(&input)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let oracle = tmp("chain.oracle.json");
    let status = Command::new(bin())
        .args(["oracle", "build"])
        .arg(&input)
        .arg("-o")
        .arg(&oracle)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));

    let out = Command::new(bin())
        .args(["oracle", "query"])
        .arg(&oracle)
        .args(["0", "11"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let reported: u32 = String::from_utf8_lossy(&out.stdout).trim().parse().unwrap();
    assert!((9..=11).contains(&reported));

    let out = Command::new(bin())
        .args(["oracle", "verify"])
        .arg(&oracle)
        .arg(&input)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("checked"));
}

#[test]
fn svg_output() {
    let input = tmp("grid.json");
    Command::new(bin())
        .args(["generate", "--kind", "grid", "--n", "3", "-o"])
        .arg(&input)
        .status()
        .unwrap();
    let svg = tmp("grid.svg");
    let status = Command::new(bin())
        .arg("svg")
        .arg(&input)
        .arg("--fragments")
        .arg("-o")
        .arg(&svg)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let body = std::fs::read_to_string(&svg).unwrap();
    assert!(body.starts_with("<svg"));
}

#[test]
fn bench_csv_shape() {
    let out = Command::new(bin())
        .args([
            "bench",
            "--kind",
            "random-cdir",
            "--sizes",
            "60,120",
            "--c",
            "2",
            "--seed",
            "3",
            "--no-oracle",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "n,c,kind,frag_count,seph_size,star_count,build_ns,valid,ratio,table_entries"
    );
    assert_eq!(lines.count(), 2);
}

#[cfg(unix)]
#[test]
fn external_stage2_strategy() {
    use std::os::unix::fs::PermissionsExt;

    // A path graph long enough that stage 1 never peels (max degree 2 stays
    // below the threshold) and the single component exceeds 2n/3, so the
    // external strategy is consulted for the whole graph.
    let input = tmp("longchain.json");
    Command::new(bin())
        .args(["generate", "--kind", "chain", "--n", "2000", "-o"])
        .arg(&input)
        .status()
        .unwrap();

    // Canned valid answer: the middle node separates the path.
    let response = tmp("stage2_response.json");
    let a: Vec<String> = (0..1000).map(|v| v.to_string()).collect();
    let b: Vec<String> = (1001..2000).map(|v| v.to_string()).collect();
    std::fs::write(
        &response,
        format!("{{\"separator\":[1000],\"A\":[{}],\"B\":[{}]}}", a.join(","), b.join(",")),
    )
    .unwrap();
    let script = tmp("stage2.sh");
    std::fs::write(
        &script,
        format!("#!/bin/sh\ncat > /dev/null\ncat {}\n", response.display()),
    )
    .unwrap();
    std::fs::set_permissions(&script, std::fs::Permissions::from_mode(0o755)).unwrap();

    let sep = tmp("longchain.sep.json");
    let status = Command::new(bin())
        .arg("separate")
        .arg(&input)
        .args(["--mode", "strings"])
        .arg("--stage2")
        .arg(format!("external:{}", script.display()))
        .arg("-o")
        .arg(&sep)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let body = std::fs::read_to_string(&sep).unwrap();
    assert!(body.contains("\"center\": 1000"));
}
