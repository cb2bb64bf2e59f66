use std::path::Path;
use std::process::{Command, Output};

fn jacobi(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jacobi"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .env_remove("JACOBI_OUT_DIR")
        .output()
        .unwrap()
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(jacobi(d, &["criteria", "--preset", "ex-B1"]).status.code(), Some(0));
    assert_eq!(jacobi(d, &["criteria", "--preset", "nope"]).status.code(), Some(2));
    assert_eq!(jacobi(d, &["criteria"]).status.code(), Some(2));
    assert_eq!(jacobi(d, &["frobnicate"]).status.code(), Some(2));
    assert_eq!(jacobi(d, &["verify", "--tolerance", "0"]).status.code(), Some(1));
    let corrupt = jacobi(d, &["verify", "--corrupt-offdiag-sign"]);
    assert_eq!(corrupt.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&corrupt.stdout).contains("delta_bound"));
    assert_eq!(jacobi(d, &["verify"]).status.code(), Some(0));
}

#[test]
fn outputs_do_not_depend_on_thread_count() {
    let one = tempfile::tempdir().unwrap();
    let four = tempfile::tempdir().unwrap();
    for (dir, threads) in [(&one, "1"), (&four, "4")] {
        for cmd in [
            &["criteria", "--preset", "ex-B-comp", "--param", "alpha=17/4"][..],
            &["limits", "--preset", "ex-B1", "--truncations", "20,40,80", "--window", "0,50"],
            &["cfrac", "--preset", "free"],
        ] {
            let out = jacobi(dir.path(), &[cmd, &["--threads", threads]].concat());
            assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        }
    }
    for name in ["criteria.json", "criteria.csv", "limits.json", "cfrac.json", "cfrac.csv"] {
        let a = std::fs::read(one.path().join(name)).unwrap();
        let b = std::fs::read(four.path().join(name)).unwrap();
        assert!(a == b, "{name} differs between thread counts");
    }
}

#[test]
fn preset_list_names_every_preset() {
    let dir = tempfile::tempdir().unwrap();
    let out = jacobi(dir.path(), &["preset-list"]);
    let text = String::from_utf8_lossy(&out.stdout);
    for p in jacobi::presets::PRESETS {
        assert!(text.contains(p.name), "{text}");
    }
}
