use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn divbel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_divbel"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn config(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("configs")
        .join(name)
        .display()
        .to_string()
}

fn files(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                out.push((
                    path.strip_prefix(dir).unwrap().to_path_buf(),
                    std::fs::read(&path).unwrap(),
                ));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn simulate_log_writes_expected_files() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let o = divbel(&[
        "simulate-log",
        "--config",
        &config("three_agents.toml"),
        "--paths",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for name in [
        "manifest.toml",
        "summary.txt",
        "moments.toml",
        "paths/path_0000.csv",
        "paths/path_0001.csv",
    ] {
        assert!(out.join(name).is_file(), "missing {name}");
    }
    let csv = std::fs::read_to_string(out.join("paths/path_0000.csv")).unwrap();
    assert!(csv.starts_with("t,X,delta,zeta,S,PD,r,kappa,sigmaS,q_1,q_2,q_3,"));
    assert_eq!(csv.lines().count(), 1 + 50 * 252 + 1);
}

#[test]
fn reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&a, &b] {
        let o = divbel(&[
            "feedback",
            "--config",
            &config("feedback_30_agents.toml"),
            "--out",
            dir.to_str().unwrap(),
        ]);
        assert!(o.status.success());
    }
    assert_eq!(files(&a), files(&b));
}

#[test]
fn thread_count_does_not_change_output() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    let cfg = config("feedback_all_diligent.toml");
    assert!(divbel(&[
        "feedback",
        "--config",
        &cfg,
        "--sweep",
        "3",
        "--out",
        a.to_str().unwrap()
    ])
    .status
    .success());
    assert!(divbel(&[
        "feedback",
        "--config",
        &cfg,
        "--sweep",
        "3",
        "--parallel",
        "3",
        "--out",
        b.to_str().unwrap()
    ])
    .status
    .success());
    let strip = |d: &Path| {
        files(d)
            .into_iter()
            .filter(|(p, _)| p != Path::new("manifest.toml"))
            .collect::<Vec<_>>()
    };
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn replay_reproduces_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    let o = divbel(&[
        "beauty",
        "--config",
        &config("contest.toml"),
        "--out",
        a.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let manifest = a.join("manifest.toml");
    let o = divbel(&[
        "replay",
        "--manifest",
        manifest.to_str().unwrap(),
        "--out",
        b.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert_eq!(files(&a), files(&b));
}

#[test]
fn seed_override_is_recorded() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let o = divbel(&[
        "feedback",
        "--config",
        &config("feedback_30_agents.toml"),
        "--seed",
        "77",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let manifest = std::fs::read_to_string(out.join("manifest.toml")).unwrap();
    assert!(manifest.contains("seed = 77"));
    assert!(std::fs::read_to_string(out.join("metrics.txt"))
        .unwrap()
        .starts_with("seed = 77"));
}

#[test]
fn ingest_accepts_a_bare_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let csv = config("data/synthetic_monthly.csv");
    let o = divbel(&["ingest", "--csv", &csv, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("targets.toml").is_file());
}

#[test]
fn config_errors_exit_with_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let out = out.to_str().unwrap();
    assert_eq!(
        divbel(&["beauty", "--config", &config("fit.toml"), "--out", out])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(divbel(&["beauty", "--out", out]).status.code(), Some(2));
    assert_eq!(divbel(&["no-such-command"]).status.code(), Some(2));

    let bad = tmp.path().join("bad.toml");
    std::fs::write(
        &bad,
        "command = \"feedback\"\n[feedback]\nagents = 3\nn_diligent = 4\n",
    )
    .unwrap();
    let o = divbel(&["feedback", "--config", bad.to_str().unwrap(), "--out", out]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("feedback.n_diligent"));
}

#[test]
fn numeric_failure_exits_with_3() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("patient.toml");
    std::fs::write(
        &cfg,
        r#"command = "simulate-log"
[simulate]
horizon = 1.0
[simulate.market]
sigma = 0.2
alpha_star = 0.0
[[simulate.market.agents]]
rho = 1e-8
nu = 1.0
belief = { kind = "constant_drift", alpha = 0.0 }
"#,
    )
    .unwrap();
    let out = tmp.path().join("run");
    let o = divbel(&[
        "simulate-log",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}

#[test]
fn writes_nothing_outside_out() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("nested/run");
    let o = divbel(&[
        "beauty",
        "--config",
        &config("contest.toml"),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let entries: Vec<_> = std::fs::read_dir(tmp.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    assert_eq!(entries, vec![std::ffi::OsString::from("nested")]);
    let names: Vec<_> = files(&out).into_iter().map(|(p, _)| p).collect();
    assert_eq!(
        names,
        ["contest.csv", "contest.txt", "manifest.toml"].map(PathBuf::from)
    );
}
