use std::path::Path;
use std::process::{Command, Output};

const BASE: &str = r#"
[density]
family = "uniform"
value = 1.0
radius = 1.0

[basis]
m = 4
n_t = 64
n_quad = 32

[data]
amplitude = AMP
f = [{ j = 1, k = 1, amp = 1.0 }]

[output]
name = "case"
probes = [0.0, 0.25]
"#;

fn scenario(dir: &Path, amplitude: f64) -> std::path::PathBuf {
    let path = dir.join(format!("case_{amplitude}.toml"));
    std::fs::write(&path, BASE.replace("AMP", &format!("{amplitude:?}"))).unwrap();
    path
}

fn hystwave(args: &[&std::ffi::OsStr]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hystwave")).args(args).output().unwrap()
}

fn run(config: &Path, out: &Path) -> Output {
    hystwave(&["run".as_ref(), config.as_os_str(), "--out-dir".as_ref(), out.as_os_str()])
}

#[test]
fn zero_forcing_exits_ok_and_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let res = run(&scenario(dir.path(), 0.0), &out);
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
    for name in ["case.json", "case.csv", "case.config.toml", "case.probes.csv"] {
        assert!(out.join(name).exists(), "{name}");
    }
    let probes = std::fs::read_to_string(out.join("case.probes.csv")).unwrap();
    assert_eq!(probes.lines().next(), Some("t,x,u,u_t,p,p_t,g_R"));
    assert_eq!(probes.lines().count(), 1 + 2 * 64);
}

#[test]
fn effective_config_reproduces_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(run(&scenario(dir.path(), 0.01), &a).status.code(), Some(0));
    assert_eq!(run(&a.join("case.config.toml"), &b).status.code(), Some(0));
    let ja = std::fs::read(a.join("case.json")).unwrap();
    let jb = std::fs::read(b.join("case.json")).unwrap();
    assert_eq!(ja, jb);
}

#[test]
fn bad_config_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, BASE.replace("AMP", "1.0").replace("k = 1,", "k = 7,")).unwrap();
    let res = run(&path, dir.path());
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stderr).contains("data.f[0].k"));

    let missing = run(&dir.path().join("absent.toml"), dir.path());
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn large_forcing_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let res = run(&scenario(dir.path(), 100.0), &out);
    assert_eq!(res.status.code(), Some(2), "{}", String::from_utf8_lossy(&res.stdout));
}

#[test]
fn validate_prints_constants() {
    let dir = tempfile::tempdir().unwrap();
    let res = hystwave(&["validate".as_ref(), scenario(dir.path(), 1.0).as_os_str()]);
    assert_eq!(res.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&res.stdout).unwrap();
    assert!(v.is_object());

    let rejected = dir.path().join("flat.toml");
    std::fs::write(&rejected, BASE.replace("AMP", "1.0").replace("radius = 1.0", "radius = -1.0")).unwrap();
    let res = hystwave(&["validate".as_ref(), rejected.as_os_str()]);
    assert_eq!(res.status.code(), Some(1));
}

#[test]
fn sweep_writes_one_row_per_value() {
    let dir = tempfile::tempdir().unwrap();
    let config = scenario(dir.path(), 1.0);
    let res = hystwave(&[
        "sweep".as_ref(),
        config.as_os_str(),
        "--values".as_ref(),
        "0,0.001".as_ref(),
        "--out-dir".as_ref(),
        dir.path().as_os_str(),
    ]);
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
    let csv = std::fs::read_to_string(dir.path().join("case.sweep.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("value,delta,converged,confined,delta_star"));
}
