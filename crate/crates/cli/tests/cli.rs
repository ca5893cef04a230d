use std::path::Path;
use std::process::{Command, Output};

fn otsfd(args: &[&str], out_dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_otsfd")).args(args).env("OTSFD_OUT_DIR", out_dir).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

/// Number following `key` in the summary line.
fn summary_value(text: &str, key: &str) -> f64 {
    let line = text.lines().last().unwrap();
    let rest = &line[line.find(key).unwrap_or_else(|| panic!("no `{key}` in {line}")) + key.len()..];
    rest.trim_start().split([',', ' ']).next().unwrap().parse().unwrap()
}

#[test]
fn list_shows_rules_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = otsfd(&["list"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let fe = text.lines().find(|l| l.starts_with("diffusion-1d-fe ")).unwrap();
    assert!(fe.contains("dx^2/(6 D)"));
    let adv = text.lines().find(|l| l.starts_with("advection-2d ")).unwrap();
    assert!(adv.contains("dy = (Ay/Ax) dx"));
}

#[test]
fn corrected_forward_euler_is_fourth_order() {
    let dir = tempfile::tempdir().unwrap();
    let o = otsfd(&["run", "diffusion-1d-fe", "--policy", "ots", "--correction", "on"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(summary_value(&stdout(&o), "fitted order") >= 3.7);
    let csv = std::fs::read_to_string(dir.path().join("diffusion-1d-fe.csv")).unwrap();
    assert!(csv.starts_with("experiment,scheme,variant,N,dx,dt,error_linf,runtime_seconds\n"));
    assert_eq!(csv.lines().count(), 5);
}

#[test]
fn unit_cfl_advection_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("adv.csv");
    let o = otsfd(&["run", "advection-1d", "--policy", "ots", "--out", out.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(summary_value(&stdout(&o), "max error") <= 1e-12);
    assert!(out.exists());
}

#[test]
fn starfish_suboptimal_is_second_order() {
    let dir = tempfile::tempdir().unwrap();
    let o = otsfd(&["run", "diffusion-2d-starfish", "--policy", "subopt"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let order = summary_value(&stdout(&o), "fitted order");
    assert!((order - 2.0).abs() < 0.3, "order {order}");
}

#[test]
fn flags_override_resolutions_and_time() {
    let dir = tempfile::tempdir().unwrap();
    let o = otsfd(
        &["run", "diffusion-1d-cn", "--n-min", "10", "--refinements", "3", "--final-time", "0.25", "--policy", "ratio=0.5:1"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("diffusion-1d-cn.csv")).unwrap();
    let ns: Vec<&str> = csv.lines().skip(1).map(|l| l.rsplit(',').nth(4).unwrap()).collect();
    assert_eq!(ns, ["10", "20", "40"]);
}

#[test]
fn usage_and_configuration_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["run", "no-such-experiment"][..],
        &["run", "advection-1d", "--correction", "on"],
        &["run", "diffusion-1d-fe", "--policy", "fastest"],
        &["run", "diffusion-1d-fe", "--seed-fixture", "no-such-fixture"],
        &["frobnicate"],
    ] {
        let o = otsfd(args, dir.path());
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn unstable_step_is_a_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    let o = otsfd(&["run", "diffusion-1d-fe", "--policy", "ratio=1:2", "--correction", "off"], dir.path());
    assert_eq!(o.status.code(), Some(3));
    let csv = std::fs::read_to_string(dir.path().join("diffusion-1d-fe.csv")).unwrap();
    assert!(csv.lines().skip(1).all(|l| l.rsplit(',').nth(1) == Some("NaN")));
}

fn without_runtime(csv: &str) -> String {
    csv.lines().map(|l| l.rsplit_once(',').map_or(l, |(head, _)| head)).collect::<Vec<_>>().join("\n")
}

#[test]
fn reproduce_all_writes_manifest_and_is_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let first = otsfd(&["reproduce-all"], a.path());
    assert_eq!(first.status.code(), Some(0), "{}", stdout(&first));
    let second = otsfd(&["reproduce-all", "--out-dir", b.path().to_str().unwrap()], Path::new("/nonexistent"));
    assert_eq!(second.status.code(), Some(0));

    let manifest = std::fs::read_to_string(a.path().join("manifest.csv")).unwrap();
    let studies = manifest.lines().skip(1).count();
    assert!(studies >= 9, "{studies} studies");
    assert!(manifest.lines().skip(1).all(|l| l.ends_with(",true")));

    for entry in std::fs::read_dir(a.path()).unwrap() {
        let name = entry.unwrap().file_name();
        let name = name.to_str().unwrap();
        if name.starts_with("timing-") || name == "manifest.csv" {
            continue;
        }
        let x = std::fs::read_to_string(a.path().join(name)).unwrap();
        let y = std::fs::read_to_string(b.path().join(name)).unwrap();
        assert_eq!(without_runtime(&x), without_runtime(&y), "{name}");
    }
}
