use std::path::Path;
use std::process::{Command, Output};

use momab_cli::output::{read_summary, read_traces};
use momab_cli::RunManifest;

fn momab(args: &[&str], out_env: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_momab"));
    cmd.args(args).env_remove("MOMAB_OUT");
    if let Some(p) = out_env {
        cmd.env("MOMAB_OUT", p);
    }
    cmd.output().expect("spawn momab")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn one_trial_with_full_stride_writes_one_row_per_algorithm() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = momab(
        &["run", "--suite", "pareto", "--horizon", "50", "--record-every", "50", "--trials", "1", "--n-agents", "3", "--out", s(&out)],
        None,
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = read_traces(&out.join("traces.csv")).unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.t == 50 && r.trial == 0));
    let summary = read_summary(&out.join("summary.csv")).unwrap();
    assert!(summary.iter().all(|r| r.std == 0.0 && r.band == 0.0));
    for f in ["manifest.json", "regret_pareto.svg"] {
        assert!(out.join(f).is_file(), "{f} missing");
    }
    let m = RunManifest::read(&out.join("manifest.json")).unwrap();
    assert_eq!(m.config.n_agents, 3);
    assert!(m.finished_at.is_some());
    let svg = std::fs::read_to_string(out.join("regret_pareto.svg")).unwrap();
    for name in ["pareto_ucb_gossip", "pareto_ucb", "pareto_gossip"] {
        assert!(svg.contains(&format!(">{name}</text>")));
    }
}

#[test]
fn output_directory_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("from-env");
    let o = momab(&["run", "--suite", "nsw", "--horizon", "20", "--trials", "1"], Some(&out));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("traces.csv").is_file());
    assert!(out.join("regret_nsw.svg").is_file());
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"suite": "nsw", "horizon": 30, "trials": 1, "het-scale": 0.2, "algorithms": "no_sim"}"#).unwrap();
    let out = dir.path().join("o");
    let o = momab(&["run", "--config", s(&cfg), "--het-scale", "0", "--out", s(&out)], None);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let m = RunManifest::read(&out.join("manifest.json")).unwrap();
    assert_eq!(m.config.het_scale, 0.0);
    assert_eq!(m.config.horizon, 30);
    assert_eq!(m.algorithms.len(), 1);
}

#[test]
fn bad_input_exits_nonzero_naming_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"suite": "nsw", "horizn": 30}"#).unwrap();
    let o = momab(&["run", "--config", s(&cfg)], None);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("horizn"));

    let o = momab(&["run", "--suite", "nsw", "--trials", "0", "--out", s(dir.path())], None);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("trials"));

    let o = momab(&["run", "--config", s(&dir.path().join("missing.json"))], None);
    assert!(!o.status.success());

    let o = momab(&["run", "--suite", "nsw", "--algorithms", "pareto_ucb", "--out", s(dir.path())], None);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("algorithms"));
}

#[test]
fn manifest_replay_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let o = momab(&["run", "--suite", "nsw", "--horizon", "80", "--trials", "2", "--seed", "3", "--out", s(&a)], None);
    assert!(o.status.success());
    let o = momab(&["run", "--manifest", s(&a.join("manifest.json")), "--out", s(&b)], None);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["traces.csv", "summary.csv", "regret_nsw.svg"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn plot_and_check_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r");
    assert!(momab(&["run", "--suite", "pareto", "--horizon", "40", "--trials", "2", "--out", s(&out)], None).status.success());
    let svg = dir.path().join("again.svg");
    let o = momab(&["plot", "--summary", s(&out.join("summary.csv")), "--out", s(&svg)], None);
    assert!(o.status.success());
    assert!(std::fs::read_to_string(&svg).unwrap().contains("<polyline"));

    let o = momab(&["check"], None);
    assert!(o.status.success());
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.lines().count() >= 9 && !text.contains("FAIL"));
}
