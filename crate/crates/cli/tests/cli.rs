use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn biclab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_biclab"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn k33(dir: &Path) {
    let mut text = String::new();
    for u in ["a", "b", "c"] {
        for v in ["x", "y", "z"] {
            text.push_str(&format!("{u} {v}\n"));
        }
    }
    fs::write(dir.join("k33.txt"), text).unwrap();
}

const CONFIG: &str = r#"{
  "generator": {"kind": "powerlaw", "u_pool": 60, "v_pool": 120, "w_observations": 100, "exponent": 2.0},
  "instance_count": 200,
  "seed": 11,
  "z_values": [3, 4],
  "budget": {"max_combinations": 1000000}
}"#;

#[test]
fn solve_finds_k33() {
    let dir = tempfile::tempdir().unwrap();
    k33(dir.path());
    let out = biclab(dir.path(), &["solve", "k33.txt", "--z", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("outcome: found\nweight: 3\n"), "{text}");
    assert!(text.contains("v_labels: x y z"));
    // The resolved configuration goes to stderr.
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("# biclab solve {"));
}

#[test]
fn solve_rules_out_oversized_z_for_free() {
    let dir = tempfile::tempdir().unwrap();
    k33(dir.path());
    let out = biclab(dir.path(), &["-q", "solve", "k33.txt", "--z", "9"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("combinations_explored: 0\n"));
    assert!(out.stderr.is_empty());
}

#[test]
fn solve_decision_and_max_weight() {
    let dir = tempfile::tempdir().unwrap();
    k33(dir.path());
    let yes = biclab(dir.path(), &["solve", "k33.txt", "--z", "2", "--t", "3"]);
    assert_eq!(yes.status.code(), Some(0));
    assert!(stdout(&yes).starts_with("verdict: yes\n"));
    let no = biclab(dir.path(), &["solve", "k33.txt", "--z", "2", "--t", "4"]);
    assert_eq!(no.status.code(), Some(1));
    let mw = biclab(
        dir.path(),
        &["solve", "k33.txt", "--z", "2", "--max-weight"],
    );
    assert_eq!(mw.status.code(), Some(0));
    assert!(stdout(&mw).contains("weight: 3\n"));
}

#[test]
fn solve_reports_unknown_when_budget_runs_out() {
    let dir = tempfile::tempdir().unwrap();
    // Two disjoint stars: no pair of v vertices shares two u neighbours,
    // so z = 3 fails, but only after exploring more than one candidate.
    let text = "a x\nb x\nc y\nd y\ne z\nf z\n";
    fs::write(dir.path().join("g.txt"), text).unwrap();
    let out = biclab(
        dir.path(),
        &[
            "solve",
            "g.txt",
            "--z",
            "3",
            "--budget",
            "1",
            "--no-guarantee-check",
        ],
    );
    assert_eq!(out.status.code(), Some(2), "{}", stdout(&out));
    assert!(stdout(&out).contains("budget_exhausted: true"));
}

#[test]
fn usage_and_io_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        biclab(dir.path(), &["solve", "--bogus"]).status.code(),
        Some(64)
    );
    assert_eq!(biclab(dir.path(), &[]).status.code(), Some(64));
    assert_eq!(biclab(dir.path(), &["--help"]).status.code(), Some(0));
    assert_eq!(
        biclab(dir.path(), &["solve", "missing.txt", "--z", "2"])
            .status
            .code(),
        Some(74)
    );
    k33(dir.path());
    assert_eq!(
        biclab(dir.path(), &["solve", "k33.txt", "--z", "1"])
            .status
            .code(),
        Some(64)
    );
    assert_eq!(
        biclab(
            dir.path(),
            &["solve", "k33.txt", "--z", "2", "--budget", "0"]
        )
        .status
        .code(),
        Some(64)
    );
    fs::write(dir.path().join("bad.txt"), "a b c\n").unwrap();
    assert_eq!(
        biclab(dir.path(), &["solve", "bad.txt", "--z", "2"])
            .status
            .code(),
        Some(65)
    );
}

#[test]
fn help_documents_flags() {
    let dir = tempfile::tempdir().unwrap();
    let out = biclab(dir.path(), &["solve", "--help"]);
    let text = stdout(&out);
    for flag in [
        "--z",
        "--t",
        "--max-weight",
        "--budget",
        "--no-guarantee-check",
        "--seed",
        "--output",
    ] {
        assert!(text.contains(flag), "missing {flag}");
    }
}

#[test]
fn sweep_is_identical_across_runs_and_jobs() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("cfg.json"), CONFIG).unwrap();
    let mut files = Vec::new();
    for (run, jobs) in [(0, "1"), (1, "1"), (2, "8"), (3, "8")] {
        let name = format!("s{run}.csv");
        let out = biclab(
            dir.path(),
            &["-q", "-o", &name, "sweep", "cfg.json", "--jobs", jobs],
        );
        assert_eq!(out.status.code(), Some(0));
        files.push(fs::read(dir.path().join(name)).unwrap());
    }
    assert!(files[0]
        .starts_with(b"z,bin_low,bin_high,n,n_unknown,cost_p25,cost_p50,cost_p90,p_solvable\n"));
    assert!(files.iter().all(|f| f == &files[0]));
}

#[test]
fn seed_flag_overrides_config_seed() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("cfg.json"), CONFIG).unwrap();
    let a = stdout(&biclab(
        dir.path(),
        &["-q", "--seed", "1", "dsweep", "cfg.json", "--d=-1,0,1"],
    ));
    let b = stdout(&biclab(
        dir.path(),
        &["-q", "--seed", "2", "dsweep", "cfg.json", "--d=-1,0,1"],
    ));
    let c = stdout(&biclab(
        dir.path(),
        &["-q", "--seed", "1", "dsweep", "cfg.json", "--d=-1,0,1"],
    ));
    assert_eq!(a, c);
    assert_ne!(a, b);
    assert!(a.starts_with("d,n,mean_cost\n-1,"));
}

#[test]
fn pipeline_gen_label_train_eval() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let cfg = CONFIG.replace("\"instance_count\": 200", "\"instance_count\": 40");
    fs::write(d.join("cfg.json"), cfg).unwrap();
    assert_eq!(
        biclab(d, &["-q", "-o", "inst", "gen", "cfg.json"])
            .status
            .code(),
        Some(0)
    );
    let mut graphs: Vec<String> = fs::read_dir(d.join("inst"))
        .unwrap()
        .map(|e| format!("inst/{}", e.unwrap().file_name().to_string_lossy()))
        .collect();
    graphs.sort();
    assert_eq!(graphs.len(), 40);
    assert_eq!(graphs[0], "inst/instance_0000.txt");

    let mut args = vec!["-q", "-o", "features.csv", "features"];
    args.extend(graphs.iter().map(String::as_str));
    assert_eq!(biclab(d, &args).status.code(), Some(0));
    let features = fs::read_to_string(d.join("features.csv")).unwrap();
    assert_eq!(features.lines().count(), 41);
    assert!(features.lines().nth(1).unwrap().ends_with(",UNLABELED"));

    // A tiny budget splits the ensemble into both classes.
    let mut args = vec!["-q", "-o", "labeled.csv", "label", "--budget", "60"];
    args.extend(graphs.iter().map(String::as_str));
    assert_eq!(biclab(d, &args).status.code(), Some(0));
    let labeled = fs::read_to_string(d.join("labeled.csv")).unwrap();
    assert!(
        labeled.contains(",HARD\n") && labeled.contains(",EASY\n"),
        "{labeled}"
    );

    let out = biclab(
        d,
        &[
            "-q",
            "--seed",
            "3",
            "train",
            "labeled.csv",
            "--tree",
            "tree.txt",
            "--tree-json",
            "tree.json",
            "--folds",
            "4",
        ],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report = stdout(&out);
    assert!(report.contains("valid_accuracy: "), "{report}");
    assert!(report.contains("cv_folds: 4"));
    assert!(report.contains("rules:\n"));

    for tree in ["tree.txt", "tree.json"] {
        let out = biclab(
            d,
            &[
                "-q",
                "eval",
                "--tree",
                tree,
                "labeled.csv",
                "--roc",
                "roc.csv",
                "--pr",
                "pr.csv",
            ],
        );
        assert_eq!(out.status.code(), Some(0));
        assert!(stdout(&out).starts_with("n: 40\naccuracy: "));
        let roc = fs::read_to_string(d.join("roc.csv")).unwrap();
        assert!(roc.starts_with("threshold,fpr,tpr\ninf,0,0\n"));
        assert!(roc.trim_end().ends_with(",1,1"));
        assert!(fs::read_to_string(d.join("pr.csv"))
            .unwrap()
            .starts_with("threshold,recall,precision\n"));
    }
}

#[test]
fn shipped_configs_are_valid() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    for name in ["powerlaw.json", "uniform.json"] {
        let text = fs::read_to_string(root.join(name)).unwrap();
        let cfg = bicliquelab::phaselab::EnsembleConfig::from_json(&text);
        assert!(cfg.is_ok(), "{name}: {:?}", cfg.err());
    }
}
