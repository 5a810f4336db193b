use std::fs;
use std::process::{Command, Output};

fn cbtc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cbtc"))
        .args(args)
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&cbtc(&["frobnicate"])), 2);
    assert_eq!(code(&cbtc(&["run", "--alpha", "nonsense"])), 2);
    assert_eq!(
        code(&cbtc(&["run", "--nodes", "20", "--opt", "teleport"])),
        2
    );
    assert_eq!(
        code(&cbtc(&[
            "run", "--nodes", "20", "--alpha", "5pi/6", "--opt", "asym"
        ])),
        2
    );
    assert_eq!(
        code(&cbtc(&["export", "--nodes", "20", "--format", "png"])),
        2
    );
    assert_eq!(code(&cbtc(&["--help"])), 0);
}

#[test]
fn generate_then_run_and_export() {
    let dir = tempfile::tempdir().unwrap();
    let topo = dir.path().join("t.json");
    let t = topo.to_str().unwrap();
    assert_eq!(
        code(&cbtc(&[
            "generate", "--seed", "5", "--nodes", "25", "-o", t
        ])),
        0
    );
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&topo).unwrap()).unwrap();
    assert_eq!(json["nodes"].as_array().unwrap().len(), 25);
    assert_eq!(json["max_range"], 500.0);

    let log = dir.path().join("log.csv");
    let run = cbtc(&[
        "run",
        "--topology",
        t,
        "--alpha",
        "2pi/3",
        "--opt",
        "shrink-back,asym,pairwise",
        "--removal-log",
        log.to_str().unwrap(),
    ]);
    assert_eq!(code(&run), 0);
    let edges = String::from_utf8(run.stdout).unwrap();
    assert!(edges.starts_with("u,v,distance\n"));
    assert!(fs::read_to_string(&log)
        .unwrap()
        .starts_with("u,v,reason,stage\n"));

    let svg = |n: &str| {
        let p = dir.path().join(n);
        let o = cbtc(&[
            "export",
            "--topology",
            t,
            "--format",
            "svg",
            "--opt",
            "shrink-back",
            "--set",
            "e-alpha-s",
            "-o",
            p.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0);
        fs::read(p).unwrap()
    };
    assert_eq!(svg("a.svg"), svg("b.svg"));
    let dot = cbtc(&[
        "export",
        "--topology",
        t,
        "--format",
        "dot",
        "--set",
        "n-alpha",
    ]);
    assert!(String::from_utf8(dot.stdout)
        .unwrap()
        .starts_with("digraph"));
    let same = cbtc(&["export", "--topology", t, "--format", "json"]);
    assert_eq!(same.stdout, fs::read(&topo).unwrap());
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(
        &cfg,
        r#"{"network_count": 2, "node_count": 15, "base_seed": 9}"#,
    )
    .unwrap();
    let c = cfg.to_str().unwrap();
    let out = cbtc(&["--config", c, "table1"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("regime,alpha,mean_degree,mean_radius,networks,seed\n"));
    assert!(text.lines().skip(1).all(|l| l.ends_with(",2,9")));
    let over = String::from_utf8(
        cbtc(&["--config", c, "table1", "--networks", "3", "--seed", "4"]).stdout,
    )
    .unwrap();
    assert!(over.lines().skip(1).all(|l| l.ends_with(",3,4")));
}

#[test]
fn table1_is_byte_identical_across_runs_and_paths() {
    let args = ["table1", "--networks", "4", "--nodes", "40", "--seed", "3"];
    let a = cbtc(&args);
    let b = cbtc(&args);
    let mut seq = args.to_vec();
    seq.push("--sequential");
    let c = cbtc(&seq);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn counterexample_disconnect_passes_and_writes_dot() {
    let dir = tempfile::tempdir().unwrap();
    let o = cbtc(&[
        "counterexample",
        "disconnect",
        "--dot-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().all(|l| l.starts_with("PASS")));
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 3);
}

#[test]
fn reconfig_reports_assertion_failures_with_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let topo = dir.path().join("t.json");
    let tl = dir.path().join("tl.json");
    let (t, events) = cbtc_sim::reconfig::partition_scenario(5.0).unwrap();
    fs::write(&topo, cbtc_sim::export::topology_json(&t).unwrap()).unwrap();
    fs::write(&tl, serde_json::to_string(&events).unwrap()).unwrap();
    let trace = dir.path().join("trace.jsonl");
    let base = [
        "reconfig",
        tl.to_str().unwrap(),
        "--topology",
        topo.to_str().unwrap(),
        "--opt",
        "shrink-back",
        "--horizon",
        "40",
    ];
    let mut good = base.to_vec();
    good.extend(["--trace", trace.to_str().unwrap()]);
    assert_eq!(code(&cbtc(&good)), 0);
    assert!(fs::read_to_string(&trace).unwrap().lines().count() > 10);
    let mut bad = base.to_vec();
    bad.extend(["--policy", "shrunk"]);
    assert_eq!(code(&cbtc(&bad)), 3);
    let mut short = base.to_vec();
    short[7] = "6";
    assert_eq!(code(&cbtc(&short)), 2);
}
