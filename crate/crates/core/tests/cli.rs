use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fdrcurve::cli::{main_with_args, EXIT_DATA, EXIT_OK, EXIT_VALIDATION};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_fdrcurve"));
    c.env_remove("FDRCURVE_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

const MATRIX: &str = "gene,a1,a2,a3,b1,b2,b3
g1,5.0,5.2,4.9,7.1,7.3,6.9
g2,3.0,3.1,2.9,3.0,3.2,2.8
g3,8.0,8.4,7.9,8.1,8.3,7.7
g4,2.0,2.1,1.8,4.2,4.4,4.1
g5,6.0,6.3,5.8,6.1,6.2,5.9
g6,1.0,1.0,1.0,1.0,1.0,1.0
g7,4.4,4.6,4.1,4.5,4.3,NA
";

#[test]
fn qstar_touches_at_the_constraint() {
    let o = run(&[
        "qstar",
        "--constraints",
        "0:0.1",
        "--family",
        "gaussian",
        "--m",
        "100",
        "--grid",
        "-1:1:41",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "theta,q,q_star");
    assert_eq!(lines.len(), 42);
    assert!(lines.contains(&"0,0.1,0.1"));
    assert!(lines.contains(&"-1,1,1"));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["bogus"]).status.code(), Some(EXIT_VALIDATION));
    assert_eq!(
        run(&["qstar", "--constraints", "0:1.5", "--m", "3"])
            .status
            .code(),
        Some(EXIT_VALIDATION)
    );
    assert_eq!(
        run(&["qstar", "--constraints", "0:0.1"]).status.code(),
        Some(EXIT_VALIDATION)
    );
    assert_eq!(
        run(&[
            "qstar",
            "--constraints",
            "0:0.1",
            "--m",
            "3",
            "--grid",
            "1:0:3"
        ])
        .status
        .code(),
        Some(EXIT_VALIDATION)
    );
    assert_eq!(
        run(&[
            "qstar",
            "--constraints",
            "0:0.1",
            "--m",
            "3",
            "--family",
            "cauchy"
        ])
        .status
        .code(),
        Some(EXIT_VALIDATION)
    );
    assert_eq!(
        run(&["test", "--constraints", "0:0.1"]).status.code(),
        Some(EXIT_VALIDATION)
    );
    assert_eq!(
        run(&[
            "test",
            "--constraints",
            "0:0.1",
            "--statistics",
            "/nonexistent/stats.csv"
        ])
        .status
        .code(),
        Some(EXIT_DATA)
    );
    assert_eq!(run(&["--help"]).status.code(), Some(EXIT_OK));
    assert_eq!(
        main_with_args(["fdrcurve", "qstar", "--constraints", "x"]),
        EXIT_VALIDATION
    );
}

#[test]
fn malformed_data_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let stats = write(dir.path(), "s.csv", "value\n1\n2\n");
    let o = run(&[
        "test",
        "--constraints",
        "0:0.1",
        "--statistics",
        stats.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(EXIT_DATA));
    let m = write(dir.path(), "m.csv", "gene,a1,b1\ng1,1,2\n");
    let o = run(&[
        "summarize",
        "--matrix",
        m.to_str().unwrap(),
        "--groups",
        "A,B",
    ]);
    assert_eq!(o.status.code(), Some(EXIT_DATA));
    let t = write(dir.path(), "t.csv", "x,p\n0,0.5\n");
    let fam = format!("tabulated:{}", t.display());
    let o = run(&[
        "qstar",
        "--constraints",
        "0:0.1",
        "--m",
        "4",
        "--family",
        &fam,
    ]);
    assert_eq!(o.status.code(), Some(EXIT_DATA));
}

#[test]
fn test_command_from_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "m.csv", MATRIX);
    let out = dir.path().join("run");
    let o = run(&[
        "test",
        "--matrix",
        m.to_str().unwrap(),
        "--groups",
        "A,A,A,B,B,B",
        "--mode",
        "snr",
        "--constraints",
        "-1:0.2,0:0.1",
        "--reference-rejections",
        "5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("rejections.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "index,x,normalized_pvalue,selected");
    // g6 has zero variance, g7 a missing value
    assert_eq!(lines.len(), 6);
    let summary = read_json(&out.join("rejections.json"));
    assert_eq!(summary["m"], 5);
    let manifest = read_json(&out.join("manifest.json"));
    assert_eq!(manifest["command"], "test");
    assert_eq!(manifest["input"]["dropped"]["non_numeric"], 1);
    assert_eq!(manifest["input"]["dropped"]["zero_variance"], 1);
    assert_eq!(manifest["input"]["orientation"], "A-B");
    let rejections = manifest["rejections"].as_i64().unwrap();
    assert_eq!(manifest["discrepancy"].as_i64().unwrap(), rejections - 5);
    // the raised genes g1 and g4 are found
    assert!(rejections >= 2);
    let selected: Vec<&str> = lines[1..]
        .iter()
        .filter(|l| l.ends_with(",1"))
        .cloned()
        .collect();
    assert!(
        selected.iter().any(|l| l.starts_with("1,"))
            && selected.iter().any(|l| l.starts_with("4,"))
    );
    assert!(std::fs::read_to_string(out.join("curve.csv"))
        .unwrap()
        .starts_with("theta,q,q_star\n"));

    // flipping the sign moves the raised genes away from the rejection side
    let flipped = dir.path().join("flip");
    let o = run(&[
        "test",
        "--matrix",
        m.to_str().unwrap(),
        "--groups",
        "A,A,A,B,B,B",
        "--mode",
        "snr",
        "--constraints",
        "-1:0.2,0:0.1",
        "--flip-sign",
        "--out",
        flipped.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert_eq!(read_json(&flipped.join("manifest.json"))["rejections"], 0);
}

#[test]
fn test_command_from_statistics_and_group_file() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "m.tsv", &MATRIX.replace(',', "\t"));
    let g = write(
        dir.path(),
        "groups.csv",
        "sample,group\nb1,B\nb2,B\nb3,B\na1,A\na2,A\na3,A\n",
    );
    let summarize = run(&[
        "summarize",
        "--matrix",
        m.to_str().unwrap(),
        "--groups-file",
        g.to_str().unwrap(),
    ]);
    assert!(summarize.status.success());
    let summary = stdout(&summarize);
    assert!(
        summary.starts_with("gene_id,x,sigma_hat\ng1,2.06666666667,"),
        "{summary}"
    );
    let stats = write(dir.path(), "summary.csv", &summary);

    let via_stats = run(&[
        "test",
        "--statistics",
        stats.to_str().unwrap(),
        "--mode",
        "effect-size",
        "--constraints",
        "0:0.1",
    ]);
    let via_matrix = run(&[
        "test",
        "--matrix",
        m.to_str().unwrap(),
        "--groups-file",
        g.to_str().unwrap(),
        "--mode",
        "effect-size",
        "--constraints",
        "0:0.1",
    ]);
    assert!(via_stats.status.success() && via_matrix.status.success());
    // the summary file carries 12 significant digits
    let (a, b) = (stdout(&via_stats), stdout(&via_matrix));
    assert_eq!(a.lines().count(), b.lines().count());
    for (la, lb) in a.lines().zip(b.lines()).skip(1) {
        let fa: Vec<&str> = la.split(',').collect();
        let fb: Vec<&str> = lb.split(',').collect();
        assert_eq!((fa[0], fa[1], fa[3]), (fb[0], fb[1], fb[3]));
        let (pa, pb): (f64, f64) = (fa[2].parse().unwrap(), fb[2].parse().unwrap());
        assert!((pa - pb).abs() <= 1e-8 * pb.abs());
    }

    // plain statistics use the shared family as given
    let plain = write(dir.path(), "plain.csv", "x\n-4\n-3.5\n0.2\n1\n");
    let o = run(&[
        "test",
        "--statistics",
        plain.to_str().unwrap(),
        "--constraints",
        "0:0.1",
    ]);
    let text = stdout(&o);
    assert!(text.lines().nth(1).unwrap().ends_with(",1"));
    assert!(text.lines().nth(4).unwrap().ends_with(",0"));
    let o = run(&[
        "test",
        "--statistics",
        plain.to_str().unwrap(),
        "--constraints",
        "0:0.1",
        "--mode",
        "snr",
    ]);
    assert_eq!(o.status.code(), Some(EXIT_VALIDATION));
}

#[test]
fn select_constraints_needs_no_statistics() {
    let o = run(&[
        "select-constraints",
        "--constraints",
        "-0.27:0.2,0:0.1,0.26:0.05",
        "--m",
        "3170",
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["method"], "minimal");
    assert_eq!(v["selected"].as_array().unwrap().len(), 3);
    for j in v["jumps"].as_array().unwrap() {
        assert!((j["q_star"].as_f64().unwrap() - j["q"].as_f64().unwrap()).abs() < 1e-9);
    }

    let o = run(&[
        "select-constraints",
        "--constraints",
        "0:0.1,1:0.09",
        "--m",
        "20",
        "--method",
        "greedy",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["selected"], serde_json::json!([{"theta": 0.0, "q": 0.1}]));
    assert_eq!(v["jumps"][1]["selected"], false);
    assert!(v["jumps"][1]["q_star_selected"].as_f64().unwrap() <= 0.09);

    let dir = tempfile::tempdir().unwrap();
    let scales = write(
        dir.path(),
        "scales.csv",
        "gene_id,x,sigma_hat\na,0.1,0.2\nb,0.3,0.3\nc,-1,0.25\n",
    );
    let o = run(&[
        "select-constraints",
        "--constraints",
        "-0.07:0.2,0:0.1,0.07:0.05",
        "--scales",
        scales.to_str().unwrap(),
        "--mode",
        "effect-size",
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["m"], 3);
    let o = run(&[
        "select-constraints",
        "--constraints",
        "0:0.1",
        "--scales",
        scales.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(EXIT_VALIDATION));
}

#[test]
fn simulate_outputs_and_reproducibility() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "sim.json",
        r#"{"constraints":"0:0.1","thetas":"10*0,10*-3","replications":300,"seed":11,"grid":"-1:1:5"}"#,
    );
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let o = run(&[
            "simulate",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for name in ["estimate.csv", "manifest.json"] {
        assert_eq!(
            std::fs::read(a.join(name)).unwrap(),
            std::fs::read(b.join(name)).unwrap()
        );
    }
    let est = std::fs::read_to_string(a.join("estimate.csv")).unwrap();
    let lines: Vec<&str> = est.lines().collect();
    assert_eq!(
        lines[0],
        "theta,q,q_star,fdr_hat,std_err,lower_exact,lower_exp"
    );
    assert_eq!(lines.len(), 6);
    // lower bounds only left of the jump
    assert!(!lines[1].ends_with(",,"));
    assert!(lines[3].ends_with(",,"));
    let manifest = read_json(&a.join("manifest.json"));
    assert_eq!(manifest["seed"], 11);
    assert_eq!(manifest["replications"], 300);
    assert_eq!(manifest["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(manifest["config_hash"].as_str().unwrap().len(), 64);

    // flags override the file
    let c = dir.path().join("c");
    let o = run(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--seed",
        "12",
        "--out",
        c.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let other = read_json(&c.join("manifest.json"));
    assert_eq!(other["seed"], 12);
    assert_ne!(other["config_hash"], manifest["config_hash"]);
}

#[test]
fn seed_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let o = bin()
        .env("FDRCURVE_SEED", "99")
        .args([
            "simulate",
            "--constraints",
            "0:0.1",
            "--thetas",
            "5*0",
            "--replications",
            "10",
        ])
        .args(["--out", out.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(read_json(&out.join("manifest.json"))["seed"], 99);
    let o = bin()
        .env("FDRCURVE_SEED", "abc")
        .args(["simulate", "--constraints", "0:0.1", "--thetas", "5*0"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(EXIT_VALIDATION));
}
