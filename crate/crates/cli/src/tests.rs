use std::fs;

use sinkmech::Rational;
use sinkmech_amd::DualCertificate;
use sinkmech_experiments::experiment::RESULTS_HEADER;

use super::{execute, Execution};

fn mech(args: &[&str]) -> Execution {
    execute(["mech", "-q"].into_iter().chain(args.iter().copied()))
}

fn ok(args: &[&str]) -> String {
    let run = mech(args);
    assert_eq!(run.code, 0, "{args:?}: {}", run.stderr);
    run.stdout
}

#[test]
fn solve_prints_the_exact_optimum() {
    assert_eq!(ok(&["amd", "solve", "--n", "2", "--m", "2", "--k", "3", "--class", "randomized"]), "1/7 (≈0.142857)\n");
    let csv = ok(&["--format", "csv", "amd", "solve", "--k", "2"]);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("class,n,m,k,M,value,decimal,variables,rows,pivots"));
    assert!(lines.next().unwrap().starts_with("randomized,2,2,2,1,0,0.0,"));
    let float = ok(&["amd", "solve", "--k", "3", "--numeric", "float", "--class", "generalized-sink"]);
    assert!((float.trim().parse::<f64>().unwrap() - 0.25).abs() < 1e-9);
}

#[test]
fn bundled_certificate() {
    assert_eq!(ok(&["amd", "cert-verify", "--k", "3", "--cert", "bundled"]), "feasible, objective 1/7\n");

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert.txt");
    fs::write(&path, DualCertificate::appendix().scaled(&Rational::new(8.into(), 7.into())).to_text()).unwrap();
    let run = mech(&["amd", "cert-verify", "--cert", path.to_str().unwrap()]);
    assert_eq!(run.code, 1);
    assert!(run.stderr.contains("infeasible, objective 8/49"), "{}", run.stderr);

    fs::write(&path, "[lambda]\nnot a line\n").unwrap();
    assert_eq!(mech(&["amd", "cert-verify", "--cert", path.to_str().unwrap()]).code, 2);
    assert_eq!(mech(&["amd", "cert-verify", "--cert", "/nonexistent/cert.txt"]).code, 1);
}

#[test]
fn sweep_and_deterministic_search() {
    let table = ok(&["amd", "sweep", "--class", "generalized-sink", "--k-max", "3"]);
    assert!(table.contains("generalized-sink,3,1/4,0.25"), "{table}");
    let det = ok(&["amd", "det-search"]);
    assert!(det.starts_with("0\n65536 allocations enumerated"), "{det}");
    assert_eq!(mech(&["amd", "det-search", "--k", "3"]).code, 2);
}

#[test]
fn irrelevant_sink_manipulation_is_listed() {
    let csv = ok(&[
        "--format", "csv", "verify", "sp", "--mechanism", "irrelevant-sink", "--n", "3", "--m", "3", "--k", "3", "--M", "1",
        "--limit", "0",
    ]);
    assert_eq!(csv.lines().count(), 7099);
    assert!(csv.lines().any(|l| l.starts_with("sp,") && l.ends_with(",1/2 0 -1/2;-1/2 0 1/2;-1/2 0 1/2,3,0 -1/2 1/2,,1/3")));

    let text = ok(&["verify", "sp", "--mechanism", "mis", "--n", "3", "--m", "2", "--k", "3"]);
    assert_eq!(text, "mis: 0 violations\n");
}

#[test]
fn other_verifiers() {
    let bb = ok(&["--format", "json-lines", "verify", "bb", "--mechanism", "vcg", "--k", "3"]);
    let record: serde_json::Value = serde_json::from_str(bb.trim()).unwrap();
    assert_eq!(record["max_abs_surplus"], "1");
    assert_eq!(record["profile"], "-1/2 1/2;1/2 -1/2");
    assert!(ok(&["verify", "bb", "--mechanism", "nrs", "--n", "3"]).starts_with("largest |surplus| 0\n"));
    assert_eq!(ok(&["verify", "anon", "--mechanism", "nrs", "--n", "3"]), "nrs: 0 violations\n");
    let neutral = ok(&["verify", "neutral", "--mechanism", "constant", "--alternative", "2", "--m", "3", "--limit", "1"]);
    assert!(neutral.lines().count() == 3 && !neutral.starts_with("constant(2): 0 "), "{neutral}");
    let float = ok(&["verify", "wmon", "--mechanism", "irrelevant-sink", "--n", "3", "--m", "3", "--k", "2", "--numeric", "float"]);
    let exact = ok(&["verify", "wmon", "--mechanism", "irrelevant-sink", "--n", "3", "--m", "3", "--k", "2"]);
    assert_eq!(float.lines().next(), exact.lines().next());
}

#[test]
fn worst_cases() {
    let grid = ok(&["worstcase", "grid", "--mechanism", "single-sink", "--sink", "2", "--k", "3"]);
    assert!(grid.starts_with("1\n"), "{grid}");
    let sample = ok(&["--format", "csv", "worstcase", "grid", "--mechanism", "nrs", "--metric", "sample"]);
    assert!(sample.lines().nth(1).unwrap().contains(",1/4,0.25,"), "{sample}");

    let generator = ok(&["--format", "csv", "worstcase", "generator", "--kind", "many-alternatives", "--n", "3", "--m", "4", "--margin", "1/100"]);
    assert_eq!(generator.lines().filter(|l| l.contains(",99/100,")).count(), 3, "{generator}");
    let nrs = ok(&["worstcase", "generator", "--kind", "nrs", "--n", "4", "--margin", "0.001"]);
    assert!(nrs.contains("sample inefficiency approaches 1/8"), "{nrs}");
    assert_eq!(mech(&["worstcase", "generator", "--kind", "nrs", "--m", "3"]).code, 2);
    assert_eq!(mech(&["worstcase", "generator", "--kind", "single-sink", "--margin", "1/2"]).code, 2);
}

#[test]
fn run_on_a_profile_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("profile.txt");
    fs::write(&path, "# two agents\n2 2 1\n1/2 -1/2\n-1/2 1/2\n").unwrap();
    let p = path.to_str().unwrap();
    let vcg = ok(&["run", "--profile", p, "--mechanism", "vcg"]);
    assert!(vcg.contains("payments (1, 0)") && vcg.contains("largest |surplus| 1\n"), "{vcg}");
    let nrs = ok(&["--format", "csv", "run", "--profile", p, "--mechanism", "nrs"]);
    let mut lines: Vec<&str> = nrs.lines().collect();
    lines.sort_unstable();
    assert_eq!(lines, ["1/2,1,0 0,0", "1/2,2,0 0,0", "probability,alternative,payments,surplus"]);
    let affine = ok(&["run", "--profile", p, "--mechanism", "affine", "--weights", "1,2", "--numeric", "float"]);
    assert!(affine.contains("alternative 2"), "{affine}");

    assert_eq!(mech(&["run", "--profile", p, "--mechanism", "affine", "--weights", "1"]).code, 2);
    assert_eq!(mech(&["run", "--profile", p, "--mechanism", "single-sink", "--sink", "3"]).code, 2);
    fs::write(&path, "2 2 1\n1/2 -1/2\n").unwrap();
    assert_eq!(mech(&["run", "--profile", p]).code, 2);
    assert_eq!(mech(&["run", "--profile", "/nonexistent/profile.txt"]).code, 1);
}

#[test]
fn usage_errors() {
    assert_eq!(mech(&["bogus"]).code, 2);
    assert_eq!(mech(&["amd", "solve", "--frobnicate"]).code, 2);
    assert_eq!(mech(&["amd", "solve", "--M", "abc"]).code, 2);
    assert_eq!(mech(&["amd", "solve", "--M", "-1"]).code, 2);
    assert_eq!(mech(&["verify", "sp", "--n", "0"]).code, 2);
    assert_eq!(mech(&["--workers", "0", "amd", "solve"]).code, 2);
    assert_eq!(mech(&["amd", "solve", "--k", "5", "--budget", "100"]).code, 1);
}

#[test]
fn help_documents_every_subcommand() {
    let top = mech(&["--help"]);
    assert_eq!(top.code, 0);
    for sub in ["run", "worstcase", "verify", "amd", "experiment"] {
        assert!(top.stdout.contains(sub), "{sub}");
    }
    for path in [
        &["run"][..],
        &["worstcase", "grid"],
        &["worstcase", "generator"],
        &["verify", "sp"],
        &["verify", "wmon"],
        &["verify", "bb"],
        &["verify", "neutral"],
        &["verify", "anon"],
        &["amd", "solve"],
        &["amd", "sweep"],
        &["amd", "cert-verify"],
        &["amd", "det-search"],
        &["experiment", "run"],
        &["experiment", "plot"],
    ] {
        let mut args = path.to_vec();
        args.push("--help");
        let run = mech(&args);
        assert_eq!(run.code, 0, "{path:?}");
        assert!(run.stdout.contains("--format") && run.stdout.contains("--workers"), "{path:?}");
    }
}

#[test]
fn experiment_run_and_plot() {
    let data = tempfile::tempdir().unwrap();
    let jester = data.path().join("jester");
    fs::create_dir(&jester).unwrap();
    let rows: String = (0..40)
        .map(|u| {
            let cells: Vec<String> = (0..4).map(|i| format!("{:.2}", ((u * 7 + i * 3) % 21) as f64 - 10.0)).collect();
            format!("4,{}\n", cells.join(","))
        })
        .collect();
    fs::write(jester.join("jester-data-1.csv"), rows).unwrap();
    std::env::set_var("SINKMECH_DATA_DIR", data.path());

    let out = tempfile::tempdir().unwrap();
    let o = out.path().to_str().unwrap();
    let args = ["--format", "csv", "experiment", "run", "--dataset", "jester", "--sizes", "10,20", "--trials", "7", "--out", o];
    let first = ok(&args);
    assert_eq!(first.lines().next(), Some(RESULTS_HEADER));
    assert_eq!(first.lines().count(), 3);
    assert!(first.lines().nth(1).unwrap().starts_with("jester,10,7,"));
    let table = fs::read_to_string(out.path().join("results.csv")).unwrap();
    assert_eq!(ok(&args), first);
    assert_eq!(fs::read_to_string(out.path().join("results.csv")).unwrap(), table);
    assert!(!out.path().join("synthetic").exists());

    let chart = out.path().join("replot.svg");
    let plot = ok(&["experiment", "plot", "--results", out.path().join("results.csv").to_str().unwrap(), "--out", chart.to_str().unwrap()]);
    assert!(plot.contains("chart written to"));
    assert_eq!(fs::read_to_string(&chart).unwrap().matches("<polyline").count(), 3);

    assert_eq!(mech(&["experiment", "run", "--dataset", "jester", "--sizes", "50", "--out", o]).code, 2);
    assert_eq!(mech(&["experiment", "run", "--dataset", "jester", "--trials", "0", "--out", o]).code, 2);
    assert_eq!(mech(&["experiment", "run", "--dataset", "jester", "--M", "5", "--out", o]).code, 2);
    assert_eq!(mech(&["experiment", "plot", "--results", "/nonexistent/results.csv"]).code, 1);
}
