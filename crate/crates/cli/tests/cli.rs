use std::fs;

use mscs_cli::run;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("mscs").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

#[test]
fn stats_prints_reciprocity() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.txt");
    fs::write(&path, "1 2\n2 1\n2 3\n").unwrap();
    let (code, out, _) = call(&["stats", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.contains("reciprocal_fraction 0.6667"), "{out}");
    assert!(out.contains("edge_count 3"));
}

#[test]
fn stats_writes_distributions() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.txt");
    let csv = dir.path().join("d.csv");
    fs::write(&path, "1 2\n2 1\n2 3\n3 3\n").unwrap();
    let (code, out, _) = call(&[
        "stats",
        path.to_str().unwrap(),
        "--bins",
        "5",
        "--distributions",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("1 self-loops"));
    let text = fs::read_to_string(csv).unwrap();
    assert_eq!(text.lines().count(), 1 + 4 * 5);
    assert!(text.starts_with("measure,bin,left,right,probability\n"));
}

#[test]
fn usage_errors_exit_one() {
    let (code, _, err) = call(&[]);
    assert_eq!(code, 1);
    assert!(err.contains("Usage"));
    let (code, _, err) = call(&["frobnicate"]);
    assert_eq!(code, 1);
    assert!(err.contains("frobnicate"));
    let (code, _, _) = call(&["sample", "--strategy", "nope", "--graph", "x"]);
    assert_eq!(code, 1);
}

#[test]
fn help_exits_zero() {
    let (code, out, _) = call(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("experiment"));
}

#[test]
fn missing_config_exits_two() {
    let (code, _, err) = call(&["experiment", "/no/such/dir/exp.cfg"]);
    assert_eq!(code, 2);
    assert!(err.contains("No such file"), "{err}");
}

#[test]
fn generate_then_sample() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("pa.txt");
    let (code, _, _) = call(&[
        "generate",
        "pa:n=300,m=3",
        "--seed",
        "5",
        "-o",
        graph.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);

    let args = [
        "sample",
        "--graph",
        graph.to_str().unwrap(),
        "--target-size",
        "15",
        "--max-stages",
        "4",
        "--seed",
        "3",
    ];
    let (code, first, _) = call(&args);
    assert_eq!(code, 0);
    let (_, second, _) = call(&args);
    assert_eq!(first, second);
    assert_eq!(first.lines().count(), 1 + 5);

    let out = dir.path().join("run");
    let (code, _, err) = call(&[
        "sample",
        "--generate",
        "uniform:n=100,p=0.05,seed=2",
        "--strategy",
        "random",
        "--prune",
        "5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(err.starts_with("pruned "));
    assert!(out.join("trajectory.csv").exists());
    assert!(out.join("sample.txt").exists());
}

#[test]
fn experiment_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.cfg");
    fs::write(
        &cfg,
        "generate = pa:n=800,m=3,seed=1\nreplications = 2\nfractions = 0.05, 0.1\ntarget_size = 10\nout = results\n",
    )
    .unwrap();
    let (code, out, err) = call(&["experiment", cfg.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("crossover kbins vs random"));
    for f in [
        "trajectories.csv",
        "aggregate.csv",
        "crossover.csv",
        "plot.gp",
    ] {
        assert!(dir.path().join("results").join(f).exists(), "{f}");
    }
}

#[test]
fn bad_config_value_is_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.cfg");
    fs::write(&cfg, "generate = pa:n=100,m=3\nreplications = many\n").unwrap();
    let (code, _, err) = call(&["experiment", cfg.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("line 2"), "{err}");
}
