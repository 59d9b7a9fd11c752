use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use infodiff::events::DensitySurface;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_infodiff")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).to_string_lossy().into_owned()
}

fn chain_inputs(dir: &Path) {
    fs::write(dir.join("graph.csv"), "follower,followee\nb,a\nc,b\n").unwrap();
    fs::write(
        dir.join("votes.csv"),
        "story_id,user_id,timestamp\ns1,a,0\ns1,b,1800\ns1,c,5400\n",
    )
    .unwrap();
}

fn read_surface(path: &str) -> DensitySurface {
    DensitySurface::read_csv(fs::File::open(path).unwrap()).unwrap()
}

#[test]
fn chain_cascade_density() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    chain_inputs(d);
    let args = [
        "density", "--graph", &p(d, "graph.csv"), "--votes", &p(d, "votes.csv"), "--story", "s1",
        "--max-distance", "2", "--horizon", "2", "--out-dir", &p(d, "out"),
    ];
    ok(&args);
    let s = read_surface(&p(d, "out/density.csv"));
    assert_eq!(s.distances(), &[1, 2]);
    assert_eq!(s.rows(), &[vec![100.0, 100.0], vec![0.0, 100.0]]);
    let manifest = fs::read_to_string(d.join("out/manifest.json")).unwrap();
    assert!(manifest.contains("\"subcommand\": \"density\""));
    assert!(d.join("out/partition_sizes.csv").exists());
    assert!(d.join("out/diagnostics.json").exists());
}

#[test]
fn horizon_one_gives_single_column() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    chain_inputs(d);
    ok(&[
        "density", "--graph", &p(d, "graph.csv"), "--votes", &p(d, "votes.csv"), "--story", "s1",
        "--max-distance", "2", "--horizon", "1", "--out-dir", &p(d, "out"),
    ]);
    let header = fs::read_to_string(d.join("out/density.csv")).unwrap();
    assert_eq!(header.lines().next().unwrap(), "distance,t1");
}

#[test]
fn input_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    chain_inputs(d);
    let out = run(&[
        "density", "--graph", &p(d, "graph.csv"), "--votes", &p(d, "votes.csv"), "--story",
        "missing", "--out-dir", &p(d, "out"),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());

    fs::write(d.join("bad.csv"), "distance,t2,t3\n1,1,2\n").unwrap();
    fs::write(d.join("params.toml"), "d = 0.01\nK = 25.0\nr = { a = 1.4, b = 1.5, c = 0.25 }\n")
        .unwrap();
    let out = run(&[
        "predict", "--density", &p(d, "bad.csv"), "--params", &p(d, "params.toml"), "--out-dir",
        &p(d, "pred"),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

fn reference_inputs(d: &Path, rows: &[(u32, f64)]) {
    let mut csv = String::from("distance,t1,t2\n");
    for (x, v) in rows {
        csv.push_str(&format!("{x},{v},{v}\n"));
    }
    fs::write(d.join("density.csv"), csv).unwrap();
    fs::write(d.join("params.toml"), "d = 0.01\nK = 25.0\n\n[r]\na = 1.4\nb = 1.5\nc = 0.25\n")
        .unwrap();
}

#[test]
fn predict_with_reference_parameters_stays_below_capacity() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    reference_inputs(d, &[(1, 6.0), (2, 2.5), (3, 1.0), (4, 0.5), (5, 0.3), (6, 0.2)]);
    ok(&[
        "predict", "--density", &p(d, "density.csv"), "--params", &p(d, "params.toml"),
        "--out-dir", &p(d, "pred"),
    ]);
    let s = read_surface(&p(d, "pred/solution.csv"));
    assert_eq!(s.horizon(), 6);
    assert!(s.rows().iter().flatten().all(|&v| (0.0..=25.0).contains(&v)));
    for row in s.rows() {
        assert!(row.windows(2).all(|w| w[1] >= w[0]));
    }
    let props = fs::read_to_string(d.join("pred/properties.json")).unwrap();
    assert!(props.contains("\"passed\": true"));
    assert!(d.join("pred/admissibility.json").exists());
    assert!(d.join("pred/solution_grid.csv").exists());
}

#[test]
fn uniform_slice_follows_logistic() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    reference_inputs(d, &[(1, 5.0), (2, 5.0), (3, 5.0)]);
    ok(&[
        "predict", "--density", &p(d, "density.csv"), "--params", &p(d, "params.toml"),
        "--dt", "0.001", "--out-dir", &p(d, "pred"),
    ]);
    let s = read_surface(&p(d, "pred/solution.csv"));
    for t in 1..=6u32 {
        let big_r = 1.4 / 1.5 * (1.0 - (-1.5 * (t as f64 - 1.0)).exp()) + 0.25 * (t as f64 - 1.0);
        let exact = 25.0 / (1.0 + (25.0 / 5.0 - 1.0) * (-big_r).exp());
        for x in 1..=3 {
            let v = s.value(x, t).unwrap();
            assert!((v - exact).abs() <= 1e-4 * exact, "x={x} t={t}: {v} vs {exact}");
        }
    }
}

#[test]
fn evaluate_identical_surfaces_is_exactly_100() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let csv = "distance,t1,t2,t3,t4,t5,t6\n1,1,2,3,4,5,6\n2,0.5,1,1.5,2,2.5,3\n";
    fs::write(d.join("s.csv"), csv).unwrap();
    let out = ok(&[
        "evaluate", "--predicted", &p(d, "s.csv"), "--observed", &p(d, "s.csv"), "--out-dir",
        &p(d, "eval"),
    ]);
    let table = String::from_utf8(out.stdout).unwrap();
    let header: Vec<&str> = table.lines().next().unwrap().split('|').map(str::trim).collect();
    assert_eq!(header[1..8], ["Distance", "Average", "t = 2", "t = 3", "t = 4", "t = 5", "t = 6"]);
    assert!(table.contains("Overall average: 100.00%"));
    let json = fs::read_to_string(d.join("eval/report.json")).unwrap();
    assert!(json.contains("\"overall\": 100.0"));
}

#[test]
fn simulate_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&["gen-graph", "--kind", "watts-strogatz", "--n", "120", "--seed", "4", "--out-dir", &p(d, "g")]);
    for run_dir in ["a", "b"] {
        ok(&[
            "simulate", "--graph", &p(d, "g/graph.csv"), "--seed", "17", "--horizon", "12",
            "--out-dir", &p(d, run_dir),
        ]);
    }
    let a = fs::read(d.join("a/votes.csv")).unwrap();
    let b = fs::read(d.join("b/votes.csv")).unwrap();
    assert_eq!(a, b);
    assert!(a.len() > 40);
    let ma = fs::read_to_string(d.join("a/manifest.json")).unwrap();
    assert!(ma.contains("votes.csv"));
}

#[test]
fn fit_writes_parameters_inside_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    reference_inputs(d, &[(1, 6.0), (2, 2.5), (3, 1.0), (4, 0.5), (5, 0.3)]);
    ok(&[
        "predict", "--density", &p(d, "density.csv"), "--params", &p(d, "params.toml"),
        "--out-dir", &p(d, "pred"),
    ]);
    fs::write(
        d.join("bounds.toml"),
        "d = [0.0, 0.1]\nK = [10.0, 50.0]\na = [0.0, 3.0]\nb = [0.0, 3.0]\nc = [0.0, 1.0]\n",
    )
    .unwrap();
    ok(&[
        "fit", "--density", &p(d, "pred/solution.csv"), "--bounds", &p(d, "bounds.toml"),
        "--max-evals", "120", "--out-dir", &p(d, "fit"),
    ]);
    let text = fs::read_to_string(d.join("fit/fitted_params.toml")).unwrap();
    let v: toml::Value = toml::from_str(&text).unwrap();
    let k = v["K"].as_float().unwrap();
    assert!((10.0..=50.0).contains(&k));
    let diag: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d.join("fit/fit_diagnostics.json")).unwrap())
            .unwrap();
    assert!(diag["evaluations"].as_u64().unwrap() <= 120);
}
