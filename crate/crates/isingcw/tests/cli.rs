use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use isingcw::formats::{model_to_json, parse_model};
use isingcw_core::{Graph, IsingModel};
use tempfile::TempDir;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn isingcw(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_isingcw")).args(args).output().unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn models_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../models")
}

fn model_arg(name: &str) -> String {
    models_dir().join(name).display().to_string()
}

fn write_model(dir: &TempDir, name: &str, m: &IsingModel) -> String {
    let path = dir.path().join(name);
    fs::write(&path, model_to_json(m)).unwrap();
    path.display().to_string()
}

/// Value of `key=<real>` in a result line.
fn field(line: &str, key: &str) -> f64 {
    let prefix = format!("{key}=");
    line.split_whitespace().find_map(|tok| tok.strip_prefix(&prefix)).unwrap().parse().unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn partition_of_conditioned_clique() {
    let r = isingcw(&["partition", &model_arg("conditioned_clique.json"), "--method", "exact"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.starts_with("method=exact "));
    assert!(close(field(&r.stdout, "Z"), 41.31542, 5e-5));
    assert!(close(field(&r.stdout, "logZ"), field(&r.stdout, "Z").ln(), 1e-12));
}

#[test]
fn partition_methods_on_small_models() {
    let dir = TempDir::new().unwrap();
    let single =
        write_model(&dir, "single.json", &IsingModel::homogeneous(Graph::new(1, &[]).unwrap(), 0.0, 0.0).unwrap());
    let r = isingcw(&["partition", &single, "--method", "inner"]);
    assert_eq!(r.stdout.trim(), "method=inner logZ=0.6931471805599453 Z=2.0");

    let clique = IsingModel::homogeneous(Graph::complete(12).unwrap(), -0.3, 0.4).unwrap();
    let path = write_model(&dir, "k12.json", &clique);
    let cw = field(&isingcw(&["partition", &path, "--method", "curie-weiss"]).stdout, "Z");
    let exact = field(&isingcw(&["partition", &path, "--method", "exact"]).stdout, "Z");
    assert!((cw / exact - 1.0).abs() <= 1e-10, "{cw} {exact}");

    for method in ["pairwise", "clique-product"] {
        let r = isingcw(&["partition", &path, "--method", method]);
        assert_eq!(r.code, 0);
        assert!(field(&r.stdout, "logZ").is_finite());
    }
}

#[test]
fn intervene_reports_clique_constants() {
    let r = isingcw(&["intervene", &model_arg("five_node.json"), "--set", "1=1", "--method", "cw"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let lines: Vec<&str> = r.stdout.lines().collect();
    assert!(lines[0].starts_with("method=curie_weiss_clique_product "));
    let triangle = lines.iter().find(|l| l.starts_with("clique nodes=1,2,3 ")).unwrap();
    assert!(triangle.contains(" free=2,3 "));
    assert!(close(field(triangle, "Z"), 26.5221, 1e-4));
    let product: f64 = lines[1..].iter().map(|l| field(l, "logZ")).sum();
    assert!(close(product, field(lines[0], "logZ"), 1e-12));
}

#[test]
fn empty_intervention_is_unconditioned_partition() {
    let model = model_arg("five_node.json");
    let plain = field(&isingcw(&["partition", &model]).stdout, "logZ");
    let r = isingcw(&["intervene", &model, "--set", ""]);
    assert!(close(field(&r.stdout, "logZ"), plain, 1e-12));
    let r = isingcw(&["intervene", &model]);
    assert!(close(field(&r.stdout, "logZ"), plain, 1e-12));
}

#[test]
fn marginals_match_brute_force() {
    let model = model_arg("five_node.json");
    let m = parse_model(&fs::read_to_string(&model).unwrap(), "five").unwrap();
    let r = isingcw(&["intervene", &model, "--set", "4=0", "--marginals"]);
    let mut z = 0.0;
    let mut on = [0.0; 5];
    for mask in (0..32u64).filter(|x| x >> 4 & 1 == 0) {
        let w = m.log_weight_mask(mask).exp();
        z += w;
        for (v, acc) in on.iter_mut().enumerate() {
            if mask >> v & 1 == 1 {
                *acc += w;
            }
        }
    }
    let marg: Vec<&str> = r.stdout.lines().filter(|l| l.starts_with("marginal ")).collect();
    assert_eq!(marg.len(), 4);
    for line in marg {
        let node = field(line, "node") as usize;
        assert!(close(field(line, "p"), on[node] / z, 1e-12), "{line}");
    }
}

#[test]
fn ranking_outputs() {
    let dir = TempDir::new().unwrap();
    let empty = write_model(
        &dir,
        "empty.json",
        &IsingModel::new(Graph::new(4, &[]).unwrap(), vec![0.3, -1.0, 2.0, 0.0], vec![]).unwrap(),
    );
    let r = isingcw(&["rank", &empty, "--value", "1", "--metric", "l1"]);
    let expected: Vec<String> = (0..4).map(|i| format!("rank={} node={i} value=1 impact=0.0", i + 1)).collect();
    assert_eq!(r.stdout.lines().collect::<Vec<_>>(), expected);

    let star = IsingModel::homogeneous(Graph::new(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap(), 0.0, 1.0).unwrap();
    let star = write_model(&dir, "star.json", &star);
    for method in ["exact", "cw"] {
        let r = isingcw(&["rank", &star, "--value", "0", "--metric", "esum", "--method", method]);
        assert!(r.stdout.starts_with("rank=1 node=0 value=0 "), "{method}: {}", r.stdout);
    }

    let twins = IsingModel::homogeneous(Graph::new(4, &[(0, 1), (2, 3)]).unwrap(), 0.2, 0.7).unwrap();
    let twins = write_model(&dir, "twins.json", &twins);
    let r = isingcw(&["rank", &twins, "--value", "1"]);
    let nodes: Vec<usize> = r.stdout.lines().map(|l| field(l, "node") as usize).collect();
    let impacts: Vec<f64> = r.stdout.lines().map(|l| field(l, "impact")).collect();
    assert_eq!(nodes, vec![0, 1, 2, 3]);
    assert!(impacts.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn simulate_zero_sigma_and_files() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("sim.csv");
    let summary = dir.path().join("summary.csv");
    let r = isingcw(&[
        "simulate",
        "--k-grid",
        "10:30:10",
        "--sigma-grid",
        "0",
        "--reps",
        "4",
        "--out",
        out.to_str().unwrap(),
        "--summary",
        summary.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.is_empty());
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,sigma,rep,zbar_log,z_log,diff,ratio,theta0_bar,theta1_bar"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 12);
    assert!(rows.iter().all(|row| row.split(',').nth(5) == Some("0.0")));
    assert_eq!(fs::read_to_string(&summary).unwrap().lines().count(), 4);
}

#[test]
fn simulate_exact_reference() {
    let r = isingcw(&["simulate", "--k-grid", "4:8:4", "--sigma-grid", "1", "--reps", "3", "--exact-reference"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.stdout.lines().count(), 7);
    let r = isingcw(&["simulate", "--k-grid", "30", "--sigma-grid", "1", "--reps", "1", "--exact-reference"]);
    assert_eq!(r.code, 3);
}

#[test]
fn cliques_from_edge_list() {
    let r = isingcw(&["cliques", &model_arg("five_node.edges")]);
    assert_eq!(r.stdout, "clique=0 nodes=0,1\nclique=1 nodes=0,4\nclique=2 nodes=1,2,3\n");
}

#[test]
fn hoeffding_line() {
    let r = isingcw(&["hoeffding", "--k", "10", "--sigma", "1", "--reps", "2000"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains(" family=bounded ") && r.stdout.trim_end().ends_with("pass=true"));
}

#[test]
fn exit_codes() {
    let model = model_arg("five_node.json");
    assert_eq!(isingcw(&["intervene", &model, "--set", "2=5"]).code, 2);
    assert_eq!(isingcw(&["intervene", &model, "--set", "9=1"]).code, 2);
    assert_eq!(isingcw(&["rank", &model, "--value", "1", "--metric", "bogus"]).code, 2);
    assert_eq!(isingcw(&["rank", &model, "--value", "2"]).code, 2);
    assert_eq!(isingcw(&["partition", &model, "--cap", "3"]).code, 3);
    assert_eq!(isingcw(&["intervene", &model, "--cap", "2"]).code, 3);
    assert_eq!(isingcw(&["simulate", "--k-grid", "10:1:1"]).code, 2);
    assert_eq!(isingcw(&["simulate", "--reps", "1", "--out", "/nonexistent-dir/x.csv"]).code, 4);
    assert_eq!(isingcw(&["partition", "/nonexistent-dir/m.json"]).code, 4);
    assert_eq!(isingcw(&[]).code, 2);

    let dir = TempDir::new().unwrap();
    let broken = dir.path().join("broken.json");
    fs::write(&broken, "{ not json").unwrap();
    let r = isingcw(&["partition", broken.to_str().unwrap()]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("broken.json"));
}
