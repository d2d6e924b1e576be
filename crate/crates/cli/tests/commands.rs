use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn lingam(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lingam-spp")).arg("--out").arg(out).args(args).output().unwrap()
}

fn ok(out: &Path, args: &[&str]) {
    let o = lingam(out, args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
}

fn code(out: &Path, args: &[&str]) -> i32 {
    lingam(out, args).status.code().unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn order(v: &Value) -> Vec<u64> {
    v["order"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect()
}

/// x1 = 0.9 x0 + uniform noise, written as a two-column CSV.
fn pair_csv(path: &Path, n: usize) {
    let mut state = 12345u64;
    let mut unif = || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    let mut s = String::from("a,b\n");
    for _ in 0..n {
        let x = unif();
        s.push_str(&format!("{x},{}\n", 0.9 * x + unif()));
    }
    fs::write(path, s).unwrap();
}

#[test]
fn gen_writes_declared_shape() {
    let t = tempfile::tempdir().unwrap();
    ok(t.path(), &["gen", "--p", "5", "--n", "1000", "--sparsity", "0.3", "--confounders", "1", "--seed", "7"]);
    let csv = fs::read_to_string(t.path().join("data.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 1001);
    assert!(lines.iter().all(|l| l.split(',').count() == 5));
    let truth = json(&t.path().join("truth.json"));
    assert_eq!(truth["B"].as_array().unwrap().len(), 5);
    assert_eq!(truth["Lambda"].as_array().unwrap()[0].as_array().unwrap().len(), 1);
    let manifest = json(&t.path().join("manifest.json"));
    assert_eq!(manifest["outputs"], serde_json::json!(["data.csv", "truth.json"]));
    assert_eq!(manifest["config_digest"].as_str().unwrap().len(), 64);
}

#[test]
fn invalid_generation_parameters_exit_2() {
    let t = tempfile::tempdir().unwrap();
    assert_eq!(code(t.path(), &["gen", "--sparsity", "1.5"]), 2);
    assert_eq!(code(t.path(), &["gen", "--p", "1"]), 2);
    assert!(!t.path().join("data.csv").exists());
}

#[test]
fn config_file_is_overridden_by_flags() {
    let t = tempfile::tempdir().unwrap();
    let cfg = t.path().join("cfg.json");
    fs::write(&cfg, r#"{"p": 3, "n": 40, "seed": 1}"#).unwrap();
    ok(t.path(), &["--config", cfg.to_str().unwrap(), "gen", "--n", "25"]);
    let params = &json(&t.path().join("truth.json"))["params"];
    assert_eq!(params["p"], 3);
    assert_eq!(params["n_samples"], 25);
    fs::write(&cfg, r#"{"nope": true}"#).unwrap();
    assert_eq!(code(t.path(), &["--config", cfg.to_str().unwrap(), "gen"]), 2);
}

#[test]
fn two_variable_direction_and_method_agreement() {
    let t = tempfile::tempdir().unwrap();
    let csv = t.path().join("pair.csv");
    pair_csv(&csv, 10_000);
    let c = csv.to_str().unwrap();
    ok(&t.path().join("d"), &["discover", c, "--method", "direct-plr"]);
    ok(&t.path().join("s"), &["discover", c, "--method", "spp-plr"]);
    let direct = json(&t.path().join("d/result.json"));
    let spp = json(&t.path().join("s/result.json"));
    assert_eq!(order(&direct), vec![0, 1]);
    assert_eq!(order(&spp), order(&direct));
    assert!(direct.get("b_hat").is_none());
    assert!(direct.get("runtime_ms").is_none());
}

#[test]
fn full_prior_is_returned_verbatim() {
    let t = tempfile::tempdir().unwrap();
    ok(t.path(), &["gen", "--p", "5", "--n", "500", "--sparsity", "0.2", "--seed", "3"]);
    let prior = t.path().join("prior.json");
    fs::write(&prior, "[[3, 1, 4, 0, 2]]").unwrap();
    let data = t.path().join("data.csv");
    ok(&t.path().join("r"), &["discover", data.to_str().unwrap(), "--prior", prior.to_str().unwrap(), "--adjacency"]);
    let res = json(&t.path().join("r/result.json"));
    assert_eq!(order(&res), vec![3, 1, 4, 0, 2]);
    assert_eq!(res["b_hat"].as_array().unwrap().len(), 5);
}

#[test]
fn prior_errors_map_to_exit_codes() {
    let t = tempfile::tempdir().unwrap();
    ok(t.path(), &["gen", "--p", "4", "--n", "300"]);
    let data = t.path().join("data.csv");
    let prior = t.path().join("prior.json");
    fs::write(&prior, "[[1, 2], [2, 1]]").unwrap();
    assert_eq!(code(&t.path().join("x"), &["discover", data.to_str().unwrap(), "--prior", prior.to_str().unwrap()]), 3);
    fs::write(&prior, "[[0, 9]]").unwrap();
    assert_eq!(code(&t.path().join("x"), &["discover", data.to_str().unwrap(), "--prior", prior.to_str().unwrap()]), 2);
}

#[test]
fn malformed_csv_exits_2() {
    let t = tempfile::tempdir().unwrap();
    let bad = t.path().join("bad.csv");
    fs::write(&bad, "a,b\n1,2\n3,oops\n").unwrap();
    assert_eq!(code(t.path(), &["discover", bad.to_str().unwrap()]), 2);
    fs::write(&bad, "a,b\n1,2\n3\n").unwrap();
    assert_eq!(code(t.path(), &["discover", bad.to_str().unwrap()]), 2);
    assert_eq!(code(t.path(), &["discover", "/nonexistent.csv"]), 2);
}

#[test]
fn path_distribution_commands() {
    let t = tempfile::tempdir().unwrap();
    ok(t.path(), &["gen", "--p", "7", "--n", "400", "--sparsity", "0.5", "--seed", "2"]);
    let data = t.path().join("data.csv");
    let d = data.to_str().unwrap();
    ok(&t.path().join("all"), &["pathdist", d]);
    ok(&t.path().join("best"), &["discover", d]);
    let dist = json(&t.path().join("all/pathdist.json"));
    let lengths: Vec<f64> = dist["lengths"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert_eq!(lengths.len(), 5040);
    let min = lengths.iter().cloned().fold(f64::INFINITY, f64::min);
    let best = json(&t.path().join("best/result.json"))["total_cost"].as_f64().unwrap();
    assert!((min - best).abs() <= 1e-12);
    assert_eq!(json(&t.path().join("all/features.json"))["moments"].as_array().unwrap().len(), 28);

    for s in ["100", "250", "500", "1000", "2500"] {
        let out = t.path().join(format!("s{s}"));
        ok(&out, &["pathdist", d, "--mode", "sample", "--samples", s, "--seed", "1"]);
        assert_eq!(json(&out.join("pathdist.json"))["lengths"].as_array().unwrap().len(), s.parse::<usize>().unwrap());
    }
    ok(&t.path().join("f"), &["features", d]);
    assert!(!t.path().join("f/pathdist.json").exists());
    assert_eq!(code(&t.path().join("c"), &["pathdist", d, "--cap", "6"]), 4);
}

#[test]
fn train_predict_eval_round_trip() {
    let t = tempfile::tempdir().unwrap();
    let tr = t.path().join("train");
    ok(&tr, &["train", "--p", "4,5", "--trials", "30", "--n", "400", "--target", "sparsity-gt-half"]);
    let model = tr.join("model.json");
    assert_eq!(fs::read_to_string(tr.join("training.jsonl")).unwrap().lines().count(), 60);
    let m = json(&model);
    assert_eq!(m["feature_mean"].as_array().unwrap().len(), 28);

    let ev = t.path().join("eval");
    ok(&ev, &["eval", "--model", model.to_str().unwrap(), "--p", "5", "--trials", "20", "--n", "400"]);
    let auc = json(&ev.join("roc.json"))["auc"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&auc));

    let pr = t.path().join("pred");
    ok(&pr, &["predict", "--model", model.to_str().unwrap(), "--query", tr.join("training.jsonl").to_str().unwrap()]);
    let scores = json(&pr.join("predictions.json"));
    assert_eq!(scores["scores"].as_array().unwrap().len(), 60);
    assert_eq!(scores["target"], "SPARSITY_GT_HALF");
}

#[test]
fn learning_errors_have_distinct_codes() {
    let t = tempfile::tempdir().unwrap();
    let empty = t.path().join("empty.json");
    fs::write(&empty, "").unwrap();
    let query = t.path().join("q.json");
    fs::write(&query, format!("{{\"moments\": {:?}}}", vec![0.0; 28])).unwrap();
    assert_eq!(code(t.path(), &["predict", "--model", empty.to_str().unwrap(), "--query", query.to_str().unwrap()]), 6);

    let tr = t.path().join("train");
    ok(&tr, &["train", "--p", "4", "--trials", "20", "--n", "300"]);
    let rows = fs::read_to_string(tr.join("training.jsonl")).unwrap();
    let one_class: String = rows.lines().map(|l| l.replace("\"label\":0.0", "\"label\":1.0") + "\n").collect();
    let test = t.path().join("one.jsonl");
    fs::write(&test, one_class).unwrap();
    let model = tr.join("model.json");
    assert_eq!(code(t.path(), &["eval", "--model", model.to_str().unwrap(), "--test", test.to_str().unwrap()]), 7);
    assert_eq!(code(t.path(), &["train", "--from", empty.to_str().unwrap()]), 6);
}

#[test]
fn bench_outputs_and_validation() {
    let t = tempfile::tempdir().unwrap();
    let o = lingam(t.path(), &["bench", "--p", "4", "--n", "300", "--trials", "6", "--prior-fracs", "0,0.5", "--confounders", "false"]);
    assert!(o.status.success());
    let table = String::from_utf8(o.stdout).unwrap();
    assert!(table.contains("spp-plr") && table.contains("direct-plr"));
    let cells = json(&t.path().join("cells.json"));
    assert_eq!(cells.as_array().unwrap().len(), 4);
    assert!(cells[0].get("mean_runtime_ms").unwrap().is_null());
    let csv = fs::read_to_string(t.path().join("cells.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
    assert_eq!(code(t.path(), &["bench", "--trials", "0"]), 2);
    assert_eq!(code(t.path(), &["bench", "--prior-fracs", "1.5"]), 2);
}
