//! Determinism gate: every command, run twice with identical flags, must
//! write byte-identical JSON and CSV. Only manifest.json (timestamps) is
//! exempt. Prints one PASS/FAIL line and exits nonzero on failure.

use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lingam-spp"))
}

fn run(out: &Path, args: &[&str]) -> Result<(), String> {
    let status = bin()
        .arg("--out")
        .arg(out)
        .args(args)
        .env("LINGAM_SPP_JOBS", "2")
        .output()
        .map_err(|e| e.to_string())?;
    if status.status.success() {
        Ok(())
    } else {
        Err(format!("{args:?} failed: {}", String::from_utf8_lossy(&status.stderr)))
    }
}

/// Every output file except the manifest, with its bytes.
fn outputs(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap() != "manifest.json")
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

fn main() -> ExitCode {
    let root = tempfile::tempdir().unwrap();
    let base = root.path();
    let data = base.join("input.csv");
    let tiers = base.join("tiers.json");
    let prior = base.join("prior.json");
    fs::write(&tiers, "[[0, 1], [2, 3, 4]]").unwrap();
    fs::write(&prior, "[[0, 2]]").unwrap();

    // Fixed inputs shared by both runs of the downstream commands.
    let setup = run(&base.join("seed-data"), &["gen", "--p", "5", "--n", "600", "--sparsity", "0.3", "--confounders", "1", "--seed", "7"])
        .and_then(|_| fs::copy(base.join("seed-data/data.csv"), &data).map(|_| ()).map_err(|e| e.to_string()))
        .and_then(|_| run(&base.join("seed-model"), &["train", "--p", "4,5", "--trials", "30", "--n", "400"]))
        .and_then(|_| run(&base.join("seed-feat"), &["features", data.to_str().unwrap()]));
    if let Err(e) = setup {
        println!("FAIL criterion 12: CLI determinism | setup: {e}");
        return ExitCode::FAILURE;
    }
    let model = base.join("seed-model/model.json");
    let training = base.join("seed-model/training.jsonl");
    let feats = base.join("seed-feat/features.json");
    let (d, m, t, f, tr, pr) = (
        data.to_str().unwrap(),
        model.to_str().unwrap(),
        training.to_str().unwrap(),
        feats.to_str().unwrap(),
        tiers.to_str().unwrap(),
        prior.to_str().unwrap(),
    );

    let cases: Vec<(&str, Vec<&str>)> = vec![
        ("gen", vec!["gen", "--p", "5", "--n", "1000", "--sparsity", "0.3", "--confounders", "1", "--seed", "7"]),
        ("discover", vec!["discover", d, "--adjacency", "--tiers", tr, "--prior", pr]),
        ("discover-direct", vec!["discover", d, "--method", "direct-plr"]),
        ("discover-knn", vec!["discover", d, "--method", "spp-knn", "--k-rule", "fraction5"]),
        ("pathdist", vec!["pathdist", d]),
        ("pathdist-sample", vec!["pathdist", d, "--mode", "sample", "--samples", "250", "--seed", "3"]),
        ("features", vec!["features", d, "--mode", "sample", "--samples", "100"]),
        ("train", vec!["train", "--p", "4,5", "--trials", "30", "--n", "400", "--target", "SPP_EO"]),
        ("train-from", vec!["train", "--from", t]),
        ("predict", vec!["predict", "--model", m, "--query", f]),
        ("eval", vec!["eval", "--model", m, "--p", "6", "--trials", "30", "--n", "400"]),
        ("eval-file", vec!["eval", "--model", m, "--test", t]),
        ("bench", vec!["bench", "--p", "4,5", "--n", "400", "--trials", "12", "--prior-fracs", "0,0.5"]),
    ];

    let mut problems = Vec::new();
    let mut compared = 0;
    for (name, args) in &cases {
        let (a, b) = (base.join(format!("{name}-a")), base.join(format!("{name}-b")));
        if let Err(e) = run(&a, args).and_then(|_| run(&b, args)) {
            problems.push(e);
            continue;
        }
        let (fa, fb) = (outputs(&a), outputs(&b));
        if fa.is_empty() {
            problems.push(format!("{name}: no outputs"));
        }
        for ((na, ba), (nb, bb)) in fa.iter().zip(&fb) {
            compared += 1;
            if na != nb || ba != bb {
                problems.push(format!("{name}: {na} differs"));
            }
        }
        if fa.len() != fb.len() {
            problems.push(format!("{name}: output sets differ"));
        }
    }
    let pass = problems.is_empty();
    println!(
        "{} criterion 12: CLI determinism | {} commands, {compared} files compared byte for byte{}",
        if pass { "PASS" } else { "FAIL" },
        cases.len(),
        if pass { String::new() } else { format!(", problems: {problems:?}") }
    );
    if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
