use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use slu_core::pipeline::{Pipeline, PipelineConfig};

fn slu(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_slu"))
        .args(args)
        .output()
        .expect("spawn slu")
}

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
        .display()
        .to_string()
}

fn ok(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).display().to_string()
}

/// expand + train into `dir`, returning the model path.
fn build(dir: &Path, seed: &str) -> PathBuf {
    let exp = p(dir, "expanded.tsv");
    let model = p(dir, "model.slu");
    ok(&slu(&[
        "--seed",
        seed,
        "expand",
        "--train",
        &data("sample_train.tsv"),
        "--output",
        &exp,
    ]));
    ok(&slu(&["--seed", seed, "train", "--input", &exp, "--model", &model]));
    PathBuf::from(model)
}

#[test]
fn missing_inputs_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(slu(&["stats"]).status.code(), Some(2));
    assert_eq!(
        slu(&["stats", "--input", &p(dir.path(), "nope.tsv")]).status.code(),
        Some(2)
    );
    assert_eq!(
        slu(&["parse", "--model", &p(dir.path(), "nope"), "--text", "fire"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        slu(&["--config", &p(dir.path(), "nope.toml"), "stats"]).status.code(),
        Some(2)
    );
    let out = slu(&["expand", "--train", &data("sample_train.tsv")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("output path"));
}

#[test]
fn unknown_flags_are_rejected() {
    let out = slu(&["stats", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--bogus"));
}

#[test]
fn help_lists_subcommands_and_flags() {
    let top = ok(&slu(&["--help"]));
    for cmd in [
        "expand", "train", "parse", "eval", "stats", "serve", "--config", "--seed",
    ] {
        assert!(top.contains(cmd), "missing {cmd}");
    }
    let parse = ok(&slu(&["parse", "--help"]));
    for flag in ["--text", "--input", "--trace", "--model", "--lexicons"] {
        assert!(parse.contains(flag), "missing {flag}");
    }
    let serve = ok(&slu(&["serve", "--help"]));
    assert!(serve.contains("--port") && serve.contains("127.0.0.1"));
}

#[test]
fn pipeline_is_reproducible_and_matches_the_library() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let ma = build(a.path(), "5");
    let mb = build(b.path(), "5");
    assert_eq!(
        std::fs::read(p(a.path(), "expanded.tsv")).unwrap(),
        std::fs::read(p(b.path(), "expanded.tsv")).unwrap()
    );
    assert_eq!(std::fs::read(&ma).unwrap(), std::fs::read(&mb).unwrap());
    assert!(ma.with_extension("lexicons").is_dir());

    let text = "there is a fire at 12 Main St .";
    let model = ma.display().to_string();
    let cli_frame = ok(&slu(&["parse", "--model", &model, "--text", text]));
    let cfg = PipelineConfig::default();
    let lib = Pipeline::load(&ma, &ma.with_extension("lexicons"), &cfg.delex, &cfg.inference).unwrap();
    let lib_frame = serde_json::to_string(&lib.parse(text).unwrap()).unwrap();
    assert_eq!(cli_frame.trim_end(), lib_frame);
    assert_eq!(
        cli_frame,
        ok(&slu(&["parse", "--model", &p(b.path(), "model.slu"), "--text", text]))
    );
}

#[test]
fn parse_file_skips_blank_lines_and_traces_to_stderr() {
    let dir = tempfile::tempdir().unwrap();
    let model = build(dir.path(), "1").display().to_string();
    let input = p(dir.path(), "in.txt");
    std::fs::write(&input, "car crash on 5th Ave\n\nsmoke seen near the park at 9 pm\n").unwrap();
    let out = slu(&["parse", "--model", &model, "--input", &input, "--trace"]);
    let stdout = ok(&out);
    let frames: Vec<serde_json::Value> = stdout.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(frames.len(), 2);
    assert!(frames.iter().all(|f| f["intent"].is_string() && f["slots"].is_array()));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("line 2 is empty"));
    assert!(stderr.contains("replace:") && stderr.contains("merge:"));
}

#[test]
fn eval_with_baseline_reports_gains() {
    let dir = tempfile::tempdir().unwrap();
    let model = build(dir.path(), "3").display().to_string();
    let out = ok(&slu(&[
        "eval",
        "--model",
        &model,
        "--test",
        &data("sample_test.tsv"),
        "--baseline",
        "--train",
        &data("sample_train.tsv"),
        "--json",
    ]));
    let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(doc["full"].is_object() && doc["baseline"].is_object());
    assert!(doc["gain"]["overall"].is_f64());
    let text = ok(&slu(&["eval", "--model", &model, "--test", &data("sample_test.tsv")]));
    assert!(text.contains("ood subset") && text.contains("oov subset"));
}

#[test]
fn stats_text_and_json() {
    let text = ok(&slu(&[
        "stats",
        "--input",
        &data("sample_test.tsv"),
        "--vocab-from",
        &data("sample_train.tsv"),
    ]));
    assert!(text.contains("utterances        80"));
    assert!(text.contains("OOV tokens"));
    let json: serde_json::Value =
        serde_json::from_str(&ok(&slu(&["stats", "--input", &data("sample_test.tsv"), "--json"]))).unwrap();
    assert!(json.is_object());
}

#[test]
fn config_file_supplies_paths_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = p(dir.path(), "slu.toml");
    std::fs::write(
        &cfg,
        format!(
            "seed = 9\n[paths]\ntrain = {:?}\nexpanded = {:?}\n",
            data("sample_train.tsv"),
            p(dir.path(), "exp.tsv")
        ),
    )
    .unwrap();
    ok(&slu(&["--config", &cfg, "expand"]));
    let from_config = std::fs::read(p(dir.path(), "exp.tsv")).unwrap();
    ok(&slu(&[
        "--config",
        &cfg,
        "--seed",
        "10",
        "expand",
        "--output",
        &p(dir.path(), "exp10.tsv"),
    ]));
    assert_ne!(from_config, std::fs::read(p(dir.path(), "exp10.tsv")).unwrap());

    std::fs::write(&cfg, "[inference]\nthreshold = 1.5\n").unwrap();
    let out = slu(&["--config", &cfg, "stats", "--input", &data("sample_test.tsv")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("threshold"));
}
