use std::path::Path;
use std::process::{Command, Output};

fn qcnn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcnn"))
        .args(args)
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn train_small(out: &Path) -> Output {
    qcnn(&[
        "train",
        "--synthetic",
        "--n-per-class",
        "20",
        "--seed",
        "3",
        "--epochs",
        "4",
        "--out",
        out.to_str().unwrap(),
    ])
}

#[test]
fn train_writes_history_and_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    let o = train_small(dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let history = std::fs::read_to_string(dir.path().join("history.csv")).unwrap();
    let mut lines = history.lines();
    assert_eq!(
        lines.next(),
        Some("epoch,train_loss,train_acc,val_loss,val_acc")
    );
    assert_eq!(lines.count(), 4);
    assert!(dir.path().join("checkpoint.json").is_file());
}

#[test]
fn default_epochs_give_twenty_history_rows() {
    let dir = tempfile::tempdir().unwrap();
    let o = qcnn(&[
        "train",
        "--synthetic",
        "--n-per-class",
        "10",
        "--model",
        "classical",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let history = std::fs::read_to_string(dir.path().join("history.csv")).unwrap();
    assert_eq!(history.lines().count(), 21);
}

#[test]
fn training_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let read = |f: &str| std::fs::read(dir.path().join(f)).unwrap();
    assert_eq!(code(&train_small(dir.path())), 0);
    let first = (read("history.csv"), read("checkpoint.json"));
    assert_eq!(code(&train_small(dir.path())), 0);
    assert!(first.0 == read("history.csv"), "history differs");
    assert!(first.1 == read("checkpoint.json"), "checkpoint differs");
}

#[test]
fn eval_and_compare_write_reports() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&train_small(dir.path())), 0);
    let ck = dir.path().join("checkpoint.json");
    let out = dir.path().join("eval");
    let o = qcnn(&[
        "eval",
        "--checkpoint",
        ck.to_str().unwrap(),
        "--subset",
        "test",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let metrics = std::fs::read_to_string(out.join("metrics.txt")).unwrap();
    assert!(metrics.contains("accuracy="));
    let preds = std::fs::read_to_string(out.join("predictions.csv")).unwrap();
    assert_eq!(
        preds.lines().next(),
        Some("index,label,prediction,logit0,logit1")
    );
    // 20 per class -> 3 + 3 test samples
    assert_eq!(preds.lines().count(), 7);

    let o = qcnn(&[
        "compare",
        "--checkpoint-a",
        ck.to_str().unwrap(),
        "--checkpoint-b",
        ck.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let doc = std::fs::read_to_string(out.join("mcnemar.txt")).unwrap();
    assert!(doc.contains("b=0"));
    assert!(doc.contains("c=0"));
}

#[test]
fn missing_feature_file_is_a_runtime_error_naming_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nowhere.bin");
    let o = qcnn(&[
        "train",
        "--features",
        missing.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("nowhere.bin"), "{}", stderr(&o));
}

#[test]
fn bad_arguments_are_usage_errors() {
    assert_eq!(
        code(&qcnn(&["train", "--synthetic", "--epochs", "zero"])),
        2
    );
    assert_eq!(code(&qcnn(&["train", "--synthetic", "--epochs", "0"])), 2);
    assert_eq!(code(&qcnn(&["train"])), 2);
    assert_eq!(code(&qcnn(&["no-such-command"])), 2);
    assert_eq!(code(&qcnn(&["train", "--synthetic", "--lr", "-1"])), 2);
}

#[test]
fn gradcheck_reports_pass_and_detects_corruption() {
    let o = qcnn(&["gradcheck"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    assert!(String::from_utf8_lossy(&o.stdout).contains("gradcheck PASS"));
    let o = qcnn(&["gradcheck", "--corrupt", "dense"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stdout).contains("gradcheck FAIL"));
}

#[test]
fn feature_files_round_trip_through_gen_synthetic() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["f.bin", "f.csv"] {
        let path = dir.path().join(name);
        let o = qcnn(&[
            "gen-synthetic",
            "--n-per-class",
            "5",
            "--output",
            path.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        let samples = qcnn::data::read_features(&path).unwrap();
        assert_eq!(samples, qcnn::data::gen_synthetic(5, 4.0, 0.5, 42).unwrap());
    }
}

#[test]
fn extract_features_from_image_root() {
    let dir = tempfile::tempdir().unwrap();
    for (sub, shade) in [("normal", 40u8), ("demented", 200u8)] {
        std::fs::create_dir(dir.path().join(sub)).unwrap();
        image::GrayImage::from_pixel(20, 10, image::Luma([shade]))
            .save(dir.path().join(sub).join("x.png"))
            .unwrap();
    }
    let out = dir.path().join("feat.bin");
    let o = qcnn(&[
        "extract-features",
        "--images",
        dir.path().to_str().unwrap(),
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let samples = qcnn::data::read_features(&out).unwrap();
    let labels: Vec<u8> = samples.iter().map(|s| s.label()).collect();
    assert_eq!(labels, [0, 1]);
}

#[test]
fn export_qasm_to_stdout() {
    let o = qcnn(&["export-qasm", "--depth", "1", "--angle", "-0.25"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("OPENQASM 2.0;\n"));
    assert_eq!(text.matches("cx ").count(), 3);
    assert!(text.contains("ry(-0.25000000000000000) q[0];"));
}
