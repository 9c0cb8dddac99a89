use std::path::Path;
use std::process::{Command, Output};

use kantorovich::image::{decode_pgm, encode_pgm};
use kantorovich::StepImage;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kantorovich")).args(args).output().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_pgm(p: &Path, image: &StepImage) {
    std::fs::write(p, encode_pgm(image)).unwrap();
}

fn read_pgm(p: &Path) -> StepImage {
    decode_pgm(&std::fs::read(p).unwrap()).unwrap()
}

fn gradient(h: usize, w: usize) -> StepImage {
    StepImage::from_fn(h, w, |i, j| ((i * 7 + j * 13) % 256) as f64).unwrap()
}

#[test]
fn help_and_version_succeed() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["reconstruct", "--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}

#[test]
fn reconstruct_defaults_produce_six_fold_output() {
    let dir = tempfile::tempdir().unwrap();
    let (input, output) = (dir.path().join("in.pgm"), dir.path().join("out.pgm"));
    write_pgm(&input, &gradient(75, 75));
    let out = run(&["reconstruct", "--input", path(&input), "--output", path(&output)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let image = read_pgm(&output);
    assert_eq!((image.width(), image.height()), (450, 450));
}

#[test]
fn reconstruct_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.pgm");
    write_pgm(&input, &gradient(12, 9));
    let outputs: Vec<Vec<u8>> = (0..2)
        .map(|i| {
            let output = dir.path().join(format!("out{i}.pgm"));
            let args = ["reconstruct", "--input", path(&input), "--output", path(&output), "--kernel", "fejer", "--w", "7", "--scale", "3"];
            assert!(run(&args).status.success());
            std::fs::read(&output).unwrap()
        })
        .collect();
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!((read_pgm(&dir.path().join("out0.pgm")).width()), 27);
}

#[test]
fn reconstruct_rejects_bad_arguments_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let (input, output) = (dir.path().join("in.pgm"), dir.path().join("out.pgm"));
    write_pgm(&input, &gradient(8, 8));
    for extra in [
        vec!["--w", "0"],
        vec!["--w", "-3"],
        vec!["--scale", "0"],
        vec!["--kernel", "bspline:0"],
        vec!["--kernel", "jackson:3:0"],
        vec!["--kernel", "gauss"],
        vec!["--boundary", "mirror"],
    ] {
        let mut args = vec!["reconstruct", "--input", path(&input), "--output", path(&output)];
        args.extend(extra.iter().copied());
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{extra:?}");
        assert!(!output.exists(), "{extra:?}");
    }
}

#[test]
fn reconstruct_runtime_failures_exit_one_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let output = dir.path().join("out.pgm");
    let missing = dir.path().join("missing.pgm");
    let out = run(&["reconstruct", "--input", path(&missing), "--output", path(&output)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!output.exists());

    let garbage = dir.path().join("garbage.pgm");
    std::fs::write(&garbage, b"P7\nnot an image").unwrap();
    let out = run(&["reconstruct", "--input", path(&garbage), "--output", path(&output)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!output.exists());
    assert!(std::fs::read_dir(dir.path()).unwrap().all(|e| !e.unwrap().file_name().to_string_lossy().ends_with(".partial")));
}

#[test]
fn kernel_info_reports_and_exports() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("m3.csv");
    let out = run(&["kernel-info", "--kernel", "bspline:3", "--beta", "1", "--csv", path(&csv), "--samples", "61", "--range", "3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("support: [-1.5, 1.5]"), "{text}");
    assert!(text.contains("partition of unity deviation"));
    assert!(text.contains("m_1:"));
    let lines: Vec<String> = std::fs::read_to_string(&csv).unwrap().lines().map(String::from).collect();
    assert_eq!(lines[0], "x,value");
    assert_eq!(lines.len(), 62);
    let centre: Vec<&str> = lines[31].split(',').collect();
    assert_eq!(centre[0].parse::<f64>().unwrap(), 0.0);
    assert!((centre[1].parse::<f64>().unwrap() - 0.75).abs() < 1e-15);

    let out = run(&["kernel-info", "--kernel", "jackson:12:1"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("normalization c_k: 4.73124238"), "{text}");

    let out = run(&["kernel-info", "--kernel", "fejer", "--beta", "1"]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains("m_1: diverges"));
}

#[test]
fn kernel_info_usage_errors() {
    assert_eq!(run(&["kernel-info", "--kernel", "bspline:21"]).status.code(), Some(2));
    assert_eq!(run(&["kernel-info", "--kernel", "fejer", "--beta", "-1"]).status.code(), Some(2));
    assert_eq!(run(&["kernel-info"]).status.code(), Some(2));
}

#[test]
fn converge_prints_and_writes_table() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    let out = run(&[
        "converge", "--kernel", "bspline:3", "--test", "step", "--metric", "modular:2", "--w-list", "5,10,20", "--csv",
        path(&csv),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), table);
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines[0], "w,metric,value");
    assert_eq!(lines.len(), 4);
    let values: Vec<f64> = lines[1..].iter().map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
    assert!(values.windows(2).all(|p| p[1] < p[0]), "{values:?}");
}

#[test]
fn converge_usage_errors() {
    let base = ["converge", "--kernel", "bspline:3", "--test", "smooth", "--metric", "sup"];
    let with = |extra: &[&str]| {
        let mut args = base.to_vec();
        args.extend_from_slice(extra);
        run(&args).status.code()
    };
    assert_eq!(with(&["--w-list", ""]), Some(2));
    assert_eq!(with(&[]), Some(2));
    assert_eq!(with(&["--w-list", "5,-1"]), Some(2));
    assert_eq!(with(&["--w-list", "5,x"]), Some(2));
    let mut args = base.to_vec();
    args[6] = "lp:0.5";
    args.extend_from_slice(&["--w-list", "5"]);
    assert_eq!(run(&args).status.code(), Some(2));
}

#[test]
fn binarize_reports_phase_fractions() {
    let dir = tempfile::tempdir().unwrap();
    let (input, output, report) = (dir.path().join("in.pgm"), dir.path().join("bw.pgm"), dir.path().join("r.csv"));
    let image = StepImage::from_fn(4, 4, |i, _| if i == 0 { 250.0 } else { 10.0 }).unwrap();
    write_pgm(&input, &image);
    let out = run(&["binarize", "--input", path(&input), "--output", path(&output), "--report", path(&report)]);
    assert!(out.status.success());
    let bw = read_pgm(&output);
    assert!(bw.pixels().iter().all(|&v| v == 0.0 || v == 255.0));
    assert_eq!(std::fs::read_to_string(&report).unwrap(), "white_fraction,black_fraction\n0.25,0.75\n");

    let out = run(&["binarize", "--input", path(&input), "--output", path(&output), "--threshold", "5"]);
    assert!(out.status.success());
    assert!(read_pgm(&output).pixels().iter().all(|&v| v == 255.0));
}
