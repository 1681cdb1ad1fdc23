//! End-to-end behavior of the `wtldpc` binary: exit-code contract,
//! determinism under fixed seeds, pool-size independence, and the
//! subcommand output surfaces.

use std::process::{Command, Output};

fn wtldpc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wtldpc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn region_prints_corners() {
    let out = wtldpc(&[
        "region",
        "--eps-m",
        "0.5",
        "--eps-w",
        "0.75",
        "--samples",
        "5",
    ]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.contains("# wtldpc region schema v1"));
    assert!(text.contains("B=(2.50000000000e-1,2.50000000000e-1)"));
    assert!(text.contains("C=(5.00000000000e-1,2.50000000000e-1)"));
}

#[test]
fn designrate_uncoupled_width() {
    let out = wtldpc(&[
        "designrate",
        "--l1",
        "3",
        "--l2",
        "3",
        "--r1",
        "6",
        "--r2",
        "6",
        "--L",
        "100",
        "--w",
        "1",
    ]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.contains("design_rate_total=0.00000000000e0"), "{text}");
    assert!(text.contains("design_rate_wiretap=5.00000000000e-1"));
}

#[test]
fn threshold_sanity_and_window() {
    // Sanity mode at eps = 0: converged after one iteration.
    let out = wtldpc(&[
        "threshold",
        "--l1",
        "2",
        "--l2",
        "1",
        "--r",
        "6",
        "--L",
        "8",
        "--w",
        "2",
        "--eps-check",
        "0.0",
    ]);
    assert!(out.status.success());
    assert!(stdout_of(&out).contains("converged_to_zero=true"));

    // Full bisection on the saturated system lands in [0.48, 0.50].
    let out = wtldpc(&[
        "threshold",
        "--l1",
        "2",
        "--l2",
        "1",
        "--r",
        "6",
        "--L",
        "32",
        "--w",
        "4",
        "--precision",
        "1e-4",
    ]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    let value: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("threshold="))
        .unwrap()
        .parse()
        .unwrap();
    assert!((0.48..=0.50).contains(&value), "threshold {value}");
}

#[test]
fn threshold_compare_single_is_exact() {
    let out = wtldpc(&[
        "threshold",
        "--l1",
        "2",
        "--l2",
        "1",
        "--r",
        "6",
        "--L",
        "8",
        "--w",
        "2",
        "--compare-single",
        "--eps-check",
        "0.45",
    ]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    let dev: f64 = text
        .lines()
        .find(|l| l.starts_with("compare_single"))
        .unwrap()
        .split("max_deviation=")
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert!(dev <= 1e-14, "deviation {dev}");
}

#[test]
fn sample_is_deterministic_per_seed() {
    let dir = std::env::temp_dir().join(format!("wtldpc-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let a = dir.join("a.txt");
    let b = dir.join("b.txt");
    for path in [&a, &b] {
        let out = wtldpc(&[
            "sample",
            "--variant",
            "chain",
            "--l1",
            "3",
            "--l2",
            "3",
            "--r1",
            "6",
            "--r2",
            "12",
            "--L",
            "4",
            "--M",
            "8",
            "--seed",
            "7",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    let ta = std::fs::read(&a).unwrap();
    let tb = std::fs::read(&b).unwrap();
    assert_eq!(ta, tb, "same seed, byte-identical export");
    let out = wtldpc(&[
        "sample",
        "--variant",
        "chain",
        "--l1",
        "3",
        "--l2",
        "3",
        "--r1",
        "6",
        "--r2",
        "12",
        "--L",
        "4",
        "--M",
        "8",
        "--seed",
        "8",
        "--out",
        a.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_ne!(std::fs::read(&a).unwrap(), tb, "different seed differs");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn simulate_independent_of_jobs() {
    let dir = std::env::temp_dir().join(format!("wtldpc-jobs-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let mut outputs = Vec::new();
    for jobs in ["1", "2"] {
        let jsonl = dir.join(format!("t{jobs}.jsonl"));
        let out = wtldpc(&[
            "--jobs",
            jobs,
            "simulate",
            "--variant",
            "chain",
            "--l1",
            "3",
            "--l2",
            "3",
            "--r1",
            "6",
            "--r2",
            "12",
            "--L",
            "2",
            "--M",
            "8",
            "--eps-m",
            "0.4",
            "--eps-w",
            "0.6",
            "--trials",
            "12",
            "--seed",
            "5",
            "--jsonl",
            jsonl.to_str().unwrap(),
        ]);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        outputs.push(std::fs::read(&jsonl).unwrap());
    }
    assert_eq!(outputs[0], outputs[1], "results depend on the seed only");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn growth_reports_omega_star() {
    let out = wtldpc(&[
        "growth", "--l1", "1", "--l2", "2", "--r", "6", "--points", "10",
    ]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.contains("# wtldpc growth schema v1"));
    let star: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("omega_star="))
        .unwrap()
        .parse()
        .unwrap();
    assert!(star > 0.0 && star < 0.1);
}

#[test]
fn equivocation_subcommand_runs() {
    let out = wtldpc(&[
        "equivocation",
        "--variant",
        "chain",
        "--l1",
        "3",
        "--l2",
        "3",
        "--r1",
        "6",
        "--r2",
        "12",
        "--L",
        "2",
        "--M",
        "8",
        "--eps-w",
        "0.75",
        "--trials",
        "20",
        "--seed",
        "3",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout_of(&out);
    assert!(text.contains("Re_mean="));
    assert!(text.contains("secret_dim="));
}

#[test]
fn de_profile_emits_csv() {
    let out = wtldpc(&[
        "de-profile",
        "--l1",
        "2",
        "--l2",
        "1",
        "--r",
        "6",
        "--L",
        "4",
        "--w",
        "2",
        "--eps",
        "0.3",
        "--stride",
        "5",
    ]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.contains("# wtldpc de-profile schema v1"));
    assert!(text.contains("iter,position,x1,x2"));
    let data_rows = text
        .lines()
        .filter(|l| l.contains(',') && !l.starts_with('#') && !l.starts_with("iter"))
        .count();
    assert!(data_rows >= 9, "per-position rows present");
}

#[test]
fn exit_code_contract() {
    // Usage errors (clap parse failure): 2.
    let out = wtldpc(&["threshold", "--l1", "2"]);
    assert_eq!(out.status.code(), Some(2));
    // Invalid parameter combinations: 2.
    let out = wtldpc(&[
        "threshold",
        "--l1",
        "2",
        "--l2",
        "1",
        "--r",
        "6",
        "--L",
        "2",
        "--w",
        "9",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = wtldpc(&["region", "--eps-m", "0.8", "--eps-w", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
    // Runtime failures (unwritable output): 3.
    let out = wtldpc(&[
        "region",
        "--eps-m",
        "0.5",
        "--eps-w",
        "0.75",
        "--out",
        "/nonexistent-dir/x.csv",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn table1_small_run() {
    let out = wtldpc(&[
        "table1",
        "--l-values",
        "20",
        "--M",
        "20",
        "--trials",
        "8",
        "--seed",
        "2",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout_of(&out);
    assert!(text.contains("# wtldpc table1 schema v1"));
    assert!(
        text.contains("0.2622"),
        "nominal rate column present: {text}"
    );
}
