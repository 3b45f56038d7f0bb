//! End-to-end tests of the `qmle` binary: exit codes, stream contents, and
//! the bench accuracy gate, all run against real files in temp directories.

use std::path::Path;
use std::process::{Command, Output};

use qmle_cli::report::BenchReport;

fn qmle(dir: &Path, args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qmle"));
    cmd.current_dir(dir).args(args);
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary should spawn")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("process should exit, not be killed")
}

#[test]
fn help_prints_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = qmle(dir.path(), &["--help"], &[]);
    assert_eq!(code(&out), 0);
    assert!(stdout_of(&out).contains("decode"));
}

#[test]
fn missing_subcommand_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = qmle(dir.path(), &[], &[]);
    assert_eq!(code(&out), 1);
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = qmle(dir.path(), &["decode", "--model", "m.dem", "--shots", "s", "--bogus"], &[]);
    assert_eq!(code(&out), 1);
}

#[test]
fn gen_sample_decode_pipeline_runs_clean() {
    let dir = tempfile::tempdir().unwrap();
    let out = qmle(
        dir.path(),
        &["gen", "--kind", "chain", "--n", "12", "--p", "0.05", "--seed", "3", "--out", "chain.dem"],
        &[],
    );
    assert_eq!(code(&out), 0, "{}", stderr_of(&out));
    let model_text = std::fs::read_to_string(dir.path().join("chain.dem")).unwrap();
    assert!(qmle_core::parse_dem(&model_text).is_ok());

    let sample1 = qmle(dir.path(), &["sample", "--model", "chain.dem", "--count", "20", "--seed", "9"], &[]);
    assert_eq!(code(&sample1), 0);
    let rows = stdout_of(&sample1);
    assert_eq!(rows.lines().count(), 20);
    assert!(rows.lines().all(|l| l.len() == 12));
    let sample2 = qmle(dir.path(), &["sample", "--model", "chain.dem", "--count", "20", "--seed", "9"], &[]);
    assert_eq!(stdout_of(&sample2), rows, "fixed seed must reproduce the byte-identical stream");

    std::fs::write(dir.path().join("shots.txt"), &rows).unwrap();
    let decode = qmle(dir.path(), &["decode", "--model", "chain.dem", "--shots", "shots.txt"], &[]);
    assert_eq!(code(&decode), 0, "{}", stderr_of(&decode));
    let predictions = stdout_of(&decode);
    assert_eq!(predictions.lines().count(), 20);
    assert!(predictions.lines().all(|l| l.len() == 1), "chain models carry one observable");
    assert!(stderr_of(&decode).contains("decoded 20 shots"));
}

#[test]
fn decode_of_an_empty_shots_file_is_empty_and_clean() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("m.dem"), "error(0.1) D0\n").unwrap();
    std::fs::write(dir.path().join("shots.txt"), "").unwrap();
    let out = qmle(dir.path(), &["decode", "--model", "m.dem", "--shots", "shots.txt"], &[]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_of(&out), "");
}

#[test]
fn decode_can_sample_its_own_shots() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("m.dem"), "error(0.2) D0 L0\nerror(0.1) D0 D1\n").unwrap();
    let out = qmle(
        dir.path(),
        &["decode", "--model", "m.dem", "--sample", "15", "--seed", "4"],
        &[],
    );
    assert_eq!(code(&out), 0, "{}", stderr_of(&out));
    assert_eq!(stdout_of(&out).lines().count(), 15);
}

#[test]
fn bad_model_file_reports_its_line_and_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("m.dem"), "error(0.1) D0\nerror(2.0) D0\n").unwrap();
    std::fs::write(dir.path().join("shots.txt"), "1\n").unwrap();
    let out = qmle(dir.path(), &["decode", "--model", "m.dem", "--shots", "shots.txt"], &[]);
    assert_eq!(code(&out), 2);
    assert!(stderr_of(&out).contains("line 2"), "stderr: {}", stderr_of(&out));
}

#[test]
fn missing_model_file_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = qmle(dir.path(), &["decode", "--model", "nope.dem", "--shots", "s.txt"], &[]);
    assert_eq!(code(&out), 2);
    assert!(stderr_of(&out).contains("nope.dem"));
}

#[test]
fn bad_shot_character_reports_its_line_and_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("m.dem"), "error(0.1) D0 D1\n").unwrap();
    std::fs::write(dir.path().join("shots.txt"), "01\n0x\n").unwrap();
    let out = qmle(dir.path(), &["decode", "--model", "m.dem", "--shots", "shots.txt"], &[]);
    assert_eq!(code(&out), 2);
    assert!(stderr_of(&out).contains("line 2"), "stderr: {}", stderr_of(&out));
}

#[test]
fn queue_limited_shots_predict_zeros_and_warn() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("m.dem"), "error(0.1) D0 L0\nerror(0.2) D0\n").unwrap();
    std::fs::write(dir.path().join("shots.txt"), "1\n").unwrap();
    let out = qmle(
        dir.path(),
        &["decode", "--model", "m.dem", "--shots", "shots.txt", "--pq-limit", "1"],
        &[],
    );
    assert_eq!(code(&out), 0, "give-up on a shot is not a process failure");
    assert_eq!(stdout_of(&out), "0\n");
    assert!(stderr_of(&out).contains("1 queue-limited"), "stderr: {}", stderr_of(&out));
}

#[test]
fn verify_clean_model_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let gen = qmle(
        dir.path(),
        &["gen", "--kind", "chain", "--n", "4", "--p", "0.1", "--seed", "1", "--out", "m.dem"],
        &[],
    );
    assert_eq!(code(&gen), 0);
    let out = qmle(dir.path(), &["verify", "--model", "m.dem", "--shots", "30", "--seed", "2"], &[]);
    assert_eq!(code(&out), 0, "{}", stderr_of(&out));
    let report = stdout_of(&out);
    assert_eq!(report.lines().count(), 30);
    assert!(report.lines().all(|l| l.ends_with("ok") || l.contains("ok (")));
    assert!(stderr_of(&out).contains("0 mismatches"));
}

#[test]
fn verify_flags_penalty_induced_suboptimality_with_exit_3() {
    // A large detector penalty steers the search to the expensive one-error
    // cover of {D0, D1} even though the two cheap singles cost less.
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("m.dem"),
        "error(0.0067) D0 D1\nerror(0.2689) D0\nerror(0.2689) D1\n",
    )
    .unwrap();
    let clean = qmle(dir.path(), &["verify", "--model", "m.dem", "--shots", "50", "--seed", "1"], &[]);
    assert_eq!(code(&clean), 0, "{}", stderr_of(&clean));
    let skewed = qmle(
        dir.path(),
        &[
            "verify", "--model", "m.dem", "--shots", "50", "--seed", "1",
            "--det-penalty", "10",
        ],
        &[],
    );
    assert_eq!(code(&skewed), 3, "{}", stderr_of(&skewed));
    assert!(stdout_of(&skewed).contains("MISMATCH"));
}

#[test]
fn verify_rejects_oversized_models_with_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let model: String = (0..26).map(|i| format!("error(0.01) D{i}\n")).collect();
    std::fs::write(dir.path().join("m.dem"), model).unwrap();
    let out = qmle(dir.path(), &["verify", "--model", "m.dem", "--shots", "5", "--seed", "1"], &[]);
    assert_eq!(code(&out), 2);
    assert!(stderr_of(&out).contains("25"), "stderr should name the limit");
}

#[test]
fn bench_emits_round_trippable_rows_with_unit_baseline_speedup() {
    let dir = tempfile::tempdir().unwrap();
    let gen = qmle(
        dir.path(),
        &["gen", "--kind", "chain", "--n", "20", "--p", "0.05", "--seed", "6", "--out", "m.dem"],
        &[],
    );
    assert_eq!(code(&gen), 0);
    let out = qmle(
        dir.path(),
        &["bench", "--model", "m.dem", "--shots", "40", "--seed", "5", "--repeats", "2"],
        &[],
    );
    assert_eq!(code(&out), 0, "{}", stderr_of(&out));
    let report = BenchReport::from_machine_rows(&stdout_of(&out)).unwrap();
    assert_eq!(report.rows.len(), 5);
    assert_eq!(report.shots, 40);
    assert_eq!(report.repeats, 2);
    assert_eq!(report.rows[0].speedup.to_bits(), 1.0f64.to_bits());
    // One search, five data layouts: structural counters must agree.
    for row in &report.rows[1..] {
        assert_eq!(row.stats.nodes_expanded, report.rows[0].stats.nodes_expanded);
        assert_eq!(row.stats.detcost_calls, report.rows[0].stats.detcost_calls);
    }
}

#[test]
fn bench_single_level_is_a_single_unit_row() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("m.dem"), "error(0.1) D0\n").unwrap();
    let out = qmle(
        dir.path(),
        &[
            "bench", "--model", "m.dem", "--shots", "5", "--seed", "1",
            "--levels", "L2", "--repeats", "1",
        ],
        &[],
    );
    assert_eq!(code(&out), 0, "{}", stderr_of(&out));
    let report = BenchReport::from_machine_rows(&stdout_of(&out)).unwrap();
    assert_eq!(report.rows.len(), 1);
    assert_eq!(report.rows[0].speedup.to_bits(), 1.0f64.to_bits());
}

#[test]
fn bench_accuracy_gate_trips_on_injected_fault() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("m.dem"), "error(0.1) D0 L0\nerror(0.15) D0 D1\n").unwrap();
    let out = qmle(
        dir.path(),
        &["bench", "--model", "m.dem", "--shots", "10", "--seed", "3"],
        &[("QMLE_BENCH_FAULT_LEVEL", "L2")],
    );
    assert_eq!(code(&out), 3);
    assert!(stderr_of(&out).contains("accuracy gate"), "stderr: {}", stderr_of(&out));
    assert_eq!(stdout_of(&out), "", "no report may be emitted after a gate failure");
}

#[test]
fn gen_rejects_out_of_domain_probability() {
    let dir = tempfile::tempdir().unwrap();
    let out = qmle(dir.path(), &["gen", "--kind", "chain", "--n", "5", "--p", "0.7"], &[]);
    assert_eq!(code(&out), 1);
}

#[test]
fn sample_of_zero_shots_is_empty_and_clean() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("m.dem"), "error(0.1) D0\n").unwrap();
    let out = qmle(dir.path(), &["sample", "--model", "m.dem", "--count", "0", "--seed", "1"], &[]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_of(&out), "");
}
