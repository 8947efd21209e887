//! End-to-end tests driving the `quadric` binary.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};
use std::sync::atomic::{AtomicU64, Ordering};

use quadric::report::{DISC_CSV_HEADER, NORM_CSV_HEADER};

static DIR_COUNTER: AtomicU64 = AtomicU64::new(0);

fn scratch_dir(tag: &str) -> PathBuf {
    let id = DIR_COUNTER.fetch_add(1, Ordering::Relaxed);
    let dir = std::env::temp_dir().join(format!(
        "quadric-cli-{}-{tag}-{id}",
        std::process::id()
    ));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn quadric(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quadric"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).unwrap()
}

fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("no signal")
}

#[test]
fn default_run_emits_the_fixed_csv_layout() {
    let out = quadric(&["verify-monotonicity", "--samples", "4000"]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let lines: Vec<&str> = text.trim_end().lines().collect();
    assert_eq!(lines[0], NORM_CSV_HEADER);
    assert_eq!(lines.len(), 5, "header plus one row per grid point");
    for line in &lines[1..] {
        assert!(line.starts_with("heisenberg(1),dual_cone_kernel(N=8),2,"));
        assert_eq!(line.split(',').count(), 8);
    }
}

#[test]
fn scaled_control_violation_flips_the_exit_status() {
    let dir = scratch_dir("violation");
    let config = dir.join("scaled.toml");
    fs::write(
        &config,
        concat!(
            "domain = \"heisenberg(1)\"\n",
            "p = [2.0]\n",
            "[function]\n",
            "kind = \"scaled_control\"\n",
            "power = 2\n",
            "strength = 0.5\n",
            "lambdas = [[1.0]]\n",
            "[grid]\n",
            "h0 = [0.25]\n",
            "hdir = [1.0]\n",
            "ts = [0.0, 0.25, 0.75, 1.75]\n",
            "[sampler]\n",
            "samples = 40000\n",
        ),
    )
    .unwrap();
    let cfg = config.to_str().unwrap();

    let expecting = quadric(&["verify-monotonicity", "--config", cfg, "--expect-violation"]);
    assert_eq!(exit_code(&expecting), 0, "violations were expected and found");

    let plain = quadric(&["verify-monotonicity", "--config", cfg]);
    assert_eq!(exit_code(&plain), 1, "unexpected violations fail the run");
}

#[test]
fn empty_height_grid_is_a_config_error() {
    let dir = scratch_dir("empty-grid");
    let config = dir.join("empty.toml");
    fs::write(&config, "domain = \"heisenberg(1)\"\n[grid]\nts = []\n").unwrap();
    let out = quadric(&["verify-monotonicity", "--config", config.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn unknown_domain_key_is_a_precondition_failure() {
    let out = quadric(&["verify-monotonicity", "--domain", "octonion(3)"]);
    assert_eq!(exit_code(&out), 3);
}

#[test]
fn malformed_config_file_is_a_config_error() {
    let dir = scratch_dir("bad-toml");
    let config = dir.join("bad.toml");
    fs::write(&config, "domain = [not toml\n").unwrap();
    let out = quadric(&["verify-monotonicity", "--config", config.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn reports_are_identical_across_worker_counts_and_repeat_runs() {
    let mut blobs: Vec<(Vec<u8>, Vec<u8>)> = Vec::new();
    for (tag, workers) in [("w1", "1"), ("w4", "4"), ("w8", "8"), ("w4b", "4")] {
        let dir = scratch_dir(tag);
        for format in ["csv", "json"] {
            let out = quadric(&[
                "verify-monotonicity",
                "--samples",
                "20000",
                "--workers",
                workers,
                "--format",
                format,
                "--out",
                dir.to_str().unwrap(),
            ]);
            assert_eq!(exit_code(&out), 0);
        }
        blobs.push((
            fs::read(dir.join("verify-monotonicity.csv")).unwrap(),
            fs::read(dir.join("verify-monotonicity.json")).unwrap(),
        ));
    }
    for (csv, json) in &blobs[1..] {
        assert_eq!(csv, &blobs[0].0, "CSV bytes differ between runs");
        assert_eq!(json, &blobs[0].1, "JSON bytes differ between runs");
    }
}

#[test]
fn example_catalog_lists_the_builtin_domains() {
    let out = quadric(&["example-catalog"]);
    assert_eq!(exit_code(&out), 0);
    let entries: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let entries = entries.as_array().unwrap();
    assert_eq!(entries.len(), 5);
    let keys: Vec<&str> = entries
        .iter()
        .map(|e| e["key"].as_str().unwrap())
        .collect();
    assert_eq!(
        keys,
        [
            "heisenberg(1)",
            "heisenberg(2)",
            "ex1(C,2,1,2)",
            "ex1(H,1,1,1)",
            "ex2(1,2,1)"
        ]
    );
    for entry in entries {
        assert!(entry["spans_f"].as_bool().unwrap());
    }
}

#[test]
fn disc_check_emits_one_row_per_disc() {
    let dir = scratch_dir("disc");
    let config = dir.join("disc.toml");
    fs::write(
        &config,
        concat!(
            "domain = \"heisenberg(2)\"\n",
            "[disc]\n",
            "count = 12\n",
            "degree = 3\n",
            "n_theta = 128\n",
            "submean = 4\n",
        ),
    )
    .unwrap();
    let out = quadric(&["disc-check", "--config", config.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let lines: Vec<&str> = text.trim_end().lines().collect();
    assert_eq!(lines[0], DISC_CSV_HEADER);
    assert_eq!(lines.len(), 13);
    for line in &lines[1..] {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols[1], "heisenberg(2)");
        assert_eq!(cols[3], "128");
        assert!(cols[2].parse::<f64>().unwrap() <= 1e-9);
    }
}

#[test]
fn cone_report_audits_certificates_without_conflicts() {
    for domain in ["heisenberg(1)", "ex1(C,2,1,2)", "ex2(1,2,1)"] {
        let dir = scratch_dir("cone");
        let out = quadric(&[
            "cone-report",
            "--domain",
            domain,
            "--format",
            "json",
            "--out",
            dir.to_str().unwrap(),
        ]);
        assert_eq!(exit_code(&out), 0, "conflicts on {domain}");
        let report: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.join("cone-report.json")).unwrap())
                .unwrap();
        assert_eq!(report["conflicts"].as_u64(), Some(0));
        assert_eq!(report["trials"].as_u64(), Some(200));
        let rows = report["rows"].as_array().unwrap();
        assert_eq!(rows.len(), 200);
        // Form values must never be certified outside the cone they span.
        for row in rows {
            if row["case"].as_str() == Some("psi") {
                assert_ne!(row["status"].as_str(), Some("outside"));
            }
        }
    }
}

#[test]
fn corollary_check_reports_both_scale_legs() {
    let dir = scratch_dir("corollary");
    let out = quadric(&[
        "corollary-check",
        "--samples",
        "20000",
        "--format",
        "json",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0);
    let reports: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("corollary-check.json")).unwrap())
            .unwrap();
    let report = &reports.as_array().unwrap()[0];
    assert_eq!(report["compatible"].as_bool(), Some(true));
    assert_eq!(
        report["to_zero_estimates"].as_array().unwrap().len(),
        report["to_zero_scales"].as_array().unwrap().len()
    );
    assert_eq!(
        report["global_estimates"].as_array().unwrap().len(),
        report["global_scales"].as_array().unwrap().len()
    );
}

#[test]
fn toml_and_json_configs_produce_identical_reports() {
    let dir = scratch_dir("formats");
    let toml_path = dir.join("run.toml");
    let json_path = dir.join("run.json");
    fs::write(
        &toml_path,
        concat!(
            "domain = \"heisenberg(2)\"\n",
            "p = [1.0, 2.0]\n",
            "[sampler]\n",
            "samples = 8000\n",
            "seed = 11\n",
        ),
    )
    .unwrap();
    fs::write(
        &json_path,
        r#"{"domain": "heisenberg(2)", "p": [1.0, 2.0], "sampler": {"samples": 8000, "seed": 11}}"#,
    )
    .unwrap();
    let from_toml = quadric(&["verify-monotonicity", "--config", toml_path.to_str().unwrap()]);
    let from_json = quadric(&["verify-monotonicity", "--config", json_path.to_str().unwrap()]);
    assert_eq!(exit_code(&from_toml), 0);
    assert_eq!(exit_code(&from_json), 0);
    assert_eq!(stdout(&from_toml), stdout(&from_json));
    let lines = stdout(&from_toml).trim_end().lines().count();
    assert_eq!(lines, 9, "header plus four grid rows per exponent");
}
