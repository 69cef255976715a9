//! End-to-end checks of the `modtap` binary: output formats, determinism,
//! and exit codes.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn modtap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_modtap"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 output")
}

#[test]
fn rates_case3_matches_closed_forms() {
    let out = modtap(&["rates", "--channel", "case:3,0.2,0.1", "--format", "json"]);
    assert!(out.status.success());
    let rows: Vec<serde_json::Value> = serde_json::from_str(&stdout(&out)).unwrap();
    let row = &rows[0];
    assert_eq!(row["c_s"].as_f64().unwrap(), 0.0);
    assert_eq!(row["pd_lower"].as_f64().unwrap(), 0.0);
    assert_eq!(row["pd_upper"].as_f64().unwrap(), 0.0);
    assert_eq!(row["tight_case"], "main_degraded");
    // 1 - H(0.2)
    let c_s_f = row["c_s_f"].as_f64().unwrap();
    assert!((c_s_f - 0.278071905113).abs() < 1e-11);
}

#[test]
fn csv_and_json_outputs_carry_identical_values() {
    let csv = stdout(&modtap(&["rates", "--channel", "case:2,0.3,0.1"]));
    let json = stdout(&modtap(&[
        "rates",
        "--channel",
        "case:2,0.3,0.1",
        "--format",
        "json",
    ]));
    let rows: Vec<serde_json::Value> = serde_json::from_str(&json).unwrap();
    let row = &rows[0];

    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    // The channel column is quoted (it contains commas); split it off first.
    let data_line = lines.next().unwrap();
    let rest = data_line
        .strip_prefix("\"case:2,0.3,0.1\",")
        .expect("quoted channel field");
    let fields: Vec<&str> = rest.split(',').collect();
    assert_eq!(fields.len(), header.len() - 1);

    for (name, field) in header[1..].iter().zip(&fields) {
        let json_val = &row[*name];
        if field.is_empty() {
            assert!(json_val.is_null(), "{name}: csv empty but json {json_val}");
        } else if let Ok(x) = field.parse::<f64>() {
            if let Some(y) = json_val.as_f64() {
                assert_eq!(x, y, "{name}: csv {x} vs json {y}");
            } else {
                // numeric-looking string column such as case_id
                assert_eq!(json_val.as_u64().map(|v| v as f64), Some(x), "{name}");
            }
        } else {
            // booleans and labels
            let rendered = match json_val {
                serde_json::Value::Bool(b) => b.to_string(),
                serde_json::Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            assert_eq!(&rendered, field, "{name}");
        }
    }
}

#[test]
fn identical_configs_give_byte_identical_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let out = modtap(&[
            "simulate",
            "--channel",
            "case:2,0.1,0.3",
            "--n",
            "8",
            "--messages",
            "4",
            "--trials",
            "500",
            "--seed",
            "42",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn sweep_single_point_matches_rates_record() {
    let sweep = stdout(&modtap(&[
        "sweep",
        "--channel",
        "case:4,0.1,0.3",
        "--format",
        "json",
    ]));
    let rates = stdout(&modtap(&[
        "rates",
        "--channel",
        "case:4,0.1,0.3",
        "--format",
        "json",
    ]));
    let sweep_rows: Vec<serde_json::Value> = serde_json::from_str(&sweep).unwrap();
    let rates_rows: Vec<serde_json::Value> = serde_json::from_str(&rates).unwrap();
    assert_eq!(sweep_rows.len(), 1);
    for key in [
        "c_s",
        "pd_lower",
        "pd_upper",
        "c_s_f",
        "hd_rate",
        "hd_mu_star",
        "hd_t_star",
        "hd_delta_hat",
    ] {
        assert_eq!(sweep_rows[0][key], rates_rows[0][key], "{key}");
    }
}

#[test]
fn sweep_eleven_rows_match_closed_form_column() {
    let out = stdout(&modtap(&[
        "sweep",
        "--channel",
        "case:2,0.3,0.1",
        "--eps",
        "0:0.5:0.05",
        "--format",
        "json",
    ]));
    let rows: Vec<serde_json::Value> = serde_json::from_str(&out).unwrap();
    assert_eq!(rows.len(), 11);
    for (i, row) in rows.iter().enumerate() {
        let eps = i as f64 * 0.05;
        assert!((row["epsilon"].as_f64().unwrap() - eps).abs() < 1e-9);
        // c_s_f column must equal 1 - H(eps).
        let h = if eps == 0.0 || eps == 0.5 {
            if eps == 0.0 {
                0.0
            } else {
                1.0
            }
        } else {
            -(eps * eps.log2() + (1.0 - eps) * (1.0 - eps).log2())
        };
        let c_s_f = row["c_s_f"].as_f64().unwrap();
        assert!(
            (c_s_f - (1.0 - h)).abs() <= 1e-9,
            "row {i}: c_s_f {c_s_f} vs 1-H({eps})"
        );
    }
}

#[test]
fn sweep_rejects_empty_and_oversized_grids() {
    let out = modtap(&[
        "sweep",
        "--channel",
        "case:2,0.3,0.1",
        "--eps",
        "0.5:0.1:0.1",
    ]);
    assert_eq!(out.status.code(), Some(2));

    let out = modtap(&[
        "sweep",
        "--channel",
        "case:2,0.3,0.1",
        "--eps",
        "0:0.5:0.0000001",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_output_is_worker_count_independent() {
    let one = stdout(&modtap(&[
        "sweep",
        "--channel",
        "case:2,0.3,0.1",
        "--eps",
        "0.05:0.45:0.05",
        "--delta",
        "0.05:0.45:0.05",
        "--workers",
        "1",
    ]));
    let eight = stdout(&modtap(&[
        "sweep",
        "--channel",
        "case:2,0.3,0.1",
        "--eps",
        "0.05:0.45:0.05",
        "--delta",
        "0.05:0.45:0.05",
        "--workers",
        "8",
    ]));
    assert_eq!(one, eight);
    assert_eq!(one.lines().count(), 1 + 81);
}

#[test]
fn bad_channel_spec_exits_with_config_code() {
    let out = modtap(&["rates", "--channel", "case:9,0.1,0.1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = modtap(&["rates", "--channel", "/nonexistent/file.channel"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn oversized_bound_search_is_reported_not_skipped() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("five.channel");
    let mut text = String::from("[channel]\nx_size = 5\ny_size = 5\nz_size = 5\n[noise]\n");
    for k in 0..5 {
        text.push_str(&format!("row = {k} {k} 0.2\n"));
    }
    fs::write(&path, text).unwrap();
    let out = modtap(&["rates", "--channel", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("|X|"), "must name the limit: {stderr}");
}

#[test]
fn verify_passes_and_sabotage_fails() {
    let out = modtap(&["verify", "--max-n", "3", "--max-messages", "2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.lines().skip(1).all(|l| l.starts_with("PASS")));

    let out = modtap(&[
        "verify",
        "--max-n",
        "3",
        "--max-messages",
        "2",
        "--sabotage-zero-key",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stdout(&out).contains("FAIL"));
}

#[test]
fn verify_marks_budget_skips() {
    // 3^14 wiretap sequences exceed the enumeration budget; those entries
    // must be reported as skips, not failures.
    let out = modtap(&["verify", "--max-n", "14", "--max-messages", "1"]);
    assert!(out.status.success(), "skips must not fail the run");
    let text = stdout(&out);
    assert!(text.contains("SKIP"));
    assert!(text.contains("budget"));
}

#[test]
fn explicit_channel_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ternary.channel");
    fs::write(
        &path,
        "[channel]\nx_size = 3\ny_size = 3\nz_size = 3\n\n[noise]\nrow = 0 0 0.62\nrow = 0 1 0.04\nrow = 0 2 0.04\nrow = 1 0 0.05\nrow = 1 1 0.1\nrow = 1 2 0.02\nrow = 2 0 0.03\nrow = 2 1 0.02\nrow = 2 2 0.08\n",
    )
    .unwrap();
    let out = modtap(&[
        "rates",
        "--channel",
        path.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let rows: Vec<serde_json::Value> = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(rows[0]["c_s"].is_null());
    assert!(rows[0]["hd_rate"].is_null());
    assert!(rows[0]["pd_lower"].as_f64().unwrap() <= rows[0]["pd_upper"].as_f64().unwrap());
}

#[test]
fn zero_key_simulation_leaks() {
    let out = stdout(&modtap(&[
        "simulate",
        "--channel",
        "case:1",
        "--n",
        "4",
        "--messages",
        "4",
        "--trials",
        "200",
        "--zero-key",
        "--format",
        "json",
    ]));
    let rows: Vec<serde_json::Value> = serde_json::from_str(&out).unwrap();
    assert!(rows[0]["exact_mi"].as_f64().unwrap() > 0.5);

    let clean = stdout(&modtap(&[
        "simulate",
        "--channel",
        "case:1",
        "--n",
        "4",
        "--messages",
        "4",
        "--trials",
        "200",
        "--format",
        "json",
    ]));
    let rows: Vec<serde_json::Value> = serde_json::from_str(&clean).unwrap();
    assert!(rows[0]["exact_mi"].as_f64().unwrap() <= 1e-12);
}

#[test]
fn transcript_dump_format_is_documented_order() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.dump");
    let out = modtap(&[
        "simulate",
        "--channel",
        "case:2,0.1,0.3",
        "--mode",
        "half",
        "--n",
        "6",
        "--messages",
        "2",
        "--t",
        "0.5",
        "--trials",
        "10",
        "--transcripts",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let dump = fs::read_to_string(&path).unwrap();
    assert_eq!(dump.lines().count(), 10);
    let first: Vec<&str> = dump.lines().next().unwrap().split(' ').collect();
    // trial, w, x, x1, y, z, decoded_w, mask
    assert_eq!(first.len(), 8);
    assert_eq!(first[0], "0");
    assert_eq!(first[2].len(), 6);
    assert_eq!(first[7].len(), 6);
    // mask marks exactly the slots where the destination transmitted
    let x1 = first[3];
    let mask = first[7];
    for (c1, cm) in x1.chars().zip(mask.chars()) {
        assert_eq!(cm == '1', c1 != '0');
    }
}

#[test]
fn half_duplex_extreme_t_guesses() {
    let out = stdout(&modtap(&[
        "simulate",
        "--channel",
        "case:2,0.1,0.3",
        "--mode",
        "half",
        "--n",
        "8",
        "--messages",
        "4",
        "--t",
        "1",
        "--trials",
        "2000",
        "--format",
        "json",
    ]));
    let rows: Vec<serde_json::Value> = serde_json::from_str(&out).unwrap();
    assert_eq!(rows[0]["erasure_fraction"].as_f64().unwrap(), 1.0);
    let err = rows[0]["error_rate"].as_f64().unwrap();
    assert!((err - 0.75).abs() < 0.05, "guessing error {err}");
}

#[test]
fn shipped_fixture_channels_parse() {
    for name in ["ternary.channel", "case5.channel"] {
        let fixture = Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("fixtures")
            .join(name);
        let out = modtap(&["rates", "--channel", fixture.to_str().unwrap()]);
        assert!(out.status.success(), "fixture {name} must parse");
    }
}
