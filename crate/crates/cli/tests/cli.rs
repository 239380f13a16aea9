//! CLI surface tests: exit codes, parse errors, strict mode, cache
//! persistence, and fixed CSV headers.

use std::process::Command;

fn volterra() -> Command {
    Command::new(env!("CARGO_BIN_EXE_volterra"))
}

#[test]
fn classify_json_has_schema_and_17_digit_floats() {
    let out = volterra()
        .args(["classify", "--weight", "std:alpha=1"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"schema\": 1"), "{text}");
    assert!(text.contains("\"command\": \"classify\""));
    // 17 significant digits: the D̂ constant 4 prints in full
    assert!(text.contains("4.0000000000000000e0"), "{text}");
    let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(parsed["report"]["dhat"]["verdict"], "Member");
}

#[test]
fn weight_parse_error_exits_2_with_position() {
    let out = volterra()
        .args(["classify", "--weight", "std:alpha=abc"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("byte"), "{err}");
}

#[test]
fn unsupported_regime_names_the_hypothesis() {
    let out = volterra()
        .args([
            "criterion",
            "--p",
            "0.75",
            "--weight",
            "exp:c=1,gamma=1",
            "--which",
            "trivial-dirichlet",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("Unsupported"), "{text}");
    assert!(text.contains("upper doubling"), "{text}");
}

#[test]
fn strict_flag_fails_on_inconclusive() {
    // alpha = 1.99 at p = 2 sits too close to the threshold for the depth
    // budget: both forms stay undecided
    let out = volterra()
        .args([
            "criterion",
            "--p",
            "2",
            "--weight",
            "std:alpha=1.99",
            "--strict",
        ])
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    // without --strict the same run succeeds and reports Inconclusive
    let out = volterra()
        .args(["criterion", "--p", "2", "--weight", "std:alpha=1.99"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .contains("Inconclusive"));
}

#[test]
fn criterion_csv_header_is_fixed() {
    let out = volterra()
        .args([
            "criterion",
            "--p",
            "2",
            "--weight",
            "std:alpha=2.5",
            "--format",
            "csv",
        ])
        .output()
        .unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with(
        "criterion,p,weight,verdict,compact_verdict,sup_estimate,limsup_estimate,value,divergence_slope\n"
    ));
    assert!(text.contains("TrivialOnly"));
}

#[test]
fn sweep_csv_one_row_per_p() {
    let out = volterra()
        .args([
            "sweep",
            "--p",
            "0.6:0.8:0.1",
            "--weight",
            "std:alpha=2p-2",
            "--format",
            "csv",
        ])
        .output()
        .unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 4, "{text}"); // header + 3 rows
    assert!(rows[1].starts_with("5.9999999999999998e-1,"), "{}", rows[1]);
}

#[test]
fn norm_command_reports_all_kinds() {
    let out = volterra()
        .args([
            "norm", "--symbol", "poly:0,1", "--p", "2", "--format", "csv",
        ])
        .output()
        .unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    for kind in [
        "Hp(2)", "Apw(", "Dpw(", "Hlpw(", "Zygmund", "Bloch", "BMOA", "Hinf",
    ] {
        assert!(text.contains(kind), "missing {kind} in {text}");
    }
}

#[test]
fn symbol_accepts_bare_list_and_files() {
    let dir = std::env::temp_dir().join("volterra-sym-test");
    std::fs::create_dir_all(&dir).unwrap();
    let csv = dir.join("f.csv");
    std::fs::write(&csv, "index,re,im\n0,1,0\n1,1,0\n").unwrap();
    for symbol in ["1,1".to_string(), format!("csv:{}", csv.display())] {
        let out = volterra()
            .args(["norm", "--symbol", &symbol, "--format", "csv"])
            .output()
            .unwrap();
        let text = String::from_utf8(out.stdout).unwrap();
        // ‖1+z‖_{H²} = √2
        assert!(text.contains("1.4142135623"), "{symbol}: {text}");
    }
}

#[test]
fn cache_dir_round_trip() {
    let dir = std::env::temp_dir().join(format!("volterra-cache-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let run = || {
        volterra()
            .env("VOLTERRA_CACHE_DIR", &dir)
            .args([
                "norm",
                "--symbol",
                "poly:0,1,0.5",
                "--weight",
                "osc:base=std:alpha=1,amp=0.5,period=2",
            ])
            .output()
            .unwrap()
    };
    let a = run();
    assert!(a.status.success());
    let files: Vec<_> = std::fs::read_dir(&dir).unwrap().collect();
    assert!(!files.is_empty(), "no cache file written");
    let b = run();
    assert_eq!(a.stdout, b.stdout, "cache must not change results");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn verify_runs_single_suite() {
    let out = volterra()
        .args([
            "verify", "--suite", "volterra", "--seed", "3", "--format", "csv",
        ])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("check,pass,detail\n"));
    assert!(text.contains("volterra/backend-agreement,true"));
}
