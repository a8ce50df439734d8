use std::process::{Command, Output};

fn qosc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qosc"))
        .args(args)
        .output()
        .expect("spawn qosc")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

/// Parsed CSV body rows (header checked against the contract).
fn rows(csv: &str) -> Vec<Vec<f64>> {
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().expect("header"),
        "t,mean_x,mean_p,sigma_xx,sigma_pp,sigma_xp,delta,g0,g1,g2"
    );
    lines
        .map(|line| {
            line.split(',')
                .map(|v| v.parse::<f64>().expect("numeric cell"))
                .collect()
        })
        .collect()
}

const NORMATIVE: &[&str] = &[
    "evolve", "--eq", "kl", "--omega0", "1", "--gamma", "0.5", "--b", "0.5", "--init",
    "coherent:1,0", "--t-max", "20", "--dt", "0.1",
];

#[test]
fn normative_example_reaches_the_equilibrium_uncertainty() {
    let out = qosc(NORMATIVE);
    assert_eq!(code(&out), 0);
    let rows = rows(&stdout(&out));
    assert_eq!(rows.len(), 201);
    let last = rows.last().unwrap();
    assert_eq!(last[0], 20.0);
    assert!((last[6] - 0.25).abs() < 1e-3, "final delta {}", last[6]);
}

#[test]
fn zero_horizon_gives_a_single_row_equal_to_the_initial_state() {
    let out = qosc(&[
        "evolve", "--eq", "kl", "--gamma", "0.5", "--init", "coherent:1.5,-0.5", "--t-max", "0",
        "--dt", "0.1",
    ]);
    assert_eq!(code(&out), 0);
    let rows = rows(&stdout(&out));
    assert_eq!(rows.len(), 1);
    let row = &rows[0];
    assert_eq!(&row[..6], &[0.0, 1.5, -0.5, 0.5, 0.5, 0.0]);
    assert_eq!(row[7..10], [0.0, 0.0, 0.0]);
}

#[test]
fn delta_column_matches_the_serialized_covariances_exactly() {
    let out = qosc(&[
        "evolve", "--eq", "hpz", "--gamma", "0.2", "--b", "0.8", "--d", "0.15", "--init",
        "principal:1,-0.5,0.7,0.3,0.4", "--t-max", "6", "--dt", "0.37",
    ]);
    assert_eq!(code(&out), 0);
    for row in rows(&stdout(&out)) {
        let (sxx, spp, sxp, delta) = (row[3], row[4], row[5], row[6]);
        // 17-digit serialization round-trips f64, so the recomputation must
        // agree to the last bit
        assert_eq!(delta, sxx * spp - sxp * sxp);
    }
}

#[test]
fn strict_mode_rejects_the_anomalous_preset_with_a_report() {
    let out = qosc(&[
        "evolve", "--eq", "hpz", "--omega0", "1", "--gamma", "0.05", "--b", "0.5", "--d", "-1.2",
        "--t-max", "20", "--dt", "0.1", "--strict",
    ]);
    assert_eq!(code(&out), 3);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("physicality violation"), "report: {err}");
    assert!(err.contains("long-time limit"), "report: {err}");
}

#[test]
fn below_threshold_temperature_needs_the_override() {
    let args = [
        "evolve", "--eq", "kl", "--gamma", "0.5", "--b", "0.3", "--t-max", "1", "--dt", "0.5",
    ];
    let refused = qosc(&args);
    assert_eq!(code(&refused), 2);
    let mut allowed = args.to_vec();
    allowed.push("--allow-low-b");
    assert_eq!(code(&qosc(&allowed)), 0);
}

#[test]
fn unphysical_initial_state_needs_the_override() {
    let args = [
        "evolve", "--eq", "kl", "--gamma", "0.5", "--init", "principal:0,0,0.3,0,0", "--t-max",
        "1", "--dt", "0.5",
    ];
    let refused = qosc(&args);
    assert_eq!(code(&refused), 2);
    let mut allowed = args.to_vec();
    allowed.push("--allow-unphysical");
    assert_eq!(code(&qosc(&allowed)), 0);
}

#[test]
fn output_is_byte_deterministic() {
    let a = qosc(NORMATIVE);
    let b = qosc(NORMATIVE);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn flags_override_config_file_values() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    std::fs::write(
        &path,
        r#"{"eq": "kl", "gamma": 0.5, "b": 0.7, "init": "vacuum", "t-max": 2.0, "dt": 0.5}"#,
    )
    .unwrap();
    let cfg = path.to_str().unwrap();
    let from_file = qosc(&["evolve", "--config", cfg]);
    assert_eq!(code(&from_file), 0);
    let file_rows = rows(&stdout(&from_file));
    assert_eq!(file_rows.len(), 5);
    // b = 0.7 drives sigma_xx above the vacuum value
    assert!(file_rows.last().unwrap()[3] > 0.6);

    let overridden = qosc(&["evolve", "--config", cfg, "--b", "0.5"]);
    assert_eq!(code(&overridden), 0);
    // b = 0.5 keeps the vacuum covariance fixed
    assert_eq!(rows(&stdout(&overridden)).last().unwrap()[3], 0.5);
}

#[test]
fn config_files_with_unknown_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"eq": "kl", "gamm": 0.5}"#).unwrap();
    let out = qosc(&["evolve", "--config", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
}

#[test]
fn oracle_cross_check_passes_on_a_coarse_grid() {
    let out = qosc(&[
        "evolve", "--eq", "cl", "--gamma", "0.3", "--b", "0.6", "--init", "coherent:0.8,-0.4",
        "--t-max", "2", "--dt", "0.5", "--oracle", "--dim", "24",
    ]);
    assert_eq!(code(&out), 0);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("oracle check passed"), "stderr: {err}");
}

#[test]
fn validate_commutators_passes() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let out = qosc(&[
        "validate",
        "commutators",
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("commutator-table: PASS"));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json[0]["suite"], "commutators");
    assert_eq!(json[0]["checks"][0]["passed"], true);
}

#[test]
fn validate_limits_passes() {
    let out = qosc(&["validate", "limits"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("long-time-limits: PASS"));
    assert!(text.contains("positivity-sentinel: PASS"));
}

#[test]
fn validate_rejects_unknown_suites() {
    assert_eq!(code(&qosc(&["validate", "nonsense"])), 2);
}

#[test]
fn sweep_writes_per_run_files_and_a_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("sw");
    let out = qosc(&[
        "sweep", "--eq", "cl", "--b", "0.6", "--param", "gamma", "--from", "0.1", "--to", "0.5",
        "--steps", "3", "--t-max", "4", "--dt", "0.5", "--workers", "3", "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let summary = std::fs::read_to_string(out_dir.join("summary.csv")).unwrap();
    let mut lines = summary.lines();
    assert_eq!(
        lines.next().unwrap(),
        "index,param,value,delta_final,delta_min,physical,file"
    );
    let body: Vec<&str> = lines.collect();
    assert_eq!(body.len(), 3);
    for (i, line) in body.iter().enumerate() {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells[0], i.to_string());
        assert_eq!(cells[1], "gamma");
        assert_eq!(cells[5], "true");
        assert_eq!(cells[6], format!("sweep_{i:03}.csv"));
        assert!(out_dir.join(cells[6]).is_file());
    }
    // swept values span [from, to] inclusive
    let first: f64 = body[0].split(',').nth(2).unwrap().parse().unwrap();
    let last: f64 = body[2].split(',').nth(2).unwrap().parse().unwrap();
    assert!((first - 0.1).abs() < 1e-12 && (last - 0.5).abs() < 1e-12);
}

#[test]
fn sweep_rejects_values_outside_the_valid_range_up_front() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("sw");
    // gamma = 2.5 puts the cl preset past the oscillatory regime
    let out = qosc(&[
        "sweep", "--eq", "cl", "--b", "0.6", "--param", "gamma", "--from", "0.5", "--to", "2.5",
        "--steps", "3", "--t-max", "2", "--dt", "0.5", "--out-dir", out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    assert!(!out_dir.join("summary.csv").exists());
}

#[test]
fn table_prints_every_generator() {
    let out = qosc(&["table", "--param", "0.5"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    for name in [
        "rotation",
        "hyperbolic-rotation",
        "scaling",
        "relaxation",
        "isotropic-diffusion",
        "anisotropic-diffusion",
        "cross-diffusion",
    ] {
        assert!(text.contains(name), "missing {name} in:\n{text}");
    }
}

#[test]
fn unknown_flags_are_usage_errors() {
    assert_eq!(code(&qosc(&["evolve", "--bogus"])), 2);
    assert_eq!(code(&qosc(&["nonsense"])), 2);
}

#[test]
fn raw_coefficients_replicate_the_lindblad_preset() {
    let preset = qosc(&[
        "evolve", "--eq", "kl", "--omega0", "1", "--gamma", "0.5", "--b", "0.5", "--init",
        "coherent:1,0", "--t-max", "2", "--dt", "0.5",
    ]);
    let raw = qosc(&[
        "evolve", "--eq", "raw", "--theta", "2", "--gamma", "0.5", "--eta0", "-0.5", "--init",
        "coherent:1,0", "--t-max", "2", "--dt", "0.5",
    ]);
    assert_eq!(code(&preset), 0);
    assert_eq!(code(&raw), 0);
    let a = rows(&stdout(&preset));
    let b = rows(&stdout(&raw));
    for (ra, rb) in a.iter().zip(&b) {
        for (va, vb) in ra.iter().zip(rb) {
            assert!((va - vb).abs() < 1e-9, "{va} vs {vb}");
        }
    }
}

#[test]
fn parameters_the_selected_mode_would_ignore_are_rejected() {
    let preset_with_raw = qosc(&["evolve", "--eq", "kl", "--theta", "2", "--t-max", "1"]);
    assert_eq!(code(&preset_with_raw), 2);
    let err = String::from_utf8(preset_with_raw.stderr).unwrap();
    assert!(err.contains("theta"), "report: {err}");

    let raw_with_preset = qosc(&["evolve", "--eq", "raw", "--theta", "2", "--b", "0.7"]);
    assert_eq!(code(&raw_with_preset), 2);
    let err = String::from_utf8(raw_with_preset.stderr).unwrap();
    assert!(err.contains("b applies only to the presets"), "report: {err}");
}

#[test]
fn anomalous_diffusion_outside_hpz_is_rejected() {
    let evolve = qosc(&["evolve", "--eq", "kl", "--d", "0.5", "--t-max", "1"]);
    assert_eq!(code(&evolve), 2);

    // explicit zero stays accepted: shared configs carry "d": 0.0
    let zero = qosc(&["evolve", "--eq", "kl", "--d", "0", "--t-max", "1"]);
    assert_eq!(code(&zero), 0);

    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("sw");
    let sweep = qosc(&[
        "sweep", "--eq", "cl", "--param", "d", "--from", "0.1", "--to", "0.5", "--steps", "3",
        "--b", "0.6", "--t-max", "1", "--dt", "0.5", "--out-dir", out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&sweep), 2);
    assert!(!out_dir.exists(), "rejected sweep must not create output");
}

#[cfg(unix)]
#[test]
fn closing_the_output_pipe_kills_the_run_quietly() {
    use std::os::unix::process::ExitStatusExt;
    use std::process::Stdio;

    // a grid large enough that the CSV cannot fit in the pipe buffer
    let mut child = Command::new(env!("CARGO_BIN_EXE_qosc"))
        .args(["evolve", "--eq", "kl", "--gamma", "0.5", "--t-max", "100", "--dt", "0.001"])
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn qosc");
    drop(child.stdout.take());
    let status = child.wait().expect("wait qosc");
    assert_eq!(status.signal(), Some(libc::SIGPIPE));
    let mut err = String::new();
    use std::io::Read;
    child.stderr.take().unwrap().read_to_string(&mut err).unwrap();
    assert!(err.is_empty(), "broken pipe must stay quiet, got: {err}");
}
