use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_giantgyro"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("giantgyro-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Header and numeric rows, skipping `#` comments.
fn table(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header = reader.headers().unwrap().iter().map(String::from).collect();
    let rows = reader
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn column(header: &[String], rows: &[Vec<String>], name: &str) -> Vec<f64> {
    let k = header
        .iter()
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("no column {name}"));
    rows.iter().map(|r| r[k].parse().unwrap()).collect()
}

#[test]
fn sigma_sweep_of_strict_braided() {
    let o = run(&[
        "sigma",
        "--topology",
        "braided-i",
        "--n",
        "2",
        "--m",
        "2",
        "--phi-steps",
        "400",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.starts_with("# topology=braided-i"));
    let (header, rows) = table(&text);
    assert_eq!(header, ["phi", "phi_over_pi", "sigma"]);
    assert_eq!(rows.len(), 400);
    let sigma = column(&header, &rows, "sigma");
    assert!(sigma.iter().all(|&s| (-1e-12..=0.8 + 1e-12).contains(&s)));
    assert!((sigma.iter().cloned().fold(0.0, f64::max) - 0.8).abs() < 1e-12);
}

#[test]
fn separated_layout_is_fully_directional() {
    let o = run(&[
        "sigma",
        "--topology",
        "separated-i",
        "--n",
        "3",
        "--m",
        "2",
        "--phi-steps",
        "33",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let (header, rows) = table(&stdout(&o));
    assert!(column(&header, &rows, "sigma").iter().all(|&s| s == 1.0));
}

#[test]
fn missing_point_count_is_a_usage_error() {
    let o = run(&["sigma", "--topology", "braided-i", "--n", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--m"), "{}", stderr(&o));
}

#[test]
fn malformed_flags_are_usage_errors() {
    assert_eq!(run(&["sigma", "--phi", "halfpi"]).status.code(), Some(2));
    assert_eq!(
        run(&["sigma", "--topology", "spiral"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn invalid_physics_names_the_field() {
    let o = run(&["sigma", "--kappa", "-1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("kappa_a"), "{}", stderr(&o));
    let o = run(&["sigma", "--co", "-0.1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`co`"), "{}", stderr(&o));
}

#[test]
fn validate_passes_on_defaults() {
    let o = run(&["validate", "--samples", "10", "--omega-points", "41"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.lines().count() >= 8);
    assert!(!text.contains("FAIL"));
}

#[test]
fn injected_gain_fails_passivity() {
    let o = run(&[
        "validate",
        "--gamma-x",
        "-0.5",
        "--samples",
        "5",
        "--omega-points",
        "11",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL passivity"), "{}", stdout(&o));
}

#[test]
fn unitarity_table_over_a_wide_span() {
    let dir = scratch("unitarity");
    let path = dir.join("u.csv");
    let o = run(&[
        "validate",
        "--check",
        "unitarity",
        "--omega-span",
        "10",
        "--samples",
        "0",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let (header, rows) = table(&std::fs::read_to_string(&path).unwrap());
    assert_eq!(header, ["check", "x", "residual", "bound"]);
    assert_eq!(rows.len(), 201);
    let omega = column(&header, &rows, "x");
    assert_eq!(omega[0], -100.0);
    assert_eq!(omega[200], 100.0);
    assert!(column(&header, &rows, "residual")
        .iter()
        .all(|&r| r < 1e-10));
}

#[test]
fn comparison_against_the_coincident_baseline() {
    let o = run(&["compare", "--baseline", "traditional-i", "--phi", "pi"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (header, rows) = table(&stdout(&o));
    assert_eq!(rows.len(), 50);
    let co = column(&header, &rows, "co");
    let ratio = column(&header, &rows, "alpha_ratio");
    let k = co.iter().position(|&c| (c - 0.1).abs() < 1e-12).unwrap();
    assert!((ratio[k] - 0.6255).abs() < 1e-3, "{}", ratio[k]);
    assert!(stderr(&o).contains("alpha ratio 0.625"), "{}", stderr(&o));
}

#[test]
fn comparison_against_direct_coupling() {
    let o = run(&["compare", "--baseline", "traditional-ii"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (header, rows) = table(&stdout(&o));
    assert!(column(&header, &rows, "beta_ratio")
        .iter()
        .all(|r| r.is_finite() && *r > 0.0));
}

#[test]
fn sensitivity_with_both_methods() {
    let o = run(&[
        "sensitivity",
        "--numeric",
        "--closed",
        "--kappa",
        "1000",
        "--phi-steps",
        "9",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (header, rows) = table(&stdout(&o));
    assert_eq!(
        header,
        [
            "phi",
            "phi_over_pi",
            "alpha_numeric",
            "beta_numeric",
            "alpha_closed",
            "beta_closed",
            "alpha_rel_err",
            "beta_rel_err"
        ]
    );
    assert_eq!(rows.len(), 9);
    for name in ["alpha_rel_err", "beta_rel_err"] {
        assert!(
            column(&header, &rows, name).iter().all(|&e| e < 0.01),
            "{name}"
        );
    }
}

#[test]
fn closed_sensitivity_needs_a_closed_case() {
    let o = run(&[
        "sensitivity",
        "--closed",
        "--topology",
        "separated-i",
        "--n",
        "1",
        "--m",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn snr_reports_match_closed_forms() {
    let o = run(&["snr", "--phi-steps", "17"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (header, rows) = table(&stdout(&o));
    assert_eq!(rows.len(), 17);
    assert!(rows.iter().all(|r| r[0] == "braided-i(n=2, m=2)"));
    for port in ["alpha", "beta"] {
        let numeric = column(&header, &rows, &format!("{port}_snr"));
        let closed = column(&header, &rows, &format!("{port}_snr_closed"));
        for (n, c) in numeric.iter().zip(&closed) {
            assert!((n - c).abs() < 1e-9 * c.max(1.0), "{port}: {n} vs {c}");
        }
    }
}

#[test]
fn snr_figure_writes_three_panels() {
    let dir = scratch("f4");
    let o = run(&["snr", "--figure", "f4", "--out", dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let mut files: Vec<String> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    files.sort();
    assert_eq!(files, ["f4_co_0.01.csv", "f4_co_0.05.csv", "f4_co_0.1.csv"]);
    for f in &files {
        let (header, rows) = table(&std::fs::read_to_string(dir.join(f)).unwrap());
        assert_eq!(header[0], "phi");
        assert_eq!(rows.len(), 401);
    }
}

#[test]
fn reciprocal_points_of_strict_braided() {
    let o = run(&["reciprocal-points"]);
    assert_eq!(o.status.code(), Some(0));
    let (header, rows) = table(&stdout(&o));
    let phi = column(&header, &rows, "phi_over_pi");
    assert_eq!(rows.len(), 4);
    for (p, want) in phi.iter().zip([0.5, 1.5, 0.5, 1.5]) {
        assert!((p - want).abs() < 1e-6);
    }
    assert_eq!(
        run(&["reciprocal-points", "--topology", "direct"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn dynamics_settles_on_the_steady_state() {
    let o = run(&["dynamics", "--steps-per-tau", "8", "--record-every", "800"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (header, rows) = table(&stdout(&o));
    assert_eq!(header.len(), 11);
    assert_eq!(column(&header, &rows, "t").last().copied(), Some(60.0));
    let line = stderr(&o);
    let rel: f64 = line
        .split("relative ")
        .nth(1)
        .and_then(|s| s.trim().trim_end_matches(')').parse().ok())
        .unwrap_or_else(|| panic!("{line}"));
    assert!(rel < 1e-6, "{line}");
}

fn identical_runs(args: &[&str], dir: &Path) {
    let a = run(args);
    let first: Vec<(PathBuf, Vec<u8>)> = snapshot(dir);
    let b = run(args);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(first, snapshot(dir));
}

fn snapshot(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut files: Vec<(PathBuf, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            let bytes = std::fs::read(&p).unwrap();
            (p, bytes)
        })
        .collect();
    files.sort();
    files
}

#[test]
fn output_is_deterministic() {
    let dir = scratch("determinism");
    identical_runs(&["sigma", "--phi-steps", "64"], &dir);
    identical_runs(
        &[
            "snr",
            "--phi-steps",
            "16",
            "--topology",
            "braided-ii",
            "--n",
            "3",
            "--m",
            "2",
        ],
        &dir,
    );
    identical_runs(&["figures", "--out", dir.to_str().unwrap()], &dir);
    identical_runs(
        &[
            "validate",
            "--seed",
            "3",
            "--samples",
            "5",
            "--omega-points",
            "11",
            "--out",
            dir.join("v.csv").to_str().unwrap(),
        ],
        &dir,
    );
}

#[test]
fn figures_cover_every_panel() {
    let dir = scratch("figures");
    let o = run(&["figures", "--out", dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let names: Vec<String> = snapshot(&dir)
        .into_iter()
        .map(|(p, _)| p.file_name().unwrap().to_str().unwrap().to_string())
        .collect();
    for id in [
        "f3", "f4", "f5", "f6", "f7", "f8", "f9", "f10", "f11", "f12",
    ] {
        assert!(
            names.iter().any(|n| n.starts_with(&format!("{id}_"))),
            "{id}: {names:?}"
        );
    }
}

#[test]
fn config_round_trip_through_the_binary() {
    let dir = scratch("config");
    let first = stdout(&run(&[
        "config",
        "--co",
        "0.25",
        "--phi",
        "0.5pi",
        "--topology",
        "nested-ii",
        "--n",
        "4",
        "--m",
        "2",
        "--nest-index",
        "1",
    ]));
    let path = dir.join("run.toml");
    std::fs::write(&path, &first).unwrap();
    let second = stdout(&run(&["config", "--config", path.to_str().unwrap()]));
    assert_eq!(first, second);
    assert!(first.contains("co = 0.25"));
    assert!(first.contains("topology = \"nested-ii\""));
}

#[test]
fn flags_override_file_values() {
    let dir = scratch("override");
    let path = dir.join("run.toml");
    std::fs::write(
        &path,
        "[system]\nco = 0.2\ngamma_x = 2.0\n[structure]\ntopology = \"braided-i\"\nn = 2\nm = 3\n",
    )
    .unwrap();
    let p = path.to_str().unwrap();
    let text = stdout(&run(&[
        "config",
        "--config",
        p,
        "--co",
        "0.3",
        "--topology",
        "braided-ii",
    ]));
    assert!(text.contains("co = 0.3"));
    assert!(text.contains("gamma_x = 2.0"));
    assert!(
        text.contains("topology = \"braided-ii\"\nn = 2\nm = 3"),
        "{text}"
    );
}

#[test]
fn bad_config_files_are_usage_errors() {
    let dir = scratch("badconfig");
    let path = dir.join("bad.toml");
    std::fs::write(&path, "[system]\nkapa = 1.0\n").unwrap();
    let o = run(&["sigma", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("kapa"), "{}", stderr(&o));
    std::fs::write(&path, "[system]\ngamma_y = -1.0\n").unwrap();
    let o = run(&["sigma", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("gamma_y"), "{}", stderr(&o));
    let o = run(&[
        "sigma",
        "--config",
        dir.join("missing.toml").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}
