use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use timedelay::poles::Classification;
use timedelay_cli::{run, ModelConfig, Report, RunConfig, REPORT_SCHEMA};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_timedelay"));
    cmd.env_remove("TIMEDELAY_OUT");
    cmd
}

fn run_bin(args: &[&str], out: &Path) -> Output {
    bin()
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn assert_schema_valid(json: &Value) {
    let schema: Value = serde_json::from_str(REPORT_SCHEMA).unwrap();
    let compiled = jsonschema::JSONSchema::compile(&schema).expect("schema compiles");
    if let Err(errors) = compiled.validate(json) {
        let msgs: Vec<String> = errors.map(|e| format!("{} at {}", e, e.instance_path)).collect();
        panic!("report does not match schema:\n{}", msgs.join("\n"));
    };
}

fn report_json(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

#[test]
fn every_subcommand_emits_schema_valid_report() {
    for (cmd, extra) in [
        ("sqwell", vec![]),
        ("sqwell", vec!["--l", "1"]),
        ("deltashell", vec![]),
        ("step", vec![]),
        ("data", vec![]),
    ] {
        let dir = tempfile::tempdir().unwrap();
        let mut args = vec![cmd];
        args.extend(extra.iter().copied());
        let out = run_bin(&args, dir.path());
        assert!(
            out.status.success(),
            "{cmd}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert_schema_valid(&report_json(dir.path()));
    }
}

#[test]
fn schema_rejects_malformed_report() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run_bin(&["step"], dir.path()).status.success());
    let mut json = report_json(dir.path());
    json["count"]["n"] = Value::from("four");
    let schema: Value = serde_json::from_str(REPORT_SCHEMA).unwrap();
    let compiled = jsonschema::JSONSchema::compile(&schema).unwrap();
    assert!(!compiled.is_valid(&json));
}

#[test]
fn report_round_trips_through_json() {
    for model in [
        ModelConfig::Sqwell {
            v0: 5.0,
            a: 10.0,
            l: 0,
        },
        ModelConfig::Step {
            v1: 1.0,
            v2: 1.0,
            a: 1.31,
        },
        ModelConfig::Data {
            file: None,
            smooth: 3,
        },
    ] {
        let report = run(&RunConfig::defaults(model)).unwrap();
        let text = serde_json::to_string(&report).unwrap();
        let back: Report = serde_json::from_str(&text).unwrap();
        assert_eq!(back, report);
    }
}

#[test]
fn identical_config_gives_byte_identical_csv() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [&a, &b] {
        assert!(run_bin(&["sqwell", "--emax", "5", "--grid", "401"], dir.path())
            .status
            .success());
    }
    let names = [
        "fig1a_l0_exact.csv",
        "fig1a_l0_lorentzian.csv",
        "fig1b_l0_exact.csv",
    ];
    for name in names {
        let x = fs::read(a.path().join(name)).unwrap();
        let y = fs::read(b.path().join(name)).unwrap();
        assert_eq!(x, y, "{name} differs between runs");
    }
}

#[test]
fn csv_is_two_columns_lf_seventeen_digits() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run_bin(&["step", "--grid", "64"], dir.path()).status.success());
    let text = fs::read_to_string(dir.path().join("fig3_reflectivity.csv")).unwrap();
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("E,value"));
    let first = lines.next().unwrap();
    for field in first.split(',') {
        let mantissa = field
            .split('e')
            .next()
            .unwrap()
            .trim_start_matches('-')
            .replace('.', "");
        assert_eq!(mantissa.len(), 17, "{field}");
        field.parse::<f64>().unwrap();
    }
    assert_eq!(text.lines().count(), 65);
}

#[test]
fn figure_files_are_named_per_figure() {
    let cases: [(&[&str], &[&str]); 4] = [
        (
            &["sqwell"],
            &[
                "fig1a_l0_exact.csv",
                "fig1a_l0_lorentzian.csv",
                "fig1b_l0_exact.csv",
            ],
        ),
        (&["deltashell"], &["fig2_exact.csv", "fig2_lorentzian.csv"]),
        (
            &["step"],
            &["fig3_reflectivity.csv", "fig3_theta.csv", "fig3_delay.csv"],
        ),
        (&["data"], &["fig4_delay.csv", "fig4_phase_deg.csv"]),
    ];
    for (args, files) in cases {
        let dir = tempfile::tempdir().unwrap();
        assert!(run_bin(args, dir.path()).status.success());
        for f in files {
            assert!(dir.path().join(f).is_file(), "{args:?} did not write {f}");
        }
    }
}

#[test]
fn json_format_writes_only_report() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run_bin(&["step", "--format", "json"], dir.path())
        .status
        .success());
    let entries: Vec<_> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    assert_eq!(entries, vec!["report.json"]);
    assert_eq!(report_json(dir.path())["curves"].as_array().unwrap().len(), 3);
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["step", "--grid", "64"])
        .env("TIMEDELAY_OUT", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("report.json").is_file());
}

#[test]
fn validation_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["sqwell", "--grid", "5"],
        vec!["sqwell", "--a", "-1"],
        vec!["deltashell", "--emin", "5", "--emax", "1"],
        vec!["step", "--tol", "0"],
        vec!["step", "--a", "0"],
        vec!["data", "--file", "/definitely/not/here.csv"],
        vec!["sqwell", "--no-such-flag"],
    ] {
        let out = run_bin(&args, dir.path());
        assert_eq!(
            out.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn error_message_names_originating_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_bin(&["sqwell", "--a", "-1"], dir.path());
    assert!(String::from_utf8_lossy(&out.stderr).contains("InvalidModel"));
}

#[test]
fn malformed_table_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("bad.csv");
    fs::write(
        &table,
        "W_MeV,delta_deg\n1100,10\n1110,abc\n1120,30\n1130,40\n1140,50\n",
    )
    .unwrap();
    let out = run_bin(&["data", "--file", table.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("ParseError"));
}

#[test]
fn square_well_count_matches_delay_peaks() {
    let config = RunConfig {
        emin: 1e-6,
        emax: 10.0,
        ..RunConfig::defaults(ModelConfig::Sqwell {
            v0: 5.0,
            a: 10.0,
            l: 0,
        })
    };
    let report = run(&config).unwrap();
    assert_eq!(report.count.n, report.delay_peaks as i64);
    assert!(report.reconstruction.is_some());
}

#[test]
fn delta_shell_has_four_resonances_below_170() {
    let report = run(&RunConfig::defaults(ModelConfig::Deltashell { v0: 10.0, a: 1.0 })).unwrap();
    let inside = report
        .poles
        .iter()
        .filter(|p| p.classification == Classification::Resonance && p.energy.re <= 170.0)
        .count();
    assert_eq!(inside, 4);
    assert_eq!(report.count.n, 4);
}

#[test]
fn step_dip_position() {
    let config = RunConfig {
        emin: 2.0,
        emax: 10.0,
        ..RunConfig::defaults(ModelConfig::Step {
            v1: 1.0,
            v2: 1.0,
            a: 1.31,
        })
    };
    let dip = run(&config).unwrap().dip.expect("dip found");
    assert!((dip.position - 2.0445).abs() <= 1e-3, "{}", dip.position);
    let extremum = dip.delay_extremum.expect("delay extremum paired with dip");
    assert!((extremum - dip.position).abs() <= 5e-3);
}

#[test]
fn data_run_echoes_resolved_window() {
    let report = run(&RunConfig::defaults(ModelConfig::Data {
        file: None,
        smooth: 1,
    }))
    .unwrap();
    let c = &report.provenance.config;
    assert!(c.emin.is_finite() && c.emax.is_finite() && c.emin < c.emax);
    let r = report.resonance.expect("resonance extracted");
    assert!(r.m > c.emin && r.m < c.emax && r.gamma > 0.0);
}

#[test]
fn curve_deserialization_enforces_invariants() {
    use timedelay::numerics::Curve;
    let good: Curve = serde_json::from_str(r#"{"energies":[0,1,2],"values":[1,2,3],"label":"t"}"#).unwrap();
    assert_eq!(good.len(), 3);
    for bad in [
        r#"{"energies":[0,2,1],"values":[1,2,3],"label":"t"}"#,
        r#"{"energies":[0,1],"values":[1,2,3],"label":"t"}"#,
        r#"{"energies":[0,0,2],"values":[1,2,3],"label":"t"}"#,
    ] {
        assert!(serde_json::from_str::<Curve>(bad).is_err(), "{bad}");
    }
}
