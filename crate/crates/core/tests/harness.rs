use std::process::Command;

use acfield::harness::output::{csv_body, COLUMNS};
use acfield::harness::{parse_spec, parse_spec_str, run, ExperimentKind, ExperimentSpec, KRule};
use acfield::Error;
use proptest::prelude::*;

fn config_line(err: Error) -> (usize, String) {
    match err {
        Error::Config { line, msg } => (line, msg),
        other => panic!("expected a config error, got {other:?}"),
    }
}

#[test]
fn minimal_file_takes_defaults() {
    let spec = parse_spec_str("[experiment]\nkind = ghost-force\n").unwrap();
    assert_eq!(spec, ExperimentSpec::new(ExperimentKind::GhostForce));
    assert_eq!(spec.k(80), 20);
    assert_eq!(spec.n_list, vec![80]);
}

#[test]
fn comments_and_lists() {
    let text = "# header\n[experiment]\nkind = error-convergence ; trailing\nseed = 9\n\n\
                [chain]\nN = 160, 40, 80, 40\nK = 5\n[sweep]\nstrains = 1.0, 1.3\n";
    let spec = parse_spec_str(text).unwrap();
    assert_eq!(spec.seed, 9);
    assert_eq!(spec.n_list, vec![40, 80, 160]);
    assert_eq!(spec.k_rule, KRule::Fixed(5));
    assert_eq!(spec.strains, vec![1.0, 1.3]);
}

#[test]
fn duplicate_key_names_both_lines() {
    let (line, msg) = config_line(parse_spec_str("[experiment]\nkind = bc-gap\n\nkind = stability\n").unwrap_err());
    assert_eq!(line, 4);
    assert!(msg.contains("line 2") && msg.contains("line 4"), "{msg}");
}

#[test]
fn unknown_keys_and_sections() {
    let (line, msg) = config_line(parse_spec_str("[experiment]\nkind = bc-gap\n[chain]\nM = 3\n").unwrap_err());
    assert_eq!(line, 4);
    assert!(msg.contains("unknown key `M`"), "{msg}");
    let (line, msg) = config_line(parse_spec_str("[experiment]\nkind = bc-gap\n[solver]\n").unwrap_err());
    assert_eq!(line, 3);
    assert!(msg.contains("[solver]"), "{msg}");
    let (line, _) = config_line(parse_spec_str("kind = bc-gap\n").unwrap_err());
    assert_eq!(line, 1);
}

#[test]
fn type_mismatch_reports_line_and_value() {
    let (line, msg) = config_line(parse_spec_str("[experiment]\nkind = bc-gap\nseed = -3\n").unwrap_err());
    assert_eq!(line, 3);
    assert!(msg.contains("`seed`") && msg.contains("`-3`"), "{msg}");
    let (line, _) = config_line(parse_spec_str("[experiment]\nkind = nope\n").unwrap_err());
    assert_eq!(line, 2);
}

#[test]
fn missing_kind() {
    match parse_spec_str("[model]\nm = 1.5\n").unwrap_err() {
        Error::MissingKey { section, key } => assert_eq!((section.as_str(), key.as_str()), ("experiment", "kind")),
        other => panic!("{other:?}"),
    }
}

#[test]
fn invalid_values_are_rejected() {
    assert!(parse_spec_str("[experiment]\nkind = bc-gap\n[model]\nF = 0.4\n").is_err());
    assert!(parse_spec_str("[experiment]\nkind = bc-gap\n[chain]\nN = 8\nK = 8\n").is_err());
    assert!(parse_spec_str("[experiment]\nkind = bc-gap\n[chain]\ntau_max = 2\n").is_err());
}

fn kinds() -> impl Strategy<Value = ExperimentKind> {
    (0..ExperimentKind::ALL.len()).prop_map(|i| ExperimentKind::ALL[i])
}

proptest! {
    #[test]
    fn resolved_spec_round_trips(
        kind in kinds(),
        seed in any::<u64>(),
        strain in 0.6..3.0_f64,
        ns in prop::collection::btree_set(8usize..400, 1..5),
        d in 2usize..6,
        configurations in 1usize..20,
    ) {
        let mut spec = ExperimentSpec::new(kind);
        spec.seed = seed;
        spec.strain = strain;
        spec.n_list = ns.into_iter().collect();
        spec.k_rule = KRule::Fraction(d);
        spec.configurations = configurations;
        let back = parse_spec_str(&spec.to_config_string()).unwrap();
        prop_assert_eq!(back, spec);
    }
}

#[test]
fn csv_has_header_block_and_fixed_columns() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = ExperimentSpec::new(ExperimentKind::CbClosedForm);
    spec.n_list = vec![20];
    let out = run(&spec, dir.path()).unwrap();
    let text = std::fs::read_to_string(&out.path).unwrap();
    assert!(text.lines().next().unwrap().starts_with("# acfield"));
    assert!(text.contains("# kind = cb-closed-form"));
    let body = csv_body(&text);
    assert_eq!(body.lines().next().unwrap(), COLUMNS.join(","));
    assert_eq!(body.lines().count(), 1 + out.rows.len());

    // the embedded spec parses back to the one that was run
    let embedded: String = text
        .lines()
        .take_while(|l| l.starts_with('#'))
        .skip(3)
        .map(|l| format!("{}\n", l.trim_start_matches('#').trim_start()))
        .collect();
    assert_eq!(parse_spec_str(&embedded).unwrap(), spec);
}

#[test]
fn repeated_runs_have_identical_bodies() {
    let mut spec = ExperimentSpec::new(ExperimentKind::GradientAudit);
    spec.n_list = vec![20];
    spec.k_rule = KRule::Fixed(9);
    spec.tau_max = 1e-2;
    spec.configurations = 2;
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let ra = run(&spec, a.path()).unwrap();
    let rb = run(&spec, b.path()).unwrap();
    assert!(ra.hard_failures.is_empty(), "{:?}", ra.hard_failures);
    let body = |p: &std::path::Path| csv_body(&std::fs::read_to_string(p).unwrap());
    assert_eq!(body(&ra.path), body(&rb.path));
}

#[test]
fn cli_run_and_errors() {
    let exe = env!("CARGO_BIN_EXE_acfield");
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("ghost.ini");
    std::fs::write(&spec, "[experiment]\nkind = ghost-force\n[chain]\nN = 30\nK = 10\n").unwrap();
    let out = dir.path().join("out");
    let st = Command::new(exe).arg("run").arg(&spec).arg("--out").arg(&out).args(["--seed", "4"]).output().unwrap();
    assert!(st.status.success());
    let text = std::fs::read_to_string(out.join("ghost-force.csv")).unwrap();
    assert!(text.contains("# seed = 4"));
    assert_eq!(parse_spec(&spec).unwrap().kind, ExperimentKind::GhostForce);

    std::fs::write(&spec, "[experiment]\nkind = ghost-force\nkind = bc-gap\n").unwrap();
    let o = Command::new(exe).arg("run").arg(&spec).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));

    let o = Command::new(exe).arg("version").output().unwrap();
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("acfield "));

    let o = Command::new(exe).arg("run").arg(&spec).env("ACFIELD_JOBS", "zero").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}
