use assoc_core::boundary::{to_off, SurfaceMesh};
use assoc_core::g2::G2Structure;
use assoc_gallery::acceptance::summary_report;
use assoc_gallery::acceptance::verify_all;
use assoc_gallery::algebra::CrossTable;
use assoc_gallery::{run_example, ExampleName, ExampleParams, ExampleSpec, Report, RunConfig};
use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn assoc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_assoc")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn schema() -> jsonschema::Validator {
    let text = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas/report.schema.json")).unwrap();
    jsonschema::validator_for(&serde_json::from_str::<Value>(&text).unwrap()).unwrap()
}

fn assert_valid(v: &jsonschema::Validator, report: &Value) {
    let errors: Vec<String> = v.iter_errors(report).map(|e| format!("{} at {}", e, e.instance_path)).collect();
    assert!(errors.is_empty(), "{}: {errors:?}", report["example"]);
}

fn small(name: ExampleName) -> ExampleSpec {
    let mut params = ExampleParams::default();
    match name {
        ExampleName::Torus3Closed | ExampleName::CyTorusS1 | ExampleName::CyTorusPerturbed => params.resolution = Some(8),
        ExampleName::StripCoassoc => {
            params.resolution = Some(8);
            params.refine = Some(vec![8, 16]);
        }
        ExampleName::SphereRho | ExampleName::Ellipsoid | ExampleName::BallConstantE => params.level = Some(2),
        ExampleName::JoyceInvolutions => {}
    }
    ExampleSpec { name, params }
}

#[test]
fn passing_example_exits_zero() {
    let o = assoc(&["example", "joyce-involutions"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let out = String::from_utf8(o.stdout).unwrap();
    assert_eq!(out.matches("[PASS] pullback-").count(), 5);
}

#[test]
fn fault_injection_gives_failure_exit_code() {
    let o = assoc(&["verify-algebra", "--inject-fault"]);
    assert_eq!(code(&o), 1);
    let out = String::from_utf8(o.stdout).unwrap();
    assert!(out.contains("[FAIL] 01"), "{out}");
    assert!(out.contains("failed cross-antisymmetry"), "{out}");
    assert_eq!(code(&assoc(&["verify-algebra"])), 0);
}

#[test]
fn configuration_errors_exit_two() {
    for args in [
        vec!["example", "no-such-example"],
        vec!["example", "sphere-rho", "--rho", "-1"],
        vec!["example", "cy-torus-perturbed", "--lambda", "0"],
        vec!["example", "torus3-closed", "--resolution", "7"],
        vec!["example", "sphere-rho", "--e", "0,0,1"],
        vec!["example", "sphere-rho", "--e", "1,0,0,0,0,0,0"],
        vec!["example", "torus3-closed", "--config", "/nonexistent/config.json"],
        vec!["no-such-verb"],
    ] {
        let o = assoc(&args);
        assert_eq!(code(&o), 2, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn bit_reproducible_reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |sub: &str| {
        let out = dir.path().join(sub);
        let args = ["example", "torus3-closed", "strip-coassoc", "--resolution", "8", "--refine", "8,16", "--bit-reproducible", "--seed", "7", "--format", "both", "--out", out.to_str().unwrap()];
        let o = assoc(&args);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
        out
    };
    let (a, b) = (run("a"), run("b"));
    let mut files: Vec<_> = std::fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    files.sort();
    assert_eq!(files.len(), 6);
    for f in files {
        assert_eq!(std::fs::read(a.join(&f)).unwrap(), std::fs::read(b.join(&f)).unwrap(), "{f:?}");
    }
    let report: Value = serde_json::from_slice(&std::fs::read(a.join("torus3-closed.json")).unwrap()).unwrap();
    assert_eq!(report["wall_time_ms"], 0);
    assert_eq!(report["seed"], 7);
}

#[test]
fn parallel_run_matches_sequential_run() {
    let dir = tempfile::tempdir().unwrap();
    let run = |sub: &str, extra: &[&str]| {
        let out = dir.path().join(sub);
        let mut args = vec!["example", "cy-torus-s1", "cy-torus-perturbed", "joyce-involutions", "--resolution", "8", "--bit-reproducible", "--out", out.to_str().unwrap()];
        args.extend_from_slice(extra);
        assert_eq!(code(&assoc(&args)), 0);
        out
    };
    let (seq, par) = (run("seq", &[]), run("par", &["--parallel"]));
    for name in ["cy-torus-s1.json", "cy-torus-perturbed.json", "joyce-involutions.json"] {
        assert_eq!(std::fs::read(seq.join(name)).unwrap(), std::fs::read(par.join(name)).unwrap());
    }
}

#[test]
fn config_file_mirrors_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let out = dir.path().join("reports");
    std::fs::write(&cfg, format!(r#"{{"resolution": 8, "seed": 3, "bit_reproducible": true, "out": {:?}}}"#, out.to_str().unwrap())).unwrap();
    assert_eq!(code(&assoc(&["example", "torus3-closed", "--config", cfg.to_str().unwrap()])), 0);
    let report: Value = serde_json::from_slice(&std::fs::read(out.join("torus3-closed.json")).unwrap()).unwrap();
    assert_eq!(report["parameters"]["resolution"], 8);
    assert_eq!(report["seed"], 3);
    // Flags override the file.
    assert_eq!(code(&assoc(&["example", "torus3-closed", "--config", cfg.to_str().unwrap(), "--seed", "4"])), 0);
    let report: Value = serde_json::from_slice(&std::fs::read(out.join("torus3-closed.json")).unwrap()).unwrap();
    assert_eq!(report["seed"], 4);
    std::fs::write(&cfg, r#"{"resoluton": 8}"#).unwrap();
    assert_eq!(code(&assoc(&["example", "torus3-closed", "--config", cfg.to_str().unwrap()])), 2);
}

#[test]
fn mesh_files_are_ingested() {
    let dir = tempfile::tempdir().unwrap();
    let st = G2Structure::standard();
    let path = dir.path().join("sphere.off");
    std::fs::write(&path, to_off(&SurfaceMesh::icosphere(3, 0.5, &st).unwrap())).unwrap();
    let out = dir.path().join("out");
    let o = assoc(&["boundary", "--mesh", path.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report: Value = serde_json::from_slice(&std::fs::read(out.join("mesh.json")).unwrap()).unwrap();
    // Eigenvalue 1/ρ = 2 on the sphere of radius ½; pointwise fits on a level-3
    // mesh scatter by about 10 %, the mean by far less.
    let lo = report["measurements"]["min-eigenvalue"].as_f64().unwrap();
    let hi = report["measurements"]["max-eigenvalue"].as_f64().unwrap();
    let mean = report["measurements"]["mean-eigenvalue"].as_f64().unwrap();
    assert!(lo > 1.7 && hi < 2.3, "{lo} {hi}");
    assert!((mean - 2.0).abs() < 0.04, "{mean}");
    assert_eq!(report["measurements"]["index"], 1.0);
    assert_valid(&schema(), &report);

    let bad = dir.path().join("bad.off");
    std::fs::write(&bad, "OFF\n3 1 0\n0 0 0\n1 0 x\n").unwrap();
    let o = assoc(&["boundary", "--mesh", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 4"));
}

#[test]
fn help_enumerates_the_catalog() {
    let o = assoc(&["--help"]);
    assert_eq!(code(&o), 0);
    let help = String::from_utf8(o.stdout).unwrap();
    for n in ExampleName::ALL {
        assert!(help.contains(n.as_str()), "{n}");
        assert!(help.contains(n.description().split_whitespace().next().unwrap()));
    }
    for verb in ["verify-algebra", "dirac", "boundary", "index", "example", "verify-all"] {
        assert!(help.contains(verb), "{verb}");
    }
}

#[test]
fn catalog_names_round_trip() {
    assert_eq!(ExampleName::ALL.len(), 8);
    for n in ExampleName::ALL {
        assert_eq!(ExampleName::parse(n.as_str()).unwrap(), n);
        assert_eq!(serde_json::to_value(n).unwrap(), Value::String(n.as_str().into()));
        assert!(!n.description().is_empty());
    }
}

#[test]
fn every_report_validates_against_the_schema() {
    let v = schema();
    let config = RunConfig::default();
    for name in ExampleName::ALL {
        let r = run_example(&small(name), &config).unwrap();
        assert!(r.pass, "{name}: {:?}", r.checks.iter().filter(|c| !c.pass).collect::<Vec<_>>());
        let json: Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_valid(&v, &json);
        let back: Report = serde_json::from_value(json).unwrap();
        assert_eq!(back.checks, r.checks);
    }
    let summary = summary_report(&verify_all(&CrossTable::corrupted(), 1)[..1], 1, true);
    assert_valid(&v, &serde_json::to_value(&summary).unwrap());
    let mut broken = serde_json::to_value(&summary).unwrap();
    broken["checks"][0]["pass"] = Value::String("yes".into());
    assert!(!v.is_valid(&broken));
}

#[test]
fn documented_examples() {
    let config = RunConfig::default();
    let r = run_example(&ExampleSpec::new(ExampleName::Torus3Closed), &config).unwrap();
    let s = &r.spectra[0];
    assert_eq!((s.dim_ker, s.index), (4, 0));
    assert_eq!(s.singular_values.len(), 64);
    assert_eq!(s.singular_value_count, 4 * 16 * 16 * 16);

    let r = run_example(&ExampleSpec::new(ExampleName::JoyceInvolutions), &config).unwrap();
    assert!(r.pass && r.checks.len() == 5);

    let mut spec = ExampleSpec::new(ExampleName::SphereRho);
    spec.params.rho = Some(0.5);
    let r = run_example(&spec, &config).unwrap();
    assert!(r.pass);
    assert_eq!(r.measurements["expected-eigenvalue"], 2.0);
}
