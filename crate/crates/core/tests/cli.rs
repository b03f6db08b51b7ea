use std::process::{Command, Output};

use fermisea::cli::{parse_args, RunConfig};
use fermisea::emission::{count_interior_maxima, sample_pattern, EmissionProblem, PatternVariant};
use fermisea::trap::{FermiSea, Shape, TrapGeometry};

fn fermisea(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fermisea"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = fermisea(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut reader = csv::Reader::from_reader(csv.as_bytes());
    let idx = reader.headers().unwrap().iter().position(|h| h == name).unwrap();
    reader.records().map(|r| r.unwrap()[idx].parse().unwrap()).collect()
}

#[test]
fn count_command() {
    let out = stdout(&["count", "--shape", "pancake", "--lambda", "2", "--nf", "2"]);
    assert_eq!(out, "n_f,states\n2,7\n");
}

#[test]
fn fermi_shell_command() {
    let out = stdout(&["fermi-shell", "--shape", "pancake", "--lambda", "2", "--atoms", "5"]);
    assert_eq!(out, "atoms,n_f,occupancy,degeneracy,closed\n5,2,2,4,false\n");
}

#[test]
fn empty_trap_pattern_is_flat() {
    let out = stdout(&["pattern", "--shape", "cigar", "--lambda", "7", "--eta2", "30", "--nf", "-1"]);
    let m = column(&out, "m_f");
    assert_eq!(m.len(), 721);
    assert!(m.iter().all(|&v| v == 1.0));
    assert!(out.starts_with("theta_deg,m_f\n0,1\n0.25,1\n"));
    assert!(!out.contains('\r'));
}

#[test]
fn figure_5b_has_two_fine_structure_maxima() {
    let out = stdout(&["figure", "5b"]);
    let theta: Vec<f64> = column(&out, "theta_deg").iter().map(|d| d.to_radians()).collect();
    let values = column(&out, "m_f");
    assert_eq!(theta.len(), 721);

    // rebuild the pattern from the printed values and count its maxima
    let p = EmissionProblem::new(TrapGeometry::new(Shape::Pancake, 11).unwrap(), FermiSea::new(23).unwrap(), 25.0).unwrap();
    let reference = sample_pattern(&p, 721, PatternVariant::Full).unwrap();
    for (a, b) in reference.values().iter().zip(&values) {
        assert!((a - b).abs() <= 1e-11 * a.abs().max(1e-300));
    }
    assert_eq!(count_interior_maxima(&reference).unwrap(), 2);
    let mut printed = 0;
    for i in 1..360 {
        if values[i] > values[i - 1] && values[i] > values[i + 1] {
            printed += 1;
        }
    }
    assert_eq!(printed, 2);
}

#[test]
fn json_echoes_the_parsed_config() {
    let args = ["shells", "--shape", "pancake", "--lambda", "10", "--eta2", "36", "--n-max", "30", "--format", "json"];
    let out = stdout(&args);
    let value: serde_json::Value = serde_json::from_str(&out).unwrap();
    let echoed: RunConfig = serde_json::from_value(value["params"].clone()).unwrap();
    let parsed = parse_args(std::iter::once("fermisea").chain(args)).unwrap();
    assert_eq!(echoed, parsed);
    let p = value["series"]["p_e"].as_array().unwrap();
    assert_eq!(p.len(), 31);
    assert!(p[20].as_f64().unwrap() > p[19].as_f64().unwrap());
}

#[test]
fn outputs_are_reproducible() {
    for args in [
        &["pattern", "--shape", "pancake", "--lambda", "4", "--eta2", "25", "--nf", "33", "--format", "json"][..],
        &["tight-sweep", "--eta2", "49", "--nf", "60", "--lambda-min", "1", "--lambda-max", "70"][..],
        &["degeneracy", "--shape", "cigar", "--lambda", "3", "--n-max", "30"][..],
        &["pattern", "--shape", "pancake", "--lambda", "11", "--eta2", "25", "--nf", "23", "--nz", "1", "--literal"][..],
    ] {
        assert_eq!(stdout(args), stdout(args));
    }
}

#[test]
fn svg_goes_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig6.svg");
    let out = fermisea(&["figure", "6", "--format", "svg", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let svg = std::fs::read_to_string(&path).unwrap();
    assert!(svg.starts_with("<svg xmlns=\"http://www.w3.org/2000/svg\""));
    assert!(svg.contains("radial-scale=linear"));
    assert_eq!(svg.matches("<polygon").count(), 3);
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| fermisea(args).status.code().unwrap();
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["pattern", "--shape", "pancake", "--lambda", "2.5", "--eta2", "1", "--nf", "1"]), 2);
    assert_eq!(code(&["pattern", "--shape", "pancake", "--lambda", "2", "--eta2", "-1", "--nf", "1"]), 2);
    assert_eq!(code(&["pattern", "--shape", "pancake", "--lambda", "2", "--eta2", "1"]), 2);
    assert_eq!(code(&["count", "--shape", "pancake", "--lambda", "2", "--nf", "1", "--colour"]), 2);
    assert_eq!(code(&["figure", "12"]), 2);
    assert_eq!(code(&["teleport"]), 2);
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("no/such/dir/out.csv");
    assert_eq!(code(&["figure", "4", "--out", missing.to_str().unwrap()]), 3);

    let err = String::from_utf8(fermisea(&["pattern", "--shape", "pancake", "--lambda", "2.5", "--eta2", "1", "--nf", "1"]).stderr).unwrap();
    assert!(err.contains("aspect ratio must be a positive integer"), "{err}");
}

#[test]
fn bad_quadrature_is_a_numerical_error() {
    // presets fix the node count, so the guard is reached through the library
    use fermisea::emission::angle_averaged_factor_checked;
    use fermisea::quadrature::{AngularAverage, AngularWeight};
    let p = EmissionProblem::new(TrapGeometry::new(Shape::Pancake, 10).unwrap(), FermiSea::new(20).unwrap(), 36.0).unwrap();
    let err = angle_averaged_factor_checked(&p, &AngularAverage::new(1, AngularWeight::Uniform)).unwrap_err();
    assert_eq!(fermisea::cli::RunError::from(err).exit_code(), 4);
}
