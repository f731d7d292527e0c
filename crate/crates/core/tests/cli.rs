use std::path::Path;
use std::process::{Command, Output};

fn cxmech(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cxmech"))
        .args(args)
        .output()
        .expect("spawn cxmech")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .skip(1)
        .map(|l| {
            l.split(',')
                .map(|x| {
                    if x.is_empty() {
                        f64::NAN
                    } else {
                        x.parse().unwrap()
                    }
                })
                .collect()
        })
        .collect()
}

#[test]
fn simulate_harmonic_smoke() {
    let o = cxmech(&[
        "simulate",
        "--scenario",
        "harmonic",
        "--param",
        "m=1",
        "--param",
        "k=1",
        "--q0",
        "1",
        "--p0",
        "0",
        "--t-end",
        "6.2832",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(
        out.lines().next().unwrap(),
        "t,q,p,re_z,im_z,qdot,pdot,kappa,arclen,energy"
    );
    let data = rows(&out);
    assert!(data.len() > 100);
    assert!(data.iter().flatten().all(|x| x.is_finite()));
    let summary: serde_json::Value = serde_json::from_str(&stderr(&o)).unwrap();
    assert_eq!(summary["schema"], 1);
    assert_eq!(summary["non_finite_rows"], 0);
    assert_eq!(summary["config"]["scenario"], "harmonic");
    assert_eq!(summary["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn csv_numbers_carry_sixteen_significant_digits() {
    let o = cxmech(&["simulate", "--t-end", "1", "--samples", "4"]);
    let line = stdout(&o).lines().nth(2).unwrap().to_string();
    for field in line.split(',') {
        let mantissa = field.split('e').next().unwrap().trim_start_matches('-');
        assert!(
            mantissa.chars().filter(char::is_ascii_digit).count() >= 15,
            "{field}"
        );
    }
}

#[test]
fn inline_hamiltonian_matches_attenuated_scenario() {
    let a = cxmech(&[
        "simulate",
        "--hamiltonian",
        "p^2/2+q^2/2+i*0.1/2*p^2",
        "--t-end",
        "5",
    ]);
    let b = cxmech(&[
        "simulate",
        "--scenario",
        "attenuated",
        "--param",
        "beta0=0.1",
        "--t-end",
        "5",
    ]);
    assert_eq!(code(&a), 0, "{}", stderr(&a));
    assert_eq!(code(&b), 0, "{}", stderr(&b));
    let (ra, rb) = (rows(&stdout(&a)), rows(&stdout(&b)));
    assert_eq!(ra.len(), rb.len());
    for (x, y) in ra.iter().zip(&rb) {
        for c in 0..7 {
            assert!(
                (x[c] - y[c]).abs() <= 1e-12 * (1.0 + y[c].abs()),
                "{x:?} vs {y:?}"
            );
        }
    }
}

#[test]
fn missing_parameter_exits_2_and_names_it() {
    let o = cxmech(&["simulate", "--hamiltonian", "p^2/(2*mass) + q^2/2"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("mass"), "{}", stderr(&o));
}

#[test]
fn unknown_scenario_exits_2() {
    let o = cxmech(&["geometry", "--scenario", "anharmonic"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn integration_failure_exits_3() {
    let o = cxmech(&[
        "simulate",
        "--hamiltonian",
        "q^4*p^2",
        "--q0",
        "3",
        "--p0",
        "3",
        "--t-end",
        "10",
    ]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
}

#[test]
fn nonlinear_quantization_exits_4_and_names_the_term() {
    let o = cxmech(&["quantize", "--scenario", "attenuated", "--param", "n=2"]);
    assert_eq!(code(&o), 4, "{}", stderr(&o));
    assert!(stderr(&o).contains("p^"), "{}", stderr(&o));
}

#[test]
fn quantize_harmonic_defaults_reproduce_reference_forms() {
    let o = cxmech(&["quantize"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["schema"], 1);
    for e in v["entries"].as_array().unwrap() {
        if let Some(d) = e["delta"].as_array() {
            assert!(d.iter().all(|x| x.as_f64().unwrap().abs() < 1e-14), "{e}");
        }
    }
}

#[test]
fn geometry_closed_orbit_and_straight_line() {
    let dir = tempfile::tempdir().unwrap();
    let rep = dir.path().join("orbit.json");
    let o = cxmech(&["geometry", "--q0", "1.3", "--report", rep.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = json(&rep);
    assert_eq!(v["closed"], true);
    assert_eq!(v["bounds"]["pass"], true);
    let e = v["energy"].as_f64().unwrap();
    assert!((v["energy_from_area"].as_f64().unwrap() - e).abs() / e < 1e-6);

    let rep = dir.path().join("line.json");
    let o = cxmech(&[
        "geometry",
        "--scenario",
        "imaginary",
        "--p0",
        "1",
        "--report",
        rep.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = json(&rep);
    assert!(v["max_abs_kappa"].as_f64().unwrap() < 1e-10);
    assert!(v["area"].is_null());
    assert!(v["area_note"].is_string());
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "scenario = \"attenuated\"\nt_end = 2.0\nq0 = 0.5\n[params]\nbeta0 = 0.3\n",
    )
    .unwrap();
    let rep = dir.path().join("r.json");
    let o = cxmech(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--q0",
        "0.75",
        "--report",
        rep.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = json(&rep);
    assert_eq!(v["config"]["q0"], 0.75);
    assert_eq!(v["config"]["t_end"], 2.0);
    assert_eq!(v["config"]["params"]["beta0"], 0.3);
    assert_eq!(rows(&stdout(&o))[0][1], 0.75);
}

#[test]
fn identical_config_is_bit_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let p = dir.path().join(name);
        let o = cxmech(&[
            "simulate",
            "--scenario",
            "attenuated",
            "--t-end",
            "7",
            "--csv",
            p.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0);
        std::fs::read(p).unwrap()
    };
    assert_eq!(run("a.csv"), run("b.csv"));
}

#[test]
fn verify_single_group() {
    let o = cxmech(&["verify", "--only", "duality"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let out = stdout(&o);
    assert!(out.contains("criterion  2 [duality] PASS"));
    assert_eq!(
        out.lines().filter(|l| l.starts_with("criterion")).count(),
        1
    );
}

#[test]
fn verify_unknown_group_exits_2() {
    assert_eq!(code(&cxmech(&["verify", "--only", "nonsense"])), 2);
}

#[test]
fn verify_reports_failure_with_exit_5() {
    let o = cxmech(&["verify", "--only", "poisson"]);
    assert_eq!(code(&o), 5);
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn omega_sign_flip_is_detected() {
    let o = cxmech(&["verify", "--only", "duality", "--inject-omega-sign-flip"]);
    assert_eq!(code(&o), 5);
    assert!(stdout(&o).contains("[duality] FAIL"));
    let o = cxmech(&["verify", "--only", "symplectic", "--inject-omega-sign-flip"]);
    assert_eq!(code(&o), 5);
    // a global sign keeps antisymmetry and the Jacobi sum; the matrix layout catches it
    let line = stdout(&o).lines().next().unwrap().to_string();
    assert!(
        line.contains("1 of 5 checks failed: vector/complex layout agreement"),
        "{line}"
    );
}
