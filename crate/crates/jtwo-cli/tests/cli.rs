use std::process::{Command, Output};

fn jtwo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jtwo")).args(args).env_remove("JTWO_DATA").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn verify_command_passes() {
    let o = jtwo(&["verify", "paper", "--max-degree", "600"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    for n in 1..=8 {
        assert!(text.contains(&format!("criterion {n}: PASS")), "{text}");
    }
}

#[test]
fn output_is_reproducible() {
    let a = jtwo(&["compute", "j2", "--max-degree", "200"]);
    let b = jtwo(&["compute", "j2", "--max-degree", "200"]);
    assert_eq!(a.stdout, b.stdout);
    let v1 = jtwo(&["verify", "paper", "--max-degree", "300"]);
    let v2 = jtwo(&["verify", "paper", "--max-degree", "300"]);
    assert_eq!(v1.stdout, v2.stdout);
}

#[test]
fn quotient_row_at_144() {
    let o = jtwo(&["compute", "quotient", "--ideal", "3,v1^1", "--max-degree", "150"]);
    assert_eq!(o.status.code(), Some(0));
    let rows: Vec<String> = stdout(&o).lines().filter(|l| l.starts_with("144\t")).map(String::from).collect();
    assert_eq!(rows.len(), 1);
    assert!(rows[0].contains("Δ⁶") && rows[0].split('\t').nth(3) == Some("3"), "{rows:?}");
}

#[test]
fn empty_chart_is_header_only() {
    let o = jtwo(&["emit", "chart", "--format", "tsv", "--window", "1..2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "stem\tfiltration\tlabel\torder\tcolor\n");
}

#[test]
fn svg_chart() {
    let o = jtwo(&["emit", "chart", "--format", "svg", "--max-degree", "40", "--color", "hurewicz"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.starts_with("<?xml") && s.contains("orange"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(jtwo(&["compute"]).status.code(), Some(1));
    assert_eq!(jtwo(&["compute", "quotient", "--ideal", "5"]).status.code(), Some(1));
    assert_eq!(jtwo(&["emit", "chart", "--window", "0..700"]).status.code(), Some(1));
    assert_eq!(jtwo(&["--help"]).status.code(), Some(0));
}

#[test]
fn fixture_mismatch_exits_two() {
    let dir = std::env::temp_dir().join(format!("jtwo-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.dat");
    let text = jtwo::tmf::TmfData::default_text().replace("e0a6f9ee", "00a6f9ee");
    std::fs::write(&path, text).unwrap();
    let o = jtwo(&["compute", "j2", "--max-degree", "60", "--data", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("fixture mismatch"));
    let o = Command::new(env!("CARGO_BIN_EXE_jtwo"))
        .args(["compute", "tmf", "--max-degree", "40"])
        .env("JTWO_DATA", &path)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "tmf digest is untouched");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn product_file_check() {
    let dir = std::env::temp_dir().join(format!("jtwo-prod-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let good = dir.join("good.txt");
    std::fs::write(&good, "# degree 94\nb1*b1*b5 zero-in-j2\na1*b1*b2 nonzero-in-j2\nb1^3*b6/3 nonzero\n").unwrap();
    let o = jtwo(&["check", "products", good.to_str().unwrap(), "--max-degree", "200"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let bad = dir.join("bad.txt");
    std::fs::write(&bad, "b1*b1*b5 nonzero\n").unwrap();
    assert_eq!(jtwo(&["check", "products", bad.to_str().unwrap(), "--max-degree", "200"]).status.code(), Some(2));
    std::fs::write(&bad, "b1*b1*b5 perhaps\n").unwrap();
    assert_eq!(jtwo(&["check", "products", bad.to_str().unwrap(), "--max-degree", "200"]).status.code(), Some(1));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn theorem_b_report() {
    let o = jtwo(&["check", "products", "--max-degree", "900"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(!stdout(&o).contains("FAILED"));
}

#[test]
fn hurewicz_and_periodicity() {
    let o = jtwo(&["check", "hurewicz", "--max-degree", "300"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("| 26 | β2 | ∂(αΔ) |"));
    let o = jtwo(&["check", "periodicity", "--max-degree", "300"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(!stdout(&o).contains("FAIL"));
}

#[test]
fn strict_turns_warnings_into_failures() {
    let lax = jtwo(&["compute", "tmf-psi", "--max-degree", "100"]);
    assert_eq!(lax.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&lax.stderr).contains("warning"));
    assert_eq!(jtwo(&["compute", "tmf-psi", "--max-degree", "100", "--strict"]).status.code(), Some(2));
}
