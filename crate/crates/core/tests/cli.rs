use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn cli(args: &[&str], out: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_affine-caps"));
    cmd.args(args).env_remove("AFFINE_CAPS_OUT");
    if let Some(dir) = out {
        cmd.arg("--out").arg(dir);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn progressions_listing() {
    let o = cli(&["progressions", "-p", "11", "-D", "0,1,3,4,5", "--Dprime", "0,1,3", "-b", "9"], None);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("(1, 3, 5), (3, 4, 5), (5, 3, 1), (5, 4, 3)"), "{}", stdout(&o));
}

#[test]
fn check_writes_a_bundle_that_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(&["check", "-p", "11", "-D", "0,1,3,4,5", "--Dprime", "0,1,3"], Some(dir.path()));
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let file = dir.path().join("check-p11-0-1-3-4-5.json");
    let o = cli(&["cert-verify", file.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("bundle: ok"));

    let text = fs::read_to_string(&file).unwrap();
    let mut bundle: serde_json::Value = serde_json::from_str(&text).unwrap();
    bundle["representatives"].as_array_mut().unwrap().pop();
    fs::write(&file, bundle.to_string()).unwrap();
    let o = cli(&["cert-verify", file.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAILED"));
}

#[test]
fn inadmissible_pair_reports_collinear_points() {
    let o = cli(&["check", "-p", "13", "-D", "0,1,2,3,4"], None);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("not admissible"));
    assert!(text.contains("collinear in S(D, D', 5)"), "{text}");
}

#[test]
fn verify_counts_points() {
    let dir = tempfile::tempdir().unwrap();
    let export = dir.path().join("cap.txt");
    let o = cli(
        &[
            "verify",
            "-p",
            "11",
            "-D",
            "0,1,3,4,5",
            "--Dprime",
            "0,1,3",
            "-n",
            "5",
            "--export",
            export.to_str().unwrap(),
            "--format",
            "json",
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["points"], 240);
    assert_eq!(v["result"]["status"], "ok");

    // Add the third point of a line through two cap points.
    let mut text = fs::read_to_string(&export).unwrap();
    let pts: Vec<Vec<u32>> = text.lines().take(2).map(|l| l.split(' ').map(|x| x.parse().unwrap()).collect()).collect();
    let third: Vec<String> = pts[0].iter().zip(&pts[1]).map(|(x, y)| ((2 * y + 11 - x) % 11).to_string()).collect();
    text.push_str(&third.join(" "));
    text.push('\n');
    fs::write(&export, text).unwrap();
    let o = cli(&["verify", "-p", "11", "--points", export.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("are collinear"));
}

#[test]
fn search_seven() {
    let o = cli(&["search", "-p", "7", "--format", "json"], None);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["max_size"], 3);
    assert_eq!(v["maximality"]["status"], "proven");
}

#[test]
fn resumed_search_matches_fresh() {
    let fresh = tempfile::tempdir().unwrap();
    let o = cli(&["search", "-p", "11", "--dedup"], Some(fresh.path()));
    assert_eq!(o.status.code(), Some(0));

    let resumed = tempfile::tempdir().unwrap();
    let o = cli(&["search", "-p", "11", "--dedup", "--max-candidates", "4"], Some(resumed.path()));
    assert_eq!(o.status.code(), Some(3));
    let o = cli(&["search", "-p", "11", "--dedup"], Some(resumed.path()));
    assert_eq!(o.status.code(), Some(0));

    let a = fs::read(fresh.path().join("report-p11.json")).unwrap();
    let b = fs::read(resumed.path().join("report-p11.json")).unwrap();
    assert_eq!(a, b);
    let o = cli(&["cert-verify", resumed.path().join("report-p11.json").to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn bad_input_is_an_error() {
    let o = cli(&["classes", "-p", "9"], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
    let o = cli(&["verify", "-p", "11", "-D", "0,1,3,4,5", "-n", "7"], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn classes_of_23() {
    let o = cli(&["classes", "-p", "23"], None);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 4);
    assert!(text.lines().next().unwrap().contains("x + z = 2y"));
}
