use std::path::{Path, PathBuf};
use std::process::Command;

fn perskern(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_perskern"))
        .args(args)
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn orbit_config(dir: &Path) -> PathBuf {
    let path = dir.join("tiny.toml");
    std::fs::write(
        &path,
        r#"
name = "tiny"
output = "out"
[dataset]
kind = "orbits"
r_values = [2.5, 4.3]
n_orbits = 8
n_points = 60
seed = 1
[filtration]
kind = "rips"
[diagrams]
dims = [1]
[protocol]
runs = 2
folds = 2
c_grid = [1.0, 10.0]
[kernels.pssk]
sigma = [0.01, 0.1]
[kernels.swk]
eta = [0.1]
"#,
    )
    .unwrap();
    path
}

#[test]
fn help_and_usage_errors() {
    assert_eq!(perskern(&["--help"]).0, 0);
    assert_eq!(perskern(&[]).0, 1);
    assert_eq!(perskern(&["bench", "--bogus"]).0, 1);
}

#[test]
fn config_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        perskern(&["diagrams", "-c", s(&dir.path().join("missing.toml"))]).0,
        1
    );
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "name = \"x\"\n[dataset]\nkind = \"nope\"\n").unwrap();
    let (code, _, err) = perskern(&["diagrams", "-c", s(&bad)]);
    assert_eq!(code, 1, "{err}");
    let cfg = orbit_config(dir.path());
    assert_eq!(perskern(&["bench", "-c", s(&cfg), "--folds", "1"]).0, 1);
}

#[test]
fn data_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("a.csv"), "0,0\n1,oops\n").unwrap();
    std::fs::write(dir.path().join("manifest.csv"), "a.csv,0\n").unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "name = \"x\"\n[dataset]\nkind = \"point_clouds\"\nmanifest = \"manifest.csv\"\n[filtration]\nkind = \"rips\"\n")
        .unwrap();
    let (code, _, err) = perskern(&["diagrams", "-c", s(&cfg)]);
    assert_eq!(code, 2, "{err}");
    assert!(err.contains("a.csv:2"), "{err}");
}

#[test]
fn numerical_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = orbit_config(dir.path());
    // the normalization overflows at this bandwidth
    let (code, _, err) = perskern(&[
        "gram",
        "-c",
        s(&cfg),
        "--kernel",
        r#"{"kernel":"PSSK","sigma":1e-320}"#,
    ]);
    assert_eq!(code, 3, "{err}");
}

#[test]
fn subcommands_write_their_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out, err) = perskern(&[
        "generate-orbits",
        "--r",
        "2.5,4.3",
        "--orbits",
        "2",
        "--points",
        "20",
        "--out",
        s(&dir.path().join("orbits")),
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("4 orbits"));
    assert_eq!(
        std::fs::read_dir(dir.path().join("orbits"))
            .unwrap()
            .count(),
        5
    );

    let cfg = orbit_config(dir.path());
    let out_dir = dir.path().join("out");
    assert_eq!(perskern(&["diagrams", "-c", s(&cfg)]).0, 0);
    assert!(out_dir.join("diagrams/r0-000.txt").exists());

    let (code, _, err) = perskern(&["gram", "-c", s(&cfg), "--kind", "PSSK"]);
    assert_eq!(code, 0, "{err}");
    let gram = std::fs::read_to_string(out_dir.join("gram-pssk.csv")).unwrap();
    assert_eq!(gram.lines().count(), 17);
    assert!(gram.starts_with("id,r0-000,"), "{gram}");

    let (code, _, err) = perskern(&["train", "-c", s(&cfg), "--kind", "SWK"]);
    assert_eq!(code, 0, "{err}");
    let model = std::fs::read_to_string(out_dir.join("model-swk.txt")).unwrap();
    assert!(model.parse::<perskern::svm::SavedModel>().is_ok());

    let (code, out, err) = perskern(&["bench", "-c", s(&cfg)]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("PSSK") && out.contains("SWK"));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("results.json")).unwrap())
            .unwrap();
    assert_eq!(json["rows"].as_array().unwrap().len(), 2);

    let (code, out, err) = perskern(&["sweep", "-c", s(&cfg), "--values", "0.01,1"]);
    assert_eq!(code, 0, "{err}");
    assert!(out.starts_with("sigma,condition"));
    assert!(out_dir.join("sweep-pssk.csv").exists());
}
