use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn axivem(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_axivem"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    let mut rdr = csv::Reader::from_path(path).unwrap();
    rdr.records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect()
}

fn column(rows: &[Vec<String>], i: usize) -> Vec<f64> {
    rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

#[test]
fn axial_patch_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = axivem(dir.path(), &["patch", "--case", "axial", "--out", "o"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("eps_z (Axial strain)"));
    assert!(!text.contains("FAIL"));

    let rows = read_csv(&dir.path().join("o/patch_axial.csv"));
    assert_eq!(rows.len(), 4);
    let computed = column(&rows, 1);
    assert!((computed[1] - 0.01).abs() <= 1e-12);
    assert!(computed[3].abs() <= 1e-6);
    let elements = read_csv(&dir.path().join("o/patch_axial_elements.csv"));
    assert_eq!(elements.len(), 16);
}

#[test]
fn refined_radial_patch_runs() {
    let dir = tempfile::tempdir().unwrap();
    let out = axivem(
        dir.path(),
        &["patch", "--case", "radial", "--mesh", "8x8", "--out", "o"],
    );
    assert_eq!(code(&out), 0);
    assert_eq!(read_csv(&dir.path().join("o/patch_radial_elements.csv")).len(), 64);
}

#[test]
fn patch_strains_ignore_tau() {
    let dir = tempfile::tempdir().unwrap();
    for (tau, sub) in [("1.0", "a"), ("0.01", "b")] {
        assert_eq!(
            code(&axivem(
                dir.path(),
                &["patch", "--case", "axial", "--tau", tau, "--out", sub]
            )),
            0
        );
    }
    let a = column(&read_csv(&dir.path().join("a/patch_axial.csv")), 1);
    let b = column(&read_csv(&dir.path().join("b/patch_axial.csv")), 1);
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() <= 1e-12, "{x} vs {y}");
    }
}

#[test]
fn quadratic_convergence() {
    let dir = tempfile::tempdir().unwrap();
    let out = axivem(dir.path(), &["converge", "--out", "o"]);
    assert_eq!(code(&out), 0);
    let rows = read_csv(&dir.path().join("o/converge.csv"));
    let h = column(&rows, 1);
    let e = column(&rows, 3);
    let rate = (e[0] / e[2]).ln() / (h[0] / h[2]).ln();
    assert!(rate >= 0.9, "rate {rate}");

    let strict = axivem(dir.path(), &["converge", "--min-rate", "1.5", "--out", "o"]);
    assert_eq!(code(&strict), 1);
}

#[test]
fn patch_field_converges_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let out = axivem(dir.path(), &["converge", "--field", "axial", "--out", "o"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8(out.stdout).unwrap().contains("fitted rate: exact"));
}

#[test]
fn usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let two_levels = axivem(dir.path(), &["converge", "--levels", "4,8"]);
    assert_eq!(code(&two_levels), 2);
    assert_eq!(code(&axivem(dir.path(), &["patch", "--case", "bogus"])), 2);
    assert_eq!(code(&axivem(dir.path(), &["patch", "--mesh", "4by4"])), 2);
    assert_eq!(code(&axivem(dir.path(), &["patch", "--nu", "0.5"])), 2);
    assert_eq!(
        code(&axivem(
            dir.path(),
            &["patch", "--E", "1", "--lambda", "1", "--mu", "1"]
        )),
        2
    );
    fs::write(dir.path().join("m.txt"), "1 0\n1 0\n").unwrap();
    assert_eq!(
        code(&axivem(dir.path(), &["patch", "--mesh", "2x2", "--mesh-file", "m.txt"])),
        2
    );
    fs::write(dir.path().join("bad.toml"), "[mesh]\nunknown = 1\n").unwrap();
    assert_eq!(code(&axivem(dir.path(), &["patch", "--config", "bad.toml"])), 2);
    assert_eq!(code(&axivem(dir.path(), &["dump-element", "--element", "99"])), 2);
}

const SINGLE_AXIAL: &str = "\
4 1
1 0
3 0
3 2
1 2
4 0 1 2 3
";

#[test]
fn single_element_axial_solve() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("square.mesh"), SINGLE_AXIAL).unwrap();
    fs::write(
        dir.path().join("run.toml"),
        "[mesh]\nfile = \"square.mesh\"\n[[bcs.dirichlet]]\nwhere = \"all\"\nfield = \"axial\"\n",
    )
    .unwrap();
    let out = axivem(
        dir.path(),
        &["solve", "--config", "run.toml", "--out", "o", "--dump-kernels"],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let rows = read_csv(&dir.path().join("o/elements.csv"));
    let eps: Vec<f64> = rows[0][1..5].iter().map(|s| s.parse().unwrap()).collect();
    assert!(eps[0].abs() <= 1e-12);
    assert!((eps[1] - 0.01).abs() <= 1e-12);
    assert!(eps[2].abs() <= 1e-12);
    assert!(eps[3].abs() <= 1e-6);
    assert!(fs::read_to_string(dir.path().join("o/kernels.txt"))
        .unwrap()
        .contains("K_s (8x8)"));
}

#[test]
fn zero_boundary_data_gives_zero_solution() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("run.toml"),
        "[[bcs.dirichlet]]\nwhere = \"boundary\"\nfield = \"zero\"\n",
    )
    .unwrap();
    assert_eq!(
        code(&axivem(dir.path(), &["solve", "--config", "run.toml", "--out", "o"])),
        0
    );
    let nodes = read_csv(&dir.path().join("o/nodes.csv"));
    assert_eq!(nodes.len(), 25);
    for row in &nodes {
        assert_eq!(row[3].parse::<f64>().unwrap(), 0.0);
        assert_eq!(row[4].parse::<f64>().unwrap(), 0.0);
    }
}

#[test]
fn outer_pressure_load_sums() {
    let dir = tempfile::tempdir().unwrap();
    let p = 0.7;
    fs::write(
        dir.path().join("run.toml"),
        format!(
            "[[bcs.dirichlet]]\nwhere = \"r=1\"\nur = 0.0\nuz = 0.0\n\
             [[bcs.traction]]\nwhere = \"r=3\"\nt = [{p}, 0.0]\n"
        ),
    )
    .unwrap();
    assert_eq!(
        code(&axivem(dir.path(), &["solve", "--config", "run.toml", "--out", "o"])),
        0
    );
    let loads = read_csv(&dir.path().join("o/loads.csv"));
    let fr: f64 = column(&loads, 1).iter().sum();
    let fz: f64 = column(&loads, 2).iter().sum();
    // outer edges have total length 2 and sit at r = 3
    assert!((fr - p * 3.0 * 2.0).abs() <= 1e-12, "{fr}");
    assert_eq!(fz, 0.0);
}

#[test]
fn missing_axial_constraint_is_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("run.toml"),
        "[[bcs.dirichlet]]\nwhere = \"r=1\"\nur = 0.0\n",
    )
    .unwrap();
    let out = axivem(dir.path(), &["solve", "--config", "run.toml", "--out", "o"]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8(out.stderr).unwrap().contains("axial"));
}

#[test]
fn mesh_file_boundary_blocks() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!("{SINGLE_AXIAL}dirichlet 4\n0 r 0\n0 z 0\n3 r 0\n3 z 0\ntraction 1\n1 2 1 0\n");
    fs::write(dir.path().join("m.mesh"), text).unwrap();
    let out = axivem(dir.path(), &["solve", "--mesh-file", "m.mesh", "--out", "o"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let loads = read_csv(&dir.path().join("o/loads.csv"));
    let fr: f64 = column(&loads, 1).iter().sum();
    assert!((fr - 6.0).abs() <= 1e-12);
}

#[test]
fn csv_values_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        code(&axivem(dir.path(), &["patch", "--case", "shear", "--out", "o"])),
        0
    );
    let rows = read_csv(&dir.path().join("o/patch_shear_elements.csv"));
    for row in rows {
        for field in &row[1..] {
            let x: f64 = field.parse().unwrap();
            assert_eq!(&x.to_string(), field);
            assert_eq!(format!("{x:.16e}").parse::<f64>().unwrap(), x);
        }
    }
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&axivem(dir.path(), &["patch", "--mesh", "6x6", "--out", "a"])), 0);
    assert_eq!(
        code(&axivem(
            dir.path(),
            &["patch", "--mesh", "6x6", "--out", "b", "--serial"]
        )),
        0
    );
    for case in ["radial", "axial", "hoop", "shear"] {
        let name = format!("patch_{case}_elements.csv");
        assert_eq!(
            fs::read(dir.path().join("a").join(&name)).unwrap(),
            fs::read(dir.path().join("b").join(&name)).unwrap()
        );
    }
}

#[test]
fn dump_element_prints_kernels() {
    let dir = tempfile::tempdir().unwrap();
    let out = axivem(dir.path(), &["dump-element", "--element", "5", "--out", "o"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    for block in ["B (4x8)", "P (8x8)", "K_c (8x8)", "K_s (8x8)", "K (8x8)"] {
        assert!(text.contains(block), "{block}");
    }
    assert!(dir.path().join("o/element_5.txt").exists());
}
