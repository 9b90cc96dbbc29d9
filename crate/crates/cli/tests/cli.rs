use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const FLAT: &str = r#"
[metric]
kind = "flat"
[particle]
m = 1.0
[domain]
x_min = -4.0
x_max = 4.0
[lattice]
eps = 4e-3
steps = 60
stride = 25
[packet]
x0 = 0.0
p0 = 2.0
sigma = 1.0
branch = "positive"
tail_tolerance = 1e-5
[geodesics]
seeds = [-1.0, 0.0, 1.0]
dt = 1e-2
[converge]
t_final = 0.32
pde_dx = 2e-3
"#;

fn pairwalk(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pairwalk"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn with_config(text: &str) -> TempDir {
    let dir = TempDir::new().unwrap();
    std::fs::write(dir.path().join("run.toml"), text).unwrap();
    dir
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn read(path: impl AsRef<Path>) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn flat_massless_origin_has_no_correction() {
    let dir = with_config("[metric]\nkind = \"flat\"\n[particle]\nm = 0.0\n[domain]\nx_min = -2.0\nx_max = 2.0\n[packet]\nx0 = 0.0\n");
    let out = pairwalk(dir.path(), &["--config", "run.toml", "--out", "o", "synthesize", "--at", "0", "0"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let dump: toml::Table = read(dir.path().join("o/operators.toml")).parse().unwrap();
    assert_eq!(stdout(&out).parse::<toml::Table>().unwrap(), dump);
    let wtilde = &dump["matrices"]["Wtilde"];
    for part in ["re", "im"] {
        for row in wtilde[part].as_array().unwrap() {
            for v in row.as_array().unwrap() {
                assert_eq!(v.as_float().unwrap(), 0.0);
            }
        }
    }
    assert_eq!(dump["certificates"]["passed"].as_bool(), Some(true));
}

#[test]
fn synthesize_outside_the_domain_is_a_domain_error() {
    let dir = TempDir::new().unwrap();
    let out = pairwalk(dir.path(), &["--out", "o", "synthesize", "--at", "0", "1.0"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn domain_inside_the_horizon_guard_is_rejected() {
    let dir = with_config("[domain]\nx_min = 1.02\n");
    let out = pairwalk(dir.path(), &["--config", "run.toml", "--out", "o", "simulate"]);
    assert_eq!(code(&out), 2);
    assert!(!dir.path().join("o/run.toml").exists());
}

#[test]
fn invalid_configs_exit_with_one() {
    for text in ["[lattice]\nepsilon = 1e-3\n", "[lattice]\neps = -1.0\n", "preset = \"huge\"\n", "[packet]\nx0 = 100.0\n"] {
        let dir = with_config(text);
        let out = pairwalk(dir.path(), &["--config", "run.toml", "check"]);
        assert_eq!(code(&out), 1, "{text}");
    }
}

#[test]
fn simulate_writes_snapshots_metadata_and_heatmap() {
    let dir = with_config(FLAT);
    let out = pairwalk(dir.path(), &["--config", "run.toml", "--out", "o", "simulate"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let o = dir.path().join("o");
    let mut snapshots: Vec<String> = std::fs::read_dir(&o)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.starts_with("snapshot_"))
        .collect();
    snapshots.sort();
    assert_eq!(snapshots, ["snapshot_000025.csv", "snapshot_000050.csv", "snapshot_000060.csv"]);

    let last = read(o.join("snapshot_000060.csv"));
    let mut lines = last.lines();
    assert_eq!(lines.next(), Some("t,x,density,re_psi_plus,im_psi_plus,re_psi_minus,im_psi_minus"));
    // 8 / (4 · 4e-3) cells, two fine sites each.
    assert_eq!(lines.count(), 1000);

    let run: toml::Table = read(o.join("run.toml")).parse().unwrap();
    assert_eq!(run["run"]["version"].as_str(), Some(env!("CARGO_PKG_VERSION")));
    assert_eq!(run["run"]["steps"].as_integer(), Some(60));
    assert!(run["run"]["norm_drift"].as_float().unwrap() < 1e-12);
    assert_eq!(run["config"]["metric"]["kind"].as_str(), Some("flat"));

    let pgm = std::fs::read(o.join("density.pgm")).unwrap();
    let header = b"P5\n1000 4\n255\n";
    assert_eq!(&pgm[..header.len()], header);
    assert_eq!(pgm.len(), header.len() + 4000);

    let geodesics = read(o.join("geodesics.csv"));
    assert!(geodesics.starts_with("seed,kind,t,x\n"));
    assert!(geodesics.lines().count() > 6);
}

#[test]
fn stride_beyond_the_run_keeps_only_the_final_snapshot() {
    let dir = with_config(&FLAT.replace("stride = 25", "stride = 1000"));
    let out = pairwalk(dir.path(), &["--config", "run.toml", "--out", "o", "simulate"]);
    assert_eq!(code(&out), 0);
    let names: Vec<String> = std::fs::read_dir(dir.path().join("o"))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.starts_with("snapshot_"))
        .collect();
    assert_eq!(names, ["snapshot_000060.csv"]);
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let dir = with_config(FLAT);
    for (threads, out) in [("1", "a"), ("3", "b")] {
        let run = pairwalk(dir.path(), &["--config", "run.toml", "--threads", threads, "--out", out, "simulate"]);
        assert_eq!(code(&run), 0);
    }
    for name in ["snapshot_000060.csv", "density.pgm", "geodesics.csv"] {
        assert_eq!(
            std::fs::read(dir.path().join("a").join(name)).unwrap(),
            std::fs::read(dir.path().join("b").join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn converge_needs_three_spacings() {
    let dir = with_config(FLAT);
    let out = pairwalk(dir.path(), &["--config", "run.toml", "converge", "--eps", "4e-3", "2e-3"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn converge_writes_a_decreasing_table() {
    let dir = with_config(FLAT);
    let out = pairwalk(dir.path(), &["--config", "run.toml", "--out", "o", "converge", "--eps", "8e-3", "4e-3", "2e-3"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = read(dir.path().join("o/convergence.txt"));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "eps,l2_error,linf_error");
    let l2: Vec<f64> = lines[1..4].iter().map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!(l2[0] > l2[1] && l2[1] > l2[2], "{l2:?}");
    assert!(lines[4].starts_with("slope = "));
}

#[test]
fn check_passes_on_the_desk_preset() {
    let dir = TempDir::new().unwrap();
    let out = pairwalk(dir.path(), &["--out", "o", "check"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let summary: toml::Table = stdout(&out).parse().unwrap();
    assert_eq!(summary["passed"].as_bool(), Some(true));
    let names: Vec<&str> =
        summary["check"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["certificates", "general_b", "unitarity", "causality"]);
}

fn table(e11_at: impl Fn(f64) -> f64) -> String {
    let mut text = String::from("t_min = 0\nt_max = 0\nnt = 1\nx_min = 0\nx_max = 4\nnx = 41\nt,x,e00,e11,e01,e10\n");
    for k in 0..41 {
        let x = k as f64 * 0.1;
        text.push_str(&format!("0,{x},1,{},0,0\n", e11_at(x)));
    }
    text
}

#[test]
fn corrupted_table_fails_the_certificate_check() {
    let config = "[metric]\nkind = \"tabulated\"\npath = \"dyads.txt\"\nrescale = false\n[particle]\nm = 1.0\n\
                  [domain]\nx_min = 0.0\nx_max = 4.0\n[packet]\nx0 = 2.0\n";
    let dir = with_config(config);
    std::fs::write(dir.path().join("dyads.txt"), table(|x| if x > 2.5 { 1.4 } else { 0.8 })).unwrap();
    let out = pairwalk(dir.path(), &["--config", "run.toml", "--out", "o", "check"]);
    assert_eq!(code(&out), 3);
    let summary: toml::Table = read(dir.path().join("o/check.toml")).parse().unwrap();
    assert_eq!(summary["passed"].as_bool(), Some(false));
    let certs = &summary["check"].as_array().unwrap()[0];
    assert_eq!(certs["passed"].as_bool(), Some(false));
    assert!(certs["detail"].as_str().unwrap().contains("leave [-1, 1]"));

    // The same table is accepted once time is rescaled.
    std::fs::write(dir.path().join("run.toml"), config.replace("rescale = false", "rescale = true")).unwrap();
    let out = pairwalk(dir.path(), &["--config", "run.toml", "--out", "o", "check"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
}

#[test]
fn empty_seed_list_gives_a_header_only_file() {
    let dir = TempDir::new().unwrap();
    let out = pairwalk(dir.path(), &["--out", "o", "geodesics", "--seeds"]);
    assert_eq!(code(&out), 0);
    assert_eq!(read(dir.path().join("o/geodesics.csv")), "seed,kind,t,x\n");
}

#[test]
fn geodesic_seed_outside_the_domain_is_a_domain_error() {
    let dir = TempDir::new().unwrap();
    let out = pairwalk(dir.path(), &["--out", "o", "geodesics", "--seeds", "0.5"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn preset_flag_overrides_the_file() {
    let dir = with_config("preset = \"full\"\n");
    let out = pairwalk(dir.path(), &["--config", "run.toml", "--preset", "desk", "--out", "o", "synthesize", "--at", "0", "3"]);
    assert_eq!(code(&out), 0);
    let dump: toml::Table = stdout(&out).parse().unwrap();
    // Desk mass 5 against the full preset's 50: C = -m √(1 - 2M/x) σx.
    let c01 = dump["matrices"]["C"]["re"][0][1].as_float().unwrap();
    assert!((c01 + 5.0 * (2.0f64 / 3.0).sqrt()).abs() < 1e-12, "{c01}");
}
