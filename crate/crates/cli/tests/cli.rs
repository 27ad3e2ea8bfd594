use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn hecke(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hecke")).args(args).output().expect("run hecke")
}

fn stdout(args: &[&str]) -> String {
    let out = hecke(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    hecke(args).status.code().expect("exit code")
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn kite_lines() {
    assert_eq!(stdout(&["kite", "-p", "2", "-m", "1", "-x", "1/2"]), "1/2:1, 1/4:2; check=ok\n");
    assert_eq!(stdout(&["kite", "-p", "2", "-D", "-16"]), "vhat=1/4\n");
    assert_eq!(stdout(&["kite", "-p", "2", "-m", "0", "-x", "1/3"]), "1/3:1\n");
}

#[test]
fn kite_csv_is_descending() {
    let path = scratch("kite.csv");
    stdout(&["kite", "-p", "3", "-m", "2", "-x", "1/2", "--csv", path.to_str().unwrap()]);
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().next(), Some("x_num,x_den,mult"));
    let xs: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<f64> = l.split(',').take(2).map(|s| s.parse().unwrap()).collect();
            f[0] / f[1]
        })
        .collect();
    assert!(xs.windows(2).all(|w| w[0] > w[1]));
}

#[test]
fn canon_actions() {
    let s = stdout(&["canon", "-p", "2", "series", "-N", "5"]);
    assert!(s.starts_with("kcheck: 160512 -1488\nA_1 = -42987520 ord=12"));
    assert_eq!(s.lines().count(), 6);
    assert_eq!(stdout(&["canon", "-p", "2", "eval", "-j", "-3375"]), "-3375 (fixed)\n");
    assert_eq!(stdout(&["canon", "-p", "2", "orbit", "-j", "16581375"]), "preperiodic m=1 r=1\n");
    assert_eq!(stdout(&["canon", "-p", "2", "orbit", "-j", "-3375"]), "periodic r=1\n");
    let s = stdout(&["canon", "-p", "3", "phicheck", "--count", "5", "--seed", "7"]);
    assert_eq!(s.lines().count(), 6);
    assert!(s.lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn qexp_and_zhang() {
    assert_eq!(stdout(&["qexp", "verify", "-M", "200"]), "ok ok ok\n");
    let s = stdout(&["zhang", "-d", "-7", "--fmax", "50"]);
    assert_eq!(s.lines().count(), 51);
    assert!(s.lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn tate_table() {
    let s = stdout(&["tate", "--ordz", "1", "-n", "1..1000", "--rho", "1"]);
    let lines: Vec<&str> = s.lines().collect();
    assert_eq!(lines[0], "n,mass,fraction,bound,within_bound");
    assert!(lines[6].starts_with("6,3,1/4,"));
    assert!(lines[4].starts_with("4,1,1/7,"));
    assert_eq!(lines.len(), 1001);
}

#[test]
fn experiments() {
    let s = stdout(&["cm", "-p", "2", "-D", "-4,-16,-64,-7", "--window", "inner:0:4"]);
    assert_eq!(s.lines().nth(1), Some("-4,supersingular,1/4,1,1/2,6,1"));
    assert_eq!(s.lines().nth(4), Some("-7,ordinary,0,1,,,0"));
    let s = stdout(&["orbit", "-p", "2", "--start", "bad:-1", "-n", "6", "--window", "outer:1"]);
    assert_eq!(s.lines().nth(1), Some("6,1,3,,1/4"));
    let s = stdout(&["orbit", "-p", "2", "--start", "ordinary", "-n", "6"]);
    assert_eq!(s.lines().nth(1), Some("6,1,3,1/3"));
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["canon", "-p", "5", "eval", "-j", "1"]), 3);
    assert_eq!(code(&["cm", "-p", "7", "-D", "-4"]), 3);
    assert_eq!(code(&["orbit", "--start", "ordinary", "-n", "2", "--window", "inner:0:1"]), 3);
    assert_eq!(code(&["canon", "-p", "2", "eval", "-j", "256"]), 3);
    assert_eq!(code(&["kite", "-p", "2", "-x", "2"]), 2);
    assert_eq!(code(&["cm", "-D", "-4", "--window", "inner:0:0"]), 2);
    assert_eq!(code(&["kite", "-x", "1/2", "--config", "/nonexistent/run.cfg"]), 4);
    assert_eq!(code(&["tate", "-n", "1..3", "--csv", "/nonexistent/dir/out.csv"]), 4);
}

#[test]
fn config_file_and_overrides() {
    let cfg = scratch("run.cfg");
    fs::write(&cfg, "p = 3\nwindow = inner:1728:2\njobs = 1\n").unwrap();
    let c = cfg.to_str().unwrap();
    let s = stdout(&["--config", c, "cm", "-D", "-3,-12"]);
    assert!(s.starts_with("D,reduction,supsn,h,vhat,radial,\"inner(1728,2)\"\n"));
    // flags win
    let s = stdout(&["--config", c, "kite", "-p", "2", "-x", "1/2"]);
    assert_eq!(s, "1/2:1, 1/4:2; check=ok\n");
    fs::write(&cfg, "colour = red\n").unwrap();
    assert_eq!(code(&["--config", c, "kite", "-x", "1/2"]), 2);
}

#[test]
fn outputs_are_deterministic() {
    let json = scratch("orbit.json");
    let j = json.to_str().unwrap();
    let args = |jobs: &'static str| {
        vec!["orbit", "-p", "2", "--start", "sups:1/2", "-n", "1..64", "--window", "inner:0:3", "--window", "inner:0:5", "--jobs", jobs, "--json", j]
    };
    let a = stdout(&args("1"));
    let ja = fs::read(&json).unwrap();
    let b = stdout(&args("1"));
    let jb = fs::read(&json).unwrap();
    assert_eq!(a, b);
    assert_eq!(ja, jb);
    let c = stdout(&args("4"));
    assert_eq!(a, c);
    let doc: serde_json::Value = serde_json::from_slice(&ja).unwrap();
    assert_eq!(doc["config"]["p"], 2);
    assert_eq!(doc["result"]["rows"].as_array().unwrap().len(), 64);
}
