use std::path::Path;
use std::process::{Command, Output};

fn omegapow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_omegapow")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8")
}

fn write_p2(dir: &Path) -> String {
    let path = dir.join("p2.kcm");
    let p = path.to_str().unwrap().to_owned();
    assert_eq!(code(&omegapow(&["build-pn", "--n", "2", "--out", &p])), 0);
    p
}

#[test]
fn accept_mirrors_the_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let p2 = write_p2(dir.path());
    let yes = omegapow(&["accept", "--machine", &p2, "--word", "001"]);
    assert_eq!((code(&yes), stdout(&yes).trim()), (0, "accept"));
    let no = omegapow(&["accept", "--machine", &p2, "--word", "010"]);
    assert_eq!((code(&no), stdout(&no).trim()), (1, "reject"));
    assert_eq!(code(&omegapow(&["accept", "--pn", "3", "--word", "001"])), 0);
    assert_eq!(code(&omegapow(&["accept", "--pn", "3", "--word", "0011"])), 1);
}

#[test]
fn error_codes() {
    assert_eq!(code(&omegapow(&["build-sn", "--n", "2"])), 4);
    assert_eq!(code(&omegapow(&["accept", "--word", "1"])), 2);
    assert_eq!(code(&omegapow(&["no-such-command"])), 2);
    assert_eq!(code(&omegapow(&["build-pn", "--n", "0"])), 2);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.kcm");
    std::fs::write(&bad, "kcm k=9\n").unwrap();
    assert_eq!(code(&omegapow(&["accept", "--machine", bad.to_str().unwrap(), "--word", "0"])), 3);
    let p2 = write_p2(dir.path());
    assert_eq!(code(&omegapow(&["accept", "--machine", &p2, "--word", "2"])), 3);
}

#[test]
fn coding_commands() {
    assert_eq!(stdout(&omegapow(&["pair", "--n", "2", "--p", "0"])).trim(), "5");
    assert_eq!(stdout(&omegapow(&["unpair", "--q", "6"])).trim(), "3 0");
    let enc = omegapow(&["encode-g", "--n", "5", "--l", "1", "--word", "ab"]);
    let w = stdout(&enc).trim().to_owned();
    let dec = omegapow(&["decode-g", "--word", &w]);
    assert_eq!(stdout(&dec).trim(), "n=5 l=1 word=ab");
    assert_eq!(code(&omegapow(&["decode-g", "--word", "0"])), 1);
    let fwd = omegapow(&["phi", "--block", "", "--block", "1", "--block", "01"]);
    assert_eq!(stdout(&fwd).trim(), "101");
    let e = omegapow(&["eraser", "--word", "abBSa"]);
    assert_eq!(stdout(&e), "tilde=aa\napprox=aa\nl3=false\n");
}

#[test]
fn omega_commands() {
    let f = omegapow(&["factorize", "--pn", "2", "--word", "0101"]);
    assert_eq!(stdout(&f), "01 | 01\ncount=1\nomega-power-prefix=true\n");
    assert_eq!(code(&omegapow(&["factorize", "--pn", "2", "--word", "00"])), 1);

    assert_eq!(code(&omegapow(&["upword", "--period", "01", "--pn", "2"])), 0);
    assert_eq!(code(&omegapow(&["upword", "--stem", "1", "--period", "0", "--pn", "2"])), 1);
    let bounded = omegapow(&["upword", "--period", "001", "--pn", "3"]);
    let text = stdout(&bounded);
    assert_eq!(code(&bounded), 0, "{text}");
    assert!(text.starts_with("verdict=yes\nreplays=true\n"));
    assert!(text.lines().any(|l| l == "cycle cut"));

    let c = omegapow(&["classify", "--factor", "023", "--factor", "323"]);
    assert_eq!(stdout(&c).trim(), "case=mu-power");
    assert_eq!(code(&omegapow(&["classify", "--factor", "0"])), 3);
}

#[test]
fn suite_output_is_reproducible() {
    let args = ["suite", "--only", "2,3,7,9", "--seed", "7"];
    let a = omegapow(&args);
    let b = omegapow(&args);
    assert_eq!(code(&a), 0, "{}", stdout(&a));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("seed=7\npassed=4\nfailed=0\n"));
}
