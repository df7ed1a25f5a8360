use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn prover(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_prover"))
        .args(args)
        .output()
        .expect("prover runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn first_line(out: &Output) -> String {
    stdout(out).lines().next().unwrap_or_default().to_string()
}

#[test]
fn r2_yes_with_certificate() {
    let file = data("r2.trs");
    let out = prover(&["--certificate", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert_eq!(first_line(&out), "YES");
    let text = stdout(&out);
    assert!(text.contains("BEGIN CERTIFICATE") && text.contains("END CERTIFICATE"));
    assert!(text.contains("history"), "{text}");

    // the printed certificate re-checks
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("r2.cert");
    std::fs::write(&cert, &text).unwrap();
    let out = prover(&["--verify-certificate", cert.to_str().unwrap()]);
    assert_eq!(first_line(&out), "VALID", "{}", stdout(&out));
    assert_eq!(out.status.code(), Some(0));

    let edited = text.replacen("-> ?y_0\n", "-> 0\n", 1);
    assert_ne!(edited, text);
    std::fs::write(&cert, &edited).unwrap();
    let out = prover(&["--verify-certificate", cert.to_str().unwrap()]);
    assert_ne!(out.status.code(), Some(0));
}

#[test]
fn r8_with_linear_criterion() {
    let file = data("r8.trs");
    let out = prover(&["--criterion", "linear", file.to_str().unwrap()]);
    assert_eq!(first_line(&out), "YES", "{}", stdout(&out));
    assert_eq!(out.status.code(), Some(0));
    let out = prover(&["--criterion", "huet", file.to_str().unwrap()]);
    assert_eq!(first_line(&out), "MAYBE", "{}", stdout(&out));
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn growing_rule_is_maybe() {
    let file = data("grow.trs");
    let out = prover(&[file.to_str().unwrap()]);
    assert_eq!(first_line(&out), "MAYBE");
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn errors_exit_with_two() {
    for name in ["lhs_var.trs", "broken.trs", "missing.trs"] {
        let file = data(name);
        let out = prover(&[file.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2), "{name}");
        assert!(out.stdout.is_empty(), "{name}");
        assert!(!out.stderr.is_empty(), "{name}");
    }
    let file = data("r2.trs");
    for bad in [
        &["--criterion", "nope"][..],
        &["--max-steps", "0"],
        &["--rev-k", "-1"],
    ] {
        let mut args = bad.to_vec();
        args.push(file.to_str().unwrap());
        assert_eq!(prover(&args).status.code(), Some(2), "{bad:?}");
    }
    assert_eq!(prover(&[]).status.code(), Some(2));
}

#[test]
fn hidden_fuzz_is_clean() {
    let out = prover(&["--ars-fuzz", "200", "--seed", "3"]);
    assert_eq!(first_line(&out), "CLEAN", "{}", stdout(&out));
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn problem_file_round_trips() {
    use confluence::syntax::{parse_trs, print_trs};
    let text = std::fs::read_to_string(data("r2.trs")).unwrap();
    let trs = parse_trs(&text).unwrap();
    assert_eq!(trs.len(), 4);
    let printed = print_trs(&trs);
    let again = parse_trs(&printed).unwrap();
    assert!(again.same_rules(&trs));
    assert_eq!(print_trs(&again), printed);
}
