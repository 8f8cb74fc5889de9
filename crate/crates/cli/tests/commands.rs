use kstar_cli::{exit, run, Outcome};

fn kstar(args: &[&str]) -> Outcome {
    let mut argv = vec!["kstar"];
    argv.extend_from_slice(args);
    run(&argv, &mut std::io::empty())
}

fn kstar_stdin(args: &[&str], input: &str) -> Outcome {
    let mut argv = vec!["kstar"];
    argv.extend_from_slice(args);
    run(&argv, &mut input.as_bytes())
}

#[test]
fn parse_zero() {
    let o = kstar(&["parse", "0"]);
    assert_eq!(o.code, exit::OK);
    assert_eq!(o.stdout, "0\n");
}

#[test]
fn parse_renders_canonically() {
    let o = kstar(&["parse", "(a*b).(c)+0"]);
    assert_eq!(o.code, exit::OK);
    assert_eq!(o.stdout, "a * b . c + 0\n");
}

#[test]
fn syntax_error_is_usage() {
    let o = kstar(&["parse", "a +"]);
    assert_eq!(o.code, exit::USAGE);
    assert!(o.stdout.is_empty());
    assert!(o.stderr.contains("syntax error"));
}

#[test]
fn missing_subcommand_prints_help_on_stderr() {
    let o = kstar(&[]);
    assert_eq!(o.code, exit::USAGE);
    assert!(o.stdout.is_empty());
    assert!(o.stderr.contains("Usage"));
}

#[test]
fn bisim_positive() {
    let o = kstar(&["bisim", "(a+a.a)*0", "a*0"]);
    assert_eq!(o.code, exit::OK);
    assert_eq!(o.stdout, "bisimilar\n");
}

#[test]
fn bisim_star_of_star_pair_is_not_bisimilar() {
    // (a*b)*c can only do b after an a; (a+b)*c can do b first and then loop.
    let o = kstar(&["bisim", "(a*b)*c", "(a+b)*c"]);
    assert_eq!(o.code, exit::NEGATIVE);
    assert_eq!(o.stdout, "not-bisimilar\n");
}

#[test]
fn bisim_witness_lists_initial_pair() {
    let o = kstar(&["bisim", "a.b + a.b", "a.b", "--witness"]);
    assert_eq!(o.code, exit::OK);
    let lines: Vec<&str> = o.stdout.lines().collect();
    assert_eq!(lines[0], "bisimilar");
    assert!(lines.contains(&"a . b + a . b ~ a . b"));
    assert!(lines.contains(&"TICK ~ TICK"));
}

#[test]
fn prove_non_bisimilar() {
    let o = kstar(&["prove", "a.b + a.c", "a.(b+c)"]);
    assert_eq!(o.code, exit::NEGATIVE);
    assert_eq!(o.stdout, "not-bisimilar\n");
}

#[test]
fn predicates() {
    let o = kstar(&["nf", "(a.b+a)*0"]);
    assert_eq!((o.code, o.stdout.as_str()), (exit::OK, "true\n"));
    let o = kstar(&["nf", "(a.(a*a))*0"]);
    assert_eq!((o.code, o.stdout.as_str()), (exit::NEGATIVE, "false\n"));
    let o = kstar(&["nfmult", "(a.(a*a))*0", "0"]);
    assert_eq!((o.code, o.stdout.as_str()), (exit::NEGATIVE, "false\n"));
    let o = kstar(&["congr", "a", "b"]);
    assert_eq!(o.code, exit::OK);
}

#[test]
fn wrong_argument_count() {
    let o = kstar(&["nfmult", "a"]);
    assert_eq!(o.code, exit::USAGE);
    assert!(o.stdout.is_empty());
}

#[test]
fn normalize_check() {
    let o = kstar(&["normalize", "--check", "(a.(a*a))*0"]);
    assert_eq!(o.code, exit::OK);
    let mut lines = o.stdout.lines();
    let q = kstar_core::parse(lines.next().unwrap()).unwrap();
    let target = kstar_core::parse("(a+a)*0").unwrap();
    assert!(kstar_core::Session::new()
        .bisimilar_terms(&q, &target)
        .unwrap());
    assert!(lines.next().unwrap().starts_with("check:"));
}

#[test]
fn lts_dump_is_deterministic() {
    let a = kstar(&["lts", "(a.b)*0"]);
    let b = kstar(&["lts", "(a.b)*0"]);
    assert_eq!(a.code, exit::OK);
    assert_eq!(a, b);
    assert!(!a.stdout.is_empty());
}

#[test]
fn expand_prints_steps_and_certificate() {
    let o = kstar(&["expand", "a*b"]);
    assert_eq!(o.code, exit::OK);
    let mut lines = o.stdout.lines();
    assert_eq!(lines.next().unwrap(), "{(a, a * b), (b, TICK)}");
    let cert = kstar_core::parse_proof(lines.next().unwrap()).unwrap();
    let c = kstar_core::conclusion(&cert).unwrap();
    assert_eq!(c.lhs, kstar_core::parse("a*b").unwrap());
}

#[test]
fn terms_from_file_and_stdin() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("terms.txt");
    std::fs::write(&path, "a + a\n\na\n").unwrap();
    let o = kstar(&["bisim", "--file", path.to_str().unwrap()]);
    assert_eq!((o.code, o.stdout.as_str()), (exit::OK, "bisimilar\n"));
    let o = kstar_stdin(&["parse", "--file", "-"], "a.b\n");
    assert_eq!((o.code, o.stdout.as_str()), (exit::OK, "a . b\n"));
}

#[test]
fn cap_exceeded_exit() {
    let o = kstar(&["prove", "--max-cert-nodes", "10", "(a+a.a)*0", "a*0"]);
    assert_eq!(o.code, exit::CAP);
    assert!(o.stdout.is_empty());
    let o = kstar(&["bisim", "--max-states", "2", "a.b.c.d", "a.(b.c.d+0)"]);
    assert_eq!(o.code, exit::CAP);
}

const CORPUS: &[(&str, &str)] = &[
    ("(a+a.a)*0", "a*0"),
    ("a.(b+c)", "a.(c+b)"),
    ("(a.b)*0", "a.(b.a)*0"),
    ("(a.(a*a))*0", "(a+a)*0"),
    ("a.(a*b)+b", "a*b"),
    ("a*(b.c)", "(a*b).c"),
    ("(a.b+a)*0 + 0", "(a.b+a)*0"),
];

#[test]
fn prove_then_check_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    for (i, (p, q)) in CORPUS.iter().enumerate() {
        let path = dir.path().join(format!("cert{i}.txt"));
        let file = path.to_str().unwrap();
        let o = kstar(&["prove", p, q, "-o", file, "--stats"]);
        assert_eq!(o.code, exit::OK, "{p} = {q}: {}", o.stderr);
        assert!(o.stdout.is_empty());
        assert!(o.stderr.contains("nodes:"));
        let o = kstar(&["check", file, "--lhs", p, "--rhs", q]);
        assert_eq!(
            (o.code, o.stdout.as_str()),
            (exit::OK, "valid\n"),
            "{p} = {q}"
        );
    }
}

#[test]
fn check_reports_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert.txt");
    let file = path.to_str().unwrap();
    assert_eq!(kstar(&["prove", "a+b", "b+a", "-o", file]).code, exit::OK);
    let o = kstar(&["check", file, "--lhs", "a+b", "--rhs", "a"]);
    assert_eq!((o.code, o.stdout.as_str()), (exit::NEGATIVE, "mismatch\n"));
}

#[test]
fn check_reports_ill_formed() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.txt");
    std::fs::write(&path, "(b4 a b c)").unwrap();
    let o = kstar(&["check", path.to_str().unwrap(), "--lhs", "a", "--rhs", "a"]);
    assert_eq!(o.code, exit::NEGATIVE);
    std::fs::write(&path, "(b4 a b").unwrap();
    let o = kstar(&["check", path.to_str().unwrap(), "--lhs", "a", "--rhs", "a"]);
    assert_eq!(o.code, exit::USAGE);
    assert!(o.stdout.is_empty());
}
