use std::path::PathBuf;

use pa_lab::text::parse_pa;
use pa_lab_cli::{run, Outcome};

fn data(rel: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", rel].iter().collect();
    p.to_string_lossy().into_owned()
}

fn pa_lab(args: &[&str]) -> Outcome {
    run(std::iter::once("pa-lab").chain(args.iter().copied()))
}

fn lines(o: &Outcome) -> Vec<&str> {
    o.stdout.lines().collect()
}

#[test]
fn output_starts_with_the_header() {
    let o = pa_lab(&["classify", &data("pa/halving.pa")]);
    assert_eq!(o.code, 0);
    assert_eq!(lines(&o), ["# pa-lab v1", "unambiguous"]);
    let o = pa_lab(&["classify", &data("pa/halving_complement.pa")]);
    assert_eq!(lines(&o)[1], "polynomial degree=1");
}

#[test]
fn eval_prints_the_exact_value() {
    let o = pa_lab(&["--verify", "eval", &data("pa/halving.pa"), "aab"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert_eq!(&lines(&o)[1..], ["word: aab", "value: 1/4", "verified: sum over enumerated runs matches"]);
    let o = pa_lab(&["eval", &data("pa/halving_complement.pa"), ""]);
    assert!(o.stdout.contains("value: 1/1"));
}

#[test]
fn emptiness_answers() {
    let yes = pa_lab(&["--verify", "empty", &data("pa/third.pa")]);
    assert_eq!(yes.code, 0);
    assert!(lines(&yes)[1].starts_with("YES"));
    assert!(yes.stdout.contains("certificate:"));
    let no = pa_lab(&["--verify", "empty", &data("pa/split.pa")]);
    assert_eq!(no.code, 0);
    assert!(lines(&no)[1].starts_with("NO"));
    assert!(no.stdout.contains("witness: ε"));
    assert!(no.stdout.contains("verified: ok"));
}

#[test]
fn containment_answers() {
    let yes = pa_lab(&["--verify", "contain", &data("pa/halving.pa"), &data("pa/one.pa")]);
    assert_eq!(yes.code, 0, "{}", yes.stderr);
    assert!(yes.stdout.contains("YES"));
    let no = pa_lab(&["--verify", "contain", &data("pa/one.pa"), &data("pa/halving.pa")]);
    assert_eq!(no.code, 0, "{}", no.stderr);
    assert!(no.stdout.contains("NO"));
    assert!(no.stdout.contains("witness: ε"));
}

#[test]
fn undecidable_configurations_exit_with_two() {
    let o = pa_lab(&["contain", &data("pa/halving.pa"), &data("pa/halving_complement.pa")]);
    assert_eq!(o.code, 2);
    assert!(o.stdout.contains("UNSUPPORTED: configuration undecidable/unsupported"));
}

#[test]
fn gap_emptiness() {
    let o = pa_lab(&["--verify", "gap-empty", &data("pa/halving_complement.pa"), "--epsilon", "1/10"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert!(lines(&o)[1].starts_with("NO"));
    assert!(o.stdout.contains("gap N=72"));
    assert!(o.stdout.contains("certified=true"));
    let o = pa_lab(&["gap-empty", &data("pa/halving_complement.pa"), "--epsilon", "1/10", "--override-N", "3"]);
    assert!(o.stdout.contains("gap N=3") && o.stdout.contains("certified=false"));
}

#[test]
fn ipexp_solutions_and_certificates() {
    let sat = pa_lab(&["--verify", "ipexp", "solve", &data("ipexp/worked_p1_3.ipexp")]);
    assert_eq!(sat.code, 0);
    assert_eq!(&lines(&sat)[1..], ["SAT x=(1,1)", "f(x) = 17/18", "verified: ok"]);
    let unsat = pa_lab(&["--verify", "ipexp", "solve", &data("ipexp/worked_p1_2.ipexp")]);
    assert_eq!(unsat.code, 0);
    assert_eq!(lines(&unsat)[1], "UNSAT");
    assert!(unsat.stdout.contains("am-gm lambda=(1/2,1/2)"));
    assert!(unsat.stdout.contains("verified: ok"));
}

#[test]
fn brute_force_subcommands() {
    let o = pa_lab(&["brute", "contain", &data("pa/halving.pa"), &data("pa/halving_complement.pa"), "--len", "3"]);
    assert!(o.stdout.contains("checked 15 words up to length 3"));
    assert!(o.stdout.contains("counterexamples: 7"));
    let o = pa_lab(&["brute", "runs", &data("pa/halving_complement.pa"), "aa"]);
    assert!(o.stdout.contains("accepting runs: 3"));
    assert!(o.stdout.contains("total: 1/1"));
    let o = pa_lab(&["brute", "ipexp", &data("ipexp/worked_p1_2.ipexp"), "--radius", "5"]);
    assert!(o.stdout.contains("checked 121 points"));
    assert!(o.stdout.contains("solutions: 0"));
}

#[test]
fn forge_writes_four_automata() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_string_lossy().into_owned();
    let o = pa_lab(&["--verify", "forge", &data("machines/transfer.tcm"), "--out", &out]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert!(o.stdout.contains("[[A]] = 345/4096 [[B]] = 345/4096"));
    let mut sizes = Vec::new();
    for name in ["A.pa", "B.pa", "Aprime.pa", "Bprime.pa"] {
        let text = std::fs::read_to_string(dir.path().join(name)).unwrap();
        sizes.push(parse_pa(&text).unwrap().num_states());
    }
    assert_eq!(sizes, [74, 26, 74, 27]);

    let o = pa_lab(&["forge", &data("machines/looping.tcm"), "--out", &out, "--steps", "50"]);
    assert_eq!(o.code, 0);
    assert!(o.stdout.contains("no halting word"));
}

#[test]
fn errors_exit_with_one() {
    let o = pa_lab(&["eval", &data("pa/halving.pa"), "abc"]);
    assert_eq!(o.code, 1);
    assert!(o.stderr.contains("unknown letter"));
    let o = pa_lab(&["classify", "/nonexistent/file.pa"]);
    assert_eq!(o.code, 1);
    let o = pa_lab(&["bogus"]);
    assert_eq!(o.code, 1);
    assert!(o.stdout.is_empty());
}
