//! Command-line front end for `pa-lab`.
//!
//! [`run`] takes the argument vector and returns the exit code and report, so the
//! binary is a thin wrapper and tests can drive every subcommand in-process.
//! Reports start with `# pa-lab v1`. Exit codes: 0 when the question was decided,
//! 2 for `UNKNOWN` or an unsupported configuration, 1 for usage and input errors.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use pa_lab::ambiguity::{classify, AmbiguityClass};
use pa_lab::catalog;
use pa_lab::deciders::{
    build_a_prime, containment_fin_vs_unamb, containment_unamb_vs_fin, emptiness_finite, gap_emptiness,
    verify_containment, Answer, Certificate, DecideOptions, Verdict,
};
use pa_lab::forge::{compile, encode_execution};
use pa_lab::ipexp::{self, Budget, IpExpInstance, Solution, SliceCert, UnsatCert};
use pa_lab::oracle;
use pa_lab::rational::{fmt_rational, parse_rational, rat, Rational};
use pa_lab::text::{parse_ipexp, parse_machine, parse_pa, parse_word, render_ipexp, render_pa};
use pa_lab::Pa;
use thiserror::Error;

pub const HEADER: &str = "# pa-lab v1";

pub const EXIT_DECIDED: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "pa-lab", version, about = "Exact analysis of probabilistic automata with bounded ambiguity")]
pub struct Cli {
    /// Re-check every certificate and witness exactly before reporting.
    #[arg(long, global = true)]
    pub verify: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ambiguity class of an automaton.
    Classify { pa: PathBuf },
    /// Acceptance probability of a word.
    Eval { pa: PathBuf, word: String },
    /// Is [[A]](w) <= 1/2 for every word? (finitely ambiguous A)
    Empty { pa: PathBuf },
    /// Promise version of emptiness for polynomially ambiguous A.
    GapEmpty {
        pa: PathBuf,
        #[arg(long)]
        epsilon: String,
        /// Replace the computed cutoff (the answer is then not backed by the tail bound).
        #[arg(long = "override-N")]
        override_n: Option<u64>,
    },
    /// Is [[A]](w) <= [[B]](w) for every word?
    Contain { a: PathBuf, b: PathBuf },
    /// Compile a two-counter machine into the four automata files.
    Forge {
        tcm: PathBuf,
        /// Output directory (created if missing).
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Simulation budget used to find the halting word.
        #[arg(long, default_value_t = 1000)]
        steps: usize,
    },
    /// Integer points under an exponential-sum constraint.
    Ipexp {
        #[command(subcommand)]
        command: IpexpCommand,
    },
    /// Brute-force oracles.
    Brute {
        #[command(subcommand)]
        command: BruteCommand,
    },
}

#[derive(Debug, Subcommand)]
pub enum IpexpCommand {
    Solve {
        file: PathBuf,
        /// Largest max-norm shell searched for a solution.
        #[arg(long, default_value_t = 10)]
        radius: u32,
    },
}

#[derive(Debug, Subcommand)]
pub enum BruteCommand {
    /// Check [[A]] <= [[B]] on every word up to a length.
    Contain {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 7)]
        len: usize,
    },
    /// Sweep an integer box for solutions.
    Ipexp {
        file: PathBuf,
        #[arg(long, default_value_t = 10)]
        radius: u64,
    },
    /// List the accepting runs on a word.
    Runs { pa: PathBuf, word: String },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: String, source: pa_lab::text::TextError },
    #[error("{0}")]
    Input(String),
    #[error("certificate check failed: {0}")]
    Verify(String),
}

/// Exit code and text of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Report {
    out: String,
    code: i32,
}

impl Report {
    fn new() -> Self {
        Report { out: format!("{HEADER}\n"), code: EXIT_DECIDED }
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.out.push_str(s.as_ref());
        self.out.push('\n');
    }
}

pub fn run<I, S>(argv: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_DECIDED };
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code, stdout: String::new(), stderr: text }
            } else {
                Outcome { code, stdout: text, stderr: String::new() }
            };
        }
    };
    match execute(&cli) {
        Ok(r) => Outcome { code: r.code, stdout: r.out, stderr: String::new() },
        Err(e) => Outcome { code: EXIT_ERROR, stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn load_pa(path: &Path) -> Result<Pa, CliError> {
    parse_pa(&read(path)?).map_err(|source| CliError::Parse { path: path.display().to_string(), source })
}

fn load_ipexp(path: &Path) -> Result<IpExpInstance, CliError> {
    parse_ipexp(&read(path)?).map_err(|source| CliError::Parse { path: path.display().to_string(), source })
}

fn word_arg(pa: &Pa, text: &str) -> Result<Vec<usize>, CliError> {
    parse_word(pa, text).map_err(|e| CliError::Input(e.to_string()))
}

fn execute(cli: &Cli) -> Result<Report, CliError> {
    let mut r = Report::new();
    let opts = DecideOptions::default();
    match &cli.command {
        Command::Classify { pa } => {
            let a = load_pa(pa)?;
            let class = classify(&a);
            r.line(class.to_string());
            if cli.verify {
                check_class(&a, class)?;
                r.line("verified: accepting-run counts up to length 6 respect the class");
            }
        }
        Command::Eval { pa, word } => {
            let a = load_pa(pa)?;
            let w = word_arg(&a, word)?;
            let v = a.evaluate(&w).map_err(|e| CliError::Input(e.to_string()))?;
            r.line(format!("word: {}", a.render_word(&w)));
            r.line(format!("value: {}", fmt_rational(&v)));
            if cli.verify {
                let runs = oracle::run_sum(&a, &w).map_err(|e| CliError::Input(e.to_string()))?;
                if runs != v {
                    return Err(CliError::Verify("run enumeration disagrees with evaluation".into()));
                }
                r.line("verified: sum over enumerated runs matches");
            }
        }
        Command::Empty { pa } => {
            let a = load_pa(pa)?;
            let class = classify(&a);
            if !class.is_finite() {
                r.line(format!(
                    "UNSUPPORTED: emptiness is decided for finitely ambiguous automata; this one is {class} (try gap-empty)"
                ));
                r.code = EXIT_UNKNOWN;
                return Ok(r);
            }
            let v = emptiness_finite(&a, &opts).map_err(|e| CliError::Input(e.to_string()))?;
            let half = catalog::constant(a.alphabet(), rat(1, 2));
            report_verdict(&mut r, &v, "[[A]] ≤ 1/2", "[[A]](w) > 1/2", &a, &half);
            if cli.verify {
                if !verify_containment(&a, &half, &v) {
                    return Err(CliError::Verify("emptiness verdict".into()));
                }
                r.line("verified: ok");
            }
        }
        Command::GapEmpty { pa, epsilon, override_n } => {
            let a = load_pa(pa)?;
            let eps = parse_rational(epsilon).map_err(|e| CliError::Input(e.to_string()))?;
            let class = classify(&a);
            if !class.is_polynomial_or_better() {
                r.line(format!("UNSUPPORTED: gap emptiness needs a polynomially ambiguous automaton; this one is {class}"));
                r.code = EXIT_UNKNOWN;
                return Ok(r);
            }
            let v = gap_emptiness(&a, &eps, *override_n, &opts).map_err(|e| CliError::Input(e.to_string()))?;
            let half = catalog::constant(a.alphabet(), rat(1, 2));
            let yes = format!("[[A]] ≤ 1/2 + {}", fmt_rational(&eps));
            report_verdict(&mut r, &v, &yes, "[[A]](w) > 1/2", &a, &half);
            if cli.verify {
                verify_gap(&a, &v)?;
                r.line("verified: ok");
            }
        }
        Command::Contain { a, b } => {
            let (pa_a, pa_b) = (load_pa(a)?, load_pa(b)?);
            if pa_a.alphabet() != pa_b.alphabet() {
                return Err(CliError::Input("the two automata have different alphabets".into()));
            }
            let (ca, cb) = (classify(&pa_a), classify(&pa_b));
            r.line(format!("A: {ca}"));
            r.line(format!("B: {cb}"));
            let v = if ca.is_finite() && cb == AmbiguityClass::Unambiguous {
                r.line("procedure: finitely ambiguous A, unambiguous B");
                containment_fin_vs_unamb(&pa_a, &pa_b, &opts)
            } else if ca == AmbiguityClass::Unambiguous && cb.is_finite() {
                r.line("procedure: unambiguous A, finitely ambiguous B");
                containment_unamb_vs_fin(&pa_a, &pa_b, &opts)
            } else {
                let why = if ca.is_finite() && cb.is_finite() {
                    "both sides finitely ambiguous is an open case"
                } else {
                    "containment is undecidable once linear ambiguity is allowed"
                };
                r.line(format!("UNSUPPORTED: configuration undecidable/unsupported ({why})"));
                r.code = EXIT_UNKNOWN;
                return Ok(r);
            }
            .map_err(|e| CliError::Input(e.to_string()))?;
            report_verdict(&mut r, &v, "[[A]] ≤ [[B]]", "[[A]](w) > [[B]](w)", &pa_a, &pa_b);
            if cli.verify {
                if !verify_containment(&pa_a, &pa_b, &v) {
                    return Err(CliError::Verify("containment verdict".into()));
                }
                r.line("verified: ok");
            }
        }
        Command::Forge { tcm, out, steps } => forge(&mut r, tcm, out, *steps, cli.verify)?,
        Command::Ipexp { command: IpexpCommand::Solve { file, radius } } => {
            let inst = load_ipexp(file)?;
            let budget = Budget { radius: *radius, ..Budget::default() };
            match ipexp::solve(&inst, &budget) {
                Solution::Sat(x) => {
                    r.line(format!("SAT x=({})", join(&x)));
                    r.line(format!("f(x) = {}", fmt_rational(&inst.f.eval(&x))));
                    if cli.verify {
                        if !inst.is_solution(&x) {
                            return Err(CliError::Verify("reported point is not a solution".into()));
                        }
                        r.line("verified: ok");
                    }
                }
                Solution::Unsat(cert) => {
                    r.line("UNSAT");
                    r.line("certificate:");
                    render_unsat(&mut r, &cert, 1);
                    if cli.verify {
                        if !ipexp::verify_unsat(&inst, &cert, budget.max_prec) {
                            return Err(CliError::Verify("infeasibility certificate".into()));
                        }
                        r.line("verified: ok");
                    }
                }
                Solution::Unknown(reason) => {
                    r.line(format!("UNKNOWN ({reason})"));
                    r.code = EXIT_UNKNOWN;
                }
            }
        }
        Command::Brute { command } => brute(&mut r, command)?,
    }
    Ok(r)
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

fn report_verdict(r: &mut Report, v: &Verdict, yes: &str, no: &str, a: &Pa, b: &Pa) {
    match v.answer {
        Answer::Yes => r.line(format!("YES ({yes})")),
        Answer::No => {
            r.line(format!("NO ({no})"));
            if let Some(w) = &v.witness {
                r.line(format!("witness: {}", a.render_word(w)));
                if let (Ok(x), Ok(y)) = (a.evaluate(w), b.evaluate(w)) {
                    r.line(format!("values: {} > {}", fmt_rational(&x), fmt_rational(&y)));
                }
            }
        }
        Answer::Unknown => {
            r.line(format!("UNKNOWN ({})", v.reason.as_deref().unwrap_or("budget exhausted")));
            r.code = EXIT_UNKNOWN;
        }
    }
    if let Some(c) = &v.certificate {
        r.line("certificate:");
        render_certificate(r, c, 1);
    }
}

fn indent(level: usize) -> String {
    "  ".repeat(level)
}

fn rats(xs: &[Rational]) -> String {
    xs.iter().map(fmt_rational).collect::<Vec<_>>().join(",")
}

fn render_certificate(r: &mut Report, c: &Certificate, level: usize) {
    let pad = indent(level);
    match c {
        Certificate::Violation { k, l, tuple, x } => {
            r.line(format!("{pad}violation k={k} l={l} x=({})", join(x)));
            for (p, q) in tuple.p.iter().zip(&tuple.q) {
                r.line(format!("{pad}  left {} [{}]", fmt_rational(p), rats(q)));
            }
            for (p, q) in tuple.r.iter().zip(&tuple.s) {
                r.line(format!("{pad}  right {} [{}]", fmt_rational(p), rats(q)));
            }
        }
        Certificate::NoViolation { tuples } => r.line(format!("{pad}no-violation tuples={tuples}")),
        Certificate::Refuted { tuples, refutations } => {
            r.line(format!("{pad}refuted tuples={tuples} instances={}", refutations.len()));
            for (inst, cert) in refutations {
                r.line(format!("{pad}  instance:"));
                for l in render_ipexp(inst).lines() {
                    r.line(format!("{pad}    {l}"));
                }
                render_unsat(r, cert, level + 1);
            }
        }
        Certificate::Gap { params, inner } => {
            let opt = |x: &Option<Rational>| x.as_ref().map_or("-".to_string(), fmt_rational);
            r.line(format!(
                "{pad}gap N={} epsilon={} alpha={} beta={} m0={} states={} tail_bound={} certified={}",
                params.n,
                fmt_rational(&params.epsilon),
                opt(&params.alpha),
                opt(&params.beta),
                params.m0,
                params.num_states,
                opt(&params.tail_bound),
                params.certified
            ));
            render_certificate(r, inner, level + 1);
        }
    }
}

fn render_unsat(r: &mut Report, c: &UnsatCert, level: usize) {
    let pad = indent(level);
    match c {
        UnsatCert::Constant => r.line(format!("{pad}constant")),
        UnsatCert::Empty(e) => {
            r.line(format!("{pad}am-gm lambda=({}) tightened={}", rats(&e.lambda), e.tightened));
        }
        UnsatCert::HullEmpty(h) => r.line(format!("{pad}hull-empty support=({})", join(&h.support))),
        UnsatCert::Slices { d, a, b, slices, .. } => {
            r.line(format!("{pad}slices d=({}) range={a}..={b}", join(d)));
            for s in slices {
                match s {
                    SliceCert::NoLatticePoints { i } => r.line(format!("{pad}  slice {i}: no lattice points")),
                    SliceCert::Restricted { i, cert } => {
                        r.line(format!("{pad}  slice {i}:"));
                        render_unsat(r, cert, level + 2);
                    }
                }
            }
        }
    }
}

/// Accepting-run counts on short words must not contradict the reported class.
fn check_class(a: &Pa, class: AmbiguityClass) -> Result<(), CliError> {
    let cap = match class {
        AmbiguityClass::Unambiguous => Some(1),
        AmbiguityClass::Finite { k } => Some(k),
        _ => None,
    };
    if let Some(cap) = cap {
        for w in oracle::words_up_to(a.num_letters(), 6) {
            let n = oracle::count_accepting_runs(a, &w).map_err(|e| CliError::Input(e.to_string()))?;
            if n > cap {
                return Err(CliError::Verify(format!("{} has {n} accepting runs", a.render_word(&w))));
            }
        }
    }
    Ok(())
}

fn verify_gap(a: &Pa, v: &Verdict) -> Result<(), CliError> {
    match v.answer {
        Answer::No => {
            let w = v.witness.as_ref().ok_or_else(|| CliError::Verify("NO without witness".into()))?;
            if a.evaluate(w).map_err(|e| CliError::Verify(e.to_string()))? <= rat(1, 2) {
                return Err(CliError::Verify("witness does not exceed 1/2".into()));
            }
        }
        Answer::Yes => {
            let Some(Certificate::Gap { params, inner }) = &v.certificate else {
                return Err(CliError::Verify("YES without gap certificate".into()));
            };
            let prime = build_a_prime(a, params.n);
            let half = catalog::constant(prime.alphabet(), rat(1, 2));
            let inner = Verdict { answer: Answer::Yes, witness: None, certificate: Some((**inner).clone()), reason: None };
            if !verify_containment(&prime, &half, &inner) {
                return Err(CliError::Verify("truncated automaton certificate".into()));
            }
        }
        Answer::Unknown => {}
    }
    Ok(())
}

fn forge(r: &mut Report, tcm: &Path, out: &Path, steps: usize, verify: bool) -> Result<(), CliError> {
    let text = read(tcm)?;
    let m = parse_machine(&text).map_err(|source| CliError::Parse { path: tcm.display().to_string(), source })?;
    let o = compile(&m);
    fs::create_dir_all(out).map_err(|source| CliError::Io { path: out.display().to_string(), source })?;
    for (name, pa) in [("A.pa", &o.a), ("B.pa", &o.b), ("Aprime.pa", &o.a_prime), ("Bprime.pa", &o.b_prime)] {
        let path = out.join(name);
        fs::write(&path, render_pa(pa)).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
        r.line(format!("wrote {} ({} states, {})", path.display(), pa.num_states(), classify(pa)));
    }
    r.line(format!("alphabet: {}", o.a.alphabet().join(" ")));
    match encode_execution(&m, steps) {
        Ok(w) => {
            let (va, vb) = (o.a.evaluate(&w).expect("machine alphabet"), o.b.evaluate(&w).expect("machine alphabet"));
            r.line(format!("halting word: {}", o.a.render_word(&w)));
            r.line(format!("[[A]] = {} [[B]] = {}", fmt_rational(&va), fmt_rational(&vb)));
            if verify && va != vb {
                return Err(CliError::Verify("halting word does not balance A and B".into()));
            }
        }
        Err(e) => r.line(format!("no halting word: {e}")),
    }
    Ok(())
}

fn brute(r: &mut Report, command: &BruteCommand) -> Result<(), CliError> {
    match command {
        BruteCommand::Contain { a, b, len } => {
            let (pa_a, pa_b) = (load_pa(a)?, load_pa(b)?);
            let rep = oracle::brute_force_containment(&pa_a, &pa_b, *len).map_err(|e| CliError::Input(e.to_string()))?;
            r.line(format!("checked {} words up to length {}", rep.checked, rep.bound));
            r.line(format!("counterexamples: {}", rep.witnesses.len()));
            for (w, d) in rep.witnesses.iter().take(20) {
                r.line(format!("  {} (difference {})", pa_a.render_word(w), fmt_rational(d)));
            }
            if let Some((w, d)) = &rep.extremal {
                r.line(format!("largest difference: {} at {}", fmt_rational(d), pa_a.render_word(w)));
            }
        }
        BruteCommand::Ipexp { file, radius } => {
            let inst = load_ipexp(file)?;
            let rep = oracle::brute_force_ipexp(&inst, *radius);
            r.line(format!("checked {} points in radius {}", rep.checked, rep.bound));
            r.line(format!("solutions: {}", rep.witnesses.len()));
            if let Some((x, v)) = rep.witnesses.first() {
                r.line(format!("smallest: x=({}) f(x) = {}", join(x), fmt_rational(v)));
            }
            if let Some((x, v)) = &rep.extremal {
                r.line(format!("minimum of f: {} at x=({})", fmt_rational(v), join(x)));
            }
        }
        BruteCommand::Runs { pa, word } => {
            let a = load_pa(pa)?;
            let w = word_arg(&a, word)?;
            let runs = oracle::accepting_runs(&a, &w).map_err(|e| CliError::Input(e.to_string()))?;
            r.line(format!("accepting runs: {}", runs.len()));
            let mut total = Rational::from_integer(0.into());
            for run in &runs {
                let states: Vec<&str> = run.run.states().map(|q| a.states()[q].as_str()).collect();
                let mut line = String::new();
                let _ = write!(line, "  {} p={} choices={}", states.join(" "), fmt_rational(&run.probability), run.choices);
                r.line(line);
                total += &run.probability;
            }
            r.line(format!("total: {}", fmt_rational(&total)));
        }
    }
    Ok(())
}
