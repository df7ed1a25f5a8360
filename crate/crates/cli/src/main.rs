//! `prover`: decides confluence of a term rewriting system given in the
//! COPS format. Prints `YES` or `MAYBE` on the first line.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::Parser;

use confluence::ars_oracle;
use confluence::certificate::{parse_certificate, print_certificate, BEGIN, END};
use confluence::completion::{
    decompose, verify_certificate, Certificate, Completion, CompletionOptions, Outcome,
};
use confluence::criteria::{CheckOptions, Checker, Criterion};
use confluence::rewriting::Trs;
use confluence::syntax::parse_trs;
use confluence::termination::TerminationProver;

const CRITERIA: &[&str] = &[
    "auto",
    "completion-pcp",
    "completion-linear",
    "completion-huet",
    "linear",
    "linear-cor",
    "parallel",
    "parallel-cor",
    "pcp",
    "pcp-cor",
    "huet",
];

#[derive(Parser, Debug)]
#[command(
    name = "prover",
    version,
    about = "Confluence prover for S ∪ P with S terminating and P reversible"
)]
struct Config {
    /// Criterion to use; `auto` runs completion with every criterion
    #[arg(long, default_value = "auto", value_parser = clap::builder::PossibleValuesParser::new(CRITERIA))]
    criterion: String,

    /// Maximal number of completion steps
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
    max_steps: u64,

    /// Timeout in seconds
    #[arg(long, default_value_t = 60, value_parser = clap::value_parser!(u64).range(1..))]
    timeout: u64,

    /// Length bound for reversibility witnesses
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    rev_k: u64,

    /// Depth bound of the join searches
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    depth: u64,

    /// Print a certificate after a YES verdict
    #[arg(long)]
    certificate: bool,

    /// External termination prover; reads the problem on stdin, answers YES on its first line
    #[arg(long, value_name = "PATH")]
    ext_termination: Option<PathBuf>,

    /// Re-check a certificate file instead of proving
    #[arg(long, value_name = "CERT", hide = true, conflicts_with = "file")]
    verify_certificate: Option<PathBuf>,

    /// Run the abstract-criteria fuzz on this many random instances
    #[arg(long, value_name = "N", hide = true, conflicts_with = "file")]
    ars_fuzz: Option<usize>,

    #[arg(long, default_value_t = 0, hide = true)]
    seed: u64,

    /// Problem file
    #[arg(required_unless_present_any = ["verify_certificate", "ars_fuzz"])]
    file: Option<PathBuf>,
}

impl Config {
    fn check_options(&self) -> CheckOptions {
        CheckOptions {
            depth: self.depth as usize,
            rev_k: self.rev_k as usize,
            ..CheckOptions::default()
        }
    }

    fn completion_options(&self, indices: Vec<usize>) -> CompletionOptions {
        CompletionOptions {
            max_steps: self.max_steps as usize,
            timeout: Duration::from_secs(self.timeout),
            indices,
            check: self.check_options(),
            ..CompletionOptions::default()
        }
    }
}

fn read(path: &PathBuf) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

/// Checks one criterion directly on the partitions suggested by `decompose`.
fn check_directly(
    config: &Config,
    criterion: Criterion,
    r: &Trs,
    prover: &TerminationProver,
) -> Outcome {
    let checker = Checker::with_options(prover, config.check_options());
    let mut reasons = Vec::new();
    for part in decompose(r, &[0], config.rev_k as usize) {
        match checker.check(criterion, &part.s, &part.p) {
            Ok(report) if report.holds => {
                return Outcome::Yes(Box::new(Certificate {
                    input: r.clone(),
                    initial_s: part.s,
                    initial_p: part.p,
                    history: Vec::new(),
                    report,
                }))
            }
            Ok(report) => reasons.push(format!("{} pairs not joined", report.failures.len())),
            Err(e) => reasons.push(e.to_string()),
        }
    }
    Outcome::Maybe(format!("{criterion}: {}", reasons.join("; ")))
}

fn prove(config: &Config, file: &PathBuf) -> Result<Outcome, String> {
    let r = parse_trs(&read(file)?).map_err(|e| format!("{}:{e}", file.display()))?;
    let prover = TerminationProver::new().with_external(config.ext_termination.clone());
    let indices = match config.criterion.as_str() {
        "auto" => vec![0, 1, 2],
        "completion-pcp" => vec![0],
        "completion-linear" => vec![1],
        "completion-huet" => vec![2],
        name => {
            let c =
                Criterion::from_name(name).ok_or_else(|| format!("unknown criterion {name}"))?;
            return Ok(check_directly(config, c, &r, &prover));
        }
    };
    let completion = Completion::with_options(&prover, config.completion_options(indices));
    Ok(completion.run(&r))
}

fn run(config: &Config) -> Result<ExitCode, String> {
    if let Some(n) = config.ars_fuzz {
        let summary = ars_oracle::fuzz(config.seed, n);
        println!(
            "{}",
            if summary.is_clean() {
                "CLEAN"
            } else {
                "VIOLATIONS"
            }
        );
        println!("{summary}");
        for c in summary.unsound.iter().chain(&summary.one_sided) {
            println!("{}: {:?} {:?}", c.criterion, c.ars, c.verdict);
        }
        return Ok(if summary.is_clean() {
            ExitCode::SUCCESS
        } else {
            ExitCode::from(1)
        });
    }
    if let Some(path) = &config.verify_certificate {
        let cert =
            parse_certificate(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))?;
        return Ok(match verify_certificate(&cert, config.rev_k as usize) {
            Ok(()) => {
                println!("VALID");
                ExitCode::SUCCESS
            }
            Err(e) => {
                println!("INVALID");
                println!("{e}");
                ExitCode::from(1)
            }
        });
    }
    let file = config.file.as_ref().expect("clap requires a file");
    match prove(config, file)? {
        Outcome::Yes(cert) => {
            println!("YES");
            let r = &cert.report;
            println!(
                "{} on S = {{{}}}, P = {{{}}}, P' = {{{}}} after {} completion steps",
                r.criterion,
                r.s.labels().join(", "),
                r.p.labels().join(", "),
                r.p_prime.labels().join(", "),
                cert.history.len()
            );
            if config.certificate {
                println!("{BEGIN}");
                print!("{}", print_certificate(&cert));
                println!("{END}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Outcome::Maybe(reason) => {
            println!("MAYBE");
            println!("{reason}");
            Ok(ExitCode::from(1))
        }
    }
}

fn main() -> ExitCode {
    let config = match Config::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(2),
            };
        }
    };
    match run(&config) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
