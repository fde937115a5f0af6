//! Thin dispatcher over the library operations. Exit codes: 0 when a run
//! succeeds or a checked property holds, 1 when it is violated, 2 when the
//! check is inconclusive, 64 for usage errors (reported on stderr).

use clap::{Parser, Subcommand};
use spectre_cli::ops::{
    op_check_robust, op_check_sni, op_check_ss, op_compile, op_corpus, op_relate, op_run,
    op_table, CheckRobustArgs, CheckSniArgs, CheckSsArgs, CompileArgs, CorpusArgs, Outcome,
    RelateArgs, RunArgs, TableArgs, UsageError,
};
use spectre_cli::Corpus;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "spectre-cli",
    version,
    about = "Speculative execution security laboratory over a built-in program corpus"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a program and print its trace
    Run(RunArgs),
    /// Apply a hardening pass and print the compiled component
    Compile(CompileArgs),
    /// Check single-trace speculative safety
    CheckSs(CheckSsArgs),
    /// Check bounded speculative non-interference
    CheckSni(CheckSniArgs),
    /// Check a property against a set of attackers
    CheckRobust(CheckRobustArgs),
    /// Explain a hardened speculative run by an architectural source run
    Relate(RelateArgs),
    /// Reproduce the hardening-pass verdict matrix over the corpus
    Table(TableArgs),
    /// List the built-in corpus
    Corpus(CorpusArgs),
}

fn dispatch(corpus: &Corpus, cmd: &Cmd) -> Result<Outcome, UsageError> {
    match cmd {
        Cmd::Run(args) => op_run(corpus, args),
        Cmd::Compile(args) => op_compile(corpus, args),
        Cmd::CheckSs(args) => op_check_ss(corpus, args),
        Cmd::CheckSni(args) => op_check_sni(corpus, args),
        Cmd::CheckRobust(args) => op_check_robust(corpus, args),
        Cmd::Relate(args) => op_relate(corpus, args),
        Cmd::Table(args) => op_table(corpus, args),
        Cmd::Corpus(args) => op_corpus(corpus, args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help/--version land here too; only real usage faults exit 64.
            let code = if e.use_stderr() { 64 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let corpus = Corpus::load();
    match dispatch(&corpus, &cli.cmd) {
        Ok(out) => {
            print!("{}", out.stdout);
            eprint!("{}", out.stderr);
            ExitCode::from(out.code)
        }
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(64)
        }
    }
}
