//! Command implementations. Each operation resolves its inputs (corpus ids
//! or file paths), runs the requested check, and renders one report string
//! plus a process exit code, so the binary's `main` stays a thin dispatcher
//! and integration tests can drive commands in-process.

use crate::corpus::Corpus;
use crate::report::{
    status_code, status_str, trace_lines, verdict_text, AttackerLine, CheckReport, CompileReport,
    DomainReport, Inputs, RunReport, VerdictReport,
};
use crate::table::{compute_table, render_text, row_reports, TableReport};
use backtranslate::rssc_witness;
use clap::{Args, ValueEnum};
use exec_nonspec::{run_trace, RunStatus};
use exec_spec::run_spec_trace;
use hardening::{compile, Pass};
use lang_core::{parse_program, plug, Attacker, Component, Mode, Program};
use security::{
    check_robust, check_robust_detailed, check_sni_bounded, check_ss_program, PrivDomain,
    RobustProperty, Semantics,
};
use std::path::Path;
use trace_model::format_trace;

/// An input fault: bad flags, unknown corpus ids, unparsable files, or
/// anything else that prevents the check from running at all.
#[derive(Debug)]
pub struct UsageError(pub String);

impl From<String> for UsageError {
    fn from(msg: String) -> UsageError {
        UsageError(msg)
    }
}

impl From<&str> for UsageError {
    fn from(msg: &str) -> UsageError {
        UsageError(msg.to_string())
    }
}

/// What a command wants written and how the process should exit.
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: u8,
}

impl Outcome {
    fn ok(stdout: String) -> Outcome {
        Outcome {
            stdout,
            stderr: String::new(),
            code: 0,
        }
    }
}

#[derive(Debug, Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum SemFlag {
    /// Architectural runs only; branches never mispredict.
    Nonspec,
    /// Always-mispredict speculation bounded by the window.
    Spec,
}

#[derive(Debug, Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum ModeFlag {
    /// Any private data is unsafe to disclose speculatively.
    Strong,
    /// Only speculatively accessed private data is unsafe.
    Weak,
}

impl ModeFlag {
    pub fn mode(self) -> Mode {
        match self {
            ModeFlag::Strong => Mode::Strong,
            ModeFlag::Weak => Mode::Weak,
        }
    }

    fn name(self) -> &'static str {
        match self {
            ModeFlag::Strong => "strong",
            ModeFlag::Weak => "weak",
        }
    }
}

#[derive(Debug, Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Human-readable report.
    Text,
    /// Stable machine-readable JSON document.
    Structured,
}

/// Inclusive candidate-value range for the private-heap enumeration,
/// written `LO..HI`.
#[derive(Debug, Clone)]
pub struct DomRange {
    pub lo: u64,
    pub hi: u64,
}

impl DomRange {
    pub fn values(&self) -> Vec<u64> {
        (self.lo..=self.hi).collect()
    }
}

pub fn parse_dom(s: &str) -> Result<DomRange, String> {
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| format!("expected LO..HI (inclusive), got {s:?}"))?;
    let lo: u64 = lo.trim().parse().map_err(|_| format!("bad lower bound {lo:?}"))?;
    let hi: u64 = hi.trim().parse().map_err(|_| format!("bad upper bound {hi:?}"))?;
    if lo > hi {
        return Err(format!("empty range {s:?}"));
    }
    Ok(DomRange { lo, hi })
}

pub fn parse_pass(s: &str) -> Result<Pass, String> {
    s.parse()
}

/// Program under test: either one whole-program file/corpus id, or a
/// component and an attacker given separately.
#[derive(Debug, Clone, Args)]
pub struct ProgramInput {
    /// Whole-program file or corpus id (attacker and component in one file)
    #[arg(long, conflicts_with_all = ["component", "attacker"])]
    pub whole: Option<String>,
    /// Component file or corpus id (e.g. listing1)
    #[arg(long, requires = "attacker")]
    pub component: Option<String>,
    /// Attacker file or corpus id (e.g. a8)
    #[arg(long, requires = "component")]
    pub attacker: Option<String>,
}

/// Resolved program under test, keeping the labels for report echoing.
pub struct ResolvedInput {
    pub attacker: Attacker,
    pub component: Component,
    pub inputs: Inputs,
}

fn corpus_id(arg: &str) -> &str {
    arg.strip_suffix(".prog").unwrap_or(arg)
}

fn parse_file(arg: &str) -> Result<Program, UsageError> {
    let text = std::fs::read_to_string(arg).map_err(|e| format!("{arg}: {e}"))?;
    parse_program(&text).map_err(|e| UsageError(format!("{arg}: {e}")))
}

pub fn load_component(corpus: &Corpus, arg: &str) -> Result<Component, UsageError> {
    if Path::new(arg).is_file() {
        return match parse_file(arg)? {
            Program::Component(c) => Ok(c),
            _ => Err(format!("{arg}: file does not contain a bare component").into()),
        };
    }
    corpus.component(corpus_id(arg)).ok_or_else(|| {
        format!("unknown component {arg:?}: not a file and not a corpus id (try `corpus`)").into()
    })
}

pub fn load_attacker(corpus: &Corpus, arg: &str) -> Result<Attacker, UsageError> {
    if Path::new(arg).is_file() {
        return match parse_file(arg)? {
            Program::Attacker(a) => Ok(a),
            _ => Err(format!("{arg}: file does not contain a bare attacker").into()),
        };
    }
    corpus.attacker(corpus_id(arg)).ok_or_else(|| {
        format!("unknown attacker {arg:?}: not a file and not a corpus id (try `corpus`)").into()
    })
}

impl ProgramInput {
    pub fn resolve(&self, corpus: &Corpus) -> Result<ResolvedInput, UsageError> {
        match (&self.whole, &self.component, &self.attacker) {
            (Some(w), None, None) => {
                let whole = if Path::new(w).is_file() {
                    match parse_file(w)? {
                        Program::Whole(p) => p,
                        _ => {
                            return Err(format!(
                                "{w}: expected a whole program (attacker and component blocks)"
                            )
                            .into())
                        }
                    }
                } else {
                    corpus.whole(corpus_id(w)).ok_or_else(|| {
                        format!("unknown program {w:?}: not a file and not a corpus id")
                    })?
                };
                Ok(ResolvedInput {
                    attacker: whole.attacker,
                    component: whole.component,
                    inputs: Inputs {
                        whole: Some(w.clone()),
                        ..Inputs::default()
                    },
                })
            }
            (None, Some(c), Some(a)) => Ok(ResolvedInput {
                attacker: load_attacker(corpus, a)?,
                component: load_component(corpus, c)?,
                inputs: Inputs {
                    component: Some(c.clone()),
                    attacker: Some(a.clone()),
                    ..Inputs::default()
                },
            }),
            _ => Err("supply either --whole, or both --component and --attacker".into()),
        }
    }
}

fn compile_component(pass: Option<Pass>, component: &Component) -> Result<Component, UsageError> {
    match pass {
        Some(p) => compile(p, component).map_err(|e| UsageError(e.to_string())),
        None => Ok(component.clone()),
    }
}

fn link(attacker: Attacker, component: Component) -> Result<lang_core::WholeProgram, UsageError> {
    plug(attacker, component).map_err(|e| UsageError(e.to_string()))
}

fn semantics(sem: SemFlag, omega: u64) -> Semantics {
    match sem {
        SemFlag::Nonspec => Semantics::NonSpec,
        SemFlag::Spec => Semantics::Spec { omega },
    }
}

fn echo_common(
    inputs: &mut Inputs,
    pass: Option<Pass>,
    sem: Option<SemFlag>,
    mode: ModeFlag,
    omega: u64,
    budget: u64,
) {
    inputs.pass = pass.map(|p| p.cli_name().to_string());
    inputs.semantics = sem.map(|s| match s {
        SemFlag::Nonspec => "nonspec".to_string(),
        SemFlag::Spec => "spec".to_string(),
    });
    inputs.mode = Some(mode.name().to_string());
    inputs.omega = (sem != Some(SemFlag::Nonspec)).then_some(omega);
    inputs.budget = Some(budget);
}

fn verdict_outcome(
    command: &str,
    inputs: Inputs,
    verdict: &security::Verdict,
    attackers: Option<Vec<AttackerLine>>,
    format: Format,
) -> Outcome {
    let stdout = match format {
        Format::Text => {
            let mut text = verdict_text(verdict);
            if let Some(lines) = &attackers {
                text.push_str("attackers:\n");
                for line in lines {
                    text.push_str(&format!("  {:<4} {}\n", line.id, line.status));
                }
            }
            text
        }
        Format::Structured => crate::report::to_json(&CheckReport {
            command: command.to_string(),
            inputs,
            verdict: VerdictReport::from(verdict),
            attackers,
        }),
    };
    Outcome {
        stdout,
        stderr: String::new(),
        code: status_code(verdict.status),
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub input: ProgramInput,
    /// Harden the component with this pass before linking
    #[arg(long, value_parser = parse_pass)]
    pub pass: Option<Pass>,
    /// Semantics to run under
    #[arg(long, value_enum, default_value = "nonspec")]
    pub sem: SemFlag,
    /// Taint mode
    #[arg(long, value_enum, default_value = "strong")]
    pub mode: ModeFlag,
    /// Speculation window (spec semantics only)
    #[arg(long, default_value_t = 16)]
    pub omega: u64,
    /// Maximum number of machine steps
    #[arg(long, default_value_t = 100_000)]
    pub budget: u64,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

fn run_status_string(status: &RunStatus) -> String {
    match status {
        RunStatus::Terminated => "terminated".to_string(),
        RunStatus::BudgetExhausted => "budget exhausted".to_string(),
        RunStatus::Stuck(reason) => format!("stuck: {reason}"),
    }
}

pub fn op_run(corpus: &Corpus, args: &RunArgs) -> Result<Outcome, UsageError> {
    let resolved = args.input.resolve(corpus)?;
    let compiled = compile_component(args.pass, &resolved.component)?;
    let w = link(resolved.attacker, compiled)?;
    let result = match args.sem {
        SemFlag::Nonspec => run_trace(&w, args.mode.mode(), args.budget),
        SemFlag::Spec => run_spec_trace(&w, args.mode.mode(), args.omega, args.budget),
    };
    let status = run_status_string(&result.status);
    let code = if result.status == RunStatus::Terminated { 0 } else { 2 };
    let mut inputs = resolved.inputs;
    echo_common(&mut inputs, args.pass, Some(args.sem), args.mode, args.omega, args.budget);
    match args.format {
        Format::Text => Ok(Outcome {
            stdout: format_trace(&result.trace),
            stderr: if code == 0 {
                String::new()
            } else {
                format!("run did not terminate: {status}\n")
            },
            code,
        }),
        Format::Structured => Ok(Outcome {
            stdout: crate::report::to_json(&RunReport {
                command: "run".to_string(),
                inputs,
                status,
                trace: trace_lines(&result.trace),
            }),
            stderr: String::new(),
            code,
        }),
    }
}

#[derive(Debug, Clone, Args)]
pub struct CompileArgs {
    /// Component file or corpus id
    #[arg(long)]
    pub component: String,
    /// Hardening pass to apply
    #[arg(long, value_parser = parse_pass)]
    pub pass: Pass,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

pub fn op_compile(corpus: &Corpus, args: &CompileArgs) -> Result<Outcome, UsageError> {
    let component = load_component(corpus, &args.component)?;
    let compiled = compile(args.pass, &component).map_err(|e| UsageError(e.to_string()))?;
    let text = compiled.to_string();
    match args.format {
        Format::Text => Ok(Outcome::ok(text)),
        Format::Structured => Ok(Outcome::ok(crate::report::to_json(&CompileReport {
            command: "compile".to_string(),
            inputs: Inputs {
                component: Some(args.component.clone()),
                pass: Some(args.pass.cli_name().to_string()),
                ..Inputs::default()
            },
            component: text,
        }))),
    }
}

#[derive(Debug, Clone, Args)]
pub struct CheckSsArgs {
    #[command(flatten)]
    pub input: ProgramInput,
    /// Harden the component with this pass before linking
    #[arg(long, value_parser = parse_pass)]
    pub pass: Option<Pass>,
    /// Semantics to check under
    #[arg(long, value_enum, default_value = "spec")]
    pub sem: SemFlag,
    #[arg(long, value_enum, default_value = "strong")]
    pub mode: ModeFlag,
    #[arg(long, default_value_t = 16)]
    pub omega: u64,
    #[arg(long, default_value_t = 100_000)]
    pub budget: u64,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

pub fn op_check_ss(corpus: &Corpus, args: &CheckSsArgs) -> Result<Outcome, UsageError> {
    let resolved = args.input.resolve(corpus)?;
    let compiled = compile_component(args.pass, &resolved.component)?;
    let w = link(resolved.attacker, compiled)?;
    let verdict = check_ss_program(
        &w,
        semantics(args.sem, args.omega),
        args.mode.mode(),
        args.budget,
    );
    let mut inputs = resolved.inputs;
    echo_common(&mut inputs, args.pass, Some(args.sem), args.mode, args.omega, args.budget);
    Ok(verdict_outcome("check-ss", inputs, &verdict, None, args.format))
}

#[derive(Debug, Clone, Args)]
pub struct CheckSniArgs {
    #[command(flatten)]
    pub input: ProgramInput,
    /// Harden the component with this pass before linking (the enumeration
    /// domain is derived from the unhardened component, then relocated)
    #[arg(long, value_parser = parse_pass)]
    pub pass: Option<Pass>,
    /// Semantics to check under
    #[arg(long, value_enum, default_value = "spec")]
    pub sem: SemFlag,
    #[arg(long, value_enum, default_value = "strong")]
    pub mode: ModeFlag,
    #[arg(long, default_value_t = 16)]
    pub omega: u64,
    #[arg(long, default_value_t = 100_000)]
    pub budget: u64,
    /// Candidate values LO..HI (inclusive) for every declared private cell
    #[arg(long, value_parser = parse_dom, default_value = "0..2")]
    pub dom: DomRange,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

pub fn op_check_sni(corpus: &Corpus, args: &CheckSniArgs) -> Result<Outcome, UsageError> {
    let resolved = args.input.resolve(corpus)?;
    let compiled = compile_component(args.pass, &resolved.component)?;
    let source_dom = PrivDomain::declared(&resolved.component, args.dom.values());
    let dom = match args.pass {
        Some(p) => p.shift_domain(&source_dom),
        None => source_dom,
    };
    let w = link(resolved.attacker, compiled)?;
    let verdict = check_sni_bounded(
        &w,
        &dom,
        semantics(args.sem, args.omega),
        args.mode.mode(),
        args.budget,
    )
    .map_err(|e| UsageError(e.to_string()))?;
    let mut inputs = resolved.inputs;
    echo_common(&mut inputs, args.pass, Some(args.sem), args.mode, args.omega, args.budget);
    inputs.domain = Some(DomainReport {
        locations: dom.locations.clone(),
        values: dom.values.clone(),
    });
    Ok(verdict_outcome("check-sni", inputs, &verdict, None, args.format))
}

#[derive(Debug, Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum PropertyFlag {
    /// Single-trace speculative safety.
    Ss,
    /// Bounded speculative non-interference.
    Sni,
}

#[derive(Debug, Clone, Args)]
pub struct CheckRobustArgs {
    /// Component file or corpus id
    #[arg(long)]
    pub component: String,
    /// Attacker file or corpus id; repeatable. Defaults to the whole
    /// corpus attacker set.
    #[arg(long)]
    pub attacker: Vec<String>,
    /// Property to check against every attacker
    #[arg(long, value_enum, default_value = "sni")]
    pub property: PropertyFlag,
    /// Harden the component with this pass before checking
    #[arg(long, value_parser = parse_pass)]
    pub pass: Option<Pass>,
    /// Semantics to check under
    #[arg(long, value_enum, default_value = "spec")]
    pub sem: SemFlag,
    #[arg(long, value_enum, default_value = "strong")]
    pub mode: ModeFlag,
    #[arg(long, default_value_t = 16)]
    pub omega: u64,
    #[arg(long, default_value_t = 100_000)]
    pub budget: u64,
    /// Candidate values LO..HI (inclusive); used by the sni property
    #[arg(long, value_parser = parse_dom, default_value = "0..2")]
    pub dom: DomRange,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

pub fn op_check_robust(corpus: &Corpus, args: &CheckRobustArgs) -> Result<Outcome, UsageError> {
    let component = load_component(corpus, &args.component)?;
    let compiled = compile_component(args.pass, &component)?;
    let named: Vec<(String, Attacker)> = if args.attacker.is_empty() {
        corpus.table_attackers()
    } else {
        args.attacker
            .iter()
            .map(|a| Ok((a.clone(), load_attacker(corpus, a)?)))
            .collect::<Result<_, UsageError>>()?
    };
    let attackers: Vec<Attacker> = named.iter().map(|(_, a)| a.clone()).collect();
    let property = match args.property {
        PropertyFlag::Ss => RobustProperty::Ss,
        PropertyFlag::Sni => {
            let source_dom = PrivDomain::declared(&component, args.dom.values());
            RobustProperty::Sni(match args.pass {
                Some(p) => p.shift_domain(&source_dom),
                None => source_dom,
            })
        }
    };
    let sem = semantics(args.sem, args.omega);
    let mode = args.mode.mode();
    let verdict = check_robust(&compiled, &attackers, &property, sem, mode, args.budget)
        .map_err(|e| UsageError(e.to_string()))?;
    let details = check_robust_detailed(&compiled, &attackers, &property, sem, mode, args.budget)
        .map_err(|e| UsageError(e.to_string()))?;
    let lines: Vec<AttackerLine> = details
        .iter()
        .map(|d| AttackerLine {
            id: named[d.index].0.clone(),
            status: status_str(d.verdict.status).to_string(),
        })
        .collect();
    let mut inputs = Inputs {
        component: Some(args.component.clone()),
        attackers: Some(named.iter().map(|(id, _)| id.clone()).collect()),
        property: Some(
            match args.property {
                PropertyFlag::Ss => "ss",
                PropertyFlag::Sni => "sni",
            }
            .to_string(),
        ),
        ..Inputs::default()
    };
    echo_common(&mut inputs, args.pass, Some(args.sem), args.mode, args.omega, args.budget);
    if let RobustProperty::Sni(dom) = &property {
        inputs.domain = Some(DomainReport {
            locations: dom.locations.clone(),
            values: dom.values.clone(),
        });
    }
    Ok(verdict_outcome("check-robust", inputs, &verdict, Some(lines), args.format))
}

#[derive(Debug, Clone, Args)]
pub struct RelateArgs {
    /// Component file or corpus id
    #[arg(long)]
    pub component: String,
    /// Attacker file or corpus id (target-side attacker)
    #[arg(long)]
    pub attacker: String,
    /// Hardening pass whose compilation is being explained
    #[arg(long, value_parser = parse_pass)]
    pub pass: Pass,
    #[arg(long, value_enum, default_value = "strong")]
    pub mode: ModeFlag,
    #[arg(long, default_value_t = 16)]
    pub omega: u64,
    #[arg(long, default_value_t = 100_000)]
    pub budget: u64,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

pub fn op_relate(corpus: &Corpus, args: &RelateArgs) -> Result<Outcome, UsageError> {
    let component = load_component(corpus, &args.component)?;
    let attacker = load_attacker(corpus, &args.attacker)?;
    let verdict = rssc_witness(
        &component,
        &attacker,
        args.pass,
        args.mode.mode(),
        args.omega,
        args.budget,
    )
    .map_err(|e| UsageError(e.to_string()))?;
    let mut inputs = Inputs {
        component: Some(args.component.clone()),
        attacker: Some(args.attacker.clone()),
        ..Inputs::default()
    };
    echo_common(&mut inputs, Some(args.pass), None, args.mode, args.omega, args.budget);
    Ok(verdict_outcome("relate", inputs, &verdict, None, args.format))
}

#[derive(Debug, Clone, Args)]
pub struct TableArgs {
    #[arg(long, default_value_t = 16)]
    pub omega: u64,
    #[arg(long, default_value_t = 100_000)]
    pub budget: u64,
    /// Candidate values LO..HI (inclusive) for every declared private cell
    #[arg(long, value_parser = parse_dom, default_value = "0..2")]
    pub dom: DomRange,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

pub fn op_table(corpus: &Corpus, args: &TableArgs) -> Result<Outcome, UsageError> {
    let rows = compute_table(corpus, &args.dom.values(), args.omega, args.budget);
    match args.format {
        Format::Text => Ok(Outcome::ok(render_text(&rows))),
        Format::Structured => {
            let inputs = Inputs {
                omega: Some(args.omega),
                budget: Some(args.budget),
                dom_values: Some(args.dom.values()),
                ..Inputs::default()
            };
            Ok(Outcome::ok(crate::report::to_json(&TableReport {
                command: "table".to_string(),
                inputs,
                rows: row_reports(&rows),
            })))
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct CorpusArgs {
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

pub fn op_corpus(corpus: &Corpus, args: &CorpusArgs) -> Result<Outcome, UsageError> {
    match args.format {
        Format::Text => {
            let mut out = String::from("components:\n");
            for e in &corpus.components {
                out.push_str(&format!("  {:<14} {}\n", e.id, e.note));
            }
            out.push_str("attackers:\n");
            for e in &corpus.attackers {
                out.push_str(&format!("  {:<14} {}\n", e.id, e.note));
            }
            out.push_str("whole programs:\n");
            for e in &corpus.whole {
                out.push_str(&format!("  {:<14} {}\n", e.id, e.note));
            }
            out.push_str("golden traces:\n");
            for g in &corpus.goldens {
                out.push_str(&format!(
                    "  {} with {} under {} {}: {}\n",
                    g.component, g.attacker, g.sem, g.mode, g.file
                ));
            }
            out.push_str(&format!(
                "addresses: secret array at cells -{}.., public probe array at {}, length bound at location {}\n",
                corpus.address_constants.a_base,
                corpus.address_constants.b_base,
                corpus.address_constants.size_location,
            ));
            Ok(Outcome::ok(out))
        }
        Format::Structured => Ok(Outcome::ok(crate::report::to_json(&CorpusReport {
            command: "corpus".to_string(),
            address_constants: corpus.address_constants.clone(),
            components: corpus.components.clone(),
            attackers: corpus.attackers.clone(),
            whole: corpus.whole.clone(),
            goldens: corpus.goldens.clone(),
            table: corpus.table.clone(),
        }))),
    }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct CorpusReport {
    pub command: String,
    pub address_constants: crate::corpus::AddressConstants,
    pub components: Vec<crate::corpus::ComponentEntry>,
    pub attackers: Vec<crate::corpus::AttackerEntry>,
    pub whole: Vec<crate::corpus::WholeEntry>,
    pub goldens: Vec<crate::corpus::GoldenEntry>,
    pub table: crate::corpus::TableExpectation,
}
