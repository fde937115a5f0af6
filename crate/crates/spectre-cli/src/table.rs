//! The hardening-pass verdict matrix: for every pass and both taint modes,
//! bounded non-interference of each compiled corpus victim against each
//! corpus attacker, aggregated to one cell per (pass, mode).
//!
//! Cells are independent, so the (pass, mode, victim, attacker) jobs fan
//! out across worker threads; results are folded back in corpus order, so
//! the rendered table is deterministic regardless of scheduling.

use crate::corpus::{Corpus, TableExpectation};
use crate::report::{status_str, Inputs};
use hardening::{compile, Pass};
use lang_core::{plug, Mode};
use rayon::prelude::*;
use security::{check_sni_bounded_seq, PrivDomain, Semantics, Status};
use serde::Serialize;

/// Row order of the published matrix.
pub const TABLE_PASSES: [Pass; 6] = [
    Pass::MsvcModel,
    Pass::UnsafeSlh,
    Pass::LfenceICC,
    Pass::SslhStrong,
    Pass::SlhWeak,
    Pass::NislhWeak,
];

#[derive(Debug, Clone)]
pub struct TableCell {
    pub status: Status,
    /// `victim × attacker` of the first non-holding check, in corpus order.
    pub first_failure: Option<String>,
}

#[derive(Debug, Clone)]
pub struct TableRow {
    pub pass: Pass,
    pub strong: TableCell,
    pub weak: TableCell,
}

/// Compute the full matrix. Every cell quantifies over the corpus table
/// sources and the corpus attacker set under the speculative semantics.
pub fn compute_table(corpus: &Corpus, values: &[u64], omega: u64, budget: u64) -> Vec<TableRow> {
    let sources = corpus.table_sources();
    let attackers = corpus.table_attackers();
    let modes = [Mode::Strong, Mode::Weak];

    let mut jobs = Vec::new();
    for pass in TABLE_PASSES {
        for mode in modes {
            for (cid, component) in &sources {
                for (aid, attacker) in &attackers {
                    jobs.push((pass, mode, cid.clone(), component, aid.clone(), attacker));
                }
            }
        }
    }

    let verdicts: Vec<(Pass, Mode, String, Status)> = jobs
        .par_iter()
        .map(|(pass, mode, cid, component, aid, attacker)| {
            let compiled = compile(*pass, component).expect("corpus components compile");
            let w = plug((*attacker).clone(), compiled).expect("corpus programs link");
            let dom = pass.shift_domain(&PrivDomain::declared(component, values.iter().copied()));
            let verdict = check_sni_bounded_seq(&w, &dom, Semantics::Spec { omega }, *mode, budget)
                .expect("corpus domain enumerations stay within the cap");
            (*pass, *mode, format!("{cid} × {aid}"), verdict.status)
        })
        .collect();

    TABLE_PASSES
        .into_iter()
        .map(|pass| {
            let cell = |mode: Mode| {
                let mut status = Status::Holds;
                let mut first_failure = None;
                for (p, m, label, s) in &verdicts {
                    if *p == pass && *m == mode {
                        if *s != Status::Holds && first_failure.is_none() {
                            first_failure = Some(label.clone());
                        }
                        status = status.max(*s);
                    }
                }
                TableCell {
                    status,
                    first_failure,
                }
            };
            TableRow {
                pass,
                strong: cell(Mode::Strong),
                weak: cell(Mode::Weak),
            }
        })
        .collect()
}

fn cell_symbol(status: Status) -> &'static str {
    match status {
        Status::Holds => "●",
        Status::Violated => "○",
        Status::Inconclusive => "?",
    }
}

/// Human-readable matrix. A filled circle marks a cell where every
/// compiled victim held against every attacker.
pub fn render_text(rows: &[TableRow]) -> String {
    let mut out = String::from("pass            robust-sni (strong)  robust-sni (weak)\n");
    for row in rows {
        out.push_str(&format!(
            "{:<15} {:<20} {:<17}\n",
            row.pass.label(),
            format!("{} {}", cell_symbol(row.strong.status), status_str(row.strong.status)),
            format!("{} {}", cell_symbol(row.weak.status), status_str(row.weak.status)),
        ));
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct RowReport {
    pub pass: String,
    pub label: String,
    pub strong: String,
    pub weak: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_strong_failure: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_weak_failure: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TableReport {
    pub command: String,
    pub inputs: Inputs,
    pub rows: Vec<RowReport>,
}

pub fn row_reports(rows: &[TableRow]) -> Vec<RowReport> {
    rows.iter()
        .map(|r| RowReport {
            pass: r.pass.cli_name().to_string(),
            label: r.pass.label().to_string(),
            strong: status_str(r.strong.status).to_string(),
            weak: status_str(r.weak.status).to_string(),
            first_strong_failure: r.strong.first_failure.clone(),
            first_weak_failure: r.weak.first_failure.clone(),
        })
        .collect()
}

/// Compare a computed matrix against the recorded expectation; the error
/// names the first mismatching cell.
pub fn matches_expectation(rows: &[TableRow], expected: &TableExpectation) -> Result<(), String> {
    if rows.len() != expected.rows.len() {
        return Err(format!(
            "expected {} rows, computed {}",
            expected.rows.len(),
            rows.len()
        ));
    }
    for (row, want) in rows.iter().zip(&expected.rows) {
        if row.pass.cli_name() != want.pass {
            return Err(format!(
                "row order drift: expected {}, computed {}",
                want.pass,
                row.pass.cli_name()
            ));
        }
        for (mode, cell, want_status) in [
            ("strong", &row.strong, &want.strong),
            ("weak", &row.weak, &want.weak),
        ] {
            if status_str(cell.status) != want_status {
                return Err(format!(
                    "{} / {mode}: expected {want_status}, computed {} (first failure: {:?})",
                    want.pass,
                    status_str(cell.status),
                    cell.first_failure
                ));
            }
        }
    }
    Ok(())
}
