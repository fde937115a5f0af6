//! Report rendering. The structured form is a machine-readable JSON
//! document mirroring the verdict types; field order follows struct
//! declaration and every collection is explicitly ordered, so the same
//! check always renders byte-identical output.

use security::{Status, Verdict, Witness};
use serde::Serialize;
use trace_model::Trace;

/// One serialized action per trace position (e.g. `rd(12=0)#U`).
pub fn trace_lines(trace: &Trace) -> Vec<String> {
    trace.iter().map(|a| a.to_string()).collect()
}

pub fn status_str(status: Status) -> &'static str {
    match status {
        Status::Holds => "holds",
        Status::Inconclusive => "inconclusive",
        Status::Violated => "violated",
    }
}

/// Process exit code for a check: holds 0, violated 1, inconclusive 2.
pub fn status_code(status: Status) -> u8 {
    match status {
        Status::Holds => 0,
        Status::Violated => 1,
        Status::Inconclusive => 2,
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WitnessReport {
    UnsafeAction {
        trace: Vec<String>,
        index: usize,
    },
    TraceDivergence {
        base: Vec<String>,
        variant: Vec<String>,
        index: usize,
    },
    Attacker {
        index: usize,
        witness: Box<WitnessReport>,
    },
}

impl From<&Witness> for WitnessReport {
    fn from(w: &Witness) -> WitnessReport {
        match w {
            Witness::UnsafeAction { trace, index } => WitnessReport::UnsafeAction {
                trace: trace_lines(trace),
                index: *index,
            },
            Witness::TraceDivergence {
                base,
                variant,
                index,
            } => WitnessReport::TraceDivergence {
                base: trace_lines(base),
                variant: trace_lines(variant),
                index: *index,
            },
            Witness::Attacker { index, witness } => WitnessReport::Attacker {
                index: *index,
                witness: Box::new(WitnessReport::from(witness.as_ref())),
            },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerdictReport {
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessReport>,
}

impl From<&Verdict> for VerdictReport {
    fn from(v: &Verdict) -> VerdictReport {
        VerdictReport {
            status: status_str(v.status).to_string(),
            note: v.note.clone(),
            witness: v.witness.as_ref().map(WitnessReport::from),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DomainReport {
    pub locations: Vec<i64>,
    pub values: Vec<u64>,
}

/// Inputs echoed back into every structured report. One shared struct keeps
/// the key order identical across commands.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Inputs {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub whole: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub component: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub attacker: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub attackers: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pass: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub property: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub semantics: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub domain: Option<DomainReport>,
    /// Candidate values when no single location set applies (the table
    /// derives one relocated domain per victim).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dom_values: Option<Vec<u64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub command: String,
    pub inputs: Inputs,
    pub verdict: VerdictReport,
    /// Per-attacker breakdown (robustness checks only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub attackers: Option<Vec<AttackerLine>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AttackerLine {
    pub id: String,
    pub status: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: Inputs,
    pub status: String,
    pub trace: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompileReport {
    pub command: String,
    pub inputs: Inputs,
    pub component: String,
}

pub fn to_json<T: Serialize>(report: &T) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
    s.push('\n');
    s
}

fn push_trace(out: &mut String, label: &str, lines: &[String], index: Option<usize>) {
    out.push_str("  ");
    out.push_str(label);
    out.push_str(":\n");
    for (i, line) in lines.iter().enumerate() {
        let marker = if Some(i) == index { "  > " } else { "    " };
        out.push_str(marker);
        out.push_str(line);
        out.push('\n');
    }
}

fn witness_text(out: &mut String, w: &Witness) {
    match w {
        Witness::UnsafeAction { trace, index } => {
            out.push_str(&format!("witness: unsafe action at index {index}\n"));
            push_trace(out, "trace", &trace_lines(trace), Some(*index));
        }
        Witness::TraceDivergence {
            base,
            variant,
            index,
        } => {
            out.push_str(&format!("witness: trace divergence at index {index}\n"));
            push_trace(out, "base", &trace_lines(base), Some(*index));
            push_trace(out, "variant", &trace_lines(variant), Some(*index));
        }
        Witness::Attacker { index, witness } => {
            out.push_str(&format!("witness: attacker {index}\n"));
            witness_text(out, witness);
        }
    }
}

/// Text rendering of a verdict: a status line, an optional note, and the
/// witness traces with the offending position marked.
pub fn verdict_text(v: &Verdict) -> String {
    let mut out = format!("status: {}\n", status_str(v.status));
    if let Some(note) = &v.note {
        out.push_str(&format!("note: {note}\n"));
    }
    if let Some(w) = &v.witness {
        witness_text(&mut out, w);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use lang_core::Taint;
    use trace_model::{Action, TaintedAction};

    fn sample() -> Verdict {
        Verdict::violated(Witness::TraceDivergence {
            base: vec![TaintedAction::new(
                Action::Read {
                    addr: 12,
                    value: Some(0),
                },
                Taint::U,
            )],
            variant: vec![TaintedAction::new(
                Action::Read {
                    addr: 10,
                    value: Some(0),
                },
                Taint::U,
            )],
            index: 0,
        })
    }

    #[test]
    fn text_marks_the_diverging_position() {
        let text = verdict_text(&sample());
        assert!(text.starts_with("status: violated\n"));
        assert!(text.contains("  > rd(12=0)#U\n"));
        assert!(text.contains("  > rd(10=0)#U\n"));
    }

    #[test]
    fn structured_form_is_stable() {
        let report = CheckReport {
            command: "check-sni".into(),
            inputs: Inputs {
                component: Some("listing1".into()),
                ..Inputs::default()
            },
            verdict: VerdictReport::from(&sample()),
            attackers: None,
        };
        assert_eq!(to_json(&report), to_json(&report.clone()));
        let json: serde_json::Value = serde_json::from_str(&to_json(&report)).unwrap();
        assert_eq!(json["verdict"]["status"], "violated");
        assert_eq!(json["verdict"]["witness"]["kind"], "trace-divergence");
    }
}
