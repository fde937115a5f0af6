use lang_core::Taint;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// One observable event. Call/return actions are classified from the
/// attacker's point of view: `CallIn` is the attacker invoking a component
/// function (`call?`), `CallOut` is the component invoking an imported
/// attacker function (`call!`), `RetOut` returns control to the attacker
/// (`ret!`) and `RetBack` returns control to the component (`ret?`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Action {
    CallIn { func: String, arg: u64 },
    CallOut { func: String, arg: u64 },
    RetOut,
    RetBack,
    /// Heap read at a signed address; `value` is present for value-carrying
    /// shapes (`rd(n=v)`), absent for the value-free shape (`rd(n)`).
    Read { addr: i64, value: Option<u64> },
    /// Heap write; same value conventions as `Read`.
    Write { addr: i64, value: Option<u64> },
    /// Branch observation carrying the guard's value.
    Branch { value: u64 },
    /// End of a mis-speculated segment.
    Rollback,
}

/// An action paired with its safety label.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TaintedAction {
    pub action: Action,
    pub taint: Taint,
}

impl TaintedAction {
    pub fn new(action: Action, taint: Taint) -> Self {
        TaintedAction { action, taint }
    }
}

pub type Trace = Vec<TaintedAction>;

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::CallIn { func, arg } => write!(f, "call?({func},{arg})"),
            Action::CallOut { func, arg } => write!(f, "call!({func},{arg})"),
            Action::RetOut => write!(f, "ret!"),
            Action::RetBack => write!(f, "ret?"),
            Action::Read { addr, value: None } => write!(f, "rd({addr})"),
            Action::Read {
                addr,
                value: Some(v),
            } => write!(f, "rd({addr}={v})"),
            Action::Write { addr, value: None } => write!(f, "wr({addr})"),
            Action::Write {
                addr,
                value: Some(v),
            } => write!(f, "wr({addr}={v})"),
            Action::Branch { value } => write!(f, "if({value})"),
            Action::Rollback => write!(f, "rollback"),
        }
    }
}

impl fmt::Display for TaintedAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.action, self.taint)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseActionError {
    #[error("action `{0}` has no `#S`/`#U` taint suffix")]
    MissingTaint(String),
    #[error("unknown taint `{0}` (expected S or U)")]
    BadTaint(String),
    #[error("malformed action `{0}`")]
    BadAction(String),
    #[error("malformed number in `{0}`")]
    BadNumber(String),
}

fn parse_call_payload(s: &str, text: &str) -> Result<(String, u64), ParseActionError> {
    let inner = s
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| ParseActionError::BadAction(text.to_string()))?;
    let (func, arg) = inner
        .split_once(',')
        .ok_or_else(|| ParseActionError::BadAction(text.to_string()))?;
    if func.is_empty() {
        return Err(ParseActionError::BadAction(text.to_string()));
    }
    let arg = arg
        .parse::<u64>()
        .map_err(|_| ParseActionError::BadNumber(text.to_string()))?;
    Ok((func.to_string(), arg))
}

/// Parses `(n)` or `(n=v)` payloads of read/write actions.
fn parse_mem_payload(s: &str, text: &str) -> Result<(i64, Option<u64>), ParseActionError> {
    let inner = s
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| ParseActionError::BadAction(text.to_string()))?;
    let (addr_s, val) = match inner.split_once('=') {
        Some((a, v)) => {
            let v = v
                .parse::<u64>()
                .map_err(|_| ParseActionError::BadNumber(text.to_string()))?;
            (a, Some(v))
        }
        None => (inner, None),
    };
    let addr = addr_s
        .parse::<i64>()
        .map_err(|_| ParseActionError::BadNumber(text.to_string()))?;
    Ok((addr, val))
}

impl FromStr for TaintedAction {
    type Err = ParseActionError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let (body, taint_s) = text
            .rsplit_once('#')
            .ok_or_else(|| ParseActionError::MissingTaint(text.to_string()))?;
        let taint = taint_s
            .parse::<Taint>()
            .map_err(|_| ParseActionError::BadTaint(taint_s.to_string()))?;
        let action = if let Some(rest) = body.strip_prefix("call?") {
            let (func, arg) = parse_call_payload(rest, text)?;
            Action::CallIn { func, arg }
        } else if let Some(rest) = body.strip_prefix("call!") {
            let (func, arg) = parse_call_payload(rest, text)?;
            Action::CallOut { func, arg }
        } else if body == "ret!" {
            Action::RetOut
        } else if body == "ret?" {
            Action::RetBack
        } else if let Some(rest) = body.strip_prefix("rd") {
            let (addr, value) = parse_mem_payload(rest, text)?;
            Action::Read { addr, value }
        } else if let Some(rest) = body.strip_prefix("wr") {
            let (addr, value) = parse_mem_payload(rest, text)?;
            Action::Write { addr, value }
        } else if let Some(rest) = body.strip_prefix("if") {
            let (v, none) = parse_mem_payload(rest, text)?;
            if none.is_some() || v < 0 {
                return Err(ParseActionError::BadAction(text.to_string()));
            }
            Action::Branch { value: v as u64 }
        } else if body == "rollback" {
            Action::Rollback
        } else {
            return Err(ParseActionError::BadAction(text.to_string()));
        };
        Ok(TaintedAction { action, taint })
    }
}

/// Renders a trace one action per line, with a trailing newline when the
/// trace is non-empty. This is the byte format of golden trace files.
pub fn format_trace(trace: &[TaintedAction]) -> String {
    let mut out = String::new();
    for a in trace {
        out.push_str(&a.to_string());
        out.push('\n');
    }
    out
}

/// Parses whitespace-separated actions (newlines or spaces both work).
pub fn parse_trace(text: &str) -> Result<Trace, ParseActionError> {
    text.split_whitespace().map(str::parse).collect()
}
