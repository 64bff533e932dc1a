//! JSON file formats: app definitions, tutorial scripts, traces, logs and
//! keyword tables.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use guidekit_core::{AppDefinition, InputEvent, KeywordTable, LoggedEvent, Metrics, ScriptError, TutorialScript};

use crate::error::FormatError;

/// Parses and validates an app definition. Unknown fields are rejected.
pub fn load_app_definition(text: &str) -> Result<AppDefinition, FormatError> {
    let app: AppDefinition = serde_json::from_str(text).map_err(|e| FormatError::Parse(e.to_string()))?;
    app.validate()?;
    Ok(app)
}

pub fn encode_app_definition(app: &AppDefinition) -> String {
    serde_json::to_string(app).expect("app definitions always serialize")
}

/// Canonical tutorial text: fixed key order, no insignificant whitespace.
pub fn encode_script(script: &TutorialScript) -> String {
    serde_json::to_string(script).expect("tutorial scripts always serialize")
}

pub fn decode_script(text: &str) -> Result<TutorialScript, FormatError> {
    let value: Value = serde_json::from_str(text).map_err(FormatError::from_json)?;
    if let Some(Value::Array(steps)) = value.get("steps") {
        if steps.is_empty() {
            return Err(FormatError::EmptyTutorial);
        }
    }
    let script: TutorialScript = serde_json::from_value(value).map_err(FormatError::from_json)?;
    match script.check() {
        Ok(()) => Ok(script),
        Err(ScriptError::EmptyTutorial) => Err(FormatError::EmptyTutorial),
        Err(other) => Err(FormatError::Schema(other.to_string())),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceFile {
    pub events: Vec<InputEvent>,
}

/// Parses `{"events":[...]}`; timestamps must not decrease.
pub fn parse_trace(text: &str) -> Result<Vec<InputEvent>, FormatError> {
    let trace: TraceFile = serde_json::from_str(text).map_err(|e| FormatError::Parse(e.to_string()))?;
    if let Some(w) = trace.events.windows(2).find(|w| w[1].t < w[0].t) {
        return Err(FormatError::Parse(format!("event time {} precedes {}", w[1].t, w[0].t)));
    }
    Ok(trace.events)
}

pub fn encode_trace(events: &[InputEvent]) -> String {
    serde_json::to_string(&TraceFile {
        events: events.to_vec(),
    })
    .expect("traces always serialize")
}

/// One JSON object per line.
pub fn encode_log(log: &[LoggedEvent]) -> String {
    let mut out = String::new();
    for entry in log {
        out.push_str(&serde_json::to_string(entry).expect("log entries always serialize"));
        out.push('\n');
    }
    out
}

pub fn decode_log(text: &str) -> Result<Vec<LoggedEvent>, FormatError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| FormatError::Parse(format!("line {}: {e}", i + 1))))
        .collect()
}

/// Inputs of a log, in order, ready to be replayed.
pub fn log_inputs(log: &[LoggedEvent]) -> Vec<InputEvent> {
    log.iter()
        .filter_map(|e| match &e.entry {
            guidekit_core::LogEntry::Input(p) => Some(InputEvent::new(e.t, p.clone())),
            _ => None,
        })
        .collect()
}

pub fn load_keyword_table(text: &str) -> Result<KeywordTable, FormatError> {
    serde_json::from_str(text).map_err(FormatError::from_json)
}

pub fn encode_metrics(metrics: &Metrics) -> String {
    serde_json::to_string_pretty(metrics).expect("metrics always serialize")
}
