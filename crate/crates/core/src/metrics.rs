//! Task measures derived from a session log: completion time and mistakes.
//!
//! A mistake is a click on the wrong node in trial mode. Basic mode cannot
//! produce one because clicks outside the highlight never reach the device;
//! those are counted separately as ignored clicks.

use alloc::collections::BTreeMap;
use alloc::format;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::command::CommandKind;
use crate::error::MetricsError;
use crate::feedback::{FeedbackKind, LogEntry, LoggedEvent, Outcome};
use crate::session::Payload;

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize), serde(rename_all = "camelCase"))]
pub struct Metrics {
    pub completion_time_ms: Option<u64>,
    pub mistakes: u32,
    pub wrong_prompts: u32,
    pub ignored_clicks: u32,
    pub commands_used: BTreeMap<CommandKind, u32>,
    pub completed: bool,
}

fn malformed(msg: impl core::fmt::Display) -> MetricsError {
    MetricsError::MalformedLog(format!("{msg}"))
}

/// Each input entry owns the entries up to the next input.
fn groups(log: &[LoggedEvent]) -> impl Iterator<Item = &[LoggedEvent]> {
    let mut rest = log;
    core::iter::from_fn(move || {
        if rest.is_empty() {
            return None;
        }
        let end = rest[1..]
            .iter()
            .position(|e| matches!(e.entry, LogEntry::Input(_)))
            .map_or(rest.len(), |p| p + 1);
        let (head, tail) = rest.split_at(end);
        rest = tail;
        Some(head)
    })
}

fn rejected(group: &[LoggedEvent]) -> bool {
    group
        .iter()
        .any(|e| matches!(&e.entry, LogEntry::Feedback(f) if matches!(f.kind, FeedbackKind::Rejected { .. })))
}

pub fn summarize_metrics(log: &[LoggedEvent]) -> Result<Metrics, MetricsError> {
    let first = log.first().ok_or_else(|| malformed("empty log"))?;
    if !matches!(first.entry, LogEntry::Input(_)) {
        return Err(malformed("log does not start with an input"));
    }
    for pair in log.windows(2) {
        if pair[1].seq <= pair[0].seq {
            return Err(malformed(format_args!("seq {} follows {}", pair[1].seq, pair[0].seq)));
        }
        if pair[1].t < pair[0].t {
            return Err(malformed(format_args!("time runs backwards at seq {}", pair[1].seq)));
        }
    }

    let mut metrics = Metrics {
        completion_time_ms: None,
        mistakes: 0,
        wrong_prompts: 0,
        ignored_clicks: 0,
        commands_used: CommandKind::ALL.iter().map(|k| (*k, 0)).collect(),
        completed: false,
    };
    let mut started_at: Option<u64> = None;
    for group in groups(log) {
        let is_begin = matches!(group[0].entry, LogEntry::Input(Payload::BeginGuidance { .. }));
        if is_begin && !rejected(group) {
            if started_at.is_some() {
                return Err(malformed("more than one guidance run"));
            }
            started_at = Some(group[0].t);
        }
        let Some(start) = started_at else { continue };
        for entry in group {
            match &entry.entry {
                LogEntry::Outcome(Outcome::Wrong { .. }) => metrics.mistakes += 1,
                LogEntry::Outcome(Outcome::Ignored) => metrics.ignored_clicks += 1,
                LogEntry::Outcome(Outcome::Command { command }) => {
                    *metrics.commands_used.entry(*command).or_default() += 1;
                }
                LogEntry::Feedback(f) => match f.kind {
                    FeedbackKind::Wrong => metrics.wrong_prompts += 1,
                    FeedbackKind::Completion if !metrics.completed => {
                        metrics.completed = true;
                        metrics.completion_time_ms = Some(entry.t - start);
                    }
                    _ => {}
                },
                _ => {}
            }
        }
    }
    if started_at.is_none() {
        return Err(malformed("no guidance run in log"));
    }
    Ok(metrics)
}
