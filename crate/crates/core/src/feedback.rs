//! Prompts shown to the user and the append-only event log.

use alloc::string::String;
use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::command::CommandKind;
use crate::geometry::Rect;
use crate::session::Payload;

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(
    feature = "serde",
    derive(Serialize, Deserialize),
    serde(tag = "kind", rename_all = "snake_case")
)]
pub enum FeedbackKind {
    Highlight {
        rect: Rect,
    },
    Audio {
        #[cfg_attr(feature = "serde", serde(rename = "ref"))]
        audio_ref: String,
    },
    Correct,
    Wrong,
    RightPage,
    AtHome,
    StartOver,
    Completion,
    Inconsistency,
    Terminated,
    Ignored,
    Resumed,
    Rejected {
        reason: String,
    },
    RecordingStarted,
    StepRecorded,
    RecordingSaved {
        name: String,
        steps: usize,
    },
}

/// A prompt stamped with the event time and the step index at emission.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct FeedbackEvent {
    pub t: u64,
    pub step: usize,
    #[cfg_attr(feature = "serde", serde(flatten))]
    pub kind: FeedbackKind,
}

/// Log-only classification of what an input did. Metrics are derived from these.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(
    feature = "serde",
    derive(Serialize, Deserialize),
    serde(tag = "type", rename_all = "snake_case")
)]
pub enum Outcome {
    /// Click outside the gated bbox; nothing was dispatched.
    Ignored,
    /// Click on empty space or on no clickable node.
    NoTarget,
    /// Basic-mode calibrated click sent to the device.
    Dispatched {
        node: String,
        x: i32,
        y: i32,
        nav: bool,
    },
    Correct {
        node: String,
        nav: bool,
    },
    Wrong {
        node: String,
        nav: bool,
    },
    Recorded {
        node: String,
    },
    /// Click applied with no tutorial running.
    FreeClick {
        node: String,
        nav: bool,
    },
    Command {
        command: CommandKind,
    },
    Unrecognized,
    SayIgnored,
    DeviceBack {
        nav: bool,
    },
    DeviceHome,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct FeedbackRecord {
    pub step: usize,
    #[cfg_attr(feature = "serde", serde(flatten))]
    pub kind: FeedbackKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize), serde(rename_all = "snake_case"))]
pub enum LogEntry {
    Input(Payload),
    Feedback(FeedbackRecord),
    Outcome(Outcome),
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct LoggedEvent {
    pub seq: u64,
    pub t: u64,
    #[cfg_attr(feature = "serde", serde(flatten))]
    pub entry: LogEntry,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Emission {
    Feedback { kind: FeedbackKind, step: usize },
    Outcome(Outcome),
}

/// Collects what a mode operation produced; the session stamps and logs it.
#[derive(Debug, Default)]
pub struct Emitter {
    items: Vec<Emission>,
}

impl Emitter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn feedback(&mut self, kind: FeedbackKind, step: usize) {
        self.items.push(Emission::Feedback { kind, step });
    }

    pub fn outcome(&mut self, outcome: Outcome) {
        self.items.push(Emission::Outcome(outcome));
    }

    pub fn items(&self) -> &[Emission] {
        &self.items
    }

    pub fn feedback_kinds(&self) -> impl Iterator<Item = &FeedbackKind> {
        self.items.iter().filter_map(|e| match e {
            Emission::Feedback { kind, .. } => Some(kind),
            Emission::Outcome(_) => None,
        })
    }

    pub fn into_items(self) -> Vec<Emission> {
        self.items
    }
}
