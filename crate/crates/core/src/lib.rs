//! Interactive tutorial guidance engine.
//!
//! A help-giver demonstrates a task on a simulated device and the demonstration
//! is captured as a [`TutorialScript`]. A help-receiver then replays it either in
//! [`Mode::Basic`] (gated, highlighted step-by-step replay) or in
//! [`Mode::Trial`] (free exploration with correct/wrong feedback and voice-style
//! recovery commands).
//!
//! The crate is `no_std` and only needs `alloc`. File formats, storage, the
//! HTTP service and the CLI live in the `guidekit` companion crate.

#![no_std]
#![warn(rust_2018_idioms)]

extern crate alloc;

pub mod basic;
pub mod command;
pub mod device;
pub mod error;
pub mod feedback;
pub mod geometry;
pub mod metrics;
pub mod recorder;
pub mod script;
pub mod session;
pub mod trial;

pub use basic::{BasicOutcome, BasicState};
pub use command::{parse_command, CommandKind, KeywordTable};
pub use device::{hit_test, nearest_node, AppDefinition, DeviceState, NavAction, Screen, UiNode};
pub use error::{DeviceError, MetricsError, ScriptError, SessionError};
pub use feedback::{Emitter, FeedbackEvent, FeedbackKind, LogEntry, LoggedEvent, Outcome};
pub use geometry::{Iou, Point, Rect};
pub use metrics::{summarize_metrics, Metrics};
pub use recorder::RecordingState;
pub use script::{
    match_step_on_screen, node_matches_step, validate_script, MatchReport, StepMatch, TutorialScript, TutorialStep,
    SCRIPT_VERSION,
};
pub use session::{record_trace, replay, run_trace, InputEvent, Mode, Payload, Phase, Session};
pub use trial::{ledger_apply, ClickKind, LedgerEntry, TrialOutcome, TrialState};
