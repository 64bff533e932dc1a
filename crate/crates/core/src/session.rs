//! The four-phase service state machine and its ordered, append-only log.
//!
//! Phases move only along Normal <-> Recording, Normal -> Running,
//! Running <-> Paused and Running/Paused -> Normal. Inputs that are not valid
//! in the current phase are logged as a `Rejected` prompt and change nothing.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::basic::BasicState;
use crate::command::{parse_command, KeywordTable};
use crate::device::{hit_test, AppDefinition, DeviceState};
use crate::error::SessionError;
use crate::feedback::{Emission, Emitter, FeedbackEvent, FeedbackKind, FeedbackRecord, LogEntry, LoggedEvent, Outcome};
use crate::geometry::{Point, Rect};
use crate::metrics::{summarize_metrics, Metrics};
use crate::recorder::RecordingState;
use crate::script::{validate_script, TutorialScript};
use crate::trial::TrialState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize), serde(rename_all = "snake_case"))]
pub enum Mode {
    Basic,
    Trial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize), serde(rename_all = "snake_case"))]
pub enum Phase {
    Normal,
    Recording,
    Running,
    Paused,
}

impl Phase {
    /// Whether `self -> next` is one of the permitted transitions (or no change).
    pub fn may_become(self, next: Phase) -> bool {
        use Phase::*;
        self == next
            || matches!(
                (self, next),
                (Normal, Recording)
                    | (Recording, Normal)
                    | (Normal, Running)
                    | (Running, Paused)
                    | (Paused, Running)
                    | (Running, Normal)
                    | (Paused, Normal)
            )
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::Normal => "normal",
            Phase::Recording => "recording",
            Phase::Running => "running",
            Phase::Paused => "paused",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(
    feature = "serde",
    derive(Serialize, Deserialize),
    serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)
)]
pub enum Payload {
    Click {
        x: i32,
        y: i32,
    },
    Say {
        text: String,
    },
    Resume,
    Terminate,
    BeginRecording {
        name: String,
    },
    StageAudio {
        audio: String,
    },
    EndRecording,
    BeginGuidance {
        mode: Mode,
        #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
        script: Option<String>,
    },
    /// The phone's own back key, for manual fixes while a tutorial is paused.
    DeviceBack,
    DeviceHome,
}

impl Payload {
    pub fn name(&self) -> &'static str {
        match self {
            Payload::Click { .. } => "click",
            Payload::Say { .. } => "say",
            Payload::Resume => "resume",
            Payload::Terminate => "terminate",
            Payload::BeginRecording { .. } => "begin_recording",
            Payload::StageAudio { .. } => "stage_audio",
            Payload::EndRecording => "end_recording",
            Payload::BeginGuidance { .. } => "begin_guidance",
            Payload::DeviceBack => "device_back",
            Payload::DeviceHome => "device_home",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct InputEvent {
    pub t: u64,
    #[cfg_attr(feature = "serde", serde(flatten))]
    pub payload: Payload,
}

impl InputEvent {
    pub fn new(t: u64, payload: Payload) -> Self {
        Self { t, payload }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum ModeState {
    Idle,
    Recording(RecordingState),
    Basic(BasicState),
    Trial(TrialState),
}

#[derive(Debug, Clone)]
pub struct Session {
    id: String,
    device: DeviceState,
    state: ModeState,
    scripts: BTreeMap<String, TutorialScript>,
    default_script: Option<String>,
    keywords: KeywordTable,
    log: Vec<LoggedEvent>,
    last_t: u64,
    last_recorded: Option<TutorialScript>,
}

impl Session {
    /// A Normal-phase session on the home screen. `script`, when given, must
    /// match the app.
    pub fn new(
        id: impl Into<String>,
        app: Arc<AppDefinition>,
        script: Option<TutorialScript>,
    ) -> Result<Self, SessionError> {
        app.validate()?;
        let mut session = Self {
            id: id.into(),
            device: DeviceState::new(app),
            state: ModeState::Idle,
            scripts: BTreeMap::new(),
            default_script: None,
            keywords: KeywordTable::default(),
            log: Vec::new(),
            last_t: 0,
            last_recorded: None,
        };
        if let Some(script) = script {
            session.add_script(script)?;
        }
        Ok(session)
    }

    pub fn with_keywords(mut self, keywords: KeywordTable) -> Self {
        self.keywords = keywords;
        self
    }

    /// Makes `script` available to `begin_guidance` and the default choice.
    pub fn add_script(&mut self, script: TutorialScript) -> Result<(), SessionError> {
        script.check()?;
        let report = validate_script(&script, self.device.app())?;
        if !report.ok {
            return Err(SessionError::ValidationFailed {
                missing: report.missing(),
            });
        }
        self.default_script = Some(script.name.clone());
        self.scripts.insert(script.name.clone(), script);
        Ok(())
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn device(&self) -> &DeviceState {
        &self.device
    }

    pub fn log(&self) -> &[LoggedEvent] {
        &self.log
    }

    pub fn into_log(self) -> Vec<LoggedEvent> {
        self.log
    }

    pub fn keywords(&self) -> &KeywordTable {
        &self.keywords
    }

    pub fn last_recorded(&self) -> Option<&TutorialScript> {
        self.last_recorded.as_ref()
    }

    pub fn script(&self, name: &str) -> Option<&TutorialScript> {
        self.scripts.get(name)
    }

    pub fn phase(&self) -> Phase {
        match &self.state {
            ModeState::Idle => Phase::Normal,
            ModeState::Recording(_) => Phase::Recording,
            ModeState::Basic(b) if b.is_paused() => Phase::Paused,
            ModeState::Basic(_) | ModeState::Trial(_) => Phase::Running,
        }
    }

    pub fn mode(&self) -> Option<Mode> {
        match &self.state {
            ModeState::Basic(_) => Some(Mode::Basic),
            ModeState::Trial(_) => Some(Mode::Trial),
            _ => None,
        }
    }

    pub fn basic(&self) -> Option<&BasicState> {
        match &self.state {
            ModeState::Basic(b) => Some(b),
            _ => None,
        }
    }

    pub fn trial(&self) -> Option<&TrialState> {
        match &self.state {
            ModeState::Trial(t) => Some(t),
            _ => None,
        }
    }

    pub fn recording(&self) -> Option<&RecordingState> {
        match &self.state {
            ModeState::Recording(r) => Some(r),
            _ => None,
        }
    }

    /// Step index of the running tutorial, or the number of recorded steps.
    pub fn step_index(&self) -> usize {
        match &self.state {
            ModeState::Idle => 0,
            ModeState::Recording(r) => r.steps().len(),
            ModeState::Basic(b) => b.step_index(),
            ModeState::Trial(t) => t.step_index(),
        }
    }

    pub fn step_count(&self) -> Option<usize> {
        match &self.state {
            ModeState::Basic(b) => Some(b.script().len()),
            ModeState::Trial(t) => Some(t.script().len()),
            _ => None,
        }
    }

    pub fn overlay_target(&self) -> Option<Rect> {
        match &self.state {
            ModeState::Basic(b) => b.overlay_target(),
            ModeState::Trial(t) => t.overlay_target(),
            _ => None,
        }
    }

    /// Applies one input, logs it with everything it produced, and returns the
    /// prompts. Only a timestamp regression is an error; everything else,
    /// including phase violations, is reported in-band.
    pub fn dispatch_event(&mut self, event: InputEvent) -> Result<Vec<FeedbackEvent>, SessionError> {
        if event.t < self.last_t {
            return Err(SessionError::OutOfOrder {
                t: event.t,
                last: self.last_t,
            });
        }
        self.last_t = event.t;
        let t = event.t;
        let mut out = Emitter::new();
        if let Err(err) = self.route(&event.payload, &mut out) {
            if err != SessionError::NoTarget {
                log::debug!("session {}: rejected {}: {err}", self.id, event.payload.name());
                out.feedback(
                    FeedbackKind::Rejected {
                        reason: err.to_string(),
                    },
                    self.step_index(),
                );
            }
        }
        self.finish_if_complete();

        self.push_log(t, LogEntry::Input(event.payload));
        let mut feedback = Vec::new();
        for item in out.into_items() {
            match item {
                Emission::Feedback { kind, step } => {
                    feedback.push(FeedbackEvent {
                        t,
                        step,
                        kind: kind.clone(),
                    });
                    self.push_log(t, LogEntry::Feedback(FeedbackRecord { step, kind }));
                }
                Emission::Outcome(o) => self.push_log(t, LogEntry::Outcome(o)),
            }
        }
        Ok(feedback)
    }

    fn push_log(&mut self, t: u64, entry: LogEntry) {
        let seq = self.log.len() as u64;
        self.log.push(LoggedEvent { seq, t, entry });
    }

    fn finish_if_complete(&mut self) {
        let done = match &self.state {
            ModeState::Basic(b) => b.is_complete(),
            ModeState::Trial(t) => t.is_complete(),
            _ => false,
        };
        if done {
            self.state = ModeState::Idle;
        }
    }

    fn resolve_script(&self, name: Option<&str>) -> Result<TutorialScript, SessionError> {
        let key = name.or(self.default_script.as_deref()).unwrap_or_default();
        self.scripts
            .get(key)
            .cloned()
            .ok_or_else(|| SessionError::UnknownScript(key.to_string()))
    }

    fn route(&mut self, payload: &Payload, out: &mut Emitter) -> Result<(), SessionError> {
        let phase = self.phase();
        let illegal = || SessionError::IllegalPhase {
            op: payload.name(),
            phase,
        };
        match (&mut self.state, payload) {
            (ModeState::Trial(trial), Payload::Say { text }) => match parse_command(text, &self.keywords) {
                Some(command) => {
                    trial.on_command(&mut self.device, command, out)?;
                }
                None => out.outcome(Outcome::Unrecognized),
            },
            (_, Payload::Say { .. }) => out.outcome(Outcome::SayIgnored),

            (ModeState::Idle, Payload::Click { x, y }) => {
                let point = Point::new(*x, *y);
                match hit_test(self.device.current_screen(), point).cloned() {
                    Some(node) => {
                        let nav = self.device.apply_click(&node)?;
                        out.outcome(Outcome::FreeClick {
                            node: node.node_id,
                            nav,
                        });
                    }
                    None => out.outcome(Outcome::NoTarget),
                }
            }
            (ModeState::Idle, Payload::BeginRecording { name }) => {
                let rec = RecordingState::begin(name, &self.device.app().app_id)?;
                self.state = ModeState::Recording(rec);
                out.feedback(FeedbackKind::RecordingStarted, 0);
            }
            (ModeState::Idle, Payload::BeginGuidance { mode, script }) => {
                let script = self.resolve_script(script.as_deref())?;
                self.state = match mode {
                    Mode::Basic => ModeState::Basic(BasicState::begin(script, &self.device, out)?),
                    Mode::Trial => ModeState::Trial(TrialState::begin(script, &self.device, out)?),
                };
            }
            (ModeState::Idle, Payload::DeviceBack) => {
                let nav = self.device.navigate_back();
                out.outcome(Outcome::DeviceBack { nav });
            }
            (ModeState::Basic(b), Payload::DeviceBack) if b.is_paused() => {
                let nav = self.device.navigate_back();
                out.outcome(Outcome::DeviceBack { nav });
            }
            (ModeState::Idle, Payload::DeviceHome) => {
                self.device.navigate_home();
                out.outcome(Outcome::DeviceHome);
            }
            (ModeState::Basic(b), Payload::DeviceHome) if b.is_paused() => {
                self.device.navigate_home();
                out.outcome(Outcome::DeviceHome);
            }

            (ModeState::Recording(rec), Payload::Click { x, y }) => {
                rec.observe_click(&mut self.device, Point::new(*x, *y), out)?;
            }
            (ModeState::Recording(rec), Payload::StageAudio { audio }) => rec.stage_audio(audio),
            (ModeState::Recording(rec), Payload::EndRecording) => {
                let script = rec.finish()?;
                self.state = ModeState::Idle;
                out.feedback(
                    FeedbackKind::RecordingSaved {
                        name: script.name.clone(),
                        steps: script.len(),
                    },
                    script.len(),
                );
                self.default_script = Some(script.name.clone());
                self.scripts.insert(script.name.clone(), script.clone());
                self.last_recorded = Some(script);
            }

            (ModeState::Basic(b), Payload::Click { x, y }) if !b.is_paused() => {
                b.on_click(&mut self.device, Point::new(*x, *y), out);
            }
            (ModeState::Basic(b), Payload::Resume) if b.is_paused() => {
                b.resume(&self.device, out)?;
            }
            (ModeState::Trial(trial), Payload::Click { x, y }) => {
                trial.on_click(&mut self.device, Point::new(*x, *y), out);
            }
            (ModeState::Basic(_) | ModeState::Trial(_), Payload::Terminate) => {
                out.feedback(FeedbackKind::Terminated, self.step_index());
                self.state = ModeState::Idle;
            }

            _ => return Err(illegal()),
        }
        Ok(())
    }
}

/// Replays `events` headlessly against a fresh session. When the trace has no
/// `begin_guidance` event, one is synthesized at t=0 for `mode`.
pub fn run_trace(
    app: Arc<AppDefinition>,
    script: TutorialScript,
    mode: Mode,
    events: &[InputEvent],
) -> Result<(Vec<LoggedEvent>, Metrics), SessionError> {
    replay(Session::new("trace", app, Some(script))?, mode, events)
}

/// [`run_trace`] on a caller-configured session (keyword table, extra scripts).
pub fn replay(
    mut session: Session,
    mode: Mode,
    events: &[InputEvent],
) -> Result<(Vec<LoggedEvent>, Metrics), SessionError> {
    let has_begin = events
        .iter()
        .any(|e| matches!(e.payload, Payload::BeginGuidance { .. }));
    if !has_begin {
        session.dispatch_event(InputEvent::new(0, Payload::BeginGuidance { mode, script: None }))?;
    }
    for event in events {
        session.dispatch_event(event.clone())?;
    }
    let metrics = summarize_metrics(session.log())?;
    Ok((session.log, metrics))
}

/// Replays a demonstration. Recording starts at t=0 under `name` unless the
/// trace starts it itself, and is ended after the last event if still open.
pub fn record_trace(
    app: Arc<AppDefinition>,
    name: &str,
    events: &[InputEvent],
) -> Result<(Vec<LoggedEvent>, TutorialScript), SessionError> {
    let mut session = Session::new("record", app, None)?;
    let has_begin = events
        .iter()
        .any(|e| matches!(e.payload, Payload::BeginRecording { .. }));
    if !has_begin {
        session.dispatch_event(InputEvent::new(0, Payload::BeginRecording { name: name.into() }))?;
    }
    for event in events {
        session.dispatch_event(event.clone())?;
    }
    if session.phase() == Phase::Recording {
        let t = session.last_t;
        session.dispatch_event(InputEvent::new(t, Payload::EndRecording))?;
    }
    let script = match session.last_recorded.take() {
        Some(script) => script,
        None => {
            return Err(match session.recording() {
                Some(_) => crate::error::ScriptError::EmptyTutorial.into(),
                None => SessionError::IllegalPhase {
                    op: "end_recording",
                    phase: Phase::Normal,
                },
            })
        }
    };
    Ok((session.log, script))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::device::fixtures::milkapp;
    use crate::script::fixtures::milk_script;
    use alloc::vec;

    fn session() -> Session {
        Session::new("s", Arc::new(milkapp()), Some(milk_script())).unwrap()
    }

    fn ev(t: u64, payload: Payload) -> InputEvent {
        InputEvent::new(t, payload)
    }

    fn click(t: u64, x: i32, y: i32) -> InputEvent {
        ev(t, Payload::Click { x, y })
    }

    fn begin(mode: Mode) -> InputEvent {
        ev(0, Payload::BeginGuidance { mode, script: None })
    }

    #[test]
    fn create_session_variants() {
        assert_eq!(session().phase(), Phase::Normal);
        assert_eq!(
            Session::new("s", Arc::new(milkapp()), None).unwrap().phase(),
            Phase::Normal
        );
        let mut bad = milk_script();
        bad.steps[1].text = "Cream".into();
        assert!(matches!(
            Session::new("s", Arc::new(milkapp()), Some(bad)),
            Err(SessionError::ValidationFailed { missing }) if missing == vec![1]
        ));
    }

    #[test]
    fn say_is_ignored_in_basic() {
        let mut s = session();
        s.dispatch_event(begin(Mode::Basic)).unwrap();
        let fb = s.dispatch_event(ev(5, Payload::Say { text: "back".into() })).unwrap();
        assert!(fb.is_empty());
        assert_eq!(s.phase(), Phase::Running);
        assert_eq!(s.device().stack(), ["home"]);
        assert!(matches!(
            s.log().last().unwrap().entry,
            LogEntry::Outcome(Outcome::SayIgnored)
        ));
    }

    #[test]
    fn terminate_returns_to_normal_and_keeps_device() {
        let mut s = session();
        s.dispatch_event(begin(Mode::Basic)).unwrap();
        s.dispatch_event(click(10, 150, 240)).unwrap();
        let fb = s.dispatch_event(ev(20, Payload::Terminate)).unwrap();
        assert_eq!(fb[0].kind, FeedbackKind::Terminated);
        assert_eq!(fb[0].step, 1);
        assert_eq!(s.phase(), Phase::Normal);
        assert_eq!(s.device().current_screen_id(), "menu");
        let fb = s.dispatch_event(ev(30, Payload::Terminate)).unwrap();
        assert!(matches!(fb[0].kind, FeedbackKind::Rejected { .. }));
    }

    #[test]
    fn begin_mid_recording_is_rejected() {
        let mut s = session();
        s.dispatch_event(ev(0, Payload::BeginRecording { name: "x".into() }))
            .unwrap();
        let fb = s.dispatch_event(begin(Mode::Basic)).unwrap();
        assert!(matches!(&fb[0].kind, FeedbackKind::Rejected { reason } if reason.contains("recording")));
        assert_eq!(s.phase(), Phase::Recording);
        let fb = s
            .dispatch_event(ev(1, Payload::BeginRecording { name: "y".into() }))
            .unwrap();
        assert!(matches!(fb[0].kind, FeedbackKind::Rejected { .. }));
    }

    #[test]
    fn stage_audio_outside_recording_is_rejected() {
        let mut s = session();
        let fb = s
            .dispatch_event(ev(0, Payload::StageAudio { audio: "a.amr".into() }))
            .unwrap();
        assert!(matches!(fb[0].kind, FeedbackKind::Rejected { .. }));
    }

    #[test]
    fn record_then_guide_with_recorded_script() {
        let mut s = Session::new("s", Arc::new(milkapp()), None).unwrap();
        s.dispatch_event(ev(0, Payload::BeginRecording { name: "demo".into() }))
            .unwrap();
        let fb = s.dispatch_event(ev(1, Payload::EndRecording)).unwrap();
        assert!(matches!(&fb[0].kind, FeedbackKind::Rejected { reason } if reason.contains("no steps")));
        assert_eq!(s.phase(), Phase::Recording);
        s.dispatch_event(ev(2, Payload::StageAudio { audio: "s1.amr".into() }))
            .unwrap();
        s.dispatch_event(click(3, 150, 240)).unwrap();
        s.dispatch_event(ev(4, Payload::EndRecording)).unwrap();
        assert_eq!(s.phase(), Phase::Normal);
        assert_eq!(s.last_recorded().unwrap().len(), 1);
        s.dispatch_event(ev(5, Payload::DeviceHome)).unwrap();
        let fb = s
            .dispatch_event(ev(
                6,
                Payload::BeginGuidance {
                    mode: Mode::Trial,
                    script: Some("demo".into()),
                },
            ))
            .unwrap();
        assert_eq!(
            fb[0].kind,
            FeedbackKind::Audio {
                audio_ref: "s1.amr".into()
            }
        );
        let fb = s.dispatch_event(click(7, 150, 240)).unwrap();
        assert!(fb.iter().any(|f| f.kind == FeedbackKind::Completion));
        assert_eq!(s.phase(), Phase::Normal);
    }

    #[test]
    fn unknown_script_is_rejected() {
        let mut s = session();
        let fb = s
            .dispatch_event(ev(
                0,
                Payload::BeginGuidance {
                    mode: Mode::Basic,
                    script: Some("nope".into()),
                },
            ))
            .unwrap();
        assert!(matches!(fb[0].kind, FeedbackKind::Rejected { .. }));
        assert_eq!(s.phase(), Phase::Normal);
    }

    #[test]
    fn out_of_order_events_are_refused_unlogged() {
        let mut s = session();
        s.dispatch_event(click(10, 1, 1)).unwrap();
        let n = s.log().len();
        assert_eq!(
            s.dispatch_event(click(5, 1, 1)),
            Err(SessionError::OutOfOrder { t: 5, last: 10 })
        );
        assert_eq!(s.log().len(), n);
    }

    #[test]
    fn log_sequence_numbers_are_contiguous() {
        let mut s = session();
        s.dispatch_event(begin(Mode::Trial)).unwrap();
        s.dispatch_event(click(1, 150, 440)).unwrap();
        s.dispatch_event(ev(
            2,
            Payload::Say {
                text: "can't find it".into(),
            },
        ))
        .unwrap();
        for (i, e) in s.log().iter().enumerate() {
            assert_eq!(e.seq, i as u64);
        }
    }

    #[test]
    fn transition_table() {
        use Phase::*;
        assert!(Normal.may_become(Recording));
        assert!(Paused.may_become(Running));
        assert!(!Recording.may_become(Running));
        assert!(!Normal.may_become(Paused));
        assert!(!Paused.may_become(Recording));
    }

    #[test]
    fn run_trace_synthesizes_begin() {
        let (log, metrics) = run_trace(Arc::new(milkapp()), milk_script(), Mode::Basic, &[]).unwrap();
        assert!(matches!(
            log[0].entry,
            LogEntry::Input(Payload::BeginGuidance { mode: Mode::Basic, .. })
        ));
        assert!(!metrics.completed);
    }

    #[test]
    fn record_trace_builds_script() {
        let events = [click(10, 150, 240), click(20, 200, 650), click(30, 500, 2050)];
        let (_, script) = record_trace(Arc::new(milkapp()), "buy milk", &events).unwrap();
        assert_eq!(
            script.steps,
            milk_script()
                .steps
                .iter()
                .cloned()
                .map(|mut s| {
                    s.audio_ref = None;
                    s
                })
                .collect::<Vec<_>>()
        );
        assert!(record_trace(Arc::new(milkapp()), "empty", &[]).is_err());
    }
}
