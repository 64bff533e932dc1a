//! Basic mode: gated, highlighted replay.
//!
//! Only clicks inside the highlighted bbox reach the device, snapped to the
//! center of the nearest clickable node. After every navigating click the next
//! step must be found on the new screen, otherwise the tutorial pauses until
//! the user fixes the page and resumes.

use crate::device::{nearest_node, DeviceState};
use crate::error::{ScriptError, SessionError};
use crate::feedback::{Emitter, FeedbackKind, Outcome};
use crate::geometry::{Point, Rect};
use crate::script::{match_step_on_screen, TutorialScript, TutorialStep};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasicOutcome {
    Ignored,
    NoTarget,
    Advanced,
    Paused,
    Completed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasicState {
    script: TutorialScript,
    step_index: usize,
    paused: bool,
}

/// Shared start checks for both guidance modes.
pub(crate) fn check_start(script: &TutorialScript, device: &DeviceState) -> Result<(), SessionError> {
    script.check()?;
    if script.app_id != device.app().app_id {
        return Err(ScriptError::AppMismatch {
            script: script.app_id.clone(),
            app: device.app().app_id.clone(),
        }
        .into());
    }
    let expected = &script.steps[0].screen_id;
    if device.current_screen_id() != expected || device.current_screen_id() != device.app().home_screen_id {
        return Err(SessionError::WrongStartScreen {
            expected: expected.clone(),
            actual: device.current_screen_id().into(),
        });
    }
    Ok(())
}

/// Highlight and optional voice note for entering `step`.
pub(crate) fn announce(step: &TutorialStep, index: usize, highlight: bool, out: &mut Emitter) {
    if highlight {
        out.feedback(FeedbackKind::Highlight { rect: step.bbox }, index);
    }
    if let Some(audio) = &step.audio_ref {
        out.feedback(
            FeedbackKind::Audio {
                audio_ref: audio.clone(),
            },
            index,
        );
    }
}

impl BasicState {
    pub fn begin(script: TutorialScript, device: &DeviceState, out: &mut Emitter) -> Result<Self, SessionError> {
        check_start(&script, device)?;
        announce(&script.steps[0], 0, true, out);
        Ok(Self {
            script,
            step_index: 0,
            paused: false,
        })
    }

    pub fn script(&self) -> &TutorialScript {
        &self.script
    }

    pub fn step_index(&self) -> usize {
        self.step_index
    }

    pub fn is_paused(&self) -> bool {
        self.paused
    }

    pub fn is_complete(&self) -> bool {
        self.step_index >= self.script.len()
    }

    /// The red rectangle, shown while running an unfinished tutorial.
    pub fn overlay_target(&self) -> Option<Rect> {
        if self.paused {
            return None;
        }
        self.script.steps.get(self.step_index).map(|s| s.bbox)
    }

    pub fn on_click(&mut self, device: &mut DeviceState, point: Point, out: &mut Emitter) -> BasicOutcome {
        let i = self.step_index;
        let Some(step) = self.script.steps.get(i) else {
            return BasicOutcome::Completed;
        };
        if self.paused || !step.bbox.contains(point) {
            out.outcome(Outcome::Ignored);
            out.feedback(FeedbackKind::Ignored, i);
            return BasicOutcome::Ignored;
        }
        let Ok(node) = nearest_node(device.current_screen(), point).cloned() else {
            out.outcome(Outcome::NoTarget);
            return BasicOutcome::NoTarget;
        };
        let at = node.bbox.center();
        let nav = device
            .apply_click(&node)
            .expect("nearest_node returns nodes of the current screen");
        out.outcome(Outcome::Dispatched {
            node: node.node_id,
            x: at.x,
            y: at.y,
            nav,
        });

        if nav {
            if let Some(next) = self.script.steps.get(i + 1) {
                if match_step_on_screen(next, device.current_screen()).is_none() {
                    log::info!("step {} not found on `{}`, pausing", i + 1, device.current_screen_id());
                    self.paused = true;
                    out.feedback(FeedbackKind::Inconsistency, i);
                    return BasicOutcome::Paused;
                }
            }
        }

        self.step_index += 1;
        match self.script.steps.get(self.step_index) {
            Some(next) => {
                announce(next, self.step_index, true, out);
                BasicOutcome::Advanced
            }
            None => {
                out.feedback(FeedbackKind::Completion, self.step_index);
                BasicOutcome::Completed
            }
        }
    }

    /// Re-checks the current step against the current screen. Returns whether
    /// guidance is running again.
    pub fn resume(&mut self, device: &DeviceState, out: &mut Emitter) -> Result<bool, SessionError> {
        if !self.paused {
            return Err(SessionError::IllegalPhase {
                op: "resume",
                phase: crate::session::Phase::Running,
            });
        }
        let i = self.step_index;
        let step = &self.script.steps[i];
        if match_step_on_screen(step, device.current_screen()).is_some() {
            self.paused = false;
            out.feedback(FeedbackKind::Resumed, i);
            out.feedback(FeedbackKind::Highlight { rect: step.bbox }, i);
            Ok(true)
        } else {
            out.feedback(FeedbackKind::Inconsistency, i);
            Ok(false)
        }
    }
}
