//! Turns a live demonstration into a tutorial script.

use alloc::string::String;
use alloc::vec::Vec;

use crate::device::{hit_test, DeviceState};
use crate::error::{ScriptError, SessionError};
use crate::feedback::{Emitter, FeedbackKind, Outcome};
use crate::geometry::Point;
use crate::script::{TutorialScript, TutorialStep};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecordingState {
    script_name: String,
    app_id: String,
    steps: Vec<TutorialStep>,
    pending_audio: Option<String>,
}

impl RecordingState {
    pub fn begin(name: &str, app_id: &str) -> Result<Self, SessionError> {
        if name.trim().is_empty() {
            return Err(SessionError::EmptyName);
        }
        Ok(Self {
            script_name: name.into(),
            app_id: app_id.into(),
            steps: Vec::new(),
            pending_audio: None,
        })
    }

    pub fn name(&self) -> &str {
        &self.script_name
    }

    pub fn steps(&self) -> &[TutorialStep] {
        &self.steps
    }

    pub fn pending_audio(&self) -> Option<&str> {
        self.pending_audio.as_deref()
    }

    /// Attaches a voice note to the next recorded click.
    pub fn stage_audio(&mut self, audio_ref: &str) {
        if let Some(previous) = self.pending_audio.replace(audio_ref.into()) {
            log::warn!("audio `{previous}` replaced by `{audio_ref}` before any click consumed it");
        }
    }

    /// Records the node under `point` and lets the click through to the device.
    pub fn observe_click(
        &mut self,
        device: &mut DeviceState,
        point: Point,
        out: &mut Emitter,
    ) -> Result<TutorialStep, SessionError> {
        let screen = device.current_screen();
        let Some(node) = hit_test(screen, point).cloned() else {
            log::info!("recording: click at ({}, {}) hit nothing", point.x, point.y);
            out.outcome(Outcome::NoTarget);
            return Err(SessionError::NoTarget);
        };
        let step = TutorialStep::from_node(&node, &self.app_id, &screen.screen_id, self.pending_audio.take());
        self.steps.push(step.clone());
        device
            .apply_click(&node)
            .expect("hit_test returns nodes of the current screen");
        out.outcome(Outcome::Recorded { node: node.node_id });
        out.feedback(FeedbackKind::StepRecorded, self.steps.len() - 1);
        Ok(step)
    }

    /// Builds the script and empties the step list. On `EmptyTutorial` the
    /// state is left untouched so recording can continue.
    pub fn finish(&mut self) -> Result<TutorialScript, SessionError> {
        if self.steps.is_empty() {
            return Err(ScriptError::EmptyTutorial.into());
        }
        if let Some(audio) = self.pending_audio.take() {
            log::warn!("discarding audio `{audio}` staged after the last click");
        }
        Ok(TutorialScript::new(
            self.script_name.clone(),
            self.app_id.clone(),
            core::mem::take(&mut self.steps),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::device::fixtures::milkapp;
    use crate::script::validate_script;
    use alloc::sync::Arc;

    fn setup() -> (RecordingState, DeviceState, Emitter) {
        let app = milkapp();
        let rec = RecordingState::begin("buy milk", &app.app_id).unwrap();
        (rec, DeviceState::new(Arc::new(app)), Emitter::new())
    }

    #[test]
    fn empty_name_rejected() {
        assert_eq!(RecordingState::begin("", "x"), Err(SessionError::EmptyName));
        assert_eq!(RecordingState::begin("  ", "x"), Err(SessionError::EmptyName));
    }

    #[test]
    fn click_records_descriptor_and_navigates() {
        let (mut rec, mut dev, mut out) = setup();
        rec.stage_audio("s1.amr");
        let step = rec.observe_click(&mut dev, Point::new(150, 240), &mut out).unwrap();
        assert_eq!(step.class_name, "android.widget.Button");
        assert_eq!(step.text, "Order");
        assert_eq!(step.screen_id, "home");
        assert_eq!(step.audio_ref.as_deref(), Some("s1.amr"));
        assert_eq!(dev.current_screen_id(), "menu");
        assert_eq!(rec.pending_audio(), None);
    }

    #[test]
    fn double_stage_keeps_the_second_ref() {
        let (mut rec, mut dev, mut out) = setup();
        rec.stage_audio("a.amr");
        rec.stage_audio("b.amr");
        let step = rec.observe_click(&mut dev, Point::new(150, 240), &mut out).unwrap();
        assert_eq!(step.audio_ref.as_deref(), Some("b.amr"));
    }

    #[test]
    fn missed_click_records_nothing() {
        let (mut rec, mut dev, mut out) = setup();
        assert_eq!(
            rec.observe_click(&mut dev, Point::new(10, 10), &mut out),
            Err(SessionError::NoTarget)
        );
        assert!(rec.steps().is_empty());
        assert_eq!(dev.current_screen_id(), "home");
    }

    #[test]
    fn three_clicks_give_a_valid_script() {
        let (mut rec, mut dev, mut out) = setup();
        for p in [Point::new(150, 240), Point::new(200, 650), Point::new(500, 2050)] {
            rec.observe_click(&mut dev, p, &mut out).unwrap();
        }
        rec.stage_audio("dangling.amr");
        let script = rec.finish().unwrap();
        assert_eq!(script.len(), 3);
        assert_eq!(script.steps[2].screen_id, "cart");
        assert!(validate_script(&script, &milkapp()).unwrap().ok);
    }

    #[test]
    fn finishing_empty_recording_fails() {
        let (mut rec, _, _) = setup();
        assert_eq!(rec.finish(), Err(SessionError::Script(ScriptError::EmptyTutorial)));
        assert_eq!(rec.name(), "buy milk");
    }
}
