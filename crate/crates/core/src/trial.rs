//! Trial-and-error mode.
//!
//! Every click goes through to the device. Clicks on the expected node are
//! praised; the first wrong click of a deviation episode is flagged and the
//! rest are silent. A navigation ledger (stack of [`LedgerEntry`]) decides
//! whether a "back" command also rewinds tutorial progress.

use alloc::string::String;
use alloc::vec::Vec;

use crate::basic::{announce, check_start};
use crate::command::CommandKind;
use crate::device::{hit_test, DeviceState, UiNode};
use crate::error::SessionError;
use crate::feedback::{Emitter, FeedbackKind, Outcome};
use crate::geometry::{Point, Rect};
use crate::script::{match_step_on_screen, node_matches_step, TutorialScript};

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize), serde(rename_all = "snake_case"))]
pub enum LedgerEntry {
    /// A correct click that changed the window.
    NavCorrect,
    /// Any other click that left something for "back" to undo.
    NonNav,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClickKind {
    Correct,
    Wrong,
}

fn push_click(ledger: &mut Vec<LedgerEntry>, kind: ClickKind, nav: bool) {
    match (kind, nav) {
        (ClickKind::Correct, true) => {
            while ledger.last() == Some(&LedgerEntry::NonNav) {
                ledger.pop();
            }
            ledger.push(LedgerEntry::NavCorrect);
        }
        (ClickKind::Correct, false) | (ClickKind::Wrong, true) => ledger.push(LedgerEntry::NonNav),
        (ClickKind::Wrong, false) => {}
    }
}

/// Ledger after a click of `kind` that did (`nav`) or did not change the window.
pub fn ledger_apply(ledger: &[LedgerEntry], kind: ClickKind, nav: bool) -> Vec<LedgerEntry> {
    let mut next = ledger.to_vec();
    push_click(&mut next, kind, nav);
    next
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrialOutcome {
    Ignored,
    NoTarget,
    Correct,
    Wrong,
    Completed,
    Command(CommandKind),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialState {
    script: TutorialScript,
    step_index: usize,
    ledger: Vec<LedgerEntry>,
    deviation_alerted: bool,
    rescue_overlay: bool,
    last_correct_window: String,
}

impl TrialState {
    pub fn begin(script: TutorialScript, device: &DeviceState, out: &mut Emitter) -> Result<Self, SessionError> {
        check_start(&script, device)?;
        announce(&script.steps[0], 0, false, out);
        Ok(Self {
            script,
            step_index: 0,
            ledger: Vec::new(),
            deviation_alerted: false,
            rescue_overlay: false,
            last_correct_window: device.app().home_screen_id.clone(),
        })
    }

    pub fn script(&self) -> &TutorialScript {
        &self.script
    }

    pub fn step_index(&self) -> usize {
        self.step_index
    }

    pub fn ledger(&self) -> &[LedgerEntry] {
        &self.ledger
    }

    pub fn deviation_alerted(&self) -> bool {
        self.deviation_alerted
    }

    pub fn rescue_overlay(&self) -> bool {
        self.rescue_overlay
    }

    pub fn last_correct_window(&self) -> &str {
        &self.last_correct_window
    }

    pub fn is_complete(&self) -> bool {
        self.step_index >= self.script.len()
    }

    pub fn overlay_target(&self) -> Option<Rect> {
        if self.rescue_overlay {
            self.script.steps.get(self.step_index).map(|s| s.bbox)
        } else {
            None
        }
    }

    pub fn on_click(&mut self, device: &mut DeviceState, point: Point, out: &mut Emitter) -> TrialOutcome {
        let i = self.step_index;
        let Some(step) = self.script.steps.get(i) else {
            return TrialOutcome::Completed;
        };
        if self.rescue_overlay {
            if !step.bbox.contains(point) {
                out.outcome(Outcome::Ignored);
                out.feedback(FeedbackKind::Ignored, i);
                return TrialOutcome::Ignored;
            }
            if let Some(node) = match_step_on_screen(step, device.current_screen()).cloned() {
                self.rescue_overlay = false;
                return self.correct_click(device, node, out);
            }
            // Expected node is not on this page; classify the click as usual
            // and keep the overlay up.
        }
        let Some(node) = hit_test(device.current_screen(), point).cloned() else {
            log::info!("trial: click at ({}, {}) hit nothing", point.x, point.y);
            out.outcome(Outcome::NoTarget);
            return TrialOutcome::NoTarget;
        };
        if node_matches_step(step, &node).is_some() {
            self.rescue_overlay = false;
            self.correct_click(device, node, out)
        } else {
            self.wrong_click(device, node, out)
        }
    }

    fn correct_click(&mut self, device: &mut DeviceState, node: UiNode, out: &mut Emitter) -> TrialOutcome {
        let i = self.step_index;
        let nav = device.apply_click(&node).expect("node taken from the current screen");
        out.outcome(Outcome::Correct {
            node: node.node_id,
            nav,
        });
        out.feedback(FeedbackKind::Correct, i);
        push_click(&mut self.ledger, ClickKind::Correct, nav);
        if nav {
            self.last_correct_window = device.current_screen_id().into();
        }
        self.step_index += 1;
        self.deviation_alerted = false;
        match self.script.steps.get(self.step_index) {
            Some(next) => {
                announce(next, self.step_index, false, out);
                TrialOutcome::Correct
            }
            None => {
                out.feedback(FeedbackKind::Completion, self.step_index);
                TrialOutcome::Completed
            }
        }
    }

    fn wrong_click(&mut self, device: &mut DeviceState, node: UiNode, out: &mut Emitter) -> TrialOutcome {
        let nav = device.apply_click(&node).expect("node taken from the current screen");
        out.outcome(Outcome::Wrong {
            node: node.node_id,
            nav,
        });
        if !self.deviation_alerted {
            self.deviation_alerted = true;
            out.feedback(FeedbackKind::Wrong, self.step_index);
        }
        push_click(&mut self.ledger, ClickKind::Wrong, nav);
        TrialOutcome::Wrong
    }

    pub fn on_command(
        &mut self,
        device: &mut DeviceState,
        command: CommandKind,
        out: &mut Emitter,
    ) -> Result<TrialOutcome, SessionError> {
        if self.rescue_overlay {
            log::info!(
                "trial: `{}` ignored while the rescue overlay is shown",
                command.as_str()
            );
            return Err(SessionError::RescueActive);
        }
        out.outcome(Outcome::Command { command });
        match command {
            CommandKind::CantFind => {
                self.rescue_overlay = true;
                announce(&self.script.steps[self.step_index], self.step_index, true, out);
            }
            CommandKind::Back => {
                if device.navigate_back() {
                    if self.ledger.pop() == Some(LedgerEntry::NavCorrect) {
                        self.step_index = self.step_index.saturating_sub(1);
                    }
                } else {
                    out.feedback(FeedbackKind::AtHome, self.step_index);
                }
                if device.current_screen_id() == self.script.steps[self.step_index].screen_id {
                    self.deviation_alerted = false;
                    out.feedback(FeedbackKind::RightPage, self.step_index);
                }
            }
            CommandKind::StartOver => {
                device.navigate_home();
                self.step_index = 0;
                self.ledger.clear();
                self.deviation_alerted = false;
                self.rescue_overlay = false;
                self.last_correct_window = device.app().home_screen_id.clone();
                out.feedback(FeedbackKind::StartOver, 0);
            }
        }
        Ok(TrialOutcome::Command(command))
    }
}
