//! Tutorial scripts and the step-to-node matching rule.
//!
//! A step matches a node when class name and text are equal and the IoU of the
//! recorded bbox and the node bbox is at least 1/2. Among several matches the
//! highest IoU wins, ties go to node order.

use alloc::string::String;
use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::device::{AppDefinition, Screen, UiNode};
use crate::error::ScriptError;
use crate::geometry::{Iou, Rect};

pub const SCRIPT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize), serde(deny_unknown_fields))]
pub struct TutorialStep {
    pub bbox: Rect,
    #[cfg_attr(feature = "serde", serde(rename = "package"))]
    pub package_name: String,
    #[cfg_attr(feature = "serde", serde(rename = "class"))]
    pub class_name: String,
    pub text: String,
    #[cfg_attr(feature = "serde", serde(rename = "screen"))]
    pub screen_id: String,
    // Required key; `null` when the step has no voice note.
    #[cfg_attr(feature = "serde", serde(rename = "audio", deserialize_with = "Option::deserialize"))]
    pub audio_ref: Option<String>,
}

impl TutorialStep {
    /// Descriptor of `node` as seen on `screen_id` of app `package_name`.
    pub fn from_node(node: &UiNode, package_name: &str, screen_id: &str, audio_ref: Option<String>) -> Self {
        Self {
            bbox: node.bbox,
            package_name: package_name.into(),
            class_name: node.class_name.clone(),
            text: node.text.clone(),
            screen_id: screen_id.into(),
            audio_ref,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(
    feature = "serde",
    derive(Serialize, Deserialize),
    serde(rename_all = "camelCase", deny_unknown_fields)
)]
pub struct TutorialScript {
    pub name: String,
    pub version: u32,
    pub app_id: String,
    pub steps: Vec<TutorialStep>,
}

impl TutorialScript {
    pub fn new(name: impl Into<String>, app_id: impl Into<String>, steps: Vec<TutorialStep>) -> Self {
        Self {
            name: name.into(),
            version: SCRIPT_VERSION,
            app_id: app_id.into(),
            steps,
        }
    }

    /// Structural invariants that hold without reference to an app.
    pub fn check(&self) -> Result<(), ScriptError> {
        if self.steps.is_empty() {
            return Err(ScriptError::EmptyTutorial);
        }
        if self.version != SCRIPT_VERSION {
            return Err(ScriptError::UnsupportedVersion(self.version));
        }
        for (i, step) in self.steps.iter().enumerate() {
            if !step.bbox.is_well_formed() {
                return Err(ScriptError::InvalidBbox { step: i });
            }
            if step.package_name != self.app_id {
                return Err(ScriptError::PackageMismatch {
                    step: i,
                    package: step.package_name.clone(),
                    app: self.app_id.clone(),
                });
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// IoU of the match when `node` satisfies the matching rule for `step`.
pub fn node_matches_step(step: &TutorialStep, node: &UiNode) -> Option<Iou> {
    if node.class_name != step.class_name || node.text != step.text {
        return None;
    }
    let iou = step.bbox.iou(&node.bbox);
    iou.at_least_half().then_some(iou)
}

pub fn match_step_on_screen<'a>(step: &TutorialStep, screen: &'a Screen) -> Option<&'a UiNode> {
    let mut best: Option<(&UiNode, Iou)> = None;
    for node in &screen.nodes {
        let Some(iou) = node_matches_step(step, node) else {
            continue;
        };
        match best {
            Some((_, b)) if b >= iou => {}
            _ => best = Some((node, iou)),
        }
    }
    best.map(|(n, _)| n)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepMatch {
    Matched(String),
    Missing,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchReport {
    pub steps: Vec<StepMatch>,
    pub ok: bool,
}

impl MatchReport {
    pub fn missing(&self) -> Vec<usize> {
        self.steps
            .iter()
            .enumerate()
            .filter(|(_, m)| **m == StepMatch::Missing)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Matches each step against the screen it was recorded on.
pub fn validate_script(script: &TutorialScript, app: &AppDefinition) -> Result<MatchReport, ScriptError> {
    if script.app_id != app.app_id {
        return Err(ScriptError::AppMismatch {
            script: script.app_id.clone(),
            app: app.app_id.clone(),
        });
    }
    let steps: Vec<StepMatch> = script
        .steps
        .iter()
        .map(|step| {
            app.screen(&step.screen_id)
                .and_then(|screen| match_step_on_screen(step, screen))
                .map_or(StepMatch::Missing, |n| StepMatch::Matched(n.node_id.clone()))
        })
        .collect();
    let ok = steps.iter().all(|m| matches!(m, StepMatch::Matched(_)));
    Ok(MatchReport { steps, ok })
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use crate::device::fixtures::milkapp;
    use alloc::string::ToString;
    use alloc::vec;

    pub fn milk_script() -> TutorialScript {
        let app = milkapp();
        let step = |screen: usize, node: usize, audio: Option<&str>| {
            let s = &app.screens[screen];
            TutorialStep::from_node(&s.nodes[node], &app.app_id, &s.screen_id, audio.map(|a| a.to_string()))
        };
        TutorialScript::new(
            "buy milk",
            app.app_id.clone(),
            vec![step(0, 0, Some("s1.amr")), step(1, 0, Some("s2.amr")), step(2, 0, None)],
        )
    }
}
