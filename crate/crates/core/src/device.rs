//! Deterministic stand-in for the phone and its accessibility layer.
//!
//! An [`AppDefinition`] is a set of screens, each an ordered (pre-order) list of
//! [`UiNode`]s. That order is the tie-break order for every lookup in the crate.
//! [`DeviceState`] keeps a stack of screen ids whose bottom is always the home
//! screen; clicks push, back pops, home resets.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::error::DeviceError;
use crate::geometry::{Point, Rect};

pub const DEFAULT_SCREEN_WIDTH: i32 = 1080;
pub const DEFAULT_SCREEN_HEIGHT: i32 = 2280;

/// What happens when a node is clicked.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum NavAction {
    Goto(String),
    Stay,
    #[default]
    None,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(
    feature = "serde",
    derive(Serialize, Deserialize),
    serde(rename_all = "camelCase", deny_unknown_fields)
)]
pub struct UiNode {
    pub node_id: String,
    pub class_name: String,
    pub text: String,
    pub bbox: Rect,
    pub clickable: bool,
    #[cfg_attr(feature = "serde", serde(with = "on_click_repr", default))]
    pub on_click: NavAction,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(
    feature = "serde",
    derive(Serialize, Deserialize),
    serde(rename_all = "camelCase", deny_unknown_fields)
)]
pub struct Screen {
    pub screen_id: String,
    pub nodes: Vec<UiNode>,
}

impl Screen {
    pub fn node(&self, node_id: &str) -> Option<&UiNode> {
        self.nodes.iter().find(|n| n.node_id == node_id)
    }

    pub fn clickable_nodes(&self) -> impl Iterator<Item = &UiNode> {
        self.nodes.iter().filter(|n| n.clickable)
    }
}

#[cfg(feature = "serde")]
fn default_width() -> i32 {
    DEFAULT_SCREEN_WIDTH
}

#[cfg(feature = "serde")]
fn default_height() -> i32 {
    DEFAULT_SCREEN_HEIGHT
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(
    feature = "serde",
    derive(Serialize, Deserialize),
    serde(rename_all = "camelCase", deny_unknown_fields)
)]
pub struct AppDefinition {
    pub app_id: String,
    #[cfg_attr(feature = "serde", serde(default = "default_width"))]
    pub screen_width: i32,
    #[cfg_attr(feature = "serde", serde(default = "default_height"))]
    pub screen_height: i32,
    pub home_screen_id: String,
    pub screens: Vec<Screen>,
}

impl AppDefinition {
    pub fn screen(&self, screen_id: &str) -> Option<&Screen> {
        self.screens.iter().find(|s| s.screen_id == screen_id)
    }

    /// Checks every structural invariant; the error names the first offender.
    pub fn validate(&self) -> Result<(), DeviceError> {
        if self.screen_width <= 0 || self.screen_height <= 0 {
            return Err(DeviceError::InvalidScreenSize {
                width: self.screen_width,
                height: self.screen_height,
            });
        }
        let mut screen_ids = BTreeSet::new();
        for screen in &self.screens {
            if !screen_ids.insert(screen.screen_id.as_str()) {
                return Err(DeviceError::DuplicateScreen(screen.screen_id.clone()));
            }
        }
        if !screen_ids.contains(self.home_screen_id.as_str()) {
            return Err(DeviceError::MissingHome(self.home_screen_id.clone()));
        }
        for screen in &self.screens {
            let mut node_ids = BTreeSet::new();
            for node in &screen.nodes {
                if !node_ids.insert(node.node_id.as_str()) {
                    return Err(DeviceError::DuplicateNode {
                        screen: screen.screen_id.clone(),
                        node: node.node_id.clone(),
                    });
                }
                if !node.bbox.fits_within(self.screen_width, self.screen_height) {
                    return Err(DeviceError::BboxOutOfBounds {
                        screen: screen.screen_id.clone(),
                        node: node.node_id.clone(),
                        width: self.screen_width,
                        height: self.screen_height,
                    });
                }
                if node.on_click != NavAction::None && !node.clickable {
                    return Err(DeviceError::ActionOnNonClickable {
                        screen: screen.screen_id.clone(),
                        node: node.node_id.clone(),
                    });
                }
                if let NavAction::Goto(target) = &node.on_click {
                    if !screen_ids.contains(target.as_str()) {
                        return Err(DeviceError::DanglingGoto {
                            screen: screen.screen_id.clone(),
                            node: node.node_id.clone(),
                            target: target.clone(),
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

/// The clickable node under `point`: smallest area wins, then earliest node order.
pub fn hit_test(screen: &Screen, point: Point) -> Option<&UiNode> {
    let mut best: Option<&UiNode> = None;
    for node in screen.clickable_nodes().filter(|n| n.bbox.contains(point)) {
        match best {
            Some(b) if b.bbox.area() <= node.bbox.area() => {}
            _ => best = Some(node),
        }
    }
    best
}

/// The clickable node whose bbox center is closest to `point` (Euclidean),
/// ties broken by node order. This is the click calibration step.
pub fn nearest_node(screen: &Screen, point: Point) -> Result<&UiNode, DeviceError> {
    let mut best: Option<(&UiNode, i64)> = None;
    for node in screen.clickable_nodes() {
        let d = node.bbox.center_distance_sq_x4(point);
        match best {
            Some((_, bd)) if bd <= d => {}
            _ => best = Some((node, d)),
        }
    }
    best.map(|(n, _)| n)
        .ok_or_else(|| DeviceError::NoClickableNodes(screen.screen_id.clone()))
}

/// Device with a navigation stack. Cloning is cheap: the app is shared.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeviceState {
    app: Arc<AppDefinition>,
    stack: Vec<String>,
}

impl DeviceState {
    /// Boots on the home screen. The app must already be validated.
    pub fn new(app: Arc<AppDefinition>) -> Self {
        let home = app.home_screen_id.clone();
        Self { app, stack: vec![home] }
    }

    pub fn app(&self) -> &AppDefinition {
        &self.app
    }

    pub fn shared_app(&self) -> Arc<AppDefinition> {
        Arc::clone(&self.app)
    }

    pub fn stack(&self) -> &[String] {
        &self.stack
    }

    pub fn depth(&self) -> usize {
        self.stack.len()
    }

    pub fn current_screen_id(&self) -> &str {
        self.stack
            .last()
            .map(String::as_str)
            .unwrap_or(&self.app.home_screen_id)
    }

    pub fn current_screen(&self) -> &Screen {
        // Validated apps always resolve every id on the stack.
        self.app
            .screen(self.current_screen_id())
            .expect("screen stack refers to a screen of the app")
    }

    /// Clicks `node`, which must be on the current screen. Returns whether the
    /// window changed.
    pub fn apply_click(&mut self, node: &UiNode) -> Result<bool, DeviceError> {
        let screen = self.current_screen();
        if screen.node(&node.node_id) != Some(node) {
            return Err(DeviceError::ForeignNode {
                screen: screen.screen_id.clone(),
                node: node.node_id.clone(),
            });
        }
        match &node.on_click {
            NavAction::Goto(target) => {
                self.stack.push(target.clone());
                Ok(true)
            }
            NavAction::Stay | NavAction::None => Ok(false),
        }
    }

    /// Clicks whatever is under `point`. `None` when nothing clickable is there.
    pub fn click_at(&mut self, point: Point) -> Option<(UiNode, bool)> {
        let node = hit_test(self.current_screen(), point)?.clone();
        let nav = self.apply_click(&node).ok()?;
        Some((node, nav))
    }

    pub fn navigate_back(&mut self) -> bool {
        if self.stack.len() > 1 {
            self.stack.pop();
            true
        } else {
            false
        }
    }

    pub fn navigate_home(&mut self) {
        self.stack.truncate(1);
        if self.stack[0] != self.app.home_screen_id {
            self.stack[0] = self.app.home_screen_id.clone();
        }
    }
}

#[cfg(feature = "serde")]
mod on_click_repr {
    use super::NavAction;
    use alloc::string::String;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    enum Repr {
        #[serde(rename = "goto")]
        Goto(String),
        #[serde(rename = "stay")]
        Stay(bool),
    }

    pub fn serialize<S: Serializer>(action: &NavAction, s: S) -> Result<S::Ok, S::Error> {
        match action {
            NavAction::Goto(t) => Some(Repr::Goto(t.clone())).serialize(s),
            NavAction::Stay => Some(Repr::Stay(true)).serialize(s),
            NavAction::None => None::<Repr>.serialize(s),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<NavAction, D::Error> {
        match Option::<Repr>::deserialize(d)? {
            None => Ok(NavAction::None),
            Some(Repr::Goto(t)) => Ok(NavAction::Goto(t)),
            Some(Repr::Stay(true)) => Ok(NavAction::Stay),
            Some(Repr::Stay(false)) => Err(D::Error::custom("`stay` must be true")),
        }
    }
}
