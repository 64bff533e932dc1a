use alloc::string::String;

use crate::session::Phase;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DeviceError {
    #[error("home screen `{0}` does not exist")]
    MissingHome(String),
    #[error("duplicate screen id `{0}`")]
    DuplicateScreen(String),
    #[error("duplicate node id `{node}` on screen `{screen}`")]
    DuplicateNode { screen: String, node: String },
    #[error("node `{node}` on screen `{screen}` navigates to unknown screen `{target}`")]
    DanglingGoto {
        screen: String,
        node: String,
        target: String,
    },
    #[error("node `{node}` on screen `{screen}` has a bbox outside the {width}x{height} screen or an empty bbox")]
    BboxOutOfBounds {
        screen: String,
        node: String,
        width: i32,
        height: i32,
    },
    #[error("node `{node}` on screen `{screen}` has an onClick action but is not clickable")]
    ActionOnNonClickable { screen: String, node: String },
    #[error("invalid screen size {width}x{height}")]
    InvalidScreenSize { width: i32, height: i32 },
    #[error("screen `{0}` has no clickable nodes")]
    NoClickableNodes(String),
    #[error("node `{node}` is not on the current screen `{screen}`")]
    ForeignNode { screen: String, node: String },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScriptError {
    #[error("tutorial has no steps")]
    EmptyTutorial,
    #[error("unsupported tutorial version {0}")]
    UnsupportedVersion(u32),
    #[error("step {step} has an invalid bbox")]
    InvalidBbox { step: usize },
    #[error("step {step} package `{package}` differs from the tutorial app `{app}`")]
    PackageMismatch { step: usize, package: String, app: String },
    #[error("tutorial targets app `{script}` but the app is `{app}`")]
    AppMismatch { script: String, app: String },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SessionError {
    #[error("`{op}` is not allowed while {phase}")]
    IllegalPhase { op: &'static str, phase: Phase },
    #[error("tutorial starts on `{expected}` but the device is on `{actual}`")]
    WrongStartScreen { expected: String, actual: String },
    #[error("recording name must not be empty")]
    EmptyName,
    #[error("click did not hit any clickable node")]
    NoTarget,
    #[error("no tutorial named `{0}` in this session")]
    UnknownScript(String),
    #[error("voice commands are paused while the rescue overlay is shown")]
    RescueActive,
    #[error("steps {missing:?} do not match the app")]
    ValidationFailed { missing: alloc::vec::Vec<usize> },
    #[error("event at t={t} arrived after t={last}")]
    OutOfOrder { t: u64, last: u64 },
    #[error(transparent)]
    Script(#[from] ScriptError),
    #[error(transparent)]
    Device(#[from] DeviceError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricsError {
    #[error("malformed log: {0}")]
    MalformedLog(String),
}
