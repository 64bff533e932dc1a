//! Test-only helpers: fixture loading plus oracles that are written against
//! plain JSON rather than the crate's own types.
#![allow(dead_code)]

pub mod oracle;
pub mod reference;
pub mod schema;

use std::path::PathBuf;
use std::sync::Arc;

use guidekit::formats::{decode_script, load_app_definition, parse_trace};
use guidekit_core::{AppDefinition, InputEvent, TutorialScript};

pub fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel)
}

pub fn read(rel: &str) -> String {
    std::fs::read_to_string(fixture(rel)).unwrap_or_else(|e| panic!("{rel}: {e}"))
}

pub fn json(rel: &str) -> serde_json::Value {
    serde_json::from_str(&read(rel)).unwrap()
}

pub fn app(rel: &str) -> Arc<AppDefinition> {
    Arc::new(load_app_definition(&read(rel)).unwrap())
}

pub fn script(rel: &str) -> TutorialScript {
    decode_script(&read(rel)).unwrap()
}

pub fn trace(rel: &str) -> Vec<InputEvent> {
    parse_trace(&read(rel)).unwrap()
}

pub fn milk() -> (Arc<AppDefinition>, TutorialScript) {
    (app("milkapp.json"), script("milk_tutorial.json"))
}

pub fn clinic() -> (Arc<AppDefinition>, TutorialScript) {
    (app("clinicapp.json"), script("clinic_tutorial.json"))
}
