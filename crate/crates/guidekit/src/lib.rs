//! Std companion to `guidekit-core`: JSON file formats, the content-addressed
//! tutorial store, the share service with its HTTP API, and the CLI.

pub mod error;
pub mod formats;
pub mod http;
pub mod service;
pub mod store;

pub use error::{FormatError, StoreError};
pub use formats::{
    decode_log, decode_script, encode_log, encode_script, load_app_definition, load_keyword_table, log_inputs,
    parse_trace,
};
pub use service::{ApiError, ShareService};
pub use store::{TutorialMeta, TutorialStore};
