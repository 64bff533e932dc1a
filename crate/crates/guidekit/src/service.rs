//! Transport-independent share service: tutorial sharing plus live sessions.
//!
//! Every live session sits behind its own mutex, so concurrent requests for one
//! session are applied strictly one at a time while different sessions run in
//! parallel. Event timestamps are assigned here, in milliseconds since the
//! session was created.

use std::collections::{BTreeMap, HashMap};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Instant;

use base64::Engine as _;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use guidekit_core::{
    AppDefinition, FeedbackEvent, InputEvent, LedgerEntry, Mode, Payload, Phase, Rect, Screen, Session,
};

use crate::error::StoreError;
use crate::store::{AssetInfo, TutorialMeta, TutorialStore};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: u16,
    pub code: &'static str,
    pub message: String,
}

impl ApiError {
    pub fn bad_request(code: &'static str, message: impl Into<String>) -> Self {
        Self {
            status: 400,
            code,
            message: message.into(),
        }
    }

    pub fn not_found(message: impl Into<String>) -> Self {
        Self {
            status: 404,
            code: "not_found",
            message: message.into(),
        }
    }
}

impl From<StoreError> for ApiError {
    fn from(err: StoreError) -> Self {
        match err {
            StoreError::Schema(m) => ApiError::bad_request("schema_error", m),
            StoreError::NotFound(m) => ApiError::not_found(m),
            StoreError::Storage(e) => ApiError {
                status: 500,
                code: "storage_error",
                message: e.to_string(),
            },
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UploadRequest {
    /// Tutorial object, or its text.
    pub script: Value,
    #[serde(default)]
    pub assets: BTreeMap<String, String>,
}

#[derive(Debug, Serialize)]
pub struct TutorialResponse {
    pub meta: TutorialMeta,
    /// Stored canonical text, verbatim.
    pub script: String,
    pub assets: Vec<AssetInfo>,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct CreateSessionRequest {
    #[serde(default)]
    pub app_id: Option<String>,
    #[serde(default)]
    pub app: Option<AppDefinition>,
    pub tutorial_id: String,
    pub mode: Mode,
    /// Free-text help request from the receiver.
    #[serde(default)]
    pub request: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EventResponse {
    pub feedback: Vec<FeedbackEvent>,
    pub screen: Screen,
    pub phase: Phase,
    pub step_index: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CreateSessionResponse {
    pub session_id: String,
    #[serde(flatten)]
    pub initial: EventResponse,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SessionView {
    pub session_id: String,
    pub app_id: String,
    pub tutorial_id: String,
    pub request: Option<String>,
    pub mode: Option<Mode>,
    pub phase: Phase,
    pub step_index: usize,
    pub step_count: Option<usize>,
    pub screen: Screen,
    pub screen_width: i32,
    pub screen_height: i32,
    pub overlay: Option<Rect>,
    pub ledger: Option<Vec<LedgerEntry>>,
    /// Every prompt the session produced, oldest first.
    pub feedback: Vec<FeedbackEvent>,
}

struct LiveSession {
    session: Session,
    tutorial_id: String,
    request: Option<String>,
    started: Instant,
    feedback: Vec<FeedbackEvent>,
}

impl LiveSession {
    fn dispatch(&mut self, payload: Payload) -> Result<Vec<FeedbackEvent>, ApiError> {
        let t = self.started.elapsed().as_millis() as u64;
        let feedback = self
            .session
            .dispatch_event(InputEvent::new(t, payload))
            .map_err(|e| ApiError {
                status: 500,
                code: "internal",
                message: e.to_string(),
            })?;
        self.feedback.extend(feedback.iter().cloned());
        Ok(feedback)
    }

    fn response(&self, feedback: Vec<FeedbackEvent>) -> EventResponse {
        EventResponse {
            feedback,
            screen: self.session.device().current_screen().clone(),
            phase: self.session.phase(),
            step_index: self.session.step_index(),
        }
    }

    fn view(&self) -> SessionView {
        let s = &self.session;
        SessionView {
            session_id: s.id().to_string(),
            app_id: s.device().app().app_id.clone(),
            tutorial_id: self.tutorial_id.clone(),
            request: self.request.clone(),
            mode: s.mode(),
            phase: s.phase(),
            step_index: s.step_index(),
            step_count: s.step_count(),
            screen: s.device().current_screen().clone(),
            screen_width: s.device().app().screen_width,
            screen_height: s.device().app().screen_height,
            overlay: s.overlay_target(),
            ledger: s.trial().map(|t| t.ledger().to_vec()),
            feedback: self.feedback.clone(),
        }
    }
}

pub struct ShareService {
    store: TutorialStore,
    sessions: Mutex<HashMap<String, Arc<Mutex<LiveSession>>>>,
    next_session: AtomicU64,
}

impl ShareService {
    pub fn new(store: TutorialStore) -> Self {
        Self {
            store,
            sessions: Mutex::new(HashMap::new()),
            next_session: AtomicU64::new(1),
        }
    }

    pub fn store(&self) -> &TutorialStore {
        &self.store
    }

    pub fn upload_tutorial(&self, body: &[u8]) -> Result<TutorialMeta, ApiError> {
        let req: UploadRequest =
            serde_json::from_slice(body).map_err(|e| ApiError::bad_request("schema_error", e.to_string()))?;
        let text = match &req.script {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        let mut assets = BTreeMap::new();
        for (path, b64) in &req.assets {
            let bytes = base64::engine::general_purpose::STANDARD
                .decode(b64)
                .map_err(|e| ApiError::bad_request("schema_error", format!("asset `{path}`: {e}")))?;
            assets.insert(path.clone(), bytes);
        }
        Ok(self.store.store_tutorial_text(&text, &assets)?)
    }

    pub fn list_tutorials(&self) -> Result<Vec<TutorialMeta>, ApiError> {
        Ok(self.store.list_tutorials()?)
    }

    pub fn fetch_tutorial(&self, id: &str) -> Result<TutorialResponse, ApiError> {
        let meta = self.store.fetch_meta(id)?;
        let (script, assets) = self.store.fetch_tutorial(id)?;
        Ok(TutorialResponse { meta, script, assets })
    }

    pub fn upload_app(&self, body: &[u8]) -> Result<String, ApiError> {
        let text = std::str::from_utf8(body).map_err(|_| ApiError::bad_request("parse_error", "body is not UTF-8"))?;
        let app = crate::formats::load_app_definition(text)
            .map_err(|e| ApiError::bad_request("schema_error", e.to_string()))?;
        self.store.store_app(&app)?;
        Ok(app.app_id)
    }

    pub fn create_remote_session(&self, body: &[u8]) -> Result<CreateSessionResponse, ApiError> {
        let req: CreateSessionRequest =
            serde_json::from_slice(body).map_err(|e| ApiError::bad_request("schema_error", e.to_string()))?;
        let app = match (req.app, req.app_id) {
            (Some(app), _) => {
                app.validate()
                    .map_err(|e| ApiError::bad_request("validation_error", e.to_string()))?;
                app
            }
            (None, Some(app_id)) => self.store.load_app(&app_id)?,
            (None, None) => {
                return Err(ApiError::bad_request(
                    "schema_error",
                    "either `app` or `appId` is required",
                ))
            }
        };
        let script = self.store.fetch_script(&req.tutorial_id)?;
        let id = format!("s{}", self.next_session.fetch_add(1, Ordering::Relaxed));
        let session = Session::new(id.clone(), Arc::new(app), Some(script))
            .map_err(|e| ApiError::bad_request("validation_error", e.to_string()))?;
        let mut live = LiveSession {
            session,
            tutorial_id: req.tutorial_id,
            request: req.request,
            started: Instant::now(),
            feedback: Vec::new(),
        };
        // Guidance starts at t=0 the same way a headless run does.
        let feedback = live
            .session
            .dispatch_event(InputEvent::new(
                0,
                Payload::BeginGuidance {
                    mode: req.mode,
                    script: None,
                },
            ))
            .map_err(|e| ApiError {
                status: 500,
                code: "internal",
                message: e.to_string(),
            })?;
        live.feedback.extend(feedback.iter().cloned());
        let initial = live.response(feedback);
        self.sessions
            .lock()
            .unwrap()
            .insert(id.clone(), Arc::new(Mutex::new(live)));
        Ok(CreateSessionResponse {
            session_id: id,
            initial,
        })
    }

    fn live(&self, id: &str) -> Result<Arc<Mutex<LiveSession>>, ApiError> {
        self.sessions
            .lock()
            .unwrap()
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::not_found(format!("session `{id}`")))
    }

    /// Applies one input event. A `t` field in the body is ignored.
    pub fn post_remote_event(&self, id: &str, body: &[u8]) -> Result<EventResponse, ApiError> {
        let live = self.live(id)?;
        let mut value: Value =
            serde_json::from_slice(body).map_err(|e| ApiError::bad_request("parse_error", e.to_string()))?;
        if let Value::Object(map) = &mut value {
            map.remove("t");
        }
        let payload: Payload =
            serde_json::from_value(value).map_err(|e| ApiError::bad_request("schema_error", e.to_string()))?;
        let mut live = live.lock().unwrap();
        let feedback = live.dispatch(payload)?;
        Ok(live.response(feedback))
    }

    pub fn get_remote_state(&self, id: &str) -> Result<SessionView, ApiError> {
        let live = self.live(id)?;
        let live = live.lock().unwrap();
        Ok(live.view())
    }

    /// Drops a finished session.
    pub fn close_remote_session(&self, id: &str) -> Result<(), ApiError> {
        self.sessions
            .lock()
            .unwrap()
            .remove(id)
            .map(|_| ())
            .ok_or_else(|| ApiError::not_found(format!("session `{id}`")))
    }
}
