//! Content-addressed tutorial store.
//!
//! Layout under the root directory:
//!
//! ```text
//! tutorials/<sha256 of canonical script>/script.json
//! tutorials/<id>/meta.json
//! tutorials/<id>/assets/<relative path>
//! apps/<appId>.json
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::io::{Cursor, Read, Write};
use std::path::{Component, Path, PathBuf};
use std::sync::Mutex;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use guidekit_core::{AppDefinition, TutorialScript};

use crate::error::StoreError;
use crate::formats::{decode_script, encode_app_definition, encode_script, load_app_definition};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TutorialMeta {
    pub id: String,
    pub name: String,
    pub app_id: String,
    pub step_count: usize,
    /// Milliseconds since the Unix epoch, strictly increasing within a store.
    pub created_at: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssetInfo {
    pub path: String,
    pub size: u64,
}

pub fn content_id(canonical: &str) -> String {
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

fn check_id(id: &str) -> Result<(), StoreError> {
    if id.len() == 64 && id.bytes().all(|b| b.is_ascii_hexdigit()) {
        Ok(())
    } else {
        Err(StoreError::NotFound(format!("tutorial `{id}`")))
    }
}

fn check_app_id(app_id: &str) -> Result<(), StoreError> {
    let ok = !app_id.is_empty()
        && app_id != "."
        && app_id != ".."
        && app_id.bytes().all(|b| b.is_ascii_alphanumeric() || b"._-".contains(&b));
    if ok {
        Ok(())
    } else {
        Err(StoreError::Schema(format!(
            "app id `{app_id}` is not usable as a file name"
        )))
    }
}

/// Relative, forward-slash asset path without `.`/`..` components.
fn asset_rel_path(path: &str) -> Result<PathBuf, StoreError> {
    let bad = || StoreError::Schema(format!("invalid asset path `{path}`"));
    if path.is_empty() || path.contains('\\') {
        return Err(bad());
    }
    let p = Path::new(path);
    if !p.components().all(|c| matches!(c, Component::Normal(_))) {
        return Err(bad());
    }
    Ok(p.to_path_buf())
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), StoreError> {
    let dir = path.parent().expect("store paths have a parent");
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn now_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

#[derive(Debug)]
pub struct TutorialStore {
    root: PathBuf,
    last_created: Mutex<u64>,
}

impl TutorialStore {
    pub fn open(root: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let root = root.into();
        fs::create_dir_all(root.join("tutorials"))?;
        fs::create_dir_all(root.join("apps"))?;
        let store = Self {
            root,
            last_created: Mutex::new(0),
        };
        let newest = store.list_tutorials()?.first().map_or(0, |m| m.created_at);
        *store.last_created.lock().unwrap() = newest;
        Ok(store)
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn tutorial_dir(&self, id: &str) -> PathBuf {
        self.root.join("tutorials").join(id)
    }

    fn next_created_at(&self) -> u64 {
        let mut last = self.last_created.lock().unwrap();
        *last = now_ms().max(*last + 1);
        *last
    }

    /// Stores `script` and its assets. Re-uploading the same script returns
    /// the original metadata; new or changed assets are written either way.
    pub fn store_tutorial(
        &self,
        script: &TutorialScript,
        assets: &BTreeMap<String, Vec<u8>>,
    ) -> Result<TutorialMeta, StoreError> {
        script.check().map_err(|e| StoreError::Schema(e.to_string()))?;
        let rel_paths = assets
            .keys()
            .map(|k| asset_rel_path(k))
            .collect::<Result<Vec<_>, _>>()?;
        let canonical = encode_script(script);
        let id = content_id(&canonical);
        let dir = self.tutorial_dir(&id);

        for (rel, bytes) in rel_paths.iter().zip(assets.values()) {
            write_atomic(&dir.join("assets").join(rel), bytes)?;
        }
        if let Ok(meta) = self.meta(&id) {
            return Ok(meta);
        }
        write_atomic(&dir.join("script.json"), canonical.as_bytes())?;
        let meta = TutorialMeta {
            id,
            name: script.name.clone(),
            app_id: script.app_id.clone(),
            step_count: script.len(),
            created_at: self.next_created_at(),
        };
        let meta_json = serde_json::to_vec(&meta).expect("meta serializes");
        write_atomic(&dir.join("meta.json"), &meta_json)?;
        Ok(meta)
    }

    /// Like [`store_tutorial`](Self::store_tutorial) for script text that has
    /// not been decoded yet.
    pub fn store_tutorial_text(
        &self,
        text: &str,
        assets: &BTreeMap<String, Vec<u8>>,
    ) -> Result<TutorialMeta, StoreError> {
        let script = decode_script(text)?;
        self.store_tutorial(&script, assets)
    }

    fn meta(&self, id: &str) -> Result<TutorialMeta, StoreError> {
        check_id(id)?;
        let path = self.tutorial_dir(id).join("meta.json");
        let bytes = fs::read(&path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => StoreError::NotFound(format!("tutorial `{id}`")),
            _ => StoreError::Storage(e),
        })?;
        serde_json::from_slice(&bytes)
            .map_err(|e| StoreError::Storage(std::io::Error::new(std::io::ErrorKind::InvalidData, e)))
    }

    /// Newest first.
    pub fn list_tutorials(&self) -> Result<Vec<TutorialMeta>, StoreError> {
        let mut metas = Vec::new();
        for entry in fs::read_dir(self.root.join("tutorials"))? {
            let entry = entry?;
            let name = entry.file_name();
            let Some(id) = name.to_str() else { continue };
            match self.meta(id) {
                Ok(meta) => metas.push(meta),
                // Half-written or foreign directories are skipped.
                Err(StoreError::NotFound(_)) => continue,
                Err(e) => return Err(e),
            }
        }
        metas.sort_by(|a, b| b.created_at.cmp(&a.created_at).then_with(|| a.id.cmp(&b.id)));
        Ok(metas)
    }

    /// Canonical script text, byte-identical to what was stored, plus the asset listing.
    pub fn fetch_tutorial(&self, id: &str) -> Result<(String, Vec<AssetInfo>), StoreError> {
        self.meta(id)?;
        let text = fs::read_to_string(self.tutorial_dir(id).join("script.json"))?;
        Ok((text, self.assets(id)?))
    }

    pub fn fetch_script(&self, id: &str) -> Result<TutorialScript, StoreError> {
        let (text, _) = self.fetch_tutorial(id)?;
        Ok(decode_script(&text)?)
    }

    pub fn fetch_meta(&self, id: &str) -> Result<TutorialMeta, StoreError> {
        self.meta(id)
    }

    fn assets(&self, id: &str) -> Result<Vec<AssetInfo>, StoreError> {
        let base = self.tutorial_dir(id).join("assets");
        let mut out = Vec::new();
        if !base.is_dir() {
            return Ok(out);
        }
        let mut stack = vec![base.clone()];
        while let Some(dir) = stack.pop() {
            for entry in fs::read_dir(&dir)? {
                let entry = entry?;
                let path = entry.path();
                if entry.file_type()?.is_dir() {
                    stack.push(path);
                    continue;
                }
                let rel = path.strip_prefix(&base).expect("walk stays under base");
                let rel = rel
                    .components()
                    .map(|c| c.as_os_str().to_string_lossy().into_owned())
                    .collect::<Vec<_>>()
                    .join("/");
                out.push(AssetInfo {
                    path: rel,
                    size: entry.metadata()?.len(),
                });
            }
        }
        out.sort_by(|a, b| a.path.cmp(&b.path));
        Ok(out)
    }

    pub fn fetch_asset(&self, id: &str, path: &str) -> Result<Vec<u8>, StoreError> {
        self.meta(id)?;
        let rel = asset_rel_path(path).map_err(|_| StoreError::NotFound(format!("asset `{path}`")))?;
        fs::read(self.tutorial_dir(id).join("assets").join(rel)).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => StoreError::NotFound(format!("asset `{path}`")),
            _ => StoreError::Storage(e),
        })
    }

    /// Zip with `script.json` and `assets/...`.
    pub fn export_bundle(&self, id: &str) -> Result<Vec<u8>, StoreError> {
        let (text, assets) = self.fetch_tutorial(id)?;
        let mut zip = zip::ZipWriter::new(Cursor::new(Vec::new()));
        let options = zip::write::SimpleFileOptions::default();
        let zip_err = |e: zip::result::ZipError| StoreError::Storage(std::io::Error::other(e));
        zip.start_file("script.json", options).map_err(zip_err)?;
        zip.write_all(text.as_bytes())?;
        for asset in assets {
            let bytes = self.fetch_asset(id, &asset.path)?;
            zip.start_file(format!("assets/{}", asset.path), options)
                .map_err(zip_err)?;
            zip.write_all(&bytes)?;
        }
        Ok(zip.finish().map_err(zip_err)?.into_inner())
    }

    pub fn import_bundle(&self, bytes: &[u8]) -> Result<TutorialMeta, StoreError> {
        let bad = |e: zip::result::ZipError| StoreError::Schema(format!("bad bundle: {e}"));
        let mut archive = zip::ZipArchive::new(Cursor::new(bytes)).map_err(bad)?;
        let mut script_text = None;
        let mut assets = BTreeMap::new();
        for i in 0..archive.len() {
            let mut file = archive.by_index(i).map_err(bad)?;
            if file.is_dir() {
                continue;
            }
            let name = file.name().to_string();
            let mut buf = Vec::new();
            file.read_to_end(&mut buf)?;
            if name == "script.json" {
                let text = String::from_utf8(buf).map_err(|_| StoreError::Schema("script.json is not UTF-8".into()))?;
                script_text = Some(text);
            } else if let Some(rel) = name.strip_prefix("assets/") {
                assets.insert(rel.to_string(), buf);
            } else {
                return Err(StoreError::Schema(format!("unexpected bundle entry `{name}`")));
            }
        }
        let text = script_text.ok_or_else(|| StoreError::Schema("bundle has no script.json".into()))?;
        self.store_tutorial_text(&text, &assets)
    }

    pub fn store_app(&self, app: &AppDefinition) -> Result<(), StoreError> {
        check_app_id(&app.app_id)?;
        app.validate().map_err(|e| StoreError::Schema(e.to_string()))?;
        let path = self.root.join("apps").join(format!("{}.json", app.app_id));
        write_atomic(&path, encode_app_definition(app).as_bytes())
    }

    pub fn load_app(&self, app_id: &str) -> Result<AppDefinition, StoreError> {
        check_app_id(app_id).map_err(|_| StoreError::NotFound(format!("app `{app_id}`")))?;
        let path = self.root.join("apps").join(format!("{app_id}.json"));
        let text = fs::read_to_string(&path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => StoreError::NotFound(format!("app `{app_id}`")),
            _ => StoreError::Storage(e),
        })?;
        Ok(load_app_definition(&text)?)
    }

    pub fn list_apps(&self) -> Result<Vec<String>, StoreError> {
        let mut ids = Vec::new();
        for entry in fs::read_dir(self.root.join("apps"))? {
            let name = entry?.file_name();
            if let Some(id) = name.to_str().and_then(|n| n.strip_suffix(".json")) {
                ids.push(id.to_string());
            }
        }
        ids.sort();
        Ok(ids)
    }
}
