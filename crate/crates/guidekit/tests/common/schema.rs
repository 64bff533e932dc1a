//! Structural checker for the tutorial file format, walking raw JSON.

use serde_json::Value;

fn exact_keys(v: &Value, keys: &[&str], at: &str) -> Result<(), String> {
    let obj = v.as_object().ok_or(format!("{at}: not an object"))?;
    for k in obj.keys() {
        if !keys.contains(&k.as_str()) {
            return Err(format!("{at}: unexpected key `{k}`"));
        }
    }
    for k in keys {
        if !obj.contains_key(*k) {
            return Err(format!("{at}: missing key `{k}`"));
        }
    }
    Ok(())
}

fn int32(v: &Value, at: &str) -> Result<i64, String> {
    v.as_i64()
        .filter(|n| i32::try_from(*n).is_ok())
        .ok_or(format!("{at}: not a 32-bit integer"))
}

fn string(v: &Value, at: &str) -> Result<(), String> {
    v.as_str().map(|_| ()).ok_or(format!("{at}: not a string"))
}

pub fn check_script(v: &Value) -> Result<(), String> {
    exact_keys(v, &["name", "version", "appId", "steps"], "$")?;
    string(&v["name"], "$.name")?;
    string(&v["appId"], "$.appId")?;
    if v["version"].as_u64() != Some(1) {
        return Err("$.version: must be 1".into());
    }
    let steps = v["steps"].as_array().ok_or("$.steps: not an array")?;
    if steps.is_empty() {
        return Err("$.steps: empty".into());
    }
    for (i, st) in steps.iter().enumerate() {
        let at = format!("$.steps[{i}]");
        exact_keys(st, &["bbox", "package", "class", "text", "screen", "audio"], &at)?;
        for k in ["package", "class", "text", "screen"] {
            string(&st[k], &format!("{at}.{k}"))?;
        }
        if st["package"] != v["appId"] {
            return Err(format!("{at}.package: differs from appId"));
        }
        if !(st["audio"].is_null() || st["audio"].is_string()) {
            return Err(format!("{at}.audio: not a string or null"));
        }
        let b = &st["bbox"];
        exact_keys(b, &["left", "top", "right", "bottom"], &format!("{at}.bbox"))?;
        let n = |k: &str| int32(&b[k], &format!("{at}.bbox.{k}"));
        let (l, t, r, bo) = (n("left")?, n("top")?, n("right")?, n("bottom")?);
        if l < 0 || t < 0 || l >= r || t >= bo {
            return Err(format!("{at}.bbox: empty rectangle"));
        }
    }
    Ok(())
}
