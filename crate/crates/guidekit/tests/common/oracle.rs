//! Hand-written canonical serializer for tutorial scripts. Key order and
//! string escaping follow the documented wire format; it shares no code with
//! the crate's encoder.

use std::fmt::Write;

#[derive(Debug, Clone, PartialEq)]
pub struct OStep {
    pub bbox: [i64; 4],
    pub package: String,
    pub class: String,
    pub text: String,
    pub screen: String,
    pub audio: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OScript {
    pub name: String,
    pub version: u32,
    pub app_id: String,
    pub steps: Vec<OStep>,
}

pub fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            '\u{8}' => out.push_str("\\b"),
            '\u{c}' => out.push_str("\\f"),
            c if (c as u32) < 0x20 => write!(out, "\\u{:04x}", c as u32).unwrap(),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

pub fn encode(s: &OScript) -> String {
    let mut out = String::new();
    write!(
        out,
        "{{\"name\":{},\"version\":{},\"appId\":{},\"steps\":[",
        quote(&s.name),
        s.version,
        quote(&s.app_id)
    )
    .unwrap();
    for (i, st) in s.steps.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let [l, t, r, b] = st.bbox;
        write!(
            out,
            "{{\"bbox\":{{\"left\":{l},\"top\":{t},\"right\":{r},\"bottom\":{b}}},\"package\":{},\"class\":{},\"text\":{},\"screen\":{},\"audio\":{}}}",
            quote(&st.package),
            quote(&st.class),
            quote(&st.text),
            quote(&st.screen),
            st.audio.as_deref().map(quote).unwrap_or_else(|| "null".into())
        )
        .unwrap();
    }
    out.push_str("]}");
    out
}

pub fn from_core(s: &guidekit_core::TutorialScript) -> OScript {
    OScript {
        name: s.name.clone(),
        version: s.version,
        app_id: s.app_id.clone(),
        steps: s
            .steps
            .iter()
            .map(|st| OStep {
                bbox: [st.bbox.left, st.bbox.top, st.bbox.right, st.bbox.bottom].map(i64::from),
                package: st.package_name.clone(),
                class: st.class_name.clone(),
                text: st.text.clone(),
                screen: st.screen_id.clone(),
                audio: st.audio_ref.clone(),
            })
            .collect(),
    }
}
