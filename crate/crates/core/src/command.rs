//! Keyword layer over utterance transcripts.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize), serde(rename_all = "snake_case"))]
pub enum CommandKind {
    CantFind,
    Back,
    StartOver,
}

impl CommandKind {
    pub const ALL: [CommandKind; 3] = [CommandKind::CantFind, CommandKind::Back, CommandKind::StartOver];

    pub fn as_str(self) -> &'static str {
        match self {
            CommandKind::CantFind => "cant_find",
            CommandKind::Back => "back",
            CommandKind::StartOver => "start_over",
        }
    }
}

/// Phrases per command. Loadable as `{"cant_find":[..],"back":[..],"start_over":[..]}`;
/// a command left out keeps its default phrases.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(
    feature = "serde",
    derive(Serialize, Deserialize),
    serde(default, deny_unknown_fields)
)]
pub struct KeywordTable {
    pub cant_find: Vec<String>,
    pub back: Vec<String>,
    pub start_over: Vec<String>,
}

impl Default for KeywordTable {
    fn default() -> Self {
        Self {
            cant_find: vec!["can't find it".to_string()],
            back: vec!["back".to_string()],
            start_over: vec!["start over".to_string()],
        }
    }
}

impl KeywordTable {
    pub fn phrases(&self, kind: CommandKind) -> &[String] {
        match kind {
            CommandKind::CantFind => &self.cant_find,
            CommandKind::Back => &self.back,
            CommandKind::StartOver => &self.start_over,
        }
    }
}

/// Lowercase, drop apostrophes, collapse whitespace runs to one space and trim.
pub fn normalize(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut pending_space = false;
    for c in text.chars() {
        if matches!(c, '\'' | '\u{2019}' | '\u{2018}' | '`') {
            continue;
        }
        if c.is_whitespace() {
            pending_space = !out.is_empty();
            continue;
        }
        if pending_space {
            out.push(' ');
            pending_space = false;
        }
        out.extend(c.to_lowercase());
    }
    out
}

/// The command whose phrase occurs earliest in the utterance; at equal start
/// the longer phrase wins, then table order.
pub fn parse_command(utterance: &str, table: &KeywordTable) -> Option<CommandKind> {
    let haystack = normalize(utterance);
    let mut best: Option<(usize, usize, CommandKind)> = None;
    for kind in CommandKind::ALL {
        for phrase in table.phrases(kind) {
            let needle = normalize(phrase);
            if needle.is_empty() {
                continue;
            }
            let Some(pos) = haystack.find(&needle) else { continue };
            let better = match best {
                None => true,
                Some((bp, bl, _)) => pos < bp || (pos == bp && needle.len() > bl),
            };
            if better {
                best = Some((pos, needle.len(), kind));
            }
        }
    }
    best.map(|(_, _, kind)| kind)
}
