//! A from-scratch interpreter for trial guidance over raw JSON fixtures. It
//! models the rules directly (stack device, ledger of booleans, one alert per
//! episode) and reports prompts as flat tokens such as `correct@1` so traces
//! can be compared with the engine's output.

use serde_json::Value;

#[derive(Debug, Clone)]
pub struct RNode {
    pub id: String,
    pub class: String,
    pub text: String,
    pub rect: [i64; 4],
    pub clickable: bool,
    pub goto: Option<String>,
}

#[derive(Debug, Clone)]
pub struct RApp {
    pub home: String,
    pub screens: Vec<(String, Vec<RNode>)>,
}

#[derive(Debug, Clone)]
pub struct RStep {
    pub rect: [i64; 4],
    pub class: String,
    pub text: String,
    pub screen: String,
    pub audio: Option<String>,
}

fn rect(v: &Value) -> [i64; 4] {
    ["left", "top", "right", "bottom"].map(|k| v[k].as_i64().unwrap())
}

fn s(v: &Value) -> String {
    v.as_str().unwrap().to_string()
}

impl RApp {
    pub fn from_json(v: &Value) -> Self {
        let screens = v["screens"]
            .as_array()
            .unwrap()
            .iter()
            .map(|sc| {
                let nodes = sc["nodes"]
                    .as_array()
                    .unwrap()
                    .iter()
                    .map(|n| RNode {
                        id: s(&n["nodeId"]),
                        class: s(&n["className"]),
                        text: s(&n["text"]),
                        rect: rect(&n["bbox"]),
                        clickable: n["clickable"].as_bool().unwrap(),
                        goto: n["onClick"].get("goto").map(s),
                    })
                    .collect();
                (s(&sc["screenId"]), nodes)
            })
            .collect();
        RApp {
            home: s(&v["homeScreenId"]),
            screens,
        }
    }

    pub fn nodes(&self, screen: &str) -> &[RNode] {
        &self.screens.iter().find(|(id, _)| id == screen).unwrap().1
    }
}

pub fn steps_from_json(v: &Value) -> Vec<RStep> {
    v["steps"]
        .as_array()
        .unwrap()
        .iter()
        .map(|st| RStep {
            rect: rect(&st["bbox"]),
            class: s(&st["class"]),
            text: s(&st["text"]),
            screen: s(&st["screen"]),
            audio: st["audio"].as_str().map(str::to_string),
        })
        .collect()
}

pub fn inside(r: [i64; 4], x: i64, y: i64) -> bool {
    r[0] <= x && x < r[2] && r[1] <= y && y < r[3]
}

fn area(r: [i64; 4]) -> i64 {
    (r[2] - r[0]) * (r[3] - r[1])
}

fn overlap(a: [i64; 4], b: [i64; 4]) -> i64 {
    let w = a[2].min(b[2]) - a[0].max(b[0]);
    let h = a[3].min(b[3]) - a[1].max(b[1]);
    if w > 0 && h > 0 {
        w * h
    } else {
        0
    }
}

/// (intersection, union) when the node passes the matching rule.
fn match_score(step: &RStep, node: &RNode) -> Option<(i64, i64)> {
    if node.class != step.class || node.text != step.text {
        return None;
    }
    let i = overlap(step.rect, node.rect);
    let u = area(step.rect) + area(node.rect) - i;
    (2 * i >= u).then_some((i, u))
}

pub fn hit(nodes: &[RNode], x: i64, y: i64) -> Option<&RNode> {
    let mut best: Option<&RNode> = None;
    for n in nodes.iter().filter(|n| n.clickable && inside(n.rect, x, y)) {
        if best.is_none_or(|b| area(n.rect) < area(b.rect)) {
            best = Some(n);
        }
    }
    best
}

pub fn best_match<'a>(step: &RStep, nodes: &'a [RNode]) -> Option<&'a RNode> {
    let mut best: Option<(&RNode, (i64, i64))> = None;
    for n in nodes {
        if let Some((i, u)) = match_score(step, n) {
            let better = match best {
                None => true,
                Some((_, (bi, bu))) => (i as i128) * (bu as i128) > (bi as i128) * (u as i128),
            };
            if better {
                best = Some((n, (i, u)));
            }
        }
    }
    best.map(|(n, _)| n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmd {
    CantFind,
    Back,
    StartOver,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RInput {
    Click(i64, i64),
    Say(Cmd),
}

#[derive(Debug, Clone)]
pub struct RefTrial<'a> {
    app: &'a RApp,
    steps: &'a [RStep],
    pub stack: Vec<String>,
    pub active: bool,
    pub step: usize,
    /// `true` marks a navigating correct click.
    pub ledger: Vec<bool>,
    alerted: bool,
    rescue: bool,
    pub prompts: Vec<String>,
    /// Deviation episodes begun so far: a wrong click while on track.
    pub episodes: usize,
    on_track: bool,
}

impl<'a> RefTrial<'a> {
    pub fn start(app: &'a RApp, steps: &'a [RStep]) -> Self {
        let mut me = RefTrial {
            app,
            steps,
            stack: vec![app.home.clone()],
            active: true,
            step: 0,
            ledger: Vec::new(),
            alerted: false,
            rescue: false,
            prompts: Vec::new(),
            episodes: 0,
            on_track: true,
        };
        me.audio();
        me
    }

    fn say(&mut self, what: &str, step: usize) {
        self.prompts.push(format!("{what}@{step}"));
    }

    fn audio(&mut self) {
        if let Some(a) = &self.steps[self.step].audio {
            let t = format!("audio:{a}");
            self.say(&t, self.step);
        }
    }

    fn screen(&self) -> &str {
        self.stack.last().unwrap()
    }

    fn follow(&mut self, node: &RNode) -> bool {
        match &node.goto {
            Some(t) => {
                self.stack.push(t.clone());
                true
            }
            None => false,
        }
    }

    pub fn apply(&mut self, input: RInput) {
        if !self.active {
            // Guidance is over: clicks drive the device, speech does nothing.
            if let RInput::Click(x, y) = input {
                if let Some(n) = hit(self.app.nodes(self.screen()), x, y).cloned() {
                    self.follow(&n);
                }
            }
            return;
        }
        match input {
            RInput::Click(x, y) => self.click(x, y),
            RInput::Say(c) => self.command(c),
        }
    }

    fn click(&mut self, x: i64, y: i64) {
        let step = &self.steps[self.step];
        if self.rescue {
            if !inside(step.rect, x, y) {
                self.say("ignored", self.step);
                return;
            }
            if let Some(n) = best_match(step, self.app.nodes(self.screen())).cloned() {
                self.rescue = false;
                return self.correct(&n);
            }
        }
        let Some(n) = hit(self.app.nodes(self.screen()), x, y).cloned() else {
            return;
        };
        if match_score(step, &n).is_some() {
            self.rescue = false;
            self.correct(&n);
        } else {
            self.wrong(&n);
        }
    }

    fn correct(&mut self, n: &RNode) {
        let nav = self.follow(n);
        self.say("correct", self.step);
        if nav {
            while self.ledger.last() == Some(&false) {
                self.ledger.pop();
            }
            self.ledger.push(true);
        } else {
            self.ledger.push(false);
        }
        self.step += 1;
        self.alerted = false;
        self.on_track = true;
        if self.step < self.steps.len() {
            self.audio();
        } else {
            self.say("completion", self.step);
            self.active = false;
            self.step = 0;
            self.ledger.clear();
            self.rescue = false;
        }
    }

    fn wrong(&mut self, n: &RNode) {
        let nav = self.follow(n);
        if self.on_track {
            self.episodes += 1;
            self.on_track = false;
        }
        if !self.alerted {
            self.alerted = true;
            self.say("wrong", self.step);
        }
        if nav {
            self.ledger.push(false);
        }
    }

    fn command(&mut self, c: Cmd) {
        if self.rescue {
            self.say("rejected", self.step);
            return;
        }
        match c {
            Cmd::CantFind => {
                self.rescue = true;
                let [l, t, r, b] = self.steps[self.step].rect;
                self.say(&format!("highlight:{l},{t},{r},{b}"), self.step);
                self.audio();
            }
            Cmd::Back => {
                if self.stack.len() > 1 {
                    self.stack.pop();
                    if self.ledger.pop() == Some(true) && self.step > 0 {
                        self.step -= 1;
                    }
                } else {
                    self.say("at_home", self.step);
                }
                if self.screen() == self.steps[self.step].screen {
                    self.alerted = false;
                    self.on_track = true;
                    self.say("right_page", self.step);
                }
            }
            Cmd::StartOver => {
                self.stack = vec![self.app.home.clone()];
                self.step = 0;
                self.ledger.clear();
                self.alerted = false;
                self.on_track = true;
                self.rescue = false;
                self.say("start_over", 0);
            }
        }
    }
}

/// The engine's feedback rendered in the reference's token vocabulary.
pub fn token(ev: &guidekit_core::FeedbackEvent) -> String {
    use guidekit_core::FeedbackKind as K;
    let what = match &ev.kind {
        K::Highlight { rect } => format!("highlight:{},{},{},{}", rect.left, rect.top, rect.right, rect.bottom),
        K::Audio { audio_ref } => format!("audio:{audio_ref}"),
        K::Correct => "correct".into(),
        K::Wrong => "wrong".into(),
        K::RightPage => "right_page".into(),
        K::AtHome => "at_home".into(),
        K::StartOver => "start_over".into(),
        K::Completion => "completion".into(),
        K::Ignored => "ignored".into(),
        K::Rejected { .. } => "rejected".into(),
        other => format!("{other:?}"),
    };
    format!("{what}@{}", ev.step)
}
