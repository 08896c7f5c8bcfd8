//! Text and JSON rendering of script results.

use serde_json::{json, Map, Value as Json};

use super::run::Value;
use crate::freealg::Variety;

/// Version tag of the JSON report format.
pub const SCHEMA: &str = "tangentia/1";

/// The result of one command.
#[derive(Clone, Debug)]
pub struct Output {
    pub command: String,
    pub line: usize,
    pub text: Vec<String>,
    fields: Map<String, Json>,
    pub(crate) value: Option<Value>,
    /// Generator names overriding the script's own, for results living in
    /// another algebra.
    pub(crate) names: Option<Vec<String>>,
}

impl Output {
    pub(crate) fn new(command: &str, line: usize) -> Self {
        Output {
            command: command.to_string(),
            line,
            text: Vec::new(),
            fields: Map::new(),
            value: None,
            names: None,
        }
    }

    pub(crate) fn line(&mut self, s: impl Into<String>) {
        self.text.push(s.into());
    }

    pub(crate) fn set(&mut self, key: &str, v: Json) {
        self.fields.insert(key.to_string(), v);
    }

    pub fn field(&self, key: &str) -> Option<&Json> {
        self.fields.get(key)
    }

    pub fn json_object(&self) -> Json {
        let mut m = self.fields.clone();
        m.insert("command".into(), json!(self.command));
        m.insert("line".into(), json!(self.line));
        Json::Object(m)
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    variety: Variety,
    names: Vec<String>,
    results: Vec<Output>,
}

impl Report {
    pub(crate) fn new(variety: Variety, names: Vec<String>) -> Self {
        Report {
            variety,
            names,
            results: Vec::new(),
        }
    }

    pub(crate) fn push(&mut self, o: Output) {
        self.results.push(o);
    }

    pub fn variety(&self) -> Variety {
        self.variety
    }

    pub fn results(&self) -> &[Output] {
        &self.results
    }

    pub fn to_json(&self) -> Json {
        json!({
            "schema": SCHEMA,
            "variety": self.variety.to_string(),
            "generators": self.names,
            "results": self.results.iter().map(Output::json_object).collect::<Vec<_>>(),
        })
    }

    pub fn render_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("serializable") + "\n"
    }

    pub fn render_text(&self) -> String {
        let mut s = format!("variety {} vars {}\n", self.variety, self.names.join(", "));
        for r in &self.results {
            s.push_str(&format!("[line {}] {}\n", r.line, r.command));
            for l in &r.text {
                s.push_str("  ");
                s.push_str(l);
                s.push('\n');
            }
        }
        s
    }
}
