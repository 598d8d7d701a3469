use serde_json::Value;

use crate::Format;

/// Result of a command: exit code plus the report in both renderings.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub json: Value,
    pub text: String,
}

impl Outcome {
    pub fn new(code: i32, json: Value, text: String) -> Self {
        Self { code, json, text }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => hadamard_core::io::to_pretty(&self.json),
            Format::Text => {
                let mut t = self.text.clone();
                if !t.ends_with('\n') {
                    t.push('\n');
                }
                t
            }
        }
    }
}

pub(crate) fn code(ok: bool) -> i32 {
    if ok {
        0
    } else {
        1
    }
}
