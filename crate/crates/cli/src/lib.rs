//! Command implementations behind the `drumkit` binary. Each returns an
//! [`Outcome`] so they can be driven from tests as well as the command line.

pub mod commands;
pub mod config;

/// Exit status of a finished command.
pub const PASS: i32 = 0;
pub const FAIL: i32 = 1;
pub const USAGE: i32 = 2;

#[derive(Clone, Debug)]
pub struct Outcome {
    pub code: i32,
    /// Machine-readable result.
    pub report: serde_json::Value,
    /// Human-readable rendering, printed instead of the JSON when present
    /// and JSON output was not requested.
    pub text: Option<String>,
}

impl Outcome {
    pub fn usage(message: impl Into<String>) -> Self {
        Outcome { code: USAGE, report: serde_json::json!({ "error": message.into() }), text: None }
    }

    pub fn passed(&self) -> bool {
        self.code == PASS
    }
}
