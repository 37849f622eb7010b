use std::path::Path;

use pdk::{Error, ErrorClass};
use serde_json::{json, Value};

/// Anything that ends a run early.
#[derive(Debug)]
pub enum Failure {
    Core(Error),
    ConfigNotFound(String),
    /// Unreadable or malformed configuration, bad arguments.
    Config(String),
    /// Output could not be written.
    Output(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    pub fn config(msg: impl Into<String>) -> Self {
        Failure::Config(msg.into())
    }

    pub fn output(path: &Path, e: impl std::fmt::Display) -> Self {
        Failure::Output(format!("cannot write {}: {e}", path.display()))
    }

    fn class(&self) -> ErrorClass {
        match self {
            Failure::Core(e) => e.class(),
            _ => ErrorClass::Config,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self.class() {
            ErrorClass::Config => 2,
            ErrorClass::Infeasible => 3,
            ErrorClass::Numeric => 4,
        }
    }

    pub fn to_json(&self) -> Value {
        let class = match self.class() {
            ErrorClass::Config => "config",
            ErrorClass::Infeasible => "infeasible",
            ErrorClass::Numeric => "numeric",
        };
        let (tag, message) = match self {
            Failure::Core(e) => (e.tag(), e.to_string()),
            Failure::ConfigNotFound(p) => ("config_not_found", format!("config not found: {p}")),
            Failure::Config(m) => ("config", m.clone()),
            Failure::Output(m) => ("output", m.clone()),
        };
        let mut v = json!({ "error": tag, "class": class, "exit_code": self.exit_code(), "message": message });
        match self {
            Failure::Core(Error::BandGap { omega } | Error::Singular { omega }) => v["omega"] = json!(omega),
            Failure::Core(Error::Smoothness { time }) => v["time"] = json!(time),
            _ => {}
        }
        v
    }
}

pub type Outcome<T> = std::result::Result<T, Failure>;
