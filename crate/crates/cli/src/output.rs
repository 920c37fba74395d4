//! Error-to-status mapping and all-or-nothing file output.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::{EXIT_GATE, EXIT_INPUT, EXIT_IO};

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Gate(String),
    Io(String),
}

impl CliError {
    pub fn status(&self) -> u8 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Gate(_) => EXIT_GATE,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(s) | CliError::Gate(s) | CliError::Io(s) => f.write_str(s),
        }
    }
}

impl From<hexapn::Error> for CliError {
    fn from(e: hexapn::Error) -> CliError {
        match e {
            hexapn::Error::Gate(g) => CliError::Gate(g.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

/// Files produced by one run. Nothing touches the disk until `commit`, which writes
/// each file to a temporary name and renames it, with manifest.json last.
pub struct Outputs {
    dir: PathBuf,
    command: &'static str,
    field: String,
    files: Vec<(String, String)>,
    result: Value,
}

impl Outputs {
    pub fn new(dir: &Path, command: &'static str, field: &str) -> Outputs {
        Outputs {
            dir: dir.to_path_buf(),
            command,
            field: field.to_string(),
            files: Vec::new(),
            result: Value::Null,
        }
    }

    pub fn add(&mut self, name: &str, body: String) {
        self.files.push((name.to_string(), body));
    }

    pub fn set_result(&mut self, v: Value) {
        self.result = v;
    }

    pub fn commit(mut self) -> Result<(), CliError> {
        let io = |p: &Path, e: std::io::Error| {
            CliError::Io(format!("cannot write {}: {e}", p.display()))
        };
        fs::create_dir_all(&self.dir).map_err(|e| io(&self.dir, e))?;
        let manifest = json!({
            "command": self.command,
            "field": self.field,
            "tool_version": env!("CARGO_PKG_VERSION"),
            "files": self.files.iter().map(|f| f.0.clone()).collect::<Vec<_>>(),
            "result": self.result,
        });
        self.files.push((
            "manifest.json".into(),
            serde_json::to_string_pretty(&manifest).expect("json") + "\n",
        ));
        let mut staged = Vec::new();
        for (name, body) in &self.files {
            let dst = self.dir.join(name);
            let tmp = self.dir.join(format!(".{name}.tmp{}", std::process::id()));
            if let Err(e) = fs::write(&tmp, body) {
                for (t, _) in &staged {
                    let _ = fs::remove_file(t);
                }
                let _ = fs::remove_file(&tmp);
                return Err(io(&dst, e));
            }
            staged.push((tmp, dst));
        }
        for (tmp, dst) in staged {
            fs::rename(&tmp, &dst).map_err(|e| io(&dst, e))?;
        }
        Ok(())
    }
}
