use std::fmt::Display;
use std::fs;
use std::path::Path;

use anyhow::Context;

/// Ordered `key=value` record of one run.
#[derive(Debug, Default)]
pub struct Manifest {
    entries: Vec<(String, String)>,
}

impl Manifest {
    pub fn new(subcommand: &str) -> Self {
        let mut m = Manifest::default();
        m.push("tool", "fsr3d");
        m.push("version", env!("CARGO_PKG_VERSION"));
        m.push("subcommand", subcommand);
        m
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl Display) {
        let value = value.to_string();
        debug_assert!(!value.contains('\n'));
        self.entries.push((key.into(), value));
    }

    pub fn render(&self) -> String {
        self.entries
            .iter()
            .map(|(k, v)| format!("{k}={v}\n"))
            .collect()
    }

    pub fn emit(&self, path: Option<&Path>) -> anyhow::Result<()> {
        let text = self.render();
        print!("{text}");
        if let Some(path) = path {
            fs::write(path, &text)
                .with_context(|| format!("cannot write manifest {}", path.display()))?;
        }
        Ok(())
    }
}
