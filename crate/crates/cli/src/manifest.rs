use std::io::Write;
use std::path::Path;

use mvlab::Result;

/// Provenance header written at the top of every report.
///
/// All entries except `timestamp` are a function of the command line and
/// inputs, so two runs differ only on that line.
#[derive(Debug, Clone)]
pub struct RunManifest {
    command: String,
    seed: Option<u64>,
    config: Option<String>,
    inputs: Vec<String>,
    output: Option<String>,
    extra: Vec<(String, String)>,
    timestamp: String,
}

impl RunManifest {
    pub fn new(command: &str, seed: Option<u64>, output: Option<&Path>) -> Self {
        Self {
            command: command.to_string(),
            seed,
            config: None,
            inputs: Vec::new(),
            output: output.map(|p| p.display().to_string()),
            extra: Vec::new(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        }
    }

    pub fn with_config(mut self, path: &Path) -> Self {
        self.config = Some(path.display().to_string());
        self
    }

    pub fn with_input(mut self, path: &Path) -> Self {
        self.inputs.push(path.display().to_string());
        self
    }

    pub fn with_entry(mut self, key: &str, value: &str) -> Self {
        self.extra.push((key.to_string(), value.to_string()));
        self
    }

    pub fn entries(&self) -> Vec<(String, String)> {
        let mut e = vec![
            ("tool".to_string(), format!("mvlab {}", env!("CARGO_PKG_VERSION"))),
            ("command".to_string(), self.command.clone()),
        ];
        if let Some(c) = &self.config {
            e.push(("config".into(), c.clone()));
        }
        for i in &self.inputs {
            e.push(("input".into(), i.clone()));
        }
        if let Some(o) = &self.output {
            e.push(("output".into(), o.clone()));
        }
        if let Some(s) = self.seed {
            e.push(("seed".into(), s.to_string()));
        }
        e.extend(self.extra.iter().cloned());
        e.push(("timestamp".into(), self.timestamp.clone()));
        e
    }

    pub fn write_comments(&self, out: &mut dyn Write, prefix: &str) -> Result<()> {
        for (k, v) in self.entries() {
            writeln!(out, "{prefix}{k}: {v}")?;
        }
        Ok(())
    }
}
