use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Serialize;
use tempfile::NamedTempFile;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    Json,
    Csv,
    #[default]
    Both,
}

impl Format {
    pub fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }

    pub fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }
}

/// Output directory; every file is written to a temporary sibling first
/// and renamed into place.
pub struct Sink {
    dir: PathBuf,
    pub format: Format,
    written: Vec<PathBuf>,
}

impl Sink {
    pub fn new(dir: PathBuf, format: Format) -> Result<Self, String> {
        fs::create_dir_all(&dir).map_err(|e| format!("{}: cannot create output directory: {e}", dir.display()))?;
        Ok(Sink {
            dir,
            format,
            written: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<(), String> {
        let target = self.dir.join(name);
        atomic_write(&target, contents.as_bytes())?;
        self.written.push(target);
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), String> {
        if self.format.json() {
            let mut text = serde_json::to_string_pretty(value).map_err(|e| e.to_string())?;
            text.push('\n');
            self.write(name, &text)?;
        }
        Ok(())
    }

    pub fn csv(&mut self, name: &str, text: &str) -> Result<(), String> {
        if self.format.csv() {
            self.write(name, text)?;
        }
        Ok(())
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }
}

pub fn atomic_write(target: &Path, bytes: &[u8]) -> Result<(), String> {
    let dir = target.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let fail = |e: std::io::Error| format!("{}: {e}", target.display());
    let mut tmp = NamedTempFile::new_in(dir).map_err(fail)?;
    tmp.write_all(bytes).map_err(fail)?;
    tmp.as_file().sync_all().map_err(fail)?;
    tmp.persist(target).map_err(|e| fail(e.error))?;
    Ok(())
}
