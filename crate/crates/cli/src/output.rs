//! Artifact directories and their manifests.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use ompath::io::SCHEMA_VERSION;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::failure::Failure;

/// Collects the files written for one command and writes `manifest.json` last.
pub struct Artifacts {
    dir: PathBuf,
    files: Vec<String>,
    started: Instant,
    seeds: Vec<u64>,
    tolerances: Map<String, Value>,
    notes: Vec<String>,
}

impl Artifacts {
    pub fn create(dir: &Path) -> Result<Self, Failure> {
        fs::create_dir_all(dir)
            .map_err(|e| Failure::config(format!("cannot create output directory {}: {e}", dir.display())))?;
        Ok(Artifacts {
            dir: dir.to_path_buf(),
            files: Vec::new(),
            started: Instant::now(),
            seeds: Vec::new(),
            tolerances: Map::new(),
            notes: Vec::new(),
        })
    }

    pub fn write_with(
        &mut self,
        name: &str,
        body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
    ) -> Result<(), Failure> {
        let mut w = BufWriter::new(File::create(self.dir.join(name))?);
        body(&mut w)?;
        w.flush()?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn write_text(&mut self, name: &str, text: &str) -> Result<(), Failure> {
        self.write_with(name, |w| w.write_all(text.as_bytes()))
    }

    pub fn write_json(&mut self, name: &str, value: &impl Serialize) -> Result<(), Failure> {
        let text = serde_json::to_string_pretty(value).map_err(|e| Failure::numerical("io", e.to_string()))?;
        self.write_text(name, &(text + "\n"))
    }

    pub fn seed(&mut self, seed: u64) {
        self.seeds.push(seed);
    }

    pub fn tolerance(&mut self, name: &str, value: impl Into<Value>) {
        self.tolerances.insert(name.to_string(), value.into());
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    /// Writes `manifest.json` with everything needed to re-run the command.
    pub fn finish(mut self, subcommand: &str, inputs: Value) -> Result<PathBuf, Failure> {
        let manifest = json!({
            "schema_version": SCHEMA_VERSION,
            "tool": "ompath",
            "version": env!("CARGO_PKG_VERSION"),
            "git_describe": env!("OMPATH_GIT_DESCRIBE"),
            "command": std::env::args().collect::<Vec<_>>(),
            "subcommand": subcommand,
            "inputs": inputs,
            "seeds": self.seeds,
            "tolerances": self.tolerances,
            "jobs": rayon::current_num_threads(),
            "wall_time_s": self.started.elapsed().as_secs_f64(),
            "artifacts": self.files,
            "notes": self.notes,
        });
        self.write_json("manifest.json", &manifest)?;
        Ok(self.dir)
    }
}
