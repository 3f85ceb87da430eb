//! Benchmark configuration files.
//!
//! One `key = value` per line, `#` starts a comment:
//!
//! ```text
//! meshes = corpus, models/bunny.off
//! attacks = noise:0.05, smooth:0.1,5, quant:9, reorder:1
//! seed = 7
//! output = reports
//! samples_per_triangle = 10
//! name = bench
//! delta = 0.064
//! payload_bits = 6
//! ```
//!
//! Mesh entries are file paths (relative to the config file) or `corpus:<name>`
//! for a bundled procedural mesh; `corpus` alone expands to the whole bundled
//! corpus. Any [`WatermarkKey`] field may be set by its key-file name.

use std::collections::HashSet;
use std::fmt;
use std::path::{Path, PathBuf};

use meshmark::attacks::{parse_attack_list, AttackSpec};
use meshmark::metrics::DEFAULT_SAMPLES_PER_TRIANGLE;
use meshmark::{shapes, Error, Mesh, WatermarkKey};

use crate::CliError;

/// Environment variable that overrides the configured output directory.
pub const OUTPUT_DIR_ENV: &str = "MESHMARK_OUTPUT_DIR";

/// Names accepted after `corpus:`.
pub const BUNDLED_MESHES: [&str; 4] = ["bumpy_sphere", "wavy_torus", "bumpy_grid", "icosphere"];

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum MeshSource {
    Bundled(String),
    File(PathBuf),
}

impl MeshSource {
    /// Short label used in report rows.
    pub fn label(&self) -> String {
        match self {
            Self::Bundled(name) => name.clone(),
            Self::File(p) => p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| p.display().to_string()),
        }
    }

    pub fn load(&self) -> Result<Mesh, Error> {
        match self {
            Self::Bundled(name) => bundled_mesh(name)
                .ok_or_else(|| Error::InvalidParameter(format!("unknown bundled mesh {name:?}"))),
            Self::File(p) => meshmark::read_mesh(p),
        }
    }
}

impl fmt::Display for MeshSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Bundled(name) => write!(f, "corpus:{name}"),
            Self::File(p) => write!(f, "{}", p.display()),
        }
    }
}

/// A bundled mesh by name.
pub fn bundled_mesh(name: &str) -> Option<Mesh> {
    if name == "icosphere" {
        return Some(shapes::icosphere(4));
    }
    shapes::corpus().into_iter().find(|(n, _)| *n == name).map(|(_, m)| m)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub meshes: Vec<MeshSource>,
    pub key: WatermarkKey,
    pub attacks: Vec<AttackSpec>,
    pub samples_per_triangle: usize,
    pub output_dir: PathBuf,
    pub seed: u64,
    /// Base name of the report files.
    pub name: String,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            meshes: corpus_sources(),
            key: WatermarkKey::default(),
            attacks: Vec::new(),
            samples_per_triangle: DEFAULT_SAMPLES_PER_TRIANGLE,
            output_dir: PathBuf::from("reports"),
            seed: 0,
            name: "bench".into(),
        }
    }
}

fn corpus_sources() -> Vec<MeshSource> {
    shapes::corpus().into_iter().map(|(n, _)| MeshSource::Bundled(n.to_string())).collect()
}

fn config_error(line: usize, msg: impl fmt::Display) -> CliError {
    CliError::Config(format!("line {line}: {msg}"))
}

impl BenchConfig {
    /// Parses config text. Relative mesh paths and the output directory are
    /// resolved against `base_dir`.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        let mut meshes = None;
        let mut output = None;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (name, value) =
                line.split_once('=').ok_or_else(|| config_error(line_no, "expected `name = value`"))?;
            let (name, value) = (name.trim(), value.trim());
            match name {
                "meshes" => meshes = Some(parse_meshes(value, base_dir).map_err(|e| config_error(line_no, e))?),
                "attacks" => {
                    cfg.attacks = parse_attack_list(value).map_err(|e| match e {
                        Error::AttackSpec { .. } => CliError::Core(e),
                        other => config_error(line_no, other),
                    })?
                }
                "seed" => cfg.seed = value.parse().map_err(|_| config_error(line_no, format!("bad seed {value:?}")))?,
                "samples_per_triangle" => {
                    cfg.samples_per_triangle = value
                        .parse()
                        .map_err(|_| config_error(line_no, format!("bad samples_per_triangle {value:?}")))?
                }
                "output" => output = Some(value.to_string()),
                "name" => {
                    if value.is_empty() || value.contains(['/', '\\']) {
                        return Err(config_error(line_no, format!("bad report name {value:?}")));
                    }
                    cfg.name = value.to_string()
                }
                _ => cfg.key.set(name, value).map_err(|e| match e {
                    Error::InvalidKey(msg) if msg.starts_with("unknown field") => {
                        config_error(line_no, format!("unknown setting {name:?}"))
                    }
                    other => CliError::Core(other),
                })?,
            }
        }
        if let Some(m) = meshes {
            cfg.meshes = m;
        }
        if let Some(o) = output {
            cfg.output_dir = base_dir.join(o);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Core(Error::Io { path: path.display().to_string(), source: e }))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.key.validate()?;
        if self.meshes.is_empty() {
            return Err(CliError::Config("no meshes configured".into()));
        }
        let mut seen = HashSet::new();
        for m in &self.meshes {
            if !seen.insert(m) {
                return Err(CliError::Config(format!("mesh {m} listed twice")));
            }
        }
        let mut labels = HashSet::new();
        for m in &self.meshes {
            if !labels.insert(m.label()) {
                return Err(CliError::Config(format!("two meshes share the report label {:?}", m.label())));
            }
        }
        if self.attacks.is_empty() {
            return Err(CliError::Config("attack grid is empty".into()));
        }
        Ok(())
    }

    /// Canonical text form; its hash identifies the configuration in reports.
    pub fn canonical_text(&self) -> String {
        let meshes: Vec<String> = self.meshes.iter().map(|m| m.to_string()).collect();
        let attacks: Vec<String> = self.attacks.iter().map(|a| a.to_string()).collect();
        format!(
            "meshes = {}\nattacks = {}\nseed = {}\nsamples_per_triangle = {}\n{}",
            meshes.join(", "),
            attacks.join(", "),
            self.seed,
            self.samples_per_triangle,
            self.key.to_key_file()
        )
    }
}

fn parse_meshes(value: &str, base_dir: &Path) -> Result<Vec<MeshSource>, String> {
    let mut out = Vec::new();
    for item in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if item == "corpus" {
            out.extend(corpus_sources());
        } else if let Some(name) = item.strip_prefix("corpus:") {
            if !BUNDLED_MESHES.contains(&name) {
                return Err(format!("unknown bundled mesh {name:?} (known: {})", BUNDLED_MESHES.join(", ")));
            }
            out.push(MeshSource::Bundled(name.to_string()));
        } else {
            out.push(MeshSource::File(base_dir.join(item)));
        }
    }
    Ok(out)
}
