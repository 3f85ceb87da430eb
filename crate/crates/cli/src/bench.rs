//! Batch embed/attack/extract runs and their reports.
//!
//! For every mesh the harness embeds once, records an imperceptibility row
//! (distortion of the marked mesh and clean extraction), then runs each attack
//! on the marked mesh and records the correlation of what is extracted.
//! Cells run in parallel; rows are sorted by mesh, stage, attack family and
//! parameter afterwards, so the CSV only depends on the configuration.

use std::cmp::Ordering;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use meshmark::attacks::AttackSpec;
use meshmark::mesh::bbox_diagonal;
use meshmark::{correlation, embed, extract, generate_watermark, metrics, CarrierMode, Mesh, WatermarkKey};
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::config::BenchConfig;
use crate::CliError;

pub const CSV_HEADER: [&str; 9] = ["mesh", "stage", "attack", "param", "corr", "mrms", "hd", "millis", "status"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Embed,
    Attack,
}

impl Stage {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Embed => "embed",
            Self::Attack => "attack",
        }
    }
}

/// One report line. Distances are relative to the bounding-box diagonal of
/// the original mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub mesh: String,
    pub mesh_index: usize,
    pub stage: Stage,
    /// `None` for the embedding row.
    pub attack: Option<AttackSpec>,
    pub corr: Option<f64>,
    pub mrms: Option<f64>,
    pub hd: Option<f64>,
    pub millis: Option<u128>,
    /// `ok`, or the error that stopped this cell.
    pub status: String,
}

impl BenchRow {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }

    pub fn attack_name(&self) -> &str {
        self.attack.as_ref().map_or("none", |a| a.name())
    }

    pub fn param(&self) -> String {
        self.attack.as_ref().map_or_else(String::new, |a| a.param())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeshSummary {
    pub label: String,
    pub vertices: usize,
    pub faces: usize,
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub name: String,
    pub config_hash: String,
    pub seed: u64,
    pub key: WatermarkKey,
    pub samples_per_triangle: usize,
    pub version: &'static str,
    /// `None` where the mesh failed to load.
    pub meshes: Vec<Option<MeshSummary>>,
    pub rows: Vec<BenchRow>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct BenchOptions {
    /// Carriers are all vertices (ratio 1, ranked by norm) instead of the
    /// salient subset; reports get a `_no_saliency` suffix.
    pub no_saliency: bool,
    /// Fill the `millis` column. Timings make reports non-reproducible.
    pub timings: bool,
}

/// Seed of one (mesh, attack) cell: the first eight bytes of
/// SHA-256(`"<global seed>/<mesh label>/<attack spec>"`).
pub fn cell_seed(global: u64, mesh: &str, attack: &AttackSpec) -> u64 {
    let digest = Sha256::digest(format!("{global}/{mesh}/{attack}").as_bytes());
    u64::from_le_bytes(digest[..8].try_into().unwrap())
}

pub fn config_hash(cfg: &BenchConfig) -> String {
    Sha256::digest(cfg.canonical_text().as_bytes()).iter().fold(String::new(), |mut s, b| {
        write!(s, "{b:02x}").unwrap();
        s
    })
}

fn key_for(cfg: &BenchConfig, opts: BenchOptions) -> WatermarkKey {
    let mut key = cfg.key.clone();
    if opts.no_saliency {
        key.carriers = CarrierMode::AllVertices;
        key.saliency_ratio = 1.0;
    }
    key
}

struct Marked {
    index: usize,
    label: String,
    diag: f64,
    mesh: Mesh,
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, u128) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_millis())
}

pub fn run_bench(cfg: &BenchConfig, opts: BenchOptions) -> Result<BenchReport, CliError> {
    cfg.validate()?;
    let key = key_for(cfg, opts);
    let expected = generate_watermark(key.key1, key.payload_bits);
    let corr = |m: &Mesh| extract(m, &key).map(|e| correlation(&e.watermark, &expected).value);
    let keep_time = |ms: u128| opts.timings.then_some(ms);

    let loaded: Vec<_> = cfg.meshes.par_iter().map(|src| (src.label(), src.load())).collect();
    let meshes = loaded
        .iter()
        .map(|(label, m)| {
            m.as_ref().ok().map(|m| MeshSummary { label: label.clone(), vertices: m.vertex_count(), faces: m.face_count() })
        })
        .collect();

    let embedded: Vec<(BenchRow, Option<Marked>)> = loaded
        .into_par_iter()
        .enumerate()
        .map(|(index, (label, mesh))| {
            let mut row = BenchRow {
                mesh: label.clone(),
                mesh_index: index,
                stage: Stage::Embed,
                attack: None,
                corr: None,
                mrms: None,
                hd: None,
                millis: None,
                status: "ok".into(),
            };
            let mesh = match mesh {
                Ok(m) => m,
                Err(e) => {
                    row.status = format!("load failed: {e}");
                    return (row, None);
                }
            };
            let (result, ms) = timed(|| embed(&mesh, &key));
            row.millis = keep_time(ms);
            let marked = match result {
                Ok((marked, _)) => marked,
                Err(e) => {
                    row.status = format!("embed failed: {e}");
                    return (row, None);
                }
            };
            let diag = bbox_diagonal(&mesh);
            let d = metrics::mrms(&mesh, &marked, cfg.samples_per_triangle, cfg.seed);
            row.mrms = Some(d.mrms / diag);
            row.hd = Some(d.hausdorff / diag);
            match corr(&marked) {
                Ok(c) => row.corr = Some(c),
                Err(e) => row.status = format!("extract failed: {e}"),
            }
            (row, Some(Marked { index, label, diag, mesh: marked }))
        })
        .collect();

    let mut rows = Vec::new();
    let mut cells = Vec::new();
    for (row, marked) in &embedded {
        rows.push(row.clone());
        for spec in &cfg.attacks {
            cells.push((row, marked.as_ref(), spec));
        }
    }
    let attacked: Vec<BenchRow> = cells
        .into_par_iter()
        .map(|(embed_row, marked, spec)| {
            let mut row = BenchRow {
                stage: Stage::Attack,
                attack: Some(spec.clone()),
                corr: None,
                mrms: None,
                hd: None,
                millis: None,
                status: "ok".into(),
                ..embed_row.clone()
            };
            let Some(marked) = marked else {
                row.status = "skipped: no watermarked mesh".into();
                return row;
            };
            let spec = spec.clone().with_default_seed(cell_seed(cfg.seed, &marked.label, spec));
            debug_assert_eq!(marked.index, row.mesh_index);
            let (result, ms) = timed(|| spec.apply(&marked.mesh));
            let attacked = match result {
                Ok(a) => a,
                Err(e) => {
                    row.status = format!("attack failed: {e}");
                    return row;
                }
            };
            let (c, ms2) = timed(|| corr(&attacked));
            row.millis = keep_time(ms + ms2);
            match c {
                Ok(c) => row.corr = Some(c),
                Err(e) => row.status = format!("extract failed: {e}"),
            }
            let d = metrics::mrms(&marked.mesh, &attacked, cfg.samples_per_triangle, cfg.seed);
            row.mrms = Some(d.mrms / marked.diag);
            row.hd = Some(d.hausdorff / marked.diag);
            row
        })
        .collect();
    rows.extend(attacked);
    rows.sort_by(canonical_order);

    Ok(BenchReport {
        name: if opts.no_saliency { format!("{}_no_saliency", cfg.name) } else { cfg.name.clone() },
        config_hash: config_hash(cfg),
        seed: cfg.seed,
        key,
        samples_per_triangle: cfg.samples_per_triangle,
        version: env!("CARGO_PKG_VERSION"),
        meshes,
        rows,
    })
}

/// Orders numeric parameter components numerically and the rest as text.
fn compare_params(a: &str, b: &str) -> Ordering {
    let mut pa = a.split(',');
    let mut pb = b.split(',');
    loop {
        match (pa.next(), pb.next()) {
            (None, None) => return Ordering::Equal,
            (None, Some(_)) => return Ordering::Less,
            (Some(_), None) => return Ordering::Greater,
            (Some(x), Some(y)) => {
                let o = match (x.parse::<f64>(), y.parse::<f64>()) {
                    (Ok(x), Ok(y)) => x.total_cmp(&y),
                    _ => x.cmp(y),
                };
                if o != Ordering::Equal {
                    return o;
                }
            }
        }
    }
}

fn canonical_order(a: &BenchRow, b: &BenchRow) -> Ordering {
    a.mesh_index
        .cmp(&b.mesh_index)
        .then(a.stage.cmp(&b.stage))
        .then_with(|| a.attack_name().cmp(b.attack_name()))
        .then_with(|| compare_params(&a.param(), &b.param()))
        .then_with(|| {
            let spec = |r: &BenchRow| r.attack.as_ref().map(|s| s.to_string()).unwrap_or_default();
            spec(a).cmp(&spec(b))
        })
}

fn opt_fmt(v: Option<f64>, f: impl Fn(f64) -> String) -> String {
    v.map(f).unwrap_or_default()
}

impl BenchReport {
    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let internal = |e: csv::Error| CliError::Internal(format!("writing CSV: {e}"));
        w.write_record(CSV_HEADER).map_err(internal)?;
        for r in &self.rows {
            w.write_record([
                r.mesh.clone(),
                r.stage.as_str().to_string(),
                r.attack_name().to_string(),
                r.param(),
                opt_fmt(r.corr, |c| format!("{c:.6}")),
                opt_fmt(r.mrms, |d| format!("{d:.6e}")),
                opt_fmt(r.hd, |d| format!("{d:.6e}")),
                r.millis.map(|m| m.to_string()).unwrap_or_default(),
                r.status.clone(),
            ])
            .map_err(internal)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Internal(format!("writing CSV: {e}")))?;
        String::from_utf8(bytes).map_err(|e| CliError::Internal(e.to_string()))
    }

    pub fn to_markdown(&self) -> String {
        let mut s = String::new();
        let k = &self.key;
        writeln!(s, "# Benchmark report: {}\n", self.name).unwrap();
        writeln!(s, "| Setting | Value |\n|---|---|").unwrap();
        writeln!(s, "| toolkit version | meshmark {} |", self.version).unwrap();
        writeln!(s, "| config hash (SHA-256) | `{}` |", self.config_hash).unwrap();
        writeln!(s, "| global seed | {} |", self.seed).unwrap();
        writeln!(s, "| attack seeds | per cell, SHA-256 of `seed/mesh/attack` unless the spec has `@seed` |").unwrap();
        writeln!(s, "| key1 | {} |", k.key1).unwrap();
        writeln!(s, "| delta | {} |", k.delta).unwrap();
        writeln!(s, "| payload bits | {} |", k.payload_bits).unwrap();
        match k.carriers {
            CarrierMode::Salient => writeln!(
                s,
                "| carriers | salient, ratio {}, sigma {} of the bbox diagonal |",
                k.saliency_ratio, k.sigma_fraction
            )
            .unwrap(),
            CarrierMode::AllVertices => writeln!(s, "| carriers | all vertices (no saliency) |").unwrap(),
        }
        writeln!(s, "| samples per triangle | {} |\n", self.samples_per_triangle).unwrap();
        writeln!(s, "MRMS and HD are relative to the bounding-box diagonal of the original mesh.\n").unwrap();

        writeln!(s, "## Imperceptibility\n").unwrap();
        writeln!(s, "| Mesh | Vertices | Faces | MRMS | HD | Corr |\n|---|---:|---:|---:|---:|---:|").unwrap();
        for r in self.rows.iter().filter(|r| r.stage == Stage::Embed) {
            let (v, f) = self.meshes[r.mesh_index].as_ref().map_or((String::new(), String::new()), |m| {
                (m.vertices.to_string(), m.faces.to_string())
            });
            writeln!(
                s,
                "| {} | {v} | {f} | {} | {} | {} |",
                r.mesh,
                opt_fmt(r.mrms, |d| format!("{d:.3e}")),
                opt_fmt(r.hd, |d| format!("{d:.3e}")),
                opt_fmt(r.corr, |c| format!("{c:.3}")),
            )
            .unwrap();
        }

        writeln!(s, "\n## Robustness (correlation)\n").unwrap();
        let labels: Vec<&str> =
            self.rows.iter().filter(|r| r.stage == Stage::Embed).map(|r| r.mesh.as_str()).collect();
        write!(s, "| Attack | Parameter |").unwrap();
        for l in &labels {
            write!(s, " {l} |").unwrap();
        }
        write!(s, "\n|---|---|").unwrap();
        for _ in &labels {
            write!(s, "---:|").unwrap();
        }
        writeln!(s).unwrap();
        // Attack rows of the first mesh fix the row order; every mesh has
        // the same attack list.
        let first = self.rows.iter().find(|r| r.stage == Stage::Attack).map(|r| r.mesh_index);
        let order: Vec<&BenchRow> =
            self.rows.iter().filter(|r| r.stage == Stage::Attack && Some(r.mesh_index) == first).collect();
        for (i, proto) in order.iter().enumerate() {
            write!(s, "| {} | {} |", proto.attack_name(), proto.param()).unwrap();
            for mesh_rows in self.rows.iter().filter(|r| r.stage == Stage::Embed) {
                let cell = self
                    .rows
                    .iter()
                    .filter(|r| r.stage == Stage::Attack && r.mesh_index == mesh_rows.mesh_index)
                    .nth(i);
                let text = match cell {
                    Some(r) if r.is_ok() => opt_fmt(r.corr, |c| format!("{c:.3}")),
                    Some(_) => "failed".into(),
                    None => String::new(),
                };
                write!(s, " {text} |").unwrap();
            }
            writeln!(s).unwrap();
        }

        let failures: Vec<&BenchRow> = self.rows.iter().filter(|r| !r.is_ok()).collect();
        if !failures.is_empty() {
            writeln!(s, "\n## Failures\n").unwrap();
            for r in failures {
                let what = r.attack.as_ref().map_or_else(|| "embed".to_string(), |a| a.to_string());
                writeln!(s, "- {} / {}: {}", r.mesh, what, r.status).unwrap();
            }
        }
        s
    }

    /// Writes `<name>.csv` and `<name>.md` into `dir`, creating it if needed.
    pub fn write(&self, dir: &Path) -> Result<(PathBuf, PathBuf), CliError> {
        let io = |p: &Path, e: std::io::Error| CliError::Core(meshmark::Error::Io { path: p.display().to_string(), source: e });
        std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
        let csv_path = dir.join(format!("{}.csv", self.name));
        let md_path = dir.join(format!("{}.md", self.name));
        std::fs::write(&csv_path, self.to_csv()?).map_err(|e| io(&csv_path, e))?;
        std::fs::write(&md_path, self.to_markdown()).map_err(|e| io(&md_path, e))?;
        Ok((csv_path, md_path))
    }
}
