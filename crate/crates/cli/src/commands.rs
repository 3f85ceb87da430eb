use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use meshmark::attacks::AttackSpec;
use meshmark::mesh::principal_bbox_diagonal;
use meshmark::saliency::compute_saliency;
use meshmark::{
    correlation, embed, extract, generate_watermark, metrics, normalize, read_mesh, write_mesh, Error, Mesh,
    WatermarkKey,
};

use crate::bench::{run_bench, BenchOptions};
use crate::config::{bundled_mesh, BenchConfig, BUNDLED_MESHES, OUTPUT_DIR_ENV};
use crate::CliError;

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Core(Error::Io { path: path.display().to_string(), source: e })
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| io_error(path, e))
}

pub fn read_key_file(path: &Path) -> Result<WatermarkKey, CliError> {
    WatermarkKey::from_key_file(&read_text(path)?)
        .map_err(|e| CliError::Core(Error::File { path: path.display().to_string(), source: Box::new(e) }))
}

pub fn cmd_embed(input: &Path, output: &Path, key: &WatermarkKey) -> Result<String, CliError> {
    let mesh = read_mesh(input)?;
    let (marked, report) = embed(&mesh, key)?;
    write_mesh(output, &marked)?;
    let mut s = String::new();
    writeln!(s, "wrote {}", output.display()).unwrap();
    writeln!(s, "payload: {}", generate_watermark(key.key1, key.payload_bits).to_bit_string()).unwrap();
    writeln!(s, "carriers per bit: {:?}", report.carriers_used).unwrap();
    writeln!(s, "bin width: {:.6} (normalized units)", report.bins.width).unwrap();
    if let Some(sigma) = report.sigma {
        writeln!(s, "saliency sigma: {sigma:.6}").unwrap();
    }
    writeln!(s, "sync rounds: {} ({} vertices re-quantized)", report.sync_rounds, report.resynced_vertices).unwrap();
    if report.skipped_vertices > 0 {
        writeln!(s, "skipped vertices at the centroid: {}", report.skipped_vertices).unwrap();
    }
    if report.flagged_curvature > 0 {
        writeln!(s, "vertices without curvature estimate: {}", report.flagged_curvature).unwrap();
    }
    Ok(s)
}

pub fn cmd_extract(input: &Path, key: &WatermarkKey) -> Result<String, CliError> {
    let mesh = read_mesh(input)?;
    let found = extract(&mesh, key)?;
    let expected = generate_watermark(key.key1, key.payload_bits);
    let c = correlation(&found.watermark, &expected);
    let mut s = String::new();
    writeln!(s, "bits: {}", found.watermark.to_bit_string()).unwrap();
    let conf: Vec<String> = found.confidence.iter().map(|c| format!("{c:.2}")).collect();
    writeln!(s, "confidence: {}", conf.join(" ")).unwrap();
    writeln!(s, "correlation: {:.6}{}", c.value, if c.defined { "" } else { " (constant payload)" }).unwrap();
    Ok(s)
}

pub fn cmd_attack(input: &Path, spec: &str, output: &Path, seed: Option<u64>) -> Result<String, CliError> {
    let spec: AttackSpec = spec.parse()?;
    let spec = match seed {
        Some(s) => spec.with_default_seed(s),
        None => spec,
    };
    let mesh = read_mesh(input)?;
    let attacked = spec.apply(&mesh)?;
    write_mesh(output, &attacked)?;
    Ok(format!(
        "applied {spec}: {} -> {} vertices, {} -> {} faces\nwrote {}\n",
        mesh.vertex_count(),
        attacked.vertex_count(),
        mesh.face_count(),
        attacked.face_count(),
        output.display()
    ))
}

pub fn cmd_metric(a: &Path, b: &Path, samples_per_triangle: usize, seed: u64) -> Result<String, CliError> {
    let ma = read_mesh(a)?;
    let mb = read_mesh(b)?;
    let d = metrics::mrms(&ma, &mb, samples_per_triangle, seed);
    let diag = meshmark::mesh::bbox_diagonal(&ma);
    let mut s = String::new();
    writeln!(s, "rms a->b:  {:.6e}", d.rms_a_to_b).unwrap();
    writeln!(s, "rms b->a:  {:.6e}", d.rms_b_to_a).unwrap();
    writeln!(s, "mrms:      {:.6e} ({:.6e} of bbox diagonal)", d.mrms, d.mrms / diag).unwrap();
    writeln!(s, "hausdorff: {:.6e} ({:.6e} of bbox diagonal)", d.hausdorff, d.hausdorff / diag).unwrap();
    writeln!(s, "samples:   {}", d.sample_count).unwrap();
    Ok(s)
}

/// Output directory precedence: explicit flag, then the environment
/// variable, then the config file.
pub fn resolve_output_dir(cfg: &BenchConfig, flag: Option<&Path>) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| cfg.output_dir.clone())
}

pub fn cmd_bench(config: &Path, opts: BenchOptions, out_dir: Option<&Path>) -> Result<String, CliError> {
    let cfg = BenchConfig::from_file(config)?;
    let report = run_bench(&cfg, opts)?;
    let (csv, md) = report.write(&resolve_output_dir(&cfg, out_dir))?;
    let failed = report.rows.iter().filter(|r| !r.is_ok()).count();
    Ok(format!(
        "{} rows ({failed} failed)\nwrote {}\nwrote {}\n",
        report.rows.len(),
        csv.display(),
        md.display()
    ))
}

/// Blue (low) to red (high).
fn color_ramp(t: f64) -> [u8; 3] {
    let t = t.clamp(0.0, 1.0);
    [(255.0 * t).round() as u8, (255.0 * (1.0 - (2.0 * t - 1.0).abs())).round() as u8, (255.0 * (1.0 - t)).round() as u8]
}

fn write_colored_off(mesh: &Mesh, values: &[f64]) -> String {
    let max = values.iter().copied().fold(0.0, f64::max);
    let mut s = String::from("COFF\n");
    writeln!(s, "{} {} 0", mesh.vertex_count(), mesh.face_count()).unwrap();
    for (p, &v) in mesh.vertices().iter().zip(values) {
        let [r, g, b] = color_ramp(if max > 0.0 { v / max } else { 0.0 });
        writeln!(s, "{} {} {} {r} {g} {b} 255", p.x, p.y, p.z).unwrap();
    }
    for f in mesh.faces() {
        writeln!(s, "3 {} {} {}", f[0], f[1], f[2]).unwrap();
    }
    s
}

/// Per-vertex saliency of the normalized mesh as CSV, with an optional
/// color-coded COFF copy of the input.
pub fn cmd_saliency(
    input: &Path,
    csv_out: &Path,
    colored_out: Option<&Path>,
    sigma_fraction: f64,
) -> Result<String, CliError> {
    let mesh = read_mesh(input)?;
    let (canonical, _) = normalize(&mesh)?;
    let sigma = sigma_fraction * principal_bbox_diagonal(&canonical);
    let map = compute_saliency(&canonical, sigma)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    let internal = |e: csv::Error| CliError::Internal(format!("writing CSV: {e}"));
    w.write_record(["vertex", "saliency", "mean_curvature"]).map_err(internal)?;
    for (i, (s, h)) in map.values.iter().zip(&map.curvature.mean).enumerate() {
        w.write_record([i.to_string(), format!("{s:.9e}"), format!("{h:.9e}")]).map_err(internal)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Internal(e.to_string()))?;
    std::fs::write(csv_out, bytes).map_err(|e| io_error(csv_out, e))?;
    let mut s = format!("sigma: {sigma:.6}\nwrote {}\n", csv_out.display());
    if let Some(path) = colored_out {
        std::fs::write(path, write_colored_off(&mesh, &map.values)).map_err(|e| io_error(path, e))?;
        writeln!(s, "wrote {}", path.display()).unwrap();
    }
    Ok(s)
}

pub fn cmd_gen(name: &str, output: &Path) -> Result<String, CliError> {
    let mesh = bundled_mesh(name).ok_or_else(|| {
        CliError::Config(format!("unknown bundled mesh {name:?} (known: {})", BUNDLED_MESHES.join(", ")))
    })?;
    write_mesh(output, &mesh)?;
    Ok(format!("wrote {} ({} vertices, {} faces)\n", output.display(), mesh.vertex_count(), mesh.face_count()))
}
