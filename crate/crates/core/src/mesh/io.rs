//! ASCII OFF and OBJ (vertex/face subset) readers and writers.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::Point3;

use super::{Face, Mesh};
use crate::error::{Error, ParseErrorKind, Result};

fn perr(line: usize, kind: ParseErrorKind) -> Error {
    Error::Parse { line, kind }
}

fn parse_f64(tok: &str, line: usize) -> Result<f64> {
    let v: f64 = tok
        .parse()
        .map_err(|_| perr(line, ParseErrorKind::MalformedNumber(tok.to_string())))?;
    if !v.is_finite() {
        return Err(perr(line, ParseErrorKind::NonFiniteCoordinate));
    }
    Ok(v)
}

fn parse_usize(tok: &str, line: usize) -> Result<usize> {
    tok.parse()
        .map_err(|_| perr(line, ParseErrorKind::MalformedNumber(tok.to_string())))
}

fn check_face(face: [i64; 3], n: usize, line: usize) -> Result<Face> {
    let mut out = [0usize; 3];
    for (o, &i) in out.iter_mut().zip(face.iter()) {
        if i < 0 || i as usize >= n {
            return Err(perr(line, ParseErrorKind::IndexOutOfRange { index: i, vertex_count: n }));
        }
        *o = i as usize;
    }
    if out[0] == out[1] || out[1] == out[2] || out[0] == out[2] {
        return Err(perr(line, ParseErrorKind::RepeatedIndex));
    }
    Ok(out)
}

fn finish(vertices: Vec<Point3<f64>>, faces: Vec<Face>, line: usize) -> Result<Mesh> {
    if vertices.len() < 3 || faces.is_empty() {
        return Err(perr(
            line,
            ParseErrorKind::TooFewElements { vertices: vertices.len(), faces: faces.len() },
        ));
    }
    Mesh::new(vertices, faces)
}

/// Parses an ASCII OFF file with triangular faces.
///
/// `#` comments and blank lines are skipped. Tokens after the three face
/// indices (per-face colors) are ignored.
pub fn parse_off(text: &str) -> Result<Mesh> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = lines.next().ok_or(perr(1, ParseErrorKind::MissingHeader))?;
    let mut head = header.split_whitespace();
    let magic = head.next().unwrap_or("");
    if magic != "OFF" {
        return Err(perr(hline, ParseErrorKind::MalformedHeader(magic.to_string())));
    }
    // Counts may share the header line ("OFF 8 12 0").
    let rest: Vec<&str> = head.collect();
    let (cline, counts) = if rest.is_empty() {
        let (l, c) = lines.next().ok_or(perr(hline, ParseErrorKind::UnexpectedEof))?;
        (l, c.split_whitespace().collect::<Vec<_>>())
    } else {
        (hline, rest)
    };
    if counts.len() < 2 {
        return Err(perr(cline, ParseErrorKind::MalformedCounts));
    }
    let nv = parse_usize(counts[0], cline).map_err(|_| perr(cline, ParseErrorKind::MalformedCounts))?;
    let nf = parse_usize(counts[1], cline).map_err(|_| perr(cline, ParseErrorKind::MalformedCounts))?;

    let mut last = cline;
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (l, s) = lines.next().ok_or(perr(last + 1, ParseErrorKind::UnexpectedEof))?;
        last = l;
        let toks: Vec<&str> = s.split_whitespace().collect();
        if toks.len() < 3 {
            return Err(perr(l, ParseErrorKind::MalformedNumber(s.to_string())));
        }
        vertices.push(Point3::new(parse_f64(toks[0], l)?, parse_f64(toks[1], l)?, parse_f64(toks[2], l)?));
    }

    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (l, s) = lines.next().ok_or(perr(last + 1, ParseErrorKind::UnexpectedEof))?;
        last = l;
        let toks: Vec<&str> = s.split_whitespace().collect();
        let arity = parse_usize(toks[0], l)?;
        if arity != 3 {
            return Err(perr(l, ParseErrorKind::NonTriangleFace(arity)));
        }
        if toks.len() < 4 {
            return Err(perr(l, ParseErrorKind::UnexpectedEof));
        }
        let mut idx = [0i64; 3];
        for (k, tok) in toks[1..4].iter().enumerate() {
            idx[k] = tok
                .parse()
                .map_err(|_| perr(l, ParseErrorKind::MalformedNumber(tok.to_string())))?;
        }
        faces.push(check_face(idx, nv, l)?);
    }
    finish(vertices, faces, last)
}

/// Parses the `v` and `f` records of a Wavefront OBJ file.
///
/// Face corners may use the `v/vt/vn` forms; only the position index is kept.
/// Negative (relative) indices are resolved against the vertices read so far.
/// All other record types are ignored.
pub fn parse_obj(text: &str) -> Result<Mesh> {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    let mut face_lines = Vec::new();
    let mut last = 0;
    for (i, raw) in text.lines().enumerate() {
        let l = i + 1;
        last = l;
        let s = raw.split('#').next().unwrap_or("").trim();
        let mut toks = s.split_whitespace();
        match toks.next() {
            Some("v") => {
                let c: Vec<&str> = toks.collect();
                if c.len() < 3 {
                    return Err(perr(l, ParseErrorKind::MalformedNumber(s.to_string())));
                }
                vertices.push(Point3::new(parse_f64(c[0], l)?, parse_f64(c[1], l)?, parse_f64(c[2], l)?));
            }
            Some("f") => {
                let corners: Vec<&str> = toks.collect();
                if corners.len() != 3 {
                    return Err(perr(l, ParseErrorKind::NonTriangleFace(corners.len())));
                }
                let mut idx = [0i64; 3];
                for (k, c) in corners.iter().enumerate() {
                    let pos = c.split('/').next().unwrap_or("");
                    let v: i64 = pos
                        .parse()
                        .map_err(|_| perr(l, ParseErrorKind::MalformedNumber(c.to_string())))?;
                    idx[k] = match v {
                        0 => return Err(perr(l, ParseErrorKind::IndexOutOfRange { index: 0, vertex_count: vertices.len() })),
                        v if v > 0 => v - 1,
                        v => vertices.len() as i64 + v,
                    };
                }
                face_lines.push(l);
                faces.push(idx);
            }
            _ => {}
        }
    }
    let n = vertices.len();
    let faces = faces
        .into_iter()
        .zip(face_lines)
        .map(|(f, l)| check_face(f, n, l))
        .collect::<Result<Vec<_>>>()?;
    finish(vertices, faces, last)
}

/// Writes ASCII OFF. Coordinates use the shortest decimal form that parses
/// back to the identical `f64`, so a write/parse cycle is lossless.
pub fn write_off(mesh: &Mesh) -> String {
    let mut out = String::with_capacity(32 * (mesh.vertex_count() + mesh.face_count()));
    writeln!(out, "OFF").unwrap();
    writeln!(out, "{} {} 0", mesh.vertex_count(), mesh.face_count()).unwrap();
    for p in mesh.vertices() {
        writeln!(out, "{} {} {}", p.x, p.y, p.z).unwrap();
    }
    for f in mesh.faces() {
        writeln!(out, "3 {} {} {}", f[0], f[1], f[2]).unwrap();
    }
    out
}

pub fn write_obj(mesh: &Mesh) -> String {
    let mut out = String::with_capacity(32 * (mesh.vertex_count() + mesh.face_count()));
    for p in mesh.vertices() {
        writeln!(out, "v {} {} {}", p.x, p.y, p.z).unwrap();
    }
    for f in mesh.faces() {
        writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1).unwrap();
    }
    out
}

fn is_obj(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("obj"))
}

/// Reads an OFF or OBJ file, chosen by extension (`.obj` is OBJ, anything
/// else is OFF).
pub fn read_mesh(path: impl AsRef<Path>) -> Result<Mesh> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|source| Error::Io { path: path.display().to_string(), source })?;
    let parsed = if is_obj(path) { parse_obj(&text) } else { parse_off(&text) };
    parsed.map_err(|e| Error::File { path: path.display().to_string(), source: Box::new(e) })
}

pub fn write_mesh(path: impl AsRef<Path>, mesh: &Mesh) -> Result<()> {
    let path = path.as_ref();
    let text = if is_obj(path) { write_obj(mesh) } else { write_off(mesh) };
    std::fs::write(path, text).map_err(|source| Error::Io { path: path.display().to_string(), source })
}
