//! ASCII OFF and OBJ readers/writers.
//!
//! Only triangle faces are accepted. OBJ normals, texture coordinates,
//! groups and materials are skipped; `f` records may use the `v/vt/vn`
//! forms and negative (relative) indices.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::{MeshError, TriMesh};
use crate::real::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Off,
    Obj,
}

impl MeshFormat {
    /// Guesses the format from a file extension.
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "off" => Some(Self::Off),
            "obj" => Some(Self::Obj),
            _ => None,
        }
    }
}

pub fn load_mesh<T: Real>(path: &Path, format: MeshFormat) -> Result<TriMesh<T>, MeshError> {
    let text = fs::read_to_string(path)?;
    match format {
        MeshFormat::Off => parse_off(&text),
        MeshFormat::Obj => parse_obj(&text),
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> MeshError {
    MeshError::Parse { line, message: message.into() }
}

fn parse_num<T: Real>(tok: &str, line: usize) -> Result<T, MeshError> {
    tok.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .and_then(T::from_f64)
        .ok_or_else(|| parse_err(line, format!("bad coordinate {tok:?}")))
}

pub fn parse_off<T: Real>(text: &str) -> Result<TriMesh<T>, MeshError> {
    // Tokens with their 1-based line numbers, comments stripped.
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let mut header_tokens = header.split_whitespace();
    if header_tokens.next() != Some("OFF") {
        return Err(parse_err(hline, "missing OFF header"));
    }
    let rest: Vec<&str> = header_tokens.collect();
    let (cline, counts) = if rest.is_empty() {
        let (n, l) = lines.next().ok_or_else(|| parse_err(hline, "missing counts"))?;
        (n, l.split_whitespace().collect::<Vec<_>>())
    } else {
        (hline, rest)
    };
    if counts.len() < 2 {
        return Err(parse_err(cline, "expected 'V F E' counts"));
    }
    let count = |s: &str| s.parse::<usize>().map_err(|_| parse_err(cline, format!("bad count {s:?}")));
    let nv = count(counts[0])?;
    let nf = count(counts[1])?;

    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (n, l) = lines.next().ok_or_else(|| parse_err(cline, "unexpected end of vertex block"))?;
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() < 3 {
            return Err(parse_err(n, "vertex needs three coordinates"));
        }
        vertices.push([parse_num(toks[0], n)?, parse_num(toks[1], n)?, parse_num(toks[2], n)?]);
    }
    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (n, l) = lines.next().ok_or_else(|| parse_err(cline, "unexpected end of face block"))?;
        let idx: Vec<usize> = l
            .split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|_| parse_err(n, format!("bad index {t:?}"))))
            .collect::<Result<_, _>>()?;
        if idx.first() != Some(&3) || idx.len() < 4 {
            return Err(parse_err(n, "only triangle faces '3 i j k' are supported"));
        }
        faces.push([idx[1], idx[2], idx[3]]);
    }
    TriMesh::new(vertices, faces)
}

pub fn parse_obj<T: Real>(text: &str) -> Result<TriMesh<T>, MeshError> {
    let mut vertices: Vec<[T; 3]> = Vec::new();
    let mut faces = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let n = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        let mut toks = line.split_whitespace();
        match toks.next() {
            Some("v") => {
                let c: Vec<&str> = toks.collect();
                if c.len() < 3 {
                    return Err(parse_err(n, "vertex needs three coordinates"));
                }
                vertices.push([parse_num(c[0], n)?, parse_num(c[1], n)?, parse_num(c[2], n)?]);
            }
            Some("f") => {
                let idx: Vec<usize> = toks
                    .map(|t| obj_index(t, vertices.len()).ok_or_else(|| parse_err(n, format!("bad face index {t:?}"))))
                    .collect::<Result<_, _>>()?;
                if idx.len() != 3 {
                    return Err(parse_err(n, "only triangle faces are supported"));
                }
                faces.push([idx[0], idx[1], idx[2]]);
            }
            _ => {}
        }
    }
    TriMesh::new(vertices, faces)
}

fn obj_index(tok: &str, nv: usize) -> Option<usize> {
    let first = tok.split('/').next()?;
    let i: i64 = first.parse().ok()?;
    match i {
        0 => None,
        i if i > 0 => Some(i as usize - 1),
        i => nv.checked_sub(i.unsigned_abs() as usize),
    }
}

/// Writes OFF with coordinates in 17 significant digits.
pub fn write_off<T: Real>(mesh: &TriMesh<T>, out: &mut impl Write) -> std::io::Result<()> {
    writeln!(out, "OFF")?;
    writeln!(out, "{} {} {}", mesh.vertex_count(), mesh.face_count(), mesh.edge_count())?;
    for p in mesh.vertices() {
        writeln!(out, "{:.16e} {:.16e} {:.16e}", p[0].to_f64_lossy(), p[1].to_f64_lossy(), p[2].to_f64_lossy())?;
    }
    for f in mesh.faces() {
        writeln!(out, "3 {} {} {}", f[0], f[1], f[2])?;
    }
    Ok(())
}

pub fn save_off<T: Real>(mesh: &TriMesh<T>, path: &Path) -> std::io::Result<()> {
    let mut buf = Vec::new();
    write_off(mesh, &mut buf)?;
    fs::write(path, buf)
}

/// Writes OBJ records for arbitrary positions and faces (1-based indices).
pub fn write_obj(points: &[[f64; 3]], faces: &[[usize; 3]], out: &mut impl Write) -> std::io::Result<()> {
    for p in points {
        writeln!(out, "v {:.16e} {:.16e} {:.16e}", p[0], p[1], p[2])?;
    }
    for f in faces {
        writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn off_single_triangle() {
        let m: TriMesh<f64> = parse_off("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n").unwrap();
        assert_eq!((m.vertex_count(), m.edge_count(), m.face_count()), (3, 3, 1));
        assert!(m.boundary_flags().iter().all(|&b| b));
    }

    #[test]
    fn off_counts_on_header_line_and_comments() {
        let text = "# hi\nOFF 4 2 5\n0 0 0\n1 0 0 # x\n1 1 0\n0 1 0\n3 0 1 2\n3 0 2 3\n";
        let m: TriMesh<f64> = parse_off(text).unwrap();
        assert_eq!((m.vertex_count(), m.edge_count(), m.face_count()), (4, 5, 2));
    }

    #[test]
    fn off_non_manifold() {
        let text = "OFF\n5 3 0\n0 0 0\n1 0 0\n0 1 0\n0 -1 0\n0 0 1\n3 0 1 2\n3 1 0 3\n3 0 1 4\n";
        assert!(matches!(parse_off::<f64>(text), Err(MeshError::NonManifoldEdge(0, 1))));
    }

    #[test]
    fn off_malformed() {
        assert!(matches!(parse_off::<f64>("OFF\n3 1 0\n0 0\n"), Err(MeshError::Parse { line: 3, .. })));
        assert!(matches!(parse_off::<f64>("PLY\n"), Err(MeshError::Parse { .. })));
        assert!(matches!(parse_off::<f64>("OFF\n4 1 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n"), Err(MeshError::Parse { .. })));
        assert!(matches!(parse_off::<f64>("OFF\n3 1 0\n0 0 0\n1 0 x\n0 1 0\n3 0 1 2\n"), Err(MeshError::Parse { line: 4, .. })));
    }

    #[test]
    fn obj_skips_attributes() {
        let text = "mtllib a.mtl\nv 0 0 0\nv 1 0 0\nv 0 1 0\nvn 0 0 1\nvt 0 0\nusemtl m\nf 1/1/1 2/2/1 -1//1\n";
        let m: TriMesh<f64> = parse_obj(text).unwrap();
        assert_eq!(m.faces(), &[[0, 1, 2]]);
    }

    #[test]
    fn off_round_trip_is_bit_exact() {
        let v = vec![[0.1, 1.0 / 3.0, -2.5e-7], [1e10, 0.0, std::f64::consts::PI], [-0.7, 1e-300, 5.0]];
        let m = TriMesh::new(v, vec![[0, 1, 2]]).unwrap();
        let mut buf = Vec::new();
        write_off(&m, &mut buf).unwrap();
        let back: TriMesh<f64> = parse_off(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(back.vertices(), m.vertices());
        assert_eq!(back.faces(), m.faces());
    }

    #[test]
    fn format_from_extension() {
        assert_eq!(MeshFormat::from_path(Path::new("a/b.OFF")), Some(MeshFormat::Off));
        assert_eq!(MeshFormat::from_path(Path::new("x.obj")), Some(MeshFormat::Obj));
        assert_eq!(MeshFormat::from_path(Path::new("x.ply")), None);
    }
}
