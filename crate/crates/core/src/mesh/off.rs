//! OFF text format: `OFF`, a counts line `nv nf ne`, vertex lines, face lines.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::scalar::Real;

use super::{MeshError, TriangleMesh};

pub fn load_mesh<T: Real>(path: impl AsRef<Path>) -> Result<TriangleMesh<T>, MeshError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)
        .map_err(|e| MeshError::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    parse_off(&text)
}

pub fn read_off<T: Real>(reader: impl std::io::Read) -> Result<TriangleMesh<T>, MeshError> {
    let mut reader = reader;
    let mut text = String::new();
    reader
        .read_to_string(&mut text)
        .map_err(|e| MeshError::InvalidInput(format!("cannot read OFF input: {e}")))?;
    parse_off(&text)
}

/// Parses OFF text; `#` starts a comment, blank lines are skipped.
pub fn parse_off<T: Real>(text: &str) -> Result<TriangleMesh<T>, MeshError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = lines.next().ok_or_else(|| MeshError::MalformedHeader("empty file".into()))?;
    let mut header_rest = "";
    if header != "OFF" {
        match header.strip_prefix("OFF") {
            Some(rest) if rest.starts_with(char::is_whitespace) => header_rest = rest.trim(),
            _ => return Err(MeshError::MalformedHeader(format!("line {hline}: expected \"OFF\", found {header:?}"))),
        }
    }
    let (cline, counts) = if header_rest.is_empty() {
        lines.next().ok_or_else(|| MeshError::MalformedHeader("missing counts line".into()))?
    } else {
        (hline, header_rest)
    };
    let counts: Vec<usize> = counts
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|e| MeshError::Parse { line: cline, message: format!("bad counts: {e}") })?;
    if counts.len() < 2 {
        return Err(MeshError::Parse { line: cline, message: "counts line needs vertex and face counts".into() });
    }
    let (nv, nf) = (counts[0], counts[1]);

    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (line, l) = lines
            .next()
            .ok_or_else(|| MeshError::Parse { line: 0, message: format!("expected {nv} vertex lines") })?;
        let v: Vec<f64> = l
            .split_whitespace()
            .take(3)
            .map(str::parse::<f64>)
            .collect::<Result<_, _>>()
            .map_err(|e| MeshError::Parse { line, message: format!("bad vertex: {e}") })?;
        if v.len() != 3 || v.iter().any(|x| !x.is_finite()) {
            return Err(MeshError::Parse { line, message: "vertex needs three finite coordinates".into() });
        }
        vertices.push([T::lit(v[0]), T::lit(v[1]), T::lit(v[2])]);
    }
    let mut triangles = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (line, l) = lines
            .next()
            .ok_or_else(|| MeshError::Parse { line: 0, message: format!("expected {nf} face lines") })?;
        let f: Vec<usize> = l
            .split_whitespace()
            .map(str::parse::<usize>)
            .collect::<Result<_, _>>()
            .map_err(|e| MeshError::Parse { line, message: format!("bad face: {e}") })?;
        if f.first() != Some(&3) || f.len() < 4 {
            return Err(MeshError::Parse { line, message: "only triangular faces are supported".into() });
        }
        triangles.push([f[1], f[2], f[3]]);
    }
    if let Some((line, _)) = lines.next() {
        return Err(MeshError::Parse { line, message: "trailing content after faces".into() });
    }
    TriangleMesh::new(vertices, triangles)
}

pub fn write_off<T: Real>(mesh: &TriangleMesh<T>, mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "OFF")?;
    writeln!(out, "{} {} 0", mesh.num_vertices(), mesh.num_triangles())?;
    for v in mesh.vertices() {
        writeln!(out, "{:e} {:e} {:e}", v[0].as_f64(), v[1].as_f64(), v[2].as_f64())?;
    }
    for t in mesh.triangles() {
        writeln!(out, "3 {} {} {}", t[0], t[1], t[2])?;
    }
    Ok(())
}

pub fn save_mesh<T: Real>(mesh: &TriangleMesh<T>, path: impl AsRef<Path>) -> std::io::Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    write_off(mesh, &mut w)?;
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    const TETRA: &str = "OFF\n4 4 0\n1 1 1\n1 -1 -1\n-1 1 -1\n-1 -1 1\n3 0 1 2\n3 0 3 1\n3 0 2 3\n3 1 3 2\n";

    #[test]
    fn parses_tetrahedron() {
        let m = parse_off::<f64>(TETRA).unwrap();
        assert_eq!(m.num_vertices(), 4);
        assert_eq!(m.num_triangles(), 4);
        assert!(m.is_closed());
    }

    #[test]
    fn index_out_of_range() {
        let bad = TETRA.replace("3 1 3 2", "3 1 3 9");
        assert_eq!(
            parse_off::<f64>(&bad).unwrap_err(),
            MeshError::IndexOutOfRange { triangle: 3, index: 9, count: 4 }
        );
    }

    #[test]
    fn duplicated_vertex_in_face() {
        let bad = TETRA.replace("3 1 3 2", "3 1 1 2");
        assert!(matches!(parse_off::<f64>(&bad).unwrap_err(), MeshError::DegenerateTriangle { triangle: 3 }));
    }

    #[test]
    fn malformed_header() {
        assert!(matches!(parse_off::<f64>("PLY\n").unwrap_err(), MeshError::MalformedHeader(_)));
    }

    #[test]
    fn roundtrip_preserves_connectivity() {
        let m = parse_off::<f64>(TETRA).unwrap();
        let mut buf = Vec::new();
        write_off(&m, &mut buf).unwrap();
        let back = parse_off::<f64>(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(back.triangles(), m.triangles());
        assert_eq!(back.vertices(), m.vertices());
    }
}
