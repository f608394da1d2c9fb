//! ASCII PLY and Wavefront OBJ surface scans.

use std::fmt::Write as _;

use crate::geometry::{SurfaceMesh, Vec3};

use super::IoError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanFormat {
    Ply,
    Obj,
}

impl std::str::FromStr for ScanFormat {
    type Err = IoError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ply" => Ok(ScanFormat::Ply),
            "obj" => Ok(ScanFormat::Obj),
            other => Err(IoError::UnsupportedFormat(format!("unknown scan format {other:?}"))),
        }
    }
}

impl ScanFormat {
    /// Guesses the format from a file extension.
    pub fn from_path(path: &std::path::Path) -> Option<ScanFormat> {
        path.extension()?.to_str()?.parse().ok()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanImport {
    pub mesh: SurfaceMesh,
    /// Degenerate triangles removed during cleanup.
    pub dropped_faces: usize,
}

pub fn read_surface_scan(bytes: &[u8], format: ScanFormat) -> Result<ScanImport, IoError> {
    let (vertices, triangles) = match format {
        ScanFormat::Ply => parse_ply(bytes)?,
        ScanFormat::Obj => parse_obj(bytes)?,
    };
    // Indices were range-checked while parsing.
    let (mesh, dropped_faces) = SurfaceMesh::cleaned(vertices, triangles).map_err(|e| IoError::Parse {
        line: 0,
        message: e.to_string(),
    })?;
    Ok(ScanImport { mesh, dropped_faces })
}

fn parse_err(line: usize, message: impl Into<String>) -> IoError {
    IoError::Parse {
        line,
        message: message.into(),
    }
}

fn fan(poly: &[usize], out: &mut Vec<[usize; 3]>) {
    for k in 1..poly.len().saturating_sub(1) {
        out.push([poly[0], poly[k], poly[k + 1]]);
    }
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    /// Next non-blank line with its 1-based number.
    fn next_content(&mut self) -> Option<(usize, &'a str)> {
        for (i, line) in self.inner.by_ref() {
            self.last = i + 1;
            let trimmed = line.trim();
            if !trimmed.is_empty() {
                return Some((i + 1, trimmed));
            }
        }
        None
    }
}

struct PlyElement {
    name: String,
    count: usize,
    /// Scalar property names; `None` marks a list property.
    props: Vec<Option<String>>,
}

fn parse_ply(bytes: &[u8]) -> Result<(Vec<Vec3>, Vec<[usize; 3]>), IoError> {
    // Binary bodies are not valid UTF-8 in general, so check the header first.
    let header_end = bytes
        .windows(10)
        .position(|w| w == b"end_header")
        .ok_or_else(|| parse_err(1, "missing end_header"))?;
    let header = std::str::from_utf8(&bytes[..header_end]).map_err(|_| parse_err(1, "header is not UTF-8"))?;
    if let Some(fmt) = header.lines().find_map(|l| l.trim().strip_prefix("format ")) {
        if !fmt.trim_start().starts_with("ascii") {
            return Err(IoError::UnsupportedFormat(format!(
                "PLY format {:?} (only ascii is supported)",
                fmt.trim()
            )));
        }
    }
    let text = std::str::from_utf8(bytes).map_err(|_| parse_err(1, "file is not UTF-8"))?;
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        last: 0,
    };

    match lines.next_content() {
        Some((_, "ply")) => {}
        Some((n, _)) => return Err(parse_err(n, "expected 'ply' magic")),
        None => return Err(parse_err(1, "empty file")),
    }
    let mut elements: Vec<PlyElement> = Vec::new();
    let mut saw_format = false;
    loop {
        let (n, line) = lines
            .next_content()
            .ok_or_else(|| parse_err(lines.last + 1, "missing end_header"))?;
        let mut tok = line.split_whitespace();
        match tok.next() {
            Some("end_header") => break,
            Some("format") => saw_format = true,
            Some("comment") | Some("obj_info") => {}
            Some("element") => {
                let name = tok.next().ok_or_else(|| parse_err(n, "element without name"))?;
                let count = tok
                    .next()
                    .and_then(|c| c.parse().ok())
                    .ok_or_else(|| parse_err(n, "element count is not an integer"))?;
                elements.push(PlyElement {
                    name: name.to_string(),
                    count,
                    props: Vec::new(),
                });
            }
            Some("property") => {
                let element = elements
                    .last_mut()
                    .ok_or_else(|| parse_err(n, "property before any element"))?;
                let kind = tok.next().ok_or_else(|| parse_err(n, "property without type"))?;
                if kind == "list" {
                    element.props.push(None);
                } else {
                    let name = tok.next().ok_or_else(|| parse_err(n, "property without name"))?;
                    element.props.push(Some(name.to_string()));
                }
            }
            Some(other) => return Err(parse_err(n, format!("unknown header keyword {other:?}"))),
            None => unreachable!("blank lines are skipped"),
        }
    }
    if !saw_format {
        return Err(parse_err(lines.last, "missing format line"));
    }

    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    let mut vertex_count = None;
    for element in &elements {
        for k in 0..element.count {
            let (n, line) = lines.next_content().ok_or_else(|| {
                parse_err(
                    lines.last + 1,
                    format!(
                        "unexpected end of file: {} {} declared, {} found",
                        element.count, element.name, k
                    ),
                )
            })?;
            match element.name.as_str() {
                "vertex" => {
                    if element.props.iter().any(Option::is_none) {
                        return Err(parse_err(n, "list properties on vertices are not supported"));
                    }
                    let values: Vec<f64> = line
                        .split_whitespace()
                        .map(|t| {
                            t.parse::<f64>()
                                .map_err(|_| parse_err(n, format!("invalid number {t:?}")))
                        })
                        .collect::<Result<_, _>>()?;
                    if values.len() != element.props.len() {
                        return Err(parse_err(
                            n,
                            format!("expected {} vertex values, found {}", element.props.len(), values.len()),
                        ));
                    }
                    let get = |axis: &str| {
                        element
                            .props
                            .iter()
                            .position(|p| p.as_deref() == Some(axis))
                            .map(|i| values[i])
                            .ok_or_else(|| parse_err(n, format!("vertex has no {axis} property")))
                    };
                    vertices.push(Vec3::new(get("x")?, get("y")?, get("z")?));
                }
                "face" => {
                    let nv = *vertex_count.get_or_insert(vertices.len());
                    let mut tok = line.split_whitespace();
                    let count: usize = tok
                        .next()
                        .and_then(|c| c.parse().ok())
                        .ok_or_else(|| parse_err(n, "face vertex count is not an integer"))?;
                    let idx: Vec<usize> = tok
                        .by_ref()
                        .take(count)
                        .map(|t| {
                            t.parse::<usize>()
                                .map_err(|_| parse_err(n, format!("invalid index {t:?}")))
                        })
                        .collect::<Result<_, _>>()?;
                    if idx.len() != count {
                        return Err(parse_err(
                            n,
                            format!("face declares {count} indices, found {}", idx.len()),
                        ));
                    }
                    if count < 3 {
                        return Err(parse_err(n, "face has fewer than 3 vertices"));
                    }
                    if let Some(&bad) = idx.iter().find(|&&i| i >= nv) {
                        return Err(parse_err(n, format!("vertex index {bad} out of range ({nv} vertices)")));
                    }
                    fan(&idx, &mut triangles);
                }
                _ => {}
            }
        }
    }
    Ok((vertices, triangles))
}

fn parse_obj(bytes: &[u8]) -> Result<(Vec<Vec3>, Vec<[usize; 3]>), IoError> {
    let text = std::str::from_utf8(bytes).map_err(|_| parse_err(1, "file is not UTF-8"))?;
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let n = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        let mut tok = line.split_whitespace();
        match tok.next() {
            Some("v") => {
                let coords: Vec<f64> = tok
                    .take(3)
                    .map(|t| {
                        t.parse::<f64>()
                            .map_err(|_| parse_err(n, format!("invalid number {t:?}")))
                    })
                    .collect::<Result<_, _>>()?;
                if coords.len() != 3 {
                    return Err(parse_err(n, "vertex needs 3 coordinates"));
                }
                vertices.push(Vec3::new(coords[0], coords[1], coords[2]));
            }
            Some("f") => {
                let nv = vertices.len() as i64;
                let idx: Vec<usize> = tok
                    .map(|t| {
                        let first = t.split('/').next().unwrap_or("");
                        let k: i64 = first
                            .parse()
                            .map_err(|_| parse_err(n, format!("invalid face index {t:?}")))?;
                        let resolved = if k < 0 { nv + k } else { k - 1 };
                        if k == 0 || resolved < 0 || resolved >= nv {
                            return Err(parse_err(n, format!("face index {k} out of range ({nv} vertices)")));
                        }
                        Ok(resolved as usize)
                    })
                    .collect::<Result<_, _>>()?;
                if idx.len() < 3 {
                    return Err(parse_err(n, "face has fewer than 3 vertices"));
                }
                fan(&idx, &mut triangles);
            }
            _ => {}
        }
    }
    Ok((vertices, triangles))
}

/// ASCII PLY with `x y z` doubles and triangle faces.
pub fn write_ply(mesh: &SurfaceMesh) -> String {
    let mut out = String::new();
    out.push_str("ply\nformat ascii 1.0\ncomment roomfem surface scan\n");
    let _ = writeln!(out, "element vertex {}", mesh.vertices().len());
    out.push_str("property double x\nproperty double y\nproperty double z\n");
    let _ = writeln!(out, "element face {}", mesh.triangles().len());
    out.push_str("property list uchar int vertex_indices\nend_header\n");
    for v in mesh.vertices() {
        let _ = writeln!(out, "{:?} {:?} {:?}", v.x, v.y, v.z);
    }
    for [a, b, c] in mesh.triangles() {
        let _ = writeln!(out, "3 {a} {b} {c}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const TRI_PLY: &str = "ply\nformat ascii 1.0\nelement vertex 3\nproperty float x\nproperty float y\nproperty float z\nelement face 1\nproperty list uchar int vertex_indices\nend_header\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n";

    #[test]
    fn minimal_ply() {
        let scan = read_surface_scan(TRI_PLY.as_bytes(), ScanFormat::Ply).unwrap();
        assert_eq!(scan.mesh.triangles(), &[[0, 1, 2]]);
        assert_eq!(scan.dropped_faces, 0);
    }

    #[test]
    fn ply_with_extra_properties_and_quads() {
        let ply = "ply\nformat ascii 1.0\ncomment hi\nelement vertex 4\nproperty float x\nproperty float y\nproperty float z\nproperty uchar red\nelement face 1\nproperty list uchar int vertex_indices\nend_header\n0 0 0 1\n1 0 0 1\n1 1 0 1\n0 1 0 1\n4 0 1 2 3\n";
        let scan = read_surface_scan(ply.as_bytes(), ScanFormat::Ply).unwrap();
        assert_eq!(scan.mesh.triangles(), &[[0, 1, 2], [0, 2, 3]]);
    }

    #[test]
    fn ply_missing_vertex_names_line() {
        let ply = TRI_PLY.replace("element vertex 3", "element vertex 4");
        match read_surface_scan(ply.as_bytes(), ScanFormat::Ply) {
            Err(IoError::Parse { line, message }) => {
                assert_eq!(line, 13, "{message}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn ply_truncated_reports_end_of_file() {
        let ply = "ply\nformat ascii 1.0\nelement vertex 2\nproperty float x\nproperty float y\nproperty float z\nend_header\n0 0 0\n";
        let err = read_surface_scan(ply.as_bytes(), ScanFormat::Ply).unwrap_err();
        assert!(matches!(err, IoError::Parse { line: 9, .. }), "{err:?}");
    }

    #[test]
    fn binary_ply_is_unsupported() {
        let mut bytes = b"ply\nformat binary_little_endian 1.0\nelement vertex 0\nend_header\n".to_vec();
        bytes.extend([0xff, 0xfe, 0x00]);
        assert!(matches!(
            read_surface_scan(&bytes, ScanFormat::Ply),
            Err(IoError::UnsupportedFormat(_))
        ));
    }

    #[test]
    fn ply_face_index_out_of_range() {
        let ply = TRI_PLY.replace("3 0 1 2", "3 0 1 7");
        assert!(matches!(
            read_surface_scan(ply.as_bytes(), ScanFormat::Ply),
            Err(IoError::Parse { line: 13, .. })
        ));
    }

    #[test]
    fn obj_quad_fan_split() {
        let obj = "# quad\nv 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nvn 0 0 1\nf 1//1 2//1 3//1 4//1\n";
        let scan = read_surface_scan(obj.as_bytes(), ScanFormat::Obj).unwrap();
        assert_eq!(scan.mesh.triangles(), &[[0, 1, 2], [0, 2, 3]]);
    }

    #[test]
    fn obj_negative_indices_and_degenerate_drop() {
        let obj = "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 2 0 0\nf -4 -3 -2\nf 1 2 4\n";
        let scan = read_surface_scan(obj.as_bytes(), ScanFormat::Obj).unwrap();
        assert_eq!(scan.mesh.triangles(), &[[0, 1, 2]]);
        assert_eq!(scan.dropped_faces, 1);
    }

    #[test]
    fn obj_bad_index() {
        let obj = "v 0 0 0\nv 1 0 0\nf 1 2 3\n";
        assert!(matches!(
            read_surface_scan(obj.as_bytes(), ScanFormat::Obj),
            Err(IoError::Parse { line: 3, .. })
        ));
    }

    #[test]
    fn ply_writer_reads_back() {
        let scan = read_surface_scan(TRI_PLY.as_bytes(), ScanFormat::Ply).unwrap();
        let text = write_ply(&scan.mesh);
        assert_eq!(read_surface_scan(text.as_bytes(), ScanFormat::Ply).unwrap(), scan);
    }

    #[test]
    fn format_from_extension() {
        assert_eq!(ScanFormat::from_path("a/b.PLY".as_ref()), Some(ScanFormat::Ply));
        assert_eq!(ScanFormat::from_path("scan.obj".as_ref()), Some(ScanFormat::Obj));
        assert_eq!(ScanFormat::from_path("scan.stl".as_ref()), None);
    }
}
