//! Reader for Gmsh MSH 2.2 ASCII files, triangles only.

use thiserror::Error;

use crate::complex::{build_complex, MeshError, SimplicialComplex2};
use crate::geometry::Vec2;

#[derive(Debug, Error)]
pub enum GmshError {
    #[error("unsupported MSH version '{0}', expected 2.2 ASCII")]
    UnsupportedVersion(String),
    #[error("malformed {section} section: {detail}")]
    MalformedSection {
        section: &'static str,
        detail: String,
    },
    #[error("mesh is not planar: node {0} has z = {1}")]
    NonPlanarMesh(usize, f64),
    #[error("file contains no triangle elements")]
    NoTriangles,
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

/// Parse MSH 2.2 ASCII content, keeping only 3-node triangles (type 2).
/// Node ids are remapped to dense 0-based indices in order of appearance.
pub fn import_gmsh(text: &str) -> Result<SimplicialComplex2, GmshError> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());

    let mut nodes: Vec<(usize, Vec2)> = Vec::new();
    let mut triangles: Vec<[usize; 3]> = Vec::new();
    let mut saw_format = false;

    while let Some(line) = lines.next() {
        match line {
            "$MeshFormat" => {
                let header = lines.next().ok_or(GmshError::MalformedSection {
                    section: "MeshFormat",
                    detail: "missing version line".into(),
                })?;
                let mut parts = header.split_whitespace();
                let version = parts.next().unwrap_or("");
                let file_type = parts.next().unwrap_or("");
                if !version.starts_with("2.2") || file_type != "0" {
                    return Err(GmshError::UnsupportedVersion(header.to_string()));
                }
                expect_closing(&mut lines, "$EndMeshFormat", "MeshFormat")?;
                saw_format = true;
            }
            "$Nodes" => {
                let count: usize = parse_count(&mut lines, "Nodes")?;
                for _ in 0..count {
                    let line = lines.next().ok_or(GmshError::MalformedSection {
                        section: "Nodes",
                        detail: "unexpected end of node list".into(),
                    })?;
                    let mut parts = line.split_whitespace();
                    let id: usize = parse_field(parts.next(), "Nodes", "node id")?;
                    let x: f64 = parse_field(parts.next(), "Nodes", "x")?;
                    let y: f64 = parse_field(parts.next(), "Nodes", "y")?;
                    let z: f64 = parse_field(parts.next(), "Nodes", "z")?;
                    if z.abs() > 1e-9 {
                        return Err(GmshError::NonPlanarMesh(id, z));
                    }
                    nodes.push((id, Vec2::new(x, y)));
                }
                expect_closing(&mut lines, "$EndNodes", "Nodes")?;
            }
            "$Elements" => {
                let count: usize = parse_count(&mut lines, "Elements")?;
                for _ in 0..count {
                    let line = lines.next().ok_or(GmshError::MalformedSection {
                        section: "Elements",
                        detail: "unexpected end of element list".into(),
                    })?;
                    let fields: Vec<&str> = line.split_whitespace().collect();
                    if fields.len() < 3 {
                        return Err(GmshError::MalformedSection {
                            section: "Elements",
                            detail: format!("short element line '{line}'"),
                        });
                    }
                    let etype: usize = parse_field(Some(fields[1]), "Elements", "element type")?;
                    if etype != 2 {
                        continue;
                    }
                    let ntags: usize = parse_field(Some(fields[2]), "Elements", "tag count")?;
                    let need = 3 + ntags + 3;
                    if fields.len() < need {
                        return Err(GmshError::MalformedSection {
                            section: "Elements",
                            detail: format!("triangle line has {} fields, need {need}", fields.len()),
                        });
                    }
                    let mut tri = [0usize; 3];
                    for (k, slot) in tri.iter_mut().enumerate() {
                        *slot = parse_field(Some(fields[3 + ntags + k]), "Elements", "node id")?;
                    }
                    triangles.push(tri);
                }
                expect_closing(&mut lines, "$EndElements", "Elements")?;
            }
            other if other.starts_with('$') && !other.starts_with("$End") => {
                // skip unknown sections ($PhysicalNames, ...)
                let closing = format!("$End{}", &other[1..]);
                for l in lines.by_ref() {
                    if l == closing {
                        break;
                    }
                }
            }
            _ => {}
        }
    }

    if !saw_format {
        return Err(GmshError::UnsupportedVersion("missing $MeshFormat".into()));
    }
    if triangles.is_empty() {
        return Err(GmshError::NoTriangles);
    }

    // remap 1-based (possibly sparse) node ids to dense 0-based indices
    let mut id_map = std::collections::HashMap::new();
    let mut coords = Vec::with_capacity(nodes.len());
    for (id, p) in &nodes {
        id_map.insert(*id, coords.len());
        coords.push(*p);
    }
    let mut tris = Vec::with_capacity(triangles.len());
    for tri in &triangles {
        let mut t = [0usize; 3];
        for (k, id) in tri.iter().enumerate() {
            t[k] = *id_map.get(id).ok_or(GmshError::MalformedSection {
                section: "Elements",
                detail: format!("triangle references unknown node {id}"),
            })?;
        }
        tris.push(t);
    }
    Ok(build_complex(coords, &tris)?)
}

fn parse_count<'a>(
    lines: &mut impl Iterator<Item = &'a str>,
    section: &'static str,
) -> Result<usize, GmshError> {
    let line = lines.next().ok_or(GmshError::MalformedSection {
        section,
        detail: "missing count line".into(),
    })?;
    line.trim().parse().map_err(|e| GmshError::MalformedSection {
        section,
        detail: format!("bad count '{line}': {e}"),
    })
}

fn parse_field<T: std::str::FromStr>(
    field: Option<&str>,
    section: &'static str,
    what: &str,
) -> Result<T, GmshError>
where
    T::Err: std::fmt::Display,
{
    let f = field.ok_or(GmshError::MalformedSection {
        section,
        detail: format!("missing {what}"),
    })?;
    f.parse().map_err(|e| GmshError::MalformedSection {
        section,
        detail: format!("bad {what} '{f}': {e}"),
    })
}

fn expect_closing<'a>(
    lines: &mut impl Iterator<Item = &'a str>,
    closing: &str,
    section: &'static str,
) -> Result<(), GmshError> {
    match lines.next() {
        Some(l) if l == closing => Ok(()),
        other => Err(GmshError::MalformedSection {
            section,
            detail: format!("expected {closing}, got {other:?}"),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_TRIANGLES: &str = "\
$MeshFormat
2.2 0 8
$EndMeshFormat
$Nodes
4
1 0 0 0
2 1 0 0
3 1 1 0
4 0 1 0
$EndNodes
$Elements
3
1 1 2 0 1 1 2
2 2 2 0 1 1 2 3
3 2 2 0 1 1 3 4
$EndElements
";

    #[test]
    fn parses_two_triangle_fixture() {
        let cx = import_gmsh(TWO_TRIANGLES).unwrap();
        assert_eq!(cx.num_vertices(), 4);
        assert_eq!(cx.num_triangles(), 2);
        assert_eq!(cx.num_edges(), 5);
    }

    #[test]
    fn line_elements_only_is_an_error() {
        let text = TWO_TRIANGLES
            .replace("1 1 2 0 1 1 2\n2 2 2 0 1 1 2 3\n3 2 2 0 1 1 3 4", "1 1 2 0 1 1 2")
            .replace("$Elements\n3", "$Elements\n1");
        assert!(matches!(import_gmsh(&text), Err(GmshError::NoTriangles)));
    }

    #[test]
    fn out_of_order_nodes_remap_identically() {
        let shuffled = "\
$MeshFormat
2.2 0 8
$EndMeshFormat
$Nodes
4
7 0 0 0
9 1 0 0
3 1 1 0
5 0 1 0
$EndNodes
$Elements
2
1 2 0 7 9 3
2 2 0 7 3 5
$EndElements
";
        let a = import_gmsh(TWO_TRIANGLES).unwrap();
        let b = import_gmsh(shuffled).unwrap();
        assert_eq!(a.triangles, b.triangles);
        for (p, q) in a.vertex_coords.iter().zip(&b.vertex_coords) {
            assert_eq!(p, q);
        }
    }

    #[test]
    fn wrong_version_rejected() {
        let text = TWO_TRIANGLES.replace("2.2 0 8", "4.1 0 8");
        assert!(matches!(import_gmsh(&text), Err(GmshError::UnsupportedVersion(_))));
    }

    #[test]
    fn nonplanar_rejected() {
        let text = TWO_TRIANGLES.replace("1 0 0 0", "1 0 0 0.5");
        assert!(matches!(import_gmsh(&text), Err(GmshError::NonPlanarMesh(1, _))));
    }
}
