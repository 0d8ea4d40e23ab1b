//! Mesh file formats: ASCII OBJ (v/f records), binary STL, and the internal
//! binary format. OBJ and STL loads recenter the mesh so the bounding-box
//! center sits at the origin; internal-binary files are written from already
//! centered meshes and load verbatim, which keeps save/load round trips
//! digest-stable.

use super::{MeshError, TriMesh, INTERNAL_MAGIC, INTERNAL_VERSION};
use glam::DVec3;
use std::io::Read;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Obj,
    Stl,
    InternalBinary,
}

impl MeshFormat {
    /// Guess from the file extension (`.obj`, `.stl`, `.qdgm`).
    pub fn from_path(path: &Path) -> Option<MeshFormat> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "obj" => Some(MeshFormat::Obj),
            "stl" => Some(MeshFormat::Stl),
            "qdgm" => Some(MeshFormat::InternalBinary),
            _ => None,
        }
    }
}

/// Load a mesh in the named format. Degenerate triangles are dropped and
/// counted on the returned mesh.
pub fn load_mesh(path: &Path, format: MeshFormat) -> Result<TriMesh, MeshError> {
    let bytes = std::fs::read(path).map_err(|source| MeshError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    match format {
        MeshFormat::Obj => {
            let text = String::from_utf8(bytes).map_err(|e| MeshError::Parse {
                path: path.to_path_buf(),
                line: 0,
                message: format!("not valid UTF-8: {e}"),
            })?;
            let mesh = parse_obj(&text, path)?;
            Ok(recentered(mesh))
        }
        MeshFormat::Stl => {
            let mesh = parse_binary_stl(&bytes, path)?;
            Ok(recentered(mesh))
        }
        MeshFormat::InternalBinary => parse_internal(&bytes, path),
    }
}

/// Load with the format inferred from the extension.
pub fn load_mesh_auto(path: &Path) -> Result<TriMesh, MeshError> {
    let format = MeshFormat::from_path(path).ok_or_else(|| MeshError::Parse {
        path: path.to_path_buf(),
        line: 0,
        message: "unrecognized mesh extension (expected .obj, .stl, or .qdgm)".into(),
    })?;
    load_mesh(path, format)
}

fn recentered(mesh: TriMesh) -> TriMesh {
    let c = mesh.aabb().center();
    if c == DVec3::ZERO {
        mesh
    } else {
        mesh.translated(-c)
    }
}

fn parse_obj(text: &str, path: &Path) -> Result<TriMesh, MeshError> {
    let mut vertices: Vec<DVec3> = Vec::new();
    let mut triangles: Vec<[u32; 3]> = Vec::new();
    let err = |line: usize, message: String| MeshError::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        let mut fields = line.split_whitespace();
        match fields.next() {
            Some("v") => {
                let mut coords = [0.0f64; 3];
                for c in &mut coords {
                    let f = fields
                        .next()
                        .ok_or_else(|| err(line_no, "vertex needs 3 coordinates".into()))?;
                    *c = f
                        .parse()
                        .map_err(|e| err(line_no, format!("bad coordinate {f:?}: {e}")))?;
                }
                vertices.push(DVec3::from_array(coords));
            }
            Some("f") => {
                let mut indices = Vec::new();
                for field in fields {
                    let lead = field.split('/').next().unwrap_or(field);
                    let idx: i64 = lead
                        .parse()
                        .map_err(|e| err(line_no, format!("bad face index {field:?}: {e}")))?;
                    if idx < 1 {
                        return Err(err(
                            line_no,
                            format!("face index {idx} out of range (1-based indices required)"),
                        ));
                    }
                    indices.push((idx - 1) as u32);
                }
                if indices.len() < 3 {
                    return Err(err(line_no, "face needs at least 3 vertices".into()));
                }
                for k in 1..indices.len() - 1 {
                    triangles.push([indices[0], indices[k], indices[k + 1]]);
                }
            }
            _ => {} // comments, normals, groups: ignored
        }
    }
    if triangles.is_empty() {
        return Err(err(0, "no faces found".into()));
    }
    TriMesh::new(vertices, triangles)
}

fn parse_binary_stl(bytes: &[u8], path: &Path) -> Result<TriMesh, MeshError> {
    let err = |message: String| MeshError::Parse {
        path: path.to_path_buf(),
        line: 0,
        message,
    };
    if bytes.len() >= 6 && bytes.starts_with(b"solid ") && bytes.windows(5).take(512).any(|w| w == b"facet") {
        return Err(err("ASCII STL is not supported; export binary STL".into()));
    }
    if bytes.len() < 84 {
        return Err(err(format!("truncated STL header ({} bytes)", bytes.len())));
    }
    let count = u32::from_le_bytes(bytes[80..84].try_into().unwrap()) as usize;
    let expected = 84 + count * 50;
    if bytes.len() < expected {
        return Err(err(format!(
            "truncated STL body: {} bytes for {count} triangles (need {expected})"
        , bytes.len())));
    }
    let mut vertices = Vec::with_capacity(count * 3);
    let mut triangles = Vec::with_capacity(count);
    for t in 0..count {
        let base = 84 + t * 50 + 12; // skip the stored normal
        let mut idx = [0u32; 3];
        for (v, slot) in idx.iter_mut().enumerate() {
            let off = base + v * 12;
            let x = f32::from_le_bytes(bytes[off..off + 4].try_into().unwrap()) as f64;
            let y = f32::from_le_bytes(bytes[off + 4..off + 8].try_into().unwrap()) as f64;
            let z = f32::from_le_bytes(bytes[off + 8..off + 12].try_into().unwrap()) as f64;
            *slot = vertices.len() as u32;
            vertices.push(DVec3::new(x, y, z));
        }
        triangles.push(idx);
    }
    TriMesh::new(vertices, triangles)
}

fn parse_internal(bytes: &[u8], path: &Path) -> Result<TriMesh, MeshError> {
    let err = |message: String| MeshError::Parse {
        path: path.to_path_buf(),
        line: 0,
        message,
    };
    let mut cursor = std::io::Cursor::new(bytes);
    let mut magic = [0u8; 4];
    cursor
        .read_exact(&mut magic)
        .map_err(|_| err("file too short for magic".into()))?;
    if &magic != INTERNAL_MAGIC {
        return Err(err(format!("bad magic {magic:?}, expected {INTERNAL_MAGIC:?}")));
    }
    let mut u32buf = [0u8; 4];
    cursor
        .read_exact(&mut u32buf)
        .map_err(|_| err("file too short for version".into()))?;
    let version = u32::from_le_bytes(u32buf);
    if version != INTERNAL_VERSION {
        return Err(err(format!(
            "unsupported version {version} (supported: {INTERNAL_VERSION})"
        )));
    }
    let mut u64buf = [0u8; 8];
    cursor
        .read_exact(&mut u64buf)
        .map_err(|_| err("file too short for vertex count".into()))?;
    let vcount = u64::from_le_bytes(u64buf) as usize;
    let mut vertices = Vec::with_capacity(vcount);
    let mut f64buf = [0u8; 8];
    for i in 0..vcount {
        let mut coords = [0.0f64; 3];
        for c in &mut coords {
            cursor
                .read_exact(&mut f64buf)
                .map_err(|_| err(format!("truncated at vertex {i}")))?;
            *c = f64::from_le_bytes(f64buf);
        }
        vertices.push(DVec3::from_array(coords));
    }
    cursor
        .read_exact(&mut u64buf)
        .map_err(|_| err("file too short for triangle count".into()))?;
    let tcount = u64::from_le_bytes(u64buf) as usize;
    let mut triangles = Vec::with_capacity(tcount);
    for i in 0..tcount {
        let mut tri = [0u32; 3];
        for v in &mut tri {
            cursor
                .read_exact(&mut u32buf)
                .map_err(|_| err(format!("truncated at triangle {i}")))?;
            *v = u32::from_le_bytes(u32buf);
        }
        triangles.push(tri);
    }
    TriMesh::new(vertices, triangles)
}

pub fn save_internal_binary(mesh: &TriMesh, path: &Path) -> Result<(), MeshError> {
    let bytes = super::internal_binary_bytes(mesh.vertices(), mesh.triangles());
    std::fs::write(path, bytes).map_err(|source| MeshError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn save_obj(mesh: &TriMesh, path: &Path) -> Result<(), MeshError> {
    let mut out = String::new();
    for v in mesh.vertices() {
        out.push_str(&format!("v {} {} {}\n", v.x, v.y, v.z));
    }
    for t in mesh.triangles() {
        out.push_str(&format!("f {} {} {}\n", t[0] + 1, t[1] + 1, t[2] + 1));
    }
    std::fs::write(path, out).map_err(|source| MeshError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Binary STL. Coordinates are stored as f32, so this is lossy for meshes
/// whose coordinates are not f32-representable.
pub fn save_stl(mesh: &TriMesh, path: &Path) -> Result<(), MeshError> {
    let mut bytes = vec![0u8; 80];
    bytes.extend_from_slice(&(mesh.triangle_count() as u32).to_le_bytes());
    for i in 0..mesh.triangle_count() {
        let n = mesh.triangle_normal(i);
        for c in [n.x, n.y, n.z] {
            bytes.extend_from_slice(&(c as f32).to_le_bytes());
        }
        for p in mesh.triangle_points(i) {
            for c in [p.x, p.y, p.z] {
                bytes.extend_from_slice(&(c as f32).to_le_bytes());
            }
        }
        bytes.extend_from_slice(&0u16.to_le_bytes());
    }
    std::fs::write(path, bytes).map_err(|source| MeshError::Io {
        path: path.to_path_buf(),
        source,
    })
}
