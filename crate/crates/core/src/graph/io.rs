//! Graph persistence: the `pillow-graph-v1` JSON schema and the `PLG1`
//! binary cache.
//!
//! `PLG1` layout, all fields little-endian `u32`:
//! magic `b"PLG1"`, level, alphabet size (10 or 9), policy (1 on, 0 off),
//! vertex count, edge count, then `(u, v, kind)` per edge with kind
//! 0 = H, 1 = V, 2 = S. Edges appear in sorted order so the bytes depend
//! only on the graph.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{CentralEdgePolicy, Edge, EdgeType, ReplacementGraph};
use crate::error::{Error, Result};
use crate::rule::Alphabet;

pub const SCHEMA: &str = "pillow-graph-v1";
pub const BINARY_MAGIC: &[u8; 4] = b"PLG1";

#[derive(Serialize, Deserialize)]
struct GraphFile {
    schema: String,
    level: u32,
    policy: String,
    #[serde(default)]
    alphabet: Option<String>,
    vertices: Vec<String>,
    edges: Vec<(u32, u32, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    config: Option<Value>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum GraphFormat {
    Json,
    Binary,
}

pub fn write_json<W: Write>(g: &ReplacementGraph, config: Option<&Value>, out: W) -> Result<()> {
    let file = GraphFile {
        schema: SCHEMA.to_string(),
        level: g.level(),
        policy: g.policy().name().to_string(),
        alphabet: Some(g.alphabet().name().to_string()),
        vertices: (0..g.vertex_count()).map(|u| g.word(u).to_string()).collect(),
        edges: g
            .edges()
            .iter()
            .map(|e| (e.u, e.v, e.kind.code().to_string()))
            .collect(),
        config: config.cloned(),
    };
    serde_json::to_writer(out, &file).map_err(|e| Error::Format(e.to_string()))
}

pub fn read_json<R: Read>(input: R) -> Result<ReplacementGraph> {
    let file: GraphFile =
        serde_json::from_reader(input).map_err(|e| Error::Format(e.to_string()))?;
    if file.schema != SCHEMA {
        return Err(Error::Format(format!("unsupported schema {:?}", file.schema)));
    }
    let alphabet = match file.alphabet.as_deref() {
        None => Alphabet::Pillow,
        Some(name) => Alphabet::from_name(name)
            .ok_or_else(|| Error::Format(format!("unknown alphabet {name:?}")))?,
    };
    let policy: CentralEdgePolicy = file.policy.parse()?;
    let edges = file
        .edges
        .iter()
        .map(|(u, v, k)| {
            let kind = EdgeType::from_code(k)
                .ok_or_else(|| Error::Format(format!("unknown edge type {k:?}")))?;
            Ok(Edge { u: *u, v: *v, kind })
        })
        .collect::<Result<Vec<_>>>()?;
    let g = ReplacementGraph::from_edges(file.level, alphabet, policy, edges)?;
    if file.vertices.len() != g.vertex_count() {
        return Err(Error::Format(format!(
            "expected {} vertices, file lists {}",
            g.vertex_count(),
            file.vertices.len()
        )));
    }
    for (u, name) in file.vertices.iter().enumerate() {
        if *name != g.word(u).to_string() {
            return Err(Error::Format(format!(
                "vertex {u} is {name:?}, expected {}",
                g.word(u)
            )));
        }
    }
    Ok(g)
}

pub fn write_binary<W: Write>(g: &ReplacementGraph, mut out: W) -> std::io::Result<()> {
    out.write_all(BINARY_MAGIC)?;
    let header = [
        g.level(),
        g.alphabet().size() as u32,
        u32::from(g.policy() == CentralEdgePolicy::On),
        g.vertex_count() as u32,
        g.edge_count() as u32,
    ];
    for h in header {
        out.write_all(&h.to_le_bytes())?;
    }
    for e in g.edges() {
        let kind: u32 = match e.kind {
            EdgeType::Horizontal => 0,
            EdgeType::Vertical => 1,
            EdgeType::Seam => 2,
        };
        for x in [e.u, e.v, kind] {
            out.write_all(&x.to_le_bytes())?;
        }
    }
    out.flush()
}

fn read_u32<R: Read>(input: &mut R) -> Result<u32> {
    let mut buf = [0u8; 4];
    input
        .read_exact(&mut buf)
        .map_err(|e| Error::Format(format!("truncated PLG1 data: {e}")))?;
    Ok(u32::from_le_bytes(buf))
}

pub fn read_binary<R: Read>(mut input: R) -> Result<ReplacementGraph> {
    let mut magic = [0u8; 4];
    input
        .read_exact(&mut magic)
        .map_err(|e| Error::Format(format!("truncated PLG1 data: {e}")))?;
    if &magic != BINARY_MAGIC {
        return Err(Error::Format("missing PLG1 magic".into()));
    }
    let level = read_u32(&mut input)?;
    let alphabet = match read_u32(&mut input)? {
        10 => Alphabet::Pillow,
        9 => Alphabet::Grid,
        other => return Err(Error::Format(format!("bad alphabet size {other}"))),
    };
    let policy = match read_u32(&mut input)? {
        1 => CentralEdgePolicy::On,
        0 => CentralEdgePolicy::Off,
        other => return Err(Error::Format(format!("bad policy flag {other}"))),
    };
    let vertices = read_u32(&mut input)? as usize;
    let edge_count = read_u32(&mut input)? as usize;
    let mut edges = Vec::with_capacity(edge_count.min(1 << 24));
    for _ in 0..edge_count {
        let u = read_u32(&mut input)?;
        let v = read_u32(&mut input)?;
        let kind = match read_u32(&mut input)? {
            0 => EdgeType::Horizontal,
            1 => EdgeType::Vertical,
            2 => EdgeType::Seam,
            other => return Err(Error::Format(format!("bad edge kind {other}"))),
        };
        edges.push(Edge { u, v, kind });
    }
    let g = ReplacementGraph::from_edges(level, alphabet, policy, edges)?;
    if g.vertex_count() != vertices {
        return Err(Error::Format(format!(
            "header says {vertices} vertices, level {level} has {}",
            g.vertex_count()
        )));
    }
    Ok(g)
}

pub fn save(g: &ReplacementGraph, path: &Path, format: GraphFormat, config: Option<&Value>) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    match format {
        GraphFormat::Json => write_json(g, config, &mut out)?,
        GraphFormat::Binary => write_binary(g, &mut out).map_err(|e| Error::io(path, e))?,
    }
    out.flush().map_err(|e| Error::io(path, e))
}

/// Loads either format, detected by the leading magic bytes.
pub fn load(path: &Path) -> Result<ReplacementGraph> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.starts_with(BINARY_MAGIC) {
        read_binary(BufReader::new(bytes.as_slice()))
    } else {
        read_json(bytes.as_slice())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let g = ReplacementGraph::build(2, CentralEdgePolicy::Off).unwrap();
        let mut buf = Vec::new();
        write_json(&g, None, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(r#"{"schema":"pillow-graph-v1","level":2,"policy":"off""#));
        let back = read_json(buf.as_slice()).unwrap();
        assert_eq!(back.edges(), g.edges());
        assert_eq!(back.policy(), CentralEdgePolicy::Off);
    }

    #[test]
    fn binary_layout() {
        let g = ReplacementGraph::build(1, CentralEdgePolicy::On).unwrap();
        let mut buf = Vec::new();
        write_binary(&g, &mut buf).unwrap();
        assert_eq!(&buf[..4], b"PLG1");
        assert_eq!(buf.len(), 4 + 5 * 4 + 17 * 12);
        assert_eq!(u32::from_le_bytes(buf[20..24].try_into().unwrap()), 17);
        let back = read_binary(buf.as_slice()).unwrap();
        assert_eq!(back.edges(), g.edges());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(read_binary(&b"PLG2"[..]).is_err());
        assert!(read_binary(&b"PLG1\x01\x00"[..]).is_err());
        let bad = r#"{"schema":"pillow-graph-v1","level":1,"policy":"on","vertices":["0"],"edges":[]}"#;
        assert!(read_json(bad.as_bytes()).is_err());
    }
}
