//! Single-file binary snapshots.
//!
//! ```text
//! offset  size  field
//! 0       4     magic "SKG\x01"
//! 4       4     format version, u32 LE
//! 8       8     payload length in bytes, u64 LE
//! 16      32    SHA-256 of the payload
//! 48      ...   payload
//! ```
//!
//! The payload holds the id high-water marks, the declared indexes, then
//! length-prefixed node records followed by edge records, all in ascending
//! id order. See `docs/snapshot-format.md` for the record layout.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use sha2::{Digest, Sha256};

use super::{Edge, EdgeId, Node, NodeId, PropertyGraph};
use crate::value::{Props, Value};
use crate::Error;

pub const SNAPSHOT_MAGIC: [u8; 4] = *b"SKG\x01";
pub const SNAPSHOT_VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 + 8 + 32;

const TAG_NULL: u8 = 0;
const TAG_BOOL: u8 = 1;
const TAG_INT: u8 = 2;
const TAG_FLOAT: u8 = 3;
const TAG_TEXT: u8 = 4;
const TAG_LIST: u8 = 5;

/// Writes `graph` to `path`, replacing any existing file.
pub fn persist(graph: &PropertyGraph, path: &Path) -> Result<(), Error> {
    let bytes = encode(graph);
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(&bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Reads a snapshot written by [`persist`].
pub fn load(path: &Path) -> Result<PropertyGraph, Error> {
    let bytes = fs::read(path)?;
    decode(&bytes)
}

pub fn encode(graph: &PropertyGraph) -> Vec<u8> {
    let mut p = Vec::new();
    let (next_node, next_edge) = graph.next_ids();
    put_u64(&mut p, next_node);
    put_u64(&mut p, next_edge);
    let indexes: Vec<_> = graph.declared_indexes().collect();
    put_u32(&mut p, indexes.len() as u32);
    for (label, prop) in indexes {
        put_str(&mut p, label);
        put_str(&mut p, prop);
    }
    put_u64(&mut p, graph.node_count() as u64);
    for node in graph.nodes() {
        let mut rec = Vec::new();
        put_u64(&mut rec, node.id.0);
        put_u32(&mut rec, node.labels.len() as u32);
        for l in &node.labels {
            put_str(&mut rec, l);
        }
        put_props(&mut rec, &node.props);
        put_u32(&mut p, rec.len() as u32);
        p.extend_from_slice(&rec);
    }
    put_u64(&mut p, graph.edge_count() as u64);
    for edge in graph.edges() {
        let mut rec = Vec::new();
        put_u64(&mut rec, edge.id.0);
        put_u64(&mut rec, edge.src.0);
        put_u64(&mut rec, edge.dst.0);
        put_str(&mut rec, &edge.rel_type);
        put_props(&mut rec, &edge.props);
        put_u32(&mut p, rec.len() as u32);
        p.extend_from_slice(&rec);
    }

    let mut out = Vec::with_capacity(HEADER_LEN + p.len());
    out.extend_from_slice(&SNAPSHOT_MAGIC);
    put_u32(&mut out, SNAPSHOT_VERSION);
    put_u64(&mut out, p.len() as u64);
    out.extend_from_slice(&Sha256::digest(&p));
    out.extend_from_slice(&p);
    out
}

pub fn decode(bytes: &[u8]) -> Result<PropertyGraph, Error> {
    if bytes.len() < HEADER_LEN {
        return Err(corrupt("file shorter than header"));
    }
    if bytes[0..4] != SNAPSHOT_MAGIC {
        return Err(corrupt("bad magic"));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != SNAPSHOT_VERSION {
        return Err(corrupt(format!("unsupported version {version}")));
    }
    let len = u64::from_le_bytes(bytes[8..16].try_into().unwrap()) as usize;
    let payload = &bytes[HEADER_LEN..];
    if payload.len() != len {
        return Err(corrupt(format!(
            "payload length {} does not match header {len}",
            payload.len()
        )));
    }
    if Sha256::digest(payload).as_slice() != &bytes[16..48] {
        return Err(corrupt("checksum mismatch"));
    }

    let mut r = Reader { buf: payload, pos: 0 };
    let next_node = r.u64()?;
    let next_edge = r.u64()?;
    let n_indexes = r.u32()?;
    let mut indexes = Vec::new();
    for _ in 0..n_indexes {
        indexes.push((r.string()?, r.string()?));
    }
    let n_nodes = r.u64()?;
    let mut nodes = Vec::new();
    for _ in 0..n_nodes {
        let rec_len = r.u32()? as usize;
        let mut rec = Reader {
            buf: r.take(rec_len)?,
            pos: 0,
        };
        let id = NodeId(rec.u64()?);
        let n_labels = rec.u32()?;
        let mut labels = std::collections::BTreeSet::new();
        for _ in 0..n_labels {
            labels.insert(rec.string()?);
        }
        let props = rec.props()?;
        rec.finish()?;
        nodes.push(Node { id, labels, props });
    }
    let n_edges = r.u64()?;
    let mut edges = Vec::new();
    for _ in 0..n_edges {
        let rec_len = r.u32()? as usize;
        let mut rec = Reader {
            buf: r.take(rec_len)?,
            pos: 0,
        };
        let id = EdgeId(rec.u64()?);
        let src = NodeId(rec.u64()?);
        let dst = NodeId(rec.u64()?);
        let rel_type = rec.string()?;
        let props = rec.props()?;
        rec.finish()?;
        edges.push(Edge {
            id,
            src,
            dst,
            rel_type,
            props,
        });
    }
    r.finish()?;
    PropertyGraph::restore(next_node, next_edge, nodes, edges, indexes)
        .map_err(|e| corrupt(format!("inconsistent records: {e}")))
}

fn corrupt(msg: impl Into<String>) -> Error {
    Error::CorruptSnapshot(msg.into())
}

fn put_u32(out: &mut Vec<u8>, v: u32) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn put_u64(out: &mut Vec<u8>, v: u64) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn put_str(out: &mut Vec<u8>, s: &str) {
    put_u32(out, s.len() as u32);
    out.extend_from_slice(s.as_bytes());
}

fn put_props(out: &mut Vec<u8>, props: &Props) {
    put_u32(out, props.len() as u32);
    for (k, v) in props {
        put_str(out, k);
        match v {
            Value::Null => out.push(TAG_NULL),
            Value::Boolean(b) => {
                out.push(TAG_BOOL);
                out.push(*b as u8);
            }
            Value::Integer(i) => {
                out.push(TAG_INT);
                out.extend_from_slice(&i.to_le_bytes());
            }
            Value::Float(f) => {
                out.push(TAG_FLOAT);
                out.extend_from_slice(&f.to_bits().to_le_bytes());
            }
            Value::Text(s) => {
                out.push(TAG_TEXT);
                put_str(out, s);
            }
            Value::TextList(items) => {
                out.push(TAG_LIST);
                put_u32(out, items.len() as u32);
                for s in items {
                    put_str(out, s);
                }
            }
        }
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], Error> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|e| *e <= self.buf.len())
            .ok_or_else(|| corrupt("unexpected end of data"))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8, Error> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32, Error> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, Error> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn string(&mut self) -> Result<String, Error> {
        let n = self.u32()? as usize;
        let raw = self.take(n)?;
        String::from_utf8(raw.to_vec()).map_err(|_| corrupt("invalid utf-8"))
    }

    fn props(&mut self) -> Result<Props, Error> {
        let n = self.u32()?;
        let mut props = Props::new();
        for _ in 0..n {
            let key = self.string()?;
            let v = match self.u8()? {
                TAG_NULL => Value::Null,
                TAG_BOOL => Value::Boolean(self.u8()? != 0),
                TAG_INT => Value::Integer(i64::from_le_bytes(self.take(8)?.try_into().unwrap())),
                TAG_FLOAT => Value::Float(f64::from_bits(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))),
                TAG_TEXT => Value::Text(self.string()?),
                TAG_LIST => {
                    let n = self.u32()?;
                    let mut items = Vec::new();
                    for _ in 0..n {
                        items.push(self.string()?);
                    }
                    Value::TextList(items)
                }
                t => return Err(corrupt(format!("unknown value tag {t}"))),
            };
            props.insert(key, v);
        }
        Ok(props)
    }

    fn finish(&self) -> Result<(), Error> {
        if self.pos == self.buf.len() {
            Ok(())
        } else {
            Err(corrupt("trailing bytes in record"))
        }
    }
}

impl From<io::Error> for Error {
    fn from(e: io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
