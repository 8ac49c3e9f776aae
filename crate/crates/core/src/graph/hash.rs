use sha2::{Digest, Sha256};

use super::PropertyGraph;
use crate::value::Value;

/// SHA-256 over ids, labels, relationship types and exact property bits of
/// every live node and edge. Independent of index declarations and of the
/// snapshot encoding, so it can check that encoding.
pub fn structural_hash(graph: &PropertyGraph) -> String {
    let mut h = Sha256::new();
    for node in graph.nodes() {
        h.update(b"N");
        h.update(node.id.0.to_le_bytes());
        for l in &node.labels {
            feed_str(&mut h, l);
        }
        h.update(b"|");
        for (k, v) in &node.props {
            feed_str(&mut h, k);
            feed_value(&mut h, v);
        }
    }
    for edge in graph.edges() {
        h.update(b"E");
        h.update(edge.id.0.to_le_bytes());
        h.update(edge.src.0.to_le_bytes());
        h.update(edge.dst.0.to_le_bytes());
        feed_str(&mut h, &edge.rel_type);
        for (k, v) in &edge.props {
            feed_str(&mut h, k);
            feed_value(&mut h, v);
        }
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn feed_str(h: &mut Sha256, s: &str) {
    h.update((s.len() as u64).to_le_bytes());
    h.update(s.as_bytes());
}

fn feed_value(h: &mut Sha256, v: &Value) {
    match v {
        Value::Null => h.update([0u8]),
        Value::Boolean(b) => h.update([1u8, *b as u8]),
        Value::Integer(i) => {
            h.update([2u8]);
            h.update(i.to_le_bytes());
        }
        Value::Float(f) => {
            h.update([3u8]);
            h.update(f.to_bits().to_le_bytes());
        }
        Value::Text(s) => {
            h.update([4u8]);
            feed_str(h, s);
        }
        Value::TextList(items) => {
            h.update([5u8]);
            h.update((items.len() as u64).to_le_bytes());
            for s in items {
                feed_str(h, s);
            }
        }
    }
}
