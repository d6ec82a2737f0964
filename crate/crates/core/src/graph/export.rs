//! graph6 and edge-list JSON serialization.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{LfGraph, Side};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Graph6,
    EdgeListJson,
}

impl FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "graph6" | "g6" => Ok(ExportFormat::Graph6),
            "json" | "edge-list-json" => Ok(ExportFormat::EdgeListJson),
            other => Err(Error::UnsupportedFormat(other.to_string())),
        }
    }
}

impl LfGraph {
    pub fn export(&self, format: ExportFormat) -> Vec<u8> {
        match format {
            ExportFormat::Graph6 => graph6_encode(self.vertex_count(), &self.edges()).into_bytes(),
            ExportFormat::EdgeListJson => {
                let mut s =
                    serde_json::to_string_pretty(&edge_list_json(self)).expect("serializable");
                s.push('\n');
                s.into_bytes()
            }
        }
    }
}

fn push_size(out: &mut Vec<u8>, n: usize) {
    if n <= 62 {
        out.push(n as u8 + 63);
    } else if n <= 258_047 {
        out.push(126);
        for shift in [12, 6, 0] {
            out.push(((n >> shift) & 63) as u8 + 63);
        }
    } else {
        out.extend([126, 126]);
        for shift in [30, 24, 18, 12, 6, 0] {
            out.push(((n >> shift) & 63) as u8 + 63);
        }
    }
}

/// graph6 encoding of an undirected simple graph on `0..n`.
pub fn graph6_encode(n: usize, edges: &[(usize, usize)]) -> String {
    let mut bits = vec![false; n * n.saturating_sub(1) / 2];
    for &(a, b) in edges {
        let (i, j) = if a < b { (a, b) } else { (b, a) };
        // column-wise upper triangle: (0,1), (0,2), (1,2), (0,3), ...
        bits[j * (j - 1) / 2 + i] = true;
    }
    let mut out = Vec::with_capacity(8 + bits.len() / 6 + 1);
    push_size(&mut out, n);
    for chunk in bits.chunks(6) {
        let mut x = 0u8;
        for (k, &b) in chunk.iter().enumerate() {
            if b {
                x |= 1 << (5 - k);
            }
        }
        out.push(x + 63);
    }
    String::from_utf8(out).expect("printable ascii")
}

/// Decodes a graph6 string into the vertex count and sorted edge list.
pub fn graph6_decode(s: &str) -> Result<(usize, Vec<(usize, usize)>)> {
    let bytes = s.trim_end().as_bytes();
    let bad = |m: &str| Error::Graph6(m.to_string());
    if bytes.iter().any(|&b| !(63..=126).contains(&b)) {
        return Err(bad("byte outside 63..=126"));
    }
    let (n, rest) = match bytes {
        [] => return Err(bad("empty input")),
        [126, 126, r @ ..] if r.len() >= 6 => (
            r[..6]
                .iter()
                .fold(0usize, |acc, &b| (acc << 6) | (b - 63) as usize),
            &r[6..],
        ),
        [126, r @ ..] if r.len() >= 3 && r[0] != 126 => (
            r[..3]
                .iter()
                .fold(0usize, |acc, &b| (acc << 6) | (b - 63) as usize),
            &r[3..],
        ),
        [126, ..] => return Err(bad("truncated size field")),
        [b, r @ ..] => ((*b - 63) as usize, r),
    };
    let nbits = n * n.saturating_sub(1) / 2;
    if rest.len() != nbits.div_ceil(6) {
        return Err(bad("edge data length does not match vertex count"));
    }
    let mut edges = vec![];
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            let byte = rest[k / 6] - 63;
            if byte >> (5 - k % 6) & 1 == 1 {
                edges.push((i, j));
            }
            k += 1;
        }
    }
    edges.sort_unstable();
    Ok((n, edges))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeListVertex {
    pub id: usize,
    pub side: Side,
    pub coords: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeListDoc {
    pub q: usize,
    pub n: usize,
    pub vertices: Vec<EdgeListVertex>,
    pub edges: Vec<[usize; 2]>,
}

pub fn edge_list_json(g: &LfGraph) -> EdgeListDoc {
    EdgeListDoc {
        q: g.q(),
        n: g.n(),
        vertices: (0..g.vertex_count())
            .map(|id| EdgeListVertex {
                id,
                side: g.side(id),
                coords: g.coords(id).indices(),
            })
            .collect(),
        edges: g.edges().into_iter().map(|(a, b)| [a, b]).collect(),
    }
}
