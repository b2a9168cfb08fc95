//! graph6 with the one- and four-byte size headers (up to 258047 vertices),
//! one graph per line.

use thiserror::Error;

use crate::graph::FiniteGraph;

/// Largest vertex count representable in the single-byte size header.
pub const MAX_SMALL_VERTICES: usize = 62;

/// Largest vertex count representable in the four-byte size header.
pub const MAX_VERTICES: usize = 258_047;

const HEADER: &str = ">>graph6<<";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Graph6Error {
    #[error("graph on {0} vertices needs the eight-byte graph6 size header")]
    TooLarge(usize),
    #[error("empty graph6 input")]
    EmptyInput,
    #[error("byte {byte:#04x} at position {position} is not a graph6 character")]
    BadByte { position: usize, byte: u8 },
    #[error("eight-byte size header at position {position} is not supported")]
    LargeFormat { position: usize },
    #[error("graph6 data truncated at position {position}: expected {expected} data bytes")]
    Truncated { position: usize, expected: usize },
    #[error("unexpected trailing byte at position {position}")]
    Trailing { position: usize },
    #[error("nonzero padding bits in byte at position {position}")]
    Padding { position: usize },
}

impl Graph6Error {
    /// Byte offset of the first offending byte, when the error has one.
    pub fn position(&self) -> Option<usize> {
        match self {
            Graph6Error::BadByte { position, .. }
            | Graph6Error::LargeFormat { position }
            | Graph6Error::Truncated { position, .. }
            | Graph6Error::Trailing { position }
            | Graph6Error::Padding { position } => Some(*position),
            Graph6Error::EmptyInput => Some(0),
            Graph6Error::TooLarge(_) => None,
        }
    }
}

fn data_len(n: usize) -> usize {
    (n * n.saturating_sub(1) / 2).div_ceil(6)
}

/// Encodes `g` without the trailing newline.
pub fn encode_graph6(g: &FiniteGraph) -> Result<String, Graph6Error> {
    let n = g.vertex_count();
    if n > MAX_VERTICES {
        return Err(Graph6Error::TooLarge(n));
    }
    let mut out = Vec::with_capacity(4 + data_len(n));
    if n <= MAX_SMALL_VERTICES {
        out.push(n as u8 + 63);
    } else {
        out.push(126);
        out.extend([12, 6, 0].map(|shift| ((n >> shift) & 63) as u8 + 63));
    }
    let mut acc = 0u8;
    let mut filled = 0;
    for j in 1..n {
        for i in 0..j {
            acc = (acc << 1) | g.has_edge(i, j) as u8;
            filled += 1;
            if filled == 6 {
                out.push(acc + 63);
                acc = 0;
                filled = 0;
            }
        }
    }
    if filled > 0 {
        out.push((acc << (6 - filled)) + 63);
    }
    Ok(String::from_utf8(out).expect("graph6 bytes are printable ASCII"))
}

/// Decodes one graph6 record. A trailing newline and the optional
/// `>>graph6<<` header are accepted; positions in errors count from the first
/// byte of `text`.
pub fn decode_graph6(text: &str) -> Result<FiniteGraph, Graph6Error> {
    let mut bytes = text.as_bytes();
    if let Some(rest) = bytes.strip_suffix(b"\n") {
        bytes = rest.strip_suffix(b"\r").unwrap_or(rest);
    }
    let offset = if bytes.starts_with(HEADER.as_bytes()) { HEADER.len() } else { 0 };
    let body = &bytes[offset..];
    let Some(&first) = body.first() else {
        return Err(Graph6Error::EmptyInput);
    };
    if let Some(i) = body.iter().position(|b| !(63..=126).contains(b)) {
        return Err(Graph6Error::BadByte { position: offset + i, byte: body[i] });
    }
    let (n, header_len) = if first != 126 {
        ((first - 63) as usize, 1)
    } else if body.len() < 4 {
        return Err(Graph6Error::Truncated { position: offset + body.len(), expected: 3 });
    } else if body[1] == 126 {
        return Err(Graph6Error::LargeFormat { position: offset + 1 });
    } else {
        (body[1..4].iter().fold(0, |acc, &b| acc << 6 | (b - 63) as usize), 4)
    };
    let expected = data_len(n);
    let data = &body[header_len..];
    let data_start = offset + header_len;
    if data.len() < expected {
        return Err(Graph6Error::Truncated { position: offset + body.len(), expected });
    }
    if data.len() > expected {
        return Err(Graph6Error::Trailing { position: data_start + expected });
    }
    let total_bits = n * n.saturating_sub(1) / 2;
    if total_bits % 6 != 0 {
        let last = data[expected - 1] - 63;
        let pad = 6 - total_bits % 6;
        if last & ((1 << pad) - 1) != 0 {
            return Err(Graph6Error::Padding { position: data_start + expected - 1 });
        }
    }
    let mut g = FiniteGraph::empty(n);
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            let byte = data[k / 6] - 63;
            if byte >> (5 - k % 6) & 1 == 1 {
                g.add_edge(i, j);
            }
            k += 1;
        }
    }
    Ok(g)
}

/// Decodes a newline-separated stream, skipping blank lines.
pub fn decode_graph6_lines(text: &str) -> Result<Vec<FiniteGraph>, (usize, Graph6Error)> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| decode_graph6(l).map_err(|e| (i + 1, e)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    // Expected strings produced by networkx's `to_graph6_bytes`.
    #[test]
    fn known_encodings() {
        assert_eq!(encode_graph6(&FiniteGraph::complete(2)).unwrap(), "A_");
        assert_eq!(encode_graph6(&FiniteGraph::empty(0)).unwrap(), "?");
        assert_eq!(encode_graph6(&FiniteGraph::empty(1)).unwrap(), "@");
        assert_eq!(encode_graph6(&FiniteGraph::cycle(5)).unwrap(), "Dhc");
        assert_eq!(encode_graph6(&FiniteGraph::path(3)).unwrap(), "Bg");
        assert_eq!(encode_graph6(&FiniteGraph::complete(5)).unwrap(), "D~{");
        let g = FiniteGraph::from_edges(5, &[(0, 2), (0, 4), (1, 3), (3, 4)]).unwrap();
        assert_eq!(encode_graph6(&g).unwrap(), "DQc");
        let k62 = encode_graph6(&FiniteGraph::complete(62)).unwrap();
        assert_eq!(k62.len(), 317);
        assert!(k62.starts_with("}~~~~~~~~~"));
    }

    #[test]
    fn decode_accepts_newline_and_header() {
        assert_eq!(decode_graph6("Dhc\n").unwrap(), FiniteGraph::cycle(5));
        assert_eq!(decode_graph6(">>graph6<<A_").unwrap(), FiniteGraph::complete(2));
        assert_eq!(decode_graph6("?").unwrap(), FiniteGraph::empty(0));
    }

    #[test]
    fn decode_errors_carry_positions() {
        assert_eq!(decode_graph6(""), Err(Graph6Error::EmptyInput));
        assert_eq!(decode_graph6("D h"), Err(Graph6Error::BadByte { position: 1, byte: b' ' }));
        assert_eq!(decode_graph6("Dh"), Err(Graph6Error::Truncated { position: 2, expected: 2 }));
        assert_eq!(decode_graph6("A_?"), Err(Graph6Error::Trailing { position: 2 }));
        // 'B' has 3 data bits; "Bh" sets a padding bit.
        assert_eq!(decode_graph6("Bh").unwrap_err().position(), Some(1));
        assert_eq!(decode_graph6("~?@"), Err(Graph6Error::Truncated { position: 3, expected: 3 }));
        assert_eq!(decode_graph6("~~??????"), Err(Graph6Error::LargeFormat { position: 1 }));
        assert_eq!(decode_graph6("~??~?").unwrap_err().position(), Some(5));
    }

    // Prefixes, suffixes and lengths from networkx for the four-byte header.
    #[test]
    fn four_byte_header() {
        let e63 = encode_graph6(&FiniteGraph::empty(63)).unwrap();
        assert_eq!((e63.len(), &e63[..12]), (330, "~??~????????"));
        let c64 = encode_graph6(&FiniteGraph::cycle(64)).unwrap();
        assert_eq!((c64.len(), &c64[..12], &c64[328..]), (340, "~?@?hCGGC@?G", "?K?????????@"));
        let k100 = encode_graph6(&FiniteGraph::complete(100)).unwrap();
        assert_eq!((k100.len(), &k100[..12]), (829, "~?@c~~~~~~~~"));
        for g in [FiniteGraph::cycle(64), FiniteGraph::complete(100), FiniteGraph::empty(63)] {
            assert_eq!(decode_graph6(&encode_graph6(&g).unwrap()).unwrap(), g);
        }
    }

    #[test]
    fn stream_reports_line_numbers() {
        let gs = decode_graph6_lines("A_\n\nDhc\n").unwrap();
        assert_eq!(gs.len(), 2);
        assert_eq!(decode_graph6_lines("A_\nA!\n").unwrap_err().0, 2);
    }

    #[test]
    fn round_trip_all_graphs_up_to_five_vertices() {
        for n in 0..=5usize {
            let pairs = n * n.saturating_sub(1) / 2;
            for code in 0u32..(1 << pairs) {
                let mut k = 0;
                let g = FiniteGraph::from_fn(n, |_, _| {
                    k += 1;
                    code >> (k - 1) & 1 == 1
                });
                assert_eq!(decode_graph6(&encode_graph6(&g).unwrap()).unwrap(), g);
            }
        }
    }
}
