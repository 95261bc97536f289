//! Simple undirected graphs stored as rows of 64-bit words.
//!
//! All the expensive queries reduce to popcounts of ANDed rows: co-degrees
//! for the strong regularity scan and common neighbourhoods of triangles for
//! the spectrum. Both kernels run the outer vertex loop on the rayon pool and
//! merge results in a schedule-independent way.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::linalg::ProjectivePoint;
use crate::polar::SrgParams;

/// Largest order accepted by the graph6 codec and [`Graph::new`].
pub const MAX_VERTICES: usize = 1_000_000;
/// Largest order accepted by [`Graph::triangle_spectrum`].
pub const TRIANGLE_LIMIT: usize = 5_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph has {n} vertices; at least 3 are needed")]
    TooSmall { n: usize },
    #[error("graph with {n} vertices exceeds the limit of {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("vertex {vertex} has degree {degree}, vertex 0 has degree {expected}")]
    NotRegular {
        vertex: usize,
        degree: usize,
        expected: usize,
    },
    #[error(
        "{} pair ({u}, {v}) has {common} common neighbours, expected {expected}",
        if *adjacent { "adjacent" } else { "non-adjacent" }
    )]
    NotSrg {
        u: usize,
        v: usize,
        adjacent: bool,
        common: usize,
        expected: usize,
    },
    #[error("degenerate graph: {0}")]
    Degenerate(&'static str),
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("malformed input at byte {position}: {reason}")]
    Malformed { position: usize, reason: String },
}

fn malformed(position: usize, reason: impl Into<String>) -> GraphError {
    GraphError::Malformed {
        position,
        reason: reason.into(),
    }
}

/// Histogram of common-neighbour counts over all triangles.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TriangleSpectrum {
    pub histogram: BTreeMap<u64, u64>,
}

impl TriangleSpectrum {
    pub fn support(&self) -> Vec<u64> {
        self.histogram.keys().copied().collect()
    }

    pub fn contains(&self, value: u64) -> bool {
        self.histogram.contains_key(&value)
    }

    pub fn triangle_count(&self) -> u64 {
        self.histogram.values().sum()
    }

    fn merge(mut self, other: TriangleSpectrum) -> TriangleSpectrum {
        for (k, v) in other.histogram {
            *self.histogram.entry(k).or_default() += v;
        }
        self
    }
}

impl fmt::Display for TriangleSpectrum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .histogram
            .iter()
            .map(|(k, v)| format!("{k}: {v}"))
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Symmetric, loop-free adjacency over `n` vertices, optionally labelled by
/// the projective points the vertices stand for.
#[derive(Clone, Debug)]
pub struct Graph {
    n: usize,
    words: usize,
    bits: Vec<u64>,
    labels: Option<Vec<ProjectivePoint>>,
}

impl PartialEq for Graph {
    /// Labelled equality of the adjacency; vertex labels are ignored.
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.bits == other.bits
    }
}

impl Eq for Graph {}

#[inline]
fn popcount_and(a: &[u64], b: &[u64]) -> usize {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones() as usize).sum()
}

fn bits_of(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(w, &word)| {
        let mut rest = word;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let b = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(w * 64 + b)
        })
    })
}

impl Graph {
    /// Edgeless graph on `n` vertices.
    pub fn new(n: usize) -> Self {
        let words = n.div_ceil(64);
        Graph {
            n,
            words,
            bits: vec![0; n * words],
            labels: None,
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut g = Graph::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    /// Graph with `i ~ j` iff `adjacent(i, j)`, evaluated once per pair `i < j`
    /// (rows in parallel) and mirrored.
    pub fn from_fn<F>(n: usize, adjacent: F) -> Self
    where
        F: Fn(usize, usize) -> bool + Sync,
    {
        let upper: Vec<Vec<usize>> = (0..n)
            .into_par_iter()
            .map(|i| (i + 1..n).filter(|&j| adjacent(i, j)).collect())
            .collect();
        let mut g = Graph::new(n);
        for (i, row) in upper.into_iter().enumerate() {
            for j in row {
                g.set_bit(i, j, true);
                g.set_bit(j, i, true);
            }
        }
        g
    }

    pub fn with_labels(mut self, labels: Vec<ProjectivePoint>) -> Self {
        assert_eq!(labels.len(), self.n, "one label per vertex");
        self.labels = Some(labels);
        self
    }

    pub fn labels(&self) -> Option<&[ProjectivePoint]> {
        self.labels.as_deref()
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn row(&self, v: usize) -> &[u64] {
        &self.bits[v * self.words..(v + 1) * self.words]
    }

    fn check_vertex(&self, v: usize) -> Result<(), GraphError> {
        if v >= self.n {
            return Err(GraphError::VertexOutOfRange { vertex: v, n: self.n });
        }
        Ok(())
    }

    /// Sets or clears the edge `uv` in both rows.
    pub fn set_edge(&mut self, u: usize, v: usize, present: bool) -> Result<(), GraphError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        self.set_bit(u, v, present);
        self.set_bit(v, u, present);
        Ok(())
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<(), GraphError> {
        self.set_edge(u, v, true)
    }

    #[inline]
    fn set_bit(&mut self, u: usize, v: usize, present: bool) {
        let word = &mut self.bits[u * self.words + v / 64];
        if present {
            *word |= 1 << (v % 64);
        } else {
            *word &= !(1 << (v % 64));
        }
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && (self.bits[u * self.words + v / 64] >> (v % 64)) & 1 == 1
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        bits_of(self.row(v))
    }

    pub fn degree(&self, v: usize) -> usize {
        self.row(v).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn edge_count(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).sum::<usize>() / 2
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| self.neighbors(u).filter(move |&v| v > u).map(move |v| (u, v)))
    }

    /// Same order and identical adjacency bits.
    pub fn graphs_equal(&self, other: &Graph) -> bool {
        self == other
    }

    pub fn degree_sequence(&self) -> Vec<usize> {
        let mut seq: Vec<usize> = (0..self.n).map(|v| self.degree(v)).collect();
        seq.sort_unstable();
        seq
    }

    /// Number of vertices adjacent to every vertex of `vs`.
    pub fn common_neighbors(&self, vs: &[usize]) -> Result<usize, GraphError> {
        let Some((&first, rest)) = vs.split_first() else {
            return Err(GraphError::Degenerate("empty vertex set"));
        };
        self.check_vertex(first)?;
        let mut acc = self.row(first).to_vec();
        for &v in rest {
            self.check_vertex(v)?;
            for (a, &b) in acc.iter_mut().zip(self.row(v)) {
                *a &= b;
            }
        }
        Ok(acc.iter().map(|w| w.count_ones() as usize).sum())
    }

    #[inline]
    fn codegree(&self, u: usize, v: usize) -> usize {
        popcount_and(self.row(u), self.row(v))
    }

    /// Exhaustively verifies strong regularity and returns `(v, k, λ, μ)`.
    pub fn srg_check(&self) -> Result<SrgParams, GraphError> {
        if self.n < 3 {
            return Err(GraphError::TooSmall { n: self.n });
        }
        let k = self.degree(0);
        if let Some(vertex) = (1..self.n).into_par_iter().find_first(|&v| self.degree(v) != k) {
            return Err(GraphError::NotRegular {
                vertex,
                degree: self.degree(vertex),
                expected: k,
            });
        }
        if k == 0 {
            return Err(GraphError::Degenerate("edgeless graph"));
        }
        if k == self.n - 1 {
            return Err(GraphError::Degenerate("complete graph"));
        }
        // reference co-degrees from the first adjacent and non-adjacent pair of vertex 0
        let adj = self.neighbors(0).next().expect("k > 0");
        let non = (1..self.n).find(|&v| !self.has_edge(0, v)).expect("k < n - 1");
        let lambda = self.codegree(0, adj);
        let mu = self.codegree(0, non);
        let violation = (0..self.n).into_par_iter().find_map_first(|u| {
            (u + 1..self.n).find_map(|v| {
                let adjacent = self.has_edge(u, v);
                let expected = if adjacent { lambda } else { mu };
                let common = self.codegree(u, v);
                (common != expected).then_some(GraphError::NotSrg {
                    u,
                    v,
                    adjacent,
                    common,
                    expected,
                })
            })
        });
        match violation {
            Some(err) => Err(err),
            None => Ok(SrgParams {
                v: self.n as u64,
                k: k as u64,
                lambda: lambda as u64,
                mu: mu as u64,
            }),
        }
    }

    /// Calls `f(i, j, k, common)` for every triangle `i < j < k` reached from
    /// the outer vertex `i`.
    fn for_triangles_at(&self, i: usize, mut f: impl FnMut(usize, usize, usize, usize)) {
        let ri = self.row(i);
        let mut ij = vec![0u64; self.words];
        let mut ijk_buf = vec![0u64; self.words];
        for j in self.neighbors(i).filter(|&j| j > i) {
            let rj = self.row(j);
            for ((x, &a), &b) in ij.iter_mut().zip(ri).zip(rj) {
                *x = a & b;
            }
            for k in bits_of(&ij).filter(|&k| k > j) {
                for ((x, &a), &b) in ijk_buf.iter_mut().zip(&ij).zip(self.row(k)) {
                    *x = a & b;
                }
                let common = ijk_buf.iter().map(|w| w.count_ones() as usize).sum();
                f(i, j, k, common);
            }
        }
    }

    /// Histogram of `|N(x) ∩ N(y) ∩ N(z)|` over all triangles `{x, y, z}`.
    pub fn triangle_spectrum(&self) -> Result<TriangleSpectrum, GraphError> {
        if self.n > TRIANGLE_LIMIT {
            return Err(GraphError::TooLarge {
                n: self.n,
                limit: TRIANGLE_LIMIT,
            });
        }
        Ok((0..self.n)
            .into_par_iter()
            .map(|i| {
                let mut local = TriangleSpectrum::default();
                self.for_triangles_at(i, |_, _, _, c| {
                    *local.histogram.entry(c as u64).or_default() += 1;
                });
                local
            })
            .reduce(TriangleSpectrum::default, TriangleSpectrum::merge))
    }

    /// The lexicographically first triangle with exactly `value` common neighbours.
    pub fn find_triangle_with(&self, value: usize) -> Option<[usize; 3]> {
        (0..self.n).into_par_iter().find_map_first(|i| {
            let mut hit = None;
            self.for_triangles_at(i, |a, b, c, common| {
                if hit.is_none() && common == value {
                    hit = Some([a, b, c]);
                }
            });
            hit
        })
    }

    /// graph6 encoding (no header, no trailing newline).
    pub fn to_graph6(&self) -> Result<Vec<u8>, GraphError> {
        if self.n > MAX_VERTICES {
            return Err(GraphError::TooLarge {
                n: self.n,
                limit: MAX_VERTICES,
            });
        }
        let mut out = encode_order(self.n);
        let mut acc = 0u8;
        let mut filled = 0;
        for j in 1..self.n {
            for i in 0..j {
                acc = (acc << 1) | self.has_edge(i, j) as u8;
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
        Ok(out)
    }

    /// Decodes one graph6 record. An optional `>>graph6<<` header and a
    /// single trailing newline are accepted; everything else must be canonical
    /// (shortest order encoding, zero padding bits).
    pub fn from_graph6(input: &[u8]) -> Result<Graph, GraphError> {
        let mut data = input;
        let mut offset = 0;
        if let Some(rest) = data.strip_prefix(b">>graph6<<") {
            data = rest;
            offset = 10;
        }
        if let Some(rest) = data.strip_suffix(b"\n") {
            data = rest;
            if let Some(rest) = data.strip_suffix(b"\r") {
                data = rest;
            }
        }
        if let Some(pos) = data.iter().position(|&b| !(63..=126).contains(&b)) {
            return Err(malformed(offset + pos, format!("byte {:#04x} outside 63..=126", data[pos])));
        }
        let (n, header_len) = decode_order(data).map_err(|(p, r)| malformed(offset + p, r))?;
        if n > MAX_VERTICES {
            return Err(GraphError::TooLarge { n, limit: MAX_VERTICES });
        }
        let body = &data[header_len..];
        let bit_count = n * n.saturating_sub(1) / 2;
        let expected_len = bit_count.div_ceil(6);
        if body.len() != expected_len {
            return Err(malformed(
                offset + header_len,
                format!("expected {expected_len} edge bytes for {n} vertices, found {}", body.len()),
            ));
        }
        let mut g = Graph::new(n);
        let mut bit = 0;
        for j in 1..n {
            for i in 0..j {
                let byte = body[bit / 6] - 63;
                if (byte >> (5 - bit % 6)) & 1 == 1 {
                    g.set_bit(i, j, true);
                    g.set_bit(j, i, true);
                }
                bit += 1;
            }
        }
        if bit % 6 != 0 {
            let last = body[body.len() - 1] - 63;
            if last & ((1 << (6 - bit % 6)) - 1) != 0 {
                return Err(malformed(offset + header_len + body.len() - 1, "nonzero padding bits"));
            }
        }
        Ok(g)
    }

    /// DIMACS edge format: `p edge n m` then one `e u v` line per edge, 1-indexed.
    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p edge {} {}\n", self.n, self.edge_count());
        for (u, v) in self.edges() {
            out.push_str(&format!("e {} {}\n", u + 1, v + 1));
        }
        out
    }

    /// Parses DIMACS edge format; `c` lines are comments. Duplicate edges,
    /// loops, and an edge count disagreeing with the header are rejected.
    pub fn from_dimacs(text: &str) -> Result<Graph, GraphError> {
        let mut graph: Option<(Graph, usize)> = None;
        let mut seen = 0;
        let mut position = 0;
        for line in text.split_inclusive('\n') {
            let here = position;
            position += line.len();
            let mut tokens = line.split_whitespace();
            let Some(tag) = tokens.next() else { continue };
            let fields: Vec<&str> = tokens.collect();
            let num = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| malformed(here, format!("invalid number {s:?}")))
            };
            match tag {
                "c" => {}
                "p" => {
                    if graph.is_some() {
                        return Err(malformed(here, "second problem line"));
                    }
                    if fields.len() != 3 || !matches!(fields[0], "edge" | "col") {
                        return Err(malformed(here, "expected `p edge <n> <m>`"));
                    }
                    let n = num(fields[1])?;
                    if n > MAX_VERTICES {
                        return Err(GraphError::TooLarge { n, limit: MAX_VERTICES });
                    }
                    graph = Some((Graph::new(n), num(fields[2])?));
                }
                "e" => {
                    let Some((g, _)) = graph.as_mut() else {
                        return Err(malformed(here, "edge before problem line"));
                    };
                    if fields.len() != 2 {
                        return Err(malformed(here, "expected `e <u> <v>`"));
                    }
                    let (u, v) = (num(fields[0])?, num(fields[1])?);
                    if u == 0 || v == 0 || u > g.n || v > g.n {
                        return Err(malformed(here, format!("vertex out of range in edge {u} {v}")));
                    }
                    if u == v {
                        return Err(malformed(here, format!("self-loop at {u}")));
                    }
                    if g.has_edge(u - 1, v - 1) {
                        return Err(malformed(here, format!("duplicate edge {u} {v}")));
                    }
                    g.set_edge(u - 1, v - 1, true)?;
                    seen += 1;
                }
                other => return Err(malformed(here, format!("unknown line type {other:?}"))),
            }
        }
        let (g, m) = graph.ok_or_else(|| malformed(0, "missing problem line"))?;
        if m != seen {
            return Err(malformed(position, format!("header announces {m} edges, found {seen}")));
        }
        Ok(g)
    }
}

fn encode_order(n: usize) -> Vec<u8> {
    if n <= 62 {
        vec![n as u8 + 63]
    } else if n <= 258_047 {
        vec![
            126,
            ((n >> 12) & 63) as u8 + 63,
            ((n >> 6) & 63) as u8 + 63,
            (n & 63) as u8 + 63,
        ]
    } else {
        let mut out = vec![126, 126];
        for shift in (0..6).rev() {
            out.push(((n >> (6 * shift)) & 63) as u8 + 63);
        }
        out
    }
}

fn decode_order(data: &[u8]) -> Result<(usize, usize), (usize, String)> {
    let digits = |bytes: &[u8]| bytes.iter().fold(0usize, |acc, &b| (acc << 6) | (b - 63) as usize);
    match data {
        [] => Err((0, "empty input".into())),
        [126, 126, rest @ ..] => {
            if rest.len() < 6 {
                return Err((2, "truncated order".into()));
            }
            let n = digits(&rest[..6]);
            if n <= 258_047 {
                return Err((0, "non-canonical order encoding".into()));
            }
            Ok((n, 8))
        }
        [126, rest @ ..] => {
            if rest.len() < 3 {
                return Err((1, "truncated order".into()));
            }
            let n = digits(&rest[..3]);
            if n <= 62 {
                return Err((0, "non-canonical order encoding".into()));
            }
            Ok((n, 4))
        }
        [b, ..] => Ok(((*b - 63) as usize, 1)),
    }
}
