//! Undirected simple graphs on dense vertex labels `0..n`.
//!
//! Graphs with at most 64 vertices keep one `u64` bit row per vertex so that
//! neighbourhood intersections and induced subgraphs are a handful of word
//! operations. Larger graphs fall back to sorted neighbour lists.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest vertex count stored as bit rows.
pub const BIT_ROW_LIMIT: usize = 64;

/// Largest vertex count accepted by [`enumerate_labeled_graphs`].
pub const ENUMERATION_LIMIT: usize = 7;

#[derive(Clone, PartialEq, Eq)]
enum Adjacency {
    Bits(Vec<u64>),
    Lists(Vec<Vec<usize>>),
}

/// An immutable undirected simple graph.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    m: usize,
    adj: Adjacency,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("edges", &self.edges())
            .finish()
    }
}

impl Graph {
    /// The edgeless graph on `n` vertices.
    pub fn empty(n: usize) -> Graph {
        let adj = if n <= BIT_ROW_LIMIT {
            Adjacency::Bits(vec![0; n])
        } else {
            Adjacency::Lists(vec![Vec::new(); n])
        };
        Graph { n, m: 0, adj }
    }

    /// Builds a graph from an edge list, dropping duplicate edges.
    pub fn from_edge_list(n: usize, edges: &[(usize, usize)]) -> Result<Graph> {
        for &(u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(Error::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
        }
        if n <= BIT_ROW_LIMIT {
            let mut rows = vec![0u64; n];
            for &(u, v) in edges {
                rows[u] |= 1 << v;
                rows[v] |= 1 << u;
            }
            Ok(Graph::from_rows_unchecked(rows))
        } else {
            let mut lists = vec![Vec::new(); n];
            for &(u, v) in edges {
                lists[u].push(v);
                lists[v].push(u);
            }
            for l in &mut lists {
                l.sort_unstable();
                l.dedup();
            }
            let m = lists.iter().map(Vec::len).sum::<usize>() / 2;
            Ok(Graph {
                n,
                m,
                adj: Adjacency::Lists(lists),
            })
        }
    }

    /// Builds a graph on `rows.len() <= 64` vertices from adjacency bit rows.
    pub fn from_bit_rows(rows: Vec<u64>) -> Result<Graph> {
        let n = rows.len();
        if n > BIT_ROW_LIMIT {
            return Err(Error::TooManyVertices {
                n,
                max: BIT_ROW_LIMIT,
            });
        }
        for (u, &row) in rows.iter().enumerate() {
            if row >> u & 1 == 1 {
                return Err(Error::SelfLoop(u));
            }
            if n < 64 && row >> n != 0 {
                let vertex = 63 - row.leading_zeros() as usize;
                return Err(Error::VertexOutOfRange { vertex, n });
            }
            for v in BitIter(row) {
                if rows[v] >> u & 1 == 0 {
                    return Err(Error::InvalidArgument(format!(
                        "adjacency rows are not symmetric at ({u}, {v})"
                    )));
                }
            }
        }
        Ok(Graph::from_rows_unchecked(rows))
    }

    pub(crate) fn from_rows_unchecked(rows: Vec<u64>) -> Graph {
        let m = rows.iter().map(|r| r.count_ones() as usize).sum::<usize>() / 2;
        Graph {
            n: rows.len(),
            m,
            adj: Adjacency::Bits(rows),
        }
    }

    pub fn cycle(n: usize) -> Graph {
        let edges: Vec<_> = match n {
            0 | 1 => Vec::new(),
            2 => vec![(0, 1)],
            _ => (0..n).map(|i| (i, (i + 1) % n)).collect(),
        };
        Graph::from_edge_list(n, &edges).expect("valid cycle")
    }

    pub fn path(n: usize) -> Graph {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::from_edge_list(n, &edges).expect("valid path")
    }

    pub fn complete(n: usize) -> Graph {
        let edges: Vec<_> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        Graph::from_edge_list(n, &edges).expect("valid complete graph")
    }

    /// The Petersen graph: outer 5-cycle, inner pentagram, spokes.
    pub fn petersen() -> Graph {
        let mut edges = Vec::with_capacity(15);
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((5 + i, 5 + (i + 2) % 5));
            edges.push((i, i + 5));
        }
        Graph::from_edge_list(10, &edges).expect("valid Petersen graph")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.m
    }

    /// `2m/n`, or 0 for the empty graph.
    pub fn average_degree(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            2.0 * self.m as f64 / self.n as f64
        }
    }

    /// Adjacency bit rows when the graph has at most 64 vertices.
    pub fn bit_rows(&self) -> Option<&[u64]> {
        match &self.adj {
            Adjacency::Bits(rows) => Some(rows),
            Adjacency::Lists(_) => None,
        }
    }

    pub fn degree(&self, v: usize) -> usize {
        match &self.adj {
            Adjacency::Bits(rows) => rows[v].count_ones() as usize,
            Adjacency::Lists(lists) => lists[v].len(),
        }
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        match &self.adj {
            Adjacency::Bits(rows) => rows[u] >> v & 1 == 1,
            Adjacency::Lists(lists) => lists[u].binary_search(&v).is_ok(),
        }
    }

    /// Neighbours of `v` in increasing order.
    pub fn neighbors(&self, v: usize) -> Neighbors<'_> {
        match &self.adj {
            Adjacency::Bits(rows) => Neighbors::Bits(BitIter(rows[v])),
            Adjacency::Lists(lists) => Neighbors::List(lists[v].iter()),
        }
    }

    /// Edges `(u, v)` with `u < v`, sorted lexicographically.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.m);
        for u in 0..self.n {
            out.extend(self.neighbors(u).filter(|&v| v > u).map(|v| (u, v)));
        }
        out
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|v| self.degree(v)).collect()
    }

    pub fn count_triangles(&self) -> u64 {
        match &self.adj {
            Adjacency::Bits(rows) => {
                let mut t = 0u64;
                for (u, &ru) in rows.iter().enumerate() {
                    for v in BitIter(ru & above(u)) {
                        t += (ru & rows[v] & above(v)).count_ones() as u64;
                    }
                }
                t
            }
            Adjacency::Lists(lists) => {
                let mut t = 0u64;
                for (u, nu) in lists.iter().enumerate() {
                    for &v in nu.iter().filter(|&&v| v > u) {
                        t += sorted_intersection_above(nu, &lists[v], v);
                    }
                }
                t
            }
        }
    }

    pub fn is_triangle_free(&self) -> bool {
        match &self.adj {
            Adjacency::Bits(rows) => rows_triangle_free(rows),
            Adjacency::Lists(_) => self.count_triangles() == 0,
        }
    }

    /// The subgraph induced by `keep` (strictly increasing), relabelled densely
    /// in the order given.
    pub fn induced_subgraph(&self, keep: &[usize]) -> Result<Graph> {
        for w in keep.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::InvalidArgument(
                    "induced_subgraph expects strictly increasing vertices".into(),
                ));
            }
        }
        if let Some(&last) = keep.last() {
            if last >= self.n {
                return Err(Error::VertexOutOfRange {
                    vertex: last,
                    n: self.n,
                });
            }
        }
        let mut index = vec![usize::MAX; self.n];
        for (i, &v) in keep.iter().enumerate() {
            index[v] = i;
        }
        let mut edges = Vec::new();
        for (i, &u) in keep.iter().enumerate() {
            for v in self.neighbors(u) {
                let j = index[v];
                if j != usize::MAX && j > i {
                    edges.push((i, j));
                }
            }
        }
        Graph::from_edge_list(keep.len(), &edges)
    }

    /// `G - v`.
    pub fn delete_vertex(&self, v: usize) -> Result<Graph> {
        self.check_vertex(v)?;
        let keep: Vec<usize> = (0..self.n).filter(|&u| u != v).collect();
        self.induced_subgraph(&keep)
    }

    /// `G - N[v]`.
    pub fn delete_closed_neighborhood(&self, v: usize) -> Result<Graph> {
        self.check_vertex(v)?;
        let keep: Vec<usize> = (0..self.n)
            .filter(|&u| u != v && !self.has_edge(v, u))
            .collect();
        self.induced_subgraph(&keep)
    }

    /// Maximal connected induced subgraphs, ordered by smallest vertex.
    pub fn connected_components(&self) -> Vec<Graph> {
        self.component_vertex_sets()
            .iter()
            .map(|c| {
                self.induced_subgraph(c)
                    .expect("component vertices are valid")
            })
            .collect()
    }

    /// Vertex sets of the connected components, each sorted.
    pub fn component_vertex_sets(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut stack = vec![s];
            let mut comp = Vec::new();
            while let Some(u) = stack.pop() {
                comp.push(u);
                for w in self.neighbors(u) {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Vertex-disjoint union; vertices of `other` are shifted by `self.n()`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let shift = self.n;
        let mut edges = self.edges();
        edges.extend(
            other
                .edges()
                .into_iter()
                .map(|(u, v)| (u + shift, v + shift)),
        );
        Graph::from_edge_list(self.n + other.n, &edges).expect("union of valid graphs")
    }

    /// Serialises to the `n m` / `u v` text format.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.m);
        for (u, v) in self.edges() {
            s.push_str(&format!("{u} {v}\n"));
        }
        s
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.n {
            Err(Error::VertexOutOfRange {
                vertex: v,
                n: self.n,
            })
        } else {
            Ok(())
        }
    }
}

impl FromStr for Graph {
    type Err = Error;

    /// Parses the text format. Blank lines and lines starting with `#` are
    /// ignored; an input with no header at all is the empty graph.
    fn from_str(s: &str) -> Result<Graph> {
        let mut lines = s
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let Some((hline, header)) = lines.next() else {
            return Ok(Graph::empty(0));
        };
        let (n, m) = parse_pair(hline, header)?;
        let mut edges = Vec::with_capacity(m);
        for (line, l) in lines {
            if edges.len() == m {
                return Err(Error::Parse {
                    line,
                    msg: format!("more than the declared {m} edges"),
                });
            }
            edges.push(parse_pair(line, l)?);
        }
        if edges.len() != m {
            return Err(Error::Parse {
                line: hline,
                msg: format!("declared {m} edges but found {}", edges.len()),
            });
        }
        Graph::from_edge_list(n, &edges)
    }
}

fn parse_pair(line: usize, l: &str) -> Result<(usize, usize)> {
    let mut it = l.split_whitespace();
    let mut field = |what: &str| -> Result<usize> {
        it.next()
            .ok_or_else(|| Error::Parse {
                line,
                msg: format!("missing {what}"),
            })?
            .parse()
            .map_err(|e| Error::Parse {
                line,
                msg: format!("bad {what}: {e}"),
            })
    };
    let a = field("first integer")?;
    let b = field("second integer")?;
    if it.next().is_some() {
        return Err(Error::Parse {
            line,
            msg: "expected exactly two integers".into(),
        });
    }
    Ok((a, b))
}

/// Neighbour iterator returned by [`Graph::neighbors`].
pub enum Neighbors<'a> {
    Bits(BitIter),
    List(std::slice::Iter<'a, usize>),
}

impl Iterator for Neighbors<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        match self {
            Neighbors::Bits(b) => b.next(),
            Neighbors::List(l) => l.next().copied(),
        }
    }
}

/// Iterates the set bit positions of a word, lowest first.
#[derive(Clone, Copy, Debug)]
pub struct BitIter(pub u64);

impl Iterator for BitIter {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            let i = self.0.trailing_zeros() as usize;
            self.0 &= self.0 - 1;
            Some(i)
        }
    }
}

/// Mask of bit positions strictly above `i`.
#[inline]
fn above(i: usize) -> u64 {
    if i >= 63 {
        0
    } else {
        !0u64 << (i + 1)
    }
}

pub(crate) fn rows_triangle_free(rows: &[u64]) -> bool {
    rows.iter()
        .enumerate()
        .all(|(u, &ru)| BitIter(ru & above(u)).all(|v| ru & rows[v] == 0))
}

fn sorted_intersection_above(a: &[usize], b: &[usize], floor: usize) -> u64 {
    let (mut i, mut j, mut c) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                if a[i] > floor {
                    c += 1;
                }
                i += 1;
                j += 1;
            }
        }
    }
    c
}

/// Vertex pairs `(i, j)`, `i < j`, in the order used as edge-code bits.
pub fn pair_order(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect()
}

/// Builds the labelled graph whose edge set is the bit pattern `code` over
/// [`pair_order`].
pub fn labeled_graph_from_code(n: usize, code: u64) -> Result<Graph> {
    if n > ENUMERATION_LIMIT {
        return Err(Error::TooManyVertices {
            n,
            max: ENUMERATION_LIMIT,
        });
    }
    let pairs = pair_order(n);
    if pairs.len() < 64 && code >> pairs.len() != 0 {
        return Err(Error::InvalidArgument(format!(
            "edge code {code} exceeds 2^{} for n = {n}",
            pairs.len()
        )));
    }
    Ok(Graph::from_rows_unchecked(rows_from_code(n, code, &pairs)))
}

fn rows_from_code(n: usize, code: u64, pairs: &[(usize, usize)]) -> Vec<u64> {
    let mut rows = vec![0u64; n];
    for b in BitIter(code) {
        let (i, j) = pairs[b];
        rows[i] |= 1 << j;
        rows[j] |= 1 << i;
    }
    rows
}

/// Streams every labelled simple graph on `n <= 7` vertices exactly once,
/// optionally restricted to triangle-free graphs.
pub fn enumerate_labeled_graphs(n: usize, triangle_free: bool) -> Result<LabeledGraphs> {
    if n > ENUMERATION_LIMIT {
        return Err(Error::TooManyVertices {
            n,
            max: ENUMERATION_LIMIT,
        });
    }
    let pairs = pair_order(n);
    let end = 1u64 << pairs.len();
    Ok(LabeledGraphs {
        n,
        pairs,
        codes: 0..end,
        triangle_free,
    })
}

/// Iterator over labelled graphs; see [`enumerate_labeled_graphs`].
#[derive(Clone, Debug)]
pub struct LabeledGraphs {
    n: usize,
    pairs: Vec<(usize, usize)>,
    codes: Range<u64>,
    triangle_free: bool,
}

impl LabeledGraphs {
    /// Total number of edge codes, `2^(n choose 2)`.
    pub fn code_count(&self) -> u64 {
        1u64 << self.pairs.len()
    }

    /// Restricts the stream to a sub-range of edge codes, for sharding.
    pub fn shard(mut self, codes: Range<u64>) -> LabeledGraphs {
        let end = codes.end.min(self.code_count());
        self.codes = codes.start.min(end)..end;
        self
    }

    /// Like `next`, but also returns the edge code of the graph.
    pub fn next_with_code(&mut self) -> Option<(u64, Graph)> {
        for code in self.codes.by_ref() {
            let rows = rows_from_code(self.n, code, &self.pairs);
            if self.triangle_free && !rows_triangle_free(&rows) {
                continue;
            }
            return Some((code, Graph::from_rows_unchecked(rows)));
        }
        None
    }
}

impl Iterator for LabeledGraphs {
    type Item = Graph;

    fn next(&mut self) -> Option<Graph> {
        self.next_with_code().map(|(_, g)| g)
    }
}
