//! Undirected graphs with self-loop-augmented CSR adjacency and the
//! symmetrically normalized operators consumed by the diffusion engine.

use std::collections::VecDeque;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

/// Immutable undirected graph. `csr` holds the adjacency of A + I (values 1.0),
/// `degrees[i]` is the row sum of A + I, so every node has degree >= 1.
#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    csr: CsrMatrix,
    degrees: Vec<usize>,
}

impl Graph {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Deduplicated undirected edges, canonical (min, max) order, no self-loops.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// CSR adjacency of A + I.
    pub fn adjacency_with_loops(&self) -> &CsrMatrix {
        &self.csr
    }

    /// Self-loop-augmented degree of node i.
    pub fn degree(&self, i: usize) -> usize {
        self.degrees[i]
    }

    pub fn degrees(&self) -> &[usize] {
        self.degrees.as_slice()
    }

    /// 1-hop neighbors of i, excluding i itself.
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let (idx, _) = self.csr.row(i);
        idx.iter().copied().filter(move |&j| j != i)
    }

    /// Number of connected components (self-loops do not connect anything).
    pub fn component_count(&self) -> usize {
        let mut seen = vec![false; self.n];
        let mut count = 0;
        let mut queue = VecDeque::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            count += 1;
            seen[start] = true;
            queue.push_back(start);
            while let Some(u) = queue.pop_front() {
                for v in self.neighbors(u) {
                    if !seen[v] {
                        seen[v] = true;
                        queue.push_back(v);
                    }
                }
            }
        }
        count
    }
}

/// Nodes at exactly `hop` unweighted shortest-path steps from `node`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborSet {
    pub node: usize,
    pub hop: usize,
    pub members: Vec<usize>,
}

/// Build a validated graph from an edge list. Duplicates, both orientations,
/// and input self-loops are tolerated; self-loops are added exactly once.
pub fn build_graph(edge_list: &[(usize, usize)], n: usize) -> Result<Graph> {
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    for &(u, v) in edge_list {
        if u >= n {
            return Err(Error::NodeIndexOutOfRange { index: u, n });
        }
        if v >= n {
            return Err(Error::NodeIndexOutOfRange { index: v, n });
        }
    }
    let mut edges: Vec<(usize, usize)> = edge_list
        .iter()
        .filter(|&&(u, v)| u != v)
        .map(|&(u, v)| (u.min(v), u.max(v)))
        .collect();
    edges.sort_unstable();
    edges.dedup();

    let mut rows: Vec<Vec<(usize, f64)>> = (0..n).map(|i| vec![(i, 1.0)]).collect();
    for &(u, v) in &edges {
        rows[u].push((v, 1.0));
        rows[v].push((u, 1.0));
    }
    let csr = CsrMatrix::from_rows(n, rows);
    let degrees = (0..n).map(|i| csr.row(i).0.len()).collect();
    Ok(Graph {
        n,
        edges,
        csr,
        degrees,
    })
}

/// Normalized operators A_hat = D^{-1/2} (A + I) D^{-1/2} and its exact
/// sparse square.
#[derive(Debug, Clone)]
pub struct NormalizedOperator {
    a_hat: CsrMatrix,
    a_hat_sq: CsrMatrix,
    degrees: Vec<usize>,
}

impl NormalizedOperator {
    pub fn n(&self) -> usize {
        self.a_hat.n()
    }

    pub fn a_hat(&self) -> &CsrMatrix {
        &self.a_hat
    }

    /// B = A_hat^2, precomputed once.
    pub fn a_hat_sq(&self) -> &CsrMatrix {
        &self.a_hat_sq
    }

    /// Self-loop-augmented degrees of the originating graph.
    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    /// Undirected edges recovered from the off-diagonal support of A_hat.
    pub fn edge_iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n()).flat_map(move |i| {
            let (idx, _) = self.a_hat.row(i);
            idx.iter().copied().filter(move |&j| j > i).map(move |j| (i, j))
        })
    }
}

/// Compute A_hat and B = A_hat^2 for a graph.
pub fn normalize(g: &Graph) -> NormalizedOperator {
    let n = g.n();
    let inv_sqrt: Vec<f64> = g.degrees.iter().map(|&d| 1.0 / (d as f64).sqrt()).collect();
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::with_capacity(n);
    for i in 0..n {
        let (idx, _) = g.csr.row(i);
        rows.push(
            idx.iter()
                .map(|&j| (j, inv_sqrt[i] * inv_sqrt[j]))
                .collect(),
        );
    }
    let a_hat = CsrMatrix::from_rows(n, rows);
    let a_hat_sq = a_hat.matmul_sparse(&a_hat);
    NormalizedOperator {
        a_hat,
        a_hat_sq,
        degrees: g.degrees.clone(),
    }
}

/// Nodes at exactly k hops from i (shortest-path semantics, self excluded).
pub fn khop_neighbors(g: &Graph, i: usize, k: usize) -> Result<NeighborSet> {
    if i >= g.n() {
        return Err(Error::NodeIndexOutOfRange { index: i, n: g.n() });
    }
    if k == 0 {
        return Err(Error::InvalidConfig("hop count k must be >= 1".into()));
    }
    let mut dist = vec![usize::MAX; g.n()];
    dist[i] = 0;
    let mut queue = VecDeque::new();
    queue.push_back(i);
    let mut members = Vec::new();
    while let Some(u) = queue.pop_front() {
        if dist[u] == k {
            continue;
        }
        for v in g.neighbors(u) {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                if dist[v] == k {
                    members.push(v);
                }
                queue.push_back(v);
            }
        }
    }
    members.sort_unstable();
    Ok(NeighborSet {
        node: i,
        hop: k,
        members,
    })
}

/// Read an edge list: one `u<TAB>v` pair per line, 0-based, `#` comments ignored.
pub fn read_edge_list(path: &Path) -> Result<Vec<(usize, usize)>> {
    let show = path.display().to_string();
    let file = std::fs::File::open(path).map_err(|e| Error::io(&show, e))?;
    let mut edges = Vec::new();
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(&show, e))?;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let mut it = body.split_whitespace();
        let (u, v) = match (it.next(), it.next(), it.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => {
                return Err(Error::parse(
                    &show,
                    format!("line {}: expected `u<TAB>v`", lineno + 1),
                ))
            }
        };
        let u: usize = u
            .parse()
            .map_err(|_| Error::parse(&show, format!("line {}: bad index `{u}`", lineno + 1)))?;
        let v: usize = v
            .parse()
            .map_err(|_| Error::parse(&show, format!("line {}: bad index `{v}`", lineno + 1)))?;
        edges.push((u, v));
    }
    Ok(edges)
}

pub fn write_edge_list(edges: &[(usize, usize)], path: &Path) -> Result<()> {
    let show = path.display().to_string();
    let mut f =
        std::io::BufWriter::new(std::fs::File::create(path).map_err(|e| Error::io(&show, e))?);
    for &(u, v) in edges {
        writeln!(f, "{u}\t{v}").map_err(|e| Error::io(&show, e))?;
    }
    Ok(())
}
