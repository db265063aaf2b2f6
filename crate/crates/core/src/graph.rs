//! Finite simple undirected graphs with the shortest-path extended metric,
//! plus the girth, cycle and component machinery the homology layers build on.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// An extended non-negative integer: a finite hop count or infinity.
///
/// Used for distances and girths. Infinity means "no path" / "no cycle
/// through this locus" and always serializes as `inf`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash, Serialize)]
pub enum Dist {
    Finite(u32),
    Infinity,
}

impl Dist {
    pub fn is_finite(self) -> bool {
        matches!(self, Dist::Finite(_))
    }

    /// Unwraps a finite value; panics on infinity.
    pub fn finite(self) -> u32 {
        match self {
            Dist::Finite(v) => v,
            Dist::Infinity => panic!("expected finite distance"),
        }
    }
}

impl PartialOrd for Dist {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dist {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        match (self, other) {
            (Dist::Finite(a), Dist::Finite(b)) => a.cmp(b),
            (Dist::Finite(_), Dist::Infinity) => std::cmp::Ordering::Less,
            (Dist::Infinity, Dist::Finite(_)) => std::cmp::Ordering::Greater,
            (Dist::Infinity, Dist::Infinity) => std::cmp::Ordering::Equal,
        }
    }
}

impl std::ops::Add for Dist {
    type Output = Dist;
    fn add(self, rhs: Dist) -> Dist {
        match (self, rhs) {
            (Dist::Finite(a), Dist::Finite(b)) => Dist::Finite(a + b),
            _ => Dist::Infinity,
        }
    }
}

impl std::ops::Add<u32> for Dist {
    type Output = Dist;
    fn add(self, rhs: u32) -> Dist {
        self + Dist::Finite(rhs)
    }
}

impl fmt::Display for Dist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dist::Finite(v) => write!(f, "{v}"),
            Dist::Infinity => write!(f, "inf"),
        }
    }
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("vertex set must be nonempty")]
    EmptyVertexSet,
    #[error("self-loop at vertex {0} is not allowed")]
    SelfLoop(usize),
    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("{{{0}, {1}}} is not an edge")]
    NotAnEdge(usize, usize),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// An immutable simple undirected graph on vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<usize>>,
    edges: BTreeSet<(usize, usize)>,
}

/// All-pairs shortest-path distances in edge hops.
#[derive(Clone, Debug)]
pub struct DistanceMatrix {
    d: Vec<Vec<Dist>>,
}

impl DistanceMatrix {
    #[inline]
    pub fn get(&self, x: usize, y: usize) -> Dist {
        self.d[x][y]
    }

    pub fn n(&self) -> usize {
        self.d.len()
    }

    /// Largest finite distance, or Infinity if some pair is disconnected.
    pub fn diameter(&self) -> Dist {
        let mut max = Dist::Finite(0);
        for row in &self.d {
            for &v in row {
                if v > max {
                    max = v;
                }
            }
        }
        max
    }
}

/// Connected components with deterministic ids (minimum contained vertex).
#[derive(Clone, Debug, Serialize)]
pub struct ComponentDecomposition {
    /// Number of components, ξ(G).
    pub count: usize,
    /// vertex -> component id (the minimum vertex id in the component).
    pub assignment: Vec<usize>,
    pub components: Vec<ComponentInfo>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComponentInfo {
    pub id: usize,
    /// Sorted vertex ids.
    pub vertices: Vec<usize>,
    pub edge_count: usize,
}

impl ComponentInfo {
    pub fn circuit_rank(&self) -> usize {
        self.edge_count + 1 - self.vertices.len()
    }

    pub fn is_tree(&self) -> bool {
        self.edge_count + 1 == self.vertices.len()
    }
}

/// Per-locus girth values.
#[derive(Clone, Debug, Serialize)]
pub struct GirthReport {
    pub global: Dist,
    pub per_vertex: Vec<Dist>,
    pub per_edge: Vec<((usize, usize), Dist)>,
}

/// Outcome of the pawful check, carrying a refutation witness on failure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum PawfulVerdict {
    Pawful,
    /// A pair at distance > 2 (or disconnected).
    DiameterWitness(usize, usize),
    /// A triple (x, y, z) with d(x,y) = d(y,z) = 2, d(z,x) = 1 and no
    /// common neighbor.
    TripleWitness(usize, usize, usize),
}

impl PawfulVerdict {
    pub fn is_pawful(&self) -> bool {
        matches!(self, PawfulVerdict::Pawful)
    }
}

impl Graph {
    /// Builds a graph on `n` vertices from an edge iterator. Duplicate edges
    /// collapse; self-loops and out-of-range endpoints are rejected.
    pub fn new(
        n: usize,
        edge_iter: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::EmptyVertexSet);
        }
        let mut edges = BTreeSet::new();
        for (u, v) in edge_iter {
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            let w = u.max(v);
            if w >= n {
                return Err(GraphError::VertexOutOfRange { vertex: w, n });
            }
            edges.insert((u.min(v), u.max(v)));
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Graph { n, adj, edges })
    }

    /// Parses the edge-list text format: lines `u v`, an optional header
    /// `n <count>`, `#` comments and blank lines ignored.
    pub fn parse(text: &str) -> Result<Self, GraphError> {
        let mut declared_n: usize = 0;
        let mut max_id: Option<usize> = None;
        let mut edges = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let first = parts.next().unwrap();
            if first == "n" {
                let count = parts
                    .next()
                    .ok_or_else(|| GraphError::Parse {
                        line: line_no,
                        message: "header `n` needs a vertex count".into(),
                    })?
                    .parse::<usize>()
                    .map_err(|e| GraphError::Parse {
                        line: line_no,
                        message: format!("bad vertex count: {e}"),
                    })?;
                if parts.next().is_some() {
                    return Err(GraphError::Parse {
                        line: line_no,
                        message: "trailing tokens after header".into(),
                    });
                }
                declared_n = declared_n.max(count);
                continue;
            }
            let parse_vertex = |tok: &str| {
                tok.parse::<usize>().map_err(|e| GraphError::Parse {
                    line: line_no,
                    message: format!("bad vertex id `{tok}`: {e}"),
                })
            };
            let u = parse_vertex(first)?;
            let v = parse_vertex(parts.next().ok_or_else(|| GraphError::Parse {
                line: line_no,
                message: "expected `u v`".into(),
            })?)?;
            if parts.next().is_some() {
                return Err(GraphError::Parse {
                    line: line_no,
                    message: "trailing tokens after edge".into(),
                });
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            max_id = Some(max_id.map_or(u.max(v), |m| m.max(u.max(v))));
            edges.push((u, v));
        }
        let n = declared_n.max(max_id.map_or(0, |m| m + 1));
        Graph::new(n, edges)
    }

    /// Emits the edge-list format deterministically: header line, then edges
    /// sorted lexicographically.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("n {}\n", self.n);
        for &(u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn neighbors(&self, x: usize) -> &[usize] {
        &self.adj[x]
    }

    pub fn degree(&self, x: usize) -> usize {
        self.adj[x].len()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|x| self.degree(x)).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    /// BFS distances from `src`; `skip` optionally removes one edge.
    fn bfs(&self, src: usize, skip: Option<(usize, usize)>) -> Vec<Dist> {
        let mut dist = vec![Dist::Infinity; self.n];
        dist[src] = Dist::Finite(0);
        let mut queue = std::collections::VecDeque::new();
        queue.push_back(src);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].finite();
            for &v in &self.adj[u] {
                if let Some((a, b)) = skip {
                    if (u == a && v == b) || (u == b && v == a) {
                        continue;
                    }
                }
                if dist[v] == Dist::Infinity {
                    dist[v] = Dist::Finite(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub fn distances_from(&self, src: usize) -> Vec<Dist> {
        self.bfs(src, None)
    }

    /// All-pairs distances by BFS from every vertex.
    pub fn distances(&self) -> DistanceMatrix {
        DistanceMatrix {
            d: (0..self.n).map(|x| self.bfs(x, None)).collect(),
        }
    }

    pub fn components(&self) -> ComponentDecomposition {
        let mut assignment = vec![usize::MAX; self.n];
        let mut components = Vec::new();
        for start in 0..self.n {
            if assignment[start] != usize::MAX {
                continue;
            }
            let mut vertices = vec![start];
            assignment[start] = start;
            let mut queue = std::collections::VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                for &v in &self.adj[u] {
                    if assignment[v] == usize::MAX {
                        assignment[v] = start;
                        vertices.push(v);
                        queue.push_back(v);
                    }
                }
            }
            vertices.sort_unstable();
            let edge_count = vertices.iter().map(|&v| self.degree(v)).sum::<usize>() / 2;
            components.push(ComponentInfo {
                id: start,
                vertices,
                edge_count,
            });
        }
        ComponentDecomposition {
            count: components.len(),
            assignment,
            components,
        }
    }

    /// The subgraph induced on `vertices` (which must be sorted and distinct),
    /// with vertex ids remapped to `0..vertices.len()`. Returns the subgraph
    /// together with the map back to the original ids.
    pub fn induced_subgraph(&self, vertices: &[usize]) -> (Graph, Vec<usize>) {
        let mut index = vec![usize::MAX; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            index[v] = i;
        }
        let mut edges = Vec::new();
        for &(u, v) in &self.edges {
            if index[u] != usize::MAX && index[v] != usize::MAX {
                edges.push((index[u], index[v]));
            }
        }
        let g = Graph::new(vertices.len(), edges).expect("induced subgraph is valid");
        (g, vertices.to_vec())
    }

    /// Length of the shortest cycle containing the edge `{u, v}`:
    /// 1 + d(u, v) in the graph with that single edge removed.
    pub fn girth_edge(&self, u: usize, v: usize) -> Result<Dist, GraphError> {
        if !self.has_edge(u, v) {
            return Err(GraphError::NotAnEdge(u, v));
        }
        let dist = self.bfs(u, Some((u, v)));
        Ok(dist[v] + 1)
    }

    /// Length of the shortest cycle through `x`: min of `girth_edge` over
    /// edges incident to `x`.
    pub fn girth_vertex(&self, x: usize) -> Dist {
        self.adj[x]
            .iter()
            .map(|&y| self.girth_edge(x, y).expect("incident edge"))
            .min()
            .unwrap_or(Dist::Infinity)
    }

    pub fn girth(&self) -> Dist {
        self.edges
            .iter()
            .map(|&(u, v)| self.girth_edge(u, v).expect("edge"))
            .min()
            .unwrap_or(Dist::Infinity)
    }

    pub fn girth_report(&self) -> GirthReport {
        let per_edge: Vec<_> = self
            .edges
            .iter()
            .map(|&(u, v)| ((u, v), self.girth_edge(u, v).expect("edge")))
            .collect();
        let per_vertex = (0..self.n).map(|x| self.girth_vertex(x)).collect();
        let global = per_edge
            .iter()
            .map(|&(_, g)| g)
            .min()
            .unwrap_or(Dist::Infinity);
        GirthReport {
            global,
            per_vertex,
            per_edge,
        }
    }

    /// r(G) = #E - #V + ξ(G).
    pub fn circuit_rank(&self) -> usize {
        self.edge_count() + self.components().count - self.n
    }

    /// Number of vertices lying in tree components.
    pub fn tree_vertex_count(&self) -> usize {
        self.components()
            .components
            .iter()
            .filter(|c| c.is_tree())
            .map(|c| c.vertices.len())
            .sum()
    }

    /// Exact unlabeled cycle counts C_i for 3 <= i <= m, by pruned DFS.
    ///
    /// A cycle is counted once per vertex subset with its cyclic structure:
    /// the DFS roots each cycle at its smallest vertex and fixes the
    /// direction by requiring the second vertex to be smaller than the last.
    pub fn count_cycles_up_to(&self, m: usize) -> Vec<u64> {
        assert!(m >= 3, "cycle length bound must be at least 3");
        let mut counts = vec![0u64; m + 1];
        let mut on_path = vec![false; self.n];
        let mut path = Vec::with_capacity(m);
        for root in 0..self.n {
            path.push(root);
            on_path[root] = true;
            self.cycle_dfs(root, root, m, &mut path, &mut on_path, &mut counts);
            on_path[root] = false;
            path.pop();
        }
        counts.drain(..3.min(counts.len()));
        counts
    }

    fn cycle_dfs(
        &self,
        root: usize,
        current: usize,
        m: usize,
        path: &mut Vec<usize>,
        on_path: &mut Vec<bool>,
        counts: &mut Vec<u64>,
    ) {
        for &next in &self.adj[current] {
            if next == root {
                // Count once per direction: second vertex below last.
                if path.len() >= 3 && path[1] < *path.last().unwrap() {
                    counts[path.len()] += 1;
                }
                continue;
            }
            if next < root || on_path[next] || path.len() == m {
                continue;
            }
            path.push(next);
            on_path[next] = true;
            self.cycle_dfs(root, next, m, path, on_path, counts);
            on_path[next] = false;
            path.pop();
        }
    }

    /// Pawful test: diameter at most 2, and every triple x, y, z with
    /// d(x,y) = d(y,z) = 2, d(z,x) = 1 has a common neighbor.
    pub fn is_pawful(&self) -> PawfulVerdict {
        let words = self.n.div_ceil(64);
        let mut adj_bits = vec![vec![0u64; words]; self.n];
        for &(u, v) in &self.edges {
            adj_bits[u][v / 64] |= 1 << (v % 64);
            adj_bits[v][u / 64] |= 1 << (u % 64);
        }
        // dist2[x]: vertices at distance exactly 2 from x, with a diameter
        // check on the way.
        let mut dist2 = vec![vec![0u64; words]; self.n];
        for x in 0..self.n {
            let mut reach = adj_bits[x].clone();
            for &y in &self.adj[x] {
                for w in 0..words {
                    reach[w] |= adj_bits[y][w];
                }
            }
            reach[x / 64] |= 1 << (x % 64);
            for y in 0..self.n {
                if reach[y / 64] >> (y % 64) & 1 == 0 {
                    return PawfulVerdict::DiameterWitness(x, y);
                }
            }
            for w in 0..words {
                dist2[x][w] = reach[w] & !adj_bits[x][w];
            }
            dist2[x][x / 64] &= !(1 << (x % 64));
        }
        for &(z, x) in &self.edges {
            for (z, x) in [(z, x), (x, z)] {
                // y ranges over vertices at distance 2 from both x and z.
                for w in 0..words {
                    let mut candidates = dist2[x][w] & dist2[z][w];
                    while candidates != 0 {
                        let y = w * 64 + candidates.trailing_zeros() as usize;
                        candidates &= candidates - 1;
                        let has_common = (0..words)
                            .any(|w2| adj_bits[x][w2] & adj_bits[y][w2] & adj_bits[z][w2] != 0);
                        if !has_common {
                            return PawfulVerdict::TripleWitness(x, y, z);
                        }
                    }
                }
            }
        }
        PawfulVerdict::Pawful
    }

    pub fn is_complete(&self) -> bool {
        self.edge_count() == self.n * (self.n - 1) / 2
    }
}

/// Builders for the standard small graphs the tests and experiments use.
pub mod families {
    use super::Graph;

    pub fn path(n: usize) -> Graph {
        Graph::new(n, (1..n).map(|i| (i - 1, i))).unwrap()
    }

    pub fn cycle(n: usize) -> Graph {
        assert!(n >= 3);
        Graph::new(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    pub fn complete(n: usize) -> Graph {
        Graph::new(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)))).unwrap()
    }

    pub fn petersen() -> Graph {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5)); // outer 5-cycle
            edges.push((i, i + 5)); // spokes
            edges.push((i + 5, (i + 2) % 5 + 5)); // inner pentagram
        }
        Graph::new(10, edges).unwrap()
    }

    /// Triangle with a pendant edge.
    pub fn paw() -> Graph {
        Graph::new(4, [(0, 1), (1, 2), (2, 0), (2, 3)]).unwrap()
    }
}
