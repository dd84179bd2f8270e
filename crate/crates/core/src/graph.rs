//! Undirected simple graphs with the metric queries the curvature code needs.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    labels: Option<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct GraphFile {
    vertices: usize,
    edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

/// Per-edge triangle counts and their maximum.
#[derive(Clone, Debug)]
pub struct TriangleStats {
    /// `(u, v, t(u, v))` for each edge with `u < v`.
    pub per_edge: Vec<(usize, usize, usize)>,
    pub max: usize,
}

impl Graph {
    /// Builds a graph from an edge list. Loops and repeated edges are errors.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::VertexOutOfRange(u.max(v)));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("loop at vertex {u}")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for (u, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidGraph(format!("repeated edge at vertex {u}")));
            }
        }
        Ok(Self { adj, labels: None })
    }

    /// Builds from adjacency lists that are already symmetric and duplicate-free.
    pub(crate) fn from_adjacency_unchecked(mut adj: Vec<Vec<usize>>) -> Self {
        for list in &mut adj {
            list.sort_unstable();
        }
        Self { adj, labels: None }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.adj.len());
        self.labels = Some(labels);
        self
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn num_vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.adj.len() {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange(v))
        }
    }

    /// Edges `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.num_edges());
        for (u, list) in self.adj.iter().enumerate() {
            for &v in list {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// BFS distances from `x`, `None` for unreachable vertices.
    pub fn distances_from(&self, x: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.adj.len()];
        dist[x] = Some(0);
        let mut queue = VecDeque::from([x]);
        while let Some(u) = queue.pop_front() {
            let d = dist[u].unwrap();
            for &w in &self.adj[u] {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// The sphere `{u : dist(x, u) = i}`, sorted.
    pub fn ball(&self, x: usize, i: usize) -> Vec<usize> {
        match i {
            0 => vec![x],
            1 => self.adj[x].clone(),
            2 => self.sphere2(x),
            _ => self
                .distances_from(x)
                .iter()
                .enumerate()
                .filter(|(_, d)| **d == Some(i))
                .map(|(u, _)| u)
                .collect(),
        }
    }

    fn sphere2(&self, x: usize) -> Vec<usize> {
        let mut out = BTreeSet::new();
        for &v in &self.adj[x] {
            for &u in &self.adj[v] {
                if u != x && !self.has_edge(x, u) {
                    out.insert(u);
                }
            }
        }
        out.into_iter().collect()
    }

    pub fn num_components(&self) -> usize {
        let mut seen = vec![false; self.adj.len()];
        let mut count = 0;
        for s in 0..self.adj.len() {
            if seen[s] {
                continue;
            }
            count += 1;
            seen[s] = true;
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for &w in &self.adj[u] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        count
    }

    pub fn is_connected(&self) -> bool {
        self.num_components() <= 1
    }

    /// Number of common neighbours of `u` and `v`.
    pub fn common_neighbors(&self, u: usize, v: usize) -> usize {
        let (a, b) = (&self.adj[u], &self.adj[v]);
        let (mut i, mut j, mut c) = (0, 0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    c += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        c
    }

    /// Triangles through each edge. Non-adjacent pairs lie on no common
    /// triangle, so the supremum over all pairs is the maximum over edges.
    pub fn triangle_stats(&self) -> TriangleStats {
        let per_edge: Vec<_> = self
            .edges()
            .into_iter()
            .map(|(u, v)| (u, v, self.common_neighbors(u, v)))
            .collect();
        let max = per_edge.iter().map(|e| e.2).max().unwrap_or(0);
        TriangleStats { per_edge, max }
    }

    /// Union of all paths of length 1 and 2 from `x`. Returns the subgraph and
    /// the original vertex of each new index; `x` becomes vertex 0.
    pub fn two_ball_subgraph(&self, x: usize) -> (Graph, Vec<usize>) {
        let s1 = self.ball(x, 1);
        let s2 = self.ball(x, 2);
        let mut order = vec![x];
        order.extend(&s1);
        order.extend(&s2);
        let mut index = std::collections::HashMap::with_capacity(order.len());
        for (k, &v) in order.iter().enumerate() {
            index.insert(v, k);
        }
        let n1 = 1 + s1.len();
        let mut edges = Vec::new();
        for (k, &v) in order.iter().enumerate().take(n1).skip(1) {
            edges.push((0, k));
            for &w in &self.adj[v] {
                if w == x {
                    continue;
                }
                let kw = index[&w];
                // edges inside the first sphere are listed once
                if kw >= n1 || kw > k {
                    edges.push((k, kw));
                }
            }
        }
        let g = Graph::from_edges(order.len(), &edges).expect("subgraph edges are simple");
        (g, order)
    }

    /// Relabels vertices through `map` (old -> new), which must be a bijection.
    pub fn relabel(&self, map: &[usize]) -> Graph {
        let mut adj = vec![Vec::new(); self.adj.len()];
        for (u, list) in self.adj.iter().enumerate() {
            adj[map[u]] = list.iter().map(|&v| map[v]).collect();
        }
        Graph::from_adjacency_unchecked(adj)
    }

    /// Parses `u v` pairs, one per line. `#` starts a comment. The vertex
    /// count is one more than the largest id seen.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut edges = Vec::new();
        let mut n = 0;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            let parse = |s: &str| {
                s.parse::<usize>().map_err(|_| {
                    Error::InvalidGraph(format!("line {}: bad vertex `{s}`", lineno + 1))
                })
            };
            if parts.len() != 2 {
                return Err(Error::InvalidGraph(format!(
                    "line {}: expected `u v`",
                    lineno + 1
                )));
            }
            let (u, v) = (parse(parts[0])?, parse(parts[1])?);
            n = n.max(u + 1).max(v + 1);
            edges.push((u, v));
        }
        Graph::from_edges(n, &edges)
    }

    pub fn to_edge_list(&self) -> String {
        let mut s = String::new();
        for (u, v) in self.edges() {
            writeln!(s, "{u} {v}").unwrap();
        }
        s
    }

    pub fn to_json(&self) -> String {
        let file = GraphFile {
            vertices: self.num_vertices(),
            edges: self.edges().into_iter().map(|(u, v)| [u, v]).collect(),
            labels: self.labels.clone(),
        };
        serde_json::to_string(&file).expect("plain integers")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: GraphFile = serde_json::from_str(text)?;
        let edges: Vec<_> = file.edges.iter().map(|e| (e[0], e[1])).collect();
        let g = Graph::from_edges(file.vertices, &edges)?;
        match file.labels {
            Some(l) if l.len() == g.num_vertices() => Ok(g.with_labels(l)),
            Some(_) => Err(Error::InvalidGraph("label count mismatch".into())),
            None => Ok(g),
        }
    }

    /// Reads JSON for `.json` files, the edge-list format otherwise.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        if path.extension().is_some_and(|e| e == "json") {
            Self::from_json(&text)
        } else {
            Self::parse_edge_list(&text)
        }
    }

    /// DOT output. `rank` groups vertices into `rank=same` layers.
    pub fn to_dot(&self, name: &str, rank: Option<&[usize]>) -> String {
        let mut s = format!("graph \"{name}\" {{\n");
        for v in 0..self.num_vertices() {
            match self.labels.as_ref() {
                Some(l) => writeln!(s, "  {v} [label=\"{}\"];", l[v]).unwrap(),
                None => writeln!(s, "  {v};").unwrap(),
            }
        }
        if let Some(rank) = rank {
            let top = rank.iter().copied().max().unwrap_or(0);
            for r in 0..=top {
                let members: Vec<String> = (0..self.num_vertices())
                    .filter(|&v| rank[v] == r)
                    .map(|v| v.to_string())
                    .collect();
                if !members.is_empty() {
                    writeln!(s, "  {{ rank=same; {}; }}", members.join("; ")).unwrap();
                }
            }
        }
        for (u, v) in self.edges() {
            writeln!(s, "  {u} -- {v};").unwrap();
        }
        s.push_str("}\n");
        s
    }
}

/// Small named graphs used in tests and examples.
pub mod named {
    use super::Graph;

    pub fn path(n: usize) -> Graph {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    pub fn cycle(n: usize) -> Graph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    pub fn complete(n: usize) -> Graph {
        let edges: Vec<_> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    pub fn complete_bipartite(a: usize, b: usize) -> Graph {
        let edges: Vec<_> = (0..a)
            .flat_map(|i| (0..b).map(move |j| (i, a + j)))
            .collect();
        Graph::from_edges(a + b, &edges).unwrap()
    }

    pub fn hypercube(d: u32) -> Graph {
        let n = 1usize << d;
        let edges: Vec<_> = (0..n)
            .flat_map(|v| (0..d).map(move |b| (v, v ^ (1 << b))))
            .filter(|(u, v)| u < v)
            .collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    /// `G(n, p)` drawn from a seeded generator.
    pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Graph {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_xoshiro::Xoshiro256PlusPlus::seed_from_u64(seed);
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.gen_bool(p) {
                    edges.push((i, j));
                }
            }
        }
        Graph::from_edges(n, &edges).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::named::*;
    use super::*;

    #[test]
    fn spheres() {
        let c4 = cycle(4);
        assert_eq!(c4.ball(0, 2), vec![2]);
        assert_eq!(c4.ball(0, 0), vec![0]);
        let k33 = complete_bipartite(3, 3);
        assert_eq!(k33.ball(0, 1), vec![3, 4, 5]);
        assert_eq!(k33.ball(0, 2), vec![1, 2]);
        let c8 = cycle(8);
        assert_eq!(c8.ball(0, 3), vec![3, 5]);
        assert_eq!(c8.ball(0, 4), vec![4]);
        for v in 0..8 {
            assert_eq!(c8.ball(v, 1).len(), c8.degree(v));
        }
    }

    #[test]
    fn triangles() {
        assert_eq!(cycle(4).triangle_stats().max, 0);
        let k4 = complete(4).triangle_stats();
        assert_eq!(k4.max, 2);
        assert!(k4.per_edge.iter().all(|e| e.2 == 2));
        assert_eq!(complete_bipartite(3, 3).triangle_stats().max, 0);
    }

    #[test]
    fn two_ball_of_c6() {
        let (sub, order) = cycle(6).two_ball_subgraph(0);
        assert_eq!(sub.num_vertices(), 5);
        assert_eq!(sub.num_edges(), 4);
        assert_eq!(order[0], 0);
        let (sub, _) = complete(2).two_ball_subgraph(0);
        assert_eq!(sub, complete(2));
    }

    #[test]
    fn two_ball_drops_edges_inside_second_sphere() {
        // 0 - {1, 2}; 1 - 3, 2 - 4, 3 - 4 (edge inside the second sphere)
        let g = Graph::from_edges(5, &[(0, 1), (0, 2), (1, 3), (2, 4), (3, 4), (1, 2)]).unwrap();
        let (sub, order) = g.two_ball_subgraph(0);
        assert_eq!(sub.num_edges(), 5);
        let pos = |v: usize| order.iter().position(|&o| o == v).unwrap();
        assert!(!sub.has_edge(pos(3), pos(4)));
        assert!(sub.has_edge(pos(1), pos(2)));
    }

    #[test]
    fn rejects_loops_and_duplicates() {
        assert!(Graph::from_edges(2, &[(0, 0)]).is_err());
        assert!(Graph::from_edges(2, &[(0, 1), (1, 0)]).is_err());
        assert!(Graph::from_edges(2, &[(0, 2)]).is_err());
    }

    #[test]
    fn edge_list_and_json_formats() {
        let g = Graph::parse_edge_list("# a 5-cycle\n0 1\n1 2\n2 3\n3 4\n4 0\n").unwrap();
        assert_eq!(g, cycle(5));
        assert_eq!(Graph::parse_edge_list(&g.to_edge_list()).unwrap(), g);
        assert_eq!(Graph::from_json(&g.to_json()).unwrap(), g);
        assert!(Graph::parse_edge_list("0 1 2\n").is_err());
        assert!(Graph::parse_edge_list("0 a\n").is_err());
        let dot = g.to_dot("c5", Some(&[0, 1, 2, 2, 1]));
        assert!(dot.contains("0 -- 1;") && dot.contains("rank=same; 2; 3;"));
    }

    #[test]
    fn components() {
        assert_eq!(cycle(5).num_components(), 1);
        let g = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(g.num_components(), 2);
        assert_eq!(hypercube(3).num_edges(), 12);
    }
}
