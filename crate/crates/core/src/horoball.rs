//! Truncated combinatorial horoballs over finite base graphs.

use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};

const UNREACHED: u32 = u32::MAX;

/// Finite simple graph with all-pairs distances.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseGraph {
    names: Vec<String>,
    adj: Vec<Vec<usize>>,
    dist: Vec<Vec<u32>>,
}

impl BaseGraph {
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        BaseGraph::named((0..n).map(|i| i.to_string()).collect(), edges)
    }

    pub fn named(names: Vec<String>, edges: &[(usize, usize)]) -> Result<Self> {
        let n = names.len();
        if n == 0 {
            return Err(Error::EmptyInput("base graph"));
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::MalformedInput(format!("edge ({u}, {v}) out of range")));
            }
            if u == v {
                return Err(Error::MalformedInput(format!("loop at vertex {u}")));
            }
            if !adj[u].contains(&v) {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
        for row in &mut adj {
            row.sort_unstable();
        }
        let dist = (0..n).map(|s| bfs(&adj, s)).collect();
        Ok(BaseGraph { names, adj, dist })
    }

    pub fn path(n: usize) -> Result<Self> {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        BaseGraph::from_edges(n, &edges)
    }

    pub fn cycle(n: usize) -> Result<Self> {
        let mut edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        if n > 2 {
            edges.push((n - 1, 0));
        }
        BaseGraph::from_edges(n, &edges)
    }

    /// Parses `u v` lines; names are numbered in order of first appearance.
    /// Blank lines and lines starting with `#` are skipped.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut names: Vec<String> = Vec::new();
        let mut ids: HashMap<String, usize> = HashMap::new();
        let mut edges = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 2 {
                return Err(Error::MalformedInput(format!(
                    "line {}: expected two vertex names",
                    lineno + 1
                )));
            }
            let mut id = |s: &str| {
                *ids.entry(s.to_string()).or_insert_with(|| {
                    names.push(s.to_string());
                    names.len() - 1
                })
            };
            let (u, v) = (id(parts[0]), id(parts[1]));
            edges.push((u, v));
        }
        BaseGraph::named(names, &edges)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Base distance, `None` when disconnected.
    pub fn distance(&self, u: usize, v: usize) -> Option<usize> {
        let d = self.dist[u][v];
        (d != UNREACHED).then_some(d as usize)
    }

    pub fn diameter(&self) -> usize {
        self.dist
            .iter()
            .flatten()
            .filter(|&&d| d != UNREACHED)
            .copied()
            .max()
            .unwrap_or(0) as usize
    }

    /// Least-index base geodesic from `u` to `v`.
    pub fn geodesic(&self, u: usize, v: usize) -> Option<Vec<usize>> {
        let mut d = self.distance(u, v)?;
        let mut path = vec![u];
        let mut cur = u;
        while d > 0 {
            cur = *self.adj[cur]
                .iter()
                .find(|&&x| self.dist[x][v] as usize == d - 1)
                .expect("distance decreases along a neighbour");
            path.push(cur);
            d -= 1;
        }
        Some(path)
    }

    /// `ceil(log2(diameter)) + 2`.
    pub fn default_depth(&self) -> usize {
        let diam = self.diameter().max(1);
        ceil_log2(diam) + 2
    }
}

pub fn ceil_log2(n: usize) -> usize {
    debug_assert!(n >= 1);
    (usize::BITS - (n - 1).leading_zeros()) as usize
}

fn bfs(adj: &[Vec<usize>], s: usize) -> Vec<u32> {
    let mut dist = vec![UNREACHED; adj.len()];
    dist[s] = 0;
    let mut queue = VecDeque::from([s]);
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if dist[v] == UNREACHED {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}

/// Horoball vertex `(base vertex, depth)`.
pub type HoroVertex = (usize, usize);

#[derive(Clone, Debug)]
pub struct TruncatedHoroball {
    base: BaseGraph,
    depth: usize,
    adj: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RegularGeodesic {
    pub path: Vec<HoroVertex>,
    pub bfs_distance: usize,
    /// Excess length over the true distance, when positive.
    pub gap: Option<usize>,
}

impl TruncatedHoroball {
    pub fn build(base: BaseGraph, depth: usize) -> Result<Self> {
        if base.is_empty() {
            return Err(Error::EmptyInput("base graph"));
        }
        if depth == 0 {
            return Err(Error::Precondition("horoball depth must be at least 1".into()));
        }
        let layers = depth + 1;
        let n = base.len();
        let mut adj = vec![Vec::new(); n * layers];
        for v in 0..n {
            for k in 0..layers {
                let id = v * layers + k;
                if k > 0 {
                    adj[id].push(id - 1);
                }
                if k < depth {
                    adj[id].push(id + 1);
                }
            }
            for &w in base.neighbors(v) {
                adj[v * layers].push(w * layers);
            }
            for k in 1..layers {
                let span = 1u64 << k.min(63);
                for w in 0..n {
                    let d = base.dist[v][w];
                    if d != UNREACHED && d > 0 && (d as u64) <= span {
                        adj[v * layers + k].push(w * layers + k);
                    }
                }
            }
        }
        for row in &mut adj {
            row.sort_unstable();
        }
        Ok(TruncatedHoroball { base, depth, adj })
    }

    pub fn base(&self) -> &BaseGraph {
        &self.base
    }

    pub fn max_depth(&self) -> usize {
        self.depth
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn index(&self, (v, k): HoroVertex) -> Result<usize> {
        if v >= self.base.len() || k > self.depth {
            return Err(Error::VertexNotFound(format!("({v},{k})")));
        }
        Ok(v * (self.depth + 1) + k)
    }

    pub fn vertex(&self, id: usize) -> HoroVertex {
        (id / (self.depth + 1), id % (self.depth + 1))
    }

    pub fn neighbors(&self, id: usize) -> &[usize] {
        &self.adj[id]
    }

    /// Edges as index pairs `(i, j)` with `i < j`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
    }

    pub fn distances_from(&self, p: HoroVertex) -> Result<Vec<u32>> {
        Ok(bfs(&self.adj, self.index(p)?))
    }

    pub fn distance(&self, p: HoroVertex, q: HoroVertex) -> Result<usize> {
        let qi = self.index(q)?;
        let d = self.distances_from(p)?[qi];
        if d == UNREACHED {
            return Err(Error::Structural(format!("{p:?} and {q:?} are disconnected")));
        }
        Ok(d as usize)
    }

    /// Deterministic geodesic: from `p`, always step to the least-index
    /// neighbour that is one closer to `q`.
    pub fn geodesic(&self, p: HoroVertex, q: HoroVertex) -> Result<Vec<HoroVertex>> {
        let pi = self.index(p)?;
        let dist = self.distances_from(q)?;
        if dist[pi] == UNREACHED {
            return Err(Error::Structural(format!("{p:?} and {q:?} are disconnected")));
        }
        let mut cur = pi;
        let mut path = vec![self.vertex(cur)];
        while dist[cur] > 0 {
            cur = *self.adj[cur]
                .iter()
                .find(|&&x| dist[x] + 1 == dist[cur])
                .expect("neighbour one step closer");
            path.push(self.vertex(cur));
        }
        Ok(path)
    }

    fn horizontal_hops(&self, d: usize, m: usize) -> usize {
        if m == 0 {
            d
        } else {
            d.div_ceil(1usize << m.min(63))
        }
    }

    /// Shortest vertical, horizontal, vertical path from `p` to `q`.
    pub fn regular_geodesic(&self, p: HoroVertex, q: HoroVertex) -> Result<RegularGeodesic> {
        let (v, k1) = p;
        let (w, k2) = q;
        let bfs_distance = self.distance(p, q)?;
        let d = self
            .base
            .distance(v, w)
            .ok_or_else(|| Error::Structural(format!("{p:?} and {q:?} are disconnected")))?;
        let lo = if d == 0 { k1.min(k2) } else { 0 };
        let (best_m, best_len) = (lo..=self.depth)
            .map(|m| (m, k1.abs_diff(m) + k2.abs_diff(m) + self.horizontal_hops(d, m)))
            .min_by_key(|&(m, len)| (len, std::cmp::Reverse(m)))
            .expect("non-empty depth range");
        let mut path = Vec::with_capacity(best_len + 1);
        let step_to = |from: usize, to: usize| -> Vec<usize> {
            if from <= to {
                (from..=to).collect()
            } else {
                (to..=from).rev().collect()
            }
        };
        for k in step_to(k1, best_m) {
            path.push((v, k));
        }
        let span = if best_m == 0 { 1 } else { 1usize << best_m };
        let line = self.base.geodesic(v, w).expect("connected");
        let mut i = 0;
        while i < d {
            i = (i + span).min(d);
            path.push((line[i], best_m));
        }
        for k in step_to(best_m, k2).into_iter().skip(1) {
            path.push((w, k));
        }
        debug_assert_eq!(path.len(), best_len + 1);
        let gap = (best_len > bfs_distance).then_some(best_len - bfs_distance);
        Ok(RegularGeodesic {
            path,
            bfs_distance,
            gap,
        })
    }

    /// Edge list with `(name,k)` vertex labels, one edge per line.
    pub fn export_edge_list(&self) -> String {
        let label = |id: usize| {
            let (v, k) = self.vertex(id);
            format!("({},{})", self.base.name(v), k)
        };
        let mut out = String::new();
        for (i, j) in self.edges() {
            out.push_str(&label(i));
            out.push(' ');
            out.push_str(&label(j));
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Direct pair-by-pair count of the edge definition.
    fn oracle_edge_count(base: &BaseGraph, depth: usize) -> usize {
        let n = base.len();
        let mut count = n * depth + base.edge_count();
        for k in 1..=depth {
            for v in 0..n {
                for w in v + 1..n {
                    if let Some(d) = base.distance(v, w) {
                        if d <= 1 << k {
                            count += 1;
                        }
                    }
                }
            }
        }
        count
    }

    #[test]
    fn small_counts() {
        let h = TruncatedHoroball::build(BaseGraph::path(2).unwrap(), 1).unwrap();
        assert_eq!(h.vertex_count(), 4);
        assert_eq!(h.edge_count(), oracle_edge_count(h.base(), 1));
        assert_eq!(h.edge_count(), 4);
        let ray = TruncatedHoroball::build(BaseGraph::path(1).unwrap(), 3).unwrap();
        assert_eq!((ray.vertex_count(), ray.edge_count()), (4, 3));
        assert_eq!(ray.distance((0, 0), (0, 3)).unwrap(), 3);
    }

    #[test]
    fn edge_counts_match_oracle() {
        for n in 1..12 {
            for depth in 1..5 {
                let h = TruncatedHoroball::build(BaseGraph::path(n).unwrap(), depth).unwrap();
                assert_eq!(h.edge_count(), oracle_edge_count(h.base(), depth));
                let c = TruncatedHoroball::build(BaseGraph::cycle(n).unwrap(), depth).unwrap();
                assert_eq!(c.edge_count(), oracle_edge_count(c.base(), depth));
            }
        }
    }

    #[test]
    fn cycle_depth_three_is_complete() {
        let h = TruncatedHoroball::build(BaseGraph::cycle(8).unwrap(), 3).unwrap();
        for v in 0..8 {
            let id = h.index((v, 3)).unwrap();
            let horizontal = h.neighbors(id).iter().filter(|&&j| h.vertex(j).1 == 3).count();
            assert_eq!(horizontal, 7);
        }
    }

    #[test]
    fn distance_examples() {
        let h = TruncatedHoroball::build(BaseGraph::path(9).unwrap(), 4).unwrap();
        assert_eq!(h.distance((0, 2), (4, 2)).unwrap(), 1);
        assert_eq!(h.distance((0, 0), (8, 0)).unwrap(), 6);
        let g = h.geodesic((0, 0), (8, 0)).unwrap();
        assert_eq!(g.len(), 7);
        assert_eq!(g.iter().map(|x| x.1).max(), Some(2));
        assert_eq!(h.geodesic((3, 0), (3, 2)).unwrap(), vec![(3, 0), (3, 1), (3, 2)]);
        assert_eq!(h.geodesic((3, 1), (3, 1)).unwrap(), vec![(3, 1)]);
        assert!(h.distance((9, 0), (0, 0)).is_err());
        assert!(h.distance((0, 5), (0, 0)).is_err());
    }

    #[test]
    fn regular_geodesic_examples() {
        let h = TruncatedHoroball::build(BaseGraph::path(9).unwrap(), 4).unwrap();
        let r = h.regular_geodesic((0, 0), (8, 0)).unwrap();
        assert_eq!(
            r.path,
            vec![(0, 0), (0, 1), (0, 2), (4, 2), (8, 2), (8, 1), (8, 0)]
        );
        assert_eq!(r.gap, None);
        let v = h.regular_geodesic((2, 0), (2, 3)).unwrap();
        assert_eq!(v.path, vec![(2, 0), (2, 1), (2, 2), (2, 3)]);
        let across = h.regular_geodesic((0, 1), (2, 1)).unwrap();
        assert_eq!(across.path, vec![(0, 1), (2, 1)]);
    }

    #[test]
    fn default_depth_and_log() {
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(8), 3);
        assert_eq!(ceil_log2(9), 4);
        assert_eq!(BaseGraph::path(9).unwrap().default_depth(), 5);
    }

    #[test]
    fn edge_list_round_trip() {
        let g = BaseGraph::parse_edge_list("x y\n# comment\n\ny z\n").unwrap();
        assert_eq!(g.len(), 3);
        assert_eq!(g.distance(0, 2), Some(2));
        assert!(BaseGraph::parse_edge_list("x x").is_err());
        assert!(BaseGraph::parse_edge_list("x").is_err());
        assert!(BaseGraph::parse_edge_list("").is_err());
        let h = TruncatedHoroball::build(g, 1).unwrap();
        let text = h.export_edge_list();
        assert!(text.lines().any(|l| l == "(x,1) (z,1)"));
        assert_eq!(text.lines().count(), h.edge_count());
    }

    #[test]
    fn build_errors() {
        assert!(TruncatedHoroball::build(BaseGraph::path(2).unwrap(), 0).is_err());
        assert!(BaseGraph::path(0).is_err());
    }
}
