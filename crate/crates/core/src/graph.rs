//! Edge-labeled finite graphs.
//!
//! Edges are directed and carry a label from a fixed alphabet (for graphs
//! built from an almost action, the label alphabet is the one-sided
//! generating set and the edge `(x, y, s)` records that `s` moves `x` to
//! `y`). Undirected graphs are stored with both orientations present.
//! The graph metric always lives on the underlying simple graph: loops are
//! dropped and parallel edges collapsed.

use std::collections::VecDeque;

use crate::error::{Error, Result};

pub const UNREACHED: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledGraph {
    n: usize,
    labels: Vec<String>,
    /// Directed labeled edges, sorted by (source, target, label).
    edges: Vec<(u32, u32, u16)>,
    out_adj: Vec<Vec<(u32, u16)>>,
    in_adj: Vec<Vec<(u32, u16)>>,
    /// Distinct undirected neighbors, loops excluded; defines the metric.
    neighbors: Vec<Vec<u32>>,
}

impl LabeledGraph {
    pub fn from_directed_edges(
        n: usize,
        labels: Vec<String>,
        mut edges: Vec<(u32, u32, u16)>,
    ) -> Result<Self> {
        for &(u, v, s) in &edges {
            if u as usize >= n || v as usize >= n {
                return Err(Error::invalid(format!(
                    "edge ({u}, {v}) out of range for {n} vertices"
                )));
            }
            if s as usize >= labels.len() {
                return Err(Error::invalid(format!("edge label id {s} undeclared")));
            }
        }
        edges.sort_unstable();
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        let mut nbr = vec![Vec::new(); n];
        for &(u, v, s) in &edges {
            out_adj[u as usize].push((v, s));
            in_adj[v as usize].push((u, s));
            if u != v {
                nbr[u as usize].push(v);
                nbr[v as usize].push(u);
            }
        }
        for list in &mut nbr {
            list.sort_unstable();
            list.dedup();
        }
        Ok(LabeledGraph {
            n,
            labels,
            edges,
            out_adj,
            in_adj,
            neighbors: nbr,
        })
    }

    /// Stores each undirected edge in both orientations.
    pub fn from_undirected_edges(
        n: usize,
        labels: Vec<String>,
        edges: Vec<(u32, u32, u16)>,
    ) -> Result<Self> {
        let mut directed = Vec::with_capacity(edges.len() * 2);
        for (u, v, s) in edges {
            directed.push((u, v, s));
            if u != v {
                directed.push((v, u, s));
            }
        }
        directed.sort_unstable();
        directed.dedup();
        Self::from_directed_edges(n, labels, directed)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Directed labeled edges in sorted order.
    pub fn edges(&self) -> &[(u32, u32, u16)] {
        &self.edges
    }

    pub fn out_edges(&self, v: u32) -> &[(u32, u16)] {
        &self.out_adj[v as usize]
    }

    pub fn in_edges(&self, v: u32) -> &[(u32, u16)] {
        &self.in_adj[v as usize]
    }

    /// Distinct neighbors of `v` in the underlying simple graph.
    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.neighbors[v as usize]
    }

    /// Degree in the underlying simple graph.
    pub fn degree(&self, v: u32) -> usize {
        self.neighbors[v as usize].len()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n as u32).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// Undirected simple edges (u < v), the edge set of the metric graph.
    pub fn simple_edges(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for v in 0..self.n as u32 {
            for &w in self.neighbors(v) {
                if v < w {
                    out.push((v, w));
                }
            }
        }
        out
    }

    /// Graph distances from `source`, truncated at `radius` when given;
    /// unreached vertices get [`UNREACHED`].
    pub fn bfs_distances(&self, source: u32, radius: Option<u32>) -> Vec<u32> {
        self.multi_source_distances(std::slice::from_ref(&source), radius)
    }

    pub fn multi_source_distances(&self, sources: &[u32], radius: Option<u32>) -> Vec<u32> {
        let mut dist = vec![UNREACHED; self.n];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s as usize] == UNREACHED {
                dist[s as usize] = 0;
                queue.push_back(s);
            }
        }
        while let Some(v) = queue.pop_front() {
            let d = dist[v as usize];
            if let Some(r) = radius {
                if d >= r {
                    continue;
                }
            }
            for &w in self.neighbors(v) {
                if dist[w as usize] == UNREACHED {
                    dist[w as usize] = d + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Vertices within distance `r` of `v`, sorted by (distance, index).
    pub fn ball_vertices(&self, v: u32, r: u32) -> Vec<u32> {
        let dist = self.bfs_distances(v, Some(r));
        let mut verts: Vec<u32> = (0..self.n as u32)
            .filter(|&w| dist[w as usize] != UNREACHED)
            .collect();
        verts.sort_unstable_by_key(|&w| (dist[w as usize], w));
        verts
    }

    /// Component id per vertex plus the component count. Ids are assigned
    /// in order of each component's smallest vertex.
    pub fn connected_components(&self) -> (Vec<u32>, usize) {
        let mut comp = vec![UNREACHED; self.n];
        let mut count = 0u32;
        for start in 0..self.n as u32 {
            if comp[start as usize] != UNREACHED {
                continue;
            }
            let mut queue = VecDeque::new();
            comp[start as usize] = count;
            queue.push_back(start);
            while let Some(v) = queue.pop_front() {
                for &w in self.neighbors(v) {
                    if comp[w as usize] == UNREACHED {
                        comp[w as usize] = count;
                        queue.push_back(w);
                    }
                }
            }
            count += 1;
        }
        (comp, count as usize)
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.connected_components().1 == 1
    }

    /// Induced subgraph on `vertices` (which must be distinct); vertex `i`
    /// of the result is `vertices[i]`.
    pub fn induced(&self, vertices: &[u32]) -> LabeledGraph {
        let mut index = vec![UNREACHED; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            index[v as usize] = i as u32;
        }
        let mut edges = Vec::new();
        for &(u, v, s) in &self.edges {
            let (iu, iv) = (index[u as usize], index[v as usize]);
            if iu != UNREACHED && iv != UNREACHED {
                edges.push((iu, iv, s));
            }
        }
        LabeledGraph::from_directed_edges(vertices.len(), self.labels.clone(), edges)
            .expect("induced subgraph of a valid graph is valid")
    }

    /// Exact number of simple edges with endpoints in different parts.
    pub fn cut_edges(&self, part_of: &[u32]) -> usize {
        self.simple_edges()
            .iter()
            .filter(|&&(u, v)| part_of[u as usize] != part_of[v as usize])
            .count()
    }

    /// Disjoint union; the blocks keep their internal vertex order.
    pub fn disjoint_union(blocks: &[&LabeledGraph]) -> Result<LabeledGraph> {
        let labels = match blocks.first() {
            Some(b) => b.labels.clone(),
            None => return Err(Error::invalid("empty union")),
        };
        let mut edges = Vec::new();
        let mut offset = 0u32;
        for b in blocks {
            if b.labels != labels {
                return Err(Error::invalid("label alphabets differ across blocks"));
            }
            for &(u, v, s) in &b.edges {
                edges.push((u + offset, v + offset, s));
            }
            offset += b.n as u32;
        }
        LabeledGraph::from_directed_edges(offset as usize, labels, edges)
    }

    /// Length of the shortest cycle in the underlying simple graph, or
    /// `None` for a forest.
    pub fn girth(&self) -> Option<u32> {
        let mut best: Option<u32> = None;
        for start in 0..self.n as u32 {
            // BFS from `start`; a non-tree edge found at depths d1, d2 closes
            // a cycle through `start` of length d1 + d2 + 1.
            let mut dist = vec![UNREACHED; self.n];
            let mut parent = vec![UNREACHED; self.n];
            dist[start as usize] = 0;
            let mut queue = VecDeque::new();
            queue.push_back(start);
            while let Some(v) = queue.pop_front() {
                if let Some(b) = best {
                    // No shorter cycle can be found past this depth.
                    if dist[v as usize] * 2 >= b {
                        continue;
                    }
                }
                for &w in self.neighbors(v) {
                    if dist[w as usize] == UNREACHED {
                        dist[w as usize] = dist[v as usize] + 1;
                        parent[w as usize] = v;
                        queue.push_back(w);
                    } else if parent[v as usize] != w {
                        let len = dist[v as usize] + dist[w as usize] + 1;
                        if best.is_none_or(|b| len < b) {
                            best = Some(len);
                        }
                    }
                }
            }
        }
        best
    }

    /// Exact diameter by all-pairs BFS. Errors on disconnected input.
    pub fn diameter_exact(&self) -> Result<u32> {
        let mut diam = 0;
        for v in 0..self.n as u32 {
            let dist = self.bfs_distances(v, None);
            for &d in &dist {
                if d == UNREACHED {
                    return Err(Error::invalid("diameter of a disconnected graph"));
                }
                diam = diam.max(d);
            }
        }
        Ok(diam)
    }

    /// Lower bound on the diameter from a double BFS sweep.
    pub fn diameter_two_sweep(&self) -> Result<u32> {
        let d0 = self.bfs_distances(0, None);
        let (far, _) = d0
            .iter()
            .enumerate()
            .max_by_key(|&(_, &d)| if d == UNREACHED { 0 } else { d })
            .unwrap();
        if d0.contains(&UNREACHED) {
            return Err(Error::invalid("diameter of a disconnected graph"));
        }
        let d1 = self.bfs_distances(far as u32, None);
        Ok(*d1.iter().max().unwrap())
    }
}

/// A rooted, edge-labeled ball of a fixed radius.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedBall {
    pub graph: LabeledGraph,
    pub root: u32,
    pub radius: u32,
}

/// Convenience constructors for plain test graphs (single label `x`).
pub fn cycle_graph(n: usize) -> LabeledGraph {
    assert!(n >= 3);
    let edges = (0..n as u32).map(|i| (i, (i + 1) % n as u32, 0u16)).collect();
    LabeledGraph::from_undirected_edges(n, vec!["x".into()], edges).unwrap()
}

pub fn path_graph(n: usize) -> LabeledGraph {
    let edges = (1..n as u32).map(|i| (i - 1, i, 0u16)).collect();
    LabeledGraph::from_undirected_edges(n, vec!["x".into()], edges).unwrap()
}

pub fn complete_graph(n: usize) -> LabeledGraph {
    let mut edges = Vec::new();
    for u in 0..n as u32 {
        for v in (u + 1)..n as u32 {
            edges.push((u, v, 0u16));
        }
    }
    LabeledGraph::from_undirected_edges(n, vec!["x".into()], edges).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_metric() {
        let g = cycle_graph(8);
        let d = g.bfs_distances(0, None);
        assert_eq!(d[4], 4);
        assert_eq!(d[7], 1);
        assert_eq!(g.max_degree(), 2);
        assert_eq!(g.diameter_exact().unwrap(), 4);
        assert_eq!(g.girth(), Some(8));
    }

    #[test]
    fn girth_cases() {
        assert_eq!(complete_graph(4).girth(), Some(3));
        assert_eq!(path_graph(6).girth(), None);
        assert_eq!(cycle_graph(5).girth(), Some(5));
    }

    #[test]
    fn components_and_union() {
        let c4 = cycle_graph(4);
        let g = LabeledGraph::disjoint_union(&[&c4, &c4]).unwrap();
        let (comp, count) = g.connected_components();
        assert_eq!(count, 2);
        assert_eq!(comp[0], 0);
        assert_eq!(comp[5], 1);
        assert!(!g.is_connected());
    }

    #[test]
    fn induced_ball_is_path_in_cycle() {
        let g = cycle_graph(8);
        let verts = g.ball_vertices(0, 2);
        assert_eq!(verts, vec![0, 1, 7, 2, 6]);
        let ball = g.induced(&verts);
        assert_eq!(ball.vertex_count(), 5);
        assert_eq!(ball.simple_edges().len(), 4);
        assert_eq!(ball.max_degree(), 2);
    }

    #[test]
    fn loops_do_not_enter_the_metric() {
        let g = LabeledGraph::from_directed_edges(
            2,
            vec!["a".into()],
            vec![(0, 0, 0), (0, 1, 0)],
        )
        .unwrap();
        assert_eq!(g.degree(0), 1);
        assert_eq!(g.out_edges(0).len(), 2);
    }

    #[test]
    fn cut_count_on_cycle() {
        let g = cycle_graph(6);
        let parts = vec![0, 0, 0, 1, 1, 1];
        assert_eq!(g.cut_edges(&parts), 2);
    }
}
