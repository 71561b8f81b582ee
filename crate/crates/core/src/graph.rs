//! Small directed-graph utilities over adjacency lists.

use std::collections::VecDeque;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

/// Strongly connected components; returns a component id for every node.
/// Ids follow petgraph's reverse topological order.
pub fn scc_ids(adj: &[Vec<usize>]) -> Vec<usize> {
    let mut g: DiGraph<(), ()> = DiGraph::with_capacity(adj.len(), 0);
    let nodes: Vec<_> = (0..adj.len()).map(|_| g.add_node(())).collect();
    for (p, succ) in adj.iter().enumerate() {
        for &q in succ {
            g.add_edge(nodes[p], nodes[q], ());
        }
    }
    let mut ids = vec![0; adj.len()];
    for (c, comp) in tarjan_scc(&g).into_iter().enumerate() {
        for v in comp {
            ids[v.index()] = c;
        }
    }
    ids
}

/// Nodes lying on some cycle (a non-trivial component or a self-loop).
pub fn on_cycle(adj: &[Vec<usize>], ids: &[usize]) -> Vec<bool> {
    let mut size = vec![0usize; adj.len()];
    for &c in ids {
        size[c] += 1;
    }
    (0..adj.len())
        .map(|v| size[ids[v]] > 1 || adj[v].contains(&v))
        .collect()
}

/// Nodes reachable from `sources` by paths of length at least `min_len` (0 or 1).
pub fn reachable(adj: &[Vec<usize>], sources: &[usize], min_len: usize) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    let mut queue = VecDeque::new();
    for &s in sources {
        if min_len == 0 {
            if !seen[s] {
                seen[s] = true;
                queue.push_back(s);
            }
        } else {
            for &t in &adj[s] {
                if !seen[t] {
                    seen[t] = true;
                    queue.push_back(t);
                }
            }
        }
    }
    while let Some(p) = queue.pop_front() {
        for &q in &adj[p] {
            if !seen[q] {
                seen[q] = true;
                queue.push_back(q);
            }
        }
    }
    seen
}

pub fn reverse(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut rev = vec![Vec::new(); adj.len()];
    for (p, succ) in adj.iter().enumerate() {
        for &q in succ {
            rev[q].push(p);
        }
    }
    rev
}
