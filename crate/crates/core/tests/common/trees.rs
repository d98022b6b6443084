//! Random trees and breadth-first-search path oracles.

use std::collections::VecDeque;

use cpa_core::trees::{DepTree, HeadSpec};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const RELATIONS: [&str; 5] = ["nsubj", "dobj", "prep", "amod", "det"];

/// Random dependency tree: `(head, relation)` per node, `None` for the root.
pub fn random_dep(seed: u64) -> Vec<Option<(usize, String)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=12);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    let mut heads = vec![None; n];
    for k in 1..n {
        let parent = perm[rng.random_range(0..k)];
        let rel = RELATIONS[rng.random_range(0..RELATIONS.len())].to_string();
        heads[perm[k]] = Some((parent, rel));
    }
    heads
}

pub fn build_dep(heads: &[Option<(usize, String)>]) -> DepTree {
    DepTree::new(
        heads
            .iter()
            .map(|h| match h {
                Some((p, r)) => HeadSpec::Head(*p, r.clone()),
                None => HeadSpec::Root("root".into()),
            })
            .collect(),
    )
    .unwrap()
}

/// BFS over the undirected graph; each step is (relation, moved up?).
pub fn bfs_path(
    heads: &[Option<(usize, String)>],
    from: usize,
    to: usize,
    downward_only: bool,
) -> Option<Vec<(String, bool)>> {
    let n = heads.len();
    let mut adj: Vec<Vec<(usize, String, bool)>> = vec![Vec::new(); n];
    for (child, h) in heads.iter().enumerate() {
        if let Some((p, r)) = h {
            adj[*p].push((child, r.clone(), false));
            if !downward_only {
                adj[child].push((*p, r.clone(), true));
            }
        }
    }
    let mut prev: Vec<Option<(usize, String, bool)>> = vec![None; n];
    let mut seen = vec![false; n];
    seen[from] = true;
    let mut queue = VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        for (v, r, up) in &adj[u] {
            if !seen[*v] {
                seen[*v] = true;
                prev[*v] = Some((u, r.clone(), *up));
                queue.push_back(*v);
            }
        }
    }
    if !seen[to] {
        return None;
    }
    let mut steps = Vec::new();
    let mut cur = to;
    while cur != from {
        let (u, r, up) = prev[cur].clone().unwrap();
        steps.push((r, up));
        cur = u;
    }
    steps.reverse();
    Some(steps)
}

pub struct RandomConst {
    pub labels: Vec<String>,
    pub parent: Vec<Option<usize>>,
    /// Preterminal node of each token, in surface order.
    pub preterminals: Vec<usize>,
    pub bracketed: String,
}

pub fn random_const(seed: u64) -> RandomConst {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = rng.random_range(1..=12);
    let mut parent = vec![None; m];
    for (k, p) in parent.iter_mut().enumerate().skip(1) {
        *p = Some(rng.random_range(0..k));
    }
    let children: Vec<Vec<usize>> = (0..m)
        .map(|u| (0..m).filter(|&c| parent[c] == Some(u)).collect())
        .collect();
    let labels: Vec<String> = (0..m)
        .map(|u| {
            let set: &[&str] = if children[u].is_empty() {
                &["NN", "VB", "DT", "IN"]
            } else {
                &["S", "NP", "VP", "PP"]
            };
            set[rng.random_range(0..set.len())].to_string()
        })
        .collect();
    let mut preterminals = Vec::new();
    let mut bracketed = String::new();
    fn render(
        u: usize,
        labels: &[String],
        children: &[Vec<usize>],
        pre: &mut Vec<usize>,
        out: &mut String,
    ) {
        out.push('(');
        out.push_str(&labels[u]);
        if children[u].is_empty() {
            out.push_str(&format!(" w{}", pre.len()));
            pre.push(u);
        }
        for &c in &children[u] {
            out.push(' ');
            render(c, labels, children, pre, out);
        }
        out.push(')');
    }
    render(0, &labels, &children, &mut preterminals, &mut bracketed);
    RandomConst {
        labels,
        parent,
        preterminals,
        bracketed,
    }
}

/// BFS between two nodes; renders `LABEL(^|v)LABEL...`.
pub fn bfs_const(t: &RandomConst, from: usize, to: usize) -> (String, usize) {
    let n = t.labels.len();
    let mut prev: Vec<Option<(usize, char)>> = vec![None; n];
    let mut seen = vec![false; n];
    seen[from] = true;
    let mut queue = VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        let mut next: Vec<(usize, char)> = (0..n).filter(|&c| t.parent[c] == Some(u)).map(|c| (c, 'v')).collect();
        if let Some(p) = t.parent[u] {
            next.push((p, '^'));
        }
        for (v, m) in next {
            if !seen[v] {
                seen[v] = true;
                prev[v] = Some((u, m));
                queue.push_back(v);
            }
        }
    }
    let mut parts = Vec::new();
    let mut cur = to;
    while cur != from {
        let (u, m) = prev[cur].unwrap();
        parts.push(format!("{m}{}", t.labels[cur]));
        cur = u;
    }
    parts.reverse();
    (format!("{}{}", t.labels[from], parts.concat()), parts.len())
}
