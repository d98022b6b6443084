use std::fmt;

use crate::corpus::Token;
use crate::error::{Error, Result};

/// Head assignment for one token when building a [`DepTree`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HeadSpec {
    /// Sentence root; the relation is usually `root`.
    Root(String),
    Head(usize, String),
    /// Token has no node in this tree (prepositions in the collapsed variant).
    Absent,
}

/// A single-headed, acyclic dependency tree over the tokens of a sentence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DepTree {
    specs: Vec<HeadSpec>,
    children: Vec<Vec<usize>>,
    root: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Up,
    Down,
}

impl Direction {
    pub fn marker(self) -> char {
        match self {
            Direction::Up => '^',
            Direction::Down => 'v',
        }
    }
}

/// Which node label, if any, is interleaved into a rendered path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeAnnotation {
    None,
    Lemma,
    Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathStep {
    pub relation: String,
    pub direction: Direction,
    /// Node the step leaves from.
    pub origin: usize,
    pub target: usize,
    pub annotation: Option<String>,
}

/// A path through a dependency tree. Directed paths only contain downward
/// steps; undirected ones may go up to a common ancestor first.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct DepPath {
    steps: Vec<PathStep>,
    directed: bool,
}

impl DepPath {
    pub fn steps(&self) -> &[PathStep] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.steps.iter().map(|s| s.relation.as_str()).collect()
    }

    fn annotate(mut self, annotate: NodeAnnotation, tokens: &[Token]) -> Self {
        for step in &mut self.steps {
            step.annotation = match annotate {
                NodeAnnotation::None => None,
                NodeAnnotation::Lemma => tokens.get(step.origin).map(|t| t.lemma.clone()),
                NodeAnnotation::Pos => tokens.get(step.origin).map(|t| t.pos.clone()),
            };
        }
        self
    }
}

impl fmt::Display for DepPath {
    /// Steps are joined by `-`; each step is its relation, prefixed with a
    /// direction marker on undirected paths, followed by the origin node's
    /// annotation when present.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, step) in self.steps.iter().enumerate() {
            if i > 0 {
                f.write_str("-")?;
            }
            if !self.directed {
                write!(f, "{}", step.direction.marker())?;
            }
            f.write_str(&step.relation)?;
            if let Some(a) = &step.annotation {
                write!(f, "-{a}")?;
            }
        }
        Ok(())
    }
}

impl DepTree {
    pub fn new(specs: Vec<HeadSpec>) -> Result<Self> {
        let n = specs.len();
        let mut children = vec![Vec::new(); n];
        let mut root = None;
        for (i, spec) in specs.iter().enumerate() {
            match spec {
                HeadSpec::Root(_) => {
                    if let Some(r) = root {
                        return Err(Error::Graph(format!("tokens {r} and {i} are both roots")));
                    }
                    root = Some(i);
                }
                HeadSpec::Head(h, _) => {
                    if *h >= n {
                        return Err(Error::Graph(format!("token {i} has head {h} out of range")));
                    }
                    if *h == i {
                        return Err(Error::Graph(format!("token {i} is its own head")));
                    }
                    if specs[*h] == HeadSpec::Absent {
                        return Err(Error::Graph(format!(
                            "token {i} attaches to token {h}, which is not in the tree"
                        )));
                    }
                    children[*h].push(i);
                }
                HeadSpec::Absent => {}
            }
        }
        let root = match root {
            Some(r) => r,
            None if n == 0 => 0,
            None => return Err(Error::Graph("no root token".into())),
        };
        let tree = DepTree {
            specs,
            children,
            root,
        };
        // With one root and one head per node, reaching the root from every
        // node rules out cycles and disconnected components together.
        for i in 0..n {
            if tree.contains(i) && tree.depth(i).is_none() {
                return Err(Error::Graph(format!("token {i} is on a cycle")));
            }
        }
        Ok(tree)
    }

    /// Number of token positions the tree was built over (including absent ones).
    pub fn len(&self) -> usize {
        self.specs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.specs.is_empty()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn contains(&self, i: usize) -> bool {
        matches!(self.specs.get(i), Some(HeadSpec::Root(_) | HeadSpec::Head(..)))
    }

    pub fn spec(&self, i: usize) -> &HeadSpec {
        &self.specs[i]
    }

    pub fn parent(&self, i: usize) -> Option<usize> {
        match self.specs.get(i) {
            Some(HeadSpec::Head(h, _)) => Some(*h),
            _ => None,
        }
    }

    /// Relation on the arc entering `i`, excluding the root pseudo-arc.
    pub fn relation(&self, i: usize) -> Option<&str> {
        match self.specs.get(i) {
            Some(HeadSpec::Head(_, rel)) => Some(rel),
            _ => None,
        }
    }

    pub fn children(&self, i: usize) -> &[usize] {
        self.children.get(i).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn children_with_relation<'a>(
        &'a self,
        i: usize,
        relation: &'a str,
    ) -> impl Iterator<Item = usize> + 'a {
        self.children(i)
            .iter()
            .copied()
            .filter(move |&c| self.relation(c) == Some(relation))
    }

    pub fn has_child_with_relation(&self, i: usize, relation: &str) -> bool {
        self.children_with_relation(i, relation).next().is_some()
    }

    /// Arcs into the tree as `(head, dependent, relation)`.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize, &str)> + '_ {
        self.specs.iter().enumerate().filter_map(|(i, s)| match s {
            HeadSpec::Head(h, rel) => Some((*h, i, rel.as_str())),
            _ => None,
        })
    }

    /// Number of arcs between `i` and the root; `None` for absent tokens.
    pub fn depth(&self, i: usize) -> Option<usize> {
        if !self.contains(i) {
            return None;
        }
        let mut depth = 0;
        let mut cur = i;
        while let Some(h) = self.parent(cur) {
            depth += 1;
            cur = h;
            if depth > self.specs.len() {
                return None;
            }
        }
        (cur == self.root).then_some(depth)
    }

    /// Walks dependency heads upward from `i` until a token whose POS tag
    /// starts with `V`.
    pub fn first_verbal_ancestor(&self, i: usize, tokens: &[Token]) -> Option<usize> {
        let mut cur = self.parent(i)?;
        loop {
            if tokens.get(cur).is_some_and(|t| t.pos.starts_with('V')) {
                return Some(cur);
            }
            cur = self.parent(cur)?;
        }
    }

    /// Head-to-dependent path from `from` down to `to`, if `to` is a
    /// descendant of (or equal to) `from`.
    pub fn directed_path(&self, from: usize, to: usize) -> Option<DepPath> {
        if !self.contains(from) || !self.contains(to) {
            return None;
        }
        let mut steps = Vec::new();
        let mut cur = to;
        while cur != from {
            let (h, rel) = match &self.specs[cur] {
                HeadSpec::Head(h, rel) => (*h, rel),
                _ => return None,
            };
            steps.push(PathStep {
                relation: rel.clone(),
                direction: Direction::Down,
                origin: h,
                target: cur,
                annotation: None,
            });
            cur = h;
        }
        steps.reverse();
        Some(DepPath {
            steps,
            directed: true,
        })
    }

    /// Shortest path ignoring arc direction: up from `from` to the lowest
    /// common ancestor, then down to `to`.
    pub fn undirected_path(&self, from: usize, to: usize) -> Result<DepPath> {
        for i in [from, to] {
            if !self.contains(i) {
                return Err(Error::Graph(format!("token {i} is not a node of the tree")));
            }
        }
        let chain = |start: usize| {
            let mut v = vec![start];
            let mut cur = start;
            while let Some(h) = self.parent(cur) {
                v.push(h);
                cur = h;
            }
            v
        };
        let up_chain = chain(from);
        let down_chain = chain(to);
        let lca = up_chain
            .iter()
            .copied()
            .find(|n| down_chain.contains(n))
            .ok_or_else(|| Error::Graph(format!("tokens {from} and {to} are disconnected")))?;

        let mut steps = Vec::new();
        for &node in up_chain.iter().take_while(|&&n| n != lca) {
            let head = self.parent(node).expect("non-root node has a head");
            steps.push(PathStep {
                relation: self.relation(node).unwrap_or_default().to_string(),
                direction: Direction::Up,
                origin: node,
                target: head,
                annotation: None,
            });
        }
        let descent: Vec<usize> = down_chain.iter().copied().take_while(|&n| n != lca).collect();
        for &node in descent.iter().rev() {
            let head = self.parent(node).expect("non-root node has a head");
            steps.push(PathStep {
                relation: self.relation(node).unwrap_or_default().to_string(),
                direction: Direction::Down,
                origin: head,
                target: node,
                annotation: None,
            });
        }
        Ok(DepPath {
            steps,
            directed: false,
        })
    }
}

/// Shortest directed dependency path between two tokens, annotated with the
/// lemma or POS of each step's origin node. Absent when `to` is not below `from`.
pub fn directed_dep_path(
    tree: &DepTree,
    from: usize,
    to: usize,
    annotate: NodeAnnotation,
    tokens: &[Token],
) -> Option<DepPath> {
    tree.directed_path(from, to)
        .map(|p| p.annotate(annotate, tokens))
}

pub fn undirected_dep_path(
    tree: &DepTree,
    from: usize,
    to: usize,
    annotate: NodeAnnotation,
    tokens: &[Token],
) -> Result<DepPath> {
    tree.undirected_path(from, to)
        .map(|p| p.annotate(annotate, tokens))
}
