use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
struct Node {
    label: String,
    parent: Option<usize>,
    children: Vec<usize>,
}

/// Labeled ordered constituency tree. Terminal nodes are the words; their
/// parents are preterminals carrying POS tags.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstTree {
    nodes: Vec<Node>,
    leaves: Vec<usize>,
    root: usize,
}

/// Path between two preterminals: up to the lowest common ancestor, then down.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstPath {
    labels: Vec<String>,
    /// Number of upward moves; `labels[up]` is the common ancestor.
    up: usize,
}

impl ConstPath {
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Number of edges traversed.
    pub fn len(&self) -> usize {
        self.labels.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl fmt::Display for ConstPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, label) in self.labels.iter().enumerate() {
            if k > 0 {
                let marker = if k <= self.up { '^' } else { 'v' };
                write!(f, "{marker}")?;
            }
            f.write_str(label)?;
        }
        Ok(())
    }
}

#[derive(Debug, PartialEq)]
enum Lexeme<'a> {
    Open,
    Close,
    Atom(&'a str),
}

fn lex(input: &str) -> Vec<Lexeme<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in input.char_indices() {
        if c == '(' || c == ')' || c.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Lexeme::Atom(&input[s..i]));
            }
            match c {
                '(' => out.push(Lexeme::Open),
                ')' => out.push(Lexeme::Close),
                _ => {}
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Lexeme::Atom(&input[s..]));
    }
    out
}

impl ConstTree {
    /// Parses a single bracketed tree such as
    /// `(ROOT (S (NP (NNS Universities)) (VP (VBD continued))))`.
    /// An unlabeled outer bracket, as in Penn Treebank files, gets the label `ROOT`.
    pub fn parse(input: &str) -> Result<Self> {
        let lexemes = lex(input);
        let mut tree = ConstTree {
            nodes: Vec::new(),
            leaves: Vec::new(),
            root: 0,
        };
        let mut stack: Vec<usize> = Vec::new();
        let mut pos = 0;
        let mut finished = false;
        while pos < lexemes.len() {
            if finished {
                return Err(Error::Tree("trailing input after the tree".into()));
            }
            match lexemes[pos] {
                Lexeme::Open => {
                    let label = match lexemes.get(pos + 1) {
                        Some(Lexeme::Atom(a)) => {
                            pos += 1;
                            a.to_string()
                        }
                        Some(Lexeme::Open) if stack.is_empty() => "ROOT".to_string(),
                        _ => return Err(Error::Tree("bracket without a label".into())),
                    };
                    let id = tree.push(label, stack.last().copied());
                    stack.push(id);
                }
                Lexeme::Close => {
                    let id = stack
                        .pop()
                        .ok_or_else(|| Error::Tree("unbalanced `)`".into()))?;
                    if tree.nodes[id].children.is_empty() {
                        return Err(Error::Tree(format!(
                            "constituent `{}` has no children",
                            tree.nodes[id].label
                        )));
                    }
                    if stack.is_empty() {
                        tree.root = id;
                        finished = true;
                    }
                }
                Lexeme::Atom(word) => {
                    let parent = *stack
                        .last()
                        .ok_or_else(|| Error::Tree(format!("word `{word}` outside brackets")))?;
                    let id = tree.push(word.to_string(), Some(parent));
                    tree.leaves.push(id);
                }
            }
            pos += 1;
        }
        if !finished {
            return Err(Error::Tree(if tree.nodes.is_empty() {
                "empty tree".into()
            } else {
                "unbalanced `(`".into()
            }));
        }
        for &leaf in &tree.leaves {
            let pre = tree.nodes[leaf].parent.expect("leaf has parent");
            if tree.nodes[pre].children.len() != 1 {
                return Err(Error::Tree(format!(
                    "word `{}` shares its preterminal `{}` with other children",
                    tree.nodes[leaf].label, tree.nodes[pre].label
                )));
            }
        }
        Ok(tree)
    }

    fn push(&mut self, label: String, parent: Option<usize>) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node {
            label,
            parent,
            children: Vec::new(),
        });
        if let Some(p) = parent {
            self.nodes[p].children.push(id);
        }
        id
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves.len()
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.leaves.iter().map(|&l| self.nodes[l].label.as_str())
    }

    pub fn root_label(&self) -> &str {
        &self.nodes[self.root].label
    }

    fn preterminal(&self, token: usize) -> usize {
        self.nodes[self.leaves[token]]
            .parent
            .expect("leaf has a preterminal")
    }

    pub fn pos(&self, token: usize) -> &str {
        &self.nodes[self.preterminal(token)].label
    }

    fn phrase_node(&self, token: usize) -> Option<usize> {
        self.nodes[self.preterminal(token)].parent
    }

    /// Label of the first non-preterminal ancestor of the token.
    pub fn phrase_type(&self, token: usize) -> Option<&str> {
        self.phrase_node(token).map(|n| self.nodes[n].label.as_str())
    }

    /// `PHRASE->CHILD1-CHILD2-...` for the first non-preterminal ancestor.
    pub fn phrase_structure(&self, token: usize) -> Option<String> {
        let node = &self.nodes[self.phrase_node(token)?];
        let children: Vec<&str> = node
            .children
            .iter()
            .map(|&c| self.nodes[c].label.as_str())
            .collect();
        Some(format!("{}->{}", node.label, children.join("-")))
    }

    /// Depth of the token's preterminal, with the root at depth 0.
    pub fn depth(&self, token: usize) -> usize {
        let mut depth = 0;
        let mut cur = self.preterminal(token);
        while let Some(p) = self.nodes[cur].parent {
            depth += 1;
            cur = p;
        }
        depth
    }

    fn ancestors(&self, node: usize) -> Vec<usize> {
        let mut v = vec![node];
        let mut cur = node;
        while let Some(p) = self.nodes[cur].parent {
            v.push(p);
            cur = p;
        }
        v
    }

    /// Path between the preterminals of two tokens.
    pub fn path(&self, from: usize, to: usize) -> ConstPath {
        let up_chain = self.ancestors(self.preterminal(from));
        let down_chain = self.ancestors(self.preterminal(to));
        let up = up_chain
            .iter()
            .position(|n| down_chain.contains(n))
            .expect("nodes share the root");
        let lca = up_chain[up];
        let down_pos = down_chain.iter().position(|&n| n == lca).unwrap();
        let labels = up_chain[..=up]
            .iter()
            .chain(down_chain[..down_pos].iter().rev())
            .map(|&n| self.nodes[n].label.clone())
            .collect();
        ConstPath { labels, up }
    }

    /// Node-level view for brute-force checks: `(label, parent)` per node and
    /// the preterminal node id of each token.
    pub fn node_table(&self) -> (Vec<(&str, Option<usize>)>, Vec<usize>) {
        let nodes = self
            .nodes
            .iter()
            .map(|n| (n.label.as_str(), n.parent))
            .collect();
        let pre = (0..self.leaf_count()).map(|t| self.preterminal(t)).collect();
        (nodes, pre)
    }
}

impl fmt::Display for ConstTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn write_node(t: &ConstTree, id: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            let node = &t.nodes[id];
            if node.children.is_empty() {
                return f.write_str(&node.label);
            }
            write!(f, "({}", node.label)?;
            for &c in &node.children {
                f.write_str(" ")?;
                write_node(t, c, f)?;
            }
            f.write_str(")")
        }
        write_node(self, self.root, f)
    }
}

pub fn const_path(tree: &ConstTree, from: usize, to: usize) -> String {
    tree.path(from, to).to_string()
}

pub fn phrase_type(tree: &ConstTree, token: usize) -> Option<&str> {
    tree.phrase_type(token)
}

pub fn phrase_structure(tree: &ConstTree, token: usize) -> Option<String> {
    tree.phrase_structure(token)
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIXTURE: &str = "(ROOT (S (NP (NNS Universities)) (VP (VBD continued) (S (VP (TO to) \
        (VP (VB languish) (PP (IN through) (NP (DT the) (NNS eighties))))))) (. .)))";

    #[test]
    fn parses_fixture() {
        let t = ConstTree::parse(FIXTURE).unwrap();
        assert_eq!(t.leaf_count(), 8);
        assert_eq!(t.words().next(), Some("Universities"));
        assert_eq!(t.pos(1), "VBD");
        assert_eq!(t.to_string(), FIXTURE);
    }

    #[test]
    fn phrase_queries() {
        let t = ConstTree::parse(FIXTURE).unwrap();
        assert_eq!(t.phrase_type(0), Some("NP"));
        assert_eq!(t.phrase_structure(0).unwrap(), "NP->NNS");
        assert_eq!(t.phrase_type(1), Some("VP"));
        assert_eq!(t.phrase_structure(1).unwrap(), "VP->VBD-S");

        let single = ConstTree::parse("(ROOT (NP (NN x)))").unwrap();
        assert_eq!(single.phrase_type(0), Some("NP"));
        assert_eq!(single.phrase_structure(0).unwrap(), "NP->NN");
    }

    #[test]
    fn paths() {
        let t = ConstTree::parse(FIXTURE).unwrap();
        let p = t.path(1, 0);
        assert_eq!(p.to_string(), "VBD^VP^SvNPvNNS");
        assert_eq!(p.len(), 4);
        assert_eq!(const_path(&t, 1, 1), "VBD");
        // the, eighties share an NP.
        assert_eq!(const_path(&t, 5, 6), "DT^NPvNNS");
        assert_eq!(t.depth(0), 3);
        assert_eq!(t.depth(1), 3);
        assert_eq!(t.depth(6), 8);
    }

    #[test]
    fn ptb_style_unlabeled_root() {
        let t = ConstTree::parse("( (S (NP (PRP it)) (VP (VBZ works))))").unwrap();
        assert_eq!(t.root_label(), "ROOT");
        assert_eq!(t.leaf_count(), 2);
    }

    #[test]
    fn malformed_trees() {
        for bad in [
            "",
            "(S (NP (NN x))",
            "(S (NP (NN x))))",
            "(S (NP (NN x))) (S)",
            "(S ())",
            "(S (NP (NN x y)))",
            "(S (NP))",
        ] {
            assert!(ConstTree::parse(bad).is_err(), "{bad:?} should not parse");
        }
    }
}
