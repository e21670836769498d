use crate::error::{Error, Result};
use crate::pipeline::params::kary_digits;

/// A rooted tree stored as parent/children arrays. Node 0 is the root and
/// every node's parent has a smaller index.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RootedTree {
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
}

impl RootedTree {
    pub fn new() -> Self {
        RootedTree {
            parent: vec![None],
            children: vec![Vec::new()],
        }
    }

    pub fn add_child(&mut self, parent: usize) -> usize {
        let id = self.parent.len();
        self.parent.push(Some(parent));
        self.children.push(Vec::new());
        self.children[parent].push(id);
        id
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        self.children[v].is_empty()
    }

    /// At least two children.
    pub fn is_branching(&self, v: usize) -> bool {
        self.children[v].len() >= 2
    }

    pub fn max_children(&self) -> usize {
        self.children.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn depth(&self, mut v: usize) -> usize {
        let mut d = 0;
        while let Some(p) = self.parent[v] {
            v = p;
            d += 1;
        }
        d
    }

    /// Branching ancestors of every node (the node itself excluded).
    pub fn branching_ancestor_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.len()];
        for v in 1..self.len() {
            let p = self.parent[v].expect("non-root node has a parent");
            counts[v] = counts[p] + usize::from(self.is_branching(p));
        }
        counts
    }

    /// Non-root leaves, in index order.
    pub fn leaves(&self) -> impl Iterator<Item = usize> + '_ {
        (1..self.len()).filter(move |&v| self.is_leaf(v))
    }
}

/// Number of non-root leaves with at most `m` branching ancestors.
pub fn count_leaves_few_branching(tree: &RootedTree, m: usize) -> usize {
    let counts = tree.branching_ancestor_counts();
    tree.leaves().filter(|&v| counts[v] <= m).count()
}

/// The tree of all digit prefixes of a set of row labels: the root is the
/// empty prefix, a node's children extend it by one digit, and the leaves
/// at depth `s` are the full expansions.
#[derive(Clone, Debug)]
pub struct PrefixTree {
    tree: RootedTree,
    /// Digit on the edge into each node (0 for the root).
    digit: Vec<usize>,
    k: usize,
    s: usize,
}

impl PrefixTree {
    pub fn tree(&self) -> &RootedTree {
        &self.tree
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn s(&self) -> usize {
        self.s
    }

    fn child_with_digit(&self, v: usize, d: usize) -> Option<usize> {
        self.tree.children(v).iter().copied().find(|&c| self.digit[c] == d)
    }

    /// Node for a digit prefix, if some label has that prefix.
    pub fn node_for(&self, prefix: &[usize]) -> Option<usize> {
        prefix
            .iter()
            .try_fold(self.tree.root(), |v, &d| self.child_with_digit(v, d))
    }

    /// The digit prefix spelled by the path to `v`.
    pub fn prefix_of(&self, mut v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        while let Some(p) = self.tree.parent(v) {
            out.push(self.digit[v]);
            v = p;
        }
        out.reverse();
        out
    }
}

/// Build the prefix tree of the `s`-digit base-`k` expansions of `rows`.
pub fn build_prefix_tree(rows: &[usize], k: usize, s: usize) -> Result<PrefixTree> {
    if k < 2 {
        return Err(Error::arg(format!("branching factor {k} must be at least 2")));
    }
    let mut pt = PrefixTree {
        tree: RootedTree::new(),
        digit: vec![0],
        k,
        s,
    };
    for &i in rows {
        let digits = kary_digits(i, k, s)?;
        let mut v = pt.tree.root();
        for d in digits {
            v = match pt.child_with_digit(v, d) {
                Some(c) => c,
                None => {
                    let c = pt.tree.add_child(v);
                    pt.digit.push(d);
                    c
                }
            };
        }
    }
    Ok(pt)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(len: usize) -> RootedTree {
        let mut t = RootedTree::new();
        let mut v = t.root();
        for _ in 0..len {
            v = t.add_child(v);
        }
        t
    }

    fn complete(k: usize, depth: usize) -> RootedTree {
        let mut t = RootedTree::new();
        let mut frontier = vec![t.root()];
        for _ in 0..depth {
            frontier = frontier
                .into_iter()
                .flat_map(|v| (0..k).map(|_| t.add_child(v)).collect::<Vec<_>>())
                .collect();
        }
        t
    }

    #[test]
    fn leaf_count_examples() {
        assert_eq!(count_leaves_few_branching(&path(5), 0), 1);
        assert_eq!(count_leaves_few_branching(&complete(4, 1), 1), 4);
        assert_eq!(count_leaves_few_branching(&complete(2, 3), 2), 0);
        assert_eq!(count_leaves_few_branching(&complete(2, 3), 3), 8);
        assert_eq!(count_leaves_few_branching(&RootedTree::new(), 0), 0);
    }

    #[test]
    fn prefix_tree_examples() {
        let single = build_prefix_tree(&[0], 2, 2).unwrap();
        assert_eq!(single.tree().len(), 3);
        assert_eq!(single.tree().leaves().count(), 1);
        assert_eq!(single.node_for(&[0, 0]), Some(2));

        let full = build_prefix_tree(&[0, 1, 2, 3], 2, 2).unwrap();
        assert_eq!(full.tree().len(), 7);
        assert!(full.tree().is_branching(0));
        assert!(full.tree().is_branching(full.node_for(&[0]).unwrap()));
        assert!(full.tree().is_branching(full.node_for(&[1]).unwrap()));

        // {0, 3}: root -> 0 -> 00 and root -> 1 -> 11
        let split = build_prefix_tree(&[0, 3], 2, 2).unwrap();
        assert_eq!(split.tree().len(), 5);
        assert_eq!(split.tree().children(0).len(), 2);
        for leaf in split.tree().leaves() {
            assert_eq!(split.tree().depth(leaf), 2);
        }
        let mut leaves: Vec<Vec<usize>> = split.tree().leaves().map(|v| split.prefix_of(v)).collect();
        leaves.sort();
        assert_eq!(leaves, vec![vec![0, 0], vec![1, 1]]);
        assert_eq!(split.node_for(&[0, 1]), None);

        let empty = build_prefix_tree(&[], 3, 4).unwrap();
        assert_eq!(empty.tree().len(), 1);
        assert!(build_prefix_tree(&[9], 2, 3).is_err());
    }
}
