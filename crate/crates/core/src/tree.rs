//! Finite labelled ordered trees: the models. Nodes are numbered 0..n-1 in
//! preorder, the root is node 0, and sibling order is index order.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::formula::{OrderFormula, Signature};
use crate::types::{OneType, TwoType, TypeError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TreeError {
    #[error("tree must have at least one node")]
    Empty,
    #[error("node {0} has parent index {1} out of range")]
    ParentOutOfRange(usize, usize),
    #[error("exactly one root expected, found {0}")]
    RootCount(usize),
    #[error("the root must be node 0")]
    RootNotFirst,
    #[error("node {0} is not reachable from the root (cycle or forward parent)")]
    NotReachable(usize),
    #[error("node numbering is not preorder")]
    NotPreorder,
    #[error("malformed tree line `{0}`")]
    BadLine(String),
    #[error("missing or malformed `n=` header")]
    BadHeader,
    #[error("expected {0} node lines, found {1}")]
    NodeCountMismatch(usize, usize),
    #[error("edge endpoint {0} out of range")]
    EdgeOutOfRange(usize),
    #[error("node index {0} out of range")]
    NodeOutOfRange(usize),
    #[error("label `{0}` is not a unary symbol of the signature")]
    UnknownLabel(String),
    #[error("edge relation `{0}` is not a binary symbol of the signature")]
    UnknownRelation(String),
    #[error(transparent)]
    Type(#[from] TypeError),
}

/// A finite ordered tree with label sets on nodes and extensional free binary
/// relations on pairs.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Tree {
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    labels: Vec<BTreeSet<String>>,
    edges: BTreeMap<String, BTreeSet<(usize, usize)>>,
}

/// The sixteen positions a node w can occupy relative to a node v, used by
/// the counting-to-plain translation. Unlike the ten order relations these
/// overlap; they are unions of order relations reachable by simple closure
/// patterns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Position16 {
    /// w is a strict descendant of v.
    StrictDescendant,
    /// w = v or w is a strict descendant of v.
    DescendantOrSelf,
    /// w is a following sibling of v or a strict descendant of one.
    FollowingSiblingSubtreeIncl,
    /// w is a strict descendant of a following sibling of v.
    DescendantOfFollowingSibling,
    /// w is a preceding sibling of v or a strict descendant of one.
    PrecedingSiblingSubtreeIncl,
    /// w is a strict descendant of a preceding sibling of v.
    DescendantOfPrecedingSibling,
    /// w is a child of v.
    Child,
    /// w is a strict descendant of v but not a child.
    DeepDescendant,
    /// w is a strict ancestor of v.
    Ancestor,
    /// w is a strict ancestor of v but not its parent.
    DeepAncestor,
    /// w is a following sibling of v.
    FollowingSibling,
    /// w is a preceding sibling of v.
    PrecedingSibling,
    /// w is a following sibling of v other than the immediate next one.
    FarFollowingSibling,
    /// w is a preceding sibling of v other than the immediate previous one.
    FarPrecedingSibling,
    /// w is a sibling of v or a strict descendant of a sibling of v.
    SiblingSubtree,
    /// w is a sibling of a strict ancestor of v, or a strict descendant of
    /// such a sibling.
    AncestorSiblingSubtree,
}

impl Position16 {
    pub const ALL: [Position16; 16] = [
        Position16::StrictDescendant,
        Position16::DescendantOrSelf,
        Position16::FollowingSiblingSubtreeIncl,
        Position16::DescendantOfFollowingSibling,
        Position16::PrecedingSiblingSubtreeIncl,
        Position16::DescendantOfPrecedingSibling,
        Position16::Child,
        Position16::DeepDescendant,
        Position16::Ancestor,
        Position16::DeepAncestor,
        Position16::FollowingSibling,
        Position16::PrecedingSibling,
        Position16::FarFollowingSibling,
        Position16::FarPrecedingSibling,
        Position16::SiblingSubtree,
        Position16::AncestorSiblingSubtree,
    ];
}

impl fmt::Display for Position16 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self)
    }
}

impl Tree {
    /// Build a tree from parent pointers (`None` exactly for the root, which
    /// must be node 0). Numbering must be preorder with children in index
    /// order.
    pub fn new(parents: Vec<Option<usize>>) -> Result<Tree, TreeError> {
        let n = parents.len();
        if n == 0 {
            return Err(TreeError::Empty);
        }
        let roots = parents.iter().filter(|p| p.is_none()).count();
        if roots != 1 {
            return Err(TreeError::RootCount(roots));
        }
        if parents[0].is_some() {
            return Err(TreeError::RootNotFirst);
        }
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (v, p) in parents.iter().enumerate() {
            if let Some(p) = *p {
                if p >= n {
                    return Err(TreeError::ParentOutOfRange(v, p));
                }
                if p >= v {
                    // A parent later than its child cannot occur in preorder.
                    return Err(TreeError::NotReachable(v));
                }
                children[p].push(v);
            }
        }
        // Children are pushed in index order, so a DFS visiting them in that
        // order must reproduce the numbering exactly.
        let mut order = Vec::with_capacity(n);
        let mut stack = vec![0usize];
        while let Some(v) = stack.pop() {
            order.push(v);
            for c in children[v].iter().rev() {
                stack.push(*c);
            }
        }
        if order.len() != n {
            return Err(TreeError::NotReachable(order.len()));
        }
        if order.iter().enumerate().any(|(i, v)| i != *v) {
            return Err(TreeError::NotPreorder);
        }
        Ok(Tree {
            parent: parents,
            children,
            labels: vec![BTreeSet::new(); n],
            edges: BTreeMap::new(),
        })
    }

    /// Build from parent pointers in any valid shape, renumbering into
    /// canonical preorder. Labels and edges start empty.
    pub fn from_shape(parents: &[Option<usize>]) -> Result<Tree, TreeError> {
        let n = parents.len();
        if n == 0 {
            return Err(TreeError::Empty);
        }
        let mut root = None;
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (v, p) in parents.iter().enumerate() {
            match *p {
                None => {
                    if root.replace(v).is_some() {
                        return Err(TreeError::RootCount(2));
                    }
                }
                Some(p) => {
                    if p >= n {
                        return Err(TreeError::ParentOutOfRange(v, p));
                    }
                    children[p].push(v);
                }
            }
        }
        let root = root.ok_or(TreeError::RootCount(0))?;
        let mut renum = vec![usize::MAX; n];
        let mut order = Vec::with_capacity(n);
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            renum[v] = order.len();
            order.push(v);
            for c in children[v].iter().rev() {
                stack.push(*c);
            }
        }
        if order.len() != n {
            return Err(TreeError::NotReachable(order.len()));
        }
        let new_parents: Vec<Option<usize>> =
            order.iter().map(|v| parents[*v].map(|p| renum[p])).collect();
        Tree::new(new_parents)
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        false
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

    pub fn nodes(&self) -> impl Iterator<Item = usize> {
        0..self.len()
    }

    pub fn labels(&self, v: usize) -> &BTreeSet<String> {
        &self.labels[v]
    }

    pub fn add_label(&mut self, v: usize, label: impl Into<String>) {
        self.labels[v].insert(label.into());
    }

    pub fn set_labels(&mut self, v: usize, labels: BTreeSet<String>) {
        self.labels[v] = labels;
    }

    pub fn edge_holds(&self, rel: &str, a: usize, b: usize) -> bool {
        self.edges.get(rel).map(|s| s.contains(&(a, b))).unwrap_or(false)
    }

    pub fn add_edge(&mut self, rel: impl Into<String>, a: usize, b: usize) {
        self.edges.entry(rel.into()).or_default().insert((a, b));
    }

    pub fn remove_edge(&mut self, rel: &str, a: usize, b: usize) {
        if let Some(s) = self.edges.get_mut(rel) {
            s.remove(&(a, b));
        }
    }

    pub fn edges(&self) -> &BTreeMap<String, BTreeSet<(usize, usize)>> {
        &self.edges
    }

    /// Depth of a node: number of nodes on the path from the root inclusive,
    /// so the root has depth 1.
    pub fn depth(&self, v: usize) -> usize {
        let mut d = 1;
        let mut v = v;
        while let Some(p) = self.parent[v] {
            d += 1;
            v = p;
        }
        d
    }

    pub fn height(&self) -> usize {
        self.nodes().map(|v| self.depth(v)).max().unwrap()
    }

    pub fn max_degree(&self) -> usize {
        self.children.iter().map(|c| c.len()).max().unwrap()
    }

    /// Is a a strict ancestor of b?
    pub fn is_strict_ancestor(&self, a: usize, b: usize) -> bool {
        let mut v = b;
        while let Some(p) = self.parent[v] {
            if p == a {
                return true;
            }
            v = p;
        }
        false
    }

    fn sibling_rank(&self, v: usize) -> Option<(usize, usize)> {
        let p = self.parent[v]?;
        let rank = self.children[p].iter().position(|c| *c == v).unwrap();
        Some((p, rank))
    }

    /// The unique order relation in which the pair (u, v) stands. Total over
    /// ordered pairs; the ten cases are mutually exclusive.
    pub fn order_of(&self, u: usize, v: usize) -> OrderFormula {
        if u == v {
            return OrderFormula::Equal;
        }
        if self.parent[v] == Some(u) {
            return OrderFormula::Down;
        }
        if self.parent[u] == Some(v) {
            return OrderFormula::Up;
        }
        if self.is_strict_ancestor(u, v) {
            return OrderFormula::DeepDown;
        }
        if self.is_strict_ancestor(v, u) {
            return OrderFormula::DeepUp;
        }
        if let (Some((pu, ru)), Some((pv, rv))) = (self.sibling_rank(u), self.sibling_rank(v)) {
            if pu == pv {
                return if rv == ru + 1 {
                    OrderFormula::Right
                } else if ru == rv + 1 {
                    OrderFormula::Left
                } else if rv > ru {
                    OrderFormula::FarRight
                } else {
                    OrderFormula::FarLeft
                };
            }
        }
        OrderFormula::Free
    }

    /// Does w stand in the given (overlapping) position relative to v?
    pub fn in_position(&self, pos: Position16, v: usize, w: usize) -> bool {
        use Position16::*;
        let desc = |a: usize, b: usize| self.is_strict_ancestor(a, b);
        let sib_after = |a: usize, b: usize| {
            matches!(
                self.order_of(a, b),
                OrderFormula::Right | OrderFormula::FarRight
            )
        };
        let sib_before = |a: usize, b: usize| {
            matches!(self.order_of(a, b), OrderFormula::Left | OrderFormula::FarLeft)
        };
        match pos {
            StrictDescendant => desc(v, w),
            DescendantOrSelf => v == w || desc(v, w),
            FollowingSiblingSubtreeIncl => {
                sib_after(v, w) || self.nodes().any(|s| sib_after(v, s) && desc(s, w))
            }
            DescendantOfFollowingSibling => self.nodes().any(|s| sib_after(v, s) && desc(s, w)),
            PrecedingSiblingSubtreeIncl => {
                sib_before(v, w) || self.nodes().any(|s| sib_before(v, s) && desc(s, w))
            }
            DescendantOfPrecedingSibling => self.nodes().any(|s| sib_before(v, s) && desc(s, w)),
            Child => self.parent[w] == Some(v),
            DeepDescendant => desc(v, w) && self.parent[w] != Some(v),
            Ancestor => desc(w, v),
            DeepAncestor => desc(w, v) && self.parent[v] != Some(w),
            FollowingSibling => sib_after(v, w),
            PrecedingSibling => sib_before(v, w),
            FarFollowingSibling => self.order_of(v, w) == OrderFormula::FarRight,
            FarPrecedingSibling => self.order_of(v, w) == OrderFormula::FarLeft,
            SiblingSubtree => {
                sib_after(v, w)
                    || sib_before(v, w)
                    || self
                        .nodes()
                        .any(|s| (sib_after(v, s) || sib_before(v, s)) && desc(s, w))
            }
            AncestorSiblingSubtree => self.nodes().any(|a| {
                desc(a, v)
                    && self.nodes().any(|s| {
                        (sib_after(a, s) || sib_before(a, s)) && (s == w || desc(s, w))
                    })
            }),
        }
    }

    /// The atomic 1-type of a node over the signature. Fails if the node
    /// carries a label outside the signature.
    pub fn one_type_of(&self, sig: &Signature, v: usize) -> Result<OneType, TreeError> {
        if v >= self.len() {
            return Err(TreeError::NodeOutOfRange(v));
        }
        for l in &self.labels[v] {
            if !sig.has_unary(l) {
                return Err(TreeError::UnknownLabel(l.clone()));
            }
        }
        for rel in self.edges.keys() {
            if !sig.has_binary(rel) {
                return Err(TreeError::UnknownRelation(rel.clone()));
            }
        }
        let unary = sig.unary.iter().map(|s| self.labels[v].contains(s)).collect();
        let loops = sig.binary.iter().map(|s| self.edge_holds(s, v, v)).collect();
        Ok(OneType::new(sig, unary, loops)?)
    }

    /// The atomic 2-type of an ordered pair of distinct nodes.
    pub fn two_type_of(&self, sig: &Signature, u: usize, v: usize) -> Result<TwoType, TreeError> {
        let order = self.order_of(u, v);
        if order == OrderFormula::Equal {
            return Err(TreeError::Type(TypeError::EqualOrder));
        }
        let left = self.one_type_of(sig, u)?;
        let right = self.one_type_of(sig, v)?;
        let cross = sig
            .binary
            .iter()
            .map(|s| (self.edge_holds(s, u, v), self.edge_holds(s, v, u)))
            .collect();
        Ok(TwoType::new(left, right, order, cross)?)
    }

    /// Parse the textual format: `n=<count>` header, one `parent : labels`
    /// line per node in index order, then `edge <R> <i> <j>` lines.
    pub fn load(text: &str) -> Result<Tree, TreeError> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or(TreeError::BadHeader)?;
        let n: usize = header
            .strip_prefix("n=")
            .and_then(|s| s.trim().parse().ok())
            .ok_or(TreeError::BadHeader)?;
        if n == 0 {
            return Err(TreeError::Empty);
        }
        let mut parents = Vec::with_capacity(n);
        let mut labels: Vec<BTreeSet<String>> = Vec::with_capacity(n);
        let mut edge_lines: Vec<(String, usize, usize)> = Vec::new();
        for line in lines {
            if let Some(rest) = line.strip_prefix("edge ") {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                if parts.len() != 3 {
                    return Err(TreeError::BadLine(line.to_string()));
                }
                let a: usize =
                    parts[1].parse().map_err(|_| TreeError::BadLine(line.to_string()))?;
                let b: usize =
                    parts[2].parse().map_err(|_| TreeError::BadLine(line.to_string()))?;
                edge_lines.push((parts[0].to_string(), a, b));
            } else {
                let (par, labs) = line
                    .split_once(':')
                    .ok_or_else(|| TreeError::BadLine(line.to_string()))?;
                let par = par.trim();
                let parent = if par == "-1" {
                    None
                } else {
                    Some(par.parse::<usize>().map_err(|_| TreeError::BadLine(line.to_string()))?)
                };
                parents.push(parent);
                labels.push(labs.split_whitespace().map(String::from).collect());
            }
        }
        if parents.len() != n {
            return Err(TreeError::NodeCountMismatch(n, parents.len()));
        }
        let mut t = Tree::new(parents)?;
        for (v, l) in labels.into_iter().enumerate() {
            t.labels[v] = l;
        }
        for (rel, a, b) in edge_lines {
            if a >= n {
                return Err(TreeError::EdgeOutOfRange(a));
            }
            if b >= n {
                return Err(TreeError::EdgeOutOfRange(b));
            }
            t.add_edge(rel, a, b);
        }
        Ok(t)
    }

    /// Serialize into the textual format; `load(save(t)) == t` bit for bit
    /// on reserialization.
    pub fn save(&self) -> String {
        let mut out = format!("n={}\n", self.len());
        for v in self.nodes() {
            let par = match self.parent[v] {
                None => "-1".to_string(),
                Some(p) => p.to_string(),
            };
            let labels: Vec<&str> = self.labels[v].iter().map(String::as_str).collect();
            out.push_str(&format!("{} : {}\n", par, labels.join(" ")));
        }
        for (rel, pairs) in &self.edges {
            for (a, b) in pairs {
                out.push_str(&format!("edge {} {} {}\n", rel, a, b));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Root with children 1 and 4; node 1 has children 2, 3.
    fn sample() -> Tree {
        Tree::new(vec![None, Some(0), Some(1), Some(1), Some(0)]).unwrap()
    }

    #[test]
    fn build_rejects_non_preorder() {
        // parent list where node 3 is a child of 1 but numbered after 2,
        // a child of 0: preorder would be 0,1,3,2.
        let r = Tree::new(vec![None, Some(0), Some(0), Some(1)]);
        assert_eq!(r, Err(TreeError::NotPreorder));
        // from_shape renumbers it fine.
        let t = Tree::from_shape(&[None, Some(0), Some(0), Some(1)]).unwrap();
        assert_eq!(t.len(), 4);
        assert_eq!(t.children(0), &[1, 3]);
        assert_eq!(t.children(1), &[2]);
    }

    #[test]
    fn build_rejects_cycles_and_multi_roots() {
        assert!(Tree::new(vec![None, None]).is_err());
        assert!(Tree::new(vec![Some(1), Some(0)]).is_err());
        assert!(Tree::new(vec![]).is_err());
    }

    #[test]
    fn order_partition_is_total_and_exclusive() {
        let t = sample();
        for u in t.nodes() {
            for v in t.nodes() {
                let o = t.order_of(u, v);
                assert_eq!(t.order_of(v, u), o.invert(), "pair ({}, {})", u, v);
                assert_eq!(o == OrderFormula::Equal, u == v);
            }
        }
    }

    #[test]
    fn order_cases() {
        let t = sample();
        assert_eq!(t.order_of(0, 1), OrderFormula::Down);
        assert_eq!(t.order_of(1, 0), OrderFormula::Up);
        assert_eq!(t.order_of(0, 2), OrderFormula::DeepDown);
        assert_eq!(t.order_of(2, 0), OrderFormula::DeepUp);
        assert_eq!(t.order_of(1, 4), OrderFormula::Right);
        assert_eq!(t.order_of(4, 1), OrderFormula::Left);
        assert_eq!(t.order_of(2, 3), OrderFormula::Right);
        assert_eq!(t.order_of(2, 4), OrderFormula::Free);
        assert_eq!(t.order_of(3, 4), OrderFormula::Free);
        let path = Tree::new(vec![None, Some(0), Some(1), Some(2)]).unwrap();
        assert_eq!(path.order_of(0, 3), OrderFormula::DeepDown);
        let wide = Tree::new(vec![None, Some(0), Some(0), Some(0)]).unwrap();
        assert_eq!(wide.order_of(1, 3), OrderFormula::FarRight);
        assert_eq!(wide.order_of(3, 1), OrderFormula::FarLeft);
    }

    #[test]
    fn positions_examples() {
        let t = sample();
        assert!(t.in_position(Position16::StrictDescendant, 0, 2));
        assert!(!t.in_position(Position16::StrictDescendant, 0, 0));
        assert!(t.in_position(Position16::DescendantOrSelf, 0, 0));
        assert!(t.in_position(Position16::Child, 1, 2));
        assert!(t.in_position(Position16::DeepDescendant, 0, 3));
        assert!(!t.in_position(Position16::DeepDescendant, 0, 1));
        assert!(t.in_position(Position16::Ancestor, 2, 1));
        assert!(t.in_position(Position16::DeepAncestor, 2, 0));
        assert!(!t.in_position(Position16::DeepAncestor, 2, 1));
        // 4 follows 1; descendants of 1 relative to 4 are in the preceding
        // sibling subtree.
        assert!(t.in_position(Position16::FollowingSibling, 1, 4));
        assert!(t.in_position(Position16::FollowingSiblingSubtreeIncl, 1, 4));
        assert!(t.in_position(Position16::PrecedingSiblingSubtreeIncl, 4, 2));
        assert!(t.in_position(Position16::DescendantOfPrecedingSibling, 4, 2));
        assert!(!t.in_position(Position16::DescendantOfPrecedingSibling, 4, 1));
        assert!(t.in_position(Position16::SiblingSubtree, 4, 3));
        // 2's ancestor 1 has sibling 4: 4 is in 2's ancestor-sibling subtree.
        assert!(t.in_position(Position16::AncestorSiblingSubtree, 2, 4));
        assert!(!t.in_position(Position16::AncestorSiblingSubtree, 2, 0));
        let wide = Tree::new(vec![None, Some(0), Some(0), Some(0)]).unwrap();
        assert!(wide.in_position(Position16::FarFollowingSibling, 1, 3));
        assert!(!wide.in_position(Position16::FarFollowingSibling, 1, 2));
        assert!(wide.in_position(Position16::FarPrecedingSibling, 3, 1));
    }

    #[test]
    fn save_load_round_trip() {
        let mut t = sample();
        t.add_label(0, "A");
        t.add_label(2, "B");
        t.add_label(2, "A");
        t.add_edge("R", 0, 3);
        t.add_edge("R", 3, 3);
        let text = t.save();
        let t2 = Tree::load(&text).unwrap();
        assert_eq!(t, t2);
        // Reserialization is bit-exact.
        assert_eq!(t2.save(), text);
    }

    #[test]
    fn load_rejects_malformed() {
        assert!(Tree::load("").is_err());
        assert!(Tree::load("n=0\n").is_err());
        assert!(Tree::load("n=2\n-1 :\n").is_err());
        assert!(Tree::load("n=1\n-1 :\nedge R 0 1\n").is_err());
        assert!(Tree::load("n=2\n-1 :\n5 :\n").is_err());
        // Forward parent reference.
        assert!(Tree::load("n=2\n1 :\n-1 :\n").is_err());
    }

    #[test]
    fn types_of_nodes() {
        let sig = Signature::new(["A", "B"], ["R"]).unwrap();
        let mut t = sample();
        t.add_label(1, "A");
        t.add_edge("R", 1, 1);
        t.add_edge("R", 1, 4);
        let a = t.one_type_of(&sig, 1).unwrap();
        assert!(a.has_unary(&sig, "A"));
        assert!(!a.has_unary(&sig, "B"));
        assert!(a.has_loop(&sig, "R"));
        let tt = t.two_type_of(&sig, 1, 4).unwrap();
        assert_eq!(tt.order, OrderFormula::Right);
        assert_eq!(tt.cross, vec![(true, false)]);
        assert_eq!(tt.invert().order, OrderFormula::Left);
        assert!(t.two_type_of(&sig, 1, 1).is_err());
        t.add_label(0, "Z");
        assert!(t.one_type_of(&sig, 0).is_err());
    }

    #[test]
    fn depth_and_degree() {
        let t = sample();
        assert_eq!(t.depth(0), 1);
        assert_eq!(t.depth(2), 3);
        assert_eq!(t.height(), 3);
        assert_eq!(t.max_degree(), 2);
    }
}
