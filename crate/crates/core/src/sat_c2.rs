//! Finite satisfiability for counting two-variable formulas over trees.
//!
//! The decision procedure searches for a tree in which every node's full
//! type is consistent with the formula.  Full types of children are not
//! guessed from the whole astronomically large space: the sibling, ancestor
//! and incomparable components are forced by the parent's type and the
//! chosen child sequence, so only the children's own downward components
//! are enumerated.  Accepted runs are reconstructed into an explicit tree
//! and re-verified by direct evaluation before a SAT verdict is returned.

use std::collections::HashMap;
use std::time::Instant;

use num_bigint::BigUint;
use thiserror::Error;

use crate::formula::OrderFormula;
use crate::normalize::NormalFormC2;
use crate::semantics::{
    full_type, horizontal, is_phi_consistent, model_check_sentence, reduce,
    FullType, SemanticsError,
};
use crate::tree::Tree;
use crate::types::{enumerate_one_types, Count, KMultiset, OneType};
use crate::verdict::{Outcome, SearchMode, Stats, Verdict};

/// Depth and degree caps for the search.  Sound-mode values are the exact
/// theoretical bounds; bounded-mode values are user-supplied caps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct C2Bounds {
    pub max_depth: BigUint,
    pub max_degree: BigUint,
    pub mode: SearchMode,
}

impl C2Bounds {
    pub fn bounded(max_depth: usize, max_degree: usize) -> C2Bounds {
        C2Bounds {
            max_depth: BigUint::from(max_depth),
            max_degree: BigUint::from(max_degree),
            mode: SearchMode::Bounded,
        }
    }
}

/// The complete bounds: depth 3(C+2)^(10m+1)|𝛂|² and degree (4C²+8C)|𝛂|⁵,
/// evaluated exactly.
pub fn c2_bounds(phi: &NormalFormC2) -> C2Bounds {
    let m = phi.m() as u32;
    let c = BigUint::from(phi.c());
    let a = BigUint::from(enumerate_one_types(&phi.sig).len());
    let max_depth = BigUint::from(3u32) * (&c + 2u32).pow(10 * m + 1) * a.pow(2);
    let max_degree =
        (BigUint::from(4u32) * c.pow(2) + BigUint::from(8u32) * &c) * a.pow(5);
    C2Bounds { max_depth, max_degree, mode: SearchMode::Sound }
}

/// Local consistency of a parent full type with the ordered sequence of its
/// children's full types: sibling components chain through the sequence,
/// the parent's downward components aggregate the children's, and each
/// child's upward and incomparable components are determined by the parent.
pub fn locally_consistent(
    a: &FullType,
    children: &[FullType],
) -> Result<bool, SemanticsError> {
    use OrderFormula::*;
    let k = a.k();
    for c in children {
        if c.k() != k {
            return Err(SemanticsError::CutoffMismatch(c.k(), k));
        }
    }
    let empty = KMultiset::empty(k);
    let n = children.len();

    let mut down = KMultiset::empty(k);
    let mut deep_down = KMultiset::empty(k);
    let mut all_below: Vec<KMultiset> = Vec::with_capacity(n);
    for c in children {
        down = down.union(c.get(Equal)).expect("thresholds agree");
        let below = c.get(Down).union(c.get(DeepDown)).expect("thresholds agree");
        deep_down = deep_down.union(&below).expect("thresholds agree");
        all_below.push(below);
    }
    if a.get(Down) != &down || a.get(DeepDown) != &deep_down {
        return Ok(false);
    }

    let above = a.get(Up).union(a.get(DeepUp)).expect("thresholds agree");
    let side_base = a
        .get(Free)
        .union(a.get(Left))
        .and_then(|m| m.union(a.get(Right)))
        .and_then(|m| m.union(a.get(FarLeft)))
        .and_then(|m| m.union(a.get(FarRight)))
        .expect("thresholds agree");

    for (i, c) in children.iter().enumerate() {
        let left = if i == 0 { &empty } else { children[i - 1].get(Equal) };
        if c.get(Left) != left {
            return Ok(false);
        }
        let far_left = if i == 0 {
            empty.clone()
        } else {
            children[i - 1]
                .get(Left)
                .union(children[i - 1].get(FarLeft))
                .expect("thresholds agree")
        };
        if c.get(FarLeft) != &far_left {
            return Ok(false);
        }
        let right = if i + 1 < n { children[i + 1].get(Equal) } else { &empty };
        if c.get(Right) != right {
            return Ok(false);
        }
        let far_right = if i + 1 < n {
            children[i + 1]
                .get(Right)
                .union(children[i + 1].get(FarRight))
                .expect("thresholds agree")
        } else {
            empty.clone()
        };
        if c.get(FarRight) != &far_right {
            return Ok(false);
        }
        if c.get(Up) != a.get(Equal) || c.get(DeepUp) != &above {
            return Ok(false);
        }
        let mut free = side_base.clone();
        for (j, below) in all_below.iter().enumerate() {
            if j != i {
                free = free.union(below).expect("thresholds agree");
            }
        }
        if c.get(Free) != &free {
            return Ok(false);
        }
    }
    Ok(true)
}

struct Stopped;

const NODE_BUDGET: u64 = 30_000_000;
const MULTISET_CAP: usize = 65_536;
const VECTOR_CAP: usize = 100_000;
const PERM_CAP: usize = 10_000;

struct Search<'a> {
    phi: &'a NormalFormC2,
    k: u32,
    max_deg: usize,
    deadline: Option<Instant>,
    nodes: u64,
    truncated: bool,
    memo: HashMap<(FullType, usize), Option<Tree>>,
}

impl<'a> Search<'a> {
    fn tick(&mut self) -> Result<(), Stopped> {
        self.nodes += 1;
        if self.nodes > NODE_BUDGET {
            return Err(Stopped);
        }
        if self.nodes & 0xfff == 0 {
            if let Some(d) = self.deadline {
                if Instant::now() >= d {
                    return Err(Stopped);
                }
            }
        }
        Ok(())
    }

    fn realize(
        &mut self,
        a: &FullType,
        depth_left: usize,
    ) -> Result<Option<Tree>, Stopped> {
        self.tick()?;
        let key = (a.clone(), depth_left);
        if let Some(hit) = self.memo.get(&key) {
            return Ok(hit.clone());
        }
        let result = self.expand(a, depth_left)?;
        self.memo.insert(key, result.clone());
        Ok(result)
    }

    fn expand(
        &mut self,
        a: &FullType,
        depth_left: usize,
    ) -> Result<Option<Tree>, Stopped> {
        use OrderFormula::*;
        if !a.invariants_ok() {
            return Ok(None);
        }
        match is_phi_consistent(self.phi, a) {
            Ok(true) => {}
            Ok(false) => return Ok(None),
            Err(_) => return Ok(None),
        }
        let down = a.get(Down).clone();
        let deep_down = a.get(DeepDown).clone();
        if down.is_empty() {
            if !deep_down.is_empty() {
                return Ok(None);
            }
            return Ok(Some(self.leaf(a.alpha())));
        }
        if depth_left == 0 {
            return Ok(None);
        }

        for counts in self.child_count_assignments(&down) {
            let n: usize = counts.iter().map(|(_, c)| *c).sum();
            if n == 0 || n > self.max_deg {
                continue;
            }
            let perms = self.multiset_permutations(&counts);
            for seq in perms {
                self.tick()?;
                let distributions = self.below_distributions(&deep_down, n)?;
                for pairs in distributions {
                    self.tick()?;
                    let children = match self.derive_children(a, &seq, &pairs) {
                        Some(c) => c,
                        None => continue,
                    };
                    debug_assert!(
                        locally_consistent(a, &children).unwrap_or(false),
                        "derived children must be locally consistent"
                    );
                    let mut subs = Vec::with_capacity(n);
                    let mut ok = true;
                    for c in &children {
                        match self.realize(c, depth_left - 1)? {
                            Some(t) => subs.push(t),
                            None => {
                                ok = false;
                                break;
                            }
                        }
                    }
                    if ok {
                        return Ok(Some(self.graft(a.alpha(), &subs)));
                    }
                }
            }
        }
        Ok(None)
    }

    /// Exact child counts per 1-type compatible with the parent's child
    /// multiset: a finite entry fixes the count, a saturated entry ranges
    /// over everything above the threshold up to the degree cap.
    fn child_count_assignments(
        &mut self,
        down: &KMultiset,
    ) -> Vec<Vec<(OneType, usize)>> {
        let mut out: Vec<Vec<(OneType, usize)>> = vec![Vec::new()];
        for (alpha, c) in down.iter() {
            let options: Vec<usize> = match c {
                Count::Fin(v) => vec![v as usize],
                Count::Inf => ((self.k as usize + 1)..=self.max_deg).collect(),
            };
            let mut next = Vec::new();
            for partial in &out {
                for &o in &options {
                    let mut p = partial.clone();
                    p.push((alpha.clone(), o));
                    next.push(p);
                }
            }
            out = next;
        }
        out
    }

    /// All distinct orderings of the child 1-type sequence.
    fn multiset_permutations(
        &mut self,
        counts: &[(OneType, usize)],
    ) -> Vec<Vec<OneType>> {
        let total: usize = counts.iter().map(|(_, c)| *c).sum();
        let mut size = 1usize;
        let mut remaining = total;
        for (_, c) in counts {
            for pick in 0..*c {
                size = size.saturating_mul(remaining - pick) / (pick + 1);
            }
            remaining -= c;
            if size > PERM_CAP {
                self.truncated = true;
                return Vec::new();
            }
        }
        let mut pool: Vec<(OneType, usize)> = counts.to_vec();
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(total);
        fn rec(
            pool: &mut Vec<(OneType, usize)>,
            cur: &mut Vec<OneType>,
            total: usize,
            out: &mut Vec<Vec<OneType>>,
        ) {
            if cur.len() == total {
                out.push(cur.clone());
                return;
            }
            for i in 0..pool.len() {
                if pool[i].1 == 0 {
                    continue;
                }
                pool[i].1 -= 1;
                cur.push(pool[i].0.clone());
                rec(pool, cur, total, out);
                cur.pop();
                pool[i].1 += 1;
            }
        }
        rec(&mut pool, &mut cur, total, &mut out);
        out
    }

    /// Per-child (Down, DeepDown) pairs whose saturated union matches the
    /// parent's deep-descendant multiset, enumerated independently per
    /// 1-type and combined.
    fn below_distributions(
        &mut self,
        deep_down: &KMultiset,
        n: usize,
    ) -> Result<Vec<Vec<(KMultiset, KMultiset)>>, Stopped> {
        let base = vec![(KMultiset::empty(self.k), KMultiset::empty(self.k)); n];
        let mut out = vec![base];
        for (alpha, target) in deep_down.iter() {
            let vectors = self.pair_vectors(n, target)?;
            if vectors.is_empty() {
                return Ok(Vec::new());
            }
            let mut next = Vec::new();
            for partial in &out {
                for vector in &vectors {
                    self.tick()?;
                    let mut p = partial.clone();
                    for (i, (d, dd)) in vector.iter().enumerate() {
                        if !d.is_zero() {
                            p[i].0.set(alpha.clone(), *d);
                        }
                        if !dd.is_zero() {
                            p[i].1.set(alpha.clone(), *dd);
                        }
                    }
                    next.push(p);
                }
                if next.len() > VECTOR_CAP {
                    self.truncated = true;
                    next.truncate(VECTOR_CAP);
                    break;
                }
            }
            out = next;
        }
        Ok(out)
    }

    /// Vectors of per-child (direct, deep) counts for a single 1-type whose
    /// saturated sum equals the target.
    fn pair_vectors(
        &mut self,
        n: usize,
        target: Count,
    ) -> Result<Vec<Vec<(Count, Count)>>, Stopped> {
        let k = self.k;
        let mut slots: Vec<Count> = (0..=k).map(Count::Fin).collect();
        slots.push(Count::Inf);
        let mut out = Vec::new();
        let mut cur: Vec<(Count, Count)> = Vec::with_capacity(n);
        // Depth-first over 2n slots, tracking the running saturated sum.
        fn rec(
            slots: &[Count],
            k: u32,
            n: usize,
            target: Count,
            sum: Count,
            cur: &mut Vec<(Count, Count)>,
            half: Option<Count>,
            out: &mut Vec<Vec<(Count, Count)>>,
            cap_hit: &mut bool,
        ) {
            if out.len() > VECTOR_CAP {
                *cap_hit = true;
                return;
            }
            if let (Count::Fin(t), Count::Fin(s)) = (target, sum) {
                if s > t {
                    return;
                }
            }
            if half.is_none() && cur.len() == n {
                let reached = match (target, sum) {
                    (Count::Fin(t), Count::Fin(s)) => s == t,
                    (Count::Inf, s) => !s.leq(k),
                    (Count::Fin(_), Count::Inf) => false,
                };
                if reached {
                    out.push(cur.clone());
                }
                return;
            }
            for &v in slots {
                if target != Count::Inf && v == Count::Inf {
                    continue;
                }
                let next_sum = crate::types::cut(
                    k,
                    match sum.add(v) {
                        s if s.leq(k) => s,
                        _ => Count::Inf,
                    },
                );
                match half {
                    None => {
                        rec(slots, k, n, target, next_sum, cur, Some(v), out, cap_hit)
                    }
                    Some(d) => {
                        cur.push((d, v));
                        rec(slots, k, n, target, next_sum, cur, None, out, cap_hit);
                        cur.pop();
                    }
                }
            }
        }
        let mut cap_hit = false;
        rec(
            &slots,
            k,
            n,
            target,
            Count::ZERO,
            &mut cur,
            None,
            &mut out,
            &mut cap_hit,
        );
        if cap_hit {
            self.truncated = true;
        }
        self.tick()?;
        Ok(out)
    }

    /// Full types of the children in order: self and downward components
    /// come from the guessed sequence and distribution, everything else is
    /// forced by the parent and the sequence.
    fn derive_children(
        &self,
        a: &FullType,
        seq: &[OneType],
        pairs: &[(KMultiset, KMultiset)],
    ) -> Option<Vec<FullType>> {
        use OrderFormula::*;
        let k = self.k;
        let n = seq.len();
        let above = a.get(Up).union(a.get(DeepUp)).expect("thresholds agree");
        let side_base = a
            .get(Free)
            .union(a.get(Left))
            .and_then(|m| m.union(a.get(Right)))
            .and_then(|m| m.union(a.get(FarLeft)))
            .and_then(|m| m.union(a.get(FarRight)))
            .expect("thresholds agree");
        let belows: Vec<KMultiset> = pairs
            .iter()
            .map(|(d, dd)| d.union(dd).expect("thresholds agree"))
            .collect();

        let mut out = Vec::with_capacity(n);
        let mut far_left = KMultiset::empty(k);
        for i in 0..n {
            let (d, dd) = &pairs[i];
            if d.is_empty() && !dd.is_empty() {
                return None;
            }
            let mut t = FullType::lone(k, seq[i].clone());
            t.set(Down, d.clone());
            t.set(DeepDown, dd.clone());
            t.set(Up, a.get(Equal).clone());
            t.set(DeepUp, above.clone());
            if i > 0 {
                t.set(Left, KMultiset::singleton(k, seq[i - 1].clone()));
            }
            t.set(FarLeft, far_left.clone());
            if i + 1 < n {
                t.set(Right, KMultiset::singleton(k, seq[i + 1].clone()));
                let mut fr = KMultiset::empty(k);
                for s in &seq[i + 2..] {
                    fr.add(s.clone(), Count::Fin(1));
                }
                t.set(FarRight, fr);
            }
            let mut free = side_base.clone();
            for (j, below) in belows.iter().enumerate() {
                if j != i {
                    free = free.union(below).expect("thresholds agree");
                }
            }
            t.set(Free, free);
            if i > 0 {
                far_left.add(seq[i - 1].clone(), Count::Fin(1));
            }
            out.push(t);
        }
        Some(out)
    }

    fn leaf(&self, alpha: &OneType) -> Tree {
        let mut t = Tree::new(vec![None]).expect("single node is a tree");
        for (i, name) in self.phi.sig.unary.iter().enumerate() {
            if alpha.unary[i] {
                t.add_label(0, name.clone());
            }
        }
        t
    }

    fn graft(&self, alpha: &OneType, subs: &[Tree]) -> Tree {
        let mut parents: Vec<Option<usize>> = vec![None];
        for s in subs {
            let off = parents.len();
            for v in 0..s.len() {
                parents.push(Some(s.parent(v).map(|p| p + off).unwrap_or(0)));
            }
        }
        let mut t = Tree::new(parents).expect("grafted shape is preorder");
        for (i, name) in self.phi.sig.unary.iter().enumerate() {
            if alpha.unary[i] {
                t.add_label(0, name.clone());
            }
        }
        let mut off = 1;
        for s in subs {
            for v in 0..s.len() {
                t.set_labels(off + v, s.labels(v).clone());
            }
            off += s.len();
        }
        t
    }
}

fn clamp(b: &BigUint) -> (usize, bool) {
    match usize::try_from(b) {
        Ok(v) => (v, false),
        Err(_) => (usize::MAX, true),
    }
}

/// Bounded satisfiability search.  Root candidates carry the node's own
/// 1-type and downward components only — a root has no ancestors, siblings
/// or incomparable nodes — and are tried in order of increasing size.
pub fn sat_c2(
    phi: &NormalFormC2,
    bounds: &C2Bounds,
    deadline: Option<Instant>,
) -> Verdict<C2Bounds> {
    use OrderFormula::*;
    let start = Instant::now();
    let k = phi.c();
    let (max_depth, depth_clamped) = clamp(&bounds.max_depth);
    let (max_deg, deg_clamped) = clamp(&bounds.max_degree);
    let mut search = Search {
        phi,
        k,
        max_deg,
        deadline,
        nodes: 0,
        truncated: false,
        memo: HashMap::new(),
    };

    let one_types = enumerate_one_types(&phi.sig);
    let weight = |m: &KMultiset| -> u64 {
        m.iter()
            .map(|(_, c)| match c {
                Count::Fin(v) => v as u64,
                Count::Inf => k as u64 + 1,
            })
            .sum()
    };

    let mut multisets: Vec<KMultiset> = vec![KMultiset::empty(k)];
    for alpha in &one_types {
        if multisets.len().saturating_mul(k as usize + 2) > MULTISET_CAP {
            search.truncated = true;
            break;
        }
        let mut next = Vec::new();
        for m in &multisets {
            for v in (0..=k).map(Count::Fin).chain([Count::Inf]) {
                let mut m2 = m.clone();
                if !v.is_zero() {
                    m2.set(alpha.clone(), v);
                }
                next.push(m2);
            }
        }
        multisets = next;
    }

    let mut roots: Vec<(u64, FullType)> = Vec::new();
    for alpha in &one_types {
        for d in &multisets {
            for dd in &multisets {
                if d.is_empty() && !dd.is_empty() {
                    continue;
                }
                let mut t = FullType::lone(k, alpha.clone());
                t.set(Down, d.clone());
                t.set(DeepDown, dd.clone());
                roots.push((weight(d) + weight(dd), t));
            }
        }
    }
    roots.sort_by(|a, b| a.0.cmp(&b.0));

    let attempt = (|| -> Result<Option<Tree>, Stopped> {
        for (_, root) in &roots {
            for theta in [Up, DeepUp, Right, Left, FarRight, FarLeft, Free] {
                assert!(root.get(theta).is_empty(), "root context must be empty");
            }
            if let Some(t) = search.realize(root, max_depth.saturating_sub(1))? {
                return Ok(Some(t));
            }
        }
        Ok(None)
    })();

    let outcome = match attempt {
        Err(Stopped) => Outcome::Timeout,
        Ok(Some(t)) => {
            let ok = model_check_sentence(&t, &phi.to_formula())
                .expect("witness evaluation cannot fail");
            assert!(ok, "reconstructed witness must satisfy the formula");
            Outcome::Sat(t)
        }
        Ok(None) => {
            if search.truncated {
                Outcome::Timeout
            } else if bounds.mode == SearchMode::Sound
                && !depth_clamped
                && !deg_clamped
            {
                Outcome::UnsatProved
            } else {
                Outcome::UnsatWithinBounds
            }
        }
    };

    Verdict {
        outcome,
        bounds_used: bounds.clone(),
        stats: Stats { nodes_explored: search.nodes, elapsed: start.elapsed() },
    }
}

#[derive(Debug, Error)]
pub enum SurgeryError {
    #[error("node index out of range")]
    NodeOutOfRange,
    #[error("the replacement node must lie strictly below the replaced node")]
    NotBelow,
    #[error("the two nodes have different reduced types")]
    ReducedTypeMismatch,
    #[error("the input tree does not satisfy the formula")]
    NotAModel,
    #[error("both interval endpoints must be children of the given parent")]
    NotSiblings,
    #[error("interval endpoints must come in left-to-right order")]
    WrongOrder,
    #[error("interval endpoints must be unmarked")]
    EndpointMarked,
    #[error("a marked node lies strictly between the interval endpoints")]
    MarkedBetween,
    #[error("the two endpoints have different horizontal types")]
    HorizontalTypeMismatch,
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

fn copy_skipping(
    t: &Tree,
    node: usize,
    new_parent: Option<usize>,
    replace: Option<(usize, usize)>,
    skip: &[usize],
    parents: &mut Vec<Option<usize>>,
    labels: &mut Vec<std::collections::BTreeSet<String>>,
) {
    if skip.contains(&node) {
        return;
    }
    if let Some((u, v)) = replace {
        if node == u {
            copy_skipping(t, v, new_parent, None, skip, parents, labels);
            return;
        }
    }
    let idx = parents.len();
    parents.push(new_parent);
    labels.push(t.labels(node).clone());
    for &c in t.children(node) {
        copy_skipping(t, c, Some(idx), replace, skip, parents, labels);
    }
}

fn rebuild(
    t: &Tree,
    replace: Option<(usize, usize)>,
    skip: &[usize],
) -> Tree {
    let mut parents = Vec::new();
    let mut labels = Vec::new();
    copy_skipping(t, t.root(), None, replace, skip, &mut parents, &mut labels);
    let mut out = Tree::new(parents).expect("copied shape is preorder");
    for (v, l) in labels.into_iter().enumerate() {
        out.set_labels(v, l);
    }
    out
}

/// Depth-reducing surgery: replace the subtree rooted at `u` by the subtree
/// rooted at `v`, where `v` lies strictly below `u` and both have the same
/// reduced type.  Under these preconditions the result is again a model.
pub fn cut_model(
    t: &Tree,
    u: usize,
    v: usize,
    phi: &NormalFormC2,
) -> Result<Tree, SurgeryError> {
    if u >= t.len() || v >= t.len() {
        return Err(SurgeryError::NodeOutOfRange);
    }
    if !t.is_strict_ancestor(u, v) {
        return Err(SurgeryError::NotBelow);
    }
    let k = phi.c();
    let ru = reduce(phi, &full_type(t, &phi.sig, k, u)?)?;
    let rv = reduce(phi, &full_type(t, &phi.sig, k, v)?)?;
    if ru != rv {
        return Err(SurgeryError::ReducedTypeMismatch);
    }
    if !model_check_sentence(t, &phi.to_formula())? {
        return Err(SurgeryError::NotAModel);
    }
    Ok(rebuild(t, Some((u, v)), &[]))
}

/// The children of `parent` that must survive a horizontal cut: for each
/// 1-type, a quota of children carrying it and a quota of children with a
/// strict descendant carrying it, plus the first and last child.
pub fn marked_children(
    t: &Tree,
    parent: usize,
    phi: &NormalFormC2,
) -> Result<std::collections::BTreeSet<usize>, SurgeryError> {
    if parent >= t.len() {
        return Err(SurgeryError::NodeOutOfRange);
    }
    let kids = t.children(parent);
    let mut marked = std::collections::BTreeSet::new();
    if kids.is_empty() {
        return Ok(marked);
    }
    let quota = phi.c() as usize;
    for alpha in enumerate_one_types(&phi.sig) {
        let mut same = 0usize;
        let mut deep = 0usize;
        for &u in kids {
            if same < quota
                && t.one_type_of(&phi.sig, u).map_err(|_| SurgeryError::NodeOutOfRange)?
                    == alpha
            {
                same += 1;
                marked.insert(u);
            }
            if deep < quota {
                let mut found = false;
                let mut stack: Vec<usize> = t.children(u).to_vec();
                while let Some(w) = stack.pop() {
                    if t.one_type_of(&phi.sig, w)
                        .map_err(|_| SurgeryError::NodeOutOfRange)?
                        == alpha
                    {
                        found = true;
                        break;
                    }
                    stack.extend_from_slice(t.children(w));
                }
                if found {
                    deep += 1;
                    marked.insert(u);
                }
            }
        }
    }
    marked.insert(kids[0]);
    marked.insert(*kids.last().expect("non-empty"));
    Ok(marked)
}

/// Degree-reducing surgery: remove the sibling interval from `i` inclusive
/// to `j` exclusive, together with their subtrees.  Requires both endpoints
/// unmarked with equal horizontal types and no marked sibling in between.
pub fn horizontal_cut(
    t: &Tree,
    parent: usize,
    i: usize,
    j: usize,
    marked: &std::collections::BTreeSet<usize>,
    phi: &NormalFormC2,
) -> Result<Tree, SurgeryError> {
    if parent >= t.len() || i >= t.len() || j >= t.len() {
        return Err(SurgeryError::NodeOutOfRange);
    }
    let kids = t.children(parent);
    let pi = kids.iter().position(|&c| c == i);
    let pj = kids.iter().position(|&c| c == j);
    let (pi, pj) = match (pi, pj) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(SurgeryError::NotSiblings),
    };
    if pi >= pj {
        return Err(SurgeryError::WrongOrder);
    }
    if marked.contains(&i) || marked.contains(&j) {
        return Err(SurgeryError::EndpointMarked);
    }
    if kids[pi + 1..pj].iter().any(|c| marked.contains(c)) {
        return Err(SurgeryError::MarkedBetween);
    }
    let k = phi.c();
    let hi = horizontal(&full_type(t, &phi.sig, k, i)?);
    let hj = horizontal(&full_type(t, &phi.sig, k, j)?);
    if hi != hj {
        return Err(SurgeryError::HorizontalTypeMismatch);
    }
    Ok(rebuild(t, None, &kids[pi..pj]))
}
