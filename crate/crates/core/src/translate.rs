//! Elimination of counting quantifiers over the full navigational signature.
//!
//! The core device is a family of counting formulas: for a one-variable
//! property psi, a position (one of sixteen relative locations in a tree)
//! and a threshold c, `build_psi` produces a counting-free formula with one
//! free variable that holds at v exactly when at least c nodes standing in
//! that position to v satisfy psi. `translate` then rewrites arbitrary
//! counting formulas, innermost first, into plain two-variable form.

use std::collections::HashMap;

use thiserror::Error;

use crate::formula::{CountOp, Formula, Nav, OrderFormula, Var};
use crate::tree::{Position16, Tree};
use crate::semantics::{model_check, SemanticsError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TranslateError {
    #[error("free binary atoms cannot be translated")]
    CommonAtom,
}

fn nav(n: Nav, a: Var, b: Var) -> Formula {
    Formula::Nav(n, a, b)
}

/// Memoizing builder for the counting formulas of one fixed property psi
/// (free variable x). Results share structure heavily across thresholds.
pub struct PsiBuilder {
    /// The counted property, subject variable x.
    psi_x: Formula,
    /// The same property over y, for use under an existential on y.
    psi_y: Formula,
    memo: HashMap<(Position16, u32), Formula>,
}

impl PsiBuilder {
    pub fn new(psi: &Formula) -> PsiBuilder {
        debug_assert!(!psi.free_vars().contains(&Var::Y));
        debug_assert!(!psi.has_counting());
        PsiBuilder {
            psi_x: psi.clone(),
            psi_y: psi.swap_vars(),
            memo: HashMap::new(),
        }
    }

    /// The formula over y expressing that at least c nodes in the given
    /// position to y satisfy psi.
    fn at_y(&mut self, c: u32, pos: Position16) -> Formula {
        self.build(c, pos).swap_vars()
    }

    /// At least c nodes in the given position to x satisfy psi.
    ///
    /// Each clause fixes an extremal witness (leftmost, topmost or lowest,
    /// depending on the axis) and counts the remaining witnesses from
    /// there, so every recursive reference either lowers the threshold or
    /// moves to a position defined earlier; the recursion is finite.
    pub fn build(&mut self, c: u32, pos: Position16) -> Formula {
        if c == 0 {
            return Formula::True;
        }
        if let Some(hit) = self.memo.get(&(pos, c)) {
            return hit.clone();
        }
        use Position16::*;
        let out = match pos {
            // Either some witness has c-1 more witnesses strictly below it,
            // or the witnesses split between the subtree of a node and the
            // subtrees of its following siblings, both parts nonempty.
            StrictDescendant => {
                let mut branches = vec![Formula::and(
                    self.psi_y.clone(),
                    self.at_y(c - 1, StrictDescendant),
                )];
                for i in 1..c {
                    branches.push(Formula::and(
                        self.at_y(i, DescendantOrSelf),
                        self.at_y(c - i, FollowingSiblingSubtreeIncl),
                    ));
                }
                Formula::exists(
                    Var::Y,
                    Formula::and(nav(Nav::Descendant, Var::X, Var::Y), Formula::or_all(branches)),
                )
            }
            DescendantOrSelf => Formula::or(
                Formula::and(self.psi_x.clone(), self.build(c - 1, StrictDescendant)),
                self.build(c, StrictDescendant),
            ),
            FollowingSiblingSubtreeIncl => self.sibling_subtree_chain(c, false, DescendantOrSelf),
            DescendantOfFollowingSibling => self.sibling_subtree_chain(c, false, StrictDescendant),
            PrecedingSiblingSubtreeIncl => self.sibling_subtree_chain(c, true, DescendantOrSelf),
            DescendantOfPrecedingSibling => self.sibling_subtree_chain(c, true, StrictDescendant),
            // The leftmost witness child has the other witnesses among its
            // following siblings.
            Child => Formula::exists(
                Var::Y,
                Formula::and_all([
                    nav(Nav::Child, Var::X, Var::Y),
                    self.psi_y.clone(),
                    self.at_y(c - 1, FollowingSibling),
                ]),
            ),
            // Split by the leftmost child contributing witnesses: its strict
            // descendants against descendants of its following siblings.
            DeepDescendant => {
                let mut branches = Vec::new();
                for i in 1..=c {
                    branches.push(Formula::and(
                        self.at_y(i, StrictDescendant),
                        self.at_y(c - i, DescendantOfFollowingSibling),
                    ));
                }
                Formula::exists(
                    Var::Y,
                    Formula::and(nav(Nav::Child, Var::X, Var::Y), Formula::or_all(branches)),
                )
            }
            // The lowest witness ancestor has the remaining witnesses among
            // its own ancestors.
            Ancestor => Formula::exists(
                Var::Y,
                Formula::and_all([
                    nav(Nav::Descendant, Var::Y, Var::X),
                    self.psi_y.clone(),
                    self.at_y(c - 1, Ancestor),
                ]),
            ),
            DeepAncestor => Formula::exists(
                Var::Y,
                Formula::and_all([
                    nav(Nav::Descendant, Var::Y, Var::X),
                    Formula::not(nav(Nav::Child, Var::Y, Var::X)),
                    self.psi_y.clone(),
                    self.at_y(c - 1, Ancestor),
                ]),
            ),
            FollowingSibling => Formula::exists(
                Var::Y,
                Formula::and_all([
                    nav(Nav::FollowingSibling, Var::X, Var::Y),
                    self.psi_y.clone(),
                    self.at_y(c - 1, FollowingSibling),
                ]),
            ),
            PrecedingSibling => Formula::exists(
                Var::Y,
                Formula::and_all([
                    nav(Nav::FollowingSibling, Var::Y, Var::X),
                    self.psi_y.clone(),
                    self.at_y(c - 1, PrecedingSibling),
                ]),
            ),
            // The leftmost far witness: every following sibling of a far
            // following sibling is itself far.
            FarFollowingSibling => Formula::exists(
                Var::Y,
                Formula::and_all([
                    nav(Nav::FollowingSibling, Var::X, Var::Y),
                    Formula::not(nav(Nav::NextSibling, Var::X, Var::Y)),
                    self.psi_y.clone(),
                    self.at_y(c - 1, FollowingSibling),
                ]),
            ),
            FarPrecedingSibling => Formula::exists(
                Var::Y,
                Formula::and_all([
                    nav(Nav::FollowingSibling, Var::Y, Var::X),
                    Formula::not(nav(Nav::NextSibling, Var::Y, Var::X)),
                    self.psi_y.clone(),
                    self.at_y(c - 1, PrecedingSibling),
                ]),
            ),
            // Both sibling directions, any split.
            SiblingSubtree => {
                let mut branches = Vec::new();
                for i in 0..=c {
                    branches.push(Formula::and(
                        self.build(i, FollowingSiblingSubtreeIncl),
                        self.build(c - i, PrecedingSiblingSubtreeIncl),
                    ));
                }
                Formula::or_all(branches)
            }
            // Split by the lowest ancestor whose sibling subtrees contribute.
            AncestorSiblingSubtree => {
                let mut branches = Vec::new();
                for i in 1..=c {
                    branches.push(Formula::and(
                        self.at_y(i, SiblingSubtree),
                        self.at_y(c - i, AncestorSiblingSubtree),
                    ));
                }
                Formula::exists(
                    Var::Y,
                    Formula::and(nav(Nav::Descendant, Var::Y, Var::X), Formula::or_all(branches)),
                )
            }
        };
        self.memo.insert((pos, c), out.clone());
        out
    }

    /// Shared shape of the four sibling-chain clauses: walk to the nearest
    /// sibling (in the given direction) whose subtree contributes, split the
    /// count between that subtree and the rest of the chain. `inner` is
    /// what "contributes from the subtree" means: the sibling included or
    /// only its strict descendants.
    fn sibling_subtree_chain(&mut self, c: u32, preceding: bool, inner: Position16) -> Formula {
        let chain = if inner == Position16::DescendantOrSelf {
            if preceding {
                Position16::PrecedingSiblingSubtreeIncl
            } else {
                Position16::FollowingSiblingSubtreeIncl
            }
        } else if preceding {
            Position16::DescendantOfPrecedingSibling
        } else {
            Position16::DescendantOfFollowingSibling
        };
        let step = if preceding {
            nav(Nav::FollowingSibling, Var::Y, Var::X)
        } else {
            nav(Nav::FollowingSibling, Var::X, Var::Y)
        };
        let mut branches = Vec::new();
        for i in 1..=c {
            branches.push(Formula::and(self.at_y(i, inner), self.at_y(c - i, chain)));
        }
        Formula::exists(Var::Y, Formula::and(step, Formula::or_all(branches)))
    }
}

/// One-shot convenience wrapper around `PsiBuilder`.
pub fn build_psi(c: u32, pos: Position16, psi: &Formula) -> Formula {
    PsiBuilder::new(psi).build(c, pos)
}

/// Semantic oracle: the exact number of nodes standing in the given
/// position to v that satisfy psi (free variable x).
pub fn count_in_position(
    t: &Tree,
    pos: Position16,
    v: usize,
    psi: &Formula,
) -> Result<usize, SemanticsError> {
    let mut n = 0;
    for w in t.nodes() {
        if t.in_position(pos, v, w) && model_check(t, psi, Some(w), None)? {
            n += 1;
        }
    }
    Ok(n)
}

/// A maximal atom or quantified subformula: the boolean skeleton above
/// these units is what the mutually exclusive case split enumerates.
fn collect_units(f: &Formula, out: &mut Vec<Formula>) {
    match f {
        Formula::True | Formula::False => {}
        Formula::Unary(..) | Formula::Nav(..) | Formula::Equal(..)
        | Formula::Exists(..) | Formula::Forall(..) => {
            if !out.contains(f) {
                out.push(f.clone());
            }
        }
        Formula::Not(a) => collect_units(a, out),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            collect_units(a, out);
            collect_units(b, out);
        }
        Formula::Common(..) => unreachable!("rejected before unit collection"),
        Formula::Count(..) => unreachable!("inner counting eliminated first"),
    }
}

/// Truth value of the boolean skeleton under a fixed assignment to units.
fn eval_skeleton(f: &Formula, units: &[Formula], mask: u64) -> bool {
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Unary(..) | Formula::Nav(..) | Formula::Equal(..)
        | Formula::Exists(..) | Formula::Forall(..) => {
            let i = units.iter().position(|u| u == f).unwrap();
            mask & (1 << i) != 0
        }
        Formula::Not(a) => !eval_skeleton(a, units, mask),
        Formula::And(a, b) => eval_skeleton(a, units, mask) && eval_skeleton(b, units, mask),
        Formula::Or(a, b) => eval_skeleton(a, units, mask) || eval_skeleton(b, units, mask),
        Formula::Implies(a, b) => !eval_skeleton(a, units, mask) || eval_skeleton(b, units, mask),
        Formula::Common(..) | Formula::Count(..) => unreachable!(),
    }
}

/// Resolve navigational and equality atoms between x and y under a fixed
/// order relation; quantified subformulas are opaque (their atoms talk
/// about rebound variables).
fn simplify_under(f: &Formula, theta: OrderFormula) -> Formula {
    match f {
        Formula::True | Formula::False | Formula::Unary(..)
        | Formula::Exists(..) | Formula::Forall(..) => f.clone(),
        Formula::Nav(n, a, b) => {
            if a == b || theta == OrderFormula::Equal {
                Formula::False
            } else if theta.nav_truth(*n, *a == Var::Y) {
                Formula::True
            } else {
                Formula::False
            }
        }
        Formula::Equal(a, b) => {
            if a == b || theta == OrderFormula::Equal {
                Formula::True
            } else {
                Formula::False
            }
        }
        Formula::Not(a) => Formula::not(simplify_under(a, theta)),
        Formula::And(a, b) => {
            Formula::and(simplify_under(a, theta), simplify_under(b, theta))
        }
        Formula::Or(a, b) => {
            Formula::or(simplify_under(a, theta), simplify_under(b, theta))
        }
        Formula::Implies(a, b) => {
            Formula::implies(simplify_under(a, theta), simplify_under(b, theta))
        }
        Formula::Common(..) | Formula::Count(..) => unreachable!(),
    }
}

/// Split a conjunction of one-variable literals into its x part and its y
/// part. Returns None if the conjunction is contradictory.
fn split_parts(lits: &[Formula]) -> Option<(Formula, Formula)> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for l in lits {
        if *l == Formula::False {
            return None;
        }
        if *l == Formula::True {
            continue;
        }
        let fv = l.free_vars();
        debug_assert!(fv.len() <= 1, "literal must be one-variable: {l}");
        if fv.contains(&Var::Y) {
            ys.push(l.clone());
        } else {
            xs.push(l.clone());
        }
    }
    Some((Formula::and_all(xs), Formula::and_all(ys)))
}

/// All ways to write `total` as an ordered sum of `parts` numbers, each at
/// most its cap.
fn compositions(total: u32, caps: &[u32]) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(total: u32, caps: &[u32], cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if caps.is_empty() {
            if total == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let top = caps[0].min(total);
        for v in 0..=top {
            cur.push(v);
            go(total - v, &caps[1..], cur, out);
            cur.pop();
        }
    }
    go(total, caps, &mut cur, &mut out);
    out
}

/// At least c witnesses for the pair formula `theta and psi_y(y)`, with the
/// subject at x. psi_y has free variable at most y.
fn at_least_in_theta(c: u32, theta: OrderFormula, psi_y: &Formula) -> Formula {
    use OrderFormula::*;
    if c == 0 {
        return Formula::True;
    }
    if *psi_y == Formula::False {
        return Formula::False;
    }
    let psi_x = psi_y.swap_vars();
    match theta {
        Equal | Up | Right | Left => {
            debug_assert!(c == 1);
            Formula::exists(
                Var::Y,
                Formula::and(theta.defining_formula(), psi_y.clone()),
            )
        }
        Down => build_psi(c, Position16::Child, &psi_x),
        DeepDown => build_psi(c, Position16::DeepDescendant, &psi_x),
        DeepUp => build_psi(c, Position16::DeepAncestor, &psi_x),
        FarRight => build_psi(c, Position16::FarFollowingSibling, &psi_x),
        FarLeft => build_psi(c, Position16::FarPrecedingSibling, &psi_x),
        Free => {
            // Unrelated nodes sit in sibling subtrees of strict ancestors,
            // or below following siblings, or below preceding siblings.
            let mut b = PsiBuilder::new(&psi_x);
            let mut branches = Vec::new();
            for s in 0..=c {
                for u in 0..=(c - s) {
                    branches.push(Formula::and_all([
                        b.build(s, Position16::AncestorSiblingSubtree),
                        b.build(u, Position16::DescendantOfFollowingSibling),
                        b.build(c - s - u, Position16::DescendantOfPrecedingSibling),
                    ]));
                }
            }
            Formula::or_all(branches)
        }
    }
}

/// Rewrite "at least k witnesses y for body(x, y)" (body counting-free)
/// into plain two-variable form.
fn eliminate(k: u32, body: &Formula) -> Formula {
    if k == 0 {
        return Formula::True;
    }
    if !body.free_vars().contains(&Var::X) {
        // The count does not depend on the subject: anchor it at the root,
        // whose inclusive subtree is the whole tree.
        let psi_x = body.swap_vars();
        let is_root = Formula::not(Formula::exists(
            Var::Y,
            nav(Nav::Child, Var::Y, Var::X),
        ));
        return Formula::exists(
            Var::X,
            Formula::and(is_root, build_psi(k, Position16::DescendantOrSelf, &psi_x)),
        );
    }
    let mut units = Vec::new();
    collect_units(body, &mut units);
    assert!(units.len() <= 20, "case split limit exceeded: {} units", units.len());
    // Mutually exclusive case split over complete polarity patterns of the
    // units; only patterns satisfying the body count.
    let mut cases: Vec<Vec<Formula>> = Vec::new();
    for mask in 0..(1u64 << units.len()) {
        if !eval_skeleton(body, &units, mask) {
            continue;
        }
        let lits = units
            .iter()
            .enumerate()
            .map(|(i, u)| {
                if mask & (1 << i) != 0 {
                    u.clone()
                } else {
                    Formula::not(u.clone())
                }
            })
            .collect();
        cases.push(lits);
    }
    // Distribute the k witnesses over the cases (they are disjoint), then
    // within each case over the ten order relations.
    let case_caps = vec![k; cases.len()];
    let mut distributions = Vec::new();
    for f in compositions(k, &case_caps) {
        let mut conj = Vec::new();
        let mut dead = false;
        for (i, lits) in cases.iter().enumerate() {
            if f[i] == 0 {
                continue;
            }
            match at_least_case(f[i], lits) {
                Some(g) => conj.push(g),
                None => {
                    dead = true;
                    break;
                }
            }
        }
        if !dead {
            distributions.push(Formula::and_all(conj));
        }
    }
    Formula::or_all(distributions)
}

/// At least c witnesses for one conjunctive case, split over the ten order
/// relations. None when the case is contradictory in every relation.
fn at_least_case(c: u32, lits: &[Formula]) -> Option<Formula> {
    let theta_caps: Vec<u32> = OrderFormula::ALL
        .iter()
        .map(|o| if o.is_singleton_position() { 1 } else { c })
        .collect();
    let mut branches = Vec::new();
    for g in compositions(c, &theta_caps) {
        let mut conj = Vec::new();
        let mut dead = false;
        for (j, theta) in OrderFormula::ALL.into_iter().enumerate() {
            if g[j] == 0 {
                continue;
            }
            let simplified: Vec<Formula> =
                lits.iter().map(|l| simplify_under(l, theta)).collect();
            let Some((px, py)) = split_parts(&simplified) else {
                dead = true;
                break;
            };
            let counted = at_least_in_theta(g[j], theta, &py);
            if counted == Formula::False {
                dead = true;
                break;
            }
            conj.push(Formula::and(px, counted));
        }
        if !dead {
            branches.push(Formula::and_all(conj));
        }
    }
    if branches.is_empty() {
        None
    } else {
        Some(Formula::or_all(branches))
    }
}

/// Rewrite all counting quantifiers in f (at most one free variable is not
/// required; the rewriting is pointwise) into plain two-variable form.
/// Counting-free input is returned unchanged.
pub fn translate(f: &Formula) -> Result<Formula, TranslateError> {
    if f.has_common_binary() {
        return Err(TranslateError::CommonAtom);
    }
    if !f.has_counting() {
        return Ok(f.clone());
    }
    Ok(go(f))
}

fn go(f: &Formula) -> Formula {
    match f {
        Formula::True | Formula::False | Formula::Unary(..) | Formula::Nav(..)
        | Formula::Equal(..) => f.clone(),
        Formula::Common(..) => unreachable!("rejected at entry"),
        Formula::Not(a) => Formula::not(go(a)),
        Formula::And(a, b) => Formula::and(go(a), go(b)),
        Formula::Or(a, b) => Formula::or(go(a), go(b)),
        Formula::Implies(a, b) => Formula::implies(go(a), go(b)),
        Formula::Exists(v, a) => Formula::exists(*v, go(a)),
        Formula::Forall(v, a) => Formula::forall(*v, go(a)),
        Formula::Count(op, n, v, a) => {
            let body = go(a);
            // Orient the count on y; the subject, if any, is x.
            let oriented = match v {
                Var::Y => body,
                Var::X => body.swap_vars(),
            };
            let result = match op {
                CountOp::Geq => eliminate(*n, &oriented),
                CountOp::Leq => Formula::not(eliminate(*n + 1, &oriented)),
                CountOp::Eq => Formula::and(
                    eliminate(*n, &oriented),
                    Formula::not(eliminate(*n + 1, &oriented)),
                ),
            };
            match v {
                Var::Y => result,
                Var::X => result.swap_vars(),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse, Signature};
    use crate::semantics::model_check_sentence;
    use crate::tree::Tree;

    fn sig1() -> Signature {
        Signature::new(["A"], Vec::<String>::new()).unwrap()
    }

    /// All tree shapes with up to n nodes, as parent vectors in preorder.
    fn shapes_up_to(n: usize) -> Vec<Vec<Option<usize>>> {
        let mut all: Vec<Vec<Option<usize>>> = vec![vec![None]];
        let mut frontier: Vec<Vec<Option<usize>>> = vec![vec![None]];
        for _ in 1..n {
            let mut next = Vec::new();
            for shape in &frontier {
                // Extend by one node in preorder: its parent is any node on
                // the rightmost path of the current shape.
                let mut rightmost = Vec::new();
                let mut cur = Some(shape.len() - 1);
                while let Some(v) = cur {
                    rightmost.push(v);
                    cur = shape[v];
                }
                for p in rightmost {
                    let mut s = shape.clone();
                    s.push(Some(p));
                    next.push(s);
                }
            }
            all.extend(next.iter().cloned());
            frontier = next;
        }
        all
    }

    fn labeled_trees(n: usize) -> Vec<Tree> {
        let mut out = Vec::new();
        for shape in shapes_up_to(n) {
            let base = Tree::new(shape).unwrap();
            for mask in 0..(1u32 << base.len()) {
                let mut t = base.clone();
                for v in t.nodes() {
                    if mask & (1 << v) != 0 {
                        t.add_label(v, "A");
                    }
                }
                out.push(t);
            }
        }
        out
    }

    #[test]
    fn shapes_follow_catalan_counts() {
        // 1, 2, 5, 14 shapes of sizes 1..=4.
        assert_eq!(shapes_up_to(4).len(), 1 + 1 + 2 + 5);
    }

    #[test]
    fn zero_threshold_is_trivially_true() {
        let psi = parse("(A x)", &sig1()).unwrap();
        for pos in Position16::ALL {
            assert_eq!(build_psi(0, pos, &psi), Formula::True);
        }
    }

    #[test]
    fn counting_formulas_match_the_oracle() {
        let psi_true = Formula::True;
        let psi_a = parse("(A x)", &sig1()).unwrap();
        for t in labeled_trees(4) {
            for psi in [&psi_true, &psi_a] {
                let mut b = PsiBuilder::new(psi);
                for pos in Position16::ALL {
                    for c in 0..=3u32 {
                        let f = b.build(c, pos);
                        for v in t.nodes() {
                            let truth =
                                model_check(&t, &f, Some(v), None).unwrap();
                            let count =
                                count_in_position(&t, pos, v, psi).unwrap();
                            assert_eq!(
                                truth,
                                count >= c as usize,
                                "pos {pos:?} c {c} node {v} tree {}",
                                t.save()
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn unrelated_position_decomposes_over_three_regions() {
        use Position16::*;
        let psi = parse("(A x)", &sig1()).unwrap();
        for t in labeled_trees(4) {
            for v in t.nodes() {
                let free: usize = t
                    .nodes()
                    .filter(|w| {
                        t.order_of(v, *w) == OrderFormula::Free
                            && t.labels(*w).contains("A")
                    })
                    .count();
                let parts = count_in_position(&t, AncestorSiblingSubtree, v, &psi)
                    .unwrap()
                    + count_in_position(&t, DescendantOfFollowingSibling, v, &psi)
                        .unwrap()
                    + count_in_position(&t, DescendantOfPrecedingSibling, v, &psi)
                        .unwrap();
                assert_eq!(free, parts);
            }
        }
    }

    #[test]
    fn counting_free_input_is_unchanged() {
        let sig = sig1();
        let f = parse("(forall x (exists y (and (child x y) (A y))))", &sig).unwrap();
        assert_eq!(translate(&f).unwrap(), f);
    }

    #[test]
    fn rejects_free_binary_atoms() {
        let sig = Signature::new(["A"], ["R"]).unwrap();
        let f = parse("(count>= 2 y (R x y))", &sig).unwrap();
        assert_eq!(translate(&f), Err(TranslateError::CommonAtom));
    }

    fn assert_pointwise_equivalent(f: &Formula, trees: &[Tree]) {
        let g = translate(f).unwrap();
        assert!(!g.has_counting());
        let free = f.free_vars();
        assert_eq!(g.free_vars(), free);
        for t in trees {
            if free.is_empty() {
                assert_eq!(
                    model_check_sentence(t, f).unwrap(),
                    model_check_sentence(t, &g).unwrap(),
                    "{f} on {}",
                    t.save()
                );
            } else {
                for v in t.nodes() {
                    let (x, y) = if free.contains(&Var::X) {
                        (Some(v), None)
                    } else {
                        (None, Some(v))
                    };
                    assert_eq!(
                        model_check(t, f, x, y).unwrap(),
                        model_check(t, &g, x, y).unwrap(),
                        "{f} at {v} on {}",
                        t.save()
                    );
                }
            }
        }
    }

    #[test]
    fn open_counting_over_descendants() {
        let sig = sig1();
        let trees = labeled_trees(4);
        let f = parse("(count>= 3 y (descendant x y))", &sig).unwrap();
        assert_pointwise_equivalent(&f, &trees);
        let f = parse("(count<= 1 y (and (descendant x y) (A y)))", &sig).unwrap();
        assert_pointwise_equivalent(&f, &trees);
    }

    #[test]
    fn unrelated_witnesses_use_the_three_region_split() {
        let sig = sig1();
        let trees = labeled_trees(4);
        let f = parse(
            "(count>= 2 y (and (A y) (and (not (descendant x y)) (and (not (descendant y x)) (and (not (following x y)) (and (not (following y x)) (not (= x y))))))))",
            &sig,
        )
        .unwrap();
        assert_pointwise_equivalent(&f, &trees);
    }

    #[test]
    fn closed_and_nested_counting() {
        let sig = sig1();
        let trees = labeled_trees(4);
        let f = parse("(exists x (count>= 3 y (descendant x y)))", &sig).unwrap();
        assert_pointwise_equivalent(&f, &trees);
        // Counting whose subject is bound inside another count.
        let f = parse("(count>= 1 y (and (child x y) (count>= 2 x (child y x))))", &sig)
            .unwrap();
        assert_pointwise_equivalent(&f, &trees);
        // A closed count nested under quantifiers.
        let f = parse("(forall x (or (A x) (count>= 4 y (= y y))))", &sig).unwrap();
        assert_pointwise_equivalent(&f, &trees);
        let f = parse("(count= 2 y (A y))", &sig).unwrap();
        assert_pointwise_equivalent(&f, &trees);
    }

    #[test]
    fn mixed_positions_and_guards() {
        let sig = sig1();
        let trees = labeled_trees(4);
        let f = parse("(count>= 2 y (or (child x y) (next x y)))", &sig).unwrap();
        assert_pointwise_equivalent(&f, &trees);
        let f = parse(
            "(count>= 2 y (and (A x) (or (descendant y x) (following y x))))",
            &sig,
        )
        .unwrap();
        assert_pointwise_equivalent(&f, &trees);
    }
}
