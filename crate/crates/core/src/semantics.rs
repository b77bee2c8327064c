//! Evaluation of formulas on explicit trees, per-node full types, witness
//! counting, and the local consistency criterion that characterizes
//! satisfaction of counting normal forms type by type.

use std::collections::HashMap;
use std::rc::Rc;

use thiserror::Error;

use crate::formula::{CountOp, Formula, OrderFormula, Signature, Var};
use crate::normalize::{CountCmp, NormalFormC2};
use crate::tree::{Tree, TreeError};
use crate::types::{cut, eval_qf, AtomEnv, Count, KMultiset, OneType};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SemanticsError {
    #[error("free variable {0} is not bound")]
    Unbound(&'static str),
    #[error("node {0} out of range")]
    NodeOutOfRange(usize),
    #[error("full types are only defined over purely unary signatures")]
    BinaryInSignature,
    #[error("cutoff mismatch: {0} vs {1}")]
    CutoffMismatch(u32, u32),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

struct Evaluator<'t> {
    t: &'t Tree,
    /// Keyed on subformula identity (shared subterms are evaluated once per
    /// assignment) plus the assignment.
    cache: HashMap<(usize, Option<usize>, Option<usize>), bool>,
}

impl<'t> Evaluator<'t> {
    fn node(
        &self,
        v: Var,
        x: Option<usize>,
        y: Option<usize>,
    ) -> Result<usize, SemanticsError> {
        match v {
            Var::X => x.ok_or(SemanticsError::Unbound("x")),
            Var::Y => y.ok_or(SemanticsError::Unbound("y")),
        }
    }

    fn eval_rc(
        &mut self,
        f: &Rc<Formula>,
        x: Option<usize>,
        y: Option<usize>,
    ) -> Result<bool, SemanticsError> {
        let key = (Rc::as_ptr(f) as usize, x, y);
        if let Some(hit) = self.cache.get(&key) {
            return Ok(*hit);
        }
        let out = self.eval(f, x, y)?;
        self.cache.insert(key, out);
        Ok(out)
    }

    fn eval(
        &mut self,
        f: &Formula,
        x: Option<usize>,
        y: Option<usize>,
    ) -> Result<bool, SemanticsError> {
        match f {
            Formula::True => Ok(true),
            Formula::False => Ok(false),
            Formula::Unary(name, v) => {
                let n = self.node(*v, x, y)?;
                Ok(self.t.labels(n).contains(name))
            }
            Formula::Common(name, a, b) => {
                let na = self.node(*a, x, y)?;
                let nb = self.node(*b, x, y)?;
                Ok(self.t.edge_holds(name, na, nb))
            }
            Formula::Nav(nav, a, b) => {
                let na = self.node(*a, x, y)?;
                let nb = self.node(*b, x, y)?;
                let order = self.t.order_of(na, nb);
                Ok(order != OrderFormula::Equal && order.nav_truth(*nav, false))
            }
            Formula::Equal(a, b) => {
                Ok(self.node(*a, x, y)? == self.node(*b, x, y)?)
            }
            Formula::Not(a) => Ok(!self.eval_rc(a, x, y)?),
            Formula::And(a, b) => {
                Ok(self.eval_rc(a, x, y)? && self.eval_rc(b, x, y)?)
            }
            Formula::Or(a, b) => {
                Ok(self.eval_rc(a, x, y)? || self.eval_rc(b, x, y)?)
            }
            Formula::Implies(a, b) => {
                Ok(!self.eval_rc(a, x, y)? || self.eval_rc(b, x, y)?)
            }
            Formula::Exists(v, body) => {
                for w in self.t.nodes() {
                    let (nx, ny) = bind(*v, w, x, y);
                    if self.eval_rc(body, nx, ny)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Formula::Forall(v, body) => {
                for w in self.t.nodes() {
                    let (nx, ny) = bind(*v, w, x, y);
                    if !self.eval_rc(body, nx, ny)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Formula::Count(op, n, v, body) => {
                let mut count: u32 = 0;
                for w in self.t.nodes() {
                    let (nx, ny) = bind(*v, w, x, y);
                    if self.eval_rc(body, nx, ny)? {
                        count += 1;
                        match op {
                            CountOp::Geq if count >= *n => return Ok(true),
                            CountOp::Leq if count > *n => return Ok(false),
                            _ => {}
                        }
                    }
                }
                Ok(match op {
                    CountOp::Geq => count >= *n,
                    CountOp::Leq => count <= *n,
                    CountOp::Eq => count == *n,
                })
            }
        }
    }
}

fn bind(
    v: Var,
    w: usize,
    x: Option<usize>,
    y: Option<usize>,
) -> (Option<usize>, Option<usize>) {
    match v {
        Var::X => (Some(w), y),
        Var::Y => (x, Some(w)),
    }
}

/// Evaluate a formula on a tree under a partial assignment of x and y.
/// Counting quantifiers are evaluated by direct enumeration of nodes.
pub fn model_check(
    t: &Tree,
    f: &Formula,
    x: Option<usize>,
    y: Option<usize>,
) -> Result<bool, SemanticsError> {
    for n in [x, y].into_iter().flatten() {
        if n >= t.len() {
            return Err(SemanticsError::NodeOutOfRange(n));
        }
    }
    let mut ev = Evaluator { t, cache: HashMap::new() };
    ev.eval(f, x, y)
}

/// Convenience wrapper for sentences.
pub fn model_check_sentence(t: &Tree, f: &Formula) -> Result<bool, SemanticsError> {
    model_check(t, f, None, None)
}

/// Per-node record mapping each of the ten order relations to the saturated
/// multiset of 1-types realized in that relative position.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FullType {
    k: u32,
    per: [KMultiset; 10],
}

impl FullType {
    pub fn new(k: u32, per: [KMultiset; 10]) -> Result<FullType, SemanticsError> {
        for m in &per {
            if m.threshold() != k {
                return Err(SemanticsError::CutoffMismatch(m.threshold(), k));
            }
        }
        Ok(FullType { k, per })
    }

    /// The full type of an isolated node: the node sees only itself.
    pub fn lone(k: u32, alpha: OneType) -> FullType {
        let mut per: [KMultiset; 10] =
            std::array::from_fn(|_| KMultiset::empty(k));
        per[OrderFormula::Equal.index()] = KMultiset::singleton(k, alpha);
        FullType { k, per }
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn get(&self, o: OrderFormula) -> &KMultiset {
        &self.per[o.index()]
    }

    pub fn set(&mut self, o: OrderFormula, m: KMultiset) {
        assert_eq!(m.threshold(), self.k, "threshold mismatch");
        self.per[o.index()] = m;
    }

    /// The node's own 1-type.
    pub fn alpha(&self) -> &OneType {
        self.get(OrderFormula::Equal)
            .sole_member()
            .expect("self position must hold exactly the node's own 1-type")
    }

    /// Structural sanity: the self position is a singleton, positions that
    /// can hold at most one node (parent, adjacent siblings) are empty or
    /// singleton, and an empty near position forces the matching far
    /// position empty.
    pub fn invariants_ok(&self) -> bool {
        use OrderFormula::*;
        if !self.get(Equal).is_singleton() {
            return false;
        }
        for o in [Up, Right, Left] {
            let m = self.get(o);
            if !(m.is_empty() || m.is_singleton()) {
                return false;
            }
        }
        for (near, far) in [(Up, DeepUp), (Down, DeepDown), (Right, FarRight), (Left, FarLeft)] {
            if self.get(near).is_empty() && !self.get(far).is_empty() {
                return false;
            }
        }
        true
    }
}

/// The full type realized by node v: for each order relation, the saturated
/// count of nodes standing in that relation to v, by 1-type. Only purely
/// unary signatures admit full types.
pub fn full_type(
    t: &Tree,
    sig: &Signature,
    k: u32,
    v: usize,
) -> Result<FullType, SemanticsError> {
    if !sig.binary.is_empty() {
        return Err(SemanticsError::BinaryInSignature);
    }
    if v >= t.len() {
        return Err(SemanticsError::NodeOutOfRange(v));
    }
    let mut per: [KMultiset; 10] = std::array::from_fn(|_| KMultiset::empty(k));
    for w in t.nodes() {
        let o = t.order_of(v, w);
        per[o.index()].add(t.one_type_of(sig, w)?, Count::Fin(1));
    }
    Ok(FullType { k, per })
}

/// All distinct full types realized in a tree.
pub fn realized_full_types(
    t: &Tree,
    sig: &Signature,
    k: u32,
) -> Result<Vec<FullType>, SemanticsError> {
    let mut out: Vec<FullType> = Vec::new();
    for v in t.nodes() {
        let ft = full_type(t, sig, k, v)?;
        if !out.contains(&ft) {
            out.push(ft);
        }
    }
    Ok(out)
}

/// Witness counts per threshold conjunct and order relation, saturated at
/// the formula's counting threshold.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WitnessCountTable {
    rows: Vec<[Count; 10]>,
}

impl WitnessCountTable {
    pub fn get(&self, i: usize, theta: OrderFormula) -> Count {
        self.rows[i][theta.index()]
    }

    /// Total witness count of conjunct i over all positions (unsaturated
    /// sum of saturated entries).
    pub fn row_total(&self, i: usize) -> Count {
        let mut s = Count::ZERO;
        for c in self.rows[i] {
            s = s.add(c);
        }
        s
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

fn entails(
    sig: &Signature,
    alpha: &OneType,
    alpha2: &OneType,
    theta: OrderFormula,
    chi: &Formula,
) -> bool {
    if theta == OrderFormula::Equal {
        eval_qf(chi, sig, &AtomEnv::diagonal(alpha))
    } else {
        eval_qf(chi, sig, &AtomEnv::pair(alpha, alpha2, theta))
    }
}

/// Positions that can be occupied by at most one node relative to a fixed
/// node and therefore contribute a 0/1 witness count; the remaining
/// positions contribute a saturated sum over the multiset.
fn single_occupancy(theta: OrderFormula) -> bool {
    use OrderFormula::*;
    matches!(theta, Equal | Up | Right | Left)
}

/// For each conjunct of the normal form and each order relation, how many
/// nodes recorded in the full type satisfy the conjunct's constraint
/// towards a node of this type.
pub fn witness_counts(
    phi: &NormalFormC2,
    a: &FullType,
) -> Result<WitnessCountTable, SemanticsError> {
    if a.k() != phi.c() {
        return Err(SemanticsError::CutoffMismatch(a.k(), phi.c()));
    }
    let sig = &phi.sig;
    let alpha = a.alpha();
    let mut rows = Vec::with_capacity(phi.m());
    for conj in &phi.conjuncts {
        let mut row = [Count::ZERO; 10];
        for theta in OrderFormula::ALL {
            let m = a.get(theta);
            row[theta.index()] = if single_occupancy(theta) {
                match m.sole_member() {
                    Some(a2) if m.is_singleton() && entails(sig, alpha, a2, theta, &conj.chi) => {
                        Count::Fin(1)
                    }
                    _ => Count::ZERO,
                }
            } else {
                let mut s = Count::ZERO;
                for (a2, c) in m.iter() {
                    if entails(sig, alpha, a2, theta, &conj.chi) {
                        s = s.add(c);
                    }
                }
                cut(a.k(), s)
            };
        }
        rows.push(row);
    }
    Ok(WitnessCountTable { rows })
}

/// The three-part local criterion: the node's own type satisfies the
/// universal core on the diagonal, every recorded pair satisfies it, and
/// every threshold conjunct's witness total meets its bound.
pub fn is_phi_consistent(
    phi: &NormalFormC2,
    a: &FullType,
) -> Result<bool, SemanticsError> {
    let sig = &phi.sig;
    let alpha = a.alpha();
    if !eval_qf(&phi.chi, sig, &AtomEnv::diagonal(alpha)) {
        return Ok(false);
    }
    for theta in OrderFormula::ALL {
        for (a2, _) in a.get(theta).iter() {
            if !entails(sig, alpha, a2, theta, &phi.chi) {
                return Ok(false);
            }
        }
    }
    let wct = witness_counts(phi, a)?;
    for (i, conj) in phi.conjuncts.iter().enumerate() {
        let total = wct.row_total(i);
        let ok = match conj.op {
            CountCmp::Geq => total.geq(conj.bound),
            CountCmp::Leq => total.leq(conj.bound),
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Type-based satisfaction: a tree satisfies the normal form exactly when
/// every realized full type (at the formula's threshold) is consistent.
pub fn check_via_types(t: &Tree, phi: &NormalFormC2) -> Result<bool, SemanticsError> {
    for v in t.nodes() {
        let a = full_type(t, &phi.sig, phi.c(), v)?;
        if !is_phi_consistent(phi, &a)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Compression of a full type: own 1-type, witness table, and the merged
/// above / below / sideways multisets. Two nodes with equal reduced types
/// are interchangeable for the path-shortening surgery.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ReducedType {
    pub alpha: OneType,
    pub wct: WitnessCountTable,
    /// Up and DeepUp merged.
    pub above: KMultiset,
    /// Down and DeepDown merged.
    pub below: KMultiset,
    /// All four sibling positions and Free merged.
    pub side: KMultiset,
}

pub fn reduce(phi: &NormalFormC2, a: &FullType) -> Result<ReducedType, SemanticsError> {
    use OrderFormula::*;
    let join = |os: &[OrderFormula]| -> KMultiset {
        let mut m = KMultiset::empty(a.k());
        for o in os {
            m = m.union(a.get(*o)).expect("equal thresholds");
        }
        m
    };
    Ok(ReducedType {
        alpha: a.alpha().clone(),
        wct: witness_counts(phi, a)?,
        above: join(&[Up, DeepUp]),
        below: join(&[Down, DeepDown]),
        side: join(&[Right, FarRight, Left, FarLeft, Free]),
    })
}

/// The sibling-axis projection of a full type.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HorizontalType {
    pub equal: KMultiset,
    pub right: KMultiset,
    pub far_right: KMultiset,
    pub left: KMultiset,
    pub far_left: KMultiset,
}

pub fn horizontal(a: &FullType) -> HorizontalType {
    use OrderFormula::*;
    HorizontalType {
        equal: a.get(Equal).clone(),
        right: a.get(Right).clone(),
        far_right: a.get(FarRight).clone(),
        left: a.get(Left).clone(),
        far_left: a.get(FarLeft).clone(),
    }
}

/// The combined type used by the path-shortening argument: everything seen
/// upwards or sideways comes from the first type, the node itself and
/// everything below from the second.
pub fn combine(a: &FullType, b: &FullType) -> Result<FullType, SemanticsError> {
    use OrderFormula::*;
    if a.k() != b.k() {
        return Err(SemanticsError::CutoffMismatch(a.k(), b.k()));
    }
    let mut per: [KMultiset; 10] =
        std::array::from_fn(|_| KMultiset::empty(a.k()));
    for o in [Up, DeepUp, Right, FarRight, Left, FarLeft, Free] {
        per[o.index()] = a.get(o).clone();
    }
    for o in [Equal, Down, DeepDown] {
        per[o.index()] = b.get(o).clone();
    }
    Ok(FullType { k: a.k(), per })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;
    use crate::normalize::{C2Conjunct, CountCmp};

    /// Deliberately independent reference evaluator: no cache, no early
    /// exit, environments as concrete node lists.
    fn naive(t: &Tree, f: &Formula, x: Option<usize>, y: Option<usize>) -> bool {
        let get = |v: Var| match v {
            Var::X => x.expect("x bound"),
            Var::Y => y.expect("y bound"),
        };
        match f {
            Formula::True => true,
            Formula::False => false,
            Formula::Unary(name, v) => t.labels(get(*v)).contains(name),
            Formula::Common(name, a, b) => t.edge_holds(name, get(*a), get(*b)),
            Formula::Nav(nav, a, b) => {
                let o = t.order_of(get(*a), get(*b));
                o != OrderFormula::Equal && o.nav_truth(*nav, false)
            }
            Formula::Equal(a, b) => get(*a) == get(*b),
            Formula::Not(a) => !naive(t, a, x, y),
            Formula::And(a, b) => naive(t, a, x, y) && naive(t, b, x, y),
            Formula::Or(a, b) => naive(t, a, x, y) || naive(t, b, x, y),
            Formula::Implies(a, b) => !naive(t, a, x, y) || naive(t, b, x, y),
            Formula::Exists(v, body) => t
                .nodes()
                .any(|w| {
                    let (nx, ny) = bind(*v, w, x, y);
                    naive(t, body, nx, ny)
                }),
            Formula::Forall(v, body) => t
                .nodes()
                .all(|w| {
                    let (nx, ny) = bind(*v, w, x, y);
                    naive(t, body, nx, ny)
                }),
            Formula::Count(op, n, v, body) => {
                let c = t
                    .nodes()
                    .filter(|w| {
                        let (nx, ny) = bind(*v, *w, x, y);
                        naive(t, body, nx, ny)
                    })
                    .count() as u32;
                match op {
                    CountOp::Geq => c >= *n,
                    CountOp::Leq => c <= *n,
                    CountOp::Eq => c == *n,
                }
            }
        }
    }

    fn star(children: usize) -> Tree {
        let mut parents = vec![None];
        parents.extend(std::iter::repeat(Some(0)).take(children));
        Tree::new(parents).unwrap()
    }

    /// Five nodes: a root with three children; the middle child has one
    /// child of its own. The root and the middle child are green; the other
    /// three nodes are green and black.
    fn example_tree() -> Tree {
        let mut t = Tree::new(vec![None, Some(0), Some(0), Some(2), Some(0)]).unwrap();
        for v in 0..5 {
            t.add_label(v, "green");
        }
        for v in [1, 3, 4] {
            t.add_label(v, "black");
        }
        t
    }

    fn example_phi() -> NormalFormC2 {
        let sig = Signature::new(["green", "black"], Vec::<String>::new()).unwrap();
        let chi = parse(
            "(implies (green x) (and (black y) (or (or (child x y) (child y x)) (or (next x y) (next y x)))))",
            &sig,
        )
        .unwrap();
        NormalFormC2::new(
            sig,
            Formula::True,
            vec![C2Conjunct { op: CountCmp::Leq, bound: 3, chi }],
        )
        .unwrap()
    }

    #[test]
    fn agrees_with_naive_evaluator() {
        let sig = Signature::new(["A"], ["R"]).unwrap();
        let mut t = Tree::new(vec![None, Some(0), Some(1), Some(0)]).unwrap();
        t.add_label(1, "A");
        t.add_label(3, "A");
        t.add_edge("R", 0, 2);
        t.add_edge("R", 2, 2);
        let formulas = [
            "(forall x (exists y (or (child x y) (child y x))))",
            "(exists x (and (A x) (forall y (implies (descendant x y) (A y)))))",
            "(count>= 2 x (A x))",
            "(count<= 1 x (and (A x) (exists y (R y x))))",
            "(forall x (count<= 2 y (descendant x y)))",
            "(exists x (and (R x x) (exists y (R y x))))",
            "(forall x (forall y (implies (next x y) (= x y))))",
        ];
        for text in formulas {
            let f = parse(text, &sig).unwrap();
            assert_eq!(
                model_check_sentence(&t, &f).unwrap(),
                naive(&t, &f, None, None),
                "{text}"
            );
        }
        // Open formulas under explicit assignments.
        let open = parse("(and (A x) (descendant x y))", &sig).unwrap();
        for v in 0..4 {
            for w in 0..4 {
                assert_eq!(
                    model_check(&t, &open, Some(v), Some(w)).unwrap(),
                    naive(&t, &open, Some(v), Some(w)),
                );
            }
        }
    }

    #[test]
    fn three_descendants_separates_star_trees() {
        let sig = Signature::new(Vec::<String>::new(), Vec::<String>::new()).unwrap();
        let f = parse("(exists x (count>= 3 y (descendant x y)))", &sig).unwrap();
        assert!(model_check_sentence(&star(3), &f).unwrap());
        assert!(!model_check_sentence(&star(2), &f).unwrap());
    }

    #[test]
    fn unbound_variable_is_reported() {
        let sig = Signature::new(["A"], Vec::<String>::new()).unwrap();
        let f = parse("(A x)", &sig).unwrap();
        assert_eq!(
            model_check(&star(1), &f, None, None),
            Err(SemanticsError::Unbound("x"))
        );
    }

    #[test]
    fn full_type_of_star_roots() {
        let sig = Signature::new(Vec::<String>::new(), Vec::<String>::new()).unwrap();
        let empty = OneType::from_index(&sig, 0);
        let t3 = star(3);
        let ft = full_type(&t3, &sig, 3, 0).unwrap();
        assert_eq!(ft.get(OrderFormula::Down).get(&empty), Count::Fin(3));
        for o in [
            OrderFormula::Up,
            OrderFormula::DeepUp,
            OrderFormula::DeepDown,
            OrderFormula::Right,
            OrderFormula::Left,
            OrderFormula::FarRight,
            OrderFormula::FarLeft,
            OrderFormula::Free,
        ] {
            assert!(ft.get(o).is_empty(), "{o:?}");
        }
        let ft2 = full_type(&t3, &sig, 2, 0).unwrap();
        assert_eq!(ft2.get(OrderFormula::Down).get(&empty), Count::Inf);
        // A leaf of a two-node tree sees only its parent above.
        let t1 = star(1);
        let leaf = full_type(&t1, &sig, 1, 1).unwrap();
        assert!(leaf.get(OrderFormula::Up).is_singleton());
        assert!(leaf.get(OrderFormula::Down).is_empty());
        assert!(leaf.invariants_ok());
    }

    #[test]
    fn full_type_rejects_binary_signatures() {
        let sig = Signature::new(["A"], ["R"]).unwrap();
        assert_eq!(
            full_type(&star(1), &sig, 1, 0),
            Err(SemanticsError::BinaryInSignature)
        );
    }

    #[test]
    fn invariants_hold_on_sample_trees() {
        let sig = Signature::new(["green", "black"], Vec::<String>::new()).unwrap();
        let t = example_tree();
        for k in 0..4 {
            for v in t.nodes() {
                assert!(full_type(&t, &sig, k, v).unwrap().invariants_ok());
            }
        }
    }

    #[test]
    fn neighbor_example_is_satisfied_and_types_agree() {
        let t = example_tree();
        let phi = example_phi();
        assert!(model_check_sentence(&t, &phi.to_formula()).unwrap());
        assert!(check_via_types(&t, &phi).unwrap());
        for v in t.nodes() {
            let ft = full_type(&t, &phi.sig, phi.c(), v).unwrap();
            assert!(is_phi_consistent(&phi, &ft).unwrap(), "node {v}");
        }
    }

    #[test]
    fn combined_neighbor_type_overcounts() {
        let t = example_tree();
        let phi = example_phi();
        // Node 2: green inner node with black siblings on both sides and one
        // black child. Node 0: green root with two black children.
        let a = full_type(&t, &phi.sig, phi.c(), 2).unwrap();
        let b = full_type(&t, &phi.sig, phi.c(), 0).unwrap();
        let g = combine(&a, &b).unwrap();
        let wct = witness_counts(&phi, &g).unwrap();
        assert_eq!(wct.get(0, OrderFormula::Down), Count::Fin(2));
        assert_eq!(wct.get(0, OrderFormula::Left), Count::Fin(1));
        assert_eq!(wct.get(0, OrderFormula::Right), Count::Fin(1));
        assert_eq!(wct.row_total(0), Count::Fin(4));
        assert!(!is_phi_consistent(&phi, &g).unwrap());
    }

    #[test]
    fn check_via_types_matches_model_check_on_grid() {
        let sig = Signature::new(["A"], Vec::<String>::new()).unwrap();
        let chi_ae = parse("(and (A y) (descendant x y))", &sig).unwrap();
        let core = parse("(implies (child x y) (A y))", &sig).unwrap();
        let cases = [
            NormalFormC2::new(
                sig.clone(),
                Formula::True,
                vec![C2Conjunct { op: CountCmp::Geq, bound: 1, chi: chi_ae.clone() }],
            )
            .unwrap(),
            NormalFormC2::new(
                sig.clone(),
                core,
                vec![C2Conjunct { op: CountCmp::Leq, bound: 2, chi: chi_ae }],
            )
            .unwrap(),
            NormalFormC2::new(sig.clone(), Formula::False, vec![]).unwrap(),
        ];
        let shapes: Vec<Vec<Option<usize>>> = vec![
            vec![None],
            vec![None, Some(0)],
            vec![None, Some(0), Some(0)],
            vec![None, Some(0), Some(1), Some(1)],
            vec![None, Some(0), Some(1), Some(2)],
        ];
        for shape in shapes {
            let base = Tree::new(shape).unwrap();
            // All labelings with the single unary symbol.
            for mask in 0..(1u32 << base.len()) {
                let mut t = base.clone();
                for v in t.nodes() {
                    if mask & (1 << v) != 0 {
                        t.add_label(v, "A");
                    }
                }
                for phi in &cases {
                    assert_eq!(
                        check_via_types(&t, phi).unwrap(),
                        model_check_sentence(&t, &phi.to_formula()).unwrap(),
                    );
                }
            }
        }
    }

    #[test]
    fn reduce_and_horizontal_shapes() {
        let t = example_tree();
        let phi = example_phi();
        let root = full_type(&t, &phi.sig, phi.c(), 0).unwrap();
        let r = reduce(&phi, &root).unwrap();
        assert!(r.above.is_empty());
        assert!(r.side.is_empty());
        // Four nodes below the root saturate at the threshold of three.
        assert_eq!(r.below.total(), Count::Inf);
        let h = horizontal(&root);
        assert!(h.right.is_empty() && h.left.is_empty());
        assert!(h.far_right.is_empty() && h.far_left.is_empty());
        assert!(h.equal.is_singleton());
    }

    #[test]
    fn combine_is_idempotent_on_equal_inputs() {
        let t = example_tree();
        let sig = Signature::new(["green", "black"], Vec::<String>::new()).unwrap();
        for v in t.nodes() {
            let a = full_type(&t, &sig, 3, v).unwrap();
            assert_eq!(combine(&a, &a).unwrap(), a);
        }
        let a = full_type(&t, &sig, 3, 0).unwrap();
        let b = full_type(&t, &sig, 2, 0).unwrap();
        assert!(matches!(
            combine(&a, &b),
            Err(SemanticsError::CutoffMismatch(3, 2))
        ));
    }
}
