//! Finite satisfiability for counting-free two-variable formulas over
//! trees, with free binary relations allowed.
//!
//! The search realizes an alternating procedure deterministically:
//! existential guesses (the shape, each node's 1-type, the atomic facts
//! joining each pair) become backtracking in a fixed candidate order, and
//! universal branching becomes exhaustive iteration.  Candidate models are
//! vetted through per-node record checks — pairwise consistency, witness
//! availability in every direction, promise propagation, and the universal
//! conjunct over realized and promised pairs — and an accepted witness is
//! re-verified by direct evaluation before being returned.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use crate::formula::{Formula, OrderFormula, Signature};
use crate::normalize::NormalFormFo2;
use crate::semantics::model_check_sentence;
use crate::tree::Tree;
use crate::types::{enumerate_one_types, eval_qf, AtomEnv, OneType, TwoType};
use crate::verdict::{Outcome, SearchMode, Stats, Verdict};

/// Caps for the FO² search: witness height, node degree, and total size of
/// the candidate fragment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bounds {
    pub max_depth: u64,
    pub max_degree: u64,
    pub max_fset: u64,
    pub mode: SearchMode,
}

impl Bounds {
    pub fn bounded(max_depth: u64, max_degree: u64, max_fset: u64) -> Bounds {
        Bounds { max_depth, max_degree, max_fset, mode: SearchMode::Bounded }
    }
}

/// The depth/degree bound 96·m³·|𝛂|³ from conjunct count and 1-type count.
pub fn bound_f_from(m: u64, a: u64) -> u64 {
    96u64
        .saturating_mul(m.saturating_pow(3))
        .saturating_mul(a.saturating_pow(3))
}

/// The fragment-size bound 3·(m+1)³·𝔣⁴·|𝛂| from the same parameters.
pub fn bound_fset_from(m: u64, a: u64) -> u64 {
    3u64.saturating_mul((m + 1).saturating_pow(3))
        .saturating_mul(bound_f_from(m, a).saturating_pow(4))
        .saturating_mul(a)
}

pub fn bound_f(phi: &NormalFormFo2) -> u64 {
    bound_f_from(phi.m() as u64, enumerate_one_types(&phi.sig).len() as u64)
}

pub fn bound_fset(phi: &NormalFormFo2) -> u64 {
    bound_fset_from(phi.m() as u64, enumerate_one_types(&phi.sig).len() as u64)
}

/// The complete sound-mode bounds.
pub fn fo2_bounds(phi: &NormalFormFo2) -> Bounds {
    Bounds {
        max_depth: bound_f(phi),
        max_degree: bound_f(phi),
        max_fset: bound_fset(phi),
        mode: SearchMode::Sound,
    }
}

/// Per-node bookkeeping: the node's own 1-type, the 2-type it forms with
/// every sibling, ancestor and fragment member, and for each ancestor the
/// set of 2-types that ancestor forms with the node's strict descendants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeRecord {
    pub one_type: OneType,
    pub two_type_to: BTreeMap<usize, TwoType>,
    pub promised: BTreeMap<usize, BTreeSet<TwoType>>,
}

pub type Records = BTreeMap<usize, NodeRecord>;

fn two_type_entails(
    sig: &Signature,
    tt: &TwoType,
    theta: OrderFormula,
    chi: &Formula,
) -> bool {
    tt.order == theta && eval_qf(chi, sig, &AtomEnv::from_two_type(tt))
}

/// Pairwise agreement of the guessed records: the 2-type recorded by each
/// sibling (and each fragment member, for fragment nodes) inverts to the
/// node's own record, and the node's 2-type towards every ancestor above
/// its father appears in the father's promise towards that ancestor.
pub fn check_context(
    records: &Records,
    v: usize,
    siblings: &[usize],
    ancestors: &[usize],
    f_members: &[usize],
    in_f: bool,
) -> bool {
    let rv = &records[&v];
    for &w in siblings {
        let beta = &rv.two_type_to[&w];
        if records[&w].two_type_to.get(&v) != Some(&beta.invert()) {
            return false;
        }
    }
    if in_f {
        for &w in f_members {
            if w == v {
                continue;
            }
            let beta = &rv.two_type_to[&w];
            if records[&w].two_type_to.get(&v) != Some(&beta.invert()) {
                return false;
            }
        }
    }
    let father = match ancestors.first() {
        Some(&u) => u,
        None => return true,
    };
    for &w in &ancestors[1..] {
        // w's 2-type towards v is the inverse of v's record towards w.
        let from_w = rv.two_type_to[&w].invert();
        match records[&father].promised.get(&w) {
            Some(set) if set.contains(&from_w) => {}
            _ => return false,
        }
    }
    true
}

/// Witnesses in the upward, sibling and free directions: conjuncts whose
/// guard fires on the node must be satisfied by some recorded 2-type with
/// an ancestor, a sibling or a fragment member.
pub fn check_upper_sibling_free(
    records: &Records,
    v: usize,
    siblings: &[usize],
    ancestors: &[usize],
    f_members: &[usize],
    phi: &NormalFormFo2,
) -> bool {
    use OrderFormula::*;
    let rv = &records[&v];
    for conj in &phi.conjuncts {
        if !rv.one_type.has_unary(&phi.sig, &conj.guard) {
            continue;
        }
        // A self-witness demand is decided by the node's own 1-type.
        if conj.theta == Equal {
            if !eval_qf(&conj.chi, &phi.sig, &AtomEnv::diagonal(&rv.one_type)) {
                return false;
            }
            continue;
        }
        if !matches!(conj.theta, Up | DeepUp | Right | Left | FarRight | FarLeft | Free)
        {
            continue;
        }
        let found = siblings
            .iter()
            .chain(ancestors.iter())
            .chain(f_members.iter())
            .filter(|&&w| w != v)
            .any(|w| {
                rv.two_type_to
                    .get(w)
                    .map(|tt| two_type_entails(&phi.sig, tt, conj.theta, &conj.chi))
                    .unwrap_or(false)
            });
        if !found {
            return false;
        }
    }
    true
}

/// Witnesses below: child conjuncts satisfied by a direct 2-type with some
/// child, descendant conjuncts by a promised 2-type of some child.
pub fn check_lower_witnesses(
    records: &Records,
    v: usize,
    children: &[usize],
    phi: &NormalFormFo2,
) -> bool {
    use OrderFormula::*;
    let rv = &records[&v];
    for conj in &phi.conjuncts {
        if !rv.one_type.has_unary(&phi.sig, &conj.guard) {
            continue;
        }
        match conj.theta {
            Down => {
                let found = children.iter().any(|w| {
                    let tt = records[w].two_type_to[&v].invert();
                    two_type_entails(&phi.sig, &tt, Down, &conj.chi)
                });
                if !found {
                    return false;
                }
            }
            DeepDown => {
                let found = children.iter().any(|w| {
                    records[w]
                        .promised
                        .get(&v)
                        .map(|set| {
                            set.iter().any(|beta| {
                                two_type_entails(&phi.sig, beta, DeepDown, &conj.chi)
                            })
                        })
                        .unwrap_or(false)
                });
                if !found {
                    return false;
                }
            }
            _ => {}
        }
    }
    true
}

/// Promise propagation: towards each ancestor, the node promises exactly
/// the inverted direct 2-types of its children plus everything the
/// children promise.
pub fn check_promises(
    records: &Records,
    v: usize,
    ancestors: &[usize],
    children: &[usize],
) -> bool {
    for &u in ancestors {
        let mut expected: BTreeSet<TwoType> = BTreeSet::new();
        for w in children {
            expected.insert(records[w].two_type_to[&u].invert());
            if let Some(set) = records[w].promised.get(&u) {
                expected.extend(set.iter().cloned());
            }
        }
        let actual = records[&v].promised.get(&u).cloned().unwrap_or_default();
        if actual != expected {
            return false;
        }
    }
    true
}

/// The universal conjunct over everything the node touches: recorded
/// 2-types in both orientations, and for every pair of 1-types promised or
/// realized below two distinct children, some free-position 2-type joining
/// them must satisfy it.
pub fn check_universal(
    records: &Records,
    v: usize,
    siblings: &[usize],
    ancestors: &[usize],
    f_members: &[usize],
    children: &[usize],
    phi: &NormalFormFo2,
) -> bool {
    let sig = &phi.sig;
    let rv = &records[&v];
    for w in siblings.iter().chain(ancestors.iter()).chain(f_members.iter()) {
        if *w == v {
            continue;
        }
        if let Some(tt) = rv.two_type_to.get(w) {
            if !eval_qf(&phi.chi, sig, &AtomEnv::from_two_type(tt)) {
                return false;
            }
            if !eval_qf(&phi.chi, sig, &AtomEnv::from_two_type(&tt.invert())) {
                return false;
            }
        }
    }
    let desc: Vec<BTreeSet<OneType>> = children
        .iter()
        .map(|w| {
            records[w]
                .promised
                .get(&v)
                .map(|set| set.iter().map(|b| b.right.clone()).collect())
                .unwrap_or_default()
        })
        .collect();
    for (i, wi) in children.iter().enumerate() {
        let _ = wi;
        for (j, wj) in children.iter().enumerate() {
            if i == j {
                continue;
            }
            let mut others = desc[j].clone();
            others.insert(records[wj].one_type.clone());
            for alpha in &desc[i] {
                for alpha2 in &others {
                    if !free_pair_possible(sig, alpha2, alpha, &phi.chi) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Whether some 2-type in free position with the given end 1-types
/// satisfies the formula in both orientations of its atoms.
fn free_pair_possible(
    sig: &Signature,
    left: &OneType,
    right: &OneType,
    chi: &Formula,
) -> bool {
    let b = sig.binary.len();
    let combos = 1usize << (2 * b);
    (0..combos).any(|mask| {
        let cross: Vec<(bool, bool)> =
            (0..b).map(|i| (mask >> (2 * i) & 1 == 1, mask >> (2 * i + 1) & 1 == 1)).collect();
        let tt = TwoType::new(
            left.clone(),
            right.clone(),
            OrderFormula::Free,
            cross,
        )
        .expect("free order with matching cross width");
        eval_qf(chi, sig, &AtomEnv::from_two_type(&tt))
    })
}

/// The records realized by a concrete tree, with the fragment taken to be
/// the whole tree: every node stores its 2-type to every other node and
/// its realized promises towards every ancestor.
pub fn build_records(t: &Tree, sig: &Signature) -> Records {
    let mut records = Records::new();
    for v in t.nodes() {
        let one_type = t.one_type_of(sig, v).expect("1-type of a tree node");
        let mut two_type_to = BTreeMap::new();
        for w in t.nodes() {
            if w != v {
                two_type_to
                    .insert(w, t.two_type_of(sig, v, w).expect("distinct nodes"));
            }
        }
        let mut promised: BTreeMap<usize, BTreeSet<TwoType>> = BTreeMap::new();
        let mut u = t.parent(v);
        while let Some(anc) = u {
            let mut set = BTreeSet::new();
            for d in t.nodes() {
                if t.is_strict_ancestor(v, d) {
                    set.insert(t.two_type_of(sig, anc, d).expect("distinct nodes"));
                }
            }
            promised.insert(anc, set);
            u = t.parent(anc);
        }
        // Promises towards the node's father are also read by the father's
        // own universal check, so the father itself is included above;
        // promises towards the node itself are what its children store.
        records.insert(v, NodeRecord { one_type, two_type_to, promised });
    }
    records
}

/// The verification half of the search on a concrete candidate: run every
/// per-node check with the fragment equal to the whole tree.
pub fn accepts(t: &Tree, phi: &NormalFormFo2) -> bool {
    let sig = &phi.sig;
    let records = build_records(t, sig);
    let all: Vec<usize> = t.nodes().collect();
    for v in t.nodes() {
        if !eval_qf(&phi.chi, sig, &AtomEnv::diagonal(&records[&v].one_type)) {
            return false;
        }
        let mut ancestors = Vec::new();
        let mut u = t.parent(v);
        while let Some(a) = u {
            ancestors.push(a);
            u = t.parent(a);
        }
        let siblings: Vec<usize> = match t.parent(v) {
            Some(p) => {
                t.children(p).iter().copied().filter(|&c| c != v).collect()
            }
            None => Vec::new(),
        };
        let children = t.children(v).to_vec();
        if !check_context(&records, v, &siblings, &ancestors, &all, true)
            || !check_upper_sibling_free(
                &records, v, &siblings, &ancestors, &all, phi,
            )
            || !check_lower_witnesses(&records, v, &children, phi)
            || !check_promises(&records, v, &ancestors, &children)
            || !check_universal(
                &records, v, &siblings, &ancestors, &all, &children, phi,
            )
        {
            return false;
        }
    }
    true
}

struct Stopped;

const NODE_BUDGET: u64 = 40_000_000;
const FRAME_NODE_CAP: u64 = 10;

struct Labeler<'a> {
    phi: &'a NormalFormFo2,
    one_types: Vec<OneType>,
    cross_combos: Vec<Vec<(bool, bool)>>,
    deadline: Option<Instant>,
    nodes: u64,
}

impl<'a> Labeler<'a> {
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

    /// Backtracking assignment of 1-types and cross atoms over a fixed
    /// shape, pruning pairs that violate the universal core.
    fn search(&mut self, frame: &Tree) -> Result<Option<Tree>, Stopped> {
        let n = frame.len();
        let mut types: Vec<OneType> = Vec::with_capacity(n);
        let mut cross: BTreeMap<(usize, usize), Vec<(bool, bool)>> = BTreeMap::new();
        self.assign_node(frame, 0, &mut types, &mut cross)
    }

    fn assign_node(
        &mut self,
        frame: &Tree,
        v: usize,
        types: &mut Vec<OneType>,
        cross: &mut BTreeMap<(usize, usize), Vec<(bool, bool)>>,
    ) -> Result<Option<Tree>, Stopped> {
        let sig = &self.phi.sig;
        if v == frame.len() {
            let t = self.decorate(frame, types, cross);
            if accepts(&t, self.phi) {
                return Ok(Some(t));
            }
            return Ok(None);
        }
        let alphas = self.one_types.clone();
        for alpha in alphas {
            self.tick()?;
            if !eval_qf(&self.phi.chi, sig, &AtomEnv::diagonal(&alpha)) {
                continue;
            }
            types.push(alpha);
            if let Some(t) = self.assign_pair(frame, v, 0, types, cross)? {
                return Ok(Some(t));
            }
            types.pop();
        }
        Ok(None)
    }

    fn assign_pair(
        &mut self,
        frame: &Tree,
        v: usize,
        u: usize,
        types: &mut Vec<OneType>,
        cross: &mut BTreeMap<(usize, usize), Vec<(bool, bool)>>,
    ) -> Result<Option<Tree>, Stopped> {
        if u == v {
            return self.assign_node(frame, v + 1, types, cross);
        }
        let sig = &self.phi.sig;
        let order = frame.order_of(u, v);
        let combos = self.cross_combos.clone();
        for combo in combos {
            self.tick()?;
            let tt = TwoType::new(
                types[u].clone(),
                types[v].clone(),
                order,
                combo.clone(),
            )
            .expect("non-equal order");
            if !eval_qf(&self.phi.chi, sig, &AtomEnv::from_two_type(&tt))
                || !eval_qf(&self.phi.chi, sig, &AtomEnv::from_two_type(&tt.invert()))
            {
                continue;
            }
            cross.insert((u, v), combo);
            if let Some(t) = self.assign_pair(frame, v, u + 1, types, cross)? {
                return Ok(Some(t));
            }
            cross.remove(&(u, v));
        }
        Ok(None)
    }

    fn decorate(
        &self,
        frame: &Tree,
        types: &[OneType],
        cross: &BTreeMap<(usize, usize), Vec<(bool, bool)>>,
    ) -> Tree {
        let sig = &self.phi.sig;
        let mut t = frame.clone();
        for v in 0..frame.len() {
            for (i, name) in sig.unary.iter().enumerate() {
                if types[v].unary[i] {
                    t.add_label(v, name.clone());
                }
            }
            for (i, name) in sig.binary.iter().enumerate() {
                if types[v].loops[i] {
                    t.add_edge(name.clone(), v, v);
                }
            }
        }
        for ((u, v), combo) in cross {
            for (i, name) in sig.binary.iter().enumerate() {
                if combo[i].0 {
                    t.add_edge(name.clone(), *u, *v);
                }
                if combo[i].1 {
                    t.add_edge(name.clone(), *v, *u);
                }
            }
        }
        t
    }
}

/// Bounded satisfiability: try every shape within the caps in ascending
/// size and run the backtracking labeler over each.
pub fn sat_fo2bin(
    phi: &NormalFormFo2,
    bounds: &Bounds,
    deadline: Option<Instant>,
) -> Verdict<Bounds> {
    let start = Instant::now();
    let b = phi.sig.binary.len();
    let cross_combos: Vec<Vec<(bool, bool)>> = (0..1usize << (2 * b))
        .map(|mask| {
            (0..b)
                .map(|i| (mask >> (2 * i) & 1 == 1, mask >> (2 * i + 1) & 1 == 1))
                .collect()
        })
        .collect();
    let mut labeler = Labeler {
        phi,
        one_types: enumerate_one_types(&phi.sig),
        cross_combos,
        deadline,
        nodes: 0,
    };
    // A formula without witness conjuncts degenerates the size bound to
    // zero; the single-node candidate is still always considered.
    let size_cap = bounds.max_fset.min(FRAME_NODE_CAP).max(1);
    let truncated = bounds.max_fset > FRAME_NODE_CAP;

    let attempt = (|| -> Result<Option<Tree>, Stopped> {
        for frame in crate::oracle::enumerate_frames(size_cap as usize) {
            if frame.height() as u64 > bounds.max_depth
                || frame.max_degree() as u64 > bounds.max_degree
            {
                continue;
            }
            if let Some(t) = labeler.search(&frame)? {
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
            assert!(ok, "accepted witness must satisfy the formula: {:?} for {:?}", t.save(), phi);
            Outcome::Sat(t)
        }
        Ok(None) => {
            if truncated {
                Outcome::Timeout
            } else if bounds.mode == SearchMode::Sound {
                Outcome::UnsatProved
            } else {
                Outcome::UnsatWithinBounds
            }
        }
    };

    Verdict {
        outcome,
        bounds_used: bounds.clone(),
        stats: Stats {
            nodes_explored: labeler.nodes,
            elapsed: start.elapsed(),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Var;
    use crate::normalize::Fo2Conjunct;
    use crate::oracle::{enumerate_frames, enumerate_labelings, random_qf, random_tree};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sig_a() -> Signature {
        Signature::new(["A"], Vec::<String>::new()).unwrap()
    }

    fn sig_ab() -> Signature {
        Signature::new(["A", "B"], Vec::<String>::new()).unwrap()
    }

    fn nf(sig: Signature, chi: Formula, conjuncts: Vec<Fo2Conjunct>) -> NormalFormFo2 {
        NormalFormFo2::new(sig, chi, conjuncts).unwrap()
    }

    fn unary(name: &str, v: Var) -> Formula {
        Formula::Unary(name.into(), v)
    }

    #[test]
    fn bounds_evaluate_exactly() {
        assert_eq!(bound_f_from(1, 2), 768);
        assert_eq!(bound_f_from(2, 1), 768);
        assert_eq!(bound_f_from(0, 8), 0);
        assert_eq!(bound_fset_from(1, 1), 2_038_431_744);
        assert_eq!(bound_fset_from(0, 1), 0);
        assert!(bound_f_from(2, 2) > bound_f_from(1, 2));
        assert!(bound_fset_from(1, 2) > bound_fset_from(1, 1));

        let phi = nf(
            sig_a(),
            Formula::True,
            vec![Fo2Conjunct {
                guard: "A".into(),
                theta: OrderFormula::Down,
                chi: Formula::True,
            }],
        );
        let b = fo2_bounds(&phi);
        assert_eq!(b.max_depth, 768);
        assert_eq!(b.max_degree, 768);
        assert_eq!(b.mode, SearchMode::Sound);
    }

    #[test]
    fn context_check_sees_inversion_and_promise_violations() {
        let sig = Signature::new(["A"], ["R"]).unwrap();
        // Root 0 with children 1 and 3, grandchild 2 below 1.
        let mut t = Tree::new(vec![None, Some(0), Some(1), Some(0)]).unwrap();
        t.add_label(2, "A");
        t.add_edge("R", 1, 3);
        let records = build_records(&t, &sig);
        let all: Vec<usize> = t.nodes().collect();
        assert!(check_context(&records, 1, &[3], &[0], &all, true));
        assert!(check_context(&records, 2, &[], &[1, 0], &all, true));

        // Tampering with one side of a sibling pair breaks the inversion
        // agreement, in either sibling order.
        let mut bad = records.clone();
        let mut tt = bad[&1].two_type_to[&3].clone();
        tt.cross[0].0 = !tt.cross[0].0;
        bad.get_mut(&1).unwrap().two_type_to.insert(3, tt);
        assert!(!check_context(&bad, 1, &[3], &[0], &all, true));
        assert!(!check_context(&bad, 3, &[1], &[0], &all, true));

        // Dropping the grandchild's 2-type from its father's promise set
        // towards the root is caught at the grandchild.
        let mut bad = records.clone();
        bad.get_mut(&1).unwrap().promised.get_mut(&0).unwrap().clear();
        assert!(!check_context(&bad, 2, &[], &[1, 0], &all, true));
    }

    #[test]
    fn upper_witness_check_covers_the_three_directions() {
        let phi = nf(
            sig_ab(),
            Formula::True,
            vec![Fo2Conjunct {
                guard: "A".into(),
                theta: OrderFormula::Up,
                chi: unary("B", Var::Y),
            }],
        );
        let mut t = Tree::new(vec![None, Some(0)]).unwrap();
        t.add_label(1, "A");
        t.add_label(0, "B");
        let records = build_records(&t, &phi.sig);
        let all: Vec<usize> = t.nodes().collect();
        // The father provides the upward witness.
        assert!(check_upper_sibling_free(&records, 1, &[], &[0], &all, &phi));
        // The root triggers no guard, so it passes vacuously.
        assert!(check_upper_sibling_free(&records, 0, &[], &[], &all, &phi));

        // A triggered free demand with no candidates anywhere fails.
        let phi_free = nf(
            sig_ab(),
            Formula::True,
            vec![Fo2Conjunct {
                guard: "A".into(),
                theta: OrderFormula::Free,
                chi: Formula::True,
            }],
        );
        let mut lone = Tree::new(vec![None]).unwrap();
        lone.add_label(0, "A");
        let records = build_records(&lone, &phi_free.sig);
        assert!(!check_upper_sibling_free(&records, 0, &[], &[], &[0], &phi_free));
    }

    #[test]
    fn lower_witness_check_uses_children_and_promises() {
        let phi = nf(
            sig_ab(),
            Formula::True,
            vec![
                Fo2Conjunct {
                    guard: "A".into(),
                    theta: OrderFormula::Down,
                    chi: Formula::True,
                },
                Fo2Conjunct {
                    guard: "A".into(),
                    theta: OrderFormula::DeepDown,
                    chi: unary("B", Var::Y),
                },
            ],
        );
        // Path 0 - 1 - 2 with B on the grandchild.
        let mut t = Tree::new(vec![None, Some(0), Some(1)]).unwrap();
        t.add_label(0, "A");
        t.add_label(2, "B");
        let records = build_records(&t, &phi.sig);
        assert!(check_lower_witnesses(&records, 0, &[1], &phi));
        // An untriggered node passes with no children.
        assert!(check_lower_witnesses(&records, 2, &[], &phi));
        // A triggered leaf cannot satisfy a child demand.
        let mut leaf = Tree::new(vec![None]).unwrap();
        leaf.add_label(0, "A");
        let records = build_records(&leaf, &phi.sig);
        assert!(!check_lower_witnesses(&records, 0, &[], &phi));
    }

    #[test]
    fn promise_check_forces_the_union() {
        let sig = sig_ab();
        let mut t =
            Tree::new(vec![None, Some(0), Some(1), Some(1), Some(3)]).unwrap();
        t.add_label(2, "A");
        t.add_label(4, "B");
        let records = build_records(&t, &sig);
        for v in t.nodes() {
            let mut ancestors = Vec::new();
            let mut u = t.parent(v);
            while let Some(a) = u {
                ancestors.push(a);
                u = t.parent(a);
            }
            assert!(check_promises(&records, v, &ancestors, t.children(v)));
        }
        // Removing one promised entry breaks the equation.
        let mut bad = records.clone();
        let set = bad.get_mut(&1).unwrap().promised.get_mut(&0).unwrap();
        let first = set.iter().next().unwrap().clone();
        set.remove(&first);
        assert!(!check_promises(&bad, 1, &[0], t.children(1)));
    }

    #[test]
    fn universal_check_rejects_impossible_free_pairs() {
        // At most one A-labelled node in the whole tree.
        let chi = Formula::implies(
            Formula::and(unary("A", Var::X), unary("A", Var::Y)),
            Formula::Equal(Var::X, Var::Y),
        );
        let phi = nf(sig_a(), chi, Vec::new());
        // Two A-labelled grandchildren below different children of the
        // root sit in free position.
        let mut t =
            Tree::new(vec![None, Some(0), Some(1), Some(0), Some(3)]).unwrap();
        t.add_label(2, "A");
        t.add_label(4, "A");
        let records = build_records(&t, &phi.sig);
        let all: Vec<usize> = t.nodes().collect();
        assert!(!check_universal(&records, 0, &[], &[], &all, &[1, 3], &phi));
        assert!(!accepts(&t, &phi));

        // With a trivial core the same records pass.
        let phi_top = nf(sig_a(), Formula::True, Vec::new());
        let records = build_records(&t, &phi_top.sig);
        assert!(check_universal(&records, 0, &[], &[], &all, &[1, 3], &phi_top));

        // A childless root only exercises the pairwise clauses.
        let lone = Tree::new(vec![None]).unwrap();
        let records = build_records(&lone, &phi.sig);
        assert!(check_universal(&records, 0, &[], &[], &[0], &[], &phi));
    }

    #[test]
    fn acceptance_matches_direct_evaluation() {
        // The record pipeline and the evaluator must agree on random
        // labelled trees, free binary relations included.
        let sig = Signature::new(["A"], ["R"]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for case in 0..60 {
            let chi = if rng.gen_bool(0.4) {
                Formula::True
            } else {
                random_qf(&mut rng, &sig, 2)
            };
            let theta = OrderFormula::ALL[rng.gen_range(0..10)];
            let conjuncts = if rng.gen_bool(0.5) {
                vec![Fo2Conjunct {
                    guard: "A".into(),
                    theta,
                    chi: random_qf(&mut rng, &sig, 1),
                }]
            } else {
                Vec::new()
            };
            let phi = match NormalFormFo2::new(sig.clone(), chi, conjuncts) {
                Ok(p) => p,
                Err(_) => continue,
            };
            let sentence = phi.to_formula();
            for _ in 0..6 {
                let t = random_tree(&mut rng, &sig, 5);
                let direct = model_check_sentence(&t, &sentence).unwrap();
                assert_eq!(
                    accepts(&t, &phi),
                    direct,
                    "case {} on {:?} for {:?}",
                    case,
                    t.save(),
                    phi
                );
            }
        }
    }

    #[test]
    fn solves_the_three_reference_cases() {
        // A pure existential demand: satisfiable with one labelled node.
        let phi = nf(sig_a(), unary("A", Var::X), Vec::new());
        let v = sat_fo2bin(&phi, &Bounds::bounded(2, 2, 3), None);
        match &v.outcome {
            Outcome::Sat(t) => {
                assert_eq!(t.len(), 1);
                assert!(model_check_sentence(t, &phi.to_formula()).unwrap());
            }
            other => panic!("expected SAT, got {:?}", other),
        }

        // Every node is guarded and needs a child: no finite tree.
        let phi = nf(
            sig_a(),
            unary("A", Var::X),
            vec![Fo2Conjunct {
                guard: "A".into(),
                theta: OrderFormula::Down,
                chi: Formula::True,
            }],
        );
        let v = sat_fo2bin(&phi, &Bounds::bounded(3, 3, 5), None);
        assert_eq!(v.outcome, Outcome::UnsatWithinBounds);

        // An unsatisfiable core rejects immediately, provably so when the
        // complete bounds are feasible.
        let phi = nf(sig_a(), Formula::False, Vec::new());
        let v = sat_fo2bin(&phi, &fo2_bounds(&phi), None);
        assert_eq!(v.outcome, Outcome::UnsatProved);
        let v = sat_fo2bin(&phi, &Bounds::bounded(2, 2, 3), None);
        assert_eq!(v.outcome, Outcome::UnsatWithinBounds);
    }

    #[test]
    fn agrees_with_exhaustive_enumeration() {
        let sig = sig_a();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let frames = enumerate_frames(5);
        for case in 0..30 {
            let chi = if rng.gen_bool(0.3) {
                Formula::True
            } else {
                random_qf(&mut rng, &sig, 2)
            };
            let conjuncts = (0..rng.gen_range(0..=1))
                .map(|_| Fo2Conjunct {
                    guard: "A".into(),
                    theta: OrderFormula::ALL[rng.gen_range(0..10)],
                    chi: random_qf(&mut rng, &sig, 1),
                })
                .collect();
            let phi = match NormalFormFo2::new(sig.clone(), chi, conjuncts) {
                Ok(p) => p,
                Err(_) => continue,
            };
            let sentence = phi.to_formula();
            let mut oracle_model = None;
            'outer: for frame in &frames {
                if frame.height() > 2 || frame.max_degree() > 3 {
                    continue;
                }
                for t in enumerate_labelings(frame, &sig, 1 << 20).unwrap() {
                    if model_check_sentence(&t, &sentence).unwrap() {
                        oracle_model = Some(t);
                        break 'outer;
                    }
                }
            }
            let v = sat_fo2bin(&phi, &Bounds::bounded(2, 3, 5), None);
            match (&v.outcome, &oracle_model) {
                (Outcome::Sat(_), Some(_)) => {}
                (Outcome::UnsatWithinBounds, None) => {}
                (out, oracle) => panic!(
                    "case {}: solver {:?} vs oracle {:?} for {:?}",
                    case, out, oracle, phi
                ),
            }
        }
    }

    #[test]
    fn handles_free_binary_relations() {
        let sig = Signature::new(["A"], ["R"]).unwrap();
        // Every A-node needs a child it points to via R.
        let phi = nf(
            sig.clone(),
            Formula::True,
            vec![Fo2Conjunct {
                guard: "A".into(),
                theta: OrderFormula::Down,
                chi: Formula::Common("R".into(), Var::X, Var::Y),
            }],
        );
        let v = sat_fo2bin(&phi, &Bounds::bounded(2, 2, 3), None);
        match &v.outcome {
            Outcome::Sat(t) => {
                assert!(model_check_sentence(t, &phi.to_formula()).unwrap());
            }
            other => panic!("expected SAT, got {:?}", other),
        }

        // R must be symmetric somewhere and nowhere at once: unsatisfiable
        // core over the loop atom.
        let contradictory = Formula::and(
            Formula::Common("R".into(), Var::X, Var::X),
            Formula::not(Formula::Common("R".into(), Var::X, Var::X)),
        );
        let phi = nf(sig, contradictory, Vec::new());
        let v = sat_fo2bin(&phi, &Bounds::bounded(2, 2, 3), None);
        assert_eq!(v.outcome, Outcome::UnsatWithinBounds);
    }
}
