//! Brute-force ground truth: exhaustive enumeration of tree frames and
//! labelings, satisfiability by enumeration, a propositional encoding for
//! frame-satisfiability over large extended signatures, seeded random
//! generators, and the differential harness the test suites are built on.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::rc::Rc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;
use varisat::{ExtendFormula, Lit, Solver};

use crate::formula::{CountOp, Formula, OrderFormula, Signature, Var};
use crate::normalize::{C2Conjunct, CountCmp, NormalFormC2};
use crate::semantics::{model_check, model_check_sentence, SemanticsError};
use crate::tree::Tree;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("labeling budget exceeded: {0} labelings needed, {1} allowed")]
    Budget(u128, u64),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

/// Every ordered rooted tree with 1..=max_nodes nodes, unlabeled, smallest
/// sizes first, each shape exactly once in a fixed order.
///
/// Shapes grow by appending one node in preorder; the new node's parent is
/// any node on the rightmost path, which yields each preorder parent vector
/// exactly once.
pub fn enumerate_frames(max_nodes: usize) -> Vec<Tree> {
    assert!(max_nodes >= 1);
    let mut all: Vec<Vec<Option<usize>>> = vec![vec![None]];
    let mut frontier: Vec<Vec<Option<usize>>> = vec![vec![None]];
    for _ in 1..max_nodes {
        let mut next = Vec::new();
        for shape in &frontier {
            let mut cur = Some(shape.len() - 1);
            while let Some(v) = cur {
                let mut s = shape.clone();
                s.push(Some(v));
                next.push(s);
                cur = shape[v];
            }
        }
        all.extend(next.iter().cloned());
        frontier = next;
    }
    all.into_iter().map(|s| Tree::new(s).expect("generated shapes are preorder")).collect()
}

fn labeling_count(n: usize, sig: &Signature) -> u128 {
    let bits = (sig.unary.len() * n + sig.binary.len() * n * n) as u32;
    if bits >= 127 {
        u128::MAX
    } else {
        1u128 << bits
    }
}

/// All interpretations of the signature over a fixed frame: every subset of
/// unary labels per node and every edge set per binary symbol, in
/// big-endian bit order. The budget caps the total count up front.
pub fn enumerate_labelings<'a>(
    frame: &'a Tree,
    sig: &'a Signature,
    budget: u64,
) -> Result<impl Iterator<Item = Tree> + 'a, OracleError> {
    let total = labeling_count(frame.len(), sig);
    if total > budget as u128 {
        return Err(OracleError::Budget(total, budget));
    }
    let n = frame.len();
    let ubits = sig.unary.len() * n;
    let bbits = sig.binary.len() * n * n;
    Ok((0..total as u64).map(move |mask| {
        let mut t = frame.clone();
        for (s, name) in sig.unary.iter().enumerate() {
            for v in 0..n {
                if mask >> (s * n + v) & 1 == 1 {
                    t.add_label(v, name);
                }
            }
        }
        for (s, name) in sig.binary.iter().enumerate() {
            for i in 0..n {
                for j in 0..n {
                    if mask >> (ubits + s * n * n + i * n + j) & 1 == 1 {
                        t.add_edge(name, i, j);
                    }
                }
            }
        }
        let _ = bbits;
        t
    }))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleVerdict {
    Sat(Tree),
    /// No model with at most this many nodes.
    NoModelUpTo(usize),
}

/// Satisfiability by enumeration: try every labeling of every frame up to
/// the size limit and return the first model found.
pub fn oracle_sat(
    f: &Formula,
    sig: &Signature,
    max_nodes: usize,
    budget: u64,
) -> Result<OracleVerdict, OracleError> {
    for frame in enumerate_frames(max_nodes) {
        for t in enumerate_labelings(&frame, sig, budget)? {
            if model_check_sentence(&t, f)? {
                return Ok(OracleVerdict::Sat(t));
            }
        }
    }
    Ok(OracleVerdict::NoModelUpTo(max_nodes))
}

/// Ground boolean circuit over labeling bits of a fixed frame.
enum Circuit {
    Const(bool),
    /// Index into the labeling-bit numbering.
    Bit(usize),
    Not(Rc<Circuit>),
    And(Vec<Rc<Circuit>>),
    Or(Vec<Rc<Circuit>>),
}

struct Grounder<'a> {
    t: &'a Tree,
    sig: &'a Signature,
    memo: HashMap<(usize, Option<usize>, Option<usize>), Rc<Circuit>>,
}

impl<'a> Grounder<'a> {
    fn bit_unary(&self, s: usize, v: usize) -> usize {
        s * self.t.len() + v
    }

    fn bit_binary(&self, s: usize, i: usize, j: usize) -> usize {
        let n = self.t.len();
        self.sig.unary.len() * n + s * n * n + i * n + j
    }

    fn node(v: Var, x: Option<usize>, y: Option<usize>) -> usize {
        match v {
            Var::X => x.expect("grounding a bound formula"),
            Var::Y => y.expect("grounding a bound formula"),
        }
    }

    fn ground_rc(
        &mut self,
        f: &Rc<Formula>,
        x: Option<usize>,
        y: Option<usize>,
    ) -> Rc<Circuit> {
        let key = (Rc::as_ptr(f) as usize, x, y);
        if let Some(hit) = self.memo.get(&key) {
            return hit.clone();
        }
        let out = self.ground(f, x, y);
        self.memo.insert(key, out.clone());
        out
    }

    fn ground(&mut self, f: &Formula, x: Option<usize>, y: Option<usize>) -> Rc<Circuit> {
        match f {
            Formula::True => Rc::new(Circuit::Const(true)),
            Formula::False => Rc::new(Circuit::Const(false)),
            Formula::Unary(name, v) => {
                let s = self
                    .sig
                    .unary
                    .iter()
                    .position(|u| u == name)
                    .expect("symbol in signature");
                Rc::new(Circuit::Bit(self.bit_unary(s, Self::node(*v, x, y))))
            }
            Formula::Common(name, a, b) => {
                let s = self
                    .sig
                    .binary
                    .iter()
                    .position(|u| u == name)
                    .expect("symbol in signature");
                let i = Self::node(*a, x, y);
                let j = Self::node(*b, x, y);
                Rc::new(Circuit::Bit(self.bit_binary(s, i, j)))
            }
            Formula::Nav(nav, a, b) => {
                let i = Self::node(*a, x, y);
                let j = Self::node(*b, x, y);
                let o = self.t.order_of(i, j);
                Rc::new(Circuit::Const(o != OrderFormula::Equal && o.nav_truth(*nav, false)))
            }
            Formula::Equal(a, b) => {
                Rc::new(Circuit::Const(Self::node(*a, x, y) == Self::node(*b, x, y)))
            }
            Formula::Not(a) => Rc::new(Circuit::Not(self.ground_rc(a, x, y))),
            Formula::And(a, b) => Rc::new(Circuit::And(vec![
                self.ground_rc(a, x, y),
                self.ground_rc(b, x, y),
            ])),
            Formula::Or(a, b) => Rc::new(Circuit::Or(vec![
                self.ground_rc(a, x, y),
                self.ground_rc(b, x, y),
            ])),
            Formula::Implies(a, b) => Rc::new(Circuit::Or(vec![
                Rc::new(Circuit::Not(self.ground_rc(a, x, y))),
                self.ground_rc(b, x, y),
            ])),
            Formula::Exists(v, body) => {
                let parts = self.instances(*v, body, x, y);
                Rc::new(Circuit::Or(parts))
            }
            Formula::Forall(v, body) => {
                let parts = self.instances(*v, body, x, y);
                Rc::new(Circuit::And(parts))
            }
            Formula::Count(op, k, v, body) => {
                let parts = self.instances(*v, body, x, y);
                match op {
                    CountOp::Geq => at_least(*k, &parts),
                    CountOp::Leq => Rc::new(Circuit::Not(at_least(*k + 1, &parts))),
                    CountOp::Eq => Rc::new(Circuit::And(vec![
                        at_least(*k, &parts),
                        Rc::new(Circuit::Not(at_least(*k + 1, &parts))),
                    ])),
                }
            }
        }
    }

    fn instances(
        &mut self,
        v: Var,
        body: &Rc<Formula>,
        x: Option<usize>,
        y: Option<usize>,
    ) -> Vec<Rc<Circuit>> {
        (0..self.t.len())
            .map(|w| {
                let (nx, ny) = match v {
                    Var::X => (Some(w), y),
                    Var::Y => (x, Some(w)),
                };
                self.ground_rc(body, nx, ny)
            })
            .collect()
    }
}

/// At least k of the given circuits hold: expanded over k-subsets, which is
/// fine at frame sizes the oracle works with.
fn at_least(k: u32, parts: &[Rc<Circuit>]) -> Rc<Circuit> {
    let k = k as usize;
    if k == 0 {
        return Rc::new(Circuit::Const(true));
    }
    if k > parts.len() {
        return Rc::new(Circuit::Const(false));
    }
    let mut subsets: Vec<Rc<Circuit>> = Vec::new();
    let mut pick = vec![0usize; k];
    fn go(
        parts: &[Rc<Circuit>],
        k: usize,
        start: usize,
        pick: &mut Vec<usize>,
        depth: usize,
        out: &mut Vec<Rc<Circuit>>,
    ) {
        if depth == k {
            out.push(Rc::new(Circuit::And(
                pick.iter().map(|i| parts[*i].clone()).collect(),
            )));
            return;
        }
        for i in start..parts.len() {
            pick[depth] = i;
            go(parts, k, i + 1, pick, depth + 1, out);
        }
    }
    go(parts, k, 0, &mut pick, 0, &mut subsets);
    Rc::new(Circuit::Or(subsets))
}

/// Tseitin encoding of a circuit into a solver, one solver variable per
/// distinct circuit node.
struct Encoder<'s> {
    solver: Solver<'s>,
    bit_lits: Vec<Lit>,
    memo: HashMap<usize, Lit>,
    true_lit: Lit,
}

impl<'s> Encoder<'s> {
    fn new(bits: usize) -> Encoder<'s> {
        let mut solver = Solver::new();
        let true_lit = solver.new_lit();
        solver.add_clause(&[true_lit]);
        let bit_lits = (0..bits).map(|_| solver.new_lit()).collect();
        Encoder { solver, bit_lits, memo: HashMap::new(), true_lit }
    }

    fn lit(&mut self, c: &Rc<Circuit>) -> Lit {
        let key = Rc::as_ptr(c) as usize;
        if let Some(hit) = self.memo.get(&key) {
            return *hit;
        }
        let out = match &**c {
            Circuit::Const(b) => {
                if *b {
                    self.true_lit
                } else {
                    !self.true_lit
                }
            }
            Circuit::Bit(i) => self.bit_lits[*i],
            Circuit::Not(a) => !self.lit(a),
            Circuit::And(parts) => {
                let lits: Vec<Lit> = parts.iter().map(|p| self.lit(p)).collect();
                let g = self.solver.new_lit();
                for l in &lits {
                    self.solver.add_clause(&[!g, *l]);
                }
                let mut long: Vec<Lit> = lits.iter().map(|l| !*l).collect();
                long.push(g);
                self.solver.add_clause(&long);
                g
            }
            Circuit::Or(parts) => {
                let lits: Vec<Lit> = parts.iter().map(|p| self.lit(p)).collect();
                let g = self.solver.new_lit();
                for l in &lits {
                    self.solver.add_clause(&[g, !*l]);
                }
                let mut long: Vec<Lit> = lits.clone();
                long.push(!g);
                self.solver.add_clause(&long);
                g
            }
        };
        self.memo.insert(key, out);
        out
    }
}

/// Is the sentence satisfiable over this exact frame, by some labeling of
/// the signature? Returns a satisfying labeled tree, verified by direct
/// model checking before being returned.
pub fn ground_sat(
    frame: &Tree,
    sig: &Signature,
    f: &Formula,
) -> Result<Option<Tree>, OracleError> {
    let mut g = Grounder { t: frame, sig, memo: HashMap::new() };
    let root = g.ground(f, None, None);
    let n = frame.len();
    let bits = sig.unary.len() * n + sig.binary.len() * n * n;
    let mut enc = Encoder::new(bits);
    let top = enc.lit(&root);
    enc.solver.add_clause(&[top]);
    let mut solver = enc.solver;
    if !solver.solve().expect("solver does not fail") {
        return Ok(None);
    }
    let model = solver.model().expect("model after SAT");
    let assignment: std::collections::HashSet<Lit> = model.into_iter().collect();
    let mut t = frame.clone();
    for (s, name) in sig.unary.iter().enumerate() {
        for v in 0..n {
            if assignment.contains(&enc.bit_lits[s * n + v]) {
                t.add_label(v, name);
            }
        }
    }
    for (s, name) in sig.binary.iter().enumerate() {
        for i in 0..n {
            for j in 0..n {
                if assignment.contains(&enc.bit_lits[sig.unary.len() * n + s * n * n + i * n + j]) {
                    t.add_edge(name, i, j);
                }
            }
        }
    }
    if !model_check_sentence(&t, f)? {
        panic!("propositional frame encoding disagrees with direct evaluation");
    }
    Ok(Some(t))
}

/// A random tree with 1..=max_nodes nodes, random unary labels (each bit an
/// independent coin) and sparse random binary edges.
pub fn random_tree<R: Rng>(rng: &mut R, sig: &Signature, max_nodes: usize) -> Tree {
    let n = rng.gen_range(1..=max_nodes);
    let mut shape: Vec<Option<usize>> = vec![None];
    for i in 1..n {
        shape.push(Some(rng.gen_range(0..i)));
    }
    let mut t = Tree::from_shape(&shape).expect("single-rooted shape");
    for v in 0..n {
        for name in &sig.unary {
            if rng.gen_bool(0.5) {
                t.add_label(v, name);
            }
        }
    }
    for name in &sig.binary {
        for i in 0..n {
            for j in 0..n {
                if rng.gen_bool(0.15) {
                    t.add_edge(name, i, j);
                }
            }
        }
    }
    t
}

/// A random quantifier-free formula over the pair (x, y).
pub fn random_qf<R: Rng>(rng: &mut R, sig: &Signature, depth: usize) -> Formula {
    use crate::formula::Nav;
    if depth == 0 || rng.gen_bool(0.35) {
        let vars = [Var::X, Var::Y];
        let v = vars[rng.gen_range(0..2)];
        let w = vars[rng.gen_range(0..2)];
        return match rng.gen_range(0..4) {
            0 if !sig.unary.is_empty() => {
                let name = &sig.unary[rng.gen_range(0..sig.unary.len())];
                Formula::Unary(name.clone(), v)
            }
            1 => {
                let navs = [Nav::Child, Nav::Descendant, Nav::NextSibling, Nav::FollowingSibling];
                Formula::Nav(navs[rng.gen_range(0..4)], v, w)
            }
            2 => Formula::Equal(v, w),
            _ => Formula::True,
        };
    }
    match rng.gen_range(0..4) {
        0 => Formula::not(random_qf(rng, sig, depth - 1)),
        1 => Formula::and(random_qf(rng, sig, depth - 1), random_qf(rng, sig, depth - 1)),
        2 => Formula::or(random_qf(rng, sig, depth - 1), random_qf(rng, sig, depth - 1)),
        _ => Formula::implies(random_qf(rng, sig, depth - 1), random_qf(rng, sig, depth - 1)),
    }
}

/// A random counting normal form over a purely unary signature.
pub fn random_nf_c2<R: Rng>(
    rng: &mut R,
    sig: &Signature,
    max_m: usize,
    max_c: u32,
) -> NormalFormC2 {
    assert!(sig.binary.is_empty());
    // Bias the universal core towards satisfiable-but-nontrivial shapes.
    let chi = if rng.gen_bool(0.3) {
        Formula::implies(random_qf(rng, sig, 1), random_qf(rng, sig, 2))
    } else {
        Formula::True
    };
    let m = rng.gen_range(0..=max_m);
    let conjuncts = (0..m)
        .map(|_| C2Conjunct {
            op: if rng.gen_bool(0.5) { CountCmp::Geq } else { CountCmp::Leq },
            bound: rng.gen_range(0..=max_c),
            chi: random_qf(rng, sig, 2),
        })
        .collect();
    NormalFormC2::new(sig.clone(), chi, conjuncts).expect("generated parts are quantifier-free")
}

/// Outcome of a differential run: how many cases were exercised and a
/// reproducer line for every disagreement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub cases: usize,
    pub disagreements: Vec<String>,
}

impl Report {
    pub fn clean(&self) -> bool {
        self.disagreements.is_empty()
    }
}

/// Compare a candidate satisfaction checker for counting normal forms
/// against direct model checking over a seeded random corpus. The checker
/// is a parameter so harness sensitivity itself can be tested by injecting
/// a corrupted one.
pub fn differential_nf_c2<F>(
    seed: u64,
    cases: usize,
    sig: &Signature,
    max_nodes: usize,
    max_m: usize,
    max_c: u32,
    checker: F,
) -> Result<Report, OracleError>
where
    F: Fn(&Tree, &NormalFormC2) -> Result<bool, SemanticsError>,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = Report { cases: 0, disagreements: Vec::new() };
    for _ in 0..cases {
        let phi = random_nf_c2(&mut rng, sig, max_m, max_c);
        let t = random_tree(&mut rng, sig, max_nodes);
        let expected = model_check_sentence(&t, &phi.to_formula())?;
        let got = checker(&t, &phi)?;
        report.cases += 1;
        if got != expected {
            let mut line = String::new();
            let _ = write!(
                line,
                "tree {:?} formula {} expected {} got {}",
                t.save(),
                phi.to_formula(),
                expected,
                got
            );
            report.disagreements.push(line);
        }
    }
    Ok(report)
}

/// Pointwise comparison of two formulas over every labeling of every frame
/// up to a size limit.
pub fn equivalent_on_trees(
    a: &Formula,
    b: &Formula,
    sig: &Signature,
    max_nodes: usize,
    budget: u64,
) -> Result<bool, OracleError> {
    let free = a.free_vars();
    for frame in enumerate_frames(max_nodes) {
        for t in enumerate_labelings(&frame, sig, budget)? {
            if free.is_empty() {
                if model_check_sentence(&t, a)? != model_check_sentence(&t, b)? {
                    return Ok(false);
                }
            } else {
                for v in t.nodes() {
                    let (x, y) = if free.contains(&Var::X) {
                        (Some(v), None)
                    } else {
                        (None, Some(v))
                    };
                    if model_check(&t, a, x, y)? != model_check(&t, b, x, y)? {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

/// Frame-equisatisfiability of two sentences over their respective
/// signatures, checked on every frame up to a size limit.
pub fn frames_equisatisfiable(
    a: &Formula,
    sig_a: &Signature,
    b: &Formula,
    sig_b: &Signature,
    max_nodes: usize,
) -> Result<bool, OracleError> {
    for frame in enumerate_frames(max_nodes) {
        let sa = ground_sat(&frame, sig_a, a)?.is_some();
        let sb = ground_sat(&frame, sig_b, b)?.is_some();
        if sa != sb {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;
    use crate::semantics::check_via_types;

    #[test]
    fn frame_counts_are_catalan() {
        // Sizes 1..=6 contribute 1, 1, 2, 5, 14, 42 shapes.
        assert_eq!(enumerate_frames(1).len(), 1);
        assert_eq!(enumerate_frames(3).len(), 4);
        assert_eq!(enumerate_frames(4).len(), 9);
        assert_eq!(enumerate_frames(6).len(), 65);
        // Deterministic order.
        let a: Vec<String> = enumerate_frames(4).iter().map(|t| t.save()).collect();
        let b: Vec<String> = enumerate_frames(4).iter().map(|t| t.save()).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn labeling_counts_and_budget() {
        let frame = Tree::new(vec![None, Some(0)]).unwrap();
        let sig_u = Signature::new(["A"], Vec::<String>::new()).unwrap();
        assert_eq!(enumerate_labelings(&frame, &sig_u, 100).unwrap().count(), 4);
        let sig_ub = Signature::new(["A"], ["R"]).unwrap();
        assert_eq!(enumerate_labelings(&frame, &sig_ub, 100).unwrap().count(), 64);
        let sig_none = Signature::new(Vec::<String>::new(), Vec::<String>::new()).unwrap();
        assert_eq!(enumerate_labelings(&frame, &sig_none, 100).unwrap().count(), 1);
        assert!(matches!(
            enumerate_labelings(&frame, &sig_ub, 10),
            Err(OracleError::Budget(64, 10))
        ));
    }

    #[test]
    fn oracle_finds_the_four_node_star() {
        let sig = Signature::new(Vec::<String>::new(), Vec::<String>::new()).unwrap();
        let f = parse("(exists x (count>= 3 y (descendant x y)))", &sig).unwrap();
        match oracle_sat(&f, &sig, 4, 1 << 20).unwrap() {
            OracleVerdict::Sat(t) => {
                assert_eq!(t.len(), 4);
                assert!(model_check_sentence(&t, &f).unwrap());
            }
            v => panic!("expected SAT, got {v:?}"),
        }
        assert_eq!(
            oracle_sat(&f, &sig, 3, 1 << 20).unwrap(),
            OracleVerdict::NoModelUpTo(3)
        );
        let f = Formula::False;
        assert_eq!(
            oracle_sat(&f, &sig, 3, 1 << 20).unwrap(),
            OracleVerdict::NoModelUpTo(3)
        );
    }

    #[test]
    fn ground_sat_agrees_with_exhaustive_labeling() {
        let sig = Signature::new(["A"], Vec::<String>::new()).unwrap();
        let formulas = [
            "(exists x (A x))",
            "(forall x (A x))",
            "(forall x (implies (A x) (exists y (and (child x y) (not (A y))))))",
            "(and (exists x (A x)) (forall x (not (A x))))",
            "(count= 2 x (A x))",
            "(forall x (forall y (implies (and (A x) (A y)) (= x y))))",
        ];
        for frame in enumerate_frames(4) {
            for text in formulas {
                let f = parse(text, &sig).unwrap();
                let brute = enumerate_labelings(&frame, &sig, 1 << 20)
                    .unwrap()
                    .any(|t| model_check_sentence(&t, &f).unwrap());
                let via_solver = ground_sat(&frame, &sig, &f).unwrap();
                assert_eq!(via_solver.is_some(), brute, "{text} on {}", frame.save());
            }
        }
    }

    #[test]
    fn ground_sat_handles_binary_symbols() {
        let sig = Signature::new(["A"], ["R"]).unwrap();
        let frame = Tree::new(vec![None, Some(0), Some(0)]).unwrap();
        let f = parse(
            "(and (exists x (R x x)) (forall x (forall y (implies (R x y) (R y x)))))",
            &sig,
        )
        .unwrap();
        let t = ground_sat(&frame, &sig, &f).unwrap().expect("satisfiable");
        assert!(model_check_sentence(&t, &f).unwrap());
        let contradiction = parse("(and (exists x (R x x)) (forall x (not (R x x))))", &sig).unwrap();
        assert!(ground_sat(&frame, &sig, &contradiction).unwrap().is_none());
    }

    #[test]
    fn generators_are_deterministic_per_seed() {
        let sig = Signature::new(["A", "B"], Vec::<String>::new()).unwrap();
        let mut r1 = ChaCha8Rng::seed_from_u64(7);
        let mut r2 = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            assert_eq!(
                random_tree(&mut r1, &sig, 6).save(),
                random_tree(&mut r2, &sig, 6).save()
            );
            assert_eq!(
                random_nf_c2(&mut r1, &sig, 3, 3).to_formula(),
                random_nf_c2(&mut r2, &sig, 3, 3).to_formula()
            );
        }
    }

    #[test]
    fn differential_harness_is_clean_and_sensitive() {
        let sig = Signature::new(["A"], Vec::<String>::new()).unwrap();
        let clean = differential_nf_c2(42, 60, &sig, 6, 2, 2, |t, phi| {
            check_via_types(t, phi)
        })
        .unwrap();
        assert_eq!(clean.cases, 60);
        assert!(clean.clean(), "{:?}", clean.disagreements);
        // A corrupted checker must be caught.
        let broken = differential_nf_c2(42, 60, &sig, 6, 2, 2, |t, phi| {
            Ok(!check_via_types(t, phi)?)
        })
        .unwrap();
        assert!(!broken.clean());
    }

    #[test]
    fn random_trees_round_trip_and_stay_in_bounds() {
        let sig = Signature::new(["A"], ["R"]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..50 {
            let t = random_tree(&mut rng, &sig, 7);
            assert!(t.len() >= 1 && t.len() <= 7);
            assert_eq!(Tree::load(&t.save()).unwrap().save(), t.save());
        }
    }
}
