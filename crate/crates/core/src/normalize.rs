//! Normal forms for the two fragments and the transformation into them.
//!
//! A counting-free sentence in normal form is a universally quantified
//! quantifier-free core plus a list of witness conjuncts, each demanding, for
//! every node satisfying a unary guard, a witness in one fixed order relation.
//! A counting sentence in normal form is the universal core plus threshold
//! conjuncts `forall x count(op, C, y, chi_i)`.

use std::collections::BTreeSet;
use std::rc::Rc;

use thiserror::Error;

use crate::formula::{CountOp, Formula, OrderFormula, Signature, Var};
use crate::translate;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NormalizeError {
    #[error("input must be a sentence (free variables: {0})")]
    NotSentence(String),
    #[error("counting quantifiers are not part of this fragment")]
    CountingNotAllowed,
    #[error("free binary predicates are not part of this fragment")]
    BinaryNotAllowed,
    #[error("core must be quantifier-free")]
    CoreNotQf,
    #[error("witness constraint must be quantifier-free")]
    WitnessNotQf,
    #[error("guard `{0}` is not a unary symbol of the signature")]
    BadGuard(String),
    #[error(transparent)]
    Translate(#[from] translate::TranslateError),
}

/// One witness conjunct of the counting-free normal form:
/// `forall x (lambda(x) -> exists y (theta(x,y) and chi(x,y)))`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Fo2Conjunct {
    pub guard: String,
    pub theta: OrderFormula,
    pub chi: Formula,
}

/// Counting-free normal form. Free binary predicates are allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalFormFo2 {
    pub sig: Signature,
    pub chi: Formula,
    pub conjuncts: Vec<Fo2Conjunct>,
}

/// One threshold conjunct of the counting normal form:
/// `forall x count(op, bound, y, chi(x,y))`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct C2Conjunct {
    pub op: CountCmp,
    pub bound: u32,
    pub chi: Formula,
}

/// The two comparison directions a threshold conjunct may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CountCmp {
    Geq,
    Leq,
}

/// Counting normal form. The fragment with counting has no free binary
/// predicates, so the signature must be purely unary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalFormC2 {
    pub sig: Signature,
    pub chi: Formula,
    pub conjuncts: Vec<C2Conjunct>,
}

fn check_pair_qf(f: &Formula) -> Result<(), NormalizeError> {
    if !f.is_quantifier_free() {
        return Err(NormalizeError::CoreNotQf);
    }
    Ok(())
}

impl NormalFormFo2 {
    pub fn new(
        sig: Signature,
        chi: Formula,
        conjuncts: Vec<Fo2Conjunct>,
    ) -> Result<NormalFormFo2, NormalizeError> {
        check_pair_qf(&chi)?;
        for c in &conjuncts {
            if !c.chi.is_quantifier_free() {
                return Err(NormalizeError::WitnessNotQf);
            }
            if !sig.has_unary(&c.guard) {
                return Err(NormalizeError::BadGuard(c.guard.clone()));
            }
        }
        Ok(NormalFormFo2 { sig, chi, conjuncts })
    }

    /// Number of witness conjuncts.
    pub fn m(&self) -> usize {
        self.conjuncts.len()
    }

    /// The whole normal form as a single sentence.
    pub fn to_formula(&self) -> Formula {
        let core = Formula::forall(
            Var::X,
            Formula::forall(Var::Y, self.chi.clone()),
        );
        let rest = self.conjuncts.iter().map(|c| {
            Formula::forall(
                Var::X,
                Formula::implies(
                    Formula::Unary(c.guard.clone(), Var::X),
                    Formula::exists(
                        Var::Y,
                        Formula::and(c.theta.defining_formula(), c.chi.clone()),
                    ),
                ),
            )
        });
        Formula::and_all(std::iter::once(core).chain(rest))
    }
}

impl NormalFormC2 {
    pub fn new(
        sig: Signature,
        chi: Formula,
        conjuncts: Vec<C2Conjunct>,
    ) -> Result<NormalFormC2, NormalizeError> {
        if !sig.binary.is_empty() {
            return Err(NormalizeError::BinaryNotAllowed);
        }
        check_pair_qf(&chi)?;
        for c in &conjuncts {
            if !c.chi.is_quantifier_free() {
                return Err(NormalizeError::WitnessNotQf);
            }
        }
        Ok(NormalFormC2 { sig, chi, conjuncts })
    }

    pub fn m(&self) -> usize {
        self.conjuncts.len()
    }

    /// The counting threshold: the largest bound of any conjunct.
    pub fn c(&self) -> u32 {
        self.conjuncts.iter().map(|c| c.bound).max().unwrap_or(0)
    }

    pub fn to_formula(&self) -> Formula {
        let core = Formula::forall(
            Var::X,
            Formula::forall(Var::Y, self.chi.clone()),
        );
        let rest = self.conjuncts.iter().map(|c| {
            let op = match c.op {
                CountCmp::Geq => CountOp::Geq,
                CountCmp::Leq => CountOp::Leq,
            };
            Formula::forall(
                Var::X,
                Formula::Count(op, c.bound, Var::Y, c.chi.clone().rc()),
            )
        });
        Formula::and_all(std::iter::once(core).chain(rest))
    }
}

/// Split a sentence into its outermost conjunction parts.
fn conjunction_parts(f: &Formula) -> Vec<Formula> {
    match f {
        Formula::And(a, b) => {
            let mut out = conjunction_parts(a);
            out.extend(conjunction_parts(b));
            out
        }
        other => vec![other.clone()],
    }
}

/// Recognize `(forall x (forall y chi))` (or with y outside) with chi
/// quantifier-free, yielding chi over (x, y).
fn match_universal_core(f: &Formula) -> Option<Formula> {
    if let Formula::Forall(v1, inner) = f {
        if let Formula::Forall(v2, chi) = &**inner {
            if v1 != v2 && chi.is_quantifier_free() {
                let chi = (**chi).clone();
                return Some(if *v1 == Var::X { chi } else { chi.swap_vars() });
            }
        }
    }
    None
}

/// Recognize the exact shape of a counting-free witness conjunct.
fn match_fo2_conjunct(f: &Formula, sig: &Signature) -> Option<Fo2Conjunct> {
    let Formula::Forall(Var::X, body) = f else { return None };
    let Formula::Implies(guard, ex) = &**body else { return None };
    let Formula::Unary(name, Var::X) = &**guard else { return None };
    if !sig.has_unary(name) {
        return None;
    }
    let Formula::Exists(Var::Y, inner) = &**ex else { return None };
    let Formula::And(theta_part, chi) = &**inner else { return None };
    if !chi.is_quantifier_free() {
        return None;
    }
    let theta = OrderFormula::ALL
        .iter()
        .copied()
        .find(|o| o.defining_formula() == **theta_part)?;
    Some(Fo2Conjunct { guard: name.clone(), theta, chi: (**chi).clone() })
}

/// Recognize simple per-node quantified conjuncts that map directly onto
/// counting normal form without any fresh symbols.
fn match_c2_conjuncts(f: &Formula) -> Option<Vec<C2Conjunct>> {
    let Formula::Forall(Var::X, body) = f else { return None };
    match &**body {
        Formula::Count(op, n, Var::Y, chi) if chi.is_quantifier_free() => {
            let chi = (**chi).clone();
            Some(match op {
                CountOp::Geq => vec![C2Conjunct { op: CountCmp::Geq, bound: *n, chi }],
                CountOp::Leq => vec![C2Conjunct { op: CountCmp::Leq, bound: *n, chi }],
                CountOp::Eq => vec![
                    C2Conjunct { op: CountCmp::Geq, bound: *n, chi: chi.clone() },
                    C2Conjunct { op: CountCmp::Leq, bound: *n, chi },
                ],
            })
        }
        Formula::Exists(Var::Y, chi) if chi.is_quantifier_free() => {
            Some(vec![C2Conjunct { op: CountCmp::Geq, bound: 1, chi: (**chi).clone() }])
        }
        _ => None,
    }
}

/// Negation normal form with counting comparisons normalized: negations are
/// pushed to atoms, implications expanded, `count=` split, and negated
/// counting rewritten into the opposite comparison.
pub fn nnf(f: &Formula) -> Formula {
    fn pos(f: &Formula) -> Formula {
        match f {
            Formula::True
            | Formula::False
            | Formula::Unary(..)
            | Formula::Common(..)
            | Formula::Nav(..)
            | Formula::Equal(..) => f.clone(),
            Formula::Not(a) => neg(a),
            Formula::And(a, b) => Formula::and(pos(a), pos(b)),
            Formula::Or(a, b) => Formula::or(pos(a), pos(b)),
            Formula::Implies(a, b) => Formula::or(neg(a), pos(b)),
            Formula::Exists(v, a) => Formula::exists(*v, pos(a)),
            Formula::Forall(v, a) => Formula::forall(*v, pos(a)),
            Formula::Count(CountOp::Eq, n, v, a) => Formula::and(
                pos(&Formula::Count(CountOp::Geq, *n, *v, a.clone())),
                pos(&Formula::Count(CountOp::Leq, *n, *v, a.clone())),
            ),
            Formula::Count(CountOp::Geq, 0, _, _) => Formula::True,
            Formula::Count(op, n, v, a) => Formula::Count(*op, *n, *v, pos(a).rc()),
        }
    }
    fn neg(f: &Formula) -> Formula {
        match f {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Unary(..)
            | Formula::Common(..)
            | Formula::Nav(..)
            | Formula::Equal(..) => Formula::not(f.clone()),
            Formula::Not(a) => pos(a),
            Formula::And(a, b) => Formula::or(neg(a), neg(b)),
            Formula::Or(a, b) => Formula::and(neg(a), neg(b)),
            Formula::Implies(a, b) => Formula::and(pos(a), neg(b)),
            Formula::Exists(v, a) => Formula::forall(*v, neg(a)),
            Formula::Forall(v, a) => Formula::exists(*v, neg(a)),
            Formula::Count(CountOp::Eq, n, v, a) => Formula::or(
                neg(&Formula::Count(CountOp::Geq, *n, *v, a.clone())),
                neg(&Formula::Count(CountOp::Leq, *n, *v, a.clone())),
            ),
            Formula::Count(CountOp::Geq, 0, _, _) => Formula::False,
            Formula::Count(CountOp::Geq, n, v, a) => {
                pos(&Formula::Count(CountOp::Leq, *n - 1, *v, a.clone()))
            }
            Formula::Count(CountOp::Leq, n, v, a) => {
                pos(&Formula::Count(CountOp::Geq, *n + 1, *v, a.clone()))
            }
        }
    }
    pos(f)
}

/// Allocates fresh unary predicate names that cannot collide with the base
/// signature or each other.
struct FreshNames {
    taken: BTreeSet<String>,
    counter: usize,
    out: Vec<String>,
}

impl FreshNames {
    fn new(sig: &Signature) -> FreshNames {
        FreshNames {
            taken: sig.unary.iter().chain(sig.binary.iter()).cloned().collect(),
            counter: 0,
            out: Vec::new(),
        }
    }

    fn fresh(&mut self, hint: &str) -> String {
        loop {
            let name = format!("_{}{}", hint, self.counter);
            self.counter += 1;
            if self.taken.insert(name.clone()) {
                self.out.push(name.clone());
                return name;
            }
        }
    }
}

/// A witness demand produced by naming: every node satisfying the guard must
/// see some node (anywhere in the tree, itself included) satisfying the
/// demand, read with the guarded node as x and the witness as y.
struct WitnessDemand {
    guard: String,
    body: Formula,
}

/// The quantifier-naming core shared by both normal-form transformations.
///
/// The input must be a counting-free sentence in negation normal form. Every
/// quantified subformula is replaced by a fresh unary predicate of its free
/// variable (or applied to the enclosing subject variable when closed); since
/// all occurrences are positive after NNF, only the forward defining
/// direction is needed. Universal subformulas contribute clauses to the
/// universal core, existential subformulas contribute witness demands.
struct Namer {
    fresh: FreshNames,
    core: Vec<Formula>,
    demands: Vec<WitnessDemand>,
    /// Shared subformulas are named once.
    cache: std::collections::HashMap<(usize, Var, Var), Formula>,
}

impl Namer {
    fn new(sig: &Signature) -> Namer {
        Namer {
            fresh: FreshNames::new(sig),
            core: Vec::new(),
            demands: Vec::new(),
            cache: std::collections::HashMap::new(),
        }
    }

    /// Canonicalize a quantified body: the bound variable becomes y and the
    /// (possibly absent) free variable becomes x.
    fn canonical(body: &Formula, bound: Var) -> Formula {
        if bound == Var::Y {
            body.clone()
        } else {
            body.swap_vars()
        }
    }

    fn walk(&mut self, f: &Rc<Formula>, subject: Var) -> Formula {
        let key = (Rc::as_ptr(f) as usize, subject, Var::X);
        if let Some(hit) = self.cache.get(&key) {
            return hit.clone();
        }
        let out = self.walk_uncached(f, subject);
        self.cache.insert(key, out.clone());
        out
    }

    fn walk_uncached(&mut self, f: &Rc<Formula>, subject: Var) -> Formula {
        match &**f {
            Formula::True
            | Formula::False
            | Formula::Unary(..)
            | Formula::Common(..)
            | Formula::Nav(..)
            | Formula::Equal(..) => (**f).clone(),
            Formula::Not(a) => Formula::not(self.walk(a, subject)),
            Formula::And(a, b) => {
                Formula::and(self.walk(a, subject), self.walk(b, subject))
            }
            Formula::Or(a, b) => Formula::or(self.walk(a, subject), self.walk(b, subject)),
            Formula::Implies(a, b) => {
                Formula::implies(self.walk(a, subject), self.walk(b, subject))
            }
            Formula::Exists(v, body) => {
                let inner = self.walk(body, *v).rc();
                let canon = Self::canonical(&inner, *v);
                let free = canon.free_vars();
                let name = self.fresh.fresh("e");
                let site = if free.contains(&Var::X) {
                    // Genuine dependence on the other variable.
                    debug_assert!(*v != subject || !f.free_vars().contains(&subject));
                    Formula::Unary(name.clone(), v.other())
                } else {
                    Formula::Unary(name.clone(), subject)
                };
                self.demands.push(WitnessDemand {
                    guard: name,
                    body: if free.contains(&Var::X) {
                        canon
                    } else {
                        // Closed subformula: the demanded witness property
                        // does not mention the demanding node.
                        canon
                    },
                });
                site
            }
            Formula::Forall(v, body) => {
                let inner = self.walk(body, *v).rc();
                let canon = Self::canonical(&inner, *v);
                let free = canon.free_vars();
                let name = self.fresh.fresh("a");
                if free.contains(&Var::X) {
                    // forall y body(x, y), named over x.
                    self.core.push(Formula::implies(
                        Formula::Unary(name.clone(), Var::X),
                        canon,
                    ));
                    Formula::Unary(name, v.other())
                } else {
                    // Closed: if the marker holds anywhere, the body holds of
                    // every node.
                    self.core.push(Formula::implies(
                        Formula::Unary(name.clone(), Var::X),
                        canon,
                    ));
                    Formula::Unary(name, subject)
                }
            }
            Formula::Count(..) => {
                unreachable!("naming runs on counting-free input")
            }
        }
    }
}

/// Outcome of the shared naming pass.
struct Named {
    fresh: Vec<String>,
    core: Vec<Formula>,
    demands: Vec<WitnessDemand>,
}

fn name_sentence(sentence: &Formula, sig: &Signature) -> Named {
    let mut namer = Namer::new(sig);
    let g = nnf(sentence);
    let top = namer.walk(&g.rc(), Var::X);
    // The residue is quantifier-free over at most x; it must hold of every
    // node.
    let top = if top.free_vars().contains(&Var::Y) {
        top.swap_vars()
    } else {
        top
    };
    namer.core.push(top);
    Named { fresh: namer.fresh.out, core: namer.core, demands: namer.demands }
}

/// Simplify a quantifier-free pair formula under a fixed order relation:
/// navigational and equality atoms between x and y become constants.
pub fn specialize_to_order(f: &Formula, theta: OrderFormula) -> Formula {
    match f {
        Formula::True | Formula::False | Formula::Unary(..) | Formula::Common(..) => f.clone(),
        Formula::Nav(nav, a, b) => {
            if a == b || theta == OrderFormula::Equal {
                Formula::False
            } else if theta.nav_truth(*nav, *a == Var::Y) {
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
        Formula::Not(a) => Formula::not(specialize_to_order(a, theta)),
        Formula::And(a, b) => Formula::and(
            specialize_to_order(a, theta),
            specialize_to_order(b, theta),
        ),
        Formula::Or(a, b) => Formula::or(
            specialize_to_order(a, theta),
            specialize_to_order(b, theta),
        ),
        Formula::Implies(a, b) => Formula::implies(
            specialize_to_order(a, theta),
            specialize_to_order(b, theta),
        ),
        Formula::Exists(..) | Formula::Forall(..) | Formula::Count(..) => {
            panic!("specialize_to_order applied to a quantified formula")
        }
    }
}

/// Bring a counting-free sentence into counting-free normal form over an
/// extended purely-unary-enriched signature, satisfiable over exactly the
/// same tree shapes.
pub fn to_nf_fo2(f: &Formula, sig: &Signature) -> Result<NormalFormFo2, NormalizeError> {
    if !f.is_sentence() {
        let vars: Vec<&str> = f.free_vars().into_iter().map(|v| v.name()).collect();
        return Err(NormalizeError::NotSentence(vars.join(" ")));
    }
    if f.has_counting() {
        return Err(NormalizeError::CountingNotAllowed);
    }
    let mut core_parts: Vec<Formula> = Vec::new();
    let mut conjuncts: Vec<Fo2Conjunct> = Vec::new();
    let mut general: Vec<Formula> = Vec::new();
    for part in conjunction_parts(f) {
        if let Some(chi) = match_universal_core(&part) {
            core_parts.push(chi);
        } else if let Some(c) = match_fo2_conjunct(&part, sig) {
            conjuncts.push(c);
        } else {
            general.push(part);
        }
    }
    let mut fresh_all: Vec<String> = Vec::new();
    for part in general {
        let named = name_sentence(&part, &sig.extended_with_unary(&fresh_all));
        core_parts.extend(named.core);
        // Split each witness demand over the possible order relations of the
        // witness; a selector predicate per relation records the choice.
        let ext = sig.extended_with_unary(&fresh_all);
        let mut fresh = FreshNames::new(&ext);
        for n in &named.fresh {
            fresh.taken.insert(n.clone());
        }
        for d in &named.demands {
            let mut selectors: Vec<Formula> = Vec::new();
            for theta in OrderFormula::ALL {
                let body = specialize_to_order(&d.body, theta);
                if body == Formula::False {
                    continue;
                }
                let sel = fresh.fresh("s");
                selectors.push(Formula::Unary(sel.clone(), Var::X));
                if theta == OrderFormula::Equal {
                    // The witness is the node itself: a universal constraint.
                    core_parts.push(Formula::implies(
                        Formula::and(
                            Formula::Unary(sel, Var::X),
                            Formula::Equal(Var::X, Var::Y),
                        ),
                        body,
                    ));
                } else {
                    conjuncts.push(Fo2Conjunct { guard: sel, theta, chi: body });
                }
            }
            core_parts.push(Formula::implies(
                Formula::Unary(d.guard.clone(), Var::X),
                Formula::or_all(selectors),
            ));
        }
        fresh_all.extend(named.fresh);
        fresh_all.extend(fresh.out);
    }
    let sig = sig.extended_with_unary(&fresh_all);
    NormalFormFo2::new(sig, Formula::and_all(core_parts), conjuncts)
}

/// Bring a counting sentence (no free binary predicates) into counting
/// normal form over an extended signature, satisfiable over exactly the same
/// tree shapes. Counting quantifiers that do not already sit in a directly
/// expressible per-node conjunct are first eliminated through the exact
/// counting-to-plain translation.
pub fn to_nf_c2(f: &Formula, sig: &Signature) -> Result<NormalFormC2, NormalizeError> {
    if !f.is_sentence() {
        let vars: Vec<&str> = f.free_vars().into_iter().map(|v| v.name()).collect();
        return Err(NormalizeError::NotSentence(vars.join(" ")));
    }
    if f.has_common_binary() || !sig.binary.is_empty() {
        return Err(NormalizeError::BinaryNotAllowed);
    }
    let mut core_parts: Vec<Formula> = Vec::new();
    let mut conjuncts: Vec<C2Conjunct> = Vec::new();
    let mut general: Vec<Formula> = Vec::new();
    for part in conjunction_parts(f) {
        if let Some(chi) = match_universal_core(&part) {
            core_parts.push(chi);
        } else if let Some(cs) = match_c2_conjuncts(&part) {
            conjuncts.extend(cs);
        } else {
            general.push(part);
        }
    }
    let mut fresh_all: Vec<String> = Vec::new();
    for part in general {
        let ext = sig.extended_with_unary(&fresh_all);
        let plain = translate::translate(&part)?;
        let named = name_sentence(&plain, &ext);
        core_parts.extend(named.core);
        for d in named.demands {
            // Guarded nodes need one witness anywhere; unguarded nodes are
            // padded by counting themselves.
            let guard = Formula::Unary(d.guard, Var::X);
            let chi = Formula::or(
                Formula::and(guard.clone(), d.body),
                Formula::and(Formula::not(guard), Formula::Equal(Var::X, Var::Y)),
            );
            conjuncts.push(C2Conjunct { op: CountCmp::Geq, bound: 1, chi });
        }
        fresh_all.extend(named.fresh);
    }
    let sig = sig.extended_with_unary(&fresh_all);
    NormalFormC2::new(sig, Formula::and_all(core_parts), conjuncts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    fn sig() -> Signature {
        Signature::new(["A", "B"], Vec::<String>::new()).unwrap()
    }

    #[test]
    fn universal_core_is_fixpoint() {
        let s = sig();
        let f = parse("(forall x (forall y (implies (child x y) (A y))))", &s).unwrap();
        let nf = to_nf_fo2(&f, &s).unwrap();
        assert_eq!(nf.m(), 0);
        assert_eq!(nf.sig, s);
        assert_eq!(nf.chi, parse("(implies (child x y) (A y))", &s).unwrap());
        let nfc = to_nf_c2(&f, &s).unwrap();
        assert_eq!(nfc.m(), 0);
        assert_eq!(nfc.chi, nf.chi);
    }

    #[test]
    fn normal_form_input_reproduced_structurally() {
        let s = sig();
        let text = "(and (forall x (forall y (implies (descendant x y) (not (B y))))) \
                    (forall x (implies (A x) (exists y (and (child x y) (B y))))))";
        let f = parse(text, &s).unwrap();
        let nf = to_nf_fo2(&f, &s).unwrap();
        assert_eq!(nf.sig, s);
        assert_eq!(nf.m(), 1);
        assert_eq!(nf.conjuncts[0].guard, "A");
        assert_eq!(nf.conjuncts[0].theta, OrderFormula::Down);
        assert_eq!(nf.conjuncts[0].chi, parse("(B y)", &s).unwrap());
    }

    #[test]
    fn count_eq_splits_into_two_conjuncts() {
        let s = sig();
        let f = parse("(forall x (count= 2 y (child x y)))", &s).unwrap();
        let nf = to_nf_c2(&f, &s).unwrap();
        assert_eq!(nf.m(), 2);
        assert_eq!(nf.conjuncts[0].op, CountCmp::Geq);
        assert_eq!(nf.conjuncts[0].bound, 2);
        assert_eq!(nf.conjuncts[1].op, CountCmp::Leq);
        assert_eq!(nf.conjuncts[1].bound, 2);
        assert_eq!(nf.c(), 2);
    }

    #[test]
    fn nnf_pushes_negation_through_counting() {
        let s = sig();
        let f = parse("(not (count>= 3 y (A y)))", &s).unwrap();
        assert_eq!(nnf(&f), parse("(count<= 2 y (A y))", &s).unwrap());
        let f = parse("(not (count<= 3 y (A y)))", &s).unwrap();
        assert_eq!(nnf(&f), parse("(count>= 4 y (A y))", &s).unwrap());
        let f = parse("(not (forall x (exists y (child x y))))", &s).unwrap();
        assert_eq!(
            nnf(&f),
            parse("(exists x (forall y (not (child x y))))", &s).unwrap()
        );
    }

    #[test]
    fn specialize_examples() {
        let s = sig();
        let f = parse("(and (child x y) (A y))", &s).unwrap();
        assert_eq!(
            specialize_to_order(&f, OrderFormula::Down),
            parse("(A y)", &s).unwrap()
        );
        assert_eq!(specialize_to_order(&f, OrderFormula::Up), Formula::False);
        let g = parse("(= x y)", &s).unwrap();
        assert_eq!(specialize_to_order(&g, OrderFormula::Free), Formula::False);
        assert_eq!(specialize_to_order(&g, OrderFormula::Equal), Formula::True);
    }

    #[test]
    fn fo2_output_shape_is_valid() {
        let s = sig();
        let f = parse("(exists x (A x))", &s).unwrap();
        let nf = to_nf_fo2(&f, &s).unwrap();
        // Fresh symbols extend the signature; every conjunct guard is unary
        // and every part is quantifier-free.
        assert!(nf.sig.unary.len() > s.unary.len());
        assert!(nf.chi.is_quantifier_free());
        for c in &nf.conjuncts {
            assert!(nf.sig.has_unary(&c.guard));
            assert!(c.chi.is_quantifier_free());
            assert!(c.theta != OrderFormula::Equal);
        }
    }

    #[test]
    fn rejects_non_sentence_and_wrong_fragment() {
        let s = Signature::new(["A"], ["R"]).unwrap();
        let f = parse("(A x)", &s).unwrap();
        assert!(matches!(to_nf_fo2(&f, &s), Err(NormalizeError::NotSentence(_))));
        let f = parse("(forall x (count>= 1 y (A y)))", &s).unwrap();
        assert!(matches!(
            to_nf_fo2(&f, &s),
            Err(NormalizeError::CountingNotAllowed)
        ));
        let f = parse("(forall x (exists y (R x y)))", &s).unwrap();
        assert!(matches!(to_nf_c2(&f, &s), Err(NormalizeError::BinaryNotAllowed)));
    }

    #[test]
    fn outputs_preserve_frame_satisfiability() {
        let s = Signature::new(["A"], Vec::<String>::new()).unwrap();
        let texts = [
            "(exists x (A x))",
            "(forall x (exists y (or (child x y) (next x y))))",
            "(exists x (and (A x) (forall y (implies (child x y) (not (A y))))))",
            "(not (exists x (and (A x) (exists y (and (descendant x y) (A y))))))",
        ];
        for text in texts {
            let f = parse(text, &s).unwrap();
            let nf = to_nf_fo2(&f, &s).unwrap();
            assert!(
                crate::oracle::frames_equisatisfiable(&f, &s, &nf.to_formula(), &nf.sig, 4)
                    .unwrap(),
                "{text}"
            );
        }
        let counting = [
            "(exists x (count>= 3 y (descendant x y)))",
            "(forall x (count<= 1 y (and (child x y) (A y))))",
            "(exists x (and (A x) (count>= 2 y (following x y))))",
        ];
        for text in counting {
            let f = parse(text, &s).unwrap();
            let nf = to_nf_c2(&f, &s).unwrap();
            assert!(
                crate::oracle::frames_equisatisfiable(&f, &s, &nf.to_formula(), &nf.sig, 4)
                    .unwrap(),
                "{text}"
            );
        }
    }

    #[test]
    fn output_size_stays_quadratic() {
        // The transformation names each quantified subformula once and copies
        // its body into at most the ten order specializations, so output size
        // is bounded by 60 * |f|^2 AST nodes (the constant is generous).
        let s = sig();
        for text in [
            "(exists x (A x))",
            "(exists x (and (A x) (forall y (implies (child x y) (exists x (B x))))))",
            "(forall x (or (A x) (exists y (and (following x y) (not (B y))))))",
            "(not (exists x (and (A x) (exists y (descendant x y)))))",
        ] {
            let f = parse(text, &s).unwrap();
            let nf = to_nf_fo2(&f, &s).unwrap();
            let total: usize =
                nf.chi.size() + nf.conjuncts.iter().map(|c| c.chi.size() + 1).sum::<usize>();
            assert!(
                total <= 60 * f.size() * f.size(),
                "{}: {} > 60*{}^2",
                text,
                total,
                f.size()
            );
        }
    }
}
