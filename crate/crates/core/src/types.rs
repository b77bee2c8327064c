//! Atomic 1-types and 2-types over a signature, and multisets of 1-types with
//! counting saturated at a threshold k.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::formula::{Formula, Nav, OrderFormula, Signature, Var};

/// A count that is either exact or saturated ("more than the threshold").
/// `Inf` is absorbing under addition and compares greater than every finite
/// value, so `Inf >= c` holds and `Inf <= c` fails for all finite bounds c.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Count {
    Fin(u32),
    Inf,
}

impl Count {
    pub const ZERO: Count = Count::Fin(0);

    pub fn is_zero(self) -> bool {
        self == Count::Fin(0)
    }

    pub fn add(self, other: Count) -> Count {
        match (self, other) {
            (Count::Inf, _) | (_, Count::Inf) => Count::Inf,
            (Count::Fin(a), Count::Fin(b)) => Count::Fin(a.saturating_add(b)),
        }
    }

    pub fn min(self, other: Count) -> Count {
        std::cmp::min(self, other)
    }

    /// Comparison against a finite bound.
    pub fn geq(self, bound: u32) -> bool {
        match self {
            Count::Inf => true,
            Count::Fin(a) => a >= bound,
        }
    }

    pub fn leq(self, bound: u32) -> bool {
        match self {
            Count::Inf => false,
            Count::Fin(a) => a <= bound,
        }
    }
}

impl fmt::Display for Count {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Count::Fin(n) => write!(f, "{}", n),
            Count::Inf => write!(f, "inf"),
        }
    }
}

/// Saturate a count at threshold k: values up to k stay exact, anything
/// larger becomes `Inf`.
pub fn cut(k: u32, c: Count) -> Count {
    match c {
        Count::Inf => Count::Inf,
        Count::Fin(n) if n <= k => Count::Fin(n),
        Count::Fin(_) => Count::Inf,
    }
}

pub fn cut_nat(k: u32, n: usize) -> Count {
    if n as u64 <= k as u64 {
        Count::Fin(n as u32)
    } else {
        Count::Inf
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TypeError {
    #[error("component length does not match signature")]
    LengthMismatch,
    #[error("multiset thresholds differ: {0} vs {1}")]
    ThresholdMismatch(u32, u32),
    #[error("two-type order component must not be Equal")]
    EqualOrder,
}

/// Atomic 1-type: which unary predicates hold of a node and which free binary
/// predicates hold reflexively of it. Components are aligned with the
/// signature's declared symbol order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OneType {
    pub unary: Vec<bool>,
    pub loops: Vec<bool>,
}

impl OneType {
    pub fn new(sig: &Signature, unary: Vec<bool>, loops: Vec<bool>) -> Result<OneType, TypeError> {
        if unary.len() != sig.unary.len() || loops.len() != sig.binary.len() {
            return Err(TypeError::LengthMismatch);
        }
        Ok(OneType { unary, loops })
    }

    /// The i-th type in canonical order: the combined (unary ++ loops) bit
    /// string read big-endian, first declared symbol most significant.
    pub fn from_index(sig: &Signature, idx: usize) -> OneType {
        let n = sig.unary.len() + sig.binary.len();
        let mut bits = Vec::with_capacity(n);
        for j in 0..n {
            bits.push((idx >> (n - 1 - j)) & 1 == 1);
        }
        let loops = bits.split_off(sig.unary.len());
        OneType { unary: bits, loops }
    }

    pub fn to_index(&self, sig: &Signature) -> usize {
        let mut idx = 0usize;
        for b in self.unary.iter().chain(self.loops.iter()) {
            idx = (idx << 1) | (*b as usize);
        }
        debug_assert_eq!(self.unary.len(), sig.unary.len());
        idx
    }

    pub fn has_unary(&self, sig: &Signature, name: &str) -> bool {
        sig.unary
            .iter()
            .position(|s| s == name)
            .map(|i| self.unary[i])
            .unwrap_or(false)
    }

    pub fn has_loop(&self, sig: &Signature, name: &str) -> bool {
        sig.binary
            .iter()
            .position(|s| s == name)
            .map(|i| self.loops[i])
            .unwrap_or(false)
    }

    pub fn describe(&self, sig: &Signature) -> String {
        let mut parts: Vec<String> = Vec::new();
        for (i, s) in sig.unary.iter().enumerate() {
            if self.unary[i] {
                parts.push(s.clone());
            }
        }
        for (i, s) in sig.binary.iter().enumerate() {
            if self.loops[i] {
                parts.push(format!("{}(self)", s));
            }
        }
        if parts.is_empty() {
            "{}".to_string()
        } else {
            format!("{{{}}}", parts.join(" "))
        }
    }
}

/// All 1-types over the signature in canonical order;
/// 2^(|unary| + |binary|) of them.
pub fn enumerate_one_types(sig: &Signature) -> Vec<OneType> {
    let n = sig.unary.len() + sig.binary.len();
    assert!(n < usize::BITS as usize, "signature too large to enumerate");
    (0..(1usize << n)).map(|i| OneType::from_index(sig, i)).collect()
}

/// Atomic 2-type of an ordered pair of distinct nodes: the 1-types of both
/// ends, their order relation, and the cross truth values of every free
/// binary predicate in both directions (`cross[i] = (R_i(x,y), R_i(y,x))`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TwoType {
    pub left: OneType,
    pub right: OneType,
    pub order: OrderFormula,
    pub cross: Vec<(bool, bool)>,
}

impl TwoType {
    pub fn new(
        left: OneType,
        right: OneType,
        order: OrderFormula,
        cross: Vec<(bool, bool)>,
    ) -> Result<TwoType, TypeError> {
        if order == OrderFormula::Equal {
            return Err(TypeError::EqualOrder);
        }
        if left.loops.len() != cross.len() || right.loops.len() != cross.len() {
            return Err(TypeError::LengthMismatch);
        }
        Ok(TwoType { left, right, order, cross })
    }

    /// The 2-type of the pair read in the opposite direction. An involution.
    pub fn invert(&self) -> TwoType {
        TwoType {
            left: self.right.clone(),
            right: self.left.clone(),
            order: self.order.invert(),
            cross: self.cross.iter().map(|(a, b)| (*b, *a)).collect(),
        }
    }

    /// The 1-type of one end.
    pub fn restrict(&self, v: Var) -> &OneType {
        match v {
            Var::X => &self.left,
            Var::Y => &self.right,
        }
    }
}

/// Evaluate a quantifier-free formula over the pair (x, y) under a total
/// atomic assignment. Used for entailment checks of the form
/// "alpha(x) and alpha'(y) and theta(x, y) |= chi(x, y)".
pub struct AtomEnv<'a> {
    pub left: &'a OneType,
    pub right: &'a OneType,
    pub order: OrderFormula,
    /// Cross bits per binary symbol; must be empty iff the signature has no
    /// binary symbols. Ignored when `order` is `Equal` (loops are used).
    pub cross: &'a [(bool, bool)],
}

impl<'a> AtomEnv<'a> {
    pub fn from_two_type(t: &'a TwoType) -> AtomEnv<'a> {
        AtomEnv { left: &t.left, right: &t.right, order: t.order, cross: &t.cross }
    }

    /// Both variables denote the same node of 1-type alpha.
    pub fn diagonal(alpha: &'a OneType) -> AtomEnv<'a> {
        AtomEnv { left: alpha, right: alpha, order: OrderFormula::Equal, cross: &[] }
    }

    /// Distinct nodes in the given order over a signature without binary
    /// symbols.
    pub fn pair(left: &'a OneType, right: &'a OneType, order: OrderFormula) -> AtomEnv<'a> {
        debug_assert!(order != OrderFormula::Equal);
        debug_assert!(left.loops.is_empty() && right.loops.is_empty());
        AtomEnv { left, right, order, cross: &[] }
    }

    fn one_type(&self, v: Var) -> &OneType {
        match v {
            Var::X => self.left,
            Var::Y => self.right,
        }
    }

    fn common(&self, sig: &Signature, name: &str, a: Var, b: Var) -> bool {
        let i = match sig.binary.iter().position(|s| s == name) {
            Some(i) => i,
            None => return false,
        };
        if a == b || self.order == OrderFormula::Equal {
            // Same node one way or another: the self-loop bit of that end.
            return self.one_type(a).loops[i];
        }
        match (a, b) {
            (Var::X, Var::Y) => self.cross[i].0,
            (Var::Y, Var::X) => self.cross[i].1,
            _ => unreachable!(),
        }
    }
}

/// Evaluate a quantifier-free formula under an atomic assignment.
pub fn eval_qf(f: &Formula, sig: &Signature, env: &AtomEnv) -> bool {
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Unary(name, v) => env.one_type(*v).has_unary(sig, name),
        Formula::Common(name, a, b) => env.common(sig, name, *a, *b),
        Formula::Nav(nav, a, b) => {
            if a == b || env.order == OrderFormula::Equal {
                false
            } else {
                env.order.nav_truth(*nav, *a == Var::Y)
            }
        }
        Formula::Equal(a, b) => a == b || env.order == OrderFormula::Equal,
        Formula::Not(a) => !eval_qf(a, sig, env),
        Formula::And(a, b) => eval_qf(a, sig, env) && eval_qf(b, sig, env),
        Formula::Or(a, b) => eval_qf(a, sig, env) || eval_qf(b, sig, env),
        Formula::Implies(a, b) => !eval_qf(a, sig, env) || eval_qf(b, sig, env),
        Formula::Exists(..) | Formula::Forall(..) | Formula::Count(..) => {
            panic!("eval_qf applied to a quantified formula")
        }
    }
}

/// Check whether a navigational nav/equality atom holds between a pair in the
/// given order relation; `Nav(n, a, b)` with `a == b` is always false.
pub fn nav_atom_holds(order: OrderFormula, nav: Nav, a: Var, b: Var) -> bool {
    if a == b || order == OrderFormula::Equal {
        false
    } else {
        order.nav_truth(nav, a == Var::Y)
    }
}

/// Multiset of 1-types with multiplicities saturated at threshold k.
/// Zero entries are never stored.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct KMultiset {
    k: u32,
    counts: BTreeMap<OneType, Count>,
}

impl KMultiset {
    pub fn empty(k: u32) -> KMultiset {
        KMultiset { k, counts: BTreeMap::new() }
    }

    /// The singleton {alpha}; its stored multiplicity is cut_k(1), so it is
    /// `Inf` when k = 0.
    pub fn singleton(k: u32, alpha: OneType) -> KMultiset {
        let mut m = KMultiset::empty(k);
        m.add(alpha, Count::Fin(1));
        m
    }

    pub fn threshold(&self) -> u32 {
        self.k
    }

    pub fn get(&self, alpha: &OneType) -> Count {
        self.counts.get(alpha).copied().unwrap_or(Count::ZERO)
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn support_len(&self) -> usize {
        self.counts.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&OneType, Count)> {
        self.counts.iter().map(|(a, c)| (a, *c))
    }

    /// Add occurrences of a 1-type, saturating at the threshold.
    pub fn add(&mut self, alpha: OneType, c: Count) {
        if c.is_zero() {
            return;
        }
        let cur = self.get(&alpha);
        let new = cut(self.k, cur.add(c));
        self.counts.insert(alpha, new);
    }

    pub fn set(&mut self, alpha: OneType, c: Count) {
        let c = cut(self.k, c);
        if c.is_zero() {
            self.counts.remove(&alpha);
        } else {
            self.counts.insert(alpha, c);
        }
    }

    /// Pointwise saturated sum.
    pub fn union(&self, other: &KMultiset) -> Result<KMultiset, TypeError> {
        if self.k != other.k {
            return Err(TypeError::ThresholdMismatch(self.k, other.k));
        }
        let mut out = self.clone();
        for (a, c) in other.iter() {
            out.add(a.clone(), c);
        }
        Ok(out)
    }

    /// Pointwise minimum.
    pub fn intersect(&self, other: &KMultiset) -> Result<KMultiset, TypeError> {
        if self.k != other.k {
            return Err(TypeError::ThresholdMismatch(self.k, other.k));
        }
        let mut out = KMultiset::empty(self.k);
        for (a, c) in self.iter() {
            let m = c.min(other.get(a));
            if !m.is_zero() {
                out.counts.insert(a.clone(), m);
            }
        }
        Ok(out)
    }

    /// Exactly one 1-type occurs, with the saturated multiplicity of a single
    /// occurrence.
    pub fn is_singleton(&self) -> bool {
        self.counts.len() == 1
            && self.counts.values().next() == Some(&cut(self.k, Count::Fin(1)))
    }

    pub fn sole_member(&self) -> Option<&OneType> {
        if self.counts.len() == 1 {
            self.counts.keys().next()
        } else {
            None
        }
    }

    /// Total saturated cardinality.
    pub fn total(&self) -> Count {
        let mut t = Count::ZERO;
        for (_, c) in self.iter() {
            t = t.add(c);
        }
        cut(self.k, t)
    }
}
