//! Formula ASTs over the two-variable navigational vocabulary, their textual
//! s-expression syntax, and relational signatures.

use std::collections::BTreeSet;
use std::fmt;
use std::rc::Rc;

use thiserror::Error;

/// The two object variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    X,
    Y,
}

impl Var {
    pub fn other(self) -> Var {
        match self {
            Var::X => Var::Y,
            Var::Y => Var::X,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::Y => "y",
        }
    }
}

/// Built-in navigational predicates on tree nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Nav {
    /// `child a b`: b is a child of a.
    Child,
    /// `descendant a b`: b is a strict descendant of a.
    Descendant,
    /// `next a b`: b is the immediate next sibling of a.
    NextSibling,
    /// `following a b`: b is a strictly later sibling of a.
    FollowingSibling,
}

impl Nav {
    pub fn keyword(self) -> &'static str {
        match self {
            Nav::Child => "child",
            Nav::Descendant => "descendant",
            Nav::NextSibling => "next",
            Nav::FollowingSibling => "following",
        }
    }
}

/// Comparison attached to a counting quantifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CountOp {
    Geq,
    Leq,
    Eq,
}

impl CountOp {
    pub fn keyword(self) -> &'static str {
        match self {
            CountOp::Geq => "count>=",
            CountOp::Leq => "count<=",
            CountOp::Eq => "count=",
        }
    }
}

/// The ten mutually exclusive order relations a pair of tree nodes can stand
/// in. `Down` reads "y is a child of x", `Right` reads "y is the immediate
/// next sibling of x", the `Deep`/`Far` variants are the non-immediate
/// remainders of the transitive closures, and `Free` covers navigationally
/// unrelated pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OrderFormula {
    Down,
    Up,
    DeepDown,
    DeepUp,
    Right,
    Left,
    FarRight,
    FarLeft,
    Free,
    Equal,
}

impl OrderFormula {
    pub const ALL: [OrderFormula; 10] = [
        OrderFormula::Down,
        OrderFormula::Up,
        OrderFormula::DeepDown,
        OrderFormula::DeepUp,
        OrderFormula::Right,
        OrderFormula::Left,
        OrderFormula::FarRight,
        OrderFormula::FarLeft,
        OrderFormula::Free,
        OrderFormula::Equal,
    ];

    pub fn index(self) -> usize {
        Self::ALL.iter().position(|o| *o == self).unwrap()
    }

    /// Swap the roles of the two nodes: the order of the pair (w, v) given the
    /// order of (v, w). An involution with `Free` and `Equal` as fixed points.
    pub fn invert(self) -> OrderFormula {
        match self {
            OrderFormula::Down => OrderFormula::Up,
            OrderFormula::Up => OrderFormula::Down,
            OrderFormula::DeepDown => OrderFormula::DeepUp,
            OrderFormula::DeepUp => OrderFormula::DeepDown,
            OrderFormula::Right => OrderFormula::Left,
            OrderFormula::Left => OrderFormula::Right,
            OrderFormula::FarRight => OrderFormula::FarLeft,
            OrderFormula::FarLeft => OrderFormula::FarRight,
            OrderFormula::Free => OrderFormula::Free,
            OrderFormula::Equal => OrderFormula::Equal,
        }
    }

    /// Positions in which the pair partner is unique if it exists at all.
    pub fn is_singleton_position(self) -> bool {
        matches!(
            self,
            OrderFormula::Up | OrderFormula::Right | OrderFormula::Left | OrderFormula::Equal
        )
    }

    /// Truth value of the navigational atom `nav(x, y)` (or `nav(y, x)` when
    /// `reversed`) for a pair of nodes standing in this order relation.
    pub fn nav_truth(self, nav: Nav, reversed: bool) -> bool {
        let o = if reversed { self.invert() } else { self };
        match nav {
            Nav::Child => o == OrderFormula::Down,
            Nav::Descendant => matches!(o, OrderFormula::Down | OrderFormula::DeepDown),
            Nav::NextSibling => o == OrderFormula::Right,
            Nav::FollowingSibling => matches!(o, OrderFormula::Right | OrderFormula::FarRight),
        }
    }

    /// The defining quantifier-free formula over the pair (x, y).
    pub fn defining_formula(self) -> Formula {
        use Formula as F;
        let nav = |n, a, b| F::Nav(n, a, b);
        match self {
            OrderFormula::Down => nav(Nav::Child, Var::X, Var::Y),
            OrderFormula::Up => nav(Nav::Child, Var::Y, Var::X),
            OrderFormula::DeepDown => F::and(
                nav(Nav::Descendant, Var::X, Var::Y),
                F::not(nav(Nav::Child, Var::X, Var::Y)),
            ),
            OrderFormula::DeepUp => F::and(
                nav(Nav::Descendant, Var::Y, Var::X),
                F::not(nav(Nav::Child, Var::Y, Var::X)),
            ),
            OrderFormula::Right => nav(Nav::NextSibling, Var::X, Var::Y),
            OrderFormula::Left => nav(Nav::NextSibling, Var::Y, Var::X),
            OrderFormula::FarRight => F::and(
                nav(Nav::FollowingSibling, Var::X, Var::Y),
                F::not(nav(Nav::NextSibling, Var::X, Var::Y)),
            ),
            OrderFormula::FarLeft => F::and(
                nav(Nav::FollowingSibling, Var::Y, Var::X),
                F::not(nav(Nav::NextSibling, Var::Y, Var::X)),
            ),
            OrderFormula::Free => F::and(
                F::not(F::Equal(Var::X, Var::Y)),
                F::and(
                    F::not(nav(Nav::Descendant, Var::X, Var::Y)),
                    F::and(
                        F::not(nav(Nav::Descendant, Var::Y, Var::X)),
                        F::and(
                            F::not(nav(Nav::FollowingSibling, Var::X, Var::Y)),
                            F::not(nav(Nav::FollowingSibling, Var::Y, Var::X)),
                        ),
                    ),
                ),
            ),
            OrderFormula::Equal => F::Equal(Var::X, Var::Y),
        }
    }
}

/// A formula of the two-variable language. Binary connectives are binary, as
/// in the textual grammar; children are reference counted so rewrites can
/// share structure.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    /// A unary predicate applied to a variable.
    Unary(String, Var),
    /// A free (non-navigational) binary predicate.
    Common(String, Var, Var),
    Nav(Nav, Var, Var),
    Equal(Var, Var),
    Not(Rc<Formula>),
    And(Rc<Formula>, Rc<Formula>),
    Or(Rc<Formula>, Rc<Formula>),
    Implies(Rc<Formula>, Rc<Formula>),
    Exists(Var, Rc<Formula>),
    Forall(Var, Rc<Formula>),
    Count(CountOp, u32, Var, Rc<Formula>),
}

impl Formula {
    pub fn rc(self) -> Rc<Formula> {
        Rc::new(self)
    }

    /// Conjunction with unit folding.
    pub fn and(a: Formula, b: Formula) -> Formula {
        match (a, b) {
            (Formula::False, _) | (_, Formula::False) => Formula::False,
            (Formula::True, b) => b,
            (a, Formula::True) => a,
            (a, b) => Formula::And(a.rc(), b.rc()),
        }
    }

    /// Disjunction with unit folding.
    pub fn or(a: Formula, b: Formula) -> Formula {
        match (a, b) {
            (Formula::True, _) | (_, Formula::True) => Formula::True,
            (Formula::False, b) => b,
            (a, Formula::False) => a,
            (a, b) => Formula::Or(a.rc(), b.rc()),
        }
    }

    pub fn not(a: Formula) -> Formula {
        match a {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Not(inner) => (*inner).clone(),
            a => Formula::Not(a.rc()),
        }
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        match (a, b) {
            (Formula::False, _) => Formula::True,
            (Formula::True, b) => b,
            (_, Formula::True) => Formula::True,
            (a, Formula::False) => Formula::not(a),
            (a, b) => Formula::Implies(a.rc(), b.rc()),
        }
    }

    pub fn exists(v: Var, a: Formula) -> Formula {
        match a {
            Formula::False => Formula::False,
            a => Formula::Exists(v, a.rc()),
        }
    }

    pub fn forall(v: Var, a: Formula) -> Formula {
        match a {
            Formula::True => Formula::True,
            a => Formula::Forall(v, a.rc()),
        }
    }

    pub fn and_all<I: IntoIterator<Item = Formula>>(items: I) -> Formula {
        let mut out = Formula::True;
        for f in items {
            out = Formula::and(out, f);
        }
        out
    }

    pub fn or_all<I: IntoIterator<Item = Formula>>(items: I) -> Formula {
        let mut out = Formula::False;
        for f in items {
            out = Formula::or(out, f);
        }
        out
    }

    /// Free variables of the formula.
    pub fn free_vars(&self) -> BTreeSet<Var> {
        fn go(f: &Formula, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
            match f {
                Formula::True | Formula::False => {}
                Formula::Unary(_, v) => {
                    if !bound.contains(v) {
                        out.insert(*v);
                    }
                }
                Formula::Common(_, a, b) | Formula::Nav(_, a, b) | Formula::Equal(a, b) => {
                    for v in [a, b] {
                        if !bound.contains(v) {
                            out.insert(*v);
                        }
                    }
                }
                Formula::Not(a) => go(a, bound, out),
                Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                    go(a, bound, out);
                    go(b, bound, out);
                }
                Formula::Exists(v, a) | Formula::Forall(v, a) | Formula::Count(_, _, v, a) => {
                    bound.push(*v);
                    go(a, bound, out);
                    bound.pop();
                }
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Exchange the two variables everywhere, in both free and bound
    /// occurrences. With only two variables this is a sound renaming.
    pub fn swap_vars(&self) -> Formula {
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Unary(s, v) => Formula::Unary(s.clone(), v.other()),
            Formula::Common(s, a, b) => Formula::Common(s.clone(), a.other(), b.other()),
            Formula::Nav(n, a, b) => Formula::Nav(*n, a.other(), b.other()),
            Formula::Equal(a, b) => Formula::Equal(a.other(), b.other()),
            Formula::Not(a) => Formula::Not(a.swap_vars().rc()),
            Formula::And(a, b) => Formula::And(a.swap_vars().rc(), b.swap_vars().rc()),
            Formula::Or(a, b) => Formula::Or(a.swap_vars().rc(), b.swap_vars().rc()),
            Formula::Implies(a, b) => Formula::Implies(a.swap_vars().rc(), b.swap_vars().rc()),
            Formula::Exists(v, a) => Formula::Exists(v.other(), a.swap_vars().rc()),
            Formula::Forall(v, a) => Formula::Forall(v.other(), a.swap_vars().rc()),
            Formula::Count(op, n, v, a) => {
                Formula::Count(*op, *n, v.other(), a.swap_vars().rc())
            }
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::True
            | Formula::False
            | Formula::Unary(..)
            | Formula::Common(..)
            | Formula::Nav(..)
            | Formula::Equal(..) => true,
            Formula::Not(a) => a.is_quantifier_free(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.is_quantifier_free() && b.is_quantifier_free()
            }
            Formula::Exists(..) | Formula::Forall(..) | Formula::Count(..) => false,
        }
    }

    pub fn has_counting(&self) -> bool {
        match self {
            Formula::Count(..) => true,
            Formula::Not(a) | Formula::Exists(_, a) | Formula::Forall(_, a) => a.has_counting(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.has_counting() || b.has_counting()
            }
            _ => false,
        }
    }

    pub fn has_common_binary(&self) -> bool {
        match self {
            Formula::Common(..) => true,
            Formula::Not(a)
            | Formula::Exists(_, a)
            | Formula::Forall(_, a)
            | Formula::Count(_, _, _, a) => a.has_common_binary(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.has_common_binary() || b.has_common_binary()
            }
            _ => false,
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::True
            | Formula::False
            | Formula::Unary(..)
            | Formula::Common(..)
            | Formula::Nav(..)
            | Formula::Equal(..) => 1,
            Formula::Not(a)
            | Formula::Exists(_, a)
            | Formula::Forall(_, a)
            | Formula::Count(_, _, _, a) => 1 + a.size(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                1 + a.size() + b.size()
            }
        }
    }

    /// Maximum count bound appearing in the formula (0 when counting-free).
    pub fn max_count(&self) -> u32 {
        match self {
            Formula::Count(_, n, _, a) => (*n).max(a.max_count()),
            Formula::Not(a) | Formula::Exists(_, a) | Formula::Forall(_, a) => a.max_count(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.max_count().max(b.max_count())
            }
            _ => 0,
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => write!(f, "true"),
            Formula::False => write!(f, "false"),
            Formula::Unary(s, v) => write!(f, "({} {})", s, v.name()),
            Formula::Common(s, a, b) => write!(f, "({} {} {})", s, a.name(), b.name()),
            Formula::Nav(n, a, b) => write!(f, "({} {} {})", n.keyword(), a.name(), b.name()),
            Formula::Equal(a, b) => write!(f, "(= {} {})", a.name(), b.name()),
            Formula::Not(a) => write!(f, "(not {})", a),
            Formula::And(a, b) => write!(f, "(and {} {})", a, b),
            Formula::Or(a, b) => write!(f, "(or {} {})", a, b),
            Formula::Implies(a, b) => write!(f, "(implies {} {})", a, b),
            Formula::Exists(v, a) => write!(f, "(exists {} {})", v.name(), a),
            Formula::Forall(v, a) => write!(f, "(forall {} {})", v.name(), a),
            Formula::Count(op, n, v, a) => {
                write!(f, "({} {} {} {})", op.keyword(), n, v.name(), a)
            }
        }
    }
}

/// Fragment a formula falls into, judged syntactically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LogicClass {
    /// Counting-free, no free binary predicates.
    PureFo2,
    /// Counting, no free binary predicates.
    C2,
    /// Counting-free with free binary predicates.
    Fo2WithCommonBinary,
    /// Counting with free binary predicates.
    C2WithCommonBinary,
}

pub fn classify(f: &Formula) -> LogicClass {
    match (f.has_counting(), f.has_common_binary()) {
        (false, false) => LogicClass::PureFo2,
        (true, false) => LogicClass::C2,
        (false, true) => LogicClass::Fo2WithCommonBinary,
        (true, true) => LogicClass::C2WithCommonBinary,
    }
}

const RESERVED: [&str; 17] = [
    "true", "false", "and", "or", "not", "implies", "exists", "forall", "=", "child",
    "descendant", "next", "following", "count>=", "count<=", "count=", "x",
];

/// Relational signature: unary label predicates plus free binary predicates.
/// The navigational predicates are built in and never listed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Signature {
    pub unary: Vec<String>,
    pub binary: Vec<String>,
}

impl Signature {
    pub fn new<U, B>(unary: U, binary: B) -> Result<Signature, ParseError>
    where
        U: IntoIterator,
        B: IntoIterator,
        U::Item: Into<String>,
        B::Item: Into<String>,
    {
        let unary: Vec<String> = unary.into_iter().map(Into::into).collect();
        let binary: Vec<String> = binary.into_iter().map(Into::into).collect();
        let mut seen = BTreeSet::new();
        for s in unary.iter().chain(binary.iter()) {
            if s.is_empty() || s.contains(char::is_whitespace) || s.contains('(') || s.contains(')')
            {
                return Err(ParseError::BadSymbolName(s.clone()));
            }
            if RESERVED.contains(&s.as_str()) || s == "y" {
                return Err(ParseError::ReservedSymbolName(s.clone()));
            }
            if !seen.insert(s.clone()) {
                return Err(ParseError::DuplicateSymbol(s.clone()));
            }
        }
        Ok(Signature { unary, binary })
    }

    pub fn empty() -> Signature {
        Signature { unary: Vec::new(), binary: Vec::new() }
    }

    pub fn has_unary(&self, name: &str) -> bool {
        self.unary.iter().any(|s| s == name)
    }

    pub fn has_binary(&self, name: &str) -> bool {
        self.binary.iter().any(|s| s == name)
    }

    /// Parse the two-line textual form: `unary: A B` / `binary: R S`.
    /// Either line may be absent.
    pub fn parse(text: &str) -> Result<Signature, ParseError> {
        let mut unary = Vec::new();
        let mut binary = Vec::new();
        let mut saw_unary = false;
        let mut saw_binary = false;
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix("unary:") {
                if saw_unary {
                    return Err(ParseError::DuplicateSignatureLine("unary"));
                }
                saw_unary = true;
                unary.extend(rest.split_whitespace().map(String::from));
            } else if let Some(rest) = line.strip_prefix("binary:") {
                if saw_binary {
                    return Err(ParseError::DuplicateSignatureLine("binary"));
                }
                saw_binary = true;
                binary.extend(rest.split_whitespace().map(String::from));
            } else {
                return Err(ParseError::BadSignatureLine(line.to_string()));
            }
        }
        Signature::new(unary, binary)
    }

    pub fn save(&self) -> String {
        format!(
            "unary: {}\nbinary: {}\n",
            self.unary.join(" "),
            self.binary.join(" ")
        )
    }

    /// Extend with fresh unary symbols, avoiding collisions deterministically.
    pub fn extended_with_unary(&self, fresh: &[String]) -> Signature {
        let mut out = self.clone();
        out.unary.extend(fresh.iter().cloned());
        out
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: expected {expected}")]
    Syntax { pos: usize, expected: String },
    #[error("unexpected trailing input at byte {0}")]
    TrailingInput(usize),
    #[error("unexpected end of input")]
    UnexpectedEof,
    #[error("unknown symbol `{name}` at byte {pos}")]
    UnknownSymbol { name: String, pos: usize },
    #[error("`{name}` used with wrong arity at byte {pos}")]
    WrongArity { name: String, pos: usize },
    #[error("expected variable x or y, found `{name}` at byte {pos}")]
    BadVariable { name: String, pos: usize },
    #[error("negative count bound at byte {0}")]
    NegativeCount(usize),
    #[error("count bound out of range at byte {0}")]
    CountOutOfRange(usize),
    #[error("invalid symbol name `{0}`")]
    BadSymbolName(String),
    #[error("symbol name `{0}` is reserved")]
    ReservedSymbolName(String),
    #[error("duplicate symbol `{0}` in signature")]
    DuplicateSymbol(String),
    #[error("malformed signature line `{0}`")]
    BadSignatureLine(String),
    #[error("signature declares `{0}:` twice")]
    DuplicateSignatureLine(&'static str),
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    LParen,
    RParen,
    Atom(String),
}

fn lex(text: &str) -> Result<Vec<(Token, usize)>, ParseError> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
        } else if c == '(' {
            out.push((Token::LParen, i));
            i += 1;
        } else if c == ')' {
            out.push((Token::RParen, i));
            i += 1;
        } else {
            let start = i;
            while i < bytes.len() {
                let c = bytes[i] as char;
                if c.is_whitespace() || c == '(' || c == ')' {
                    break;
                }
                i += 1;
            }
            out.push((Token::Atom(text[start..i].to_string()), start));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Token, usize)>,
    pos: usize,
    sig: &'a Signature,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&(Token, usize)> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Result<(Token, usize), ParseError> {
        let t = self.toks.get(self.pos).cloned().ok_or(ParseError::UnexpectedEof)?;
        self.pos += 1;
        Ok(t)
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        match self.next()? {
            (Token::RParen, _) => Ok(()),
            (_, p) => Err(ParseError::Syntax { pos: p, expected: ")".into() }),
        }
    }

    fn var(&mut self) -> Result<Var, ParseError> {
        match self.next()? {
            (Token::Atom(s), p) => match s.as_str() {
                "x" => Ok(Var::X),
                "y" => Ok(Var::Y),
                _ => Err(ParseError::BadVariable { name: s, pos: p }),
            },
            (_, p) => Err(ParseError::BadVariable { name: "(".into(), pos: p }),
        }
    }

    fn nat(&mut self) -> Result<u32, ParseError> {
        match self.next()? {
            (Token::Atom(s), p) => {
                if let Ok(n) = s.parse::<i64>() {
                    if n < 0 {
                        Err(ParseError::NegativeCount(p))
                    } else {
                        u32::try_from(n).map_err(|_| ParseError::CountOutOfRange(p))
                    }
                } else {
                    Err(ParseError::Syntax { pos: p, expected: "natural number".into() })
                }
            }
            (_, p) => Err(ParseError::Syntax { pos: p, expected: "natural number".into() }),
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        match self.next()? {
            (Token::Atom(s), p) => match s.as_str() {
                "true" => Ok(Formula::True),
                "false" => Ok(Formula::False),
                _ => Err(ParseError::Syntax { pos: p, expected: "formula".into() }),
            },
            (Token::LParen, _) => {
                let (head, hp) = match self.next()? {
                    (Token::Atom(s), p) => (s, p),
                    (_, p) => {
                        return Err(ParseError::Syntax { pos: p, expected: "operator".into() })
                    }
                };
                let out = match head.as_str() {
                    "and" => {
                        let a = self.formula()?;
                        let b = self.formula()?;
                        Formula::And(a.rc(), b.rc())
                    }
                    "or" => {
                        let a = self.formula()?;
                        let b = self.formula()?;
                        Formula::Or(a.rc(), b.rc())
                    }
                    "implies" => {
                        let a = self.formula()?;
                        let b = self.formula()?;
                        Formula::Implies(a.rc(), b.rc())
                    }
                    "not" => Formula::Not(self.formula()?.rc()),
                    "exists" => {
                        let v = self.var()?;
                        Formula::Exists(v, self.formula()?.rc())
                    }
                    "forall" => {
                        let v = self.var()?;
                        Formula::Forall(v, self.formula()?.rc())
                    }
                    "count>=" | "count<=" | "count=" => {
                        let op = match head.as_str() {
                            "count>=" => CountOp::Geq,
                            "count<=" => CountOp::Leq,
                            _ => CountOp::Eq,
                        };
                        let n = self.nat()?;
                        let v = self.var()?;
                        Formula::Count(op, n, v, self.formula()?.rc())
                    }
                    "=" => {
                        let a = self.var()?;
                        let b = self.var()?;
                        Formula::Equal(a, b)
                    }
                    "child" | "descendant" | "next" | "following" => {
                        let nav = match head.as_str() {
                            "child" => Nav::Child,
                            "descendant" => Nav::Descendant,
                            "next" => Nav::NextSibling,
                            _ => Nav::FollowingSibling,
                        };
                        let a = self.var()?;
                        let b = self.var()?;
                        Formula::Nav(nav, a, b)
                    }
                    sym => {
                        if self.sig.has_unary(sym) {
                            let v = self.var()?;
                            if matches!(self.peek(), Some((Token::Atom(_), _))) {
                                return Err(ParseError::WrongArity {
                                    name: sym.to_string(),
                                    pos: hp,
                                });
                            }
                            Formula::Unary(sym.to_string(), v)
                        } else if self.sig.has_binary(sym) {
                            let a = self.var()?;
                            let b = self.var()?;
                            Formula::Common(sym.to_string(), a, b)
                        } else {
                            return Err(ParseError::UnknownSymbol {
                                name: sym.to_string(),
                                pos: hp,
                            });
                        }
                    }
                };
                self.expect_rparen()?;
                Ok(out)
            }
            (Token::RParen, p) => Err(ParseError::Syntax { pos: p, expected: "formula".into() }),
        }
    }
}

/// Parse a formula from its s-expression text, validating all predicate
/// symbols against the signature.
pub fn parse(text: &str, sig: &Signature) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, sig };
    let f = p.formula()?;
    if let Some((_, pos)) = p.peek() {
        return Err(ParseError::TrailingInput(*pos));
    }
    Ok(f)
}

/// Canonical textual form; `parse(pretty(f)) == f` for validated formulas.
pub fn pretty(f: &Formula) -> String {
    f.to_string()
}
