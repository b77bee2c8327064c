//! Decision procedures and model-theoretic tooling for two-variable logic,
//! with and without counting quantifiers, over finite labelled ordered trees.

pub mod formula;
pub mod normalize;
pub mod oracle;
pub mod sat_c2;
pub mod sat_fo2bin;
pub mod semantics;
pub mod translate;
pub mod tree;
pub mod types;
pub mod verdict;

pub use formula::{classify, parse, pretty, Formula, LogicClass, OrderFormula, Signature, Var};
pub use normalize::{to_nf_c2, to_nf_fo2, NormalFormC2, NormalFormFo2};
pub use semantics::{check_via_types, full_type, model_check, FullType};
pub use sat_c2::{c2_bounds, locally_consistent, sat_c2, C2Bounds};
pub use sat_fo2bin::{bound_f, bound_fset, fo2_bounds, sat_fo2bin, Bounds, NodeRecord};
pub use tree::{Position16, Tree};
pub use types::{Count, KMultiset, OneType, TwoType};
pub use verdict::{Outcome, SearchMode, Stats, Verdict};
