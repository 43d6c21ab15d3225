//! Ground truth for small instances: bounded Herbrand expansion of the
//! function-symbol program, certain answers read off that expansion, and
//! checks relating it to the datalog model.

mod delta;
mod expand;
pub mod sample;
mod skolem;

pub use delta::{check_delta_homomorphism, DeltaMap, Violation};
pub use expand::{
    expand, expand_bounded, try_saturate, ExpansionError, ExpansionModel, DEFAULT_MAX_FACTS,
    MAX_ROUNDS,
};
pub use skolem::skolemize;

use std::collections::BTreeSet;

use crate::kb::{normalize, Individual, KnowledgeBase};
use crate::query::ConjunctiveQuery;
use crate::rewrite::xi_translate;

/// Answers read off an expansion. `complete` holds when the expansion is
/// the whole model (or a `Bot` fact was found, which settles the KB).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleAnswers {
    pub unsatisfiable: bool,
    pub answers: BTreeSet<Vec<Individual>>,
    pub complete: bool,
}

/// Depth used when the caller has no better bound.
pub fn default_depth(q: &ConjunctiveQuery) -> usize {
    q.terms().len() + 3
}

/// Projections onto the answer variables of matches into `expansion` that
/// send every answer variable to a named individual. Empty if a `Bot` fact
/// was derived.
pub fn answers_in(expansion: &ExpansionModel, q: &ConjunctiveQuery) -> OracleAnswers {
    let unsatisfiable = expansion.is_unsatisfiable();
    let mut answers = BTreeSet::new();
    if !unsatisfiable {
        answers = expansion.answer_tuples(q.atoms(), q.answer_vars());
    }
    OracleAnswers {
        unsatisfiable,
        answers,
        complete: unsatisfiable || expansion.saturated(),
    }
}

pub fn oracle_certain_answers(
    kb: &KnowledgeBase,
    q: &ConjunctiveQuery,
    depth: usize,
) -> Result<OracleAnswers, ExpansionError> {
    let expansion = expand(&xi_translate(&normalize(kb)), depth)?;
    Ok(answers_in(&expansion, q))
}
