//! Conjunctive queries and their answering over the datalog model:
//! satisfiability, match enumeration and the spurious-match filter.

mod answer;
mod filter;
mod parser;

pub use answer::{certain_answers, check_satisfiability, CertainAnswers, Reasoner, Satisfiability};
pub use filter::{
    build_aux_graph, compute_aux_set, compute_sim, is_aux_cyclic, is_spurious, AuxGraph, AuxSet,
    SimRelation, SpuriousReason, Verdict,
};
pub use parser::parse_query;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::engine::EngineError;
use crate::kb::Concept;
use crate::rewrite::{Atom, Predicate, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("query syntax error at column {column}: {message}")]
    Syntax { column: usize, message: String },
    #[error("answer variable `{0}` does not occur in the query body")]
    UnsafeAnswerVariable(String),
    #[error("answer variable `{0}` is listed twice")]
    DuplicateAnswerVariable(String),
    #[error("equality atoms are not allowed in queries")]
    EqualityAtom,
    #[error("Bot atoms are not allowed in queries")]
    BottomAtom,
    #[error("queries must be function-free")]
    FunctionTerm,
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// `q(x⃗) = ∃y⃗. ψ(x⃗, y⃗)` with `ψ` a conjunction of function-free concept
/// and role atoms over variables and named individuals.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConjunctiveQuery {
    answer_vars: Vec<String>,
    existential_vars: Vec<String>,
    atoms: Vec<Atom>,
}

impl ConjunctiveQuery {
    /// Builds a query from its answer variables and body; every other
    /// variable of the body is existential. Duplicate atoms are removed.
    pub fn new(answer_vars: Vec<String>, atoms: Vec<Atom>) -> Result<Self, QueryError> {
        let mut body = Vec::new();
        for a in atoms {
            match &a.predicate {
                Predicate::Eq => return Err(QueryError::EqualityAtom),
                Predicate::Concept(Concept::Bot) => return Err(QueryError::BottomAtom),
                _ => {}
            }
            if a.args
                .iter()
                .any(|t| !matches!(t, Term::Var(_) | Term::Named(_)))
            {
                return Err(QueryError::FunctionTerm);
            }
            if !body.contains(&a) {
                body.push(a);
            }
        }
        let mut seen = BTreeSet::new();
        for v in &answer_vars {
            if !seen.insert(v.as_str()) {
                return Err(QueryError::DuplicateAnswerVariable(v.clone()));
            }
        }
        let mut existential_vars = Vec::new();
        for a in &body {
            for t in &a.args {
                if let Term::Var(v) = t {
                    if !seen.contains(v.as_str()) && !existential_vars.contains(v) {
                        existential_vars.push(v.clone());
                    }
                }
            }
        }
        for v in &answer_vars {
            if !body.iter().any(|a| a.args.contains(&Term::Var(v.clone()))) {
                return Err(QueryError::UnsafeAnswerVariable(v.clone()));
            }
        }
        Ok(ConjunctiveQuery {
            answer_vars,
            existential_vars,
            atoms: body,
        })
    }

    pub fn answer_vars(&self) -> &[String] {
        &self.answer_vars
    }

    /// Existential variables in order of first occurrence.
    pub fn existential_vars(&self) -> &[String] {
        &self.existential_vars
    }

    /// Answer variables followed by existential variables.
    pub fn variables(&self) -> Vec<String> {
        self.answer_vars
            .iter()
            .chain(&self.existential_vars)
            .cloned()
            .collect()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn is_boolean(&self) -> bool {
        self.answer_vars.is_empty()
    }

    /// Variables and individuals occurring in the body, sorted.
    pub fn terms(&self) -> BTreeSet<Term> {
        self.atoms
            .iter()
            .flat_map(|a| a.args.iter().cloned())
            .collect()
    }
}

fn fmt_term(t: &Term, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match t {
        Term::Var(v) => f.write_str(v),
        other => write!(f, "'{other}'"),
    }
}

impl fmt::Display for ConjunctiveQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q({}) :- ", self.answer_vars.join(","))?;
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}(", a.predicate.name())?;
            for (j, t) in a.args.iter().enumerate() {
                if j > 0 {
                    f.write_str(",")?;
                }
                fmt_term(t, f)?;
            }
            f.write_str(")")?;
        }
        f.write_str(".")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::Role;

    fn role(s: &str, t: &str) -> Atom {
        Atom::role(Role::new("r"), Term::var(s), Term::var(t))
    }

    #[test]
    fn rejects_malformed_queries() {
        assert_eq!(
            ConjunctiveQuery::new(vec!["z".into()], vec![role("x", "y")]),
            Err(QueryError::UnsafeAnswerVariable("z".into()))
        );
        assert_eq!(
            ConjunctiveQuery::new(vec!["x".into(), "x".into()], vec![role("x", "y")]),
            Err(QueryError::DuplicateAnswerVariable("x".into()))
        );
        assert_eq!(
            ConjunctiveQuery::new(vec![], vec![Atom::eq(Term::var("x"), Term::var("y"))]),
            Err(QueryError::EqualityAtom)
        );
        assert_eq!(
            ConjunctiveQuery::new(vec![], vec![Atom::concept(Concept::Bot, Term::var("x"))]),
            Err(QueryError::BottomAtom)
        );
    }

    #[test]
    fn existential_variables() {
        let q =
            ConjunctiveQuery::new(vec!["x".into()], vec![role("x", "y"), role("y", "y")]).unwrap();
        assert!(!q.is_boolean());
        assert_eq!(q.existential_vars(), vec!["y".to_string()]);
        assert_eq!(q.to_string(), "q(x) :- r(x,y), r(y,y).");
    }
}
