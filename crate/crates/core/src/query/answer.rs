use std::collections::{BTreeSet, HashSet};

use super::{compute_aux_set, is_spurious, AuxSet, ConjunctiveQuery, QueryError, Verdict};
use crate::engine::{
    match_ids, materialize, Budget, ConstId, EngineError, MinimalModel, Substitution,
};
use crate::kb::{normalize, Individual, KnowledgeBase};
use crate::rewrite::{dat_translate, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Satisfiability {
    Sat,
    Unsat,
}

/// Certain answers of a query; an unsatisfiable KB entails every candidate
/// answer, which is reported as a marker instead of being enumerated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CertainAnswers {
    Unsatisfiable,
    Answers(BTreeSet<Vec<Individual>>),
}

impl CertainAnswers {
    /// For Boolean queries: whether the empty tuple is an answer.
    pub fn holds(&self) -> bool {
        match self {
            CertainAnswers::Unsatisfiable => true,
            CertainAnswers::Answers(a) => !a.is_empty(),
        }
    }
}

/// A normalized KB with its materialised dat-model and aux set, ready to
/// answer any number of queries.
#[derive(Debug, Clone)]
pub struct Reasoner {
    kb: KnowledgeBase,
    model: MinimalModel,
    aux: AuxSet,
}

impl Reasoner {
    pub fn new(kb: &KnowledgeBase, budget: &Budget) -> Result<Self, EngineError> {
        let kb = normalize(kb);
        let model = materialize(&dat_translate(&kb), budget)?;
        let aux = compute_aux_set(&model);
        Ok(Reasoner { kb, model, aux })
    }

    pub fn kb(&self) -> &KnowledgeBase {
        &self.kb
    }

    pub fn model(&self) -> &MinimalModel {
        &self.model
    }

    pub fn aux_set(&self) -> &AuxSet {
        &self.aux
    }

    pub fn satisfiability(&self) -> Satisfiability {
        if self.model.is_unsatisfiable() {
            Satisfiability::Unsat
        } else {
            Satisfiability::Sat
        }
    }

    /// Match rows over `q.variables()`; empty if `q` uses a predicate the
    /// model does not know.
    fn rows(&self, q: &ConjunctiveQuery) -> Result<Vec<Vec<ConstId>>, QueryError> {
        if q.atoms()
            .iter()
            .any(|a| self.model.pred_id(&a.predicate).is_none())
        {
            return Ok(Vec::new());
        }
        Ok(match_ids(&self.model, q.atoms(), &q.variables())?)
    }

    fn substitution(&self, vars: &[String], row: &[ConstId]) -> Substitution {
        Substitution::new(
            vars.iter()
                .cloned()
                .zip(row.iter().map(|&c| self.model.term(c).clone()))
                .collect(),
        )
    }

    /// All matches of `q` in the dat-model, sorted.
    pub fn matches(&self, q: &ConjunctiveQuery) -> Result<Vec<Substitution>, QueryError> {
        let vars = q.variables();
        let mut out: Vec<(Vec<String>, Substitution)> = self
            .rows(q)?
            .iter()
            .map(|r| {
                let s = self.substitution(&vars, r);
                (s.iter().map(|(_, t)| t.to_string()).collect(), s)
            })
            .collect();
        out.sort();
        out.dedup();
        Ok(out.into_iter().map(|(_, s)| s).collect())
    }

    /// Every match with its verdict.
    pub fn explain(
        &self,
        q: &ConjunctiveQuery,
    ) -> Result<Vec<(Substitution, Verdict)>, QueryError> {
        Ok(self
            .matches(q)?
            .into_iter()
            .map(|tau| {
                let v = is_spurious(q, &self.model, &tau, &self.aux);
                (tau, v)
            })
            .collect())
    }

    /// Projections of non-spurious matches onto the answer variables. Once a
    /// projection is accepted, further matches with the same projection are
    /// not examined.
    pub fn certain_answers(&self, q: &ConjunctiveQuery) -> Result<CertainAnswers, QueryError> {
        if self.model.is_unsatisfiable() {
            return Ok(CertainAnswers::Unsatisfiable);
        }
        let vars = q.variables();
        let k = q.answer_vars().len();
        let mut accepted: HashSet<Vec<ConstId>> = HashSet::new();
        for row in self.rows(q)? {
            if accepted.contains(&row[..k]) {
                continue;
            }
            let tau = self.substitution(&vars, &row);
            if !is_spurious(q, &self.model, &tau, &self.aux).is_spurious() {
                accepted.insert(row[..k].to_vec());
            }
        }
        let answers = accepted
            .into_iter()
            .map(|p| {
                p.iter()
                    .map(|&c| match self.model.term(c) {
                        Term::Named(i) => i.clone(),
                        other => {
                            unreachable!("condition (a) admits only named answers, got {other}")
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(CertainAnswers::Answers(answers))
    }
}

pub fn check_satisfiability(
    kb: &KnowledgeBase,
    budget: &Budget,
) -> Result<Satisfiability, EngineError> {
    Ok(Reasoner::new(kb, budget)?.satisfiability())
}

pub fn certain_answers(
    kb: &KnowledgeBase,
    q: &ConjunctiveQuery,
    budget: &Budget,
) -> Result<CertainAnswers, QueryError> {
    Reasoner::new(kb, budget)?.certain_answers(q)
}
