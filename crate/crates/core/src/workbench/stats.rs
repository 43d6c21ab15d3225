//! Size of a materialisation relative to its input, and the share of
//! spurious matches of a query.

use std::collections::BTreeSet;
use std::fmt::Write;

use crate::kb::AboxFact;
use crate::query::{ConjunctiveQuery, QueryError, Reasoner, SpuriousReason, Verdict};
use crate::rewrite::{Predicate, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MaterialisationStats {
    pub individuals_before: usize,
    pub unary_before: usize,
    pub binary_before: usize,
    pub named_after: usize,
    pub aux_constants: usize,
    pub aux_set: usize,
    pub unary_after: usize,
    /// Unary facts about members of the aux set.
    pub unary_aux: usize,
    pub binary_after: usize,
    /// Binary facts with at least one argument in the aux set.
    pub binary_aux: usize,
    pub equality_after: usize,
}

fn percent(part: usize, whole: usize) -> f64 {
    if whole == 0 {
        0.0
    } else {
        100.0 * part as f64 / whole as f64
    }
}

impl MaterialisationStats {
    pub fn facts_before(&self) -> usize {
        self.unary_before + self.binary_before
    }

    /// All facts of the model, equality facts included.
    pub fn facts_after(&self) -> usize {
        self.unary_after + self.binary_after + self.equality_after
    }

    pub fn unary_aux_percent(&self) -> f64 {
        percent(self.unary_aux, self.unary_after)
    }

    pub fn binary_aux_percent(&self) -> f64 {
        percent(self.binary_aux, self.binary_after)
    }

    /// `facts_after / facts_before`, or 0 for an empty ABox.
    pub fn growth(&self) -> f64 {
        if self.facts_before() == 0 {
            0.0
        } else {
            self.facts_after() as f64 / self.facts_before() as f64
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{:<22}{:>12}{:>12}", "", "before", "after");
        let _ = writeln!(
            s,
            "{:<22}{:>12}{:>12}",
            "named individuals", self.individuals_before, self.named_after
        );
        let _ = writeln!(
            s,
            "{:<22}{:>12}{:>12}",
            "auxiliary constants", "-", self.aux_constants
        );
        let _ = writeln!(s, "{:<22}{:>12}{:>12}", "true auxiliary", "-", self.aux_set);
        let _ = writeln!(
            s,
            "{:<22}{:>12}{:>12}  ({:.2}% over aux)",
            "unary facts",
            self.unary_before,
            self.unary_after,
            self.unary_aux_percent()
        );
        let _ = writeln!(
            s,
            "{:<22}{:>12}{:>12}  ({:.2}% with aux)",
            "binary facts",
            self.binary_before,
            self.binary_after,
            self.binary_aux_percent()
        );
        let _ = writeln!(
            s,
            "{:<22}{:>12}{:>12}",
            "equality facts", 0, self.equality_after
        );
        let _ = writeln!(
            s,
            "{:<22}{:>12}{:>12}  (x{:.2})",
            "total facts",
            self.facts_before(),
            self.facts_after(),
            self.growth()
        );
        s
    }

    pub fn to_machine(&self) -> String {
        let rows: [(&str, String); 16] = [
            ("individuals_before", self.individuals_before.to_string()),
            ("unary_before", self.unary_before.to_string()),
            ("binary_before", self.binary_before.to_string()),
            ("facts_before", self.facts_before().to_string()),
            ("named_after", self.named_after.to_string()),
            ("aux_constants", self.aux_constants.to_string()),
            ("aux_set", self.aux_set.to_string()),
            ("unary_after", self.unary_after.to_string()),
            ("unary_aux", self.unary_aux.to_string()),
            (
                "unary_aux_percent",
                format!("{:.4}", self.unary_aux_percent()),
            ),
            ("binary_after", self.binary_after.to_string()),
            ("binary_aux", self.binary_aux.to_string()),
            (
                "binary_aux_percent",
                format!("{:.4}", self.binary_aux_percent()),
            ),
            ("equality_after", self.equality_after.to_string()),
            ("facts_after", self.facts_after().to_string()),
            ("growth", format!("{:.4}", self.growth())),
        ];
        rows.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }
}

/// Statistics for a satisfiable KB; `None` if it is unsatisfiable.
pub fn compute_stats(reasoner: &Reasoner) -> Option<MaterialisationStats> {
    let model = reasoner.model();
    if model.is_unsatisfiable() {
        return None;
    }
    let aux = reasoner.aux_set();
    let mut st = MaterialisationStats::default();
    let mut individuals = BTreeSet::new();
    for f in reasoner.kb().abox() {
        match f {
            AboxFact::Concept(_, a) => {
                st.unary_before += 1;
                individuals.insert(a);
            }
            AboxFact::Role(_, a, b) => {
                st.binary_before += 1;
                individuals.insert(a);
                individuals.insert(b);
            }
        }
    }
    st.individuals_before = individuals.len();
    for c in model.domain() {
        match model.term(c) {
            Term::Named(_) => st.named_after += 1,
            _ => st.aux_constants += 1,
        }
    }
    st.aux_set = aux.len();
    for (p, pred) in model.predicates() {
        let rel = model.store().relation(p);
        match pred {
            Predicate::Eq => st.equality_after += rel.len(),
            Predicate::Concept(_) => {
                st.unary_after += rel.len();
                st.unary_aux += rel
                    .tuples()
                    .iter()
                    .filter(|t| aux.contains(model.term(t[0])))
                    .count();
            }
            Predicate::Role(_) => {
                st.binary_after += rel.len();
                st.binary_aux += rel
                    .tuples()
                    .iter()
                    .filter(|t| aux.contains(model.term(t[0])) || aux.contains(model.term(t[1])))
                    .count();
            }
        }
    }
    Some(st)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct AnswerStats {
    pub matches: usize,
    pub spurious: usize,
    /// Spurious matches by the first condition that rejected them (a, b, c).
    pub by_reason: [usize; 3],
    pub certain_answers: usize,
}

impl AnswerStats {
    pub fn spurious_percent(&self) -> f64 {
        percent(self.spurious, self.matches)
    }

    pub fn to_text(&self) -> String {
        format!(
            "matches {}\nspurious {} ({:.2}%): a {} b {} c {}\ncertain answers {}\n",
            self.matches,
            self.spurious,
            self.spurious_percent(),
            self.by_reason[0],
            self.by_reason[1],
            self.by_reason[2],
            self.certain_answers
        )
    }

    pub fn to_machine(&self) -> String {
        format!(
            "matches={}\nspurious={}\nspurious_percent={:.4}\nspurious_a={}\nspurious_b={}\nspurious_c={}\ncertain_answers={}\n",
            self.matches,
            self.spurious,
            self.spurious_percent(),
            self.by_reason[0],
            self.by_reason[1],
            self.by_reason[2],
            self.certain_answers
        )
    }
}

pub fn compute_answer_stats(
    reasoner: &Reasoner,
    q: &ConjunctiveQuery,
) -> Result<AnswerStats, QueryError> {
    let mut st = AnswerStats::default();
    let mut answers = BTreeSet::new();
    for (tau, verdict) in reasoner.explain(q)? {
        st.matches += 1;
        match verdict {
            Verdict::Genuine => {
                let projection: Vec<Term> = q
                    .answer_vars()
                    .iter()
                    .map(|x| tau.apply(&Term::Var(x.clone())))
                    .collect();
                answers.insert(projection);
            }
            Verdict::Spurious(r) => {
                st.spurious += 1;
                let i = match r {
                    SpuriousReason::AnswerNotNamed => 0,
                    SpuriousReason::UnentailedEquality => 1,
                    SpuriousReason::AuxCycle => 2,
                };
                st.by_reason[i] += 1;
            }
        }
    }
    st.certain_answers = answers.len();
    Ok(st)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_totals_give_zero_ratios() {
        let st = MaterialisationStats::default();
        assert_eq!(st.growth(), 0.0);
        assert_eq!(st.unary_aux_percent(), 0.0);
        assert_eq!(AnswerStats::default().spurious_percent(), 0.0);
    }

    #[test]
    fn ratios_and_machine_block() {
        let st = MaterialisationStats {
            unary_before: 2,
            binary_before: 2,
            unary_after: 4,
            unary_aux: 1,
            binary_after: 3,
            equality_after: 1,
            ..Default::default()
        };
        assert_eq!(st.facts_after(), 8);
        assert_eq!(st.growth(), 2.0);
        assert_eq!(st.unary_aux_percent(), 25.0);
        let machine = st.to_machine();
        assert!(machine.contains("growth=2.0000\n"));
        assert_eq!(machine.lines().count(), 16);
    }
}
