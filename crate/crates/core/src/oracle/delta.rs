//! The mapping `δ` from function terms to auxiliary constants and the
//! fact-level checks that it relates the two models as expected.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::ExpansionModel;
use crate::engine::MinimalModel;
use crate::query::compute_aux_set;
use crate::rewrite::{Atom, Predicate, Term};

/// `δ`: identity on individuals, `f_{R,A}(w) ↦ o_{R,A}`.
#[derive(Debug, Clone, Copy, Default)]
pub struct DeltaMap;

impl DeltaMap {
    pub fn apply(&self, t: &Term) -> Term {
        match t {
            Term::Func(r, c, _) => Term::Aux(r.clone(), c.clone()),
            other => other.clone(),
        }
    }

    pub fn apply_atom(&self, a: &Atom) -> Atom {
        Atom::new(
            a.predicate.clone(),
            a.args.iter().map(|t| self.apply(t)).collect(),
        )
    }
}

/// One failed instance of a homomorphism property.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Violation {
    /// `"1.<k>"` for the forward properties, `"2.<k>"` for the converse ones.
    pub property: String,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "property {}: {}", self.property, self.detail)
    }
}

fn violation(property: &str, detail: String) -> Violation {
    Violation {
        property: property.to_string(),
        detail,
    }
}

/// Checks that the `δ`-image of every expansion fact is in `dat_model`
/// and, when the expansion is saturated, the five converse properties over
/// the terms occurring in concept and role facts.
pub fn check_delta_homomorphism(
    expansion: &ExpansionModel,
    dat_model: &MinimalModel,
) -> Vec<Violation> {
    let delta = DeltaMap;
    let facts = expansion.facts();
    let mut out = Vec::new();
    for f in &facts {
        let image = delta.apply_atom(f);
        if !dat_model.contains(&image) {
            let prop = match f.predicate {
                Predicate::Concept(_) => "1.1",
                Predicate::Role(_) => "1.2",
                Predicate::Eq => "1.3",
            };
            out.push(violation(prop, format!("{f} holds but {image} is missing")));
        }
    }
    if !expansion.saturated() {
        return out;
    }
    let omega = expansion.omega();
    let mut preimage: BTreeMap<Term, Vec<&Term>> = BTreeMap::new();
    for w in &omega {
        preimage.entry(delta.apply(w)).or_default().push(w);
    }
    let aux = compute_aux_set(dat_model);
    let dat_facts = dat_model.atoms();
    let pre = |u: &Term| preimage.get(u).map(Vec::as_slice).unwrap_or(&[]);
    let mut constants: BTreeSet<Term> = BTreeSet::new();
    for g in &dat_facts {
        match (&g.predicate, g.args.as_slice()) {
            (Predicate::Concept(_), [u]) => {
                constants.insert(u.clone());
                for &w in pre(u) {
                    let want = Atom::new(g.predicate.clone(), vec![w.clone()]);
                    if !facts.contains(&want) {
                        out.push(violation("2.1", format!("{g} holds but {want} is missing")));
                    }
                }
            }
            (Predicate::Role(r), [u1, u2]) => {
                constants.insert(u1.clone());
                constants.insert(u2.clone());
                for &w1 in pre(u1) {
                    for &w2 in pre(u2) {
                        if !aux.contains(u2) {
                            let want = Atom::new(g.predicate.clone(), vec![w1.clone(), w2.clone()]);
                            if !facts.contains(&want) {
                                out.push(violation(
                                    "2.2",
                                    format!("{g} holds but {want} is missing"),
                                ));
                            }
                            continue;
                        }
                        let Term::Aux(p, a) = u2 else {
                            out.push(violation(
                                "2.3",
                                format!("{u2} is auxiliary but not of the form o_(P,A)"),
                            ));
                            continue;
                        };
                        let succ = Term::Func(p.clone(), a.clone(), Box::new(w1.clone()));
                        let want = Atom::role(r.clone(), w1.clone(), succ);
                        if !facts.contains(&want) {
                            out.push(violation("2.3", format!("{g} holds but {want} is missing")));
                        }
                        let witnessed = facts
                            .iter()
                            .any(|f| f.predicate == g.predicate && f.args[1] == *w2);
                        if !witnessed {
                            out.push(violation(
                                "2.3",
                                format!("{g} holds but no {r}-predecessor of {w2} exists"),
                            ));
                        }
                    }
                }
            }
            (Predicate::Eq, [u1, u2]) if !aux.contains(u2) => {
                for &w1 in pre(u1) {
                    for &w2 in pre(u2) {
                        if !expansion.entails_eq(w1, w2) {
                            out.push(violation(
                                "2.4",
                                format!("{g} holds but {w1} ≈ {w2} is missing"),
                            ));
                        }
                    }
                }
            }
            _ => {}
        }
    }
    for u in constants {
        if pre(&u).is_empty() {
            out.push(violation(
                "2.5",
                format!("{u} is not the image of any term"),
            ));
        }
    }
    out
}
