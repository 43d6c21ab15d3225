//! A deliberately simple naive evaluator over terms, used to cross-check
//! the semi-naive engine. Every round re-joins all rules against all facts.

use std::collections::{BTreeMap, BTreeSet};

use crate::rewrite::{Atom, Clause, LogicProgram, Predicate, Term};

type Binding = BTreeMap<String, Term>;

fn unify(pattern: &Atom, fact: &Atom, binding: &Binding) -> Option<Binding> {
    if pattern.predicate != fact.predicate {
        return None;
    }
    let mut out = binding.clone();
    for (p, f) in pattern.args.iter().zip(&fact.args) {
        match p {
            Term::Var(v) => match out.get(v) {
                Some(t) if t != f => return None,
                Some(_) => {}
                None => {
                    out.insert(v.clone(), f.clone());
                }
            },
            _ if p != f => return None,
            _ => {}
        }
    }
    Some(out)
}

fn instantiate(a: &Atom, b: &Binding) -> Atom {
    let args = a
        .args
        .iter()
        .map(|t| match t {
            Term::Var(v) => b[v].clone(),
            _ => t.clone(),
        })
        .collect();
    Atom::new(a.predicate.clone(), args)
}

fn fire(clause: &Clause, facts: &BTreeSet<Atom>, out: &mut BTreeSet<Atom>) {
    let mut bindings = vec![Binding::new()];
    for atom in clause.body() {
        let mut next = Vec::new();
        for b in &bindings {
            for f in facts {
                if let Some(nb) = unify(atom, f, b) {
                    next.push(nb);
                }
            }
        }
        bindings = next;
    }
    for b in &bindings {
        out.insert(instantiate(clause.head(), b));
    }
}

/// Least fixpoint of `program` plus its equality axioms, with `c ≈ c` for
/// every constant occurring in a fact.
pub fn naive_materialize(program: &LogicProgram) -> BTreeSet<Atom> {
    let program = program.clone().with_equality();
    let mut facts: BTreeSet<Atom> = program.facts.clone();
    loop {
        let mut new = BTreeSet::new();
        for f in &facts {
            for t in &f.args {
                new.insert(Atom::new(Predicate::Eq, vec![t.clone(), t.clone()]));
            }
        }
        for c in program.clauses() {
            fire(c, &facts, &mut new);
        }
        if new.is_subset(&facts) {
            return facts;
        }
        facts.extend(new);
    }
}
