//! Evaluation of conjunctions of atoms against a materialised model.

use std::fmt;

use super::{ConstId, EngineError, MinimalModel, PredId, Slot};
use crate::rewrite::{Atom, Term};

/// A binding of variables to ground terms, kept in a fixed variable order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Substitution {
    bindings: Vec<(String, Term)>,
}

impl Substitution {
    pub fn new(bindings: Vec<(String, Term)>) -> Self {
        Substitution { bindings }
    }

    pub fn get(&self, var: &str) -> Option<&Term> {
        self.bindings.iter().find(|(v, _)| v == var).map(|(_, t)| t)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Term)> {
        self.bindings.iter().map(|(v, t)| (v.as_str(), t))
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    /// Replaces bound variables; other terms are returned unchanged.
    pub fn apply(&self, t: &Term) -> Term {
        match t {
            Term::Var(v) => self.get(v).cloned().unwrap_or_else(|| t.clone()),
            _ => t.clone(),
        }
    }

    pub fn apply_atom(&self, a: &Atom) -> Atom {
        Atom::new(
            a.predicate.clone(),
            a.args.iter().map(|t| self.apply(t)).collect(),
        )
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, t)) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}↦{t}")?;
        }
        f.write_str("}")
    }
}

struct Pattern {
    pred: PredId,
    arity: usize,
    args: [Slot; 2],
}

/// Matches of `atoms` in `model` as constant-id rows aligned with `vars`.
/// `vars` must be exactly the variables of `atoms`. Rows are in no
/// particular order.
pub(crate) fn match_ids(
    model: &MinimalModel,
    atoms: &[Atom],
    vars: &[String],
) -> Result<Vec<Vec<ConstId>>, EngineError> {
    let mut seen = vec![false; vars.len()];
    let mut patterns = Vec::with_capacity(atoms.len());
    let mut missing_constant = false;
    for a in atoms {
        let pred = model
            .pred_id(&a.predicate)
            .ok_or_else(|| EngineError::UnknownPredicate(a.predicate.name().to_string()))?;
        let mut args = [Slot::Const(0); 2];
        for (pos, t) in a.args.iter().enumerate() {
            args[pos] = match t {
                Term::Var(v) => {
                    let idx = vars
                        .iter()
                        .position(|w| w == v)
                        .ok_or(EngineError::VariableMismatch)?;
                    seen[idx] = true;
                    Slot::Var(idx)
                }
                _ => match model.const_id(t) {
                    Some(c) => Slot::Const(c),
                    None => {
                        missing_constant = true;
                        Slot::Const(0)
                    }
                },
            };
        }
        patterns.push(Pattern {
            pred,
            arity: a.args.len(),
            args,
        });
    }
    if seen.iter().any(|s| !s) {
        return Err(EngineError::VariableMismatch);
    }
    if missing_constant {
        return Ok(Vec::new());
    }
    // greedy order: most bound positions first, then smaller relations
    let mut order = Vec::with_capacity(patterns.len());
    let mut bound = vec![false; vars.len()];
    let mut left: Vec<usize> = (0..patterns.len()).collect();
    while !left.is_empty() {
        let score = |i: usize| {
            let p = &patterns[i];
            let nbound = p.args[..p.arity]
                .iter()
                .filter(|s| match s {
                    Slot::Const(_) => true,
                    Slot::Var(v) => bound[*v],
                })
                .count();
            (
                std::cmp::Reverse(nbound),
                model.store.relation(p.pred).len(),
                i,
            )
        };
        let (k, &best) = left
            .iter()
            .enumerate()
            .min_by_key(|(_, &i)| score(i))
            .expect("non-empty");
        left.remove(k);
        for s in &patterns[best].args[..patterns[best].arity] {
            if let Slot::Var(v) = s {
                bound[*v] = true;
            }
        }
        order.push(best);
    }
    let mut out = Vec::new();
    let mut binding = vec![None; vars.len()];
    search(model, &patterns, &order, 0, &mut binding, &mut out);
    Ok(out)
}

fn search(
    model: &MinimalModel,
    patterns: &[Pattern],
    order: &[usize],
    k: usize,
    binding: &mut [Option<ConstId>],
    out: &mut Vec<Vec<ConstId>>,
) {
    if k == order.len() {
        out.push(
            binding
                .iter()
                .map(|b| b.expect("all variables bound"))
                .collect(),
        );
        return;
    }
    let p = &patterns[order[k]];
    let rel = model.store.relation(p.pred);
    let value = |s: Slot, binding: &[Option<ConstId>]| match s {
        Slot::Const(c) => Some(c),
        Slot::Var(v) => binding[v],
    };
    let probe = (0..p.arity).find_map(|pos| value(p.args[pos], binding).map(|c| (pos, c)));
    let mut visit = |t: [ConstId; 2], binding: &mut [Option<ConstId>]| {
        let mut newly = Vec::new();
        let mut ok = true;
        for (pos, slot) in p.args[..p.arity].iter().enumerate() {
            match *slot {
                Slot::Const(c) => ok &= t[pos] == c,
                Slot::Var(v) => match binding[v] {
                    Some(c) => ok &= t[pos] == c,
                    None => {
                        binding[v] = Some(t[pos]);
                        newly.push(v);
                    }
                },
            }
            if !ok {
                break;
            }
        }
        if ok {
            search(model, patterns, order, k + 1, binding, out);
        }
        for v in newly {
            binding[v] = None;
        }
    };
    match probe {
        Some((pos, c)) => {
            for &o in rel.lookup(pos, c) {
                visit(rel.tuple(o), binding);
            }
        }
        None => {
            for &t in rel.tuples() {
                visit(t, binding);
            }
        }
    }
}

/// All substitutions `σ` over `vars` with `model ⊨ σ(atoms)`, sorted by the
/// names of the bound terms in variable order. `vars` must be exactly the
/// variables of `atoms`; constants unknown to the model match nothing.
pub fn enumerate_matches(
    model: &MinimalModel,
    atoms: &[Atom],
    vars: &[String],
) -> Result<Vec<Substitution>, EngineError> {
    let rows = match_ids(model, atoms, vars)?;
    let mut keyed: Vec<(Vec<String>, Vec<ConstId>)> = rows
        .into_iter()
        .map(|r| (r.iter().map(|&c| model.term(c).to_string()).collect(), r))
        .collect();
    keyed.sort();
    keyed.dedup();
    Ok(keyed
        .into_iter()
        .map(|(_, r)| {
            Substitution::new(
                vars.iter()
                    .cloned()
                    .zip(r.into_iter().map(|c| model.term(c).clone()))
                    .collect(),
            )
        })
        .collect())
}
