//! Bottom-up materialisation of function-free programs.
//!
//! Evaluation is semi-naive: each round joins every rule once per body
//! atom, with that atom restricted to the previous round's delta, earlier
//! atoms to older facts and later atoms to all facts. Equality is handled by
//! the explicit equality clauses of the program plus the reflexivity
//! builtin, which asserts `c ≈ c` as soon as `c` appears in a fact.

mod matching;
pub mod reference;
mod store;

pub(crate) use matching::match_ids;
pub use matching::{enumerate_matches, Substitution};
pub use store::{ConstId, FactStore, PredId, Relation, Tuple};

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::kb::Concept;
use crate::rewrite::{Atom, LogicProgram, Predicate, Term};

pub const DEFAULT_MAX_FACTS: usize = 10_000_000;

/// Resource limits for materialisation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_facts: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_facts: DEFAULT_MAX_FACTS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("fact budget of {limit} exceeded")]
    BudgetExceeded { limit: usize },
    #[error("program contains function terms")]
    NotDatalog,
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
    #[error("variable list does not match the variables of the atoms")]
    VariableMismatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    Var(usize),
    Const(ConstId),
}

#[derive(Debug, Clone)]
struct CAtom {
    pred: PredId,
    arity: usize,
    args: [Slot; 2],
}

#[derive(Debug, Clone)]
struct Rule {
    body: Vec<CAtom>,
    head: CAtom,
    nvars: usize,
}

/// The minimal Herbrand model of a datalog program together with the
/// equality axioms. Immutable once built.
#[derive(Debug, Clone)]
pub struct MinimalModel {
    program: LogicProgram,
    predicates: Vec<Predicate>,
    pred_ids: HashMap<Predicate, PredId>,
    constants: Vec<Term>,
    const_ids: HashMap<Term, ConstId>,
    store: FactStore,
    in_domain: Vec<bool>,
    eq: PredId,
    rounds: usize,
}

fn has_function_term(a: &Atom) -> bool {
    a.args.iter().any(|t| matches!(t, Term::Func(..)))
}

struct Compiler<'a> {
    model: &'a mut MinimalModel,
}

impl Compiler<'_> {
    fn pred(&mut self, p: &Predicate) -> PredId {
        if let Some(&id) = self.model.pred_ids.get(p) {
            return id;
        }
        let id = self.model.predicates.len() as PredId;
        self.model.predicates.push(p.clone());
        self.model.pred_ids.insert(p.clone(), id);
        self.model.store.relations.push(Relation::new(p.arity()));
        id
    }

    fn constant(&mut self, t: &Term) -> ConstId {
        if let Some(&id) = self.model.const_ids.get(t) {
            return id;
        }
        let id = self.model.constants.len() as ConstId;
        self.model.constants.push(t.clone());
        self.model.const_ids.insert(t.clone(), id);
        self.model.in_domain.push(false);
        id
    }

    fn atom(&mut self, a: &Atom, vars: &mut Vec<String>) -> CAtom {
        let mut args = [Slot::Const(0); 2];
        for (pos, t) in a.args.iter().enumerate() {
            args[pos] = match t {
                Term::Var(v) => {
                    let idx = vars.iter().position(|w| w == v).unwrap_or_else(|| {
                        vars.push(v.clone());
                        vars.len() - 1
                    });
                    Slot::Var(idx)
                }
                _ => Slot::Const(self.constant(t)),
            };
        }
        CAtom {
            pred: self.pred(&a.predicate),
            arity: a.args.len(),
            args,
        }
    }

    fn ground(&mut self, a: &Atom) -> (PredId, Tuple) {
        let ca = self.atom(a, &mut Vec::new());
        let mut t = [0; 2];
        for (pos, s) in ca.args.iter().take(ca.arity).enumerate() {
            if let Slot::Const(c) = s {
                t[pos] = *c;
            }
        }
        (ca.pred, t)
    }
}

/// Computes the minimal Herbrand model of `program` and its equality axioms
/// (appended here if the program does not carry them yet).
pub fn materialize(program: &LogicProgram, budget: &Budget) -> Result<MinimalModel, EngineError> {
    let program = program.clone().with_equality();
    if program.facts.iter().any(has_function_term)
        || program
            .clauses()
            .any(|c| has_function_term(c.head()) || c.body().iter().any(has_function_term))
    {
        return Err(EngineError::NotDatalog);
    }
    let mut model = MinimalModel {
        program: program.clone(),
        predicates: Vec::new(),
        pred_ids: HashMap::new(),
        constants: Vec::new(),
        const_ids: HashMap::new(),
        store: FactStore::default(),
        in_domain: Vec::new(),
        eq: 0,
        rounds: 0,
    };
    let mut rules = Vec::new();
    let mut pending = Vec::new();
    {
        let mut cc = Compiler { model: &mut model };
        cc.model.eq = cc.pred(&Predicate::Eq);
        for p in program.predicates() {
            cc.pred(&p);
        }
        for clause in program.clauses() {
            if clause.body().is_empty() {
                pending.push(cc.ground(clause.head()));
                continue;
            }
            let mut vars = Vec::new();
            let body: Vec<CAtom> = clause
                .body()
                .iter()
                .map(|a| cc.atom(a, &mut vars))
                .collect();
            let head = cc.atom(clause.head(), &mut vars);
            rules.push(Rule {
                body,
                head,
                nvars: vars.len(),
            });
        }
        for fact in &program.facts {
            pending.push(cc.ground(fact));
        }
    }
    loop {
        let inserted = model.commit(&pending, budget)?;
        if inserted == 0 {
            break;
        }
        model.rounds += 1;
        for rel in &mut model.store.relations {
            rel.advance();
        }
        pending.clear();
        for rule in &rules {
            model.fire(rule, &mut pending);
        }
    }
    Ok(model)
}

impl MinimalModel {
    fn commit(
        &mut self,
        pending: &[(PredId, Tuple)],
        budget: &Budget,
    ) -> Result<usize, EngineError> {
        let mut inserted = 0;
        for &(p, t) in pending {
            let rel = &mut self.store.relations[p as usize];
            if !rel.insert(t) {
                continue;
            }
            inserted += 1;
            for &c in &t[..rel.arity] {
                if !self.in_domain[c as usize] {
                    self.in_domain[c as usize] = true;
                    if self.store.relations[self.eq as usize].insert([c, c]) {
                        inserted += 1;
                    }
                }
            }
        }
        if self.store.len() > budget.max_facts {
            return Err(EngineError::BudgetExceeded {
                limit: budget.max_facts,
            });
        }
        Ok(inserted)
    }

    fn fire(&self, rule: &Rule, out: &mut Vec<(PredId, Tuple)>) {
        for delta_pos in 0..rule.body.len() {
            let mut plan: Vec<(usize, usize, usize)> = Vec::with_capacity(rule.body.len());
            for (j, atom) in rule.body.iter().enumerate() {
                let rel = self.store.relation(atom.pred);
                let (lo, hi) = match j.cmp(&delta_pos) {
                    std::cmp::Ordering::Less => (0, rel.old_end),
                    std::cmp::Ordering::Equal => (rel.old_end, rel.delta_end),
                    std::cmp::Ordering::Greater => (0, rel.delta_end),
                };
                if lo == hi {
                    plan.clear();
                    break;
                }
                plan.push((j, lo, hi));
            }
            if plan.is_empty() {
                continue;
            }
            plan.sort_by(|a, b| {
                (a.2 - a.1)
                    .cmp(&(b.2 - b.1))
                    .then_with(|| {
                        let pa = &self.predicates[rule.body[a.0].pred as usize];
                        let pb = &self.predicates[rule.body[b.0].pred as usize];
                        pa.name().cmp(pb.name())
                    })
                    .then(a.0.cmp(&b.0))
            });
            let mut binding = vec![None; rule.nvars];
            self.join(rule, &plan, 0, &mut binding, out);
        }
    }

    fn join(
        &self,
        rule: &Rule,
        plan: &[(usize, usize, usize)],
        k: usize,
        binding: &mut [Option<ConstId>],
        out: &mut Vec<(PredId, Tuple)>,
    ) {
        if k == plan.len() {
            let head = &rule.head;
            let mut t = [0; 2];
            for (value, slot) in t.iter_mut().zip(&head.args[..head.arity]) {
                *value = match *slot {
                    Slot::Const(c) => c,
                    Slot::Var(v) => binding[v].expect("safe clause"),
                };
            }
            if !self.store.contains(head.pred, &t) {
                out.push((head.pred, t));
            }
            return;
        }
        let (j, lo, hi) = plan[k];
        let atom = &rule.body[j];
        let rel = self.store.relation(atom.pred);
        let value = |s: Slot, binding: &[Option<ConstId>]| match s {
            Slot::Const(c) => Some(c),
            Slot::Var(v) => binding[v],
        };
        let probe =
            (0..atom.arity).find_map(|pos| value(atom.args[pos], binding).map(|c| (pos, c)));
        let mut visit = |t: Tuple, binding: &mut [Option<ConstId>]| {
            let mut newly = [usize::MAX; 2];
            let mut ok = true;
            for pos in 0..atom.arity {
                match atom.args[pos] {
                    Slot::Const(c) => ok &= t[pos] == c,
                    Slot::Var(v) => match binding[v] {
                        Some(c) => ok &= t[pos] == c,
                        None => {
                            binding[v] = Some(t[pos]);
                            newly[pos] = v;
                        }
                    },
                }
                if !ok {
                    break;
                }
            }
            if ok {
                self.join(rule, plan, k + 1, binding, out);
            }
            for v in newly {
                if v != usize::MAX {
                    binding[v] = None;
                }
            }
        };
        match probe {
            Some((pos, c)) => {
                let offsets = rel.lookup(pos, c);
                let start = offsets.partition_point(|&o| (o as usize) < lo);
                let end = offsets.partition_point(|&o| (o as usize) < hi);
                for &o in &offsets[start..end] {
                    visit(rel.tuple(o), binding);
                }
            }
            None => {
                for &t in &rel.tuples()[lo..hi] {
                    visit(t, binding);
                }
            }
        }
    }

    pub fn program(&self) -> &LogicProgram {
        &self.program
    }

    pub fn store(&self) -> &FactStore {
        &self.store
    }

    /// Number of semi-naive rounds that produced new facts.
    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn len(&self) -> usize {
        self.store.len()
    }

    pub fn is_empty(&self) -> bool {
        self.store.is_empty()
    }

    pub fn pred_id(&self, p: &Predicate) -> Option<PredId> {
        self.pred_ids.get(p).copied()
    }

    pub fn predicate(&self, id: PredId) -> &Predicate {
        &self.predicates[id as usize]
    }

    pub fn predicates(&self) -> impl Iterator<Item = (PredId, &Predicate)> {
        self.predicates
            .iter()
            .enumerate()
            .map(|(i, p)| (i as PredId, p))
    }

    pub fn const_id(&self, t: &Term) -> Option<ConstId> {
        self.const_ids.get(t).copied()
    }

    pub fn term(&self, id: ConstId) -> &Term {
        &self.constants[id as usize]
    }

    pub fn eq_pred(&self) -> PredId {
        self.eq
    }

    /// Constants occurring in at least one fact.
    pub fn domain(&self) -> impl Iterator<Item = ConstId> + '_ {
        (0..self.constants.len() as ConstId).filter(|&c| self.in_domain[c as usize])
    }

    pub fn in_domain(&self, id: ConstId) -> bool {
        self.in_domain.get(id as usize).copied().unwrap_or(false)
    }

    fn ground(&self, a: &Atom) -> Option<(PredId, Tuple)> {
        let p = self.pred_id(&a.predicate)?;
        let mut t = [0; 2];
        for (pos, arg) in a.args.iter().enumerate() {
            t[pos] = self.const_id(arg)?;
        }
        Some((p, t))
    }

    pub fn contains(&self, a: &Atom) -> bool {
        self.ground(a)
            .is_some_and(|(p, t)| self.store.contains(p, &t))
    }

    /// Whether `s ≈ t` holds in the model (the store is congruence-closed,
    /// so membership is entailment). Constants outside the model are only
    /// equal to themselves.
    pub fn entails_eq(&self, s: &Term, t: &Term) -> bool {
        match (self.const_id(s), self.const_id(t)) {
            (Some(a), Some(b)) => self.eq_ids(a, b),
            _ => s == t,
        }
    }

    pub(crate) fn eq_ids(&self, a: ConstId, b: ConstId) -> bool {
        a == b || self.store.contains(self.eq, &[a, b])
    }

    /// Constants `c` with `id ≈ c`.
    pub fn equal_to(&self, id: ConstId) -> impl Iterator<Item = ConstId> + '_ {
        let rel = self.store.relation(self.eq);
        rel.lookup(0, id).iter().map(move |&o| rel.tuple(o)[1])
    }

    pub fn is_unsatisfiable(&self) -> bool {
        self.pred_id(&Predicate::Concept(Concept::Bot))
            .is_some_and(|p| !self.store.relation(p).is_empty())
    }

    pub fn atom_of(&self, p: PredId, t: &Tuple) -> Atom {
        let pred = self.predicate(p).clone();
        let args = t[..pred.arity()]
            .iter()
            .map(|&c| self.term(c).clone())
            .collect();
        Atom::new(pred, args)
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        for (p, rel) in self.store.relations.iter().enumerate() {
            for t in rel.tuples() {
                out.insert(self.atom_of(p as PredId, t));
            }
        }
        out
    }

    /// One `p(a).` / `p(a,b).` / `eq(a,b).` line per fact, sorted.
    pub fn dump(&self) -> String {
        let mut lines: Vec<String> = self.atoms().iter().map(|a| format!("{a}.")).collect();
        lines.sort();
        let mut out = lines.join("\n");
        if !out.is_empty() {
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::{parse_kb, Individual};
    use crate::rewrite::{dat_translate, xi_translate, Clause, ProgramKind};

    fn program(facts: Vec<Atom>, rules: Vec<Clause>) -> LogicProgram {
        LogicProgram {
            kind: ProgramKind::Dat,
            rules: rules.into_iter().collect(),
            top: BTreeSet::new(),
            facts: facts.into_iter().collect(),
            equality: BTreeSet::new(),
            reflexivity: false,
        }
    }

    fn a(c: &str, t: &str) -> Atom {
        Atom::concept(Concept::atomic(c), Term::named(t))
    }

    #[test]
    fn facts_only_get_reflexivity() {
        let m = materialize(&program(vec![a("A", "a")], vec![]), &Budget::default()).unwrap();
        assert_eq!(m.dump(), "A(a).\neq(a,a).\n");
    }

    #[test]
    fn nominal_equality_propagates() {
        let rule = Clause::new(
            [Atom::concept(Concept::atomic("A"), Term::var("x"))],
            Atom::eq(Term::var("x"), Term::named("b")),
        );
        let facts = vec![a("A", "a"), a("B", "b")];
        let m = materialize(&program(facts, vec![rule]), &Budget::default()).unwrap();
        for l in ["eq(a,b)", "eq(b,a)", "A(b)", "B(a)", "eq(b,b)"] {
            assert!(m.dump().contains(l), "missing {l}");
        }
        assert!(m.entails_eq(&Term::named("a"), &Term::named("b")));
    }

    #[test]
    fn budget_is_enforced() {
        let kb = parse_kb("A SubClassOf B\nB SubClassOf C\nA(a). A(b).").unwrap();
        let err = materialize(&dat_translate(&kb), &Budget { max_facts: 4 }).unwrap_err();
        assert_eq!(err, EngineError::BudgetExceeded { limit: 4 });
    }

    #[test]
    fn function_terms_are_rejected() {
        let kb = parse_kb("A SubClassOf some r B\nA(a).").unwrap();
        assert_eq!(
            materialize(&xi_translate(&kb), &Budget::default()).unwrap_err(),
            EngineError::NotDatalog
        );
    }

    #[test]
    fn reflexivity_holds_for_unknown_constants_only_trivially() {
        let m = materialize(&program(vec![a("A", "a")], vec![]), &Budget::default()).unwrap();
        assert!(m.entails_eq(&Term::named("zz"), &Term::named("zz")));
        assert!(!m.entails_eq(&Term::named("a"), &Term::named("zz")));
    }

    #[test]
    fn unsatisfiable_when_bot_is_derived() {
        let kb = parse_kb("A SubClassOf Bot\nA(a).").unwrap();
        let m = materialize(&dat_translate(&kb), &Budget::default()).unwrap();
        assert!(m.is_unsatisfiable());
        assert!(m.contains(&Atom::concept(
            Concept::Bot,
            Term::Named(Individual::new("a"))
        )));
    }
}
