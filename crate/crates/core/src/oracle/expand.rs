//! Bounded bottom-up expansion of Skolemised programs with function terms.
//!
//! This evaluator shares nothing with the datalog engine: it keeps its own
//! term arena, evaluates naively and treats equality natively (reflexivity,
//! symmetry, transitivity, replacement and functional reflexivity) instead
//! of using the program's equality clauses. Equality facts between function
//! terms are only kept for terms that occur in a concept or role fact; the
//! others cannot influence any such fact and would make every expansion
//! infinite through functional reflexivity.

use std::collections::{BTreeSet, HashMap, HashSet};

use thiserror::Error;

use crate::kb::{Concept, Individual, Role};
use crate::rewrite::{Atom, LogicProgram, Predicate, Term};

pub const DEFAULT_MAX_FACTS: usize = 200_000;
pub const MAX_ROUNDS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExpansionError {
    #[error("expansion exceeded {limit} facts")]
    BudgetExceeded { limit: usize },
    #[error("clause `{0}` has a function term in its body")]
    UnsupportedClause(String),
}

pub(crate) type TermId = u32;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Node {
    Named(Individual),
    Func(Role, Concept, TermId),
}

#[derive(Debug, Clone, Default)]
struct Arena {
    nodes: Vec<Node>,
    ids: HashMap<Node, TermId>,
    depth: Vec<usize>,
    /// Function terms by argument.
    parents: HashMap<TermId, Vec<TermId>>,
}

impl Arena {
    fn intern(&mut self, n: Node) -> TermId {
        if let Some(&id) = self.ids.get(&n) {
            return id;
        }
        let id = self.nodes.len() as TermId;
        let depth = match &n {
            Node::Named(_) => 0,
            Node::Func(_, _, arg) => {
                self.parents.entry(*arg).or_default().push(id);
                self.depth[*arg as usize] + 1
            }
        };
        self.nodes.push(n.clone());
        self.ids.insert(n, id);
        self.depth.push(depth);
        id
    }

    fn term(&self, id: TermId) -> Term {
        match &self.nodes[id as usize] {
            Node::Named(i) => Term::Named(i.clone()),
            Node::Func(r, c, arg) => Term::Func(r.clone(), c.clone(), Box::new(self.term(*arg))),
        }
    }

    fn lookup(&self, t: &Term) -> Option<TermId> {
        let n = match t {
            Term::Named(i) => Node::Named(i.clone()),
            Term::Func(r, c, inner) => Node::Func(r.clone(), c.clone(), self.lookup(inner)?),
            _ => return None,
        };
        self.ids.get(&n).copied()
    }

    fn is_named(&self, id: TermId) -> bool {
        matches!(self.nodes[id as usize], Node::Named(_))
    }
}

#[derive(Debug, Clone)]
enum Pat {
    Var(usize),
    Ground(TermId),
    Func(Role, Concept, Box<Pat>),
}

#[derive(Debug, Clone)]
struct ORule {
    body: Vec<(usize, Vec<Pat>)>,
    head: (usize, Vec<Pat>),
    nvars: usize,
}

pub(crate) type Fact = (usize, [TermId; 2]);

/// A finite part of the least Herbrand model of a program with function
/// symbols. If `saturated` holds it is the whole model.
#[derive(Debug, Clone)]
pub struct ExpansionModel {
    arena: Arena,
    predicates: Vec<Predicate>,
    pred_ids: HashMap<Predicate, usize>,
    eq: usize,
    facts: Vec<Fact>,
    set: HashSet<Fact>,
    index: HashMap<(usize, usize, TermId), Vec<u32>>,
    by_pred: Vec<Vec<u32>>,
    omega: HashSet<TermId>,
    depth: usize,
    saturated: bool,
    truncated: bool,
    rounds: usize,
}

/// Expands `program` with function terms nested at most `depth` deep and
/// the default fact budget.
pub fn expand(program: &LogicProgram, depth: usize) -> Result<ExpansionModel, ExpansionError> {
    expand_bounded(program, depth, DEFAULT_MAX_FACTS)
}

pub fn expand_bounded(
    program: &LogicProgram,
    depth: usize,
    max_facts: usize,
) -> Result<ExpansionModel, ExpansionError> {
    run(program, depth, max_facts, false)
}

/// The full model of `program` if its expansion saturates within the
/// bounds. Stops at the first depth truncation.
pub fn try_saturate(
    program: &LogicProgram,
    depth: usize,
    max_facts: usize,
) -> Result<Option<ExpansionModel>, ExpansionError> {
    let m = run(program, depth, max_facts, true)?;
    Ok(m.saturated.then_some(m))
}

fn run(
    program: &LogicProgram,
    depth: usize,
    max_facts: usize,
    stop_on_truncation: bool,
) -> Result<ExpansionModel, ExpansionError> {
    let mut m = ExpansionModel {
        arena: Arena::default(),
        predicates: Vec::new(),
        pred_ids: HashMap::new(),
        eq: 0,
        facts: Vec::new(),
        set: HashSet::new(),
        index: HashMap::new(),
        by_pred: Vec::new(),
        omega: HashSet::new(),
        depth,
        saturated: false,
        truncated: false,
        rounds: 0,
    };
    m.eq = m.pred(&Predicate::Eq);
    let mut rules = Vec::new();
    let mut seeds = Vec::new();
    for clause in program.rules.iter().chain(&program.top) {
        let mut vars = Vec::new();
        let mut body = Vec::new();
        for a in clause.body() {
            if a.args.iter().any(|t| matches!(t, Term::Func(..))) {
                return Err(ExpansionError::UnsupportedClause(clause.to_string()));
            }
            let p = m.pred(&a.predicate);
            body.push((p, a.args.iter().map(|t| m.pattern(t, &mut vars)).collect()));
        }
        let hp = m.pred(&clause.head().predicate);
        let head = (
            hp,
            clause
                .head()
                .args
                .iter()
                .map(|t| m.pattern(t, &mut vars))
                .collect(),
        );
        let rule = ORule {
            body,
            head,
            nvars: vars.len(),
        };
        if rule.body.is_empty() {
            seeds.push(rule);
        } else {
            rules.push(rule);
        }
    }
    let mut pending: Vec<Fact> = Vec::new();
    for a in &program.facts {
        let p = m.pred(&a.predicate);
        let mut t = [0; 2];
        for (i, arg) in a.args.iter().enumerate() {
            t[i] = m.ground(arg);
        }
        pending.push((p, t));
    }
    for rule in &seeds {
        m.instantiate(&rule.head, &vec![None; rule.nvars], &mut pending);
    }
    loop {
        let inserted = m.commit(pending, max_facts)?;
        if inserted == 0 && m.rounds > 0 {
            m.saturated = !m.truncated;
            break;
        }
        if m.rounds >= MAX_ROUNDS || (stop_on_truncation && m.truncated) {
            break;
        }
        m.rounds += 1;
        pending = m.round(&rules);
    }
    Ok(m)
}

impl ExpansionModel {
    fn pred(&mut self, p: &Predicate) -> usize {
        if let Some(&id) = self.pred_ids.get(p) {
            return id;
        }
        let id = self.predicates.len();
        self.predicates.push(p.clone());
        self.pred_ids.insert(p.clone(), id);
        self.by_pred.push(Vec::new());
        id
    }

    fn ground(&mut self, t: &Term) -> TermId {
        match t {
            Term::Named(i) => self.arena.intern(Node::Named(i.clone())),
            Term::Aux(r, c) => {
                // auxiliary constants are plain individuals to this evaluator
                self.arena.intern(Node::Named(Individual::new(format!(
                    "aux:{r}:{}",
                    c.name()
                ))))
            }
            Term::Func(r, c, inner) => {
                let arg = self.ground(inner);
                self.arena.intern(Node::Func(r.clone(), c.clone(), arg))
            }
            Term::Var(v) => panic!("variable {v} in a fact"),
        }
    }

    fn pattern(&mut self, t: &Term, vars: &mut Vec<String>) -> Pat {
        match t {
            Term::Var(v) => Pat::Var(vars.iter().position(|w| w == v).unwrap_or_else(|| {
                vars.push(v.clone());
                vars.len() - 1
            })),
            Term::Func(r, c, inner) => {
                Pat::Func(r.clone(), c.clone(), Box::new(self.pattern(inner, vars)))
            }
            other => Pat::Ground(self.ground(other)),
        }
    }

    /// Builds the term for `p`, or `None` if it would be too deep.
    fn build(&mut self, p: &Pat, binding: &[Option<TermId>]) -> Option<TermId> {
        match p {
            Pat::Var(v) => Some(binding[*v].expect("safe clause")),
            Pat::Ground(id) => Some(*id),
            Pat::Func(r, c, inner) => {
                let arg = self.build(inner, binding)?;
                if self.arena.depth[arg as usize] + 1 > self.depth {
                    self.truncated = true;
                    return None;
                }
                Some(self.arena.intern(Node::Func(r.clone(), c.clone(), arg)))
            }
        }
    }

    fn instantiate(
        &mut self,
        head: &(usize, Vec<Pat>),
        binding: &[Option<TermId>],
        out: &mut Vec<Fact>,
    ) {
        let mut t = [0; 2];
        for (i, p) in head.1.iter().enumerate() {
            match self.build(p, binding) {
                Some(id) => t[i] = id,
                None => return,
            }
        }
        out.push((head.0, t));
    }

    fn arity(&self, p: usize) -> usize {
        self.predicates[p].arity()
    }

    fn insert(&mut self, f: Fact) -> bool {
        if !self.set.insert(f) {
            return false;
        }
        let offset = self.facts.len() as u32;
        self.facts.push(f);
        self.by_pred[f.0].push(offset);
        for pos in 0..self.arity(f.0) {
            self.index
                .entry((f.0, pos, f.1[pos]))
                .or_default()
                .push(offset);
        }
        true
    }

    fn admissible(&self, id: TermId) -> bool {
        self.arena.is_named(id) || self.omega.contains(&id)
    }

    /// Inserts concept and role facts before equality facts, so that an
    /// equality can use terms introduced in the same round.
    fn commit(&mut self, pending: Vec<Fact>, max_facts: usize) -> Result<usize, ExpansionError> {
        let mut inserted = 0;
        let (eqs, others): (Vec<Fact>, Vec<Fact>) =
            pending.into_iter().partition(|f| f.0 == self.eq);
        for f in others {
            if self.insert(f) {
                inserted += 1;
                for pos in 0..self.arity(f.0) {
                    self.omega.insert(f.1[pos]);
                }
            }
        }
        for f in eqs {
            if self.admissible(f.1[0]) && self.admissible(f.1[1]) && self.insert(f) {
                inserted += 1;
            }
        }
        if self.facts.len() > max_facts {
            return Err(ExpansionError::BudgetExceeded { limit: max_facts });
        }
        Ok(inserted)
    }

    fn eq_of(&self, t: TermId) -> impl Iterator<Item = TermId> + '_ {
        self.index
            .get(&(self.eq, 0, t))
            .into_iter()
            .flatten()
            .map(|&o| self.facts[o as usize].1[1])
    }

    fn round(&mut self, rules: &[ORule]) -> Vec<Fact> {
        let mut out = Vec::new();
        for rule in rules {
            let mut bindings = Vec::new();
            let mut b = vec![None; rule.nvars];
            self.join(rule, 0, &mut b, &mut bindings);
            for b in bindings {
                self.instantiate(&rule.head, &b, &mut out);
            }
        }
        let eq = self.eq;
        let mut domain: BTreeSet<TermId> = self.omega.iter().copied().collect();
        for &(p, t) in &self.facts {
            if p == eq {
                domain.extend(t);
            }
        }
        for &w in &domain {
            out.push((eq, [w, w]));
        }
        for &(p, t) in &self.facts {
            if p == eq {
                let [s, u] = t;
                out.push((eq, [u, s]));
                for v in self.eq_of(u) {
                    out.push((eq, [s, v]));
                }
                if s != u {
                    for &fs in self.arena.parents.get(&s).into_iter().flatten() {
                        let Node::Func(r, c, _) = &self.arena.nodes[fs as usize] else {
                            continue;
                        };
                        let fu = Node::Func(r.clone(), c.clone(), u);
                        if let Some(&fu) = self.arena.ids.get(&fu) {
                            out.push((eq, [fs, fu]));
                        }
                    }
                }
            } else {
                for pos in 0..self.arity(p) {
                    for v in self.eq_of(t[pos]) {
                        let mut t2 = t;
                        t2[pos] = v;
                        out.push((p, t2));
                    }
                }
            }
        }
        out.retain(|f| !self.set.contains(f));
        out
    }

    fn join(
        &self,
        rule: &ORule,
        k: usize,
        b: &mut Vec<Option<TermId>>,
        out: &mut Vec<Vec<Option<TermId>>>,
    ) {
        if k == rule.body.len() {
            out.push(b.clone());
            return;
        }
        let (p, pats) = &rule.body[k];
        let value = |pat: &Pat, b: &[Option<TermId>]| match pat {
            Pat::Var(v) => b[*v],
            Pat::Ground(id) => Some(*id),
            Pat::Func(..) => unreachable!("function-free body"),
        };
        let probe = pats
            .iter()
            .enumerate()
            .find_map(|(pos, pat)| value(pat, b).map(|c| (pos, c)));
        let offsets: &[u32] = match probe {
            Some((pos, c)) => self.index.get(&(*p, pos, c)).map_or(&[], Vec::as_slice),
            None => &self.by_pred[*p],
        };
        for &o in offsets {
            let t = self.facts[o as usize].1;
            let mut newly = Vec::new();
            let mut ok = true;
            for (pos, pat) in pats.iter().enumerate() {
                match value(pat, b) {
                    Some(c) => ok &= t[pos] == c,
                    None => {
                        let Pat::Var(v) = pat else { unreachable!() };
                        b[*v] = Some(t[pos]);
                        newly.push(*v);
                    }
                }
                if !ok {
                    break;
                }
            }
            if ok {
                self.join(rule, k + 1, b, out);
            }
            for v in newly {
                b[v] = None;
            }
        }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// A round added nothing and no fact was ever discarded for depth.
    pub fn saturated(&self) -> bool {
        self.saturated
    }

    /// Some derived fact was discarded because of the depth bound.
    pub fn truncated(&self) -> bool {
        self.truncated
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }

    fn atom(&self, f: &Fact) -> Atom {
        let pred = self.predicates[f.0].clone();
        let args = f.1[..pred.arity()]
            .iter()
            .map(|&id| self.arena.term(id))
            .collect();
        Atom::new(pred, args)
    }

    pub fn facts(&self) -> BTreeSet<Atom> {
        self.facts.iter().map(|f| self.atom(f)).collect()
    }

    pub fn contains(&self, a: &Atom) -> bool {
        let Some(&p) = self.pred_ids.get(&a.predicate) else {
            return false;
        };
        let mut t = [0; 2];
        for (i, arg) in a.args.iter().enumerate() {
            match self.arena.lookup(arg) {
                Some(id) => t[i] = id,
                None => return false,
            }
        }
        self.set.contains(&(p, t))
    }

    pub fn entails_eq(&self, s: &Term, t: &Term) -> bool {
        s == t || self.contains(&Atom::eq(s.clone(), t.clone()))
    }

    pub fn is_unsatisfiable(&self) -> bool {
        self.pred_ids
            .get(&Predicate::Concept(Concept::Bot))
            .is_some_and(|&p| !self.by_pred[p].is_empty())
    }

    /// Terms occurring in some concept or role fact.
    pub fn omega(&self) -> BTreeSet<Term> {
        self.omega.iter().map(|&id| self.arena.term(id)).collect()
    }

    /// Terms of [`omega`](Self::omega) not equal to any named individual.
    pub fn aux_terms(&self) -> BTreeSet<Term> {
        self.omega
            .iter()
            .filter(|&&w| !self.arena.is_named(w) && !self.eq_of(w).any(|v| self.arena.is_named(v)))
            .map(|&w| self.arena.term(w))
            .collect()
    }

    /// One fact per line in the model-dump syntax, sorted.
    pub fn dump(&self) -> String {
        let mut lines: Vec<String> = self
            .facts
            .iter()
            .map(|f| format!("{}.", self.atom(f)))
            .collect();
        lines.sort();
        lines.into_iter().map(|l| l + "\n").collect()
    }

    /// Named-individual tuples `π` over `answer_vars` such that some
    /// assignment extending `π` makes every atom a fact.
    pub(crate) fn answer_tuples(
        &self,
        atoms: &[Atom],
        answer_vars: &[String],
    ) -> BTreeSet<Vec<Individual>> {
        let mut vs = answer_vars.to_vec();
        let mut body = Vec::new();
        for a in atoms {
            let Some(&p) = self.pred_ids.get(&a.predicate) else {
                return BTreeSet::new();
            };
            let mut pats = Vec::new();
            for t in &a.args {
                match t {
                    Term::Var(v) => {
                        let i = vs.iter().position(|w| w == v).unwrap_or_else(|| {
                            vs.push(v.clone());
                            vs.len() - 1
                        });
                        pats.push(Pat::Var(i));
                    }
                    other => match self.arena.lookup(other) {
                        Some(id) => pats.push(Pat::Ground(id)),
                        None => return BTreeSet::new(),
                    },
                }
            }
            body.push((p, pats));
        }
        // most bound positions first, then smaller relations
        let k = answer_vars.len();
        let mut bound = vec![false; vs.len()];
        let mut order = Vec::new();
        let mut left: Vec<usize> = (0..body.len()).collect();
        while !left.is_empty() {
            let score = |i: usize| {
                let (p, pats) = &body[i];
                let nb = pats
                    .iter()
                    .filter(|pat| match pat {
                        Pat::Var(v) => bound[*v],
                        _ => true,
                    })
                    .count();
                (std::cmp::Reverse(nb), self.by_pred[*p].len(), i)
            };
            let (pos, &best) = left
                .iter()
                .enumerate()
                .min_by_key(|(_, &i)| score(i))
                .expect("non-empty");
            left.remove(pos);
            for pat in &body[best].1 {
                if let Pat::Var(v) = pat {
                    bound[*v] = true;
                }
            }
            order.push(body[best].clone());
        }
        let search = Search {
            model: self,
            body: &order,
            k,
        };
        let mut found = HashSet::new();
        search.run(0, &mut vec![None; vs.len()], &mut found);
        found
            .into_iter()
            .map(|row| {
                row.iter()
                    .map(|&id| match &self.arena.nodes[id as usize] {
                        Node::Named(i) => i.clone(),
                        Node::Func(..) => unreachable!("answer variables bind named terms only"),
                    })
                    .collect()
            })
            .collect()
    }
}

struct Search<'a> {
    model: &'a ExpansionModel,
    body: &'a [(usize, Vec<Pat>)],
    k: usize,
}

impl Search<'_> {
    /// Returns whether a complete match was reached below this level.
    /// Once all answer variables are bound only one extension is sought.
    fn run(
        &self,
        level: usize,
        b: &mut Vec<Option<TermId>>,
        found: &mut HashSet<Vec<TermId>>,
    ) -> bool {
        let answers_bound = b[..self.k].iter().all(Option::is_some);
        let projection = || {
            b[..self.k]
                .iter()
                .map(|x| x.expect("bound"))
                .collect::<Vec<_>>()
        };
        if answers_bound && found.contains(&projection()) {
            return true;
        }
        if level == self.body.len() {
            found.insert(projection());
            return true;
        }
        let m = self.model;
        let (p, pats) = &self.body[level];
        let value = |pat: &Pat, b: &[Option<TermId>]| match pat {
            Pat::Var(v) => b[*v],
            Pat::Ground(id) => Some(*id),
            Pat::Func(..) => unreachable!("function-free query"),
        };
        let probe = pats
            .iter()
            .enumerate()
            .find_map(|(pos, pat)| value(pat, b).map(|c| (pos, c)));
        let offsets: &[u32] = match probe {
            Some((pos, c)) => m.index.get(&(*p, pos, c)).map_or(&[], Vec::as_slice),
            None => &m.by_pred[*p],
        };
        let mut any = false;
        for &o in offsets {
            let t = m.facts[o as usize].1;
            let mut newly = Vec::new();
            let mut ok = true;
            for (pos, pat) in pats.iter().enumerate() {
                match value(pat, b) {
                    Some(c) => ok &= t[pos] == c,
                    None => {
                        let Pat::Var(v) = pat else { unreachable!() };
                        ok &= *v >= self.k || m.arena.is_named(t[pos]);
                        if ok {
                            b[*v] = Some(t[pos]);
                            newly.push(*v);
                        }
                    }
                }
                if !ok {
                    break;
                }
            }
            if ok && self.run(level + 1, b, found) {
                any = true;
            }
            for v in newly {
                b[v] = None;
            }
            if any && answers_bound {
                return true;
            }
        }
        any
    }
}
