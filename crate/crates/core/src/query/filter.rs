//! The spurious-match filter: true auxiliary constants, the fork-rule
//! closure `∼`, the aux graph and the three rejection conditions.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use super::ConjunctiveQuery;
use crate::engine::{MinimalModel, Substitution};
use crate::rewrite::{Predicate, Term};

/// Constants of the model that are not `≈` to any named individual.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AuxSet {
    members: BTreeSet<Term>,
}

impl AuxSet {
    pub fn contains(&self, t: &Term) -> bool {
        self.members.contains(t)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Term> {
        self.members.iter()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

pub fn compute_aux_set(model: &MinimalModel) -> AuxSet {
    let members = model
        .domain()
        .filter(|&c| !model.term(c).is_named())
        .filter(|&c| !model.equal_to(c).any(|e| model.term(e).is_named()))
        .map(|c| model.term(c).clone())
        .collect();
    AuxSet { members }
}

/// Sort key used to pick class representatives: the bare name, then
/// individuals before variables.
fn gamma_key(t: &Term) -> (String, bool) {
    match t {
        Term::Var(v) => (v.clone(), true),
        other => (other.to_string(), false),
    }
}

fn image(tau: &Substitution, t: &Term) -> Term {
    tau.apply(t)
}

/// The least equivalence relation over `terms(q)` closed under the fork
/// rule, stored as a partition with the least member of each class as its
/// representative `γ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimRelation {
    repr: BTreeMap<Term, Term>,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    /// Keeps the smaller index as root, so roots are least class members.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        self.parent[hi] = lo;
        true
    }
}

pub fn compute_sim(q: &ConjunctiveQuery, tau: &Substitution, aux: &AuxSet) -> SimRelation {
    let mut terms: Vec<Term> = q.terms().into_iter().collect();
    terms.sort_by_key(gamma_key);
    let index = |t: &Term| terms.iter().position(|u| u == t).expect("query term");
    let forks: Vec<(usize, usize, bool)> = q
        .atoms()
        .iter()
        .filter(|a| matches!(a.predicate, Predicate::Role(_)))
        .map(|a| {
            let child = &a.args[1];
            (
                index(&a.args[0]),
                index(child),
                aux.contains(&image(tau, child)),
            )
        })
        .collect();
    let mut uf = UnionFind {
        parent: (0..terms.len()).collect(),
    };
    loop {
        let mut changed = false;
        for &(s, s2, s2_aux) in &forks {
            if !s2_aux {
                continue;
            }
            for &(t, t2, _) in &forks {
                if uf.find(s2) == uf.find(t2) {
                    changed |= uf.union(s, t);
                }
            }
        }
        if !changed {
            break;
        }
    }
    let repr = (0..terms.len())
        .map(|i| (terms[i].clone(), terms[uf.find(i)].clone()))
        .collect();
    SimRelation { repr }
}

impl SimRelation {
    /// `γ(t)`; terms outside the query are their own representative.
    pub fn representative<'a>(&'a self, t: &'a Term) -> &'a Term {
        self.repr.get(t).unwrap_or(t)
    }

    pub fn related(&self, s: &Term, t: &Term) -> bool {
        self.representative(s) == self.representative(t)
    }

    /// Equivalence classes, each sorted, ordered by representative.
    pub fn classes(&self) -> Vec<Vec<Term>> {
        let mut by_repr: BTreeMap<(String, bool), Vec<Term>> = BTreeMap::new();
        for (t, r) in &self.repr {
            by_repr.entry(gamma_key(r)).or_default().push(t.clone());
        }
        by_repr
            .into_values()
            .map(|mut c| {
                c.sort_by_key(gamma_key);
                c
            })
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        self.repr.iter().all(|(t, r)| t == r)
    }
}

/// Vertices are representatives of terms mapped into the aux set; one
/// edge per role atom between two such terms.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AuxGraph {
    pub vertices: BTreeSet<Term>,
    pub edges: BTreeSet<(Term, Term)>,
}

pub fn build_aux_graph(
    q: &ConjunctiveQuery,
    tau: &Substitution,
    sim: &SimRelation,
    aux: &AuxSet,
) -> AuxGraph {
    let is_aux = |t: &Term| aux.contains(&image(tau, t));
    let mut g = AuxGraph::default();
    for t in q.terms() {
        if is_aux(&t) {
            g.vertices.insert(sim.representative(&t).clone());
        }
    }
    for a in q.atoms() {
        if let (Predicate::Role(_), [s, t]) = (&a.predicate, a.args.as_slice()) {
            if is_aux(s) && is_aux(t) {
                g.edges
                    .insert((sim.representative(s).clone(), sim.representative(t).clone()));
            }
        }
    }
    g
}

/// Cycle detection by Kahn's algorithm; a self-loop is a cycle.
pub fn is_aux_cyclic(g: &AuxGraph) -> bool {
    let mut indegree: BTreeMap<&Term, usize> = g.vertices.iter().map(|v| (v, 0)).collect();
    let mut succ: BTreeMap<&Term, Vec<&Term>> = BTreeMap::new();
    for (s, t) in &g.edges {
        *indegree.entry(t).or_default() += 1;
        indegree.entry(s).or_default();
        succ.entry(s).or_default().push(t);
    }
    let total = indegree.len();
    let mut queue: VecDeque<&Term> = indegree
        .iter()
        .filter(|(_, &d)| d == 0)
        .map(|(v, _)| *v)
        .collect();
    let mut removed = 0;
    while let Some(v) = queue.pop_front() {
        removed += 1;
        for &w in succ.get(v).into_iter().flatten() {
            let d = indegree.get_mut(w).expect("vertex");
            *d -= 1;
            if *d == 0 {
                queue.push_back(w);
            }
        }
    }
    removed < total
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SpuriousReason {
    /// An answer variable is mapped to a non-named constant.
    AnswerNotNamed,
    /// Two `∼`-related terms are mapped to constants not entailed equal.
    UnentailedEquality,
    /// The aux graph has a cycle.
    AuxCycle,
}

impl SpuriousReason {
    pub fn code(self) -> char {
        match self {
            SpuriousReason::AnswerNotNamed => 'a',
            SpuriousReason::UnentailedEquality => 'b',
            SpuriousReason::AuxCycle => 'c',
        }
    }
}

impl fmt::Display for SpuriousReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "reason {}", self.code())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Genuine,
    Spurious(SpuriousReason),
}

impl Verdict {
    pub fn is_spurious(self) -> bool {
        matches!(self, Verdict::Spurious(_))
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Genuine => f.write_str("accepted"),
            Verdict::Spurious(r) => write!(f, "spurious: {r}"),
        }
    }
}

/// Checks conditions (a), (b), (c) in that order for a match `tau` of `q`
/// and reports the first that fires.
pub fn is_spurious(
    q: &ConjunctiveQuery,
    model: &MinimalModel,
    tau: &Substitution,
    aux: &AuxSet,
) -> Verdict {
    if q.answer_vars()
        .iter()
        .any(|x| !tau.get(x).is_some_and(Term::is_named))
    {
        return Verdict::Spurious(SpuriousReason::AnswerNotNamed);
    }
    let sim = compute_sim(q, tau, aux);
    for class in sim.classes() {
        let first = image(tau, &class[0]);
        if class[1..]
            .iter()
            .any(|t| !model.entails_eq(&first, &image(tau, t)))
        {
            return Verdict::Spurious(SpuriousReason::UnentailedEquality);
        }
    }
    if is_aux_cyclic(&build_aux_graph(q, tau, &sim, aux)) {
        return Verdict::Spurious(SpuriousReason::AuxCycle);
    }
    Verdict::Genuine
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: &str) -> Term {
        Term::var(n)
    }

    #[test]
    fn kahn_detects_cycles() {
        let mut g = AuxGraph::default();
        assert!(!is_aux_cyclic(&g));
        g.vertices.extend([v("a"), v("b"), v("c")]);
        g.edges.insert((v("a"), v("b")));
        g.edges.insert((v("b"), v("c")));
        assert!(!is_aux_cyclic(&g));
        g.edges.insert((v("c"), v("a")));
        assert!(is_aux_cyclic(&g));
        let mut selfloop = AuxGraph::default();
        selfloop.vertices.insert(v("y"));
        selfloop.edges.insert((v("y"), v("y")));
        assert!(is_aux_cyclic(&selfloop));
    }

    #[test]
    fn representatives_prefer_individuals_on_name_ties() {
        assert!(gamma_key(&Term::named("a")) < gamma_key(&v("a")));
        assert!(gamma_key(&v("a")) < gamma_key(&Term::named("b")));
    }
}
